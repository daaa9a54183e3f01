//! Exhaustive search over action sequences on desk-scale instances.
//!
//! Enumerates every mask-legal action sequence under a deterministic
//! selector, memoizing on the quantized state, and returns the best
//! episode total together with one optimal route set. Ground truth for
//! tests; large instances are rejected outright.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::env::{Env, EnvConfig, EpisodeStats, RewardMode};
use crate::error::OracleError;
use crate::instance::InstanceData;
use crate::obs::ObsConfig;
use crate::reward::{dense_reward, terminal_penalty};
use crate::rules::{
    apply_move, init_node_status, node_feasible, AgentSnapshot, NodeStatus, RuleConfig,
};
use crate::selector::{next_agent, SelectorKind};
use crate::solution::Route;

/// Size bounds for the enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLimits {
    pub max_services: usize,
    pub max_agents: usize,
    /// Safety valve on action-sequence length; exceeding it aborts the
    /// search instead of silently pruning.
    pub max_depth: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_services: 8,
            max_agents: 3,
            max_depth: 0, // 0 derives a bound from the instance
        }
    }
}

/// The proven optimum and one route set attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub reward: f64,
    pub penalty: f64,
    pub routes: Vec<Route>,
    pub stats: EpisodeStats,
    pub states_expanded: usize,
}

impl OracleResult {
    /// Episode total under the maximize convention.
    pub fn total(&self) -> f64 {
        self.reward + self.penalty
    }
}

/// Quantized to 1e-9 so continuous clocks and loads can key the memo.
fn quantize(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct StateKey {
    active: usize,
    agents: Vec<(usize, i64, i64, bool)>,
    nodes: Vec<(bool, i64, i8)>,
}

fn make_key(active: usize, agents: &[AgentSnapshot], nodes: &[NodeStatus]) -> StateKey {
    StateKey {
        active,
        agents: agents
            .iter()
            .map(|a| (a.loc, quantize(a.clock), quantize(a.load), a.active))
            .collect(),
        nodes: nodes
            .iter()
            .map(|s| {
                (
                    s.visited,
                    quantize(s.remaining),
                    s.served_by.map_or(-1i8, |a| a as i8),
                )
            })
            .collect(),
    }
}

struct Searcher<'a> {
    inst: &'a InstanceData,
    rules: RuleConfig,
    selector: SelectorKind,
    max_depth: usize,
    memo: HashMap<StateKey, (f64, usize)>,
    rng: ChaCha8Rng,
}

impl Searcher<'_> {
    /// Best total-to-go from this state. Memoized: the value is Markov in
    /// the (quantized) state.
    fn search(
        &mut self,
        agents: &[AgentSnapshot],
        nodes: &[NodeStatus],
        active: usize,
        depth: usize,
    ) -> Result<f64, OracleError> {
        let key = make_key(active, agents, nodes);
        if let Some((value, _)) = self.memo.get(&key) {
            return Ok(*value);
        }
        if depth > self.max_depth {
            return Err(OracleError::DepthExceeded(self.max_depth));
        }

        let mut best = f64::NEG_INFINITY;
        let mut best_action = agents[active].home;
        for v in 0..self.inst.num_nodes() {
            if !node_feasible(self.inst, &agents[active], nodes, v) {
                continue;
            }
            let (step_value, next_agents, next_nodes, next_active) =
                self.transition(agents, nodes, active, v);
            let togo = match next_active {
                Some(next) => self.search(&next_agents, &next_nodes, next, depth + 1)?,
                None => terminal_penalty(self.inst, &next_nodes, self.rules.unserved_factor),
            };
            let total = step_value + togo;
            if total > best {
                best = total;
                best_action = v;
            }
        }

        self.memo.insert(key, (best, best_action));
        Ok(best)
    }

    /// Applies one action to a cloned state; mirrors the engine's
    /// bookkeeping exactly.
    fn transition(
        &mut self,
        agents: &[AgentSnapshot],
        nodes: &[NodeStatus],
        active: usize,
        v: usize,
    ) -> (f64, Vec<AgentSnapshot>, Vec<NodeStatus>, Option<usize>) {
        let mut agents = agents.to_vec();
        let mut nodes = nodes.to_vec();
        let delta = apply_move(self.inst, &self.rules, &agents[active], &nodes, v);
        let distance = self.inst.travel().get(agents[active].loc, v);
        let (r, p) = dense_reward(self.inst.problem, &delta, distance);

        let agent = &mut agents[active];
        agent.loc = v;
        agent.clock = delta.depart;
        agent.load += delta.load_delta;
        if self.inst.is_service(v) {
            agent.visited_services += 1;
            let node = &mut nodes[v];
            node.remaining = (node.remaining - delta.quantity).max(0.0);
            if delta.node_visited_after {
                node.visited = true;
            }
            if node.served_by.is_none() {
                node.served_by = Some(active);
            }
        } else if v == agent.home {
            agent.active = false;
        }
        let next = next_agent(self.selector, &agents, Some(active), &mut self.rng);
        (r + p, agents, nodes, next)
    }
}

/// Depth-first enumeration of all mask-legal action sequences, scored with
/// the sparse-reward total. Deterministic; requires a deterministic
/// selector.
pub fn brute_force_optimum(
    inst: &InstanceData,
    selector: SelectorKind,
    rules: RuleConfig,
    limits: OracleLimits,
) -> Result<OracleResult, OracleError> {
    if selector == SelectorKind::Random {
        return Err(OracleError::RandomSelector);
    }
    if inst.num_services() > limits.max_services || inst.num_agents() > limits.max_agents {
        return Err(OracleError::TooLarge {
            services: inst.num_services(),
            agents: inst.num_agents(),
            max_services: limits.max_services,
            max_agents: limits.max_agents,
        });
    }
    let max_depth = if limits.max_depth == 0 {
        inst.num_agents() * (inst.num_nodes() + 2) + 4
    } else {
        limits.max_depth
    };

    let mut searcher = Searcher {
        inst,
        rules,
        selector,
        max_depth,
        memo: HashMap::new(),
        rng: ChaCha8Rng::seed_from_u64(0),
    };
    let agents: Vec<AgentSnapshot> = (0..inst.num_agents())
        .map(|a| AgentSnapshot::at_home(a, inst))
        .collect();
    let nodes = init_node_status(inst);
    let mut dummy_rng = ChaCha8Rng::seed_from_u64(0);
    let first = next_agent(selector, &agents, None, &mut dummy_rng)
        .expect("instances have at least one agent");
    let dfs_total = searcher.search(&agents, &nodes, first, 0)?;

    // Reconstruct the optimal action sequence from the memo, then replay
    // it through the engine to extract routes and authoritative totals.
    let mut actions = Vec::new();
    {
        let mut agents = agents;
        let mut nodes = nodes;
        let mut active = Some(first);
        while let Some(agent) = active {
            let key = make_key(agent, &agents, &nodes);
            let (_, action) = searcher.memo[&key];
            actions.push(action);
            let (_, next_agents, next_nodes, next_active) =
                searcher.transition(&agents, &nodes, agent, action);
            agents = next_agents;
            nodes = next_nodes;
            active = next_active;
        }
    }

    let config = EnvConfig {
        selector,
        obs: ObsConfig::default(),
        reward_mode: RewardMode::Sparse,
        rules,
    };
    let (mut env, _) = Env::reset(inst, config, 0)?;
    let mut stats = None;
    for action in &actions {
        let (_, outcome) = env.step(*action)?;
        if outcome.done {
            stats = outcome.stats;
        }
    }
    let stats = stats.expect("reconstructed sequence completes the episode");
    debug_assert!(
        (stats.total() - dfs_total).abs() <= 1e-9 * (1.0 + dfs_total.abs()),
        "search total {dfs_total} disagrees with replay {}",
        stats.total()
    );

    Ok(OracleResult {
        reward: stats.total_reward,
        penalty: stats.total_penalty,
        routes: stats.routes.clone(),
        states_expanded: searcher.memo.len(),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{InstanceData, InstanceParts, Problem};
    use crate::solution::evaluate_solution;

    fn single_service_instance(window: (f64, f64), service_time: f64, demand: f64) -> InstanceData {
        InstanceData::new(InstanceParts {
            name: "oracle_fixture".into(),
            problem: Problem::Cvrptw,
            seed: 0,
            coords: vec![[0.5, 0.5], [0.8, 0.5]],
            is_depot: vec![true, false],
            demand: vec![0.0, demand],
            profit: vec![0.0, 0.0],
            service_time: vec![0.0, service_time],
            tw_open: vec![0.0, window.0],
            tw_close: vec![3.0, window.1],
            capacity: 10.0,
            agent_home_depot: vec![0],
            pickup_of: vec![None, None],
            soft: None,
            explicit_travel: None,
        })
        .unwrap()
    }

    #[test]
    fn single_reachable_service_gives_out_and_back() {
        let inst = single_service_instance((0.0, 3.0), 0.1, 2.0);
        let result = brute_force_optimum(
            &inst,
            SelectorKind::RoundRobin,
            RuleConfig::default(),
            OracleLimits::default(),
        )
        .unwrap();
        let t = inst.travel().get(0, 1);
        assert!((result.total() - (-2.0 * t)).abs() < 1e-12);
        assert_eq!(result.penalty, 0.0);
        let visited: Vec<usize> = result.routes[0].visits.iter().map(|v| v.node).collect();
        assert_eq!(visited, vec![1, 0]);
    }

    #[test]
    fn unreachable_service_leaves_only_the_penalty_plan() {
        // The window opens so late that serving and returning overruns the
        // depot close; the best plan stays home and eats the penalty.
        // Demand 0 keeps the instance past the validator's reachability
        // guard, which only protects demand- or profit-bearing nodes.
        let inst = single_service_instance((2.9, 3.0), 0.2, 0.0);
        let result = brute_force_optimum(
            &inst,
            SelectorKind::RoundRobin,
            RuleConfig::default(),
            OracleLimits::default(),
        )
        .unwrap();
        let t = inst.travel().get(0, 1);
        assert!((result.total() - (-10.0 * t)).abs() < 1e-12);
        assert_eq!(result.reward, 0.0);
        let visited: Vec<usize> = result.routes[0].visits.iter().map(|v| v.node).collect();
        assert_eq!(visited, vec![0]);
    }

    fn toptw_three_services() -> InstanceData {
        // Service takes 1.0; the horizon admits exactly two visits, so the
        // optimum is the two largest profits: 3 + 2 = 5.
        InstanceData::new(InstanceParts {
            name: "toptw_three".into(),
            problem: Problem::Toptw,
            seed: 0,
            coords: vec![[0.5, 0.5], [0.7, 0.5], [0.5, 0.7], [0.3, 0.5]],
            is_depot: vec![true, false, false, false],
            demand: vec![0.0; 4],
            profit: vec![0.0, 1.0, 2.0, 3.0],
            service_time: vec![0.0, 1.0, 1.0, 1.0],
            tw_open: vec![0.0; 4],
            tw_close: vec![2.9; 4],
            capacity: 1.0,
            agent_home_depot: vec![0],
            pickup_of: vec![None; 4],
            soft: None,
            explicit_travel: None,
        })
        .unwrap()
    }

    #[test]
    fn toptw_enumeration_finds_the_best_pair() {
        let inst = toptw_three_services();
        let rules = RuleConfig::default();
        let result = brute_force_optimum(
            &inst,
            SelectorKind::RoundRobin,
            rules,
            OracleLimits::default(),
        )
        .unwrap();
        assert_eq!(result.total(), 5.0);

        // The independent replayer agrees exactly.
        let eval = evaluate_solution(&inst, &result.routes, &rules).unwrap();
        assert!(eval.feasible);
        assert_eq!(eval.reward, result.reward);
        assert_eq!(eval.penalty, result.penalty);
    }

    #[test]
    fn selector_choice_does_not_change_single_agent_optimum() {
        let inst = toptw_three_services();
        let rules = RuleConfig::default();
        let rr = brute_force_optimum(
            &inst,
            SelectorKind::RoundRobin,
            rules,
            OracleLimits::default(),
        )
        .unwrap();
        let st = brute_force_optimum(
            &inst,
            SelectorKind::SmallestTime,
            rules,
            OracleLimits::default(),
        )
        .unwrap();
        assert!((rr.total() - st.total()).abs() < 1e-9);
    }

    #[test]
    fn oversized_instances_are_rejected() {
        let spec = crate::generate::GenerationSpec::for_problem(Problem::Cvrptw, 50);
        let inst = crate::generate::generate_random(&spec, 1).unwrap();
        let err = brute_force_optimum(
            &inst,
            SelectorKind::RoundRobin,
            RuleConfig::default(),
            OracleLimits::default(),
        )
        .unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { .. }));
    }

    #[test]
    fn random_selector_is_rejected() {
        let inst = toptw_three_services();
        let err = brute_force_optimum(
            &inst,
            SelectorKind::Random,
            RuleConfig::default(),
            OracleLimits::default(),
        )
        .unwrap_err();
        assert_eq!(err, OracleError::RandomSelector);
    }
}
