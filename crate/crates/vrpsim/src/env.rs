//! The sequential-agent environment engine.
//!
//! One agent acts at a time: after each step the selector picks the next
//! active agent and observations are computed for it against the freshest
//! state. An agent that selects its own depot retires permanently, and the
//! episode ends when every agent has retired. Unserved services are
//! charged on the final step.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::EnvError;
use crate::instance::{validate_instance, InstanceData, Problem};
use crate::obs::{
    build_bundle, nodes_static_features, DynamicContext, ObsConfig, ObservationBundle,
    ResolvedObsConfig,
};
use crate::policy::{Policy, PolicyKind};
use crate::reward::{dense_reward, sparse_reward, terminal_penalty};
use crate::rules::{
    apply_move, init_node_status, mask_feasible, AgentSnapshot, NodeStatus, RuleConfig,
};
use crate::selector::{next_agent, SelectorKind};
use crate::solution::{Route, Visit};

/// Reward delivery mode. Dense pays per step; sparse pays the identical
/// episode total on the final step only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardMode {
    #[default]
    Dense,
    Sparse,
}

impl std::str::FromStr for RewardMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(RewardMode::Dense),
            "sparse" => Ok(RewardMode::Sparse),
            other => Err(format!("unknown reward mode `{other}`")),
        }
    }
}

/// Environment configuration: selection strategy, observation set, reward
/// mode and rule semantics.
#[derive(Debug, Clone, Default)]
pub struct EnvConfig {
    pub selector: SelectorKind,
    pub obs: ObsConfig,
    pub reward_mode: RewardMode,
    pub rules: RuleConfig,
}

/// Mutable episode state. Owned by [`Env`]; read access is offered for
/// audits and baselines.
#[derive(Debug, Clone)]
pub struct EnvState {
    pub agents: Vec<AgentSnapshot>,
    pub nodes: Vec<NodeStatus>,
    pub active_agent: usize,
    pub last_active: Option<usize>,
    pub done: bool,
    pub step_count: usize,
    pub total_distance: f64,
    pub profit_collected: f64,
    pub demand_delivered: f64,
    /// Internal dense accumulators; kept in sparse mode too so the
    /// dense/sparse equality is checkable.
    pub dense_reward_sum: f64,
    pub dense_penalty_sum: f64,
    /// Cumulative (reward, penalty) per agent.
    pub agent_totals: Vec<(f64, f64)>,
    pub traces: Vec<Vec<Visit>>,
    rng: ChaCha8Rng,
}

/// Transition record returned by [`Env::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub penalty: f64,
    pub done: bool,
    pub next_agent: Option<usize>,
    /// Populated on the final step.
    pub stats: Option<EpisodeStats>,
}

/// End-of-episode report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub instance: String,
    pub problem: Problem,
    /// Sum of dense rewards over the episode.
    pub total_reward: f64,
    /// Sum of dense penalties plus the terminal penalty.
    pub total_penalty: f64,
    /// Positive-objective convention: route distance for distance
    /// problems (to minimize), collected profit for orienteering, profit
    /// minus distance for prize collecting.
    pub objective: f64,
    pub total_distance: f64,
    /// Agents that served at least one node.
    pub agents_used: usize,
    pub services_served: usize,
    pub demand_served_fraction: f64,
    pub profit_collected_fraction: f64,
    pub steps: usize,
    pub routes: Vec<Route>,
}

impl EpisodeStats {
    /// Episode total under the maximize convention: reward plus penalty.
    pub fn total(&self) -> f64 {
        self.total_reward + self.total_penalty
    }
}

/// A running episode over a borrowed instance.
#[derive(Debug)]
pub struct Env<'a> {
    inst: &'a InstanceData,
    config: EnvConfig,
    resolved_obs: ResolvedObsConfig,
    static_block: crate::obs::FeatureBlock,
    state: EnvState,
    current_mask: Vec<bool>,
}

impl<'a> Env<'a> {
    /// Validates the instance and starts an episode: all agents at their
    /// home depots, nothing served, first agent chosen by the selector.
    pub fn reset(
        inst: &'a InstanceData,
        config: EnvConfig,
        seed: u64,
    ) -> Result<(Self, ObservationBundle), EnvError> {
        let report = validate_instance(inst);
        if !report.ok() {
            return Err(EnvError::InvalidInstance(report));
        }
        let resolved_obs = ResolvedObsConfig::resolve(inst.problem, &config.obs)?;
        let static_block = nodes_static_features(inst, &resolved_obs);

        let agents: Vec<AgentSnapshot> = (0..inst.num_agents())
            .map(|a| AgentSnapshot::at_home(a, inst))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let active_agent = next_agent(config.selector, &agents, None, &mut rng)
            .expect("validated instances have at least one agent");
        let num_agents = agents.len();
        let state = EnvState {
            agents,
            nodes: init_node_status(inst),
            active_agent,
            last_active: None,
            done: false,
            step_count: 0,
            total_distance: 0.0,
            profit_collected: 0.0,
            demand_delivered: 0.0,
            dense_reward_sum: 0.0,
            dense_penalty_sum: 0.0,
            agent_totals: vec![(0.0, 0.0); num_agents],
            traces: vec![Vec::new(); num_agents],
            rng,
        };
        let mut env = Env {
            inst,
            config,
            resolved_obs,
            static_block,
            state,
            current_mask: Vec::new(),
        };
        env.refresh_mask();
        let bundle = env.observe();
        Ok((env, bundle))
    }

    pub fn instance(&self) -> &InstanceData {
        self.inst
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    pub fn done(&self) -> bool {
        self.state.done
    }

    /// Feasibility mask of the current active agent.
    pub fn feasible_actions(&self) -> &[bool] {
        &self.current_mask
    }

    fn refresh_mask(&mut self) {
        self.current_mask = mask_feasible(
            self.inst,
            &self.state.agents[self.state.active_agent],
            &self.state.nodes,
        );
    }

    /// Observation bundle for the current active agent.
    pub fn observe(&self) -> ObservationBundle {
        let ctx = DynamicContext {
            inst: self.inst,
            agents: &self.state.agents,
            nodes: &self.state.nodes,
            active: self.state.active_agent,
            last_active: self.state.last_active,
            action_mask: &self.current_mask,
            profit_collected: self.state.profit_collected,
            demand_delivered: self.state.demand_delivered,
        };
        build_bundle(&ctx, &self.resolved_obs, self.static_block.clone())
    }

    /// Uniform draw over the feasible actions of the active agent. The
    /// home depot is always feasible, so the draw never fails.
    pub fn sample_action(&mut self) -> Result<usize, EnvError> {
        if self.state.done {
            return Err(EnvError::EpisodeDone);
        }
        let feasible: Vec<usize> = self
            .current_mask
            .iter()
            .enumerate()
            .filter_map(|(v, ok)| ok.then_some(v))
            .collect();
        Ok(feasible[self.state.rng.random_range(0..feasible.len())])
    }

    /// Executes a feasible action for the active agent, retires it when it
    /// chose its depot, selects the next agent, and returns observations
    /// for that agent along with the transition record.
    ///
    /// Infeasible actions are rejected with `MaskViolation`; the engine
    /// never silently repairs.
    pub fn step(&mut self, action: usize) -> Result<(ObservationBundle, StepOutcome), EnvError> {
        if self.state.done {
            return Err(EnvError::EpisodeDone);
        }
        if action >= self.inst.num_nodes() {
            return Err(EnvError::UnknownAction(action));
        }
        let acting = self.state.active_agent;
        if !self.current_mask[action] {
            return Err(EnvError::MaskViolation {
                agent: acting,
                action,
            });
        }

        let delta = apply_move(
            self.inst,
            &self.config.rules,
            &self.state.agents[acting],
            &self.state.nodes,
            action,
        );
        let distance = self
            .inst
            .travel()
            .get(self.state.agents[acting].loc, action);
        let (reward, penalty) = dense_reward(self.inst.problem, &delta, distance);

        // Apply the move.
        {
            let agent = &mut self.state.agents[acting];
            agent.loc = action;
            agent.clock = delta.depart;
            agent.load += delta.load_delta;
            if self.inst.is_service(action) {
                agent.visited_services += 1;
            }
        }
        if self.inst.is_service(action) {
            let node = &mut self.state.nodes[action];
            node.remaining = (node.remaining - delta.quantity).max(0.0);
            if delta.node_visited_after {
                node.visited = true;
            }
            if node.served_by.is_none() {
                node.served_by = Some(acting);
            }
            self.state.demand_delivered += delta.quantity;
            self.state.profit_collected += delta.profit;
        }
        self.state.total_distance += distance;
        self.state.traces[acting].push(Visit {
            node: action,
            arrival: delta.arrival,
            service_start: delta.service_start,
            quantity: delta.quantity,
        });
        self.state.dense_reward_sum += reward;
        self.state.dense_penalty_sum += penalty;
        self.state.agent_totals[acting].0 += reward;
        self.state.agent_totals[acting].1 += penalty;
        self.state.step_count += 1;

        // Returning home retires the agent for good.
        if action == self.state.agents[acting].home {
            self.state.agents[acting].active = false;
        }
        self.state.last_active = Some(acting);

        let next = next_agent(
            self.config.selector,
            &self.state.agents,
            Some(acting),
            &mut self.state.rng,
        );
        match next {
            Some(agent) => {
                self.state.active_agent = agent;
                self.refresh_mask();
                let bundle = self.observe();
                let outcome = StepOutcome {
                    reward: if self.config.reward_mode == RewardMode::Dense {
                        reward
                    } else {
                        0.0
                    },
                    penalty: if self.config.reward_mode == RewardMode::Dense {
                        penalty
                    } else {
                        0.0
                    },
                    done: false,
                    next_agent: Some(agent),
                    stats: None,
                };
                Ok((bundle, outcome))
            }
            None => {
                self.state.done = true;
                let terminal = terminal_penalty(
                    self.inst,
                    &self.state.nodes,
                    self.config.rules.unserved_factor,
                );
                let stats = self.build_stats(terminal);
                let (reward, penalty) = match self.config.reward_mode {
                    RewardMode::Dense => (reward, penalty + terminal),
                    RewardMode::Sparse => sparse_reward(
                        self.state.dense_reward_sum,
                        self.state.dense_penalty_sum,
                        terminal,
                    ),
                };
                self.current_mask = vec![false; self.inst.num_nodes()];
                let bundle = self.observe();
                let outcome = StepOutcome {
                    reward,
                    penalty,
                    done: true,
                    next_agent: None,
                    stats: Some(stats),
                };
                Ok((bundle, outcome))
            }
        }
    }

    fn build_stats(&self, terminal: f64) -> EpisodeStats {
        let inst = self.inst;
        let state = &self.state;
        let services_served = inst
            .service_nodes()
            .filter(|v| {
                if inst.problem.split_delivery() {
                    state.nodes[*v].remaining <= crate::instance::TIME_TOL
                        && state.nodes[*v].served_by.is_some()
                } else {
                    state.nodes[*v].visited
                }
            })
            .count();
        let total_demand = inst.total_demand();
        let total_profit = inst.total_profit();
        let objective = match inst.problem {
            Problem::Toptw => state.profit_collected,
            Problem::Pcvrptw => state.profit_collected - state.total_distance,
            _ => state.total_distance,
        };
        EpisodeStats {
            instance: inst.name.clone(),
            problem: inst.problem,
            total_reward: state.dense_reward_sum,
            total_penalty: state.dense_penalty_sum + terminal,
            objective,
            total_distance: state.total_distance,
            agents_used: state
                .agents
                .iter()
                .filter(|a| a.visited_services > 0)
                .count(),
            services_served,
            demand_served_fraction: if total_demand > 0.0 {
                state.demand_delivered / total_demand
            } else {
                1.0
            },
            profit_collected_fraction: if total_profit > 0.0 {
                state.profit_collected / total_profit
            } else {
                1.0
            },
            steps: state.step_count,
            routes: state
                .traces
                .iter()
                .enumerate()
                .map(|(agent, visits)| Route {
                    agent,
                    visits: visits.clone(),
                })
                .collect(),
        }
    }
}

/// Runs one full episode under a scripted policy.
pub fn run_episode(
    inst: &InstanceData,
    config: EnvConfig,
    policy: &mut Policy,
    seed: u64,
) -> Result<EpisodeStats, EnvError> {
    let (mut env, mut bundle) = Env::reset(inst, config, seed)?;
    loop {
        let action = policy.act(&env, &bundle);
        let (next_bundle, outcome) = env.step(action)?;
        if outcome.done {
            return Ok(outcome.stats.expect("final step carries stats"));
        }
        bundle = next_bundle;
    }
}

/// Options for [`batch_rollout`].
#[derive(Debug, Clone)]
pub struct RolloutOptions {
    pub config: EnvConfig,
    pub policy: PolicyKind,
    /// Base seed; per-episode seeds are derived deterministically from it
    /// and the instance position, so parallel and sequential execution
    /// produce identical results.
    pub base_seed: u64,
    /// 0 uses the global thread pool; 1 forces sequential execution.
    pub jobs: usize,
    pub allow_mixed_sizes: bool,
}

impl Default for RolloutOptions {
    fn default() -> Self {
        RolloutOptions {
            config: EnvConfig::default(),
            policy: PolicyKind::Random,
            base_seed: 0,
            jobs: 0,
            allow_mixed_sizes: false,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Per-episode seeds for a batch.
pub fn episode_seed(base: u64, index: usize) -> u64 {
    splitmix64(base ^ (index as u64).wrapping_mul(0x9e3779b97f4a7c15))
}

/// Rolls out every instance independently and returns the stats in input
/// order. Per-instance failures are reported in place without aborting
/// the rest of the batch.
pub fn batch_rollout(
    instances: &[InstanceData],
    opts: &RolloutOptions,
) -> Result<Vec<Result<EpisodeStats, EnvError>>, EnvError> {
    if let Some(first) = instances.first() {
        for inst in &instances[1..] {
            if inst.problem != first.problem {
                return Err(EnvError::ProblemMismatch);
            }
            if !opts.allow_mixed_sizes && inst.num_nodes() != first.num_nodes() {
                return Err(EnvError::SizeMismatch(first.num_nodes(), inst.num_nodes()));
            }
        }
    }
    let run = |(i, inst): (usize, &InstanceData)| {
        let seed = episode_seed(opts.base_seed, i);
        let mut policy = Policy::new(opts.policy, splitmix64(seed));
        run_episode(inst, opts.config.clone(), &mut policy, seed)
    };
    if opts.jobs == 1 {
        Ok(instances.iter().enumerate().map(run).collect())
    } else if opts.jobs == 0 {
        Ok(instances.par_iter().enumerate().map(run).collect())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .expect("thread pool construction");
        Ok(pool.install(|| instances.par_iter().enumerate().map(run).collect()))
    }
}
