//! Offline solution representation and evaluation.
//!
//! [`evaluate_solution`] replays routes with the exact step semantics of
//! the rules kernel and scores them with the sparse-reward convention.
//! Recorded arrival/service-start times are informational; the replay
//! recomputes them. Recorded quantities matter only for split delivery,
//! where they are validated against capacity and demand conservation so
//! the evaluation is independent of how agents interleaved in time.

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;
use crate::instance::{InstanceData, TIME_TOL};
use crate::reward::{dense_reward, terminal_penalty};
use crate::rules::{apply_move, init_node_status, node_feasible, AgentSnapshot, RuleConfig};

/// One executed visit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub node: usize,
    pub arrival: f64,
    pub service_start: f64,
    /// Amount served at the node (0 for depot visits).
    pub quantity: f64,
}

/// One agent's route. The origin is implicitly the agent's home depot;
/// a completed route's last visit is the home depot again.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub agent: usize,
    pub visits: Vec<Visit>,
}

/// Result of replaying a route set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutcome {
    /// Sparse reward component (sum of per-move dense rewards).
    pub reward: f64,
    /// Sparse penalty component (soft penalties plus terminal penalty).
    pub penalty: f64,
    pub feasible: bool,
    /// Human-readable description of each violated constraint, including
    /// the violating visit.
    pub violations: Vec<String>,
    pub total_distance: f64,
}

impl EvalOutcome {
    /// Episode total under the maximize convention.
    pub fn total(&self) -> f64 {
        self.reward + self.penalty
    }
}

/// Replays `routes` against the instance and returns the sparse-reward
/// objective, the penalty, and whether any hard constraint was violated.
///
/// Pure function: identical inputs give bit-identical outputs. Unknown
/// node or agent indices are input errors, not violations.
pub fn evaluate_solution(
    inst: &InstanceData,
    routes: &[Route],
    cfg: &RuleConfig,
) -> Result<EvalOutcome, InstanceError> {
    for route in routes {
        if route.agent >= inst.num_agents() {
            return Err(InstanceError::UnknownAgent(route.agent));
        }
        for visit in &route.visits {
            if visit.node >= inst.num_nodes() {
                return Err(InstanceError::UnknownNode(visit.node));
            }
        }
    }

    let mut nodes = init_node_status(inst);
    let mut violations: Vec<String> = Vec::new();
    let mut reward = 0.0;
    let mut soft_penalties = 0.0;
    let mut total_distance = 0.0;
    let mut seen_agents = vec![false; inst.num_agents()];

    for route in routes {
        if seen_agents[route.agent] {
            violations.push(format!("agent {} has more than one route", route.agent));
            continue;
        }
        seen_agents[route.agent] = true;

        let mut agent = AgentSnapshot::at_home(route.agent, inst);
        let mut retired = false;
        for (k, visit) in route.visits.iter().enumerate() {
            let v = visit.node;
            if retired {
                violations.push(format!(
                    "agent {}: visit {k} to node {v} after returning home",
                    route.agent
                ));
                break;
            }
            if !node_feasible(inst, &agent, &nodes, v) {
                violations.push(format!(
                    "agent {}: visit {k} to node {v} violates a hard constraint",
                    route.agent
                ));
            }
            if inst.is_depot[v] && v != agent.home {
                // Already reported infeasible above; nothing to apply.
                continue;
            }

            let mut delta = apply_move(inst, cfg, &agent, &nodes, v);
            if inst.problem.split_delivery() && inst.is_service(v) {
                // Recorded split quantities are authoritative so the
                // replay does not depend on cross-agent interleaving.
                let q = visit.quantity;
                if q <= TIME_TOL {
                    violations.push(format!(
                        "agent {}: visit {k} serves a non-positive quantity {q}",
                        route.agent
                    ));
                }
                if q > agent.residual_capacity(inst) + TIME_TOL {
                    violations.push(format!(
                        "agent {}: visit {k} quantity {q} exceeds residual capacity",
                        route.agent
                    ));
                }
                if q > nodes[v].remaining + TIME_TOL {
                    violations.push(format!(
                        "agent {}: visit {k} quantity {q} exceeds remaining demand",
                        route.agent
                    ));
                }
                delta.quantity = q;
                delta.load_delta = q;
                delta.node_visited_after = nodes[v].remaining - q <= TIME_TOL;
            }

            let distance = inst.travel().get(agent.loc, v);
            let (r, p) = dense_reward(inst.problem, &delta, distance);
            reward += r;
            soft_penalties += p;
            total_distance += distance;

            agent.loc = v;
            agent.clock = delta.depart;
            agent.load += delta.load_delta;
            if inst.is_service(v) {
                agent.visited_services += 1;
                let node = &mut nodes[v];
                node.remaining = (node.remaining - delta.quantity).max(0.0);
                if delta.node_visited_after {
                    node.visited = true;
                }
                if node.served_by.is_none() {
                    node.served_by = Some(agent.index);
                }
            } else if v == agent.home {
                retired = true;
            }
            if agent.load < -TIME_TOL || agent.load > inst.capacity + TIME_TOL {
                violations.push(format!(
                    "agent {}: load {} outside [0, {}] after visit {k}",
                    route.agent, agent.load, inst.capacity
                ));
            }
        }
        if !retired && !route.visits.is_empty() {
            violations.push(format!("agent {}: route does not return home", route.agent));
        }
    }

    let terminal = terminal_penalty(inst, &nodes, cfg.unserved_factor);
    Ok(EvalOutcome {
        reward,
        penalty: soft_penalties + terminal,
        feasible: violations.is_empty(),
        violations,
        total_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_toy;
    use crate::instance::Problem;

    fn visit(node: usize) -> Visit {
        Visit {
            node,
            arrival: 0.0,
            service_start: 0.0,
            quantity: 0.0,
        }
    }

    #[test]
    fn empty_routes_pay_the_full_terminal_penalty() {
        let inst = generate_toy(Problem::Cvrptw);
        let out = evaluate_solution(&inst, &[], &RuleConfig::default()).unwrap();
        assert_eq!(out.reward, 0.0);
        assert!((out.penalty - (-12.0)).abs() < 1e-9);
        assert!(out.feasible);
    }

    #[test]
    fn out_and_back_route_scores_twice_the_leg() {
        let inst = generate_toy(Problem::Cvrptw);
        let route = Route {
            agent: 0,
            visits: vec![visit(1), visit(0)],
        };
        let out = evaluate_solution(&inst, &[route], &RuleConfig::default()).unwrap();
        let leg = inst.travel().get(0, 1);
        assert!((out.reward - (-2.0 * leg)).abs() < 1e-12);
        assert!(out.feasible);
        // Five services remain unserved.
        assert!((out.penalty - (-10.0 * 5.0 * leg)).abs() < 1e-9);
    }

    #[test]
    fn unknown_indices_are_input_errors() {
        let inst = generate_toy(Problem::Cvrptw);
        let bad_agent = Route {
            agent: 9,
            visits: vec![],
        };
        assert_eq!(
            evaluate_solution(&inst, &[bad_agent], &RuleConfig::default()).unwrap_err(),
            InstanceError::UnknownAgent(9)
        );
        let bad_node = Route {
            agent: 0,
            visits: vec![visit(99)],
        };
        assert_eq!(
            evaluate_solution(&inst, &[bad_node], &RuleConfig::default()).unwrap_err(),
            InstanceError::UnknownNode(99)
        );
    }

    #[test]
    fn double_service_is_a_violation() {
        let inst = generate_toy(Problem::Cvrptw);
        let routes = vec![
            Route {
                agent: 0,
                visits: vec![visit(1), visit(0)],
            },
            Route {
                agent: 1,
                visits: vec![visit(1), visit(0)],
            },
        ];
        let out = evaluate_solution(&inst, &routes, &RuleConfig::default()).unwrap();
        assert!(!out.feasible);
        assert!(out.violations.iter().any(|v| v.contains("node 1")));
    }

    #[test]
    fn missing_return_home_is_flagged() {
        let inst = generate_toy(Problem::Cvrptw);
        let route = Route {
            agent: 0,
            visits: vec![visit(1)],
        };
        let out = evaluate_solution(&inst, &[route], &RuleConfig::default()).unwrap();
        assert!(!out.feasible);
        assert!(out.violations[0].contains("does not return home"));
    }

    #[test]
    fn evaluation_is_pure() {
        let inst = generate_toy(Problem::Pcvrptw);
        let route = Route {
            agent: 0,
            visits: vec![visit(2), visit(5), visit(0)],
        };
        let a =
            evaluate_solution(&inst, std::slice::from_ref(&route), &RuleConfig::default()).unwrap();
        let b = evaluate_solution(&inst, &[route], &RuleConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.reward.to_bits(), b.reward.to_bits());
        assert_eq!(a.penalty.to_bits(), b.penalty.to_bits());
    }
}
