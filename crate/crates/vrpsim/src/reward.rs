//! Dense and sparse reward evaluation.
//!
//! Every step yields a `(reward, penalty)` pair; penalties are always
//! non-positive. Distance problems reward the negative distance traveled,
//! profit problems the profit collected, and unserved services are charged
//! a terminal penalty proportional to their depot distance.

use crate::instance::{InstanceData, Problem, TIME_TOL};
use crate::rules::{MoveDelta, NodeStatus};

/// Per-step reward and penalty for an executed move.
pub fn dense_reward(problem: Problem, delta: &MoveDelta, move_distance: f64) -> (f64, f64) {
    match problem {
        Problem::Toptw => (delta.profit, 0.0),
        Problem::Pcvrptw => (-move_distance + delta.profit, 0.0),
        Problem::Cvrpstw => (-move_distance, delta.soft_penalty),
        _ => (-move_distance, 0.0),
    }
}

/// Terminal penalty: `-factor` times the depot distance of every service
/// left unserved. Profit problems do not require visiting all clients and
/// are never charged.
///
/// For multi-depot instances the nearest depot anchors the distance; a
/// split-delivery node counts as unserved while any demand remains.
pub fn terminal_penalty(inst: &InstanceData, nodes: &[NodeStatus], factor: f64) -> f64 {
    if !inst.problem.penalizes_unserved() {
        return 0.0;
    }
    let mut total = 0.0;
    for i in inst.service_nodes() {
        let unserved = if inst.problem.split_delivery() {
            nodes[i].remaining > TIME_TOL
        } else {
            !nodes[i].visited
        };
        if unserved {
            total += inst.travel().get(inst.nearest_depot(i), i);
        }
    }
    if total == 0.0 {
        0.0
    } else {
        -factor * total
    }
}

/// Sparse reward from the episode's accumulated dense components: the full
/// total is distributed on the final step, all earlier steps report zero.
pub fn sparse_reward(
    dense_reward_sum: f64,
    dense_penalty_sum: f64,
    terminal_penalty: f64,
) -> (f64, f64) {
    (dense_reward_sum, dense_penalty_sum + terminal_penalty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_toy;
    use crate::rules::init_node_status;

    fn zero_delta() -> MoveDelta {
        MoveDelta {
            arrival: 0.0,
            service_start: 0.0,
            depart: 0.0,
            quantity: 0.0,
            load_delta: 0.0,
            node_visited_after: true,
            soft_penalty: 0.0,
            profit: 0.0,
        }
    }

    #[test]
    fn dense_distance_problems() {
        let (r, p) = dense_reward(Problem::Cvrptw, &zero_delta(), 0.25);
        assert_eq!((r, p), (-0.25, 0.0));
    }

    #[test]
    fn dense_toptw_is_profit_only() {
        let mut delta = zero_delta();
        delta.profit = 3.0;
        let (r, p) = dense_reward(Problem::Toptw, &delta, 0.4);
        assert_eq!((r, p), (3.0, 0.0));
    }

    #[test]
    fn dense_soft_windows_carry_penalty() {
        let mut delta = zero_delta();
        delta.soft_penalty = -2.0;
        let (r, p) = dense_reward(Problem::Cvrpstw, &delta, 0.5);
        assert_eq!((r, p), (-0.5, -2.0));
    }

    #[test]
    fn dense_prize_collecting_mixes_both() {
        let mut delta = zero_delta();
        delta.profit = 1.5;
        let (r, p) = dense_reward(Problem::Pcvrptw, &delta, 0.5);
        assert_eq!((r, p), (1.0, 0.0));
    }

    #[test]
    fn terminal_penalty_examples() {
        let inst = generate_toy(Problem::Cvrptw);
        let mut nodes = init_node_status(&inst);

        // All 6 toy services sit 0.2 from the depot: -10 * 6 * 0.2 = -12.
        assert!((terminal_penalty(&inst, &nodes, 10.0) - (-12.0)).abs() < 1e-9);

        for s in nodes.iter_mut().skip(1) {
            s.visited = true;
            s.remaining = 0.0;
        }
        assert_eq!(terminal_penalty(&inst, &nodes, 10.0), 0.0);

        // Exactly one unserved node 0.2 away: -2.0 under factor 10.
        nodes[3].visited = false;
        assert!((terminal_penalty(&inst, &nodes, 10.0) - (-2.0)).abs() < 1e-9);
    }

    #[test]
    fn terminal_penalty_skips_profit_problems() {
        let inst = generate_toy(Problem::Toptw);
        let nodes = init_node_status(&inst);
        assert_eq!(terminal_penalty(&inst, &nodes, 10.0), 0.0);
    }

    #[test]
    fn sparse_is_sum_of_dense_plus_terminal() {
        let (r, p) = sparse_reward(-1.8, -0.5, -3.0);
        assert_eq!(r, -1.8);
        assert_eq!(p, -3.5);
    }
}
