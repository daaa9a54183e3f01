//! Per-problem feasibility masks and transition deltas.
//!
//! Everything here is a pure function over state snapshots, so the
//! environment engine, the offline solution evaluator and the exhaustive
//! oracle all share one rules kernel.

use crate::instance::{InstanceData, Problem, TIME_TOL};

/// Live view of one agent, shared between the engine, the oracle and the
/// observation builder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSnapshot {
    pub index: usize,
    /// Home depot node; agents depart from and retire to it.
    pub home: usize,
    pub loc: usize,
    /// Absolute clock: starts at the home depot's opening time.
    pub clock: f64,
    /// Onboard quantity (PDPTW) or used capacity (everything else).
    pub load: f64,
    pub active: bool,
    /// Non-depot visits performed so far.
    pub visited_services: usize,
}

impl AgentSnapshot {
    pub fn at_home(index: usize, inst: &InstanceData) -> Self {
        let home = inst.home_of(index);
        AgentSnapshot {
            index,
            home,
            loc: home,
            clock: inst.depot_open(home),
            load: 0.0,
            active: true,
            visited_services: 0,
        }
    }

    pub fn residual_capacity(&self, inst: &InstanceData) -> f64 {
        inst.capacity - self.load
    }
}

/// Live view of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeStatus {
    pub visited: bool,
    /// Demand still to deliver (split delivery); mirrors `demand`
    /// elsewhere so the unserved bookkeeping is uniform.
    pub remaining: f64,
    /// Agent that (first) served the node; drives PDPTW precedence.
    pub served_by: Option<usize>,
}

/// Fresh node statuses at episode start.
pub fn init_node_status(inst: &InstanceData) -> Vec<NodeStatus> {
    (0..inst.num_nodes())
        .map(|i| NodeStatus {
            visited: false,
            remaining: if inst.is_depot[i] {
                0.0
            } else {
                inst.demand[i]
            },
            served_by: None,
        })
        .collect()
}

/// Which instant the soft-window penalty is charged on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SoftBasis {
    /// Service start, with earliest service at `open - max_violation`.
    /// Waiting (bounded by `max_wait`) is not double-charged.
    #[default]
    ServiceStart,
    /// Raw arrival time.
    Arrival,
}

/// Tunable rule semantics. Defaults match the problem definitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleConfig {
    pub soft_basis: SoftBasis,
    /// Multiplier on depot distance for unserved services at episode end.
    pub unserved_factor: f64,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            soft_basis: SoftBasis::default(),
            unserved_factor: 10.0,
        }
    }
}

/// Everything a single move changes, before it is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveDelta {
    pub arrival: f64,
    pub service_start: f64,
    /// `service_start + service_time`; the agent's clock after the move.
    pub depart: f64,
    /// Amount served at the node (never negative; demand units).
    pub quantity: f64,
    /// Signed change to the agent's load.
    pub load_delta: f64,
    /// Whether the node counts as fully served after this move.
    pub node_visited_after: bool,
    /// Non-positive soft time-window penalty.
    pub soft_penalty: f64,
    /// Profit collected by this move.
    pub profit: f64,
}

/// Arrival and service-start times for moving from `loc` to `v`.
pub fn arrival_and_start(inst: &InstanceData, clock: f64, loc: usize, v: usize) -> (f64, f64) {
    let arrival = clock + inst.travel().get(loc, v);
    let earliest = if inst.problem.soft_windows() && !inst.is_depot[v] {
        let s = inst.soft.expect("soft problem carries soft params");
        inst.tw_open[v] - s.max_violation
    } else {
        inst.tw_open[v]
    };
    (arrival, arrival.max(earliest))
}

/// Whether the active agent may move to node `v`.
///
/// The home depot is always feasible (stay or return); foreign depots
/// never are. A service node must pass every applicable clause: still
/// servable, capacity, time window, and return to the home depot by its
/// closing time.
pub fn node_feasible(
    inst: &InstanceData,
    agent: &AgentSnapshot,
    nodes: &[NodeStatus],
    v: usize,
) -> bool {
    if inst.is_depot[v] {
        return v == agent.home;
    }
    let status = &nodes[v];

    // (a) still servable
    let servable = if inst.problem.split_delivery() {
        status.remaining > TIME_TOL
    } else {
        !status.visited
    };
    if !servable {
        return false;
    }

    // (b) capacity
    match inst.problem {
        Problem::Toptw => {}
        Problem::Sdvrptw => {
            if agent.residual_capacity(inst) <= TIME_TOL {
                return false;
            }
        }
        Problem::Pdptw => {
            if let Some(pickup) = inst.pickup_of[v] {
                // Delivery: its pickup must be onboard this vehicle.
                if nodes[pickup].served_by != Some(agent.index) {
                    return false;
                }
            } else if agent.load + inst.demand[v] > inst.capacity + TIME_TOL {
                return false;
            }
        }
        _ => {
            if inst.demand[v] > agent.residual_capacity(inst) + TIME_TOL {
                return false;
            }
        }
    }

    // (c) time window
    let (arrival, service_start) = arrival_and_start(inst, agent.clock, agent.loc, v);
    if inst.problem.soft_windows() {
        let s = inst.soft.expect("soft problem carries soft params");
        if arrival < inst.tw_open[v] - s.max_violation - s.max_wait - TIME_TOL {
            return false;
        }
        if arrival > inst.tw_close[v] + s.max_violation + TIME_TOL {
            return false;
        }
    } else if service_start > inst.tw_close[v] + TIME_TOL {
        return false;
    }

    // (d) return home by the home depot's closing time
    let depart = service_start + inst.service_time[v];
    depart + inst.travel().get(v, agent.home) <= inst.depot_close(agent.home) + TIME_TOL
}

/// Boolean feasibility mask over all nodes for one agent.
pub fn mask_feasible(
    inst: &InstanceData,
    agent: &AgentSnapshot,
    nodes: &[NodeStatus],
) -> Vec<bool> {
    (0..inst.num_nodes())
        .map(|v| node_feasible(inst, agent, nodes, v))
        .collect()
}

/// Computes the transition delta for a mask-feasible move.
///
/// Calling this on an infeasible node is a contract violation; the engine
/// guards it with [`mask_feasible`].
pub fn apply_move(
    inst: &InstanceData,
    cfg: &RuleConfig,
    agent: &AgentSnapshot,
    nodes: &[NodeStatus],
    v: usize,
) -> MoveDelta {
    let (arrival, service_start) = arrival_and_start(inst, agent.clock, agent.loc, v);

    if inst.is_depot[v] {
        return MoveDelta {
            arrival,
            service_start: arrival,
            depart: arrival,
            quantity: 0.0,
            load_delta: 0.0,
            node_visited_after: false,
            soft_penalty: 0.0,
            profit: 0.0,
        };
    }

    let soft_penalty = if inst.problem.soft_windows() {
        let s = inst.soft.expect("soft problem carries soft params");
        let basis = match cfg.soft_basis {
            SoftBasis::ServiceStart => service_start,
            SoftBasis::Arrival => arrival,
        };
        let early = s.early_rate * (inst.tw_open[v] - basis).max(0.0);
        let late = s.late_rate * (basis - inst.tw_close[v]).max(0.0);
        -(early + late)
    } else {
        0.0
    };

    let (quantity, load_delta, node_visited_after) = match inst.problem {
        Problem::Sdvrptw => {
            let q = nodes[v].remaining.min(agent.residual_capacity(inst));
            (q, q, nodes[v].remaining - q <= TIME_TOL)
        }
        Problem::Pdptw => match inst.pickup_of[v] {
            Some(pickup) => (inst.demand[v], -inst.demand[pickup], true),
            None => (inst.demand[v], inst.demand[v], true),
        },
        _ => (inst.demand[v], inst.demand[v], true),
    };

    let profit = if inst.problem.uses_profit() {
        inst.profit[v]
    } else {
        0.0
    };

    MoveDelta {
        arrival,
        service_start,
        depart: service_start + inst.service_time[v],
        quantity,
        load_delta,
        node_visited_after,
        soft_penalty,
        profit,
    }
}
