//! Observation computation for the active agent.
//!
//! Five feature families are produced per step: static node features
//! (cached per episode), dynamic node features relative to the active
//! agent, the active agent's own features, per-agent features for the
//! whole fleet, and global episode features. Features are addressed by
//! name through a registry, so custom observation sets are configuration.
//!
//! Normalization: times divide by the horizon (latest depot close), loads
//! by the vehicle capacity, node counts by the number of services, agent
//! counts by the fleet size. Signed time features are left unclamped.

use serde::{Deserialize, Serialize};

use crate::error::EnvError;
use crate::instance::{InstanceData, Problem};
use crate::rules::{mask_feasible, AgentSnapshot, NodeStatus};

/// Feature selection per family; `None` selects the problem's full
/// registry in documented column order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObsConfig {
    pub nodes_static: Option<Vec<String>>,
    pub nodes_dynamic: Option<Vec<String>>,
    pub agent: Option<Vec<String>>,
    pub other_agents: Option<Vec<String>>,
    pub global: Option<Vec<String>>,
}

/// Full registry per family for a problem, in documented column order.
pub fn nodes_static_columns(problem: Problem) -> Vec<&'static str> {
    let mut cols = vec!["x", "y", "tw_open", "tw_close"];
    match problem {
        Problem::Toptw => cols.push("profit"),
        Problem::Pcvrptw => {
            cols.push("demand");
            cols.push("profit");
        }
        _ => cols.push("demand"),
    }
    cols.push("service_time");
    cols.push("is_depot");
    if problem == Problem::Pdptw {
        cols.push("is_pickup");
        cols.push("is_delivery");
    }
    cols
}

pub fn nodes_dynamic_columns(_problem: Problem) -> Vec<&'static str> {
    vec![
        "time_to_open",
        "time_to_close",
        "arrival_time",
        "time_to_open_after",
        "time_to_close_after",
        "time_to_end_tour_after",
        "frac_time_elapsed_after",
    ]
}

pub fn agent_columns(problem: Problem) -> Vec<&'static str> {
    if problem == Problem::Toptw {
        vec!["x", "y", "frac_time_elapsed", "time_to_depot"]
    } else {
        vec![
            "x",
            "y",
            "frac_time_elapsed",
            "frac_load",
            "time_to_depot",
            "frac_feasible_nodes",
            "frac_visited_nodes",
        ]
    }
}

pub fn other_agents_columns(problem: Problem) -> Vec<&'static str> {
    let mut cols = vec!["x", "y", "frac_time_elapsed"];
    if problem != Problem::Toptw {
        cols.push("frac_load");
    }
    cols.extend([
        "time_to_depot",
        "frac_feasible_nodes",
        "frac_visited_nodes",
        "distance_to_active",
        "time_diff_to_active",
        "was_last_active",
    ]);
    cols
}

pub fn global_columns(problem: Problem) -> Vec<&'static str> {
    match problem {
        Problem::Toptw => vec!["frac_profit_collected", "frac_done_agents"],
        Problem::Pcvrptw => vec![
            "frac_demand_served",
            "frac_profit_collected",
            "frac_fleet_capacity",
            "frac_done_agents",
        ],
        _ => vec![
            "frac_demand_served",
            "frac_fleet_capacity",
            "frac_done_agents",
        ],
    }
}

/// Column-addressed row-major feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    pub columns: Vec<&'static str>,
    pub rows: usize,
    pub data: Vec<f64>,
}

impl FeatureBlock {
    fn new(columns: Vec<&'static str>, rows: usize) -> Self {
        let data = vec![0.0; columns.len() * rows];
        FeatureBlock {
            columns,
            rows,
            data,
        }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.columns.len() + col]
    }

    #[inline]
    fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.columns.len() + col] = value;
    }

    /// Looks a value up by column name.
    pub fn get(&self, row: usize, column: &str) -> Option<f64> {
        let col = self.columns.iter().position(|c| *c == column)?;
        Some(self.at(row, col))
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// The five observation families plus action and agent masks, computed
/// for the active agent after the latest state change.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationBundle {
    pub nodes_static: FeatureBlock,
    pub nodes_dynamic: FeatureBlock,
    pub agent: FeatureBlock,
    pub other_agents: FeatureBlock,
    pub global: FeatureBlock,
    pub action_mask: Vec<bool>,
    pub agents_mask: Vec<bool>,
    /// Agent the bundle was computed for.
    pub agent_index: usize,
}

/// Feature selections resolved against the registry once per episode.
#[derive(Debug, Clone)]
pub struct ResolvedObsConfig {
    nodes_static: Vec<&'static str>,
    nodes_dynamic: Vec<&'static str>,
    agent: Vec<&'static str>,
    other_agents: Vec<&'static str>,
    global: Vec<&'static str>,
}

impl ResolvedObsConfig {
    pub fn resolve(problem: Problem, cfg: &ObsConfig) -> Result<Self, EnvError> {
        let pick = |family: &'static str,
                    registry: Vec<&'static str>,
                    wanted: &Option<Vec<String>>|
         -> Result<Vec<&'static str>, EnvError> {
            match wanted {
                None => Ok(registry),
                Some(names) => names
                    .iter()
                    .map(|name| {
                        registry
                            .iter()
                            .find(|c| **c == name.as_str())
                            .copied()
                            .ok_or_else(|| EnvError::UnknownFeature {
                                family,
                                name: name.clone(),
                            })
                    })
                    .collect(),
            }
        };
        Ok(ResolvedObsConfig {
            nodes_static: pick(
                "nodes_static",
                nodes_static_columns(problem),
                &cfg.nodes_static,
            )?,
            nodes_dynamic: pick(
                "nodes_dynamic",
                nodes_dynamic_columns(problem),
                &cfg.nodes_dynamic,
            )?,
            agent: pick("agent", agent_columns(problem), &cfg.agent)?,
            other_agents: pick(
                "other_agents",
                other_agents_columns(problem),
                &cfg.other_agents,
            )?,
            global: pick("global", global_columns(problem), &cfg.global)?,
        })
    }
}

fn max_profit(inst: &InstanceData) -> f64 {
    inst.profit.iter().copied().fold(0.0, f64::max).max(1.0)
}

/// Static node features; computed once per episode and cached.
pub fn nodes_static_features(inst: &InstanceData, cfg: &ResolvedObsConfig) -> FeatureBlock {
    let n = inst.num_nodes();
    let h = inst.horizon();
    let pmax = max_profit(inst);
    let mut block = FeatureBlock::new(cfg.nodes_static.clone(), n);
    for v in 0..n {
        for (c, name) in block.columns.clone().iter().enumerate() {
            let value = match *name {
                "x" => inst.coords[v][0],
                "y" => inst.coords[v][1],
                "tw_open" => inst.tw_open[v] / h,
                "tw_close" => inst.tw_close[v] / h,
                "demand" => inst.demand[v] / inst.capacity,
                "profit" => inst.profit[v] / pmax,
                "service_time" => inst.service_time[v] / h,
                "is_depot" => f64::from(u8::from(inst.is_depot[v])),
                "is_pickup" => f64::from(u8::from(inst.is_pickup(v))),
                "is_delivery" => f64::from(u8::from(inst.is_delivery(v))),
                other => unreachable!("unresolved static feature {other}"),
            };
            block.set(v, c, value);
        }
    }
    block
}

/// Inputs for the step-dependent families.
pub struct DynamicContext<'a> {
    pub inst: &'a InstanceData,
    pub agents: &'a [AgentSnapshot],
    pub nodes: &'a [NodeStatus],
    pub active: usize,
    pub last_active: Option<usize>,
    /// Feasibility mask of the active agent.
    pub action_mask: &'a [bool],
    pub profit_collected: f64,
    pub demand_delivered: f64,
}

/// Dynamic node features relative to the active agent. Signed times are
/// not clamped; negative time-to-close means the window has passed.
pub fn nodes_dynamic_features(ctx: &DynamicContext, cfg: &ResolvedObsConfig) -> FeatureBlock {
    let inst = ctx.inst;
    let h = inst.horizon();
    let agent = &ctx.agents[ctx.active];
    let home_close = inst.depot_close(agent.home);
    let n = inst.num_nodes();
    let mut block = FeatureBlock::new(cfg.nodes_dynamic.clone(), n);
    for v in 0..n {
        let arrival = agent.clock + inst.travel().get(agent.loc, v);
        let post_clock = arrival.max(inst.tw_open[v]) + inst.service_time[v];
        for (c, name) in block.columns.clone().iter().enumerate() {
            let value = match *name {
                "time_to_open" => (inst.tw_open[v] - agent.clock) / h,
                "time_to_close" => (inst.tw_close[v] - agent.clock) / h,
                "arrival_time" => arrival / h,
                "time_to_open_after" => (inst.tw_open[v] - post_clock) / h,
                "time_to_close_after" => (inst.tw_close[v] - post_clock) / h,
                "time_to_end_tour_after" => (home_close - post_clock) / h,
                "frac_time_elapsed_after" => post_clock / home_close,
                other => unreachable!("unresolved dynamic feature {other}"),
            };
            block.set(v, c, value);
        }
    }
    block
}

fn agent_row(
    ctx: &DynamicContext,
    block: &mut FeatureBlock,
    row: usize,
    agent: &AgentSnapshot,
    mask: &[bool],
) {
    let inst = ctx.inst;
    let h = inst.horizon();
    let services = inst.num_services().max(1) as f64;
    let active = &ctx.agents[ctx.active];
    for (c, name) in block.columns.clone().iter().enumerate() {
        let value = match *name {
            "x" => inst.coords[agent.loc][0],
            "y" => inst.coords[agent.loc][1],
            "frac_time_elapsed" => agent.clock / inst.depot_close(agent.home),
            "frac_load" => agent.load / inst.capacity,
            "time_to_depot" => inst.travel().get(agent.loc, agent.home) / h,
            "frac_feasible_nodes" => {
                let feasible = mask
                    .iter()
                    .enumerate()
                    .filter(|(v, ok)| **ok && inst.is_service(*v))
                    .count();
                feasible as f64 / services
            }
            "frac_visited_nodes" => agent.visited_services as f64 / services,
            "distance_to_active" => inst.travel().get(agent.loc, active.loc) / h,
            "time_diff_to_active" => (agent.clock - active.clock) / h,
            "was_last_active" => f64::from(u8::from(ctx.last_active == Some(agent.index))),
            other => unreachable!("unresolved agent feature {other}"),
        };
        block.set(row, c, value);
    }
}

/// Features of the active agent (single row).
pub fn agent_features(ctx: &DynamicContext, cfg: &ResolvedObsConfig) -> FeatureBlock {
    let mut block = FeatureBlock::new(cfg.agent.clone(), 1);
    agent_row(ctx, &mut block, 0, &ctx.agents[ctx.active], ctx.action_mask);
    block
}

/// One row per fleet agent; retired agents are zeroed and masked out.
pub fn other_agents_features(ctx: &DynamicContext, cfg: &ResolvedObsConfig) -> FeatureBlock {
    let mut block = FeatureBlock::new(cfg.other_agents.clone(), ctx.agents.len());
    for agent in ctx.agents {
        if !agent.active {
            continue; // row stays zeroed
        }
        let mask = if agent.index == ctx.active {
            ctx.action_mask.to_vec()
        } else {
            mask_feasible(ctx.inst, agent, ctx.nodes)
        };
        agent_row(ctx, &mut block, agent.index, agent, &mask);
    }
    block
}

/// Episode-level features (single row).
pub fn global_features(ctx: &DynamicContext, cfg: &ResolvedObsConfig) -> FeatureBlock {
    let inst = ctx.inst;
    let mut block = FeatureBlock::new(cfg.global.clone(), 1);
    let total_demand = inst.total_demand();
    let total_profit = inst.total_profit();
    let fleet_capacity = inst.capacity * ctx.agents.len() as f64;
    let done = ctx.agents.iter().filter(|a| !a.active).count();
    for (c, name) in block.columns.clone().iter().enumerate() {
        let value = match *name {
            "frac_demand_served" => {
                if total_demand > 0.0 {
                    ctx.demand_delivered / total_demand
                } else {
                    1.0
                }
            }
            "frac_profit_collected" => {
                if total_profit > 0.0 {
                    ctx.profit_collected / total_profit
                } else {
                    1.0
                }
            }
            "frac_fleet_capacity" => {
                ctx.agents.iter().map(|a| a.load).sum::<f64>() / fleet_capacity
            }
            "frac_done_agents" => done as f64 / ctx.agents.len() as f64,
            other => unreachable!("unresolved global feature {other}"),
        };
        block.set(0, c, value);
    }
    block
}

/// Assembles a full bundle for the active agent.
pub fn build_bundle(
    ctx: &DynamicContext,
    cfg: &ResolvedObsConfig,
    nodes_static: FeatureBlock,
) -> ObservationBundle {
    ObservationBundle {
        nodes_static,
        nodes_dynamic: nodes_dynamic_features(ctx, cfg),
        agent: agent_features(ctx, cfg),
        other_agents: other_agents_features(ctx, cfg),
        global: global_features(ctx, cfg),
        action_mask: ctx.action_mask.to_vec(),
        agents_mask: ctx.agents.iter().map(|a| a.active).collect(),
        agent_index: ctx.active,
    }
}
