//! Scripted baseline policies, the score-gap metric, and batch summaries.
//!
//! The baselines exist to exercise the environments and the evaluation
//! plumbing; they only ever emit mask-feasible actions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Env, EpisodeStats};
use crate::error::MetricError;
use crate::instance::InstanceData;
use crate::obs::ObservationBundle;
use crate::rules::arrival_and_start;

/// Available scripted baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Uniform over the action mask.
    #[default]
    Random,
    /// Nearest feasible service; depot only when no service is feasible.
    GreedyNearest,
    /// Highest profit per unit of travel + wait + service time; depot
    /// when no profitable node is feasible.
    GreedyRatio,
}

impl std::str::FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(PolicyKind::Random),
            "greedy_nearest" => Ok(PolicyKind::GreedyNearest),
            "greedy_ratio" => Ok(PolicyKind::GreedyRatio),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            PolicyKind::Random => "random",
            PolicyKind::GreedyNearest => "greedy_nearest",
            PolicyKind::GreedyRatio => "greedy_ratio",
        };
        f.write_str(name)
    }
}

/// A stateful policy instance (the random baseline carries its own RNG
/// stream so batch rollouts stay reproducible).
#[derive(Debug, Clone)]
pub struct Policy {
    kind: PolicyKind,
    rng: ChaCha8Rng,
}

impl Policy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        Policy {
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    /// Picks an action for the bundle's agent. Only mask-true nodes are
    /// ever returned.
    pub fn act(&mut self, env: &Env, bundle: &ObservationBundle) -> usize {
        let agent = &env.state().agents[bundle.agent_index];
        match self.kind {
            PolicyKind::Random => policy_random(&bundle.action_mask, &mut self.rng),
            PolicyKind::GreedyNearest => {
                policy_greedy_nearest(env.instance(), agent.loc, agent.home, &bundle.action_mask)
            }
            PolicyKind::GreedyRatio => policy_greedy_ratio(
                env.instance(),
                agent.clock,
                agent.loc,
                agent.home,
                &bundle.action_mask,
            ),
        }
    }
}

/// Uniform draw over the mask's true entries.
pub fn policy_random(mask: &[bool], rng: &mut ChaCha8Rng) -> usize {
    let feasible: Vec<usize> = mask
        .iter()
        .enumerate()
        .filter_map(|(v, ok)| ok.then_some(v))
        .collect();
    feasible[rng.random_range(0..feasible.len())]
}

/// Feasible non-depot node minimizing travel time from the agent; ties
/// break on the lowest index; the home depot when no service is feasible.
pub fn policy_greedy_nearest(inst: &InstanceData, loc: usize, home: usize, mask: &[bool]) -> usize {
    let mut best: Option<(f64, usize)> = None;
    for (v, ok) in mask.iter().enumerate() {
        if !ok || inst.is_depot[v] {
            continue;
        }
        let t = inst.travel().get(loc, v);
        if best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, v));
        }
    }
    best.map_or(home, |(_, v)| v)
}

/// Feasible node maximizing `profit / (travel + wait + service)`; nodes
/// without profit are skipped, the home depot is the fallback.
pub fn policy_greedy_ratio(
    inst: &InstanceData,
    clock: f64,
    loc: usize,
    home: usize,
    mask: &[bool],
) -> usize {
    let mut best: Option<(f64, usize)> = None;
    for (v, ok) in mask.iter().enumerate() {
        if !ok || inst.is_depot[v] || inst.profit[v] <= 0.0 {
            continue;
        }
        let (_, start) = arrival_and_start(inst, clock, loc, v);
        let cost = (start - clock) + inst.service_time[v];
        let ratio = inst.profit[v] / cost.max(f64::MIN_POSITIVE);
        if best.is_none_or(|(br, _)| ratio > br) {
            best = Some((ratio, v));
        }
    }
    best.map_or(home, |(_, v)| v)
}

/// Signed percentage gap of a score against a reference score:
/// `(model - reference) / reference * 100`. Negative means the model
/// outperforms on minimization problems; no absolute value is taken.
pub fn gap(score_model: f64, score_ref: f64) -> Result<f64, MetricError> {
    if score_ref == 0.0 {
        return Err(MetricError::ZeroReference);
    }
    Ok((score_model - score_ref) / score_ref * 100.0)
}

/// Batch-level summary of episode statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub episodes: usize,
    pub av_obj: f64,
    pub std_obj: f64,
    pub av_agents_used: f64,
    pub std_agents_used: f64,
    pub av_served_fraction: f64,
    pub std_served_fraction: f64,
    pub av_reward: f64,
    pub av_penalty: f64,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

/// Arithmetic means (and population standard deviations) over a batch.
/// `agents_used` counts agents that served at least one node.
pub fn aggregate_stats(stats: &[EpisodeStats]) -> Result<BatchSummary, MetricError> {
    if stats.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let n = stats.len();
    let (av_obj, std_obj) = mean_std(stats.iter().map(|s| s.objective), n);
    let (av_agents_used, std_agents_used) = mean_std(stats.iter().map(|s| s.agents_used as f64), n);
    let (av_served_fraction, std_served_fraction) =
        mean_std(stats.iter().map(|s| s.demand_served_fraction), n);
    Ok(BatchSummary {
        episodes: n,
        av_obj,
        std_obj,
        av_agents_used,
        std_agents_used,
        av_served_fraction,
        std_served_fraction,
        av_reward: stats.iter().map(|s| s.total_reward).sum::<f64>() / n as f64,
        av_penalty: stats.iter().map(|s| s.total_penalty).sum::<f64>() / n as f64,
    })
}
