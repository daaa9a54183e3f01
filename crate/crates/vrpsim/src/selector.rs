//! Next-agent selection strategies.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rules::AgentSnapshot;

/// The available selection strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    /// Keeps the current agent until it retires, then moves to the next
    /// active agent in circular order; mimics a single-agent environment.
    #[default]
    RoundRobin,
    /// Picks the active agent with the smallest accumulated time,
    /// simulating agents that must act in real time. Ties break on the
    /// lowest index.
    SmallestTime,
    /// Uniform draw over active agents from the episode RNG stream.
    Random,
}

impl SelectorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectorKind::RoundRobin => "round_robin",
            SelectorKind::SmallestTime => "smallest_time",
            SelectorKind::Random => "random",
        }
    }
}

impl std::fmt::Display for SelectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SelectorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "round_robin" => Ok(SelectorKind::RoundRobin),
            "smallest_time" => Ok(SelectorKind::SmallestTime),
            "random" => Ok(SelectorKind::Random),
            other => Err(format!("unknown selector `{other}`")),
        }
    }
}

/// Chooses the next active agent, or `None` when every agent is retired.
/// `current` is the agent that just acted (`None` at reset).
pub fn next_agent(
    kind: SelectorKind,
    agents: &[AgentSnapshot],
    current: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> Option<usize> {
    if agents.iter().all(|a| !a.active) {
        return None;
    }
    match kind {
        SelectorKind::RoundRobin => {
            let start = match current {
                Some(c) if agents[c].active => return Some(c),
                Some(c) => c + 1,
                None => 0,
            };
            let n = agents.len();
            (0..n).map(|k| (start + k) % n).find(|i| agents[*i].active)
        }
        SelectorKind::SmallestTime => agents
            .iter()
            .filter(|a| a.active)
            .min_by(|a, b| a.clock.total_cmp(&b.clock).then(a.index.cmp(&b.index)))
            .map(|a| a.index),
        SelectorKind::Random => {
            let active: Vec<usize> = agents
                .iter()
                .filter(|a| a.active)
                .map(|a| a.index)
                .collect();
            Some(active[rng.random_range(0..active.len())])
        }
    }
}
