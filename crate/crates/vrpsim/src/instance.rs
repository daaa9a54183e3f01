//! Problem instances and the shared geometry/time kernel.
//!
//! An [`InstanceData`] is immutable once built: every other module (rules,
//! environments, generators, parsers, oracle) works on top of it. Travel
//! times equal Euclidean distances (unit speed) unless an explicit matrix
//! is supplied.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InstanceError;

/// Tolerance for time-window and load comparisons. An arrival at
/// `close + TIME_TOL` still counts as on time.
pub const TIME_TOL: f64 = 1e-9;

/// The seven supported routing problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Capacitated vehicle routing with hard time windows.
    Cvrptw,
    /// Capacitated vehicle routing with soft time windows.
    Cvrpstw,
    /// Team orienteering with time windows.
    Toptw,
    /// Pickup and delivery with time windows.
    Pdptw,
    /// Split-delivery vehicle routing with time windows.
    Sdvrptw,
    /// Prize-collecting vehicle routing with time windows.
    Pcvrptw,
    /// Multi-depot vehicle routing with time windows.
    Mdvrptw,
}

impl Problem {
    pub const ALL: [Problem; 7] = [
        Problem::Cvrptw,
        Problem::Cvrpstw,
        Problem::Toptw,
        Problem::Pdptw,
        Problem::Sdvrptw,
        Problem::Pcvrptw,
        Problem::Mdvrptw,
    ];

    /// Nodes carry profits that are collected on visit.
    pub fn uses_profit(self) -> bool {
        matches!(self, Problem::Toptw | Problem::Pcvrptw)
    }

    /// Demand may be split across several visits.
    pub fn split_delivery(self) -> bool {
        matches!(self, Problem::Sdvrptw)
    }

    /// Time windows are soft (violations allowed at a penalty).
    pub fn soft_windows(self) -> bool {
        matches!(self, Problem::Cvrpstw)
    }

    pub fn multi_depot(self) -> bool {
        matches!(self, Problem::Mdvrptw)
    }

    /// Unserved services are charged a terminal penalty. Profit problems
    /// do not require visiting all nodes.
    pub fn penalizes_unserved(self) -> bool {
        !self.uses_profit()
    }

    /// Higher episode objectives are better (profit problems); for the
    /// rest the objective is a distance to minimize.
    pub fn maximizes(self) -> bool {
        self.uses_profit()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Cvrptw => "cvrptw",
            Problem::Cvrpstw => "cvrpstw",
            Problem::Toptw => "toptw",
            Problem::Pdptw => "pdptw",
            Problem::Sdvrptw => "sdvrptw",
            Problem::Pcvrptw => "pcvrptw",
            Problem::Mdvrptw => "mdvrptw",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Problem::ALL
            .into_iter()
            .find(|p| p.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown problem `{s}`"))
    }
}

/// Soft time-window parameters (CVRPSTW).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftParams {
    /// Maximum window violation on either side; the enlarged window is
    /// `[open - max_violation, close + max_violation]`.
    pub max_violation: f64,
    /// Maximum waiting time at a customer: arrivals before
    /// `open - max_violation - max_wait` are infeasible.
    pub max_wait: f64,
    /// Linear penalty rate for serving before `open`.
    pub early_rate: f64,
    /// Linear penalty rate for serving after `close`.
    pub late_rate: f64,
}

/// Dense symmetric matrix of travel times.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        let n = rows.len();
        let mut m = SquareMatrix::zeros(n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(InstanceError::TravelShape {
                    found: row.len(),
                    expected: n,
                });
            }
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Builds the symmetric Euclidean travel-time matrix over a set of points.
///
/// Travel time equals distance (unit speed). The diagonal is zero and the
/// triangle inequality holds up to floating-point rounding.
pub fn build_travel_matrix(coords: &[[f64; 2]]) -> Result<SquareMatrix, InstanceError> {
    let n = coords.len();
    for (i, c) in coords.iter().enumerate() {
        if !c[0].is_finite() || !c[1].is_finite() {
            return Err(InstanceError::NonFiniteCoordinate(i));
        }
    }
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let d = (dx * dx + dy * dy).sqrt();
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    Ok(m)
}

/// Everything needed to build an [`InstanceData`]. Kept separate so the
/// constructor can derive the travel matrix and enforce shape checks.
#[derive(Debug, Clone)]
pub struct InstanceParts {
    pub name: String,
    pub problem: Problem,
    pub seed: u64,
    pub coords: Vec<[f64; 2]>,
    pub is_depot: Vec<bool>,
    pub demand: Vec<f64>,
    pub profit: Vec<f64>,
    pub service_time: Vec<f64>,
    pub tw_open: Vec<f64>,
    pub tw_close: Vec<f64>,
    pub capacity: f64,
    pub agent_home_depot: Vec<usize>,
    /// For PDPTW delivery nodes, the index of the paired pickup.
    pub pickup_of: Vec<Option<usize>>,
    pub soft: Option<SoftParams>,
    /// Explicit travel times; when absent the matrix is derived from the
    /// coordinates.
    pub explicit_travel: Option<SquareMatrix>,
}

/// An immutable problem instance.
///
/// Depot time windows live in `tw_open`/`tw_close` at the depot rows; use
/// [`InstanceData::depot_open`] / [`InstanceData::depot_close`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceData {
    pub name: String,
    pub problem: Problem,
    pub seed: u64,
    pub coords: Vec<[f64; 2]>,
    pub is_depot: Vec<bool>,
    pub demand: Vec<f64>,
    pub profit: Vec<f64>,
    pub service_time: Vec<f64>,
    pub tw_open: Vec<f64>,
    pub tw_close: Vec<f64>,
    pub capacity: f64,
    pub agent_home_depot: Vec<usize>,
    pub pickup_of: Vec<Option<usize>>,
    pub soft: Option<SoftParams>,
    travel: SquareMatrix,
    travel_is_explicit: bool,
}

impl InstanceData {
    pub fn new(parts: InstanceParts) -> Result<Self, InstanceError> {
        let n = parts.coords.len();
        let check = |len: usize, field: &str| {
            if len != n {
                Err(InstanceError::FieldLength(format!(
                    "{field} has {len} entries for {n} nodes"
                )))
            } else {
                Ok(())
            }
        };
        check(parts.is_depot.len(), "is_depot")?;
        check(parts.demand.len(), "demand")?;
        check(parts.profit.len(), "profit")?;
        check(parts.service_time.len(), "service_time")?;
        check(parts.tw_open.len(), "tw_open")?;
        check(parts.tw_close.len(), "tw_close")?;
        check(parts.pickup_of.len(), "pickup_of")?;
        for (i, c) in parts.coords.iter().enumerate() {
            if !c[0].is_finite() || !c[1].is_finite() {
                return Err(InstanceError::NonFiniteCoordinate(i));
            }
        }
        let (travel, travel_is_explicit) = match parts.explicit_travel {
            Some(m) => {
                if m.size() != n {
                    return Err(InstanceError::TravelShape {
                        found: m.size(),
                        expected: n,
                    });
                }
                (m, true)
            }
            None => (build_travel_matrix(&parts.coords)?, false),
        };
        Ok(InstanceData {
            name: parts.name,
            problem: parts.problem,
            seed: parts.seed,
            coords: parts.coords,
            is_depot: parts.is_depot,
            demand: parts.demand,
            profit: parts.profit,
            service_time: parts.service_time,
            tw_open: parts.tw_open,
            tw_close: parts.tw_close,
            capacity: parts.capacity,
            agent_home_depot: parts.agent_home_depot,
            pickup_of: parts.pickup_of,
            soft: parts.soft,
            travel,
            travel_is_explicit,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agent_home_depot.len()
    }

    pub fn num_depots(&self) -> usize {
        self.is_depot.iter().filter(|d| **d).count()
    }

    pub fn num_services(&self) -> usize {
        self.num_nodes() - self.num_depots()
    }

    pub fn is_service(&self, node: usize) -> bool {
        !self.is_depot[node]
    }

    pub fn depot_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(|i| self.is_depot[*i])
    }

    pub fn service_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_nodes()).filter(|i| !self.is_depot[*i])
    }

    pub fn travel(&self) -> &SquareMatrix {
        &self.travel
    }

    pub fn travel_is_explicit(&self) -> bool {
        self.travel_is_explicit
    }

    pub fn explicit_travel(&self) -> Option<&SquareMatrix> {
        self.travel_is_explicit.then_some(&self.travel)
    }

    pub fn depot_open(&self, depot: usize) -> f64 {
        self.tw_open[depot]
    }

    pub fn depot_close(&self, depot: usize) -> f64 {
        self.tw_close[depot]
    }

    /// Latest depot closing time; the normalization horizon for times.
    pub fn horizon(&self) -> f64 {
        self.depot_nodes()
            .map(|d| self.tw_close[d])
            .fold(0.0, f64::max)
    }

    pub fn home_of(&self, agent: usize) -> usize {
        self.agent_home_depot[agent]
    }

    /// Depot nearest to `node` by travel time.
    pub fn nearest_depot(&self, node: usize) -> usize {
        self.depot_nodes()
            .min_by(|a, b| {
                self.travel
                    .get(*a, node)
                    .total_cmp(&self.travel.get(*b, node))
            })
            .expect("instance has at least one depot")
    }

    pub fn total_demand(&self) -> f64 {
        self.service_nodes().map(|i| self.demand[i]).sum()
    }

    pub fn total_profit(&self) -> f64 {
        self.service_nodes().map(|i| self.profit[i]).sum()
    }

    /// Whether `node` is a PDPTW pickup (some delivery points at it).
    pub fn is_pickup(&self, node: usize) -> bool {
        self.pickup_of.contains(&Some(node))
    }

    /// Whether `node` is a PDPTW delivery.
    pub fn is_delivery(&self, node: usize) -> bool {
        self.pickup_of[node].is_some()
    }

    /// Decomposes the instance for rebuilding with modified fields; the
    /// travel matrix is re-derived unless it was explicit.
    pub fn to_parts(&self) -> InstanceParts {
        InstanceParts {
            name: self.name.clone(),
            problem: self.problem,
            seed: self.seed,
            coords: self.coords.clone(),
            is_depot: self.is_depot.clone(),
            demand: self.demand.clone(),
            profit: self.profit.clone(),
            service_time: self.service_time.clone(),
            tw_open: self.tw_open.clone(),
            tw_close: self.tw_close.clone(),
            capacity: self.capacity,
            agent_home_depot: self.agent_home_depot.clone(),
            pickup_of: self.pickup_of.clone(),
            soft: self.soft,
            explicit_travel: self.explicit_travel().cloned(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.coords
            .iter()
            .all(|c| c[0].is_finite() && c[1].is_finite())
            && self.demand.iter().all(|v| v.is_finite())
            && self.profit.iter().all(|v| v.is_finite())
            && self.service_time.iter().all(|v| v.is_finite())
            && self.tw_open.iter().all(|v| v.is_finite())
            && self.tw_close.iter().all(|v| v.is_finite())
            && self.capacity.is_finite()
    }
}

/// Machine-readable validation failure codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationCode {
    WindowInverted,
    DemandNegative,
    DemandExceedsCapacity,
    DepotDemandNonzero,
    DepotServiceNonzero,
    ProfitNegative,
    ServiceTimeNegative,
    CapacityNonpositive,
    BadDepotCount,
    BadHomeDepot,
    NoAgents,
    UnpairedDelivery,
    BadPairTarget,
    PairDemandMismatch,
    TravelAsymmetric,
    TravelDiagonalNonzero,
    UnreachableNode,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// Node or agent index, where applicable.
    pub index: Option<usize>,
    pub message: String,
}

/// Outcome of [`validate_instance`]: `ok()` iff no violations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, code: ViolationCode, index: Option<usize>, message: String) {
        self.violations.push(Violation {
            code,
            index,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            match v.index {
                Some(i) => writeln!(f, "{:?} at {}: {}", v.code, i, v.message)?,
                None => writeln!(f, "{:?}: {}", v.code, v.message)?,
            }
        }
        Ok(())
    }
}

/// Checks every structural invariant of an instance plus reachability:
/// each service with positive demand or profit must be servable by a
/// round trip from some depot within that depot's window.
///
/// Violations are data, not faults: the report lists all of them.
pub fn validate_instance(inst: &InstanceData) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = inst.num_nodes();

    if !inst.all_finite() {
        report.push(
            ViolationCode::NonFinite,
            None,
            "instance contains non-finite values".into(),
        );
        return report;
    }

    let depots = inst.num_depots();
    if inst.problem.multi_depot() {
        if depots == 0 {
            report.push(ViolationCode::BadDepotCount, None, "no depot nodes".into());
        }
    } else if depots != 1 {
        report.push(
            ViolationCode::BadDepotCount,
            None,
            format!("expected exactly one depot, found {depots}"),
        );
    }

    if inst.num_agents() == 0 {
        report.push(ViolationCode::NoAgents, None, "fleet is empty".into());
    }
    for (a, home) in inst.agent_home_depot.iter().enumerate() {
        if *home >= n || !inst.is_depot[*home] {
            report.push(
                ViolationCode::BadHomeDepot,
                Some(a),
                format!("agent {a} home {home} is not a depot node"),
            );
        }
    }

    if inst.capacity <= 0.0 {
        report.push(
            ViolationCode::CapacityNonpositive,
            None,
            format!("capacity {} must be positive", inst.capacity),
        );
    }

    for i in 0..n {
        if inst.tw_open[i] > inst.tw_close[i] {
            report.push(
                ViolationCode::WindowInverted,
                Some(i),
                format!("window [{}, {}]", inst.tw_open[i], inst.tw_close[i]),
            );
        }
        if inst.demand[i] < 0.0 {
            report.push(
                ViolationCode::DemandNegative,
                Some(i),
                format!("demand {}", inst.demand[i]),
            );
        }
        if inst.profit[i] < 0.0 {
            report.push(
                ViolationCode::ProfitNegative,
                Some(i),
                format!("profit {}", inst.profit[i]),
            );
        }
        if inst.service_time[i] < 0.0 {
            report.push(
                ViolationCode::ServiceTimeNegative,
                Some(i),
                format!("service time {}", inst.service_time[i]),
            );
        }
        if inst.is_depot[i] {
            if inst.demand[i] != 0.0 {
                report.push(
                    ViolationCode::DepotDemandNonzero,
                    Some(i),
                    format!("depot demand {}", inst.demand[i]),
                );
            }
            if inst.service_time[i] != 0.0 {
                report.push(
                    ViolationCode::DepotServiceNonzero,
                    Some(i),
                    format!("depot service time {}", inst.service_time[i]),
                );
            }
        } else if inst.demand[i] > inst.capacity + TIME_TOL {
            report.push(
                ViolationCode::DemandExceedsCapacity,
                Some(i),
                format!(
                    "demand {} exceeds capacity {}",
                    inst.demand[i], inst.capacity
                ),
            );
        }
    }

    if inst.travel_is_explicit() {
        let t = inst.travel();
        for i in 0..n {
            if t.get(i, i) != 0.0 {
                report.push(
                    ViolationCode::TravelDiagonalNonzero,
                    Some(i),
                    format!("T[{i}][{i}] = {}", t.get(i, i)),
                );
            }
            for j in (i + 1)..n {
                if (t.get(i, j) - t.get(j, i)).abs() > TIME_TOL {
                    report.push(
                        ViolationCode::TravelAsymmetric,
                        Some(i),
                        format!(
                            "T[{i}][{j}] = {} but T[{j}][{i}] = {}",
                            t.get(i, j),
                            t.get(j, i)
                        ),
                    );
                }
            }
        }
    }

    if inst.problem == Problem::Pdptw {
        validate_pairing(inst, &mut report);
    }

    // Reachability: a service that matters must admit a depot round trip.
    for i in inst.service_nodes() {
        if inst.demand[i] <= 0.0 && inst.profit[i] <= 0.0 {
            continue;
        }
        let reachable = inst.depot_nodes().any(|d| {
            let t = inst.travel().get(d, i);
            let start = (inst.depot_open(d) + t).max(inst.tw_open[i]);
            start + inst.service_time[i] + inst.travel().get(i, d) <= inst.depot_close(d) + TIME_TOL
                && start <= inst.tw_close[i] + soft_slack(inst) + TIME_TOL
        });
        if !reachable {
            report.push(
                ViolationCode::UnreachableNode,
                Some(i),
                "no depot round trip fits within the depot window".into(),
            );
        }
    }

    report
}

fn soft_slack(inst: &InstanceData) -> f64 {
    if inst.problem.soft_windows() {
        inst.soft.map(|s| s.max_violation).unwrap_or(0.0)
    } else {
        0.0
    }
}

fn validate_pairing(inst: &InstanceData, report: &mut ValidationReport) {
    let n = inst.num_nodes();
    let mut referenced = vec![0usize; n];
    let mut deliveries = 0usize;
    for i in 0..n {
        if let Some(p) = inst.pickup_of[i] {
            deliveries += 1;
            if inst.is_depot[i] {
                report.push(
                    ViolationCode::BadPairTarget,
                    Some(i),
                    "depot marked as delivery".into(),
                );
                continue;
            }
            if p >= n || inst.is_depot[p] || inst.pickup_of[p].is_some() {
                report.push(
                    ViolationCode::BadPairTarget,
                    Some(i),
                    format!("delivery {i} pairs invalid pickup {p}"),
                );
                continue;
            }
            referenced[p] += 1;
            if (inst.demand[i] - inst.demand[p]).abs() > TIME_TOL {
                report.push(
                    ViolationCode::PairDemandMismatch,
                    Some(i),
                    format!(
                        "delivery demand {} != pickup demand {}",
                        inst.demand[i], inst.demand[p]
                    ),
                );
            }
        }
    }
    let pickups = inst
        .service_nodes()
        .filter(|i| inst.pickup_of[*i].is_none())
        .count();
    if pickups != deliveries {
        report.push(
            ViolationCode::UnpairedDelivery,
            None,
            format!("{pickups} pickups vs {deliveries} deliveries"),
        );
    }
    for i in inst.service_nodes() {
        if inst.pickup_of[i].is_none() && referenced[i] != 1 {
            report.push(
                ViolationCode::UnpairedDelivery,
                Some(i),
                format!("pickup {i} referenced by {} deliveries", referenced[i]),
            );
        }
    }
}
