//! Instance generation: toy fixtures, seeded random sampling, dihedral
//! augmentation, and reproducible train/validation/test splits.
//!
//! Random generation is a pure function of `(spec, seed)`: identical
//! inputs produce bit-identical instances, which is what makes instance
//! sets shareable as plain seed lists.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GenerateError, InstanceError};
use crate::instance::{build_travel_matrix, InstanceData, InstanceParts, Problem, SoftParams};

/// Dataset split with a canonical, pairwise-disjoint seed range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    /// Canonical seed range for the split. Validation sets ship as the
    /// 2048 seeds starting at 100000.
    pub fn seed_range(self) -> std::ops::Range<u64> {
        match self {
            Split::Train => 0..100_000,
            Split::Validation => 100_000..102_048,
            Split::Test => 200_000..202_048,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// The 2048 canonical validation seeds.
pub fn validation_seeds() -> Vec<u64> {
    Split::Validation.seed_range().collect()
}

/// How profits are assigned to generated services.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProfitMode {
    #[default]
    None,
    /// Uniform integers in 1..=10.
    Uniform,
    /// Profit equals the node demand.
    DemandProportional,
}

/// Sample-space definition for the random generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub problem: Problem,
    pub num_services: usize,
    pub num_agents: usize,
    /// 1 unless the problem is multi-depot.
    pub num_depots: usize,
    pub capacity: f64,
    pub horizon: f64,
    /// Min/max time-window width.
    pub tw_width: (f64, f64),
    pub service_time: f64,
    /// Inclusive integer demand range.
    pub demand_range: (u32, u32),
    pub profit_mode: ProfitMode,
    pub soft: Option<SoftParams>,
}

impl GenerationSpec {
    /// Default sample space per problem: uniform unit-square coordinates,
    /// Solomon-style windows, integer demands.
    pub fn for_problem(problem: Problem, num_services: usize) -> Self {
        let num_agents = match problem {
            Problem::Toptw | Problem::Pcvrptw => 5,
            Problem::Mdvrptw => 25,
            _ => 25,
        };
        let num_depots = if problem.multi_depot() { 5 } else { 1 };
        let capacity = if num_services >= 100 { 50.0 } else { 40.0 };
        let profit_mode = if problem.uses_profit() {
            ProfitMode::Uniform
        } else {
            ProfitMode::None
        };
        let soft = problem.soft_windows().then_some(SoftParams {
            max_violation: 0.3,
            max_wait: 0.3,
            early_rate: 1.0,
            late_rate: 1.0,
        });
        GenerationSpec {
            problem,
            num_services,
            num_agents,
            num_depots,
            capacity,
            horizon: 3.0,
            tw_width: (0.2, 0.6),
            service_time: 0.02,
            demand_range: (1, 9),
            profit_mode,
            soft,
        }
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        let fail = |msg: String| Err(GenerateError::InvalidSpec(msg));
        if self.num_services == 0 {
            return fail("num_services must be positive".into());
        }
        if self.num_agents == 0 {
            return fail("num_agents must be positive".into());
        }
        if self.problem.multi_depot() {
            if self.num_depots == 0 {
                return fail("multi-depot problems need at least one depot".into());
            }
        } else if self.num_depots != 1 {
            return fail(format!(
                "{} uses exactly one depot, got {}",
                self.problem, self.num_depots
            ));
        }
        if self.problem == Problem::Pdptw && !self.num_services.is_multiple_of(2) {
            return fail("pdptw needs an even number of services (pickup/delivery pairs)".into());
        }
        if self.capacity <= 0.0 {
            return fail("capacity must be positive".into());
        }
        if self.horizon <= 0.0 {
            return fail("horizon must be positive".into());
        }
        let (wmin, wmax) = self.tw_width;
        if !(0.0 < wmin && wmin <= wmax && wmax <= self.horizon) {
            return fail(format!("bad tw_width range ({wmin}, {wmax})"));
        }
        if self.service_time < 0.0 {
            return fail("service_time must be non-negative".into());
        }
        let (dmin, dmax) = self.demand_range;
        if dmin > dmax {
            return fail(format!("bad demand range ({dmin}, {dmax})"));
        }
        if f64::from(dmax) > self.capacity {
            return fail("maximum demand exceeds capacity".into());
        }
        if self.problem.soft_windows() && self.soft.is_none() {
            return fail("soft-window problems need soft params".into());
        }
        Ok(())
    }
}

/// A reproducible instance set: the instances are fully determined by the
/// spec and the seed list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSet {
    pub split: Split,
    pub seeds: Vec<u64>,
    pub spec: GenerationSpec,
}

impl InstanceSet {
    pub fn validate(&self) -> Result<(), GenerateError> {
        self.spec.validate()?;
        let range = self.split.seed_range();
        let mut seen = std::collections::HashSet::new();
        for s in &self.seeds {
            if !seen.insert(*s) {
                return Err(GenerateError::InvalidSpec(format!("duplicate seed {s}")));
            }
            if !range.contains(s) {
                return Err(GenerateError::InvalidSpec(format!(
                    "seed {s} outside the {} range {:?}",
                    self.split, range
                )));
            }
        }
        Ok(())
    }
}

const WINDOW_ATTEMPTS: usize = 100;

/// Fixed 7-node (8 for multi-depot) debugging fixture: depot at the unit
/// square center, six services on a hexagon of radius 0.2, alternating
/// windows, demands 1..=6, capacity 10, two agents, horizon 3.
pub fn generate_toy(problem: Problem) -> InstanceData {
    let hexagon: Vec<[f64; 2]> = (0..6)
        .map(|k| {
            let angle = k as f64 * std::f64::consts::FRAC_PI_3;
            [0.5 + 0.2 * angle.cos(), 0.5 + 0.2 * angle.sin()]
        })
        .collect();
    let horizon = 3.0;

    let (depots, homes): (Vec<[f64; 2]>, Vec<usize>) = if problem.multi_depot() {
        (vec![[0.25, 0.5], [0.75, 0.5]], vec![0, 1])
    } else {
        (vec![[0.5, 0.5]], vec![0, 0])
    };
    let nd = depots.len();
    let n = nd + 6;

    let mut coords = depots;
    coords.extend(hexagon);
    let mut is_depot = vec![false; n];
    let mut demand = vec![0.0; n];
    let mut profit = vec![0.0; n];
    let mut service_time = vec![0.0; n];
    let mut tw_open = vec![0.0; n];
    let mut tw_close = vec![horizon; n];
    let mut pickup_of = vec![None; n];

    for d in is_depot.iter_mut().take(nd) {
        *d = true;
    }
    for k in 0..6 {
        let node = nd + k;
        service_time[node] = 0.1;
        // Services alternate an early and a late window.
        if k % 2 == 0 {
            tw_open[node] = 0.3;
            tw_close[node] = 1.5;
        } else {
            tw_open[node] = 1.0;
            tw_close[node] = 2.5;
        }
        demand[node] = (k + 1) as f64;
        if problem.uses_profit() {
            profit[node] = (k + 1) as f64;
        }
    }

    match problem {
        Problem::Toptw => {
            // Orienteering nodes carry no demand.
            for d in demand.iter_mut() {
                *d = 0.0;
            }
        }
        Problem::Pdptw => {
            // Opposite hexagon vertices form pickup/delivery pairs with
            // mirrored demands.
            for k in 0..3 {
                let pickup = nd + k;
                let delivery = nd + k + 3;
                pickup_of[delivery] = Some(pickup);
                demand[pickup] = (k + 1) as f64;
                demand[delivery] = (k + 1) as f64;
            }
        }
        _ => {}
    }

    let soft = problem.soft_windows().then_some(SoftParams {
        max_violation: 0.3,
        max_wait: 0.5,
        early_rate: 1.0,
        late_rate: 2.0,
    });

    InstanceData::new(InstanceParts {
        name: format!("{problem}_toy"),
        problem,
        seed: 0,
        coords,
        is_depot,
        demand,
        profit,
        service_time,
        tw_open,
        tw_close,
        capacity: 10.0,
        agent_home_depot: homes,
        pickup_of,
        soft,
        explicit_travel: None,
    })
    .expect("toy fixture is structurally valid")
}

/// Samples a random instance. Coordinates are uniform on the unit square,
/// demands uniform integers, and every service's time window is feasible
/// by construction: the window is centered so a depot round trip fits in
/// the horizon.
pub fn generate_random(spec: &GenerationSpec, seed: u64) -> Result<InstanceData, GenerateError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nd = spec.num_depots;
    let n = nd + spec.num_services;

    let coords: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let x = rng.random_range(0.0..1.0);
            let y = rng.random_range(0.0..1.0);
            [x, y]
        })
        .collect();
    let travel = build_travel_matrix(&coords).map_err(GenerateError::Instance)?;

    let mut is_depot = vec![false; n];
    for d in is_depot.iter_mut().take(nd) {
        *d = true;
    }

    let mut demand = vec![0.0; n];
    for d in demand.iter_mut().skip(nd) {
        *d = f64::from(rng.random_range(spec.demand_range.0..=spec.demand_range.1));
    }
    if spec.problem == Problem::Toptw {
        demand.iter_mut().for_each(|d| *d = 0.0);
    }

    let mut pickup_of = vec![None; n];
    if spec.problem == Problem::Pdptw {
        let pairs = spec.num_services / 2;
        for k in 0..pairs {
            let pickup = nd + k;
            let delivery = nd + pairs + k;
            pickup_of[delivery] = Some(pickup);
            demand[delivery] = demand[pickup];
        }
    }

    let mut profit = vec![0.0; n];
    if spec.problem.uses_profit() {
        for node in nd..n {
            profit[node] = match spec.profit_mode {
                ProfitMode::None => 0.0,
                ProfitMode::Uniform => f64::from(rng.random_range(1u32..=10)),
                ProfitMode::DemandProportional => demand[node],
            };
        }
    }

    let mut service_time = vec![0.0; n];
    for st in service_time.iter_mut().skip(nd) {
        *st = spec.service_time;
    }

    let mut tw_open = vec![0.0; n];
    let mut tw_close = vec![spec.horizon; n];
    let nearest = |node: usize| -> usize {
        (0..nd)
            .min_by(|a, b| travel.get(*a, node).total_cmp(&travel.get(*b, node)))
            .unwrap()
    };

    // Pickups and plain services first; PDPTW deliveries afterwards so
    // their windows can sit after the paired pickup's.
    let delivery_start = if spec.problem == Problem::Pdptw {
        nd + spec.num_services / 2
    } else {
        n
    };
    let sample_window = |rng: &mut ChaCha8Rng, node: usize, earliest_start: f64, depot: usize| {
        let back = travel.get(node, depot);
        for _ in 0..WINDOW_ATTEMPTS {
            let w = rng.random_range(spec.tw_width.0..=spec.tw_width.1);
            let lo = earliest_start + w / 2.0;
            let hi = spec.horizon - back - spec.service_time - w / 2.0;
            if lo <= hi {
                let center = rng.random_range(lo..=hi);
                return Some((center - w / 2.0, center + w / 2.0));
            }
        }
        None
    };

    for node in nd..delivery_start {
        let depot = nearest(node);
        let (open, close) = sample_window(&mut rng, node, travel.get(depot, node), depot).ok_or(
            GenerateError::InfeasibleSpec {
                node,
                attempts: WINDOW_ATTEMPTS,
            },
        )?;
        tw_open[node] = open;
        tw_close[node] = close;
    }
    for node in delivery_start..n {
        let pickup = pickup_of[node].expect("delivery half is paired");
        let depot = nearest(node);
        // Preferred placement opens the window after the earliest
        // depot -> pickup -> delivery chain, so the pair is servable in
        // order. When the pickup landed too late for that to fit, fall
        // back to the plain per-node construction; the delivery is then
        // still depot-reachable, just not guaranteed servable after its
        // pickup.
        let chain = travel.get(depot, pickup).max(tw_open[pickup])
            + service_time[pickup]
            + travel.get(pickup, node);
        let window = sample_window(&mut rng, node, chain.max(travel.get(depot, node)), depot)
            .or_else(|| sample_window(&mut rng, node, travel.get(depot, node), depot));
        let (open, close) = window.ok_or(GenerateError::InfeasibleSpec {
            node,
            attempts: WINDOW_ATTEMPTS,
        })?;
        tw_open[node] = open;
        tw_close[node] = close;
    }

    let agent_home_depot = (0..spec.num_agents).map(|a| a % nd).collect();

    InstanceData::new(InstanceParts {
        name: format!("{}_n{}_s{}", spec.problem, spec.num_services, seed),
        problem: spec.problem,
        seed,
        coords,
        is_depot,
        demand,
        profit,
        service_time,
        tw_open,
        tw_close,
        capacity: spec.capacity,
        agent_home_depot,
        pickup_of,
        soft: spec.soft,
        explicit_travel: None,
    })
    .map_err(GenerateError::Instance)
}

/// Applies one of the eight dihedral symmetries of the unit square (ids
/// 0..=3 rotate by 0/90/180/270 degrees counterclockwise about the center,
/// ids 4..=7 additionally reflect about the horizontal axis first). All
/// non-geometric fields are unchanged; id 0 is the identity.
pub fn augment_instance(
    inst: &InstanceData,
    transform_id: u8,
) -> Result<InstanceData, InstanceError> {
    if transform_id >= 8 {
        return Err(InstanceError::InvalidTransform(transform_id));
    }
    for (i, c) in inst.coords.iter().enumerate() {
        if !(0.0..=1.0).contains(&c[0]) || !(0.0..=1.0).contains(&c[1]) {
            return Err(InstanceError::CoordsOutsideUnitSquare(i));
        }
    }
    let coords: Vec<[f64; 2]> = inst
        .coords
        .iter()
        .map(|c| apply_dihedral(transform_id, *c))
        .collect();
    InstanceData::new(InstanceParts {
        name: inst.name.clone(),
        problem: inst.problem,
        seed: inst.seed,
        coords,
        is_depot: inst.is_depot.clone(),
        demand: inst.demand.clone(),
        profit: inst.profit.clone(),
        service_time: inst.service_time.clone(),
        tw_open: inst.tw_open.clone(),
        tw_close: inst.tw_close.clone(),
        capacity: inst.capacity,
        agent_home_depot: inst.agent_home_depot.clone(),
        pickup_of: inst.pickup_of.clone(),
        soft: inst.soft,
        // Isometries preserve distances, so an explicit matrix stays valid.
        explicit_travel: inst.explicit_travel().cloned(),
    })
}

/// Exact coordinate flips/swaps about (0.5, 0.5); no trigonometry so the
/// transforms compose and invert to machine precision.
fn apply_dihedral(id: u8, [x, y]: [f64; 2]) -> [f64; 2] {
    let [x, y] = if id >= 4 { [x, 1.0 - y] } else { [x, y] };
    match id % 4 {
        0 => [x, y],
        1 => [1.0 - y, x],
        2 => [1.0 - x, 1.0 - y],
        3 => [y, 1.0 - x],
        _ => unreachable!(),
    }
}
