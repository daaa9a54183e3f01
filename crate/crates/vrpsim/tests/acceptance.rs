//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured margins. Criteria 2, 3 and 5 share a single audited
//! corpus of 14,000 random-policy episodes (1,000 per problem and
//! selector at 50 services).

use std::sync::OnceLock;

use rayon::prelude::*;

use vrpsim::benchmark::{parse_benchmark, BenchmarkFormat};
use vrpsim::codec::{decode_instance, encode_instance};
use vrpsim::env::run_episode;
use vrpsim::generate::{augment_instance, generate_random, GenerationSpec, ProfitMode};
use vrpsim::instance::TIME_TOL;
use vrpsim::solution::evaluate_solution;
use vrpsim::{
    brute_force_optimum, gap, Env, EnvConfig, EpisodeStats, OracleLimits, ParseError, Policy,
    PolicyKind, Problem, RewardMode, RuleConfig, SelectorKind,
};

const ALL_PROBLEMS: [Problem; 7] = Problem::ALL;
const SELECTORS: [SelectorKind; 2] = [SelectorKind::RoundRobin, SelectorKind::SmallestTime];
const EPISODES_PER_PAIR: usize = 1_000;

// ───────────────────────────────────────────────────────────────────
// Criterion 1: gap arithmetic regression over a published benchmark
// table (32 method rows; reference rows excluded).
// ───────────────────────────────────────────────────────────────────

/// (problem, services, method, selection, model objective, reference
/// objective, printed gap in percent).
const GAP_TABLE: [(&str, u32, &str, &str, f64, f64, f64); 32] = [
    (
        "cvrptw",
        50,
        "baseline_a",
        "single_agent",
        16.499,
        14.478,
        14.0,
    ),
    (
        "cvrptw",
        100,
        "baseline_a",
        "single_agent",
        29.828,
        24.493,
        21.8,
    ),
    (
        "cvrptw",
        50,
        "baseline_b",
        "single_agent",
        16.020,
        14.478,
        10.7,
    ),
    (
        "cvrptw",
        100,
        "baseline_b",
        "single_agent",
        27.413,
        24.493,
        11.9,
    ),
    (
        "cvrptw",
        50,
        "baseline_a",
        "smallest_time",
        18.787,
        14.478,
        29.8,
    ),
    (
        "cvrptw",
        100,
        "baseline_a",
        "smallest_time",
        36.993,
        24.493,
        51.0,
    ),
    (
        "cvrptw",
        50,
        "baseline_b",
        "smallest_time",
        18.450,
        14.478,
        27.4,
    ),
    (
        "cvrptw",
        100,
        "baseline_b",
        "smallest_time",
        31.827,
        24.493,
        29.9,
    ),
    (
        "toptw",
        50,
        "baseline_a",
        "single_agent",
        31.870,
        33.245,
        -4.1,
    ),
    (
        "toptw",
        100,
        "baseline_a",
        "single_agent",
        39.251,
        39.984,
        -1.8,
    ),
    (
        "toptw",
        50,
        "baseline_b",
        "single_agent",
        32.159,
        33.245,
        -3.3,
    ),
    (
        "toptw",
        100,
        "baseline_b",
        "single_agent",
        39.710,
        39.984,
        -0.7,
    ),
    (
        "toptw",
        50,
        "baseline_a",
        "smallest_time",
        31.833,
        33.245,
        -4.2,
    ),
    (
        "toptw",
        100,
        "baseline_a",
        "smallest_time",
        39.026,
        39.984,
        -2.4,
    ),
    (
        "toptw",
        50,
        "baseline_b",
        "smallest_time",
        31.927,
        33.245,
        -4.0,
    ),
    (
        "toptw",
        100,
        "baseline_b",
        "smallest_time",
        39.407,
        39.984,
        -1.4,
    ),
    (
        "pcvrptw",
        50,
        "baseline_a",
        "single_agent",
        24.226,
        26.653,
        -9.1,
    ),
    (
        "pcvrptw",
        100,
        "baseline_a",
        "single_agent",
        32.325,
        35.534,
        -9.0,
    ),
    (
        "pcvrptw",
        50,
        "baseline_b",
        "single_agent",
        24.618,
        26.653,
        -7.6,
    ),
    (
        "pcvrptw",
        100,
        "baseline_b",
        "single_agent",
        32.907,
        35.534,
        -7.4,
    ),
    (
        "pcvrptw",
        50,
        "baseline_a",
        "smallest_time",
        23.593,
        26.653,
        -11.5,
    ),
    (
        "pcvrptw",
        100,
        "baseline_a",
        "smallest_time",
        31.309,
        35.534,
        -11.9,
    ),
    (
        "pcvrptw",
        50,
        "baseline_b",
        "smallest_time",
        24.388,
        26.653,
        -8.5,
    ),
    (
        "pcvrptw",
        100,
        "baseline_b",
        "smallest_time",
        32.706,
        35.534,
        -8.0,
    ),
    (
        "mdvrptw",
        50,
        "baseline_a",
        "single_agent",
        14.534,
        8.928,
        62.8,
    ),
    (
        "mdvrptw",
        100,
        "baseline_a",
        "single_agent",
        34.869,
        15.224,
        129.0,
    ),
    (
        "mdvrptw",
        50,
        "baseline_b",
        "single_agent",
        10.312,
        8.928,
        15.5,
    ),
    (
        "mdvrptw",
        100,
        "baseline_b",
        "single_agent",
        17.530,
        15.224,
        15.1,
    ),
    (
        "mdvrptw",
        50,
        "baseline_a",
        "smallest_time",
        16.196,
        8.928,
        81.4,
    ),
    (
        "mdvrptw",
        100,
        "baseline_a",
        "smallest_time",
        26.824,
        15.224,
        76.2,
    ),
    (
        "mdvrptw",
        50,
        "baseline_b",
        "smallest_time",
        11.538,
        8.928,
        29.2,
    ),
    (
        "mdvrptw",
        100,
        "baseline_b",
        "smallest_time",
        19.720,
        15.224,
        29.5,
    ),
];

#[test]
fn acceptance_1_gap_arithmetic() {
    let mut worst = 0.0f64;
    for (problem, size, method, selection, model, reference, printed) in GAP_TABLE {
        let computed = gap(model, reference).unwrap();
        let err = (computed - printed).abs();
        assert!(
            err <= 0.05,
            "{problem}-{size} {method}/{selection}: gap({model}, {reference}) = {computed:.3}, \
             published {printed} (off by {err:.3}pp)"
        );
        worst = worst.max(err);
    }
    println!("ACCEPTANCE 1 (gap arithmetic): PASS - 32/32 rows within 0.05pp (worst {worst:.3}pp)");
}

// ───────────────────────────────────────────────────────────────────
// Shared audited corpus for criteria 2, 3 and 5.
// ───────────────────────────────────────────────────────────────────

#[derive(Debug, Default)]
struct PairAudit {
    episodes: usize,
    steps: usize,
    hard_violations: Vec<String>,
    /// max |sum of dense stream + terminal - sparse total| per episode
    max_dense_sparse_err: f64,
    /// max |episode totals - evaluate_solution on extracted routes|
    max_eval_err: f64,
    round_robin_coactive: usize,
    smallest_time_violations: usize,
}

fn audit_pair(problem: Problem, selector: SelectorKind) -> PairAudit {
    let mut audit = PairAudit::default();
    let spec = GenerationSpec::for_problem(problem, 50);
    let rules = RuleConfig::default();
    let selector_tag = match selector {
        SelectorKind::RoundRobin => 0u64,
        SelectorKind::SmallestTime => 1,
        SelectorKind::Random => 2,
    };

    for episode in 0..EPISODES_PER_PAIR {
        let seed = selector_tag * 50_000 + episode as u64;
        let inst = generate_random(&spec, seed).expect("spec is feasible");
        let config = EnvConfig {
            selector,
            reward_mode: RewardMode::Dense,
            ..EnvConfig::default()
        };
        let (mut env, mut bundle) =
            Env::reset(&inst, config.clone(), seed).expect("valid instance");
        let mut stream_total = 0.0f64;
        let deep_checks = episode < 3;

        let stats: EpisodeStats = loop {
            // Selector contracts, checked against the pre-step state.
            let active = env.state().active_agent;
            if selector == SelectorKind::SmallestTime {
                let clock = env.state().agents[active].clock;
                let min_clock = env
                    .state()
                    .agents
                    .iter()
                    .filter(|a| a.active)
                    .map(|a| a.clock)
                    .fold(f64::INFINITY, f64::min);
                if clock > min_clock + TIME_TOL {
                    audit.smallest_time_violations += 1;
                }
            }
            if deep_checks {
                for block in [
                    &bundle.nodes_static,
                    &bundle.nodes_dynamic,
                    &bundle.agent,
                    &bundle.other_agents,
                    &bundle.global,
                ] {
                    assert!(block.all_finite(), "non-finite observation");
                }
            }

            let action = env.sample_action().unwrap();
            let (next_bundle, outcome) = env.step(action).unwrap();
            audit.steps += 1;
            stream_total += outcome.reward + outcome.penalty;
            if outcome.penalty > 0.0 {
                audit.hard_violations.push(format!(
                    "{problem}/{selector} seed {seed}: positive penalty"
                ));
            }
            if problem == Problem::Toptw && outcome.reward < 0.0 {
                audit.hard_violations.push(format!(
                    "{problem}/{selector} seed {seed}: negative profit reward"
                ));
            }

            // Hard-constraint audit on the visit just executed.
            let visit = *env.state().traces[active].last().unwrap();
            if inst.is_service(visit.node) {
                let (lo, hi) = if problem.soft_windows() {
                    let s = inst.soft.unwrap();
                    (
                        inst.tw_open[visit.node] - s.max_violation,
                        inst.tw_close[visit.node] + s.max_violation,
                    )
                } else {
                    (inst.tw_open[visit.node], inst.tw_close[visit.node])
                };
                if visit.service_start < lo - TIME_TOL || visit.service_start > hi + TIME_TOL {
                    audit.hard_violations.push(format!(
                        "{problem}/{selector} seed {seed}: service at {} outside [{lo}, {hi}]",
                        visit.service_start
                    ));
                }
            }
            for agent in &env.state().agents {
                if agent.load < -TIME_TOL || agent.load > inst.capacity + TIME_TOL {
                    audit.hard_violations.push(format!(
                        "{problem}/{selector} seed {seed}: load {} outside [0, {}]",
                        agent.load, inst.capacity
                    ));
                }
            }
            if selector == SelectorKind::RoundRobin {
                let away = env
                    .state()
                    .agents
                    .iter()
                    .filter(|a| a.loc != a.home)
                    .count();
                if away > 1 {
                    audit.round_robin_coactive += 1;
                }
            }

            if outcome.done {
                break outcome.stats.unwrap();
            }
            bundle = next_bundle;
        };

        // Single service per node (non-split), same-vehicle precedence
        // (PDPTW), home-depot returns (all problems).
        let mut visits_per_node = vec![0usize; inst.num_nodes()];
        for route in &stats.routes {
            for visit in route.visits.iter().filter(|v| inst.is_service(v.node)) {
                visits_per_node[visit.node] += 1;
            }
        }
        if !problem.split_delivery() {
            for v in inst.service_nodes() {
                if visits_per_node[v] > 1 {
                    audit.hard_violations.push(format!(
                        "{problem}/{selector} seed {seed}: node {v} served {} times",
                        visits_per_node[v]
                    ));
                }
            }
        } else {
            for v in inst.service_nodes() {
                let delivered: f64 = stats
                    .routes
                    .iter()
                    .flat_map(|r| &r.visits)
                    .filter(|visit| visit.node == v)
                    .map(|visit| visit.quantity)
                    .sum();
                if delivered > inst.demand[v] + 1e-6 {
                    audit.hard_violations.push(format!(
                        "{problem}/{selector} seed {seed}: node {v} got {delivered} of {}",
                        inst.demand[v]
                    ));
                }
            }
        }
        if problem == Problem::Pdptw {
            for v in inst.service_nodes() {
                let Some(pickup) = inst.pickup_of[v] else {
                    continue;
                };
                if visits_per_node[v] == 0 {
                    continue;
                }
                let same_vehicle_in_order = stats.routes.iter().any(|route| {
                    let p = route.visits.iter().position(|visit| visit.node == pickup);
                    let d = route.visits.iter().position(|visit| visit.node == v);
                    matches!((p, d), (Some(p), Some(d)) if p < d)
                });
                if !same_vehicle_in_order {
                    audit.hard_violations.push(format!(
                        "{problem}/{selector} seed {seed}: delivery {v} without its pickup"
                    ));
                }
            }
        }
        for agent in &env.state().agents {
            if agent.loc != agent.home {
                audit.hard_violations.push(format!(
                    "{problem}/{selector} seed {seed}: agent {} ended at {} not home {}",
                    agent.index, agent.loc, agent.home
                ));
            }
        }

        // Liveness: every step serves a node or retires an agent, so the
        // episode length is bounded.
        let bound = if problem.split_delivery() {
            inst.num_agents() * (inst.num_nodes() + 2)
        } else {
            inst.num_services() + inst.num_agents()
        };
        if stats.steps > bound {
            audit.hard_violations.push(format!(
                "{problem}/{selector} seed {seed}: {} steps exceeds the {bound} bound",
                stats.steps
            ));
        }

        // Criterion 3: the dense stream (terminal included on the final
        // step) must equal the sparse total.
        let err = (stream_total - stats.total()).abs();
        audit.max_dense_sparse_err = audit.max_dense_sparse_err.max(err);

        // Offline replay of the extracted routes agrees with the episode.
        let eval = evaluate_solution(&inst, &stats.routes, &rules).unwrap();
        if !eval.feasible {
            audit.hard_violations.push(format!(
                "{problem}/{selector} seed {seed}: {:?}",
                eval.violations
            ));
        }
        let eval_err = (eval.reward - stats.total_reward)
            .abs()
            .max((eval.penalty - stats.total_penalty).abs());
        audit.max_eval_err = audit.max_eval_err.max(eval_err);

        // On a subsample, a sparse-mode rerun of the same seed must pay
        // out the identical total on its final step.
        if deep_checks {
            let sparse_cfg = EnvConfig {
                reward_mode: RewardMode::Sparse,
                ..config
            };
            let (mut env2, _) = Env::reset(&inst, sparse_cfg, seed).unwrap();
            let mut sparse_total = 0.0;
            loop {
                let a = env2.sample_action().unwrap();
                let (_, out) = env2.step(a).unwrap();
                sparse_total += out.reward + out.penalty;
                if out.done {
                    break;
                }
            }
            assert!(
                (sparse_total - stats.total()).abs() <= 1e-9,
                "sparse rerun diverged: {sparse_total} vs {}",
                stats.total()
            );
        }

        audit.episodes += 1;
    }
    audit
}

fn audits() -> &'static Vec<PairAudit> {
    static AUDITS: OnceLock<Vec<PairAudit>> = OnceLock::new();
    AUDITS.get_or_init(|| {
        let pairs: Vec<(Problem, SelectorKind)> = ALL_PROBLEMS
            .into_iter()
            .flat_map(|p| SELECTORS.into_iter().map(move |s| (p, s)))
            .collect();
        pairs
            .into_par_iter()
            .map(|(p, s)| audit_pair(p, s))
            .collect()
    })
}

#[test]
fn acceptance_2_feasibility_fuzz() {
    let audits = audits();
    let episodes: usize = audits.iter().map(|a| a.episodes).sum();
    let steps: usize = audits.iter().map(|a| a.steps).sum();
    let violations: Vec<&String> = audits.iter().flat_map(|a| &a.hard_violations).collect();
    assert_eq!(
        episodes,
        ALL_PROBLEMS.len() * SELECTORS.len() * EPISODES_PER_PAIR
    );
    assert!(
        violations.is_empty(),
        "hard-constraint violations: {:?}",
        &violations[..violations.len().min(10)]
    );
    println!(
        "ACCEPTANCE 2 (feasibility fuzz): PASS - {episodes} episodes / {steps} steps across \
         7 problems x 2 selectors with zero hard-constraint violations"
    );
}

#[test]
fn acceptance_3_dense_sparse_equality() {
    let audits = audits();
    let worst = audits
        .iter()
        .map(|a| a.max_dense_sparse_err)
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "dense/sparse mismatch up to {worst}");
    let worst_eval = audits.iter().map(|a| a.max_eval_err).fold(0.0, f64::max);
    assert!(
        worst_eval <= 1e-6,
        "episode vs offline replay mismatch {worst_eval}"
    );
    println!(
        "ACCEPTANCE 3 (dense/sparse equality): PASS - max |dense+terminal-sparse| = {worst:.2e}, \
         max offline-replay deviation = {worst_eval:.2e} over 14,000 episodes"
    );
}

#[test]
fn acceptance_5_selector_contracts() {
    let audits = audits();
    let coactive: usize = audits.iter().map(|a| a.round_robin_coactive).sum();
    let argmin: usize = audits.iter().map(|a| a.smallest_time_violations).sum();
    assert_eq!(coactive, 0, "round-robin let several agents travel at once");
    assert_eq!(argmin, 0, "smallest-time picked a non-argmin agent");
    println!(
        "ACCEPTANCE 5 (selector contracts): PASS - round-robin kept one agent in motion and \
         smallest-time satisfied the argmin property at every audited step"
    );
}

// ───────────────────────────────────────────────────────────────────
// Criterion 4: oracle equivalence on tiny instances.
// ───────────────────────────────────────────────────────────────────

fn tiny_spec(problem: Problem) -> GenerationSpec {
    GenerationSpec {
        problem,
        num_services: 6,
        num_agents: 2,
        num_depots: if problem.multi_depot() { 2 } else { 1 },
        capacity: 8.0,
        horizon: 3.0,
        tw_width: (0.3, 0.8),
        service_time: 0.05,
        demand_range: (1, 4),
        profit_mode: if problem.uses_profit() {
            ProfitMode::Uniform
        } else {
            ProfitMode::None
        },
        soft: GenerationSpec::for_problem(problem, 6).soft,
    }
}

#[test]
fn acceptance_4_oracle_equivalence() {
    let rules = RuleConfig::default();
    let limits = OracleLimits::default();
    let mut toptw_oracle_sum = 0.0;
    let mut toptw_greedy_sum = 0.0;
    let mut rollouts_checked = 0usize;

    for problem in ALL_PROBLEMS {
        let spec = tiny_spec(problem);
        for i in 0..50u64 {
            let seed = 5_000 + i;
            let inst = generate_random(&spec, seed).expect("tiny spec feasible");
            let oracle = brute_force_optimum(&inst, SelectorKind::RoundRobin, rules, limits)
                .expect("tiny instance within oracle limits");

            // (a) offline replay reproduces the oracle's totals exactly.
            let eval = evaluate_solution(&inst, &oracle.routes, &rules).unwrap();
            assert!(
                eval.feasible,
                "{problem} seed {seed}: oracle routes infeasible"
            );
            assert_eq!(
                eval.reward.to_bits(),
                oracle.reward.to_bits(),
                "{problem} seed {seed}: reward {} vs {}",
                eval.reward,
                oracle.reward
            );
            assert_eq!(
                eval.penalty.to_bits(),
                oracle.penalty.to_bits(),
                "{problem} seed {seed}: penalty {} vs {}",
                eval.penalty,
                oracle.penalty
            );

            // (b) no policy rollout beats the proven optimum.
            let mut best_greedy = f64::NEG_INFINITY;
            let mut policies = vec![
                (PolicyKind::GreedyNearest, 0u64),
                (PolicyKind::GreedyRatio, 0),
            ];
            policies.extend((0..3).map(|k| (PolicyKind::Random, k)));
            for (kind, policy_seed) in policies {
                let config = EnvConfig {
                    selector: SelectorKind::RoundRobin,
                    reward_mode: RewardMode::Sparse,
                    ..EnvConfig::default()
                };
                let mut policy = Policy::new(kind, 900 + policy_seed);
                let stats = run_episode(&inst, config, &mut policy, 31 + policy_seed).unwrap();
                assert!(
                    stats.total() <= oracle.total() + 1e-9,
                    "{problem} seed {seed}: {kind} total {} beats oracle {}",
                    stats.total(),
                    oracle.total()
                );
                rollouts_checked += 1;
                if kind != PolicyKind::Random {
                    best_greedy = best_greedy.max(stats.total());
                }
            }
            if problem == Problem::Toptw {
                toptw_oracle_sum += oracle.total();
                toptw_greedy_sum += best_greedy;
            }
        }
    }

    // (c) greedy baselines reach at least 60% of the oracle score on the
    // TOPTW tiny set.
    let ratio = toptw_greedy_sum / toptw_oracle_sum;
    assert!(
        ratio >= 0.60,
        "greedy baselines reach only {:.1}% of the oracle score",
        ratio * 100.0
    );
    println!(
        "ACCEPTANCE 4 (oracle equivalence): PASS - 350 tiny instances: exact replay equality, \
         {rollouts_checked} policy rollouts never beat the oracle, greedy at {:.1}% of the \
         TOPTW oracle score (floor 60%)",
        ratio * 100.0
    );
}

// ───────────────────────────────────────────────────────────────────
// Criterion 6: parser and codec fidelity.
// ───────────────────────────────────────────────────────────────────

#[test]
fn acceptance_6_parser_codec() {
    let solomon = include_bytes!("fixtures/solomon_basic.txt");
    let lilim = include_bytes!("fixtures/lilim_basic.txt");
    let cordeau = include_bytes!("fixtures/cordeau_basic.txt");

    // Field-exact parses.
    let inst = parse_benchmark(BenchmarkFormat::Solomon, solomon).unwrap();
    assert_eq!(
        (inst.name.as_str(), inst.num_agents(), inst.capacity),
        ("TOY2", 3, 200.0)
    );
    assert_eq!(inst.coords[1], [45.0, 68.0]);
    assert_eq!(
        (
            inst.demand[1],
            inst.tw_open[1],
            inst.tw_close[1],
            inst.service_time[1]
        ),
        (10.0, 912.0, 967.0, 90.0)
    );

    let pd = parse_benchmark(BenchmarkFormat::LiLim, lilim).unwrap();
    assert_eq!(pd.problem, Problem::Pdptw);
    assert_eq!(pd.pickup_of[2], Some(1));
    assert_eq!(pd.pickup_of[4], Some(3));
    assert_eq!((pd.demand[3], pd.demand[4]), (25.0, 25.0));

    let md = parse_benchmark(BenchmarkFormat::Cordeau, cordeau).unwrap();
    assert_eq!(md.problem, Problem::Mdvrptw);
    assert_eq!(
        (md.num_depots(), md.num_agents(), md.capacity),
        (2, 4, 80.0)
    );

    // encode -> decode is the identity for every parsed fixture.
    for inst in [&inst, &pd, &md] {
        let decoded = decode_instance(encode_instance(inst).unwrap().as_bytes()).unwrap();
        assert_eq!(&decoded, inst);
    }

    // Malformed inputs fail with line-numbered errors.
    let typo = b"TOY2\nVEHICEL\nNUMBER CAPACITY\n 3 200\n";
    match parse_benchmark(BenchmarkFormat::Solomon, typo).unwrap_err() {
        ParseError::Syntax { line, .. } => assert_eq!(line, 2),
        other => panic!("unexpected {other}"),
    }
    let bad_row = String::from_utf8_lossy(solomon).replace("10        912", "ten        912");
    assert!(matches!(
        parse_benchmark(BenchmarkFormat::Solomon, bad_row.as_bytes()),
        Err(ParseError::Syntax { .. })
    ));
    let negative = String::from_utf8_lossy(solomon).replace("10        912", "-10        912");
    assert!(matches!(
        parse_benchmark(BenchmarkFormat::Solomon, negative.as_bytes()),
        Err(ParseError::Validation { .. })
    ));
    assert!(matches!(
        parse_benchmark(BenchmarkFormat::Cordeau, b"6 2 3\n"),
        Err(ParseError::Syntax { line: 1, .. })
    ));

    let encoded = encode_instance(&inst).unwrap();
    assert!(decode_instance(&encoded.as_bytes()[..encoded.len() / 3]).is_err());

    println!(
        "ACCEPTANCE 6 (parser/codec): PASS - solomon, li_lim and cordeau fixtures parse \
         field-exact, encode->decode is the identity, malformed inputs fail with line numbers"
    );
}

// ───────────────────────────────────────────────────────────────────
// Criterion 7: dihedral augmentation invariance.
// ───────────────────────────────────────────────────────────────────

#[test]
fn acceptance_7_augmentation() {
    let mut worst_matrix = 0.0f64;
    let mut worst_objective = 0.0f64;
    for problem in ALL_PROBLEMS {
        let spec = GenerationSpec::for_problem(problem, 30);
        let inst = generate_random(&spec, 777).unwrap();

        // Record a random-policy action sequence on the base instance.
        let config = EnvConfig {
            selector: SelectorKind::RoundRobin,
            reward_mode: RewardMode::Sparse,
            ..EnvConfig::default()
        };
        let (mut env, _) = Env::reset(&inst, config.clone(), 42).unwrap();
        let mut actions = Vec::new();
        let base_stats = loop {
            let a = env.sample_action().unwrap();
            actions.push(a);
            let (_, out) = env.step(a).unwrap();
            if out.done {
                break out.stats.unwrap();
            }
        };

        for id in 0..8u8 {
            let transformed = augment_instance(&inst, id).unwrap();
            for i in 0..inst.num_nodes() {
                for j in 0..inst.num_nodes() {
                    let diff = (inst.travel().get(i, j) - transformed.travel().get(i, j)).abs();
                    assert!(
                        diff <= 1e-9,
                        "{problem} transform {id}: T[{i}][{j}] off by {diff}"
                    );
                    worst_matrix = worst_matrix.max(diff);
                }
            }

            // Replaying the identical action sequence yields the same
            // objective.
            let (mut env, _) = Env::reset(&transformed, config.clone(), 42).unwrap();
            let mut stats = None;
            for a in &actions {
                let (_, out) = env.step(*a).unwrap();
                if out.done {
                    stats = out.stats;
                }
            }
            let stats = stats.expect("replay completes");
            let diff = (stats.objective - base_stats.objective).abs();
            assert!(
                diff <= 1e-9,
                "{problem} transform {id}: objective {} vs {}",
                stats.objective,
                base_stats.objective
            );
            worst_objective = worst_objective.max(diff);
        }
    }
    println!(
        "ACCEPTANCE 7 (augmentation): PASS - all 8 dihedral transforms preserve distance \
         matrices (worst {worst_matrix:.2e}) and replayed objectives (worst {worst_objective:.2e})"
    );
}

// ───────────────────────────────────────────────────────────────────
// Criterion 8: scope disclosure.
// ───────────────────────────────────────────────────────────────────

#[test]
fn acceptance_8_scope_disclosure() {
    // Learned-model objective values and training curves from the
    // published study require a neural training stack that is out of
    // scope here; they are inputs (criterion 1 checks the evaluation
    // arithmetic applied to them), not reproduction targets. Criteria
    // 2-7 substitute property-based verification of the simulator.
    assert_eq!(GAP_TABLE.len(), 32);
    println!(
        "ACCEPTANCE 8 (scope disclosure): PASS - learned-model scores are regression inputs \
         only; environment correctness is established by criteria 2-7"
    );
}
