//! Command-line interface: instance generation, validation, rollouts,
//! benchmark conversion, gap tables, and the exhaustive oracle.
//!
//! Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use vrpsim::benchmark::{parse_benchmark, BenchmarkFormat};
use vrpsim::codec::{
    decode_instance, decode_manifest, encode_instance, encode_manifest, instance_filename,
    MANIFEST_FILENAME,
};
use vrpsim::generate::{generate_random, GenerationSpec, InstanceSet, ProfitMode, Split};
use vrpsim::policy::aggregate_stats;
use vrpsim::{
    batch_rollout, brute_force_optimum, gap, validate_instance, EnvConfig, EpisodeStats,
    InstanceData, OracleLimits, PolicyKind, Problem, RewardMode, RolloutOptions, RuleConfig,
    SelectorKind,
};

/// Environment variable naming the default data directory for relative
/// instance paths.
const DATA_DIR_VAR: &str = "VRPSIM_DATA_DIR";

#[derive(Parser)]
#[command(name = "vrpsim", version, about = "Multi-agent routing environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Cvrptw,
    Cvrpstw,
    Toptw,
    Pdptw,
    Sdvrptw,
    Pcvrptw,
    Mdvrptw,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Problem {
        match p {
            ProblemArg::Cvrptw => Problem::Cvrptw,
            ProblemArg::Cvrpstw => Problem::Cvrpstw,
            ProblemArg::Toptw => Problem::Toptw,
            ProblemArg::Pdptw => Problem::Pdptw,
            ProblemArg::Sdvrptw => Problem::Sdvrptw,
            ProblemArg::Pcvrptw => Problem::Pcvrptw,
            ProblemArg::Mdvrptw => Problem::Mdvrptw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectorArg {
    RoundRobin,
    SmallestTime,
    Random,
}

impl From<SelectorArg> for SelectorKind {
    fn from(s: SelectorArg) -> SelectorKind {
        match s {
            SelectorArg::RoundRobin => SelectorKind::RoundRobin,
            SelectorArg::SmallestTime => SelectorKind::SmallestTime,
            SelectorArg::Random => SelectorKind::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Random,
    GreedyNearest,
    GreedyRatio,
}

impl From<PolicyArg> for PolicyKind {
    fn from(p: PolicyArg) -> PolicyKind {
        match p {
            PolicyArg::Random => PolicyKind::Random,
            PolicyArg::GreedyNearest => PolicyKind::GreedyNearest,
            PolicyArg::GreedyRatio => PolicyKind::GreedyRatio,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RewardArg {
    Dense,
    Sparse,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Solomon,
    LiLim,
    Cordeau,
    Native,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Validation,
    Test,
}

impl From<SplitArg> for Split {
    fn from(s: SplitArg) -> Split {
        match s {
            SplitArg::Train => Split::Train,
            SplitArg::Validation => Split::Validation,
            SplitArg::Test => Split::Test,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    #[arg(long, default_value_t = 50)]
    services: usize,
    /// Fleet size; defaults to the problem's standard fleet.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    depots: Option<usize>,
    #[arg(long)]
    capacity: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    service_time: Option<f64>,
    /// Time-window width range, e.g. 0.2,0.6
    #[arg(long, value_parser = parse_pair)]
    tw_width: Option<(f64, f64)>,
    /// Inclusive integer demand range, e.g. 1,9
    #[arg(long, value_parser = parse_int_pair)]
    demand_range: Option<(u32, u32)>,
    #[arg(long, value_enum)]
    split: SplitArg,
    /// Seed range A..B (end exclusive); offsets into the split's seed
    /// range when A..B are relative (e.g. 0..2048 of validation).
    #[arg(long, value_parser = parse_seed_range)]
    seed_range: (u64, u64),
    /// Output directory (defaults to $VRPSIM_DATA_DIR or ./instances).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RolloutArgs {
    /// Instance file, directory of instance files, or manifest directory.
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, value_enum, default_value = "random")]
    policy: PolicyArg,
    #[arg(long, value_enum, default_value = "round-robin")]
    selector: SelectorArg,
    #[arg(long, value_enum, default_value = "dense")]
    reward: RewardArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parallel workers; 0 uses all cores, 1 is sequential.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Permit batches mixing instance sizes.
    #[arg(long, default_value_t = false)]
    allow_mixed_sizes: bool,
    /// JSON document selecting observation features per family; the
    /// problem's full registry when omitted.
    #[arg(long)]
    obs_config: Option<PathBuf>,
    /// Results file (JSON lines); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Rollout results (JSON lines).
    #[arg(long)]
    results: PathBuf,
    /// Reference scores: a JSON object mapping instance name to score.
    #[arg(long = "ref")]
    reference: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    format: FormatArg,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    format: FormatArg,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "round-robin")]
    selector: SelectorArg,
    #[arg(long, default_value_t = 0)]
    max_depth: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Write a reproducible instance set with a manifest.
    Generate(GenerateArgs),
    /// Roll out a scripted policy over an instance set.
    Rollout(RolloutArgs),
    /// Join rollout results with reference scores and print a gap table.
    Bench(BenchArgs),
    /// Validate an instance file (exit 1 on violations).
    Validate(ValidateArgs),
    /// Convert a benchmark file to the native format.
    Convert(ConvertArgs),
    /// Exhaustive optimum of a desk-scale instance.
    Oracle(OracleArgs),
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated numbers".into());
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_int_pair(s: &str) -> Result<(u32, u32), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated integers".into());
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_seed_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| "expected a range like 100000..100010".to_string())?;
    let start: u64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let end: u64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if end <= start {
        return Err("seed range must be non-empty".into());
    }
    Ok((start, end))
}

fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("instances"))
}

/// Resolves a possibly-relative path against the data directory when the
/// direct path does not exist.
fn resolve_input(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    let candidate = data_dir().join(path);
    if candidate.exists() {
        candidate
    } else {
        path.to_path_buf()
    }
}

#[derive(Serialize, Deserialize)]
struct EpisodeRecord {
    record: &'static str,
    instance: String,
    problem: Problem,
    objective: f64,
    reward: f64,
    penalty: f64,
    agents_used: usize,
    services_served: usize,
    demand_served_fraction: f64,
    profit_collected_fraction: f64,
    steps: usize,
}

impl EpisodeRecord {
    fn from_stats(stats: &EpisodeStats) -> Self {
        EpisodeRecord {
            record: "episode",
            instance: stats.instance.clone(),
            problem: stats.problem,
            objective: stats.objective,
            reward: stats.total_reward,
            penalty: stats.total_penalty,
            agents_used: stats.agents_used,
            services_served: stats.services_served,
            demand_served_fraction: stats.demand_served_fraction,
            profit_collected_fraction: stats.profit_collected_fraction,
            steps: stats.steps,
        }
    }
}

/// Writes to stdout, treating a closed pipe downstream as success.
fn print_stdout(body: &str) -> Result<(), String> {
    match std::io::stdout().write_all(body.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(e.to_string()),
    }
}

fn run() -> Result<(), String> {
    match Cli::parse().command {
        Command::Generate(args) => cmd_generate(args),
        Command::Rollout(args) => cmd_rollout(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), String> {
    let problem: Problem = args.problem.into();
    let mut spec = GenerationSpec::for_problem(problem, args.services);
    if let Some(v) = args.agents {
        spec.num_agents = v;
    }
    if let Some(v) = args.depots {
        spec.num_depots = v;
    }
    if let Some(v) = args.capacity {
        spec.capacity = v;
    }
    if let Some(v) = args.horizon {
        spec.horizon = v;
    }
    if let Some(v) = args.service_time {
        spec.service_time = v;
    }
    if let Some(v) = args.tw_width {
        spec.tw_width = v;
    }
    if let Some(v) = args.demand_range {
        spec.demand_range = v;
    }
    if problem.uses_profit() {
        spec.profit_mode = ProfitMode::Uniform;
    }

    let split: Split = args.split.into();
    let (start, end) = args.seed_range;
    // Relative ranges index into the split's canonical seed block.
    let base = split.seed_range().start;
    let (start, end) = if end <= base && split != Split::Train {
        (base + start, base + end)
    } else {
        (start, end)
    };
    let seeds: Vec<u64> = (start..end).collect();
    let set = InstanceSet {
        split,
        seeds: seeds.clone(),
        spec: spec.clone(),
    };
    set.validate().map_err(|e| e.to_string())?;

    let out = args.out.unwrap_or_else(data_dir);
    fs::create_dir_all(&out).map_err(|e| format!("creating {}: {e}", out.display()))?;
    for seed in &seeds {
        let inst = generate_random(&spec, *seed).map_err(|e| e.to_string())?;
        let path = out.join(instance_filename(&spec, *seed));
        fs::write(&path, encode_instance(&inst).map_err(|e| e.to_string())?)
            .map_err(|e| format!("writing {}: {e}", path.display()))?;
    }
    let manifest = out.join(MANIFEST_FILENAME);
    fs::write(&manifest, encode_manifest(&set).map_err(|e| e.to_string())?)
        .map_err(|e| format!("writing {}: {e}", manifest.display()))?;
    print_stdout(&format!(
        "wrote {} instances + manifest to {}\n",
        seeds.len(),
        out.display()
    ))
}

fn load_instances(path: &Path) -> Result<Vec<InstanceData>, String> {
    let path = resolve_input(path);
    if path.is_file() {
        let bytes = fs::read(&path).map_err(|e| format!("reading {}: {e}", path.display()))?;
        return Ok(vec![decode_instance(&bytes).map_err(|e| e.to_string())?]);
    }
    if !path.is_dir() {
        return Err(format!("{} does not exist", path.display()));
    }
    // Prefer the manifest ordering when present.
    let manifest_path = path.join(MANIFEST_FILENAME);
    if manifest_path.is_file() {
        let bytes = fs::read(&manifest_path).map_err(|e| e.to_string())?;
        let set = decode_manifest(&bytes).map_err(|e| e.to_string())?;
        let mut instances = Vec::with_capacity(set.seeds.len());
        for seed in &set.seeds {
            let file = path.join(instance_filename(&set.spec, *seed));
            let bytes = fs::read(&file).map_err(|e| format!("reading {}: {e}", file.display()))?;
            instances.push(decode_instance(&bytes).map_err(|e| e.to_string())?);
        }
        return Ok(instances);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&path)
        .map_err(|e| e.to_string())?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(format!("no instance files under {}", path.display()));
    }
    files
        .iter()
        .map(|file| {
            let bytes = fs::read(file).map_err(|e| format!("reading {}: {e}", file.display()))?;
            decode_instance(&bytes).map_err(|e| e.to_string())
        })
        .collect()
}

fn cmd_rollout(args: RolloutArgs) -> Result<(), String> {
    let instances = load_instances(&args.instances)?;
    let obs = match &args.obs_config {
        Some(path) => {
            let text = fs::read_to_string(resolve_input(path))
                .map_err(|e| format!("reading {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("observation config: {e}"))?
        }
        None => vrpsim::ObsConfig::default(),
    };
    let opts = RolloutOptions {
        config: EnvConfig {
            selector: args.selector.into(),
            reward_mode: match args.reward {
                RewardArg::Dense => RewardMode::Dense,
                RewardArg::Sparse => RewardMode::Sparse,
            },
            obs,
            ..EnvConfig::default()
        },
        policy: args.policy.into(),
        base_seed: args.seed,
        jobs: args.jobs,
        allow_mixed_sizes: args.allow_mixed_sizes,
    };
    let results = batch_rollout(&instances, &opts).map_err(|e| e.to_string())?;

    let mut lines = Vec::new();
    let mut stats = Vec::new();
    let mut failures = 0usize;
    for (inst, result) in instances.iter().zip(results) {
        match result {
            Ok(s) => {
                lines.push(
                    serde_json::to_string(&EpisodeRecord::from_stats(&s))
                        .map_err(|e| e.to_string())?,
                );
                stats.push(s);
            }
            Err(e) => {
                failures += 1;
                lines.push(
                    serde_json::json!({
                        "record": "error",
                        "instance": inst.name,
                        "message": e.to_string(),
                    })
                    .to_string(),
                );
            }
        }
    }
    if !stats.is_empty() {
        let summary = aggregate_stats(&stats).map_err(|e| e.to_string())?;
        let mut value = serde_json::to_value(&summary).map_err(|e| e.to_string())?;
        value["record"] = serde_json::Value::from("summary");
        lines.push(value.to_string());
    }
    let body = lines.join("\n") + "\n";
    match &args.out {
        Some(path) => {
            fs::write(path, body).map_err(|e| format!("writing {}: {e}", path.display()))?
        }
        None => print_stdout(&body)?,
    }
    if failures > 0 {
        return Err(format!("{failures} episode(s) failed"));
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), String> {
    let results = fs::read_to_string(resolve_input(&args.results)).map_err(|e| e.to_string())?;
    let reference_text =
        fs::read_to_string(resolve_input(&args.reference)).map_err(|e| e.to_string())?;
    let reference: BTreeMap<String, f64> =
        serde_json::from_str(&reference_text).map_err(|e| format!("reference scores: {e}"))?;

    let mut rows = Vec::new();
    for line in results.lines().filter(|l| !l.trim().is_empty()) {
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        if value.get("record").and_then(|r| r.as_str()) != Some("episode") {
            continue;
        }
        let name = value["instance"].as_str().unwrap_or("?").to_string();
        let objective = value["objective"].as_f64().unwrap_or(f64::NAN);
        rows.push((name, objective));
    }
    if rows.is_empty() {
        return Err("no episode records in results".into());
    }

    let mut table = format!(
        "{:<30} {:>12} {:>12} {:>8}\n",
        "instance", "model", "ref", "gap%"
    );
    for (name, objective) in rows {
        match reference.get(&name) {
            Some(ref_score) => {
                let g = gap(objective, *ref_score).map_err(|e| e.to_string())?;
                table += &format!("{name:<30} {objective:>12.3} {ref_score:>12.3} {g:>8.1}\n");
            }
            None => table += &format!("{name:<30} {objective:>12.3} {:>12} {:>8}\n", "n/a", "n/a"),
        }
    }
    print_stdout(&table)
}

fn read_benchmark(path: &Path, format: FormatArg) -> Result<InstanceData, String> {
    let bytes =
        fs::read(resolve_input(path)).map_err(|e| format!("reading {}: {e}", path.display()))?;
    let format = match format {
        FormatArg::Native => return decode_instance(&bytes).map_err(|e| e.to_string()),
        FormatArg::Solomon => BenchmarkFormat::Solomon,
        FormatArg::LiLim => BenchmarkFormat::LiLim,
        FormatArg::Cordeau => BenchmarkFormat::Cordeau,
    };
    parse_benchmark(format, &bytes).map_err(|e| e.to_string())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), String> {
    let inst = read_benchmark(&args.input, args.format)?;
    let report = validate_instance(&inst);
    if report.ok() {
        print_stdout(&format!(
            "ok: {} ({} nodes, {} agents)\n",
            inst.name,
            inst.num_nodes(),
            inst.num_agents()
        ))
    } else {
        Err(format!("instance invalid:\n{report}"))
    }
}

fn cmd_convert(args: ConvertArgs) -> Result<(), String> {
    if matches!(args.format, FormatArg::Native) {
        return Err("convert expects a benchmark format (solomon, li-lim, cordeau)".into());
    }
    let inst = read_benchmark(&args.input, args.format)?;
    let encoded = encode_instance(&inst).map_err(|e| e.to_string())?;
    fs::write(&args.out, encoded).map_err(|e| format!("writing {}: {e}", args.out.display()))?;
    print_stdout(&format!("wrote {}\n", args.out.display()))
}

fn cmd_oracle(args: OracleArgs) -> Result<(), String> {
    let bytes = fs::read(resolve_input(&args.input))
        .map_err(|e| format!("reading {}: {e}", args.input.display()))?;
    let inst = decode_instance(&bytes).map_err(|e| e.to_string())?;
    let limits = OracleLimits {
        max_depth: args.max_depth,
        ..OracleLimits::default()
    };
    let result = brute_force_optimum(&inst, args.selector.into(), RuleConfig::default(), limits)
        .map_err(|e| e.to_string())?;
    let mut report = format!(
        "optimum total {:.9} (reward {:.9}, penalty {:.9}), {} states\n",
        result.total(),
        result.reward,
        result.penalty,
        result.states_expanded
    );
    for route in &result.routes {
        let nodes: Vec<String> = route.visits.iter().map(|v| v.node.to_string()).collect();
        report += &format!("agent {}: {}\n", route.agent, nodes.join(" -> "));
    }
    print_stdout(&report)
}
