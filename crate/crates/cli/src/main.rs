//! Command-line front end: run replication sets, sweep parameters, execute
//! the preset experiment families, analyze result CSVs and validate
//! configuration files.
//!
//! Exit codes: 0 success, 1 configuration/usage error, 2 runtime error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use shopfloor_core::config::{self, ConfigError, DepartmentProfile, SimulationConfig};
use shopfloor_core::domain::{Simulation, TraceSink};
use shopfloor_core::engine::RngStream;
use shopfloor_core::harness::{
    self, analyze, AnalysisInput, Condition, ConditionSamples, ExperimentPlan, HarnessError,
    PracticeKind,
};

#[derive(Parser)]
#[command(
    name = "shopfloor",
    version,
    about = "Agent-based retail department simulator and experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one replication set from a configuration file
    Run(RunArgs),
    /// Sweep one configuration parameter over a list of values
    Sweep(SweepArgs),
    /// Run a preset experiment family
    Preset(PresetArgs),
    /// Run the statistical pipeline over an exported result CSV
    Analyze(AnalyzeArgs),
    /// Check a configuration file and report the first violation
    ValidateConfig { config: PathBuf },
    /// Run a single replication with the event-trace log enabled
    Trace(TraceArgs),
}

#[derive(Args)]
struct CommonRun {
    /// Base seed; falls back to $SHOPFLOOR_SEED, then 42
    #[arg(long)]
    seed: Option<u64>,
    /// Replications per condition (presets default to 20)
    #[arg(long)]
    reps: Option<u32>,
    /// Simulated weeks per run
    #[arg(long)]
    weeks: Option<u32>,
    /// Output CSV path; a .meta.json sidecar is written next to it
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Bound on parallel replication workers
    #[arg(long)]
    jobs: Option<usize>,
    /// Override a configuration field by dotted path, e.g.
    /// --set department.p_need_help=0.5 (repeatable)
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (JSON)
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    common: CommonRun,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Dotted path of the parameter to sweep
    #[arg(long)]
    param: String,
    /// Comma-separated values, e.g. 0.1,0.2,0.5
    #[arg(long)]
    values: String,
    #[command(flatten)]
    common: CommonRun,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    /// Cashier count swept 1..=5 with ten staff in total
    Staffing,
    /// Satisfaction-weight sensitivity scenarios
    Weights,
    /// Refund empowerment sweep
    Empowerment,
    /// Learning-probability sweep
    Learning,
    /// Promotion-threshold sweep
    Development,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeptArg {
    Atv,
    Ww,
    Both,
}

#[derive(Args)]
struct PresetArgs {
    #[arg(value_enum)]
    name: PresetName,
    /// Department profile for staffing and weight presets
    #[arg(long, value_enum, default_value = "atv")]
    dept: DeptArg,
    /// Weight-sensitivity scenario (1..=3)
    #[arg(long)]
    scenario: Option<u8>,
    /// Restrict a weight-sensitivity run to one level (1..=3)
    #[arg(long)]
    level: Option<u8>,
    #[command(flatten)]
    common: CommonRun,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Result CSV produced by run/sweep/preset
    csv: PathBuf,
    /// Comma-separated dependent variables
    #[arg(
        long,
        default_value = "transactions,satisfied_count,overall_satisfaction"
    )]
    vars: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Report destination; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    /// Configuration file; the built-in A&TV profile when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Replication index within the seed's stream family
    #[arg(long, default_value_t = 0)]
    rep: u64,
    /// Trace destination (tab-separated: time, kind, agent)
    #[arg(long, default_value = "trace.tsv")]
    out: PathBuf,
    #[arg(long = "set", value_name = "PATH=VALUE")]
    set: Vec<String>,
}

#[derive(Debug)]
enum CliError {
    /// Bad input: configuration, flags, malformed CSV. Exit 1.
    Validation(String),
    /// Failure while running or writing. Exit 2.
    Runtime(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::InvalidPlan(_) | HarnessError::IncompleteGrid(_) => {
                CliError::Validation(e.to_string())
            }
            HarnessError::Replication { .. } => CliError::Validation(e.to_string()),
            HarnessError::Io(io) => CliError::Runtime(io.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Preset(args) => cmd_preset(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::ValidateConfig { config } => cmd_validate(&config),
        Command::Trace(args) => cmd_trace(args),
    }
}

/// Seed precedence: --seed flag, then $SHOPFLOOR_SEED, then the plan (or
/// config file) default.
fn seed_override(explicit: Option<u64>) -> Option<u64> {
    explicit.or_else(|| {
        std::env::var("SHOPFLOOR_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
}

/// Applies `--set path=value` overrides through the JSON representation, so
/// every configuration field has a flag equivalent.
fn apply_overrides(
    cfg: &SimulationConfig,
    sets: &[String],
) -> Result<SimulationConfig, CliError> {
    if sets.is_empty() {
        return Ok(cfg.clone());
    }
    let mut value = serde_json::to_value(cfg)
        .map_err(|e| CliError::Runtime(format!("serialize config: {e}")))?;
    for entry in sets {
        let (path, raw) = entry.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("--set expects PATH=VALUE, got `{entry}`"))
        })?;
        let mut cursor = &mut value;
        for key in path.split('.') {
            cursor = cursor.get_mut(key).ok_or_else(|| {
                CliError::Validation(format!("unknown configuration key `{path}`"))
            })?;
        }
        *cursor = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
    }
    let cfg: SimulationConfig = serde_json::from_value(value)
        .map_err(|e| CliError::Validation(format!("override produced invalid config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

fn finalize_plan(plan: &mut ExperimentPlan, common: &CommonRun) -> Result<(), CliError> {
    if let Some(seed) = seed_override(common.seed) {
        plan.base_seed = seed;
    }
    if let Some(reps) = common.reps {
        plan.replications = reps;
    }
    for condition in &mut plan.conditions {
        if let Some(weeks) = common.weeks {
            condition.config.run.weeks = weeks;
        }
        condition.config = apply_overrides(&condition.config, &common.set)?;
        condition.config.run.replications = plan.replications;
        condition.config.run.base_seed = plan.base_seed;
    }
    Ok(())
}

fn execute_plan(mut plan: ExperimentPlan, common: &CommonRun) -> Result<(), CliError> {
    finalize_plan(&mut plan, common)?;
    println!(
        "running {}: {} conditions x {} replications (seed {})",
        plan.name,
        plan.conditions.len(),
        plan.replications,
        plan.base_seed
    );
    let set = harness::run_replications(&plan, common.jobs)?;
    harness::export_csv(&set, &common.out)?;
    let meta_path = sidecar_path(&common.out);
    harness::write_metadata(&set, &meta_path)?;
    println!(
        "wrote {} ({} rows) and {}",
        common.out.display(),
        set.records.len(),
        meta_path.display()
    );
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_string());
    name.push_str(".meta.json");
    out.with_file_name(name)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let cfg = config::load_config(&args.config)?;
    let reps = args.common.reps.unwrap_or(cfg.run.replications);
    let plan = ExperimentPlan {
        name: format!("run-{}", cfg.department.name),
        swept_parameter: "none".into(),
        second_factor: None,
        conditions: vec![Condition {
            label: cfg.department.name.clone(),
            factor_a: cfg.department.name.clone(),
            factor_b: None,
            config: cfg.clone(),
        }],
        replications: reps,
        base_seed: cfg.run.base_seed,
    };
    execute_plan(plan, &args.common)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let cfg = config::load_config(&args.config)?;
    let values: Vec<&str> = args
        .values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(CliError::Validation("--values is empty".into()));
    }
    let mut conditions = Vec::new();
    for v in &values {
        let patched = apply_overrides(&cfg, &[format!("{}={}", args.param, v)])?;
        conditions.push(Condition {
            label: format!("{}={v}", args.param),
            factor_a: v.to_string(),
            factor_b: None,
            config: patched,
        });
    }
    let reps = args.common.reps.unwrap_or(cfg.run.replications);
    let plan = ExperimentPlan {
        name: format!("sweep-{}", args.param),
        swept_parameter: args.param.clone(),
        second_factor: None,
        conditions,
        replications: reps,
        base_seed: cfg.run.base_seed,
    };
    execute_plan(plan, &args.common)
}

fn cmd_preset(args: PresetArgs) -> Result<(), CliError> {
    let profile = |dept: DeptArg| match dept {
        DeptArg::Atv | DeptArg::Both => DepartmentProfile::atv(),
        DeptArg::Ww => DepartmentProfile::ww(),
    };
    let plan = match args.name {
        PresetName::Staffing => match args.dept {
            DeptArg::Both => harness::preset_staffing_validation_two_way(),
            d => harness::preset_staffing_validation(profile(d)),
        },
        PresetName::Weights => {
            let scenario = args.scenario.ok_or_else(|| {
                CliError::Validation("preset weights requires --scenario 1..=3".into())
            })?;
            harness::preset_weight_sensitivity(profile(args.dept), scenario, args.level)?
        }
        PresetName::Empowerment => harness::preset_practice(PracticeKind::TaskEmpowerment),
        PresetName::Learning => harness::preset_practice(PracticeKind::EmpowermentToLearn),
        PresetName::Development => harness::preset_practice(PracticeKind::EmployeeDevelopment),
    };
    execute_plan(plan, &args.common)
}

fn cmd_validate(path: &Path) -> Result<(), CliError> {
    let cfg = config::load_config(path)?;
    println!(
        "ok: department `{}`, {} staff, {} weeks x {} replications",
        cfg.department.name,
        cfg.staffing.total(),
        cfg.run.weeks,
        cfg.run.replications
    );
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<(), CliError> {
    let cfg = match &args.config {
        Some(path) => config::load_config(path)?,
        None => SimulationConfig::default(),
    };
    let cfg = apply_overrides(&cfg, &args.set)?;
    let seed = seed_override(args.seed).unwrap_or(cfg.run.base_seed);
    let rng = RngStream::for_replication(seed, 0, args.rep);
    let mut sim = Simulation::new(cfg, rng)?;
    sim.set_trace(TraceSink::file(&args.out)?);
    sim.run();
    println!(
        "wrote {} (seed {seed}, replication {}, {} arrivals)",
        args.out.display(),
        args.rep,
        sim.counters().arrivals
    );
    Ok(())
}

/// Reads an exported CSV (plus its metadata sidecar when present) back into
/// analysis form.
fn read_csv_input(path: &Path) -> Result<AnalysisInput, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Validation(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if headers.first().map(String::as_str) != Some("condition") {
        return Err(CliError::Validation(
            "not a result CSV: first column must be `condition`".into(),
        ));
    }

    // Factor labels from the sidecar, when available.
    let mut factors: BTreeMap<String, (String, Option<String>)> = BTreeMap::new();
    let sidecar = sidecar_path(path);
    if let Ok(text) = std::fs::read_to_string(&sidecar) {
        if let Ok(meta) = serde_json::from_str::<serde_json::Value>(&text) {
            for c in meta["conditions"].as_array().into_iter().flatten() {
                if let Some(label) = c["label"].as_str() {
                    factors.insert(
                        label.to_string(),
                        (
                            c["factor_a"].as_str().unwrap_or(label).to_string(),
                            c["factor_b"].as_str().map(String::from),
                        ),
                    );
                }
            }
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut grouped: BTreeMap<String, Vec<BTreeMap<String, f64>>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(e.to_string()))?;
        let label = record
            .get(0)
            .ok_or_else(|| CliError::Validation("empty row".into()))?
            .to_string();
        if !order.contains(&label) {
            order.push(label.clone());
        }
        let mut metrics = BTreeMap::new();
        for (header, cell) in headers.iter().zip(record.iter()).skip(3) {
            if cell.is_empty() {
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| {
                CliError::Validation(format!("non-numeric cell `{cell}` in column {header}"))
            })?;
            metrics.insert(header.clone(), value);
        }
        grouped.entry(label).or_default().push(metrics);
    }
    if order.is_empty() {
        return Err(CliError::Validation("CSV contains no data rows".into()));
    }
    let reps_per_condition: Vec<usize> = order.iter().map(|l| grouped[l].len()).collect();
    if reps_per_condition.windows(2).any(|w| w[0] != w[1]) {
        return Err(CliError::Validation(format!(
            "incomplete replication grid: counts per condition {reps_per_condition:?}"
        )));
    }

    let conditions = order
        .into_iter()
        .map(|label| {
            let (factor_a, factor_b) = factors
                .get(&label)
                .cloned()
                .unwrap_or_else(|| (label.clone(), None));
            ConditionSamples {
                replications: grouped.remove(&label).unwrap(),
                label,
                factor_a,
                factor_b,
            }
        })
        .collect();
    Ok(AnalysisInput {
        experiment: path.display().to_string(),
        conditions,
    })
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CliError::Validation(format!(
            "--alpha must lie in (0, 1), got {}",
            args.alpha
        )));
    }
    let input = read_csv_input(&args.csv)?;
    let variables: Vec<String> = args
        .vars
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if variables.is_empty() {
        return Err(CliError::Validation("--vars is empty".into()));
    }
    let report = analyze(&input, &variables, args.alpha);
    let body = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Runtime(format!("serialize report: {e}")))?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &body)?;
            println!("wrote {}", path.display());
        }
        None => println!("{body}"),
    }
    Ok(())
}
