//! `gmacwt`: rate regions, sum-capacity sweeps, TDMA, rate splits, Monte
//! Carlo trials and exact discrete equivocation from the command line.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 infeasible request,
//! 3 size-cap refusal.

mod format;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use gmacwt::oracle::{exact_equivocation, DiscreteWiretapSpec};
use gmacwt::region::{build_gaussian_region, enumerate_vertices, sum_capacity};
use gmacwt::sim::{run_trials, SimOptions, DEFAULT_CANDIDATE_CAP};
use gmacwt::split::{default_power_split, integerize, solve_split_with_margin, verify_split};
use gmacwt::tdma::{tdma_boundary_sample, tdma_sum_optimize};
use gmacwt::{ChannelConfig, Error, RatePoint, SecrecyLevel};
use serde::Serialize;
use serde_json::json;

use format::sig9;

#[derive(Parser, Debug)]
#[command(name = "gmacwt", version, about = "Secrecy rate regions of the Gaussian multiple-access wiretap channel")]
struct Cli {
    /// Channel configuration (JSON with num_users, p_max, sigma1_sq, sigma2_sq)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Base seed; subcommands derive their own seeds from it
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Halfspaces and vertices of the δ-secret region, one file set per δ
    Region(DeltaList),
    /// Sum capacity against the wiretap-to-main noise ratio
    SumSweep(SweepArgs),
    /// Optimal TDMA sum rate and the two-user TDMA boundary
    Tdma(TdmaArgs),
    /// Secret/open/randomization rate split for a rate point
    Split(SplitArgs),
    /// Monte Carlo trials of the superposition code
    Simulate(SimArgs),
    /// Exact equivocation of discrete wiretap specs
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct DeltaList {
    /// Comma-separated secrecy levels in [0, 1]
    #[arg(long, default_value = "0,0.5,1")]
    delta: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value = "1")]
    delta: String,
    /// sigma2_sq / sigma1_sq values: a comma list or start:stop:count
    #[arg(long, default_value = "0:50:101")]
    sigma2_grid: String,
}

#[derive(Args, Debug)]
struct TdmaArgs {
    #[arg(long, default_value = "1")]
    delta: String,
    /// Boundary samples (two users only)
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Grid resolution of the time-share scan
    #[arg(long, default_value_t = 200)]
    grid: usize,
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Comma-separated rates, one per user
    #[arg(long)]
    point: String,
    /// Wiretap-rate margin in bits per channel use
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    /// Also integerize at this block length
    #[arg(long)]
    n: Option<u32>,
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    #[arg(long)]
    point: String,
    #[arg(long, default_value_t = 0.8)]
    margin: f64,
    #[arg(long, default_value_t = 12)]
    n: u32,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Largest joint decoder search
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
    cap: u64,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// A spec file, or a directory of *.json specs
    #[arg(long)]
    spec: PathBuf,
    /// Also check min_S Δ_S ≥ δ
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Infeasible(String),
    SizeCap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::SizeCap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) | Failure::SizeCap(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            Error::SizeCap { .. } | Error::UnsupportedSize(_) => Failure::SizeCap(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct RunManifest {
    command: Vec<String>,
    config: Option<PathBuf>,
    outputs: Vec<PathBuf>,
    seed: u64,
    version: &'static str,
    timestamp: u64,
}

/// Collects written files so the manifest lists every output.
struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn new(dir: &Path) -> Outcome<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Outcome<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Outcome<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }
}

fn parse_list(text: &str, what: &str) -> Outcome<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad {what} value {s:?}")))
        })
        .collect()
}

fn parse_grid(text: &str) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, c] => {
            let start: f64 = a.trim().parse().map_err(|_| Failure::Usage(format!("bad grid start {a:?}")))?;
            let stop: f64 = b.trim().parse().map_err(|_| Failure::Usage(format!("bad grid stop {b:?}")))?;
            let count: usize = c.trim().parse().map_err(|_| Failure::Usage(format!("bad grid count {c:?}")))?;
            if count == 0 {
                return Err(Failure::Usage("grid must have at least one point".into()));
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let step = (stop - start) / (count - 1) as f64;
            Ok((0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect())
        }
        _ => parse_list(text, "grid"),
    }
}

fn levels(text: &str) -> Outcome<Vec<SecrecyLevel>> {
    parse_list(text, "delta")?.into_iter().map(|d| SecrecyLevel::new(d).map_err(Failure::from)).collect()
}

fn load_config(path: Option<&Path>) -> Outcome<ChannelConfig> {
    let path = path.ok_or_else(|| Failure::Usage("--config <file> is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    ChannelConfig::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn csv_row(values: &[f64]) -> String {
    let cells: Vec<String> = values.iter().map(|&v| sig9(v)).collect();
    cells.join(",") + "\n"
}

/// splitmix64 finalizer over the base seed and a per-command salt.
fn sub_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn cmd_region(cfg: &ChannelConfig, args: &DeltaList, out: &mut Outputs) -> Outcome<()> {
    let mut refused = None;
    for d in levels(&args.delta)? {
        let tag = sig9(d.value());
        let region = build_gaussian_region(cfg, d);
        out.json(&format!("region_delta_{tag}.json"), &region.records())?;
        match enumerate_vertices(&region) {
            Ok(vertices) => {
                let header: Vec<String> = (1..=cfg.num_users()).map(|k| format!("R{k}")).collect();
                let mut csv = header.join(",") + "\n";
                for v in &vertices {
                    csv += &csv_row(v.rates());
                }
                out.write(&format!("vertices_delta_{tag}.csv"), &csv)?;
            }
            Err(e) => refused = Some(Failure::from(e)),
        }
    }
    refused.map_or(Ok(()), Err)
}

fn cmd_sum_sweep(cfg: &ChannelConfig, args: &SweepArgs, out: &mut Outputs) -> Outcome<()> {
    let grid = parse_grid(&args.sigma2_grid)?;
    let mut csv = String::from("sigma2_ratio,delta,c_sum,asymptote\n");
    for d in levels(&args.delta)? {
        for &ratio in &grid {
            let swept = cfg.with_sigma2_sq(ratio * cfg.sigma1_sq())?;
            let asymptote = 0.5 * (1.0 + ratio).log2();
            csv += &csv_row(&[ratio, d.value(), sum_capacity(&swept, d), asymptote]);
        }
    }
    out.write("sum_sweep.csv", &csv)
}

fn cmd_tdma(cfg: &ChannelConfig, args: &TdmaArgs, out: &mut Outputs) -> Outcome<()> {
    for d in levels(&args.delta)? {
        let tag = sig9(d.value());
        let opt = tdma_sum_optimize(cfg, d, args.grid)?;
        out.json(
            &format!("tdma_opt_delta_{tag}.json"),
            &json!({
                "delta": d.value(),
                "alpha": opt.alpha.alpha(),
                "sum_rate": opt.sum_rate,
                "sum_capacity": sum_capacity(cfg, d),
            }),
        )?;
        if cfg.num_users() == 2 {
            let mut csv = String::from("alpha1,R1,R2\n");
            for s in tdma_boundary_sample(cfg, d, args.samples)? {
                csv += &csv_row(&[s.alpha1, s.point.rates()[0], s.point.rates()[1]]);
            }
            out.write(&format!("tdma_delta_{tag}.csv"), &csv)?;
        }
    }
    Ok(())
}

fn rate_point(text: &str) -> Outcome<RatePoint> {
    RatePoint::new(parse_list(text, "rate")?).map_err(Failure::from)
}

fn cmd_split(cfg: &ChannelConfig, args: &SplitArgs, out: &mut Outputs) -> Outcome<()> {
    let d = SecrecyLevel::new(args.delta)?;
    let point = rate_point(&args.point)?;
    let plan = solve_split_with_margin(cfg, d, &point, args.margin)?;
    let check = verify_split(cfg, &plan, args.margin)?;
    let mut report = json!({
        "delta": args.delta,
        "point": point.rates(),
        "margin": args.margin,
        "plan": plan,
        "check": check,
        "power": default_power_split(cfg, &plan)?,
    });
    if let Some(n) = args.n {
        let (rounded, advisories) = integerize(&plan, n)?;
        report["integerized"] = json!({
            "plan": rounded,
            "message_bits": rounded.message_bits(),
            "check": verify_split(cfg, &rounded, args.margin)?,
            "advisories": advisories,
        });
    }
    out.json("split.json", &report)
}

fn cmd_simulate(cfg: &ChannelConfig, args: &SimArgs, seed: u64, out: &mut Outputs) -> Outcome<()> {
    let d = SecrecyLevel::new(args.delta)?;
    let point = rate_point(&args.point)?;
    let plan = solve_split_with_margin(cfg, d, &point, args.margin)?;
    let (plan, _) = integerize(&plan, args.n)?;
    let opts = SimOptions { trials: args.trials, seed: sub_seed(seed, 1), cap: args.cap };
    let report = run_trials(cfg, &plan, &opts)?;
    out.json(
        "sim_report.json",
        &json!({
            "delta": args.delta,
            "point": point.rates(),
            "margin": args.margin,
            "receiver_error_rate": report.receiver_error_rate(),
            "eve_success_rate": report.eve_success_rate(),
            "report": report,
        }),
    )
}

fn spec_paths(path: &Path) -> Outcome<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut paths = Vec::new();
    for entry in fs::read_dir(path)? {
        let p = entry?.path();
        if p.extension().is_some_and(|x| x == "json") {
            paths.push(p);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Usage(format!("no *.json specs in {}", path.display())));
    }
    Ok(paths)
}

fn cmd_oracle(args: &OracleArgs, out: &mut Outputs) -> Outcome<()> {
    let mut reports = Vec::new();
    for p in spec_paths(&args.spec)? {
        let spec = DiscreteWiretapSpec::load(&p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
        let r = exact_equivocation(&spec)?;
        let mut entry = json!({ "path": p, "report": r });
        if let Some(d) = args.delta {
            entry["delta"] = json!(d);
            entry["achieves"] = json!(r.achieves(d));
        }
        reports.push(entry);
    }
    out.json("oracle_report.json", &reports)
}

fn run(cli: &Cli) -> Outcome<Vec<PathBuf>> {
    let mut out = Outputs::new(&cli.out)?;
    let config = cli.config.as_deref();
    let result = match &cli.command {
        Command::Region(a) => cmd_region(&load_config(config)?, a, &mut out),
        Command::SumSweep(a) => cmd_sum_sweep(&load_config(config)?, a, &mut out),
        Command::Tdma(a) => cmd_tdma(&load_config(config)?, a, &mut out),
        Command::Split(a) => cmd_split(&load_config(config)?, a, &mut out),
        Command::Simulate(a) => cmd_simulate(&load_config(config)?, a, cli.seed, &mut out),
        Command::Oracle(a) => cmd_oracle(a, &mut out),
    };
    // partial outputs (halfspaces before a vertex refusal) are still listed
    let mut outputs = out.written.clone();
    outputs.push(cli.out.join("manifest.json"));
    let manifest = RunManifest {
        command: std::env::args().collect(),
        config: cli.config.clone(),
        outputs: outputs.clone(),
        seed: cli.seed,
        version: env!("CARGO_PKG_VERSION"),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    };
    out.json("manifest.json", &manifest)?;
    result.map(|()| outputs)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outputs) => {
            for p in outputs {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("gmacwt: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
