//! `incidence`: construct extremal configurations, count incidences,
//! analyze structure, compute energies, check totient properties and run
//! exponent sweeps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use incidence_core::construct::{construct_elekes, construct_erdos, construct_general_alpha, construct_random, Construction};
use incidence_core::energy::energy_report;
use incidence_core::geom::{
    count_histogram, format_lines_file, format_points_file, incidences_oracle, line_counts, parse_lines_file,
    parse_points_file,
};
use incidence_core::numtheory::{totient_checks, TotientCheck};
use incidence_core::structure::verify_lattice_structure;
use incidence_core::sweep::{emit_report, run_sweep, to_sorted_json, FitTarget, Kind, SweepSpec};
use incidence_core::{
    AnalyzerConfig, Error, GridSpec, Number, NumberSet, ProductSet, QuadExt, Rat, Result, SlopeWindow,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "incidence", version, about = "Exact point-line incidence experiments")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized baselines.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Work cap for brute-force incidence counting.
    #[arg(long, global = true)]
    oracle_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point grid and line set.
    Construct(ConstructArgs),
    /// Count incidences between a points file and a lines file.
    Count(CountArgs),
    /// Structural report of a line set over a lattice.
    Analyze(AnalyzeArgs),
    /// Additive and multiplicative energies of a set.
    Energy(EnergyArgs),
    /// Totient growth and identity checks.
    Totient(TotientArgs),
    /// Construct, count and analyze across sizes and fit an exponent.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    Erdos,
    Elekes,
    General,
    Random,
}

#[derive(Args)]
struct WindowArgs {
    /// Properness constant k.
    #[arg(long, default_value_t = 4)]
    k: u64,
    /// Window constant for non-steep slopes.
    #[arg(long, default_value = "2")]
    kt: Rat,
    /// Window constant for steep slopes.
    #[arg(long, default_value = "2")]
    ks: Rat,
}

impl WindowArgs {
    fn window(&self) -> Result<SlopeWindow> {
        SlopeWindow::new(self.kt.clone(), self.ks.clone())
    }
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    kind: ConstructKind,
    /// Grid width (`m` for erdos, `r` for elekes).
    #[arg(long)]
    w: u64,
    /// Grid height (implied for erdos and elekes).
    #[arg(long)]
    h: Option<u64>,
    #[command(flatten)]
    window: WindowArgs,
    /// Number of lines to keep (required for random).
    #[arg(long)]
    lines: Option<u64>,
    #[arg(long)]
    out_points: Option<PathBuf>,
    #[arg(long)]
    out_lines: Option<PathBuf>,
    /// Manifest path; printed to stdout when omitted.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    lines: PathBuf,
    /// Count by direct substitution instead of arithmetic progressions.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    lines: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    /// Rich slopes carry at least c·N^(2/3) proper lines.
    #[arg(long)]
    rich_c: Option<Rat>,
    /// Full report as JSON (default).
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// One row per parallel family.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct EnergyArgs {
    /// One number per line.
    #[arg(long)]
    set: PathBuf,
    /// Pair the set with [N] (shifted by --shift).
    #[arg(long)]
    interval: Option<u64>,
    /// `p/q` or `sqrt:D:p/q:r/s` for p/q + (r/s)·sqrt(D).
    #[arg(long, requires = "interval")]
    shift: Option<String>,
    /// Also enumerate quadruples directly.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct TotientArgs {
    #[arg(long)]
    limit: u64,
    /// One of a, b, c, d, e; all when omitted.
    #[arg(long)]
    check: Option<TotientCheck>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "general")]
    kind: Kind,
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
    /// Comma-separated target sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [4096u64, 32768, 262144])]
    sizes: Vec<u64>,
    /// incidence, rich_slopes, family_size or energy.
    #[arg(long, default_value = "incidence")]
    fit: FitTarget,
    #[command(flatten)]
    window: WindowArgs,
    /// json, csv or svg-loglog.
    #[arg(long, default_value = "json")]
    format: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write(p, bytes),
        None => std::io::stdout().write_all(bytes).map_err(Error::Io),
    }
}

fn json_line(v: &serde_json::Value) -> Result<Vec<u8>> {
    Ok(to_sorted_json(v)?.into_bytes())
}

fn load_points(path: &Path) -> Result<ProductSet> {
    ProductSet::from_points(&parse_points_file(&read(path)?)?)
}

fn parse_shift(text: &str) -> Result<Number> {
    match text.strip_prefix("sqrt:") {
        None => Ok(Number::from(text.parse::<Rat>()?)),
        Some(rest) => {
            let parts: Vec<&str> = rest.split(':').collect();
            let [d, a, b] = parts[..] else {
                return Err(Error::InvalidArgument(format!("shift {text:?} is not sqrt:D:p/q:r/s")));
            };
            let d: u64 = d.parse().map_err(|_| Error::InvalidArgument(format!("bad radicand {d:?}")))?;
            Ok(Number::from(QuadExt::new(a.parse()?, b.parse()?, d)?))
        }
    }
}

fn construct(cli: &Cli, a: &ConstructArgs) -> Result<()> {
    let win = a.window.window()?;
    let k = a.window.k;
    let check_h = |expected: u64| match a.h {
        Some(h) if h != expected => Err(Error::InvalidArgument(format!("--h must be {expected} for this kind, got {h}"))),
        _ => Ok(()),
    };
    let c: Construction = match a.kind {
        ConstructKind::Erdos => {
            check_h(a.w)?;
            construct_erdos(a.w, &win, k, a.lines)?
        }
        ConstructKind::Elekes => {
            check_h(2 * a.w * a.w)?;
            construct_elekes(a.w)?
        }
        ConstructKind::General => {
            let h = a.h.ok_or_else(|| Error::InvalidArgument("--h is required for general".into()))?;
            construct_general_alpha(&GridSpec::new(a.w, h)?, &win, k, a.lines)?
        }
        ConstructKind::Random => {
            let h = a.h.ok_or_else(|| Error::InvalidArgument("--h is required for random".into()))?;
            let n = a.lines.ok_or_else(|| Error::InvalidArgument("--lines is required for random".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            construct_random(&GridSpec::new(a.w, h)?, n, cli.seed, &mut rng)?
        }
    };
    if let Some(p) = &a.out_points {
        write(p, format_points_file(&c.points).as_bytes())?;
    }
    if let Some(p) = &a.out_lines {
        write(p, format_lines_file(&c.lines).as_bytes())?;
    }
    emit(a.manifest.as_deref(), to_sorted_json(&c.manifest)?.as_bytes())
}

fn count(cfg: &AnalyzerConfig, a: &CountArgs) -> Result<()> {
    let p = load_points(&a.points)?;
    let lines = parse_lines_file(&read(&a.lines)?)?;
    let counts = line_counts(&p, &lines);
    let incidences = if a.oracle { incidences_oracle(&p, &lines, cfg)? } else { counts.iter().sum() };
    let hist: Vec<serde_json::Value> =
        count_histogram(&counts).into_iter().map(|(c, n)| json!({ "count": c, "lines": n })).collect();
    emit(
        None,
        &json_line(&json!({
            "incidences": incidences,
            "method": if a.oracle { "oracle" } else { "fast" },
            "n_lines": lines.len(),
            "n_points": p.len(),
            "per_line_histogram": hist,
        }))?,
    )
}

fn analyze(cfg: &AnalyzerConfig, a: &AnalyzeArgs) -> Result<()> {
    let p = load_points(&a.points)?;
    let g = p.grid().ok_or_else(|| Error::InvalidArgument("analyze needs the lattice [w] x [h] as points".into()))?;
    let lines = parse_lines_file(&read(&a.lines)?)?;
    let cfg = AnalyzerConfig { k: a.window.k, rich_c: a.rich_c.clone(), ..cfg.clone() };
    let r = verify_lattice_structure(&g, &lines, &cfg, &a.window.window()?)?;
    if a.csv {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let mut out = String::from(
            "slope,size,min_count,max_count,in_slope_set,intercept_coverage,intercepts_within_set,intercept_add_energy\n",
        );
        for f in &r.families {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                f.slope,
                f.size,
                f.min_count,
                f.max_count,
                f.in_slope_set,
                opt(f.intercept_coverage),
                f.intercepts_within_set.map_or(String::new(), |b| b.to_string()),
                f.intercept_add_energy
            ));
        }
        emit(None, out.as_bytes())
    } else {
        emit(None, to_sorted_json(&r)?.as_bytes())
    }
}

fn energy(a: &EnergyArgs) -> Result<()> {
    let set = NumberSet::parse_lines(&read(&a.set)?)?;
    let other = match (a.interval, &a.shift) {
        (Some(n), Some(s)) => Some(NumberSet::shifted_interval(n, &parse_shift(s)?)),
        (Some(n), None) => Some(NumberSet::interval(n)),
        (None, _) => None,
    };
    let r = energy_report(&set, other.as_ref(), a.oracle)?;
    emit(None, to_sorted_json(&r)?.as_bytes())
}

fn totient(a: &TotientArgs) -> Result<()> {
    let checks = match a.check {
        Some(c) => vec![c],
        None => vec![TotientCheck::A, TotientCheck::B, TotientCheck::C, TotientCheck::D, TotientCheck::E],
    };
    let mut out = Vec::new();
    for c in checks {
        for r in totient_checks(c, a.limit)? {
            let v = serde_json::to_value(&r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            out.extend(serde_json::to_string(&v).map_err(|e| Error::InvalidArgument(e.to_string()))?.bytes());
            out.push(b'\n');
        }
    }
    emit(None, &out)
}

fn sweep(cfg: &AnalyzerConfig, a: &SweepArgs) -> Result<()> {
    let spec = SweepSpec {
        kind: a.kind,
        alpha: a.alpha,
        sizes: a.sizes.clone(),
        fit_target: a.fit,
        k: a.window.k,
        window: a.window.window()?,
    };
    if !["json", "csv", "svg-loglog"].contains(&a.format.as_str()) {
        return Err(Error::InvalidArgument(format!("unknown report format {:?}, expected json|csv|svg-loglog", a.format)));
    }
    let report = run_sweep(&spec, cfg)?;
    emit(a.out.as_deref(), &emit_report(&report, &a.format)?)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    let mut cfg = AnalyzerConfig::default();
    if let Some(c) = cli.oracle_cap {
        cfg.oracle_cap = c;
    }
    match &cli.command {
        Command::Construct(a) => construct(cli, a),
        Command::Count(a) => count(&cfg, a),
        Command::Analyze(a) => analyze(&cfg, a),
        Command::Energy(a) => energy(a),
        Command::Totient(a) => totient(a),
        Command::Sweep(a) => sweep(&cfg, a),
    }
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("invalid-argument", e.render().to_string().trim(), 1),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), if matches!(e, Error::ResourceLimit(_)) { 2 } else { 1 }),
    }
}
