//! Argument parsing, command dispatch and exit statuses.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use relage_core::lifetimes::system_lifetime;
use relage_core::monotone::{check_monotone, grid, Spacing};
use relage_core::orders::{
    check_order, compare_systems_exact, redundancy_verdict, residual_verdict, CheckConfig, Method,
};
use relage_core::{Level, LifetimeModel, Mode, MonotoneConfig, Order, OrderError};

use crate::report::{write_curve_csv, ConditionJson, CurveRow, Report};
use crate::reproduce::{self, ReproduceError};
use crate::spec::{self, SpecError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Parser)]
#[command(name = "relage", version, about = "Relative ageing of coherent systems with dependent components")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Grid points of every monotonicity check.
    #[arg(long, global = true, default_value_t = relage_core::monotone::DEFAULT_GRID_POINTS)]
    grid: usize,
    /// Probability ranges are clipped to [eps, 1-eps].
    #[arg(long, global = true, default_value_t = relage_core::distortion::DEFAULT_EPS)]
    eps: f64,
    /// Relative tie tolerance of the monotonicity engine.
    #[arg(long, global = true, default_value_t = relage_core::monotone::DEFAULT_TOL)]
    tol: f64,
    /// Seed of Monte Carlo steps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall time in the report (makes reports differ between runs).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Hr,
    Rhr,
    Afc,
    Afb,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Hr => Order::Hr,
            OrderArg::Rhr => Order::Rhr,
            OrderArg::Afc => Order::AgingFasterC,
            OrderArg::Afb => Order::AgingFasterB,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    C,
    B,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::C => Mode::C,
            ModeArg::B => Mode::B,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Iff,
    Sufficient,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Iff => Method::Iff,
            MethodArg::Sufficient => Method::Sufficient,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide an order between the lifetimes of two systems.
    CheckOrder {
        #[arg(long)]
        system_a: PathBuf,
        #[arg(long)]
        system_b: PathBuf,
        #[arg(long, value_enum)]
        order: OrderArg,
        /// Decide on the distortions alone, for every common marginal.
        #[arg(long)]
        exact: bool,
    },
    /// Compare system-level with component-level active redundancy.
    Redundancy {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        method: MethodArg,
    },
    /// Compare a system of used components with a used system.
    Residual {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Age used for the explicit cross-validation.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Validate a distortion and emit its curves.
    Distortion {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        emit_csv: PathBuf,
    },
    /// Recompute a registered example and assert its classification.
    Reproduce { case_id: String },
}

/// A failure that ends the run with a nonzero status.
#[derive(Debug)]
enum Failure {
    Input(String),
    Unknown(String),
    Mismatch(String),
}

impl Failure {
    fn status(&self) -> i32 {
        match self {
            Self::Input(_) => EXIT_INPUT,
            Self::Unknown(_) => EXIT_UNKNOWN,
            Self::Mismatch(_) => EXIT_MISMATCH,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Input(m) | Self::Unknown(m) | Self::Mismatch(m) => m,
        }
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<OrderError> for Failure {
    fn from(e: OrderError) -> Self {
        Self::Input(format!("analysis failed: {e}"))
    }
}

struct Context {
    cfg: CheckConfig,
    seed: u64,
    command: Vec<String>,
}

impl Context {
    fn report(&self, check: &str) -> Report {
        let mut r = Report::new(check, &self.cfg, self.seed);
        r.command = self.command.clone();
        r
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// status. Reports go to `--out` or standard output, diagnostics to
/// standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_UNKNOWN,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return status;
        }
    };
    let command = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(m) => {
            eprintln!("relage: {m}");
            return EXIT_INPUT;
        }
    };
    match pool.install(|| execute(cli, command)) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("relage: {}", f.message());
            f.status()
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let threads = match std::env::var("RELAGE_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| format!("RELAGE_THREADS={v:?} is not a thread count"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())
}

fn config(g: &GlobalArgs) -> Result<CheckConfig, Failure> {
    if g.grid < 3 {
        return Err(Failure::Input(format!("--grid {} is too small; at least 3 points are needed", g.grid)));
    }
    if !(g.eps > 0.0 && g.eps < 0.5) {
        return Err(Failure::Input(format!("--eps {} must lie in (0, 0.5)", g.eps)));
    }
    if !(g.tol >= 0.0 && g.tol.is_finite()) {
        return Err(Failure::Input(format!("--tol {} must be finite and nonnegative", g.tol)));
    }
    let monotone = MonotoneConfig { grid_points: g.grid, tol: g.tol, ..MonotoneConfig::default() };
    Ok(CheckConfig { monotone, eps: g.eps, ..CheckConfig::default() })
}

fn execute(cli: Cli, command: Vec<String>) -> Result<(), Failure> {
    let started = Instant::now();
    let ctx = Context { cfg: config(&cli.global)?, seed: cli.global.seed, command };
    let (mut report, outcome) = match cli.command {
        Command::CheckOrder { system_a, system_b, order, exact } => {
            (check_order_cmd(&ctx, &system_a, &system_b, order.into(), exact)?, Ok(()))
        }
        Command::Redundancy { system, m, mode, method } => (redundancy_cmd(&ctx, &system, m, mode.into(), method.into())?, Ok(())),
        Command::Residual { system, mode, method, t } => (residual_cmd(&ctx, &system, mode.into(), method.into(), t)?, Ok(())),
        Command::Distortion { system, emit_csv } => (distortion_cmd(&ctx, &system, &emit_csv)?, Ok(())),
        Command::Reproduce { case_id } => reproduce_cmd(&ctx, &case_id)?,
    };
    if cli.global.timing {
        report.wall_time_s = Some(started.elapsed().as_secs_f64());
    }
    emit(&report, cli.global.out.as_deref())?;
    outcome
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    let json = report.to_json();
    match out {
        Some(path) => std::fs::write(path, json).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn symbol(order: Order) -> &'static str {
    match order {
        Order::Hr => "≤hr",
        Order::Rhr => "≤rh",
        Order::AgingFasterC => "≺c",
        Order::AgingFasterB => "≺b",
    }
}

fn check_order_cmd(ctx: &Context, a: &Path, b: &Path, order: Order, exact: bool) -> Result<Report, Failure> {
    let (sa, sb) = (spec::load(a)?, spec::load(b)?);
    let mut report = ctx.report("check-order");
    report.input_digests.insert("system_a".into(), format!("sha256:{}", sa.sha256));
    report.input_digests.insert("system_b".into(), format!("sha256:{}", sb.sha256));
    let s = symbol(order);
    if exact {
        let mode = match order {
            Order::AgingFasterC => Mode::C,
            Order::AgingFasterB => Mode::B,
            other => {
                return Err(Failure::Input(format!("--exact decides ageing-faster orders only (afc, afb), not {other}")))
            }
        };
        let r = compare_systems_exact(&sa.system.distortion, &sb.system.distortion, mode, &ctx.cfg)?;
        report.push_condition_report("", &r);
        report.verdict = r.relation.as_str().into();
        report.conclusion = Some(r.conclusion.replace("τ1", "A").replace("τ2", "B"));
        report.notes.push("decided on the distortions; the verdict holds for every common component lifetime".into());
        if sa.system.marginal.is_some() || sb.system.marginal.is_some() {
            report.notes.push("marginals in the system files are not used by --exact".into());
        }
    } else {
        let ma = LifetimeModel::Marginal(sa.marginal("check-order")?);
        let mb = LifetimeModel::Marginal(sb.marginal("check-order")?);
        let ta = system_lifetime(&sa.system.distortion, &ma);
        let tb = system_lifetime(&sb.system.distortion, &mb);
        let v = check_order(&ta, &tb, order, &ctx.cfg)?;
        report.push_order_verdict("ratio", &v);
        let (verdict, conclusion) = match (v.holds_forward, v.holds_reverse) {
            (true, true) => ("both", format!("A {s} B and B {s} A")),
            (true, false) => ("holds", format!("A {s} B")),
            (false, true) => ("reverse-holds", format!("B {s} A")),
            (false, false) => ("neither", format!("neither A {s} B nor B {s} A")),
        };
        report.verdict = verdict.into();
        report.conclusion = Some(conclusion);
        report.grid.x_range = Some([v.detail.grid.lo, v.detail.grid.hi]);
    }
    Ok(report)
}

fn redundancy_cmd(ctx: &Context, path: &Path, m: u32, mode: Mode, method: Method) -> Result<Report, Failure> {
    let s = spec::load(path)?;
    let mut report = ctx.report("redundancy");
    report.input_digests.insert("system".into(), format!("sha256:{}", s.sha256));
    let r = redundancy_verdict(&s.system.distortion, m, mode, method, &ctx.cfg)?;
    report.push_condition_report("", &r);
    report.verdict = r.overall.as_str().into();
    report.conclusion = Some(r.conclusion);
    Ok(report)
}

fn residual_cmd(ctx: &Context, path: &Path, mode: Mode, method: Method, t: Option<f64>) -> Result<Report, Failure> {
    let s = spec::load(path)?;
    let mut cfg = ctx.cfg.clone();
    if let Some(t) = t {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Input(format!("--t {t} must be positive and finite")));
        }
        cfg.residual_ts = Some(vec![t]);
    }
    let mut report = Report::new("residual", &cfg, ctx.seed);
    report.command = ctx.command.clone();
    report.input_digests.insert("system".into(), format!("sha256:{}", s.sha256));
    let r = residual_verdict(&s.system.distortion, mode, method, &cfg)?;
    report.push_condition_report("", &r);
    report.verdict = r.overall.as_str().into();
    report.conclusion = Some(r.conclusion);
    Ok(report)
}

fn distortion_cmd(ctx: &Context, path: &Path, csv_path: &Path) -> Result<Report, Failure> {
    let s = spec::load(path)?;
    let d = &s.system.distortion;
    let cfg = &ctx.cfg;
    let mut report = ctx.report("distortion");
    report.input_digests.insert("system".into(), format!("sha256:{}", s.sha256));

    let (lo, hi) = (d.eval(1e-8), d.eval(1.0 - 1e-8));
    report.conditions.push(ConditionJson::plain("h(0+)", "h(1e-8) within 1e-6 of 0", lo.abs() <= 1e-6).with_note(format!("{lo:e}")));
    report.conditions.push(
        ConditionJson::plain("h(1-)", "h(1-1e-8) within 1e-6 of 1", (1.0 - hi).abs() <= 1e-6).with_note(format!("{hi:e}")),
    );
    let v = check_monotone(|p| d.eval(p), cfg.eps, 1.0 - cfg.eps, &cfg.monotone).map_err(OrderError::from)?;
    report.conditions.push(ConditionJson::plain("h nondecreasing", "h nondecreasing", v.class.is_nondecreasing()).with_verdict(&v));
    let valid = report.conditions.iter().all(|c| c.holds);
    report.verdict = if valid { "valid" } else { "invalid" }.into();
    report.conclusion = Some(d.label().to_string());

    let rows: Vec<CurveRow> = grid(cfg.eps, 1.0 - cfg.eps, cfg.monotone.grid_points, Spacing::Linear)
        .into_iter()
        .map(|p| {
            let j = d.jet(Level::new(p));
            CurveRow { p, h: j.h, h_prime: j.d1, big_h: j.big_h, big_r: j.big_r }
        })
        .collect();
    let file = std::fs::File::create(csv_path).map_err(|e| Failure::Input(format!("{}: {e}", csv_path.display())))?;
    write_curve_csv(std::io::BufWriter::new(file), &rows)
        .map_err(|e| Failure::Input(format!("{}: {e}", csv_path.display())))?;
    report.notes.push(format!("curves: {} ({} rows: p,h,h_prime,H,R)", csv_path.display(), rows.len()));
    Ok(report)
}

fn reproduce_cmd(ctx: &Context, case: &str) -> Result<(Report, Result<(), Failure>), Failure> {
    if !reproduce::is_known(case) {
        return Err(Failure::Unknown(ReproduceError::UnknownCase(case.to_string()).to_string()));
    }
    let mut report = ctx.report("reproduce");
    match reproduce::run(case, &ctx.cfg, ctx.seed, &mut report) {
        Ok(()) => {}
        Err(e) => return Err(Failure::Mismatch(format!("{case}: reproduction failed: {e}"))),
    }
    let failed: Vec<String> = report.assertions.iter().filter(|a| !a.pass).map(|a| {
        format!("{}: expected {}, observed {}", a.name, a.expected, a.observed)
    }).collect();
    let outcome = if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{case}: {} assertion(s) failed:\n  {}", failed.len(), failed.join("\n  "))))
    };
    Ok((report, outcome))
}
