//! Argument parsing and subcommand dispatch.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpldpc_core::combinatorics::binomial;
use cpldpc_core::errprob::{
    self, expected_block_error, hadamard_contour, known_series_check, ContourOptions, ErrProbQuery,
};
use cpldpc_core::pde::{self, Window};
use cpldpc_core::rational::{from_biguint, log10_abs, parse_rational, to_f64, to_pq, Rational};
use cpldpc_core::series::{poisson_block_series, Series};
use cpldpc_core::sim;
use cpldpc_core::table::{self, labelling_factor, Boundary, LogBase};
use cpldpc_core::{BaseConfig, CoeffTable, EnsembleParams};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPool;

use crate::appendix::{self, DEFAULT_T_LIST};
use crate::cptable::{self, Header, TableWriter};
use crate::error::{CliError, Result};
use crate::manifest::{Manifest, DEFAULT_OUT_DIR, OUT_DIR_ENV};
use crate::parallel;
use crate::reconcile;
use crate::report::{self, AuditSummary, ResidualDto, SimDto};

#[derive(Debug, Parser)]
#[command(name = "cpldpc", version, about = "Stopping-set tables, PDE regions and block-error series for the cycle Poisson LDPC ensemble")]
pub struct Cli {
    /// Worker threads for parallel stages (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for artifacts and manifests.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Power-series operations.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Build, inspect and check coefficient tables.
    #[command(subcommand)]
    Table(TableCmd),
    /// Stopping-set counts.
    #[command(name = "stopping-sets", subcommand)]
    StoppingSets(StoppingSetsCmd),
    /// Classification of the second-order PDE.
    #[command(subcommand)]
    Pde(PdeCmd),
    /// Block-error series and Hadamard-product analysis.
    #[command(subcommand)]
    Errprob(ErrprobCmd),
    /// Monte Carlo block-error estimate under peeling.
    Simulate(SimulateArgs),
    /// Analytic block-error series against the simulation.
    Reconcile(ReconcileArgs),
}

fn rational(text: &str) -> std::result::Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

/// Code parameters: `--n` with `--r` or `--m`, or `--m` alone.
#[derive(Debug, Clone, Args)]
pub struct Ensemble {
    /// Code length.
    #[arg(long)]
    pub n: Option<u64>,
    /// Design rate, e.g. 1/2.
    #[arg(long, value_parser = rational)]
    pub r: Option<Rational>,
    /// Number of check nodes (1-r)n.
    #[arg(long)]
    pub m: Option<u32>,
}

impl Ensemble {
    fn resolve(&self, vmax: u32) -> Result<EnsembleParams> {
        let from_m = |n: u64, m: u32| Rational::one() - Rational::new(m.into(), n.into());
        let params = match (self.n, &self.r, self.m) {
            (Some(n), Some(r), m) => {
                let p = EnsembleParams::new(n, r.clone())?;
                if m.is_some_and(|m| m != p.m()) {
                    return Err(CliError::Validation(format!("--m disagrees with (1-r)n = {}", p.m())));
                }
                p
            }
            (Some(n), None, Some(m)) => EnsembleParams::new(n, from_m(n, m))?,
            (Some(n), None, None) => EnsembleParams::new(n, Rational::zero())?,
            (None, None, Some(m)) => cptable::default_params(m, vmax)?,
            (None, Some(_), _) => return Err(CliError::Usage("--r needs --n".into())),
            (None, None, None) => return Err(CliError::Usage("give --m, or --n with --r".into())),
        };
        Ok(params)
    }

    fn with_default(&self, n: u64, r: Rational) -> Ensemble {
        if self.n.is_none() && self.m.is_none() {
            Ensemble { n: Some(n), r: Some(r), m: None }
        } else {
            self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    Default,
    #[value(name = "t0-recurrence")]
    T0Recurrence,
}

impl From<BaseArg> for BaseConfig {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Default => BaseConfig::Default,
            BaseArg::T0Recurrence => BaseConfig::ZeroDegreeRecurrence,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum SeriesCmd {
    /// Applies every series operation to a coefficient list and writes
    /// `index,numerator,denominator` CSVs.
    Demo {
        /// Coefficients, comma separated.
        #[arg(long, value_parser = rational, value_delimiter = ',', default_value = "1,1,1,1,1")]
        coeffs: Vec<Rational>,
        /// Use (e^x-1-x)^t instead of --coeffs.
        #[arg(long)]
        poisson_t: Option<u32>,
        /// Truncation order for --poisson-t.
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum TableCmd {
    /// Fills A(v,t,s) up to --vmax and writes a CPTABLE file.
    Build {
        #[command(flatten)]
        ensemble: Ensemble,
        #[arg(long)]
        vmax: u32,
        #[arg(long, value_enum, default_value = "default")]
        base: BaseArg,
        #[arg(long)]
        out: PathBuf,
        /// Continue from the complete levels already in --out.
        #[arg(long)]
        resume: bool,
    },
    /// Exponential factors g(t)(v) = log(A(v,t,0)/C(m,t)) and log A(v,t,0).
    Exponents {
        #[command(flatten)]
        ensemble: Ensemble,
        #[arg(long)]
        vmax: u32,
        /// Values of t (default 1..=min(m,50)).
        #[arg(long, value_delimiter = ',')]
        t: Vec<u32>,
        #[arg(long, value_enum, default_value = "10")]
        log_base: LogBaseArg,
        /// Boundary layer: `double-factorial` is the (2v-1)!! formula used by the
        /// table; `factorial` evaluates the (2v)! form for comparison.
        #[arg(long, value_enum, default_value = "double-factorial")]
        boundary: BoundaryForm,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-checks a stored table: recurrence, boundary identity, signs and,
    /// for small m, the brute-force profile counts.
    Verify {
        #[arg(long)]
        table: PathBuf,
        /// Largest v compared against brute force (guarded by m^{2v} <= 10^8).
        #[arg(long, default_value_t = 4)]
        brute_force_vmax: u32,
    },
    /// Writes the g(t)(v) CSVs and a gnuplot script.
    Appendix {
        #[arg(long, default_value_t = 100)]
        m: u32,
        #[arg(long, default_value_t = 100)]
        vmax: u32,
        #[arg(long, value_delimiter = ',')]
        t: Vec<u32>,
        /// Reuse a stored table instead of filling one.
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    #[value(name = "10")]
    Ten,
    #[value(name = "e")]
    E,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::Ten => LogBase::Ten,
            LogBaseArg::E => LogBase::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryForm {
    DoubleFactorial,
    Factorial,
}

#[derive(Debug, Subcommand)]
pub enum StoppingSetsCmd {
    /// C(m,t)(2v)! coef{(e^x-1-x)^t, x^{2v}}.
    Count {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        v: u32,
        #[arg(long)]
        t: u32,
        /// Also enumerate all m^{2v} endpoint maps.
        #[arg(long)]
        brute_force: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum PdeCmd {
    /// Prints `<label> <discriminant>` at (y, z).
    Classify {
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        y: Rational,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        z: Rational,
    },
    /// Classifies a grid and writes `y,z,discriminant,label`.
    Region {
        #[arg(long, value_parser = rational, value_delimiter = ',', default_value = "-4,4", allow_hyphen_values = true)]
        y_range: Vec<Rational>,
        #[arg(long, value_parser = rational, value_delimiter = ',', default_value = "-4,4", allow_hyphen_values = true)]
        z_range: Vec<Rational>,
        #[arg(long, default_value_t = 41)]
        grid: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compares the exact y = αz substitution with the printed f(z).
    Alpha {
        /// Single α to report in detail.
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        alpha: Option<Rational>,
        /// Random (α, z) samples for the comparison CSV.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Applies the PDE operator to the truncated generating function.
    Residual {
        #[command(flatten)]
        ensemble: Ensemble,
        #[arg(long, default_value_t = 6)]
        vmax: u32,
        /// Defaults to m.
        #[arg(long)]
        tmax: Option<u32>,
        /// Defaults to m.
        #[arg(long)]
        smax: Option<u32>,
        #[arg(long, value_enum, default_value = "default")]
        base: BaseArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact discriminant against the printed expansion at random points.
    VerifyPaperExpansion {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ErrprobCmd {
    /// Exact expected block error with its per-v terms.
    Eval {
        #[command(flatten)]
        ensemble: Ensemble,
        #[arg(long, value_parser = rational)]
        eps: Rational,
        /// Defaults to n.
        #[arg(long)]
        vmax: Option<u32>,
        #[arg(long, value_enum, default_value = "default")]
        base: BaseArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected block error over a list of ε.
    Sweep {
        #[command(flatten)]
        ensemble: Ensemble,
        #[arg(long, value_parser = rational, value_delimiter = ',')]
        eps: Vec<Rational>,
        #[arg(long)]
        vmax: Option<u32>,
        #[arg(long, value_enum, default_value = "default")]
        base: BaseArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Root-test radius estimates for the three split sequences.
    HadamardSplit {
        #[command(flatten)]
        ensemble: Ensemble,
        /// Defaults to n.
        #[arg(long)]
        vmax: Option<u32>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        s: Vec<u32>,
        #[arg(long, value_parser = rational, value_delimiter = ',', default_value = "1/100,1/10,1")]
        x_grid: Vec<Rational>,
        #[arg(long, value_enum, default_value = "default")]
        base: BaseArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contour-integral Hadamard product against the coefficient-wise one.
    HadamardCheck {
        /// Geometric series truncated at this order, used for both factors.
        #[arg(long, default_value_t = 16)]
        order: usize,
        #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
        z: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        z_im: f64,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 4)]
        start_nodes: usize,
        #[arg(long, default_value_t = 256)]
        max_nodes: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Finite binomial identities and divergence of Σ v! x^v.
    KnownSeries {
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = rational, allow_hyphen_values = true)]
        x: Rational,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub ensemble: Ensemble,
    #[arg(long, value_parser = rational)]
    pub eps: Rational,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also print the exhaustive exact value (tiny ensembles only).
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconcileArgs {
    #[command(flatten)]
    pub ensemble: Ensemble,
    #[arg(long, value_parser = rational, value_delimiter = ',', default_value = "1/20,1/10")]
    pub eps: Vec<Rational>,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    /// Name used for the manifest file.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Series(SeriesCmd::Demo { .. }) => "series-demo",
            Command::Table(TableCmd::Build { .. }) => "table-build",
            Command::Table(TableCmd::Exponents { .. }) => "table-exponents",
            Command::Table(TableCmd::Verify { .. }) => "table-verify",
            Command::Table(TableCmd::Appendix { .. }) => "table-appendix",
            Command::StoppingSets(StoppingSetsCmd::Count { .. }) => "stopping-sets-count",
            Command::Pde(PdeCmd::Classify { .. }) => "pde-classify",
            Command::Pde(PdeCmd::Region { .. }) => "pde-region",
            Command::Pde(PdeCmd::Alpha { .. }) => "pde-alpha",
            Command::Pde(PdeCmd::Residual { .. }) => "pde-residual",
            Command::Pde(PdeCmd::VerifyPaperExpansion { .. }) => "pde-verify-paper-expansion",
            Command::Errprob(ErrprobCmd::Eval { .. }) => "errprob-eval",
            Command::Errprob(ErrprobCmd::Sweep { .. }) => "errprob-sweep",
            Command::Errprob(ErrprobCmd::HadamardSplit { .. }) => "errprob-hadamard-split",
            Command::Errprob(ErrprobCmd::HadamardCheck { .. }) => "errprob-hadamard-check",
            Command::Errprob(ErrprobCmd::KnownSeries { .. }) => "errprob-known-series",
            Command::Simulate(_) => "simulate",
            Command::Reconcile(_) => "reconcile",
        }
    }
}

/// State shared by a single run.
pub struct Context {
    pub out_dir: PathBuf,
    pub pool: ThreadPool,
    pub out: String,
    pub artifacts: Vec<PathBuf>,
    pub inputs: Vec<PathBuf>,
    pub seed: Option<u64>,
}

impl Context {
    fn path(&self, explicit: &Option<PathBuf>, default_name: &str) -> Result<PathBuf> {
        let path = explicit.clone().unwrap_or_else(|| self.out_dir.join(default_name));
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(format!("creating {}", parent.display()), e))?;
        }
        Ok(path)
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.out.push_str(text.as_ref());
        self.out.push('\n');
    }
}

/// Parses `argv` (including the program name), runs one subcommand and
/// returns the process exit code. Output goes to stdout, diagnostics to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let args = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli, args) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command, writes its manifest and returns its stdout text.
pub fn execute(cli: Cli, args: Vec<String>) -> Result<String> {
    let mut ctx = Context {
        out_dir: cli.out_dir.clone(),
        pool: parallel::pool(cli.threads)?,
        out: String::new(),
        artifacts: Vec::new(),
        inputs: Vec::new(),
        seed: None,
    };
    let name = cli.command.name();
    dispatch(&mut ctx, cli.command)?;
    Manifest::new(name, args, ctx.seed, &ctx.artifacts, &ctx.inputs)?.write(&ctx.out_dir)?;
    Ok(ctx.out)
}

fn dispatch(ctx: &mut Context, command: Command) -> Result<()> {
    match command {
        Command::Series(SeriesCmd::Demo { coeffs, poisson_t, order }) => series_demo(ctx, coeffs, poisson_t, order),
        Command::Table(cmd) => table_cmd(ctx, cmd),
        Command::StoppingSets(StoppingSetsCmd::Count { m, v, t, brute_force }) => stopping_sets(ctx, m, v, t, brute_force),
        Command::Pde(cmd) => pde_cmd(ctx, cmd),
        Command::Errprob(cmd) => errprob_cmd(ctx, cmd),
        Command::Simulate(args) => simulate(ctx, args),
        Command::Reconcile(args) => reconcile_cmd(ctx, args),
    }
}

fn fmt_coeffs(c: &[Rational]) -> String {
    c.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn series_demo(ctx: &mut Context, coeffs: Vec<Rational>, poisson_t: Option<u32>, order: usize) -> Result<()> {
    let input = match poisson_t {
        Some(t) => poisson_block_series(t, order),
        None => Series::new(coeffs)?,
    };
    let mut results = vec![
        ("input", input.clone()),
        ("shift_right", input.shift_right()),
        ("derivative", input.differentiate()),
        ("integral", input.integrate()),
        ("difference", input.difference()),
        ("partial_sum", input.partial_sum()),
        ("square", input.convolve(&input)),
        ("hadamard_square", input.hadamard(&input)),
    ];
    if let Ok(left) = input.shift_left() {
        results.insert(2, ("shift_left", left));
    }
    let dir = ctx.out_dir.join("series");
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    for (name, series) in results {
        let path = dir.join(format!("{name}.csv"));
        report::write_series_csv(&path, series.coeffs())?;
        ctx.artifacts.push(path);
        ctx.line(format!("{name}: [{}]", fmt_coeffs(series.coeffs())));
    }
    Ok(())
}

fn table_cmd(ctx: &mut Context, cmd: TableCmd) -> Result<()> {
    match cmd {
        TableCmd::Build { ensemble, vmax, base, out, resume } => {
            let params = ensemble.resolve(vmax)?;
            table_build(ctx, params, vmax, base.into(), &out, resume)
        }
        TableCmd::Exponents { ensemble, vmax, t, log_base, boundary, out } => {
            let params = ensemble.resolve(vmax)?;
            exponents(ctx, &params, vmax, t, log_base.into(), boundary, out)
        }
        TableCmd::Verify { table, brute_force_vmax } => table_verify(ctx, &table, brute_force_vmax),
        TableCmd::Appendix { m, vmax, t, table } => {
            let t_list = if t.is_empty() { DEFAULT_T_LIST.to_vec() } else { t };
            let table = match table {
                Some(path) => {
                    ctx.inputs.push(path.clone());
                    cptable::load_table(&path, None)?
                }
                None => parallel::fill_table(&ctx.pool, cptable::default_params(m, vmax)?, vmax, BaseConfig::Default)?,
            };
            let dir = ctx.out_dir.join("appendix");
            let appendix = appendix::reproduce_appendix(&table, &t_list, &dir)?;
            for curve in &appendix.curves {
                let finite = curve.points.iter().filter(|p| p.1.is_some()).count();
                ctx.line(format!("t={:<3} {} ({} finite rows)", curve.t, curve.path.display(), finite));
            }
            if let Some(max) = appendix.max_g() {
                ctx.line(format!("max g = {max:.6} (log10)"));
            }
            ctx.artifacts.extend(appendix.files());
            Ok(())
        }
    }
}

pub fn table_build(ctx: &mut Context, params: EnsembleParams, vmax: u32, base: BaseConfig, out: &Path, resume: bool) -> Result<()> {
    let mut table = if resume && out.exists() {
        let partial = cptable::load_partial(out, Some(params.clone()))?;
        if partial.table.base() != &base && !matches!(partial.table.base(), BaseConfig::Custom(_)) {
            return Err(CliError::Validation(format!(
                "{} was built with base={}, not base={}",
                out.display(),
                partial.table.base().name(),
                base.name()
            )));
        }
        ctx.line(format!("resuming from v = {} (last complete level)", partial.last_complete_v));
        if let Some(v) = partial.dropped_level {
            ctx.line(format!("discarded incomplete level v = {v}"));
        }
        partial.table
    } else {
        CoeffTable::with_base_level(params, base)?
    };
    if table.vmax() > vmax {
        return Err(CliError::Validation(format!("{} already holds levels beyond vmax = {vmax}", out.display())));
    }
    table.check_depth(vmax)?;
    let header = Header { m: table.m(), vmax, base: table.base().name().to_string() };
    let mut writer = TableWriter::create(out, &header)?;
    for (v, level) in table.levels().iter().enumerate() {
        writer.write_level(v as u32, level)?;
    }
    parallel::extend_table(&ctx.pool, &mut table, vmax, |v, level| writer.write_level(v, level))?;
    drop(writer);
    ctx.line(format!(
        "wrote {} (m={}, vmax={}, base={}, {} nonzero entries)",
        out.display(),
        table.m(),
        table.vmax(),
        table.base().name(),
        table.nonzero_entries().count()
    ));
    ctx.artifacts.push(out.to_path_buf());
    Ok(())
}

/// `log10 A(v,t,0)` and `g = log(A(v,t,0)/C(m,t))` straight from the
/// boundary layer, with `A` in the chosen boundary form.
fn exponents(
    ctx: &mut Context,
    params: &EnsembleParams,
    vmax: u32,
    t: Vec<u32>,
    base: LogBase,
    form: BoundaryForm,
    out: Option<PathBuf>,
) -> Result<()> {
    let m = params.m();
    let t_list = if t.is_empty() { (1..=m.min(50)).collect() } else { t };
    if let Some(bad) = t_list.iter().find(|&&t| t == 0 || t > m) {
        return Err(CliError::Validation(format!("t = {bad} outside 1..={m}")));
    }
    let boundary = Boundary::new(params, vmax);
    let path = ctx.path(&out, "exponents.csv")?;
    let mut w = report::csv_writer(&path)?;
    w.write_record(["t", "v", "log10_a", "g"])?;
    let mut best: Option<(f64, u32, u32)> = None;
    let scale = match base {
        LogBase::Ten => 1.0,
        LogBase::E => std::f64::consts::LN_10,
    };
    for &t in &t_list {
        let choose = from_biguint(binomial(u64::from(m), u64::from(t)));
        for v in 1..=vmax {
            let mut a = boundary.get(v, t);
            if a.is_zero() {
                continue;
            }
            if form == BoundaryForm::Factorial {
                a *= from_biguint(labelling_factor(v));
            }
            let log_a = log10_abs(&a)?;
            let g = log10_abs(&(&a / &choose))? * scale;
            w.write_record([t.to_string(), v.to_string(), format!("{log_a}"), format!("{g}")])?;
            if best.is_none_or(|b| log_a > b.0) {
                best = Some((log_a, v, t));
            }
        }
    }
    w.flush().map_err(|e| CliError::io("flushing exponents csv", e))?;
    ctx.artifacts.push(path);
    let form_name = match form {
        BoundaryForm::DoubleFactorial => "(2v-1)!! boundary",
        BoundaryForm::Factorial => "(2v)! boundary",
    };
    if let Some((log_a, v, t)) = best {
        ctx.line(format!("max log10 A(v,t,0) = {log_a:.6} at v={v}, t={t} [{form_name}, m={m}]"));
        ctx.line(format!("reaches 10^200: {}", if log_a >= 200.0 { "yes" } else { "no" }));
    }
    Ok(())
}

fn table_verify(ctx: &mut Context, path: &Path, brute_force_vmax: u32) -> Result<()> {
    ctx.inputs.push(path.to_path_buf());
    let table = cptable::load_table(path, None)?;
    let violations = table.verify_recurrence();
    let boundary = table.verify_boundary();
    let negative = table.negative_entries();
    ctx.line(format!("m={} vmax={} base={}", table.m(), table.vmax(), table.base().name()));
    ctx.line(format!("recurrence violations: {}", violations.len()));
    ctx.line(format!("boundary identity violations: {}", boundary.len()));
    ctx.line(format!("negative entries: {}", negative.len()));
    let mut mismatches = 0;
    for v in 1..=brute_force_vmax.min(table.vmax()) {
        match table.compare_with_brute_force(v) {
            Ok(rows) => {
                let bad = rows.iter().filter(|r| !r.agrees()).count();
                mismatches += bad;
                ctx.line(format!("v={v}: {} profiles, {bad} differ from brute force", rows.len()));
            }
            Err(cpldpc_core::Error::ResourceLimit { .. }) => {
                ctx.line(format!("v={v}: brute force skipped (m^(2v) above limit)"));
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if mismatches > 0 {
        ctx.line(format!("brute-force mismatches: {mismatches} (diagnostic; see base config)"));
    }
    if !violations.is_empty() || !boundary.is_empty() {
        return Err(CliError::Validation(format!(
            "{} recurrence and {} boundary violations",
            violations.len(),
            boundary.len()
        )));
    }
    Ok(())
}

fn stopping_sets(ctx: &mut Context, m: u32, v: u32, t: u32, brute_force: bool) -> Result<()> {
    let params = cptable::default_params(m, v)?;
    let count = table::stopping_set_count(&params, v, t);
    ctx.line(count.to_string());
    if brute_force {
        let counts = table::brute_force_profile_counts(m, v)?;
        let enumerated: u64 = counts.iter().filter(|((tt, s), _)| *tt == t && *s == 0).map(|(_, c)| c).sum();
        ctx.line(format!("brute force: {enumerated}"));
        if num_bigint::BigUint::from(enumerated) != count {
            return Err(CliError::Validation("brute-force count differs".into()));
        }
    }
    Ok(())
}

fn pde_cmd(ctx: &mut Context, cmd: PdeCmd) -> Result<()> {
    match cmd {
        PdeCmd::Classify { y, z } => {
            let p = pde::classify_point(&y, &z);
            ctx.line(format!("{} {}", p.nature, p.discriminant));
        }
        PdeCmd::Region { y_range, z_range, grid, out } => {
            if y_range.len() != 2 || z_range.len() != 2 {
                return Err(CliError::Usage("--y-range and --z-range take two values, e.g. 1,4".into()));
            }
            let points = pde::region_map((&y_range[0], &y_range[1]), (&z_range[0], &z_range[1]), grid)?;
            let path = ctx.path(&out, "region.csv")?;
            report::write_region_csv(&path, &points)?;
            for nature in [pde::Nature::Hyperbolic, pde::Nature::Parabolic, pde::Nature::Elliptic] {
                let count = points.iter().filter(|p| p.nature == nature).count();
                ctx.line(format!("{nature}: {count}"));
            }
            ctx.line(format!("wrote {}", path.display()));
            ctx.artifacts.push(path);
        }
        PdeCmd::Alpha { alpha, samples, seed, out } => pde_alpha(ctx, alpha, samples, seed, out)?,
        PdeCmd::Residual { ensemble, vmax, tmax, smax, base, out } => {
            let ensemble = if ensemble.n.is_none() && ensemble.m.is_none() {
                Ensemble { m: Some(5), ..ensemble }
            } else {
                ensemble
            };
            let params = ensemble.resolve(vmax)?;
            let m = params.m();
            let table = parallel::fill_table(&ctx.pool, params, vmax, base.into())?;
            let window = Window { vmax, tmax: tmax.unwrap_or(m), smax: smax.unwrap_or(m) };
            let report = pde::pde_residual(&table, window)?;
            let dto = ResidualDto::new(m, table.base().name(), &report);
            let path = ctx.path(&out, "residual.json")?;
            report::write_json(&path, &dto)?;
            ctx.line(format!(
                "interior monomials checked: {}, nonzero: {}, excluded (truncation): {}",
                report.interior_checked,
                report.nonzero.len(),
                report.excluded.len()
            ));
            ctx.line(format!("interior residual: {}", if report.is_clean() { "PASS" } else { "FAIL" }));
            ctx.line(format!("wrote {}", path.display()));
            ctx.artifacts.push(path);
        }
        PdeCmd::VerifyPaperExpansion { samples, seed, out } => {
            ctx.seed = Some(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<_> = (0..samples)
                .map(|_| (pde::random_rational(&mut rng, 50, 12), pde::random_rational(&mut rng, 50, 12)))
                .collect();
            let rows = pde::expansion_audit(&points);
            let path = ctx.path(&out, "expansion_audit.csv")?;
            report::write_audit_csv(&path, &rows)?;
            let summary = AuditSummary::new(&rows, seed);
            let summary_path = path.with_extension("json");
            report::write_json(&summary_path, &summary)?;
            ctx.line(format!(
                "{} points: first printed line equal {}, printed expansion equal {}, printed α-form equal {} ({} undefined at z=0)",
                summary.samples, summary.first_line_equal, summary.expansion_equal, summary.alpha_form_equal, summary.alpha_form_undefined
            ));
            ctx.artifacts.extend([path, summary_path]);
        }
    }
    Ok(())
}

fn pde_alpha(ctx: &mut Context, alpha: Option<Rational>, samples: usize, seed: u64, out: Option<PathBuf>) -> Result<()> {
    if let Some(alpha) = &alpha {
        let sub = pde::alpha_substitution(alpha);
        ctx.line(format!("alpha = {alpha}"));
        ctx.line(format!("exact 4(B^2-AC)(αz, z): [{}]", fmt_coeffs(&sub.exact.dense())));
        ctx.line(format!("printed α²z⁴f(z):      [{}]", fmt_coeffs(&sub.printed.dense())));
        ctx.line(format!("identical polynomials: {}", sub.agrees()));
        ctx.line(format!("D(α) = {}", pde::alpha_discriminant(alpha)));
        let roots = pde::printed_f_roots(alpha);
        let shown: Vec<String> = roots.roots.iter().map(|r| format!("{r}")).collect();
        ctx.line(format!("printed f roots: [{}]{}", shown.join(", "), if roots.double { " (double)" } else { "" }));
        if alpha.is_one() {
            ctx.line(format!(
                "caption double root z = {}; printed f double root z = {}",
                pde::published_alpha_one_root(),
                shown.first().cloned().unwrap_or_default()
            ));
        }
    }
    ctx.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let path = ctx.path(&out, "alpha_comparison.csv")?;
    let mut w = report::csv_writer(&path)?;
    w.write_record(["alpha", "z", "exact", "printed", "exact_label", "printed_label", "value_verdict", "label_verdict"])?;
    let (mut equal, mut same_label) = (0, 0);
    for _ in 0..samples {
        let a = pde::random_rational(&mut rng, 40, 8);
        let z = pde::random_rational(&mut rng, 40, 8);
        let sub = pde::alpha_substitution(&a);
        let exact = sub.exact.eval(std::slice::from_ref(&z).try_into().unwrap());
        let printed = sub.printed.eval(std::slice::from_ref(&z).try_into().unwrap());
        let (el, pl) = (pde::Nature::of_rational(&exact), pde::Nature::of_rational(&printed));
        equal += usize::from(exact == printed);
        same_label += usize::from(el == pl);
        w.write_record([
            to_pq(&a),
            to_pq(&z),
            to_pq(&exact),
            to_pq(&printed),
            el.as_str().into(),
            pl.as_str().into(),
            if exact == printed { "equal" } else { "unequal" }.into(),
            if el == pl { "same" } else { "different" }.into(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io("flushing alpha csv", e))?;
    ctx.line(format!("{samples} samples: values equal {equal}, labels equal {same_label}"));
    ctx.line(format!("wrote {}", path.display()));
    ctx.artifacts.push(path);
    Ok(())
}

fn errprob_cmd(ctx: &mut Context, cmd: ErrprobCmd) -> Result<()> {
    match cmd {
        ErrprobCmd::Eval { ensemble, eps, vmax, base, out } => {
            let params = ensemble.resolve(vmax.unwrap_or(0))?;
            let vmax = vmax.unwrap_or(params.n() as u32);
            let table = parallel::fill_table(&ctx.pool, params.clone(), vmax, base.into())?;
            let query = ErrProbQuery::new(params, eps, vmax)?;
            let block = expected_block_error(&query, &table)?;
            ctx.line(format!("E_B = {} ≈ {:e}", to_pq(&block.value), to_f64(&block.value)));
            let path = ctx.path(&out, "errprob_terms.csv")?;
            report::write_terms_csv(&path, &block)?;
            ctx.artifacts.push(path);
        }
        ErrprobCmd::Sweep { ensemble, eps, vmax, base, out } => {
            if eps.is_empty() {
                return Err(CliError::Usage("--eps needs at least one value".into()));
            }
            let params = ensemble.resolve(vmax.unwrap_or(0))?;
            let vmax = vmax.unwrap_or(params.n() as u32);
            let table = parallel::fill_table(&ctx.pool, params.clone(), vmax, base.into())?;
            let mut rows = Vec::new();
            for e in eps {
                let value = expected_block_error(&ErrProbQuery::new(params.clone(), e.clone(), vmax)?, &table)?.value;
                ctx.line(format!("{} {:e}", to_pq(&e), to_f64(&value)));
                rows.push((e, value));
            }
            let path = ctx.path(&out, "errprob_sweep.csv")?;
            report::write_sweep_csv(&path, &rows)?;
            ctx.artifacts.push(path);
        }
        ErrprobCmd::HadamardSplit { ensemble, vmax, t, s, x_grid, base, out } => {
            let params = ensemble.resolve(vmax.unwrap_or(0))?;
            let vmax = vmax.unwrap_or(params.n() as u32);
            let table = parallel::fill_table(&ctx.pool, params.clone(), vmax, base.into())?;
            let mut reports = Vec::new();
            for &tt in &t {
                for &ss in &s {
                    let rep = errprob::hadamard_split_report(&table, tt, ss, params.n(), &x_grid)?;
                    for row in &rep.rows {
                        let verdicts: Vec<String> =
                            row.at_x.iter().map(|(x, v)| format!("x={x}:{}", v.as_str())).collect();
                        ctx.line(format!(
                            "t={tt} s={ss} {:<18} window {}-{} estimate {:e} {} radius {:e} [{}]",
                            row.series.id(),
                            row.root_test.window.0,
                            row.root_test.window.1,
                            row.root_test.estimate,
                            row.root_test.verdict.as_str(),
                            row.root_test.radius(),
                            verdicts.join(" ")
                        ));
                    }
                    reports.push(rep);
                }
            }
            ctx.line(errprob::SplitReport::CAVEAT);
            let path = ctx.path(&out, "radius.csv")?;
            report::write_radius_csv(&path, &reports)?;
            ctx.artifacts.push(path);
        }
        ErrprobCmd::HadamardCheck { order, z, z_im, rho, start_nodes, max_nodes, tol } => {
            let geometric = Series::ones(order);
            let z = Complex64::new(z, z_im);
            let exact = geometric.hadamard(&geometric).eval_complex(z);
            let options = ContourOptions { rho, start_nodes, max_nodes, tolerance: tol };
            let result = hadamard_contour(&geometric, &geometric, z, options)?;
            ctx.line(format!("contour  = {} (nodes {}, rho {}, error estimate {:e})", result.value, result.nodes, result.rho, result.error_estimate));
            ctx.line(format!("coefwise = {exact}"));
            ctx.line(format!("|diff|   = {:e}", (result.value - exact).norm()));
        }
        ErrprobCmd::KnownSeries { n, x } => {
            let r = known_series_check(n, &x);
            ctx.line(format!("sum C(n,v) x^v / n^(2v) == (1 + x/n^2)^n: {}", r.scaled_binomial_holds));
            ctx.line(format!("sum C(n,v) x^v == (1 + x)^n: {}", r.binomial_holds));
            let f = &r.factorial_series;
            match f.divergence_detected_at {
                _ if f.trivially_convergent => ctx.line("sum v! x^v: x = 0, trivially convergent (= 1)"),
                Some(v) => ctx.line(format!("sum v! x^v: ratio (v+1)|x| exceeds 1 from v = {v}; divergent")),
                None => {}
            }
            ctx.line(errprob::KnownSeriesReport::NOTE);
            if !(r.scaled_binomial_holds && r.binomial_holds) {
                return Err(CliError::Validation("identity check failed".into()));
            }
        }
    }
    Ok(())
}

fn simulate(ctx: &mut Context, args: SimulateArgs) -> Result<()> {
    let params = args.ensemble.resolve(0)?;
    ctx.seed = Some(args.seed);
    let result = parallel::simulate(&ctx.pool, &params, &args.eps, args.trials, args.seed)?;
    let dto = SimDto::from(&result);
    let json = serde_json::to_string(&dto)?;
    ctx.line(&json);
    if args.exhaustive {
        let exact = sim::exhaustive_block_error(&params, &args.eps)?;
        eprintln!("exhaustive: {} ≈ {}", to_pq(&exact), to_f64(&exact));
    }
    let path = ctx.path(&args.out, "simulate.json")?;
    report::write_json(&path, &dto)?;
    ctx.artifacts.push(path);
    Ok(())
}

fn reconcile_cmd(ctx: &mut Context, args: ReconcileArgs) -> Result<()> {
    let ensemble = args.ensemble.with_default(8, Rational::new(1.into(), 2.into()));
    let params = ensemble.resolve(0)?;
    ctx.seed = Some(args.seed);
    let bases = [BaseConfig::Default, BaseConfig::ZeroDegreeRecurrence];
    let report = reconcile::reconcile(&ctx.pool, &params, &args.eps, args.trials, args.seed, &bases)?;
    let mut text = String::new();
    for row in &report.rows {
        let mc = &row.monte_carlo;
        writeln!(text, "eps={} MC p_hat={:.6e} ci95=[{:.6e}, {:.6e}] ({} trials)", row.epsilon, mc.p_hat, mc.ci95[0], mc.ci95[1], mc.trials).unwrap();
        for a in &row.analytic {
            writeln!(text, "    analytic[{}] = {:.6e}  z={:+.2}  {}", a.base, a.float_value, a.z_score, a.verdict).unwrap();
        }
    }
    ctx.out.push_str(&text);
    let path = ctx.path(&args.out, "reconcile.json")?;
    report::write_json(&path, &report)?;
    ctx.artifacts.push(path);
    Ok(())
}
