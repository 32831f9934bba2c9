//! The `srm` command line.
//!
//! Options may also come from a flat `key=value` file given with `--config`;
//! keys are the long flag names without dashes and flags on the command line
//! take precedence. Exit status is 0 on success, 1 when `check` finds a failing
//! property, and 2 on any usage or validation error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::distributions::{read_losses, LossDistribution};
use crate::engine::tables::{figure_data, linspace, logspace, make_table, FigureData, Table};
use crate::engine::{self, checks, RiskMeasureResult};
use crate::error::SrmError;
use crate::quadrature::{QuadratureScheme, Rule, DEFAULT_EXACT_INTERVALS, TABLE_INTERVALS};
use crate::spectra::{RiskSpectrum, SpectrumFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const THREADS_ENV: &str = "SRM_NUM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "srm",
    version,
    about = "Spectral risk measures: compute, sweep, and regenerate tables"
)]
pub struct Cli {
    /// Flat key=value file supplying defaults for any long option.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one risk measure for an analytic distribution.
    Compute {
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate table 1, 2 or 3.
    Table {
        #[arg(long)]
        id: Option<u8>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate the data behind figure 1 to 6.
    Figure {
        #[arg(long)]
        id: Option<u8>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// SRM as a function of the spectrum parameter.
    Sweep {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// Explicit comma-separated parameter values.
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<f64>>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Space the --from/--to grid logarithmically.
        #[arg(long)]
        log: bool,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every property, limit and shape check and print one verdict per line.
    Check {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Risk measure of a loss sample read from a file (one loss per line).
    Empirical {
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Normal,
    Cauchy,
    Uniform,
    Beta,
    Gumbel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumArg {
    Exp,
    PowerLow,
    PowerHigh,
    Es,
    Var,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Exp,
    PowerLow,
    PowerHigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Repro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Trapezoid,
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Tsv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    /// Three decimals for SRM values, six significant digits for data series.
    Default,
    /// Shortest representation that round-trips.
    Full,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub dist: Option<DistArg>,
    #[arg(long = "beta-a")]
    pub beta_a: Option<f64>,
    #[arg(long = "beta-b")]
    pub beta_b: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub spectrum: Option<SpectrumArg>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    /// Number of intervals.
    #[arg(long)]
    pub n: Option<usize>,
    /// Probability mass trimmed from the top in repro mode.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Probability mass trimmed from the bottom in repro mode (defaults to --h).
    #[arg(long = "h-bottom", allow_negative_numbers = true)]
    pub h_bottom: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum)]
    pub precision: Option<Precision>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// A usage or validation failure; always exit status 2.
#[derive(Debug)]
struct CliError(String);

impl From<SrmError> for CliError {
    fn from(e: SrmError) -> Self {
        match e {
            SrmError::Domain { name, .. } => CliError(format!("invalid --{name}: {e}")),
            other => CliError(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn missing(key: &str, context: &str) -> CliError {
    CliError(format!("missing --{key} ({context})"))
}

/// Parses arguments, merges the config file, runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse_with_config(argv) {
        Ok(Ok(cli)) => cli,
        Ok(Err(clap_err)) => {
            let code = if clap_err.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            };
            let rendered = clap_err.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { stdout } else { stderr };
            let _ = write!(sink, "{rendered}");
            return code;
        }
        Err(CliError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    if let Err(CliError(msg)) = configure_threads() {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    match execute(cli.command) {
        Ok((text, out, code)) => match emit(&text, out.as_deref(), stdout) {
            Ok(()) => code,
            Err(CliError(msg)) => {
                let _ = writeln!(stderr, "error: {msg}");
                EXIT_USAGE
            }
        },
        Err(CliError(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn parse_with_config(argv: Vec<OsString>) -> CliResult<Result<Cli, clap::Error>> {
    let matches = match Cli::command().try_get_matches_from(argv.clone()) {
        Ok(m) => m,
        Err(e) => return Ok(Err(e)),
    };
    let Some(path) = matches.get_one::<PathBuf>("config").cloned() else {
        return Ok(Cli::from_arg_matches(&matches));
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError(format!("cannot read --config file {}: {e}", path.display())))?;
    let (sub_name, sub_matches) = matches
        .subcommand()
        .expect("subcommand is required by the parser");
    let cmd = Cli::command();
    let sub_cmd = cmd
        .find_subcommand(sub_name)
        .expect("matched subcommand exists");

    let mut merged = argv;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError(format!(
                "--config line {}: expected key=value, got '{line}'",
                lineno + 1
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        let arg = sub_cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key) && a.get_id() != "config")
            .ok_or_else(|| {
                CliError(format!(
                    "--config line {}: unknown key '{key}' for command '{sub_name}'",
                    lineno + 1
                ))
            })?;
        let id = arg.get_id().as_str();
        if sub_matches.value_source(id) == Some(ValueSource::CommandLine) {
            continue;
        }
        if arg.get_action().takes_values() {
            merged.push(format!("--{key}").into());
            merged.push(value.into());
        } else if matches!(value, "true" | "1" | "yes") {
            merged.push(format!("--{key}").into());
        } else if !matches!(value, "false" | "0" | "no") {
            return Err(CliError(format!(
                "--config line {}: '{key}' expects true or false, got '{value}'",
                lineno + 1
            )));
        }
    }
    Ok(Cli::try_parse_from(merged))
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError(format!(
            "{THREADS_ENV} must be a nonnegative integer, got '{raw}'"
        ))
    })?;
    if n > 0 {
        // Fails only if a pool already exists (repeated in-process runs); keep it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError(format!("cannot write to stdout: {e}"))),
        Some(path) => write_atomic(path, text),
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let fail = |e: std::io::Error| CliError(format!("cannot write --out {}: {e}", path.display()));
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError(format!("--out {} is not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, text).map_err(fail)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        fail(e)
    })
}

type Outcome = (String, Option<PathBuf>, i32);

fn execute(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Compute {
            dist,
            spectrum,
            scheme,
            output,
        } => {
            let d = build_distribution(&dist)?;
            let s = build_spectrum(&spectrum)?;
            let sch = build_scheme(&scheme)?;
            let result = evaluate(&d, &s, &sch)?;
            let fmt = Formatter::new(&output);
            Ok((fmt.single(&d.name(), &result, &sch), output.out, EXIT_OK))
        }
        Command::Empirical {
            input,
            spectrum,
            scheme,
            output,
        } => {
            let path = input.ok_or_else(|| missing("input", "path to a loss file"))?;
            let s = build_spectrum(&spectrum)?;
            let sch = build_scheme(&scheme)?;
            let d = read_losses(&path)?;
            let result = evaluate(&d, &s, &sch)?;
            let fmt = Formatter::new(&output);
            Ok((fmt.empirical(&d, &result), output.out, EXIT_OK))
        }
        Command::Table { id, output } => {
            let id = id.ok_or_else(|| missing("id", "table 1, 2 or 3"))?;
            if !(1..=3).contains(&id) {
                return Err(CliError(format!(
                    "invalid --id: no table {id}; expected 1, 2 or 3"
                )));
            }
            let table = make_table(id)?;
            Ok((Formatter::new(&output).table(&table), output.out, EXIT_OK))
        }
        Command::Figure { id, output } => {
            let id = id.ok_or_else(|| missing("id", "figure 1 to 6"))?;
            if !(1..=6).contains(&id) {
                return Err(CliError(format!(
                    "invalid --id: no figure {id}; expected 1 to 6"
                )));
            }
            let fig = figure_data(id)?;
            Ok((Formatter::new(&output).figure(&fig), output.out, EXIT_OK))
        }
        Command::Sweep {
            dist,
            family,
            params,
            from,
            to,
            points,
            log,
            scheme,
            output,
        } => {
            let d = build_distribution(&dist)?;
            let family =
                match family.ok_or_else(|| missing("family", "exp, power-low or power-high"))? {
                    FamilyArg::Exp => SpectrumFamily::Exponential,
                    FamilyArg::PowerLow => SpectrumFamily::PowerLow,
                    FamilyArg::PowerHigh => SpectrumFamily::PowerHigh,
                };
            let grid = match (params, from, to) {
                (Some(p), None, None) => p,
                (None, Some(lo), Some(hi)) => {
                    let n = points.unwrap_or(20);
                    if n < 2 {
                        return Err(CliError(format!(
                            "invalid --points: need at least 2, got {n}"
                        )));
                    }
                    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
                        return Err(CliError(format!("invalid --to: must exceed --from ({lo})")));
                    }
                    if log {
                        if lo.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                            return Err(CliError(
                                "invalid --from: --log needs a positive start".into(),
                            ));
                        }
                        logspace(lo, hi, n)
                    } else {
                        linspace(lo, hi, n)
                    }
                }
                _ => {
                    return Err(CliError(
                        "give either --params or both --from and --to".into(),
                    ))
                }
            };
            let sch = build_scheme(&scheme)?;
            let curve = engine::sweep(&d, family, &grid, &sch)?;
            let fmt = Formatter::new(&output);
            Ok((fmt.sweep(&curve), output.out, EXIT_OK))
        }
        Command::Check { output } => {
            let outcomes = checks::run_all();
            let mut text = String::new();
            for o in &outcomes {
                let verdict = if o.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(text, "{verdict}  {}: {}", o.name, o.detail);
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            let _ = writeln!(text, "{} checks, {failed} failed", outcomes.len());
            let code = if failed == 0 {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            Ok((text, output.out, code))
        }
    }
}

fn evaluate(
    d: &LossDistribution,
    s: &RiskSpectrum,
    sch: &QuadratureScheme,
) -> CliResult<RiskMeasureResult> {
    Ok(match s.kind() {
        crate::spectra::SpectrumKind::VarDirac { alpha } => engine::var(d, alpha)?,
        _ => engine::srm(d, s, sch)?,
    })
}

fn build_distribution(args: &DistArgs) -> CliResult<LossDistribution> {
    let dist = args
        .dist
        .ok_or_else(|| missing("dist", "normal, cauchy, uniform, beta or gumbel"))?;
    if dist != DistArg::Beta && (args.beta_a.is_some() || args.beta_b.is_some()) {
        return Err(CliError(
            "--beta-a/--beta-b only apply to --dist beta".into(),
        ));
    }
    Ok(match dist {
        DistArg::Normal => LossDistribution::standard_normal(),
        DistArg::Cauchy => LossDistribution::cauchy(),
        DistArg::Uniform => LossDistribution::standard_uniform(),
        DistArg::Gumbel => LossDistribution::gumbel_min(),
        DistArg::Beta => {
            let a = args.beta_a.unwrap_or(2.0);
            let b = args.beta_b.unwrap_or(4.0);
            LossDistribution::beta(a, b).map_err(|e| match e {
                SrmError::Domain { name: "alpha", .. } => {
                    CliError(format!("invalid --beta-a: {e}"))
                }
                SrmError::Domain { name: "beta", .. } => CliError(format!("invalid --beta-b: {e}")),
                other => other.into(),
            })?
        }
    })
}

fn build_spectrum(args: &SpectrumArgs) -> CliResult<RiskSpectrum> {
    let kind = args
        .spectrum
        .ok_or_else(|| missing("spectrum", "exp, power-low, power-high, es or var"))?;
    let need =
        |v: Option<f64>, key: &str| v.ok_or_else(|| missing(key, "required by this spectrum"));
    let extra = |v: Option<f64>, key: &str| -> CliResult<()> {
        match v {
            Some(_) => Err(CliError(format!("--{key} does not apply to this spectrum"))),
            None => Ok(()),
        }
    };
    let s = match kind {
        SpectrumArg::Exp => {
            extra(args.gamma, "gamma")?;
            extra(args.alpha, "alpha")?;
            RiskSpectrum::exponential(need(args.k, "k")?)?
        }
        SpectrumArg::PowerLow | SpectrumArg::PowerHigh => {
            extra(args.k, "k")?;
            extra(args.alpha, "alpha")?;
            let g = need(args.gamma, "gamma")?;
            if kind == SpectrumArg::PowerLow {
                RiskSpectrum::power_low(g)?
            } else {
                RiskSpectrum::power_high(g)?
            }
        }
        SpectrumArg::Es => {
            extra(args.k, "k")?;
            extra(args.gamma, "gamma")?;
            RiskSpectrum::expected_shortfall(need(args.alpha, "alpha")?)?
        }
        SpectrumArg::Var => {
            extra(args.k, "k")?;
            extra(args.gamma, "gamma")?;
            RiskSpectrum::var(need(args.alpha, "alpha")?)?
        }
    };
    Ok(s)
}

fn build_scheme(args: &SchemeArgs) -> CliResult<QuadratureScheme> {
    let rule = match args.rule {
        Some(RuleArg::Simpson) => Rule::Simpson,
        Some(RuleArg::Trapezoid) | None => Rule::Trapezoid,
    };
    let scheme = match args.mode.unwrap_or(ModeArg::Exact) {
        ModeArg::Exact => {
            for (v, key) in [(args.h, "h"), (args.h_bottom, "h-bottom")] {
                if v.is_some() {
                    return Err(CliError(format!("--{key} only applies to --mode repro")));
                }
            }
            let mut s = QuadratureScheme::exact_slice(args.n.unwrap_or(DEFAULT_EXACT_INTERVALS));
            s.rule = rule;
            s
        }
        ModeArg::Repro => {
            let mut s = QuadratureScheme::repro_grid(rule, args.n.unwrap_or(TABLE_INTERVALS));
            if let Some(h) = args.h {
                s = s.with_top_truncation(h).with_bottom_truncation(h);
            }
            if let Some(hb) = args.h_bottom {
                s = s.with_bottom_truncation(hb);
            }
            s
        }
    };
    if scheme.intervals == 0 {
        return Err(CliError("invalid --n: must be positive".into()));
    }
    if scheme.rule == Rule::Simpson
        && scheme.mode == crate::quadrature::Mode::ReproGrid
        && !scheme.intervals.is_multiple_of(2)
    {
        return Err(CliError(format!(
            "invalid --n: Simpson's rule needs an even interval count, got {}",
            scheme.intervals
        )));
    }
    if let Some(h) = args.h {
        if !(h > 0.0 && h < 0.5) {
            return Err(CliError(format!(
                "invalid --h: must lie in (0, 0.5), got {h}"
            )));
        }
    }
    if let Some(h) = args.h_bottom {
        if !(0.0..0.5).contains(&h) {
            return Err(CliError(format!(
                "invalid --h-bottom: must lie in [0, 0.5), got {h}"
            )));
        }
    }
    scheme.validate()?;
    Ok(scheme)
}

/// Renders results; all number formatting is locale-free.
struct Formatter {
    format: Format,
    precision: Precision,
}

const HEAVY_TAIL_NOTE: &str = "# heavy-tail: grid-sensitive";

impl Formatter {
    fn new(args: &OutputArgs) -> Self {
        Self {
            format: args.format.unwrap_or(Format::Csv),
            precision: args.precision.unwrap_or(Precision::Default),
        }
    }

    /// SRM value: three decimals unless full precision was requested.
    fn value(&self, x: f64) -> String {
        match self.precision {
            Precision::Default => format!("{x:.3}"),
            Precision::Full => format_full(x),
        }
    }

    /// Data-series value: six significant digits unless full precision was requested.
    fn series(&self, x: f64) -> String {
        match self.precision {
            Precision::Default => format_sig(x, 6),
            Precision::Full => format_full(x),
        }
    }

    /// One record in the selected delimited format; pretty mode joins with spaces.
    fn row(&self, fields: &[String]) -> String {
        let delimiter = match self.format {
            Format::Pretty => return format!("{}\n", fields.join(" ")),
            Format::Csv => b',',
            Format::Tsv => b'\t',
        };
        let mut w = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(fields)
            .expect("writing to memory cannot fail");
        let bytes = w.into_inner().expect("writing to memory cannot fail");
        String::from_utf8(bytes).expect("fields are UTF-8")
    }

    fn single(&self, dist: &str, r: &RiskMeasureResult, scheme: &QuadratureScheme) -> String {
        let scheme_label = match r.diagnostics {
            engine::Diagnostics::Exact => "exact".to_string(),
            engine::Diagnostics::Quadrature(_) => scheme.to_string(),
        };
        let mass = r.diagnostics.captured_mass();
        match self.format {
            Format::Pretty => {
                let mut out = String::new();
                let _ = writeln!(out, "distribution   {dist}");
                let _ = writeln!(out, "spectrum       {}", r.spectrum);
                let _ = writeln!(out, "scheme         {scheme_label}");
                let _ = writeln!(out, "value          {}", self.value(r.value));
                let _ = writeln!(out, "captured mass  {}", format_sig(mass, 6));
                for w in &r.warnings {
                    let _ = writeln!(out, "warning        {w}");
                }
                out
            }
            _ => {
                let mut out = self.row(&[
                    "distribution".into(),
                    "spectrum".into(),
                    "scheme".into(),
                    "value".into(),
                    "captured_mass".into(),
                ]);
                out += &self.row(&[
                    dist.to_string(),
                    r.spectrum.to_string(),
                    scheme_label,
                    self.value(r.value),
                    format_sig(mass, 6),
                ]);
                out
            }
        }
    }

    fn empirical(&self, d: &LossDistribution, r: &RiskMeasureResult) -> String {
        let n = match d.family() {
            crate::distributions::Family::Empirical(xs) => xs.len(),
            _ => 0,
        };
        let mass = r.diagnostics.captured_mass();
        match self.format {
            Format::Pretty => {
                let mut out = String::new();
                let _ = writeln!(out, "sample size    {n}");
                let _ = writeln!(out, "spectrum       {}", r.spectrum);
                let _ = writeln!(out, "value          {}", self.value(r.value));
                let _ = writeln!(out, "captured mass  {}", format_sig(mass, 6));
                for w in &r.warnings {
                    let _ = writeln!(out, "warning        {w}");
                }
                out
            }
            _ => {
                let mut out = self.row(&[
                    "sample_size".into(),
                    "spectrum".into(),
                    "value".into(),
                    "captured_mass".into(),
                ]);
                out += &self.row(&[
                    n.to_string(),
                    r.spectrum.to_string(),
                    self.value(r.value),
                    format_sig(mass, 6),
                ]);
                out
            }
        }
    }

    fn table(&self, t: &Table) -> String {
        let heavy_col = t.columns.iter().position(|c| *c == "cauchy");
        match self.format {
            Format::Pretty => {
                let mut out = String::new();
                let _ = writeln!(out, "Table {}: {}", t.id, t.title);
                let _ = writeln!(out, "scheme: {}", t.scheme);
                let mut header = format!("{:>8}", t.parameter_name);
                for c in &t.columns {
                    let _ = write!(header, " {c:>12}");
                }
                let _ = writeln!(out, "{header}");
                for row in &t.rows {
                    let mut line = format!("{:>8}", row.label);
                    for cell in &row.cells {
                        let _ = write!(line, " {:>12}", self.value(cell.value));
                    }
                    if let Some(i) = heavy_col {
                        let _ = write!(line, "  {HEAVY_TAIL_NOTE} ({})", t.columns[i]);
                    }
                    let _ = writeln!(out, "{line}");
                }
                let low_mass: Vec<&str> = t
                    .rows
                    .iter()
                    .filter(|r| {
                        r.cells
                            .iter()
                            .any(|c| c.diagnostics.captured_mass() < engine::LOW_MASS_THRESHOLD)
                    })
                    .map(|r| r.label.as_str())
                    .collect();
                if !low_mass.is_empty() {
                    let _ = writeln!(
                        out,
                        "note: rows {} lose spectrum weight to the truncated grid",
                        low_mass.join(", ")
                    );
                }
                out
            }
            _ => {
                let mut header = vec![t.parameter_name.to_string()];
                header.extend(t.columns.iter().map(|c| c.to_string()));
                let mut out = self.row(&header);
                for row in &t.rows {
                    let mut fields = vec![row.label.clone()];
                    fields.extend(row.cells.iter().map(|c| self.value(c.value)));
                    out += &self.row(&fields);
                }
                out
            }
        }
    }

    fn figure(&self, f: &FigureData) -> String {
        let mut header = vec![f.abscissa.to_string()];
        header.extend(f.series.iter().cloned());
        let mut out = String::new();
        if self.format == Format::Pretty {
            let _ = writeln!(out, "Figure {} data", f.id);
            let _ = writeln!(
                out,
                "{}",
                header
                    .iter()
                    .map(|h| format!("{h:>14}"))
                    .collect::<String>()
            );
            for (x, ys) in &f.rows {
                let mut line = format!("{:>14}", self.series(*x));
                for y in ys {
                    let _ = write!(line, "{:>14}", self.series(*y));
                }
                let _ = writeln!(out, "{line}");
            }
            return out;
        }
        out += &self.row(&header);
        for (x, ys) in &f.rows {
            let mut fields = vec![self.series(*x)];
            fields.extend(ys.iter().map(|y| self.series(*y)));
            out += &self.row(&fields);
        }
        out
    }

    fn sweep(&self, c: &engine::SweepCurve) -> String {
        let mut out = String::new();
        if self.format == Format::Pretty {
            let _ = writeln!(out, "scheme: {}", c.scheme);
            let _ = writeln!(out, "{:>14}{:>14}", c.parameter_name(), "srm");
            for (x, y) in &c.points {
                let _ = writeln!(out, "{:>14}{:>14}", self.series(*x), self.series(*y));
            }
            return out;
        }
        out += &self.row(&[c.parameter_name().to_string(), "srm".into()]);
        for (x, y) in &c.points {
            out += &self.row(&[self.series(*x), self.series(*y)]);
        }
        out
    }
}

fn format_full(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        format_nonfinite(x)
    }
}

fn format_nonfinite(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// `x` rounded to `digits` significant digits, in plain decimal notation where
/// that stays readable and scientific notation otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format_nonfinite(x);
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        return format!("{:.*e}", digits.saturating_sub(1), x);
    }
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding may carry into a new digit (9.999995 -> 10.00000); trim keeps it tidy.
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}
