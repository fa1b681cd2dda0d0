//! Command-line front end for the `cylwig` phase-space toolkit.

pub mod check;
pub mod config;
pub mod expr;
pub mod spec;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cylwig::basis::{BandedOperator, WaveFunction};
use cylwig::dynamics::{self, PotentialForm, ResidualReport, Schrodinger};
use cylwig::field::ShiftedSincField;
use cylwig::star::{star, star_anticommutator, star_commutator};
use cylwig::weyl::{weyl_quantize, weyl_symbol, WeylSymbol};
use serde_json::json;

use config::{FileConfig, Overrides, Settings};
use expr::{parse_symbol, SymbolExpression};
use spec::{parse_grid, State, StateSpec};

/// Environment variable that sets the worker-thread count.
pub const THREADS_ENV: &str = "CYLWIG_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or input files; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// A computation or check failed; exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(format!("i/o error: {e}"))
    }
}

fn failure(e: cylwig::Error) -> CliError {
    CliError::Failure(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "cylwig", version, about = "Wigner functions, Weyl symbols and pendulum dynamics on the cylinder")]
pub struct Cli {
    /// Configuration file with `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct ModelArgs {
    /// Reduced Planck constant.
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Basis cutoff: modes −n_max..=n_max.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Kinetic prefactor γ = 1/(2 m r₀²).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Pendulum amplitude A in U(θ) = −A cos θ.
    #[arg(long)]
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues of the pendulum Hamiltonian.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of eigenvalues to print.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
    /// Wigner (or Moyal) function on a grid.
    Wigner {
        #[command(flatten)]
        model: ModelArgs,
        /// basis:m | super:m,n,… | gauss:c,w | json:PATH | thermal:β | density:PATH
        #[arg(long)]
        state: StateSpec,
        /// Second pure state ψ₂ for the Moyal function V_{ψ₂ψ₁} (ψ₁ is --state).
        #[arg(long)]
        state2: Option<StateSpec>,
        /// Grid as t=N,p=a:b:M.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
        format: DataFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Schrödinger trajectory as JSON lines, optionally with a Liouville residual report.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        state: StateSpec,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write the Liouville residual report (JSON) to this file.
        #[arg(long)]
        liouville_residual: Option<PathBuf>,
        /// Use the ħ-series form with this many correction terms instead of exact shifts.
        #[arg(long)]
        n_series: Option<usize>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Weyl quantization and symbol extraction.
    Weyl {
        #[command(subcommand)]
        action: WeylAction,
    },
    /// Star product of two symbols.
    Star {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
        #[arg(long)]
        hbar: Option<f64>,
        /// Print A⋆B − B⋆A.
        #[arg(long, conflicts_with = "anticommutator")]
        commutator: bool,
        /// Print A⋆B + B⋆A.
        #[arg(long)]
        anticommutator: bool,
    },
    /// Run an invariant suite; exits 1 if any check fails.
    Check {
        #[arg(long, value_enum, default_value_t = check::Suite::All)]
        suite: check::Suite,
        /// Multiplies every tolerance.
        #[arg(long)]
        tolerance_scale: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum WeylAction {
    /// Symbol text → banded-operator JSON.
    Quantize {
        #[arg(allow_hyphen_values = true)]
        symbol: String,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Banded-operator JSON → symbol text.
    Dequantize {
        input: PathBuf,
        #[arg(long)]
        hbar: Option<f64>,
    },
}

fn overrides(model: &ModelArgs) -> Overrides {
    Overrides { hbar: model.hbar, n_max: model.n_max, gamma: model.gamma, amplitude: model.amplitude, ..Default::default() }
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn open_output<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

fn parse_expr(text: &str) -> Result<SymbolExpression, CliError> {
    parse_symbol(text).map_err(|e| CliError::Usage(format!("cannot parse '{text}': {e}")))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn spectrum(settings: &Settings, count: usize, format: TableFormat, out: &mut dyn Write) -> Result<(), CliError> {
    let model = settings.model()?;
    let sys = dynamics::eigensystem(&model, settings.n_max).map_err(failure)?;
    let count = count.min(sys.len());
    let values = &sys.eigenvalues()[..count];
    match format {
        TableFormat::Text => {
            writeln!(out, "# j energy (gamma={}, A={}, hbar={}, n_max={})", settings.gamma, settings.amplitude, settings.hbar, settings.n_max)?;
            for (j, e) in values.iter().enumerate() {
                writeln!(out, "{j} {}", sci(*e))?;
            }
        }
        TableFormat::Csv => {
            writeln!(out, "j,energy")?;
            for (j, e) in values.iter().enumerate() {
                writeln!(out, "{j},{}", sci(*e))?;
            }
        }
        TableFormat::Json => {
            let doc = json!({
                "hbar": settings.hbar,
                "gamma": settings.gamma,
                "amplitude": settings.amplitude,
                "n_max": settings.n_max,
                "eigenvalues": values,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).map_err(|e| CliError::Failure(e.to_string()))?)?;
        }
    }
    Ok(())
}

fn pure(state: State, what: &str) -> Result<WaveFunction, CliError> {
    match state {
        State::Pure(psi) => Ok(psi),
        State::Mixed(_) => Err(CliError::Usage(format!("{what} needs a pure state"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn wigner(
    settings: &Settings,
    state: &StateSpec,
    state2: &Option<StateSpec>,
    format: DataFormat,
    output: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let grid = parse_grid(&settings.grid)?;
    let model = settings.model()?;
    let (field, complex) = match state2 {
        Some(s2) => {
            let psi1 = pure(state.resolve(settings.n_max, &model)?, "a Moyal function")?;
            let psi2 = pure(s2.resolve(settings.n_max, &model)?, "a Moyal function")?;
            (ShiftedSincField::moyal(&psi2, &psi1), true)
        }
        None => match state.resolve(settings.n_max, &model)? {
            State::Pure(psi) => (ShiftedSincField::wigner(&psi), false),
            State::Mixed(rho) => (rho.field(), false),
        },
    };
    let values = field.evaluate_grid(&grid, 0, 0);
    let mut out = open_output(output, stdout)?;
    match format {
        DataFormat::Csv => {
            writeln!(out, "{}", if complex { "theta,pbar,value_re,value_im" } else { "theta,pbar,value" })?;
            for (pt, v) in grid.points().zip(&values) {
                if complex {
                    writeln!(out, "{},{},{},{}", sci(pt.theta), sci(pt.pbar), sci(v.re), sci(v.im))?;
                } else {
                    writeln!(out, "{},{},{}", sci(pt.theta), sci(pt.pbar), sci(v.re))?;
                }
            }
        }
        DataFormat::Json => {
            let n_p = grid.n_pbar();
            let rows: Vec<serde_json::Value> = values
                .chunks(n_p)
                .map(|row| {
                    if complex {
                        json!(row.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>())
                    } else {
                        json!(row.iter().map(|v| v.re).collect::<Vec<_>>())
                    }
                })
                .collect();
            let doc = json!({
                "grid": grid.describe(),
                "complex": complex,
                "theta": grid.thetas(),
                "pbar": grid.pbars(),
                "values": rows,
            });
            writeln!(out, "{}", serde_json::to_string(&doc).map_err(|e| CliError::Failure(e.to_string()))?)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn coeff_pairs(psi: &WaveFunction) -> Vec<[f64; 2]> {
    psi.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

#[allow(clippy::too_many_arguments)]
fn evolve(
    settings: &Settings,
    state: &StateSpec,
    t_max: f64,
    steps: usize,
    output: &Option<PathBuf>,
    report_path: &Option<PathBuf>,
    n_series: Option<usize>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    if steps == 0 || !t_max.is_finite() {
        return Err(CliError::Usage("evolve needs steps ≥ 1 and a finite --t-max".into()));
    }
    let model = settings.model()?;
    let psi0 = pure(state.resolve(settings.n_max, &model)?, "evolve")?;
    let flow = Schrodinger::new(&model, psi0.n_max()).map_err(failure)?;
    let form = n_series.map_or(PotentialForm::Shift, PotentialForm::Series);
    let grid = match report_path {
        Some(_) => Some(parse_grid(&settings.grid)?),
        None => None,
    };
    let mut out = open_output(output, stdout)?;
    let mut reports: Vec<(f64, ResidualReport)> = Vec::new();
    for step in 0..=steps {
        let t = t_max * step as f64 / steps as f64;
        let psi = flow.evolve(&psi0, t).map_err(failure)?;
        let record = json!({ "t": t, "coeffs": coeff_pairs(&psi) });
        writeln!(out, "{}", serde_json::to_string(&record).map_err(|e| CliError::Failure(e.to_string()))?)?;
        if let Some(grid) = &grid {
            let dot = flow.time_derivative(&psi);
            let rate = ShiftedSincField::moyal(&dot, &psi).add(&ShiftedSincField::moyal(&psi, &dot));
            reports.push((t, dynamics::liouville_residual(&ShiftedSincField::wigner(&psi), &rate, &model, grid, form)));
        }
    }
    out.flush()?;
    if let (Some(path), Some(grid)) = (report_path, grid) {
        let max_abs = reports.iter().map(|(_, r)| r.max_abs).fold(0.0, f64::max);
        let mean_abs = reports.iter().map(|(_, r)| r.mean_abs).sum::<f64>() / reports.len() as f64;
        let mut terms = std::collections::BTreeMap::new();
        for (_, r) in &reports {
            for (k, v) in &r.terms {
                let e = terms.entry(k.clone()).or_insert(0.0f64);
                *e = e.max(*v);
            }
        }
        let doc = json!({
            "grid": grid.describe(),
            "form": form.label(),
            "max_abs": max_abs,
            "mean_abs": mean_abs,
            "terms": terms,
            "steps": reports.iter().map(|(t, r)| json!({"t": t, "max_abs": r.max_abs, "mean_abs": r.mean_abs})).collect::<Vec<_>>(),
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Failure(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn weyl(action: &WeylAction, file: &FileConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    match action {
        WeylAction::Quantize { symbol, n_max, hbar, output } => {
            let settings = Settings::resolve(&Overrides { hbar: *hbar, n_max: *n_max, ..Default::default() }, file)?;
            let sym = parse_expr(symbol)?.to_symbol();
            let op = weyl_quantize(&sym, settings.n_max, settings.hbar).map_err(failure)?;
            let text = serde_json::to_string_pretty(&op).map_err(|e| CliError::Failure(e.to_string()))?;
            let mut out = open_output(output, stdout)?;
            writeln!(out, "{text}")?;
            out.flush()?;
        }
        WeylAction::Dequantize { input, hbar } => {
            let settings = Settings::resolve(&Overrides { hbar: *hbar, ..Default::default() }, file)?;
            let text = std::fs::read_to_string(input)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
            let op: BandedOperator = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid operator {}: {e}", input.display())))?;
            match weyl_symbol(&op, settings.hbar).map_err(failure)? {
                WeylSymbol::Exact(sym) => writeln!(stdout, "{}", SymbolExpression::from_symbol(&sym))?,
                WeylSymbol::Numeric(_) => {
                    return Err(CliError::Failure(
                        "operator bands are not polynomial in the mode index; no closed-form symbol".into(),
                    ))
                }
            }
        }
    }
    Ok(())
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Spectrum { model, count, format } => {
            let settings = Settings::resolve(&overrides(&model), &file)?;
            spectrum(&settings, count, format, stdout)
        }
        Command::Wigner { model, state, state2, grid, format, output } => {
            let settings = Settings::resolve(&Overrides { grid, ..overrides(&model) }, &file)?;
            wigner(&settings, &state, &state2, format, &output, stdout)
        }
        Command::Evolve { model, state, t_max, steps, output, liouville_residual, n_series, grid } => {
            let settings = Settings::resolve(&Overrides { grid, ..overrides(&model) }, &file)?;
            evolve(&settings, &state, t_max, steps, &output, &liouville_residual, n_series, stdout)
        }
        Command::Weyl { action } => weyl(&action, &file, stdout),
        Command::Star { left, right, hbar, commutator, anticommutator } => {
            let settings = Settings::resolve(&Overrides { hbar, ..Default::default() }, &file)?;
            let a = parse_expr(&left)?.to_symbol();
            let b = parse_expr(&right)?.to_symbol();
            let product = if commutator {
                star_commutator(&a, &b, settings.hbar)
            } else if anticommutator {
                star_anticommutator(&a, &b, settings.hbar)
            } else {
                star(&a, &b, settings.hbar)
            };
            writeln!(stdout, "{}", SymbolExpression::from_symbol(&product))?;
            Ok(())
        }
        Command::Check { suite, tolerance_scale } => {
            let settings = Settings::resolve(&Overrides { tolerance_scale, ..Default::default() }, &file)?;
            let results = check::run_suite(suite, settings.tolerance_scale);
            let failed = results.iter().filter(|r| !r.pass).count();
            for r in &results {
                writeln!(stdout, "{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail)?;
            }
            writeln!(stdout, "{} checks, {} failed", results.len(), failed)?;
            if failed > 0 {
                writeln!(stderr, "check: {failed} invariant(s) failed")?;
                return Err(CliError::Failure(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
    }
}

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run_with_io<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the CLI on the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run_with_io(args, &mut out, &mut err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["cylwig"];
        argv.extend_from_slice(args);
        let code = run_with_io(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn star_example() {
        let (code, out, _) = run_capture(&["star", "p", "cos(t)"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "p*cos(t) + (0,0.5)*sin(t)");
        let (_, out, _) = run_capture(&["star", "--commutator", "p", "cos(t)"]);
        assert_eq!(out.trim(), "(0,1)*sin(t)");
        let (_, out, _) = run_capture(&["star", "--anticommutator", "-p", "cos(t)"]);
        assert_eq!(out.trim(), "-2*p*cos(t)");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_capture(&["star", "p +", "cos(t)"]).0, 2);
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["wigner", "--state", "basis:99", "--n-max", "2"]).0, 2);
        assert_eq!(run_capture(&["spectrum", "--hbar", "-1"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn spectrum_of_free_rotor() {
        let (code, out, _) = run_capture(&["spectrum", "--amplitude", "0", "--n-max", "3", "--count", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "j,energy");
        let e: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        assert!(e[0].abs() < 1e-15 && (e[1] - 0.5).abs() < 1e-14 && (e[2] - 0.5).abs() < 1e-14);
    }
}
