//! Command-line and config-file parsing into a [`RunConfig`].
//!
//! Precedence: flags, then the `--config` file, then built-in defaults. The
//! defaults are the ten-qubit setting: η = 10, Ω₁ = 2π × 4.9 kHz, marked
//! state `0011000000` (|e1 i2 g3 g4 i5 … i10⟩).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use cavity_grover::gate::BasisState;
use cavity_grover::lab;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

pub const DEFAULT_N: usize = 10;
pub const DEFAULT_ETA: f64 = 10.0;
pub const DEFAULT_OMEGA1_KHZ: f64 = 4.9;
pub const DEFAULT_MARKED: &str = "0011000000";
/// Mode wavelength of a ~51 GHz microwave cavity, meters.
pub const DEFAULT_LAMBDA0: f64 = 5.87e-3;
const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "cavity-grover",
    version,
    about = "Grover search with dissipative cavity-QED phase gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Gate fidelity and success probability over an (eta, mu) grid
    GateQuality(Flags),
    /// Search probability versus iteration count, one curve per mu
    Search(Flags),
    /// Infidelity when atom 1 stays delta-t longer in the cavity
    VelocityError(Flags),
    /// Gate time, total search time and decay time scales
    Timing(Flags),
    /// Atom tracks across the cavity standing wave
    Trajectory(Flags),
    /// Closed-form amplitudes against the RK4 integrator
    Verify(Flags),
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// Number of qubits
    #[arg(long)]
    n: Option<String>,
    /// Coupling ratio Omega/Omega1: value, list `a,b,c` or range `start:stop:step`
    #[arg(long)]
    eta: Option<String>,
    /// Decay ratio kappa/Omega1: value, list or range
    #[arg(long)]
    mu: Option<String>,
    /// Omega1 / 2pi in kHz
    #[arg(long = "omega1-khz")]
    omega1_khz: Option<String>,
    /// Marked state as a bitstring, qubit 1 first
    #[arg(long)]
    marked: Option<String>,
    /// Largest iteration count in search traces
    #[arg(long)]
    kmax: Option<String>,
    /// Extra dwell time of atom 1 in microseconds: value, list or range
    #[arg(long = "delta-t-us")]
    delta_t_us: Option<String>,
    /// Grover iterations for the timing budget (default: optimum of the noisy search)
    #[arg(long)]
    iterations: Option<String>,
    /// Cavity mode wavelength in meters
    #[arg(long)]
    lambda0: Option<String>,
    /// Phase gate used by the search
    #[arg(long)]
    gate: Option<String>,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long)]
    format: Option<String>,
    /// Flat key=value file with defaults for any of the flags above
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    GateQuality,
    Search,
    VelocityError,
    Timing,
    Trajectory,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateKind {
    Ideal,
    Noisy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    /// Ω₁ in rad/s.
    pub omega1: f64,
    pub eta: Vec<f64>,
    pub mu: Vec<f64>,
    pub marked: BasisState,
    pub k_max: usize,
    /// Delays in seconds.
    pub delta_t: Vec<f64>,
    pub iterations: Option<usize>,
    pub lambda0: f64,
    pub gate: GateKind,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// The single coupling ratio of commands that do not sweep η.
    pub fn single_eta(&self) -> Result<f64, CliError> {
        match self.eta.as_slice() {
            [eta] => Ok(*eta),
            _ => Err(CliError::Usage(
                "this subcommand takes a single --eta value".into(),
            )),
        }
    }
}

/// Result of reading argv: either a config to run or text to print.
#[derive(Debug)]
pub enum Parsed {
    Run(Box<RunConfig>),
    /// Help or version text; exit status 0.
    Info(String),
}

pub fn parse_config<I, T>(argv: I) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    if argv.len() <= 1 {
        use clap::CommandFactory;
        return Ok(Parsed::Info(Cli::command().render_help().to_string()));
    }
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    Ok(Parsed::Info(e.render().to_string()))
                }
                _ => Err(CliError::Usage(e.render().to_string())),
            };
        }
    };
    let (command, flags) = match cli.command {
        Cmd::GateQuality(f) => (Command::GateQuality, f),
        Cmd::Search(f) => (Command::Search, f),
        Cmd::VelocityError(f) => (Command::VelocityError, f),
        Cmd::Timing(f) => (Command::Timing, f),
        Cmd::Trajectory(f) => (Command::Trajectory, f),
        Cmd::Verify(f) => (Command::Verify, f),
    };
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    resolve(command, flags, file).map(|c| Parsed::Run(Box::new(c)))
}

const FILE_KEYS: [&str; 12] = [
    "n",
    "eta",
    "mu",
    "omega1-khz",
    "marked",
    "kmax",
    "delta-t-us",
    "iterations",
    "lambda0",
    "gate",
    "out",
    "format",
];

/// Flat `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn number<T: std::str::FromStr>(name: &str, raw: &str) -> Result<T, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--{name}: '{raw}' is not a valid number")))
}

fn finite(name: &str, raw: &str) -> Result<f64, CliError> {
    let x: f64 = number(name, raw)?;
    if !x.is_finite() {
        return Err(CliError::Usage(format!("--{name}: '{raw}' is not finite")));
    }
    Ok(x)
}

/// A single value, a comma list, or an inclusive `start:stop:step` range.
/// Returned sorted ascending without duplicates.
pub fn parse_grid(name: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    let mut values = if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(CliError::Usage(format!(
                "--{name}: range must be start:stop:step, got '{raw}'"
            )));
        };
        let (start, stop, step) = (
            finite(name, start)?,
            finite(name, stop)?,
            finite(name, step)?,
        );
        if step <= 0.0 || stop < start {
            return Err(CliError::Usage(format!(
                "--{name}: range needs step > 0 and stop >= start"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() + 1.0;
        if count > MAX_GRID_POINTS as f64 {
            return Err(CliError::Usage(format!(
                "--{name}: range has too many points"
            )));
        }
        (0..count as usize)
            .map(|i| start + i as f64 * step)
            .collect::<Vec<_>>()
    } else {
        raw.split(',')
            .map(|v| finite(name, v))
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(CliError::Usage(format!("--{name}: empty grid")));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

fn default_marked(n: usize) -> String {
    if n == DEFAULT_N {
        DEFAULT_MARKED.to_string()
    } else {
        (0..n)
            .map(|q| if q == 2 || q == 3 { '1' } else { '0' })
            .collect()
    }
}

fn resolve(
    command: Command,
    flags: Flags,
    file: BTreeMap<String, String>,
) -> Result<RunConfig, CliError> {
    let pick = |flag: Option<String>, key: &str| flag.or_else(|| file.get(key).cloned());

    let n = match pick(flags.n, "n") {
        Some(raw) => number::<usize>("n", &raw)?,
        None => DEFAULT_N,
    };
    if !(1..=24).contains(&n) {
        return Err(CliError::Usage(format!("--n: {n} is outside 1..=24")));
    }

    let omega1_khz = match pick(flags.omega1_khz, "omega1-khz") {
        Some(raw) => finite("omega1-khz", &raw)?,
        None => DEFAULT_OMEGA1_KHZ,
    };

    let eta = match pick(flags.eta, "eta") {
        Some(raw) => parse_grid("eta", &raw)?,
        None if command == Command::GateQuality => lab::default_eta_grid(),
        None => vec![DEFAULT_ETA],
    };

    let mu = match pick(flags.mu, "mu") {
        Some(raw) => parse_grid("mu", &raw)?,
        None => match command {
            Command::GateQuality => lab::default_mu_grid(),
            Command::VelocityError => vec![0.05, 0.1],
            _ => vec![0.0, 0.05, 0.1],
        },
    };

    let marked_raw = pick(flags.marked, "marked").unwrap_or_else(|| default_marked(n));
    let marked = BasisState::parse_for(&marked_raw, n)
        .map_err(|e| CliError::Usage(format!("--marked: {e}")))?;

    let k_max = match pick(flags.kmax, "kmax") {
        Some(raw) => number::<usize>("kmax", &raw)?,
        None => lab::DEFAULT_K_MAX,
    };
    if k_max == 0 {
        return Err(CliError::Usage("--kmax must be at least 1".into()));
    }

    let delta_t = match pick(flags.delta_t_us, "delta-t-us") {
        Some(raw) => parse_grid("delta-t-us", &raw)?
            .into_iter()
            .map(|us| us * 1e-6)
            .collect(),
        None => lab::default_delta_t_grid(),
    };

    let iterations = pick(flags.iterations, "iterations")
        .map(|raw| number::<usize>("iterations", &raw))
        .transpose()?;

    let lambda0 = match pick(flags.lambda0, "lambda0") {
        Some(raw) => finite("lambda0", &raw)?,
        None => DEFAULT_LAMBDA0,
    };

    let gate = match pick(flags.gate, "gate") {
        Some(raw) => GateKind::from_str(raw.trim(), true).map_err(|_| {
            CliError::Usage(format!("--gate: expected ideal or noisy, got '{raw}'"))
        })?,
        None => GateKind::Noisy,
    };

    let format = match pick(flags.format, "format") {
        Some(raw) => Format::from_str(raw.trim(), true)
            .map_err(|_| CliError::Usage(format!("--format: expected csv or json, got '{raw}'")))?,
        None => Format::Csv,
    };

    let out = flags.out.or_else(|| file.get("out").map(PathBuf::from));

    Ok(RunConfig {
        command,
        n,
        omega1: 2.0 * PI * (omega1_khz * 1e3),
        eta,
        mu,
        marked,
        k_max,
        delta_t,
        iterations,
        lambda0,
        gate,
        out,
        format,
    })
}
