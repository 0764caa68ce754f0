//! Subcommand dispatch.

use cavity_grover::gate::GateParams;
use cavity_grover::grover::{run_search, GateChoice};
use cavity_grover::lab::{self, SearchCurve};
use cavity_grover::record::{ExperimentRecord, ToRecord};

use crate::config::{Command, GateKind, RunConfig};
use crate::output::RecordSet;
use crate::CliError;

/// Records to write plus human-readable notes for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub records: RecordSet,
    pub notes: Vec<String>,
}

const GATE_COLUMNS: [&str; 4] = ["eta", "mu", "fidelity", "p_success"];
const SEARCH_COLUMNS: [&str; 5] = ["mu", "k", "p_success", "survival", "p_conditional"];
const DELAY_COLUMNS: [&str; 5] = ["mu", "delta_t_us", "infidelity", "fidelity", "p_success"];
const TIMING_COLUMNS: [&str; 6] = [
    "mu",
    "iterations",
    "t0_us",
    "total_ms",
    "cavity_decay_ms",
    "atom_lifetime_ms",
];
const TRAJECTORY_COLUMNS: [&str; 4] = ["atom", "z_m", "z_over_lambda", "coupling_factor"];
const VERIFY_COLUMNS: [&str; 6] = [
    "m",
    "mu",
    "t_over_t0",
    "max_deviation",
    "norm_closed",
    "norm_ode",
];

fn base_params(cfg: &RunConfig, eta: f64) -> Result<GateParams, CliError> {
    Ok(GateParams::new(cfg.n, cfg.omega1, eta, 0.0)?)
}

fn records<T: ToRecord>(items: &[T]) -> Vec<ExperimentRecord> {
    items.iter().map(ToRecord::to_record).collect()
}

fn search_curves(cfg: &RunConfig) -> Result<Vec<SearchCurve>, CliError> {
    let eta = cfg.single_eta()?;
    match cfg.gate {
        GateKind::Noisy => Ok(lab::search_sweep(
            &base_params(cfg, eta)?,
            &cfg.marked,
            &cfg.mu,
            cfg.k_max,
        )?),
        GateKind::Ideal => {
            let trace = run_search(cfg.n, &cfg.marked, &GateChoice::Ideal, cfg.k_max)?;
            Ok(vec![SearchCurve {
                mu: 0.0,
                rows: trace.rows,
            }])
        }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut notes = Vec::new();
    let records = match cfg.command {
        Command::GateQuality => {
            let sweep = lab::gate_quality_sweep(&base_params(cfg, cfg.eta[0])?, &cfg.eta, &cfg.mu)?;
            RecordSet::new(&GATE_COLUMNS, records(&sweep))
        }
        Command::Search => {
            let curves = search_curves(cfg)?;
            notes.push(format!(
                "marked state {} = {}",
                cfg.marked,
                cfg.marked.physical_label()
            ));
            for curve in &curves {
                let (k, p) = curve.peak();
                notes.push(format!(
                    "mu = {}: optimal k = {k}, p_success = {p:.6}",
                    curve.mu
                ));
            }
            RecordSet::new(
                &SEARCH_COLUMNS,
                curves.iter().flat_map(SearchCurve::records).collect(),
            )
        }
        Command::VelocityError => {
            let eta = cfg.single_eta()?;
            let sweep = lab::velocity_error_sweep(&base_params(cfg, eta)?, &cfg.delta_t, &cfg.mu)?;
            RecordSet::new(&DELAY_COLUMNS, records(&sweep))
        }
        Command::Timing => {
            let eta = cfg.single_eta()?;
            let budgets = cfg
                .mu
                .iter()
                .map(|&mu| {
                    let params = GateParams::new(cfg.n, cfg.omega1, eta, mu)?;
                    let iterations = match cfg.iterations {
                        Some(k) => k,
                        None => {
                            let trace = run_search(
                                cfg.n,
                                &cfg.marked,
                                &GateChoice::Noisy(params),
                                cfg.k_max,
                            )?;
                            trace
                                .optimal()
                                .map_or_else(|| lab::textbook_iterations(cfg.n), |(k, _)| k)
                        }
                    };
                    Ok(lab::timing_budget(&params, iterations)?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            RecordSet::new(&TIMING_COLUMNS, records(&budgets))
        }
        Command::Trajectory => {
            let plan = lab::trajectory_plan(cfg.n, cfg.lambda0, cfg.single_eta()?)?;
            RecordSet::new(&TRAJECTORY_COLUMNS, plan.records())
        }
        Command::Verify => {
            let eta = cfg.single_eta()?;
            let m_list: Vec<usize> = [1, 5, 9].into_iter().filter(|&m| m < cfg.n).collect();
            let checks =
                lab::oracle_check(&base_params(cfg, eta)?, &m_list, &cfg.mu, &[0.5, 1.0, 2.0])?;
            let worst = checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
            notes.push(format!(
                "max closed-form/ODE deviation over {} points: {worst:.3e}",
                checks.len()
            ));
            RecordSet::new(&VERIFY_COLUMNS, records(&checks))
        }
    };
    Ok(Outcome { records, notes })
}
