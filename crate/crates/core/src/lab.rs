//! Experiment harness: gate quality and search sweeps, delayed-atom
//! infidelity, timing budgets and atom placement in the standing wave.
//!
//! Sweeps evaluate grid points in parallel; output order always follows the
//! grid order passed in.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::dynamics::{
    closed_form_amplitudes, exact_cpf_actions, integrate_subspace, velocity_error_gate, ChainSpec,
    GateAction,
};
use crate::error::{Error, Result};
use crate::gate::{gate_time, BasisState, GateParams};
use crate::grover::{run_search, GateChoice, SearchRow};
use crate::record::{ExperimentRecord, ToRecord};

/// Rydberg atom lifetime used in the timing budget, seconds.
pub const ATOM_LIFETIME: f64 = 30e-3;

/// Gate fidelity and success probability on the uniform input state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateQuality {
    pub eta: f64,
    pub mu: f64,
    pub fidelity: f64,
    pub p_success: f64,
}

impl ToRecord for GateQuality {
    fn to_record(&self) -> ExperimentRecord {
        ExperimentRecord::new()
            .with("eta", self.eta)
            .with("mu", self.mu)
            .with("fidelity", self.fidelity)
            .with("p_success", self.p_success)
    }
}

/// Fidelity against the ideal CPF and total no-jump weight, for the uniform
/// input evolved branch by branch according to `actions`.
///
/// The fidelity is the overlap of the unnormalized no-jump state with the
/// ideal output, so photon loss lowers it. Leaked components are orthogonal
/// to every logical state and drop out of the overlap.
pub fn fidelity_and_success(actions: &[GateAction]) -> (f64, f64) {
    let dim = actions.len() as f64;
    let mut overlap = C64::default();
    let mut weight = 0.0;
    for (s, action) in actions.iter().enumerate() {
        let ideal = if s == 0 { -1.0 } else { 1.0 };
        overlap += action.diag_amp * ideal;
        weight += action.survival();
    }
    let overlap = overlap / dim;
    let p = weight / dim;
    (overlap.norm_sqr().min(1.0), p.min(1.0))
}

pub fn gate_quality(params: &GateParams) -> Result<GateQuality> {
    let actions = exact_cpf_actions(params)?;
    let (fidelity, p_success) = fidelity_and_success(&actions);
    Ok(GateQuality {
        eta: params.eta,
        mu: params.mu,
        fidelity,
        p_success,
    })
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Input(format!("{name} grid is empty")));
    }
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::Input(format!("{name} grid contains {x}")));
    }
    Ok(())
}

/// Gate quality over `eta_grid × mu_grid`; `base` supplies n and Ω₁.
pub fn gate_quality_sweep(
    base: &GateParams,
    eta_grid: &[f64],
    mu_grid: &[f64],
) -> Result<Vec<GateQuality>> {
    check_grid("eta", eta_grid)?;
    check_grid("mu", mu_grid)?;
    let points: Vec<(f64, f64)> = eta_grid
        .iter()
        .flat_map(|&eta| mu_grid.iter().map(move |&mu| (eta, mu)))
        .collect();
    points
        .par_iter()
        .map(|&(eta, mu)| gate_quality(&GateParams::new(base.n, base.omega1, eta, mu)?))
        .collect()
}

/// One search-probability curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchCurve {
    pub mu: f64,
    pub rows: Vec<SearchRow>,
}

impl SearchCurve {
    pub fn peak(&self) -> (usize, f64) {
        crate::grover::optimal_iterations(&self.rows).unwrap_or((0, 0.0))
    }

    pub fn records(&self) -> Vec<ExperimentRecord> {
        self.rows
            .iter()
            .map(|r| {
                ExperimentRecord::new()
                    .with("mu", self.mu)
                    .with("k", r.k)
                    .with("p_success", r.p_success)
                    .with("survival", r.survival)
                    .with("p_conditional", r.p_conditional)
            })
            .collect()
    }
}

/// Noisy-gate search curves, one per decay rate, at the coupling of `base`.
pub fn search_sweep(
    base: &GateParams,
    marked: &BasisState,
    mu_list: &[f64],
    k_max: usize,
) -> Result<Vec<SearchCurve>> {
    check_grid("mu", mu_list)?;
    mu_list
        .par_iter()
        .map(|&mu| {
            let params = GateParams::new(base.n, base.omega1, base.eta, mu)?;
            let trace = run_search(base.n, marked, &GateChoice::Noisy(params), k_max)?;
            Ok(SearchCurve {
                mu,
                rows: trace.rows,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityErrorPoint {
    pub mu: f64,
    /// Extra dwell time of atom 1, seconds.
    pub delta_t: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub p_success: f64,
}

impl ToRecord for VelocityErrorPoint {
    fn to_record(&self) -> ExperimentRecord {
        ExperimentRecord::new()
            .with("mu", self.mu)
            .with("delta_t_us", self.delta_t * 1e6)
            .with("infidelity", self.infidelity)
            .with("fidelity", self.fidelity)
            .with("p_success", self.p_success)
    }
}

pub fn velocity_error_point(params: &GateParams, delta_t: f64) -> Result<VelocityErrorPoint> {
    let actions = velocity_error_gate(params, delta_t)?;
    let (fidelity, p_success) = fidelity_and_success(&actions);
    Ok(VelocityErrorPoint {
        mu: params.mu,
        delta_t,
        fidelity,
        infidelity: 1.0 - fidelity,
        p_success,
    })
}

/// Delayed-atom infidelity over `mu_list × delta_t_grid` (seconds).
pub fn velocity_error_sweep(
    base: &GateParams,
    delta_t_grid: &[f64],
    mu_list: &[f64],
) -> Result<Vec<VelocityErrorPoint>> {
    check_grid("delta_t", delta_t_grid)?;
    check_grid("mu", mu_list)?;
    if let Some(dt) = delta_t_grid.iter().find(|&&dt| dt < 0.0) {
        return Err(Error::Input(format!("negative delay {dt} in delta_t grid")));
    }
    let points: Vec<(f64, f64)> = mu_list
        .iter()
        .flat_map(|&mu| delta_t_grid.iter().map(move |&dt| (mu, dt)))
        .collect();
    points
        .par_iter()
        .map(|&(mu, dt)| {
            let params = GateParams::new(base.n, base.omega1, base.eta, mu)?;
            velocity_error_point(&params, dt)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingBudget {
    pub mu: f64,
    pub t0: f64,
    pub iterations: usize,
    /// Two CPF gates per iteration.
    pub total: f64,
    /// 2π/κ; `None` for a lossless cavity.
    pub cavity_decay_time: Option<f64>,
    pub atom_lifetime: f64,
}

impl ToRecord for TimingBudget {
    fn to_record(&self) -> ExperimentRecord {
        ExperimentRecord::new()
            .with("mu", self.mu)
            .with("iterations", self.iterations)
            .with("t0_us", self.t0 * 1e6)
            .with("total_ms", self.total * 1e3)
            .with("cavity_decay_ms", self.cavity_decay_time.map(|t| t * 1e3))
            .with("atom_lifetime_ms", self.atom_lifetime * 1e3)
    }
}

/// ⌈π√(2^N)/4⌉, the textbook iteration count.
pub fn textbook_iterations(n: usize) -> usize {
    (PI * 2f64.powf(n as f64 / 2.0) / 4.0).ceil() as usize
}

pub fn timing_budget(params: &GateParams, iterations: usize) -> Result<TimingBudget> {
    let t0 = gate_time(params)?;
    let kappa = params.kappa();
    Ok(TimingBudget {
        mu: params.mu,
        t0,
        iterations,
        total: 2.0 * iterations as f64 * t0,
        cavity_decay_time: (kappa > 0.0).then(|| 2.0 * PI / kappa),
        atom_lifetime: ATOM_LIFETIME,
    })
}

/// Atom tracks across the standing wave.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPlan {
    pub lambda0: f64,
    pub eta: f64,
    /// Track coordinate of each atom, meters.
    pub z: Vec<f64>,
    /// cos(2πz/λ₀) for each atom.
    pub coupling_factor: Vec<f64>,
    /// Mode waist and radial offset; the Gaussian factor is taken as 1.
    pub waist: Option<f64>,
    pub radial_offset: Option<f64>,
}

impl TrajectoryPlan {
    pub fn records(&self) -> Vec<ExperimentRecord> {
        self.z
            .iter()
            .zip(&self.coupling_factor)
            .enumerate()
            .map(|(j, (&z, &c))| {
                ExperimentRecord::new()
                    .with("atom", j + 1)
                    .with("z_m", z)
                    .with("z_over_lambda", z / self.lambda0)
                    .with("coupling_factor", c)
            })
            .collect()
    }
}

/// Atom 1 rides off an antinode so its coupling drops to 1/η; atoms 2…N
/// cross successive antinodes one wavelength apart.
pub fn trajectory_plan(n: usize, lambda0: f64, eta: f64) -> Result<TrajectoryPlan> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::Input(format!(
            "trajectory layout needs an even number of atoms, got {n}"
        )));
    }
    if !(lambda0.is_finite() && lambda0 > 0.0) {
        return Err(Error::domain("lambda0", lambda0, "lambda0 > 0"));
    }
    if !(eta.is_finite() && eta > 1.0) {
        return Err(Error::domain(
            "eta",
            eta,
            "eta > 1 (arccos(1/eta) must exist)",
        ));
    }
    let half = (n / 2) as f64;
    let z: Vec<f64> = (1..=n)
        .map(|j| {
            if j == 1 {
                -half * lambda0 + lambda0 / (2.0 * PI) * (1.0 / eta).acos()
            } else {
                (-half + (j - 1) as f64) * lambda0
            }
        })
        .collect();
    let coupling_factor = z.iter().map(|&z| (2.0 * PI * z / lambda0).cos()).collect();
    Ok(TrajectoryPlan {
        lambda0,
        eta,
        z,
        coupling_factor,
        waist: None,
        radial_offset: None,
    })
}

/// One comparison of the closed-form amplitudes against the integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCheck {
    pub m: usize,
    pub mu: f64,
    /// Evaluation time in units of the gate time.
    pub t_over_t0: f64,
    pub max_deviation: f64,
    pub norm_closed: f64,
    pub norm_ode: f64,
}

impl ToRecord for OracleCheck {
    fn to_record(&self) -> ExperimentRecord {
        ExperimentRecord::new()
            .with("m", self.m)
            .with("mu", self.mu)
            .with("t_over_t0", self.t_over_t0)
            .with("max_deviation", self.max_deviation)
            .with("norm_closed", self.norm_closed)
            .with("norm_ode", self.norm_ode)
    }
}

/// Closed forms vs RK4 over `m_list × mu_list × t_fractions` at coupling
/// ratio `base.eta`.
pub fn oracle_check(
    base: &GateParams,
    m_list: &[usize],
    mu_list: &[f64],
    t_fractions: &[f64],
) -> Result<Vec<OracleCheck>> {
    check_grid("mu", mu_list)?;
    check_grid("t", t_fractions)?;
    let mut points = Vec::new();
    for &m in m_list {
        for &mu in mu_list {
            for &frac in t_fractions {
                points.push((m, mu, frac));
            }
        }
    }
    points
        .par_iter()
        .map(|&(m, mu, frac)| {
            let params = GateParams::new(base.n, base.omega1, base.eta, mu)?;
            let t = frac * gate_time(&params)?;
            let chain = ChainSpec::for_gate(&params, m);
            let closed = closed_form_amplitudes(&chain, t)?.amplitudes();
            let mut start = vec![C64::default(); chain.dim()];
            start[0] = C64::new(1.0, 0.0);
            let ode = integrate_subspace(&chain, t, &start)?;
            let max_deviation = closed
                .iter()
                .zip(&ode)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let norm = |v: &[C64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>();
            Ok(OracleCheck {
                m,
                mu,
                t_over_t0: frac,
                max_deviation,
                norm_closed: norm(&closed),
                norm_ode: norm(&ode),
            })
        })
        .collect()
}

/// η ∈ [1, 15] in steps of 0.5.
pub fn default_eta_grid() -> Vec<f64> {
    (0..=28).map(|i| 1.0 + 0.5 * i as f64).collect()
}

/// µ ∈ {0, 0.01, …, 0.1}.
pub fn default_mu_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 100.0).collect()
}

/// δt ∈ [0, 5 µs] in steps of 0.25 µs, in seconds.
pub fn default_delta_t_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.25e-6).collect()
}

pub const DEFAULT_K_MAX: usize = 40;
