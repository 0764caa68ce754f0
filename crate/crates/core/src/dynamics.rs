//! No-jump dynamics of atom 1 and the spectator chain in the cavity.
//!
//! With the cavity in vacuum and atom 1 in `|e⟩`, the effective Hamiltonian
//!
//! ```text
//! H = Σ Ω_i (a† σ_i⁻ + a σ_i⁺) − i κ/2 a†a
//! ```
//!
//! never leaves the single-excitation subspace
//! `{|e₁;0⟩, |g₁ e_k;0⟩ (k = 1…m), |g₁;1⟩}`. Amplitude vectors in this module
//! use that order: self, one entry per coupled spectator, photon.
//!
//! Two independent routes are provided: [`closed_form_amplitudes`] solves the
//! bright-mode damped oscillator analytically, [`integrate_subspace`]
//! integrates the Schrödinger equation with fixed-step RK4.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gate::{first_qubit_set, gate_time, spectator_excitations, GateParams};

/// Minimum number of RK4 steps per integration.
const MIN_STEPS: usize = 10_000;
/// Largest phase advance per step used for the first attempt.
const MAX_PHASE_PER_STEP: f64 = 5e-3;
/// Halving the step must not move any component by more than this.
const CONVERGENCE_TOL: f64 = 1e-10;
const MAX_REFINEMENTS: usize = 8;

/// Atom 1 plus the `m` spectators that start in `|g⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub omega1: f64,
    /// Couplings Ω_k of the spectators initially in `|g⟩`, rad/s.
    pub couplings: Vec<f64>,
    pub kappa: f64,
}

impl ChainSpec {
    /// `m` spectators all coupled at `omega`.
    pub fn uniform(omega1: f64, omega: f64, m: usize, kappa: f64) -> Self {
        ChainSpec {
            omega1,
            couplings: vec![omega; m],
            kappa,
        }
    }

    pub fn for_gate(params: &GateParams, m: usize) -> Self {
        Self::uniform(params.omega1, params.omega(), m, params.kappa())
    }

    pub fn m(&self) -> usize {
        self.couplings.len()
    }

    /// Dimension of the single-excitation subspace.
    pub fn dim(&self) -> usize {
        self.m() + 2
    }

    /// G_m = √(Ω₁² + Σ Ω_k²).
    pub fn g_m(&self) -> f64 {
        let sum: f64 = self.couplings.iter().map(|c| c * c).sum();
        (self.omega1 * self.omega1 + sum).sqrt()
    }

    fn check(&self) -> Result<()> {
        if !(self.omega1.is_finite() && self.omega1 > 0.0) {
            return Err(Error::domain("omega1", self.omega1, "omega1 > 0"));
        }
        if let Some(&c) = self
            .couplings
            .iter()
            .find(|c| !(c.is_finite() && **c >= 0.0))
        {
            return Err(Error::domain("coupling", c, "couplings >= 0"));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::domain("kappa", self.kappa, "kappa >= 0"));
        }
        Ok(())
    }

    /// H_eff ψ for the star-shaped coupling graph centred on the photon.
    fn apply_hamiltonian(&self, psi: &[C64], out: &mut [C64]) {
        let p = self.m() + 1;
        let photon = psi[p];
        out[0] = photon * self.omega1;
        let mut to_photon = psi[0] * self.omega1;
        for (k, &c) in self.couplings.iter().enumerate() {
            out[k + 1] = photon * c;
            to_photon += psi[k + 1] * c;
        }
        out[p] = to_photon - C64::new(0.0, 0.5 * self.kappa) * photon;
    }

    /// Upper bound on the fastest rate in the system.
    fn rate_bound(&self) -> f64 {
        self.g_m() + self.kappa
    }
}

/// Exact no-jump amplitudes starting from `|e₁;0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormResult {
    pub c_self: C64,
    pub c_leak: Vec<C64>,
    pub c_photon: C64,
    pub g_m: f64,
    /// A = √(G_m² − κ²/16).
    pub a_decay: f64,
}

impl ClosedFormResult {
    pub fn norm_sqr(&self) -> f64 {
        self.c_self.norm_sqr()
            + self.c_leak.iter().map(|c| c.norm_sqr()).sum::<f64>()
            + self.c_photon.norm_sqr()
    }

    /// Amplitudes in subspace order (self, spectators, photon).
    pub fn amplitudes(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.c_leak.len() + 2);
        v.push(self.c_self);
        v.extend_from_slice(&self.c_leak);
        v.push(self.c_photon);
        v
    }
}

pub fn closed_form_amplitudes(chain: &ChainSpec, t: f64) -> Result<ClosedFormResult> {
    chain.check()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain("t", t, "t >= 0"));
    }
    let g_m = chain.g_m();
    let g2 = g_m * g_m;
    let disc = g2 - chain.kappa * chain.kappa / 16.0;
    if disc <= 0.0 {
        return Err(Error::domain(
            "kappa",
            chain.kappa,
            "kappa < 4 G_m (overdamped chain)",
        ));
    }
    let a = disc.sqrt();
    let damping = (-chain.kappa * t / 4.0).exp();
    let (sin, cos) = (a * t).sin_cos();
    // bright-mode amplitude relative to its initial value
    let bright = damping * (cos + chain.kappa / (4.0 * a) * sin);
    let w1 = chain.omega1;

    let c_self = C64::from(w1 * w1 / g2 * bright + (g2 - w1 * w1) / g2);
    let c_leak = chain
        .couplings
        .iter()
        .map(|&c| C64::from(w1 * c / g2 * (bright - 1.0)))
        .collect();
    let c_photon = C64::new(0.0, -(w1 / a) * damping * sin);

    Ok(ClosedFormResult {
        c_self,
        c_leak,
        c_photon,
        g_m,
        a_decay: a,
    })
}

fn rk4_fixed(chain: &ChainSpec, t: f64, initial: &[C64], steps: usize) -> Vec<C64> {
    let dim = initial.len();
    let h = t / steps as f64;
    let minus_i = C64::new(0.0, -1.0);
    let mut y = initial.to_vec();
    let mut k1 = vec![C64::default(); dim];
    let mut k2 = vec![C64::default(); dim];
    let mut k3 = vec![C64::default(); dim];
    let mut k4 = vec![C64::default(); dim];
    let mut tmp = vec![C64::default(); dim];

    let deriv = |psi: &[C64], out: &mut [C64]| {
        chain.apply_hamiltonian(psi, out);
        out.iter_mut().for_each(|x| *x *= minus_i);
    };

    for _ in 0..steps {
        deriv(&y, &mut k1);
        for i in 0..dim {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        deriv(&tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        deriv(&tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + k3[i] * h;
        }
        deriv(&tmp, &mut k4);
        for i in 0..dim {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    y
}

/// Integrates `i dψ/dt = H_eff ψ` over `[0, t]` with classical RK4.
///
/// Starts from at least 10⁴ steps and keeps halving the step until a halving
/// changes no component by more than 1e-10.
pub fn integrate_subspace(chain: &ChainSpec, t: f64, initial: &[C64]) -> Result<Vec<C64>> {
    chain.check()?;
    if initial.len() != chain.dim() {
        return Err(Error::Input(format!(
            "initial state has {} amplitudes, chain needs {}",
            initial.len(),
            chain.dim()
        )));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain("t", t, "t >= 0"));
    }
    if t == 0.0 {
        return Ok(initial.to_vec());
    }

    let by_rate = (chain.rate_bound() * t / MAX_PHASE_PER_STEP).ceil() as usize;
    let mut steps = MIN_STEPS.max(by_rate);
    let mut coarse = rk4_fixed(chain, t, initial, steps);
    for _ in 0..MAX_REFINEMENTS {
        steps *= 2;
        let fine = rk4_fixed(chain, t, initial, steps);
        let change = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        coarse = fine;
        if change <= CONVERGENCE_TOL {
            break;
        }
    }
    Ok(coarse)
}

/// Where one logical basis state ends up after the gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateAction {
    /// Amplitude left on the source basis state.
    pub diag_amp: C64,
    /// Squared norm moved to excited spectators or the one-photon state.
    pub leak_weight: f64,
}

impl GateAction {
    pub const FROZEN: GateAction = GateAction {
        diag_amp: C64::new(1.0, 0.0),
        leak_weight: 0.0,
    };

    fn from_amplitudes(amps: &[C64]) -> Self {
        GateAction {
            diag_amp: amps[0],
            leak_weight: amps[1..].iter().map(|c| c.norm_sqr()).sum(),
        }
    }

    /// Total no-jump weight carried by this branch.
    pub fn survival(&self) -> f64 {
        self.diag_amp.norm_sqr() + self.leak_weight
    }
}

fn check_index(params: &GateParams, s: usize) -> Result<()> {
    if s >> params.n != 0 {
        return Err(Error::Input(format!(
            "basis index {s} does not fit {} qubits",
            params.n
        )));
    }
    Ok(())
}

fn closed_form_action(params: &GateParams, t0: f64, m: usize) -> Result<GateAction> {
    let res = closed_form_amplitudes(&ChainSpec::for_gate(params, m), t0)?;
    Ok(GateAction::from_amplitudes(&res.amplitudes()))
}

/// Exact gate action on basis state `s` at t₀, leakage included.
pub fn exact_cpf_action(params: &GateParams, s: usize) -> Result<GateAction> {
    let t0 = gate_time(params)?;
    check_index(params, s)?;
    if first_qubit_set(params.n, s) {
        return Ok(GateAction::FROZEN);
    }
    closed_form_action(params, t0, spectator_excitations(params.n, s))
}

/// [`exact_cpf_action`] for every basis index, evaluating each excitation
/// number once.
pub fn exact_cpf_actions(params: &GateParams) -> Result<Vec<GateAction>> {
    let t0 = gate_time(params)?;
    let per_m = (0..params.n)
        .map(|m| closed_form_action(params, t0, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(expand_by_sector(params.n, &per_m))
}

fn expand_by_sector(n: usize, per_m: &[GateAction]) -> Vec<GateAction> {
    (0..1usize << n)
        .map(|s| {
            if first_qubit_set(n, s) {
                GateAction::FROZEN
            } else {
                per_m[spectator_excitations(n, s)]
            }
        })
        .collect()
}

/// Gate action when atom 1 leaves the cavity `delta_t` after the others.
///
/// Stage 1 evolves the full chain for t₀. Stage 2 keeps only atom 1 coupled
/// for `delta_t`: spectator amplitudes freeze while the photon keeps
/// exchanging with atom 1 and decaying.
pub fn velocity_error_gate(params: &GateParams, delta_t: f64) -> Result<Vec<GateAction>> {
    let t0 = gate_time(params)?;
    if !(delta_t.is_finite() && delta_t >= 0.0) {
        return Err(Error::Input(format!(
            "delta_t must be a finite non-negative time, got {delta_t}"
        )));
    }
    let per_m = (0..params.n)
        .map(|m| {
            let chain = ChainSpec::for_gate(params, m);
            let mut start = vec![C64::default(); chain.dim()];
            start[0] = C64::new(1.0, 0.0);
            let after_gate = integrate_subspace(&chain, t0, &start)?;
            let lone = ChainSpec::uniform(params.omega1, 0.0, m, params.kappa());
            let end = integrate_subspace(&lone, delta_t, &after_gate)?;
            Ok(GateAction::from_amplitudes(&end))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(expand_by_sector(params.n, &per_m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::cpf_coefficients;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const OMEGA1: f64 = 2.0 * PI * 4.9e3;

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn excited(dim: usize) -> Vec<C64> {
        let mut v = vec![C64::default(); dim];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn initial_condition() {
        let chain = ChainSpec::uniform(OMEGA1, 10.0 * OMEGA1, 4, 0.1 * OMEGA1);
        let r = closed_form_amplitudes(&chain, 0.0).unwrap();
        assert_eq!(r.amplitudes(), excited(6));
    }

    #[test]
    fn full_rabi_cycle_without_spectators() {
        let chain = ChainSpec::uniform(OMEGA1, 0.0, 0, 0.0);
        let r = closed_form_amplitudes(&chain, PI / OMEGA1).unwrap();
        assert!((r.c_self + 1.0).norm() < 1e-15);
        assert!(r.c_photon.norm() < 1e-15);
    }

    #[test]
    fn overdamped_chain_is_rejected() {
        let chain = ChainSpec::uniform(OMEGA1, 0.0, 0, 4.0 * OMEGA1);
        assert!(matches!(
            closed_form_amplitudes(&chain, 1e-4),
            Err(Error::Domain { param: "kappa", .. })
        ));
    }

    #[test]
    fn integrator_without_couplings_is_identity() {
        let chain = ChainSpec {
            omega1: OMEGA1,
            couplings: vec![0.0; 3],
            kappa: 0.0,
        };
        let mut init = vec![C64::default(); 5];
        init[1] = C64::new(0.6, 0.0);
        init[3] = C64::new(0.0, -0.8);
        let out = integrate_subspace(&chain, 1e-4, &init).unwrap();
        assert_eq!(out, init);
    }

    #[test]
    fn integrator_rejects_wrong_length() {
        let chain = ChainSpec::uniform(OMEGA1, OMEGA1, 2, 0.0);
        assert!(matches!(
            integrate_subspace(&chain, 1e-4, &excited(3)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn closed_form_matches_integrator_on_gate() {
        let params = GateParams::new(4, OMEGA1, 10.0, 0.1).unwrap();
        let t0 = gate_time(&params).unwrap();
        let chain = ChainSpec::for_gate(&params, 3);
        let exact = closed_form_amplitudes(&chain, t0).unwrap().amplitudes();
        let ode = integrate_subspace(&chain, t0, &excited(5)).unwrap();
        assert!(max_diff(&exact, &ode) <= 1e-8);
    }

    #[test]
    fn self_amplitude_at_gate_time_is_the_cpf_coefficient() {
        for mu in [0.0, 0.05, 0.1, 1.0] {
            let params = GateParams::new(10, OMEGA1, 10.0, mu).unwrap();
            let coeffs = cpf_coefficients(&params).unwrap();
            for m in 0..10 {
                // lowest m spectator bits set, atom 1 in |e⟩
                let s = (1usize << m) - 1;
                let action = exact_cpf_action(&params, s).unwrap();
                assert!((action.diag_amp.re - coeffs.for_excitation(m)).abs() <= 1e-12);
                assert!(action.diag_amp.im.abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn exact_action_cases() {
        let ideal = GateParams::new(4, OMEGA1, 10.0, 0.0).unwrap();
        for s in 8..16 {
            assert_eq!(exact_cpf_action(&ideal, s).unwrap(), GateAction::FROZEN);
        }
        let a0 = exact_cpf_action(&ideal, 0).unwrap();
        assert!((a0.diag_amp + 1.0).norm() < 1e-14);
        assert!(a0.leak_weight < 1e-28);

        let a1 = exact_cpf_action(&ideal, 1).unwrap();
        assert!((a1.diag_amp.re - 0.999878706847627552619615676961).abs() < 1e-13);
        // κ = 0: everything not on the source state leaked
        assert!((a1.leak_weight - (1.0 - a1.diag_amp.norm_sqr())).abs() < 1e-14);
        assert!(a1.leak_weight > 0.0 && a1.leak_weight < 1e-3);

        assert!(exact_cpf_action(&ideal, 16).is_err());
    }

    #[test]
    fn leakage_vanishes_for_strong_spectators() {
        let mut last = f64::INFINITY;
        for eta in [10.0, 100.0, 1000.0, 10000.0] {
            let params = GateParams::new(3, OMEGA1, eta, 0.05).unwrap();
            let leak = exact_cpf_action(&params, 1).unwrap().leak_weight;
            assert!(leak < last);
            last = leak;
        }
        assert!(last < 4.0 / 1e8);
    }

    #[test]
    fn velocity_error_reduces_to_gate_at_zero_delay() {
        let params = GateParams::new(5, OMEGA1, 10.0, 0.05).unwrap();
        let exact = exact_cpf_actions(&params).unwrap();
        let delayed = velocity_error_gate(&params, 0.0).unwrap();
        assert_eq!(exact.len(), delayed.len());
        for (a, b) in exact.iter().zip(&delayed) {
            assert!((a.diag_amp - b.diag_amp).norm() < 1e-10);
            assert!((a.leak_weight - b.leak_weight).abs() < 1e-10);
        }
        assert!(velocity_error_gate(&params, -1e-6).is_err());
    }

    #[test]
    fn delayed_atom_keeps_exchanging_with_photon() {
        // m = 0 starts stage 2 back in |e₁;0⟩ and rotates away from it.
        let params = GateParams::new(2, OMEGA1, 10.0, 0.0).unwrap();
        let dt = 1e-6;
        let delayed = velocity_error_gate(&params, dt).unwrap();
        let expected = -(OMEGA1 * dt).cos();
        assert!((delayed[0].diag_amp.re - expected).abs() < 1e-10);
        assert!((delayed[0].survival() - 1.0).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn closed_form_norm_and_conserved_combination(m in 0usize..10, eta in 1.0f64..30.0, frac in 0.0f64..3.0) {
            let chain = ChainSpec::uniform(OMEGA1, eta * OMEGA1, m, 0.0);
            let t = frac * PI / OMEGA1;
            let r = closed_form_amplitudes(&chain, t).unwrap();
            prop_assert!((r.norm_sqr() - 1.0).abs() <= 1e-12);
            let omega = eta * OMEGA1;
            for leak in &r.c_leak {
                let conserved = r.c_self * omega - *leak * OMEGA1;
                prop_assert!((conserved - omega).norm() / omega <= 1e-10);
            }
        }

        #[test]
        fn closed_form_norm_decays(m in 0usize..6, mu in 0.01f64..2.0, t1 in 0.0f64..2.0, dt in 0.0f64..1.0) {
            let chain = ChainSpec::uniform(OMEGA1, 10.0 * OMEGA1, m, mu * OMEGA1);
            let scale = PI / OMEGA1;
            let a = closed_form_amplitudes(&chain, t1 * scale).unwrap().norm_sqr();
            let b = closed_form_amplitudes(&chain, (t1 + dt) * scale).unwrap().norm_sqr();
            prop_assert!(b <= a + 1e-15);
            prop_assert!(a <= 1.0 + 1e-12);
        }

        #[test]
        fn integrator_preserves_norm_without_decay(
            m in 0usize..5,
            raw in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 7),
        ) {
            let chain = ChainSpec::uniform(OMEGA1, 3.0 * OMEGA1, m, 0.0);
            let mut init: Vec<C64> = raw[..m + 2].iter().map(|&(re, im)| C64::new(re, im)).collect();
            let norm = init.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            init.iter_mut().for_each(|c| *c /= norm);
            let out = integrate_subspace(&chain, 1.5 * PI / OMEGA1, &init).unwrap();
            let after: f64 = out.iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((after - 1.0).abs() <= 1e-9);
        }
    }
}
