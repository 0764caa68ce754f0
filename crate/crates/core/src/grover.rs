//! State-vector Grover search over the 2^N logical basis.
//!
//! One iteration is `W J₀ W J_ρ`: the oracle `J_ρ` marks the target, the
//! Hadamard-sandwiched `J₀` inverts about the average. The global sign that
//! distinguishes this from `−D J_ρ` is dropped.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gate::{
    build_ideal_cpf, build_noisy_cpf, mask_conjugate, BasisState, CpfDiagonal, GateParams,
};

/// Logical amplitudes plus the weight that has left the logical subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalState {
    n: usize,
    amps: Vec<C64>,
    leaked: f64,
}

/// Equal superposition of all 2^N basis states.
pub fn uniform_state(n: usize) -> Result<LogicalState> {
    if n == 0 || n >= 32 {
        return Err(Error::Input(format!("qubit count {n} not supported")));
    }
    let dim = 1usize << n;
    let amp = C64::from(hadamard_scale(n));
    Ok(LogicalState {
        n,
        amps: vec![amp; dim],
        leaked: 0.0,
    })
}

/// 2^{-n/2}, exact for even n.
fn hadamard_scale(n: usize) -> f64 {
    let half = 0.5f64.powi((n / 2) as i32);
    if n % 2 == 1 {
        half * FRAC_1_SQRT_2
    } else {
        half
    }
}

impl LogicalState {
    /// A computational basis state with unit amplitude.
    pub fn basis(state: &BasisState) -> Self {
        let mut amps = vec![C64::default(); 1usize << state.n()];
        amps[state.index()] = C64::new(1.0, 0.0);
        LogicalState {
            n: state.n(),
            amps,
            leaked: 0.0,
        }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        if n >= 32 || amps.len() != 1usize << n {
            return Err(Error::Input(format!(
                "{} amplitudes do not match {n} qubits",
                amps.len()
            )));
        }
        Ok(LogicalState {
            n,
            amps,
            leaked: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn leaked(&self) -> f64 {
        self.leaked
    }

    /// Σ|amps|², the no-jump weight still in the logical subspace.
    pub fn survival(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, state: &BasisState) -> f64 {
        self.amps[state.index()].norm_sqr()
    }

    /// W^⊗N via an in-place Walsh–Hadamard transform.
    pub fn hadamard_all(&mut self) {
        let dim = self.amps.len();
        let mut half = 1;
        while half < dim {
            for block in (0..dim).step_by(2 * half) {
                for i in block..block + half {
                    let a = self.amps[i];
                    let b = self.amps[i + half];
                    self.amps[i] = a + b;
                    self.amps[i + half] = a - b;
                }
            }
            half *= 2;
        }
        let scale = hadamard_scale(self.n);
        self.amps.iter_mut().for_each(|a| *a *= scale);
    }

    /// Multiplies by a real diagonal gate. Norm removed by `|entry| < 1` is
    /// added to the leaked weight.
    pub fn apply_diagonal(&mut self, diag: &CpfDiagonal) -> Result<()> {
        if diag.n() != self.n {
            return Err(Error::Input(format!(
                "{}-qubit gate applied to {}-qubit state",
                diag.n(),
                self.n
            )));
        }
        let mut lost = 0.0;
        for (amp, &e) in self.amps.iter_mut().zip(diag.entries()) {
            lost += (1.0 - e * e) * amp.norm_sqr();
            *amp *= e;
        }
        self.leaked += lost;
        Ok(())
    }

    /// One Grover iteration: oracle, W, J₀, W.
    pub fn grover_iterate(&mut self, oracle: &CpfDiagonal, j0: &CpfDiagonal) -> Result<()> {
        if oracle.n() != j0.n() {
            return Err(Error::Input(format!(
                "oracle acts on {} qubits, diffusion on {}",
                oracle.n(),
                j0.n()
            )));
        }
        self.apply_diagonal(oracle)?;
        self.hadamard_all();
        self.apply_diagonal(j0)?;
        self.hadamard_all();
        Ok(())
    }
}

/// Which phase gate drives the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateChoice {
    Ideal,
    /// Diagonal CPF coefficients at the gate time, leakage dropped.
    Noisy(GateParams),
}

impl GateChoice {
    pub fn base_gate(&self, n: usize) -> Result<CpfDiagonal> {
        match self {
            GateChoice::Ideal => build_ideal_cpf(n),
            GateChoice::Noisy(params) => {
                if params.n != n {
                    return Err(Error::Input(format!(
                        "gate parameters are for {} qubits, search has {n}",
                        params.n
                    )));
                }
                build_noisy_cpf(params)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRow {
    pub k: usize,
    /// |⟨marked|Ψ_k⟩|² on the unnormalized no-jump state.
    pub p_success: f64,
    pub survival: f64,
    /// Success probability conditioned on no photon loss.
    pub p_conditional: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub marked: BasisState,
    pub gate: GateChoice,
    pub rows: Vec<SearchRow>,
}

impl SearchTrace {
    /// Smallest iteration count reaching the maximal success probability.
    pub fn optimal(&self) -> Option<(usize, f64)> {
        optimal_iterations(&self.rows)
    }
}

pub fn optimal_iterations(rows: &[SearchRow]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for row in rows {
        match best {
            Some((_, p)) if row.p_success <= p => {}
            _ => best = Some((row.k, row.p_success)),
        }
    }
    best
}

/// 2·⌈π√(2^N)/4⌉.
pub fn default_k_max(n: usize) -> usize {
    2 * (PI * 2f64.powf(n as f64 / 2.0) / 4.0).ceil() as usize
}

pub fn run_search(
    n: usize,
    marked: &BasisState,
    gate: &GateChoice,
    k_max: usize,
) -> Result<SearchTrace> {
    if marked.n() != n {
        return Err(Error::Input(format!(
            "marked state {marked} has {} bits, expected {n}",
            marked.n()
        )));
    }
    if k_max < 1 {
        return Err(Error::Input("k_max must be at least 1".into()));
    }
    let j0 = gate.base_gate(n)?;
    let oracle = mask_conjugate(&j0, marked)?;
    let mut state = uniform_state(n)?;
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            state.grover_iterate(&oracle, &j0)?;
        }
        let p_success = state.probability(marked);
        let survival = state.survival();
        rows.push(SearchRow {
            k,
            p_success,
            survival,
            p_conditional: if survival > 0.0 {
                p_success / survival
            } else {
                0.0
            },
        });
    }
    Ok(SearchTrace {
        marked: *marked,
        gate: *gate,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OMEGA1: f64 = 2.0 * PI * 4.9e3;

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn uniform_amplitudes() {
        let s = uniform_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[C64::from(FRAC_1_SQRT_2); 2]);
        let s = uniform_state(10).unwrap();
        assert_eq!(s.amplitudes().len(), 1024);
        assert!(s.amplitudes().iter().all(|&a| a == C64::from(1.0 / 32.0)));
        for n in 1..12 {
            assert!((uniform_state(n).unwrap().survival() - 1.0).abs() < 1e-14);
        }
        assert!(uniform_state(0).is_err());
    }

    #[test]
    fn hadamard_properties() {
        for n in 1..8 {
            let zero = BasisState::new(n, 0).unwrap();
            let mut s = LogicalState::basis(&zero);
            s.hadamard_all();
            assert!(max_diff(s.amplitudes(), uniform_state(n).unwrap().amplitudes()) < 1e-15);
            s.hadamard_all();
            assert!(max_diff(s.amplitudes(), LogicalState::basis(&zero).amplitudes()) <= 1e-12);
        }
        let n = 5;
        let amps: Vec<C64> = (0..32)
            .map(|i| C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.03))
            .collect();
        let mut s = LogicalState::from_amplitudes(n, amps.clone()).unwrap();
        s.hadamard_all();
        s.hadamard_all();
        assert!(max_diff(s.amplitudes(), &amps) <= 1e-12);
    }

    #[test]
    fn ideal_oracle_flips_index_zero() {
        let mut s = uniform_state(3).unwrap();
        s.apply_diagonal(&build_ideal_cpf(3).unwrap()).unwrap();
        let a = FRAC_1_SQRT_2 * 0.5;
        assert_eq!(s.amplitudes()[0].re, -a);
        assert!(s.amplitudes()[1..].iter().all(|x| x.re == a));
        assert_eq!(s.leaked(), 0.0);
        assert!(s.apply_diagonal(&build_ideal_cpf(4).unwrap()).is_err());
    }

    #[test]
    fn noisy_gate_shrinks_zero_amplitude() {
        let params = GateParams::new(4, OMEGA1, 10.0, 0.1).unwrap();
        let mut s = uniform_state(4).unwrap();
        let before = s.survival();
        s.apply_diagonal(&build_noisy_cpf(&params).unwrap())
            .unwrap();
        assert!((s.amplitudes()[0].norm() - 0.924442550222648 * 0.25).abs() < 1e-14);
        assert!(s.survival() < before);
        assert!((s.survival() + s.leaked() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_qubit_search_is_exact() {
        for idx in 0..4 {
            let marked = BasisState::new(2, idx).unwrap();
            let trace = run_search(2, &marked, &GateChoice::Ideal, 1).unwrap();
            assert_eq!(trace.rows[1].p_success, 1.0);
        }
    }

    #[test]
    fn noisy_survival_strictly_decreases() {
        let params = GateParams::new(6, OMEGA1, 10.0, 0.05).unwrap();
        let marked = BasisState::new(6, 0b010011).unwrap();
        let trace = run_search(6, &marked, &GateChoice::Noisy(params), 12).unwrap();
        for w in trace.rows.windows(2) {
            assert!(w[1].survival < w[0].survival);
        }
    }

    #[test]
    fn search_input_errors() {
        let marked: BasisState = "01".parse().unwrap();
        assert!(run_search(3, &marked, &GateChoice::Ideal, 3).is_err());
        assert!(run_search(2, &marked, &GateChoice::Ideal, 0).is_err());
        let params = GateParams::new(3, OMEGA1, 10.0, 0.0).unwrap();
        assert!(run_search(2, &marked, &GateChoice::Noisy(params), 3).is_err());
    }

    #[test]
    fn optimum_prefers_fewer_iterations() {
        let row = |k, p| SearchRow {
            k,
            p_success: p,
            survival: 1.0,
            p_conditional: p,
        };
        assert_eq!(
            optimal_iterations(&[row(0, 0.0), row(1, 0.0)]),
            Some((0, 0.0))
        );
        assert_eq!(
            optimal_iterations(&[row(0, 0.1), row(1, 0.7), row(2, 0.7), row(3, 0.2)]),
            Some((1, 0.7))
        );
        assert_eq!(optimal_iterations(&[]), None);
    }

    #[test]
    fn k_max_default() {
        assert_eq!(default_k_max(10), 2 * 26);
        assert_eq!(default_k_max(2), 2 * 2);
    }
}
