//! Dissipative N-qubit conditional phase flip and the diagonal gates derived
//! from it.
//!
//! Atom 1 couples to the cavity at `omega1`; atoms 2…N that sit in `|g⟩`
//! couple at `eta * omega1`. Holding the interaction for one damped Rabi π
//! cycle of atom 1 leaves every logical basis state (approximately) on
//! itself, multiplied by a real coefficient:
//!
//! * `alpha` when atom 1 is in `|e⟩` and no spectator is in `|g⟩`,
//! * `beta[m-1]` when atom 1 is in `|e⟩` and `m` spectators are in `|g⟩`,
//! * `1` when atom 1 is in `|g⟩` (nothing to exchange with the vacuum).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Physical parameters of one CPF gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateParams {
    /// Number of qubits (atoms).
    pub n: usize,
    /// Coupling of atom 1, rad/s.
    pub omega1: f64,
    /// Spectator-to-first-atom coupling ratio Ω/Ω₁.
    pub eta: f64,
    /// Cavity decay in units of the first coupling, κ/Ω₁.
    pub mu: f64,
}

impl GateParams {
    pub fn new(n: usize, omega1: f64, eta: f64, mu: f64) -> Result<Self> {
        let params = GateParams { n, omega1, eta, mu };
        params.validate()?;
        Ok(params)
    }

    /// Spectator coupling Ω in rad/s.
    pub fn omega(&self) -> f64 {
        self.eta * self.omega1
    }

    /// Cavity decay rate κ in rad/s.
    pub fn kappa(&self) -> f64 {
        self.mu * self.omega1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::domain("n", self.n as f64, "n >= 1"));
        }
        if self.n >= usize::BITS as usize - 1 {
            return Err(Error::domain(
                "n",
                self.n as f64,
                "n must fit a basis index",
            ));
        }
        if !(self.omega1.is_finite() && self.omega1 > 0.0) {
            return Err(Error::domain("omega1", self.omega1, "omega1 > 0"));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::domain("eta", self.eta, "eta > 0"));
        }
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::domain("mu", self.mu, "mu >= 0"));
        }
        if self.mu >= 4.0 {
            return Err(Error::domain(
                "mu",
                self.mu,
                "mu < 4 (overdamped; no pi rotation exists)",
            ));
        }
        Ok(())
    }
}

/// Diagonal coefficients of the noisy CPF gate at the gate time.
#[derive(Debug, Clone, PartialEq)]
pub struct CpfCoefficients {
    pub alpha: f64,
    /// `beta[m - 1]` for m = 1…N−1 spectators in `|g⟩`.
    pub beta: Vec<f64>,
    /// Rotation angle reached by the m-spectator chain, same indexing as `beta`.
    pub theta: Vec<f64>,
}

impl CpfCoefficients {
    /// Coefficient for a basis state of the `|e₁⟩` sector with `m` spectators in `|g⟩`.
    pub fn for_excitation(&self, m: usize) -> f64 {
        if m == 0 {
            self.alpha
        } else {
            self.beta[m - 1]
        }
    }
}

/// CPF gate duration t₀ = π/√(Ω₁² − κ²/16), in seconds.
pub fn gate_time(params: &GateParams) -> Result<f64> {
    params.validate()?;
    let root = (1.0 - params.mu * params.mu / 16.0).sqrt();
    Ok(PI / (params.omega1 * root))
}

pub fn cpf_coefficients(params: &GateParams) -> Result<CpfCoefficients> {
    params.validate()?;
    let mu = params.mu;
    let mu2 = mu * mu;
    let eta2 = params.eta * params.eta;
    let alpha = -(-PI * mu / (16.0 - mu2).sqrt()).exp();

    let (beta, theta) = (1..params.n)
        .map(|m| {
            let m_eta2 = m as f64 * eta2;
            let theta = PI * (1.0 + 16.0 * m_eta2 / (16.0 - mu2)).sqrt();
            let damped = theta.cos() + mu * theta.sin() / (16.0 + 16.0 * m_eta2 - mu2).sqrt();
            let beta = -alpha / (1.0 + m_eta2) * damped + m_eta2 / (1.0 + m_eta2);
            (beta, theta)
        })
        .unzip();

    Ok(CpfCoefficients { alpha, beta, theta })
}

/// A logical basis state of `n` qubits, qubit 1 in the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    n: usize,
    index: usize,
}

impl BasisState {
    pub fn new(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n >= usize::BITS as usize - 1 {
            return Err(Error::Input(format!("qubit count {n} not supported")));
        }
        if index >> n != 0 {
            return Err(Error::Input(format!(
                "basis index {index} does not fit {n} qubits"
            )));
        }
        Ok(BasisState { n, index })
    }

    /// Parses a bitstring with qubit 1 first and checks its length.
    pub fn parse_for(bits: &str, n: usize) -> Result<Self> {
        let state: BasisState = bits.parse()?;
        if state.n != n {
            return Err(Error::Input(format!(
                "marked state '{bits}' has {} bits, expected {n}",
                state.n
            )));
        }
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Logical value of qubit `q` (1-based).
    pub fn bit(&self, q: usize) -> bool {
        assert!((1..=self.n).contains(&q), "qubit {q} out of range");
        (self.index >> (self.n - q)) & 1 == 1
    }

    /// Atomic-level reading, e.g. `|e1 i2 g3 g4⟩` for `0011`.
    pub fn physical_label(&self) -> String {
        let levels: Vec<String> = (1..=self.n)
            .map(|q| {
                let level = match (q, self.bit(q)) {
                    (_, true) => 'g',
                    (1, false) => 'e',
                    (_, false) => 'i',
                };
                format!("{level}{q}")
            })
            .collect();
        format!("|{}⟩", levels.join(" "))
    }
}

impl FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Input("empty bitstring".into()));
        }
        let mut index = 0usize;
        for c in s.chars() {
            let bit = match c {
                '0' => 0,
                '1' => 1,
                other => return Err(Error::Input(format!("bitstring '{s}' contains '{other}'"))),
            };
            index = index
                .checked_mul(2)
                .ok_or_else(|| Error::Input(format!("bitstring '{s}' too long")))?
                | bit;
        }
        BasisState::new(s.len(), index)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.index, width = self.n)
    }
}

/// Real diagonal of a (possibly non-unitary) phase gate over 2^N basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct CpfDiagonal {
    n: usize,
    entries: Vec<f64>,
}

impl CpfDiagonal {
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != 1usize << n {
            return Err(Error::Input(format!(
                "diagonal of {} entries does not match {n} qubits",
                entries.len()
            )));
        }
        Ok(CpfDiagonal { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, s: usize) -> f64 {
        self.entries[s]
    }
}

/// Whether atom 1 is in `|g⟩` (frozen sector) for basis index `s`.
pub(crate) fn first_qubit_set(n: usize, s: usize) -> bool {
    (s >> (n - 1)) & 1 == 1
}

/// Number of spectators (qubits 2…N) in `|g⟩` for basis index `s`.
pub(crate) fn spectator_excitations(n: usize, s: usize) -> usize {
    let mask = (1usize << (n - 1)) - 1;
    (s & mask).count_ones() as usize
}

pub fn build_noisy_cpf(params: &GateParams) -> Result<CpfDiagonal> {
    let coeffs = cpf_coefficients(params)?;
    let n = params.n;
    let entries = (0..1usize << n)
        .map(|s| {
            if first_qubit_set(n, s) {
                1.0
            } else {
                coeffs.for_excitation(spectator_excitations(n, s))
            }
        })
        .collect();
    Ok(CpfDiagonal { n, entries })
}

pub fn build_ideal_cpf(n: usize) -> Result<CpfDiagonal> {
    if n == 0 || n >= usize::BITS as usize - 1 {
        return Err(Error::Input(format!("qubit count {n} not supported")));
    }
    let mut entries = vec![1.0; 1usize << n];
    entries[0] = -1.0;
    Ok(CpfDiagonal { n, entries })
}

/// Conjugates a diagonal gate with X on every qubit set in `marked`, moving
/// the entry of `|0…0⟩` onto `marked`.
pub fn mask_conjugate(diag: &CpfDiagonal, marked: &BasisState) -> Result<CpfDiagonal> {
    if marked.n() != diag.n {
        return Err(Error::Input(format!(
            "mask has {} bits, gate acts on {} qubits",
            marked.n(),
            diag.n
        )));
    }
    let mask = marked.index();
    let entries = (0..diag.entries.len())
        .map(|s| diag.entries[s ^ mask])
        .collect();
    Ok(CpfDiagonal { n: diag.n, entries })
}
