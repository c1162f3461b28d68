//! Dense statevector simulation for small systems: state construction, exact
//! Pauli expectation values, single-shot Pauli measurements and ground
//! states of Pauli-sum Hamiltonians.
//!
//! Qubit `k` of an `n`-qubit state is bit `n - 1 - k` of the amplitude index,
//! so the label string `Z+ Z-` is the basis state `|01>` at index 1.

mod eigen;
mod hamiltonian;

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimator::OutcomeRecord;
use crate::pauli::{MeasurementBasis, Pauli, PauliObservable};

pub use eigen::{ground_state, ground_state_with, EigenMethod, GroundState, GroundStateOptions};
pub use hamiltonian::PauliSumHamiltonian;

/// Largest qubit count a state vector may have.
pub const MAX_QUBITS: usize = 20;

const NORM_TOLERANCE: f64 = 1e-10;
/// Raw amplitude input may be off by this much before it is rejected.
const RAW_NORM_TOLERANCE: f64 = 1e-6;

/// Reproducible generator for stream `stream` of a batch seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Normalized pure state of `n` qubits.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("n", &self.n)
            .field("amplitudes", &self.amplitudes)
            .finish()
    }
}

pub(crate) fn check_capacity(what: &'static str, n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        Err(Error::Capacity {
            what,
            requested: n,
            cap: MAX_QUBITS,
        })
    } else {
        Ok(())
    }
}

fn norm_sqr(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum()
}

/// One qubit of a product state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BlochSpec {
    /// +1 or -1 eigenstate of X, Y or Z.
    Axis(Pauli, bool),
    /// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    Angles { theta: f64, phi: f64 },
}

impl BlochSpec {
    fn amplitudes(self) -> [Complex64; 2] {
        let s = FRAC_1_SQRT_2;
        let c = |re, im| Complex64::new(re, im);
        match self {
            BlochSpec::Axis(Pauli::Z, true) => [c(1.0, 0.0), c(0.0, 0.0)],
            BlochSpec::Axis(Pauli::Z, false) => [c(0.0, 0.0), c(1.0, 0.0)],
            BlochSpec::Axis(Pauli::X, true) => [c(s, 0.0), c(s, 0.0)],
            BlochSpec::Axis(Pauli::X, false) => [c(s, 0.0), c(-s, 0.0)],
            BlochSpec::Axis(Pauli::Y, true) => [c(s, 0.0), c(0.0, s)],
            BlochSpec::Axis(Pauli::Y, false) => [c(s, 0.0), c(0.0, -s)],
            BlochSpec::Axis(Pauli::I, _) => unreachable!("identity is not a Bloch axis"),
            BlochSpec::Angles { theta, phi } => [
                c((0.5 * theta).cos(), 0.0),
                Complex64::from_polar((0.5 * theta).sin(), phi),
            ],
        }
    }
}

impl std::str::FromStr for BlochSpec {
    type Err = Error;

    /// `X+`, `Z-`, ... or `theta:phi` in radians.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((theta, phi)) = s.split_once(':') {
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(1, format!("invalid angle {t:?}")))
            };
            return Ok(BlochSpec::Angles {
                theta: parse(theta)?,
                phi: parse(phi)?,
            });
        }
        let mut chars = s.chars();
        let axis = chars.next().and_then(Pauli::from_char).filter(|p| *p != Pauli::I);
        let sign = match chars.as_str() {
            "+" => Some(true),
            "-" => Some(false),
            _ => None,
        };
        match (axis, sign) {
            (Some(axis), Some(sign)) => Ok(BlochSpec::Axis(axis, sign)),
            _ => Err(Error::parse(1, format!("invalid single-qubit state {s:?}"))),
        }
    }
}

/// Recipe for a state vector.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Zero(usize),
    /// `|+>^n`, the uniform superposition.
    Plus(usize),
    Ghz(usize),
    Product(Vec<BlochSpec>),
    Amplitudes(Vec<Complex64>),
}

impl StateVector {
    /// Validate and normalize raw amplitudes. The length must be a power of two
    /// and the norm within 1e-6 of one.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::State(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_capacity("state vector", n)?;
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::State("amplitudes must be finite".into()));
        }
        let norm2 = norm_sqr(&amplitudes);
        if (norm2.sqrt() - 1.0).abs() > RAW_NORM_TOLERANCE {
            return Err(Error::State(format!("state norm {} is not 1", norm2.sqrt())));
        }
        let scale = 1.0 / norm2.sqrt();
        Ok(StateVector {
            n,
            amplitudes: amplitudes.into_iter().map(|a| a * scale).collect(),
        })
    }

    /// Wrap amplitudes that are already normalized to within 1e-10.
    pub(crate) fn from_normalized(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm2 = norm_sqr(&amplitudes);
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::State(format!("state norm^2 {norm2} is not 1")));
        }
        Ok(StateVector { n, amplitudes })
    }

    pub fn build(spec: &StateSpec) -> Result<Self> {
        match spec {
            StateSpec::Zero(n) => Self::zero(*n),
            StateSpec::Plus(n) => Self::product(&vec![BlochSpec::Axis(Pauli::X, true); *n]),
            StateSpec::Ghz(n) => Self::ghz(*n),
            StateSpec::Product(qubits) => Self::product(qubits),
            StateSpec::Amplitudes(a) => Self::from_amplitudes(a.clone()),
        }
    }

    fn check_qubits(n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Domain("a state needs at least one qubit".into()));
        }
        check_capacity("state vector", n)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::check_qubits(n)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amplitudes })
    }

    /// `(|0...0> + |1...1>) / sqrt(2)`.
    pub fn ghz(n: usize) -> Result<Self> {
        Self::check_qubits(n)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amplitudes[(1 << n) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Ok(StateVector { n, amplitudes })
    }

    /// Tensor product, qubit 0 first.
    pub fn product(qubits: &[BlochSpec]) -> Result<Self> {
        Self::check_qubits(qubits.len())?;
        let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
        for q in qubits {
            let [a0, a1] = q.amplitudes();
            amplitudes = amplitudes.iter().flat_map(|&a| [a * a0, a * a1]).collect();
        }
        Ok(StateVector {
            n: qubits.len(),
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amplitudes).sqrt()
    }

    #[inline]
    fn bit(&self, k: usize) -> usize {
        1 << (self.n - 1 - k)
    }

    /// `<psi| O |psi>` for the Pauli string of `o` (its coefficient is ignored).
    pub fn exact_expectation(&self, o: &PauliObservable) -> Result<f64> {
        Error::check_len(self.n, o.num_qubits())?;
        let op = hamiltonian::PauliAction::new(o);
        let mut total = 0.0;
        for (i, &a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (j, phase) = op.apply_to_index(i);
            total += (self.amplitudes[j].conj() * phase * a).re;
        }
        Ok(total)
    }

    /// Rotate every qubit so that the +1 eigenstate of `basis[k]` maps to `|0>`.
    fn rotate_into(&mut self, basis: &MeasurementBasis) {
        let s = FRAC_1_SQRT_2;
        for k in 0..self.n {
            let label = basis.label(k);
            if label == Pauli::Z {
                continue;
            }
            let bit = self.bit(k);
            for i in 0..self.amplitudes.len() {
                if i & bit != 0 {
                    continue;
                }
                let a0 = self.amplitudes[i];
                let mut a1 = self.amplitudes[i | bit];
                if label == Pauli::Y {
                    // S^dagger on the |1> component.
                    a1 = Complex64::new(a1.im, -a1.re);
                }
                self.amplitudes[i] = (a0 + a1) * s;
                self.amplitudes[i | bit] = (a0 - a1) * s;
            }
        }
    }

    /// Exact probability of every outcome string when measuring in `basis`.
    /// Entry `i` is the outcome whose qubit `k` reads -1 iff bit `n-1-k` of
    /// `i` is set.
    pub fn outcome_probabilities(&self, basis: &MeasurementBasis) -> Result<Vec<f64>> {
        Error::check_len(self.n, basis.num_qubits())?;
        let mut work = self.clone();
        work.rotate_into(basis);
        Ok(work.amplitudes.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Sample one outcome string for `basis`, one qubit at a time: rotate
    /// into the measurement frame, draw qubit `k` from its conditional
    /// probability, project and renormalize.
    pub fn measure<R: Rng + ?Sized>(&self, basis: &MeasurementBasis, rng: &mut R) -> Result<OutcomeRecord> {
        Error::check_len(self.n, basis.num_qubits())?;
        let norm2 = norm_sqr(&self.amplitudes);
        if (norm2 - 1.0).abs() > 1e-8 {
            return Err(Error::State(format!("cannot measure unnormalized state (norm^2 {norm2})")));
        }
        let mut work = self.clone();
        work.rotate_into(basis);
        let mut negative = vec![0u64; self.n.div_ceil(64)];
        let mut remaining = norm2;
        for k in 0..self.n {
            let bit = self.bit(k);
            let p0: f64 = work
                .amplitudes
                .iter()
                .enumerate()
                .filter(|(i, _)| i & bit == 0)
                .map(|(_, a)| a.norm_sqr())
                .sum::<f64>()
                / remaining;
            let plus = rng.random::<f64>() < p0;
            let kept = if plus { p0 } else { 1.0 - p0 };
            let scale = 1.0 / (kept * remaining).sqrt();
            for (i, a) in work.amplitudes.iter_mut().enumerate() {
                if (i & bit == 0) == plus {
                    *a *= scale;
                } else {
                    *a = Complex64::new(0.0, 0.0);
                }
            }
            remaining = 1.0;
            if !plus {
                negative[k / 64] |= 1 << (k % 64);
            }
        }
        Ok(OutcomeRecord::from_negative_mask(basis.clone(), negative))
    }

    /// Measure each row of `rows` on a fresh copy of the state.
    pub fn measure_schedule<R: Rng + ?Sized>(
        &self,
        rows: &[MeasurementBasis],
        rng: &mut R,
    ) -> Result<Vec<OutcomeRecord>> {
        rows.iter().map(|row| self.measure(row, rng)).collect()
    }
}
