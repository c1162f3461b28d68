use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{ObservableSet, Pauli, PauliObservable};

use super::check_capacity;

/// Action of a Pauli string on computational basis states:
/// `P|i> = phase(i) |i ^ flip>`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliAction {
    flip: usize,
    sign_mask: usize,
    y_phase: Complex64,
}

impl PauliAction {
    pub(crate) fn new(o: &PauliObservable) -> Self {
        let n = o.num_qubits();
        let mut flip = 0;
        let mut sign_mask = 0;
        let mut y_count = 0;
        for k in 0..n {
            let bit = 1usize << (n - 1 - k);
            match o.label(k) {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign_mask |= bit;
                    y_count += 1;
                }
                Pauli::Z => sign_mask |= bit,
            }
        }
        let y_phase = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        PauliAction {
            flip,
            sign_mask,
            y_phase,
        }
    }

    #[inline]
    pub(crate) fn apply_to_index(&self, i: usize) -> (usize, Complex64) {
        let phase = if (i & self.sign_mask).count_ones().is_multiple_of(2) {
            self.y_phase
        } else {
            -self.y_phase
        };
        (i ^ self.flip, phase)
    }
}

/// `H = sum_P alpha_P P` over the terms of an observable set.
#[derive(Clone, Debug)]
pub struct PauliSumHamiltonian {
    terms: ObservableSet,
    actions: Vec<(f64, PauliAction)>,
}

impl PauliSumHamiltonian {
    pub fn new(terms: ObservableSet) -> Result<Self> {
        check_capacity("hamiltonian", terms.num_qubits())?;
        for (l, t) in terms.iter().enumerate() {
            if !t.coefficient().is_finite() {
                return Err(Error::Domain(format!("term {l} has a non-finite coefficient")));
            }
        }
        let actions = terms
            .iter()
            .map(|t| (t.coefficient(), PauliAction::new(t)))
            .collect();
        Ok(PauliSumHamiltonian { terms, actions })
    }

    pub fn num_qubits(&self) -> usize {
        self.terms.num_qubits()
    }

    pub fn dimension(&self) -> usize {
        1 << self.num_qubits()
    }

    pub fn terms(&self) -> &ObservableSet {
        &self.terms
    }

    /// `out = H v`.
    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        for &(alpha, action) in &self.actions {
            for (i, &a) in v.iter().enumerate() {
                let (j, phase) = action.apply_to_index(i);
                out[j] += phase * a * alpha;
            }
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_into(v, &mut out);
        out
    }

    /// `<v|H|v>` for a normalized `v`.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        self.apply(v)
            .iter()
            .zip(v)
            .map(|(hv, a)| (a.conj() * hv).re)
            .sum()
    }
}
