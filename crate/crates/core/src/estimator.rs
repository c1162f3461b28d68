//! Expectation-value estimates from measurement outcomes.
//!
//! An observable's estimate is the mean, over the rows that hit it, of the
//! product of outcome signs on its support. Observables no row hits get the
//! estimate 0 and are flagged.

use crate::confidence::{confidence_bound, is_certified, CostParams};
use crate::error::{Error, Result};
use crate::pauli::{MeasurementBasis, ObservableSet, Pauli, PauliObservable};

/// Outcome signs of one measurement, paired with its basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeRecord {
    basis: MeasurementBasis,
    signs: Vec<i8>,
    /// Bit `k` set when qubit `k` gave -1.
    negative: Vec<u64>,
}

impl OutcomeRecord {
    pub fn new(basis: MeasurementBasis, signs: Vec<i8>) -> Result<Self> {
        Error::check_len(basis.num_qubits(), signs.len())?;
        let mut negative = vec![0u64; signs.len().div_ceil(64)];
        for (k, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => negative[k / 64] |= 1 << (k % 64),
                other => {
                    return Err(Error::Domain(format!("outcome sign must be +1 or -1, got {other}")))
                }
            }
        }
        Ok(OutcomeRecord {
            basis,
            signs,
            negative,
        })
    }

    /// From a basis and a bit mask over qubits, bit `k` (of `u64` words) set
    /// when qubit `k` gave -1.
    pub(crate) fn from_negative_mask(basis: MeasurementBasis, negative: Vec<u64>) -> Self {
        let n = basis.num_qubits();
        let signs = (0..n)
            .map(|k| if negative[k / 64] >> (k % 64) & 1 == 1 { -1 } else { 1 })
            .collect();
        OutcomeRecord {
            basis,
            signs,
            negative,
        }
    }

    pub fn basis(&self) -> &MeasurementBasis {
        &self.basis
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Product of signs over the support of `o`, as +1 or -1.
    pub fn parity(&self, support: &[u64]) -> i64 {
        let ones: u32 = self
            .negative
            .iter()
            .zip(support)
            .map(|(&neg, &s)| (neg & s).count_ones())
            .sum();
        if ones.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// One bit per qubit, set where `o` is not the identity.
pub fn support_mask(o: &PauliObservable) -> Vec<u64> {
    let n = o.num_qubits();
    let mut mask = vec![0u64; n.div_ceil(64)];
    for k in 0..n {
        if o.label(k) != Pauli::I {
            mask[k / 64] |= 1 << (k % 64);
        }
    }
    mask
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservableEstimate {
    pub coefficient: f64,
    pub estimate: f64,
    pub hits: usize,
    pub never_hit: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub entries: Vec<ObservableEstimate>,
    /// `sum_l alpha_l * estimate_l`.
    pub energy: f64,
    /// `sum_l |alpha_l| * epsilon`: the error bar implied by a certificate.
    pub energy_error_bar: f64,
    pub confidence: f64,
    pub certified: bool,
    pub never_hit_count: usize,
    pub epsilon: f64,
    pub delta: f64,
}

/// Estimate every observable in `observables` from `outcomes`.
pub fn estimate_all(
    observables: &ObservableSet,
    outcomes: &[OutcomeRecord],
    params: &CostParams,
) -> Result<EstimateReport> {
    if outcomes.is_empty() {
        return Err(Error::Domain("no measurement outcomes".into()));
    }
    for record in outcomes {
        observables.check_basis(&record.basis)?;
    }

    let mut entries = Vec::with_capacity(observables.len());
    for o in observables {
        let support = support_mask(o);
        let mut hits = 0usize;
        let mut sign_sum = 0i64;
        for record in outcomes {
            if o.labels().is_hit_by(record.basis.labels()) {
                hits += 1;
                sign_sum += record.parity(&support);
            }
        }
        let estimate = if hits == 0 { 0.0 } else { sign_sum as f64 / hits as f64 };
        entries.push(ObservableEstimate {
            coefficient: o.coefficient(),
            estimate,
            hits,
            never_hit: hits == 0,
        });
    }

    let energy = entries.iter().map(|e| e.coefficient * e.estimate).sum();
    let energy_error_bar = entries.iter().map(|e| e.coefficient.abs()).sum::<f64>() * params.epsilon();
    let rows: Vec<MeasurementBasis> = outcomes.iter().map(|r| r.basis.clone()).collect();
    let confidence = confidence_bound(observables, &rows, params)?;
    let never_hit_count = entries.iter().filter(|e| e.never_hit).count();

    Ok(EstimateReport {
        entries,
        energy,
        energy_error_bar,
        confidence,
        certified: is_certified(confidence, params),
        never_hit_count,
        epsilon: params.epsilon(),
        delta: params.delta(),
    })
}

/// Root-mean-square deviation of `estimates` from `reference`.
pub fn rmse(estimates: &[f64], reference: f64) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::Domain("rmse of an empty list".into()));
    }
    let sum: f64 = estimates.iter().map(|e| (e - reference).powi(2)).sum();
    Ok((sum / estimates.len() as f64).sqrt())
}
