//! Confidence bounds: the exact bound for a concrete schedule, its expectation
//! over uniformly random schedules, and its conditional expectation given a
//! partially fixed schedule.
//!
//! The functions here recompute everything from scratch. The derandomizer
//! keeps incremental state instead and uses these as reference values.

use crate::error::{Error, Result};
use crate::pauli::{MeasurementBasis, ObservableSet, Pauli, PauliObservable};

/// Above this exponent `exp(-x)` is evaluated through a log-sum-exp.
const LOG_SPACE_THRESHOLD: f64 = 700.0;

/// Accuracy and failure-probability parameters of the confidence bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostParams {
    epsilon: f64,
    nu: f64,
    delta: f64,
}

impl CostParams {
    /// `epsilon` must lie in `(0, 1]` and `delta` in `(0, 1)`.
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::Config(format!("epsilon must be in (0, 1], got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!("delta must be in (0, 1), got {delta}")));
        }
        Ok(CostParams {
            epsilon,
            nu: -(-0.5 * epsilon * epsilon).exp_m1(),
            delta,
        })
    }

    /// Parameters for bound evaluation only; `delta` is set to 0.05.
    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.05)
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `1 - exp(-epsilon^2 / 2)`.
    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Decay rate per hit, `epsilon^2 / 2`.
    #[inline]
    pub fn rate(&self) -> f64 {
        0.5 * self.epsilon * self.epsilon
    }
}

/// Table of `3^-r` for `r = 0..=n`.
#[derive(Clone, Debug)]
pub struct NegPow3 {
    table: Vec<f64>,
}

impl NegPow3 {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut value = 1.0f64;
        for _ in 0..=n {
            table.push(value);
            value /= 3.0;
        }
        NegPow3 { table }
    }

    #[inline]
    pub fn get(&self, r: usize) -> f64 {
        self.table[r]
    }
}

/// A schedule whose first `m - 1` rows are fixed and whose `m`-th row has its
/// first `k` labels fixed; everything else is uniformly random.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialAssignment {
    pub completed_rows: Vec<MeasurementBasis>,
    pub current_row: Vec<Pauli>,
    pub total_budget: usize,
}

impl PartialAssignment {
    pub fn new(
        completed_rows: Vec<MeasurementBasis>,
        current_row: Vec<Pauli>,
        total_budget: usize,
    ) -> Self {
        PartialAssignment {
            completed_rows,
            current_row,
            total_budget,
        }
    }

    /// 1-based index of the row being assigned.
    pub fn current_index(&self) -> usize {
        self.completed_rows.len() + 1
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.completed_rows.len() >= self.total_budget {
            return Err(Error::State(format!(
                "{} completed rows leave no current row within budget {}",
                self.completed_rows.len(),
                self.total_budget
            )));
        }
        if self.current_row.len() > n {
            return Err(Error::State(format!(
                "current row has {} labels for {n} qubits",
                self.current_row.len()
            )));
        }
        if self.current_row.contains(&Pauli::I) {
            return Err(Error::State("current row contains an identity label".into()));
        }
        for row in &self.completed_rows {
            if row.num_qubits() != n {
                return Err(Error::State(format!(
                    "completed row {row} has length {}, expected {n}",
                    row.num_qubits()
                )));
            }
        }
        Ok(())
    }
}

/// Number of rows that hit `o`.
pub fn hit_count(o: &PauliObservable, rows: &[MeasurementBasis]) -> Result<usize> {
    let mut count = 0;
    for row in rows {
        if o.is_hit_by(row)? {
            count += 1;
        }
    }
    Ok(count)
}

fn check_rows(observables: &ObservableSet, rows: &[MeasurementBasis]) -> Result<()> {
    rows.iter().try_for_each(|r| observables.check_basis(r))
}

/// Natural log of `sum_l exp(-exponents[l])`, stable for large exponents.
fn ln_sum_exp_neg(exponents: &[f64]) -> f64 {
    let min = exponents.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: f64 = exponents.iter().map(|&x| (min - x).exp()).sum();
    -min + shifted.ln()
}

/// `sum_l exp(-(eps^2/2) h(o_l; rows))`. Lies in `(0, L]` unless it underflows.
pub fn confidence_bound(
    observables: &ObservableSet,
    rows: &[MeasurementBasis],
    params: &CostParams,
) -> Result<f64> {
    check_rows(observables, rows)?;
    let exponents = confidence_exponents(observables, rows, params)?;
    if exponents.iter().all(|&x| x <= LOG_SPACE_THRESHOLD) {
        Ok(exponents.iter().map(|&x| (-x).exp()).sum())
    } else {
        Ok(ln_sum_exp_neg(&exponents).exp())
    }
}

/// `ln` of the confidence bound; finite even when the bound itself underflows.
pub fn ln_confidence_bound(
    observables: &ObservableSet,
    rows: &[MeasurementBasis],
    params: &CostParams,
) -> Result<f64> {
    check_rows(observables, rows)?;
    Ok(ln_sum_exp_neg(&confidence_exponents(observables, rows, params)?))
}

fn confidence_exponents(
    observables: &ObservableSet,
    rows: &[MeasurementBasis],
    params: &CostParams,
) -> Result<Vec<f64>> {
    observables
        .iter()
        .map(|o| Ok(params.rate() * hit_count(o, rows)? as f64))
        .collect()
}

/// Mean confidence bound over `budget` independent uniformly random bases:
/// `sum_l (1 - nu / 3^w(o_l))^budget`.
pub fn expected_confidence_bound(
    observables: &ObservableSet,
    budget: usize,
    params: &CostParams,
) -> f64 {
    let pow3 = NegPow3::new(observables.num_qubits());
    observables
        .iter()
        .map(|o| future_factor(params.nu(), pow3.get(o.weight()), budget))
        .sum()
}

/// `(1 - nu * p)^count`, with the power taken in log space.
fn future_factor(nu: f64, p: f64, count: usize) -> f64 {
    if count == 0 {
        1.0
    } else {
        ((-nu * p).ln_1p() * count as f64).exp()
    }
}

/// Conditional expectation of the confidence bound given a partial schedule.
///
/// Per observable this is the product of three factors: the decay from hits
/// on completed rows, the probability-weighted hit of the current row given
/// its fixed prefix, and the expected decay of the `M - m` future rows.
pub fn conditional_expected_bound(
    observables: &ObservableSet,
    partial: &PartialAssignment,
    params: &CostParams,
) -> Result<f64> {
    let n = observables.num_qubits();
    partial.validate(n)?;
    let k = partial.current_row.len();
    let future_rows = partial.total_budget - partial.current_index();
    let pow3 = NegPow3::new(n);
    let nu = params.nu();

    let mut total = 0.0;
    for o in observables {
        let hits = hit_count(o, &partial.completed_rows)?;
        let prefix_hit = partial
            .current_row
            .iter()
            .enumerate()
            .all(|(j, &p)| o.label(j).is_hit_by(p));
        let current = if prefix_hit {
            1.0 - nu * pow3.get(o.suffix_weight(k)?)
        } else {
            1.0
        };
        let past = (-params.rate() * hits as f64).exp();
        total += past * current * future_factor(nu, pow3.get(o.weight()), future_rows);
    }
    Ok(total)
}

/// Union-bound certificate: the bound guarantees `max_l |est_l - true_l| < eps`
/// with probability at least `1 - delta` once it is at most `delta / 2`.
pub fn is_certified(confidence: f64, params: &CostParams) -> bool {
    confidence <= 0.5 * params.delta()
}

/// Smallest hit count `h` with `L * exp(-(eps^2/2) h) <= delta / 2`.
pub fn hits_for_certificate(num_observables: usize, params: &CostParams) -> usize {
    let needed = (2.0 * num_observables as f64 / params.delta()).ln() / params.rate();
    needed.ceil().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn set(strings: &[&str]) -> ObservableSet {
        ObservableSet::from_strs(strings).unwrap()
    }

    fn rows(strings: &[&str]) -> Vec<MeasurementBasis> {
        strings.iter().map(|s| s.parse().unwrap()).collect()
    }

    fn all_bases(n: usize) -> Vec<MeasurementBasis> {
        (0..3usize.pow(n as u32))
            .map(|mut idx| {
                let labels: Vec<Pauli> = (0..n)
                    .map(|_| {
                        let p = Pauli::MEASURABLE[idx % 3];
                        idx /= 3;
                        p
                    })
                    .collect();
                MeasurementBasis::new(&labels).unwrap()
            })
            .collect()
    }

    #[test]
    fn hit_count_examples() {
        let o: PauliObservable = "XX".parse().unwrap();
        assert_eq!(hit_count(&o, &rows(&["XX", "ZZ", "XY"])).unwrap(), 1);
        let id: PauliObservable = "II".parse().unwrap();
        assert_eq!(hit_count(&id, &rows(&["XX", "ZZ", "XY", "YY"])).unwrap(), 4);
        let y: PauliObservable = "Y".parse().unwrap();
        assert_eq!(hit_count(&y, &[]).unwrap(), 0);
        assert!(hit_count(&y, &rows(&["XX"])).is_err());
    }

    #[test]
    fn params_nu() {
        let p = CostParams::new(0.9, 0.1).unwrap();
        assert!((p.nu() - (1.0 - (-0.405f64).exp())).abs() < 1e-15);
        assert!(CostParams::new(0.0, 0.1).is_err());
        assert!(CostParams::new(1.5, 0.1).is_err());
        assert!(CostParams::new(0.5, 1.0).is_err());
        assert!(CostParams::new(1.0, 0.5).is_ok());
    }

    #[test]
    fn confidence_bound_examples() {
        let p = CostParams::with_epsilon(0.9).unwrap();
        assert_eq!(confidence_bound(&set(&["XZ"]), &[], &p).unwrap(), 1.0);

        let p1 = CostParams::with_epsilon(1.0).unwrap();
        let c = confidence_bound(&set(&["XI", "IZ"]), &rows(&["XX", "YZ"]), &p1).unwrap();
        assert_relative_eq!(c, 2.0 * (-0.5f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(c, 1.21306, epsilon = 1e-5);
    }

    #[test]
    fn confidence_bound_product_form() {
        // sum_l prod_m (1 - nu 1{hit}) for every 3-row schedule at n = 2.
        let obs = set(&["XI", "ZZ", "IY", "II", "XY"]);
        let p = CostParams::with_epsilon(0.7).unwrap();
        let bases = all_bases(2);
        for a in &bases {
            for b in &bases {
                for c in &bases {
                    let sched = vec![a.clone(), b.clone(), c.clone()];
                    let product: f64 = obs
                        .iter()
                        .map(|o| {
                            sched
                                .iter()
                                .map(|r| if o.is_hit_by(r).unwrap() { 1.0 - p.nu() } else { 1.0 })
                                .product::<f64>()
                        })
                        .sum();
                    let direct = confidence_bound(&obs, &sched, &p).unwrap();
                    assert_relative_eq!(direct, product, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn confidence_bound_log_space_keeps_order() {
        let obs = set(&["Z"]);
        let p = CostParams::with_epsilon(1.0).unwrap();
        let many = vec!["Z".parse::<MeasurementBasis>().unwrap(); 3000];
        let more = vec!["Z".parse::<MeasurementBasis>().unwrap(); 3001];
        let a = ln_confidence_bound(&obs, &many, &p).unwrap();
        let b = ln_confidence_bound(&obs, &more, &p).unwrap();
        assert_relative_eq!(a, -1500.0, max_relative = 1e-12);
        assert!(b < a);
    }

    #[test]
    fn expected_bound_examples() {
        let p = CostParams::with_epsilon(0.9).unwrap();
        assert_relative_eq!(
            expected_confidence_bound(&set(&["XI"]), 1, &p),
            1.0 - p.nu() / 3.0,
            max_relative = 1e-15
        );
        assert_eq!(expected_confidence_bound(&set(&["XI", "ZZ", "YI"]), 0, &p), 3.0);

        // Exhaustive mean over the 9 two-row schedules at n = 1.
        let obs = set(&["X"]);
        let bases = all_bases(1);
        let mut sum = 0.0;
        for a in &bases {
            for b in &bases {
                sum += confidence_bound(&obs, &[a.clone(), b.clone()], &p).unwrap();
            }
        }
        assert_relative_eq!(expected_confidence_bound(&obs, 2, &p), sum / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn conditional_bound_endpoints() {
        let obs = set(&["XIZ", "YYI", "IIZ", "ZZZ"]);
        let p = CostParams::with_epsilon(0.6).unwrap();
        // No conditioning reproduces the plain expectation.
        let fresh = PartialAssignment::new(vec![], vec![], 4);
        assert_relative_eq!(
            conditional_expected_bound(&obs, &fresh, &p).unwrap(),
            expected_confidence_bound(&obs, 4, &p),
            max_relative = 1e-14
        );
        // Fully assigned reproduces the concrete bound.
        let full_rows = rows(&["XYZ", "YYZ", "ZZZ"]);
        let last = vec![Pauli::X, Pauli::X, Pauli::Z];
        let done = PartialAssignment::new(full_rows.clone(), last.clone(), 4);
        let mut all = full_rows;
        all.push(MeasurementBasis::new(&last).unwrap());
        assert_relative_eq!(
            conditional_expected_bound(&obs, &done, &p).unwrap(),
            confidence_bound(&obs, &all, &p).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn conditional_bound_matches_enumeration() {
        // n = 2, M = 2, one completed row, k = 1: average over the 3 labels
        // left in the current row.
        let obs = set(&["XY", "ZI", "IY"]);
        let p = CostParams::with_epsilon(0.8).unwrap();
        let first = rows(&["XZ"]);
        let partial = PartialAssignment::new(first.clone(), vec![Pauli::X], 2);
        let mut sum = 0.0;
        for w in Pauli::MEASURABLE {
            let mut sched = first.clone();
            sched.push(MeasurementBasis::new(&[Pauli::X, w]).unwrap());
            sum += confidence_bound(&obs, &sched, &p).unwrap();
        }
        assert_relative_eq!(
            conditional_expected_bound(&obs, &partial, &p).unwrap(),
            sum / 3.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn conditional_bound_rejects_bad_state() {
        let obs = set(&["XY"]);
        let p = CostParams::with_epsilon(0.8).unwrap();
        let over = PartialAssignment::new(rows(&["XX", "YY"]), vec![], 2);
        assert!(matches!(conditional_expected_bound(&obs, &over, &p), Err(Error::State(_))));
        let long = PartialAssignment::new(vec![], vec![Pauli::X; 3], 2);
        assert!(matches!(conditional_expected_bound(&obs, &long, &p), Err(Error::State(_))));
        let wrong = PartialAssignment::new(rows(&["XXX"]), vec![], 2);
        assert!(matches!(conditional_expected_bound(&obs, &wrong, &p), Err(Error::State(_))));
    }

    #[test]
    fn tower_property_small() {
        // Averaging the next label's three choices leaves the bound unchanged.
        let obs = set(&["XYI", "ZZZ", "IIX", "YIY"]);
        let p = CostParams::with_epsilon(0.9).unwrap();
        let n = 3;
        for budget in 1..=3usize {
            let all = all_bases(n);
            for done in 0..budget {
                // a handful of deterministic completed prefixes
                let completed: Vec<MeasurementBasis> =
                    (0..done).map(|i| all[(7 * i + 3) % all.len()].clone()).collect();
                for k in 0..n {
                    let prefix: Vec<Pauli> = (0..k).map(|j| Pauli::MEASURABLE[(j + done) % 3]).collect();
                    let before = conditional_expected_bound(
                        &obs,
                        &PartialAssignment::new(completed.clone(), prefix.clone(), budget),
                        &p,
                    )
                    .unwrap();
                    let mean: f64 = Pauli::MEASURABLE
                        .iter()
                        .map(|&w| {
                            let mut next = prefix.clone();
                            next.push(w);
                            conditional_expected_bound(
                                &obs,
                                &PartialAssignment::new(completed.clone(), next, budget),
                                &p,
                            )
                            .unwrap()
                        })
                        .sum::<f64>()
                        / 3.0;
                    assert_relative_eq!(before, mean, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn appending_rows_never_increases_bound() {
        let obs = set(&["XYI", "ZZZ", "IIX"]);
        let p = CostParams::with_epsilon(0.5).unwrap();
        let mut sched = Vec::new();
        let mut last = confidence_bound(&obs, &sched, &p).unwrap();
        assert_eq!(last, 3.0);
        for b in all_bases(3) {
            sched.push(b);
            let now = confidence_bound(&obs, &sched, &p).unwrap();
            assert!(now <= last);
            assert!(now <= 3.0);
            last = now;
        }
    }

    #[test]
    fn certificate_threshold() {
        let p = CostParams::new(0.2, 0.05).unwrap();
        let h = hits_for_certificate(4, &p);
        let obs = set(&["XXX", "ZZI", "IZZ", "ZII"]);
        let enough = vec!["ZZZ".parse::<MeasurementBasis>().unwrap(); h];
        // Only the Z-type observables are hit, so the XXX term stays at 1.
        let c = confidence_bound(&obs, &enough, &p).unwrap();
        assert!(!is_certified(c, &p));
        let per_term = (-p.rate() * h as f64).exp();
        assert!(4.0 * per_term <= 0.5 * p.delta());
        let fewer = (-p.rate() * (h - 1) as f64).exp();
        assert!(4.0 * fewer > 0.5 * p.delta());
    }
}
