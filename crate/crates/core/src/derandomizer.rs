//! Greedy label-by-label derandomization of random Pauli measurements.
//!
//! The schedule is filled row by row, qubit by qubit. At each position the
//! three candidate labels are scored by a cost that factorizes over
//! observables, and the cheapest label is fixed. Two costs are supported:
//!
//! * fixed budget: the conditional expectation of the confidence bound given
//!   the labels fixed so far, with all remaining labels uniformly random;
//! * budget free: the same expression without the factor for future rows,
//!   optionally with each observable's exponent divided by its relative
//!   coefficient magnitude.
//!
//! Per-observable state (hits on completed rows, whether the current row is
//! still compatible, remaining weight) is kept incrementally, so one
//! position costs `O(L)` and a full run `O(n M L)`.

use log::warn;

use crate::confidence::{CostParams, NegPow3};
use crate::error::{Error, Result};
use crate::pauli::{MeasurementBasis, ObservableSet, Pauli, PauliObservable};
use crate::schedule::{Schedule, ScheduleOrigin};

/// Relative tolerance below which two label costs count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Hyperparameters of the budget-free cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetFreeParams {
    eta: f64,
    nu: f64,
}

impl BudgetFreeParams {
    pub const DEFAULT_ETA: f64 = 0.9;

    /// `nu` defaults to `1 - exp(-eta / 2)`.
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {eta}")));
        }
        Self::with_nu(eta, -(-0.5 * eta).exp_m1())
    }

    pub fn with_nu(eta: f64, nu: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {eta}")));
        }
        if !(nu > 0.0 && nu < 1.0) {
            return Err(Error::Config(format!("nu must be in (0, 1), got {nu}")));
        }
        Ok(BudgetFreeParams { eta, nu })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl Default for BudgetFreeParams {
    fn default() -> Self {
        Self::new(Self::DEFAULT_ETA).expect("default eta is valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostMode {
    FixedBudget(CostParams),
    BudgetFree(BudgetFreeParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerandConfig {
    pub mode: CostMode,
    /// Number of rows (fixed budget) or the hard cap (budget free).
    pub budget: usize,
    /// Divide each exponent by `|alpha_l| / max_p |alpha_p|` (budget free only).
    pub weighted: bool,
    /// Budget-free stopping rule: stop once every observable is hit this often.
    pub min_hits: Option<usize>,
}

impl DerandConfig {
    pub fn fixed_budget(budget: usize, params: CostParams) -> Self {
        DerandConfig {
            mode: CostMode::FixedBudget(params),
            budget,
            weighted: false,
            min_hits: None,
        }
    }

    pub fn budget_free(cap: usize, params: BudgetFreeParams) -> Self {
        DerandConfig {
            mode: CostMode::BudgetFree(params),
            budget: cap,
            weighted: false,
            min_hits: None,
        }
    }

    pub fn weighted(mut self, weighted: bool) -> Self {
        self.weighted = weighted;
        self
    }

    pub fn min_hits(mut self, min_hits: usize) -> Self {
        self.min_hits = Some(min_hits);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("measurement budget must be at least 1".into()));
        }
        if let CostMode::FixedBudget(_) = self.mode {
            if self.weighted {
                return Err(Error::Config(
                    "coefficient weighting is only defined for the budget-free cost".into(),
                ));
            }
            if self.min_hits.is_some() {
                return Err(Error::Config(
                    "a min-hits stopping rule needs the budget-free cost".into(),
                ));
            }
        }
        if self.min_hits == Some(0) {
            return Err(Error::Config("min hits must be positive".into()));
        }
        Ok(())
    }
}

/// Result of a derandomization run.
#[derive(Clone, Debug)]
pub struct DerandOutcome {
    pub schedule: Schedule,
    /// Hits per observable of the input set, in input order.
    pub hit_counts: Vec<usize>,
    /// `false` only when a min-hits rule was set and the cap was reached first.
    pub satisfied: bool,
    /// Final cost: the confidence bound (fixed budget) or `C` (budget free).
    pub final_cost: f64,
    /// Input indices left out of the cost (zero coefficients in weighted mode).
    pub dropped: Vec<usize>,
}

impl DerandOutcome {
    pub fn min_hits(&self) -> usize {
        let dropped = &self.dropped;
        self.hit_counts
            .iter()
            .enumerate()
            .filter(|(i, _)| !dropped.contains(i))
            .map(|(_, &h)| h)
            .min()
            .unwrap_or(0)
    }
}

/// Per-observable state behind the incremental cost.
#[derive(Clone, Debug, Default)]
pub struct ObservableTracker {
    hits: Vec<usize>,
    prefix_alive: Vec<bool>,
    remaining_weight: Vec<usize>,
    weight: Vec<usize>,
}

impl ObservableTracker {
    fn new(observables: &[&PauliObservable]) -> Self {
        let weight: Vec<usize> = observables.iter().map(|o| o.weight()).collect();
        ObservableTracker {
            hits: vec![0; observables.len()],
            prefix_alive: vec![true; observables.len()],
            remaining_weight: weight.clone(),
            weight,
        }
    }

    pub fn len(&self) -> usize {
        self.hits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hits.is_empty()
    }

    /// Hits on completed rows.
    pub fn hits_so_far(&self, l: usize) -> usize {
        self.hits[l]
    }

    /// Whether the current row is still compatible on its assigned prefix.
    pub fn prefix_alive(&self, l: usize) -> bool {
        self.prefix_alive[l]
    }

    /// Weight of the unassigned suffix of the current row.
    pub fn remaining_weight(&self, l: usize) -> usize {
        self.remaining_weight[l]
    }

    fn start_row(&mut self) {
        self.prefix_alive.fill(true);
        self.remaining_weight.copy_from_slice(&self.weight);
    }
}

/// Step-wise greedy derandomizer.
///
/// Observables with a zero coefficient are dropped in weighted mode; the
/// tracker indices refer to the remaining ones (see [`Derandomizer::active`]).
pub struct Derandomizer<'a> {
    n: usize,
    config: DerandConfig,
    observables: Vec<&'a PauliObservable>,
    active: Vec<usize>,
    dropped: Vec<usize>,
    inv_weight: Vec<f64>,
    /// ln(1 - nu 3^-w) per observable; only used with a fixed budget.
    ln_future: Vec<f64>,
    tracker: ObservableTracker,
    /// Per-observable cost factor from completed and future rows, divided by `exp(shift)`.
    outer: Vec<f64>,
    shift: f64,
    /// 1 - nu 3^-r and its logarithm, r = 0..=n.
    middle: Vec<f64>,
    ln_middle: Vec<f64>,
    rows: Vec<MeasurementBasis>,
    current: Vec<Pauli>,
    finished: bool,
    satisfied: bool,
}

impl<'a> Derandomizer<'a> {
    pub fn new(observables: &'a ObservableSet, config: DerandConfig) -> Result<Self> {
        config.validate()?;
        let n = observables.num_qubits();

        let mut active = Vec::with_capacity(observables.len());
        let mut dropped = Vec::new();
        for (l, o) in observables.iter().enumerate() {
            if !o.coefficient().is_finite() {
                return Err(Error::Domain(format!(
                    "observable {l} has non-finite coefficient {}",
                    o.coefficient()
                )));
            }
            if config.weighted && o.coefficient() == 0.0 {
                dropped.push(l);
            } else {
                active.push(l);
            }
        }
        if active.is_empty() {
            return Err(Error::Domain("every observable has a zero coefficient".into()));
        }
        let selected: Vec<&PauliObservable> = active.iter().map(|&l| &observables[l]).collect();
        for (&l, o) in active.iter().zip(&selected) {
            if o.is_identity() {
                warn!("observable {l} is the identity; it is hit by every measurement");
            }
        }

        let inv_weight = if config.weighted {
            let max = selected
                .iter()
                .map(|o| o.coefficient().abs())
                .fold(0.0f64, f64::max);
            selected
                .iter()
                .map(|o| max / o.coefficient().abs())
                .collect()
        } else {
            vec![1.0; selected.len()]
        };

        let nu = match config.mode {
            CostMode::FixedBudget(p) => p.nu(),
            CostMode::BudgetFree(p) => p.nu(),
        };
        let pow3 = NegPow3::new(n);
        let middle: Vec<f64> = (0..=n).map(|r| 1.0 - nu * pow3.get(r)).collect();
        let ln_middle: Vec<f64> = (0..=n).map(|r| (-nu * pow3.get(r)).ln_1p()).collect();
        let tracker = ObservableTracker::new(&selected);
        let ln_future = tracker.weight.iter().map(|&w| ln_middle[w]).collect();

        let mut derandomizer = Derandomizer {
            n,
            outer: vec![0.0; selected.len()],
            shift: 0.0,
            rows: Vec::with_capacity(config.budget),
            current: Vec::with_capacity(n),
            config,
            observables: selected,
            active,
            dropped,
            inv_weight,
            ln_future,
            tracker,
            middle,
            ln_middle,
            finished: false,
            satisfied: true,
        };
        derandomizer.start_row();
        Ok(derandomizer)
    }

    pub fn tracker(&self) -> &ObservableTracker {
        &self.tracker
    }

    /// Input indices of the observables that enter the cost.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn rows(&self) -> &[MeasurementBasis] {
        &self.rows
    }

    pub fn current_row(&self) -> &[Pauli] {
        &self.current
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// `(k, m)`: labels already fixed in the current row and the 1-based
    /// index of that row.
    pub fn position(&self) -> (usize, usize) {
        (self.current.len(), self.rows.len() + 1)
    }

    /// Budget-free exponent `V(o_l)` for tracker index `l` at the current
    /// position (before the next label is fixed). Between rows this is
    /// `(eta / 2) h(o_l)`.
    pub fn budget_free_exponent(&self, l: usize) -> Option<f64> {
        let CostMode::BudgetFree(params) = self.config.mode else {
            return None;
        };
        let completed = 0.5 * params.eta() * self.tracker.hits[l] as f64;
        if self.current.is_empty() || !self.tracker.prefix_alive[l] {
            return Some(completed);
        }
        Some(completed - self.ln_middle[self.tracker.remaining_weight[l]])
    }

    fn start_row(&mut self) {
        self.tracker.start_row();
        self.current.clear();
        let m = self.rows.len() + 1;
        match self.config.mode {
            CostMode::FixedBudget(params) => {
                let future_rows = (self.config.budget - m) as f64;
                for l in 0..self.outer.len() {
                    self.outer[l] = -params.rate() * self.tracker.hits[l] as f64
                        + future_rows * self.ln_future[l];
                }
            }
            CostMode::BudgetFree(params) => {
                let half_eta = 0.5 * params.eta();
                for l in 0..self.outer.len() {
                    self.outer[l] = -half_eta * self.tracker.hits[l] as f64 * self.inv_weight[l];
                }
            }
        }
        self.shift = self.outer.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for value in self.outer.iter_mut() {
            *value = (*value - self.shift).exp();
        }
    }

    #[inline]
    fn middle_factor(&self, l: usize, remaining: usize) -> f64 {
        if self.config.weighted {
            (self.ln_middle[remaining] * self.inv_weight[l]).exp()
        } else {
            self.middle[remaining]
        }
    }

    /// Costs of fixing X, Y, Z at the next position, divided by `exp(shift)`.
    fn scaled_label_costs(&self) -> [f64; 3] {
        let j = self.current.len();
        let mut costs = [0.0f64; 3];
        for (l, o) in self.observables.iter().enumerate() {
            let outer = self.outer[l];
            if !self.tracker.prefix_alive[l] {
                for c in costs.iter_mut() {
                    *c += outer;
                }
                continue;
            }
            let rw = self.tracker.remaining_weight[l];
            match o.label(j).measurable_index() {
                None => {
                    let term = outer * self.middle_factor(l, rw);
                    for c in costs.iter_mut() {
                        *c += term;
                    }
                }
                Some(hit) => {
                    let term = outer * self.middle_factor(l, rw - 1);
                    for (w, c) in costs.iter_mut().enumerate() {
                        *c += if w == hit { term } else { outer };
                    }
                }
            }
        }
        costs
    }

    /// Cost `f(W)` of each candidate label `[X, Y, Z]` at the next position.
    pub fn label_costs(&self) -> Result<[f64; 3]> {
        if self.finished {
            return Err(Error::State("derandomizer has finished".into()));
        }
        let scale = self.shift.exp();
        Ok(self.scaled_label_costs().map(|c| c * scale))
    }

    /// Cost at the current position before the next label is fixed.
    pub fn current_cost(&self) -> f64 {
        let mut total = 0.0;
        for l in 0..self.observables.len() {
            total += if self.tracker.prefix_alive[l] {
                self.outer[l] * self.middle_factor(l, self.tracker.remaining_weight[l])
            } else {
                self.outer[l]
            };
        }
        total * self.shift.exp()
    }

    /// Greedy choice: first label in X, Y, Z order that no later label beats
    /// by more than the tie tolerance.
    pub fn choose(&self) -> Result<Pauli> {
        if self.finished {
            return Err(Error::State("derandomizer has finished".into()));
        }
        Ok(Pauli::MEASURABLE[argmin_with_ties(&self.scaled_label_costs())])
    }

    /// Fix `label` at the next position.
    pub fn assign(&mut self, label: Pauli) -> Result<()> {
        if self.finished {
            return Err(Error::State("derandomizer has finished".into()));
        }
        if label == Pauli::I {
            return Err(Error::State("cannot assign the identity label".into()));
        }
        let j = self.current.len();
        for (l, o) in self.observables.iter().enumerate() {
            let target = o.label(j);
            if target != Pauli::I {
                self.tracker.remaining_weight[l] -= 1;
                if target != label {
                    self.tracker.prefix_alive[l] = false;
                }
            }
        }
        self.current.push(label);
        if self.current.len() == self.n {
            self.complete_row();
        }
        Ok(())
    }

    /// Choose and fix the next label.
    pub fn step(&mut self) -> Result<Pauli> {
        let label = self.choose()?;
        self.assign(label)?;
        Ok(label)
    }

    fn complete_row(&mut self) {
        for (hits, &alive) in self.tracker.hits.iter_mut().zip(&self.tracker.prefix_alive) {
            if alive {
                *hits += 1;
            }
        }
        let row = MeasurementBasis::new(&self.current).expect("row holds only X, Y, Z labels");
        self.rows.push(row);
        self.current.clear();

        if let Some(target) = self.config.min_hits {
            if self.tracker.hits.iter().all(|&h| h >= target) {
                self.finished = true;
                return;
            }
        }
        if self.rows.len() == self.config.budget {
            self.finished = true;
            self.satisfied = self.config.min_hits.is_none();
            return;
        }
        self.start_row();
    }

    /// Cost of the completed rows alone: the confidence bound with a fixed
    /// budget, `sum_l exp(-V_l / w_l)` without one.
    pub fn completed_cost(&self) -> f64 {
        let per_hit = match self.config.mode {
            CostMode::FixedBudget(p) => p.rate(),
            CostMode::BudgetFree(p) => 0.5 * p.eta(),
        };
        self.tracker
            .hits
            .iter()
            .zip(&self.inv_weight)
            .map(|(&h, &iw)| (-per_hit * h as f64 * iw).exp())
            .sum()
    }

    /// Run to completion.
    pub fn run(mut self, all: &ObservableSet) -> Result<DerandOutcome> {
        while !self.finished {
            self.step()?;
        }
        let final_cost = self.completed_cost();
        let mut hit_counts = vec![0usize; all.len()];
        for (t, &l) in self.active.iter().enumerate() {
            hit_counts[l] = self.tracker.hits[t];
        }
        for &l in &self.dropped {
            hit_counts[l] = crate::confidence::hit_count(&all[l], &self.rows)?;
        }
        let schedule = Schedule::new(self.n, self.rows, ScheduleOrigin::Derandomized)?;
        Ok(DerandOutcome {
            schedule,
            hit_counts,
            satisfied: self.satisfied,
            final_cost,
            dropped: self.dropped,
        })
    }
}

/// Index of the minimum, keeping the earliest entry unless a later one is
/// smaller by more than [`TIE_TOLERANCE`] (relative).
pub fn argmin_with_ties(costs: &[f64; 3]) -> usize {
    let mut best = 0;
    for w in 1..3 {
        if costs[w] < costs[best] - TIE_TOLERANCE * costs[best].abs() {
            best = w;
        }
    }
    best
}

/// Build a deterministic schedule for `observables` with the greedy rule.
pub fn derandomize(observables: &ObservableSet, config: DerandConfig) -> Result<DerandOutcome> {
    Derandomizer::new(observables, config)?.run(observables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confidence::{conditional_expected_bound, confidence_bound, hit_count, PartialAssignment};
    use approx::assert_relative_eq;

    fn set(strings: &[&str]) -> ObservableSet {
        ObservableSet::from_strs(strings).unwrap()
    }

    fn fixed(budget: usize, epsilon: f64) -> DerandConfig {
        DerandConfig::fixed_budget(budget, CostParams::with_epsilon(epsilon).unwrap())
    }

    #[test]
    fn global_pair_first_label_prefers_y_or_z() {
        let obs = set(&["YYYY", "ZZZZ"]);
        let d = Derandomizer::new(&obs, fixed(4, 0.9)).unwrap();
        let [fx, fy, fz] = d.label_costs().unwrap();
        assert_eq!(fy, fz);
        assert!(fy < fx);
        assert_eq!(d.choose().unwrap(), Pauli::Y);
    }

    #[test]
    fn global_pair_second_row_prefers_z() {
        let obs = set(&["YYYY", "ZZZZ"]);
        let mut d = Derandomizer::new(&obs, fixed(4, 0.9)).unwrap();
        for _ in 0..4 {
            d.assign(Pauli::Y).unwrap();
        }
        assert_eq!(d.position(), (0, 2));
        let [fx, fy, fz] = d.label_costs().unwrap();
        assert!(fz < fy && fy < fx, "{fx} {fy} {fz}");
    }

    #[test]
    fn label_irrelevant_position_ties() {
        let obs = set(&["XIZ", "ZIY", "YII"]);
        let mut d = Derandomizer::new(&obs, fixed(3, 0.7)).unwrap();
        d.assign(Pauli::X).unwrap();
        let [fx, fy, fz] = d.label_costs().unwrap();
        assert_eq!(fx, fy);
        assert_eq!(fy, fz);
    }

    #[test]
    fn global_pair_alternates() {
        let obs = set(&["YYY", "ZZZ"]);
        let out = derandomize(&obs, fixed(4, 0.9)).unwrap();
        let rows: Vec<String> = out.schedule.rows().iter().map(|r| r.to_string()).collect();
        assert_eq!(rows, ["YYY", "ZZZ", "YYY", "ZZZ"]);
        assert_eq!(out.hit_counts, vec![2, 2]);
    }

    #[test]
    fn single_observable_schedule() {
        let obs = set(&["XI"]);
        let out = derandomize(&obs, fixed(3, 0.9)).unwrap();
        for row in out.schedule.rows() {
            assert_eq!(row.to_string(), "XX");
        }
    }

    #[test]
    fn incremental_costs_match_scratch_oracle() {
        let obs = set(&["XYIZ", "ZZII", "IIXX", "YIYI", "XXXX", "IIIZ", "IIII"]);
        let params = CostParams::with_epsilon(0.8).unwrap();
        let budget = 4;
        let mut d = Derandomizer::new(&obs, DerandConfig::fixed_budget(budget, params)).unwrap();
        while !d.is_finished() {
            let costs = d.label_costs().unwrap();
            let before = conditional_expected_bound(
                &obs,
                &PartialAssignment::new(d.rows().to_vec(), d.current_row().to_vec(), budget),
                &params,
            )
            .unwrap();
            assert_relative_eq!(d.current_cost(), before, max_relative = 1e-12);
            for (w, &cost) in Pauli::MEASURABLE.iter().zip(&costs) {
                let mut next = d.current_row().to_vec();
                next.push(*w);
                let scratch = conditional_expected_bound(
                    &obs,
                    &PartialAssignment::new(d.rows().to_vec(), next, budget),
                    &params,
                )
                .unwrap();
                assert_relative_eq!(cost, scratch, max_relative = 1e-12);
            }
            let chosen = d.choose().unwrap();
            let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
            let chosen_cost = costs[chosen.measurable_index().unwrap()];
            assert!(chosen_cost <= min * (1.0 + 1e-12));
            assert!(chosen_cost <= before * (1.0 + 1e-12));
            d.assign(chosen).unwrap();
            for (l, o) in obs.iter().enumerate() {
                assert_eq!(d.tracker().hits_so_far(l), hit_count(o, d.rows()).unwrap());
            }
        }
    }

    #[test]
    fn budget_free_exponent_accounting() {
        let obs = ObservableSet::new(
            ["0.5 XYIZ", "-2 ZZII", "1 IIXX", "0.1 YIYI", "0.7 XXXX"]
                .iter()
                .map(|s| s.parse().unwrap())
                .collect(),
        )
        .unwrap();
        let params = BudgetFreeParams::default();
        let config = DerandConfig::budget_free(25, params).weighted(true);
        let mut d = Derandomizer::new(&obs, config).unwrap();
        while !d.is_finished() {
            d.step().unwrap();
        }
        for l in 0..obs.len() {
            let h = hit_count(&obs[l], d.rows()).unwrap();
            let v = d.budget_free_exponent(l).unwrap();
            assert_eq!(v, 0.5 * params.eta() * h as f64);
        }
    }

    #[test]
    fn budget_free_cost_matches_definition() {
        let obs = ObservableSet::new(
            ["0.5 XYZ", "-2 ZZI", "1 IXX"].iter().map(|s| s.parse().unwrap()).collect(),
        )
        .unwrap();
        let params = BudgetFreeParams::default();
        let mut d = Derandomizer::new(&obs, DerandConfig::budget_free(5, params).weighted(true)).unwrap();
        let max_alpha = 2.0f64;
        for _ in 0..7 {
            let costs = d.label_costs().unwrap();
            for (w, &cost) in Pauli::MEASURABLE.iter().zip(&costs) {
                let mut row = d.current_row().to_vec();
                row.push(*w);
                let k = row.len();
                let expected: f64 = obs
                    .iter()
                    .map(|o| {
                        let h = hit_count(o, d.rows()).unwrap() as f64;
                        let alive = row.iter().enumerate().all(|(j, &p)| o.label(j).is_hit_by(p));
                        let tail = o.suffix_weight(k).unwrap() as i32;
                        let partial = if alive { params.nu() * 3f64.powi(-tail) } else { 0.0 };
                        let v = 0.5 * params.eta() * h - (1.0 - partial).ln();
                        (-v / (o.coefficient().abs() / max_alpha)).exp()
                    })
                    .sum();
                assert_relative_eq!(cost, expected, max_relative = 1e-12);
            }
            d.step().unwrap();
        }
    }

    #[test]
    fn min_hits_stopping_rule() {
        let obs = set(&["ZZ", "XX", "XI"]);
        let config = DerandConfig::budget_free(100, BudgetFreeParams::default()).min_hits(3);
        let out = derandomize(&obs, config).unwrap();
        assert!(out.satisfied);
        assert!(out.hit_counts.iter().all(|&h| h >= 3));
        assert!(out.schedule.len() < 100);

        let config = DerandConfig::budget_free(2, BudgetFreeParams::default()).min_hits(3);
        let out = derandomize(&obs, config).unwrap();
        assert!(!out.satisfied);
        assert_eq!(out.schedule.len(), 2);
    }

    #[test]
    fn weighted_drops_zero_coefficients() {
        let obs = ObservableSet::new(
            ["0 XX", "1 ZZ", "0.5 YY"].iter().map(|s| s.parse().unwrap()).collect(),
        )
        .unwrap();
        let out = derandomize(&obs, DerandConfig::budget_free(6, BudgetFreeParams::default()).weighted(true)).unwrap();
        assert_eq!(out.dropped, vec![0]);
        assert_eq!(out.hit_counts[0], hit_count(&obs[0], out.schedule.rows()).unwrap());
        // Larger coefficient gets measured at least as often.
        assert!(out.hit_counts[1] >= out.hit_counts[2]);

        let zeros = ObservableSet::new(vec!["0 XX".parse().unwrap()]).unwrap();
        assert!(derandomize(&zeros, DerandConfig::budget_free(2, BudgetFreeParams::default()).weighted(true)).is_err());
    }

    #[test]
    fn config_validation() {
        let obs = set(&["XX"]);
        assert!(derandomize(&obs, fixed(0, 0.5)).is_err());
        assert!(derandomize(&obs, fixed(2, 0.5).weighted(true)).is_err());
        assert!(derandomize(&obs, fixed(2, 0.5).min_hits(2)).is_err());
        assert!(BudgetFreeParams::new(-1.0).is_err());
        assert!(BudgetFreeParams::with_nu(0.9, 1.5).is_err());
    }

    #[test]
    fn finished_derandomizer_rejects_steps() {
        let obs = set(&["X"]);
        let mut d = Derandomizer::new(&obs, fixed(1, 0.5)).unwrap();
        d.step().unwrap();
        assert!(d.is_finished());
        assert!(d.step().is_err());
        assert!(d.label_costs().is_err());
    }

    #[test]
    fn conf_below_random_average_on_small_sets() {
        let params = CostParams::with_epsilon(0.9).unwrap();
        let obs = set(&["XIZI", "ZZII", "IYYI", "XXXX", "IIIZ", "YIIY"]);
        let out = derandomize(&obs, DerandConfig::fixed_budget(10, params)).unwrap();
        let conf = confidence_bound(&obs, out.schedule.rows(), &params).unwrap();
        assert_relative_eq!(conf, out.final_cost, max_relative = 1e-12);
        assert!(conf <= crate::confidence::expected_confidence_bound(&obs, 10, &params) * (1.0 + 1e-9));
    }

    #[test]
    fn argmin_tie_break_order() {
        assert_eq!(argmin_with_ties(&[1.0, 1.0, 1.0]), 0);
        assert_eq!(argmin_with_ties(&[2.0, 1.0, 1.0]), 1);
        assert_eq!(argmin_with_ties(&[2.0, 1.0, 1.0 - 1e-14]), 1);
        assert_eq!(argmin_with_ties(&[2.0, 1.0, 0.5]), 2);
        assert_eq!(argmin_with_ties(&[1.0, 1.0 + 1e-15, 1.0 - 1e-15]), 0);
    }
}
