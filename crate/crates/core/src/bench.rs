//! Derandomized vs. randomized energy estimation on an exactly solvable
//! Hamiltonian.
//!
//! For each budget the exact ground state is measured `trials` times with
//! each method and the energy RMSE against the exact ground energy is
//! reported. The derandomized schedule is deterministic and shared by all
//! trials; the randomized schedule is redrawn per trial. Trial `t` draws all
//! of its randomness from streams derived from `(seed, budget index, t)`.

use std::fs;
use std::path::PathBuf;

use log::info;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::confidence::{hit_count, CostParams};
use crate::derandomizer::{derandomize, BudgetFreeParams, CostMode, DerandConfig};
use crate::error::{Error, Result};
use crate::estimator::{estimate_all, rmse};
use crate::io::{parse_schedule, render_observables, render_schedule};
use crate::pauli::{MeasurementBasis, ObservableSet};
use crate::schedule::random_rows;
use crate::simulator::{ground_state_with, stream_rng, GroundStateOptions, PauliSumHamiltonian, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchMethod {
    Derandomized,
    Randomized,
}

impl BenchMethod {
    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Derandomized => "derand",
            BenchMethod::Randomized => "random",
        }
    }
}

impl std::str::FromStr for BenchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "derand" | "derandomized" => Ok(BenchMethod::Derandomized),
            "random" | "randomized" => Ok(BenchMethod::Randomized),
            other => Err(Error::Config(format!("unknown bench method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub budgets: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<BenchMethod>,
    /// Cost used for the derandomized schedule; its budget is overwritten
    /// with each entry of `budgets`.
    pub derand: DerandConfig,
    pub ground_state: GroundStateOptions,
    /// Directory for cached derandomized schedules.
    pub cache_dir: Option<PathBuf>,
}

impl BenchConfig {
    /// Budget-free weighted cost with the default `eta`.
    pub fn new(budgets: Vec<usize>, trials: usize, seed: u64) -> Self {
        BenchConfig {
            budgets,
            trials,
            seed,
            methods: vec![BenchMethod::Derandomized, BenchMethod::Randomized],
            derand: DerandConfig::budget_free(1, BudgetFreeParams::default()).weighted(true),
            ground_state: GroundStateOptions::default(),
            cache_dir: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.budgets.is_empty() || self.budgets.contains(&0) {
            return Err(Error::Config("bench budgets must be a nonempty list of positive counts".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("bench needs at least one trial".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("bench needs at least one method".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct MethodResult {
    pub method: BenchMethod,
    pub budget: usize,
    /// Energy estimate of each trial, in trial order.
    pub energies: Vec<f64>,
    pub rmse: f64,
    /// Smallest hit count over the Hamiltonian terms, per trial.
    pub min_hits: Vec<usize>,
    /// Median hit count over the terms, per trial.
    pub median_hits: Vec<f64>,
}

impl MethodResult {
    pub fn mean_min_hits(&self) -> f64 {
        self.min_hits.iter().sum::<usize>() as f64 / self.min_hits.len() as f64
    }

    pub fn mean_median_hits(&self) -> f64 {
        self.median_hits.iter().sum::<f64>() / self.median_hits.len() as f64
    }

    pub fn squared_errors(&self, reference: f64) -> Vec<f64> {
        self.energies.iter().map(|e| (e - reference).powi(2)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub ground_energy: f64,
    pub degenerate: bool,
    pub results: Vec<MethodResult>,
}

impl BenchReport {
    pub fn result(&self, method: BenchMethod, budget: usize) -> Option<&MethodResult> {
        self.results
            .iter()
            .find(|r| r.method == method && r.budget == budget)
    }
}

fn hit_stats(terms: &ObservableSet, rows: &[MeasurementBasis]) -> Result<(usize, f64)> {
    let mut hits = terms
        .iter()
        .map(|o| hit_count(o, rows))
        .collect::<Result<Vec<_>>>()?;
    hits.sort_unstable();
    let mid = hits.len() / 2;
    let median = if hits.len() % 2 == 1 {
        hits[mid] as f64
    } else {
        0.5 * (hits[mid - 1] + hits[mid]) as f64
    };
    Ok((hits[0], median))
}

/// Content hash identifying a derandomized schedule.
pub fn schedule_cache_key(terms: &ObservableSet, config: &DerandConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(render_observables(terms).as_bytes());
    hasher.update(format!("{config:?}").as_bytes());
    hex::encode(hasher.finalize())
}

fn derandomized_rows(terms: &ObservableSet, config: &DerandConfig, cache_dir: Option<&PathBuf>) -> Result<Vec<MeasurementBasis>> {
    let cached = cache_dir.map(|dir| dir.join(format!("{}.schedule", schedule_cache_key(terms, config))));
    if let Some(path) = &cached {
        if let Ok(text) = fs::read_to_string(path) {
            let schedule = parse_schedule(&text)?;
            info!("using cached schedule {}", path.display());
            return Ok(schedule.into_rows());
        }
    }
    let rows = derandomize(terms, config.clone())?.schedule.into_rows();
    if let Some(path) = &cached {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, render_schedule(&rows))?;
    }
    Ok(rows)
}

fn estimate_energy(
    terms: &ObservableSet,
    state: &StateVector,
    rows: &[MeasurementBasis],
    rng: &mut rand_chacha::ChaCha8Rng,
    params: &CostParams,
) -> Result<f64> {
    let outcomes = state.measure_schedule(rows, rng)?;
    Ok(estimate_all(terms, &outcomes, params)?.energy)
}

const STREAMS_PER_TRIAL: u64 = 4;

pub fn run_bench(hamiltonian: &PauliSumHamiltonian, config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let terms = hamiltonian.terms();
    let n = terms.num_qubits();
    let gs = ground_state_with(hamiltonian, &config.ground_state)?;
    let reference = gs.energy;
    // Only the energy is used; epsilon here does not influence it.
    let params = CostParams::with_epsilon(0.9)?;

    let mut results = Vec::new();
    for (b, &budget) in config.budgets.iter().enumerate() {
        let stream = |t: usize, purpose: u64| ((b * config.trials + t) as u64) * STREAMS_PER_TRIAL + purpose;
        for &method in &config.methods {
            let trials: Vec<(f64, usize, f64)> = match method {
                BenchMethod::Derandomized => {
                    let mut derand = config.derand.clone();
                    derand.budget = budget;
                    if let CostMode::FixedBudget(_) = derand.mode {
                        derand.min_hits = None;
                    }
                    let rows = derandomized_rows(terms, &derand, config.cache_dir.as_ref())?;
                    let (min, median) = hit_stats(terms, &rows)?;
                    (0..config.trials)
                        .into_par_iter()
                        .map(|t| {
                            let mut rng = stream_rng(config.seed, stream(t, 0));
                            Ok((estimate_energy(terms, &gs.state, &rows, &mut rng, &params)?, min, median))
                        })
                        .collect::<Result<_>>()?
                }
                BenchMethod::Randomized => (0..config.trials)
                    .into_par_iter()
                    .map(|t| {
                        let mut schedule_rng = stream_rng(config.seed, stream(t, 1));
                        let rows = random_rows(n, budget, &mut schedule_rng)?;
                        let (min, median) = hit_stats(terms, &rows)?;
                        let mut rng = stream_rng(config.seed, stream(t, 2));
                        Ok((estimate_energy(terms, &gs.state, &rows, &mut rng, &params)?, min, median))
                    })
                    .collect::<Result<_>>()?,
            };
            let energies: Vec<f64> = trials.iter().map(|t| t.0).collect();
            results.push(MethodResult {
                method,
                budget,
                rmse: rmse(&energies, reference)?,
                energies,
                min_hits: trials.iter().map(|t| t.1).collect(),
                median_hits: trials.iter().map(|t| t.2).collect(),
            });
        }
    }
    Ok(BenchReport {
        ground_energy: reference,
        degenerate: gs.degenerate,
        results,
    })
}

/// Transverse-field Ising chain `-J sum Z_i Z_{i+1} - h sum X_i`, open or
/// periodic, with an optional identity offset term.
pub fn transverse_field_ising(n: usize, coupling: f64, field: f64, periodic: bool, offset: Option<f64>) -> Result<ObservableSet> {
    use crate::pauli::{Pauli, PauliObservable};
    if n < 2 {
        return Err(Error::Domain("an Ising chain needs at least two sites".into()));
    }
    let mut terms = Vec::new();
    let bonds = if periodic && n > 2 { n } else { n - 1 };
    for i in 0..bonds {
        let mut labels = vec![Pauli::I; n];
        labels[i] = Pauli::Z;
        labels[(i + 1) % n] = Pauli::Z;
        terms.push(PauliObservable::new(&labels, -coupling)?);
    }
    for i in 0..n {
        let mut labels = vec![Pauli::I; n];
        labels[i] = Pauli::X;
        terms.push(PauliObservable::new(&labels, -field)?);
    }
    if let Some(offset) = offset {
        terms.push(PauliObservable::identity(n, offset)?);
    }
    ObservableSet::new(terms)
}
