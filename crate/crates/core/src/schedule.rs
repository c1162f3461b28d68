use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{MeasurementBasis, Pauli};

/// Where a schedule came from.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleOrigin {
    Derandomized,
    Randomized { seed: u64 },
    Loaded,
}

impl fmt::Display for ScheduleOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleOrigin::Derandomized => write!(f, "derandomized"),
            ScheduleOrigin::Randomized { seed } => write!(f, "randomized(seed={seed})"),
            ScheduleOrigin::Loaded => write!(f, "loaded"),
        }
    }
}

/// Ordered measurement settings, one row per copy of the state.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    n: usize,
    rows: Vec<MeasurementBasis>,
    origin: ScheduleOrigin,
}

impl Schedule {
    pub fn new(n: usize, rows: Vec<MeasurementBasis>, origin: ScheduleOrigin) -> Result<Self> {
        for row in &rows {
            Error::check_len(n, row.num_qubits())?;
        }
        Ok(Schedule { n, rows, origin })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[MeasurementBasis] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<MeasurementBasis> {
        self.rows
    }

    pub fn origin(&self) -> &ScheduleOrigin {
        &self.origin
    }
}

/// `budget` rows whose labels are drawn independently and uniformly from
/// `{X, Y, Z}` using `rng`.
pub fn random_rows<R: Rng + ?Sized>(n: usize, budget: usize, rng: &mut R) -> Result<Vec<MeasurementBasis>> {
    if budget > 0 && n == 0 {
        return Err(Error::Domain("cannot draw measurement rows on zero qubits".into()));
    }
    let mut labels = vec![Pauli::X; n];
    (0..budget)
        .map(|_| {
            for slot in labels.iter_mut() {
                *slot = Pauli::MEASURABLE[rng.random_range(0..3)];
            }
            MeasurementBasis::new(&labels)
        })
        .collect()
}

/// Uniformly random schedule, reproducible from `seed`.
pub fn randomized_schedule(n: usize, budget: usize, seed: u64) -> Result<Schedule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = random_rows(n, budget, &mut rng)?;
    Schedule::new(n, rows, ScheduleOrigin::Randomized { seed })
}
