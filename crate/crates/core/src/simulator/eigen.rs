//! Minimal eigenpairs of Pauli-sum Hamiltonians.
//!
//! Small systems are diagonalized densely. Larger ones use a restarted
//! Lanczos iteration with full reorthogonalization on the matrix-free
//! operator; degeneracy is detected by a second run deflated against the
//! converged ground state.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use super::{stream_rng, PauliSumHamiltonian, StateVector, MAX_QUBITS};
use crate::error::{Error, Result};

const KRYLOV_DIM: usize = 64;
const MAX_RESTARTS: usize = 500;
const DEGENERACY_GAP: f64 = 1e-8;
const START_SEED: u64 = 0x5eed_1a2c;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenMethod {
    /// Dense below `auto_dense_max` qubits, Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug)]
pub struct GroundStateOptions {
    pub method: EigenMethod,
    /// Largest qubit count for dense diagonalization.
    pub dense_cap: usize,
    /// Largest qubit count for the iterative solver.
    pub iterative_cap: usize,
    /// `Auto` switches to Lanczos above this many qubits.
    pub auto_dense_max: usize,
    /// Target residual `||H g - E g||`.
    pub tolerance: f64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        GroundStateOptions {
            method: EigenMethod::Auto,
            dense_cap: 12,
            iterative_cap: MAX_QUBITS,
            auto_dense_max: 8,
            tolerance: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// `||H g - E g||`.
    pub residual: f64,
    /// Another eigenvalue lies within 1e-8 of `energy`.
    pub degenerate: bool,
}

pub fn ground_state(h: &PauliSumHamiltonian) -> Result<GroundState> {
    ground_state_with(h, &GroundStateOptions::default())
}

pub fn ground_state_with(h: &PauliSumHamiltonian, options: &GroundStateOptions) -> Result<GroundState> {
    let n = h.num_qubits();
    let method = match options.method {
        EigenMethod::Auto if n <= options.auto_dense_max.min(options.dense_cap) => EigenMethod::Dense,
        EigenMethod::Auto => EigenMethod::Lanczos,
        m => m,
    };
    let (cap, what) = match method {
        EigenMethod::Dense => (options.dense_cap, "dense diagonalization"),
        _ => (options.iterative_cap.min(MAX_QUBITS), "iterative eigensolver"),
    };
    if n > cap {
        return Err(Error::Capacity {
            what,
            requested: n,
            cap,
        });
    }
    let (energy, vector, degenerate) = match method {
        EigenMethod::Dense => dense_ground_state(h),
        _ => lanczos_ground_state(h, options.tolerance)?,
    };
    let state = StateVector::from_normalized(n, vector)?;
    let residual = residual_norm(h, state.amplitudes(), energy);
    if residual > 1e-8 {
        return Err(Error::State(format!(
            "eigensolver did not converge (residual {residual:e})"
        )));
    }
    Ok(GroundState {
        energy,
        state,
        residual,
        degenerate,
    })
}

fn residual_norm(h: &PauliSumHamiltonian, v: &[Complex64], energy: f64) -> f64 {
    h.apply(v)
        .iter()
        .zip(v)
        .map(|(hv, a)| (hv - a * energy).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn dense_ground_state(h: &PauliSumHamiltonian) -> (f64, Vec<Complex64>, bool) {
    let dim = h.dimension();
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    let mut column = vec![Complex64::new(0.0, 0.0); dim];
    let mut unit = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        unit[j] = Complex64::new(1.0, 0.0);
        h.apply_into(&unit, &mut column);
        unit[j] = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            matrix[(i, j)] = column[i];
        }
    }
    let eig = SymmetricEigen::new(matrix);
    let (best, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("dimension is at least 2");
    let degenerate = eig
        .eigenvalues
        .iter()
        .enumerate()
        .any(|(i, &e)| i != best && (e - energy).abs() <= DEGENERACY_GAP * energy.abs().max(1.0));
    let mut vector: Vec<Complex64> = eig.eigenvectors.column(best).iter().copied().collect();
    normalize(&mut vector);
    (energy, vector, degenerate)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let nrm = norm(v);
    for a in v.iter_mut() {
        *a /= nrm;
    }
    nrm
}

/// Remove the components along each (orthonormal) vector in `against`.
fn project_out(v: &mut [Complex64], against: &[Vec<Complex64>]) {
    for u in against {
        let c = dot(u, v);
        for (a, b) in v.iter_mut().zip(u) {
            *a -= c * b;
        }
    }
}

fn lanczos_ground_state(h: &PauliSumHamiltonian, tolerance: f64) -> Result<(f64, Vec<Complex64>, bool)> {
    let (energy, ground) = lanczos_min(h, &[], tolerance)?;
    let degenerate = if h.dimension() > 1 {
        let (second, _) = lanczos_min(h, std::slice::from_ref(&ground), tolerance)?;
        (second - energy).abs() <= DEGENERACY_GAP * energy.abs().max(1.0)
    } else {
        false
    };
    Ok((energy, ground, degenerate))
}

/// Lowest eigenpair of `h` restricted to the complement of `deflate`.
fn lanczos_min(
    h: &PauliSumHamiltonian,
    deflate: &[Vec<Complex64>],
    tolerance: f64,
) -> Result<(f64, Vec<Complex64>)> {
    let dim = h.dimension();
    let krylov = KRYLOV_DIM.min(dim - deflate.len());
    let mut rng = stream_rng(START_SEED, deflate.len() as u64);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    project_out(&mut start, deflate);
    normalize(&mut start);

    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut last = (f64::NAN, start.clone());
    for _ in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alphas: Vec<f64> = Vec::with_capacity(krylov);
        let mut betas: Vec<f64> = Vec::with_capacity(krylov);
        loop {
            let j = basis.len() - 1;
            h.apply_into(&basis[j], &mut w);
            project_out(&mut w, deflate);
            let alpha = dot(&basis[j], &w).re;
            alphas.push(alpha);
            // Full reorthogonalization, twice for stability.
            project_out(&mut w, &basis);
            project_out(&mut w, &basis);
            project_out(&mut w, deflate);
            let beta = norm(&w);
            if basis.len() == krylov || beta <= 1e-13 * alpha.abs().max(1.0) {
                break;
            }
            betas.push(beta);
            basis.push(w.iter().map(|a| a / beta).collect());
        }

        let m = alphas.len();
        let tri = DMatrix::<f64>::from_fn(m, m, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(tri);
        let (best, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty Krylov space");
        let coeffs = eig.eigenvectors.column(best);
        let mut ritz = vec![Complex64::new(0.0, 0.0); dim];
        for (c, v) in coeffs.iter().zip(&basis) {
            for (r, a) in ritz.iter_mut().zip(v) {
                *r += a * *c;
            }
        }
        project_out(&mut ritz, deflate);
        normalize(&mut ritz);
        let residual = residual_norm(h, &ritz, theta);
        if residual <= tolerance || m < krylov {
            return Ok((theta, ritz));
        }
        start = ritz.clone();
        last = (theta, ritz);
    }
    if residual_norm(h, &last.1, last.0) <= 1e-8 {
        Ok(last)
    } else {
        Err(Error::State("Lanczos iteration did not converge".into()))
    }
}
