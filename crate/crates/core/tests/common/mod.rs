//! Independent oracles for the integration tests: plain strings for Pauli
//! labels and dense Kronecker-product matrices for quantum states.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

pub const LABELS: [char; 4] = ['I', 'X', 'Y', 'Z'];

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(label: char) -> DMatrix<Complex64> {
    let (a, b, cc, d) = match label {
        'I' => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        'X' => (c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        'Y' => (c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        'Z' => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        other => panic!("bad label {other}"),
    };
    DMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

/// Dense matrix of a label string; the first label acts on the most
/// significant bit of the amplitude index.
pub fn kron_string(labels: &str) -> DMatrix<Complex64> {
    labels
        .chars()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, l| acc.kronecker(&pauli_matrix(l)))
}

pub fn expectation(state: &[Complex64], op: &DMatrix<Complex64>) -> f64 {
    let v = DVector::from_column_slice(state);
    (v.adjoint() * op * &v)[(0, 0)].re
}

/// `<psi| prod_k (I + s_k P_k)/2 |psi>` for basis `basis` and signs `signs`.
pub fn outcome_probability(state: &[Complex64], basis: &str, signs: &[i8]) -> f64 {
    let projector = basis.chars().zip(signs).fold(
        DMatrix::from_element(1, 1, c(1.0, 0.0)),
        |acc, (l, &s)| {
            let p = (pauli_matrix('I') + pauli_matrix(l) * c(s as f64, 0.0)) * c(0.5, 0.0);
            acc.kronecker(&p)
        },
    );
    expectation(state, &projector)
}

/// All sign strings of length `n`, ordered like binary counting with `-` as 1.
pub fn all_signs(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n)
        .map(|x| (0..n).map(|k| if x >> (n - 1 - k) & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

pub fn hits_str(o: &str, p: &str) -> bool {
    o.chars().zip(p.chars()).all(|(a, b)| a == 'I' || a == b)
}

pub fn hit_count_str(o: &str, rows: &[String]) -> usize {
    rows.iter().filter(|p| hits_str(o, p)).count()
}

pub fn conf_str(observables: &[String], rows: &[String], epsilon: f64) -> f64 {
    observables
        .iter()
        .map(|o| (-0.5 * epsilon * epsilon * hit_count_str(o, rows) as f64).exp())
        .sum()
}

/// Mean confidence bound over `budget` uniformly random bases.
pub fn expected_conf_str(observables: &[String], budget: usize, epsilon: f64) -> f64 {
    let nu = 1.0 - (-0.5 * epsilon * epsilon).exp();
    observables
        .iter()
        .map(|o| {
            let w = o.chars().filter(|&l| l != 'I').count() as i32;
            (1.0 - nu / 3f64.powi(w)).powi(budget as i32)
        })
        .sum()
}

pub fn random_label_string<R: Rng>(n: usize, alphabet: &[char], rng: &mut R) -> String {
    (0..n).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

/// Random observable with a uniformly chosen number of non-identity labels.
pub fn random_observable<R: Rng>(n: usize, max_weight: usize, rng: &mut R) -> String {
    let w = rng.random_range(0..=max_weight.min(n));
    let mut labels = vec!['I'; n];
    let mut positions: Vec<usize> = (0..n).collect();
    for i in 0..w {
        let j = rng.random_range(i..n);
        positions.swap(i, j);
        labels[positions[i]] = ['X', 'Y', 'Z'][rng.random_range(0..3)];
    }
    labels.into_iter().collect()
}

/// Normalized state with Gaussian-like random amplitudes.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1usize << n)
        .map(|_| {
            let g = |rng: &mut R| {
                let u: f64 = rng.random::<f64>().max(1e-300);
                let t: f64 = rng.random::<f64>();
                (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * t).cos()
            };
            c(g(rng), g(rng))
        })
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}
