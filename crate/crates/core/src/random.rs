//! Seeded random operators for demos and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, real, zeros, ComplexMatrix, C64, ONE};

pub type SubrecRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SubrecRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    if d == 0 {
        return zeros(0, 0);
    }
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random isometry with orthonormal columns (`rows >= cols`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    haar_unitary(rows, rng).columns(0, cols).into_owned()
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()) * real(0.5)
}

/// Random full-rank density operator `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}

/// Projector onto `|ψ⟩` for a random unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let v = random_isometry(d, 1, rng);
    &v * v.adjoint()
}

pub fn random_projector<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let v = random_isometry(d, rank, rng);
    &v * v.adjoint()
}

/// Random probability vector (normalized exponentials).
pub fn random_probabilities<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -rng.gen_range(1e-3..1.0f64).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Kraus operators of a generic channel: blocks of a random `k d x d` isometry.
pub fn random_kraus<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    split_isometry(&random_isometry(k * d, d, rng), k)
}

/// Kraus operators `√p_i U_i` of a random mixture of unitaries (always unital).
pub fn random_unital_kraus<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    random_probabilities(k, rng)
        .into_iter()
        .map(|p| haar_unitary(d, rng) * real(p.sqrt()))
        .collect()
}

/// Split a stacked `(k r) x c` operator into `k` row blocks of height `r`.
pub fn split_isometry(stacked: &ComplexMatrix, k: usize) -> Vec<ComplexMatrix> {
    let rows = stacked.nrows() / k;
    (0..k)
        .map(|i| stacked.rows(i * rows, rows).into_owned())
        .collect()
}
