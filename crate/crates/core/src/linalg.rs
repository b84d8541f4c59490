//! Dense complex linear algebra used throughout the crate.
//!
//! Operators are plain `nalgebra` matrices over `Complex64`. Composite indices
//! on `H_A ⊗ H_B` are A-major: `|a⟩⊗|b⟩` sits at index `a * d_b + b`.
//! Operators are vectorized by column stacking, so `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix; the carrier for operators and superoperators.
pub type ComplexMatrix = DMatrix<C64>;

/// Default relative tolerance for every structural check.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Matrix unit `|i⟩⟨j|` on a `d`-dimensional space.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let mut m = zeros(values.len(), values.len());
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = real(*v);
    }
    m
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Frobenius norm.
pub fn frob(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// Hilbert-Schmidt inner product `Tr(A† B)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// `‖U†U − I‖_F`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    (u.adjoint() * u - identity(u.ncols())).norm()
}

/// `‖P² − P‖_F + ‖P − P†‖_F`.
pub fn projector_residual(p: &ComplexMatrix) -> f64 {
    (p * p - p).norm() + hermitian_residual(p)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Column-stacking vectorization.
pub fn vec_op(m: &ComplexMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_op`] for a `rows x cols` operator.
pub fn unvec(v: &DVector<C64>, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Spectrum of a Hermitian operator, sorted nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub spectrum: Spectrum,
    /// Orthonormal eigenvectors as columns, in the order of `spectrum`.
    pub vectors: ComplexMatrix,
}

/// Eigendecomposition `M = Q diag(λ) Q†` of a Hermitian matrix, eigenvalues nonincreasing.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let asym = hermitian_residual(m);
    if asym > tol * m.norm() {
        return Err(Error::NotHermitian(asym));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            spectrum: Spectrum(Vec::new()),
            vectors: zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()) * real(0.5);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::NumericalDegeneracy(format!("eigensolver failed: {e:?}")))?;
    // faer orders eigenvalues nondecreasing
    let (u, s) = (eig.U(), eig.S());
    let values = (0..n).rev().map(|k| s[k].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    Ok(HermitianEigen {
        spectrum: Spectrum(values),
        vectors,
    })
}

fn to_faer(m: &ComplexMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `M = U diag(σ) V†`, singular values nonincreasing.
fn svd_full(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let svd = to_faer(m).svd().expect("SVD of a finite matrix converges");
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let values = (0..m.nrows().min(m.ncols())).map(|k| s[k].re).collect();
    (
        ComplexMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        values,
        ComplexMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]),
    )
}

/// Singular values sorted nonincreasing.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD of a finite matrix converges")
}

/// Number of singular values above `tol` times the largest one.
pub fn numeric_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&max) if max > 0.0 => s.iter().filter(|&&x| x > tol * max).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the null space of `m`: right singular vectors whose singular
/// value is at most `tol * max(1, σ_max)`.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Vec<DVector<C64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    if m.nrows() == 0 {
        return (0..cols).map(|k| identity(cols).column(k).into_owned()).collect();
    }
    let (_, s, v) = svd_full(m);
    let max = s.first().copied().unwrap_or(0.0);
    let cut = tol * max.max(1.0);
    // right singular vectors past min(rows, cols) have singular value zero
    let mut found: Vec<(f64, DVector<C64>)> = (0..cols)
        .map(|k| (s.get(k).copied().unwrap_or(0.0), k))
        .filter(|(sigma, _)| *sigma <= cut)
        .map(|(sigma, k)| (sigma, v.column(k).into_owned()))
        .collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found.into_iter().map(|(_, v)| v).collect()
}

/// Orthonormal basis (columns) of the span of `vectors`, via SVD.
pub fn orthonormal_span(vectors: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    if vectors.ncols() == 0 || vectors.nrows() == 0 {
        return zeros(vectors.nrows(), 0);
    }
    let (u, s, _) = svd_full(vectors);
    let max = s.first().copied().unwrap_or(0.0);
    let keep = s.iter().filter(|&&x| max > 0.0 && x > tol * max).count();
    u.columns(0, keep).into_owned()
}

/// Partial isometry `V = G S⁺` from a polar factorization `G = V S`.
///
/// `S` must be positive semidefinite with `G†G = S²`; `V†V` is then the
/// projector onto the support of `S`.
pub fn polar_isometry_on_support(
    g: &ComplexMatrix,
    s: &ComplexMatrix,
    tol: f64,
) -> Result<ComplexMatrix> {
    if !s.is_square() || g.ncols() != s.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "polar factor {}x{} does not match operator {}x{}",
            s.nrows(),
            s.ncols(),
            g.nrows(),
            g.ncols()
        )));
    }
    let s2 = s * s;
    let mismatch = (g.adjoint() * g - &s2).norm();
    if mismatch > tol * s2.norm().max(1.0) {
        return Err(Error::FactorMismatch(mismatch));
    }
    let eig = hermitian_eig(s, tol.max(1e-12))?;
    let top = eig.spectrum.values().first().copied().unwrap_or(0.0).max(0.0);
    let cut = tol * top.max(1.0);
    let n = s.nrows();
    let mut pinv = zeros(n, n);
    for (k, &lambda) in eig.spectrum.values().iter().enumerate() {
        if lambda > cut {
            let v = eig.vectors.column(k);
            pinv += (&v * v.adjoint()) * real(1.0 / lambda);
        }
    }
    Ok(g * pinv)
}

/// Orthonormal completion of the range of `projector`, scanning standard basis
/// vectors in index order. Returns `count` columns.
pub fn complement_basis(projector: &ComplexMatrix, count: usize) -> Vec<DVector<C64>> {
    let dim = projector.nrows();
    let threshold = 0.5 / (dim as f64).sqrt();
    let mut chosen: Vec<DVector<C64>> = Vec::with_capacity(count);
    for j in 0..dim {
        if chosen.len() == count {
            break;
        }
        let mut x = DVector::<C64>::zeros(dim);
        x[j] = ONE;
        for _ in 0..2 {
            x -= projector * &x;
            for q in &chosen {
                let overlap = q.dotc(&x);
                x -= q * overlap;
            }
        }
        let norm = x.norm();
        if norm > threshold {
            chosen.push(x / real(norm));
        }
    }
    chosen
}

/// Deterministic unitary extension of a square partial isometry.
///
/// The complements of the initial space `V†V` and the final space `VV†` are
/// orthonormalized from the standard basis in index order and paired in that order.
pub fn complete_to_unitary(v: &ComplexMatrix, dim: usize, tol: f64) -> Result<ComplexMatrix> {
    if v.nrows() != dim || v.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "expected a {dim}x{dim} partial isometry, got {}x{}",
            v.nrows(),
            v.ncols()
        )));
    }
    let initial = v.adjoint() * v;
    let fin = v * v.adjoint();
    let residual = projector_residual(&initial).max(projector_residual(&fin));
    if residual > tol * (dim as f64).max(1.0) {
        return Err(Error::NotPartialIsometry(residual));
    }
    let rank = trace(&initial).re.round() as usize;
    if rank > dim {
        return Err(Error::NotPartialIsometry(rank as f64));
    }
    let missing = dim - rank;
    let from = complement_basis(&initial, missing);
    let to = complement_basis(&fin, missing);
    if from.len() != missing || to.len() != missing {
        return Err(Error::NotPartialIsometry(residual));
    }
    let mut u = v.clone();
    for (f, t) in from.iter().zip(&to) {
        u += t * f.adjoint();
    }
    Ok(u)
}

/// `Tr_B` on `H_A ⊗ H_B`: `(Tr_B M)_{ij} = Σ_k M_{(i d_B + k),(j d_B + k)}`.
pub fn partial_trace_b(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b)?;
    Ok(ComplexMatrix::from_fn(d_a, d_a, |i, j| {
        (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()
    }))
}

/// `Tr_A` on `H_A ⊗ H_B`.
pub fn partial_trace_a(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, d_a, d_b)?;
    Ok(ComplexMatrix::from_fn(d_b, d_b, |i, j| {
        (0..d_a).map(|k| m[(k * d_b + i, k * d_b + j)]).sum()
    }))
}

fn check_bipartite(m: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<()> {
    let n = d_a * d_b;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {n}x{n} for d_A={d_a}, d_B={d_b}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Whether `p ≺ q`: every prefix sum of `p` is at most that of `q`, with equal totals.
pub fn majorizes(q: &Spectrum, p: &Spectrum, tol: f64) -> Result<bool> {
    if q.len() != p.len() {
        return Err(Error::LengthMismatch(q.len(), p.len()));
    }
    let mut sum_p = 0.0;
    let mut sum_q = 0.0;
    for (pk, qk) in p.values().iter().zip(q.values()) {
        sum_p += pk;
        sum_q += qk;
        if sum_p > sum_q + tol {
            return Ok(false);
        }
    }
    Ok((sum_p - sum_q).abs() <= tol)
}
