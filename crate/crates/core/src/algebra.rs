//! Commutants, block structure of finite-dimensional †-algebras, and noiseless
//! subsystems of unital channels.
//!
//! A †-algebra on `H` decomposes as `Q† 𝒜 Q = ⊕_k M_{m_k} ⊗ I_{n_k} ⊕ 0`. The
//! decomposition is found with random elements: the eigenspaces of a random central
//! element split `H` into summands, and inside each summand the eigenspaces of a
//! random element of the algebra give the `m_k` copies of the multiplicity space.

use nalgebra::DVector;

use crate::channel::KrausChannel;
use crate::correctability::check_noiseless;
use crate::error::{Error, Result};
use crate::linalg::{
    complement_basis, frob, hermitian_eig, hs_inner, identity, null_space, orthonormal_span,
    partial_trace_b, real, unitarity_residual, unvec, vec_op, zeros, ComplexMatrix, C64,
};
use crate::random::{complex_normal, rng, SubrecRng};
use crate::subsystem::SubsystemDecomposition;

/// Number of seeds tried by [`algebra_structure`] before giving up.
pub const SEED_ATTEMPTS: u32 = 5;

// eigenvalue gaps (relative to the spectral radius) below SAME are numerical noise,
// above SPLIT are genuine; anything in between means the random element was unlucky
const SAME_GAP: f64 = 1e-7;
const SPLIT_GAP: f64 = 1e-4;

/// Hilbert-Schmidt orthonormal basis of `{X : XA = AX, XA† = A†X for all A in ops}`.
pub fn commutant(dim: usize, ops: &[ComplexMatrix], tol: f64) -> Result<Vec<ComplexMatrix>> {
    let n = dim * dim;
    let id = identity(dim);
    // accumulate the normal equations instead of stacking 2|ops| blocks of rows
    let mut gram = zeros(n, n);
    for a in ops {
        if a.nrows() != dim || a.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, expected {dim}x{dim}",
                a.nrows(),
                a.ncols()
            )));
        }
        for op in [a.clone(), a.adjoint()] {
            // vec(XA − AX) = (Aᵀ ⊗ I − I ⊗ A) vec(X)
            let l = op.transpose().kronecker(&id) - id.kronecker(&op);
            gram += l.adjoint() * l;
        }
    }
    let eig = hermitian_eig(&gram, 1e-8)?;
    let scale = eig.spectrum.values().first().copied().unwrap_or(0.0).max(1.0);
    Ok(eig
        .spectrum
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l <= tol * scale)
        .map(|(k, _)| unvec(&eig.vectors.column(k).into_owned(), dim, dim))
        .collect())
}

/// Block decomposition `Q† 𝒜 Q = ⊕_k M_{m_k} ⊗ I_{n_k} ⊕ 0`.
///
/// Column `offsets[k] + i·n_k + j` of `Q` is `|i⟩ ⊗ |j⟩` of summand `k`, with `i`
/// indexing the matrix factor and `j` the multiplicity. Summands are ordered by the
/// lowest standard basis index they touch; the columns after the last summand span
/// the common kernel.
#[derive(Debug, Clone)]
pub struct AlgebraStructure {
    /// `(m_k, n_k)` per summand.
    pub blocks: Vec<(usize, usize)>,
    pub q: ComplexMatrix,
    pub offsets: Vec<usize>,
    /// Largest block-pattern mismatch over an orthonormal basis of the algebra.
    pub residual: f64,
    /// Seed of the random probes that produced this decomposition.
    pub seed: u64,
}

impl AlgebraStructure {
    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// `Σ_k m_k n_k`.
    pub fn support_dim(&self) -> usize {
        self.blocks.iter().map(|(m, n)| m * n).sum()
    }

    /// Columns of `Q` belonging to summand `k`.
    pub fn block_columns(&self, k: usize) -> ComplexMatrix {
        let (m, n) = self.blocks[k];
        self.q.columns(self.offsets[k], m * n).into_owned()
    }

    /// `X_k` for every summand, read off from `Q† X Q` by averaging the multiplicity copies.
    pub fn block_factors(&self, x: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
        let y = self.q.adjoint() * x * &self.q;
        self.blocks
            .iter()
            .zip(&self.offsets)
            .map(|(&(m, n), &off)| {
                let chunk = y.view((off, off), (m * n, m * n)).into_owned();
                Ok(partial_trace_b(&chunk, m, n)? / real(n as f64))
            })
            .collect()
    }

    /// `‖Q† X Q − (⊕_k X_k ⊗ I_{n_k} ⊕ 0)‖_F`.
    pub fn pattern_residual(&self, x: &ComplexMatrix) -> Result<f64> {
        let y = self.q.adjoint() * x * &self.q;
        let mut pattern = zeros(self.dim(), self.dim());
        for ((xk, &(m, n)), &off) in self.block_factors(x)?.iter().zip(&self.blocks).zip(&self.offsets) {
            let block = xk.kronecker(&identity(n));
            pattern.view_mut((off, off), (m * n, m * n)).copy_from(&block);
        }
        Ok(frob(&(y - pattern)))
    }
}

/// Decomposes the algebra spanned by `basis`, retrying with seeds `seed, seed + 1, ...`
/// when a random probe is degenerate.
pub fn algebra_structure(basis: &[ComplexMatrix], seed: u64, tol: f64) -> Result<AlgebraStructure> {
    let dim = match basis.first() {
        Some(b) => b.nrows(),
        None => {
            return Err(Error::DimensionMismatch(
                "empty basis; the zero algebra has no dimension".into(),
            ))
        }
    };
    for b in basis {
        if b.nrows() != dim || b.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "basis element is {}x{}, expected {dim}x{dim}",
                b.nrows(),
                b.ncols()
            )));
        }
    }
    let ortho = hs_orthonormalize(basis, dim, tol);
    if ortho.is_empty() {
        return Ok(AlgebraStructure {
            blocks: Vec::new(),
            q: identity(dim),
            offsets: Vec::new(),
            residual: 0.0,
            seed,
        });
    }
    let mut r = rng(seed);
    check_closure(&ortho, &mut r, tol)?;

    for attempt in 0..SEED_ATTEMPTS {
        let s = seed.wrapping_add(attempt as u64);
        match decompose(&ortho, dim, s, tol) {
            Ok(found) => return Ok(found),
            Err(Error::UnluckySeed { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::UnluckySeed {
        first_seed: seed,
        attempts: SEED_ATTEMPTS,
    })
}

fn hs_orthonormalize(basis: &[ComplexMatrix], dim: usize, tol: f64) -> Vec<ComplexMatrix> {
    let mut stacked = zeros(dim * dim, basis.len());
    for (k, b) in basis.iter().enumerate() {
        stacked.set_column(k, &vec_op(b));
    }
    let span = orthonormal_span(&stacked, tol);
    (0..span.ncols())
        .map(|k| unvec(&span.column(k).into_owned(), dim, dim))
        .collect()
}

fn random_element(basis: &[ComplexMatrix], r: &mut SubrecRng) -> ComplexMatrix {
    let dim = basis[0].nrows();
    let mut x = zeros(dim, dim);
    for b in basis {
        x += b * complex_normal(r);
    }
    x
}

fn random_hermitian_element(basis: &[ComplexMatrix], r: &mut SubrecRng) -> ComplexMatrix {
    let x = random_element(basis, r);
    (&x + x.adjoint()) * real(0.5)
}

/// Distance of `x` from the span of the orthonormal `basis`.
fn span_distance(basis: &[ComplexMatrix], x: &ComplexMatrix) -> f64 {
    let mut rest = x.clone();
    for b in basis {
        let overlap = hs_inner(b, x);
        rest -= b * overlap;
    }
    frob(&rest)
}

fn check_closure(basis: &[ComplexMatrix], r: &mut SubrecRng, tol: f64) -> Result<()> {
    let mut worst = 0.0_f64;
    for _ in 0..3 {
        let x = random_element(basis, r);
        let y = random_element(basis, r);
        for z in [x.adjoint(), &x * &y] {
            worst = worst.max(span_distance(basis, &z) / frob(&z).max(1.0));
        }
    }
    // the unit of the algebra is the projector onto the joint support
    let support = support_projector(basis);
    worst = worst.max(span_distance(basis, &support) / frob(&support).max(1.0));
    if worst > tol {
        return Err(Error::NotAnAlgebra(worst));
    }
    Ok(())
}

/// Projector onto the range of `Σ B_i B_i†`.
fn support_projector(basis: &[ComplexMatrix]) -> ComplexMatrix {
    let isometry = support_isometry(basis);
    &isometry * isometry.adjoint()
}

fn support_isometry(basis: &[ComplexMatrix]) -> ComplexMatrix {
    let dim = basis[0].nrows();
    let mut s = zeros(dim, dim);
    for b in basis {
        s += b * b.adjoint();
    }
    // for an orthonormal basis of ⊕ M_m ⊗ I_n this is ⊕ (m/n) I, so every nonzero
    // eigenvalue is at least 1/dim
    let eig = hermitian_eig(&s, 1e-8).expect("sum of B B† is Hermitian");
    let threshold = 0.5 / dim as f64;
    let keep: Vec<usize> = (0..dim).filter(|&k| eig.spectrum.values()[k] > threshold).collect();
    let mut out = zeros(dim, keep.len());
    for (col, &k) in keep.iter().enumerate() {
        out.set_column(col, &eig.vectors.column(k));
    }
    out
}

fn unlucky() -> Error {
    Error::UnluckySeed {
        first_seed: 0,
        attempts: 1,
    }
}

/// Eigenvector clusters of a Hermitian matrix, in descending eigenvalue order.
fn eigen_clusters(h: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    let eig = hermitian_eig(h, 1e-8)?;
    let values = eig.spectrum.values();
    let scale = values.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()));
    if scale == 0.0 {
        return Err(unlucky());
    }
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..values.len() {
        let gap = (values[k - 1] - values[k]) / scale;
        if gap >= SPLIT_GAP {
            groups.push(vec![k]);
        } else if gap <= SAME_GAP {
            groups.last_mut().expect("nonempty").push(k);
        } else {
            return Err(unlucky());
        }
    }
    Ok(groups
        .iter()
        .map(|g| {
            let mut m = zeros(h.nrows(), g.len());
            for (col, &k) in g.iter().enumerate() {
                m.set_column(col, &eig.vectors.column(k));
            }
            m
        })
        .collect())
}

struct Summand {
    m: usize,
    n: usize,
    /// `d x m n` columns in `|i⟩ ⊗ |j⟩` order.
    columns: ComplexMatrix,
}

fn decompose(basis: &[ComplexMatrix], dim: usize, seed: u64, tol: f64) -> Result<AlgebraStructure> {
    let mut r = rng(seed);
    let gs = support_isometry(basis);
    let rank = gs.ncols();
    let compressed: Vec<ComplexMatrix> = basis.iter().map(|b| gs.adjoint() * b * &gs).collect();

    // center: algebra elements commuting with two random Hermitian elements
    let probes = [
        random_hermitian_element(&compressed, &mut r),
        random_hermitian_element(&compressed, &mut r),
    ];
    let rr = rank * rank;
    let mut system = zeros(2 * rr, compressed.len());
    for (i, b) in compressed.iter().enumerate() {
        for (p, h) in probes.iter().enumerate() {
            let comm = b * h - h * b;
            system.view_mut((p * rr, i), (rr, 1)).copy_from(&vec_op(&comm));
        }
    }
    let center: Vec<ComplexMatrix> = null_space(&system, tol)
        .iter()
        .map(|coeffs| {
            let mut z = zeros(rank, rank);
            for (b, &w) in compressed.iter().zip(coeffs.iter()) {
                z += b * w;
            }
            z
        })
        .collect();
    if center.is_empty() {
        return Err(unlucky());
    }
    let mut central = random_hermitian_element(&center, &mut r);
    central /= real(frob(&central).max(f64::MIN_POSITIVE));
    let clusters = eigen_clusters(&central)?;
    if clusters.len() != center.len() {
        return Err(unlucky());
    }

    let mut summands: Vec<Summand> = Vec::with_capacity(clusters.len());
    for vk in &clusters {
        let local: Vec<ComplexMatrix> = compressed.iter().map(|b| vk.adjoint() * b * vk).collect();
        let mut h = random_hermitian_element(&local, &mut r);
        h /= real(frob(&h).max(f64::MIN_POSITIVE));
        let copies = eigen_clusters(&h)?;
        let m = copies.len();
        let n = copies[0].ncols();
        if copies.iter().any(|g| g.ncols() != n) {
            return Err(unlucky());
        }
        let y = random_element(&local, &mut r);
        let y_norm = frob(&y);
        let mut frame = zeros(vk.ncols(), m * n);
        frame.view_mut((0, 0), (vk.ncols(), n)).copy_from(&copies[0]);
        for (i, gi) in copies.iter().enumerate().skip(1) {
            // G_i† Y G_0 is y_{i0} times the unitary linking the two multiplicity frames
            let t = gi.adjoint() * &y * &copies[0];
            let weight = (frob(&t).powi(2) / n as f64).sqrt();
            if weight < SPLIT_GAP * y_norm {
                return Err(unlucky());
            }
            let aligned = gi * t / real(weight);
            frame.view_mut((0, i * n), (vk.ncols(), n)).copy_from(&aligned);
        }
        let mut columns = &gs * vk * frame;
        if n == 1 {
            columns = canonical_basis(&columns);
        }
        summands.push(Summand { m, n, columns });
    }

    summands.sort_by_key(|s| lowest_index(&s.columns));
    let mut q = zeros(dim, dim);
    let mut blocks = Vec::with_capacity(summands.len());
    let mut offsets = Vec::with_capacity(summands.len());
    let mut offset = 0;
    for s in &summands {
        q.view_mut((0, offset), (dim, s.m * s.n)).copy_from(&s.columns);
        blocks.push((s.m, s.n));
        offsets.push(offset);
        offset += s.m * s.n;
    }
    let used = q.columns(0, offset).into_owned();
    for (k, v) in complement_basis(&(&used * used.adjoint()), dim - offset).iter().enumerate() {
        q.set_column(offset + k, v);
    }

    let mut structure = AlgebraStructure {
        blocks,
        q,
        offsets,
        residual: 0.0,
        seed,
    };
    let mut residual = unitarity_residual(&structure.q);
    for b in basis {
        residual = residual.max(structure.pattern_residual(b)?);
    }
    structure.residual = residual;
    if residual > tol {
        return Err(unlucky());
    }
    Ok(structure)
}

/// Orthonormal basis of the range of `columns`, Gram-Schmidt on the projected standard
/// basis. Makes `n = 1` summands independent of the random probes.
fn canonical_basis(columns: &ComplexMatrix) -> ComplexMatrix {
    let dim = columns.nrows();
    let complement = identity(dim) - columns * columns.adjoint();
    let found: Vec<DVector<C64>> = complement_basis(&complement, columns.ncols());
    let mut out = zeros(dim, found.len());
    for (k, v) in found.iter().enumerate() {
        out.set_column(k, v);
    }
    out
}

fn lowest_index(columns: &ComplexMatrix) -> usize {
    let dim = columns.nrows();
    (0..dim)
        .find(|&i| columns.row(i).norm_squared() > 0.25 / dim as f64)
        .unwrap_or(dim)
}

/// A noiseless subsystem read off from one summand with `m_k > 1`.
#[derive(Debug, Clone)]
pub struct NoiselessSubsystem {
    /// Index into `AlgebraStructure::blocks`.
    pub block: usize,
    pub decomposition: SubsystemDecomposition,
    /// Residual of `check_noiseless` on the emitted decomposition.
    pub residual: f64,
}

/// A summand with `m_k = 1`: its range carries only classical labels.
#[derive(Debug, Clone)]
pub struct ClassicalSector {
    pub block: usize,
    /// `d x n_k` isometry onto the sector.
    pub isometry: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct NoiselessReport {
    pub structure: AlgebraStructure,
    pub subsystems: Vec<NoiselessSubsystem>,
    pub classical_sectors: Vec<ClassicalSector>,
}

/// Maximal noiseless subsystems of a unital channel, one per summand of its
/// fixed-point algebra with `m_k > 1`.
///
/// Summand `k` gives `d_B = m_k`, `d_A = n_k`; any subsystem of that `B` is
/// noiseless as well.
pub fn noiseless_subsystems(ch: &KrausChannel, seed: u64, tol: f64) -> Result<NoiselessReport> {
    let tp = ch.tp_residual();
    if tp > tol {
        return Err(Error::NotTracePreserving(tp));
    }
    let unital = ch.unital_residual();
    if unital > tol {
        return Err(Error::NotUnital(unital));
    }
    let fixed = ch.to_superoperator().fixed_point_basis(tol);
    let structure = algebra_structure(&fixed, seed, tol)?;
    let dim = ch.dim();

    let mut subsystems = Vec::new();
    let mut classical_sectors = Vec::new();
    for (k, &(m, n)) in structure.blocks.iter().enumerate() {
        let cols = structure.block_columns(k);
        if m == 1 {
            classical_sectors.push(ClassicalSector {
                block: k,
                isometry: cols,
            });
            continue;
        }
        // Q orders the summand as |i⟩⊗|j⟩ with i in M_m; the decomposition wants A ⊗ B
        // with B = M_m, so column a·m + b takes Q column b·n + a
        let mut w = zeros(dim, m * n);
        for a in 0..n {
            for b in 0..m {
                w.set_column(a * m + b, &cols.column(b * n + a));
            }
        }
        let decomposition = SubsystemDecomposition::new(w, n, m, tol.max(1e-10))?;
        let check = check_noiseless(ch, &decomposition, tol)?;
        if !check.passed {
            return Err(Error::InternalContradiction {
                candidate: k,
                detail: "fixed-point summand is not noiseless".into(),
                residual: check.residual,
            });
        }
        subsystems.push(NoiselessSubsystem {
            block: k,
            decomposition,
            residual: check.residual,
        });
    }
    Ok(NoiselessReport {
        structure,
        subsystems,
        classical_sectors,
    })
}
