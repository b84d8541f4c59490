//! Quantum channels in Kraus form and their superoperator matrices.

use crate::error::{Error, Result};
use crate::linalg::{
    frob, identity, null_space, unvec, vec_op, zeros, ComplexMatrix, ONE,
};

/// Completely positive map `σ ↦ Σ_a E_a σ E_a†` on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Builds a channel and rejects it unless `‖Σ E_a†E_a − I‖_F ≤ tol`.
    pub fn new(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let ch = Self::new_unchecked(kraus)?;
        let r = ch.tp_residual();
        if r > tol {
            return Err(Error::NotTracePreserving(r));
        }
        Ok(ch)
    }

    /// Builds a completely positive map without the trace-preservation check.
    pub fn new_unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let dim = first.nrows();
        for (a, k) in kraus.iter().enumerate() {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {a} is {}x{}, expected {dim}x{dim}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            if !crate::linalg::is_finite(k) {
                return Err(Error::Parse(format!("Kraus operator {a} has non-finite entries")));
            }
        }
        Ok(KrausChannel { dim, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel {
            dim,
            kraus: vec![identity(dim)],
        }
    }

    /// Unitary channel `σ ↦ U σ U†`.
    pub fn unitary(u: ComplexMatrix, tol: f64) -> Result<Self> {
        Self::new(vec![u], tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    /// `‖Σ_a E_a†E_a − I‖_F`.
    pub fn tp_residual(&self) -> f64 {
        let mut s = zeros(self.dim, self.dim);
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        frob(&(s - identity(self.dim)))
    }

    /// `‖Σ_a E_a E_a† − I‖_F`.
    pub fn unital_residual(&self) -> f64 {
        let mut s = zeros(self.dim, self.dim);
        for k in &self.kraus {
            s += k * k.adjoint();
        }
        frob(&(s - identity(self.dim)))
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.tp_residual() <= tol
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.unital_residual() <= tol
    }

    pub fn apply(&self, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
        if sigma.nrows() != self.dim || sigma.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, channel acts on dimension {}",
                sigma.nrows(),
                sigma.ncols(),
                self.dim
            )));
        }
        let mut out = zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += k * sigma * k.adjoint();
        }
        Ok(out)
    }

    /// Adjoint map with Kraus operators `{E_a†}`; trace preserving iff `self` is unital.
    pub fn dual(&self) -> KrausChannel {
        KrausChannel {
            dim: self.dim,
            kraus: self.kraus.iter().map(|k| k.adjoint()).collect(),
        }
    }

    /// `self ∘ inner`, i.e. `inner` acts first. Kraus set `{F_a G_b}` ordered a-major.
    pub fn compose(&self, inner: &KrausChannel) -> Result<KrausChannel> {
        if self.dim != inner.dim {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose channels on dimensions {} and {}",
                self.dim, inner.dim
            )));
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|f| inner.kraus.iter().map(move |g| f * g))
            .collect();
        Ok(KrausChannel {
            dim: self.dim,
            kraus,
        })
    }

    /// Superoperator matrix `Σ_a conj(E_a) ⊗ E_a` acting on column-stacked operators.
    pub fn to_superoperator(&self) -> Superoperator {
        let n = self.dim * self.dim;
        let mut matrix = zeros(n, n);
        for k in &self.kraus {
            matrix += k.map(|z| z.conj()).kronecker(k);
        }
        Superoperator {
            dim: self.dim,
            matrix,
        }
    }
}

/// Linear map on `L(H)` as a `d² x d²` matrix on column-stacked operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub dim: usize,
    pub matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn identity(dim: usize) -> Self {
        Superoperator {
            dim,
            matrix: identity(dim * dim),
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, superoperator acts on dimension {}",
                x.nrows(),
                x.ncols(),
                self.dim
            )));
        }
        Ok(unvec(&(&self.matrix * vec_op(x)), self.dim, self.dim))
    }

    /// `self ∘ inner` as matrix product.
    pub fn compose(&self, inner: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix * &inner.matrix,
        }
    }

    /// Hilbert-Schmidt orthonormal basis of `{σ : S(σ) = σ}`: the null space of `S − I`.
    pub fn fixed_point_basis(&self, tol: f64) -> Vec<ComplexMatrix> {
        let n = self.dim * self.dim;
        let shifted = &self.matrix - identity(n);
        null_space(&shifted, tol)
            .iter()
            .map(|v| unvec(v, self.dim, self.dim))
            .collect()
    }
}

/// Largest Frobenius distance between the actions of two maps over the matrix-unit basis.
pub fn action_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channels act on dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let d = a.dim();
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let mut e = zeros(d, d);
            e[(i, j)] = ONE;
            worst = worst.max(frob(&(a.apply(&e)? - b.apply(&e)?)));
        }
    }
    Ok(worst)
}

/// Whether `supp(X) ⊆ supp(P)` for positive `X` and projector `P`, tested as
/// `‖(I−P)X(I−P)‖_F + ‖(I−P)XP‖_F ≤ tol ‖X‖_F`.
pub fn support_contained(x: &ComplexMatrix, p: &ComplexMatrix, tol: f64) -> bool {
    let q = identity(p.nrows()) - p;
    let leak = frob(&(&q * x * &q)) + frob(&(&q * x * p));
    leak <= tol * frob(x).max(f64::MIN_POSITIVE)
}
