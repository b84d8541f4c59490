//! Subsystem decompositions `H = (H_A ⊗ H_B) ⊕ K`.

use crate::channel::Superoperator;
use crate::error::{Error, Result};
use crate::linalg::{
    frob, identity, kron, matrix_unit, partial_trace_b, real, unitarity_residual, vec_op,
    ComplexMatrix,
};

/// An isometry `W: H_A ⊗ H_B → H`; column `a * d_b + b` is the image of `|a⟩⊗|b⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemDecomposition {
    dim: usize,
    d_a: usize,
    d_b: usize,
    w: ComplexMatrix,
}

/// Result of testing whether `W†MW = X ⊗ I_B`.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorOutcome {
    Factored { factor: ComplexMatrix, residual: f64 },
    TensorMismatch { residual: f64 },
}

impl FactorOutcome {
    pub fn residual(&self) -> f64 {
        match self {
            FactorOutcome::Factored { residual, .. } | FactorOutcome::TensorMismatch { residual } => {
                *residual
            }
        }
    }

    pub fn factor(&self) -> Option<&ComplexMatrix> {
        match self {
            FactorOutcome::Factored { factor, .. } => Some(factor),
            FactorOutcome::TensorMismatch { .. } => None,
        }
    }
}

/// A map restricted to `AB` written as `G_A ⊗ id_B`, with the mismatch left over.
#[derive(Debug, Clone)]
pub struct ActionFactor {
    /// Largest `‖T(W(e_ij⊗e_kl)W†) − W(G_A(e_ij)⊗e_kl)W†‖_F` over matrix units.
    pub residual: f64,
    /// `G_A` as a `d_A² x d_A²` superoperator.
    pub reduced: Superoperator,
}

impl SubsystemDecomposition {
    pub fn new(w: ComplexMatrix, d_a: usize, d_b: usize, tol: f64) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::DimensionMismatch("subsystem factors must be nonempty".into()));
        }
        let dim = w.nrows();
        if w.ncols() != d_a * d_b || d_a * d_b > dim {
            return Err(Error::DimensionMismatch(format!(
                "isometry is {}x{}, expected {dim}x{} with d_A*d_B <= dim",
                w.nrows(),
                w.ncols(),
                d_a * d_b
            )));
        }
        let r = unitarity_residual(&w);
        if r > tol * ((d_a * d_b) as f64).sqrt().max(1.0) {
            return Err(Error::NotIsometry(r));
        }
        Ok(SubsystemDecomposition { dim, d_a, d_b, w })
    }

    /// `H = H_A ⊗ H_B` with `W = I`.
    pub fn factor_space(d_a: usize, d_b: usize) -> Self {
        SubsystemDecomposition {
            dim: d_a * d_b,
            d_a,
            d_b,
            w: identity(d_a * d_b),
        }
    }

    /// Subspace code (`d_A = 1`) spanned by the given orthonormal columns.
    pub fn subspace(columns: ComplexMatrix, tol: f64) -> Result<Self> {
        let n = columns.ncols();
        Self::new(columns, 1, n, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.w
    }

    /// `P_AB = W W†`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.w * self.w.adjoint()
    }

    /// `W X W†` for `X` on `H_A ⊗ H_B`.
    pub fn embed(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.d_a * self.d_b;
        if x.nrows() != n || x.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, subsystem AB has dimension {n}",
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(&self.w * x * self.w.adjoint())
    }

    /// `W† M W`.
    pub fn compress(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, ambient dimension is {}",
                m.nrows(),
                m.ncols(),
                self.dim
            )));
        }
        Ok(self.w.adjoint() * m * &self.w)
    }

    /// `W (σ_A ⊗ σ_B) W†`.
    pub fn embed_product(
        &self,
        sigma_a: &ComplexMatrix,
        sigma_b: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        if sigma_a.shape() != (self.d_a, self.d_a) || sigma_b.shape() != (self.d_b, self.d_b) {
            return Err(Error::DimensionMismatch(format!(
                "factors are {:?} and {:?}, expected ({a},{a}) and ({b},{b})",
                sigma_a.shape(),
                sigma_b.shape(),
                a = self.d_a,
                b = self.d_b
            )));
        }
        self.embed(&kron(sigma_a, sigma_b))
    }

    /// Decides whether `W†MW = X ⊗ I_B`, with `X = Tr_B(W†MW)/d_B`.
    ///
    /// Succeeds iff the mismatch is at most `tol * max(1, ‖M‖_F)`. The raw mismatch is
    /// carried either way.
    pub fn factor_on_range(&self, m: &ComplexMatrix, tol: f64) -> Result<FactorOutcome> {
        let compressed = self.compress(m)?;
        let factor = partial_trace_b(&compressed, self.d_a, self.d_b)? * real(1.0 / self.d_b as f64);
        let residual = frob(&(compressed - kron(&factor, &identity(self.d_b))));
        if residual <= tol * frob(m).max(1.0) {
            Ok(FactorOutcome::Factored { factor, residual })
        } else {
            Ok(FactorOutcome::TensorMismatch { residual })
        }
    }

    /// Writes `map ∘ P_AB` as `G_A ⊗ id_B` where possible.
    ///
    /// `G_A` is read off the slice `σ_B = I_B`; the residual measures how far the map
    /// is from that form on every matrix unit `e_ij ⊗ e_kl`, over all of `H`.
    pub fn factor_action<F>(&self, map: F) -> Result<ActionFactor>
    where
        F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
    {
        let (da, db) = (self.d_a, self.d_b);
        let id_b = identity(db);
        let mut reduced = ComplexMatrix::zeros(da * da, da * da);
        let mut images = Vec::with_capacity(da * da);
        for j in 0..da {
            for i in 0..da {
                let out = map(&self.embed_product(&matrix_unit(da, i, j), &id_b)?)?;
                let g = partial_trace_b(&self.compress(&out)?, da, db)? * real(1.0 / db as f64);
                reduced.set_column(i + j * da, &vec_op(&g));
                images.push(((i, j), g));
            }
        }
        let mut residual = 0.0_f64;
        for ((i, j), g) in &images {
            for k in 0..db {
                for l in 0..db {
                    let e_b = matrix_unit(db, k, l);
                    let out = map(&self.embed_product(&matrix_unit(da, *i, *j), &e_b)?)?;
                    let expected = self.embed_product(g, &e_b)?;
                    residual = residual.max(frob(&(out - expected)));
                }
            }
        }
        Ok(ActionFactor {
            residual,
            reduced: Superoperator {
                dim: da,
                matrix: reduced,
            },
        })
    }
}
