//! Explicit unitary recovery for a correctable subsystem, and its extension to a
//! correction channel.
//!
//! Starting from the blocks `F_ab` of a passed [`CorrectabilityCertificate`]:
//!
//! 1. diagonalize the block matrix, `U F U† = D`, and split `U`, `D` into
//!    `d_A x d_A` blocks `U_ab`, `D_aa`;
//! 2. remix the Kraus operators on the code, `G_a P = Σ_b E_b (U_ab† ⊗ I_B) P`, which
//!    gives mutually orthogonal ranges with `P G_a† G_a P = D_aa ⊗ I_B`;
//! 3. take the polar isometries `G_a P = V_a (√D_aa ⊗ I_B)`;
//! 4. send the orthonormal vectors `|φ_l^a⟩|w_a⟩|ψ_k⟩` (standard basis vectors of `H`,
//!    in `(a, l, k)` order) to `V_a |φ_l^a⟩|ψ_k⟩` and complete that map to a unitary `V`.
//!
//! The recovery is `V†`. After it, states of `AB` sit in `CB` where `C` is spanned by
//! the pairs `(a, l)`, and the reduced map `A → C` has Kraus operators
//! `K_c = Σ_a (√D_aa U_ac) ⊗ |w_a⟩`.

use crate::channel::KrausChannel;
use crate::correctability::CorrectabilityCertificate;
use crate::error::{Error, Result};
use crate::linalg::{
    complete_to_unitary, diag_real, frob, hermitian_eig, identity, kron, matrix_unit,
    polar_isometry_on_support, zeros, ComplexMatrix,
};
use crate::subsystem::{ActionFactor, SubsystemDecomposition};

/// Diagonal block `D_aa` of the diagonalized block matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DBlock {
    /// Kraus index `a`.
    pub index: usize,
    /// Diagonal of `D_aa` after clamping.
    pub diagonal: Vec<f64>,
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    /// The recovery unitary `U = V†`.
    pub u_recovery: ComplexMatrix,
    /// Where `B` sits after recovery: `C ⊗ B` on the first `d_C d_B` basis vectors.
    pub c_subsystem: SubsystemDecomposition,
    /// Kraus operators (`d_C x d_A`) of the reduced map `F_{C|A}`.
    pub f_ca_kraus: Vec<ComplexMatrix>,
    pub d_blocks: Vec<DBlock>,
    /// Largest mismatch of `U ∘ E ∘ P_AB = F_{C|A} ⊗ id_B` over matrix units.
    pub residual: f64,
    /// Largest `‖P G_a† G_b P‖_F` for `a ≠ b` and `‖P G_a† G_a P − D_aa ⊗ I_B‖_F`.
    pub orthogonality_residual: f64,
    /// Largest mismatch of `G(I_A ⊗ σ_B) = E(I_A ⊗ σ_B)` over matrix units `σ_B`.
    pub action_residual: f64,
}

impl RecoveryResult {
    pub fn d_c(&self) -> usize {
        self.c_subsystem.d_a()
    }

    /// `F_{C|A}(σ_A)`.
    pub fn apply_f_ca(&self, sigma_a: &ComplexMatrix) -> ComplexMatrix {
        let dc = self.d_c();
        let mut out = zeros(dc, dc);
        for k in &self.f_ca_kraus {
            out += k * sigma_a * k.adjoint();
        }
        out
    }

    /// `Σ_a Tr D_aa`, which equals `d_A` for a trace-preserving channel.
    pub fn d_trace(&self) -> f64 {
        self.d_blocks.iter().flat_map(|b| b.diagonal.iter()).sum()
    }
}

/// Builds the unitary recovery for a subsystem that passed [`check_correctable`].
///
/// [`check_correctable`]: crate::correctability::check_correctable
pub fn construct_recovery(
    ch: &KrausChannel,
    dec: &SubsystemDecomposition,
    cert: &CorrectabilityCertificate,
    tol: f64,
) -> Result<RecoveryResult> {
    if !cert.matches(ch, dec) {
        return Err(Error::CertificateMismatch);
    }
    if !cert.passed {
        return Err(Error::NotCorrectable(cert.residual));
    }
    let f = cert.block_matrix().ok_or(Error::CertificateMismatch)?;
    let (dim, da, db) = (dec.dim(), dec.d_a(), dec.d_b());
    let kraus = ch.kraus();
    let m = kraus.len();
    let n = m * da;
    let scale = frob(&f).max(1.0);

    // an already diagonal F needs no rotation; this keeps e.g. a single unitary
    // Kraus operator from picking up an arbitrary eigenbasis on A
    let diagonal: Vec<f64> = (0..n).map(|i| f[(i, i)].re).collect();
    let off_diagonal = frob(&(&f - diag_real(&diagonal)));
    let (u, mut lambda) = if off_diagonal <= tol * scale {
        (identity(n), diagonal)
    } else {
        let eig = hermitian_eig(&f, tol)?;
        (eig.vectors.adjoint(), eig.spectrum.values().to_vec())
    };
    for l in lambda.iter_mut() {
        if *l < -tol * scale {
            return Err(Error::NumericalDegeneracy(format!(
                "block matrix has eigenvalue {l:.3e} below -tol"
            )));
        }
        if *l <= tol * scale {
            *l = 0.0;
        }
    }

    let u_block = |a: usize, b: usize| u.view((a * da, b * da), (da, da)).into_owned();
    let lift = |x: &ComplexMatrix| dec.embed(&kron(x, &identity(db)));

    // G_a P = Σ_b E_b (U_ab† ⊗ I_B) P
    let mut gp: Vec<ComplexMatrix> = Vec::with_capacity(m);
    for a in 0..m {
        let mut g = zeros(dim, dim);
        for (b, eb) in kraus.iter().enumerate() {
            g += eb * lift(&u_block(a, b).adjoint())?;
        }
        gp.push(g);
    }

    let d_blocks: Vec<DBlock> = (0..m)
        .map(|a| {
            let diagonal = lambda[a * da..(a + 1) * da].to_vec();
            let rank = diagonal.iter().filter(|&&x| x > 0.0).count();
            DBlock {
                index: a,
                diagonal,
                rank,
            }
        })
        .collect();

    let mut orthogonality_residual = 0.0_f64;
    for a in 0..m {
        for b in 0..m {
            let gram = gp[a].adjoint() * &gp[b];
            let r = if a == b {
                frob(&(gram - lift(&diag_real(&d_blocks[a].diagonal))?))
            } else {
                frob(&gram)
            };
            orthogonality_residual = orthogonality_residual.max(r);
        }
    }
    let structural_tol = tol * scale * (da * db) as f64;
    if orthogonality_residual > structural_tol {
        return Err(Error::NumericalDegeneracy(format!(
            "remixed Kraus ranges are not orthogonal (residual {orthogonality_residual:.3e})"
        )));
    }

    let mut action_residual = 0.0_f64;
    for k in 0..db {
        for l in 0..db {
            let x = dec.embed_product(&identity(da), &matrix_unit(db, k, l))?;
            let mut remixed = zeros(dim, dim);
            for g in &gp {
                remixed += g * &x * g.adjoint();
            }
            action_residual = action_residual.max(frob(&(remixed - ch.apply(&x)?)));
        }
    }
    if action_residual > structural_tol {
        return Err(Error::NumericalDegeneracy(format!(
            "remixed channel differs from the noise on I_A ⊗ σ_B (residual {action_residual:.3e})"
        )));
    }

    // (a, l) pairs spanning C, in block order
    let c_index: Vec<(usize, usize)> = d_blocks
        .iter()
        .flat_map(|blk| {
            blk.diagonal
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0.0)
                .map(move |(i, _)| (blk.index, i))
        })
        .collect();
    let dc = c_index.len();
    if dc == 0 || dc * db > dim {
        return Err(Error::NumericalDegeneracy(format!(
            "recovered subsystem C has dimension {dc}, which does not fit {dc}*{db} into {dim}"
        )));
    }

    let mut isometries: Vec<Option<ComplexMatrix>> = vec![None; m];
    for blk in d_blocks.iter().filter(|b| b.rank > 0) {
        let roots: Vec<f64> = blk.diagonal.iter().map(|x| x.sqrt()).collect();
        let s = lift(&diag_real(&roots))?;
        isometries[blk.index] = Some(polar_isometry_on_support(&gp[blk.index], &s, structural_tol)?);
    }

    let w = dec.isometry();
    let mut partial = zeros(dim, dim);
    for (c, &(a, i)) in c_index.iter().enumerate() {
        let va = isometries[a].as_ref().expect("nonzero block has an isometry");
        for k in 0..db {
            let image = va * w.column(i * db + k);
            partial.set_column(c * db + k, &image);
        }
    }
    let v = complete_to_unitary(&partial, dim, structural_tol)?;
    let u_recovery = v.adjoint();

    let c_subsystem = SubsystemDecomposition::new(
        identity(dim).columns(0, dc * db).into_owned(),
        dc,
        db,
        tol,
    )?;

    let f_ca_kraus: Vec<ComplexMatrix> = (0..m)
        .map(|col| {
            let mut k = zeros(dc, da);
            for (row, &(a, i)) in c_index.iter().enumerate() {
                let ua = u_block(a, col);
                let root = lambda[a * da + i].sqrt();
                for j in 0..da {
                    k[(row, j)] = ua[(i, j)] * root;
                }
            }
            k
        })
        .collect();

    let mut result = RecoveryResult {
        u_recovery,
        c_subsystem,
        f_ca_kraus,
        d_blocks,
        residual: 0.0,
        orthogonality_residual,
        action_residual,
    };

    let mut residual = 0.0_f64;
    for i in 0..da {
        for j in 0..da {
            let f_ij = result.apply_f_ca(&matrix_unit(da, i, j));
            for k in 0..db {
                for l in 0..db {
                    let e_b = matrix_unit(db, k, l);
                    let x = dec.embed_product(&matrix_unit(da, i, j), &e_b)?;
                    let lhs = &result.u_recovery * ch.apply(&x)? * result.u_recovery.adjoint();
                    let rhs = result.c_subsystem.embed_product(&f_ij, &e_b)?;
                    residual = residual.max(frob(&(lhs - rhs)));
                }
            }
        }
    }
    result.residual = residual;
    Ok(result)
}

/// Extends a recovery to a correction channel `R = R' ∘ U`.
///
/// `R'` folds `C` onto `A`: basis vector `c` of `C` goes to `c mod d_A` of `A`,
/// one Kraus operator per group of `d_A` consecutive vectors, plus the identity on
/// the complement of `CB`. When `d_C ≤ d_A` the fold is a single partial isometry,
/// completed to a unitary, so `R` is unitary.
pub fn recovery_to_correction(
    res: &RecoveryResult,
    dec: &SubsystemDecomposition,
    tol: f64,
) -> Result<KrausChannel> {
    let (dim, da, db) = (dec.dim(), dec.d_a(), dec.d_b());
    let dc = res.d_c();
    if res.c_subsystem.dim() != dim || res.c_subsystem.d_b() != db {
        return Err(Error::DimensionMismatch(
            "recovery was built for a different subsystem".into(),
        ));
    }
    let w = dec.isometry();
    let wc = res.c_subsystem.isometry();
    let fold = |group: usize| {
        let mut r = zeros(dim, dim);
        for i in 0..da {
            let c = group * da + i;
            if c >= dc {
                break;
            }
            for k in 0..db {
                r += w.column(i * db + k) * wc.column(c * db + k).adjoint();
            }
        }
        r
    };
    let check_tol = tol * (dim as f64).max(1.0);
    let kraus = if dc <= da {
        let unitary = complete_to_unitary(&fold(0), dim, check_tol)?;
        vec![unitary * &res.u_recovery]
    } else {
        let groups = dc.div_ceil(da);
        let mut kraus: Vec<ComplexMatrix> = (0..groups).map(|g| fold(g) * &res.u_recovery).collect();
        let rest = identity(dim) - res.c_subsystem.projector();
        kraus.push(rest * &res.u_recovery);
        kraus
    };
    KrausChannel::new(kraus, check_tol)
}

/// Checks `R ∘ E ∘ P_AB = F_A ⊗ id_B` and returns the reduced map `F_A` with the
/// residual.
pub fn verify_correction(
    ch: &KrausChannel,
    dec: &SubsystemDecomposition,
    correction: &KrausChannel,
) -> Result<ActionFactor> {
    dec.factor_action(|x| correction.apply(&ch.apply(x)?))
}
