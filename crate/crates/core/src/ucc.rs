//! Unitarily correctable subsystems of unital channels.
//!
//! `B` is unitarily correctable for a unital `E` exactly when it is a noiseless
//! subsystem of `E† ∘ E`. [`find_ucc`] lists those subsystems through
//! [`noiseless_subsystems`] and builds a correcting unitary for each from the explicit
//! recovery.

use crate::algebra::{noiseless_subsystems, AlgebraStructure, ClassicalSector};
use crate::channel::{support_contained, KrausChannel, Superoperator};
use crate::correctability::check_correctable;
use crate::error::{Error, Result};
use crate::linalg::{complete_to_unitary, frob, hermitian_eig, kron, numeric_rank, identity, zeros, ComplexMatrix};
use crate::recovery::{construct_recovery, RecoveryResult};
use crate::subsystem::SubsystemDecomposition;

#[derive(Debug, Clone)]
pub struct UccSubsystem {
    /// Summand of the fixed-point algebra of `E† ∘ E` this subsystem came from.
    pub block: usize,
    pub decomposition: SubsystemDecomposition,
    /// `U` with `U E(·) U† ∘ P_AB = F_A ⊗ id_B`.
    pub u_correction: ComplexMatrix,
    /// Largest mismatch of that identity over matrix units of `H_A ⊗ H_B`.
    pub residual: f64,
    /// `F_A` as a `d_A² x d_A²` superoperator.
    pub reduced: Superoperator,
    pub recovery: RecoveryResult,
}

/// `rank(E(P_AB))` against `rank(P_AB)` for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDiagnostic {
    pub block: usize,
    pub output_rank: usize,
    pub code_rank: usize,
}

#[derive(Debug, Clone)]
pub struct UccReport {
    pub subsystems: Vec<UccSubsystem>,
    pub classical_sectors: Vec<ClassicalSector>,
    pub rank_diagnostics: Vec<RankDiagnostic>,
    /// Block structure of `Fix(E† ∘ E)`.
    pub structure: AlgebraStructure,
}

/// Finds the unitarily correctable subsystems of a unital channel.
pub fn find_ucc(ch: &KrausChannel, seed: u64, tol: f64) -> Result<UccReport> {
    let unital = ch.unital_residual();
    if unital > tol {
        return Err(Error::NotUnital(unital));
    }
    let composed = ch.dual().compose(ch)?;
    let noiseless = noiseless_subsystems(&composed, seed, tol)?;

    let mut subsystems = Vec::with_capacity(noiseless.subsystems.len());
    let mut rank_diagnostics = Vec::with_capacity(noiseless.subsystems.len());
    for candidate in noiseless.subsystems {
        let dec = candidate.decomposition;
        let cert = check_correctable(ch, &dec, tol)?;
        if !cert.passed {
            return Err(Error::InternalContradiction {
                candidate: candidate.block,
                detail: "noiseless subsystem of E†∘E fails the correctability test".into(),
                residual: cert.residual,
            });
        }
        let recovery = construct_recovery(ch, &dec, &cert, tol)?;

        let p = dec.projector();
        rank_diagnostics.push(RankDiagnostic {
            block: candidate.block,
            output_rank: numeric_rank(&ch.apply(&p)?, tol),
            code_rank: dec.d_a() * dec.d_b(),
        });

        let omega = recovery.apply_f_ca(&identity(dec.d_a()));
        let range = range_basis(&omega, tol)?;
        if range.ncols() != dec.d_a() {
            return Err(Error::InternalContradiction {
                candidate: candidate.block,
                detail: format!(
                    "rank of F_C|A(I_A) is {}, expected {}",
                    range.ncols(),
                    dec.d_a()
                ),
                residual: 0.0,
            });
        }

        // pair the computed C ⊗ B basis (restricted to the range of F_C|A) with A ⊗ B
        let pairing = dec.isometry()
            * kron(&range.adjoint(), &identity(dec.d_b()))
            * recovery.c_subsystem.isometry().adjoint();
        let v = complete_to_unitary(&pairing, dec.dim(), tol * dec.dim() as f64)?;
        let u_correction = v * &recovery.u_recovery;

        let action = dec.factor_action(|x| Ok(&u_correction * ch.apply(x)? * u_correction.adjoint()))?;
        if action.residual > tol {
            return Err(Error::InternalContradiction {
                candidate: candidate.block,
                detail: "correcting unitary does not factor the channel on the code".into(),
                residual: action.residual,
            });
        }
        subsystems.push(UccSubsystem {
            block: candidate.block,
            decomposition: dec,
            u_correction,
            residual: action.residual,
            reduced: action.reduced,
            recovery,
        });
    }
    Ok(UccReport {
        subsystems,
        classical_sectors: noiseless.classical_sectors,
        rank_diagnostics,
        structure: noiseless.structure,
    })
}

/// Orthonormal eigenvectors of a positive matrix with eigenvalue above `tol * max(1, ‖M‖)`.
fn range_basis(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m, tol)?;
    let cut = tol * frob(m).max(1.0);
    let keep: Vec<usize> = (0..m.nrows()).filter(|&k| eig.spectrum.values()[k] > cut).collect();
    let mut out = zeros(m.nrows(), keep.len());
    for (col, &k) in keep.iter().enumerate() {
        out.set_column(col, &eig.vectors.column(k));
    }
    Ok(out)
}

/// For a correctable subsystem of a unital channel, evaluates
/// `(supp(E†E(P_AB)) ⊆ supp(P_AB), rank(E(P_AB)) = rank(P_AB), E†E(P_AB) = P_AB)`.
///
/// The three agree for every correctable subsystem of a unital channel.
pub fn rank_support_equivalence(
    ch: &KrausChannel,
    dec: &SubsystemDecomposition,
    tol: f64,
) -> Result<(bool, bool, bool)> {
    let unital = ch.unital_residual();
    if unital > tol {
        return Err(Error::NotUnital(unital));
    }
    let cert = check_correctable(ch, dec, tol)?;
    if !cert.passed {
        return Err(Error::PreconditionViolated(format!(
            "subsystem is not correctable (residual {:.3e})",
            cert.residual
        )));
    }
    let p = dec.projector();
    let image = ch.apply(&p)?;
    let back = ch.dual().apply(&image)?;
    let support = support_contained(&back, &p, tol);
    let rank = numeric_rank(&image, tol) == dec.d_a() * dec.d_b();
    let fixed = frob(&(&back - &p)) <= tol * frob(&p).max(1.0);
    Ok((support, rank, fixed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, real, DEFAULT_TOL, ONE};
    use crate::random::{haar_unitary, rng};

    fn phase_flip(p: f64) -> KrausChannel {
        let z = diag_real(&[1.0, -1.0]);
        KrausChannel::new(
            vec![
                kron(&z, &identity(2)) * real(p.sqrt()),
                kron(&identity(2), &z) * real((1.0 - p).sqrt()),
            ],
            DEFAULT_TOL,
        )
        .unwrap()
    }

    fn bell_code() -> SubsystemDecomposition {
        let mut w = zeros(4, 2);
        w[(0, 0)] = ONE;
        w[(3, 1)] = ONE;
        SubsystemDecomposition::subspace(w, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn unitary_channel_is_fully_correctable() {
        let mut r = rng(7);
        let u0 = haar_unitary(4, &mut r);
        let ch = KrausChannel::unitary(u0.clone(), DEFAULT_TOL).unwrap();
        let rep = find_ucc(&ch, 0, DEFAULT_TOL).unwrap();
        assert_eq!(rep.subsystems.len(), 1);
        let s = &rep.subsystems[0];
        assert_eq!((s.decomposition.d_a(), s.decomposition.d_b()), (1, 4));
        let prod = &s.u_correction * &u0;
        let phase = prod[(0, 0)];
        assert!((prod - identity(4) * phase).norm() < 1e-10);
    }

    #[test]
    fn phase_flip_matches_controlled_phase() {
        let ch = phase_flip(0.3);
        let rep = find_ucc(&ch, 0, DEFAULT_TOL).unwrap();
        assert_eq!(rep.subsystems.len(), 2);
        let s = &rep.subsystems[0];
        let code = s.decomposition.projector();
        assert!((code - bell_code().projector()).norm() < 1e-12);
        let cz = diag_real(&[1.0, 1.0, 1.0, -1.0]);
        for i in 0..4 {
            for j in 0..4 {
                let mut x = zeros(4, 4);
                x[(i, j)] = ONE;
                let x = s.decomposition.projector() * x * s.decomposition.projector();
                let ours = &s.u_correction * ch.apply(&x).unwrap() * s.u_correction.adjoint();
                let theirs = &cz * ch.apply(&x).unwrap() * &cz;
                assert!((ours - theirs).norm() < 1e-10);
            }
        }
        for d in &rep.rank_diagnostics {
            assert_eq!(d.output_rank, d.code_rank);
        }
    }

    #[test]
    fn equivalence_examples() {
        let ch = phase_flip(0.3);
        assert_eq!(rank_support_equivalence(&ch, &bell_code(), DEFAULT_TOL).unwrap(), (true, true, true));
        let id = KrausChannel::identity(3);
        let all = SubsystemDecomposition::factor_space(1, 3);
        assert_eq!(rank_support_equivalence(&id, &all, DEFAULT_TOL).unwrap(), (true, true, true));
    }

    #[test]
    fn equivalence_requires_correctability() {
        let mut r = rng(3);
        let ch = KrausChannel::new(crate::random::random_unital_kraus(4, 3, &mut r), DEFAULT_TOL).unwrap();
        let dec = SubsystemDecomposition::new(crate::random::random_isometry(4, 2, &mut r), 1, 2, DEFAULT_TOL)
            .unwrap();
        assert!(matches!(
            rank_support_equivalence(&ch, &dec, DEFAULT_TOL),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
