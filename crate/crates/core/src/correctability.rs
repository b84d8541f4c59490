//! Correctability and noiselessness tests for a candidate subsystem.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::channel::{KrausChannel, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{frob, zeros, ComplexMatrix};
use crate::subsystem::{FactorOutcome, SubsystemDecomposition};

/// Outcome of the Kraus-level test `P_AB E_a† E_b P_AB = F_ab ⊗ I_B`.
#[derive(Debug, Clone)]
pub struct CorrectabilityCertificate {
    pub passed: bool,
    /// Largest relative mismatch `‖W†E_a†E_bW − F_ab⊗I_B‖_F / max(1, ‖E_a†E_b‖_F)`.
    pub residual: f64,
    /// `F_ab`, indexed `[a][b]`, present when the test passed.
    pub f_blocks: Option<Vec<Vec<ComplexMatrix>>>,
    /// `G_A` with `P_AB ∘ E† ∘ E ∘ P_AB = G_A ⊗ id_B`, as a `d_A² x d_A²` matrix.
    pub g_a: Option<Superoperator>,
    /// Mismatch of the superoperator identity on the matrix-unit basis.
    pub superop_residual: Option<f64>,
    pub kraus_count: usize,
    pub d_a: usize,
    fingerprint: u64,
}

impl CorrectabilityCertificate {
    /// The positive block matrix `F = (F_ab)` of size `m d_A`.
    pub fn block_matrix(&self) -> Option<ComplexMatrix> {
        let blocks = self.f_blocks.as_ref()?;
        let (m, da) = (self.kraus_count, self.d_a);
        let mut f = zeros(m * da, m * da);
        for (a, row) in blocks.iter().enumerate() {
            for (b, block) in row.iter().enumerate() {
                f.view_mut((a * da, b * da), (da, da)).copy_from(block);
            }
        }
        Some(f)
    }

    /// Whether this certificate was produced for exactly this channel and subsystem.
    pub fn matches(&self, ch: &KrausChannel, dec: &SubsystemDecomposition) -> bool {
        self.kraus_count == ch.len() && self.d_a == dec.d_a() && self.fingerprint == fingerprint(ch, dec)
    }
}

fn fingerprint(ch: &KrausChannel, dec: &SubsystemDecomposition) -> u64 {
    let mut h = DefaultHasher::new();
    ch.dim().hash(&mut h);
    (dec.d_a(), dec.d_b()).hash(&mut h);
    for m in ch.kraus().iter().chain(std::iter::once(dec.isometry())) {
        m.shape().hash(&mut h);
        for z in m.iter() {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

fn check_dims(ch: &KrausChannel, dec: &SubsystemDecomposition) -> Result<()> {
    if ch.dim() != dec.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel acts on dimension {}, subsystem lives in dimension {}",
            ch.dim(),
            dec.dim()
        )));
    }
    Ok(())
}

/// Tests whether `dec`'s `B` factor is correctable for `ch`.
///
/// Every pair `(a, b)` of Kraus operators is compressed to `AB` and tested for the
/// form `F_ab ⊗ I_B`. On success `G_A = Σ_ab F_ab (·) F_ab†` is assembled and the
/// identity `P_AB ∘ E† ∘ E ∘ P_AB = G_A ⊗ id_B` is re-checked on an operator basis.
pub fn check_correctable(
    ch: &KrausChannel,
    dec: &SubsystemDecomposition,
    tol: f64,
) -> Result<CorrectabilityCertificate> {
    check_dims(ch, dec)?;
    let kraus = ch.kraus();
    let m = kraus.len();
    let mut residual = 0.0_f64;
    let mut blocks: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(m);
    let mut passed = true;
    for ea in kraus {
        let mut row = Vec::with_capacity(m);
        for eb in kraus {
            let product = ea.adjoint() * eb;
            let scale = frob(&product).max(1.0);
            let outcome = dec.factor_on_range(&product, tol)?;
            residual = residual.max(outcome.residual() / scale);
            match outcome {
                FactorOutcome::Factored { factor, .. } => row.push(factor),
                FactorOutcome::TensorMismatch { .. } => passed = false,
            }
        }
        blocks.push(row);
    }

    let mut cert = CorrectabilityCertificate {
        passed,
        residual,
        f_blocks: None,
        g_a: None,
        superop_residual: None,
        kraus_count: m,
        d_a: dec.d_a(),
        fingerprint: fingerprint(ch, dec),
    };
    if !passed {
        return Ok(cert);
    }

    let da = dec.d_a();
    let mut g = zeros(da * da, da * da);
    for f in blocks.iter().flatten() {
        g += f.map(|z| z.conj()).kronecker(f);
    }
    let g_a = Superoperator { dim: da, matrix: g };

    let dual = ch.dual();
    let p = dec.projector();
    let action = dec.factor_action(|x| Ok(&p * dual.apply(&ch.apply(x)?)? * &p))?;
    let mismatch = frob(&(&action.reduced.matrix - &g_a.matrix));
    cert.superop_residual = Some(action.residual.max(mismatch));
    cert.f_blocks = Some(blocks);
    cert.g_a = Some(g_a);
    Ok(cert)
}

/// Outcome of testing `E ∘ P_AB = G_A ⊗ id_B`.
#[derive(Debug, Clone)]
pub struct NoiselessCheck {
    pub passed: bool,
    pub residual: f64,
    pub g_a: Superoperator,
}

/// Tests whether `dec`'s `B` factor is a noiseless subsystem of `ch`.
pub fn check_noiseless(
    ch: &KrausChannel,
    dec: &SubsystemDecomposition,
    tol: f64,
) -> Result<NoiselessCheck> {
    check_dims(ch, dec)?;
    let action = dec.factor_action(|x| ch.apply(x))?;
    Ok(NoiselessCheck {
        passed: action.residual <= tol,
        residual: action.residual,
        g_a: action.reduced,
    })
}
