//! Built-in example channels with their candidate codes.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DVector, Matrix2, Vector2};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{
    complement_basis, diag_real, identity, kron, real, zeros, ComplexMatrix, C64, DEFAULT_TOL, ONE,
};
use crate::random::{haar_unitary, random_isometry, random_probabilities, rng, split_isometry};
use crate::subsystem::SubsystemDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoName {
    /// `E(ρ) = p Z₁ρZ₁ + (1−p) Z₂ρZ₂` on two qubits.
    PhaseFlip,
    /// `E(ρ) = p ρ + (1−p) UρU†` with `U` having eigenphases `θ₁..θ₄`.
    BinaryUnitary,
    /// The two-qubit swap as a single Kraus operator.
    Swap,
    /// `U₀ ∘ (F ⊗ id_B)` on a random subsystem, with a generic map `F: A → C`.
    Planted,
    /// Mixture of unitaries acting as `u_i ⊗ I_B` on a random subsystem.
    PlantedUnital,
}

impl DemoName {
    pub const ALL: [DemoName; 5] = [
        DemoName::PhaseFlip,
        DemoName::BinaryUnitary,
        DemoName::Swap,
        DemoName::Planted,
        DemoName::PlantedUnital,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DemoName::PhaseFlip => "phase-flip",
            DemoName::BinaryUnitary => "binary-unitary",
            DemoName::Swap => "swap",
            DemoName::Planted => "planted",
            DemoName::PlantedUnital => "planted-unital",
        }
    }
}

impl fmt::Display for DemoName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DemoName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DemoName::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown demo '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoSpec {
    pub name: DemoName,
    /// Mixing probability, `0 < p < 1`.
    pub p: f64,
    /// Eigenphases of the binary-unitary demo, `0 ≤ θ₁ < θ₂ < θ₃ < θ₄ < 2π`.
    pub thetas: [f64; 4],
    pub seed: u64,
    /// Planted demos: `(d_A, d_B, d)` and number of Kraus operators.
    pub d_a: usize,
    pub d_b: usize,
    pub dim: usize,
    pub kraus: usize,
}

impl DemoSpec {
    pub fn new(name: DemoName) -> Self {
        DemoSpec {
            name,
            p: 0.3,
            thetas: [0.3, 1.2, 2.5, 4.0],
            seed: 0,
            d_a: 2,
            d_b: 2,
            dim: 8,
            kraus: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::BadParams(format!("p must lie in (0, 1), got {}", self.p)));
        }
        let t = self.thetas;
        if !(0.0 <= t[0] && t[0] < t[1] && t[1] < t[2] && t[2] < t[3] && t[3] < TAU) {
            return Err(Error::BadParams(format!(
                "need 0 <= θ1 < θ2 < θ3 < θ4 < 2π, got {t:?}"
            )));
        }
        if matches!(self.name, DemoName::Planted | DemoName::PlantedUnital) {
            if self.d_a == 0 || self.d_b == 0 || self.kraus == 0 {
                return Err(Error::BadParams("d_A, d_B and the Kraus count must be positive".into()));
            }
            if self.d_a * self.d_b > self.dim {
                return Err(Error::BadParams(format!(
                    "d_A d_B = {} exceeds d = {}",
                    self.d_a * self.d_b,
                    self.dim
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Demo {
    pub channel: KrausChannel,
    pub code: Option<SubsystemDecomposition>,
    /// Binary-unitary demo: the compression `P U P = λ P` and the unitary `U`.
    pub lambda: Option<C64>,
    pub unitary: Option<ComplexMatrix>,
}

pub fn demo_build(spec: &DemoSpec) -> Result<Demo> {
    spec.validate()?;
    match spec.name {
        DemoName::PhaseFlip => phase_flip(spec.p),
        DemoName::BinaryUnitary => binary_unitary(spec),
        DemoName::Swap => swap(),
        DemoName::Planted => planted(spec),
        DemoName::PlantedUnital => planted_unital(spec),
    }
}

fn pauli_z() -> ComplexMatrix {
    diag_real(&[1.0, -1.0])
}

fn phase_flip(p: f64) -> Result<Demo> {
    let channel = KrausChannel::new(
        vec![
            kron(&pauli_z(), &identity(2)) * real(p.sqrt()),
            kron(&identity(2), &pauli_z()) * real((1.0 - p).sqrt()),
        ],
        DEFAULT_TOL,
    )?;
    let mut w = zeros(4, 2);
    w[(0, 0)] = ONE;
    w[(3, 1)] = ONE;
    Ok(Demo {
        channel,
        code: Some(SubsystemDecomposition::subspace(w, DEFAULT_TOL)?),
        lambda: None,
        unitary: None,
    })
}

/// Intersection `s λ₁ + (1−s) λ₃ = t λ₂ + (1−t) λ₄` of the two chords.
pub fn chord_intersection(lambdas: &[C64; 4]) -> Result<(f64, f64, C64)> {
    let [l1, l2, l3, l4] = *lambdas;
    let (a, b, rhs) = (l1 - l3, l2 - l4, l4 - l3);
    let m = Matrix2::new(a.re, -b.re, a.im, -b.im);
    let st = m
        .lu()
        .solve(&Vector2::new(rhs.re, rhs.im))
        .ok_or_else(|| Error::BadParams("chords are parallel".into()))?;
    let (s, t) = (st[0], st[1]);
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return Err(Error::BadParams(format!(
            "chords do not intersect (s = {s:.3}, t = {t:.3})"
        )));
    }
    Ok((s, t, l1 * s + l3 * (1.0 - s)))
}

fn binary_unitary(spec: &DemoSpec) -> Result<Demo> {
    let lambdas = spec.thetas.map(|t| C64::from_polar(1.0, t));
    let (s, t, lambda) = chord_intersection(&lambdas)?;
    let mut r = rng(spec.seed);
    let basis = haar_unitary(4, &mut r);
    let d = ComplexMatrix::from_diagonal(&DVector::from_column_slice(&lambdas));
    let u = &basis * d * basis.adjoint();
    let channel = KrausChannel::new(
        vec![identity(4) * real(spec.p.sqrt()), &u * real((1.0 - spec.p).sqrt())],
        DEFAULT_TOL,
    )?;
    let psi = basis.column(0) * real(s.sqrt()) + basis.column(2) * real((1.0 - s).sqrt());
    let phi = basis.column(1) * real(t.sqrt()) + basis.column(3) * real((1.0 - t).sqrt());
    let mut w = zeros(4, 2);
    w.set_column(0, &psi);
    w.set_column(1, &phi);
    Ok(Demo {
        channel,
        code: Some(SubsystemDecomposition::subspace(w, DEFAULT_TOL)?),
        lambda: Some(lambda),
        unitary: Some(u),
    })
}

pub fn swap_matrix() -> ComplexMatrix {
    let mut s = zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            s[(b * 2 + a, a * 2 + b)] = ONE;
        }
    }
    s
}

fn swap() -> Result<Demo> {
    Ok(Demo {
        channel: KrausChannel::unitary(swap_matrix(), DEFAULT_TOL)?,
        code: Some(SubsystemDecomposition::factor_space(2, 2)),
        lambda: None,
        unitary: None,
    })
}

fn columns_of(vectors: &[DVector<C64>], rows: usize) -> ComplexMatrix {
    let mut out = zeros(rows, vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        out.set_column(k, v);
    }
    out
}

fn planted(spec: &DemoSpec) -> Result<Demo> {
    let (d, da, db, k) = (spec.dim, spec.d_a, spec.d_b, spec.kraus);
    let dc = d / db;
    if k * dc < da {
        return Err(Error::BadParams(format!(
            "{k} Kraus operators into C of dimension {dc} cannot carry d_A = {da}"
        )));
    }
    let mut r = rng(spec.seed);
    let w = random_isometry(d, da * db, &mut r);
    let wc = random_isometry(d, dc * db, &mut r);
    let f = split_isometry(&random_isometry(k * dc, da, &mut r), k);

    // one stacked isometry H → C^k ⊗ H: the planted map on AB, anything orthogonal off it
    let mut stacked = zeros(k * d, d);
    for (c, fc) in f.iter().enumerate() {
        let block = &wc * kron(fc, &identity(db)) * w.adjoint();
        stacked.view_mut((c * d, 0), (d, d)).copy_from(&block);
    }
    let rest = d - da * db;
    if rest > 0 {
        let used = &stacked * &w;
        let free = columns_of(&complement_basis(&(&used * used.adjoint()), k * d - da * db), k * d);
        let mix = random_isometry(free.ncols(), rest, &mut r);
        let w_perp = columns_of(&complement_basis(&(&w * w.adjoint()), rest), d);
        stacked += free * mix * w_perp.adjoint();
    }
    let u0 = haar_unitary(d, &mut r);
    let kraus = split_isometry(&stacked, k).into_iter().map(|e| &u0 * e).collect();
    Ok(Demo {
        channel: KrausChannel::new(kraus, DEFAULT_TOL * d as f64)?,
        code: Some(SubsystemDecomposition::new(w, da, db, DEFAULT_TOL)?),
        lambda: None,
        unitary: None,
    })
}

fn planted_unital(spec: &DemoSpec) -> Result<Demo> {
    let (d, da, db, k) = (spec.dim, spec.d_a, spec.d_b, spec.kraus);
    let mut r = rng(spec.seed);
    let w = random_isometry(d, da * db, &mut r);
    let rest = d - da * db;
    let w_perp = columns_of(&complement_basis(&(&w * w.adjoint()), rest), d);
    let u0 = haar_unitary(d, &mut r);
    let kraus = random_probabilities(k, &mut r)
        .into_iter()
        .map(|p| {
            let on_code = &w * kron(&haar_unitary(da, &mut r), &identity(db)) * w.adjoint();
            let off_code = &w_perp * haar_unitary(rest, &mut r) * w_perp.adjoint();
            &u0 * (on_code + off_code) * real(p.sqrt())
        })
        .collect();
    Ok(Demo {
        channel: KrausChannel::new(kraus, DEFAULT_TOL * d as f64)?,
        code: Some(SubsystemDecomposition::new(w, da, db, DEFAULT_TOL)?),
        lambda: None,
        unitary: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correctability::check_correctable;
    use crate::linalg::frob;

    #[test]
    fn phase_flip_kraus() {
        let demo = demo_build(&DemoSpec::new(DemoName::PhaseFlip)).unwrap();
        let k = demo.channel.kraus();
        assert!((&k[0] - kron(&pauli_z(), &identity(2)) * real(0.3_f64.sqrt())).norm() < 1e-15);
        assert!((&k[1] - kron(&identity(2), &pauli_z()) * real(0.7_f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn binary_unitary_code_compresses_u_to_a_scalar() {
        let demo = demo_build(&DemoSpec::new(DemoName::BinaryUnitary)).unwrap();
        let code = demo.code.unwrap();
        let p = code.projector();
        let u = demo.unitary.unwrap();
        let lambda = demo.lambda.unwrap();
        assert!(frob(&(&p * u * &p - &p * lambda)) < 1e-10);
        assert!(check_correctable(&demo.channel, &code, DEFAULT_TOL).unwrap().passed);
    }

    #[test]
    fn swap_is_a_permutation() {
        let demo = demo_build(&DemoSpec::new(DemoName::Swap)).unwrap();
        let s = &demo.channel.kraus()[0];
        assert_eq!(s[(1, 2)], ONE);
        assert_eq!(s[(2, 1)], ONE);
        assert!((s * s - identity(4)).norm() == 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        let mut spec = DemoSpec::new(DemoName::PhaseFlip);
        spec.p = 1.0;
        assert!(matches!(demo_build(&spec), Err(Error::BadParams(_))));
        let mut spec = DemoSpec::new(DemoName::BinaryUnitary);
        spec.thetas = [0.3, 0.2, 2.5, 4.0];
        assert!(matches!(demo_build(&spec), Err(Error::BadParams(_))));
        let mut spec = DemoSpec::new(DemoName::Planted);
        spec.dim = 3;
        assert!(matches!(demo_build(&spec), Err(Error::BadParams(_))));
        assert!("bogus".parse::<DemoName>().is_err());
    }

    #[test]
    fn planted_demos_are_correctable() {
        for name in [DemoName::Planted, DemoName::PlantedUnital] {
            for (da, db, dim) in [(1, 2, 4), (2, 2, 4), (1, 2, 6), (2, 2, 8), (1, 4, 8)] {
                let spec = DemoSpec {
                    d_a: da,
                    d_b: db,
                    dim,
                    seed: 9,
                    ..DemoSpec::new(name)
                };
                let demo = demo_build(&spec).unwrap();
                let code = demo.code.unwrap();
                let cert = check_correctable(&demo.channel, &code, DEFAULT_TOL).unwrap();
                assert!(cert.passed, "{name} {da} {db} {dim}: {}", cert.residual);
            }
        }
    }

    #[test]
    fn planted_unital_is_unital() {
        let demo = demo_build(&DemoSpec::new(DemoName::PlantedUnital)).unwrap();
        assert!(demo.channel.is_unital(1e-10));
    }
}
