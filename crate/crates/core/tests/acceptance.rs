//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::f64::consts::TAU;
use std::process::ExitCode;

use rand::Rng;
use subrec_core::algebra::{algebra_structure, noiseless_subsystems};
use subrec_core::channel::KrausChannel;
use subrec_core::correctability::check_correctable;
use subrec_core::demo::{demo_build, swap_matrix, DemoName, DemoSpec};
use subrec_core::linalg::{
    diag_real, frob, hermitian_eig, identity, kron, majorizes, matrix_unit, numeric_rank,
    partial_trace_a, partial_trace_b, real, unitarity_residual, unvec, vec_op, zeros, ComplexMatrix,
    Spectrum, DEFAULT_TOL, ONE,
};
use subrec_core::random::{
    haar_unitary, random_density, random_isometry, random_kraus, random_probabilities,
    random_projector, random_pure_state, rng,
};
use subrec_core::recovery::{construct_recovery, recovery_to_correction, verify_correction};
use subrec_core::subsystem::SubsystemDecomposition;
use subrec_core::ucc::{find_ucc, rank_support_equivalence};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn spectrum(m: &ComplexMatrix) -> Spectrum {
    hermitian_eig(m, 1e-8).expect("Hermitian").spectrum
}

fn bell_projectors() -> (ComplexMatrix, ComplexMatrix) {
    (diag_real(&[1.0, 0.0, 0.0, 1.0]), diag_real(&[0.0, 1.0, 1.0, 0.0]))
}

fn phase_flip_reproduction() -> Outcome {
    let (even, odd) = bell_projectors();
    let cz = diag_real(&[1.0, 1.0, 1.0, -1.0]);
    let mut worst_residual = 0.0_f64;
    let mut worst_cz = 0.0_f64;
    for p in [0.1, 0.3, 0.5] {
        let demo = demo_build(&DemoSpec {
            p,
            ..DemoSpec::new(DemoName::PhaseFlip)
        })
        .unwrap();
        let ch = demo.channel;
        let report = match find_ucc(&ch, 0, DEFAULT_TOL) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("p={p}: {e}")),
        };
        let mut saw_even = false;
        for s in &report.subsystems {
            let dec = &s.decomposition;
            if dec.d_a() * dec.d_b() != 2 {
                return outcome(false, format!("p={p}: subsystem of dimension {}", dec.d_a() * dec.d_b()));
            }
            let proj = dec.projector();
            let is_even = frob(&(&proj - &even)) < 1e-10;
            if !is_even && frob(&(&proj - &odd)) >= 1e-10 {
                return outcome(false, format!("p={p}: subsystem is not a parity block"));
            }
            let u = &s.u_correction;
            let action = dec
                .factor_action(|x| Ok(u * ch.apply(x)? * u.adjoint()))
                .unwrap();
            worst_residual = worst_residual.max(action.residual);
            if is_even {
                saw_even = true;
                for i in 0..4 {
                    for j in 0..4 {
                        let x = &proj * matrix_unit(4, i, j) * &proj;
                        let out = ch.apply(&x).unwrap();
                        let diff = u * &out * u.adjoint() - &cz * &out * &cz;
                        worst_cz = worst_cz.max(frob(&diff));
                    }
                }
            }
        }
        if !saw_even {
            return outcome(false, format!("p={p}: span{{|00>,|11>}} not found"));
        }
    }
    outcome(
        worst_residual < 1e-8 && worst_cz < 1e-8,
        format!("correction residual {worst_residual:.2e}, controlled-phase action gap {worst_cz:.2e}"),
    )
}

fn binary_unitary_reproduction() -> Outcome {
    let mut r = rng(2024);
    let mut worst_cert = 0.0_f64;
    let mut worst_pup = 0.0_f64;
    for trial in 0..10 {
        let mut thetas = [0.0; 4];
        loop {
            for t in thetas.iter_mut() {
                *t = r.gen_range(0.0..TAU);
            }
            thetas.sort_by(f64::total_cmp);
            if thetas.windows(2).all(|w| w[1] - w[0] > 1e-3) {
                break;
            }
        }
        let spec = DemoSpec {
            p: r.gen_range(0.05..0.95),
            thetas,
            seed: trial,
            ..DemoSpec::new(DemoName::BinaryUnitary)
        };
        let demo = match demo_build(&spec) {
            Ok(d) => d,
            Err(e) => return outcome(false, format!("trial {trial}: {e}")),
        };
        let code = demo.code.unwrap();
        let cert = check_correctable(&demo.channel, &code, DEFAULT_TOL).unwrap();
        if !cert.passed {
            return outcome(false, format!("trial {trial}: code failed ({:.2e})", cert.residual));
        }
        worst_cert = worst_cert.max(cert.residual);
        let p = code.projector();
        let u = demo.unitary.unwrap();
        worst_pup = worst_pup.max(frob(&(&p * u * &p - &p * demo.lambda.unwrap())));

        let composed = demo.channel.dual().compose(&demo.channel).unwrap();
        let ns = noiseless_subsystems(&composed, 0, DEFAULT_TOL).unwrap();
        if !ns.subsystems.is_empty() || ns.classical_sectors.len() != 4 {
            return outcome(
                false,
                format!(
                    "trial {trial}: {} quantum blocks, {} classical sectors",
                    ns.subsystems.len(),
                    ns.classical_sectors.len()
                ),
            );
        }
    }
    outcome(
        worst_cert < 1e-9 && worst_pup < 1e-9,
        format!("certificate residual {worst_cert:.2e}, |PUP - λP| {worst_pup:.2e}, 4 classical sectors"),
    )
}

const PLANTED_SHAPES: [(usize, usize, usize); 5] = [(1, 2, 4), (2, 2, 4), (1, 2, 6), (2, 2, 8), (1, 4, 8)];

fn planted_instances() -> Vec<(KrausChannel, SubsystemDecomposition)> {
    (0..200u64)
        .map(|i| {
            let (d_a, d_b, dim) = PLANTED_SHAPES[(i % 5) as usize];
            let spec = DemoSpec {
                d_a,
                d_b,
                dim,
                kraus: 1 + (i as usize / 5) % 4,
                seed: 1000 + i,
                ..DemoSpec::new(DemoName::Planted)
            };
            let demo = demo_build(&spec).unwrap();
            (demo.channel, demo.code.unwrap())
        })
        .collect()
}

/// `1 − ⟨ψ|σ_B|ψ⟩` after `rounds` applications of noise then correction.
fn marginal_deviation(
    ch: &KrausChannel,
    correction: &KrausChannel,
    dec: &SubsystemDecomposition,
    seed: u64,
    rounds: usize,
) -> f64 {
    let mut r = rng(seed);
    let psi = random_pure_state(dec.d_b(), &mut r);
    let rho_a = random_density(dec.d_a(), &mut r);
    let mut state = dec.embed_product(&rho_a, &psi).unwrap();
    let mut worst = 0.0_f64;
    for _ in 0..rounds {
        state = correction.apply(&ch.apply(&state).unwrap()).unwrap();
        let local = dec.compress(&state).unwrap();
        let sigma_b = partial_trace_a(&local, dec.d_a(), dec.d_b()).unwrap();
        let fidelity = (&psi * &sigma_b).trace().re;
        worst = worst.max((1.0 - fidelity).abs());
    }
    worst
}

fn constructive_round_trip(instances: &[(KrausChannel, SubsystemDecomposition)]) -> Outcome {
    let mut worst_recovery = 0.0_f64;
    let mut worst_correction = 0.0_f64;
    let mut worst_fidelity = 0.0_f64;
    for (i, (ch, dec)) in instances.iter().enumerate() {
        let cert = check_correctable(ch, dec, DEFAULT_TOL).unwrap();
        if !cert.passed {
            return outcome(false, format!("instance {i}: certificate failed ({:.2e})", cert.residual));
        }
        let rec = match construct_recovery(ch, dec, &cert, DEFAULT_TOL) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("instance {i}: {e}")),
        };
        worst_recovery = worst_recovery.max(rec.residual);
        let corr = recovery_to_correction(&rec, dec, DEFAULT_TOL).unwrap();
        worst_correction = worst_correction.max(verify_correction(ch, dec, &corr).unwrap().residual);
        worst_fidelity = worst_fidelity.max(marginal_deviation(ch, &corr, dec, i as u64, 2));
    }
    outcome(
        worst_recovery < 1e-8 && worst_correction < 1e-8 && worst_fidelity < 1e-8,
        format!(
            "{} instances: recovery {worst_recovery:.2e}, correction {worst_correction:.2e}, B fidelity loss over 2 rounds {worst_fidelity:.2e}",
            instances.len()
        ),
    )
}

fn superoperator(kraus: &[ComplexMatrix]) -> ComplexMatrix {
    let n = kraus[0].nrows();
    let mut s = zeros(n * n, n * n);
    for k in kraus {
        s += k.map(|z| z.conj()).kronecker(k);
    }
    s
}

/// Tests `P ∘ E† ∘ E ∘ P = G_A ⊗ id_B` by composing superoperator matrices.
fn oracle_correctable(ch: &KrausChannel, dec: &SubsystemDecomposition) -> bool {
    let d = ch.dim();
    let p = dec.projector();
    let adjoints: Vec<ComplexMatrix> = ch.kraus().iter().map(|k| k.adjoint()).collect();
    let s_p = p.map(|z| z.conj()).kronecker(&p);
    let l = &s_p * superoperator(&adjoints) * superoperator(ch.kraus()) * &s_p;
    let phi = |x: &ComplexMatrix| unvec(&(&l * vec_op(x)), d, d);
    let (da, db) = (dec.d_a(), dec.d_b());
    let w = dec.isometry();
    let mut worst = 0.0_f64;
    for i in 0..da {
        for j in 0..da {
            let full = phi(&(w * kron(&matrix_unit(da, i, j), &identity(db)) * w.adjoint()));
            let g = partial_trace_b(&(w.adjoint() * full * w), da, db).unwrap() / real(db as f64);
            for k in 0..db {
                for m in 0..db {
                    let e_b = matrix_unit(db, k, m);
                    let x = w * kron(&matrix_unit(da, i, j), &e_b) * w.adjoint();
                    let expected = w * kron(&g, &e_b) * w.adjoint();
                    worst = worst.max(frob(&(phi(&x) - expected)));
                }
            }
        }
    }
    worst <= 1e-7 * frob(&l).max(1.0)
}

fn testable_condition_equivalence(planted: &[(KrausChannel, SubsystemDecomposition)]) -> Outcome {
    let mut r = rng(4242);
    let mut generic = Vec::with_capacity(200);
    for i in 0..200usize {
        let (d_a, d_b, dim) = PLANTED_SHAPES[i % 5];
        let ch = KrausChannel::new(random_kraus(dim, 2 + i % 3, &mut r), 1e-8).unwrap();
        let dec = SubsystemDecomposition::new(random_isometry(dim, d_a * d_b, &mut r), d_a, d_b, 1e-10).unwrap();
        generic.push((ch, dec));
    }
    let mut disagreements = 0;
    let mut generic_passes = 0;
    for (ch, dec) in planted.iter().chain(generic.iter()) {
        let verdict = check_correctable(ch, dec, DEFAULT_TOL).unwrap().passed;
        if verdict != oracle_correctable(ch, dec) {
            disagreements += 1;
        }
    }
    for (ch, dec) in &generic {
        if check_correctable(ch, dec, DEFAULT_TOL).unwrap().passed {
            generic_passes += 1;
        }
    }
    outcome(
        disagreements == 0 && generic_passes == 0,
        format!(
            "{} channels: {disagreements} disagreements with the superoperator oracle, {generic_passes} generic channels passed",
            planted.len() + generic.len()
        ),
    )
}

/// A mixture of unitaries whose second branch moves a `rank`-dimensional code to an
/// orthogonal subspace: correctable, but not unitarily correctable.
fn orthogonal_branch_channel(
    dim: usize,
    rank: usize,
    r: &mut subrec_core::random::SubrecRng,
) -> (KrausChannel, SubsystemDecomposition) {
    let w = random_isometry(dim, dim, r);
    let code = w.columns(0, rank).into_owned();
    // cyclic shift by `rank` in the W basis sends the code to an orthogonal block
    let mut shift = zeros(dim, dim);
    for i in 0..dim {
        shift[((i + rank) % dim, i)] = ONE;
    }
    let u1 = &w * shift * w.adjoint();
    let u0 = haar_unitary(dim, r);
    let p = r.gen_range(0.1..0.9);
    let ch = KrausChannel::new(vec![&u0 * real(f64::sqrt(p)), &u0 * u1 * real(f64::sqrt(1.0 - p))], 1e-8).unwrap();
    (ch, SubsystemDecomposition::subspace(code, 1e-10).unwrap())
}

/// Mixture of unitaries that are block diagonal with respect to a random projector.
fn projector_preserving_channel(
    dim: usize,
    rank: usize,
    r: &mut subrec_core::random::SubrecRng,
) -> (KrausChannel, ComplexMatrix) {
    let w = haar_unitary(dim, r);
    let probs = random_probabilities(1 + r.gen_range(0..3), r);
    let kraus = probs
        .iter()
        .map(|&q| {
            let mut block = zeros(dim, dim);
            block.view_mut((0, 0), (rank, rank)).copy_from(&haar_unitary(rank, r));
            block
                .view_mut((rank, rank), (dim - rank, dim - rank))
                .copy_from(&haar_unitary(dim - rank, r));
            &w * block * w.adjoint() * real(q.sqrt())
        })
        .collect();
    let proj = w.columns(0, rank) * w.columns(0, rank).adjoint();
    (KrausChannel::new(kraus, 1e-8).unwrap(), proj)
}

fn lemma_suite() -> Outcome {
    let mut r = rng(5150);
    let mut violations = Vec::new();
    let mut saturated = 0;
    let mut fixed = 0;
    let mut equivalence_checks = 0;
    for i in 0..100usize {
        let dim = 2 + i % 7;
        let rank = 1 + r.gen_range(0..dim - 1);
        let (ch, proj) = if i % 3 == 0 {
            projector_preserving_channel(dim, rank, &mut r)
        } else {
            let k = 1 + r.gen_range(0..4);
            let kraus = subrec_core::random::random_unital_kraus(dim, k, &mut r);
            (KrausChannel::new(kraus, 1e-8).unwrap(), random_projector(dim, rank, &mut r))
        };

        let rho = random_density(dim, &mut r);
        let out = ch.apply(&rho).unwrap();
        if !majorizes(&spectrum(&rho), &spectrum(&out), 1e-9).unwrap() {
            violations.push(format!("{i}: majorization"));
        }

        let image = ch.apply(&proj).unwrap();
        let out_rank = numeric_rank(&image, 1e-9);
        if out_rank < rank {
            violations.push(format!("{i}: rank dropped"));
        }
        if out_rank == rank {
            saturated += 1;
            if frob(&(&image * &image - &image)) >= 1e-8 {
                violations.push(format!("{i}: saturated rank without projector output"));
            }
        }

        let forward = frob(&(&image - &proj)) < 1e-9;
        let backward = frob(&(ch.dual().apply(&proj).unwrap() - &proj)) < 1e-9;
        if forward != backward {
            violations.push(format!("{i}: E(P)=P and E†(P)=P disagree"));
        }
        if forward {
            fixed += 1;
        }

        let mut candidates = Vec::new();
        if dim >= 2 * rank {
            candidates.push(orthogonal_branch_channel(dim, rank, &mut r));
        }
        let (d_a, d_b) = if rank % 2 == 0 { (rank / 2, 2) } else { (1, rank) };
        let planted = demo_build(&DemoSpec {
            d_a,
            d_b,
            dim,
            kraus: 1 + i % 3,
            seed: 7000 + i as u64,
            ..DemoSpec::new(DemoName::PlantedUnital)
        })
        .unwrap();
        candidates.push((planted.channel, planted.code.unwrap()));
        candidates.push((ch.clone(), SubsystemDecomposition::subspace(
            hermitian_eig(&proj, 1e-8).unwrap().vectors.columns(0, rank).into_owned(),
            1e-8,
        ).unwrap()));
        for (c, dec) in &candidates {
            if !check_correctable(c, dec, DEFAULT_TOL).unwrap().passed {
                continue;
            }
            equivalence_checks += 1;
            let (a, b, e) = rank_support_equivalence(c, dec, DEFAULT_TOL).unwrap();
            if a != b || b != e {
                violations.push(format!("{i}: rank/support conditions ({a}, {b}, {e})"));
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "100 channels ({saturated} rank-saturated, {fixed} with E(P)=P), {equivalence_checks} correctable codes: {} violations{}",
            violations.len(),
            violations.first().map(|v| format!(", first {v}")).unwrap_or_default()
        ),
    )
}

fn algebra_round_trip() -> Outcome {
    let mut r = rng(6006);
    let mut worst = 0.0_f64;
    for trial in 0..50u64 {
        let blocks: Vec<(usize, usize)> = loop {
            let count = 1 + r.gen_range(0..4);
            let b: Vec<(usize, usize)> = (0..count)
                .map(|_| (1 + r.gen_range(0..4), 1 + r.gen_range(0..3)))
                .collect();
            if b.iter().map(|(m, n)| m * n).sum::<usize>() <= 12 {
                break b;
            }
        };
        let used: usize = blocks.iter().map(|(m, n)| m * n).sum();
        let dim = used + r.gen_range(0..=12 - used);
        let rot = haar_unitary(dim, &mut r);
        let mut basis = Vec::new();
        let mut off = 0;
        for &(m, n) in &blocks {
            for i in 0..m {
                for j in 0..m {
                    let mut x = zeros(dim, dim);
                    x.view_mut((off, off), (m * n, m * n))
                        .copy_from(&kron(&matrix_unit(m, i, j), &identity(n)));
                    basis.push(&rot * x * rot.adjoint());
                }
            }
            off += m * n;
        }
        let found = match algebra_structure(&basis, trial, DEFAULT_TOL) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("trial {trial} {blocks:?}: {e}")),
        };
        let mut expected = blocks.clone();
        expected.sort();
        let mut got = found.blocks.clone();
        got.sort();
        if got != expected {
            return outcome(false, format!("trial {trial}: expected {expected:?}, got {got:?}"));
        }
        for b in &basis {
            worst = worst.max(found.pattern_residual(b).unwrap());
        }
        worst = worst.max(unitarity_residual(&found.q));
    }
    outcome(worst < 1e-9, format!("50 algebras recovered, pattern residual {worst:.2e}"))
}

fn swap_example() -> Outcome {
    let demo = demo_build(&DemoSpec::new(DemoName::Swap)).unwrap();
    let (ch, dec) = (demo.channel, demo.code.unwrap());
    let cert = check_correctable(&ch, &dec, DEFAULT_TOL).unwrap();
    let rec = match construct_recovery(&ch, &dec, &cert, DEFAULT_TOL) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let swap = swap_matrix();
    let inverse = swap.adjoint();
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            let x = matrix_unit(4, i, j);
            let ours = &rec.u_recovery * &x * rec.u_recovery.adjoint();
            let theirs = &inverse * &x * inverse.adjoint();
            worst = worst.max(frob(&(ours - theirs)));
        }
    }
    let twice = ch.compose(&ch).unwrap();
    let ns = noiseless_subsystems(&twice, 0, DEFAULT_TOL).unwrap();
    let full = ns.subsystems.len() == 1 && ns.subsystems[0].decomposition.d_a() * ns.subsystems[0].decomposition.d_b() == 4;
    outcome(
        worst < 1e-10 && full,
        format!("recovery vs swap inverse {worst:.2e}, swap∘swap noiseless on all of H: {full}"),
    )
}

fn main() -> ExitCode {
    let planted = planted_instances();
    let results = [
        ("1 phase-flip reproduction", phase_flip_reproduction()),
        ("2 binary-unitary reproduction", binary_unitary_reproduction()),
        ("3 constructive recovery round trip", constructive_round_trip(&planted)),
        ("4 testable-condition equivalence", testable_condition_equivalence(&planted)),
        ("5 unital-channel lemma suite", lemma_suite()),
        ("6 algebra structure round trip", algebra_round_trip()),
        ("7 swap example", swap_example()),
    ];
    let mut all = true;
    for (name, res) in &results {
        all &= res.passed;
        println!(
            "criterion {name}: {} ({})",
            if res.passed { "PASS" } else { "FAIL" },
            res.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
