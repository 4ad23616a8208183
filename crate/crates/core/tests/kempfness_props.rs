mod common;

use common::*;
use orbitlab_core::linalg::{c, expm, real};
use orbitlab_core::{
    act, cartan_decompose, closedness_verdict, lie_algebra_basis, moment_vector, norm_flow, ClosednessStatus,
    FlowConfig, KempfNess, RepVector,
};
use proptest::prelude::*;

fn rep_and_seed() -> impl Strategy<Value = (usize, u64)> {
    (0..zoo().len(), any::<u64>())
}

/// `t ↦ ‖exp(tX)·v‖²` has derivative `2 Σ cᵢ μᵢ(v)` at zero for `X = Σ cᵢ Pᵢ`.
/// Checked by central differences at `t = 1e-6` on 200 random pairs.
#[test]
fn moment_is_the_gradient_of_the_norm() {
    let reps = zoo();
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for seed in 0..200u64 {
        let rep = &reps[seed as usize % reps.len()];
        let mut r = rng(seed);
        let algebra = lie_algebra_basis(&rep.group).unwrap();
        let p = cartan_decompose(&algebra, &tol()).unwrap().p_basis;
        let coeffs: Vec<f64> = p.matrices.iter().map(|_| gaussian(&mut r)).collect();
        let x = p.matrices.iter().zip(&coeffs).fold(p.matrices[0].clone() * real(0.0), |acc, (m, &k)| acc + m * real(k));
        let v = random_vector(rep, &mut r);
        let mu = moment_vector(rep, &p, &v).unwrap();
        let predicted: f64 = 2.0 * mu.iter().zip(&coeffs).map(|(m, k)| m * k).sum::<f64>();
        let t = 1e-6;
        let plus = act(rep, &expm(&(&x * real(t))), &v).unwrap().norm_sqr();
        let minus = act(rep, &expm(&(&x * real(-t))), &v).unwrap().norm_sqr();
        let fd = (plus - minus) / (2.0 * t);
        // relative to the size of the directional derivative's natural scale
        let scale = predicted.abs().max(1e-3 * v.norm_sqr());
        let rel = (fd - predicted).abs() / scale;
        worst = worst.max(rel);
        pairs += 1;
    }
    assert!(pairs >= 100);
    assert!(worst <= 1e-5, "worst relative error {worst:.3e}");
}

proptest! {
    #![proptest_config(prop_config(40))]

    #[test]
    fn flow_norms_never_increase((which, seed) in rep_and_seed(), degenerate in any::<bool>()) {
        let rep = &zoo()[which];
        let mut r = rng(seed);
        let v = if degenerate { rep.degenerate_vector(&mut r, 1.0) } else { random_vector(rep, &mut r) };
        let trace = norm_flow(rep, &rep.group, &v, &FlowConfig::default()).unwrap();
        prop_assert!(trace.is_monotone());
        prop_assert_eq!(trace.norms.len(), trace.iterations_used + 1);
    }

    #[test]
    fn verdict_is_invariant_under_scaling((which, seed) in rep_and_seed(), degenerate in any::<bool>()) {
        let rep = &zoo()[which];
        let mut r = rng(seed);
        let v = if degenerate { rep.degenerate_vector(&mut r, 1.0) } else { random_vector(rep, &mut r) };
        let config = FlowConfig::default();
        let base = closedness_verdict(rep, &rep.group, &v, &config, &tol()).unwrap();
        prop_assume!(base.status != ClosednessStatus::Inconclusive);
        for k in [2.0, -1.0, 1e-3] {
            let scaled = closedness_verdict(rep, &rep.group, &v.scale(real(k)), &config, &tol()).unwrap();
            prop_assert_eq!(scaled.status, base.status, "scale {}", k);
            prop_assert_eq!(scaled.start_orbit_dim, base.start_orbit_dim);
        }
    }

    #[test]
    fn verdict_and_moment_are_invariant_under_unitary_moves((which, seed) in rep_and_seed(), degenerate in any::<bool>()) {
        let rep = &zoo()[which];
        let mut r = rng(seed);
        let v = if degenerate { rep.degenerate_vector(&mut r, 1.0) } else { random_vector(rep, &mut r) };
        let u = random_unitary(&rep.group, &mut r);
        let uv = act(rep, &u, &v).unwrap();
        let kn = KempfNess::new(rep, &rep.group, &tol()).unwrap();
        let m1 = kn.relative_moment(&v);
        let m2 = kn.relative_moment(&uv);
        prop_assert!((m1 - m2).abs() <= 1e-9 * (1.0 + m1));
        let config = FlowConfig::default();
        let a = kn.verdict(&v, &config);
        let b = kn.verdict(&uv, &config);
        prop_assume!(a.status != ClosednessStatus::Inconclusive && b.status != ClosednessStatus::Inconclusive);
        prop_assert_eq!(a.status, b.status);
    }
}

#[test]
fn zero_vector_is_closed() {
    for rep in zoo() {
        let v = rep.zero_vector();
        let verdict = closedness_verdict(&rep, &rep.group, &v, &FlowConfig::default(), &tol()).unwrap();
        assert_eq!(verdict.status, ClosednessStatus::Closed);
    }
}

/// Binary quadratic forms under SL(2,C): closed iff the discriminant is
/// nonzero or the form vanishes. The discriminant is the independent oracle.
#[test]
fn sym2_verdict_matches_discriminant() {
    let rep = orbitlab_core::Representation::new(orbitlab_core::RepKind::Sym2, sl(2, orbitlab_core::Field::Complex));
    let mut disagreements = Vec::new();
    let mut inconclusive = 0;
    for seed in 0..60u64 {
        let mut r = rng(seed);
        let v = if seed % 3 == 0 { rep.degenerate_vector(&mut r, 1.0) } else { random_vector(&rep, &mut r) };
        let m = v.parts[0].clone();
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let expected = if det.norm() > 1e-6 * m.norm_squared() {
            ClosednessStatus::Closed
        } else {
            ClosednessStatus::NonClosed
        };
        let got = closedness_verdict(&rep, &rep.group, &v, &FlowConfig::default(), &tol()).unwrap().status;
        match got {
            ClosednessStatus::Inconclusive => inconclusive += 1,
            s if s != expected => disagreements.push(seed),
            _ => {}
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:?}");
    assert!(inconclusive <= 3);
}

/// A null-cone point of a mixed direct sum.
#[test]
fn null_cone_point_of_a_sum_is_non_closed() {
    let rep = orbitlab_core::Representation::new(
        orbitlab_core::RepKind::DirectSum { components: vec![orbitlab_core::RepKind::Defining, orbitlab_core::RepKind::Sym2] },
        sl(2, orbitlab_core::Field::Complex),
    );
    // (e₁, e₁e₁ᵗ): the torus diag(t, 1/t) sends it to 0, so non-closed
    let mut e1 = orbitlab_core::CMat::zeros(2, 1);
    e1[(0, 0)] = c(1.0, 0.0);
    let v = RepVector { parts: vec![e1.clone(), &e1 * e1.transpose()] };
    let verdict = closedness_verdict(&rep, &rep.group, &v, &FlowConfig::default(), &tol()).unwrap();
    assert_eq!(verdict.status, ClosednessStatus::NonClosed);
    assert!(verdict.trace.is_monotone());
}
