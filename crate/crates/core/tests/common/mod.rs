#![allow(dead_code)]

use orbitlab_core::linalg::{c, expm, Field};
use orbitlab_core::{
    cartan_decompose, lie_algebra_basis, CMat, GroupSpec, LieAlgebraBasis, RepKind, RepVector,
    Representation, Tolerances,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn sl(n: usize, field: Field) -> GroupSpec {
    GroupSpec::special_linear(n, field)
}

/// Small representations covering every kind and both fields.
pub fn zoo() -> Vec<Representation> {
    let c2 = sl(2, Field::Complex);
    vec![
        Representation::new(RepKind::Sym2, c2.clone()),
        Representation::new(RepKind::Sym2, sl(2, Field::Real)),
        Representation::new(RepKind::AltBilinear, sl(4, Field::Complex)),
        Representation::new(RepKind::Defining, sl(3, Field::Real)),
        Representation::new(
            RepKind::ExternalTensor { left: 2, right: 3 },
            GroupSpec::product(vec![c2.clone(), sl(3, Field::Complex)]),
        ),
        Representation::new(RepKind::DirectSum { components: vec![RepKind::Sym2, RepKind::Defining] }, c2),
        Representation::new(RepKind::Sym2, GroupSpec::special_orthogonal(3, Field::Complex)),
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Random algebra element with coefficients of standard deviation `spread`,
/// drawn over the algebra's field.
pub fn random_algebra_element(basis: &LieAlgebraBasis, rng: &mut ChaCha8Rng, spread: f64) -> CMat {
    let n = basis.ambient_size;
    basis.matrices.iter().fold(CMat::zeros(n, n), |acc, x| {
        let z = match basis.field {
            Field::Real => c(spread * gaussian(rng), 0.0),
            Field::Complex => c(spread * gaussian(rng), spread * gaussian(rng)),
        };
        acc + x * z
    })
}

pub fn random_group_matrix(group: &GroupSpec, rng: &mut ChaCha8Rng, spread: f64) -> CMat {
    let basis = lie_algebra_basis(group).unwrap();
    expm(&random_algebra_element(&basis, rng, spread))
}

/// Random element of the maximal compact subgroup, `exp` of a skew-Hermitian
/// algebra element.
pub fn random_unitary(group: &GroupSpec, rng: &mut ChaCha8Rng) -> CMat {
    let basis = lie_algebra_basis(group).unwrap();
    let k = cartan_decompose(&basis, &tol()).unwrap().k_basis;
    expm(&random_algebra_element(&k, rng, 1.0))
}

pub fn random_vector(rep: &Representation, rng: &mut ChaCha8Rng) -> RepVector {
    rep.random_vector(rng, 1.0)
}

pub fn max_abs_diff(a: &RepVector, b: &RepVector) -> f64 {
    (a.flatten() - b.flatten()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Fixed-seed configuration so failures reproduce across runs.
pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x0b17_1ab5),
        failure_persistence: None,
        ..proptest::test_runner::Config::default()
    }
}
