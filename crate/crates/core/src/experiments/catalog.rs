//! Built-in scenarios.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::groups::{block_j_form, GroupSpec};
use crate::linalg::{identity, real, unit, CMat, Field};
use crate::reps::{RepKind, RepVector, Representation};

use super::{ExpectedDims, ExperimentKind, Scenario};

/// `I + E₁₃` in `SL(6)`: unitriangular upper-left `3 × 3` block with a single
/// off-diagonal one, identity below.
pub fn special_element() -> CMat {
    identity(6) + unit(6, 0, 2)
}

/// `diag(J, J, J)` with `J = [[0, 1], [-1, 0]]`.
pub fn v0() -> CMat {
    block_j_form(6)
}

fn sl(n: usize, field: Field) -> GroupSpec {
    GroupSpec::special_linear(n, field)
}

fn alt6(name: &str, subgroup: GroupSpec) -> Scenario {
    let g = sl(6, Field::Complex);
    Scenario {
        name: String::from(name),
        group: g.clone(),
        subgroup,
        representation: Representation::new(RepKind::AltBilinear, g),
        base_point: Some(RepVector::single(v0())),
        special_element: Some(special_element()),
        reference_subgroup: None,
        degenerate_every: 0,
        expected: None,
    }
}

/// A named scenario with the experiment kind it is meant for.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub default_kind: ExperimentKind,
    pub description: &'static str,
    pub scenario: Scenario,
}

pub fn scenario_catalog() -> Vec<CatalogEntry> {
    let sl2_block = GroupSpec::block(sl(2, Field::Complex), 6, 0);

    let mut example1 = alt6("example1", sl2_block.clone());
    example1.expected = Some(ExpectedDims { g_orbit_dim: 14, g_stabilizer_dim: 21, h_stabilizer_dim: 1 });

    let mut sl4_block = alt6("sl4-block", GroupSpec::block(sl(4, Field::Complex), 6, 0));
    sl4_block.reference_subgroup = Some(sl2_block);

    let product = GroupSpec::product(vec![sl(2, Field::Complex), sl(2, Field::Complex)]);
    let normal_factor = Scenario {
        name: String::from("normal-factor"),
        group: product.clone(),
        subgroup: GroupSpec::block(sl(2, Field::Complex), 4, 0),
        representation: Representation::new(RepKind::ExternalTensor { left: 2, right: 2 }, product),
        base_point: Some(RepVector::single(identity(2))),
        special_element: None,
        reference_subgroup: None,
        degenerate_every: 0,
        expected: None,
    };

    let sl2 = sl(2, Field::Complex);
    let sym2_sum = Scenario {
        name: String::from("sym2-sum"),
        group: sl2.clone(),
        subgroup: sl2.clone(),
        representation: Representation::new(
            RepKind::DirectSum { components: vec![RepKind::Sym2, RepKind::Sym2] },
            sl2,
        ),
        base_point: Some(RepVector { parts: vec![identity(2), identity(2)] }),
        special_element: None,
        reference_subgroup: None,
        degenerate_every: 0,
        expected: None,
    };

    let sl2r = sl(2, Field::Real);
    let real_complex = Scenario {
        name: String::from("sl2-real-complex"),
        group: sl2r.clone(),
        subgroup: sl2r.clone(),
        representation: Representation::new(RepKind::Sym2, sl2r),
        base_point: Some(RepVector::single(identity(2) * real(1.0))),
        special_element: None,
        reference_subgroup: None,
        degenerate_every: 4,
        expected: None,
    };

    vec![
        CatalogEntry {
            name: "example1",
            default_kind: ExperimentKind::Example1,
            description: "SL(6,C) on antisymmetric 6x6 matrices, H = SL(2) upper-left block, v0 = diag(J,J,J)",
            scenario: example1,
        },
        CatalogEntry {
            name: "sl4-block",
            default_kind: ExperimentKind::Cor3Intersection,
            description: "as example1 with H = SL(4) upper-left block; generic stabilizers are copies of sl(2)",
            scenario: sl4_block,
        },
        CatalogEntry {
            name: "normal-factor",
            default_kind: ExperimentKind::Cor2Normal,
            description: "SL(2)xSL(2) on 2x2 matrices by (A,B).M = A M B^t, H = first factor",
            scenario: normal_factor,
        },
        CatalogEntry {
            name: "sym2-sum",
            default_kind: ExperimentKind::Cor5DirectSum,
            description: "SL(2,C) on two copies of symmetric 2x2 matrices",
            scenario: sym2_sum,
        },
        CatalogEntry {
            name: "sl2-real-complex",
            default_kind: ExperimentKind::RealComplexAgreement,
            description: "SL(2,R) versus SL(2,C) on real symmetric 2x2 matrices; every 4th point is rank one",
            scenario: real_complex,
        },
    ]
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    scenario_catalog().into_iter().find(|e| e.name == name)
}
