//! Structure of matrix Lie subalgebras and a reductivity test.
//!
//! An algebraic subalgebra is reductive when it splits as center plus derived
//! algebra, the Killing form is nondegenerate on the derived part, and the
//! center consists of semisimple matrices. All three are checked here on an
//! orthonormalized basis, so the verdict concerns the identity component only.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::Schur;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::groups::LieAlgebraBasis;
use crate::linalg::{
    self, commutator, decompose, field_inner, flatten, singular_values, unflatten, CMat, CVec, Field,
    RankDecision, C64,
};
use crate::matrix_serde;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementType {
    Semisimple,
    Nilpotent,
    Mixed,
    /// Eigenvalue clusters or multiplicities too close to a cutoff to decide.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductivityStatus {
    Reductive,
    NotReductive,
    Inconclusive,
}

/// Evidence for a failed reductivity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    NilpotentCenter {
        #[serde(with = "matrix_serde")]
        matrix: CMat,
    },
    MixedCenter {
        #[serde(with = "matrix_serde")]
        matrix: CMat,
    },
    /// Element of the derived algebra in the kernel of the Killing form.
    DegenerateKilling {
        #[serde(with = "matrix_serde")]
        matrix: CMat,
    },
    DecompositionFailure {
        dim: usize,
        center_dim: usize,
        derived_dim: usize,
        intersection_dim: usize,
    },
}

/// Center, derived algebra and Killing form of a subalgebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Structure {
    /// Orthonormalized input.
    pub basis: LieAlgebraBasis,
    pub derived: LieAlgebraBasis,
    pub center: LieAlgebraBasis,
    /// `tr(ad Dₖ ad Dₗ)` over the orthonormal derived basis.
    #[serde(with = "matrix_serde")]
    pub killing: CMat,
    pub killing_rank: RankDecision,
    pub derived_rank: RankDecision,
    pub center_rank: RankDecision,
    /// `dim(𝔷 ∩ [𝔥, 𝔥])`.
    pub intersection_dim: usize,
    pub intersection_ambiguous: bool,
    /// Killing kernel directions, as elements of the derived algebra.
    #[serde(with = "matrix_serde::list")]
    pub killing_kernel: Vec<CMat>,
}

impl Structure {
    pub fn ambiguous(&self) -> bool {
        self.killing_rank.ambiguous
            || self.derived_rank.ambiguous
            || self.center_rank.ambiguous
            || self.intersection_ambiguous
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubalgebraReport {
    pub dim: usize,
    pub derived_dim: usize,
    pub center_dim: usize,
    pub killing_rank_on_derived: usize,
    /// `None` when some center element could not be classified.
    pub center_all_semisimple: Option<bool>,
    pub center_element_types: Vec<ElementType>,
    pub decomposition_ok: bool,
    pub rank_ambiguous: bool,
    pub verdict: ReductivityStatus,
    pub witnesses: Vec<Witness>,
    /// What the verdict is about: always the identity component.
    pub scope: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Coordinates of `x` in the orthonormal basis `q`.
fn coordinates(field: Field, q: &[CVec], x: &CMat) -> CVec {
    let fx = flatten(x);
    CVec::from_iterator(q.len(), q.iter().map(|qi| field_inner(field, qi, &fx)))
}

/// `ad x` on the orthonormal basis `q` (as matrices `qm`).
fn ad_matrix(field: Field, q: &[CVec], qm: &[CMat], x: &CMat) -> CMat {
    let d = q.len();
    let mut a = CMat::zeros(d, d);
    for (j, y) in qm.iter().enumerate() {
        a.set_column(j, &coordinates(field, q, &commutator(x, y)));
    }
    a
}

fn matrices(field: Field, vecs: &[CVec], n: usize) -> LieAlgebraBasis {
    LieAlgebraBasis {
        matrices: vecs.iter().map(|v| unflatten(v.as_slice(), n, n)).collect(),
        field,
        ambient_size: n,
    }
}

pub fn structure_report(basis: &LieAlgebraBasis, tol: &Tolerances) -> Result<Structure> {
    basis.check_bracket_closure(tol).map_err(|e| invalid(format!("{e}")))?;
    let field = basis.field;
    let n = basis.ambient_size;
    let ob = basis.orthonormalized(tol);
    let qm = &ob.matrices;
    let q: Vec<CVec> = qm.iter().map(flatten).collect();
    let d = q.len();

    let brackets: Vec<CVec> = (0..d)
        .flat_map(|i| ((i + 1)..d).map(move |j| (i, j)))
        .map(|(i, j)| flatten(&commutator(&qm[i], &qm[j])))
        .collect();
    let derived_dec = decompose(field, &brackets, 1.0, tol);
    let derived_vecs = derived_dec.range_basis().to_vec();
    let derived = matrices(field, &derived_vecs, n);

    // X is central iff [X, qⱼ] = 0 for all j
    let ad_images: Vec<CVec> = qm
        .iter()
        .map(|x| {
            let entries: Vec<C64> = qm.iter().flat_map(|y| commutator(x, y).iter().copied().collect::<Vec<_>>()).collect();
            CVec::from_vec(entries)
        })
        .collect();
    let center_dec = decompose(field, &ad_images, 1.0, tol);
    let center = LieAlgebraBasis {
        matrices: center_dec.null_space().iter().map(|c| ob.combination(c.as_slice())).collect(),
        field,
        ambient_size: n,
    };

    let ads: Vec<CMat> = derived.matrices.iter().map(|x| ad_matrix(field, &q, qm, x)).collect();
    let dd = ads.len();
    let killing = CMat::from_fn(dd, dd, |k, l| (&ads[k] * &ads[l]).trace());
    let killing_cols: Vec<CVec> = (0..dd).map(|l| killing.column(l).into_owned()).collect();
    let killing_dec = decompose(field, &killing_cols, 1.0, tol);
    let killing_kernel = killing_dec
        .null_space()
        .iter()
        .map(|c| derived.combination(c.as_slice()))
        .collect();

    let mut union = center.vectors();
    union.extend(derived_vecs.iter().cloned());
    let union_dec = decompose(field, &union, 1.0, tol);
    let intersection_dim = union.len() - union_dec.rank.rank;

    Ok(Structure {
        basis: ob,
        derived,
        center,
        killing,
        killing_rank: killing_dec.rank,
        derived_rank: derived_dec.rank,
        center_rank: center_dec.rank,
        intersection_dim,
        intersection_ambiguous: union_dec.rank.ambiguous,
        killing_kernel,
    })
}

/// Jordan type of a single matrix.
///
/// Nilpotency uses the step ratios `|Xᵏ| / (|Xᵏ⁻¹| |X|)` rather than
/// `|Xⁿ| / |X|ⁿ`, so semisimple matrices with small eigenvalues relative to
/// their norm are not mistaken for nilpotent ones. Semisimplicity compares,
/// for every repeated eigenvalue cluster, the number of small singular values
/// of `X - λI` with the cluster size.
pub fn element_type(x: &CMat, tol: &Tolerances) -> ElementType {
    let n = x.nrows();
    let norm = linalg::frobenius(x);
    if norm == 0.0 {
        return ElementType::Nilpotent;
    }
    if !linalg::is_finite(x) || !x.is_square() {
        return ElementType::Inconclusive;
    }
    let mut best = f64::INFINITY;
    let mut prev = x.clone();
    let mut prev_norm = norm;
    for _ in 2..=n {
        let next = &prev * x;
        let next_norm = linalg::frobenius(&next);
        best = best.min(next_norm / (prev_norm * norm));
        if next_norm == 0.0 {
            break;
        }
        prev = next;
        prev_norm = next_norm;
    }
    if best <= tol.nilpotent {
        return ElementType::Nilpotent;
    }
    let nil_ambiguous = best <= tol.nilpotent * tol.ambiguity_factor;

    let Some(schur) = Schur::try_new(x.clone(), f64::EPSILON, 100_000) else {
        return ElementType::Inconclusive;
    };
    let (_, t) = schur.unpack();
    let eig: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let merge = tol.cluster * norm;

    // single-linkage clustering
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if linalg::abs(eig[i] - eig[j]) <= merge {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| root(&mut label, i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = linalg::abs(eig[i] - eig[j]);
            if roots[i] != roots[j] && dist <= merge * tol.ambiguity_factor {
                return ElementType::Inconclusive;
            }
        }
    }

    let cutoff = tol.jordan * norm;
    let mut ambiguous = nil_ambiguous;
    let mut deficient = false;
    let mut clusters: Vec<usize> = roots.clone();
    clusters.sort_unstable();
    clusters.dedup();
    for r in clusters {
        let members: Vec<usize> = (0..n).filter(|&i| roots[i] == r).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        let lambda = members.iter().map(|&i| eig[i]).sum::<C64>() / C64::new(m as f64, 0.0);
        let shifted = x - CMat::identity(n, n) * lambda;
        let sv = singular_values(&shifted);
        let small = sv.iter().filter(|&&s| s <= cutoff).count();
        if sv
            .iter()
            .any(|&s| s > cutoff / tol.ambiguity_factor && s <= cutoff * tol.ambiguity_factor)
        {
            ambiguous = true;
        }
        if small < m {
            deficient = true;
        } else if small > m {
            ambiguous = true;
        }
    }
    match (ambiguous, deficient) {
        (true, _) => ElementType::Inconclusive,
        (false, true) => ElementType::Mixed,
        (false, false) => ElementType::Semisimple,
    }
}

const SCOPE: &str = "identity component (Lie algebra level)";

pub fn reductivity_verdict(basis: &LieAlgebraBasis, tol: &Tolerances) -> SubalgebraReport {
    let mut report = SubalgebraReport {
        dim: basis.dim(),
        derived_dim: 0,
        center_dim: 0,
        killing_rank_on_derived: 0,
        center_all_semisimple: Some(true),
        center_element_types: Vec::new(),
        decomposition_ok: true,
        rank_ambiguous: false,
        verdict: ReductivityStatus::Reductive,
        witnesses: Vec::new(),
        scope: String::from(SCOPE),
        reason: None,
    };
    if basis.is_empty() {
        return report;
    }
    let s = match structure_report(basis, tol) {
        Ok(s) => s,
        Err(e) => {
            report.verdict = ReductivityStatus::Inconclusive;
            report.center_all_semisimple = None;
            report.reason = Some(format!("{e}"));
            return report;
        }
    };
    report.dim = s.basis.dim();
    report.derived_dim = s.derived.dim();
    report.center_dim = s.center.dim();
    report.killing_rank_on_derived = s.killing_rank.rank;
    report.rank_ambiguous = s.ambiguous();
    report.decomposition_ok =
        report.center_dim + report.derived_dim == report.dim && s.intersection_dim == 0;

    let mut witnesses = Vec::new();
    if !report.decomposition_ok {
        witnesses.push(Witness::DecompositionFailure {
            dim: report.dim,
            center_dim: report.center_dim,
            derived_dim: report.derived_dim,
            intersection_dim: s.intersection_dim,
        });
    }
    if let Some(k) = s.killing_kernel.first() {
        witnesses.push(Witness::DegenerateKilling { matrix: k.clone() });
    }
    let mut unknown = false;
    for z in &s.center.matrices {
        let t = element_type(z, tol);
        report.center_element_types.push(t);
        match t {
            ElementType::Semisimple => {}
            ElementType::Nilpotent => witnesses.push(Witness::NilpotentCenter { matrix: z.clone() }),
            ElementType::Mixed => witnesses.push(Witness::MixedCenter { matrix: z.clone() }),
            ElementType::Inconclusive => unknown = true,
        }
    }
    let center_bad = report
        .center_element_types
        .iter()
        .any(|t| matches!(t, ElementType::Nilpotent | ElementType::Mixed));
    report.center_all_semisimple = if center_bad {
        Some(false)
    } else if unknown {
        None
    } else {
        Some(true)
    };

    report.verdict = if report.rank_ambiguous {
        report.reason = Some(String::from("rank decision near the cutoff"));
        ReductivityStatus::Inconclusive
    } else if !witnesses.is_empty() {
        ReductivityStatus::NotReductive
    } else if unknown {
        report.reason = Some(String::from("center element type undecided"));
        ReductivityStatus::Inconclusive
    } else {
        ReductivityStatus::Reductive
    };
    report.witnesses = witnesses;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{block_j_form, lie_algebra_basis, GroupSpec};
    use crate::linalg::{real, unit};
    use alloc::vec;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag(d: &[f64]) -> CMat {
        CMat::from_fn(d.len(), d.len(), |i, j| if i == j { real(d[i]) } else { real(0.0) })
    }

    #[test]
    fn element_types() {
        assert_eq!(element_type(&diag(&[1.0, -1.0]), &tol()), ElementType::Semisimple);
        assert_eq!(element_type(&unit(2, 0, 1), &tol()), ElementType::Nilpotent);
        assert_eq!(element_type(&linalg::zeros(3, 3), &tol()), ElementType::Nilpotent);
        let upper = CMat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(1.0)]);
        assert_eq!(element_type(&upper, &tol()), ElementType::Semisimple);
        let jordan = CMat::from_row_slice(2, 2, &[real(1.0), real(1.0), real(0.0), real(1.0)]);
        assert_eq!(element_type(&jordan, &tol()), ElementType::Mixed);
        // repeated eigenvalue with full eigenspace
        assert_eq!(element_type(&diag(&[2.0, 2.0, -4.0]), &tol()), ElementType::Semisimple);
        // small eigenvalues next to a large off-diagonal entry
        let skewed = unit(2, 0, 1) + (unit(2, 0, 0) - unit(2, 1, 1)) * real(1e-3);
        assert_eq!(element_type(&skewed, &tol()), ElementType::Semisimple);
    }

    #[test]
    fn sl2_is_semisimple() {
        let b = lie_algebra_basis(&GroupSpec::special_linear(2, Field::Complex)).unwrap();
        let s = structure_report(&b, &tol()).unwrap();
        assert_eq!((s.derived.dim(), s.center.dim(), s.killing_rank.rank), (3, 0, 3));
        assert_eq!(reductivity_verdict(&b, &tol()).verdict, ReductivityStatus::Reductive);
    }

    #[test]
    fn unipotent_line_is_not_reductive() {
        let b = LieAlgebraBasis::new(vec![unit(6, 0, 1)], Field::Complex, 6).unwrap();
        let s = structure_report(&b, &tol()).unwrap();
        assert_eq!((s.derived.dim(), s.center.dim()), (0, 1));
        let r = reductivity_verdict(&b, &tol());
        assert_eq!(r.verdict, ReductivityStatus::NotReductive);
        assert!(matches!(r.witnesses[0], Witness::NilpotentCenter { .. }));
    }

    #[test]
    fn empty_algebra_is_reductive() {
        let b = LieAlgebraBasis::zero(Field::Complex, 4);
        assert_eq!(reductivity_verdict(&b, &tol()).verdict, ReductivityStatus::Reductive);
        let s = structure_report(&b, &tol()).unwrap();
        assert_eq!((s.derived.dim(), s.center.dim()), (0, 0));
    }

    #[test]
    fn symplectic_algebra_is_reductive() {
        let g = GroupSpec::symplectic(block_j_form(6), Field::Complex);
        let b = lie_algebra_basis(&g).unwrap();
        let r = reductivity_verdict(&b, &tol());
        assert_eq!(r.verdict, ReductivityStatus::Reductive);
        assert_eq!((r.derived_dim, r.killing_rank_on_derived), (21, 21));
    }

    #[test]
    fn borel_of_sl2_fails_decomposition() {
        let h = unit(2, 0, 0) - unit(2, 1, 1);
        let b = LieAlgebraBasis::new(vec![h, unit(2, 0, 1)], Field::Complex, 2).unwrap();
        let r = reductivity_verdict(&b, &tol());
        assert_eq!(r.verdict, ReductivityStatus::NotReductive);
        assert!(!r.decomposition_ok);
        assert_eq!(r.killing_rank_on_derived, 0);
    }

    #[test]
    fn gl_like_center_is_reductive() {
        // span{I} ⊕ sl2 inside 2x2
        let mut m = lie_algebra_basis(&GroupSpec::special_linear(2, Field::Complex)).unwrap().matrices;
        m.push(linalg::identity(2));
        let b = LieAlgebraBasis::new(m, Field::Complex, 2).unwrap();
        let r = reductivity_verdict(&b, &tol());
        assert_eq!(r.verdict, ReductivityStatus::Reductive);
        assert_eq!(r.center_dim, 1);
    }
}
