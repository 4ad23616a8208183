//! Linear representations of matrix groups: the action, its differential, the
//! invariant inner product, orbit dimensions and stabilizer subalgebras.
//!
//! Vectors are stored as full matrices. `Sym2` and `AltBilinear` act on
//! square symmetric/antisymmetric matrices by `g·M = g M gᵗ`; `Defining` uses
//! `n × 1` columns; `ExternalTensor` acts on `left × right` matrices by
//! `(A, B)·M = A M Bᵗ`, reading `A` and `B` off the diagonal blocks of the
//! ambient group matrix.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{config, invalid, Result};
use crate::groups::{GroupSpec, LieAlgebraBasis};
use crate::linalg::{self, c, real, CMat, CVec, Field, C64};
use crate::matrix_serde;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    #[serde(flatten)]
    pub kind: RepKind,
    pub group: GroupSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepKind {
    Defining,
    Sym2,
    AltBilinear,
    ExternalTensor { left: usize, right: usize },
    /// Components share the group; vectors carry one part per leaf.
    DirectSum { components: Vec<RepKind> },
}

impl RepKind {
    fn leaves<'a>(&'a self, out: &mut Vec<&'a RepKind>) {
        match self {
            RepKind::DirectSum { components } => components.iter().for_each(|k| k.leaves(out)),
            leaf => out.push(leaf),
        }
    }
}

/// A vector in a representation space: one matrix per direct summand.
#[derive(Debug, Clone, PartialEq)]
pub struct RepVector {
    pub parts: Vec<CMat>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RepVectorRepr {
    Single(#[serde(with = "matrix_serde")] CMat),
    Sum {
        #[serde(with = "matrix_serde::list")]
        components: Vec<CMat>,
    },
}

impl Serialize for RepVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        if self.parts.len() == 1 {
            RepVectorRepr::Single(self.parts[0].clone()).serialize(s)
        } else {
            RepVectorRepr::Sum { components: self.parts.clone() }.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for RepVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        Ok(match RepVectorRepr::deserialize(d)? {
            RepVectorRepr::Single(m) => RepVector { parts: alloc::vec![m] },
            RepVectorRepr::Sum { components } => RepVector { parts: components },
        })
    }
}

impl RepVector {
    pub fn single(m: CMat) -> Self {
        RepVector { parts: alloc::vec![m] }
    }

    pub fn flatten(&self) -> CVec {
        let entries: Vec<C64> = self.parts.iter().flat_map(|m| m.iter().copied()).collect();
        CVec::from_vec(entries)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.parts.iter().map(linalg::frobenius_sq).sum()
    }

    pub fn norm(&self) -> f64 {
        linalg::sqrt(self.norm_sqr())
    }

    pub fn scale(&self, k: C64) -> RepVector {
        RepVector { parts: self.parts.iter().map(|m| m * k).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.parts.iter().all(linalg::is_finite)
    }

    pub fn is_real(&self) -> bool {
        self.parts.iter().all(linalg::is_real)
    }
}

/// A representation vector with an optional note on where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub vector: RepVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point_tag: Option<String>,
}

impl Representation {
    pub fn new(kind: RepKind, group: GroupSpec) -> Self {
        Representation { kind, group }
    }

    pub fn field(&self) -> Field {
        self.group.field
    }

    pub fn ambient_size(&self) -> usize {
        self.group.size
    }

    fn leaves(&self) -> Vec<&RepKind> {
        let mut out = Vec::new();
        self.kind.leaves(&mut out);
        out
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        self.group.validate(tol)?;
        let leaves = self.leaves();
        if leaves.is_empty() {
            return Err(config("direct sum needs at least one component"));
        }
        for leaf in leaves {
            if let RepKind::ExternalTensor { left, right } = leaf {
                if left + right != self.group.size || *left == 0 || *right == 0 {
                    return Err(config(format!(
                        "external tensor of {left}x{right} blocks needs a group of size {}, got {}",
                        left + right,
                        self.group.size
                    )));
                }
            }
        }
        Ok(())
    }

    /// Dimension over the group's field.
    pub fn dim(&self) -> usize {
        let n = self.group.size;
        self.leaves()
            .into_iter()
            .map(|leaf| match leaf {
                RepKind::Defining => n,
                RepKind::Sym2 => n * (n + 1) / 2,
                RepKind::AltBilinear => n * (n - 1) / 2,
                RepKind::ExternalTensor { left, right } => left * right,
                RepKind::DirectSum { .. } => unreachable!("leaves are never sums"),
            })
            .sum()
    }

    fn leaf_shape(&self, leaf: &RepKind) -> (usize, usize) {
        let n = self.group.size;
        match leaf {
            RepKind::Defining => (n, 1),
            RepKind::Sym2 | RepKind::AltBilinear => (n, n),
            RepKind::ExternalTensor { left, right } => (*left, *right),
            RepKind::DirectSum { .. } => unreachable!("leaves are never sums"),
        }
    }

    pub fn zero_vector(&self) -> RepVector {
        RepVector {
            parts: self
                .leaves()
                .into_iter()
                .map(|leaf| {
                    let (r, c) = self.leaf_shape(leaf);
                    linalg::zeros(r, c)
                })
                .collect(),
        }
    }

    /// Checks shapes, finiteness, and the (anti)symmetry of matrix models.
    pub fn check_vector(&self, v: &RepVector, tol: &Tolerances) -> Result<()> {
        let leaves = self.leaves();
        if v.parts.len() != leaves.len() {
            return Err(invalid(format!(
                "vector has {} components, representation has {}",
                v.parts.len(),
                leaves.len()
            )));
        }
        for (m, leaf) in v.parts.iter().zip(leaves) {
            let shape = self.leaf_shape(leaf);
            if m.shape() != shape {
                return Err(invalid(format!("component of shape {:?}, expected {shape:?}", m.shape())));
            }
            if !linalg::is_finite(m) {
                return Err(invalid("vector has non-finite entries"));
            }
            let asym = match leaf {
                RepKind::Sym2 => linalg::transpose_asymmetry(m, 1.0),
                RepKind::AltBilinear => linalg::transpose_asymmetry(m, -1.0),
                _ => 0.0,
            };
            if asym > tol.symmetry {
                return Err(invalid(format!("matrix violates its symmetry (relative residual {asym:.3e})")));
            }
        }
        Ok(())
    }

    fn check_shapes(&self, v: &RepVector) -> Result<()> {
        let leaves = self.leaves();
        if v.parts.len() != leaves.len()
            || v.parts.iter().zip(leaves).any(|(m, leaf)| m.shape() != self.leaf_shape(leaf))
        {
            return Err(invalid("vector shape does not match the representation"));
        }
        Ok(())
    }

    fn check_group_matrix(&self, g: &CMat) -> Result<()> {
        let n = self.group.size;
        if g.shape() != (n, n) {
            return Err(invalid(format!("group matrix must be {n}x{n}, got {:?}", g.shape())));
        }
        Ok(())
    }

    /// Gaussian vector with entries of standard deviation `spread` (complex
    /// entries over ℂ), projected onto the symmetric/antisymmetric part where
    /// the model requires it.
    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R, spread: f64) -> RepVector {
        let field = self.field();
        let mut draw = |r: usize, cols: usize| -> CMat {
            CMat::from_fn(r, cols, |_, _| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = match field {
                    Field::Real => 0.0,
                    Field::Complex => StandardNormal.sample(rng),
                };
                c(spread * re, spread * im)
            })
        };
        let leaves = self.leaves();
        let parts = leaves
            .into_iter()
            .map(|leaf| {
                let (r, cols) = self.leaf_shape(leaf);
                let m = draw(r, cols);
                match leaf {
                    RepKind::Sym2 => (&m + m.transpose()) * real(0.5),
                    RepKind::AltBilinear => (&m - m.transpose()) * real(0.5),
                    _ => m,
                }
            })
            .collect();
        RepVector { parts }
    }

    /// A vector of lowest rank in each summand: `u uᵗ`, `u wᵗ - w uᵗ`, `u wᵗ`
    /// or `u`. For `SL` actions these lie in the null cone.
    pub fn degenerate_vector<R: Rng + ?Sized>(&self, rng: &mut R, spread: f64) -> RepVector {
        let field = self.field();
        let mut col = |len: usize| -> CMat {
            CMat::from_fn(len, 1, |_, _| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = match field {
                    Field::Real => 0.0,
                    Field::Complex => StandardNormal.sample(rng),
                };
                c(spread * re, spread * im)
            })
        };
        let n = self.group.size;
        let leaves = self.leaves();
        let parts = leaves
            .into_iter()
            .map(|leaf| match leaf {
                RepKind::Defining => col(n),
                RepKind::Sym2 => {
                    let u = col(n);
                    &u * u.transpose()
                }
                RepKind::AltBilinear => {
                    let (u, w) = (col(n), col(n));
                    &u * w.transpose() - &w * u.transpose()
                }
                RepKind::ExternalTensor { left, right } => col(*left) * col(*right).transpose(),
                RepKind::DirectSum { .. } => unreachable!("leaves are never sums"),
            })
            .collect();
        RepVector { parts }
    }
}

fn act_leaf(leaf: &RepKind, g: &CMat, m: &CMat) -> CMat {
    match leaf {
        RepKind::Defining => g * m,
        RepKind::Sym2 | RepKind::AltBilinear => g * m * g.transpose(),
        RepKind::ExternalTensor { left, right } => {
            let a = g.view((0, 0), (*left, *left));
            let b = g.view((*left, *left), (*right, *right));
            a * m * b.transpose()
        }
        RepKind::DirectSum { .. } => unreachable!("leaves are never sums"),
    }
}

fn differential_leaf(leaf: &RepKind, x: &CMat, m: &CMat) -> CMat {
    match leaf {
        RepKind::Defining => x * m,
        RepKind::Sym2 | RepKind::AltBilinear => x * m + m * x.transpose(),
        RepKind::ExternalTensor { left, right } => {
            let a = x.view((0, 0), (*left, *left));
            let b = x.view((*left, *left), (*right, *right));
            a * m + m * b.transpose()
        }
        RepKind::DirectSum { .. } => unreachable!("leaves are never sums"),
    }
}

/// `g·v`, componentwise on direct sums.
pub fn act(rep: &Representation, g: &CMat, v: &RepVector) -> Result<RepVector> {
    rep.check_group_matrix(g)?;
    rep.check_shapes(v)?;
    Ok(act_unchecked(rep, g, v))
}

pub(crate) fn act_unchecked(rep: &Representation, g: &CMat, v: &RepVector) -> RepVector {
    let parts = rep
        .leaves()
        .into_iter()
        .zip(&v.parts)
        .map(|(leaf, m)| act_leaf(leaf, g, m))
        .collect();
    RepVector { parts }
}

/// `X·v = d/dt exp(tX)·v` at `t = 0`.
pub fn differential_act(rep: &Representation, x: &CMat, v: &RepVector) -> Result<RepVector> {
    rep.check_group_matrix(x)?;
    rep.check_shapes(v)?;
    Ok(differential_unchecked(rep, x, v))
}

pub(crate) fn differential_unchecked(rep: &Representation, x: &CMat, v: &RepVector) -> RepVector {
    let parts = rep
        .leaves()
        .into_iter()
        .zip(&v.parts)
        .map(|(leaf, m)| differential_leaf(leaf, x, m))
        .collect();
    RepVector { parts }
}

/// `Σ Re tr(vᵢ wᵢ*)` over the summands.
pub fn inner_product(rep: &Representation, v: &RepVector, w: &RepVector) -> Result<f64> {
    rep.check_shapes(v)?;
    rep.check_shapes(w)?;
    Ok(real_inner(v, w))
}

pub(crate) fn real_inner(v: &RepVector, w: &RepVector) -> f64 {
    v.parts.iter().zip(&w.parts).map(|(a, b)| linalg::real_inner(a, b)).sum()
}

/// Dimension of the orbit of the identity component through `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitDimension {
    /// Over the algebra's field.
    pub dim: usize,
    pub real_dim: usize,
    pub ambiguous: bool,
    /// Of `X ↦ X·v` on an orthonormal algebra basis, decreasing.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

fn orbit_map(
    rep: &Representation,
    algebra: &LieAlgebraBasis,
    v: &RepVector,
    tol: &Tolerances,
) -> Result<(LieAlgebraBasis, linalg::Decomposition)> {
    if algebra.ambient_size != rep.ambient_size() {
        return Err(invalid(format!(
            "algebra of {0}x{0} matrices does not act on a representation of size {1}",
            algebra.ambient_size,
            rep.ambient_size()
        )));
    }
    rep.check_shapes(v)?;
    let q = algebra.orthonormalized(tol);
    let images: Vec<CVec> = q
        .matrices
        .iter()
        .map(|x| differential_unchecked(rep, x, v).flatten())
        .collect();
    let d = linalg::decompose(algebra.field, &images, v.norm(), tol);
    Ok((q, d))
}

/// Rank of `X ↦ X·v` over the algebra, with cutoff relative to
/// `max(σ_max, |v|)`.
pub fn orbit_dimension(
    rep: &Representation,
    algebra: &LieAlgebraBasis,
    v: &RepVector,
    tol: &Tolerances,
) -> Result<OrbitDimension> {
    let (_, d) = orbit_map(rep, algebra, v, tol)?;
    Ok(OrbitDimension {
        dim: d.rank.rank,
        real_dim: d.rank.rank * algebra.field.real_factor(),
        ambiguous: d.rank.ambiguous,
        threshold: d.rank.threshold,
        singular_values: d.singular_values,
    })
}

/// Lie algebra of the isotropy group, with the ambiguity flag of the rank
/// decision that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub algebra: LieAlgebraBasis,
    pub ambiguous: bool,
}

/// `{X ∈ 𝔤 : X·v = 0}` as the null space of the orbit map.
pub fn stabilizer_subalgebra(
    rep: &Representation,
    algebra: &LieAlgebraBasis,
    v: &RepVector,
    tol: &Tolerances,
) -> Result<Stabilizer> {
    let (q, d) = orbit_map(rep, algebra, v, tol)?;
    let matrices = d
        .null_space()
        .iter()
        .map(|coeffs| q.combination(coeffs.as_slice()))
        .collect();
    Ok(Stabilizer {
        algebra: LieAlgebraBasis { matrices, field: algebra.field, ambient_size: algebra.ambient_size },
        ambiguous: d.rank.ambiguous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{block_j_form, lie_algebra_basis, random_group_element};
    use alloc::vec;

    fn alt6() -> Representation {
        Representation::new(RepKind::AltBilinear, GroupSpec::special_linear(6, Field::Complex))
    }

    fn v0() -> RepVector {
        RepVector::single(block_j_form(6))
    }

    #[test]
    fn dimensions() {
        let g = GroupSpec::special_linear(6, Field::Complex);
        assert_eq!(alt6().dim(), 15);
        assert_eq!(Representation::new(RepKind::Sym2, g.clone()).dim(), 21);
        let sum = RepKind::DirectSum { components: vec![RepKind::Sym2, RepKind::Defining] };
        assert_eq!(Representation::new(sum, g).dim(), 27);
    }

    #[test]
    fn identity_acts_trivially() {
        let x = act(&alt6(), &linalg::identity(6), &v0()).unwrap();
        assert_eq!(x, v0());
    }

    #[test]
    fn frobenius_norm_of_v0() {
        assert_eq!(inner_product(&alt6(), &v0(), &v0()).unwrap(), 6.0);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        assert!(act(&alt6(), &linalg::identity(5), &v0()).is_err());
        let bad = RepVector::single(linalg::zeros(6, 5));
        assert!(act(&alt6(), &linalg::identity(6), &bad).is_err());
        assert!(alt6().check_vector(&RepVector::single(linalg::identity(6)), &Tolerances::default()).is_err());
    }

    #[test]
    fn orbit_and_stabilizer_of_v0() {
        let tol = Tolerances::default();
        let g = lie_algebra_basis(&alt6().group).unwrap();
        let od = orbit_dimension(&alt6(), &g, &v0(), &tol).unwrap();
        assert_eq!((od.dim, od.real_dim, od.ambiguous), (14, 28, false));
        let stab = stabilizer_subalgebra(&alt6(), &g, &v0(), &tol).unwrap();
        assert_eq!(stab.algebra.dim(), 21);
        assert!(stab.algebra.bracket_residual(&tol) < 1e-10);
        let zero = orbit_dimension(&alt6(), &g, &alt6().zero_vector(), &tol).unwrap();
        assert_eq!(zero.dim, 0);
    }

    #[test]
    fn external_tensor_uses_diagonal_blocks() {
        let spec = GroupSpec::product(vec![
            GroupSpec::special_linear(2, Field::Complex),
            GroupSpec::special_linear(3, Field::Complex),
        ]);
        let rep = Representation::new(RepKind::ExternalTensor { left: 2, right: 3 }, spec.clone());
        rep.validate(&Tolerances::default()).unwrap();
        let g = random_group_element(&spec, 3, 0.5).unwrap();
        let m = CMat::from_fn(2, 3, |i, j| real((i + 2 * j) as f64));
        let got = act(&rep, &g, &RepVector::single(m.clone())).unwrap();
        let a = g.view((0, 0), (2, 2)).into_owned();
        let b = g.view((2, 2), (3, 3)).into_owned();
        assert!(linalg::frobenius(&(got.parts[0].clone() - a * m * b.transpose())) < 1e-12);
    }

    #[test]
    fn vector_json() {
        let v = RepVector { parts: vec![linalg::identity(2), linalg::zeros(2, 2)] };
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"components":[[[1.0,0.0],[0.0,1.0]],[[0.0,0.0],[0.0,0.0]]]}"#);
        assert_eq!(serde_json::from_str::<RepVector>(&s).unwrap(), v);
        let single: RepVector = serde_json::from_str("[[0, 1], [-1, 0]]").unwrap();
        assert_eq!(single.parts.len(), 1);
        let rep: Representation =
            serde_json::from_str(r#"{"kind":"direct_sum","components":[{"kind":"sym2"},{"kind":"sym2"}],"group":{"family":"special_linear","size":2,"field":"complex"}}"#)
                .unwrap();
        assert_eq!(rep.dim(), 6);
    }
}
