//! Classical reductive matrix groups, their Lie algebras, Cartan
//! decompositions, conjugation, and random elements.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{config, invalid, Error, Result};
use crate::linalg::{
    self, c, checked_inverse, commutator, decompose, flatten, real, transpose_asymmetry, unflatten,
    unit, CMat, CVec, Field, RankDecision, C64,
};
use crate::matrix_serde;
use crate::tolerances::Tolerances;

/// Declarative description of a reductive matrix group.
///
/// `size` is always the side length of the ambient matrices, so embedded and
/// product groups are described by matrices already placed in the ambient
/// space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    #[serde(flatten)]
    pub family: Family,
    pub size: usize,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    SpecialLinear,
    SpecialOrthogonal,
    /// Preserves `Xᵗ Ω + Ω X = 0` for the antisymmetric invertible `form`
    /// (defaults to `diag(J, …, J)` with `J = [[0, 1], [-1, 0]]`).
    Symplectic {
        #[serde(default, with = "matrix_serde::option", skip_serializing_if = "Option::is_none")]
        form: Option<CMat>,
    },
    /// Diagonal traceless matrices.
    Torus,
    /// Block-diagonal product of the factors, in order.
    Product { factors: Vec<GroupSpec> },
    /// `inner` placed as the diagonal block starting at row/column `offset`,
    /// identity elsewhere.
    BlockEmbedding { inner: Box<GroupSpec>, offset: usize },
    /// `g ↦ diag(g, …, g)` with `copies` blocks.
    DiagonalEmbedding { inner: Box<GroupSpec>, copies: usize },
}

impl GroupSpec {
    pub fn special_linear(n: usize, field: Field) -> Self {
        GroupSpec { family: Family::SpecialLinear, size: n, field }
    }

    pub fn special_orthogonal(n: usize, field: Field) -> Self {
        GroupSpec { family: Family::SpecialOrthogonal, size: n, field }
    }

    pub fn symplectic(form: CMat, field: Field) -> Self {
        GroupSpec { size: form.nrows(), family: Family::Symplectic { form: Some(form) }, field }
    }

    /// Symplectic group of the block form `diag(J, …, J)`.
    pub fn standard_symplectic(n: usize, field: Field) -> Self {
        GroupSpec { family: Family::Symplectic { form: None }, size: n, field }
    }

    pub fn torus(n: usize, field: Field) -> Self {
        GroupSpec { family: Family::Torus, size: n, field }
    }

    pub fn product(factors: Vec<GroupSpec>) -> Self {
        let size = factors.iter().map(|f| f.size).sum();
        let field = factors.first().map_or(Field::Complex, |f| f.field);
        GroupSpec { family: Family::Product { factors }, size, field }
    }

    pub fn block(inner: GroupSpec, ambient: usize, offset: usize) -> Self {
        let field = inner.field;
        GroupSpec { family: Family::BlockEmbedding { inner: Box::new(inner), offset }, size: ambient, field }
    }

    pub fn diagonal(inner: GroupSpec, copies: usize) -> Self {
        let (size, field) = (inner.size * copies, inner.field);
        GroupSpec { family: Family::DiagonalEmbedding { inner: Box::new(inner), copies }, size, field }
    }

    /// The same group over another field, applied recursively.
    pub fn with_field(&self, field: Field) -> Self {
        let family = match &self.family {
            Family::Product { factors } => Family::Product {
                factors: factors.iter().map(|f| f.with_field(field)).collect(),
            },
            Family::BlockEmbedding { inner, offset } => {
                Family::BlockEmbedding { inner: Box::new(inner.with_field(field)), offset: *offset }
            }
            Family::DiagonalEmbedding { inner, copies } => {
                Family::DiagonalEmbedding { inner: Box::new(inner.with_field(field)), copies: *copies }
            }
            other => other.clone(),
        };
        GroupSpec { family, size: self.size, field }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.size == 0 {
            return Err(config("group size must be positive"));
        }
        match &self.family {
            Family::SpecialLinear | Family::SpecialOrthogonal | Family::Torus => Ok(()),
            Family::Symplectic { form } => {
                let form = form.clone().unwrap_or_else(|| block_j_form(self.size));
                validate_form(&form, self.size, self.field, tol)
            }
            Family::Product { factors } => {
                if factors.is_empty() {
                    return Err(config("product needs at least one factor"));
                }
                for f in factors {
                    f.validate(tol)?;
                    if f.field != self.field {
                        return Err(config("product factors must share the field"));
                    }
                }
                let total: usize = factors.iter().map(|f| f.size).sum();
                if total != self.size {
                    return Err(config(format!(
                        "product size {} does not match the sum of factor sizes {total}",
                        self.size
                    )));
                }
                Ok(())
            }
            Family::BlockEmbedding { inner, offset } => {
                inner.validate(tol)?;
                if inner.field != self.field {
                    return Err(config("embedded group must share the field"));
                }
                if self.size < offset + inner.size {
                    return Err(config(format!(
                        "ambient size {} is smaller than offset {offset} + inner size {}",
                        self.size, inner.size
                    )));
                }
                Ok(())
            }
            Family::DiagonalEmbedding { inner, copies } => {
                inner.validate(tol)?;
                if inner.field != self.field {
                    return Err(config("embedded group must share the field"));
                }
                if *copies == 0 || inner.size * copies != self.size {
                    return Err(config(format!(
                        "diagonal embedding of {copies} copies of size {} cannot have size {}",
                        inner.size, self.size
                    )));
                }
                Ok(())
            }
        }
    }
}

fn validate_form(form: &CMat, n: usize, field: Field, tol: &Tolerances) -> Result<()> {
    if form.shape() != (n, n) {
        return Err(config(format!("symplectic form must be {n}x{n}")));
    }
    if field == Field::Real && !linalg::is_real(form) {
        return Err(config("a real symplectic group needs a real form"));
    }
    if transpose_asymmetry(form, -1.0) > tol.symmetry {
        return Err(config("symplectic form must be antisymmetric"));
    }
    if checked_inverse(form).is_none() {
        return Err(config("symplectic form must be invertible"));
    }
    Ok(())
}

/// `diag(J, …, J)` with `J = [[0, 1], [-1, 0]]`; an odd trailing row stays
/// zero, which the invertibility check then rejects.
pub fn block_j_form(n: usize) -> CMat {
    let mut m = linalg::zeros(n, n);
    for k in (0..n.saturating_sub(1)).step_by(2) {
        m[(k, k + 1)] = real(1.0);
        m[(k + 1, k)] = real(-1.0);
    }
    m
}

/// Ordered basis of a matrix Lie algebra over `field`, with every matrix of
/// side `ambient_size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LieAlgebraBasis {
    #[serde(with = "matrix_serde::list")]
    pub matrices: Vec<CMat>,
    pub field: Field,
    pub ambient_size: usize,
}

impl LieAlgebraBasis {
    pub fn new(matrices: Vec<CMat>, field: Field, ambient_size: usize) -> Result<Self> {
        for m in &matrices {
            if m.shape() != (ambient_size, ambient_size) {
                return Err(invalid(format!(
                    "basis matrix of shape {:?} in an algebra of {ambient_size}x{ambient_size} matrices",
                    m.shape()
                )));
            }
            if !linalg::is_finite(m) {
                return Err(invalid("basis matrix has non-finite entries"));
            }
        }
        Ok(LieAlgebraBasis { matrices, field, ambient_size })
    }

    pub fn zero(field: Field, ambient_size: usize) -> Self {
        LieAlgebraBasis { matrices: Vec::new(), field, ambient_size }
    }

    pub fn dim(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn vectors(&self) -> Vec<CVec> {
        self.matrices.iter().map(flatten).collect()
    }

    /// `Σ cᵢ Xᵢ`.
    pub fn combination(&self, coeffs: &[C64]) -> CMat {
        let n = self.ambient_size;
        self.matrices
            .iter()
            .zip(coeffs)
            .fold(linalg::zeros(n, n), |acc, (m, &k)| acc + m * k)
    }

    /// Rank of the basis over its field, relative to the largest singular value.
    pub fn rank(&self, tol: &Tolerances) -> RankDecision {
        decompose(self.field, &self.vectors(), 0.0, tol).rank
    }

    /// Orthonormal basis of the same span with respect to the Frobenius
    /// pairing over the field (dependent directions are dropped).
    pub fn orthonormalized(&self, tol: &Tolerances) -> LieAlgebraBasis {
        let matrices = orthonormal_span(self.field, &self.matrices, self.ambient_size, 0.0, tol);
        LieAlgebraBasis { matrices, field: self.field, ambient_size: self.ambient_size }
    }

    fn orthonormal_vectors(&self, tol: &Tolerances) -> Vec<CVec> {
        decompose(self.field, &self.vectors(), 0.0, tol).range_basis().to_vec()
    }

    /// Relative distance of `x` from the span.
    pub fn membership_residual(&self, x: &CMat, tol: &Tolerances) -> f64 {
        linalg::span_residual(self.field, &self.orthonormal_vectors(tol), &flatten(x))
    }

    /// Largest `|[Qᵢ, Qⱼ] - P[Qᵢ, Qⱼ]|` over an orthonormal basis `Q`, i.e.
    /// the bracket residual relative to `|Qᵢ||Qⱼ|`.
    pub fn bracket_residual(&self, tol: &Tolerances) -> f64 {
        let q = self.orthonormalized(tol);
        let qv = q.vectors();
        let mut worst = 0.0f64;
        for i in 0..q.dim() {
            for j in (i + 1)..q.dim() {
                let b = flatten(&commutator(&q.matrices[i], &q.matrices[j]));
                worst = worst.max(linalg::project_out(self.field, &qv, &b).norm());
            }
        }
        worst
    }

    pub fn check_bracket_closure(&self, tol: &Tolerances) -> Result<()> {
        let residual = self.bracket_residual(tol);
        if residual > tol.bracket {
            return Err(Error::NotBracketClosed { residual });
        }
        Ok(())
    }

    /// Largest principal-angle sine between the two spans (infinite when the
    /// dimensions differ or the fields disagree).
    pub fn span_distance(&self, other: &LieAlgebraBasis, tol: &Tolerances) -> f64 {
        if self.field != other.field || self.ambient_size != other.ambient_size {
            return f64::INFINITY;
        }
        linalg::subspace_distance(self.field, &self.orthonormal_vectors(tol), &other.orthonormal_vectors(tol))
    }
}

/// Orthonormal basis (as matrices) for the span of `mats` over `field`.
pub(crate) fn orthonormal_span(
    field: Field,
    mats: &[CMat],
    n: usize,
    scale_floor: f64,
    tol: &Tolerances,
) -> Vec<CMat> {
    let vecs: Vec<CVec> = mats.iter().map(flatten).collect();
    decompose(field, &vecs, scale_floor, tol)
        .range_basis()
        .iter()
        .map(|v| unflatten(v.as_slice(), n, n))
        .collect()
}

/// Split `𝔤 = 𝔨 ⊕ 𝔭` into skew-Hermitian and Hermitian parts, both as real
/// vector spaces with Frobenius-orthonormal bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanDecomposition {
    pub k_basis: LieAlgebraBasis,
    pub p_basis: LieAlgebraBasis,
}

/// Places `x` as the diagonal block of an `ambient × ambient` zero matrix.
pub fn embed(x: &CMat, ambient: usize, offset: usize) -> CMat {
    let mut m = linalg::zeros(ambient, ambient);
    m.view_mut((offset, offset), x.shape()).copy_from(x);
    m
}

pub fn lie_algebra_basis(spec: &GroupSpec) -> Result<LieAlgebraBasis> {
    lie_algebra_basis_with(spec, &Tolerances::default())
}

pub fn lie_algebra_basis_with(spec: &GroupSpec, tol: &Tolerances) -> Result<LieAlgebraBasis> {
    spec.validate(tol)?;
    let n = spec.size;
    let matrices = match &spec.family {
        Family::SpecialLinear => {
            let mut out = Vec::with_capacity(n * n - 1);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        out.push(unit(n, i, j));
                    }
                }
            }
            out.extend((0..n - 1).map(|i| unit(n, i, i) - unit(n, i + 1, i + 1)));
            out
        }
        Family::SpecialOrthogonal => {
            let mut out = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    out.push(unit(n, i, j) - unit(n, j, i));
                }
            }
            out
        }
        Family::Torus => (0..n - 1).map(|i| unit(n, i, i) - unit(n, i + 1, i + 1)).collect(),
        Family::Symplectic { form } => {
            let form = form.clone().unwrap_or_else(|| block_j_form(n));
            symplectic_algebra(&form, spec.field, tol)
        }
        Family::Product { factors } => {
            let mut out = Vec::new();
            let mut offset = 0;
            for f in factors {
                let inner = lie_algebra_basis_with(f, tol)?;
                out.extend(inner.matrices.iter().map(|x| embed(x, n, offset)));
                offset += f.size;
            }
            out
        }
        Family::BlockEmbedding { inner, offset } => lie_algebra_basis_with(inner, tol)?
            .matrices
            .iter()
            .map(|x| embed(x, n, *offset))
            .collect(),
        Family::DiagonalEmbedding { inner, copies } => lie_algebra_basis_with(inner, tol)?
            .matrices
            .iter()
            .map(|x| (0..*copies).fold(linalg::zeros(n, n), |acc, k| acc + embed(x, n, k * inner.size)))
            .collect(),
    };
    LieAlgebraBasis::new(matrices, spec.field, n)
}

/// Null space of `X ↦ Xᵗ Ω + Ω X` on all `n × n` matrices.
fn symplectic_algebra(form: &CMat, field: Field, tol: &Tolerances) -> Vec<CMat> {
    let n = form.nrows();
    // real forms get a real basis whatever the field; its complex span is the
    // complex solution space
    let solve_field = if linalg::is_real(form) { Field::Real } else { field };
    let images: Vec<CVec> = (0..n * n)
        .map(|k| {
            let e = unit(n, k % n, k / n);
            flatten(&(e.transpose() * form + form * &e))
        })
        .collect();
    let scale = linalg::frobenius(form);
    decompose(solve_field, &images, scale, tol)
        .null_space()
        .iter()
        .map(|v| unflatten(v.as_slice(), n, n))
        .collect()
}

/// Splits the algebra into its skew-Hermitian and Hermitian parts.
///
/// The algebra is first viewed as a real vector space (for complex algebras
/// the real span of `{Xᵢ, iXᵢ}`); it must contain `X*` for every element.
pub fn cartan_decompose(basis: &LieAlgebraBasis, tol: &Tolerances) -> Result<CartanDecomposition> {
    let n = basis.ambient_size;
    let mut generators = basis.matrices.clone();
    if basis.field == Field::Complex {
        generators.extend(basis.matrices.iter().map(|x| x * c(0.0, 1.0)));
    }
    let q = orthonormal_span(Field::Real, &generators, n, 0.0, tol);
    let qv: Vec<CVec> = q.iter().map(flatten).collect();
    let residual = q
        .iter()
        .map(|x| linalg::span_residual(Field::Real, &qv, &flatten(&x.adjoint())))
        .fold(0.0, f64::max);
    if residual > tol.theta {
        return Err(Error::NotThetaStable { residual });
    }
    let half = real(0.5);
    let skew: Vec<CMat> = q.iter().map(|x| (x - x.adjoint()) * half).collect();
    let herm: Vec<CMat> = q.iter().map(|x| (x + x.adjoint()) * half).collect();
    let k = orthonormal_span(Field::Real, &skew, n, 1.0, tol);
    let p = orthonormal_span(Field::Real, &herm, n, 1.0, tol);
    if k.len() + p.len() != q.len() {
        return Err(invalid(format!(
            "Cartan parts have dimensions {} + {} but the real algebra has dimension {}",
            k.len(),
            p.len(),
            q.len()
        )));
    }
    Ok(CartanDecomposition {
        k_basis: LieAlgebraBasis { matrices: k, field: Field::Real, ambient_size: n },
        p_basis: LieAlgebraBasis { matrices: p, field: Field::Real, ambient_size: n },
    })
}

/// Gaussian coefficients for a random algebra element: one real draw per
/// basis matrix over ℝ, a real and an imaginary draw over ℂ.
pub fn algebra_coefficients(dim: usize, field: Field, rng: &mut ChaCha8Rng, spread: f64) -> Result<Vec<C64>> {
    if !(spread >= 0.0 && spread.is_finite()) {
        return Err(invalid(format!("spread must be a non-negative finite number, got {spread}")));
    }
    let normal = Normal::new(0.0, spread).map_err(|e| invalid(format!("{e}")))?;
    Ok((0..dim)
        .map(|_| match field {
            Field::Real => real(normal.sample(rng)),
            Field::Complex => {
                let re = normal.sample(rng);
                c(re, normal.sample(rng))
            }
        })
        .collect())
}

/// `exp(Σ cᵢ Xᵢ)` with i.i.d. centered Gaussian coefficients of standard
/// deviation `spread`; reproducible from `seed`.
pub fn random_group_element(spec: &GroupSpec, seed: u64, spread: f64) -> Result<CMat> {
    let basis = lie_algebra_basis(spec)?;
    random_element_of(&basis, seed, spread)
}

pub fn random_element_of(basis: &LieAlgebraBasis, seed: u64, spread: f64) -> Result<CMat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = algebra_coefficients(basis.dim(), basis.field, &mut rng, spread)?;
    Ok(linalg::expm(&basis.combination(&coeffs)))
}

/// `{g Xᵢ g⁻¹}`.
pub fn adjoint_conjugate(basis: &LieAlgebraBasis, g: &CMat) -> Result<LieAlgebraBasis> {
    let n = basis.ambient_size;
    if g.shape() != (n, n) {
        return Err(invalid(format!("conjugating matrix must be {n}x{n}, got {:?}", g.shape())));
    }
    let g_inv = checked_inverse(g).ok_or_else(|| invalid("conjugating matrix is singular"))?;
    let matrices = basis.matrices.iter().map(|x| g * x * &g_inv).collect();
    Ok(LieAlgebraBasis { matrices, field: basis.field, ambient_size: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn sl(n: usize) -> GroupSpec {
        GroupSpec::special_linear(n, Field::Complex)
    }

    #[test]
    fn classical_dimensions() {
        assert_eq!(lie_algebra_basis(&sl(2)).unwrap().dim(), 3);
        assert_eq!(lie_algebra_basis(&sl(6)).unwrap().dim(), 35);
        assert_eq!(lie_algebra_basis(&GroupSpec::special_orthogonal(4, Field::Real)).unwrap().dim(), 6);
        assert_eq!(lie_algebra_basis(&GroupSpec::torus(5, Field::Real)).unwrap().dim(), 4);
        assert_eq!(lie_algebra_basis(&sl(1)).unwrap().dim(), 0);
    }

    #[test]
    fn symplectic_of_block_form_has_dimension_21() {
        // oracle: rank-nullity on the 36-dimensional map X -> Xᵗv + vX
        let v0 = block_j_form(6);
        let images: Vec<CVec> = (0..36)
            .map(|k| {
                let e = unit(6, k % 6, k / 6);
                flatten(&(e.transpose() * &v0 + &v0 * &e))
            })
            .collect();
        let rank = decompose(Field::Real, &images, 0.0, &tol()).rank.rank;
        assert_eq!(36 - rank, 21);

        let basis = lie_algebra_basis(&GroupSpec::standard_symplectic(6, Field::Complex)).unwrap();
        assert_eq!(basis.dim(), 21);
        for x in &basis.matrices {
            assert!(linalg::frobenius(&(x.transpose() * &v0 + &v0 * x)) < 1e-12);
        }
    }

    #[test]
    fn bases_are_independent_and_closed() {
        let specs = vec![
            sl(3),
            GroupSpec::special_orthogonal(4, Field::Complex),
            GroupSpec::standard_symplectic(4, Field::Real),
            GroupSpec::torus(3, Field::Complex),
            GroupSpec::product(vec![sl(2), sl(2)]),
            GroupSpec::block(sl(2), 6, 1),
            GroupSpec::diagonal(sl(2), 3),
        ];
        for spec in &specs {
            let b = lie_algebra_basis(spec).unwrap();
            assert_eq!(b.rank(&tol()).rank, b.dim(), "{spec:?}");
            assert!(b.bracket_residual(&tol()) <= 1e-10, "{spec:?}");
        }
    }

    #[test]
    fn invalid_specs_are_config_errors() {
        let bad = [
            GroupSpec { family: Family::BlockEmbedding { inner: Box::new(sl(3)), offset: 4 }, size: 6, field: Field::Complex },
            GroupSpec::standard_symplectic(5, Field::Complex),
            GroupSpec {
                family: Family::Product { factors: vec![sl(2), GroupSpec::special_linear(2, Field::Real)] },
                size: 4,
                field: Field::Complex,
            },
            GroupSpec::symplectic(linalg::identity(2), Field::Real),
            GroupSpec { family: Family::DiagonalEmbedding { inner: Box::new(sl(2)), copies: 2 }, size: 5, field: Field::Complex },
        ];
        for spec in &bad {
            assert!(matches!(lie_algebra_basis(spec), Err(Error::Config(_))), "{spec:?}");
        }
    }

    #[test]
    fn cartan_dimensions() {
        let real_sl2 = lie_algebra_basis(&GroupSpec::special_linear(2, Field::Real)).unwrap();
        let cd = cartan_decompose(&real_sl2, &tol()).unwrap();
        assert_eq!((cd.k_basis.dim(), cd.p_basis.dim()), (1, 2));

        let cd = cartan_decompose(&lie_algebra_basis(&sl(6)).unwrap(), &tol()).unwrap();
        assert_eq!((cd.k_basis.dim(), cd.p_basis.dim()), (35, 35));
        for x in &cd.k_basis.matrices {
            assert!(linalg::frobenius(&(x.adjoint() + x)) <= 1e-12 * linalg::frobenius(x));
        }
        for x in &cd.p_basis.matrices {
            assert!(linalg::frobenius(&(x.adjoint() - x)) <= 1e-12 * linalg::frobenius(x));
        }
    }

    #[test]
    fn cartan_parts_reassemble_the_algebra() {
        for spec in [sl(3), GroupSpec::special_linear(3, Field::Real), GroupSpec::standard_symplectic(4, Field::Complex)] {
            let b = lie_algebra_basis(&spec).unwrap();
            let cd = cartan_decompose(&b, &tol()).unwrap();
            let mut real_gens = b.matrices.clone();
            if b.field == Field::Complex {
                real_gens.extend(b.matrices.iter().map(|x| x * c(0.0, 1.0)));
            }
            let whole = LieAlgebraBasis::new(real_gens, Field::Real, b.ambient_size).unwrap();
            let mut parts = cd.k_basis.matrices.clone();
            parts.extend(cd.p_basis.matrices.iter().cloned());
            let joined = LieAlgebraBasis::new(parts, Field::Real, b.ambient_size).unwrap();
            assert!(whole.span_distance(&joined, &tol()) <= 1e-10);
        }
    }

    #[test]
    fn upper_triangular_line_is_not_theta_stable() {
        let b = LieAlgebraBasis::new(vec![embed(&unit(2, 0, 1), 6, 0)], Field::Complex, 6).unwrap();
        assert!(matches!(cartan_decompose(&b, &tol()), Err(Error::NotThetaStable { .. })));
    }

    #[test]
    fn random_elements() {
        let spec = GroupSpec::special_linear(2, Field::Real);
        let g = random_group_element(&spec, 7, 0.8).unwrap();
        assert!((g.determinant() - real(1.0)).norm() < 1e-10);
        assert_eq!(random_group_element(&spec, 3, 0.0).unwrap(), linalg::identity(2));
        let h = random_group_element(&spec, 8, 0.8).unwrap();
        assert!(linalg::frobenius(&(g.clone() - h)) > 1e-6);
        assert_eq!(g, random_group_element(&spec, 7, 0.8).unwrap());
        assert!(random_group_element(&spec, 1, -1.0).is_err());
    }

    #[test]
    fn symplectic_exponentials_preserve_the_form() {
        let spec = GroupSpec::standard_symplectic(6, Field::Complex);
        let v0 = block_j_form(6);
        for seed in 0..5 {
            let g = random_group_element(&spec, seed, 1.0).unwrap();
            assert!(linalg::frobenius(&(g.transpose() * &v0 * &g - &v0)) < 1e-8);
        }
    }

    #[test]
    fn conjugation_preserves_span_properties() {
        let b = lie_algebra_basis(&sl(2)).unwrap();
        let same = adjoint_conjugate(&b, &linalg::identity(2)).unwrap();
        assert!(b.span_distance(&same, &tol()) < 1e-14);
        let g = random_group_element(&sl(2), 11, 0.5).unwrap();
        let conj = adjoint_conjugate(&b, &g).unwrap();
        assert_eq!(conj.rank(&tol()).rank, 3);
        assert!(conj.bracket_residual(&tol()) < 1e-10);
        assert!(adjoint_conjugate(&b, &unit(2, 0, 0)).is_err());
    }

    #[test]
    fn json_shape() {
        let spec = GroupSpec::block(sl(2), 6, 0);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            s,
            r#"{"family":"block_embedding","inner":{"family":"special_linear","size":2,"field":"complex"},"offset":0,"size":6,"field":"complex"}"#
        );
        let back: GroupSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        let sp: GroupSpec =
            serde_json::from_str(r#"{"family":"symplectic","size":2,"field":"real","form":[[0,1],[-1,0]]}"#).unwrap();
        assert_eq!(lie_algebra_basis(&sp).unwrap().dim(), 3);
    }
}
