//! Dense complex linear algebra shared by every module: rank decisions,
//! null spaces and spans over either scalar field, and the matrix exponential.
//!
//! Real spans are handled by realifying complex coordinates (stacking real and
//! imaginary parts) so that a real Lie algebra acting on a complex space is
//! analysed with real coefficients.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::tolerances::Tolerances;

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Scalar field of a group, its Lie algebra, and its spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Number of real dimensions per dimension over this field.
    pub fn real_factor(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn real(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Matrix unit `E_ij` of side `n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n, n);
    m[(i, j)] = real(1.0);
    m
}

/// `|z|`, available without `std`.
pub fn abs(z: C64) -> f64 {
    ComplexField::modulus(z)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    ComplexField::sqrt(x)
}

pub(crate) fn ceil(x: f64) -> f64 {
    ComplexField::ceil(x)
}

pub fn frobenius_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn frobenius(m: &CMat) -> f64 {
    frobenius_sq(m).sqrt()
}

pub fn one_norm(m: &CMat) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| abs(*z)).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// `Re tr(A B*)`, the real part of the Frobenius pairing.
pub fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Column-major flattening.
pub fn flatten(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unflatten(v: &[C64], rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v)
}

/// `|M - sign·Mᵗ| / |M|`; zero for the zero matrix.
pub fn transpose_asymmetry(m: &CMat, sign: f64) -> f64 {
    let n = frobenius(m);
    if n == 0.0 {
        return 0.0;
    }
    frobenius(&(m - m.transpose() * real(sign))) / n
}

/// Outcome of counting singular values above a relative cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankDecision {
    pub rank: usize,
    pub threshold: f64,
    /// Some singular value sits within the ambiguity factor of the cutoff.
    pub ambiguous: bool,
}

/// Counts singular values above `rel * max(σ_max, scale_floor)`.
///
/// `sv` must be sorted in decreasing order.
pub fn decide_rank(sv: &[f64], scale_floor: f64, rel: f64, ambiguity_factor: f64) -> RankDecision {
    let scale = sv.first().copied().unwrap_or(0.0).max(scale_floor);
    if !(scale > 0.0) {
        return RankDecision { rank: 0, threshold: 0.0, ambiguous: false };
    }
    let threshold = rel * scale;
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    let ambiguous = sv
        .iter()
        .any(|&s| s > threshold / ambiguity_factor && s <= threshold * ambiguity_factor);
    RankDecision { rank, threshold, ambiguous }
}

/// Singular value decomposition of a list of coordinate columns, interpreted
/// over `field`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub field: Field,
    /// Decreasing.
    pub singular_values: Vec<f64>,
    pub rank: RankDecision,
    range: Vec<CVec>,
    right: Vec<CVec>,
}

impl Decomposition {
    /// Orthonormal basis of the column span (length = rank).
    pub fn range_basis(&self) -> &[CVec] {
        &self.range[..self.rank.rank.min(self.range.len())]
    }

    /// Orthonormal basis of the coefficient vectors mapped to zero.
    pub fn null_space(&self) -> &[CVec] {
        &self.right[self.rank.rank.min(self.right.len())..]
    }

    /// Right singular vectors belonging to the smallest singular values,
    /// including the near-null directions even if they were counted in rank.
    pub fn right_vectors(&self) -> &[CVec] {
        &self.right
    }
}

/// Decomposes the linear map whose columns are `columns`.
///
/// The rank cutoff is `tol.rank * max(σ_max, scale_floor)`. Over
/// [`Field::Real`] coefficients are real and the codomain is realified.
pub fn decompose(field: Field, columns: &[CVec], scale_floor: f64, tol: &Tolerances) -> Decomposition {
    decompose_rel(field, columns, scale_floor, tol.rank, tol.ambiguity_factor)
}

pub fn decompose_rel(
    field: Field,
    columns: &[CVec],
    scale_floor: f64,
    rel: f64,
    ambiguity_factor: f64,
) -> Decomposition {
    let d = columns.len();
    let n = columns.first().map_or(0, |c| c.len());
    let empty = |ambiguous: bool| Decomposition {
        field,
        singular_values: vec![0.0; d],
        rank: RankDecision { rank: 0, threshold: 0.0, ambiguous },
        range: Vec::new(),
        right: (0..d).map(|k| unit_vector(d, k)).collect(),
    };
    if d == 0 || n == 0 {
        return empty(false);
    }
    if columns.iter().any(|c| c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))) {
        return empty(true);
    }

    let (sv, range, right) = match field {
        Field::Complex => {
            let rows = n.max(d);
            let mut a = CMat::zeros(rows, d);
            for (j, col) in columns.iter().enumerate() {
                a.view_mut((0, j), (n, 1)).copy_from(col);
            }
            match svd_sorted(a) {
                Some((sv, u, v)) => {
                    let range = u.into_iter().map(|col| col.rows(0, n).into_owned()).collect();
                    (sv, range, v)
                }
                None => return empty(true),
            }
        }
        Field::Real => {
            let rows = (2 * n).max(d);
            let mut a = DMatrix::<f64>::zeros(rows, d);
            for (j, col) in columns.iter().enumerate() {
                for (i, z) in col.iter().enumerate() {
                    a[(i, j)] = z.re;
                    a[(n + i, j)] = z.im;
                }
            }
            match svd_sorted(a) {
                Some((sv, u, v)) => {
                    let range = u
                        .into_iter()
                        .map(|col| CVec::from_fn(n, |i, _| c(col[i], col[n + i])))
                        .collect();
                    let right = v.into_iter().map(|col| col.map(real)).collect();
                    (sv, range, right)
                }
                None => return empty(true),
            }
        }
    };
    let rank = decide_rank(&sv, scale_floor, rel, ambiguity_factor);
    Decomposition { field, singular_values: sv, rank, range, right }
}

fn unit_vector(d: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[k] = real(1.0);
    v
}

type SortedSvd<T> = (Vec<f64>, Vec<DVector<T>>, Vec<DVector<T>>);

/// SVD by one-sided Jacobi rotations, singular values sorted decreasingly.
///
/// nalgebra's bidiagonal SVD occasionally returns factors that do not
/// reconstruct the input (observed on realified Hermitian bases with
/// repeated singular values), so rank decisions use this instead. Returns one
/// singular value and right vector per column; left vectors of zero singular
/// values are zero.
fn svd_sorted<T>(mut a: DMatrix<T>) -> Option<SortedSvd<T>>
where
    T: ComplexField<RealField = f64>,
{
    let d = a.ncols();
    let mut v = DMatrix::<T>::identity(d, d);
    let eps = f64::EPSILON * (a.nrows().max(1) as f64);
    // columns this small are noise; rotating them against each other never
    // settles
    let floor = {
        let x = f64::EPSILON * a.norm();
        x * x
    };
    let mut converged = false;
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.clone().modulus();
                if alpha <= floor || beta <= floor || g <= eps * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let phase = gamma * T::from_real(1.0 / g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let cs = 1.0 / sqrt(1.0 + t * t);
                let sn = cs * t;
                rotate(&mut a, p, q, cs, sn, phase.clone());
                rotate(&mut v, p, q, cs, sn, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged || a.iter().any(|z| !z.clone().modulus().is_finite()) {
        return None;
    }
    let sv_raw: Vec<f64> = (0..d).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| sv_raw[j].total_cmp(&sv_raw[i]));
    let sv = order.iter().map(|&i| sv_raw[i]).collect();
    let left = order
        .iter()
        .map(|&i| {
            let s = sv_raw[i];
            if s > 0.0 {
                a.column(i).map(|z| z * T::from_real(1.0 / s))
            } else {
                DVector::zeros(a.nrows())
            }
        })
        .collect();
    let right = order.iter().map(|&i| v.column(i).into_owned()).collect();
    Some((sv, left, right))
}

/// Replaces columns `p`, `q` of `m` by `c·m_p - s·φ̄·m_q` and
/// `s·φ·m_p + c·m_q`.
fn rotate<T>(m: &mut DMatrix<T>, p: usize, q: usize, c: f64, s: f64, phase: T)
where
    T: ComplexField<RealField = f64>,
{
    let conj = phase.clone().conjugate();
    for i in 0..m.nrows() {
        let x = m[(i, p)].clone();
        let y = m[(i, q)].clone();
        m[(i, p)] = x.clone() * T::from_real(c) - y.clone() * conj.clone() * T::from_real(s);
        m[(i, q)] = x * phase.clone() * T::from_real(s) + y * T::from_real(c);
    }
}

/// Singular values of a single matrix, decreasing.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    // work on the narrower side
    let a = if m.nrows() < m.ncols() { m.adjoint() } else { m.clone() };
    match svd_sorted(a) {
        Some((sv, _, _)) => sv,
        None => vec![f64::NAN; m.nrows().min(m.ncols())],
    }
}

/// Field-appropriate inner product `⟨q, x⟩` used for projections.
pub fn field_inner(field: Field, q: &CVec, x: &CVec) -> C64 {
    let z = q.dotc(x);
    match field {
        Field::Complex => z,
        Field::Real => real(z.re),
    }
}

/// Residual of `x` after orthogonal projection onto the span of the
/// orthonormal vectors `basis`.
pub fn project_out(field: Field, basis: &[CVec], x: &CVec) -> CVec {
    let mut r = x.clone();
    // two passes keep the residual accurate when x is nearly in the span
    for _ in 0..2 {
        for q in basis {
            let coef = field_inner(field, q, &r);
            r -= q * coef;
        }
    }
    r
}

/// `|x - P x| / |x|` for the orthogonal projector `P` onto `basis`.
pub fn span_residual(field: Field, basis: &[CVec], x: &CVec) -> f64 {
    let nx = x.norm();
    if nx == 0.0 {
        return 0.0;
    }
    project_out(field, basis, x).norm() / nx
}

/// Largest principal-angle sine between two spans given by orthonormal
/// bases; infinite when the dimensions differ.
pub fn subspace_distance(field: Field, a: &[CVec], b: &[CVec]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let one_way = |from: &[CVec], to: &[CVec]| {
        from.iter()
            .map(|q| span_residual(field, to, q))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// The argument is scaled by a power of two until its 1-norm is at most 1/2;
/// the series is then summed until the next term falls below 1e-18 of the
/// partial sum, which keeps the relative error near 1e-15 before squaring.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = one_norm(a);
    if norm == 0.0 {
        return identity(n);
    }
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a * real(scale);
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        term = (&term * &b) * real(1.0 / k as f64);
        sum += &term;
        if one_norm(&term) <= 1e-18 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Inverse via LU, rejecting matrices whose singular values span more than
/// twelve orders of magnitude.
pub fn checked_inverse(g: &CMat) -> Option<CMat> {
    if !g.is_square() || !is_finite(g) {
        return None;
    }
    let sv = singular_values(g);
    let (max, min) = (sv.first().copied()?, sv.last().copied()?);
    if !(max > 0.0) || min <= 1e-12 * max {
        return None;
    }
    g.clone().try_inverse()
}
