use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by the rank, span, and Jordan-type decisions.
///
/// Every report embeds the effective values so that runs can be reproduced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Singular values below `rank * scale` count as zero.
    pub rank: f64,
    /// A singular value within this factor of the cutoff (either side) makes
    /// the rank decision ambiguous.
    pub ambiguity_factor: f64,
    /// Maximum relative residual of `[X, Y]` outside the span.
    pub bracket: f64,
    /// Maximum relative residual of `X*` outside the span.
    pub theta: f64,
    /// Maximum relative asymmetry accepted for symmetric/antisymmetric inputs.
    pub symmetry: f64,
    /// Eigenvalues closer than `cluster * |X|` are merged into one cluster.
    pub cluster: f64,
    /// `X` is nilpotent when `|X^k| <= nilpotent * |X^(k-1)| |X|` for some
    /// `2 <= k <= n`.
    pub nilpotent: f64,
    /// Singular values of `X - λI` below `jordan * |X|` count towards the
    /// geometric multiplicity of `λ`.
    pub jordan: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: 1e-9,
            ambiguity_factor: 10.0,
            bracket: 1e-10,
            theta: 1e-10,
            symmetry: 1e-12,
            cluster: 1e-6,
            nilpotent: 1e-8,
            jordan: 1e-3,
        }
    }
}
