//! Orbit closedness through the norm-minimizing flow.
//!
//! The flow descends `‖v‖²` along the Hermitian part `𝔭` of the acting
//! algebra. Its limit lies in the unique closed orbit of the orbit closure, so
//! an orbit is closed exactly when the orbit dimension does not drop between
//! the starting point and the limit.
//!
//! Close to a non-closed orbit's limit the orbit map has singular values of
//! order `sqrt(moment)·‖y‖` that only vanish in the limit. After the main flow
//! converges we keep polishing towards a much smaller moment and then count
//! singular values against a cutoff tied to the square root of the final
//! moment (`collapse_factor`), which separates these collapsing directions
//! from the ones that stay of order `‖y‖`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::groups::{cartan_decompose, lie_algebra_basis_with, GroupSpec, LieAlgebraBasis};
use crate::linalg::{self, real, CVec, Field};
use crate::reps::{act_unchecked, differential_unchecked, real_inner, RepVector, Representation};
use crate::tolerances::Tolerances;

/// Relative slack on `‖y‖²` treated as rounding.
pub const ROUNDING_SLACK: f64 = 8.0 * f64::EPSILON;

/// Step control for [`norm_flow`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub initial_step: f64,
    /// Relative to `‖v‖²`.
    pub moment_tolerance: f64,
    pub max_iterations: usize,
    pub step_shrink: f64,
    pub min_step: f64,
    /// Factor applied to the accepted step before the next trial step.
    pub step_growth: f64,
    /// Upper bound on `‖ε D‖_F` for a single step.
    pub max_exponent: f64,
    /// Relative moment targeted after convergence, before the limit orbit
    /// dimension is read off.
    pub polish_tolerance: f64,
    pub polish_iterations: usize,
    /// Limit singular values below `collapse_factor · sqrt(moment) · ‖y‖`
    /// count as zero.
    pub collapse_factor: f64,
    /// The flow has collapsed to the origin once `‖y‖ ≤ zero_tolerance · ‖v‖`.
    pub zero_tolerance: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            initial_step: 0.1,
            moment_tolerance: 1e-8,
            max_iterations: 20_000,
            step_shrink: 0.5,
            min_step: 1e-14,
            step_growth: 2.0,
            max_exponent: 1.0,
            polish_tolerance: 1e-15,
            polish_iterations: 2_000,
            collapse_factor: 100.0,
            zero_tolerance: 1e-6,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("initial_step", self.initial_step),
            ("moment_tolerance", self.moment_tolerance),
            ("min_step", self.min_step),
            ("max_exponent", self.max_exponent),
            ("polish_tolerance", self.polish_tolerance),
            ("collapse_factor", self.collapse_factor),
            ("zero_tolerance", self.zero_tolerance),
        ];
        for (name, x) in positive {
            if !(x > 0.0 && x.is_finite()) {
                return Err(crate::error::config(format!("flow.{name} must be positive, got {x}")));
            }
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(crate::error::config("flow.step_shrink must lie in (0, 1)"));
        }
        if !(self.step_growth >= 1.0 && self.step_growth.is_finite()) {
            return Err(crate::error::config("flow.step_growth must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(crate::error::config("flow.max_iterations must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Relative moment reached the target.
    Converged,
    /// The norm reached `zero_tolerance` of its starting value.
    Collapsed,
    /// No step above `min_step` decreased the norm.
    Stalled,
    /// Iteration budget exhausted.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    /// `‖vₖ‖`, starting with the input.
    pub norms: Vec<f64>,
    /// `‖μ(vₖ)‖ / ‖vₖ‖²`.
    pub moment_norms: Vec<f64>,
    pub iterations_used: usize,
    pub limit_point: RepVector,
    pub termination: Termination,
    pub converged: bool,
    /// Index into `norms` where polishing started, if it ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polish_start: Option<usize>,
}

impl FlowTrace {
    /// Non-increasing norms, up to rounding of the squared norm.
    pub fn is_monotone(&self) -> bool {
        self.norms.windows(2).all(|w| w[1] * w[1] <= w[0] * w[0] * (1.0 + ROUNDING_SLACK))
    }

    pub fn final_moment(&self) -> f64 {
        self.moment_norms.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosednessStatus {
    Closed,
    NonClosed,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosednessVerdict {
    pub status: ClosednessStatus,
    pub start_orbit_dim: usize,
    pub limit_orbit_dim: usize,
    pub start_norm: f64,
    pub limit_norm: f64,
    pub start_rank_ambiguous: bool,
    pub limit_rank_ambiguous: bool,
    /// Relative singular-value cutoff used at the limit.
    pub limit_cutoff: f64,
    pub final_moment: f64,
    pub termination: Termination,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub trace: FlowTrace,
}

/// A representation together with the acting group's algebra and its
/// Hermitian part, prepared once for repeated flows.
#[derive(Debug, Clone)]
pub struct KempfNess {
    pub rep: Representation,
    /// Orthonormalized algebra of the acting group.
    pub algebra: LieAlgebraBasis,
    /// Real-orthonormal basis of the Hermitian part.
    pub p_basis: LieAlgebraBasis,
    pub tol: Tolerances,
}

impl KempfNess {
    /// Prepares the flow of `group` (a subgroup of `rep.group`, same ambient
    /// size) on `rep`.
    pub fn new(rep: &Representation, group: &GroupSpec, tol: &Tolerances) -> Result<Self> {
        rep.validate(tol)?;
        if group.size != rep.ambient_size() {
            return Err(crate::error::config(format!(
                "acting group of size {} does not fit a representation of size {}",
                group.size,
                rep.ambient_size()
            )));
        }
        let algebra = lie_algebra_basis_with(group, tol)?;
        let cartan = cartan_decompose(&algebra, tol)?;
        Ok(KempfNess {
            rep: rep.clone(),
            algebra: algebra.orthonormalized(tol),
            p_basis: cartan.p_basis,
            tol: *tol,
        })
    }

    pub fn moment(&self, v: &RepVector) -> Vec<f64> {
        moment_unchecked(&self.rep, &self.p_basis, v)
    }

    /// `‖μ(v)‖ / ‖v‖²`, zero at the origin.
    pub fn relative_moment(&self, v: &RepVector) -> f64 {
        relative(&self.moment(v), v.norm_sqr())
    }

    /// Orbit dimension of the acting group at `v` with cutoff
    /// `rel · max(σ_max, ‖v‖)`.
    fn orbit_rank(&self, v: &RepVector, rel: f64) -> linalg::RankDecision {
        let images: Vec<CVec> = self
            .algebra
            .matrices
            .iter()
            .map(|x| differential_unchecked(&self.rep, x, v).flatten())
            .collect();
        linalg::decompose_rel(self.algebra.field, &images, v.norm(), rel, self.tol.ambiguity_factor).rank
    }

    pub fn flow(&self, v: &RepVector, config: &FlowConfig) -> FlowTrace {
        let scale = v.norm();
        let mut trace = FlowTrace {
            norms: alloc::vec![scale],
            moment_norms: alloc::vec![self.relative_moment(v)],
            iterations_used: 0,
            limit_point: v.clone(),
            termination: Termination::Converged,
            converged: true,
            polish_start: None,
        };
        let mut step = config.initial_step;
        let term = self.descend(&mut trace, &mut step, scale, config, config.moment_tolerance, config.max_iterations);
        trace.termination = term;
        trace.converged = term == Termination::Converged;
        trace
    }

    /// Continues from the end of `trace` until the relative moment drops to
    /// `target`, the norm collapses, steps stall, or `budget` more steps are
    /// used.
    fn descend(
        &self,
        trace: &mut FlowTrace,
        step: &mut f64,
        scale: f64,
        config: &FlowConfig,
        target: f64,
        budget: usize,
    ) -> Termination {
        let mut y = trace.limit_point.clone();
        let mut ns = y.norm_sqr();
        let mut mu = self.moment(&y);
        let mut used = 0usize;
        loop {
            if ns == 0.0 {
                return if scale == 0.0 { Termination::Converged } else { Termination::Collapsed };
            }
            if linalg::sqrt(ns) <= config.zero_tolerance * scale {
                return Termination::Collapsed;
            }
            let r = relative(&mu, ns);
            if r <= target {
                return Termination::Converged;
            }
            if used >= budget {
                return Termination::Budget;
            }
            let n = self.rep.ambient_size();
            let d = self
                .p_basis
                .matrices
                .iter()
                .zip(&mu)
                .fold(linalg::zeros(n, n), |acc, (p, &m)| acc + p * real(m / ns));
            let mut eps = step.min(config.max_exponent / r);
            let next = loop {
                let g = linalg::expm(&(&d * real(-eps)));
                let candidate = act_unchecked(&self.rep, &g, &y);
                let cn = candidate.norm_sqr();
                if cn.is_finite() && cn < ns {
                    let cmu = self.moment(&candidate);
                    break Some((candidate, cn, cmu));
                }
                // Near the minimum the decrease drops below rounding of the
                // norm; a step that keeps the norm within rounding and lowers
                // the moment is still progress.
                if cn.is_finite() && cn <= ns * (1.0 + ROUNDING_SLACK) {
                    let cmu = self.moment(&candidate);
                    if relative(&cmu, cn) < r {
                        break Some((candidate, cn, cmu));
                    }
                }
                eps *= config.step_shrink;
                if eps < config.min_step {
                    break None;
                }
            };
            let Some((candidate, cn, cmu)) = next else {
                return Termination::Stalled;
            };
            y = candidate;
            ns = cn;
            mu = cmu;
            *step = eps * config.step_growth;
            used += 1;
            trace.iterations_used += 1;
            trace.norms.push(linalg::sqrt(ns));
            trace.moment_norms.push(relative(&mu, ns));
            trace.limit_point = y.clone();
        }
    }

    pub fn verdict(&self, v: &RepVector, config: &FlowConfig) -> ClosednessVerdict {
        let start_norm = v.norm();
        let mut trace = self.flow(v, config);
        let mut out = ClosednessVerdict {
            status: ClosednessStatus::Inconclusive,
            start_orbit_dim: 0,
            limit_orbit_dim: 0,
            start_norm,
            limit_norm: 0.0,
            start_rank_ambiguous: false,
            limit_rank_ambiguous: false,
            limit_cutoff: self.tol.rank,
            final_moment: 0.0,
            termination: trace.termination,
            reason: None,
            trace: trace.clone(),
        };
        if start_norm == 0.0 {
            out.status = ClosednessStatus::Closed;
            return out;
        }
        let start = self.orbit_rank(v, self.tol.rank);
        out.start_orbit_dim = start.rank;
        out.start_rank_ambiguous = start.ambiguous;

        let mut termination = trace.termination;
        if termination == Termination::Converged {
            let mut step = config.initial_step;
            trace.polish_start = Some(trace.norms.len() - 1);
            let polish = self.descend(
                &mut trace,
                &mut step,
                start_norm,
                config,
                config.polish_tolerance,
                config.polish_iterations,
            );
            if polish == Termination::Collapsed {
                termination = Termination::Collapsed;
            }
        }
        let y = &trace.limit_point;
        out.limit_norm = y.norm();
        out.final_moment = trace.final_moment();
        out.termination = termination;

        let status = match termination {
            Termination::Budget | Termination::Stalled => {
                out.reason = Some(format!("flow ended without converging ({termination:?})"));
                ClosednessStatus::Inconclusive
            }
            Termination::Collapsed => {
                out.limit_orbit_dim = 0;
                if start.rank > 0 {
                    ClosednessStatus::NonClosed
                } else {
                    ClosednessStatus::Closed
                }
            }
            Termination::Converged => {
                let cutoff = self.tol.rank.max(config.collapse_factor * linalg::sqrt(out.final_moment));
                let limit = self.orbit_rank(y, cutoff);
                out.limit_cutoff = cutoff;
                out.limit_orbit_dim = limit.rank;
                out.limit_rank_ambiguous = limit.ambiguous;
                if limit.rank == start.rank {
                    ClosednessStatus::Closed
                } else if limit.rank < start.rank {
                    ClosednessStatus::NonClosed
                } else {
                    out.reason = Some(String::from("orbit dimension grew along the flow"));
                    ClosednessStatus::Inconclusive
                }
            }
        };
        out.status = status;
        if status != ClosednessStatus::Inconclusive && (out.start_rank_ambiguous || out.limit_rank_ambiguous) {
            out.status = ClosednessStatus::Inconclusive;
            out.reason = Some(String::from("rank decision near the cutoff"));
        }
        out.trace = trace;
        out
    }
}

fn relative(mu: &[f64], ns: f64) -> f64 {
    if ns == 0.0 {
        return 0.0;
    }
    linalg::sqrt(mu.iter().map(|m| m * m).sum::<f64>()) / ns
}

fn moment_unchecked(rep: &Representation, p_basis: &LieAlgebraBasis, v: &RepVector) -> Vec<f64> {
    p_basis
        .matrices
        .iter()
        .map(|p| real_inner(&differential_unchecked(rep, p, v), v))
        .collect()
}

fn check_orthonormal(p_basis: &LieAlgebraBasis) -> Result<()> {
    let m = &p_basis.matrices;
    let mut worst = 0.0f64;
    for i in 0..m.len() {
        for j in i..m.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((linalg::real_inner(&m[i], &m[j]) - target).abs());
        }
    }
    if worst > 1e-8 {
        return Err(invalid(format!("p-basis is not orthonormal (Gram residual {worst:.3e})")));
    }
    Ok(())
}

fn check_inputs(rep: &Representation, p_basis: &LieAlgebraBasis, v: &RepVector, tol: &Tolerances) -> Result<()> {
    if p_basis.ambient_size != rep.ambient_size() {
        return Err(invalid("p-basis does not act on this representation"));
    }
    if p_basis.field != Field::Real {
        return Err(invalid("p-basis must be a real basis"));
    }
    rep.check_vector(v, tol)?;
    check_orthonormal(p_basis)
}

/// `(⟨Pᵢ·v, v⟩)ᵢ` over a real-orthonormal Hermitian basis.
pub fn moment_vector(rep: &Representation, p_basis: &LieAlgebraBasis, v: &RepVector) -> Result<Vec<f64>> {
    check_inputs(rep, p_basis, v, &Tolerances::default())?;
    Ok(moment_unchecked(rep, p_basis, v))
}

/// `‖μ(v)‖ ≤ tol · ‖v‖²`.
pub fn is_minimal(rep: &Representation, p_basis: &LieAlgebraBasis, v: &RepVector, tol: f64) -> Result<bool> {
    let mu = moment_vector(rep, p_basis, v)?;
    Ok(relative(&mu, v.norm_sqr()) <= tol)
}

/// Main phase of the flow of `group` on `v`.
pub fn norm_flow(rep: &Representation, group: &GroupSpec, v: &RepVector, config: &FlowConfig) -> Result<FlowTrace> {
    let tol = Tolerances::default();
    config.validate()?;
    rep.check_vector(v, &tol)?;
    Ok(KempfNess::new(rep, group, &tol)?.flow(v, config))
}

pub fn closedness_verdict(
    rep: &Representation,
    group: &GroupSpec,
    v: &RepVector,
    config: &FlowConfig,
    tol: &Tolerances,
) -> Result<ClosednessVerdict> {
    config.validate()?;
    rep.check_vector(v, tol)?;
    Ok(KempfNess::new(rep, group, tol)?.verdict(v, config))
}
