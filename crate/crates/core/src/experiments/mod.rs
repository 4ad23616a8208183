//! Reproducible randomized experiments and the deterministic example
//! pipeline.
//!
//! An [`Experiment`] validates its configuration once, then evaluates trials
//! independently: each trial's randomness is derived from `(seed, index)`
//! only, so trials can run in any order or in parallel and
//! [`Experiment::assemble`] produces the same report.

mod catalog;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::groups::{random_group_element, GroupSpec, LieAlgebraBasis};
use crate::kempfness::{ClosednessStatus, ClosednessVerdict, FlowConfig, KempfNess, Termination};
use crate::linalg::{CMat, Field};
use crate::matrix_serde;
use crate::reps::{act, orbit_dimension, stabilizer_subalgebra, RepVector, Representation};
use crate::subalgebra::{element_type, reductivity_verdict, ElementType, ReductivityStatus};
use crate::tolerances::Tolerances;

pub use catalog::{lookup, scenario_catalog, special_element, v0, CatalogEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// `H`-orbits through random points `g·v₀` of a closed `G`-orbit.
    Theorem1,
    /// `H` normal in `G`: `H`-orbits through points with closed `G`-orbit.
    Cor2Normal,
    /// Reductivity of `H`-stabilizers at random points `g·v₀`.
    Cor3Intersection,
    /// `G`-orbits through random points of a direct sum.
    Cor5DirectSum,
    /// The deterministic example pipeline.
    Example1,
    /// Real versus complexified group on real points.
    RealComplexAgreement,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Theorem1,
        ExperimentKind::Cor2Normal,
        ExperimentKind::Cor3Intersection,
        ExperimentKind::Cor5DirectSum,
        ExperimentKind::Example1,
        ExperimentKind::RealComplexAgreement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Theorem1 => "theorem1",
            ExperimentKind::Cor2Normal => "cor2_normal",
            ExperimentKind::Cor3Intersection => "cor3_intersection",
            ExperimentKind::Cor5DirectSum => "cor5_direct_sum",
            ExperimentKind::Example1 => "example1",
            ExperimentKind::RealComplexAgreement => "real_complex_agreement",
        }
    }

    /// Accepts the snake_case name or the same with dashes.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.replace('-', "_");
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Dimensions the example pipeline must reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedDims {
    pub g_orbit_dim: usize,
    pub g_stabilizer_dim: usize,
    pub h_stabilizer_dim: usize,
}

/// Groups, representation and special points of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// `G`; must equal `representation.group`.
    pub group: GroupSpec,
    /// `H`, given by ambient matrices of the same size.
    pub subgroup: GroupSpec,
    pub representation: Representation,
    /// A point with closed `G`-orbit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<RepVector>,
    /// Fixed group element used by the deterministic checks.
    #[serde(default, with = "matrix_serde::option", skip_serializing_if = "Option::is_none")]
    pub special_element: Option<CMat>,
    /// Second subgroup whose stabilizer at the special point is reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_subgroup: Option<GroupSpec>,
    /// Every n-th random point is replaced by a lowest-rank point (0 = never).
    #[serde(default)]
    pub degenerate_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedDims>,
}

fn default_trials() -> usize {
    100
}

fn default_spread() -> f64 {
    0.5
}

fn default_bar() -> f64 {
    0.99
}

fn default_cap() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Required fraction of decided trials with the predicted property.
    #[serde(default = "default_bar")]
    pub prevalence_bar: f64,
    /// Largest accepted fraction of inconclusive trials.
    #[serde(default = "default_cap")]
    pub max_inconclusive_fraction: f64,
    pub scenario: Scenario,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, scenario: Scenario) -> Self {
        ExperimentConfig {
            kind,
            trials: default_trials(),
            seed: 0,
            spread: default_spread(),
            flow: FlowConfig::default(),
            tolerances: Tolerances::default(),
            prevalence_bar: default_bar(),
            max_inconclusive_fraction: default_cap(),
            scenario,
        }
    }

    /// Catalog scenario with its default kind.
    pub fn from_catalog(name: &str) -> Option<Self> {
        lookup(name).map(|e| ExperimentConfig::new(e.default_kind, e.scenario))
    }
}

/// One row of an experiment report. Fields that do not apply to the
/// experiment kind are absent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    /// Closedness of the orbit the experiment is about.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<ClosednessStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_orbit_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_orbit_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_moment: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone: Option<bool>,
    /// Closedness of the `G`-orbit of the starting point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_status: Option<ClosednessStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reductivity: Option<ReductivityStatus>,
    /// Jordan type of the generator of a one-dimensional stabilizer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_type: Option<ElementType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_status: Option<ClosednessStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex_status: Option<ClosednessStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosednessCounts {
    pub closed: usize,
    pub non_closed: usize,
    pub inconclusive: usize,
}

impl ClosednessCounts {
    fn add(&mut self, s: ClosednessStatus) {
        match s {
            ClosednessStatus::Closed => self.closed += 1,
            ClosednessStatus::NonClosed => self.non_closed += 1,
            ClosednessStatus::Inconclusive => self.inconclusive += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductivityCounts {
    pub reductive: usize,
    pub not_reductive: usize,
    pub inconclusive: usize,
}

impl ReductivityCounts {
    fn add(&mut self, s: ReductivityStatus) {
        match s {
            ReductivityStatus::Reductive => self.reductive += 1,
            ReductivityStatus::NotReductive => self.not_reductive += 1,
            ReductivityStatus::Inconclusive => self.inconclusive += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: String::from(name), passed, detail }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    /// A predicted property or an assertion failed.
    MathFailure,
    /// Too many trials were inconclusive to judge.
    ExcessiveInconclusive,
}

/// Results of the deterministic checks at the special element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialPointSummary {
    pub subgroup_stabilizer_dim: usize,
    pub subgroup_reductivity: ReductivityStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_stabilizer_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_reductivity: Option<ReductivityStatus>,
}

/// Quantities computed by the example pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Summary {
    pub v0_relative_moment: f64,
    pub g_orbit_dim_v0: usize,
    pub g_stabilizer_dim_v0: usize,
    pub g_stabilizer_reductivity_v0: ReductivityStatus,
    #[serde(with = "matrix_serde")]
    pub x: CMat,
    pub x_relative_moment: f64,
    pub stabilizer_dim: usize,
    #[serde(with = "matrix_serde::list")]
    pub stabilizer_basis: Vec<CMat>,
    pub generator_type: Option<ElementType>,
    pub stabilizer_verdict: ReductivityStatus,
    pub h_orbit_status: ClosednessStatus,
    pub h_start_dim: usize,
    pub h_limit_dim: usize,
    pub g_orbit_status: ClosednessStatus,
    pub g_start_dim: usize,
    pub g_limit_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub outcome: Outcome,
    pub trials: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closedness: Option<ClosednessCounts>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reductivity: Option<ReductivityCounts>,
    /// Trials with a decided primary verdict.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decided: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub successes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prevalence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inconclusive_rate: Option<f64>,
    /// Trials left out of the comparison (e.g. no closed `G`-orbit).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disagreements: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim1_stabilizers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim1_semisimple: Option<usize>,
    /// Closed verdicts whose stabilizer was judged not reductive.
    pub consistency_violations: usize,
    pub monotonicity_violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special_point: Option<SpecialPointSummary>,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub example1: Option<Example1Summary>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
    pub tolerances: Tolerances,
    /// Known modelling limits, repeated in every report.
    #[serde(default)]
    pub limitations: Vec<String>,
}

pub const LIMITATIONS: [&str; 3] = [
    "reductivity verdicts are computed on the Lie algebra, so they describe the identity component; \
     a disconnected stabilizer can differ",
    "random points use Gaussian Lie-algebra coordinates; other absolutely continuous laws are assumed, \
     not shown, to give the same statistics",
    "subgroup orbits are sampled on the single closed orbit through the scenario base point",
];

/// Seed of trial `index`: the first output of ChaCha8 seeded with `seed` on
/// stream `index`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.next_u64()
}

fn point_rng(trial_seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    rng.set_stream(1);
    rng
}

/// A validated experiment, ready to evaluate trials.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    g: KempfNess,
    h: KempfNess,
    /// Complexified group on the same real points.
    complexified: Option<KempfNess>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let tol = config.tolerances;
        if config.trials == 0 {
            return Err(crate::error::config("trials must be at least 1"));
        }
        if !(config.spread >= 0.0 && config.spread.is_finite()) {
            return Err(crate::error::config(format!("spread must be non-negative, got {}", config.spread)));
        }
        if !(config.prevalence_bar > 0.0 && config.prevalence_bar <= 1.0) {
            return Err(crate::error::config("prevalence_bar must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&config.max_inconclusive_fraction) {
            return Err(crate::error::config("max_inconclusive_fraction must lie in [0, 1]"));
        }
        config.flow.validate()?;
        let s = &config.scenario;
        if s.representation.group != s.group {
            return Err(crate::error::config("scenario representation must be over the scenario group"));
        }
        let g = KempfNess::new(&s.representation, &s.group, &tol)?;
        let h = KempfNess::new(&s.representation, &s.subgroup, &tol)?;
        if let Some(r) = &s.reference_subgroup {
            KempfNess::new(&s.representation, r, &tol)?;
        }
        if let Some(v) = &s.base_point {
            s.representation.check_vector(v, &tol)?;
        }
        if let Some(e) = &s.special_element {
            let n = s.group.size;
            if e.shape() != (n, n) || crate::linalg::checked_inverse(e).is_none() {
                return Err(crate::error::config("special element must be an invertible matrix of the ambient size"));
            }
        }
        let needs_base = matches!(
            config.kind,
            ExperimentKind::Theorem1 | ExperimentKind::Cor3Intersection | ExperimentKind::Example1
        );
        if needs_base && s.base_point.is_none() {
            return Err(crate::error::config(format!("{} needs a base point", config.kind.name())));
        }
        if config.kind == ExperimentKind::Example1 && s.special_element.is_none() {
            return Err(crate::error::config("example1 needs a special element"));
        }
        let complexified = if config.kind == ExperimentKind::RealComplexAgreement {
            if s.group.field != Field::Real {
                return Err(crate::error::config("real/complex agreement needs a real group"));
            }
            let cg = s.group.with_field(Field::Complex);
            let crep = Representation::new(s.representation.kind.clone(), cg.clone());
            Some(KempfNess::new(&crep, &cg, &tol)?)
        } else {
            None
        };
        Ok(Experiment { config, g, h, complexified })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Number of randomized trials to evaluate (zero for the deterministic
    /// pipeline).
    pub fn trial_count(&self) -> usize {
        match self.config.kind {
            ExperimentKind::Example1 => 0,
            _ => self.config.trials,
        }
    }

    fn tol(&self) -> &Tolerances {
        &self.config.tolerances
    }

    fn rep(&self) -> &Representation {
        &self.config.scenario.representation
    }

    fn random_translate(&self, seed: u64) -> Result<RepVector> {
        let s = &self.config.scenario;
        let g = random_group_element(&s.group, seed, self.config.spread)?;
        let base = s.base_point.as_ref().ok_or_else(|| config("missing base point"))?;
        act(self.rep(), &g, base)
    }

    fn random_point(&self, seed: u64, index: usize) -> (RepVector, bool) {
        let every = self.config.scenario.degenerate_every;
        let mut rng = point_rng(seed);
        if every > 0 && index % every == every - 1 {
            (self.rep().degenerate_vector(&mut rng, self.config.spread), true)
        } else {
            (self.rep().random_vector(&mut rng, self.config.spread), false)
        }
    }

    fn stabilizer_fields(&self, acting: &KempfNess, v: &RepVector, rec: &mut TrialRecord) {
        match stabilizer_subalgebra(self.rep(), &acting.algebra, v, self.tol()) {
            Ok(stab) => {
                let report = reductivity_verdict(&stab.algebra, self.tol());
                rec.stabilizer_dim = Some(stab.algebra.dim());
                rec.reductivity = Some(if stab.ambiguous {
                    ReductivityStatus::Inconclusive
                } else {
                    report.verdict
                });
                if stab.algebra.dim() == 1 {
                    rec.generator_type = Some(element_type(&stab.algebra.matrices[0], self.tol()));
                }
            }
            Err(e) => {
                rec.reductivity = Some(ReductivityStatus::Inconclusive);
                rec.note = Some(e.to_string());
            }
        }
    }

    fn flow_fields(verdict: &ClosednessVerdict, rec: &mut TrialRecord) {
        rec.status = Some(verdict.status);
        rec.start_orbit_dim = Some(verdict.start_orbit_dim);
        rec.limit_orbit_dim = Some(verdict.limit_orbit_dim);
        rec.iterations = Some(verdict.trace.iterations_used);
        rec.final_moment = Some(verdict.final_moment);
        rec.termination = Some(verdict.termination);
        rec.monotone = Some(verdict.trace.is_monotone());
        if let Some(r) = &verdict.reason {
            rec.note = Some(r.clone());
        }
    }

    /// Evaluates trial `index`; a pure function of the configuration and the
    /// index.
    pub fn run_trial(&self, index: usize) -> TrialRecord {
        let seed = trial_seed(self.config.seed, index);
        let mut rec = TrialRecord { index, seed, ..TrialRecord::default() };
        let flow = &self.config.flow;
        match self.config.kind {
            ExperimentKind::Theorem1 | ExperimentKind::Cor3Intersection => match self.random_translate(seed) {
                Ok(x) => {
                    Self::flow_fields(&self.h.verdict(&x, flow), &mut rec);
                    self.stabilizer_fields(&self.h, &x, &mut rec);
                }
                Err(e) => {
                    rec.status = Some(ClosednessStatus::Inconclusive);
                    rec.reductivity = Some(ReductivityStatus::Inconclusive);
                    rec.note = Some(e.to_string());
                }
            },
            ExperimentKind::Cor2Normal => {
                let (v, degenerate) = self.random_point(seed, index);
                rec.degenerate = Some(degenerate);
                let gv = self.g.verdict(&v, flow);
                rec.g_status = Some(gv.status);
                if gv.status == ClosednessStatus::Closed {
                    Self::flow_fields(&self.h.verdict(&v, flow), &mut rec);
                    self.stabilizer_fields(&self.h, &v, &mut rec);
                }
            }
            ExperimentKind::Cor5DirectSum => {
                let (v, degenerate) = self.random_point(seed, index);
                rec.degenerate = Some(degenerate);
                Self::flow_fields(&self.g.verdict(&v, flow), &mut rec);
                self.stabilizer_fields(&self.g, &v, &mut rec);
            }
            ExperimentKind::RealComplexAgreement => {
                let (v, degenerate) = self.random_point(seed, index);
                rec.degenerate = Some(degenerate);
                let real = self.g.verdict(&v, flow);
                Self::flow_fields(&real, &mut rec);
                rec.real_status = Some(real.status);
                if let Some(c) = &self.complexified {
                    let complex = c.verdict(&v, flow);
                    rec.complex_status = Some(complex.status);
                    rec.monotone = Some(real.trace.is_monotone() && complex.trace.is_monotone());
                }
                self.stabilizer_fields(&self.g, &v, &mut rec);
            }
            ExperimentKind::Example1 => {}
        }
        rec
    }

    fn required(&self, decided: usize) -> usize {
        let r = crate::linalg::ceil(self.config.prevalence_bar * decided as f64 - 1e-9);
        (r.max(0.0) as usize).min(decided)
    }

    fn special_point(&self) -> Option<SpecialPointSummary> {
        let s = &self.config.scenario;
        let g = s.special_element.as_ref()?;
        let x = act(self.rep(), g, s.base_point.as_ref()?).ok()?;
        let tol = self.tol();
        let verdict_at = |algebra: &LieAlgebraBasis| -> Option<(usize, ReductivityStatus)> {
            let stab = stabilizer_subalgebra(self.rep(), algebra, &x, tol).ok()?;
            let r = reductivity_verdict(&stab.algebra, tol);
            let status = if stab.ambiguous { ReductivityStatus::Inconclusive } else { r.verdict };
            Some((stab.algebra.dim(), status))
        };
        let (subgroup_stabilizer_dim, subgroup_reductivity) = verdict_at(&self.h.algebra)?;
        let reference = s
            .reference_subgroup
            .as_ref()
            .and_then(|r| crate::groups::lie_algebra_basis_with(r, tol).ok())
            .and_then(|a| verdict_at(&a));
        Some(SpecialPointSummary {
            subgroup_stabilizer_dim,
            subgroup_reductivity,
            reference_stabilizer_dim: reference.map(|r| r.0),
            reference_reductivity: reference.map(|r| r.1),
        })
    }

    /// Builds the report from the trial records (any order).
    pub fn assemble(&self, mut records: Vec<TrialRecord>) -> ExperimentReport {
        records.sort_by_key(|r| r.index);
        let summary = match self.config.kind {
            ExperimentKind::Example1 => self.example1(),
            _ => self.summarize(&records),
        };
        ExperimentReport {
            kind: self.config.kind,
            config: self.config.clone(),
            trials: records,
            summary,
            tolerances: self.config.tolerances,
            limitations: LIMITATIONS.iter().map(|l| String::from(*l)).collect(),
        }
    }

    fn empty_summary(&self, trials: usize) -> Summary {
        Summary {
            outcome: Outcome::Pass,
            trials,
            closedness: None,
            reductivity: None,
            decided: None,
            successes: None,
            required: None,
            prevalence: None,
            inconclusive_rate: None,
            excluded: None,
            agreements: None,
            disagreements: None,
            dim1_stabilizers: None,
            dim1_semisimple: None,
            consistency_violations: 0,
            monotonicity_violations: 0,
            special_point: None,
            example1: None,
            checks: Vec::new(),
        }
    }

    fn summarize(&self, records: &[TrialRecord]) -> Summary {
        let n = records.len();
        let mut s = self.empty_summary(n);
        let mut closed = ClosednessCounts::default();
        let mut red = ReductivityCounts::default();
        for r in records {
            if let Some(st) = r.status {
                closed.add(st);
            }
            if let Some(rv) = r.reductivity {
                red.add(rv);
            }
            if r.status == Some(ClosednessStatus::Closed) && r.reductivity == Some(ReductivityStatus::NotReductive) {
                s.consistency_violations += 1;
            }
            if r.monotone == Some(false) {
                s.monotonicity_violations += 1;
            }
        }
        s.closedness = Some(closed);
        s.reductivity = Some(red);
        let bar = self.config.prevalence_bar;
        let inconclusive;
        match self.config.kind {
            ExperimentKind::Theorem1 | ExperimentKind::Cor5DirectSum => {
                let decided = closed.closed + closed.non_closed;
                let required = self.required(decided);
                inconclusive = closed.inconclusive;
                s.decided = Some(decided);
                s.successes = Some(closed.closed);
                s.required = Some(required);
                s.checks.push(check(
                    "closed_prevalence",
                    decided > 0 && closed.closed >= required,
                    format!("{} closed of {decided} decided, {required} required (bar {bar})", closed.closed),
                ));
            }
            ExperimentKind::Cor3Intersection => {
                let decided = red.reductive + red.not_reductive;
                let required = self.required(decided);
                inconclusive = red.inconclusive;
                s.decided = Some(decided);
                s.successes = Some(red.reductive);
                s.required = Some(required);
                s.checks.push(check(
                    "reductive_prevalence",
                    decided > 0 && red.reductive >= required,
                    format!("{} reductive of {decided} decided, {required} required (bar {bar})", red.reductive),
                ));
                let dim1: Vec<&TrialRecord> = records
                    .iter()
                    .filter(|r| r.stabilizer_dim == Some(1) && r.reductivity == Some(ReductivityStatus::Reductive))
                    .collect();
                let semisimple = dim1
                    .iter()
                    .filter(|r| r.generator_type == Some(ElementType::Semisimple))
                    .count();
                s.dim1_stabilizers = Some(dim1.len());
                s.dim1_semisimple = Some(semisimple);
                s.checks.push(check(
                    "dim1_generators_semisimple",
                    semisimple == dim1.len(),
                    format!("{semisimple} of {} one-dimensional reductive stabilizers", dim1.len()),
                ));
                if let Some(sp) = self.special_point() {
                    if let Some(rr) = sp.reference_reductivity {
                        s.checks.push(check(
                            "special_point_reference_not_reductive",
                            rr == ReductivityStatus::NotReductive,
                            format!(
                                "reference subgroup stabilizer of dimension {} is {rr:?}",
                                sp.reference_stabilizer_dim.unwrap_or(0)
                            ),
                        ));
                    }
                    s.special_point = Some(sp);
                }
            }
            ExperimentKind::Cor2Normal => {
                let eligible: Vec<&TrialRecord> =
                    records.iter().filter(|r| r.g_status == Some(ClosednessStatus::Closed)).collect();
                let g_inconclusive =
                    records.iter().filter(|r| r.g_status == Some(ClosednessStatus::Inconclusive)).count();
                let excluded = records.len() - eligible.len() - g_inconclusive;
                inconclusive = closed.inconclusive + g_inconclusive;
                let decided = closed.closed + closed.non_closed;
                s.decided = Some(decided);
                s.successes = Some(closed.closed);
                s.required = Some(decided);
                s.excluded = Some(excluded);
                s.checks.push(check(
                    "no_non_closed",
                    decided > 0 && closed.non_closed == 0,
                    format!("{} non-closed among {decided} decided trials on closed G-orbits", closed.non_closed),
                ));
            }
            ExperimentKind::RealComplexAgreement => {
                let mut agree = 0;
                let mut disagree = 0;
                let mut excluded = 0;
                for r in records {
                    match (r.real_status, r.complex_status) {
                        (Some(a), Some(b))
                            if a != ClosednessStatus::Inconclusive && b != ClosednessStatus::Inconclusive =>
                        {
                            if a == b {
                                agree += 1;
                            } else {
                                disagree += 1;
                            }
                        }
                        _ => excluded += 1,
                    }
                }
                inconclusive = excluded;
                s.decided = Some(agree + disagree);
                s.agreements = Some(agree);
                s.disagreements = Some(disagree);
                s.excluded = Some(excluded);
                s.checks.push(check(
                    "real_complex_agreement",
                    agree > 0 && disagree == 0,
                    format!("{agree} agreeing and {disagree} disagreeing pairs, {excluded} excluded"),
                ));
            }
            ExperimentKind::Example1 => unreachable!("handled by the pipeline"),
        }
        let rate = if n == 0 { 0.0 } else { inconclusive as f64 / n as f64 };
        s.inconclusive_rate = Some(rate);
        s.prevalence = match (s.successes, s.decided) {
            (Some(k), Some(d)) if d > 0 => Some(k as f64 / d as f64),
            _ => None,
        };
        s.checks.push(check(
            "closed_implies_reductive_stabilizer",
            s.consistency_violations == 0,
            format!("{} violations", s.consistency_violations),
        ));
        s.checks.push(check(
            "flow_monotone",
            s.monotonicity_violations == 0,
            format!("{} traces with an increasing norm", s.monotonicity_violations),
        ));
        s.outcome = if rate > self.config.max_inconclusive_fraction {
            Outcome::ExcessiveInconclusive
        } else if s.checks.iter().all(|c| c.passed) {
            Outcome::Pass
        } else {
            Outcome::MathFailure
        };
        s
    }

    fn example1(&self) -> Summary {
        let mut s = self.empty_summary(0);
        let sc = &self.config.scenario;
        let tol = self.tol();
        let flow = &self.config.flow;
        let rep = self.rep();
        let (Some(v0), Some(g)) = (sc.base_point.as_ref(), sc.special_element.as_ref()) else {
            unreachable!("validated in Experiment::new")
        };

        let v0_moment = self.g.relative_moment(v0);
        s.checks.push(check(
            "v0_minimal",
            v0_moment <= flow.moment_tolerance,
            format!("relative moment {v0_moment:.3e}"),
        ));
        let g_alg = &self.g.algebra;
        let od = orbit_dimension(rep, g_alg, v0, tol);
        let sd = stabilizer_subalgebra(rep, g_alg, v0, tol);
        let (g_orbit_dim_v0, g_stab_v0, ambiguous_v0) = match (&od, &sd) {
            (Ok(o), Ok(st)) => (o.dim, st.algebra.clone(), o.ambiguous || st.ambiguous),
            _ => (0, LieAlgebraBasis::zero(g_alg.field, g_alg.ambient_size), true),
        };
        s.checks.push(check(
            "v0_rank_nullity",
            !ambiguous_v0 && g_orbit_dim_v0 + g_stab_v0.dim() == g_alg.dim(),
            format!("{g_orbit_dim_v0} + {} = {}", g_stab_v0.dim(), g_alg.dim()),
        ));
        if let Some(e) = sc.expected {
            s.checks.push(check(
                "v0_dimensions",
                g_orbit_dim_v0 == e.g_orbit_dim && g_stab_v0.dim() == e.g_stabilizer_dim,
                format!(
                    "orbit {g_orbit_dim_v0} (expected {}), stabilizer {} (expected {})",
                    e.g_orbit_dim,
                    g_stab_v0.dim(),
                    e.g_stabilizer_dim
                ),
            ));
        }
        let g_stab_red = reductivity_verdict(&g_stab_v0, tol).verdict;

        let x = match act(rep, g, v0) {
            Ok(x) => x,
            Err(_) => unreachable!("validated shapes"),
        };
        let x_moment = self.g.relative_moment(&x);
        let h_stab = stabilizer_subalgebra(rep, &self.h.algebra, &x, tol);
        let (stab_basis, stab_ambiguous) = match &h_stab {
            Ok(st) => (st.algebra.clone(), st.ambiguous),
            Err(_) => (LieAlgebraBasis::zero(self.h.algebra.field, self.h.algebra.ambient_size), true),
        };
        let generator_type = (stab_basis.dim() == 1).then(|| element_type(&stab_basis.matrices[0], tol));
        let red = reductivity_verdict(&stab_basis, tol);
        let stab_verdict = if stab_ambiguous { ReductivityStatus::Inconclusive } else { red.verdict };
        if let Some(e) = sc.expected {
            s.checks.push(check(
                "stabilizer_dimension",
                !stab_ambiguous && stab_basis.dim() == e.h_stabilizer_dim,
                format!("dimension {} (expected {})", stab_basis.dim(), e.h_stabilizer_dim),
            ));
        }
        s.checks.push(check(
            "stabilizer_generator_nilpotent",
            stab_basis.dim() >= 1
                && red.center_element_types.iter().any(|t| *t == ElementType::Nilpotent)
                && (generator_type.is_none() || generator_type == Some(ElementType::Nilpotent)),
            format!("generator type {generator_type:?}, center types {:?}", red.center_element_types),
        ));
        s.checks.push(check(
            "stabilizer_not_reductive",
            stab_verdict == ReductivityStatus::NotReductive,
            format!("{stab_verdict:?} with {} witnesses", red.witnesses.len()),
        ));

        let hv = self.h.verdict(&x, flow);
        let gv = self.g.verdict(&x, flow);
        s.checks.push(check(
            "h_orbit_non_closed",
            hv.status == ClosednessStatus::NonClosed,
            format!(
                "{:?}: dimension {} -> {}, final moment {:.3e}, {:?}",
                hv.status, hv.start_orbit_dim, hv.limit_orbit_dim, hv.final_moment, hv.termination
            ),
        ));
        s.checks.push(check(
            "g_orbit_closed",
            gv.status == ClosednessStatus::Closed,
            format!(
                "{:?}: dimension {} -> {}, final moment {:.3e}, {:?}",
                gv.status, gv.start_orbit_dim, gv.limit_orbit_dim, gv.final_moment, gv.termination
            ),
        ));
        s.checks.push(check(
            "non_reductive_with_non_closed",
            stab_verdict == ReductivityStatus::NotReductive && hv.status == ClosednessStatus::NonClosed,
            String::from("stabilizer not reductive and H-orbit not closed"),
        ));
        s.monotonicity_violations = [&hv, &gv].iter().filter(|v| !v.trace.is_monotone()).count();
        s.checks.push(check(
            "flow_monotone",
            s.monotonicity_violations == 0,
            format!("{} traces with an increasing norm", s.monotonicity_violations),
        ));
        s.outcome = if s.checks.iter().all(|c| c.passed) {
            Outcome::Pass
        } else if hv.status == ClosednessStatus::Inconclusive || gv.status == ClosednessStatus::Inconclusive {
            Outcome::ExcessiveInconclusive
        } else {
            Outcome::MathFailure
        };
        s.example1 = Some(Example1Summary {
            v0_relative_moment: v0_moment,
            g_orbit_dim_v0,
            g_stabilizer_dim_v0: g_stab_v0.dim(),
            g_stabilizer_reductivity_v0: g_stab_red,
            x: x.parts[0].clone(),
            x_relative_moment: x_moment,
            stabilizer_dim: stab_basis.dim(),
            stabilizer_basis: stab_basis.matrices.clone(),
            generator_type,
            stabilizer_verdict: stab_verdict,
            h_orbit_status: hv.status,
            h_start_dim: hv.start_orbit_dim,
            h_limit_dim: hv.limit_orbit_dim,
            g_orbit_status: gv.status,
            g_start_dim: gv.start_orbit_dim,
            g_limit_dim: gv.limit_orbit_dim,
        });
        s
    }
}

/// Runs every trial sequentially and assembles the report.
pub fn run_experiment(config: ExperimentConfig) -> Result<ExperimentReport> {
    let exp = Experiment::new(config)?;
    let records = (0..exp.trial_count()).map(|i| exp.run_trial(i)).collect();
    Ok(exp.assemble(records))
}
