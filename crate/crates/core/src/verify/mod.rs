//! Verification harness: every checkable property of v, u_eps and b_delta as
//! a deterministic, seeded check producing a machine-readable report.

mod bounds;
mod ladders;
mod seams;

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{AnyMap, HParams, QuadSpec};
use crate::geom::AxiMap;

pub use bounds::{
    check_det_bounds, check_injectivity, check_jacobians, check_jump, check_v_det_bound,
    inverse_bound_ratio,
};
pub use ladders::{check_convergence, check_energies, check_gap, check_integrability, IntegrabilityCase};
pub use seams::check_interfaces;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Le,
    Lt,
    Ge,
    Gt,
    /// reported value, no assertion
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub pass: bool,
}

impl Measurement {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, limit: f64) -> Self {
        let pass = match relation {
            Relation::Le => value <= limit,
            Relation::Lt => value < limit,
            Relation::Ge => value >= limit,
            Relation::Gt => value > limit,
            Relation::Info => true,
        };
        Measurement {
            name: name.into(),
            value,
            relation,
            limit,
            pass,
        }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self::new(name, value, Relation::Info, f64::NAN)
    }

    /// A boolean assertion, recorded as 1 (holds) or 0.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Relation::Ge, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub id: String,
    /// The property checked, in words.
    pub claim: String,
    pub target: String,
    pub status: Status,
    pub samples: usize,
    pub measurements: Vec<Measurement>,
    /// Evaluation error that aborted the check, if any.
    pub error: Option<String>,
    /// Wall-clock timings; kept out of the serialized report so that the
    /// JSON is reproducible.
    #[serde(skip)]
    pub timings_ms: Vec<(String, u128)>,
}

impl VerifyReport {
    pub fn new(id: impl Into<String>, claim: &str, target: impl Into<String>) -> Self {
        VerifyReport {
            id: id.into(),
            claim: claim.to_string(),
            target: target.into(),
            status: Status::Pass,
            samples: 0,
            measurements: Vec::new(),
            error: None,
            timings_ms: Vec::new(),
        }
    }

    pub fn push(&mut self, m: Measurement) {
        if !m.pass {
            self.status = Status::Fail;
        }
        self.measurements.push(m);
    }

    pub fn fail_with(&mut self, e: impl ToString) {
        self.status = Status::Fail;
        self.error = Some(e.to_string());
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Names of the failed measurements.
    pub fn failures(&self) -> Vec<&str> {
        self.measurements
            .iter()
            .filter(|m| !m.pass)
            .map(|m| m.name.as_str())
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.name == name)
    }
}

/// One check with its target, sample counts and seed.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckSpec {
    Interfaces { map: AnyMap, samples: usize, seed: u64 },
    Jacobians { map: AnyMap, samples: usize, seed: u64 },
    DetBounds { deltas: Vec<f64>, samples: usize, seed: u64 },
    VDetBound { samples: usize, seed: u64 },
    Injectivity { deltas: Vec<f64>, pairs: usize, seed: u64 },
    Jump { nodes: usize },
    Energies { deltas: Vec<f64>, eps: Vec<f64>, gamma: f64, h: HParams, quad: QuadSpec },
    Gap { eps: Vec<f64>, gamma: f64, h: HParams, quad: QuadSpec },
    Convergence { eps: Vec<f64>, gamma: f64, quad: QuadSpec },
    Integrability { levels: Vec<u32>, cases: Vec<IntegrabilityCase> },
}

impl CheckSpec {
    pub fn id(&self) -> String {
        let tgt = |m: &AnyMap| match m {
            AnyMap::Ueps(u) => format!("ueps_{}", u.prof.eps),
            AnyMap::Bdelta(b) => format!("bdelta_{}", b.delta()),
            _ => m.name().to_string(),
        };
        match self {
            CheckSpec::Interfaces { map, .. } => format!("interfaces/{}", tgt(map)),
            CheckSpec::Jacobians { map, .. } => format!("jacobians/{}", tgt(map)),
            CheckSpec::DetBounds { .. } => "det_bounds/bdelta".into(),
            CheckSpec::VDetBound { .. } => "det_bounds/v".into(),
            CheckSpec::Injectivity { .. } => "injectivity/bdelta".into(),
            CheckSpec::Jump { .. } => "jump/v".into(),
            CheckSpec::Energies { .. } => "energies".into(),
            CheckSpec::Gap { .. } => "gap".into(),
            CheckSpec::Convergence { .. } => "convergence/ueps".into(),
            CheckSpec::Integrability { .. } => "integrability/v".into(),
        }
    }

    pub fn run(&self) -> VerifyReport {
        let start = std::time::Instant::now();
        let mut rep = match self {
            CheckSpec::Interfaces { map, samples, seed } => check_interfaces(map, *samples, *seed),
            CheckSpec::Jacobians { map, samples, seed } => check_jacobians(map, *samples, *seed),
            CheckSpec::DetBounds { deltas, samples, seed } => check_det_bounds(deltas, *samples, *seed),
            CheckSpec::VDetBound { samples, seed } => check_v_det_bound(*samples, *seed),
            CheckSpec::Injectivity { deltas, pairs, seed } => check_injectivity(deltas, *pairs, *seed),
            CheckSpec::Jump { nodes } => check_jump(*nodes),
            CheckSpec::Energies { deltas, eps, gamma, h, quad } => {
                check_energies(deltas, eps, *gamma, h, quad)
            }
            CheckSpec::Gap { eps, gamma, h, quad } => check_gap(eps, *gamma, h, quad),
            CheckSpec::Convergence { eps, gamma, quad } => check_convergence(eps, *gamma, quad),
            CheckSpec::Integrability { levels, cases } => check_integrability(levels, cases),
        };
        rep.id = self.id();
        rep.timings_ms.push(("total".into(), start.elapsed().as_millis()));
        rep
    }
}

pub const DELTA_LADDER: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
pub const EPS_LADDER: [f64; 4] = [1e-1, 3e-2, 1e-2, 3e-3];

/// Dyadic grading levels used for the integrability experiments.
pub fn default_levels() -> Vec<u32> {
    (20..=28).collect()
}

/// The full suite at the default sample counts. `scale` in (0, 1] shrinks
/// every sample count, for smoke runs.
pub fn default_suite(seed: u64, scale: f64) -> Vec<CheckSpec> {
    let n = |k: usize| ((k as f64 * scale).ceil() as usize).max(16);
    let gamma = 1.0 / 3.0;
    let h = HParams::default();
    let tight = QuadSpec {
        rel_tol: 1e-4,
        max_cells: 2_000_000,
        ..QuadSpec::default()
    };
    let mut s = vec![
        CheckSpec::Jump { nodes: 64 },
        CheckSpec::DetBounds {
            deltas: DELTA_LADDER.to_vec(),
            samples: n(100_000),
            seed,
        },
        CheckSpec::VDetBound { samples: n(10_000), seed },
        CheckSpec::Injectivity {
            deltas: DELTA_LADDER.to_vec(),
            pairs: n(100_000),
            seed,
        },
        CheckSpec::Energies {
            deltas: DELTA_LADDER.to_vec(),
            eps: EPS_LADDER.to_vec(),
            gamma,
            h,
            quad: QuadSpec::default(),
        },
        CheckSpec::Gap {
            eps: EPS_LADDER.to_vec(),
            gamma,
            h,
            quad: tight,
        },
        CheckSpec::Convergence {
            eps: EPS_LADDER.to_vec(),
            gamma,
            quad: QuadSpec::default(),
        },
        CheckSpec::Integrability {
            levels: default_levels(),
            cases: IntegrabilityCase::standard(),
        },
    ];
    for map in [AnyMap::V, AnyMap::ueps(1e-2, gamma).unwrap(), AnyMap::bdelta(0.5).unwrap()] {
        s.push(CheckSpec::Interfaces { map, samples: n(10_000), seed });
        s.push(CheckSpec::Jacobians { map, samples: n(10_000), seed });
    }
    s
}

/// Runs checks in parallel; reports come back sorted by id.
pub fn run_checks(specs: &[CheckSpec]) -> Vec<VerifyReport> {
    let mut out: Vec<VerifyReport> = specs.par_iter().map(|s| s.run()).collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}
