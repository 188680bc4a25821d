//! Declarative JSON experiment configs. Every variant is discriminated by a
//! `kind` (or `family`) field; seeds are mandatory so that every report is
//! reproducible from its config echo.
//!
//! Schema sketch (see the repository README for the full field list):
//!
//! ```json
//! {
//!   "space":    {"n": 1, "p": 2.0},
//!   "domain":   {"kind": "whole-space"},
//!   "mapping":  {"kind": "negation"},
//!   "params":   {"named": "nonexpansive"},
//!   "fixed_points": [[0.0]],
//!   "sampling": {"seed": 42, "pairs": 1000, "points": 1000, "extent": 5.0},
//!   "tolerance": 1e-9,
//!   "scheme":   "ishikawa",
//!   "schedules": {"lambda": {"family": "constant", "value": 0.5},
//!                 "gamma":  {"family": "constant", "value": 0.5}},
//!   "x0": [1.0],
//!   "stop": {"residual_tol": 1e-10, "max_iter": 10000},
//!   "fit": {"impose_c1": false, "impose_c3": false, "bound": 10.0}
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::conefit::ConeFitOptions;
use crate::domain::ConvexDomain;
use crate::error::Result;
use crate::hybrid::{named_class, SghParams};
use crate::iteration::{Schedule, Schedules, Scheme, StopRule};
use crate::mapping::{Mapping, MappingKind, SquareMatrix};
use crate::sampling::SamplePlan;
use crate::space::{SpaceSpec, Vector};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub n: usize,
    pub p: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainConfig {
    WholeSpace,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { radius: f64 },
    FinitePointSet { points: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MappingConfig {
    Identity,
    Constant { value: Vec<f64> },
    Scaling { factor: f64 },
    Negation,
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    MetricProjection { target: Box<DomainConfig> },
    Table { entries: Vec<TableEntry> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntry {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
}

/// Either a named class or an explicit quadruple.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsConfig {
    Named { named: String },
    Explicit(SghParams),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleConfig {
    Constant { value: f64 },
    HarmonicOffset { base: f64, amplitude: f64 },
    Table { values: Vec<f64> },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SchedulesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ScheduleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ScheduleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ScheduleConfig>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    /// Mandatory: no wall-clock entropy anywhere.
    pub seed: u64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_extent")]
    pub extent: f64,
}

fn default_pairs() -> usize {
    1000
}

fn default_points() -> usize {
    1000
}

fn default_extent() -> f64 {
    5.0
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default)]
    pub impose_c1: bool,
    #[serde(default)]
    pub impose_c3: bool,
    #[serde(default = "default_bound")]
    pub bound: f64,
}

fn default_bound() -> f64 {
    10.0
}

impl From<FitConfig> for ConeFitOptions {
    fn from(f: FitConfig) -> Self {
        ConeFitOptions {
            impose_c1: f.impose_c1,
            impose_c3: f.impose_c3,
            bound: f.bound,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    pub domain: DomainConfig,
    pub mapping: MappingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_points: Option<Vec<Vec<f64>>>,
    pub sampling: SamplingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedules: Option<SchedulesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<StopRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
}

/// Config with every reference resolved into a live object.
pub struct Resolved {
    pub space: SpaceSpec,
    pub mapping: Mapping,
    pub params: Option<SghParams>,
    pub tolerance: f64,
    pub pair_plan: SamplePlan,
    pub point_plan: SamplePlan,
    pub scheme: Option<Scheme>,
    pub schedules: Schedules,
    pub x0: Option<Vector>,
    pub stop: StopRule,
    pub fit: ConeFitOptions,
}

fn build_domain(space: SpaceSpec, cfg: &DomainConfig) -> Result<ConvexDomain> {
    match cfg {
        DomainConfig::WholeSpace => Ok(ConvexDomain::whole_space(space)),
        DomainConfig::Box { lo, hi } => ConvexDomain::bounded_box(space, lo.clone(), hi.clone()),
        DomainConfig::Ball { radius } => ConvexDomain::ball(space, *radius),
        DomainConfig::FinitePointSet { points } => {
            let pts = points
                .iter()
                .map(|c| Vector::new(space, c.clone()))
                .collect::<Result<Vec<_>>>()?;
            ConvexDomain::finite_points(space, pts)
        }
    }
}

fn build_kind(space: SpaceSpec, cfg: &MappingConfig) -> Result<MappingKind> {
    Ok(match cfg {
        MappingConfig::Identity => MappingKind::Identity,
        MappingConfig::Constant { value } => MappingKind::Constant {
            value: Vector::new(space, value.clone())?,
        },
        MappingConfig::Scaling { factor } => MappingKind::Scaling { factor: *factor },
        MappingConfig::Negation => MappingKind::Negation,
        MappingConfig::Affine { matrix, offset } => MappingKind::Affine {
            matrix: SquareMatrix::from_rows(matrix)?,
            offset: Vector::new(space, offset.clone())?,
        },
        MappingConfig::MetricProjection { target } => MappingKind::MetricProjection {
            target: build_domain(space, target)?,
        },
        MappingConfig::Table { entries } => MappingKind::Table {
            entries: entries
                .iter()
                .map(|e| {
                    Ok((
                        Vector::new(space, e.from.clone())?,
                        Vector::new(space, e.to.clone())?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?,
        },
    })
}

fn build_schedule(cfg: &ScheduleConfig) -> Schedule {
    match cfg {
        ScheduleConfig::Constant { value } => Schedule::Constant(*value),
        ScheduleConfig::HarmonicOffset { base, amplitude } => Schedule::HarmonicOffset {
            base: *base,
            amplitude: *amplitude,
        },
        ScheduleConfig::Table { values } => Schedule::Table(values.clone()),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let space = SpaceSpec::new(self.space.n, self.space.p)?;
        let domain = build_domain(space, &self.domain)?;
        let kind = build_kind(space, &self.mapping)?;
        let fixed_points = self
            .fixed_points
            .as_ref()
            .map(|fps| {
                fps.iter()
                    .map(|c| Vector::new(space, c.clone()))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?
            .unwrap_or_default();

        // self-map check plan: seed offset keeps it independent of the
        // membership sampling streams
        let check_plan =
            SamplePlan::new(1000, self.sampling.seed.wrapping_add(0x5e1f)).with_extent(self.sampling.extent);
        let mapping = Mapping::new(domain, kind, fixed_points, &check_plan)?;

        let params = self
            .params
            .as_ref()
            .map(|p| match p {
                ParamsConfig::Named { named } => named_class(named),
                ParamsConfig::Explicit(p) => Ok(*p),
            })
            .transpose()?;

        let schedules = match &self.schedules {
            Some(s) => Schedules {
                alpha: s.alpha.as_ref().map(build_schedule),
                lambda: s.lambda.as_ref().map(build_schedule),
                gamma: s.gamma.as_ref().map(build_schedule),
            },
            None => Schedules::default(),
        };

        let x0 = self
            .x0
            .as_ref()
            .map(|c| Vector::new(space, c.clone()))
            .transpose()?;

        Ok(Resolved {
            space,
            mapping,
            params,
            tolerance: self.tolerance.unwrap_or(1e-9),
            pair_plan: SamplePlan::new(self.sampling.pairs, self.sampling.seed)
                .with_extent(self.sampling.extent),
            point_plan: SamplePlan::new(self.sampling.points, self.sampling.seed.wrapping_add(1))
                .with_extent(self.sampling.extent),
            scheme: self.scheme,
            schedules,
            x0,
            stop: self.stop.unwrap_or_default(),
            fit: self.fit.map(Into::into).unwrap_or_default(),
        })
    }
}

/// Pretty-printed JSON with sorted keys (the value map is ordered), plus a
/// trailing newline: identical inputs give byte-identical files.
pub fn render_report(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    const NEGATION_CFG: &str = r#"{
        "space": {"n": 1, "p": 2.0},
        "domain": {"kind": "whole-space"},
        "mapping": {"kind": "negation"},
        "params": {"named": "nonexpansive"},
        "fixed_points": [[0.0]],
        "sampling": {"seed": 42},
        "scheme": "ishikawa",
        "schedules": {"lambda": {"family": "constant", "value": 0.5},
                      "gamma": {"family": "constant", "value": 0.5}},
        "x0": [1.0]
    }"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = ExperimentConfig::from_json(NEGATION_CFG).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.space.n, 1);
        assert_eq!(r.params.unwrap().alpha, 1.0);
        assert_eq!(r.mapping.fixed_points().len(), 1);
        assert!(r.schedules.lambda.is_some());
        assert_eq!(r.stop.max_iter, 10_000);
        assert_eq!(r.stop.residual_tol, 1e-10);
    }

    #[test]
    fn seed_is_mandatory() {
        let bad = NEGATION_CFG.replace(r#""sampling": {"seed": 42},"#, r#""sampling": {},"#);
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn unknown_class_name_is_config_error() {
        let bad = NEGATION_CFG.replace("nonexpansive", "expansive");
        let cfg = ExperimentConfig::from_json(&bad).unwrap();
        assert!(matches!(cfg.resolve(), Err(Error::Config(_))));
    }

    #[test]
    fn explicit_params_accepted() {
        let explicit = NEGATION_CFG.replace(
            r#"{"named": "nonexpansive"}"#,
            r#"{"alpha": 2.0, "beta": -1.0, "gamma": 0.0, "delta": 0.0}"#,
        );
        let cfg = ExperimentConfig::from_json(&explicit).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.params.unwrap().beta, -1.0);
    }

    #[test]
    fn malformed_json_is_an_error() {
        assert!(ExperimentConfig::from_json("{not json").is_err());
    }

    #[test]
    fn report_keys_sorted_and_stable() {
        let v = serde_json::json!({"zeta": 1, "alpha": {"q": 2, "b": 3}});
        let a = render_report(&v);
        let b = render_report(&v);
        assert_eq!(a, b);
        let alpha_pos = a.find("alpha").unwrap();
        let zeta_pos = a.find("zeta").unwrap();
        assert!(alpha_pos < zeta_pos);
        assert!(a.ends_with('\n'));
    }
}
