//! Picard, Mann, and two-level (Ishikawa) iteration engines with schedule
//! validation, trace recording, Fejer-monotonicity checks, and stopping
//! rules.
//!
//! The two-level scheme follows the convention
//!
//!   y_n     = (1 - lambda_n) x_n + lambda_n T x_n
//!   x_{n+1} = (1 - gamma_n) x_n + gamma_n T y_n
//!
//! with 0 <= lambda_n <= 1 and 0 < gamma_n <= 1. Taking lambda_n = 0
//! recovers the one-level scheme x_{n+1} = alpha_n x_n + (1 - alpha_n) T x_n
//! with alpha_n = 1 - gamma_n.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::space::{self, Vector};

/// Drift budget for pulling an iterate that left the domain by rounding
/// back onto it; larger exits abort the run.
pub const DOMAIN_DRIFT_TOL: f64 = 1e-12;

/// Parametric sequence family with analytically known condition flags.
/// Flags are derived from the family parameters, never estimated from
/// finite prefixes.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    Constant(f64),
    /// value(n) = base + amplitude / (n + 1)
    HarmonicOffset { base: f64, amplitude: f64 },
    /// listed values, then the last value repeats forever
    Table(Vec<f64>),
}

impl Schedule {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            Schedule::Constant(c) => *c,
            Schedule::HarmonicOffset { base, amplitude } => base + amplitude / (n as f64 + 1.0),
            Schedule::Table(values) => {
                let last = values.len() - 1;
                values[n.min(last)]
            }
        }
    }

    /// Exact range of the sequence over all n (min, max); the infimum need
    /// not be attained for harmonic families.
    fn range(&self) -> (f64, f64) {
        match self {
            Schedule::Constant(c) => (*c, *c),
            Schedule::HarmonicOffset { base, amplitude } => {
                if *amplitude >= 0.0 {
                    (*base, base + amplitude)
                } else {
                    (base + amplitude, *base)
                }
            }
            Schedule::Table(values) => values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(*v), hi.max(*v))
                }),
        }
    }

    /// Limit of the sequence (all families converge).
    fn limit(&self) -> f64 {
        match self {
            Schedule::Constant(c) => *c,
            Schedule::HarmonicOffset { base, .. } => *base,
            Schedule::Table(values) => *values.last().unwrap(),
        }
    }

    pub fn in_unit_interval(&self) -> bool {
        let (lo, hi) = self.range();
        lo >= 0.0 && hi <= 1.0
    }

    /// Greatest lower bound of the sequence.
    pub fn infimum(&self) -> f64 {
        self.range().0
    }

    /// liminf of s_n (1 - s_n) is positive: the limit value must lie
    /// strictly inside (0, 1).
    pub fn liminf_product_positive(&self) -> bool {
        let l = self.limit();
        l > 0.0 && l < 1.0
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Schedule::Table(values) if values.is_empty() => {
                Err(Error::Config("table schedule must be nonempty".into()))
            }
            Schedule::HarmonicOffset { base, amplitude }
                if !base.is_finite() || !amplitude.is_finite() =>
            {
                Err(Error::NonFinite("schedule parameter".into()))
            }
            Schedule::Constant(c) if !c.is_finite() => {
                Err(Error::NonFinite("schedule parameter".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleRole {
    /// Inner weight: needs liminf s(1-s) > 0.
    Lambda,
    /// Outer weight: needs a positive lower bound a with a <= s_n <= 1.
    Gamma,
}

/// Analytic verdicts for one schedule in one role.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScheduleVerdicts {
    pub in_unit_interval: bool,
    pub lower_bound: f64,
    pub liminf_product_positive: bool,
    /// All conditions required by the role hold.
    pub ok_for_role: bool,
}

pub fn validate_schedule(schedule: &Schedule, role: ScheduleRole) -> ScheduleVerdicts {
    let in_unit = schedule.in_unit_interval();
    let inf = schedule.infimum();
    let liminf = schedule.liminf_product_positive();
    let ok = match role {
        ScheduleRole::Lambda => in_unit && liminf,
        ScheduleRole::Gamma => in_unit && inf > 0.0,
    };
    ScheduleVerdicts {
        in_unit_interval: in_unit,
        lower_bound: inf,
        liminf_product_positive: liminf,
        ok_for_role: ok,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Picard,
    Mann,
    Ishikawa,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StopRule {
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            residual_tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    ResidualTolerance,
    MaxIterations,
    DomainExit,
}

/// Schedules for the chosen scheme. Mann uses `alpha`; the two-level scheme
/// uses `lambda` and `gamma`.
#[derive(Clone, Debug, Default)]
pub struct Schedules {
    pub alpha: Option<Schedule>,
    pub lambda: Option<Schedule>,
    pub gamma: Option<Schedule>,
}

/// Full record of one iteration run.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    pub scheme: Scheme,
    /// x_0 .. x_N
    pub iterates: Vec<Vector>,
    /// y_n for the two-level scheme (one per step), empty otherwise.
    pub auxiliary: Vec<Vector>,
    /// ||x_n - T x_n|| for each recorded iterate.
    pub residuals: Vec<f64>,
    /// One row per declared fixed point q: ||x_n - q|| for each iterate.
    pub fixed_point_distances: Vec<Vec<f64>>,
    /// Realized weights, one per step.
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub stop: StopRule,
    pub stop_reason: StopReason,
}

impl IterationTrace {
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn final_iterate(&self) -> &Vector {
        self.iterates.last().expect("trace has at least x_0")
    }

    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().expect("trace has at least x_0")
    }

    /// CSV export: header `n,x0..,residual,dist0..`; floats carry 17
    /// significant digits so the file round-trips bit-faithfully.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let dim = self.iterates[0].coords().len();
        let mut header = String::from("n");
        for i in 0..dim {
            header.push_str(&format!(",x{i}"));
        }
        header.push_str(",residual");
        for k in 0..self.fixed_point_distances.len() {
            header.push_str(&format!(",dist{k}"));
        }
        writeln!(w, "{header}")?;
        for (n, x) in self.iterates.iter().enumerate() {
            let mut row = format!("{n}");
            for c in x.coords() {
                row.push_str(&format!(",{c:.16e}"));
            }
            row.push_str(&format!(",{:.16e}", self.residuals[n]));
            for dists in &self.fixed_point_distances {
                row.push_str(&format!(",{:.16e}", dists[n]));
            }
            writeln!(w, "{row}")?;
        }
        Ok(())
    }
}

/// One step x_{n+1} = alpha x_n + (1 - alpha) T x_n.
pub fn mann_step(mapping: &Mapping, x: &Vector, alpha: f64) -> Result<Vector> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Parameter(format!("alpha must lie in [0,1], got {alpha}")));
    }
    let tx = mapping.evaluate(x)?;
    x.combine(&tx, alpha, 1.0 - alpha)
}

/// One two-level step; returns (y_n, x_{n+1}).
pub fn ishikawa_step(
    mapping: &Mapping,
    x: &Vector,
    lambda: f64,
    gamma: f64,
) -> Result<(Vector, Vector)> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Parameter(format!("lambda must lie in [0,1], got {lambda}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Parameter(format!("gamma must lie in (0,1], got {gamma}")));
    }
    let tx = mapping.evaluate(x)?;
    let y = x.combine(&tx, 1.0 - lambda, lambda)?;
    let ty = mapping.evaluate(&y)?;
    let next = x.combine(&ty, 1.0 - gamma, gamma)?;
    Ok((y, next))
}

/// Run the scheme from x0 until the residual ||x_n - T x_n|| reaches the
/// stop tolerance or the iteration budget runs out, recording the full
/// trace. Iterates that drift off the domain by at most
/// [`DOMAIN_DRIFT_TOL`] are reprojected; larger exits stop the run.
pub fn iterate(
    mapping: &Mapping,
    x0: &Vector,
    scheme: Scheme,
    schedules: &Schedules,
    stop: StopRule,
) -> Result<IterationTrace> {
    if !mapping.domain().contains(x0, DOMAIN_DRIFT_TOL) {
        return Err(Error::OutsideDomain("starting point".into()));
    }
    let alpha = match (scheme, &schedules.alpha) {
        (Scheme::Mann, Some(a)) => {
            a.validate()?;
            Some(a.clone())
        }
        (Scheme::Mann, None) => {
            return Err(Error::Config("one-level scheme requires an alpha schedule".into()))
        }
        _ => None,
    };
    let (lambda, gamma) = match scheme {
        Scheme::Ishikawa => {
            let l = schedules
                .lambda
                .as_ref()
                .ok_or_else(|| Error::Config("two-level scheme requires a lambda schedule".into()))?;
            let g = schedules
                .gamma
                .as_ref()
                .ok_or_else(|| Error::Config("two-level scheme requires a gamma schedule".into()))?;
            l.validate()?;
            g.validate()?;
            (Some(l.clone()), Some(g.clone()))
        }
        _ => (None, None),
    };

    let qs = mapping.fixed_points().to_vec();
    let mut trace = IterationTrace {
        scheme,
        iterates: Vec::new(),
        auxiliary: Vec::new(),
        residuals: Vec::new(),
        fixed_point_distances: vec![Vec::new(); qs.len()],
        alphas: Vec::new(),
        lambdas: Vec::new(),
        gammas: Vec::new(),
        stop,
        stop_reason: StopReason::MaxIterations,
    };

    let mut x = x0.clone();
    let record = |trace: &mut IterationTrace, x: &Vector| -> Result<f64> {
        let tx = mapping.evaluate(x)?;
        let r = space::dist(x, &tx)?;
        trace.iterates.push(x.clone());
        trace.residuals.push(r);
        for (k, q) in qs.iter().enumerate() {
            trace.fixed_point_distances[k].push(space::dist(x, q)?);
        }
        Ok(r)
    };

    let mut residual = record(&mut trace, &x)?;
    let mut n = 0usize;
    while residual > stop.residual_tol && n < stop.max_iter {
        let next = match scheme {
            Scheme::Picard => mapping.evaluate(&x)?,
            Scheme::Mann => {
                let a = alpha.as_ref().unwrap().value(n);
                trace.alphas.push(a);
                mann_step(mapping, &x, a)?
            }
            Scheme::Ishikawa => {
                let l = lambda.as_ref().unwrap().value(n);
                let g = gamma.as_ref().unwrap().value(n);
                trace.lambdas.push(l);
                trace.gammas.push(g);
                let (y, next) = ishikawa_step(mapping, &x, l, g)?;
                trace.auxiliary.push(y);
                next
            }
        };
        let next = if mapping.domain().contains(&next, 0.0) {
            next
        } else {
            match mapping.domain().reproject(&next, DOMAIN_DRIFT_TOL) {
                Some(v) => v,
                None => {
                    trace.stop_reason = StopReason::DomainExit;
                    return Ok(trace);
                }
            }
        };
        x = next;
        residual = record(&mut trace, &x)?;
        n += 1;
    }
    trace.stop_reason = if residual <= stop.residual_tol {
        StopReason::ResidualTolerance
    } else {
        StopReason::MaxIterations
    };
    Ok(trace)
}

/// Fejer check: ||x_{n+1} - q|| <= ||x_n - q|| + slack at every recorded
/// step. `q` must be a verified fixed point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FejerReport {
    pub pass: bool,
    pub worst_index: Option<usize>,
    pub worst_violation: f64,
}

pub fn fejer_check(trace: &IterationTrace, q: &Vector, slack: f64) -> Result<FejerReport> {
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut worst_index = None;
    let mut prev = space::dist(&trace.iterates[0], q)?;
    for (i, x) in trace.iterates.iter().enumerate().skip(1) {
        let d = space::dist(x, q)?;
        let violation = d - prev;
        if violation > worst {
            worst = violation;
            worst_index = Some(i - 1);
        }
        prev = d;
    }
    if trace.iterates.len() < 2 {
        return Ok(FejerReport {
            pass: true,
            worst_index: None,
            worst_violation: 0.0,
        });
    }
    Ok(FejerReport {
        pass: worst <= slack,
        worst_index,
        worst_violation: worst,
    })
}

/// Per-step descent check for two-level traces:
///
///   a * lambda_n (1 - lambda_n) g(||x_n - T x_n||)
///     <= ||x_n - q||^2 - ||x_{n+1} - q||^2 + slack
///
/// where `a` is the analytic lower bound of the gamma schedule. Also requires
/// the run to have stopped by reaching its residual tolerance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayReport {
    pub pass: bool,
    pub worst_index: Option<usize>,
    pub worst_violation: f64,
    pub final_residual: f64,
    pub reached_tolerance: bool,
}

pub fn residual_decay_check(
    trace: &IterationTrace,
    q: &Vector,
    gamma_lower_bound: f64,
    g: impl Fn(f64) -> f64,
    slack: f64,
) -> Result<DecayReport> {
    if trace.scheme != Scheme::Ishikawa {
        return Err(Error::Precondition(
            "residual decay check applies to two-level traces".into(),
        ));
    }
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut worst_index = None;
    for n in 0..trace.steps() {
        let lambda = trace.lambdas[n];
        let dn = space::dist(&trace.iterates[n], q)?;
        let dn1 = space::dist(&trace.iterates[n + 1], q)?;
        let lhs = gamma_lower_bound * lambda * (1.0 - lambda) * g(trace.residuals[n]);
        let violation = lhs - (dn * dn - dn1 * dn1);
        if violation > worst {
            worst = violation;
            worst_index = Some(n);
        }
    }
    let reached = trace.stop_reason == StopReason::ResidualTolerance;
    let pass = (trace.steps() == 0 || worst <= slack) && reached;
    Ok(DecayReport {
        pass,
        worst_index,
        worst_violation: if trace.steps() == 0 { 0.0 } else { worst },
        final_residual: trace.final_residual(),
        reached_tolerance: reached,
    })
}
