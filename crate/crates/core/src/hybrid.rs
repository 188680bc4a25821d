//! The four-parameter symmetric generalized hybrid inequality: a self-map T
//! belongs to the (alpha, beta, gamma, delta) class when
//!
//!   alpha ||Tx-Ty||^2 + beta (||x-Ty||^2 + ||Tx-y||^2) + gamma ||x-y||^2
//!     + delta (||x-Tx||^2 + ||y-Ty||^2)  <=  0
//!
//! for every pair x, y of domain points. Membership here is sample-based
//! with worst-witness reporting; seeded plans make reports reproducible.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::sampling::{self, SamplePlan};
use crate::space::{self, Vector};

/// The class quadruple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SghParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl SghParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let p = SghParams { alpha, beta, gamma, delta };
        if [alpha, beta, gamma, delta].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("class parameter".into()));
        }
        Ok(p)
    }

    pub fn scaled(&self, c: f64) -> SghParams {
        SghParams {
            alpha: c * self.alpha,
            beta: c * self.beta,
            gamma: c * self.gamma,
            delta: c * self.delta,
        }
    }
}

impl fmt::Display for SghParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.alpha, self.beta, self.gamma, self.delta
        )
    }
}

/// Classical subclasses at fixed parameter values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedClass {
    Nonexpansive,
    Nonspreading,
    Hybrid,
}

impl NamedClass {
    pub fn params(self) -> SghParams {
        match self {
            NamedClass::Nonexpansive => SghParams {
                alpha: 1.0,
                beta: 0.0,
                gamma: -1.0,
                delta: 0.0,
            },
            NamedClass::Nonspreading => SghParams {
                alpha: 2.0,
                beta: -1.0,
                gamma: 0.0,
                delta: 0.0,
            },
            NamedClass::Hybrid => SghParams {
                alpha: 3.0,
                beta: -1.0,
                gamma: -1.0,
                delta: 0.0,
            },
        }
    }
}

impl FromStr for NamedClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nonexpansive" => Ok(NamedClass::Nonexpansive),
            "nonspreading" => Ok(NamedClass::Nonspreading),
            "hybrid" => Ok(NamedClass::Hybrid),
            other => Err(Error::Config(format!("unknown class name: {other}"))),
        }
    }
}

/// Look up a named class by its CLI name.
pub fn named_class(name: &str) -> Result<SghParams> {
    Ok(NamedClass::from_str(name)?.params())
}

/// The quasi-nonexpansiveness conditions on the quadruple:
/// (1) alpha + 2 beta + gamma >= 0, (2) alpha + beta > 0, (3) beta <= 0,
/// (4) delta >= 0. The contraction ratio -(beta+gamma)/(alpha+beta) is
/// defined when (2) holds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConditionReport {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
    pub contraction_ratio: Option<f64>,
}

impl ConditionReport {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3 && self.c4
    }
}

pub fn validate_conditions(params: SghParams) -> ConditionReport {
    let SghParams { alpha, beta, gamma, delta } = params;
    let c2 = alpha + beta > 0.0;
    ConditionReport {
        c1: alpha + 2.0 * beta + gamma >= 0.0,
        c2,
        c3: beta <= 0.0,
        c4: delta >= 0.0,
        contraction_ratio: c2.then(|| -(beta + gamma) / (alpha + beta)),
    }
}

/// Membership verdict over a sampled pair set.
#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub max_violation: f64,
    pub witness: Option<(Vector, Vector)>,
    pub pairs_checked: usize,
    pub tol: f64,
    pub member: bool,
}

/// Residual of the class inequality at one pair. Membership means the
/// residual is nonpositive for all pairs. The summation order is fixed so
/// the residual is exactly symmetric in (x, y).
pub fn sgh_residual(mapping: &Mapping, params: SghParams, x: &Vector, y: &Vector) -> Result<f64> {
    let tx = mapping.evaluate(x)?;
    let ty = mapping.evaluate(y)?;
    let a = space::dist_sq(&tx, &ty)?;
    let b = space::dist_sq(x, &ty)? + space::dist_sq(&tx, y)?;
    let c = space::dist_sq(x, y)?;
    let d = space::dist_sq(x, &tx)? + space::dist_sq(y, &ty)?;
    Ok(params.alpha * a + params.beta * b + params.gamma * c + params.delta * d)
}

/// Evaluate the residual on every sampled pair and report the worst witness.
/// Deterministic under the plan's seed.
pub fn check_membership(
    mapping: &Mapping,
    params: SghParams,
    plan: &SamplePlan,
    tol: f64,
) -> Result<MembershipReport> {
    let pairs = sampling::sample_pairs(mapping.domain(), plan)?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut witness = None;
    for (x, y) in &pairs {
        let r = sgh_residual(mapping, params, x, y)?;
        if r > max_violation {
            max_violation = r;
            witness = Some((x.clone(), y.clone()));
        }
    }
    Ok(MembershipReport {
        max_violation,
        witness,
        pairs_checked: pairs.len(),
        tol,
        member: max_violation <= tol,
    })
}
