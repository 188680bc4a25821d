//! Linear-feasibility fitting of class parameters. The class residual is
//! linear in (alpha, beta, gamma, delta), so each sampled pair contributes
//! one halfspace `residual <= 0`. The fit searches the slice alpha + beta = 1
//! (every condition-satisfying member of the cone has a representative there,
//! since alpha + beta > 0) and returns the Chebyshev center of the resulting
//! polytope restricted to a bounding box, or reports infeasibility.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hybrid::SghParams;
use crate::mapping::Mapping;
use crate::space::{self, Vector};

#[derive(Clone, Copy, Debug)]
pub struct ConeFitOptions {
    /// Also require alpha + 2 beta + gamma >= 0.
    pub impose_c1: bool,
    /// Also require beta <= 0.
    pub impose_c3: bool,
    /// Half-width of the bounding box on each parameter.
    pub bound: f64,
}

impl Default for ConeFitOptions {
    fn default() -> Self {
        ConeFitOptions {
            impose_c1: false,
            impose_c3: false,
            bound: 10.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum ConeFitOutcome {
    Feasible {
        params: SghParams,
        /// Chebyshev radius of the fitted polytope slice; zero means the
        /// feasible set is flat but nonempty.
        radius: f64,
    },
    Infeasible,
}

/// Linear coefficients (a, b, c, d) of the residual at one pair, so that
/// residual = a*alpha + b*beta + c*gamma + d*delta.
pub fn residual_coefficients(
    mapping: &Mapping,
    x: &Vector,
    y: &Vector,
) -> Result<(f64, f64, f64, f64)> {
    let tx = mapping.evaluate(x)?;
    let ty = mapping.evaluate(y)?;
    let a = space::dist_sq(&tx, &ty)?;
    let b = space::dist_sq(x, &ty)? + space::dist_sq(&tx, y)?;
    let c = space::dist_sq(x, y)?;
    let d = space::dist_sq(x, &tx)? + space::dist_sq(y, &ty)?;
    Ok((a, b, c, d))
}

/// Solve {residual(x_i, y_i) <= 0 for all i, alpha + beta = 1, delta >= 0}
/// plus the optional conditions, maximizing the radius of a ball inscribed
/// in the (beta, gamma, delta) slice.
pub fn fit_sgh_cone(
    mapping: &Mapping,
    samples: &[(Vector, Vector)],
    opts: &ConeFitOptions,
) -> Result<ConeFitOutcome> {
    if samples.is_empty() {
        return Err(Error::Config("cone fit needs at least one sample pair".into()));
    }
    let bound = opts.bound;
    if !(bound > 0.0) {
        return Err(Error::Config("bounding box half-width must be positive".into()));
    }

    // variables: z = (beta, gamma, delta) with alpha = 1 - beta, plus the
    // inscribed radius rho
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let beta = problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let gamma = problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let delta = problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY));
    let rho = problem.add_var(1.0, (0.0, 4.0 * bound));

    // u . z + rho ||u|| <= v keeps the ball of radius rho inside the halfspace
    let mut halfspace = |u: [f64; 3], v: f64| {
        let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        problem.add_constraint(
            [(beta, u[0]), (gamma, u[1]), (delta, u[2]), (rho, nu)].as_slice(),
            ComparisonOp::Le,
            v,
        );
    };

    for (x, y) in samples {
        let (a, b, c, d) = residual_coefficients(mapping, x, y)?;
        // a(1-beta) + b beta + c gamma + d delta <= 0
        halfspace([b - a, c, d], -a);
    }

    // delta >= 0
    halfspace([0.0, 0.0, -1.0], 0.0);
    if opts.impose_c1 {
        // alpha + 2 beta + gamma >= 0 with alpha = 1 - beta: beta + gamma >= -1
        halfspace([-1.0, -1.0, 0.0], 1.0);
    }
    if opts.impose_c3 {
        halfspace([1.0, 0.0, 0.0], 0.0);
    }

    // bounding box on alpha, beta, gamma, delta (alpha = 1 - beta)
    halfspace([1.0, 0.0, 0.0], bound); // beta <= bound
    halfspace([-1.0, 0.0, 0.0], bound); // beta >= -bound
    halfspace([-1.0, 0.0, 0.0], bound - 1.0); // alpha = 1 - beta <= bound
    halfspace([1.0, 0.0, 0.0], bound + 1.0); // alpha >= -bound
    halfspace([0.0, 1.0, 0.0], bound);
    halfspace([0.0, -1.0, 0.0], bound);
    halfspace([0.0, 0.0, 1.0], bound);

    match problem.solve() {
        Ok(solution) => {
            let b = *solution.var_value(beta);
            let params = SghParams::new(
                1.0 - b,
                b,
                *solution.var_value(gamma),
                *solution.var_value(delta),
            )?;
            Ok(ConeFitOutcome::Feasible {
                params,
                radius: solution.objective(),
            })
        }
        Err(microlp::Error::Infeasible) => Ok(ConeFitOutcome::Infeasible),
        Err(other) => Err(Error::Solver(format!("linear program failed: {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ConvexDomain;
    use crate::hybrid::{check_membership, named_class, sgh_residual};
    use crate::mapping::MappingKind;
    use crate::sampling::{sample_pairs, SamplePlan};
    use crate::space::SpaceSpec;

    fn line_map(kind: MappingKind) -> Mapping {
        let s = SpaceSpec::new(1, 2.0).unwrap();
        Mapping::new(
            ConvexDomain::whole_space(s),
            kind,
            vec![],
            &SamplePlan::new(100, 3),
        )
        .unwrap()
    }

    fn pairs(mapping: &Mapping, n: usize, seed: u64) -> Vec<(Vector, Vector)> {
        sample_pairs(mapping.domain(), &SamplePlan::new(n, seed)).unwrap()
    }

    #[test]
    fn identity_is_feasible_and_contains_nonexpansive() {
        let t = line_map(MappingKind::Identity);
        let s = pairs(&t, 200, 11);
        let out = fit_sgh_cone(&t, &s, &ConeFitOptions::default()).unwrap();
        let ConeFitOutcome::Feasible { params, .. } = out else {
            panic!("identity must be feasible");
        };
        // the fitted point itself satisfies the inequality on the samples
        for (x, y) in &s {
            assert!(sgh_residual(&t, params, x, y).unwrap() <= 1e-9);
        }
        // and the canonical nonexpansive point satisfies all sampled rows
        let ne = named_class("nonexpansive").unwrap();
        for (x, y) in &s {
            assert!(sgh_residual(&t, ne, x, y).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn negation_is_feasible() {
        let t = line_map(MappingKind::Negation);
        let s = pairs(&t, 200, 12);
        let out = fit_sgh_cone(&t, &s, &ConeFitOptions::default()).unwrap();
        let ConeFitOutcome::Feasible { params, .. } = out else {
            panic!("negation must be feasible");
        };
        let rep = check_membership(&t, params, &SamplePlan::new(200, 12), 1e-9).unwrap();
        assert!(rep.member, "fitted params re-pass membership: {rep:?}");
    }

    #[test]
    fn doubling_with_conditions_is_infeasible() {
        let t = line_map(MappingKind::Scaling { factor: 2.0 });
        let s2 = SpaceSpec::new(1, 2.0).unwrap();
        let mut s = pairs(&t, 50, 13);
        s.push((
            Vector::new(s2, vec![1.0]).unwrap(),
            Vector::new(s2, vec![0.0]).unwrap(),
        ));
        let opts = ConeFitOptions {
            impose_c1: true,
            impose_c3: true,
            bound: 10.0,
        };
        let out = fit_sgh_cone(&t, &s, &opts).unwrap();
        assert!(matches!(out, ConeFitOutcome::Infeasible));
    }

    #[test]
    fn empty_samples_error() {
        let t = line_map(MappingKind::Identity);
        assert!(matches!(
            fit_sgh_cone(&t, &[], &ConeFitOptions::default()),
            Err(Error::Config(_))
        ));
    }
}
