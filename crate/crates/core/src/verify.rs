//! Built-in verification suites over a fixed mapping zoo and parameter
//! grids. Each suite checks one family of properties at pinned tolerances
//! and reports one line per check; the aggregate is deterministic for a
//! given seed.

use serde::Serialize;

use crate::conefit::{fit_sgh_cone, ConeFitOptions, ConeFitOutcome};
use crate::domain::{ConvexDomain, DomainKind};
use crate::error::{Error, Result};
use crate::hybrid::{check_membership, named_class, sgh_residual, validate_conditions, SghParams};
use crate::iteration::{
    fejer_check, iterate, residual_decay_check, Schedule, Schedules, Scheme, StopReason, StopRule,
};
use crate::mapping::{Mapping, MappingKind, SquareMatrix};
use crate::modulus::{estimate_g, is_convex_nondecreasing, validate_modulus, ModulusPlan};
use crate::properties::{
    check_firmly_nonexpansive, check_quasi_nonexpansive, demiclosedness_probe,
    firmly_ne_embedding_params, orbit_boundedness_probe, picard_orbit, DemiGenerator, Verdict,
};
use crate::sampling::{sample_pairs, sample_points, SamplePlan};
use crate::space::{self, duality_gap, duality_map, norm_sq, pairing, xu_gap, SpaceSpec, Vector};

pub const SUITE_NAMES: &[&str] = &[
    "duality",
    "uniform-convexity",
    "quasi-nonexpansive",
    "firm-embedding",
    "orbit-boundedness",
    "demiclosedness",
    "ishikawa-convergence",
    "cone-fit",
    "negative-controls",
];

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    /// Worst measured quantity for the check (margin, excess, or error).
    pub measure: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<CheckLine>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AggregateReport {
    pub seed: u64,
    pub all_pass: bool,
    pub suites: Vec<SuiteReport>,
}

fn finish(suite: &str, checks: Vec<CheckLine>) -> SuiteReport {
    SuiteReport {
        suite: suite.to_string(),
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

/// One mapping of the built-in zoo with a canonical starting point.
pub struct ZooEntry {
    pub name: &'static str,
    pub mapping: Mapping,
    pub x0: Vector,
    /// Analytically firmly nonexpansive (identity, constants, Hilbert
    /// projections); these feed the embedding suite.
    pub firmly_nonexpansive: bool,
}

fn entry(
    name: &'static str,
    domain: ConvexDomain,
    kind: MappingKind,
    fps: &[Vec<f64>],
    x0: Vec<f64>,
    firmly: bool,
    seed: u64,
) -> Result<ZooEntry> {
    let space = domain.space();
    let fixed_points = fps
        .iter()
        .map(|c| Vector::new(space, c.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mapping = Mapping::new(
        domain,
        kind,
        fixed_points,
        &SamplePlan::new(1000, seed ^ 0xA5A5),
    )?;
    let x0 = Vector::new(space, x0)?;
    Ok(ZooEntry {
        name,
        mapping,
        x0,
        firmly_nonexpansive: firmly,
    })
}

/// The condition-satisfying zoo: every entry is nonexpansive (so a class
/// member under the canonical parameters) with verified fixed points.
pub fn builtin_zoo(seed: u64) -> Result<Vec<ZooEntry>> {
    let line = SpaceSpec::new(1, 2.0)?;
    let plane = SpaceSpec::new(2, 2.0)?;
    let plane3 = SpaceSpec::new(2, 3.0)?;

    Ok(vec![
        entry(
            "identity-ball",
            ConvexDomain::ball(plane, 2.0)?,
            MappingKind::Identity,
            &[vec![0.3, -0.4]],
            vec![1.5, -0.5],
            true,
            seed,
        )?,
        entry(
            "constant-box",
            ConvexDomain::bounded_box(plane, vec![-1.0, -1.0], vec![1.0, 1.0])?,
            MappingKind::Constant {
                value: Vector::new(plane, vec![0.25, -0.5])?,
            },
            &[vec![0.25, -0.5]],
            vec![-0.75, 0.8],
            true,
            seed,
        )?,
        entry(
            "halving-ball",
            ConvexDomain::ball(plane, 2.0)?,
            MappingKind::Scaling { factor: 0.5 },
            &[vec![0.0, 0.0]],
            vec![1.5, 1.0],
            false,
            seed,
        )?,
        entry(
            "neg-third-ball-p3",
            ConvexDomain::ball(plane3, 2.0)?,
            MappingKind::Scaling { factor: -1.0 / 3.0 },
            &[vec![0.0, 0.0]],
            vec![1.0, -0.8],
            false,
            seed,
        )?,
        entry(
            "negation-ball-p3",
            ConvexDomain::ball(plane3, 1.5)?,
            MappingKind::Negation,
            &[vec![0.0, 0.0]],
            vec![0.5, -0.3],
            false,
            seed,
        )?,
        entry(
            "negation-line",
            ConvexDomain::whole_space(line),
            MappingKind::Negation,
            &[vec![0.0]],
            vec![1.0],
            false,
            seed,
        )?,
        entry(
            "affine-contraction-plane",
            ConvexDomain::whole_space(plane),
            MappingKind::Affine {
                matrix: SquareMatrix::from_rows(&[vec![0.5, 0.1], vec![0.0, 0.3]])?,
                offset: Vector::new(plane, vec![0.2, -0.1])?,
            },
            &[vec![2.6 / 7.0, -1.0 / 7.0]],
            vec![3.0, -2.0],
            false,
            seed,
        )?,
        entry(
            "project-ball",
            ConvexDomain::whole_space(plane),
            MappingKind::MetricProjection {
                target: ConvexDomain::ball(plane, 1.0)?,
            },
            &[vec![0.0, 0.0], vec![0.6, 0.8]],
            vec![3.0, 4.0],
            true,
            seed,
        )?,
        entry(
            "project-box",
            ConvexDomain::whole_space(plane),
            MappingKind::MetricProjection {
                target: ConvexDomain::bounded_box(plane, vec![0.0, 0.0], vec![1.0, 1.0])?,
            },
            &[vec![0.5, 0.5], vec![1.0, 1.0]],
            vec![2.0, -1.0],
            true,
            seed,
        )?,
    ])
}

/// Known violator: doubling expands distances and fails every
/// condition-satisfying class.
pub fn doubling_control(seed: u64) -> Result<ZooEntry> {
    let line = SpaceSpec::new(1, 2.0)?;
    entry(
        "doubling-line",
        ConvexDomain::whole_space(line),
        MappingKind::Scaling { factor: 2.0 },
        &[vec![0.0]],
        vec![1.0],
        false,
        seed,
    )
}

/// Fixed-point-free control: translation by one.
pub fn shift_control(seed: u64) -> Result<ZooEntry> {
    let line = SpaceSpec::new(1, 2.0)?;
    entry(
        "shift-line",
        ConvexDomain::whole_space(line),
        MappingKind::Affine {
            matrix: SquareMatrix::diagonal(&[1.0]),
            offset: Vector::new(line, vec![1.0])?,
        },
        &[],
        vec![0.0],
        false,
        seed,
    )
}

pub fn embedding_grid() -> Vec<(f64, f64)> {
    let values = [0.0, 0.5, 1.0, 2.0];
    let mut grid = Vec::new();
    for z in values {
        for e in values {
            if z + e > 0.0 {
                grid.push((z, e));
            }
        }
    }
    grid
}

/// Named classes plus the embedding grid.
fn params_grid() -> Vec<(String, SghParams)> {
    let mut grid: Vec<(String, SghParams)> = ["nonexpansive", "nonspreading", "hybrid"]
        .iter()
        .map(|n| (n.to_string(), named_class(n).unwrap()))
        .collect();
    for (z, e) in embedding_grid() {
        grid.push((
            format!("embed(z={z},e={e})"),
            firmly_ne_embedding_params(z, e).unwrap(),
        ));
    }
    grid
}

/// Independent feasibility cross-check: scan the parameter box on a grid and
/// evaluate the class inequality directly on every sample pair. Entirely
/// separate from the linear-programming route.
pub fn grid_search_sgh(
    mapping: &Mapping,
    samples: &[(Vector, Vector)],
    bound: f64,
    resolution: f64,
    require_conditions: bool,
) -> Result<Option<SghParams>> {
    let steps = (2.0 * bound / resolution).round() as i64;
    let axis: Vec<f64> = (0..=steps).map(|k| -bound + k as f64 * resolution).collect();
    for &alpha in &axis {
        for &beta in &axis {
            if require_conditions && (alpha + beta <= 0.0 || beta > 0.0) {
                continue;
            }
            for &gamma in &axis {
                if require_conditions && alpha + 2.0 * beta + gamma < 0.0 {
                    continue;
                }
                'delta: for &delta in &axis {
                    if delta < 0.0 {
                        continue;
                    }
                    let p = SghParams { alpha, beta, gamma, delta };
                    for (x, y) in samples {
                        if sgh_residual(mapping, p, x, y)? > 0.0 {
                            continue 'delta;
                        }
                    }
                    return Ok(Some(p));
                }
            }
        }
    }
    Ok(None)
}

fn suite_duality(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    for n in [1usize, 2, 8] {
        for p in [1.5, 2.0, 3.0, 4.0] {
            let space = SpaceSpec::new(n, p)?;
            let domain = ConvexDomain::whole_space(space);
            let plan = SamplePlan::new(10_000, seed ^ (n as u64) << 8 ^ p.to_bits());
            let mut min_margin = f64::INFINITY;
            let mut max_pairing_err = 0.0_f64;
            for (x, y) in sample_pairs(&domain, &plan)? {
                let scale = 1.0 + norm_sq(&x) + norm_sq(&y);
                let margin = duality_gap(&x, &y)? / scale;
                if margin < min_margin {
                    min_margin = margin;
                }
                let j = duality_map(&x);
                let err = (pairing(&x, &j)? - norm_sq(&x)).abs() / (1.0 + norm_sq(&x));
                max_pairing_err = max_pairing_err.max(err);
            }
            checks.push(CheckLine {
                name: format!("duality-gap n={n} p={p}"),
                pass: min_margin >= -1e-10,
                measure: min_margin,
            });
            checks.push(CheckLine {
                name: format!("pairing-identity n={n} p={p}"),
                pass: max_pairing_err <= 1e-10,
                measure: max_pairing_err,
            });
        }
    }
    Ok(finish("duality", checks))
}

fn suite_uniform_convexity(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();

    // Hilbert identity: gap is zero with the exact modulus s^2
    let plane = SpaceSpec::new(2, 2.0)?;
    let ball = ConvexDomain::ball(plane, 1.0)?;
    let mut rng_plan = SamplePlan::new(10_000, seed ^ 0xC0);
    rng_plan.extent = 1.0;
    let mut worst = 0.0_f64;
    let pts = sample_points(&ball, &rng_plan)?;
    let mut t_seq = crate::sampling::rng(seed ^ 0xC1);
    use rand::Rng;
    for pair in pts.chunks(2) {
        if pair.len() < 2 {
            break;
        }
        let t = t_seq.gen_range(0.0..=1.0);
        let gap = xu_gap(&pair[0], &pair[1], t, |s| s * s)?;
        worst = worst.max(gap.abs());
    }
    checks.push(CheckLine {
        name: "hilbert-gap-identity p=2".into(),
        pass: worst <= 1e-12,
        measure: worst,
    });

    // fitted moduli, train/validate split by seed
    for p in [1.5, 3.0, 4.0] {
        let space = SpaceSpec::new(2, p)?;
        let plan = ModulusPlan {
            samples: 20_000,
            repair_rounds: 3,
            seed: seed ^ p.to_bits(),
            safety: 0.85,
        };
        let g = estimate_g(space, 1.0, &plan)?;
        let min_gap = validate_modulus(space, 1.0, &g, 10_000, seed ^ p.to_bits() ^ 0xFEED)?;
        checks.push(CheckLine {
            name: format!("fitted-modulus-validates p={p}"),
            pass: min_gap >= -1e-9,
            measure: min_gap,
        });
        checks.push(CheckLine {
            name: format!("fitted-modulus-shape p={p}"),
            pass: is_convex_nondecreasing(&g) && g.eval(0.0) == 0.0,
            measure: g.nodes().last().map(|n| n.1).unwrap_or(0.0),
        });
    }
    Ok(finish("uniform-convexity", checks))
}

fn suite_quasi_nonexpansive(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let zoo = builtin_zoo(seed)?;
    let grid = params_grid();
    let tol = 1e-9;
    let mut applicable = 0usize;
    for e in &zoo {
        for (pname, params) in &grid {
            let cond = validate_conditions(*params);
            if !(cond.c1 && cond.c2 && cond.c4) {
                continue;
            }
            let mem = check_membership(&e.mapping, *params, &SamplePlan::new(1000, seed ^ 0x11), tol)?;
            if !mem.member || e.mapping.fixed_points().is_empty() {
                continue;
            }
            applicable += 1;
            let rep = check_quasi_nonexpansive(
                &e.mapping,
                e.mapping.fixed_points(),
                &SamplePlan::new(1000, seed ^ 0x12),
                tol,
            )?;
            checks.push(CheckLine {
                name: format!("{} + {pname}: quasi-nonexpansive", e.name),
                pass: rep.verdict == Verdict::Pass,
                measure: rep.max_excess,
            });
        }
    }
    checks.push(CheckLine {
        name: "applicable member/condition combos".into(),
        pass: applicable >= 9,
        measure: applicable as f64,
    });

    // negative control: doubling fails membership under the conditions
    let doubling = doubling_control(seed)?;
    let mem = check_membership(
        &doubling.mapping,
        named_class("nonexpansive")?,
        &SamplePlan::new(1000, seed ^ 0x13),
        tol,
    )?;
    checks.push(CheckLine {
        name: "doubling-line rejected as nonexpansive".into(),
        pass: !mem.member,
        measure: mem.max_violation,
    });
    Ok(finish("quasi-nonexpansive", checks))
}

fn suite_firm_embedding(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let zoo = builtin_zoo(seed)?;
    let grid = embedding_grid();
    let tol = 1e-9;

    // the embedding parameters always satisfy the conditions, exactly
    let mut exact = true;
    for &(z, e) in &grid {
        let p = firmly_ne_embedding_params(z, e)?;
        exact &= p.alpha + 2.0 * p.beta + p.gamma == 0.0 && p.alpha + p.beta == z + e;
        exact &= validate_conditions(p).all();
    }
    checks.push(CheckLine {
        name: "embedding conditions exact on grid".into(),
        pass: exact,
        measure: 0.0,
    });

    for e in zoo.iter().filter(|e| e.firmly_nonexpansive) {
        let firm = check_firmly_nonexpansive(&e.mapping, &SamplePlan::new(1000, seed ^ 0x21), tol)?;
        checks.push(CheckLine {
            name: format!("{}: firmly nonexpansive", e.name),
            pass: firm.verdict == Verdict::Pass,
            measure: firm.max_excess,
        });
        let mut worst = f64::NEG_INFINITY;
        let mut all_member = true;
        for &(z, eta) in &grid {
            let params = firmly_ne_embedding_params(z, eta)?;
            let mem =
                check_membership(&e.mapping, params, &SamplePlan::new(1000, seed ^ 0x22), tol)?;
            all_member &= mem.member;
            worst = worst.max(mem.max_violation);
        }
        checks.push(CheckLine {
            name: format!("{}: class member across embedding grid", e.name),
            pass: all_member,
            measure: worst,
        });
    }
    Ok(finish("firm-embedding", checks))
}

fn suite_orbit_boundedness(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let zoo = builtin_zoo(seed)?;
    for e in &zoo {
        if matches!(e.mapping.domain().kind(), DomainKind::FinitePointSet { .. }) {
            continue;
        }
        let starts = sample_points(e.mapping.domain(), &SamplePlan::new(50, seed ^ 0x31))?;
        let mut worst_excess = f64::NEG_INFINITY;
        for x0 in &starts {
            let (orbit, exited) = picard_orbit(&e.mapping, x0, 300)?;
            if exited {
                worst_excess = f64::INFINITY;
                continue;
            }
            for q in e.mapping.fixed_points() {
                let d0 = space::dist(x0, q)?;
                for x in &orbit {
                    worst_excess = worst_excess.max(space::dist(x, q)? - d0);
                }
            }
        }
        checks.push(CheckLine {
            name: format!("{}: orbits stay within start distance", e.name),
            pass: worst_excess <= 1e-9,
            measure: worst_excess,
        });
    }

    // fixed-point-free control exceeds any bound on a computable horizon
    let shift = shift_control(seed)?;
    let bound = 1000.0;
    let horizon = bound as usize + 3;
    let rep = orbit_boundedness_probe(&shift.mapping, &shift.x0, horizon, bound)?;
    checks.push(CheckLine {
        name: "shift-line orbit exceeds bound".into(),
        pass: rep.verdict == Verdict::Fail && rep.sup_norm > bound,
        measure: rep.sup_norm,
    });
    Ok(finish("orbit-boundedness", checks))
}

fn suite_demiclosedness(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let zoo = builtin_zoo(seed)?;
    let tol = 1e-10;
    for e in &zoo {
        if matches!(e.mapping.domain().kind(), DomainKind::FinitePointSet { .. }) {
            continue;
        }
        let gen = DemiGenerator::default_ishikawa(e.x0.clone());
        let rep = demiclosedness_probe(&e.mapping, &gen, tol)?;
        checks.push(CheckLine {
            name: format!("{}: limit of vanishing-residual sequence is fixed", e.name),
            pass: rep.verdict == Verdict::Pass && rep.limit_residual <= 1e-9,
            measure: rep.limit_residual,
        });
    }
    Ok(finish("demiclosedness", checks))
}

fn suite_ishikawa_convergence(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let zoo = builtin_zoo(seed)?;
    for e in &zoo {
        if matches!(e.mapping.domain().kind(), DomainKind::FinitePointSet { .. }) {
            continue;
        }
        for c in [0.25, 0.5, 0.75] {
            let schedules = Schedules {
                lambda: Some(Schedule::Constant(c)),
                gamma: Some(Schedule::Constant(c)),
                ..Default::default()
            };
            let trace = iterate(
                &e.mapping,
                &e.x0,
                Scheme::Ishikawa,
                &schedules,
                StopRule { residual_tol: 1e-10, max_iter: 10_000 },
            )?;
            let converged = trace.stop_reason == StopReason::ResidualTolerance;
            checks.push(CheckLine {
                name: format!("{} c={c}: residual reaches 1e-10", e.name),
                pass: converged,
                measure: trace.final_residual(),
            });

            let mut fejer_ok = true;
            let mut fejer_worst = f64::NEG_INFINITY;
            for q in e.mapping.fixed_points() {
                let slack = 1e-12 * (1.0 + space::dist(&e.x0, q)?);
                let rep = fejer_check(&trace, q, slack)?;
                fejer_ok &= rep.pass;
                fejer_worst = fejer_worst.max(rep.worst_violation);
            }
            checks.push(CheckLine {
                name: format!("{} c={c}: distances nonincreasing", e.name),
                pass: fejer_ok,
                measure: fejer_worst,
            });

            if e.mapping.domain().space().p == 2.0 {
                let mut decay_ok = true;
                let mut decay_worst = f64::NEG_INFINITY;
                for q in e.mapping.fixed_points() {
                    let rep = residual_decay_check(&trace, q, c, |s| s * s, 1e-9)?;
                    decay_ok &= rep.pass;
                    decay_worst = decay_worst.max(rep.worst_violation);
                }
                checks.push(CheckLine {
                    name: format!("{} c={c}: per-step descent inequality", e.name),
                    pass: decay_ok,
                    measure: decay_worst,
                });
            }
        }
    }

    // closed-form oracle: negation with c = 1/2 halves each step
    let line = SpaceSpec::new(1, 2.0)?;
    let neg = Mapping::new(
        ConvexDomain::whole_space(line),
        MappingKind::Negation,
        vec![Vector::zero(line)],
        &SamplePlan::new(100, seed ^ 0x41),
    )?;
    let x0 = Vector::new(line, vec![1.0])?;
    let schedules = Schedules {
        lambda: Some(Schedule::Constant(0.5)),
        gamma: Some(Schedule::Constant(0.5)),
        ..Default::default()
    };
    let trace = iterate(
        &neg,
        &x0,
        Scheme::Ishikawa,
        &schedules,
        StopRule { residual_tol: 1e-13, max_iter: 100 },
    )?;
    let mut worst_rel = 0.0_f64;
    let upto = trace.iterates.len().min(41);
    for (n, x) in trace.iterates.iter().take(upto).enumerate() {
        let expected = 2.0_f64.powi(-(n as i32));
        let rel = (space::norm(x) - expected).abs() / expected;
        worst_rel = worst_rel.max(rel);
    }
    checks.push(CheckLine {
        name: "negation c=0.5 matches the halving closed form (n <= 40)".into(),
        pass: upto >= 41 && worst_rel <= 1e-12,
        measure: worst_rel,
    });
    Ok(finish("ishikawa-convergence", checks))
}

fn suite_cone_fit(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let line = SpaceSpec::new(1, 2.0)?;

    let feasible_cases = [
        ("identity-line", MappingKind::Identity),
        ("negation-line", MappingKind::Negation),
    ];
    for (name, kind) in feasible_cases {
        let mapping = Mapping::new(
            ConvexDomain::whole_space(line),
            kind,
            vec![],
            &SamplePlan::new(100, seed ^ 0x51),
        )?;
        let samples = sample_pairs(mapping.domain(), &SamplePlan::new(200, seed ^ 0x52))?;
        let outcome = fit_sgh_cone(&mapping, &samples, &ConeFitOptions::default())?;
        let (pass, measure) = match outcome {
            ConeFitOutcome::Feasible { params, radius } => {
                let mem =
                    check_membership(&mapping, params, &SamplePlan::new(200, seed ^ 0x52), 1e-9)?;
                (mem.member, radius)
            }
            ConeFitOutcome::Infeasible => (false, f64::NAN),
        };
        checks.push(CheckLine {
            name: format!("{name}: fitted parameters re-pass membership"),
            pass,
            measure,
        });
    }

    // infeasible control, cross-checked by the independent grid search
    let doubling = doubling_control(seed)?;
    let mut samples = vec![(
        Vector::new(line, vec![1.0])?,
        Vector::new(line, vec![0.0])?,
    )];
    samples.extend(sample_pairs(doubling.mapping.domain(), &SamplePlan::new(50, seed ^ 0x53))?);
    let opts = ConeFitOptions {
        impose_c1: true,
        impose_c3: true,
        bound: 10.0,
    };
    let lp_infeasible = matches!(
        fit_sgh_cone(&doubling.mapping, &samples, &opts)?,
        ConeFitOutcome::Infeasible
    );
    let grid_point = grid_search_sgh(&doubling.mapping, &samples, 10.0, 0.5, true)?;
    checks.push(CheckLine {
        name: "doubling-line with conditions: solver reports infeasible".into(),
        pass: lp_infeasible,
        measure: if lp_infeasible { 0.0 } else { 1.0 },
    });
    checks.push(CheckLine {
        name: "doubling-line with conditions: grid search finds no point".into(),
        pass: grid_point.is_none(),
        measure: if grid_point.is_none() { 0.0 } else { 1.0 },
    });
    Ok(finish("cone-fit", checks))
}

fn suite_negative_controls(seed: u64) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let doubling = doubling_control(seed)?;
    let tol = 1e-9;

    let mem = check_membership(
        &doubling.mapping,
        named_class("nonexpansive")?,
        &SamplePlan::new(1000, seed ^ 0x61),
        tol,
    )?;
    checks.push(CheckLine {
        name: "doubling-line: membership violation detected".into(),
        pass: !mem.member && mem.max_violation > 1.0,
        measure: mem.max_violation,
    });

    let quasi = check_quasi_nonexpansive(
        &doubling.mapping,
        doubling.mapping.fixed_points(),
        &SamplePlan::new(1000, seed ^ 0x62),
        tol,
    )?;
    checks.push(CheckLine {
        name: "doubling-line: quasi-nonexpansiveness fails".into(),
        pass: quasi.verdict == Verdict::Fail,
        measure: quasi.max_excess,
    });

    // hypothesis-violating schedule is flagged analytically
    let lam = Schedule::HarmonicOffset { base: 0.0, amplitude: 1.0 };
    let verdicts = crate::iteration::validate_schedule(&lam, crate::iteration::ScheduleRole::Lambda);
    checks.push(CheckLine {
        name: "lambda_n = 1/(n+1): liminf hypothesis flagged".into(),
        pass: !verdicts.ok_for_role,
        measure: verdicts.lower_bound,
    });
    Ok(finish("negative-controls", checks))
}

/// Run one suite by name, or all of them.
pub fn run_suites(selector: Option<&str>, seed: u64) -> Result<AggregateReport> {
    let names: Vec<&str> = match selector {
        None | Some("all") => SUITE_NAMES.to_vec(),
        Some(name) => {
            if !SUITE_NAMES.contains(&name) {
                return Err(Error::Config(format!(
                    "unknown suite {name:?}; available: {}",
                    SUITE_NAMES.join(", ")
                )));
            }
            vec![name]
        }
    };
    let mut suites = Vec::new();
    for name in names {
        let report = match name {
            "duality" => suite_duality(seed)?,
            "uniform-convexity" => suite_uniform_convexity(seed)?,
            "quasi-nonexpansive" => suite_quasi_nonexpansive(seed)?,
            "firm-embedding" => suite_firm_embedding(seed)?,
            "orbit-boundedness" => suite_orbit_boundedness(seed)?,
            "demiclosedness" => suite_demiclosedness(seed)?,
            "ishikawa-convergence" => suite_ishikawa_convergence(seed)?,
            "cone-fit" => suite_cone_fit(seed)?,
            "negative-controls" => suite_negative_controls(seed)?,
            _ => unreachable!("suite list is exhaustive"),
        };
        suites.push(report);
    }
    Ok(AggregateReport {
        seed,
        all_pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_rejected() {
        assert!(matches!(run_suites(Some("nope"), 1), Err(Error::Config(_))));
    }

    #[test]
    fn negative_controls_pass() {
        let rep = run_suites(Some("negative-controls"), 2024).unwrap();
        assert!(rep.all_pass, "{rep:?}");
    }

    #[test]
    fn cone_fit_suite_passes() {
        let rep = run_suites(Some("cone-fit"), 2024).unwrap();
        assert!(rep.all_pass, "{rep:?}");
    }
}
