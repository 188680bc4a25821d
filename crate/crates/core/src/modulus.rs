//! Empirical estimation of a uniform-convexity modulus g for a ball of
//! radius r: a nondecreasing convex piecewise-linear function with g(0) = 0
//! such that the convexity gap
//!
//!   t||x||^2 + (1-t)||y||^2 - ||tx + (1-t)y||^2  >=  t(1-t) g(||x - y||)
//!
//! holds on sampled triples (x, y, t) with ||x||, ||y|| <= r. For p = 2 the
//! exact modulus is s^2; for other exponents g is fitted from samples.
//!
//! The fit caps the convexity ratio at each sampled distance (including the
//! analytic t -> 0/1 endpoint limits, which are the duality gaps), mixes in
//! structured extremal pairs (sign-flipped and antipodal sphere points, the
//! configurations that pinch the modulus), takes the lower convex hull, and
//! then repairs the hull against fresh draws until no sampled violation
//! remains. A multiplicative safety shrink leaves headroom for samples the
//! plan never saw.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sampling;
use crate::space::{self, SpaceSpec, Vector};

/// Sampling plan for [`estimate_g`].
#[derive(Clone, Copy, Debug)]
pub struct ModulusPlan {
    /// Number of random (x, y) pairs per round.
    pub samples: usize,
    /// Validate-and-repair rounds after the initial fit.
    pub repair_rounds: usize,
    pub seed: u64,
    /// Multiplicative shrink applied to every cap. Values below 1 leave
    /// headroom so the modulus stays valid on fresh samples.
    pub safety: f64,
}

impl Default for ModulusPlan {
    fn default() -> Self {
        ModulusPlan {
            samples: 20_000,
            repair_rounds: 3,
            seed: 7,
            safety: 0.85,
        }
    }
}

/// Nondecreasing convex piecewise-linear function through (0, 0), extended
/// constantly past the last node.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    nodes: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Config("piecewise-linear needs at least one node".into()));
        }
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config("piecewise-linear nodes must be strictly increasing".into()));
        }
        Ok(PiecewiseLinear { nodes })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn eval(&self, s: f64) -> f64 {
        let nodes = &self.nodes;
        if s <= nodes[0].0 {
            if nodes[0].0 == 0.0 {
                return nodes[0].1;
            }
            return nodes[0].1 * (s / nodes[0].0).max(0.0);
        }
        let last = nodes[nodes.len() - 1];
        if s >= last.0 {
            return last.1;
        }
        // first node with abscissa >= s
        let hi = nodes.partition_point(|n| n.0 < s);
        let (s0, v0) = nodes[hi - 1];
        let (s1, v1) = nodes[hi];
        v0 + (v1 - v0) * (s - s0) / (s1 - s0)
    }
}

/// Lower convex hull of a point cloud (monotone chain). Duplicate abscissae
/// keep the lowest ordinate.
fn lower_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|next, prev| {
        if next.0 == prev.0 {
            prev.1 = prev.1.min(next.1);
            true
        } else {
            false
        }
    });
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for pt in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // pop b when it lies on or above the chord a -> pt
            if (b.1 - a.1) * (pt.0 - a.0) >= (pt.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    hull
}

/// Smallest capped value of the convexity ratio at one pair: two interior t
/// draws plus the analytic endpoint limits (the duality gaps both ways).
fn pair_cap(x: &Vector, y: &Vector, rng: &mut ChaCha8Rng) -> f64 {
    let mut cap = f64::INFINITY;
    for _ in 0..2 {
        let t = rng.gen_range(0.05..0.95);
        let num = t * space::norm_sq(x) + (1.0 - t) * space::norm_sq(y)
            - space::norm_sq(&x.combine(y, t, 1.0 - t).expect("same space"));
        cap = cap.min(num / (t * (1.0 - t)));
    }
    cap = cap.min(space::duality_gap(x, y).expect("same space"));
    cap = cap.min(space::duality_gap(y, x).expect("same space"));
    cap.max(0.0)
}

fn sphere_point(space: SpaceSpec, rho: f64, rng: &mut ChaCha8Rng) -> Vector {
    let x = sampling::ball_point(space, 1.0, rng);
    let n = space::norm(&x);
    x.scale(rho / n)
}

/// Fit a modulus for (space, r). See the module docs for the construction.
pub fn estimate_g(space: SpaceSpec, r: f64, plan: &ModulusPlan) -> Result<PiecewiseLinear> {
    if r <= 0.0 || !r.is_finite() {
        return Err(Error::Parameter(format!("radius must be positive, got {r}")));
    }
    if plan.samples == 0 {
        return Err(Error::Config("degenerate modulus grid: no samples".into()));
    }
    if !(plan.safety > 0.0 && plan.safety <= 1.0) {
        return Err(Error::Config(format!("safety must lie in (0,1], got {}", plan.safety)));
    }

    let mut rng = sampling::rng(plan.seed);
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let add_pair = |x: &Vector, y: &Vector, rng: &mut ChaCha8Rng, pts: &mut Vec<(f64, f64)>| {
        let s = space::dist(x, y).expect("same space");
        if s > 0.0 {
            pts.push((s, plan.safety * pair_cap(x, y, rng)));
        }
    };

    for _ in 0..plan.samples {
        let x = sampling::ball_point(space, r, &mut rng);
        let y = sampling::ball_point(space, r, &mut rng);
        add_pair(&x, &y, &mut rng, &mut pts);
    }
    // sign-flip pairs on spheres: the extremal configurations for lp moduli
    for _ in 0..plan.samples / 2 {
        let rho = r * rng.gen_range(0.25_f64..1.0);
        let x = sphere_point(space, rho, &mut rng);
        let i = rng.gen_range(0..space.n);
        let mut coords = x.coords().to_vec();
        coords[i] = -coords[i];
        let y = Vector::new(space, coords).expect("finite coords");
        add_pair(&x, &y, &mut rng, &mut pts);
    }
    // antipodal pairs cover distances up to the diameter 2r
    for k in 1..=64u32 {
        let rho = r * k as f64 / 64.0;
        let x = sphere_point(space, rho, &mut rng);
        let y = x.scale(-1.0);
        add_pair(&x, &y, &mut rng, &mut pts);
    }

    let mut hull = lower_hull(pts);

    // repair: fresh draws; wherever a sample undercuts the hull, add its cap
    // as a new hull point and rebuild
    for round in 0..plan.repair_rounds {
        let g = PiecewiseLinear::new(hull.clone())?;
        let mut fresh = sampling::rng(plan.seed ^ (0xBEEF + round as u64));
        let mut new_pts: Vec<(f64, f64)> = Vec::new();
        for _ in 0..plan.samples {
            let x = sampling::ball_point(space, r, &mut fresh);
            let y = sampling::ball_point(space, r, &mut fresh);
            let s = space::dist(&x, &y)?;
            if s == 0.0 {
                continue;
            }
            let capped = plan.safety * pair_cap(&x, &y, &mut fresh);
            if capped < g.eval(s) {
                new_pts.push((s, capped));
            }
        }
        if new_pts.is_empty() {
            break;
        }
        hull.extend(new_pts);
        hull = lower_hull(hull);
    }

    PiecewiseLinear::new(hull)
}

/// Smallest xu_gap over freshly sampled triples; the modulus is valid on the
/// sample when this is above the negative tolerance.
pub fn validate_modulus(
    space: SpaceSpec,
    r: f64,
    g: &PiecewiseLinear,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Config("degenerate validation plan: no samples".into()));
    }
    let mut rng = sampling::rng(seed);
    let mut min_gap = f64::INFINITY;
    for _ in 0..samples {
        let x = sampling::ball_point(space, r, &mut rng);
        let y = sampling::ball_point(space, r, &mut rng);
        let t = rng.gen_range(0.0..=1.0);
        let gap = space::xu_gap(&x, &y, t, |s| g.eval(s))?;
        if gap < min_gap {
            min_gap = gap;
        }
    }
    Ok(min_gap)
}

/// Check convexity and monotonicity of the fitted nodes (slopes nondecreasing,
/// values nondecreasing).
pub fn is_convex_nondecreasing(g: &PiecewiseLinear) -> bool {
    let nodes = g.nodes();
    let mut prev_slope = f64::NEG_INFINITY;
    for w in nodes.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        if slope < prev_slope - 1e-12 || w[1].1 < w[0].1 - 1e-12 {
            return false;
        }
        prev_slope = slope;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_plans() {
        let s = SpaceSpec::new(2, 2.0).unwrap();
        let plan = ModulusPlan { samples: 0, ..Default::default() };
        assert!(matches!(estimate_g(s, 1.0, &plan), Err(Error::Config(_))));
        assert!(estimate_g(s, -1.0, &ModulusPlan::default()).is_err());
    }

    #[test]
    fn hilbert_fit_tracks_s_squared() {
        // p=2: the convexity ratio is exactly s^2 for every pair, so an
        // unshrunk fit must sit within 5% of s^2 at its nodes.
        let s = SpaceSpec::new(2, 2.0).unwrap();
        let plan = ModulusPlan {
            samples: 20_000,
            repair_rounds: 2,
            seed: 11,
            safety: 1.0,
        };
        let g = estimate_g(s, 1.0, &plan).unwrap();
        let mut checked = 0;
        for &(sv, v) in g.nodes() {
            if sv >= 0.1 {
                assert!(
                    (v - sv * sv).abs() <= 0.05 * sv * sv,
                    "node {sv}: fitted {v} vs exact {}",
                    sv * sv
                );
                checked += 1;
            }
        }
        assert!(checked > 10, "expected plenty of nodes, got {checked}");
    }

    #[test]
    fn g_vanishes_at_zero() {
        let s = SpaceSpec::new(2, 3.0).unwrap();
        let g = estimate_g(s, 1.0, &ModulusPlan::default()).unwrap();
        assert_eq!(g.eval(0.0), 0.0);
    }

    #[test]
    fn p4_fit_is_convex_nondecreasing() {
        let s = SpaceSpec::new(2, 4.0).unwrap();
        let g = estimate_g(s, 1.0, &ModulusPlan::default()).unwrap();
        assert!(is_convex_nondecreasing(&g));
        // sanity: nontrivial fit
        let last = g.nodes().last().unwrap();
        assert!(last.1 > 0.0);
    }

    #[test]
    fn fresh_sample_gap_nonnegative_across_exponents() {
        for (p, seed) in [(1.5, 5u64), (3.0, 6), (4.0, 7)] {
            let s = SpaceSpec::new(3, p).unwrap();
            let plan = ModulusPlan { seed, ..Default::default() };
            let g = estimate_g(s, 1.0, &plan).unwrap();
            let min_gap = validate_modulus(s, 1.0, &g, 5_000, seed ^ 0xFACE).unwrap();
            assert!(min_gap >= -1e-9, "p={p}: fresh-sample gap {min_gap}");
        }
    }

    #[test]
    fn piecewise_eval_interpolates() {
        let g = PiecewiseLinear::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 6.0)]).unwrap();
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(1.5), 4.0);
        assert_eq!(g.eval(3.0), 6.0); // constant extension
        assert!(PiecewiseLinear::new(vec![]).is_err());
        assert!(PiecewiseLinear::new(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn lower_hull_is_a_minorant_of_its_input() {
        let pts = vec![(0.0, 0.0), (1.0, 1.5), (2.0, 1.0), (3.0, 4.0), (1.5, 0.9)];
        let hull = lower_hull(pts.clone());
        let g = PiecewiseLinear::new(hull).unwrap();
        for (s, v) in pts {
            assert!(g.eval(s) <= v + 1e-15, "hull exceeds input at {s}");
        }
    }
}
