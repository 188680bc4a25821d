//! Seeded sampling of domain points and point pairs. Every plan carries its
//! seed, so reports built from samples are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{ConvexDomain, DomainKind};
use crate::error::{Error, Result};
use crate::space::{self, SpaceSpec, Vector};

#[derive(Clone, Copy, Debug)]
pub struct SamplePlan {
    pub count: usize,
    pub seed: u64,
    /// Half-width of the sampling box used for unbounded domains.
    pub extent: f64,
}

impl SamplePlan {
    pub fn new(count: usize, seed: u64) -> Self {
        SamplePlan {
            count,
            seed,
            extent: 5.0,
        }
    }

    pub fn with_extent(mut self, extent: f64) -> Self {
        self.extent = extent;
        self
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point of the p-ball of the given radius: random direction on the
/// p-sphere scaled by a radius factor u^(1/n).
pub fn ball_point(space: SpaceSpec, radius: f64, rng: &mut ChaCha8Rng) -> Vector {
    loop {
        let coords: Vec<f64> = (0..space.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = Vector::new(space, coords).expect("finite coords");
        let n = space::norm(&v);
        if n > 1e-6 {
            let rho = radius * rng.gen_range(0.0_f64..1.0).powf(1.0 / space.n as f64);
            return v.scale(rho / n);
        }
    }
}

fn domain_point(domain: &ConvexDomain, extent: f64, rng: &mut ChaCha8Rng) -> Vector {
    let space = domain.space();
    match domain.kind() {
        DomainKind::WholeSpace => {
            let coords = (0..space.n).map(|_| rng.gen_range(-extent..extent)).collect();
            Vector::new(space, coords).expect("finite coords")
        }
        DomainKind::Box { lo, hi } => {
            let coords = lo
                .iter()
                .zip(hi)
                .map(|(a, b)| if a == b { *a } else { rng.gen_range(*a..*b) })
                .collect();
            Vector::new(space, coords).expect("finite coords")
        }
        DomainKind::Ball { radius } => ball_point(space, *radius, rng),
        DomainKind::FinitePointSet { points } => {
            points[rng.gen_range(0..points.len())].clone()
        }
    }
}

pub fn sample_points(domain: &ConvexDomain, plan: &SamplePlan) -> Result<Vec<Vector>> {
    if plan.count == 0 {
        return Err(Error::Config("empty sampling plan".into()));
    }
    let mut r = rng(plan.seed);
    Ok((0..plan.count)
        .map(|_| domain_point(domain, plan.extent, &mut r))
        .collect())
}

pub fn sample_pairs(domain: &ConvexDomain, plan: &SamplePlan) -> Result<Vec<(Vector, Vector)>> {
    if plan.count == 0 {
        return Err(Error::Config("empty sampling plan".into()));
    }
    let mut r = rng(plan.seed);
    Ok((0..plan.count)
        .map(|_| {
            let x = domain_point(domain, plan.extent, &mut r);
            let y = domain_point(domain, plan.extent, &mut r);
            (x, y)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_stay_in_domain() {
        let s = SpaceSpec::new(3, 1.5).unwrap();
        let ball = ConvexDomain::ball(s, 2.0).unwrap();
        for x in sample_points(&ball, &SamplePlan::new(500, 1)).unwrap() {
            assert!(ball.contains(&x, 1e-12));
        }
        let bx = ConvexDomain::bounded_box(s, vec![-1.0, 0.0, 2.0], vec![1.0, 0.0, 3.0]).unwrap();
        for x in sample_points(&bx, &SamplePlan::new(500, 2)).unwrap() {
            assert!(bx.contains(&x, 0.0));
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let s = SpaceSpec::new(2, 2.0).unwrap();
        let d = ConvexDomain::whole_space(s);
        let a = sample_pairs(&d, &SamplePlan::new(10, 42)).unwrap();
        let b = sample_pairs(&d, &SamplePlan::new(10, 42)).unwrap();
        assert_eq!(a, b);
        let c = sample_pairs(&d, &SamplePlan::new(10, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_plan_is_an_error() {
        let s = SpaceSpec::new(2, 2.0).unwrap();
        let d = ConvexDomain::whole_space(s);
        assert!(matches!(
            sample_points(&d, &SamplePlan::new(0, 1)),
            Err(Error::Config(_))
        ));
    }
}
