//! Convex subsets of lp spaces: whole space, boxes, balls centered at the
//! origin, and finite point sets (for table mappings).

use crate::error::{Error, Result};
use crate::space::{self, SpaceSpec, Vector};

#[derive(Clone, Debug)]
pub enum DomainKind {
    WholeSpace,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { radius: f64 },
    FinitePointSet { points: Vec<Vector> },
}

#[derive(Clone, Debug)]
pub struct ConvexDomain {
    space: SpaceSpec,
    kind: DomainKind,
}

impl ConvexDomain {
    pub fn whole_space(space: SpaceSpec) -> Self {
        ConvexDomain {
            space,
            kind: DomainKind::WholeSpace,
        }
    }

    pub fn bounded_box(space: SpaceSpec, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != space.n || hi.len() != space.n {
            return Err(Error::DimensionMismatch {
                expected: space.n,
                got: lo.len().max(hi.len()),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Config("box bounds must satisfy lo <= hi and be finite".into()));
        }
        Ok(ConvexDomain {
            space,
            kind: DomainKind::Box { lo, hi },
        })
    }

    pub fn ball(space: SpaceSpec, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Config(format!("ball radius must be positive, got {radius}")));
        }
        Ok(ConvexDomain {
            space,
            kind: DomainKind::Ball { radius },
        })
    }

    pub fn finite_points(space: SpaceSpec, points: Vec<Vector>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("finite point set must be nonempty".into()));
        }
        for p in &points {
            if p.space() != space {
                return Err(Error::SpaceMismatch);
            }
        }
        Ok(ConvexDomain {
            space,
            kind: DomainKind::FinitePointSet { points },
        })
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.kind, DomainKind::WholeSpace)
    }

    /// Exact membership test with an absolute tolerance for rounding drift.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        if x.space() != self.space {
            return false;
        }
        match &self.kind {
            DomainKind::WholeSpace => true,
            DomainKind::Box { lo, hi } => x
                .coords()
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(c, (a, b))| *c >= a - tol && *c <= b + tol),
            DomainKind::Ball { radius } => space::norm(x) <= radius + tol,
            DomainKind::FinitePointSet { points } => points
                .iter()
                .any(|p| space::dist(p, x).map(|d| d <= tol).unwrap_or(false)),
        }
    }

    /// Pull a point that drifted outside by at most `max_violation` back onto
    /// the domain (componentwise clamp for boxes, radial scaling for balls).
    /// Returns None when the drift is larger or the domain cannot absorb it.
    pub fn reproject(&self, x: &Vector, max_violation: f64) -> Option<Vector> {
        if self.contains(x, 0.0) {
            return Some(x.clone());
        }
        if !self.contains(x, max_violation) {
            return None;
        }
        match &self.kind {
            DomainKind::Box { lo, hi } => {
                let coords = x
                    .coords()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(c, (a, b))| c.max(*a).min(*b))
                    .collect();
                Vector::new(self.space, coords).ok()
            }
            DomainKind::Ball { radius } => {
                let n = space::norm(x);
                Some(x.scale(radius / n))
            }
            _ => None,
        }
    }
}
