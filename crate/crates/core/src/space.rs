//! Finite-dimensional lp vector geometry: norms, the normalized duality
//! mapping, the duality-pairing inequality, and the uniform-convexity gap.
//!
//! All vectors live in R^n equipped with the p-norm, 1 < p < infinity. In
//! finite dimension these spaces are uniformly convex and satisfy Opial's
//! condition, so both flags are always true on a constructible [`SpaceSpec`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient space descriptor: dimension `n` and norm exponent `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub n: usize,
    pub p: f64,
    /// Always true: finite-dimensional spaces satisfy Opial's condition.
    pub opial: bool,
    /// Always true: lp is uniformly convex for 1 < p < infinity.
    pub uniformly_convex: bool,
}

impl SpaceSpec {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidSpace(format!(
                "exponent must satisfy 1 < p < infinity, got {p}"
            )));
        }
        Ok(SpaceSpec {
            n,
            p,
            opial: true,
            uniformly_convex: true,
        })
    }

    /// Conjugate exponent q with 1/p + 1/q = 1.
    pub fn conjugate_exponent(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

/// A point of the space. Coordinates are finite and match the dimension.
/// Serializes as a bare JSON array of numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    space: SpaceSpec,
    coords: Vec<f64>,
}

impl Serialize for Vector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(serializer)
    }
}

impl Vector {
    pub fn new(space: SpaceSpec, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != space.n {
            return Err(Error::DimensionMismatch {
                expected: space.n,
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("vector coordinate".into()));
        }
        Ok(Vector { space, coords })
    }

    pub fn zero(space: SpaceSpec) -> Self {
        Vector {
            space,
            coords: vec![0.0; space.n],
        }
    }

    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn same_space(&self, other: &Vector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.same_space(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Vector {
            space: self.space,
            coords,
        })
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector {
            space: self.space,
            coords: self.coords.iter().map(|a| c * a).collect(),
        }
    }

    /// wa * self + wb * other, coordinatewise, with the weights applied
    /// exactly as given (no 1-w rewriting), so algebraic identities between
    /// schemes hold bitwise.
    pub fn combine(&self, other: &Vector, wa: f64, wb: f64) -> Result<Vector> {
        self.same_space(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| wa * a + wb * b)
            .collect();
        Ok(Vector {
            space: self.space,
            coords,
        })
    }
}

/// Functional coefficients in the dual space (lq norm, 1/p + 1/q = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct DualVector {
    space: SpaceSpec,
    coords: Vec<f64>,
}

impl DualVector {
    pub fn space(&self) -> SpaceSpec {
        self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

fn powsum(coords: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        coords.iter().map(|c| c * c).sum()
    } else {
        coords.iter().map(|c| c.abs().powf(p)).sum()
    }
}

/// lp norm (sum |x_i|^p)^(1/p). Zero iff x = 0.
pub fn norm(x: &Vector) -> f64 {
    let p = x.space.p;
    let s = powsum(&x.coords, p);
    if p == 2.0 {
        s.sqrt()
    } else {
        s.powf(1.0 / p)
    }
}

/// Squared lp norm, computed with a single root for accuracy.
pub fn norm_sq(x: &Vector) -> f64 {
    let p = x.space.p;
    let s = powsum(&x.coords, p);
    if p == 2.0 {
        s
    } else {
        s.powf(2.0 / p)
    }
}

fn diff_powsum(a: &[f64], b: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = x - y;
                d * d
            })
            .sum()
    } else {
        a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum()
    }
}

pub fn dist(x: &Vector, y: &Vector) -> Result<f64> {
    x.same_space(y)?;
    let p = x.space.p;
    let s = diff_powsum(&x.coords, &y.coords, p);
    Ok(if p == 2.0 { s.sqrt() } else { s.powf(1.0 / p) })
}

/// Squared distance ||x - y||^2. Symmetric bitwise: |x_i - y_i| = |y_i - x_i|.
pub fn dist_sq(x: &Vector, y: &Vector) -> Result<f64> {
    x.same_space(y)?;
    let p = x.space.p;
    let s = diff_powsum(&x.coords, &y.coords, p);
    Ok(if p == 2.0 { s } else { s.powf(2.0 / p) })
}

/// Duality pairing <x, f> = sum x_i f_i.
pub fn pairing(x: &Vector, f: &DualVector) -> Result<f64> {
    if x.space != f.space {
        return Err(Error::SpaceMismatch);
    }
    Ok(x.coords.iter().zip(&f.coords).map(|(a, b)| a * b).sum())
}

/// Normalized duality mapping J: (Jx)_i = ||x||^(2-p) |x_i|^(p-1) sign(x_i).
///
/// Satisfies <x, Jx> = ||x||^2 and ||Jx||_q = ||x||. J0 = 0 by continuity.
/// In the Hilbert case p = 2 this is the identity, returned exactly.
pub fn duality_map(x: &Vector) -> DualVector {
    let p = x.space.p;
    if p == 2.0 {
        return DualVector {
            space: x.space,
            coords: x.coords.clone(),
        };
    }
    let nx = norm(x);
    if nx == 0.0 {
        return DualVector {
            space: x.space,
            coords: vec![0.0; x.space.n],
        };
    }
    let scale = nx.powf(2.0 - p);
    let coords = x
        .coords
        .iter()
        .map(|&xi| {
            if xi == 0.0 {
                0.0
            } else {
                scale * xi.abs().powf(p - 1.0) * xi.signum()
            }
        })
        .collect();
    DualVector {
        space: x.space,
        coords,
    }
}

/// Norm of a functional in the conjugate exponent q.
pub fn dual_norm(f: &DualVector) -> f64 {
    let q = f.space.conjugate_exponent();
    if q == 2.0 {
        f.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    } else {
        f.coords
            .iter()
            .map(|c| c.abs().powf(q))
            .sum::<f64>()
            .powf(1.0 / q)
    }
}

/// ||x||^2 - ||y||^2 - 2<x - y, Jy>. Nonnegative for every pair.
pub fn duality_gap(x: &Vector, y: &Vector) -> Result<f64> {
    x.same_space(y)?;
    let jy = duality_map(y);
    let d = x.sub(y)?;
    Ok(norm_sq(x) - norm_sq(y) - 2.0 * pairing(&d, &jy)?)
}

/// Uniform-convexity gap for a candidate modulus g:
///
///   t||x||^2 + (1-t)||y||^2 - t(1-t) g(||x-y||) - ||tx + (1-t)y||^2
///
/// Nonnegative whenever g is a valid modulus for the space and radius.
/// With p = 2 and g(s) = s^2 the gap is identically zero.
pub fn xu_gap(x: &Vector, y: &Vector, t: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    x.same_space(y)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Parameter(format!("t must lie in [0,1], got {t}")));
    }
    let mid = x.combine(y, t, 1.0 - t)?;
    let s = dist(x, y)?;
    Ok(t * norm_sq(x) + (1.0 - t) * norm_sq(y) - t * (1.0 - t) * g(s) - norm_sq(&mid))
}
