//! Concrete self-maps of convex subsets: the inputs to classification,
//! theorem probes, and iteration. The zoo is a closed set of kinds so that
//! the self-map invariant stays checkable and CLI configs stay declarative.

use crate::domain::{ConvexDomain, DomainKind};
use crate::error::{Error, Result};
use crate::sampling::{self, SamplePlan};
use crate::space::{self, Vector};

/// Tolerance for declared fixed points: ||Tq - q|| must not exceed this.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// Matching tolerance for table lookups.
pub const TABLE_LOOKUP_TOL: f64 = 1e-9;

/// Small dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        SquareMatrix::new(n, data)
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        SquareMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * x[j]).sum())
            .collect()
    }
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// Returns None when A is (numerically) singular.
pub fn solve_linear(a: &SquareMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.n;
    if b.len() != n {
        return None;
    }
    let mut m = a.data.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pivot < 1e-12 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            rhs.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let f = m[r * n + col] / m[col * n + col];
            for j in col..n {
                m[r * n + j] -= f * m[col * n + j];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..n {
            s -= m[i * n + j] * x[j];
        }
        x[i] = s / m[i * n + i];
    }
    Some(x)
}

#[derive(Clone, Debug)]
pub enum MappingKind {
    Identity,
    Constant { value: Vector },
    Scaling { factor: f64 },
    Negation,
    Affine { matrix: SquareMatrix, offset: Vector },
    MetricProjection { target: ConvexDomain },
    Table { entries: Vec<(Vector, Vector)> },
}

#[derive(Clone, Debug)]
pub struct Mapping {
    domain: ConvexDomain,
    kind: MappingKind,
    fixed_points: Vec<Vector>,
}

/// Metric projection onto a box or ball in a p=2 space: componentwise clamp
/// for boxes, radial scaling for balls. Unsupported for other exponents,
/// where the metric projection need not be firmly nonexpansive.
pub fn metric_projection(target: &ConvexDomain, x: &Vector) -> Result<Vector> {
    if target.space() != x.space() {
        return Err(Error::SpaceMismatch);
    }
    if target.space().p != 2.0 {
        return Err(Error::Parameter(
            "metric projection is only supported for p = 2".into(),
        ));
    }
    match target.kind() {
        DomainKind::Box { lo, hi } => {
            let coords = x
                .coords()
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(c, (a, b))| c.max(*a).min(*b))
                .collect();
            Vector::new(x.space(), coords)
        }
        DomainKind::Ball { radius } => {
            let n = space::norm(x);
            if n <= *radius {
                Ok(x.clone())
            } else {
                Ok(x.scale(radius / n))
            }
        }
        _ => Err(Error::Parameter(
            "metric projection target must be a box or a ball".into(),
        )),
    }
}

impl Mapping {
    /// Build a mapping, verifying the self-map property on sampled domain
    /// points and every declared fixed point to within [`FIXED_POINT_TOL`].
    pub fn new(
        domain: ConvexDomain,
        kind: MappingKind,
        declared_fixed_points: Vec<Vector>,
        check: &SamplePlan,
    ) -> Result<Self> {
        let space = domain.space();
        match &kind {
            MappingKind::Constant { value } => {
                if !domain.contains(value, FIXED_POINT_TOL) {
                    return Err(Error::Config("constant value lies outside the domain".into()));
                }
            }
            MappingKind::Affine { matrix, offset } => {
                if matrix.size() != space.n || offset.space() != space {
                    return Err(Error::DimensionMismatch {
                        expected: space.n,
                        got: matrix.size(),
                    });
                }
            }
            MappingKind::MetricProjection { target } => {
                if space.p != 2.0 {
                    return Err(Error::Parameter(
                        "metric projection is only supported for p = 2".into(),
                    ));
                }
                if target.space() != space {
                    return Err(Error::SpaceMismatch);
                }
            }
            MappingKind::Table { entries } => {
                let DomainKind::FinitePointSet { points } = domain.kind() else {
                    return Err(Error::Config(
                        "table mappings require a finite-point-set domain".into(),
                    ));
                };
                for p in points {
                    let hit = entries
                        .iter()
                        .any(|(from, _)| space::dist(from, p).map(|d| d <= TABLE_LOOKUP_TOL).unwrap_or(false));
                    if !hit {
                        return Err(Error::Config("table is not total on its domain".into()));
                    }
                }
            }
            _ => {}
        }

        let mapping = Mapping {
            domain,
            kind,
            fixed_points: Vec::new(),
        };

        // self-map property, checked by seeded sampling at construction
        for x in sampling::sample_points(&mapping.domain, check)? {
            let tx = mapping.apply_unchecked(&x)?;
            if !mapping.domain.contains(&tx, TABLE_LOOKUP_TOL) {
                return Err(Error::Config(format!(
                    "not a self-map: T{:?} leaves the domain",
                    x.coords()
                )));
            }
        }

        for q in &declared_fixed_points {
            let tq = mapping.apply_unchecked(q)?;
            let r = space::dist(&tq, q)?;
            if r > FIXED_POINT_TOL {
                return Err(Error::Config(format!(
                    "declared fixed point has residual {r:.3e} > {FIXED_POINT_TOL:.0e}"
                )));
            }
        }

        Ok(Mapping {
            fixed_points: declared_fixed_points,
            ..mapping
        })
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn kind(&self) -> &MappingKind {
        &self.kind
    }

    pub fn fixed_points(&self) -> &[Vector] {
        &self.fixed_points
    }

    fn apply_unchecked(&self, x: &Vector) -> Result<Vector> {
        match &self.kind {
            MappingKind::Identity => Ok(x.clone()),
            MappingKind::Constant { value } => Ok(value.clone()),
            MappingKind::Scaling { factor } => Ok(x.scale(*factor)),
            MappingKind::Negation => Ok(x.scale(-1.0)),
            MappingKind::Affine { matrix, offset } => {
                let mut coords = matrix.mul_vec(x.coords());
                for (c, o) in coords.iter_mut().zip(offset.coords()) {
                    *c += o;
                }
                Vector::new(x.space(), coords)
            }
            MappingKind::MetricProjection { target } => metric_projection(target, x),
            MappingKind::Table { entries } => {
                for (from, to) in entries {
                    if space::dist(from, x)? <= TABLE_LOOKUP_TOL {
                        return Ok(to.clone());
                    }
                }
                Err(Error::OutsideDomain(format!(
                    "table miss at {:?}",
                    x.coords()
                )))
            }
        }
    }

    /// T(x). Errors when x lies outside the domain (or misses the table).
    pub fn evaluate(&self, x: &Vector) -> Result<Vector> {
        if !self.domain.contains(x, FIXED_POINT_TOL) {
            return Err(Error::OutsideDomain(format!("{:?}", x.coords())));
        }
        self.apply_unchecked(x)
    }
}

/// All sampled points with ||Tx - x|| <= tol. Analytic kinds are solved
/// directly: affine maps via (A - I) x = -b when A - I is nonsingular,
/// scalings and negations at the origin, constants at their value. Bounded
/// domains are scanned on a grid of the given resolution; an unbounded
/// domain without an analytic route is a configuration error.
pub fn fixed_points_bruteforce(
    mapping: &Mapping,
    tol: f64,
    resolution: Option<f64>,
) -> Result<Vec<Vector>> {
    let space = mapping.domain().space();
    let mut found: Vec<Vector> = Vec::new();
    let push_unique = |v: Vector, acc: &mut Vec<Vector>| {
        if !acc.iter().any(|u| space::dist(u, &v).map(|d| d <= tol).unwrap_or(false)) {
            acc.push(v);
        }
    };

    // analytic routes
    match mapping.kind() {
        MappingKind::Constant { value } => {
            push_unique(value.clone(), &mut found);
        }
        MappingKind::Scaling { factor } if *factor != 1.0 => {
            let zero = Vector::zero(space);
            if mapping.domain().contains(&zero, tol) {
                push_unique(zero, &mut found);
            }
        }
        MappingKind::Negation => {
            let zero = Vector::zero(space);
            if mapping.domain().contains(&zero, tol) {
                push_unique(zero, &mut found);
            }
        }
        MappingKind::Affine { matrix, offset } => {
            // (A - I) x = -b
            let n = space.n;
            let mut shifted = matrix.clone();
            let mut data: Vec<f64> = (0..n * n).map(|k| shifted.at(k / n, k % n)).collect();
            for i in 0..n {
                data[i * n + i] -= 1.0;
            }
            shifted = SquareMatrix::new(n, data)?;
            let rhs: Vec<f64> = offset.coords().iter().map(|b| -b).collect();
            if let Some(sol) = solve_linear(&shifted, &rhs) {
                let v = Vector::new(space, sol)?;
                if mapping.domain().contains(&v, tol) {
                    push_unique(v, &mut found);
                }
            }
        }
        _ => {}
    }

    match mapping.domain().kind() {
        DomainKind::FinitePointSet { points } => {
            for p in points {
                let tp = mapping.evaluate(p)?;
                if space::dist(&tp, p)? <= tol {
                    push_unique(p.clone(), &mut found);
                }
            }
        }
        DomainKind::Box { lo, hi } => {
            if let Some(res) = resolution {
                grid_scan(mapping, lo, hi, res, tol, &mut |v, acc: &mut Vec<Vector>| {
                    push_unique(v, acc)
                }, &mut found)?;
            } else if found.is_empty() && !analytic_kind(mapping.kind()) {
                return Err(Error::Config("grid resolution required for this mapping".into()));
            }
        }
        DomainKind::Ball { radius } => {
            if let Some(res) = resolution {
                let lo = vec![-radius; space.n];
                let hi = vec![*radius; space.n];
                grid_scan(mapping, &lo, &hi, res, tol, &mut |v, acc: &mut Vec<Vector>| {
                    push_unique(v, acc)
                }, &mut found)?;
            } else if found.is_empty() && !analytic_kind(mapping.kind()) {
                return Err(Error::Config("grid resolution required for this mapping".into()));
            }
        }
        DomainKind::WholeSpace => {
            if found.is_empty() && !analytic_kind(mapping.kind()) {
                return Err(Error::Config(
                    "unbounded domain without an analytic fixed-point route".into(),
                ));
            }
        }
    }

    Ok(found)
}

fn analytic_kind(kind: &MappingKind) -> bool {
    matches!(
        kind,
        MappingKind::Constant { .. }
            | MappingKind::Negation
            | MappingKind::Affine { .. }
    ) || matches!(kind, MappingKind::Scaling { factor } if *factor != 1.0)
}

fn grid_scan(
    mapping: &Mapping,
    lo: &[f64],
    hi: &[f64],
    resolution: f64,
    tol: f64,
    push: &mut dyn FnMut(Vector, &mut Vec<Vector>),
    found: &mut Vec<Vector>,
) -> Result<()> {
    if resolution <= 0.0 {
        return Err(Error::Config("grid resolution must be positive".into()));
    }
    let space = mapping.domain().space();
    let steps: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(a, b)| ((b - a) / resolution).round() as usize)
        .collect();
    let total: usize = steps.iter().map(|s| s + 1).product();
    if total > 2_000_000 {
        return Err(Error::Config(format!("grid too large: {total} points")));
    }
    for idx in 0..total {
        let mut rem = idx;
        let coords: Vec<f64> = steps
            .iter()
            .zip(lo)
            .map(|(s, a)| {
                let k = rem % (s + 1);
                rem /= s + 1;
                a + k as f64 * resolution
            })
            .collect();
        let v = Vector::new(space, coords)?;
        if !mapping.domain().contains(&v, 0.0) {
            continue;
        }
        let tv = mapping.evaluate(&v)?;
        if space::dist(&tv, &v)? <= tol {
            push(v, found);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceSpec;

    fn s(n: usize, p: f64) -> SpaceSpec {
        SpaceSpec::new(n, p).unwrap()
    }

    fn v(sp: SpaceSpec, c: &[f64]) -> Vector {
        Vector::new(sp, c.to_vec()).unwrap()
    }

    fn plan() -> SamplePlan {
        SamplePlan::new(200, 99)
    }

    #[test]
    fn identity_evaluates() {
        let sp = s(2, 2.0);
        let m = Mapping::new(
            ConvexDomain::whole_space(sp),
            MappingKind::Identity,
            vec![v(sp, &[1.0, 2.0])],
            &plan(),
        )
        .unwrap();
        assert_eq!(m.evaluate(&v(sp, &[1.0, 2.0])).unwrap().coords(), &[1.0, 2.0]);
    }

    #[test]
    fn scaling_halves() {
        let sp = s(1, 2.0);
        let m = Mapping::new(
            ConvexDomain::whole_space(sp),
            MappingKind::Scaling { factor: 0.5 },
            vec![Vector::zero(sp)],
            &plan(),
        )
        .unwrap();
        assert_eq!(m.evaluate(&v(sp, &[1.0])).unwrap().coords(), &[0.5]);
    }

    #[test]
    fn projection_radial() {
        let sp = s(2, 2.0);
        let ball = ConvexDomain::ball(sp, 1.0).unwrap();
        let m = Mapping::new(
            ConvexDomain::whole_space(sp),
            MappingKind::MetricProjection { target: ball },
            vec![Vector::zero(sp), v(sp, &[0.6, 0.8])],
            &plan(),
        )
        .unwrap();
        let px = m.evaluate(&v(sp, &[3.0, 4.0])).unwrap();
        assert!((px.coords()[0] - 0.6).abs() < 1e-15);
        assert!((px.coords()[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn projection_clamp_and_inside() {
        let sp = s(2, 2.0);
        let bx = ConvexDomain::bounded_box(sp, vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let p = metric_projection(&bx, &v(sp, &[2.0, -1.0])).unwrap();
        assert_eq!(p.coords(), &[1.0, 0.0]);

        let ball2 = ConvexDomain::ball(sp, 2.0).unwrap();
        let q = metric_projection(&ball2, &v(sp, &[3.0, 4.0])).unwrap();
        assert!((q.coords()[0] - 1.2).abs() < 1e-15);
        assert!((q.coords()[1] - 1.6).abs() < 1e-15);
        let inside = v(sp, &[0.3, 0.1]);
        assert_eq!(metric_projection(&ball2, &inside).unwrap(), inside);
    }

    #[test]
    fn projection_rejects_non_hilbert() {
        let sp = s(2, 3.0);
        let ball = ConvexDomain::ball(sp, 1.0).unwrap();
        assert!(metric_projection(&ball, &v(sp, &[2.0, 0.0])).is_err());
    }

    #[test]
    fn projection_idempotent_and_firm() {
        let sp = s(2, 2.0);
        let bx = ConvexDomain::bounded_box(sp, vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let mut r = sampling::rng(3);
        use rand::Rng;
        for _ in 0..500 {
            let x = v(sp, &[r.gen_range(-4.0..4.0), r.gen_range(-4.0..4.0)]);
            let y = v(sp, &[r.gen_range(-4.0..4.0), r.gen_range(-4.0..4.0)]);
            let px = metric_projection(&bx, &x).unwrap();
            let ppx = metric_projection(&bx, &px).unwrap();
            assert!(space::dist(&ppx, &px).unwrap() <= 1e-12);
            // firmly nonexpansive in Hilbert: ||Px-Py||^2 <= <x-y, Px-Py>
            let py = metric_projection(&bx, &y).unwrap();
            let d = space::dist_sq(&px, &py).unwrap();
            let inner: f64 = x
                .sub(&y)
                .unwrap()
                .coords()
                .iter()
                .zip(px.sub(&py).unwrap().coords())
                .map(|(a, b)| a * b)
                .sum();
            assert!(d <= inner + 1e-10);
        }
    }

    #[test]
    fn self_map_violation_rejected() {
        let sp = s(1, 2.0);
        let ball = ConvexDomain::ball(sp, 1.0).unwrap();
        let r = Mapping::new(
            ball,
            MappingKind::Scaling { factor: 2.0 },
            vec![],
            &plan(),
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn bad_fixed_point_rejected() {
        let sp = s(1, 2.0);
        let r = Mapping::new(
            ConvexDomain::whole_space(sp),
            MappingKind::Scaling { factor: 0.5 },
            vec![v(sp, &[1.0])],
            &plan(),
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn evaluate_outside_domain_errors() {
        let sp = s(2, 2.0);
        let ball = ConvexDomain::ball(sp, 1.0).unwrap();
        let m = Mapping::new(ball, MappingKind::Negation, vec![Vector::zero(sp)], &plan()).unwrap();
        assert!(matches!(
            m.evaluate(&v(sp, &[2.0, 0.0])),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn bruteforce_scaling_on_grid() {
        let sp = s(1, 2.0);
        let bx = ConvexDomain::bounded_box(sp, vec![-1.0], vec![1.0]).unwrap();
        let m = Mapping::new(
            bx,
            MappingKind::Scaling { factor: 0.5 },
            vec![],
            &plan(),
        )
        .unwrap();
        let fps = fixed_points_bruteforce(&m, 1e-9, Some(0.25)).unwrap();
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].coords(), &[0.0]);
    }

    #[test]
    fn bruteforce_identity_on_finite_set() {
        let sp = s(1, 2.0);
        let a = v(sp, &[0.5]);
        let b = v(sp, &[-0.5]);
        let d = ConvexDomain::finite_points(sp, vec![a.clone(), b.clone()]).unwrap();
        let m = Mapping::new(d, MappingKind::Identity, vec![], &SamplePlan::new(10, 1)).unwrap();
        let fps = fixed_points_bruteforce(&m, 1e-9, None).unwrap();
        assert_eq!(fps.len(), 2);
    }

    #[test]
    fn bruteforce_affine_direct_solve() {
        let sp = s(2, 2.0);
        let m = Mapping::new(
            ConvexDomain::whole_space(sp),
            MappingKind::Affine {
                matrix: SquareMatrix::diagonal(&[0.5, 1.0 / 3.0]),
                offset: v(sp, &[1.0, 1.0]),
            },
            vec![],
            &plan(),
        )
        .unwrap();
        let fps = fixed_points_bruteforce(&m, 1e-9, None).unwrap();
        assert_eq!(fps.len(), 1);
        assert!((fps[0].coords()[0] - 2.0).abs() < 1e-12);
        assert!((fps[0].coords()[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_requires_grid_for_identity_on_unbounded() {
        let sp = s(1, 2.0);
        let m = Mapping::new(
            ConvexDomain::whole_space(sp),
            MappingKind::Identity,
            vec![],
            &plan(),
        )
        .unwrap();
        assert!(matches!(
            fixed_points_bruteforce(&m, 1e-9, None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn table_requires_totality() {
        let sp = s(1, 2.0);
        let a = v(sp, &[0.0]);
        let b = v(sp, &[1.0]);
        let d = ConvexDomain::finite_points(sp, vec![a.clone(), b.clone()]).unwrap();
        let partial = Mapping::new(
            d.clone(),
            MappingKind::Table {
                entries: vec![(a.clone(), a.clone())],
            },
            vec![],
            &SamplePlan::new(10, 1),
        );
        assert!(matches!(partial, Err(Error::Config(_))));

        let total = Mapping::new(
            d,
            MappingKind::Table {
                entries: vec![(a.clone(), a.clone()), (b.clone(), a.clone())],
            },
            vec![a.clone()],
            &SamplePlan::new(10, 1),
        )
        .unwrap();
        assert_eq!(total.evaluate(&b).unwrap(), a);
    }

    #[test]
    fn solve_linear_detects_singular() {
        let a = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(solve_linear(&a, &[1.0, 2.0]).is_none());
        let b = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = solve_linear(&b, &[5.0, 10.0]).unwrap();
        assert!((2.0 * x[0] + x[1] - 5.0).abs() < 1e-12);
        assert!((x[0] + 3.0 * x[1] - 10.0).abs() < 1e-12);
    }
}
