//! Auxiliary anchor functions: for each unit normal `v`, a point on the
//! hyperplane with normal `v` whose positive side carries a prescribed
//! mass. Includes the offset solver, the three-case point selection on
//! a container set, central spheres, and turning numbers of the sampled
//! anchor curves.

use crate::clip2d;
use crate::error::{Error, Result};
use crate::geom::{perp2, Hyperplane, Vector, UNIT_NORM_TOL};
use crate::measure::Measure;

/// The offsets achieving a target half-space mass for a fixed normal.
/// On a mass plateau the achieving set is a genuine interval; `chosen`
/// is always its midpoint, which makes downstream consumers
/// deterministic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSolution {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub chosen: f64,
}

impl LambdaSolution {
    pub fn width(&self) -> f64 {
        self.lambda_max - self.lambda_min
    }
}

/// Finds the interval of offsets `lambda` with
/// `|mu(H^+_{v,lambda}) - alpha| <= tol` by bisection on the monotone
/// mass map, bracketed by the bounding ball.
pub fn solve_lambda(m: &Measure, v: &Vector, alpha: f64, tol: f64) -> Result<LambdaSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter("alpha must lie in [0, 1]".into()));
    }
    if (v.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidParameter("normal must be unit length".into()));
    }
    if v.dim() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: v.dim() });
    }
    let (c, r) = m.bounding_ball();
    let mid = v.dot(&c);
    let lo = mid - r - 1.0;
    let hi = mid + r + 1.0;
    let excess = |lambda: f64| {
        let h = Hyperplane::from_unit(v.clone(), lambda).expect("unit normal");
        m.mass_excess(&h, alpha).expect("dims checked")
    };
    // mass is nonincreasing in lambda, so excess crosses +tol before -tol
    let lambda_min = bisect_monotone(lo, hi, |l| excess(l) <= tol);
    let lambda_max = bisect_monotone(lo, hi, |l| excess(l) < -tol);
    let chosen = 0.5 * (lambda_min + lambda_max);
    Ok(LambdaSolution { lambda_min, lambda_max, chosen })
}

/// First switch point of a monotone false->true predicate on `[lo, hi]`,
/// assuming `pred(hi)` and `!pred(lo)` (clamped otherwise).
fn bisect_monotone<P: FnMut(f64) -> bool>(mut lo: f64, mut hi: f64, mut pred: P) -> f64 {
    if pred(lo) {
        return lo;
    }
    if !pred(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// A compact convex container set.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Ball { center: Vector, radius: f64 },
    /// A convex polygon in the plane.
    Polygon { vertices: Vec<Vector> },
}

impl ConvexSet {
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Polygon { .. } => 2,
        }
    }

    pub fn centroid(&self) -> Vector {
        match self {
            ConvexSet::Ball { center, .. } => center.clone(),
            ConvexSet::Polygon { vertices } => clip2d::polygon_centroid(vertices),
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        match self {
            ConvexSet::Ball { center, radius } => x.dist(center) <= radius + tol,
            ConvexSet::Polygon { vertices } => {
                let n = vertices.len();
                // convex polygon: inside iff on the inner side of every edge
                let ccw = clip2d::polygon_area_signed(vertices) >= 0.0;
                (0..n).all(|i| {
                    let a = &vertices[i];
                    let b = &vertices[(i + 1) % n];
                    let cross = (b.0[0] - a.0[0]) * (x.0[1] - a.0[1])
                        - (b.0[1] - a.0[1]) * (x.0[0] - a.0[0]);
                    if ccw {
                        cross >= -tol
                    } else {
                        cross <= tol
                    }
                })
            }
        }
    }

    /// Range of `<v, x>` over the set, with points attaining it.
    pub fn support_interval(&self, v: &Vector) -> (f64, f64, Vector, Vector) {
        match self {
            ConvexSet::Ball { center, radius } => {
                let mid = v.dot(center);
                (
                    mid - radius,
                    mid + radius,
                    center.axpy(-*radius, v),
                    center.axpy(*radius, v),
                )
            }
            ConvexSet::Polygon { vertices } => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let mut plo = vertices[0].clone();
                let mut phi = vertices[0].clone();
                for p in vertices {
                    let d = v.dot(p);
                    if d < lo {
                        lo = d;
                        plo = p.clone();
                    }
                    if d > hi {
                        hi = d;
                        phi = p.clone();
                    }
                }
                (lo, hi, plo, phi)
            }
        }
    }

    /// Chord of the set along `origin + t * dir` (unit `dir`), planar only.
    pub fn line_chord(&self, origin: &Vector, dir: &Vector) -> Option<(f64, f64)> {
        match self {
            ConvexSet::Ball { center, radius } => {
                let d = origin.sub(center);
                let b = d.dot(dir);
                let c = d.dot(&d) - radius * radius;
                let disc = b * b - c;
                (disc > 0.0).then(|| {
                    let root = disc.sqrt();
                    (-b - root, -b + root)
                })
            }
            ConvexSet::Polygon { vertices } => {
                let iv = clip2d::line_polygon_intervals(vertices, origin, dir);
                iv.first().map(|&(a, _)| (a, iv.last().unwrap().1))
            }
        }
    }

    /// Monte-Carlo estimate of `mu(S)` for the container condition check.
    pub fn measure_fraction(&self, m: &Measure, samples: usize, seed: u64) -> f64 {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        for _ in 0..samples {
            if self.contains(&m.sample_one(&mut rng), 0.0) {
                hits += 1;
            }
        }
        hits as f64 / samples as f64
    }
}

/// How the anchor point on the solving hyperplane is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorMode {
    /// Three-case selection from the container set (cases 1/2 slide the
    /// offset to touch the container on a plateau, case 3 picks the point
    /// of the intersection nearest the container centroid).
    IntervalMidpoint,
    /// Center of mass of the density restricted to the solving
    /// hyperplane (planar only), centroid of the slice as fallback.
    CentralSphere,
}

/// An anchor map `v -> point` with its image contained in the container.
#[derive(Debug, Clone)]
pub struct AuxFunction {
    measure: Measure,
    alpha: f64,
    container: ConvexSet,
    mode: AnchorMode,
    tol: f64,
}

const CONTAINER_CHECK_SAMPLES: usize = 100_000;

impl AuxFunction {
    /// Checks the container condition `mu(S) >= max(alpha, 1-alpha)` by
    /// fixed-seed sampling (3-sigma slack) before accepting the set.
    pub fn new(
        measure: Measure,
        alpha: f64,
        container: ConvexSet,
        mode: AnchorMode,
        tol: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter("alpha must lie in [0, 1]".into()));
        }
        if container.dim() != measure.dim() {
            return Err(Error::DimensionMismatch {
                expected: measure.dim(),
                got: container.dim(),
            });
        }
        let required = alpha.max(1.0 - alpha);
        let frac = container.measure_fraction(&measure, CONTAINER_CHECK_SAMPLES, 0);
        let sigma3 = 3.0 * (frac * (1.0 - frac) / CONTAINER_CHECK_SAMPLES as f64).sqrt() + 1e-4;
        if frac + sigma3 < required {
            return Err(Error::ContainerCondition { required, observed: frac });
        }
        Ok(AuxFunction { measure, alpha, container, mode, tol })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn container(&self) -> &ConvexSet {
        &self.container
    }

    /// The anchor point for normal `v`: lies in the container and on a
    /// hyperplane with normal `v` whose positive side has mass `alpha`.
    pub fn point(&self, v: &Vector) -> Result<Vector> {
        match self.mode {
            AnchorMode::IntervalMidpoint => {
                aux_point(&self.measure, &self.container, self.alpha, v, self.tol)
            }
            AnchorMode::CentralSphere => {
                central_sphere_point(&self.measure, &self.container, self.alpha, v, self.tol)
                    .map(|(p, _)| p)
            }
        }
    }
}

/// Three-case anchor selection on a container set `S`:
/// case 1 slides the offset up to the supporting hyperplane when `H^+`
/// already contains `S` (possible only on a plateau), case 2 mirrors it,
/// case 3 intersects the solving hyperplane with `S` and picks the point
/// nearest the centroid of `S`.
pub fn aux_point(
    m: &Measure,
    container: &ConvexSet,
    alpha: f64,
    v: &Vector,
    tol: f64,
) -> Result<Vector> {
    let sol = solve_lambda(m, v, alpha, tol)?;
    let lambda = sol.chosen;
    let (s_lo, s_hi, p_lo, p_hi) = container.support_interval(v);
    if s_lo >= lambda {
        // case 1: S inside H^+; touch S from below
        return Ok(p_lo);
    }
    if s_hi <= lambda {
        // case 2: S inside H^-; touch S from above
        return Ok(p_hi);
    }
    // case 3: the hyperplane crosses S
    match container {
        ConvexSet::Ball { center, .. } => {
            // nearest point of H to the center is its orthogonal projection
            Ok(center.axpy(lambda - v.dot(center), v))
        }
        ConvexSet::Polygon { vertices } => {
            let dir = perp2(v);
            let origin = v.scale(lambda);
            let iv = clip2d::line_polygon_intervals(vertices, &origin, &dir);
            let (t0, t1) = match (iv.first(), iv.last()) {
                (Some(&(a, _)), Some(&(_, b))) => (a, b),
                _ => {
                    return Err(Error::UnsupportedConfiguration(
                        "solving hyperplane misses the container polygon".into(),
                    ))
                }
            };
            let centroid = clip2d::polygon_centroid(vertices);
            let t = dir.dot(&centroid.sub(&origin)).clamp(t0, t1);
            Ok(origin.axpy(t, &dir))
        }
    }
}

/// Threshold under which the restricted density counts as zero almost
/// everywhere and the centroid fallback applies (relative to the chord).
const SLICE_MASS_THRESHOLD: f64 = 1e-10;

/// The central-sphere point for normal `v` (planar only): center of mass
/// of the density restricted to the solving line within `S`, or the
/// centroid of the chord when that restriction vanishes. The flag is
/// true when the fallback was used.
pub fn central_sphere_point(
    m: &Measure,
    container: &ConvexSet,
    alpha: f64,
    v: &Vector,
    tol: f64,
) -> Result<(Vector, bool)> {
    if m.dim() != 2 {
        return Err(Error::UnsupportedConfiguration(
            "central spheres are implemented for the plane only".into(),
        ));
    }
    let sol = solve_lambda(m, v, alpha, tol)?;
    let lambda = sol.chosen;
    let dir = perp2(v);
    let origin = v.scale(lambda);
    let (t0, t1) = container.line_chord(&origin, &dir).ok_or_else(|| {
        Error::UnsupportedConfiguration(
            "solving hyperplane misses the container (inconsistent container)".into(),
        )
    })?;
    let (i0, i1) = m.line_moments(&origin, &dir, t0, t1);
    if i0 * (t1 - t0) < SLICE_MASS_THRESHOLD {
        return Ok((origin.axpy(0.5 * (t0 + t1), &dir), true));
    }
    Ok((origin.axpy(i1 / i0, &dir), false))
}

/// A sampled central sphere over a uniform angle grid.
#[derive(Debug, Clone)]
pub struct CurveSample {
    pub angles: Vec<f64>,
    pub points: Vec<Vector>,
    pub fallback: Vec<bool>,
}

/// Samples the central sphere on `grid` uniform angles in `[0, 2pi)`.
pub fn sample_central_sphere(
    m: &Measure,
    container: &ConvexSet,
    alpha: f64,
    grid: usize,
    tol: f64,
) -> Result<CurveSample> {
    if grid < 16 {
        return Err(Error::InvalidParameter("grid must be at least 16".into()));
    }
    let mut angles = Vec::with_capacity(grid);
    let mut points = Vec::with_capacity(grid);
    let mut fallback = Vec::with_capacity(grid);
    for j in 0..grid {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / grid as f64;
        let v = Vector::new(vec![theta.cos(), theta.sin()]);
        let (p, fb) = central_sphere_point(m, container, alpha, &v, tol)?;
        angles.push(theta);
        points.push(p);
        fallback.push(fb);
    }
    Ok(CurveSample { angles, points, fallback })
}

/// Turning number of a closed sampled curve: total rotation of the
/// discrete tangent direction in full turns. Reported as a nonnegative
/// count; the traversal orientation of the parametrization is a
/// convention, not a property of the curve.
pub fn turning_number(points: &[Vector]) -> Result<i32> {
    let scale = curve_scale(points);
    let drop_tol = 1e-9 * scale.max(1e-300);
    let mut kept: Vec<&Vector> = Vec::with_capacity(points.len());
    for p in points {
        if kept.last().map_or(true, |q| q.dist(p) > drop_tol) {
            kept.push(p);
        }
    }
    while kept.len() > 1 && kept[0].dist(kept[kept.len() - 1]) <= drop_tol {
        kept.pop();
    }
    if kept.len() < 3 {
        return Err(Error::DegenerateCurve);
    }
    let n = kept.len();
    let mut total = 0.0;
    let mut prev_angle = f64::NAN;
    let mut first_angle = 0.0;
    for i in 0..n {
        let a = kept[i];
        let b = kept[(i + 1) % n];
        let d = b.sub(a);
        let ang = d.0[1].atan2(d.0[0]);
        if i == 0 {
            first_angle = ang;
        } else {
            total += wrap_angle(ang - prev_angle);
        }
        prev_angle = ang;
    }
    total += wrap_angle(first_angle - prev_angle);
    let turns = total / (2.0 * std::f64::consts::PI);
    Ok(turns.round().abs() as i32)
}

fn wrap_angle(mut d: f64) -> f64 {
    use std::f64::consts::PI;
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    d
}

fn curve_scale(points: &[Vector]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut lo = points[0].clone();
    let mut hi = points[0].clone();
    for p in points {
        for i in 0..p.dim() {
            lo.0[i] = lo.0[i].min(p.0[i]);
            hi.0[i] = hi.0[i].max(p.0[i]);
        }
    }
    hi.sub(&lo).norm()
}
