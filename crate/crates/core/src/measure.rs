//! Measure models with evaluable half-space masses.
//!
//! Every variant is a continuous probability density with bounded
//! support. Half-space masses are closed-form for balls, smooth caps,
//! planar polygons, and mixtures/clouds built from those; polytopes in
//! dimension three and up fall back to deterministic low-discrepancy
//! rejection quadrature with a reported error bound.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clip2d::{self, HalfPlane};
use crate::error::{Error, Result};
use crate::geom::{Hyperplane, Vector};
use crate::numerics::{
    cap_fraction, cap_fraction_excess, halton_point, hyperplane_through,
    smooth_cap_density_constant, unit_ball_volume,
};

/// Default node budget for rejection quadrature (2^20).
pub const DEFAULT_QUAD_BUDGET: usize = 1 << 20;

/// Default exponent of the smooth-cap density `(1 - |x-c|^2/r^2)^k`.
pub const DEFAULT_CAP_EXPONENT: u32 = 2;

/// A half-space mass together with an evaluation error bound
/// (zero for closed-form variants).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassValue {
    pub value: f64,
    pub error_bound: f64,
}

impl MassValue {
    fn exact(value: f64) -> Self {
        MassValue { value, error_bound: 0.0 }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    UniformBall {
        center: Vector,
        radius: f64,
    },
    UniformPolytope {
        vertices: Vec<Vector>,
        /// 2-D: polygon area. nD: quadrature volume estimate.
        volume: f64,
        /// Outward facets (normal, offset) for dimension >= 3.
        facets: Vec<(Vector, f64)>,
        /// Quadrature nodes inside the polytope (empty in 2-D).
        nodes: Vec<Vector>,
        budget: usize,
    },
    SmoothCap {
        center: Vector,
        radius: f64,
        exponent: u32,
        density_const: f64,
    },
    Mixture {
        components: Vec<(f64, Measure)>,
    },
    KernelCloud {
        points: Vec<Vector>,
        bandwidth: f64,
        density_const: f64,
    },
    /// A measure restricted to one side of a hyperplane and renormalized
    /// (planar only; produced by [`Measure::conditional`]).
    Conditional {
        base: Box<Measure>,
        cut: Hyperplane,
        side: i8,
        normalizer: f64,
    },
}

/// An immutable continuous probability measure on `R^n`.
#[derive(Debug, Clone)]
pub struct Measure {
    kind: Kind,
    dim: usize,
    bound_center: Vector,
    bound_radius: f64,
}

/// Serializable description of a measure (the JSON scenario schema).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureSpec {
    UniformBall {
        center: Vec<f64>,
        radius: f64,
    },
    UniformPolytope {
        vertices: Vec<Vec<f64>>,
    },
    SmoothCap {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "default_exponent")]
        exponent: u32,
    },
    Mixture {
        components: Vec<WeightedSpec>,
    },
    KernelCloud {
        points: Vec<Vec<f64>>,
        bandwidth: f64,
    },
    /// Internal: a renormalized half-plane restriction of another measure.
    Conditional {
        base: Box<MeasureSpec>,
        normal: Vec<f64>,
        offset: f64,
        side: i8,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSpec {
    pub weight: f64,
    pub measure: MeasureSpec,
}

fn default_exponent() -> u32 {
    DEFAULT_CAP_EXPONENT
}

impl Measure {
    pub fn uniform_ball(center: Vector, radius: f64) -> Result<Measure> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidParameter("ball needs finite center and radius > 0".into()));
        }
        Ok(Measure {
            dim: center.dim(),
            bound_center: center.clone(),
            bound_radius: radius,
            kind: Kind::UniformBall { center, radius },
        })
    }

    pub fn smooth_cap(center: Vector, radius: f64, exponent: u32) -> Result<Measure> {
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidParameter("cap needs finite center and radius > 0".into()));
        }
        let n = center.dim();
        Ok(Measure {
            dim: n,
            bound_center: center.clone(),
            bound_radius: radius,
            kind: Kind::SmoothCap {
                density_const: smooth_cap_density_constant(n, exponent, radius),
                center,
                radius,
                exponent,
            },
        })
    }

    pub fn uniform_polytope(vertices: Vec<Vector>) -> Result<Measure> {
        Self::uniform_polytope_with_budget(vertices, DEFAULT_QUAD_BUDGET)
    }

    /// Polytope with an explicit rejection-quadrature node budget
    /// (only relevant for dimension >= 3).
    pub fn uniform_polytope_with_budget(vertices: Vec<Vector>, budget: usize) -> Result<Measure> {
        if vertices.is_empty() {
            return Err(Error::InvalidParameter("polytope needs vertices".into()));
        }
        let n = vertices[0].dim();
        if vertices.iter().any(|v| v.dim() != n || !v.is_finite()) {
            return Err(Error::InvalidParameter("polytope vertices must share a finite dimension".into()));
        }
        if vertices.len() < n + 1 {
            return Err(Error::InvalidParameter("polytope needs at least n+1 vertices".into()));
        }
        let centroid = vertex_mean(&vertices);
        let bound_radius = vertices.iter().map(|v| v.dist(&centroid)).fold(0.0, f64::max);

        if n == 2 {
            let volume = clip2d::polygon_area(&vertices);
            if volume <= 0.0 {
                return Err(Error::InvalidParameter("polygon has zero area".into()));
            }
            return Ok(Measure {
                dim: 2,
                bound_center: centroid,
                bound_radius,
                kind: Kind::UniformPolytope { vertices, volume, facets: vec![], nodes: vec![], budget },
            });
        }

        let facets = enumerate_facets(&vertices, n)?;
        // Halton rejection nodes inside the polytope, generated once.
        let (lo, hi) = aabb(&vertices);
        let box_vol: f64 = lo.0.iter().zip(&hi.0).map(|(a, b)| b - a).product();
        let mut nodes = Vec::new();
        for i in 0..budget {
            let u = halton_point(i, n);
            let p = Vector::new(
                u.iter().zip(lo.0.iter().zip(&hi.0)).map(|(t, (a, b))| a + t * (b - a)).collect(),
            );
            if in_facets(&facets, &p, 1e-12) {
                nodes.push(p);
            }
        }
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("polytope appears to have zero volume".into()));
        }
        let volume = box_vol * nodes.len() as f64 / budget as f64;
        Ok(Measure {
            dim: n,
            bound_center: centroid,
            bound_radius,
            kind: Kind::UniformPolytope { vertices, volume, facets, nodes, budget },
        })
    }

    /// Mixture of sub-measures; weights are normalized to sum to one.
    pub fn mixture(components: Vec<(f64, Measure)>) -> Result<Measure> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("mixture needs components".into()));
        }
        let dim = components[0].1.dim;
        if components.iter().any(|(w, m)| m.dim != dim || !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter(
                "mixture needs positive weights and equal dimensions".into(),
            ));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        let components: Vec<(f64, Measure)> =
            components.into_iter().map(|(w, m)| (w / total, m)).collect();
        // enclosing ball of the component balls
        let center = {
            let mut c = Vector::zeros(dim);
            for (w, m) in &components {
                c = c.axpy(*w, &m.bound_center);
            }
            c
        };
        let radius = components
            .iter()
            .map(|(_, m)| m.bound_center.dist(&center) + m.bound_radius)
            .fold(0.0, f64::max);
        Ok(Measure {
            dim,
            bound_center: center,
            bound_radius: radius,
            kind: Kind::Mixture { components },
        })
    }

    /// Restricts a planar measure to one side of a hyperplane and
    /// renormalizes: `mu(A | side) = mu(A & H^side) / mu(H^side)`.
    /// Fails when that side carries no mass.
    pub fn conditional(base: Measure, cut: Hyperplane, side: i8) -> Result<Measure> {
        if base.dim() != 2 {
            return Err(Error::UnsupportedConfiguration(
                "conditional measures are planar-only".into(),
            ));
        }
        if side != 1 && side != -1 {
            return Err(Error::InvalidParameter("side must be +1 or -1".into()));
        }
        if cut.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: cut.dim() });
        }
        let mass = base.mass_intersection(&[(cut.clone(), side)])?.value;
        if mass <= 1e-12 {
            return Err(Error::ZeroMassSide);
        }
        Ok(Measure {
            dim: 2,
            bound_center: base.bound_center.clone(),
            bound_radius: base.bound_radius,
            kind: Kind::Conditional { base: Box::new(base), cut, side, normalizer: 1.0 / mass },
        })
    }

    /// For a conditional measure: `(base, cut, side, normalizer)`.
    pub fn conditional_parts(&self) -> Option<(&Measure, &Hyperplane, i8, f64)> {
        match &self.kind {
            Kind::Conditional { base, cut, side, normalizer } => {
                Some((base, cut, *side, *normalizer))
            }
            _ => None,
        }
    }

    /// Equal-weight cloud of compactly supported bump kernels
    /// (smooth caps of exponent 2) centered at the data points.
    pub fn kernel_cloud(points: Vec<Vector>, bandwidth: f64) -> Result<Measure> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("kernel cloud needs points".into()));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter("bandwidth must be positive".into()));
        }
        let n = points[0].dim();
        if points.iter().any(|p| p.dim() != n || !p.is_finite()) {
            return Err(Error::InvalidParameter("points must share a finite dimension".into()));
        }
        let centroid = vertex_mean(&points);
        let radius = points.iter().map(|p| p.dist(&centroid)).fold(0.0, f64::max) + bandwidth;
        Ok(Measure {
            dim: n,
            bound_center: centroid,
            bound_radius: radius,
            kind: Kind::KernelCloud {
                density_const: smooth_cap_density_constant(n, DEFAULT_CAP_EXPONENT, bandwidth),
                points,
                bandwidth,
            },
        })
    }

    /// Builds a measure from its serializable description (polytopes get
    /// the default quadrature budget).
    pub fn from_spec(spec: MeasureSpec) -> Result<Measure> {
        match spec {
            MeasureSpec::UniformBall { center, radius } => {
                Measure::uniform_ball(Vector::new(center), radius)
            }
            MeasureSpec::UniformPolytope { vertices } => {
                Measure::uniform_polytope(vertices.into_iter().map(Vector::new).collect())
            }
            MeasureSpec::SmoothCap { center, radius, exponent } => {
                Measure::smooth_cap(Vector::new(center), radius, exponent)
            }
            MeasureSpec::Mixture { components } => Measure::mixture(
                components
                    .into_iter()
                    .map(|c| Ok((c.weight, Measure::from_spec(c.measure)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
            MeasureSpec::KernelCloud { points, bandwidth } => {
                Measure::kernel_cloud(points.into_iter().map(Vector::new).collect(), bandwidth)
            }
            MeasureSpec::Conditional { base, normal, offset, side } => Measure::conditional(
                Measure::from_spec(*base)?,
                Hyperplane::new(Vector::new(normal), offset)?,
                side,
            ),
        }
    }

    /// The serializable description of this measure.
    pub fn spec(&self) -> MeasureSpec {
        match &self.kind {
            Kind::UniformBall { center, radius } => MeasureSpec::UniformBall {
                center: center.0.clone(),
                radius: *radius,
            },
            Kind::UniformPolytope { vertices, .. } => MeasureSpec::UniformPolytope {
                vertices: vertices.iter().map(|v| v.0.clone()).collect(),
            },
            Kind::SmoothCap { center, radius, exponent, .. } => MeasureSpec::SmoothCap {
                center: center.0.clone(),
                radius: *radius,
                exponent: *exponent,
            },
            Kind::Mixture { components } => MeasureSpec::Mixture {
                components: components
                    .iter()
                    .map(|(w, m)| WeightedSpec { weight: *w, measure: m.spec() })
                    .collect(),
            },
            Kind::KernelCloud { points, bandwidth, .. } => MeasureSpec::KernelCloud {
                points: points.iter().map(|p| p.0.clone()).collect(),
                bandwidth: *bandwidth,
            },
            Kind::Conditional { base, cut, side, .. } => MeasureSpec::Conditional {
                base: Box::new(base.spec()),
                normal: cut.normal().0.clone(),
                offset: cut.offset(),
                side: *side,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// A ball containing the support.
    pub fn bounding_ball(&self) -> (Vector, f64) {
        (self.bound_center.clone(), self.bound_radius)
    }

    /// True when every mass evaluation is closed-form (error bound zero).
    pub fn is_analytic(&self) -> bool {
        match &self.kind {
            Kind::UniformBall { .. } | Kind::SmoothCap { .. } | Kind::KernelCloud { .. } => true,
            Kind::UniformPolytope { .. } => self.dim == 2,
            Kind::Mixture { components } => components.iter().all(|(_, m)| m.is_analytic()),
            Kind::Conditional { base, .. } => base.is_analytic(),
        }
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other });
        }
        Ok(())
    }

    /// Mass of the closed positive half-space `{x : <x,v> >= lambda}`.
    pub fn mass_halfspace(&self, h: &Hyperplane) -> Result<MassValue> {
        self.check_dim(h.dim())?;
        Ok(self.mass_impl(h.normal(), h.offset()))
    }

    /// `mass_halfspace(h) - alpha`, compensated so that residuals stay
    /// accurate when a mixture component sits almost entirely on one
    /// side of the plane.
    pub fn mass_excess(&self, h: &Hyperplane, alpha: f64) -> Result<f64> {
        self.check_dim(h.dim())?;
        Ok(self.excess_impl(h.normal(), h.offset(), alpha))
    }

    fn mass_impl(&self, v: &Vector, lambda: f64) -> MassValue {
        match &self.kind {
            Kind::UniformBall { center, radius } => {
                let s = (lambda - v.dot(center)) / radius;
                MassValue::exact(cap_fraction(self.dim, 0, s))
            }
            Kind::SmoothCap { center, radius, exponent, .. } => {
                let s = (lambda - v.dot(center)) / radius;
                MassValue::exact(cap_fraction(self.dim, *exponent, s))
            }
            Kind::UniformPolytope { vertices, volume, nodes, .. } => {
                if self.dim == 2 {
                    let clipped = clip2d::clip_polygon(vertices, v, lambda, 1);
                    MassValue::exact(clip2d::polygon_area(&clipped) / volume)
                } else {
                    let hits = nodes.iter().filter(|p| v.dot(p) >= lambda).count();
                    ratio_estimate(hits, nodes.len())
                }
            }
            Kind::Mixture { components } => {
                let mut value = 0.0;
                let mut err = 0.0;
                for (w, m) in components {
                    let mv = m.mass_impl(v, lambda);
                    value += w * mv.value;
                    err += w * mv.error_bound;
                }
                MassValue { value, error_bound: err }
            }
            Kind::KernelCloud { points, bandwidth, .. } => {
                let mut acc = 0.0;
                for p in points {
                    let s = (lambda - v.dot(p)) / bandwidth;
                    acc += cap_fraction(self.dim, DEFAULT_CAP_EXPONENT, s);
                }
                MassValue::exact(acc / points.len() as f64)
            }
            Kind::Conditional { base, cut, side, normalizer } => {
                let sc = f64::from(*side);
                let halves = [
                    HalfPlane { normal: cut.normal().scale(sc), offset: cut.offset() * sc },
                    HalfPlane { normal: v.clone(), offset: lambda },
                ];
                let mv = base.wedge_impl(&halves);
                MassValue {
                    value: (mv.value * normalizer).min(1.0),
                    error_bound: mv.error_bound * normalizer,
                }
            }
        }
    }

    fn excess_impl(&self, v: &Vector, lambda: f64, alpha: f64) -> f64 {
        match &self.kind {
            Kind::UniformBall { center, radius } => {
                let s = (lambda - v.dot(center)) / radius;
                compensated_cap_excess(self.dim, 0, s, alpha)
            }
            Kind::SmoothCap { center, radius, exponent, .. } => {
                let s = (lambda - v.dot(center)) / radius;
                compensated_cap_excess(self.dim, *exponent, s, alpha)
            }
            Kind::Mixture { components } => {
                // Split alpha into per-component shares matching each
                // component's asymptotic side, so barely-cut components
                // contribute their true tiny masses without cancellation.
                // The tiny parts are summed separately from the O(1)
                // shift so they are not absorbed.
                let mut small = 0.0;
                let mut shift = 0.0;
                for (w, m) in components {
                    let (excess, t) = m.component_excess(v, lambda);
                    small += w * excess;
                    shift += w * t;
                }
                small + (shift - alpha)
            }
            _ => self.mass_impl(v, lambda).value - alpha,
        }
    }

    /// Returns `(mass - t, t)` where `t` in {0, 1/2, 1} is the nearest
    /// reference level for this component relative to the plane.
    fn component_excess(&self, v: &Vector, lambda: f64) -> (f64, f64) {
        match &self.kind {
            Kind::UniformBall { center, radius } => {
                let s = (lambda - v.dot(center)) / radius;
                let t = reference_level(s);
                (cap_fraction_excess(self.dim, 0, s, t), t)
            }
            Kind::SmoothCap { center, radius, exponent, .. } => {
                let s = (lambda - v.dot(center)) / radius;
                let t = reference_level(s);
                (cap_fraction_excess(self.dim, *exponent, s, t), t)
            }
            _ => (self.mass_impl(v, lambda).value, 0.0),
        }
    }

    /// Mass of the intersection of closed half-spaces (planar only).
    /// Entries are (hyperplane, side) with side +1 for `H^+`.
    pub fn mass_intersection(&self, cuts: &[(Hyperplane, i8)]) -> Result<MassValue> {
        if self.dim != 2 {
            return Err(Error::UnsupportedConfiguration(
                "half-space intersection masses are planar-only".into(),
            ));
        }
        for (h, _) in cuts {
            self.check_dim(h.dim())?;
        }
        let halves: Vec<HalfPlane> = cuts
            .iter()
            .map(|(h, side)| {
                let s = f64::from(*side);
                HalfPlane { normal: h.normal().scale(s), offset: h.offset() * s }
            })
            .collect();
        Ok(self.wedge_impl(&halves))
    }

    fn wedge_impl(&self, halves: &[HalfPlane]) -> MassValue {
        match &self.kind {
            Kind::UniformBall { center, radius } => {
                let dens = 1.0 / (unit_ball_volume(2) * radius * radius);
                let m = clip2d::radial_wedge_mass(center, *radius, halves, |rho| {
                    0.5 * rho * rho * dens
                });
                MassValue { value: m, error_bound: 1e-11 }
            }
            Kind::SmoothCap { center, radius, exponent, density_const } => {
                let r2 = radius * radius;
                let kk = f64::from(*exponent) + 1.0;
                let m = clip2d::radial_wedge_mass(center, *radius, halves, |rho| {
                    -density_const * r2 / (2.0 * kk) * (1.0 - rho * rho / r2).powf(kk)
                });
                MassValue { value: m, error_bound: 1e-11 }
            }
            Kind::UniformPolytope { vertices, volume, .. } => {
                let mut poly = vertices.clone();
                for hp in halves {
                    poly = clip2d::clip_polygon(&poly, &hp.normal, hp.offset, 1);
                }
                MassValue::exact(clip2d::polygon_area(&poly) / volume)
            }
            Kind::Mixture { components } => {
                let mut value = 0.0;
                let mut err = 0.0;
                for (w, m) in components {
                    let mv = m.wedge_impl(halves);
                    value += w * mv.value;
                    err += w * mv.error_bound;
                }
                MassValue { value, error_bound: err }
            }
            Kind::KernelCloud { points, bandwidth, density_const } => {
                let r2 = bandwidth * bandwidth;
                let kk = f64::from(DEFAULT_CAP_EXPONENT) + 1.0;
                let mut acc = 0.0;
                for p in points {
                    acc += clip2d::radial_wedge_mass(p, *bandwidth, halves, |rho| {
                        -density_const * r2 / (2.0 * kk) * (1.0 - rho * rho / r2).powf(kk)
                    });
                }
                MassValue { value: acc / points.len() as f64, error_bound: 1e-11 }
            }
            Kind::Conditional { base, cut, side, normalizer } => {
                let sc = f64::from(*side);
                let mut all = Vec::with_capacity(halves.len() + 1);
                all.push(HalfPlane { normal: cut.normal().scale(sc), offset: cut.offset() * sc });
                all.extend(halves.iter().cloned());
                let mv = base.wedge_impl(&all);
                MassValue {
                    value: (mv.value * normalizer).min(1.0),
                    error_bound: mv.error_bound * normalizer,
                }
            }
        }
    }

    /// Density `h(x)` of the fixed representative of this measure.
    pub fn density_at(&self, x: &Vector) -> f64 {
        match &self.kind {
            Kind::UniformBall { center, radius } => {
                if x.dist(center) <= *radius {
                    1.0 / (unit_ball_volume(self.dim) * radius.powi(self.dim as i32))
                } else {
                    0.0
                }
            }
            Kind::SmoothCap { center, radius, exponent, density_const } => {
                let q = x.dist(center) / radius;
                if q <= 1.0 {
                    density_const * (1.0 - q * q).powi(*exponent as i32)
                } else {
                    0.0
                }
            }
            Kind::UniformPolytope { vertices, volume, facets, .. } => {
                let inside = if self.dim == 2 {
                    point_in_polygon(vertices, x)
                } else {
                    in_facets(facets, x, 1e-12)
                };
                if inside {
                    1.0 / volume
                } else {
                    0.0
                }
            }
            Kind::Mixture { components } => {
                components.iter().map(|(w, m)| w * m.density_at(x)).sum()
            }
            Kind::KernelCloud { points, bandwidth, density_const } => {
                let mut acc = 0.0;
                for p in points {
                    let q = x.dist(p) / bandwidth;
                    if q <= 1.0 {
                        acc += density_const * (1.0 - q * q).powi(DEFAULT_CAP_EXPONENT as i32);
                    }
                }
                acc / points.len() as f64
            }
            Kind::Conditional { base, cut, side, normalizer } => {
                if f64::from(*side) * cut.signed_dist(x) >= 0.0 {
                    base.density_at(x) * normalizer
                } else {
                    0.0
                }
            }
        }
    }

    /// Unbiased fixed-seed Monte-Carlo estimate of the half-space mass.
    /// The error bound is three standard errors.
    pub fn mass_halfspace_mc(&self, h: &Hyperplane, samples: usize, seed: u64) -> Result<MassValue> {
        self.check_dim(h.dim())?;
        if samples == 0 {
            return Err(Error::InvalidParameter("need at least one sample".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        for _ in 0..samples {
            let x = self.sample_one(&mut rng);
            if h.signed_dist(&x) >= 0.0 {
                hits += 1;
            }
        }
        Ok(ratio_estimate(hits, samples))
    }

    /// Monte-Carlo mass of an intersection of half-spaces (any dimension).
    pub fn mass_intersection_mc(
        &self,
        cuts: &[(Hyperplane, i8)],
        samples: usize,
        seed: u64,
    ) -> Result<MassValue> {
        for (h, _) in cuts {
            self.check_dim(h.dim())?;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0usize;
        for _ in 0..samples {
            let x = self.sample_one(&mut rng);
            if cuts.iter().all(|(h, s)| f64::from(*s) * h.signed_dist(&x) >= 0.0) {
                hits += 1;
            }
        }
        Ok(ratio_estimate(hits, samples))
    }

    /// One draw from the measure.
    pub fn sample_one<R: Rng>(&self, rng: &mut R) -> Vector {
        match &self.kind {
            Kind::UniformBall { center, radius } => sample_ball(rng, center, *radius, self.dim),
            Kind::SmoothCap { center, radius, exponent, .. } => loop {
                let x = sample_ball(rng, center, *radius, self.dim);
                let q = x.dist(center) / radius;
                let accept: f64 = rng.random();
                if accept < (1.0 - q * q).powi(*exponent as i32) {
                    return x;
                }
            },
            Kind::UniformPolytope { vertices, facets, .. } => {
                let (lo, hi) = aabb(vertices);
                loop {
                    let p = Vector::new(
                        lo.0.iter()
                            .zip(&hi.0)
                            .map(|(a, b)| a + rng.random::<f64>() * (b - a))
                            .collect(),
                    );
                    let inside = if self.dim == 2 {
                        point_in_polygon(vertices, &p)
                    } else {
                        in_facets(facets, &p, 0.0)
                    };
                    if inside {
                        return p;
                    }
                }
            }
            Kind::Mixture { components } => {
                let mut u: f64 = rng.random();
                for (w, m) in components {
                    if u < *w {
                        return m.sample_one(rng);
                    }
                    u -= w;
                }
                components.last().unwrap().1.sample_one(rng)
            }
            Kind::KernelCloud { points, bandwidth, .. } => {
                let idx = rng.random_range(0..points.len());
                let c = &points[idx];
                loop {
                    let x = sample_ball(rng, c, *bandwidth, self.dim);
                    let q = x.dist(c) / bandwidth;
                    let accept: f64 = rng.random();
                    if accept < (1.0 - q * q).powi(DEFAULT_CAP_EXPONENT as i32) {
                        return x;
                    }
                }
            }
            Kind::Conditional { base, cut, side, .. } => loop {
                let x = base.sample_one(rng);
                if f64::from(*side) * cut.signed_dist(&x) >= 0.0 {
                    return x;
                }
            },
        }
    }

    /// Re-evaluates the half-space mass with a doubled quadrature budget
    /// where quadrature is used at all; closed-form variants are returned
    /// unchanged. Used by independent verification.
    pub fn mass_halfspace_doubled(&self, h: &Hyperplane) -> Result<MassValue> {
        match &self.kind {
            Kind::UniformPolytope { vertices, budget, .. } if self.dim >= 3 => {
                let again =
                    Measure::uniform_polytope_with_budget(vertices.clone(), budget * 2)?;
                again.mass_halfspace(h)
            }
            Kind::Mixture { components } => {
                self.check_dim(h.dim())?;
                let mut value = 0.0;
                let mut err = 0.0;
                for (w, m) in components {
                    let mv = m.mass_halfspace_doubled(h)?;
                    value += w * mv.value;
                    err += w * mv.error_bound;
                }
                Ok(MassValue { value, error_bound: err })
            }
            Kind::Conditional { base, cut, side, .. } => {
                let again = Measure::conditional(
                    base.as_ref().clone_with_doubled_budget()?,
                    cut.clone(),
                    *side,
                )?;
                again.mass_halfspace(h)
            }
            _ => self.mass_halfspace(h),
        }
    }

    fn clone_with_doubled_budget(&self) -> Result<Measure> {
        match &self.kind {
            Kind::UniformPolytope { vertices, budget, .. } if self.dim >= 3 => {
                Measure::uniform_polytope_with_budget(vertices.clone(), budget * 2)
            }
            _ => Ok(self.clone()),
        }
    }

    /// Chord moments for central-sphere computations (planar only):
    /// integrates the density along `origin + t * dir` for `t` in
    /// `[t0, t1]`, returning `(integral of h, integral of t * h)`.
    pub fn line_moments(&self, origin: &Vector, dir: &Vector, t0: f64, t1: f64) -> (f64, f64) {
        debug_assert_eq!(self.dim, 2);
        if t1 <= t0 {
            return (0.0, 0.0);
        }
        match &self.kind {
            Kind::UniformBall { center, radius } => {
                let dens = 1.0 / (unit_ball_volume(2) * radius * radius);
                uniform_chord_moments(center, *radius, origin, dir, t0, t1, dens)
            }
            Kind::SmoothCap { center, radius, exponent, density_const } => {
                cap_chord_moments(center, *radius, *exponent, *density_const, origin, dir, t0, t1)
            }
            Kind::UniformPolytope { vertices, volume, .. } => {
                let dens = 1.0 / volume;
                let mut i0 = 0.0;
                let mut i1 = 0.0;
                for (a, b) in clip2d::line_polygon_intervals(vertices, origin, dir) {
                    let (lo, hi) = (a.max(t0), b.min(t1));
                    if hi > lo {
                        i0 += dens * (hi - lo);
                        i1 += dens * 0.5 * (hi * hi - lo * lo);
                    }
                }
                (i0, i1)
            }
            Kind::Mixture { components } => {
                let mut i0 = 0.0;
                let mut i1 = 0.0;
                for (w, m) in components {
                    let (a, b) = m.line_moments(origin, dir, t0, t1);
                    i0 += w * a;
                    i1 += w * b;
                }
                (i0, i1)
            }
            Kind::KernelCloud { points, bandwidth, density_const } => {
                let mut i0 = 0.0;
                let mut i1 = 0.0;
                for p in points {
                    let (a, b) = cap_chord_moments(
                        p,
                        *bandwidth,
                        DEFAULT_CAP_EXPONENT,
                        *density_const,
                        origin,
                        dir,
                        t0,
                        t1,
                    );
                    i0 += a;
                    i1 += b;
                }
                let k = points.len() as f64;
                (i0 / k, i1 / k)
            }
            Kind::Conditional { base, cut, side, normalizer } => {
                // restrict the parameter interval to the kept side
                let sc = f64::from(*side);
                let a = sc * (cut.normal().dot(origin) - cut.offset());
                let b = sc * cut.normal().dot(dir);
                let (mut lo, mut hi) = (t0, t1);
                if b.abs() < 1e-300 {
                    if a < 0.0 {
                        return (0.0, 0.0);
                    }
                } else {
                    let cross = -a / b;
                    if b > 0.0 {
                        lo = lo.max(cross);
                    } else {
                        hi = hi.min(cross);
                    }
                }
                if hi <= lo {
                    return (0.0, 0.0);
                }
                let (i0, i1) = base.line_moments(origin, dir, lo, hi);
                (i0 * normalizer, i1 * normalizer)
            }
        }
    }
}

fn reference_level(s: f64) -> f64 {
    if s > 0.5 {
        0.0
    } else if s < -0.5 {
        1.0
    } else {
        0.5
    }
}

fn compensated_cap_excess(n: usize, k: u32, s: f64, alpha: f64) -> f64 {
    // exact when alpha happens to sit at a reference level; otherwise the
    // plain subtraction is fine because the mass is O(1) away from alpha
    for t in [0.0, 0.5, 1.0] {
        if alpha == t {
            return cap_fraction_excess(n, k, s, t);
        }
    }
    cap_fraction(n, k, s) - alpha
}

fn ratio_estimate(hits: usize, total: usize) -> MassValue {
    let n = total as f64;
    let p = hits as f64 / n;
    // three standard errors with a continuity floor
    let var = (hits as f64 + 0.5) * (total as f64 - hits as f64 + 0.5) / (n * n * n);
    MassValue { value: p, error_bound: 3.0 * var.sqrt() }
}

fn sample_ball<R: Rng>(rng: &mut R, center: &Vector, radius: f64, n: usize) -> Vector {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let d = Vector::new(g);
        let norm = d.norm();
        if norm > 1e-12 {
            let u: f64 = rng.random();
            let rho = radius * u.powf(1.0 / n as f64);
            return center.add(&d.scale(rho / norm));
        }
    }
}

fn vertex_mean(pts: &[Vector]) -> Vector {
    let n = pts[0].dim();
    let mut c = Vector::zeros(n);
    for p in pts {
        c = c.add(p);
    }
    c.scale(1.0 / pts.len() as f64)
}

fn aabb(pts: &[Vector]) -> (Vector, Vector) {
    let n = pts[0].dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in pts {
        for (i, &x) in p.0.iter().enumerate() {
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    (Vector::new(lo), Vector::new(hi))
}

fn in_facets(facets: &[(Vector, f64)], x: &Vector, tol: f64) -> bool {
    facets.iter().all(|(v, off)| v.dot(x) <= off + tol)
}

/// Even-odd crossing test.
fn point_in_polygon(pts: &[Vector], x: &Vector) -> bool {
    let n = pts.len();
    let (px, py) = (x.0[0], x.0[1]);
    let mut inside = false;
    for i in 0..n {
        let a = &pts[i];
        let b = &pts[(i + 1) % n];
        let (ax, ay) = (a.0[0], a.0[1]);
        let (bx, by) = (b.0[0], b.0[1]);
        if (ay > py) != (by > py) {
            let t = (py - ay) / (by - ay);
            if px < ax + t * (bx - ax) {
                inside = !inside;
            }
        }
    }
    inside
}

/// Brute-force facet enumeration of `conv(vertices)` for small vertex
/// sets: every n-subset spanning a hyperplane with all vertices on one
/// side contributes an outward facet.
fn enumerate_facets(vertices: &[Vector], n: usize) -> Result<Vec<(Vector, f64)>> {
    let m = vertices.len();
    let combos = binomial(m, n);
    if combos > 200_000 {
        return Err(Error::UnsupportedConfiguration(format!(
            "polytope facet enumeration too large: C({m},{n}) subsets"
        )));
    }
    let mut facets: Vec<(Vector, f64)> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let pts: Vec<Vector> = idx.iter().map(|&i| vertices[i].clone()).collect();
        if let Some(v) = hyperplane_through(&pts) {
            let off = v.dot(&pts[0]);
            let dists: Vec<f64> = vertices.iter().map(|p| v.dot(p) - off).collect();
            let max = dists.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
            let tol = 1e-9 * (1.0 + off.abs());
            if max <= tol {
                push_facet(&mut facets, v.clone(), off);
            }
            if min >= -tol {
                push_facet(&mut facets, v.scale(-1.0), -off);
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return finish_facets(facets, n);
            }
            i -= 1;
            if idx[i] != i + m - n {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn finish_facets(facets: Vec<(Vector, f64)>, n: usize) -> Result<Vec<(Vector, f64)>> {
    if facets.len() < n + 1 {
        return Err(Error::InvalidParameter(
            "polytope is degenerate (not full-dimensional)".into(),
        ));
    }
    Ok(facets)
}

fn push_facet(facets: &mut Vec<(Vector, f64)>, v: Vector, off: f64) {
    let dup = facets
        .iter()
        .any(|(w, o)| v.dot(w) > 1.0 - 1e-9 && (off - o).abs() < 1e-9 * (1.0 + off.abs()));
    if !dup {
        facets.push((v, off));
    }
}

fn binomial(m: usize, n: usize) -> usize {
    let mut r = 1usize;
    for i in 0..n.min(m - n) {
        r = r.saturating_mul(m - i) / (i + 1);
    }
    r
}

fn uniform_chord_moments(
    center: &Vector,
    radius: f64,
    origin: &Vector,
    dir: &Vector,
    t0: f64,
    t1: f64,
    dens: f64,
) -> (f64, f64) {
    // chord of the disc along the line
    let d = origin.sub(center);
    let b = d.dot(dir);
    let c = d.dot(&d) - radius * radius;
    let disc = b * b - c;
    if disc <= 0.0 {
        return (0.0, 0.0);
    }
    let root = disc.sqrt();
    let (lo, hi) = ((-b - root).max(t0), (-b + root).min(t1));
    if hi <= lo {
        return (0.0, 0.0);
    }
    (dens * (hi - lo), dens * 0.5 * (hi * hi - lo * lo))
}

fn cap_chord_moments(
    center: &Vector,
    radius: f64,
    exponent: u32,
    density_const: f64,
    origin: &Vector,
    dir: &Vector,
    t0: f64,
    t1: f64,
) -> (f64, f64) {
    let d = origin.sub(center);
    let b = d.dot(dir);
    let c = d.dot(&d) - radius * radius;
    let disc = b * b - c;
    if disc <= 0.0 {
        return (0.0, 0.0);
    }
    let root = disc.sqrt();
    let (lo, hi) = ((-b - root).max(t0), (-b + root).min(t1));
    if hi <= lo {
        return (0.0, 0.0);
    }
    // density along the line is a polynomial of degree 2k in t:
    // GL with k+2 points is exact for both moments
    let (nodes, weights) = crate::numerics::gauss_legendre(exponent as usize + 2);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let r2 = radius * radius;
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    for (&x, &w) in nodes.iter().zip(&weights) {
        let t = mid + half * x;
        let p = origin.axpy(t, dir);
        let q2 = p.sub(center).dot(&p.sub(center)) / r2;
        let f = density_const * (1.0 - q2).max(0.0).powi(exponent as i32);
        i0 += w * f;
        i1 += w * f * t;
    }
    (i0 * half, i1 * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_disc() -> Measure {
        Measure::uniform_ball(Vector::new(vec![0.0, 0.0]), 1.0).unwrap()
    }

    fn square01() -> Measure {
        Measure::uniform_polytope(vec![
            Vector::new(vec![0.0, 0.0]),
            Vector::new(vec![1.0, 0.0]),
            Vector::new(vec![1.0, 1.0]),
            Vector::new(vec![0.0, 1.0]),
        ])
        .unwrap()
    }

    fn plane(v: Vec<f64>, lam: f64) -> Hyperplane {
        Hyperplane::new(Vector::new(v), lam).unwrap()
    }

    #[test]
    fn disc_halfspace_masses() {
        let m = unit_disc();
        assert!((m.mass_halfspace(&plane(vec![1.0, 0.0], 0.0)).unwrap().value - 0.5).abs() < 1e-15);
        assert!(m.mass_halfspace(&plane(vec![1.0, 0.0], 1.0)).unwrap().value.abs() < 1e-15);
        assert!((m.mass_halfspace(&plane(vec![1.0, 0.0], -1.0)).unwrap().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn disc_halfspace_against_mc_oracle() {
        // fixed-seed rejection oracle, 1e7 samples, 3 sigma
        let m = unit_disc();
        let h = plane(vec![1.0, 0.0], 0.5);
        let exact = m.mass_halfspace(&h).unwrap().value;
        let mc = m.mass_halfspace_mc(&h, 10_000_000, 42).unwrap();
        assert!((exact - mc.value).abs() <= mc.error_bound, "{exact} vs {:?}", mc);
    }

    #[test]
    fn square_mass_is_linear_in_offset() {
        let m = square01();
        let got = m.mass_halfspace(&plane(vec![1.0, 0.0], 0.75)).unwrap().value;
        assert!((got - 0.25).abs() < 1e-14);
    }

    #[test]
    fn mc_symmetry_and_bounds() {
        let m = unit_disc();
        let mv = m.mass_halfspace_mc(&plane(vec![0.0, 1.0], 0.0), 1_000_000, 7).unwrap();
        assert!((mv.value - 0.5).abs() <= mv.error_bound);
        assert!(mv.error_bound < 0.0016);
        // half-space containing the whole support
        let all = m.mass_halfspace_mc(&plane(vec![1.0, 0.0], -2.0), 1000, 7).unwrap();
        assert_eq!(all.value, 1.0);
    }

    #[test]
    fn smooth_cap_analytic_vs_mc() {
        let m = Measure::smooth_cap(Vector::new(vec![0.0, 0.0]), 1.0, 2).unwrap();
        let h = plane(vec![1.0, 0.0], 0.3);
        let a = m.mass_halfspace(&h).unwrap();
        let mc = m.mass_halfspace_mc(&h, 400_000, 11).unwrap();
        assert!((a.value - mc.value).abs() <= a.error_bound + mc.error_bound);
    }

    #[test]
    fn density_values() {
        let m = unit_disc();
        let inv_pi = 1.0 / std::f64::consts::PI;
        assert!((m.density_at(&Vector::new(vec![0.0, 0.0])) - inv_pi).abs() < 1e-15);
        assert_eq!(m.density_at(&Vector::new(vec![2.0, 0.0])), 0.0);
    }

    #[test]
    fn kernel_cloud_density_matches_direct_sum() {
        let pts = vec![
            Vector::new(vec![0.0, 0.0]),
            Vector::new(vec![0.5, 0.0]),
            Vector::new(vec![0.0, 0.75]),
        ];
        let bw = 0.9;
        let m = Measure::kernel_cloud(pts.clone(), bw).unwrap();
        let x = Vector::new(vec![0.1, 0.1]);
        let c = smooth_cap_density_constant(2, 2, bw);
        let mut expect = 0.0;
        for p in &pts {
            let q = x.dist(p) / bw;
            if q <= 1.0 {
                expect += c * (1.0 - q * q).powi(2);
            }
        }
        expect /= 3.0;
        assert!(expect > 0.0);
        assert!((m.density_at(&x) - expect).abs() < 1e-14);
    }

    #[test]
    fn bounding_balls() {
        let (c, r) = unit_disc().bounding_ball();
        assert_eq!(c, Vector::new(vec![0.0, 0.0]));
        assert_eq!(r, 1.0);
        let (c, r) = square01().bounding_ball();
        assert!((c.0[0] - 0.5).abs() < 1e-15 && (c.0[1] - 0.5).abs() < 1e-15);
        assert!((r - (0.5f64 * 2.0f64.sqrt())).abs() < 1e-12);
        let two = Measure::mixture(vec![
            (0.5, Measure::uniform_ball(Vector::new(vec![-2.0, 0.0]), 1.0).unwrap()),
            (0.5, Measure::uniform_ball(Vector::new(vec![2.0, 0.0]), 1.0).unwrap()),
        ])
        .unwrap();
        let (c, r) = two.bounding_ball();
        assert!(r >= 3.0);
        for ctr in [[-2.0, 0.0], [2.0, 0.0]] {
            assert!(Vector::new(ctr.to_vec()).dist(&c) + 1.0 <= r + 1e-12);
        }
    }

    #[test]
    fn normalization_overlap_is_null() {
        let m = Measure::mixture(vec![
            (0.3, unit_disc()),
            (0.7, Measure::smooth_cap(Vector::new(vec![0.4, 0.1]), 1.5, 2).unwrap()),
        ])
        .unwrap();
        let h = plane(vec![0.6, 0.8], 0.2);
        let a = m.mass_halfspace(&h).unwrap().value;
        let b = m.mass_halfspace(&h.flipped()).unwrap().value;
        assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_offset() {
        let m = Measure::mixture(vec![
            (0.5, unit_disc()),
            (0.5, square01()),
        ])
        .unwrap();
        let v = Vector::new(vec![0.8, -0.6]);
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let lam = -2.0 + 4.0 * i as f64 / 39.0;
            let h = Hyperplane::new(v.clone(), lam).unwrap();
            let cur = m.mass_halfspace(&h).unwrap().value;
            assert!(cur <= prev + 1e-12);
            prev = cur;
        }
    }

    #[test]
    fn polytope_3d_quadrature() {
        // unit cube: volume 1, half-space mass linear in the cut
        let mut verts = Vec::new();
        for ix in 0..2 {
            for iy in 0..2 {
                for iz in 0..2 {
                    verts.push(Vector::new(vec![ix as f64, iy as f64, iz as f64]));
                }
            }
        }
        let m = Measure::uniform_polytope_with_budget(verts, 1 << 14).unwrap();
        let h = plane(vec![1.0, 0.0, 0.0], 0.25);
        let mv = m.mass_halfspace(&h).unwrap();
        assert!(mv.error_bound > 0.0);
        assert!((mv.value - 0.75).abs() < 0.02, "{mv:?}");
        let mc = m.mass_halfspace_mc(&h, 200_000, 3).unwrap();
        assert!((mv.value - mc.value).abs() <= mv.error_bound + mc.error_bound);
    }

    #[test]
    fn wedge_masses_square() {
        let m = square01();
        let quad = m
            .mass_intersection(&[
                (plane(vec![1.0, 0.0], 0.5), 1),
                (plane(vec![0.0, 1.0], 0.25), -1),
            ])
            .unwrap();
        assert!((quad.value - 0.5 * 0.25).abs() < 1e-13);
    }

    #[test]
    fn mass_excess_is_precise_near_tangency() {
        // mixture with one component barely cut: plain subtraction loses
        // the signal, the compensated path keeps it
        let m = Measure::mixture(vec![
            (0.5, Measure::smooth_cap(Vector::new(vec![0.0, 2.0]), 1.0, 2).unwrap()),
            (0.5, Measure::smooth_cap(Vector::new(vec![0.0, 0.0]), 1.0, 2).unwrap()),
        ])
        .unwrap();
        let u = 1e-6; // cut depth into the upper cap
        let h = plane(vec![0.0, 1.0], 1.0 + u);
        // expected: 0.5*(1 - tail(1-u)) + 0.5*tail(...) ... relative to 0.5
        let excess = m.mass_excess(&h, 0.5).unwrap();
        let tail = crate::numerics::cap_fraction_tail(2, 2, 1.0 - u);
        assert!(tail > 0.0);
        assert!(
            (excess + 0.5 * tail).abs() < 1e-3 * tail,
            "excess {excess} vs -0.5*tail {}",
            -0.5 * tail
        );
    }
}
