//! Exact planar geometry: polygon clipping against half-planes,
//! line/polygon chords, and masses of radially symmetric densities
//! restricted to an intersection of half-planes.

use crate::geom::Vector;
use crate::numerics::integrate_gl;

/// Signed shoelace area (positive for counter-clockwise vertex order).
pub fn polygon_area_signed(pts: &[Vector]) -> f64 {
    if pts.len() < 3 {
        return 0.0;
    }
    let n = pts.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = &pts[i];
        let q = &pts[(i + 1) % n];
        a += p.0[0] * q.0[1] - q.0[0] * p.0[1];
    }
    0.5 * a
}

pub fn polygon_area(pts: &[Vector]) -> f64 {
    polygon_area_signed(pts).abs()
}

pub fn polygon_centroid(pts: &[Vector]) -> Vector {
    let n = pts.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut a = 0.0;
    for i in 0..n {
        let p = &pts[i];
        let q = &pts[(i + 1) % n];
        let w = p.0[0] * q.0[1] - q.0[0] * p.0[1];
        a += w;
        cx += (p.0[0] + q.0[0]) * w;
        cy += (p.0[1] + q.0[1]) * w;
    }
    if a.abs() < 1e-300 {
        // degenerate: fall back to the vertex mean
        let m = pts.len() as f64;
        return Vector::new(vec![
            pts.iter().map(|p| p.0[0]).sum::<f64>() / m,
            pts.iter().map(|p| p.0[1]).sum::<f64>() / m,
        ]);
    }
    Vector::new(vec![cx / (3.0 * a), cy / (3.0 * a)])
}

/// Sutherland-Hodgman clip of a simple polygon against the half-plane
/// `side * (<x,v> - lambda) >= 0`.
pub fn clip_polygon(pts: &[Vector], v: &Vector, lambda: f64, side: i8) -> Vec<Vector> {
    let s = f64::from(side);
    let mut out: Vec<Vector> = Vec::with_capacity(pts.len() + 2);
    let n = pts.len();
    for i in 0..n {
        let a = &pts[i];
        let b = &pts[(i + 1) % n];
        let da = s * (v.dot(a) - lambda);
        let db = s * (v.dot(b) - lambda);
        if da >= 0.0 {
            out.push(a.clone());
            if db < 0.0 {
                let t = da / (da - db);
                out.push(a.add(&b.sub(a).scale(t)));
            }
        } else if db >= 0.0 {
            let t = da / (da - db);
            out.push(a.add(&b.sub(a).scale(t)));
        }
    }
    out
}

/// Parameter intervals `t` along `origin + t * dir` lying inside a simple
/// polygon. For convex polygons this is a single interval.
pub fn line_polygon_intervals(pts: &[Vector], origin: &Vector, dir: &Vector) -> Vec<(f64, f64)> {
    // Collect crossing parameters; pair them up after sorting.
    let n = pts.len();
    let mut ts: Vec<f64> = Vec::new();
    // normal to the ray: points with <x - origin, nrm> = 0 lie on the line
    let nrm = Vector::new(vec![-dir.0[1], dir.0[0]]);
    for i in 0..n {
        let a = &pts[i];
        let b = &pts[(i + 1) % n];
        let da = nrm.dot(&a.sub(origin));
        let db = nrm.dot(&b.sub(origin));
        if (da > 0.0) != (db > 0.0) {
            let u = da / (da - db);
            let p = a.add(&b.sub(a).scale(u));
            ts.push(dir.dot(&p.sub(origin)));
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// A half-plane constraint `<x, normal> >= offset` with unit normal.
#[derive(Debug, Clone)]
pub struct HalfPlane {
    pub normal: Vector,
    pub offset: f64,
}

/// Mass of a radially symmetric planar density centered at `center`,
/// supported on radius `r`, restricted to the intersection of the given
/// half-planes. `radial_anti(rho)` must be the antiderivative of
/// `rho * f(rho) * (angular measure 1)`, i.e. mass in a sector of width
/// `dtheta` and radius `[a,b]` is `(radial_anti(b)-radial_anti(a)) * dtheta`.
///
/// Exact up to Gauss-Legendre error on piecewise-analytic arcs; the
/// breakpoint set covers every kink of the radial bounds.
pub fn radial_wedge_mass<F: Fn(f64) -> f64>(
    center: &Vector,
    r: f64,
    halves: &[HalfPlane],
    radial_anti: F,
) -> f64 {
    use std::f64::consts::PI;
    // Each constraint in polar form about the center:
    //   rho * cos(theta - phi_j) >= c_j      (c_j = offset - <normal, center>)
    let polar: Vec<(f64, f64)> = halves
        .iter()
        .map(|h| {
            let c = h.offset - h.normal.dot(center);
            let phi = h.normal.0[1].atan2(h.normal.0[0]);
            (phi, c)
        })
        .collect();

    // quick rejects/accepts
    for &(_, c) in &polar {
        if c >= r {
            return 0.0; // constraint excludes the whole disc (boundary has measure 0)
        }
    }

    let mut breaks: Vec<f64> = vec![0.0, 2.0 * PI];
    let mut push = |t: f64| {
        let mut t = t % (2.0 * PI);
        if t < 0.0 {
            t += 2.0 * PI;
        }
        breaks.push(t);
    };
    for &(phi, c) in &polar {
        // cos(theta - phi) = 0: bound flips between lower/empty
        push(phi + PI / 2.0);
        push(phi - PI / 2.0);
        // bound hits the rim: cos(theta - phi) = c / r
        let q = c / r;
        if q.abs() <= 1.0 {
            let d = q.acos();
            push(phi + d);
            push(phi - d);
        }
    }
    // pairwise bound crossings: c_i cos(t - phi_j) = c_j cos(t - phi_i)
    for i in 0..polar.len() {
        for j in i + 1..polar.len() {
            let (pi_, ci) = polar[i];
            let (pj, cj) = polar[j];
            let a = ci * pj.cos() - cj * pi_.cos();
            let b = ci * pj.sin() - cj * pi_.sin();
            if a.abs() + b.abs() > 1e-300 {
                let t0 = b.atan2(a) + PI / 2.0;
                push(t0);
                push(t0 + PI);
            }
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

    // radial interval [lo, hi] at angle theta
    let interval = |theta: f64| -> Option<(f64, f64)> {
        let mut lo = 0.0_f64;
        let mut hi = r;
        for &(phi, c) in &polar {
            let g = (theta - phi).cos();
            if g.abs() < 1e-15 {
                if c > 0.0 {
                    return None;
                }
                continue;
            }
            let bound = c / g;
            if g > 0.0 {
                lo = lo.max(bound);
            } else if bound >= 0.0 {
                hi = hi.min(bound);
            } else {
                return None; // rho <= negative: empty
            }
        }
        (lo < hi).then_some((lo, hi))
    };

    let mut mass = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 1e-14 {
            continue;
        }
        mass += integrate_gl(
            |t| match interval(t) {
                Some((lo, hi)) => radial_anti(hi) - radial_anti(lo),
                None => 0.0,
            },
            a,
            b,
            32,
        );
    }
    mass
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square01() -> Vec<Vector> {
        vec![
            Vector::new(vec![0.0, 0.0]),
            Vector::new(vec![1.0, 0.0]),
            Vector::new(vec![1.0, 1.0]),
            Vector::new(vec![0.0, 1.0]),
        ]
    }

    #[test]
    fn clip_square() {
        let v = Vector::new(vec![1.0, 0.0]);
        let clipped = clip_polygon(&square01(), &v, 0.75, 1);
        assert!((polygon_area(&clipped) - 0.25).abs() < 1e-14);
        let other = clip_polygon(&square01(), &v, 0.75, -1);
        assert!((polygon_area(&other) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn centroid_of_square() {
        let c = polygon_centroid(&square01());
        assert!((c.0[0] - 0.5).abs() < 1e-14);
        assert!((c.0[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn chord_through_square() {
        let o = Vector::new(vec![0.5, 0.5]);
        let d = Vector::new(vec![1.0, 0.0]);
        let iv = line_polygon_intervals(&square01(), &o, &d);
        assert_eq!(iv.len(), 1);
        assert!((iv[0].0 + 0.5).abs() < 1e-14 && (iv[0].1 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn wedge_quarter_disc() {
        // uniform unit disc cut to a quadrant: area pi/4
        let c = Vector::new(vec![0.0, 0.0]);
        let halves = vec![
            HalfPlane { normal: Vector::new(vec![1.0, 0.0]), offset: 0.0 },
            HalfPlane { normal: Vector::new(vec![0.0, 1.0]), offset: 0.0 },
        ];
        let m = radial_wedge_mass(&c, 1.0, &halves, |rho| 0.5 * rho * rho);
        assert!((m - PI / 4.0).abs() < 1e-10, "{m}");
    }

    #[test]
    fn wedge_matches_cap_fraction() {
        // single constraint = half-space mass of the uniform disc
        let c = Vector::new(vec![0.3, -0.2]);
        let r = 1.7;
        for s in [-0.9, -0.3, 0.0, 0.4, 0.95] {
            let halves = vec![HalfPlane {
                normal: Vector::new(vec![0.6, 0.8]),
                offset: Vector::new(vec![0.6, 0.8]).dot(&c) + s * r,
            }];
            let m = radial_wedge_mass(&c, r, &halves, |rho| 0.5 * rho * rho)
                / (PI * r * r);
            let expect = crate::numerics::cap_fraction(2, 0, s);
            assert!((m - expect).abs() < 1e-10, "s={s}: {m} vs {expect}");
        }
    }

    #[test]
    fn wedge_off_center_crossing() {
        // two generic half-planes against a shifted disc, versus a dense
        // midpoint-rule reference
        let c = Vector::new(vec![0.4, 0.1]);
        let r = 1.3;
        let halves = vec![
            HalfPlane { normal: Vector::new(vec![1.0, 0.0]), offset: 0.3 },
            HalfPlane {
                normal: Vector::new(vec![-0.6, 0.8]),
                offset: -0.2,
            },
        ];
        let m = radial_wedge_mass(&c, r, &halves, |rho| 0.5 * rho * rho);
        // brute-force grid reference
        let n = 2001;
        let mut acc = 0.0;
        let h = 2.0 * r / n as f64;
        for i in 0..n {
            for j in 0..n {
                let x = c.0[0] - r + (i as f64 + 0.5) * h;
                let y = c.0[1] - r + (j as f64 + 0.5) * h;
                let p = Vector::new(vec![x, y]);
                if p.dist(&c) <= r
                    && halves.iter().all(|hp| hp.normal.dot(&p) >= hp.offset)
                {
                    acc += h * h;
                }
            }
        }
        assert!((m - acc).abs() < 5e-3, "{m} vs {acc}");
    }
}
