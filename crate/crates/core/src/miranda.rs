//! Box certificates for zeros of continuous maps: a map whose i-th
//! component is sign-consistent on the pair of opposite facets in axis i
//! has a zero in the box. Face conditions are checked on sampled facet
//! lattices; certificates therefore carry the grid density and the
//! minimum sign-adjusted value as strength evidence rather than an
//! absolute guarantee.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vector;

/// An axis-aligned box `[lower, upper]` in `R^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lower: Vector,
    pub upper: Vector,
}

impl BoxRegion {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch { expected: lower.dim(), got: upper.dim() });
        }
        if lower.0.iter().zip(&upper.0).any(|(a, b)| a > b || !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidParameter("box needs lower <= upper, finite".into()));
        }
        Ok(BoxRegion { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn width(&self) -> f64 {
        self.lower
            .0
            .iter()
            .zip(&self.upper.0)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.lower
            .0
            .iter()
            .zip(&self.upper.0)
            .zip(&x.0)
            .all(|((a, b), xi)| *a - tol <= *xi && *xi <= *b + tol)
    }

    fn longest_axis(&self) -> usize {
        let mut best = 0;
        let mut w = f64::NEG_INFINITY;
        for i in 0..self.dim() {
            let wi = self.upper.0[i] - self.lower.0[i];
            if wi > w {
                w = wi;
                best = i;
            }
        }
        best
    }

    fn split(&self) -> (BoxRegion, BoxRegion) {
        let ax = self.longest_axis();
        let mid = 0.5 * (self.lower.0[ax] + self.upper.0[ax]);
        let mut left = self.clone();
        let mut right = self.clone();
        left.upper.0[ax] = mid;
        right.lower.0[ax] = mid;
        (left, right)
    }
}

/// Evidence for one facet condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceCondition {
    pub axis: usize,
    /// +1 for the upper facet, -1 for the lower one.
    pub sign: i8,
    pub satisfied: bool,
    /// Minimum of the sign-adjusted component over the sampled lattice.
    pub min_observed: f64,
    pub sample_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    /// Both orientations of some axis are strictly violated; no grid
    /// refinement can certify this box.
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MirandaCertificate {
    pub region: BoxRegion,
    pub conditions: Vec<FaceCondition>,
    pub grid_density: usize,
    pub verdict: Verdict,
    /// Orientation chosen per axis (+1 keeps the component, -1 flips it).
    pub orientation: Vec<i8>,
}

/// Uniform lattice on the facet `x[axis] = (sign > 0 ? upper : lower)`,
/// `grid` nodes per remaining axis.
fn facet_lattice(region: &BoxRegion, axis: usize, sign: i8, grid: usize) -> Vec<Vector> {
    let k = region.dim();
    let fixed = if sign > 0 { region.upper.0[axis] } else { region.lower.0[axis] };
    let mut nodes = Vec::new();
    let free: Vec<usize> = (0..k).filter(|&j| j != axis).collect();
    let mut counters = vec![0usize; free.len()];
    loop {
        let mut x = vec![0.0; k];
        x[axis] = fixed;
        for (idx, &j) in free.iter().enumerate() {
            let t = if grid == 1 {
                0.5
            } else {
                counters[idx] as f64 / (grid - 1) as f64
            };
            x[j] = region.lower.0[j] + t * (region.upper.0[j] - region.lower.0[j]);
        }
        nodes.push(Vector::new(x));
        // odometer
        let mut carry = true;
        for c in counters.iter_mut() {
            if carry {
                *c += 1;
                if *c == grid {
                    *c = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    nodes
}

struct FaceStats {
    min: f64,
    max: f64,
    count: usize,
}

fn face_stats<F>(g: &F, region: &BoxRegion, axis: usize, sign: i8, grid: usize) -> Result<Vec<FaceStats>>
where
    F: Fn(&Vector) -> Vec<f64>,
{
    let k = region.dim();
    let mut stats: Vec<FaceStats> =
        (0..k).map(|_| FaceStats { min: f64::INFINITY, max: f64::NEG_INFINITY, count: 0 }).collect();
    for node in facet_lattice(region, axis, sign, grid) {
        let vals = g(&node);
        debug_assert_eq!(vals.len(), k);
        for (i, &v) in vals.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEvaluation { point: node.0.clone(), component: i });
            }
            stats[i].min = stats[i].min.min(v);
            stats[i].max = stats[i].max.max(v);
            stats[i].count += 1;
        }
    }
    Ok(stats)
}

/// Checks the face sign conditions of `g` on the box, trying both
/// orientations of every axis. `grid` is the node count per facet axis.
pub fn check_faces<F>(g: &F, region: &BoxRegion, grid: usize) -> Result<MirandaCertificate>
where
    F: Fn(&Vector) -> Vec<f64>,
{
    if grid < 2 {
        return Err(Error::InvalidParameter("grid must be at least 2".into()));
    }
    let k = region.dim();
    let mut conditions = Vec::with_capacity(2 * k);
    let mut orientation = vec![1i8; k];
    let mut all_ok = true;
    let mut refuted = false;
    for axis in 0..k {
        let up = face_stats(g, region, axis, 1, grid)?;
        let lo = face_stats(g, region, axis, -1, grid)?;
        let plus_ok = up[axis].min >= 0.0 && lo[axis].max <= 0.0;
        let minus_ok = up[axis].max <= 0.0 && lo[axis].min >= 0.0;
        let orient: i8 = if plus_ok || !minus_ok { 1 } else { -1 };
        orientation[axis] = orient;
        let ok = plus_ok || minus_ok;
        if !ok {
            all_ok = false;
            // both orientations strictly broken: refinement cannot help
            let plus_broken = up[axis].min < 0.0 || lo[axis].max > 0.0;
            let minus_broken = up[axis].max > 0.0 || lo[axis].min < 0.0;
            if plus_broken && minus_broken {
                refuted = true;
            }
        }
        conditions.push(FaceCondition {
            axis,
            sign: 1,
            satisfied: ok,
            min_observed: if orient == 1 { up[axis].min } else { -up[axis].max },
            sample_count: up[axis].count,
        });
        conditions.push(FaceCondition {
            axis,
            sign: -1,
            satisfied: ok,
            min_observed: if orient == 1 { -lo[axis].max } else { lo[axis].min },
            sample_count: lo[axis].count,
        });
    }
    let verdict = if all_ok {
        Verdict::Certified
    } else if refuted {
        Verdict::Refuted
    } else {
        Verdict::Inconclusive
    };
    Ok(MirandaCertificate { region: region.clone(), conditions, grid_density: grid, verdict, orientation })
}

/// Localizes a zero by recursive bisection of the longest axis: boxes
/// where some component keeps a strict sign over all facet samples are
/// discarded; the first box (in depth-then-creation order) of width at
/// most `tol` whose faces certify is returned.
pub fn miranda_root<F>(
    g: &F,
    region: &BoxRegion,
    tol: f64,
    max_depth: usize,
    grid: usize,
) -> Result<Option<(BoxRegion, MirandaCertificate)>>
where
    F: Fn(&Vector) -> Vec<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if grid < 2 {
        return Err(Error::InvalidParameter("grid must be at least 2".into()));
    }
    let k = region.dim();
    let mut queue: std::collections::VecDeque<(usize, BoxRegion)> = std::collections::VecDeque::new();
    queue.push_back((0, region.clone()));
    while let Some((depth, b)) = queue.pop_front() {
        // constant-sign pruning over all facet samples
        let mut mins = vec![f64::INFINITY; k];
        let mut maxs = vec![f64::NEG_INFINITY; k];
        for axis in 0..k {
            for sign in [1i8, -1] {
                let stats = face_stats(g, &b, axis, sign, grid)?;
                for i in 0..k {
                    mins[i] = mins[i].min(stats[i].min);
                    maxs[i] = maxs[i].max(stats[i].max);
                }
            }
        }
        if (0..k).any(|i| mins[i] > 0.0 || maxs[i] < 0.0) {
            continue;
        }
        if b.width() <= tol {
            let cert = check_faces(g, &b, grid)?;
            if cert.verdict == Verdict::Certified {
                return Ok(Some((b, cert)));
            }
        }
        if depth < max_depth {
            let (l, r) = b.split();
            queue.push_back((depth + 1, l));
            queue.push_back((depth + 1, r));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(k: usize) -> BoxRegion {
        BoxRegion::new(Vector::new(vec![-1.0; k]), Vector::new(vec![1.0; k])).unwrap()
    }

    #[test]
    fn identity_certifies() {
        for k in 1..=4 {
            let cert = check_faces(&|x: &Vector| x.0.clone(), &cube(k), 3).unwrap();
            assert_eq!(cert.verdict, Verdict::Certified);
            assert_eq!(cert.conditions.len(), 2 * k);
            assert!(cert.conditions.iter().all(|c| c.satisfied && c.min_observed >= 0.0));
        }
    }

    #[test]
    fn coupled_linear_map_face_minima() {
        // g(x,y) = (x + 0.3 y, y - 0.2 x): sign-adjusted face minima are
        // 0.7 and 0.8 at the corners
        let g = |x: &Vector| vec![x.0[0] + 0.3 * x.0[1], x.0[1] - 0.2 * x.0[0]];
        let cert = check_faces(&g, &cube(2), 5).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        let m0 = cert
            .conditions
            .iter()
            .filter(|c| c.axis == 0)
            .map(|c| c.min_observed)
            .fold(f64::INFINITY, f64::min);
        let m1 = cert
            .conditions
            .iter()
            .filter(|c| c.axis == 1)
            .map(|c| c.min_observed)
            .fold(f64::INFINITY, f64::min);
        assert!((m0 - 0.7).abs() < 1e-12, "{m0}");
        assert!((m1 - 0.8).abs() < 1e-12, "{m1}");
    }

    #[test]
    fn shifted_scalar_is_refuted() {
        let g = |x: &Vector| vec![x.0[0] - 2.0];
        let cert = check_faces(&g, &cube(1), 2).unwrap();
        assert_ne!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.verdict, Verdict::Refuted);
    }

    #[test]
    fn flipped_orientation_certifies() {
        // decreasing component: orientation -1 must rescue it
        let g = |x: &Vector| vec![-x.0[0], x.0[1]];
        let cert = check_faces(&g, &cube(2), 3).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.orientation, vec![-1, 1]);
    }

    #[test]
    fn root_localization_linear() {
        let g = |x: &Vector| vec![x.0[0] - 0.25, x.0[1] + 0.5];
        let (b, cert) = miranda_root(&g, &cube(2), 1e-6, 80, 3).unwrap().unwrap();
        assert!(b.width() <= 1e-6);
        assert_eq!(cert.verdict, Verdict::Certified);
        assert!(b.contains(&Vector::new(vec![0.25, -0.5]), 1e-12));
    }

    #[test]
    fn no_zero_prunes_to_none() {
        let g = |_: &Vector| vec![1.0, 1.0];
        assert!(miranda_root(&g, &cube(2), 1e-3, 40, 3).unwrap().is_none());
    }

    #[test]
    fn orientation_invariance() {
        // negating one component flips that axis orientation, same verdict
        let g = |x: &Vector| vec![x.0[0] + 0.3 * x.0[1], x.0[1] - 0.2 * x.0[0]];
        let gneg = |x: &Vector| {
            let v = g(x);
            vec![-v[0], v[1]]
        };
        let a = check_faces(&g, &cube(2), 5).unwrap();
        let b = check_faces(&gneg, &cube(2), 5).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(b.orientation, vec![-1, 1]);
    }

    #[test]
    fn refinement_keeps_certificate() {
        let g = |x: &Vector| vec![x.0[0] + 0.3 * x.0[1], x.0[1] - 0.2 * x.0[0]];
        for grid in [2, 4, 8, 16, 32] {
            let cert = check_faces(&g, &cube(2), grid).unwrap();
            assert_eq!(cert.verdict, Verdict::Certified, "grid {grid}");
        }
    }

    #[test]
    fn nonfinite_evaluation_is_reported() {
        let g = |x: &Vector| vec![if x.0[0] > 0.5 { f64::NAN } else { x.0[0] }];
        let err = check_faces(&g, &cube(1), 2);
        assert!(matches!(err, Err(Error::NonFiniteEvaluation { .. })));
    }
}
