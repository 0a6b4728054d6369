//! Strict separation of point sets by hyperplanes: for every sign
//! pattern there must be a hyperplane placing each set strictly in the
//! open half-space of its sign. Decided by linear feasibility over the
//! hyperplane coefficients with the margin as normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Hyperplane, Vector};
use crate::lp::{solve_lp_max, LpOutcome};
use crate::measure::Measure;
use crate::numerics::sphere_lattice;

/// A (possibly partial) assignment of signs to set indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignPattern {
    signs: Vec<Option<i8>>,
}

impl SignPattern {
    pub fn total(signs: Vec<i8>) -> Self {
        assert!(signs.iter().all(|s| *s == 1 || *s == -1));
        SignPattern { signs: signs.into_iter().map(Some).collect() }
    }

    pub fn empty(len: usize) -> Self {
        SignPattern { signs: vec![None; len] }
    }

    pub fn set(&mut self, i: usize, sign: i8) {
        assert!(sign == 1 || sign == -1);
        self.signs[i] = Some(sign);
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<i8> {
        self.signs.get(i).copied().flatten()
    }

    pub fn is_total(&self) -> bool {
        self.signs.iter().all(|s| s.is_some())
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.signs.len()).filter(|&i| self.signs[i].is_some()).collect()
    }

    pub fn negated(&self) -> SignPattern {
        SignPattern { signs: self.signs.iter().map(|s| s.map(|x| -x)).collect() }
    }
}

/// A finite set of points standing in for a (generally continuous) set:
/// vertices of a polytope or boundary samples of a curved body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet(pub Vec<Vector>);

impl PointSet {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("point set must be nonempty".into()));
        }
        let d = points[0].dim();
        if points.iter().any(|p| p.dim() != d || !p.is_finite()) {
            return Err(Error::DimensionMismatch { expected: d, got: 0 });
        }
        Ok(PointSet(points))
    }

    pub fn dim(&self) -> usize {
        self.0[0].dim()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Circumscribing samples of a measure's support: polytope vertices
    /// as-is; balls and caps as boundary lattices pushed outward so the
    /// sampled hull covers the true ball; mixtures and clouds as unions.
    ///
    /// A separation certificate for these samples therefore covers the
    /// continuous support.
    pub fn from_support(m: &Measure) -> PointSet {
        PointSet(support_samples(m))
    }
}

/// Boundary sample counts for curved supports, and the corresponding
/// radius inflation covering the sampling sag.
fn ball_samples(dim: usize) -> (usize, f64) {
    match dim {
        1 => (2, 1.0),
        2 => {
            let k = 64;
            (k, 1.0 / (std::f64::consts::PI / k as f64).cos())
        }
        _ => (256, 1.05),
    }
}

fn support_samples(m: &Measure) -> Vec<Vector> {
    use crate::measure::MeasureSpec;
    fn ball_boundary(center: &Vector, radius: f64, dim: usize) -> Vec<Vector> {
        let (count, inflate) = ball_samples(dim);
        if dim == 1 {
            return vec![
                Vector::new(vec![center.0[0] - radius]),
                Vector::new(vec![center.0[0] + radius]),
            ];
        }
        sphere_lattice(dim, count)
            .into_iter()
            .map(|u| center.axpy(radius * inflate, &u))
            .collect()
    }
    match m.spec() {
        MeasureSpec::UniformBall { center, radius } => {
            ball_boundary(&Vector::new(center), radius, m.dim())
        }
        MeasureSpec::SmoothCap { center, radius, .. } => {
            ball_boundary(&Vector::new(center), radius, m.dim())
        }
        MeasureSpec::UniformPolytope { vertices } => {
            vertices.into_iter().map(Vector::new).collect()
        }
        MeasureSpec::Mixture { components } => components
            .into_iter()
            .flat_map(|c| {
                let sub = Measure::from_spec(c.measure).expect("component spec round-trips");
                support_samples(&sub)
            })
            .collect(),
        MeasureSpec::KernelCloud { points, bandwidth } => points
            .into_iter()
            .flat_map(|p| ball_boundary(&Vector::new(p), bandwidth, m.dim()))
            .collect(),
        // a conditional's support sits inside its base's support, so the
        // base samples still circumscribe it
        MeasureSpec::Conditional { base, .. } => {
            let sub = Measure::from_spec(*base).expect("base spec round-trips");
            support_samples(&sub)
        }
    }
}

/// Result of a full separability check.
#[derive(Debug, Clone)]
pub struct SeparabilityReport {
    pub separable: bool,
    /// Witness per satisfied pattern (patterns fixed to sign +1 on the
    /// first set; the negated pattern is witnessed by the flipped plane).
    pub witnesses: Vec<(SignPattern, Hyperplane)>,
    pub failing_pattern: Option<SignPattern>,
    /// The strictness margin every witness satisfies.
    pub margin: f64,
}

/// Searches for a hyperplane with `sigma(i) * (<v,x> - lambda) >= margin`
/// for every sample `x` of every set, `|v| = 1`. Returns the witness or
/// `None` when the pattern is infeasible at this margin.
pub fn separating_hyperplane(
    sets: &[PointSet],
    sigma: &SignPattern,
    margin: f64,
) -> Result<Option<Hyperplane>> {
    if sets.is_empty() {
        return Err(Error::InvalidParameter("need at least one set".into()));
    }
    if sigma.len() != sets.len() || !sigma.is_total() {
        return Err(Error::InvalidParameter(
            "sign pattern must assign every set".into(),
        ));
    }
    if !(margin > 0.0) {
        return Err(Error::InvalidParameter("margin must be positive".into()));
    }
    let n = sets[0].dim();
    for s in sets {
        if s.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: s.dim() });
        }
    }
    // Normalize by pinning one coordinate of v to +-1 (2n programs) so
    // the trivial v = 0 vertex is excluded; keep the best geometric margin.
    let mut best: Option<(f64, Hyperplane)> = None;
    for pin in 0..n {
        for pin_sign in [1.0, -1.0] {
            if let Some((t_geom, h)) = pinned_margin_lp(sets, sigma, pin, pin_sign)? {
                if best.as_ref().map_or(true, |(bt, _)| t_geom > *bt) {
                    best = Some((t_geom, h));
                }
            }
        }
    }
    let Some((t_geom, h)) = best else {
        return Ok(None);
    };
    if t_geom < margin {
        return Ok(None);
    }
    // every returned witness re-verifies at half margin
    for (i, set) in sets.iter().enumerate() {
        let s = f64::from(sigma.get(i).unwrap());
        for x in &set.0 {
            if s * h.signed_dist(x) < margin / 2.0 {
                return Ok(None);
            }
        }
    }
    Ok(Some(h))
}

/// One margin-maximizing LP with `v[pin] = pin_sign` fixed. Returns the
/// geometric margin and the normalized witness.
fn pinned_margin_lp(
    sets: &[PointSet],
    sigma: &SignPattern,
    pin: usize,
    pin_sign: f64,
) -> Result<Option<(f64, Hyperplane)>> {
    let n = sets[0].dim();
    let scale = sets
        .iter()
        .flat_map(|s| s.0.iter())
        .map(|p| p.norm())
        .fold(0.0, f64::max)
        + 1.0;
    // free coordinates of v, doubled; then lambda+, lambda-, t
    let free: Vec<usize> = (0..n).filter(|&j| j != pin).collect();
    let nf = free.len();
    let nv = 2 * nf + 3;
    let t_col = nv - 1;
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        let s = f64::from(sigma.get(i).unwrap());
        for x in &set.0 {
            // t - s<v,x> + s*lambda <= s * pin_sign * x[pin]
            let mut row = vec![0.0; nv];
            for (k, &j) in free.iter().enumerate() {
                row[k] = -s * x.0[j];
                row[nf + k] = s * x.0[j];
            }
            row[2 * nf] = s;
            row[2 * nf + 1] = -s;
            row[t_col] = 1.0;
            a.push(row);
            b.push(s * pin_sign * x.0[pin]);
        }
    }
    for j in 0..2 * nf {
        let mut row = vec![0.0; nv];
        row[j] = 1.0;
        a.push(row);
        b.push(1.0);
    }
    for j in [2 * nf, 2 * nf + 1] {
        let mut row = vec![0.0; nv];
        row[j] = 1.0;
        a.push(row);
        b.push(scale);
    }
    let mut c = vec![0.0; nv];
    c[t_col] = 1.0;

    let solution = match solve_lp_max(&c, &a, &b) {
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Infeasible | LpOutcome::Unbounded => return Ok(None),
    };
    let t = solution[t_col];
    if t <= 0.0 {
        return Ok(None);
    }
    let mut v = vec![0.0; n];
    v[pin] = pin_sign;
    for (k, &j) in free.iter().enumerate() {
        v[j] = solution[k] - solution[nf + k];
    }
    let v = Vector::new(v);
    let norm = v.norm();
    let lambda = solution[2 * nf] - solution[2 * nf + 1];
    let h = Hyperplane::new(v, lambda)?;
    Ok(Some((t / norm, h)))
}

/// Decides whether n sets in `R^n` can be strictly separated: every one
/// of the `2^(n-1)` sign patterns with `sigma(1) = +1` must admit a
/// witness (the rest follow by negation symmetry).
pub fn check_separable(sets: &[PointSet], margin: f64) -> Result<SeparabilityReport> {
    if sets.is_empty() {
        return Err(Error::InvalidParameter("need at least one set".into()));
    }
    let n = sets[0].dim();
    if sets.len() != n {
        return Err(Error::UnsupportedConfiguration(format!(
            "separability needs as many sets as dimensions (got {} sets in R^{})",
            sets.len(),
            n
        )));
    }
    let mut witnesses = Vec::new();
    for code in 0..(1usize << (n - 1)) {
        let mut signs = vec![1i8; n];
        for (j, s) in signs.iter_mut().enumerate().skip(1) {
            if code >> (j - 1) & 1 == 1 {
                *s = -1;
            }
        }
        let sigma = SignPattern::total(signs);
        match separating_hyperplane(sets, &sigma, margin)? {
            Some(h) => witnesses.push((sigma, h)),
            None => {
                return Ok(SeparabilityReport {
                    separable: false,
                    witnesses,
                    failing_pattern: Some(sigma),
                    margin,
                })
            }
        }
    }
    Ok(SeparabilityReport { separable: true, witnesses, failing_pattern: None, margin })
}

/// Planar convex-hull disjointness via LP feasibility of a common point.
/// (In the plane, two convex sets are separable exactly when their hulls
/// are disjoint: a 0-dimensional transversal is a shared point.)
pub fn hulls_disjoint(a: &PointSet, b: &PointSet) -> Result<bool> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::UnsupportedConfiguration(
            "hull disjointness is a planar operation".into(),
        ));
    }
    // theta >= 0, phi >= 0, sum theta = 1, sum phi = 1,
    // sum theta a_i - sum phi b_j = 0  -> feasibility
    let na = a.len();
    let nb = b.len();
    let nv = na + nb;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut eq = |coeffs: Vec<f64>, val: f64| {
        rows.push(coeffs.clone());
        rhs.push(val);
        rows.push(coeffs.iter().map(|x| -x).collect());
        rhs.push(-val);
    };
    eq((0..nv).map(|j| if j < na { 1.0 } else { 0.0 }).collect(), 1.0);
    eq((0..nv).map(|j| if j >= na { 1.0 } else { 0.0 }).collect(), 1.0);
    for d in 0..2 {
        let mut coeffs = vec![0.0; nv];
        for (j, p) in a.0.iter().enumerate() {
            coeffs[j] = p.0[d];
        }
        for (j, q) in b.0.iter().enumerate() {
            coeffs[na + j] = -q.0[d];
        }
        eq(coeffs, 0.0);
    }
    let out = solve_lp_max(&vec![0.0; nv], &rows, &rhs);
    Ok(matches!(out, LpOutcome::Infeasible))
}

/// Affine independence of n points in `R^n` at the given tolerance
/// (rank of the difference matrix), the general-position side of the
/// singleton-separability correspondence.
pub fn affinely_independent(points: &[Vector], tol: f64) -> bool {
    let n = points[0].dim();
    if points.len() != n {
        return false;
    }
    let mut m: Vec<Vec<f64>> = points[1..].iter().map(|p| p.sub(&points[0]).0).collect();
    let rows = m.len();
    let mut rank = 0;
    for c in 0..n {
        let Some(best) = (rank..rows)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
        else {
            break;
        };
        if m[best][c].abs() <= tol {
            continue;
        }
        m.swap(rank, best);
        for i in rank + 1..rows {
            let f = m[i][c] / m[rank][c];
            for k in c..n {
                m[i][k] -= f * m[rank][k];
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank == rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc_samples(cx: f64, cy: f64, r: f64) -> PointSet {
        PointSet::from_support(
            &Measure::uniform_ball(Vector::new(vec![cx, cy]), r).unwrap(),
        )
    }

    #[test]
    fn two_far_discs_separate_both_ways() {
        let sets = [disc_samples(-2.0, 0.0, 1.0), disc_samples(2.0, 0.0, 1.0)];
        let sigma = SignPattern::total(vec![1, -1]);
        let h = separating_hyperplane(&sets, &sigma, 1e-7).unwrap().unwrap();
        // witness puts the left set on the positive side
        for x in &sets[0].0 {
            assert!(h.signed_dist(x) > 0.0);
        }
        for x in &sets[1].0 {
            assert!(h.signed_dist(x) < 0.0);
        }
        let h2 = separating_hyperplane(&sets, &sigma.negated(), 1e-7).unwrap();
        assert!(h2.is_some());
    }

    #[test]
    fn overlapping_discs_fail() {
        let sets = [disc_samples(-0.5, 0.0, 1.0), disc_samples(0.5, 0.0, 1.0)];
        let sigma = SignPattern::total(vec![1, -1]);
        assert!(separating_hyperplane(&sets, &sigma, 1e-7).unwrap().is_none());
    }

    #[test]
    fn check_separable_requires_matching_count() {
        let sets = [disc_samples(-2.0, 0.0, 1.0)];
        assert!(matches!(
            check_separable(&sets, 1e-7),
            Err(Error::UnsupportedConfiguration(_))
        ));
    }

    #[test]
    fn planar_pair_consistency_with_hulls() {
        let a = disc_samples(-2.0, 0.0, 1.0);
        let b = disc_samples(2.0, 0.5, 1.0);
        let rep = check_separable(&[a.clone(), b.clone()], 1e-7).unwrap();
        assert!(rep.separable);
        assert_eq!(rep.witnesses.len(), 2);
        assert!(hulls_disjoint(&a, &b).unwrap());

        let c = disc_samples(-0.5, 0.3, 1.0);
        let rep2 = check_separable(&[a.clone(), c.clone()], 1e-7).unwrap();
        // a and c overlap (centers 1.53 apart, radii 1 + 1)
        assert!(!rep2.separable);
        assert!(rep2.failing_pattern.is_some());
        assert!(!hulls_disjoint(&a, &c).unwrap());
    }

    #[test]
    fn one_dimensional_interval_is_separable() {
        let s = PointSet::new(vec![Vector::new(vec![0.0]), Vector::new(vec![1.0])]).unwrap();
        let rep = check_separable(&[s], 1e-7).unwrap();
        assert!(rep.separable);
    }

    #[test]
    fn hull_tests() {
        let sq = |dx: f64| {
            PointSet::new(vec![
                Vector::new(vec![dx, 0.0]),
                Vector::new(vec![dx + 1.0, 0.0]),
                Vector::new(vec![dx + 1.0, 1.0]),
                Vector::new(vec![dx, 1.0]),
            ])
            .unwrap()
        };
        assert!(hulls_disjoint(&sq(0.0), &sq(3.0)).unwrap());
        assert!(!hulls_disjoint(&sq(0.0), &sq(0.0)).unwrap());
        // two triangles sharing one vertex
        let t1 = PointSet::new(vec![
            Vector::new(vec![0.0, 0.0]),
            Vector::new(vec![1.0, 0.0]),
            Vector::new(vec![0.0, 1.0]),
        ])
        .unwrap();
        let t2 = PointSet::new(vec![
            Vector::new(vec![0.0, 0.0]),
            Vector::new(vec![-1.0, 0.0]),
            Vector::new(vec![0.0, -1.0]),
        ])
        .unwrap();
        assert!(!hulls_disjoint(&t1, &t2).unwrap());
    }

    #[test]
    fn three_balls_in_space() {
        // affinely independent centers, small radii: separable
        let mk = |c: [f64; 3]| {
            PointSet::from_support(
                &Measure::uniform_ball(Vector::new(c.to_vec()), 0.5).unwrap(),
            )
        };
        let sets = [mk([0.0, 0.0, 0.0]), mk([4.0, 0.0, 0.0]), mk([0.0, 4.0, 2.0])];
        let rep = check_separable(&sets, 1e-7).unwrap();
        assert!(rep.separable);
        assert_eq!(rep.witnesses.len(), 4);

        // collinear centers: the pattern isolating the middle ball fails
        let col = [mk([-3.0, 0.0, 0.0]), mk([0.0, 0.0, 0.0]), mk([3.0, 0.0, 0.0])];
        let rep2 = check_separable(&col, 1e-7).unwrap();
        assert!(!rep2.separable);
        let sigma = SignPattern::total(vec![1, -1, 1]);
        assert!(separating_hyperplane(&col, &sigma, 1e-7).unwrap().is_none());
    }

    #[test]
    fn affine_independence_rank() {
        let pts = vec![
            Vector::new(vec![0.0, 0.0]),
            Vector::new(vec![1.0, 1.0]),
        ];
        assert!(affinely_independent(&pts, 1e-9));
        let collinear = vec![
            Vector::new(vec![0.0, 0.0, 0.0]),
            Vector::new(vec![1.0, 1.0, 0.0]),
            Vector::new(vec![2.0, 2.0, 0.0]),
        ];
        assert!(!affinely_independent(&collinear, 1e-9));
    }
}
