//! Partition of one planar measure by two lines into four parts of
//! prescribed masses: the first line fixes the top/bottom split, the
//! renormalized restrictions to both sides form a two-measure problem
//! whose solution is the second line.

use crate::auxiliary::{solve_lambda, ConvexSet};
use crate::error::{Error, Result};
use crate::geom::{Hyperplane, Vector};
use crate::measure::Measure;
use crate::solver::{find_split, Problem, SolveConfig, SplitOutcome};

/// Builds the conditional measure of `m` on the given side of `h`
/// (a genuine planar measure with total mass one).
pub fn conditional(m: &Measure, h: &Hyperplane, side: i8) -> Result<Measure> {
    Measure::conditional(m.clone(), h.clone(), side)
}

/// The two lines and the measured masses of the four quadrants, ordered
/// `(H1+ & H2+, H1- & H2+, H1+ & H2-, H1- & H2-)`.
#[derive(Debug, Clone)]
pub struct QuadPartition {
    pub h1: Hyperplane,
    pub h2: Hyperplane,
    pub quadrant_masses: [f64; 4],
}

/// Slack with which the separator containers of the internal two-measure
/// problem must satisfy their strict mass inequalities.
const SEPARATOR_SLACK: f64 = 1e-3;

/// Splits a planar measure by two lines into four parts of masses
/// `alphas` (all positive, summing to one). `v` is the normal of the
/// first cut; the second line solves the induced two-measure problem of
/// the conditionals on either side.
pub fn two_line_partition(
    m: &Measure,
    alphas: [f64; 4],
    v: &Vector,
    cfg: &SolveConfig,
) -> Result<QuadPartition> {
    if m.dim() != 2 {
        return Err(Error::UnsupportedConfiguration(
            "two-line partitions are planar-only".into(),
        ));
    }
    let sum: f64 = alphas.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("quadrant masses must sum to one".into()));
    }
    if alphas.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidParameter("quadrant masses must be positive".into()));
    }
    let v = v.normalized()?;
    let ab = alphas[0] + alphas[1];
    let cd = alphas[2] + alphas[3];
    let mass_tol = cfg.mass_tol_for(m.is_analytic());
    let lambda_tol = 0.1 * mass_tol;

    // H2 with mu(H2+) = alpha1 + alpha2
    let sol = solve_lambda(m, &v, ab, lambda_tol)?;
    let h2 = Hyperplane::from_unit(v.clone(), sol.chosen)?;
    let mu1 = conditional(m, &h2, 1)?;
    let mu2 = conditional(m, &h2, -1)?;
    let beta1 = alphas[0] / ab;
    let beta2 = alphas[2] / cd;

    // separator half-planes H^+_{v,lambda1} and H^-_{v,lambda2} with the
    // strict conditional-mass inequalities (slack 1e-3), by bisection
    let lambda1 = separator_offset(&mu1, &v, 1, sol.chosen, beta1.max(1.0 - beta1))?;
    let lambda2 = separator_offset(&mu2, &v, -1, sol.chosen, beta2.max(1.0 - beta2))?;
    if !(lambda2 < sol.chosen && sol.chosen < lambda1) {
        return Err(Error::InvalidParameter(
            "separator construction failed to bracket the first cut".into(),
        ));
    }
    let separators = vec![
        half_plane_container(m, &v, lambda1, 1),
        half_plane_container(m, &v, lambda2, -1),
    ];

    // the induced two-measure problem; the containers guarantee a solution
    let problem = Problem::new(vec![mu1, mu2], vec![beta1, beta2], Some(separators))?;
    let h1 = match find_split(&problem, cfg)? {
        SplitOutcome::Found(res) => res.hyperplane,
        SplitOutcome::NotFound(scan) => {
            return Err(Error::InvalidParameter(format!(
                "two-line inner solve found no split (best scan residual {:.3e})",
                scan.best_norm
            )))
        }
    };

    let quadrant_masses = quadrant_masses(m, &h1, &h2)?;
    Ok(QuadPartition { h1, h2, quadrant_masses })
}

/// Measured masses of the four quadrants of two lines.
pub fn quadrant_masses(m: &Measure, h1: &Hyperplane, h2: &Hyperplane) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (k, (s1, s2)) in [(1i8, 1i8), (-1, 1), (1, -1), (-1, -1)].iter().enumerate() {
        out[k] = m.mass_intersection(&[(h1.clone(), *s1), (h2.clone(), *s2)])?.value;
    }
    Ok(out)
}

/// Finds an offset strictly on `side` of `from` whose half-space holds
/// conditional mass at least `required + slack`, halfway into the
/// feasible band for robustness.
fn separator_offset(
    cond: &Measure,
    v: &Vector,
    side: i8,
    from: f64,
    required: f64,
) -> Result<f64> {
    let target = required + SEPARATOR_SLACK;
    if target >= 1.0 {
        return Err(Error::InvalidParameter(
            "separator slack leaves no room (ratio too extreme)".into(),
        ));
    }
    let (c, r) = cond.bounding_ball();
    let far = if side > 0 { v.dot(&c) + r + 1.0 } else { v.dot(&c) - r - 1.0 };
    // conditional mass of H^side_{v,t} tends to 1 as t -> from
    let mass_side = |t: f64| -> Result<f64> {
        let h = Hyperplane::from_unit(v.clone(), t)?;
        let mv = cond.mass_intersection(&[(h, side)])?;
        Ok(mv.value)
    };
    let mut near = from;
    let mut away = far;
    for _ in 0..60 {
        let mid = 0.5 * (near + away);
        if mass_side(mid)? >= target {
            near = mid;
        } else {
            away = mid;
        }
    }
    // step back toward `from` so the strict inequality has slack in hand
    Ok(from + 0.5 * (near - from))
}

fn half_plane_container(m: &Measure, v: &Vector, offset: f64, side: i8) -> ConvexSet {
    // the relevant part of the half-plane is its slice of the bounding
    // ball; a ball container centered deep on the kept side covers it
    let (c, r) = m.bounding_ball();
    let sc = f64::from(side);
    let depth = (sc * (v.dot(&c) - offset) + r).max(0.0);
    let center = c.axpy(sc * (r + depth), v);
    ConvexSet::Ball { center, radius: 2.0 * r + depth }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square01() -> Measure {
        Measure::uniform_polytope(vec![
            Vector::new(vec![0.0, 0.0]),
            Vector::new(vec![1.0, 0.0]),
            Vector::new(vec![1.0, 1.0]),
            Vector::new(vec![0.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn conditional_rescales_uniformly() {
        let m = square01();
        let h = Hyperplane::new(Vector::new(vec![1.0, 0.0]), 0.5).unwrap();
        let cm = conditional(&m, &h, 1).unwrap();
        let (_, _, _, normalizer) = cm.conditional_parts().unwrap();
        assert!((normalizer - 2.0).abs() < 1e-10);
        let probe = Hyperplane::new(Vector::new(vec![1.0, 0.0]), 0.75).unwrap();
        assert!((cm.mass_halfspace(&probe).unwrap().value - 0.5).abs() < 1e-10);
        // total conditional mass is one
        let all = Hyperplane::new(Vector::new(vec![1.0, 0.0]), -5.0).unwrap();
        assert!((cm.mass_halfspace(&all).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn conditional_of_cap_matches_mc() {
        let m = Measure::smooth_cap(Vector::new(vec![0.1, -0.2]), 1.4, 2).unwrap();
        let cut = Hyperplane::new(Vector::new(vec![0.3, 1.0]), 0.1).unwrap();
        let cm = conditional(&m, &cut, 1).unwrap();
        let probe = Hyperplane::new(Vector::new(vec![1.0, 0.25]), 0.2).unwrap();
        let a = cm.mass_halfspace(&probe).unwrap();
        let mc = cm.mass_halfspace_mc(&probe, 300_000, 9).unwrap();
        assert!(
            (a.value - mc.value).abs() <= a.error_bound + mc.error_bound,
            "{} vs {}",
            a.value,
            mc.value
        );
    }

    #[test]
    fn zero_mass_side_is_rejected() {
        let m = square01();
        let h = Hyperplane::new(Vector::new(vec![1.0, 0.0]), 5.0).unwrap();
        assert!(matches!(conditional(&m, &h, 1), Err(Error::ZeroMassSide)));
    }

    #[test]
    fn even_quarters_of_the_square() {
        let m = square01();
        let cfg = SolveConfig { scan_resolution: 128, ..Default::default() };
        let part = two_line_partition(&m, [0.25; 4], &Vector::new(vec![0.0, 1.0]), &cfg).unwrap();
        assert!((part.h2.offset() - 0.5).abs() < 1e-6);
        for q in part.quadrant_masses {
            assert!((q - 0.25).abs() < 1e-6, "{:?}", part.quadrant_masses);
        }
        let total: f64 = part.quadrant_masses.iter().sum();
        assert!((total - 1.0).abs() < 4e-6);
    }

    #[test]
    fn uneven_quarters_of_the_square() {
        let m = square01();
        let cfg = SolveConfig { scan_resolution: 128, ..Default::default() };
        let alphas = [0.1, 0.4, 0.1, 0.4];
        let part = two_line_partition(&m, alphas, &Vector::new(vec![0.0, 1.0]), &cfg).unwrap();
        assert!((part.h2.offset() - 0.5).abs() < 1e-6);
        // bisection oracle for axis-aligned candidates: masses are products
        // of interval lengths, so the valid vertical line sits at x = 0.2
        for (q, a) in part.quadrant_masses.iter().zip(&alphas) {
            assert!((q - a).abs() < 1e-6, "{:?}", part.quadrant_masses);
        }
    }

    #[test]
    fn disc_partition_against_mc() {
        let m = Measure::uniform_ball(Vector::new(vec![0.2, -0.1]), 1.3).unwrap();
        let cfg = SolveConfig { scan_resolution: 128, ..Default::default() };
        let alphas = [0.3, 0.2, 0.3, 0.2];
        let v = Vector::new(vec![0.4, 1.0]);
        let part = two_line_partition(&m, alphas, &v, &cfg).unwrap();
        for (q, a) in part.quadrant_masses.iter().zip(&alphas) {
            assert!((q - a).abs() < 1e-6, "{:?}", part.quadrant_masses);
        }
        // Monte-Carlo quadrant counting oracle
        for (k, (s1, s2)) in [(1i8, 1i8), (-1, 1), (1, -1), (-1, -1)].iter().enumerate() {
            let mc = m
                .mass_intersection_mc(&[(part.h1.clone(), *s1), (part.h2.clone(), *s2)], 400_000, 17)
                .unwrap();
            assert!(
                (mc.value - alphas[k]).abs() <= mc.error_bound,
                "quadrant {k}: {} vs {}",
                mc.value,
                alphas[k]
            );
        }
    }

    #[test]
    fn mixture_partition_keeps_first_cut() {
        let m = Measure::mixture(vec![
            (0.5, Measure::uniform_ball(Vector::new(vec![-1.0, 0.0]), 1.0).unwrap()),
            (0.5, Measure::smooth_cap(Vector::new(vec![1.0, 0.5]), 1.2, 2).unwrap()),
        ])
        .unwrap();
        let cfg = SolveConfig { scan_resolution: 128, ..Default::default() };
        let alphas = [0.15, 0.35, 0.25, 0.25];
        let part = two_line_partition(&m, alphas, &Vector::new(vec![0.0, 1.0]), &cfg).unwrap();
        let above = m.mass_halfspace(&part.h2).unwrap().value;
        assert!((above - 0.5).abs() < 1e-6);
        for (q, a) in part.quadrant_masses.iter().zip(&alphas) {
            assert!((q - a).abs() < 2e-6, "{:?}", part.quadrant_masses);
        }
        let total: f64 = part.quadrant_masses.iter().sum();
        assert!((total - 1.0).abs() < 4e-6);
    }
}
