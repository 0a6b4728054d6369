//! Shared numerical kernels: ball-cap mass fractions, Gauss-Legendre
//! rules, low-discrepancy sequences, sphere lattices and tiny dense
//! linear solves.

use statrs::function::beta::beta_reg;

use crate::geom::Vector;

/// Fraction of the density `(1 - |x|^2)^k` on the unit n-ball lying in
/// `{x : x_1 >= s}`. `k = 0` is the uniform ball. Clamped outside `[-1, 1]`.
///
/// For `s >= 0` this equals `I_{1-s^2}(k + (n+1)/2, 1/2) / 2` where `I`
/// is the regularized incomplete beta function.
pub fn cap_fraction(n: usize, k: u32, s: f64) -> f64 {
    if s >= 0.0 {
        cap_fraction_tail(n, k, s)
    } else {
        1.0 - cap_fraction_tail(n, k, -s)
    }
}

/// Tail version for `s >= 0`: same value as [`cap_fraction`] but
/// guaranteed free of cancellation (the result is at most 1/2).
pub fn cap_fraction_tail(n: usize, k: u32, s: f64) -> f64 {
    debug_assert!(s >= 0.0);
    if s >= 1.0 {
        return 0.0;
    }
    if k == 0 {
        // Uniform ball: elementary closed forms in low dimension.
        match n {
            1 => return 0.5 * (1.0 - s),
            2 => {
                return (s.acos() - s * (1.0 - s * s).sqrt()) / std::f64::consts::PI;
            }
            3 => return 0.25 * (2.0 - 3.0 * s + s * s * s),
            _ => {}
        }
    }
    let a = f64::from(k) + 0.5 * (n as f64 + 1.0);
    let x = (1.0 - s) * (1.0 + s);
    0.5 * beta_reg(a, 0.5, x)
}

/// `cap_fraction(n, k, s) - t` for `t` in {0, 1/2, 1}, computed without
/// cancellation. Used where masses must be resolved near plateau edges.
pub fn cap_fraction_excess(n: usize, k: u32, s: f64, t: f64) -> f64 {
    if t == 0.0 {
        cap_fraction(n, k, s)
    } else if t == 1.0 {
        if s >= 0.0 {
            cap_fraction_tail(n, k, s) - 1.0
        } else {
            -cap_fraction_tail(n, k, -s)
        }
    } else {
        debug_assert_eq!(t, 0.5);
        if s >= 0.0 {
            cap_fraction_tail(n, k, s) - 0.5
        } else {
            0.5 - cap_fraction_tail(n, k, -s)
        }
    }
}

/// Volume of the unit n-ball, via `V_n = V_{n-2} * 2 pi / n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut d = n % 2;
    while d + 2 <= n {
        d += 2;
        v *= 2.0 * std::f64::consts::PI / d as f64;
    }
    v
}

/// Normalization of the density `C (1 - |x-c|^2/r^2)^k` on a ball of
/// radius `r` in `R^n`: returns `C` such that the total mass is one.
pub fn smooth_cap_density_constant(n: usize, k: u32, r: f64) -> f64 {
    // total = C r^n V_n * (n/2) B(n/2, k+1); B via the integer recurrence
    // (n/2) B(n/2, k+1) = prod_{j=1..k} j/(n/2 + j) ... computed directly.
    let half_n = n as f64 / 2.0;
    let mut b = 1.0 / half_n; // B(n/2, 1) = 1/(n/2)
    for j in 1..=k {
        let jf = f64::from(j);
        b *= jf / (half_n + jf);
    }
    let total_over_c = r.powi(n as i32) * unit_ball_volume(n) * half_n * b;
    1.0 / total_over_c
}

/// Nodes and weights of the m-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let n = m as f64;
    for i in 0..m.div_ceil(2) {
        // Newton from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_deriv(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=m {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over `[a, b]` with an m-point Gauss-Legendre rule.
pub fn integrate_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, m: usize) -> f64 {
    if a >= b {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre(m);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Van der Corput radical inverse of `i` in the given base.
pub fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base) as f64 * inv;
        i /= base;
        inv /= b;
    }
    x
}

/// The i-th point of the Halton sequence in `[0,1)^dim` (index starts at 0;
/// the first point is offset to avoid the origin).
pub fn halton_point(i: usize, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton sequence limited to 8 dims");
    (0..dim)
        .map(|d| radical_inverse(i + 1, PRIMES[d]))
        .collect()
}

/// Deterministic, roughly uniform lattice of `count` unit vectors on
/// `S^{n-1}`. Exact uniform angles for n = 2, a Fibonacci spiral for
/// n = 3, and a Halton-fed normal transform above that.
pub fn sphere_lattice(n: usize, count: usize) -> Vec<Vector> {
    assert!(n >= 2);
    match n {
        2 => (0..count)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                Vector::new(vec![t.cos(), t.sin()])
            })
            .collect(),
        3 => {
            let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
            (0..count)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let t = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
                    Vector::new(vec![r * t.cos(), r * t.sin(), z])
                })
                .collect()
        }
        _ => (0..count)
            .map(|i| {
                let u = halton_point(i, n);
                let g: Vec<f64> = u.iter().map(|&x| inverse_normal_cdf(x)).collect();
                Vector::new(g).normalized().unwrap_or_else(|_| {
                    let mut e = Vector::zeros(n);
                    e.0[0] = 1.0;
                    e
                })
            })
            .collect(),
    }
}

/// Acklam's rational approximation of the standard normal quantile,
/// accurate to ~1e-9 (ample for lattice generation).
fn inverse_normal_cdf(p: f64) -> f64 {
    let p = p.clamp(1e-300, 1.0 - 1e-16);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let plow = 0.02425;
    if p < plow {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - plow {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_cdf(1.0 - p)
    }
}

/// Solves the square system `a x = b` in place by Gaussian elimination
/// with partial pivoting. Returns `None` when the pivot collapses.
pub fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// A unit normal of the hyperplane through the given n affinely
/// independent points in `R^n` (nullspace of the difference matrix).
pub fn hyperplane_through(points: &[Vector]) -> Option<Vector> {
    let n = points[0].dim();
    debug_assert_eq!(points.len(), n);
    // Build the (n-1) x n difference matrix and eliminate.
    let mut m: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.sub(&points[0]).0)
        .collect();
    let rows = n - 1;
    let mut pivot_cols = Vec::with_capacity(rows);
    let mut r = 0;
    for c in 0..n {
        let best = (r..rows).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap());
        let best = match best {
            Some(b) => b,
            None => break,
        };
        if m[best][c].abs() < 1e-12 {
            continue;
        }
        m.swap(r, best);
        for i in 0..rows {
            if i != r {
                let f = m[i][c] / m[r][c];
                for k in 0..n {
                    m[i][k] -= f * m[r][k];
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if r < rows {
        return None; // points affinely dependent
    }
    let free_col = (0..n).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![0.0; n];
    v[free_col] = 1.0;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = -m[row][free_col] / m[row][pc];
    }
    Vector::new(v).normalized().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_fraction_symmetry_and_edges() {
        for n in 1..=4 {
            for k in [0u32, 2] {
                assert!((cap_fraction(n, k, 0.0) - 0.5).abs() < 1e-12);
                assert!(cap_fraction(n, k, 1.0).abs() < 1e-15);
                assert!((cap_fraction(n, k, -1.0) - 1.0).abs() < 1e-15);
                for s in [0.1, 0.35, 0.8] {
                    let sum = cap_fraction(n, k, s) + cap_fraction(n, k, -s);
                    assert!((sum - 1.0).abs() < 1e-12, "n={n} k={k} s={s}");
                }
            }
        }
    }

    #[test]
    fn cap_fraction_matches_quadrature() {
        // cross-check the beta route against direct 1-D quadrature of the
        // cross-section profile  (1-t^2)^{k+(n-1)/2}
        for (n, k) in [(2usize, 0u32), (2, 2), (3, 0), (3, 1), (4, 2)] {
            let e = f64::from(k) + (n as f64 - 1.0) / 2.0;
            // substitute t = sin(phi) so the integrand is smooth at the rim
            let prof = |phi: f64| phi.cos().powf(2.0 * e + 1.0);
            let total = integrate_gl(prof, -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, 120);
            for s in [0.0_f64, 0.2, 0.55, 0.9] {
                let tail =
                    integrate_gl(prof, s.asin(), std::f64::consts::FRAC_PI_2, 120) / total;
                let got = cap_fraction(n, k, s);
                assert!((got - tail).abs() < 1e-12, "n={n} k={k} s={s}: {got} vs {tail}");
            }
        }
    }

    #[test]
    fn uniform_ball_volumes() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-12);
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume(3) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_cap_constant_2d() {
        // C = (k+1)/(pi r^2) in the plane
        for k in 0..4u32 {
            for r in [1.0, 2.5] {
                let c = smooth_cap_density_constant(2, k, r);
                let expect = (f64::from(k) + 1.0) / (std::f64::consts::PI * r * r);
                assert!((c - expect).abs() / expect < 1e-12);
            }
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        // 5-point rule integrates degree-9 polynomials exactly
        let val = integrate_gl(|x| x.powi(9) + 3.0 * x.powi(4) - x + 2.0, -1.0, 1.0, 5);
        let exact = 3.0 * 2.0 / 5.0 + 4.0;
        assert!((val - exact).abs() < 1e-13);
    }

    #[test]
    fn sphere_lattices_unit() {
        for n in 2..=4 {
            for v in sphere_lattice(n, 64) {
                assert!((v.norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn linear_solve_roundtrip() {
        let mut a = vec![vec![4.0, 1.0, 0.0], vec![1.0, 3.0, -1.0], vec![0.0, -1.0, 5.0]];
        let mut b = vec![1.0, 2.0, 3.0];
        let x = solve_linear(&mut a, &mut b).unwrap();
        let a0 = [[4.0, 1.0, 0.0], [1.0, 3.0, -1.0], [0.0, -1.0, 5.0]];
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a0[i][j] * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperplane_through_points() {
        let pts = vec![
            Vector::new(vec![1.0, 0.0, 0.0]),
            Vector::new(vec![0.0, 1.0, 0.0]),
            Vector::new(vec![0.0, 0.0, 1.0]),
        ];
        let v = hyperplane_through(&pts).unwrap();
        let lam = v.dot(&pts[0]);
        for p in &pts {
            assert!((v.dot(p) - lam).abs() < 1e-12);
        }
    }
}
