//! A small dense two-phase simplex for the tiny linear programs that
//! arise in separability checks: `max c'x  s.t.  A x <= b,  x >= 0`.

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

const EPS: f64 = 1e-9;

/// Solves `max c'x` subject to `A x <= b`, `x >= 0` (b of any sign).
pub fn solve_lp_max(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Columns: n structural | m slacks | up to m artificials | rhs.
    // Rows with negative rhs are negated; their slack gets coefficient -1
    // and an artificial variable seeds the basis.
    let mut art_cols: Vec<usize> = Vec::new();
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let neg = b[i] < 0.0;
        let sgn = if neg { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n + m];
        for j in 0..n {
            row[j] = sgn * a[i][j];
        }
        row[n + i] = sgn; // slack
        if neg {
            art_cols.push(i);
        }
        row.push(sgn * b[i]); // rhs placeholder; artificials appended below
        tab.push(row);
    }
    let n_art = art_cols.len();
    let width = n + m + n_art + 1;
    for (k, row) in tab.iter_mut().enumerate() {
        let rhs = row.pop().unwrap();
        row.resize(n + m + n_art, 0.0);
        if let Some(pos) = art_cols.iter().position(|&r| r == k) {
            row[n + m + pos] = 1.0;
        }
        row.push(rhs);
    }
    let mut basis: Vec<usize> = (0..m)
        .map(|i| match art_cols.iter().position(|&r| r == i) {
            Some(pos) => n + m + pos,
            None => n + i,
        })
        .collect();

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        let mut obj = vec![0.0; width];
        for j in n + m..n + m + n_art {
            obj[j] = -1.0;
        }
        // price out the artificial basis
        for (i, &bc) in basis.iter().enumerate() {
            if bc >= n + m {
                for j in 0..width {
                    obj[j] += tab[i][j];
                }
            }
        }
        if !run_simplex(&mut tab, &mut obj, &mut basis, n + m) {
            return LpOutcome::Unbounded; // cannot happen in phase 1
        }
        // the rhs of the priced-out row carries the remaining sum of
        // artificials; positive means no feasible point exists
        if obj[width - 1] > EPS {
            return LpOutcome::Infeasible;
        }
        // drive any lingering artificial out of the basis if possible
        for i in 0..m {
            if basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| tab[i][j].abs() > EPS) {
                    pivot(&mut tab, &mut vec![0.0; width], i, j);
                    basis[i] = j;
                }
            }
        }
    }

    // Phase 2 on the structural objective; artificial columns frozen.
    let mut obj = vec![0.0; width];
    for j in 0..n {
        obj[j] = c[j];
    }
    for (i, &bc) in basis.iter().enumerate() {
        if bc < n + m && obj[bc].abs() > 0.0 {
            let f = obj[bc];
            for j in 0..width {
                obj[j] -= f * tab[i][j];
            }
        }
    }
    if !run_simplex(&mut tab, &mut obj, &mut basis, n + m) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![0.0; n];
    for (i, &bc) in basis.iter().enumerate() {
        if bc < n {
            x[bc] = tab[i][width - 1];
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, objective }
}

/// Runs simplex iterations (Bland's rule) over the first `ncols` columns.
/// Returns false on unboundedness. `obj` is the current reduced-cost row
/// for a maximization, with the objective value accumulating in its rhs.
fn run_simplex(tab: &mut [Vec<f64>], obj: &mut Vec<f64>, basis: &mut [usize], ncols: usize) -> bool {
    let width = obj.len();
    loop {
        // Bland: first column with positive reduced cost
        let Some(col) = (0..ncols).find(|&j| obj[j] > EPS) else {
            return true;
        };
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[col] > EPS {
                let ratio = row[width - 1] / row[col];
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - EPS || (ratio < br + EPS && basis[i] < basis[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = best else {
            return false;
        };
        pivot(tab, obj, row, col);
        basis[row] = col;
    }
}

fn pivot(tab: &mut [Vec<f64>], obj: &mut [f64], row: usize, col: usize) {
    let width = tab[row].len();
    let p = tab[row][col];
    for j in 0..width {
        tab[row][j] /= p;
    }
    for i in 0..tab.len() {
        if i != row {
            let f = tab[i][col];
            if f != 0.0 {
                for j in 0..width {
                    tab[i][j] -= f * tab[row][j];
                }
            }
        }
    }
    let f = obj[col];
    if f != 0.0 {
        for j in 0..width {
            obj[j] -= f * tab[row][j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_max() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6
        let out = solve_lp_max(
            &[1.0, 1.0],
            &[vec![1.0, 2.0], vec![3.0, 1.0]],
            &[4.0, 6.0],
        );
        match out {
            LpOutcome::Optimal { x, objective } => {
                assert!((objective - 2.8).abs() < 1e-9, "{objective}");
                assert!((x[0] - 1.6).abs() < 1e-9 && (x[1] - 1.2).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_system() {
        // x <= -1 with x >= 0
        let out = solve_lp_max(&[1.0], &[vec![1.0]], &[-1.0]);
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_direction() {
        // max x with only x >= 0
        let out = solve_lp_max(&[1.0], &[vec![-1.0]], &[0.0]);
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_feasible() {
        // x >= 1 encoded as -x <= -1; max -x gives x = 1
        let out = solve_lp_max(&[-1.0], &[vec![-1.0]], &[-1.0]);
        match out {
            LpOutcome::Optimal { x, .. } => assert!((x[0] - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_via_pair() {
        // x + y = 1, max 2x + y -> x = 1
        let out = solve_lp_max(
            &[2.0, 1.0],
            &[vec![1.0, 1.0], vec![-1.0, -1.0]],
            &[1.0, -1.0],
        );
        match out {
            LpOutcome::Optimal { x, objective } => {
                assert!((objective - 2.0).abs() < 1e-9);
                assert!((x[0] - 1.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }
}
