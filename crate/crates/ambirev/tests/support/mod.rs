//! Reference solvers for cross-validating the ambiguity machinery.
//!
//! Everything here is deliberately independent of the library's solver
//! path: a dense two-phase simplex, a cutting-plane outer approximation
//! of the KL ball, a box LP for the bounded-likelihood-ratio family, and a
//! plain vertex enumeration for tiny instances.

/// Dense two-phase simplex for `min c.x  s.t.  A x = b, x >= 0`.
/// Rows with negative right-hand sides are flipped. Bland's rule keeps the
/// pivoting cycle-free. Returns `None` when infeasible.
pub fn simplex_min_eq(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<(f64, Vec<f64>)> {
    let m = a.len();
    let n = c.len();
    assert!(a.iter().all(|row| row.len() == n));
    assert_eq!(b.len(), m);

    // phase-1 tableau with one artificial per row
    let width = n + m + 1;
    let mut tab = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i][j] = flip * a[i][j];
        }
        tab[i][n + i] = 1.0;
        tab[i][width - 1] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // phase-1 objective (sum of artificials) expressed over the basis:
    // minus the column sums, zero on the artificial columns themselves
    for j in 0..width {
        let col_sum: f64 = (0..m).map(|i| tab[i][j]).sum();
        tab[m][j] = if (n..n + m).contains(&j) { 0.0 } else { -col_sum };
    }

    pivot_to_optimum(&mut tab, &mut basis, n + m)?;
    if tab[m][width - 1].abs() > 1e-7 {
        return None; // infeasible
    }
    // drive artificial variables out of the basis where possible
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab[i][j].abs() > 1e-9) {
                pivot(&mut tab, &mut basis, i, j);
            }
        }
    }

    // phase 2: replace the objective row, zero out artificial columns
    let mut obj = vec![0.0; width];
    obj[..n].copy_from_slice(c);
    // express objective over the current basis
    for i in 0..m {
        let bj = basis[i];
        if bj < n && c[bj] != 0.0 {
            let coeff = obj[bj];
            for j in 0..width {
                obj[j] -= coeff * tab[i][j];
            }
        }
    }
    // entering columns in phase 2 are capped at n, so artificials never
    // re-enter the basis
    tab[m] = obj;
    pivot_to_optimum(&mut tab, &mut basis, n)?;

    let mut x = vec![0.0; n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = tab[i][width - 1];
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Some((value, x))
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let width = tab[0].len();
    let pivot_val = tab[row][col];
    for j in 0..width {
        tab[row][j] /= pivot_val;
    }
    let rows = tab.len();
    for i in 0..rows {
        if i != row && tab[i][col].abs() > 1e-14 {
            let factor = tab[i][col];
            for j in 0..width {
                tab[i][j] -= factor * tab[row][j];
            }
        }
    }
    basis[row] = col;
}

/// Bland's-rule simplex iterations until no negative reduced cost remains
/// among the first `allowed` columns. `None` when unbounded.
fn pivot_to_optimum(tab: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, allowed: usize) -> Option<()> {
    let m = tab.len() - 1;
    let width = tab[0].len();
    for _ in 0..200_000 {
        // entering column: smallest index with a negative reduced cost
        let col = (0..allowed).find(|&j| tab[m][j] < -1e-9);
        let col = match col {
            Some(c) => c,
            None => return Some(()),
        };
        // leaving row: minimum ratio, ties by smallest basis index
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            if tab[i][col] > 1e-11 {
                let ratio = tab[i][width - 1] / tab[i][col];
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - 1e-12 || (ratio < br + 1e-12 && basis[i] < basis[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let (row, _) = best?;
        pivot(tab, basis, row, col);
    }
    None
}

/// LP with a mix of one equality row and `<=` rows, via slack variables.
pub fn lp_min(
    c: &[f64],
    eq: (&[f64], f64),
    ub_rows: &[(Vec<f64>, f64)],
) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    let slacks = ub_rows.len();
    let mut big_c = c.to_vec();
    big_c.extend(std::iter::repeat(0.0).take(slacks));
    let mut a = Vec::with_capacity(1 + slacks);
    let mut b = Vec::with_capacity(1 + slacks);
    let mut row0 = eq.0.to_vec();
    row0.extend(std::iter::repeat(0.0).take(slacks));
    a.push(row0);
    b.push(eq.1);
    for (k, (coef, rhs)) in ub_rows.iter().enumerate() {
        let mut row = coef.clone();
        row.extend(std::iter::repeat(0.0).take(slacks));
        row[n + k] = 1.0;
        a.push(row);
        b.push(*rhs);
    }
    let (value, x) = simplex_min_eq(&big_c, &a, &b)?;
    Some((value, x[..n].to_vec()))
}

/// Cutting-plane (outer approximation) oracle for
/// `min E_q[t]  s.t.  KL(q || p) <= eta`, over beliefs `q` on the simplex
/// with a tiny floor `q >= delta p` that keeps the entropy gradient
/// bounded. The floor perturbs the optimum by at most
/// `delta * (max t - min t)`.
pub fn kelley_kl_min(t: &[f64], p: &[f64], eta: f64) -> (f64, Vec<f64>) {
    let m = t.len();
    let delta = 1e-7;
    let shift: Vec<f64> = p.iter().map(|&pk| delta * pk).collect();
    let eq_coef = vec![1.0; m];
    let eq_rhs = 1.0 - delta;
    let mut cuts: Vec<(Vec<f64>, f64)> = Vec::new();
    let kl = |q: &[f64]| -> f64 {
        q.iter()
            .zip(p)
            .map(|(&qk, &pk)| if qk > 0.0 { qk * (qk / pk).ln() } else { 0.0 })
            .sum()
    };
    let mut q = p.to_vec();
    for _ in 0..400 {
        let current = kl(&q);
        if current <= eta + 1e-9 {
            break;
        }
        // gradient cut at q: KL(q0) + g.(q - q0) <= eta with
        // g_k = ln(q0_k / p_k) + 1
        let g: Vec<f64> = q.iter().zip(p).map(|(&qk, &pk)| (qk / pk).ln() + 1.0).collect();
        let gq: f64 = g.iter().zip(&q).map(|(a, b)| a * b).sum();
        let rhs = eta - current + gq;
        // translate to the shifted variables x = q - delta p
        let g_shift: f64 = g.iter().zip(&shift).map(|(a, b)| a * b).sum();
        cuts.push((g.clone(), rhs - g_shift));
        let (_, x) = lp_min(t, (&eq_coef, eq_rhs), &cuts).expect("cut LP feasible");
        q = x.iter().zip(&shift).map(|(xi, si)| xi + si).collect();
    }
    let value = t.iter().zip(&q).map(|(a, b)| a * b).sum();
    (value, q)
}

/// Box-LP oracle for the bounded likelihood ratio family:
/// `min E_q[t]  s.t.  sum q = 1, lo p <= q <= hi p`.
pub fn blr_lp_min(t: &[f64], p: &[f64], lo: f64, hi: f64) -> (f64, Vec<f64>) {
    let m = t.len();
    // x = q - lo p >= 0, x <= (hi - lo) p
    let eq_coef = vec![1.0; m];
    let eq_rhs = 1.0 - lo;
    let ub_rows: Vec<(Vec<f64>, f64)> = (0..m)
        .map(|k| {
            let mut row = vec![0.0; m];
            row[k] = 1.0;
            (row, (hi - lo) * p[k])
        })
        .collect();
    let (_, x) = lp_min(t, (&eq_coef, eq_rhs), &ub_rows).expect("box LP feasible");
    let q: Vec<f64> = x.iter().zip(p).map(|(xi, &pk)| xi + lo * pk).collect();
    let value = t.iter().zip(&q).map(|(a, b)| a * b).sum();
    (value, q)
}

/// Exhaustive vertex enumeration of the bounded-ratio polytope for tiny
/// instances: every vertex pins all but at most one coordinate at a bound.
pub fn blr_vertex_enumeration_min(t: &[f64], p: &[f64], lo: f64, hi: f64) -> f64 {
    let m = t.len();
    assert!(m <= 12, "vertex enumeration is exponential");
    let mut best = f64::INFINITY;
    for frac in 0..m {
        for bits in 0u32..(1 << (m - 1)) {
            // assign hi/lo to every coordinate except `frac`
            let mut q = vec![0.0; m];
            let mut used = 0.0;
            let mut bit = 0;
            for k in 0..m {
                if k == frac {
                    continue;
                }
                let at_hi = bits >> bit & 1 == 1;
                bit += 1;
                q[k] = if at_hi { hi * p[k] } else { lo * p[k] };
                used += q[k];
            }
            let rest = 1.0 - used;
            if rest >= lo * p[frac] - 1e-12 && rest <= hi * p[frac] + 1e-12 {
                q[frac] = rest;
                let value: f64 = t.iter().zip(&q).map(|(a, b)| a * b).sum();
                best = best.min(value);
            }
        }
    }
    best
}

#[cfg(test)]
mod self_tests {
    use super::*;

    #[test]
    fn simplex_solves_a_known_lp() {
        // min -x - 2y s.t. x + y <= 4, x <= 3, y <= 2, x,y >= 0 -> (2, 2)
        let (value, x) = lp_min(
            &[-1.0, -2.0],
            (&[0.0, 0.0], 0.0),
            &[
                (vec![1.0, 1.0], 4.0),
                (vec![1.0, 0.0], 3.0),
                (vec![0.0, 1.0], 2.0),
            ],
        )
        .unwrap();
        assert!((value + 6.0).abs() < 1e-9, "{value} at {x:?}");
    }
}
