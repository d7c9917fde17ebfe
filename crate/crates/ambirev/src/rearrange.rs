//! Rearrangements of beliefs relative to a base measure.
//!
//! A belief `nu'` is a rearrangement of `nu` (w.r.t. `mu`) when the
//! mu-distribution of the likelihood ratio `dnu'/dmu` matches that of
//! `dnu/dmu`. On a grid this is block transport: the sorted
//! (ratio, mass) profile is preserved. The two constructions here are the
//! anti-comonotone rearrangement (ratio moves opposite to a payoff `T`)
//! and the per-axis decreasing rearrangement for product beliefs. Both are
//! exact cell-level rearrangements whenever the base masses are uniform or
//! block boundaries align with cells; a block split mid-cell is resolved by
//! mass-weighted averaging, which preserves total mass and the expectation
//! of any cell-constant integrand.
//!
//! Brute-force enumeration oracles live here too; the test suite and the
//! `verify` subcommand drive them.

use crate::error::{Error, Result};
use crate::measure::{stable_sum, Density2D};
use itertools::Itertools;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Hard cap for full-permutation enumeration.
pub const MAX_PERMUTATION_CELLS: usize = 8;

const RATIO_TOL: f64 = 1e-10;
const MASS_EPS: f64 = 1e-13;

fn check_shapes(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "length {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Likelihood ratio `dnu/dmu` per cell; errors if `nu` charges a mu-null cell.
pub fn likelihood_ratio(nu: &[f64], mu: &[f64]) -> Result<Vec<f64>> {
    check_shapes(nu, mu)?;
    nu.iter()
        .zip(mu)
        .enumerate()
        .map(|(k, (&q, &p))| {
            if p <= 0.0 {
                if q > MASS_EPS {
                    Err(Error::AbsoluteContinuity(k))
                } else {
                    Ok(0.0)
                }
            } else {
                Ok(q / p)
            }
        })
        .collect()
}

/// Sorted (ratio, mass) blocks of `dnu/dmu`, descending in ratio.
fn ratio_blocks_desc(nu: &[f64], mu: &[f64]) -> Result<Vec<(f64, f64)>> {
    let ratio = likelihood_ratio(nu, mu)?;
    let mut blocks: Vec<(f64, f64)> = ratio
        .iter()
        .zip(mu)
        .filter(|(_, &m)| m > 0.0)
        .map(|(&r, &m)| (r, m))
        .collect();
    blocks.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(blocks)
}

/// Do `nu_a` and `nu_b` have the same mu-distribution of likelihood ratios?
///
/// Compares the two descending block profiles as step functions of
/// cumulative mass, with ratio tolerance 1e-10.
pub fn is_rearrangement(nu_a: &[f64], nu_b: &[f64], mu: &[f64]) -> Result<bool> {
    check_shapes(nu_a, nu_b)?;
    let a = ratio_blocks_desc(nu_a, mu)?;
    let b = ratio_blocks_desc(nu_b, mu)?;
    let (mut ia, mut ib) = (0usize, 0usize);
    let (mut rem_a, mut rem_b) = (0.0f64, 0.0f64);
    loop {
        if rem_a <= MASS_EPS {
            if ia == a.len() {
                break;
            }
            rem_a = a[ia].1;
            ia += 1;
        }
        if rem_b <= MASS_EPS {
            if ib == b.len() {
                break;
            }
            rem_b = b[ib].1;
            ib += 1;
        }
        if (a[ia - 1].0 - b[ib - 1].0).abs() > RATIO_TOL {
            return Ok(false);
        }
        let step = rem_a.min(rem_b);
        rem_a -= step;
        rem_b -= step;
    }
    // any unconsumed remainder means total masses disagreed
    Ok(rem_a <= 1e-9 && rem_b <= 1e-9 && ia == a.len() && ib == b.len())
}

/// Transport descending ratio blocks onto cell groups in priority order.
/// Every cell of a group receives the same (mass-weighted) ratio.
fn transport_blocks(groups: &[Vec<usize>], nu: &[f64], mu: &[f64]) -> Result<Vec<f64>> {
    let blocks = ratio_blocks_desc(nu, mu)?;
    let mut out = vec![0.0; nu.len()];
    let mut bi = 0usize;
    let mut rem = if blocks.is_empty() { 0.0 } else { blocks[0].1 };
    for group in groups {
        let group_mass: f64 = group.iter().map(|&k| mu[k]).sum();
        if group_mass <= 0.0 {
            continue;
        }
        let mut need = group_mass;
        let mut acc = 0.0;
        while need > MASS_EPS && bi < blocks.len() {
            let take = need.min(rem);
            acc += take * blocks[bi].0;
            need -= take;
            rem -= take;
            if rem <= MASS_EPS {
                bi += 1;
                if bi < blocks.len() {
                    rem = blocks[bi].1;
                }
            }
        }
        let ratio = acc / group_mass;
        for &k in group {
            out[k] = ratio * mu[k];
        }
    }
    Ok(out)
}

/// Decreasing rearrangement on a 1-D grid: ratio blocks sorted descending
/// along the state axis. Idempotent; an exact rearrangement under uniform
/// base masses.
pub fn decreasing_rearrangement_1d(nu: &[f64], mu: &[f64]) -> Result<Vec<f64>> {
    let groups: Vec<Vec<usize>> = (0..nu.len()).map(|k| vec![k]).collect();
    transport_blocks(&groups, nu, mu)
}

/// Cell groups for a payoff grid: equal values share a group, groups sorted
/// ascending, ties inside broken by cell index.
fn groups_by_value_asc(t: &[f64]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..t.len()).collect();
    idx.sort_by(|&a, &b| t[a].partial_cmp(&t[b]).unwrap().then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in idx {
        match groups.last_mut() {
            Some(g) if t[g[0]] == t[k] => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// The anti-comonotone rearrangement of `q` against payoff `t`: the ratio
/// profile of `q` re-laid so it decreases where `t` increases, equal-`t`
/// cells receiving equal ratios.
pub fn anti_comonotone_rearrangement(q: &[f64], t: &[f64], p: &[f64]) -> Result<Vec<f64>> {
    check_shapes(q, t)?;
    check_shapes(q, p)?;
    transport_blocks(&groups_by_value_asc(t), q, p)
}

/// Density-level wrapper for the anti-comonotone construction on the square.
pub fn anti_comonotone_density(
    q: &Density2D,
    t_values: &[f64],
    p: &Density2D,
) -> Result<Density2D> {
    if q.grid() != p.grid() {
        return Err(Error::ShapeMismatch("densities on different grids".into()));
    }
    let mass = anti_comonotone_rearrangement(q.mass(), t_values, p.mass())?;
    Density2D::new(p.grid().clone(), mass)
}

/// Violation of the anti-comonotonicity conditions between a ratio profile
/// and a payoff: returns a cell pair with `t_a < t_b` but `ratio_a < ratio_b`
/// (or mismatched ratios on an exact payoff tie).
pub fn anti_comonotone_violation(ratio: &[f64], t: &[f64], tol: f64) -> Option<(usize, usize)> {
    let m = t.len();
    for a in 0..m {
        for b in 0..m {
            if t[a] < t[b] && ratio[a] < ratio[b] - tol {
                return Some((a, b));
            }
            if t[a] == t[b] && (ratio[a] - ratio[b]).abs() > tol {
                return Some((a, b));
            }
        }
    }
    None
}

/// Per-axis decreasing rearrangement of a product belief: each marginal
/// ratio is sorted descending, then the product is rebuilt. IID inputs stay
/// IID.
pub fn independent_decreasing_rearrangement(q: &Density2D, p: &Density2D) -> Result<Density2D> {
    if q.grid() != p.grid() {
        return Err(Error::ShapeMismatch("densities on different grids".into()));
    }
    let resid_q = q.product_residual();
    if resid_q > 1e-8 {
        return Err(Error::NotProduct(resid_q));
    }
    let resid_p = p.product_residual();
    if resid_p > 1e-8 {
        return Err(Error::NotProduct(resid_p));
    }
    let q0 = q.marginal(0);
    let q1 = q.marginal(1);
    let p0 = p.marginal(0);
    let p1 = p.marginal(1);
    let r0 = decreasing_rearrangement_1d(q0.mass(), p0.mass())?;
    let r1 = decreasing_rearrangement_1d(q1.mass(), p1.mass())?;
    let a = crate::measure::Density1D::new(p.grid().clone(), r0)?;
    let b = crate::measure::Density1D::new(p.grid().clone(), r1)?;
    Density2D::product(&a, &b)
}

/// Expectation of `t` under cell masses `q`, summed in canonical cell order.
pub fn expectation(q: &[f64], t: &[f64]) -> f64 {
    let products: Vec<f64> = q.iter().zip(t).map(|(a, b)| a * b).collect();
    stable_sum(&products)
}

/// A finite family of beliefs to minimize over.
pub enum EnumeratedSet {
    /// Explicit list of mass vectors.
    Explicit(Vec<Vec<f64>>),
    /// All permutations of a seed mass vector (uniform base measure only).
    PermutationClosure { seed: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub value: f64,
    pub argmin: Vec<f64>,
}

/// Exact minimum of `E[t]` over an enumerated family.
///
/// Permutation closures are capped at 8 cells (8! orderings) and require a
/// uniform base measure, where permutations coincide with rearrangements.
pub fn brute_force_min(set: &EnumeratedSet, t: &[f64], mu: &[f64]) -> Result<BruteForceResult> {
    match set {
        EnumeratedSet::Explicit(family) => {
            if family.is_empty() {
                return Err(Error::OutOfRange("empty belief family".into()));
            }
            let mut best: Option<BruteForceResult> = None;
            for q in family {
                check_shapes(q, t)?;
                let value = expectation(q, t);
                if best.as_ref().map_or(true, |b| value < b.value) {
                    best = Some(BruteForceResult {
                        value,
                        argmin: q.clone(),
                    });
                }
            }
            Ok(best.unwrap())
        }
        EnumeratedSet::PermutationClosure { seed } => {
            check_shapes(seed, t)?;
            check_shapes(seed, mu)?;
            if seed.len() > MAX_PERMUTATION_CELLS {
                return Err(Error::EnumerationTooLarge(format!(
                    "{}! permutations exceed the {}-cell cap",
                    seed.len(),
                    MAX_PERMUTATION_CELLS
                )));
            }
            if mu.windows(2).any(|w| (w[0] - w[1]).abs() > 1e-15) {
                return Err(Error::InvalidDensity(
                    "permutation closure needs a uniform base measure".into(),
                ));
            }
            let m = seed.len();
            let mut best: Option<BruteForceResult> = None;
            for perm in (0..m).permutations(m) {
                let q: Vec<f64> = perm.iter().map(|&k| seed[k]).collect();
                let value = expectation(&q, t);
                let better = match &best {
                    None => true,
                    Some(b) => value < b.value || (value == b.value && q < b.argmin),
                };
                if better {
                    best = Some(BruteForceResult { value, argmin: q });
                }
            }
            Ok(best.unwrap())
        }
    }
}

/// Classical oppositely-sorted pairing: the largest masses meet the smallest
/// payoffs. This is the exact minimum of `E[t]` over all permutations of
/// `q`, by the rearrangement inequality for sums.
pub fn sorted_pairing_min(q: &[f64], t: &[f64]) -> BruteForceResult {
    let m = q.len();
    let mut by_t: Vec<usize> = (0..m).collect();
    by_t.sort_by(|&a, &b| t[a].partial_cmp(&t[b]).unwrap().then(a.cmp(&b)));
    let mut masses: Vec<f64> = q.to_vec();
    masses.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut argmin = vec![0.0; m];
    for (rank, &cell) in by_t.iter().enumerate() {
        argmin[cell] = masses[rank];
    }
    let value = expectation(&argmin, t);
    BruteForceResult { value, argmin }
}

/// Exact minimum of `E[t]` over arrangements of `q` whose values decrease
/// along both grid axes, by depth-first enumeration of the linear
/// extensions of the `rows x cols` grid order.
pub fn min_over_decreasing_fillings(
    q: &[f64],
    t: &[f64],
    rows: usize,
    cols: usize,
) -> Result<BruteForceResult> {
    if rows * cols != q.len() || rows * cols != t.len() {
        return Err(Error::ShapeMismatch(format!(
            "{rows}x{cols} grid vs {} masses",
            q.len()
        )));
    }
    if rows * cols > 16 {
        return Err(Error::EnumerationTooLarge(
            "decreasing-filling enumeration capped at 16 cells".into(),
        ));
    }
    let mut masses: Vec<f64> = q.to_vec();
    masses.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let total = rows * cols;
    let mut placement = vec![usize::MAX; total]; // cell -> rank
    let mut filled_in_row = vec![0usize; rows];
    let mut best: Option<BruteForceResult> = None;

    fn dfs(
        rank: usize,
        total: usize,
        rows: usize,
        cols: usize,
        masses: &[f64],
        t: &[f64],
        placement: &mut Vec<usize>,
        filled_in_row: &mut Vec<usize>,
        best: &mut Option<BruteForceResult>,
    ) {
        if rank == total {
            let mut q = vec![0.0; total];
            for (cell, &r) in placement.iter().enumerate() {
                q[cell] = masses[r];
            }
            let value = expectation(&q, t);
            if best.as_ref().map_or(true, |b| value < b.value) {
                *best = Some(BruteForceResult { value, argmin: q });
            }
            return;
        }
        // the next-largest mass goes to any cell whose upper-left
        // neighbors are already filled
        for r in 0..rows {
            let c = filled_in_row[r];
            if c >= cols {
                continue;
            }
            if r > 0 && filled_in_row[r - 1] <= c {
                continue;
            }
            let cell = r * cols + c;
            placement[cell] = rank;
            filled_in_row[r] += 1;
            dfs(
                rank + 1,
                total,
                rows,
                cols,
                masses,
                t,
                placement,
                filled_in_row,
                best,
            );
            filled_in_row[r] -= 1;
            placement[cell] = usize::MAX;
        }
    }

    dfs(
        0,
        total,
        rows,
        cols,
        &masses,
        t,
        &mut placement,
        &mut filled_in_row,
        &mut best,
    );
    Ok(best.unwrap())
}

/// All permutations of a seed mass vector; the rearrangement closure under a
/// uniform base measure. Capped at 8 cells.
pub fn permutation_closure(seed: &[f64]) -> Result<Vec<Vec<f64>>> {
    if seed.len() > MAX_PERMUTATION_CELLS {
        return Err(Error::EnumerationTooLarge(format!(
            "{}! permutations exceed the {}-cell cap",
            seed.len(),
            MAX_PERMUTATION_CELLS
        )));
    }
    Ok((0..seed.len())
        .permutations(seed.len())
        .map(|perm| perm.iter().map(|&k| seed[k]).collect())
        .collect())
}

/// Verdict of the probabilistic-sophistication comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum SophisticationVerdict {
    /// The enumerated minima of the two payoffs agree.
    Holds { min_t: f64, min_t_alt: f64 },
    /// The minima differ; both are reported as the witness.
    Fails { min_t: f64, min_t_alt: f64 },
    /// The two payoffs do not share a mu-distribution, so the comparison
    /// does not apply.
    Inapplicable,
}

/// For a rearrangement-invariant family, payoffs with identical
/// mu-distributions must share the same minimum expectation.
pub fn probabilistic_sophistication_check(
    family: &[Vec<f64>],
    t: &[f64],
    t_alt: &[f64],
    mu: &[f64],
) -> Result<SophisticationVerdict> {
    check_shapes(t, t_alt)?;
    check_shapes(t, mu)?;
    // payoff distributions under mu must match: compare (value, mass) blocks
    let dist = |vals: &[f64]| -> Vec<(f64, f64)> {
        let mut blocks: Vec<(f64, f64)> = vals.iter().zip(mu).map(|(&v, &m)| (v, m)).collect();
        blocks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        blocks
    };
    let (da, db) = (dist(t), dist(t_alt));
    let mut same = true;
    let mut cum = 0.0;
    for (a, b) in da.iter().zip(&db) {
        if (a.0 - b.0).abs() > RATIO_TOL || (a.1 - b.1).abs() > MASS_EPS {
            same = false;
            break;
        }
        cum += a.1;
    }
    let _ = cum;
    if !same {
        return Ok(SophisticationVerdict::Inapplicable);
    }
    let set = EnumeratedSet::Explicit(family.to_vec());
    let min_t = brute_force_min(&set, t, mu)?.value;
    let min_t_alt = brute_force_min(&set, t_alt, mu)?.value;
    if (min_t - min_t_alt).abs() <= RATIO_TOL {
        Ok(SophisticationVerdict::Holds { min_t, min_t_alt })
    } else {
        Ok(SophisticationVerdict::Fails { min_t, min_t_alt })
    }
}

/// Witness for a failed interval-intersection inequality.
#[derive(Debug, Clone)]
pub struct LemmaWitness {
    pub upper_set_thresholds: Vec<usize>,
    pub set_a: Vec<usize>,
    pub set_b: Vec<usize>,
}

/// Exhaustive check of the interval-intersection inequality on an `n x n`
/// uniform grid: for every upper set `U` and every pair of subsets
/// `(A_1, A_2)`, replacing the subsets by left intervals of equal mass can
/// only shrink the intersection with `U`. Integer counting, so the
/// comparison is exact.
pub fn interval_intersection_suite(n: usize) -> Result<Option<LemmaWitness>> {
    if n > 5 {
        return Err(Error::EnumerationTooLarge(
            "interval-intersection suite capped at 5x5 grids".into(),
        ));
    }
    // upper sets of the grid order: row thresholds nonincreasing in the row
    let mut thresholds_list: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(partial) = stack.pop() {
        if partial.len() == n {
            thresholds_list.push(partial);
            continue;
        }
        let cap = partial.last().copied().unwrap_or(n);
        for c in 0..=cap {
            let mut next = partial.clone();
            next.push(c);
            stack.push(next);
        }
    }
    let subsets: Vec<Vec<usize>> = (1..(1u32 << n))
        .map(|bits| (0..n).filter(|&k| bits >> k & 1 == 1).collect())
        .collect();
    for thresholds in &thresholds_list {
        // membership: (i, j) in U iff j >= thresholds[i]
        let count_in = |a: &[usize], b: &[usize]| -> usize {
            a.iter()
                .map(|&i| b.iter().filter(|&&j| j >= thresholds[i]).count())
                .sum()
        };
        for a in &subsets {
            for b in &subsets {
                let a_star: Vec<usize> = (0..a.len()).collect();
                let b_star: Vec<usize> = (0..b.len()).collect();
                if count_in(&a_star, &b_star) > count_in(a, b) {
                    return Ok(Some(LemmaWitness {
                        upper_set_thresholds: thresholds.clone(),
                        set_a: a.clone(),
                        set_b: b.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Randomized property suite for the anti-comonotone construction: the
/// output is a rearrangement, satisfies the anti-comonotonicity
/// conditions, and weakly lowers `E[T]`. Returns the first failure as a
/// message.
pub fn anti_comonotone_suite(instances: usize, seed: u64) -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..instances {
        let n = rng.gen_range(2..=6usize);
        let cells = n * n;
        let p = vec![1.0 / cells as f64; cells];
        let q = random_masses(&mut rng, cells);
        let t = random_monotone_payoff(&mut rng, n);
        let qt = anti_comonotone_rearrangement(&q, &t, &p)
            .map_err(|e| format!("case {case}: construction failed: {e}"))?;
        if !is_rearrangement(&qt, &q, &p).map_err(|e| format!("case {case}: {e}"))? {
            return Err(format!("case {case}: output is not a rearrangement"));
        }
        let ratio = likelihood_ratio(&qt, &p).unwrap();
        if let Some((a, b)) = anti_comonotone_violation(&ratio, &t, 1e-9) {
            return Err(format!(
                "case {case}: anti-comonotonicity violated at cells {a}, {b}"
            ));
        }
        let drop = expectation(&q, &t) - expectation(&qt, &t);
        if drop < -1e-12 {
            return Err(format!("case {case}: expectation rose by {}", -drop));
        }
        // the ratio must decrease along both axes since t increases in each
        for i in 0..n {
            for j in 0..n {
                if i + 1 < n && ratio[(i + 1) * n + j] > ratio[i * n + j] + 1e-9 {
                    return Err(format!("case {case}: ratio increases along axis 0"));
                }
                if j + 1 < n && ratio[i * n + j + 1] > ratio[i * n + j] + 1e-9 {
                    return Err(format!("case {case}: ratio increases along axis 1"));
                }
            }
        }
    }
    Ok(())
}

/// Randomized property suite for the independent/IID rearrangement:
/// marginals are rearranged, the product structure survives, and `E[T]`
/// weakly drops.
pub fn independent_rearrangement_suite(
    instances: usize,
    seed: u64,
) -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..instances {
        let n = rng.gen_range(2..=6usize);
        let grid = crate::measure::Grid1D::new(n).unwrap();
        let iid = rng.gen_bool(0.5);
        let q0 = random_masses(&mut rng, n);
        let q1 = if iid { q0.clone() } else { random_masses(&mut rng, n) };
        let mk = |mass: Vec<f64>| crate::measure::Density1D::new(grid.clone(), mass).unwrap();
        let p_marg = mk(vec![1.0 / n as f64; n]);
        let q = Density2D::product(&mk(q0.clone()), &mk(q1.clone())).unwrap();
        let p = Density2D::product(&p_marg, &p_marg).unwrap();
        let t = random_monotone_payoff(&mut rng, n);
        let q_star = independent_decreasing_rearrangement(&q, &p)
            .map_err(|e| format!("case {case}: {e}"))?;
        // marginal rearrangement + product structure
        for axis in [0, 1] {
            let before = q.marginal(axis);
            let after = q_star.marginal(axis);
            if !is_rearrangement(after.mass(), before.mass(), p_marg.mass())
                .map_err(|e| format!("case {case}: {e}"))?
            {
                return Err(format!("case {case}: axis {axis} marginal not rearranged"));
            }
            let m = after.mass();
            let r = likelihood_ratio(m, p_marg.mass()).unwrap();
            if r.windows(2).any(|w| w[1] > w[0] + 1e-9) {
                return Err(format!("case {case}: axis {axis} ratio not decreasing"));
            }
        }
        if q_star.product_residual() > 1e-10 {
            return Err(format!("case {case}: product structure lost"));
        }
        if iid {
            let a = q_star.marginal(0);
            let b = q_star.marginal(1);
            if a.mass()
                .iter()
                .zip(b.mass())
                .any(|(x, y)| (x - y).abs() > 1e-10)
            {
                return Err(format!("case {case}: IID input lost symmetry"));
            }
        }
        let drop = expectation(q.mass(), &t) - expectation(q_star.mass(), &t);
        if drop < -1e-12 {
            return Err(format!("case {case}: expectation rose by {}", -drop));
        }
    }
    Ok(())
}

fn random_masses(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut q: Vec<f64> = (0..m).map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
    let s = stable_sum(&q);
    q.iter_mut().for_each(|x| *x /= s);
    q
}

/// Random payoff strictly increasing along both axes, generically tie-free.
fn random_monotone_payoff(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let cum = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut acc = 0.0;
        (0..n)
            .map(|_| {
                acc += rng.gen::<f64>() + 0.01;
                acc
            })
            .collect()
    };
    let a = cum(rng);
    let b = cum(rng);
    let c = cum(rng);
    let d = cum(rng);
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[i * n + j] = a[i] + b[j] + 0.5 * c[i] * d[j];
        }
    }
    t
}
