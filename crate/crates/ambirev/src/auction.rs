//! Equilibrium bids and transfer tables for the standard auction formats.
//!
//! Bids live on grid nodes; transfers follow the textbook payment tables,
//! including the half-weight tie rule for winner-pay formats. The total
//! transfer grid is what the ambiguity solvers consume.

use crate::error::{Error, Result};
use crate::measure::{Grid1D, MarginalCdf, ReferenceBelief};

/// Auction formats. `SimpleContest(kappa)` charges the loser a fraction
/// `kappa` of her own bid and interpolates first-price (0) to all-pay (1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuctionKind {
    FirstPrice,
    SecondPrice,
    AllPay,
    WarOfAttrition,
    SimpleContest(f64),
    AffiliatedFirstPrice,
}

impl AuctionKind {
    /// Parse `fpa|spa|apa|war|contest:<kappa>|fpa-affiliated`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "fpa" => return Ok(Self::FirstPrice),
            "spa" => return Ok(Self::SecondPrice),
            "apa" => return Ok(Self::AllPay),
            "war" => return Ok(Self::WarOfAttrition),
            "fpa-affiliated" => return Ok(Self::AffiliatedFirstPrice),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("contest:") {
            let kappa: f64 = rest
                .parse()
                .map_err(|e| Error::Config(format!("bad contest fraction {rest:?}: {e}")))?;
            if !(0.0..=1.0).contains(&kappa) {
                return Err(Error::OutOfRange(format!(
                    "contest fraction must lie in [0, 1], got {kappa}"
                )));
            }
            return Ok(Self::SimpleContest(kappa));
        }
        Err(Error::Config(format!(
            "unknown auction {s:?}; expected fpa|spa|apa|war|contest:<kappa>|fpa-affiliated"
        )))
    }

    pub fn label(&self) -> String {
        match self {
            Self::FirstPrice => "fpa".into(),
            Self::SecondPrice => "spa".into(),
            Self::AllPay => "apa".into(),
            Self::WarOfAttrition => "war".into(),
            Self::SimpleContest(k) => format!("contest:{k}"),
            Self::AffiliatedFirstPrice => "fpa-affiliated".into(),
        }
    }
}

/// Equilibrium bid values on grid nodes. All formats bid zero at type zero;
/// that anchor is implicit in [`BidFunction::eval`].
#[derive(Debug, Clone)]
pub struct BidFunction {
    grid: Grid1D,
    values: Vec<f64>,
    diverges_at_top: bool,
}

impl BidFunction {
    fn new(grid: Grid1D, values: Vec<f64>, diverges_at_top: bool) -> Self {
        debug_assert!(
            values.windows(2).all(|w| w[1] >= w[0] - 1e-12),
            "bid values must be nondecreasing"
        );
        Self {
            grid,
            values,
            diverges_at_top,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// True when the bid grows without bound as the type approaches one
    /// (war of attrition).
    pub fn diverges_at_top(&self) -> bool {
        self.diverges_at_top
    }

    /// Piecewise-linear evaluation through (0, 0) and the node values.
    /// Beyond the last node the bid extrapolates with the final slope; a
    /// divergent bid reports `f64::INFINITY` at one.
    pub fn eval(&self, theta: f64) -> f64 {
        let nodes = self.grid.nodes();
        let m = self.values.len();
        if self.diverges_at_top && theta >= 1.0 {
            return f64::INFINITY;
        }
        if theta <= 0.0 {
            return 0.0;
        }
        if theta <= nodes[0] {
            return self.values[0] * theta / nodes[0];
        }
        if theta >= nodes[m - 1] {
            let slope = if m >= 2 {
                (self.values[m - 1] - self.values[m - 2]) / (nodes[m - 1] - nodes[m - 2])
            } else {
                0.0
            };
            return self.values[m - 1] + slope * (theta - nodes[m - 1]);
        }
        let idx = nodes.partition_point(|&x| x <= theta);
        let (x0, y0) = (nodes[idx - 1], self.values[idx - 1]);
        let (x1, y1) = (nodes[idx], self.values[idx]);
        y0 + (y1 - y0) * (theta - x0) / (x1 - x0)
    }
}

/// 8-point Gauss-Legendre on [a, b].
pub(crate) fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 8] = [
        -0.9602898564975362,
        -0.7966664774136267,
        -0.5255324099163290,
        -0.1834346424956498,
        0.1834346424956498,
        0.5255324099163290,
        0.7966664774136267,
        0.9602898564975362,
    ];
    const W: [f64; 8] = [
        0.1012285362903763,
        0.2223810344533745,
        0.3137066458778873,
        0.3626837833783620,
        0.3626837833783620,
        0.3137066458778873,
        0.2223810344533745,
        0.1012285362903763,
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    X.iter().zip(W).map(|(&x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Cumulative integral of `f` from 0 to every grid node.
fn cumulative_to_nodes(f: &dyn Fn(f64) -> f64, grid: &Grid1D) -> Vec<f64> {
    let n = grid.n();
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut pos = 0.0;
    for k in 0..n {
        let node = grid.node(k);
        acc += gauss_legendre(f, pos, node);
        out.push(acc);
        pos = node;
    }
    out
}

/// First-price bid `b(theta) = theta - int_0^theta F(z) dz / F(theta)`.
pub fn bid_fpa(cdf: &MarginalCdf, grid: &Grid1D) -> BidFunction {
    let int_f = cumulative_to_nodes(&|z| cdf.eval(z), grid);
    let values = grid
        .nodes()
        .iter()
        .zip(&int_f)
        .map(|(&theta, &i)| theta - i / cdf.eval(theta))
        .collect();
    BidFunction::new(grid.clone(), values, false)
}

/// Second-price bid: truthful, identity on nodes.
pub fn bid_spa(grid: &Grid1D) -> BidFunction {
    BidFunction::new(grid.clone(), grid.nodes().to_vec(), false)
}

/// All-pay bid `b(theta) = theta F(theta) - int_0^theta F(z) dz`.
pub fn bid_apa(cdf: &MarginalCdf, grid: &Grid1D) -> BidFunction {
    let int_f = cumulative_to_nodes(&|z| cdf.eval(z), grid);
    let values = grid
        .nodes()
        .iter()
        .zip(&int_f)
        .map(|(&theta, &i)| theta * cdf.eval(theta) - i)
        .collect();
    BidFunction::new(grid.clone(), values, false)
}

/// War-of-attrition bid `b(theta) = int_0^theta z f(z) / (1 - F(z)) dz`.
///
/// The bid diverges at theta = 1; node values stop short of the top edge.
/// The uniform case uses the closed antiderivative `-z - ln(1 - z)`; other
/// families integrate the hazard cell by cell.
pub fn bid_war(cdf: &MarginalCdf, grid: &Grid1D) -> BidFunction {
    let values = match cdf {
        MarginalCdf::Power { alpha } if (*alpha - 1.0).abs() < 1e-14 => grid
            .nodes()
            .iter()
            .map(|&z| -z - (1.0 - z).ln())
            .collect(),
        _ => cumulative_to_nodes(
            &|z| z * cdf.density(z) / (1.0 - cdf.eval(z)).max(1e-300),
            grid,
        ),
    };
    BidFunction::new(grid.clone(), values, true)
}

/// Simple-contest bid pinned down by revenue equivalence: the interim
/// expected payment `b(theta) (F + kappa (1 - F))` must match the
/// first-price payment `F(theta) b_I(theta)`.
pub fn bid_simple_contest(cdf: &MarginalCdf, grid: &Grid1D, kappa: f64) -> Result<BidFunction> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::OutOfRange(format!(
            "contest fraction must lie in [0, 1], got {kappa}"
        )));
    }
    let fpa = bid_fpa(cdf, grid);
    let values = grid
        .nodes()
        .iter()
        .zip(fpa.values())
        .map(|(&theta, &bi)| {
            let f = cdf.eval(theta);
            f * bi / (f + kappa * (1.0 - f))
        })
        .collect();
    Ok(BidFunction::new(grid.clone(), values, false))
}

/// Symmetric first-price equilibrium under an affiliated reference belief:
/// the ODE `b'(theta) = (theta - b) f(theta|theta) / F(theta|theta)`,
/// integrated by fixed-step RK4.
///
/// The ODE is singular at zero; the first two nodes are pinned to the
/// IID-uniform asymptote `b = theta / 2` and integration starts from the
/// second node.
pub fn bid_fpa_affiliated(reference: &ReferenceBelief) -> Result<BidFunction> {
    if !reference.is_symmetric(1e-12) {
        return Err(Error::EquilibriumUnavailable(
            "affiliated first-price equilibrium needs a symmetric reference".into(),
        ));
    }
    let grid = reference.grid().clone();
    let n = grid.n();
    let nodes = grid.nodes().to_vec();
    // diagonal conditional density and CDF, midpoint convention
    let mut f_diag = Vec::with_capacity(n);
    let mut cdf_diag = Vec::with_capacity(n);
    for i in 0..n {
        let row = reference.conditional_row(i);
        let below: f64 = row[..i].iter().sum();
        let f = row[i] * n as f64;
        let cdf = below + 0.5 * row[i];
        if i > 0 && (f <= 0.0 || cdf <= 0.0) {
            return Err(Error::EquilibriumUnavailable(format!(
                "conditional mass at the diagonal vanishes at node {i}"
            )));
        }
        f_diag.push(f);
        cdf_diag.push(cdf);
    }
    let interp = |ys: &[f64], x: f64| -> f64 {
        if x <= nodes[0] {
            return ys[0];
        }
        if x >= nodes[n - 1] {
            return ys[n - 1];
        }
        let idx = nodes.partition_point(|&v| v <= x);
        let (x0, y0) = (nodes[idx - 1], ys[idx - 1]);
        let (x1, y1) = (nodes[idx], ys[idx]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    };
    let lambda = |x: f64| -> f64 { interp(&f_diag, x) / interp(&cdf_diag, x) };
    let mut values = vec![0.0; n];
    values[0] = nodes[0] / 2.0;
    if n > 1 {
        values[1] = nodes[1] / 2.0;
    }
    for i in 1..n.saturating_sub(1) {
        let h = nodes[i + 1] - nodes[i];
        let (t, y) = (nodes[i], values[i]);
        let f = |x: f64, b: f64| (x - b) * lambda(x);
        let k1 = f(t, y);
        let k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(t + h, y + h * k3);
        values[i + 1] = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if values[i + 1] > nodes[i + 1] {
            return Err(Error::Solver(format!(
                "affiliated bid crossed the diagonal at node {}",
                i + 1
            )));
        }
    }
    Ok(BidFunction::new(grid, values, false))
}

/// Per-bidder transfer table `t_i(theta, theta')` for one auction, with the
/// exact tie rule of each format.
#[derive(Debug, Clone)]
pub struct Transfer {
    kind: AuctionKind,
    bid: BidFunction,
}

impl Transfer {
    pub fn new(kind: AuctionKind, bid: BidFunction) -> Self {
        Self { kind, bid }
    }

    /// Build the equilibrium transfer table for `kind` under `reference`.
    pub fn build(
        kind: AuctionKind,
        cdf: &MarginalCdf,
        reference: &ReferenceBelief,
    ) -> Result<Self> {
        let grid = reference.grid();
        let bid = match kind {
            AuctionKind::FirstPrice => bid_fpa(cdf, grid),
            AuctionKind::SecondPrice => bid_spa(grid),
            AuctionKind::AllPay => bid_apa(cdf, grid),
            AuctionKind::WarOfAttrition => bid_war(cdf, grid),
            AuctionKind::SimpleContest(kappa) => bid_simple_contest(cdf, grid, kappa)?,
            AuctionKind::AffiliatedFirstPrice => bid_fpa_affiliated(reference)?,
        };
        Ok(Self { kind, bid })
    }

    pub fn kind(&self) -> AuctionKind {
        self.kind
    }

    pub fn bid(&self) -> &BidFunction {
        &self.bid
    }

    pub fn grid(&self) -> &Grid1D {
        self.bid.grid()
    }

    /// Payment of a bidder with type index `own` against competitor type
    /// index `comp`, straight from the transfer table.
    pub fn payment(&self, own: usize, comp: usize) -> f64 {
        use std::cmp::Ordering::*;
        let b = &self.bid;
        match self.kind {
            AuctionKind::FirstPrice | AuctionKind::AffiliatedFirstPrice => match own.cmp(&comp) {
                Greater => b.value_at(own),
                Equal => 0.5 * b.value_at(own),
                Less => 0.0,
            },
            AuctionKind::SecondPrice => match own.cmp(&comp) {
                Greater => b.value_at(comp),
                Equal => 0.5 * b.value_at(comp),
                Less => 0.0,
            },
            AuctionKind::AllPay => b.value_at(own),
            AuctionKind::WarOfAttrition => {
                if own > comp {
                    b.value_at(comp)
                } else {
                    b.value_at(own)
                }
            }
            AuctionKind::SimpleContest(kappa) => match own.cmp(&comp) {
                Greater => b.value_at(own),
                Equal => 0.5 * (1.0 + kappa) * b.value_at(own),
                Less => kappa * b.value_at(own),
            },
        }
    }

    /// Total transfer `t_1(theta, theta') + t_2(theta', theta)`.
    pub fn total(&self, i: usize, j: usize) -> f64 {
        self.payment(i, j) + self.payment(j, i)
    }

    /// Materialize the total transfer over the full grid.
    pub fn total_grid(&self) -> TotalTransfer {
        let n = self.grid().n();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = self.total(i, j);
            }
        }
        TotalTransfer { n, values }
    }

    /// True when losing bidders pay exactly zero everywhere.
    pub fn loser_pays_nothing(&self) -> bool {
        let n = self.grid().n();
        (0..n).all(|own| (own + 1..n).all(|comp| self.payment(own, comp) == 0.0))
    }
}

/// Total transfer values on the square grid, row-major.
#[derive(Debug, Clone)]
pub struct TotalTransfer {
    n: usize,
    values: Vec<f64>,
}

impl TotalTransfer {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "expected {} transfer values, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Assumption check: the total transfer must be nondecreasing in each
    /// argument. Returns a violating adjacent cell pair if any.
    pub fn monotone_violation(&self, tol: f64) -> Option<(usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if i + 1 < n && self.at(i + 1, j) < self.at(i, j) - tol {
                    return Some((i * n + j, (i + 1) * n + j));
                }
                if j + 1 < n && self.at(i, j + 1) < self.at(i, j) - tol {
                    return Some((i * n + j, i * n + j + 1));
                }
            }
        }
        None
    }
}

/// Interim expected payment `e_i(report, type) = sum_j t_i(report, j) P(j | type)`.
pub fn interim_expected_payment(
    t: &Transfer,
    reference: &ReferenceBelief,
    report: usize,
    own_type: usize,
) -> f64 {
    let cond = reference.conditional_row(own_type);
    cond.iter()
        .enumerate()
        .map(|(j, &m)| m * t.payment(report, j))
        .sum()
}

/// Expected payment conditional on winning: the average of `t_i(report, .)`
/// over strictly lower competitor types.
pub fn winning_conditional_payment(
    t: &Transfer,
    reference: &ReferenceBelief,
    report: usize,
    own_type: usize,
) -> Result<f64> {
    let cond = reference.conditional_row(own_type);
    let win_mass: f64 = cond[..report].iter().sum();
    if win_mass <= 0.0 {
        return Err(Error::EmptyConditioningEvent(format!(
            "no competitor mass below report index {report}"
        )));
    }
    let paid: f64 = cond[..report]
        .iter()
        .enumerate()
        .map(|(j, &m)| m * t.payment(report, j))
        .sum();
    Ok(paid / win_mass)
}

/// Interim expected payoff of reporting `report` with true type `own_type`:
/// value times win probability minus expected payment, under the reference
/// conditional. The tie cell wins with probability one half.
pub fn interim_expected_payoff(
    t: &Transfer,
    reference: &ReferenceBelief,
    report: usize,
    own_type: usize,
) -> f64 {
    let cond = reference.conditional_row(own_type);
    let theta = reference.grid().node(own_type);
    let win_prob: f64 = cond[..report].iter().sum::<f64>() + 0.5 * cond[report];
    theta * win_prob - interim_expected_payment(t, reference, report, own_type)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn uniform_ref(n: usize) -> ReferenceBelief {
        ReferenceBelief::iid(&MarginalCdf::uniform(), n).unwrap()
    }

    #[test]
    fn fpa_bid_matches_power_family_closed_forms() {
        let grid = Grid1D::new(200).unwrap();
        let b = bid_fpa(&MarginalCdf::uniform(), &grid);
        assert_abs_diff_eq!(b.eval(0.5), 0.25, epsilon = 1e-10);
        assert_abs_diff_eq!(b.eval(0.0), 0.0, epsilon = 1e-15);
        let b2 = bid_fpa(&MarginalCdf::power(2.0).unwrap(), &grid);
        assert_abs_diff_eq!(b2.eval(0.6), 0.4, epsilon = 1e-10);
    }

    #[test]
    fn spa_bid_is_identity() {
        let grid = Grid1D::new(8).unwrap();
        let b = bid_spa(&grid);
        assert_abs_diff_eq!(b.eval(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.eval(0.5), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.eval(1.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn apa_bid_examples_and_identity_with_fpa() {
        let grid = Grid1D::new(400).unwrap();
        let cdf = MarginalCdf::uniform();
        let b = bid_apa(&cdf, &grid);
        assert_abs_diff_eq!(b.eval(0.5), 0.125, epsilon = 1e-6);
        assert_abs_diff_eq!(b.eval(0.0), 0.0, epsilon = 1e-15);

        // quadrature oracle for F = theta^2 at 0.6: theta F - int_0^theta F
        let cdf2 = MarginalCdf::power(2.0).unwrap();
        let b2 = bid_apa(&cdf2, &grid);
        let int_f = gauss_legendre(&|z: f64| z * z, 0.0, 0.6);
        let oracle = 0.6 * 0.36 - int_f;
        assert_abs_diff_eq!(b2.eval(0.6), oracle, epsilon = 5e-6);
        assert_abs_diff_eq!(oracle, 0.144, epsilon = 1e-12);

        // b_A = F * b_I on all nodes
        let bi = bid_fpa(&cdf2, &grid);
        for (k, &theta) in grid.nodes().iter().enumerate() {
            assert!(
                (b2.value_at(k) - cdf2.eval(theta) * bi.value_at(k)).abs() < 1e-9,
                "node {k}"
            );
        }
    }

    #[test]
    fn war_bid_closed_form_and_quadrature_agree() {
        let grid = Grid1D::new(400).unwrap();
        let b = bid_war(&MarginalCdf::uniform(), &grid);
        let oracle = |t: f64| -t - (1.0 - t).ln();
        assert_abs_diff_eq!(b.eval(0.5), oracle(0.5), epsilon = 1e-5);
        assert_abs_diff_eq!(b.eval(0.5), 0.1931471805599453, epsilon = 1e-5);
        assert_abs_diff_eq!(b.eval(0.0), 0.0, epsilon = 1e-15);
        assert!(b.eval(1.0).is_infinite());

        // quadrature path on a near-uniform power exponent matches closed form
        let bq = bid_war(&MarginalCdf::power(1.0 + 1e-13).unwrap(), &grid);
        for k in (0..400).step_by(37) {
            assert!((bq.value_at(k) - b.value_at(k)).abs() < 1e-7, "node {k}");
        }
    }

    #[test]
    fn war_dominates_all_pay_and_crosses_identity_once() {
        let grid = Grid1D::new(400).unwrap();
        let cdf = MarginalCdf::uniform();
        let bw = bid_war(&cdf, &grid);
        let ba = bid_apa(&cdf, &grid);
        for k in 0..400 {
            assert!(bw.value_at(k) > ba.value_at(k), "node {k}");
        }
        // convexity under the monotone virtual hazard condition
        let v = bw.values();
        for k in 1..399 {
            assert!(v[k + 1] - v[k] >= v[k] - v[k - 1] - 1e-12, "node {k}");
        }
        // theta*: bisection oracle on -t - ln(1-t) = t
        let (mut lo, mut hi) = (0.5, 0.99);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if -mid - (1.0f64 - mid).ln() < mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta_star = 0.5 * (lo + hi);
        assert_abs_diff_eq!(theta_star, 0.7968, epsilon = 1e-3);
        // crossing of the grid bid against the identity
        let cross = grid
            .nodes()
            .iter()
            .position(|&t| bw.eval(t) > t)
            .expect("war bid must cross the identity");
        assert!((grid.node(cross) - theta_star).abs() < 2.0 * grid.width());
        for k in 0..cross {
            assert!(bw.value_at(k) <= grid.node(k) + 1e-12);
        }
        for k in cross..400 {
            assert!(bw.value_at(k) >= grid.node(k) - 1e-12);
        }
    }

    #[test]
    fn contest_endpoints_reduce_to_fpa_and_apa() {
        let grid = Grid1D::new(64).unwrap();
        let cdf = MarginalCdf::power(1.5).unwrap();
        let c0 = bid_simple_contest(&cdf, &grid, 0.0).unwrap();
        let c1 = bid_simple_contest(&cdf, &grid, 1.0).unwrap();
        let bi = bid_fpa(&cdf, &grid);
        let ba = bid_apa(&cdf, &grid);
        for k in 0..64 {
            assert_abs_diff_eq!(c0.value_at(k), bi.value_at(k), epsilon = 1e-12);
            assert_abs_diff_eq!(c1.value_at(k), ba.value_at(k), epsilon = 1e-12);
        }
        assert!(bid_simple_contest(&cdf, &grid, 1.5).is_err());
    }

    #[test]
    fn contest_half_bid_value_and_revenue_equivalence() {
        let reference = uniform_ref(400);
        let grid = reference.grid().clone();
        let cdf = MarginalCdf::uniform();
        let b = bid_simple_contest(&cdf, &grid, 0.5).unwrap();
        assert_abs_diff_eq!(b.eval(0.5), 1.0 / 6.0, epsilon = 1e-6);

        // interim expected payment equals the first-price payment F b_I
        let t = Transfer::build(AuctionKind::SimpleContest(0.5), &cdf, &reference).unwrap();
        let bi = bid_fpa(&cdf, &grid);
        for k in (0..400).step_by(23) {
            let e = interim_expected_payment(&t, &reference, k, k);
            let target = cdf.eval(grid.node(k)) * bi.value_at(k);
            assert!((e - target).abs() < 1e-6, "node {k}: {e} vs {target}");
        }
    }

    #[test]
    fn affiliated_bid_matches_iid_uniform_at_zeta_zero() {
        let reference = ReferenceBelief::band(0.0, 200).unwrap();
        let b = bid_fpa_affiliated(&reference).unwrap();
        for (k, &theta) in reference.grid().nodes().iter().enumerate() {
            assert!(
                (b.value_at(k) - theta / 2.0).abs() < 1e-9,
                "node {k}: {} vs {}",
                b.value_at(k),
                theta / 2.0
            );
        }
    }

    #[test]
    fn affiliated_bid_stays_below_value_and_best_responds() {
        let reference = ReferenceBelief::band(0.5, 200).unwrap();
        let b = bid_fpa_affiliated(&reference).unwrap();
        let grid = reference.grid().clone();
        for k in 0..200 {
            assert!(b.value_at(k) <= grid.node(k), "node {k}");
        }
        let t = Transfer::new(AuctionKind::AffiliatedFirstPrice, b);
        // best-response scan: deviating by +-0.05 must not improve payoff
        let dev = (0.05 * 200.0) as usize;
        for &frac in &[0.3, 0.5, 0.7] {
            let k = (frac * 200.0) as usize;
            let truth = interim_expected_payoff(&t, &reference, k, k);
            for report in [k - dev, k + dev] {
                let deviated = interim_expected_payoff(&t, &reference, report, k);
                assert!(
                    deviated < truth + 1e-12,
                    "type {frac}: deviating to {report} improved payoff"
                );
            }
        }
    }

    #[test]
    fn transfer_table_examples_on_five_cells() {
        // nodes: 0.1, 0.3, 0.5, 0.7, 0.9
        let reference = uniform_ref(5);
        let cdf = MarginalCdf::uniform();
        let spa = Transfer::build(AuctionKind::SecondPrice, &cdf, &reference).unwrap();
        assert_abs_diff_eq!(spa.payment(3, 1), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(spa.payment(1, 3), 0.0, epsilon = 1e-15);

        let apa = Transfer::build(AuctionKind::AllPay, &cdf, &reference).unwrap();
        assert_abs_diff_eq!(apa.payment(1, 3), 0.045, epsilon = 1e-10);

        let war = Transfer::build(AuctionKind::WarOfAttrition, &cdf, &reference).unwrap();
        assert_abs_diff_eq!(war.payment(1, 3), -0.3 - 0.7f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(war.payment(1, 3), 0.05667494393873245, epsilon = 1e-10);

        // ties: winner-pay formats halve the bid, war charges the own bid
        let fpa = Transfer::build(AuctionKind::FirstPrice, &cdf, &reference).unwrap();
        assert_abs_diff_eq!(
            fpa.payment(2, 2),
            0.5 * fpa.bid().value_at(2),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(war.payment(2, 2), war.bid().value_at(2), epsilon = 1e-15);
    }

    #[test]
    fn interim_payments_match_quadrature_oracles() {
        let reference = uniform_ref(400);
        let cdf = MarginalCdf::uniform();
        let k = 200;
        let theta = reference.grid().node(k);

        let spa = Transfer::build(AuctionKind::SecondPrice, &cdf, &reference).unwrap();
        // oracle: int_0^theta z dz
        let oracle = gauss_legendre(&|z| z, 0.0, theta);
        let e = interim_expected_payment(&spa, &reference, k, k);
        assert!((e - oracle).abs() < 1e-3, "{e} vs {oracle}");

        let fpa = Transfer::build(AuctionKind::FirstPrice, &cdf, &reference).unwrap();
        let e_fpa = interim_expected_payment(&fpa, &reference, k, k);
        assert!((e_fpa - theta * theta / 2.0).abs() < 1e-3);

        // type zero pays next to nothing in every format
        for kind in [
            AuctionKind::FirstPrice,
            AuctionKind::SecondPrice,
            AuctionKind::AllPay,
            AuctionKind::WarOfAttrition,
        ] {
            let t = Transfer::build(kind, &cdf, &reference).unwrap();
            assert!(interim_expected_payment(&t, &reference, 0, 0) < 1e-3);
        }
    }

    #[test]
    fn revenue_equivalence_across_formats() {
        let reference = uniform_ref(400);
        let cdf = MarginalCdf::uniform();
        let kinds = [
            AuctionKind::FirstPrice,
            AuctionKind::SecondPrice,
            AuctionKind::AllPay,
            AuctionKind::WarOfAttrition,
            AuctionKind::SimpleContest(0.25),
            AuctionKind::SimpleContest(0.75),
        ];
        let transfers: Vec<Transfer> = kinds
            .iter()
            .map(|&k| Transfer::build(k, &cdf, &reference).unwrap())
            .collect();
        for k in (0..400).step_by(13) {
            let payments: Vec<f64> = transfers
                .iter()
                .map(|t| interim_expected_payment(t, &reference, k, k))
                .collect();
            for (a, pa) in payments.iter().enumerate() {
                for pb in payments.iter().skip(a + 1) {
                    assert!(
                        (pa - pb).abs() < 2e-3,
                        "node {k}: interim payments {payments:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn total_transfers_are_monotone() {
        let reference = uniform_ref(50);
        let cdf = MarginalCdf::uniform();
        for kind in [
            AuctionKind::FirstPrice,
            AuctionKind::SecondPrice,
            AuctionKind::AllPay,
            AuctionKind::WarOfAttrition,
            AuctionKind::SimpleContest(0.5),
            AuctionKind::AffiliatedFirstPrice,
        ] {
            let t = Transfer::build(kind, &cdf, &reference).unwrap();
            let total = t.total_grid();
            assert_eq!(
                total.monotone_violation(1e-12),
                None,
                "total transfer of {} must be monotone",
                kind.label()
            );
        }
    }

    #[test]
    fn winning_conditional_payment_examples() {
        let reference = uniform_ref(400);
        let cdf = MarginalCdf::uniform();
        let fpa = Transfer::build(AuctionKind::FirstPrice, &cdf, &reference).unwrap();
        for k in [40, 200, 360] {
            let w = winning_conditional_payment(&fpa, &reference, k, k).unwrap();
            assert_abs_diff_eq!(w, fpa.bid().value_at(k), epsilon = 1e-12);
        }
        let spa = Transfer::build(AuctionKind::SecondPrice, &cdf, &reference).unwrap();
        let w = winning_conditional_payment(&spa, &reference, 200, 200).unwrap();
        assert!((w - 0.25).abs() < 1e-3, "{w}");
        assert!(winning_conditional_payment(&spa, &reference, 0, 0).is_err());
    }

    #[test]
    fn bid_inequalities_fpa_vs_apa() {
        let grid = Grid1D::new(200).unwrap();
        for alpha in [1.0, 1.5, 2.0] {
            let cdf = MarginalCdf::power(alpha).unwrap();
            let bi = bid_fpa(&cdf, &grid);
            let ba = bid_apa(&cdf, &grid);
            for k in 0..200 {
                assert!(bi.value_at(k) > ba.value_at(k), "alpha={alpha}, node {k}");
            }
        }
    }

    #[test]
    fn auction_kind_parsing() {
        assert_eq!(AuctionKind::parse("fpa").unwrap(), AuctionKind::FirstPrice);
        assert_eq!(
            AuctionKind::parse("contest:0.25").unwrap(),
            AuctionKind::SimpleContest(0.25)
        );
        assert_eq!(
            AuctionKind::parse("fpa-affiliated").unwrap(),
            AuctionKind::AffiliatedFirstPrice
        );
        assert!(AuctionKind::parse("dutch").is_err());
        assert!(AuctionKind::parse("contest:1.5").is_err());
    }
}
