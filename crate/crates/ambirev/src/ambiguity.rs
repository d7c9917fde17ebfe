//! Worst-case, best-case and divergence-penalized revenue solvers.
//!
//! Each ambiguity family restricts the likelihood ratio `dQ/dP` on the
//! support of the reference belief:
//!
//! - KL / phi-divergence balls: `D_phi(Q || P) <= eta`, solved through the
//!   exponential-tilt (or conjugate) dual with a bisection on the dual
//!   parameter `tau`;
//! - bounded likelihood ratio: `dQ/dP in [1 - alpha eta, 1 + beta eta]`,
//!   solved by quantile water-filling in the payoff order;
//! - contamination: `Q = (1 - eta) P + eta R`, solved in closed form.
//!
//! The `Independent` domain alternates exact marginal solves; the `Iid`
//! domain runs a damped symmetric fixed point with multi-start, as the
//! bilinear objective need not be convex.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::auction::TotalTransfer;
use crate::error::{Error, Result};
use crate::measure::{stable_sum, Density2D, Phi, ReferenceBelief};

const FIXED_POINT_TOL: f64 = 1e-10;
const FIXED_POINT_CAP: usize = 10_000;
const FIXED_POINT_DAMPING: f64 = 0.5;
const MULTI_STARTS: u64 = 5;
const TAU_LO: f64 = 1e-8;
const TAU_HI: f64 = 1e8;
const TAU_BISECTIONS: usize = 200;

/// Ambiguity-set families around the reference belief.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Relative entropy ball of radius eta.
    Kl,
    /// General phi-divergence ball.
    PhiDiv(Phi),
    /// Likelihood ratio confined to `[1 - alpha eta, 1 + beta eta]`.
    BoundedLr { alpha: f64, beta: f64 },
    /// Mixture contamination `(1 - eta) P + eta R`.
    Contamination,
}

/// Which beliefs the set ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Joint,
    Independent,
    Iid,
}

impl Domain {
    pub fn label(&self) -> &'static str {
        match self {
            Domain::Joint => "joint",
            Domain::Independent => "ind",
            Domain::Iid => "iid",
        }
    }
}

/// Parsed ambiguity-set description: family, radius and domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguitySpec {
    pub family: Family,
    pub eta: f64,
    pub domain: Domain,
}

impl AmbiguitySpec {
    pub fn new(family: Family, eta: f64, domain: Domain) -> Result<Self> {
        if !(eta >= 0.0) {
            return Err(Error::OutOfRange(format!(
                "ambiguity radius must be nonnegative, got {eta}"
            )));
        }
        if let Family::BoundedLr { alpha, beta } = family {
            if alpha < 0.0 || beta < 0.0 {
                return Err(Error::OutOfRange(
                    "bounded likelihood ratio needs alpha, beta >= 0".into(),
                ));
            }
        }
        Ok(Self {
            family,
            eta,
            domain,
        })
    }

    /// Parse `kl:<eta>`, `phi:<name>:<eta>`, `blr:<alpha>:<beta>:<eta>` or
    /// `contam:<eta>`, each with an optional `:joint|:ind|:iid` suffix
    /// (default joint).
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.is_empty() {
            return Err(Error::Config("empty ambiguity spec".into()));
        }
        let (domain, body) = match parts.last().copied() {
            Some("joint") => (Domain::Joint, &parts[..parts.len() - 1]),
            Some("ind") => (Domain::Independent, &parts[..parts.len() - 1]),
            Some("iid") => (Domain::Iid, &parts[..parts.len() - 1]),
            _ => (Domain::Joint, &parts[..]),
        };
        let num = |txt: &str| -> Result<f64> {
            txt.parse()
                .map_err(|e| Error::Config(format!("bad number {txt:?} in ambiguity spec: {e}")))
        };
        let (family, eta) = match body {
            ["kl", eta] => (Family::Kl, num(eta)?),
            ["phi", name, eta] => (Family::PhiDiv(Phi::parse(name)?), num(eta)?),
            ["blr", alpha, beta, eta] => (
                Family::BoundedLr {
                    alpha: num(alpha)?,
                    beta: num(beta)?,
                },
                num(eta)?,
            ),
            ["contam", eta] => (Family::Contamination, num(eta)?),
            _ => {
                return Err(Error::Config(format!(
                    "unknown ambiguity spec {s:?}; expected kl:<eta>, phi:<name>:<eta>, \
                     blr:<alpha>:<beta>:<eta> or contam:<eta> with optional :joint|:ind|:iid"
                )))
            }
        };
        Self::new(family, eta, domain)
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn label(&self) -> String {
        let head = match self.family {
            Family::Kl => format!("kl:{}", self.eta),
            Family::PhiDiv(phi) => format!("phi:{}:{}", phi.name(), self.eta),
            Family::BoundedLr { alpha, beta } => format!("blr:{alpha}:{beta}:{}", self.eta),
            Family::Contamination => format!("contam:{}", self.eta),
        };
        format!("{head}:{}", self.domain.label())
    }
}

/// An ambiguity set: a spec anchored at a reference belief.
#[derive(Debug, Clone)]
pub struct AmbiguitySet {
    spec: AmbiguitySpec,
    reference: Arc<ReferenceBelief>,
}

impl AmbiguitySet {
    pub fn new(spec: AmbiguitySpec, reference: Arc<ReferenceBelief>) -> Result<Self> {
        if spec.domain == Domain::Iid && !reference.is_iid(1e-8) {
            return Err(Error::Config(
                "IID ambiguity domain requires an IID reference belief".into(),
            ));
        }
        Ok(Self { spec, reference })
    }

    pub fn spec(&self) -> &AmbiguitySpec {
        &self.spec
    }

    pub fn reference(&self) -> &ReferenceBelief {
        &self.reference
    }

    pub fn eta(&self) -> f64 {
        self.spec.eta
    }
}

/// Minimize (worst case) or maximize (best case) expected revenue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    WorstCase,
    BestCase,
}

/// Output of a robust revenue solve.
#[derive(Debug, Clone)]
pub struct WorstCaseSolution {
    pub objective: Objective,
    /// Extremal expected total transfer.
    pub value: f64,
    /// The minimizing (or maximizing) belief on the grid.
    pub minimizer: Density2D,
    /// Dual tilt parameter, when the family has one.
    pub dual_tau: Option<f64>,
    /// Divergence of the extremal belief from the reference (the family's
    /// own divergence for KL/phi balls, relative entropy otherwise).
    pub achieved_divergence: f64,
    /// Whether the minimizer ratio is monotone cell-by-cell in the
    /// direction the theory predicts (decreasing for worst case).
    pub monotone_minimizer: bool,
    /// False when an iterative path hit its cap without converging.
    pub certified: bool,
    /// RNG seed of the winning multi-start, for randomized paths.
    pub seed: Option<u64>,
    /// True when `1 - alpha eta < 0` forced the ratio floor to zero.
    pub clipped: bool,
    pub note: Option<String>,
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn kl_masses(ratio: &[f64], p: &[f64]) -> f64 {
    let terms: Vec<f64> = ratio
        .iter()
        .zip(p)
        .map(|(&r, &m)| m * xlogx(r))
        .collect();
    stable_sum(&terms)
}

fn dot3(ratio: &[f64], p: &[f64], t: &[f64]) -> f64 {
    let terms: Vec<f64> = ratio
        .iter()
        .zip(p)
        .zip(t)
        .map(|((&r, &m), &v)| r * m * v)
        .collect();
    stable_sum(&terms)
}

/// Linear-objective solve over a KL ball on mass slices: minimize
/// `sum p r c` s.t. `KL(r) <= eta`. Returns (ratio, tau, kl).
fn solve_kl_linear(c: &[f64], p: &[f64], eta: f64) -> (Vec<f64>, Option<f64>, f64) {
    let m = c.len();
    if eta == 0.0 {
        return (vec![1.0; m], None, 0.0);
    }
    let cmin = c.iter().cloned().fold(f64::INFINITY, f64::min);
    // saturation: the tilt family ends at the uniform-on-argmin belief
    let argmin_mass: f64 = c
        .iter()
        .zip(p)
        .filter(|(&v, _)| v == cmin)
        .map(|(_, &m)| m)
        .sum();
    let kl_max = -argmin_mass.ln();
    if eta >= kl_max - 1e-12 {
        let ratio: Vec<f64> = c
            .iter()
            .map(|&v| if v == cmin { 1.0 / argmin_mass } else { 0.0 })
            .collect();
        return (ratio, Some(0.0), kl_max);
    }
    let tilt = |tau: f64| -> Vec<f64> {
        let w: Vec<f64> = c.iter().zip(p).map(|(&v, &m)| m * (-(v - cmin) / tau).exp()).collect();
        let z = stable_sum(&w);
        c.iter().map(|&v| (-(v - cmin) / tau).exp() / z).collect()
    };
    let (mut lo, mut hi) = (TAU_LO, TAU_HI);
    for _ in 0..TAU_BISECTIONS {
        let mid = (lo * hi).sqrt();
        let kl = kl_masses(&tilt(mid), p);
        if kl > eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = (lo * hi).sqrt();
    let ratio = tilt(tau);
    let kl = kl_masses(&ratio, p);
    (ratio, Some(tau), kl)
}

/// Generic phi-ball solve: minimize `sum p r c` s.t. `sum p phi(r) <= eta`.
/// Nested bisection: the inner multiplier normalizes the ratio, the outer
/// tau matches the divergence budget.
fn solve_phi_linear(phi: Phi, c: &[f64], p: &[f64], eta: f64) -> Result<(Vec<f64>, Option<f64>, f64)> {
    let m = c.len();
    if eta == 0.0 {
        return Ok((vec![1.0; m], None, 0.0));
    }
    let cmin = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let cmax = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let argmin_mass: f64 = c
        .iter()
        .zip(p)
        .filter(|(&v, _)| v == cmin)
        .map(|(_, &m)| m)
        .sum();
    // divergence of the uniform-on-argmin endpoint
    let div_max = argmin_mass * phi.value(1.0 / argmin_mass) + (1.0 - argmin_mass) * phi.value(0.0);
    if eta >= div_max - 1e-12 {
        let ratio: Vec<f64> = c
            .iter()
            .map(|&v| if v == cmin { 1.0 / argmin_mass } else { 0.0 })
            .collect();
        return Ok((ratio, Some(0.0), div_max));
    }
    let ratio_at = |tau: f64, lambda: f64| -> Vec<f64> {
        c.iter()
            .map(|&v| phi.inv_derivative((lambda - v) / tau))
            .collect()
    };
    let normalize = |tau: f64| -> Result<Vec<f64>> {
        let mut lo = cmin - 10.0 * tau - 10.0;
        let mut hi = cmax + 10.0 * tau + 10.0;
        let total = |lambda: f64| -> f64 {
            let r = ratio_at(tau, lambda);
            dot3(&r, p, &vec![1.0; r.len()])
        };
        let mut width = hi - lo;
        for _ in 0..60 {
            if total(lo) <= 1.0 {
                break;
            }
            lo -= width;
            width *= 2.0;
        }
        let mut width = hi - lo;
        for _ in 0..60 {
            if total(hi) >= 1.0 {
                break;
            }
            hi += width;
            width *= 2.0;
        }
        if total(lo) > 1.0 || total(hi) < 1.0 {
            return Err(Error::Solver(
                "phi-ball normalization bracket failed".into(),
            ));
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(ratio_at(tau, 0.5 * (lo + hi)))
    };
    let div_of = |ratio: &[f64]| -> f64 {
        let terms: Vec<f64> = ratio.iter().zip(p).map(|(&r, &m)| m * phi.value(r)).collect();
        stable_sum(&terms)
    };
    let (mut lo, mut hi) = (TAU_LO, TAU_HI);
    for _ in 0..TAU_BISECTIONS {
        let mid = (lo * hi).sqrt();
        let d = div_of(&normalize(mid)?);
        if d > eta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = (lo * hi).sqrt();
    let ratio = normalize(tau)?;
    let d = div_of(&ratio);
    Ok((ratio, Some(tau), d))
}

/// Water-filling solve for the bounded likelihood ratio family: the ratio
/// sits at the ceiling on low-payoff cells, at the floor on high-payoff
/// cells, with at most one fractional cell at the threshold. Returns
/// (ratio, clipped).
fn solve_blr_linear(c: &[f64], p: &[f64], alpha: f64, beta: f64, eta: f64) -> (Vec<f64>, bool) {
    let m = c.len();
    let raw_lo = 1.0 - alpha * eta;
    let clipped = raw_lo < 0.0;
    let lo = raw_lo.max(0.0);
    let hi = 1.0 + beta * eta;
    if (hi - lo).abs() < 1e-15 {
        return (vec![1.0; m], false);
    }
    // cells in payoff order, ties broken by index
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| c[a].partial_cmp(&c[b]).unwrap().then(a.cmp(&b)));
    // ceiling mass fixed by the mean constraint: hi F + lo (1 - F) = 1
    let target = (1.0 - lo) / (hi - lo);
    let mut ratio = vec![lo; m];
    let mut cum = 0.0;
    for &k in &order {
        if cum + p[k] <= target + 1e-15 {
            ratio[k] = hi;
            cum += p[k];
        } else if cum < target {
            // fractional cell balances the remaining mass
            ratio[k] = lo + (target - cum) * (hi - lo) / p[k];
            cum = target;
        } else {
            break;
        }
    }
    // shave any float drift in the normalization
    let total = dot3(&ratio, p, &vec![1.0; m]);
    if (total - 1.0).abs() > 1e-13 {
        for r in &mut ratio {
            *r /= total;
        }
    }
    (ratio, clipped)
}

/// Closed-form contamination solve: keep `(1 - eta) P` and move the free
/// `eta` onto the first cell attaining the payoff extremum.
fn solve_contamination_linear(c: &[f64], p: &[f64], eta: f64) -> Vec<f64> {
    let m = c.len();
    let cmin = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let atom = (0..m).find(|&k| c[k] == cmin).unwrap();
    let mut ratio = vec![1.0 - eta; m];
    ratio[atom] += eta / p[atom];
    ratio
}

struct LinearSolve {
    ratio: Vec<f64>,
    dual_tau: Option<f64>,
    divergence: f64,
    clipped: bool,
}

/// Dispatch a linear-objective solve on mass slices for one family.
fn solve_linear(family: Family, c: &[f64], p: &[f64], eta: f64) -> Result<LinearSolve> {
    Ok(match family {
        Family::Kl => {
            let (ratio, tau, d) = solve_kl_linear(c, p, eta);
            LinearSolve {
                ratio,
                dual_tau: tau,
                divergence: d,
                clipped: false,
            }
        }
        Family::PhiDiv(phi) => {
            let (ratio, tau, d) = solve_phi_linear(phi, c, p, eta)?;
            LinearSolve {
                ratio,
                dual_tau: tau,
                divergence: d,
                clipped: false,
            }
        }
        Family::BoundedLr { alpha, beta } => {
            let (ratio, clipped) = solve_blr_linear(c, p, alpha, beta, eta);
            let d = kl_masses(&ratio, p);
            LinearSolve {
                ratio,
                dual_tau: None,
                divergence: d,
                clipped,
            }
        }
        Family::Contamination => {
            let ratio = solve_contamination_linear(c, p, eta);
            let d = kl_masses(&ratio, p);
            LinearSolve {
                ratio,
                dual_tau: None,
                divergence: d,
                clipped: false,
            }
        }
    })
}

/// Is the ratio monotone along both grid axes in the given direction,
/// skipping cells outside the reference support?
fn ratio_monotone(ratio: &[f64], p: &[f64], n: usize, decreasing: bool, tol: f64) -> bool {
    let ok = |prev: f64, next: f64| {
        if decreasing {
            next <= prev + tol
        } else {
            next >= prev - tol
        }
    };
    for i in 0..n {
        let mut prev: Option<f64> = None;
        for j in 0..n {
            let k = i * n + j;
            if p[k] <= 0.0 {
                continue;
            }
            if let Some(pv) = prev {
                if !ok(pv, ratio[k]) {
                    return false;
                }
            }
            prev = Some(ratio[k]);
        }
    }
    for j in 0..n {
        let mut prev: Option<f64> = None;
        for i in 0..n {
            let k = i * n + j;
            if p[k] <= 0.0 {
                continue;
            }
            if let Some(pv) = prev {
                if !ok(pv, ratio[k]) {
                    return false;
                }
            }
            prev = Some(ratio[k]);
        }
    }
    true
}

/// Joint-domain solve over the reference support.
fn solve_joint(set: &AmbiguitySet, t: &TotalTransfer, objective: Objective) -> Result<WorstCaseSolution> {
    let reference = set.reference();
    let n = reference.n();
    if t.n() != n {
        return Err(Error::ShapeMismatch(
            "transfer grid does not match the reference grid".into(),
        ));
    }
    let p_full = reference.joint().mass();
    let t_full = t.values();
    // restrict to the support
    let support: Vec<usize> = (0..n * n).filter(|&k| p_full[k] > 0.0).collect();
    let p: Vec<f64> = support.iter().map(|&k| p_full[k]).collect();
    let sign = match objective {
        Objective::WorstCase => 1.0,
        Objective::BestCase => -1.0,
    };
    let c: Vec<f64> = support.iter().map(|&k| sign * t_full[k]).collect();
    let sol = solve_linear(set.spec.family, &c, &p, set.eta())?;
    let mut mass = vec![0.0; n * n];
    let mut ratio_full = vec![0.0; n * n];
    for ((&k, &m), &r) in support.iter().zip(&p).zip(&sol.ratio) {
        mass[k] = m * r;
        ratio_full[k] = r;
    }
    let t_on_support: Vec<f64> = support.iter().map(|&k| t_full[k]).collect();
    let value = dot3(&sol.ratio, &p, &t_on_support);
    let minimizer = Density2D::new(reference.grid().clone(), mass)?;
    let monotone = ratio_monotone(
        &ratio_full,
        p_full,
        n,
        objective == Objective::WorstCase,
        1e-8,
    );
    Ok(WorstCaseSolution {
        objective,
        value,
        minimizer,
        dual_tau: sol.dual_tau,
        achieved_divergence: sol.divergence,
        monotone_minimizer: monotone,
        certified: true,
        seed: None,
        clipped: sol.clipped,
        note: None,
    })
}

/// Partial expectation of the transfer against one marginal ratio:
/// `Tbar(i) = sum_j T(i, j) q(j) p_marg(j)` (or the transpose).
fn partial_expectation(t: &TotalTransfer, ratio: &[f64], p_marg: &[f64], axis: usize) -> Vec<f64> {
    let n = t.n();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let v = if axis == 0 { t.at(i, j) } else { t.at(j, i) };
            acc += v * ratio[j] * p_marg[j];
        }
        out[i] = acc;
    }
    out
}

struct MarginalSolve {
    ratio0: Vec<f64>,
    ratio1: Vec<f64>,
    dual_tau: Option<f64>,
    divergence: f64,
    clipped: bool,
    converged: bool,
    seed: Option<u64>,
}

/// Alternating exact marginal minimization for the independent domain.
fn solve_independent(
    set: &AmbiguitySet,
    t: &TotalTransfer,
    sign: f64,
) -> Result<MarginalSolve> {
    let reference = set.reference();
    let n = reference.n();
    let p0 = reference.marginal(0).mass().to_vec();
    let p1 = reference.marginal(1).mass().to_vec();
    let eta = set.eta();
    let mut r0 = vec![1.0; n];
    let mut r1 = vec![1.0; n];
    let mut clipped = false;
    let mut converged = false;
    for _ in 0..FIXED_POINT_CAP {
        let c0: Vec<f64> = partial_expectation(t, &r1, &p1, 0)
            .iter()
            .map(|&v| sign * v)
            .collect();
        let s0 = solve_linear(set.spec.family, &c0, &p0, eta)?;
        let c1: Vec<f64> = partial_expectation(t, &s0.ratio, &p0, 1)
            .iter()
            .map(|&v| sign * v)
            .collect();
        let s1 = solve_linear(set.spec.family, &c1, &p1, eta)?;
        clipped = s0.clipped || s1.clipped;
        let delta = s0
            .ratio
            .iter()
            .zip(&r0)
            .chain(s1.ratio.iter().zip(&r1))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        r0 = s0.ratio;
        r1 = s1.ratio;
        if delta < FIXED_POINT_TOL {
            converged = true;
            break;
        }
    }
    let d0 = family_divergence(set.spec.family, &r0, &p0);
    let d1 = family_divergence(set.spec.family, &r1, &p1);
    Ok(MarginalSolve {
        ratio0: r0,
        ratio1: r1,
        dual_tau: None,
        divergence: d0.max(d1),
        clipped,
        converged,
        seed: None,
    })
}

fn family_divergence(family: Family, ratio: &[f64], p: &[f64]) -> f64 {
    match family {
        Family::Kl => kl_masses(ratio, p),
        Family::PhiDiv(phi) => {
            let terms: Vec<f64> = ratio.iter().zip(p).map(|(&r, &m)| m * phi.value(r)).collect();
            stable_sum(&terms)
        }
        // bounded-ratio and contamination families have no divergence
        // budget; report relative entropy as the diagnostic
        Family::BoundedLr { .. } | Family::Contamination => kl_masses(ratio, p),
    }
}

/// Symmetric damped fixed point for the IID domain. For the KL family the
/// marginal tilt parameter is bisected so the marginal divergence meets
/// eta; other families re-solve their 1-D problem against the current
/// partial expectation.
fn solve_iid(set: &AmbiguitySet, t: &TotalTransfer, sign: f64) -> Result<MarginalSolve> {
    let reference = set.reference();
    let n = reference.n();
    let p = reference.marginal(0).mass().to_vec();
    let eta = set.eta();
    if eta == 0.0 {
        return Ok(MarginalSolve {
            ratio0: vec![1.0; n],
            ratio1: vec![1.0; n],
            dual_tau: None,
            divergence: 0.0,
            clipped: false,
            converged: true,
            seed: None,
        });
    }
    let value_of = |ratio: &[f64]| -> f64 {
        let tbar = partial_expectation(t, ratio, &p, 0);
        let terms: Vec<f64> = ratio
            .iter()
            .zip(&p)
            .zip(&tbar)
            .map(|((&r, &m), &v)| sign * r * m * v)
            .collect();
        stable_sum(&terms)
    };
    let mut best: Option<MarginalSolve> = None;
    let mut best_value = f64::INFINITY;
    for start in 0..MULTI_STARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(start);
        let mut init: Vec<f64> = if start == 0 {
            vec![1.0; n]
        } else {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.1).collect();
            let total = dot3(&raw, &p, &vec![1.0; n]);
            raw.iter().map(|r| r / total).collect()
        };
        let (ratio, tau, div, clipped, converged) = match set.spec.family {
            Family::Kl => {
                // outer bisection on tau, inner damped Gibbs iteration
                let fixed_point = |tau: f64, init: &[f64]| -> (Vec<f64>, bool) {
                    let mut r = init.to_vec();
                    for _ in 0..FIXED_POINT_CAP {
                        let tbar = partial_expectation(t, &r, &p, 0);
                        let c: Vec<f64> = tbar.iter().map(|&v| sign * v).collect();
                        let cmin = c.iter().cloned().fold(f64::INFINITY, f64::min);
                        let w: Vec<f64> =
                            c.iter().map(|&v| (-(v - cmin) / tau).exp()).collect();
                        let z = dot3(&w, &p, &vec![1.0; n]);
                        let next: Vec<f64> = w
                            .iter()
                            .zip(&r)
                            .map(|(&wk, &rk)| {
                                FIXED_POINT_DAMPING * rk + (1.0 - FIXED_POINT_DAMPING) * wk / z
                            })
                            .collect();
                        let delta = next
                            .iter()
                            .zip(&r)
                            .map(|(a, b)| (a - b).abs())
                            .fold(0.0f64, f64::max);
                        r = next;
                        if delta < FIXED_POINT_TOL {
                            return (r, true);
                        }
                    }
                    (r, false)
                };
                let (mut lo, mut hi) = (TAU_LO, TAU_HI);
                for _ in 0..80 {
                    let mid = (lo * hi).sqrt();
                    let (r, _) = fixed_point(mid, &init);
                    if kl_masses(&r, &p) > eta {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    init = r;
                }
                let tau = (lo * hi).sqrt();
                let (r, conv) = fixed_point(tau, &init);
                let div = kl_masses(&r, &p);
                (r, Some(tau), div, false, conv)
            }
            _ => {
                // damped re-solve of the 1-D family problem
                let mut r = init;
                let mut converged = false;
                let mut clipped = false;
                for _ in 0..FIXED_POINT_CAP {
                    let tbar = partial_expectation(t, &r, &p, 0);
                    let c: Vec<f64> = tbar.iter().map(|&v| sign * v).collect();
                    let s = solve_linear(set.spec.family, &c, &p, eta)?;
                    clipped = s.clipped;
                    let next: Vec<f64> = s
                        .ratio
                        .iter()
                        .zip(&r)
                        .map(|(&a, &b)| FIXED_POINT_DAMPING * b + (1.0 - FIXED_POINT_DAMPING) * a)
                        .collect();
                    let delta = next
                        .iter()
                        .zip(&r)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max);
                    r = next;
                    if delta < FIXED_POINT_TOL {
                        converged = true;
                        break;
                    }
                }
                let div = family_divergence(set.spec.family, &r, &p);
                (r, None, div, clipped, converged)
            }
        };
        let v = value_of(&ratio);
        if v < best_value {
            best_value = v;
            best = Some(MarginalSolve {
                ratio0: ratio.clone(),
                ratio1: ratio,
                dual_tau: tau,
                divergence: div,
                clipped,
                converged,
                seed: Some(start),
            });
        }
    }
    Ok(best.expect("at least one start"))
}

fn assemble_marginal_solution(
    set: &AmbiguitySet,
    t: &TotalTransfer,
    objective: Objective,
    sol: MarginalSolve,
) -> Result<WorstCaseSolution> {
    let reference = set.reference();
    let n = reference.n();
    let p0 = reference.marginal(0).mass();
    let p1 = reference.marginal(1).mass();
    let mut mass = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            mass[i * n + j] = sol.ratio0[i] * p0[i] * sol.ratio1[j] * p1[j];
        }
    }
    let total = stable_sum(&mass);
    for m in &mut mass {
        *m /= total;
    }
    let minimizer = Density2D::new(reference.grid().clone(), mass)?;
    let value = minimizer.expectation_with(t.values());
    let ratio_full = crate::rearrange::likelihood_ratio(minimizer.mass(), reference.joint().mass())
        .unwrap_or_else(|_| vec![1.0; n * n]);
    let monotone = ratio_monotone(
        &ratio_full,
        reference.joint().mass(),
        n,
        objective == Objective::WorstCase,
        1e-8,
    );
    Ok(WorstCaseSolution {
        objective,
        value,
        minimizer,
        dual_tau: sol.dual_tau,
        achieved_divergence: sol.divergence,
        monotone_minimizer: monotone,
        certified: sol.converged,
        seed: sol.seed,
        clipped: sol.clipped,
        note: if sol.converged {
            None
        } else {
            Some("fixed point hit its iteration cap; best iterate reported".into())
        },
    })
}

/// Minimum expected total transfer over the ambiguity set.
pub fn worst_case_revenue(set: &AmbiguitySet, t: &TotalTransfer) -> Result<WorstCaseSolution> {
    extremal_revenue(set, t, Objective::WorstCase)
}

/// Maximum expected total transfer over the ambiguity set (the
/// ambiguity-seeking seller).
pub fn best_case_revenue(set: &AmbiguitySet, t: &TotalTransfer) -> Result<WorstCaseSolution> {
    extremal_revenue(set, t, Objective::BestCase)
}

fn extremal_revenue(
    set: &AmbiguitySet,
    t: &TotalTransfer,
    objective: Objective,
) -> Result<WorstCaseSolution> {
    let sign = match objective {
        Objective::WorstCase => 1.0,
        Objective::BestCase => -1.0,
    };
    match set.spec.domain {
        Domain::Joint => solve_joint(set, t, objective),
        Domain::Independent => {
            let sol = solve_independent(set, t, sign)?;
            assemble_marginal_solution(set, t, objective, sol)
        }
        Domain::Iid => {
            let sol = solve_iid(set, t, sign)?;
            assemble_marginal_solution(set, t, objective, sol)
        }
    }
}

/// Divergence-penalized (multiplier) preference value.
#[derive(Debug, Clone)]
pub struct PenalizedSolution {
    pub value: f64,
    pub minimizer: Density2D,
    /// Set when eta = 0 forces the reference-expectation limit.
    pub eta_zero_limit: bool,
}

/// `min_Q E_Q[T] + D_phi(Q || P) / eta`. For the KL generator the
/// minimizer is the unconstrained tilt `exp(-eta T)`; the identity
/// `value = -(1/eta) log E_P[exp(-eta T)]` is its closed form.
pub fn divergence_preference_value(
    reference: &ReferenceBelief,
    t: &TotalTransfer,
    eta: f64,
    phi: Phi,
) -> Result<PenalizedSolution> {
    if eta < 0.0 {
        return Err(Error::OutOfRange(format!(
            "penalty scale must be nonnegative, got {eta}"
        )));
    }
    let n = reference.n();
    let p_full = reference.joint().mass();
    let t_full = t.values();
    if eta == 0.0 {
        return Ok(PenalizedSolution {
            value: reference.joint().expectation_with(t_full),
            minimizer: reference.joint().clone(),
            eta_zero_limit: true,
        });
    }
    let support: Vec<usize> = (0..n * n).filter(|&k| p_full[k] > 0.0).collect();
    let p: Vec<f64> = support.iter().map(|&k| p_full[k]).collect();
    let tv: Vec<f64> = support.iter().map(|&k| t_full[k]).collect();
    let ratio: Vec<f64> = match phi {
        Phi::Kl => {
            let tmin = tv.iter().cloned().fold(f64::INFINITY, f64::min);
            let w: Vec<f64> = tv.iter().map(|&v| (-eta * (v - tmin)).exp()).collect();
            let z = dot3(&w, &p, &vec![1.0; w.len()]);
            w.iter().map(|&x| x / z).collect()
        }
        _ => {
            // pointwise conjugate with a normalization multiplier
            let tmin = tv.iter().cloned().fold(f64::INFINITY, f64::min);
            let tmax = tv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let ratio_at = |lambda: f64| -> Vec<f64> {
                tv.iter()
                    .map(|&v| phi.inv_derivative(eta * (lambda - v)))
                    .collect()
            };
            let total = |lambda: f64| -> f64 {
                let r = ratio_at(lambda);
                dot3(&r, &p, &vec![1.0; r.len()])
            };
            let (mut lo, mut hi) = (tmin - 10.0 / eta - 10.0, tmax + 10.0 / eta + 10.0);
            let mut width = hi - lo;
            while total(lo) > 1.0 {
                lo -= width;
                width *= 2.0;
            }
            let mut width = hi - lo;
            while total(hi) < 1.0 {
                hi += width;
                width *= 2.0;
            }
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if total(mid) < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            ratio_at(0.5 * (lo + hi))
        }
    };
    let div = {
        let terms: Vec<f64> = ratio.iter().zip(&p).map(|(&r, &m)| m * phi.value(r)).collect();
        stable_sum(&terms)
    };
    let value = dot3(&ratio, &p, &tv) + div / eta;
    let mut mass = vec![0.0; n * n];
    for ((&k, &m), &r) in support.iter().zip(&p).zip(&ratio) {
        mass[k] = m * r;
    }
    Ok(PenalizedSolution {
        value,
        minimizer: Density2D::new(reference.grid().clone(), mass)?,
        eta_zero_limit: false,
    })
}

/// Re-checks the monotone-minimizer diagnostic on a finished solution.
pub fn monotone_minimizer_diagnostic(
    sol: &WorstCaseSolution,
    reference: &ReferenceBelief,
) -> bool {
    let n = reference.n();
    let ratio = match crate::rearrange::likelihood_ratio(
        sol.minimizer.mass(),
        reference.joint().mass(),
    ) {
        Ok(r) => r,
        Err(_) => return false,
    };
    ratio_monotone(
        &ratio,
        reference.joint().mass(),
        n,
        sol.objective == Objective::WorstCase,
        1e-8,
    )
}

/// Largest constraint violation of the solution against its family and
/// domain, for feasibility assertions.
pub fn feasibility_residual(set: &AmbiguitySet, sol: &WorstCaseSolution) -> f64 {
    let reference = set.reference();
    let p = reference.joint().mass();
    let q = sol.minimizer.mass();
    let eta = set.eta();
    let ratio = match crate::rearrange::likelihood_ratio(q, p) {
        Ok(r) => r,
        Err(_) => return f64::INFINITY,
    };
    let mut residual: f64 = 0.0;
    // family constraint: on the joint ratio for the joint domain, per
    // marginal for the independent and IID domains
    let family_residual = |ratio: &[f64], base: &[f64]| -> f64 {
        let mut worst: f64 = 0.0;
        match set.spec.family {
            Family::Kl => {
                worst = worst.max(kl_masses(ratio, base) - eta);
            }
            Family::PhiDiv(phi) => {
                let terms: Vec<f64> = ratio
                    .iter()
                    .zip(base)
                    .map(|(&r, &m)| m * phi.value(r))
                    .collect();
                worst = worst.max(stable_sum(&terms) - eta);
            }
            Family::BoundedLr { alpha, beta } => {
                let lo = (1.0 - alpha * eta).max(0.0);
                let hi = 1.0 + beta * eta;
                for (k, &r) in ratio.iter().enumerate() {
                    if base[k] > 0.0 {
                        worst = worst.max(lo - r).max(r - hi);
                    }
                }
            }
            Family::Contamination => {
                let floor = 1.0 - eta;
                for (k, &r) in ratio.iter().enumerate() {
                    if base[k] > 0.0 {
                        worst = worst.max(floor - r);
                    }
                }
            }
        }
        worst
    };
    match set.spec.domain {
        Domain::Joint => {
            residual = residual.max(family_residual(&ratio, p));
        }
        Domain::Independent | Domain::Iid => {
            residual = residual.max(sol.minimizer.product_residual());
            for axis in [0, 1] {
                let m = sol.minimizer.marginal(axis);
                let base = reference.marginal(axis);
                match crate::rearrange::likelihood_ratio(m.mass(), base.mass()) {
                    Ok(r) => residual = residual.max(family_residual(&r, base.mass())),
                    Err(_) => return f64::INFINITY,
                }
            }
            if set.spec.domain == Domain::Iid {
                let a = sol.minimizer.marginal(0);
                let b = sol.minimizer.marginal(1);
                for (x, y) in a.mass().iter().zip(b.mass()) {
                    residual = residual.max((x - y).abs());
                }
            }
        }
    }
    residual
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auction::{AuctionKind, Transfer};
    use crate::measure::MarginalCdf;
    use approx::assert_abs_diff_eq;

    fn uniform_set(family: Family, eta: f64, domain: Domain, n: usize) -> (AmbiguitySet, TotalTransfer) {
        let reference = Arc::new(ReferenceBelief::iid(&MarginalCdf::uniform(), n).unwrap());
        let t = Transfer::build(AuctionKind::SecondPrice, &MarginalCdf::uniform(), &reference)
            .unwrap()
            .total_grid();
        let set = AmbiguitySet::new(
            AmbiguitySpec::new(family, eta, domain).unwrap(),
            reference,
        )
        .unwrap();
        (set, t)
    }

    #[test]
    fn zero_radius_returns_the_reference_expectation() {
        for family in [
            Family::Kl,
            Family::PhiDiv(Phi::ChiSquared),
            Family::BoundedLr { alpha: 1.0, beta: 1.0 },
            Family::Contamination,
        ] {
            let (set, t) = uniform_set(family, 0.0, Domain::Joint, 60);
            let sol = worst_case_revenue(&set, &t).unwrap();
            let e_p = set.reference().joint().expectation_with(t.values());
            assert_abs_diff_eq!(sol.value, e_p, epsilon = 1e-12);
            assert!((sol.value - 1.0 / 3.0).abs() < 1e-3);
            for (q, p) in sol
                .minimizer
                .mass()
                .iter()
                .zip(set.reference().joint().mass())
            {
                assert_abs_diff_eq!(q, p, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn contamination_closed_form_spa() {
        let (set, t) = uniform_set(Family::Contamination, 0.3, Domain::Joint, 200);
        let sol = worst_case_revenue(&set, &t).unwrap();
        let e_p = set.reference().joint().expectation_with(t.values());
        let t_min = t
            .values()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(sol.value, 0.7 * e_p + 0.3 * t_min, epsilon = 1e-12);
        assert!((sol.value - 0.7 / 3.0).abs() < 2e-3);
        assert!(feasibility_residual(&set, &sol) <= 1e-8);
        assert!(sol.monotone_minimizer);
    }

    #[test]
    fn contamination_best_case_hits_the_top_cell() {
        let (set, t) = uniform_set(Family::Contamination, 0.3, Domain::Joint, 100);
        let sol = best_case_revenue(&set, &t).unwrap();
        let e_p = set.reference().joint().expectation_with(t.values());
        let t_max = t
            .values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(sol.value, 0.7 * e_p + 0.3 * t_max, epsilon = 1e-12);
        assert!(sol.monotone_minimizer, "best-case ratio rises with the payoff");
    }

    #[test]
    fn kl_dual_matches_strong_duality_certificate() {
        // independent route: maximize the concave dual
        // g(tau) = -tau log E_P exp(-T / tau) - tau eta by golden section
        let (set, t) = uniform_set(Family::Kl, 0.2, Domain::Joint, 40);
        let sol = worst_case_revenue(&set, &t).unwrap();
        let p = set.reference().joint().mass();
        let g = |tau: f64| -> f64 {
            let terms: Vec<f64> = t
                .values()
                .iter()
                .zip(p)
                .map(|(&v, &m)| m * (-v / tau).exp())
                .collect();
            -tau * stable_sum(&terms).ln() - tau * 0.2
        };
        let phi_ratio = 0.5 * (5.0f64.sqrt() - 1.0);
        let (mut a, mut b) = (1e-4f64, 1e4f64);
        // golden section in log space
        let (mut la, mut lb) = (a.ln(), b.ln());
        for _ in 0..200 {
            let l1 = lb - phi_ratio * (lb - la);
            let l2 = la + phi_ratio * (lb - la);
            if g(l1.exp()) < g(l2.exp()) {
                la = l1;
            } else {
                lb = l2;
            }
        }
        a = la.exp();
        b = lb.exp();
        let dual_value = g(0.5 * (a + b));
        assert!(
            (sol.value - dual_value).abs() < 1e-9,
            "primal {} vs dual {}",
            sol.value,
            dual_value
        );
        assert!(feasibility_residual(&set, &sol) <= 1e-8);
        assert!((sol.achieved_divergence - 0.2).abs() < 1e-6);
        assert!(sol.monotone_minimizer);
    }

    #[test]
    fn generic_phi_path_agrees_with_kl_fast_path() {
        let (set_kl, t) = uniform_set(Family::Kl, 0.15, Domain::Joint, 30);
        let (set_phi, _) = uniform_set(Family::PhiDiv(Phi::Kl), 0.15, Domain::Joint, 30);
        let a = worst_case_revenue(&set_kl, &t).unwrap();
        let b = worst_case_revenue(&set_phi, &t).unwrap();
        assert!((a.value - b.value).abs() < 1e-8, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn chi_squared_ball_is_feasible_and_monotone() {
        let (set, t) = uniform_set(Family::PhiDiv(Phi::ChiSquared), 0.2, Domain::Joint, 40);
        let sol = worst_case_revenue(&set, &t).unwrap();
        assert!(feasibility_residual(&set, &sol) <= 1e-8);
        assert!((sol.achieved_divergence - 0.2).abs() < 1e-6);
        assert!(sol.monotone_minimizer);
        assert!(sol.value < set.reference().joint().expectation_with(t.values()));
    }

    #[test]
    fn blr_water_filling_structure() {
        let reference = Arc::new(ReferenceBelief::iid(&MarginalCdf::uniform(), 60).unwrap());
        let t = Transfer::build(AuctionKind::FirstPrice, &MarginalCdf::uniform(), &reference)
            .unwrap()
            .total_grid();
        let set = AmbiguitySet::new(
            AmbiguitySpec::new(Family::BoundedLr { alpha: 1.0, beta: 1.0 }, 0.5, Domain::Joint)
                .unwrap(),
            reference.clone(),
        )
        .unwrap();
        let sol = worst_case_revenue(&set, &t).unwrap();
        let ratio =
            crate::rearrange::likelihood_ratio(sol.minimizer.mass(), reference.joint().mass())
                .unwrap();
        let mut fractional = 0usize;
        let mut hi_mass = 0.0;
        for (k, &r) in ratio.iter().enumerate() {
            if (r - 1.5).abs() < 1e-9 {
                hi_mass += reference.joint().mass()[k];
            } else if (r - 0.5).abs() >= 1e-9 {
                fractional += 1;
                assert!(r > 0.5 && r < 1.5, "fractional ratio out of band: {r}");
            }
        }
        assert!(fractional <= 1, "{fractional} fractional cells");
        // mass balance: the ceiling region carries F = alpha/(alpha+beta) = 1/2
        assert!((hi_mass - 0.5).abs() < 1e-3, "ceiling mass {hi_mass}");
        assert!(feasibility_residual(&set, &sol) <= 1e-8);
        assert!(sol.monotone_minimizer);
    }

    #[test]
    fn blr_clips_negative_floor() {
        let (set, t) = uniform_set(
            Family::BoundedLr { alpha: 1.0, beta: 1.0 },
            2.0,
            Domain::Joint,
            20,
        );
        let sol = worst_case_revenue(&set, &t).unwrap();
        assert!(sol.clipped);
        assert!(feasibility_residual(&set, &sol) <= 1e-8);
    }

    #[test]
    fn sandwich_and_eta_monotonicity() {
        let etas = [0.0, 0.05, 0.1, 0.2, 0.5, 1.0];
        for family in [
            Family::Kl,
            Family::BoundedLr { alpha: 1.0, beta: 1.0 },
            Family::Contamination,
        ] {
            let mut prev_worst = f64::INFINITY;
            let mut prev_best = f64::NEG_INFINITY;
            for &eta in &etas {
                let (set, t) = uniform_set(family, eta, Domain::Joint, 40);
                let w = worst_case_revenue(&set, &t).unwrap().value;
                let b = best_case_revenue(&set, &t).unwrap().value;
                let e_p = set.reference().joint().expectation_with(t.values());
                assert!(w <= e_p + 1e-10 && b >= e_p - 1e-10);
                assert!(w <= prev_worst + 1e-10, "worst case must fall with eta");
                assert!(b >= prev_best - 1e-10, "best case must rise with eta");
                prev_worst = w;
                prev_best = b;
            }
        }
    }

    #[test]
    fn kl_saturation_returns_the_transfer_minimum() {
        let (set, t) = uniform_set(Family::Kl, 50.0, Domain::Joint, 10);
        let sol = worst_case_revenue(&set, &t).unwrap();
        let t_min = t.values().iter().cloned().fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(sol.value, t_min, epsilon = 1e-12);
        assert_eq!(sol.dual_tau, Some(0.0));
    }

    #[test]
    fn iid_kl_fixed_point_properties() {
        let (set, t) = uniform_set(Family::Kl, 0.2, Domain::Iid, 50);
        let sol = worst_case_revenue(&set, &t).unwrap();
        assert!(sol.certified, "fixed point should converge");
        assert!(feasibility_residual(&set, &sol) <= 1e-6, "residual {}", feasibility_residual(&set, &sol));
        assert!(sol.monotone_minimizer);
        assert!(sol.seed.is_some());
        // the IID set is smaller than the joint set at matched budgets
        let (joint_set, _) = uniform_set(Family::Kl, 0.4, Domain::Joint, 50);
        let joint = worst_case_revenue(&joint_set, &t).unwrap();
        assert!(sol.value >= joint.value - 1e-8);
    }

    #[test]
    fn iid_kl_matches_joint_on_separable_transfers() {
        // the all-pay total transfer is separable, so the joint tilt is a
        // product and the IID solve at eta must equal the joint at 2 eta
        let reference = Arc::new(ReferenceBelief::iid(&MarginalCdf::uniform(), 50).unwrap());
        let t = Transfer::build(AuctionKind::AllPay, &MarginalCdf::uniform(), &reference)
            .unwrap()
            .total_grid();
        let iid = AmbiguitySet::new(
            AmbiguitySpec::new(Family::Kl, 0.1, Domain::Iid).unwrap(),
            reference.clone(),
        )
        .unwrap();
        let joint = AmbiguitySet::new(
            AmbiguitySpec::new(Family::Kl, 0.2, Domain::Joint).unwrap(),
            reference,
        )
        .unwrap();
        let a = worst_case_revenue(&iid, &t).unwrap();
        let b = worst_case_revenue(&joint, &t).unwrap();
        assert!(
            (a.value - b.value).abs() < 1e-6,
            "iid at eta {} vs joint at 2 eta {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn independent_domain_converges_and_is_feasible() {
        let (set, t) = uniform_set(Family::Kl, 0.2, Domain::Independent, 40);
        let sol = worst_case_revenue(&set, &t).unwrap();
        assert!(sol.certified);
        assert!(feasibility_residual(&set, &sol) <= 1e-6);
        assert!(sol.value <= set.reference().joint().expectation_with(t.values()));
    }

    #[test]
    fn divergence_preference_identities() {
        let reference = Arc::new(ReferenceBelief::iid(&MarginalCdf::uniform(), 100).unwrap());
        let t = Transfer::build(AuctionKind::SecondPrice, &MarginalCdf::uniform(), &reference)
            .unwrap()
            .total_grid();
        let e_p = reference.joint().expectation_with(t.values());
        let p = reference.joint().mass();

        // eta -> 0 forces the reference expectation
        let tiny = divergence_preference_value(&reference, &t, 1e-6, Phi::Kl).unwrap();
        assert!((tiny.value - e_p).abs() < 1e-4);
        let zero = divergence_preference_value(&reference, &t, 0.0, Phi::Kl).unwrap();
        assert!(zero.eta_zero_limit);
        assert_abs_diff_eq!(zero.value, e_p, epsilon = 1e-15);

        // growing eta kills the penalty; the entropic remainder decays
        // like ln(eta)/eta, so the transfer minimum needs a large eta
        let t_min = t.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let large = divergence_preference_value(&reference, &t, 50.0, Phi::Kl).unwrap();
        let larger = divergence_preference_value(&reference, &t, 2000.0, Phi::Kl).unwrap();
        assert!(larger.value < large.value);
        assert!((larger.value - t_min).abs() < 2e-2, "{}", larger.value);

        // Gibbs variational identity at eta = 1
        for &eta in &[0.5, 1.0, 2.0] {
            let sol = divergence_preference_value(&reference, &t, eta, Phi::Kl).unwrap();
            let terms: Vec<f64> = t
                .values()
                .iter()
                .zip(p)
                .map(|(&v, &m)| m * (-eta * v).exp())
                .collect();
            let closed = -(stable_sum(&terms).ln()) / eta;
            assert!(
                (sol.value - closed).abs() < 1e-8,
                "eta={eta}: {} vs {}",
                sol.value,
                closed
            );
        }
    }

    #[test]
    fn spec_parsing_round_trips() {
        let s = AmbiguitySpec::parse("kl:0.2:joint").unwrap();
        assert_eq!(s.family, Family::Kl);
        assert_eq!(s.domain, Domain::Joint);
        assert_abs_diff_eq!(s.eta, 0.2, epsilon = 0.0);
        let s = AmbiguitySpec::parse("blr:1:2:0.5:iid").unwrap();
        assert_eq!(
            s.family,
            Family::BoundedLr { alpha: 1.0, beta: 2.0 }
        );
        assert_eq!(s.domain, Domain::Iid);
        let s = AmbiguitySpec::parse("phi:chi2:0.3").unwrap();
        assert_eq!(s.family, Family::PhiDiv(Phi::ChiSquared));
        assert_eq!(s.domain, Domain::Joint);
        let s = AmbiguitySpec::parse("contam:0.1:ind").unwrap();
        assert_eq!(s.family, Family::Contamination);
        assert_eq!(s.domain, Domain::Independent);
        assert!(AmbiguitySpec::parse("wasserstein:0.1").is_err());
        assert!(AmbiguitySpec::parse("kl:-0.5").is_err());
    }

    #[test]
    fn iid_domain_rejects_correlated_references() {
        let band = Arc::new(ReferenceBelief::band(0.5, 20).unwrap());
        let spec = AmbiguitySpec::new(Family::Kl, 0.1, Domain::Iid).unwrap();
        assert!(AmbiguitySet::new(spec, band).is_err());
    }

    #[test]
    fn band_support_solve_stays_on_support() {
        let band = Arc::new(ReferenceBelief::band(0.5, 40).unwrap());
        let t = Transfer::build(AuctionKind::SecondPrice, &MarginalCdf::uniform(), &band)
            .unwrap()
            .total_grid();
        let set = AmbiguitySet::new(
            AmbiguitySpec::new(Family::Kl, 0.2, Domain::Joint).unwrap(),
            band.clone(),
        )
        .unwrap();
        let sol = worst_case_revenue(&set, &t).unwrap();
        for (k, &m) in sol.minimizer.mass().iter().enumerate() {
            if band.joint().mass()[k] <= 0.0 {
                assert_eq!(m, 0.0, "mass leaked off the support at cell {k}");
            }
        }
        assert!(feasibility_residual(&set, &sol) <= 1e-8);
        assert!((sol.value - sol.minimizer.expectation_with(t.values())).abs() < 1e-10);
    }
}
