//! Discretized probability measures on the unit interval and unit square.
//!
//! Everything downstream works with cell masses on a uniform midpoint grid:
//! beliefs are vectors (or row-major matrices) of nonnegative masses summing
//! to one. Reference beliefs carry their marginals and row conditionals so
//! that interim expectations are cheap lookups.

use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-12;

/// Uniform partition of [0, 1] into `n` cells, addressed by midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    n: usize,
    nodes: Vec<f64>,
}

impl Grid1D {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("grid needs at least one cell".into()));
        }
        let nodes = (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect();
        Ok(Self { n, nodes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    /// Cell width, also the base weight 1/n of each cell.
    pub fn width(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn left_edge(&self, k: usize) -> f64 {
        k as f64 / self.n as f64
    }

    pub fn right_edge(&self, k: usize) -> f64 {
        (k + 1) as f64 / self.n as f64
    }

    /// Index of the cell containing `z` (clamped to the grid).
    pub fn cell_of(&self, z: f64) -> usize {
        let k = (z * self.n as f64).floor() as isize;
        k.clamp(0, self.n as isize - 1) as usize
    }
}

/// Neumaier-compensated sum; keeps million-cell totals accurate to an ulp.
pub(crate) fn stable_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn validate_masses(mass: &[f64]) -> Result<()> {
    for (k, &m) in mass.iter().enumerate() {
        if !(m >= 0.0) {
            return Err(Error::InvalidDensity(format!(
                "negative or NaN mass {m} at cell {k}"
            )));
        }
    }
    let sum = stable_sum(mass);
    if (sum - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidDensity(format!(
            "masses sum to {sum}, expected 1 within {MASS_TOL:e}"
        )));
    }
    Ok(())
}

/// Probability masses on a 1-D grid.
#[derive(Debug, Clone)]
pub struct Density1D {
    grid: Grid1D,
    mass: Vec<f64>,
}

impl Density1D {
    pub fn new(grid: Grid1D, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.n() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} masses, got {}",
                grid.n(),
                mass.len()
            )));
        }
        validate_masses(&mass)?;
        Ok(Self { grid, mass })
    }

    pub fn uniform(grid: Grid1D) -> Self {
        let n = grid.n();
        Self {
            grid,
            mass: vec![1.0 / n as f64; n],
        }
    }

    /// Cell masses as CDF increments of a strictly increasing CDF.
    pub fn from_cdf(grid: Grid1D, cdf: &dyn Fn(f64) -> f64) -> Result<Self> {
        let n = grid.n();
        if cdf(0.0).abs() > 1e-9 || (cdf(1.0) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDensity(format!(
                "CDF endpoints must be 0 and 1; got F(0)={}, F(1)={}",
                cdf(0.0),
                cdf(1.0)
            )));
        }
        let edges: Vec<f64> = (0..=n).map(|k| cdf(k as f64 / n as f64)).collect();
        for k in 0..n {
            if edges[k + 1] <= edges[k] {
                return Err(Error::NonMonotoneCdf {
                    index: k,
                    left: edges[k],
                    right: edges[k + 1],
                });
            }
        }
        let mut mass: Vec<f64> = (0..n).map(|k| edges[k + 1] - edges[k]).collect();
        // shave float drift so the sum is exactly 1
        let sum = stable_sum(&mass);
        for m in &mut mass {
            *m /= sum;
        }
        Self::new(grid, mass)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Cumulative masses at the n+1 cell edges.
    pub fn cdf_edges(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.mass.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for &m in &self.mass {
            acc += m;
            out.push(acc);
        }
        out
    }

    /// CDF evaluated at cell midpoints: mass below the cell plus half the cell.
    pub fn cdf_mid(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.mass.len());
        let mut below = 0.0;
        for &m in &self.mass {
            out.push(below + 0.5 * m);
            below += m;
        }
        out
    }

    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.mass
            .iter()
            .zip(self.grid.nodes())
            .map(|(m, z)| m * f(*z))
            .sum()
    }
}

/// Probability masses on the square grid, row-major: index `i * n + j`
/// pairs own type `theta_i` with competitor type `theta'_j`.
#[derive(Debug, Clone)]
pub struct Density2D {
    grid: Grid1D,
    mass: Vec<f64>,
}

impl Density2D {
    pub fn new(grid: Grid1D, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.n() * grid.n() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} masses, got {}",
                grid.n() * grid.n(),
                mass.len()
            )));
        }
        validate_masses(&mass)?;
        Ok(Self { grid, mass })
    }

    pub fn product(a: &Density1D, b: &Density1D) -> Result<Self> {
        if a.grid() != b.grid() {
            return Err(Error::ShapeMismatch("marginal grids differ".into()));
        }
        let n = a.grid().n();
        let mut mass = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                mass[i * n + j] = a.mass()[i] * b.mass()[j];
            }
        }
        let total = stable_sum(&mass);
        for m in &mut mass {
            *m /= total;
        }
        Self::new(a.grid().clone(), mass)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.grid.n() + j]
    }

    /// Row sums (axis 0) or column sums (axis 1).
    pub fn marginal(&self, axis: usize) -> Density1D {
        let n = self.grid.n();
        let mut mass = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let m = self.mass[i * n + j];
                if axis == 0 {
                    mass[i] += m;
                } else {
                    mass[j] += m;
                }
            }
        }
        let sum = stable_sum(&mass);
        for m in &mut mass {
            *m /= sum;
        }
        Density1D::new(self.grid.clone(), mass).expect("marginal of a valid density")
    }

    pub fn expectation_with(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.mass.len());
        self.mass.iter().zip(values).map(|(m, v)| m * v).sum()
    }

    /// Max deviation from the outer product of the marginals.
    pub fn product_residual(&self) -> f64 {
        let m0 = self.marginal(0);
        let m1 = self.marginal(1);
        let n = self.grid.n();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.mass[i * n + j] - m0.mass()[i] * m1.mass()[j]).abs();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Named marginal CDF families accepted in configs.
#[derive(Debug, Clone)]
pub enum MarginalCdf {
    /// F(z) = z^alpha with alpha > 0.
    Power { alpha: f64 },
    /// Piecewise-linear CDF through monotone knots from (0,0) to (1,1).
    Table { points: Vec<(f64, f64)> },
}

impl MarginalCdf {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::OutOfRange(format!(
                "power family needs alpha > 0, got {alpha}"
            )));
        }
        Ok(Self::Power { alpha })
    }

    pub fn uniform() -> Self {
        Self::Power { alpha: 1.0 }
    }

    pub fn from_table(mut points: Vec<(f64, f64)>) -> Result<Self> {
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if points.first() != Some(&(0.0, 0.0)) {
            points.insert(0, (0.0, 0.0));
        }
        if points.last().map(|p| p.0) != Some(1.0) {
            points.push((1.0, 1.0));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 < w[0].1 {
                return Err(Error::InvalidDensity(format!(
                    "tabulated CDF not monotone near theta={}",
                    w[0].0
                )));
            }
        }
        let last = *points.last().unwrap();
        if (last.1 - 1.0).abs() > 1e-9 || points[0].1.abs() > 1e-9 {
            return Err(Error::InvalidDensity(
                "tabulated CDF endpoints must be 0 and 1".into(),
            ));
        }
        Ok(Self::Table { points })
    }

    /// Load a two-column `theta,F(theta)` CSV table.
    pub fn from_csv(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.map(str::trim)
                    .ok_or_else(|| Error::Config(format!("line {}: missing column", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))
            };
            let theta = parse(cols.next())?;
            let f = parse(cols.next())?;
            if cols.next().map(str::trim).filter(|extra| !extra.is_empty() && !extra.starts_with('#')).is_some() {
                return Err(Error::Config(format!(
                    "line {}: expected two columns",
                    lineno + 1
                )));
            }
            points.push((theta, f));
        }
        Self::from_table(points)
    }

    /// Parse `power(alpha)` or `table:<csv path>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("power(").and_then(|r| r.strip_suffix(')')) {
            let alpha: f64 = rest
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("bad power exponent {rest:?}: {e}")))?;
            return Self::power(alpha);
        }
        if let Some(path) = s.strip_prefix("table:") {
            return Self::from_csv(std::path::Path::new(path.trim()));
        }
        Err(Error::Config(format!(
            "unknown marginal family {s:?}; expected power(alpha) or table:<csv>"
        )))
    }

    pub fn eval(&self, z: f64) -> f64 {
        let z = z.clamp(0.0, 1.0);
        match self {
            Self::Power { alpha } => z.powf(*alpha),
            Self::Table { points } => {
                let idx = points.partition_point(|p| p.0 <= z);
                if idx == 0 {
                    return points[0].1;
                }
                if idx == points.len() {
                    return points.last().unwrap().1;
                }
                let (x0, y0) = points[idx - 1];
                let (x1, y1) = points[idx];
                y0 + (y1 - y0) * (z - x0) / (x1 - x0)
            }
        }
    }

    pub fn density(&self, z: f64) -> f64 {
        match self {
            Self::Power { alpha } => {
                let z = z.clamp(1e-300, 1.0);
                alpha * z.powf(alpha - 1.0)
            }
            Self::Table { points } => {
                let z = z.clamp(0.0, 1.0);
                let idx = points.partition_point(|p| p.0 <= z).clamp(1, points.len() - 1);
                let (x0, y0) = points[idx - 1];
                let (x1, y1) = points[idx];
                (y1 - y0) / (x1 - x0)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Power { alpha } => format!("power({alpha})"),
            Self::Table { .. } => "table".into(),
        }
    }
}

/// Joint reference belief with cached marginals and row conditionals.
#[derive(Debug, Clone)]
pub struct ReferenceBelief {
    joint: Density2D,
    marginals: [Density1D; 2],
    /// Row-normalized conditionals: `cond[i * n + j] = P(theta'_j | theta_i)`.
    cond: Vec<f64>,
}

impl ReferenceBelief {
    pub fn from_joint(joint: Density2D) -> Result<Self> {
        let n = joint.n();
        let marginals = [joint.marginal(0), joint.marginal(1)];
        let mut cond = vec![0.0; n * n];
        for i in 0..n {
            let row_sum: f64 = (0..n).map(|j| joint.at(i, j)).sum();
            if row_sum > 0.0 {
                for j in 0..n {
                    cond[i * n + j] = joint.at(i, j) / row_sum;
                }
            }
        }
        Ok(Self {
            joint,
            marginals,
            cond,
        })
    }

    /// IID product belief from a strictly increasing marginal CDF.
    pub fn iid(cdf: &MarginalCdf, n: usize) -> Result<Self> {
        let grid = Grid1D::new(n)?;
        let marginal = Density1D::from_cdf(grid, &|z| cdf.eval(z))?;
        let joint = Density2D::product(&marginal, &marginal)?;
        Self::from_joint(joint)
    }

    /// Uniform belief on the band `{(theta, theta'): |theta - theta'| <= 1 - zeta}`.
    ///
    /// `zeta = 0` is the IID uniform product; `zeta -> 1` concentrates on the
    /// diagonal and is rejected at 1 (the limit is singular).
    pub fn band(zeta: f64, n: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&zeta) {
            return Err(Error::DegenerateBand(zeta));
        }
        let grid = Grid1D::new(n)?;
        let width = 1.0 - zeta;
        let mut mass = vec![0.0; n * n];
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                if (grid.node(i) - grid.node(j)).abs() <= width + 1e-12 {
                    mass[i * n + j] = 1.0;
                    count += 1;
                }
            }
        }
        if count == 0 {
            return Err(Error::DegenerateBand(zeta));
        }
        for m in &mut mass {
            *m /= count as f64;
        }
        let total = stable_sum(&mass);
        for m in &mut mass {
            *m /= total;
        }
        Self::from_joint(Density2D::new(grid, mass)?)
    }

    pub fn joint(&self) -> &Density2D {
        &self.joint
    }

    pub fn grid(&self) -> &Grid1D {
        self.joint.grid()
    }

    pub fn n(&self) -> usize {
        self.joint.n()
    }

    pub fn marginal(&self, axis: usize) -> &Density1D {
        &self.marginals[axis]
    }

    /// Conditional competitor distribution `P(. | theta_i)`.
    pub fn conditional_row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.cond[i * n..(i + 1) * n]
    }

    /// Joint density value: cell mass times n^2.
    pub fn density_at(&self, i: usize, j: usize) -> f64 {
        let n = self.n() as f64;
        self.joint.at(i, j) * n * n
    }

    pub fn is_iid(&self, tol: f64) -> bool {
        let m = &self.marginals;
        self.joint.product_residual() <= tol
            && m[0]
                .mass()
                .iter()
                .zip(m[1].mass())
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| (self.joint.at(i, j) - self.joint.at(j, i)).abs() <= tol))
    }

    /// Exhaustive affiliation check (log-supermodularity over all grid
    /// quadruples). Quartic in `n`; guard against large grids.
    pub fn affiliation_violation(&self, tol: f64) -> Result<Option<[usize; 4]>> {
        let n = self.n();
        if n > 64 {
            return Err(Error::EnumerationTooLarge(format!(
                "affiliation check is O(n^4); n={n} exceeds 64"
            )));
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs = self.density_at(i, j) * self.density_at(k, l);
                        let rhs =
                            self.density_at(i.max(k), j.max(l)) * self.density_at(i.min(k), j.min(l));
                        if lhs > rhs + tol {
                            return Ok(Some([i, j, k, l]));
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Convex divergence generators, normalized so that `phi(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    /// z log z; relative entropy.
    Kl,
    /// (z - 1)^2.
    ChiSquared,
    /// (sqrt(z) - 1)^2.
    Hellinger,
}

impl Phi {
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "kl" | "entropy" => Ok(Self::Kl),
            "chi2" | "chi-squared" | "chisq" => Ok(Self::ChiSquared),
            "hellinger" => Ok(Self::Hellinger),
            other => Err(Error::Config(format!("unknown phi divergence {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Kl => "kl",
            Self::ChiSquared => "chi2",
            Self::Hellinger => "hellinger",
        }
    }

    pub fn value(&self, z: f64) -> f64 {
        debug_assert!(z >= 0.0);
        match self {
            Self::Kl => {
                if z <= 0.0 {
                    0.0
                } else {
                    z * z.ln()
                }
            }
            Self::ChiSquared => (z - 1.0) * (z - 1.0),
            Self::Hellinger => {
                let d = z.sqrt() - 1.0;
                d * d
            }
        }
    }

    /// Inverse of the derivative, clipped at zero; the pointwise solution of
    /// the dual first-order condition.
    pub(crate) fn inv_derivative(&self, y: f64) -> f64 {
        match self {
            Self::Kl => (y - 1.0).min(700.0).exp(),
            Self::ChiSquared => (1.0 + 0.5 * y).max(0.0),
            Self::Hellinger => {
                if y >= 1.0 {
                    1e12
                } else {
                    let d = 1.0 - y;
                    (1.0 / d) * (1.0 / d)
                }
            }
        }
    }
}

/// phi-divergence between mass vectors on the same grid, with the
/// conventions 0 * phi(0/0) = 0 and q-charge on a p-null cell -> infinity.
pub fn divergence_masses(q: &[f64], p: &[f64], phi: Phi) -> f64 {
    debug_assert_eq!(q.len(), p.len());
    let mut total = 0.0;
    for (&qk, &pk) in q.iter().zip(p) {
        if pk <= 0.0 {
            if qk > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        total += pk * phi.value(qk / pk);
    }
    total
}

pub fn divergence1(q: &Density1D, p: &Density1D, phi: Phi) -> Result<f64> {
    if q.grid() != p.grid() {
        return Err(Error::ShapeMismatch("divergence grids differ".into()));
    }
    Ok(divergence_masses(q.mass(), p.mass(), phi))
}

pub fn divergence2(q: &Density2D, p: &Density2D, phi: Phi) -> Result<f64> {
    if q.grid() != p.grid() {
        return Err(Error::ShapeMismatch("divergence grids differ".into()));
    }
    Ok(divergence_masses(q.mass(), p.mass(), phi))
}

/// Outcome of the monotone-virtual-hazard check `theta * f / (1 - F)`.
#[derive(Debug, Clone, Copy)]
pub struct HazardCheck {
    pub holds: bool,
    /// First grid index where the product decreases, if any.
    pub first_violation: Option<usize>,
}

/// Checks that `theta * f(theta) / (1 - F(theta))` is nondecreasing across
/// grid nodes, excluding the top cell where the survival mass vanishes.
pub fn hazard_condition_check(d: &Density1D) -> HazardCheck {
    let n = d.grid().n();
    let nodes = d.grid().nodes();
    let f_mid = d.cdf_mid();
    let mut prev = f64::NEG_INFINITY;
    for k in 0..n.saturating_sub(1) {
        let density = d.mass()[k] * n as f64;
        let survival = 1.0 - f_mid[k];
        if survival <= 0.0 {
            break;
        }
        let value = nodes[k] * density / survival;
        if value < prev - 1e-9 {
            return HazardCheck {
                holds: false,
                first_violation: Some(k),
            };
        }
        prev = prev.max(value);
    }
    HazardCheck {
        holds: true,
        first_violation: None,
    }
}

/// Piecewise-linear monotone CDF on [0, 1] with the sup-convention inverse
/// `H^{-1}(c) = sup { z : H(z) <= c }`.
#[derive(Debug, Clone)]
pub struct MonotoneCdf {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl MonotoneCdf {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::ShapeMismatch("CDF needs matching knot vectors".into()));
        }
        if xs[0] != 0.0 || (xs[xs.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange("CDF knots must span [0, 1]".into()));
        }
        if ys[0].abs() > 1e-12 || (ys[ys.len() - 1] - 1.0).abs() > 1e-9 {
            return Err(Error::OutOfRange("CDF values must run from 0 to 1".into()));
        }
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::OutOfRange("CDF knots must increase".into()));
            }
        }
        for w in ys.windows(2) {
            if w[1] < w[0] {
                return Err(Error::OutOfRange("CDF values must be nondecreasing".into()));
            }
        }
        Ok(Self { xs, ys })
    }

    /// CDF with knots at cell edges, linear inside cells.
    pub fn from_density(d: &Density1D) -> Self {
        let n = d.grid().n();
        let xs = (0..=n).map(|k| k as f64 / n as f64).collect();
        let ys = d.cdf_edges();
        Self { xs, ys }
    }

    pub fn value(&self, z: f64) -> f64 {
        let z = z.clamp(0.0, 1.0);
        let idx = self.xs.partition_point(|&x| x <= z);
        if idx == 0 {
            return self.ys[0];
        }
        if idx == self.xs.len() {
            return *self.ys.last().unwrap();
        }
        let (x0, y0) = (self.xs[idx - 1], self.ys[idx - 1]);
        let (x1, y1) = (self.xs[idx], self.ys[idx]);
        y0 + (y1 - y0) * (z - x0) / (x1 - x0)
    }

    /// Right-continuous inverse: the sup of the sublevel set `{H <= c}`.
    /// Jumps across flats of `H`.
    pub fn inverse_sup(&self, c: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::OutOfRange(format!(
                "quantile level {c} outside [0, 1]"
            )));
        }
        let m = self.ys.len();
        if c >= self.ys[m - 1] {
            return Ok(self.xs[m - 1]);
        }
        // first knot strictly above c
        let j = self.ys.partition_point(|&y| y <= c);
        debug_assert!(j > 0 && j < m);
        let (x0, y0) = (self.xs[j - 1], self.ys[j - 1]);
        let (x1, y1) = (self.xs[j], self.ys[j]);
        debug_assert!(y1 > c);
        if y0 >= c {
            // sup realized at the left knot (end of a flat at level c)
            Ok(x0)
        } else {
            Ok(x0 + (x1 - x0) * (c - y0) / (y1 - y0))
        }
    }
}
