//! Ensemble accumulation and the microcanonical-to-canonical pipeline.
//!
//! A [`QCurve`] holds, for every attempt count `i`, the fraction of runs that
//! already contain a wrapping cluster after `i` attempts. Since the number of
//! sites attempted by time `t` is `Binomial(N, t)` and independent of the
//! dynamics, the canonical wrapping probability is the binomial mixture
//!
//! ```text
//! psi(t) = sum_i C(N, i) t^i (1 - t)^(N - i) Q_i
//! ```
//!
//! Finite-size scaling then works on two scalars per lattice size: the mean
//! first-wrap time and the peak of `psi'`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{Mode, ModelParams, RunRecord};
use crate::error::{Error, Result};

/// Microcanonical wrapping probabilities for one `(L, r, mode)`.
///
/// Internally a histogram of first-wrap indices, so merging is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QCurve {
    pub side: usize,
    pub r: u32,
    pub mode: Mode,
    pub seed: u64,
    /// Index of the first run covered by this curve.
    pub run_start: u64,
    runs: u64,
    // first_wrap histogram over 0..=N (index 0 is never hit by a run).
    hits: Vec<u64>,
}

impl QCurve {
    /// Empty curve for the job described by `params`, covering runs from
    /// `run_start` on.
    pub fn empty(params: &ModelParams, run_start: u64) -> Self {
        let n = params.side * params.side;
        QCurve {
            side: params.side,
            r: params.r,
            mode: params.mode,
            seed: params.seed,
            run_start,
            runs: 0,
            hits: vec![0; n + 1],
        }
    }

    /// Builds a curve from run records, rejecting records of other jobs.
    pub fn accumulate<'a>(
        params: &ModelParams,
        run_start: u64,
        records: impl IntoIterator<Item = &'a RunRecord>,
    ) -> Result<Self> {
        let mut q = QCurve::empty(params, run_start);
        for rec in records {
            q.push(rec)?;
        }
        Ok(q)
    }

    /// Rebuilds a curve from cumulative percolating counts `c_i`, `i = 0..=N`.
    pub fn from_cumulative(params: &ModelParams, run_start: u64, runs: u64, cumulative: &[u64]) -> Result<Self> {
        let n = params.side * params.side;
        if cumulative.len() != n + 1 {
            return Err(Error::invalid(format!(
                "expected {} cumulative counts, got {}",
                n + 1,
                cumulative.len()
            )));
        }
        if cumulative[0] != 0 {
            return Err(Error::invalid("Q_0 must be 0"));
        }
        let mut hits = vec![0; n + 1];
        for i in 1..=n {
            if cumulative[i] < cumulative[i - 1] {
                return Err(Error::invalid(format!("Q decreases at i = {i}")));
            }
            hits[i] = cumulative[i] - cumulative[i - 1];
        }
        if cumulative[n] > runs {
            return Err(Error::invalid("more percolating runs than runs"));
        }
        let mut q = QCurve::empty(params, run_start);
        q.runs = runs;
        q.hits = hits;
        Ok(q)
    }

    pub fn params(&self) -> ModelParams {
        ModelParams { r: self.r, mode: self.mode, side: self.side, seed: self.seed }
    }

    pub fn sites(&self) -> usize {
        self.side * self.side
    }

    pub fn runs(&self) -> u64 {
        self.runs
    }

    /// Runs that wrapped at some attempt.
    pub fn percolating_runs(&self) -> u64 {
        self.hits.iter().sum()
    }

    pub fn push(&mut self, rec: &RunRecord) -> Result<()> {
        let p = &rec.params;
        if p.side != self.side || p.r != self.r || p.mode != self.mode || p.seed != self.seed {
            return Err(Error::invalid(format!(
                "record for (L={}, r={}, mode={}, seed={}) in curve for (L={}, r={}, mode={}, seed={})",
                p.side, p.r, p.mode, p.seed, self.side, self.r, self.mode, self.seed
            )));
        }
        if let Some(i) = rec.first_wrap {
            self.hits[i] += 1;
        }
        self.runs += 1;
        Ok(())
    }

    /// Combines curves over adjacent run-index ranges of the same job.
    pub fn merge(&self, other: &QCurve) -> Result<QCurve> {
        if (self.side, self.r, self.mode, self.seed) != (other.side, other.r, other.mode, other.seed) {
            return Err(Error::invalid("cannot merge Q-curves of different jobs"));
        }
        if self.runs == 0 {
            return Ok(other.clone());
        }
        if other.runs == 0 {
            return Ok(self.clone());
        }
        let (lo, hi) = if self.run_start <= other.run_start { (self, other) } else { (other, self) };
        if lo.run_start + lo.runs != hi.run_start {
            return Err(Error::invalid(format!(
                "run ranges [{}, {}) and [{}, {}) are not adjacent",
                lo.run_start,
                lo.run_start + lo.runs,
                hi.run_start,
                hi.run_start + hi.runs
            )));
        }
        let mut out = lo.clone();
        out.runs += hi.runs;
        for (a, b) in out.hits.iter_mut().zip(&hi.hits) {
            *a += b;
        }
        Ok(out)
    }

    /// Cumulative percolating counts `c_i` for `i = 0..=N`.
    pub fn cumulative(&self) -> Vec<u64> {
        self.hits
            .iter()
            .scan(0u64, |acc, &h| {
                *acc += h;
                Some(*acc)
            })
            .collect()
    }

    /// `Q_i` for `i = 0..=N`.
    pub fn values(&self) -> Vec<f64> {
        let runs = self.runs as f64;
        self.cumulative().into_iter().map(|c| c as f64 / runs).collect()
    }

    /// `Q_N`, the fraction of runs that wrap by the end of the run.
    pub fn final_value(&self) -> f64 {
        self.percolating_runs() as f64 / self.runs as f64
    }
}

/// Exact running sums of final-state observables; mean and spread derive
/// from integers, so merge order never changes a reported digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StatsAccumulator {
    pub sites: u64,
    pub runs: u64,
    pub open_sum: u128,
    pub open_sq: u128,
    pub largest_sum: u128,
    pub largest_sq: u128,
    pub distinct_sum: u128,
    pub distinct_sq: u128,
    pub wrapped_runs: u64,
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    fn from_sums(n: u64, sum: u128, sq: u128, scale: f64) -> Self {
        if n == 0 {
            return MeanStd { mean: f64::NAN, std: f64::NAN };
        }
        let nf = n as f64;
        let mean = sum as f64 / nf;
        let std = if n > 1 {
            // n * sq - sum^2 is exact in integers.
            let num = (n as u128) * sq - sum * sum;
            (num as f64 / (nf * (nf - 1.0))).sqrt()
        } else {
            0.0
        };
        MeanStd { mean: mean * scale, std: std * scale }
    }
}

impl StatsAccumulator {
    pub fn new(sites: usize) -> Self {
        StatsAccumulator { sites: sites as u64, ..Default::default() }
    }

    pub fn push(&mut self, rec: &RunRecord) {
        let st = &rec.final_stats;
        debug_assert_eq!(st.sites as u64, self.sites);
        let (o, m, d) = (st.open_sites as u128, st.largest_volume as u128, st.distinct_volumes as u128);
        self.runs += 1;
        self.open_sum += o;
        self.open_sq += o * o;
        self.largest_sum += m;
        self.largest_sq += m * m;
        self.distinct_sum += d;
        self.distinct_sq += d * d;
        self.wrapped_runs += rec.first_wrap.is_some() as u64;
    }

    pub fn merge(&self, other: &StatsAccumulator) -> Result<StatsAccumulator> {
        if self.runs > 0 && other.runs > 0 && self.sites != other.sites {
            return Err(Error::invalid("cannot merge statistics of different lattice sizes"));
        }
        Ok(StatsAccumulator {
            sites: self.sites.max(other.sites),
            runs: self.runs + other.runs,
            open_sum: self.open_sum + other.open_sum,
            open_sq: self.open_sq + other.open_sq,
            largest_sum: self.largest_sum + other.largest_sum,
            largest_sq: self.largest_sq + other.largest_sq,
            distinct_sum: self.distinct_sum + other.distinct_sum,
            distinct_sq: self.distinct_sq + other.distinct_sq,
            wrapped_runs: self.wrapped_runs + other.wrapped_runs,
        })
    }

    /// Open-site density at the end of the run.
    pub fn rho(&self) -> MeanStd {
        MeanStd::from_sums(self.runs, self.open_sum, self.open_sq, 1.0 / self.sites as f64)
    }

    /// Largest cluster as a fraction of all sites.
    pub fn largest_fraction(&self) -> MeanStd {
        MeanStd::from_sums(self.runs, self.largest_sum, self.largest_sq, 1.0 / self.sites as f64)
    }

    pub fn distinct_volumes(&self) -> MeanStd {
        MeanStd::from_sums(self.runs, self.distinct_sum, self.distinct_sq, 1.0)
    }

    pub fn wrap_fraction(&self) -> f64 {
        self.wrapped_runs as f64 / self.runs as f64
    }
}

/// `Binomial(n, t)` probabilities over `start..start + weights.len()`;
/// everything outside is below `1e-20` of the mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialWeights {
    pub start: usize,
    pub weights: Vec<f64>,
}

const WEIGHT_CUTOFF: f64 = 1e-20;

/// Binomial probabilities by a multiplicative recurrence outward from the
/// mode, renormalised to sum to one. Never forms a factorial, so it is safe
/// for `n` in the millions.
pub fn binomial_weights(n: usize, t: f64) -> BinomialWeights {
    assert!((0.0..=1.0).contains(&t), "t = {t} outside [0, 1]");
    if t == 0.0 {
        return BinomialWeights { start: 0, weights: vec![1.0] };
    }
    if t == 1.0 {
        return BinomialWeights { start: n, weights: vec![1.0] };
    }
    let mode = (((n + 1) as f64 * t).floor() as usize).min(n);
    let odds = t / (1.0 - t);
    let mut below = Vec::new();
    let mut w = 1.0;
    let mut i = mode;
    while i > 0 {
        w *= i as f64 / (n - i + 1) as f64 / odds;
        if w < WEIGHT_CUTOFF {
            break;
        }
        below.push(w);
        i -= 1;
    }
    let start = mode - below.len();
    let mut weights: Vec<f64> = below.into_iter().rev().collect();
    weights.push(1.0);
    let mut w = 1.0;
    for i in mode..n {
        w *= (n - i) as f64 / (i + 1) as f64 * odds;
        if w < WEIGHT_CUTOFF {
            break;
        }
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    BinomialWeights { start, weights }
}

impl BinomialWeights {
    pub fn dot(&self, values: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(&values[self.start..])
            .map(|(w, v)| w * v)
            .sum()
    }
}

/// Canonical evaluation of a Q-curve: `psi` and its exact derivative.
#[derive(Debug, Clone)]
pub struct Canonical {
    n: usize,
    q: Vec<f64>,
    dq: Vec<f64>,
}

impl Canonical {
    pub fn new(curve: &QCurve) -> Self {
        Self::from_values(curve.values())
    }

    /// From raw `Q_0..=Q_N`.
    pub fn from_values(q: Vec<f64>) -> Self {
        assert!(q.len() >= 2, "need Q_0..=Q_N with N >= 1");
        let dq = q.windows(2).map(|w| w[1] - w[0]).collect();
        Canonical { n: q.len() - 1, q, dq }
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn psi(&self, t: f64) -> f64 {
        binomial_weights(self.n, t).dot(&self.q)
    }

    /// `psi'(t) = N sum_i C(N-1, i) t^i (1-t)^(N-1-i) (Q_{i+1} - Q_i)`.
    pub fn psi_prime(&self, t: f64) -> f64 {
        self.n as f64 * binomial_weights(self.n - 1, t).dot(&self.dq)
    }

    pub fn is_constant(&self) -> bool {
        self.dq.iter().all(|&d| d == 0.0)
    }

    /// Maximum of `psi'` over `[0, 1]`: a uniform grid of `grid` points
    /// followed by golden-section refinement around the best grid point.
    pub fn max_slope(&self, grid: usize) -> SlopePeak {
        if self.is_constant() {
            return SlopePeak { t: 0.0, value: 0.0 };
        }
        let ts = uniform_grid(grid.max(3));
        let (k, best) = ts
            .iter()
            .map(|&t| self.psi_prime(t))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
        let lo = ts[k.saturating_sub(1)];
        let hi = ts[(k + 1).min(ts.len() - 1)];
        let (t, v) = golden_max(|t| self.psi_prime(t), lo, hi);
        if v >= best {
            SlopePeak { t, value: v }
        } else {
            SlopePeak { t: ts[k], value: best }
        }
    }
}

/// Location and height of the largest `psi'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopePeak {
    pub t: f64,
    pub value: f64,
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a < 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `points` evenly spaced values covering `[0, 1]` inclusive.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2, "grid needs at least two points");
    let m = (points - 1) as f64;
    (0..points).map(|k| k as f64 / m).collect()
}

/// Default number of grid points for canonical curves.
pub const DEFAULT_GRID: usize = 2001;

/// `psi` on a grid together with the scalars the scaling fits consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalCurve {
    pub side: usize,
    pub r: u32,
    pub t_grid: Vec<f64>,
    pub psi: Vec<f64>,
    pub t_bar: Option<MeanTime>,
    pub max_slope: SlopePeak,
}

/// Evaluates `psi` on `t_grid` and derives `t_bar` and the slope peak.
pub fn convolve(curve: &QCurve, t_grid: &[f64]) -> CanonicalCurve {
    let canon = Canonical::new(curve);
    for &t in t_grid {
        assert!((0.0..=1.0).contains(&t), "grid point {t} outside [0, 1]");
    }
    let psi = t_grid.iter().map(|&t| canon.psi(t)).collect();
    CanonicalCurve {
        side: curve.side,
        r: curve.r,
        t_grid: t_grid.to_vec(),
        psi,
        t_bar: mean_percolation_time(curve).ok(),
        max_slope: canon.max_slope(t_grid.len().max(DEFAULT_GRID)),
    }
}

/// Mean first-wrap time, conditioned on wrapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanTime {
    pub t_bar: f64,
    /// `Q_N`: the share of runs the conditioning keeps.
    pub percolating_mass: f64,
}

/// Uses `E[U_(i)] = i / (N + 1)` for the `i`-th of `N` uniform order
/// statistics, so no grid is involved.
pub fn mean_percolation_time(curve: &QCurve) -> Result<MeanTime> {
    let wrapped = curve.percolating_runs();
    if wrapped == 0 {
        return Err(Error::Undefined(format!(
            "mean first-wrap time undefined: no run wrapped (L={}, r={})",
            curve.side, curve.r
        )));
    }
    let np1 = (curve.sites() + 1) as f64;
    let weighted: u128 = curve.hits.iter().enumerate().map(|(i, &h)| i as u128 * h as u128).sum();
    Ok(MeanTime {
        t_bar: weighted as f64 / wrapped as f64 / np1,
        percolating_mass: curve.final_value(),
    })
}

/// Peak of `psi'` on the default grid.
pub fn max_slope(curve: &QCurve) -> SlopePeak {
    Canonical::new(curve).max_slope(DEFAULT_GRID)
}

/// Least-squares line with residual-based spreads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// `sqrt(SSE / (n - 2))`.
    pub residual_std: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("line fit needs at least 3 points, got {n}")));
    }
    let nf = n as f64;
    let xm = xs.iter().sum::<f64>() / nf;
    let ym = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("degenerate design: all abscissae equal"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let residual_std = (sse / (nf - 2.0)).sqrt();
    let slope_se = residual_std / sxx.sqrt();
    let intercept_se = residual_std * (1.0 / nf + xm * xm / sxx).sqrt();
    Ok(LineFit { slope, intercept, residual_std, slope_se, intercept_se })
}

/// Residual-bootstrap settings for the scaling fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub resamples: usize,
    pub seed: u64,
}

/// Result of a finite-size-scaling regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FssFit {
    /// `t_c` or `nu`.
    pub estimate: f64,
    /// Residual standard deviation, propagated to the estimate for `nu`.
    pub uncertainty: f64,
    pub line: LineFit,
    pub points: Vec<(usize, f64)>,
    pub fixed_nu: Option<f64>,
    pub bootstrap_uncertainty: Option<f64>,
}

fn check_sizes(points: &[(usize, f64)]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs at least 3 lattice sizes, got {}",
            points.len()
        )));
    }
    let first = points[0].0;
    if points.iter().all(|p| p.0 == first) {
        return Err(Error::invalid("degenerate design: all lattice sizes equal"));
    }
    let mut sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs at least 3 distinct lattice sizes, got {}",
            sizes.len()
        )));
    }
    Ok(())
}

/// `t_c` as the intercept of `t_bar(L)` against `L^(-1/nu)`.
pub fn fit_tc(points: &[(usize, f64)], nu: f64) -> Result<FssFit> {
    fit_tc_with(points, nu, None)
}

pub fn fit_tc_with(points: &[(usize, f64)], nu: f64, bootstrap: Option<Bootstrap>) -> Result<FssFit> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::invalid(format!("nu must be positive, got {nu}")));
    }
    check_sizes(points)?;
    let xs: Vec<f64> = points.iter().map(|&(l, _)| (l as f64).powf(-1.0 / nu)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let line = least_squares(&xs, &ys)?;
    let bootstrap_uncertainty = bootstrap.map(|b| residual_bootstrap(&xs, &ys, &line, b, |l| Some(l.intercept)));
    Ok(FssFit {
        estimate: line.intercept,
        uncertainty: line.residual_std,
        line,
        points: points.to_vec(),
        fixed_nu: Some(nu),
        bootstrap_uncertainty,
    })
}

/// `nu` as the inverse slope of `ln max psi'` against `ln L`.
pub fn fit_nu(points: &[(usize, f64)]) -> Result<FssFit> {
    fit_nu_with(points, None)
}

pub fn fit_nu_with(points: &[(usize, f64)], bootstrap: Option<Bootstrap>) -> Result<FssFit> {
    check_sizes(points)?;
    if let Some(&(l, s)) = points.iter().find(|p| p.1.is_nan() || p.1 <= 0.0) {
        return Err(Error::invalid(format!("non-positive slope {s} at L = {l}")));
    }
    let xs: Vec<f64> = points.iter().map(|&(l, _)| (l as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let line = least_squares(&xs, &ys)?;
    if line.slope.is_nan() || line.slope <= 0.0 {
        return Err(Error::invalid(format!("log-log slope {} is not positive", line.slope)));
    }
    let bootstrap_uncertainty =
        bootstrap.map(|b| residual_bootstrap(&xs, &ys, &line, b, |l| (l.slope > 0.0).then(|| 1.0 / l.slope)));
    Ok(FssFit {
        estimate: 1.0 / line.slope,
        uncertainty: line.slope_se / (line.slope * line.slope),
        line,
        points: points.to_vec(),
        fixed_nu: None,
        bootstrap_uncertainty,
    })
}

fn residual_bootstrap(
    xs: &[f64],
    ys: &[f64],
    line: &LineFit,
    cfg: Bootstrap,
    estimate: impl Fn(&LineFit) -> Option<f64>,
) -> f64 {
    use rand::Rng;

    let fitted: Vec<f64> = xs.iter().map(|x| line.intercept + line.slope * x).collect();
    let resid: Vec<f64> = ys.iter().zip(&fitted).map(|(y, f)| y - f).collect();
    let mut rng = crate::dynamics::run_rng(cfg.seed, 0);
    let mut draws = Vec::with_capacity(cfg.resamples);
    let mut ystar = vec![0.0; ys.len()];
    for _ in 0..cfg.resamples {
        for (y, f) in ystar.iter_mut().zip(&fitted) {
            *y = f + resid[rng.random_range(0..resid.len())];
        }
        if let Some(e) = least_squares(xs, &ystar).ok().as_ref().and_then(&estimate) {
            draws.push(e);
        }
    }
    let n = draws.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let mean = draws.iter().sum::<f64>() / n;
    (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FinalStats;

    fn record(params: ModelParams, first_wrap: Option<usize>) -> RunRecord {
        RunRecord {
            params,
            first_wrap,
            wrap_by_direction: [first_wrap, None],
            opens: 0,
            final_stats: FinalStats::from_volumes(params.side * params.side, []),
        }
    }

    #[test]
    fn single_indicator_curve() {
        let p = ModelParams::new(3, 0);
        let q = QCurve::accumulate(&p, 0, &[record(p, Some(5))]).unwrap();
        assert_eq!(q.values(), vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn half_percolating() {
        let p = ModelParams::new(3, 0);
        let q = QCurve::accumulate(&p, 0, &[record(p, Some(5)), record(p, None)]).unwrap();
        assert_eq!(q.final_value(), 0.5);
        assert_eq!(q.values()[9], 0.5);
    }

    #[test]
    fn mixed_parameters_rejected() {
        let p = ModelParams::new(3, 0);
        let other = ModelParams::new(3, 1);
        assert!(QCurve::accumulate(&p, 0, &[record(p, Some(5)), record(other, Some(4))]).is_err());
        let bigger = ModelParams::new(4, 0);
        assert!(QCurve::accumulate(&p, 0, &[record(bigger, Some(4))]).is_err());
    }

    #[test]
    fn merge_requires_adjacent_ranges() {
        let p = ModelParams::new(3, 1);
        let a = QCurve::accumulate(&p, 0, &[record(p, Some(4)), record(p, None)]).unwrap();
        let b = QCurve::accumulate(&p, 2, &[record(p, Some(6))]).unwrap();
        let c = QCurve::accumulate(&p, 5, &[record(p, Some(6))]).unwrap();
        let ab = a.merge(&b).unwrap();
        assert_eq!(ab, b.merge(&a).unwrap());
        assert_eq!(ab.runs(), 3);
        assert_eq!(ab.run_start, 0);
        assert!(a.merge(&c).is_err());
    }

    #[test]
    fn from_cumulative_validates() {
        let p = ModelParams::new(2, 0);
        assert!(QCurve::from_cumulative(&p, 0, 4, &[0, 0, 1, 3, 4]).is_ok());
        assert!(QCurve::from_cumulative(&p, 0, 4, &[0, 0, 2, 1, 4]).is_err());
        assert!(QCurve::from_cumulative(&p, 0, 4, &[1, 1, 2, 3, 4]).is_err());
        assert!(QCurve::from_cumulative(&p, 0, 3, &[0, 0, 2, 3, 4]).is_err());
        assert!(QCurve::from_cumulative(&p, 0, 4, &[0, 0, 2, 3]).is_err());
    }

    #[test]
    fn endpoints_of_psi() {
        let c = Canonical::from_values(vec![0.0, 0.1, 0.4, 0.7]);
        assert_eq!(c.psi(0.0), 0.0);
        assert_eq!(c.psi(1.0), 0.7);
    }

    #[test]
    fn weights_at_extremes_and_interior() {
        assert_eq!(binomial_weights(10, 0.0), BinomialWeights { start: 0, weights: vec![1.0] });
        assert_eq!(binomial_weights(10, 1.0), BinomialWeights { start: 10, weights: vec![1.0] });
        let w = binomial_weights(4, 0.5);
        assert_eq!(w.start, 0);
        let expect = [1.0, 4.0, 6.0, 4.0, 1.0].map(|c| c / 16.0);
        for (a, b) in w.weights.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn huge_n_does_not_overflow() {
        let w = binomial_weights(4_000_000, 0.6);
        let total: f64 = w.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(w.weights.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn mean_time_point_mass() {
        let p = ModelParams::new(4, 0);
        let q = QCurve::accumulate(&p, 0, &[record(p, Some(7)), record(p, Some(7))]).unwrap();
        let m = mean_percolation_time(&q).unwrap();
        assert_eq!(m.t_bar, 7.0 / 17.0);
        assert_eq!(m.percolating_mass, 1.0);
    }

    #[test]
    fn mean_time_conditions_on_wrapping() {
        let p = ModelParams::new(4, 0);
        let q = QCurve::accumulate(&p, 0, &[record(p, Some(4)), record(p, None)]).unwrap();
        let m = mean_percolation_time(&q).unwrap();
        assert_eq!(m.t_bar, 4.0 / 17.0);
        assert_eq!(m.percolating_mass, 0.5);
    }

    #[test]
    fn mean_time_undefined_without_wrap() {
        let p = ModelParams::new(4, 7);
        let q = QCurve::accumulate(&p, 0, &[record(p, None)]).unwrap();
        assert!(matches!(mean_percolation_time(&q), Err(Error::Undefined(_))));
    }

    #[test]
    fn constant_curve_has_zero_slope() {
        let c = Canonical::from_values(vec![0.0; 10]);
        assert_eq!(c.max_slope(101).value, 0.0);
    }

    #[test]
    fn linear_q_has_unit_slope() {
        let n = 40;
        let c = Canonical::from_values((0..=n).map(|i| i as f64 / n as f64).collect());
        let peak = c.max_slope(DEFAULT_GRID);
        assert!((peak.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tc_exact_recovery() {
        let pts: Vec<(usize, f64)> = [64, 128, 256, 512]
            .iter()
            .map(|&l| (l, 0.6333 + 0.5 * (l as f64).powf(-0.75)))
            .collect();
        let fit = fit_tc(&pts, 4.0 / 3.0).unwrap();
        assert!((fit.estimate - 0.6333).abs() < 1e-12);
        assert!(fit.uncertainty < 1e-12);
    }

    #[test]
    fn nu_exact_recovery() {
        let pts: Vec<(usize, f64)> = [32, 64, 128, 256].iter().map(|&l| (l, 2.5 * (l as f64).powf(0.75))).collect();
        let fit = fit_nu(&pts).unwrap();
        assert!((fit.estimate - 4.0 / 3.0).abs() < 1e-12);
        assert!(fit.uncertainty < 1e-10);
    }

    #[test]
    fn fit_errors() {
        let two = [(32, 0.6), (64, 0.61)];
        assert!(matches!(fit_tc(&two, 4.0 / 3.0), Err(Error::InsufficientData(_))));
        let same = [(64, 0.6), (64, 0.61), (64, 0.62)];
        assert!(matches!(fit_tc(&same, 4.0 / 3.0), Err(Error::Invalid(_))));
        let ok = [(32, 0.6), (64, 0.61), (128, 0.62)];
        assert!(fit_tc(&ok, 0.0).is_err());
        assert!(fit_nu(&[(32, 1.0), (64, 0.0), (128, 2.0)]).is_err());
        assert!(fit_nu(&[(32, 3.0), (64, 2.0), (128, 1.0)]).is_err());
    }

    #[test]
    fn bootstrap_is_reproducible_and_off_by_default() {
        let pts = [(32, 0.601), (64, 0.597), (128, 0.5955), (256, 0.5941)];
        assert_eq!(fit_tc(&pts, 4.0 / 3.0).unwrap().bootstrap_uncertainty, None);
        let b = Bootstrap { resamples: 500, seed: 9 };
        let a1 = fit_tc_with(&pts, 4.0 / 3.0, Some(b)).unwrap().bootstrap_uncertainty.unwrap();
        let a2 = fit_tc_with(&pts, 4.0 / 3.0, Some(b)).unwrap().bootstrap_uncertainty.unwrap();
        assert_eq!(a1, a2);
        assert!(a1 > 0.0);
    }

    #[test]
    fn stats_accumulator_moments() {
        let p = ModelParams::new(4, 1);
        let mut acc = StatsAccumulator::new(16);
        for vols in [vec![3, 3, 2], vec![10], vec![4, 4, 1, 2]] {
            let mut rec = record(p, None);
            rec.final_stats = FinalStats::from_volumes(16, vols);
            acc.push(&rec);
        }
        let rho = acc.rho();
        assert!((rho.mean - (8.0 + 10.0 + 11.0) / 48.0).abs() < 1e-15);
        let d = acc.distinct_volumes();
        assert_eq!(d.mean, 2.0);
        assert!((d.std - 1.0).abs() < 1e-15);
    }
}
