//! Polyak–Łojasiewicz diagnostics: comparison functions `α`, empirical PL
//! constants per sublevel set, saturating (K_SAT) lower-bound fits, and
//! linear-exponential certificates for flow trajectories.
//!
//! Everything here is sampling based, so verdicts read "consistent with":
//! a finite sample can overestimate an infimum but never certify it.

use thiserror::Error;

use crate::flow::Trajectory;
use crate::grid::{geometric, golden_section, linear};
use crate::scalar::ScalarCt;

/// Samples with a gap below this are left out of every ratio.
pub const MIN_GAP: f64 = 1e-14;

const KSAT_A_RANGE: (f64, f64) = (1e-8, 1e4);
const KSAT_B_RANGE: (f64, f64) = (1e-8, 1e6);
const KSAT_BINS: usize = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PliError {
    #[error("invalid comparison function: {0}")]
    InvalidComparison(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("trajectory too short for certification ({len} samples, need 10)")]
    TooShort { len: usize },
    #[error("trajectory gap increases at sample {index}")]
    NonMonotone { index: usize },
    #[error("trajectory never enters the sublevel set gap <= {level:e}")]
    NoSplit { level: f64 },
}

/// A lower bound `α` in `‖∇f‖ ≥ α(f − f*)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ComparisonFn {
    /// `α(r) = √(μ r)`.
    SqrtMu { mu: f64 },
    /// `α(r) = √(a r / (b + r))`.
    Ksat { a: f64, b: f64 },
    /// Piecewise linear through `(r, α(r))`, constant past the last knot.
    TabulatedPd { grid: Vec<(f64, f64)> },
}

impl ComparisonFn {
    pub fn sqrt_mu(mu: f64) -> Result<Self, PliError> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(PliError::InvalidComparison(format!("mu must be positive, got {mu}")));
        }
        Ok(ComparisonFn::SqrtMu { mu })
    }

    pub fn ksat(a: f64, b: f64) -> Result<Self, PliError> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(PliError::InvalidComparison(format!("need a, b > 0, got a={a}, b={b}")));
        }
        Ok(ComparisonFn::Ksat { a, b })
    }

    /// Knots must start at `(0, 0)`, increase strictly in `r` and have
    /// positive values afterwards.
    pub fn tabulated(grid: Vec<(f64, f64)>) -> Result<Self, PliError> {
        if grid.len() < 2 || grid[0] != (0.0, 0.0) {
            return Err(PliError::InvalidComparison(
                "table must start at (0, 0) and have 2+ knots".into(),
            ));
        }
        for w in grid.windows(2) {
            if !(w[1].0 > w[0].0) || !(w[1].1 > 0.0) || !w[1].1.is_finite() {
                return Err(PliError::InvalidComparison(format!("bad knot {:?}", w[1])));
            }
        }
        Ok(ComparisonFn::TabulatedPd { grid })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match self {
            ComparisonFn::SqrtMu { mu } => (mu * r).sqrt(),
            ComparisonFn::Ksat { a, b } => (a * r / (b + r)).sqrt(),
            ComparisonFn::TabulatedPd { grid } => {
                let i = grid.partition_point(|&(x, _)| x <= r);
                if i >= grid.len() {
                    return grid[grid.len() - 1].1;
                }
                let (x0, y0) = grid[i - 1];
                let (x1, y1) = grid[i];
                y0 + (y1 - y0) * (r - x0) / (x1 - x0)
            }
        }
    }

    /// `α(r) ≤ ‖∇f‖` at every sample.
    pub fn lower_bounds(&self, samples: &[PliSample]) -> bool {
        samples
            .iter()
            .all(|s| self.eval(s.gap) <= s.grad_norm * (1.0 + 1e-12) + 1e-300)
    }
}

/// Gap and gradient norm at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PliSample {
    pub gap: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsatFit {
    pub a: f64,
    pub b: f64,
    /// RMS of log-domain residuals over the binned minima.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithGlobal,
    ConsistentWithKsat,
    ConsistentWithSemiGlobalOnly,
    LocalOnly,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ConsistentWithGlobal => "consistent_with_global",
            Verdict::ConsistentWithKsat => "consistent_with_ksat",
            Verdict::ConsistentWithSemiGlobalOnly => "consistent_with_semi_global_only",
            Verdict::LocalOnly => "local_only",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PliReport {
    pub eps_grid: Vec<f64>,
    /// `None` where the sublevel set holds no usable sample.
    pub mu_hat: Vec<Option<f64>>,
    pub ksat_fit: Option<KsatFit>,
    pub verdict: Verdict,
}

impl PliReport {
    /// CSV `eps,mu_hat` (empty field when absent).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,mu_hat\n");
        for (e, m) in self.eps_grid.iter().zip(&self.mu_hat) {
            match m {
                Some(m) => out.push_str(&format!("{e:.16e},{m:.16e}\n")),
                None => out.push_str(&format!("{e:.16e},\n")),
            }
        }
        out
    }
}

fn check_samples(samples: &[PliSample]) -> Result<(), PliError> {
    if let Some(s) = samples
        .iter()
        .find(|s| !(s.gap >= 0.0) || !(s.grad_norm >= 0.0) || !s.gap.is_finite() || !s.grad_norm.is_finite())
    {
        return Err(PliError::InvalidInput(format!(
            "sample needs finite gap >= 0 and gradNorm >= 0, got {s:?}"
        )));
    }
    Ok(())
}

/// 16 geometric points from `1e-3·max gap` to `max gap`.
pub fn default_eps_grid(samples: &[PliSample]) -> Vec<f64> {
    let top = samples.iter().map(|s| s.gap).fold(0.0, f64::max);
    if top <= MIN_GAP {
        return Vec::new();
    }
    geometric(1e-3 * top, top, 16)
}

/// `μ̂(ε) = min{ gradNorm² / gap : MIN_GAP ≤ gap ≤ ε }`.
pub fn empirical_mu(samples: &[PliSample], eps_grid: &[f64]) -> Result<Vec<Option<f64>>, PliError> {
    check_samples(samples)?;
    if !crate::grid::strictly_increasing(eps_grid) {
        return Err(PliError::InvalidInput("eps grid must be strictly increasing".into()));
    }
    let mut sorted: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.gap >= MIN_GAP)
        .map(|s| (s.gap, s.grad_norm * s.grad_norm / s.gap))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::with_capacity(eps_grid.len());
    let mut idx = 0;
    let mut running: Option<f64> = None;
    for &eps in eps_grid {
        while idx < sorted.len() && sorted[idx].0 <= eps {
            running = Some(running.map_or(sorted[idx].1, |m| m.min(sorted[idx].1)));
            idx += 1;
        }
        out.push(running);
    }
    Ok(out)
}

/// Per-bin minimum of `gradNorm²` against the gap at which it occurs, on
/// log-spaced gap bins.
fn binned_minima(samples: &[PliSample]) -> Vec<(f64, f64)> {
    let usable: Vec<&PliSample> = samples.iter().filter(|s| s.gap >= MIN_GAP).collect();
    if usable.is_empty() {
        return Vec::new();
    }
    let lo = usable.iter().map(|s| s.gap).fold(f64::INFINITY, f64::min).ln();
    let hi = usable.iter().map(|s| s.gap).fold(0.0, f64::max).ln();
    let width = ((hi - lo) / KSAT_BINS as f64).max(f64::MIN_POSITIVE);
    let mut bins: Vec<Option<(f64, f64)>> = vec![None; KSAT_BINS];
    for s in usable {
        let i = (((s.gap.ln() - lo) / width) as usize).min(KSAT_BINS - 1);
        let g2 = s.grad_norm * s.grad_norm;
        if bins[i].is_none_or(|(_, m)| g2 < m) {
            bins[i] = Some((s.gap, g2));
        }
    }
    bins.into_iter().flatten().collect()
}

/// Least-squares fit of `α(r)² = a r/(b + r)` (log residuals) to the binned
/// minima of `gradNorm²`, constrained so that `α` stays below every sample.
/// `None` when fewer than 3 bins are populated or no feasible `a` exists.
pub fn fit_ksat(samples: &[PliSample]) -> Result<Option<KsatFit>, PliError> {
    check_samples(samples)?;
    let bins = binned_minima(samples);
    if bins.len() < 3 || bins.iter().any(|&(_, y)| y <= 0.0) {
        return Ok(None);
    }
    let usable: Vec<&PliSample> = samples.iter().filter(|s| s.gap >= MIN_GAP).collect();
    let eval_b = |b: f64| -> Option<KsatFit> {
        let mean_log_a = bins.iter().map(|&(r, y)| y.ln() - r.ln() + (b + r).ln()).sum::<f64>() / bins.len() as f64;
        let a_cap = usable
            .iter()
            .map(|s| s.grad_norm * s.grad_norm * (b + s.gap) / s.gap)
            .fold(f64::INFINITY, f64::min);
        let a = mean_log_a.exp().min(a_cap).min(KSAT_A_RANGE.1);
        if !(a >= KSAT_A_RANGE.0) {
            return None;
        }
        let ss: f64 = bins
            .iter()
            .map(|&(r, y)| {
                let d = y.ln() - (a * r / (b + r)).ln();
                d * d
            })
            .sum();
        Some(KsatFit {
            a,
            b,
            residual: (ss / bins.len() as f64).sqrt(),
        })
    };
    let better = |x: &KsatFit, y: &KsatFit| {
        if (x.residual - y.residual).abs() > 1e-12 * y.residual.max(1e-300) {
            x.residual < y.residual
        } else {
            x.a < y.a
        }
    };
    let (lb0, lb1) = (KSAT_B_RANGE.0.ln(), KSAT_B_RANGE.1.ln());
    let log_bs = linear(lb0, lb1, 141);
    let mut best: Option<(usize, KsatFit)> = None;
    for (i, &lb) in log_bs.iter().enumerate() {
        if let Some(fit) = eval_b(lb.exp()) {
            if best.as_ref().is_none_or(|(_, b)| better(&fit, b)) {
                best = Some((i, fit));
            }
        }
    }
    let Some((i, mut fit)) = best else { return Ok(None) };
    let lo = log_bs[i.saturating_sub(1)];
    let hi = log_bs[(i + 1).min(log_bs.len() - 1)];
    let (lb, _) = golden_section(lo, hi, 1e-12, |lb| {
        eval_b(lb.exp()).map_or(f64::INFINITY, |f| f.residual)
    });
    if let Some(refined) = eval_b(lb.exp()) {
        if better(&refined, &fit) {
            fit = refined;
        }
    }
    Ok(Some(fit))
}

/// μ̂ curve, K_SAT fit and verdict on the default ε grid.
pub fn diagnose(samples: &[PliSample]) -> Result<PliReport, PliError> {
    diagnose_on(samples, &default_eps_grid(samples))
}

pub fn diagnose_on(samples: &[PliSample], eps_grid: &[f64]) -> Result<PliReport, PliError> {
    let mu_hat = empirical_mu(samples, eps_grid)?;
    let ksat_fit = fit_ksat(samples)?;
    let verdict = classify(samples, &mu_hat, ksat_fit.as_ref());
    Ok(PliReport {
        eps_grid: eps_grid.to_vec(),
        mu_hat,
        ksat_fit,
        verdict,
    })
}

fn classify(samples: &[PliSample], mu_hat: &[Option<f64>], fit: Option<&KsatFit>) -> Verdict {
    let present: Vec<f64> = mu_hat.iter().flatten().copied().collect();
    let (Some(&first), Some(&last)) = (present.first(), present.last()) else {
        return Verdict::Inconclusive;
    };
    if present.iter().any(|&m| m <= 1e-8 * first) {
        return Verdict::LocalOnly;
    }
    if last >= 0.5 * first {
        return Verdict::ConsistentWithGlobal;
    }
    if fit.is_some() && tail_floor_ratio(samples) >= 0.5 {
        return Verdict::ConsistentWithKsat;
    }
    if present.iter().all(|&m| m > 0.0) {
        return Verdict::ConsistentWithSemiGlobalOnly;
    }
    Verdict::Inconclusive
}

/// Smallest gradient norm over the upper half of the gap range, relative to
/// the largest binned-minimum gradient norm. Bounded away from zero when
/// `liminf α > 0`.
pub fn tail_floor_ratio(samples: &[PliSample]) -> f64 {
    let top = samples.iter().map(|s| s.gap).fold(0.0, f64::max);
    let floor = samples
        .iter()
        .filter(|s| s.gap >= 0.5 * top)
        .map(|s| s.grad_norm)
        .fold(f64::INFINITY, f64::min);
    let peak = binned_minima(samples)
        .iter()
        .map(|&(_, y)| y.sqrt())
        .fold(0.0, f64::max);
    if peak > 0.0 {
        floor / peak
    } else {
        0.0
    }
}

/// Two-branch bound for a trajectory: linear decrease with slope `m` before
/// `t_split`, exponential decay with rate `mu` after, both anchored at
/// `gap(t_split)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlesCertificate {
    pub t_split: f64,
    pub gap_split: f64,
    /// Smallest slope making the linear branch an upper bound.
    pub slope: f64,
    /// Largest rate making the exponential branch an upper bound.
    pub rate: f64,
    /// Least-squares slope of gap against t before the split.
    pub lsq_slope: f64,
    /// Least-squares slope of −ln gap against t after the split.
    pub lsq_rate: f64,
    /// Largest `gradNorm²` seen before the split.
    pub sup_grad_sq: f64,
    /// Largest excess of the gap over the bound.
    pub max_violation: f64,
    pub valid: bool,
}

fn lsq_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Certificate with the split at the first entry into `gap ≤ 0.1·gap(0)`.
pub fn certify_gles(traj: &Trajectory) -> Result<GlesCertificate, PliError> {
    certify_gles_at(traj, 0.1)
}

pub fn certify_gles_at(traj: &Trajectory, split_fraction: f64) -> Result<GlesCertificate, PliError> {
    let s = &traj.samples;
    if s.len() < 10 {
        return Err(PliError::TooShort { len: s.len() });
    }
    if !(split_fraction > 0.0 && split_fraction < 1.0) {
        return Err(PliError::InvalidInput(format!(
            "split fraction must lie in (0, 1), got {split_fraction}"
        )));
    }
    let gap0 = s[0].gap;
    if !(gap0 > 0.0) {
        return Err(PliError::InvalidInput(format!(
            "initial gap must be positive, got {gap0}"
        )));
    }
    if let Some(i) = s.windows(2).position(|w| w[1].gap > w[0].gap + 1e-10) {
        return Err(PliError::NonMonotone { index: i + 1 });
    }
    let level = split_fraction * gap0;
    let split = s
        .iter()
        .position(|x| x.gap <= level)
        .ok_or(PliError::NoSplit { level })?;
    let (ts, gs) = (s[split].t, s[split].gap);

    let slope = s[..split].iter().map(|x| (x.gap - gs) / (ts - x.t)).fold(0.0, f64::max);
    let rate = s[split + 1..]
        .iter()
        .filter(|x| x.gap >= MIN_GAP && x.t > ts)
        .map(|x| -(x.gap / gs).ln() / (x.t - ts))
        .fold(f64::INFINITY, f64::min);
    let pre: Vec<(f64, f64)> = s[..=split].iter().map(|x| (x.t, x.gap)).collect();
    let post: Vec<(f64, f64)> = s[split..]
        .iter()
        .filter(|x| x.gap >= MIN_GAP)
        .map(|x| (x.t, x.gap.ln()))
        .collect();
    let sup_grad_sq = s[..=split]
        .iter()
        .map(|x| x.grad_norm * x.grad_norm)
        .fold(0.0, f64::max);

    let bound = |t: f64, m: f64, mu: f64| {
        if t <= ts {
            gs + m * (ts - t)
        } else {
            gs * (-mu * (t - ts)).exp()
        }
    };
    let rate_used = if rate.is_finite() { rate } else { 0.0 };
    let max_violation = s
        .iter()
        .map(|x| x.gap - bound(x.t, slope, rate_used))
        .fold(f64::NEG_INFINITY, f64::max);
    let valid = slope > 0.0 && rate_used > 0.0 && max_violation <= 1e-6 * gap0;
    Ok(GlesCertificate {
        t_split: ts,
        gap_split: gs,
        slope,
        rate: rate_used,
        lsq_slope: -lsq_slope(&pre),
        lsq_rate: -lsq_slope(&post),
        sup_grad_sq,
        max_violation,
        valid,
    })
}

/// A scalar test cost with a known class.
pub struct ZooCost {
    pub name: &'static str,
    pub expected: Verdict,
    pub f: fn(f64) -> f64,
    pub grad: fn(f64) -> f64,
    pub f_star: f64,
    pub points: Vec<f64>,
}

impl ZooCost {
    pub fn samples(&self) -> Vec<PliSample> {
        self.points
            .iter()
            .map(|&x| PliSample {
                gap: ((self.f)(x) - self.f_star).max(0.0),
                grad_norm: (self.grad)(x).abs(),
            })
            .collect()
    }
}

/// Inverse of `x(s) = s√(1+s²) + asinh(s)` for `x ≥ 0`, by Newton from
/// the right (`x(s)` is convex with `x(s) ≥ 2s`).
fn ksat_s(x: f64) -> f64 {
    let x = x.abs();
    let mut s = 0.5 * x;
    for _ in 0..100 {
        let q = (1.0 + s * s).sqrt();
        let fx = s * q + s.asinh() - x;
        let step = fx / (2.0 * q);
        s -= step;
        if step.abs() <= 1e-16 * s.max(1e-300) {
            break;
        }
    }
    s
}

/// Cost with `f′(x)² = f/(1 + f)`, so `α(r) = √(r/(1+r))` holds with equality.
pub fn ksat_cost(x: f64) -> f64 {
    let s = ksat_s(x);
    s * s
}

pub fn ksat_cost_grad(x: f64) -> f64 {
    let f = ksat_cost(x);
    x.signum() * (f / (1.0 + f)).sqrt()
}

fn quartic(x: f64) -> f64 {
    x.powi(4) / 4.0 - 5.0 * x.powi(3) / 3.0 + 3.0 * x * x
}

fn quartic_grad(x: f64) -> f64 {
    x * (x - 2.0) * (x - 3.0)
}

/// One synthetic cost per class: global, K_SAT, semi-global only, local only.
pub fn zoo_examples() -> Vec<ZooCost> {
    let ksat_points = {
        let pos = geometric(1e-6, 1004.0, 600);
        let mut pts: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
        pts.push(0.0);
        pts.extend(pos);
        pts
    };
    vec![
        ZooCost {
            name: "quadratic",
            expected: Verdict::ConsistentWithGlobal,
            f: |x| 0.5 * x * x,
            grad: |x| x,
            f_star: 0.0,
            points: linear(-10.0, 10.0, 401),
        },
        ZooCost {
            name: "ksat",
            expected: Verdict::ConsistentWithKsat,
            f: ksat_cost,
            grad: ksat_cost_grad,
            f_star: 0.0,
            points: ksat_points,
        },
        ZooCost {
            name: "sgpli",
            expected: Verdict::ConsistentWithSemiGlobalOnly,
            f: |x| (1.0 + x * x).ln(),
            grad: |x| 2.0 * x / (1.0 + x * x),
            f_star: 0.0,
            points: linear(-20.0, 20.0, 801),
        },
        ZooCost {
            name: "lpli",
            expected: Verdict::LocalOnly,
            f: quartic,
            grad: quartic_grad,
            f_star: 0.0,
            // step 2⁻¹⁰ puts the spurious local minimum x = 3 on the grid
            points: (0..=5 * 1024).map(|i| -1.0 + i as f64 / 1024.0).collect(),
        },
    ]
}

/// `(gap, |∂J|)` for scalar LQR on `k ∈ (k*, k_max]`, log-spaced in `k − k*`.
pub fn scalar_lqr_samples(sys: &ScalarCt, k_max: f64, n: usize) -> Vec<PliSample> {
    let ks = sys.kstar();
    geometric(1e-6, k_max - ks, n)
        .into_iter()
        .map(|d| {
            let k = ks + d;
            PliSample {
                gap: sys.gap(k).expect("k above k* is stabilizing"),
                grad_norm: sys.grad(k).expect("k above k* is stabilizing").abs(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{Sample, Terminal};

    fn traj_from(gaps: &[(f64, f64)]) -> Trajectory {
        Trajectory {
            samples: gaps
                .iter()
                .map(|&(t, g)| Sample {
                    t,
                    param: vec![0.0],
                    gap: g,
                    grad_norm: 0.0,
                })
                .collect(),
            terminal: Terminal::MaxTime,
            param_shape: (1, 1),
        }
    }

    #[test]
    fn comparison_functions() {
        let k = ComparisonFn::ksat(1.0, 1.0).unwrap();
        assert_eq!(k.eval(0.0), 0.0);
        assert!((k.eval(1.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(k.eval(1e12) < 1.0);
        assert!(ComparisonFn::ksat(0.0, 1.0).is_err());
        assert!(ComparisonFn::sqrt_mu(-1.0).is_err());
        let t = ComparisonFn::tabulated(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 1.0)]).unwrap();
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(2.0), 1.5);
        assert_eq!(t.eval(10.0), 1.0);
        assert!(ComparisonFn::tabulated(vec![(0.0, 0.0), (1.0, 0.0)]).is_err());
    }

    #[test]
    fn quadratic_mu_is_exact() {
        let mu = 3.0;
        let samples: Vec<PliSample> = linear(-10.0, 10.0, 201)
            .into_iter()
            .map(|x| PliSample {
                gap: mu * x * x / 2.0,
                grad_norm: (mu * x).abs(),
            })
            .collect();
        let rep = diagnose(&samples).unwrap();
        for m in rep.mu_hat.iter().flatten() {
            assert!((m - 2.0 * mu).abs() < 1e-12);
        }
        assert_eq!(rep.verdict, Verdict::ConsistentWithGlobal);
    }

    #[test]
    fn saturating_cost_mu_decreases() {
        let samples: Vec<PliSample> = linear(0.0, 30.0, 3001)
            .into_iter()
            .map(|x| {
                let e = (-x).exp();
                PliSample {
                    gap: (1.0 - e).powi(2) / 2.0,
                    grad_norm: ((1.0 - e) * e).abs(),
                }
            })
            .collect();
        let grid = linear(0.05, 0.49, 12);
        let mu = empirical_mu(&samples, &grid).unwrap();
        let mu: Vec<f64> = mu.into_iter().map(Option::unwrap).collect();
        assert!(mu.windows(2).all(|w| w[1] <= w[0]));
        assert!(mu[mu.len() - 1] < 0.05 * mu[0]);
    }

    #[test]
    fn exact_ksat_data_recovers_parameters() {
        let samples: Vec<PliSample> = geometric(1e-4, 1e4, 400)
            .into_iter()
            .map(|r| PliSample {
                gap: r,
                grad_norm: (r / (1.0 + r)).sqrt(),
            })
            .collect();
        let fit = fit_ksat(&samples).unwrap().unwrap();
        assert!((fit.a - 1.0).abs() < 1e-3 && (fit.b - 1.0).abs() < 1e-3, "{fit:?}");
        assert!(fit.residual < 1e-6);
        assert!(ComparisonFn::ksat(fit.a, fit.b).unwrap().lower_bounds(&samples));
    }

    #[test]
    fn ksat_inverse_is_consistent() {
        for x in [1e-5, 0.3, 2.0, 50.0, 1004.0] {
            let s = ksat_s(x);
            assert!((s * (1.0 + s * s).sqrt() + s.asinh() - x).abs() < 1e-12 * x.max(1.0));
        }
        let h = 1e-6;
        let x = 1.7;
        let fd = (ksat_cost(x + h) - ksat_cost(x - h)) / (2.0 * h);
        assert!((fd - ksat_cost_grad(x)).abs() < 1e-8);
    }

    #[test]
    fn zoo_verdicts() {
        for cost in zoo_examples() {
            let rep = diagnose(&cost.samples()).unwrap();
            assert_eq!(rep.verdict, cost.expected, "{}", cost.name);
        }
    }

    #[test]
    fn exponential_certificate() {
        let pts: Vec<(f64, f64)> = linear(0.0, 40.0, 401)
            .into_iter()
            .map(|t| (t, 8.0 * (-0.3 * t).exp()))
            .collect();
        let c = certify_gles(&traj_from(&pts)).unwrap();
        assert!(c.valid);
        assert!((c.rate - 0.3).abs() < 1e-6 && (c.lsq_rate - 0.3).abs() < 1e-6);
    }

    #[test]
    fn certificate_errors() {
        let short = traj_from(&[(0.0, 1.0), (1.0, 0.5)]);
        assert!(matches!(certify_gles(&short), Err(PliError::TooShort { len: 2 })));
        let pts: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 1.0 + i as f64)).collect();
        assert!(matches!(
            certify_gles(&traj_from(&pts)),
            Err(PliError::NonMonotone { index: 1 })
        ));
    }
}
