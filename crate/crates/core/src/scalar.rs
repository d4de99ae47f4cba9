//! Closed forms for scalar LQR (`b = 1`) and its Euler discretization.
//!
//! For `k > a` the continuous-time cost is `p(k) = (r k² + q) / (2(k − a))`
//! with `ℓ(k) = 1 / (2(k − a))` and derivative `2(r k − p) ℓ`.

use thiserror::Error;

use crate::grid::golden_section;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("b = {b} is not supported: scalar studies normalize b to 1 (rescale k by b and r by 1/b² instead)")]
    Normalization { b: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("k = {k} is outside the stabilizing interval ({lower}, {upper})")]
    NotStabilizing { k: f64, lower: f64, upper: f64 },
}

/// `ẋ = a x + u`, cost weights `q`, `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarCt {
    a: f64,
    q: f64,
    r: f64,
}

/// Everything closed-form at one gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtClosedForms {
    pub p: f64,
    pub ell: f64,
    pub grad: f64,
    /// `−(2rk(a−k) + (rk² + q)) / (2(a−k)²)`, the displayed fraction form.
    pub grad_fraction: f64,
    pub kstar: f64,
    pub pstar: f64,
}

/// One row of the rate profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub k: f64,
    pub grad_sq: f64,
    /// `grad² / gap`; `None` at the optimum.
    pub m: Option<f64>,
}

/// Two sides of an identity evaluated at `k* + ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
        }
    }

    /// `lhs / rhs`, the constant factor separating the two sides.
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Closed-form values against the near-optimum expansion
/// `gap = ℓrε² =: δ`, `∂J = ℓ(rε − δ)`, `m = rℓ(ℓ²ε² − 2ℓε + 1)`,
/// with `ℓ = ℓ(k* + ε)` unless noted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropositionCheck {
    pub eps: f64,
    pub ell: f64,
    pub ell_star: f64,
    pub gap: IdentityCheck,
    /// Gap identity with `ℓ = ℓ(k*)` instead.
    pub gap_at_ell_star: IdentityCheck,
    pub grad: IdentityCheck,
    /// `None` when `ε = 0` (rate undefined).
    pub m: Option<IdentityCheck>,
}

impl ScalarCt {
    pub fn new(a: f64, b: f64, q: f64, r: f64) -> Result<Self, ScalarError> {
        if b != 1.0 {
            return Err(ScalarError::Normalization { b });
        }
        if !a.is_finite() || !(q > 0.0 && q.is_finite()) || !(r > 0.0 && r.is_finite()) {
            return Err(ScalarError::InvalidParameter(format!(
                "need finite a and q, r > 0 (got a={a}, q={q}, r={r})"
            )));
        }
        Ok(Self { a, q, r })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn kstar(&self) -> f64 {
        self.a + (self.a * self.a + self.q / self.r).sqrt()
    }

    pub fn pstar(&self) -> f64 {
        self.r * self.kstar()
    }

    fn check(&self, k: f64) -> Result<(), ScalarError> {
        if k > self.a && k.is_finite() {
            Ok(())
        } else {
            Err(ScalarError::NotStabilizing {
                k,
                lower: self.a,
                upper: f64::INFINITY,
            })
        }
    }

    pub fn closed_forms(&self, k: f64) -> Result<CtClosedForms, ScalarError> {
        self.check(k)?;
        let (a, q, r) = (self.a, self.q, self.r);
        let d = k - a;
        let p = (r * k * k + q) / (2.0 * d);
        let ell = 1.0 / (2.0 * d);
        Ok(CtClosedForms {
            p,
            ell,
            grad: 2.0 * (r * k - p) * ell,
            grad_fraction: -(2.0 * r * k * (a - k) + (r * k * k + q)) / (2.0 * (a - k) * (a - k)),
            kstar: self.kstar(),
            pstar: self.pstar(),
        })
    }

    /// `J(k) − J(k*) = r(k − k*)² / (2(k − a))`, free of cancellation.
    pub fn gap(&self, k: f64) -> Result<f64, ScalarError> {
        self.check(k)?;
        let e = k - self.kstar();
        Ok(self.r * e * e / (2.0 * (k - self.a)))
    }

    /// `∂J(k)`.
    pub fn grad(&self, k: f64) -> Result<f64, ScalarError> {
        Ok(self.closed_forms(k)?.grad)
    }

    /// `m(k) = ∂J(k)² / gap(k)`; `None` at the optimum.
    pub fn rate(&self, k: f64) -> Result<Option<f64>, ScalarError> {
        let gap = self.gap(k)?;
        let g = self.grad(k)?;
        Ok((gap > 0.0).then(|| g * g / gap))
    }

    pub fn rate_profile(&self, k_grid: &[f64]) -> Result<Vec<RateRow>, ScalarError> {
        k_grid
            .iter()
            .map(|&k| {
                let g = self.grad(k)?;
                Ok(RateRow {
                    k,
                    grad_sq: g * g,
                    m: self.rate(k)?,
                })
            })
            .collect()
    }

    pub fn proposition_check(&self, eps: f64) -> Result<PropositionCheck, ScalarError> {
        let ks = self.kstar();
        let k = ks + eps;
        let r = self.r;
        let ell = self.closed_forms(k)?.ell;
        let ell_star = self.closed_forms(ks)?.ell;
        let gap = self.gap(k)?;
        let delta = ell * r * eps * eps;
        let m_claim = r * ell * (ell * ell * eps * eps - 2.0 * ell * eps + 1.0);
        Ok(PropositionCheck {
            eps,
            ell,
            ell_star,
            gap: IdentityCheck::new(gap, delta),
            gap_at_ell_star: IdentityCheck::new(gap, ell_star * r * eps * eps),
            grad: IdentityCheck::new(self.grad(k)?, ell * (r * eps - delta)),
            m: self.rate(k)?.map(|m| IdentityCheck::new(m, m_claim)),
        })
    }
}

/// Euler discretization with step `h`: `x⁺ = (1 + ha)x + hu`, weights
/// `hq`, `hr`. Stable for `a < k < (2 + ha)/h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarDt {
    ct: ScalarCt,
    h: f64,
    kd_star: f64,
    pd_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtClosedForms {
    pub p_d: f64,
    pub grad_d: f64,
    /// `None` at the optimum.
    pub m_d: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtSweepRow {
    pub h: f64,
    pub kd_min: f64,
    pub md_min: f64,
    /// The grid scan found more than one local minimum.
    pub multimodal: bool,
}

impl ScalarDt {
    pub fn new(ct: ScalarCt, h: f64) -> Result<Self, ScalarError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(ScalarError::InvalidParameter(format!("h must be positive, got {h}")));
        }
        let mut dt = Self {
            ct,
            h,
            kd_star: f64::NAN,
            pd_star: f64::NAN,
        };
        let (lo, hi) = dt.inner_bracket(1e-9);
        let (kd, pd) = golden_section(lo, hi, 1e-12, |k| dt.p_d_unchecked(k));
        dt.kd_star = kd;
        dt.pd_star = pd;
        Ok(dt)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn ct(&self) -> &ScalarCt {
        &self.ct
    }

    /// Open stability interval `(a, (2 + ha)/h)`.
    pub fn interval(&self) -> (f64, f64) {
        let a = self.ct.a;
        (a, (2.0 + self.h * a) / self.h)
    }

    /// Interval shrunk by `frac · width` at both ends.
    pub fn inner_bracket(&self, frac: f64) -> (f64, f64) {
        let (lo, hi) = self.interval();
        let off = frac * (hi - lo);
        (lo + off, hi - off)
    }

    pub fn kd_star(&self) -> f64 {
        self.kd_star
    }

    pub fn pd_star(&self) -> f64 {
        self.pd_star
    }

    // With d = k − a the denominator 1 − (1 + h(a−k))² equals h·d(2 − hd);
    // the factor h cancels against the weights.
    fn p_d_unchecked(&self, k: f64) -> f64 {
        let d = k - self.ct.a;
        (self.ct.r * k * k + self.ct.q) / (d * (2.0 - self.h * d))
    }

    fn check(&self, k: f64) -> Result<(), ScalarError> {
        let (lower, upper) = self.interval();
        if k > lower && k < upper {
            Ok(())
        } else {
            Err(ScalarError::NotStabilizing { k, lower, upper })
        }
    }

    pub fn closed_forms(&self, k: f64) -> Result<DtClosedForms, ScalarError> {
        self.check(k)?;
        let (r, q, h) = (self.ct.r, self.ct.q, self.h);
        let d = k - self.ct.a;
        let num = r * k * k + q;
        let den = d * (2.0 - h * d);
        let dnum = 2.0 * r * k;
        let dden = 2.0 - 2.0 * h * d;
        let p_d = num / den;
        let grad_d = (dnum * den - num * dden) / (den * den);
        let gap = p_d - self.pd_star;
        Ok(DtClosedForms {
            p_d,
            grad_d,
            m_d: (gap > 0.0).then(|| grad_d * grad_d / gap),
        })
    }

    /// `m_d` at `frac · width` inside either end of the interval.
    pub fn endpoint_rates(&self, frac: f64) -> Result<(f64, f64), ScalarError> {
        let (lo, hi) = self.inner_bracket(frac);
        let m = |k| -> Result<f64, ScalarError> { Ok(self.closed_forms(k)?.m_d.unwrap_or(f64::INFINITY)) };
        Ok((m(lo)?, m(hi)?))
    }

    /// Minimizer of `m_d` over the stability interval: 200-point scan, then
    /// golden-section refinement around the best grid point.
    pub fn min_rate(&self) -> Result<DtSweepRow, ScalarError> {
        const SCAN: usize = 200;
        let (lo, hi) = self.interval();
        let w = hi - lo;
        let ks: Vec<f64> = (1..=SCAN).map(|i| lo + w * i as f64 / (SCAN + 1) as f64).collect();
        let ms: Vec<f64> = ks
            .iter()
            .map(|&k| self.closed_forms(k).map(|c| c.m_d.unwrap_or(f64::INFINITY)))
            .collect::<Result<_, _>>()?;
        let best = (0..SCAN).min_by(|&i, &j| ms[i].total_cmp(&ms[j])).unwrap();
        let local_minima = (0..SCAN)
            .filter(|&i| {
                let left = if i == 0 { f64::INFINITY } else { ms[i - 1] };
                let right = if i + 1 == SCAN { f64::INFINITY } else { ms[i + 1] };
                ms[i] < left && ms[i] <= right
            })
            .count();
        let a = if best == 0 { lo + 1e-9 * w } else { ks[best - 1] };
        let b = if best + 1 == SCAN { hi - 1e-9 * w } else { ks[best + 1] };
        let objective = |k: f64| self.closed_forms(k).ok().and_then(|c| c.m_d).unwrap_or(f64::INFINITY);
        let (k_ref, m_ref) = golden_section(a, b, 1e-12, objective);
        let (kd_min, md_min) = if m_ref <= ms[best] {
            (k_ref, m_ref)
        } else {
            (ks[best], ms[best])
        };
        Ok(DtSweepRow {
            h: self.h,
            kd_min,
            md_min,
            multimodal: local_minima > 1,
        })
    }
}

/// `(h, k̲_d(h), m̲_d(h))` for every `h` in the grid.
pub fn dt_rate_sweep(ct: &ScalarCt, hs: &[f64]) -> Result<Vec<DtSweepRow>, ScalarError> {
    hs.iter().map(|&h| ScalarDt::new(*ct, h)?.min_rate()).collect()
}

/// Step sizes of the standard sweep.
pub const DEFAULT_HS: [f64; 7] = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01];

#[cfg(test)]
mod tests {
    use super::*;

    fn sys() -> ScalarCt {
        ScalarCt::new(1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn closed_forms_at_two() {
        let c = sys().closed_forms(2.0).unwrap();
        assert_eq!((c.p, c.ell, c.grad), (2.5, 0.5, -0.5));
        assert!((c.grad - c.grad_fraction).abs() < 1e-15);
        assert!((c.kstar - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!((sys().grad(1e6).unwrap() - 0.5).abs() < 1e-5);
    }

    #[test]
    fn rejects_b_and_unstable() {
        assert!(matches!(
            ScalarCt::new(1.0, 2.0, 1.0, 1.0),
            Err(ScalarError::Normalization { .. })
        ));
        assert!(matches!(
            sys().closed_forms(1.0),
            Err(ScalarError::NotStabilizing { .. })
        ));
    }

    #[test]
    fn rate_limits() {
        let s = sys();
        assert!(s.rate(s.kstar()).unwrap().is_none());
        assert!(s.rate(1.0 + 1e-6).unwrap().unwrap() > 1e6);
        assert!(s.rate(1e6).unwrap().unwrap() < 1e-6);
    }

    #[test]
    fn proposition_gap_identity_is_exact() {
        let pc = sys().proposition_check(1e-2).unwrap();
        assert!(pc.gap.residual < 1e-16);
        assert!(pc.gap_at_ell_star.residual > 0.0);
        // the gradient side differs by a constant factor 2
        assert!((pc.grad.ratio() - 2.0).abs() < 1e-12);
        let m = pc.m.unwrap();
        assert!((m.ratio() - 4.0).abs() < 1e-10);
        assert!(sys().proposition_check(0.0).unwrap().m.is_none());
    }

    #[test]
    fn euler_consistency() {
        let s = sys();
        let dt = ScalarDt::new(s, 1e-6).unwrap();
        for k in [1.5, 2.0, 5.0] {
            let rel =
                (dt.closed_forms(k).unwrap().p_d - s.closed_forms(k).unwrap().p).abs() / s.closed_forms(k).unwrap().p;
            assert!(rel < 1e-4);
        }
    }

    #[test]
    fn dt_quotient_rule_matches_difference() {
        let dt = ScalarDt::new(sys(), 0.5).unwrap();
        let k = 2.7;
        let h = 1e-6;
        let fd = (dt.closed_forms(k + h).unwrap().p_d - dt.closed_forms(k - h).unwrap().p_d) / (2.0 * h);
        assert!((fd - dt.closed_forms(k).unwrap().grad_d).abs() < 1e-7);
    }

    #[test]
    fn dt_unit_step() {
        let dt = ScalarDt::new(sys(), 1.0).unwrap();
        assert_eq!(dt.interval(), (1.0, 3.0));
        let row = dt.min_rate().unwrap();
        assert!(row.md_min > 0.0 && row.md_min.is_finite());
        let (l, r) = dt.endpoint_rates(1e-6).unwrap();
        assert!(l > 10.0 * row.md_min && r > 10.0 * row.md_min);
    }
}
