//! High-gain curves built with Ackermann's pole-placement formula, and the
//! limit study showing the LQR cost has no global PL inequality.
//!
//! Single-input gains are `k = e_nᵀ 𝒞⁻¹ Φ(A)` where `𝒞` is the
//! controllability matrix and `Φ` the target characteristic polynomial.
//! Multi-input systems are first reduced to `(A − BF, Bv)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{
    characteristic_polynomial, controllability_matrix, is_controllable, is_diagonalizable, rank, spectral_abscissa, Mat,
};
use crate::lqr::{Gain, LqrError, LqrProblem};

/// Placements whose controllability matrix is worse conditioned than this
/// are flagged.
pub const ILL_CONDITIONED: f64 = 1e12;

const REDUCTION_DRAWS: usize = 1000;

/// Target closed-loop pole layout for a given `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolePattern {
    /// `(s + ρ)ⁿ`.
    Repeated,
    /// `(s + ρ)(s + σ)ⁿ⁻¹`: one pole moves out, the others stay at `−slow`.
    SingleFast { slow: f64 },
}

impl PolePattern {
    pub fn roots(&self, n: usize, rho: f64) -> Vec<f64> {
        match *self {
            PolePattern::Repeated => vec![-rho; n],
            PolePattern::SingleFast { slow } => {
                let mut r = vec![-slow; n];
                if n > 0 {
                    r[0] = -rho;
                }
                r
            }
        }
    }

    /// Monic coefficients `[1, c₁, …, cₙ]` of `∏(s − rootᵢ)`.
    pub fn coefficients(&self, n: usize, rho: f64) -> Vec<f64> {
        let mut c = vec![1.0];
        for root in self.roots(n, rho) {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] += ci;
                next[i + 1] -= root * ci;
            }
            c = next;
        }
        c
    }
}

/// Result of a single-input pole placement.
#[derive(Debug, Clone)]
pub struct Placement {
    /// 1×n gain with `A − b·k` having the requested characteristic polynomial.
    pub k: Mat,
    /// 2-norm condition number of the controllability matrix.
    pub condition: f64,
    /// The formula's sign had to be flipped to verify.
    pub negated: bool,
}

impl Placement {
    pub fn ill_conditioned(&self) -> bool {
        self.condition > ILL_CONDITIONED
    }
}

/// Ackermann placement of `A − b·k` at the monic polynomial `target`.
pub fn place_poles(a: &Mat, b: &Mat, target: &[f64]) -> Result<Placement, LqrError> {
    let n = a.rows();
    if b.shape() != (n, 1) || target.len() != n + 1 {
        return Err(LqrError::InvalidProblem(format!(
            "placement needs b of shape ({n}, 1) and {} coefficients",
            n + 1
        )));
    }
    let ctrb = controllability_matrix(a, b)?;
    let r = rank(&ctrb, 1e-10);
    if r < n {
        return Err(LqrError::Uncontrollable { rank: r, n });
    }
    // Φ(A) by Horner.
    let mut phi = Mat::identity(n);
    for &c in &target[1..] {
        phi = &(&phi * a) + &Mat::identity(n).scale(c);
    }
    let mut en = Mat::zeros(n, 1);
    en[(n - 1, 0)] = 1.0;
    let row = ctrb.transpose().solve(&en)?.transpose();
    let k = &row * &phi;
    let condition = ctrb.condition_number();

    let scale = target
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.abs().powf(1.0 / i as f64))
        .fold(a.frobenius_norm().max(1.0), f64::max);
    let verifies = |k: &Mat| -> Result<bool, LqrError> {
        let got = characteristic_polynomial(&(a - &(b * k)))?;
        Ok(got
            .iter()
            .zip(target)
            .enumerate()
            .all(|(i, (g, t))| (g - t).abs() <= 1e-6 * t.abs().max(scale.powi(i as i32))))
    };
    if verifies(&k)? {
        return Ok(Placement {
            k,
            condition,
            negated: false,
        });
    }
    let flipped = -&k;
    if verifies(&flipped)? {
        return Ok(Placement {
            k: flipped,
            condition,
            negated: true,
        });
    }
    Err(LqrError::Construction(format!(
        "placement failed verification (controllability condition {condition:e})"
    )))
}

/// Gain placing every pole of `A − b·k` at `−ρ`.
pub fn ackermann_gain(a: &Mat, b: &Mat, rho: f64) -> Result<Placement, LqrError> {
    if !(rho > 0.0) {
        return Err(LqrError::InvalidProblem(format!("rho must be positive, got {rho}")));
    }
    place_poles(a, b, &PolePattern::Repeated.coefficients(a.rows(), rho))
}

/// Pre-feedback `F` (m×n) and input direction `v` (m×1) such that
/// `(A − BF, Bv)` is controllable.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub f: Mat,
    pub v: Mat,
    /// Random draws used (0 for single-input systems).
    pub draws: usize,
}

impl Reduction {
    pub fn reduced(&self, a: &Mat, b: &Mat) -> (Mat, Mat) {
        (a - &(b * &self.f), b * &self.v)
    }

    /// `F + v·k` for a single-input gain `k` of the reduced system.
    pub fn lift(&self, k: &Mat) -> Mat {
        &self.f + &(&self.v * k)
    }
}

/// Randomized search for a single-input reduction of `(A, B)`.
pub fn multi_input_reduce(a: &Mat, b: &Mat, seed: u64) -> Result<Reduction, LqrError> {
    let (n, m) = (a.rows(), b.cols());
    if m == 1 {
        return Ok(Reduction {
            f: Mat::zeros(1, n),
            v: Mat::scalar(1.0),
            draws: 0,
        });
    }
    if !is_controllable(a, b)? {
        let r = rank(&controllability_matrix(a, b)?, 1e-10);
        return Err(LqrError::Uncontrollable { rank: r, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 1..=REDUCTION_DRAWS {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let f = Mat::from_fn(m, n, |_, _| rng.random_range(-1.0..=1.0));
        let red = Reduction {
            f,
            v: Mat::column(&v),
            draws: draw,
        };
        let (ar, br) = red.reduced(a, b);
        if is_controllable(&ar, &br)? {
            return Ok(red);
        }
    }
    Err(LqrError::Construction(format!(
        "no controllable single-input reduction in {REDUCTION_DRAWS} draws (seed {seed})"
    )))
}

/// A stabilizing gain with all poles at `−ρ₀`, `ρ₀ = 1 + max(0, abscissa(A))`.
pub fn stabilize(prob: &LqrProblem) -> Result<Gain, LqrError> {
    let red = multi_input_reduce(prob.a(), prob.b(), 0)?;
    let rho0 = 1.0 + spectral_abscissa(prob.a())?.abscissa.max(0.0);
    let (ar, br) = red.reduced(prob.a(), prob.b());
    let placed = ackermann_gain(&ar, &br, rho0)?;
    let gain = prob.gain(red.lift(&placed.k))?;
    if !gain.is_stabilizing() {
        return Err(LqrError::NotStabilizing {
            abscissa: -gain.margin(),
        });
    }
    Ok(gain)
}

/// Whether the curve is evaluated at `K̃(ρ)` or at `K* + K̃(ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveOffset {
    Direct,
    Optimal,
}

/// `ρ ↦ F + v·k(ρ)` (optionally shifted by `K*`).
#[derive(Debug, Clone)]
pub struct HighGainCurve {
    problem: LqrProblem,
    reduction: Reduction,
    pattern: PolePattern,
    offset: CurveOffset,
    kstar: Option<Mat>,
}

impl HighGainCurve {
    pub fn new(problem: LqrProblem, pattern: PolePattern, offset: CurveOffset, seed: u64) -> Result<Self, LqrError> {
        if let PolePattern::SingleFast { slow } = pattern {
            if !(slow > 0.0) {
                return Err(LqrError::InvalidProblem(format!(
                    "slow pole must be positive, got {slow}"
                )));
            }
        }
        let reduction = multi_input_reduce(problem.a(), problem.b(), seed)?;
        let kstar = match offset {
            CurveOffset::Direct => None,
            CurveOffset::Optimal => Some(problem.optimal_gain()?.0.into_mat()),
        };
        Ok(Self {
            problem,
            reduction,
            pattern,
            offset,
            kstar,
        })
    }

    pub fn problem(&self) -> &LqrProblem {
        &self.problem
    }

    pub fn reduction(&self) -> &Reduction {
        &self.reduction
    }

    pub fn pattern(&self) -> PolePattern {
        self.pattern
    }

    pub fn offset(&self) -> CurveOffset {
        self.offset
    }

    /// `K̃(ρ)` before any offset, with placement diagnostics.
    pub fn placement(&self, rho: f64) -> Result<Placement, LqrError> {
        let (ar, br) = self.reduction.reduced(self.problem.a(), self.problem.b());
        let target = self.pattern.coefficients(self.problem.n(), rho);
        let mut placed = place_poles(&ar, &br, &target)?;
        placed.k = self.reduction.lift(&placed.k);
        Ok(placed)
    }

    pub fn eval(&self, rho: f64) -> Result<Gain, LqrError> {
        if !(rho > 0.0) {
            return Err(LqrError::InvalidProblem(format!("rho must be positive, got {rho}")));
        }
        let mut k = self.placement(rho)?.k;
        if let Some(ks) = &self.kstar {
            k = &k + ks;
        }
        let gain = self.problem.gain(k)?;
        if !gain.is_stabilizing() {
            return Err(LqrError::CurveNotStabilizing {
                rho,
                abscissa: -gain.margin(),
            });
        }
        Ok(gain)
    }

    /// Whether `B·K̃(ρ)` is diagonalizable (a hypothesis of the bounded
    /// gradient result); reported only.
    pub fn bk_diagonalizable(&self, rho: f64) -> Result<bool, LqrError> {
        let k = self.placement(rho)?.k;
        Ok(is_diagonalizable(&(self.problem.b() * &k), 1e-10)?)
    }
}

/// One row of the limit study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub rho: f64,
    pub gap: f64,
    pub grad_fro: f64,
    /// `‖∇J‖_F / √gap`.
    pub ratio: f64,
}

/// Default grid: 12 points geometric from 10 to 10⁴.
pub fn default_rho_grid() -> Vec<f64> {
    crate::grid::geometric(10.0, 1e4, 12)
}

/// Gap, gradient norm and their ratio along the curve.
pub fn curve_limit_study(curve: &HighGainCurve, rho_grid: &[f64], cost_star: f64) -> Result<Vec<LimitRow>, LqrError> {
    if !crate::grid::strictly_increasing(rho_grid) {
        return Err(LqrError::InvalidProblem("rho grid must be strictly increasing".into()));
    }
    rho_grid
        .iter()
        .map(|&rho| {
            let gain = curve.eval(rho)?;
            let ev = curve.problem().evaluate(&gain, cost_star)?;
            Ok(LimitRow {
                rho,
                gap: ev.gap,
                grad_fro: ev.grad_norm,
                ratio: ev.grad_norm / ev.gap.max(0.0).sqrt(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_integrator() -> (Mat, Mat) {
        (Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]), Mat::column(&[0.0, 1.0]))
    }

    #[test]
    fn double_integrator_gain() {
        let (a, b) = double_integrator();
        let p = ackermann_gain(&a, &b, 3.0).unwrap();
        assert!((&p.k - &Mat::from_rows(&[&[9.0, 6.0]])).frobenius_norm() < 1e-12);
        let s = spectral_abscissa(&(&a - &(&b * &p.k))).unwrap();
        for e in &s.eigenvalues {
            assert!((e.re + 3.0).abs() < 1e-6 * 4.0 && e.im.abs() < 1e-6 * 4.0);
        }
    }

    #[test]
    fn scalar_and_oscillator() {
        let p = ackermann_gain(&Mat::scalar(0.7), &Mat::scalar(1.0), 2.0).unwrap();
        assert!((p.k[(0, 0)] - 2.7).abs() < 1e-14);
        let a = Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let p = ackermann_gain(&a, &Mat::column(&[0.0, 1.0]), 1.0).unwrap();
        assert!((&p.k - &Mat::from_rows(&[&[0.0, 2.0]])).frobenius_norm() < 1e-12);
    }

    #[test]
    fn uncontrollable_rejected() {
        let r = ackermann_gain(&Mat::identity(2), &Mat::column(&[1.0, 0.0]), 1.0);
        assert!(matches!(r, Err(LqrError::Uncontrollable { .. })));
    }

    #[test]
    fn pattern_coefficients() {
        assert_eq!(PolePattern::Repeated.coefficients(2, 3.0), vec![1.0, 6.0, 9.0]);
        assert_eq!(
            PolePattern::SingleFast { slow: 1.0 }.coefficients(2, 3.0),
            vec![1.0, 4.0, 3.0]
        );
    }

    #[test]
    fn reduction_for_zero_drift() {
        let (a, b) = (Mat::zeros(2, 2), Mat::identity(2));
        let red = multi_input_reduce(&a, &b, 7).unwrap();
        let (ar, br) = red.reduced(&a, &b);
        assert!(is_controllable(&ar, &br).unwrap());
        assert_eq!(red, multi_input_reduce(&a, &b, 7).unwrap());
    }

    #[test]
    fn stabilize_examples() {
        let p = LqrProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
        let g = stabilize(&p).unwrap();
        assert!((g.k()[(0, 0)] - 3.0).abs() < 1e-12 && (g.margin() - 2.0).abs() < 1e-12);
        let (a, b) = double_integrator();
        let p = LqrProblem::new(a, b, Mat::identity(2), Mat::scalar(1.0)).unwrap();
        let g = stabilize(&p).unwrap();
        assert!((g.k() - &Mat::from_rows(&[&[1.0, 2.0]])).frobenius_norm() < 1e-12);
    }

    #[test]
    fn scalar_limit_study() {
        let p = LqrProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
        let (_, jstar) = p.optimal_gain().unwrap();
        let curve = HighGainCurve::new(p, PolePattern::Repeated, CurveOffset::Direct, 0).unwrap();
        let rows = curve_limit_study(&curve, &default_rho_grid(), jstar).unwrap();
        let last = rows.last().unwrap();
        assert!((last.grad_fro - 0.5).abs() < 1e-3);
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        assert!(crate::grid::strictly_decreasing(&ratios[ratios.len() - 5..]));
        assert!(curve.bk_diagonalizable(10.0).unwrap());
    }
}
