//! Continuous-time LQR as a policy-optimization problem over feedback gains.
//!
//! For a stabilizing `K` the cost is `J(K) = tr P_K` with
//! `(A−BK)ᵀP + P(A−BK) + KᵀRK + Q = 0`, and the gradient is
//! `∇J(K) = 2(RK − BᵀP_K)·Y_K` with `(A−BK)Y + Y(A−BK)ᵀ + I = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{
    controllability_matrix, rank, solve_lyapunov_ct, spectral_abscissa, LinalgError, LyapunovForm, Mat, Stability,
};

/// Abscissa dead zone shared by stability checks.
pub const HURWITZ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LqrError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("gain is not stabilizing (closed-loop abscissa {abscissa:e})")]
    NotStabilizing { abscissa: f64 },
    #[error("(A, B) is not controllable (rank {rank} < {n})")]
    Uncontrollable { rank: usize, n: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("Newton-Kleinman did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("no sampled gain lies in the restricted set")]
    EmptySample,
    #[error("curve gain at rho = {rho} is not stabilizing (abscissa {abscissa:e})")]
    CurveNotStabilizing { rho: f64, abscissa: f64 },
    #[error("high-gain construction failed: {0}")]
    Construction(String),
}

impl LqrError {
    fn from_lyapunov(e: LinalgError) -> Self {
        match e {
            LinalgError::NotHurwitz { abscissa } => LqrError::NotStabilizing { abscissa },
            other => LqrError::Linalg(other),
        }
    }
}

/// System `ẋ = Ax + Bu` with cost weights `Q`, `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrProblem {
    a: Mat,
    b: Mat,
    q: Mat,
    r: Mat,
}

impl LqrProblem {
    /// Validates shapes, `Q ≻ 0`, `R ≻ 0` (both symmetric) and
    /// controllability of `(A, B)`.
    pub fn new(a: Mat, b: Mat, q: Mat, r: Mat) -> Result<Self, LqrError> {
        let n = a.rows();
        if !a.is_square() || n == 0 {
            return Err(LqrError::InvalidProblem(format!(
                "A must be square and nonempty, got {:?}",
                a.shape()
            )));
        }
        if b.rows() != n || b.cols() == 0 {
            return Err(LqrError::InvalidProblem(format!(
                "B must be {n}xm, got {:?}",
                b.shape()
            )));
        }
        let m = b.cols();
        if q.shape() != (n, n) {
            return Err(LqrError::InvalidProblem(format!(
                "Q must be {n}x{n}, got {:?}",
                q.shape()
            )));
        }
        if r.shape() != (m, m) {
            return Err(LqrError::InvalidProblem(format!(
                "R must be {m}x{m}, got {:?}",
                r.shape()
            )));
        }
        for (name, w) in [("Q", &q), ("R", &r)] {
            if !w.is_symmetric(1e-12) {
                return Err(LqrError::InvalidProblem(format!("{name} is not symmetric")));
            }
            if !w.is_positive_definite() {
                return Err(LqrError::InvalidProblem(format!("{name} is not positive definite")));
            }
        }
        let ctrb_rank = rank(&controllability_matrix(&a, &b)?, 1e-10);
        if ctrb_rank < n {
            return Err(LqrError::Uncontrollable { rank: ctrb_rank, n });
        }
        Ok(Self { a, b, q, r })
    }

    /// 1×1 problem.
    pub fn scalar(a: f64, b: f64, q: f64, r: f64) -> Result<Self, LqrError> {
        Self::new(Mat::scalar(a), Mat::scalar(b), Mat::scalar(q), Mat::scalar(r))
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }

    pub fn b(&self) -> &Mat {
        &self.b
    }

    pub fn q(&self) -> &Mat {
        &self.q
    }

    pub fn r(&self) -> &Mat {
        &self.r
    }

    /// State dimension `n`.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Input dimension `m`.
    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn closed_loop(&self, k: &Mat) -> Mat {
        &self.a - &(&self.b * k)
    }

    /// Wraps `k` as a [`Gain`], computing its stability margin.
    pub fn gain(&self, k: Mat) -> Result<Gain, LqrError> {
        Gain::new(self, k)
    }

    pub fn cost(&self, k: &Gain) -> Result<f64, LqrError> {
        Ok(self.value_matrix(k)?.trace())
    }

    pub fn gradient(&self, k: &Gain) -> Result<Mat, LqrError> {
        let p = self.value_matrix(k)?;
        let y = self.state_covariance(k)?;
        Ok(self.gradient_from(k, &p, &y))
    }

    /// Cost, gap against `cost_star`, gradient, `P_K` and `Y_K` in one pass.
    pub fn evaluate(&self, k: &Gain, cost_star: f64) -> Result<LqrEval, LqrError> {
        let p = self.value_matrix(k)?;
        let y = self.state_covariance(k)?;
        let grad = self.gradient_from(k, &p, &y);
        let cost = p.trace();
        Ok(LqrEval {
            cost,
            gap: cost - cost_star,
            grad_norm: grad.frobenius_norm(),
            grad,
            p,
            y,
        })
    }

    /// `P_K` from `(A−BK)ᵀP + P(A−BK) + KᵀRK + Q = 0`.
    pub fn value_matrix(&self, k: &Gain) -> Result<Mat, LqrError> {
        self.check_shape(&k.k)?;
        let f = self.closed_loop(&k.k);
        let rhs = &(&(&k.k.transpose() * &self.r) * &k.k) + &self.q;
        solve_lyapunov_ct(&f, &rhs.symmetrized(), LyapunovForm::Transposed).map_err(LqrError::from_lyapunov)
    }

    /// `Y_K` from `(A−BK)Y + Y(A−BK)ᵀ + I = 0`.
    pub fn state_covariance(&self, k: &Gain) -> Result<Mat, LqrError> {
        self.check_shape(&k.k)?;
        let f = self.closed_loop(&k.k);
        solve_lyapunov_ct(&f, &Mat::identity(self.n()), LyapunovForm::Standard).map_err(LqrError::from_lyapunov)
    }

    fn gradient_from(&self, k: &Gain, p: &Mat, y: &Mat) -> Mat {
        let inner = &(&self.r * &k.k) - &(&self.b.transpose() * p);
        (&inner * y).scale(2.0)
    }

    fn check_shape(&self, k: &Mat) -> Result<(), LqrError> {
        if k.shape() != (self.m(), self.n()) {
            return Err(LinalgError::DimensionMismatch {
                op: "gain",
                left: (self.m(), self.n()),
                right: k.shape(),
            }
            .into());
        }
        Ok(())
    }

    /// Optimal gain and cost by Newton–Kleinman iteration seeded with a
    /// high-gain stabilizing gain.
    pub fn optimal_gain(&self) -> Result<(Gain, f64), LqrError> {
        let seed = crate::highgain::stabilize(self)?;
        self.newton_kleinman(seed, 200)
    }

    /// Newton–Kleinman from a given stabilizing gain.
    pub fn newton_kleinman(&self, seed: Gain, max_iter: usize) -> Result<(Gain, f64), LqrError> {
        let r_inv_bt = self.r.solve(&self.b.transpose())?;
        let mut k = seed;
        for _ in 0..max_iter {
            let p = self.value_matrix(&k)?;
            let next = &r_inv_bt * &p;
            let step = (&next - &k.k).frobenius_norm();
            let scale = k.k.frobenius_norm().max(1.0);
            k = Gain::new(self, next)?;
            if step < 1e-12 * scale {
                let cost = self.cost(&k)?;
                return Ok((k, cost));
            }
        }
        Err(LqrError::NoConvergence { iterations: max_iter })
    }

    /// `A − BK + δI` Hurwitz, i.e. abscissa below `−δ` by more than the
    /// dead zone.
    pub fn in_restricted_set(&self, k: &Gain, delta: f64) -> bool {
        k.margin > delta + HURWITZ_TOL
    }

    /// Largest `‖∇J‖_F` over sampled gains in the `δ`-restricted set. This is
    /// a lower estimate of the true supremum.
    pub fn restricted_gradient_bound(&self, delta: f64, sampler: &GainSampler) -> Result<f64, LqrError> {
        if !(delta > 0.0) {
            return Err(LqrError::InvalidProblem(format!("delta must be positive, got {delta}")));
        }
        let mut best: Option<f64> = None;
        for k in sampler.samples(self.m(), self.n())? {
            let Ok(gain) = Gain::new(self, k) else { continue };
            if !self.in_restricted_set(&gain, delta) {
                continue;
            }
            let g = self.gradient(&gain)?.frobenius_norm();
            best = Some(best.map_or(g, |b: f64| b.max(g)));
        }
        best.ok_or(LqrError::EmptySample)
    }
}

/// A feedback gain together with its closed-loop stability margin
/// `−abscissa(A − BK)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gain {
    k: Mat,
    margin: f64,
}

impl Gain {
    pub fn new(prob: &LqrProblem, k: Mat) -> Result<Self, LqrError> {
        prob.check_shape(&k)?;
        if !k.all_finite() {
            return Err(LinalgError::NonFinite { row: 0, col: 0 }.into());
        }
        let margin = -spectral_abscissa(&prob.closed_loop(&k))?.abscissa;
        Ok(Self { k, margin })
    }

    pub fn k(&self) -> &Mat {
        &self.k
    }

    pub fn into_mat(self) -> Mat {
        self.k
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Membership in the stabilizing set.
    pub fn is_stabilizing(&self) -> bool {
        self.margin > 0.0
    }

    pub fn stability(&self) -> Stability {
        Stability::classify(-self.margin, HURWITZ_TOL)
    }
}

/// Everything the flow and the diagnostics need at one gain.
#[derive(Debug, Clone)]
pub struct LqrEval {
    pub cost: f64,
    pub gap: f64,
    pub grad: Mat,
    pub grad_norm: f64,
    pub p: Mat,
    pub y: Mat,
}

/// How gains are drawn from the box `lower ≤ K ≤ upper` (entrywise).
#[derive(Debug, Clone)]
pub enum SampleMode {
    /// Tensor grid with `per_axis` points on every entry.
    Grid { per_axis: usize },
    /// Uniform draws from a seeded generator.
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct GainSampler {
    pub lower: Mat,
    pub upper: Mat,
    pub mode: SampleMode,
}

impl GainSampler {
    pub fn grid(lower: Mat, upper: Mat, per_axis: usize) -> Self {
        Self {
            lower,
            upper,
            mode: SampleMode::Grid { per_axis },
        }
    }

    pub fn random(lower: Mat, upper: Mat, count: usize, seed: u64) -> Self {
        Self {
            lower,
            upper,
            mode: SampleMode::Random { count, seed },
        }
    }

    pub fn samples(&self, m: usize, n: usize) -> Result<Vec<Mat>, LqrError> {
        if self.lower.shape() != (m, n) || self.upper.shape() != (m, n) {
            return Err(LinalgError::DimensionMismatch {
                op: "sampler",
                left: (m, n),
                right: self.lower.shape(),
            }
            .into());
        }
        let lo = self.lower.as_slice();
        let hi = self.upper.as_slice();
        let dims = m * n;
        let out = match self.mode {
            SampleMode::Grid { per_axis } => {
                let per_axis = per_axis.max(1);
                let total = per_axis
                    .checked_pow(dims as u32)
                    .ok_or_else(|| LqrError::InvalidProblem("sampling grid too large".into()))?;
                (0..total)
                    .map(|mut idx| {
                        let data: Vec<f64> = (0..dims)
                            .map(|d| {
                                let i = idx % per_axis;
                                idx /= per_axis;
                                if per_axis == 1 {
                                    0.5 * (lo[d] + hi[d])
                                } else {
                                    lo[d] + (hi[d] - lo[d]) * i as f64 / (per_axis - 1) as f64
                                }
                            })
                            .collect();
                        Mat::new(m, n, data)
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            SampleMode::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| {
                        let data: Vec<f64> = (0..dims)
                            .map(|d| lo[d] + (hi[d] - lo[d]) * rng.random::<f64>())
                            .collect();
                        Mat::new(m, n, data)
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        Ok(out)
    }
}
