//! Gradient flow `ẋ = −∇f(x)` and scalar proximal gradient flow, integrated
//! with an adaptive Dormand–Prince 5(4) scheme.
//!
//! A trial step is rejected and halved when any stage leaves the domain,
//! when the local error estimate is too large, or when the cost would go up.

use std::fmt::Write as _;

use thiserror::Error;

use crate::lqr::{Gain, LqrError, LqrProblem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid initial point: {0}")]
    InvalidStart(String),
    #[error(transparent)]
    Lqr(#[from] LqrError),
}

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    Converged,
    MaxTime,
    DomainExit,
    StepFailure,
}

impl Terminal {
    pub fn as_str(&self) -> &'static str {
        match self {
            Terminal::Converged => "converged",
            Terminal::MaxTime => "max_time",
            Terminal::DomainExit => "domain_exit",
            Terminal::StepFailure => "step_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Parameter, row-major when it is a matrix.
    pub param: Vec<f64>,
    pub gap: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminal: Terminal,
    /// `(rows, cols)` of the parameter.
    pub param_shape: (usize, usize),
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.gap).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    /// First time the gap drops to `level` or below.
    pub fn time_to_gap(&self, level: f64) -> Option<f64> {
        self.samples.iter().find(|s| s.gap <= level).map(|s| s.t)
    }

    /// `gap(t₀) − gap(t_end)` against the trapezoid integral of
    /// `gradNorm²`; returns `(decrease, integral)`.
    pub fn energy_balance(&self) -> (f64, f64) {
        let s = &self.samples;
        let integral = s
            .windows(2)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (w[0].grad_norm.powi(2) + w[1].grad_norm.powi(2)))
            .sum();
        (s[0].gap - self.last().gap, integral)
    }

    /// CSV with header `t,gap,grad_norm` and one column per parameter entry.
    pub fn to_csv(&self) -> String {
        let (rows, cols) = self.param_shape;
        let mut header = vec!["t".to_string(), "gap".into(), "grad_norm".into()];
        if rows * cols == 1 {
            header.push("param".into());
        } else {
            for i in 0..rows {
                for j in 0..cols {
                    header.push(format!("param_{i}_{j}"));
                }
            }
        }
        let mut out = header.join(",");
        out.push('\n');
        for s in &self.samples {
            let _ = write!(out, "{:.16e},{:.16e},{:.16e}", s.t, s.gap, s.grad_norm);
            for p in &s.param {
                let _ = write!(out, ",{p:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

/// `(t, gradNorm²/gap)` at every sample with positive gap.
pub fn instantaneous_rate(traj: &Trajectory) -> Vec<(f64, f64)> {
    traj.samples
        .iter()
        .filter(|s| s.gap > 0.0)
        .map(|s| (s.t, s.grad_norm * s.grad_norm / s.gap))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub max_time: f64,
    /// Converged once `gap ≤ gap_tol · gap(0)`.
    pub gap_tol: f64,
    pub grad_tol: f64,
    pub rel_step_tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub record_every: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            max_time: 100.0,
            gap_tol: 1e-10,
            grad_tol: 1e-9,
            rel_step_tol: 1e-8,
            initial_step: 1e-3,
            min_step: 1e-12,
            record_every: 0.01,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        let fields = [
            ("max_time", self.max_time),
            ("gap_tol", self.gap_tol),
            ("grad_tol", self.grad_tol),
            ("rel_step_tol", self.rel_step_tol),
            ("initial_step", self.initial_step),
            ("min_step", self.min_step),
            ("record_every", self.record_every),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.min_step >= self.initial_step {
            return Err(FlowError::InvalidConfig(format!(
                "min_step ({}) must be below initial_step ({})",
                self.min_step, self.initial_step
            )));
        }
        Ok(())
    }
}

/// Cost value, velocity and gradient norm at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPoint {
    pub value: f64,
    pub velocity: Vec<f64>,
    pub grad_norm: f64,
}

/// A vector field together with the cost it decreases.
pub trait FlowSystem {
    /// `Ok(None)` when `x` is outside the domain.
    fn evaluate(&mut self, x: &[f64]) -> Result<Option<FlowPoint>, FlowError>;
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Relative increase of the value tolerated on an accepted step.
pub const MONOTONE_SLACK: f64 = 1e-10;

/// Integrates `system` from `x0`. Gaps are `value − reference`; without a
/// reference they are taken against the smallest value seen, once the run
/// ends, and convergence is then decided by `grad_tol` alone.
pub fn integrate(
    system: &mut impl FlowSystem,
    x0: &[f64],
    reference: Option<f64>,
    cfg: &FlowConfig,
    param_shape: (usize, usize),
) -> Result<Trajectory, FlowError> {
    cfg.validate()?;
    let Some(mut cur) = system.evaluate(x0)? else {
        return Err(FlowError::InvalidStart("initial point is outside the domain".into()));
    };
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut h = cfg.initial_step;
    let gap_of = |v: f64| reference.map(|r| v - r);
    let gap_target = gap_of(cur.value).map(|g0| cfg.gap_tol * g0.max(0.0));

    // (t, x, value, grad_norm)
    let mut recorded: Vec<(f64, Vec<f64>, f64, f64)> = vec![(t, x.clone(), cur.value, cur.grad_norm)];
    let mut last_domain_reject = false;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];

    let terminal = loop {
        let converged = cur.grad_norm <= cfg.grad_tol
            || matches!((gap_of(cur.value), gap_target), (Some(g), Some(tgt)) if g <= tgt);
        if converged {
            break Terminal::Converged;
        }
        if t >= cfg.max_time {
            break Terminal::MaxTime;
        }
        if h < cfg.min_step {
            break if last_domain_reject {
                Terminal::DomainExit
            } else {
                Terminal::StepFailure
            };
        }
        let remaining = cfg.max_time - t;
        let step = h.min(cfg.record_every).min(remaining);

        k[0].clone_from(&cur.velocity);
        let mut next: Option<FlowPoint> = None;
        let mut inside = true;
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                stage[i] = x[i] + step * acc;
            }
            match system.evaluate(&stage)? {
                Some(p) => {
                    k[s].clone_from(&p.velocity);
                    if s == 6 {
                        next = Some(p);
                    }
                }
                None => {
                    inside = false;
                    break;
                }
            }
        }
        let Some(next) = next.filter(|_| inside) else {
            last_domain_reject = true;
            h = 0.5 * step;
            continue;
        };
        let x_new = stage.clone();
        let err: Vec<f64> = (0..dim)
            .map(|i| step * k.iter().zip(E).map(|(kj, e)| e * kj[i]).sum::<f64>())
            .collect();
        let scale = inf_norm(&x).max(inf_norm(&x_new));
        let err_abs = inf_norm(&err);
        let err_n = if err_abs == 0.0 {
            0.0
        } else {
            err_abs / (cfg.rel_step_tol * scale.max(f64::MIN_POSITIVE))
        };
        if !next.value.is_finite() || err_n > 1.0 {
            last_domain_reject = false;
            h = 0.5 * step;
            continue;
        }
        // slack covers round-off in the cost, which grows with the
        // conditioning of the Lyapunov solves
        if next.value > cur.value + MONOTONE_SLACK * cur.value.abs().max(1.0) {
            last_domain_reject = false;
            h = 0.5 * step;
            continue;
        }
        t += step;
        x = x_new;
        cur = next;
        last_domain_reject = false;
        let grow = if err_n == 0.0 {
            5.0
        } else {
            (0.9 * err_n.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = step * grow;

        let (t_rec, _, v_rec, g_rec) = recorded.last().unwrap();
        let due = t - t_rec >= cfg.record_every * (1.0 - 1e-9);
        let moved = match gap_of(cur.value).zip(gap_of(*v_rec)) {
            Some((g, g_rec_gap)) => (g - g_rec_gap).abs() > 0.01 * g_rec_gap.abs(),
            None => (cur.value - v_rec).abs() > 0.01 * v_rec.abs(),
        } || (cur.grad_norm - g_rec).abs() > 0.01 * g_rec;
        if due || moved {
            recorded.push((t, x.clone(), cur.value, cur.grad_norm));
        }
    };
    if recorded.last().map(|r| r.0) != Some(t) {
        recorded.push((t, x.clone(), cur.value, cur.grad_norm));
    }
    let reference = reference.unwrap_or_else(|| recorded.iter().map(|r| r.2).fold(f64::INFINITY, f64::min));
    Ok(Trajectory {
        samples: recorded
            .into_iter()
            .map(|(t, param, value, grad_norm)| Sample {
                t,
                param,
                gap: value - reference,
                grad_norm,
            })
            .collect(),
        terminal,
        param_shape,
    })
}

/// `K̇ = −∇J(K)` on the stabilizing set.
pub struct LqrFlow<'a> {
    pub problem: &'a LqrProblem,
}

impl FlowSystem for LqrFlow<'_> {
    fn evaluate(&mut self, x: &[f64]) -> Result<Option<FlowPoint>, FlowError> {
        let (m, n) = (self.problem.m(), self.problem.n());
        let Ok(k) = crate::linalg::Mat::new(m, n, x.to_vec()) else {
            return Ok(None);
        };
        let gain = Gain::new(self.problem, k)?;
        if gain.stability() != crate::linalg::Stability::Hurwitz {
            return Ok(None);
        }
        let ev = match self.problem.evaluate(&gain, 0.0) {
            Ok(ev) => ev,
            Err(LqrError::NotStabilizing { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        Ok(Some(FlowPoint {
            value: ev.cost,
            velocity: ev.grad.as_slice().iter().map(|g| -g).collect(),
            grad_norm: ev.grad_norm,
        }))
    }
}

/// Gradient flow of an LQR problem from `k0`, with the gap measured
/// against the Riccati optimum.
pub fn integrate_gradient_flow(prob: &LqrProblem, k0: &Gain, cfg: &FlowConfig) -> Result<Trajectory, FlowError> {
    let (_, cost_star) = prob.optimal_gain()?;
    integrate_gradient_flow_with(prob, k0, cost_star, cfg)
}

/// As [`integrate_gradient_flow`] with a known optimal cost.
pub fn integrate_gradient_flow_with(
    prob: &LqrProblem,
    k0: &Gain,
    cost_star: f64,
    cfg: &FlowConfig,
) -> Result<Trajectory, FlowError> {
    if !k0.is_stabilizing() {
        return Err(FlowError::InvalidStart(format!(
            "initial gain is not stabilizing (margin {:e})",
            k0.margin()
        )));
    }
    let mut sys = LqrFlow { problem: prob };
    integrate(&mut sys, k0.k().as_slice(), Some(cost_star), cfg, k0.k().shape())
}

/// `ẋ = −f′(x)` for a scalar cost on the open interval `domain`.
pub struct ScalarGradientFlow<F, G> {
    pub f: F,
    pub grad: G,
    pub domain: (f64, f64),
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> FlowSystem for ScalarGradientFlow<F, G> {
    fn evaluate(&mut self, x: &[f64]) -> Result<Option<FlowPoint>, FlowError> {
        let x = x[0];
        if !(x > self.domain.0 && x < self.domain.1) {
            return Ok(None);
        }
        let g = (self.grad)(x);
        Ok(Some(FlowPoint {
            value: (self.f)(x),
            velocity: vec![-g],
            grad_norm: g.abs(),
        }))
    }
}

/// Gradient flow of a scalar cost with known minimum value `f_star`.
pub fn integrate_scalar_gradient_flow(
    f: impl Fn(f64) -> f64,
    grad: impl Fn(f64) -> f64,
    x0: f64,
    f_star: f64,
    cfg: &FlowConfig,
) -> Result<Trajectory, FlowError> {
    let mut sys = ScalarGradientFlow {
        f,
        grad,
        domain: (f64::NEG_INFINITY, f64::INFINITY),
    };
    integrate(&mut sys, &[x0], Some(f_star), cfg, (1, 1))
}

/// `sign(z)·max(|z| − 1, 0)`.
pub fn soft_threshold(z: f64) -> f64 {
    z.signum() * (z.abs() - 1.0).max(0.0)
}

/// `ẋ = −x + soft(x − f′(x))`, decreasing `f(x) + |x|`.
pub struct ProxFlow<F, G> {
    pub f: F,
    pub grad: G,
}

impl<F: Fn(f64) -> f64, G: Fn(f64) -> f64> FlowSystem for ProxFlow<F, G> {
    fn evaluate(&mut self, x: &[f64]) -> Result<Option<FlowPoint>, FlowError> {
        let x = x[0];
        if !x.is_finite() {
            return Ok(None);
        }
        let v = -x + soft_threshold(x - (self.grad)(x));
        Ok(Some(FlowPoint {
            value: (self.f)(x) + x.abs(),
            velocity: vec![v],
            grad_norm: v.abs(),
        }))
    }
}

/// Proximal gradient flow for `f(x) + |x|`. The gap is measured against
/// `optimum` (the minimum of `f + |·|`) when given, else against the lowest
/// value reached.
pub fn integrate_prox_flow_scalar(
    f: impl Fn(f64) -> f64,
    gradf: impl Fn(f64) -> f64,
    x0: f64,
    optimum: Option<f64>,
    cfg: &FlowConfig,
) -> Result<Trajectory, FlowError> {
    let mut sys = ProxFlow { f, grad: gradf };
    integrate(&mut sys, &[x0], optimum, cfg, (1, 1))
}
