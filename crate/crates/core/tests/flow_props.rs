mod common;

use common::random_problem;
use pli_lab::flow::{integrate_gradient_flow, integrate_scalar_gradient_flow, FlowConfig, Terminal, MONOTONE_SLACK};
use pli_lab::linalg::Mat;
use pli_lab::lqr::LqrProblem;
use proptest::prelude::*;

fn quick() -> FlowConfig {
    FlowConfig {
        max_time: 20.0,
        record_every: 0.05,
        ..FlowConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gap_is_monotone_and_gains_stay_stabilizing(seed in any::<u64>()) {
        let (prob, k0) = random_problem(seed);
        let (_, jstar) = prob.optimal_gain().unwrap();
        let traj = integrate_gradient_flow(&prob, &k0, &quick()).unwrap();
        prop_assert!(matches!(traj.terminal, Terminal::Converged | Terminal::MaxTime));
        let (m, n) = traj.param_shape;
        for w in traj.samples.windows(2) {
            prop_assert!(w[1].gap <= w[0].gap + MONOTONE_SLACK * (w[0].gap + jstar).max(1.0));
            prop_assert!(w[1].t > w[0].t);
        }
        for s in &traj.samples {
            let g = prob.gain(Mat::new(m, n, s.param.clone()).unwrap()).unwrap();
            prop_assert!(g.is_stabilizing());
        }
    }

    #[test]
    fn energy_identity_holds(seed in any::<u64>()) {
        let (prob, k0) = random_problem(seed);
        let traj = integrate_gradient_flow(&prob, &k0, &quick()).unwrap();
        let (drop, dissipated) = traj.energy_balance();
        // trapezoid error on a segment where |grad|² is monotone is at most
        // dt·|Δ|grad|²| / 2
        let quad: f64 = traj
            .samples
            .windows(2)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (w[1].grad_norm.powi(2) - w[0].grad_norm.powi(2)).abs())
            .sum();
        prop_assert!(
            (drop - dissipated).abs() <= quad + 1e-6 * drop.abs().max(1e-9),
            "{drop} vs {dissipated} (quadrature bound {quad})"
        );
        // the bound is informative only if it is small against the drop
        prop_assert!(quad <= 0.5 * drop, "{quad} vs {drop}");
    }

    #[test]
    fn scalar_quadratic_flow_is_exponential(x0 in -10.0f64..10.0) {
        prop_assume!(x0.abs() > 1e-3);
        let traj = integrate_scalar_gradient_flow(|x| 0.5 * x * x, |x| x, x0, 0.0, &quick()).unwrap();
        for s in &traj.samples {
            let exact = x0 * (-s.t).exp();
            prop_assert!((s.param[0] - exact).abs() <= 1e-6 * x0.abs());
        }
    }
}

#[test]
fn flow_is_deterministic() {
    let prob = LqrProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
    let k0 = prob.gain(Mat::scalar(5.0)).unwrap();
    let a = integrate_gradient_flow(&prob, &k0, &quick()).unwrap();
    let b = integrate_gradient_flow(&prob, &k0, &quick()).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn rejects_unstable_start() {
    let prob = LqrProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
    let k0 = prob.gain(Mat::scalar(0.5)).unwrap();
    assert!(integrate_gradient_flow(&prob, &k0, &quick()).is_err());
}
