//! Twelve acceptance criteria, one `[PASS]`/`[FAIL]` line each. Exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{fd_gradient, lyapunov_integral, random_hurwitz, random_problem, random_spd, rng};
use pli_lab::experiment::prox_cases;
use pli_lab::flow::{integrate_gradient_flow, integrate_prox_flow_scalar, integrate_scalar_gradient_flow, FlowConfig};
use pli_lab::highgain::{curve_limit_study, default_rho_grid, CurveOffset, HighGainCurve, PolePattern};
use pli_lab::linalg::{lyapunov_residual, solve_lyapunov_ct, spectral_abscissa, LyapunovForm, Mat};
use pli_lab::lqr::LqrProblem;
use pli_lab::pli::{certify_gles, diagnose, empirical_mu, zoo_examples};
use pli_lab::scalar::{dt_rate_sweep, ScalarCt, DEFAULT_HS};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn double_integrator() -> LqrProblem {
    LqrProblem::new(
        Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
        Mat::column(&[0.0, 1.0]),
        Mat::identity(2),
        Mat::scalar(1.0),
    )
    .unwrap()
}

fn strictly(xs: &[f64], increasing: bool) -> bool {
    xs.windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

fn c1_scalar_optimum() -> Outcome {
    let prob = LqrProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
    let (k, j) = prob.optimal_gain().unwrap();
    // 2ap − p²/r + q = 0 with a = q = r = 1
    let (a, q, r) = (1.0f64, 1.0f64, 1.0f64);
    let p = r * (a + (a * a + q / r).sqrt());
    let k = k.k()[(0, 0)];
    check(
        (k - p / r).abs() <= 1e-10 && (j - p).abs() <= 1e-10,
        format!("k* = {k:.15}, J* = {j:.15}, oracle {:.15}", p),
    )
}

fn c2_gradient_limit() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for r in [1.0, 2.0, 0.5] {
        let prob = LqrProblem::scalar(1.0, 1.0, 1.0, r).unwrap();
        let g = prob.gradient(&prob.gain(Mat::scalar(1e6)).unwrap()).unwrap()[(0, 0)];
        ok &= (g - r / 2.0).abs() <= 1e-4 * r;
        detail.push(format!("r={r}: grad={g:.8}"));
    }
    check(ok, detail.join(", "))
}

fn c3_near_optimum_rate() -> Outcome {
    let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let eps = 1e-4;
    let m = sys.rate(sys.kstar() + eps).unwrap().unwrap();
    let target = 1.0 / (2.0 * 2f64.sqrt());
    let rel = (m - target).abs() / target;
    check(
        rel <= 1e-3,
        format!(
            "m(k*+1e-4) = {m:.6}, target r/(2(k*-a)) = {target:.6}, ratio {:.6}, rel err {rel:.3e}",
            m / target
        ),
    )
}

fn c4_no_global_pli() -> Outcome {
    let prob = double_integrator();
    let (_, jstar) = prob.optimal_gain().unwrap();
    let grid = default_rho_grid();
    let study = |pattern| {
        let curve = HighGainCurve::new(prob.clone(), pattern, CurveOffset::Direct, 0).unwrap();
        curve_limit_study(&curve, &grid, jstar).unwrap()
    };
    let verdict = |rows: &[pli_lab::highgain::LimitRow]| {
        let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        let n = rows.len();
        let plateau = (rows[n - 1].grad_fro - rows[n - 2].grad_fro).abs() / rows[n - 2].grad_fro;
        let gap_up = strictly(&gaps, true);
        let ratio_down = strictly(&ratios[n - 5..], false);
        (
            gap_up && plateau < 1e-2 && ratio_down,
            gap_up,
            plateau,
            ratio_down,
            ratios[n - 1],
        )
    };
    let (ok, gap_up, plateau, ratio_down, last) = verdict(&study(PolePattern::Repeated));
    let (alt_ok, _, alt_plateau, alt_down, alt_last) = verdict(&study(PolePattern::SingleFast { slow: 1.0 }));
    check(
        ok,
        format!(
            "repeated poles: gap increasing {gap_up}, grad rel change {plateau:.3e}, ratio decreasing {ratio_down}, \
             final ratio {last:.3}; diagnostic single-fast curve (slow pole -1): all conditions {alt_ok}, \
             grad rel change {alt_plateau:.3e}, ratio decreasing {alt_down}, final ratio {alt_last:.4}"
        ),
    )
}

fn c5_boundary_blow_up() -> Outcome {
    let prob = LqrProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
    let mut grads = Vec::new();
    let mut min_slack = f64::INFINITY;
    for i in 1..=6 {
        let k = 1.0 + 10f64.powi(-i);
        let g = prob.gain(Mat::scalar(k)).unwrap();
        grads.push(prob.gradient(&g).unwrap().frobenius_norm());
        let abscissa = spectral_abscissa(&prob.closed_loop(g.k())).unwrap().abscissa;
        let lam_min_q = 1.0;
        let slack = prob.value_matrix(&g).unwrap().trace() - (-lam_min_q / (2.0 * abscissa));
        min_slack = min_slack.min(slack);
    }
    check(
        strictly(&grads, true) && grads[5] > 1e4 && min_slack >= 0.0,
        format!("|grad| at i=6: {:.4e}, min bound slack {min_slack:.3e}", grads[5]),
    )
}

fn c6_flow_profiles() -> Outcome {
    let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let prob = LqrProblem::scalar(1.0, 1.0, 1.0, 1.0).unwrap();
    let cfg = FlowConfig {
        max_time: 60.0,
        ..FlowConfig::default()
    };
    let k_right = 19.72;
    let gap0 = sys.gap(k_right).unwrap();
    // mirrored start by bisection on (a, k*)
    let (mut lo, mut hi) = (1.0 + 1e-12, sys.kstar());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sys.gap(mid).unwrap() > gap0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k_left = 0.5 * (lo + hi);
    let run = |k0: f64| integrate_gradient_flow(&prob, &prob.gain(Mat::scalar(k0)).unwrap(), &cfg).unwrap();
    let right = run(k_right);
    let left = run(k_left);
    let cert = certify_gles(&right).unwrap();
    let t_right = right.time_to_gap(1e-6);
    let t_left = left.time_to_gap(1e-6);
    let first = (gap0 - 8.0).abs() <= 0.05 && cert.valid && (0.15..=0.27).contains(&cert.slope);
    let second = matches!((t_left, t_right), (Some(l), Some(r)) if l <= 0.1 * r);
    let ratio = match (t_left, t_right) {
        (Some(l), Some(r)) => format!("{:.3}", l / r),
        _ => "n/a".into(),
    };
    check(
        first && second,
        format!(
            "gap(k0)={gap0:.4}, GLES valid {} slope {:.4} (sup grad^2 {:.4}): {}; \
             time to gap 1e-6 right {:?} left {:?}, ratio {ratio} (need <= 0.1): {}",
            cert.valid,
            cert.slope,
            cert.sup_grad_sq,
            if first { "ok" } else { "FAIL" },
            t_right.map(|t| (t * 1e3).round() / 1e3),
            t_left.map(|t| (t * 1e3).round() / 1e3),
            if second { "ok" } else { "FAIL" }
        ),
    )
}

fn c7_dt_sweep() -> Outcome {
    let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let rows = dt_rate_sweep(&sys, &DEFAULT_HS).unwrap();
    let md: Vec<f64> = rows.iter().map(|r| r.md_min).collect();
    let kd: Vec<f64> = rows.iter().map(|r| r.kd_min).collect();
    let ok = strictly(&md, false) && strictly(&kd, true) && md[md.len() - 1] < 0.25 * md[0];
    check(
        ok,
        format!(
            "md_min {:.4e} -> {:.4e}, kd_min {:.4} -> {:.4}",
            md[0],
            md[md.len() - 1],
            kd[0],
            kd[kd.len() - 1]
        ),
    )
}

fn c8_gradient_fd() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let (prob, k) = random_problem(seed);
        let g = prob.gradient(&k).unwrap();
        let fd = fd_gradient(&prob, &k);
        let floor = 1e-3 * g.frobenius_norm();
        for (a, b) in g.as_slice().iter().zip(fd.as_slice()) {
            worst = worst.max((a - b).abs() / a.abs().max(floor));
        }
    }
    check(worst <= 1e-5, format!("worst entrywise relative error {worst:.3e}"))
}

fn c9_lyapunov() -> Outcome {
    let (mut worst_res, mut worst_int) = (0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let mut r = rng(1000 + seed);
        let n = r.random_range(1..=4);
        let f = random_hurwitz(&mut r, n);
        let q = random_spd(&mut r, n);
        let x = solve_lyapunov_ct(&f, &q, LyapunovForm::Standard).unwrap();
        let res = lyapunov_residual(&f, &x, &q, LyapunovForm::Standard) / q.frobenius_norm().max(1.0);
        let xo = lyapunov_integral(&f, &q, 0.005);
        let dev = (&x - &xo).frobenius_norm() / xo.frobenius_norm().max(1.0);
        worst_res = worst_res.max(res);
        worst_int = worst_int.max(dev);
    }
    check(
        worst_res <= 1e-10 && worst_int <= 1e-6,
        format!("worst scaled residual {worst_res:.3e}, worst deviation from integral {worst_int:.3e}"),
    )
}

fn c10_zoo() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for z in zoo_examples() {
        let rep = diagnose(&z.samples()).unwrap();
        ok &= rep.verdict == z.expected;
        detail.push(format!("{}={}", z.name, rep.verdict.as_str()));
        if z.name == "ksat" {
            match rep.ksat_fit {
                Some(f) => {
                    ok &= (f.a - 1.0).abs() <= 0.05 && (f.b - 1.0).abs() <= 0.05;
                    detail.push(format!("fit a={:.4} b={:.4}", f.a, f.b));
                }
                None => {
                    ok = false;
                    detail.push("no fit".into());
                }
            }
        }
    }
    check(ok, detail.join(", "))
}

fn c11_exponential_bound() -> Outcome {
    let zoo = zoo_examples();
    let quad = zoo.iter().find(|z| z.name == "quadratic").unwrap();
    // g² ≥ 2μ·gap on the samples; f = x²/2 gives g² = 2·gap exactly
    let samples = quad.samples();
    let gaps: Vec<f64> = samples.iter().map(|s| s.gap).filter(|g| *g > 0.0).collect();
    let eps = gaps.iter().cloned().fold(0.0, f64::max);
    let mu = empirical_mu(&samples, &[eps]).unwrap()[0].unwrap() / 2.0;
    let traj = integrate_scalar_gradient_flow(quad.f, quad.grad, 10.0, quad.f_star, &FlowConfig::default()).unwrap();
    let g0 = traj.samples[0].gap;
    let worst = traj
        .samples
        .iter()
        .map(|s| s.gap / (g0 * (-2.0 * mu * s.t).exp()))
        .fold(0.0, f64::max);
    check(
        worst <= 1.0 + 1e-6,
        format!(
            "mu = {mu:.6}, max gap(t)/(gap0 e^(-2 mu t)) = {worst:.9} over {} samples",
            traj.samples.len()
        ),
    )
}

fn c12_prox() -> Outcome {
    let cfg = FlowConfig {
        max_time: 60.0,
        gap_tol: 1e-20,
        grad_tol: 1e-10,
        ..FlowConfig::default()
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, f, g, fstar, xstar) in prox_cases() {
        let traj = integrate_prox_flow_scalar(f, g, 5.0, Some(fstar), &cfg).unwrap();
        let x = traj.last().param[0];
        ok &= (x - xstar).abs() <= 1e-6;
        detail.push(format!("{name}: x={x:.3e} (target {xstar})"));
    }
    check(ok, detail.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("C1 scalar optimum", c1_scalar_optimum, 1),
        ("C2 gradient limit r/2", c2_gradient_limit, 1),
        ("C3 near-optimum rate", c3_near_optimum_rate, 1),
        ("C4 no global PLI along high-gain curve", c4_no_global_pli, 10),
        ("C5 boundary blow-up", c5_boundary_blow_up, 1),
        ("C6 flow profiles", c6_flow_profiles, 30),
        ("C7 discrete-time rate sweep", c7_dt_sweep, 10),
        ("C8 gradient vs finite differences", c8_gradient_fd, 30),
        ("C9 Lyapunov solver", c9_lyapunov, 10),
        ("C10 PLI zoo classification", c10_zoo, 30),
        ("C11 exponential bound", c11_exponential_bound, 5),
        ("C12 prox fixed points", c12_prox, 5),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        let timing = format!("{:.3}s of {budget}s", took.as_secs_f64());
        println!(
            "[{}] {name}: {detail} [{timing}{}]",
            if ok { "PASS" } else { "FAIL" },
            if in_time { "" } else { ", too slow" }
        );
        if !ok {
            failed += 1;
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
