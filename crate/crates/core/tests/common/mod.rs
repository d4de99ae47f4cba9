//! Independent oracles shared by the integration tests. Nothing here calls
//! the Lyapunov or Riccati solvers under test.

#![allow(dead_code)]

use pli_lab::linalg::{spectral_abscissa, Mat};
use pli_lab::lqr::{Gain, LqrProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_mat(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
    Mat::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

/// `MᵀM + I`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let m = random_mat(rng, n, n);
    (&m.transpose() * &m).shift_diag(-1.0)
}

/// Random matrix shifted so its spectral abscissa is in `[-1.5, -0.5]`.
pub fn random_hurwitz(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    let m = random_mat(rng, n, n).scale(2.0);
    let alpha = spectral_abscissa(&m).expect("eigenvalues").abscissa;
    let target = rng.random_range(-1.5..-0.5);
    m.shift_diag(alpha - target)
}

/// `e^A` by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &Mat) -> Mat {
    let n = a.rows();
    let norm = a.max_abs() * n as f64;
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = a.scale(0.5f64.powi(s as i32));
    let mut term = Mat::identity(n);
    let mut sum = Mat::identity(n);
    for k in 1..=20 {
        term = (&term * &a).scale(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `X = ∫₀^∞ e^{Ft} Q e^{Fᵀt} dt` by composite Simpson on `[0, T]`, where `T`
/// is the first grid time with `‖e^{FT}‖_F < 1e-12`.
pub fn lyapunov_integral(f: &Mat, q: &Mat, dt: f64) -> Mat {
    let n = f.rows();
    let step = expm(&f.scale(dt));
    let mut e = Mat::identity(n);
    let integrand = |e: &Mat| &(e * q) * &e.transpose();
    let mut acc = integrand(&e);
    let mut i = 0usize;
    loop {
        i += 1;
        e = &e * &step;
        let w = if e.frobenius_norm() < 1e-12 && i % 2 == 0 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc = &acc + &integrand(&e).scale(w);
        if w == 1.0 {
            break;
        }
        assert!(i < 10_000_000, "integrand does not decay");
    }
    acc.scale(dt / 3.0)
}

/// Random controllable problem with `n, m ≤ 4` and a stabilizing gain near
/// the optimum.
pub fn random_problem(seed: u64) -> (LqrProblem, Gain) {
    let mut r = rng(seed);
    loop {
        let n = r.random_range(1..=4);
        let m = r.random_range(1..=4);
        let a = random_mat(&mut r, n, n);
        let b = random_mat(&mut r, n, m);
        let q = random_spd(&mut r, n);
        let rr = random_spd(&mut r, m);
        let Ok(prob) = LqrProblem::new(a, b, q, rr) else {
            continue;
        };
        let Ok((kstar, _)) = prob.optimal_gain() else { continue };
        for _ in 0..20 {
            let k = kstar.k() + &random_mat(&mut r, m, n).scale(0.3);
            if let Ok(g) = prob.gain(k) {
                if g.margin() > 0.05 {
                    return (prob, g);
                }
            }
        }
    }
}

/// Central differences of `J` in every entry of `K`.
pub fn fd_gradient(prob: &LqrProblem, k: &Gain) -> Mat {
    let (m, n) = k.k().shape();
    let base = k.k().as_slice().to_vec();
    let cost = |v: &[f64]| {
        let kk = prob.gain(Mat::new(m, n, v.to_vec()).unwrap()).unwrap();
        prob.cost(&kk).unwrap()
    };
    let mut out = vec![0.0; m * n];
    for idx in 0..m * n {
        let h = 1e-6 * base[idx].abs().max(1.0);
        let mut p = base.clone();
        p[idx] += h;
        let mut q = base.clone();
        q[idx] -= h;
        out[idx] = (cost(&p) - cost(&q)) / (2.0 * h);
    }
    Mat::new(m, n, out).unwrap()
}
