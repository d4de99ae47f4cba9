//! Lyapunov solves, spectra and the Riccati solution by Newton-Kleinman on a
//! random stable-ish 3-state system.

use pli_lab::highgain::stabilize;
use pli_lab::linalg::{lyapunov_residual, solve_lyapunov_ct, spectral_abscissa, LyapunovForm, Mat};
use pli_lab::lqr::LqrProblem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = Mat::from_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[-1.0, 2.0, 0.5]]);
    let b = Mat::from_rows(&[&[0.0], &[0.0], &[1.0]]);
    let spec = spectral_abscissa(&a)?;
    println!("open loop eigenvalues:");
    for e in &spec.eigenvalues {
        println!("  {:+.6} {:+.6}i", e.re, e.im);
    }

    let prob = LqrProblem::new(a, b, Mat::identity(3), Mat::scalar(1.0))?;
    let k0 = stabilize(&prob)?;
    println!(
        "stabilizing seed K0 = {:?} (margin {:.4})",
        k0.k().as_slice(),
        k0.margin()
    );

    let f = prob.closed_loop(k0.k());
    let x = solve_lyapunov_ct(&f, &Mat::identity(3), LyapunovForm::Transposed)?;
    println!(
        "Lyapunov residual {:.2e}, J(K0) = {:.8}",
        lyapunov_residual(&f, &x, &Mat::identity(3), LyapunovForm::Transposed),
        prob.cost(&k0)?
    );

    let (kstar, jstar) = prob.optimal_gain()?;
    println!("K* = {:?}", kstar.k().as_slice());
    println!(
        "J* = {jstar:.10}, |grad J(K*)|_F = {:.2e}",
        prob.gradient(&kstar)?.frobenius_norm()
    );
    Ok(())
}
