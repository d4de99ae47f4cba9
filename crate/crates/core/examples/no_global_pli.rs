//! High-gain pole placement on the double integrator.
//!
//! Along `K(ρ)` placing all closed-loop poles at `−ρ` the gap grows without
//! bound. The ratio `‖∇J‖ / √gap` shows how the PL inequality degrades.

use pli_lab::highgain::{curve_limit_study, default_rho_grid, CurveOffset, HighGainCurve, PolePattern};
use pli_lab::linalg::Mat;
use pli_lab::lqr::LqrProblem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prob = LqrProblem::new(
        Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
        Mat::column(&[0.0, 1.0]),
        Mat::identity(2),
        Mat::scalar(1.0),
    )?;
    let (kstar, jstar) = prob.optimal_gain()?;
    println!("K* = {:?}, J* = {jstar:.10}", kstar.k().as_slice());

    for pattern in [PolePattern::Repeated, PolePattern::SingleFast { slow: 1.0 }] {
        println!("\n{pattern:?}");
        let curve = HighGainCurve::new(prob.clone(), pattern, CurveOffset::Direct, 0)?;
        println!("{:>10} {:>14} {:>14} {:>12}", "rho", "gap", "|grad|_F", "ratio");
        for r in curve_limit_study(&curve, &default_rho_grid(), jstar)? {
            println!(
                "{:>10.2} {:>14.6e} {:>14.6e} {:>12.6}",
                r.rho, r.gap, r.grad_fro, r.ratio
            );
        }
    }
    Ok(())
}
