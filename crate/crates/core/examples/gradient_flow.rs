//! Gradient flow on the scalar LQR cost from both sides of `k*`.
//!
//! Starting far right the flow creeps along a nearly linear stretch before
//! the exponential tail; from the mirrored start on the left it is
//! exponential from the beginning.

use pli_lab::flow::{integrate_gradient_flow, FlowConfig};
use pli_lab::linalg::Mat;
use pli_lab::lqr::LqrProblem;
use pli_lab::pli::certify_gles;
use pli_lab::scalar::ScalarCt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0)?;
    let prob = LqrProblem::scalar(1.0, 1.0, 1.0, 1.0)?;
    let cfg = FlowConfig {
        max_time: 60.0,
        ..FlowConfig::default()
    };

    let right = 19.72;
    let gap0 = sys.gap(right)?;
    // mirrored start: same gap, left of k*
    let (mut lo, mut hi) = (1.0 + 1e-12, sys.kstar());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sys.gap(mid)? > gap0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let left = 0.5 * (lo + hi);
    println!("gap(k0) = {gap0:.6}, right k0 = {right}, left k0 = {left:.12}");

    for (side, k0) in [("right", right), ("left", left)] {
        let traj = integrate_gradient_flow(&prob, &prob.gain(Mat::scalar(k0))?, &cfg)?;
        let t = traj.time_to_gap(1e-6);
        println!(
            "{side:>5}: {} samples, terminal {}, time to gap 1e-6 = {}",
            traj.samples.len(),
            traj.terminal.as_str(),
            t.map_or("never".into(), |t| format!("{t:.3}"))
        );
        let c = certify_gles(&traj)?;
        println!(
            "       linear slope {:.4} (sup |grad|^2 = {:.4}), tail rate {:.4}, valid {}",
            c.slope, c.sup_grad_sq, c.rate, c.valid
        );
    }
    Ok(())
}
