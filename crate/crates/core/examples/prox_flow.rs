//! Proximal gradient flow for `f(x) + |x|` on three quadratics.

use pli_lab::experiment::prox_cases;
use pli_lab::flow::{integrate_prox_flow_scalar, FlowConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = FlowConfig {
        max_time: 60.0,
        gap_tol: 1e-20,
        grad_tol: 1e-10,
        ..FlowConfig::default()
    };
    for (name, f, g, fstar, xstar) in prox_cases() {
        let traj = integrate_prox_flow_scalar(f, g, 5.0, Some(fstar), &cfg)?;
        let last = traj.last();
        println!(
            "{name:>9}: x(T) = {:+.10} (expected {xstar}), T = {:.3}, {}",
            last.param[0],
            last.t,
            traj.terminal.as_str()
        );
    }
    Ok(())
}
