//! Cost gap, gradient and PL rate of the scalar plant `ẋ = x + u`.
//!
//! The rate `m(k) = |J′(k)|² / (J(k) − J*)` stays positive near `k*` but
//! decays like `1/k` for large gains, so no single PL constant covers the
//! whole stabilizing set.

use pli_lab::grid;
use pli_lab::scalar::ScalarCt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0)?;
    println!("k* = {:.12}, J* = {:.12}", sys.kstar(), sys.pstar());
    println!("{:>10} {:>14} {:>14} {:>14}", "k", "gap", "grad", "m(k)");
    for k in grid::geometric(1.01, 1e4, 13) {
        let m = sys.rate(k)?.map_or("-".to_string(), |m| format!("{m:.6e}"));
        println!("{k:>10.4} {:>14.6e} {:>14.6e} {m:>14}", sys.gap(k)?, sys.grad(k)?);
    }
    // the gradient saturates at r/2 while the gap keeps growing
    println!("grad(1e6) = {:.8}", sys.grad(1e6)?);
    Ok(())
}
