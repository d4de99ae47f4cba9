//! Checks the closed-form gap, gradient and rate identities of the scalar
//! problem at a few offsets `k = k* + ε`.

use pli_lab::scalar::ScalarCt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0)?;
    for eps in [1e-4, 1e-2, 1.0, 10.0] {
        let c = sys.proposition_check(eps)?;
        println!("eps = {eps:e}: l = {:.6}, l* = {:.6}", c.ell, c.ell_star);
        println!(
            "  gap         lhs {:.6e} rhs {:.6e} residual {:.1e}",
            c.gap.lhs, c.gap.rhs, c.gap.residual
        );
        println!("  gap at l*   ratio {:.6}", c.gap_at_ell_star.ratio());
        println!("  grad        ratio {:.6}", c.grad.ratio());
        if let Some(m) = c.m {
            println!("  rate        ratio {:.6}", m.ratio());
        }
    }
    Ok(())
}
