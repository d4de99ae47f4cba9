//! Classifies synthetic costs with known PL behaviour, then the scalar LQR
//! cost sampled over its stabilizing set.

use pli_lab::pli::{diagnose, scalar_lqr_samples, zoo_examples};
use pli_lab::scalar::ScalarCt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for z in zoo_examples() {
        let rep = diagnose(&z.samples())?;
        let fit = rep
            .ksat_fit
            .map_or("none".into(), |f| format!("a={:.4} b={:.4}", f.a, f.b));
        println!(
            "{:>10}: {:<32} expected {:<32} fit {fit}",
            z.name,
            rep.verdict.as_str(),
            z.expected.as_str()
        );
    }

    let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0)?;
    let rep = diagnose(&scalar_lqr_samples(&sys, 1e3, 400))?;
    println!("scalar LQR: {}", rep.verdict.as_str());
    Ok(())
}
