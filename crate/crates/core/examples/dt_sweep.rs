//! Smallest PL rate of the sampled-data scalar problem as the step shrinks.

use pli_lab::scalar::{dt_rate_sweep, ScalarCt, DEFAULT_HS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0)?;
    println!("{:>6} {:>14} {:>14} {:>10}", "h", "kd_min", "md_min", "multimodal");
    for row in dt_rate_sweep(&sys, &DEFAULT_HS)? {
        println!(
            "{:>6} {:>14.6} {:>14.6e} {:>10}",
            row.h, row.kd_min, row.md_min, row.multimodal
        );
    }
    Ok(())
}
