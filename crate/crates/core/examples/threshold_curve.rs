//! Critical symmetric arm efficiency versus background, with and without the
//! restriction to maximally entangled states.
//!
//! ```bash
//! cargo run --release -p eberhard --example threshold_curve
//! ```

use eberhard::optimizer::{critical_efficiency, ThresholdQuery};

fn main() -> eberhard::Result<()> {
    println!("{:>12} {:>12} {:>12}", "background", "free r", "r = 1");
    for background in [0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2] {
        let free = critical_efficiency(&ThresholdQuery::new(background, 1.0))?;
        let maximal = critical_efficiency(&ThresholdQuery {
            fix_r: Some(1.0),
            ..ThresholdQuery::new(background, 1.0)
        })?;
        println!("{background:>12.0e} {free:>12.4} {maximal:>12.4}");
    }
    Ok(())
}
