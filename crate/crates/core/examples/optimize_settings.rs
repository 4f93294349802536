//! Optimal state parameter and analyzer angles across symmetric arm
//! efficiencies, followed by the measured (asymmetric) efficiencies with
//! finite visibility.
//!
//! ```bash
//! cargo run --release -p eberhard --example optimize_settings
//! ```

use eberhard::optimizer::{optimize, JnModel, OptimizationProblem};

fn main() -> eberhard::Result<()> {
    println!(
        "{:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>12}",
        "eta", "r", "alpha1", "alpha2", "beta1", "beta2", "J/N"
    );
    for eta in [0.68, 0.70, 0.75, 0.80, 0.85, 0.90, 1.0] {
        let res = optimize(&OptimizationProblem::new(JnModel::symmetric(eta, 0.0, 1.0)))?;
        println!(
            "{eta:>6.2} {:>8.4} {:>8.2} {:>8.2} {:>8.2} {:>8.2} {:>12.3e}",
            res.r_star, res.alpha1, res.alpha2, res.beta1, res.beta2, res.jn_star
        );
    }

    let measured = JnModel {
        eta_a: 0.7377,
        eta_b: 0.7859,
        visibility: 0.975,
        ..JnModel::symmetric(0.0, 0.0, 1.0)
    };
    let res = optimize(&OptimizationProblem::new(measured))?;
    println!("\nmeasured efficiencies, V = 0.975:");
    println!("{}", serde_json::to_string_pretty(&res)?);
    Ok(())
}
