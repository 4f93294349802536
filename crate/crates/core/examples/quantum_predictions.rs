//! Closed-form predictions: the state family, noisy density matrices,
//! outcome distributions and expected count tables at the measured
//! efficiencies.
//!
//! ```bash
//! cargo run -p eberhard --example quantum_predictions
//! ```

use eberhard::counting::SettingsQuad;
use eberhard::quantum_model::{
    apply_noise, expected_counts, joint_outcome_distribution, make_state, ArmParams, Exposure, NoiseModel, Outcome,
    SourceParams,
};

fn main() -> eberhard::Result<()> {
    let psi = make_state(0.297)?;
    let amps = psi.amplitudes();
    println!("|psi(0.297)> = {:.6} |HV> + {:.6} |VH>", amps[1].re, amps[2].re);

    let rho = apply_noise(&psi, 0.975, NoiseModel::CoherenceDamping)?;
    println!("rho (real part):");
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:>9.5}", rho.matrix()[(i, j)].re)).collect();
        println!("  {}", row.join(" "));
    }
    println!("min eigenvalue {:.3e}", rho.min_eigenvalue());

    let source = SourceParams::new(0.297, 0.975, NoiseModel::CoherenceDamping, 24.2e6 / 300.0)?;
    let arm_a = ArmParams::new(0.7377, 0.0, 0.0)?;
    let arm_b = ArmParams::new(0.7859, 0.0, 0.0)?;
    let settings = SettingsQuad::published();

    let labels = ["o", "e", "u"];
    let dist = joint_outcome_distribution(&source, &arm_a, &arm_b, settings.alpha1, settings.beta1)?;
    println!("\noutcome distribution at (alpha1, beta1):");
    for a in Outcome::ALL {
        let row: Vec<String> = Outcome::ALL.iter().map(|&b| format!("{:.5}", dist.get(a, b))).collect();
        println!("  {}: {}", labels[a as usize], row.join("  "));
    }

    let n = 24.2e6;
    let exp = expected_counts(
        &source,
        &arm_a,
        &arm_b,
        &settings,
        Exposure {
            pairs_per_setting: n,
            duration_s: 300.0,
            window_ns: 0,
        },
    )?;
    println!("\nexpected counts for N = {n:e} pairs per setting:");
    println!("  C_oo(a1,b1) = {:.0}", exp.c_oo_11);
    println!("  S_o^A(a1)   = {:.0}", exp.s_a_1);
    println!("  C_oo(a1,b2) = {:.0}", exp.c_oo_12);
    println!("  S_o^B(b1)   = {:.0}", exp.s_b_1);
    println!("  C_oo(a2,b1) = {:.0}", exp.c_oo_21);
    println!("  C_oo(a2,b2) = {:.0}", exp.c_oo_22);
    println!("  J = {:.0}, J/N = {:.5}", exp.j(), exp.j() / n);
    Ok(())
}
