//! Efficiency feasibility for DI-QKD and one-sided DI-QKD, plus the basis
//! visibilities of a coherence-damped maximally entangled state.
//!
//! ```bash
//! cargo run -p eberhard --example qkd_feasibility
//! ```

use eberhard::qkd_feasibility::{basis_visibility, feasibility, feasibility_with_source, Basis};
use eberhard::quantum_model::{NoiseModel, SourceParams};

fn main() -> eberhard::Result<()> {
    let source = SourceParams::new(1.0, 0.9678, NoiseModel::CoherenceDamping, 0.0)?;
    println!("z-basis visibility {:.4}", basis_visibility(&source, Basis::Z)?);
    println!("x-basis visibility {:.4}", basis_visibility(&source, Basis::X)?);

    let report = feasibility_with_source(0.7246, 0.7812, &source)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    for (a, b) in [(0.66, 0.66), (0.74, 0.80), (0.76, 0.76)] {
        let r = feasibility(a, b)?;
        println!(
            "eta = ({a:.2}, {b:.2}): DI-QKD {}, 1sDI Alice side {}, Bob side {}",
            r.feasible_di, r.feasible_1sdi_alice_side, r.feasible_1sdi_bob_side
        );
    }
    Ok(())
}
