//! Evaluates `J` for the published 300 s/setting counts, both from the six
//! ordinary-port numbers and from a full three-outcome table rebuilt with the
//! substitution identities, and normalizes by the estimated pair number.
//!
//! ```bash
//! cargo run -p eberhard --example table1_jstat
//! ```

use eberhard::counting::{
    eberhard_j_full, eberhard_j_reduced, normalized_j, undetected_from_singles, FullCounts, ReducedCounts, SettingPair,
};
use eberhard::quantum_model::Outcome;

fn main() -> eberhard::Result<()> {
    let reduced = ReducedCounts::published();
    let j = eberhard_j_reduced(&reduced);
    println!("{}", serde_json::to_string_pretty(&reduced)?);
    println!("J (ordinary-port form) = {j}");

    // The e outcomes were never recorded, so all non-o events of the
    // (a1, b2) and (a2, b1) runs sit in the u cells.
    let (o, u) = (Outcome::O as usize, Outcome::U as usize);
    let mut full = FullCounts::default();
    full.table_mut(SettingPair::A1B1)[o][o] = reduced.c_oo_11;
    full.table_mut(SettingPair::A1B2)[o][o] = reduced.c_oo_12;
    full.table_mut(SettingPair::A1B2)[o][u] = undetected_from_singles(reduced.s_a_1, reduced.c_oo_12, 0)?;
    full.table_mut(SettingPair::A2B1)[o][o] = reduced.c_oo_21;
    full.table_mut(SettingPair::A2B1)[u][o] = undetected_from_singles(reduced.s_b_1, reduced.c_oo_21, 0)?;
    full.table_mut(SettingPair::A2B2)[o][o] = reduced.c_oo_22;
    println!("J (three-outcome form) = {}", eberhard_j_full(&full));

    let n = 24.2e6;
    println!("J/N with N = {n:e}: {:.6}", normalized_j(j, n)?);
    Ok(())
}
