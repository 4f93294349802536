//! Exact integer bookkeeping of the Eberhard statistic.
//!
//! `J` is evaluated either from the full three-outcome tables,
//!
//! ```text
//! J = -n_oo(a1,b1) + n_oe(a1,b2) + n_ou(a1,b2) + n_eo(a2,b1) + n_uo(a2,b1) + n_oo(a2,b2)
//! ```
//!
//! or from the six ordinary-port quantities a single detector per side can
//! record,
//!
//! ```text
//! J = -C_oo(a1,b1) + S_o^A(a1) - C_oo(a1,b2) + S_o^B(b1) - C_oo(a2,b1) + C_oo(a2,b2)
//! ```
//!
//! `S_o^A(a1)` is Alice's singles during the `(a1, b2)` run and `S_o^B(b1)`
//! Bob's singles during the `(a2, b1)` run; the two forms agree exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_model::{AnalyzerAngle, Outcome};

/// The two analyzer settings of each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingsQuad {
    pub alpha1: AnalyzerAngle,
    pub alpha2: AnalyzerAngle,
    pub beta1: AnalyzerAngle,
    pub beta2: AnalyzerAngle,
}

impl SettingsQuad {
    pub fn from_degrees(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            alpha1: AnalyzerAngle::deg(alpha1),
            alpha2: AnalyzerAngle::deg(alpha2),
            beta1: AnalyzerAngle::deg(beta1),
            beta2: AnalyzerAngle::deg(beta2),
        }
    }

    /// Angles used in the 300 s/setting laboratory run: 85.6°, 118.0°, −5.4°, 25.9°.
    pub fn published() -> Self {
        Self::from_degrees(85.6, 118.0, -5.4, 25.9)
    }

    pub fn angles(&self, pair: SettingPair) -> (AnalyzerAngle, AnalyzerAngle) {
        match pair {
            SettingPair::A1B1 => (self.alpha1, self.beta1),
            SettingPair::A1B2 => (self.alpha1, self.beta2),
            SettingPair::A2B1 => (self.alpha2, self.beta1),
            SettingPair::A2B2 => (self.alpha2, self.beta2),
        }
    }

    pub fn offset(&self, delta_deg: f64) -> Self {
        Self {
            alpha1: self.alpha1.offset(delta_deg),
            alpha2: self.alpha2.offset(delta_deg),
            beta1: self.beta1.offset(delta_deg),
            beta2: self.beta2.offset(delta_deg),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for a in [self.alpha1, self.alpha2, self.beta1, self.beta2] {
            a.validate()?;
        }
        Ok(())
    }
}

/// One of the four setting combinations `(α_i, β_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingPair {
    A1B1 = 0,
    A1B2 = 1,
    A2B1 = 2,
    A2B2 = 3,
}

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [
        SettingPair::A1B1,
        SettingPair::A1B2,
        SettingPair::A2B1,
        SettingPair::A2B2,
    ];

    /// File-name label: `a1b1`, `a1b2`, `a2b1` or `a2b2`.
    pub fn label(self) -> &'static str {
        match self {
            SettingPair::A1B1 => "a1b1",
            SettingPair::A1B2 => "a1b2",
            SettingPair::A2B1 => "a2b1",
            SettingPair::A2B2 => "a2b2",
        }
    }
}

/// Three-outcome count table `n[alice][bob]` over `{o, e, u}`.
pub type OutcomeTable = [[u64; 3]; 3];

/// Full pair-resolved counts for all four setting combinations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullCounts {
    /// Indexed by [`SettingPair`] discriminant.
    pub tables: [OutcomeTable; 4],
    pub pairs_per_setting: Option<u64>,
}

/// Real-valued analogue of [`FullCounts`] holding expectation values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FullCountsF64 {
    pub tables: [[[f64; 3]; 3]; 4],
}

impl FullCounts {
    pub fn table(&self, pair: SettingPair) -> &OutcomeTable {
        &self.tables[pair as usize]
    }

    pub fn table_mut(&mut self, pair: SettingPair) -> &mut OutcomeTable {
        &mut self.tables[pair as usize]
    }

    pub fn n(&self, pair: SettingPair, alice: Outcome, bob: Outcome) -> u64 {
        self.tables[pair as usize][alice as usize][bob as usize]
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.pairs_per_setting {
            for pair in SettingPair::ALL {
                let sum: u64 = self.table(pair).iter().flatten().sum();
                if sum != n {
                    return Err(Error::InconsistentCounts(format!(
                        "{} table sums to {sum}, expected N = {n}",
                        pair.label()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Collapses to the ordinary-port quantities via the substitution
    /// identities (singles are ordinary-port row/column sums).
    pub fn reduce(&self) -> ReducedCounts {
        use Outcome::*;
        use SettingPair::*;
        let t12 = self.table(A1B2);
        let t21 = self.table(A2B1);
        ReducedCounts {
            c_oo_11: self.n(A1B1, O, O),
            s_a_1: t12[O as usize].iter().sum(),
            c_oo_12: self.n(A1B2, O, O),
            s_b_1: t21.iter().map(|row| row[O as usize]).sum(),
            c_oo_21: self.n(A2B1, O, O),
            c_oo_22: self.n(A2B2, O, O),
            pairs_per_setting: self.pairs_per_setting.map(|n| n as f64),
            duration_s: None,
        }
    }
}

/// The six ordinary-port counts entering the reduced statistic.
///
/// JSON keys follow the counts file format (`c_oo_a1b1`, `s_o_a_a1`, ...).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ReducedCounts {
    #[serde(rename = "c_oo_a1b1")]
    pub c_oo_11: u64,
    #[serde(rename = "s_o_a_a1")]
    pub s_a_1: u64,
    #[serde(rename = "c_oo_a1b2")]
    pub c_oo_12: u64,
    #[serde(rename = "s_o_b_b1")]
    pub s_b_1: u64,
    #[serde(rename = "c_oo_a2b1")]
    pub c_oo_21: u64,
    #[serde(rename = "c_oo_a2b2")]
    pub c_oo_22: u64,
    #[serde(rename = "n_per_setting", default, skip_serializing_if = "Option::is_none")]
    pub pairs_per_setting: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
}

impl ReducedCounts {
    pub fn new(c_oo_11: u64, s_a_1: u64, c_oo_12: u64, s_b_1: u64, c_oo_21: u64, c_oo_22: u64) -> Self {
        Self {
            c_oo_11,
            s_a_1,
            c_oo_12,
            s_b_1,
            c_oo_21,
            c_oo_22,
            pairs_per_setting: None,
            duration_s: None,
        }
    }

    /// The counts of the 300 s/setting laboratory run.
    pub fn published() -> Self {
        Self::new(1_069_306, 1_522_865, 1_152_595, 1_693_718, 1_191_146, 69_749)
    }

    /// Rejects tables where a coincidence count exceeds the singles recorded
    /// in the same run (`S_o^A(a1) >= C_oo(a1,b2)`, `S_o^B(b1) >= C_oo(a2,b1)`).
    pub fn validate(&self) -> Result<()> {
        if self.s_a_1 < self.c_oo_12 {
            return Err(Error::InconsistentCounts(format!(
                "S_o^A(a1) = {} < C_oo(a1,b2) = {}",
                self.s_a_1, self.c_oo_12
            )));
        }
        if self.s_b_1 < self.c_oo_21 {
            return Err(Error::InconsistentCounts(format!(
                "S_o^B(b1) = {} < C_oo(a2,b1) = {}",
                self.s_b_1, self.c_oo_21
            )));
        }
        if let Some(n) = self.pairs_per_setting {
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::param("n_per_setting", format!("{n} must be > 0")));
            }
        }
        Ok(())
    }

    /// Elementwise sum; the optional metadata is summed where both are present.
    pub fn merged(&self, other: &ReducedCounts) -> ReducedCounts {
        let add = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| a + b);
        ReducedCounts {
            c_oo_11: self.c_oo_11 + other.c_oo_11,
            s_a_1: self.s_a_1 + other.s_a_1,
            c_oo_12: self.c_oo_12 + other.c_oo_12,
            s_b_1: self.s_b_1 + other.s_b_1,
            c_oo_21: self.c_oo_21 + other.c_oo_21,
            c_oo_22: self.c_oo_22 + other.c_oo_22,
            pairs_per_setting: add(self.pairs_per_setting, other.pairs_per_setting),
            duration_s: add(self.duration_s, other.duration_s),
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let counts: ReducedCounts = serde_json::from_str(&text)?;
        counts.validate()?;
        Ok(counts)
    }
}

/// `n_ou = S - C_oo - C_oe` (and the mirrored identity for `n_uo`).
pub fn undetected_from_singles(singles: u64, c1: u64, c2: u64) -> Result<u64> {
    c1.checked_add(c2)
        .and_then(|c| singles.checked_sub(c))
        .ok_or_else(|| Error::InconsistentCounts(format!("singles {singles} < coincidences {c1} + {c2}")))
}

/// `J` from the full three-outcome tables.
pub fn eberhard_j_full(counts: &FullCounts) -> i64 {
    use Outcome::*;
    use SettingPair::*;
    let n = |p, a, b| counts.n(p, a, b) as i64;
    -n(A1B1, O, O) + n(A1B2, O, E) + n(A1B2, O, U) + n(A2B1, E, O) + n(A2B1, U, O) + n(A2B2, O, O)
}

/// `J` from the six ordinary-port counts.
pub fn eberhard_j_reduced(counts: &ReducedCounts) -> i64 {
    let c = |x: u64| x as i64;
    -c(counts.c_oo_11) + c(counts.s_a_1) - c(counts.c_oo_12) + c(counts.s_b_1) - c(counts.c_oo_21) + c(counts.c_oo_22)
}

pub fn normalized_j(j: i64, pairs_per_setting: f64) -> Result<f64> {
    if !(pairs_per_setting.is_finite() && pairs_per_setting > 0.0) {
        return Err(Error::param(
            "pairs_per_setting",
            format!("{pairs_per_setting} must be > 0"),
        ));
    }
    Ok(j as f64 / pairs_per_setting)
}

/// Arm efficiency as coincidences over the partner's singles: Alice's
/// efficiency uses Bob's singles and vice versa.
pub fn measure_arm_efficiency(coincidences: u64, partner_singles: u64) -> Result<f64> {
    if partner_singles == 0 {
        return Err(Error::param("partner_singles", "must be > 0"));
    }
    if coincidences > partner_singles {
        return Err(Error::InconsistentCounts(format!(
            "coincidences {coincidences} exceed partner singles {partner_singles}"
        )));
    }
    Ok(coincidences as f64 / partner_singles as f64)
}

/// Loss-independent pair estimate `S_A · S_B / C`.
pub fn estimate_produced_pairs(s_a: u64, s_b: u64, c: u64) -> Result<f64> {
    if c == 0 {
        return Err(Error::param("coincidences", "must be > 0"));
    }
    Ok(s_a as f64 * s_b as f64 / c as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn undetected_examples() {
        assert_eq!(undetected_from_singles(10, 4, 3).unwrap(), 3);
        assert_eq!(undetected_from_singles(10, 10, 0).unwrap(), 0);
        assert!(matches!(
            undetected_from_singles(5, 4, 3),
            Err(Error::InconsistentCounts(_))
        ));
        assert!(undetected_from_singles(5, u64::MAX, 3).is_err());
    }

    #[test]
    fn j_full_examples() {
        assert_eq!(eberhard_j_full(&FullCounts::default()), 0);
        let mut c = FullCounts::default();
        c.table_mut(SettingPair::A1B1)[0][0] = 1;
        assert_eq!(eberhard_j_full(&c), -1);
    }

    #[test]
    fn j_full_published_consistent_table() {
        let r = ReducedCounts::published();
        let mut full = FullCounts::default();
        full.table_mut(SettingPair::A1B1)[0][0] = r.c_oo_11;
        full.table_mut(SettingPair::A1B2)[0][0] = r.c_oo_12;
        full.table_mut(SettingPair::A1B2)[0][2] = undetected_from_singles(r.s_a_1, r.c_oo_12, 0).unwrap();
        full.table_mut(SettingPair::A2B1)[0][0] = r.c_oo_21;
        full.table_mut(SettingPair::A2B1)[2][0] = undetected_from_singles(r.s_b_1, r.c_oo_21, 0).unwrap();
        full.table_mut(SettingPair::A2B2)[0][0] = r.c_oo_22;
        assert_eq!(eberhard_j_full(&full), -126_715);
        assert_eq!(full.reduce(), r);
    }

    #[test]
    fn j_reduced_examples() {
        assert_eq!(eberhard_j_reduced(&ReducedCounts::published()), -126_715);
        assert_eq!(eberhard_j_reduced(&ReducedCounts::default()), 0);
        assert_eq!(eberhard_j_reduced(&ReducedCounts::new(1, 2, 0, 0, 0, 0)), 1);
    }

    #[test]
    fn normalized_examples() {
        let jn = normalized_j(-126_715, 24.2e6).unwrap();
        assert!((jn - (-0.005_236_157)).abs() < 1e-9, "{jn}");
        assert_eq!(normalized_j(0, 17.0).unwrap(), 0.0);
        assert!((normalized_j(-207, 1000.0).unwrap() + 0.207).abs() < 1e-15);
        assert!(normalized_j(1, 0.0).is_err());
        assert!(normalized_j(1, -3.0).is_err());
    }

    #[test]
    fn efficiency_and_pairs() {
        assert_eq!(measure_arm_efficiency(100, 100).unwrap(), 1.0);
        assert_eq!(measure_arm_efficiency(50, 100).unwrap(), 0.5);
        assert!(measure_arm_efficiency(1, 0).is_err());
        assert!(measure_arm_efficiency(101, 100).is_err());
        assert_eq!(estimate_produced_pairs(100, 100, 100).unwrap(), 100.0);
        assert_eq!(estimate_produced_pairs(50, 80, 40).unwrap(), 100.0);
        assert!(estimate_produced_pairs(1, 1, 0).is_err());
    }

    #[test]
    fn reduced_validation() {
        assert!(ReducedCounts::published().validate().is_ok());
        assert!(ReducedCounts::new(0, 3, 4, 10, 0, 0).validate().is_err());
        assert!(ReducedCounts::new(0, 10, 0, 3, 4, 0).validate().is_err());
    }

    #[test]
    fn counts_file_keys() {
        let json = r#"{"c_oo_a1b1": 1069306, "s_o_a_a1": 1522865, "c_oo_a1b2": 1152595,
            "s_o_b_b1": 1693718, "c_oo_a2b1": 1191146, "c_oo_a2b2": 69749,
            "n_per_setting": 24.2e6, "duration_s": 300}"#;
        let c: ReducedCounts = serde_json::from_str(json).unwrap();
        assert_eq!(eberhard_j_reduced(&c), -126_715);
        assert_eq!(c.pairs_per_setting, Some(24.2e6));
        assert_eq!(c.duration_s, Some(300.0));
    }

    fn table() -> impl Strategy<Value = OutcomeTable> {
        prop::array::uniform3(prop::array::uniform3(0u64..1_000_000))
    }

    fn full_counts() -> impl Strategy<Value = FullCounts> {
        prop::array::uniform4(table()).prop_map(|tables| FullCounts {
            tables,
            pairs_per_setting: None,
        })
    }

    proptest! {
        #[test]
        fn full_equals_reduced(c in full_counts()) {
            prop_assert_eq!(eberhard_j_full(&c), eberhard_j_reduced(&c.reduce()));
            prop_assert!(c.reduce().validate().is_ok());
        }

        #[test]
        fn irrelevant_cells_do_not_matter(c in full_counts(), bump in 1u64..1000) {
            let mut d = c.clone();
            for (pair, cells) in [
                (SettingPair::A1B1, [(0usize, 1usize), (1, 0), (2, 2), (1, 1)]),
                (SettingPair::A2B2, [(0, 1), (0, 2), (1, 0), (2, 0)]),
            ] {
                for (a, b) in cells {
                    d.table_mut(pair)[a][b] += bump;
                }
            }
            prop_assert_eq!(eberhard_j_full(&c), eberhard_j_full(&d));
        }

        #[test]
        fn j_is_additive(a in full_counts(), b in full_counts()) {
            let mut sum = a.clone();
            for p in 0..4 {
                for k in 0..3 {
                    for l in 0..3 {
                        sum.tables[p][k][l] += b.tables[p][k][l];
                    }
                }
            }
            prop_assert_eq!(eberhard_j_full(&sum), eberhard_j_full(&a) + eberhard_j_full(&b));
            let merged = a.reduce().merged(&b.reduce());
            prop_assert_eq!(eberhard_j_reduced(&merged), eberhard_j_reduced(&a.reduce()) + eberhard_j_reduced(&b.reduce()));
        }
    }
}
