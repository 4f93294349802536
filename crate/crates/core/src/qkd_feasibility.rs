//! Arm-efficiency feasibility checks for device-independent QKD and the
//! basis visibilities such protocols consume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum_model::{outcome_distribution, AnalyzerAngle, ArmParams, Outcome, SourceParams};

/// Minimum arm efficiency for full DI-QKD.
pub const THRESHOLD_DI: f64 = 0.75;
/// Minimum arm efficiency on the untrusted side for one-sided DI-QKD.
pub const THRESHOLD_1SDI: f64 = 0.659;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// 0°/90°
    Z,
    /// 45°/135°
    X,
}

impl Basis {
    fn angle_deg(self) -> f64 {
        match self {
            Basis::Z => 0.0,
            Basis::X => 45.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisVisibilities {
    pub z: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub eta_a: f64,
    pub eta_b: f64,
    pub threshold_di: f64,
    pub threshold_1sdi: f64,
    pub feasible_di: bool,
    /// Alice's side untrusted: requires `eta_a > threshold_1sdi`.
    pub feasible_1sdi_alice_side: bool,
    pub feasible_1sdi_bob_side: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visibilities: Option<BasisVisibilities>,
}

/// Coincidence contrast `(C_max − C_min)/(C_max + C_min)` in `basis`, where
/// `C_max` and `C_min` are the summed parallel and crossed detector
/// combinations (ordering-independent, so the larger of the two is `C_max`).
pub fn basis_visibility_with_arms(
    source: &SourceParams,
    arm_a: &ArmParams,
    arm_b: &ArmParams,
    basis: Basis,
) -> Result<f64> {
    let rho = source.density_matrix()?;
    let theta = basis.angle_deg();
    let c = |a: f64, b: f64| {
        outcome_distribution(&rho, arm_a, arm_b, AnalyzerAngle::deg(a), AnalyzerAngle::deg(b))
            .get(Outcome::O, Outcome::O)
    };
    let parallel = c(theta, theta) + c(theta + 90.0, theta + 90.0);
    let crossed = c(theta, theta + 90.0) + c(theta + 90.0, theta);
    let (max, min) = if parallel >= crossed {
        (parallel, crossed)
    } else {
        (crossed, parallel)
    };
    if !(max + min > 0.0) {
        return Err(Error::DegenerateVisibility);
    }
    Ok((max - min) / (max + min))
}

/// Basis visibility with unit efficiencies; arm efficiencies cancel in the ratio.
pub fn basis_visibility(source: &SourceParams, basis: Basis) -> Result<f64> {
    let ideal = ArmParams::with_efficiency(1.0);
    basis_visibility_with_arms(source, &ideal, &ideal, basis)
}

pub fn feasibility(eta_a: f64, eta_b: f64) -> Result<FeasibilityReport> {
    for (name, eta) in [("eta_a", eta_a), ("eta_b", eta_b)] {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::param(name, format!("{eta} not in [0, 1]")));
        }
    }
    Ok(FeasibilityReport {
        eta_a,
        eta_b,
        threshold_di: THRESHOLD_DI,
        threshold_1sdi: THRESHOLD_1SDI,
        feasible_di: eta_a > THRESHOLD_DI && eta_b > THRESHOLD_DI,
        feasible_1sdi_alice_side: eta_a > THRESHOLD_1SDI,
        feasible_1sdi_bob_side: eta_b > THRESHOLD_1SDI,
        visibilities: None,
    })
}

/// [`feasibility`] plus the model-predicted basis visibilities of `source`.
pub fn feasibility_with_source(eta_a: f64, eta_b: f64, source: &SourceParams) -> Result<FeasibilityReport> {
    let mut report = feasibility(eta_a, eta_b)?;
    report.visibilities = Some(BasisVisibilities {
        z: basis_visibility(source, Basis::Z)?,
        x: basis_visibility(source, Basis::X)?,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_model::NoiseModel;

    fn source(r: f64, v: f64, noise_model: NoiseModel) -> SourceParams {
        SourceParams {
            r,
            visibility: v,
            noise_model,
            pair_rate_hz: 0.0,
        }
    }

    #[test]
    fn pure_maximal_state() {
        for b in [Basis::Z, Basis::X] {
            let v = basis_visibility(&source(1.0, 1.0, NoiseModel::CoherenceDamping), b).unwrap();
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coherence_damping_hits_x_only() {
        let s = source(1.0, 0.9678, NoiseModel::CoherenceDamping);
        assert_eq!(basis_visibility(&s, Basis::Z).unwrap(), 1.0);
        assert!((basis_visibility(&s, Basis::X).unwrap() - 0.9678).abs() < 1e-12);
    }

    #[test]
    fn white_noise_matches_dense_oracle() {
        // Dense evaluation of tr(rho P_a ⊗ P_b) for rho = V |psi><psi| + (1 - V) I/4.
        let v = 0.9;
        let psi = [
            0.0,
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
            0.0,
        ];
        let prob = |a: f64, b: f64| {
            let (a, b) = (a.to_radians(), b.to_radians());
            let va = [a.cos(), a.sin()];
            let vb = [b.cos(), b.sin()];
            let ket = [va[0] * vb[0], va[0] * vb[1], va[1] * vb[0], va[1] * vb[1]];
            let overlap: f64 = ket.iter().zip(&psi).map(|(x, y)| x * y).sum();
            v * overlap * overlap + (1.0 - v) / 4.0
        };
        for (basis, t) in [(Basis::Z, 0.0), (Basis::X, 45.0)] {
            let par = prob(t, t) + prob(t + 90.0, t + 90.0);
            let cross = prob(t, t + 90.0) + prob(t + 90.0, t);
            let oracle = (par - cross).abs() / (par + cross);
            let got = basis_visibility(&source(1.0, v, NoiseModel::WhiteNoise), basis).unwrap();
            assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
            assert!((got - v).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_visibility() {
        let s = source(1.0, 1.0, NoiseModel::CoherenceDamping);
        let dead = ArmParams::with_efficiency(0.0);
        assert!(matches!(
            basis_visibility_with_arms(&s, &dead, &dead, Basis::Z),
            Err(Error::DegenerateVisibility)
        ));
    }

    #[test]
    fn efficiency_scaling_cancels() {
        let s = source(0.4, 0.93, NoiseModel::WhiteNoise);
        for basis in [Basis::Z, Basis::X] {
            let base = basis_visibility(&s, basis).unwrap();
            for c in [0.1, 0.5, 0.77] {
                let arm = ArmParams::with_efficiency(c);
                let scaled = basis_visibility_with_arms(&s, &arm, &arm, basis).unwrap();
                assert!((scaled - base).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn feasibility_examples() {
        let r = feasibility(0.7246, 0.7812).unwrap();
        assert!(r.feasible_1sdi_alice_side && r.feasible_1sdi_bob_side);
        assert!(!r.feasible_di);
        let r = feasibility(1.0, 1.0).unwrap();
        assert!(r.feasible_di && r.feasible_1sdi_alice_side && r.feasible_1sdi_bob_side);
        let r = feasibility(0.5, 0.5).unwrap();
        assert!(!r.feasible_di && !r.feasible_1sdi_alice_side && !r.feasible_1sdi_bob_side);
        assert!(feasibility(1.1, 0.5).is_err());
        assert!(feasibility(0.5, -0.1).is_err());
    }

    #[test]
    fn feasibility_is_monotone() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let score =
            |r: &FeasibilityReport| [r.feasible_di, r.feasible_1sdi_alice_side, r.feasible_1sdi_bob_side].map(u8::from);
        for &b in &grid {
            for w in grid.windows(2) {
                let lo = score(&feasibility(w[0], b).unwrap());
                let hi = score(&feasibility(w[1], b).unwrap());
                assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h));
                let lo = score(&feasibility(b, w[0]).unwrap());
                let hi = score(&feasibility(b, w[1]).unwrap());
                assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h));
            }
        }
    }
}
