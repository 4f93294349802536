//! Closed-form quantum predictions for lossy polarization measurements on
//! photon pairs.
//!
//! Two-photon amplitudes and matrices use the basis order `HH, HV, VH, VV`
//! with Alice in the first slot. An analyzer at angle `α` projects onto
//! `cos α |H⟩ + sin α |V⟩` (the ordinary port); the extraordinary port is the
//! orthogonal projector at `α + 90°`.

use nalgebra::{Complex, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::counting::{FullCountsF64, SettingPair, SettingsQuad};
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Tolerance for algebraic identities (normalization, hermiticity, trace).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Lowest eigenvalue accepted for a density matrix.
pub const EIGEN_TOL: f64 = 1e-10;

const NS_PER_S: f64 = 1e-9;

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::param(name, format!("{x} not in [0, 1]")))
    }
}

fn check_non_negative(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{x} must be finite and >= 0")))
    }
}

/// Single-photon rotation `R(θ)` on `(H, V)`, mapping `|α⟩` to `|α + θ⟩`.
fn rotation(theta_rad: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta_rad.sin_cos();
    [[c, -s], [s, c]]
}

fn two_photon_rotation(theta_rad: f64) -> Matrix4<C64> {
    let r = rotation(theta_rad);
    Matrix4::from_fn(|row, col| {
        let (i, j) = (row / 2, row % 2);
        let (k, l) = (col / 2, col % 2);
        C64::new(r[i][k] * r[j][l], 0.0)
    })
}

/// Pure two-photon polarization state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    amps: [C64; 4],
}

impl PureState {
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::param("amplitudes", format!("squared norm {norm} != 1")));
        }
        Ok(Self { amps })
    }

    /// Amplitudes in `HH, HV, VH, VV` order.
    pub fn amplitudes(&self) -> [C64; 4] {
        self.amps
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = Vector4::from(self.amps);
        DensityMatrix(v * v.adjoint())
    }

    /// Applies the same polarization rotation by `theta_deg` to both photons.
    pub fn rotated(&self, theta_deg: f64) -> PureState {
        let v = two_photon_rotation(theta_deg.to_radians()) * Vector4::from(self.amps);
        PureState {
            amps: [v[0], v[1], v[2], v[3]],
        }
    }
}

/// The non-maximally entangled family `(|HV⟩ + r|VH⟩)/√(1 + r²)`, `0 < r ≤ 1`.
pub fn make_state(r: f64) -> Result<PureState> {
    if !(r.is_finite() && r > 0.0 && r <= 1.0) {
        return Err(Error::param("r", format!("{r} not in (0, 1]")));
    }
    let norm = (1.0 + r * r).sqrt();
    let zero = C64::new(0.0, 0.0);
    Ok(PureState {
        amps: [zero, C64::new(1.0 / norm, 0.0), C64::new(r / norm, 0.0), zero],
    })
}

/// A validated 4×4 two-photon density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix4<C64>);

impl DensityMatrix {
    /// Checks hermiticity, unit trace and positivity.
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(herm <= ALGEBRA_TOL) {
            return Err(Error::param("rho", format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > ALGEBRA_TOL || tr.im.abs() > ALGEBRA_TOL {
            return Err(Error::param("rho", format!("trace {tr} != 1")));
        }
        let rho = DensityMatrix(m);
        let min = rho.min_eigenvalue();
        if min < -EIGEN_TOL {
            return Err(Error::param("rho", format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `U ρ U†` for the same polarization rotation on both photons.
    pub fn rotated(&self, theta_deg: f64) -> DensityMatrix {
        let u = two_photon_rotation(theta_deg.to_radians());
        DensityMatrix(u * self.0 * u.adjoint())
    }

    /// `⟨a b|ρ|a b⟩` for real single-photon vectors `a`, `b`.
    fn product_expectation(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let v = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += v[i] * v[j] * self.0[(i, j)].re;
            }
        }
        acc
    }

    /// Single-photon reduced density matrix for one side.
    fn reduced(&self, side: Side) -> [[C64; 2]; 2] {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for t in 0..2 {
                    let (a, b) = match side {
                        Side::A => (2 * i + t, 2 * j + t),
                        Side::B => (2 * t + i, 2 * t + j),
                    };
                    *cell += self.0[(a, b)];
                }
            }
        }
        out
    }
}

/// How a finite visibility degrades the pure state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// Off-diagonal entries in the `H/V` product basis are scaled by `V`.
    #[default]
    CoherenceDamping,
    /// `V |ψ⟩⟨ψ| + (1 - V) I/4`.
    WhiteNoise,
}

pub fn apply_noise(state: &PureState, visibility: f64, model: NoiseModel) -> Result<DensityMatrix> {
    check_unit("visibility", visibility)?;
    DensityMatrix::new(noisy_matrix(state, visibility, model))
}

fn noisy_matrix(state: &PureState, visibility: f64, model: NoiseModel) -> Matrix4<C64> {
    let pure = state.projector().0;
    match model {
        NoiseModel::CoherenceDamping => Matrix4::from_fn(|i, j| {
            if i == j {
                pure[(i, j)]
            } else {
                pure[(i, j)] * visibility
            }
        }),
        NoiseModel::WhiteNoise => {
            pure * C64::new(visibility, 0.0) + Matrix4::identity() * C64::new((1.0 - visibility) / 4.0, 0.0)
        }
    }
}

/// Noisy state of the `r` family without validation, for inner loops whose
/// parameters were checked up front. `r = 0` is allowed here.
pub(crate) fn family_density_unchecked(r: f64, visibility: f64, model: NoiseModel) -> DensityMatrix {
    let norm = (1.0 + r * r).sqrt();
    let zero = C64::new(0.0, 0.0);
    let state = PureState {
        amps: [zero, C64::new(1.0 / norm, 0.0), C64::new(r / norm, 0.0), zero],
    };
    DensityMatrix(noisy_matrix(&state, visibility, model))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    pub r: f64,
    pub visibility: f64,
    #[serde(default)]
    pub noise_model: NoiseModel,
    pub pair_rate_hz: f64,
}

impl SourceParams {
    pub fn new(r: f64, visibility: f64, noise_model: NoiseModel, pair_rate_hz: f64) -> Result<Self> {
        let s = Self {
            r,
            visibility,
            noise_model,
            pair_rate_hz,
        };
        s.validate()?;
        Ok(s)
    }

    /// Noise-free source for state parameter `r`, zero pair rate.
    pub fn ideal(r: f64) -> Self {
        Self {
            r,
            visibility: 1.0,
            noise_model: NoiseModel::CoherenceDamping,
            pair_rate_hz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        make_state(self.r)?;
        check_unit("visibility", self.visibility)?;
        check_non_negative("pair_rate_hz", self.pair_rate_hz)
    }

    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        apply_noise(&make_state(self.r)?, self.visibility, self.noise_model)
    }
}

/// Loss and background of one measurement arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmParams {
    /// Detection efficiency of the ordinary port (the arm efficiency).
    pub eta_o: f64,
    /// Detection efficiency of the extraordinary port; 0 for a blocked port.
    #[serde(default)]
    pub eta_e: f64,
    #[serde(default)]
    pub background_rate_hz: f64,
}

impl ArmParams {
    pub fn new(eta_o: f64, eta_e: f64, background_rate_hz: f64) -> Result<Self> {
        let a = Self {
            eta_o,
            eta_e,
            background_rate_hz,
        };
        a.validate()?;
        Ok(a)
    }

    /// Ordinary port only, no background.
    pub fn with_efficiency(eta_o: f64) -> Self {
        Self {
            eta_o,
            eta_e: 0.0,
            background_rate_hz: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("eta_o", self.eta_o)?;
        check_unit("eta_e", self.eta_e)?;
        check_non_negative("background_rate_hz", self.background_rate_hz)
    }
}

/// Polarization analyzer angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnalyzerAngle(f64);

impl AnalyzerAngle {
    pub fn deg(angle_deg: f64) -> Self {
        Self(angle_deg)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0.to_radians()
    }

    pub fn offset(self, delta_deg: f64) -> Self {
        Self(self.0 + delta_deg)
    }

    fn ordinary(self) -> [f64; 2] {
        let (s, c) = self.radians().sin_cos();
        [c, s]
    }

    fn extraordinary(self) -> [f64; 2] {
        let (s, c) = self.radians().sin_cos();
        [-s, c]
    }

    pub fn validate(self) -> Result<()> {
        if self.0.is_finite() {
            Ok(())
        } else {
            Err(Error::param("angle", "must be finite"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    O = 0,
    E = 1,
    U = 2,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::O, Outcome::E, Outcome::U];
}

/// Joint probabilities over `{o, e, u}²`, indexed `[alice][bob]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution {
    pub p: [[f64; 3]; 3],
}

impl OutcomeDistribution {
    pub fn get(&self, alice: Outcome, bob: Outcome) -> f64 {
        self.p[alice as usize][bob as usize]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    pub fn alice_marginal(&self) -> [f64; 3] {
        self.p.map(|row| row.iter().sum())
    }

    pub fn bob_marginal(&self) -> [f64; 3] {
        let mut m = [0.0; 3];
        for row in &self.p {
            for (acc, x) in m.iter_mut().zip(row) {
                *acc += x;
            }
        }
        m
    }

    /// Flattened row-major cumulative sums, used for sampling.
    pub(crate) fn cumulative(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        let mut acc = 0.0;
        for (i, x) in self.p.iter().flatten().enumerate() {
            acc += x;
            out[i] = acc;
        }
        out
    }
}

/// Port-resolved detection: a photon leaving port `k` is recorded as `k` with
/// the port efficiency and as `u` otherwise.
fn port_transfer(arm: &ArmParams) -> [[f64; 3]; 2] {
    [[arm.eta_o, 0.0, 1.0 - arm.eta_o], [0.0, arm.eta_e, 1.0 - arm.eta_e]]
}

/// Outcome distribution of an arbitrary two-photon state.
pub fn outcome_distribution(
    rho: &DensityMatrix,
    arm_a: &ArmParams,
    arm_b: &ArmParams,
    alpha: AnalyzerAngle,
    beta: AnalyzerAngle,
) -> OutcomeDistribution {
    let ports_a = [alpha.ordinary(), alpha.extraordinary()];
    let ports_b = [beta.ordinary(), beta.extraordinary()];
    let ta = port_transfer(arm_a);
    let tb = port_transfer(arm_b);
    let mut p = [[0.0; 3]; 3];
    for (ka, va) in ports_a.iter().enumerate() {
        for (kb, vb) in ports_b.iter().enumerate() {
            let q = rho.product_expectation(*va, *vb);
            for x in 0..3 {
                for y in 0..3 {
                    p[x][y] += q * ta[ka][x] * tb[kb][y];
                }
            }
        }
    }
    OutcomeDistribution { p }
}

/// Pair-physics outcome distribution (background is not included).
pub fn joint_outcome_distribution(
    source: &SourceParams,
    arm_a: &ArmParams,
    arm_b: &ArmParams,
    alpha: AnalyzerAngle,
    beta: AnalyzerAngle,
) -> Result<OutcomeDistribution> {
    arm_a.validate()?;
    arm_b.validate()?;
    alpha.validate()?;
    beta.validate()?;
    Ok(outcome_distribution(
        &source.density_matrix()?,
        arm_a,
        arm_b,
        alpha,
        beta,
    ))
}

/// Probability that a produced pair yields an ordinary-port detection on `side`.
pub fn singles_probability_from(rho: &DensityMatrix, arm: &ArmParams, angle: AnalyzerAngle, side: Side) -> f64 {
    let red = rho.reduced(side);
    let v = angle.ordinary();
    let mut q = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            q += v[i] * v[j] * red[i][j].re;
        }
    }
    arm.eta_o * q
}

pub fn singles_probability(source: &SourceParams, arm: &ArmParams, angle: AnalyzerAngle, side: Side) -> Result<f64> {
    arm.validate()?;
    angle.validate()?;
    Ok(singles_probability_from(&source.density_matrix()?, arm, angle, side))
}

/// Measurement length and coincidence window for expected-count predictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exposure {
    pub pairs_per_setting: f64,
    pub duration_s: f64,
    pub window_ns: u64,
}

/// Expectation values of the count tables for one four-setting run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCounts {
    pub c_oo_11: f64,
    pub s_a_1: f64,
    pub c_oo_12: f64,
    pub s_b_1: f64,
    pub c_oo_21: f64,
    pub c_oo_22: f64,
    /// Pair-only outcome tables (no background), `N · p[k][l]`.
    pub full: FullCountsF64,
}

impl ExpectedCounts {
    pub fn j(&self) -> f64 {
        -self.c_oo_11 + self.s_a_1 - self.c_oo_12 + self.s_b_1 - self.c_oo_21 + self.c_oo_22
    }
}

/// Expected singles and coincidences, including background singles and
/// first-order accidental coincidences `2 τ T r_A r_B`.
pub fn expected_counts(
    source: &SourceParams,
    arm_a: &ArmParams,
    arm_b: &ArmParams,
    settings: &SettingsQuad,
    exposure: Exposure,
) -> Result<ExpectedCounts> {
    check_non_negative("pairs_per_setting", exposure.pairs_per_setting)?;
    check_non_negative("duration_s", exposure.duration_s)?;
    arm_a.validate()?;
    arm_b.validate()?;
    settings.validate()?;
    let rho = source.density_matrix()?;
    let n = exposure.pairs_per_setting;
    let t = exposure.duration_s;
    let tau = exposure.window_ns as f64 * NS_PER_S;

    let singles = |arm: &ArmParams, angle, side| {
        n * singles_probability_from(&rho, arm, angle, side) + arm.background_rate_hz * t
    };

    let mut full = FullCountsF64::default();
    let mut coinc = [0.0; 4];
    for pair in SettingPair::ALL {
        let (alpha, beta) = settings.angles(pair);
        let dist = outcome_distribution(&rho, arm_a, arm_b, alpha, beta);
        full.tables[pair as usize] = dist.p.map(|row| row.map(|x| x * n));
        let accidental = if t > 0.0 {
            let ra = singles(arm_a, alpha, Side::A) / t;
            let rb = singles(arm_b, beta, Side::B) / t;
            2.0 * tau * t * ra * rb
        } else {
            0.0
        };
        coinc[pair as usize] = n * dist.get(Outcome::O, Outcome::O) + accidental;
    }

    Ok(ExpectedCounts {
        c_oo_11: coinc[SettingPair::A1B1 as usize],
        s_a_1: singles(arm_a, settings.alpha1, Side::A),
        c_oo_12: coinc[SettingPair::A1B2 as usize],
        s_b_1: singles(arm_b, settings.beta1, Side::B),
        c_oo_21: coinc[SettingPair::A2B1 as usize],
        c_oo_22: coinc[SettingPair::A2B2 as usize],
        full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn make_state_maximal() {
        let s = make_state(1.0).unwrap().amplitudes();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        approx(s[0].re, 0.0, 0.0);
        approx(s[1].re, h, 1e-15);
        approx(s[2].re, h, 1e-15);
        approx(s[3].re, 0.0, 0.0);
    }

    #[test]
    fn make_state_paper_r() {
        // 1/sqrt(1 + 0.297^2) and 0.297 times that, evaluated to 16 digits.
        let s = make_state(0.297).unwrap().amplitudes();
        approx(s[1].re, 0.958_614_167_704_264, 1e-12);
        approx(s[2].re, 0.284_708_407_808_166_4, 1e-12);
        assert_eq!(s[0], C64::new(0.0, 0.0));
        assert_eq!(s[3], C64::new(0.0, 0.0));
    }

    #[test]
    fn make_state_rejects_out_of_range() {
        for r in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(make_state(r), Err(Error::InvalidParameter { name: "r", .. })));
        }
    }

    #[test]
    fn noise_identity_and_full_dephasing() {
        let psi = make_state(0.4).unwrap();
        for model in [NoiseModel::CoherenceDamping, NoiseModel::WhiteNoise] {
            let rho = apply_noise(&psi, 1.0, model).unwrap();
            assert_eq!(rho, psi.projector());
        }
        let rho = apply_noise(&make_state(1.0).unwrap(), 0.0, NoiseModel::CoherenceDamping).unwrap();
        let m = rho.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j && (i == 1 || i == 2) { 0.5 } else { 0.0 };
                approx(m[(i, j)].re, expect, 1e-15);
                approx(m[(i, j)].im, 0.0, 0.0);
            }
        }
    }

    #[test]
    fn density_matrix_rejects_bad_input() {
        let mut m = Matrix4::<C64>::identity() * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let m = Matrix4::<C64>::identity() * C64::new(0.3, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let m = Matrix4::from_diagonal(&Vector4::new(
            C64::new(1.1, 0.0),
            C64::new(-0.1, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ));
        assert!(DensityMatrix::new(m).is_err());
        assert!(apply_noise(&make_state(1.0).unwrap(), 1.2, NoiseModel::WhiteNoise).is_err());
    }

    #[test]
    fn joint_examples() {
        let src = SourceParams::ideal(1.0);
        let arm = ArmParams::with_efficiency(1.0);
        let d = joint_outcome_distribution(&src, &arm, &arm, AnalyzerAngle::deg(0.0), AnalyzerAngle::deg(0.0)).unwrap();
        approx(d.get(Outcome::O, Outcome::O), 0.0, 1e-15);
        let d =
            joint_outcome_distribution(&src, &arm, &arm, AnalyzerAngle::deg(0.0), AnalyzerAngle::deg(90.0)).unwrap();
        approx(d.get(Outcome::O, Outcome::O), 0.5, 1e-15);
    }

    #[test]
    fn singles_examples() {
        let src = SourceParams::ideal(1.0);
        let arm = ArmParams::with_efficiency(1.0);
        for a in [0.0, 17.0, 45.0, 123.4] {
            let p = singles_probability(&src, &arm, AnalyzerAngle::deg(a), Side::A).unwrap();
            approx(p, 0.5, 1e-15);
        }
        let src = SourceParams::ideal(0.297);
        let p = singles_probability(&src, &arm, AnalyzerAngle::deg(0.0), Side::A).unwrap();
        approx(p, 1.0 / (1.0 + 0.297 * 0.297), 1e-15);
        approx(p, 0.918_941_122_523_338_8, 1e-12);
        let dead = ArmParams::with_efficiency(0.0);
        assert_eq!(
            singles_probability(&src, &dead, AnalyzerAngle::deg(30.0), Side::B).unwrap(),
            0.0
        );
    }

    #[test]
    fn efficiency_scales_rows() {
        let src = SourceParams {
            r: 0.35,
            visibility: 0.93,
            noise_model: NoiseModel::WhiteNoise,
            pair_rate_hz: 0.0,
        };
        let b = ArmParams::new(0.8, 0.4, 0.0).unwrap();
        let (alpha, beta) = (AnalyzerAngle::deg(12.0), AnalyzerAngle::deg(-40.0));
        let base = joint_outcome_distribution(&src, &ArmParams::new(0.9, 0.3, 0.0).unwrap(), &b, alpha, beta).unwrap();
        let half = joint_outcome_distribution(&src, &ArmParams::new(0.45, 0.3, 0.0).unwrap(), &b, alpha, beta).unwrap();
        approx(half.alice_marginal()[0], 0.5 * base.alice_marginal()[0], 1e-15);
    }

    #[test]
    fn expected_counts_zero_and_lossless() {
        let quad = SettingsQuad::from_degrees(0.0, 90.0, 0.0, 90.0);
        let arm = ArmParams::with_efficiency(1.0);
        let zero = expected_counts(
            &SourceParams::ideal(1.0),
            &arm,
            &arm,
            &quad,
            Exposure {
                pairs_per_setting: 0.0,
                duration_s: 10.0,
                window_ns: 1000,
            },
        )
        .unwrap();
        assert_eq!(zero.j(), 0.0);
        assert!(zero.full.tables.iter().flatten().flatten().all(|&x| x == 0.0));

        // alpha1 = 0, beta2 = 90: C_oo(α1, β2) = N/2 and S_A(α1) = N/2.
        let n = 1000.0;
        let c = expected_counts(
            &SourceParams::ideal(1.0),
            &arm,
            &arm,
            &quad,
            Exposure {
                pairs_per_setting: n,
                duration_s: 0.0,
                window_ns: 1000,
            },
        )
        .unwrap();
        approx(c.c_oo_12, n / 2.0, 1e-12);
        approx(c.s_a_1, n / 2.0, 1e-12);
    }

    #[test]
    fn accidentals_first_order() {
        let quad = SettingsQuad::from_degrees(0.0, 90.0, 0.0, 90.0);
        let arm = ArmParams::new(0.0, 0.0, 1000.0).unwrap();
        let c = expected_counts(
            &SourceParams::ideal(1.0),
            &arm,
            &arm,
            &quad,
            Exposure {
                pairs_per_setting: 0.0,
                duration_s: 2.0,
                window_ns: 100,
            },
        )
        .unwrap();
        approx(c.s_a_1, 2000.0, 1e-9);
        approx(c.c_oo_11, 2.0 * 100e-9 * 2.0 * 1e6, 1e-9);
    }
}
