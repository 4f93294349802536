//! State and analyzer-setting optimization for the Eberhard inequality.
//!
//! The objective is the predicted `J/N` for one produced pair per setting
//! combination. It is minimized over `(r, α1, α2, β1, β2)` by multistart
//! Nelder-Mead seeded from a coarse grid plus random points; the critical
//! symmetric efficiency is then found by bisection on the sign of the optimum.

mod nelder_mead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{SettingPair, SettingsQuad};
use crate::error::{Error, Result};
use crate::quantum_model::{
    family_density_unchecked, make_state, outcome_distribution, singles_probability_from, ArmParams, DensityMatrix,
    NoiseModel, Outcome, Side,
};

/// Violation threshold in `J/N` units used by [`critical_efficiency`].
pub const VIOLATION_EPS: f64 = 1e-6;

/// Smallest `r` reported by the optimizer.
pub const R_MIN: f64 = 1e-9;

/// Loss, background and noise of the modeled experiment.
///
/// Backgrounds are counts per produced pair (`rate × duration / N`), which
/// keeps the predicted `J/N` independent of `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JnModel {
    pub eta_a: f64,
    pub eta_b: f64,
    #[serde(default)]
    pub background_a: f64,
    #[serde(default)]
    pub background_b: f64,
    pub visibility: f64,
    #[serde(default)]
    pub noise_model: NoiseModel,
}

impl JnModel {
    pub fn symmetric(eta: f64, background: f64, visibility: f64) -> Self {
        Self {
            eta_a: eta,
            eta_b: eta,
            background_a: background,
            background_b: background,
            visibility,
            noise_model: NoiseModel::CoherenceDamping,
        }
    }

    /// Converts background rates to counts per produced pair.
    pub fn with_background_rates(mut self, rate_a_hz: f64, rate_b_hz: f64, pair_rate_hz: f64) -> Result<Self> {
        if !(pair_rate_hz > 0.0) {
            return Err(Error::param("pair_rate_hz", "must be > 0 to normalize background"));
        }
        self.background_a = rate_a_hz / pair_rate_hz;
        self.background_b = rate_b_hz / pair_rate_hz;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        ArmParams::new(self.eta_a, 0.0, self.background_a)?;
        ArmParams::new(self.eta_b, 0.0, self.background_b)?;
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::param("visibility", format!("{} not in [0, 1]", self.visibility)));
        }
        Ok(())
    }

    fn jn_for(&self, rho: &DensityMatrix, settings: &SettingsQuad) -> f64 {
        let arm_a = ArmParams::with_efficiency(self.eta_a);
        let arm_b = ArmParams::with_efficiency(self.eta_b);
        let coinc = |p: SettingPair| {
            let (a, b) = settings.angles(p);
            outcome_distribution(rho, &arm_a, &arm_b, a, b).get(Outcome::O, Outcome::O)
        };
        let s_a = singles_probability_from(rho, &arm_a, settings.alpha1, Side::A) + self.background_a;
        let s_b = singles_probability_from(rho, &arm_b, settings.beta1, Side::B) + self.background_b;
        -coinc(SettingPair::A1B1) + s_a - coinc(SettingPair::A1B2) + s_b - coinc(SettingPair::A2B1)
            + coinc(SettingPair::A2B2)
    }
}

/// Predicted `J/N` for state parameter `r` and the given settings, without
/// accidental coincidences.
pub fn predicted_jn(model: &JnModel, r: f64, settings: &SettingsQuad) -> Result<f64> {
    model.validate()?;
    settings.validate()?;
    make_state(r)?;
    let rho = family_density_unchecked(r, model.visibility, model.noise_model);
    Ok(model.jn_for(&rho, settings))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationProblem {
    pub model: JnModel,
    /// Restricts the search to a fixed state parameter.
    pub fix_r: Option<f64>,
    pub multistart_count: usize,
    /// Convergence tolerance on `J/N` for each local search.
    pub tolerance: f64,
    pub seed: u64,
}

impl OptimizationProblem {
    pub fn new(model: JnModel) -> Self {
        Self {
            model,
            fix_r: None,
            multistart_count: 16,
            tolerance: 1e-14,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if let Some(r) = self.fix_r {
            make_state(r)?;
        }
        if self.multistart_count < 1 {
            return Err(Error::param("multistart_count", "must be >= 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::param("tolerance", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub r_star: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub jn_star: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl OptimizationResult {
    pub fn settings(&self) -> SettingsQuad {
        SettingsQuad::from_degrees(self.alpha1, self.alpha2, self.beta1, self.beta2)
    }

    fn key(&self) -> [f64; 6] {
        [
            self.jn_star,
            self.r_star,
            self.alpha1,
            self.alpha2,
            self.beta1,
            self.beta2,
        ]
    }

    /// Lower `jn_star` wins; ties go to the lexicographically smaller point.
    fn better(self, other: Self) -> Self {
        let ord = self
            .key()
            .iter()
            .zip(other.key().iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal);
        let mut best = if ord.is_le() { self } else { other };
        best.evaluations = self.evaluations + other.evaluations;
        best
    }
}

/// Search coordinates: `x[0]` maps to `r = sin²(x[0])` (fixed when `fix_r`
/// is set), `x[1..5]` are the four angles in radians.
struct Objective<'a> {
    problem: &'a OptimizationProblem,
}

impl Objective<'_> {
    fn r_of(&self, x0: f64) -> f64 {
        self.problem.fix_r.unwrap_or_else(|| x0.sin().powi(2))
    }

    fn settings_of(x: &[f64]) -> SettingsQuad {
        SettingsQuad::from_degrees(
            x[1].to_degrees(),
            x[2].to_degrees(),
            x[3].to_degrees(),
            x[4].to_degrees(),
        )
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let m = &self.problem.model;
        let rho = family_density_unchecked(self.r_of(x[0]), m.visibility, m.noise_model);
        m.jn_for(&rho, &Self::settings_of(x))
    }

    /// Reports a point with `r` clamped to `[R_MIN, 1]` and angles wrapped
    /// to `(-90°, 90°]`, re-evaluated there.
    fn finish(&self, x: &[f64], evals: usize, converged: bool) -> OptimizationResult {
        let r = self.r_of(x[0]).clamp(R_MIN, 1.0);
        let wrap = |rad: f64| {
            let d = rad.to_degrees().rem_euclid(180.0);
            if d > 90.0 {
                d - 180.0
            } else {
                d
            }
        };
        let settings = SettingsQuad::from_degrees(wrap(x[1]), wrap(x[2]), wrap(x[3]), wrap(x[4]));
        let m = &self.problem.model;
        let rho = family_density_unchecked(r, m.visibility, m.noise_model);
        OptimizationResult {
            r_star: r,
            alpha1: settings.alpha1.degrees(),
            alpha2: settings.alpha2.degrees(),
            beta1: settings.beta1.degrees(),
            beta2: settings.beta2.degrees(),
            jn_star: m.jn_for(&rho, &settings),
            converged,
            evaluations: evals,
        }
    }
}

const GRID_R: [f64; 5] = [0.05, 0.15, 0.35, 0.7, 1.0];
const GRID_ANGLES_DEG: [f64; 6] = [0.0, 30.0, 60.0, 90.0, 120.0, 150.0];

/// Best `count` points of the coarse seeding grid.
fn grid_seeds(obj: &Objective, count: usize) -> (Vec<Vec<f64>>, usize) {
    let r_values: Vec<f64> = match obj.problem.fix_r {
        Some(_) => vec![0.0],
        None => GRID_R.iter().map(|r| r.sqrt().asin()).collect(),
    };
    let mut scored = Vec::new();
    for &x0 in &r_values {
        for &a1 in &GRID_ANGLES_DEG {
            for &a2 in &GRID_ANGLES_DEG {
                for &b1 in &GRID_ANGLES_DEG {
                    for &b2 in &GRID_ANGLES_DEG {
                        let x = vec![x0, a1.to_radians(), a2.to_radians(), b1.to_radians(), b2.to_radians()];
                        scored.push((obj.eval(&x), x));
                    }
                }
            }
        }
    }
    let evals = scored.len();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    (scored.into_iter().take(count).map(|(_, x)| x).collect(), evals)
}

fn local_search(obj: &Objective, start: &[f64], tol: f64) -> nelder_mead::Minimum {
    let mut opts = nelder_mead::Options {
        initial_step: 0.3,
        f_tol: tol,
        x_tol: 1e-7,
        max_evals: 8_000,
    };
    let f = |x: &[f64]| obj.eval(x);
    let mut best = nelder_mead::minimize(f, start, &opts);
    // Restart from the optimum with a smaller simplex until it stops improving.
    let mut evals = best.evals;
    for _ in 0..4 {
        opts.initial_step *= 0.3;
        let next = nelder_mead::minimize(f, &best.x, &opts);
        evals += next.evals;
        let improved = next.f < best.f - tol;
        if next.f <= best.f {
            best = nelder_mead::Minimum { evals, ..next };
        }
        if !improved {
            break;
        }
    }
    best.evals = evals;
    best
}

/// Multistart minimization of the predicted `J/N`. Deterministic in
/// `problem.seed`.
pub fn optimize(problem: &OptimizationProblem) -> Result<OptimizationResult> {
    problem.validate()?;
    let obj = Objective { problem };
    let n_grid = problem.multistart_count.div_ceil(2);
    let (mut starts, grid_evals) = grid_seeds(&obj, n_grid);
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    while starts.len() < problem.multistart_count {
        let mut x = vec![rng.random_range(0.0..std::f64::consts::FRAC_PI_2)];
        x.extend((0..4).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)));
        starts.push(x);
    }

    let best = starts
        .par_iter()
        .map(|x0| {
            let m = local_search(&obj, x0, problem.tolerance);
            obj.finish(&m.x, m.evals, m.converged)
        })
        .reduce_with(OptimizationResult::better)
        .expect("at least one start");
    Ok(OptimizationResult {
        evaluations: best.evaluations + grid_evals,
        ..best
    })
}

/// Symmetric-efficiency search configuration for [`critical_efficiency`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdQuery {
    /// Background counts per produced pair, each arm.
    pub background: f64,
    pub visibility: f64,
    pub noise_model: NoiseModel,
    pub fix_r: Option<f64>,
    /// Bisection stops when the bracket is narrower than this.
    pub tolerance: f64,
    pub seed: u64,
}

impl ThresholdQuery {
    pub fn new(background: f64, visibility: f64) -> Self {
        Self {
            background,
            visibility,
            noise_model: NoiseModel::CoherenceDamping,
            fix_r: None,
            tolerance: 1e-3,
            seed: 42,
        }
    }
}

fn violates(q: &ThresholdQuery, eta: f64) -> Result<bool> {
    let mut model = JnModel::symmetric(eta, q.background, q.visibility);
    model.noise_model = q.noise_model;
    let problem = OptimizationProblem {
        fix_r: q.fix_r,
        seed: q.seed,
        ..OptimizationProblem::new(model)
    };
    Ok(optimize(&problem)?.jn_star < -VIOLATION_EPS)
}

/// Lowest symmetric arm efficiency at which the optimized `J/N` drops below
/// `-VIOLATION_EPS`, by bisection over `[0, 1]`.
pub fn critical_efficiency(query: &ThresholdQuery) -> Result<f64> {
    if !(query.tolerance > 0.0) {
        return Err(Error::param("tolerance", "must be > 0"));
    }
    if violates(query, 0.0)? {
        return Err(Error::Boundary("violation already at zero efficiency".into()));
    }
    if !violates(query, 1.0)? {
        return Err(Error::Boundary("no violation even at unit efficiency".into()));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > query.tolerance {
        let mid = 0.5 * (lo + hi);
        if violates(query, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Re-expresses `settings` after rotating the state basis by `theta_deg`;
/// used to check rotation covariance of the model.
pub fn jn_rotated(model: &JnModel, r: f64, settings: &SettingsQuad, theta_deg: f64) -> Result<f64> {
    model.validate()?;
    let rho = crate::quantum_model::SourceParams {
        r,
        visibility: model.visibility,
        noise_model: model.noise_model,
        pair_rate_hz: 0.0,
    }
    .density_matrix()?
    .rotated(theta_deg);
    Ok(model.jn_for(&rho, &settings.offset(theta_deg)))
}
