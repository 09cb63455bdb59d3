//! Exact statistics of a single interferer.
//!
//! The received power of one interferer is `I = B * exp(X) * r^-gamma` with
//! `X ~ Normal(0, sigma_x^2)` and `r` drawn from the annulus density
//! `f(r) = 2r / (R^2 - R0^2)`. Conditioning on the shadowing exponent and
//! integrating the annulus CDF gives a closed form for `F_I(x)` in terms of
//! the standard Gaussian CDF evaluated at
//!
//! ```text
//! w0 = ln((B/x) * R^-gamma),   w1 = ln((B/x) * R0^-gamma)
//! ```
//!
//! The same closed form doubles as the CDF of the desired signal (same
//! functional shape, different scale and outer radius), which is how
//! transmit powers are calibrated to an area-reliability target by monotone
//! bisection on the scale.
//!
//! Moments come out of the factorization `E(I^j) = B^j E(e^jX) E(r^-j*gamma)`;
//! matching the first two to a lognormal (Fenton-Wilkinson) provably inflates
//! the third moment by a factor of order `R^2`, which is the quantitative
//! argument against lognormal fits of this interference.

use crate::error::{Error, Result};
use crate::scenario::{db_to_linear, Geometry, PropagationEnv};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Standard Gaussian CDF via the complementary error function.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// `Phi(b) - Phi(a)` for `a <= b` without cancellation in the tails.
///
/// Both one-sided tails are computed from same-sign erfc values, so the
/// difference keeps full relative precision even when both arguments sit
/// far out in the same tail.
fn std_normal_cdf_diff(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if a >= 0.0 {
        0.5 * (libm::erfc(a / SQRT_2) - libm::erfc(b / SQRT_2))
    } else if b <= 0.0 {
        0.5 * (libm::erfc(-b / SQRT_2) - libm::erfc(-a / SQRT_2))
    } else {
        1.0 - 0.5 * (libm::erfc(b / SQRT_2) + libm::erfc(-a / SQRT_2))
    }
}

/// Integration bounds of the single-interferer CDF kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleCdfTerms {
    /// Linear ratio `B / x`.
    pub y: f64,
    /// Lower bound `ln(y * R^-gamma)`.
    pub w0: f64,
    /// Upper bound `ln(y * R0^-gamma)`.
    pub w1: f64,
}

impl SingleCdfTerms {
    pub fn new(x: f64, env: &PropagationEnv, geom: &Geometry, scale: f64) -> Result<Self> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("power {x} must be > 0")));
        }
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("scale {scale} must be > 0")));
        }
        let y = scale / x;
        let g = env.path_loss_exponent;
        // ln(y) + g*ln(1/R) evaluated in log space so extreme ratios stay finite.
        let w0 = y.ln() - g * geom.outer_radius_m.ln();
        let w1 = y.ln() - g * geom.inner_radius_m.ln();
        Ok(Self { y, w0, w1 })
    }
}

/// Rounding slack tolerated before clamping the closed form into [0, 1].
const CDF_CLAMP_TOL: f64 = 1e-12;

/// Closed-form CDF of a single interferer, `P(I < x)`.
///
/// Excursions beyond [0, 1] of at most `1e-12` are clamped; anything larger
/// is reported as an internal-consistency error rather than hidden.
pub fn single_interferer_cdf(
    x: f64,
    env: &PropagationEnv,
    geom: &Geometry,
    scale: f64,
) -> Result<f64> {
    let terms = SingleCdfTerms::new(x, env, geom, scale)?;
    let r = geom.outer_radius_m;
    let r0 = geom.inner_radius_m;
    let area = r * r - r0 * r0;
    let g = env.path_loss_exponent;
    let sx = env.shadow_sigma_ln;

    if sx == 0.0 {
        // No shadowing: I = B r^-gamma, so F(x) = P(r > (B/x)^(1/gamma)).
        let t2 = (terms.y.ln() * 2.0 / g).exp(); // (B/x)^(2/gamma)
        return Ok(((r * r - t2) / area).clamp(0.0, 1.0));
    }

    let tail = 1.0 - std_normal_cdf(terms.w1 / sx);
    let body = std_normal_cdf_diff(terms.w0 / sx, terms.w1 / sx);
    let shift = 2.0 * sx * sx / g;
    let shifted = std_normal_cdf_diff((terms.w0 + shift) / sx, (terms.w1 + shift) / sx);
    // y^(2/gamma) in log space; the shifted-Gaussian mass decays fast enough
    // that the product stays finite wherever the mass is nonzero.
    let y_pow = (terms.y.ln() * 2.0 / g).exp();
    let value = tail + (r * r * body - y_pow * (shift / g).exp() * shifted) / area;

    if !(-CDF_CLAMP_TOL..=1.0 + CDF_CLAMP_TOL).contains(&value) {
        return Err(Error::Inconsistency(format!(
            "closed-form CDF {value} outside [0, 1] beyond tolerance at x = {x}"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Exact annulus distance moment `E(r^(-k*gamma))`.
///
/// The formula has a removable singularity at `k*gamma = 2`, handled by the
/// analytic logarithmic limit rather than by nudging the exponent.
pub fn distance_moment(k: u32, env: &PropagationEnv, geom: &Geometry) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let r = geom.outer_radius_m;
    let r0 = geom.inner_radius_m;
    let area = r * r - r0 * r0;
    let s = 2.0 - f64::from(k) * env.path_loss_exponent;
    let log_ratio = (r / r0).ln();
    if s == 0.0 {
        2.0 * log_ratio / area
    } else {
        // r^s - r0^s = r0^s * expm1(s * ln(r/r0)), stable near the singularity.
        2.0 * (s * r0.ln()).exp() * f64::exp_m1(s * log_ratio) / (area * s)
    }
}

/// Large-`R` approximation `2 / (R^2 (k*gamma - 2))`; requires `k*gamma > 2`.
pub fn distance_moment_approx(k: u32, env: &PropagationEnv, geom: &Geometry) -> Result<f64> {
    let kg = f64::from(k) * env.path_loss_exponent;
    if kg <= 2.0 {
        return Err(Error::Domain(format!(
            "approximation needs k*gamma > 2, got {kg}"
        )));
    }
    let r = geom.outer_radius_m;
    Ok(2.0 / (r * r * (kg - 2.0)))
}

/// Exact interference moment `m_j = B^j exp(j^2 sigma_x^2 / 2) E(r^-j*gamma)`.
pub fn interference_moment(
    j: u32,
    env: &PropagationEnv,
    geom: &Geometry,
    scale: f64,
) -> Result<f64> {
    if !(1..=3).contains(&j) {
        return Err(Error::Domain(format!("moment order {j} outside 1..=3")));
    }
    let jf = f64::from(j);
    let sx = env.shadow_sigma_ln;
    Ok(scale.powi(j as i32) * (jf * jf * sx * sx / 2.0).exp() * distance_moment(j, env, geom))
}

/// First three moments of a single interferer plus its skewness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// Skewness of the interference implied by the three moments.
    pub skewness: f64,
}

impl MomentSet {
    /// Build from raw moments; rejects degenerate (zero-variance) inputs.
    pub fn from_raw(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let skewness = skewness_from_moments(m1, m2, m3)?;
        Ok(Self {
            m1,
            m2,
            m3,
            skewness,
        })
    }

    /// Exact moments of a single interferer in the given scenario.
    pub fn exact(env: &PropagationEnv, geom: &Geometry, scale: f64) -> Result<Self> {
        Self::from_raw(
            interference_moment(1, env, geom, scale)?,
            interference_moment(2, env, geom, scale)?,
            interference_moment(3, env, geom, scale)?,
        )
    }
}

/// Skewness `(m3 + 2 m1^3 - 3 m1 m2) / (m2 - m1^2)^(3/2)`.
pub fn skewness_from_moments(m1: f64, m2: f64, m3: f64) -> Result<f64> {
    let var = m2 - m1 * m1;
    if var <= 0.0 {
        return Err(Error::Degenerate(format!(
            "variance {var} must be positive for skewness"
        )));
    }
    Ok((m3 + 2.0 * m1 * m1 * m1 - 3.0 * m1 * m2) / var.powf(1.5))
}

/// Two-moment lognormal fit `Y = exp(Z)`, `Z ~ Normal(mu_z, sigma_z^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwFit {
    pub mu_z: f64,
    pub sigma_z2: f64,
    /// Third moment of the fitted lognormal, `(m2 / m1)^3`.
    pub third_moment: f64,
}

impl FwFit {
    /// `E(Y^k)` of the fitted lognormal.
    pub fn moment(&self, k: u32) -> f64 {
        let kf = f64::from(k);
        (kf * self.mu_z + kf * kf * self.sigma_z2 / 2.0).exp()
    }
}

/// Fit a lognormal to the first two moments.
pub fn fenton_wilkinson_fit(m1: f64, m2: f64) -> Result<FwFit> {
    if !(m1 > 0.0) {
        return Err(Error::Degenerate(format!("mean {m1} must be positive")));
    }
    if m2 <= m1 * m1 {
        return Err(Error::Degenerate(format!(
            "second moment {m2} <= squared mean; no lognormal matches"
        )));
    }
    let sigma_z2 = (m2 / (m1 * m1)).ln();
    let mu_z = m1.ln() - sigma_z2 / 2.0;
    let ratio = m2 / m1;
    Ok(FwFit {
        mu_z,
        sigma_z2,
        third_moment: ratio * ratio * ratio,
    })
}

/// Exact ratio of the fitted third moment to the true one.
///
/// The transmit scale and the lognormal factors cancel, leaving a pure
/// distance-moment ratio `(E(r^-2g)/E(r^-g))^3 / E(r^-3g)`.
pub fn skewness_ratio_exact(env: &PropagationEnv, geom: &Geometry) -> f64 {
    let e1 = distance_moment(1, env, geom);
    let e2 = distance_moment(2, env, geom);
    let e3 = distance_moment(3, env, geom);
    (e2 / e1).powi(3) / e3
}

/// Large-`R` asymptotic of the third-moment ratio,
/// `((g-2)/(2g-2))^3 * R^2 (3g-2) / 2`; requires `gamma > 2`.
pub fn skewness_ratio_asymptotic(env: &PropagationEnv, geom: &Geometry) -> Result<f64> {
    let g = env.path_loss_exponent;
    if g <= 2.0 {
        return Err(Error::Domain(format!(
            "asymptotic ratio needs gamma > 2, got {g}"
        )));
    }
    let r = geom.outer_radius_m;
    Ok(((g - 2.0) / (2.0 * g - 2.0)).powi(3) * r * r * (3.0 * g - 2.0) / 2.0)
}

/// Calibration accuracy on the CDF value at the threshold.
const CALIBRATION_TOL: f64 = 1e-9;
const CALIBRATION_MAX_ITERS: u32 = 200;

/// Solve for the transmit scale giving the requested area reliability.
///
/// Returns `A` such that the received power exceeds
/// `noise * 10^(snr_threshold_db/10)` with probability `reliability` over
/// random placement in the annulus `[R0, coverage_radius_m]` and shadowing.
/// The signal CDF is monotone in the scale, so bisection on `ln A` is exact.
pub fn calibrate_power(
    env: &PropagationEnv,
    geom: &Geometry,
    coverage_radius_m: f64,
    reliability: f64,
    snr_threshold_db: f64,
    noise: f64,
) -> Result<f64> {
    if !(reliability > 0.0 && reliability < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reliability {reliability} outside (0, 1)"
        )));
    }
    let link = Geometry::new(coverage_radius_m, geom.inner_radius_m, coverage_radius_m)?;
    let threshold = noise * db_to_linear(snr_threshold_db);
    let target = 1.0 - reliability;

    // F(threshold; A) is decreasing in A: find ln A bracketing the target.
    let f = |ln_a: f64| single_interferer_cdf(threshold, env, &link, ln_a.exp());
    let mut lo = threshold.ln();
    let mut hi = threshold.ln();
    let mut iters = 0u32;
    while f(lo)? < target {
        lo -= 8.0;
        iters += 1;
        if iters > CALIBRATION_MAX_ITERS {
            return Err(Error::Convergence("calibration bracket (low)".into()));
        }
    }
    while f(hi)? > target {
        hi += 8.0;
        iters += 1;
        if iters > CALIBRATION_MAX_ITERS {
            return Err(Error::Convergence("calibration bracket (high)".into()));
        }
    }

    for _ in 0..CALIBRATION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let v = f(mid)?;
        if (v - target).abs() < CALIBRATION_TOL {
            return Ok(mid.exp());
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence(format!(
        "calibration bisection did not reach |F - {target}| < {CALIBRATION_TOL}"
    )))
}
