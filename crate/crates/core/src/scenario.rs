//! Scenario description and seeded random sampling.
//!
//! A scenario is a primary receiver at the center of an annulus of outer
//! radius `R` and inner radius `R0`. The primary transmitter and every
//! cognitive radio (CR) are placed uniformly in that annulus, so all received
//! powers depend only on radial distance. Each link sees path loss `r^-gamma`
//! and lognormal shadowing `exp(X)` with `X ~ Normal(0, sigma_x^2)`, where
//! `sigma_x` converts the usual dB spread via `ln(10)/10`.
//!
//! All powers are linear and normalized to a unit noise floor; dB values are
//! `10*log10` of linear ratios and appear only at I/O boundaries.
//!
//! Sampling is driven by counter-based substreams derived from a single
//! master seed, one stream per (replication, purpose). Every draw for a
//! replication is therefore independent of evaluation order and worker
//! count, which is what makes parallel Monte Carlo runs reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};

use crate::error::{Error, Result};

/// dB-to-natural-log conversion constant, `ln(10)/10`.
pub const DB_TO_LN: f64 = std::f64::consts::LN_10 / 10.0;

/// Convert a dB value to a linear power ratio.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear power ratio to dB.
#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Path-loss exponent and shadowing spread for one propagation environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationEnv {
    /// Path-loss exponent, dimensionless.
    pub path_loss_exponent: f64,
    /// Shadowing standard deviation in dB.
    pub shadow_sigma_db: f64,
    /// Shadowing standard deviation of the natural-log Gaussian exponent.
    pub shadow_sigma_ln: f64,
    /// The dB-to-natural-log constant `ln(10)/10` used for the conversion.
    pub db_to_ln: f64,
}

impl PropagationEnv {
    /// Path-loss exponents outside [2, 6] are rejected; `sigma_db` must be
    /// nonnegative. `shadow_sigma_ln` is derived exactly as
    /// `DB_TO_LN * sigma_db`.
    pub fn new(path_loss_exponent: f64, shadow_sigma_db: f64) -> Result<Self> {
        if !(2.0..=6.0).contains(&path_loss_exponent) {
            return Err(Error::InvalidParameter(format!(
                "path loss exponent {path_loss_exponent} outside [2, 6]"
            )));
        }
        if !shadow_sigma_db.is_finite() || shadow_sigma_db < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "shadowing sigma {shadow_sigma_db} dB must be finite and >= 0"
            )));
        }
        Ok(Self {
            path_loss_exponent,
            shadow_sigma_db,
            shadow_sigma_ln: DB_TO_LN * shadow_sigma_db,
            db_to_ln: DB_TO_LN,
        })
    }
}

/// Annulus geometry around the primary receiver, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Outer radius of the primary coverage area.
    pub outer_radius_m: f64,
    /// Inner radius; no transmitter may be closer to the receiver.
    pub inner_radius_m: f64,
    /// Coverage radius of a CR's own cell, used only for CR power calibration.
    pub coverage_radius_m: f64,
}

impl Geometry {
    pub fn new(outer_radius_m: f64, inner_radius_m: f64, coverage_radius_m: f64) -> Result<Self> {
        if !(inner_radius_m > 0.0 && inner_radius_m < outer_radius_m) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < inner radius < outer radius, got {inner_radius_m} and {outer_radius_m}"
            )));
        }
        if !(coverage_radius_m > 0.0 && coverage_radius_m <= outer_radius_m) {
            return Err(Error::InvalidParameter(format!(
                "CR coverage radius {coverage_radius_m} outside (0, {outer_radius_m}]"
            )));
        }
        Ok(Self {
            outer_radius_m,
            inner_radius_m,
            coverage_radius_m,
        })
    }
}

/// CR population density and activity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Population {
    /// CR density in CRs per square meter.
    pub density_per_m2: f64,
    /// Probability that a CR seeks a connection.
    pub activity_p: f64,
    /// Maximum CR count, `floor(pi * R^2 * density)`. The hole of radius
    /// `R0` is negligible and ignored.
    pub max_count: u64,
}

impl Population {
    pub fn new(density_per_m2: f64, activity_p: f64, geom: &Geometry) -> Result<Self> {
        if !density_per_m2.is_finite() || density_per_m2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "density {density_per_m2} per m^2 must be finite and >= 0"
            )));
        }
        if !(0.0..=1.0).contains(&activity_p) {
            return Err(Error::InvalidParameter(format!(
                "activity factor {activity_p} outside [0, 1]"
            )));
        }
        let r = geom.outer_radius_m;
        let max_count = (std::f64::consts::PI * r * r * density_per_m2).floor() as u64;
        Ok(Self {
            density_per_m2,
            activity_p,
            max_count,
        })
    }
}

/// Linear transmit scales and the noise floor they are calibrated against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLevels {
    /// Linear noise power at the receiver (unit by convention).
    pub noise: f64,
    /// Primary transmitter scale constant.
    pub pu_scale: f64,
    /// CR transmitter scale constant.
    pub cr_scale: f64,
}

impl PowerLevels {
    pub fn new(noise: f64, pu_scale: f64, cr_scale: f64) -> Result<Self> {
        for (name, v) in [("noise", noise), ("pu_scale", pu_scale), ("cr_scale", cr_scale)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(Self {
            noise,
            pu_scale,
            cr_scale,
        })
    }
}

/// A full simulation scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub env: PropagationEnv,
    pub geom: Geometry,
    pub pop: Population,
    pub power: PowerLevels,
}

impl Scenario {
    pub fn new(env: PropagationEnv, geom: Geometry, pop: Population, power: PowerLevels) -> Self {
        Self {
            env,
            geom,
            pop,
            power,
        }
    }
}

/// Purpose tag for one random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    /// Binomial draw of the active CR count.
    CrCount,
    /// CR distances from the receiver.
    CrPlacement,
    /// CR shadowing exponents.
    CrShadowing,
    /// Primary transmitter distance and shadowing.
    PuLink,
}

impl StreamPurpose {
    fn tag(self) -> u64 {
        match self {
            StreamPurpose::CrCount => 0x43_4f_55_4e_54,
            StreamPurpose::CrPlacement => 0x50_4c_41_43_45,
            StreamPurpose::CrShadowing => 0x53_48_41_44_4f,
            StreamPurpose::PuLink => 0x50_55_4c_4e_4b,
        }
    }
}

/// Master seed plus the substream derivation scheme.
///
/// Identical `SeedSpec` and scenario produce bit-identical realizations for
/// a given replication index, regardless of how many replications run, in
/// what order, or on how many threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// Counter-based substream for one (replication, purpose) pair.
    pub fn stream(&self, replication: u64, purpose: StreamPurpose) -> ChaCha8Rng {
        let h = splitmix(self.master_seed ^ splitmix(purpose.tag()));
        let h = splitmix(h ^ replication);
        let mut seed = [0u8; 32];
        for (i, chunk) in seed.chunks_exact_mut(8).enumerate() {
            chunk.copy_from_slice(&splitmix(h.wrapping_add(i as u64 + 1)).to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// One Monte Carlo draw of the whole system.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    /// Primary transmitter distance in meters.
    pub pu_distance_m: f64,
    /// Primary link shadowing exponent.
    pub pu_shadow: f64,
    /// Primary received signal power, linear.
    pub pu_signal: f64,
    /// Per-CR distances in meters.
    pub cr_distances_m: Vec<f64>,
    /// Per-CR shadowing exponents.
    pub cr_shadows: Vec<f64>,
    /// Per-CR interference powers at the primary receiver, linear.
    pub cr_interferences: Vec<f64>,
    /// Number of CRs seeking a connection in this draw.
    pub n_active: usize,
}

/// Binomial draw of the number of CRs seeking a connection.
pub fn sample_cr_count<R: Rng + ?Sized>(pop: &Population, rng: &mut R) -> u64 {
    // Binomial::new only rejects p outside [0, 1], which Population forbids.
    Binomial::new(pop.max_count, pop.activity_p)
        .expect("activity factor validated by Population")
        .sample(rng)
}

fn annulus_distance<R: Rng + ?Sized>(inner_m: f64, outer_m: f64, rng: &mut R) -> f64 {
    // Inverse transform of F(r) = (r^2 - R0^2) / (R^2 - R0^2).
    let u: f64 = rng.gen();
    (inner_m * inner_m + u * (outer_m * outer_m - inner_m * inner_m)).sqrt()
}

/// Distance draw for a transmitter uniformly located in the annulus.
pub fn sample_annulus_distance<R: Rng + ?Sized>(geom: &Geometry, rng: &mut R) -> f64 {
    annulus_distance(geom.inner_radius_m, geom.outer_radius_m, rng)
}

/// Received power of one link: `scale * exp(shadow) * r^-gamma`.
#[inline]
pub fn link_power(scale: f64, shadow: f64, distance_m: f64, env: &PropagationEnv) -> f64 {
    scale * shadow.exp() * distance_m.powf(-env.path_loss_exponent)
}

/// Draw a complete realization for the given replication index.
pub fn sample_realization(scn: &Scenario, seeds: &SeedSpec, replication: u64) -> Realization {
    let n_active = {
        let mut rng = seeds.stream(replication, StreamPurpose::CrCount);
        sample_cr_count(&scn.pop, &mut rng) as usize
    };

    let normal = Normal::new(0.0, scn.env.shadow_sigma_ln)
        .expect("sigma validated by PropagationEnv");

    let mut cr_distances_m = Vec::with_capacity(n_active);
    {
        let mut rng = seeds.stream(replication, StreamPurpose::CrPlacement);
        for _ in 0..n_active {
            cr_distances_m.push(sample_annulus_distance(&scn.geom, &mut rng));
        }
    }

    let mut cr_shadows = Vec::with_capacity(n_active);
    {
        let mut rng = seeds.stream(replication, StreamPurpose::CrShadowing);
        for _ in 0..n_active {
            cr_shadows.push(normal.sample(&mut rng));
        }
    }

    let cr_interferences = cr_distances_m
        .iter()
        .zip(&cr_shadows)
        .map(|(&r, &x)| link_power(scn.power.cr_scale, x, r, &scn.env))
        .collect();

    let (pu_distance_m, pu_shadow) = {
        let mut rng = seeds.stream(replication, StreamPurpose::PuLink);
        let r = sample_annulus_distance(&scn.geom, &mut rng);
        let x = normal.sample(&mut rng);
        (r, x)
    };
    let pu_signal = link_power(scn.power.pu_scale, pu_shadow, pu_distance_m, &scn.env);

    Realization {
        pu_distance_m,
        pu_shadow,
        pu_signal,
        cr_distances_m,
        cr_shadows,
        cr_interferences,
        n_active,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_geom() -> Geometry {
        Geometry::new(1000.0, 1.0, 50.0).unwrap()
    }

    #[test]
    fn sigma_conversion_is_exact() {
        let env = PropagationEnv::new(3.5, 8.0).unwrap();
        assert_eq!(env.shadow_sigma_ln, DB_TO_LN * 8.0);
        assert_eq!(env.db_to_ln, (10f64).ln() / 10.0);
    }

    #[test]
    fn env_rejects_out_of_range() {
        assert!(PropagationEnv::new(1.5, 8.0).is_err());
        assert!(PropagationEnv::new(6.5, 8.0).is_err());
        assert!(PropagationEnv::new(3.5, -1.0).is_err());
        assert!(PropagationEnv::new(2.0, 0.0).is_ok());
    }

    #[test]
    fn geometry_rejects_bad_radii() {
        assert!(Geometry::new(1000.0, 0.0, 50.0).is_err());
        assert!(Geometry::new(1000.0, 1000.0, 50.0).is_err());
        assert!(Geometry::new(1000.0, 1.0, 1500.0).is_err());
        assert!(Geometry::new(1000.0, 1.0, 1000.0).is_ok());
    }

    #[test]
    fn population_max_count_floor() {
        let pop = Population::new(0.001, 0.1, &test_geom()).unwrap();
        assert_eq!(pop.max_count, 3141); // floor(pi * 1e6 * 0.001)
        assert!(Population::new(0.001, 1.5, &test_geom()).is_err());
        assert!(Population::new(-0.1, 0.5, &test_geom()).is_err());
    }

    #[test]
    fn cr_count_degenerate_activity() {
        let geom = test_geom();
        let seeds = SeedSpec::new(1);
        let pop0 = Population::new(0.001, 0.0, &geom).unwrap();
        let pop1 = Population::new(0.001, 1.0, &geom).unwrap();
        for rep in 0..50 {
            let mut rng = seeds.stream(rep, StreamPurpose::CrCount);
            assert_eq!(sample_cr_count(&pop0, &mut rng), 0);
            let mut rng = seeds.stream(rep, StreamPurpose::CrCount);
            assert_eq!(sample_cr_count(&pop1, &mut rng), pop1.max_count);
        }
    }

    #[test]
    fn annulus_distance_endpoints() {
        let geom = test_geom();
        // u = 0 maps to the inner radius; u -> 1 approaches the outer.
        let r0 = (geom.inner_radius_m * geom.inner_radius_m
            + 0.0 * (geom.outer_radius_m * geom.outer_radius_m
                - geom.inner_radius_m * geom.inner_radius_m))
            .sqrt();
        assert_eq!(r0, geom.inner_radius_m);
        let u = 1.0 - 1e-12;
        let r1 = (geom.inner_radius_m * geom.inner_radius_m
            + u * (geom.outer_radius_m * geom.outer_radius_m
                - geom.inner_radius_m * geom.inner_radius_m))
            .sqrt();
        assert_relative_eq!(r1, geom.outer_radius_m, epsilon = 1e-6);
    }

    #[test]
    fn annulus_distance_stays_in_range() {
        let geom = test_geom();
        let seeds = SeedSpec::new(99);
        let mut rng = seeds.stream(0, StreamPurpose::CrPlacement);
        for _ in 0..10_000 {
            let r = sample_annulus_distance(&geom, &mut rng);
            assert!(r >= geom.inner_radius_m && r <= geom.outer_radius_m);
        }
    }

    fn small_scenario(sigma_db: f64) -> Scenario {
        let env = PropagationEnv::new(3.5, sigma_db).unwrap();
        let geom = test_geom();
        let pop = Population::new(1e-5, 0.1, &geom).unwrap();
        let power = PowerLevels::new(1.0, 2.0, 1.0).unwrap();
        Scenario::new(env, geom, pop, power)
    }

    #[test]
    fn realization_is_deterministic() {
        let scn = small_scenario(8.0);
        let seeds = SeedSpec::new(42);
        let a = sample_realization(&scn, &seeds, 7);
        let b = sample_realization(&scn, &seeds, 7);
        assert_eq!(a, b);
        let c = sample_realization(&scn, &seeds, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn realization_lists_are_consistent() {
        let scn = small_scenario(8.0);
        let seeds = SeedSpec::new(5);
        for rep in 0..20 {
            let real = sample_realization(&scn, &seeds, rep);
            assert_eq!(real.cr_distances_m.len(), real.n_active);
            assert_eq!(real.cr_shadows.len(), real.n_active);
            assert_eq!(real.cr_interferences.len(), real.n_active);
            for ((&r, &x), &i) in real
                .cr_distances_m
                .iter()
                .zip(&real.cr_shadows)
                .zip(&real.cr_interferences)
            {
                assert!(r >= scn.geom.inner_radius_m && r <= scn.geom.outer_radius_m);
                let expect = scn.power.cr_scale * x.exp() * r.powf(-scn.env.path_loss_exponent);
                assert_relative_eq!(i, expect, max_relative = 1e-12);
            }
            assert!(real.pu_signal >= 0.0);
        }
    }

    #[test]
    fn zero_shadowing_at_fixed_distance_gives_pure_path_loss() {
        // sigma = 0 turns every interference into scale * r^-gamma.
        let env = PropagationEnv::new(3.5, 0.0).unwrap();
        let geom = test_geom();
        let r = geom.outer_radius_m;
        let i = link_power(1.0, 0.0, r, &env);
        assert_relative_eq!(i, r.powf(-3.5), max_relative = 1e-15);

        let scn = Scenario::new(
            env,
            geom,
            Population::new(1e-5, 1.0, &geom).unwrap(),
            PowerLevels::new(1.0, 1.0, 1.0).unwrap(),
        );
        let real = sample_realization(&scn, &SeedSpec::new(3), 0);
        for (&i, &r) in real.cr_interferences.iter().zip(&real.cr_distances_m) {
            assert_relative_eq!(i, r.powf(-3.5), max_relative = 1e-12);
        }
    }

    #[test]
    fn streams_differ_by_purpose_and_replication() {
        let seeds = SeedSpec::new(0);
        let mut a = seeds.stream(0, StreamPurpose::CrPlacement);
        let mut b = seeds.stream(0, StreamPurpose::CrShadowing);
        let mut c = seeds.stream(1, StreamPurpose::CrPlacement);
        let (x, y, z): (u64, u64, u64) = (a.gen(), b.gen(), c.gen());
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn db_conversions_round_trip() {
        assert_relative_eq!(db_to_linear(3.010299956639812), 2.0, max_relative = 1e-12);
        assert_relative_eq!(linear_to_db(db_to_linear(-7.3)), -7.3, max_relative = 1e-12);
    }
}
