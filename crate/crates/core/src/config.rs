//! Flat key-value scenario configuration.
//!
//! The on-disk format is one `key = value` pair per line, with `#` comments
//! and blank lines ignored. Unknown or duplicate keys are hard errors.
//! Missing keys fall back to the reference defaults below, and the resolved
//! set can be rendered back out for run manifests.

use crate::analytic::calibrate_power;
use crate::error::{Error, Result};
use crate::scenario::{Geometry, Population, PowerLevels, PropagationEnv, Scenario, SeedSpec};

/// Area-reliability level both transmit powers are calibrated to.
pub const CALIBRATION_RELIABILITY: f64 = 0.95;
/// SNR threshold in dB both transmit powers are calibrated to.
pub const CALIBRATION_SNR_DB: f64 = 5.0;

/// The reference parameter set: 1 km coverage with a 1 m keep-out, CR cells
/// a twentieth of the primary's radius, a tenth of CRs active, and a unit
/// noise floor. `replications` left unset means each experiment applies its
/// own default (10^6 samples for CDF comparison, 10^5 for reliability
/// estimates, 10^4 for admission-count runs).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub r_m: f64,
    pub r0_m: f64,
    pub rc_m: f64,
    pub gamma: f64,
    pub sigma_db: f64,
    pub density_per_km2: f64,
    pub activity_p: f64,
    pub noise: f64,
    pub master_seed: u64,
    pub replications: Option<u64>,
    pub delta_db: f64,
    pub target_sinr_db: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            r_m: 1000.0,
            r0_m: 1.0,
            rc_m: 50.0,
            gamma: 3.5,
            sigma_db: 8.0,
            density_per_km2: 1000.0,
            activity_p: 0.1,
            noise: 1.0,
            master_seed: 20260810,
            replications: None,
            delta_db: 2.0,
            target_sinr_db: 4.0,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key '{key}': '{value}' is not a number")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .parse::<u64>()
        .map_err(|_| Error::Config(format!("key '{key}': '{value}' is not a nonnegative integer")))
}

impl ScenarioConfig {
    /// Parse config text, starting from the defaults.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::Config(format!(
                    "line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
            seen.push(key.to_string());
            match key {
                "R_m" => cfg.r_m = parse_f64(key, value)?,
                "R0_m" => cfg.r0_m = parse_f64(key, value)?,
                "Rc_m" => cfg.rc_m = parse_f64(key, value)?,
                "gamma" => cfg.gamma = parse_f64(key, value)?,
                "sigma_dB" => cfg.sigma_db = parse_f64(key, value)?,
                "density_per_km2" => cfg.density_per_km2 = parse_f64(key, value)?,
                "activity_p" => cfg.activity_p = parse_f64(key, value)?,
                "noise" => cfg.noise = parse_f64(key, value)?,
                "master_seed" => cfg.master_seed = parse_u64(key, value)?,
                "replications" => cfg.replications = Some(parse_u64(key, value)?),
                "delta_dB" => cfg.delta_db = parse_f64(key, value)?,
                "target_sinr_dB" => cfg.target_sinr_db = parse_f64(key, value)?,
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    /// Render the resolved key-value set in canonical order. The
    /// `replications` line is omitted while unset.
    pub fn render(&self) -> String {
        let replications = self
            .replications
            .map(|n| format!("replications = {n}\n"))
            .unwrap_or_default();
        format!(
            "R_m = {}\nR0_m = {}\nRc_m = {}\ngamma = {}\nsigma_dB = {}\n\
             density_per_km2 = {}\nactivity_p = {}\nnoise = {}\nmaster_seed = {}\n\
             {replications}delta_dB = {}\ntarget_sinr_dB = {}\n",
            self.r_m,
            self.r0_m,
            self.rc_m,
            self.gamma,
            self.sigma_db,
            self.density_per_km2,
            self.activity_p,
            self.noise,
            self.master_seed,
            self.delta_db,
            self.target_sinr_db,
        )
    }

    /// Build the scenario, calibrating both transmit scales against the
    /// noise floor (5 dB target SNR with 95% area reliability).
    pub fn build(&self) -> Result<(Scenario, SeedSpec)> {
        let env = PropagationEnv::new(self.gamma, self.sigma_db)?;
        let geom = Geometry::new(self.r_m, self.r0_m, self.rc_m)?;
        let pop = Population::new(self.density_per_km2 / 1e6, self.activity_p, &geom)?;
        let pu_scale = calibrate_power(
            &env,
            &geom,
            geom.outer_radius_m,
            CALIBRATION_RELIABILITY,
            CALIBRATION_SNR_DB,
            self.noise,
        )?;
        let cr_scale = calibrate_power(
            &env,
            &geom,
            geom.coverage_radius_m,
            CALIBRATION_RELIABILITY,
            CALIBRATION_SNR_DB,
            self.noise,
        )?;
        let power = PowerLevels::new(self.noise, pu_scale, cr_scale)?;
        Ok((
            Scenario::new(env, geom, pop, power),
            SeedSpec::new(self.master_seed),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_render_and_parse() {
        let cfg = ScenarioConfig::default();
        let parsed = ScenarioConfig::parse_str(&cfg.render()).unwrap();
        assert_eq!(cfg, parsed);

        let with_reps = ScenarioConfig {
            replications: Some(777),
            ..ScenarioConfig::default()
        };
        assert_eq!(
            ScenarioConfig::parse_str(&with_reps.render()).unwrap(),
            with_reps
        );
    }

    #[test]
    fn partial_config_fills_defaults() {
        let cfg = ScenarioConfig::parse_str("sigma_dB = 12\nmaster_seed = 7\n").unwrap();
        assert_eq!(cfg.sigma_db, 12.0);
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.r_m, 1000.0);
        assert_eq!(cfg.replications, None);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# scenario\n\n gamma = 4.0  # dense urban\n";
        let cfg = ScenarioConfig::parse_str(text).unwrap();
        assert_eq!(cfg.gamma, 4.0);
    }

    #[test]
    fn unknown_key_is_a_hard_error() {
        let err = ScenarioConfig::parse_str("radius = 5\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("unknown key"));
    }

    #[test]
    fn duplicate_key_is_a_hard_error() {
        let err = ScenarioConfig::parse_str("gamma = 3\ngamma = 4\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn malformed_lines_are_errors() {
        assert!(ScenarioConfig::parse_str("gamma 3.5\n").is_err());
        assert!(ScenarioConfig::parse_str("gamma = fast\n").is_err());
        assert!(ScenarioConfig::parse_str("replications = -3\n").is_err());
    }

    #[test]
    fn build_produces_calibrated_scales() {
        let cfg = ScenarioConfig::default();
        let (scn, seeds) = cfg.build().unwrap();
        assert!(scn.power.pu_scale > scn.power.cr_scale);
        assert_eq!(seeds.master_seed, cfg.master_seed);
        assert_eq!(scn.pop.max_count, 3141);
    }
}
