//! The preset experiments behind each subcommand.

use cri_core::admission::{
    interference_budget, rem_centralized, rem_decentralized, solve_pez_radius,
};
use cri_core::analytic::{
    calibrate_power, fenton_wilkinson_fit, single_interferer_cdf, skewness_ratio_asymptotic,
    skewness_ratio_exact, MomentSet,
};
use cri_core::config::{ScenarioConfig, CALIBRATION_RELIABILITY, CALIBRATION_SNR_DB};
use cri_core::mc::{
    estimate_reliability, ks_distance, run_replications, single_interference_samples,
    EmpiricalCdf,
};
use cri_core::scenario::{db_to_linear, linear_to_db, Geometry, Population, PowerLevels, Scenario};

use crate::output::{CsvWriter, OutputDir};
use crate::{csv_row, CliError};

/// A named experiment: its output file, parameter grid, and replication
/// count. Grids only vary keys that exist in the scenario config schema.
pub struct ExperimentPreset {
    pub name: &'static str,
    pub output_file: &'static str,
    pub gamma_grid: Vec<f64>,
    pub sigma_grid: Vec<f64>,
    pub target_sinr_grid: Vec<f64>,
    pub replications: u64,
}

impl ExperimentPreset {
    fn single_point(name: &'static str, output_file: &'static str, cfg: &ScenarioConfig) -> Self {
        Self {
            name,
            output_file,
            gamma_grid: vec![cfg.gamma],
            sigma_grid: vec![cfg.sigma_db],
            target_sinr_grid: vec![cfg.target_sinr_db],
            replications: cfg.replications.expect("replication count resolved by the caller"),
        }
    }
}

fn build(cfg: &ScenarioConfig) -> Result<(Scenario, cri_core::scenario::SeedSpec), CliError> {
    cfg.build().map_err(CliError::from)
}

/// Analytic-vs-simulated interference CDF over the propagation grid.
pub fn run_cdf_compare(cfg: &ScenarioConfig, out: &OutputDir) -> Result<(), CliError> {
    let preset = ExperimentPreset {
        name: "cdf-compare",
        output_file: "cdf_compare.csv",
        gamma_grid: vec![2.0, 3.0, 3.5, 4.0],
        sigma_grid: vec![4.0, 8.0, 12.0],
        target_sinr_grid: vec![],
        replications: cfg.replications.expect("replication count resolved by the caller"),
    };
    let mut w = CsvWriter::new(
        preset.output_file,
        preset.name,
        "gamma,sigma_dB,x_dB,F_analytic,F_empirical,ks_distance",
    );
    let mut worst = 0.0f64;
    for &gamma in &preset.gamma_grid {
        for &sigma in &preset.sigma_grid {
            let point = ScenarioConfig {
                gamma,
                sigma_db: sigma,
                ..cfg.clone()
            };
            let (scn, seeds) = build(&point)?;
            let samples =
                single_interference_samples(&scn, &seeds, preset.replications as usize);
            let ecdf = EmpiricalCdf::new(samples).map_err(CliError::from)?;
            let analytic = |x: f64| {
                single_interferer_cdf(x, &scn.env, &scn.geom, scn.power.cr_scale)
                    .expect("positive power grid")
            };
            let ks = ks_distance(&ecdf, analytic);
            worst = worst.max(ks);
            let lo = ecdf.values()[ecdf.len() / 1000].max(f64::MIN_POSITIVE);
            let hi = ecdf.values()[ecdf.len() - 1 - ecdf.len() / 1000];
            let (lo_db, hi_db) = (linear_to_db(lo), linear_to_db(hi));
            for i in 0..=200 {
                let x_db = lo_db + (hi_db - lo_db) * f64::from(i) / 200.0;
                let x = db_to_linear(x_db);
                csv_row!(
                    w,
                    "{gamma},{sigma},{x_db:.4},{:.8},{:.8},{ks:.8}",
                    analytic(x),
                    ecdf.eval(x)
                );
            }
            println!("cdf-compare: gamma {gamma}, sigma {sigma} dB -> KS {ks:.5}");
        }
    }
    w.finish(out)?;
    println!("cdf-compare: worst KS {worst:.5} over the grid");
    Ok(())
}

fn moment_columns(cfg: &ScenarioConfig, gamma: f64, sigma_db: f64) -> Result<String, CliError> {
    let env = cri_core::scenario::PropagationEnv::new(gamma, sigma_db)?;
    let geom = Geometry::new(cfg.r_m, cfg.r0_m, cfg.rc_m)?;
    let m = MomentSet::exact(&env, &geom, 1.0)?;
    let fit = fenton_wilkinson_fit(m.m1, m.m2)?;
    let exact = skewness_ratio_exact(&env, &geom);
    let asym = skewness_ratio_asymptotic(&env, &geom)
        .map(|v| format!("{v:.8e}"))
        .unwrap_or_else(|_| "nan".into());
    Ok(format!(
        "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{asym}",
        m.m1, m.m2, m.m3, m.skewness, fit.mu_z, fit.sigma_z2, fit.third_moment, exact
    ))
}

/// Moments, skewness, and the lognormal fit at the configured point.
pub fn run_moments(cfg: &ScenarioConfig, out: &OutputDir) -> Result<(), CliError> {
    let preset = ExperimentPreset::single_point("moments", "moments.csv", cfg);
    let (scn, _) = build(cfg)?;
    let mut w = CsvWriter::new(
        preset.output_file,
        preset.name,
        "gamma,sigma_dB,scale,m1,m2,m3,skewness,fw_mu_z,fw_sigma_z2,fw_third_moment,ratio_exact,ratio_asymptotic",
    );
    let env = &scn.env;
    let geom = &scn.geom;
    let scale = scn.power.cr_scale;
    let m = MomentSet::exact(env, geom, scale).map_err(CliError::from)?;
    let fit = fenton_wilkinson_fit(m.m1, m.m2).map_err(CliError::from)?;
    let exact = skewness_ratio_exact(env, geom);
    let asym = skewness_ratio_asymptotic(env, geom)
        .map(|v| format!("{v:.8e}"))
        .unwrap_or_else(|_| "nan".into());
    csv_row!(
        w,
        "{},{},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{asym}",
        cfg.gamma,
        cfg.sigma_db,
        scale,
        m.m1,
        m.m2,
        m.m3,
        m.skewness,
        fit.mu_z,
        fit.sigma_z2,
        fit.third_moment,
        exact
    );
    w.finish(out)?;
    println!(
        "moments: m1 {:.6e}, m2 {:.6e}, m3 {:.6e}, skewness {:.4e}",
        m.m1, m.m2, m.m3, m.skewness
    );
    println!(
        "moments: fitted third moment overstates the true one by {:.3e} (asymptotic {asym})",
        fit.third_moment / m.m3
    );
    Ok(())
}

/// Third-moment mismatch report over the gamma >= 3 grid.
pub fn run_skewness_report(cfg: &ScenarioConfig, out: &OutputDir) -> Result<(), CliError> {
    let preset = ExperimentPreset {
        name: "skewness-report",
        output_file: "skewness.csv",
        gamma_grid: vec![3.0, 3.5, 4.0],
        sigma_grid: vec![4.0, 6.0, 8.0, 12.0],
        target_sinr_grid: vec![],
        replications: 0,
    };
    let mut w = CsvWriter::new(
        preset.output_file,
        preset.name,
        "gamma,sigma_dB,m1,m2,m3,skewness,fw_mu_z,fw_sigma_z2,fw_third_moment,ratio_exact,ratio_asymptotic",
    );
    for &gamma in &preset.gamma_grid {
        for &sigma in &preset.sigma_grid {
            let cols = moment_columns(cfg, gamma, sigma)?;
            csv_row!(w, "{gamma},{sigma},{cols}");
        }
    }
    w.finish(out)?;
    println!(
        "skewness-report: {} grid points written",
        preset.gamma_grid.len() * preset.sigma_grid.len()
    );
    Ok(())
}

/// Calibrate both transmit scales and verify them by Monte Carlo.
pub fn run_calibrate(cfg: &ScenarioConfig, out: &OutputDir) -> Result<(), CliError> {
    let preset = ExperimentPreset::single_point("calibrate", "calibrate.csv", cfg);
    let env = cri_core::scenario::PropagationEnv::new(cfg.gamma, cfg.sigma_db)?;
    let geom = Geometry::new(cfg.r_m, cfg.r0_m, cfg.rc_m)?;

    let mut w = CsvWriter::new(
        preset.output_file,
        preset.name,
        "link,outer_radius_m,reliability_target,snr_threshold_dB,noise,scale",
    );
    let mut rel = CsvWriter::new(
        "reliability.csv",
        "reliability",
        "link,gamma,sigma_dB,snr_threshold_dB,estimate,ci_halfwidth,replications",
    );
    for (link, outer) in [("pu", geom.outer_radius_m), ("cr", geom.coverage_radius_m)] {
        let scale = calibrate_power(
            &env,
            &geom,
            outer,
            CALIBRATION_RELIABILITY,
            CALIBRATION_SNR_DB,
            cfg.noise,
        )?;
        csv_row!(
            w,
            "{link},{outer},{CALIBRATION_RELIABILITY},{CALIBRATION_SNR_DB},{},{scale:.8e}",
            cfg.noise
        );
        // Monte Carlo confirmation over the link's own annulus.
        let cell = Geometry::new(outer, geom.inner_radius_m, outer)?;
        let scn = Scenario::new(
            env,
            cell,
            Population::new(0.0, 0.0, &cell)?,
            PowerLevels::new(cfg.noise, scale, scale)?,
        );
        let threshold = cfg.noise * db_to_linear(CALIBRATION_SNR_DB);
        let est = estimate_reliability(
            &scn,
            &cri_core::scenario::SeedSpec::new(cfg.master_seed),
            preset.replications,
            |real| real.pu_signal >= threshold,
        );
        csv_row!(
            rel,
            "{link},{},{},{CALIBRATION_SNR_DB},{:.6},{:.6},{}",
            cfg.gamma,
            cfg.sigma_db,
            est.estimate,
            est.ci_halfwidth,
            est.replications
        );
        println!(
            "calibrate: {link} scale {scale:.6e} ({outer} m cell), Monte Carlo reliability {:.4} +- {:.4}",
            est.estimate, est.ci_halfwidth
        );
    }
    w.finish(out)?;
    rel.finish(out)
}

/// Exclusion-radius sweeps: over sigma by default, over R/Rc when ratios
/// are given.
pub fn run_pez_sweep(
    cfg: &ScenarioConfig,
    out: &OutputDir,
    rc_ratios: &[f64],
) -> Result<(), CliError> {
    let preset = ExperimentPreset {
        name: "pez-sweep",
        output_file: "pez.csv",
        gamma_grid: vec![cfg.gamma],
        sigma_grid: if rc_ratios.is_empty() {
            vec![4.0, 6.0, 8.0, 12.0]
        } else {
            vec![cfg.sigma_db]
        },
        target_sinr_grid: (0..=5).map(f64::from).collect(),
        replications: cfg.replications.expect("replication count resolved by the caller"),
    };
    let rcs: Vec<f64> = if rc_ratios.is_empty() {
        vec![cfg.rc_m]
    } else {
        rc_ratios.iter().map(|ratio| cfg.r_m / ratio).collect()
    };
    let mut w = CsvWriter::new(
        preset.output_file,
        preset.name,
        "sigma_dB,gamma,density_per_km2,rc_m,target_sinr_dB,Re_m,reliability_at_Re,full_exclusion",
    );
    for &sigma in &preset.sigma_grid {
        for &rc in &rcs {
            let point = ScenarioConfig {
                sigma_db: sigma,
                rc_m: rc,
                ..cfg.clone()
            };
            let (scn, seeds) = build(&point)?;
            for &theta_db in &preset.target_sinr_grid {
                let solve =
                    solve_pez_radius(&scn, &seeds, theta_db, 0.95, preset.replications)
                        .map_err(CliError::from)?;
                csv_row!(
                    w,
                    "{sigma},{},{},{rc},{theta_db},{:.3},{:.6},{}",
                    cfg.gamma,
                    cfg.density_per_km2,
                    solve.radius_m,
                    solve.reliability,
                    solve.full_exclusion
                );
                println!(
                    "pez-sweep: sigma {sigma} dB, Rc {rc} m, target {theta_db} dB -> R_e {:.0} m",
                    solve.radius_m
                );
            }
        }
    }
    w.finish(out)
}

fn rem_rows(
    w: &mut CsvWriter,
    prefix: &str,
    scn: &Scenario,
    seeds: &cri_core::scenario::SeedSpec,
    replications: u64,
    budget: f64,
) {
    let rows = run_replications(scn, seeds, replications, move |rep, real| {
        let cen = rem_centralized(&real.cr_interferences, budget);
        let dec = rem_decentralized(&real.cr_interferences, budget);
        (rep, real.n_active, cen.n_admitted(), dec.n_admitted())
    });
    for (rep, n_active, cen, dec) in rows {
        let n = n_active.max(1) as f64;
        csv_row!(
            w,
            "{prefix}rem-centralized,{rep},{n_active},{cen},{:.4}",
            100.0 * cen as f64 / n
        );
        csv_row!(
            w,
            "{prefix}rem-decentralized,{rep},{n_active},{dec},{:.4}",
            100.0 * dec as f64 / n
        );
    }
}

/// Admitted-count distributions for the two REM schemes over the
/// propagation grids.
pub fn run_rem_cdf(cfg: &ScenarioConfig, out: &OutputDir) -> Result<(), CliError> {
    let preset = ExperimentPreset {
        name: "rem-cdf",
        output_file: "rem_counts.csv",
        gamma_grid: vec![3.0, 3.5, 4.0],
        sigma_grid: vec![4.0, 8.0, 12.0],
        target_sinr_grid: vec![],
        replications: cfg.replications.expect("replication count resolved by the caller"),
    };
    let mut w = CsvWriter::new(
        preset.output_file,
        preset.name,
        "gamma,sigma_dB,density_per_km2,scheme,replication,n_active,n_admitted,pct_admitted",
    );
    // gamma sweep at 8 dB plus sigma sweep at the config gamma, deduplicated.
    let mut points: Vec<(f64, f64)> = preset.gamma_grid.iter().map(|&g| (g, 8.0)).collect();
    for &s in &preset.sigma_grid {
        if !points.contains(&(cfg.gamma, s)) {
            points.push((cfg.gamma, s));
        }
    }
    for (gamma, sigma) in points {
        let point = ScenarioConfig {
            gamma,
            sigma_db: sigma,
            ..cfg.clone()
        };
        let (scn, seeds) = build(&point)?;
        let budget = interference_budget(cfg.delta_db, cfg.noise).map_err(CliError::from)?;
        let prefix = format!("{gamma},{sigma},{},", cfg.density_per_km2);
        rem_rows(&mut w, &prefix, &scn, &seeds, preset.replications, budget);
        println!("rem-cdf: gamma {gamma}, sigma {sigma} dB done");
    }
    w.finish(out)
}

/// Percentage of CRs admitted by each scheme at both penetration densities.
pub fn run_access_compare(cfg: &ScenarioConfig, out: &OutputDir) -> Result<(), CliError> {
    let preset = ExperimentPreset {
        name: "access-compare",
        output_file: "access_compare.csv",
        gamma_grid: vec![cfg.gamma],
        sigma_grid: vec![cfg.sigma_db],
        target_sinr_grid: vec![CALIBRATION_SNR_DB - cfg.delta_db],
        replications: cfg.replications.expect("replication count resolved by the caller"),
    };
    let matched_theta_db = preset.target_sinr_grid[0];
    let budget = interference_budget(cfg.delta_db, cfg.noise).map_err(CliError::from)?;
    let mut w = CsvWriter::new(
        preset.output_file,
        preset.name,
        "density_per_km2,scheme,replication,n_active,n_admitted,pct_admitted",
    );
    for density in [1000.0, 10_000.0] {
        let point = ScenarioConfig {
            density_per_km2: density,
            ..cfg.clone()
        };
        let (scn, seeds) = build(&point)?;
        let solve = solve_pez_radius(&scn, &seeds, matched_theta_db, 0.95, preset.replications)
            .map_err(CliError::from)?;
        let radius = solve.radius_m;
        let rows = run_replications(&scn, &seeds, preset.replications, move |rep, real| {
            let cen = rem_centralized(&real.cr_interferences, budget).n_admitted();
            let dec = rem_decentralized(&real.cr_interferences, budget).n_admitted();
            let pez = real
                .cr_distances_m
                .iter()
                .filter(|&&r| r >= radius)
                .count();
            (rep, real.n_active, cen, dec, pez)
        });
        let mut sums = [0.0f64; 3];
        for &(rep, n_active, cen, dec, pez) in &rows {
            let n = n_active.max(1) as f64;
            for (scheme, count) in [("rem-centralized", cen), ("rem-decentralized", dec), ("pez", pez)]
            {
                csv_row!(
                    w,
                    "{density},{scheme},{rep},{n_active},{count},{:.4}",
                    100.0 * count as f64 / n
                );
            }
            sums[0] += 100.0 * cen as f64 / n;
            sums[1] += 100.0 * dec as f64 / n;
            sums[2] += 100.0 * pez as f64 / n;
        }
        let n = rows.len() as f64;
        println!(
            "access-compare: density {density}/km^2 (R_e {radius:.0} m at {matched_theta_db} dB): mean pct centralized {:.2}, decentralized {:.3}, pez {:.3}",
            sums[0] / n,
            sums[1] / n,
            sums[2] / n
        );
    }
    w.finish(out)
}
