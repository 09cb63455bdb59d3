//! CR access control: REM-based selection and the primary exclusion zone.
//!
//! REM schemes know every CR's instantaneous interference power and admit a
//! subset whose aggregate stays within the budget implied by a maximum SNR
//! degradation of `delta` dB. Because the dB gap between SNR and SINR is
//! exactly `10*log10((N0 + I)/N0)`, the budget is `N0 * (10^(delta/10) - 1)`
//! independent of the instantaneous signal.
//!
//! The PEZ scheme only uses location: CRs inside an exclusion radius are
//! silenced, everyone outside transmits. The radius is dimensioned so a
//! target SINR holds with a given area reliability, found by bisection over
//! a reliability curve evaluated with common random numbers (one frozen set
//! of replications per solve), which makes the curve monotone in the radius
//! and the bisection well-posed.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mc::ReliabilityEstimate;
use crate::scenario::{db_to_linear, sample_realization, Geometry, Realization, Scenario, SeedSpec};

/// One access-control rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdmissionPolicy {
    /// Ordered-interferer selection by a central controller.
    RemCentralized { delta_db: f64 },
    /// First-come-first-served selection in arrival order.
    RemDecentralized { delta_db: f64 },
    /// Silence every CR closer than the exclusion radius.
    Pez { exclusion_radius_m: f64 },
}

/// Admitted subset of one realization's CRs.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionResult {
    /// Indices into the realization's CR lists, in ascending order.
    pub admitted: Vec<usize>,
    /// Aggregate interference of the admitted set, linear.
    pub aggregate: f64,
}

impl AdmissionResult {
    pub fn n_admitted(&self) -> usize {
        self.admitted.len()
    }

    /// Percentage of the active population given access.
    pub fn pct_admitted(&self, n_active: usize) -> f64 {
        if n_active == 0 {
            0.0
        } else {
            100.0 * self.admitted.len() as f64 / n_active as f64
        }
    }
}

/// Largest aggregate interference keeping the SNR-to-SINR drop within
/// `delta_db`: `I_max = noise * (10^(delta/10) - 1)`.
pub fn interference_budget(delta_db: f64, noise: f64) -> Result<f64> {
    if !(delta_db >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "interference budget {delta_db} dB must be >= 0"
        )));
    }
    Ok(noise * (db_to_linear(delta_db) - 1.0))
}

/// Admit the longest ascending-order prefix whose sum fits the budget.
///
/// Sorting is stable with ties broken by original index, so the result is
/// identical across platforms. The prefix count equals the maximum number
/// of CRs any subset within the budget can contain.
pub fn rem_centralized(interferences: &[f64], budget: f64) -> AdmissionResult {
    let mut order: Vec<usize> = (0..interferences.len()).collect();
    order.sort_by(|&a, &b| {
        interferences[a]
            .partial_cmp(&interferences[b])
            .expect("non-NaN interference")
            .then(a.cmp(&b))
    });
    let mut admitted = Vec::new();
    let mut total = 0.0;
    for &idx in &order {
        if total + interferences[idx] > budget {
            break;
        }
        total += interferences[idx];
        admitted.push(idx);
    }
    admitted.sort_unstable();
    AdmissionResult {
        admitted,
        aggregate: total,
    }
}

/// Single pass in arrival order; a rejected CR is skipped, not terminal.
pub fn rem_decentralized(interferences: &[f64], budget: f64) -> AdmissionResult {
    let mut admitted = Vec::new();
    let mut total = 0.0;
    for (idx, &i) in interferences.iter().enumerate() {
        if total + i <= budget {
            total += i;
            admitted.push(idx);
        }
    }
    AdmissionResult {
        admitted,
        aggregate: total,
    }
}

/// Admit exactly the CRs at or beyond the exclusion radius.
pub fn pez_filter(
    real: &Realization,
    geom: &Geometry,
    exclusion_radius_m: f64,
) -> Result<AdmissionResult> {
    if !(exclusion_radius_m >= geom.inner_radius_m && exclusion_radius_m <= geom.outer_radius_m) {
        return Err(Error::InvalidParameter(format!(
            "exclusion radius {exclusion_radius_m} outside [{}, {}]",
            geom.inner_radius_m, geom.outer_radius_m
        )));
    }
    let mut admitted = Vec::new();
    let mut total = 0.0;
    for (idx, (&r, &i)) in real
        .cr_distances_m
        .iter()
        .zip(&real.cr_interferences)
        .enumerate()
    {
        if r >= exclusion_radius_m {
            total += i;
            admitted.push(idx);
        }
    }
    Ok(AdmissionResult {
        admitted,
        aggregate: total,
    })
}

impl AdmissionPolicy {
    /// Apply this policy to one realization.
    pub fn apply(&self, scn: &Scenario, real: &Realization) -> Result<AdmissionResult> {
        match *self {
            AdmissionPolicy::RemCentralized { delta_db } => {
                let budget = interference_budget(delta_db, scn.power.noise)?;
                Ok(rem_centralized(&real.cr_interferences, budget))
            }
            AdmissionPolicy::RemDecentralized { delta_db } => {
                let budget = interference_budget(delta_db, scn.power.noise)?;
                Ok(rem_decentralized(&real.cr_interferences, budget))
            }
            AdmissionPolicy::Pez { exclusion_radius_m } => {
                pez_filter(real, &scn.geom, exclusion_radius_m)
            }
        }
    }
}

/// Result of dimensioning the exclusion radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PezSolve {
    /// Smallest radius (within 1 m) meeting the reliability target.
    pub radius_m: f64,
    /// Estimated reliability at that radius under the frozen replications.
    pub reliability: f64,
    /// Set when even full exclusion misses the target, in which case
    /// `radius_m` is the outer radius.
    pub full_exclusion: bool,
}

/// Smallest exclusion radius such that the zone makes the SINR event
/// succeed on this replication. `0` when no exclusion is needed,
/// `infinity` when even an empty zone of interferers cannot help.
fn critical_radius(real: &Realization, theta_linear: f64, noise: f64) -> f64 {
    let need = real.pu_signal / theta_linear - noise;
    if need < 0.0 {
        return f64::INFINITY;
    }
    let n = real.n_active;
    if n == 0 {
        return 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        real.cr_distances_m[a]
            .partial_cmp(&real.cr_distances_m[b])
            .expect("non-NaN distance")
    });
    // suffix[k] = interference of CRs with sorted rank >= k.
    let mut suffix = vec![0.0; n + 1];
    for k in (0..n).rev() {
        suffix[k] = suffix[k + 1] + real.cr_interferences[order[k]];
    }
    let k_star = suffix.partition_point(|&t| t > need);
    if k_star == 0 {
        0.0
    } else {
        // Excluding the k_star-1 nearest CRs requires a radius strictly
        // beyond the last of them.
        real.cr_distances_m[order[k_star - 1]]
    }
}

/// Per-replication critical radii for a target SINR, under the seed
/// discipline's common random numbers.
pub fn pez_critical_radii(
    scn: &Scenario,
    seeds: &SeedSpec,
    target_sinr_db: f64,
    replications: u64,
) -> Vec<f64> {
    let theta = db_to_linear(target_sinr_db);
    let noise = scn.power.noise;
    (0..replications)
        .into_par_iter()
        .map(|rep| critical_radius(&sample_realization(scn, seeds, rep), theta, noise))
        .collect()
}

/// Reliability of the SINR event at each candidate radius, evaluated on one
/// frozen set of replications. Nondecreasing in the radius by construction.
pub fn pez_reliability_curve(
    scn: &Scenario,
    seeds: &SeedSpec,
    target_sinr_db: f64,
    replications: u64,
    radii_m: &[f64],
) -> Vec<ReliabilityEstimate> {
    let crit = pez_critical_radii(scn, seeds, target_sinr_db, replications);
    radii_m
        .iter()
        .map(|&re| {
            let successes = crit.iter().filter(|&&c| c < re).count() as u64;
            ReliabilityEstimate::from_successes(successes, replications)
        })
        .collect()
}

const PEZ_RADIUS_TOL_M: f64 = 1.0;
const PEZ_MAX_ITERS: u32 = 200;

/// Dimension the exclusion radius by stochastic bisection.
///
/// Finds the smallest radius in `[R0, R]`, within 1 m, at which the SINR
/// target holds with the requested reliability over `replications` frozen
/// replications. Returns the outer radius flagged as `full_exclusion` when
/// even silencing every CR misses the target, and the inner radius when no
/// exclusion is needed.
pub fn solve_pez_radius(
    scn: &Scenario,
    seeds: &SeedSpec,
    target_sinr_db: f64,
    reliability_target: f64,
    replications: u64,
) -> Result<PezSolve> {
    if !(reliability_target > 0.0 && reliability_target < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reliability target {reliability_target} outside (0, 1)"
        )));
    }
    if replications == 0 {
        return Err(Error::InvalidParameter("zero replications".into()));
    }
    let crit = pez_critical_radii(scn, seeds, target_sinr_db, replications);
    let reliability_at = |re: f64| {
        crit.iter().filter(|&&c| c < re).count() as f64 / replications as f64
    };

    let r0 = scn.geom.inner_radius_m;
    let r = scn.geom.outer_radius_m;
    if reliability_at(r) < reliability_target {
        return Ok(PezSolve {
            radius_m: r,
            reliability: reliability_at(r),
            full_exclusion: true,
        });
    }
    if reliability_at(r0) >= reliability_target {
        return Ok(PezSolve {
            radius_m: r0,
            reliability: reliability_at(r0),
            full_exclusion: false,
        });
    }

    let mut lo = r0; // reliability below target
    let mut hi = r; // reliability at or above target
    let mut iters = 0u32;
    while hi - lo > PEZ_RADIUS_TOL_M {
        let mid = 0.5 * (lo + hi);
        if reliability_at(mid) >= reliability_target {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
        if iters > PEZ_MAX_ITERS {
            return Err(Error::Convergence(
                "exclusion-radius bisection exceeded its iteration budget".into(),
            ));
        }
    }
    Ok(PezSolve {
        radius_m: hi,
        reliability: reliability_at(hi),
        full_exclusion: false,
    })
}
