//! Replicated Monte Carlo evaluation: aggregate interference, empirical
//! CDFs, Kolmogorov-Smirnov distances, and reliability estimates.
//!
//! Replications are independent work units keyed by their index, so they can
//! be evaluated on any number of rayon workers; results are collected into
//! index order before any reduction, keeping every output bit-stable.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scenario::{
    sample_annulus_distance, sample_realization, Realization, Scenario, SeedSpec, StreamPurpose,
};

/// Sum of the interference of mask-selected CRs.
pub fn aggregate_interference(real: &Realization, transmit_mask: &[bool]) -> Result<f64> {
    if transmit_mask.len() != real.n_active {
        return Err(Error::LengthMismatch {
            expected: real.n_active,
            got: transmit_mask.len(),
        });
    }
    Ok(real
        .cr_interferences
        .iter()
        .zip(transmit_mask)
        .filter(|(_, &m)| m)
        .map(|(&i, _)| i)
        .sum())
}

/// Sorted sample values supporting right-continuous CDF evaluation.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("empty sample set".into()));
        }
        samples.sort_unstable_by(|a, b| a.partial_cmp(b).expect("non-NaN samples"));
        Ok(Self { values: samples })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `F_n(x)`: fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        let rank = self.values.partition_point(|&v| v <= x);
        rank as f64 / self.values.len() as f64
    }
}

/// Supremum distance between an empirical CDF and an analytic one,
/// using both one-sided step evaluations at every sample point.
pub fn ks_distance<F: Fn(f64) -> f64>(ecdf: &EmpiricalCdf, cdf: F) -> f64 {
    let n = ecdf.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in ecdf.values().iter().enumerate() {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        d = d.max(above).max(below);
    }
    d
}

/// Map every replication index through `f`, in parallel, preserving order.
pub fn run_replications<T, F>(scn: &Scenario, seeds: &SeedSpec, replications: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, Realization) -> T + Sync,
{
    (0..replications)
        .into_par_iter()
        .map(|rep| f(rep, sample_realization(scn, seeds, rep)))
        .collect()
}

/// Monte Carlo success probability with a Wald confidence band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityEstimate {
    pub estimate: f64,
    pub replications: u64,
    /// Half-width of the 95% binomial confidence interval.
    pub ci_halfwidth: f64,
}

impl ReliabilityEstimate {
    pub fn from_successes(successes: u64, replications: u64) -> Self {
        let n = replications as f64;
        let p = successes as f64 / n;
        Self {
            estimate: p,
            replications,
            ci_halfwidth: 1.96 * (p * (1.0 - p) / n).sqrt(),
        }
    }
}

/// Fraction of replications on which `event` holds.
pub fn estimate_reliability<F>(
    scn: &Scenario,
    seeds: &SeedSpec,
    replications: u64,
    event: F,
) -> ReliabilityEstimate
where
    F: Fn(&Realization) -> bool + Sync,
{
    let outcomes = run_replications(scn, seeds, replications, |_, real| event(&real));
    let successes = outcomes.iter().filter(|&&ok| ok).count() as u64;
    ReliabilityEstimate::from_successes(successes, replications)
}

/// Draws of a single CR's interference power, one substream per sample.
///
/// Each sample index acts as its own replication, so the sequence is
/// independent of chunking and thread count.
pub fn single_interference_samples(scn: &Scenario, seeds: &SeedSpec, n: usize) -> Vec<f64> {
    use rand_distr::{Distribution, Normal};
    let normal = Normal::new(0.0, scn.env.shadow_sigma_ln).expect("validated sigma");
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let r = {
                let mut rng = seeds.stream(i, StreamPurpose::CrPlacement);
                sample_annulus_distance(&scn.geom, &mut rng)
            };
            let x = {
                let mut rng = seeds.stream(i, StreamPurpose::CrShadowing);
                normal.sample(&mut rng)
            };
            crate::scenario::link_power(scn.power.cr_scale, x, r, &scn.env)
        })
        .collect()
}
