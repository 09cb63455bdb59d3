//! Independent oracles shared by the integration suites. Nothing here may
//! call the implementation paths it is used to check.

#![allow(dead_code)]

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 60)
}

/// Standard Gaussian CDF by quadrature of the density, independent of erfc.
pub fn normal_cdf_quadrature(z: f64, tol: f64) -> f64 {
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if z >= 0.0 {
        0.5 + adaptive_simpson(&pdf, 0.0, z, tol)
    } else {
        0.5 - adaptive_simpson(&pdf, z, 0.0, tol)
    }
}

/// Annulus distance-moment `E(r^-k*gamma)` by quadrature of the density.
pub fn distance_moment_quadrature(k: u32, gamma: f64, r_outer: f64, r_inner: f64) -> f64 {
    let area = r_outer * r_outer - r_inner * r_inner;
    let kg = f64::from(k) * gamma;
    let integrand = |r: f64| r.powf(-kg) * 2.0 * r / area;
    // Integrand scale is set by the inner edge; aim well below it.
    let scale = integrand(r_inner) * (r_outer - r_inner);
    adaptive_simpson(&integrand, r_inner, r_outer, 1e-13 * scale.max(1e-300))
}

/// Exhaustive maximum-cardinality subset with sum within the budget.
/// Subset sums are built incrementally over the mask lattice.
pub fn max_cardinality_subset(values: &[f64], budget: f64) -> usize {
    let n = values.len();
    assert!(n <= 20, "exhaustive search capped at 20 items");
    if n == 0 {
        return 0;
    }
    let mut sums = vec![0.0f64; 1usize << n];
    let mut best = 0usize;
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + values[low];
        if sums[mask] <= budget {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

/// Standard error of the sample mean.
pub fn std_err(xs: &[f64]) -> f64 {
    std_dev(xs) / (xs.len() as f64).sqrt()
}

/// Sample skewness (biased central-moment form).
pub fn sample_skewness(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|&x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|&x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}
