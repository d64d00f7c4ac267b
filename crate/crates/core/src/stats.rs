//! Sample statistics shared by the Monte Carlo estimators and tests.

use alloc::vec::Vec;

use crate::math;

/// Sample mean and standard error of the mean.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    debug_assert!(n >= 2);
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, math::sqrt(var / n as f64))
}

/// Pearson correlation of two equal-length samples.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cab = 0.0;
    let mut ca = 0.0;
    let mut cb = 0.0;
    for i in 0..a.len() {
        let da = a[i] - ma;
        let db = b[i] - mb;
        cab += da * db;
        ca += da * da;
        cb += db * db;
    }
    cab / math::sqrt(ca * cb)
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF; input sorted.
pub fn ks_statistic_sorted<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max(math::abs(f - lo)).max(math::abs(hi - f));
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic; both inputs sorted.
pub fn ks_two_sample_sorted(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let xa = a[i];
        let xb = b[j];
        if xa <= xb {
            i += 1;
        }
        if xb <= xa {
            j += 1;
        }
        d = d.max(math::abs(i as f64 / na as f64 - j as f64 / nb as f64));
    }
    d
}

/// Hill estimator of the tail index from the top `k` order statistics.
/// For P(X > x) ~ C x^{-a} the estimate converges to `a`.
pub fn hill_tail_index(samples: &[f64], k: usize) -> f64 {
    debug_assert!(k >= 2 && k < samples.len());
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let x_k = sorted[n - k - 1];
    let mut h = 0.0;
    for i in 0..k {
        h += math::ln(sorted[n - 1 - i] / x_k);
    }
    k as f64 / h
}

/// Pearson chi-square statistic for observed vs expected counts.
pub fn chi_square_statistic(observed: &[f64], expected: &[f64]) -> f64 {
    debug_assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(o, e)| {
            debug_assert!(*e > 0.0);
            (o - e) * (o - e) / e
        })
        .sum()
}

/// Empirical CDF value of a sorted sample at x.
pub fn ecdf_sorted(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|v| *v <= x) as f64 / sorted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use alloc::vec;
    use rand::Rng;
    use rand_distr::{Distribution, OpenClosed01};

    #[test]
    fn mean_se_basic() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert!(math::abs(m - 2.5) < 1e-15);
        // sample sd = sqrt(5/3), se = sd/2
        assert!(math::abs(se - math::sqrt(5.0 / 3.0) / 2.0) < 1e-15);
    }

    #[test]
    fn ks_uniform_sample() {
        let mut rng = RngStream::new(5, 0).rng();
        let n = 50_000;
        let mut xs: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(OpenClosed01)).collect();
        xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let d = ks_statistic_sorted(&xs, |x| x.clamp(0.0, 1.0));
        assert!(d < 1.628 / math::sqrt(n as f64), "d = {d}");
    }

    #[test]
    fn ks_two_sample_same_law() {
        let mut rng = RngStream::new(6, 0).rng();
        let draw = |rng: &mut rand_chacha::ChaCha12Rng, n: usize| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let a = draw(&mut rng, 20_000);
        let b = draw(&mut rng, 30_000);
        let d = ks_two_sample_sorted(&a, &b);
        let ne = (20_000.0f64 * 30_000.0) / 50_000.0;
        assert!(d < 1.628 / math::sqrt(ne), "d = {d}");
    }

    #[test]
    fn hill_on_exact_pareto() {
        // X = U^{-1/a} has P(X > x) = x^{-a}
        let a = 0.5;
        let mut rng = RngStream::new(7, 0).rng();
        let xs: Vec<f64> = (0..100_000)
            .map(|_| math::pow(rng.sample::<f64, _>(OpenClosed01), -1.0 / a))
            .collect();
        let est = hill_tail_index(&xs, 1000);
        assert!(math::abs(est - a) < 0.05, "est = {est}");
    }

    #[test]
    fn chi_square_zero_for_exact() {
        let o = vec![10.0, 20.0, 30.0];
        assert_eq!(chi_square_statistic(&o, &o), 0.0);
    }
}
