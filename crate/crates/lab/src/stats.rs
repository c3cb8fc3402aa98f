//! Statistical helpers used by the verification harness: empirical CDFs,
//! Kolmogorov–Smirnov tests, bootstrap standard errors and one-dimensional
//! Hausdorff distance between point clouds.

use crate::rng::StreamRng;
use rand_distr::{Binomial, Distribution};

/// Sorted-sample empirical CDF.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
        Ecdf { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// F̂(x) = #{i : x_i <= x} / n.
    pub fn value(&self, x: f64) -> f64 {
        let idx = self.sorted.partition_point(|v| *v <= x);
        idx as f64 / self.sorted.len() as f64
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

/// Complement of the asymptotic Kolmogorov distribution,
/// `Q(z) = 2 Σ_{k>=1} (-1)^{k-1} e^{-2 k² z²}`, with the small-z dual series.
pub fn ks_complement_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.18 {
        let factor = (2.0 * std::f64::consts::PI).sqrt() / z;
        let t = (-std::f64::consts::PI * std::f64::consts::PI / (8.0 * z * z)).exp();
        1.0 - factor * (t + t.powi(9) + t.powi(25) + t.powi(49))
    } else {
        let t = (-2.0 * z * z).exp();
        2.0 * (t - t.powi(4) + t.powi(9))
    }
}

/// Result of a KS test: statistic and asymptotic p-value.
#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

fn ks_p_value(stat: f64, n_eff: f64) -> f64 {
    let sq = n_eff.sqrt();
    ks_complement_cdf((sq + 0.12 + 0.11 / sq) * stat)
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks2_test(a: &Ecdf, b: &Ecdf) -> KsResult {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut stat: f64 = 0.0;
    let (xs, ys) = (a.sorted(), b.sorted());
    let (mut i, mut j) = (0usize, 0usize);
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        stat = stat.max((i as f64 / na - j as f64 / nb).abs());
    }
    let n_eff = na * nb / (na + nb);
    KsResult { statistic: stat, p_value: ks_p_value(stat, n_eff) }
}

/// One-sample KS test of a sample against an analytic CDF.
///
/// Handles tied samples and atoms of the reference law: at every distinct
/// sample value the empirical jump block `[i_lo/n, i_hi/n]` is compared to
/// `F(x)` on the right and to the left limit of `F` (approximated by an
/// epsilon shift) on the left. A value of -∞ encodes an atom of V at zero
/// and is compared only from the right.
pub fn ks1_test<F: Fn(f64) -> f64>(sample: &Ecdf, cdf: F) -> KsResult {
    let xs = sample.sorted();
    let n = xs.len() as f64;
    let mut stat: f64 = 0.0;
    let mut i = 0usize;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i + 1;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f_right = cdf(x);
        stat = stat.max((f_right - j as f64 / n).abs());
        if x != f64::NEG_INFINITY {
            let f_left = cdf(x - 1e-9 * (1.0 + x.abs()));
            stat = stat.max((f_left - i as f64 / n).abs());
        }
        i = j;
    }
    KsResult { statistic: stat, p_value: ks_p_value(stat, n) }
}

/// Bootstrap standard error of the mean of `values` with `resamples`
/// multinomial resamples.
pub fn bootstrap_se_mean(values: &[f64], resamples: usize, rng: &mut StreamRng) -> f64 {
    use rand::Rng;
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut acc = 0.0;
        for _ in 0..n {
            acc += values[rng.random_range(0..n)];
        }
        means.push(acc / n as f64);
    }
    sd(&means)
}

/// Standard deviation (denominator n-1).
pub fn sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Joint bootstrap of the exceedance curve over an increasing grid.
///
/// The grid splits the line into bins; each resample draws multinomial bin
/// counts via chained binomials (exactly equivalent to resampling the data
/// with replacement and re-binning) and takes suffix sums. Returns one
/// exceedance-fraction curve per resample, so callers can bootstrap any
/// statistic of the curve jointly.
pub fn bootstrap_exceedance_matrix(
    sorted: &[f64],
    grid: &[f64],
    resamples: usize,
    rng: &mut StreamRng,
) -> Vec<Vec<f64>> {
    let n = sorted.len();
    // bin counts: (-inf, g0], (g0, g1], ..., (g_{m-1}, inf)
    let mut counts = Vec::with_capacity(grid.len() + 1);
    let mut prev = 0usize;
    for g in grid {
        let idx = sorted.partition_point(|v| *v <= *g);
        counts.push(idx - prev);
        prev = idx;
    }
    counts.push(n - prev);

    let mut matrix = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        // multinomial draw by chained binomials
        let mut remaining = n as u64;
        let mut mass_left = 1.0f64;
        let mut res_counts = Vec::with_capacity(counts.len());
        for (i, c) in counts.iter().enumerate() {
            if remaining == 0 {
                res_counts.push(0);
                continue;
            }
            if i + 1 == counts.len() {
                res_counts.push(remaining);
                break;
            }
            let p = (*c as f64 / n as f64 / mass_left).clamp(0.0, 1.0);
            let draw = Binomial::new(remaining, p).map(|d| d.sample(rng)).unwrap_or(0);
            res_counts.push(draw);
            remaining -= draw;
            mass_left -= *c as f64 / n as f64;
        }
        // suffix sums give exceedance counts per grid point
        let mut suffix = 0u64;
        let mut exceed = vec![0.0f64; grid.len()];
        for i in (0..grid.len()).rev() {
            suffix += res_counts[i + 1];
            exceed[i] = suffix as f64 / n as f64;
        }
        matrix.push(exceed);
    }
    matrix
}

/// Per-grid-point bootstrap standard errors of the exceedance fraction.
pub fn bootstrap_exceedance_se(
    sorted: &[f64],
    grid: &[f64],
    resamples: usize,
    rng: &mut StreamRng,
) -> Vec<f64> {
    let matrix = bootstrap_exceedance_matrix(sorted, grid, resamples, rng);
    (0..grid.len())
        .map(|i| {
            let col: Vec<f64> = matrix.iter().map(|row| row[i]).collect();
            sd(&col)
        })
        .collect()
}

/// Two-sided Hausdorff distance between nonempty 1-D point clouds.
pub fn hausdorff_1d(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let one_sided = |from: &[f64], to: &[f64]| -> f64 {
        let mut worst: f64 = 0.0;
        for x in from {
            let idx = to.partition_point(|v| v < x);
            let mut best = f64::INFINITY;
            if idx < to.len() {
                best = best.min((to[idx] - x).abs());
            }
            if idx > 0 {
                best = best.min((x - to[idx - 1]).abs());
            }
            worst = worst.max(best);
        }
        worst
    };
    one_sided(&sa, &sb).max(one_sided(&sb, &sa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    #[test]
    fn ks_complement_reference_points() {
        // Reference values from the standard Kolmogorov asymptotic series.
        assert!((ks_complement_cdf(0.0) - 1.0).abs() < 1e-12);
        assert!((ks_complement_cdf(1.0) - 2.6999967168e-01).abs() < 1e-7);
        assert!((ks_complement_cdf(2.0) - 6.7092525578e-04).abs() < 1e-9);
    }

    #[test]
    fn ks2_same_distribution_passes() {
        let mut rng = stream_rng(11, 0);
        let a: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let r = ks2_test(&Ecdf::new(a), &Ecdf::new(b));
        assert!(r.p_value > 0.001, "p = {}", r.p_value);
    }

    #[test]
    fn ks2_detects_shift() {
        let mut rng = stream_rng(12, 0);
        let a: Vec<f64> = (0..5_000).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..5_000).map(|_| rng.random::<f64>() + 0.2).collect();
        let r = ks2_test(&Ecdf::new(a), &Ecdf::new(b));
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn ks1_uniform_sample() {
        let mut rng = stream_rng(13, 0);
        let a: Vec<f64> = (0..50_000).map(|_| rng.random::<f64>()).collect();
        let r = ks1_test(&Ecdf::new(a), |x| x.clamp(0.0, 1.0));
        assert!(r.p_value > 0.001, "p = {}", r.p_value);
    }

    #[test]
    fn hausdorff_simple() {
        let a = [0.0, 1.0, 2.0];
        let b = [0.1, 1.0, 2.5];
        assert!((hausdorff_1d(&a, &b) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exceedance_bootstrap_scale() {
        // Exceedance fraction ~ p at a grid point: bootstrap SE should be
        // near sqrt(p(1-p)/n).
        let mut rng = stream_rng(14, 0);
        let n = 20_000;
        let data: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let mut sorted = data.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let grid = [0.9];
        let se = bootstrap_exceedance_se(&sorted, &grid, 200, &mut rng)[0];
        let expect = (0.1f64 * 0.9 / n as f64).sqrt();
        assert!((se - expect).abs() < 0.4 * expect, "se {se} vs {expect}");
    }
}
