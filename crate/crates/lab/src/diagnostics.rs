//! Monte Carlo verification harness: empirical recurrence/transience
//! diagnostics via hitting sums and escape statistics, numerical checks of
//! the stopped-tail limits, the constant-multiplier product bounds, and the
//! pathwise comparison inequalities.

use crate::chain::CoupledPair;
use crate::classify::{classify_spec, Outcome, Verdict};
use crate::model::{check_nondegeneracy, tail_profile, DistributionSpec, Law};
use crate::numeric::{log_add_exp, ls_slope, LogSumExp};
use crate::rng::stream_rng;
use crate::stats::{bootstrap_exceedance_se, ks2_test, Ecdf};
use crate::{Error, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

/// Evidence label produced by the recurrence diagnostic. These are
/// consistency labels, never proofs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticConclusion {
    RecurrenceConsistent,
    TransienceConsistent,
    Ambiguous,
}

impl DiagnosticConclusion {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiagnosticConclusion::RecurrenceConsistent => "recurrence_consistent",
            DiagnosticConclusion::TransienceConsistent => "transience_consistent",
            DiagnosticConclusion::Ambiguous => "ambiguous",
        }
    }
}

/// Hitting-sum and escape-statistic evidence for one spec.
#[derive(Debug, Clone)]
pub struct RecurrenceDiagnostic {
    /// the compact set is [0, level].
    pub level: f64,
    pub horizon: usize,
    pub replicates: usize,
    /// log-spaced checkpoints (always containing N/10, N/2 and N).
    pub checkpoints: Vec<usize>,
    /// Ĥ(n) = Σ_{k<=n} P̂(X_k ∈ [0, level]) at the checkpoints.
    pub hitting_sum: Vec<f64>,
    /// bootstrap 95% interval for Ĥ(N).
    pub hitting_ci: (f64, f64),
    /// log10 Ĥ(N) - log10 Ĥ(N/10).
    pub log_slope: f64,
    /// fraction of replicates whose min over [N/10, N] enters the set.
    pub return_fraction: f64,
    pub conclusion: DiagnosticConclusion,
}

impl RecurrenceDiagnostic {
    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "horizon": self.horizon,
            "replicates": self.replicates,
            "checkpoints": self.checkpoints,
            "hitting_sum": self.hitting_sum,
            "hitting_ci": [self.hitting_ci.0, self.hitting_ci.1],
            "log_slope": self.log_slope,
            "return_fraction": self.return_fraction,
            "conclusion": self.conclusion.as_str(),
        })
    }
}

/// decision thresholds: the hitting sum counts as growing when its过
/// last-decade log-slope exceeds 0.05 and as flat below 0.005.
const SLOPE_GROWING: f64 = 0.05;
const SLOPE_FLAT: f64 = 0.005;

fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut pts = vec![horizon / 10, horizon / 2, horizon];
    let mut x = 1.0f64;
    while (x as usize) < horizon {
        pts.push(x as usize);
        x *= 1.25;
    }
    pts.retain(|p| *p >= 1 && *p <= horizon);
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// Simulate `replicates` seeded paths and accumulate the hitting sum of
/// `[0, level]` and the escape statistic (min over the final decade).
///
/// Conclusions: recurrence-consistent when the hitting sum keeps growing
/// (last-decade log-slope > 0.05) and at least half of the paths return to
/// the set late; transience-consistent when the hitting sum flattens
/// (slope < 0.005) and at least 95% of the paths stay out; ambiguous
/// otherwise. Overflowed paths count as escaped from the overflow step on.
pub fn recurrence_diagnostic(
    spec: &DistributionSpec,
    x0: f64,
    level: f64,
    horizon: usize,
    replicates: usize,
    seed: u64,
) -> RecurrenceDiagnostic {
    assert!(horizon >= 1_000, "horizon must be >= 1e3");
    assert!(replicates >= 100, "need >= 1e2 replicates");
    let pts = checkpoints(horizon);

    struct RepOut {
        cum_hits: Vec<u32>,
        escaped: bool,
    }

    let log_level = level.ln();
    let reps: Vec<RepOut> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            // log-domain state: heavy shifts overflow linear floats routinely
            let mut lx = if x0 > 0.0 { x0.ln() } else { f64::NEG_INFINITY };
            let mut hits = 0u32;
            let mut cum = Vec::with_capacity(pts.len());
            let mut next_cp = 0usize;
            let mut window_min = f64::INFINITY;
            // window for the liminf proxy: the same final decade the
            // hitting-sum slope is measured on ([N/2, N] leaves the visit
            // probability of a null recurrent chain stuck near 0.4)
            let window_start = horizon / 10;
            for k in 1..=horizon {
                let (lm, lq) = spec.sample_pair_log(&mut rng);
                lx = log_add_exp(lm + lx, lq);
                if lx <= log_level {
                    hits += 1;
                }
                if k >= window_start {
                    window_min = window_min.min(lx);
                }
                while next_cp < pts.len() && pts[next_cp] == k {
                    cum.push(hits);
                    next_cp += 1;
                }
            }
            RepOut { cum_hits: cum, escaped: window_min > log_level }
        })
        .collect();

    let r = replicates as f64;
    let hitting_sum: Vec<f64> = (0..pts.len())
        .map(|j| reps.iter().map(|o| o.cum_hits[j] as f64).sum::<f64>() / r)
        .collect();
    let return_fraction =
        reps.iter().filter(|o| !o.escaped).count() as f64 / r;

    // bootstrap 95% CI of Ĥ(N) over replicate totals
    let totals: Vec<f64> = reps.iter().map(|o| *o.cum_hits.last().unwrap() as f64).collect();
    let mut rng_boot = stream_rng(seed, 0xB00);
    let mut means: Vec<f64> = (0..200)
        .map(|_| {
            use rand::Rng;
            let mut acc = 0.0;
            for _ in 0..totals.len() {
                acc += totals[rng_boot.random_range(0..totals.len())];
            }
            acc / r
        })
        .collect();
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let hitting_ci = (means[4], means[194]);

    let idx_n = pts.len() - 1;
    let idx_tenth = pts.iter().position(|p| *p == horizon / 10).unwrap();
    let h_n = hitting_sum[idx_n];
    let h_tenth = hitting_sum[idx_tenth];
    let log_slope = if h_n <= 0.0 {
        0.0
    } else if h_tenth <= 0.0 {
        f64::INFINITY
    } else {
        (h_n / h_tenth).log10()
    };

    let conclusion = if log_slope > SLOPE_GROWING && return_fraction >= 0.5 {
        DiagnosticConclusion::RecurrenceConsistent
    } else if log_slope < SLOPE_FLAT && return_fraction <= 0.05 {
        DiagnosticConclusion::TransienceConsistent
    } else {
        DiagnosticConclusion::Ambiguous
    };

    RecurrenceDiagnostic {
        level,
        horizon,
        replicates,
        checkpoints: pts,
        hitting_sum,
        hitting_ci,
        log_slope,
        return_fraction,
        conclusion,
    }
}

/// Result of a stopped-tail limit check.
#[derive(Debug, Clone)]
pub struct TailLimitCheck {
    /// sample mean of the stopping time.
    pub e_sigma_hat: f64,
    pub t_grid: Vec<f64>,
    /// t · P̂(log W > t) along the grid (W = stopped functional).
    pub curve: Vec<f64>,
    pub exceedances: Vec<usize>,
    /// the largest grid point with at least 100 exceedances.
    pub eval_t: f64,
    pub eval_value: f64,
    /// bootstrap standard error of the curve at eval_t.
    pub eval_se: f64,
    /// s_* Êσ and s^* Êσ (equal when the limit exists).
    pub target_lo: f64,
    pub target_hi: f64,
    pub agrees: bool,
}

impl TailLimitCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "e_sigma_hat": self.e_sigma_hat,
            "t_grid": self.t_grid,
            "curve": self.curve,
            "exceedances": self.exceedances,
            "eval_t": self.eval_t,
            "eval_value": self.eval_value,
            "eval_se": self.eval_se,
            "target": [self.target_lo, self.target_hi],
            "agrees": self.agrees,
        })
    }
}

const MIN_EXCEEDANCES: usize = 100;
const SIGMA_CAP: usize = 10_000_000;

fn tail_limit_from_logs(
    spec: &DistributionSpec,
    log_values: Vec<f64>,
    sigmas: Vec<usize>,
    t_grid: &[f64],
    seed: u64,
) -> Result<TailLimitCheck> {
    let r = log_values.len();
    let e_sigma_hat = sigmas.iter().map(|s| *s as f64).sum::<f64>() / r as f64;
    let mut sorted = log_values;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let exceedances: Vec<usize> = t_grid
        .iter()
        .map(|t| r - sorted.partition_point(|v| *v <= *t))
        .collect();
    let curve: Vec<f64> = t_grid
        .iter()
        .zip(&exceedances)
        .map(|(t, e)| t * *e as f64 / r as f64)
        .collect();
    let eval_idx = match (0..t_grid.len())
        .rev()
        .find(|i| exceedances[*i] >= MIN_EXCEEDANCES)
    {
        Some(i) => i,
        None => {
            return Err(Error::InsufficientTailData {
                at: t_grid[0],
                observed: exceedances[0],
                needed: MIN_EXCEEDANCES,
            })
        }
    };
    let mut rng = stream_rng(seed, 0xB001);
    let se_frac = bootstrap_exceedance_se(&sorted, &[t_grid[eval_idx]], 200, &mut rng)[0];
    let eval_se = t_grid[eval_idx] * se_frac;
    let lm = spec.q().log_moments();
    let target_lo = lm.s_star * e_sigma_hat;
    let target_hi = lm.s_upper * e_sigma_hat;
    let eval_value = curve[eval_idx];
    let agrees =
        eval_value >= target_lo - 3.0 * eval_se && eval_value <= target_hi + 3.0 * eval_se;
    Ok(TailLimitCheck {
        e_sigma_hat,
        t_grid: t_grid.to_vec(),
        curve,
        exceedances,
        eval_t: t_grid[eval_idx],
        eval_value,
        eval_se,
        target_lo,
        target_hi,
        agrees,
    })
}

/// Check the stopped-tail limit `t P(log X̂_σ > t) → s Eσ` with
/// `σ = σ^<(c)`, by `replicates` independent draws of `(σ, X̂_σ)`.
/// Agreement means the measured curve at the largest admissible grid point
/// (at least 100 exceedances) sits within three bootstrap standard errors of
/// the bracket `[s_* Êσ, s^* Êσ]`.
pub fn check_tail_lemma(
    spec: &DistributionSpec,
    c: f64,
    t_grid: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<TailLimitCheck> {
    assert!(replicates >= 10_000, "need >= 1e4 replicates");
    assert!(!t_grid.is_empty() && t_grid.windows(2).all(|w| w[0] < w[1]));
    assert!(c >= 0.0);
    let outs: Vec<Result<(f64, usize)>> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut s = 0.0f64;
            let mut acc = LogSumExp::new();
            let mut k = 0usize;
            loop {
                k += 1;
                if k > SIGMA_CAP {
                    return Err(Error::HorizonExhausted { horizon: SIGMA_CAP });
                }
                let (lm, lq) = spec.sample_pair_log(&mut rng);
                let s_prev = s;
                s += lm;
                acc.add(s_prev + lq);
                if s + c * (k as f64) < 0.0 {
                    return Ok((acc.value(), k));
                }
            }
        })
        .collect();
    let mut log_values = Vec::with_capacity(replicates);
    let mut sigmas = Vec::with_capacity(replicates);
    for o in outs {
        let (v, s) = o?;
        log_values.push(v);
        sigmas.push(s);
    }
    tail_limit_from_logs(spec, log_values, sigmas, t_grid, seed)
}

/// Same check for the geometrically weighted block shift
/// `Q(γ) = Σ_{k<=σ} γ^{σ-k} Q_k` (γ = 1 is allowed: plain block sums).
pub fn check_q_gamma_tail(
    spec: &DistributionSpec,
    gamma: f64,
    c: f64,
    t_grid: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<TailLimitCheck> {
    assert!(replicates >= 10_000);
    assert!(gamma > 0.0 && gamma <= 1.0);
    assert!(c >= 0.0);
    let lg = gamma.ln();
    let outs: Vec<Result<(f64, usize)>> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut s = 0.0f64;
            let mut log_qs: Vec<f64> = Vec::new();
            let mut k = 0usize;
            loop {
                k += 1;
                if k > SIGMA_CAP {
                    return Err(Error::HorizonExhausted { horizon: SIGMA_CAP });
                }
                let (lm, lq) = spec.sample_pair_log(&mut rng);
                s += lm;
                log_qs.push(lq);
                if s + c * (k as f64) < 0.0 {
                    let sigma = k;
                    let mut acc = LogSumExp::new();
                    for (j, lq) in log_qs.iter().enumerate() {
                        acc.add((sigma - (j + 1)) as f64 * lg + lq);
                    }
                    return Ok((acc.value(), sigma));
                }
            }
        })
        .collect();
    let mut log_values = Vec::with_capacity(replicates);
    let mut sigmas = Vec::with_capacity(replicates);
    for o in outs {
        let (v, s) = o?;
        log_values.push(v);
        sigmas.push(s);
    }
    tail_limit_from_logs(spec, log_values, sigmas, t_grid, seed)
}

/// Exact-product oracle versus Monte Carlo for the constant-multiplier chain.
#[derive(Debug, Clone)]
pub struct KellererBoundsReport {
    pub gamma: f64,
    /// threshold in log scale: the event is `X̂_n(γ) <= e^t`.
    pub t: f64,
    pub n_grid: Vec<usize>,
    /// `Π_{j<n} F_Q(t + jθ)` with `θ = log(1/γ)`: the exact law of the
    /// running maximum of the summands, and the analytic envelope of the MC
    /// curve.
    pub analytic: Vec<f64>,
    pub mc: Vec<f64>,
    /// binomial standard error under the analytic probability.
    pub se: Vec<f64>,
    pub within_3se: Vec<bool>,
    /// least-squares slope of log analytic vs log n over the grid (value, se).
    pub product_slope: (f64, f64),
    pub mc_slope: (f64, f64),
    /// leading zero factors skipped for the slope fit (present when the
    /// threshold sits below the essential infimum of Q).
    pub skipped_zero_factors: usize,
}

impl KellererBoundsReport {
    pub fn to_json(&self) -> Value {
        json!({
            "gamma": self.gamma,
            "t": self.t,
            "n_grid": self.n_grid,
            "analytic": self.analytic,
            "mc": self.mc,
            "se": self.se,
            "within_3se": self.within_3se,
            "product_slope": [self.product_slope.0, self.product_slope.1],
            "mc_slope": [self.mc_slope.0, self.mc_slope.1],
            "skipped_zero_factors": self.skipped_zero_factors,
        })
    }
}

/// The exact partial products `Π_{j=0}^{n-1} F_Q(t + jθ)` for every n in the
/// grid, plus a slope fit that skips leading zero factors.
pub fn kellerer_product_oracle(
    q_law: &Law,
    gamma: f64,
    t: f64,
    n_grid: &[usize],
) -> (Vec<f64>, (f64, f64), usize) {
    let theta = (1.0 / gamma).ln();
    let n_max = *n_grid.last().unwrap();
    let mut skipped = 0usize;
    let mut seen_positive = false;
    let mut log_prod = 0.0f64;
    let mut out = Vec::with_capacity(n_grid.len());
    let mut fit_x = Vec::new();
    let mut fit_y = Vec::new();
    let mut gi = 0usize;
    let mut zero = false;
    for j in 0..n_max {
        let f = q_law.cdf_log(t + j as f64 * theta).clamp(0.0, 1.0);
        if f <= 0.0 {
            if !seen_positive {
                skipped += 1;
            } else {
                zero = true;
            }
        } else {
            seen_positive = true;
            log_prod += f.ln();
        }
        while gi < n_grid.len() && n_grid[gi] == j + 1 {
            out.push(if zero { 0.0 } else { log_prod.exp() * if skipped > 0 { 1.0 } else { 1.0 } });
            gi += 1;
        }
    }
    // slope over the positive entries, with the zero-skipped product
    for (i, n) in n_grid.iter().enumerate() {
        let p = out[i];
        if p > 0.0 && *n > skipped {
            fit_x.push((*n as f64).ln());
            fit_y.push(p.ln());
        }
    }
    let slope = if fit_x.len() >= 3 { ls_slope(&fit_x, &fit_y) } else { (f64::NAN, f64::NAN) };
    // when factors were skipped the reported products are the shifted ones
    (out, slope, skipped)
}

/// Estimate `P(X̂_n(γ) <= e^t)` across the grid by Monte Carlo and compare
/// with the exact product oracle within three binomial standard errors.
pub fn check_kellerer_bounds(
    q_law: &Law,
    gamma: f64,
    t: f64,
    n_grid: &[usize],
    replicates: usize,
    seed: u64,
) -> KellererBoundsReport {
    assert!(gamma > 0.0 && gamma < 1.0);
    assert!(!n_grid.is_empty() && n_grid.windows(2).all(|w| w[0] < w[1]));
    let n_max = *n_grid.last().unwrap();
    let threshold = t.exp();
    let lg = gamma.ln();

    // the backward sum is nondecreasing in n: one first-crossing index per
    // replicate determines every indicator
    let crossings: Vec<usize> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut sum = 0.0f64;
            for k in 1..=n_max {
                let lq = q_law.sample_log(&mut rng);
                sum += ((k - 1) as f64 * lg + lq).exp();
                if sum > threshold {
                    return k;
                }
            }
            n_max + 1
        })
        .collect();
    let mut sorted = crossings;
    sorted.sort_unstable();

    let (analytic, product_slope, skipped) =
        kellerer_product_oracle(q_law, gamma, t, n_grid);
    let r = replicates as f64;
    let mut mc = Vec::with_capacity(n_grid.len());
    let mut se = Vec::with_capacity(n_grid.len());
    let mut within = Vec::with_capacity(n_grid.len());
    for (i, n) in n_grid.iter().enumerate() {
        // X̂_n <= e^t iff the first crossing happens after n
        let count = sorted.len() - sorted.partition_point(|c| *c <= *n);
        let p_hat = count as f64 / r;
        let p = analytic[i];
        let s = (p * (1.0 - p) / r).sqrt();
        mc.push(p_hat);
        se.push(s);
        within.push((p_hat - p).abs() <= 3.0 * s.max(1e-12));
    }
    let mut fit_x = Vec::new();
    let mut fit_y = Vec::new();
    for (i, n) in n_grid.iter().enumerate() {
        if mc[i] > 0.0 {
            fit_x.push((*n as f64).ln());
            fit_y.push(mc[i].ln());
        }
    }
    let mc_slope = if fit_x.len() >= 3 { ls_slope(&fit_x, &fit_y) } else { (f64::NAN, f64::NAN) };
    KellererBoundsReport {
        gamma,
        t,
        n_grid: n_grid.to_vec(),
        analytic,
        mc,
        se,
        within_3se: within,
        product_slope,
        mc_slope,
        skipped_zero_factors: skipped,
    }
}

/// Which comparison bound a coupled pair is supposed to satisfy.
#[derive(Debug, Clone, Copy)]
pub enum ComparisonBound {
    /// `X'_n - X_n >= Π_n (x0' - x0) - t0 (1-γ^n)/(1-γ)`.
    Shift { t0: f64 },
    /// `|X'_n - X_n| <= γ^n |x0' - x0| + β (1-γ^n)/(1-γ)`.
    Truncate { beta: f64 },
}

/// Pathwise verification report for a coupled pair.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub pass: bool,
    /// tightest observed margin (bound minus observed, nonnegative iff pass).
    pub worst_margin: f64,
    pub worst_step: usize,
}

/// Assert the displayed comparison bound at every step of the pair. Requires
/// `M <= γ` along the whole path; a failed bound signals an implementation
/// bug, since these inequalities are pathwise theorems.
pub fn verify_comparison_bounds(
    pair: &CoupledPair,
    gamma: f64,
    bound: ComparisonBound,
) -> Result<ComparisonReport> {
    assert!(gamma > 0.0 && gamma < 1.0);
    if pair.log_m.iter().any(|lm| *lm > gamma.ln() + 1e-12) {
        return Err(Error::InvalidSpec(format!(
            "comparison bounds need M <= gamma = {gamma} along the path"
        )));
    }
    let dx0 = pair.diff[0];
    let mut pi = 1.0f64;
    let mut worst = f64::INFINITY;
    let mut worst_step = 0usize;
    for k in 1..=pair.steps() {
        pi *= pair.log_m[k - 1].exp();
        let geom = (1.0 - gamma.powi(k as i32)) / (1.0 - gamma);
        let margin = match bound {
            ComparisonBound::Shift { t0 } => {
                let lower = pi * dx0 - t0 * geom;
                pair.diff[k] - lower
            }
            ComparisonBound::Truncate { beta } => {
                let upper = gamma.powi(k as i32) * dx0.abs() + beta * geom;
                upper - pair.diff[k].abs()
            }
        };
        if margin < worst {
            worst = margin;
            worst_step = k;
        }
    }
    let tol = -1e-9;
    Ok(ComparisonReport { pass: worst >= tol, worst_margin: worst, worst_step })
}

/// Verdict plus diagnostic, with the contradiction flag of the agreement
/// protocol: a diagnostic may be ambiguous but must never contradict the
/// classifier.
#[derive(Debug, Clone)]
pub struct AgreementReport {
    pub verdict: Verdict,
    pub diagnostic: RecurrenceDiagnostic,
    pub contradictory: bool,
}

impl AgreementReport {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.to_json(),
            "diagnostic": self.diagnostic.to_json(),
            "contradictory": self.contradictory,
        })
    }
}

/// Classify the spec and run the recurrence diagnostic against the verdict.
pub fn run_agreement(
    spec: &DistributionSpec,
    level: f64,
    horizon: usize,
    replicates: usize,
    seed: u64,
) -> Result<AgreementReport> {
    let profile = tail_profile(spec)?;
    let nondeg = check_nondegeneracy(spec);
    let verdict = classify_spec(&profile, &nondeg);
    let diagnostic = recurrence_diagnostic(spec, 0.0, level, horizon, replicates, seed);
    let contradictory = matches!(
        (verdict.outcome, diagnostic.conclusion),
        (
            Outcome::PositiveRecurrent | Outcome::NullRecurrent,
            DiagnosticConclusion::TransienceConsistent
        ) | (Outcome::Transient, DiagnosticConclusion::RecurrenceConsistent)
    );
    Ok(AgreementReport { verdict, diagnostic, contradictory })
}

/// Two-sample KS distance between the chain's empirical laws at N and 2N
/// (in log scale, which leaves the KS statistic unchanged): small values
/// certify that the marginal law has stabilized (positive recurrent regime).
pub fn law_stabilization_ks(
    spec: &DistributionSpec,
    n: usize,
    replicates: usize,
    seed: u64,
) -> f64 {
    let pairs: Vec<(f64, f64)> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut lx = f64::NEG_INFINITY;
            let mut at_n = f64::NEG_INFINITY;
            for k in 1..=2 * n {
                let (lm, lq) = spec.sample_pair_log(&mut rng);
                lx = log_add_exp(lm + lx, lq);
                if k == n {
                    at_n = lx;
                }
            }
            (at_n, lx)
        })
        .collect();
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    ks2_test(&Ecdf::new(a), &Ecdf::new(b)).statistic
}

/// Helper for tests and the verify command: draw `replicates` values of
/// log X_n (forward) and log X̂_n (backward) from independent streams.
/// KS comparisons are invariant under the log map.
pub fn forward_backward_samples(
    spec: &DistributionSpec,
    n: usize,
    replicates: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let fwd: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, 2 * i as u64);
            let mut lx = f64::NEG_INFINITY;
            for _ in 0..n {
                let (lm, lq) = spec.sample_pair_log(&mut rng);
                lx = log_add_exp(lm + lx, lq);
            }
            lx
        })
        .collect();
    let bwd: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, 2 * i as u64 + 1);
            let mut s = 0.0f64;
            let mut acc = LogSumExp::new();
            for _ in 0..n {
                let (lm, lq) = spec.sample_pair_log(&mut rng);
                acc.add(s + lq);
                s += lm;
            }
            acc.value()
        })
        .collect();
    (fwd, bwd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain;
    use crate::model::law::LogTail;
    use crate::model::presets;
    use std::sync::Arc;

    #[test]
    fn deterministic_convergent_chain_is_recurrence_consistent() {
        // M ≡ 1/2, Q ≡ 1 converges to 2 ∈ [0, 3]: hits accumulate linearly
        let spec = presets::deterministic(0.5, 1.0);
        let d = recurrence_diagnostic(&spec, 0.0, 3.0, 2_000, 100, 7);
        assert_eq!(d.conclusion, DiagnosticConclusion::RecurrenceConsistent);
        // Ĥ(n) ≈ n: log-slope ≈ 1 over a decade
        assert!((d.log_slope - 1.0).abs() < 0.05, "slope {}", d.log_slope);
        assert!(d.hitting_sum.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn tail_dichotomy_labels() {
        // small horizon version of the acceptance dichotomy
        let rec = presets::constant_m_log_tail(0.5);
        let d = recurrence_diagnostic(&rec, 0.0, 2.2, 20_000, 150, 11);
        assert_eq!(d.conclusion, DiagnosticConclusion::RecurrenceConsistent);

        let tra = presets::constant_m_log_tail(2.0);
        let d = recurrence_diagnostic(&tra, 0.0, 2.2, 20_000, 150, 11);
        assert_eq!(d.conclusion, DiagnosticConclusion::TransienceConsistent);
    }

    #[test]
    fn agreement_protocol_no_contradictions() {
        for s in [0.5, 2.0] {
            let spec = presets::constant_m_log_tail(s);
            let rep = run_agreement(&spec, 2.2, 20_000, 150, 3).unwrap();
            assert!(!rep.contradictory, "s = {s}");
        }
    }

    #[test]
    fn tail_lemma_sigma_one_regime() {
        // M ≡ e^{-1}, c = 1/2: the drifted walk crosses immediately, σ ≡ 1,
        // so the stopped sum is just Q_1 and the limit is s itself
        let spec = presets::constant_m_log_tail(1.0);
        let grid: Vec<f64> = (2..=10).map(|i| 2f64.powi(i)).collect();
        let chk = check_tail_lemma(&spec, 0.5, &grid, 20_000, 5).unwrap();
        assert!((chk.e_sigma_hat - 1.0).abs() < 1e-12);
        assert!(chk.agrees, "curve {} vs target {}", chk.eval_value, chk.target_lo);
        // bounded Q: the curve collapses to zero
        let spec = presets::deterministic((-1.0f64).exp(), 5.0);
        let chk = check_tail_lemma(&spec, 0.5, &[2.0, 4.0, 8.0], 20_000, 5);
        // every draw equals 5: no exceedances beyond log 5 ≈ 1.6
        assert!(matches!(chk, Err(Error::InsufficientTailData { .. })));
    }

    #[test]
    fn q_gamma_sigma_one_regime() {
        let spec = presets::constant_m_log_tail(1.0);
        let grid: Vec<f64> = (2..=10).map(|i| 2f64.powi(i)).collect();
        let chk = check_q_gamma_tail(&spec, 0.6, 0.5, &grid, 20_000, 6).unwrap();
        assert!((chk.e_sigma_hat - 1.0).abs() < 1e-12);
        assert!(chk.agrees);
    }

    #[test]
    fn kellerer_product_slopes() {
        // γ = e^{-1}: products decay like n^{-s}
        let gamma = (-1.0f64).exp();
        let grid: Vec<usize> = vec![10, 30, 100, 300, 1000, 3000, 10000];
        let q: crate::model::Law = Arc::new(LogTail::new(2.0, 1.0).unwrap());
        let (_, slope, skipped) = kellerer_product_oracle(&q, gamma, 5.0, &grid);
        assert_eq!(skipped, 0);
        assert!((slope.0 + 2.0).abs() < 0.25, "slope {}", slope.0);
        let q: crate::model::Law = Arc::new(LogTail::new(0.5, 1.0).unwrap());
        let (_, slope, _) = kellerer_product_oracle(&q, gamma, 5.0, &grid);
        assert!((slope.0 + 0.5).abs() < 0.1, "slope {}", slope.0);

        // t = 0 sits below the essential infimum of a log_tail variable:
        // leading factors vanish and are skipped for the slope
        let (products, slope, skipped) = kellerer_product_oracle(&q, gamma, 0.0, &grid);
        assert!(skipped >= 1);
        assert!(products[0] > 0.0);
        assert!(slope.0 < -0.3);
    }

    #[test]
    fn kellerer_mc_matches_product() {
        let gamma = (-1.0f64).exp();
        let q: crate::model::Law = Arc::new(LogTail::new(0.5, 1.0).unwrap());
        let grid: Vec<usize> = vec![10, 100, 1000];
        let rep = check_kellerer_bounds(&q, gamma, 20.0, &grid, 20_000, 8);
        // at these scales the sum and its running maximum agree within noise
        for (i, ok) in rep.within_3se.iter().enumerate() {
            assert!(
                *ok,
                "n = {}: mc {} vs product {} (se {})",
                rep.n_grid[i], rep.mc[i], rep.analytic[i], rep.se[i]
            );
        }
    }

    #[test]
    fn comparison_bounds_pass() {
        let spec = presets::deterministic(0.5, 1.0);
        let mut rng = stream_rng(30, 0);
        let pair = chain::couple_truncate(&spec, 1.0, 0.0, 0.0, 5_000, &mut rng).unwrap();
        let rep =
            verify_comparison_bounds(&pair, 0.5, ComparisonBound::Truncate { beta: 1.0 })
                .unwrap();
        assert!(rep.pass, "worst margin {} at {}", rep.worst_margin, rep.worst_step);
        // the bound is asymptotically tight here: margin tends to zero
        assert!(rep.worst_margin < 0.05);

        let spec = presets::constant_m_log_tail(1.0);
        let q_prime: crate::model::Law = Arc::new(LogTail::new(2.0, 1.0).unwrap());
        let mut rng = stream_rng(31, 0);
        let pair =
            chain::couple_shift(&spec, &q_prime, 0.0, 2.0, 0.0, 5_000, &mut rng).unwrap();
        let rep = verify_comparison_bounds(
            &pair,
            (-1.0f64).exp(),
            ComparisonBound::Shift { t0: 0.0 },
        )
        .unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn forward_backward_law_equality() {
        let spec = presets::constant_m_log_tail(0.5);
        let (f, b) = forward_backward_samples(&spec, 50, 20_000, 9);
        let r = ks2_test(&Ecdf::new(f), &Ecdf::new(b));
        assert!(r.p_value > 0.001, "p = {}", r.p_value);
    }

    #[test]
    fn stabilization_for_positive_recurrent_chain() {
        let spec = presets::constant_m_log_exp_q(1.0);
        let d = law_stabilization_ks(&spec, 2_000, 4_000, 12);
        assert!(d <= 0.03, "KS distance {d}");
    }
}
