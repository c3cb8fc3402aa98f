//! The decision engine: applies the recurrence/transience criteria to a tail
//! profile, and provides the series-based tests (partial-product series with
//! Raabe's statistic, Bertrand and Kummer variants for the boundary case,
//! and the constant-multiplier tail comparison).

use crate::model::{DistributionSpec, Integral, Nondegeneracy, TailProfile};
use crate::{Error, Result};
use serde_json::{json, Value};

/// Classification outcome for the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    PositiveRecurrent,
    NullRecurrent,
    Transient,
    Boundary,
    Undetermined,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::PositiveRecurrent => "PositiveRecurrent",
            Outcome::NullRecurrent => "NullRecurrent",
            Outcome::Transient => "Transient",
            Outcome::Boundary => "Boundary",
            Outcome::Undetermined => "Undetermined",
        }
    }
}

/// A classification with the rule that fired and the numbers it compared.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    /// stable identifier of the criterion that fired.
    pub rule: &'static str,
    /// the witness numbers behind the decision, name → value.
    pub witness: Vec<(&'static str, f64)>,
    pub caveats: Vec<String>,
}

impl Verdict {
    pub fn to_json(&self) -> Value {
        let witness: Value = self
            .witness
            .iter()
            .map(|(k, v)| {
                (
                    k.to_string(),
                    if v.is_finite() { json!(v) } else { json!(v.to_string()) },
                )
            })
            .collect::<serde_json::Map<String, Value>>()
            .into();
        json!({
            "outcome": self.outcome.as_str(),
            "rule": self.rule,
            "witness": witness,
            "caveats": self.caveats,
        })
    }
}

/// Classify a spec from its tail profile and nondegeneracy screen.
///
/// Precedence: trivial cases, then perpetuity convergence (I_Q finite ⇒
/// positive recurrent), then the doubly-heavy criterion (both one-sided log
/// moments of M infinite, bounded reciprocal tail index ⇒ null recurrent),
/// then the tail-vs-drift dichotomy (limsup below the negative drift ⇒ null
/// recurrent, liminf above it ⇒ transient), then the boundary bracket.
/// Estimated profiles must win their inequality by two standard errors.
pub fn classify_spec(profile: &TailProfile, nondeg: &Nondegeneracy) -> Verdict {
    let mut caveats = Vec::new();
    let estimated = profile.is_estimated();
    if estimated {
        caveats.push("estimated tail profile".to_string());
    }

    // (i) trivial cases
    match nondeg {
        Nondegeneracy::TrivialB => {
            return Verdict {
                outcome: Outcome::PositiveRecurrent,
                rule: "trivial_shift_zero",
                witness: vec![("perpetuity_value", 0.0)],
                caveats,
            };
        }
        Nondegeneracy::TrivialC { r } => {
            return Verdict {
                outcome: Outcome::PositiveRecurrent,
                rule: "trivial_fixed_point",
                witness: vec![("fixed_point", *r)],
                caveats,
            };
        }
        Nondegeneracy::Ok => {}
    }

    // margins for estimated profiles: two standard errors on each side
    let margin = |se: f64| if estimated { 2.0 * se } else { 0.0 };

    // (ii) perpetuity convergence
    match profile.iq.value {
        Some(Integral::Finite(v)) => {
            return Verdict {
                outcome: Outcome::PositiveRecurrent,
                rule: "perpetuity_convergent",
                witness: vec![("iq", v)],
                caveats,
            };
        }
        Some(Integral::Divergent) => {}
        None => {
            caveats.push(
                "perpetuity-convergence integral not assessed; assuming the divergent \
                 contractive regime"
                    .to_string(),
            );
        }
    }

    let s_up = profile.s_upper.value;
    let s_lo = profile.s_star.value;
    let s_up_hi = s_up + margin(profile.s_upper.se());
    let s_lo_lo = s_lo - margin(profile.s_star.se());

    // (iii) doubly heavy log-tails of M
    if profile.m_plus.value == f64::INFINITY
        && profile.m_minus.value == f64::INFINITY
        && s_up_hi < f64::INFINITY
    {
        return Verdict {
            outcome: Outcome::NullRecurrent,
            rule: "doubly_heavy_drift",
            witness: vec![("s_upper", s_up), ("m_plus", f64::INFINITY)],
            caveats,
        };
    }

    // (iv) tail-vs-drift dichotomy; the negative drift may be +∞
    let nd = profile.neg_drift();
    if !nd.is_nan() && nd > 0.0 {
        let nd_lo = nd - margin(profile.m_mean.se());
        let nd_hi = nd + margin(profile.m_mean.se());
        debug_assert!(!(s_up_hi < nd_lo && s_lo_lo > nd_hi), "dichotomy regions overlap");
        if s_up_hi < nd_lo {
            return Verdict {
                outcome: Outcome::NullRecurrent,
                rule: "tail_below_drift",
                witness: vec![("s_upper", s_up), ("neg_drift", nd)],
                caveats,
            };
        }
        if nd.is_finite() && s_lo_lo > nd_hi {
            return Verdict {
                outcome: Outcome::Transient,
                rule: "tail_above_drift",
                witness: vec![("s_star", s_lo), ("neg_drift", nd)],
                caveats,
            };
        }
        // (v) boundary bracket
        if !estimated && s_lo <= nd && nd <= s_up {
            return Verdict {
                outcome: Outcome::Boundary,
                rule: "boundary_bracket",
                witness: vec![("s_star", s_lo), ("neg_drift", nd), ("s_upper", s_up)],
                caveats,
            };
        }
    }

    // (vi)
    Verdict {
        outcome: Outcome::Undetermined,
        rule: "undetermined",
        witness: vec![("s_star", s_lo), ("s_upper", s_up), ("neg_drift", nd)],
        caveats,
    }
}

/// What a series decision means for the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesImplication {
    Recurrent,
    NullRecurrent,
    Transient,
    Inconclusive,
}

/// Convergence decision of a partial-product series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesDecision {
    Divergent,
    Convergent,
    Inconclusive,
}

/// Evaluation of `Σ_n Π_{k<=n} F(thresholds_k)` together with the Raabe
/// statistic `R_n = n (b_n / b_{n+1} - 1)` of its summands.
#[derive(Debug, Clone)]
pub struct SeriesReport {
    /// b_n = Π_{k=0}^{n} F_k (may underflow to zero harmlessly; the Raabe
    /// statistic is computed from the factors, not the products).
    pub partial_products: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// R_n for n = 1..horizon-1; positive for decreasing summands, with
    /// limit above 1 meaning convergence and below 1 divergence.
    pub raabe: Vec<f64>,
    pub decision: SeriesDecision,
    pub implication: SeriesImplication,
    pub horizon: usize,
    /// mean Raabe statistic over the last decade.
    pub raabe_estimate: f64,
}

impl SeriesReport {
    pub fn to_json(&self) -> Value {
        // subsample the arrays on a log grid for reporting
        let idx: Vec<usize> = log_indices(self.horizon);
        let pick = |v: &Vec<f64>| -> Vec<Value> {
            idx.iter().filter(|i| **i < v.len()).map(|i| json!([i, v[*i]])).collect()
        };
        json!({
            "decision": format!("{:?}", self.decision),
            "implication": format!("{:?}", self.implication),
            "horizon": self.horizon,
            "raabe_estimate": self.raabe_estimate,
            "partial_products": pick(&self.partial_products),
            "partial_sums": pick(&self.partial_sums),
            "raabe": pick(&self.raabe),
        })
    }
}

fn log_indices(n: usize) -> Vec<usize> {
    let mut idx = Vec::new();
    let mut i = 1usize;
    while i < n {
        idx.push(i);
        i = (i * 5 / 4).max(i + 1);
    }
    if n > 0 {
        idx.push(n - 1);
    }
    idx.dedup();
    idx
}

/// Raabe decision margin.
const RAABE_DELTA: f64 = 0.05;

fn series_engine<F: Fn(usize) -> f64>(factor: F, n_max: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut log_b = 0.0f64;
    let mut products = Vec::with_capacity(n_max);
    let mut sums = Vec::with_capacity(n_max);
    let mut raabe = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    for n in 0..n_max {
        let f = factor(n).clamp(0.0, 1.0);
        log_b += f.ln();
        let b = log_b.exp();
        acc += b;
        products.push(b);
        sums.push(acc);
        if n >= 1 {
            // R_{n} with b_n / b_{n+1} = 1 / F_{n+1}
            let f_next = factor(n + 1).clamp(0.0, 1.0);
            if f_next > 0.0 {
                raabe.push(n as f64 * (1.0 / f_next - 1.0));
            } else {
                raabe.push(f64::INFINITY);
            }
        }
    }
    (products, sums, raabe)
}

fn raabe_decision(raabe: &[f64], sums: &[f64]) -> (SeriesDecision, f64) {
    if raabe.len() < 20 {
        return (SeriesDecision::Inconclusive, f64::NAN);
    }
    let tail = &raabe[raabe.len() - raabe.len() / 10..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let last = *raabe.last().unwrap();
    // stabilization: the endpoint and the decade mean must agree
    if !last.is_finite() || (last - mean).abs() > RAABE_DELTA / 2.0 {
        return (SeriesDecision::Inconclusive, mean);
    }
    if mean <= 1.0 - RAABE_DELTA {
        return (SeriesDecision::Divergent, mean);
    }
    if mean >= 1.0 + RAABE_DELTA {
        return (SeriesDecision::Convergent, mean);
    }
    // Raabe is blind near its boundary (harmonic-like summands). Steady
    // growth of the partial sums over the last decade still certifies
    // divergence; the converse upgrade is never made, because genuinely
    // convergent series can flatten arbitrarily slowly.
    let s_n = *sums.last().unwrap();
    let s_tenth = sums[sums.len() / 10 - 1];
    if s_tenth > 0.0 && s_n / s_tenth >= 1.15 {
        return (SeriesDecision::Divergent, mean);
    }
    (SeriesDecision::Inconclusive, mean)
}

/// The bounded-multiplier series criterion: partial products of
/// `P(Q <= y e^{-k m})` for `k = 0..n`, summed over `n`. Divergence of the
/// series means the chain is recurrent, convergence transient. Requires M
/// supported in a compact subset of `(0, ∞)` and `P(Q <= y) > 0`.
pub fn zerner_series(spec: &DistributionSpec, y: f64, n_max: usize) -> Result<SeriesReport> {
    assert!(y > 0.0 && n_max >= 100);
    let sup = spec.m().support();
    if !(sup.lo > 0.0 && sup.hi.is_finite()) {
        return Err(Error::PreconditionUnbounded(format!(
            "support of M is [{}, {}]",
            sup.lo, sup.hi
        )));
    }
    let lm = spec.m().log_moments();
    let m_mean = lm.e_log_plus - lm.e_log_minus; // finite by the support check
    if spec.q().cdf_log(y.ln()) <= 0.0 {
        return Err(Error::ZeroMassAtLevel(y));
    }
    let ly = y.ln();
    let (products, sums, raabe) =
        series_engine(|k| spec.q().cdf_log(ly - k as f64 * m_mean), n_max);
    let (decision, estimate) = raabe_decision(&raabe, &sums);
    let implication = match decision {
        SeriesDecision::Divergent => SeriesImplication::Recurrent,
        SeriesDecision::Convergent => SeriesImplication::Transient,
        SeriesDecision::Inconclusive => SeriesImplication::Inconclusive,
    };
    Ok(SeriesReport {
        partial_products: products,
        partial_sums: sums,
        raabe,
        decision,
        implication,
        horizon: n_max,
        raabe_estimate: estimate,
    })
}

/// Boundary-case series for degenerate `M = e^m` a.s.: partial products of
/// `F(x - m k)` for `k = 0..n-1`, where `F` is the CDF of `log Q`.
/// Divergence means null recurrence, convergence transience.
pub fn boundary_series(spec: &DistributionSpec, x: f64, n_max: usize) -> Result<SeriesReport> {
    assert!(x >= 0.0 && n_max >= 100);
    let atoms = spec.m().atoms().unwrap_or_default();
    if atoms.len() != 1 {
        return Err(Error::PreconditionNotDegenerateM);
    }
    let m_mean = atoms[0].0.ln();
    if spec.q().cdf_log(x) <= 0.0 {
        return Err(Error::ZeroMassAtLevel(x.exp()));
    }
    let (products, sums, raabe) =
        series_engine(|k| spec.q().cdf_log(x - k as f64 * m_mean), n_max);
    let (decision, estimate) = raabe_decision(&raabe, &sums);
    let implication = match decision {
        SeriesDecision::Divergent => SeriesImplication::NullRecurrent,
        SeriesDecision::Convergent => SeriesImplication::Transient,
        SeriesDecision::Inconclusive => SeriesImplication::Inconclusive,
    };
    Ok(SeriesReport {
        partial_products: products,
        partial_sums: sums,
        raabe,
        decision,
        implication,
        horizon: n_max,
        raabe_estimate: estimate,
    })
}

/// Outcome of the Bertrand-style second-order tail test in the boundary case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BertrandOutcome {
    NullRecurrent,
    Transient,
    Inconclusive,
}

/// Boundary-case second-order test: writing
/// `1 - F(x) = -m/x + f(x)/(x log x)`, the chain is null recurrent when
/// `limsup f < -m` and transient when `liminf f > -m`. Decides from the top
/// decade of the grid with a stability margin of twice the grid-to-grid
/// oscillation.
pub fn bertrand_test<T: Fn(f64) -> f64>(
    tail_log_q: T,
    m_mean: f64,
    t_grid: &[f64],
) -> BertrandOutcome {
    assert!(m_mean < 0.0 && m_mean.is_finite());
    assert!(t_grid.len() >= 4 && t_grid.windows(2).all(|w| w[0] < w[1]));
    let nd = -m_mean;
    let f_vals: Vec<f64> = t_grid
        .iter()
        .map(|x| (tail_log_q(*x) - nd / x) * x * x.ln())
        .collect();
    let top = &f_vals[f_vals.len() - (f_vals.len() / 4).max(2)..];
    let osc = top.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0f64, f64::max);
    let max_d = top.iter().map(|f| f - nd).fold(f64::NEG_INFINITY, f64::max);
    let min_d = top.iter().map(|f| f - nd).fold(f64::INFINITY, f64::min);
    if max_d < -2.0 * osc && max_d < 0.0 {
        BertrandOutcome::NullRecurrent
    } else if min_d > 2.0 * osc && min_d > 0.0 {
        BertrandOutcome::Transient
    } else {
        BertrandOutcome::Inconclusive
    }
}

/// Result of the Kummer-style comparison with a caller-supplied sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum KummerOutcome {
    /// both conditions held on the whole horizon (finite-horizon evidence).
    NullRecurrent { checked_to: usize },
    NotEstablished { first_failure: Option<usize> },
}

/// Boundary-case test via a candidate sequence `p_k > 0`: null recurrence
/// holds iff `F(-m k) >= p_k / p_{k+1}` for all k and `Σ 1/p_k = ∞`. Both
/// conditions are checked up to `n_max`; the divergence of `Σ 1/p_k` is
/// judged by its last-decade growth.
pub fn kummer_test<F: Fn(f64) -> f64, P: Fn(usize) -> f64>(
    cdf_log_q: F,
    m_mean: f64,
    p_seq: P,
    n_max: usize,
) -> KummerOutcome {
    assert!(m_mean < 0.0 && m_mean.is_finite());
    let nd = -m_mean;
    let mut recip_sum = 0.0;
    let mut recip_at_tenth = 0.0;
    for k in 1..=n_max {
        let pk = p_seq(k);
        let pk1 = p_seq(k + 1);
        assert!(pk > 0.0 && pk1 > 0.0, "p sequence must be positive");
        if cdf_log_q(nd * k as f64) < pk / pk1 {
            return KummerOutcome::NotEstablished { first_failure: Some(k) };
        }
        recip_sum += 1.0 / pk;
        if k == n_max / 10 {
            recip_at_tenth = recip_sum;
        }
    }
    // Σ 1/p_k must keep growing: inspect the last decade
    if recip_at_tenth > 0.0 && recip_sum / recip_at_tenth >= 1.1 {
        KummerOutcome::NullRecurrent { checked_to: n_max }
    } else {
        KummerOutcome::NotEstablished { first_failure: None }
    }
}

/// Outcome of the constant-multiplier tail comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KellererOutcome {
    Transient,
    NullRecurrent,
    OutsideScope,
}

/// One-sided support comparison against a constant multiplier: transient if
/// `M >= γ` a.s. and `s_* > log(1/γ)`; null recurrent if `M <= γ` a.s. and
/// `s^* < log(1/γ)`. Errors when neither one-sided support condition can be
/// certified from the family.
pub fn kellerer_check(spec: &DistributionSpec, gamma: f64) -> Result<KellererOutcome> {
    assert!(gamma > 0.0 && gamma < 1.0);
    let sup = spec.m().support();
    let lm = spec.q().log_moments();
    let level = (1.0 / gamma).ln();
    let above = sup.lo >= gamma - 1e-12;
    let below = sup.hi <= gamma + 1e-12;
    if !above && !below {
        return Err(Error::SupportConditionUnverifiable(format!(
            "support of M is [{}, {}], neither side of gamma = {gamma}",
            sup.lo, sup.hi
        )));
    }
    if above && lm.s_star > level {
        return Ok(KellererOutcome::Transient);
    }
    if below && lm.s_upper < level {
        return Ok(KellererOutcome::NullRecurrent);
    }
    Ok(KellererOutcome::OutsideScope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::law::{LogTail, PointMass};
    use crate::model::{check_nondegeneracy, presets, tail_profile, DistributionSpec};
    use std::sync::Arc;

    fn classify(spec: &DistributionSpec) -> Verdict {
        let profile = tail_profile(spec).unwrap();
        let nondeg = check_nondegeneracy(spec);
        classify_spec(&profile, &nondeg)
    }

    #[test]
    fn classify_dichotomy_examples() {
        let v = classify(&presets::constant_m_log_tail(0.5));
        assert_eq!(v.outcome, Outcome::NullRecurrent);
        assert_eq!(v.rule, "tail_below_drift");
        assert_eq!(v.witness[0], ("s_upper", 0.5));
        assert_eq!(v.witness[1], ("neg_drift", 1.0));

        let v = classify(&presets::constant_m_log_tail(2.0));
        assert_eq!(v.outcome, Outcome::Transient);
        assert_eq!(v.rule, "tail_above_drift");

        let v = classify(&presets::constant_m_log_exp_q(1.0));
        assert_eq!(v.outcome, Outcome::PositiveRecurrent);
        assert_eq!(v.rule, "perpetuity_convergent");
    }

    #[test]
    fn classify_trivial_and_boundary() {
        let v = classify(&presets::deterministic(0.5, 0.0));
        assert_eq!(v.outcome, Outcome::PositiveRecurrent);
        assert_eq!(v.rule, "trivial_shift_zero");

        let v = classify(&presets::deterministic(0.5, 3.0));
        assert_eq!(v.rule, "trivial_fixed_point");
        assert_eq!(v.witness[0].1, 6.0);

        // s = -E log M exactly: boundary bracket
        let v = classify(&presets::constant_m_log_tail(1.0));
        assert_eq!(v.outcome, Outcome::Boundary);
    }

    #[test]
    fn classify_doubly_heavy() {
        use crate::model::law::LogStableHeavy;
        let m: crate::model::Law = Arc::new(LogStableHeavy::new(1.0, 1.0, true, 0.5).unwrap());
        let q: crate::model::Law = Arc::new(LogTail::new(1.0, 1.0).unwrap());
        let spec = DistributionSpec::independent(m, q).unwrap();
        let v = classify(&spec);
        assert_eq!(v.outcome, Outcome::NullRecurrent);
        assert_eq!(v.rule, "doubly_heavy_drift");
    }

    #[test]
    fn classify_is_pure() {
        let spec = presets::constant_m_log_tail(0.5);
        let p = tail_profile(&spec).unwrap();
        let n = check_nondegeneracy(&spec);
        let a = classify_spec(&p, &n);
        let b = classify_spec(&p, &n);
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.rule, b.rule);
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn zerner_series_examples() {
        // s = 0.5: products ~ n^{-1/2}, series diverges, Raabe → 0.5
        let spec = presets::constant_m_log_tail(0.5);
        let rep = zerner_series(&spec, std::f64::consts::E, 100_000).unwrap();
        assert_eq!(rep.decision, SeriesDecision::Divergent);
        assert_eq!(rep.implication, SeriesImplication::Recurrent);
        assert!((rep.raabe_estimate - 0.5).abs() < 0.1);

        // s = 2: products ~ n^{-2}, series converges
        let spec = presets::constant_m_log_tail(2.0);
        let rep = zerner_series(&spec, std::f64::consts::E, 100_000).unwrap();
        assert_eq!(rep.decision, SeriesDecision::Convergent);
        assert_eq!(rep.implication, SeriesImplication::Transient);
        assert!((rep.raabe_estimate - 2.0).abs() < 0.1);

        // bounded Q below the level: every factor is 1, trivially divergent
        let spec = presets::deterministic((-1.0f64).exp(), 2.0);
        let rep = zerner_series(&spec, 3.0, 10_000).unwrap();
        assert_eq!(rep.decision, SeriesDecision::Divergent);
        assert!(rep.partial_products.iter().all(|b| *b == 1.0));
    }

    #[test]
    fn zerner_preconditions() {
        // unbounded M support
        let spec = presets::two_point_m_log_tail(1.0); // bounded two-point: fine
        assert!(zerner_series(&spec, std::f64::consts::E, 1000).is_ok());
        let m: crate::model::Law =
            Arc::new(crate::model::law::LogExponential::new(1.0, false).unwrap());
        let q: crate::model::Law = Arc::new(LogTail::new(1.0, 1.0).unwrap());
        let spec = DistributionSpec::independent(m, q).unwrap();
        assert!(matches!(
            zerner_series(&spec, std::f64::consts::E, 1000),
            Err(Error::PreconditionUnbounded(_))
        ));
        // no Q mass at the level: log_tail sits above 1
        let spec = presets::constant_m_log_tail(1.0);
        assert!(matches!(
            zerner_series(&spec, 1.0, 1000),
            Err(Error::ZeroMassAtLevel(_))
        ));
    }

    #[test]
    fn zerner_products_monotone_in_level() {
        let spec = presets::constant_m_log_tail(0.75);
        let lo = zerner_series(&spec, 2.0, 2_000).unwrap();
        let hi = zerner_series(&spec, 4.0, 2_000).unwrap();
        for (a, b) in lo.partial_products.iter().zip(&hi.partial_products) {
            assert!(b >= a);
        }
    }

    #[test]
    fn boundary_series_examples() {
        // reciprocal tail with s = 1 at drift -1: harmonic-like, divergent
        let spec = presets::constant_m_log_tail(1.0);
        let rep = boundary_series(&spec, 1.0, 100_000).unwrap();
        assert_eq!(rep.decision, SeriesDecision::Divergent);
        assert_eq!(rep.implication, SeriesImplication::NullRecurrent);

        let spec = presets::constant_m_log_tail(2.0);
        let rep = boundary_series(&spec, 1.0, 100_000).unwrap();
        assert_eq!(rep.decision, SeriesDecision::Convergent);
        assert_eq!(rep.implication, SeriesImplication::Transient);

        // bounded Q with level above its sup: all factors 1
        let spec = presets::deterministic(0.5, 2.0);
        let rep = boundary_series(&spec, 1.0, 10_000).unwrap();
        assert_eq!(rep.decision, SeriesDecision::Divergent);

        // two-point M is not degenerate
        let spec = presets::two_point_m_log_tail(1.0);
        assert!(matches!(
            boundary_series(&spec, 1.0, 1000),
            Err(Error::PreconditionNotDegenerateM)
        ));
    }

    #[test]
    fn bertrand_constructed_tails() {
        let grid: Vec<f64> = (1..=60).map(|i| (i as f64 * 0.25).exp()).collect();
        // 1 - F = 1/x + 0.5/(x log x): f ≡ 0.5 < 1
        let out = bertrand_test(|x| 1.0 / x + 0.5 / (x * x.ln()), -1.0, &grid);
        assert_eq!(out, BertrandOutcome::NullRecurrent);
        // f ≡ 2 > 1
        let out = bertrand_test(|x| 1.0 / x + 2.0 / (x * x.ln()), -1.0, &grid);
        assert_eq!(out, BertrandOutcome::Transient);
        // exactly 1/x: f ≡ 0 < 1
        let out = bertrand_test(|x| 1.0 / x, -1.0, &grid);
        assert_eq!(out, BertrandOutcome::NullRecurrent);
    }

    #[test]
    fn kummer_examples() {
        // F ≡ 1 beyond some point with p ≡ 1
        let out = kummer_test(|_| 1.0, -1.0, |_| 1.0, 10_000);
        assert!(matches!(out, KummerOutcome::NullRecurrent { .. }));

        // log_tail(0.5) against p_k = k^{0.7}: both conditions hold to 1e6
        let q = LogTail::new(0.5, 1.0).unwrap();
        let out = kummer_test(
            |t| crate::model::MarginalLaw::cdf_log(&q, t),
            -1.0,
            |k| (k as f64).powf(0.7),
            1_000_000,
        );
        assert!(matches!(out, KummerOutcome::NullRecurrent { checked_to: 1_000_000 }));

        // log_tail(2): the ratio condition already fails for small k
        let q = LogTail::new(2.0, 1.0).unwrap();
        let out = kummer_test(
            |t| crate::model::MarginalLaw::cdf_log(&q, t),
            -1.0,
            |k| (k as f64).powf(0.7),
            1_000_000,
        );
        assert!(matches!(out, KummerOutcome::NotEstablished { first_failure: Some(_) }));
    }

    #[test]
    fn kellerer_examples() {
        let gamma = (-1.0f64).exp();
        let spec = presets::constant_m_log_tail(0.5);
        assert_eq!(kellerer_check(&spec, gamma).unwrap(), KellererOutcome::NullRecurrent);
        let spec = presets::constant_m_log_tail(2.0);
        assert_eq!(kellerer_check(&spec, gamma).unwrap(), KellererOutcome::Transient);
        // s = log(1/γ) exactly: outside scope
        let spec = presets::constant_m_log_tail(1.0);
        assert_eq!(kellerer_check(&spec, gamma).unwrap(), KellererOutcome::OutsideScope);
        // unbounded-two-sided M support cannot certify either side
        let spec = presets::two_point_m_log_tail(1.0);
        assert!(matches!(
            kellerer_check(&spec, gamma),
            Err(Error::SupportConditionUnverifiable(_))
        ));
    }

    #[test]
    fn zerner_and_classifier_agree_on_grid() {
        for s in [0.25, 0.5, 0.75, 1.25, 1.5, 2.0] {
            let spec = presets::constant_m_log_tail(s);
            let verdict = classify(&spec);
            if verdict.outcome == Outcome::Boundary {
                continue;
            }
            let rep = zerner_series(&spec, std::f64::consts::E, 50_000).unwrap();
            match (verdict.outcome, rep.implication) {
                (Outcome::NullRecurrent, SeriesImplication::Recurrent) => {}
                (Outcome::Transient, SeriesImplication::Transient) => {}
                (_, SeriesImplication::Inconclusive) => {}
                other => panic!("classifier/series disagree at s = {s}: {other:?}"),
            }
        }
    }

    #[test]
    fn point_mass_q_classifies_positive_recurrent() {
        let spec = presets::deterministic(0.5, 5.0);
        // not trivial-c: 5/(1-1/2) = 10, and the pair (1/2, 5) is glued
        // to r = 10, so this IS trivial case (c)
        let v = classify(&spec);
        assert_eq!(v.outcome, Outcome::PositiveRecurrent);

        // mix a two-point Q so the pair law is not glued
        let q: crate::model::Law =
            Arc::new(crate::model::law::TwoPoint::new(1.0, 0.5, 5.0).unwrap());
        let m: crate::model::Law = Arc::new(PointMass::new(0.5).unwrap());
        let spec = DistributionSpec::independent(m, q).unwrap();
        let v = classify(&spec);
        assert_eq!(v.outcome, Outcome::PositiveRecurrent);
        assert_eq!(v.rule, "perpetuity_convergent");
    }
}
