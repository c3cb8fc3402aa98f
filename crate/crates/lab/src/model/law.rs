//! Marginal distribution families for the coefficients M and Q.
//!
//! Every family implements [`MarginalLaw`]: a seeded sampler (through the
//! inverse CDF, so comonotone couplings come for free), the analytic CDF and
//! tail of `log V`, exact log-moment summaries and, for discrete families,
//! the atom list. Families are registered by name in [`Registry`] and
//! constructed from key-value parameter maps, which is how config files and
//! the CLI select them at runtime.

use crate::numeric::adaptive_simpson;
use crate::rng::{open_unit, StreamRng};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Growth class of `y ↦ E(y ∧ log_- V)`, which controls how fast the
/// functional `J_-(y) = y / E(y ∧ log_- V)` grows. Downstream convergence
/// verdicts for the integrals I_Q and I_M key off this class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinusGrowth {
    /// `E log_- V < ∞`: the truncated mean saturates, J_- grows linearly.
    Bounded,
    /// `E(y ∧ log_- V) ≍ log y`: J_- ≍ y / log y.
    Logarithmic,
    /// `E(y ∧ log_- V) ≍ y^{1-a}` for the given `a ∈ (0,1)`: J_- ≍ y^a.
    Power(f64),
}

/// Exact log-scale summary of a marginal law.
#[derive(Debug, Clone, Copy)]
pub struct LogMoments {
    /// `E log_+ V`, possibly ∞.
    pub e_log_plus: f64,
    /// `E log_- V`, possibly ∞.
    pub e_log_minus: f64,
    /// liminf of `t P(log V > t)`.
    pub s_star: f64,
    /// limsup of `t P(log V > t)`.
    pub s_upper: f64,
    /// whether `lim t P(log V > t)` exists (then s_star = s_upper).
    pub s_exists: bool,
    /// growth class of the truncated minus-moment.
    pub minus_growth: MinusGrowth,
}

/// Essential support facts about V.
#[derive(Debug, Clone, Copy)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
    /// P(V = 0).
    pub p_zero: f64,
}

/// A marginal law of a positive (for M) or nonnegative (for Q) coefficient.
pub trait MarginalLaw: fmt::Debug + Send + Sync {
    /// Registry name of the family.
    fn family(&self) -> &'static str;

    /// Parameters in canonical (sorted-key, 17-significant-digit) form.
    fn canonical_params(&self) -> Vec<(String, String)>;

    /// Inverse CDF of `log V` at `u ∈ (0, 1)`; must be nondecreasing in `u`.
    ///
    /// This is the primary sampling surface: the heavy families routinely
    /// produce log values beyond anything representable as V itself, so
    /// simulation code works with log draws throughout.
    fn quantile_log(&self, u: f64) -> f64;

    /// Inverse CDF of V. May overflow to ∞ for heavy laws; simulation paths
    /// should prefer [`MarginalLaw::quantile_log`].
    fn quantile(&self, u: f64) -> f64 {
        self.quantile_log(u).exp()
    }

    /// Seeded draw of V.
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        self.quantile(open_unit(rng))
    }

    /// Seeded draw of `log V`.
    fn sample_log(&self, rng: &mut StreamRng) -> f64 {
        self.quantile_log(open_unit(rng))
    }

    /// `P(log V <= t)`.
    fn cdf_log(&self, t: f64) -> f64;

    /// `P(log V > t)`.
    fn tail_log(&self, t: f64) -> f64 {
        (1.0 - self.cdf_log(t)).max(0.0)
    }

    /// Exact log-moment summary.
    fn log_moments(&self) -> LogMoments;

    /// Essential support of V.
    fn support(&self) -> Support;

    /// `E(y ∧ log_- V)` for `y > 0`, evaluated in closed form per family.
    fn e_log_trunc_minus(&self, y: f64) -> f64;

    /// Atom list for discrete laws.
    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        None
    }
}

pub type Law = Arc<dyn MarginalLaw>;

fn log_plus(v: f64) -> f64 {
    if v > 1.0 {
        v.ln()
    } else {
        0.0
    }
}

fn log_minus(v: f64) -> f64 {
    if v <= 0.0 {
        f64::INFINITY
    } else if v < 1.0 {
        -v.ln()
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// point_mass
// ---------------------------------------------------------------------------

/// Constant law `V = v` (v >= 0; v = 0 is legal only on the Q side).
#[derive(Debug, Clone)]
pub struct PointMass {
    pub v: f64,
}

impl PointMass {
    pub fn new(v: f64) -> Result<Self> {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::BadParameter(format!("point_mass v must be >= 0, got {v}")));
        }
        Ok(PointMass { v })
    }
}

impl MarginalLaw for PointMass {
    fn family(&self) -> &'static str {
        "point_mass"
    }

    fn canonical_params(&self) -> Vec<(String, String)> {
        vec![("v".into(), crate::config::fmt_f64(self.v))]
    }

    fn quantile_log(&self, _u: f64) -> f64 {
        if self.v == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.v.ln()
        }
    }

    fn quantile(&self, _u: f64) -> f64 {
        self.v
    }

    fn cdf_log(&self, t: f64) -> f64 {
        if self.v == 0.0 || self.v.ln() <= t {
            1.0
        } else {
            0.0
        }
    }

    fn log_moments(&self) -> LogMoments {
        LogMoments {
            e_log_plus: log_plus(self.v),
            e_log_minus: log_minus(self.v),
            s_star: 0.0,
            s_upper: 0.0,
            s_exists: true,
            minus_growth: MinusGrowth::Bounded,
        }
    }

    fn support(&self) -> Support {
        Support { lo: self.v, hi: self.v, p_zero: if self.v == 0.0 { 1.0 } else { 0.0 } }
    }

    fn e_log_trunc_minus(&self, y: f64) -> f64 {
        y.min(log_minus(self.v))
    }

    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        Some(vec![(self.v, 1.0)])
    }
}

// ---------------------------------------------------------------------------
// two_point
// ---------------------------------------------------------------------------

/// Two-point law: `V = v1` with probability `p1`, else `v2`.
#[derive(Debug, Clone)]
pub struct TwoPoint {
    pub v1: f64,
    pub p1: f64,
    pub v2: f64,
}

impl TwoPoint {
    pub fn new(v1: f64, p1: f64, v2: f64) -> Result<Self> {
        if !(v1 > 0.0 && v2 > 0.0) {
            return Err(Error::BadParameter("two_point values must be positive".into()));
        }
        if !(p1 > 0.0 && p1 < 1.0) {
            return Err(Error::BadParameter(format!("two_point p1 must be in (0,1), got {p1}")));
        }
        Ok(TwoPoint { v1, p1, v2 })
    }

    fn sorted(&self) -> [(f64, f64); 2] {
        if self.v1 <= self.v2 {
            [(self.v1, self.p1), (self.v2, 1.0 - self.p1)]
        } else {
            [(self.v2, 1.0 - self.p1), (self.v1, self.p1)]
        }
    }
}

impl MarginalLaw for TwoPoint {
    fn family(&self) -> &'static str {
        "two_point"
    }

    fn canonical_params(&self) -> Vec<(String, String)> {
        vec![
            ("p1".into(), crate::config::fmt_f64(self.p1)),
            ("v1".into(), crate::config::fmt_f64(self.v1)),
            ("v2".into(), crate::config::fmt_f64(self.v2)),
        ]
    }

    fn quantile_log(&self, u: f64) -> f64 {
        self.quantile(u).ln()
    }

    fn quantile(&self, u: f64) -> f64 {
        let [(lo, plo), (hi, _)] = self.sorted();
        if u <= plo {
            lo
        } else {
            hi
        }
    }

    fn cdf_log(&self, t: f64) -> f64 {
        self.sorted().iter().filter(|(v, _)| v.ln() <= t).map(|(_, p)| p).sum()
    }

    fn log_moments(&self) -> LogMoments {
        let [(lo, plo), (hi, phi)] = self.sorted();
        LogMoments {
            e_log_plus: plo * log_plus(lo) + phi * log_plus(hi),
            e_log_minus: plo * log_minus(lo) + phi * log_minus(hi),
            s_star: 0.0,
            s_upper: 0.0,
            s_exists: true,
            minus_growth: MinusGrowth::Bounded,
        }
    }

    fn support(&self) -> Support {
        let [(lo, _), (hi, _)] = self.sorted();
        Support { lo, hi, p_zero: 0.0 }
    }

    fn e_log_trunc_minus(&self, y: f64) -> f64 {
        self.sorted().iter().map(|(v, p)| p * y.min(log_minus(*v))).sum()
    }

    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        let [(lo, plo), (hi, phi)] = self.sorted();
        Some(vec![(lo, plo), (hi, phi)])
    }
}

// ---------------------------------------------------------------------------
// log_tail
// ---------------------------------------------------------------------------

/// A law with exact reciprocal log-tail: `P(log V > t) = s / (s + t)` for
/// `t >= t1`, continued below `t1` by a uniform body on `[0, t1]` carrying
/// mass `t1 / (s + t1)`, so the CDF is continuous and `t · P(log V > t) = s`
/// holds exactly from `t1` on. `V >= 1` almost surely.
#[derive(Debug, Clone)]
pub struct LogTail {
    pub s: f64,
    pub t1: f64,
}

impl LogTail {
    pub fn new(s: f64, t1: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::BadParameter(format!("log_tail s must be > 0, got {s}")));
        }
        if !(t1 >= 0.0) {
            return Err(Error::BadParameter(format!("log_tail t1 must be >= 0, got {t1}")));
        }
        Ok(LogTail { s, t1 })
    }

    /// Body mass `t1 / (s + t1)`.
    fn body_mass(&self) -> f64 {
        self.t1 / (self.s + self.t1)
    }
}

impl MarginalLaw for LogTail {
    fn family(&self) -> &'static str {
        "log_tail"
    }

    fn canonical_params(&self) -> Vec<(String, String)> {
        vec![
            ("s".into(), crate::config::fmt_f64(self.s)),
            ("t1".into(), crate::config::fmt_f64(self.t1)),
        ]
    }

    fn quantile_log(&self, u: f64) -> f64 {
        let body = self.body_mass();
        if u <= body {
            u * (self.s + self.t1)
        } else {
            // 1 - u = s / (s + log v)
            self.s * u / (1.0 - u)
        }
    }

    fn cdf_log(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else if t < self.t1 {
            t / (self.s + self.t1)
        } else {
            1.0 - self.s / (self.s + t)
        }
    }

    // the family's defining identity t · tail(t) = s must hold to float
    // precision, so the tail is computed directly rather than as 1 - cdf
    fn tail_log(&self, t: f64) -> f64 {
        if t < 0.0 {
            1.0
        } else if t < self.t1 {
            1.0 - t / (self.s + self.t1)
        } else {
            self.s / (self.s + t)
        }
    }

    fn log_moments(&self) -> LogMoments {
        LogMoments {
            e_log_plus: f64::INFINITY,
            e_log_minus: 0.0,
            s_star: self.s,
            s_upper: self.s,
            s_exists: true,
            minus_growth: MinusGrowth::Bounded,
        }
    }

    fn support(&self) -> Support {
        Support { lo: 1.0, hi: f64::INFINITY, p_zero: 0.0 }
    }

    fn e_log_trunc_minus(&self, _y: f64) -> f64 {
        0.0
    }
}

// ---------------------------------------------------------------------------
// log_exponential
// ---------------------------------------------------------------------------

/// `log V = ±Exp(λ)`: light log-tails on the chosen side.
#[derive(Debug, Clone)]
pub struct LogExponential {
    pub lambda: f64,
    pub positive: bool,
}

impl LogExponential {
    pub fn new(lambda: f64, positive: bool) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::BadParameter(format!(
                "log_exponential lambda must be > 0, got {lambda}"
            )));
        }
        Ok(LogExponential { lambda, positive })
    }
}

impl MarginalLaw for LogExponential {
    fn family(&self) -> &'static str {
        "log_exponential"
    }

    fn canonical_params(&self) -> Vec<(String, String)> {
        vec![
            ("lambda".into(), crate::config::fmt_f64(self.lambda)),
            ("sign".into(), if self.positive { "plus" } else { "minus" }.into()),
        ]
    }

    fn quantile_log(&self, u: f64) -> f64 {
        if self.positive {
            -(1.0 - u).ln() / self.lambda
        } else {
            u.ln() / self.lambda
        }
    }

    fn cdf_log(&self, t: f64) -> f64 {
        if self.positive {
            if t < 0.0 {
                0.0
            } else {
                1.0 - (-self.lambda * t).exp()
            }
        } else if t >= 0.0 {
            1.0
        } else {
            (self.lambda * t).exp()
        }
    }

    fn log_moments(&self) -> LogMoments {
        let mean = 1.0 / self.lambda;
        LogMoments {
            e_log_plus: if self.positive { mean } else { 0.0 },
            e_log_minus: if self.positive { 0.0 } else { mean },
            s_star: 0.0,
            s_upper: 0.0,
            s_exists: true,
            minus_growth: MinusGrowth::Bounded,
        }
    }

    fn support(&self) -> Support {
        if self.positive {
            Support { lo: 1.0, hi: f64::INFINITY, p_zero: 0.0 }
        } else {
            Support { lo: 0.0, hi: 1.0, p_zero: 0.0 }
        }
    }

    fn e_log_trunc_minus(&self, y: f64) -> f64 {
        if self.positive {
            0.0
        } else {
            // E(y ∧ Exp(λ)) = (1 - e^{-λy}) / λ
            (1.0 - (-self.lambda * y).exp()) / self.lambda
        }
    }
}

// ---------------------------------------------------------------------------
// log_stable_heavy
// ---------------------------------------------------------------------------

/// Heavy log-tails of index `alpha ∈ (0, 1]` on the negative side.
///
/// One-sided (default): `log V = 1 - W` with `P(W > t) = (1 + t/r)^{-alpha}`,
/// so `log V <= 1` a.s., `E log_- V = ∞`, `E log_+ V < 1`.
///
/// Two-sided: mass `w` on the negative side with
/// `P(log V < -t) = w (1 + t/r)^{-alpha}` and a positive tail
/// `P(log V > t) = (1 - w) e / ((t + e) ln(t + e))`, chosen so that both
/// `E log_± V = ∞` while the products `M_1 ⋯ M_n` still tend to zero a.s.
/// (the negative tail dominates; the drift certificate `I_M < ∞` holds in
/// closed form for every `alpha ∈ (0, 1]`).
#[derive(Debug, Clone)]
pub struct LogStableHeavy {
    pub alpha: f64,
    pub r: f64,
    pub two_sided: bool,
    /// negative-side mass (two-sided only).
    pub w: f64,
}

impl LogStableHeavy {
    pub fn new(alpha: f64, r: f64, two_sided: bool, w: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::BadParameter(format!(
                "log_stable_heavy alpha must be in (0,1], got {alpha}"
            )));
        }
        if !(r > 0.0) {
            return Err(Error::BadParameter(format!("log_stable_heavy r must be > 0, got {r}")));
        }
        if two_sided && !(w > 0.0 && w < 1.0) {
            return Err(Error::BadParameter(format!(
                "log_stable_heavy w must be in (0,1), got {w}"
            )));
        }
        Ok(LogStableHeavy { alpha, r, two_sided, w })
    }

    /// `∫_0^y (1 + t/r)^{-alpha} dt` in closed form.
    fn pareto_trunc_int(&self, y: f64) -> f64 {
        if self.alpha == 1.0 {
            self.r * (1.0 + y / self.r).ln()
        } else {
            self.r * ((1.0 + y / self.r).powf(1.0 - self.alpha) - 1.0) / (1.0 - self.alpha)
        }
    }

    /// Positive-side tail shape (two-sided): `e / ((t+e) ln(t+e))`, equal to 1
    /// at t = 0 and strictly decreasing.
    fn pos_tail_shape(t: f64) -> f64 {
        let z = t + std::f64::consts::E;
        std::f64::consts::E / (z * z.ln())
    }

    /// Inverse of `t ↦ pos_tail_shape(t) = p` for `p ∈ (0, 1]` by Newton on
    /// `z ln z = e / p`.
    fn pos_tail_inverse(p: f64) -> f64 {
        let a = std::f64::consts::E / p;
        let mut z = (a / a.ln().max(1.0)).max(std::f64::consts::E);
        for _ in 0..64 {
            let f = z * z.ln() - a;
            let fp = z.ln() + 1.0;
            let step = f / fp;
            z -= step;
            if z < std::f64::consts::E {
                z = std::f64::consts::E;
            }
            if step.abs() <= 1e-12 * z.abs() {
                break;
            }
        }
        z - std::f64::consts::E
    }
}

impl MarginalLaw for LogStableHeavy {
    fn family(&self) -> &'static str {
        "log_stable_heavy"
    }

    fn canonical_params(&self) -> Vec<(String, String)> {
        vec![
            ("alpha".into(), crate::config::fmt_f64(self.alpha)),
            ("r".into(), crate::config::fmt_f64(self.r)),
            ("two_sided".into(), if self.two_sided { "true" } else { "false" }.into()),
            ("w".into(), crate::config::fmt_f64(self.w)),
        ]
    }

    fn quantile_log(&self, u: f64) -> f64 {
        if !self.two_sided {
            // u = P(W >= 1 - logv) = (1 + (1-logv)/r)^{-alpha}
            1.0 - self.r * (u.powf(-1.0 / self.alpha) - 1.0)
        } else if u < self.w {
            -(self.r * ((u / self.w).powf(-1.0 / self.alpha) - 1.0))
        } else {
            let p = ((1.0 - u) / (1.0 - self.w)).min(1.0);
            Self::pos_tail_inverse(p.max(f64::MIN_POSITIVE))
        }
    }

    fn cdf_log(&self, t: f64) -> f64 {
        if !self.two_sided {
            if t > 1.0 {
                1.0
            } else {
                (1.0 + (1.0 - t) / self.r).powf(-self.alpha)
            }
        } else if t <= 0.0 {
            self.w * (1.0 - t / self.r).powf(-self.alpha)
        } else {
            1.0 - (1.0 - self.w) * Self::pos_tail_shape(t)
        }
    }

    fn log_moments(&self) -> LogMoments {
        let e_log_plus = if self.two_sided {
            f64::INFINITY
        } else {
            // ∫_0^1 P(log V > t) dt = 1 - ∫_0^1 (1 + (1-t)/r)^{-alpha} dt
            1.0 - self.pareto_trunc_int(1.0)
        };
        let growth = if self.alpha == 1.0 {
            MinusGrowth::Logarithmic
        } else {
            MinusGrowth::Power(self.alpha)
        };
        LogMoments {
            e_log_plus,
            e_log_minus: f64::INFINITY,
            s_star: 0.0,
            s_upper: 0.0,
            s_exists: true,
            minus_growth: growth,
        }
    }

    fn support(&self) -> Support {
        let hi = if self.two_sided { f64::INFINITY } else { std::f64::consts::E };
        Support { lo: 0.0, hi, p_zero: 0.0 }
    }

    fn e_log_trunc_minus(&self, y: f64) -> f64 {
        if !self.two_sided {
            // log_- V = max(W - 1, 0): ∫_0^y P(W > 1 + t) dt
            self.pareto_trunc_int(1.0 + y) - self.pareto_trunc_int(1.0)
        } else {
            self.w * self.pareto_trunc_int(y)
        }
    }
}

// ---------------------------------------------------------------------------
// truncated
// ---------------------------------------------------------------------------

/// `V' = V · 1{V > beta}`: the base variable with its lower part zeroed out.
/// Carries an atom at 0 of mass `P(V <= beta)`, so it is only admissible on
/// the Q side.
#[derive(Debug, Clone)]
pub struct Truncated {
    pub base: Law,
    pub beta: f64,
}

impl Truncated {
    pub fn new(base: Law, beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::BadParameter(format!("truncated beta must be > 0, got {beta}")));
        }
        Ok(Truncated { base, beta })
    }

    fn p_zero(&self) -> f64 {
        self.base.cdf_log(self.beta.ln())
    }
}

impl MarginalLaw for Truncated {
    fn family(&self) -> &'static str {
        "truncated"
    }

    fn canonical_params(&self) -> Vec<(String, String)> {
        let mut ps = vec![
            ("base.family".into(), self.base.family().to_string()),
            ("beta".into(), crate::config::fmt_f64(self.beta)),
        ];
        for (k, v) in self.base.canonical_params() {
            ps.push((format!("base.{k}"), v));
        }
        ps.sort();
        ps
    }

    fn quantile_log(&self, u: f64) -> f64 {
        let lv = self.base.quantile_log(u);
        if lv <= self.beta.ln() {
            f64::NEG_INFINITY
        } else {
            lv
        }
    }

    fn cdf_log(&self, t: f64) -> f64 {
        self.base.cdf_log(t.max(self.beta.ln()))
    }

    fn tail_log(&self, t: f64) -> f64 {
        self.base.tail_log(t.max(self.beta.ln()))
    }

    fn log_moments(&self) -> LogMoments {
        let base = self.base.log_moments();
        LogMoments {
            // truncation can only remove log_+ mass; the flag is the base's
            e_log_plus: base.e_log_plus,
            e_log_minus: if self.p_zero() > 0.0 { f64::INFINITY } else { base.e_log_minus },
            s_star: base.s_star,
            s_upper: base.s_upper,
            s_exists: base.s_exists,
            minus_growth: base.minus_growth,
        }
    }

    fn support(&self) -> Support {
        let b = self.base.support();
        Support { lo: 0.0, hi: b.hi, p_zero: self.p_zero() }
    }

    fn e_log_trunc_minus(&self, y: f64) -> f64 {
        // atom at 0 contributes y; remainder integrates the conditional tail
        let p0 = self.p_zero();
        let lb = self.beta.ln();
        let body = adaptive_simpson(
            &|t: f64| (self.base.cdf_log(-t) - self.base.cdf_log(lb.min(-t))).max(0.0),
            0.0,
            y,
            1e-10,
        );
        p0 * y + body
    }

    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        self.base.atoms().map(|atoms| {
            let mut zero_mass = 0.0;
            let mut out = Vec::new();
            for (v, p) in atoms {
                if v <= self.beta {
                    zero_mass += p;
                } else {
                    out.push((v, p));
                }
            }
            if zero_mass > 0.0 {
                out.insert(0, (0.0, zero_mass));
            }
            out
        })
    }
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

/// String-keyed parameter map with support for `base.`-prefixed nesting.
#[derive(Debug, Clone, Default)]
pub struct Params(pub BTreeMap<String, String>);

impl Params {
    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Self {
        Params(pairs.into_iter().collect())
    }

    pub fn get_f64(&self, key: &str) -> Result<f64> {
        let raw = self
            .0
            .get(key)
            .ok_or_else(|| Error::BadParameter(format!("missing parameter '{key}'")))?;
        raw.parse::<f64>()
            .map_err(|_| Error::BadParameter(format!("parameter '{key}' is not a number: {raw}")))
    }

    pub fn get_f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.0.get(key) {
            None => Ok(default),
            Some(_) => self.get_f64(key),
        }
    }

    pub fn get_str(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::BadParameter(format!("missing parameter '{key}'")))
    }

    pub fn get_bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.0.get(key).map(|s| s.as_str()) {
            None => Ok(default),
            Some("true") => Ok(true),
            Some("false") => Ok(false),
            Some(other) => {
                Err(Error::BadParameter(format!("parameter '{key}' must be true/false: {other}")))
            }
        }
    }

    /// Sub-map of keys under `prefix.`, with the prefix stripped.
    pub fn nested(&self, prefix: &str) -> Params {
        let dot = format!("{prefix}.");
        Params(
            self.0
                .iter()
                .filter_map(|(k, v)| k.strip_prefix(&dot).map(|r| (r.to_string(), v.clone())))
                .collect(),
        )
    }
}

type BuilderFn = fn(&Params) -> Result<Law>;

/// Name-indexed registry of marginal-law families. Config files name a
/// family and the registry builds the law behind the [`MarginalLaw`] trait.
pub struct Registry {
    entries: Vec<(&'static str, BuilderFn)>,
}

impl Registry {
    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn build(&self, family: &str, params: &Params) -> Result<Law> {
        for (name, f) in &self.entries {
            if *name == family {
                return f(params);
            }
        }
        Err(Error::UnknownFamily(family.to_string(), self.names().join(", ")))
    }
}

/// The built-in families.
pub fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| Registry {
        entries: vec![
            ("point_mass", |p| Ok(Arc::new(PointMass::new(p.get_f64("v")?)?))),
            ("two_point", |p| {
                Ok(Arc::new(TwoPoint::new(p.get_f64("v1")?, p.get_f64("p1")?, p.get_f64("v2")?)?))
            }),
            ("log_tail", |p| {
                Ok(Arc::new(LogTail::new(p.get_f64("s")?, p.get_f64_or("t1", 1.0)?)?))
            }),
            ("log_exponential", |p| {
                let positive = match p.get_str("sign")? {
                    "plus" => true,
                    "minus" => false,
                    other => {
                        return Err(Error::BadParameter(format!(
                            "log_exponential sign must be plus|minus, got {other}"
                        )))
                    }
                };
                Ok(Arc::new(LogExponential::new(p.get_f64("lambda")?, positive)?))
            }),
            ("log_stable_heavy", |p| {
                Ok(Arc::new(LogStableHeavy::new(
                    p.get_f64("alpha")?,
                    p.get_f64_or("r", 1.0)?,
                    p.get_bool_or("two_sided", false)?,
                    p.get_f64_or("w", 0.5)?,
                )?))
            }),
            ("truncated", |p| {
                let base_family = p.get_str("base.family")?.to_string();
                let base = registry().build(&base_family, &p.nested("base"))?;
                Ok(Arc::new(Truncated::new(base, p.get_f64("beta")?)?))
            }),
        ],
    })
}
