//! Attractor-set machinery for locally contractive recurrent chains: the
//! algebraic approximation through fixed points of contractive semigroup
//! elements, the chaos-game simulation counterpart, boundedness criteria,
//! the certified-interval search, and the tilting that turns a recurrent
//! chain into a positive recurrent one with the same support.

use crate::affine::{enumerate_semigroup, AffineMap, DEFAULT_ENUMERATION_BUDGET};
use crate::model::law::{PointMass, TwoPoint};
use crate::model::{Dependence, DistributionSpec, Law};
use crate::numeric::adaptive_simpson;
use crate::rng::{open_unit, StreamRng};
use crate::{Error, Result};
use std::sync::Arc;

/// A finitely supported pair law: atoms of affine maps with probabilities.
#[derive(Debug, Clone)]
pub struct FiniteSupportSpec {
    atoms: Vec<(AffineMap, f64)>,
}

impl FiniteSupportSpec {
    pub fn new(atoms: Vec<(AffineMap, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::BadParameter("finite-support spec needs atoms".into()));
        }
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 || atoms.iter().any(|(_, p)| *p <= 0.0) {
            return Err(Error::BadParameter(format!(
                "atom probabilities must be positive and sum to 1 (got {total})"
            )));
        }
        Ok(FiniteSupportSpec { atoms })
    }

    /// Equal-weight atoms.
    pub fn uniform(maps: Vec<AffineMap>) -> Result<Self> {
        let p = 1.0 / maps.len() as f64;
        Self::new(maps.into_iter().map(|g| (g, p)).collect())
    }

    pub fn atoms(&self) -> &[(AffineMap, f64)] {
        &self.atoms
    }

    pub fn maps(&self) -> Vec<AffineMap> {
        self.atoms.iter().map(|(g, _)| *g).collect()
    }

    fn sample(&self, rng: &mut StreamRng) -> &AffineMap {
        let u = open_unit(rng);
        let mut acc = 0.0;
        for (g, p) in &self.atoms {
            acc += p;
            if u <= acc {
                return g;
            }
        }
        &self.atoms.last().unwrap().0
    }
}

/// Why the attractor is unbounded, when it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnboundedReason {
    /// the shift law has unbounded support.
    UnboundedShift,
    /// some slope exceeds 1 while the shift is not identically zero.
    ExpansiveWithShift,
    /// a slope-one atom with positive shift pushes mass to +∞.
    UnitSlopeShift,
}

/// Boundedness verdict for the attractor set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundedness {
    Unbounded(UnboundedReason),
    /// the attractor is contained in `[lo, hi]` (the hull of the fixed
    /// points of the support maps).
    Bounded { lo: f64, hi: f64 },
    Unknown,
}

impl Boundedness {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Boundedness::Unbounded(r) => serde_json::json!({ "unbounded": format!("{r:?}") }),
            Boundedness::Bounded { lo, hi } => serde_json::json!({ "bounded": [lo, hi] }),
            Boundedness::Unknown => serde_json::json!("unknown"),
        }
    }
}

/// Boundedness test for a finitely supported law: expansive or unit slopes
/// with shifts force unboundedness; with every slope below 1 the attractor
/// sits inside the hull of the atom fixed points.
pub fn unboundedness_test(spec: &FiniteSupportSpec) -> Boundedness {
    let any_expansive = spec.atoms.iter().any(|(g, _)| g.slope() > 1.0);
    let all_shifts_zero = spec.atoms.iter().all(|(g, _)| g.shift() == 0.0);
    if any_expansive && !all_shifts_zero {
        return Boundedness::Unbounded(UnboundedReason::ExpansiveWithShift);
    }
    if spec
        .atoms
        .iter()
        .any(|(g, _)| (g.slope() - 1.0).abs() < 1e-12 && g.shift() > 0.0)
    {
        return Boundedness::Unbounded(UnboundedReason::UnitSlopeShift);
    }
    if spec.atoms.iter().all(|(g, _)| g.slope() < 1.0) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (g, _) in &spec.atoms {
            let x0 = g.fixed_point().expect("slope < 1 has a fixed point");
            lo = lo.min(x0);
            hi = hi.max(x0);
        }
        return Boundedness::Bounded { lo, hi };
    }
    Boundedness::Unknown
}

/// Boundedness test for an analytic spec through its marginal supports.
pub fn unboundedness_test_spec(spec: &DistributionSpec) -> Boundedness {
    let ms = spec.m().support();
    let qs = spec.q().support();
    if qs.hi == f64::INFINITY {
        return Boundedness::Unbounded(UnboundedReason::UnboundedShift);
    }
    if ms.hi > 1.0 && qs.p_zero < 1.0 {
        return Boundedness::Unbounded(UnboundedReason::ExpansiveWithShift);
    }
    if ms.hi < 1.0 {
        // sup of q/(1-m) over the support rectangle
        return Boundedness::Bounded { lo: qs.lo / (1.0 - ms.lo), hi: qs.hi / (1.0 - ms.hi) };
    }
    Boundedness::Unknown
}

/// Finite approximation of the attractor: fixed points of the contractive
/// semigroup elements up to the chosen depth, summarized as an ε-net.
#[derive(Debug, Clone)]
pub struct AttractorApproximation {
    /// sorted ε-net of the fixed-point cloud.
    pub points: Vec<f64>,
    /// number of contractive elements enumerated (before deduplication).
    pub raw_count: usize,
    pub depth: u32,
    pub epsilon: f64,
    pub bounds: Boundedness,
    /// worst distance from `g(x)` to the net over all generators g and net
    /// points x; small values certify approximate invariance (frontier
    /// effects at the cloud edge included).
    pub invariance_defect: f64,
}

/// Enumerate the semigroup to `depth`, collect fixed points of elements with
/// slope below 1, and summarize as a sorted net deduplicated at `epsilon`.
pub fn approximate_attractor(
    spec: &FiniteSupportSpec,
    depth: u32,
    epsilon: f64,
) -> Result<AttractorApproximation> {
    assert!(epsilon > 0.0);
    let enumeration = enumerate_semigroup(&spec.maps(), depth, DEFAULT_ENUMERATION_BUDGET)?;
    let mut points = Vec::new();
    for el in &enumeration.elements {
        if el.map.slope() < 1.0 - 1e-12 {
            points.push(el.map.fixed_point().expect("contractive"));
        }
    }
    let raw_count = points.len();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // ε-net: keep the first representative of every ε-cluster
    let mut net: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        if net.last().map_or(true, |l| p - l > epsilon) {
            net.push(p);
        }
    }
    let mut defect = 0.0f64;
    for (g, _) in spec.atoms() {
        for x in &net {
            let y = g.apply(*x);
            let idx = net.partition_point(|v| *v < y);
            let mut best = f64::INFINITY;
            if idx < net.len() {
                best = best.min((net[idx] - y).abs());
            }
            if idx > 0 {
                best = best.min((y - net[idx - 1]).abs());
            }
            defect = defect.max(best);
        }
    }
    Ok(AttractorApproximation {
        points: net,
        raw_count,
        depth,
        epsilon,
        bounds: unboundedness_test(spec),
        invariance_defect: defect,
    })
}

/// Simulate the chain and record the visited states after burn-in: the
/// empirical counterpart of the attractor as the set of accumulation points
/// of an orbit. Deterministic given the generator state.
pub fn chaos_game(
    spec: &FiniteSupportSpec,
    n_steps: usize,
    burn_in: usize,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    assert!(n_steps > burn_in);
    let mut x = 0.0f64;
    let mut cloud = Vec::with_capacity(n_steps - burn_in);
    for k in 0..n_steps {
        x = spec.sample(rng).apply(x);
        if !x.is_finite() {
            return Err(Error::Overflow { step: k + 1 });
        }
        if k >= burn_in {
            cloud.push(x);
        }
    }
    Ok(cloud)
}

/// Search the atom pairs for a certified interval inside the attractor:
/// slopes `α, β < 1` with `α + β >= 1` pin the interval between their fixed
/// points. Returns the widest certified interval.
pub fn interval_certificate(spec: &FiniteSupportSpec) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let atoms = spec.atoms();
    for (ga, _) in atoms {
        for (gb, _) in atoms {
            let (a, b) = (ga.slope(), gb.slope());
            if a < 1.0 && b < 1.0 && a + b >= 1.0 {
                let xa = ga.fixed_point().unwrap();
                let xb = gb.fixed_point().unwrap();
                if xa <= xb {
                    let wider = match best {
                        None => true,
                        Some((lo, hi)) => xb - xa > hi - lo,
                    };
                    if wider {
                        best = Some((xa, xb));
                    }
                }
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// tilting
// ---------------------------------------------------------------------------

/// The weight functions of the support-preserving tilt: `f` reweights the
/// multiplier, `h` the shift. Both are bounded and strictly positive:
///
/// ```text
/// f(m) = c0 / max(1, |log m|)        for m < 1
///      = c0 c1 / max(1, log m)       for m >= 1
/// h(q) = c2 / max(1, log q)
/// ```
#[derive(Debug, Clone, Copy)]
pub struct TiltingSpec {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// E log M under the tilted law (negative by construction).
    pub drift: f64,
    /// E log_+ Q under the tilted law (finite by construction).
    pub e_log_plus_q: f64,
    /// ∫ f h dμ, which the constants normalize to 1.
    pub normalization: f64,
}

impl TiltingSpec {
    /// f(m) with this spec's constants.
    pub fn f(&self, m: f64) -> f64 {
        let l = m.ln();
        if m < 1.0 {
            self.c0 / l.abs().max(1.0)
        } else {
            self.c0 * self.c1 / l.max(1.0)
        }
    }

    /// h(q).
    pub fn h(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return self.c2;
        }
        self.c2 / q.ln().max(1.0)
    }
}

/// Raw ingredients of the constant solve: expectations of the weight shapes
/// under the base law.
struct TiltMoments {
    /// E[(1 ∧ |log M|); M <= 1]
    a_minus: f64,
    /// E[(1 ∧ log M); M > 1]
    a_plus: f64,
    /// E[1/max(1, |log M|); M < 1]
    phi_minus: f64,
    /// E[1/max(1, log M); M >= 1]
    phi_plus: f64,
    /// E[1/max(1, log Q)]
    psi: f64,
    /// E[(1 ∧ log_+ Q)]
    log_plus_capped: f64,
}

fn solve_constants(mom: &TiltMoments) -> Result<TiltingSpec> {
    if !(mom.a_minus > 0.0) {
        return Err(Error::TiltingInfeasible);
    }
    let c2 = 1.0;
    // make the drift bracket strictly negative: with c1 = a_-/(2 a_+) the
    // bracket equals -a_-/2; any slope-below-1-only law gets c1 = 1
    let c1 = if mom.a_plus > 0.0 { mom.a_minus / (2.0 * mom.a_plus) } else { 1.0 };
    let denom = (mom.phi_minus + c1 * mom.phi_plus) * mom.psi * c2;
    let c0 = 1.0 / denom;
    let drift = c0 * c2 * mom.psi * (-mom.a_minus + c1 * mom.a_plus);
    let e_log_plus_q = mom.log_plus_capped / mom.psi;
    Ok(TiltingSpec { c0, c1, c2, drift, e_log_plus_q, normalization: 1.0 })
}

fn phi_minus(m: f64) -> f64 {
    if m < 1.0 {
        1.0 / m.ln().abs().max(1.0)
    } else {
        0.0
    }
}

fn phi_plus(m: f64) -> f64 {
    if m >= 1.0 {
        1.0 / m.ln().max(1.0)
    } else {
        0.0
    }
}

fn psi(q: f64) -> f64 {
    if q <= 0.0 {
        1.0
    } else {
        1.0 / q.ln().max(1.0)
    }
}

/// Tilt a finitely supported pair law. Returns the solved constants and the
/// exactly reweighted law, whose support equals the original's.
pub fn build_tilting_finite(
    spec: &FiniteSupportSpec,
) -> Result<(TiltingSpec, FiniteSupportSpec)> {
    let mut mom = TiltMoments {
        a_minus: 0.0,
        a_plus: 0.0,
        phi_minus: 0.0,
        phi_plus: 0.0,
        psi: 0.0,
        log_plus_capped: 0.0,
    };
    for (g, p) in spec.atoms() {
        let (m, q) = (g.slope(), g.shift());
        let lm = m.ln();
        if m <= 1.0 {
            mom.a_minus += p * lm.abs().min(1.0);
        } else {
            mom.a_plus += p * lm.min(1.0);
        }
        mom.phi_minus += p * phi_minus(m);
        mom.phi_plus += p * phi_plus(m);
        mom.psi += p * psi(q);
        mom.log_plus_capped += p * if q > 1.0 { q.ln().min(1.0) } else { 0.0 };
    }
    // joint atoms: the factorized solve above uses marginal moments, which is
    // exact for product atoms; for general joint atoms redo the normalization
    // and drift with the joint weights
    let mut t = solve_constants(&mom)?;
    let weight =
        |g: &AffineMap| phi_weight(g.slope(), t.c1) * psi(g.shift());
    let z: f64 = spec.atoms().iter().map(|(g, p)| p * weight(g)).sum();
    t.c0 = 1.0 / (z * t.c2);
    let mut drift = 0.0;
    let mut elpq = 0.0;
    let mut atoms = Vec::with_capacity(spec.atoms().len());
    for (g, p) in spec.atoms() {
        let w = p * t.f(g.slope()) * t.h(g.shift());
        drift += w * g.slope().ln();
        elpq += w * if g.shift() > 1.0 { g.shift().ln() } else { 0.0 };
        atoms.push((*g, w));
    }
    let total: f64 = atoms.iter().map(|(_, p)| p).sum();
    t.normalization = total;
    // clean tiny float residue so the tilted spec constructor accepts it
    for a in &mut atoms {
        a.1 /= total;
    }
    t.drift = drift / total;
    t.e_log_plus_q = elpq / total;
    if !(t.drift < 0.0) {
        return Err(Error::TiltingInfeasible);
    }
    Ok((t, FiniteSupportSpec::new(atoms)?))
}

fn phi_weight(m: f64, c1: f64) -> f64 {
    if m < 1.0 {
        phi_minus(m)
    } else {
        c1 * phi_plus(m)
    }
}

/// A seeded rejection sampler for the tilted pair law over an analytic spec.
#[derive(Debug, Clone)]
pub struct TiltedSampler {
    base: DistributionSpec,
    tilt: TiltingSpec,
}

impl TiltedSampler {
    /// One tilted draw: propose from the base law, accept with probability
    /// `f(m) h(q) / (c0 max(1, c1) c2)`.
    pub fn sample(&self, rng: &mut StreamRng) -> (f64, f64) {
        let cap = self.tilt.c0 * self.tilt.c1.max(1.0) * self.tilt.c2;
        loop {
            let (m, q) = self.base.sample_pair(rng);
            let ratio = self.tilt.f(m) * self.tilt.h(q) / cap;
            if open_unit(rng) <= ratio {
                return (m, q);
            }
        }
    }
}

/// Tilt an analytic (independent) spec. Returns the solved constants, the
/// exactly representable tilted spec when the reweighted marginals stay
/// inside the family menu (discrete M with at most two atoms; Q untouched
/// whenever its support stays below e), and a rejection sampler that works
/// regardless.
pub fn build_tilting(
    spec: &DistributionSpec,
) -> Result<(TiltingSpec, Option<DistributionSpec>, TiltedSampler)> {
    if spec.dependence() != Dependence::Independent {
        return Err(Error::InvalidSpec(
            "tilting is implemented for independent pair laws".into(),
        ));
    }
    let m_mom = marginal_moments(spec.m(), true);
    let q_mom = marginal_moments(spec.q(), false);
    let mom = TiltMoments {
        a_minus: m_mom.0,
        a_plus: m_mom.1,
        phi_minus: m_mom.2,
        phi_plus: m_mom.3,
        psi: q_mom.0,
        log_plus_capped: q_mom.1,
    };
    let t = solve_constants(&mom)?;
    if !(t.drift < 0.0) {
        return Err(Error::TiltingInfeasible);
    }
    let tilted = representable_tilt(spec, &t)?;
    let sampler = TiltedSampler { base: spec.clone(), tilt: t };
    Ok((t, tilted, sampler))
}

/// (a_minus, a_plus, phi_minus, phi_plus) for the M side;
/// (psi, log_plus_capped) for the Q side.
fn marginal_moments(law: &Law, m_side: bool) -> (f64, f64, f64, f64) {
    if let Some(atoms) = law.atoms() {
        let mut out = (0.0, 0.0, 0.0, 0.0);
        for (v, p) in atoms {
            if m_side {
                let lm = v.ln();
                if v <= 1.0 {
                    out.0 += p * lm.abs().min(1.0);
                } else {
                    out.1 += p * lm.min(1.0);
                }
                out.2 += p * phi_minus(v);
                out.3 += p * phi_plus(v);
            } else {
                out.0 += p * psi(v);
                out.1 += p * if v > 1.0 { v.ln().min(1.0) } else { 0.0 };
            }
        }
        out
    } else {
        // expectations through the quantile transform; every integrand is
        // bounded by 1, so clipping the unit interval costs < 2e-9
        let int = |g: &dyn Fn(f64) -> f64| {
            adaptive_simpson(&|u: f64| g(law.quantile(u)), 1e-9, 1.0 - 1e-9, 1e-9)
        };
        if m_side {
            (
                int(&|v| if v <= 1.0 { v.ln().abs().min(1.0) } else { 0.0 }),
                int(&|v| if v > 1.0 { v.ln().min(1.0) } else { 0.0 }),
                int(&|v| phi_minus(v)),
                int(&|v| phi_plus(v)),
            )
        } else {
            (
                int(&|v| psi(v)),
                int(&|v| if v > 1.0 { v.ln().min(1.0) } else { 0.0 }),
                0.0,
                0.0,
            )
        }
    }
}

/// Exactly representable tilted spec, when the reweighted marginals stay in
/// the family menu.
fn representable_tilt(
    spec: &DistributionSpec,
    t: &TiltingSpec,
) -> Result<Option<DistributionSpec>> {
    let m_tilted: Option<Law> = match spec.m().atoms() {
        Some(atoms) => {
            let weights: Vec<f64> = atoms.iter().map(|(v, p)| p * t.f(*v)).collect();
            let z: f64 = weights.iter().sum();
            match atoms.len() {
                1 => Some(Arc::new(PointMass::new(atoms[0].0)?) as Law),
                2 => Some(Arc::new(TwoPoint::new(
                    atoms[0].0,
                    weights[0] / z,
                    atoms[1].0,
                )?) as Law),
                _ => None,
            }
        }
        None => None,
    };
    let qs = spec.q().support();
    let q_tilted: Option<Law> = if qs.hi < std::f64::consts::E {
        // h is constant on the support: Q is untouched
        Some(spec.q().clone())
    } else if let Some(atoms) = spec.q().atoms() {
        let weights: Vec<f64> = atoms.iter().map(|(v, p)| p * t.h(*v)).collect();
        let z: f64 = weights.iter().sum();
        match atoms.len() {
            1 => Some(Arc::new(PointMass::new(atoms[0].0)?) as Law),
            2 => Some(Arc::new(TwoPoint::new(atoms[0].0, weights[0] / z, atoms[1].0)?) as Law),
            _ => None,
        }
    } else {
        None
    };
    match (m_tilted, q_tilted) {
        (Some(m), Some(q)) => Ok(Some(DistributionSpec::new(m, q, Dependence::Independent)?)),
        _ => Ok(None),
    }
}
