//! Exact algebra of affine transformations x ↦ mx + q of the line: the pair
//! representation, composition, inversion, n-fold iteration, fixed points and
//! bounded enumeration of the semigroup generated by a finite set of maps.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance below which a slope counts as 1 and has no unique fixed point.
pub const SLOPE_ONE_TOL: f64 = 1e-9;

/// Default cap on the number of semigroup elements an enumeration may produce.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 22;

/// An affine map `x ↦ m x + q` with positive slope and nonnegative shift.
///
/// Maps with `m = 0` are rejected at construction; inverses, which may have a
/// negative shift, are represented by [`RelaxedAffineMap`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    m: f64,
    q: f64,
}

/// An affine map whose shift may be negative; produced only by [`AffineMap::inverse`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxedAffineMap {
    pub m: f64,
    pub q: f64,
}

impl RelaxedAffineMap {
    pub fn apply(&self, x: f64) -> f64 {
        self.m * x + self.q
    }
}

impl AffineMap {
    pub fn new(m: f64, q: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::BadParameter(format!("affine slope must be positive, got {m}")));
        }
        if !(q >= 0.0) || !q.is_finite() {
            return Err(Error::BadParameter(format!(
                "affine shift must be nonnegative, got {q}"
            )));
        }
        Ok(AffineMap { m, q })
    }

    pub fn identity() -> Self {
        AffineMap { m: 1.0, q: 0.0 }
    }

    pub fn slope(&self) -> f64 {
        self.m
    }

    pub fn shift(&self) -> f64 {
        self.q
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.m * x + self.q
    }

    /// Composition `(m1, q1)(m2, q2) = (m1 m2, q1 + m1 q2)`, so that
    /// `compose(g1, g2)(x) = g1(g2(x))`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap { m: self.m * other.m, q: self.q + self.m * other.q }
    }

    /// Group inverse `(m, q)^{-1} = (1/m, -q/m)`. The result may have a
    /// negative shift and therefore lives in the relaxed type.
    pub fn inverse(&self) -> RelaxedAffineMap {
        RelaxedAffineMap { m: 1.0 / self.m, q: -self.q / self.m }
    }

    /// The unique fixed point `q / (1 - m)`, defined when the slope is not 1.
    ///
    /// Slopes within [`SLOPE_ONE_TOL`] of 1 are rejected rather than mapped to
    /// huge values; downstream attractor code only needs fixed points of
    /// strictly contractive elements.
    pub fn fixed_point(&self) -> Result<f64> {
        if (self.m - 1.0).abs() < SLOPE_ONE_TOL {
            return Err(Error::SlopeOne);
        }
        Ok(self.q / (1.0 - self.m))
    }

    /// n-fold application `g^n(x)`, computed in closed form:
    /// `m^n (x - x0) + x0` when `m != 1`, and `x + n q` when `m = 1`.
    pub fn iterate(&self, n: u32, x: f64) -> f64 {
        assert!(n >= 1, "iterate requires n >= 1");
        if (self.m - 1.0).abs() < SLOPE_ONE_TOL {
            // exact on the m = 1 line; the tolerance band around it is tiny
            return x + n as f64 * self.q;
        }
        let x0 = self.q / (1.0 - self.m);
        self.m.powi(n as i32) * (x - x0) + x0
    }
}

/// One element of a semigroup enumeration: the product map together with the
/// generator-index word that produced it.
#[derive(Debug, Clone)]
pub struct SemigroupElement {
    pub map: AffineMap,
    /// Indices into the generator list, outermost factor first: the word
    /// `[i, j]` denotes `g_i ∘ g_j`.
    pub word: Vec<usize>,
}

/// All products `g_1 ⋯ g_n` of the generators with `1 <= n <= depth`, in
/// lexicographic word order level by level. Duplicate map values are kept:
/// deduplication with a tolerance would bias attractor approximations, and
/// downstream ε-covering is insensitive to duplicates.
#[derive(Debug, Clone)]
pub struct SemigroupEnumeration {
    pub generators: Vec<AffineMap>,
    pub depth: u32,
    pub elements: Vec<SemigroupElement>,
}

/// Enumerate the semigroup generated by `generators` up to word length
/// `depth`, failing upfront if the element count would exceed `budget`
/// (use [`DEFAULT_ENUMERATION_BUDGET`] when in doubt).
pub fn enumerate_semigroup(
    generators: &[AffineMap],
    depth: u32,
    budget: u64,
) -> Result<SemigroupEnumeration> {
    if generators.is_empty() {
        return Err(Error::BadParameter("semigroup enumeration needs generators".into()));
    }
    assert!(depth >= 1, "enumeration depth must be >= 1");
    let g = generators.len() as u64;
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for _ in 0..depth {
        level = level.saturating_mul(g);
        total = total.saturating_add(level);
        if total > budget {
            return Err(Error::BudgetExceeded { requested: total, budget });
        }
    }

    let mut elements: Vec<SemigroupElement> = Vec::with_capacity(total as usize);
    // level 1 = the generators themselves, in index order
    let mut prev_level: Vec<SemigroupElement> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| SemigroupElement { map: *g, word: vec![i] })
        .collect();
    elements.extend(prev_level.iter().cloned());
    for _ in 1..depth {
        let mut next = Vec::with_capacity(prev_level.len() * generators.len());
        for el in &prev_level {
            for (i, g) in generators.iter().enumerate() {
                let mut word = el.word.clone();
                word.push(i);
                next.push(SemigroupElement { map: el.map.compose(g), word });
            }
        }
        elements.extend(next.iter().cloned());
        prev_level = next;
    }
    Ok(SemigroupEnumeration { generators: generators.to_vec(), depth, elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn map(m: f64, q: f64) -> AffineMap {
        AffineMap::new(m, q).unwrap()
    }

    #[test]
    fn compose_examples() {
        let id = AffineMap::identity();
        let g = map(3.0, 4.0);
        assert_eq!(id.compose(&g), g);
        let h = map(2.0, 1.0);
        let hg = h.compose(&g);
        assert_eq!(hg, map(6.0, 9.0));
        // action compatibility at x = 0
        assert_eq!(hg.apply(0.0), h.apply(g.apply(0.0)));
        assert_eq!(hg.apply(0.0), 9.0);
    }

    #[test]
    fn inverse_examples() {
        let g = map(2.0, 4.0);
        let inv = g.inverse();
        assert_eq!((inv.m, inv.q), (0.5, -2.0));
        let id = AffineMap::identity().inverse();
        assert_eq!((id.m, id.q), (1.0, 0.0));
        let g = map(0.5, 1.0);
        let inv = g.inverse();
        assert_eq!((inv.m, inv.q), (2.0, -2.0));
        // g ∘ g^{-1} = identity to 1e-12 relative
        for (m, q) in [(2.0, 4.0), (0.3, 7.5), (1.7, 0.01)] {
            let g = map(m, q);
            let inv = g.inverse();
            let m_comp = g.slope() * inv.m;
            let q_comp = g.shift() + g.slope() * inv.q;
            assert!((m_comp - 1.0).abs() <= 1e-12);
            assert!(q_comp.abs() <= 1e-12 * (1.0 + q.abs()));
        }
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(map(1.0 / 3.0, 0.0).fixed_point().unwrap(), 0.0);
        let x = map(1.0 / 3.0, 2.0 / 3.0).fixed_point().unwrap();
        assert!((x - 1.0).abs() < 1e-15);
        assert_eq!(map(2.0, 1.0).fixed_point().unwrap(), -1.0);
        assert_eq!(map(1.0, 5.0).fixed_point(), Err(Error::SlopeOne));
        assert_eq!(map(1.0 + 1e-10, 5.0).fixed_point(), Err(Error::SlopeOne));
    }

    #[test]
    fn iterate_examples() {
        // g = (1/2, 1), x = 0: g^n(0) = 2(1 - 2^{-n}); brute force oracle below
        let g = map(0.5, 1.0);
        assert!((g.iterate(3, 0.0) - 1.75).abs() < 1e-15);
        // m = 1 branch
        assert_eq!(map(1.0, 5.0).iterate(4, 2.0), 22.0);
        // g = (2, 1), x = 1: 2^10 (1 - (-1)) + (-1) = 2047
        assert_eq!(map(2.0, 1.0).iterate(10, 1.0), 2047.0);
    }

    #[test]
    fn iterate_agrees_with_repeated_application() {
        let mut rng = stream_rng(101, 0);
        for _ in 0..200 {
            let m = rng.random::<f64>() * 2.0 + 0.01;
            let q = rng.random::<f64>() * 3.0;
            if (m - 1.0).abs() < 1e-6 {
                continue;
            }
            let g = map(m, q);
            let x = rng.random::<f64>() * 10.0 - 5.0;
            let n = rng.random_range(1..=20u32);
            let mut brute = x;
            for _ in 0..n {
                brute = g.apply(brute);
            }
            let fast = g.iterate(n, x);
            let scale = 1.0 + brute.abs();
            assert!(
                (fast - brute).abs() <= 1e-10 * scale,
                "m={m} q={q} n={n}: {fast} vs {brute}"
            );
        }
    }

    #[test]
    fn associativity_is_exact_in_pair_representation() {
        let mut rng = stream_rng(102, 0);
        for _ in 0..10_000 {
            let r = |rng: &mut crate::rng::StreamRng| {
                map(rng.random::<f64>() * 3.0 + 1e-3, rng.random::<f64>() * 5.0)
            };
            let (a, b, c) = (r(&mut rng), r(&mut rng), r(&mut rng));
            let left = a.compose(&b).compose(&c);
            let right = a.compose(&b.compose(&c));
            // associative in the (m, q) representation up to rounding of the
            // float products and sums
            assert!((left.slope() - right.slope()).abs() <= 1e-15 * left.slope().abs());
            assert!((left.shift() - right.shift()).abs() <= 1e-12 * (1.0 + left.shift().abs()));
        }
    }

    #[test]
    fn action_homomorphism() {
        let mut rng = stream_rng(103, 0);
        for _ in 0..10_000 {
            let a = map(rng.random::<f64>() * 3.0 + 1e-3, rng.random::<f64>() * 5.0);
            let b = map(rng.random::<f64>() * 3.0 + 1e-3, rng.random::<f64>() * 5.0);
            let x = rng.random::<f64>() * 20.0 - 10.0;
            let lhs = a.compose(&b).apply(x);
            let rhs = a.apply(b.apply(x));
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs() + rhs.abs()));
        }
    }

    #[test]
    fn fixed_point_residual_bound() {
        let mut rng = stream_rng(104, 0);
        for _ in 0..10_000 {
            let m = rng.random::<f64>() * 4.0 + 1e-4;
            if (m - 1.0).abs() < 1e-9 {
                continue;
            }
            let g = map(m, rng.random::<f64>() * 10.0);
            let x0 = match g.fixed_point() {
                Ok(v) => v,
                Err(_) => continue,
            };
            assert!((g.apply(x0) - x0).abs() <= 1e-12 * (1.0 + x0.abs()) * (1.0 + m));
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        let g1 = map(1.0 / 3.0, 0.0);
        let g2 = map(1.0 / 3.0, 2.0 / 3.0);
        let e = enumerate_semigroup(&[g1, g2], 1, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(e.elements.len(), 2);
        assert_eq!(e.elements[0].map, g1);
        assert_eq!(e.elements[1].map, g2);

        let e = enumerate_semigroup(&[g1, g2], 2, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(e.elements.len(), 6);
        // word (g1, g2) sits at position 2 + 1 = index 3: words [0],[1],[0,0],[0,1],...
        let el = &e.elements[3];
        assert_eq!(el.word, vec![0, 1]);
        let expect = g1.compose(&g2);
        assert_eq!(el.map, expect);
        assert!((el.map.slope() - 1.0 / 9.0).abs() < 1e-15);
        assert!((el.map.shift() - 2.0 / 9.0).abs() < 1e-15);

        // single generator: [g, g^2, g^3]
        let g = map(0.5, 1.0);
        let e = enumerate_semigroup(&[g], 3, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(e.elements.len(), 3);
        assert_eq!(e.elements[2].map, g.compose(&g).compose(&g));
        // every word length <= depth
        assert!(e.elements.iter().all(|el| el.word.len() <= 3));
    }

    #[test]
    fn enumeration_budget() {
        let g = map(0.5, 0.1);
        let err = enumerate_semigroup(&[g, g, g], 20, 1000).unwrap_err();
        match err {
            Error::BudgetExceeded { budget, .. } => assert_eq!(budget, 1000),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
