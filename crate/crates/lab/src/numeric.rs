//! Small numerical kernels shared across modules: adaptive quadrature,
//! Riemann–Stieltjes integration against a CDF, root bracketing and
//! log-domain accumulation.

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
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
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Riemann–Stieltjes integral `∫_a^b g(x) dF(x)` for a monotone CDF `F` and a
/// smooth integrand `g`, by midpoint rule with interval bisection until the
/// refinement increment drops below `tol`.
pub fn stieltjes<G: Fn(f64) -> f64, F: Fn(f64) -> f64>(
    g: &G,
    cdf: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> f64 {
    // midpoint-rule value on n equal subintervals
    let eval = |n: usize| -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        let mut f_lo = cdf(a);
        for i in 0..n {
            let hi = a + (i + 1) as f64 * h;
            let f_hi = cdf(hi);
            acc += g(a + (i as f64 + 0.5) * h) * (f_hi - f_lo);
            f_lo = f_hi;
        }
        acc
    };
    let mut n = 64;
    let mut prev = eval(n);
    loop {
        n *= 2;
        let cur = eval(n);
        if (cur - prev).abs() <= tol || n >= 1 << 20 {
            return cur;
        }
        prev = cur;
    }
}

/// Find a root of `f` on the bracket `[lo, hi]` (requires a sign change) by
/// bisection to absolute x-tolerance `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    debug_assert!(flo * f(hi) <= 0.0, "bisect: no sign change on bracket");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm >= 0.0) == (flo >= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `log(e^a + e^b)` without leaving the log domain; tolerates ±∞ inputs.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Streaming log-sum-exp accumulator: maintains `log Σ e^{l_k}` without
/// leaving the log domain, so sums with terms up to e^±thousands are exact
/// to f64 precision.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64, // Σ e^{l_k - max}
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp { max: f64::NEG_INFINITY, sum: 0.0 }
    }

    pub fn add(&mut self, l: f64) {
        if l == f64::NEG_INFINITY {
            return;
        }
        if l <= self.max {
            self.sum += (l - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - l).exp() + 1.0;
            self.max = l;
        }
    }

    pub fn value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

/// Least-squares slope of `y` against `x`, returning `(slope, stderr)`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    if x.len() <= 2 {
        return (slope, 0.0);
    }
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let fit = my + slope * (a - mx);
            (b - fit) * (b - fit)
        })
        .sum();
    let se = (sse / (n - 2.0) / sxx).sqrt();
    (slope, se)
}
