//! Studentized range distribution, computed by adaptive quadrature over its
//! double-integral definition. Backs Tukey's HSD critical values and
//! p-values.

use super::special::{ln_gamma, normal_cdf, normal_pdf};

/// Composite Simpson with `n` (even) intervals. The integrands here are
/// smooth, so a fine fixed grid reaches well past the 1e-6 target without
/// adaptive bookkeeping.
fn simpson_fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        sum += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// P(range of k standard normals <= x); the inner integral of the
/// studentized range definition. The normal density confines all mass to
/// |u| < 9 whatever the span x.
fn normal_range_cdf(x: f64, k: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let km1 = (k - 1) as i32;
    let integrand = |u: f64| {
        let span = normal_cdf(u) - normal_cdf(u - x);
        k as f64 * normal_pdf(u) * span.powi(km1)
    };
    simpson_fixed(&integrand, -9.0, 9.0, 192).clamp(0.0, 1.0)
}

/// Density of s where s^2 ~ chi^2_df / df.
fn scale_density(s: f64, df: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let half = df / 2.0;
    let ln = std::f64::consts::LN_2 + half * half.ln() - ln_gamma(half) + (df - 1.0) * s.ln()
        - df * s * s / 2.0;
    // Guard against the far tail underflowing through exp.
    if ln < -745.0 {
        0.0
    } else {
        ln.exp()
    }
}

/// CDF of the studentized range with `k` groups and `df` within degrees of
/// freedom. Accurate to about 1e-6.
pub fn srange_cdf(q: f64, k: usize, df: f64) -> f64 {
    debug_assert!(k >= 2 && df > 0.0);
    if q <= 0.0 {
        return 0.0;
    }
    // s concentrates around 1 with sd ~ 1/sqrt(2 df); twelve deviations
    // cover the support to far below the quadrature error.
    let sd = 1.0 / (2.0 * df).sqrt();
    let lo = (1.0 - 12.0 * sd).max(1e-9);
    let hi = 1.0 + 12.0 * sd;
    let integrand = |s: f64| scale_density(s, df) * normal_range_cdf(q * s, k);
    simpson_fixed(&integrand, lo, hi, 192).clamp(0.0, 1.0)
}

pub fn srange_sf(q: f64, k: usize, df: f64) -> f64 {
    (1.0 - srange_cdf(q, k, df)).clamp(0.0, 1.0)
}

/// Upper-alpha critical value q(k, df, alpha), by bisection on the CDF.
pub fn srange_quantile(p: f64, k: usize, df: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&p));
    let (mut lo, mut hi) = (1e-3, 100.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if srange_cdf(mid, k, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    0.5 * (lo + hi)
}
