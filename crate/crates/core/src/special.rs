//! Special functions backing the quantile machinery: log-gamma, the
//! regularized lower incomplete gamma function, and normal / chi-square
//! CDFs and quantiles.
//!
//! Quantiles are computed by a rational initial guess refined with Newton
//! steps against the CDF, which is itself built on the incomplete gamma
//! function, so the normal and chi-square routines share one numerical
//! core.

use std::f64::consts::PI;

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    const COEF: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let z = x - 1.0;
    let mut acc = 0.999_999_999_999_809_93;
    for (i, c) in COEF.iter().enumerate() {
        acc += c / (z + i as f64 + 1.0);
    }
    let t = z + 7.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma function P(a, x) for `a > 0`, `x >= 0`.
///
/// Series expansion for `x < a + 1`, Lentz continued fraction for the
/// complement otherwise; both converge to near machine precision.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    let log_prefix = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // P(a,x) = prefix * sum_{n>=0} x^n / (a (a+1) ... (a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= x / (a + n);
            sum += term;
            if term.abs() < sum.abs() * 1e-17 || n > 10_000.0 {
                break;
            }
        }
        (log_prefix.exp() * sum).min(1.0)
    } else {
        // Q(a,x) via the continued fraction; P = 1 - Q.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        let mut i = 1.0;
        loop {
            let an = -i * (i - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 || i > 10_000.0 {
                break;
            }
            i += 1.0;
        }
        let q = log_prefix.exp() * h;
        (1.0 - q).clamp(0.0, 1.0)
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF through the incomplete gamma function.
pub fn normal_cdf(x: f64) -> f64 {
    let p_half = gamma_p(0.5, 0.5 * x * x);
    if x >= 0.0 {
        0.5 * (1.0 + p_half)
    } else {
        0.5 * (1.0 - p_half)
    }
}

/// Upper tail of the standard normal, accurate for `x > 0`.
pub fn normal_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0 - normal_cdf(x);
    }
    // Q(1/2, x^2/2) without the 1 - P cancellation.
    0.5 * (1.0 - gamma_p(0.5, 0.5 * x * x))
}

/// Acklam's rational approximation to the normal quantile (~1e-9 accurate).
fn normal_quantile_approx(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e+01,
        2.209_460_984_245_205e+02,
        -2.759_285_104_469_687e+02,
        1.383_577_518_672_690e+02,
        -3.066_479_806_614_716e+01,
        2.506_628_277_459_239e+00,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e+01,
        1.615_858_368_580_409e+02,
        -1.556_989_798_598_866e+02,
        6.680_131_188_771_972e+01,
        -1.328_068_155_288_572e+01,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-03,
        -3.223_964_580_411_365e-01,
        -2.400_758_277_161_838e+00,
        -2.549_732_539_343_734e+00,
        4.374_664_141_464_968e+00,
        2.938_163_982_698_783e+00,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-03,
        3.224_671_290_700_398e-01,
        2.445_134_137_142_996e+00,
        3.754_408_661_907_416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile_approx(1.0 - p)
    }
}

/// Inverse standard normal CDF, accurate to better than 1e-9 absolute.
///
/// Odd by construction: `normal_quantile(p) == -normal_quantile(1 - p)`
/// holds exactly because both sides solve the same upper-tail problem.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile order must lie in (0,1)");
    if p == 0.5 {
        return 0.0;
    }
    // Solve sf(z) = q for the smaller tail mass q, then attach the sign.
    let q = p.min(1.0 - p);
    let mut z = -normal_quantile_approx(q); // positive upper-tail start
    for _ in 0..2 {
        let f = normal_sf(z) - q;
        let df = normal_pdf(z);
        if df > 0.0 {
            z += f / df;
        }
    }
    if p > 0.5 {
        z
    } else {
        -z
    }
}

/// Chi-square CDF with `d` degrees of freedom.
pub fn chi2_cdf(d: u32, x: f64) -> f64 {
    assert!(d >= 1);
    if x <= 0.0 {
        0.0
    } else {
        gamma_p(d as f64 / 2.0, x / 2.0)
    }
}

fn chi2_pdf(d: u32, x: f64) -> f64 {
    let a = d as f64 / 2.0;
    ((a - 1.0) * x.ln() - x / 2.0 - a * 2.0f64.ln() - ln_gamma(a)).exp()
}

/// Chi-square quantile of order `p`, accurate to 1e-8 relative.
///
/// Wilson-Hilferty start, Newton iterations safeguarded by a bracket that
/// always contains the root.
pub fn chi2_quantile(d: u32, p: f64) -> f64 {
    assert!(d >= 1);
    assert!(p > 0.0 && p < 1.0, "quantile order must lie in (0,1)");
    let df = d as f64;
    let z = normal_quantile(p);
    let wh = 1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt();
    let mut x = if wh > 0.0 { df * wh * wh * wh } else { 1e-8 };

    // Bracket the root.
    let mut lo = 0.0;
    let mut hi = x.max(df).max(1.0);
    while chi2_cdf(d, hi) < p {
        hi *= 2.0;
        if hi > 1e308 {
            break;
        }
    }
    x = x.clamp(lo + 1e-300, hi);

    for _ in 0..100 {
        let f = chi2_cdf(d, x) - p;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let df_dx = chi2_pdf(d, x);
        let mut next = if df_dx > 0.0 { x - f / df_dx } else { x };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - x).abs() <= 1e-12 * x.abs() + 1e-300;
        x = next;
        if done {
            break;
        }
    }
    x
}
