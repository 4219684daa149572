//! Special functions: the `(e^x - 1)/x` kernel, truncated exponential moments
//! and Gaussian tail helpers evaluated in log space.

use std::f64::consts::{PI, SQRT_2};

/// `ln(sqrt(2 pi))`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `(e^x - 1) / x`, continuous at zero with value 1.
pub fn zeta(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        // 1 + x/2 + x^2/6 + x^3/24
        1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0))
    } else {
        x.exp_m1() / x
    }
}

/// `ln zeta(x)` without overflow for large `|x|`.
pub fn ln_zeta(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        zeta(x).ln()
    } else if x > 0.0 {
        // e^x (1 - e^{-x}) / x
        x + (-(-x).exp_m1()).ln() - x.ln()
    } else {
        (-x.exp_m1()).ln() - (-x).ln()
    }
}

/// Truncated moments `J_k(r, w) = int_0^w v^k e^{-r v} dv` for `k = 0, 1, 2`, `r >= 0`.
pub fn decaying_moments(r: f64, w: f64) -> [f64; 3] {
    debug_assert!(r >= 0.0 && w >= 0.0);
    let x = r * w;
    if x <= 1.0 {
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut term = 1.0; // (-x)^j / j!
            let mut sum = 0.0;
            for j in 0..32 {
                sum += term / (k + 1 + j) as f64;
                term *= -x / (j + 1) as f64;
            }
            *slot = w.powi(k as i32 + 1) * sum;
        }
        out
    } else {
        let e = (-x).exp();
        [
            -(-x).exp_m1() / r,
            (1.0 - e * (1.0 + x)) / (r * r),
            (2.0 - e * (2.0 + x * (2.0 + x))) / (r * r * r),
        ]
    }
}

/// Moments `int_0^w u^k e^{a + c u} du` for `k = 0, 1, 2`.
///
/// Increasing exponentials are reflected onto decaying ones so that no term
/// larger than the integrand itself is ever formed.
pub fn segment_moments(a: f64, c: f64, w: f64) -> [f64; 3] {
    if w <= 0.0 {
        return [0.0; 3];
    }
    if c <= 0.0 {
        let j = decaying_moments(-c, w);
        let s = a.exp();
        [s * j[0], s * j[1], s * j[2]]
    } else {
        let j = decaying_moments(c, w);
        let s = (a + c * w).exp();
        [
            s * j[0],
            s * (w * j[0] - j[1]),
            s * (w * w * j[0] - 2.0 * w * j[1] + j[2]),
        ]
    }
}

/// `ln int_0^w e^{a + c u} du`.
pub fn ln_segment_mass(a: f64, c: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return f64::NEG_INFINITY;
    }
    a + w.ln() + ln_zeta(c * w)
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Gaussian tail `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// `ln Q(x)`, accurate far into the upper tail.
///
/// Above `x = 5` the Mills ratio is evaluated by its continued fraction, which
/// plays the role of the scaled complementary error function.
pub fn ln_q(x: f64) -> f64 {
    if x < 5.0 {
        q_function(x).ln()
    } else {
        -0.5 * x * x - LN_SQRT_2PI + mills_ratio(x).ln()
    }
}

/// `Q(x) / phi(x)` for `x >= 1` via backward evaluation of the continued fraction.
fn mills_ratio(x: f64) -> f64 {
    let mut t = x;
    for k in (1..=120).rev() {
        t = x + k as f64 / t;
    }
    1.0 / t
}

/// `ln(Phi(upper) - Phi(lower))` for `lower <= upper`.
pub fn ln_normal_interval(lower: f64, upper: f64) -> f64 {
    if upper <= lower {
        return f64::NEG_INFINITY;
    }
    if lower >= 0.0 {
        let ql = ln_q(lower);
        let qu = ln_q(upper);
        ql + ln_one_minus_exp(qu - ql)
    } else if upper <= 0.0 {
        let ql = ln_q(-upper);
        let qu = ln_q(-lower);
        ql + ln_one_minus_exp(qu - ql)
    } else {
        (-(q_function(-lower) + q_function(upper))).ln_1p()
    }
}

/// `ln(1 - e^d)` for `d <= 0`.
fn ln_one_minus_exp(d: f64) -> f64 {
    if d > -std::f64::consts::LN_2 {
        (-d.exp_m1()).ln()
    } else {
        (-d.exp()).ln_1p()
    }
}
