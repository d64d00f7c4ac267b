//! Scalar math used throughout the crate.
//!
//! All transcendentals route through `libm` so the crate behaves identically
//! with and without `std`. The special functions here (digamma, exponential
//! integral, incomplete gamma, Kolmogorov tail) are the ones the built-in
//! Lévy families and the test statistics need.

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const PI: f64 = core::f64::consts::PI;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn exp_m1(x: f64) -> f64 {
    libm::expm1(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn cbrt(x: f64) -> f64 {
    libm::cbrt(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}
#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}
#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Digamma function ψ(x) for x > 0.
///
/// Recurrence up to x ≥ 6, then the asymptotic series in 1/x².
pub fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + ln(x)
        - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 120.0
                        - inv2
                            * (1.0 / 252.0
                                - inv2
                                    * (1.0 / 240.0
                                        - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))))
}

/// Exponential integral E₁(x) = ∫ₓ^∞ e^{-u}/u du, x > 0.
pub fn exp_int_e1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        // E1(x) = -γ - ln x + Σ (-1)^{k+1} x^k / (k·k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..=40 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if abs(add) < 1e-17 * abs(sum) {
                break;
            }
        }
        -EULER_GAMMA - ln(x) + sum
    } else {
        // modified Lentz on E1(x) = e^{-x} / (x + 1 - 1²/(x + 3 - 2²/(x + 5 - ...)))
        let tiny = 1e-300;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / (x + 1.0);
        let mut h = d;
        for k in 1..200 {
            let a = -(k as f64) * (k as f64);
            let b = x + 2.0 * k as f64 + 1.0;
            d = b + a * d;
            if abs(d) < tiny {
                d = tiny;
            }
            c = b + a / c;
            if abs(c) < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            h *= delta;
            if abs(delta - 1.0) < 1e-16 {
                break;
            }
        }
        exp(-x) * h
    }
}

/// Upper incomplete gamma Γ(s, x) for s ∈ (-1, 1), s ≠ 0, x > 0.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> f64 {
    debug_assert!(s > -1.0 && s < 1.0 && s != 0.0 && x > 0.0);
    if x > s + 1.0 && x > 0.3 {
        // Lentz continued fraction: Γ(s,x) = e^{-x} x^s / (x+1-s - 1(1-s)/(x+3-s - ...))
        let tiny = 1e-300;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / (x + 1.0 - s);
        let mut h = d;
        for k in 1..300 {
            let a = -(k as f64) * (k as f64 - s);
            let b = x + 2.0 * k as f64 + 1.0 - s;
            d = b + a * d;
            if abs(d) < tiny {
                d = tiny;
            }
            c = b + a / c;
            if abs(c) < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            h *= delta;
            if abs(delta - 1.0) < 1e-16 {
                break;
            }
        }
        exp(-x + s * ln(x)) * h
    } else {
        // Γ(s,x) = Γ(s) - γ(s,x) with the lower series
        // γ(s,x) = x^s e^{-x} Σ_{n≥0} x^n / (s(s+1)···(s+n))
        let gamma_s = if s > 0.0 { gamma(s) } else { gamma(s + 1.0) / s };
        let mut denom = s;
        let mut term = 1.0 / denom;
        let mut sum = term;
        for n in 1..300 {
            denom = s + n as f64;
            term *= x / denom;
            sum += term;
            if abs(term) < 1e-17 * abs(sum) {
                break;
            }
        }
        gamma_s - exp(s * ln(x) - x) * sum
    }
}

/// Kolmogorov statistic tail Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kk = (k * k) as f64;
        let term = exp(-2.0 * kk * lambda * lambda);
        if term < 1e-18 {
            break;
        }
        sum += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Slope limiter for the finite-volume reconstruction.
#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if abs(a) < abs(b) {
        a
    } else {
        b
    }
}
