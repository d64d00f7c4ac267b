//! One-sided α-stable laws, 0 < α < 1, in the standard scale
//! E e^{-λX} = e^{-λ^α}.
//!
//! Sampling uses Kanter's representation (exact in distribution):
//! X = (A(U)/E)^{(1-α)/α} with U ~ Unif(0,π), E ~ Exp(1) and
//! A(u) = [sin(αu)^α sin((1-α)u)^{1-α} / sin(u)]^{1/(1-α)}.
//!
//! Density and distribution function use the Zolotarev integral form
//!   F(x) = (1/π) ∫₀^π exp(-x^{-α/(1-α)} V(φ)) dφ,
//!   f(x) = (α/((1-α)π)) x^{-1/(1-α)} ∫₀^π V(φ) exp(-x^{-α/(1-α)} V(φ)) dφ,
//! with V(φ) = [sin(αφ)/sin φ]^{α/(1-α)} sin((1-α)φ)/sin φ. For α = 1/2 both
//! reduce to the closed Lévy forms, which serve as cross-checks.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Exp1, OpenClosed01};

use crate::error::Result;
use crate::math;
use crate::quad;

/// One draw from the standard one-sided α-stable law via Kanter's method.
pub fn sample_standard(alpha: f64, rng: &mut ChaCha12Rng) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let u: f64 = rng.sample::<f64, _>(OpenClosed01) * math::PI;
    let e: f64 = rng.sample(Exp1);
    let a = kanter_a(alpha, u);
    math::pow(a / e, (1.0 - alpha) / alpha)
}

/// A draw with Laplace transform e^{-c λ^α} (c > 0): scale by c^{1/α}.
pub fn sample_scaled(alpha: f64, c: f64, rng: &mut ChaCha12Rng) -> f64 {
    math::pow(c, 1.0 / alpha) * sample_standard(alpha, rng)
}

fn kanter_a(alpha: f64, u: f64) -> f64 {
    let su = math::sin(u);
    let s1 = math::sin(alpha * u);
    let s2 = math::sin((1.0 - alpha) * u);
    math::pow(
        math::pow(s1, alpha) * math::pow(s2, 1.0 - alpha) / su,
        1.0 / (1.0 - alpha),
    )
}

fn zolotarev_v(alpha: f64, phi: f64) -> f64 {
    if phi < 1e-13 {
        return math::pow(alpha, alpha / (1.0 - alpha)) * (1.0 - alpha);
    }
    let sp = math::sin(phi);
    math::pow(math::sin(alpha * phi) / sp, alpha / (1.0 - alpha)) * math::sin((1.0 - alpha) * phi)
        / sp
}

/// Density of the standard one-sided α-stable law at x > 0.
pub fn pdf_standard(alpha: f64, x: f64) -> Result<f64> {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    if x <= 0.0 {
        return Ok(0.0);
    }
    let c = math::pow(x, -alpha / (1.0 - alpha));
    let integrand = move |phi: f64| {
        let v = zolotarev_v(alpha, phi);
        let e = -c * v;
        if e < -700.0 {
            0.0
        } else {
            v * math::exp(e)
        }
    };
    let integral = quad::integrate(integrand, 0.0, math::PI, 1e-12)?.value;
    Ok(alpha / ((1.0 - alpha) * math::PI) * math::pow(x, -1.0 / (1.0 - alpha)) * integral)
}

/// Distribution function of the standard one-sided α-stable law.
pub fn cdf_standard(alpha: f64, x: f64) -> Result<f64> {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    if x <= 0.0 {
        return Ok(0.0);
    }
    let c = math::pow(x, -alpha / (1.0 - alpha));
    let integrand = move |phi: f64| {
        let e = -c * zolotarev_v(alpha, phi);
        if e < -700.0 {
            0.0
        } else {
            math::exp(e)
        }
    };
    let integral = quad::integrate(integrand, 0.0, math::PI, 1e-12)?.value;
    Ok((integral / math::PI).clamp(0.0, 1.0))
}

/// Quantile by bisection on [`cdf_standard`].
pub fn quantile_standard(alpha: f64, p: f64) -> Result<f64> {
    debug_assert!(p > 0.0 && p < 1.0);
    let mut lo = 1e-12;
    let mut hi = 1.0;
    while cdf_standard(alpha, hi)? < p {
        hi *= 2.0;
        if hi > 1e18 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf_standard(alpha, mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mode of the standard density, located by golden-section search.
pub fn mode_standard(alpha: f64) -> Result<f64> {
    let q10 = quantile_standard(alpha, 0.10)?;
    let q60 = quantile_standard(alpha, 0.60)?;
    let (mut a, mut b) = (q10 * 0.05, q60);
    let phi = 0.618_033_988_749_895;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = pdf_standard(alpha, c)?;
    let mut fd = pdf_standard(alpha, d)?;
    for _ in 0..120 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = pdf_standard(alpha, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = pdf_standard(alpha, d)?;
        }
        if b - a < 1e-10 * (1.0 + b) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Closed-form density of the ½-stable (Lévy) law with transform e^{-t√λ}:
/// q(x,t) = t/(2√π) x^{-3/2} e^{-t²/(4x)}.
pub fn half_stable_pdf(x: f64, t: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    t / (2.0 * math::sqrt(math::PI)) * math::pow(x, -1.5) * math::exp(-t * t / (4.0 * x))
}

/// CDF of the ½-stable law with transform e^{-t√λ}: erfc(t/(2√x)).
pub fn half_stable_cdf(x: f64, t: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    math::erfc(t / (2.0 * math::sqrt(x)))
}

/// Density of the inverse ½-stable law at level t: e^{-x²/(4t)}/√(πt).
pub fn inverse_half_stable_pdf(x: f64, t: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    math::exp(-x * x / (4.0 * t)) / math::sqrt(math::PI * t)
}

/// CDF of the inverse ½-stable law: erf(x/(2√t)).
pub fn inverse_half_stable_cdf(x: f64, t: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    math::erf(x / (2.0 * math::sqrt(t)))
}
