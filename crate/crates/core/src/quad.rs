//! Adaptive quadrature on Gauss-Kronrod 15-point panels.
//!
//! Worst-interval-first bisection, QUADPACK-style error rescaling. Power-law
//! endpoint singularities are removed exactly by the substitution
//! u = s^{1-α} before the adaptive pass; semi-infinite integrals take a
//! caller-supplied analytic tail bound and extend the finite window until the
//! bound drops below tol/10.

use alloc::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::math;

// 15-point Kronrod abscissae (positive half) and weights, 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = math::abs(err);
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = math::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = math::abs(res_kronrod);
    let mut fv = [0.0f64; 14];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[7 + j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (math::abs(f1) + math::abs(f2));
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * math::abs(f_center - mean);
    for j in 0..7 {
        res_asc += WGK[j] * (math::abs(fv[j] - mean) + math::abs(fv[7 + j] - mean));
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    (value, rescale_error(err, res_abs * math::abs(half), res_asc * math::abs(half)))
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(core::cmp::Ordering::Equal)
    }
}

const MAX_INTERVALS: usize = 4096;

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    debug_assert!(tol > 0.0);
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0 });
    }
    let (v, e) = qk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value: v, error: e });
    let mut total_value = v;
    let mut total_error = e;

    while total_error > tol && heap.len() < MAX_INTERVALS {
        let worst = heap.pop().expect("non-empty heap");
        if !(worst.b - worst.a).is_finite()
            || worst.b - worst.a < 1e-15 * (math::abs(a) + math::abs(b) + 1.0)
        {
            // cannot be split further
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = qk15(&f, worst.a, mid);
        let (v2, e2) = qk15(&f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Interval { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Interval { a: mid, b: worst.b, value: v2, error: e2 });
    }

    if total_error > tol && total_error > 1e-12 * math::abs(total_value) {
        return Err(Error::QuadratureNonConvergence { achieved: total_error, requested: tol });
    }
    Ok(QuadResult { value: total_value, abs_error: total_error })
}

/// ∫₀^b g(s) s^{-α} ds for smooth `g` and 0 < α < 1.
///
/// The substitution u = s^{1-α} removes the endpoint singularity exactly:
/// the integrand becomes g(u^{1/(1-α)}) / (1-α) on [0, b^{1-α}].
pub fn integrate_power_singular<F: Fn(f64) -> f64>(
    g: F,
    b: f64,
    alpha: f64,
    tol: f64,
) -> Result<QuadResult> {
    debug_assert!(alpha > 0.0 && alpha < 1.0 && b > 0.0);
    let p = 1.0 / (1.0 - alpha);
    let upper = math::pow(b, 1.0 - alpha);
    integrate(|u| g(math::pow(u, p)) / (1.0 - alpha), 0.0, upper, tol)
}

/// ∫_a^∞ f with a caller-supplied bound on the remainder ∫_b^∞ |f|.
///
/// The window is extended by doubling until `tail_bound(b) ≤ tol/10`.
pub fn integrate_with_tail<F, B>(f: F, a: f64, tol: f64, tail_bound: B) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let mut width = 1.0;
    let mut b = a + width;
    let mut guard = 0;
    while tail_bound(b) > tol / 10.0 {
        width *= 2.0;
        b = a + width;
        guard += 1;
        if guard > 200 {
            return Err(Error::QuadratureNonConvergence { achieved: tail_bound(b), requested: tol });
        }
    }
    let mut res = integrate(f, a, b, tol)?;
    res.abs_error += tail_bound(b);
    Ok(res)
}
