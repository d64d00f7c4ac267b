//! Time-varying index functions t ↦ α(t).
//!
//! These parametrise the built-in Lévy families: the stability index of the
//! multistable subordinator, the rate of the gamma-like family, the tempering
//! of the relativistic family, and drift rates. Stability indices must stay
//! strictly inside (0, 1) on the configured horizon; that is checked on a
//! dense probe grid together with a modulus-of-continuity bound, since exact
//! verification of continuity is not possible numerically.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Number of interior probe points used by [`TimeVaryingIndex::validate_stability_index`].
pub const PROBE_POINTS: usize = 1024;
/// Maximum allowed change between adjacent probes.
pub const CONTINUITY_MODULUS: f64 = 0.1;

#[derive(Debug, Clone)]
pub enum TimeVaryingIndex {
    Constant(f64),
    /// clamp(a + b·t, lo, hi)
    AffineClamped { a: f64, b: f64, lo: f64, hi: f64 },
    /// base + amp·sin(omega·t + phase)
    Sinusoidal { base: f64, amp: f64, omega: f64, phase: f64 },
    /// Piecewise-linear through sorted (t, value) points, constant outside.
    Tabulated(Vec<(f64, f64)>),
}

impl TimeVaryingIndex {
    pub fn constant(c: f64) -> Self {
        TimeVaryingIndex::Constant(c)
    }

    pub fn affine_clamped(a: f64, b: f64, lo: f64, hi: f64) -> Self {
        TimeVaryingIndex::AffineClamped { a, b, lo, hi }
    }

    pub fn sinusoidal(base: f64, amp: f64, omega: f64, phase: f64) -> Self {
        TimeVaryingIndex::Sinusoidal { base, amp, omega, phase }
    }

    /// Points must be sorted by t with strictly increasing abscissae.
    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("tabulated index needs at least one point"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Domain("tabulated abscissae must be strictly increasing"));
        }
        Ok(TimeVaryingIndex::Tabulated(points))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeVaryingIndex::Constant(c) => *c,
            TimeVaryingIndex::AffineClamped { a, b, lo, hi } => (a + b * t).clamp(*lo, *hi),
            TimeVaryingIndex::Sinusoidal { base, amp, omega, phase } => {
                base + amp * math::sin(omega * t + phase)
            }
            TimeVaryingIndex::Tabulated(pts) => {
                if t <= pts[0].0 {
                    return pts[0].1;
                }
                let last = pts.len() - 1;
                if t >= pts[last].0 {
                    return pts[last].1;
                }
                let k = pts.partition_point(|p| p.0 <= t) - 1;
                let (t0, v0) = pts[k];
                let (t1, v1) = pts[k + 1];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Closed-form derivative dα/dt (zero in clamped regions and outside tables).
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            TimeVaryingIndex::Constant(_) => 0.0,
            TimeVaryingIndex::AffineClamped { a, b, lo, hi } => {
                let raw = a + b * t;
                if raw <= *lo || raw >= *hi {
                    0.0
                } else {
                    *b
                }
            }
            TimeVaryingIndex::Sinusoidal { amp, omega, phase, .. } => {
                amp * omega * math::cos(omega * t + phase)
            }
            TimeVaryingIndex::Tabulated(pts) => {
                if t <= pts[0].0 || t >= pts[pts.len() - 1].0 {
                    return 0.0;
                }
                let k = pts.partition_point(|p| p.0 <= t) - 1;
                let (t0, v0) = pts[k];
                let (t1, v1) = pts[k + 1];
                (v1 - v0) / (t1 - t0)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            TimeVaryingIndex::Constant(_) => true,
            TimeVaryingIndex::AffineClamped { b, .. } => *b == 0.0,
            TimeVaryingIndex::Sinusoidal { amp, omega, .. } => *amp == 0.0 || *omega == 0.0,
            TimeVaryingIndex::Tabulated(pts) => pts.iter().all(|p| p.1 == pts[0].1),
        }
    }

    /// Checks 0 < α(t) < 1 on `PROBE_POINTS` uniform points plus endpoints of
    /// `[0, horizon]`, and that adjacent probes differ by at most
    /// `CONTINUITY_MODULUS` — the probe-grid stand-in for the continuity a
    /// stability index must have.
    pub fn validate_stability_index(&self, horizon: f64) -> Result<()> {
        self.validate_range(horizon, 0.0, 1.0)?;
        let n = PROBE_POINTS + 1;
        let mut prev = f64::NAN;
        for k in 0..=n {
            let v = self.eval(horizon * k as f64 / n as f64);
            if prev.is_finite() && math::abs(v - prev) > CONTINUITY_MODULUS {
                return Err(Error::Domain("index violates continuity modulus between probes"));
            }
            prev = v;
        }
        Ok(())
    }

    /// Range probing with an arbitrary open range (lo, hi); `hi` may be +∞.
    /// Used for rate-type parameters where only positivity is required.
    pub fn validate_range(&self, horizon: f64, lo: f64, hi: f64) -> Result<()> {
        let n = PROBE_POINTS + 1;
        for k in 0..=n {
            let t = horizon * k as f64 / n as f64;
            let v = self.eval(t);
            if !(v > lo && v < hi) || !v.is_finite() {
                return Err(Error::IndexRange { t, value: v });
            }
        }
        Ok(())
    }

    /// Maximum over the probe grid, used for majorant construction.
    pub fn max_on(&self, a: f64, b: f64, probes: usize) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for k in 0..=probes {
            let t = a + (b - a) * k as f64 / probes as f64;
            m = m.max(self.eval(t));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn eval_kinds() {
        let c = TimeVaryingIndex::constant(0.5);
        assert_eq!(c.eval(3.0), 0.5);
        assert_eq!(c.derivative(3.0), 0.0);

        let a = TimeVaryingIndex::affine_clamped(0.2, 0.1, 0.25, 0.8);
        assert_eq!(a.eval(0.0), 0.25); // clamped below
        assert_eq!(a.eval(1.0), 0.30000000000000004);
        assert_eq!(a.derivative(0.0), 0.0);
        assert_eq!(a.derivative(1.0), 0.1);
        assert_eq!(a.eval(100.0), 0.8);

        let s = TimeVaryingIndex::sinusoidal(0.6, 0.2, 1.0, 0.0);
        assert!(math::abs(s.eval(1.0) - (0.6 + 0.2 * math::sin(1.0))) < 1e-15);
        assert!(math::abs(s.derivative(1.0) - 0.2 * math::cos(1.0)) < 1e-15);

        let t = TimeVaryingIndex::tabulated(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 3.0)]).unwrap();
        assert_eq!(t.eval(-1.0), 1.0);
        assert_eq!(t.eval(0.5), 2.0);
        assert_eq!(t.eval(1.5), 3.0);
        assert_eq!(t.eval(5.0), 3.0);
        assert_eq!(t.derivative(0.5), 2.0);
    }

    #[test]
    fn range_probing() {
        let ok = TimeVaryingIndex::sinusoidal(0.6, 0.2, 1.0, 0.0);
        assert!(ok.validate_stability_index(4.0).is_ok());

        let bad = TimeVaryingIndex::constant(1.2);
        assert!(matches!(
            bad.validate_stability_index(1.0),
            Err(Error::IndexRange { value, .. }) if value == 1.2
        ));

        // hits zero inside the horizon
        let zero = TimeVaryingIndex::affine_clamped(0.5, -1.0, -1.0, 1.0);
        assert!(bad_range_at(&zero));
    }

    fn bad_range_at(idx: &TimeVaryingIndex) -> bool {
        matches!(idx.validate_stability_index(1.0), Err(Error::IndexRange { .. }))
    }

    #[test]
    fn continuity_modulus() {
        // a jump of 0.5 between adjacent table points closer than the probe spacing
        let t = TimeVaryingIndex::tabulated(vec![(0.0, 0.2), (1e-5, 0.7), (1.0, 0.7)]).unwrap();
        assert!(matches!(t.validate_stability_index(1.0), Err(Error::Domain(_))));
    }
}
