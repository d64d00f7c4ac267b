//! Time-indexed Bernstein functions and Lévy measures.
//!
//! A [`LevyFamily`] packages the pair (b′(t), ν(ds,t)) behind the operations
//! the rest of the crate needs: the Bernstein function f(λ,t), the Laplace
//! exponent Π(λ,t) = ∫₀ᵗ f(λ,s) ds, the tail ν̄(γ,t) = ν((γ,∞),t), cell
//! integrals of the tail for the PDE kernels, and the small-jump moments
//! used for truncation-bias corrections.
//!
//! Built-ins:
//!
//! - `Multistable(α)`: ν(s,t) = α(t) s^{-α(t)-1}/Γ(1-α(t)), f(λ,t) = λ^{α(t)}
//! - `GammaLike(α)`: ν(s,t) = s⁻¹ e^{-α(t)s}, f(λ,t) = log(1 + λ/α(t))
//! - `TemperedStable(α,θ)`: ν(s,t) = α(t) s^{-α(t)-1} e^{-θ(t)s}/Γ(1-α(t)),
//!   f(λ,t) = (λ+θ(t))^{α(t)} − θ(t)^{α(t)}
//! - `DriftOnly(b′)`: ν ≡ 0, f(λ,t) = λ b′(t)
//! - `Custom`: tabulated or closure-backed density, tail by quadrature when
//!   no closed tail is supplied

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::index::TimeVaryingIndex;
use crate::math;
use crate::quad;

/// Default absolute tolerance for f(λ,t) quadrature.
pub const TOL_F: f64 = 1e-10;
/// Default absolute tolerance for Π(λ,t) quadrature.
pub const TOL_PI: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activity {
    Finite,
    Infinite,
}

/// A nonnegative quantity that may diverge; used where Prop-4.2-style
/// case analysis needs divergence to be an explicit outcome rather than
/// a floating-point overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Divergent,
}

impl ExtReal {
    pub fn is_divergent(&self) -> bool {
        matches!(self, ExtReal::Divergent)
    }
    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::Divergent => None,
        }
    }
}

pub type Density = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Tail = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Bernstein = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum FamilyKind {
    Multistable { alpha: TimeVaryingIndex },
    GammaLike { alpha: TimeVaryingIndex },
    TemperedStable { alpha: TimeVaryingIndex, theta: TimeVaryingIndex },
    DriftOnly { rate: TimeVaryingIndex },
    Custom {
        drift: Option<TimeVaryingIndex>,
        density: Density,
        tail: Option<Tail>,
        bernstein: Option<Bernstein>,
        activity: Activity,
        /// power p such that ν(s,t) ~ C s^{-1-p} near 0, when known;
        /// drives the singularity-removing substitution in quadratures
        sing_exponent: Option<f64>,
    },
}

#[derive(Clone)]
pub struct LevyFamily {
    kind: FamilyKind,
    horizon: f64,
    name: String,
}

impl LevyFamily {
    /// f(λ,t) = λ^{α(t)}; validates 0 < α < 1 on the horizon probe grid.
    pub fn multistable(alpha: TimeVaryingIndex, horizon: f64) -> Result<Self> {
        alpha.validate_stability_index(horizon)?;
        Ok(LevyFamily {
            kind: FamilyKind::Multistable { alpha },
            horizon,
            name: String::from("multistable"),
        })
    }

    /// f(λ,t) = log(1 + λ/α(t)); requires α(t) > 0 on the horizon.
    pub fn gamma_like(alpha: TimeVaryingIndex, horizon: f64) -> Result<Self> {
        alpha.validate_range(horizon, 0.0, f64::INFINITY)?;
        Ok(LevyFamily {
            kind: FamilyKind::GammaLike { alpha },
            horizon,
            name: String::from("gammalike"),
        })
    }

    /// f(λ,t) = (λ+θ(t))^{α(t)} − θ(t)^{α(t)}.
    pub fn tempered_stable(
        alpha: TimeVaryingIndex,
        theta: TimeVaryingIndex,
        horizon: f64,
    ) -> Result<Self> {
        alpha.validate_stability_index(horizon)?;
        theta.validate_range(horizon, 0.0, f64::INFINITY)?;
        Ok(LevyFamily {
            kind: FamilyKind::TemperedStable { alpha, theta },
            horizon,
            name: String::from("tempered"),
        })
    }

    /// Pure drift: ν ≡ 0, f(λ,t) = λ b′(t), b′ ≥ 0.
    pub fn drift_only(rate: TimeVaryingIndex, horizon: f64) -> Result<Self> {
        rate.validate_range(horizon, -f64::MIN_POSITIVE, f64::INFINITY)?;
        Ok(LevyFamily {
            kind: FamilyKind::DriftOnly { rate },
            horizon,
            name: String::from("driftonly"),
        })
    }

    pub fn custom(
        drift: Option<TimeVaryingIndex>,
        density: Density,
        tail: Option<Tail>,
        bernstein: Option<Bernstein>,
        activity: Activity,
        sing_exponent: Option<f64>,
        horizon: f64,
    ) -> Self {
        LevyFamily {
            kind: FamilyKind::Custom { drift, density, tail, bernstein, activity, sing_exponent },
            horizon,
            name: String::from("custom"),
        }
    }

    /// Custom family backed by a tabulated (s, t, ν) grid with bilinear
    /// interpolation (zero outside the s-range, constant in t outside).
    pub fn from_table(
        s_grid: Vec<f64>,
        t_grid: Vec<f64>,
        values: Vec<f64>,
        drift: Option<TimeVaryingIndex>,
        horizon: f64,
    ) -> Result<Self> {
        if s_grid.len() < 2 || t_grid.len() < 2 {
            return Err(Error::Domain("tabulated density needs at least a 2x2 grid"));
        }
        if values.len() != s_grid.len() * t_grid.len() {
            return Err(Error::DimensionMismatch {
                expected: s_grid.len() * t_grid.len(),
                got: values.len(),
            });
        }
        if s_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("tabulated grids must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("tabulated density values must be finite and >= 0"));
        }
        let table = Arc::new(DensityTable { s_grid, t_grid, values });
        let density: Density = {
            let table = table.clone();
            Arc::new(move |s, t| table.eval(s, t))
        };
        Ok(LevyFamily {
            kind: FamilyKind::Custom {
                drift,
                density,
                tail: None,
                bernstein: None,
                activity: Activity::Finite,
                sing_exponent: None,
            },
            horizon,
            name: String::from("custom-table"),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn check_horizon(&self, t: f64) -> Result<()> {
        if t < 0.0 || t > self.horizon {
            Err(Error::Horizon { t, horizon: self.horizon })
        } else {
            Ok(())
        }
    }

    pub fn activity(&self) -> Activity {
        match &self.kind {
            FamilyKind::Multistable { .. }
            | FamilyKind::GammaLike { .. }
            | FamilyKind::TemperedStable { .. } => Activity::Infinite,
            FamilyKind::DriftOnly { .. } => Activity::Finite,
            FamilyKind::Custom { activity, .. } => *activity,
        }
    }

    pub fn has_closed_bernstein(&self) -> bool {
        match &self.kind {
            FamilyKind::Custom { bernstein, .. } => bernstein.is_some(),
            _ => true,
        }
    }

    /// True when ν(ds, t) does not depend on t (lets the PDE cache kernels).
    pub fn is_time_invariant(&self) -> bool {
        match &self.kind {
            FamilyKind::Multistable { alpha } | FamilyKind::GammaLike { alpha } => {
                alpha.is_constant()
            }
            FamilyKind::TemperedStable { alpha, theta } => {
                alpha.is_constant() && theta.is_constant()
            }
            FamilyKind::DriftOnly { .. } => true,
            FamilyKind::Custom { .. } => false,
        }
    }

    /// ν(s,t) ~ C s^{-1-p}: the exponent p used for singularity removal.
    pub fn sing_exponent(&self, t: f64) -> Option<f64> {
        match &self.kind {
            FamilyKind::Multistable { alpha } => Some(alpha.eval(t)),
            FamilyKind::TemperedStable { alpha, .. } => Some(alpha.eval(t)),
            FamilyKind::GammaLike { .. } => Some(0.0),
            FamilyKind::DriftOnly { .. } => None,
            FamilyKind::Custom { sing_exponent, .. } => *sing_exponent,
        }
    }

    // ----- drift -----

    pub fn drift_rate(&self, t: f64) -> f64 {
        match &self.kind {
            FamilyKind::DriftOnly { rate } => rate.eval(t),
            FamilyKind::Custom { drift: Some(d), .. } => d.eval(t),
            _ => 0.0,
        }
    }

    /// b(t) = ∫₀ᵗ b′(s) ds.
    pub fn cum_drift(&self, t: f64) -> f64 {
        let rate = match &self.kind {
            FamilyKind::DriftOnly { rate } => rate,
            FamilyKind::Custom { drift: Some(d), .. } => d,
            _ => return 0.0,
        };
        if rate.is_constant() {
            return rate.eval(0.0) * t;
        }
        quad::integrate(|s| rate.eval(s), 0.0, t, 1e-12)
            .map(|r| r.value)
            .unwrap_or_else(|_| rate.eval(0.0) * t)
    }

    pub fn max_drift_rate(&self, horizon: f64) -> f64 {
        match &self.kind {
            FamilyKind::DriftOnly { rate } => rate.max_on(0.0, horizon, 256),
            FamilyKind::Custom { drift: Some(d), .. } => d.max_on(0.0, horizon, 256),
            _ => 0.0,
        }
    }

    // ----- density and tail -----

    pub fn jump_density(&self, s: f64, t: f64) -> f64 {
        debug_assert!(s > 0.0);
        match &self.kind {
            FamilyKind::Multistable { alpha } => {
                let a = alpha.eval(t);
                a * math::pow(s, -a - 1.0) / math::gamma(1.0 - a)
            }
            FamilyKind::GammaLike { alpha } => math::exp(-alpha.eval(t) * s) / s,
            FamilyKind::TemperedStable { alpha, theta } => {
                let a = alpha.eval(t);
                a * math::pow(s, -a - 1.0) * math::exp(-theta.eval(t) * s) / math::gamma(1.0 - a)
            }
            FamilyKind::DriftOnly { .. } => 0.0,
            FamilyKind::Custom { density, .. } => density(s, t),
        }
    }

    /// ν̄(γ,t) = ν((γ,∞), t), γ > 0.
    pub fn tail(&self, gamma: f64, t: f64) -> Result<f64> {
        if gamma <= 0.0 {
            return Err(Error::Domain("tail requires gamma > 0"));
        }
        Ok(match &self.kind {
            FamilyKind::Multistable { alpha } => {
                let a = alpha.eval(t);
                math::pow(gamma, -a) / math::gamma(1.0 - a)
            }
            FamilyKind::GammaLike { alpha } => math::exp_int_e1(alpha.eval(t) * gamma),
            FamilyKind::TemperedStable { alpha, theta } => {
                let a = alpha.eval(t);
                let th = theta.eval(t);
                a * math::pow(th, a) * math::upper_incomplete_gamma(-a, th * gamma)
                    / math::gamma(1.0 - a)
            }
            FamilyKind::DriftOnly { .. } => 0.0,
            FamilyKind::Custom { tail: Some(tl), .. } => tl(gamma, t),
            FamilyKind::Custom { density, .. } => {
                integrate_density_tail(density.as_ref(), gamma, t, 1e-10)?
            }
        })
    }

    /// ∫_a^b ν̄(u,t) du — exact for the built-ins, quadrature for Custom.
    pub fn tail_cell_integral(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        debug_assert!(0.0 <= a && a < b);
        Ok(match &self.kind {
            FamilyKind::Multistable { alpha } => {
                let al = alpha.eval(t);
                (math::pow(b, 1.0 - al) - math::pow(a, 1.0 - al))
                    / ((1.0 - al) * math::gamma(1.0 - al))
            }
            FamilyKind::GammaLike { alpha } => {
                // ∫ E1(αu) du = u E1(αu) − e^{-αu}/α
                let al = alpha.eval(t);
                let prim = |u: f64| {
                    if u == 0.0 {
                        -1.0 / al
                    } else {
                        u * math::exp_int_e1(al * u) - math::exp(-al * u) / al
                    }
                };
                prim(b) - prim(a)
            }
            FamilyKind::TemperedStable { alpha, theta } => {
                // ∫ Γ(-α, θu) du = (1/θ)[v Γ(-α,v) − Γ(1-α,v)], v = θu
                let al = alpha.eval(t);
                let th = theta.eval(t);
                let prim = |u: f64| {
                    if u == 0.0 {
                        -math::gamma(1.0 - al) / th
                    } else {
                        let v = th * u;
                        (v * math::upper_incomplete_gamma(-al, v) - upper_gamma_1ma(al, v)) / th
                    }
                };
                al * math::pow(th, al) * (prim(b) - prim(a)) / math::gamma(1.0 - al)
            }
            FamilyKind::DriftOnly { .. } => 0.0,
            FamilyKind::Custom { .. } => {
                let f = |u: f64| self.tail(u, t).unwrap_or(0.0);
                if a == 0.0 {
                    if let Some(p) = self.sing_exponent(t).filter(|p| *p > 0.0) {
                        let g = move |u: f64| f(u) * math::pow(u, p);
                        quad::integrate_power_singular(g, b, p, 1e-9)?.value
                    } else {
                        quad::integrate(f, a, b, 1e-9)?.value
                    }
                } else {
                    quad::integrate(f, a, b, 1e-9)?.value
                }
            }
        })
    }

    /// ∫_a^b u ν̄(u,t) du — first kernel moment for the flux reconstruction.
    pub fn tail_first_moment_cell(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        debug_assert!(0.0 <= a && a < b);
        Ok(match &self.kind {
            FamilyKind::Multistable { alpha } => {
                let al = alpha.eval(t);
                (math::pow(b, 2.0 - al) - math::pow(a, 2.0 - al))
                    / ((2.0 - al) * math::gamma(1.0 - al))
            }
            FamilyKind::GammaLike { alpha } => {
                // ∫ u E1(αu) du = (u²/2) E1(αu) − (1/2)(u/α + 1/α²) e^{-αu}
                let al = alpha.eval(t);
                let prim = |u: f64| {
                    if u == 0.0 {
                        -0.5 / (al * al)
                    } else {
                        0.5 * u * u * math::exp_int_e1(al * u)
                            - 0.5 * (u / al + 1.0 / (al * al)) * math::exp(-al * u)
                    }
                };
                prim(b) - prim(a)
            }
            FamilyKind::TemperedStable { alpha, theta } => {
                // ∫ v Γ(-α,v) dv = (v²/2) Γ(-α,v) − (1/2) Γ(2-α,v)
                let al = alpha.eval(t);
                let th = theta.eval(t);
                let prim = |u: f64| {
                    if u == 0.0 {
                        -0.5 * upper_gamma_2ma(al, 0.0)
                    } else {
                        let v = th * u;
                        0.5 * v * v * math::upper_incomplete_gamma(-al, v)
                            - 0.5 * upper_gamma_2ma(al, v)
                    }
                };
                al * math::pow(th, al) * (prim(b) - prim(a)) / (th * th * math::gamma(1.0 - al))
            }
            FamilyKind::DriftOnly { .. } => 0.0,
            FamilyKind::Custom { .. } => {
                let f = |u: f64| u * self.tail(u, t).unwrap_or(0.0);
                quad::integrate(f, a, b, 1e-9)?.value
            }
        })
    }

    /// ∂ν̄/∂t (u,t): analytic for built-ins via the index derivatives.
    pub fn tail_dt(&self, u: f64, t: f64) -> Result<f64> {
        debug_assert!(u > 0.0);
        Ok(match &self.kind {
            FamilyKind::Multistable { alpha } => {
                let a = alpha.eval(t);
                let da = alpha.derivative(t);
                let nb = math::pow(u, -a) / math::gamma(1.0 - a);
                da * nb * (-math::ln(u) + math::digamma(1.0 - a))
            }
            FamilyKind::GammaLike { alpha } => {
                let a = alpha.eval(t);
                let da = alpha.derivative(t);
                // d/da E1(a u) = -e^{-a u}/a
                -da * math::exp(-a * u) / a
            }
            FamilyKind::TemperedStable { .. } | FamilyKind::Custom { .. } => {
                // central difference fallback
                let h = 1e-5 * (1.0 + math::abs(t));
                let tm = (t - h).max(0.0);
                (self.tail(u, t + h)? - self.tail(u, tm)?) / (t + h - tm)
            }
            FamilyKind::DriftOnly { .. } => 0.0,
        })
    }

    /// ∫_a^b ∂ν̄/∂t (u,t) du — cell integrals for the B_{t,x} operator;
    /// exact for the multistable family.
    pub fn tail_dt_cell_integral(&self, a: f64, b: f64, t: f64) -> Result<f64> {
        debug_assert!(0.0 <= a && a < b);
        match &self.kind {
            FamilyKind::Multistable { alpha } => {
                let al = alpha.eval(t);
                let da = alpha.derivative(t);
                // ∂/∂α [ u^{1-α} / ((1-α)Γ(1-α)) ] =
                //   u^{1-α}/((1-α)Γ(1-α)) · ( -ln u + 1/(1-α) + ψ(1-α) )
                let extra = 1.0 / (1.0 - al) + math::digamma(1.0 - al);
                let prim = |u: f64| {
                    if u == 0.0 {
                        0.0
                    } else {
                        math::pow(u, 1.0 - al) / ((1.0 - al) * math::gamma(1.0 - al))
                            * (-math::ln(u) + extra)
                    }
                };
                Ok(da * (prim(b) - prim(a)))
            }
            _ => {
                let f = |u: f64| self.tail_dt(u, t).unwrap_or(0.0);
                if a == 0.0 {
                    // integrable singularity no worse than u^{-α} ln u
                    let p = self.sing_exponent(t).unwrap_or(0.0).max(0.0);
                    if p > 0.0 {
                        let g = move |u: f64| f(u) * math::pow(u, p);
                        Ok(quad::integrate_power_singular(g, b, p, 1e-9)?.value)
                    } else {
                        Ok(quad::integrate(f, a, b, 1e-9)?.value)
                    }
                } else {
                    Ok(quad::integrate(f, a, b, 1e-9)?.value)
                }
            }
        }
    }

    // ----- Bernstein function and Laplace exponent -----

    /// f(λ,t): closed form for built-ins, otherwise
    /// b′(t)λ + ∫₀^∞ (1−e^{-λs}) ν(ds,t) by adaptive quadrature.
    pub fn eval_f(&self, lambda: f64, t: f64) -> Result<f64> {
        if lambda < 0.0 {
            return Err(Error::Domain("eval_f requires lambda >= 0"));
        }
        self.check_horizon(t)?;
        match &self.kind {
            FamilyKind::Multistable { alpha } => Ok(math::pow(lambda, alpha.eval(t))),
            FamilyKind::GammaLike { alpha } => Ok(math::ln_1p(lambda / alpha.eval(t))),
            FamilyKind::TemperedStable { alpha, theta } => {
                let a = alpha.eval(t);
                let th = theta.eval(t);
                Ok(math::pow(lambda + th, a) - math::pow(th, a))
            }
            FamilyKind::DriftOnly { rate } => Ok(lambda * rate.eval(t)),
            FamilyKind::Custom { bernstein: Some(f), .. } => Ok(f(lambda, t)),
            FamilyKind::Custom { .. } => self.eval_f_by_quadrature(lambda, t, TOL_F),
        }
    }

    /// The integral route b′(t)λ + ∫₀^∞(1−e^{-λs})ν(ds,t), regardless of
    /// whether a closed form exists; used for consistency checks.
    ///
    /// Integration by parts turns the jump integral into
    /// λ ∫₀^∞ e^{-λs} ν̄(s,t) ds, whose integrand decays exponentially, so a
    /// finite window with remainder bound ν̄(b,t)·e^{-λb} suffices even for
    /// power-law tails.
    pub fn eval_f_by_quadrature(&self, lambda: f64, t: f64, tol: f64) -> Result<f64> {
        if lambda == 0.0 {
            return Ok(0.0);
        }
        if matches!(self.kind, FamilyKind::DriftOnly { .. }) {
            return Ok(lambda * self.drift_rate(t));
        }
        let integrand = |s: f64| lambda * math::exp(-lambda * s) * self.tail(s, t).unwrap_or(0.0);
        let near = match self.sing_exponent(t) {
            Some(p) if p > 0.0 => {
                let g = move |s: f64| integrand(s) * math::pow(s, p);
                quad::integrate_power_singular(g, 1.0, p, tol / 2.0)?.value
            }
            _ => quad::integrate(integrand, 0.0, 1.0, tol / 2.0)?.value,
        };
        let far = quad::integrate_with_tail(integrand, 1.0, tol / 2.0, |b| {
            self.tail(b, t).unwrap_or(f64::INFINITY) * math::exp(-lambda * b)
        })?
        .value;
        Ok(lambda * self.drift_rate(t) + near + far)
    }

    /// Π(λ,t) = ∫₀ᵗ f(λ,s) ds.
    pub fn eval_pi(&self, lambda: f64, t: f64, tol: f64) -> Result<f64> {
        self.eval_pi_window(lambda, 0.0, t, tol)
    }

    /// ∫ₛᵗ f(λ,τ) dτ — the log-Laplace transform of the increment μ_{s,t}.
    pub fn eval_pi_window(&self, lambda: f64, s: f64, t: f64, tol: f64) -> Result<f64> {
        if lambda < 0.0 || tol <= 0.0 {
            return Err(Error::Domain("eval_pi requires lambda >= 0 and tol > 0"));
        }
        if lambda == 0.0 || s == t {
            return Ok(0.0);
        }
        let r = quad::integrate(|w| self.eval_f(lambda, w).unwrap_or(f64::NAN), s, t, tol)?;
        if !r.value.is_finite() {
            return Err(Error::Horizon { t, horizon: self.horizon });
        }
        Ok(r.value)
    }

    // ----- small-jump moments (truncation corrections) -----

    /// ∫₀^γ x ν(dx,t): the mean of the jumps removed by truncation at γ.
    pub fn small_jump_mean(&self, gamma: f64, t: f64) -> f64 {
        debug_assert!(gamma >= 0.0);
        if gamma == 0.0 {
            return 0.0;
        }
        match &self.kind {
            FamilyKind::Multistable { alpha } => {
                let a = alpha.eval(t);
                a * math::pow(gamma, 1.0 - a) / ((1.0 - a) * math::gamma(1.0 - a))
            }
            FamilyKind::GammaLike { alpha } => {
                let al = alpha.eval(t);
                -math::exp_m1(-al * gamma) / al
            }
            FamilyKind::TemperedStable { alpha, theta } => {
                let a = alpha.eval(t);
                let th = theta.eval(t);
                // α θ^{α-1} γ(1-α, θγ) / Γ(1-α)
                let lower = math::gamma(1.0 - a) - math::upper_incomplete_gamma(1.0 - a, th * gamma);
                a * math::pow(th, a - 1.0) * lower / math::gamma(1.0 - a)
            }
            FamilyKind::DriftOnly { .. } => 0.0,
            FamilyKind::Custom { .. } => {
                let g = |s: f64| s * self.jump_density(s, t);
                match self.sing_exponent(t) {
                    Some(p) if p > 0.0 => {
                        let gg = move |s: f64| g(s) * math::pow(s, p);
                        quad::integrate_power_singular(gg, gamma, p, 1e-12)
                            .map(|r| r.value)
                            .unwrap_or(0.0)
                    }
                    _ => quad::integrate(g, 0.0, gamma, 1e-12).map(|r| r.value).unwrap_or(0.0),
                }
            }
        }
    }

    /// ∫₀^γ x² ν(dx,t): variance of the removed small jumps.
    pub fn small_jump_square(&self, gamma: f64, t: f64) -> f64 {
        self.small_jump_power_moment(2.0, gamma, t)
    }

    /// ∫₀^γ x^p ν(dx,t) for p ≥ 1, by quadrature.
    pub fn small_jump_power_moment(&self, p: f64, gamma: f64, t: f64) -> f64 {
        debug_assert!(p >= 1.0);
        if gamma == 0.0 {
            return 0.0;
        }
        let g = |s: f64| math::pow(s, p) * self.jump_density(s, t);
        match self.sing_exponent(t) {
            Some(q) if q > 0.0 => {
                let gg = move |s: f64| g(s) * math::pow(s, q);
                quad::integrate_power_singular(gg, gamma, q, 1e-13)
                    .map(|r| r.value)
                    .unwrap_or(0.0)
            }
            _ => quad::integrate(g, 0.0, gamma, 1e-13).map(|r| r.value).unwrap_or(0.0),
        }
    }

    /// ∫₀^γ (1−e^{-λx}) ν(dx,t): the exact deficit of the γ-truncated
    /// Laplace exponent relative to f(λ,t) − b′(t)λ.
    pub fn truncation_deficit(&self, lambda: f64, gamma: f64, t: f64) -> f64 {
        if gamma == 0.0 || lambda == 0.0 {
            return 0.0;
        }
        if matches!(self.kind, FamilyKind::DriftOnly { .. }) {
            return 0.0;
        }
        let g = |s: f64| -(math::exp_m1(-lambda * s)) * self.jump_density(s, t);
        match self.sing_exponent(t) {
            Some(p) if p > 0.0 => {
                let gg = move |s: f64| g(s) * math::pow(s, p);
                quad::integrate_power_singular(gg, gamma, p, 1e-13)
                    .map(|r| r.value)
                    .unwrap_or(0.0)
            }
            _ => quad::integrate(g, 0.0, gamma, 1e-13).map(|r| r.value).unwrap_or(0.0),
        }
    }

    // ----- first moment of ν (MSD machinery) -----

    /// ∫₀^∞ w ν(dw,t), with divergence detected analytically for the
    /// built-ins and by growth probing for Custom.
    pub fn mean_jump_rate(&self, t: f64) -> ExtReal {
        match &self.kind {
            FamilyKind::Multistable { .. } => ExtReal::Divergent,
            FamilyKind::GammaLike { alpha } => ExtReal::Finite(1.0 / alpha.eval(t)),
            FamilyKind::TemperedStable { alpha, theta } => {
                let a = alpha.eval(t);
                let th = theta.eval(t);
                ExtReal::Finite(a * math::pow(th, a - 1.0))
            }
            FamilyKind::DriftOnly { .. } => ExtReal::Finite(0.0),
            FamilyKind::Custom { .. } => {
                let head = self.small_jump_mean(1.0, t);
                // partial integrals over doubling windows; divergence when the
                // window contributions stop decaying
                let mut total = head;
                let mut a = 1.0;
                let mut prev_window = f64::INFINITY;
                for _ in 0..64 {
                    let b = a * 2.0;
                    let w = quad::integrate(|s| s * self.jump_density(s, t), a, b, 1e-10)
                        .map(|r| r.value)
                        .unwrap_or(f64::INFINITY);
                    total += w;
                    if !total.is_finite() || total > 1e12 {
                        return ExtReal::Divergent;
                    }
                    if w < 1e-12 * (1.0 + total) {
                        return ExtReal::Finite(total);
                    }
                    if w >= prev_window && a > 64.0 {
                        return ExtReal::Divergent;
                    }
                    prev_window = w;
                    a = b;
                }
                ExtReal::Divergent
            }
        }
    }

    // ----- structural checks -----

    /// A2 integrability at probe times: ∫₀¹ s ν(s,t) ds + ν̄(1,t) < ∞.
    pub fn check_a2(&self, probes: usize) -> Result<()> {
        for k in 0..=probes {
            let t = self.horizon * k as f64 / probes.max(1) as f64;
            let head = self.small_jump_mean(1.0, t);
            let tail = self.tail(1.0, t)?;
            if !head.is_finite() || !tail.is_finite() {
                return Err(Error::Domain("A2 integrability check failed"));
            }
        }
        Ok(())
    }
}

fn upper_gamma_1ma(alpha: f64, v: f64) -> f64 {
    if v == 0.0 {
        math::gamma(1.0 - alpha)
    } else {
        math::upper_incomplete_gamma(1.0 - alpha, v)
    }
}

/// Γ(2-α, v) via the recurrence Γ(s+1,x) = sΓ(s,x) + x^s e^{-x}.
fn upper_gamma_2ma(alpha: f64, v: f64) -> f64 {
    if v == 0.0 {
        math::gamma(2.0 - alpha)
    } else {
        (1.0 - alpha) * upper_gamma_1ma(alpha, v) + math::pow(v, 1.0 - alpha) * math::exp(-v)
    }
}

/// ∫_γ^∞ ν(s,t) ds by doubling windows; the far-field cutoff is accepted when
/// a window contributes less than tol/10 and the contributions are decaying.
fn integrate_density_tail(
    density: &(dyn Fn(f64, f64) -> f64 + Send + Sync),
    gamma: f64,
    t: f64,
    tol: f64,
) -> Result<f64> {
    let mut total = 0.0;
    let mut a = gamma;
    let mut width = gamma.max(1e-3);
    let mut prev = f64::INFINITY;
    for _ in 0..200 {
        let b = a + width;
        let w = quad::integrate(|s| density(s, t), a, b, tol / 10.0)?.value;
        total += w;
        if w < tol / 10.0 && w <= prev {
            return Ok(total);
        }
        prev = w;
        a = b;
        width *= 2.0;
    }
    Err(Error::NoTailBound)
}

struct DensityTable {
    s_grid: Vec<f64>,
    t_grid: Vec<f64>,
    values: Vec<f64>,
}

impl DensityTable {
    /// Bilinear interpolation; zero outside the s-range, clamped in t.
    fn eval(&self, s: f64, t: f64) -> f64 {
        let ns = self.s_grid.len();
        if s < self.s_grid[0] || s > self.s_grid[ns - 1] {
            return 0.0;
        }
        let t = t.clamp(self.t_grid[0], self.t_grid[self.t_grid.len() - 1]);
        let i = self.s_grid.partition_point(|v| *v <= s).clamp(1, ns - 1) - 1;
        let j = self.t_grid.partition_point(|v| *v <= t).clamp(1, self.t_grid.len() - 1) - 1;
        let (s0, s1) = (self.s_grid[i], self.s_grid[i + 1]);
        let (t0, t1) = (self.t_grid[j], self.t_grid[j + 1]);
        let fx = (s - s0) / (s1 - s0);
        let ft = (t - t0) / (t1 - t0);
        let v = |ii: usize, jj: usize| self.values[ii * self.t_grid.len() + jj];
        (1.0 - fx) * (1.0 - ft) * v(i, j)
            + fx * (1.0 - ft) * v(i + 1, j)
            + (1.0 - fx) * ft * v(i, j + 1)
            + fx * ft * v(i + 1, j + 1)
    }
}

// ----- Bernstein sign-pattern check -----

#[derive(Debug, Clone)]
pub struct BernsteinViolation {
    pub lambda: f64,
    pub order: usize,
    pub signed_value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Default)]
pub struct BernsteinReport {
    pub violations: Vec<BernsteinViolation>,
    pub checked: usize,
}

impl BernsteinReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Central finite-difference stencils, order-h² accurate.
fn stencil(n: usize) -> (&'static [f64], isize) {
    match n {
        1 => (&[-0.5, 0.0, 0.5], 1),
        2 => (&[1.0, -2.0, 1.0], 1),
        3 => (&[-0.5, 1.0, 0.0, -1.0, 0.5], 2),
        4 => (&[1.0, -4.0, 6.0, -4.0, 1.0], 2),
        5 => (&[-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5], 3),
        _ => unreachable!("max_order <= 5"),
    }
}

/// Checks the Bernstein sign pattern (−1)^{n−1} f^{(n)}(λ,t) ≥ −ε_fd for
/// n = 1..max_order on the given λ grid via central finite differences.
/// ε_fd combines a Richardson error estimate with the roundoff bound.
pub fn check_bernstein(
    family: &LevyFamily,
    t: f64,
    lambda_grid: &[f64],
    max_order: usize,
) -> Result<BernsteinReport> {
    if !(2..=5).contains(&max_order) {
        return Err(Error::Domain("max_order must be in 2..=5"));
    }
    if lambda_grid.is_empty()
        || lambda_grid[0] <= 0.0
        || lambda_grid.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::Domain("lambda grid must be strictly positive and increasing"));
    }
    let mut report = BernsteinReport::default();
    for &lam in lambda_grid {
        for n in 1..=max_order {
            let (coeffs, reach) = stencil(n);
            let h = 0.08 * lam;
            let eval = |hh: f64| -> Result<(f64, f64)> {
                let mut acc = 0.0;
                let mut fmax: f64 = 0.0;
                for (i, c) in coeffs.iter().enumerate() {
                    let k = i as isize - reach;
                    let v = family.eval_f(lam + k as f64 * hh, t)?;
                    fmax = fmax.max(math::abs(v));
                    acc += c * v;
                }
                Ok((acc / math::pow(hh, n as f64), fmax))
            };
            let (d_h, fmax) = eval(h)?;
            let (d_h2, _) = eval(h / 2.0)?;
            let richardson = math::abs(d_h2 - d_h) / 3.0;
            let csum: f64 = coeffs.iter().map(|c| math::abs(*c)).sum();
            let roundoff = csum * f64::EPSILON * fmax / math::pow(h / 2.0, n as f64);
            let bound = 4.0 * richardson + 2.0 * roundoff + 1e-14;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let signed = sign * d_h2;
            report.checked += 1;
            if signed < -bound {
                report.violations.push(BernsteinViolation {
                    lambda: lam,
                    order: n,
                    signed_value: signed,
                    bound,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) {
        assert!(math::abs(a - b) <= tol * (1.0 + math::abs(b)), "{a} vs {b}");
    }

    fn ms(alpha: f64) -> LevyFamily {
        LevyFamily::multistable(TimeVaryingIndex::constant(alpha), 4.0).unwrap()
    }

    #[test]
    fn eval_f_closed_forms() {
        let f = ms(0.5);
        close(f.eval_f(1.0, 0.3).unwrap(), 1.0, 1e-15);
        close(f.eval_f(4.0, 1.7).unwrap(), 2.0, 1e-15);

        let g =
            LevyFamily::gamma_like(TimeVaryingIndex::constant(1.0), 4.0).unwrap();
        close(g.eval_f(core::f64::consts::E - 1.0, 0.0).unwrap(), 1.0, 1e-15);

        let d = LevyFamily::drift_only(TimeVaryingIndex::constant(2.0), 4.0).unwrap();
        close(d.eval_f(3.0, 1.0).unwrap(), 6.0, 1e-15);
    }

    #[test]
    fn eval_f_rejects_bad_args() {
        let f = ms(0.5);
        assert!(f.eval_f(-1.0, 0.0).is_err());
        assert!(matches!(f.eval_f(1.0, 100.0), Err(Error::Horizon { .. })));
    }

    #[test]
    fn tails() {
        // multistable: γ^{-α}/Γ(1-α); at α=0.5, γ=1: 1/√π
        close(ms(0.5).tail(1.0, 0.0).unwrap(), 0.5641895835477563, 1e-14);
        // gamma-like α=1, γ=1: E1(1)
        let g = LevyFamily::gamma_like(TimeVaryingIndex::constant(1.0), 4.0).unwrap();
        close(g.tail(1.0, 0.0).unwrap(), 0.21938393439552028, 1e-13);
        // drift only: zero
        let d = LevyFamily::drift_only(TimeVaryingIndex::constant(1.0), 4.0).unwrap();
        assert_eq!(d.tail(2.0, 1.0).unwrap(), 0.0);
        assert!(d.tail(-1.0, 0.0).is_err());
    }

    #[test]
    fn tail_monotone_in_gamma() {
        let fams = [
            ms(0.3),
            ms(0.8),
            LevyFamily::gamma_like(TimeVaryingIndex::constant(2.0), 4.0).unwrap(),
            LevyFamily::tempered_stable(
                TimeVaryingIndex::constant(0.5),
                TimeVaryingIndex::constant(1.0),
                4.0,
            )
            .unwrap(),
        ];
        for f in &fams {
            for t in [0.0, 1.0, 3.0] {
                let mut prev = f64::INFINITY;
                for k in 1..40 {
                    let gamma = 0.05 * k as f64;
                    let v = f.tail(gamma, t).unwrap();
                    assert!(v <= prev + 1e-12, "tail not nonincreasing");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn tail_density_consistency() {
        // ν̄(γ) − ν̄(γ') = ∫_γ^{γ'} ν(s)ds
        let fams = [
            ms(0.6),
            LevyFamily::gamma_like(TimeVaryingIndex::constant(1.5), 4.0).unwrap(),
            LevyFamily::tempered_stable(
                TimeVaryingIndex::constant(0.4),
                TimeVaryingIndex::constant(2.0),
                4.0,
            )
            .unwrap(),
        ];
        for f in &fams {
            let (a, b, t) = (0.3, 1.7, 0.5);
            let lhs = f.tail(a, t).unwrap() - f.tail(b, t).unwrap();
            let rhs = quad::integrate(|s| f.jump_density(s, t), a, b, 1e-12).unwrap().value;
            close(lhs, rhs, 1e-10);
        }
    }

    #[test]
    fn closed_vs_quadrature_consistency() {
        // |closed − integral route| within 10·tol on a 5×5 probe grid
        let fams = [
            ms(0.5),
            LevyFamily::multistable(
                TimeVaryingIndex::sinusoidal(0.6, 0.2, 1.0, 0.0),
                4.0,
            )
            .unwrap(),
            LevyFamily::gamma_like(TimeVaryingIndex::constant(1.0), 4.0).unwrap(),
            LevyFamily::tempered_stable(
                TimeVaryingIndex::constant(0.5),
                TimeVaryingIndex::constant(1.0),
                4.0,
            )
            .unwrap(),
        ];
        for f in &fams {
            for i in 1..=5 {
                for j in 0..5 {
                    let lam = 0.8 * i as f64;
                    let t = j as f64;
                    let closed = f.eval_f(lam, t).unwrap();
                    let quad_route = f.eval_f_by_quadrature(lam, t, TOL_F).unwrap();
                    assert!(
                        math::abs(closed - quad_route) <= 10.0 * TOL_F * (1.0 + math::abs(closed)),
                        "{} at λ={lam}, t={t}: {closed} vs {quad_route}",
                        f.name()
                    );
                }
            }
        }
    }

    #[test]
    fn pi_values() {
        // constant α: Π(λ,t) = t λ^α
        let f = ms(0.5);
        close(f.eval_pi(4.0, 3.0, 1e-10).unwrap(), 6.0, 1e-9);
        close(f.eval_pi(0.0, 3.0, 1e-10).unwrap(), 0.0, 1e-15);

        // α(s) = s on [0,1]: Π(e, 1) = ∫₀¹ e^s ds = e − 1
        let aff = LevyFamily::multistable(
            TimeVaryingIndex::affine_clamped(0.0, 1.0, 1e-9, 1.0 - 1e-9),
            1.0,
        )
        .unwrap();
        close(aff.eval_pi(core::f64::consts::E, 1.0, 1e-10).unwrap(), 1.718281828459045, 1e-7);
    }

    #[test]
    fn pi_monotone_in_t_concave_in_lambda() {
        let f = LevyFamily::multistable(TimeVaryingIndex::sinusoidal(0.6, 0.2, 1.0, 0.0), 4.0)
            .unwrap();
        let mut prev = 0.0;
        for k in 1..=8 {
            let t = 0.5 * k as f64;
            let v = f.eval_pi(2.0, t, 1e-10).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // concavity in λ by second difference
        let t = 1.0;
        let h = 0.05;
        for k in 1..=10 {
            let lam = 0.3 * k as f64;
            let a = f.eval_pi(lam - h, t, 1e-11).unwrap();
            let b = f.eval_pi(lam, t, 1e-11).unwrap();
            let c = f.eval_pi(lam + h, t, 1e-11).unwrap();
            assert!((a - 2.0 * b + c) / (h * h) <= 1e-6);
        }
    }

    #[test]
    fn mean_jump_rates() {
        assert!(ms(0.7).mean_jump_rate(0.0).is_divergent());
        let g = LevyFamily::gamma_like(TimeVaryingIndex::constant(2.0), 4.0).unwrap();
        close(g.mean_jump_rate(1.0).finite().unwrap(), 0.5, 1e-14);
        let ts = LevyFamily::tempered_stable(
            TimeVaryingIndex::constant(0.5),
            TimeVaryingIndex::constant(1.0),
            4.0,
        )
        .unwrap();
        close(ts.mean_jump_rate(0.0).finite().unwrap(), 0.5, 1e-14);
    }

    #[test]
    fn custom_mean_jump_rate_probing() {
        // density e^{-s}: mean = 1 (finite), detected numerically
        let fam = LevyFamily::custom(
            None,
            Arc::new(|s: f64, _t: f64| math::exp(-s)),
            None,
            None,
            Activity::Finite,
            None,
            4.0,
        );
        match fam.mean_jump_rate(0.0) {
            ExtReal::Finite(v) => close(v, 1.0, 1e-6),
            ExtReal::Divergent => panic!("expected finite"),
        }
        // density s^{-1.5}/Γ(0.5) without closed forms: divergent first moment
        let div = LevyFamily::custom(
            None,
            Arc::new(|s: f64, _t: f64| 0.5 * math::pow(s, -1.5) / math::gamma(0.5)),
            None,
            None,
            Activity::Infinite,
            Some(0.5),
            4.0,
        );
        assert!(div.mean_jump_rate(0.0).is_divergent());
    }

    #[test]
    fn small_jump_moments() {
        let f = ms(0.5);
        // closed form vs quadrature
        let gamma = 1e-3;
        let want = quad::integrate_power_singular(
            |s| s * f.jump_density(s, 0.0) * math::pow(s, 0.5),
            gamma,
            0.5,
            1e-14,
        )
        .unwrap()
        .value;
        close(f.small_jump_mean(gamma, 0.0), want, 1e-10);

        let g = LevyFamily::gamma_like(TimeVaryingIndex::constant(2.0), 4.0).unwrap();
        close(g.small_jump_mean(0.5, 0.0), (1.0 - math::exp(-1.0)) / 2.0, 1e-13);

        let ts = LevyFamily::tempered_stable(
            TimeVaryingIndex::constant(0.5),
            TimeVaryingIndex::constant(1.0),
            4.0,
        )
        .unwrap();
        let want_ts = quad::integrate_power_singular(
            |s| s * ts.jump_density(s, 0.0) * math::pow(s, 0.5),
            0.7,
            0.5,
            1e-14,
        )
        .unwrap()
        .value;
        close(ts.small_jump_mean(0.7, 0.0), want_ts, 1e-10);
    }

    #[test]
    fn cell_integrals_match_quadrature() {
        let fams = [
            ms(0.5),
            LevyFamily::gamma_like(TimeVaryingIndex::constant(1.3), 4.0).unwrap(),
            LevyFamily::tempered_stable(
                TimeVaryingIndex::constant(0.6),
                TimeVaryingIndex::constant(0.8),
                4.0,
            )
            .unwrap(),
        ];
        for f in &fams {
            for (a, b) in [(0.1, 0.3), (1.0, 1.5), (2.0, 4.0)] {
                let got = f.tail_cell_integral(a, b, 0.7).unwrap();
                let want = quad::integrate(|u| f.tail(u, 0.7).unwrap(), a, b, 1e-12)
                    .unwrap()
                    .value;
                close(got, want, 1e-9);

                let got1 = f.tail_first_moment_cell(a, b, 0.7).unwrap();
                let want1 = quad::integrate(|u| u * f.tail(u, 0.7).unwrap(), a, b, 1e-12)
                    .unwrap()
                    .value;
                close(got1, want1, 1e-9);
            }
        }
    }

    #[test]
    fn singular_cell_integrals_match_closed_form() {
        // multistable first cell: ∫₀^Δ u^{-α} du/Γ(1-α) = Δ^{1-α}/((1-α)Γ(1-α))
        let f = ms(0.5);
        let dx = 0.01;
        let got = f.tail_cell_integral(0.0, dx, 0.0).unwrap();
        close(got / dx, 11.283791670955127, 1e-12);
    }

    #[test]
    fn tail_dt_cell_integral_multistable() {
        let f = LevyFamily::multistable(TimeVaryingIndex::sinusoidal(0.6, 0.2, 1.0, 0.0), 4.0)
            .unwrap();
        let (a, b, t) = (0.2, 0.9, 1.1);
        let got = f.tail_dt_cell_integral(a, b, t).unwrap();
        let want = quad::integrate(|u| f.tail_dt(u, t).unwrap(), a, b, 1e-12).unwrap().value;
        close(got, want, 1e-9);
        // and tail_dt itself against a central difference of the tail
        let u = 0.4;
        let h = 1e-6;
        let fd = (f.tail(u, t + h).unwrap() - f.tail(u, t - h).unwrap()) / (2.0 * h);
        close(f.tail_dt(u, t).unwrap(), fd, 1e-6);
    }

    #[test]
    fn bernstein_check_clean_families() {
        let grid = [0.5, 1.0, 2.0, 4.0];
        let rep = check_bernstein(&ms(0.5), 0.0, &grid, 3).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.violations);

        let d = LevyFamily::drift_only(TimeVaryingIndex::constant(1.0), 4.0).unwrap();
        let rep = check_bernstein(&d, 0.0, &grid, 5).unwrap();
        assert!(rep.is_clean(), "{:?}", rep.violations);
    }

    #[test]
    fn bernstein_check_flags_square() {
        // fixture: f(λ) = λ², not a Bernstein function; violation at n = 2
        let fam = LevyFamily::custom(
            None,
            Arc::new(|_s: f64, _t: f64| 0.0),
            Some(Arc::new(|_g: f64, _t: f64| 0.0)),
            Some(Arc::new(|lam: f64, _t: f64| lam * lam)),
            Activity::Finite,
            None,
            4.0,
        );
        let rep = check_bernstein(&fam, 0.0, &[0.5, 1.0, 2.0], 3).unwrap();
        assert!(rep.violations.iter().any(|v| v.order == 2));
    }

    #[test]
    fn bernstein_check_rejects_bad_grid() {
        assert!(check_bernstein(&ms(0.5), 0.0, &[1.0, 0.5], 3).is_err());
        assert!(check_bernstein(&ms(0.5), 0.0, &[0.5, 1.0], 7).is_err());
    }

    #[test]
    fn a2_holds_for_builtins() {
        for f in [
            ms(0.2),
            ms(0.9),
            LevyFamily::gamma_like(TimeVaryingIndex::constant(0.5), 4.0).unwrap(),
            LevyFamily::tempered_stable(
                TimeVaryingIndex::sinusoidal(0.6, 0.2, 1.0, 0.0),
                TimeVaryingIndex::constant(1.0),
                4.0,
            )
            .unwrap(),
        ] {
            f.check_a2(16).unwrap();
        }
    }

    #[test]
    fn tabulated_family_bilinear() {
        let fam = LevyFamily::from_table(
            vec![0.5, 1.0, 2.0],
            vec![0.0, 1.0],
            vec![4.0, 4.0, 2.0, 2.0, 1.0, 1.0],
            None,
            1.0,
        )
        .unwrap();
        close(fam.jump_density(0.75, 0.5), 3.0, 1e-14);
        assert_eq!(fam.jump_density(3.0, 0.5), 0.0);
        // tail by quadrature integrates the interpolant
        let tail = fam.tail(0.5, 0.0).unwrap();
        let want = quad::integrate(|s| fam.jump_density(s, 0.0), 0.5, 2.0, 1e-12).unwrap().value;
        close(tail, want, 1e-6);
    }

    #[test]
    fn truncation_deficit_bounded_by_linear_moment() {
        let f = ms(0.7);
        let (lam, gamma, t) = (2.0, 1e-4, 0.5);
        let deficit = f.truncation_deficit(lam, gamma, t);
        let bound = lam * f.small_jump_mean(gamma, t);
        assert!(deficit > 0.0 && deficit <= bound * (1.0 + 1e-9));
    }
}
