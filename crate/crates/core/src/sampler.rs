//! Trajectory simulation for non-homogeneous subordinators.
//!
//! Paths are built from the compound-Poisson approximation: jumps larger than
//! a truncation level γ arrive as a non-homogeneous Poisson process with
//! intensity g_γ(t) = ν̄(γ,t) (simulated by thinning against a
//! piecewise-constant majorant) and jump sizes follow
//! ψ_γ(dx,t) = ν(dx,t)·1_{(γ,∞)}(x)/ν̄(γ,t). The γ-truncated process has the
//! exact Laplace transform exp(−λb(t) − ∫₀ᵗ∫_γ^∞ (1−e^{−λx}) ν(dx,s) ds),
//! which the Monte Carlo estimators report alongside the untruncated target
//! and the analytic truncation bias λ∫∫₀^γ x ν(dx,s)ds.
//!
//! Estimators that must approximate the *untruncated* law can enable
//! small-jump mean compensation: the removed jumps below γ are replaced by
//! the deterministic drift ∫₀ᵗ ∫₀^γ x ν(dx,s) ds, which carries their mean
//! while their standard deviation is of smaller order.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, OpenClosed01, Poisson};

use crate::error::{Error, Result};
use crate::family::{FamilyKind, LevyFamily};
use crate::math;
use crate::quad;
use crate::rng::RngStream;
use crate::stable;

/// Sub-intervals used by the thinning majorant.
const MAJORANT_PIECES: usize = 64;
/// Intensity probes per sub-interval.
const MAJORANT_PROBES: usize = 16;
/// Safety factor on the probed maximum.
const MAJORANT_SAFETY: f64 = 1.01;

/// RNG stream domains, so estimators sharing a master seed stay independent.
pub mod domain {
    pub const PATH: u32 = 1;
    pub const LAPLACE: u32 = 2;
    pub const PIECEWISE: u32 = 3;
    pub const LOCALIZE: u32 = 4;
    pub const INVERSE: u32 = 5;
    pub const SUBBM: u32 = 6;
    pub const ORACLE: u32 = 7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compensation {
    /// Jumps below γ are dropped (the plain compound-Poisson approximation).
    Off,
    /// Their mean is added back as deterministic drift.
    MeanShift,
}

/// Cumulative deterministic part b(t) of a path (family drift plus any
/// small-jump compensation), stored as a piecewise-linear table so that
/// evaluation stays cheap inside first-passage searches.
#[derive(Debug, Clone)]
enum PathDrift {
    None,
    Linear(f64),
    Table { ts: Vec<f64>, vals: Vec<f64> },
}

impl PathDrift {
    fn eval(&self, t: f64) -> f64 {
        match self {
            PathDrift::None => 0.0,
            PathDrift::Linear(rate) => rate * t,
            PathDrift::Table { ts, vals } => {
                if t <= ts[0] {
                    return vals[0] * if ts[0] > 0.0 { t / ts[0] } else { 1.0 };
                }
                let last = ts.len() - 1;
                if t >= ts[last] {
                    return vals[last];
                }
                let k = ts.partition_point(|v| *v <= t) - 1;
                let w = (t - ts[k]) / (ts[k + 1] - ts[k]);
                vals[k] + w * (vals[k + 1] - vals[k])
            }
        }
    }
}

/// One realized trajectory: sorted jumps above the truncation level plus the
/// deterministic drift part.
#[derive(Debug, Clone)]
pub struct SubordinatorPath {
    jumps: Vec<(f64, f64)>,
    prefix: Vec<f64>,
    drift: PathDrift,
    horizon: f64,
    truncation: f64,
    family_id: String,
}

impl SubordinatorPath {
    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn family_id(&self) -> &str {
        &self.family_id
    }

    /// σ(t) = b(t) + Σ_{jump times ≤ t} size, by binary search on prefix sums.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if t < 0.0 || t > self.horizon {
            return Err(Error::Horizon { t, horizon: self.horizon });
        }
        let k = self.jumps.partition_point(|(tt, _)| *tt <= t);
        let jump_sum = if k == 0 { 0.0 } else { self.prefix[k - 1] };
        Ok(self.drift.eval(t) + jump_sum)
    }

    /// Final value σ(horizon).
    pub fn total(&self) -> f64 {
        self.drift.eval(self.horizon) + self.prefix.last().copied().unwrap_or(0.0)
    }

    /// Drift value b(t) at a valid time (used by the first-passage search).
    pub fn drift_at(&self, t: f64) -> f64 {
        self.drift.eval(t)
    }

    /// L(level) = inf{ x ≥ 0 : σ(x) > level }, exact for the stored
    /// step-plus-piecewise-linear-drift representation.
    pub fn first_passage(&self, level: f64) -> Result<f64> {
        if level < 0.0 {
            return Ok(0.0);
        }
        let reached = self.total();
        if reached <= level {
            return Err(Error::HorizonExhausted { level, reached });
        }
        // first jump index j with σ(t_j) (including the jump) above the level
        let mut lo = 0usize;
        let mut hi = self.jumps.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            let v = self.drift.eval(self.jumps[mid].0) + self.prefix[mid];
            if v > level {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let (seg_start, seg_end, base) = if lo == self.jumps.len() {
            // crossing happens after the last jump, by drift alone
            let base = self.prefix.last().copied().unwrap_or(0.0);
            (self.jumps.last().map(|j| j.0).unwrap_or(0.0), self.horizon, base)
        } else {
            let base = if lo == 0 { 0.0 } else { self.prefix[lo - 1] };
            let start = if lo == 0 { 0.0 } else { self.jumps[lo - 1].0 };
            (start, self.jumps[lo].0, base)
        };
        // inside the segment σ(s) = b(s) + base; does the drift cross first?
        if self.drift.eval(seg_end) + base > level {
            let target = level - base;
            let mut a = seg_start;
            let mut b = seg_end;
            if self.drift.eval(a) >= target {
                return Ok(a);
            }
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if self.drift.eval(mid) > target {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a <= f64::EPSILON * (1.0 + b) {
                    break;
                }
            }
            return Ok(0.5 * (a + b));
        }
        // otherwise the jump at seg_end carries σ over the level
        Ok(seg_end)
    }

    #[cfg(test)]
    pub(crate) fn raw_parts_for_tests(
        jumps: Vec<(f64, f64)>,
        drift_rate: f64,
        horizon: f64,
    ) -> SubordinatorPath {
        let mut prefix = Vec::with_capacity(jumps.len());
        let mut acc = 0.0;
        for (_, x) in &jumps {
            acc += x;
            prefix.push(acc);
        }
        SubordinatorPath {
            jumps,
            prefix,
            drift: if drift_rate == 0.0 { PathDrift::None } else { PathDrift::Linear(drift_rate) },
            horizon,
            truncation: 0.0,
            family_id: String::from("fixture"),
        }
    }
}

/// Event times of the thinned non-homogeneous Poisson process with intensity
/// ν̄(γ,·) on [a, b]. The majorant is piecewise constant over
/// `MAJORANT_PIECES` equal sub-intervals, each set to `MAJORANT_SAFETY` times
/// the maximum of the intensity probed on `MAJORANT_PROBES` points; any
/// accepted candidate whose true intensity exceeds its majorant aborts.
pub fn sample_nhpp_times_window(
    family: &LevyFamily,
    gamma: f64,
    a: f64,
    b: f64,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<f64>> {
    if gamma <= 0.0 {
        return Err(Error::Domain("truncation level must be positive"));
    }
    debug_assert!(a <= b);
    let mut times = Vec::new();
    let len = (b - a) / MAJORANT_PIECES as f64;
    if len == 0.0 {
        return Ok(times);
    }
    let mut local = Vec::new();
    for j in 0..MAJORANT_PIECES {
        let lo = a + j as f64 * len;
        let hi = lo + len;
        let mut m: f64 = 0.0;
        for k in 0..MAJORANT_PROBES {
            let t = lo + len * (k as f64 + 0.5) / MAJORANT_PROBES as f64;
            m = m.max(family.tail(gamma, t)?);
        }
        let majorant = MAJORANT_SAFETY * m;
        if !majorant.is_finite() {
            return Err(Error::UnboundedIntensity { sub_start: lo, sub_end: hi });
        }
        if majorant == 0.0 {
            continue;
        }
        let mean = majorant * len;
        let n = Poisson::new(mean).expect("positive mean").sample(rng) as u64;
        local.clear();
        for _ in 0..n {
            let t = lo + len * rng.sample::<f64, _>(OpenClosed01);
            let u: f64 = rng.random();
            let intensity = family.tail(gamma, t)?;
            if intensity > majorant {
                return Err(Error::MajorantExceeded { t, intensity, majorant });
            }
            if u * majorant < intensity {
                local.push(t);
            }
        }
        local.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
        times.extend_from_slice(&local);
    }
    times.dedup();
    Ok(times)
}

/// NHPP event times on [0, horizon].
pub fn sample_nhpp_times(
    family: &LevyFamily,
    gamma: f64,
    horizon: f64,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<f64>> {
    sample_nhpp_times_window(family, gamma, 0.0, horizon, rng)
}

/// One draw from ψ_γ(dx,t) = ν(dx,t)·1_{(γ,∞)}(x)/ν̄(γ,t).
///
/// Closed-form Pareto inverse for the multistable family; exact rejection
/// samplers for the tempered and gamma-like families; bracketed bisection on
/// u = 1 − ν̄(x,t)/ν̄(γ,t) for custom families.
pub fn sample_jump(
    family: &LevyFamily,
    gamma: f64,
    t: f64,
    rng: &mut ChaCha12Rng,
) -> Result<f64> {
    match family.kind() {
        FamilyKind::Multistable { alpha } => {
            let a = alpha.eval(t);
            let u: f64 = rng.sample(OpenClosed01);
            Ok(gamma * math::pow(u, -1.0 / a))
        }
        FamilyKind::TemperedStable { alpha, theta } => {
            let a = alpha.eval(t);
            let th = theta.eval(t);
            if th * gamma < 1.0 {
                // propose truncated Pareto, accept with e^{-θ(x-γ)}
                for _ in 0..100_000 {
                    let u: f64 = rng.sample(OpenClosed01);
                    let x = gamma * math::pow(u, -1.0 / a);
                    let acc: f64 = rng.random();
                    if math::ln(acc) < -th * (x - gamma) {
                        return Ok(x);
                    }
                }
            } else {
                // propose γ + Exp(θ), accept with (x/γ)^{-α-1}
                for _ in 0..100_000 {
                    let e: f64 = rng.sample(Exp1);
                    let x = gamma + e / th;
                    let acc: f64 = rng.random();
                    if math::ln(acc) < -(a + 1.0) * math::ln(x / gamma) {
                        return Ok(x);
                    }
                }
            }
            Err(Error::Inconclusive("tempered jump rejection sampler stalled"))
        }
        FamilyKind::GammaLike { alpha } => {
            let al = alpha.eval(t);
            // two-piece envelope: log-uniform on (γ, s1], shifted exponential
            // beyond s1 = max(γ, 1/α)
            let s1 = gamma.max(1.0 / al);
            let w1 = if s1 > gamma { math::exp(-al * gamma) * math::ln(s1 / gamma) } else { 0.0 };
            let w2 = math::exp(-al * s1) / (al * s1);
            for _ in 0..100_000 {
                let pick: f64 = rng.random();
                if pick * (w1 + w2) < w1 {
                    let u: f64 = rng.random();
                    let x = gamma * math::exp(u * math::ln(s1 / gamma));
                    let acc: f64 = rng.random();
                    if math::ln(acc) < -al * (x - gamma) {
                        return Ok(x);
                    }
                } else {
                    let e: f64 = rng.sample(Exp1);
                    let x = s1 + e / al;
                    let acc: f64 = rng.random();
                    if math::ln(acc) < math::ln(s1 / x) {
                        return Ok(x);
                    }
                }
            }
            Err(Error::Inconclusive("gamma-like jump rejection sampler stalled"))
        }
        FamilyKind::DriftOnly { .. } => Err(Error::Domain("drift-only family has no jumps")),
        FamilyKind::Custom { .. } => {
            let tail_g = family.tail(gamma, t)?;
            if tail_g <= 0.0 {
                return Err(Error::Domain("no jumps possible: tail vanishes at gamma"));
            }
            let u: f64 = rng.sample(OpenClosed01);
            // solve ν̄(x,t) = (1-u)·ν̄(γ,t) by bracketing plus bisection
            let target = (1.0 - u) * tail_g;
            if target <= 0.0 {
                return Ok(gamma);
            }
            let mut hi = gamma.max(1e-12) * 2.0;
            let mut guard = 0;
            while family.tail(hi, t)? > target {
                hi *= 2.0;
                guard += 1;
                if guard > 400 {
                    return Err(Error::NoTailBound);
                }
            }
            let mut lo = gamma;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if family.tail(mid, t)? > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-12 * hi {
                    break;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

fn drift_for(
    family: &LevyFamily,
    gamma: f64,
    horizon: f64,
    compensation: Compensation,
) -> PathDrift {
    let has_family_drift = family.max_drift_rate(horizon) > 0.0;
    let has_comp = compensation == Compensation::MeanShift
        && !matches!(family.kind(), FamilyKind::DriftOnly { .. });
    match (has_family_drift, has_comp) {
        (false, false) => PathDrift::None,
        (true, false) if family_rate_constant(family) => PathDrift::Linear(family.drift_rate(0.0)),
        _ => {
            // cumulative table of b'(s) + compensation rate over [0, horizon]
            let n = 256;
            let mut ts = Vec::with_capacity(n + 1);
            let mut vals = Vec::with_capacity(n + 1);
            let mut acc = 0.0;
            ts.push(0.0);
            vals.push(0.0);
            for k in 1..=n {
                let a = horizon * (k - 1) as f64 / n as f64;
                let b = horizon * k as f64 / n as f64;
                let rate = |s: f64| {
                    family.drift_rate(s)
                        + if has_comp { family.small_jump_mean(gamma, s) } else { 0.0 }
                };
                acc += quad::integrate(rate, a, b, 1e-12).map(|r| r.value).unwrap_or(0.0);
                ts.push(b);
                vals.push(acc);
            }
            PathDrift::Table { ts, vals }
        }
    }
}

fn family_rate_constant(family: &LevyFamily) -> bool {
    match family.kind() {
        FamilyKind::DriftOnly { rate } => rate.is_constant(),
        FamilyKind::Custom { drift: Some(d), .. } => d.is_constant(),
        _ => true,
    }
}

/// Simulates one γ-truncated path on [0, horizon].
pub fn simulate_path(
    family: &LevyFamily,
    gamma: f64,
    horizon: f64,
    stream: RngStream,
) -> Result<SubordinatorPath> {
    simulate_path_with(family, gamma, horizon, stream, Compensation::Off)
}

pub fn simulate_path_with(
    family: &LevyFamily,
    gamma: f64,
    horizon: f64,
    stream: RngStream,
    compensation: Compensation,
) -> Result<SubordinatorPath> {
    let mut rng = stream.rng();
    let (jumps, prefix) = if matches!(family.kind(), FamilyKind::DriftOnly { .. }) {
        (Vec::new(), Vec::new())
    } else {
        let times = sample_nhpp_times(family, gamma, horizon, &mut rng)?;
        let mut jumps = Vec::with_capacity(times.len());
        let mut prefix = Vec::with_capacity(times.len());
        let mut acc = 0.0;
        for t in times {
            let x = sample_jump(family, gamma, t, &mut rng)?;
            acc += x;
            jumps.push((t, x));
            prefix.push(acc);
        }
        (jumps, prefix)
    };
    Ok(SubordinatorPath {
        jumps,
        prefix,
        drift: drift_for(family, gamma, horizon, compensation),
        horizon,
        truncation: gamma,
        family_id: String::from(family.name()),
    })
}

/// Sum of truncated jumps over the window (a, b] plus drift increment — the
/// increment σ(b) − σ(a) without materialising a path, valid because
/// increments over disjoint windows are independent.
pub fn sample_increment(
    family: &LevyFamily,
    gamma: f64,
    a: f64,
    b: f64,
    rng: &mut ChaCha12Rng,
    compensation: Compensation,
) -> Result<f64> {
    let mut acc = family.cum_drift(b) - family.cum_drift(a);
    if !matches!(family.kind(), FamilyKind::DriftOnly { .. }) {
        for t in sample_nhpp_times_window(family, gamma, a, b, rng)? {
            acc += sample_jump(family, gamma, t, rng)?;
        }
        if compensation == Compensation::MeanShift {
            acc += quad::integrate(|s| family.small_jump_mean(gamma, s), a, b, 1e-12)?.value;
        }
    }
    Ok(acc)
}

/// One row of the increment-Laplace report.
#[derive(Debug, Clone)]
pub struct LaplaceEstimate {
    pub lambda: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// exp(−∫ₛᵗ ∫_γ^∞ (1−e^{−λx}) ν(dx,τ)dτ − λ(b(t)−b(s))): exact for the
    /// truncated process.
    pub target_truncated: f64,
    /// exp(−∫ₛᵗ f(λ,τ)dτ): the untruncated law.
    pub target_full: f64,
    /// λ ∫ₛᵗ ∫₀^γ x ν(dx,τ)dτ ≥ |log target ratio|.
    pub bias_bound: f64,
}

/// Partial accumulation over a path-index range; ranges sharing a master
/// seed can be merged, which is how the std layer parallelises.
#[derive(Debug, Clone)]
pub struct LaplaceAccumulator {
    pub n: usize,
    pub sums: Vec<f64>,
    pub sq_sums: Vec<f64>,
}

impl LaplaceAccumulator {
    pub fn merge(mut self, other: &LaplaceAccumulator) -> LaplaceAccumulator {
        self.n += other.n;
        for i in 0..self.sums.len() {
            self.sums[i] += other.sums[i];
            self.sq_sums[i] += other.sq_sums[i];
        }
        self
    }

    pub fn finish(
        &self,
        family: &LevyFamily,
        gamma: f64,
        s: f64,
        t: f64,
        lambdas: &[f64],
    ) -> Result<Vec<LaplaceEstimate>> {
        let n = self.n as f64;
        let mut out = Vec::with_capacity(lambdas.len());
        for (i, &lam) in lambdas.iter().enumerate() {
            let mean = self.sums[i] / n;
            let var = (self.sq_sums[i] / n - mean * mean).max(0.0) * n / (n - 1.0);
            let pi_full = family.eval_pi_window(lam, s, t, crate::family::TOL_PI)?;
            let deficit =
                quad::integrate(|tau| family.truncation_deficit(lam, gamma, tau), s, t, 1e-12)?
                    .value;
            let bias_bound = lam
                * quad::integrate(|tau| family.small_jump_mean(gamma, tau), s, t, 1e-12)?.value;
            out.push(LaplaceEstimate {
                lambda: lam,
                estimate: mean,
                std_error: math::sqrt(var / n),
                target_truncated: math::exp(-(pi_full - deficit)),
                target_full: math::exp(-pi_full),
                bias_bound,
            });
        }
        Ok(out)
    }
}

pub fn increment_laplace_mc_range(
    family: &LevyFamily,
    gamma: f64,
    s: f64,
    t: f64,
    lambdas: &[f64],
    paths: core::ops::Range<u64>,
    master: RngStream,
) -> Result<LaplaceAccumulator> {
    let mut acc = LaplaceAccumulator {
        n: 0,
        sums: vec![0.0; lambdas.len()],
        sq_sums: vec![0.0; lambdas.len()],
    };
    for i in paths {
        let mut rng = master.substream(domain::LAPLACE, i);
        let inc = sample_increment(family, gamma, s, t, &mut rng, Compensation::Off)?;
        for (k, &lam) in lambdas.iter().enumerate() {
            let v = math::exp(-lam * inc);
            acc.sums[k] += v;
            acc.sq_sums[k] += v * v;
        }
        acc.n += 1;
    }
    Ok(acc)
}

/// Monte Carlo estimate of E e^{−λ(σ(t)−σ(s))} per λ with analytic targets.
pub fn increment_laplace_mc(
    family: &LevyFamily,
    gamma: f64,
    s: f64,
    t: f64,
    lambdas: &[f64],
    n_paths: usize,
    master: RngStream,
) -> Result<Vec<LaplaceEstimate>> {
    let acc = increment_laplace_mc_range(family, gamma, s, t, lambdas, 0..n_paths as u64, master)?;
    acc.finish(family, gamma, s, t, lambdas)
}

/// Piecewise-stable construction: cumulative sums S_k = Σ_{i≤k} X_i where
/// X_i is one-sided α_i-stable with transform e^{−(T/n)λ^{α_i}},
/// α_i = α(iT/n). Returns (t_k, S_k), k = 0..n.
pub fn piecewise_stable_path(
    alpha: &crate::index::TimeVaryingIndex,
    n_pieces: usize,
    horizon: f64,
    stream: RngStream,
) -> Vec<(f64, f64)> {
    debug_assert!(n_pieces >= 1);
    let mut rng = stream.rng();
    let dt = horizon / n_pieces as f64;
    let mut out = Vec::with_capacity(n_pieces + 1);
    let mut acc = 0.0;
    out.push((0.0, 0.0));
    for i in 1..=n_pieces {
        let a = alpha.eval(i as f64 * dt);
        acc += stable::sample_scaled(a, dt, &mut rng);
        out.push((i as f64 * dt, acc));
    }
    out
}

/// Rescaled increments (σ(t₀+rT) − σ(t₀)) / r^{1/α(t₀)} for the
/// localizability check. Small-jump mean compensation is applied so the
/// truncated simulation matches the untruncated tangent law.
pub fn localize_increments(
    family: &LevyFamily,
    gamma: f64,
    t0: f64,
    r: f64,
    big_t: f64,
    n_paths: usize,
    master: RngStream,
) -> Result<Vec<f64>> {
    let alpha0 = match family.kind() {
        FamilyKind::Multistable { alpha } => alpha.eval(t0),
        _ => return Err(Error::Domain("localizability check requires the multistable family")),
    };
    family.check_horizon(t0 + r * big_t)?;
    let scale = math::pow(r, 1.0 / alpha0);
    let mut out = Vec::with_capacity(n_paths);
    for i in 0..n_paths as u64 {
        let mut rng = master.substream(domain::LOCALIZE, i);
        let inc =
            sample_increment(family, gamma, t0, t0 + r * big_t, &mut rng, Compensation::MeanShift)?;
        out.push(inc / scale);
    }
    Ok(out)
}

/// Expected number of thinned events: ∫ₐᵇ ν̄(γ,s) ds.
pub fn expected_jump_count(family: &LevyFamily, gamma: f64, a: f64, b: f64) -> Result<f64> {
    Ok(quad::integrate(|s| family.tail(gamma, s).unwrap_or(f64::NAN), a, b, 1e-10)?.value)
}
