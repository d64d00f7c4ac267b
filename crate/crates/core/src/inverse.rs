//! The inverse process L(t) = inf{ x ≥ 0 : σ(x) > t }, its density and
//! governing equation, and time-changed Markov densities.
//!
//! The density follows the convolution formula
//! l(x,t) = ∫₀ᵗ q(s,x) ν̄(t−s,x) ds, where q(s,x) is the density of σ(x) at
//! the value s — note the role swap: x is the subordinator's time argument.
//! Pathwise, first-passage times of simulated trajectories give the Monte
//! Carlo side of every check; the governing equation in t is checked as a
//! residual ∂ₓl + D^R_t(x) l + B_{t,x} l on interior grid probes, where
//! D^R_t(x) reuses the product-integration kernel machinery with the roles
//! of x and t exchanged and B_{t,x} couples the two variables through
//! ∂ₓν̄(t−s, x):
//!
//! B_{t,x} l = ∫₀ᵗ ds ∂ₓν̄(t−s,x) ∂ₛ ∫₀ˣ l(x′,s) dx′.
//!
//! For a measure that does not depend on its time argument the B term
//! vanishes identically and the equation reduces to the classical
//! time-fractional form.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::family::{FamilyKind, LevyFamily};
use crate::math;
use crate::quad;
use crate::rng::RngStream;
use crate::sampler::{self, Compensation, SubordinatorPath};

/// First-passage time of a simulated path above `level`.
pub fn first_passage(path: &SubordinatorPath, level: f64) -> Result<f64> {
    path.first_passage(level)
}

/// l(x,t) = ∫₀ᵗ q(s,x) ν̄(t−s,x) ds by quadrature. `q(s, x)` is the density
/// of σ(x) at value s. The endpoint singularity of the kernel at s → t is
/// removed by the power substitution when the family has one.
pub fn inverse_density_formula<Q>(
    q: Q,
    family: &LevyFamily,
    x: f64,
    t: f64,
    tol: f64,
) -> Result<f64>
where
    Q: Fn(f64, f64) -> f64,
{
    if t <= 0.0 {
        return Err(Error::Domain("inverse density needs t > 0"));
    }
    // substitute w = t - s so the kernel singularity sits at w = 0
    let g = |w: f64| q(t - w, x) * family.tail(w, x).unwrap_or(0.0);
    let p = family.sing_exponent(x).unwrap_or(0.0);
    let r = if p > 0.0 {
        let gg = move |w: f64| g(w) * math::pow(w, p);
        quad::integrate_power_singular(gg, t, p, tol)?
    } else {
        quad::integrate(g, 0.0, t, tol)?
    };
    Ok(r.value)
}

/// Streaming first-passage sample: jumps are generated window by window in
/// time order (the extension over (h, 2h] is the exact conditional
/// continuation because increments are independent), stopping at the first
/// crossing. Horizon doubling is capped; exhaustion is reported.
pub fn sample_first_passage(
    family: &LevyFamily,
    gamma: f64,
    level: f64,
    stream: RngStream,
    compensation: Compensation,
) -> Result<f64> {
    let mut rng = stream.rng();
    if level < 0.0 {
        return Ok(0.0);
    }
    let has_jumps = !matches!(family.kind(), FamilyKind::DriftOnly { .. });
    let comp_on = compensation == Compensation::MeanShift && has_jumps;

    let mut window_lo = 0.0;
    let mut window_hi = initial_horizon(level);
    let mut sigma = 0.0; // σ at window_lo
    for _ in 0..28 {
        // deterministic part of σ over this window, as a node table
        let nodes = 64;
        let dw = (window_hi - window_lo) / nodes as f64;
        let mut det = Vec::with_capacity(nodes + 1);
        det.push(0.0);
        let mut acc = 0.0;
        for k in 0..nodes {
            let a = window_lo + k as f64 * dw;
            let b = a + dw;
            let rate = |s: f64| {
                family.drift_rate(s)
                    + if comp_on { family.small_jump_mean(gamma, s) } else { 0.0 }
            };
            acc += quad::integrate(rate, a, b, 1e-13).map(|r| r.value).unwrap_or(0.0);
            det.push(acc);
        }
        let det_at = |s: f64| -> f64 {
            let pos = ((s - window_lo) / dw).clamp(0.0, nodes as f64);
            let k = (pos as usize).min(nodes - 1);
            let w = pos - k as f64;
            det[k] + w * (det[k + 1] - det[k])
        };

        let jumps = if has_jumps {
            sampler::sample_nhpp_times_window(family, gamma, window_lo, window_hi, &mut rng)?
        } else {
            Vec::new()
        };

        let mut prev_t = window_lo;
        let mut jump_acc = 0.0;
        for jt in jumps {
            // drift crossing inside (prev_t, jt)?
            if sigma + jump_acc + det_at(jt) > level {
                return Ok(invert_linear_table(
                    &det,
                    window_lo,
                    dw,
                    prev_t,
                    jt,
                    level - sigma - jump_acc,
                ));
            }
            let size = sampler::sample_jump(family, gamma, jt, &mut rng)?;
            jump_acc += size;
            if sigma + jump_acc + det_at(jt) > level {
                return Ok(jt);
            }
            prev_t = jt;
        }
        if sigma + jump_acc + det_at(window_hi) > level {
            return Ok(invert_linear_table(
                &det,
                window_lo,
                dw,
                prev_t,
                window_hi,
                level - sigma - jump_acc,
            ));
        }
        sigma += jump_acc + det_at(window_hi);
        window_lo = window_hi;
        window_hi *= 2.0;
        if !has_jumps && family.max_drift_rate(window_hi) == 0.0 {
            break;
        }
    }
    Err(Error::HorizonExhausted { level, reached: sigma })
}

fn initial_horizon(level: f64) -> f64 {
    level.max(1e-3)
}

/// Smallest s in [lo, hi] with table-drift(s) ≥ target (table segments are
/// linear, so the inversion is exact per segment).
fn invert_linear_table(det: &[f64], t0: f64, dw: f64, lo: f64, hi: f64, target: f64) -> f64 {
    let nodes = det.len() - 1;
    let mut k = (((lo - t0) / dw) as usize).min(nodes - 1);
    loop {
        let seg_lo = t0 + k as f64 * dw;
        let seg_hi = seg_lo + dw;
        if det[k + 1] >= target || k + 1 == nodes {
            let denom = det[k + 1] - det[k];
            let s = if denom > 0.0 {
                seg_lo + dw * ((target - det[k]) / denom).clamp(0.0, 1.0)
            } else {
                seg_hi
            };
            return s.clamp(lo, hi);
        }
        k += 1;
    }
}

/// Histogram of first-passage samples; total mass is 1 by construction.
#[derive(Debug, Clone)]
pub struct InverseMc {
    /// sorted first-passage times
    pub samples: Vec<f64>,
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl InverseMc {
    pub fn density(&self, bin: usize) -> f64 {
        self.counts[bin] as f64 / (self.samples.len() as f64 * self.bin_width)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        crate::stats::ecdf_sorted(&self.samples, x)
    }
}

/// Kernel-free histogram of L(t) over `n_paths` simulated paths. Aborts when
/// more than 0.1% of the paths exhaust the doubling horizon.
pub fn inverse_density_mc(
    family: &LevyFamily,
    gamma: f64,
    t: f64,
    n_paths: usize,
    bandwidth: f64,
    master: RngStream,
) -> Result<InverseMc> {
    let mut samples = inverse_density_mc_range(family, gamma, t, 0..n_paths as u64, master)?;
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    histogram(samples, bandwidth)
}

pub fn inverse_density_mc_range(
    family: &LevyFamily,
    gamma: f64,
    t: f64,
    paths: core::ops::Range<u64>,
    master: RngStream,
) -> Result<Vec<f64>> {
    let n = paths.end - paths.start;
    let mut exhausted = 0u64;
    let budget = (n / 1000).max(1);
    let mut samples = Vec::with_capacity(n as usize);
    for i in paths {
        match sample_first_passage(family, gamma, t, substream_for(master, i), Compensation::MeanShift)
        {
            Ok(v) => samples.push(v),
            Err(Error::HorizonExhausted { .. }) => {
                exhausted += 1;
                if exhausted > budget {
                    return Err(Error::HorizonExhausted { level: t, reached: f64::NAN });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(samples)
}

fn substream_for(master: RngStream, i: u64) -> RngStream {
    RngStream::new(master.master_seed, ((sampler::domain::INVERSE as u64) << 48) | i)
}

fn histogram(samples: Vec<f64>, bandwidth: f64) -> Result<InverseMc> {
    if samples.is_empty() {
        return Err(Error::Domain("no samples for histogram"));
    }
    if bandwidth <= 0.0 {
        return Err(Error::Domain("bandwidth must be positive"));
    }
    let hi = *samples.last().expect("non-empty");
    let nbins = (hi / bandwidth) as usize + 1;
    let mut counts = vec![0u64; nbins];
    for &s in &samples {
        let b = ((s / bandwidth) as usize).min(nbins - 1);
        counts[b] += 1;
    }
    Ok(InverseMc { samples, bin_width: bandwidth, counts })
}

// ----- governing-equation residual -----

/// Values l(x_i, t_k) on a uniform rectangle x_i = x0 + iΔx (i = 0..n_x),
/// t_k = kΔt (k = 0..n_t).
#[derive(Debug, Clone)]
pub struct InverseField {
    pub x0: f64,
    pub dx: f64,
    pub n_x: usize,
    pub dt: f64,
    pub n_t: usize,
    /// row-major in x: values[i * (n_t+1) + k]
    pub values: Vec<f64>,
}

impl InverseField {
    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[i * (self.n_t + 1) + k]
    }

    pub fn fill<F: Fn(f64, f64) -> f64>(
        x0: f64,
        dx: f64,
        n_x: usize,
        dt: f64,
        n_t: usize,
        f: F,
    ) -> Self {
        let mut values = Vec::with_capacity((n_x + 1) * (n_t + 1));
        for i in 0..=n_x {
            for k in 0..=n_t {
                values.push(f(x0 + i as f64 * dx, k as f64 * dt));
            }
        }
        InverseField { x0, dx, n_x, dt, n_t, values }
    }
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// max |∂ₓl + D^R_t l + B l| over the probes
    pub max_residual: f64,
    /// max |B l| alone (vanishes when ν̄ does not depend on its time slot)
    pub max_b_term: f64,
    /// first-order discretisation scale Δt·max|∂ₜₜl| + Δx²·max|∂ₓₓₓl|
    pub ref_scale: f64,
    pub probes: usize,
}

/// Evaluates the equation residual on the interior probe set: nodes with
/// x-index in `[margin_x, n_x − 2]` and t-index in `[margin_t, n_t − 1]`.
/// Margins must keep the probes away from the (x, t) → (·, 0) corner, where
/// the density itself is steep and no fixed-order estimate applies.
pub fn inverse_equation_residual(
    field: &InverseField,
    family: &LevyFamily,
    margin_x: usize,
    margin_t: usize,
) -> Result<ResidualReport> {
    let (nx, nt) = (field.n_x, field.n_t);
    let margin_x = margin_x.max(2);
    let margin_t = margin_t.max(2);
    if nx < margin_x + 3 || nt < margin_t + 3 {
        return Err(Error::Domain("residual grid too small for stencils"));
    }
    let (dx, dt) = (field.dx, field.dt);

    // cumulative ∫ l dx' (trapezoid from x0; the part over [0, x0] only
    // shifts the cumulative by a k-dependent amount which the ∂_s stencil
    // keeps, so x0 must be small enough that l is negligible below it)
    let mut cum = vec![0.0; (nx + 1) * (nt + 1)];
    for k in 0..=nt {
        let mut acc = 0.0;
        for i in 1..=nx {
            acc += 0.5 * (field.value(i - 1, k) + field.value(i, k)) * dx;
            cum[i * (nt + 1) + k] = acc;
        }
    }

    let mut max_residual: f64 = 0.0;
    let mut max_b: f64 = 0.0;
    let mut max_ltt: f64 = 0.0;
    let mut max_lxxx: f64 = 0.0;
    let mut probes = 0usize;

    for i in margin_x..nx - 1 {
        let x = field.x0 + i as f64 * dx;
        // kernel cell integrals in the t direction at this x
        let mut kt = Vec::with_capacity(nt);
        let mut dk = Vec::with_capacity(nt);
        for m in 0..nt {
            kt.push(family.tail_cell_integral(m as f64 * dt, (m + 1) as f64 * dt, x)? / dt);
            dk.push(family.tail_dt_cell_integral(m as f64 * dt, (m + 1) as f64 * dt, x)?);
        }
        // ∂_s of the cumulative integral, central in k
        let mut g = vec![0.0; nt + 1];
        for k in 1..nt {
            g[k] = (cum[i * (nt + 1) + k + 1] - cum[i * (nt + 1) + k - 1]) / (2.0 * dt);
        }
        g[0] = (cum[i * (nt + 1) + 1] - cum[i * (nt + 1)]) / dt;
        g[nt] = (cum[i * (nt + 1) + nt] - cum[i * (nt + 1) + nt - 1]) / dt;

        for k in margin_t..nt {
            // D^R_t: product integration + one-sided difference in t
            let conv_at = |kk: usize| -> f64 {
                let mut acc = 0.0;
                for j in 0..kk {
                    acc += kt[kk - 1 - j] * 0.5 * (field.value(i, j) + field.value(i, j + 1));
                }
                acc * dt
            };
            let drl = (conv_at(k) - conv_at(k - 1)) / dt;
            // B term: trapezoid in s against exact cells of ∂ₓν̄
            let mut b_term = 0.0;
            for j in 0..k {
                b_term += dk[k - 1 - j] * 0.5 * (g[j] + g[j + 1]);
            }
            let dlx = (field.value(i + 1, k) - field.value(i - 1, k)) / (2.0 * dx);
            let r = dlx + drl + b_term;
            max_residual = max_residual.max(math::abs(r));
            max_b = max_b.max(math::abs(b_term));
            probes += 1;

            let ltt = (field.value(i, k + 1) - 2.0 * field.value(i, k) + field.value(i, k - 1))
                / (dt * dt);
            max_ltt = max_ltt.max(math::abs(ltt));
            let lxxx = (-field.value(i - 2, k) + 2.0 * field.value(i - 1, k)
                - 2.0 * field.value(i + 1, k)
                + field.value(i + 2, k))
                / (2.0 * dx * dx * dx);
            max_lxxx = max_lxxx.max(math::abs(lxxx));
        }
    }
    Ok(ResidualReport {
        max_residual,
        max_b_term: max_b,
        ref_scale: dt * max_ltt + dx * dx * max_lxxx,
        probes,
    })
}

/// g(x,y,t) = ∫₀^∞ p(x,y,u) l(u,t) du with the upper cutoff taken from the
/// support of l.
pub fn timechanged_density<P, L>(
    markov_kernel: P,
    l_slice: L,
    x: f64,
    y: f64,
    u_support: f64,
    tol: f64,
) -> Result<f64>
where
    P: Fn(f64, f64, f64) -> f64,
    L: Fn(f64) -> f64,
{
    // 16 initial panels so narrow features of l are seen by the rule
    let mut total = 0.0;
    for k in 0..16 {
        let a = u_support * k as f64 / 16.0;
        let b = u_support * (k + 1) as f64 / 16.0;
        total +=
            quad::integrate(|u| markov_kernel(x, y, u) * l_slice(u), a, b, tol / 16.0)?.value;
    }
    Ok(total)
}

/// Heat kernel of T_t = e^{t·½Δ} in one dimension: variance u at time u.
pub fn heat_kernel_1d(x: f64, y: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    math::exp(-(x - y) * (x - y) / (2.0 * u)) / math::sqrt(2.0 * math::PI * u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::TimeVaryingIndex;
    use crate::stable;
    use crate::stats;

    fn ms(alpha: f64, horizon: f64) -> LevyFamily {
        LevyFamily::multistable(TimeVaryingIndex::constant(alpha), horizon).unwrap()
    }

    #[test]
    fn first_passage_drift_only_identity() {
        let fam = LevyFamily::drift_only(TimeVaryingIndex::constant(1.0), 8.0).unwrap();
        let p = sampler::simulate_path(&fam, 1e-6, 8.0, RngStream::new(1, 0)).unwrap();
        for level in [0.0, 0.3, 1.7, 6.9] {
            assert!(math::abs(first_passage(&p, level).unwrap() - level) < 1e-9);
        }
        assert!(matches!(first_passage(&p, 9.0), Err(Error::HorizonExhausted { .. })));
    }

    #[test]
    fn first_passage_step_inversion() {
        let p = SubordinatorPath::raw_parts_for_tests(alloc::vec![(0.5, 2.0)], 0.0, 2.0);
        assert_eq!(first_passage(&p, 1.0).unwrap(), 0.5);
        assert!(first_passage(&p, 2.5).is_err());
        // σ(0.5) = 2 > 1.99: crossing still at the jump time
        assert_eq!(first_passage(&p, 1.99).unwrap(), 0.5);
    }

    #[test]
    fn first_passage_round_trip_gap() {
        // |L(σ(t)) − t| bounded by the gap to the next jump
        let fam = ms(0.7, 2.0);
        let p = sampler::simulate_path(&fam, 1e-4, 2.0, RngStream::new(3, 5)).unwrap();
        for t_probe in [0.3, 0.9, 1.4] {
            let v = p.evaluate(t_probe).unwrap();
            let fp = first_passage(&p, v).unwrap();
            assert!(fp >= t_probe - 1e-12);
            let next_jump = p
                .jumps()
                .iter()
                .map(|(tt, _)| *tt)
                .find(|tt| *tt > t_probe)
                .unwrap_or(p.horizon());
            assert!(fp <= next_jump + 1e-12, "fp={fp} next={next_jump}");
        }
    }

    #[test]
    fn streaming_first_passage_matches_path_route() {
        // same law: two-sample KS between streaming and path-based samples
        let fam = LevyFamily::multistable(TimeVaryingIndex::sinusoidal(0.6, 0.2, 1.0, 0.0), 64.0)
            .unwrap();
        let n = 4000usize;
        let mut a: Vec<f64> = (0..n)
            .map(|i| {
                sample_first_passage(&fam, 1e-3, 1.0, RngStream::new(77, i as u64), Compensation::Off)
                    .unwrap()
            })
            .collect();
        let mut b: Vec<f64> = (0..n)
            .map(|i| {
                // horizon long enough that failing to cross level 1 has negligible
                // probability (the streaming route never truncates)
                let p = sampler::simulate_path(&fam, 1e-3, 16.0, RngStream::new(1077, i as u64))
                    .unwrap();
                p.first_passage(1.0).unwrap()
            })
            .collect();
        a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
        let ks = stats::ks_two_sample_sorted(&a, &b);
        let ne = n as f64 / 2.0;
        assert!(ks < 1.628 / math::sqrt(ne), "ks = {ks}");
    }

    #[test]
    fn formula_half_stable_value() {
        // l(1,1) = e^{-1/4}/√π for α = 1/2
        let fam = ms(0.5, 8.0);
        let q = |s: f64, x: f64| stable::half_stable_pdf(s, x);
        let got = inverse_density_formula(q, &fam, 1.0, 1.0, 1e-10).unwrap();
        let want = 0.4393912894677224;
        assert!(math::abs(got - want) / want < 1e-6, "{got}");
        for (x, t) in [(0.5, 1.0), (1.5, 2.0), (0.2, 0.7)] {
            let got = inverse_density_formula(q, &fam, x, t, 1e-10).unwrap();
            let want = stable::inverse_half_stable_pdf(x, t);
            assert!(math::abs(got - want) / want < 1e-6, "({x},{t}): {got} vs {want}");
        }
    }

    #[test]
    fn formula_normalization_and_boundary() {
        let fam = ms(0.5, 8.0);
        let q = |s: f64, x: f64| stable::half_stable_pdf(s, x);
        let t = 1.0;
        let mass = quad::integrate(
            |x| inverse_density_formula(q, &fam, x.max(1e-6), t, 1e-9).unwrap(),
            0.0,
            8.0,
            1e-7,
        )
        .unwrap()
        .value;
        assert!(math::abs(mass - 1.0) < 0.01, "mass = {mass}");
        // boundary value l(0+, t) → ν̄(t, 0)
        let want = fam.tail(t, 0.0).unwrap();
        let near = inverse_density_formula(q, &fam, 0.004, t, 1e-10).unwrap();
        let nearer = inverse_density_formula(q, &fam, 0.002, t, 1e-10).unwrap();
        let extrap = 2.0 * nearer - near;
        assert!(math::abs(extrap - want) / want < 0.02, "{extrap} vs {want}");
    }

    #[test]
    fn mc_drift_only_point_mass() {
        let fam = LevyFamily::drift_only(TimeVaryingIndex::constant(1.0), 64.0).unwrap();
        let mc = inverse_density_mc(&fam, 1e-6, 0.8, 500, 0.05, RngStream::new(5, 0)).unwrap();
        assert!(mc.samples.iter().all(|s| math::abs(s - 0.8) < 1e-6));
        let total: u64 = mc.counts.iter().sum();
        assert_eq!(total as usize, mc.samples.len());
    }

    #[test]
    fn mc_half_stable_ks() {
        let fam = ms(0.5, 64.0);
        let mc = inverse_density_mc(&fam, 1e-6, 1.0, 10_000, 0.02, RngStream::new(9, 0)).unwrap();
        let ks =
            stats::ks_statistic_sorted(&mc.samples, |x| stable::inverse_half_stable_cdf(x, 1.0));
        assert!(ks < 0.02, "ks = {ks}");
    }

    #[test]
    fn residual_constant_alpha_first_order() {
        let fam = ms(0.5, 8.0);
        let mut rs = Vec::new();
        for n in [24usize, 48] {
            let field = InverseField::fill(0.2, 1.6 / n as f64, n, 2.0 / n as f64, n, |x, t| {
                if t == 0.0 {
                    0.0
                } else {
                    stable::inverse_half_stable_pdf(x, t)
                }
            });
            let rep = inverse_equation_residual(&field, &fam, n / 5, n / 5).unwrap();
            // classical reduction: no B coupling at all
            assert!(rep.max_b_term < 1e-12 * rep.ref_scale.max(1.0), "B = {}", rep.max_b_term);
            assert!(
                rep.max_residual < 3.0 * rep.ref_scale,
                "residual {} vs scale {}",
                rep.max_residual,
                rep.ref_scale
            );
            rs.push(rep.max_residual);
        }
        assert!(rs[0] / rs[1] > 1.5, "{rs:?}");
    }

    #[test]
    fn residual_b_term_nonzero_for_time_varying() {
        let fam = LevyFamily::multistable(TimeVaryingIndex::sinusoidal(0.6, 0.2, 1.0, 0.0), 8.0)
            .unwrap();
        let n = 24;
        let field = InverseField::fill(0.2, 1.6 / n as f64, n, 2.0 / n as f64, n, |x, t| {
            if t == 0.0 {
                0.0
            } else {
                stable::inverse_half_stable_pdf(x, t)
            }
        });
        let rep = inverse_equation_residual(&field, &fam, n / 5, n / 5).unwrap();
        assert!(rep.max_b_term > 1e-3, "B = {}", rep.max_b_term);
    }

    #[test]
    fn timechanged_sifting_and_symmetry() {
        // l concentrated at u0: g ≈ heat kernel at time u0
        let u0 = 0.7;
        let eps = 0.05;
        let l = |u: f64| {
            math::exp(-(u - u0) * (u - u0) / (2.0 * eps * eps))
                / math::sqrt(2.0 * math::PI * eps * eps)
        };
        let g = timechanged_density(heat_kernel_1d, l, 0.9, 0.0, 4.0, 1e-10).unwrap();
        let want = heat_kernel_1d(0.9, 0.0, u0);
        assert!(math::abs(g - want) / want < 0.01, "{g} vs {want}");

        // symmetry in (x, y) for the heat kernel
        let l2 = |u: f64| stable::inverse_half_stable_pdf(u, 1.0);
        let a = timechanged_density(heat_kernel_1d, l2, 0.4, -0.3, 12.0, 1e-10).unwrap();
        let b = timechanged_density(heat_kernel_1d, l2, -0.3, 0.4, 12.0, 1e-10).unwrap();
        assert!(math::abs(a - b) < 1e-12);
    }
}
