//! Experiment dispatch: each experiment computes its artifacts into
//! `<outdir>/<experiment>-<seed>/`, writing `results.csv` plus a
//! `summary.txt` of `key = value` lines with one `check.*` entry per
//! configured check. Identical config and seed give byte-identical artifacts
//! for any thread count; partial artifacts are removed when a run fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nhsub_core::family::{ExtReal, FamilyKind, LevyFamily};
use nhsub_core::fracpde::{self, InitialCondition, SolveOptions, SpaceTimeGrid};
use nhsub_core::inverse::{self, InverseField};
use nhsub_core::sampler::{self, LaplaceAccumulator};
use nhsub_core::spectral::{self, SpectralOperator};
use nhsub_core::stable;
use nhsub_core::subbm::{self, CharFunAccumulator, Regime};
use nhsub_core::{math, stats, RngStream};

use crate::config::{Experiment, ExperimentConfig};
use crate::csvio::{self, fmt, ResultsWriter};
use crate::parallel;
use crate::Outcome;

#[derive(Debug)]
pub enum RunError {
    Numeric(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Numeric(m) => write!(f, "numeric failure: {m}"),
            RunError::Io(m) => write!(f, "io failure: {m}"),
        }
    }
}

impl From<nhsub_core::Error> for RunError {
    fn from(e: nhsub_core::Error) -> Self {
        RunError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

pub struct RunOutput {
    pub outcome: Outcome,
    pub out_dir: PathBuf,
    pub summary: Summary,
    pub error: Option<String>,
}

/// Ordered key=value summary; every number in it is an aggregation of
/// results.csv rows.
#[derive(Debug, Default, Clone)]
pub struct Summary {
    entries: Vec<(String, String)>,
    checks: Vec<(String, bool)>,
}

impl Summary {
    pub fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn check(&mut self, name: &str, pass: bool) {
        self.checks.push((name.to_string(), pass));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|(_, p)| *p)
    }

    pub fn write(&self, file: &Path) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(fs::File::create(file)?);
        writeln!(w, "# nhsub v1")?;
        for (k, v) in &self.entries {
            writeln!(w, "{k} = {v}")?;
        }
        for (name, pass) in &self.checks {
            writeln!(w, "check.{name} = {}", if *pass { "pass" } else { "fail" })?;
        }
        writeln!(w, "passed = {}/{}", self.checks.iter().filter(|(_, p)| *p).count(), self.checks.len())?;
        w.flush()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Runs one experiment; artifacts land in `<outdir>/<experiment>-<seed>/`.
pub fn run(config: &ExperimentConfig, outdir: &Path, threads: usize) -> RunOutput {
    let out_dir = outdir.join(format!("{}-{}", config.experiment.name(), config.seed));
    if let Err(e) = fs::create_dir_all(&out_dir) {
        return RunOutput {
            outcome: Outcome::UsageError,
            out_dir,
            summary: Summary::default(),
            error: Some(e.to_string()),
        };
    }
    let mut summary = Summary::default();
    summary.put("experiment", config.experiment.name());
    summary.put("seed", config.seed);
    summary.put("n_paths", config.n_paths);
    summary.put("gamma", config.gamma);

    let work = match config.experiment {
        Experiment::Simulate => simulate(config, &out_dir, threads, &mut summary),
        Experiment::LaplaceCheck => laplace_check(config, &out_dir, threads, &mut summary),
        Experiment::Pde => pde(config, &out_dir, threads, &mut summary),
        Experiment::Inverse => inverse_exp(config, &out_dir, threads, &mut summary),
        Experiment::InverseResidual => inverse_residual(config, &out_dir, &mut summary),
        Experiment::Propagator => propagator(config, &out_dir, &mut summary),
        Experiment::Msd => msd(config, &out_dir, threads, &mut summary),
        Experiment::CharFun => charfun(config, &out_dir, threads, &mut summary),
        Experiment::Localize => localize(config, &out_dir, &mut summary),
    };

    match work {
        Ok(()) => {
            let outcome = if summary.all_pass() { Outcome::Pass } else { Outcome::CheckFailed };
            summary.put("outcome", outcome.exit_code());
            if let Err(e) = summary.write(&out_dir.join("summary.txt")) {
                return RunOutput {
                    outcome: Outcome::NumericError,
                    out_dir,
                    summary,
                    error: Some(e.to_string()),
                };
            }
            RunOutput { outcome, out_dir, summary, error: None }
        }
        Err(e) => {
            // remove partial artifacts
            let _ = fs::remove_dir_all(&out_dir);
            RunOutput {
                outcome: Outcome::NumericError,
                out_dir,
                summary,
                error: Some(e.to_string()),
            }
        }
    }
}

fn build_family(config: &ExperimentConfig) -> Result<LevyFamily, RunError> {
    config.build_family().map_err(RunError::Numeric)
}

fn meta(config: &ExperimentConfig) -> Vec<(String, String)> {
    vec![
        ("experiment".into(), config.experiment.name().into()),
        ("seed".into(), config.seed.to_string()),
        ("gamma".into(), config.gamma.to_string()),
    ]
}

fn simulate(
    config: &ExperimentConfig,
    dir: &Path,
    threads: usize,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    let per_path = parallel::run_chunked(config.n_paths as u64, threads, |range| {
        let mut rows = Vec::with_capacity((range.end - range.start) as usize);
        for i in range {
            let p = sampler::simulate_path(
                &family,
                config.gamma,
                config.horizon,
                RngStream::new(config.seed, (sampler::domain::PATH as u64) << 48 | i),
            )?;
            rows.push((i, p.jumps().len(), p.total()));
        }
        Ok::<_, nhsub_core::Error>(rows)
    })
    .map_err(RunError::from)?;

    let mut w = ResultsWriter::create(
        &dir.join("results.csv"),
        "path,n_jumps,final_value",
        &meta(config),
    )?;
    let mut monotone_ok = true;
    let mut total_jumps = 0usize;
    for rows in &per_path {
        for (i, n_jumps, fin) in rows {
            if *fin < 0.0 {
                monotone_ok = false;
            }
            total_jumps += n_jumps;
            w.row(&[i.to_string(), n_jumps.to_string(), fmt(*fin)])?;
        }
    }
    w.finish()?;

    for i in 0..config.dump_paths.min(config.n_paths) {
        let p = sampler::simulate_path(
            &family,
            config.gamma,
            config.horizon,
            RngStream::new(config.seed, (sampler::domain::PATH as u64) << 48 | i as u64),
        )?;
        csvio::write_path_csv(&p, config.seed, &dir.join(format!("path-{i}.csv")))?;
    }

    summary.put("total_jumps", total_jumps);
    summary.check("paths_nondecreasing", monotone_ok);
    Ok(())
}

fn laplace_check(
    config: &ExperimentConfig,
    dir: &Path,
    threads: usize,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    let master = RngStream::new(config.seed, 0);
    let chunks = parallel::run_chunked(config.n_paths as u64, threads, |range| {
        sampler::increment_laplace_mc_range(
            &family,
            config.gamma,
            config.s,
            config.t,
            &config.lambdas,
            range,
            master,
        )
    })
    .map_err(RunError::from)?;
    let mut acc: Option<LaplaceAccumulator> = None;
    for c in &chunks {
        acc = Some(match acc {
            None => c.clone(),
            Some(a) => a.merge(c),
        });
    }
    let rows = acc
        .expect("at least one chunk")
        .finish(&family, config.gamma, config.s, config.t, &config.lambdas)?;

    let mut w = ResultsWriter::create(
        &dir.join("results.csv"),
        "lambda,estimate,se,target_truncated,target_full,bias_bound,z",
        &meta(config),
    )?;
    let mut max_z: f64 = 0.0;
    let mut all = true;
    for r in &rows {
        let z = (r.estimate - r.target_truncated) / r.std_error;
        max_z = max_z.max(math::abs(z));
        let pass = math::abs(z) <= config.se_mult;
        all &= pass;
        // the corrected estimate must also sit near the untruncated target
        let corrected_gap = math::abs(r.estimate - r.target_full);
        all &= corrected_gap <= r.bias_bound + config.se_mult * r.std_error;
        w.row(&[
            fmt(r.lambda),
            fmt(r.estimate),
            fmt(r.std_error),
            fmt(r.target_truncated),
            fmt(r.target_full),
            fmt(r.bias_bound),
            fmt(z),
        ])?;
    }
    w.finish()?;
    summary.put("max_abs_z", max_z);
    summary.put("se_mult", config.se_mult);
    summary.check("laplace_within_se", all);
    Ok(())
}

fn solve_pde(
    config: &ExperimentConfig,
    family: &LevyFamily,
    grid: SpaceTimeGrid,
) -> Result<(fracpde::DensityField, f64), RunError> {
    let t_start = match config.t_start {
        Some(t) => t,
        None => fracpde::default_t_start(family, &grid)?,
    };
    let opts = SolveOptions {
        t_start,
        substeps: config.substeps,
        outflow_budget: config.outflow_budget,
        c_stab: 0.5,
    };
    let field = fracpde::solve_forward(family, &grid, InitialCondition::StableLocal, &opts)?;
    Ok((field, t_start))
}

fn is_constant_half(family: &LevyFamily) -> bool {
    match family.kind() {
        FamilyKind::Multistable { alpha } => {
            alpha.is_constant() && math::abs(alpha.eval(0.0) - 0.5) < 1e-14
        }
        _ => false,
    }
}

fn pde(
    config: &ExperimentConfig,
    dir: &Path,
    threads: usize,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    if !matches!(family.kind(), FamilyKind::Multistable { .. }) {
        return Err(RunError::Numeric(
            "pde experiment currently targets the multistable family".into(),
        ));
    }
    let grid = SpaceTimeGrid::new(config.x_max, config.n_x, config.t_max, config.n_t)?;
    let (field, t_start) = solve_pde(config, &family, grid)?;
    summary.put("t_start", t_start);
    summary.put("mass_final", field.mass(grid.n_t));
    summary.put("outflow_final", field.outflow(grid.n_t));
    summary.put("min_value", field.min_value());

    csvio::write_field_csv(&field, &meta(config), &dir.join("field.csv"))?;
    csvio::write_field_binary(&field, &dir.join("field.bin"))?;

    let mut w =
        ResultsWriter::create(&dir.join("results.csv"), "x,q,reference", &meta(config))?;

    if is_constant_half(&family) {
        let mut linf: f64 = 0.0;
        for i in 0..grid.n_x {
            let x = grid.x_center(i);
            let want = stable::half_stable_pdf(x, grid.t_max);
            if (config.probe_lo..=config.probe_hi).contains(&x) {
                linf = linf.max(math::abs(field.value(i, grid.n_t) - want) / want);
            }
            w.row(&[fmt(x), fmt(field.value(i, grid.n_t)), fmt(want)])?;
        }
        w.finish()?;
        summary.put("linf_rel", linf);
        summary.check("pde_vs_closed_form", linf <= config.check_tol);
    } else {
        // Monte Carlo reference: empirical CDF of σ(t_max) against the PDE CDF
        let master = RngStream::new(config.seed, 0);
        let chunks = parallel::run_chunked(config.n_paths as u64, threads, |range| {
            subbm::msd_mc_range(&family, config.gamma, grid.t_max, 1, range, master, true)
        })
        .map_err(RunError::from)?;
        let mut samples: Vec<f64> = chunks.into_iter().flatten().collect();
        samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let cdf = field.cdf_row(grid.n_t);
        let mut ks: f64 = 0.0;
        for i in 0..grid.n_x {
            let edge = (i + 1) as f64 * grid.dx();
            let mc = stats::ecdf_sorted(&samples, edge);
            ks = ks.max(math::abs(cdf[i] - mc));
            w.row(&[fmt(grid.x_center(i)), fmt(field.value(i, grid.n_t)), fmt(mc)])?;
        }
        w.finish()?;
        summary.put("ks_pde_vs_mc", ks);
        summary.check("pde_vs_mc_cdf", ks <= config.check_tol);
    }

    // Laplace diagnostic: in-domain transform vs e^{-Pi}, corrected for the
    // mass that left the domain (exact for the heavy-tail benchmarks only up
    // to the escaped-tail contribution, hence reported, checked for the
    // time-invariant benchmark)
    let lambdas = [0.5, 1.0, 2.0];
    let mut max_rel: f64 = 0.0;
    for (lam, got, want) in fracpde::laplace_check(&field, &family, &lambdas, grid.n_t)? {
        let rel = math::abs(got - want) / want;
        summary.put(&format!("laplace_rel_{lam}"), rel);
        max_rel = max_rel.max(rel);
    }
    if is_constant_half(&family) {
        summary.check("laplace_digest", max_rel <= 0.01);
    }
    Ok(())
}

/// The PDE field for q(s, x): value axis covers [0, s_max] (s is the σ value),
/// time axis covers the inverse-value range [0, x_max].
fn q_field_for_inverse(
    config: &ExperimentConfig,
    family: &LevyFamily,
) -> Result<(fracpde::DensityField, f64), RunError> {
    let s_max = (2.0 * config.t).max(2.0);
    let n_val = 2048;
    let rows = config.n_x.max(64);
    let grid = SpaceTimeGrid::new(s_max, n_val, config.x_max, rows)?;
    let t_start = match config.t_start {
        Some(t) => t,
        None => fracpde::default_t_start(family, &grid)?,
    };
    // this grid is internal to the inverse machinery, so pick the substep
    // count from the stability bound instead of the caller's knob
    let mut k0_max: f64 = 0.0;
    for p in 0..=16 {
        let tp = config.x_max * p as f64 / 16.0;
        k0_max = k0_max.max(family.tail_cell_integral(0.0, grid.dx(), tp)? / grid.dx());
    }
    let dt_stable = 0.5 / (family.max_drift_rate(config.x_max) / grid.dx() + 2.0 * k0_max);
    let substeps = config.substeps.max(math::ceil(1.25 * grid.dt() / dt_stable) as usize);
    let opts = SolveOptions {
        t_start,
        substeps,
        // the value-domain truncation is benign (the flux is causal), so the
        // budget only guards against runaway loss
        outflow_budget: 1.0,
        c_stab: 0.5,
    };
    let field = fracpde::solve_forward(family, &grid, InitialCondition::StableLocal, &opts)?;
    Ok((field, t_start))
}

/// q(s, x) source for the inverse formulas: PDE rows (linearly interpolated
/// between stored times) above the march start, the α(0)-stable local law
/// below it — the same small-time approximation the solver starts from.
fn q_source<'a>(
    qf: &'a fracpde::DensityField,
    family: &LevyFamily,
) -> impl Fn(f64, f64) -> f64 + 'a {
    let grid = qf.grid;
    let first = qf.first_row();
    let t_start = grid.time(first);
    let alpha0 = match family.kind() {
        FamilyKind::Multistable { alpha } => alpha.eval(0.0),
        _ => 0.5,
    };
    let half = math::abs(alpha0 - 0.5) < 1e-14;
    move |s: f64, x: f64| {
        if x < t_start {
            if x <= 0.0 {
                return 0.0;
            }
            if half {
                return stable::half_stable_pdf(s, x);
            }
            let scale = math::pow(x, 1.0 / alpha0);
            return stable::pdf_standard(alpha0, s / scale).unwrap_or(0.0) / scale;
        }
        let pos = (x / grid.dt()).clamp(first as f64, grid.n_t as f64);
        let k = (pos as usize).min(grid.n_t - 1).max(first);
        let w = (pos - k as f64).clamp(0.0, 1.0);
        qf.interp(s, k) * (1.0 - w) + qf.interp(s, k + 1) * w
    }
}

fn inverse_exp(
    config: &ExperimentConfig,
    dir: &Path,
    threads: usize,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    let (qf, t_start) = q_field_for_inverse(config, &family)?;
    summary.put("t_start", t_start);
    let q = q_source(&qf, &family);

    // inverse density on the probe axis
    let n_probe = 256usize.min(config.n_x);
    let dxp = config.x_max / n_probe as f64;
    let mut xs = Vec::with_capacity(n_probe);
    let mut ls = Vec::with_capacity(n_probe);
    for j in 0..n_probe {
        let x = (j as f64 + 0.5) * dxp;
        let l = inverse::inverse_density_formula(&q, &family, x, config.t, 1e-9)?;
        xs.push(x);
        ls.push(l);
    }
    // formula CDF by the midpoint rule over probe cells
    let mut cdf_formula = Vec::with_capacity(n_probe);
    let mut acc = 0.0;
    for l in &ls {
        acc += l * dxp;
        cdf_formula.push(acc);
    }
    summary.put("formula_mass", acc);

    // Monte Carlo side
    let master = RngStream::new(config.seed, 0);
    let chunks = parallel::run_chunked(config.n_paths as u64, threads, |range| {
        inverse::inverse_density_mc_range(&family, config.gamma, config.t, range, master)
    })
    .map_err(RunError::from)?;
    let mut samples: Vec<f64> = chunks.into_iter().flatten().collect();
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    let mut w = ResultsWriter::create(
        &dir.join("results.csv"),
        "x,l_formula,cdf_formula,cdf_mc",
        &meta(config),
    )?;
    let mut ks: f64 = 0.0;
    for j in 0..n_probe {
        let edge = (j + 1) as f64 * dxp;
        let mc = stats::ecdf_sorted(&samples, edge);
        ks = ks.max(math::abs(cdf_formula[j] - mc));
        w.row(&[fmt(xs[j]), fmt(ls[j]), fmt(cdf_formula[j]), fmt(mc)])?;
    }
    w.finish()?;

    // the density itself in the field format
    let mut fmeta = meta(config);
    fmeta.push(("kind".into(), "inverse_density".into()));
    let mut fw = ResultsWriter::create(&dir.join("field.csv"), "x,t,q", &fmeta)?;
    for j in 0..n_probe {
        fw.row(&[fmt(xs[j]), fmt(config.t), fmt(ls[j])])?;
    }
    fw.finish()?;
    summary.put("ks_formula_vs_mc", ks);
    summary.check("inverse_formula_vs_mc", ks <= config.check_tol);

    if is_constant_half(&family) && config.t == 1.0 && config.x_max >= 1.0 {
        let l11 = inverse::inverse_density_formula(&q, &family, 1.0, 1.0, 1e-9)?;
        let want = 0.4393912894677224;
        let rel = math::abs(l11 - want) / want;
        summary.put("l_at_1_1", l11);
        summary.put("l_at_1_1_rel_err", rel);
        summary.check("inverse_value_at_1_1", rel <= 0.01);
    }
    Ok(())
}

fn inverse_residual(
    config: &ExperimentConfig,
    dir: &Path,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    let constant_half = is_constant_half(&family);

    let build_field = |n: usize| -> Result<InverseField, RunError> {
        if constant_half {
            Ok(InverseField::fill(
                0.2,
                (0.8 * config.x_max - 0.2) / n as f64,
                n,
                config.t_max / n as f64,
                n,
                |x, t| if t == 0.0 { 0.0 } else { stable::inverse_half_stable_pdf(x, t) },
            ))
        } else {
            let (qf, _) = q_field_for_inverse(config, &family)?;
            let q = q_source(&qf, &family);
            let x0 = 0.2;
            let dx = (0.8 * config.x_max - x0) / n as f64;
            let dt = config.t_max / n as f64;
            let mut values = Vec::with_capacity((n + 1) * (n + 1));
            for i in 0..=n {
                let x = x0 + i as f64 * dx;
                for k in 0..=n {
                    let t = k as f64 * dt;
                    let v = if t == 0.0 {
                        0.0
                    } else {
                        inverse::inverse_density_formula(&q, &family, x, t, 1e-8)
                            .unwrap_or(0.0)
                    };
                    values.push(v);
                }
            }
            Ok(InverseField { x0, dx, n_x: n, dt, n_t: n, values })
        }
    };

    let n = config.n_t.max(16);
    let coarse = build_field(n)?;
    let fine = build_field(2 * n)?;
    let rep_c = inverse::inverse_equation_residual(&coarse, &family, n / 5, n / 5)?;
    let rep_f = inverse::inverse_equation_residual(&fine, &family, 2 * n / 5, 2 * n / 5)?;

    let mut w = ResultsWriter::create(
        &dir.join("results.csv"),
        "grid,max_residual,ref_scale,max_b_term,probes",
        &meta(config),
    )?;
    w.row(&[
        n.to_string(),
        fmt(rep_c.max_residual),
        fmt(rep_c.ref_scale),
        fmt(rep_c.max_b_term),
        rep_c.probes.to_string(),
    ])?;
    w.row(&[
        (2 * n).to_string(),
        fmt(rep_f.max_residual),
        fmt(rep_f.ref_scale),
        fmt(rep_f.max_b_term),
        rep_f.probes.to_string(),
    ])?;
    w.finish()?;

    summary.put("max_residual", rep_c.max_residual);
    summary.put("ref_scale", rep_c.ref_scale);
    summary.put("max_b_term", rep_c.max_b_term);
    summary.put("refinement_ratio", rep_c.max_residual / rep_f.max_residual);
    if constant_half {
        // exact closed-form field: the full first-order contract applies
        summary.check("residual_within_scale", rep_c.max_residual <= 3.0 * rep_c.ref_scale);
        summary.check("residual_refines", rep_c.max_residual / rep_f.max_residual >= 1.5);
        summary.check("b_term_vanishes", rep_c.max_b_term <= 1e-12 * rep_c.ref_scale.max(1.0));
    } else {
        // the field itself comes from the solver + convolution formula, so
        // only the structural claim is checked: the coupling term is live
        summary.check("b_term_nonzero", rep_c.max_b_term > 1e-6);
    }
    Ok(())
}

fn propagator(
    config: &ExperimentConfig,
    dir: &Path,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    let op = match &config.eigen_csv {
        Some(path) => {
            let (vals, vecs) = csvio::read_eigenpairs(path)?;
            SpectralOperator::from_eigenpairs(vals, vecs)?
        }
        None => {
            let length = config.length.unwrap_or((config.nodes + 1) as f64);
            SpectralOperator::dirichlet_laplacian(config.nodes, length)
        }
    };
    let dim = op.dim();
    let mut rng = RngStream::new(config.seed, 0).substream(9, 0);
    use rand::Rng;
    let u: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let tol = config.quad_tol;
    let (s, t) = (config.s, config.t);
    let r = 0.0;

    let mut w = ResultsWriter::create(
        &dir.join("results.csv"),
        "check,value,threshold",
        &meta(config),
    )?;
    let record = |w: &mut ResultsWriter,
                      summary: &mut Summary,
                      name: &str,
                      value: f64,
                      threshold: f64,
                      pass: bool|
     -> Result<(), RunError> {
        w.row(&[name.to_string(), fmt(value), fmt(threshold)])?;
        summary.put(name, value);
        summary.check(name, pass);
        Ok(())
    };

    // composition law
    let law = spectral::check_propagator_law(&op, &family, r, 0.5 * (s + t), t, &u, tol)?;
    record(&mut w, summary, "propagator_law_residual", law, 1e-8, law <= 1e-8)?;

    // contraction, commutation, self-adjointness
    let pu = spectral::apply_propagator(&op, &family, s, t, &u, tol)?;
    let pv = spectral::apply_propagator(&op, &family, s, t, &v, tol)?;
    let contraction = spectral::norm(&pu) - spectral::norm(&u);
    record(&mut w, summary, "contraction_excess", contraction.max(0.0), 1e-10, contraction <= 1e-10)?;
    let apu = op.apply(&pu)?;
    let pau = spectral::apply_propagator(&op, &family, s, t, &op.apply(&u)?, tol)?;
    let comm: f64 = apu
        .iter()
        .zip(&pau)
        .map(|(a, b)| math::abs(a - b))
        .fold(0.0, f64::max);
    record(&mut w, summary, "commutation_defect", comm, 1e-10, comm <= 1e-10)?;
    let sym = math::abs(spectral::dot(&pu, &v) - spectral::dot(&u, &pv));
    record(&mut w, summary, "self_adjointness_defect", sym, 1e-10, sym <= 1e-10)?;

    // generator equivalence (spectral vs Phillips), sup-norm relative
    let spectral_side = spectral::generator_spectral(&op, &family, t, &u)?;
    let phillips_side = spectral::generator_phillips(&op, &family, t, &u, config.eps_split, tol)?;
    let sup = |v: &[f64]| v.iter().map(|x| math::abs(*x)).fold(0.0, f64::max);
    let rel = spectral_side
        .iter()
        .zip(&phillips_side.value)
        .map(|(a, b)| math::abs(a - b))
        .fold(0.0, f64::max)
        / sup(&spectral_side).max(1e-300);
    record(&mut w, summary, "generator_equivalence_rel", rel, 1e-6, rel <= 1e-6)?;

    // evolution defect decays at second order
    let h = 1e-3;
    let d1 = spectral::check_evolution(&op, &family, s, t, &u, h, tol)?;
    let d2 = spectral::check_evolution(&op, &family, s, t, &u, h / 2.0, tol)?;
    let d3 = spectral::check_evolution(&op, &family, s, t, &u, h / 4.0, tol)?;
    let ratio1 = d1 / d2;
    let ratio2 = d2 / d3;
    record(
        &mut w,
        summary,
        "evolution_defect_ratio_1",
        ratio1,
        4.0,
        (3.5..=4.5).contains(&ratio1),
    )?;
    record(
        &mut w,
        summary,
        "evolution_defect_ratio_2",
        ratio2,
        4.0,
        (3.5..=4.5).contains(&ratio2),
    )?;
    w.finish()?;
    Ok(())
}

fn msd(
    config: &ExperimentConfig,
    dir: &Path,
    threads: usize,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    let target = subbm::msd_quadrature(&family, config.t, config.dims, config.quad_tol)?;
    let master = RngStream::new(config.seed, 0);
    let diverges = target.is_divergent();
    let chunks = parallel::run_chunked(config.n_paths as u64, threads, |range| {
        subbm::msd_mc_range(&family, config.gamma, config.t, config.dims, range, master, diverges)
    })
    .map_err(RunError::from)?;
    let values: Vec<f64> = chunks.into_iter().flatten().collect();

    let mut w = ResultsWriter::create(
        &dir.join("results.csv"),
        "t,msd_estimate,se,target",
        &meta(config),
    )?;
    if diverges {
        let k = (config.n_paths / 100).max(10);
        let hill = stats::hill_tail_index(&values, k);
        w.row(&["".into(), "".into(), "".into(), "divergent".into()])?;
        w.finish()?;
        summary.put("verdict", "divergent");
        summary.put("hill_tail_index", hill);
        summary.check("heavy_tail_index_below_one", hill < 1.0);
    } else {
        let (mean, se) = stats::mean_se(&values);
        let tv = target.finite().expect("finite by branch");
        w.row(&[fmt(config.t), fmt(mean), fmt(se), fmt(tv)])?;
        w.finish()?;
        summary.put("estimate", mean);
        summary.put("se", se);
        summary.put("target", tv);
        summary.check("msd_within_se", math::abs(mean - tv) <= config.se_mult * se);
    }

    let report = subbm::classify_regime(&family, config.family_horizon().min(1024.0))?;
    summary.put("regime", regime_name(&report.verdict));
    for (t, v) in &report.probes {
        match v {
            ExtReal::Finite(x) => summary.put(&format!("probe_{t}"), x),
            ExtReal::Divergent => summary.put(&format!("probe_{t}"), "divergent"),
        }
    }
    Ok(())
}

fn regime_name(r: &Regime) -> String {
    match r {
        Regime::Diffusive(c) => format!("diffusive({c})"),
        Regime::Superdiffusive => "superdiffusive".into(),
        Regime::Subdiffusive => "subdiffusive".into(),
        Regime::Infinite => "infinite".into(),
    }
}

fn charfun(
    config: &ExperimentConfig,
    dir: &Path,
    threads: usize,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    let xis: Vec<Vec<f64>> = config
        .xi_norms
        .iter()
        .map(|&norm| {
            let mut v = vec![0.0; config.dims];
            v[0] = norm;
            v
        })
        .collect();
    let master = RngStream::new(config.seed, 0);
    let chunks = parallel::run_chunked(config.n_paths as u64, threads, |range| {
        subbm::charfun_accumulate(&family, config.gamma, config.s, config.t, &xis, range, master)
    })
    .map_err(RunError::from)?;
    let mut acc: Option<CharFunAccumulator> = None;
    for c in &chunks {
        acc = Some(match acc {
            None => c.clone(),
            Some(a) => a.merge(c),
        });
    }
    let rows = acc.expect("chunks").finish(&family, config.s, config.t, &xis)?;

    let mut w = ResultsWriter::create(
        &dir.join("results.csv"),
        "xi,re,im,target_re,se",
        &meta(config),
    )?;
    let mut all = true;
    let mut max_z: f64 = 0.0;
    for r in &rows {
        let z_re = if r.re_se > 0.0 { (r.re - r.target) / r.re_se } else { 0.0 };
        let z_im = if r.im_se > 0.0 { r.im / r.im_se } else { 0.0 };
        all &= math::abs(z_re) <= config.se_mult && math::abs(z_im) <= config.se_mult;
        max_z = max_z.max(math::abs(z_re)).max(math::abs(z_im));
        w.row(&[fmt(r.xi[0]), fmt(r.re), fmt(r.im), fmt(r.target), fmt(r.re_se)])?;
    }
    w.finish()?;
    summary.put("max_abs_z", max_z);
    summary.check("charfun_within_se", all);
    Ok(())
}

fn localize(
    config: &ExperimentConfig,
    dir: &Path,
    summary: &mut Summary,
) -> Result<(), RunError> {
    let family = build_family(config)?;
    let master = RngStream::new(config.seed, 0);
    let mut rescaled = sampler::localize_increments(
        &family,
        config.gamma,
        config.t0,
        config.r,
        config.big_t,
        config.n_paths,
        master,
    )?;
    let alpha0 = match family.kind() {
        FamilyKind::Multistable { alpha } => alpha.eval(config.t0),
        _ => unreachable!("localize requires multistable"),
    };
    let mut oracle: Vec<f64> = (0..config.n_paths as u64)
        .map(|i| {
            let mut rng = master.substream(sampler::domain::ORACLE, i);
            stable::sample_scaled(alpha0, config.big_t, &mut rng)
        })
        .collect();
    oracle.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    rescaled.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());

    let ks = stats::ks_two_sample_sorted(&rescaled, &oracle);
    let mut w = ResultsWriter::create(
        &dir.join("results.csv"),
        "quantile,localized,stable",
        &meta(config),
    )?;
    for k in 1..200 {
        let p = k as f64 / 200.0;
        let qi = ((rescaled.len() as f64 * p) as usize).min(rescaled.len() - 1);
        w.row(&[fmt(p), fmt(rescaled[qi]), fmt(oracle[qi])])?;
    }
    w.finish()?;
    summary.put("alpha_t0", alpha0);
    summary.put("ks_two_sample", ks);
    summary.check("localize_ks", ks <= config.check_tol);
    Ok(())
}
