//! Line-oriented `key = value` experiment configuration.
//!
//! The format is deliberately flat and diff-friendly: `#` starts a comment,
//! keys may appear once, unknown keys are rejected, and parsing reports every
//! error it finds (with line numbers) rather than stopping at the first.

use std::collections::BTreeMap;
use std::path::PathBuf;

use nhsub_core::family::{Activity, LevyFamily};
use nhsub_core::TimeVaryingIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Simulate,
    LaplaceCheck,
    Pde,
    Inverse,
    InverseResidual,
    Propagator,
    Msd,
    CharFun,
    Localize,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::LaplaceCheck => "laplace-check",
            Experiment::Pde => "pde",
            Experiment::Inverse => "inverse",
            Experiment::InverseResidual => "inverse-residual",
            Experiment::Propagator => "propagator",
            Experiment::Msd => "msd",
            Experiment::CharFun => "charfun",
            Experiment::Localize => "localize",
        }
    }

    fn parse(s: &str) -> Option<Experiment> {
        Some(match s {
            "simulate" => Experiment::Simulate,
            "laplace-check" => Experiment::LaplaceCheck,
            "pde" => Experiment::Pde,
            "inverse" => Experiment::Inverse,
            "inverse-residual" => Experiment::InverseResidual,
            "propagator" => Experiment::Propagator,
            "msd" => Experiment::Msd,
            "charfun" => Experiment::CharFun,
            "localize" => Experiment::Localize,
            _ => return None,
        })
    }
}

/// Index-function grammar: `constant c`, `affine a b lo hi`,
/// `sinusoidal base amp [omega [phase]]`, `tabulated t:v,t:v,...`.
#[derive(Debug, Clone)]
pub struct IndexSpec(pub TimeVaryingIndex);

impl IndexSpec {
    fn parse(s: &str) -> Result<IndexSpec, String> {
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or("empty index description")?;
        let rest: Vec<&str> = parts.collect();
        let nums = |n: usize| -> Result<Vec<f64>, String> {
            if rest.len() != n {
                return Err(format!("'{kind}' expects {n} parameters, got {}", rest.len()));
            }
            rest.iter().map(|v| parse_f64(v)).collect()
        };
        let idx = match kind {
            "constant" => TimeVaryingIndex::constant(nums(1)?[0]),
            "affine" => {
                let v = nums(4)?;
                TimeVaryingIndex::affine_clamped(v[0], v[1], v[2], v[3])
            }
            "sinusoidal" => {
                if rest.len() < 2 || rest.len() > 4 {
                    return Err("'sinusoidal' expects base amp [omega [phase]]".into());
                }
                let v: Vec<f64> =
                    rest.iter().map(|x| parse_f64(x)).collect::<Result<_, _>>()?;
                TimeVaryingIndex::sinusoidal(
                    v[0],
                    v[1],
                    v.get(2).copied().unwrap_or(1.0),
                    v.get(3).copied().unwrap_or(0.0),
                )
            }
            "tabulated" => {
                if rest.len() != 1 {
                    return Err("'tabulated' expects one t:v,t:v,... list".into());
                }
                let mut pts = Vec::new();
                for pair in rest[0].split(',') {
                    let (a, b) = pair
                        .split_once(':')
                        .ok_or_else(|| format!("bad tabulated pair '{pair}'"))?;
                    pts.push((parse_f64(a)?, parse_f64(b)?));
                }
                TimeVaryingIndex::tabulated(pts).map_err(|e| e.to_string())?
            }
            other => return Err(format!("unknown index kind '{other}'")),
        };
        Ok(IndexSpec(idx))
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "+inf" => return Ok(f64::INFINITY),
        _ => {}
    }
    s.parse::<f64>().map_err(|_| format!("not a number: '{s}'"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Multistable,
    GammaLike,
    Tempered,
    DriftOnly,
    CustomTable,
}

#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub name: FamilyName,
    pub alpha: Option<IndexSpec>,
    pub theta: Option<IndexSpec>,
    pub drift: Option<IndexSpec>,
    pub density_csv: Option<PathBuf>,
}

impl FamilySpec {
    /// Builds the family, surfacing index-range violations with their probe
    /// location.
    pub fn build(&self, horizon: f64) -> Result<LevyFamily, String> {
        let need = |o: &Option<IndexSpec>, what: &str| -> Result<TimeVaryingIndex, String> {
            o.as_ref().map(|s| s.0.clone()).ok_or_else(|| format!("family requires '{what}'"))
        };
        match self.name {
            FamilyName::Multistable => {
                LevyFamily::multistable(need(&self.alpha, "alpha")?, horizon)
                    .map_err(|e| map_index_err(e))
            }
            FamilyName::GammaLike => LevyFamily::gamma_like(need(&self.alpha, "alpha")?, horizon)
                .map_err(|e| map_index_err(e)),
            FamilyName::Tempered => LevyFamily::tempered_stable(
                need(&self.alpha, "alpha")?,
                need(&self.theta, "theta")?,
                horizon,
            )
            .map_err(|e| map_index_err(e)),
            FamilyName::DriftOnly => LevyFamily::drift_only(need(&self.drift, "drift")?, horizon)
                .map_err(|e| map_index_err(e)),
            FamilyName::CustomTable => {
                let path = self
                    .density_csv
                    .as_ref()
                    .ok_or("custom-table family requires 'density_csv'")?;
                let (s_grid, t_grid, values) =
                    crate::csvio::read_density_table(path).map_err(|e| e.to_string())?;
                LevyFamily::from_table(
                    s_grid,
                    t_grid,
                    values,
                    self.drift.as_ref().map(|d| d.0.clone()),
                    horizon,
                )
                .map_err(|e| e.to_string())
            }
        }
    }

    /// Activity is only advisory for custom tables (finite support).
    pub fn activity(&self) -> Activity {
        match self.name {
            FamilyName::DriftOnly | FamilyName::CustomTable => Activity::Finite,
            _ => Activity::Infinite,
        }
    }
}

fn map_index_err(e: nhsub_core::Error) -> String {
    match e {
        nhsub_core::Error::IndexRange { t, value } => {
            format!("index out of (0,1): value {value} at t = {t}")
        }
        other => other.to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub family: FamilySpec,
    pub horizon: f64,
    pub gamma: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub t: f64,
    pub s: f64,
    pub lambdas: Vec<f64>,
    pub xi_norms: Vec<f64>,
    pub dims: usize,
    pub x_max: f64,
    pub n_x: usize,
    pub t_max: f64,
    pub n_t: usize,
    pub substeps: usize,
    pub t_start: Option<f64>,
    pub outflow_budget: f64,
    pub r: f64,
    pub t0: f64,
    pub big_t: f64,
    pub n_pieces: usize,
    pub bandwidth: f64,
    pub nodes: usize,
    pub length: Option<f64>,
    pub eigen_csv: Option<PathBuf>,
    pub eps_split: f64,
    pub quad_tol: f64,
    pub check_tol: f64,
    pub se_mult: f64,
    pub probe_lo: f64,
    pub probe_hi: f64,
    pub dump_paths: usize,
    pub outdir: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "family",
    "alpha",
    "theta",
    "drift",
    "density_csv",
    "horizon",
    "gamma",
    "n_paths",
    "seed",
    "t",
    "s",
    "lambda",
    "xi",
    "dims",
    "x_max",
    "n_x",
    "t_max",
    "n_t",
    "substeps",
    "t_start",
    "outflow_budget",
    "r",
    "t0",
    "T",
    "n_pieces",
    "bandwidth",
    "nodes",
    "length",
    "eigen_csv",
    "eps_split",
    "quad_tol",
    "check_tol",
    "se_mult",
    "probe_lo",
    "probe_hi",
    "dump_paths",
    "outdir",
];

/// Parses and validates; returns either the config or every error found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<String>> {
    let mut errors = Vec::new();
    let mut seen: BTreeMap<String, (usize, String)> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errors.push(format!("line {line_no}: expected 'key = value'"));
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            errors.push(format!("line {line_no}: unknown key '{key}'"));
            continue;
        }
        if let Some((first_line, _)) = seen.get(&key) {
            errors.push(format!(
                "line {line_no}: duplicate key '{key}' (first set on line {first_line})"
            ));
            continue;
        }
        seen.insert(key, (line_no, value));
    }

    let get = |k: &str| seen.get(k).map(|(l, v)| (*l, v.clone()));

    macro_rules! typed {
        ($key:expr, $default:expr, $parse:expr) => {
            match get($key) {
                None => $default,
                Some((line, v)) => match $parse(&v) {
                    Ok(x) => x,
                    Err(e) => {
                        errors.push(format!("line {line}: {}: {e}", $key));
                        $default
                    }
                },
            }
        };
    }

    let parse_usize =
        |v: &str| v.parse::<usize>().map_err(|_| format!("not a positive integer: '{v}'"));
    let parse_u64 = |v: &str| v.parse::<u64>().map_err(|_| format!("not an integer: '{v}'"));
    let parse_list = |v: &str| -> Result<Vec<f64>, String> {
        v.split(',').map(|p| parse_f64(p.trim())).collect()
    };

    let experiment = match get("experiment") {
        None => {
            errors.push("missing required key 'experiment'".into());
            Experiment::Simulate
        }
        Some((line, v)) => match Experiment::parse(&v) {
            Some(e) => e,
            None => {
                errors.push(format!("line {line}: unknown experiment '{v}'"));
                Experiment::Simulate
            }
        },
    };

    let family_name = match get("family") {
        None => {
            errors.push("missing required key 'family'".into());
            FamilyName::Multistable
        }
        Some((line, v)) => match v.as_str() {
            "multistable" => FamilyName::Multistable,
            "gammalike" => FamilyName::GammaLike,
            "tempered" => FamilyName::Tempered,
            "driftonly" => FamilyName::DriftOnly,
            "custom-table" => FamilyName::CustomTable,
            other => {
                errors.push(format!("line {line}: unknown family '{other}'"));
                FamilyName::Multistable
            }
        },
    };

    let parse_index = |v: &str| IndexSpec::parse(v);
    let alpha = typed!("alpha", None, |v: &str| parse_index(v).map(Some));
    let theta = typed!("theta", None, |v: &str| parse_index(v).map(Some));
    let drift = typed!("drift", None, |v: &str| parse_index(v).map(Some));
    let density_csv =
        typed!("density_csv", None, |v: &str| Ok::<_, String>(Some(PathBuf::from(v))));

    let config = ExperimentConfig {
        experiment,
        family: FamilySpec { name: family_name, alpha, theta, drift, density_csv },
        horizon: typed!("horizon", 2.0, parse_f64),
        gamma: typed!("gamma", 1e-6, parse_f64),
        n_paths: typed!("n_paths", 100_000, parse_usize),
        seed: typed!("seed", 42, parse_u64),
        t: typed!("t", 1.0, parse_f64),
        s: typed!("s", 0.0, parse_f64),
        lambdas: typed!("lambda", vec![0.5, 1.0, 2.0, 4.0], parse_list),
        xi_norms: typed!("xi", vec![0.5, 1.0, 2.0], parse_list),
        dims: typed!("dims", 1, parse_usize),
        x_max: typed!("x_max", 8.0, parse_f64),
        n_x: typed!("n_x", 1024, parse_usize),
        t_max: typed!("t_max", 1.0, parse_f64),
        n_t: typed!("n_t", 50, parse_usize),
        substeps: typed!("substeps", 8, parse_usize),
        t_start: typed!("t_start", None, |v: &str| parse_f64(v).map(Some)),
        outflow_budget: typed!("outflow_budget", 0.01, parse_f64),
        r: typed!("r", 1e-3, parse_f64),
        t0: typed!("t0", 1.0, parse_f64),
        big_t: typed!("T", 1.0, parse_f64),
        n_pieces: typed!("n_pieces", 16, parse_usize),
        bandwidth: typed!("bandwidth", 0.02, parse_f64),
        nodes: typed!("nodes", 16, parse_usize),
        length: typed!("length", None, |v: &str| parse_f64(v).map(Some)),
        eigen_csv: typed!("eigen_csv", None, |v: &str| Ok::<_, String>(Some(PathBuf::from(v)))),
        eps_split: typed!("eps_split", 1e-4, parse_f64),
        quad_tol: typed!("quad_tol", 1e-8, parse_f64),
        check_tol: typed!("check_tol", 0.02, parse_f64),
        se_mult: typed!("se_mult", 3.0, parse_f64),
        probe_lo: typed!("probe_lo", 0.05, parse_f64),
        probe_hi: typed!("probe_hi", 10.0, parse_f64),
        dump_paths: typed!("dump_paths", 1, parse_usize),
        outdir: typed!("outdir", None, |v: &str| Ok::<_, String>(Some(PathBuf::from(v)))),
    };

    // semantic validation: ranges first, then the family construction so
    // index-range violations surface with their probe location
    if config.gamma <= 0.0 {
        errors.push("gamma must be positive".into());
    }
    if config.horizon <= 0.0 {
        errors.push("horizon must be positive".into());
    }
    if config.n_paths == 0 {
        errors.push("n_paths must be at least 1".into());
    }
    if config.s > config.t {
        errors.push("window start s must not exceed t".into());
    }
    if config.lambdas.iter().any(|l| *l < 0.0) {
        errors.push("lambda values must be nonnegative".into());
    }
    if errors.is_empty() {
        if let Err(e) = config.family.build(config.family_horizon()) {
            errors.push(e);
        }
    }

    if errors.is_empty() {
        Ok(config)
    } else {
        Err(errors)
    }
}

impl ExperimentConfig {
    /// The horizon the family must cover for this experiment.
    pub fn family_horizon(&self) -> f64 {
        let base = self.horizon.max(self.t).max(self.t_max).max(self.s);
        match self.experiment {
            Experiment::Localize => base.max(self.t0 + self.r * self.big_t),
            Experiment::Msd => base.max(1024.0),
            _ => base,
        }
    }

    pub fn build_family(&self) -> Result<LevyFamily, String> {
        self.family.build(self.family_horizon())
    }
}
