//! Artifact formats.
//!
//! All CSVs start with `# nhsub v1`, use `.` decimals and LF endings, and are
//! written with shortest-roundtrip float formatting so identical inputs give
//! byte-identical files. Paths use `# nhsub-path v1` with `time,size` columns
//! and metadata comment lines; density fields use long-format `x,t,q` plus a
//! compact binary dump (the two grid descriptors, then row-major little-endian
//! f64 values) for test fixtures.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nhsub_core::fracpde::{DensityField, FieldKind, SpaceTimeGrid};
use nhsub_core::sampler::SubordinatorPath;

pub const HEADER: &str = "# nhsub v1";
pub const PATH_HEADER: &str = "# nhsub-path v1";

pub fn write_path_csv(
    path: &SubordinatorPath,
    seed: u64,
    file: &Path,
) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(file)?);
    writeln!(w, "{PATH_HEADER}")?;
    writeln!(w, "# family={}", path.family_id())?;
    writeln!(w, "# gamma={}", path.truncation())?;
    writeln!(w, "# horizon={}", path.horizon())?;
    writeln!(w, "# seed={seed}")?;
    writeln!(w, "time,size")?;
    for (t, x) in path.jumps() {
        writeln!(w, "{t},{x}")?;
    }
    w.flush()
}

/// Long-format `x,t,q` rows for the stored times of a field.
pub fn write_field_csv(field: &DensityField, meta: &[(String, String)], file: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(file)?);
    writeln!(w, "{HEADER}")?;
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "# kind={}", kind_name(field.kind))?;
    writeln!(w, "x,t,q")?;
    let first = field.first_row();
    for k in first..=field.grid.n_t {
        let t = field.grid.time(k);
        for i in 0..field.grid.n_x {
            writeln!(w, "{},{t},{}", field.grid.x_center(i), field.value(i, k))?;
        }
    }
    w.flush()
}

fn kind_name(kind: FieldKind) -> &'static str {
    match kind {
        FieldKind::SubordinatorDensity => "subordinator_density",
        FieldKind::InverseDensity => "inverse_density",
    }
}

/// Binary dump: x_max f64, n_x u64, t_max f64, n_t u64, then the full
/// (n_t+1)×n_x value matrix row-major, all little-endian.
pub fn write_field_binary(field: &DensityField, file: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(file)?);
    w.write_all(&field.grid.x_max.to_le_bytes())?;
    w.write_all(&(field.grid.n_x as u64).to_le_bytes())?;
    w.write_all(&field.grid.t_max.to_le_bytes())?;
    w.write_all(&(field.grid.n_t as u64).to_le_bytes())?;
    for k in 0..=field.grid.n_t {
        for i in 0..field.grid.n_x {
            w.write_all(&field.value(i, k).to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn read_field_binary(file: &Path) -> io::Result<(SpaceTimeGrid, Vec<f64>)> {
    let mut r = BufReader::new(File::open(file)?);
    let x_max = read_f64(&mut r)?;
    let n_x = read_u64(&mut r)? as usize;
    let t_max = read_f64(&mut r)?;
    let n_t = read_u64(&mut r)? as usize;
    let grid = SpaceTimeGrid::new(x_max, n_x, t_max, n_t)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    let mut values = Vec::with_capacity((n_t + 1) * n_x);
    for _ in 0..(n_t + 1) * n_x {
        values.push(read_f64(&mut r)?);
    }
    Ok((grid, values))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Tabulated density input for custom families: CSV with columns `s,t,nu`
/// covering a full rectangular grid.
pub fn read_density_table(file: &Path) -> io::Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let r = BufReader::new(File::open(file)?);
    let mut triples: Vec<(f64, f64, f64)> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('s') {
            continue;
        }
        let cols: Vec<&str> = trimmed.split(',').collect();
        if cols.len() != 3 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("line {}: expected s,t,nu", idx + 1),
            ));
        }
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| {
                io::Error::new(io::ErrorKind::InvalidData, format!("bad number '{s}'"))
            })
        };
        triples.push((parse(cols[0])?, parse(cols[1])?, parse(cols[2])?));
    }
    let mut s_grid: Vec<f64> = triples.iter().map(|t| t.0).collect();
    s_grid.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    s_grid.dedup();
    let mut t_grid: Vec<f64> = triples.iter().map(|t| t.1).collect();
    t_grid.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    t_grid.dedup();
    if triples.len() != s_grid.len() * t_grid.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "density table must cover a full rectangular grid",
        ));
    }
    let find = |grid: &[f64], v: f64| grid.iter().position(|g| *g == v).expect("grid member");
    let mut values = vec![0.0; triples.len()];
    for (s, t, nu) in triples {
        let i = find(&s_grid, s);
        let j = find(&t_grid, t);
        values[i * t_grid.len() + j] = nu;
    }
    Ok((s_grid, t_grid, values))
}

/// Eigenpair dump for spectral operators: one `lambda,v1,...,vn` row per
/// eigenpair, n rows total.
pub fn read_eigenpairs(file: &Path) -> io::Result<(Vec<f64>, Vec<f64>)> {
    let r = BufReader::new(File::open(file)?);
    let mut eigenvalues = Vec::new();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with("lambda") {
            continue;
        }
        let nums: Result<Vec<f64>, _> = t.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidData, format!("line {}: bad number", idx + 1))
        })?;
        if nums.len() < 2 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("line {}: expected lambda,v1,...,vn", idx + 1),
            ));
        }
        eigenvalues.push(nums[0]);
        vectors.push(nums[1..].to_vec());
    }
    let dim = eigenvalues.len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "eigenvector length must equal the number of eigenpairs",
        ));
    }
    let mut flat = Vec::with_capacity(dim * dim);
    for v in vectors {
        flat.extend(v);
    }
    Ok((eigenvalues, flat))
}

/// A simple aligned-column CSV writer for results files.
pub struct ResultsWriter {
    w: BufWriter<File>,
}

impl ResultsWriter {
    pub fn create(file: &Path, columns: &str, meta: &[(String, String)]) -> io::Result<Self> {
        let mut w = BufWriter::new(File::create(file)?);
        writeln!(w, "{HEADER}")?;
        for (k, v) in meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{columns}")?;
        Ok(ResultsWriter { w })
    }

    pub fn row(&mut self, cells: &[String]) -> io::Result<()> {
        writeln!(self.w, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.w.flush()
    }
}

pub fn fmt(v: f64) -> String {
    format!("{v}")
}
