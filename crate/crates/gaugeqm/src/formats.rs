//! Text, CSV and JSON encodings used by the command-line tool.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! writer/reader pair reproduces values bit for bit.

use std::fmt::Write as _;

use gaugeqm_core::gauge::{LatticePath, TabulatedField};
use gaugeqm_core::lattice::{Boundary, Grid1D, Wavefunction};
use gaugeqm_core::linalg::CMatrix;
use gaugeqm_core::measurement::MeasurementDistribution;
use gaugeqm_core::path::{LevelResult, PropagatorMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::report::SeriesPoint;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] gaugeqm_core::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

const FIELD_MAGIC: &str = "# gaugeqm tabulated-field v1";

/// Tabulated field text format:
///
/// ```text
/// # gaugeqm tabulated-field v1
/// dim 2
/// t <t_min> <t_max> <t_samples>
/// x <x_min> <x_max> <x_samples>
/// phi <i> <j> <re> <im> <re> <im> ...
/// a <i> <j> <re> <im> ...
/// ```
///
/// One `phi` and one `a` line per sample `(t_i, x_j)`, entries row-major.
/// Lines starting with `#` after the header are comments.
pub fn write_tabulated_field(table: &TabulatedField) -> String {
    let mut s = String::new();
    writeln!(s, "{FIELD_MAGIC}").unwrap();
    writeln!(s, "dim {}", table.dim).unwrap();
    writeln!(s, "t {} {} {}", table.t_range.0, table.t_range.1, table.t_samples).unwrap();
    writeln!(s, "x {} {} {}", table.x_range.0, table.x_range.1, table.x_samples).unwrap();
    for i in 0..table.t_samples {
        for j in 0..table.x_samples {
            let (phi, a) = &table.samples[i * table.x_samples + j];
            for (tag, m) in [("phi", phi), ("a", a)] {
                write!(s, "{tag} {i} {j}").unwrap();
                for r in 0..table.dim {
                    for c in 0..table.dim {
                        write!(s, " {} {}", m[(r, c)].re, m[(r, c)].im).unwrap();
                    }
                }
                s.push('\n');
            }
        }
    }
    s
}

pub fn parse_tabulated_field(text: &str) -> Result<TabulatedField, FormatError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, l)) if l == FIELD_MAGIC => {}
        Some((k, _)) => return Err(parse_err(k, format!("expected header `{FIELD_MAGIC}`"))),
        None => return Err(parse_err(0, "empty file")),
    }
    let mut lines = lines.filter(|(_, l)| !l.starts_with('#'));
    let mut header = |key: &str| -> Result<(usize, Vec<String>), FormatError> {
        let (k, l) = lines.next().ok_or_else(|| parse_err(0, format!("missing `{key}` line")))?;
        let mut it = l.split_whitespace();
        if it.next() != Some(key) {
            return Err(parse_err(k, format!("expected `{key}`")));
        }
        Ok((k, it.map(str::to_owned).collect()))
    };
    let (k, dim) = header("dim")?;
    let dim: usize = one(&dim, k)?;
    let (kt, t) = header("t")?;
    let (kx, x) = header("x")?;
    let (t0, t1, nt) = range(&t, kt)?;
    let (x0, x1, nx) = range(&x, kx)?;
    let mut samples = vec![(CMatrix::zeros(dim, dim), CMatrix::zeros(dim, dim)); nt * nx];
    let mut seen = vec![[false; 2]; nt * nx];
    for (k, l) in lines {
        let tok: Vec<&str> = l.split_whitespace().collect();
        let slot = match tok.first() {
            Some(&"phi") => 0,
            Some(&"a") => 1,
            _ => return Err(parse_err(k, "expected `phi` or `a`")),
        };
        if tok.len() != 3 + 2 * dim * dim {
            return Err(parse_err(k, format!("expected {} numbers", 2 + 2 * dim * dim)));
        }
        let i: usize = num(tok[1], k)?;
        let j: usize = num(tok[2], k)?;
        if i >= nt || j >= nx {
            return Err(parse_err(k, "sample index out of range"));
        }
        let idx = i * nx + j;
        if seen[idx][slot] {
            return Err(parse_err(k, "duplicate sample"));
        }
        seen[idx][slot] = true;
        let vals = tok[3..].iter().map(|v| num::<f64>(v, k)).collect::<Result<Vec<_>, _>>()?;
        let m = CMatrix::from_fn(dim, dim, |r, c| Complex64::new(vals[2 * (r * dim + c)], vals[2 * (r * dim + c) + 1]));
        if slot == 0 {
            samples[idx].0 = m;
        } else {
            samples[idx].1 = m;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !(s[0] && s[1])) {
        return Err(parse_err(0, format!("sample ({}, {}) is incomplete", missing / nx, missing % nx)));
    }
    Ok(TabulatedField::new(dim, (t0, t1), nt, (x0, x1), nx, samples)?)
}

fn num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, FormatError> {
    s.parse().map_err(|_| parse_err(line, format!("cannot parse `{s}`")))
}

fn one<T: std::str::FromStr>(tok: &[String], line: usize) -> Result<T, FormatError> {
    match tok {
        [v] => num(v, line),
        _ => Err(parse_err(line, "expected one value")),
    }
}

fn range(tok: &[String], line: usize) -> Result<(f64, f64, usize), FormatError> {
    match tok {
        [a, b, n] => Ok((num(a, line)?, num(b, line)?, num(n, line)?)),
        _ => Err(parse_err(line, "expected `<min> <max> <samples>`")),
    }
}

/// Path file: one `t x` pair per line, `#` comments and blank lines ignored.
pub fn parse_path(text: &str) -> Result<LatticePath, FormatError> {
    let mut points = Vec::new();
    for (k, l) in text.lines().enumerate() {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 2 {
            return Err(parse_err(k + 1, "expected `t x`"));
        }
        points.push((num(tok[0], k + 1)?, num(tok[1], k + 1)?));
    }
    Ok(LatticePath::new(points)?)
}

pub fn write_path(path: &LatticePath) -> String {
    let mut s = String::from("# t x\n");
    for (t, x) in path.points() {
        writeln!(s, "{t} {x}").unwrap();
    }
    s
}

/// Dense complex matrix, row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixDump {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let entries = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c)));
        Self {
            rows,
            cols,
            re: entries.clone().map(|(r, c)| m[(r, c)].re).collect(),
            im: entries.map(|(r, c)| m[(r, c)].im).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, FormatError> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(parse_err(0, format!("matrix dump needs {n} real and imaginary entries")));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |r, c| Complex64::new(self.re[r * self.cols + c], self.im[r * self.cols + c])))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryName {
    Periodic,
    Reflecting,
}

impl From<Boundary> for BoundaryName {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Periodic => BoundaryName::Periodic,
            Boundary::Reflecting => BoundaryName::Reflecting,
        }
    }
}

impl From<BoundaryName> for Boundary {
    fn from(b: BoundaryName) -> Self {
        match b {
            BoundaryName::Periodic => Boundary::Periodic,
            BoundaryName::Reflecting => Boundary::Reflecting,
        }
    }
}

/// JSON form of a lattice wave function; `sites[i]` is the matrix at `x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub time: f64,
    pub dim: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub n_sites: usize,
    pub boundary: BoundaryName,
    pub sites: Vec<MatrixDump>,
}

impl StateDump {
    pub fn from_state(psi: &Wavefunction) -> Self {
        let g = psi.grid();
        Self {
            time: psi.time(),
            dim: psi.dim(),
            x_min: g.x_min(),
            x_max: g.x_max(),
            n_sites: g.n_sites(),
            boundary: g.boundary().into(),
            sites: (0..g.n_sites()).map(|i| MatrixDump::from_matrix(&psi.site_matrix(i))).collect(),
        }
    }

    pub fn to_state(&self) -> Result<Wavefunction, FormatError> {
        let grid = Grid1D::new(self.x_min, self.x_max, self.n_sites, self.boundary.into())?;
        if self.sites.len() != self.n_sites {
            return Err(parse_err(0, format!("expected {} sites, found {}", self.n_sites, self.sites.len())));
        }
        let mut data = Vec::with_capacity(self.n_sites * self.dim * self.dim);
        for s in &self.sites {
            if s.rows != self.dim || s.cols != self.dim {
                return Err(parse_err(0, "site matrix has the wrong shape"));
            }
            let m = s.to_matrix()?;
            for r in 0..self.dim {
                for c in 0..self.dim {
                    data.push(m[(r, c)]);
                }
            }
        }
        Ok(Wavefunction::from_data(grid, self.dim, self.time, data)?)
    }
}

pub fn state_to_json(psi: &Wavefunction) -> String {
    serde_json::to_string_pretty(&StateDump::from_state(psi)).expect("state dump serialises")
}

pub fn state_from_json(text: &str) -> Result<Wavefunction, FormatError> {
    serde_json::from_str::<StateDump>(text)?.to_state()
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string_pretty(&MatrixDump::from_matrix(m)).expect("matrix dump serialises")
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix, FormatError> {
    serde_json::from_str::<MatrixDump>(text)?.to_matrix()
}

pub const SERIES_HEADER: &str = "step,time,total_probability,mean_position,width";

/// Scalar trajectory series.
pub fn series_csv(series: &[SeriesPoint]) -> String {
    let mut s = format!("{SERIES_HEADER}\n");
    for p in series {
        writeln!(s, "{},{},{},{},{}", p.step, p.time, p.total_probability, p.mean_position, p.width).unwrap();
    }
    s
}

/// Per-site density snapshots in long form: `step,time,site,x,density`.
pub fn density_csv(snapshots: &[(usize, f64, Vec<f64>)], grid: &Grid1D) -> String {
    let mut s = String::from("step,time,site,x,density\n");
    for (step, time, density) in snapshots {
        for (i, d) in density.iter().enumerate() {
            writeln!(s, "{step},{time},{i},{},{d}", grid.x(i)).unwrap();
        }
    }
    s
}

pub fn distances_csv(levels: &[LevelResult]) -> String {
    let mut s = String::from("epsilon,n_sites,distance\n");
    for l in levels {
        writeln!(s, "{},{},{}", l.epsilon, l.n_sites, l.distance).unwrap();
    }
    s
}

pub fn measurement_csv(dist: &MeasurementDistribution) -> String {
    let mut s = String::from("eigenvalue,probability\n");
    for (v, p) in dist.probabilities() {
        writeln!(s, "{v},{p}").unwrap();
    }
    s
}

/// Site-pair indexed propagator entries: `i,j,row,col,re,im` for the
/// `N x N` block coupling source site `j` into target site `i`.
pub fn propagator_csv(k: &PropagatorMatrix) -> String {
    let n = k.dim();
    let sites = k.grid().n_sites();
    let mut s = String::from("i,j,row,col,re,im\n");
    for i in 0..sites {
        for j in 0..sites {
            let b = k.block(i, j);
            for r in 0..n {
                for c in 0..n {
                    let z = b.matrix()[(r, c)];
                    writeln!(s, "{i},{j},{r},{c},{},{}", z.re, z.im).unwrap();
                }
            }
        }
    }
    s
}

/// Reads back a two-column numeric CSV with a header line.
pub fn parse_pairs_csv(text: &str) -> Result<Vec<(f64, f64)>, FormatError> {
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| match l.split(',').collect::<Vec<_>>().as_slice() {
            [a, b] => Ok((num(a.trim(), k + 1)?, num(b.trim(), k + 1)?)),
            _ => Err(parse_err(k + 1, "expected two columns")),
        })
        .collect()
}
