//! TOML experiment description.
//!
//! Every field has an explicit default, and [`ExperimentConfig::echo`]
//! writes all of them back out, so a saved config fully describes a run.

use std::path::{Path, PathBuf};

use gaugeqm_core::lattice::MIN_SITES;
use gaugeqm_core::lie::{su_basis, u_basis, AlgebraBasis};
use gaugeqm_core::path::{MidpointRule, Normalization, Taper};
use gaugeqm_core::pde::Scheme;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, Failure};
use crate::formats::{self, BoundaryName};

/// Largest lattice any single level may use.
pub const MAX_SITES: usize = 16384;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub route: Route,
    pub t_final: f64,
    /// Snapshot every this many steps; 0 keeps the first and last only.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub group: GroupSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub pde: PdeSpec,
    #[serde(default)]
    pub path: PathSpec,
    #[serde(default)]
    pub field: FieldSpec,
    #[serde(default)]
    pub initial: InitialSpec,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("gaugeqm-out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    #[default]
    Pde,
    Path,
    Both,
}

impl Route {
    pub fn uses_pde(self) -> bool {
        matches!(self, Route::Pde | Route::Both)
    }

    pub fn uses_path(self) -> bool {
        matches!(self, Route::Path | Route::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    /// `su(n)`, traceless generators.
    Su,
    /// `u(n)`, adds the central generator.
    U,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub n: usize,
}

impl Default for GroupSpec {
    fn default() -> Self {
        Self { kind: GroupKind::U, n: 1 }
    }
}

impl GroupSpec {
    pub fn label(&self) -> String {
        match self.kind {
            GroupKind::Su => format!("su({})", self.n),
            GroupKind::U => format!("u({})", self.n),
        }
    }

    pub fn basis(&self) -> Result<AlgebraBasis, gaugeqm_core::Error> {
        match self.kind {
            GroupKind::Su => su_basis(self.n),
            GroupKind::U => u_basis(self.n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_sites: usize,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryName,
}

fn default_boundary() -> BoundaryName {
    BoundaryName::Periodic
}

impl GridSpec {
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_sites as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub mass: f64,
    pub hbar: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    CrankNicolson,
    SplitStep,
}

impl From<SchemeName> for Scheme {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::CrankNicolson => Scheme::CrankNicolson,
            SchemeName::SplitStep => Scheme::SplitStep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeSpec {
    pub dt: f64,
    pub scheme: SchemeName,
    pub tolerance: f64,
}

impl Default for PdeSpec {
    fn default() -> Self {
        Self { dt: 0.01, scheme: SchemeName::CrankNicolson, tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationName {
    Analytic,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaperName {
    Smooth,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MidpointName {
    Exact,
    Interpolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSpec {
    pub epsilon: f64,
    /// Kernel half-width in units of `σ = sqrt(ε ħ / m)`.
    pub window: f64,
    pub eta: f64,
    pub normalization: NormalizationName,
    pub taper: TaperName,
    pub midpoint: MidpointName,
    pub allow_under_resolved: bool,
    /// Number of `ε` halvings in the path-vs-PDE distance series.
    pub levels: usize,
    /// Lattice spacing of each distance level is `σ / sites_per_sigma`.
    pub sites_per_sigma: f64,
}

impl Default for PathSpec {
    fn default() -> Self {
        let k = gaugeqm_core::path::KernelConfig::default();
        Self {
            epsilon: k.epsilon,
            window: k.window,
            eta: k.eta,
            normalization: NormalizationName::Analytic,
            taper: TaperName::Smooth,
            midpoint: MidpointName::Exact,
            allow_under_resolved: false,
            levels: 3,
            sites_per_sigma: 6.0,
        }
    }
}

impl PathSpec {
    pub fn kernel(&self) -> gaugeqm_core::path::KernelConfig {
        gaugeqm_core::path::KernelConfig {
            epsilon: self.epsilon,
            window: self.window,
            eta: self.eta,
            normalization: match self.normalization {
                NormalizationName::Analytic => Normalization::Analytic,
                NormalizationName::Discrete => Normalization::Discrete,
            },
            taper: match self.taper {
                TaperName::Smooth => Taper::Smooth,
                TaperName::Hard => Taper::Hard,
            },
            midpoint: match self.midpoint {
                MidpointName::Exact => MidpointRule::Exact,
                MidpointName::Interpolated => MidpointRule::Interpolated,
            },
            allow_under_resolved: self.allow_under_resolved,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    #[default]
    Zero,
    /// Constant `φ`, `A` given by basis coordinates.
    Constant,
    /// Constant profiles times a Gaussian bump.
    Bump,
    /// Seeded Fourier field periodic on the grid.
    SmoothRandom,
    /// Samples read from a tabulated-field file.
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSpec {
    pub kind: FieldKind,
    /// Basis coordinates of `φ` (empty means zero).
    pub phi: Vec<f64>,
    pub a: Vec<f64>,
    pub center: f64,
    pub width: f64,
    pub modes: usize,
    pub amplitude: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self { kind: FieldKind::Zero, phi: vec![], a: vec![], center: 0.0, width: 1.0, modes: 3, amplitude: 0.5, file: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    #[default]
    Gaussian,
    /// A state saved as JSON.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorKind {
    #[default]
    Identity,
    /// Seeded Haar-like unitary.
    RandomUnitary,
    /// Seeded matrix with independent complex normal entries.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSpec {
    pub kind: InitialKind,
    pub center: f64,
    pub sigma: f64,
    pub k0: f64,
    pub factor: FactorKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl Default for InitialSpec {
    fn default() -> Self {
        Self { kind: InitialKind::Gaussian, center: 0.0, sigma: 1.0, k0: 0.0, factor: FactorKind::Identity, file: None }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::invalid(e.to_string()))
    }

    /// Reads `path`; relative file references are resolved against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for f in [&mut cfg.field.file, &mut cfg.initial.file].into_iter().flatten() {
            if f.is_relative() {
                *f = base.join(&*f);
            }
        }
        Ok(cfg)
    }

    /// The config with every default spelled out.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Checks every constraint and returns all violations at once.
    pub fn validate(&self) -> Result<(), Failure> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Failure::Validation(v))
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let mut need = |ok: bool, msg: String| {
            if !ok {
                v.push(msg);
            }
        };
        let finite_pos = |x: f64| x > 0.0 && x.is_finite();

        need(self.t_final >= 0.0 && self.t_final.is_finite(), format!("t_final = {} must be finite and >= 0", self.t_final));
        match self.group.kind {
            GroupKind::Su => need((2..=8).contains(&self.group.n), format!("group su(n) needs 2 <= n <= 8, got {}", self.group.n)),
            GroupKind::U => need((1..=8).contains(&self.group.n), format!("group u(n) needs 1 <= n <= 8, got {}", self.group.n)),
        }
        let g = &self.grid;
        need(g.x_min.is_finite() && g.x_max.is_finite() && g.x_max > g.x_min, format!("grid needs x_min < x_max, got [{}, {}]", g.x_min, g.x_max));
        need((MIN_SITES..=MAX_SITES).contains(&g.n_sites), format!("grid.n_sites = {} must lie in [{MIN_SITES}, {MAX_SITES}]", g.n_sites));
        let (m, hbar) = (self.physics.mass, self.physics.hbar);
        need(finite_pos(m), format!("physics.mass = {m} must be positive"));
        need(finite_pos(hbar), format!("physics.hbar = {hbar} must be positive"));

        if self.route.uses_pde() {
            let p = &self.pde;
            need(finite_pos(p.dt), format!("pde.dt = {} must be positive", p.dt));
            need(p.tolerance > 0.0 && p.tolerance < 1.0, format!("pde.tolerance = {} must lie in (0, 1)", p.tolerance));
        }
        if self.route.uses_path() {
            let p = &self.path;
            need(finite_pos(p.epsilon), format!("path.epsilon = {} must be positive", p.epsilon));
            need(p.window >= 5.0 && p.window.is_finite(), format!("path.window = {} must be at least 5", p.window));
            need((0.0..=0.1).contains(&p.eta), format!("path.eta = {} must lie in [0, 0.1]", p.eta));
            if finite_pos(p.epsilon) && self.t_final.is_finite() {
                let ratio = self.t_final / p.epsilon;
                need(
                    (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0),
                    format!("t_final = {} is not an integer multiple of path.epsilon = {}", self.t_final, p.epsilon),
                );
            }
            if finite_pos(p.epsilon) && finite_pos(m) && finite_pos(hbar) && g.n_sites > 0 && g.x_max > g.x_min && !p.allow_under_resolved {
                let sigma = (p.epsilon * hbar / m).sqrt();
                let dx = g.dx();
                if dx > sigma / 4.0 {
                    let sites = ((g.x_max - g.x_min) * 4.0 / sigma).ceil() as usize;
                    let eps = 16.0 * dx * dx * m / hbar;
                    need(false, format!(
                        "path route is under-resolved: dx = {dx:.4e} exceeds sigma/4 = {:.4e} (sigma = sqrt(epsilon*hbar/m)); \
                         use grid.n_sites >= {sites} or path.epsilon >= {eps:.4e}, or set path.allow_under_resolved = true",
                        sigma / 4.0
                    ));
                }
            }
        }
        if self.route == Route::Both {
            let p = &self.path;
            if !(1..=6).contains(&p.levels) {
                need(false, format!("path.levels = {} must lie in [1, 6]", p.levels));
            } else if p.sites_per_sigma < 4.0 || !p.sites_per_sigma.is_finite() {
                need(false, format!("path.sites_per_sigma = {} must be at least 4", p.sites_per_sigma));
            } else if finite_pos(p.epsilon) && finite_pos(m) && finite_pos(hbar) {
                let finest = p.epsilon / f64::powi(2.0, p.levels as i32 - 1);
                let sites = ((g.x_max - g.x_min) * p.sites_per_sigma / (finest * hbar / m).sqrt()).ceil();
                if sites.is_nan() || sites > MAX_SITES as f64 {
                    need(false, format!(
                        "finest distance level needs {sites} sites (epsilon = {finest:e}), more than {MAX_SITES}; reduce path.levels or the domain"
                    ));
                }
            }
        }

        let basis_len = self.group.basis().map(|b| b.len()).unwrap_or(0);
        let f = &self.field;
        for (name, coords) in [("phi", &f.phi), ("a", &f.a)] {
            if !coords.is_empty() && coords.len() != basis_len {
                need(false, format!("field.{name} has {} coordinates; {} has {basis_len} generators", coords.len(), self.group.label()));
            }
            if coords.iter().any(|c| !c.is_finite()) {
                need(false, format!("field.{name} has non-finite coordinates"));
            }
        }
        match f.kind {
            FieldKind::Bump => need(finite_pos(f.width), format!("field.width = {} must be positive", f.width)),
            FieldKind::SmoothRandom => need(f.amplitude.is_finite() && f.amplitude >= 0.0, format!("field.amplitude = {} must be >= 0", f.amplitude)),
            FieldKind::Tabulated => match &f.file {
                None => need(false, "field.kind = \"tabulated\" needs field.file".into()),
                Some(p) => match std::fs::read_to_string(p) {
                    Err(e) => need(false, format!("field.file {}: {e}", p.display())),
                    Ok(text) => match formats::parse_tabulated_field(&text) {
                        Err(e) => need(false, format!("field.file {}: {e}", p.display())),
                        Ok(t) => need(t.dim == self.group.n, format!("field.file has dim {}, group needs n = {}", t.dim, self.group.n)),
                    },
                },
            },
            FieldKind::Zero | FieldKind::Constant => {}
        }

        let i = &self.initial;
        match i.kind {
            InitialKind::Gaussian => {
                need(finite_pos(i.sigma), format!("initial.sigma = {} must be positive", i.sigma));
                need(i.center.is_finite() && i.k0.is_finite(), "initial.center and initial.k0 must be finite".into());
            }
            InitialKind::File => match &i.file {
                None => need(false, "initial.kind = \"file\" needs initial.file".into()),
                Some(p) => match std::fs::read_to_string(p) {
                    Err(e) => need(false, format!("initial.file {}: {e}", p.display())),
                    Ok(text) => match formats::state_from_json(&text) {
                        Err(e) => need(false, format!("initial.file {}: {e}", p.display())),
                        Ok(psi) => {
                            if psi.dim() != self.group.n {
                                need(false, format!("initial.file holds {}x{} matrices, group needs n = {}", psi.dim(), psi.dim(), self.group.n));
                            }
                            if psi.grid().n_sites() != g.n_sites || psi.grid().x_min() != g.x_min || psi.grid().x_max() != g.x_max {
                                need(false, "initial.file grid differs from [grid]".into());
                            }
                        }
                    },
                },
            },
        }
        v
    }
}

