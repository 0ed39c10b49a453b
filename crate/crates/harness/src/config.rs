//! Experiment configuration files.
//!
//! A config holds one or more `[[experiment]]` tables:
//!
//! ```toml
//! [[experiment]]
//! name = "amp"              # optional, names the output files
//! model = "amp_damp"        # builtin name, or `model_file = "gen.toml"`
//! params = { gamma = 1.0 }  # builtin parameters, optional
//! methods = ["S1_DET", "QDRIFT"]
//! t = 1.0
//! n_grid = [4, 8, 16]       # or epsilon_grid = [0.1, 0.05]
//! seed = 7
//! trajectories = 1024       # optional
//! outputs = "./out"         # optional
//! sampled = false           # Monte Carlo mixtures for randomised methods
//! ```
//!
//! Further optional keys: `initial_state` (basis index, default `d - 1`),
//! `conservative_bounds`, `exp_factor` and
//! `gamma_convention = "include_hamiltonian" | "dissipators_only"`.
//! A relative `model_file` is resolved against the config's directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use lindblad_rand_core::formulas::{BoundOptions, MethodId};
use lindblad_rand_core::lindblad::read_generator;
use lindblad_rand_core::norms::GammaConvention;
use lindblad_rand_core::Generator;
use serde::Deserialize;
use toml::Table;

use crate::models::builtin_model;
use crate::InputError;

pub const DEFAULT_TRAJECTORIES: usize = 1024;
pub const DEFAULT_OUTPUTS: &str = "./out";
/// Batches behind the standard error of sampled estimates.
pub const STAT_BATCHES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Builtin { name: String, params: Table },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Steps(Vec<usize>),
    Epsilon(Vec<f64>),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Steps(v) => v.len(),
            Grid::Epsilon(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub model: ModelSource,
    pub methods: Vec<MethodId>,
    pub t: f64,
    pub grid: Grid,
    pub trajectories: usize,
    pub seed: u64,
    pub outputs: PathBuf,
    pub sampled: bool,
    pub initial_state: Option<usize>,
    pub bounds: BoundOptions,
    pub gamma: GammaConvention,
}

impl ExperimentSpec {
    /// Minimal spec for a builtin model; everything optional at its default.
    pub fn builtin(name: &str, model: &str, methods: &[MethodId], t: f64, grid: Grid, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            model: ModelSource::Builtin { name: model.to_string(), params: Table::new() },
            methods: methods.to_vec(),
            t,
            grid,
            trajectories: DEFAULT_TRAJECTORIES,
            seed,
            outputs: PathBuf::from(DEFAULT_OUTPUTS),
            sampled: false,
            initial_state: None,
            bounds: BoundOptions::default(),
            gamma: GammaConvention::default(),
        }
    }

    pub fn load_model(&self) -> Result<Generator, InputError> {
        match &self.model {
            ModelSource::Builtin { name, params } => {
                builtin_model(name, params).map_err(|e| InputError(format!("experiment {}: {e:#}", self.name)))
            }
            ModelSource::File(path) => read_generator(path).map_err(|e| InputError(e.to_string())),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Vec<RawExperiment>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: Option<String>,
    model: Option<String>,
    model_file: Option<PathBuf>,
    params: Option<Table>,
    methods: Vec<String>,
    t: f64,
    n_grid: Option<Vec<i64>>,
    epsilon_grid: Option<Vec<f64>>,
    trajectories: Option<i64>,
    seed: u64,
    outputs: Option<PathBuf>,
    #[serde(default)]
    sampled: bool,
    initial_state: Option<usize>,
    #[serde(default)]
    conservative_bounds: bool,
    #[serde(default)]
    exp_factor: bool,
    gamma_convention: Option<String>,
}

fn strictly_monotone<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1]) || v.windows(2).all(|w| w[0] > w[1])
}

fn convert(raw: RawExperiment, index: usize, base: &Path) -> Result<ExperimentSpec, InputError> {
    let name = raw.name.unwrap_or_else(|| format!("experiment{}", index + 1));
    let bad = |msg: String| InputError(format!("experiment {name}: {msg}"));
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.') {
        return Err(bad("name may only contain letters, digits, '_', '-' and '.'".into()));
    }
    let model = match (raw.model, raw.model_file) {
        (Some(m), None) => ModelSource::Builtin { name: m, params: raw.params.unwrap_or_default() },
        (None, Some(f)) => {
            if raw.params.is_some() {
                return Err(bad("params only apply to builtin models".into()));
            }
            ModelSource::File(if f.is_relative() { base.join(f) } else { f })
        }
        _ => return Err(bad("give exactly one of model / model_file".into())),
    };
    if raw.methods.is_empty() {
        return Err(bad("methods must not be empty".into()));
    }
    let methods = raw
        .methods
        .iter()
        .map(|m| m.parse::<MethodId>().map_err(|e| bad(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if methods.iter().collect::<HashSet<_>>().len() != methods.len() {
        return Err(bad("methods contain duplicates".into()));
    }
    if !(raw.t > 0.0 && raw.t.is_finite()) {
        return Err(bad(format!("t must be positive, got {}", raw.t)));
    }
    let grid = match (raw.n_grid, raw.epsilon_grid) {
        (Some(n), None) => {
            if n.iter().any(|&x| x <= 0) {
                return Err(bad("n_grid values must be positive".into()));
            }
            Grid::Steps(n.into_iter().map(|x| x as usize).collect())
        }
        (None, Some(e)) => {
            if e.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(bad("epsilon_grid values must be positive".into()));
            }
            Grid::Epsilon(e)
        }
        _ => return Err(bad("give exactly one of n_grid / epsilon_grid".into())),
    };
    let monotone = match &grid {
        Grid::Steps(v) => strictly_monotone(v),
        Grid::Epsilon(v) => strictly_monotone(v),
    };
    if grid.is_empty() || !monotone {
        return Err(bad("grid must be non-empty and strictly monotone".into()));
    }
    let trajectories = match raw.trajectories {
        None => DEFAULT_TRAJECTORIES,
        Some(r) if r > 0 => r as usize,
        Some(r) => return Err(bad(format!("trajectories must be positive, got {r}"))),
    };
    if raw.sampled && trajectories < STAT_BATCHES {
        return Err(bad(format!("sampled mode needs at least {STAT_BATCHES} trajectories")));
    }
    let gamma = match raw.gamma_convention.as_deref() {
        None | Some("include_hamiltonian") => GammaConvention::IncludeHamiltonian,
        Some("dissipators_only") => GammaConvention::DissipatorsOnly,
        Some(other) => return Err(bad(format!("unknown gamma_convention {other:?}"))),
    };
    Ok(ExperimentSpec {
        name,
        model,
        methods,
        t: raw.t,
        grid,
        trajectories,
        seed: raw.seed,
        outputs: raw.outputs.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUTS)),
        sampled: raw.sampled,
        initial_state: raw.initial_state,
        bounds: BoundOptions { conservative: raw.conservative_bounds, exp_factor: raw.exp_factor },
        gamma,
    })
}

/// Parses a config document; `base` resolves relative model files.
pub fn parse_config(src: &str, base: &Path) -> Result<Vec<ExperimentSpec>, InputError> {
    let raw: RawConfig = toml::from_str(src).map_err(|e| InputError(e.to_string()))?;
    if raw.experiment.is_empty() {
        return Err(InputError("config has no [[experiment]] tables".into()));
    }
    let specs = raw
        .experiment
        .into_iter()
        .enumerate()
        .map(|(i, r)| convert(r, i, base))
        .collect::<Result<Vec<_>, _>>()?;
    let mut names = HashSet::new();
    for s in &specs {
        if !names.insert(&s.name) {
            return Err(InputError(format!("experiment name {} is used twice", s.name)));
        }
    }
    Ok(specs)
}

pub fn load_config(path: &Path) -> Result<Vec<ExperimentSpec>, InputError> {
    let src = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&src, base).map_err(|e| InputError(format!("{}: {}", path.display(), e.0)))
}
