//! Run configuration read from a JSON file.
//!
//! Every field is optional except `model`. Defaults:
//!
//! | field              | default                                          |
//! |--------------------|--------------------------------------------------|
//! | `p`, `q`           | `1`, `3`                                         |
//! | `potential`        | `q` zeros (chain only)                           |
//! | `orders`           | `[2]` (finite_group only)                        |
//! | `M`                | 12 for one-dimensional models, 6 for hofstadter  |
//! | `L`                | 64                                               |
//! | `band_set`         | one entry per band                               |
//! | `output_dir`       | `.`                                              |
//! | `q_max`            | 8                                                |
//! | `seed`             | `0x5eedb10c`                                     |
//! | `tolerances`       | exact 1e-12, numeric 1e-8, gap_floor 1e-6         |
//! | `candidates`       | the model's own wandering vectors                |
//! | `corrupt_generator`| `false`                                          |

use std::path::PathBuf;

use bloch_fiber::finite_bf::PROBE_SEED;
use bloch_fiber::models::{self, ModelInstance, DEFAULT_RADIUS_1D, DEFAULT_RADIUS_2D};
use bloch_fiber::topology::DEFAULT_GAP_FLOOR;
use bloch_fiber::transform::TorusGrid;
use bloch_fiber::{EXACT_TOL, NUMERIC_TOL};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_Q_MAX: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mathieu,
    Hofstadter,
    Chain,
    FiniteGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum BandSelection {
    /// The literal string `"all"`.
    Named(String),
    List(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub exact: f64,
    pub numeric: f64,
    pub gap_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: EXACT_TOL,
            numeric: NUMERIC_TOL,
            gap_floor: DEFAULT_GAP_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub potential: Option<Vec<f64>>,
    pub orders: Option<Vec<usize>>,
    #[serde(rename = "M")]
    pub truncation: Option<usize>,
    #[serde(rename = "L")]
    pub points: Option<usize>,
    pub band_set: Option<BandSelection>,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub q_max: Option<u64>,
    pub seed: Option<u64>,
    /// Replacement wandering candidates for `verify`, each `[k, a_1, …, a_N]`.
    pub candidates: Option<Vec<Vec<i64>>>,
    /// Test hook: perturbs the first generator before `decompose`.
    #[serde(default)]
    pub corrupt_generator: bool,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| config_err(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn p(&self) -> u64 {
        self.p.unwrap_or(1)
    }

    pub fn q(&self) -> u64 {
        match (self.model, self.q, &self.potential) {
            (_, Some(q), _) => q,
            (ModelKind::Chain, None, Some(pot)) => pot.len() as u64,
            _ => 3,
        }
    }

    pub fn potential(&self) -> Vec<f64> {
        self.potential.clone().unwrap_or_else(|| vec![0.0; self.q() as usize])
    }

    pub fn orders(&self) -> Vec<usize> {
        self.orders.clone().unwrap_or_else(|| vec![2])
    }

    pub fn lattice_dim(&self) -> usize {
        match self.model {
            ModelKind::Hofstadter => 2,
            _ => 1,
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(match self.model {
            ModelKind::Hofstadter => DEFAULT_RADIUS_2D,
            _ => DEFAULT_RADIUS_1D,
        })
    }

    pub fn points(&self) -> usize {
        self.points.unwrap_or(TorusGrid::DEFAULT_POINTS)
    }

    pub fn q_max(&self) -> u64 {
        self.q_max.unwrap_or(DEFAULT_Q_MAX)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(PROBE_SEED)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    /// Band sets to report: one per band unless `band_set` says otherwise.
    pub fn band_sets(&self, bands: usize) -> Vec<Vec<usize>> {
        match &self.band_set {
            None => (0..bands).map(|r| vec![r]).collect(),
            Some(BandSelection::Named(_)) => vec![(0..bands).collect()],
            Some(BandSelection::List(list)) => vec![list.clone()],
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let q = self.q();
        if q == 0 {
            return Err(config_err("q must be positive"));
        }
        if matches!(self.model, ModelKind::Mathieu | ModelKind::Hofstadter) && models::gcd(self.p(), q) != 1 {
            return Err(config_err(format!("flux {}/{q} is not reduced", self.p())));
        }
        if self.model == ModelKind::Chain && self.potential().len() as u64 != q {
            return Err(config_err(format!(
                "potential has {} entries, q = {q}",
                self.potential().len()
            )));
        }
        if self.potential().iter().any(|x| !x.is_finite()) {
            return Err(config_err("potential must be finite"));
        }
        if self.orders().is_empty() || self.orders().iter().any(|&p| p < 2) {
            return Err(config_err("every group order must be >= 2"));
        }
        if self.truncation() < 3 {
            return Err(config_err("M must be at least 3"));
        }
        if self.points() < 2 {
            return Err(config_err("L must be at least 2"));
        }
        match &self.band_set {
            Some(BandSelection::Named(name)) if name != "all" => {
                return Err(config_err(format!("band_set must be a list or \"all\", got {name:?}")));
            }
            Some(BandSelection::List(list)) if list.iter().any(|&r| r as u64 >= q) => {
                return Err(config_err(format!("band_set {list:?} has indices >= q = {q}")));
            }
            _ => {}
        }
        let t = self.tolerances;
        if [t.exact, t.numeric, t.gap_floor].iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(config_err("tolerances must be finite and nonnegative"));
        }
        if let Some(cands) = &self.candidates {
            let n = self.lattice_dim();
            if cands.is_empty() || cands.iter().any(|c| c.len() != n + 1 || c[0] < 0 || c[0] as u64 >= q) {
                return Err(config_err(format!("candidates must be [k, a_1..a_{n}] with 0 <= k < q")));
            }
        }
        Ok(())
    }

    /// Builds the lattice model; only valid for the three lattice kinds.
    pub fn build_model(&self) -> Result<ModelInstance, CliError> {
        let m = self.truncation();
        let built = match self.model {
            ModelKind::Mathieu => models::mathieu_model(self.p(), self.q(), m),
            ModelKind::Hofstadter => models::hofstadter_model(self.p(), self.q(), m),
            ModelKind::Chain => models::periodic_chain_model(self.q() as usize, &self.potential(), m),
            ModelKind::FiniteGroup => {
                return Err(config_err("finite_group has no lattice model; use decompose"));
            }
        };
        built.map_err(|e| config_err(format!("cannot build model: {e}")))
    }

    pub fn flux(&self) -> Option<(u64, u64)> {
        matches!(self.model, ModelKind::Mathieu | ModelKind::Hofstadter).then(|| (self.p(), self.q()))
    }
}
