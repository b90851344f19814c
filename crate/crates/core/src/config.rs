//! TOML run configuration. Everything is validated by [`RunConfig::prepare`]
//! before any computation starts.
//!
//! ```toml
//! task = "moments"          # sample | moments | gamma | clt | render
//! seed = 7
//! out = "out"
//! beta = 10.0
//! coefficients = [1.0, -1.0, 1.0]   # optional, classical signs by default
//!
//! [space]
//! kind = "euclidean_box"    # euclidean_box | hyperbolic_disk | marked_stationary
//! bounds = [[0.0, 1.0], [0.0, 1.0]]
//!
//! [system]
//! name = "constant"         # constant | rips | cech | hyperbolic_rgg | hyperbolic_line | stationary
//! p = [0.3, 0.5]
//!
//! [budget]
//! min_samples = 16384
//! max_samples = 4194304
//! rel_tol = 0.01
//! ```
//!
//! Optional sections: `[replicates]` (`count`), `[gamma]` (`outer`, `inner`,
//! `fourth_moment_replicates`) and `[clt]` (`regime`, `betas` or `windows`,
//! `replicates`, `standardization`, `gamma`, `mark_grid`).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::connect::{
    cech_system, constant_system, hyperbolic_line_system, hyperbolic_rgg_system, rips_system, stationary_marked_system,
    ConnectionSystem, MarkRadius, Metric,
};
use crate::error::{Error, Result};
use crate::estimate::McBudget;
use crate::functional::CoefficientVector;
use crate::model::Model;
use crate::normapprox::{CltExperiment, GammaConfig, Regime, Standardization};
use crate::space::{MarkDistribution, Space, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Sample,
    Moments,
    Gamma,
    Clt,
    Render,
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Task> {
        match s {
            "sample" => Ok(Task::Sample),
            "moments" => Ok(Task::Moments),
            "gamma" => Ok(Task::Gamma),
            "clt" => Ok(Task::Clt),
            "render" => Ok(Task::Render),
            other => Err(Error::Config(format!("unknown task `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub name: String,
    #[serde(default)]
    pub alpha: Option<usize>,
    /// Constant acceptance probabilities; for the hyperbolic systems only `p[0]` is used.
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    #[serde(default)]
    pub radius: Option<f64>,
    /// `euclidean` or `hyperbolic`; defaults to the space's own metric.
    #[serde(default)]
    pub metric: Option<String>,
    /// Symmetric radius matrix for discrete marks (stationary system).
    #[serde(default)]
    pub radius_table: Option<Vec<Vec<f64>>>,
    /// `[base, scale]` for the additive mark profile (stationary system).
    #[serde(default)]
    pub additive: Option<(f64, f64)>,
}

impl SystemSpec {
    fn need<T: Copy>(&self, v: Option<T>, field: &str) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("system `{}` needs `{field}`", self.name)))
    }

    fn single_p(&self) -> Result<f64> {
        match self.p.as_deref() {
            Some([p]) => Ok(*p),
            _ => Err(Error::Config(format!("system `{}` needs `p = [value]`", self.name))),
        }
    }

    pub fn build(&self, space: &Space) -> Result<ConnectionSystem> {
        let metric = match self.metric.as_deref() {
            None => Metric::of(space),
            Some("euclidean") => Metric::Euclidean,
            Some("hyperbolic") => Metric::Hyperbolic,
            Some(m) => return Err(Error::Config(format!("unknown metric `{m}`"))),
        };
        let sys = match self.name.as_str() {
            "constant" => constant_system(self.p.as_deref().ok_or_else(|| Error::Config("system `constant` needs `p`".into()))?)?,
            "rips" => rips_system(self.need(self.alpha, "alpha")?, self.need(self.radius, "radius")?, metric)?,
            "cech" => cech_system(self.need(self.alpha, "alpha")?, self.need(self.radius, "radius")?, metric)?,
            "hyperbolic_rgg" => hyperbolic_rgg_system(self.need(self.radius, "radius")?, self.single_p()?)?,
            "hyperbolic_line" => hyperbolic_line_system(self.single_p()?)?,
            "stationary" => {
                let profile = match (self.radius, &self.radius_table, self.additive) {
                    (Some(r), None, None) => MarkRadius::Fixed(r),
                    (None, Some(t), None) => MarkRadius::Table(t.clone()),
                    (None, None, Some((base, scale))) => MarkRadius::Additive { base, scale },
                    _ => return Err(Error::Config("stationary system needs exactly one of radius, radius_table, additive".into())),
                };
                stationary_marked_system(self.need(self.alpha, "alpha")?, profile)?
            }
            other => return Err(Error::Config(format!("unknown system `{other}`"))),
        };
        let max_mark = match space.marks() {
            MarkDistribution::Discrete { weights } => weights.len().saturating_sub(1) as f64,
            _ => 1.0,
        };
        Ok(sys.with_max_mark(max_mark))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplicateSection {
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CltSection {
    pub regime: Regime,
    #[serde(default)]
    pub betas: Option<Vec<f64>>,
    /// Window ladder as box bounds, in the same space kind as `[space]`.
    #[serde(default)]
    pub windows: Option<Vec<Vec<(f64, f64)>>>,
    pub replicates: usize,
    #[serde(default)]
    pub standardization: Standardization,
    /// Also estimate the γ quantities on every rung (uses `[gamma]`).
    #[serde(default)]
    pub gamma: bool,
    #[serde(default = "default_mark_grid")]
    pub mark_grid: usize,
}

fn default_mark_grid() -> usize {
    8
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
    pub space: Space,
    pub system: SystemSpec,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub budget: Option<McBudget>,
    #[serde(default)]
    pub replicates: Option<ReplicateSection>,
    #[serde(default)]
    pub gamma: Option<GammaConfig>,
    #[serde(default)]
    pub clt: Option<CltSection>,
}

/// A validated configuration, ready to run.
#[derive(Clone, Debug)]
pub struct Plan {
    pub task: Task,
    pub seed: u64,
    pub out: PathBuf,
    pub model: Model,
    pub a: CoefficientVector,
    pub budget: McBudget,
    pub replicates: usize,
    pub gamma: GammaConfig,
    pub clt: Option<CltExperiment>,
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) | Error::Io(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn with_bounds(space: &Space, bounds: Vec<(f64, f64)>) -> Result<Space> {
    match space {
        Space::EuclideanBox { .. } => Ok(Space::EuclideanBox { bounds }),
        Space::MarkedStationary { marks, .. } => Ok(Space::MarkedStationary { bounds, marks: marks.clone() }),
        Space::HyperbolicDisk { .. } => Err(Error::Config("window ladders need a box space".into())),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<(RunConfig, String)> {
        let text = std::fs::read_to_string(path)?;
        Ok((RunConfig::from_toml(&text)?, text))
    }

    pub fn prepare(&self) -> Result<Plan> {
        self.prepare_inner().map_err(config_err)
    }

    fn prepare_inner(&self) -> Result<Plan> {
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        let window = Window::new(self.space.clone())?;
        let system = self.system.build(&self.space)?;
        let beta = match (self.beta, &self.clt) {
            (Some(b), _) => b,
            (None, Some(c)) if c.betas.as_ref().is_some_and(|b| !b.is_empty()) => c.betas.as_ref().unwrap()[0],
            _ => return Err(Error::Config("`beta` is required".into())),
        };
        let model = Model::new(window, system, beta)?;
        let a = match &self.coefficients {
            Some(v) => CoefficientVector(v.clone()),
            None => CoefficientVector::euler(model.alpha()),
        };
        a.check_len(model.alpha())?;
        let budget = self.budget.unwrap_or_default();
        budget.validate()?;
        let replicates = self.replicates.as_ref().map_or(0, |r| r.count);
        let gamma = self.gamma.unwrap_or_default();
        if matches!(self.task, Task::Gamma) || self.clt.as_ref().is_some_and(|c| c.gamma) {
            if gamma.inner < 100 {
                return Err(Error::TooFewSamples { got: gamma.inner, min: 100 });
            }
            if gamma.outer < 2 || gamma.fourth_moment_replicates < 2 {
                return Err(Error::Config("gamma needs outer >= 2 and fourth_moment_replicates >= 2".into()));
            }
        }
        let clt = match (&self.clt, self.task) {
            (Some(c), _) => Some(self.experiment(c, &model, &a, budget, gamma)?),
            (None, Task::Clt) => return Err(Error::Config("task `clt` needs a [clt] section".into())),
            (None, _) => None,
        };
        if matches!(self.task, Task::Render) && !matches!(self.space, Space::HyperbolicDisk { .. }) {
            return Err(Error::Config("task `render` needs a hyperbolic_disk space".into()));
        }
        Ok(Plan { task: self.task, seed: self.seed, out: self.out.clone(), model, a, budget, replicates, gamma, clt })
    }

    fn experiment(&self, c: &CltSection, model: &Model, a: &CoefficientVector, budget: McBudget, gamma: GammaConfig) -> Result<CltExperiment> {
        let ladder = match c.regime {
            Regime::IncreasingIntensity => {
                let betas = c.betas.as_ref().ok_or_else(|| Error::Config("increasing_intensity needs `betas`".into()))?;
                betas.iter().map(|&b| model.with_beta(b)).collect::<Result<Vec<_>>>()?
            }
            _ => {
                let windows = c.windows.as_ref().ok_or_else(|| Error::Config("window regimes need `windows`".into()))?;
                windows
                    .iter()
                    .map(|b| Ok(model.with_window(Window::new(with_bounds(&self.space, b.clone())?)?)))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        if ladder.is_empty() {
            return Err(Error::Config("empty ladder".into()));
        }
        if c.replicates < crate::estimate::MIN_SAMPLES {
            return Err(Error::TooFewSamples { got: c.replicates, min: crate::estimate::MIN_SAMPLES });
        }
        if c.mark_grid == 0 {
            return Err(Error::Config("mark_grid must be positive".into()));
        }
        Ok(CltExperiment {
            regime: c.regime,
            ladder,
            replicates: c.replicates,
            a: a.clone(),
            budget,
            standardization: c.standardization,
            gamma: c.gamma.then_some(gamma),
            marks: self.space.marks(),
            mark_grid: c.mark_grid,
        })
    }
}
