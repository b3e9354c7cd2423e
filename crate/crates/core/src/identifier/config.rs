use std::path::{Path, PathBuf};

use super::dataset::{build_regression_set, read_dataset, split};
use super::excite::{excite_and_record, Excitation, ExcitationPlan};
use super::validate::{cross_validate, ValidationReport};
use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::narx::{lm_train, Dataset, LmOptions, LmState, NarxModel, DEFAULT_HIDDEN};
use crate::plant::MachineParams;

/// Identification settings: data generation, network sizes and training.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentConfig {
    pub machine: MachineParams,
    pub plan: ExcitationPlan,
    pub hidden_f: usize,
    pub hidden_g: usize,
    /// Seed of the weight initialization stream.
    pub init_seed: u64,
    pub max_iter: usize,
    pub cost_tol: f64,
    pub train_fraction: f64,
    /// Recorded data to train on instead of simulating the plan.
    pub dataset: Option<PathBuf>,
    /// Trained weights, used by validation.
    pub weights: Option<PathBuf>,
}

impl Default for IdentConfig {
    fn default() -> Self {
        Self {
            machine: MachineParams::reference(),
            plan: ExcitationPlan::default(),
            hidden_f: DEFAULT_HIDDEN,
            hidden_g: DEFAULT_HIDDEN,
            init_seed: 0,
            max_iter: 150,
            cost_tol: 0.0,
            train_fraction: 0.5,
            dataset: None,
            weights: None,
        }
    }
}

impl IdentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_kv(&KvFile::load(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_kv(&KvFile::parse("<ident>", text)?)
    }

    fn from_kv(kv: &KvFile) -> Result<Self> {
        let mut c = Self::default();
        let mut hidden_g = None;
        let mut init_seed = None;
        for e in &kv.entries {
            match e.key.as_str() {
                "machine" => c.machine = MachineParams::load(&kv.path(e))?,
                "n_samples" => c.plan.n_samples = kv.number(e)?,
                "dt" => c.plan.dt = kv.number(e)?,
                "u_min" => c.plan.u_min = kv.number(e)?,
                "u_max" => c.plan.u_max = kv.number(e)?,
                "hold" => c.plan.hold = kv.number(e)?,
                "seed" => c.plan.seed = kv.number(e)?,
                "v_operating" => c.plan.v_operating = kv.number(e)?,
                "hidden" => c.hidden_f = kv.number(e)?,
                "hidden_g" => hidden_g = Some(kv.number(e)?),
                "init_seed" => init_seed = Some(kv.number(e)?),
                "max_iter" => c.max_iter = kv.number(e)?,
                "cost_tol" => c.cost_tol = kv.number(e)?,
                "train_fraction" => c.train_fraction = kv.number(e)?,
                "dataset" => c.dataset = Some(kv.path(e)),
                "weights" => c.weights = Some(kv.path(e)),
                _ => return Err(kv.unknown(e)),
            }
        }
        c.hidden_g = hidden_g.unwrap_or(c.hidden_f);
        c.init_seed = init_seed.unwrap_or(c.plan.seed);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        if self.hidden_f == 0 || self.hidden_g == 0 {
            return Err(Error::Invalid(
                "hidden layer widths must be positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::Invalid("max_iter must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Invalid(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }

    /// Overrides both the excitation and the initialization seeds.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.plan.seed = seed;
        self.init_seed = seed;
        self
    }

    pub fn lm_options(&self) -> LmOptions {
        LmOptions {
            max_iter: self.max_iter,
            cost_tol: self.cost_tol,
            ..LmOptions::default()
        }
    }

    /// Input/output series: read from `dataset` when set, simulated otherwise.
    pub fn series(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        match &self.dataset {
            Some(path) => read_dataset(path),
            None => {
                let Excitation { u, y, .. } = excite_and_record(&self.machine, &self.plan)?;
                Ok((u, y))
            }
        }
    }
}

/// Result of splitting, training and validating.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: NarxModel,
    pub state: LmState,
    pub train: Dataset,
    pub holdout: Dataset,
    pub report: ValidationReport,
}

/// Builds records, trains on the first block and validates on the rest.
pub fn train_on_series(cfg: &IdentConfig, u: &[f64], y: &[f64]) -> Result<TrainOutcome> {
    let data = build_regression_set(u, y)?;
    let (train, holdout) = split(&data, cfg.train_fraction)?;
    let init = NarxModel::random(cfg.hidden_f, cfg.hidden_g, cfg.init_seed);
    let (model, state) = lm_train(&init, &train, &cfg.lm_options())?;
    let report = cross_validate(&model, &holdout)?;
    Ok(TrainOutcome {
        model,
        state,
        train,
        holdout,
        report,
    })
}
