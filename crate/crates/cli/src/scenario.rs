//! Scenario files.
//!
//! A scenario is one TOML document. Only `seed` is required; every section
//! falls back to defaults, and [`Scenario::echo`] writes the fully
//! materialized form back out. Sections:
//!
//! | section         | contents                                               |
//! |-----------------|--------------------------------------------------------|
//! | top level       | `seed` (required)                                      |
//! | `[market]`      | background-flow parameters                             |
//! | `[profile]`     | intraday volume profile: `kind`, `buckets`             |
//! | `[[venues]]`    | one table per venue: id, fees, latency, capabilities   |
//! | `[parent]`      | the order to work: side, quantity, start, end, limit   |
//! | `[algo]`        | `type` = `twap` / `vwap` / `pov` / `pov-adaptive` etc. |
//! | `[cost_model]`  | impact and risk inputs                                 |
//! | `[optimizer]`   | λ grid and rate bounds for the frontier                |
//! | `[tca]`         | decision price override, fee treatment                 |
//! | `[output]`      | report format                                          |
//!
//! `[parent]` and `[algo]` go together and need at least one venue. A file
//! without them is a frontier-only scenario.

use std::fmt;
use std::path::Path;

use execlab_core::cost_model::ImpactParams;
use execlab_core::exec_algos::{AlgoSpec, ParentOrder};
use execlab_core::optimizer::RateBounds;
use execlab_core::venue_sim::{u_shape_profile, MarketParams, VenueConfig, VolumeProfile};
use execlab_core::cost_model::RiskRateParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    #[default]
    UShape,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub buckets: usize,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self { kind: ProfileKind::UShape, buckets: 13 }
    }
}

impl ProfileSpec {
    pub fn build(&self, session: u64) -> Result<VolumeProfile, CliError> {
        let built = match self.kind {
            ProfileKind::UShape => u_shape_profile(self.buckets, session),
            ProfileKind::Uniform => VolumeProfile::uniform(session, self.buckets),
        };
        built.map_err(|e| CliError::Validation(format!("profile: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostSection {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub adv: f64,
    pub sigma: f64,
    pub p0: f64,
    pub x: f64,
    /// Trading horizon in years.
    pub horizon: f64,
}

impl Default for CostSection {
    fn default() -> Self {
        Self { a1: 0.5, a2: 0.5, a3: 1.0, b1: 0.8, adv: 1e6, sigma: 0.25, p0: 50.0, x: 1e5, horizon: 1.0 / 250.0 }
    }
}

impl CostSection {
    pub fn impact(&self) -> ImpactParams<f64> {
        ImpactParams {
            a1: self.a1,
            a2: self.a2,
            a3: self.a3,
            b1: self.b1,
            adv: self.adv,
            sigma: self.sigma,
            p0: self.p0,
            x: self.x,
        }
    }

    pub fn risk(&self) -> RiskRateParams<f64> {
        RiskRateParams { x: self.x, sigma: self.sigma, p0: self.p0, horizon: self.horizon }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// 0 gives an empty frontier.
    pub lambda_points: usize,
    pub rate_min: f64,
    pub rate_max: f64,
    /// Per-share move between decision and arrival, for the previous-close frontier.
    pub drift: f64,
    /// λ for the objective-curve figure.
    pub objective_lambda: f64,
    pub alpha_points: usize,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            lambda_min: 3e-8,
            lambda_max: 2e-5,
            lambda_points: 50,
            rate_min: 1e-4,
            rate_max: 1.0,
            drift: 0.0,
            objective_lambda: 1e-6,
            alpha_points: 200,
        }
    }
}

impl OptimizerSection {
    pub fn bounds(&self) -> RateBounds<f64> {
        RateBounds { min: self.rate_min, max: self.rate_max }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TcaSection {
    /// Decision price in ticks; when absent the parent's benchmark picks it.
    pub decision_ticks: Option<i64>,
    /// Count venue fees as fixed cost.
    pub include_fees: bool,
}

impl Default for TcaSection {
    fn default() -> Self {
        Self { decision_ticks: None, include_fees: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: Option<u64>,
    #[serde(default)]
    pub market: MarketParams,
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default)]
    pub venues: Vec<VenueConfig>,
    pub parent: Option<ParentOrder>,
    pub algo: Option<AlgoSpec>,
    pub cost_model: Option<CostSection>,
    pub optimizer: Option<OptimizerSection>,
    #[serde(default)]
    pub tca: TcaSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Scenario {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut s: Scenario =
            toml::from_str(text).map_err(|e| CliError::Parse { path: origin.to_string(), msg: e.to_string() })?;
        s.validate()?;
        if let Some(seed) = s.seed {
            s.market.seed = seed;
        }
        Ok(s)
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("validated scenario has a seed")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self.market.seed = seed;
        self
    }

    pub fn simulates(&self) -> bool {
        self.algo.is_some()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Validation(m));
        if self.seed.is_none() {
            return fail("seed is mandatory".into());
        }
        self.market.validate().map_err(|e| CliError::Validation(format!("market: {e}")))?;
        self.profile.build(self.market.session_ticks)?;
        match (&self.parent, &self.algo) {
            (Some(_), None) => return fail("parent order given without an [algo] section".into()),
            (None, Some(_)) => return fail("algo given without a [parent] section".into()),
            _ => {}
        }
        if let (Some(parent), Some(algo)) = (&self.parent, &self.algo) {
            if self.venues.is_empty() {
                return fail("venues must be nonempty when an algo is configured".into());
            }
            parent.validate().map_err(|e| CliError::Validation(format!("parent: {e}")))?;
            algo.validate().map_err(|e| CliError::Validation(format!("algo: {e}")))?;
            if parent.end > self.market.session_ticks {
                return fail(format!(
                    "parent.end {} is past market.session_ticks {}",
                    parent.end, self.market.session_ticks
                ));
            }
        }
        let mut ids: Vec<u32> = self.venues.iter().map(|v| v.venue_id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return fail("venue ids must be unique".into());
        }
        if self.optimizer.is_some() && self.cost_model.is_none() {
            return fail("optimizer needs a [cost_model] section".into());
        }
        if let Some(c) = &self.cost_model {
            c.impact().validate().map_err(|e| CliError::Validation(format!("cost_model: {e}")))?;
            if !(c.horizon > 0.0) {
                return fail("cost_model.horizon must be positive".into());
            }
        }
        if let Some(o) = &self.optimizer {
            if !(o.lambda_min > 0.0 && o.lambda_max >= o.lambda_min) {
                return fail("optimizer needs 0 < lambda_min <= lambda_max".into());
            }
            if !(o.rate_min > 0.0 && o.rate_min < o.rate_max) {
                return fail("optimizer needs 0 < rate_min < rate_max".into());
            }
            if o.objective_lambda < 0.0 {
                return fail("optimizer.objective_lambda must be non-negative".into());
            }
        }
        Ok(())
    }

    /// Fully materialized TOML, defaults included.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// SHA-256 of the echoed form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.echo().as_bytes()))
    }

    /// First line of every emitted file.
    pub fn header(&self) -> String {
        artifact_header(&self.hash())
    }
}

pub fn artifact_header(hash: &str) -> String {
    format!("# execlab {} scenario={hash}", env!("CARGO_PKG_VERSION"))
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.echo())
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    Scenario::parse(&text, &path.display().to_string())
}
