use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::ansatz::Layout;
use crate::bayesopt::ObservationNoise;
use crate::entropy::BellMode;
use crate::noise::{ChannelKind, ChannelSpec};
use crate::shadows::{Ensemble, EstimatorConfig, EstimatorMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateSection {
    pub n: usize,
    pub layout: Layout,
    pub depth: usize,
    pub channel: ChannelKind,
    pub strength: f64,
    /// Circuit document with coefficients to use instead of sampling.
    pub params_file: Option<PathBuf>,
    /// Existing QSTATE1 file; when set the remaining fields describe how it was made.
    pub input: Option<PathBuf>,
}

impl Default for StateSection {
    fn default() -> Self {
        Self {
            n: 2,
            layout: Layout::Staircase,
            depth: 1,
            channel: ChannelKind::LocalDepolarizing,
            strength: 0.0,
            params_file: None,
            input: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSection {
    pub snapshots: usize,
    pub batches: usize,
    pub ensemble: Ensemble,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        Self {
            snapshots: 1000,
            batches: 10,
            ensemble: Ensemble::HaarGlobal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BmaxsSection {
    pub depth: usize,
    pub samples: Option<usize>,
    pub iterations: usize,
    pub candidates: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub unit_noise: bool,
    pub sigma_noise: Option<f64>,
    pub ridge_lambda: Option<f64>,
    pub kernel_degree: Option<u32>,
    pub grid_points: usize,
    pub reference_samples: usize,
    pub refine: bool,
}

impl Default for BmaxsSection {
    fn default() -> Self {
        Self {
            depth: 1,
            samples: None,
            iterations: 100,
            candidates: 256,
            epsilon: 0.1,
            delta: 0.1,
            unit_noise: false,
            sigma_noise: None,
            ridge_lambda: None,
            kernel_degree: None,
            grid_points: 512,
            reference_samples: 2048,
            refine: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScpSection {
    pub epsilon: f64,
    pub delta: f64,
    pub layout: Option<Layout>,
    pub k_exponent: Option<u32>,
    pub n_override: Option<usize>,
    pub t_override: Option<usize>,
    pub n_cap: usize,
    pub t_cap: usize,
    pub evaluation_budget: Option<usize>,
    /// Place the target's own parameters among the samples (a test hook).
    pub anchor_target: bool,
}

impl Default for ScpSection {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            delta: 0.1,
            layout: None,
            k_exponent: None,
            n_override: None,
            t_override: None,
            n_cap: 64,
            t_cap: 400,
            evaluation_budget: None,
            anchor_target: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntrinsicSection {
    pub depth: usize,
    pub epsilon: f64,
    pub samples: Option<usize>,
    pub probes: usize,
    pub degree: Option<u32>,
}

impl Default for IntrinsicSection {
    fn default() -> Self {
        Self {
            depth: 1,
            epsilon: 0.5,
            samples: None,
            probes: 50,
            degree: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PuritySection {
    pub n: usize,
    pub channel: ChannelKind,
    pub strength: f64,
    pub depths: Vec<u32>,
    pub trials: usize,
    pub eta_target: Option<f64>,
}

impl Default for PuritySection {
    fn default() -> Self {
        Self {
            n: 1,
            channel: ChannelKind::LocalDepolarizing,
            strength: 0.2,
            depths: vec![1, 2, 3],
            trials: 0,
            eta_target: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropySection {
    pub eta: f64,
    pub eps: f64,
    pub mode: BellMode,
    pub shots: Option<usize>,
    pub parity: bool,
    pub parity_max_l: u32,
    pub threshold: Option<f64>,
}

impl Default for EntropySection {
    fn default() -> Self {
        Self {
            eta: 0.25,
            eps: 0.05,
            mode: BellMode::ExactExpectation,
            shots: None,
            parity: false,
            parity_max_l: 4,
            threshold: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShadowsSection {
    pub probes: usize,
    pub probe_depth: usize,
}

impl Default for ShadowsSection {
    fn default() -> Self {
        Self { probes: 8, probe_depth: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Exact,
    Shadow,
}

/// Every subcommand reads the sections it needs from one file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: usize,
    pub mode: ModeArg,
    pub out: PathBuf,
    pub emit_plot_data: bool,
    pub state: StateSection,
    pub estimator: EstimatorSection,
    pub bmaxs: BmaxsSection,
    pub scp: ScpSection,
    pub intrinsic: IntrinsicSection,
    pub purity: PuritySection,
    pub entropy: EntropySection,
    pub shadows: ShadowsSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            threads: 0,
            mode: ModeArg::Exact,
            out: PathBuf::from("qlsc-out"),
            emit_plot_data: false,
            state: StateSection::default(),
            estimator: EstimatorSection::default(),
            bmaxs: BmaxsSection::default(),
            scp: ScpSection::default(),
            intrinsic: IntrinsicSection::default(),
            purity: PuritySection::default(),
            entropy: EntropySection::default(),
            shadows: ShadowsSection::default(),
        }
    }
}

fn field(name: &str, ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name}: {}", msg())))
    }
}

fn in_open_unit(name: &str, v: f64) -> Result<(), CliError> {
    field(name, v > 0.0 && v < 1.0, || format!("must lie in (0, 1), got {v}"))
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn estimator(&self) -> EstimatorConfig {
        EstimatorConfig {
            mode: match self.mode {
                ModeArg::Exact => EstimatorMode::Exact,
                ModeArg::Shadow => EstimatorMode::Shadow,
            },
            num_snapshots: self.estimator.snapshots,
            mom_batches: self.estimator.batches,
            ensemble: self.estimator.ensemble,
        }
    }

    pub fn channel(&self) -> Result<ChannelSpec, CliError> {
        ChannelSpec::new(self.state.channel, self.state.strength).map_err(|e| CliError::Config(format!("state.channel: {e}")))
    }

    pub fn observation_noise(&self) -> ObservationNoise {
        if self.bmaxs.unit_noise {
            ObservationNoise::StandardNormal
        } else {
            ObservationNoise::None
        }
    }

    /// Checks every field against the preconditions of the modules it feeds.
    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.state;
        field("state.n", (2..=crate::qsim::DEFAULT_MAX_QUBITS).contains(&s.n) || s.input.is_some(), || {
            format!("must lie in [2, {}], got {}", crate::qsim::DEFAULT_MAX_QUBITS, s.n)
        })?;
        field("state.depth", s.depth >= 1, || "must be ≥ 1".into())?;
        field("state.channel", s.channel != ChannelKind::Custom, || "custom channels cannot be given in a config file".into())?;
        field("state.strength", (0.0..=1.0).contains(&s.strength), || format!("must lie in [0, 1], got {}", s.strength))?;
        let e = &self.estimator;
        field("estimator.batches", e.batches >= 1, || "must be ≥ 1".into())?;
        field("estimator.snapshots", e.snapshots >= e.batches, || {
            format!("must be ≥ estimator.batches ({}), got {}", e.batches, e.snapshots)
        })?;
        let b = &self.bmaxs;
        field("bmaxs.depth", b.depth >= 1, || "must be ≥ 1".into())?;
        field("bmaxs.iterations", b.iterations >= 1, || "must be ≥ 1".into())?;
        field("bmaxs.candidates", b.candidates >= 1, || "must be ≥ 1".into())?;
        field("bmaxs.samples", b.samples != Some(0), || "must be ≥ 1".into())?;
        in_open_unit("bmaxs.epsilon", b.epsilon)?;
        in_open_unit("bmaxs.delta", b.delta)?;
        field("bmaxs.grid_points", b.grid_points >= crate::intrinsic::MIN_GRID_POINTS, || {
            format!("must be ≥ {}", crate::intrinsic::MIN_GRID_POINTS)
        })?;
        if let Some(l) = b.ridge_lambda {
            field("bmaxs.ridge_lambda", l > 0.0, || format!("must be > 0, got {l}"))?;
        }
        if let Some(sn) = b.sigma_noise {
            field("bmaxs.sigma_noise", sn >= 0.0, || format!("must be ≥ 0, got {sn}"))?;
        }
        let c = &self.scp;
        in_open_unit("scp.epsilon", c.epsilon)?;
        in_open_unit("scp.delta", c.delta)?;
        field("scp.n_override", c.n_override != Some(0), || "must be ≥ 1".into())?;
        field("scp.t_override", c.t_override != Some(0), || "must be ≥ 1".into())?;
        field("scp.n_cap", c.n_cap >= 1, || "must be ≥ 1".into())?;
        field("scp.t_cap", c.t_cap >= 1, || "must be ≥ 1".into())?;
        let i = &self.intrinsic;
        field("intrinsic.depth", i.depth >= 1, || "must be ≥ 1".into())?;
        field("intrinsic.epsilon", i.epsilon > 0.0, || format!("must be > 0, got {}", i.epsilon))?;
        field("intrinsic.probes", i.probes >= 1, || "must be ≥ 1".into())?;
        field("intrinsic.samples", i.samples != Some(0), || "must be ≥ 1".into())?;
        let p = &self.purity;
        field("purity.n", (1..=crate::qsim::DEFAULT_MAX_QUBITS).contains(&p.n) || p.trials == 0, || {
            format!("Monte Carlo needs n in [1, {}], got {}", crate::qsim::DEFAULT_MAX_QUBITS, p.n)
        })?;
        field("purity.n", p.n >= 1, || "must be ≥ 1".into())?;
        field("purity.depths", !p.depths.is_empty() && p.depths.iter().all(|d| *d >= 1), || {
            "must be a non-empty list of depths ≥ 1".into()
        })?;
        field("purity.channel", p.channel != ChannelKind::Custom, || "custom channels cannot be given in a config file".into())?;
        field("purity.strength", (0.0..=1.0).contains(&p.strength), || format!("must lie in [0, 1], got {}", p.strength))?;
        field("purity.trials", p.trials == 0 || p.trials >= crate::noise::MIN_TRIALS, || {
            format!("must be 0 or ≥ {}", crate::noise::MIN_TRIALS)
        })?;
        if let Some(t) = p.eta_target {
            in_open_unit("purity.eta_target", t)?;
        }
        let en = &self.entropy;
        field("entropy.eta", en.eta > 0.0 && en.eta <= 0.25, || format!("must lie in (0, 1/4], got {}", en.eta))?;
        field("entropy.eps", en.eps > 0.0 && en.eps <= 0.25, || format!("must lie in (0, 1/4], got {}", en.eps))?;
        field("entropy.shots", en.shots.is_none_or(|s| s >= 2), || "must be ≥ 2".into())?;
        field("entropy.parity_max_l", en.parity_max_l >= 1, || "must be ≥ 1".into())?;
        if let Some(t) = en.threshold {
            field("entropy.threshold", t > 0.0, || format!("must be > 0, got {t}"))?;
        }
        field("shadows.probes", self.shadows.probes >= 1, || "must be ≥ 1".into())?;
        field("shadows.probe_depth", self.shadows.probe_depth >= 1, || "must be ≥ 1".into())?;
        Ok(())
    }
}
