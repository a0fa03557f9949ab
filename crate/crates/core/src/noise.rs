//! Noise channels and the closed-form purity analytics built on them.
//!
//! The purity bound relates a channel's `F = Σ|Tr K_l|²` to the expected overlap
//! between a noisy trajectory and its noiseless counterpart under 2-design
//! layers:
//!
//! `η(R) = ((F-1)/(d²-1))^(R-1) · (F-1)/(d(d+1)) + 1/d`.
//!
//! [`monte_carlo_overlap`] estimates the same expectation directly with Haar
//! layers so the formula can be checked numerically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::linalg::{dim_of, C64};
use crate::qsim::{haar_random_unitary_with, DensityMatrix, KrausChannel, StateVector};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    LocalDepolarizing,
    GlobalDepolarizing,
    BitFlip,
    Identity,
    Custom,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::LocalDepolarizing => "local_depolarizing",
            ChannelKind::GlobalDepolarizing => "global_depolarizing",
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::Identity => "identity",
            ChannelKind::Custom => "custom",
        }
    }
}

/// A noise model applied after every circuit layer.
///
/// Local kinds act qubit-wise on all `n` qubits; global kinds act once on the
/// whole register. A `Custom` Kraus set on one qubit is local, on `n` qubits global.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub strength: f64,
    #[serde(skip)]
    pub custom_kraus: Option<KrausChannel>,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, strength: f64) -> Result<Self> {
        let spec = Self {
            kind,
            strength,
            custom_kraus: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn identity() -> Self {
        Self {
            kind: ChannelKind::Identity,
            strength: 0.0,
            custom_kraus: None,
        }
    }

    pub fn local_depolarizing(gamma: f64) -> Result<Self> {
        Self::new(ChannelKind::LocalDepolarizing, gamma)
    }

    pub fn global_depolarizing(p: f64) -> Result<Self> {
        Self::new(ChannelKind::GlobalDepolarizing, p)
    }

    pub fn custom(kraus: KrausChannel) -> Result<Self> {
        kraus.check_complete()?;
        Ok(Self {
            kind: ChannelKind::Custom,
            strength: 0.0,
            custom_kraus: Some(kraus),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(Error::InvalidArgument(format!(
                "channel strength {} outside [0,1]",
                self.strength
            )));
        }
        if self.kind == ChannelKind::Custom {
            match &self.custom_kraus {
                Some(k) => k.check_complete()?,
                None => return Err(Error::InvalidArgument("custom channel without Kraus operators".into())),
            }
        }
        Ok(())
    }

    /// The single-qubit Kraus set for local kinds.
    pub fn local_kraus(&self) -> Result<Option<KrausChannel>> {
        Ok(match self.kind {
            ChannelKind::LocalDepolarizing => Some(KrausChannel::depolarizing(self.strength)?),
            ChannelKind::BitFlip => Some(KrausChannel::bit_flip(self.strength)?),
            ChannelKind::Identity => Some(KrausChannel::identity(1)),
            ChannelKind::Custom => self.custom_kraus.clone().filter(|k| k.n_targets() == 1),
            ChannelKind::GlobalDepolarizing => None,
        })
    }

    /// Applies the channel to an `n`-qubit state (qubit-wise for local kinds).
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.validate()?;
        let n = rho.n();
        match self.kind {
            ChannelKind::Identity => Ok(rho.clone()),
            ChannelKind::GlobalDepolarizing => {
                let d = rho.dim();
                let p = self.strength;
                let mixed = DensityMatrix::maximally_mixed(n);
                let m = rho.matrix() * C64::new(1.0 - p, 0.0) + mixed.matrix() * C64::new(p, 0.0);
                let _ = d;
                Ok(DensityMatrix::from_raw(n, m))
            }
            _ => {
                if let Some(local) = self.local_kraus()? {
                    let mut out = rho.clone();
                    for q in 0..n {
                        out = out.apply_channel_trusted(&local, &[q]);
                    }
                    Ok(out)
                } else {
                    let k = self.custom_kraus.as_ref().expect("validated custom channel");
                    let targets: Vec<usize> = (0..n).collect();
                    rho.apply_channel(k, &targets)
                }
            }
        }
    }
}

/// `F` of the full `n`-qubit channel. Local channels contribute the product of per-qubit values.
pub fn channel_f_metric(channel: &ChannelSpec, n: usize) -> Result<f64> {
    channel.validate()?;
    let d = dim_of(n) as f64;
    Ok(match channel.kind {
        ChannelKind::GlobalDepolarizing => d * d * (1.0 - channel.strength) + channel.strength,
        _ => match channel.local_kraus()? {
            Some(k) => k.f_metric().powi(n as i32),
            None => {
                let k = channel.custom_kraus.as_ref().expect("validated custom channel");
                if k.n_targets() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "{}-qubit custom channel on {n} qubits",
                        k.n_targets()
                    )));
                }
                k.f_metric()
            }
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityBoundReport {
    pub f: f64,
    pub d: f64,
    pub depth: u32,
    pub eta: f64,
}

/// `η(R)` for a channel with metric `F` on `n` qubits.
pub fn purity_lower_bound(f: f64, n: usize, depth: u32) -> Result<f64> {
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be ≥ 1".into()));
    }
    if !(f >= 0.0) {
        return Err(Error::InvalidArgument(format!("F = {f} must be ≥ 0")));
    }
    let d = dim_of(n) as f64;
    let ratio = (f - 1.0) / (d * d - 1.0);
    Ok(ratio.powi(depth as i32 - 1) * (f - 1.0) / (d * (d + 1.0)) + 1.0 / d)
}

pub fn purity_report(channel: &ChannelSpec, n: usize, depth: u32) -> Result<PurityBoundReport> {
    let f = channel_f_metric(channel, n)?;
    Ok(PurityBoundReport {
        f,
        d: dim_of(n) as f64,
        depth,
        eta: purity_lower_bound(f, n, depth)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "depth")]
pub enum DepthBound {
    /// Largest depth whose bound stays at or above the target.
    Finite(u32),
    /// Noiseless channel: the bound never decays.
    Unbounded,
    /// Scan hit its cap while the bound still met the target.
    AtCap(u32),
}

pub const DEFAULT_DEPTH_SCAN_CAP: u32 = 10_000;

/// Largest `R` with `η(R) ≥ eta_target`, found by scanning `R = 1, 2, …` up to `cap`.
pub fn max_depth_for_purity(f: f64, n: usize, eta_target: f64, cap: u32) -> Result<DepthBound> {
    let d = dim_of(n) as f64;
    if !(eta_target > 1.0 / d && eta_target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target purity {eta_target} outside (1/d, 1) = ({}, 1)",
            1.0 / d
        )));
    }
    if (f - d * d).abs() <= 1e-12 * d * d {
        return Ok(DepthBound::Unbounded);
    }
    let mut best = 0;
    for depth in 1..=cap {
        if purity_lower_bound(f, n, depth)? >= eta_target {
            best = depth;
        } else if (f - 1.0) >= 0.0 {
            // η is monotone for F ≥ 1, so the first miss ends the scan
            return Ok(DepthBound::Finite(best));
        }
    }
    if best == cap {
        Ok(DepthBound::AtCap(cap))
    } else {
        Ok(DepthBound::Finite(best))
    }
}

/// Coefficient `c` in the large-depth form `R ≤ c · ln(1/η)` (natural log), i.e.
/// `1 / ln((d²-1)/(F-1))`. Infinite for a noiseless channel.
pub fn depth_log_coefficient(f: f64, n: usize) -> f64 {
    let d2 = (dim_of(n) as f64).powi(2);
    let decay = (d2 - 1.0).ln() - (f - 1.0).ln();
    if decay <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / decay
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Sample mean and standard error, summing in index order so results do not
/// depend on how the values were produced.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Single trial: Haar layers `U_1..U_R`, noisy and noiseless evolution of `|0ⁿ⟩`,
/// returns `⟨ψ_clean|ρ_noisy|ψ_clean⟩`.
fn overlap_trial(channel: &ChannelSpec, n: usize, depth: u32, stream: &RngStream) -> Result<f64> {
    let mut rng = stream.rng();
    let d = dim_of(n);
    let all: Vec<usize> = (0..n).collect();
    let mut noisy = DensityMatrix::zero(n);
    let mut clean = StateVector::zero(n);
    for _ in 0..depth {
        let u = haar_random_unitary_with(d, &mut rng)?;
        noisy = channel.apply(&noisy.apply_unitary_trusted(&u, &all))?;
        clean = clean.apply_unitary_trusted(&u, &all);
    }
    noisy.fidelity_pure(&clean)
}

pub const MIN_TRIALS: usize = 30;

/// Monte-Carlo estimate of the expected noisy/noiseless overlap over Haar layers.
pub fn monte_carlo_overlap(
    channel: &ChannelSpec,
    n: usize,
    depth: u32,
    trials: usize,
    stream: &RngStream,
) -> Result<OverlapEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidArgument(format!("trials = {trials} < {MIN_TRIALS}")));
    }
    if n == 0 || n > crate::qsim::DEFAULT_MAX_QUBITS {
        return Err(Error::CapExceeded {
            needed: n,
            cap: crate::qsim::DEFAULT_MAX_QUBITS,
        });
    }
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be ≥ 1".into()));
    }
    channel.validate()?;
    let values = (0..trials)
        .into_par_iter()
        .map(|t| overlap_trial(channel, n, depth, &stream.split(t as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let (mean, stderr) = mean_stderr(&values);
    Ok(OverlapEstimate { mean, stderr, trials })
}

/// Pauli-path bound `(1 - 0.75γ)^(n R) · R` on the rank of the noisy contraction map.
pub fn pauli_path_rank_bound(gamma: f64, n: usize, depth: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("γ = {gamma} outside [0,1]")));
    }
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be ≥ 1".into()));
    }
    Ok((1.0 - 0.75 * gamma).powf((n as f64) * depth as f64) * depth as f64)
}

/// Largest local noise rate `½(1 - e^{-ε})` compatible with accuracy `ε`.
pub fn noise_strength_threshold(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("ε = {epsilon} must be > 0")));
    }
    Ok(0.5 * (-(-epsilon).exp_m1()))
}

/// One CSV row of a purity-bound run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurityRow {
    pub n: usize,
    pub channel: String,
    pub strength: f64,
    pub depth: u32,
    pub f: f64,
    pub eta: f64,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::pauli::PauliString;

    fn explicit_local_f(gamma: f64, n: usize) -> f64 {
        let one = KrausChannel::depolarizing(gamma).unwrap();
        let mut k = one.clone();
        for _ in 1..n {
            k = k.tensor(&one);
        }
        k.f_metric()
    }

    #[test]
    fn f_metric_examples() {
        for n in 1..=3 {
            let d2 = (dim_of(n) * dim_of(n)) as f64;
            assert!((channel_f_metric(&ChannelSpec::identity(), n).unwrap() - d2).abs() < 1e-9);
            let full = ChannelSpec::global_depolarizing(1.0).unwrap();
            assert!((channel_f_metric(&full, n).unwrap() - 1.0).abs() < 1e-12);
            for g in [0.05, 0.1, 0.2, 1.0] {
                let f = channel_f_metric(&ChannelSpec::local_depolarizing(g).unwrap(), n).unwrap();
                assert!((f - (4.0 - 3.0 * g).powi(n as i32)).abs() < 1e-9);
                assert!((f - explicit_local_f(g, n)).abs() < 1e-9);
            }
        }
        // global depolarizing via explicit Pauli-expanded Kraus set
        let k = KrausChannel::global_depolarizing(2, 0.3).unwrap();
        let f = channel_f_metric(&ChannelSpec::global_depolarizing(0.3).unwrap(), 2).unwrap();
        assert!((k.f_metric() - f).abs() < 1e-9);
        assert_eq!(PauliString::all(2).len(), k.ops().len());
    }

    #[test]
    fn purity_bound_examples() {
        for n in 1..=3 {
            let d = dim_of(n) as f64;
            for r in 1..6 {
                assert!((purity_lower_bound(d * d, n, r).unwrap() - 1.0).abs() < 1e-12);
                assert_eq!(purity_lower_bound(1.0, n, r).unwrap(), 1.0 / d);
            }
        }
        let eta = purity_lower_bound(3.4, 1, 2).unwrap();
        assert!((eta - 0.82).abs() < 1e-12);
        assert!(purity_lower_bound(3.4, 1, 0).is_err());
    }

    #[test]
    fn purity_bound_is_monotone_and_floored() {
        let f = channel_f_metric(&ChannelSpec::local_depolarizing(0.1).unwrap(), 2).unwrap();
        let mut prev = f64::INFINITY;
        for r in 1..200 {
            let e = purity_lower_bound(f, 2, r).unwrap();
            assert!(e <= prev && e >= 0.25);
            prev = e;
        }
        assert!((prev - 0.25).abs() < 1e-6);
    }

    #[test]
    fn depth_scan() {
        let f = channel_f_metric(&ChannelSpec::local_depolarizing(0.05).unwrap(), 2).unwrap();
        let target = purity_lower_bound(f, 2, 5).unwrap();
        assert_eq!(max_depth_for_purity(f, 2, target, 10_000).unwrap(), DepthBound::Finite(5));
        assert_eq!(max_depth_for_purity(16.0, 2, 0.9, 10_000).unwrap(), DepthBound::Unbounded);
        assert!(max_depth_for_purity(f, 2, 0.2, 10_000).is_err());
        assert!(max_depth_for_purity(f, 2, 1.0, 10_000).is_err());
        // linear-scan oracle for the target 0.9
        let mut oracle = 0;
        let mut r = 1;
        while purity_lower_bound(f, 2, r).unwrap() >= 0.9 {
            oracle = r;
            r += 1;
        }
        assert_eq!(max_depth_for_purity(f, 2, 0.9, 10_000).unwrap(), DepthBound::Finite(oracle));
        assert_eq!(oracle, 1);
    }

    #[test]
    fn large_register_depth_coefficient() {
        // n = 50, local depolarizing p = 1e-3: the decay per layer is (1 - 3p/4)^n
        let f = (4.0f64 - 3e-3).powi(50);
        let c = depth_log_coefficient(f, 50);
        let expected = 1.0 / (-50.0 * (1.0f64 - 0.75e-3).ln());
        assert!((c - expected).abs() / expected < 1e-6, "{c} vs {expected}");
        assert!(depth_log_coefficient(16.0, 2).is_infinite());
    }

    #[test]
    fn monte_carlo_edge_channels() {
        let s = RngStream::new(1);
        let id = monte_carlo_overlap(&ChannelSpec::identity(), 2, 3, 40, &s).unwrap();
        assert!((id.mean - 1.0).abs() < 1e-10 && id.stderr < 1e-10);
        let full = ChannelSpec::global_depolarizing(1.0).unwrap();
        let e = monte_carlo_overlap(&full, 2, 1, 40, &s).unwrap();
        assert!((e.mean - 0.25).abs() < 1e-10);
        assert!(monte_carlo_overlap(&full, 2, 1, 10, &s).is_err());
    }

    #[test]
    fn monte_carlo_matches_bound_small_case() {
        let ch = ChannelSpec::local_depolarizing(0.2).unwrap();
        let est = monte_carlo_overlap(&ch, 1, 2, 2000, &RngStream::new(9)).unwrap();
        assert!((est.mean - 0.82).abs() < 3.0 * est.stderr + 1e-9, "{est:?}");
        let again = monte_carlo_overlap(&ch, 1, 2, 2000, &RngStream::new(9)).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn pauli_path_examples() {
        assert_eq!(pauli_path_rank_bound(0.0, 3, 4).unwrap(), 4.0);
        let v = pauli_path_rank_bound(1.0, 2, 3).unwrap();
        assert!((v - 0.25f64.powi(6) * 3.0).abs() < 1e-15);
        assert!(pauli_path_rank_bound(0.3, 2, 2).unwrap() < pauli_path_rank_bound(0.1, 2, 2).unwrap());
        assert!(pauli_path_rank_bound(1.2, 2, 2).is_err());
    }

    #[test]
    fn threshold_examples() {
        assert!(noise_strength_threshold(1e-12).unwrap() < 1e-12);
        assert!((noise_strength_threshold(2f64.ln()).unwrap() - 0.25).abs() < 1e-15);
        assert!((noise_strength_threshold(1.0).unwrap() - 0.5 * (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((noise_strength_threshold(1.0).unwrap() - 0.3161).abs() < 1e-4);
        assert!(noise_strength_threshold(0.0).is_err());
    }

    #[test]
    fn local_application_matches_tensor_channel() {
        let ch = ChannelSpec::local_depolarizing(0.3).unwrap();
        let rho = StateVector::zero(2).to_density();
        let fast = ch.apply(&rho).unwrap();
        let k = KrausChannel::depolarizing(0.3).unwrap();
        let slow = rho.apply_channel(&k.tensor(&k), &[0, 1]).unwrap();
        assert!(crate::qsim::linalg::max_abs_diff(fast.matrix(), slow.matrix()) < 1e-14);
        let g = ChannelSpec::global_depolarizing(0.4).unwrap().apply(&rho).unwrap();
        let slow = rho.apply_channel(&KrausChannel::global_depolarizing(2, 0.4).unwrap(), &[0, 1]).unwrap();
        assert!(crate::qsim::linalg::max_abs_diff(g.matrix(), slow.matrix()) < 1e-14);
    }
}
