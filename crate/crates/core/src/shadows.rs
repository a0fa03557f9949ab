//! Classical shadows with global random unitaries.
//!
//! A snapshot is a unitary (stored as the seed that regenerates it) and a
//! computational-basis outcome. The inverted snapshot
//! `ρ̂ = (d+1) U†|b⟩⟨b|U − I` is an unbiased estimate of the measured state for
//! any unitary 2-design. Fidelities `⟨ψ|ρ̂|ψ⟩ = (d+1)|⟨b|U|ψ⟩|² − 1` are
//! evaluated without forming `ρ̂`.

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::linalg::{apply_to_vector, dim_of, identity, CMatrix, CVector, C64, ONE};
use crate::qsim::{haar_random_unitary, DensityMatrix, Pauli, StateVector};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    HaarGlobal,
    /// Products of `20 n²` random `H`, `S`, `CNOT` generators; only approximately uniform.
    CliffordGlobal,
    /// Always the identity. Not a 2-design; exists for deterministic tests.
    Identity,
}

impl Ensemble {
    pub fn is_approximate(self) -> bool {
        matches!(self, Ensemble::CliffordGlobal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowSnapshot {
    pub unitary_seed: u64,
    pub outcome: usize,
}

/// Regenerates the unitary of a snapshot from its seed.
pub fn snapshot_unitary(ensemble: Ensemble, n: usize, seed: u64) -> Result<CMatrix> {
    let d = dim_of(n);
    match ensemble {
        Ensemble::HaarGlobal => haar_random_unitary(d, &RngStream::new(seed)),
        Ensemble::Identity => Ok(identity(d)),
        Ensemble::CliffordGlobal => Ok(random_clifford_word(n, &RngStream::new(seed))),
    }
}

fn random_clifford_word(n: usize, stream: &RngStream) -> CMatrix {
    let mut rng = stream.rng();
    let h = {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_row_slice(2, 2, &[ONE * s, ONE * s, ONE * s, -ONE * s])
    };
    let s_gate = CMatrix::from_row_slice(2, 2, &[ONE, C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0)]);
    let cnot = {
        let mut m = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(r, c)] = ONE;
        }
        m
    };
    let d = dim_of(n);
    let mut cols: Vec<CVector> = (0..d)
        .map(|i| {
            let mut v = CVector::zeros(d);
            v[i] = ONE;
            v
        })
        .collect();
    let kinds = if n >= 2 { 3 } else { 2 };
    for _ in 0..20 * n * n {
        let (gate, targets): (&CMatrix, Vec<usize>) = match rng.random_range(0..kinds) {
            0 => (&h, vec![rng.random_range(0..n)]),
            1 => (&s_gate, vec![rng.random_range(0..n)]),
            _ => {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                (&cnot, vec![a, b])
            }
        };
        for c in cols.iter_mut() {
            *c = apply_to_vector(c, n, gate, &targets);
        }
    }
    CMatrix::from_columns(&cols)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowSet {
    pub n: usize,
    pub ensemble: Ensemble,
    pub seed: u64,
    pub snapshots: Vec<ShadowSnapshot>,
}

fn outcome_distribution(rho: &DensityMatrix, u: &CMatrix) -> Vec<f64> {
    let m = rho.matrix();
    (0..u.nrows())
        .map(|b| {
            let row = u.row(b);
            let v = m * row.adjoint();
            (row * v)[(0, 0)].re.max(0.0)
        })
        .collect()
}

/// Draws `count` snapshots of `rho`. Snapshot `k` uses the child stream `split(k)`.
pub fn collect_shadows(rho: &DensityMatrix, count: usize, ensemble: Ensemble, stream: &RngStream) -> Result<ShadowSet> {
    if count < 1 {
        return Err(Error::InvalidArgument("shadow count must be ≥ 1".into()));
    }
    let n = rho.n();
    let snapshots = (0..count)
        .into_par_iter()
        .map(|k| {
            let child = stream.split(k as u64);
            let unitary_seed = child.split(0).seed();
            let u = snapshot_unitary(ensemble, n, unitary_seed)?;
            let probs = outcome_distribution(rho, &u);
            let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidState(format!("outcome distribution: {e}")))?;
            let outcome = dist.sample(&mut child.split(1).rng());
            Ok(ShadowSnapshot { unitary_seed, outcome })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShadowSet {
        n,
        ensemble,
        seed: stream.seed(),
        snapshots,
    })
}

impl ShadowSet {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: ShadowSet = serde_json::from_str(text)?;
        if set.snapshots.is_empty() {
            return Err(Error::Format("empty shadow set".into()));
        }
        let d = dim_of(set.n);
        if let Some(s) = set.snapshots.iter().find(|s| s.outcome >= d) {
            return Err(Error::Format(format!("outcome {} on {} qubits", s.outcome, set.n)));
        }
        Ok(set)
    }

    /// `(d+1)|⟨b|U|ψ⟩|² − 1` for every snapshot (rows) and probe (columns).
    pub fn probe_values(&self, probes: &[StateVector]) -> Result<Vec<Vec<f64>>> {
        if let Some(p) = probes.iter().find(|p| p.n() != self.n) {
            return Err(Error::DimensionMismatch(format!("{}-qubit probe for {}-qubit shadows", p.n(), self.n)));
        }
        let d1 = (dim_of(self.n) + 1) as f64;
        self.snapshots
            .par_iter()
            .map(|s| {
                let u = snapshot_unitary(self.ensemble, self.n, s.unitary_seed)?;
                let row = u.row(s.outcome);
                Ok(probes
                    .iter()
                    .map(|p| d1 * (row * p.amplitudes())[(0, 0)].norm_sqr() - 1.0)
                    .collect())
            })
            .collect()
    }

    /// Average of the inverted snapshots.
    pub fn mean_estimate(&self) -> Result<CMatrix> {
        let d = dim_of(self.n);
        let mut acc = CMatrix::zeros(d, d);
        for s in &self.snapshots {
            acc += invert_snapshot(self.ensemble, self.n, s)?;
        }
        Ok(acc / C64::new(self.len() as f64, 0.0))
    }
}

/// `(d+1) U†|b⟩⟨b|U − I`.
pub fn invert_snapshot(ensemble: Ensemble, n: usize, snapshot: &ShadowSnapshot) -> Result<CMatrix> {
    let d = dim_of(n);
    if snapshot.outcome >= d {
        return Err(Error::InvalidArgument(format!("outcome {} on {n} qubits", snapshot.outcome)));
    }
    let u = snapshot_unitary(ensemble, n, snapshot.unitary_seed)?;
    let v = u.row(snapshot.outcome).adjoint();
    Ok(&v * v.adjoint() * C64::new((d + 1) as f64, 0.0) - identity(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0 }
    }
}

/// Median of means with round-robin batches (`k % batches`).
///
/// The reported error is `1.2533·sd(batch means)/√K`, the large-sample standard
/// error of a median, or the plain standard error of the mean when `K = 1`.
pub fn median_of_means(values: &[f64], batches: usize) -> Result<Estimate> {
    let m = values.len();
    if batches < 1 || batches > m {
        return Err(Error::InvalidArgument(format!("{batches} batches for {m} values")));
    }
    if batches == 1 {
        let (mean, stderr) = crate::noise::mean_stderr(values);
        return Ok(Estimate { value: mean, stderr });
    }
    let mut sums = vec![0.0; batches];
    let mut counts = vec![0usize; batches];
    for (k, v) in values.iter().enumerate() {
        sums[k % batches] += v;
        counts[k % batches] += 1;
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    let mut sorted = means.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = if batches % 2 == 1 {
        sorted[batches / 2]
    } else {
        0.5 * (sorted[batches / 2 - 1] + sorted[batches / 2])
    };
    let (_, se_mean) = crate::noise::mean_stderr(&means);
    Ok(Estimate {
        value: median,
        stderr: 1.2533 * se_mean,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMode {
    Exact,
    Shadow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub mode: EstimatorMode,
    pub num_snapshots: usize,
    pub mom_batches: usize,
    pub ensemble: Ensemble,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            mode: EstimatorMode::Exact,
            num_snapshots: 1000,
            mom_batches: 10,
            ensemble: Ensemble::HaarGlobal,
        }
    }
}

impl EstimatorConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn shadow(num_snapshots: usize, mom_batches: usize) -> Self {
        Self {
            mode: EstimatorMode::Shadow,
            num_snapshots,
            mom_batches,
            ensemble: Ensemble::HaarGlobal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mom_batches < 1 {
            return Err(Error::InvalidArgument("mom_batches must be ≥ 1".into()));
        }
        if self.mode == EstimatorMode::Shadow && self.num_snapshots < self.mom_batches {
            return Err(Error::InvalidArgument(format!(
                "num_snapshots = {} < mom_batches = {}",
                self.num_snapshots, self.mom_batches
            )));
        }
        Ok(())
    }
}

/// Snapshot budget `ceil(ln(1/δ)·N²/ε²)`, capped at `cap`.
pub fn default_snapshot_count(epsilon: f64, delta: f64, n_samples: usize, cap: usize) -> usize {
    let eps1 = epsilon / n_samples as f64;
    let raw = ((1.0 / delta).ln() / (eps1 * eps1)).ceil();
    if raw.is_finite() && raw >= 1.0 {
        (raw as usize).min(cap)
    } else {
        cap
    }
}

/// Access to an unknown state. Shadow-only sources refuse to reveal the density matrix.
pub trait StateSource: Sync {
    fn n(&self) -> usize;
    fn snapshots(&self, count: usize, ensemble: Ensemble, stream: &RngStream) -> Result<ShadowSet>;
    fn exact(&self) -> Option<&DensityMatrix>;
}

impl StateSource for DensityMatrix {
    fn n(&self) -> usize {
        DensityMatrix::n(self)
    }

    fn snapshots(&self, count: usize, ensemble: Ensemble, stream: &RngStream) -> Result<ShadowSet> {
        collect_shadows(self, count, ensemble, stream)
    }

    fn exact(&self) -> Option<&DensityMatrix> {
        Some(self)
    }
}

/// A state reachable only through measurements.
#[derive(Clone, Debug)]
pub struct SealedState(DensityMatrix);

impl SealedState {
    pub fn new(rho: DensityMatrix) -> Self {
        Self(rho)
    }
}

impl StateSource for SealedState {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn snapshots(&self, count: usize, ensemble: Ensemble, stream: &RngStream) -> Result<ShadowSet> {
        collect_shadows(&self.0, count, ensemble, stream)
    }

    fn exact(&self) -> Option<&DensityMatrix> {
        None
    }
}

fn require_exact(source: &dyn StateSource) -> Result<&DensityMatrix> {
    source
        .exact()
        .ok_or_else(|| Error::InvalidArgument("exact mode needs a state source that exposes its density matrix".into()))
}

pub fn estimate_fidelity(
    source: &dyn StateSource,
    psi: &StateVector,
    cfg: &EstimatorConfig,
    stream: &RngStream,
) -> Result<Estimate> {
    cfg.validate()?;
    if source.n() != psi.n() {
        return Err(Error::DimensionMismatch(format!("{} vs {} qubits", source.n(), psi.n())));
    }
    match cfg.mode {
        EstimatorMode::Exact => Ok(Estimate::exact(require_exact(source)?.fidelity_pure(psi)?)),
        EstimatorMode::Shadow => {
            let shadows = source.snapshots(cfg.num_snapshots, cfg.ensemble, stream)?;
            let vals: Vec<f64> = shadows.probe_values(std::slice::from_ref(psi))?.into_iter().map(|r| r[0]).collect();
            median_of_means(&vals, cfg.mom_batches)
        }
    }
}

/// Gram matrix `G_ij = |⟨Ψ_i|Ψ_j⟩|²` and fidelities `f_i = ⟨Ψ_i|ρ|Ψ_i⟩`, with standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct GramEstimate {
    pub g: DMatrix<f64>,
    pub f: Vec<f64>,
    pub g_stderr: DMatrix<f64>,
    pub f_stderr: Vec<f64>,
    pub mode: EstimatorMode,
}

pub fn exact_gram(states: &[StateVector]) -> Result<DMatrix<f64>> {
    let n = states.len();
    let mut g = DMatrix::from_element(n, n, 0.0);
    for i in 0..n {
        g[(i, i)] = 1.0;
        for j in 0..i {
            let v = states[i].overlap(&states[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

fn mom_column(values: &[Vec<f64>], col: usize, batches: usize) -> Result<Estimate> {
    let v: Vec<f64> = values.iter().map(|r| r[col]).collect();
    median_of_means(&v, batches)
}

pub fn estimate_gram(
    states: &[StateVector],
    source: &dyn StateSource,
    cfg: &EstimatorConfig,
    stream: &RngStream,
) -> Result<GramEstimate> {
    cfg.validate()?;
    let count = states.len();
    if count == 0 {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    if let Some(s) = states.iter().find(|s| s.n() != source.n()) {
        return Err(Error::DimensionMismatch(format!("{} vs {} qubits", s.n(), source.n())));
    }
    match cfg.mode {
        EstimatorMode::Exact => {
            let rho = require_exact(source)?;
            Ok(GramEstimate {
                g: exact_gram(states)?,
                f: states.iter().map(|s| rho.fidelity_pure(s)).collect::<Result<_>>()?,
                g_stderr: DMatrix::from_element(count, count, 0.0),
                f_stderr: vec![0.0; count],
                mode: EstimatorMode::Exact,
            })
        }
        EstimatorMode::Shadow => {
            let target = source.snapshots(cfg.num_snapshots, cfg.ensemble, &stream.split_str("target"))?;
            let fv = target.probe_values(states)?;
            let mut f = Vec::with_capacity(count);
            let mut f_stderr = Vec::with_capacity(count);
            for i in 0..count {
                let e = mom_column(&fv, i, cfg.mom_batches)?;
                f.push(e.value);
                f_stderr.push(e.stderr);
            }
            let per_sample: Vec<Vec<Estimate>> = states
                .par_iter()
                .enumerate()
                .map(|(j, s)| {
                    let shadows = collect_shadows(&s.to_density(), cfg.num_snapshots, cfg.ensemble, &stream.split_str("gram").split(j as u64))?;
                    let vals = shadows.probe_values(states)?;
                    (0..count).map(|i| mom_column(&vals, i, cfg.mom_batches)).collect()
                })
                .collect::<Result<_>>()?;
            let mut g = DMatrix::from_element(count, count, 0.0);
            let mut g_stderr = DMatrix::from_element(count, count, 0.0);
            for i in 0..count {
                g[(i, i)] = 1.0;
                for j in 0..i {
                    let (a, b) = (per_sample[j][i], per_sample[i][j]);
                    g[(i, j)] = 0.5 * (a.value + b.value);
                    g[(j, i)] = g[(i, j)];
                    g_stderr[(i, j)] = 0.5 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
                    g_stderr[(j, i)] = g_stderr[(i, j)];
                }
            }
            Ok(GramEstimate {
                g,
                f,
                g_stderr,
                f_stderr,
                mode: EstimatorMode::Shadow,
            })
        }
    }
}

/// `⟨P⟩` estimate for a Pauli observable from a shadow set, used in diagnostics.
pub fn pauli_expectation(shadows: &ShadowSet, letters: &[Pauli]) -> Result<f64> {
    let p = crate::qsim::PauliString::new(letters.to_vec());
    if p.n() != shadows.n {
        return Err(Error::DimensionMismatch(format!("{}-qubit Pauli on {} qubits", p.n(), shadows.n)));
    }
    let m = p.matrix();
    let mean = shadows.mean_estimate()?;
    Ok((m * mean).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::linalg::{max_abs_diff, unitarity_deviation};

    fn random_pure(n: usize, seed: u64) -> StateVector {
        let u = haar_random_unitary(dim_of(n), &RngStream::new(seed)).unwrap();
        StateVector::new(n, u.column(0).into_owned()).unwrap()
    }

    fn random_mixed(n: usize, seed: u64) -> DensityMatrix {
        let a = random_pure(n, seed).to_density();
        let b = random_pure(n, seed ^ 0x55).to_density();
        DensityMatrix::new(n, (a.matrix() * C64::new(0.7, 0.0)) + b.matrix() * C64::new(0.3, 0.0)).unwrap()
    }

    #[test]
    fn identity_ensemble_on_zero_state() {
        let s = collect_shadows(&DensityMatrix::zero(2), 50, Ensemble::Identity, &RngStream::new(1)).unwrap();
        assert!(s.snapshots.iter().all(|x| x.outcome == 0));
    }

    #[test]
    fn inversion_examples() {
        let snap = ShadowSnapshot { unitary_seed: 0, outcome: 0 };
        let m = invert_snapshot(Ensemble::Identity, 1, &snap).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[ONE * 2.0, C64::new(0.0, 0.0), C64::new(0.0, 0.0), -ONE]);
        assert!(max_abs_diff(&m, &expected) < 1e-15);
        for seed in 0..20 {
            let snap = ShadowSnapshot { unitary_seed: seed, outcome: (seed % 4) as usize };
            let m = invert_snapshot(Ensemble::HaarGlobal, 2, &snap).unwrap();
            assert!((m.trace() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn determinism_and_serialization() {
        let rho = random_mixed(2, 3);
        let a = collect_shadows(&rho, 200, Ensemble::HaarGlobal, &RngStream::new(8)).unwrap();
        let b = collect_shadows(&rho, 200, Ensemble::HaarGlobal, &RngStream::new(8)).unwrap();
        assert_eq!(a, b);
        let back = ShadowSet::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);
        let u1 = snapshot_unitary(a.ensemble, 2, a.snapshots[3].unitary_seed).unwrap();
        let u2 = snapshot_unitary(back.ensemble, 2, back.snapshots[3].unitary_seed).unwrap();
        assert_eq!(u1, u2);
    }

    #[test]
    fn outcome_frequencies_for_fixed_unitary() {
        let rho = random_mixed(1, 4);
        let u = haar_random_unitary(2, &RngStream::new(17)).unwrap();
        let probs = outcome_distribution(&rho, &u);
        let dist = WeightedIndex::new(&probs).unwrap();
        let mut rng = RngStream::new(5).rng();
        let m = 10_000;
        let ones = (0..m).filter(|_| dist.sample(&mut rng) == 1).count() as f64 / m as f64;
        let sd = (probs[1] * probs[0] / m as f64).sqrt();
        assert!((ones - probs[1]).abs() < 3.0 * sd);
    }

    #[test]
    fn fidelity_estimates() {
        let psi = random_pure(2, 12);
        let rho = psi.to_density();
        let exact = estimate_fidelity(&rho, &psi, &EstimatorConfig::exact(), &RngStream::new(0)).unwrap();
        assert_eq!(exact, Estimate::exact(rho.fidelity_pure(&psi).unwrap()));
        let cfg = EstimatorConfig::shadow(10_000, 10);
        let e = estimate_fidelity(&rho, &psi, &cfg, &RngStream::new(3)).unwrap();
        assert!((e.value - 1.0).abs() < 3.0 * e.stderr, "{e:?}");
        let mixed = DensityMatrix::maximally_mixed(2);
        let e = estimate_fidelity(&mixed, &psi, &cfg, &RngStream::new(4)).unwrap();
        assert!((e.value - 0.25).abs() < 3.0 * e.stderr, "{e:?}");
        let sealed = SealedState::new(mixed);
        assert!(estimate_fidelity(&sealed, &psi, &EstimatorConfig::exact(), &RngStream::new(0)).is_err());
        assert!(estimate_fidelity(&sealed, &psi, &cfg, &RngStream::new(0)).is_ok());
    }

    #[test]
    fn gram_examples() {
        let one = vec![random_pure(2, 1)];
        let rho = random_mixed(2, 2);
        let g = estimate_gram(&one, &rho, &EstimatorConfig::exact(), &RngStream::new(0)).unwrap();
        assert_eq!(g.g[(0, 0)], 1.0);
        assert!((g.f[0] - rho.fidelity_pure(&one[0]).unwrap()).abs() < 1e-15);
        let pair = vec![StateVector::basis(2, 0).unwrap(), StateVector::basis(2, 3).unwrap()];
        let g = estimate_gram(&pair, &rho, &EstimatorConfig::exact(), &RngStream::new(0)).unwrap();
        assert_eq!(g.g[(0, 1)], 0.0);
        let shadow = estimate_gram(&pair, &rho, &EstimatorConfig::shadow(400, 4), &RngStream::new(0)).unwrap();
        assert_eq!(shadow.g, shadow.g.transpose());
        assert!((0..2).all(|i| shadow.g[(i, i)] == 1.0));
    }

    #[test]
    fn median_of_means_rules() {
        let v: Vec<f64> = (0..10).map(|x| x as f64).collect();
        let e = median_of_means(&v, 1).unwrap();
        assert!((e.value - 4.5).abs() < 1e-15);
        // batches {0,5},{1,6},{2,7},{3,8},{4,9} -> means 2.5..6.5, median 4.5
        assert!((median_of_means(&v, 5).unwrap().value - 4.5).abs() < 1e-15);
        assert!(median_of_means(&v, 11).is_err());
        assert!(EstimatorConfig::shadow(5, 10).validate().is_err());
    }

    #[test]
    fn clifford_words_are_unitary() {
        for n in 1..=3 {
            let u = snapshot_unitary(Ensemble::CliffordGlobal, n, 77).unwrap();
            assert!(unitarity_deviation(&u) < 1e-10);
        }
        assert!(Ensemble::CliffordGlobal.is_approximate());
    }

    #[test]
    fn snapshot_budget() {
        assert_eq!(default_snapshot_count(0.5, 0.1, 2, usize::MAX), ((10f64).ln() * 16.0).ceil() as usize);
        assert_eq!(default_snapshot_count(0.01, 0.01, 64, 5000), 5000);
    }
}
