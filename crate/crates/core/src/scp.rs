//! Complexity search over circuit depth.
//!
//! [`loss_value`] is the distinguishing loss `L_R(q, β)`. [`run_scp`] binary-searches the
//! smallest depth whose BMaxS predicate accepts, and [`approx_state`] builds the
//! gentle-measurement approximation from a weight vector.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ansatz::{prepare_qnn_state, sample_qnn_set, Architecture, Layout, ParameterSet, QnnSample};
use crate::bayesopt::{bmaxs, BmaxsConfig, BmaxsHooks, BmaxsResult, ObservationNoise, RegretLedger, UcbRun};
use crate::error::{Error, Result};
use crate::qsim::linalg::{eigvalsh, hermitian_function};
use crate::qsim::{trace_norm, CMatrix, DensityMatrix, StateVector, C64};
use crate::rng::RngStream;
use crate::shadows::{EstimatorMode, StateSource};

pub use crate::shadows::GramEstimate as LossInputs;

/// `|Σ_j β_j (Σ_i q_i G_ji − f_j)|`.
pub fn loss_value(q: &[f64], beta: &[f64], inputs: &LossInputs) -> Result<f64> {
    let n = inputs.f.len();
    if q.len() != n || beta.len() != n || inputs.g.nrows() != n || inputs.g.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "q has {}, β has {}, G is {}×{}, f has {n}",
            q.len(),
            beta.len(),
            inputs.g.nrows(),
            inputs.g.ncols()
        )));
    }
    let total: f64 = (0..n)
        .map(|j| {
            let c: f64 = (0..n).map(|i| q[i] * inputs.g[(j, i)]).sum::<f64>() - inputs.f[j];
            beta[j] * c
        })
        .sum();
    Ok(total.abs())
}

/// `M(β) = Σ_j β_j |Ψ_j⟩⟨Ψ_j|`.
pub fn observable(beta: &[f64], states: &[StateVector]) -> Result<CMatrix> {
    if beta.len() != states.len() || states.is_empty() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} states", beta.len(), states.len())));
    }
    let d = states[0].dim();
    let mut m = CMatrix::zeros(d, d);
    for (b, s) in beta.iter().zip(states) {
        if s.dim() != d {
            return Err(Error::DimensionMismatch("states of mixed dimension".into()));
        }
        let a = s.amplitudes();
        m += (a * a.adjoint()) * C64::new(*b, 0.0);
    }
    Ok(m)
}

/// `|Σ_i q_i Tr(M(β)(|Ψ_i⟩⟨Ψ_i| − ρ))|` evaluated with the explicit matrix `M(β)`.
pub fn explicit_loss(q: &[f64], beta: &[f64], states: &[StateVector], rho: &DensityMatrix) -> Result<f64> {
    if q.len() != states.len() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} states", q.len(), states.len())));
    }
    let m = observable(beta, states)?;
    let mut total = C64::new(0.0, 0.0);
    for (qi, s) in q.iter().zip(states) {
        let a = s.amplitudes();
        let diff = a * a.adjoint() - rho.matrix();
        total += (&m * diff).trace() * *qi;
    }
    Ok(total.re.abs())
}

/// Smallest integer `k ≥ 1` with `k ln n < n^{k/2 − 1} ε`, searched up to 256.
pub fn default_k_exponent(n: usize, epsilon: f64) -> u32 {
    let nf = n as f64;
    (1..=256u32)
        .find(|&k| (k as f64) * nf.ln() < nf.powf(k as f64 / 2.0 - 1.0) * epsilon)
        .unwrap_or(256)
}

/// Largest probed depth, `max(ceil(log₂ n), 2)`.
pub fn max_search_depth(n: usize) -> usize {
    let mut s = 0usize;
    while (1usize << s) < n {
        s += 1;
    }
    s.max(2)
}

/// Cap on probes made by [`run_scp`]: `ceil(log₂ log₂ n) + 2`.
pub fn probe_cap(n: usize) -> usize {
    let ll = (n as f64).log2().log2();
    (if ll > 0.0 { ll.ceil() as usize } else { 0 }) + 2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScpConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub layout: Layout,
    pub k_exponent: Option<u32>,
    pub n_override: Option<usize>,
    pub t_override: Option<usize>,
    pub n_cap: usize,
    pub t_cap: usize,
    /// Total GP iterations allowed across all probes; exceeding it yields Inconclusive.
    pub evaluation_budget: Option<usize>,
    pub bmaxs: BmaxsConfig,
}

impl Default for ScpConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            delta: 0.1,
            layout: Layout::Staircase,
            k_exponent: None,
            n_override: None,
            t_override: None,
            n_cap: 64,
            t_cap: 400,
            evaluation_budget: None,
            bmaxs: BmaxsConfig::default(),
        }
    }
}

impl ScpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {} outside (0,1)", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta = {} outside (0,1)", self.delta)));
        }
        if self.n_override == Some(0) || self.t_override == Some(0) || self.n_cap == 0 || self.t_cap == 0 {
            return Err(Error::InvalidArgument("sample and iteration caps must be ≥ 1".into()));
        }
        self.bmaxs.estimator.validate()
    }

    fn n_limit(&self) -> usize {
        self.n_override.unwrap_or(self.n_cap)
    }

    fn t_limit(&self) -> usize {
        self.t_override.unwrap_or(self.t_cap)
    }

    /// `(N, T)` at depth `arch.depth()`: the formula values and the capped values actually used.
    pub fn budget(&self, arch: &Architecture) -> Budget {
        let n = arch.n() as f64;
        let k = self.k_exponent.unwrap_or_else(|| default_k_exponent(arch.n(), self.epsilon));
        let n_formula = (arch.gate_count() as f64 * n * n / (self.epsilon * self.epsilon)).ceil();
        let n_used = (n_formula as usize).clamp(1, self.n_limit());
        let t_formula = (n_used as f64).powi(2) * n.powi(k as i32);
        let t_used = if t_formula >= self.t_limit() as f64 {
            self.t_limit()
        } else {
            (t_formula as usize).max(1)
        };
        Budget {
            n_formula,
            n_used,
            t_formula,
            t_used,
            k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub n_formula: f64,
    pub n_used: usize,
    pub t_formula: f64,
    pub t_used: usize,
    pub k: u32,
}

/// Test hooks. `anchor` is a parameter set at some depth `R₀`; at every probed depth `R ≥ R₀`
/// it replaces sample 0 after zero-padding.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScpHooks {
    pub anchor: Option<(usize, ParameterSet)>,
    pub bmaxs: BmaxsHooks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Yes,
    No,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub q: Vec<f64>,
    /// Minimum of `L(q, β)` over every β the optimizer probed.
    pub min_loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub depth: usize,
    pub accepted: bool,
    pub final_value: f64,
    pub best_value: f64,
    #[serde(rename = "T_used")]
    pub t_used: usize,
    #[serde(rename = "N_used")]
    pub n_used: usize,
    pub seed: u64,
    pub final_z: Vec<f64>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    pub n_cap: usize,
    pub t_cap: usize,
    pub k_exponent: u32,
    pub n_formula: f64,
    pub t_formula: f64,
    pub evaluation_budget: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScpVerdict {
    pub outcome: Outcome,
    pub r_min: Option<usize>,
    pub complexity_bound: Option<usize>,
    pub epsilon: f64,
    pub n: usize,
    pub layout: Layout,
    pub gates_per_layer: usize,
    pub max_depth: usize,
    pub probes: Vec<ProbeRecord>,
    pub caps: Caps,
    pub mode: EstimatorMode,
    pub observation_noise: ObservationNoise,
    pub seed: u64,
    pub notes: Vec<String>,
}

impl ScpVerdict {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn probe(&self, depth: usize) -> Option<&ProbeRecord> {
        self.probes.iter().find(|p| p.depth == depth)
    }
}

/// Largest over the probed `q` of the minimum over the probed `β` of `L(q, β)`.
pub fn best_witness(result: &BmaxsResult) -> Option<Witness> {
    let n = result.samples;
    let inputs = &result.inputs;
    let betas: Vec<&[f64]> = result.run.steps.iter().map(|s| &s.z[n..]).collect();
    let mut best: Option<Witness> = None;
    for s in &result.run.steps {
        let q = &s.z[..n];
        let c: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| q[i] * inputs.g[(j, i)]).sum::<f64>() - inputs.f[j])
            .collect();
        let min_loss = betas
            .iter()
            .map(|b| b.iter().zip(&c).map(|(x, y)| x * y).sum::<f64>().abs())
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|w| min_loss > w.min_loss) {
            best = Some(Witness { q: q.to_vec(), min_loss });
        }
    }
    best
}

/// Samples used at `arch.depth()`, with the anchor (if any) placed at index 0.
pub fn probe_samples(arch: &Architecture, count: usize, hooks: &ScpHooks, stream: &RngStream) -> Result<Vec<QnnSample>> {
    let mut samples = sample_qnn_set(arch, count, stream)?;
    if let Some((r0, params)) = &hooks.anchor {
        if *r0 <= arch.depth() {
            let padded = params.zero_padded(arch.parameter_count())?;
            let state = prepare_qnn_state(arch, &padded)?;
            samples[0] = QnnSample {
                index: 0,
                params: padded,
                state,
            };
        }
    }
    Ok(samples)
}

/// One BMaxS call at `depth`, seeded only by `(stream, depth)`.
pub fn probe_depth(
    source: &dyn StateSource,
    cfg: &ScpConfig,
    hooks: &ScpHooks,
    depth: usize,
    stream: &RngStream,
) -> Result<(ProbeRecord, BmaxsResult)> {
    let arch = Architecture::build(source.n(), cfg.layout, depth)?;
    let budget = cfg.budget(&arch);
    let probe_stream = stream.split_str("probe").split(depth as u64);
    let samples = probe_samples(&arch, budget.n_used, hooks, &probe_stream.split_str("samples"))?;
    let bcfg = BmaxsConfig {
        iterations: budget.t_used,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        ..cfg.bmaxs.clone()
    };
    let result = bmaxs(source, &samples, &bcfg, &hooks.bmaxs, &probe_stream.split_str("bmaxs"))?;
    let record = ProbeRecord {
        depth,
        accepted: result.accepted,
        final_value: result.final_value,
        best_value: result.best_value,
        t_used: budget.t_used,
        n_used: budget.n_used,
        seed: probe_stream.seed(),
        final_z: result.final_z.clone(),
        witness: best_witness(&result),
    };
    Ok((record, result))
}

/// GP-UCB trace of one probed depth.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeTrace {
    pub depth: usize,
    pub run: UcbRun,
    pub ledger: RegretLedger,
}

struct Search<'a> {
    source: &'a dyn StateSource,
    cfg: &'a ScpConfig,
    hooks: &'a ScpHooks,
    stream: &'a RngStream,
    cache: BTreeMap<usize, ProbeRecord>,
    order: Vec<usize>,
    traces: Vec<ProbeTrace>,
    spent: usize,
}

enum Probe {
    Done(bool),
    OutOfBudget,
}

impl Search<'_> {
    fn predicate(&mut self, depth: usize) -> Result<Probe> {
        if let Some(r) = self.cache.get(&depth) {
            return Ok(Probe::Done(r.accepted));
        }
        let arch = Architecture::build(self.source.n(), self.cfg.layout, depth)?;
        let t = self.cfg.budget(&arch).t_used;
        if let Some(limit) = self.cfg.evaluation_budget {
            if self.spent + t > limit {
                return Ok(Probe::OutOfBudget);
            }
        }
        let (record, result) = probe_depth(self.source, self.cfg, self.hooks, depth, self.stream)?;
        self.spent += t;
        self.traces.push(ProbeTrace {
            depth,
            run: result.run,
            ledger: result.ledger,
        });
        let accepted = record.accepted;
        self.cache.insert(depth, record);
        self.order.push(depth);
        Ok(Probe::Done(accepted))
    }
}

/// Binary search for the smallest accepting depth in `[1, max(ceil(log₂ n), 2)]`.
pub fn run_scp(source: &dyn StateSource, cfg: &ScpConfig, hooks: &ScpHooks, stream: &RngStream) -> Result<ScpVerdict> {
    run_scp_traced(source, cfg, hooks, stream).map(|(v, _)| v)
}

/// [`run_scp`] that also returns the GP-UCB trace of every probe, in probe order.
pub fn run_scp_traced(
    source: &dyn StateSource,
    cfg: &ScpConfig,
    hooks: &ScpHooks,
    stream: &RngStream,
) -> Result<(ScpVerdict, Vec<ProbeTrace>)> {
    cfg.validate()?;
    let n = source.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("the complexity search needs n ≥ 2, got {n}")));
    }
    let s_max = max_search_depth(n);
    let mut search = Search {
        source,
        cfg,
        hooks,
        stream,
        cache: BTreeMap::new(),
        order: Vec::new(),
        traces: Vec::new(),
        spent: 0,
    };
    let (mut r, mut s) = (1usize, s_max);
    let mut outcome = None;
    while s - r > 1 {
        let mid = (r + s) / 2;
        match search.predicate(mid)? {
            Probe::Done(true) => s = mid,
            Probe::Done(false) => r = mid,
            Probe::OutOfBudget => {
                outcome = Some((Outcome::Inconclusive, None));
                break;
            }
        }
    }
    if outcome.is_none() {
        outcome = Some(match search.predicate(r)? {
            Probe::Done(true) => (Outcome::Yes, Some(r)),
            Probe::OutOfBudget => (Outcome::Inconclusive, None),
            Probe::Done(false) => match search.predicate(s)? {
                Probe::Done(true) => (Outcome::Yes, Some(s)),
                Probe::Done(false) => (Outcome::No, None),
                Probe::OutOfBudget => (Outcome::Inconclusive, None),
            },
        });
    }
    let (outcome, r_min) = outcome.expect("search produced an outcome");
    let arch = Architecture::build(n, cfg.layout, s_max)?;
    let top = cfg.budget(&arch);
    let gates = arch.gates_per_layer();
    let probes: Vec<ProbeRecord> = search.order.iter().map(|d| search.cache[d].clone()).collect();
    let mut notes = vec![
        "acceptance tests the final GP iterate only; a max over (q, M(β)) below ε is not certified".to_string(),
    ];
    if top.n_used as f64 != top.n_formula || top.t_used as f64 != top.t_formula {
        notes.push(format!(
            "N and T capped at the deepest probe: N {} of {}, T {} of {:.3e}",
            top.n_used, top.n_formula, top.t_used, top.t_formula
        ));
    }
    let verdict = ScpVerdict {
        outcome,
        r_min,
        complexity_bound: r_min.map(|r| r * gates),
        epsilon: cfg.epsilon,
        n,
        layout: cfg.layout,
        gates_per_layer: gates,
        max_depth: s_max,
        probes,
        caps: Caps {
            n_cap: cfg.n_limit(),
            t_cap: cfg.t_limit(),
            k_exponent: top.k,
            n_formula: top.n_formula,
            t_formula: top.t_formula,
            evaluation_budget: cfg.evaluation_budget,
        },
        mode: cfg.bmaxs.estimator.mode,
        observation_noise: cfg.bmaxs.observation_noise,
        seed: stream.seed(),
        notes,
    };
    Ok((verdict, search.traces))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxState {
    /// `√M ρ √M`, not normalized.
    pub phi_hat: CMatrix,
    /// `‖Φ̂/Tr Φ̂ − ρ‖₁`.
    pub trace_dist: f64,
    /// `Tr(M ρ)`.
    pub overlap: f64,
    /// Largest negative eigenvalue of `M` set to zero before the square root.
    pub clamped: f64,
}

pub fn approx_state(beta: &[f64], samples: &[QnnSample], rho: &DensityMatrix) -> Result<ApproxState> {
    let states: Vec<StateVector> = samples.iter().map(|s| s.state.clone()).collect();
    approx_state_from(beta, &states, rho)
}

pub fn approx_state_from(beta: &[f64], states: &[StateVector], rho: &DensityMatrix) -> Result<ApproxState> {
    let m = observable(beta, states)?;
    if m.nrows() != rho.dim() {
        return Err(Error::DimensionMismatch(format!("observable of size {} for a {}-dim state", m.nrows(), rho.dim())));
    }
    let clamped = eigvalsh(&m).first().map_or(0.0, |v| (-v).max(0.0));
    let root = hermitian_function(&m, |x| x.max(0.0).sqrt());
    let phi_hat = &root * rho.matrix() * &root;
    let overlap = (&m * rho.matrix()).trace().re;
    let tr = phi_hat.trace().re;
    let trace_dist = if tr > 0.0 {
        let normalized = &phi_hat / C64::new(tr, 0.0);
        trace_norm(&(normalized - rho.matrix()))
    } else {
        f64::INFINITY
    };
    Ok(ApproxState {
        phi_hat,
        trace_dist,
        overlap,
        clamped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SsapReport {
    pub outcome: Outcome,
    pub upper_bound: Option<usize>,
    pub lower_bound: Option<f64>,
    pub ssap: Option<bool>,
    pub text: String,
}

pub fn ssap_report(verdict: &ScpVerdict, n: usize) -> SsapReport {
    let l = verdict.gates_per_layer;
    let log_n = (n as f64).log2();
    let mut text = String::new();
    let eps = verdict.epsilon;
    let (upper, lower, ssap) = match verdict.outcome {
        Outcome::Yes => {
            let r = verdict.r_min.unwrap_or(0);
            let bound = l * r;
            let holds = (r as f64) < log_n;
            let _ = writeln!(text, "outcome: YES at depth R_min = {r} (L = {l} gates per layer)");
            let _ = writeln!(text, "C_{eps}(rho) <= C^lim,A_{eps}(rho) <= L*R_min = {bound}");
            let _ = writeln!(
                text,
                "SSAP: {} (R_min = {r} {} log2 n = {log_n:.4})",
                if holds { "holds" } else { "not established" },
                if holds { "<" } else { ">=" }
            );
            (Some(bound), None, Some(holds))
        }
        Outcome::No => {
            let lb = l as f64 * log_n;
            let _ = writeln!(text, "outcome: NO up to depth {}", verdict.max_depth);
            let _ = writeln!(text, "C^lim,A_{eps}(rho) > L*log n = {l}*{log_n:.4} = {lb:.4}");
            let _ = writeln!(text, "SSAP: fails within depth {}", verdict.max_depth);
            if let Some(w) = verdict.probes.iter().filter_map(|p| p.witness.as_ref()).max_by(|a, b| a.min_loss.total_cmp(&b.min_loss)) {
                if w.min_loss > eps {
                    let _ = writeln!(text, "witness: min over probed beta of L(q, beta) = {:.6} > {eps}", w.min_loss);
                }
            }
            (None, Some(lb), Some(false))
        }
        Outcome::Inconclusive => {
            let depths: Vec<String> = verdict.probes.iter().map(|p| p.depth.to_string()).collect();
            let _ = writeln!(text, "outcome: INCONCLUSIVE (evaluation budget exhausted)");
            let _ = writeln!(text, "probed depths: [{}]", depths.join(", "));
            (None, None, None)
        }
    };
    for p in &verdict.probes {
        let _ = writeln!(
            text,
            "  depth {}: accepted={} final={:.6} best={:.6} N={} T={}",
            p.depth, p.accepted, p.final_value, p.best_value, p.n_used, p.t_used
        );
    }
    SsapReport {
        outcome: verdict.outcome,
        upper_bound: upper,
        lower_bound: lower,
        ssap,
        text,
    }
}

/// Exact Gram data for `states` against `rho`.
pub fn exact_inputs(states: &[StateVector], rho: &DensityMatrix) -> Result<LossInputs> {
    let count = states.len();
    Ok(LossInputs {
        g: crate::shadows::exact_gram(states)?,
        f: states.iter().map(|s| rho.fidelity_pure(s)).collect::<Result<_>>()?,
        g_stderr: DMatrix::zeros(count, count),
        f_stderr: vec![0.0; count],
        mode: EstimatorMode::Exact,
    })
}
