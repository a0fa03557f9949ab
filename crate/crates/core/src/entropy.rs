//! Polynomial entropy estimation from multi-copy trace powers.
//!
//! `S(ρ) = Tr(−ρ ln ρ)` is approximated by `Σ_l a_l Tr(ρ^l)` where `P(x) = Σ_l a_l x^l` is the
//! truncated Taylor series of `−x ln x` about `1/2`. Each `Tr(ρ^l)` comes from a Hadamard test
//! with a controlled cyclic shift of `l` copies. The constant term multiplies `Tr(ρ^0) = 2^n`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::linalg::dim_of;
use crate::qsim::{max_total_dim, CMatrix, DensityMatrix, C64};
use crate::rng::RngStream;
use crate::shadows::Estimate;

pub const MAX_POLY_DEGREE: usize = 64;
pub const SELF_CHECK_GRID: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyApprox {
    pub degree: usize,
    pub eta: f64,
    pub eps: f64,
    /// Monomial coefficients `a_0..a_d`.
    pub coefficients: Vec<f64>,
    /// Coefficients in powers of `x − 1/2`.
    pub taylor: Vec<f64>,
    pub bound: f64,
    /// Largest `|P − S|` on the self-check grid over `[η, 1]`.
    pub max_grid_error: f64,
    pub initial_degree: usize,
}

pub fn entropy_fn(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

fn taylor_coefficients(degree: usize) -> Vec<f64> {
    let ln2 = std::f64::consts::LN_2;
    (0..=degree)
        .map(|k| match k {
            0 => ln2 / 2.0,
            1 => ln2 - 1.0,
            _ => {
                let k = k as f64;
                let sign = if (k as usize) % 2 == 0 { -1.0 } else { 1.0 };
                sign * 2f64.powf(k - 1.0) / (k * (k - 1.0))
            }
        })
        .collect()
}

fn monomial_coefficients(taylor: &[f64]) -> Vec<f64> {
    let d = taylor.len();
    let mut out = vec![0.0; d];
    for (k, c) in taylor.iter().enumerate() {
        let mut binom = 1.0;
        for l in 0..=k {
            if l > 0 {
                binom = binom * (k - l + 1) as f64 / l as f64;
            }
            out[l] += c * binom * (-0.5f64).powi((k - l) as i32);
        }
    }
    out
}

fn grid(eta: f64, points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| eta + (1.0 - eta) * i as f64 / (points - 1) as f64)
}

impl PolyApprox {
    /// `2ε √(−ln η)`.
    pub fn error_bound(eta: f64, eps: f64) -> f64 {
        2.0 * eps * (-eta.ln()).sqrt()
    }

    fn with_degree(eta: f64, eps: f64, degree: usize, initial_degree: usize) -> Self {
        let taylor = taylor_coefficients(degree);
        let coefficients = monomial_coefficients(&taylor);
        let mut p = Self {
            degree,
            eta,
            eps,
            coefficients,
            taylor,
            bound: Self::error_bound(eta, eps),
            max_grid_error: f64::INFINITY,
            initial_degree,
        };
        p.max_grid_error = grid(eta, SELF_CHECK_GRID)
            .chain([0.25, 0.5, 0.75, 1.0].into_iter().filter(|x| *x >= eta))
            .map(|x| (p.eval(x) - entropy_fn(x)).abs())
            .fold(0.0, f64::max);
        p
    }

    /// Horner evaluation in `x − 1/2`.
    pub fn eval(&self, x: f64) -> f64 {
        let t = x - 0.5;
        self.taylor.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// Evaluation through the monomial coefficients used by the estimator.
    pub fn eval_monomial(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn passes(&self) -> bool {
        self.max_grid_error <= self.bound
    }
}

/// Degree `ceil((1/η) ln(1/(ηε)))`, raised until the grid self-check passes on `[η, 1]`.
pub fn entropy_poly(eta: f64, eps: f64) -> Result<PolyApprox> {
    if !(eta > 0.0 && eta <= 0.25) || !(eps > 0.0 && eps <= 0.25) {
        return Err(Error::InvalidArgument(format!("η = {eta}, ε = {eps}: both must lie in (0, 1/4]")));
    }
    let d0 = ((1.0 / eta) * (1.0 / (eta * eps)).ln()).ceil().max(1.0) as usize;
    let start = d0.min(MAX_POLY_DEGREE);
    let mut last = None;
    for d in start..=MAX_POLY_DEGREE {
        let p = PolyApprox::with_degree(eta, eps, d, d0);
        if p.passes() {
            return Ok(p);
        }
        last = Some(p.max_grid_error);
    }
    Err(Error::SelfCheck(format!(
        "max |P − S| = {:.3e} exceeds {:.3e} at degree {MAX_POLY_DEGREE}",
        last.unwrap_or(f64::NAN),
        PolyApprox::error_bound(eta, eps)
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellMode {
    ExactExpectation,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellRunConfig {
    pub l: u32,
    pub shots: usize,
    pub mode: BellMode,
}

/// `ceil(n² ln² n)·100`, at least 100.
pub fn default_shots(n: usize) -> usize {
    let nf = n as f64;
    ((nf * nf * nf.ln().powi(2)).ceil().max(1.0) as usize) * 100
}

fn check_dense_cap(qubits: usize) -> Result<()> {
    let cap = max_total_dim();
    if qubits >= usize::BITS as usize || (1usize << qubits) > cap {
        return Err(Error::CapExceeded {
            needed: if qubits >= usize::BITS as usize { usize::MAX } else { 1 << qubits },
            cap,
        });
    }
    Ok(())
}

/// Ancilla `⟨σ_x⟩` of the Hadamard test, contracted along the copy cycle: `Re Tr(ρ·ρ⋯ρ)`.
pub fn hadamard_test_expectation(rho: &DensityMatrix, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be ≥ 1".into()));
    }
    let mut acc = rho.matrix().clone();
    for _ in 1..l {
        acc = &acc * rho.matrix();
    }
    Ok(acc.trace().re)
}

/// `S_l` on `l` registers of `n` qubits: `|x₁,…,x_l⟩ ↦ |x₂,…,x_l,x₁⟩`, as an index map.
fn cyclic_shift_index(index: usize, n: usize, l: usize) -> usize {
    let d = dim_of(n);
    let high = index / d.pow(l as u32 - 1);
    let rest = index % d.pow(l as u32 - 1);
    rest * d + high
}

fn tensor_power(rho: &DensityMatrix, l: u32) -> DensityMatrix {
    let mut acc = rho.clone();
    for _ in 1..l {
        acc = acc.tensor(rho);
    }
    acc
}

/// Dense simulation of `|+⟩⟨+| ⊗ ρ^{⊗l}` through `CS_l` and an ancilla `σ_x` readout.
pub fn hadamard_test_dense(rho: &DensityMatrix, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be ≥ 1".into()));
    }
    let n = rho.n();
    check_dense_cap(n * l as usize + 1)?;
    let big = tensor_power(rho, l);
    let d = big.dim();
    let half = C64::new(0.5, 0.0);
    let mut state = CMatrix::zeros(2 * d, 2 * d);
    for a in 0..2 {
        for b in 0..2 {
            state.view_mut((a * d, b * d), (d, d)).copy_from(&(big.matrix() * half));
        }
    }
    let mut cs = CMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        cs[(i, i)] = C64::new(1.0, 0.0);
        cs[(d + cyclic_shift_index(i, n, l as usize), d + i)] = C64::new(1.0, 0.0);
    }
    let out = &cs * state * cs.adjoint();
    let x_expect = out.view((0, d), (d, d)).trace() + out.view((d, 0), (d, d)).trace();
    Ok(x_expect.re)
}

/// `Tr(ρ^l)` from the ancilla of the Hadamard test.
pub fn trace_power_swap(rho: &DensityMatrix, cfg: &BellRunConfig, stream: &RngStream) -> Result<Estimate> {
    let mean = hadamard_test_expectation(rho, cfg.l)?;
    match cfg.mode {
        BellMode::ExactExpectation => Ok(Estimate::exact(mean)),
        BellMode::Sampled => {
            if cfg.shots < 2 {
                return Err(Error::InvalidArgument("sampled mode needs at least 2 shots".into()));
            }
            let p_plus = ((1.0 + mean) / 2.0).clamp(0.0, 1.0);
            let plus = Binomial::new(cfg.shots as u64, p_plus)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?
                .sample(&mut stream.rng()) as f64;
            let m = cfg.shots as f64;
            let value = 2.0 * plus / m - 1.0;
            let var = (1.0 - value * value) * m / (m - 1.0);
            Ok(Estimate {
                value,
                stderr: (var / m).sqrt(),
            })
        }
    }
}

/// Outcome distribution of the transversal CNOT/Hadamard circuit on `ρ^{⊗l}`. Gates whose
/// qubits would fall past the last copy are omitted.
pub fn parity_circuit_distribution(rho: &DensityMatrix, l: u32) -> Result<Vec<f64>> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be ≥ 1".into()));
    }
    let n = rho.n();
    let total = n * l as usize;
    check_dense_cap(total)?;
    let mut state = tensor_power(rho, l);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let cnot = CMatrix::from_row_slice(
        4,
        4,
        &[one, zero, zero, zero, zero, one, zero, zero, zero, zero, zero, one, zero, zero, one, zero],
    );
    let hadamard = CMatrix::from_row_slice(2, 2, &[s, s, s, -s]);
    for k in 0..l as usize {
        for j in 0..n {
            let (c, t) = (n * k + j, n * (k + 1) + j);
            if t < total {
                state = state.apply_unitary(&cnot, &[c, t])?;
            }
        }
        for j in 0..n {
            let t = n * (k + 1) + j;
            if t < total {
                state = state.apply_unitary(&hadamard, &[t])?;
            }
        }
    }
    Ok(state.matrix().diagonal().iter().map(|z| z.re.max(0.0)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityEstimate {
    /// `E[s_an]` with `s_an ∈ {0, 1}` the parity of every measured bit.
    pub bit: Estimate,
    /// `E[(−1)^{s_an}]`.
    pub sign: Estimate,
}

pub fn parity_circuit_estimate(rho: &DensityMatrix, cfg: &BellRunConfig, stream: &RngStream) -> Result<ParityEstimate> {
    let probs = parity_circuit_distribution(rho, cfg.l)?;
    let p_odd: f64 = probs.iter().enumerate().filter(|(i, _)| i.count_ones() % 2 == 1).map(|(_, p)| p).sum::<f64>()
        / probs.iter().sum::<f64>();
    match cfg.mode {
        BellMode::ExactExpectation => Ok(ParityEstimate {
            bit: Estimate::exact(p_odd),
            sign: Estimate::exact(1.0 - 2.0 * p_odd),
        }),
        BellMode::Sampled => {
            if cfg.shots < 2 {
                return Err(Error::InvalidArgument("sampled mode needs at least 2 shots".into()));
            }
            let mut rng = stream.rng();
            let odd = (0..cfg.shots).filter(|_| rng.random::<f64>() < p_odd).count() as f64;
            let m = cfg.shots as f64;
            let b = odd / m;
            let se_bit = (b * (1.0 - b) / (m - 1.0)).sqrt();
            Ok(ParityEstimate {
                bit: Estimate { value: b, stderr: se_bit },
                sign: Estimate {
                    value: 1.0 - 2.0 * b,
                    stderr: 2.0 * se_bit,
                },
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePowerRow {
    pub l: u32,
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub stderr: f64,
    pub poly: PolyApprox,
    pub trace_powers: Vec<TracePowerRow>,
    /// Set when a trace power could not be produced and the sum stops early.
    pub truncated_at: Option<u32>,
}

/// `Ŝ = a_0 2^n + Σ_{l≥1} a_l Tr(ρ^l)`, with the standard error propagated through the coefficients.
pub fn estimate_entropy(
    rho: &DensityMatrix,
    eta: f64,
    eps: f64,
    mode: BellMode,
    shots: usize,
    stream: &RngStream,
) -> Result<EntropyEstimate> {
    let poly = entropy_poly(eta, eps)?;
    let rows: Vec<Result<TracePowerRow>> = (1..=poly.degree as u32)
        .into_par_iter()
        .map(|l| {
            let cfg = BellRunConfig { l, shots, mode };
            trace_power_swap(rho, &cfg, &stream.split(l as u64)).map(|e| TracePowerRow {
                l,
                estimate: e.value,
                stderr: e.stderr,
            })
        })
        .collect();
    let mut value = poly.coefficients[0] * rho.dim() as f64;
    let mut var = 0.0;
    let mut trace_powers = Vec::with_capacity(rows.len());
    let mut truncated_at = None;
    for row in rows {
        match row {
            Ok(r) => {
                value += poly.coefficients[r.l as usize] * r.estimate;
                var += (poly.coefficients[r.l as usize] * r.stderr).powi(2);
                trace_powers.push(r);
            }
            Err(Error::CapExceeded { .. }) => {
                truncated_at = Some(trace_powers.len() as u32 + 1);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(EntropyEstimate {
        value,
        stderr: var.sqrt(),
        poly,
        trace_powers,
        truncated_at,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeEntropyScreen {
    /// `n ln 2 − Ŝ` in nats.
    pub value: f64,
    pub threshold: f64,
    pub near_maximally_mixed: bool,
}

pub fn relative_entropy_screen(s_hat: f64, n: usize, threshold: Option<f64>) -> Result<RelativeEntropyScreen> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be ≥ 1".into()));
    }
    let threshold = threshold.unwrap_or(1.0 / n as f64);
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold = {threshold} must be > 0")));
    }
    let value = n as f64 * std::f64::consts::LN_2 - s_hat;
    Ok(RelativeEntropyScreen {
        value,
        threshold,
        near_maximally_mixed: value <= threshold,
    })
}
