//! Kernel ridge weights `β(x)` over a random QNN sample and the box that contains them.
//!
//! Parameters are mapped to `[0,1)` by `α ↦ α/2π` before any kernel evaluation.
//! The Gram matrix is rescaled by `c = N / Tr K` and the same `c` multiplies
//! probe-side kernel values, so `β_j(x) = Σ_i W_ij · c·K(α_i, x)` with
//! `W = (cK + λI)⁻¹`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{prepare_qnn_state, sample_qnn_set, Architecture, ParameterSet};
use crate::error::{Error, Result};
use crate::qsim::DensityMatrix;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Truncation degree `K` of the power series.
    pub degree: u32,
    /// Interaction order `q`: powers of sums over `q`-subsets of coordinates.
    pub order: usize,
    pub normalize: bool,
}

impl KernelConfig {
    pub fn for_qubits(n: usize) -> Self {
        Self {
            degree: (n * n).min(8) as u32,
            order: 1,
            normalize: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::InvalidArgument("kernel interaction order must be ≥ 1".into()));
        }
        Ok(())
    }
}

fn power_sum(t: f64, degree: u32) -> f64 {
    // Σ_{l=0}^{K} t^l with 0⁰ = 1
    let mut acc = 0.0;
    let mut p = 1.0;
    for _ in 0..=degree {
        acc += p;
        p *= t;
    }
    acc
}

fn subsets(dim: usize, q: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, dim: usize, q: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == q {
            f(cur);
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i + 1, dim, q, cur, f);
            cur.pop();
        }
    }
    rec(0, dim, q, &mut Vec::with_capacity(q), f);
}

/// `Σ_{l=0}^{K} Σ_{S} (Σ_{i∈S} a_i b_i)^l` over all `q`-subsets `S`, unnormalized.
pub fn kernel_value(a: &[f64], b: &[f64], cfg: &KernelConfig) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("kernel inputs of length {} and {}", a.len(), b.len())));
    }
    cfg.validate()?;
    if cfg.order == 1 {
        return Ok(a.iter().zip(b).map(|(x, y)| power_sum(x * y, cfg.degree)).sum());
    }
    if cfg.order > a.len() {
        return Err(Error::InvalidArgument(format!("order {} exceeds dimension {}", cfg.order, a.len())));
    }
    let mut total = 0.0;
    subsets(a.len(), cfg.order, &mut |s| {
        total += power_sum(s.iter().map(|&i| a[i] * b[i]).sum(), cfg.degree);
    });
    Ok(total)
}

fn rescale(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v / TAU).collect()
}

pub const LAMBDA_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RidgeModel {
    cfg: KernelConfig,
    /// Training inputs after the `α/2π` map.
    alphas: Vec<Vec<f64>>,
    targets: Vec<f64>,
    scale: f64,
    gram: DMatrix<f64>,
    lambda: f64,
    inverse: DMatrix<f64>,
}

/// `λ = √λ_min / (nN)`, or the floor when `λ_min ≤ 0`.
pub fn ridge_lambda(gram: &DMatrix<f64>, n_qubits: usize) -> f64 {
    let big_n = gram.nrows();
    let lmin = SymmetricEigen::new(gram.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if lmin <= 0.0 {
        LAMBDA_FLOOR
    } else {
        (lmin.sqrt() / (n_qubits * big_n) as f64).max(LAMBDA_FLOOR)
    }
}

fn symmetric_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Ok(ch.inverse());
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("ridge system is singular".into()))
}

impl RidgeModel {
    /// Fits on raw parameter vectors in `[0, 2π)`. `lambda` overrides the default formula.
    pub fn fit(params: &[Vec<f64>], targets: &[f64], cfg: &KernelConfig, n_qubits: usize, lambda: Option<f64>) -> Result<Self> {
        cfg.validate()?;
        let big_n = params.len();
        if big_n == 0 {
            return Err(Error::InvalidArgument("ridge fit needs N ≥ 1".into()));
        }
        if targets.len() != big_n {
            return Err(Error::DimensionMismatch(format!("{} targets for {big_n} samples", targets.len())));
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("non-finite target".into()));
        }
        let alphas: Vec<Vec<f64>> = params.iter().map(|p| rescale(p)).collect();
        let mut raw = DMatrix::from_element(big_n, big_n, 0.0);
        for i in 0..big_n {
            for j in 0..=i {
                let v = kernel_value(&alphas[i], &alphas[j], cfg)?;
                raw[(i, j)] = v;
                raw[(j, i)] = v;
            }
        }
        let scale = if cfg.normalize {
            let tr = raw.trace();
            if tr <= 0.0 {
                return Err(Error::Singular("kernel trace is zero".into()));
            }
            big_n as f64 / tr
        } else {
            1.0
        };
        let gram = raw * scale;
        let lambda = match lambda {
            Some(l) if l > 0.0 => l,
            Some(l) => return Err(Error::InvalidArgument(format!("λ = {l} must be > 0"))),
            None => ridge_lambda(&gram, n_qubits),
        };
        let inverse = symmetric_inverse(&(&gram + DMatrix::identity(big_n, big_n) * lambda))?;
        Ok(Self {
            cfg: *cfg,
            alphas,
            targets: targets.to_vec(),
            scale,
            gram,
            lambda,
            inverse,
        })
    }

    pub fn config(&self) -> &KernelConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.alphas[0].len()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Normalization factor applied to every kernel evaluation.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Normalized kernel column `c·K(α_i, x)` for a raw parameter vector `x`.
    pub fn kernel_column(&self, x: &[f64]) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("probe of length {} for dimension {}", x.len(), self.dim())));
        }
        let xs = rescale(x);
        let vals = self
            .alphas
            .iter()
            .map(|a| kernel_value(a, &xs, &self.cfg).map(|v| v * self.scale))
            .collect::<Result<Vec<_>>>()?;
        Ok(DVector::from_vec(vals))
    }

    pub fn beta(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(self.beta_from_column(&self.kernel_column(x)?))
    }

    pub fn beta_from_column(&self, column: &DVector<f64>) -> DVector<f64> {
        &self.inverse * column
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.beta(x)?.iter().zip(&self.targets).map(|(b, y)| b * y).sum())
    }

    /// Polynomial coefficients `c_l = c·Σ_i W_ji α_{i,k}^l` of `β_j`'s contribution from coordinate `k`.
    fn coordinate_poly(&self, j: usize, k: usize) -> Vec<f64> {
        let deg = self.cfg.degree as usize;
        let mut coeffs = vec![0.0; deg + 1];
        for (i, a) in self.alphas.iter().enumerate() {
            let w = self.inverse[(j, i)] * self.scale;
            let mut p = 1.0;
            for c in coeffs.iter_mut() {
                *c += w * p;
                p *= a[k];
            }
        }
        coeffs
    }
}

/// Per-coordinate intervals `[lower_j, upper_j]` that contain `β_j(x)` for every `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactSet {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Total broadening added to each side of interval `j`.
    pub slack: Vec<f64>,
}

impl CompactSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch("interval bounds differ in length".into()));
        }
        if let Some(j) = (0..lower.len()).find(|&j| !(lower[j] <= upper[j])) {
            return Err(Error::InvalidArgument(format!("interval {j} is empty: [{}, {}]", lower[j], upper[j])));
        }
        let slack = vec![0.0; lower.len()];
        Ok(Self { lower, upper, slack })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn contains(&self, beta: &[f64], tol: f64) -> bool {
        beta.len() == self.len()
            && beta
                .iter()
                .enumerate()
                .all(|(j, b)| *b >= self.lower[j] - tol && *b <= self.upper[j] + tol)
    }

    pub fn width(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }
}

pub const MIN_GRID_POINTS: usize = 16;

fn eval_poly(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// Bounds each `β_j` by summing grid extrema of its per-coordinate polynomials on `[0,1]`.
///
/// The slack on each coordinate is `(Δ/2)·Σ_l l|c_l|` with `Δ` the grid spacing,
/// an upper bound on how far the true extremum can sit from the nearest grid point.
pub fn estimate_compact_set(model: &RidgeModel, grid_points: usize) -> Result<CompactSet> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::InvalidArgument(format!("grid_points = {grid_points} < {MIN_GRID_POINTS}")));
    }
    if model.cfg.order != 1 {
        return Err(Error::InvalidArgument("compact-set estimation supports interaction order 1 only".into()));
    }
    let spacing = 1.0 / (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|g| g as f64 * spacing).collect();
    let rows: Vec<(f64, f64, f64)> = (0..model.len())
        .into_par_iter()
        .map(|j| {
            let (mut lo, mut hi, mut slack) = (0.0, 0.0, 0.0);
            for k in 0..model.dim() {
                let c = model.coordinate_poly(j, k);
                let (mn, mx) = grid
                    .iter()
                    .map(|&t| eval_poly(&c, t))
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                let lip: f64 = c.iter().enumerate().map(|(l, a)| l as f64 * a.abs()).sum();
                let eps = 0.5 * spacing * lip;
                lo += mn - eps;
                hi += mx + eps;
                slack += eps;
            }
            (lo, hi, slack)
        })
        .collect();
    Ok(CompactSet {
        lower: rows.iter().map(|r| r.0).collect(),
        upper: rows.iter().map(|r| r.1).collect(),
        slack: rows.iter().map(|r| r.2).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntrinsicReport {
    pub n: usize,
    pub depth: usize,
    pub gates_per_layer: usize,
    pub samples: usize,
    pub probes: usize,
    pub mean_abs_error: f64,
    pub bound: f64,
    pub lambda: f64,
    pub kernel_degree: u32,
    pub beta_sums: Vec<f64>,
    pub seed: u64,
}

impl IntrinsicReport {
    pub fn within_bound(&self) -> bool {
        self.mean_abs_error <= self.bound
    }

    /// Fraction of probes with `|Σβ − 1| ≤ tol`.
    pub fn beta_sum_fraction(&self, tol: f64) -> f64 {
        let hits = self.beta_sums.iter().filter(|s| (*s - 1.0).abs() <= tol).count();
        hits as f64 / self.beta_sums.len() as f64
    }
}

/// `√(L R n² / N)`.
pub fn approximation_bound(arch: &Architecture, samples: usize) -> f64 {
    let n = arch.n() as f64;
    ((arch.gate_count() as f64) * n * n / samples as f64).sqrt()
}

/// `ceil(L R n² / ε²)`.
pub fn sample_count_for(arch: &Architecture, epsilon: f64) -> usize {
    let n = arch.n() as f64;
    ((arch.gate_count() as f64) * n * n / (epsilon * epsilon)).ceil() as usize
}

/// Fits on `N` random QNN states and compares `β(x)·f` with `⟨Ψ(x)|ρ|Ψ(x)⟩` at random probes.
pub fn validate_intrinsic_connection(
    arch: &Architecture,
    samples: usize,
    probes: usize,
    rho: &DensityMatrix,
    cfg: &KernelConfig,
    stream: &RngStream,
) -> Result<IntrinsicReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument("validation needs N ≥ 2".into()));
    }
    if probes < 10 {
        return Err(Error::InvalidArgument("validation needs at least 10 probes".into()));
    }
    if rho.n() != arch.n() {
        return Err(Error::DimensionMismatch(format!("{}-qubit state for {}-qubit architecture", rho.n(), arch.n())));
    }
    let set = sample_qnn_set(arch, samples, &stream.split_str("samples"))?;
    let params: Vec<Vec<f64>> = set.iter().map(|s| s.params.values().to_vec()).collect();
    let targets = set.iter().map(|s| rho.fidelity_pure(&s.state)).collect::<Result<Vec<_>>>()?;
    let model = RidgeModel::fit(&params, &targets, cfg, arch.n(), None)?;
    let probe_stream = stream.split_str("probes");
    let results = (0..probes)
        .into_par_iter()
        .map(|p| {
            let mut rng = probe_stream.split(p as u64).rng();
            let x: Vec<f64> = (0..arch.parameter_count()).map(|_| rng.random_range(0.0..TAU)).collect();
            let beta = model.beta(&x)?;
            let predicted: f64 = beta.iter().zip(&targets).map(|(b, y)| b * y).sum();
            let psi = prepare_qnn_state(arch, &ParameterSet::new(x)?)?;
            let exact = rho.fidelity_pure(&psi)?;
            Ok(((predicted - exact).abs(), beta.sum()))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let mean_abs_error = results.iter().map(|r| r.0).sum::<f64>() / probes as f64;
    Ok(IntrinsicReport {
        n: arch.n(),
        depth: arch.depth(),
        gates_per_layer: arch.gates_per_layer(),
        samples,
        probes,
        mean_abs_error,
        bound: approximation_bound(arch, samples),
        lambda: model.lambda(),
        kernel_degree: cfg.degree,
        beta_sums: results.iter().map(|r| r.1).collect(),
        seed: stream.seed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::Layout;

    fn random_params(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = RngStream::new(seed).rng();
        (0..count).map(|_| (0..dim).map(|_| rng.random_range(0.0..TAU)).collect()).collect()
    }

    #[test]
    fn kernel_examples() {
        let cfg = KernelConfig { degree: 3, order: 1, normalize: true };
        assert_eq!(kernel_value(&[0.0; 5], &[0.0; 5], &cfg).unwrap(), 5.0);
        assert_eq!(kernel_value(&[1.0], &[1.0], &cfg).unwrap(), 4.0);
        let (a, b) = (vec![0.3, 0.9, 0.1], vec![0.7, 0.2, 0.5]);
        assert_eq!(kernel_value(&a, &b, &cfg).unwrap(), kernel_value(&b, &a, &cfg).unwrap());
        assert!(kernel_value(&a, &b[..2], &cfg).is_err());
        let pair = KernelConfig { order: 2, ..cfg };
        // subsets {0,1},{0,2},{1,2} with a=b=1: each sum is 2, Σ_{l≤3} 2^l = 15
        assert_eq!(kernel_value(&[1.0; 3], &[1.0; 3], &pair).unwrap(), 45.0);
    }

    #[test]
    fn single_sample_fit() {
        let cfg = KernelConfig::for_qubits(2);
        let p = random_params(1, 15, 1);
        let m = RidgeModel::fit(&p, &[0.7], &cfg, 2, None).unwrap();
        let k = m.gram()[(0, 0)];
        assert!((k - 1.0).abs() < 1e-12);
        let expected = 0.7 * k / (k + m.lambda());
        assert!((m.predict(&p[0]).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn normalization_and_lambda() {
        let cfg = KernelConfig::for_qubits(2);
        let p = random_params(12, 15, 2);
        let y: Vec<f64> = (0..12).map(|i| i as f64 / 12.0).collect();
        let m = RidgeModel::fit(&p, &y, &cfg, 2, None).unwrap();
        assert!((m.gram().trace() - 12.0).abs() < 1e-9);
        assert!(m.lambda() > 0.0);
        assert!((m.gram() - m.gram().transpose()).abs().max() < 1e-12);
        let exact = RidgeModel::fit(&p, &y, &cfg, 2, Some(1e-12)).unwrap();
        // training residual y - ŷ = λ (K + λI)⁻¹ y
        let yv = DVector::from_vec(y.clone());
        let residual = m.inverse() * &yv * m.lambda();
        for (i, (x, t)) in p.iter().zip(&y).enumerate() {
            assert!((exact.predict(x).unwrap() - t).abs() < 1e-6);
            assert!((t - m.predict(x).unwrap() - residual[i]).abs() < 1e-9);
        }
        let b = exact.beta(&p[4]).unwrap();
        for (j, v) in b.iter().enumerate() {
            assert!((v - if j == 4 { 1.0 } else { 0.0 }).abs() < 1e-4);
        }
    }

    #[test]
    fn beta_scales_with_kernel_column() {
        let cfg = KernelConfig::for_qubits(2);
        let p = random_params(8, 15, 3);
        let m = RidgeModel::fit(&p, &[0.5; 8], &cfg, 2, None).unwrap();
        let col = m.kernel_column(&random_params(1, 15, 4)[0]).unwrap();
        let a = m.beta_from_column(&col);
        let b = m.beta_from_column(&(&col * 3.0));
        assert!((b - &a * 3.0).abs().max() < 1e-12 * a.abs().max());
        assert!(m.beta(&[0.0; 14]).is_err());
    }

    #[test]
    fn constant_kernel_gives_point_intervals() {
        let cfg = KernelConfig { degree: 0, order: 1, normalize: true };
        let p = random_params(4, 15, 5);
        let m = RidgeModel::fit(&p, &[0.1, 0.2, 0.3, 0.4], &cfg, 2, Some(1e-3)).unwrap();
        let set = estimate_compact_set(&m, 64).unwrap();
        for j in 0..4 {
            assert!(set.width(j).abs() < 1e-9);
            let b = m.beta(&random_params(1, 15, 6)[0]).unwrap()[j];
            assert!((b - set.lower[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn compact_set_contains_probes_and_refines() {
        let cfg = KernelConfig::for_qubits(2);
        let p = random_params(16, 15, 7);
        let m = RidgeModel::fit(&p, &[0.5; 16], &cfg, 2, None).unwrap();
        let coarse = estimate_compact_set(&m, 64).unwrap();
        let fine = estimate_compact_set(&m, 128).unwrap();
        for j in 0..16 {
            assert!(fine.width(j) <= coarse.width(j) + 2.0 * coarse.slack[j] + 1e-9);
        }
        for x in random_params(1000, 15, 8) {
            assert!(coarse.contains(m.beta(&x).unwrap().as_slice(), 1e-9));
        }
        assert!(estimate_compact_set(&m, 8).is_err());
    }

    #[test]
    fn maximally_mixed_targets_are_reproduced() {
        let arch = Architecture::build(2, Layout::Staircase, 1).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let r = validate_intrinsic_connection(&arch, 16, 20, &rho, &KernelConfig::for_qubits(2), &RngStream::new(1)).unwrap();
        // β·f = Σβ / 4, the exact value is 1/4
        assert!(r.beta_sums.iter().all(|s| s.is_finite()));
        let implied: f64 = r.beta_sums.iter().map(|s| (s - 1.0).abs() / 4.0).sum::<f64>() / 20.0;
        assert!((r.mean_abs_error - implied).abs() < 1e-9);
        assert_eq!(r.bound, 0.5);
    }

    #[test]
    fn bound_helpers() {
        let arch = Architecture::build(2, Layout::Staircase, 2).unwrap();
        assert_eq!(sample_count_for(&arch, 0.5), 32);
        assert!((approximation_bound(&arch, 32) - 0.5).abs() < 1e-15);
    }
}
