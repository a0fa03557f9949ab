use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squared-exponential covariance with one lengthscale per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbfKernel {
    pub lengthscales: Vec<f64>,
    pub signal_variance: f64,
}

impl RbfKernel {
    pub fn new(lengthscales: Vec<f64>, signal_variance: f64) -> Result<Self> {
        if lengthscales.iter().any(|l| !(*l > 0.0)) || !(signal_variance > 0.0) {
            return Err(Error::InvalidArgument("kernel lengthscales and variance must be > 0".into()));
        }
        Ok(Self {
            lengthscales,
            signal_variance,
        })
    }

    pub fn isotropic(dim: usize, lengthscale: f64) -> Result<Self> {
        Self::new(vec![lengthscale; dim], 1.0)
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let r2: f64 = a
            .iter()
            .zip(b)
            .zip(&self.lengthscales)
            .map(|((x, y), l)| ((x - y) / l).powi(2))
            .sum();
        self.signal_variance * (-0.5 * r2).exp()
    }
}

pub const JITTER: f64 = 1e-8;

/// Zero-mean GP posterior kept as an incrementally grown Cholesky factor of `K + σ²I`.
#[derive(Clone, Debug)]
pub struct GpState {
    kernel: RbfKernel,
    sigma_noise: f64,
    jitter: f64,
    points: Vec<Vec<f64>>,
    ys: Vec<f64>,
    chol: DMatrix<f64>,
    weights: DVector<f64>,
}

fn forward_substitute(l: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for j in 0..i {
            s -= l[(i, j)] * x[j];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

fn back_substitute_transpose(l: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= l[(j, i)] * x[j];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

impl GpState {
    pub fn new(kernel: RbfKernel, sigma_noise: f64) -> Result<Self> {
        if !(sigma_noise >= 0.0) {
            return Err(Error::InvalidArgument(format!("σ_noise = {sigma_noise} must be ≥ 0")));
        }
        Ok(Self {
            kernel,
            sigma_noise,
            jitter: 0.0,
            points: Vec::new(),
            ys: Vec::new(),
            chol: DMatrix::zeros(0, 0),
            weights: DVector::zeros(0),
        })
    }

    pub fn kernel(&self) -> &RbfKernel {
        &self.kernel
    }

    pub fn sigma_noise(&self) -> f64 {
        self.sigma_noise
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn observations(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.iter().map(|p| p.as_slice()).zip(self.ys.iter().copied())
    }

    fn noise_var(&self) -> f64 {
        self.sigma_noise * self.sigma_noise + self.jitter
    }

    fn refactor(&mut self) -> Result<()> {
        let t = self.points.len();
        let mut k = DMatrix::from_fn(t, t, |i, j| self.kernel.eval(&self.points[i], &self.points[j]));
        for i in 0..t {
            k[(i, i)] += self.noise_var();
        }
        let ch = k
            .cholesky()
            .ok_or_else(|| Error::Singular("GP covariance is not positive definite".into()))?;
        self.chol = ch.l();
        Ok(())
    }

    fn update_weights(&mut self) {
        let z = forward_substitute(&self.chol, &self.ys);
        self.weights = DVector::from_vec(back_substitute_transpose(&self.chol, &z));
    }

    /// Adds `(z, y)`. A failed rank-one extension is retried once with `JITTER` on the diagonal.
    pub fn observe(&mut self, z: &[f64], y: f64) -> Result<()> {
        if z.len() != self.kernel.dim() {
            return Err(Error::DimensionMismatch(format!("point of length {} for a {}-d kernel", z.len(), self.kernel.dim())));
        }
        if !y.is_finite() {
            return Err(Error::InvalidArgument("non-finite observation".into()));
        }
        let t = self.points.len();
        let kvec: Vec<f64> = self.points.iter().map(|p| self.kernel.eval(p, z)).collect();
        let row = forward_substitute(&self.chol, &kvec);
        let d2 = self.kernel.eval(z, z) + self.noise_var() - row.iter().map(|v| v * v).sum::<f64>();
        self.points.push(z.to_vec());
        self.ys.push(y);
        if d2 > 1e-14 {
            let mut l = self.chol.clone().resize(t + 1, t + 1, 0.0);
            for (j, v) in row.iter().enumerate() {
                l[(t, j)] = *v;
            }
            l[(t, t)] = d2.sqrt();
            self.chol = l;
        } else {
            self.jitter += JITTER;
            if let Err(e) = self.refactor() {
                self.points.pop();
                self.ys.pop();
                self.jitter -= JITTER;
                return Err(e);
            }
        }
        self.update_weights();
        Ok(())
    }

    /// Posterior mean and standard deviation at `z`.
    pub fn posterior(&self, z: &[f64]) -> (f64, f64) {
        let prior = self.kernel.eval(z, z);
        if self.points.is_empty() {
            return (0.0, prior.sqrt());
        }
        let kvec: Vec<f64> = self.points.iter().map(|p| self.kernel.eval(p, z)).collect();
        let mu: f64 = kvec.iter().zip(self.weights.iter()).map(|(a, b)| a * b).sum();
        let v = forward_substitute(&self.chol, &kvec);
        let var = prior - v.iter().map(|x| x * x).sum::<f64>();
        (mu, var.max(0.0).sqrt())
    }

    pub fn ucb(&self, z: &[f64], kappa: f64) -> f64 {
        let (mu, sigma) = self.posterior(z);
        mu + kappa.sqrt() * sigma
    }
}
