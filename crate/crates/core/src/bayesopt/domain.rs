use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intrinsic::CompactSet;

/// A search region with a sampler, a projection back onto the region, and per-coordinate step sizes.
pub trait Domain: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut dyn rand::RngCore) -> Vec<f64>;
    fn project(&self, z: &[f64]) -> Vec<f64>;
    fn steps(&self) -> Vec<f64>;
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.iter().zip(&upper).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidArgument("box bounds must satisfy lower < upper".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(dim: usize) -> Self {
        Self {
            lower: vec![0.0; dim],
            upper: vec![1.0; dim],
        }
    }
}

impl Domain for BoxDomain {
    fn dim(&self) -> usize {
        self.lower.len()
    }

    fn sample(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| a + (b - a) * rng.random::<f64>())
            .collect()
    }

    fn project(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (a, b))| v.clamp(*a, *b))
            .collect()
    }

    fn steps(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(a, b)| 0.05 * (b - a)).collect()
    }
}

/// `D_z = {(q, β)}`: `q` on the probability simplex and `β` in a box with `Σβ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    beta_box: CompactSet,
}

/// Euclidean projection of `v` onto `{x : lo ≤ x ≤ hi, Σx = target}` by bisection on a common shift.
pub fn project_box_hyperplane(v: &[f64], lo: &[f64], hi: &[f64], target: f64) -> Vec<f64> {
    let total = |tau: f64| -> f64 { v.iter().zip(lo.iter().zip(hi)).map(|(x, (a, b))| (x + tau).clamp(*a, *b)).sum() };
    let span = v.iter().chain(lo).chain(hi).fold(0.0f64, |m, x| m.max(x.abs())) * 2.0 + 1.0;
    let (mut a, mut b) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if total(mid) < target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 * span {
            break;
        }
    }
    let tau = 0.5 * (a + b);
    let mut out: Vec<f64> = v.iter().zip(lo.iter().zip(hi)).map(|(x, (l, h))| (x + tau).clamp(*l, *h)).collect();
    // place the last rounding residue on a coordinate with room
    let residue = target - out.iter().sum::<f64>();
    if residue != 0.0 {
        if let Some(j) = (0..out.len()).find(|&j| out[j] + residue >= lo[j] && out[j] + residue <= hi[j]) {
            out[j] += residue;
        }
    }
    out
}

/// Non-negative part of `v`, renormalized to sum 1 (uniform if nothing survives).
pub fn project_simplex_clamp(v: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        out.iter_mut().for_each(|x| *x /= s);
    } else {
        let u = 1.0 / out.len() as f64;
        out.iter_mut().for_each(|x| *x = u);
    }
    out
}

impl DomainSpec {
    pub fn new(beta_box: CompactSet) -> Result<Self> {
        let lo: f64 = beta_box.lower.iter().sum();
        let hi: f64 = beta_box.upper.iter().sum();
        if beta_box.is_empty() || lo > 1.0 || hi < 1.0 {
            return Err(Error::InfeasibleDomain(format!(
                "Σ lower = {lo}, Σ upper = {hi}: the hyperplane Σβ = 1 misses the box"
            )));
        }
        Ok(Self { beta_box })
    }

    /// Block size `N`.
    pub fn n(&self) -> usize {
        self.beta_box.len()
    }

    pub fn beta_box(&self) -> &CompactSet {
        &self.beta_box
    }

    pub fn split<'a>(&self, z: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        z.split_at(self.n())
    }

    pub fn join(q: &[f64], beta: &[f64]) -> Vec<f64> {
        q.iter().chain(beta).copied().collect()
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        if z.len() != 2 * self.n() {
            return false;
        }
        let (q, b) = self.split(z);
        q.iter().all(|x| *x >= -tol)
            && (q.iter().sum::<f64>() - 1.0).abs() <= tol
            && self.beta_box.contains(b, tol)
            && (b.iter().sum::<f64>() - 1.0).abs() <= tol
    }
}

impl Domain for DomainSpec {
    fn dim(&self) -> usize {
        2 * self.n()
    }

    fn sample(&self, rng: &mut dyn rand::RngCore) -> Vec<f64> {
        let n = self.n();
        let e: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut *rng)).collect();
        let q = project_simplex_clamp(&e);
        let raw: Vec<f64> = (0..n)
            .map(|j| {
                let (a, b) = (self.beta_box.lower[j], self.beta_box.upper[j]);
                a + (b - a) * rng.random::<f64>()
            })
            .collect();
        let beta = project_box_hyperplane(&raw, &self.beta_box.lower, &self.beta_box.upper, 1.0);
        Self::join(&q, &beta)
    }

    fn project(&self, z: &[f64]) -> Vec<f64> {
        let (q, b) = self.split(z);
        let beta = project_box_hyperplane(b, &self.beta_box.lower, &self.beta_box.upper, 1.0);
        Self::join(&project_simplex_clamp(q), &beta)
    }

    fn steps(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|_| 0.05)
            .chain((0..n).map(|j| 0.05 * self.beta_box.width(j).max(1e-6)))
            .collect()
    }
}
