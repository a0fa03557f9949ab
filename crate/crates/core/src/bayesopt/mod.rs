//! GP-UCB maximization with regret accounting.
//!
//! [`run_gp_ucb`] is the generic loop over any [`Domain`]; [`bmaxs`] specializes
//! it to the distinguishing loss on `D_z`.

pub mod bmaxs;
pub mod domain;
pub mod gp;
pub mod ledger;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use bmaxs::{bmaxs, BmaxsConfig, BmaxsHooks, BmaxsResult};
pub use domain::{BoxDomain, Domain, DomainSpec};
pub use gp::{GpState, RbfKernel};
pub use ledger::RegretLedger;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// `κ_t = 2N ln(t²N) + 2 ln(t²/δ)`.
pub fn kappa_schedule(t: u64, n: usize, delta: f64) -> Result<f64> {
    if t < 1 || n < 1 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("κ schedule needs t ≥ 1, N ≥ 1, δ ∈ (0,1); got t={t}, N={n}, δ={delta}")));
    }
    let (t, n) = (t as f64, n as f64);
    Ok(2.0 * n * (t * t * n).ln() + 2.0 * (t * t / delta).ln())
}

/// `√((4N² ln²T + 2N ln T · ln(π²/(6δ)))/T)`.
pub fn regret_bound(horizon: f64, n: usize, delta: f64) -> Result<f64> {
    if !(horizon >= 2.0) || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("regret bound needs T ≥ 2 and δ > 0; got T={horizon}, δ={delta}")));
    }
    let n = n as f64;
    let lt = horizon.ln();
    let c = (std::f64::consts::PI.powi(2) / (6.0 * delta)).ln();
    Ok(((4.0 * n * n * lt * lt + 2.0 * n * lt * c) / horizon).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationNoise {
    /// Observe the objective as is.
    None,
    /// Add an independent standard normal draw to every observation.
    StandardNormal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcbConfig {
    pub iterations: usize,
    pub candidates: usize,
    pub delta: f64,
    /// The `N` entering `κ_t`.
    pub kappa_n: usize,
    pub sigma_noise: f64,
    pub observation_noise: ObservationNoise,
    pub refine: bool,
}

impl UcbConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidArgument("T must be ≥ 1".into()));
        }
        if self.candidates < 1 {
            return Err(Error::InvalidArgument("candidate count must be ≥ 1".into()));
        }
        kappa_schedule(1, self.kappa_n, self.delta)?;
        Ok(())
    }
}

/// `argmax μ + √κ σ` over `extra` followed by `candidates` sampled points, ties to the lowest index,
/// then (optionally) one sweep of ± coordinate steps that keeps strict improvements.
pub fn ucb_argmax(
    gp: &GpState,
    domain: &dyn Domain,
    kappa: f64,
    candidates: usize,
    stream: &RngStream,
    extra: &[Vec<f64>],
    refine: bool,
) -> Result<(Vec<f64>, f64)> {
    if candidates < 1 && extra.is_empty() {
        return Err(Error::InvalidArgument("no candidates".into()));
    }
    let mut rng = stream.rng();
    let mut pool: Vec<Vec<f64>> = extra.to_vec();
    for _ in 0..candidates {
        pool.push(domain.sample(&mut rng));
    }
    let scores: Vec<f64> = pool.par_iter().map(|z| gp.ucb(z, kappa)).collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    let mut z = pool.swap_remove(best);
    let mut score = scores[best];
    if refine {
        for (i, step) in domain.steps().into_iter().enumerate() {
            for sign in [1.0, -1.0] {
                let mut trial = z.clone();
                trial[i] += sign * step;
                let trial = domain.project(&trial);
                let s = gp.ucb(&trial, kappa);
                if s > score {
                    z = trial;
                    score = s;
                }
            }
        }
    }
    Ok((z, score))
}

/// One GP-UCB step as recorded in a trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcbStep {
    pub t: usize,
    pub kappa: f64,
    pub z: Vec<f64>,
    pub y: f64,
    pub value: f64,
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UcbRun {
    pub steps: Vec<UcbStep>,
    pub ledger: Option<RegretLedger>,
}

impl UcbRun {
    /// Step with the largest noiseless value (first on ties).
    pub fn best(&self) -> &UcbStep {
        let mut best = &self.steps[0];
        for s in &self.steps[1..] {
            if s.value > best.value {
                best = s;
            }
        }
        best
    }

    pub fn last(&self) -> &UcbStep {
        self.steps.last().expect("at least one step")
    }
}

/// GP-UCB on `objective`. The first `forced.len()` queries are taken from `forced` verbatim;
/// `extra` is prepended to every candidate pool. Regrets are tracked when `optimum` is given.
#[allow(clippy::too_many_arguments)]
pub fn run_gp_ucb<F>(
    objective: F,
    domain: &dyn Domain,
    kernel: RbfKernel,
    cfg: &UcbConfig,
    stream: &RngStream,
    optimum: Option<f64>,
    forced: &[Vec<f64>],
    extra: &[Vec<f64>],
) -> Result<UcbRun>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    cfg.validate()?;
    if kernel.dim() != domain.dim() {
        return Err(Error::DimensionMismatch(format!("{}-d kernel on a {}-d domain", kernel.dim(), domain.dim())));
    }
    let mut gp = GpState::new(kernel, cfg.sigma_noise)?;
    let mut ledger = optimum.map(RegretLedger::new);
    let mut steps = Vec::with_capacity(cfg.iterations);
    let noise_stream = stream.split_str("observation-noise");
    let cand_stream = stream.split_str("candidates");
    for t in 1..=cfg.iterations {
        let kappa = kappa_schedule(t as u64, cfg.kappa_n, cfg.delta)?;
        let z = match forced.get(t - 1) {
            Some(z) => z.clone(),
            None => ucb_argmax(&gp, domain, kappa, cfg.candidates, &cand_stream.split(t as u64), extra, cfg.refine)?.0,
        };
        let (mu, sigma) = gp.posterior(&z);
        let value = objective(&z)?;
        let y = match cfg.observation_noise {
            ObservationNoise::None => value,
            ObservationNoise::StandardNormal => {
                let e: f64 = StandardNormal.sample(&mut noise_stream.split(t as u64).rng());
                value + e
            }
        };
        gp.observe(&z, y)?;
        if let Some(l) = ledger.as_mut() {
            l.record(value, kappa);
        }
        steps.push(UcbStep {
            t,
            kappa,
            z,
            y,
            value,
            mu,
            sigma,
        });
    }
    Ok(UcbRun { steps, ledger })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_examples() {
        let k = kappa_schedule(1, 2, 0.1).unwrap();
        assert!((k - (4.0 * 2f64.ln() + 2.0 * 10f64.ln())).abs() < 1e-12);
        assert!((k - 7.3778).abs() < 1e-4);
        let e2 = (-2.0f64).exp();
        assert!((kappa_schedule(1, 1, e2).unwrap() - 4.0).abs() < 1e-12);
        for t in 1..50 {
            assert!(kappa_schedule(t + 1, 3, 0.05).unwrap() > kappa_schedule(t, 3, 0.05).unwrap());
        }
        assert!(kappa_schedule(0, 1, 0.1).is_err());
    }

    #[test]
    fn regret_bound_examples() {
        let d = std::f64::consts::PI.powi(2) / 6.0;
        let e2 = std::f64::consts::E.powi(2);
        assert!((regret_bound(e2, 1, d).unwrap() - 4.0 / std::f64::consts::E).abs() < 1e-12);
        assert!(regret_bound(1e6, 2, 0.1).unwrap() < regret_bound(1e3, 2, 0.1).unwrap());
        assert!(regret_bound(100.0, 4, 0.1).unwrap() > regret_bound(100.0, 2, 0.1).unwrap());
        assert!(regret_bound(1.0, 2, 0.1).is_err());
    }

    #[test]
    fn argmax_contracts() {
        let domain = BoxDomain::unit(2);
        let gp = GpState::new(RbfKernel::isotropic(2, 0.2).unwrap(), 0.1).unwrap();
        let s = RngStream::new(3);
        let first = domain.sample(&mut s.rng());
        let (z, _) = ucb_argmax(&gp, &domain, 2.0, 16, &s, &[], true).unwrap();
        assert_eq!(z, first);

        let mut gp = GpState::new(RbfKernel::isotropic(2, 0.2).unwrap(), 0.1).unwrap();
        gp.observe(&[0.2, 0.2], 10.0).unwrap();
        let near = vec![0.25, 0.2];
        let far = vec![0.9, 0.9];
        let (z, _) = ucb_argmax(&gp, &domain, 1e-6, 0, &s, &[far.clone(), near.clone()], false).unwrap();
        assert_eq!(z, near);
        let (z, _) = ucb_argmax(&gp, &domain, 1e9, 0, &s, &[near, far.clone()], false).unwrap();
        assert_eq!(z, far);
    }

    #[test]
    fn loop_bookkeeping() {
        let domain = BoxDomain::unit(1);
        let cfg = UcbConfig {
            iterations: 1,
            candidates: 8,
            delta: 0.1,
            kappa_n: 1,
            sigma_noise: 0.01,
            observation_noise: ObservationNoise::None,
            refine: false,
        };
        let f = |z: &[f64]| Ok(-(z[0] - 0.3).powi(2));
        let run = run_gp_ucb(f, &domain, RbfKernel::isotropic(1, 0.2).unwrap(), &cfg, &RngStream::new(1), Some(0.0), &[], &[]).unwrap();
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.ledger.as_ref().unwrap().len(), 1);
        let again = run_gp_ucb(f, &domain, RbfKernel::isotropic(1, 0.2).unwrap(), &cfg, &RngStream::new(1), Some(0.0), &[], &[]).unwrap();
        assert_eq!(run, again);
    }
}
