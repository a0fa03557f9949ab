use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::{project_box_hyperplane, Domain, DomainSpec};
use super::gp::RbfKernel;
use super::ledger::RegretLedger;
use super::{run_gp_ucb, ObservationNoise, UcbConfig, UcbRun};
use crate::ansatz::QnnSample;
use crate::error::{Error, Result};
use crate::intrinsic::{estimate_compact_set, KernelConfig, RidgeModel};
use crate::rng::RngStream;
use crate::scp::{loss_value, LossInputs};
use crate::shadows::{estimate_gram, EstimatorConfig, StateSource};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BmaxsConfig {
    pub iterations: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub candidates: usize,
    pub estimator: EstimatorConfig,
    pub observation_noise: ObservationNoise,
    pub sigma_noise: f64,
    pub q_lengthscale: f64,
    /// β-block lengthscale as a fraction of each interval's width.
    pub beta_lengthscale_factor: f64,
    pub grid_points: usize,
    pub kernel_degree: Option<u32>,
    /// Ridge parameter for the `D_β` model; `None` uses the data-driven default.
    pub ridge_lambda: Option<f64>,
    /// Random domain points used to estimate the reference optimum for regrets.
    pub reference_samples: usize,
    pub refine: bool,
}

impl Default for BmaxsConfig {
    fn default() -> Self {
        Self {
            iterations: 100,
            epsilon: 0.1,
            delta: 0.1,
            candidates: 256,
            estimator: EstimatorConfig::exact(),
            observation_noise: ObservationNoise::None,
            sigma_noise: 0.01,
            q_lengthscale: 0.5,
            beta_lengthscale_factor: 0.5,
            grid_points: 512,
            kernel_degree: None,
            ridge_lambda: None,
            reference_samples: 2048,
            refine: true,
        }
    }
}

impl BmaxsConfig {
    /// Unit Gaussian noise on every observation with a matching GP noise level.
    pub fn unit_noise(mut self) -> Self {
        self.observation_noise = ObservationNoise::StandardNormal;
        self.sigma_noise = 1.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidArgument("T must be ≥ 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("ε = {} outside (0,1)", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!("δ = {} outside (0,1)", self.delta)));
        }
        self.estimator.validate()
    }
}

/// Test hooks: `forced` points are queried first, verbatim; `extra_candidates` join every pool.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BmaxsHooks {
    pub forced: Vec<Vec<f64>>,
    pub extra_candidates: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BmaxsResult {
    /// `L(z_T) ≤ ε` for the final iterate, judged on a fresh estimator evaluation.
    pub accepted: bool,
    pub final_value: f64,
    /// Loss of the final iterate on the Gram data the GP loop used.
    pub final_run_value: f64,
    pub final_z: Vec<f64>,
    pub best_value: f64,
    pub best_z: Vec<f64>,
    pub reference_optimum: f64,
    pub ledger: RegretLedger,
    pub run: UcbRun,
    #[serde(skip)]
    pub inputs: LossInputs,
    pub domain: DomainSpec,
    pub samples: usize,
}

/// Loss at `z = (q, β)` on a domain of block size `inputs.f.len()`.
pub fn loss_at(z: &[f64], inputs: &LossInputs) -> Result<f64> {
    let n = inputs.f.len();
    if z.len() != 2 * n {
        return Err(Error::DimensionMismatch(format!("point of length {} for N = {n}", z.len())));
    }
    loss_value(&z[..n], &z[n..], inputs)
}

/// `z = (e_i, β)` with `β` the projection of `e_j` onto the domain's β-set.
pub fn vertex_point(domain: &DomainSpec, i: usize, j: usize) -> Vec<f64> {
    let n = domain.n();
    let mut q = vec![0.0; n];
    q[i] = 1.0;
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    let b = domain.beta_box();
    let beta = project_box_hyperplane(&e, &b.lower, &b.upper, 1.0);
    DomainSpec::join(&q, &beta)
}

fn reference_optimum(domain: &DomainSpec, inputs: &LossInputs, samples: usize, stream: &RngStream) -> Result<f64> {
    let n = domain.n();
    let vertices = (0..n * n)
        .into_par_iter()
        .map(|k| loss_at(&vertex_point(domain, k / n, k % n), inputs))
        .collect::<Result<Vec<f64>>>()?;
    let mut rng = stream.rng();
    let random: Vec<Vec<f64>> = (0..samples).map(|_| domain.sample(&mut rng)).collect();
    let rand_vals = random.par_iter().map(|z| loss_at(z, inputs)).collect::<Result<Vec<f64>>>()?;
    Ok(vertices.into_iter().chain(rand_vals).fold(f64::NEG_INFINITY, f64::max))
}

/// `D_β` from a ridge model on the sample parameters.
pub fn beta_domain(samples: &[QnnSample], targets: &[f64], n_qubits: usize, cfg: &BmaxsConfig) -> Result<DomainSpec> {
    let params: Vec<Vec<f64>> = samples.iter().map(|s| s.params.values().to_vec()).collect();
    let mut kcfg = KernelConfig::for_qubits(n_qubits);
    if let Some(d) = cfg.kernel_degree {
        kcfg.degree = d;
    }
    let model = RidgeModel::fit(&params, targets, &kcfg, n_qubits, cfg.ridge_lambda)?;
    DomainSpec::new(estimate_compact_set(&model, cfg.grid_points)?)
}

/// GP-UCB maximization of the distinguishing loss over `D_z`; accepts when the final iterate's loss is ≤ ε.
pub fn bmaxs(
    source: &dyn StateSource,
    samples: &[QnnSample],
    cfg: &BmaxsConfig,
    hooks: &BmaxsHooks,
    stream: &RngStream,
) -> Result<BmaxsResult> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument("BMaxS needs at least one sample".into()));
    }
    let n_qubits = source.n();
    let states: Vec<_> = samples.iter().map(|s| s.state.clone()).collect();
    let inputs = estimate_gram(&states, source, &cfg.estimator, &stream.split_str("estimator"))?;
    let domain = beta_domain(samples, &inputs.f, n_qubits, cfg)?;
    let n = domain.n();
    let widths: Vec<f64> = (0..n).map(|j| domain.beta_box().width(j).max(1e-6)).collect();
    let lengthscales: Vec<f64> = (0..n)
        .map(|_| cfg.q_lengthscale)
        .chain(widths.iter().map(|w| cfg.beta_lengthscale_factor * w))
        .collect();
    let kernel = RbfKernel::new(lengthscales, 1.0)?;
    let ucb = UcbConfig {
        iterations: cfg.iterations,
        candidates: cfg.candidates,
        delta: cfg.delta,
        kappa_n: n,
        sigma_noise: cfg.sigma_noise,
        observation_noise: cfg.observation_noise,
        refine: cfg.refine,
    };
    let objective = |z: &[f64]| loss_at(z, &inputs);
    let run = run_gp_ucb(
        objective,
        &domain,
        kernel,
        &ucb,
        &stream.split_str("ucb"),
        None,
        &hooks.forced,
        &hooks.extra_candidates,
    )?;
    let best = run.best().clone();
    let last = run.last().clone();
    let reference = reference_optimum(&domain, &inputs, cfg.reference_samples, &stream.split_str("reference"))?.max(best.value);
    let mut ledger = RegretLedger::new(reference);
    for s in &run.steps {
        ledger.record(s.value, s.kappa);
    }
    let final_stream = stream.split_str("final");
    let fresh = estimate_gram(&states, source, &cfg.estimator, &final_stream)?;
    let mut final_value = loss_at(&last.z, &fresh)?;
    if cfg.observation_noise == ObservationNoise::StandardNormal {
        let e: f64 = StandardNormal.sample(&mut final_stream.split_str("noise").rng());
        final_value += e;
    }
    Ok(BmaxsResult {
        accepted: final_value <= cfg.epsilon,
        final_value,
        final_run_value: last.value,
        final_z: last.z,
        best_value: best.value,
        best_z: best.z,
        reference_optimum: reference,
        ledger,
        run,
        inputs,
        domain,
        samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{sample_qnn_set, Architecture, Layout};
    use crate::qsim::DensityMatrix;

    fn small_cfg(t: usize) -> BmaxsConfig {
        BmaxsConfig {
            iterations: t,
            candidates: 32,
            reference_samples: 64,
            grid_points: 64,
            ..BmaxsConfig::default()
        }
    }

    #[test]
    fn maximally_mixed_vertex_loss() {
        let arch = Architecture::build(2, Layout::Staircase, 1).unwrap();
        let samples = sample_qnn_set(&arch, 3, &RngStream::new(2)).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let mut forced = vec![0.0; 6];
        forced[0] = 1.0;
        forced[3] = 1.0;
        let hooks = BmaxsHooks {
            forced: vec![forced],
            ..Default::default()
        };
        let r = bmaxs(&rho, &samples, &small_cfg(3), &hooks, &RngStream::new(5)).unwrap();
        assert!((r.run.steps[0].value - 0.75).abs() < 1e-12);
        assert!(r.best_value >= 0.75 - 1e-12);
        assert!(r.run.steps.iter().all(|s| s.value <= r.best_value));
        assert!(r.ledger.verify());
    }

    #[test]
    fn single_iteration_and_determinism() {
        let arch = Architecture::build(2, Layout::Staircase, 1).unwrap();
        let samples = sample_qnn_set(&arch, 2, &RngStream::new(3)).unwrap();
        let rho = samples[0].state.to_density();
        let a = bmaxs(&rho, &samples, &small_cfg(1), &BmaxsHooks::default(), &RngStream::new(1)).unwrap();
        assert_eq!(a.ledger.len(), 1);
        assert_eq!(a.run.steps.len(), 1);
        let b = bmaxs(&rho, &samples, &small_cfg(1), &BmaxsHooks::default(), &RngStream::new(1)).unwrap();
        assert_eq!(a.run, b.run);
        assert!(a.domain.contains(&a.final_z, 1e-8));
    }
}
