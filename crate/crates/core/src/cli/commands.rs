use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{ModeArg, RunConfig};
use super::output::{f17, opt_f17, point_hash, Csv, OutputDir, PlotData};
use super::{CliError, Command};
use crate::ansatz::{prepare_noisy_state, sample_qnn_set, Architecture, CircuitDocument, ParameterSet, QnnSample};
use crate::bayesopt::bmaxs::loss_at;
use crate::bayesopt::{bmaxs, BmaxsConfig, BmaxsHooks, RegretLedger, UcbRun};
use crate::entropy::{
    default_shots, estimate_entropy, parity_circuit_estimate, relative_entropy_screen, BellRunConfig,
};
use crate::error::Error;
use crate::intrinsic::{sample_count_for, validate_intrinsic_connection, KernelConfig};
use crate::noise::{
    channel_f_metric, max_depth_for_purity, monte_carlo_overlap, purity_lower_bound, ChannelSpec, PurityRow,
    DEFAULT_DEPTH_SCAN_CAP,
};
use crate::qsim::io::{read_state, write_state, StoredState};
use crate::qsim::{von_neumann_entropy_exact, DensityMatrix, StateVector};
use crate::rng::RngStream;
use crate::scp::{exact_inputs, probe_samples, run_scp_traced, ssap_report, Outcome, ScpConfig, ScpHooks};
use crate::shadows::{collect_shadows, median_of_means, SealedState, StateSource};

/// Written next to every `.qstate` file produced by `prepare`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub circuit: CircuitDocument,
    pub channel: ChannelSpec,
    pub seed: u64,
    pub params_source: String,
    pub purity: f64,
}

pub fn sidecar_path(state: &Path) -> std::path::PathBuf {
    state.with_extension("json")
}

/// The state under study together with the circuit that produced it, when known.
pub struct Target {
    pub rho: DensityMatrix,
    pub circuit: Option<(Architecture, ParameterSet)>,
    pub sidecar: Sidecar,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_target(cfg: &RunConfig) -> Result<Target, CliError> {
    if let Some(input) = &cfg.state.input {
        let rho = read_state(input)?.into_density();
        let side = sidecar_path(input);
        if side.exists() {
            let sidecar: Sidecar = serde_json::from_str(&read_text(&side)?)
                .map_err(|e| CliError::Io(format!("{}: {e}", side.display())))?;
            let circuit = match sidecar.circuit.decode()? {
                (arch, Some(p)) if arch.n() == rho.n() => Some((arch, p)),
                _ => None,
            };
            return Ok(Target { rho, circuit, sidecar });
        }
        let arch = Architecture::build(rho.n(), cfg.state.layout, cfg.state.depth)?;
        let purity = rho.purity();
        return Ok(Target {
            rho,
            circuit: None,
            sidecar: Sidecar {
                format: "QSTATE1".into(),
                circuit: CircuitDocument::new(&arch, None),
                channel: cfg.channel()?,
                seed: cfg.seed,
                params_source: format!("external:{}", input.display()),
                purity,
            },
        });
    }
    let channel = cfg.channel()?;
    let (arch, params, source) = match &cfg.state.params_file {
        Some(p) => {
            let doc = CircuitDocument::from_json(&read_text(p)?)?;
            match doc.decode()? {
                (arch, Some(params)) => (arch, params, format!("file:{}", p.display())),
                _ => {
                    return Err(CliError::Config(format!("state.params_file: {} has no coefficients", p.display())));
                }
            }
        }
        None => {
            let arch = Architecture::build(cfg.state.n, cfg.state.layout, cfg.state.depth)?;
            let params = ParameterSet::random(&arch, &RngStream::new(cfg.seed).split_str("prepare"));
            (arch, params, "sampled".to_string())
        }
    };
    let rho = prepare_noisy_state(&arch, &params, &channel)?;
    let purity = rho.purity();
    Ok(Target {
        sidecar: Sidecar {
            format: "QSTATE1".into(),
            circuit: CircuitDocument::new(&arch, Some(&params)),
            channel,
            seed: cfg.seed,
            params_source: source,
            purity,
        },
        rho,
        circuit: Some((arch, params)),
    })
}

fn source_for(cfg: &RunConfig, rho: &DensityMatrix) -> Box<dyn StateSource> {
    match cfg.mode {
        ModeArg::Exact => Box::new(rho.clone()),
        ModeArg::Shadow => Box::new(SealedState::new(rho.clone())),
    }
}

pub fn bmaxs_config(cfg: &RunConfig) -> BmaxsConfig {
    let b = &cfg.bmaxs;
    let mut c = BmaxsConfig {
        iterations: b.iterations,
        epsilon: b.epsilon,
        delta: b.delta,
        candidates: b.candidates,
        estimator: cfg.estimator(),
        grid_points: b.grid_points,
        kernel_degree: b.kernel_degree,
        ridge_lambda: b.ridge_lambda,
        reference_samples: b.reference_samples,
        refine: b.refine,
        ..BmaxsConfig::default()
    };
    if b.unit_noise {
        c = c.unit_noise();
    }
    if let Some(s) = b.sigma_noise {
        c.sigma_noise = s;
    }
    c
}

pub fn scp_config(cfg: &RunConfig) -> ScpConfig {
    let s = &cfg.scp;
    ScpConfig {
        epsilon: s.epsilon,
        delta: s.delta,
        layout: s.layout.unwrap_or(cfg.state.layout),
        k_exponent: s.k_exponent,
        n_override: s.n_override,
        t_override: s.t_override,
        n_cap: s.n_cap,
        t_cap: s.t_cap,
        evaluation_budget: s.evaluation_budget,
        bmaxs: bmaxs_config(cfg),
    }
}

struct Run<'a> {
    command: Command,
    cfg: &'a RunConfig,
    out: OutputDir,
    plot: PlotData,
    started: u64,
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl<'a> Run<'a> {
    fn new(command: Command, cfg: &'a RunConfig) -> Result<Self, CliError> {
        let out = OutputDir::create(&cfg.out)?;
        out.write("config.resolved.toml", cfg.to_toml())?;
        Ok(Self {
            command,
            cfg,
            out,
            plot: PlotData::new(cfg.emit_plot_data),
            started: unix_now(),
        })
    }

    fn stream(&self) -> RngStream {
        RngStream::new(self.cfg.seed).split_str(self.command.name())
    }

    fn summary(&self, name: &str, result: serde_json::Value) -> Result<(), CliError> {
        self.out.write_json(
            name,
            &json!({
                "command": self.command.name(),
                "seed": self.cfg.seed,
                "config": self.cfg,
                "result": result,
            }),
        )
    }

    fn finish(self) -> Result<(), CliError> {
        self.plot.write(&self.out)?;
        self.out.write_json(
            "metadata.json",
            &json!({
                "command": self.command.name(),
                "version": env!("CARGO_PKG_VERSION"),
                "started_unix": self.started,
                "finished_unix": unix_now(),
            }),
        )
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<(), CliError> {
    let mut run = Run::new(command, cfg)?;
    let status = match command {
        Command::Prepare => prepare(&mut run),
        Command::Scp => scp(&mut run),
        Command::Bmaxs => bmaxs_cmd(&mut run),
        Command::ValidateIntrinsic => intrinsic(&mut run),
        Command::PurityBound => purity(&mut run),
        Command::Entropy => entropy(&mut run),
        Command::Shadows => shadows(&mut run),
    };
    let finished = run.finish();
    status.and(finished)
}

fn prepare(run: &mut Run) -> Result<(), CliError> {
    let target = load_target(run.cfg)?;
    let state_path = run.out.path("state.qstate");
    write_state(&state_path, &StoredState::Density(target.rho.clone()))?;
    run.out.write_json("state.json", &target.sidecar)?;
    run.summary(
        "summary.json",
        json!({
            "n": target.rho.n(),
            "purity": target.sidecar.purity,
            "entropy": von_neumann_entropy_exact(&target.rho),
            "state_file": "state.qstate",
            "params_source": target.sidecar.params_source,
        }),
    )
}

fn ledger_columns(ledger: Option<&RegretLedger>, i: usize) -> [String; 4] {
    match ledger {
        Some(l) if i < l.len() => [f17(l.regrets[i]), f17(l.cumulative[i]), f17(l.average[i]), f17(l.simple[i])],
        _ => Default::default(),
    }
}

fn trace_csv(run: &UcbRun, ledger: Option<&RegretLedger>, exact: impl Fn(&[f64]) -> Option<f64>) -> Csv {
    let mut csv = Csv::new(&[
        "t",
        "kappa",
        "z_hash",
        "y",
        "value",
        "value_exact",
        "mu",
        "sigma",
        "regret",
        "cumulative_regret",
        "average_regret",
        "simple_regret",
    ]);
    for (i, s) in run.steps.iter().enumerate() {
        let [r, c, a, m] = ledger_columns(ledger, i);
        csv.row(vec![
            s.t.to_string(),
            f17(s.kappa),
            point_hash(&s.z),
            f17(s.y),
            f17(s.value),
            opt_f17(exact(&s.z)),
            f17(s.mu),
            f17(s.sigma),
            r,
            c,
            a,
            m,
        ]);
    }
    csv
}

fn states_of(samples: &[QnnSample]) -> Vec<StateVector> {
    samples.iter().map(|s| s.state.clone()).collect()
}

fn scp(run: &mut Run) -> Result<(), CliError> {
    let target = load_target(run.cfg)?;
    let scfg = scp_config(run.cfg);
    let mut hooks = ScpHooks::default();
    if run.cfg.scp.anchor_target {
        match &target.circuit {
            Some((arch, params)) if arch.layout() == scfg.layout => hooks.anchor = Some((arch.depth(), params.clone())),
            Some(_) => return Err(CliError::Config("scp.anchor_target: target layout differs from scp.layout".into())),
            None => return Err(CliError::Config("scp.anchor_target: the target's circuit parameters are unknown".into())),
        }
    }
    let source = source_for(run.cfg, &target.rho);
    let stream = run.stream();
    let (verdict, traces) = run_scp_traced(source.as_ref(), &scfg, &hooks, &stream)?;

    let mut probes = Csv::new(&[
        "depth", "accepted", "final_value", "best_value", "witness_min_loss", "N_used", "T_used", "seed",
    ]);
    for p in &verdict.probes {
        probes.row(vec![
            p.depth.to_string(),
            p.accepted.to_string(),
            f17(p.final_value),
            f17(p.best_value),
            opt_f17(p.witness.as_ref().map(|w| w.min_loss)),
            p.n_used.to_string(),
            p.t_used.to_string(),
            p.seed.to_string(),
        ]);
        run.plot.point("final_value", p.depth as f64, p.final_value, None);
        run.plot.point("best_value", p.depth as f64, p.best_value, None);
    }
    run.out.write_csv("probes.csv", &probes)?;

    for tr in &traces {
        let arch = Architecture::build(verdict.n, scfg.layout, tr.depth)?;
        let n_used = scfg.budget(&arch).n_used;
        let probe_stream = stream.split_str("probe").split(tr.depth as u64);
        let samples = probe_samples(&arch, n_used, &hooks, &probe_stream.split_str("samples"))?;
        let inputs = exact_inputs(&states_of(&samples), &target.rho)?;
        let csv = trace_csv(&tr.run, Some(&tr.ledger), |z| loss_at(z, &inputs).ok());
        run.out.write_csv(&format!("trace_depth_{}.csv", tr.depth), &csv)?;
        for (i, avg) in tr.ledger.average.iter().enumerate() {
            run.plot.point(&format!("average_regret_depth_{}", tr.depth), (i + 1) as f64, *avg, None);
        }
    }

    let report = ssap_report(&verdict, verdict.n);
    run.out.write("report.txt", &report.text)?;
    run.out.write("verdict.json", verdict.to_json()? + "\n")?;
    run.summary("summary.json", json!({ "verdict": to_value(&verdict)?, "report": to_value(&report)? }))?;
    if verdict.outcome == Outcome::Inconclusive {
        return Err(CliError::Budget(format!(
            "evaluation budget {:?} exhausted after probing depths {:?}",
            verdict.caps.evaluation_budget,
            verdict.probes.iter().map(|p| p.depth).collect::<Vec<_>>()
        )));
    }
    Ok(())
}

fn bmaxs_cmd(run: &mut Run) -> Result<(), CliError> {
    let target = load_target(run.cfg)?;
    let n = target.rho.n();
    let arch = Architecture::build(n, run.cfg.state.layout, run.cfg.bmaxs.depth)?;
    let count = run.cfg.bmaxs.samples.unwrap_or_else(|| sample_count_for(&arch, run.cfg.bmaxs.epsilon).min(64));
    let stream = run.stream();
    let samples = sample_qnn_set(&arch, count, &stream.split_str("samples"))?;
    let bcfg = bmaxs_config(run.cfg);
    let source = source_for(run.cfg, &target.rho);
    let result = bmaxs(source.as_ref(), &samples, &bcfg, &BmaxsHooks::default(), &stream.split_str("bmaxs"))?;
    let inputs = exact_inputs(&states_of(&samples), &target.rho)?;
    let csv = trace_csv(&result.run, Some(&result.ledger), |z| loss_at(z, &inputs).ok());
    run.out.write_csv("trace.csv", &csv)?;
    for (i, s) in result.run.steps.iter().enumerate() {
        run.plot.point("value", s.t as f64, s.value, None);
        if let Some(a) = result.ledger.average.get(i) {
            run.plot.point("average_regret", s.t as f64, *a, None);
        }
    }
    run.summary(
        "summary.json",
        json!({
            "accepted": result.accepted,
            "final_value": result.final_value,
            "final_run_value": result.final_run_value,
            "final_value_exact": loss_at(&result.final_z, &inputs)?,
            "best_value": result.best_value,
            "reference_optimum": result.reference_optimum,
            "average_regret": result.ledger.average_regret(),
            "simple_regret": result.ledger.simple_regret(),
            "ledger_consistent": result.ledger.verify(),
            "samples": result.samples,
            "iterations": bcfg.iterations,
            "final_z": result.final_z,
            "domain": to_value(&result.domain)?,
        }),
    )
}

fn intrinsic(run: &mut Run) -> Result<(), CliError> {
    let target = load_target(run.cfg)?;
    let i = &run.cfg.intrinsic;
    let arch = Architecture::build(target.rho.n(), run.cfg.state.layout, i.depth)?;
    let samples = i.samples.unwrap_or_else(|| sample_count_for(&arch, i.epsilon));
    let mut kernel = KernelConfig::for_qubits(arch.n());
    if let Some(d) = i.degree {
        kernel.degree = d;
    }
    let report = validate_intrinsic_connection(&arch, samples, i.probes, &target.rho, &kernel, &run.stream())?;
    let mut csv = Csv::new(&["probe", "beta_sum"]);
    for (p, s) in report.beta_sums.iter().enumerate() {
        csv.row(vec![p.to_string(), f17(*s)]);
        run.plot.point("beta_sum", p as f64, *s, None);
    }
    run.out.write_csv("beta_sums.csv", &csv)?;
    run.summary(
        "summary.json",
        json!({
            "report": to_value(&report)?,
            "within_bound": report.within_bound(),
            "beta_sum_fraction_0.1": report.beta_sum_fraction(0.1),
        }),
    )
}

fn purity(run: &mut Run) -> Result<(), CliError> {
    let p = &run.cfg.purity;
    let channel = ChannelSpec::new(p.channel, p.strength).map_err(|e| CliError::Config(format!("purity.channel: {e}")))?;
    let f = channel_f_metric(&channel, p.n)?;
    let stream = run.stream();
    let mut rows = Vec::with_capacity(p.depths.len());
    for &depth in &p.depths {
        let eta = purity_lower_bound(f, p.n, depth)?;
        let child = stream.split(depth as u64);
        let mc = if p.trials > 0 {
            Some(monte_carlo_overlap(&channel, p.n, depth, p.trials, &child)?)
        } else {
            None
        };
        rows.push(PurityRow {
            n: p.n,
            channel: p.channel.name().to_string(),
            strength: p.strength,
            depth,
            f,
            eta,
            mc_mean: mc.map(|m| m.mean),
            mc_stderr: mc.map(|m| m.stderr),
            trials: p.trials,
            seed: child.seed(),
        });
    }
    let mut csv = Csv::new(&["n", "channel", "strength", "depth", "F", "eta", "mc_mean", "mc_stderr", "trials", "seed"]);
    for r in &rows {
        csv.row(vec![
            r.n.to_string(),
            r.channel.clone(),
            f17(r.strength),
            r.depth.to_string(),
            f17(r.f),
            f17(r.eta),
            opt_f17(r.mc_mean),
            opt_f17(r.mc_stderr),
            r.trials.to_string(),
            r.seed.to_string(),
        ]);
        run.plot.point("eta", r.depth as f64, r.eta, None);
        if let Some(m) = r.mc_mean {
            run.plot.point("mc_overlap", r.depth as f64, m, r.mc_stderr);
        }
    }
    run.out.write_csv("purity.csv", &csv)?;
    let max_depth = match p.eta_target {
        Some(t) => Some(to_value(&max_depth_for_purity(f, p.n, t, DEFAULT_DEPTH_SCAN_CAP)?)?),
        None => None,
    };
    run.summary("summary.json", json!({ "F": f, "rows": to_value(&rows)?, "max_depth_for_eta_target": max_depth }))
}

fn entropy(run: &mut Run) -> Result<(), CliError> {
    let target = load_target(run.cfg)?;
    let e = &run.cfg.entropy;
    let n = target.rho.n();
    let shots = e.shots.unwrap_or_else(|| default_shots(n));
    let stream = run.stream();
    let est = estimate_entropy(&target.rho, e.eta, e.eps, e.mode, shots, &stream.split_str("swap"))?;
    let screen = relative_entropy_screen(est.value, n, e.threshold)?;
    let mode = serde_json::to_value(e.mode)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let mut csv = Csv::new(&["n", "l", "method", "mode", "estimate", "stderr", "N_Q", "seed"]);
    for r in &est.trace_powers {
        csv.row(vec![
            n.to_string(),
            r.l.to_string(),
            "hadamard_test".into(),
            mode.clone(),
            f17(r.estimate),
            f17(r.stderr),
            shots.to_string(),
            stream.split_str("swap").split(r.l as u64).seed().to_string(),
        ]);
        run.plot.point("trace_power", r.l as f64, r.estimate, Some(r.stderr));
    }
    let mut parity_note = None;
    if e.parity {
        let parity_stream = stream.split_str("parity");
        for l in 1..=e.parity_max_l {
            let child = parity_stream.split(l as u64);
            let bell = BellRunConfig { l, shots, mode: e.mode };
            match parity_circuit_estimate(&target.rho, &bell, &child) {
                Ok(p) => {
                    for (method, est) in [("parity_bit", p.bit), ("parity_sign", p.sign)] {
                        csv.row(vec![
                            n.to_string(),
                            l.to_string(),
                            method.into(),
                            mode.clone(),
                            f17(est.value),
                            f17(est.stderr),
                            shots.to_string(),
                            child.seed().to_string(),
                        ]);
                    }
                }
                Err(Error::CapExceeded { needed, cap }) => {
                    parity_note = Some(format!("parity circuit stopped at l = {l}: dimension {needed} > cap {cap}"));
                    break;
                }
                Err(err) => return Err(err.into()),
            }
        }
    }
    run.out.write_csv("trace_powers.csv", &csv)?;
    run.summary(
        "summary.json",
        json!({
            "entropy_estimate": est.value,
            "stderr": est.stderr,
            "entropy_exact": von_neumann_entropy_exact(&target.rho),
            "degree": est.poly.degree,
            "error_bound": est.poly.bound,
            "max_grid_error": est.poly.max_grid_error,
            "truncated_at": est.truncated_at,
            "shots": shots,
            "screen": to_value(&screen)?,
            "parity_note": parity_note,
            "poly": to_value(&est.poly)?,
        }),
    )
}

fn shadows(run: &mut Run) -> Result<(), CliError> {
    let target = load_target(run.cfg)?;
    let est = run.cfg.estimator();
    let stream = run.stream();
    let set = collect_shadows(&target.rho, est.num_snapshots, est.ensemble, &stream.split_str("snapshots"))?;
    run.out.write("shadows.json", set.to_json()? + "\n")?;
    let arch = Architecture::build(target.rho.n(), run.cfg.state.layout, run.cfg.shadows.probe_depth)?;
    let probes = sample_qnn_set(&arch, run.cfg.shadows.probes, &stream.split_str("probes"))?;
    let states = states_of(&probes);
    let values = set.probe_values(&states)?;
    let mut csv = Csv::new(&["probe", "estimate", "stderr", "exact", "abs_error"]);
    let mut errors = Vec::with_capacity(states.len());
    for (j, psi) in states.iter().enumerate() {
        let column: Vec<f64> = values.iter().map(|row| row[j]).collect();
        let e = median_of_means(&column, est.mom_batches)?;
        let exact = target.rho.fidelity_pure(psi)?;
        errors.push((e.value - exact).abs());
        csv.row(vec![j.to_string(), f17(e.value), f17(e.stderr), f17(exact), f17((e.value - exact).abs())]);
        run.plot.point("fidelity_estimate", j as f64, e.value, Some(e.stderr));
        run.plot.point("fidelity_exact", j as f64, exact, None);
    }
    run.out.write_csv("fidelity.csv", &csv)?;
    let mean_abs_error = errors.iter().sum::<f64>() / errors.len() as f64;
    run.summary(
        "summary.json",
        json!({
            "snapshots": set.len(),
            "ensemble": to_value(&set.ensemble)?,
            "approximate_ensemble": set.ensemble.is_approximate(),
            "probes": states.len(),
            "mean_abs_error": mean_abs_error,
        }),
    )
}
