//! Layered two-qubit circuit architectures and the states they prepare.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::ChannelSpec;
use crate::qsim::linalg::{expm_neg_i_hermitian, CMatrix, C64};
use crate::qsim::{DensityMatrix, PauliString, StateVector};
use crate::rng::RngStream;

/// Coefficients per two-qubit gate: every Pauli pair except `I⊗I`.
pub const COEFFS_PER_GATE: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Brickwork,
    Staircase,
}

impl Layout {
    pub fn name(self) -> &'static str {
        match self {
            Layout::Brickwork => "brickwork",
            Layout::Staircase => "staircase",
        }
    }
}

impl std::str::FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "brickwork" => Ok(Layout::Brickwork),
            "staircase" => Ok(Layout::Staircase),
            other => Err(Error::InvalidArgument(format!("unknown layout `{other}`"))),
        }
    }
}

pub type Slot = (usize, usize);

/// `R` layers of `L` nearest-neighbour gates on an open chain of `n` qubits.
///
/// A brickwork layer is one sweep over the even bonds `(0,1),(2,3),…` followed
/// by the odd bonds `(1,2),(3,4),…`. A staircase layer visits the bonds in
/// chain order. Both contain `n-1` gates, so every layer connects the chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    n: usize,
    layout: Layout,
    depth: usize,
    slots: Vec<Vec<Slot>>,
}

/// True iff the gate graph on `n` qubits with one edge per slot is connected.
pub fn verify_causal_slice(n: usize, slots: &[Slot]) -> bool {
    if slots.is_empty() || n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in slots {
        if a >= n || b >= n {
            return false;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (1..n).all(|q| find(&mut parent, q) == root)
}

fn layer_slots(n: usize, layout: Layout) -> Vec<Slot> {
    match layout {
        Layout::Staircase => (0..n - 1).map(|q| (q, q + 1)).collect(),
        Layout::Brickwork => (0..n - 1)
            .step_by(2)
            .chain((1..n - 1).step_by(2))
            .map(|q| (q, q + 1))
            .collect(),
    }
}

impl Architecture {
    pub fn build(n: usize, layout: Layout, depth: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("architecture needs n ≥ 2, got {n}")));
        }
        if depth < 1 {
            return Err(Error::InvalidArgument("architecture needs R ≥ 1".into()));
        }
        let layer = layer_slots(n, layout);
        debug_assert!(verify_causal_slice(n, &layer));
        Ok(Self {
            n,
            layout,
            depth,
            slots: vec![layer; depth],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Layer count `R`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Gates per layer `L`.
    pub fn gates_per_layer(&self) -> usize {
        self.slots[0].len()
    }

    pub fn gate_count(&self) -> usize {
        self.depth * self.gates_per_layer()
    }

    pub fn parameter_count(&self) -> usize {
        self.gate_count() * COEFFS_PER_GATE
    }

    pub fn layers(&self) -> &[Vec<Slot>] {
        &self.slots
    }

    /// Same layout with a different depth.
    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        Self::build(self.n, self.layout, depth)
    }
}

/// Flat coefficient vector in gate order (layer-major, slot order, then the 15 Pauli pairs).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterSet {
    values: Vec<f64>,
}

impl ParameterSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() % COEFFS_PER_GATE != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients is not a multiple of {COEFFS_PER_GATE}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..TAU).contains(*v)) {
            return Err(Error::InvalidArgument(format!("coefficient {v} outside [0, 2π)")));
        }
        Ok(Self { values })
    }

    pub fn zeros(arch: &Architecture) -> Self {
        Self {
            values: vec![0.0; arch.parameter_count()],
        }
    }

    pub fn random(arch: &Architecture, stream: &RngStream) -> Self {
        let mut rng = stream.rng();
        Self {
            values: (0..arch.parameter_count()).map(|_| rng.random_range(0.0..TAU)).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn gate(&self, g: usize) -> &[f64] {
        &self.values[g * COEFFS_PER_GATE..(g + 1) * COEFFS_PER_GATE]
    }

    /// Appends zero coefficients up to `total` entries.
    pub fn zero_padded(&self, total: usize) -> Result<Self> {
        if total < self.values.len() {
            return Err(Error::DimensionMismatch(format!("cannot pad {} to {total}", self.values.len())));
        }
        let mut values = self.values.clone();
        values.resize(total, 0.0);
        Ok(Self { values })
    }

    fn check_for(&self, arch: &Architecture) -> Result<()> {
        if self.values.len() != arch.parameter_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for an architecture with {}",
                self.values.len(),
                arch.parameter_count()
            )));
        }
        Ok(())
    }
}

fn pauli_pair_generators() -> &'static [CMatrix] {
    static GENS: OnceLock<Vec<CMatrix>> = OnceLock::new();
    GENS.get_or_init(|| PauliString::all(2).iter().skip(1).map(|p| p.matrix()).collect())
}

/// Index of `α(a, b)` inside a gate's 15 coefficients, with letters ordered `I, X, Y, Z`.
pub fn coefficient_index(a: crate::qsim::Pauli, b: crate::qsim::Pauli) -> Option<usize> {
    let idx = a as usize * 4 + b as usize;
    idx.checked_sub(1)
}

/// `exp(-i Σ α(a,b) P_a⊗P_b)` over the 15 non-identity Pauli pairs.
pub fn two_qubit_gate(coeffs: &[f64]) -> Result<CMatrix> {
    if coeffs.len() != COEFFS_PER_GATE {
        return Err(Error::DimensionMismatch(format!("{} gate coefficients", coeffs.len())));
    }
    let gens = pauli_pair_generators();
    let mut h = CMatrix::zeros(4, 4);
    for (g, &a) in gens.iter().zip(coeffs) {
        if a != 0.0 {
            h += g * C64::new(a, 0.0);
        }
    }
    Ok(expm_neg_i_hermitian(&h))
}

fn gate_matrices(arch: &Architecture, params: &ParameterSet) -> Result<Vec<(CMatrix, [usize; 2])>> {
    params.check_for(arch)?;
    let mut out = Vec::with_capacity(arch.gate_count());
    let mut g = 0;
    for layer in arch.layers() {
        for &(a, b) in layer {
            out.push((two_qubit_gate(params.gate(g))?, [a, b]));
            g += 1;
        }
    }
    Ok(out)
}

pub fn prepare_qnn_state(arch: &Architecture, params: &ParameterSet) -> Result<StateVector> {
    let mut psi = StateVector::zero(arch.n());
    for (u, targets) in gate_matrices(arch, params)? {
        psi = psi.apply_unitary_trusted(&u, &targets);
    }
    Ok(psi)
}

/// Noisy trajectory: every layer of gates is followed by one application of `channel`.
pub fn prepare_noisy_state(arch: &Architecture, params: &ParameterSet, channel: &ChannelSpec) -> Result<DensityMatrix> {
    channel.validate()?;
    let gates = gate_matrices(arch, params)?;
    let per_layer = arch.gates_per_layer();
    let mut rho = DensityMatrix::zero(arch.n());
    for layer in gates.chunks(per_layer) {
        for (u, targets) in layer {
            rho = rho.apply_unitary_trusted(u, targets);
        }
        rho = channel.apply(&rho)?;
    }
    Ok(rho)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QnnSample {
    pub index: usize,
    pub params: ParameterSet,
    pub state: StateVector,
}

/// `count` independent uniform parameter draws; sample `i` uses `stream.split(i)`.
pub fn sample_qnn_set(arch: &Architecture, count: usize, stream: &RngStream) -> Result<Vec<QnnSample>> {
    if count < 1 {
        return Err(Error::InvalidArgument("sample count must be ≥ 1".into()));
    }
    (0..count)
        .into_par_iter()
        .map(|i| {
            let params = ParameterSet::random(arch, &stream.split(i as u64));
            let state = prepare_qnn_state(arch, &params)?;
            Ok(QnnSample { index: i, params, state })
        })
        .collect()
}

/// Text document for an architecture and (optionally) its coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub layout: Layout,
    pub n: usize,
    #[serde(rename = "R")]
    pub depth: usize,
    #[serde(rename = "L")]
    pub gates_per_layer: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
}

impl CircuitDocument {
    pub fn new(arch: &Architecture, params: Option<&ParameterSet>) -> Self {
        Self {
            layout: arch.layout(),
            n: arch.n(),
            depth: arch.depth(),
            gates_per_layer: arch.gates_per_layer(),
            coefficients: params.map(|p| p.values().to_vec()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Rebuilds the architecture and checks that the stored `L` and coefficient count agree.
    pub fn decode(&self) -> Result<(Architecture, Option<ParameterSet>)> {
        let arch = Architecture::build(self.n, self.layout, self.depth)?;
        if arch.gates_per_layer() != self.gates_per_layer {
            return Err(Error::Format(format!(
                "document declares L = {} but the layout has {}",
                self.gates_per_layer,
                arch.gates_per_layer()
            )));
        }
        let params = match &self.coefficients {
            Some(c) => {
                let p = ParameterSet::new(c.clone())?;
                p.check_for(&arch)?;
                Some(p)
            }
            None => None,
        };
        Ok((arch, params))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::linalg::{max_abs_diff, unitarity_deviation, I, ONE};
    use crate::qsim::Pauli;
    use proptest::prelude::*;

    fn single(a: Pauli, b: Pauli, value: f64) -> Vec<f64> {
        let mut c = vec![0.0; COEFFS_PER_GATE];
        c[coefficient_index(a, b).unwrap()] = value;
        c
    }

    #[test]
    fn layouts() {
        let b = Architecture::build(4, Layout::Brickwork, 2).unwrap();
        assert_eq!(b.layers()[0], vec![(0, 1), (2, 3), (1, 2)]);
        assert_eq!(b.gates_per_layer(), 3);
        let s = Architecture::build(3, Layout::Staircase, 1).unwrap();
        assert_eq!(s.layers()[0], vec![(0, 1), (1, 2)]);
        for layout in [Layout::Brickwork, Layout::Staircase] {
            assert_eq!(Architecture::build(2, layout, 1).unwrap().layers()[0], vec![(0, 1)]);
        }
        assert!(Architecture::build(1, Layout::Staircase, 1).is_err());
        assert!(Architecture::build(3, Layout::Staircase, 0).is_err());
    }

    #[test]
    fn causal_slice_examples() {
        assert!(verify_causal_slice(3, &[(0, 1), (1, 2)]));
        assert!(!verify_causal_slice(4, &[(0, 1), (2, 3)]));
        assert!(verify_causal_slice(2, &[(0, 1)]));
        assert!(!verify_causal_slice(3, &[]));
        for n in 2..9 {
            for layout in [Layout::Brickwork, Layout::Staircase] {
                let a = Architecture::build(n, layout, 3).unwrap();
                assert!(a.layers().iter().all(|l| verify_causal_slice(n, l)));
                assert!(a.layers().iter().all(|l| l.len() == a.gates_per_layer()));
            }
        }
    }

    #[test]
    fn gate_examples() {
        assert!(max_abs_diff(&two_qubit_gate(&[0.0; 15]).unwrap(), &CMatrix::identity(4, 4)) < 1e-15);
        let g = two_qubit_gate(&single(Pauli::X, Pauli::I, std::f64::consts::FRAC_PI_2)).unwrap();
        let expected = PauliString::parse("XI").unwrap().matrix() * (-I);
        assert!(max_abs_diff(&g, &expected) < 1e-12);
        assert!(two_qubit_gate(&[0.0; 3]).is_err());
    }

    #[test]
    fn xx_rotation_state() {
        let arch = Architecture::build(2, Layout::Staircase, 1).unwrap();
        let p = ParameterSet::new(single(Pauli::X, Pauli::X, std::f64::consts::FRAC_PI_4)).unwrap();
        let psi = prepare_qnn_state(&arch, &p).unwrap();
        let c = std::f64::consts::FRAC_PI_4.cos();
        let a = psi.amplitudes();
        assert!((a[0] - ONE * c).norm() < 1e-12);
        assert!((a[3] - (-I) * c).norm() < 1e-12);
        assert!(a[1].norm() < 1e-12 && a[2].norm() < 1e-12);
        let zero = prepare_qnn_state(&arch, &ParameterSet::zeros(&arch)).unwrap();
        assert_eq!(zero, StateVector::zero(2));
        assert!(prepare_qnn_state(&arch, &ParameterSet::new(vec![0.0; 30]).unwrap()).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(ParameterSet::new(vec![TAU; 15]).is_err());
        assert!(ParameterSet::new(vec![-0.1; 15]).is_err());
        assert!(ParameterSet::new(vec![0.0; 14]).is_err());
    }

    #[test]
    fn finite_difference_matches_closed_form() {
        // α(X,I) = θ on qubit 0 gives ⟨Z₀⟩ = cos 2θ
        let arch = Architecture::build(2, Layout::Staircase, 1).unwrap();
        let z0 = |theta: f64| {
            let psi = prepare_qnn_state(&arch, &ParameterSet::new(single(Pauli::X, Pauli::I, theta)).unwrap()).unwrap();
            let a = psi.amplitudes();
            a[0].norm_sqr() + a[1].norm_sqr() - a[2].norm_sqr() - a[3].norm_sqr()
        };
        let h = 1e-5;
        for theta in [0.3, 1.1, 2.0, 4.5] {
            let fd = (z0(theta + h) - z0(theta - h)) / (2.0 * h);
            assert!((fd + 2.0 * (2.0 * theta).sin()).abs() < 1e-6, "θ = {theta}: {fd}");
        }
    }

    #[test]
    fn noisy_state_examples() {
        let arch = Architecture::build(2, Layout::Brickwork, 2).unwrap();
        let p = ParameterSet::random(&arch, &RngStream::new(3));
        let psi = prepare_qnn_state(&arch, &p).unwrap();
        let clean = prepare_noisy_state(&arch, &p, &ChannelSpec::local_depolarizing(0.0).unwrap()).unwrap();
        assert!(max_abs_diff(clean.matrix(), psi.to_density().matrix()) < 1e-10);
        let ident = prepare_noisy_state(&arch, &p, &ChannelSpec::identity()).unwrap();
        assert!(max_abs_diff(ident.matrix(), psi.to_density().matrix()) < 1e-10);
        let full = prepare_noisy_state(&arch, &p, &ChannelSpec::local_depolarizing(1.0).unwrap()).unwrap();
        assert!(max_abs_diff(full.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);

        let one = Architecture::build(2, Layout::Staircase, 1).unwrap();
        let rho = prepare_noisy_state(&one, &ParameterSet::zeros(&one), &ChannelSpec::local_depolarizing(0.1).unwrap()).unwrap();
        // each qubit: |0⟩⟨0| -> diag(1 - γ/2, γ/2)
        let (a, b) = (0.95, 0.05);
        let expected = DensityMatrix::diagonal(2, &[a * a, a * b, b * a, b * b]).unwrap();
        assert!(max_abs_diff(rho.matrix(), expected.matrix()) < 1e-14);
    }

    #[test]
    fn sampling_is_deterministic() {
        let arch = Architecture::build(3, Layout::Staircase, 2).unwrap();
        let s = RngStream::new(42);
        let a = sample_qnn_set(&arch, 5, &s).unwrap();
        let b = sample_qnn_set(&arch, 5, &s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].params, sample_qnn_set(&arch, 1, &s).unwrap()[0].params);
        assert!(a.iter().all(|q| q.params.values().iter().all(|v| (0.0..TAU).contains(v))));
        assert!(sample_qnn_set(&arch, 0, &s).is_err());
    }

    #[test]
    fn document_round_trip() {
        let arch = Architecture::build(3, Layout::Brickwork, 2).unwrap();
        let p = ParameterSet::random(&arch, &RngStream::new(5));
        let text = CircuitDocument::new(&arch, Some(&p)).to_json().unwrap();
        assert!(text.contains("\"brickwork\""));
        let (a2, p2) = CircuitDocument::from_json(&text).unwrap().decode().unwrap();
        assert_eq!(a2, arch);
        assert_eq!(p2.unwrap(), p);
        let mut bad = CircuitDocument::new(&arch, None);
        bad.gates_per_layer = 7;
        assert!(bad.decode().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn random_gates_are_unitary(seed in any::<u64>()) {
            let mut rng = RngStream::new(seed).rng();
            let c: Vec<f64> = (0..15).map(|_| rand::Rng::random_range(&mut rng, 0.0..TAU)).collect();
            prop_assert!(unitarity_deviation(&two_qubit_gate(&c).unwrap()) < 1e-9);
        }

        #[test]
        fn shallower_circuit_embeds(seed in any::<u64>(), n in 2usize..5, depth in 2usize..4) {
            let arch = Architecture::build(n, Layout::Brickwork, depth).unwrap();
            let short = arch.with_depth(depth - 1).unwrap();
            let p = ParameterSet::random(&short, &RngStream::new(seed));
            let a = prepare_qnn_state(&short, &p).unwrap();
            let b = prepare_qnn_state(&arch, &p.zero_padded(arch.parameter_count()).unwrap()).unwrap();
            prop_assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-10);
            prop_assert!((b.amplitudes().norm() - 1.0).abs() < 1e-10);
        }
    }
}
