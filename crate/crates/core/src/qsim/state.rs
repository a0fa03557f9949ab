use super::channel::KrausChannel;
use super::linalg::{
    self, check_targets, dim_of, eigvalsh, hermiticity_deviation, unitarity_deviation, CMatrix, CVector, C64,
    PSD_FLOOR, ZERO,
};
use crate::error::{Error, Result};

/// Tolerance on a gate's unitarity before it is rejected.
pub const UNITARY_TOL: f64 = 1e-9;
/// Tolerance on norms, traces and Hermiticity of stored states.
pub const STATE_TOL: f64 = 1e-10;

/// Pure state on `n` qubits. Basis index bit `n-1-q` is qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: CVector,
}

impl StateVector {
    pub fn new(n: usize, amps: CVector) -> Result<Self> {
        if amps.len() != dim_of(n) {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {n} qubits",
                amps.len()
            )));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("norm² = {norm2}")));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes `amps` before construction.
    pub fn normalized(n: usize, amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(n, amps / C64::new(norm, 0.0))
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if index >= dim_of(n) {
            return Err(Error::InvalidArgument(format!("basis index {index} on {n} qubits")));
        }
        let mut amps = CVector::zeros(dim_of(n));
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0).expect("index 0 always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n: self.n,
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    pub fn apply_unitary(&self, gate: &CMatrix, targets: &[usize]) -> Result<Self> {
        check_gate(self.n, gate, targets)?;
        Ok(Self {
            n: self.n,
            amps: linalg::apply_to_vector(&self.amps, self.n, gate, targets),
        })
    }

    /// Unchecked application used on hot paths whose gates are unitary by construction.
    pub(crate) fn apply_unitary_trusted(&self, gate: &CMatrix, targets: &[usize]) -> Self {
        Self {
            n: self.n,
            amps: linalg::apply_to_vector(&self.amps, self.n, gate, targets),
        }
    }
}

/// Mixed state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: CMatrix,
}

fn check_gate(n: usize, gate: &CMatrix, targets: &[usize]) -> Result<()> {
    if !gate.is_square() {
        return Err(Error::DimensionMismatch("gate is not square".into()));
    }
    check_targets(n, targets, gate.nrows())?;
    let deviation = unitarity_deviation(gate);
    if deviation > UNITARY_TOL {
        return Err(Error::NonUnitary { deviation });
    }
    Ok(())
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before wrapping `mat`.
    pub fn new(n: usize, mat: CMatrix) -> Result<Self> {
        let d = dim_of(n);
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for {n} qubits",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm = hermiticity_deviation(&mat);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace = {tr}")));
        }
        let min_eig = eigvalsh(&mat).first().copied().unwrap_or(0.0);
        if min_eig < -PSD_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { n, mat })
    }

    pub(crate) fn from_raw(n: usize, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), dim_of(n));
        Self { n, mat }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = dim_of(n);
        Self {
            n,
            mat: CMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0),
        }
    }

    pub fn zero(n: usize) -> Self {
        StateVector::zero(n).to_density()
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(n: usize, probs: &[f64]) -> Result<Self> {
        if probs.len() != dim_of(n) {
            return Err(Error::DimensionMismatch(format!("{} probabilities for {n} qubits", probs.len())));
        }
        let mut mat = CMatrix::zeros(probs.len(), probs.len());
        for (i, &p) in probs.iter().enumerate() {
            mat[(i, i)] = C64::new(p, 0.0);
        }
        Self::new(n, mat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn apply_unitary(&self, gate: &CMatrix, targets: &[usize]) -> Result<Self> {
        check_gate(self.n, gate, targets)?;
        Ok(self.apply_unitary_trusted(gate, targets))
    }

    pub(crate) fn apply_unitary_trusted(&self, gate: &CMatrix, targets: &[usize]) -> Self {
        Self {
            n: self.n,
            mat: linalg::sandwich(&self.mat, self.n, gate, gate, targets),
        }
    }

    /// Conjugation by a full-register unitary `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        let targets: Vec<usize> = (0..self.n).collect();
        self.apply_unitary(u, &targets)
    }

    pub fn apply_channel(&self, channel: &KrausChannel, targets: &[usize]) -> Result<Self> {
        channel.check_complete()?;
        check_targets(self.n, targets, dim_of(channel.n_targets()))?;
        if targets.len() != channel.n_targets() {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit channel on {} targets",
                channel.n_targets(),
                targets.len()
            )));
        }
        Ok(self.apply_channel_trusted(channel, targets))
    }

    pub(crate) fn apply_channel_trusted(&self, channel: &KrausChannel, targets: &[usize]) -> Self {
        let d = self.dim();
        let mut acc = CMatrix::zeros(d, d);
        for k in channel.ops() {
            acc += linalg::sandwich(&self.mat, self.n, k, k, targets);
        }
        Self { n: self.n, mat: acc }
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_pure(&self, psi: &StateVector) -> Result<f64> {
        fidelity_pure(self, psi)
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    pub fn spectrum(&self) -> Vec<f64> {
        eigvalsh(&self.mat)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    /// `ρ ⊗ σ` with `self` on the leading qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            n: self.n + other.n,
            mat: self.mat.kronecker(&other.mat),
        }
    }
}

pub fn fidelity_pure(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if rho.n != psi.n() {
        return Err(Error::DimensionMismatch(format!("{} vs {} qubits", rho.n, psi.n())));
    }
    let v = psi.amplitudes();
    let val = v.dotc(&(&rho.mat * v));
    debug_assert!(val.im.abs() < 1e-9, "imaginary residue {}", val.im);
    Ok(val.re)
}

/// `½ Σ |eig(a - b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(format!("{} vs {} qubits", a.n, b.n)));
    }
    Ok(trace_norm(&(&a.mat - &b.mat)) / 2.0)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().map(|x| x.abs()).sum()
}

/// `Tr ρ²` computed as the squared Frobenius norm (independent of the spectral route).
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.mat.iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr ρ^l` from the clamped spectrum.
pub fn trace_power_exact(rho: &DensityMatrix, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be ≥ 1".into()));
    }
    if l == 1 {
        return Ok(1.0);
    }
    let (vals, _) = linalg::clamp_spectrum(&rho.spectrum());
    Ok(vals.iter().map(|&x| x.powi(l as i32)).sum())
}

/// Von Neumann entropy in nats with `0 ln 0 = 0`.
pub fn von_neumann_entropy_exact(rho: &DensityMatrix) -> f64 {
    let (vals, _) = linalg::clamp_spectrum(&rho.spectrum());
    vals.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n;
    for (i, &q) in keep.iter().enumerate() {
        if q >= n || keep[..i].contains(&q) {
            return Err(Error::InvalidQubit(format!("keep list {keep:?} on {n} qubits")));
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let m = traced.len();
    let compose = |a: usize, t: usize| -> usize {
        let mut idx = 0usize;
        for (j, &q) in keep.iter().enumerate() {
            idx |= ((a >> (k - 1 - j)) & 1) << (n - 1 - q);
        }
        for (j, &q) in traced.iter().enumerate() {
            idx |= ((t >> (m - 1 - j)) & 1) << (n - 1 - q);
        }
        idx
    };
    let dk = dim_of(k);
    let mut out = CMatrix::from_element(dk, dk, ZERO);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = ZERO;
            for t in 0..dim_of(m) {
                acc += rho.mat[(compose(a, t), compose(b, t))];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix { n: k, mat: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::channel::KrausChannel;
    use crate::qsim::haar::haar_random_unitary;
    use crate::qsim::linalg::{embed_operator, max_abs_diff};
    use crate::qsim::pauli::Pauli;
    use crate::rng::RngStream;

    fn plus() -> StateVector {
        let s = 1.0 / 2f64.sqrt();
        StateVector::new(1, CVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)])).unwrap()
    }

    fn minus() -> StateVector {
        let s = 1.0 / 2f64.sqrt();
        StateVector::new(1, CVector::from_vec(vec![C64::new(s, 0.0), C64::new(-s, 0.0)])).unwrap()
    }

    #[test]
    fn identity_gate_leaves_state() {
        let psi = StateVector::basis(2, 1).unwrap();
        let out = psi.apply_unitary(&linalg::identity(2), &[1]).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn x_on_qubit_zero_flips_msb() {
        let psi = StateVector::zero(2);
        let out = psi.apply_unitary(&Pauli::X.matrix(), &[0]).unwrap();
        assert_eq!(out, StateVector::basis(2, 0b10).unwrap());
    }

    #[test]
    fn unitary_round_trip() {
        let u = haar_random_unitary(4, &RngStream::new(3)).unwrap();
        let psi = StateVector::zero(2);
        let back = psi
            .apply_unitary(&u, &[0, 1])
            .unwrap()
            .apply_unitary(&u.adjoint(), &[0, 1])
            .unwrap();
        let diff = (back.amplitudes() - psi.amplitudes()).norm();
        assert!(diff < 1e-10);
    }

    #[test]
    fn rejects_bad_gates() {
        let psi = StateVector::zero(2);
        let not_unitary = linalg::identity(2) * C64::new(2.0, 0.0);
        assert!(matches!(psi.apply_unitary(&not_unitary, &[0]), Err(Error::NonUnitary { .. })));
        assert!(matches!(
            psi.apply_unitary(&linalg::identity(4), &[0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(psi.apply_unitary(&linalg::identity(4), &[0, 0]).is_err());
        assert!(psi.apply_unitary(&linalg::identity(2), &[2]).is_err());
    }

    #[test]
    fn density_unitary_matches_explicit_product() {
        let rho = haar_random_unitary(8, &RngStream::new(5)).map(|u| {
            let psi = StateVector::new(3, u.column(0).into_owned()).unwrap();
            psi.to_density()
        });
        let rho = rho.unwrap();
        let g = haar_random_unitary(4, &RngStream::new(6)).unwrap();
        let fast = rho.apply_unitary(&g, &[2, 0]).unwrap();
        let big = embed_operator(&g, 3, &[2, 0]);
        let slow = &big * rho.matrix() * big.adjoint();
        assert!(max_abs_diff(fast.matrix(), &slow) < 1e-10);
    }

    #[test]
    fn channel_examples() {
        let rho = DensityMatrix::zero(1);
        let id = KrausChannel::identity(1);
        assert_eq!(rho.apply_channel(&id, &[0]).unwrap().matrix(), rho.matrix());

        let full = KrausChannel::depolarizing(1.0).unwrap();
        let mixed = rho.apply_channel(&full, &[0]).unwrap();
        assert!(max_abs_diff(mixed.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-15);

        let p = plus().to_density();
        let out = p.apply_channel(&KrausChannel::depolarizing(0.1).unwrap(), &[0]).unwrap();
        let expect = plus().to_density().matrix() * C64::new(0.95, 0.0)
            + minus().to_density().matrix() * C64::new(0.05, 0.0);
        assert!(max_abs_diff(out.matrix(), &expect) < 1e-14);
    }

    #[test]
    fn fidelity_examples() {
        let psi = plus();
        assert!((psi.to_density().fidelity_pure(&psi).unwrap() - 1.0).abs() < 1e-14);
        let mm = DensityMatrix::maximally_mixed(2);
        assert!((mm.fidelity_pure(&StateVector::zero(2)).unwrap() - 0.25).abs() < 1e-15);
        let rho = DensityMatrix::diagonal(1, &[0.7, 0.3]).unwrap();
        assert!((rho.fidelity_pure(&psi).unwrap() - 0.5).abs() < 1e-14);
        assert!(rho.fidelity_pure(&StateVector::zero(2)).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::zero(1);
        assert!(trace_distance(&a, &a).unwrap().abs() < 1e-15);
        for n in 1..=3 {
            let d = trace_distance(&DensityMatrix::zero(n), &DensityMatrix::maximally_mixed(n)).unwrap();
            assert!((d - (1.0 - 1.0 / dim_of(n) as f64)).abs() < 1e-12);
        }
        let d = trace_distance(&a, &plus().to_density()).unwrap();
        assert!((d - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(trace_distance(&a, &DensityMatrix::zero(2)).is_err());
    }

    #[test]
    fn spectral_functions() {
        let pure = plus().to_density();
        for l in 1..5 {
            assert!((trace_power_exact(&pure, l).unwrap() - 1.0).abs() < 1e-12);
        }
        let mm = DensityMatrix::maximally_mixed(2);
        assert!((trace_power_exact(&mm, 3).unwrap() - 2f64.powi(-4)).abs() < 1e-14);
        let d = DensityMatrix::diagonal(1, &[0.25, 0.75]).unwrap();
        assert!((trace_power_exact(&d, 3).unwrap() - 0.4375).abs() < 1e-14);
        assert!(trace_power_exact(&d, 0).is_err());

        assert!(von_neumann_entropy_exact(&pure).abs() < 1e-12);
        assert!((von_neumann_entropy_exact(&mm) - 2.0 * 2f64.ln()).abs() < 1e-12);
        let s = -0.25 * 0.25f64.ln() - 0.75 * 0.75f64.ln();
        assert!((von_neumann_entropy_exact(&d) - s).abs() < 1e-12);
        assert!((s - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn partial_trace_examples() {
        let prod = StateVector::zero(1).to_density().tensor(&plus().to_density());
        let kept = prod.partial_trace(&[1]).unwrap();
        assert!(max_abs_diff(kept.matrix(), plus().to_density().matrix()) < 1e-14);

        let s = 1.0 / 2f64.sqrt();
        let mut amps = CVector::zeros(4);
        amps[0] = C64::new(s, 0.0);
        amps[3] = C64::new(s, 0.0);
        let bell = StateVector::new(2, amps).unwrap().to_density();
        let red = bell.partial_trace(&[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), DensityMatrix::maximally_mixed(1).matrix()) < 1e-14);

        let mix = DensityMatrix::diagonal(2, &[0.6, 0.0, 0.0, 0.4]).unwrap();
        let red = mix.partial_trace(&[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), DensityMatrix::diagonal(1, &[0.6, 0.4]).unwrap().matrix()) < 1e-15);
        assert!(mix.partial_trace(&[2]).is_err());
    }

    #[test]
    fn constructor_validation() {
        let bad = CMatrix::from_row_slice(2, 2, &[C64::new(0.5, 0.0), ZERO, ZERO, C64::new(0.6, 0.0)]);
        assert!(DensityMatrix::new(1, bad).is_err());
        let neg = CMatrix::from_row_slice(2, 2, &[C64::new(1.5, 0.0), ZERO, ZERO, C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(1, neg).is_err());
        assert!(StateVector::new(1, CVector::zeros(2)).is_err());
        assert!(StateVector::new(2, CVector::zeros(2)).is_err());
    }
}
