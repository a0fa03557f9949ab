use super::linalg::{dim_of, identity, max_abs_diff, CMatrix, C64};
use super::pauli::{Pauli, PauliString};
use crate::error::{Error, Result};

/// Tolerance on `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Completely positive map given by Kraus operators on `n_targets` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    n_targets: usize,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Builds and validates a trace-preserving Kraus set.
    pub fn new(n_targets: usize, ops: Vec<CMatrix>) -> Result<Self> {
        let ch = Self { n_targets, ops };
        ch.check_shapes()?;
        ch.check_complete()?;
        Ok(ch)
    }

    fn check_shapes(&self) -> Result<()> {
        let d = dim_of(self.n_targets);
        if self.ops.is_empty() {
            return Err(Error::IncompleteKraus { deviation: 1.0 });
        }
        for k in &self.ops {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {}x{} on {} qubits",
                    k.nrows(),
                    k.ncols(),
                    self.n_targets
                )));
            }
        }
        Ok(())
    }

    pub fn completeness_deviation(&self) -> f64 {
        let d = dim_of(self.n_targets);
        let sum = self
            .ops
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        max_abs_diff(&sum, &identity(d))
    }

    pub fn check_complete(&self) -> Result<()> {
        let deviation = self.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteKraus { deviation });
        }
        Ok(())
    }

    pub fn n_targets(&self) -> usize {
        self.n_targets
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn identity(n_targets: usize) -> Self {
        Self {
            n_targets,
            ops: vec![identity(dim_of(n_targets))],
        }
    }

    /// Single-qubit `ρ ↦ (1-γ)ρ + γ I/2`.
    pub fn depolarizing(gamma: f64) -> Result<Self> {
        check_strength(gamma)?;
        let a = (1.0 - 0.75 * gamma).sqrt();
        let b = (gamma / 4.0).sqrt();
        Ok(Self {
            n_targets: 1,
            ops: vec![
                Pauli::I.matrix() * C64::new(a, 0.0),
                Pauli::X.matrix() * C64::new(b, 0.0),
                Pauli::Y.matrix() * C64::new(b, 0.0),
                Pauli::Z.matrix() * C64::new(b, 0.0),
            ],
        })
    }

    /// `n`-qubit `ρ ↦ (1-p)ρ + p I/d`, expanded over all Pauli strings.
    pub fn global_depolarizing(n: usize, p: f64) -> Result<Self> {
        check_strength(p)?;
        let d2 = (dim_of(n) * dim_of(n)) as f64;
        let ops = PauliString::all(n)
            .into_iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let w = if i == 0 { 1.0 - p + p / d2 } else { p / d2 };
                (w > 0.0).then(|| s.matrix() * C64::new(w.sqrt(), 0.0))
            })
            .collect();
        Ok(Self { n_targets: n, ops })
    }

    /// Single-qubit `ρ ↦ (1-p)ρ + p XρX`.
    pub fn bit_flip(p: f64) -> Result<Self> {
        check_strength(p)?;
        Ok(Self {
            n_targets: 1,
            ops: vec![
                Pauli::I.matrix() * C64::new((1.0 - p).sqrt(), 0.0),
                Pauli::X.matrix() * C64::new(p.sqrt(), 0.0),
            ],
        })
    }

    /// `Σ_l |Tr K_l|²` of this Kraus set.
    pub fn f_metric(&self) -> f64 {
        self.ops.iter().map(|k| k.trace().norm_sqr()).sum()
    }

    /// Kraus set of the tensor product `self ⊗ other` (all pairwise products).
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let ops = self
            .ops
            .iter()
            .flat_map(|a| other.ops.iter().map(move |b| a.kronecker(b)))
            .collect();
        KrausChannel {
            n_targets: self.n_targets + other.n_targets,
            ops,
        }
    }
}

fn check_strength(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("noise strength {p} outside [0,1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_channels_are_complete() {
        for g in [0.0, 0.1, 0.5, 1.0] {
            KrausChannel::depolarizing(g).unwrap().check_complete().unwrap();
            KrausChannel::bit_flip(g).unwrap().check_complete().unwrap();
            KrausChannel::global_depolarizing(2, g).unwrap().check_complete().unwrap();
        }
        assert!(KrausChannel::depolarizing(1.5).is_err());
    }

    #[test]
    fn incomplete_set_is_rejected() {
        let half = identity(2) * C64::new(0.5, 0.0);
        assert!(matches!(KrausChannel::new(1, vec![half]), Err(Error::IncompleteKraus { .. })));
    }
}
