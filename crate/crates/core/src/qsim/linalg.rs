//! Dense complex kernels shared by states, channels and estimators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigenvalues below this magnitude of negativity are treated as rounding and clamped to 0.
pub const PSD_FLOOR: f64 = 1e-9;

pub fn dim_of(n: usize) -> usize {
    1usize << n
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// `max |U†U - I|` entrywise.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &identity(u.nrows()))
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Real spectrum of a Hermitian matrix (ascending).
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Eigen-decomposition `(values, vectors)` of a Hermitian matrix; columns of `vectors` are eigenvectors.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Clamp tiny negative eigenvalues produced by rounding. Returns the clamped values and
/// the largest clamped magnitude.
pub fn clamp_spectrum(values: &[f64]) -> (Vec<f64>, f64) {
    let mut clamped = 0.0f64;
    let out = values
        .iter()
        .map(|&v| {
            if v < 0.0 {
                clamped = clamped.max(-v);
                0.0
            } else {
                v
            }
        })
        .collect();
    (out, clamped)
}

/// Apply `f` to the spectrum of a Hermitian matrix: `V f(Λ) V†`.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&x| C64::new(f(x), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// `exp(-i H)` for Hermitian `H`.
pub fn expm_neg_i_hermitian(h: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh(h);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        vals.len(),
        vals.iter().map(|&x| C64::from_polar(1.0, -x)),
    ));
    &vecs * d * vecs.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Validates a target list against `n` qubits and a gate of dimension `gate_dim`.
pub fn check_targets(n: usize, targets: &[usize], gate_dim: usize) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidQubit("empty target list".into()));
    }
    if gate_dim != dim_of(targets.len()) {
        return Err(Error::DimensionMismatch(format!(
            "operator of dimension {gate_dim} on {} targets",
            targets.len()
        )));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::InvalidQubit(format!("target {t} on {n} qubits")));
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidQubit(format!("duplicate target {t}")));
        }
    }
    Ok(())
}

/// Offsets of the local basis states of `targets` inside an `n`-qubit index.
/// Qubit 0 is the most significant bit; `targets[0]` is the most significant local bit.
fn local_offsets(n: usize, targets: &[usize]) -> (Vec<usize>, usize) {
    let k = targets.len();
    let mut offsets = vec![0usize; 1 << k];
    for (m, off) in offsets.iter_mut().enumerate() {
        for (j, &t) in targets.iter().enumerate() {
            if (m >> (k - 1 - j)) & 1 == 1 {
                *off |= 1 << (n - 1 - t);
            }
        }
    }
    let mask = targets.iter().fold(0usize, |m, &t| m | (1 << (n - 1 - t)));
    (offsets, mask)
}

/// In-place `v <- (op ⊗ I) v` with `op` acting on `targets`. `stride`/`len` address a strided
/// slice of a column-major buffer so the same kernel serves vectors, columns and rows.
fn apply_local(buf: &mut [C64], start: usize, stride: usize, n: usize, op: &CMatrix, targets: &[usize]) {
    let (offsets, mask) = local_offsets(n, targets);
    let k = offsets.len();
    let mut gathered = vec![ZERO; k];
    for base in 0..dim_of(n) {
        if base & mask != 0 {
            continue;
        }
        for (m, &off) in offsets.iter().enumerate() {
            gathered[m] = buf[start + (base | off) * stride];
        }
        for (r, &off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for c in 0..k {
                acc += op[(r, c)] * gathered[c];
            }
            buf[start + (base | off) * stride] = acc;
        }
    }
}

/// `(op ⊗ I) v` for a state vector.
pub fn apply_to_vector(v: &CVector, n: usize, op: &CMatrix, targets: &[usize]) -> CVector {
    let mut out = v.clone();
    apply_local(out.as_mut_slice(), 0, 1, n, op, targets);
    out
}

/// `A ρ B†` where `A = a ⊗ I` and `B = b ⊗ I` act on `targets`.
pub fn sandwich(rho: &CMatrix, n: usize, a: &CMatrix, b: &CMatrix, targets: &[usize]) -> CMatrix {
    let d = dim_of(n);
    let mut out = rho.clone();
    // left action on every column (column-major: column c is contiguous)
    for c in 0..d {
        apply_local(out.as_mut_slice(), c * d, 1, n, a, targets);
    }
    // right action: (X B†)[r, c] = Σ_c' X[r, c'] conj(B[c, c']), i.e. conj(B) on each row
    let b_conj = b.map(|z| z.conj());
    for r in 0..d {
        apply_local(out.as_mut_slice(), r, d, n, &b_conj, targets);
    }
    out
}

/// Full `2^n × 2^n` matrix of `op` acting on `targets` (identity elsewhere), built by explicit
/// index arithmetic. Used as an independent route to cross-check the strided kernels.
pub fn embed_operator(op: &CMatrix, n: usize, targets: &[usize]) -> CMatrix {
    let d = dim_of(n);
    let k = targets.len();
    let mask = targets.iter().fold(0usize, |m, &t| m | (1 << (n - 1 - t)));
    let local = |idx: usize| -> usize {
        targets
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &t)| acc | (((idx >> (n - 1 - t)) & 1) << (k - 1 - j)))
    };
    CMatrix::from_fn(d, d, |r, c| {
        if r & !mask != c & !mask {
            ZERO
        } else {
            op[(local(r), local(c))]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_matches_kron_for_leading_target() {
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let full = embed_operator(&x, 2, &[0]);
        assert!(max_abs_diff(&full, &kron(&x, &identity(2))) < 1e-15);
        let full1 = embed_operator(&x, 2, &[1]);
        assert!(max_abs_diff(&full1, &kron(&identity(2), &x)) < 1e-15);
    }

    #[test]
    fn clamp_reports_magnitude() {
        let (v, c) = clamp_spectrum(&[-1e-12, 0.5, 0.5]);
        assert_eq!(v, vec![0.0, 0.5, 0.5]);
        assert_eq!(c, 1e-12);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = CMatrix::zeros(4, 4);
        assert!(max_abs_diff(&expm_neg_i_hermitian(&z), &identity(4)) < 1e-15);
    }
}
