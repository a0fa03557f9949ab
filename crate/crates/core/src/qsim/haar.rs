use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{CMatrix, C64};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Haar-distributed unitary of dimension `dim` drawn from `stream`.
pub fn haar_random_unitary(dim: usize, stream: &RngStream) -> Result<CMatrix> {
    haar_random_unitary_with(dim, &mut stream.rng())
}

/// QR of a complex Ginibre matrix with the column phases fixed by `diag(R)`.
pub fn haar_random_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("Haar dimension {dim} < 2")));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::linalg::unitarity_deviation;

    #[test]
    fn output_is_unitary() {
        for dim in [2, 4, 8] {
            let u = haar_random_unitary(dim, &RngStream::new(dim as u64)).unwrap();
            assert!(unitarity_deviation(&u) < 1e-9);
        }
        assert!(haar_random_unitary(1, &RngStream::new(0)).is_err());
    }

    #[test]
    fn first_and_second_moments() {
        let mut rng = RngStream::new(11).rng();
        let draws = 10_000;
        let (mut s1, mut s1sq, mut s2, mut s2sq) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..draws {
            let u = haar_random_unitary_with(2, &mut rng).unwrap();
            let a = u[(0, 0)].norm_sqr();
            let t = u.trace().norm_sqr();
            s1 += a;
            s1sq += a * a;
            s2 += t;
            s2sq += t * t;
        }
        let m = draws as f64;
        let (mean_a, mean_t) = (s1 / m, s2 / m);
        let se_a = ((s1sq / m - mean_a * mean_a) / m).sqrt();
        let se_t = ((s2sq / m - mean_t * mean_t) / m).sqrt();
        assert!((mean_a - 0.5).abs() < 3.0 * se_a, "E|U00|² = {mean_a} ± {se_a}");
        assert!((mean_t - 1.0).abs() < 3.0 * se_t, "E|TrU|² = {mean_t} ± {se_t}");
    }
}
