//! Dense state-vector and density-matrix simulation.
//!
//! Every other module validates against these routines, so they favour plain
//! dense arithmetic over cleverness. States are capped at a few qubits.

pub mod channel;
pub mod haar;
pub mod io;
pub mod linalg;
pub mod pauli;
pub mod state;

pub use channel::KrausChannel;
pub use haar::{haar_random_unitary, haar_random_unitary_with};
pub use linalg::{CMatrix, CVector, C64};
pub use pauli::{Pauli, PauliString};
pub use state::{
    fidelity_pure, partial_trace, purity, trace_distance, trace_norm, trace_power_exact, von_neumann_entropy_exact,
    DensityMatrix, StateVector,
};

/// Default cap on qubits for a single simulated state.
pub const DEFAULT_MAX_QUBITS: usize = 6;
/// Default cap on the total dimension of materialized multi-copy registers.
pub const DEFAULT_MAX_TOTAL_DIM: usize = 1 << 12;
/// Environment variable overriding [`DEFAULT_MAX_TOTAL_DIM`].
pub const DIM_CAP_ENV: &str = "QLSC_MAX_DIM";

/// Effective multi-copy dimension cap, honouring [`DIM_CAP_ENV`].
pub fn max_total_dim() -> usize {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_TOTAL_DIM)
}

#[cfg(test)]
mod props {
    use super::linalg::{hermiticity_deviation, max_abs_diff, CMatrix, C64};
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    fn random_density(n: usize, seed: u64) -> DensityMatrix {
        // mixture of a few Haar pure states with Dirichlet-ish weights
        let d = 1 << n;
        let stream = RngStream::new(seed);
        let u = haar_random_unitary(d, &stream).unwrap();
        let mut w: Vec<f64> = (0..d).map(|i| ((seed >> (i % 60)) & 0xff) as f64 + 1.0).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let mut m = CMatrix::zeros(d, d);
        for (i, wi) in w.iter().enumerate() {
            let col = u.column(i);
            m += col * col.adjoint() * C64::new(*wi, 0.0);
        }
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        DensityMatrix::new(n, m).unwrap()
    }

    fn random_channel(seed: u64) -> KrausChannel {
        // Stinespring: isometry from a Haar unitary on system ⊗ environment(2 qubits)
        let u = haar_random_unitary(8, &RngStream::new(seed)).unwrap();
        let ops = (0..4)
            .map(|e| CMatrix::from_fn(2, 2, |r, c| u[(e * 2 + r, c)]))
            .collect();
        KrausChannel::new(1, ops).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn channels_preserve_trace_and_hermiticity(seed in any::<u64>(), q in 0usize..2) {
            let rho = random_density(2, seed);
            let out = rho.apply_channel(&random_channel(seed ^ 0xabc), &[q]).unwrap();
            prop_assert!((out.trace().re - 1.0).abs() < 1e-9);
            prop_assert!(hermiticity_deviation(out.matrix()) < 1e-10);
        }

        #[test]
        fn trace_distance_is_a_metric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let (x, y, z) = (random_density(2, a), random_density(2, b), random_density(2, c));
            let dxy = trace_distance(&x, &y).unwrap();
            prop_assert!((dxy - trace_distance(&y, &x).unwrap()).abs() < 1e-12);
            let dxz = trace_distance(&x, &z).unwrap();
            let dzy = trace_distance(&z, &y).unwrap();
            prop_assert!(dxy <= dxz + dzy + 1e-9);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&dxy));
        }

        #[test]
        fn purity_matches_second_power(seed in any::<u64>()) {
            let rho = random_density(2, seed);
            prop_assert!((trace_power_exact(&rho, 2).unwrap() - purity(&rho)).abs() < 1e-10);
        }

        #[test]
        fn strided_conjugation_matches_explicit(seed in any::<u64>()) {
            let rho = random_density(3, seed);
            let g = haar_random_unitary(4, &RngStream::new(seed).split(1)).unwrap();
            let fast = rho.apply_unitary(&g, &[1, 2]).unwrap();
            let big = linalg::embed_operator(&g, 3, &[1, 2]);
            prop_assert!(max_abs_diff(fast.matrix(), &(&big * rho.matrix() * big.adjoint())) < 1e-10);
        }
    }
}
