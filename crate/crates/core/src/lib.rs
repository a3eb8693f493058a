//! Noisy two-qubit states with one uniformly accelerated qubit: white and
//! color noise preparation, the single-mode Unruh channel, Wootters
//! concurrence, and quantum Fisher information in Bloch-vector and spectral
//! forms, each paired with its closed-form evaluator.
//!
//! The crate is `no_std` and allocation-free; all matrices are fixed-size.

#![no_std]

#[cfg(test)]
extern crate std;

pub mod autodiff;
pub mod channels;
pub mod entanglement;
pub mod error;
pub mod fisher;
pub mod linalg;

pub use channels::{Channel, ModelParams, Param};
pub use entanglement::Concurrence;
pub use error::{Error, Result};
pub use fisher::{QfiForm, QfiValue, QubitForm};
pub use linalg::{Matrix2, Matrix4};

/// Every two-qubit state here is a 4x4 Hermitian, unit-trace, positive
/// semidefinite matrix in the basis `|00>, |01>, |10>, |11>`.
pub type DensityMatrix4 = Matrix4;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::linalg::{Matrix, Matrix2, Matrix4};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn square4() -> impl Strategy<Value = Matrix4> {
        proptest::collection::vec(-1.0..1.0_f64, 32).prop_map(|v| {
            let mut m = Matrix4::zeros();
            for i in 0..4 {
                for j in 0..4 {
                    m[(i, j)] = Complex64::new(v[8 * i + 2 * j], v[8 * i + 2 * j + 1]);
                }
            }
            m
        })
    }

    pub fn hermitian4() -> impl Strategy<Value = Matrix4> {
        square4().prop_map(|g| (g + g.adjoint()).scale(0.5))
    }

    pub fn psd4() -> impl Strategy<Value = Matrix4> {
        square4().prop_map(|g| g * g.adjoint())
    }

    pub fn density4() -> impl Strategy<Value = Matrix4> {
        psd4()
            .prop_filter("nonzero", |p| p.trace().re > 1e-6)
            .prop_map(|p| p.scale(1.0 / p.trace().re))
    }

    pub fn unitary2() -> impl Strategy<Value = Matrix2> {
        (0.0..6.3_f64, 0.0..6.3_f64, 0.0..6.3_f64, 0.0..1.6_f64).prop_map(|(a, b, g, t)| {
            let e = |phi: f64| Complex64::from_polar(1.0, phi);
            Matrix::from_rows([
                [e(a + b) * t.cos(), e(a + g) * t.sin()],
                [-e(a - g) * t.sin(), e(a - b) * t.cos()],
            ])
        })
    }
}
