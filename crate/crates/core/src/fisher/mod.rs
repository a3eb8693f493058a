//! Quantum Fisher information of the accelerated states.
//!
//! Two numerical engines work on any [`StateFamily`]: the Bloch-vector form
//! for a single qubit and the spectral form for two qubits. Both use central
//! differences. The closed-form white-noise expressions live alongside and
//! are checked against the engines.

mod bloch;
mod closed;
mod spectral;

pub use bloch::{
    bloch_vector, qfi_single, qfi_single_bloch, qfi_single_closed, qfi_single_white_closed,
    BlochVector, PURE_THRESHOLD,
};
pub use closed::{
    kappa_mu_derivatives, kappa_mu_terms, qfi_two_closed, qfi_two_white_closed, KappaMuTerms,
};
pub use spectral::{qfi_two_qubit, qfi_two_qubit_spectral, EIGEN_DROP};

use crate::channels::{accelerated_state_unchecked, Channel, ModelParams, Param};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, Matrix, Matrix2, Subsystem};
use crate::DensityMatrix4;

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Grid points closer than this to a singular locus are skipped.
pub const SINGULAR_MARGIN: f64 = 1e-6;

/// Which expression produced a [`QfiValue`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QfiForm {
    SingleBloch,
    TwoQubitSpectral,
    ClosedForm,
}

/// The three blocks of the spectral QFI: eigenvalue (classical) part,
/// eigenvector part, and the pair-mixing part that is subtracted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaTerms {
    pub classical: f64,
    pub quantum: f64,
    pub pair: f64,
}

impl DeltaTerms {
    pub fn total(&self) -> f64 {
        self.classical + self.quantum - self.pair
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QfiValue {
    pub value: f64,
    pub form: QfiForm,
    pub decomposition: Option<DeltaTerms>,
}

impl QfiValue {
    fn new(raw: f64, form: QfiForm, decomposition: Option<DeltaTerms>) -> Self {
        // rounding can push a vanishing QFI just below zero
        let value = if (-1e-10..0.0).contains(&raw) {
            0.0
        } else {
            raw
        };
        Self {
            value,
            form,
            decomposition,
        }
    }
}

/// A one-parameter family of `N x N` density matrices.
///
/// Evaluation must be pure; engines call it at `theta` and `theta +- h`.
pub trait StateFamily<const N: usize> {
    fn param(&self) -> Param;
    fn eval(&self, theta: f64) -> Result<Matrix<N>>;
}

/// A family given by a closure.
pub struct FnFamily<F> {
    param: Param,
    f: F,
}

impl<F> FnFamily<F> {
    pub fn new(param: Param, f: F) -> Self {
        Self { param, f }
    }
}

impl<const N: usize, F> StateFamily<N> for FnFamily<F>
where
    F: Fn(f64) -> Matrix<N>,
{
    fn param(&self) -> Param {
        self.param
    }

    fn eval(&self, theta: f64) -> Result<Matrix<N>> {
        finite((self.f)(theta), theta)
    }
}

fn finite<const N: usize>(m: Matrix<N>, theta: f64) -> Result<Matrix<N>> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::FamilyEval { theta })
    }
}

/// The accelerated state viewed as a function of one of its parameters.
///
/// As a `StateFamily<4>` it yields the full two-qubit state; as a
/// `StateFamily<2>` it yields the reduced state of the accelerated qubit.
/// Stencil points may step slightly outside the physical domain.
#[derive(Clone, Copy, Debug)]
pub struct AcceleratedFamily {
    base: ModelParams,
    param: Param,
}

impl AcceleratedFamily {
    pub fn new(base: ModelParams, param: Param) -> Result<Self> {
        base.validate()?;
        Ok(Self::trusted(base, param))
    }

    /// Skips validation of `base`, for callers that validated it under a
    /// different range.
    pub fn trusted(base: ModelParams, param: Param) -> Self {
        Self { base, param }
    }

    pub fn base(&self) -> &ModelParams {
        &self.base
    }

    pub fn theta(&self) -> f64 {
        self.base.get(self.param)
    }

    fn at(&self, theta: f64) -> ModelParams {
        self.base.with(self.param, theta)
    }
}

impl StateFamily<4> for AcceleratedFamily {
    fn param(&self) -> Param {
        self.param
    }

    fn eval(&self, theta: f64) -> Result<DensityMatrix4> {
        finite(accelerated_state_unchecked(&self.at(theta)), theta)
    }
}

impl StateFamily<2> for AcceleratedFamily {
    fn param(&self) -> Param {
        self.param
    }

    fn eval(&self, theta: f64) -> Result<Matrix2> {
        let full = accelerated_state_unchecked(&self.at(theta));
        finite(partial_trace(&full, Subsystem::Second), theta)
    }
}

/// Reduced state of the accelerated (second) qubit.
pub fn reduced_accelerated_qubit(params: &ModelParams) -> Result<Matrix2> {
    params.validate()?;
    Ok(partial_trace(
        &accelerated_state_unchecked(params),
        Subsystem::Second,
    ))
}

/// Whether the Fisher information is taken from the accelerated qubit alone
/// or from the full two-qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitForm {
    Single,
    Two,
}

/// Why `(params, param)` is a singular point of the QFI for the given form,
/// or `None` if it is regular. Singular points are reported as gaps.
///
/// * the amplitude `sqrt(1 - x^2)` is not differentiable at `x = 1`;
/// * the single-qubit form has a branch switch where the reduced state is
///   pure;
/// * the two-qubit state loses rank with a parameter-dependent eigenvalue
///   once the total noise weight reaches one.
pub fn singular_reason(
    params: &ModelParams,
    param: Param,
    form: QubitForm,
) -> Option<&'static str> {
    let m = SINGULAR_MARGIN;
    if param == Param::X && params.x >= 1.0 - m {
        return Some("x = 1: amplitude not differentiable");
    }
    match form {
        QubitForm::Single => {
            let reduced = partial_trace(&accelerated_state_unchecked(params), Subsystem::Second);
            let s = bloch_vector(&reduced);
            if s.norm() >= 1.0 - m {
                return Some("reduced state is pure");
            }
        }
        QubitForm::Two => {
            let weight = match params.channel {
                Channel::White => params.p,
                Channel::Color => params.q,
                Channel::WhiteColor => params.p + params.q,
            };
            if weight >= 1.0 - m {
                return Some("state is rank deficient");
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn reduced_qubit_examples() {
        let r = reduced_accelerated_qubit(&ModelParams::white(0.3, 0.0, 0.0).unwrap()).unwrap();
        assert!(r.approx_eq(&Matrix2::identity().scale(0.5), 1e-15));

        let (x, p, r) = (0.35, 0.6, 0.45_f64);
        let a = 1.0 - 2.0 * x * x;
        let top = (1.0 - a * p) * r.cos().powi(2) / 2.0;
        let red = reduced_accelerated_qubit(&ModelParams::white(x, p, r).unwrap()).unwrap();
        assert!(red.approx_eq(&Matrix2::diag([top, 1.0 - top]), 1e-15));

        let c = reduced_accelerated_qubit(&ModelParams::color(FRAC_1_SQRT_2, 1.0, 0.0).unwrap())
            .unwrap();
        assert!(c.approx_eq(&Matrix2::identity().scale(0.5), 1e-15));
    }

    #[test]
    fn singular_points() {
        let pure = ModelParams::white(0.0, 1.0, 0.3).unwrap();
        assert!(singular_reason(&pure, Param::P, QubitForm::Single).is_some());
        assert!(singular_reason(&pure, Param::P, QubitForm::Two).is_some());
        let regular = ModelParams::white(0.3, 0.5, 0.3).unwrap();
        for param in [Param::P, Param::X, Param::R] {
            assert!(singular_reason(&regular, param, QubitForm::Single).is_none());
            assert!(singular_reason(&regular, param, QubitForm::Two).is_none());
        }
        let edge = ModelParams::color(1.0, 0.5, 0.3).unwrap();
        assert!(singular_reason(&edge, Param::X, QubitForm::Two).is_some());
        assert!(singular_reason(&edge, Param::Q, QubitForm::Two).is_none());
    }
}
