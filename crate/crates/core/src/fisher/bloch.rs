//! Single-qubit QFI from the Bloch vector.

// f64 math without std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use super::{QfiForm, QfiValue, StateFamily, DEFAULT_STEP};
use crate::channels::{ModelParams, Param};
use crate::error::{Error, Result};
use crate::linalg::{sigma_x, sigma_y, sigma_z, Matrix2};

/// States with `|s|` at or above `1 - PURE_THRESHOLD` use the pure branch.
pub const PURE_THRESHOLD: f64 = 1e-9;

/// Denominators below this make the closed single-qubit forms singular.
const DENOMINATOR_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub s: [f64; 3],
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.s.iter().zip(&other.s).map(|(a, b)| a * b).sum()
    }

    /// `(I + s . sigma) / 2`.
    pub fn density_matrix(&self) -> Matrix2 {
        let [x, y, z] = self.s;
        (Matrix2::identity() + sigma_x().scale(x) + sigma_y().scale(y) + sigma_z().scale(z))
            .scale(0.5)
    }
}

/// `s_i = Tr(rho sigma_i)`.
pub fn bloch_vector(rho: &Matrix2) -> BlochVector {
    let component = |sigma: Matrix2| (*rho * sigma).trace().re;
    BlochVector {
        s: [
            component(sigma_x()),
            component(sigma_y()),
            component(sigma_z()),
        ],
    }
}

/// QFI of a single-qubit family from central differences of its Bloch
/// vector.
pub fn qfi_single_bloch<F: StateFamily<2>>(family: &F, theta: f64, h: f64) -> Result<QfiValue> {
    if !(h > 0.0) || !theta.is_finite() {
        return Err(Error::NonFinite);
    }
    let s = bloch_vector(&family.eval(theta)?);
    let plus = bloch_vector(&family.eval(theta + h)?);
    let minus = bloch_vector(&family.eval(theta - h)?);
    let ds = BlochVector {
        s: core::array::from_fn(|i| (plus.s[i] - minus.s[i]) / (2.0 * h)),
    };
    let norm = s.norm();
    let raw = if norm >= 1.0 - PURE_THRESHOLD {
        ds.dot(&ds)
    } else {
        s.dot(&ds).powi(2) / (1.0 - norm * norm) + ds.dot(&ds)
    };
    Ok(QfiValue::new(raw, QfiForm::SingleBloch, None))
}

/// [`qfi_single_bloch`] with the default step.
pub fn qfi_single<F: StateFamily<2>>(family: &F, theta: f64) -> Result<QfiValue> {
    qfi_single_bloch(family, theta, DEFAULT_STEP)
}

/// Closed single-qubit QFI of the accelerated qubit under white noise, for
/// `param` in `{p, x, r}`.
pub fn qfi_single_white_closed(param: Param, x: f64, p: f64, r: f64) -> Result<QfiValue> {
    let params = ModelParams::white(x, p, r)?;
    qfi_single_closed(&params, param)
}

/// As [`qfi_single_white_closed`], without range checks on `params` beyond
/// the channel, so callers can evaluate on an extended `r` range.
pub fn qfi_single_closed(params: &ModelParams, param: Param) -> Result<QfiValue> {
    if params.channel != crate::channels::Channel::White {
        return Err(Error::Unsupported(
            "closed single-qubit QFI exists for white noise only",
        ));
    }
    let (x, p, r) = (params.x, params.p, params.r);
    let a = 1.0 - 2.0 * x * x;
    let u = 1.0 - a * p;
    let (c2, s2) = (r.cos().powi(2), r.sin().powi(2));
    let tail = 3.0 + a * p - u * (2.0 * r).cos();
    let d = u * tail;
    let denominator = if param == Param::R { tail } else { d };
    if param == Param::Q {
        return Err(Error::Unsupported("white noise has no q parameter"));
    }
    if denominator < DENOMINATOR_TOL {
        return Err(Error::SingularPoint("reduced state is pure"));
    }
    let norm = (u * c2 - 1.0).abs();
    let raw = if norm >= 1.0 - PURE_THRESHOLD {
        match param {
            Param::P => a * a * c2 * c2,
            Param::X => 16.0 * p * p * x * x * c2 * c2,
            _ => u * u * (2.0 * r).sin().powi(2),
        }
    } else {
        match param {
            Param::P => 2.0 * a * a * c2 / d,
            Param::X => 32.0 * p * p * x * x * c2 / d,
            _ => 8.0 * u * s2 / tail,
        }
    };
    Ok(QfiValue::new(raw, QfiForm::ClosedForm, None))
}
