//! Wootters concurrence of two-qubit states, and the closed-form
//! concurrences of the accelerated white, color and white-color states.
//!
//! The general engine is the reference; the closed forms are evaluated as
//! independent expressions and checked against it.

use core::f64::consts::SQRT_2;

// f64 math without std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::channels::{Channel, ModelParams};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, kron2, sigma_y, sqrt_psd, Matrix4, NOISE_FLOOR};
use crate::DensityMatrix4;

/// Coefficient of the `sqrt(w4)` term in the white-noise closed form. The
/// value 1/2 is the one consistent with the Werner line.
pub const WHITE_TAIL_COEFFICIENT: f64 = 0.5;

/// Largest negative radicand treated as rounding noise.
pub const RADICAND_TOL: f64 = 1e-10;

/// A concurrence value in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Concurrence(f64);

impl Concurrence {
    pub fn new(value: f64) -> Self {
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `(sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y)`
pub fn spin_flip(rho: &DensityMatrix4) -> Matrix4 {
    let yy = kron2(&sigma_y(), &sigma_y());
    yy * rho.conj() * yy
}

/// Square roots of the eigenvalues of `rho * spin_flip(rho)`, descending.
///
/// They are taken from the Hermitian `sqrt(rho) rho~ sqrt(rho)`, which is
/// similar to `rho rho~`, so no non-Hermitian eigensolver is needed.
pub fn wootters_roots(rho: &DensityMatrix4) -> Result<[f64; 4]> {
    let s = sqrt_psd(rho)?;
    let r = s * spin_flip(rho) * s;
    let eig = eig_hermitian(&r)?;
    let floor = NOISE_FLOOR * eig.max_abs_eigenvalue();
    Ok(eig
        .eigenvalues
        .map(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// `C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`.
pub fn concurrence(rho: &DensityMatrix4) -> Result<Concurrence> {
    let [a, b, c, d] = wootters_roots(rho)?;
    let c = a - b - c - d;
    // equal roots cancel only up to rounding
    Ok(Concurrence::new(if c <= NOISE_FLOOR * a { 0.0 } else { c }))
}

/// Square root that absorbs rounding noise. `scale` bounds the magnitude of
/// the terms that cancelled to produce `value`.
fn surd(term: &'static str, value: f64, scale: f64) -> Result<f64> {
    if value < -RADICAND_TOL {
        return Err(Error::NegativeRadicand { term, value });
    }
    if value <= NOISE_FLOOR * scale {
        Ok(0.0)
    } else {
        Ok(value.sqrt())
    }
}

/// White-noise closed form with a caller-chosen coefficient on the final
/// `sqrt(w4)` term. No domain checks.
pub fn white_closed_with_tail(x: f64, p: f64, r: f64, tail: f64) -> Result<f64> {
    let (cr, x2) = (r.cos(), x * x);
    let w1 = (5.0 + 6.0 * p - 11.0 * p * p + 4.0 * p * (1.0 + 31.0 * p) * x2
        - 128.0 * p * p * x2 * x2)
        * cr;
    let inner = (1.0 - x2)
        * (1.0 - p + 4.0 * p * x2)
        * (3.0 + 5.0 * p - 8.0 * p * x2 - (1.0 - p) * (2.0 * r).cos());
    let w2 = 16.0 * SQRT_2 * p * x * cr * surd("w2", inner, 0.0)?;
    let w3 = (p - 1.0) * (1.0 - p + 4.0 * p * x2) * (3.0 * r).cos();
    let w4 = cr * cr * (1.0 - p) * (1.0 - p + (1.0 + p * (4.0 * x2 - 1.0)) * r.sin().powi(2));

    let scale = cr.abs() * (w1.abs() + w2.abs() + w3.abs());
    let lower = surd("w1 - w2 + w3", cr * (w1 - w2 + w3), scale)?;
    let upper = surd("w1 + w2 + w3", cr * (w1 + w2 + w3), scale)?;
    let tail_root = surd("w4", w4, w4.abs())?;
    Ok((upper - lower) / 8.0 - tail * tail_root)
}

/// Closed-form concurrence of the accelerated white-noise state.
pub fn concurrence_white_closed(x: f64, p: f64, r: f64) -> Result<Concurrence> {
    ModelParams::white(x, p, r)?;
    white_closed_with_tail(x, p, r, WHITE_TAIL_COEFFICIENT).map(Concurrence::new)
}

fn color_closed_raw(x: f64, q: f64, r: f64) -> Result<f64> {
    let (cr, x2) = (r.cos(), x * x);
    let c1 = cr - q * q * cr * (1.0 - 8.0 * x2 + 8.0 * x2 * x2);
    let a = 1.0 - 2.0 * x2;
    let inner = (1.0 - x2) * (1.0 - q * q * a * a);
    let c2 = 4.0 * q * x * cr * surd("c2", inner, 0.0)?;
    let scale = cr.abs() * (c1.abs() + c2.abs());
    let upper = surd("c1 + c2", cr * (c1 + c2), scale)?;
    let lower = surd("c1 - c2", cr * (c1 - c2), scale)?;
    Ok(0.5 * upper - 0.5 * lower)
}

/// Closed-form concurrence of the accelerated color-noise state.
pub fn concurrence_color_closed(x: f64, q: f64, r: f64) -> Result<Concurrence> {
    ModelParams::color(x, q, r)?;
    color_closed_raw(x, q, r).map(Concurrence::new)
}

/// How the `cos r` factors of the white-color closed form are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhiteColorReading {
    /// `a1 +- a2 + a3` under the outer roots, no `cos r` factors.
    Unfactored,
    /// `cos r (a1 cos r +- a2 + a3)` under the outer roots, the same layout
    /// as the white-noise form, to which it reduces at `q = 0`.
    CosFactored,
}

pub fn whitecolor_closed_raw(
    x: f64,
    p: f64,
    q: f64,
    r: f64,
    reading: WhiteColorReading,
) -> Result<f64> {
    let (cr, x2) = (r.cos(), x * x);
    let eta1 = 1.0 - p + q;
    let eta2 = -1.0 + p + q;
    let a1 = 5.0 + 6.0 * p - 11.0 * p * p
        + 8.0 * q
        + 8.0 * p * q
        + 3.0 * q * q
        + 4.0 * p * (1.0 + 31.0 * p - q) * x2
        - 128.0 * p * p * x2 * x2;
    let inner = -p
        * p
        * x2
        * (x2 - 1.0)
        * (eta1 + 4.0 * p * x2)
        * cr
        * cr
        * (3.0 + 5.0 * p + q - 8.0 * p * x2 + eta2 * (2.0 * r).cos());
    let a2 = 16.0 * SQRT_2 * surd("a2", inner, 0.0)?;
    let a3 = eta2 * (eta1 + 4.0 * p * x2) * (3.0 * r).cos();
    let a4 = -eta2 * cr * cr * (1.0 - p - q + (1.0 + q + p * (4.0 * x2 - 1.0)) * r.sin().powi(2));

    let (lower_arg, upper_arg, scale) = match reading {
        WhiteColorReading::Unfactored => {
            (a1 - a2 + a3, a1 + a2 + a3, a1.abs() + a2.abs() + a3.abs())
        }
        WhiteColorReading::CosFactored => (
            cr * (a1 * cr - a2 + a3),
            cr * (a1 * cr + a2 + a3),
            cr.abs() * (a1.abs() * cr.abs() + a2.abs() + a3.abs()),
        ),
    };
    let lower = surd("a1 - a2 + a3", lower_arg, scale)?;
    let upper = surd("a1 + a2 + a3", upper_arg, scale)?;
    let tail = surd("a4", a4, a4.abs())?;
    Ok((upper - lower) / 8.0 - 0.5 * tail)
}

/// Closed-form concurrence under simultaneous white and color noise.
pub fn concurrence_whitecolor_closed(
    x: f64,
    p: f64,
    q: f64,
    r: f64,
    reading: WhiteColorReading,
) -> Result<Concurrence> {
    ModelParams::white_color(x, p, q, r)?;
    whitecolor_closed_raw(x, p, q, r, reading).map(Concurrence::new)
}

/// Closed-form concurrence for already-validated parameters, dispatching on
/// the channel. White-color uses the [`WhiteColorReading::CosFactored`]
/// reading.
pub fn concurrence_closed(params: &ModelParams) -> Result<Concurrence> {
    let ModelParams { x, p, q, r, .. } = *params;
    let v = match params.channel {
        Channel::White => white_closed_with_tail(x, p, r, WHITE_TAIL_COEFFICIENT)?,
        Channel::Color => color_closed_raw(x, q, r)?,
        Channel::WhiteColor => whitecolor_closed_raw(x, p, q, r, WhiteColorReading::CosFactored)?,
    };
    Ok(Concurrence::new(v))
}
