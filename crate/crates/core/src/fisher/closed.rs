//! Closed two-qubit QFI of the accelerated white-noise state.
//!
//! The expressions are written once over [`Real`] so the primed quantities
//! (derivatives with respect to the estimated parameter) come from dual
//! numbers rather than hand-differentiated formulas.

// f64 math without std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use super::{DeltaTerms, QfiForm, QfiValue};
use crate::autodiff::{Dual, Real};
use crate::channels::{Channel, ModelParams, Param};
use crate::error::{Error, Result};
use crate::linalg::NOISE_FLOOR;

const RADICAND_TOL: f64 = 1e-10;

/// Auxiliary quantities of the closed two-qubit QFI. `mu1` and `mu2` are
/// `None` where the coherence `epsilon` vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaMuTerms {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
}

struct Terms<T> {
    gamma: T,
    beta: T,
    epsilon: T,
    kappa1: T,
    kappa2: T,
    kappa3: T,
    b1: T,
    b2: T,
    b3: T,
}

fn c<T: Real>(v: f64) -> T {
    T::constant(v)
}

fn terms<T: Real>(x: T, p: T, r: T) -> Result<Terms<T>> {
    let x2 = x * x;
    let px2 = p * x2;
    let cos2r = (c::<T>(2.0) * r).cos();
    let cos4r = (c::<T>(4.0) * r).cos();
    let kappa1 = c::<T>(4.0) + c::<T>(4.0) * p - c::<T>(4.0) * px2 + c::<T>(4.0) * px2 * cos2r;
    let kappa3 = c::<T>(2.0) + c::<T>(6.0) - c::<T>(12.0) * px2 - c::<T>(2.0) * cos2r
        + c::<T>(2.0) * p * cos2r
        - c::<T>(4.0) * px2 * cos2r;
    let b1 = c::<T>(6.0) + c::<T>(20.0) * p + c::<T>(38.0) * p * p
        - c::<T>(40.0) * px2
        - c::<T>(24.0) * p * px2
        + c::<T>(24.0) * p * px2 * x2;
    let b2 = c::<T>(8.0)
        * cos2r
        * (c::<T>(1.0)
            + p * (c::<T>(2.0) - c::<T>(4.0) * x2)
            + p * p * (c::<T>(-3.0) - c::<T>(4.0) * x2 + c::<T>(4.0) * x2 * x2));
    let b3 = c::<T>(2.0) * cos4r * (c::<T>(-1.0) + p - c::<T>(2.0) * px2).square();
    let radicand = b1 - b2 + b3;
    let scale = b1.value().abs() + b2.value().abs() + b3.value().abs();
    let kappa2 = if radicand.value() < -RADICAND_TOL {
        return Err(Error::NegativeRadicand {
            term: "kappa2",
            value: radicand.value(),
        });
    } else if radicand.value() <= NOISE_FLOOR * scale {
        c(0.0)
    } else {
        radicand.sqrt()
    };
    Ok(Terms {
        gamma: (c::<T>(1.0) - p) / c(4.0),
        beta: (c::<T>(1.0) - p * (c::<T>(1.0) - c::<T>(4.0) * x2)) / c(4.0),
        epsilon: p * x * (c::<T>(1.0) - x2).sqrt(),
        kappa1,
        kappa2,
        kappa3,
        b1,
        b2,
        b3,
    })
}

impl<T: Real> Terms<T> {
    fn mu(&self, r: T) -> Option<(T, T)> {
        let eps = self.epsilon.value();
        if eps.abs() < f64::EPSILON {
            return None;
        }
        let k = c::<T>(1.0) / (r.cos() * c::<T>(16.0) * self.epsilon);
        Some((
            k * (self.kappa3 - self.kappa2),
            k * (self.kappa3 + self.kappa2),
        ))
    }

    fn values(&self, r: T) -> KappaMuTerms {
        let mu = self.mu(r);
        KappaMuTerms {
            kappa1: self.kappa1.value(),
            kappa2: self.kappa2.value(),
            kappa3: self.kappa3.value(),
            b1: self.b1.value(),
            b2: self.b2.value(),
            b3: self.b3.value(),
            mu1: mu.map(|m| m.0.value()),
            mu2: mu.map(|m| m.1.value()),
        }
    }
}

/// The kappa, b and mu quantities at `(x, p, r)` for white noise.
pub fn kappa_mu_terms(x: f64, p: f64, r: f64) -> Result<KappaMuTerms> {
    ModelParams::white(x, p, r)?;
    Ok(terms(x, p, r)?.values(r))
}

fn seeded(param: Param, x: f64, p: f64, r: f64) -> Result<(Dual, Dual, Dual)> {
    let at = |v: f64, own: Param| {
        if own == param {
            Dual::variable(v)
        } else {
            Dual::constant(v)
        }
    };
    match param {
        Param::Q => Err(Error::Unsupported("white noise has no q parameter")),
        _ => Ok((at(x, Param::X), at(p, Param::P), at(r, Param::R))),
    }
}

/// Partial derivatives of the [`KappaMuTerms`] fields with respect to
/// `param`.
pub fn kappa_mu_derivatives(param: Param, x: f64, p: f64, r: f64) -> Result<KappaMuTerms> {
    ModelParams::white(x, p, r)?;
    let (x, p, r) = seeded(param, x, p, r)?;
    let t = terms(x, p, r)?;
    let mu = t.mu(r);
    Ok(KappaMuTerms {
        kappa1: t.kappa1.d,
        kappa2: t.kappa2.d,
        kappa3: t.kappa3.d,
        b1: t.b1.d,
        b2: t.b2.d,
        b3: t.b3.d,
        mu1: mu.map(|m| m.0.d),
        mu2: mu.map(|m| m.1.d),
    })
}

/// Closed two-qubit QFI of the accelerated white-noise state for `param` in
/// `{p, x, r}`.
pub fn qfi_two_white_closed(param: Param, x: f64, p: f64, r: f64) -> Result<QfiValue> {
    qfi_two_closed(&ModelParams::white(x, p, r)?, param)
}

/// As [`qfi_two_white_closed`], without range checks on `params` beyond the
/// channel.
///
/// The eigenvalue part is assembled block by block as printed, including the
/// `sin 2r / cos^2 r` lead term for `r`. The middle block is the eigenvector
/// part and the last block is the subtracted pair-mixing part, with
/// `lambda_2, lambda_3 = (kappa1 -+ kappa2) / 16`.
pub fn qfi_two_closed(params: &ModelParams, param: Param) -> Result<QfiValue> {
    if params.channel != Channel::White {
        return Err(Error::Unsupported(
            "closed two-qubit QFI exists for white noise only",
        ));
    }
    let (x, p, r) = seeded(param, params.x, params.p, params.r)?;
    let t = terms(x, p, r)?;
    let Some((mu1, mu2)) = t.mu(r) else {
        return Err(Error::SingularPoint("epsilon = 0"));
    };
    let (k1, k2) = (t.kappa1, t.kappa2);
    let lambda2 = (k1.v - k2.v) / 16.0;
    let lambda3 = (k1.v + k2.v) / 16.0;
    if lambda2 <= 0.0 || t.kappa2.v == 0.0 {
        return Err(Error::SingularPoint(
            "degenerate or vanishing block eigenvalue",
        ));
    }
    let cos2 = r.cos().v.powi(2);
    let sin2 = r.sin().v.powi(2);
    let (gamma, beta) = (t.gamma, t.beta);
    let tail_den = gamma.v + beta.v * sin2;

    let block = (k1.d - k2.d).powi(2) / (16.0 * (k1.v - k2.v))
        + (k1.d + k2.d).powi(2) / (16.0 * (k1.v + k2.v));
    let classical = match param {
        Param::P => {
            gamma.d.powi(2) * cos2 / gamma.v + block + (gamma.d + beta.d * sin2).powi(2) / tail_den
        }
        Param::X => block + (beta.d * sin2).powi(2) / tail_den,
        _ => (Dual::constant(2.0) * r).sin().v / cos2 + block + (beta.d * sin2).powi(2) / tail_den,
    };

    let n1 = mu1.v * mu1.v + 1.0;
    let n2 = mu2.v * mu2.v + 1.0;
    let quantum = 0.25
        * ((k1.v - k2.v) * mu1.d.powi(2) / n1.powi(2) + (k1.v + k2.v) * mu2.d.powi(2) / n2.powi(2));
    let pair = 8.0 * lambda2 * lambda3 / (lambda2 + lambda3)
        * ((mu1.v - mu2.v).powi(2) / (n1 * n2))
        * (mu1.d.powi(2) / n1.powi(2) + mu2.d.powi(2) / n2.powi(2));

    let decomposition = DeltaTerms {
        classical,
        quantum,
        pair,
    };
    let value = decomposition.total();
    if !value.is_finite() {
        return Err(Error::SingularPoint("closed form is not finite here"));
    }
    Ok(QfiValue::new(
        value,
        QfiForm::ClosedForm,
        Some(decomposition),
    ))
}
