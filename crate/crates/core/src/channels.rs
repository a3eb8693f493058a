//! Noisy initial states and the single-mode Unruh channel acting on the
//! second qubit.
//!
//! The unaccelerated state mixes `|phi> = sqrt(1 - x^2)|01> + x|10>` with
//! white noise (the maximally mixed state) or color noise (the classical
//! `|01>/|10>` mixture). Accelerating the second qubit maps
//! `|0> -> cos r |0>_I |0>_II + sin r |1>_I |1>_II` and `|1> -> |1>_I |0>_II`;
//! region II is traced out at once, leaving a two-qubit state.

use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
// f64 math without std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, Matrix2, Matrix4};
use crate::DensityMatrix4;

/// Upper end of the acceleration parameter; `r -> pi/4` as `a -> infinity`.
pub const R_MAX: f64 = FRAC_PI_4;

const SUM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    White,
    Color,
    WhiteColor,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::White => "white",
            Channel::Color => "color",
            Channel::WhiteColor => "whitecolor",
        }
    }

    /// Parameters a state of this channel actually depends on.
    pub fn params(self) -> &'static [Param] {
        match self {
            Channel::White => &[Param::P, Param::X, Param::R],
            Channel::Color => &[Param::Q, Param::X, Param::R],
            Channel::WhiteColor => &[Param::P, Param::Q, Param::X, Param::R],
        }
    }
}

/// Identifies one scalar knob of [`ModelParams`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    P,
    Q,
    X,
    R,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::P, Param::Q, Param::X, Param::R];

    pub fn name(self) -> &'static str {
        match self {
            Param::P => "p",
            Param::Q => "q",
            Param::X => "x",
            Param::R => "r",
        }
    }
}

/// State amplitude `x`, white strength `p`, color strength `q`, and
/// acceleration parameter `r` (radians).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub channel: Channel,
    pub x: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl ModelParams {
    /// Validated constructor with `r <= pi/4`.
    pub fn new(channel: Channel, x: f64, p: f64, q: f64, r: f64) -> Result<Self> {
        let params = Self {
            channel,
            x,
            p,
            q,
            r,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn white(x: f64, p: f64, r: f64) -> Result<Self> {
        Self::new(Channel::White, x, p, 0.0, r)
    }

    pub fn color(x: f64, q: f64, r: f64) -> Result<Self> {
        Self::new(Channel::Color, x, 0.0, q, r)
    }

    pub fn white_color(x: f64, p: f64, q: f64, r: f64) -> Result<Self> {
        Self::new(Channel::WhiteColor, x, p, q, r)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_r_max(R_MAX)
    }

    /// Same checks as [`validate`](Self::validate) with a caller-chosen upper
    /// bound on `r`.
    pub fn validate_with_r_max(&self, r_max: f64) -> Result<()> {
        unit_interval("x", self.x)?;
        unit_interval("p", self.p)?;
        unit_interval("q", self.q)?;
        if !(self.r.is_finite() && (0.0..=r_max).contains(&self.r)) {
            return Err(Error::Domain {
                name: "r",
                value: self.r,
                allowed: "[0, r_max]",
            });
        }
        if self.channel == Channel::WhiteColor && self.p + self.q > 1.0 + SUM_TOL {
            return Err(Error::Domain {
                name: "p + q",
                value: self.p + self.q,
                allowed: "p + q <= 1",
            });
        }
        Ok(())
    }

    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::P => self.p,
            Param::Q => self.q,
            Param::X => self.x,
            Param::R => self.r,
        }
    }

    #[must_use]
    pub fn with(mut self, param: Param, value: f64) -> Self {
        match param {
            Param::P => self.p = value,
            Param::Q => self.q = value,
            Param::X => self.x = value,
            Param::R => self.r = value,
        }
        self
    }
}

fn unit_interval(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            allowed: "[0, 1]",
        })
    }
}

/// Pure two-qubit state in the basis `|00>, |01>, |10>, |11>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector4(pub [Complex64; 4]);

impl StateVector4 {
    pub fn projector(&self) -> Matrix4 {
        Matrix4::outer(&self.0, &self.0)
    }
}

/// `|phi> = sqrt(1 - x^2)|01> + x|10>`; a product state at `x = 0, 1` and
/// maximally entangled at `x = 1/sqrt(2)`.
pub fn phi_ket(x: f64) -> Result<StateVector4> {
    unit_interval("x", x)?;
    Ok(phi_ket_raw(x))
}

/// Unchecked `|phi>`; the `|01>` amplitude saturates at zero for `|x| > 1`
/// so finite-difference stencils stepping past the endpoints stay finite.
fn phi_ket_raw(x: f64) -> StateVector4 {
    let z = Complex64::new(0.0, 0.0);
    let a = (1.0 - x * x).max(0.0).sqrt();
    StateVector4([z, Complex64::new(a, 0.0), Complex64::new(x, 0.0), z])
}

fn classical_mixture() -> Matrix4 {
    Matrix4::diag([0.0, 0.5, 0.5, 0.0])
}

/// The unaccelerated noisy state.
///
/// * White: `p|phi><phi| + (1 - p) I/4`
/// * Color: `q|phi><phi| + (1 - q)/2 (|01><01| + |10><10|)`
/// * WhiteColor: `p|phi><phi| + q/2 (|01><01| + |10><10|) + (1 - p - q) I/4`
pub fn initial_state(params: &ModelParams) -> Result<DensityMatrix4> {
    params.validate()?;
    Ok(initial_state_unchecked(params))
}

/// [`initial_state`] without domain checks.
pub fn initial_state_unchecked(params: &ModelParams) -> DensityMatrix4 {
    let phi = phi_ket_raw(params.x).projector();
    let id = Matrix4::identity().scale(0.25);
    let (p, q) = (params.p, params.q);
    match params.channel {
        Channel::White => phi.scale(p) + id.scale(1.0 - p),
        Channel::Color => phi.scale(q) + classical_mixture().scale(1.0 - q),
        Channel::WhiteColor => phi.scale(p) + classical_mixture().scale(q) + id.scale(1.0 - p - q),
    }
}

/// Kraus pair of the Unruh channel on one qubit: `K0 = diag(cos r, 1)` keeps
/// region II in its vacuum, `K1 = sin r |1><0|` excites it.
fn unruh_kraus(r: f64) -> [Matrix2; 2] {
    let k0 = Matrix2::diag([r.cos(), 1.0]);
    let k1 = Matrix2::from_real_rows([[0.0, 0.0], [r.sin(), 0.0]]);
    [k0, k1]
}

/// Accelerates the second qubit and traces out region II.
pub fn unruh_second_qubit(rho: &DensityMatrix4, r: f64) -> Result<DensityMatrix4> {
    if !(r.is_finite() && (0.0..=R_MAX).contains(&r)) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            allowed: "[0, pi/4]",
        });
    }
    Ok(unruh_second_qubit_unchecked(rho, r))
}

/// [`unruh_second_qubit`] for any real `r`.
pub fn unruh_second_qubit_unchecked(rho: &DensityMatrix4, r: f64) -> DensityMatrix4 {
    let id = Matrix2::identity();
    unruh_kraus(r)
        .iter()
        .map(|k| rho.conjugate_by(&crate::linalg::kron2(&id, k)))
        .fold(Matrix4::zeros(), |acc, m| acc + m)
}

/// Unruh image of [`initial_state`], built through the channel rather than
/// a closed form.
pub fn accelerated_state(params: &ModelParams) -> Result<DensityMatrix4> {
    params.validate()?;
    Ok(accelerated_state_unchecked(params))
}

/// [`accelerated_state`] without domain checks, for stencils that step just
/// outside the physical region.
pub fn accelerated_state_unchecked(params: &ModelParams) -> DensityMatrix4 {
    unruh_second_qubit_unchecked(&initial_state_unchecked(params), params.r)
}

/// Coefficients of the accelerated white-noise state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WhiteCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl WhiteCoeffs {
    pub fn new(x: f64, p: f64) -> Self {
        Self {
            gamma: (1.0 - p) / 4.0,
            alpha: (1.0 + p * (3.0 - 4.0 * x * x)) / 4.0,
            beta: (1.0 - p * (1.0 - 4.0 * x * x)) / 4.0,
            epsilon: p * x * (1.0 - x * x).max(0.0).sqrt(),
        }
    }
}

/// Coefficients of the accelerated color-noise state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorCoeffs {
    pub alpha_c: f64,
    pub beta_c: f64,
    pub epsilon_c: f64,
}

impl ColorCoeffs {
    pub fn new(x: f64, q: f64) -> Self {
        let a = 1.0 - 2.0 * x * x;
        Self {
            alpha_c: (1.0 + q * a) / 2.0,
            beta_c: (1.0 - q * a) / 2.0,
            epsilon_c: q * x * (1.0 - x * x).max(0.0).sqrt(),
        }
    }
}

/// X-shaped state with populations `diag` and a real `|01><10|` coherence.
fn x_state(diag: [f64; 4], coherence: f64) -> DensityMatrix4 {
    let mut m = Matrix4::diag(diag);
    m[(1, 2)] = Complex64::new(coherence, 0.0);
    m[(2, 1)] = Complex64::new(coherence, 0.0);
    m
}

/// Closed form of the accelerated white-noise state.
pub fn accelerated_white(x: f64, p: f64, r: f64) -> Result<DensityMatrix4> {
    ModelParams::white(x, p, r)?;
    let WhiteCoeffs {
        alpha,
        beta,
        gamma,
        epsilon,
    } = WhiteCoeffs::new(x, p);
    let (c2, s2) = (r.cos().powi(2), r.sin().powi(2));
    Ok(x_state(
        [gamma * c2, alpha + gamma * s2, beta * c2, beta * s2 + gamma],
        epsilon * r.cos(),
    ))
}

/// Closed form of the accelerated color-noise state.
pub fn accelerated_color(x: f64, q: f64, r: f64) -> Result<DensityMatrix4> {
    ModelParams::color(x, q, r)?;
    let ColorCoeffs {
        alpha_c,
        beta_c,
        epsilon_c,
    } = ColorCoeffs::new(x, q);
    let (c2, s2) = (r.cos().powi(2), r.sin().powi(2));
    Ok(x_state(
        [0.0, alpha_c, beta_c * c2, beta_c * s2],
        epsilon_c * r.cos(),
    ))
}

/// Accelerated state for simultaneous white and color noise. There is no
/// separate closed form; this is the Unruh image of the combined state.
pub fn accelerated_whitecolor(x: f64, p: f64, q: f64, r: f64) -> Result<DensityMatrix4> {
    accelerated_state(&ModelParams::white_color(x, p, q, r)?)
}

/// `r = arctan(exp(-pi * omega_c / a))` for acceleration `a` and the mode
/// constant `omega_c` (frequency times the speed of light).
pub fn r_from_acceleration(a: f64, omega_c: f64) -> Result<f64> {
    for (name, v) in [("a", a), ("omega_c", omega_c)] {
        if !(v > 0.0) {
            return Err(Error::Domain {
                name,
                value: v,
                allowed: "(0, inf]",
            });
        }
    }
    Ok((-PI * omega_c / a).exp().atan())
}

/// Checks Hermiticity, unit trace and positivity, each to `tol`.
pub fn check_density(rho: &DensityMatrix4, tol: f64) -> Result<()> {
    let deviation = rho.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::Domain {
            name: "trace",
            value: tr.re,
            allowed: "1",
        });
    }
    let min_eigenvalue = eig_hermitian(rho)?.eigenvalues[3];
    if min_eigenvalue < -tol {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(())
}
