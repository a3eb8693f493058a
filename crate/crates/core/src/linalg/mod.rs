//! Dense complex linear algebra for the fixed 2x2 and 4x4 sizes used by
//! two-qubit states.
//!
//! Matrices are row-major arrays of [`Complex64`]. The dimension is a const
//! generic, so [`Matrix2`] and [`Matrix4`] share one implementation.

mod eigen;

pub use eigen::{eig_hermitian, polar_unitary, sqrt_psd, SpectralDecomposition};

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
// f64 math without std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

/// A column vector of length `N`.
pub type Vector<const N: usize> = [Complex64; N];

pub type Matrix2 = Matrix<2>;
pub type Matrix4 = Matrix<4>;

/// Eigenvalues this close to zero, relative to the largest magnitude, are
/// indistinguishable from rounding noise of a backward-stable eigensolver.
pub const NOISE_FLOOR: f64 = 64.0 * f64::EPSILON;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize> {
    data: [[Complex64; N]; N],
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Matrix<N> {
    pub const fn zeros() -> Self {
        Self {
            data: [[ZERO; N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = ONE;
        }
        m
    }

    pub const fn from_rows(data: [[Complex64; N]; N]) -> Self {
        Self { data }
    }

    pub fn from_real_rows(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.data[i][j] = Complex64::new(v, 0.0);
            }
        }
        m
    }

    pub fn diag(values: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, &v) in values.iter().enumerate() {
            m.data[i][i] = Complex64::new(v, 0.0);
        }
        m
    }

    /// `|v><w|`
    pub fn outer(v: &Vector<N>, w: &Vector<N>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> &[[Complex64; N]; N] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] = self.data[j][i].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.data.iter_mut() {
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.data[i][i]).fold(ZERO, |a, b| a + b)
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut m = *self;
        for row in m.data.iter_mut() {
            for v in row.iter_mut() {
                *v *= k;
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vector<N> {
        let mut v = [ZERO; N];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = self.data[i][j];
        }
        v
    }

    pub fn set_column(&mut self, j: usize, v: &Vector<N>) {
        for (i, vi) in v.iter().enumerate() {
            self.data[i][j] = *vi;
        }
    }

    pub fn apply(&self, v: &Vector<N>) -> Vector<N> {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N)
                .map(|j| self.data[i][j] * v[j])
                .fold(ZERO, |a, b| a + b);
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.data[i][j] - other.data[i][j]).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .flat_map(|row| row.iter())
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `U * self * U^dagger`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for Matrix<N> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] += rhs.data[i][j];
            }
        }
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] -= rhs.data[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for Matrix<N> {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.data[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.data[i][j] += a * rhs.data[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Mul<Complex64> for Matrix<N> {
    type Output = Self;

    fn mul(mut self, k: Complex64) -> Self {
        for row in self.data.iter_mut() {
            for v in row.iter_mut() {
                *v *= k;
            }
        }
        self
    }
}

/// `<a|b>`, antilinear in the first argument.
pub fn inner<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> Complex64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.conj() * y)
        .fold(ZERO, |s, t| s + t)
}

pub fn norm<const N: usize>(v: &Vector<N>) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn sigma_x() -> Matrix2 {
    Matrix2::from_real_rows([[0.0, 1.0], [1.0, 0.0]])
}

pub fn sigma_y() -> Matrix2 {
    Matrix2::from_rows([
        [ZERO, Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), ZERO],
    ])
}

pub fn sigma_z() -> Matrix2 {
    Matrix2::diag([1.0, -1.0])
}

/// Kronecker product, `(A (x) B)[2i + k][2j + l] = A[i][j] * B[k][l]`.
pub fn kron2(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut m = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    m
}

/// Which qubit of a two-qubit operator survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Traces out the other qubit. Basis order is `|00>, |01>, |10>, |11>` with
/// the first qubit as the high bit.
pub fn partial_trace(rho: &Matrix4, keep: Subsystem) -> Matrix2 {
    let mut out = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Subsystem::First => rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)],
                Subsystem::Second => rho[(i, j)] + rho[(2 + i, 2 + j)],
            };
        }
    }
    out
}
