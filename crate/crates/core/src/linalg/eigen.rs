use core::cmp::Ordering;

use num_complex::Complex64;
// f64 math without std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use super::{Matrix, Vector, NOISE_FLOOR};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const CONVERGENCE_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
/// Most negative eigenvalue [`sqrt_psd`] will clamp instead of rejecting.
pub const PSD_TOL: f64 = 1e-8;

/// Eigenvalues (descending) and the matching orthonormal eigenvectors, stored
/// as the columns of `eigenvectors`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDecomposition<const N: usize> {
    pub eigenvalues: [f64; N],
    pub eigenvectors: Matrix<N>,
}

impl<const N: usize> SpectralDecomposition<N> {
    pub fn vector(&self, i: usize) -> Vector<N> {
        self.eigenvectors.column(i)
    }

    /// `sum_i f(lambda_i) |V_i><V_i|`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix<N> {
        let mut out = Matrix::zeros();
        for i in 0..N {
            let v = self.vector(i);
            out += Matrix::outer(&v, &v).scale(f(self.eigenvalues[i]));
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix<N> {
        self.map(|l| l)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }
}

fn off_diagonal_norm<const N: usize>(a: &Matrix<N>) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Rotates so the first non-negligible component is real and positive.
fn canonical_phase<const N: usize>(v: &mut Vector<N>) {
    if let Some(lead) = v.iter().find(|c| c.norm() > 1e-12) {
        let phase = lead.conj() / lead.norm();
        for c in v.iter_mut() {
            *c *= phase;
        }
    }
}

/// Cyclic complex Jacobi eigensolver for a Hermitian matrix.
///
/// Eigenvalues come back strictly descending. Exact ties are ordered by the
/// real part of the first differing component of the phase-canonicalized
/// eigenvectors, larger first.
pub fn eig_hermitian<const N: usize>(m: &Matrix<N>) -> Result<SpectralDecomposition<N>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }

    let mut a = (*m + m.adjoint()).scale(0.5);
    let mut v = Matrix::<N>::identity();
    let norm = a.frobenius_norm();

    let mut converged_sweeps = 0;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off == 0.0 {
            break;
        }
        // one extra sweep after crossing the threshold squares the residual
        if off <= CONVERGENCE_TOL * norm {
            converged_sweeps += 1;
            if converged_sweeps > 1 {
                break;
            }
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order = [0usize; N];
    for (i, o) in order.iter_mut().enumerate() {
        *o = i;
    }
    let mut vectors = [[Complex64::new(0.0, 0.0); N]; N];
    for (i, vec) in vectors.iter_mut().enumerate() {
        *vec = v.column(i);
        canonical_phase(vec);
    }
    let values: [f64; N] = core::array::from_fn(|i| a[(i, i)].re);
    order.sort_unstable_by(|&i, &j| {
        values[j]
            .partial_cmp(&values[i])
            .unwrap_or(Ordering::Equal)
            .then_with(|| tie_break(&vectors[i], &vectors[j]))
    });

    let mut eigenvectors = Matrix::zeros();
    let mut eigenvalues = [0.0; N];
    for (slot, &idx) in order.iter().enumerate() {
        eigenvalues[slot] = values[idx];
        eigenvectors.set_column(slot, &vectors[idx]);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn tie_break<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        if (x.re - y.re).abs() > 1e-12 {
            return y.re.partial_cmp(&x.re).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

/// One Jacobi rotation zeroing `a[p][q]`. The unitary acts on columns p, q as
/// `[[c, s], [-s e^{-i phi}, c e^{-i phi}]]` where `phi = arg a[p][q]`.
fn rotate<const N: usize>(a: &mut Matrix<N>, v: &mut Matrix<N>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g <= f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta == 0.0 {
        1.0
    } else if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();

    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * pc * s;
        a[(k, q)] = akp * s + akq * pc * c;
    }
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, p)] = Complex64::new(app - t * g, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * g, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for k in 0..N {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * pc * s;
        v[(k, q)] = vkp * s + vkq * pc * c;
    }
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues down to `-PSD_TOL` are clamped to zero, as are positive ones
/// under the solver's noise floor.
pub fn sqrt_psd<const N: usize>(m: &Matrix<N>) -> Result<Matrix<N>> {
    let eig = eig_hermitian(m)?;
    let min_eigenvalue = eig.eigenvalues[N - 1];
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let floor = NOISE_FLOOR * eig.max_abs_eigenvalue();
    Ok(eig.map(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Unitary factor `M (M^dagger M)^{-1/2}` of the polar decomposition, i.e. the
/// unitary closest to `M` in Frobenius norm.
pub fn polar_unitary<const N: usize>(m: &Matrix<N>) -> Result<Matrix<N>> {
    let gram = m.adjoint() * *m;
    let eig = eig_hermitian(&gram)?;
    if eig.eigenvalues[N - 1] <= 1e-20 * eig.max_abs_eigenvalue().max(f64::MIN_POSITIVE) {
        return Err(Error::SingularPoint(
            "polar factor of a rank-deficient matrix",
        ));
    }
    Ok(*m * eig.map(|l| 1.0 / l.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, Matrix4};
    use crate::testutil::{density4, hermitian4, psd4};
    use proptest::prelude::*;

    #[test]
    fn diagonal_input() {
        let d = eig_hermitian(&Matrix4::diag([1.0, 3.0, 4.0, 2.0])).unwrap();
        assert_eq!(d.eigenvalues, [4.0, 3.0, 2.0, 1.0]);
        let expected = Matrix4::from_real_rows([
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        assert!(d.eigenvectors.approx_eq(&expected, 0.0));
    }

    #[test]
    fn rank_one_projector() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let phi = [z, Complex64::new(s, 0.0), Complex64::new(s, 0.0), z];
        let d = eig_hermitian(&Matrix4::outer(&phi, &phi)).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-15);
        for l in &d.eigenvalues[1..] {
            assert!(l.abs() < 1e-15);
        }
        assert!((inner(&d.vector(0), &phi).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Matrix4::identity();
        m[(0, 1)] = Complex64::new(1e-6, 0.0);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn exact_ties_are_deterministic() {
        let a = eig_hermitian(&Matrix4::identity()).unwrap();
        let b = eig_hermitian(&Matrix4::identity()).unwrap();
        assert_eq!(a, b);
        assert!(a.eigenvectors.approx_eq(&Matrix4::identity(), 0.0));
    }

    #[test]
    fn sqrt_of_diagonal() {
        assert!(sqrt_psd(&Matrix4::identity())
            .unwrap()
            .approx_eq(&Matrix4::identity(), 1e-15));
        let r = sqrt_psd(&Matrix4::diag([4.0, 1.0, 0.0, 9.0])).unwrap();
        assert!(r.approx_eq(&Matrix4::diag([2.0, 1.0, 0.0, 3.0]), 1e-14));
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let err = sqrt_psd(&Matrix4::diag([1.0, 0.5, 0.0, -1e-6])).unwrap_err();
        assert!(matches!(err, Error::NotPsd { .. }));
        // tiny negative drift is clamped
        assert!(sqrt_psd(&Matrix4::diag([1.0, 0.5, 0.0, -1e-13])).is_ok());
    }

    #[test]
    fn polar_of_scaled_unitary() {
        let u = crate::linalg::kron2(&crate::linalg::sigma_y(), &crate::linalg::sigma_x());
        let p = polar_unitary(&u.scale(3.0)).unwrap();
        assert!(p.approx_eq(&u, 1e-14));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn reconstruction_and_orthonormality(h in hermitian4()) {
            let d = eig_hermitian(&h).unwrap();
            prop_assert!(d.reconstruct().approx_eq(&h, 1e-10));
            for i in 0..4 {
                for j in 0..4 {
                    let o = inner(&d.vector(i), &d.vector(j)).norm();
                    let delta = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((o - delta).abs() <= 1e-10);
                }
            }
            for w in d.eigenvalues.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
        }

        #[test]
        fn unit_trace_spectrum_sums_to_one(rho in density4()) {
            let d = eig_hermitian(&rho).unwrap();
            prop_assert!((d.eigenvalues.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn sqrt_squares_back(p in psd4()) {
            let r = sqrt_psd(&p).unwrap();
            prop_assert!((r * r).approx_eq(&p, 1e-9));
            prop_assert!(r.is_hermitian(1e-12));
        }

        #[test]
        fn fourth_root_reconstructs(p in psd4()) {
            let q = sqrt_psd(&sqrt_psd(&p).unwrap()).unwrap();
            let q2 = q * q;
            prop_assert!((q2 * q2).approx_eq(&p, 1e-8));
        }
    }
}
