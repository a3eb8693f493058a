//! Two-qubit QFI from the spectral decomposition.
//!
//! Eigenvectors at `theta +- h` are matched to those at `theta` before
//! differencing. Eigenvalues that agree at `theta` form a cluster; inside a
//! cluster the basis at `theta` is first rotated to diagonalize the
//! derivative of the state (the degenerate-perturbation basis), and the
//! matched vectors at `theta +- h` are aligned to it by the closest unitary.
//! For a single vector this is the usual phase alignment.

use num_complex::Complex64;

use super::{DeltaTerms, QfiForm, QfiValue, StateFamily, DEFAULT_STEP};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, polar_unitary};
use crate::linalg::{inner, Matrix, Matrix4, Vector};

/// Eigenvalues below this count as exactly zero.
pub const EIGEN_DROP: f64 = 1e-12;

/// Eigenvalues closer than this at `theta` are treated as degenerate.
const CLUSTER_TOL: f64 = 1e-9;

/// Smallest squared overlap (per dimension of a cluster) for a match to be
/// unambiguous.
const MIN_OVERLAP: f64 = 0.5;

type Basis = [Vector<4>; 4];

fn columns(m: &Matrix4) -> Basis {
    core::array::from_fn(|j| m.column(j))
}

fn combine(basis: &Basis, idx: &[usize], coeffs: impl Fn(usize) -> Complex64) -> Vector<4> {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (a, &i) in idx.iter().enumerate() {
        let c = coeffs(a);
        for (o, v) in out.iter_mut().zip(basis[i].iter()) {
            *o += c * v;
        }
    }
    out
}

fn small_matrix<const K: usize>(f: impl Fn(usize, usize) -> Complex64) -> Matrix<K> {
    let mut m = Matrix::<K>::zeros();
    for a in 0..K {
        for b in 0..K {
            m[(a, b)] = f(a, b);
        }
    }
    m
}

/// Rotates `basis[idx]` to the eigenbasis of `drho` restricted to their span.
fn rotate_cluster<const K: usize>(basis: &mut Basis, idx: &[usize], drho: &Matrix4) -> Result<()> {
    let proj = small_matrix::<K>(|a, b| inner(&basis[idx[a]], &drho.apply(&basis[idx[b]])));
    // the restriction is Hermitian only up to the family's own rounding
    let proj = (proj + proj.adjoint()).scale(0.5);
    let u = eig_hermitian(&proj)?.eigenvectors;
    let old = *basis;
    for (b, &i) in idx.iter().enumerate() {
        basis[i] = combine(&old, idx, |a| u[(a, b)]);
    }
    Ok(())
}

/// Aligns `shifted[js]` to `reference[idx]` with the closest unitary and
/// writes the result into `target[idx]`. Returns the smallest squared
/// singular value of the overlap matrix.
fn align_cluster<const K: usize>(
    reference: &Basis,
    idx: &[usize],
    shifted: &Basis,
    js: &[usize],
    target: &mut Basis,
) -> Result<f64> {
    let overlap = small_matrix::<K>(|a, b| inner(&shifted[js[a]], &reference[idx[b]]));
    let gram = eig_hermitian(&(overlap.adjoint() * overlap))?;
    let u = polar_unitary(&overlap)?;
    for (b, &i) in idx.iter().enumerate() {
        target[i] = combine(shifted, js, |a| u[(a, b)]);
    }
    Ok(gram.eigenvalues[K - 1])
}

macro_rules! by_size {
    ($k:expr, $f:ident($($arg:expr),*)) => {
        match $k {
            1 => $f::<1>($($arg),*),
            2 => $f::<2>($($arg),*),
            3 => $f::<3>($($arg),*),
            _ => $f::<4>($($arg),*),
        }
    };
}

/// Groups indices of descending `values` whose neighbours lie within
/// `CLUSTER_TOL`.
fn clusters(values: &[f64; 4]) -> ([[usize; 4]; 4], [usize; 4], usize) {
    let mut members = [[0usize; 4]; 4];
    let mut sizes = [0usize; 4];
    let mut count = 0;
    for i in 0..4 {
        if i == 0 || values[i - 1] - values[i] > CLUSTER_TOL {
            count += 1;
        }
        let c = count - 1;
        members[c][sizes[c]] = i;
        sizes[c] += 1;
    }
    (members, sizes, count)
}

struct Aligned {
    /// Basis at `theta`, rotated inside degenerate clusters.
    basis: Basis,
    /// Matching vectors at `theta + h` and `theta - h`.
    plus: Basis,
    minus: Basis,
}

fn align(
    rho: &Matrix4,
    plus: &Matrix4,
    minus: &Matrix4,
    drho: &Matrix4,
    theta: f64,
    h: f64,
) -> Result<(Aligned, [f64; 4])> {
    let e0 = eig_hermitian(rho)?;
    let mut basis = columns(&e0.eigenvectors);
    let lambda = e0.eigenvalues;
    let (members, sizes, count) = clusters(&lambda);
    for c in 0..count {
        if sizes[c] > 1 {
            let idx = &members[c][..sizes[c]];
            by_size!(sizes[c], rotate_cluster(&mut basis, idx, drho))?;
        }
    }

    let mut out = Aligned {
        basis,
        plus: basis,
        minus: basis,
    };
    for (shifted_rho, target) in [(plus, &mut out.plus), (minus, &mut out.minus)] {
        let shifted = columns(&eig_hermitian(shifted_rho)?.eigenvectors);
        // assign each shifted vector to the cluster holding most of its weight
        let mut assigned = [[0usize; 4]; 4];
        let mut filled = [0usize; 4];
        for (j, w) in shifted.iter().enumerate() {
            let mut best = (0, -1.0);
            for c in 0..count {
                let weight: f64 = members[c][..sizes[c]]
                    .iter()
                    .map(|&i| inner(&basis[i], w).norm_sqr())
                    .sum();
                if weight > best.1 {
                    best = (c, weight);
                }
            }
            let c = best.0;
            if filled[c] == sizes[c] {
                return Err(Error::DegenerateCrossing { theta, h });
            }
            assigned[c][filled[c]] = j;
            filled[c] += 1;
        }
        for c in 0..count {
            let idx = &members[c][..sizes[c]];
            let js = &assigned[c][..sizes[c]];
            let vanishing = idx.iter().all(|&i| lambda[i] < EIGEN_DROP);
            match by_size!(sizes[c], align_cluster(&basis, idx, &shifted, js, target)) {
                Ok(weakest) if weakest < MIN_OVERLAP && !vanishing => {
                    return Err(Error::DegenerateCrossing { theta, h });
                }
                Ok(_) => {}
                // a null eigenspace may tilt out of the reference freely
                Err(_) if vanishing => {
                    for (a, &i) in idx.iter().enumerate() {
                        target[i] = shifted[js[a]];
                    }
                }
                Err(_) => return Err(Error::DegenerateCrossing { theta, h }),
            }
        }
    }
    Ok((out, lambda))
}

/// Two-qubit QFI of `family` at `theta` with step `h`, split into the
/// eigenvalue, eigenvector and pair-mixing parts.
pub fn qfi_two_qubit_spectral<F: StateFamily<4>>(
    family: &F,
    theta: f64,
    h: f64,
) -> Result<QfiValue> {
    if !(h > 0.0) || !theta.is_finite() {
        return Err(Error::NonFinite);
    }
    let rho = family.eval(theta)?;
    let plus = family.eval(theta + h)?;
    let minus = family.eval(theta - h)?;
    let drho = (plus - minus).scale(0.5 / h);
    let (aligned, lambda) = align(&rho, &plus, &minus, &drho, theta, h)?;

    let live: [bool; 4] = core::array::from_fn(|i| lambda[i] >= EIGEN_DROP);
    let dv: Basis = core::array::from_fn(|i| {
        core::array::from_fn(|k| (aligned.plus[i][k] - aligned.minus[i][k]) / (2.0 * h))
    });

    let mut terms = DeltaTerms {
        classical: 0.0,
        quantum: 0.0,
        pair: 0.0,
    };
    for i in (0..4).filter(|&i| live[i]) {
        let v = &aligned.basis[i];
        let dlambda = inner(v, &drho.apply(v)).re;
        terms.classical += dlambda * dlambda / lambda[i];
        terms.quantum += 4.0 * lambda[i] * (inner(&dv[i], &dv[i]).re - inner(v, &dv[i]).norm_sqr());
        for j in (0..4).filter(|&j| j != i && live[j]) {
            let weight = lambda[i] * lambda[j] / (lambda[i] + lambda[j]);
            terms.pair += 8.0 * weight * inner(v, &dv[j]).norm_sqr();
        }
    }
    Ok(QfiValue::new(
        terms.total(),
        QfiForm::TwoQubitSpectral,
        Some(terms),
    ))
}

/// [`qfi_two_qubit_spectral`] with the default step, retried with the step
/// divided by ten (at most twice) when eigenvectors cannot be matched.
pub fn qfi_two_qubit<F: StateFamily<4>>(family: &F, theta: f64) -> Result<QfiValue> {
    let mut h = DEFAULT_STEP;
    let mut result = qfi_two_qubit_spectral(family, theta, h);
    for _ in 0..2 {
        if !matches!(result, Err(Error::DegenerateCrossing { .. })) {
            break;
        }
        h /= 10.0;
        result = qfi_two_qubit_spectral(family, theta, h);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{phi_ket, ModelParams, Param};
    use crate::fisher::{qfi_single, AcceleratedFamily, FnFamily};
    use crate::linalg::Matrix4;
    use crate::testutil::{density4, hermitian4};
    use core::f64::consts::FRAC_1_SQRT_2;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-12)
    }

    #[test]
    fn constant_family_is_zero() {
        let rho = Matrix4::diag([0.4, 0.3, 0.2, 0.1]);
        let fam = FnFamily::new(Param::P, move |_| rho);
        assert_eq!(qfi_two_qubit(&fam, 0.2).unwrap().value, 0.0);
        let degenerate = Matrix4::diag([0.5, 0.5, 0.0, 0.0]);
        let fam = FnFamily::new(Param::P, move |_| degenerate);
        assert_eq!(qfi_two_qubit(&fam, 0.2).unwrap().value, 0.0);
    }

    #[test]
    fn pure_phi_family() {
        for x in [0.3, 0.5, FRAC_1_SQRT_2] {
            let fam = FnFamily::new(Param::X, |x: f64| phi_ket(x).unwrap().projector());
            let f = qfi_two_qubit(&fam, x).unwrap();
            let expected = 4.0 / (1.0 - x * x);
            assert!(
                rel(f.value, expected) < 1e-5,
                "x={x}: {} vs {expected}",
                f.value
            );
        }
        let base = ModelParams::white(FRAC_1_SQRT_2, 1.0, 0.0).unwrap();
        let fam = AcceleratedFamily::new(base, Param::X).unwrap();
        let f = qfi_two_qubit(&fam, FRAC_1_SQRT_2).unwrap();
        assert!(rel(f.value, 8.0) < 1e-5, "{}", f.value);
    }

    #[test]
    fn classical_two_outcome() {
        let fam = FnFamily::new(Param::P, |t: f64| Matrix4::diag([t, 1.0 - t, 0.0, 0.0]));
        let f = qfi_two_qubit(&fam, 0.3).unwrap();
        let d = f.decomposition.unwrap();
        assert!(rel(f.value, 100.0 / 21.0) < 1e-8, "{}", f.value);
        assert!(rel(d.classical, 100.0 / 21.0) < 1e-8);
        assert!(d.quantum.abs() < 1e-12 && d.pair.abs() < 1e-12);
    }

    #[test]
    fn crossing_eigenvalues() {
        // all four populations meet at theta = 0.5 and two of them swap order
        let fam = FnFamily::new(Param::P, |t: f64| {
            Matrix4::diag([t / 2.0, (1.0 - t) / 2.0, 0.25, 0.25])
        });
        let f = qfi_two_qubit(&fam, 0.5).unwrap();
        assert!(rel(f.value, 2.0) < 1e-8, "{}", f.value);
    }

    #[test]
    fn decomposition_sums_to_value() {
        let base = ModelParams::white(0.3, 0.6, 0.4).unwrap();
        for param in [Param::P, Param::X, Param::R] {
            let fam = AcceleratedFamily::new(base, param).unwrap();
            let f = qfi_two_qubit(&fam, fam.theta()).unwrap();
            assert!((f.decomposition.unwrap().total() - f.value).abs() < 1e-10);
        }
    }

    #[test]
    fn step_halving_is_stable() {
        let base = ModelParams::white(0.4, 0.5, 0.3).unwrap();
        for param in [Param::P, Param::X, Param::R] {
            let fam = AcceleratedFamily::new(base, param).unwrap();
            let a = qfi_two_qubit_spectral(&fam, fam.theta(), 1e-5)
                .unwrap()
                .value;
            let b = qfi_two_qubit_spectral(&fam, fam.theta(), 5e-6)
                .unwrap()
                .value;
            assert!((a - b).abs() / a.max(1e-12) < 1e-4, "{param:?}: {a} vs {b}");
        }
    }

    #[test]
    fn dominates_reduced_qubit() {
        let base = ModelParams::color(0.4, 0.7, 0.5).unwrap();
        for param in [Param::Q, Param::X, Param::R] {
            let fam = AcceleratedFamily::new(base, param).unwrap();
            let two = qfi_two_qubit(&fam, fam.theta()).unwrap().value;
            let one = qfi_single(&fam, fam.theta()).unwrap().value;
            assert!(two >= one - 1e-6, "{param:?}: {two} < {one}");
        }
    }

    /// `2 sum (l_i - l_j)^2 / (l_i + l_j) |H_ij|^2` for `rho(t) = U(t) rho U(t)^dagger`,
    /// `U(t) = exp(-i t H)`.
    fn unitary_oracle(rho: &Matrix4, hamiltonian: &Matrix4) -> f64 {
        let e = eig_hermitian(rho).unwrap();
        let mut f = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let s = e.eigenvalues[i] + e.eigenvalues[j];
                if s > 1e-12 {
                    let hij = inner(&e.vector(i), &hamiltonian.apply(&e.vector(j)));
                    f += 2.0 * (e.eigenvalues[i] - e.eigenvalues[j]).powi(2) / s * hij.norm_sqr();
                }
            }
        }
        f
    }

    fn evolve(rho: &Matrix4, hamiltonian: &Matrix4, t: f64) -> Matrix4 {
        let e = eig_hermitian(hamiltonian).unwrap();
        let mut u = Matrix4::zeros();
        for k in 0..4 {
            let v = e.vector(k);
            let phase = Complex64::from_polar(1.0, -t * e.eigenvalues[k]);
            u = u + Matrix4::outer(&v, &v) * phase;
        }
        rho.conjugate_by(&u)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn unitary_families_match_oracle(rho in density4(), h in hermitian4()) {
            let fam = FnFamily::new(Param::R, move |t: f64| evolve(&rho, &h, t));
            let expected = unitary_oracle(&rho, &h);
            match qfi_two_qubit(&fam, 0.0) {
                Ok(f) => prop_assert!(
                    (f.value - expected).abs() <= 1e-5 * expected.max(1.0),
                    "{} vs {}", f.value, expected
                ),
                Err(Error::DegenerateCrossing { .. }) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
