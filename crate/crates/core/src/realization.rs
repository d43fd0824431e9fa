//! Model colligation of a finite Blaschke product on the span of the
//! reproducing kernels `e_k(t) = 1 / (1 - t conj(z_k))` at its zeros.
//!
//! In the kernel basis the state operator is the left shift
//! `f -> (f(t) - f(0)) / t`, which acts diagonally as `e_k -> conj(z_k) e_k`;
//! the input-to-state functional is `f -> f(0)`, and the state-to-output
//! vector is `l(t) = (S(t) - S(0)) / t`. A Cholesky factor of the Gram matrix
//! carries everything to an orthonormal basis.
//!
//! Gram-Schmidt on `e_0, e_1, ...` in order (which is what the Cholesky factor
//! encodes) produces the Takenaka-Malmquist functions
//! `phi_k(t) = gamma_k rho_k / (1 - conj(z_k) t) prod_{i<k} b_i(t)` with
//! `rho_k = sqrt(1 - |z_k|^2)`, `b_i(t) = (t - z_i) / (1 - conj(z_i) t)` and the
//! phase `gamma_k` that makes `L_kk = phi_k(z_k)` positive. [`model_colligation`]
//! evaluates the blocks in that basis from product formulas; the numerical
//! route through `G` ([`model_colligation_gram`]) loses about `cond(G) * eps`
//! of unitarity, which is too much for clustered zeros at degree 8.

use nalgebra::{Cholesky, SymmetricEigen};

use crate::colligation::UnitaryColligation;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::rational::{BlaschkeProduct, RationalInner};
use crate::schur_state;
use crate::tol;

#[derive(Debug, Clone)]
pub struct KernelBasis {
    zeros: Vec<C64>,
    gram: CMatrix,
    cholesky: CMatrix,
    min_eigenvalue: f64,
}

impl KernelBasis {
    /// Gram matrix `G_jk = 1 / (1 - z_j conj(z_k))` of distinct disc points.
    pub fn new(zeros: &[C64]) -> Result<Self> {
        for z in zeros {
            crate::rational::check_disc(*z, "zero")?;
        }
        for i in 0..zeros.len() {
            for j in i + 1..zeros.len() {
                let distance = (zeros[i] - zeros[j]).norm();
                if distance < tol::SEPARATION {
                    return Err(Error::ZerosTooClose { i, j, distance });
                }
            }
        }
        let n = zeros.len();
        let gram = CMatrix::from_fn(n, n, |j, k| ONE / (ONE - zeros[j] * zeros[k].conj()));
        let min_eigenvalue = if n == 0 {
            f64::INFINITY
        } else {
            SymmetricEigen::new(gram.clone())
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |acc, &x| acc.min(x))
        };
        if !(min_eigenvalue > tol::POSITIVE_DEFINITE) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        let cholesky = Cholesky::new(gram.clone())
            .ok_or(Error::NotPositiveDefinite { min_eigenvalue })?
            .unpack();
        Ok(Self {
            zeros: zeros.to_vec(),
            gram,
            cholesky,
            min_eigenvalue,
        })
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// Lower-triangular `L` with `G = L L*`.
    pub fn cholesky(&self) -> &CMatrix {
        &self.cholesky
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// `e_k(t)`.
    pub fn kernel(&self, k: usize, t: C64) -> C64 {
        ONE / (ONE - t * self.zeros[k].conj())
    }

    /// Evaluates `sum_k x_k e_k(t)`.
    pub fn eval(&self, x: &[C64], t: C64) -> C64 {
        x.iter()
            .enumerate()
            .map(|(k, xk)| xk * self.kernel(k, t))
            .sum()
    }

    /// The left shift in kernel coordinates: `diag(conj(z_k))`.
    pub fn shift(&self) -> CMatrix {
        let n = self.zeros.len();
        CMatrix::from_fn(
            n,
            n,
            |j, k| if j == k { self.zeros[k].conj() } else { ZERO },
        )
    }

    /// Largest deviation of `((I - zD)^{-1} e_k)(t)` from
    /// `(t e_k(t) - z e_k(z)) / (t - z)` over kernel vectors and point pairs.
    pub fn resolvent_residual(&self, pairs: &[(C64, C64)]) -> Result<f64> {
        let n = self.zeros.len();
        let d = self.shift();
        let mut worst: f64 = 0.0;
        for &(t, z) in pairs {
            if (t - z).norm() < 1e-6 {
                continue;
            }
            let m = linalg::identity(n) - &d * z;
            for k in 0..n {
                let mut e = CMatrix::zeros(n, 1);
                e[(k, 0)] = ONE;
                let x = linalg::solve(&m, &e)?;
                let coords: Vec<C64> = x.iter().copied().collect();
                let lhs = self.eval(&coords, t);
                let rhs = (t * self.kernel(k, t) - z * self.kernel(k, z)) / (t - z);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        Ok(worst)
    }
}

/// Builds the minimal unitary colligation of `b` on the kernel space.
pub fn model_colligation(b: &BlaschkeProduct) -> Result<UnitaryColligation> {
    Ok(model_colligation_with_basis(b)?.0)
}

pub fn model_colligation_with_basis(
    b: &BlaschkeProduct,
) -> Result<(UnitaryColligation, KernelBasis)> {
    let z = b.zeros();
    let basis = KernelBasis::new(z)?;
    let n = z.len();
    let rho: Vec<f64> = z.iter().map(|w| (1.0 - w.norm_sqr()).sqrt()).collect();
    let factor = |i: usize, t: C64| (t - z[i]) / (ONE - z[i].conj() * t);
    let gamma: Vec<C64> = (0..n)
        .map(|k| {
            let p = (0..k).fold(ONE, |acc, i| acc * factor(i, z[k]));
            p.conj() / p.norm()
        })
        .collect();
    // S = c prod (z_i - t) / (1 - conj(z_i) t) = c' prod b_i
    let c_prime = if n.is_multiple_of(2) {
        b.constant()
    } else {
        -b.constant()
    };
    let minus_product = |range: std::ops::Range<usize>| range.fold(ONE, |acc, i| acc * -z[i]);

    let mut u = CMatrix::zeros(n + 1, n + 1);
    u[(0, 0)] = z.iter().fold(b.constant(), |acc, w| acc * w);
    for k in 0..n {
        // phi_k(0)
        u[(0, k + 1)] = gamma[k] * rho[k] * minus_product(0..k);
        // <l, phi_k>
        u[(k + 1, 0)] = gamma[k].conj() * rho[k] * c_prime * minus_product(k + 1..n);
        // <D phi_k, phi_j> = conj(<M phi_j, phi_k>) for the compressed shift M,
        // whose matrix is lower triangular with diagonal z_k
        for j in 0..=k {
            let m_kj = if j == k {
                z[k]
            } else {
                (j + 1..k).fold(C64::new(rho[k] * rho[j], 0.0), |acc, i| acc * -z[i].conj())
            };
            u[(j + 1, k + 1)] = gamma[k] * gamma[j].conj() * m_kj.conj();
        }
    }
    Ok((UnitaryColligation::new(u)?, basis))
}

/// The same colligation as [`model_colligation`], computed literally: `C` from
/// the Gram solve for `l`, then a change of basis by the Cholesky factor.
pub fn model_colligation_gram(b: &BlaschkeProduct) -> Result<UnitaryColligation> {
    let zeros = b.zeros();
    let basis = KernelBasis::new(zeros)?;
    let n = zeros.len();
    let c = b.constant();
    let s0: C64 = zeros.iter().fold(c, |acc, z| acc * z);
    if n == 0 {
        return UnitaryColligation::new(CMatrix::from_element(1, 1, s0));
    }
    // l(z_j) = -S(0)/z_j = -c prod_{k != j} z_k; the same product is S'(0)
    // when z_j = 0, so no limit is needed.
    let v = CMatrix::from_fn(n, 1, |j, _| {
        -zeros
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .fold(c, |acc, (_, z)| acc * z)
    });
    // With G = L L*, the solution mu of G mu = v enters only as L* mu = L^{-1} v,
    // and D_w = L* D_x L^{-*}, B_w = 1^T L^{-*} are adjoints of L^{-1} Z L and
    // L^{-1} 1 (Z = D_x*). Forward substitution against L keeps the error at
    // cond(L) instead of cond(G).
    let l = basis.cholesky();
    let not_pd = || Error::NotPositiveDefinite {
        min_eigenvalue: basis.min_eigenvalue(),
    };
    let c_w = l.solve_lower_triangular(&v).ok_or_else(not_pd)?;
    let z_l = basis.shift().adjoint() * l;
    let d_w = l.solve_lower_triangular(&z_l).ok_or_else(not_pd)?.adjoint();
    let b_w = l
        .solve_lower_triangular(&CMatrix::from_element(n, 1, ONE))
        .ok_or_else(not_pd)?
        .adjoint();

    let mut u = CMatrix::zeros(n + 1, n + 1);
    u[(0, 0)] = s0;
    u.view_mut((0, 1), (1, n)).copy_from(&b_w);
    u.view_mut((1, 0), (n, 1)).copy_from(&c_w);
    u.view_mut((1, 1), (n, n)).copy_from(&d_w);
    UnitaryColligation::new(u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationReport {
    /// `max |S_col(z) - s(z)|` over the samples.
    pub transfer_error: f64,
    /// Resolvent identity on kernel vectors, when a basis is supplied.
    pub resolvent_residual: Option<f64>,
}

pub fn verify_realization(
    col: &UnitaryColligation,
    s: &RationalInner,
    samples: &[C64],
    basis: Option<&KernelBasis>,
) -> Result<RealizationReport> {
    let mut transfer_error: f64 = 0.0;
    for &z in samples {
        let diff = col.characteristic_function(z)? - s.eval(z)?;
        transfer_error = transfer_error.max(diff.norm());
    }
    let resolvent_residual = match basis {
        Some(basis) => {
            let pairs: Vec<(C64, C64)> = samples
                .iter()
                .zip(samples.iter().rev())
                .map(|(&t, &z)| (t, z))
                .collect();
            Some(basis.resolvent_residual(&pairs)?)
        }
        None => None,
    };
    Ok(RealizationReport {
        transfer_error,
        resolvent_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniquenessReport {
    pub model_transfer_error: f64,
    pub closed_form_transfer_error: f64,
    /// Intertwining residual of the gauge between the two realizations;
    /// infinite when no gauge exists.
    pub residual: f64,
}

/// Realizes `b` both by the model construction and from its Schur
/// parameters, and measures how well a state gauge maps one to the other.
pub fn realization_uniqueness_check(
    b: &BlaschkeProduct,
    samples: &[C64],
) -> Result<UniquenessReport> {
    let s = b.to_rational();
    let model = model_colligation(b)?;
    let params = s.schur_parameters()?;
    let closed = schur_state::colligation_from_schur_parameters(&params)?;
    let model_transfer_error = verify_realization(&model, &s, samples, None)?.transfer_error;
    let closed_form_transfer_error = verify_realization(&closed, &s, samples, None)?.transfer_error;
    let residual = if model.n() == 0 {
        linalg::max_abs_diff(model.matrix(), closed.matrix())
    } else {
        closed
            .find_equivalence(&model)?
            .map_or(f64::INFINITY, |e| e.residual)
    };
    Ok(UniquenessReport {
        model_transfer_error,
        closed_form_transfer_error,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::rational::disc_samples;

    #[test]
    fn identity_map_realization() {
        let b = BlaschkeProduct::new(-ONE, vec![ZERO]).unwrap();
        let u = model_colligation(&b).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!(linalg::max_abs_diff(u.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn product_formulas_match_gram_route() {
        let mut r = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        for n in 1..=6 {
            let b = crate::random::blaschke(&mut r, n, 0.7, 0.2).unwrap();
            let direct = model_colligation(&b).unwrap();
            let gram = model_colligation_gram(&b).unwrap();
            assert!(linalg::max_abs_diff(direct.matrix(), gram.matrix()) < 1e-12);
        }
    }

    #[test]
    fn gram_by_hand() {
        let basis = KernelBasis::new(&[ZERO, c(0.5, 0.0)]).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, c(4.0 / 3.0, 0.0)]);
        assert!(linalg::max_abs_diff(basis.gram(), &expected) < 1e-15);
    }

    #[test]
    fn two_zero_realization_matches() {
        let b = BlaschkeProduct::new(ONE, vec![c(0.3, 0.0), c(0.0, -0.4)]).unwrap();
        let (u, basis) = model_colligation_with_basis(&b).unwrap();
        let samples = disc_samples(30);
        let report = verify_realization(&u, &b.to_rational(), &samples, Some(&basis)).unwrap();
        assert!(report.transfer_error <= 1e-10);
        assert!(report.resolvent_residual.unwrap() <= 1e-12);
        assert!(u.is_minimal().unwrap());
    }

    #[test]
    fn delay_against_identity_map() {
        let u = UnitaryColligation::new(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]))
            .unwrap();
        let s = RationalInner::from_coefficients(vec![ZERO, ONE], vec![ONE]).unwrap();
        let r = verify_realization(&u, &s, &disc_samples(10), None).unwrap();
        assert_eq!(r.transfer_error, 0.0);
    }

    #[test]
    fn uniqueness_examples() {
        let samples = disc_samples(20);
        let b = BlaschkeProduct::new(-ONE, vec![ZERO]).unwrap();
        assert!(realization_uniqueness_check(&b, &samples).unwrap().residual <= 1e-12);
        let b = BlaschkeProduct::new(ONE, vec![c(0.3, 0.0), c(0.0, -0.4)]).unwrap();
        assert!(realization_uniqueness_check(&b, &samples).unwrap().residual <= 1e-9);
        let b = BlaschkeProduct::new(ONE, vec![c(0.5, 0.0), c(0.5 + 1e-6, 0.0)]).unwrap();
        assert!(matches!(
            realization_uniqueness_check(&b, &samples),
            Err(Error::ZerosTooClose { .. })
        ));
    }
}
