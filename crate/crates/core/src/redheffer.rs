//! Feedback (Redheffer) coupling of colligations and the elementary Schur
//! section.
//!
//! A partitioned colligation has two exterior channels and one state space,
//! ordered `(e1, e2, h)`:
//!
//! ```text
//! [a11 a12 b1]
//! [a21 a22 b2]
//! [c1  c2  d ]
//! ```
//!
//! Channel 2 is closed through a second colligation `[alpha beta; gamma delta]`.

use crate::colligation::UnitaryColligation;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::rational::check_disc;
use crate::tol;

/// `S11 + S12 omega (1 - S22 omega)^{-1} S21`.
pub fn redheffer_transform(s11: C64, s12: C64, s21: C64, s22: C64, omega: C64) -> Result<C64> {
    let feedback = ONE - s22 * omega;
    if feedback.norm() <= tol::FEEDBACK {
        return Err(Error::FeedbackSingular {
            modulus: feedback.norm(),
        });
    }
    Ok(s11 + s12 * omega / feedback * s21)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedColligation {
    h: usize,
    matrix: CMatrix,
}

impl PartitionedColligation {
    /// Only scalar channels `e1 = e2 = 1` are supported.
    pub fn new(e1: usize, e2: usize, h: usize, matrix: CMatrix) -> Result<Self> {
        if e1 != 1 || e2 != 1 {
            return Err(Error::InvalidInput(format!(
                "only scalar exterior channels are supported, got e1={e1}, e2={e2}"
            )));
        }
        let size = 2 + h;
        if matrix.shape() != (size, size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: matrix.nrows(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let residual = linalg::unitarity_residual(&matrix);
        if !(residual <= tol::UNITARY) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { h, matrix })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (1, 1, self.h)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// 2x2 characteristic matrix `A + z B (I - zD)^{-1} C` with exterior
    /// blocks `A = [a11 a12; a21 a22]`, `B = [b1; b2]`, `C = [c1 c2]`.
    pub fn characteristic_matrix(&self, z: C64) -> Result<[[C64; 2]; 2]> {
        let h = self.h;
        let a = self.matrix.view((0, 0), (2, 2)).into_owned();
        if h == 0 {
            return Ok([[a[(0, 0)], a[(0, 1)]], [a[(1, 0)], a[(1, 1)]]]);
        }
        let b = self.matrix.view((0, 2), (2, h)).into_owned();
        let c = self.matrix.view((2, 0), (h, 2)).into_owned();
        let d = self.matrix.view((2, 2), (h, h)).into_owned();
        let x = linalg::solve(&(linalg::identity(h) - d * z), &c)?;
        let s = a + b * x * z;
        Ok([[s[(0, 0)], s[(0, 1)]], [s[(1, 0)], s[(1, 1)]]])
    }
}

/// The 3x3 section `[[s0, 0, D], [D, 0, -conj(s0)], [0, 1, 0]]` with
/// `D = sqrt(1 - |s0|^2)`, whose characteristic matrix is
/// `[[s0, zD], [D, -z conj(s0)]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurSection {
    s0: C64,
    colligation: PartitionedColligation,
}

impl SchurSection {
    pub fn new(s0: C64) -> Result<Self> {
        check_disc(s0, "section parameter")?;
        let delta = C64::new((1.0 - s0.norm_sqr()).sqrt(), 0.0);
        let matrix = CMatrix::from_row_slice(
            3,
            3,
            &[s0, ZERO, delta, delta, ZERO, -s0.conj(), ZERO, ONE, ZERO],
        );
        Ok(Self {
            s0,
            colligation: PartitionedColligation::new(1, 1, 1, matrix)?,
        })
    }

    pub fn s0(&self) -> C64 {
        self.s0
    }

    pub fn colligation(&self) -> &PartitionedColligation {
        &self.colligation
    }

    pub fn matrix(&self) -> &CMatrix {
        self.colligation.matrix()
    }
}

pub fn elementary_schur_section(s0: C64) -> Result<SchurSection> {
    SchurSection::new(s0)
}

/// Closes channel 2 of `u1` through `u2`; the state of the result is the
/// state of `u1` followed by the state of `u2`.
pub fn redheffer_product(
    u1: &PartitionedColligation,
    u2: &UnitaryColligation,
) -> Result<UnitaryColligation> {
    let h1 = u1.h;
    let h2 = u2.n();
    let m = u1.matrix();
    let (a11, a12, a21, a22) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let b1 = m.view((0, 2), (1, h1));
    let b2 = m.view((1, 2), (1, h1));
    let c1 = m.view((2, 0), (h1, 1));
    let c2 = m.view((2, 1), (h1, 1));
    let d = m.view((2, 2), (h1, h1));
    let alpha = u2.a();
    let beta = u2.b();
    let gamma = u2.c();
    let delta = u2.d();

    let feedback = ONE - a22 * alpha;
    if feedback.norm() <= tol::FEEDBACK {
        return Err(Error::FeedbackSingular {
            modulus: feedback.norm(),
        });
    }

    let size = 1 + h1 + h2;
    let mut out = CMatrix::zeros(size, size);
    out[(0, 0)] = a11;
    out.view_mut((0, 1), (1, h1)).copy_from(&b1);
    out.view_mut((0, 1 + h1), (1, h2)).copy_from(&(&beta * a12));
    out.view_mut((1, 0), (h1, 1)).copy_from(&c1);
    out.view_mut((1, 1), (h1, h1)).copy_from(&d);
    out.view_mut((1, 1 + h1), (h1, h2)).copy_from(&(c2 * &beta));
    out.view_mut((1 + h1, 1 + h1), (h2, h2)).copy_from(&delta);

    // rank-one feedback term: [a12 alpha; c2 alpha; gamma] (1 - a22 alpha)^{-1} [a21, b2, a22 beta]
    let mut left = CMatrix::zeros(size, 1);
    left[(0, 0)] = a12 * alpha;
    left.view_mut((1, 0), (h1, 1)).copy_from(&(c2 * alpha));
    left.view_mut((1 + h1, 0), (h2, 1)).copy_from(&gamma);
    let mut right = CMatrix::zeros(1, size);
    right[(0, 0)] = a21;
    right.view_mut((0, 1), (1, h1)).copy_from(&b2);
    right
        .view_mut((0, 1 + h1), (1, h2))
        .copy_from(&(beta * a22));
    out += left * right / feedback;

    UnitaryColligation::new(out)
}

/// `diag(1, U_omega) G(s0)` where `G(s0)` is the elementary rotation
/// `[[s0, D], [D, -conj(s0)]]` in coordinates `(0, 1)`. The result realizes
/// the inverse Schur transform of the function realized by `u_omega`, and
/// its `B` row is `[D, 0, ..., 0]`.
pub fn inverse_schur_colligation(
    s0: C64,
    u_omega: &UnitaryColligation,
) -> Result<UnitaryColligation> {
    check_disc(s0, "s0")?;
    let delta = (1.0 - s0.norm_sqr()).sqrt();
    let w = u_omega.matrix();
    let m = w.nrows();
    let mut out = CMatrix::zeros(m + 1, m + 1);
    out[(0, 0)] = s0;
    out[(0, 1)] = C64::new(delta, 0.0);
    for i in 0..m {
        out[(i + 1, 0)] = w[(i, 0)] * delta;
        out[(i + 1, 1)] = -w[(i, 0)] * s0.conj();
        for k in 1..m {
            out[(i + 1, k + 1)] = w[(i, k)];
        }
    }
    UnitaryColligation::new(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeFamilyReport {
    /// `|U^{eps,v} - diag(1, V*) U diag(1, V)|_max` with `V = diag(eps, v)`.
    pub closed_form_residual: f64,
    /// Deviation of the `B` row from `[eps D, 0, ..., 0]`.
    pub b_row_residual: f64,
    /// Characteristic-function change over the disc samples.
    pub invariance_residual: f64,
}

/// Compares the explicit entries of the gauged inverse-Schur colligation
/// with the gauge action of `V = diag(eps, v)`.
pub fn verify_gauge_family(
    s0: C64,
    u_omega: &UnitaryColligation,
    epsilon: C64,
    v: &CMatrix,
    samples: &[C64],
) -> Result<GaugeFamilyReport> {
    if (epsilon.norm() - 1.0).abs() > tol::UNIT {
        return Err(Error::UnitViolation {
            modulus: epsilon.norm(),
        });
    }
    let k = u_omega.n();
    if v.shape() != (k, k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: v.nrows(),
        });
    }
    let u = inverse_schur_colligation(s0, u_omega)?;
    let mut gauge = CMatrix::zeros(k + 1, k + 1);
    gauge[(0, 0)] = epsilon;
    gauge.view_mut((1, 1), (k, k)).copy_from(v);
    let gauged = u.apply_state_gauge(&gauge)?;

    let delta = (1.0 - s0.norm_sqr()).sqrt();
    let alpha = u_omega.a();
    let beta = u_omega.b();
    let gamma = u_omega.c();
    let dd = u_omega.d();
    let eb = epsilon.conj();
    let mut closed = CMatrix::zeros(k + 2, k + 2);
    closed[(0, 0)] = s0;
    closed[(0, 1)] = epsilon * delta;
    closed[(1, 0)] = eb * alpha * delta;
    closed[(1, 1)] = -alpha * s0.conj();
    closed.view_mut((1, 2), (1, k)).copy_from(&(&beta * v * eb));
    let vg = v.adjoint() * &gamma;
    closed
        .view_mut((2, 0), (k, 1))
        .copy_from(&(&vg * C64::new(delta, 0.0)));
    closed
        .view_mut((2, 1), (k, 1))
        .copy_from(&(&vg * (-epsilon * s0.conj())));
    closed
        .view_mut((2, 2), (k, k))
        .copy_from(&(v.adjoint() * dd * v));

    let closed_form_residual = linalg::max_abs_diff(&closed, gauged.matrix());
    let b = gauged.b();
    let mut b_row_residual = (b[(0, 0)] - epsilon * delta).norm();
    for j in 1..b.ncols() {
        b_row_residual = b_row_residual.max(b[(0, j)].norm());
    }
    let mut invariance_residual: f64 = 0.0;
    for &z in samples {
        let diff = gauged.characteristic_function(z)? - u.characteristic_function(z)?;
        invariance_residual = invariance_residual.max(diff.norm());
    }
    Ok(GaugeFamilyReport {
        closed_form_residual,
        b_row_residual,
        invariance_residual,
    })
}
