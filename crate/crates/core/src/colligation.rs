//! Unitary colligations `U = [A B; C D]` with a one-dimensional exterior
//! channel and an `n`-dimensional state space.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ONE, ZERO};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryColligation {
    matrix: CMatrix,
}

/// Ranks and singular values of the controllability, observability and
/// simplicity matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub rank_controllability: usize,
    pub rank_observability: usize,
    pub rank_simplicity: usize,
    pub singular_values_controllability: Vec<f64>,
    pub singular_values_observability: Vec<f64>,
    pub singular_values_simplicity: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub outputs: Vec<C64>,
    /// `h_0, ..., h_m`, one more than the number of inputs.
    pub states: Vec<CVector>,
}

impl Simulation {
    /// `sum |psi|^2 + |h_m|^2 - sum |phi|^2 - |h_0|^2`.
    pub fn energy_defect(&self, inputs: &[C64]) -> f64 {
        let out: f64 = self.outputs.iter().map(|x| x.norm_sqr()).sum();
        let inp: f64 = inputs.iter().map(|x| x.norm_sqr()).sum();
        let first = self.states.first().map_or(0.0, |h| h.norm_squared());
        let last = self.states.last().map_or(0.0, |h| h.norm_squared());
        out + last - inp - first
    }
}

/// Maximum residuals of the spectral identities over the sampled pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpectralReport {
    /// `(1 - conj(S(zeta)) S(z)) / (1 - conj(zeta) z) = x_zeta^* x_z`
    pub observability_kernel: f64,
    /// `(1 - S(z) conj(S(zeta))) / (1 - z conj(zeta)) = y_z y_zeta^*`
    pub controllability_kernel: f64,
    /// `(S(zeta) - S(z)) / (zeta - z) = y_zeta x_z` and its adjoint form
    pub difference_quotient: f64,
    /// `1 - |S(z)|^2 = (1 - |z|^2) |x_z|^2 = (1 - |z|^2) |y_z|^2`
    pub pointwise: f64,
}

impl SpectralReport {
    pub fn max_residual(&self) -> f64 {
        self.observability_kernel
            .max(self.controllability_kernel)
            .max(self.difference_quotient)
            .max(self.pointwise)
    }
}

/// A state gauge intertwining two colligations.
#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence {
    pub gauge: CMatrix,
    /// `|diag(1,V) U_2 - U_1 diag(1,V)|_max`
    pub residual: f64,
}

impl UnitaryColligation {
    /// Wraps a square matrix of size at least one after checking unitarity
    /// against `tol::UNITARY`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "colligation matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let residual = linalg::unitarity_residual(&matrix);
        if !(residual <= tol::UNITARY) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn a(&self) -> C64 {
        self.matrix[(0, 0)]
    }

    pub fn b(&self) -> CMatrix {
        self.matrix.view((0, 1), (1, self.n())).into_owned()
    }

    pub fn c(&self) -> CMatrix {
        self.matrix.view((1, 0), (self.n(), 1)).into_owned()
    }

    pub fn d(&self) -> CMatrix {
        let n = self.n();
        self.matrix.view((1, 1), (n, n)).into_owned()
    }

    fn resolvent_operator(&self, z: C64) -> CMatrix {
        let n = self.n();
        linalg::identity(n) - self.d() * z
    }

    /// `x_z = (I - zD)^{-1} C`.
    pub fn state_column(&self, z: C64) -> Result<CMatrix> {
        linalg::solve(&self.resolvent_operator(z), &self.c())
    }

    /// `y_z = B (I - zD)^{-1}`, solved through the transposed system.
    pub fn state_row(&self, z: C64) -> Result<CMatrix> {
        let m = self.resolvent_operator(z).transpose();
        Ok(linalg::solve(&m, &self.b().transpose())?.transpose())
    }

    /// `S(z) = A + z B (I - zD)^{-1} C`.
    pub fn characteristic_function(&self, z: C64) -> Result<C64> {
        if self.n() == 0 {
            return Ok(self.a());
        }
        let x = self.state_column(z)?;
        Ok(self.a() + z * (self.b() * x)[(0, 0)])
    }

    pub fn minimality_report(&self) -> MinimalityReport {
        let n = self.n();
        let d = self.d();
        let d_adj = d.adjoint();
        let mut ctrl = CMatrix::zeros(n, n);
        let mut obs = CMatrix::zeros(n, n);
        let mut f = self.c();
        let mut g = self.b().adjoint();
        for k in 0..n {
            ctrl.set_column(k, &f.column(0));
            obs.set_column(k, &g.column(0));
            f = &d * f;
            g = &d_adj * g;
        }
        let mut simple = CMatrix::zeros(n, 2 * n);
        simple.view_mut((0, 0), (n, n)).copy_from(&ctrl);
        simple.view_mut((0, n), (n, n)).copy_from(&obs);

        let sv_c = linalg::singular_values(&ctrl);
        let sv_o = linalg::singular_values(&obs);
        let sv_s = linalg::singular_values(&simple);
        MinimalityReport {
            rank_controllability: linalg::rank_from_singular_values(&sv_c, n),
            rank_observability: linalg::rank_from_singular_values(&sv_o, n),
            rank_simplicity: linalg::rank_from_singular_values(&sv_s, n),
            singular_values_controllability: sv_c,
            singular_values_observability: sv_o,
            singular_values_simplicity: sv_s,
        }
    }

    /// For unitary colligations controllability, observability and
    /// simplicity coincide; disagreement is reported as an internal error.
    pub fn is_minimal(&self) -> Result<bool> {
        let r = self.minimality_report();
        if r.rank_controllability != r.rank_observability
            || r.rank_controllability != r.rank_simplicity
        {
            return Err(Error::InternalInconsistency(format!(
                "ranks disagree for a unitary colligation: {} / {} / {}",
                r.rank_controllability, r.rank_observability, r.rank_simplicity
            )));
        }
        Ok(r.rank_simplicity == self.n())
    }

    pub fn is_simple(&self) -> Result<bool> {
        self.is_minimal()
    }

    /// `diag(1, V*) U diag(1, V)`.
    pub fn apply_state_gauge(&self, v: &CMatrix) -> Result<Self> {
        let n = self.n();
        if v.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.nrows(),
            });
        }
        let residual = linalg::unitarity_residual(v);
        if !(residual <= tol::UNITARY) {
            return Err(Error::NotUnitary { residual });
        }
        Self::new(linalg::state_conjugate(&self.matrix, v))
    }

    /// `A, BC, BDC, ..., B D^{m-2} C`.
    #[allow(clippy::needless_range_loop)]
    pub fn markov_parameters(&self, m: usize) -> Vec<C64> {
        let n = self.n();
        let mut out = Vec::with_capacity(m);
        if m == 0 {
            return out;
        }
        out.push(self.a());
        let mut x: Vec<C64> = (0..n).map(|i| self.matrix[(i + 1, 0)]).collect();
        for _ in 1..m {
            let mut acc = ZERO;
            for j in 0..n {
                acc += self.matrix[(0, j + 1)] * x[j];
            }
            out.push(acc);
            let mut next = vec![ZERO; n];
            for (i, slot) in next.iter_mut().enumerate() {
                for j in 0..n {
                    *slot += self.matrix[(i + 1, j + 1)] * x[j];
                }
            }
            x = next;
        }
        out
    }

    /// Iterates `[psi_k; h_{k+1}] = U [phi_k; h_k]`.
    ///
    /// The accumulation order matches [`UnitaryColligation::markov_parameters`]
    /// so an impulse reproduces the Markov parameters bit for bit.
    #[allow(clippy::needless_range_loop)]
    pub fn simulate_time_domain(&self, inputs: &[C64], h0: &[C64]) -> Result<Simulation> {
        let n = self.n();
        if h0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: h0.len(),
            });
        }
        let mut states = Vec::with_capacity(inputs.len() + 1);
        let mut outputs = Vec::with_capacity(inputs.len());
        let mut h: Vec<C64> = h0.to_vec();
        states.push(DVector::from_vec(h.clone()));
        for phi in inputs {
            let mut psi = self.matrix[(0, 0)] * phi;
            for j in 0..n {
                psi += self.matrix[(0, j + 1)] * h[j];
            }
            let mut next = vec![ZERO; n];
            for (i, slot) in next.iter_mut().enumerate() {
                *slot = self.matrix[(i + 1, 0)] * phi;
                for j in 0..n {
                    *slot += self.matrix[(i + 1, j + 1)] * h[j];
                }
            }
            outputs.push(psi);
            h = next;
            states.push(DVector::from_vec(h.clone()));
        }
        Ok(Simulation { outputs, states })
    }

    /// Evaluates the spectral identities on the pairs `(z_samples[i],
    /// zeta_samples[i])`. The difference quotient is skipped for coincident
    /// points.
    pub fn verify_spectral_identities(
        &self,
        z_samples: &[C64],
        zeta_samples: &[C64],
    ) -> Result<SpectralReport> {
        if z_samples.len() != zeta_samples.len() {
            return Err(Error::DimensionMismatch {
                expected: z_samples.len(),
                found: zeta_samples.len(),
            });
        }
        let mut report = SpectralReport::default();
        for (&z, &zeta) in z_samples.iter().zip(zeta_samples) {
            let s_z = self.characteristic_function(z)?;
            let s_zeta = self.characteristic_function(zeta)?;
            let x_z = self.state_column(z)?;
            let x_zeta = self.state_column(zeta)?;
            let y_z = self.state_row(z)?;
            let y_zeta = self.state_row(zeta)?;

            let lhs = (ONE - s_zeta.conj() * s_z) / (ONE - zeta.conj() * z);
            let rhs = (x_zeta.adjoint() * &x_z)[(0, 0)];
            report.observability_kernel = report.observability_kernel.max((lhs - rhs).norm());

            let lhs = (ONE - s_z * s_zeta.conj()) / (ONE - z * zeta.conj());
            let rhs = (&y_z * y_zeta.adjoint())[(0, 0)];
            report.controllability_kernel = report.controllability_kernel.max((lhs - rhs).norm());

            if (zeta - z).norm() > 1e-6 {
                let lhs = (s_zeta - s_z) / (zeta - z);
                let rhs = (&y_zeta * &x_z)[(0, 0)];
                let rhs_adj = (&y_z * &x_zeta)[(0, 0)];
                let lhs_adj = (s_z - s_zeta) / (z - zeta);
                report.difference_quotient = report
                    .difference_quotient
                    .max((lhs - rhs).norm())
                    .max((lhs_adj - rhs_adj).norm());
            }

            for (w, s_w, x_w, y_w) in [(z, s_z, &x_z, &y_z), (zeta, s_zeta, &x_zeta, &y_zeta)] {
                let lhs = 1.0 - s_w.norm_sqr();
                let weight = 1.0 - w.norm_sqr();
                let via_x = weight * x_w.norm_squared();
                let via_y = weight * y_w.norm_squared();
                report.pointwise = report
                    .pointwise
                    .max((lhs - via_x).abs())
                    .max((lhs - via_y).abs());
            }
        }
        Ok(report)
    }

    /// Finds `V` with `diag(1,V) U_2 = U_1 diag(1,V)` when both colligations
    /// are simple and have the same characteristic function.
    ///
    /// Returns `None` when the Markov parameters differ. Each state space is
    /// given the orthonormal Arnoldi basis of its generating vectors
    /// `C, DC, D^2C, ...`; in that basis both systems coincide, so the
    /// gauge is the change of basis between them.
    pub fn find_equivalence(&self, other: &Self) -> Result<Option<Equivalence>> {
        for col in [self, other] {
            if !col.is_simple()? {
                return Err(Error::NotSimple {
                    rank: col.minimality_report().rank_simplicity,
                    n: col.n(),
                });
            }
        }
        let order = 2 * self.n().max(other.n()).max(1);
        let m1 = self.markov_parameters(order);
        let m2 = other.markov_parameters(order);
        if m1.iter().zip(&m2).any(|(a, b)| (a - b).norm() > tol::ROUND) {
            return Ok(None);
        }
        if self.n() != other.n() {
            return Ok(None);
        }
        let n = self.n();
        let q1 = arnoldi_basis(&self.d(), &self.c());
        let q2 = arnoldi_basis(&other.d(), &other.c());
        let gauge = linalg::polar_unitary(&(q1 * q2.adjoint()));
        debug_assert_eq!(gauge.shape(), (n, n));
        let w = linalg::embed_state(&gauge);
        let residual = linalg::max_abs_diff(&(&w * &other.matrix), &(&self.matrix * &w));
        Ok(Some(Equivalence { gauge, residual }))
    }
}

/// Orthonormal basis of the Krylov space of `(d, c)` with real positive
/// subdiagonal, using two passes of Gram-Schmidt per vector.
fn arnoldi_basis(d: &CMatrix, c: &CMatrix) -> CMatrix {
    let n = d.nrows();
    let mut q = CMatrix::zeros(n, n);
    if n == 0 {
        return q;
    }
    let mut w: CVector = c.column(0).into_owned();
    for k in 0..n {
        for _ in 0..2 {
            for j in 0..k {
                let qj = q.column(j).into_owned();
                let proj = linalg::inner(&w, &qj);
                w -= qj * proj;
            }
        }
        let norm = w.norm();
        q.set_column(k, &(w.clone() / C64::new(norm, 0.0)));
        w = d * q.column(k);
    }
    q
}
