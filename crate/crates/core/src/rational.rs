//! Scalar rational inner functions at the function level.
//!
//! Polynomials are dense coefficient vectors in ascending powers. A
//! [`RationalInner`] keeps its denominator normalized so that `den[0] == 1`.

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};
use crate::tol;

/// `c * prod (z_k - z) / (1 - z conj(z_k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    c: C64,
    zeros: Vec<C64>,
}

impl BlaschkeProduct {
    pub fn new(c: C64, zeros: Vec<C64>) -> Result<Self> {
        if (c.norm() - 1.0).abs() > tol::UNIT {
            return Err(Error::UnitViolation { modulus: c.norm() });
        }
        for z in &zeros {
            if !(z.norm() < 1.0 - tol::DISC) {
                return Err(Error::DiscViolation {
                    value: format!("zero {z}"),
                    modulus: z.norm(),
                });
            }
        }
        Ok(Self { c, zeros })
    }

    pub fn constant(&self) -> C64 {
        self.c
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Evaluates the factored form directly.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let mut value = self.c;
        for zk in &self.zeros {
            let den = ONE - z * zk.conj();
            if den.norm() < tol::POLE {
                return Err(Error::NearPole {
                    modulus: den.norm(),
                });
            }
            value *= (zk - z) / den;
        }
        Ok(value)
    }

    /// Expands numerator and denominator into coefficient form.
    pub fn to_rational(&self) -> RationalInner {
        let mut num = vec![self.c];
        let mut den = vec![ONE];
        for zk in &self.zeros {
            num = poly_mul(&num, &[*zk, -ONE]);
            den = poly_mul(&den, &[ONE, -zk.conj()]);
        }
        RationalInner::from_parts(num, den)
    }
}

/// Inner rational function `num / den` with `den[0] == 1`.
#[derive(Debug, Clone)]
pub struct RationalInner {
    num: Vec<C64>,
    den: Vec<C64>,
    /// Bound on the growth of coefficient rounding accumulated by the Schur
    /// transforms that produced this function; 1 for directly built ones.
    drift: f64,
}

impl PartialEq for RationalInner {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

/// Sampled contractivity/unimodularity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerReport {
    /// `max(|s(z)| - 1, 0)` over disc samples.
    pub disc_excess: f64,
    /// `max ||s(t)| - 1|` over circle samples.
    pub circle_deviation: f64,
    pub tolerance: f64,
}

impl InnerReport {
    pub fn passed(&self) -> bool {
        self.disc_excess <= self.tolerance && self.circle_deviation <= self.tolerance
    }
}

impl RationalInner {
    /// Builds `num / den` after trimming and normalizing `den[0]` to one.
    /// Only structural conditions are checked; see [`RationalInner::checked`].
    pub fn from_coefficients(num: Vec<C64>, den: Vec<C64>) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(Error::InvalidInput("empty coefficient vector".into()));
        }
        if num.iter().chain(den.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let scale = max_modulus(&num).max(max_modulus(&den));
        if !(den[0].norm() > tol::POLE * scale) {
            return Err(Error::NearPole {
                modulus: den[0].norm(),
            });
        }
        Ok(Self::from_parts(num, den))
    }

    /// Like [`RationalInner::from_coefficients`] but also requires the sampled
    /// inner property at `tol::INNER`.
    pub fn checked(num: Vec<C64>, den: Vec<C64>) -> Result<Self> {
        let s = Self::from_coefficients(num, den)?;
        let report = s.is_inner_sampled(tol::INNER);
        if !report.passed() {
            return Err(Error::NotInner {
                disc_excess: report.disc_excess,
                circle_deviation: report.circle_deviation,
            });
        }
        Ok(s)
    }

    pub fn constant(value: C64) -> Self {
        Self {
            num: vec![value],
            den: vec![ONE],
            drift: 1.0,
        }
    }

    fn from_parts(num: Vec<C64>, den: Vec<C64>) -> Self {
        let lead = den[0];
        let mut num: Vec<C64> = num.into_iter().map(|x| x / lead).collect();
        let mut den: Vec<C64> = den.into_iter().map(|x| x / lead).collect();
        den[0] = ONE;
        let scale = max_modulus(&num).max(max_modulus(&den));
        trim(&mut num, scale);
        trim(&mut den, scale);
        Self {
            num,
            den,
            drift: 1.0,
        }
    }

    pub fn numerator(&self) -> &[C64] {
        &self.num
    }

    pub fn denominator(&self) -> &[C64] {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.len().max(self.den.len()) - 1
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        let d = horner(&self.den, z);
        if d.norm() < tol::POLE {
            return Err(Error::NearPole { modulus: d.norm() });
        }
        Ok(horner(&self.num, z) / d)
    }

    /// First `m` Taylor coefficients at the origin, by power-series division.
    pub fn taylor(&self, m: usize) -> Vec<C64> {
        let mut out = Vec::with_capacity(m);
        for k in 0..m {
            let mut acc = self.num.get(k).copied().unwrap_or(ZERO);
            for j in 1..=k.min(self.den.len() - 1) {
                acc -= self.den[j] * out[k - j];
            }
            out.push(acc);
        }
        out
    }

    /// One step of the classical Schur algorithm: `s0 = s(0)` and
    /// `omega = (s - s0) / (z (1 - conj(s0) s))`.
    ///
    /// Coefficient rounding grows by up to `(1 + |s0|) / (1 - |s0|)` per step,
    /// so the cancellation checks accept `TRIM` times the drift inherited from
    /// earlier steps (capped at `ROUND`), and `omega` carries the new drift.
    pub fn schur_transform(&self) -> Result<(C64, RationalInner)> {
        let trim = (tol::TRIM * self.drift).min(tol::ROUND);
        let n = self.degree();
        let s0 = self.num[0];
        if n == 0 || !(s0.norm() < 1.0 - tol::DISC) {
            return Err(Error::Terminal {
                step: 0,
                modulus: s0.norm(),
            });
        }
        let num = padded(&self.num, n + 1);
        let den = padded(&self.den, n + 1);
        let scale = max_modulus(&num).max(max_modulus(&den));

        let shifted: Vec<C64> = num.iter().zip(&den).map(|(p, q)| p - s0 * q).collect();
        if shifted[0].norm() > trim * scale {
            return Err(Error::DegreeDropFailure {
                expected: n - 1,
                found: n,
            });
        }
        let mut den_omega: Vec<C64> = den
            .iter()
            .zip(&num)
            .map(|(q, p)| q - s0.conj() * p)
            .collect();
        if den_omega[n].norm() > trim * scale {
            return Err(Error::DegreeDropFailure {
                expected: n - 1,
                found: n,
            });
        }
        den_omega.truncate(n);
        let num_omega = shifted[1..].to_vec();

        let mut omega = Self::from_parts(num_omega, den_omega);
        omega.drift = self.drift * (1.0 + s0.norm()) / (1.0 - s0.norm());
        if omega.degree() != n - 1 {
            return Err(Error::DegreeDropFailure {
                expected: n - 1,
                found: omega.degree(),
            });
        }
        Ok((s0, omega))
    }

    /// `s = (s0 + z omega) / (1 + conj(s0) z omega)`.
    pub fn inverse_schur_transform(s0: C64, omega: &RationalInner) -> Result<RationalInner> {
        check_disc(s0, "parameter")?;
        let m = omega.degree();
        let a = padded(&omega.num, m + 1);
        let b = padded(&omega.den, m + 1);
        let mut num = vec![ZERO; m + 2];
        let mut den = vec![ZERO; m + 2];
        for k in 0..=m {
            num[k] += s0 * b[k];
            num[k + 1] += a[k];
            den[k] += b[k];
            den[k + 1] += s0.conj() * a[k];
        }
        let mut s = Self::from_parts(num, den);
        s.drift = omega.drift;
        Ok(s)
    }

    pub fn schur_parameters(&self) -> Result<SchurParameterSequence> {
        let mut params = Vec::with_capacity(self.degree() + 1);
        let mut current = self.clone();
        for step in 0..self.degree() {
            let (s, next) = current.schur_transform().map_err(|e| match e {
                Error::Terminal { modulus, .. } => Error::Terminal { step, modulus },
                other => other,
            })?;
            params.push(s);
            current = next;
        }
        // The terminal constant carries the same accumulated drift.
        let last = current.num[0];
        let allowed = (tol::TRIM * current.drift).clamp(tol::UNIT, tol::ROUND);
        if (last.norm() - 1.0).abs() <= allowed {
            params.push(last / last.norm());
        } else {
            params.push(last);
        }
        SchurParameterSequence::new(params)
    }

    pub fn from_schur_parameters(p: &SchurParameterSequence) -> Result<RationalInner> {
        let params = p.as_slice();
        let n = p.degree();
        let mut s = Self::constant(params[n]);
        for k in (0..n).rev() {
            s = Self::inverse_schur_transform(params[k], &s)?;
        }
        Ok(s)
    }

    /// Samples 64 disc points and the 64th roots of unity.
    pub fn is_inner_sampled(&self, tolerance: f64) -> InnerReport {
        let mut disc_excess: f64 = 0.0;
        for z in disc_samples(64) {
            let v = self.eval(z).map(|v| v.norm()).unwrap_or(f64::INFINITY);
            disc_excess = disc_excess.max(v - 1.0);
        }
        let mut circle_deviation: f64 = 0.0;
        for t in circle_samples(64) {
            let v = self.eval(t).map(|v| v.norm()).unwrap_or(f64::INFINITY);
            circle_deviation = circle_deviation.max((v - 1.0).abs());
        }
        InnerReport {
            disc_excess: disc_excess.max(0.0),
            circle_deviation,
            tolerance,
        }
    }
}

/// `s_0, ..., s_n` with `|s_k| < 1` for `k < n` and `|s_n| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurParameterSequence {
    params: Vec<C64>,
}

impl SchurParameterSequence {
    pub fn new(params: Vec<C64>) -> Result<Self> {
        let Some((last, head)) = params.split_last() else {
            return Err(Error::InvalidInput("empty parameter sequence".into()));
        };
        for (k, s) in head.iter().enumerate() {
            check_disc(*s, &format!("s_{k}"))?;
        }
        if !last.is_finite() || (last.norm() - 1.0).abs() > tol::UNIT {
            return Err(Error::UnitViolation {
                modulus: last.norm(),
            });
        }
        Ok(Self { params })
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.params
    }

    pub fn degree(&self) -> usize {
        self.params.len() - 1
    }

    /// `sqrt(1 - |s_k|^2)` for `k < n`.
    pub fn deltas(&self) -> Vec<f64> {
        self.params[..self.degree()]
            .iter()
            .map(|s| (1.0 - s.norm_sqr()).sqrt())
            .collect()
    }
}

pub(crate) fn check_disc(s: C64, what: &str) -> Result<()> {
    if s.is_finite() && s.norm() < 1.0 - tol::DISC {
        Ok(())
    } else {
        Err(Error::DiscViolation {
            value: what.to_string(),
            modulus: s.norm(),
        })
    }
}

/// Deterministic interior points with `|z| <= 0.99`.
pub fn disc_samples(count: usize) -> Vec<C64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|j| {
            let r = 0.99 * ((j as f64 + 0.5) / count as f64).sqrt();
            C64::from_polar(r, golden * j as f64)
        })
        .collect()
}

/// The `count`-th roots of unity.
pub fn circle_samples(count: usize) -> Vec<C64> {
    (0..count)
        .map(|j| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / count as f64))
        .collect()
}

pub fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, a| acc * z + a)
}

pub fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn padded(p: &[C64], len: usize) -> Vec<C64> {
    let mut out = p.to_vec();
    out.resize(len, ZERO);
    out
}

fn max_modulus(p: &[C64]) -> f64 {
    p.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

fn trim(p: &mut Vec<C64>, scale: f64) {
    while p.len() > 1 && p[p.len() - 1].norm() <= tol::TRIM * scale {
        p.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn close(a: C64, b: C64, eps: f64) -> bool {
        (a - b).norm() <= eps
    }

    #[test]
    fn non_inner_input_fails_degree_drop() {
        // (0.5 + 0.3 z) / 1 is contractive but not inner
        let s =
            RationalInner::from_coefficients(vec![c(0.5, 0.0), c(0.3, 0.0)], vec![ONE]).unwrap();
        assert!(matches!(
            s.schur_transform(),
            Err(Error::DegreeDropFailure {
                expected: 0,
                found: 1
            })
        ));
        // a perturbation far below TRIM at the first step is still caught above it
        let m = mobius(0.5);
        let mut num = m.numerator().to_vec();
        num[1] += c(1e-9, 0.0);
        let perturbed = RationalInner::from_coefficients(num, m.denominator().to_vec()).unwrap();
        assert!(perturbed.schur_transform().is_err());
    }

    #[test]
    fn drift_accumulates_along_transforms() {
        let p = SchurParameterSequence::new(vec![c(0.5, 0.0), c(0.0, 0.8), ONE]).unwrap();
        let s = RationalInner::from_schur_parameters(&p).unwrap();
        let (_, w1) = s.schur_transform().unwrap();
        let (_, w2) = w1.schur_transform().unwrap();
        assert!((w1.drift - 3.0).abs() < 1e-12);
        assert!((w2.drift - 27.0).abs() < 1e-12);
    }

    fn mobius(a: f64) -> RationalInner {
        RationalInner::from_coefficients(vec![c(a, 0.0), -ONE], vec![ONE, c(-a, 0.0)]).unwrap()
    }

    #[test]
    fn zero_at_origin_expands_to_identity_map() {
        let b = BlaschkeProduct::new(-ONE, vec![ZERO]).unwrap();
        let s = b.to_rational();
        assert_eq!(s.numerator(), &[ZERO, ONE]);
        assert_eq!(s.denominator(), &[ONE]);
        assert_eq!(s.degree(), 1);
    }

    #[test]
    fn empty_product_is_constant() {
        let s = BlaschkeProduct::new(ONE, vec![]).unwrap().to_rational();
        assert_eq!(s.degree(), 0);
        assert_eq!(s.eval(c(0.3, 0.1)).unwrap(), ONE);
    }

    #[test]
    fn single_zero_expansion() {
        let s = BlaschkeProduct::new(ONE, vec![c(0.5, 0.0)])
            .unwrap()
            .to_rational();
        assert_eq!(s.numerator(), &[c(0.5, 0.0), -ONE]);
        assert_eq!(s.denominator(), &[ONE, c(-0.5, 0.0)]);
    }

    #[test]
    fn rejects_zero_on_circle() {
        let err = BlaschkeProduct::new(ONE, vec![c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::DiscViolation { .. }));
    }

    #[test]
    fn evaluation_examples() {
        let id = RationalInner::from_coefficients(vec![ZERO, ONE], vec![ONE]).unwrap();
        assert_eq!(id.eval(c(0.3, 0.4)).unwrap(), c(0.3, 0.4));
        let m = mobius(0.5);
        assert_eq!(m.eval(ZERO).unwrap(), c(0.5, 0.0));
        assert!(close(m.eval(ONE).unwrap(), -ONE, 1e-15));
    }

    #[test]
    fn pole_is_reported() {
        let s = RationalInner::from_coefficients(vec![ONE], vec![ONE, -ONE]).unwrap();
        assert!(matches!(s.eval(ONE), Err(Error::NearPole { .. })));
    }

    #[test]
    fn transform_of_identity_map() {
        let id = RationalInner::from_coefficients(vec![ZERO, ONE], vec![ONE]).unwrap();
        let (s0, omega) = id.schur_transform().unwrap();
        assert_eq!(s0, ZERO);
        assert_eq!(omega.degree(), 0);
        assert!(close(omega.eval(c(0.2, 0.0)).unwrap(), ONE, 1e-15));
    }

    #[test]
    fn transform_of_mobius_is_minus_one() {
        let (s0, omega) = mobius(0.5).schur_transform().unwrap();
        assert_eq!(s0, c(0.5, 0.0));
        assert_eq!(omega.degree(), 0);
        assert!(close(omega.eval(ZERO).unwrap(), -ONE, 1e-15));
    }

    #[test]
    fn transform_of_two_parameter_function() {
        // (s0 + z s1) / (1 + conj(s0) s1 z) with s0 = 0.5, s1 = i
        let s = RationalInner::from_coefficients(
            vec![c(0.5, 0.0), c(0.0, 1.0)],
            vec![ONE, c(0.0, 0.5)],
        )
        .unwrap();
        let (s0, omega) = s.schur_transform().unwrap();
        assert!(close(s0, c(0.5, 0.0), 1e-15));
        assert_eq!(omega.degree(), 0);
        assert!(close(omega.eval(ZERO).unwrap(), c(0.0, 1.0), 1e-15));
    }

    #[test]
    fn terminal_constant_cannot_transform() {
        let err = RationalInner::constant(ONE).schur_transform().unwrap_err();
        assert!(matches!(err, Error::Terminal { .. }));
    }

    #[test]
    fn inverse_transform_examples() {
        let one = RationalInner::constant(ONE);
        let s = RationalInner::inverse_schur_transform(ZERO, &one).unwrap();
        assert_eq!(s.numerator(), &[ZERO, ONE]);
        assert_eq!(s.denominator(), &[ONE]);

        let s = RationalInner::inverse_schur_transform(c(0.5, 0.0), &RationalInner::constant(-ONE))
            .unwrap();
        assert_eq!(s, mobius(0.5));

        let z = RationalInner::from_coefficients(vec![ZERO, ONE], vec![ONE]).unwrap();
        let s = RationalInner::inverse_schur_transform(ZERO, &z).unwrap();
        assert_eq!(s.numerator(), &[ZERO, ZERO, ONE]);
        assert_eq!(s.degree(), 2);
    }

    #[test]
    fn inverse_transform_rejects_boundary_parameter() {
        let err = RationalInner::inverse_schur_transform(ONE, &RationalInner::constant(ONE));
        assert!(matches!(err, Err(Error::DiscViolation { .. })));
    }

    #[test]
    fn parameter_examples() {
        let z = RationalInner::from_coefficients(vec![ZERO, ONE], vec![ONE]).unwrap();
        assert_eq!(z.schur_parameters().unwrap().as_slice(), &[ZERO, ONE]);
        let z2 = RationalInner::from_coefficients(vec![ZERO, ZERO, ONE], vec![ONE]).unwrap();
        assert_eq!(
            z2.schur_parameters().unwrap().as_slice(),
            &[ZERO, ZERO, ONE]
        );
        let p = mobius(0.5).schur_parameters().unwrap();
        assert!(close(p.as_slice()[0], c(0.5, 0.0), 1e-15));
        assert!(close(p.as_slice()[1], -ONE, 1e-15));
    }

    #[test]
    fn constant_unimodular_has_single_parameter() {
        let p = RationalInner::constant(c(0.0, 1.0))
            .schur_parameters()
            .unwrap();
        assert_eq!(p.as_slice(), &[c(0.0, 1.0)]);
    }

    #[test]
    fn from_parameters_examples() {
        let p = SchurParameterSequence::new(vec![ZERO, ONE]).unwrap();
        let s = RationalInner::from_schur_parameters(&p).unwrap();
        assert_eq!(s.numerator(), &[ZERO, ONE]);
        let p = SchurParameterSequence::new(vec![c(0.5, 0.0), -ONE]).unwrap();
        assert_eq!(
            RationalInner::from_schur_parameters(&p).unwrap(),
            mobius(0.5)
        );
        let p = SchurParameterSequence::new(vec![ZERO, ZERO, ONE]).unwrap();
        let s = RationalInner::from_schur_parameters(&p).unwrap();
        assert_eq!(s.numerator(), &[ZERO, ZERO, ONE]);
    }

    #[test]
    fn parameter_conditions_are_enforced() {
        assert!(matches!(
            SchurParameterSequence::new(vec![c(1.0, 0.0), ONE]),
            Err(Error::DiscViolation { .. })
        ));
        assert!(matches!(
            SchurParameterSequence::new(vec![ZERO, c(0.5, 0.0)]),
            Err(Error::UnitViolation { .. })
        ));
        assert!(SchurParameterSequence::new(vec![]).is_err());
    }

    #[test]
    fn inner_sampling() {
        let z = RationalInner::from_coefficients(vec![ZERO, ONE], vec![ONE]).unwrap();
        let report = z.is_inner_sampled(1e-12);
        assert!(report.passed());
        assert_eq!(report.circle_deviation, 0.0);
        let half = RationalInner::constant(c(0.5, 0.0));
        let report = half.is_inner_sampled(1e-9);
        assert!(!report.passed());
        assert!((report.circle_deviation - 0.5).abs() < 1e-15);
    }

    #[test]
    fn checked_constructor_rejects_non_inner() {
        let err = RationalInner::checked(vec![c(0.5, 0.0)], vec![ONE]).unwrap_err();
        assert!(matches!(err, Error::NotInner { .. }));
    }

    #[test]
    fn taylor_coefficients_of_mobius() {
        // (0.5 - z) / (1 - 0.5 z) = 0.5 - 0.75 z - 0.375 z^2 - ...
        let t = mobius(0.5).taylor(4);
        let expected = [0.5, -0.75, -0.375, -0.1875];
        for (a, b) in t.iter().zip(expected) {
            assert!(close(*a, c(b, 0.0), 1e-15));
        }
    }
}
