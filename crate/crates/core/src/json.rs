//! JSON documents for the public types and a deterministic writer.
//!
//! Complex numbers are `[re, im]`; matrices are row-major nested arrays.

use serde::{Deserialize, Serialize};
use std::io;

use crate::colligation::UnitaryColligation;
use crate::error::{Error, Result};
use crate::hessenberg::HessenbergCertificate;
use crate::linalg::{CMatrix, C64};
use crate::rational::{BlaschkeProduct, RationalInner, SchurParameterSequence};
use crate::redheffer::PartitionedColligation;
use crate::schur_state::SchurStateTrace;

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

pub fn complex(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn from_complex(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

pub fn complexes(v: &[C64]) -> Vec<Complex> {
    v.iter().copied().map(complex).collect()
}

pub fn from_complexes(v: &[Complex]) -> Vec<C64> {
    v.iter().copied().map(from_complex).collect()
}

pub fn matrix(m: &CMatrix) -> Matrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex(m[(i, j)])).collect())
        .collect()
}

pub fn from_matrix(rows: &[Vec<Complex>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidInput("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        from_complex(rows[i][j])
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeJson {
    pub c: Complex,
    pub zeros: Vec<Complex>,
}

impl BlaschkeJson {
    pub fn from_value(b: &BlaschkeProduct) -> Self {
        Self {
            c: complex(b.constant()),
            zeros: complexes(b.zeros()),
        }
    }

    pub fn to_value(&self) -> Result<BlaschkeProduct> {
        BlaschkeProduct::new(from_complex(self.c), from_complexes(&self.zeros))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: Vec<Complex>,
    pub den: Vec<Complex>,
}

impl RationalJson {
    pub fn from_value(s: &RationalInner) -> Self {
        Self {
            num: complexes(s.numerator()),
            den: complexes(s.denominator()),
        }
    }

    pub fn to_value(&self) -> Result<RationalInner> {
        RationalInner::checked(from_complexes(&self.num), from_complexes(&self.den))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub params: Vec<Complex>,
}

impl ParamsJson {
    pub fn from_value(p: &SchurParameterSequence) -> Self {
        Self {
            params: complexes(p.as_slice()),
        }
    }

    pub fn to_value(&self) -> Result<SchurParameterSequence> {
        SchurParameterSequence::new(from_complexes(&self.params))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColligationJson {
    pub n: usize,
    pub matrix: Matrix,
}

impl ColligationJson {
    pub fn from_value(u: &UnitaryColligation) -> Self {
        Self {
            n: u.n(),
            matrix: matrix(u.matrix()),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let m = from_matrix(&self.matrix)?;
        if m.nrows() != self.n + 1 || m.ncols() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                found: m.nrows(),
            });
        }
        Ok(m)
    }

    pub fn to_value(&self) -> Result<UnitaryColligation> {
        UnitaryColligation::new(self.to_matrix()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsJson {
    pub e1: usize,
    pub e2: usize,
    pub h: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionedJson {
    pub dims: DimsJson,
    pub matrix: Matrix,
}

impl PartitionedJson {
    pub fn from_value(p: &PartitionedColligation) -> Self {
        let (e1, e2, h) = p.dims();
        Self {
            dims: DimsJson { e1, e2, h },
            matrix: matrix(p.matrix()),
        }
    }

    pub fn to_value(&self) -> Result<PartitionedColligation> {
        PartitionedColligation::new(
            self.dims.e1,
            self.dims.e2,
            self.dims.h,
            from_matrix(&self.matrix)?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub parameters: Vec<Complex>,
    pub matrices: Vec<Matrix>,
    pub denominators: Vec<Vec<Complex>>,
}

impl TraceJson {
    pub fn from_value(t: &SchurStateTrace) -> Self {
        Self {
            parameters: complexes(&t.parameters),
            matrices: t.matrices.iter().map(matrix).collect(),
            denominators: t.denominators.iter().map(|d| complexes(d)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    #[serde(rename = "H")]
    pub h: Matrix,
    #[serde(rename = "V")]
    pub v: Matrix,
    pub orientation: String,
    pub band: Vec<f64>,
}

impl CertificateJson {
    pub fn from_value(c: &HessenbergCertificate) -> Self {
        Self {
            h: matrix(&c.h),
            v: matrix(&c.v),
            orientation: c.orientation.as_str().to_string(),
            band: c.band.clone(),
        }
    }
}

/// Compact formatter writing every float with 17 significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedPrecision;

impl serde_json::ser::Formatter for FixedPrecision {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // -0.0 and 0.0 print the same so equal results compare byte-equal
        let value = if value == 0.0 { 0.0 } else { value };
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` byte-for-byte reproducibly.
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedPrecision);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    String::from_utf8(out).map_err(|e| Error::InvalidInput(e.to_string()))
}
