//! Exact dense linear algebra over the rationals: reduced row echelon form,
//! rank, kernels, solving, and row-space comparison.
//!
//! Everything here is exact; no operation rounds. Matrices are small and
//! dense, so there is no sparse machinery.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision rational scalar used throughout the crate.
pub type Rational = BigRational;

/// Shorthand for a rational from an integer.
pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `n / d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        RationalMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Matrix with the given shape; entries produced row by row.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(|x| x.is_zero())
    }

    /// Stacks `other` below `self`. Column counts must agree.
    pub fn vstack(&self, other: &RationalMatrix) -> Result<RationalMatrix, AlgebraError> {
        if self.cols != other.cols {
            return Err(AlgebraError::DimensionMismatch(format!(
                "vstack of {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(RationalMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::DimensionMismatch(format!(
                "product of {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + a * b;
                        out.set(r, c, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, AlgebraError> {
        if self.cols != v.len() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}x{} applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Reduced row echelon form together with the pivot column list.
    ///
    /// Pivoting takes the first nonzero entry in column order; with exact
    /// arithmetic no numerical pivoting is needed and the result is the
    /// canonical representative of the row space.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let src = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_zero());
            let src = match src {
                Some(r) => r,
                None => continue,
            };
            m.swap_rows(pivot_row, src);
            let inv = m.get(pivot_row, col).recip();
            m.scale_row(pivot_row, &inv);
            for r in 0..m.rows {
                if r != pivot_row && !m.get(r, col).is_zero() {
                    let factor = m.get(r, col).clone();
                    m.row_axpy(r, pivot_row, &factor);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : Ax = 0}` via the free-variable
    /// parameterization of the rref. Returns `cols - rank` vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Rational::zero(); self.cols];
            vec[free] = Rational::one();
            for col in 0..self.cols {
                if let Some(row) = pivot_set[col] {
                    vec[col] = -r.get(row, free).clone();
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// Some solution of `Ax = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vec<Rational>>, AlgebraError> {
        if b.len() != self.rows {
            return Err(AlgebraError::DimensionMismatch(format!(
                "solve with {} rows and rhs of length {}",
                self.rows,
                b.len()
            )));
        }
        let aug = RationalMatrix::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                b[r].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = r.get(row, self.cols).clone();
        }
        Ok(Some(x))
    }

    /// True iff the two matrices have identical row spaces, decided by
    /// comparing the nonzero rows of their rrefs.
    pub fn row_space_equal(&self, other: &RationalMatrix) -> Result<bool, AlgebraError> {
        if self.cols != other.cols {
            return Err(AlgebraError::DimensionMismatch(format!(
                "row spaces in dimensions {} and {}",
                self.cols, other.cols
            )));
        }
        Ok(self.nonzero_rref_rows() == other.nonzero_rref_rows())
    }

    /// The nonzero rows of the rref, i.e. the canonical basis of the row space.
    pub fn nonzero_rref_rows(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, factor: &Rational) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            if !self.data[idx].is_zero() {
                self.data[idx] = &self.data[idx] * factor;
            }
        }
    }

    /// row[r] -= factor * row[src]
    fn row_axpy(&mut self, r: usize, src: usize, factor: &Rational) {
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c];
            if !v.is_zero() {
                let idx = r * self.cols + c;
                self.data[idx] = &self.data[idx] - factor * v;
            }
        }
    }

    /// CSV dump for debugging; entries as `num/den`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Dot product of two rational slices.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Serializes a rational exactly as decimal strings for numerator and
/// denominator; the wire format shared by every JSON surface of the crate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalRepr {
    fn from(r: &Rational) -> Self {
        RationalRepr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl RationalRepr {
    pub fn to_rational(&self) -> Option<Rational> {
        let num: BigInt = self.num.parse().ok()?;
        let den: BigInt = self.den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    }
}

/// Decimal approximation used only by the CLI's optional `--float` output.
pub fn to_f64(r: &Rational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Scale down in tandem to stay in range for large integers.
    let nf = approx_big(num);
    let df = approx_big(den);
    nf / df
}

fn approx_big(x: &BigInt) -> f64 {
    let s = x.to_string();
    let neg = s.starts_with('-');
    let digits = if neg { &s[1..] } else { &s[..] };
    let mantissa: f64 = digits
        .chars()
        .take(15)
        .collect::<String>()
        .parse()
        .unwrap_or(0.0);
    let extra = digits.len().saturating_sub(15);
    let v = mantissa * 10f64.powi(extra as i32);
    if neg {
        -v
    } else {
        v
    }
}
