use std::fmt;

use num_traits::Zero;
use serde_json::Value;

use super::ring::{scalar_json, Ring, Scalar};
use crate::error::{Error, Result};

/// Dense row-major matrix over a coefficient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            ring,
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = ring.one();
        }
        m
    }

    pub fn from_fn(
        ring: Ring,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix {
            ring,
            rows,
            cols,
            data,
        }
    }

    pub fn from_i64_rows(ring: Ring, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(ring, rows.len(), cols, |i, j| ring.from_i64(rows[i][j]))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(ring: Ring, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(ring, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        *x == self.ring.one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ring = self.ring;
        let mut out = Self::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = ring.add(&out.data[idx], &ring.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let ring = self.ring;
        let mut out = vec![Scalar::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                ring.add_mul_assign(o, self.get(i, j), x);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.zip_with(other, |r, a, b| r.add(a, b))
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.zip_with(other, |r, a, b| r.sub(a, b))
    }

    fn zip_with(
        &self,
        other: &ExactMatrix,
        f: impl Fn(&Ring, &Scalar, &Scalar) -> Scalar,
    ) -> Result<ExactMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(&self.ring, a, b))
            .collect();
        Ok(ExactMatrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: &Scalar) -> ExactMatrix {
        let data = self.data.iter().map(|a| self.ring.mul(a, c)).collect();
        ExactMatrix {
            data,
            ..self.clone()
        }
    }

    pub fn neg(&self) -> ExactMatrix {
        self.scale(&self.ring.from_i64(-1))
    }

    /// Columns `range` as a new matrix.
    pub fn select_columns(&self, range: std::ops::Range<usize>) -> ExactMatrix {
        Self::from_fn(self.ring, self.rows, range.len(), |i, j| {
            self.get(i, range.start + j).clone()
        })
    }

    pub fn select_rows(&self, range: std::ops::Range<usize>) -> ExactMatrix {
        Self::from_fn(self.ring, range.len(), self.cols, |i, j| {
            self.get(range.start + i, j).clone()
        })
    }

    /// Horizontal concatenation.
    pub fn hstack(parts: &[&ExactMatrix]) -> Result<ExactMatrix> {
        let ring = parts
            .first()
            .map(|m| m.ring)
            .ok_or_else(|| Error::DimensionMismatch("empty hstack".into()))?;
        let rows = parts[0].rows;
        if parts.iter().any(|m| m.rows != rows) {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(ring, rows, cols);
        let mut off = 0;
        for m in parts {
            for i in 0..rows {
                for j in 0..m.cols {
                    out.data[i * cols + off + j] = m.get(i, j).clone();
                }
            }
            off += m.cols;
        }
        Ok(out)
    }

    /// Vertical concatenation.
    pub fn vstack(parts: &[&ExactMatrix]) -> Result<ExactMatrix> {
        let ring = parts
            .first()
            .map(|m| m.ring)
            .ok_or_else(|| Error::DimensionMismatch("empty vstack".into()))?;
        let cols = parts[0].cols;
        if parts.iter().any(|m| m.cols != cols) {
            return Err(Error::DimensionMismatch(
                "vstack column counts differ".into(),
            ));
        }
        let mut data = Vec::new();
        for m in parts {
            data.extend(m.data.iter().cloned());
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        Ok(ExactMatrix {
            ring,
            rows,
            cols,
            data,
        })
    }

    /// Kronecker product; row `(i, k)` of the result is `i * other.rows + k`.
    pub fn kron(&self, other: &ExactMatrix) -> ExactMatrix {
        let ring = self.ring;
        Self::from_fn(
            ring,
            self.rows * other.rows,
            self.cols * other.cols,
            |r, c| {
                let a = self.get(r / other.rows, c / other.cols);
                if a.is_zero() {
                    return Scalar::zero();
                }
                ring.mul(a, other.get(r % other.rows, c % other.cols))
            },
        )
    }

    /// Same entries reinterpreted over another ring (via the canonical map).
    pub fn change_ring(&self, ring: Ring) -> Result<ExactMatrix> {
        let data = self
            .data
            .iter()
            .map(|x| ring.element(x))
            .collect::<Result<_>>()?;
        Ok(ExactMatrix {
            ring,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    // Elementary operations, used by the normal-form routines.

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += f * row[src]`
    pub(crate) fn add_row_multiple(&mut self, target: usize, src: usize, f: &Scalar) {
        if f.is_zero() {
            return;
        }
        let ring = self.ring;
        let cols = self.cols;
        for j in 0..cols {
            let s = &self.data[src * cols + j];
            if s.is_zero() {
                continue;
            }
            let prod = ring.mul(s, f);
            let t = &mut self.data[target * cols + j];
            *t = ring.add(t, &prod);
        }
    }

    /// `col[target] += f * col[src]`
    pub(crate) fn add_col_multiple(&mut self, target: usize, src: usize, f: &Scalar) {
        if f.is_zero() {
            return;
        }
        let ring = self.ring;
        let cols = self.cols;
        for i in 0..self.rows {
            let s = &self.data[i * cols + src];
            if s.is_zero() {
                continue;
            }
            let prod = ring.mul(s, f);
            let t = &mut self.data[i * cols + target];
            *t = ring.add(t, &prod);
        }
    }

    pub(crate) fn scale_row(&mut self, i: usize, u: &Scalar) {
        let ring = self.ring;
        for j in 0..self.cols {
            let t = &mut self.data[i * self.cols + j];
            if !t.is_zero() {
                *t = ring.mul(t, u);
            }
        }
    }

    pub(crate) fn scale_col(&mut self, j: usize, u: &Scalar) {
        let ring = self.ring;
        for i in 0..self.rows {
            let t = &mut self.data[i * self.cols + j];
            if !t.is_zero() {
                *t = ring.mul(t, u);
            }
        }
    }

    /// Rows as JSON arrays of scalars.
    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array(self.row(i).iter().map(scalar_json::to_value).collect()))
                .collect(),
        )
    }

    /// Parses a row list, checking it against the expected shape. A matrix
    /// with zero rows is written as `[]`.
    pub fn from_json_rows(ring: Ring, v: &Value, rows: usize, cols: usize) -> Result<ExactMatrix> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Format("matrix must be a list of rows".into()))?;
        if arr.len() != rows {
            return Err(Error::Format(format!(
                "expected {rows} rows, found {}",
                arr.len()
            )));
        }
        let mut m = Self::zeros(ring, rows, cols);
        for (i, r) in arr.iter().enumerate() {
            let r = r
                .as_array()
                .ok_or_else(|| Error::Format("matrix row must be a list".into()))?;
            if r.len() != cols {
                return Err(Error::Format(format!(
                    "row {i}: expected {cols} entries, found {}",
                    r.len()
                )));
            }
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, ring.element(&scalar_json::from_value(x)?)?);
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix[{}; {}x{}]", self.ring, self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Free-standing helpers for coordinate vectors.
pub mod vector {
    use super::*;

    pub fn zeros(n: usize) -> Vec<Scalar> {
        vec![Scalar::zero(); n]
    }

    pub fn unit(ring: Ring, n: usize, i: usize) -> Vec<Scalar> {
        let mut v = zeros(n);
        v[i] = ring.one();
        v
    }

    pub fn is_zero(v: &[Scalar]) -> bool {
        v.iter().all(Zero::is_zero)
    }

    pub fn add(ring: Ring, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(a.len(), b.len(), "vector length mismatch");
        a.iter().zip(b).map(|(x, y)| ring.add(x, y)).collect()
    }

    pub fn sub(ring: Ring, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(a.len(), b.len(), "vector length mismatch");
        a.iter().zip(b).map(|(x, y)| ring.sub(x, y)).collect()
    }

    pub fn scale(ring: Ring, a: &[Scalar], c: &Scalar) -> Vec<Scalar> {
        a.iter().map(|x| ring.mul(x, c)).collect()
    }

    /// `acc += c * a`
    pub fn axpy(ring: Ring, acc: &mut [Scalar], c: &Scalar, a: &[Scalar]) {
        assert_eq!(acc.len(), a.len(), "vector length mismatch");
        if c.is_zero() {
            return;
        }
        for (t, x) in acc.iter_mut().zip(a) {
            ring.add_mul_assign(t, c, x);
        }
    }

    pub fn dot(ring: Ring, a: &[Scalar], b: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (x, y) in a.iter().zip(b) {
            ring.add_mul_assign(&mut acc, x, y);
        }
        acc
    }

    pub fn from_i64(ring: Ring, xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| ring.from_i64(x)).collect()
    }

    pub fn to_json(v: &[Scalar]) -> Value {
        Value::Array(v.iter().map(scalar_json::to_value).collect())
    }

    pub fn from_json(ring: Ring, v: &Value) -> Result<Vec<Scalar>> {
        v.as_array()
            .ok_or_else(|| Error::Format("expected a list of scalars".into()))?
            .iter()
            .map(|x| ring.element(&scalar_json::from_value(x)?))
            .collect()
    }
}
