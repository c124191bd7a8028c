//! Dense square complex matrices with an optional triangular shape tag.

use crate::error::{QsError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Tolerance used when a shape tag is verified.
pub const SHAPE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    General,
    UpperUnipotent,
    LowerUnipotent,
    Diagonal,
}

/// Square complex matrix of dimension `n + 1` in every use inside the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub data: DMatrix<C64>,
    pub shape: Shape,
}

impl CMatrix {
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { data: DMatrix::from_fn(dim, dim, f), shape: Shape::General }
    }

    /// Fallible constructor; entries are computed row-major.
    pub fn try_from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Result<C64>) -> Result<Self> {
        let mut m = DMatrix::zeros(dim, dim);
        for r in 0..dim {
            for s in 0..dim {
                m[(r, s)] = f(r, s)?;
            }
        }
        Ok(Self { data: m, shape: Shape::General })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: DMatrix::zeros(dim, dim), shape: Shape::General }
    }

    pub fn identity(dim: usize) -> Self {
        Self { data: DMatrix::identity(dim, dim), shape: Shape::Diagonal }
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let n = d.len();
        Self::from_fn(n, |r, s| if r == s { d[r] } else { C64::new(0.0, 0.0) }).tagged_unchecked(Shape::Diagonal)
    }

    /// Anti-diagonal permutation `J` with entries `δ_{r, dim-1-s}`.
    pub fn exchange(dim: usize) -> Self {
        Self::from_fn(dim, |r, s| if r + s + 1 == dim { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, r: usize, s: usize) -> C64 {
        self.data[(r, s)]
    }

    fn tagged_unchecked(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    /// Attach a shape tag after checking it holds to [`SHAPE_TOL`].
    pub fn with_shape(self, shape: Shape) -> Result<Self> {
        let n = self.dim();
        let scale = self.max_abs().max(1.0);
        let tol = SHAPE_TOL * scale;
        let unit = |m: &Self| (0..n).all(|i| (m.get(i, i) - C64::new(1.0, 0.0)).norm() <= SHAPE_TOL);
        let ok = match shape {
            Shape::General => true,
            Shape::Diagonal => (0..n).all(|r| (0..n).all(|s| r == s || self.get(r, s).norm() <= tol)),
            Shape::UpperUnipotent => unit(&self) && (0..n).all(|r| (0..r).all(|s| self.get(r, s).norm() <= tol)),
            Shape::LowerUnipotent => unit(&self) && (0..n).all(|r| (r + 1..n).all(|s| self.get(r, s).norm() <= tol)),
        };
        if ok {
            Ok(self.tagged_unchecked(shape))
        } else {
            Err(QsError::domain(format!("matrix does not have shape {shape:?}")))
        }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        CMatrix { data: &self.data * &other.data, shape: Shape::General }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        CMatrix { data: &self.data + &other.data, shape: Shape::General }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        CMatrix { data: &self.data - &other.data, shape: Shape::General }
    }

    pub fn scale(&self, z: C64) -> CMatrix {
        CMatrix { data: &self.data * z, shape: Shape::General }
    }

    /// Product of a chain of matrices, left to right.
    pub fn chain(ms: &[&CMatrix]) -> CMatrix {
        let mut acc = ms[0].clone();
        for m in &ms[1..] {
            acc = acc.mul(m);
        }
        acc
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        self.data
            .clone()
            .try_inverse()
            .map(|data| CMatrix { data, shape: Shape::General })
            .ok_or_else(|| QsError::singular("matrix inverse", self.dim() as i64))
    }

    pub fn det(&self) -> C64 {
        self.data.determinant()
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix { data: self.data.transpose(), shape: Shape::General }
    }

    /// `J M J`: reverse both row and column order.
    pub fn reversed(&self) -> CMatrix {
        let n = self.dim();
        let shape = match self.shape {
            Shape::UpperUnipotent => Shape::LowerUnipotent,
            Shape::LowerUnipotent => Shape::UpperUnipotent,
            s => s,
        };
        CMatrix { data: DMatrix::from_fn(n, n, |r, s| self.data[(n - 1 - r, n - 1 - s)]), shape }
    }

    pub fn diag_entries(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    /// Diagonal matrix times a unipotent matrix: returns `(D, D^{-1} M)` with
    /// rows normalised by their diagonal entries.
    pub fn split_row_diagonal(&self) -> Result<(CMatrix, CMatrix)> {
        let d = self.diag_entries();
        if let Some(i) = d.iter().position(|z| z.norm() == 0.0) {
            return Err(QsError::singular("diagonal entry", i as i64));
        }
        let n = self.dim();
        let u = CMatrix::from_fn(n, |r, s| self.get(r, s) / d[r]);
        Ok((CMatrix::diagonal(&d), u))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |A - B|` divided by `max(1, max |B|)`.
    pub fn rel_diff(&self, other: &CMatrix) -> f64 {
        self.sub(other).max_abs() / other.max_abs().max(1.0)
    }

    /// `max |A - B|` divided by `max |B|`.
    pub fn rel_diff_scaled(&self, other: &CMatrix) -> f64 {
        let s = other.max_abs();
        if s == 0.0 {
            self.max_abs()
        } else {
            self.sub(other).max_abs() / s
        }
    }

    /// Row-major array of `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim()).map(|r| (0..self.dim()).map(|s| [self.get(r, s).re, self.get(r, s).im]).collect()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "dim": self.dim(), "shape": self.shape, "data": self.to_pairs() })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<CMatrix> {
        let rows: Vec<Vec<[f64; 2]>> =
            serde_json::from_value(v["data"].clone()).map_err(|e| QsError::domain(format!("bad matrix JSON: {e}")))?;
        let n = rows.len();
        if rows.iter().any(|row| row.len() != n) {
            return Err(QsError::domain("matrix JSON must be square"));
        }
        let shape: Shape = serde_json::from_value(v["shape"].clone()).unwrap_or(Shape::General);
        CMatrix::from_fn(n, |r, s| C64::new(rows[r][s][0], rows[r][s][1])).with_shape(shape)
    }

    /// CSV rows `row,col,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for r in 0..self.dim() {
            for s in 0..self.dim() {
                let z = self.get(r, s);
                out.push_str(&format!("{r},{s},{:e},{:e}\n", z.re, z.im));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exchange_reverses() {
        let m = CMatrix::from_fn(3, |r, s| C64::new((3 * r + s) as f64, 0.0));
        let j = CMatrix::exchange(3);
        assert_eq!(j.mul(&m).mul(&j), m.reversed());
    }

    #[test]
    fn shape_checks() {
        let u = CMatrix::from_fn(3, |r, s| {
            if r == s {
                C64::new(1.0, 0.0)
            } else if s > r {
                C64::new(2.0, 1.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert!(u.clone().with_shape(Shape::UpperUnipotent).is_ok());
        assert!(u.clone().with_shape(Shape::LowerUnipotent).is_err());
        assert_eq!(u.with_shape(Shape::UpperUnipotent).unwrap().reversed().shape, Shape::LowerUnipotent);
    }

    #[test]
    fn json_round_trip() {
        let m = CMatrix::from_fn(2, |r, s| C64::new(r as f64 + 0.5, s as f64 - 0.25));
        let back = CMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
