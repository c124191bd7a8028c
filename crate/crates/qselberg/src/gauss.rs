//! Closed-form matrix builders: both Gauss decompositions of the R-matrix
//! `R21(x2/x1)`, its inverse partner `R12`, the q-KZ matrices `K`, `K1`,
//! `K2`, the α̃-shift matrix `A` in two normalisations, their determinants,
//! and generic unipotent-diagonal-unipotent factorisations.

use crate::error::{QsError, Result};
use crate::matrix::{CMatrix, Shape};
use crate::params::ParamSet;
use crate::qseries::{ipow, qbinom, qpoch_den, qpoch_int, sign};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorOrder {
    /// upper-unipotent · diagonal · lower-unipotent
    Udl,
    /// lower-unipotent · diagonal · upper-unipotent
    Ldu,
}

/// `left · middle · right` with unipotent outer factors.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussFactors {
    pub left: CMatrix,
    pub middle: CMatrix,
    pub right: CMatrix,
    pub order: FactorOrder,
}

impl GaussFactors {
    pub fn product(&self) -> CMatrix {
        CMatrix::chain(&[&self.left, &self.middle, &self.right])
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order,
            "left": self.left.to_json(),
            "middle": self.middle.to_json(),
            "right": self.right.to_json(),
        })
    }
}

fn upper(dim: usize, f: impl FnMut(usize, usize) -> Result<C64>) -> Result<CMatrix> {
    triangular(dim, true, f)?.with_shape(Shape::UpperUnipotent)
}

fn lower(dim: usize, f: impl FnMut(usize, usize) -> Result<C64>) -> Result<CMatrix> {
    triangular(dim, false, f)?.with_shape(Shape::LowerUnipotent)
}

fn triangular(dim: usize, up: bool, mut f: impl FnMut(usize, usize) -> Result<C64>) -> Result<CMatrix> {
    CMatrix::try_from_fn(dim, |r, s| if (up && s >= r) || (!up && s <= r) { f(r, s) } else { Ok(C64::new(0.0, 0.0)) })
}

fn diagonal(dim: usize, mut f: impl FnMut(usize) -> Result<C64>) -> Result<CMatrix> {
    let d = (0..dim).map(&mut f).collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::diagonal(&d))
}

/// Factors `U_R D_R L_R` of `R21(x2/x1)`.
pub fn r21_udl(p: &ParamSet) -> Result<GaussFactors> {
    let n = p.n as i64;
    let (b1, b2, c, w) = (p.b1, p.b2, p.c, p.w());
    let x = w * b1 / b2;
    let dim = p.n + 1;
    let left = upper(dim, |r, s| {
        let (r, s) = (r as i64, s as i64);
        let k = s - r;
        Ok(sign(k)
            * ipow(w / b2, k)
            * ipow(c, -(k * (s + r - 1)) / 2)
            * qbinom(c, s, k, r)?
            * qpoch_int(b1 * ipow(c, n - s), c, k)?
            / qpoch_den(x * ipow(c, n - 2 * s + 1), c, k, "U_R denominator")?)
    })?;
    let middle = diagonal(dim, |r| {
        let r = r as i64;
        Ok(ipow(b2, -(n - r)) * ipow(c, -r * (n - r)) * qpoch_int(w * b1, c, n - r)?
            / qpoch_den(w / b2 * ipow(c, -(r - 1)), c, r, "D_R denominator")?
            * qpoch_int(x * ipow(c, n - 2 * r + 1), c, r)?
            / qpoch_den(x * ipow(c, -r), c, n - r, "D_R denominator")?)
    })?;
    let right = lower(dim, |r, s| {
        let (r, s) = (r as i64, s as i64);
        let k = r - s;
        Ok(sign(k)
            * ipow(b2, -k)
            * ipow(c, -(k * (r + s - 1)) / 2)
            * qbinom(c, n - s, k, n - r)?
            * qpoch_int(b2 * ipow(c, s), c, k)?
            / qpoch_den(x * ipow(c, n - 2 * r + 1), c, k, "L_R denominator")?)
    })?;
    Ok(GaussFactors { left, middle, right, order: FactorOrder::Udl })
}

/// Factors `L'_R D'_R U'_R` of `R21(x2/x1)`.
///
/// The lower factor uses the exponent `-(r-s)(n-r) - (r-s)(r-s-1)/2` on
/// `c`; with it the factor equals the inverse of the unipotent part of the
/// lower coefficient matrix, and the product matches the other
/// decomposition.
pub fn r21_ldu(p: &ParamSet) -> Result<GaussFactors> {
    let n = p.n as i64;
    let (b1, b2, c, w) = (p.b1, p.b2, p.c, p.w());
    let dim = p.n + 1;
    let left = lower(dim, |r, s| {
        let (r, s) = (r as i64, s as i64);
        let k = r - s;
        Ok(sign(k)
            * ipow(c, -k * (n - r) - k * (k - 1) / 2)
            * qbinom(c, n - s, k, n - r)?
            * qpoch_int(b2 * ipow(c, s), c, k)?
            / qpoch_den(w * ipow(c, -(n - 2 * s - 1)), c, k, "L'_R denominator")?)
    })?;
    let middle = diagonal(dim, |r| {
        let r = r as i64;
        Ok(ipow(b2, -(n - r)) * ipow(c, -r * (n - r)) * qpoch_int(w * b1, c, r)?
            / qpoch_den(w / b2 * ipow(c, -(n - r - 1)), c, n - r, "D'_R denominator")?
            * qpoch_int(w * ipow(c, -(n - 2 * r - 1)), c, n - r)?
            / qpoch_den(w * ipow(c, -(n - r)), c, r, "D'_R denominator")?)
    })?;
    let right = upper(dim, |r, s| {
        let (r, s) = (r as i64, s as i64);
        let k = s - r;
        Ok(ipow(c, -k * r) * qbinom(c, s, k, r)? * qpoch_int(b1 * ipow(c, n - s), c, k)?
            / qpoch_den(ipow(c, n - r - s) / w, c, k, "U'_R denominator")?)
    })?;
    Ok(GaussFactors { left, middle, right, order: FactorOrder::Ldu })
}

/// Assembled `R21(x2/x1)`.
pub fn r21(p: &ParamSet) -> Result<CMatrix> {
    Ok(r21_udl(p)?.product())
}

/// `R12(x1/x2) = JτU_RJ · JτD_RJ · JτL_RJ`.
pub fn r12(p: &ParamSet) -> Result<CMatrix> {
    let f = r21_udl(&p.tau())?;
    Ok(CMatrix::chain(&[&f.left.reversed(), &f.middle.reversed(), &f.right.reversed()]))
}

/// `R12(x1/x2)` from the other decomposition: `JτL'J · JτD'J · JτU'J`.
pub fn r12_from_ldu(p: &ParamSet) -> Result<CMatrix> {
    let f = r21_ldu(&p.tau())?;
    Ok(CMatrix::chain(&[&f.left.reversed(), &f.middle.reversed(), &f.right.reversed()]))
}

/// `a c^{1-n} = q^{α̃ - (n-1)γ}`.
fn shift_character(p: &ParamSet) -> C64 {
    p.a * ipow(p.c, 1 - p.n as i64)
}

/// `D1 = diag[(a c^{1-n})^{n-s}]`.
pub fn d1(p: &ParamSet) -> CMatrix {
    let e = shift_character(p);
    CMatrix::diagonal(&(0..=p.n).map(|s| ipow(e, (p.n - s) as i64)).collect::<Vec<_>>())
}

/// `D2 = J D1 J = diag[(a c^{1-n})^s]`.
pub fn d2(p: &ParamSet) -> CMatrix {
    let e = shift_character(p);
    CMatrix::diagonal(&(0..=p.n).map(|s| ipow(e, s as i64)).collect::<Vec<_>>())
}

/// Matrix of the q-difference system `T2 φ̃ = φ̃ K` in the basis `φ_s`:
/// `K = U_R D_R L_R · diag[(a c^{1-n})^s]`.
pub fn k_matrix(p: &ParamSet) -> Result<CMatrix> {
    Ok(r21(p)?.mul(&d2(p)))
}

/// The same matrix through the LDU decomposition.
pub fn k_matrix_ldu(p: &ParamSet) -> Result<CMatrix> {
    Ok(r21_ldu(p)?.product().mul(&d2(p)))
}

/// `K1(x1, x2) = R12(x1/x2) D1`.
pub fn k1(p: &ParamSet) -> Result<CMatrix> {
    Ok(r12(p)?.mul(&d1(p)))
}

/// `K2(x1, x2) = D2 R21(q x2/x1)`.
pub fn k2(p: &ParamSet) -> Result<CMatrix> {
    Ok(d2(p).mul(&r21(&p.with_points(p.x1, p.x2 * p.q))?))
}

/// Closed-form `det R21`.
pub fn det_r(p: &ParamSet) -> Result<C64> {
    let n = p.n as i64;
    let (b1, b2, c, w) = (p.b1, p.b2, p.c, p.w());
    let mut acc = ONE;
    for r in 0..=n {
        acc *= ipow(b2, -(n - r)) * ipow(c, -r * (n - r)) * qpoch_int(w * b1, c, r)?
            / qpoch_den(w / b2 * ipow(c, -(r - 1)), c, r, "det R denominator")?;
    }
    Ok(acc)
}

/// Closed-form `det K = (a c^{1-n})^{n(n+1)/2} det R21`.
pub fn det_k(p: &ParamSet) -> Result<C64> {
    let n = p.n as i64;
    Ok(ipow(shift_character(p), n * (n + 1) / 2) * det_r(p)?)
}

/// Factors `U_A D_A L_A` of the α̃-shift matrix.
pub fn a_factors(p: &ParamSet) -> Result<GaussFactors> {
    let n = p.n as i64;
    let (a, b1, b2, c, w) = (p.a, p.b1, p.b2, p.c, p.w());
    let dim = p.n + 1;
    let bar = a_bar_factors(p)?;
    let middle = diagonal(dim, |r| {
        let ri = r as i64;
        Ok(ipow(p.x1, n - ri) * ipow(p.x2, ri) * bar.middle.get(r, r))
    })?;
    let right = lower(dim, |r, s| {
        let (r, s) = (r as i64, s as i64);
        let k = r - s;
        Ok(sign(k)
            * ipow(w, -k)
            * ipow(c, -(k * (r + s - 1)) / 2)
            * qbinom(c, n - s, k, n - r)?
            * qpoch_int(b2 * ipow(c, s), c, k)?
            / qpoch_den(a * b1 * ipow(c, -2 * (r - 1)), c, k, "L_A denominator")?)
    })?;
    Ok(GaussFactors { left: bar.left, middle, right, order: FactorOrder::Udl })
}

/// Point-free factors `Ū_A D̄_A L̄_A`; `A = Ū D̄ L̄ · diag[x1^{n-r} x2^r]`.
pub fn a_bar_factors(p: &ParamSet) -> Result<GaussFactors> {
    let n = p.n as i64;
    let (a, b1, b2, c) = (p.a, p.b1, p.b2, p.c);
    let dim = p.n + 1;
    let e = shift_character(p);
    let left = upper(dim, |r, s| {
        let (r, s) = (r as i64, s as i64);
        let k = s - r;
        Ok(sign(k)
            * ipow(e, k)
            * ipow(c, -(k * (s + r - 1)) / 2)
            * qbinom(c, s, k, r)?
            * qpoch_int(b1 * ipow(c, n - s), c, k)?
            / qpoch_den(a * b1 * ipow(c, -2 * (s - 1)), c, k, "U_A denominator")?)
    })?;
    let middle = diagonal(dim, |r| {
        let r = r as i64;
        Ok(ipow(c, (r * (r - 1) + (n - r) * (n - r - 1)) / 2)
            * qpoch_int(a * b1 * ipow(c, -2 * (r - 1)), c, r)?
            * qpoch_int(a * ipow(c, -2 * (n - 1)), c, n - r)?
            / qpoch_den(a * b1 * b2 * ipow(c, -(r - 1)), c, r, "D_A denominator")?
            / qpoch_den(a * b1 * ipow(c, -(n - 1 + r)), c, n - r, "D_A denominator")?)
    })?;
    let right = lower(dim, |r, s| {
        let (r, s) = (r as i64, s as i64);
        let k = r - s;
        Ok(sign(k) * ipow(c, -(k * (r + s - 1)) / 2) * qbinom(c, n - s, k, n - r)? * qpoch_int(b2 * ipow(c, s), c, k)?
            / qpoch_den(a * b1 * ipow(c, -2 * (r - 1)), c, k, "L_A denominator")?)
    })?;
    Ok(GaussFactors { left, middle, right, order: FactorOrder::Udl })
}

/// `diag[x1^{n-r} x2^r]`.
pub fn point_diagonal(p: &ParamSet) -> CMatrix {
    let n = p.n as i64;
    CMatrix::diagonal(&(0..=n).map(|r| ipow(p.x1, n - r) * ipow(p.x2, r)).collect::<Vec<_>>())
}

/// Assembled `A(q^{α̃})`.
pub fn a_matrix(p: &ParamSet) -> Result<CMatrix> {
    Ok(a_factors(p)?.product())
}

/// `A` assembled from the point-free factors.
pub fn a_matrix_bar(p: &ParamSet) -> Result<CMatrix> {
    Ok(a_bar_factors(p)?.product().mul(&point_diagonal(p)))
}

/// Closed-form `det A`.
pub fn det_a(p: &ParamSet) -> Result<C64> {
    let n = p.n as i64;
    let (a, b1, b2, c) = (p.a, p.b1, p.b2, p.c);
    let mut acc = ipow(p.x1 * p.x2, n * (n + 1) / 2) * ipow(c, (n - 1) * n * (n + 1) / 3);
    for r in 0..=n {
        acc *= qpoch_int(a * ipow(c, -2 * (n - 1)), c, r)?
            / qpoch_den(a * b1 * b2 * ipow(c, -(r - 1)), c, r, "det A denominator")?;
    }
    Ok(acc)
}

/// Factor `M = L D U` with unipotent `L`, `U` (Doolittle elimination).
///
/// Fails when a leading principal pivot is below `1e-12` relative to the
/// largest entry.
pub fn ldu(m: &CMatrix) -> Result<GaussFactors> {
    let n = m.dim();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut l = CMatrix::identity(n).data;
    let mut u = CMatrix::identity(n).data;
    let mut d = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let mut pivot = m.get(k, k);
        for j in 0..k {
            pivot -= l[(k, j)] * d[j] * u[(j, k)];
        }
        if pivot.norm() < 1e-12 * scale {
            return Err(QsError::singular("leading principal minor", k as i64));
        }
        d[k] = pivot;
        for i in k + 1..n {
            let mut lik = m.get(i, k);
            let mut uki = m.get(k, i);
            for j in 0..k {
                lik -= l[(i, j)] * d[j] * u[(j, k)];
                uki -= l[(k, j)] * d[j] * u[(j, i)];
            }
            l[(i, k)] = lik / pivot;
            u[(k, i)] = uki / pivot;
        }
    }
    Ok(GaussFactors {
        left: CMatrix { data: l, shape: Shape::General }.with_shape(Shape::LowerUnipotent)?,
        middle: CMatrix::diagonal(&d),
        right: CMatrix { data: u, shape: Shape::General }.with_shape(Shape::UpperUnipotent)?,
        order: FactorOrder::Ldu,
    })
}

/// Factor `M = U D L` with unipotent `U`, `L`, via `ldu(JMJ)`.
pub fn udl(m: &CMatrix) -> Result<GaussFactors> {
    let f = ldu(&m.reversed())?;
    Ok(GaussFactors {
        left: f.left.reversed(),
        middle: f.middle.reversed(),
        right: f.right.reversed(),
        order: FactorOrder::Udl,
    })
}
