//! q → 0 limits with fixed characters: the coefficient matrices of the
//! asymptotic solutions, the connection-matrix entries, the character
//! diagonals, and the reconstructions of `A`, `R21` and `K` from them.
//!
//! Every function here depends only on the characters `a, b1, b2, c` and on
//! `w = x2/x1` (plus the points themselves where a diagonal of point powers
//! enters).

use crate::error::{QsError, Result};
use crate::matrix::{CMatrix, Shape};
use crate::params::{LimitParams, ParamSet};
use crate::qseries::{ipow, qbinom, qpoch_den, qpoch_int, qpoch_symm, sign, theta_symm, QContext};
use num_complex::Complex64 as C64;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn p(x: C64, c: C64, m: i64) -> Result<C64> {
    qpoch_int(x, c, m)
}

fn pd(x: C64, c: C64, m: i64) -> Result<C64> {
    qpoch_den(x, c, m, "limit-formula denominator")
}

fn ps(x: C64, c: C64, n: i64, r: i64) -> Result<C64> {
    qpoch_symm(x, c, n, r)
}

fn tri(dim: usize, upper: bool, mut f: impl FnMut(i64, i64) -> Result<C64>) -> Result<CMatrix> {
    CMatrix::try_from_fn(dim, |r, s| {
        if (upper && s >= r) || (!upper && s <= r) {
            f(r as i64, s as i64)
        } else {
            Ok(C64::new(0.0, 0.0))
        }
    })
}

fn diag(dim: usize, mut f: impl FnMut(i64) -> Result<C64>) -> Result<CMatrix> {
    let d = (0..dim as i64).map(&mut f).collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::diagonal(&d))
}

/// Diagonal `(c^+_{rr})_0` of the lower coefficient matrix.
pub fn c_plus_diagonal(lp: &LimitParams) -> Result<Vec<C64>> {
    let n = lp.n as i64;
    let LimitParams { b1, b2, c, w, .. } = *lp;
    (0..=n)
        .map(|r| {
            Ok(ipow(c, -(r * (r - 1) + (n - r) * (n - r - 1)) / 2)
                * p(w * ipow(c, -(n - r)), c, r)?
                * p(w * ipow(c, -(n - r - 1)), c, r)?
                / (pd(b1, c, n - r)? * pd(w * b1, c, r)? * pd(b2, c, r)? * pd(w * c, c, r)?))
        })
        .collect()
}

/// Unipotent part `C^+ = (c^+_{rs}/c^+_{rr})`, lower triangular.
pub fn c_plus_unipotent(lp: &LimitParams) -> Result<CMatrix> {
    let n = lp.n as i64;
    let LimitParams { b2, c, w, .. } = *lp;
    tri(lp.n + 1, false, |r, s| {
        Ok(ipow(c, -(r - s) * (n - r)) * qbinom(c, n - s, r - s, n - r)? * p(b2 * ipow(c, s), c, r - s)?
            / pd(w * ipow(c, r + s - n), c, r - s)?)
    })?
    .with_shape(Shape::LowerUnipotent)
}

/// `(C_A^+)_0 = diag[(c^+_{rr})_0] · C^+`.
pub fn c_plus_limit(lp: &LimitParams) -> Result<CMatrix> {
    Ok(CMatrix::diagonal(&c_plus_diagonal(lp)?).mul(&c_plus_unipotent(lp)?))
}

/// Diagonal `(c^-_{rr})_0` of the upper coefficient matrix.
pub fn c_minus_diagonal(lp: &LimitParams) -> Result<Vec<C64>> {
    let n = lp.n as i64;
    let LimitParams { b1, b2, c, w, .. } = *lp;
    let x = w * b1 / b2;
    let ci = ONE / c;
    (0..=n)
        .map(|r| {
            Ok(sign(n) * p(ci, ci, n - r)? * p(ci, ci, r)? / ipow(ONE - ci, n) * p(w / b2 * ipow(c, -(r - 1)), c, r)?
                / pd(x * ipow(c, -(r - 1)), c, r)?
                / (ps(x * ipow(c, -(r - 1)), c, n, r)? * ps(x * ipow(c, -r), c, n, r)?))
        })
        .collect()
}

/// Unipotent part `C^- = (c^-_{rs}/c^-_{rr})`, upper triangular.
pub fn c_minus_unipotent(lp: &LimitParams) -> Result<CMatrix> {
    let n = lp.n as i64;
    let LimitParams { b1, b2, c, w, .. } = *lp;
    tri(lp.n + 1, true, |r, s| {
        Ok(ipow(w / b2 * ipow(c, -r), s - r) * p(b1 * ipow(c, n - s), c, s - r)?
            / pd(w * b1 / b2 * ipow(c, n - s - r), c, s - r)?
            * qbinom(c, s, r, s - r)?)
    })?
    .with_shape(Shape::UpperUnipotent)
}

/// `(C_A^-)_0 = diag[(c^-_{rr})_0] · C^-`.
pub fn c_minus_limit(lp: &LimitParams) -> Result<CMatrix> {
    Ok(CMatrix::diagonal(&c_minus_diagonal(lp)?).mul(&c_minus_unipotent(lp)?))
}

/// Character diagonals `q^{D_A^+}` and `q^{D_A^-}`.
pub fn d_a_diagonals(lp: &LimitParams, x1: C64, x2: C64) -> (CMatrix, CMatrix) {
    let n = lp.n as i64;
    let LimitParams { b1, b2, c, .. } = *lp;
    let e = |r: i64| (r * (r - 1) + (n - r) * (n - r - 1)) / 2;
    let plus: Vec<C64> = (0..=n).map(|r| ipow(x1, n - r) * ipow(x2, r) * ipow(c, e(r))).collect();
    let minus: Vec<C64> =
        (0..=n).map(|r| ipow(x1, n - r) * ipow(x2, r) * ipow(b1, -(n - r)) * ipow(b2, -r) * ipow(c, -e(r))).collect();
    (CMatrix::diagonal(&plus), CMatrix::diagonal(&minus))
}

/// `A(0) = (C^+)^{-1} q^{D_A^+} C^+`.
pub fn a_at_zero(lp: &LimitParams, x1: C64, x2: C64) -> Result<CMatrix> {
    let cp = c_plus_unipotent(lp)?;
    let (dp, _) = d_a_diagonals(lp, x1, x2);
    Ok(CMatrix::chain(&[&cp.inverse()?, &dp, &cp]))
}

/// `A(∞) = (C^-)^{-1} q^{D_A^-} C^-`.
pub fn a_at_infinity(lp: &LimitParams, x1: C64, x2: C64) -> Result<CMatrix> {
    let cm = c_minus_unipotent(lp)?;
    let (_, dm) = d_a_diagonals(lp, x1, x2);
    Ok(CMatrix::chain(&[&cm.inverse()?, &dm, &cm]))
}

/// The four connection-matrix limits.
#[derive(Debug, Clone, PartialEq)]
pub struct HLimits {
    /// ζ-cycles against ξ-cycles; upper triangular.
    pub zeta_xi: CMatrix,
    /// ζ-cycles against η-cycles; lower triangular.
    pub zeta_eta: CMatrix,
    /// δ-cycles against ξ-cycles; lower triangular.
    pub delta_xi: CMatrix,
    /// δ-cycles against η-cycles; upper triangular.
    pub delta_eta: CMatrix,
}

/// ζ/ξ entries: printed diagonal and ratios.
pub fn h_zeta_xi(lp: &LimitParams) -> Result<CMatrix> {
    let n = lp.n as i64;
    let LimitParams { a, b1, b2, c, w, .. } = *lp;
    let iw = ONE / w;
    let mut d = Vec::new();
    for r in 0..=n {
        let m = n - r;
        d.push(
            sign(m) * p(c, c, m)? * p(b1, c, m)? * p(b2 * iw, c, m)? / (ipow(ONE - c, m) * pd(iw, c, m)?)
                * p(iw / b1 * ipow(c, -(m - 1)), c, m)?
                * p(a * b2 * ipow(c, -2 * (m - 1)), c, m)?
                / (pd(b2 * iw / b1 * ipow(c, -(m - 1)), c, m)? * pd(a * b1 * b2 * ipow(c, -(m - 1)), c, m)?)
                * ps(ipow(c, -(r - 1)) * iw, c, n, r)?
                * ps(ipow(c, -r) * iw, c, n, r)?
                / (ps(ipow(c, -(n - r - 1)) * iw, c, n, r)? * ps(ipow(c, -(n - r)) * iw, c, n, r)?),
        );
    }
    tri(lp.n + 1, true, |r, s| {
        let ratio = ipow(c, -r * (s - r))
            * ps(ipow(c, -(n - r - 1)) * iw, c, n, r)?
            * ps(ipow(c, -(n - r)) * iw, c, n, r)?
            * ps(ipow(c, -(s - 1)) * iw, c, n, s)?
            / (ps(ipow(c, -(n - s - 1)) * iw, c, n, s)?
                * ps(ipow(c, -(n - s)) * iw, c, n, s)?
                * ps(ipow(c, -(r - 1)) * iw, c, n, r)?)
            * p(ipow(c, -r) * iw, c, n - r)?
            / pd(ipow(c, -s) * iw, c, n - s)?
            * p(b2 * ipow(c, r), c, s - r)?
            / pd(b2 * ipow(c, n - s) * iw, c, s - r)?
            * p(w / (a * b2) * ipow(c, n - 1), c, s - r)?
            * qbinom(c, s, s - r, r)?
            / (pd(ipow(c, 2 * n - r - s - 1) / (a * b2), c, s - r)? * pd(w * ipow(c, r + s - n), c, s - r)?);
        Ok(d[r as usize] * ratio)
    })
}

/// ζ/η entries: printed diagonal; ratios with the middle factor read as the
/// symmetric Pochhammer `_r(X c^{n-r-s}; c)_s`, `X = w b1/b2`.
pub fn h_zeta_eta(lp: &LimitParams) -> Result<CMatrix> {
    let n = lp.n as i64;
    let LimitParams { a, b1, b2, c, w, .. } = *lp;
    tri(lp.n + 1, false, |r, s| {
        let d = sign(r) * ipow(ONE - c, r) * p(a * b2 * ipow(c, -(2 * n - r - 1)), c, r)?
            / (pd(c, c, r)? * pd(a * ipow(c, -2 * (n - 1)), c, r)? * pd(b2, c, r)?);
        let ratio = ipow(c, -s * (r - s))
            * p(a * b1 * ipow(c, -(n - 1)) * w, c, r - s)?
            * p(a * b2 * ipow(c, -(2 * n - r - 1)), c, s)?
            / pd(a * b2 * ipow(c, -(2 * n - r - 1)), c, r)?
            * p(b2, c, r)?
            * ps(b1 / b2 * ipow(c, n - r - s) * w, c, r, s)?
            / (pd(b2, c, s)? * pd(b1 * ipow(c, n - r) * w, c, r - s)?)
            * qbinom(c, r, s, r - s)?;
        Ok(d * ratio)
    })
}

/// δ/η entries: diagonal with the factor `(b1; c)_{n-r}` in the
/// denominator, and printed ratios.
pub fn h_delta_eta(lp: &LimitParams) -> Result<CMatrix> {
    let n = lp.n as i64;
    let LimitParams { a, b1, b2, c, w, .. } = *lp;
    let x = w * b1 / b2;
    let mut d = Vec::new();
    for r in 0..=n {
        d.push(
            sign(n - r) * ipow(ONE - c, n - r) * p(a * b1 * ipow(c, -(n + r - 1)), c, n - r)?
                / (pd(c, c, n - r)? * pd(a * ipow(c, -2 * (n - 1)), c, n - r)? * pd(b1, c, n - r)?)
                * ps(x * ipow(c, -(r - 1)), c, n, r)?
                * ps(x * ipow(c, -r), c, n, r)?
                / (ps(w / b2 * ipow(c, -(n - 2)), c, n, r)? * ps(w / b2 * ipow(c, -(n - 1)), c, n, r)?),
        );
    }
    tri(lp.n + 1, true, |r, i| {
        let k = i - r;
        let ratio = ipow(c, k * (i + r - n)) * ps(x * ipow(c, -(i - 1)), c, n, i)? * ps(x * ipow(c, -i), c, n, i)?
            / (ps(x * ipow(c, -(r - 1)), c, n, r)? * ps(x * ipow(c, -r), c, n, r)?)
            * ipow(a * ipow(c, -(n + r - 1)), k)
            * p(w / (a * b2) * ipow(c, n + r - i), c, k)?
            / pd(w / b2 * ipow(c, -(i - 1)), c, k)?
            * p(x * ipow(c, -(i - 1)), c, k)?
            / pd(x * ipow(c, n - 2 * i + 1), c, k)?
            * p(b1 * ipow(c, n - i), c, k)?
            / pd(a * b1 * ipow(c, -(i + r - 1)), c, k)?
            * p(c, c, n - r)?
            / (pd(c, c, k)? * pd(c, c, n - i)?);
        Ok(d[r as usize] * ratio)
    })
}

/// δ/ξ entries: printed diagonal and ratios.
pub fn h_delta_xi(lp: &LimitParams) -> Result<CMatrix> {
    let n = lp.n as i64;
    let LimitParams { a, b1, b2, c, w, .. } = *lp;
    let x = w * b1 / b2;
    let mut d = Vec::new();
    for r in 0..=n {
        d.push(
            sign(r) * p(b2, c, r)? * p(w * b1, c, r)? * p(w / b2 * ipow(c, -(r - 1)), c, r)? * p(c, c, r)?
                / (pd(w, c, r)? * pd(x * ipow(c, -(r - 1)), c, r)? * ipow(ONE - c, r))
                * p(a * b1 * ipow(c, -2 * (r - 1)), c, r)?
                / pd(a * b1 * b2 * ipow(c, -(r - 1)), c, r)?
                * ps(w * ipow(c, -(n - r - 1)), c, n, r)?
                * ps(w * ipow(c, -(n - r)), c, n, r)?
                / (ps(w / b2 * ipow(c, -(n - 2)), c, n, r)? * ps(w / b2 * ipow(c, -(n - 1)), c, n, r)?),
        );
    }
    tri(lp.n + 1, false, |r, i| {
        let ratio = ipow(c, -i * (r - i)) * p(w * c, c, i)? * p(w * ipow(c, -(n - r - 1)), c, r)?
            / (pd(w * c, c, r)? * pd(w * ipow(c, -(n - i - 1)), c, i)?)
            * p(w * ipow(c, -(n - r)), c, r)?
            / pd(w * ipow(c, -(n - i)), c, i)?
            * p(w * b1, c, i)?
            / pd(w * b1, c, r)?
            * p(b1, c, n - i)?
            * p(c, c, n - i)?
            / (pd(b1, c, n - r)? * pd(c, c, n - r)?)
            * p(ipow(c, n - 1) / (a * b1 * w), c, r - i)?
            / (pd(ipow(c, r + i - 1) / (a * b1), c, r - i)? * pd(ipow(c, n - r - i) / w, c, r - i)? * pd(c, c, r - i)?);
        Ok(d[r as usize] * ratio)
    })
}

pub fn h_limits(lp: &LimitParams) -> Result<HLimits> {
    Ok(HLimits {
        zeta_xi: h_zeta_xi(lp)?,
        zeta_eta: h_zeta_eta(lp)?,
        delta_xi: h_delta_xi(lp)?,
        delta_eta: h_delta_eta(lp)?,
    })
}

/// q → 0 limit of the transformation coefficient:
/// `c^{-r(n-r)} _n(x c^{-(r-1)}; c)_r · _n(x c^{-r}; c)_r`.
pub fn a_coef_limit(x: C64, r: i64, lp: &LimitParams) -> Result<C64> {
    let n = lp.n as i64;
    let c = lp.c;
    Ok(ipow(c, -r * (n - r)) * ps(x * ipow(c, -(r - 1)), c, n, r)? * ps(x * ipow(c, -r), c, n, r)?)
}

/// Finite-q transformation coefficient
/// `x^{2r(n-r)γ} q^{-r(n-r)γ + r(n-r)(n-2r)γ²} _nϑ(x c^{-(r-1)})_r _nϑ(x c^{-r})_r`.
pub fn a_coef(x: C64, r: i64, p: &ParamSet) -> Result<C64> {
    Ok(a_coef_slow_prefactor(x, r, p)? * a_coef_reduced(x, r, p)?)
}

/// The factors `x^{2r(n-r)γ} q^{r(n-r)(n-2r)γ²}` of [`a_coef`]. They tend to
/// 1 only logarithmically as q → 0 with `c` fixed.
pub fn a_coef_slow_prefactor(x: C64, r: i64, p: &ParamSet) -> Result<C64> {
    let g = p.exps()?.gamma;
    let n = p.n as i64;
    let e = (r * (n - r)) as f64;
    Ok((2.0 * e * g * x.ln() + e * (n - 2 * r) as f64 * g * g * p.q.ln()).exp())
}

/// [`a_coef`] without its slowly varying prefactor; tends to
/// [`a_coef_limit`] linearly in q.
pub fn a_coef_reduced(x: C64, r: i64, p: &ParamSet) -> Result<C64> {
    let n = p.n as i64;
    let c = p.c;
    let ctx = QContext::new(p.q)?;
    Ok(ipow(c, -r * (n - r))
        * theta_symm(x * ipow(c, -(r - 1)), c, n, r, &ctx)?
        * theta_symm(x * ipow(c, -r), c, n, r, &ctx)?)
}

/// δ/η entries obtained from the τ-swapped ζ/η entries through the
/// limits of the transformation coefficients.
pub fn h_delta_eta_via_swap(lp: &LimitParams) -> Result<CMatrix> {
    let n = lp.n as i64;
    let t = h_zeta_eta(&lp.tau())?;
    let x = lp.w * lp.b1 / lp.b2;
    CMatrix::try_from_fn(lp.n + 1, |r, s| {
        let (ri, si) = (r as i64, s as i64);
        let v = t.get(lp.n - r, lp.n - s);
        if v.norm() == 0.0 {
            return Ok(v);
        }
        Ok(v * a_coef_limit(x, si, lp)? / a_coef_limit(lp.w / (lp.b2 * ipow(lp.c, ri - 1)), n - ri, lp)?)
    })
}

/// δ/ξ entries obtained from the τ-swapped ζ/ξ entries.
pub fn h_delta_xi_via_swap(lp: &LimitParams) -> Result<CMatrix> {
    let n = lp.n as i64;
    let t = h_zeta_xi(&lp.tau())?;
    CMatrix::try_from_fn(lp.n + 1, |r, s| {
        let (ri, si) = (r as i64, s as i64);
        let v = t.get(lp.n - r, lp.n - s);
        if v.norm() == 0.0 {
            return Ok(v);
        }
        Ok(v * a_coef_limit(lp.w, si, lp)? / a_coef_limit(lp.w / (lp.b2 * ipow(lp.c, ri - 1)), n - ri, lp)?)
    })
}

/// `A = (C_A^-)^{-1} (H_{δ;η})^{-1} H_{δ;ξ} q^{D_A^+} C_A^+` from the limits.
pub fn assemble_a(lp: &LimitParams, x1: C64, x2: C64) -> Result<CMatrix> {
    non_resonance_guard_limits(lp, x1, x2)?;
    let cm = c_minus_limit(lp)?;
    let cp = c_plus_limit(lp)?;
    let (dp, _) = d_a_diagonals(lp, x1, x2);
    Ok(CMatrix::chain(&[&cm.inverse()?, &h_delta_eta(lp)?.inverse()?, &h_delta_xi(lp)?, &dp, &cp]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Factors `g_r^±` of the middle diagonal in the R-matrix reconstruction.
pub fn g_factors(lp: &LimitParams, side: Side) -> Result<Vec<C64>> {
    let n = lp.n as i64;
    let c = lp.c;
    let base = match side {
        Side::Plus => lp.w,
        Side::Minus => lp.w * lp.b1 / lp.b2,
    };
    (0..=n)
        .map(|r| {
            let (e1, e2) = match side {
                Side::Plus => (-(n - r - 1), -(n - r)),
                Side::Minus => (-(r - 1), -r),
            };
            Ok(ipow(c, -r * (n - r)) * ps(base * ipow(c, e1), c, n, r)? * ps(base * ipow(c, e2), c, n, r)?)
        })
        .collect()
}

/// `R21 = (C_A^±)_0^{-1} diag[τg_n^±, …, τg_0^±] J τ(C_A^±)_0 J`.
pub fn r_from_c(lp: &LimitParams, side: Side) -> Result<CMatrix> {
    let t = lp.tau();
    let (c, ct) = match side {
        Side::Plus => (c_plus_limit(lp)?, c_plus_limit(&t)?),
        Side::Minus => (c_minus_limit(lp)?, c_minus_limit(&t)?),
    };
    let mut g = g_factors(&t, side)?;
    g.reverse();
    Ok(CMatrix::chain(&[&c.inverse()?, &CMatrix::diagonal(&g), &ct.reversed()]))
}

/// Coefficient matrices and diagonals of the `x`-direction system at `x1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KLimits {
    /// Lower triangular.
    pub c_plus: CMatrix,
    /// Upper triangular.
    pub c_minus: CMatrix,
    pub v_plus: CMatrix,
    pub v_minus: CMatrix,
    /// `q^{D_K^+} = diag[a^r b2^{-(n-r)} c^{-r(2n-r-1)}]`.
    pub d_plus: CMatrix,
}

/// Limits of the `x`-direction coefficient data with `x = w`.
///
/// The second character diagonal carries the factor
/// `(x b1/b2 c^{-(r-1)}; c)_r` in its denominator.
pub fn c_k_and_v_limits(lp: &LimitParams) -> Result<KLimits> {
    let n = lp.n as i64;
    let LimitParams { a, b1, b2, c, w: x, .. } = *lp;
    let dim = lp.n + 1;
    let c_plus = tri(dim, false, |r, s| {
        let d = sign(n - r)
            * ipow(b2, n - r)
            * ipow(c, -((n - r) * (n - r - 1)) / 2 - (r * (r - 1)) / 2)
            * p(c, c, n - r)?
            * p(a * b2 * ipow(c, -(2 * n - r - 1)), c, r)?
            / (ipow(ONE - c, n - r) * pd(b2, c, r)? * pd(a * ipow(c, -2 * (n - 1)), c, r)?);
        Ok(d * ipow(c, (n - r) * (s - r)) * qbinom(c, n - s, r - s, n - r)? * p(b2 * ipow(c, s), c, r - s)?
            / pd(a * b2 * ipow(c, -(2 * n - r - s - 1)), c, r - s)?)
    })?;
    let c_minus = tri(dim, true, |r, s| {
        let d = sign(r * (n - r + 1))
            * ipow(c, -(n * (n - 1)) / 2)
            * p(c, c, r)?
            * p(a * b1 * ipow(c, -(n + r - 1)), c, n - r)?
            / (ipow(ONE - c, r) * pd(b1, c, n - r)? * pd(a * ipow(c, -2 * (n - 1)), c, n - r)?);
        Ok(d * ipow(a * ipow(c, -(n - 1)), s - r)
            * ipow(c, r * (r - s))
            * qbinom(c, s, r, s - r)?
            * p(b1 * ipow(c, n - s), c, s - r)?
            / pd(a * b1 * ipow(c, -(r + s - 1)), c, s - r)?)
    })?;
    let v_plus = diag(dim, |r| Ok(ipow(b2, -(n - r)) * p(x * b1, c, n - r)? / pd(x * b1 / b2, c, n - r)?))?;
    let v_minus = diag(dim, |r| {
        Ok(sign(r * (n - r)) * ipow(c, r * (n - r)) * p(x / b2 * ipow(c, -(r - 1)), c, r)?
            / (pd(x * b1 / b2 * ipow(c, -(r - 1)), c, r)?
                * ps(x / b2 * ipow(c, -(n - 2)), c, n, r)?
                * ps(x / b2 * ipow(c, -(n - 1)), c, n, r)?))
    })?;
    let d_plus = diag(dim, |r| Ok(ipow(a, r) * ipow(b2, -(n - r)) * ipow(c, -r * (2 * n - r - 1))))?;
    Ok(KLimits { c_plus, c_minus, v_plus, v_minus, d_plus })
}

/// `K = (C_K^-)^{-1} V_-^{-1} H_{δ;η} H_{ζ;η}^{-1} V_+ q^{D_K^+} C_K^+` at `x1 = 1`.
pub fn assemble_k(lp: &LimitParams) -> Result<CMatrix> {
    let k = c_k_and_v_limits(lp)?;
    Ok(CMatrix::chain(&[
        &k.c_minus.inverse()?,
        &k.v_minus.inverse()?,
        &h_delta_eta(lp)?,
        &h_zeta_eta(lp)?.inverse()?,
        &k.v_plus,
        &k.d_plus,
        &k.c_plus,
    ]))
}

/// Reject diagonals whose entry ratios equal `q^k` for some integer
/// `1 ≤ |k| ≤ depth`.
pub fn non_resonance_guard(diagonal: &[C64], q: C64, depth: i64) -> Result<()> {
    for (i, di) in diagonal.iter().enumerate() {
        for (j, dj) in diagonal.iter().enumerate() {
            if i == j {
                continue;
            }
            let ratio = di / dj;
            for k in 1..=depth {
                for e in [k, -k] {
                    let qk = ipow(q, e);
                    if (ratio - qk).norm() <= 1e-9 * qk.norm().max(1.0) {
                        return Err(QsError::singular(format!("resonant exponents at ({i},{j})"), e));
                    }
                }
            }
        }
    }
    Ok(())
}

/// In the limit regime `q` is arbitrarily small, so resonance reduces to two
/// equal diagonal characters.
fn non_resonance_guard_limits(lp: &LimitParams, x1: C64, x2: C64) -> Result<()> {
    let (dp, dm) = d_a_diagonals(lp, x1, x2);
    for d in [dp.diag_entries(), dm.diag_entries()] {
        for i in 0..d.len() {
            for j in 0..i {
                if (d[i] - d[j]).norm() <= 1e-12 * d[i].norm().max(d[j].norm()) {
                    return Err(QsError::singular(format!("coincident diagonal characters ({i},{j})"), 0));
                }
            }
        }
    }
    Ok(())
}
