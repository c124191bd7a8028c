//! Scalar q-series primitives: q-Pochhammer symbols, the Jacobi theta
//! function, theta products and Heine's basic hypergeometric series.
//!
//! All routines take characters (values such as `q^γ`) as plain complex
//! numbers. Exponents are converted to characters once, through
//! [`character`], using the principal branch of `log q`.

use crate::error::{QsError, Result};
use num_complex::Complex64 as C64;

/// A factor whose modulus falls below this value is treated as an exact zero.
pub const EXACT_ZERO: f64 = 1e-15;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Nome together with truncation settings for infinite products and series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    pub q: C64,
    /// Minimum number of factors taken in an infinite product.
    pub product_order: usize,
    /// Products and series stop once the next correction is below this.
    pub series_tol: f64,
}

impl QContext {
    pub fn new(q: C64) -> Result<Self> {
        Self::with_settings(q, 8, 1e-18)
    }

    pub fn with_settings(q: C64, product_order: usize, series_tol: f64) -> Result<Self> {
        if !(q.norm() < 1.0) {
            return Err(QsError::domain(format!("nome must satisfy |q| < 1, got {q}")));
        }
        if q.norm() == 0.0 {
            return Err(QsError::domain("nome must be nonzero"));
        }
        if product_order == 0 {
            return Err(QsError::domain("product order must be at least 1"));
        }
        if !(series_tol > 0.0) {
            return Err(QsError::domain("series tolerance must be positive"));
        }
        Ok(Self { q, product_order, series_tol })
    }

    /// Same settings with a different nome.
    pub fn with_q(&self, q: C64) -> Result<Self> {
        Self::with_settings(q, self.product_order, self.series_tol)
    }
}

/// The character `q^e = exp(e log q)` on the principal branch.
pub fn character(q: C64, e: C64) -> C64 {
    (e * q.ln()).exp()
}

/// Integer power of a complex number, exact for small exponents.
pub fn ipow(z: C64, k: i64) -> C64 {
    if k >= 0 {
        z.powu(k as u32)
    } else {
        ONE / z.powu((-k) as u32)
    }
}

/// `(-1)^k` as a complex number.
pub fn sign(k: i64) -> C64 {
    if k.rem_euclid(2) == 0 {
        ONE
    } else {
        -ONE
    }
}

fn check_step(c: C64) -> Result<()> {
    if !(c.norm() < 1.0) {
        return Err(QsError::domain(format!("infinite product needs |c| < 1, got {c}")));
    }
    Ok(())
}

/// `(x; c)_∞ = ∏_{ν ≥ 0} (1 - c^ν x)`.
///
/// At least `ctx.product_order` factors are taken; the product then stops
/// once `|c^ν x|` drops below `ctx.series_tol`. A factor within
/// [`EXACT_ZERO`] of zero makes the result exactly zero.
pub fn qpoch_inf(x: C64, c: C64, ctx: &QContext) -> Result<C64> {
    check_step(c)?;
    let mut acc = ONE;
    let mut term = x;
    let mut k = 0usize;
    while k < ctx.product_order || term.norm() >= ctx.series_tol {
        let f = ONE - term;
        if f.norm() < EXACT_ZERO {
            return Ok(C64::new(0.0, 0.0));
        }
        acc *= f;
        term *= c;
        k += 1;
        if term.norm() == 0.0 && k >= ctx.product_order {
            break;
        }
    }
    Ok(acc)
}

/// `(x; c)_∞ / (y; c)_∞`, evaluated factor by factor.
///
/// Pairing the factors keeps the running value bounded when both products
/// are individually huge.
pub fn qratio_inf(x: C64, y: C64, c: C64, ctx: &QContext) -> Result<C64> {
    check_step(c)?;
    let mut acc = ONE;
    let (mut u, mut v) = (x, y);
    let mut k = 0usize;
    let mut zero = false;
    while k < ctx.product_order || u.norm() >= ctx.series_tol || v.norm() >= ctx.series_tol {
        let den = ONE - v;
        if den.norm() < EXACT_ZERO {
            return Err(QsError::singular("(y; c)_inf", k as i64));
        }
        let num = ONE - u;
        if num.norm() < EXACT_ZERO {
            zero = true;
        } else {
            acc *= num / den;
        }
        u *= c;
        v *= c;
        k += 1;
        if u.norm() == 0.0 && v.norm() == 0.0 && k >= ctx.product_order {
            break;
        }
    }
    Ok(if zero { C64::new(0.0, 0.0) } else { acc })
}

/// `(x; c)_ν` for any integer `ν`.
///
/// For `ν ≥ 0` this is `∏_{k<ν}(1 - c^k x)`; for `ν < 0` it is
/// `∏_{k=1}^{-ν} (1 - x c^{-k})^{-1}`.
pub fn qpoch_int(x: C64, c: C64, nu: i64) -> Result<C64> {
    if nu >= 0 {
        let mut acc = ONE;
        let mut ck = ONE;
        for _ in 0..nu {
            acc *= ONE - ck * x;
            ck *= c;
        }
        Ok(acc)
    } else {
        let inv = ONE / c;
        let mut acc = ONE;
        let mut ck = inv;
        for k in 1..=(-nu) {
            let f = ONE - x * ck;
            if f.norm() < EXACT_ZERO {
                return Err(QsError::singular("(x; c)_nu with nu < 0", -k));
            }
            acc /= f;
            ck *= inv;
        }
        Ok(acc)
    }
}

/// `(x; c)_ν` that refuses a vanishing result, for use in denominators.
pub fn qpoch_den(x: C64, c: C64, nu: i64, label: &str) -> Result<C64> {
    let v = qpoch_int(x, c, nu)?;
    if v.norm() < EXACT_ZERO {
        return Err(QsError::singular(label.to_string(), nu));
    }
    Ok(v)
}

/// `_r(x; c)_s = (x; c)_r / ((x; c)_{r-s} (x; c)_s)` for `0 ≤ s ≤ r`.
pub fn qpoch_symm(x: C64, c: C64, r: i64, s: i64) -> Result<C64> {
    if s < 0 || s > r {
        return Err(QsError::domain(format!("symmetric Pochhammer needs 0 <= s <= r, got r={r}, s={s}")));
    }
    let num = qpoch_int(x, c, r)?;
    let d1 = qpoch_den(x, c, r - s, "_r(x;c)_s left denominator")?;
    let d2 = qpoch_den(x, c, s, "_r(x;c)_s right denominator")?;
    Ok(num / (d1 * d2))
}

/// Gaussian binomial `(c;c)_top / ((c;c)_a (c;c)_b)`.
pub fn qbinom(c: C64, top: i64, a: i64, b: i64) -> Result<C64> {
    let num = qpoch_int(c, c, top)?;
    let da = qpoch_den(c, c, a, "(c;c)_a")?;
    let db = qpoch_den(c, c, b, "(c;c)_b")?;
    Ok(num / (da * db))
}

/// Jacobi theta function `ϑ(x) = (x)_∞ (q/x)_∞ (q)_∞` with base `q`.
pub fn theta(x: C64, ctx: &QContext) -> Result<C64> {
    if x.norm() == 0.0 {
        return Err(QsError::domain("theta is undefined at x = 0"));
    }
    let q = ctx.q;
    Ok(qpoch_inf(x, q, ctx)? * qpoch_inf(q / x, q, ctx)? * qpoch_inf(q, q, ctx)?)
}

/// `ϑ(x)_r = ϑ(x) ϑ(x c) ⋯ ϑ(x c^{r-1})` with step character `c`.
pub fn theta_prod(x: C64, step: C64, r: i64, ctx: &QContext) -> Result<C64> {
    if r < 0 {
        return Err(QsError::domain(format!("theta product length must be nonnegative, got {r}")));
    }
    let mut acc = ONE;
    let mut y = x;
    for _ in 0..r {
        acc *= theta(y, ctx)?;
        y *= step;
    }
    Ok(acc)
}

/// `_rϑ(x)_s = ϑ(x)_r / (ϑ(x)_{r-s} ϑ(x)_s)`.
pub fn theta_symm(x: C64, step: C64, r: i64, s: i64, ctx: &QContext) -> Result<C64> {
    if s < 0 || s > r {
        return Err(QsError::domain(format!("symmetric theta product needs 0 <= s <= r, got r={r}, s={s}")));
    }
    let num = theta_prod(x, step, r, ctx)?;
    let d = theta_prod(x, step, r - s, ctx)? * theta_prod(x, step, s, ctx)?;
    if d.norm() < EXACT_ZERO {
        return Err(QsError::singular("theta product denominator", s));
    }
    Ok(num / d)
}

/// Heine's series `Σ_ν (A)_ν (B)_ν / ((C)_ν (q)_ν) x^ν` with characters
/// `A, B, C` and base `q = ctx.q`.
pub fn heine_2phi1(a: C64, b: C64, cc: C64, x: C64, ctx: &QContext) -> Result<C64> {
    if !(x.norm() < 1.0) {
        return Err(QsError::domain(format!("Heine series needs |x| < 1, got {x}")));
    }
    let q = ctx.q;
    let mut sum = crate::compensated::CompensatedSum::new();
    let mut term = ONE;
    let mut qk = ONE;
    const MAX_TERMS: usize = 200_000;
    for k in 0..MAX_TERMS {
        sum.add(term);
        let den = (ONE - cc * qk) * (ONE - q * qk);
        if den.norm() < EXACT_ZERO {
            return Err(QsError::singular("(C; q)_nu in Heine series", k as i64 + 1));
        }
        term *= (ONE - a * qk) * (ONE - b * qk) / den * x;
        qk *= q;
        if term.norm() <= ctx.series_tol * sum.value().norm().max(1e-300) || term.norm() == 0.0 {
            return Ok(sum.value());
        }
    }
    Err(QsError::Truncation { what: "Heine series".into(), partial: sum.value() })
}

/// Right side of Heine's transformation:
/// `(A)_∞ (B x)_∞ / ((C)_∞ (x)_∞) · ₂φ₁(x, C/A; B x; A)`.
pub fn heine_transformed(a: C64, b: C64, cc: C64, x: C64, ctx: &QContext) -> Result<C64> {
    if !(a.norm() < 1.0) {
        return Err(QsError::domain("transformed Heine series needs |A| < 1"));
    }
    let q = ctx.q;
    let pre = qpoch_inf(a, q, ctx)? * qpoch_inf(b * x, q, ctx)?;
    let den = qpoch_inf(cc, q, ctx)? * qpoch_inf(x, q, ctx)?;
    if den.norm() < EXACT_ZERO {
        return Err(QsError::singular("(C)_inf (x)_inf", 0));
    }
    Ok(pre / den * heine_2phi1(x, cc / a, b * x, a, ctx)?)
}
