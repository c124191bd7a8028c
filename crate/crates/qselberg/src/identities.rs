//! Finite q-binomial identities behind the closed forms: two master
//! summation lemmas, the three sums used when reconstructing `A` and its
//! inverse from the limit data, and the telescoping products that simplify
//! the determinants.

use crate::compensated::CompensatedSum;
use crate::error::{QsError, Result};
use crate::params::LimitParams;
use crate::qseries::{ipow, qbinom, qpoch_den, qpoch_int, sign};
use crate::report::VerificationReport;
use crate::weights;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A finite sum together with `Σ |term|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumValue {
    pub value: C64,
    pub scale: f64,
}

fn finite_sum(terms: impl IntoIterator<Item = Result<C64>>) -> Result<SumValue> {
    let mut acc = CompensatedSum::new();
    let mut scale = 0.0;
    for t in terms {
        let t = t?;
        scale += t.norm();
        acc.add(t);
    }
    Ok(SumValue { value: acc.value(), scale })
}

fn den(x: C64, c: C64, m: i64, j: i64) -> Result<C64> {
    qpoch_den(x, c, m, &format!("summand denominator at j={j}"))
}

/// Outcome of one identity evaluation.
///
/// `residual = |computed − expected| / max(1, |expected|, term_scale)`, so
/// sums whose terms are large relative to the result are judged against
/// the cancellation they involve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub inputs: serde_json::Value,
    pub computed: [f64; 2],
    pub expected: [f64; 2],
    pub term_scale: f64,
    pub residual: f64,
    pub seed: Option<u64>,
}

impl IdentityCheck {
    pub fn new(name: &str, inputs: serde_json::Value, computed: C64, expected: C64, term_scale: f64) -> Self {
        let residual = (computed - expected).norm() / 1f64.max(expected.norm()).max(term_scale);
        Self {
            name: name.to_string(),
            inputs,
            computed: [computed.re, computed.im],
            expected: [expected.re, expected.im],
            term_scale,
            residual,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.residual.is_finite() && self.residual <= tolerance
    }

    /// Report form, with the digest taken over the canonical inputs.
    pub fn to_report(&self, tolerance: f64) -> VerificationReport {
        let hash = Sha256::digest(self.inputs.to_string().as_bytes());
        let digest: String = hash.iter().take(8).map(|b| format!("{b:02x}")).collect();
        VerificationReport::new(self.name.clone(), digest, self.residual, tolerance)
    }
}

fn cj(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// `Σ_{j=0}^k (−1)^j z^j c^{3j(j−1)/2} [k; j]_c (y c^{1−j}; c)_j/(z c^{j−1}; c)_j
/// · (z y c^j; c)_{k−j}/(z c^{2j}; c)_{k−j}`, identically 1.
pub fn qbinomial_unit_sum(z: C64, y: C64, c: C64, k: i64) -> Result<SumValue> {
    if k < 0 {
        return Err(QsError::domain("summation length must be nonnegative"));
    }
    finite_sum((0..=k).map(|j| {
        Ok(sign(j)
            * ipow(z, j)
            * ipow(c, 3 * j * (j - 1) / 2)
            * qbinom(c, k, k - j, j)?
            * qpoch_int(y * ipow(c, 1 - j), c, j)?
            / den(z * ipow(c, j - 1), c, j, j)?
            * qpoch_int(z * y * ipow(c, j), c, k - j)?
            / den(z * ipow(c, 2 * j), c, k - j, j)?)
    }))
}

/// Pole-free form of the vanishing sum, valid for `k ≥ 1`:
/// `Σ_j (−1)^j c^{−j(2k−j−1)/2} (z c^{2−j}; c)_{j−1} (1 − z c^{1−2j})
/// (z c^{2−2k}; c)_{k−j−1} / ((c; c)_{k−j} (c; c)_j)`, identically 0.
///
/// Pochhammer symbols of length `−1` are `(x; c)_{−1} = 1/(1 − x/c)`.
pub fn qbinomial_null_sum(z: C64, c: C64, k: i64) -> Result<SumValue> {
    if k < 1 {
        return Err(QsError::domain("the vanishing sum needs k >= 1"));
    }
    finite_sum((0..=k).map(|j| {
        Ok(sign(j)
            * ipow(c, -(j * (2 * k - j - 1)) / 2)
            * qpoch_int(z * ipow(c, 2 - j), c, j - 1)?
            * (ONE - z * ipow(c, 1 - 2 * j))
            * qpoch_int(z * ipow(c, 2 - 2 * k), c, k - j - 1)?
            / (den(c, c, k - j, j)? * den(c, c, j, j)?))
    }))
}

/// Rational form of the vanishing sum:
/// `Σ_j (−1)^j c^{−j(2k−j−1)/2} / ((c;c)_j (c;c)_{k−j} (z c^{−2(j−1)}; c)_j
/// (z c^{−k−j+1}; c)_{k−j})`, identically 0 for `k ≥ 1`.
pub fn qbinomial_null_sum_rational(z: C64, c: C64, k: i64) -> Result<SumValue> {
    if k < 1 {
        return Err(QsError::domain("the vanishing sum needs k >= 1"));
    }
    finite_sum((0..=k).map(|j| {
        Ok(sign(j) * ipow(c, -(j * (2 * k - j - 1)) / 2)
            / (den(c, c, j, j)?
                * den(c, c, k - j, j)?
                * den(z * ipow(c, -2 * (j - 1)), c, j, j)?
                * den(z * ipow(c, -k - j + 1), c, k - j, j)?))
    }))
}

fn check_rs(lp: &LimitParams, r: usize, s: usize) -> Result<()> {
    if r > lp.n || s > lp.n {
        return Err(QsError::domain(format!("indices ({r},{s}) exceed n = {}", lp.n)));
    }
    Ok(())
}

/// Sum whose value 1 makes the lower limit reconstruction of `A` close,
/// for `s ≤ r`.
pub fn lower_reconstruction_sum(lp: &LimitParams, r: usize, s: usize) -> Result<SumValue> {
    check_rs(lp, r, s)?;
    if s > r {
        return Err(QsError::domain("the lower reconstruction sum needs s <= r"));
    }
    let (n, r, s) = (lp.n as i64, r as i64, s as i64);
    let LimitParams { a, b1, c, w, .. } = *lp;
    finite_sum((s..=r).map(|i| {
        Ok(sign(i - s)
            * ipow(w * ipow(c, -(n - i)), i - s)
            * ipow(c, (i + s - 1) * (i - s) / 2)
            * qbinom(c, r - s, r - i, i - s)?
            * qpoch_int(a * b1 * ipow(c, -(r + i - 2)), c, i - s)?
            / den(w * ipow(c, i + s - n), c, i - s, i)?
            * qpoch_int(w * a * b1 * ipow(c, -(n + r - i - 2)), c, r - i)?
            / den(w * ipow(c, 2 * i - n + 1), c, r - i, i)?)
    }))
}

/// [`lower_reconstruction_sum`] as an instance of [`qbinomial_unit_sum`]
/// with `k = r − s`, `z = w c^{2s−n+1}`, `y = a b1 c^{−(2s+k−1)}`.
pub fn lower_reconstruction_via_lemma(lp: &LimitParams, r: usize, s: usize) -> Result<SumValue> {
    let (n, r, s) = (lp.n as i64, r as i64, s as i64);
    let k = r - s;
    let c = lp.c;
    qbinomial_unit_sum(lp.w * ipow(c, 2 * s - n + 1), lp.a * lp.b1 * ipow(c, -(2 * s + k - 1)), c, k)
}

/// Sum whose value 1 makes the upper limit reconstruction close, `r ≤ s`.
pub fn upper_reconstruction_sum(lp: &LimitParams, r: usize, s: usize) -> Result<SumValue> {
    check_rs(lp, r, s)?;
    if r > s {
        return Err(QsError::domain("the upper reconstruction sum needs r <= s"));
    }
    let (n, r, s) = (lp.n as i64, r as i64, s as i64);
    let LimitParams { a, b1, b2, c, w, .. } = *lp;
    let x = w * b1 / b2;
    finite_sum((r..=s).map(|i| {
        Ok(ipow(w / (a * b2) * ipow(c, n + r - i - 1), s - i) * qpoch_int(a * b1 * ipow(c, -(r + s - 1)), c, s - i)?
            / den(x * ipow(c, n - s - i), c, s - i, i)?
            * qpoch_int(w / (a * b2) * ipow(c, n + r - i), c, i - r)?
            / den(x * ipow(c, n - 2 * i + 1), c, i - r, i)?
            * qbinom(c, s - r, i - r, s - i)?)
    }))
}

/// [`upper_reconstruction_sum`] as an instance of [`qbinomial_unit_sum`]
/// with `k = s − r`, `z = w b1/b2 c^{n−2r−2k+1}`, `y = c^{2r+k−1}/(a b1)`.
pub fn upper_reconstruction_via_lemma(lp: &LimitParams, r: usize, s: usize) -> Result<SumValue> {
    let (n, r, s) = (lp.n as i64, r as i64, s as i64);
    let k = s - r;
    let c = lp.c;
    qbinomial_unit_sum(
        lp.w * lp.b1 / lp.b2 * ipow(c, n - 2 * r - 2 * k + 1),
        ipow(c, 2 * r + k - 1) / (lp.a * lp.b1),
        c,
        k,
    )
}

/// Sum equal to `δ_{rs}` that identifies the inverse of the upper
/// coefficient matrix, `r ≤ s`.
pub fn inverse_orthogonality_sum(lp: &LimitParams, r: usize, s: usize) -> Result<SumValue> {
    check_rs(lp, r, s)?;
    if r > s {
        return Err(QsError::domain("the orthogonality sum needs r <= s"));
    }
    let (n, r, s) = (lp.n as i64, r as i64, s as i64);
    let LimitParams { a, b1, c, .. } = *lp;
    finite_sum((r..=s).map(|j| {
        Ok(sign(j - r)
            * ipow(a * ipow(c, -(n - 1)), s - r)
            * ipow(c, j * (j - s) - (j - r) * (j + r - 1) / 2)
            * qpoch_int(c, c, s)?
            / (den(c, c, r, j)? * den(c, c, j - r, j)? * den(c, c, s - j, j)?)
            * qpoch_int(b1 * ipow(c, n - s), c, s - r)?
            / (den(a * b1 * ipow(c, -2 * (j - 1)), c, j - r, j)? * den(a * b1 * ipow(c, -(j + s - 1)), c, s - j, j)?))
    }))
}

/// [`inverse_orthogonality_sum`] for `r < s` through the rational vanishing
/// sum at `z = a b1 c^{−2r}`, `k = s − r`.
pub fn inverse_orthogonality_via_lemma(lp: &LimitParams, r: usize, s: usize) -> Result<SumValue> {
    let (n, r, s) = (lp.n as i64, r as i64, s as i64);
    let k = s - r;
    let LimitParams { a, b1, c, .. } = *lp;
    let pre = ipow(a * ipow(c, -(n + r - 1)), k) * qpoch_int(c, c, r + k)? * qpoch_int(b1 * ipow(c, n - s), c, k)?
        / den(c, c, r, 0)?;
    let v = qbinomial_null_sum_rational(a * b1 * ipow(c, -2 * r), c, k)?;
    Ok(SumValue { value: pre * v.value, scale: pre.norm() * v.scale })
}

/// The three telescoping products, each identically 1:
/// `∏_r (w c^{−(n−2r−1)}; c)_{n−r}/(w c^{−(n−r)}; c)_r`,
/// `∏_r (X c^{n−2r+1}; c)_r/(X c^{−r}; c)_{n−r}` with `X = w b1/b2`, and
/// `∏_r (a b1 c^{−2(r−1)}; c)_r/(a b1 c^{−(n−1+r)}; c)_{n−r}`.
pub fn det_telescopes(lp: &LimitParams) -> Result<[C64; 3]> {
    let n = lp.n as i64;
    let LimitParams { a, b1, b2, c, w, .. } = *lp;
    let x = w * b1 / b2;
    let ab = a * b1;
    let mut out = [ONE; 3];
    for r in 0..=n {
        out[0] *= qpoch_int(w * ipow(c, -(n - 2 * r - 1)), c, n - r)? / den(w * ipow(c, -(n - r)), c, r, r)?;
        out[1] *= qpoch_int(x * ipow(c, n - 2 * r + 1), c, r)? / den(x * ipow(c, -r), c, n - r, r)?;
        out[2] *= qpoch_int(ab * ipow(c, -2 * (r - 1)), c, r)? / den(ab * ipow(c, -(n - 1 + r)), c, n - r, r)?;
    }
    Ok(out)
}

fn lp_json(lp: &LimitParams) -> serde_json::Value {
    serde_json::to_value(lp).expect("limit parameters serialize")
}

pub fn check_unit_sum(z: C64, y: C64, c: C64, k: i64) -> Result<IdentityCheck> {
    let v = qbinomial_unit_sum(z, y, c, k)?;
    let inputs = serde_json::json!({ "z": cj(z), "y": cj(y), "c": cj(c), "k": k });
    Ok(IdentityCheck::new("qbinomial-unit-sum", inputs, v.value, ONE, v.scale))
}

pub fn check_null_sum(z: C64, c: C64, k: i64) -> Result<IdentityCheck> {
    let v = qbinomial_null_sum(z, c, k)?;
    let inputs = serde_json::json!({ "z": cj(z), "c": cj(c), "k": k });
    Ok(IdentityCheck::new("qbinomial-null-sum", inputs, v.value, C64::new(0.0, 0.0), v.scale))
}

pub fn check_null_sum_rational(z: C64, c: C64, k: i64) -> Result<IdentityCheck> {
    let v = qbinomial_null_sum_rational(z, c, k)?;
    let inputs = serde_json::json!({ "z": cj(z), "c": cj(c), "k": k });
    Ok(IdentityCheck::new("qbinomial-null-sum-rational", inputs, v.value, C64::new(0.0, 0.0), v.scale))
}

pub fn check_lower_reconstruction_sum(lp: &LimitParams, r: usize, s: usize) -> Result<IdentityCheck> {
    let v = lower_reconstruction_sum(lp, r, s)?;
    let inputs = serde_json::json!({ "params": lp_json(lp), "r": r, "s": s });
    Ok(IdentityCheck::new("lower-reconstruction-sum", inputs, v.value, ONE, v.scale))
}

pub fn check_upper_reconstruction_sum(lp: &LimitParams, r: usize, s: usize) -> Result<IdentityCheck> {
    let v = upper_reconstruction_sum(lp, r, s)?;
    let inputs = serde_json::json!({ "params": lp_json(lp), "r": r, "s": s });
    Ok(IdentityCheck::new("upper-reconstruction-sum", inputs, v.value, ONE, v.scale))
}

pub fn check_inverse_orthogonality_sum(lp: &LimitParams, r: usize, s: usize) -> Result<IdentityCheck> {
    let v = inverse_orthogonality_sum(lp, r, s)?;
    let expected = if r == s { ONE } else { C64::new(0.0, 0.0) };
    let inputs = serde_json::json!({ "params": lp_json(lp), "r": r, "s": s });
    Ok(IdentityCheck::new("inverse-orthogonality-sum", inputs, v.value, expected, v.scale))
}

pub fn check_det_telescopes(lp: &LimitParams) -> Result<Vec<IdentityCheck>> {
    let t = det_telescopes(lp)?;
    let names = ["telescope-w", "telescope-wb1-over-b2", "telescope-ab1"];
    Ok(names
        .iter()
        .zip(t)
        .map(|(name, v)| IdentityCheck::new(name, serde_json::json!({ "params": lp_json(lp) }), v, ONE, 1.0))
        .collect())
}

fn random_in_annulus(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    crate::params::random_unit_annulus(rng, lo, hi)
}

/// Seeded sweep of both master lemmas: `draws` draws for every `k` in
/// `1..=k_max`, with `|c| ∈ (0.05, 0.95)` and `|z|, |y| ∈ (0.2, 1.5)`.
/// Draws that hit a pole (or come within `1e-6` of one) are redrawn.
/// Each draw uses its own stream, so the output does not depend on the
/// thread count.
pub fn lemma_sweep(seed: u64, draws: usize, k_max: i64) -> Vec<IdentityCheck> {
    let jobs: Vec<(i64, usize)> = (1..=k_max).flat_map(|k| (0..draws).map(move |d| (k, d))).collect();
    jobs.par_iter()
        .flat_map_iter(|&(k, d)| {
            let stream = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add((k as u64) << 32 | d as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            loop {
                let c = random_in_annulus(&mut rng, 0.05, 0.95);
                let z = random_in_annulus(&mut rng, 0.2, 1.5);
                let y = random_in_annulus(&mut rng, 0.2, 1.5);
                if near_pole(z, c, k) {
                    continue;
                }
                let (Ok(u), Ok(nl)) = (check_unit_sum(z, y, c, k), check_null_sum(z, c, k)) else {
                    continue;
                };
                let mut out = vec![u.with_seed(stream), nl.with_seed(stream)];
                if let Ok(rf) = check_null_sum_rational(z, c, k) {
                    out.push(rf.with_seed(stream));
                }
                break out;
            }
        })
        .collect()
}

fn near_pole(z: C64, c: C64, k: i64) -> bool {
    (-3 * k..=3 * k).any(|e| (ONE - z * ipow(c, e)).norm() < 1e-6)
}

/// Seeded check of Kadell's antisymmetrization for every rank
/// `1..=n_max` and every subset `J`: `draws` random `(Q, t)` per rank with
/// `|Q| ∈ (0.2, 0.9)` and `|t_j| ∈ (0.5, 1.5)`. The term scale is the
/// symmetrized sum of absolute values of the summand.
pub fn kadell_sweep(seed: u64, draws: usize, n_max: usize) -> Result<Vec<IdentityCheck>> {
    if n_max > weights::MAX_PERMUTATION_RANK {
        return Err(QsError::ResourceLimit(format!(
            "Kadell sweep rank {n_max} exceeds {}",
            weights::MAX_PERMUTATION_RANK
        )));
    }
    let jobs: Vec<(usize, usize)> = (1..=n_max).flat_map(|n| (0..draws).map(move |d| (n, d))).collect();
    let nested: Vec<Vec<IdentityCheck>> = jobs
        .par_iter()
        .map(|&(n, d)| {
            let stream = seed.wrapping_mul(0xD1B5_4A32_D192_ED03).wrapping_add((n as u64) << 32 | d as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            let big_q = random_in_annulus(&mut rng, 0.2, 0.9);
            let t: Vec<C64> = (0..n).map(|_| random_in_annulus(&mut rng, 0.5, 1.5)).collect();
            (0..1usize << n)
                .map(|mask| {
                    let subset: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
                    let lhs = weights::kadell_lhs(&subset, big_q, &t)?;
                    let rhs = weights::kadell_rhs(&subset, big_q, &t)?;
                    let scale = weights::sym_sum(
                        |s| {
                            Ok(C64::new(
                                (subset.iter().map(|&j| s[j]).product::<C64>() * weights::pair_product(s, big_q))
                                    .norm(),
                                0.0,
                            ))
                        },
                        &t,
                    )?
                    .re;
                    let inputs = serde_json::json!({
                        "n": n,
                        "subset": subset,
                        "Q": cj(big_q),
                        "t": t.iter().map(|&z| cj(z)).collect::<Vec<_>>(),
                    });
                    Ok(IdentityCheck::new("kadell", inputs, lhs, rhs, scale).with_seed(stream))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}
