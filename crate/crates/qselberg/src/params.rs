//! Parameter records: the full finite-q set and the character-only set used
//! by the q → 0 limit formulas.

use crate::error::{QsError, Result};
use crate::qseries::{character, ipow, QContext};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Default distance from 1 that every denominator character must keep.
pub const GENERICITY_EPS: f64 = 1e-9;

/// Raw exponents `α̃, β₁, β₂, γ`, needed whenever a lattice sum shifts them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub alpha: C64,
    pub beta1: C64,
    pub beta2: C64,
    pub gamma: C64,
}

/// Rank, nome, characters and points.
///
/// `a = q^{α̃}`, `b1 = q^{β₁}`, `b2 = q^{β₂}`, `c = q^γ`. The logarithms of
/// the points fix the branch used for every power `t^{α_j}` on the lattices
/// anchored at `x1` and `x2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub n: usize,
    pub q: C64,
    pub a: C64,
    pub b1: C64,
    pub b2: C64,
    pub c: C64,
    pub x1: C64,
    pub x2: C64,
    pub log_x1: C64,
    pub log_x2: C64,
    pub exponents: Option<Exponents>,
}

/// Characters only, with `w = x2 / x1`; the regime of the limit formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitParams {
    pub n: usize,
    pub a: C64,
    pub b1: C64,
    pub b2: C64,
    pub c: C64,
    pub w: C64,
}

fn check_point(x: C64, name: &str) -> Result<()> {
    if x.norm() == 0.0 || !x.is_finite() {
        return Err(QsError::domain(format!("{name} must be a nonzero finite number")));
    }
    Ok(())
}

impl ParamSet {
    /// Build from characters. Lattice sums need exponents, so this form
    /// serves the closed-form matrix builders.
    #[allow(clippy::too_many_arguments)]
    pub fn from_characters(n: usize, q: C64, a: C64, b1: C64, b2: C64, c: C64, x1: C64, x2: C64) -> Result<Self> {
        if n == 0 {
            return Err(QsError::domain("rank n must be at least 1"));
        }
        QContext::new(q)?;
        check_point(x1, "x1")?;
        check_point(x2, "x2")?;
        for (z, name) in [(a, "a"), (b1, "b1"), (b2, "b2"), (c, "c")] {
            check_point(z, name)?;
        }
        Ok(Self { n, q, a, b1, b2, c, x1, x2, log_x1: x1.ln(), log_x2: x2.ln(), exponents: None })
    }

    /// Build from exponents; characters are `q^e` on the principal branch.
    #[allow(clippy::too_many_arguments)]
    pub fn from_exponents(
        n: usize,
        q: C64,
        alpha: C64,
        beta1: C64,
        beta2: C64,
        gamma: C64,
        x1: C64,
        x2: C64,
    ) -> Result<Self> {
        let mut p = Self::from_characters(
            n,
            q,
            character(q, alpha),
            character(q, beta1),
            character(q, beta2),
            character(q, gamma),
            x1,
            x2,
        )?;
        p.exponents = Some(Exponents { alpha, beta1, beta2, gamma });
        Ok(p)
    }

    pub fn from_limit(lp: &LimitParams, q: C64, x1: C64, x2: C64) -> Result<Self> {
        let p = Self::from_characters(lp.n, q, lp.a, lp.b1, lp.b2, lp.c, x1, x2)?;
        if (p.w() - lp.w).norm() > 1e-14 * lp.w.norm().max(1.0) {
            return Err(QsError::domain("x2/x1 must equal the limit parameter w"));
        }
        Ok(p)
    }

    pub fn w(&self) -> C64 {
        self.x2 / self.x1
    }

    pub fn exps(&self) -> Result<Exponents> {
        self.exponents.ok_or_else(|| QsError::domain("this operation needs raw exponents (alpha, beta1, beta2, gamma)"))
    }

    pub fn ctx(&self) -> Result<QContext> {
        QContext::new(self.q)
    }

    pub fn limit_params(&self) -> LimitParams {
        LimitParams { n: self.n, a: self.a, b1: self.b1, b2: self.b2, c: self.c, w: self.w() }
    }

    /// Swap `(x1, β₁) ↔ (x2, β₂)`.
    pub fn tau(&self) -> Self {
        let mut p = *self;
        std::mem::swap(&mut p.b1, &mut p.b2);
        std::mem::swap(&mut p.x1, &mut p.x2);
        std::mem::swap(&mut p.log_x1, &mut p.log_x2);
        if let Some(e) = p.exponents.as_mut() {
            std::mem::swap(&mut e.beta1, &mut e.beta2);
        }
        p
    }

    /// `x2 → q x2`, continuing the branch of `log x2`.
    pub fn shift_x2(&self) -> Self {
        let mut p = *self;
        p.x2 = self.x2 * self.q;
        p.log_x2 = self.log_x2 + self.q.ln();
        p
    }

    /// `α̃ → α̃ + 1`, i.e. `a → a q`.
    pub fn shift_alpha(&self) -> Self {
        let mut p = *self;
        p.a = self.a * self.q;
        if let Some(e) = p.exponents.as_mut() {
            e.alpha += 1.0;
        }
        p
    }

    /// Replace the points, keeping everything else.
    pub fn with_points(&self, x1: C64, x2: C64) -> Self {
        let mut p = *self;
        p.x1 = x1;
        p.x2 = x2;
        p.log_x1 = x1.ln();
        p.log_x2 = x2.ln();
        p
    }

    /// Reject parameters for which a denominator character of a closed form
    /// lies within `eps` of 1.
    pub fn check_generic(&self, eps: f64) -> Result<()> {
        self.limit_params().check_generic(eps)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pair = |z: C64| [z.re, z.im];
        let mut v = serde_json::json!({
            "n": self.n,
            "q": pair(self.q),
            "a": pair(self.a),
            "b1": pair(self.b1),
            "b2": pair(self.b2),
            "c": pair(self.c),
            "x1": pair(self.x1),
            "x2": pair(self.x2),
        });
        if let Some(e) = self.exponents {
            v["exponents"] = serde_json::json!({
                "alpha": pair(e.alpha),
                "beta1": pair(e.beta1),
                "beta2": pair(e.beta2),
                "gamma": pair(e.gamma),
            });
        }
        v
    }

    /// Parse the flat JSON form. When exponents are present they take
    /// precedence and the characters are recomputed from them.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let get = |key: &str| -> Result<C64> {
            let pair: [f64; 2] = serde_json::from_value(v[key].clone())
                .map_err(|e| QsError::domain(format!("parameter `{key}`: {e}")))?;
            Ok(C64::new(pair[0], pair[1]))
        };
        let n = v["n"].as_u64().ok_or_else(|| QsError::domain("parameter `n` missing"))? as usize;
        let (q, x1, x2) = (get("q")?, get("x1")?, get("x2")?);
        if v.get("exponents").is_some_and(|e| !e.is_null()) {
            let e = &v["exponents"];
            let ge = |key: &str| -> Result<C64> {
                let pair: [f64; 2] = serde_json::from_value(e[key].clone())
                    .map_err(|err| QsError::domain(format!("exponent `{key}`: {err}")))?;
                Ok(C64::new(pair[0], pair[1]))
            };
            Self::from_exponents(n, q, ge("alpha")?, ge("beta1")?, ge("beta2")?, ge("gamma")?, x1, x2)
        } else {
            Self::from_characters(n, q, get("a")?, get("b1")?, get("b2")?, get("c")?, x1, x2)
        }
    }

    /// Short hex digest of the canonical JSON form.
    pub fn digest(&self) -> String {
        let text = self.to_json().to_string();
        let hash = Sha256::digest(text.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

impl LimitParams {
    pub fn tau(&self) -> Self {
        Self { n: self.n, a: self.a, b1: self.b2, b2: self.b1, c: self.c, w: C64::new(1.0, 0.0) / self.w }
    }

    /// Every denominator character of the closed forms, for shifts
    /// `k ∈ [-2n, 2n]`, must stay `eps` away from 1.
    pub fn check_generic(&self, eps: f64) -> Result<()> {
        let n = self.n as i64;
        let Self { a, b1, b2, c, w, .. } = *self;
        let one = C64::new(1.0, 0.0);
        let bases: [(&str, C64); 11] = [
            ("c^k x2/x1", w),
            ("a b1 c^k", a * b1),
            ("a b1 b2 c^k", a * b1 * b2),
            ("b1 c^k", b1),
            ("b2 c^k", b2),
            ("c^k x2/x1 b1/b2", w * b1 / b2),
            ("c^k x2/x1 / b2", w / b2),
            ("c^k x2/x1 b1", w * b1),
            ("a c^k", a),
            ("a b2 c^k", a * b2),
            ("c^k x1/x2 / (a b2)", one / (w * a * b2)),
        ];
        for (name, base) in bases {
            for k in -2 * n..=2 * n {
                let v = base * ipow(c, k);
                if (v - one).norm() < eps {
                    return Err(QsError::singular(name, k));
                }
            }
        }
        for k in 1..=2 * n {
            if (ipow(c, k) - one).norm() < eps {
                return Err(QsError::singular("c^k", k));
            }
        }
        Ok(())
    }
}

/// A random complex number of modulus in `[lo, hi]` with uniform phase.
pub fn random_unit_annulus<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> C64 {
    let m = rng.gen_range(lo..hi);
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(m, t)
}

/// Random generic characters for closed-form checks; draws failing the
/// genericity guard are rejected and redrawn.
pub fn random_params<R: Rng>(rng: &mut R, n: usize) -> ParamSet {
    loop {
        let a = random_unit_annulus(rng, 0.3, 0.9);
        let b1 = random_unit_annulus(rng, 0.3, 0.9);
        let b2 = random_unit_annulus(rng, 0.3, 0.9);
        let c = random_unit_annulus(rng, 0.3, 0.9);
        let x1 = random_unit_annulus(rng, 0.3, 0.9) * 2.0;
        let x2 = random_unit_annulus(rng, 0.3, 0.9) * 2.0;
        let p = ParamSet::from_characters(n, C64::new(0.5, 0.0), a, b1, b2, c, x1, x2).expect("valid draw");
        if p.check_generic(1e-3).is_ok() {
            return p;
        }
    }
}

/// `count` draws of [`random_params`] from a ChaCha8 stream seeded with
/// `seed`.
pub fn seeded_draws(n: usize, count: usize, seed: u64) -> Vec<ParamSet> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_params(&mut rng, n)).collect()
}
