//! The integrand: the weight `Φ`, its pole-free form `Φ′`, Matsuo's
//! rational bases, alternating and symmetric sums over `S_n`, the cocycle
//! `U_σ`, the b-function and Kadell's antisymmetrization formula.

use crate::compensated::CompensatedSum;
use crate::error::{QsError, Result};
use crate::params::ParamSet;
use crate::qseries::{qpoch_int, theta, QContext};
use itertools::Itertools;
use num_complex::Complex64 as C64;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A linear factor smaller than this in modulus counts as a pole.
pub const POLE_RADIUS: f64 = 1e-12;

/// Largest `n` accepted by the sums over `S_n`.
pub const MAX_PERMUTATION_RANK: usize = 8;

/// Point `t = (t_1, …, t_n)` with a fixed logarithm per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub t: Vec<C64>,
    pub log_t: Vec<C64>,
}

impl Point {
    /// Coordinates with principal logarithms.
    pub fn new(t: Vec<C64>) -> Result<Self> {
        if t.iter().any(|z| z.norm() == 0.0 || !z.is_finite()) {
            return Err(QsError::domain("point coordinates must be nonzero and finite"));
        }
        let log_t = t.iter().map(|z| z.ln()).collect();
        Ok(Self { t, log_t })
    }

    /// Coordinates given through their logarithms.
    pub fn from_logs(log_t: Vec<C64>) -> Self {
        Self { t: log_t.iter().map(|l| l.exp()).collect(), log_t }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `(t_{σ(1)}, …, t_{σ(n)})` with `σ` given 0-based.
    pub fn permuted(&self, sigma: &[usize]) -> Self {
        Self { t: sigma.iter().map(|&i| self.t[i]).collect(), log_t: sigma.iter().map(|&i| self.log_t[i]).collect() }
    }

    /// `T^χ t = (q^{χ_1} t_1, …, q^{χ_n} t_n)`.
    pub fn shifted(&self, q: C64, chi: &[i64]) -> Self {
        let lq = q.ln();
        Self::from_logs(self.log_t.iter().zip(chi).map(|(l, &k)| l + lq * k as f64).collect())
    }
}

/// Composition `(l_1, …, l_m)` of `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndex {
    pub l: Vec<usize>,
}

impl MultiIndex {
    pub fn new(l: Vec<usize>, n: usize) -> Result<Self> {
        if l.iter().sum::<usize>() != n {
            return Err(QsError::domain(format!("multi-index {l:?} does not sum to {n}")));
        }
        Ok(Self { l })
    }
}

fn check_len(p: &ParamSet, t: &Point) -> Result<()> {
    if t.len() != p.n {
        return Err(QsError::domain(format!("point has {} coordinates, expected {}", t.len(), p.n)));
    }
    Ok(())
}

fn rational_den(z: C64, what: &str) -> Result<C64> {
    if z.norm() < POLE_RADIUS {
        return Err(QsError::singular(what.to_string(), 0));
    }
    Ok(z)
}

/// `(x; q)_∞ / (y; q)_∞` with the denominator checked against [`POLE_RADIUS`].
fn inf_ratio(x: C64, y: C64, ctx: &QContext) -> Result<C64> {
    let mut v = y;
    let mut k = 0i64;
    while v.norm() >= ctx.series_tol || k < ctx.product_order as i64 {
        if (ONE - v).norm() < POLE_RADIUS {
            return Err(QsError::singular("(y; q)_inf in the weight", k));
        }
        v *= ctx.q;
        k += 1;
        if v.norm() == 0.0 {
            break;
        }
    }
    crate::qseries::qratio_inf(x, y, ctx.q, ctx)
}

/// Exponent `α_j = α̃ − n + j − 2(j−1)γ` for 1-based `j`; `j0` is 0-based.
pub fn alpha_j(p: &ParamSet, j0: usize) -> Result<C64> {
    let e = p.exps()?;
    Ok(e.alpha - p.n as f64 + (j0 + 1) as f64 - e.gamma * (2.0 * j0 as f64))
}

/// `t_1^{α_1} ⋯ t_n^{α_n}` on the branch stored in the point.
pub fn monomial_power(p: &ParamSet, t: &Point) -> Result<C64> {
    let mut e = C64::new(0.0, 0.0);
    for j in 0..p.n {
        e += alpha_j(p, j)? * t.log_t[j];
    }
    Ok(e.exp())
}

fn pair_factor(p: &ParamSet, ti: C64, tj: C64, ctx: &QContext) -> Result<C64> {
    let u = tj / ti;
    inf_ratio(p.q / p.c * u, p.c * u, ctx)
}

/// The weight `Φ(t) = ∏ t_j^{α_j} ∏_{j,k} (t_j/x_k)_∞/(b_k t_j/x_k)_∞
/// ∏_{i<j} (q c^{-1} t_j/t_i)_∞/(c t_j/t_i)_∞`.
pub fn phi_weight(p: &ParamSet, t: &Point, ctx: &QContext) -> Result<C64> {
    check_len(p, t)?;
    let mut v = monomial_power(p, t)?;
    for &tj in &t.t {
        v *= inf_ratio(tj / p.x1, p.b1 * tj / p.x1, ctx)? * inf_ratio(tj / p.x2, p.b2 * tj / p.x2, ctx)?;
    }
    for i in 0..p.n {
        for j in i + 1..p.n {
            v *= pair_factor(p, t.t[i], t.t[j], ctx)?;
        }
    }
    Ok(v)
}

/// Pole-free weight `Φ′` with numerators `(q t_j/x_k)_∞` and no monomial.
pub fn phi_prime(p: &ParamSet, t: &Point, ctx: &QContext) -> Result<C64> {
    check_len(p, t)?;
    let q = p.q;
    let mut v = ONE;
    for &tj in &t.t {
        v *= inf_ratio(q * tj / p.x1, p.b1 * tj / p.x1, ctx)? * inf_ratio(q * tj / p.x2, p.b2 * tj / p.x2, ctx)?;
    }
    for i in 0..p.n {
        for j in i + 1..p.n {
            v *= pair_factor(p, t.t[i], t.t[j], ctx)?;
        }
    }
    Ok(v)
}

/// `(x; q)_∞ / (y; q)_∞` where a vanishing denominator factor `1 − y q^k`
/// is replaced by its residue `−1` in the logarithmic variable; returns the
/// value and the number of replaced factors.
fn inf_ratio_residue(x: C64, y: C64, ctx: &QContext) -> (C64, usize) {
    let mut acc = ONE;
    let (mut u, mut v) = (x, y);
    let mut k = 0usize;
    let mut poles = 0;
    while k < ctx.product_order || u.norm() >= ctx.series_tol || v.norm() >= ctx.series_tol {
        let den = ONE - v;
        let num = ONE - u;
        if den.norm() < POLE_RADIUS {
            poles += 1;
            acc *= -num;
        } else {
            acc *= num / den;
        }
        u *= ctx.q;
        v *= ctx.q;
        k += 1;
        if u.norm() == 0.0 && v.norm() == 0.0 && k >= ctx.product_order {
            break;
        }
    }
    (acc, poles)
}

/// Iterated residue of `Φ′` at a point where exactly `n` denominator factors
/// vanish (the η-type characteristic points), in the variables `log t_j`.
pub fn phi_prime_residue(p: &ParamSet, t: &Point, ctx: &QContext) -> Result<C64> {
    check_len(p, t)?;
    let q = p.q;
    let mut v = ONE;
    let mut poles = 0;
    let mut take = |(val, k): (C64, usize)| {
        v *= val;
        poles += k;
    };
    for &tj in &t.t {
        take(inf_ratio_residue(q * tj / p.x1, p.b1 * tj / p.x1, ctx));
        take(inf_ratio_residue(q * tj / p.x2, p.b2 * tj / p.x2, ctx));
    }
    for i in 0..p.n {
        for j in i + 1..p.n {
            let u = t.t[j] / t.t[i];
            take(inf_ratio_residue(q / p.c * u, p.c * u, ctx));
        }
    }
    if poles != p.n {
        return Err(QsError::domain(format!("expected {} simple poles at the point, found {poles}", p.n)));
    }
    Ok(v)
}

/// Sign of a permutation given 0-based.
pub fn permutation_sign(sigma: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                s = -s;
            }
        }
    }
    s
}

fn check_rank(n: usize) -> Result<()> {
    if n > MAX_PERMUTATION_RANK {
        return Err(QsError::ResourceLimit(format!("sum over S_{n} exceeds the limit n <= {MAX_PERMUTATION_RANK}")));
    }
    Ok(())
}

/// `𝒜g(t) = Σ_σ sgn σ · g(t_{σ(1)}, …, t_{σ(n)})`, compensated.
pub fn alt_sum(f: impl Fn(&[C64]) -> Result<C64>, t: &[C64]) -> Result<C64> {
    perm_sum(f, t, true)
}

/// `𝒮g(t) = Σ_σ g(t_{σ(1)}, …, t_{σ(n)})`, compensated.
pub fn sym_sum(f: impl Fn(&[C64]) -> Result<C64>, t: &[C64]) -> Result<C64> {
    perm_sum(f, t, false)
}

fn perm_sum(f: impl Fn(&[C64]) -> Result<C64>, t: &[C64], signed: bool) -> Result<C64> {
    let n = t.len();
    check_rank(n)?;
    let mut acc = CompensatedSum::new();
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for sigma in (0..n).permutations(n) {
        for (k, &i) in sigma.iter().enumerate() {
            buf[k] = t[i];
        }
        let s = if signed { permutation_sign(&sigma) } else { 1.0 };
        acc.add(f(&buf)? * s);
    }
    Ok(acc.value())
}

/// `∏_{i<j} (t_i − κ t_j)`.
pub fn pair_product(t: &[C64], kappa: C64) -> C64 {
    let mut v = ONE;
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            v *= t[i] - kappa * t[j];
        }
    }
    v
}

/// Matsuo's function `ψ_l` for points `x_1..x_m` and characters `b_1..b_m`:
/// `𝒜[∏_{j=1}^m ∏_{k ≤ l_j+…+l_m} (1 − b_{j−1}t_k/x_{j−1})/(1 − t_k/x_j)
/// ∏_{i<j}(t_i − c^{-1}t_j)]` with `b_0 = 0`.
pub fn matsuo_psi_general(xs: &[C64], bs: &[C64], c: C64, l: &MultiIndex, t: &[C64]) -> Result<C64> {
    let m = xs.len();
    if bs.len() != m || l.l.len() != m {
        return Err(QsError::domain("points, characters and multi-index must have equal length"));
    }
    let tails: Vec<usize> = (0..m).map(|j| l.l[j..].iter().sum()).collect();
    let ci = ONE / c;
    alt_sum(
        |s| {
            let mut v = pair_product(s, ci);
            for j in 0..m {
                for &tk in &s[..tails[j]] {
                    let num = if j == 0 { ONE } else { ONE - bs[j - 1] * tk / xs[j - 1] };
                    v *= num / rational_den(ONE - tk / xs[j], "1 - t/x")?;
                }
            }
            Ok(v)
        },
        t,
    )
}

/// `ψ_l` for the two points of the parameter set.
pub fn matsuo_psi(p: &ParamSet, l: &MultiIndex, t: &Point) -> Result<C64> {
    check_len(p, t)?;
    matsuo_psi_general(&[p.x1, p.x2], &[p.b1, p.b2], p.c, l, &t.t)
}

/// `φ_s(t) = 𝒜[∏_k 1/(1 − t_k/x2) ∏_{k ≤ n−s} (1 − b2 t_k/x2)/(1 − t_k/x1)
/// ∏_{i<j}(t_i − c^{-1}t_j)]`.
pub fn basis_phi_s(p: &ParamSet, s: usize, t: &Point) -> Result<C64> {
    check_len(p, t)?;
    if s > p.n {
        return Err(QsError::domain(format!("basis index {s} exceeds n = {}", p.n)));
    }
    let ci = ONE / p.c;
    alt_sum(
        |u| {
            let mut v = pair_product(u, ci);
            for (k, &tk) in u.iter().enumerate() {
                v /= rational_den(ONE - tk / p.x2, "1 - t/x2")?;
                if k < p.n - s {
                    v *= (ONE - p.b2 * tk / p.x2) / rational_den(ONE - tk / p.x1, "1 - t/x1")?;
                }
            }
            Ok(v)
        },
        &t.t,
    )
}

/// `φ_s` through the swap `(x1, b1) ↔ (x2, b2)` applied to `ψ_{(s, n−s)}`.
pub fn basis_phi_s_via_swap(p: &ParamSet, s: usize, t: &Point) -> Result<C64> {
    let l = MultiIndex::new(vec![s, p.n - s], p.n)?;
    matsuo_psi(&p.tau(), &l, t)
}

/// Pairs `i < j` (0-based) with `σ^{-1}(i) > σ^{-1}(j)`.
fn inversions(sigma: &[usize]) -> Vec<(usize, usize)> {
    let n = sigma.len();
    let mut inv = vec![0usize; n];
    for (k, &s) in sigma.iter().enumerate() {
        inv[s] = k;
    }
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| inv[i] > inv[j]).collect()
}

fn check_permutation(sigma: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if sigma.len() != n || sigma.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(QsError::domain(format!("{sigma:?} is not a permutation of 0..{n}")));
    }
    Ok(())
}

/// `U_σ(t) = ∏_{inversions (i,j)} (t_j/t_i)^{2γ−1} ϑ(c t_j/t_i)/ϑ(q c^{-1} t_j/t_i)`,
/// so that `Φ(t_{σ(1)}, …, t_{σ(n)}) = U_σ(t) Φ(t)`.
pub fn cocycle_u(p: &ParamSet, sigma: &[usize], t: &Point, ctx: &QContext) -> Result<C64> {
    check_len(p, t)?;
    check_permutation(sigma, p.n)?;
    let g = p.exps()?.gamma;
    let mut v = ONE;
    for (i, j) in inversions(sigma) {
        let u = t.t[j] / t.t[i];
        let lu = t.log_t[j] - t.log_t[i];
        let den = theta(p.q / p.c * u, ctx)?;
        if den.norm() < POLE_RADIUS {
            return Err(QsError::singular("theta denominator of the cocycle", (i * p.n + j) as i64));
        }
        v *= ((g * 2.0 - 1.0) * lu).exp() * theta(p.c * u, ctx)? / den;
    }
    Ok(v)
}

/// Second form `sgn σ ∏ q^{−γ} (t_j/t_i)^{2γ} ϑ(c t_j/t_i)/ϑ(c^{-1} t_j/t_i)`.
pub fn cocycle_u_signed(p: &ParamSet, sigma: &[usize], t: &Point, ctx: &QContext) -> Result<C64> {
    check_len(p, t)?;
    check_permutation(sigma, p.n)?;
    let g = p.exps()?.gamma;
    let mut v = C64::new(permutation_sign(sigma), 0.0);
    for (i, j) in inversions(sigma) {
        let u = t.t[j] / t.t[i];
        let lu = t.log_t[j] - t.log_t[i];
        let den = theta(u / p.c, ctx)?;
        if den.norm() < POLE_RADIUS {
            return Err(QsError::singular("theta denominator of the cocycle", (i * p.n + j) as i64));
        }
        v *= (g * 2.0 * lu).exp() / p.c * theta(p.c * u, ctx)? / den;
    }
    Ok(v)
}

/// `(x; q)_d / (y; q)_d` for any integer `d`, factor by factor.
fn finite_ratio(x: C64, y: C64, q: C64, d: i64, what: &str) -> Result<C64> {
    let mut v = ONE;
    if d >= 0 {
        let mut qk = ONE;
        for _ in 0..d {
            v *= (ONE - x * qk) / rational_den(ONE - y * qk, what)?;
            qk *= q;
        }
    } else {
        let qi = ONE / q;
        let mut qk = qi;
        for _ in 0..(-d) {
            v *= (ONE - y * qk) / rational_den(ONE - x * qk, what)?;
            qk *= qi;
        }
    }
    Ok(v)
}

/// `b_χ(t) = Φ(T^χ t)/Φ(t)` as a finite product of Pochhammer quotients.
pub fn b_function(p: &ParamSet, chi: &[i64], t: &Point) -> Result<C64> {
    check_len(p, t)?;
    if chi.len() != p.n {
        return Err(QsError::domain("shift vector length must equal n"));
    }
    let q = p.q;
    let lq = q.ln();
    let mut v = ONE;
    for (j, (&tj, &k)) in t.t.iter().zip(chi).enumerate() {
        v *= (alpha_j(p, j)? * lq * k as f64).exp();
        v *= finite_ratio(p.b1 * tj / p.x1, tj / p.x1, q, k, "b-function denominator")?;
        v *= finite_ratio(p.b2 * tj / p.x2, tj / p.x2, q, k, "b-function denominator")?;
    }
    for i in 0..p.n {
        for j in i + 1..p.n {
            let u = t.t[j] / t.t[i];
            v *= finite_ratio(p.c * u, q / p.c * u, q, chi[j] - chi[i], "b-function pair denominator")?;
        }
    }
    Ok(v)
}

/// `∇_χ f(t) = f(t) − b_χ(t) f(T^χ t)`.
pub fn nabla(p: &ParamSet, chi: &[i64], f: impl Fn(&[C64]) -> Result<C64>, t: &Point) -> Result<C64> {
    let shifted = t.shifted(p.q, chi);
    Ok(f(&t.t)? - b_function(p, chi, t)? * f(&shifted.t)?)
}

/// Kadell's left side `𝒜{∏_{j∈J} t_j ∏_{i<j}(t_i − Q t_j)}`; `J` is 0-based.
pub fn kadell_lhs(subset: &[usize], big_q: C64, t: &[C64]) -> Result<C64> {
    alt_sum(|s| Ok(subset.iter().map(|&j| s[j]).product::<C64>() * pair_product(s, big_q)), t)
}

/// Elementary symmetric polynomial `e_k(t)`.
pub fn elementary_symmetric(k: usize, t: &[C64]) -> C64 {
    let mut e = vec![C64::new(0.0, 0.0); k + 1];
    e[0] = ONE;
    for &x in t {
        for i in (1..=k).rev() {
            e[i] = e[i] + e[i - 1] * x;
        }
    }
    e[k]
}

/// Kadell's right side
/// `Q^{e(J)} (Q;Q)_{|J|} (Q;Q)_{n−|J|} / (1−Q)^n · e_{|J|}(t) ∏_{i<j}(t_i − t_j)`,
/// with `e(J) = #{i < j : i ∉ J, j ∈ J}`.
pub fn kadell_rhs(subset: &[usize], big_q: C64, t: &[C64]) -> Result<C64> {
    let n = t.len();
    if subset.iter().any(|&j| j >= n) {
        return Err(QsError::domain("subset index out of range"));
    }
    let m = subset.len();
    let inside = |i: usize| subset.contains(&i);
    let e = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| !inside(i) && inside(j)).count();
    let den = (ONE - big_q).powu(n as u32);
    Ok(big_q.powu(e as u32) * qpoch_int(big_q, big_q, m as i64)? * qpoch_int(big_q, big_q, (n - m) as i64)?
        / rational_den(den, "1 - Q")?
        * elementary_symmetric(m, t)
        * pair_product(t, ONE))
}

/// Family of characteristic cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    Xi,
    Eta,
    Zeta,
    Delta,
}

/// Base point of a characteristic cycle: `n − r` coordinates on the `x1`
/// block followed by `r` on the `x2` block.
///
/// A block of ξ-type is `x c^{j}`; a block of η-type is `x b^{-1} c^{-j}`.
/// ζ uses η-type on `x1` and ξ-type on `x2`; δ the reverse.
pub fn characteristic_point(p: &ParamSet, kind: CycleKind, r: usize) -> Result<Point> {
    if r > p.n {
        return Err(QsError::domain(format!("cycle index {r} exceeds n = {}", p.n)));
    }
    let lq = p.q.ln();
    let (lc, lb1, lb2) = match p.exponents {
        Some(e) => (e.gamma * lq, e.beta1 * lq, e.beta2 * lq),
        None => (p.c.ln(), p.b1.ln(), p.b2.ln()),
    };
    let (eta1, eta2) = match kind {
        CycleKind::Xi => (false, false),
        CycleKind::Eta => (true, true),
        CycleKind::Zeta => (true, false),
        CycleKind::Delta => (false, true),
    };
    let block = |lx: C64, lb: C64, eta: bool, len: usize| -> Vec<C64> {
        (0..len).map(|j| if eta { lx - lb - lc * j as f64 } else { lx + lc * j as f64 }).collect()
    };
    let mut logs = block(p.log_x1, lb1, eta1, p.n - r);
    logs.extend(block(p.log_x2, lb2, eta2, r));
    Ok(Point::from_logs(logs))
}
