//! Truncated Jackson integrals over the ξ-cycles, the solution matrices
//! they form, the direct leading coefficients, and numerical checks of the
//! difference systems and of the vanishing of exact forms.
//!
//! On a ξ-cycle the regularized summand vanishes identically outside the
//! cone where `ν` is nondecreasing inside each of the two blocks (a factor
//! `(q^{1+k})_∞` with `k < 0` appears), so the sums run over that cone
//! inside the box `[0, N]^n`. Terms are grouped in shells of constant
//! `max ν`, evaluated in parallel and reduced in a fixed order.

use crate::compensated::CompensatedSum;
use crate::error::{QsError, Result};
use crate::gauss;
use crate::limits;
use crate::matrix::CMatrix;
use crate::params::ParamSet;
use crate::qseries::QContext;
use crate::report::VerificationReport;
use crate::weights::{self, alt_sum, characteristic_point, pair_product, phi_prime, CycleKind, Point};
use itertools::Itertools;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Truncation radius, stopping tolerance and product settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationConfig {
    /// Lattice radius `N`; indices run over `[0, N]^n`.
    pub n_max: usize,
    /// A sum is accepted when its last shell is at most `tail_tol · |S(N)|`.
    pub tail_tol: f64,
    pub ctx: QContext,
}

impl TruncationConfig {
    pub fn new(n_max: usize, tail_tol: f64, ctx: QContext) -> Result<Self> {
        if n_max == 0 {
            return Err(QsError::domain("lattice radius must be at least 1"));
        }
        if !(tail_tol > 0.0) {
            return Err(QsError::domain("tail tolerance must be positive"));
        }
        Ok(Self { n_max, tail_tol, ctx })
    }

    pub fn for_params(p: &ParamSet, n_max: usize, tail_tol: f64) -> Result<Self> {
        Self::new(n_max, tail_tol, p.ctx()?)
    }
}

/// Rational basis attached to the columns of a solution matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Column `s` holds `φ_s`.
    Phi,
    /// Column `s` holds `ψ_{(n−s, s)}`.
    PsiReversed,
}

/// A truncated lattice sum with its last-shell contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSum {
    pub value: C64,
    /// `|S(N) − S(N−1)|`.
    pub last_shell: f64,
    pub converged: bool,
}

/// Truncation metadata of a solution matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationInfo {
    pub n_max: usize,
    /// Largest `|S(N) − S(N−1)| / |S(N)|` over the entries.
    pub worst_tail: f64,
}

/// `(n+1) × (n+1)` matrix of Jackson integrals; row `r` is the cycle
/// anchored at `ξ` with `r` coordinates on the `x2` block.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionMatrix {
    pub entries: CMatrix,
    pub basis: Basis,
    pub kind: CycleKind,
    pub truncation: TruncationInfo,
}

/// Base logarithms of the ξ-cycle with `r` coordinates on the `x2` block.
pub fn xi_base_logs(p: &ParamSet, r: usize) -> Result<Vec<C64>> {
    p.exps()?;
    Ok(characteristic_point(p, CycleKind::Xi, r)?.log_t)
}

/// Polynomial numerator multiplying `∏_{i<j}(t_i − c^{-1} t_j)` inside the
/// alternation, after the poles at `t = x1, x2` are absorbed into `Φ′`.
fn numerator(p: &ParamSet, basis: Basis, s: usize, t: &[C64]) -> C64 {
    let n = p.n;
    let mut v = pair_product(t, ONE / p.c);
    for (k, &tk) in t.iter().enumerate() {
        v *= match basis {
            Basis::Phi if k < n - s => ONE - p.b2 * tk / p.x2,
            Basis::Phi => ONE - tk / p.x1,
            Basis::PsiReversed if k < s => ONE - p.b1 * tk / p.x1,
            Basis::PsiReversed => ONE - tk / p.x2,
        };
    }
    v
}

/// `(1−q)^n t^α Φ′(t)` at `t = exp(logs)`.
fn prefactor(p: &ParamSet, t: &Point, ctx: &QContext) -> Result<C64> {
    let pp = phi_prime(p, t, ctx)?;
    if pp.norm() == 0.0 {
        return Ok(pp);
    }
    Ok((ONE - p.q).powu(p.n as u32) * weights::monomial_power(p, t)? * pp)
}

fn point_at(p: &ParamSet, base: &[C64], nu: &[i64]) -> Point {
    let lq = p.q.ln();
    Point::from_logs(base.iter().zip(nu).map(|(b, &k)| b + lq * k as f64).collect())
}

/// All `n + 1` column summands of row `r` at lattice index `ν`.
fn row_summands(p: &ParamSet, base: &[C64], basis: Basis, nu: &[i64], ctx: &QContext) -> Result<Vec<C64>> {
    let t = point_at(p, base, nu);
    let pre = prefactor(p, &t, ctx)?;
    if pre.norm() == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); p.n + 1]);
    }
    (0..=p.n).map(|s| Ok(pre * alt_sum(|u| Ok(numerator(p, basis, s, u)), &t.t)?)).collect()
}

/// Regularized summand of row `r`, column `s` at any integer `ν`, negative
/// entries included.
pub fn regularized_summand(p: &ParamSet, r: usize, basis: Basis, s: usize, nu: &[i64], ctx: &QContext) -> Result<C64> {
    if nu.len() != p.n || s > p.n {
        return Err(QsError::domain("lattice index length must equal n and s must not exceed n"));
    }
    let base = xi_base_logs(p, r)?;
    Ok(row_summands(p, &base, basis, nu, ctx)?[s])
}

fn nondecreasing(len: usize, k: usize) -> Vec<Vec<i64>> {
    if len == 0 {
        return vec![vec![]];
    }
    (0..=k as i64).combinations_with_replacement(len).collect()
}

/// Cone indices of the ξ-cycle `r` with `max ν = k`.
pub fn cone_shell(n: usize, r: usize, k: usize) -> Vec<Vec<i64>> {
    let first = nondecreasing(n - r, k);
    let second = nondecreasing(r, k);
    let mut out = Vec::new();
    for a in &first {
        for b in &second {
            let top = a.last().copied().unwrap_or(0).max(b.last().copied().unwrap_or(0));
            if top == k as i64 {
                out.push(a.iter().chain(b).copied().collect());
            }
        }
    }
    out
}

/// Truncated sums for all columns of row `r`.
pub fn jackson_row(p: &ParamSet, r: usize, basis: Basis, tc: &TruncationConfig) -> Result<Vec<LatticeSum>> {
    if r > p.n {
        return Err(QsError::domain(format!("cycle index {r} exceeds n = {}", p.n)));
    }
    let base = xi_base_logs(p, r)?;
    let dim = p.n + 1;
    let mut acc = vec![CompensatedSum::new(); dim];
    let mut last = vec![0.0; dim];
    for k in 0..=tc.n_max {
        let shell = cone_shell(p.n, r, k);
        let terms: Vec<Vec<C64>> =
            shell.par_iter().map(|nu| row_summands(p, &base, basis, nu, &tc.ctx)).collect::<Result<_>>()?;
        for s in 0..dim {
            let mut sh = CompensatedSum::new();
            for t in &terms {
                sh.add(t[s]);
            }
            acc[s].add(sh.value());
            last[s] = sh.value().norm();
        }
    }
    Ok((0..dim)
        .map(|s| {
            let value = acc[s].value();
            LatticeSum { value, last_shell: last[s], converged: last[s] <= tc.tail_tol * value.norm() }
        })
        .collect())
}

/// Truncated sum without the convergence verdict turned into an error.
pub fn jackson_xi_sum(p: &ParamSet, s: usize, r: usize, tc: &TruncationConfig) -> Result<LatticeSum> {
    if s > p.n {
        return Err(QsError::domain(format!("basis index {s} exceeds n = {}", p.n)));
    }
    Ok(jackson_row(p, r, Basis::Phi, tc)?[s])
}

/// `(1−q)^n Σ_ν [t^α Φ′(t) 𝒜{…}]` over the cycle anchored at `ξ` with `r`
/// coordinates on the `x2` block, for the basis function `φ_s`.
pub fn jackson_xi(p: &ParamSet, s: usize, r: usize, tc: &TruncationConfig) -> Result<C64> {
    let sum = jackson_xi_sum(p, s, r, tc)?;
    if !sum.converged {
        return Err(QsError::Truncation { what: format!("Jackson integral (r={r}, s={s})"), partial: sum.value });
    }
    Ok(sum.value)
}

fn solution_matrix(p: &ParamSet, basis: Basis, tc: &TruncationConfig) -> Result<SolutionMatrix> {
    let dim = p.n + 1;
    let rows: Vec<Vec<LatticeSum>> = (0..dim).map(|r| jackson_row(p, r, basis, tc)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (r, row) in rows.iter().enumerate() {
        for (s, e) in row.iter().enumerate() {
            if !e.converged {
                return Err(QsError::Truncation { what: format!("solution matrix entry ({r},{s})"), partial: e.value });
            }
            if e.value.norm() > 0.0 {
                worst = worst.max(e.last_shell / e.value.norm());
            }
        }
    }
    Ok(SolutionMatrix {
        entries: CMatrix::from_fn(dim, |r, s| rows[r][s].value),
        basis,
        kind: CycleKind::Xi,
        truncation: TruncationInfo { n_max: tc.n_max, worst_tail: worst },
    })
}

/// `Y_ξ` with entries `∫_{ξ_r} Φ φ_s`.
pub fn y_xi(p: &ParamSet, tc: &TruncationConfig) -> Result<SolutionMatrix> {
    solution_matrix(p, Basis::Phi, tc)
}

/// `Y′_ξ` with entries `∫_{ξ_r} Φ ψ_{(n−s, s)}`.
pub fn y_xi_psi(p: &ParamSet, tc: &TruncationConfig) -> Result<SolutionMatrix> {
    solution_matrix(p, Basis::PsiReversed, tc)
}

/// Leading coefficient `(1−q)^n Φ(ξ) φ_s(ξ) / ξ^{α̃}` of row `r`, column `s`.
pub fn c_plus_direct(p: &ParamSet, r: usize, s: usize, ctx: &QContext) -> Result<C64> {
    let base = xi_base_logs(p, r)?;
    let alpha = p.exps()?.alpha;
    let v = row_summands(p, &base, Basis::Phi, &vec![0; p.n], ctx)?[s];
    Ok(v / (alpha * base.iter().sum::<C64>()).exp())
}

/// [`c_plus_direct`] further divided by `∏_j ξ_j^{−2(j−1)γ}`, the part of
/// `ξ^{α}` that tends to 1 only logarithmically as q → 0.
pub fn c_plus_direct_reduced(p: &ParamSet, r: usize, s: usize, ctx: &QContext) -> Result<C64> {
    let base = xi_base_logs(p, r)?;
    let g = p.exps()?.gamma;
    let e: C64 = base.iter().enumerate().map(|(j, l)| -g * (2.0 * j as f64) * l).sum();
    Ok(c_plus_direct(p, r, s, ctx)? / e.exp())
}

/// `(1−q)^n Res_{t=η} Φ(t) φ_s(t) / t^{α̃}` for row `r`, column `s`, with `η`
/// the η-type characteristic point.
pub fn c_minus_direct(p: &ParamSet, r: usize, s: usize, ctx: &QContext) -> Result<C64> {
    let eta = characteristic_point(p, CycleKind::Eta, r)?;
    let alpha = p.exps()?.alpha;
    let res = weights::phi_prime_residue(p, &eta, ctx)?;
    let num = alt_sum(|u| Ok(numerator(p, Basis::Phi, s, u)), &eta.t)?;
    let shift = weights::monomial_power(p, &eta)? / (alpha * eta.log_t.iter().sum::<C64>()).exp();
    Ok((ONE - p.q).powu(p.n as u32) * shift * res * num)
}

/// [`c_minus_direct`] further divided by `∏_j η_j^{−2(j−1)γ}`.
pub fn c_minus_direct_reduced(p: &ParamSet, r: usize, s: usize, ctx: &QContext) -> Result<C64> {
    let eta = characteristic_point(p, CycleKind::Eta, r)?;
    let g = p.exps()?.gamma;
    let e: C64 = eta.log_t.iter().enumerate().map(|(j, l)| -g * (2.0 * j as f64) * l).sum();
    Ok(c_minus_direct(p, r, s, ctx)? / e.exp())
}

/// `c_{rs}/c_{rr}` evaluated directly at a characteristic point: the
/// weight and its residue cancel, leaving a quotient of two alternating
/// sums that involves the characters only.
pub fn coefficient_ratio_direct(p: &ParamSet, kind: CycleKind, r: usize, s: usize) -> Result<C64> {
    let t = characteristic_point(p, kind, r)?;
    let num = alt_sum(|u| Ok(numerator(p, Basis::Phi, s, u)), &t.t)?;
    let den = alt_sum(|u| Ok(numerator(p, Basis::Phi, r, u)), &t.t)?;
    if den.norm() < weights::POLE_RADIUS {
        return Err(QsError::singular("diagonal coefficient", r as i64));
    }
    Ok(num / den)
}

fn matrix_residual(lhs: &CMatrix, rhs: &CMatrix, scale: &CMatrix) -> f64 {
    lhs.sub(rhs).max_abs() / scale.max_abs()
}

/// `Y_ξ(q x2) = Y_ξ(x2) K` with a supplied `K`.
pub fn verify_qkz_with(p: &ParamSet, tc: &TruncationConfig, k: &CMatrix, tolerance: f64) -> Result<VerificationReport> {
    let y = y_xi(p, tc)?.entries;
    let yq = y_xi(&p.shift_x2(), tc)?.entries;
    let res = matrix_residual(&yq, &y.mul(k), &y);
    Ok(VerificationReport::new("qkz-x2-shift", p.digest(), res, tolerance).with_counts(tc.n_max, p.n + 1))
}

/// `Y_ξ(q x2) = Y_ξ(x2) K(x1, x2)` with `K = R21 · diag[(a c^{1−n})^s]`.
pub fn verify_qkz(p: &ParamSet, tc: &TruncationConfig, tolerance: f64) -> Result<VerificationReport> {
    verify_qkz_with(p, tc, &gauss::k_matrix(p)?, tolerance)
}

/// Source of the α̃-shift matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AMatrixSource {
    /// Gauss-factor closed form.
    ClosedForm,
    /// Reconstruction from the q → 0 limits.
    Limits,
}

/// `Y_ξ(a q) = Y_ξ(a) A`.
pub fn verify_alpha_shift(
    p: &ParamSet,
    tc: &TruncationConfig,
    source: AMatrixSource,
    tolerance: f64,
) -> Result<VerificationReport> {
    let a = match source {
        AMatrixSource::ClosedForm => gauss::a_matrix(p)?,
        AMatrixSource::Limits => limits::assemble_a(&p.limit_params(), p.x1, p.x2)?,
    };
    let y = y_xi(p, tc)?.entries;
    let ya = y_xi(&p.shift_alpha(), tc)?.entries;
    let res = matrix_residual(&ya, &y.mul(&a), &y);
    Ok(VerificationReport::new("alpha-shift", p.digest(), res, tolerance).with_counts(tc.n_max, p.n + 1))
}

/// `Y_ξ R21 = Y′_ξ`.
pub fn verify_basis_change(p: &ParamSet, tc: &TruncationConfig, tolerance: f64) -> Result<VerificationReport> {
    let y = y_xi(p, tc)?.entries;
    let yp = y_xi_psi(p, tc)?.entries;
    let res = matrix_residual(&y.mul(&gauss::r21(p)?), &yp, &yp);
    Ok(VerificationReport::new("basis-change", p.digest(), res, tolerance).with_counts(tc.n_max, p.n + 1))
}

/// A bilateral lattice `{exp(base) q^ν : ν ∈ [−N, N]^n}` away from every
/// pole of the weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BilateralLattice {
    pub base_logs: Vec<C64>,
    pub radius: usize,
}

/// `Σ_ν Φ(t) ∇_χ f(t)` over a bilateral lattice, relative to `Σ_ν |Φ f|`.
///
/// The sum is rejected as truncated when the outer shell still carries more
/// than `tc.tail_tol` of the scale.
pub fn verify_exactness<F>(
    p: &ParamSet,
    chi: &[i64],
    f: F,
    lattice: &BilateralLattice,
    tc: &TruncationConfig,
    tolerance: f64,
) -> Result<VerificationReport>
where
    F: Fn(&[C64]) -> Result<C64> + Sync,
{
    let n = p.n;
    if lattice.base_logs.len() != n || chi.len() != n {
        return Err(QsError::domain("lattice base and shift vector must have length n"));
    }
    if chi.iter().all(|&k| k == 0) {
        return Ok(VerificationReport::new("exactness", p.digest(), 0.0, tolerance).with_counts(lattice.radius, 0));
    }
    let rad = lattice.radius as i64;
    let indices: Vec<Vec<i64>> = (0..n).map(|_| -rad..=rad).multi_cartesian_product().collect();
    let ctx = tc.ctx;
    let terms: Vec<(C64, f64, bool)> = indices
        .par_iter()
        .map(|nu| {
            let t = point_at(p, &lattice.base_logs, nu);
            let w = weights::phi_weight(p, &t, &ctx)?;
            let fv = f(&t.t)?;
            let term = w * (fv - weights::b_function(p, chi, &t)? * f(&t.shifted(p.q, chi).t)?);
            let outer = nu.iter().any(|k| k.abs() == rad);
            Ok((term, (w * fv).norm(), outer))
        })
        .collect::<Result<_>>()?;
    let mut total = CompensatedSum::new();
    let mut scale = 0.0;
    let mut outer_scale: f64 = 0.0;
    for (term, mag, outer) in &terms {
        total.add(*term);
        scale += mag;
        if *outer {
            outer_scale = outer_scale.max(*mag);
        }
    }
    if outer_scale > tc.tail_tol * scale {
        return Err(QsError::Truncation { what: "bilateral exactness sum".into(), partial: total.value() });
    }
    let res = total.value().norm() / scale;
    Ok(VerificationReport::new("exactness", p.digest(), res, tolerance).with_counts(lattice.radius, terms.len()))
}

/// Test function `(t_2⋯t_r)^2 t_{r+1}⋯t_s ∏_{i<j}(t_i − c t_j) /
/// ∏_{j≥2}(1 − t_j/x1)(1 − t_j/x2)` whose exact forms produce the
/// determinant recursion; `1 ≤ r ≤ s ≤ n`.
pub fn exactness_test_function(p: &ParamSet, r: usize, s: usize) -> impl Fn(&[C64]) -> Result<C64> + Sync + '_ {
    move |t: &[C64]| {
        let mut v = pair_product(t, p.c);
        for (j, &tj) in t.iter().enumerate().skip(1) {
            if j < r {
                v *= tj * tj;
            } else if j < s {
                v *= tj;
            }
            let den = (ONE - tj / p.x1) * (ONE - tj / p.x2);
            if den.norm() < weights::POLE_RADIUS {
                return Err(QsError::singular("test-function denominator", j as i64));
            }
            v /= den;
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> ParamSet {
        ParamSet::from_exponents(
            2,
            C64::new(0.2, 0.05),
            C64::new(2.9, 0.0),
            C64::new(0.6, 0.3),
            C64::new(0.45, -0.2),
            C64::new(0.31, 0.05),
            C64::new(1.1, 0.2),
            C64::new(-0.7, 0.5),
        )
        .unwrap()
    }

    #[test]
    fn cone_shell_counts() {
        let total: usize = (0..=3).map(|k| cone_shell(2, 0, k).len()).sum();
        assert_eq!(total, 10);
        let total: usize = (0..=3).map(|k| cone_shell(2, 1, k).len()).sum();
        assert_eq!(total, 16);
    }

    #[test]
    fn off_cone_terms_vanish() {
        let p = p2();
        let ctx = p.ctx().unwrap();
        for nu in [[-1, 0], [0, -3], [2, 1], [-2, -2]] {
            let v = regularized_summand(&p, 0, Basis::Phi, 1, &nu, &ctx).unwrap();
            assert_eq!(v.norm(), 0.0, "{nu:?}");
        }
    }

    #[test]
    fn leading_coefficients_triangular() {
        let p = p2();
        let ctx = p.ctx().unwrap();
        for r in 0..=2 {
            for s in r + 1..=2 {
                assert!(c_plus_direct(&p, r, s, &ctx).unwrap().norm() < 1e-14);
            }
        }
    }

    #[test]
    fn truncation_error_reported() {
        let p = p2();
        let tc = TruncationConfig::for_params(&p, 1, 1e-14).unwrap();
        assert!(matches!(jackson_xi(&p, 0, 0, &tc), Err(QsError::Truncation { .. })));
    }
}
