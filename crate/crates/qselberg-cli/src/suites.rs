//! Verification suites behind `qselberg verify`.

use num_complex::Complex64 as C64;
use qselberg::gauss;
use qselberg::identities::{self, IdentityCheck};
use qselberg::jackson::{self, AMatrixSource, BilateralLattice, TruncationConfig};
use qselberg::limits::{self, Side};
use qselberg::params::seeded_draws;
use qselberg::report::VerificationReport;
use qselberg::weights::CycleKind;
use qselberg::{CMatrix, ParamSet, QsError};
use rayon::prelude::*;

use crate::cli::Suite;
use crate::error::CliError;
use crate::source::{with_exponents, Resolved};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Everything a suite needs besides the suite name.
pub struct Plan {
    pub resolved: Resolved,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub m: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub draws: usize,
}

impl Plan {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    /// The explicit parameter set, or seeded draws for each rank in
    /// `default_ranks` (or `--n` when given).
    fn closed_form_sets(&self, default_ranks: std::ops::RangeInclusive<usize>) -> Vec<ParamSet> {
        if self.resolved.explicit {
            return vec![self.resolved.params];
        }
        let ranks: Vec<usize> = match self.n {
            Some(n) => vec![n],
            None => default_ranks.collect(),
        };
        ranks.into_iter().flat_map(|n| seeded_draws(n, self.draws, self.seed ^ (n as u64) << 48)).collect()
    }
}

/// Run `check` on every parameter set in parallel, keeping the input order.
fn per_set<T: Send>(
    sets: Vec<ParamSet>,
    check: impl Fn(ParamSet) -> Result<Vec<T>, CliError> + Sync,
) -> Result<Vec<T>, CliError> {
    let parts: Vec<Vec<T>> = sets.into_par_iter().map(&check).collect::<Result<_, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn report(name: &str, p: &ParamSet, residual: f64, tol: f64) -> VerificationReport {
    VerificationReport::new(name, p.digest(), residual, tol)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn worst_factor_mismatch(a: &gauss::GaussFactors, b: &gauss::GaussFactors) -> f64 {
    [(&a.left, &b.left), (&a.middle, &b.middle), (&a.right, &b.right)]
        .iter()
        .map(|(x, y)| x.rel_diff_scaled(y))
        .fold(0.0, f64::max)
}

fn rmatrix(plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    let tol = plan.tol(1e-10);
    let tol_fact = plan.tol(1e-9);
    per_set(plan.closed_form_sets(1..=4), |p| {
        let mut out = Vec::new();
        let r = gauss::r21(&p)?;
        let dim = p.n + 1;
        out.push(report(
            "rmatrix/inverse-pair",
            &p,
            gauss::r12(&p)?.mul(&r).sub(&CMatrix::identity(dim)).max_abs(),
            tol,
        ));
        let udl = gauss::r21_udl(&p)?;
        let ldu = gauss::r21_ldu(&p)?;
        out.push(report("rmatrix/udl-equals-ldu", &p, ldu.product().rel_diff_scaled(&r), tol));
        out.push(report("rmatrix/udl-recovers-factors", &p, worst_factor_mismatch(&gauss::udl(&r)?, &udl), tol_fact));
        out.push(report("rmatrix/ldu-recovers-factors", &p, worst_factor_mismatch(&gauss::ldu(&r)?, &ldu), tol_fact));
        let a = gauss::a_matrix(&p)?;
        out.push(report(
            "rmatrix/a-udl-recovers-factors",
            &p,
            worst_factor_mismatch(&gauss::udl(&a)?, &gauss::a_factors(&p)?),
            tol_fact,
        ));
        out.push(report("rmatrix/det-r", &p, rel(r.det(), gauss::det_r(&p)?), tol));
        out.push(report("rmatrix/det-a", &p, rel(a.det(), gauss::det_a(&p)?), tol));
        out.push(report("rmatrix/det-k", &p, rel(gauss::k_matrix(&p)?.det(), gauss::det_k(&p)?), tol));
        for chk in identities::check_det_telescopes(&p.limit_params())? {
            out.push(report(&format!("rmatrix/{}", chk.name), &p, chk.residual, tol));
        }
        Ok(out)
    })
}

fn limit_suite(plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    let tol = plan.tol(1e-9);
    let tol_ratio = plan.tol(1e-10);
    per_set(plan.closed_form_sets(1..=3), |p| {
        let mut out = Vec::new();
        let lp = p.limit_params();
        let r = gauss::r21(&p)?;
        out.push(report(
            "limits/assemble-a",
            &p,
            limits::assemble_a(&lp, p.x1, p.x2)?.rel_diff_scaled(&gauss::a_matrix(&p)?),
            tol,
        ));
        out.push(report("limits/r-from-c-plus", &p, limits::r_from_c(&lp, Side::Plus)?.rel_diff_scaled(&r), tol));
        out.push(report("limits/r-from-c-minus", &p, limits::r_from_c(&lp, Side::Minus)?.rel_diff_scaled(&r), tol));
        let k = gauss::k_matrix(&p.with_points(ONE, p.w()))?;
        out.push(report("limits/assemble-k", &p, limits::assemble_k(&lp)?.rel_diff_scaled(&k), tol));
        let pe = if p.exps().is_ok() { p } else { with_exponents(&p)? };
        for (name, kind, closed) in [
            ("limits/ratio-plus", CycleKind::Xi, limits::c_plus_unipotent(&lp)?),
            ("limits/ratio-minus", CycleKind::Eta, limits::c_minus_unipotent(&lp)?),
        ] {
            let direct = CMatrix::try_from_fn(p.n + 1, |r, s| jackson::coefficient_ratio_direct(&pe, kind, r, s))?;
            out.push(report(name, &p, direct.rel_diff_scaled(&closed), tol_ratio));
        }
        Ok(out)
    })
}

fn from_checks(prefix: &str, checks: Vec<IdentityCheck>, tol: f64) -> Vec<VerificationReport> {
    checks
        .into_iter()
        .map(|c| {
            let mut r = c.to_report(tol);
            r.identity = format!("{prefix}/{}", r.identity);
            r
        })
        .collect()
}

fn lemmas(plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    let tol = plan.tol(1e-9);
    let k_max = plan.m.unwrap_or(10) as i64;
    let mut out = from_checks("lemmas", identities::lemma_sweep(plan.seed, plan.draws, k_max), tol);
    let special = per_set(plan.closed_form_sets(1..=5), |p| {
        let mut special = Vec::new();
        let lp = p.limit_params();
        for r in 0..=p.n {
            for s in 0..=p.n {
                if s <= r {
                    special.push(identities::check_lower_reconstruction_sum(&lp, r, s)?);
                } else {
                    special.push(identities::check_upper_reconstruction_sum(&lp, r, s)?);
                }
                if r <= s {
                    special.push(identities::check_inverse_orthogonality_sum(&lp, r, s)?);
                }
            }
        }
        Ok(special)
    })?;
    out.extend(from_checks("lemmas", special, tol));
    Ok(out)
}

fn kadell(plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    let n_max = plan.m.unwrap_or(5);
    Ok(from_checks("kadell", identities::kadell_sweep(plan.seed, plan.draws, n_max)?, plan.tol(1e-9)))
}

/// Truncation failures become failing reports so that the rest of the
/// suite is still emitted.
fn lattice_report(
    name: &str,
    p: &ParamSet,
    n_max: usize,
    tol: f64,
    r: qselberg::Result<VerificationReport>,
) -> Result<VerificationReport, CliError> {
    match r {
        Ok(mut rep) => {
            rep.identity = name.to_string();
            Ok(rep)
        }
        Err(e @ QsError::Truncation { .. }) => {
            eprintln!("{name}: {e}");
            Ok(report(name, p, f64::INFINITY, tol).with_counts(n_max, 0))
        }
        Err(e) => Err(e.into()),
    }
}

fn lattice_config(plan: &Plan, p: &ParamSet) -> Result<(TruncationConfig, f64), CliError> {
    let n_max = plan.n_max.unwrap_or(if p.n == 1 { 80 } else { 40 });
    let tol = plan.tol(if p.n == 1 { 1e-7 } else { 1e-6 });
    Ok((TruncationConfig::for_params(p, n_max, 1e-9)?, tol))
}

fn qkz(plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    let p = &plan.resolved.params;
    let (tc, tol) = lattice_config(plan, p)?;
    Ok(vec![lattice_report("qkz/x2-shift", p, tc.n_max, tol, jackson::verify_qkz(p, &tc, tol))?])
}

fn alpha(plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    let p = &plan.resolved.params;
    let (tc, tol) = lattice_config(plan, p)?;
    Ok(vec![
        lattice_report(
            "alpha/shift-closed-form",
            p,
            tc.n_max,
            tol,
            jackson::verify_alpha_shift(p, &tc, AMatrixSource::ClosedForm, tol),
        )?,
        lattice_report(
            "alpha/shift-from-limits",
            p,
            tc.n_max,
            tol,
            jackson::verify_alpha_shift(p, &tc, AMatrixSource::Limits, tol),
        )?,
        lattice_report("alpha/basis-change", p, tc.n_max, tol, jackson::verify_basis_change(p, &tc, tol))?,
    ])
}

const LATTICE_BASES: [C64; 2] = [C64 { re: 0.37, im: 0.61 }, C64 { re: -0.2, im: 2.0 }];

/// Parameter sets whose weight decays in both directions of the bilateral
/// lattice.
fn builtin_exactness_sets() -> Result<Vec<ParamSet>, CliError> {
    let c = C64::new;
    let (x1, x2, q) = (c(1.1, 0.2), c(-0.7, 0.5), c(0.3, 0.0));
    Ok(vec![
        ParamSet::from_exponents(1, q, c(1.2, 0.0), c(-0.6, 0.1), c(-0.5, 0.0), c(0.0, 0.0), x1, x2)?,
        ParamSet::from_exponents(2, q, c(1.2, 0.0), c(-1.2, 0.1), c(-1.1, 0.0), c(0.15, 0.0), x1, x2)?,
        ParamSet::from_exponents(2, q, c(1.0, 0.0), c(-1.3, 0.0), c(-1.2, 0.0), c(-0.1, 0.0), x1, x2)?,
    ])
}

fn exactness(plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    let sets = if plan.resolved.explicit { vec![plan.resolved.params] } else { builtin_exactness_sets()? };
    let mut out = Vec::new();
    for p in sets {
        if p.n > 2 {
            return Err(CliError::Invalid(
                "the exactness suite sums over a full bilateral lattice and supports n <= 2".into(),
            ));
        }
        let radius = plan.n_max.unwrap_or(if p.n == 1 { 40 } else { 30 });
        let (tail, tol) = if p.n == 1 { (1e-12, plan.tol(1e-8)) } else { (1e-10, plan.tol(1e-7)) };
        let tc = TruncationConfig::for_params(&p, radius, tail)?;
        let lattice = BilateralLattice { base_logs: LATTICE_BASES[..p.n].to_vec(), radius };
        let mut chi = vec![0; p.n];
        chi[0] = 1;
        if p.n == 1 {
            let x2 = p.x2;
            let f = move |t: &[C64]| Ok(ONE / (ONE - t[0] / x2));
            out.push(lattice_report(
                "exactness/rank-one",
                &p,
                radius,
                tol,
                jackson::verify_exactness(&p, &chi, f, &lattice, &tc, tol),
            )?);
        } else {
            for (r, s) in [(1, 1), (1, 2), (2, 2)] {
                let f = jackson::exactness_test_function(&p, r, s);
                let name = format!("exactness/test-function-{r}-{s}");
                out.push(lattice_report(
                    &name,
                    &p,
                    radius,
                    tol,
                    jackson::verify_exactness(&p, &chi, f, &lattice, &tc, tol),
                )?);
            }
        }
    }
    Ok(out)
}

/// Run `suite`, returning the reports in canonical order.
pub fn run(suite: Suite, plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    if plan.resolved.explicit {
        plan.resolved.params.check_generic(qselberg::params::GENERICITY_EPS)?;
    }
    let mut out = match suite {
        Suite::All => {
            let mut v = Vec::new();
            for s in [
                Suite::Rmatrix,
                Suite::Qkz,
                Suite::Alpha,
                Suite::Limits,
                Suite::Lemmas,
                Suite::Kadell,
                Suite::Exactness,
            ] {
                v.extend(run_one(s, plan)?);
            }
            v
        }
        s => run_one(s, plan)?,
    };
    out.sort_by(|a, b| (&a.identity, &a.params_digest).cmp(&(&b.identity, &b.params_digest)));
    Ok(out)
}

fn run_one(suite: Suite, plan: &Plan) -> Result<Vec<VerificationReport>, CliError> {
    match suite {
        Suite::Rmatrix => rmatrix(plan),
        Suite::Qkz => qkz(plan),
        Suite::Alpha => alpha(plan),
        Suite::Limits => limit_suite(plan),
        Suite::Lemmas => lemmas(plan),
        Suite::Kadell => kadell(plan),
        Suite::Exactness => exactness(plan),
        Suite::All => unreachable!("expanded by run"),
    }
}
