//! Resolution of the single parameter source of a run.

use std::fs;

use num_complex::Complex64 as C64;
use qselberg::params::seeded_draws;
use qselberg::qseries::character;
use qselberg::ParamSet;

use crate::cli::{CommonOpts, Preset};
use crate::error::CliError;

/// Flag defaults: a rank-one set whose lattice sums converge quickly.
pub const DEFAULT_Q: C64 = C64 { re: 0.25, im: 0.05 };
const DEFAULT_ALPHA: C64 = C64 { re: 1.7, im: 0.0 };
const DEFAULT_BETA1: C64 = C64 { re: 0.6, im: 0.3 };
const DEFAULT_BETA2: C64 = C64 { re: 0.45, im: -0.2 };
const DEFAULT_GAMMA: C64 = C64 { re: 0.3, im: 0.0 };
const DEFAULT_X1: C64 = C64 { re: 1.1, im: 0.2 };
const DEFAULT_X2: C64 = C64 { re: -0.7, im: 0.5 };

/// The parameter set of a run and whether the user named it.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: ParamSet,
    pub explicit: bool,
}

pub fn parse_complex(text: &str, name: &str) -> Result<C64, CliError> {
    let bad = || CliError::Invalid(format!("--{name}: expected `re,im` or `re`, got `{text}`"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let z = match parts.as_slice() {
        [re] => C64::new(num(re)?, 0.0),
        [re, im] => C64::new(num(re)?, num(im)?),
        _ => return Err(bad()),
    };
    if !z.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

fn opt_complex(v: &Option<String>, name: &str) -> Result<Option<C64>, CliError> {
    v.as_deref().map(|s| parse_complex(s, name)).transpose()
}

fn any_param_flag(o: &CommonOpts) -> bool {
    [&o.q, &o.a, &o.b1, &o.b2, &o.c, &o.alpha, &o.beta1, &o.beta2, &o.gamma, &o.x1, &o.x2].iter().any(|v| v.is_some())
}

/// Same characters, with exponents recovered on the principal branch of
/// `log q` so that lattice sums can be formed.
pub fn with_exponents(p: &ParamSet) -> Result<ParamSet, CliError> {
    let lq = p.q.ln();
    let e = |z: C64| z.ln() / lq;
    Ok(ParamSet::from_exponents(p.n, p.q, e(p.a), e(p.b1), e(p.b2), e(p.c), p.x1, p.x2)?)
}

fn preset(which: Preset, seed: u64) -> Result<ParamSet, CliError> {
    match which {
        Preset::Paper101 => with_exponents(&seeded_draws(1, 1, seed)[0]),
        Preset::Paper102 => with_exponents(&seeded_draws(2, 1, seed)[0]),
        Preset::Degenerate => {
            let (b1, b2, c) = (C64::new(0.5, 0.0), C64::new(0.4, 0.0), C64::new(0.6, 0.0));
            let x2 = b2 / (b1 * c);
            Ok(ParamSet::from_characters(2, C64::new(0.5, 0.0), C64::new(0.3, 0.0), b1, b2, c, C64::new(1.0, 0.0), x2)?)
        }
    }
}

fn from_flags(o: &CommonOpts, n: usize) -> Result<ParamSet, CliError> {
    let q = opt_complex(&o.q, "q")?.unwrap_or(DEFAULT_Q);
    let pairs = [
        (opt_complex(&o.a, "a")?, opt_complex(&o.alpha, "alpha")?, DEFAULT_ALPHA, "a", "alpha"),
        (opt_complex(&o.b1, "b1")?, opt_complex(&o.beta1, "beta1")?, DEFAULT_BETA1, "b1", "beta1"),
        (opt_complex(&o.b2, "b2")?, opt_complex(&o.beta2, "beta2")?, DEFAULT_BETA2, "b2", "beta2"),
        (opt_complex(&o.c, "c")?, opt_complex(&o.gamma, "gamma")?, DEFAULT_GAMMA, "c", "gamma"),
    ];
    for (ch, ex, _, cn, en) in &pairs {
        if ch.is_some() && ex.is_some() {
            return Err(CliError::Invalid(format!("give either --{cn} or --{en}, not both")));
        }
    }
    let x1 = opt_complex(&o.x1, "x1")?.unwrap_or(DEFAULT_X1);
    let x2 = opt_complex(&o.x2, "x2")?.unwrap_or(DEFAULT_X2);
    if pairs.iter().all(|(ch, ..)| ch.is_none()) {
        let e: Vec<C64> = pairs.iter().map(|(_, ex, d, ..)| ex.unwrap_or(*d)).collect();
        Ok(ParamSet::from_exponents(n, q, e[0], e[1], e[2], e[3], x1, x2)?)
    } else {
        let ch: Vec<C64> =
            pairs.iter().map(|(ch, ex, d, ..)| ch.unwrap_or_else(|| character(q, ex.unwrap_or(*d)))).collect();
        Ok(ParamSet::from_characters(n, q, ch[0], ch[1], ch[2], ch[3], x1, x2)?)
    }
}

/// Exactly one of `--preset`, `--params` and the parameter flags may be
/// used; with none of them the flag defaults apply.
pub fn resolve(o: &CommonOpts) -> Result<Resolved, CliError> {
    let flags = any_param_flag(o);
    let sources = [o.preset.is_some(), o.params.is_some(), flags].iter().filter(|&&b| b).count();
    if sources > 1 {
        return Err(CliError::Invalid(
            "use exactly one parameter source: --preset, --params, or parameter flags".into(),
        ));
    }
    if o.n == Some(0) {
        return Err(CliError::Invalid("--n must be at least 1".into()));
    }
    let params = if let Some(which) = o.preset {
        preset(which, o.seed)?
    } else if let Some(path) = &o.params {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let v: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        ParamSet::from_json(&v)?
    } else {
        from_flags(o, o.n.unwrap_or(1))?
    };
    if let Some(n) = o.n {
        if n != params.n {
            return Err(CliError::Invalid(format!(
                "--n {n} conflicts with the parameter source, which has n = {}",
                params.n
            )));
        }
    }
    Ok(Resolved { params, explicit: sources == 1 })
}
