//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function takes and returns JSON text. The plain-Rust
//! functions in [`api`] do the work and are what the native tests call.

// `!(residual <= tol)` counts a NaN residual as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use wasm_bindgen::prelude::*;

pub mod api {
    use num_complex::Complex64 as C64;
    use qselberg::gauss;
    use qselberg::identities;
    use qselberg::jackson::{self, TruncationConfig};
    use qselberg::params::GENERICITY_EPS;
    use qselberg::{CMatrix, ParamSet};
    use serde_json::{json, Value};

    /// Largest lattice radius the page may request.
    pub const MAX_RADIUS: usize = 200;
    /// Largest number of draws per order the page may request.
    pub const MAX_DRAWS: usize = 500;

    fn parse_params(text: &str) -> Result<ParamSet, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| format!("parameters are not valid JSON: {e}"))?;
        let p = ParamSet::from_json(&v).map_err(|e| e.to_string())?;
        p.check_generic(GENERICITY_EPS).map_err(|e| e.to_string())?;
        Ok(p)
    }

    fn matrix(m: &CMatrix) -> Value {
        m.to_json()["data"].clone()
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    /// The R-matrix `R21`, its Gauss factors and two consistency residuals.
    pub fn r_matrix(params: &str) -> Result<String, String> {
        let p = parse_params(params)?;
        let err = |e: qselberg::QsError| e.to_string();
        let r = gauss::r21(&p).map_err(err)?;
        let f = gauss::r21_udl(&p).map_err(err)?;
        let r12 = gauss::r12(&p).map_err(err)?;
        let inverse = r12.mul(&r).sub(&CMatrix::identity(p.n + 1)).max_abs();
        let det = rel(r.det(), gauss::det_r(&p).map_err(err)?);
        Ok(json!({
            "params_digest": p.digest(),
            "r21": matrix(&r),
            "upper": matrix(&f.left),
            "diagonal": matrix(&f.middle),
            "lower": matrix(&f.right),
            "inverse_residual": inverse,
            "determinant_residual": det,
        })
        .to_string())
    }

    /// Residual of the difference equation in `x2` for the truncated
    /// Jackson-integral solution matrix.
    pub fn qkz_check(params: &str, radius: usize) -> Result<String, String> {
        if radius == 0 || radius > MAX_RADIUS {
            return Err(format!("radius must lie in 1..={MAX_RADIUS}"));
        }
        let p = parse_params(params)?;
        let tol = if p.n == 1 { 1e-7 } else { 1e-6 };
        let tc = TruncationConfig::for_params(&p, radius, 1e-9).map_err(|e| e.to_string())?;
        let report = jackson::verify_qkz(&p, &tc, tol).map_err(|e| e.to_string())?;
        Ok(report.to_json().to_string())
    }

    /// Run the seeded lemma sweep and summarize it.
    pub fn lemma_sweep(seed: u64, draws: usize, k_max: i64) -> Result<String, String> {
        if draws == 0 || draws > MAX_DRAWS {
            return Err(format!("draws must lie in 1..={MAX_DRAWS}"));
        }
        if !(1..=20).contains(&k_max) {
            return Err("the largest order must lie in 1..=20".into());
        }
        let checks = identities::lemma_sweep(seed, draws, k_max);
        let tol = 1e-9;
        let failed = checks.iter().filter(|c| !(c.residual <= tol)).count();
        let worst = checks.iter().max_by(|a, b| a.residual.total_cmp(&b.residual));
        Ok(json!({
            "seed": seed,
            "checks": checks.len(),
            "failed": failed,
            "tolerance": tol,
            "worst_identity": worst.map(|c| c.name.clone()),
            "worst_residual": worst.map(|c| c.residual),
        })
        .to_string())
    }
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = rMatrix)]
pub fn r_matrix(params: &str) -> Result<String, JsError> {
    js(api::r_matrix(params))
}

#[wasm_bindgen(js_name = qkzCheck)]
pub fn qkz_check(params: &str, radius: usize) -> Result<String, JsError> {
    js(api::qkz_check(params, radius))
}

#[wasm_bindgen(js_name = lemmaSweep)]
pub fn lemma_sweep(seed: u32, draws: usize, k_max: u32) -> Result<String, JsError> {
    js(api::lemma_sweep(u64::from(seed), draws, i64::from(k_max)))
}
