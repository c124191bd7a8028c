//! JSON and CSV rendering, and the output sink.

use std::fs;
use std::io::Write;
use std::path::Path;

use qselberg::report::VerificationReport;
use qselberg::{CMatrix, ParamSet};

use crate::cli::Format;
use crate::error::CliError;

pub fn write(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

pub fn matrices(format: Format, kind: &str, p: &ParamSet, seed: u64, blocks: &[(String, CMatrix)]) -> String {
    match format {
        Format::Json => {
            let items: Vec<serde_json::Value> =
                blocks.iter().map(|(name, m)| serde_json::json!({ "name": name, "matrix": m.to_json() })).collect();
            let doc = serde_json::json!({
                "kind": kind,
                "params": p.to_json(),
                "params_digest": p.digest(),
                "seed": seed,
                "blocks": items,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("matrix document serializes"))
        }
        Format::Csv => {
            let dim = blocks.first().map_or(0, |(_, m)| m.dim());
            let mut s = String::from("block,row");
            for k in 0..dim {
                s.push_str(&format!(",c{k}_re,c{k}_im"));
            }
            s.push('\n');
            for (name, m) in blocks {
                for r in 0..m.dim() {
                    s.push_str(&format!("\"{name}\",{r}"));
                    for k in 0..m.dim() {
                        let z = m.get(r, k);
                        s.push_str(&format!(",{:e},{:e}", z.re, z.im));
                    }
                    s.push('\n');
                }
            }
            s
        }
    }
}

pub fn reports(format: Format, seed: u64, reports: &[VerificationReport]) -> String {
    let mut s = String::new();
    match format {
        Format::Json => {
            for r in reports {
                let mut v = r.to_json();
                v["seed"] = seed.into();
                s.push_str(&v.to_string());
                s.push('\n');
            }
        }
        Format::Csv => {
            s.push_str("identity,params_digest,residual,tolerance,pass,N,M,seed\n");
            for r in reports {
                s.push_str(&format!(
                    "{},{},{:e},{:e},{},{},{},{seed}\n",
                    r.identity, r.params_digest, r.residual, r.tolerance, r.pass, r.n_max, r.m
                ));
            }
        }
    }
    s
}
