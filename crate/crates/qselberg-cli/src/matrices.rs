//! Named matrices emitted by `qselberg matrix`.

use qselberg::gauss::{self, GaussFactors};
use qselberg::limits;
use qselberg::{CMatrix, ParamSet, Result};

use crate::cli::MatrixKind;

fn factors(out: &mut Vec<(String, CMatrix)>, names: [&str; 3], f: GaussFactors) {
    let [l, m, r] = names;
    out.push((l.into(), f.left));
    out.push((m.into(), f.middle));
    out.push((r.into(), f.right));
}

/// The requested matrix followed by its factors or companions, in a fixed
/// order.
pub fn blocks(kind: MatrixKind, p: &ParamSet) -> Result<Vec<(String, CMatrix)>> {
    let lp = p.limit_params();
    let mut out = Vec::new();
    match kind {
        MatrixKind::R21 => {
            out.push(("R21".into(), gauss::r21(p)?));
            factors(&mut out, ["U_R", "D_R", "L_R"], gauss::r21_udl(p)?);
            factors(&mut out, ["L'_R", "D'_R", "U'_R"], gauss::r21_ldu(p)?);
        }
        MatrixKind::R12 => out.push(("R12".into(), gauss::r12(p)?)),
        MatrixKind::K => {
            out.push(("K".into(), gauss::k_matrix(p)?));
            out.push(("D1".into(), gauss::d1(p)));
        }
        MatrixKind::K1 => out.push(("K1".into(), gauss::k1(p)?)),
        MatrixKind::K2 => out.push(("K2".into(), gauss::k2(p)?)),
        MatrixKind::A => {
            out.push(("A".into(), gauss::a_matrix(p)?));
            factors(&mut out, ["U_A", "D_A", "L_A"], gauss::a_factors(p)?);
            out.push(("A(0)".into(), limits::a_at_zero(&lp, p.x1, p.x2)?));
            out.push(("A(inf)".into(), limits::a_at_infinity(&lp, p.x1, p.x2)?));
        }
        MatrixKind::CPlus => {
            out.push(("C_A+".into(), limits::c_plus_limit(&lp)?));
            out.push(("C+".into(), limits::c_plus_unipotent(&lp)?));
            out.push(("diag c+".into(), CMatrix::diagonal(&limits::c_plus_diagonal(&lp)?)));
        }
        MatrixKind::CMinus => {
            out.push(("C_A-".into(), limits::c_minus_limit(&lp)?));
            out.push(("C-".into(), limits::c_minus_unipotent(&lp)?));
            out.push(("diag c-".into(), CMatrix::diagonal(&limits::c_minus_diagonal(&lp)?)));
        }
        MatrixKind::HLimits => {
            let h = limits::h_limits(&lp)?;
            out.push(("H_zeta_xi".into(), h.zeta_xi));
            out.push(("H_zeta_eta".into(), h.zeta_eta));
            out.push(("H_delta_xi".into(), h.delta_xi));
            out.push(("H_delta_eta".into(), h.delta_eta));
        }
        MatrixKind::Ck => {
            let k = limits::c_k_and_v_limits(&lp)?;
            out.push(("C_K+".into(), k.c_plus));
            out.push(("C_K-".into(), k.c_minus));
            out.push(("q^D_K+".into(), k.d_plus));
        }
        MatrixKind::V => {
            let k = limits::c_k_and_v_limits(&lp)?;
            out.push(("V+".into(), k.v_plus));
            out.push(("V-".into(), k.v_minus));
        }
    }
    Ok(out)
}
