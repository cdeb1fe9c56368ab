//! The conjectural B-ambient construction: the extra Cartan-like elements
//! t_{2i-1}, the composite symmetries built from four coideal braid
//! operators, and the candidate triangular data.
//!
//! Module-level evaluation uses pinned exact vector representations of the
//! odd orthogonal quantum groups (runtime-verified against the full type-B
//! relation suite before use; the public builders stay type A). The braid
//! laws of the composite symmetries are additionally checked as operator
//! identities on split type-A modules in a gauge where the symmetry
//! formulas are radical-free.

use super::{braid_law_check, curly_mat};
use crate::cartan::{satake, AmbientType, Family};
use crate::freealg::{qcomm, EtaParams, Gen, GenExpr, IParams};
use crate::iqrep::{case_decompose, ell, iqg_action, verify_presentation, IqError};
use crate::linalg::ExactMatrix;
use crate::report::{RelationCheck, RelationReport};
use crate::scalar::{qint, QScalar};
use crate::urep::{evaluate, tensor, verify_ambient_presentation, ModuleRep};

/// Pinned vector representation of the odd orthogonal quantum group of rank
/// n (dimension 2n + 1), in its weight basis. Not part of the public module
/// builders; every use re-verifies the presentation.
pub fn b_vector_rep(n: usize) -> Result<ModuleRep, IqError> {
    assert!(n >= 2);
    let dim = 2 * n + 1;
    let mut e = Vec::new();
    let mut f = Vec::new();
    let mut k = Vec::new();
    // Basis: eps_1, ..., eps_n, 0, -eps_n, ..., -eps_1 (0-indexed rows).
    for i in 1..=n {
        if i < n {
            // eps_{i+1} -> eps_i and -eps_i -> -eps_{i+1}.
            e.push(ExactMatrix::from_entries(
                dim,
                dim,
                [
                    (i - 1, i, QScalar::one()),
                    (dim - i - 1, dim - i, QScalar::one()),
                ],
            ));
            f.push(ExactMatrix::from_entries(
                dim,
                dim,
                [
                    (i, i - 1, QScalar::one()),
                    (dim - i, dim - i - 1, QScalar::one()),
                ],
            ));
            // Weights: <h_i, eps_j> = delta_ij - delta_{i+1,j}; q_i = q^2.
            let mut diag = vec![QScalar::one(); dim];
            diag[i - 1] = QScalar::q_power(2);
            diag[i] = QScalar::q_power(-2);
            diag[dim - i] = QScalar::q_power(-2);
            diag[dim - i - 1] = QScalar::q_power(2);
            k.push(ExactMatrix::diagonal(diag));
        } else {
            // Short vertex: the middle three-dimensional string.
            e.push(ExactMatrix::from_entries(
                dim,
                dim,
                [
                    (n - 1, n, QScalar::one()),
                    (n, n + 1, QScalar::one()),
                ],
            ));
            let two = qint(2, 1);
            f.push(ExactMatrix::from_entries(
                dim,
                dim,
                [(n, n - 1, two.clone()), (n + 1, n, two)],
            ));
            let mut diag = vec![QScalar::one(); dim];
            diag[n - 1] = QScalar::q_power(2);
            diag[n + 1] = QScalar::q_power(-2);
            k.push(ExactMatrix::diagonal(diag));
        }
    }
    let m = ModuleRep::from_matrices(AmbientType::B(n), e, f, k, format!("Vb({n})"))?;
    let rep = verify_ambient_presentation(&m)?;
    if !rep.all_pass() {
        return Err(IqError::Config(format!(
            "pinned odd-orthogonal fixture failed its presentation: {:?}",
            rep.lines()
                .into_iter()
                .filter(|l| l.starts_with("FAIL"))
                .collect::<Vec<_>>()
        )));
    }
    Ok(m)
}

/// The composite symmetry applied to an expression in coideal generators:
/// the displayed generator table of tau^i_i, extended as a homomorphism.
/// The table is the four-letter braid word written out; the q-twist is the
/// symmetrizer of the even vertex.
fn tau_i_apply(
    datum: &crate::cartan::SatakeDatum,
    i: usize,
    x: &GenExpr,
) -> Result<GenExpr, IqError> {
    let d = datum.d(2 * i);
    let scale = QScalar::q_power(-d);
    x.map_gens(&mut |g| match g {
        Gen::B(j) => {
            let j = *j;
            let img = if j == 2 * i + 2 {
                let inner = qcomm(&GenExpr::b(2 * i + 1), &GenExpr::b(2 * i), d);
                qcomm(&GenExpr::b(2 * i + 2), &inner, d).scale(&-&scale)
            } else if j == 2 * i + 1 {
                GenExpr::b(2 * i - 1)
            } else if j == 2 * i {
                let inner = qcomm(&GenExpr::b(2 * i + 1), &GenExpr::b(2 * i), d);
                qcomm(&GenExpr::b(2 * i - 1), &inner, d).scale(&-&scale)
            } else if j == 2 * i - 1 {
                GenExpr::b(2 * i + 1)
            } else if j + 2 == 2 * i {
                let inner = qcomm(&GenExpr::b(2 * i - 1), &GenExpr::b(2 * i), d);
                qcomm(&GenExpr::b(2 * i - 2), &inner, d).scale(&-&scale)
            } else {
                GenExpr::b(j)
            };
            Ok(img)
        }
        Gen::K(alpha) if alpha.iter().all(|&c| c == 0) => Ok(GenExpr::one()),
        g => Err(crate::freealg::ExprError::RewriteUndefined(format!(
            "composite symmetry applied to {g}"
        ))),
    })
    .map_err(IqError::from)
}

/// Report of the conjectural construction at rank r.
pub struct ConjectureReport {
    pub report: RelationReport,
    pub archived_rows: Vec<String>,
}

/// Run the checks: at r = 1 the bracket identities of the extra Cartan
/// element on the pinned rank-2 fixture; at r = 2 the full residual table on
/// the pinned rank-4 fixture; braid laws of the composite symmetries on
/// split type-A surrogates at matching rank.
pub fn conjecture46_check(r: usize) -> Result<ConjectureReport, IqError> {
    let mut report = RelationReport::new(format!("conjectural construction at r = {r}"));
    let mut archived = Vec::new();
    match r {
        1 => {
            let datum = satake(Family::BI1 { r: 1 }).map_err(|e| IqError::Config(e.to_string()))?;
            let params = IParams::qi_inverse(&datum);
            let v = b_vector_rep(2)?;
            report.push(RelationCheck::pass(
                "fixture",
                "pinned rank-2 fixture passes the ambient presentation",
            ));
            for module in [v.clone(), tensor(&v, &v)?] {
                let action = iqg_action(&module, &datum, &params)?;
                let pres = verify_presentation(&action)?;
                let ok = pres.all_pass();
                report.push(if ok {
                    RelationCheck::pass(
                        format!("presentation({})", module.provenance),
                        "coideal presentation on the fixture",
                    )
                } else {
                    RelationCheck::fail_msg(
                        format!("presentation({})", module.provenance),
                        "coideal presentation on the fixture",
                        "see relation report",
                    )
                });
                report.extend(t_identities(&action, 2, 1)?);
            }
        }
        2 => {
            let datum = satake(Family::BI1 { r: 2 }).map_err(|e| IqError::Config(e.to_string()))?;
            let params = IParams::qi_inverse(&datum);
            let v = b_vector_rep(4)?;
            let action = iqg_action(&v, &datum, &params)?;
            let pres = verify_presentation(&action)?;
            for line in pres.lines() {
                archived.push(line);
            }
            report.push(if pres.all_pass() {
                RelationCheck::pass("presentation", "coideal presentation on the rank-4 fixture")
            } else {
                RelationCheck::fail_msg(
                    "presentation",
                    "coideal presentation on the rank-4 fixture",
                    "see archived rows",
                )
            });
            // t_3 identities at the top vertex pair (4, 3).
            report.extend(t_identities(&action, 4, 3)?);
            // Composite symmetry residuals: check the displayed generator
            // table against the defining relations (homomorphism residuals).
            for (i, j) in [(1usize, 2usize), (2, 3), (3, 4), (1, 3), (2, 4), (1, 4)] {
                let lhs_expr = crate::freealg::serre(&datum, i, j, &GenExpr::b(i), &GenExpr::b(j));
                let rhs_expr = crate::freealg::kolb_c(&datum, &params, i, j)?;
                let tl = tau_i_apply(&datum, 1, &lhs_expr)?;
                let tr = tau_i_apply(&datum, 1, &rhs_expr)?;
                let residual = evaluate(&tl, &action)?.sub(&evaluate(&tr, &action)?);
                let check = RelationCheck::from_residual(
                    format!("tau_hom({i},{j})"),
                    format!("tau_1 of relation S_({i},{j})(B,B) = C still holds"),
                    &residual,
                );
                archived.push(format!("residual tau_hom({i},{j}): pass = {}", check.is_pass()));
                report.push(check);
            }
            // t_1 = tau_1(t_3) and its bracket residuals, archived.
            let t3 = t_expr(3, 4);
            let t1 = tau_i_apply(&datum, 1, &t3)?;
            let t1m = evaluate(&t1, &action)?;
            let dec = case_decompose(&action, 2)?;
            for comp in &dec.components {
                let resid = t1m.commutator(&comp.matrix);
                archived.push(format!(
                    "residual [t1, B2,{}]: nnz = {}",
                    comp.label,
                    resid.nnz()
                ));
            }
            report.push(RelationCheck::pass(
                "archive",
                "residual table archived for the rank-2 run",
            ));
        }
        _ => {
            return Err(IqError::Config(
                "the conjectural construction is pinned at r in {1, 2}".into(),
            ))
        }
    }
    // Braid laws on split type-A surrogates, radical-free gauge.
    report.extend(surrogate_braid_laws(r)?);
    Ok(ConjectureReport {
        report,
        archived_rows: archived,
    })
}

/// t_{odd} := [B_even, [B_even, B_odd]_{q^2}]_{q^{-2}}.
fn t_expr(odd: usize, even: usize) -> GenExpr {
    let inner = qcomm(&GenExpr::b(even), &GenExpr::b(odd), 2);
    qcomm(&GenExpr::b(even), &inner, -2)
}

/// The bracket identities of the extra Cartan element at the fold:
/// [B+{l;0}, B-{l;0}] = t {l;0} and [t, B+-] = +-[2] B+- {l;+-1}.
fn t_identities(
    action: &crate::iqrep::IThetaAction,
    even: usize,
    odd: usize,
) -> Result<RelationReport, IqError> {
    let mut report = RelationReport::new("fold Cartan element identities");
    let t = evaluate(&t_expr(odd, even), action)?;
    let l = ell(action, odd)?;
    let dec = case_decompose(action, even)?;
    if !dec.checks.all_pass() {
        return Err(IqError::Config(
            "splitting identities failed before the fold checks".into(),
        ));
    }
    let plus = dec
        .components
        .iter()
        .find(|c| c.label == "+")
        .expect("plus component");
    let minus = dec
        .components
        .iter()
        .find(|c| c.label == "-")
        .expect("minus component");
    let c0 = curly_mat(&l, 0, 1);
    let lhs = plus.matrix.mul(&c0).commutator(&minus.matrix.mul(&c0));
    let rhs = t.mul(&c0);
    report.push(RelationCheck::from_residual(
        "tbracket",
        format!("[B{even},+{{l;0}}, B{even},-{{l;0}}] = t{odd} {{l{odd};0}}"),
        &lhs.sub(&rhs),
    ));
    let two = qint(2, 1);
    for (label, comp, sign) in [("+", plus, 1i64), ("-", minus, -1i64)] {
        let lhs = t.commutator(&comp.matrix);
        let rhs = comp
            .matrix
            .mul(&curly_mat(&l, sign, 1))
            .scale(&(&QScalar::from_int(sign) * &two));
        report.push(RelationCheck::from_residual(
            format!("tshift({label})"),
            format!("[t{odd}, B{even},{label}] = {sign:+}[2] B{even},{label} {{l{odd};{sign:+}1}}"),
            &lhs.sub(&rhs),
        ));
    }
    Ok(report)
}

/// Braid laws of the composite symmetries as operator identities on split
/// type-A modules, in the varsigma = -q^{-2} gauge where the symmetry
/// formulas stay inside the field.
fn surrogate_braid_laws(r: usize) -> Result<RelationReport, IqError> {
    let mut report = RelationReport::new("composite braid laws on type-A surrogates");
    if r < 2 {
        report.push(RelationCheck::skipped(
            "braid",
            "composite braid laws",
            "no pairs of composite symmetries below rank 2",
        ));
        return Ok(report);
    }
    // Adjacent braid law needs three composite indices; the commuting law
    // needs indices at distance > 1. Use the smallest split data that carry
    // them.
    let adjacent_rank = 3; // tau_1, tau_2 on 6 vertices
    let datum = satake(Family::AI1 { r: adjacent_rank }).map_err(|e| IqError::Config(e.to_string()))?;
    let params = IParams::constant(&datum, -&QScalar::q_power(-2));
    let eta = EtaParams::ones(&datum);
    let v = crate::urep::vector_rep(2 * adjacent_rank + 1);
    let action = iqg_action(&v, &datum, &params)?;
    let tau_word = |i: usize| vec![2 * i, 2 * i - 1, 2 * i + 1, 2 * i];
    let mut left = tau_word(1);
    left.extend(tau_word(2));
    left.extend(tau_word(1));
    let mut right = tau_word(2);
    right.extend(tau_word(1));
    right.extend(tau_word(2));
    report.extend(braid_law_check(
        &datum, &params, &eta, &action, &left, &right, "adjacent",
    )?);
    let far_rank = 4; // tau_1, tau_3 on 8 vertices
    let datum = satake(Family::AI1 { r: far_rank }).map_err(|e| IqError::Config(e.to_string()))?;
    let params = IParams::constant(&datum, -&QScalar::q_power(-2));
    let eta = EtaParams::ones(&datum);
    let v = crate::urep::vector_rep(2 * far_rank + 1);
    let action = iqg_action(&v, &datum, &params)?;
    let mut left = tau_word(1);
    left.extend(tau_word(3));
    let mut right = tau_word(3);
    right.extend(tau_word(1));
    report.extend(braid_law_check(
        &datum, &params, &eta, &action, &left, &right, "distant",
    )?);
    Ok(report)
}
