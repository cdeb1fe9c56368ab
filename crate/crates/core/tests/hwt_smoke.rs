//! Early smoke tests for the case-study machinery on the smallest modules.

use iqlab_core::hwt::{branch_audit, build_case, highest_weight_records, CaseTag};
use iqlab_core::iqrep::iqg_action;
use iqlab_core::urep::{constituents, tensor, vector_rep};

#[test]
fn ai_odd_r1_vector() {
    let case = build_case(CaseTag::AiOdd, 1).unwrap();
    let v = vector_rep(3);
    let action = iqg_action(&v, &case.datum, &case.params).unwrap();
    let records = highest_weight_records(&case, &action).unwrap();
    assert_eq!(records.len(), 1, "{records:?}");
    let rec = &records[0];
    assert!(rec.pass, "reasons: {:?}", rec.reasons);
    assert_eq!(rec.kdim.as_deref(), Some("3"));
    let audit = branch_audit(&case, &action, &v).unwrap();
    assert!(audit.pass(), "{audit:?}");
}

fn audit_dims(tag: CaseTag, r: usize, n: usize, copies: usize) -> Vec<String> {
    let case = build_case(tag, r).unwrap();
    assert_eq!(case.ambient_n, n);
    let mut m = vector_rep(n);
    for _ in 1..copies {
        m = tensor(&m, &vector_rep(n)).unwrap();
    }
    let action = iqg_action(&m, &case.datum, &case.params).unwrap();
    let audit = branch_audit(&case, &action, &m).unwrap();
    assert!(audit.pass(), "{tag:?} r={r}: {audit:?}");
    let mut dims: Vec<String> = audit
        .records
        .iter()
        .map(|r| r.kdim.clone().unwrap_or_default())
        .collect();
    dims.sort_by_key(|d| d.parse::<u64>().unwrap_or(0));
    dims
}

#[test]
fn ai_even_r2() {
    assert_eq!(audit_dims(CaseTag::AiEven, 2, 4, 1), vec!["4"]);
    assert_eq!(
        audit_dims(CaseTag::AiEven, 2, 4, 2),
        vec!["1", "3", "3", "9"]
    );
}

#[test]
fn aii_r2() {
    assert_eq!(audit_dims(CaseTag::Aii, 2, 4, 1), vec!["4"]);
    assert_eq!(audit_dims(CaseTag::Aii, 2, 4, 2), vec!["1", "5", "10"]);
}

#[test]
fn aiii_split_r2() {
    assert_eq!(audit_dims(CaseTag::AiiiSplit, 2, 5, 1), vec!["2", "3"]);
    assert_eq!(
        audit_dims(CaseTag::AiiiSplit, 2, 5, 2),
        vec!["1", "3", "3", "6", "6", "6"]
    );
}

#[test]
fn aiii_even_r2() {
    assert_eq!(audit_dims(CaseTag::AiiiEven, 2, 4, 1), vec!["2", "2"]);
    assert_eq!(
        audit_dims(CaseTag::AiiiEven, 2, 4, 2),
        vec!["1", "1", "3", "3", "4", "4"]
    );
}

#[test]
fn ai_odd_r1_adjoint() {
    let case = build_case(CaseTag::AiOdd, 1).unwrap();
    let v = vector_rep(3);
    let vv = tensor(&v, &v).unwrap();
    let vvv = tensor(&vv, &v).unwrap();
    let parts = constituents(&vvv).unwrap();
    let adjoint = parts
        .iter()
        .find(|m| m.lambda.as_deref() == Some(&[1, 1]))
        .expect("adjoint constituent");
    assert_eq!(adjoint.dim(), 8);
    let action = iqg_action(adjoint, &case.datum, &case.params).unwrap();
    let audit = branch_audit(&case, &action, adjoint).unwrap();
    let mut dims: Vec<String> = audit
        .records
        .iter()
        .map(|r| r.kdim.clone().unwrap_or_default())
        .collect();
    dims.sort();
    assert_eq!(dims, vec!["3".to_string(), "5".to_string()], "{audit:?}");
    assert!(audit.pass());
}

#[test]
fn relation_tables_r2() {
    use iqlab_core::hwt::{commuting_lemmas, verify_case_relations};
    for (tag, n) in [
        (CaseTag::AiOdd, 3usize),
        (CaseTag::Aii, 4),
        (CaseTag::AiiiSplit, 5),
        (CaseTag::AiiiEven, 4),
    ] {
        let r = if tag == CaseTag::AiOdd { 1 } else { 2 };
        let case = build_case(tag, r).unwrap();
        let v = vector_rep(n);
        let m = tensor(&v, &v).unwrap();
        let action = iqg_action(&m, &case.datum, &case.params).unwrap();
        let rep = verify_case_relations(&case, &action).unwrap();
        let fails: Vec<String> = rep
            .lines()
            .into_iter()
            .filter(|l| l.starts_with("FAIL"))
            .collect();
        assert!(fails.is_empty(), "{tag:?}: {fails:?}");
        let rep = commuting_lemmas(&case, &action).unwrap();
        let fails: Vec<String> = rep
            .lines()
            .into_iter()
            .filter(|l| l.starts_with("FAIL"))
            .collect();
        assert!(fails.is_empty(), "{tag:?} lemmas: {fails:?}");
    }
}

#[test]
fn conjecture_rank1() {
    let out = iqlab_core::hwt::conjecture::conjecture46_check(1).unwrap();
    let fails: Vec<String> = out
        .report
        .lines()
        .into_iter()
        .filter(|l| l.starts_with("FAIL"))
        .collect();
    assert!(fails.is_empty(), "{fails:?}");
}

#[test]
fn conjecture_rank2() {
    let out = iqlab_core::hwt::conjecture::conjecture46_check(2).unwrap();
    assert!(!out.archived_rows.is_empty());
    let fails: Vec<String> = out
        .report
        .lines()
        .into_iter()
        .filter(|l| l.starts_with("FAIL"))
        .collect();
    assert!(fails.is_empty(), "{fails:?}");
}

#[test]
fn kdim_oracle_values() {
    use iqlab_core::hwt::kdim_oracle;
    use iqlab_core::scalar::Rational;
    // Rank-one odd orthogonal: dim = 2n + 1 at label 2n; the half-integer
    // ladder n = 1/2 gives label 1 and dimension 2.
    let case = build_case(CaseTag::AiOdd, 1).unwrap();
    assert_eq!(
        kdim_oracle(&case, &[Rational::from_int(1)]).unwrap().to_string(),
        "2"
    );
    assert_eq!(
        kdim_oracle(&case, &[Rational::from_int(0)]).unwrap().to_string(),
        "1"
    );
    // Rank-two symplectic: the defining four-dimensional module.
    let case = build_case(CaseTag::Aii, 2).unwrap();
    assert_eq!(
        kdim_oracle(&case, &[Rational::from_int(0), Rational::from_int(1)])
            .unwrap()
            .to_string(),
        "4"
    );
    // Negative labels are rejected.
    assert!(kdim_oracle(&case, &[Rational::from_int(-1), Rational::from_int(0)]).is_none());
}
