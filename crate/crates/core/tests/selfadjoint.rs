use std::collections::BTreeMap;

use jetalg::algebra::{int, Substitution, Symbol};
use jetalg::catalog;
use jetalg::selfadjoint::{
    classify_equation, family_satisfies_identity, Classification, Outcome, PhiFamily,
};
use jetalg::variational::{adjoint, EquationSpec};
use jetalg::{parse, DiffPoly, Monomial};

fn p(s: &str) -> DiffPoly {
    parse(s).unwrap()
}

fn mono(s: &str) -> Monomial {
    p(s).terms()[0].monomial.clone()
}

fn families(c: &Classification) -> Vec<(String, String)> {
    match c {
        Classification::QuasiSelfAdjoint(list) => list
            .iter()
            .map(|(conds, f)| {
                let conds: Vec<String> = conds.iter().map(|c| c.to_string()).collect();
                (conds.join(", "), f.to_string())
            })
            .collect(),
        other => panic!("expected QuasiSelfAdjoint, got {other:?}"),
    }
}

#[test]
fn adjoint_of_generalized_family() {
    let fstar = adjoint(&catalog::generalized_family()).unwrap();
    assert_eq!(
        fstar,
        p("-v_t + eps*v_txx + u*v_xxx + (3 - beta)*(u_x*v_xx + v_x*u_xx) + alpha*u*v_x - kappa*v_x")
    );
}

#[test]
fn substituted_identity_matches_displayed_brackets() {
    let report = classify_equation(&catalog::generalized_family()).unwrap();
    let expected: BTreeMap<Monomial, DiffPoly> = [
        ("u_t", "-phi_u"),
        ("u_x", "alpha*phi_u*u - kappa*phi_u"),
        ("u_x^3", "phi_uuu*u - (beta - 3)*phi_uu"),
        ("u_xxx", "phi_u*u"),
        ("u_txx", "eps*phi_u"),
        ("u_x*u_xx", "3*phi_uu*u - 2*(beta - 3)*phi_u"),
        ("u_x*u_tx", "2*eps*phi_uu"),
        ("u_t*u_x^2", "eps*phi_uuu"),
        ("u_t*u_xx", "eps*phi_uu"),
    ]
    .into_iter()
    .map(|(k, v)| (mono(k), p(v)))
    .collect();
    assert_eq!(report.system.identity, expected);
    assert_eq!(report.system.multiplier, p("-phi_u"));
}

#[test]
fn generalized_family_branches() {
    let report = classify_equation(&catalog::generalized_family()).unwrap();
    assert_eq!(
        families(&report.classification),
        vec![
            ("eps = 0, beta != 1".to_string(), "a + b*u^(-1 + beta)".to_string()),
            ("eps = 0, beta = 1".to_string(), "a + b*ln(u)".to_string()),
            ("eps != 0, beta = 2".to_string(), "a + b*u".to_string()),
        ]
    );
    for b in &report.branches {
        if matches!(b.outcome, Outcome::Family(_)) {
            assert!(family_satisfies_identity(&catalog::generalized_family(), b).unwrap());
        }
    }
}

#[test]
fn epsilon_zero_family() {
    let report = classify_equation(&catalog::epsilon_zero_family()).unwrap();
    assert_eq!(
        families(&report.classification),
        vec![
            ("beta != 1".to_string(), "a + b*u^(-1 + beta)".to_string()),
            ("beta = 1".to_string(), "a + b*ln(u)".to_string()),
        ]
    );
}

#[test]
fn nonzero_epsilon_forces_beta_two() {
    let values = BTreeMap::from([(Symbol::new("eps"), int(1))]);
    let eq = EquationSpec::with_values(p(catalog::FAMILY_LHS), &values).unwrap();
    let report = classify_equation(&eq).unwrap();
    assert_eq!(
        families(&report.classification),
        vec![("beta = 2".to_string(), "a + b*u".to_string())]
    );
    let report = classify_equation(&catalog::beta_two_family()).unwrap();
    assert_eq!(report.classification, Classification::SelfAdjoint);
}

#[test]
fn named_equations() {
    assert_eq!(
        classify_equation(&catalog::camassa_holm()).unwrap().classification,
        Classification::SelfAdjoint
    );
    assert_eq!(
        classify_equation(&catalog::fornberg_whitham()).unwrap().classification,
        Classification::NotQuasiSelfAdjoint
    );
    let rh = classify_equation(&catalog::rosenau_hyman()).unwrap();
    assert_eq!(
        families(&rh.classification),
        vec![(String::new(), "a + b*u^2".to_string())]
    );
    assert_eq!(
        PhiFamily::power(DiffPoly::integer(2)).closure(),
        Some(p("a + b*u^2"))
    );
}

#[test]
fn symbolic_result_specializes_to_rosenau_hyman() {
    let report = classify_equation(&catalog::epsilon_zero_family()).unwrap();
    let Classification::QuasiSelfAdjoint(list) = report.classification else {
        panic!()
    };
    let PhiFamily::Power { exponent } = &list[0].1 else {
        panic!()
    };
    let at_three =
        jetalg::algebra::substitute_dependent(exponent, &Substitution::value("beta", int(3))).unwrap();
    assert_eq!(PhiFamily::power(at_three).to_string(), "a + b*u^2");
}

#[test]
fn classification_is_scale_invariant() {
    for eq in [catalog::camassa_holm(), catalog::fornberg_whitham(), catalog::rosenau_hyman(), catalog::generalized_family()] {
        let base = classify_equation(&eq).unwrap().classification;
        let scaled = classify_equation(&eq.scaled(&jetalg::algebra::rat(-7, 3)).unwrap()).unwrap();
        assert_eq!(scaled.classification, base);
    }
}

#[test]
fn self_adjoint_under_identity_substitution() {
    // β = 2 members: F*|_{v=u} + F = 0 for several rational ε, α, κ.
    for (e, a, k) in [(1, -3, 0), (2, 5, -1), (0, 1, 7)] {
        let values = BTreeMap::from([
            (Symbol::new("eps"), int(e)),
            (Symbol::new("alpha"), int(a)),
            (Symbol::new("kappa"), int(k)),
            (Symbol::new("beta"), int(2)),
        ]);
        let eq = EquationSpec::with_values(p(catalog::FAMILY_LHS), &values).unwrap();
        let sub = jetalg::algebra::substitute_dependent(
            &adjoint(&eq).unwrap(),
            &Substitution::VTo(DiffPoly::u()),
        )
        .unwrap();
        assert!((sub + eq.lhs()).is_zero());
    }
}
