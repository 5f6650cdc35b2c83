use jetalg::algebra::{total_derivative, Substitution};
use jetalg::catalog;
use jetalg::conslaw::{
    check_admission, conserved_vector, equivalent_up_to_scale, normalize, split_by_constants,
    verify_local, verify_nonlocal, ConservedVector,
};
use jetalg::{parse, DiffPoly, Dir};

fn p(s: &str) -> DiffPoly {
    parse(s).unwrap()
}

fn dx(e: &DiffPoly) -> DiffPoly {
    total_derivative(e, Dir::X).unwrap()
}

#[test]
fn rosenau_hyman_raw_vector() {
    let eq = catalog::rosenau_hyman();
    let sym = catalog::scaling_symmetry();
    let cv = conserved_vector(&eq, &sym, None, false).unwrap();
    let w = p("u + t*u_t");
    assert_eq!(cv.c1, &p("v") * &w);
    let expected_c2 = &p("-u*v + u_x*v_x - v*u_xx - u*v_xx") * &w
        + &p("u*v_x - 2*v*u_x") * &dx(&w)
        - &p("u*v") * &dx(&dx(&w));
    assert_eq!(cv.c2, expected_c2);
    verify_nonlocal(&cv, &eq).unwrap();
}

#[test]
fn rosenau_hyman_normalized_and_split() {
    let eq = catalog::rosenau_hyman();
    let sym = catalog::scaling_symmetry();
    let subst = Substitution::VTo(p("a + b*u^2"));
    let raw = conserved_vector(&eq, &sym, Some(&subst), false).unwrap();
    verify_local(&raw, &eq).unwrap();
    let cv = normalize(&raw, &eq).unwrap();
    assert_eq!(cv.c1, p("a*u + b*u^3"));
    assert_eq!(
        cv.c2,
        p("-a*(1/2*u^2 + u_x^2 + u*u_xx) - b*(3/4*u^4 + 3*u^3*u_xx)")
    );
    let parts = split_by_constants(&cv, &["a", "b"]).unwrap();
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[0].c1, p("u"));
    assert_eq!(parts[0].c2, p("-1/2*u^2 - u_x^2 - u*u_xx"));
    assert_eq!(parts[1].c1, p("u^3"));
    assert_eq!(parts[1].c2, p("-3/4*u^4 - 3*u^3*u_xx"));
    assert_eq!(verify_local(&parts[0], &eq).unwrap().multiplier, Some(p("1")));
    assert_eq!(verify_local(&parts[1], &eq).unwrap().multiplier, Some(p("3*u^2")));
}

#[test]
fn rosenau_hyman_with_xi_l_normalizes_the_same() {
    let eq = catalog::rosenau_hyman();
    let sym = catalog::scaling_symmetry();
    let subst = Substitution::VTo(p("a + b*u^2"));
    let with = conserved_vector(&eq, &sym, Some(&subst), true).unwrap();
    let without = conserved_vector(&eq, &sym, Some(&subst), false).unwrap();
    let a = normalize(&with, &eq).unwrap();
    let b = normalize(&without, &eq).unwrap();
    assert_eq!((a.c1, a.c2), (b.c1, b.c2));
}

#[test]
fn camassa_holm_pipeline() {
    let eq = catalog::camassa_holm();
    let sym = catalog::camassa_holm_generator();
    assert!(check_admission(&eq, &sym).unwrap().admitted);
    let raw = conserved_vector(&eq, &sym, None, false).unwrap();
    verify_nonlocal(&raw, &eq).unwrap();
    let raw = conserved_vector(&eq, &sym, Some(&Substitution::VTo(DiffPoly::u())), false).unwrap();
    verify_local(&raw, &eq).unwrap();
    let cv = normalize(&raw, &eq).unwrap();
    eprintln!("C1 = {}\nC2 = {}", cv.c1, cv.c2);
    verify_local(&cv, &eq).unwrap();
    let reference = ConservedVector::from_components(
        p("2*(u^2 + u_x^2) + kappa*u"),
        p("4*(u^3 - u^2*u_xx - u*u_tx) + kappa*(7/2*u^2 - 1/2*u_x^2 - u*u_xx - u_tx + kappa*u)"),
    );
    let report = verify_local(&reference, &eq).unwrap();
    assert_eq!(report.multiplier, Some(p("4*u + kappa")));
    let scale = equivalent_up_to_scale(&cv, &reference, &eq).unwrap();
    assert_eq!(scale, Some(jetalg::algebra::int(1)));
}

#[test]
fn camassa_holm_without_kappa() {
    let eq = catalog::camassa_holm_with_kappa(0);
    let sym = catalog::camassa_holm_generator()
        .with_values(&Substitution::value("kappa", jetalg::algebra::int(0)))
        .unwrap();
    let raw = conserved_vector(&eq, &sym, Some(&Substitution::VTo(DiffPoly::u())), false).unwrap();
    let cv = normalize(&raw, &eq).unwrap();
    eprintln!("C1 = {}\nC2 = {}", cv.c1, cv.c2);
    let reference = ConservedVector::from_components(
        p("u^2 + u_x^2"),
        p("2*(u^3 - u^2*u_xx - u*u_tx)"),
    );
    assert_eq!(verify_local(&reference, &eq).unwrap().multiplier, Some(p("2*u")));
    let scale = equivalent_up_to_scale(&cv, &reference, &eq).unwrap();
    assert_eq!(scale, Some(jetalg::algebra::int(2)));
}
