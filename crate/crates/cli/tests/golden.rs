mod common;

use jetalg_cli::run;

fn cli(args: &[&str]) -> jetalg_cli::Output {
    run(std::iter::once("jetalg").chain(args.iter().copied()))
}

#[test]
fn exact_fixtures_reproduce() {
    let names = common::exact_fixtures();
    assert!(names.len() >= 11);
    let failures: Vec<String> = names
        .iter()
        .filter_map(|n| common::check_exact(n).err())
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn equivalence_fixtures_hold() {
    let names = common::equivalence_fixtures();
    assert_eq!(names, ["camassa_holm_kappa0_vector", "camassa_holm_vector"]);
    assert_eq!(
        common::check_equivalent("camassa_holm_vector").unwrap(),
        jetalg::algebra::int(1)
    );
    assert_eq!(
        common::check_equivalent("camassa_holm_kappa0_vector").unwrap(),
        jetalg::algebra::int(2)
    );
}

#[test]
fn outputs_are_byte_stable() {
    for name in ["rosenau_hyman_vector", "camassa_holm_vector", "eps_zero_classification"] {
        assert_eq!(common::run_fixture(name), common::run_fixture(name));
    }
}

#[test]
fn fornberg_whitham_is_not_quasi_self_adjoint() {
    let cfg = format!("@{}/fornberg_whitham.cfg", common::fixtures().display());
    let out = cli(&["check-selfadjoint", "--equation", &cfg]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().next(), Some("classification: NotQuasiSelfAdjoint"));
}

#[test]
fn camassa_holm_admits_its_generator() {
    let cfg = format!("@{}/camassa_holm.cfg", common::fixtures().display());
    let out = cli(&["admits", "--equation", &cfg, "--symmetry", &cfg]);
    assert_eq!((out.code, out.stdout.as_str()), (0, "admitted: yes\nresidual = 0\n"));
    let out = cli(&["admits", "--equation", &cfg, "--symmetry", "xi_t=t"]);
    assert_eq!(out.code, 3);
    assert!(out.stdout.starts_with("admitted: no\n"));
}
