use std::fs;

use jetalg_cli::run;
use serde_json::Value;

const RH: &str = "u_t - u*u_xxx - 3*u_x*u_xx - u*u_x";

fn cli(args: &[&str]) -> jetalg_cli::Output {
    run(std::iter::once("jetalg").chain(args.iter().copied()))
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("jetalg-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn negative_control_exits_with_verification_failure() {
    let out = cli(&["verify", "--equation", RH, "--c1", "u", "--c2", "0"]);
    assert_eq!(out.code, 3);
    assert!(out.stdout.ends_with("status: not conserved\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["adjoint", "--equation", "u_t + w"]).code, 1);
    assert_eq!(cli(&["adjoint", "--equation", "u_t +"]).code, 1);
    assert_eq!(cli(&["adjoint"]).code, 1);
    assert_eq!(cli(&["adjoint", "--equation", "@/nonexistent/file"]).code, 1);
    assert_eq!(cli(&["--help"]).code, 0);
    // u_t with a non-constant coefficient has no multiplier for the identity.
    let out = cli(&["check-selfadjoint", "--equation", "u*u_t - u_xxx"]);
    assert_eq!(out.code, 2, "{}", out.stderr);
    assert!(out.stderr.starts_with("error: "));
}

#[test]
fn params_and_beta_override() {
    let family = "u_t - eps*u_txx - u*u_xxx - beta*u_x*u_xx - alpha*u*u_x + kappa*u_x";
    let out = cli(&["check-selfadjoint", "--equation", family, "--param", "eps=0", "--beta", "3"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.ends_with("branches:\n  phi = a + b*u^2\n"), "{}", out.stdout);
    let out = cli(&["check-selfadjoint", "--equation", family, "--param", "eps=1"]);
    assert!(out.stdout.ends_with("branches:\n  [beta = 2] phi = a + b*u\n"), "{}", out.stdout);
}

#[test]
fn json_documents_keep_exact_terms() {
    let out = cli(&[
        "conserved", "--json", "--equation", RH, "--symmetry", "xi_t=-t;eta=u",
        "--substitution", "v=a + b*u^2", "--component", "b",
    ]);
    assert_eq!(out.code, 0);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc["c2"]["text"], "-3/4*u^4 - 3*u^3*u_xx");
    assert_eq!(doc["c2"]["terms"][0]["coefficient"], "-3/4");

    let out = cli(&["verify", "--json", "--equation", RH, "--c1", "u^3", "--c2", "-3/4*u^4 - 3*u^3*u_xx"]);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc["multiplier"]["text"], "3*u^2");
    assert_eq!(doc["conserved"], true);

    for args in [
        vec!["adjoint", "--json", "--equation", RH],
        vec!["check-selfadjoint", "--json", "--equation", RH],
        vec!["admits", "--json", "--equation", RH, "--symmetry", "xi_x=1"],
    ] {
        let out = cli(&args);
        assert_eq!(out.code, 0);
        serde_json::from_str::<Value>(&out.stdout).unwrap();
    }
}

#[test]
fn nonlocal_verification() {
    let out = cli(&[
        "verify", "--nonlocal", "--equation", RH, "--c1", "u*v + t*u_t*v",
        "--c2", "-u^2*v - t*u*u_t*v - 2*u_x^2*v - 2*u*u_xx*v + 2*u*u_x*v_x - u^2*v_xx - t*u_t*u_xx*v - 2*t*u_x*u_tx*v - t*u*u_txx*v + t*u_x*u_t*v_x + t*u*u_tx*v_x - t*u*u_t*v_xx",
    ]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let out = cli(&["verify", "--nonlocal", "--equation", "u_t", "--c1", "0", "--c2", "v"]);
    assert_eq!(out.code, 3);
}

#[test]
fn raw_vector_keeps_xi_l() {
    let plain = cli(&["conserved", "--equation", RH, "--symmetry", "xi_t=-t;eta=u", "--no-normalize"]);
    let raw = cli(&["conserved", "--equation", RH, "--symmetry", "xi_t=-t;eta=u", "--raw"]);
    assert_eq!(raw.code, 0);
    assert_ne!(plain.stdout, raw.stdout);
}

#[test]
fn simulate_writes_csv() {
    let cfg = temp_file(
        "ch.cfg",
        "[equation]\nlhs = u_t - u_txx - u*u_xxx - 2*u_x*u_xx + 3*u*u_x + kappa*u_x\nkappa = 0\n\n\
         [simulate]\nn = 64\ndt = 1e-3\nt_end = 0.01\nsave_every = 5\nu0 = 0.2 + 0.1*cos(x)\n\
         monitor.mass = u\nmonitor.energy = u^2 + u_x^2\n",
    );
    let out = cli(&["simulate", "--config", &cfg]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines[0], "time,mass,energy");
    assert_eq!(lines.len(), 4);
    let energy: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(energy.iter().all(|e| ((e - energy[0]) / energy[0]).abs() < 1e-12));
    assert_eq!(cli(&["simulate", "--config", &cfg]), out);

    let json = cli(&["simulate", "--json", "--config", &cfg]);
    let doc: Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(doc["columns"][2], "energy");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);

    let target = std::path::Path::new(&cfg).with_extension("csv");
    let out = cli(&["simulate", "--config", &cfg, "--output", target.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    assert_eq!(fs::read_to_string(&target).unwrap().lines().count(), 4);
}

#[test]
fn simulate_errors() {
    let blowup = temp_file(
        "rh.cfg",
        "[equation]\nlhs = u_t - u*u_xxx - 3*u_x*u_xx - u*u_x\n[simulate]\nn = 256\ndt = 1e-2\nt_end = 1\nu0 = 1 + 0.01*cos(x)\n",
    );
    assert_eq!(cli(&["simulate", "--config", &blowup]).code, 4);
    let bad_grid = temp_file("grid.cfg", "[equation]\nlhs = u_t + u_x\n[simulate]\nn = 24\nu0 = sin(x)\n");
    assert_eq!(cli(&["simulate", "--config", &bad_grid]).code, 1);
    let unknown = temp_file("key.cfg", "[equation]\nlhs = u_t + u_x\n[simulate]\nsteps = 3\nu0 = 1\n");
    let out = cli(&["simulate", "--config", &unknown]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("key.cfg:4"), "{}", out.stderr);
    let free = temp_file("free.cfg", "[equation]\nlhs = u_t + kappa*u_x\n[simulate]\nn = 16\nu0 = 1\n");
    assert_eq!(cli(&["simulate", "--config", &free]).code, 2);
}
