#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use jetalg::conslaw::{equivalent_up_to_scale, ConservedVector};
use jetalg::{parse, Rational};
use jetalg_cli::{input, run, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn args(name: &str) -> Vec<String> {
    let dir = fixtures();
    let text = fs::read_to_string(dir.join(format!("{name}.args"))).unwrap();
    text.lines()
        .map(|l| l.replace("{fixtures}", dir.to_str().unwrap()))
        .collect()
}

pub fn run_fixture(name: &str) -> Output {
    run(std::iter::once("jetalg".to_string()).chain(args(name)))
}

/// Names of fixtures with a byte-exact expected output.
pub fn exact_fixtures() -> Vec<String> {
    with_extension("out")
}

/// Names of fixtures checked for equivalence against a reference vector.
pub fn equivalence_fixtures() -> Vec<String> {
    with_extension("ref")
        .into_iter()
        .filter(|n| fixtures().join(format!("{n}.args")).exists())
        .collect()
}

fn with_extension(ext: &str) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(fixtures())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == ext).then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

/// Runs an exact fixture; `Err` describes the mismatch.
pub fn check_exact(name: &str) -> Result<(), String> {
    let expected = fs::read_to_string(fixtures().join(format!("{name}.out"))).unwrap();
    let out = run_fixture(name);
    if out.code != 0 {
        return Err(format!("{name}: exit {} ({})", out.code, out.stderr.trim()));
    }
    if out.stdout != expected {
        return Err(format!("{name}: expected\n{expected}got\n{}", out.stdout));
    }
    Ok(())
}

fn value_after<'a>(args: &'a [String], flag: &str) -> Vec<&'a str> {
    args.windows(2)
        .filter(|w| w[0] == flag)
        .map(|w| w[1].as_str())
        .collect()
}

/// Runs an equivalence fixture and returns the scale relating output and reference.
pub fn check_equivalent(name: &str) -> Result<Rational, String> {
    let args = args(name);
    let out = run_fixture(name);
    if out.code != 0 {
        return Err(format!("{name}: exit {} ({})", out.code, out.stderr.trim()));
    }
    let component = |prefix: &str| {
        out.stdout
            .lines()
            .find_map(|l| l.strip_prefix(prefix))
            .map(|s| parse(s).unwrap())
            .ok_or_else(|| format!("{name}: no `{prefix}` line in output"))
    };
    let cv = ConservedVector::from_components(component("C1 = ")?, component("C2 = ")?);
    let params: Vec<String> = value_after(&args, "--param").into_iter().map(String::from).collect();
    let values = input::param_values(&params).map_err(|e| e.to_string())?;
    let eq = input::equation(value_after(&args, "--equation")[0], &values).map_err(|e| e.to_string())?;
    let reference_path = format!("@{}", fixtures().join(format!("{name}.ref")).display());
    let fixed = jetalg::algebra::Substitution::Values(input::fixed_params(&eq));
    let load = |key: &str| -> Result<jetalg::DiffPoly, String> {
        let p = input::expression(&reference_path, "vector", key).map_err(|e| e.to_string())?;
        jetalg::algebra::substitute_dependent(&p, &fixed).map_err(|e| e.to_string())
    };
    let reference = ConservedVector::from_components(load("c1")?, load("c2")?);
    match equivalent_up_to_scale(&cv, &reference, &eq).map_err(|e| e.to_string())? {
        Some(s) => Ok(s),
        None => Err(format!("{name}: output is not equivalent to the reference vector")),
    }
}
