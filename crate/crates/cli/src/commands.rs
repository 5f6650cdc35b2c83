use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use jetalg::algebra::{Substitution, Symbol};
use jetalg::conslaw::{
    check_admission, conserved_vector, local_report, nonlocal_report, normalize,
    split_by_constants, ConservedVector,
};
use jetalg::error::{Error, Result};
use jetalg::numerics::{simulate_with, Grid, Profile, SimulateOptions};
use jetalg::selfadjoint::{classify_equation, Outcome};
use jetalg::variational::{adjoint, EquationSpec};
use jetalg::{print, Atom, DiffPoly};

use crate::input::{self, Config};
use crate::render::{document, poly};

/// Text written to stdout plus the exit status the command asks for.
pub struct Reply {
    pub stdout: String,
    pub code: i32,
}

impl Reply {
    fn ok(stdout: String) -> Self {
        Reply { stdout, code: 0 }
    }
}

pub const VERIFICATION_FAILED: i32 = 3;

pub fn adjoint_cmd(eq: &EquationSpec, json: bool) -> Result<Reply> {
    let fstar = adjoint(eq)?;
    Ok(Reply::ok(if json {
        document(&json!({"equation": poly(eq.lhs()), "adjoint": poly(&fstar)}))
    } else {
        format!("F* = {}\n", print(&fstar))
    }))
}

/// `beta` given as a rational fixes the parameter; `symbolic` leaves it free.
pub fn beta_override(beta: Option<&str>) -> Result<BTreeMap<Symbol, jetalg::Rational>> {
    match beta {
        None | Some("symbolic") => Ok(BTreeMap::new()),
        Some(v) => Ok(BTreeMap::from([(Symbol::new("beta"), input::rational(v, None)?)])),
    }
}

pub fn check_selfadjoint_cmd(eq: &EquationSpec, json: bool) -> Result<Reply> {
    let report = classify_equation(eq)?;
    let label = report.classification.label();
    if json {
        let branches: Vec<Value> = report
            .branches
            .iter()
            .map(|b| {
                let conditions: Vec<String> = b.conditions.iter().map(|c| c.to_string()).collect();
                let (kind, detail) = match &b.outcome {
                    Outcome::Family(f) => (
                        "family",
                        json!({"phi": f.to_string(), "closure": f.closure().as_ref().map(poly)}),
                    ),
                    Outcome::Inconsistent(why) => ("inconsistent", json!({"reason": why})),
                    Outcome::Undetermined(rest) => (
                        "undetermined",
                        json!({"residual": rest.iter().map(poly).collect::<Vec<_>>()}),
                    ),
                };
                json!({"conditions": conditions, "outcome": kind, "detail": detail})
            })
            .collect();
        return Ok(Reply::ok(document(&json!({
            "classification": label,
            "adjoint": poly(&report.adjoint),
            "lambda": poly(&report.system.multiplier),
            "constraints": report.system.constraints.iter().map(poly).collect::<Vec<_>>(),
            "branches": branches,
        }))));
    }
    let mut out = String::new();
    writeln!(out, "classification: {label}").unwrap();
    writeln!(out, "F* = {}", print(&report.adjoint)).unwrap();
    writeln!(out, "lambda = {}", print(&report.system.multiplier)).unwrap();
    writeln!(out, "constraints:").unwrap();
    for c in &report.system.constraints {
        writeln!(out, "  {} = 0", print(c)).unwrap();
    }
    writeln!(out, "branches:").unwrap();
    for b in &report.branches {
        writeln!(out, "  {b}").unwrap();
    }
    Ok(Reply::ok(out))
}

pub struct ConservedRequest<'a> {
    pub symmetry: &'a str,
    pub substitution: Option<&'a str>,
    pub raw: bool,
    pub no_normalize: bool,
    pub component: Option<&'a str>,
}

fn split_constants(cv: &ConservedVector) -> Vec<&'static str> {
    ["a", "b"]
        .into_iter()
        .filter(|c| {
            let atom = Atom::aux(c);
            cv.c1.contains_atom(|a| *a == atom) || cv.c2.contains_atom(|a| *a == atom)
        })
        .collect()
}

fn vector_json(cv: &ConservedVector) -> Value {
    json!({"c1": poly(&cv.c1), "c2": poly(&cv.c2)})
}

/// Builds the vector, normalizing it when a substitution makes it local.
///
/// `raw` keeps the `ξL` terms and skips normalization; `no_normalize` only skips normalization.
pub fn conserved_cmd(eq: &EquationSpec, req: &ConservedRequest, json: bool) -> Result<Reply> {
    let sym = input::symmetry(req.symmetry, eq)?;
    let subst = req.substitution.map(input::substitution).transpose()?;
    let raw = conserved_vector(eq, &sym, subst.as_ref(), req.raw)?;
    let local = subst.is_some();
    let cv = if req.raw || req.no_normalize || !local {
        raw
    } else {
        normalize(&raw, eq)?
    };
    let constants = split_constants(&cv);
    let parts: Vec<(String, ConservedVector)> = if constants.is_empty() {
        Vec::new()
    } else {
        let pieces = split_by_constants(&cv, &constants)?;
        constants
            .iter()
            .map(|c| c.to_string())
            .chain(std::iter::once("1".to_string()))
            .zip(pieces)
            .collect()
    };
    if let Some(name) = req.component {
        let (_, part) = parts
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| Error::Config(format!("the vector has no component `{name}`")))?;
        return Ok(Reply::ok(if json {
            document(&vector_json(part))
        } else {
            format!("C1 = {}\nC2 = {}\n", print(&part.c1), print(&part.c2))
        }));
    }
    if json {
        let components: Vec<Value> = parts
            .iter()
            .map(|(n, p)| json!({"constant": n, "c1": poly(&p.c1), "c2": poly(&p.c2)}))
            .collect();
        return Ok(Reply::ok(document(&json!({
            "symmetry": sym.to_string(),
            "substitution": cv.provenance.substitution,
            "steps": cv.provenance.steps,
            "c1": poly(&cv.c1),
            "c2": poly(&cv.c2),
            "components": components,
        }))));
    }
    let mut out = format!("C1 = {}\nC2 = {}\n", print(&cv.c1), print(&cv.c2));
    for (name, part) in &parts {
        writeln!(out, "component {name}:").unwrap();
        writeln!(out, "  C1 = {}", print(&part.c1)).unwrap();
        writeln!(out, "  C2 = {}", print(&part.c2)).unwrap();
    }
    Ok(Reply::ok(out))
}

pub fn verify_cmd(eq: &EquationSpec, c1: &str, c2: &str, nonlocal: bool, json: bool) -> Result<Reply> {
    let cv = ConservedVector::from_components(
        input::expression(c1, "vector", "c1")?,
        input::expression(c2, "vector", "c2")?,
    );
    let report = if nonlocal {
        nonlocal_report(&cv, eq)?
    } else {
        local_report(&cv, eq)?
    };
    let code = if report.passed() { 0 } else { VERIFICATION_FAILED };
    let stdout = if json {
        document(&json!({
            "divergence": poly(&report.divergence),
            "residual": poly(&report.residual),
            "multiplier": report.multiplier.as_ref().map(poly),
            "conserved": report.passed(),
        }))
    } else {
        let multiplier = report.multiplier.as_ref().map_or("none".to_string(), print);
        format!(
            "divergence = {}\nresidual = {}\nmultiplier = {}\nstatus: {}\n",
            print(&report.divergence),
            print(&report.residual),
            multiplier,
            if report.passed() { "conserved" } else { "not conserved" }
        )
    };
    Ok(Reply { stdout, code })
}

pub fn admits_cmd(eq: &EquationSpec, symmetry: &str, json: bool) -> Result<Reply> {
    let sym = input::symmetry(symmetry, eq)?;
    let report = check_admission(eq, &sym)?;
    let code = if report.admitted { 0 } else { VERIFICATION_FAILED };
    let stdout = if json {
        document(&json!({"admitted": report.admitted, "residual": poly(&report.residual)}))
    } else {
        format!(
            "admitted: {}\nresidual = {}\n",
            if report.admitted { "yes" } else { "no" },
            print(&report.residual)
        )
    };
    Ok(Reply { stdout, code })
}

fn number(entry: &input::Entry) -> Result<f64> {
    Profile::parse(&entry.value)
        .and_then(|p| p.eval(0.0))
        .map_err(|_| Error::Config(format!("{}: `{}` is not a number", entry.origin, entry.value)))
}

/// Runs the `[simulate]` section of a config file; returns the CSV (or JSON) and the trajectory size.
pub fn simulate_cmd(path: &str, params: &BTreeMap<Symbol, jetalg::Rational>, json: bool) -> Result<Reply> {
    let config = Config::read(path)?;
    let eq = input::equation(&format!("@{path}"), params)?;
    let mut n = 256usize;
    let mut length = 2.0 * std::f64::consts::PI;
    let mut dt = 1e-3;
    let mut t_end = 1.0;
    let mut u0 = None;
    let mut options = SimulateOptions::default();
    let mut monitors: Vec<(String, DiffPoly)> = Vec::new();
    for e in config.require("simulate")? {
        match e.key.as_str() {
            "n" => {
                let v = number(e)?;
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(Error::Config(format!("{}: n must be a positive integer", e.origin)));
                }
                n = v as usize;
            }
            "length" => length = number(e)?,
            "dt" => dt = number(e)?,
            "t_end" => t_end = number(e)?,
            "max_amplitude" => options.max_amplitude = Some(number(e)?),
            "save_every" => {
                let v = number(e)?;
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(Error::Config(format!("{}: save_every must be a positive integer", e.origin)));
                }
                options.save_every = v as usize;
            }
            "u0" => u0 = Some(Profile::parse(&e.value).map_err(|err| Error::Config(format!("{}: {err}", e.origin)))?),
            key => match key.strip_prefix("monitor.") {
                Some(name) if !name.is_empty() => {
                    let c1 = input::expr_at(&e.value, Some(&e.origin))?;
                    let c1 = jetalg::algebra::substitute_dependent(
                        &c1,
                        &Substitution::Values(input::fixed_params(&eq)),
                    )?;
                    monitors.push((name.to_string(), c1));
                }
                _ => return Err(Error::Config(format!("{}: unknown key `{key}`", e.origin))),
            },
        }
    }
    let u0 = u0.ok_or_else(|| Error::Config(format!("{path}: [simulate] has no `u0`")))?;
    if monitors.is_empty() {
        monitors.push(("mass".to_string(), DiffPoly::u()));
    }
    let grid = Grid::new(n, length, dt, t_end)?;
    let mut traj = simulate_with(&eq, &grid, &u0.sample(&grid)?, &options)?;
    for (name, c1) in &monitors {
        traj.add_monitor(name, c1)?;
    }
    Ok(Reply::ok(if json {
        let columns: Vec<&str> = std::iter::once("time")
            .chain(traj.monitors().iter().map(|m| m.name.as_str()))
            .collect();
        let rows: Vec<Vec<f64>> = traj
            .times()
            .iter()
            .enumerate()
            .map(|(i, t)| std::iter::once(*t).chain(traj.monitors().iter().map(|m| m.values[i])).collect())
            .collect();
        document(&json!({"columns": columns, "rows": rows}))
    } else {
        traj.to_csv()
    }))
}
