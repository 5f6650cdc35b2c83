//! Command-line values, `@file` references and `key = value` config files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use jetalg::algebra::{Substitution, Symbol};
use jetalg::conslaw::Symmetry;
use jetalg::error::{Error, Result};
use jetalg::variational::EquationSpec;
use jetalg::{parse, DiffPoly, Rational};

/// One `key = value` entry with its origin for error messages.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub origin: String,
}

/// A config file: named sections of ordered entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    sections: BTreeMap<String, Vec<Entry>>,
}

impl Config {
    pub fn read(path: &str) -> Result<Self> {
        let text = read_file(path)?;
        Config::parse(&text, path)
    }

    /// `[section]` headers, `key = value` lines, `#` comments.
    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, Vec<Entry>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let origin = format!("{name}:{}", i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[') {
                let header = header
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("{origin}: unterminated section header")))?;
                let header = header.trim().to_string();
                sections.entry(header.clone()).or_default();
                current = Some(header);
                continue;
            }
            let Some(section) = &current else {
                return Err(Error::Config(format!("{origin}: entry outside of a section")));
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("{origin}: expected `key = value`")))?;
            sections.get_mut(section).expect("section inserted").push(Entry {
                key: key.trim().to_string(),
                value: value.trim().to_string(),
                origin,
            });
        }
        Ok(Config { sections })
    }

    pub fn has_sections(&self) -> bool {
        !self.sections.is_empty()
    }

    pub fn section(&self, name: &str) -> Option<&[Entry]> {
        self.sections.get(name).map(Vec::as_slice)
    }

    pub fn require(&self, name: &str) -> Result<&[Entry]> {
        self.section(name)
            .ok_or_else(|| Error::Config(format!("missing section [{name}]")))
    }
}

fn read_file(path: &str) -> Result<String> {
    fs::read_to_string(Path::new(path)).map_err(|e| Error::Config(format!("{path}: {e}")))
}

/// Where a command-line value came from: inline text or a file.
enum Source {
    Inline(String),
    File { path: String, config: Option<Config>, text: String },
}

fn source(arg: &str) -> Result<Source> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = read_file(path)?;
            let config = Config::parse(&text, path)?;
            Ok(Source::File {
                path: path.to_string(),
                config: config.has_sections().then_some(config),
                text,
            })
        }
        None => Ok(Source::Inline(arg.to_string())),
    }
}

/// Parses `text`, prefixing errors with `origin`.
pub fn expr_at(text: &str, origin: Option<&str>) -> Result<DiffPoly> {
    parse(text).map_err(|e| match (origin, e) {
        (Some(o), Error::Parse { pos, msg }) => Error::Parse {
            pos,
            msg: format!("{o}: {msg}"),
        },
        (Some(o), Error::UnknownIdentifier(id)) => Error::UnknownIdentifier(format!("{id}` at `{o}")),
        (_, e) => e,
    })
}

/// An expression given inline or as `@file` (a config file contributes `[section] key`).
pub fn expression(arg: &str, section: &str, key: &str) -> Result<DiffPoly> {
    match source(arg)? {
        Source::Inline(text) => expr_at(&text, None),
        Source::File { config: Some(c), path, .. } => {
            let entry = c
                .require(section)?
                .iter()
                .find(|e| e.key == key)
                .ok_or_else(|| Error::Config(format!("{path}: [{section}] has no `{key}`")))?;
            expr_at(&entry.value, Some(&entry.origin))
        }
        Source::File { text, path, .. } => expr_at(text.trim(), Some(&path)),
    }
}

pub fn rational(text: &str, origin: Option<&str>) -> Result<Rational> {
    expr_at(text, origin)?.as_constant().ok_or_else(|| {
        Error::Config(format!(
            "{}`{text}` is not a rational constant",
            origin.map(|o| format!("{o}: ")).unwrap_or_default()
        ))
    })
}

/// `name=value` pairs from `--param`.
pub fn param_values(pairs: &[String]) -> Result<BTreeMap<Symbol, Rational>> {
    pairs
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--param expects name=value, got `{p}`")))?;
            Ok((Symbol::new(k.trim()), rational(v.trim(), None)?))
        })
        .collect()
}

/// The equation from `--equation`; `[equation]` sections hold `lhs` and parameter values.
/// Values from `--param` take precedence.
pub fn equation(arg: &str, overrides: &BTreeMap<Symbol, Rational>) -> Result<EquationSpec> {
    let (lhs, mut values) = match source(arg)? {
        Source::Inline(text) => (expr_at(&text, None)?, BTreeMap::new()),
        Source::File { config: Some(c), path, .. } => {
            let mut lhs = None;
            let mut values = BTreeMap::new();
            for e in c.require("equation")? {
                match e.key.as_str() {
                    "lhs" => lhs = Some(expr_at(&e.value, Some(&e.origin))?),
                    name => {
                        values.insert(Symbol::new(name), rational(&e.value, Some(&e.origin))?);
                    }
                }
            }
            let lhs = lhs.ok_or_else(|| Error::Config(format!("{path}: [equation] has no `lhs`")))?;
            (lhs, values)
        }
        Source::File { text, path, .. } => (expr_at(text.trim(), Some(&path))?, BTreeMap::new()),
    };
    values.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
    EquationSpec::with_values(lhs, &values)
}

/// Values substituted into symmetry coefficients: the equation's fixed parameters.
pub fn fixed_params(eq: &EquationSpec) -> BTreeMap<Symbol, Rational> {
    eq.params()
        .iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k.clone(), v)))
        .collect()
}

/// `xi_t=<expr>;xi_x=<expr>;eta=<expr>` or an `@file` with a `[symmetry]` section.
/// Missing components are zero.
pub fn symmetry(arg: &str, eq: &EquationSpec) -> Result<Symmetry> {
    let entries: Vec<Entry> = match source(arg)? {
        Source::File { config: Some(c), .. } => c.require("symmetry")?.to_vec(),
        Source::Inline(text) => split_assignments(&text, "--symmetry")?,
        Source::File { text, path, .. } => split_assignments(text.trim(), &path)?,
    };
    let mut parts: BTreeMap<&str, DiffPoly> = BTreeMap::new();
    for e in &entries {
        let key = match e.key.as_str() {
            k @ ("xi_t" | "xi_x" | "eta") => k,
            other => return Err(Error::Config(format!("{}: unknown symmetry component `{other}`", e.origin))),
        };
        parts.insert(key, expr_at(&e.value, Some(&e.origin))?);
    }
    let mut take = |k: &str| parts.remove(k).unwrap_or_default();
    let sym = Symmetry::new(take("xi_t"), take("xi_x"), take("eta"))?;
    let fixed = fixed_params(eq);
    if fixed.is_empty() {
        Ok(sym)
    } else {
        sym.with_values(&Substitution::Values(fixed))
    }
}

fn split_assignments(text: &str, origin: &str) -> Result<Vec<Entry>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|part| {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("{origin}: expected `name=expr`, got `{part}`")))?;
            Ok(Entry {
                key: k.trim().to_string(),
                value: v.trim().to_string(),
                origin: origin.to_string(),
            })
        })
        .collect()
}

/// `v=<expr>` (or `v=phi`) inline or from a `[substitution]` section.
pub fn substitution(arg: &str) -> Result<Substitution> {
    let entries = match source(arg)? {
        Source::File { config: Some(c), .. } => c.require("substitution")?.to_vec(),
        Source::Inline(text) => split_assignments(&text, "--substitution")?,
        Source::File { text, path, .. } => split_assignments(text.trim(), &path)?,
    };
    match entries.as_slice() {
        [e] if e.key == "v" => {
            if e.value == "phi" {
                Ok(Substitution::VToPhi)
            } else {
                Ok(Substitution::VTo(expr_at(&e.value, Some(&e.origin))?))
            }
        }
        _ => Err(Error::Config("the substitution must be a single `v=<expr>`".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_sections_and_comments() {
        let c = Config::parse("# header\n[equation]\nlhs = u_t + u*u_x  # Burgers\nkappa = 1/2\n\n[simulate]\nn=32\n", "f").unwrap();
        let eq = c.section("equation").unwrap();
        assert_eq!(eq[0].value, "u_t + u*u_x");
        assert_eq!(eq[1].origin, "f:4");
        assert_eq!(c.section("simulate").unwrap()[0].key, "n");
        assert!(Config::parse("lhs = u", "f").is_err());
        assert!(Config::parse("[equation\nlhs = u", "f").is_err());
    }

    #[test]
    fn inline_symmetry_and_substitution() {
        let eq = EquationSpec::new(parse("u_t - u*u_xxx").unwrap()).unwrap();
        let s = symmetry("xi_t=-t; eta=u", &eq).unwrap();
        assert_eq!(s.to_string(), "xi_t=-t;xi_x=0;eta=u");
        assert!(symmetry("zeta=1", &eq).is_err());
        assert_eq!(substitution("v=phi").unwrap(), Substitution::VToPhi);
        assert!(substitution("w=u").is_err());
    }

    #[test]
    fn params_override() {
        let values = param_values(&["beta=3".into()]).unwrap();
        let eq = equation("u_t - beta*u_x*u_xx", &values).unwrap();
        assert_eq!(eq.lhs(), &parse("u_t - 3*u_x*u_xx").unwrap());
        assert!(param_values(&["beta".into()]).is_err());
        assert!(param_values(&["beta=u".into()]).is_err());
    }
}
