use std::f64::consts::PI;

use fasteval::{Compiler, Evaler, Instruction, Parser, Slab};

use super::Grid;
use crate::error::{Error, Result};

/// Initial profile `u0(x)` given as a floating-point expression in `x`.
///
/// Besides the evaluator's built-ins (`sin`, `cos`, `abs`, ...), `pi` and
/// `exp(y)` are available.
pub struct Profile {
    text: String,
    slab: Slab,
    instruction: Instruction,
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_tuple("Profile").field(&self.text).finish()
    }
}

impl Profile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut slab = Slab::new();
        let instruction = Parser::new()
            .parse(text, &mut slab.ps)
            .map_err(|e| Error::Config(format!("initial profile `{text}`: {e}")))?
            .from(&slab.ps)
            .compile(&slab.ps, &mut slab.cs);
        let profile = Profile {
            text: text.to_string(),
            slab,
            instruction,
        };
        profile.eval(0.0)?;
        Ok(profile)
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let mut ns = |name: &str, args: Vec<f64>| match (name, args.as_slice()) {
            ("x", []) => Some(x),
            ("pi", []) => Some(PI),
            ("exp", [y]) => Some(y.exp()),
            _ => None,
        };
        self.instruction
            .eval(&self.slab, &mut ns)
            .map_err(|e| Error::Config(format!("initial profile `{}`: {e}", self.text)))
    }

    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        grid.points().into_iter().map(|x| self.eval(x)).collect()
    }
}
