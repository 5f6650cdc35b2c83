//! Periodic pseudo-spectral solver for evolution equations of the form
//! `P(∂_x) u_t + R(x, t, u, u_x, ...) = 0` and monitoring of `∫ C¹ dx`.
//!
//! `P` is a constant-coefficient operator (for the generalized family
//! `1 - eps ∂_x²`), inverted per step in Fourier space. Time stepping is
//! classical RK4 with a fixed step.

mod profile;
mod spectral;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use rustfft::num_complex::Complex64;

use crate::algebra::{Atom, Dep, Dir, DiffPoly, Rational};
use crate::error::{Error, Result};
use crate::variational::EquationSpec;

pub use profile::Profile;
use spectral::Spectral;

/// Uniform periodic grid on `[0, length)` together with the time stepping.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    dt: f64,
    t_end: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64, dt: f64, t_end: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} must be a power of two >= 16")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length = {length} must be positive")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt = {dt} must be positive")));
        }
        if !(t_end.is_finite() && t_end >= dt) {
            return Err(Error::InvalidGrid(format!("t_end = {t_end} must be at least dt")));
        }
        Ok(Grid { n, length, dt, t_end })
    }

    /// `n` points on `[0, 2π)`.
    pub fn periodic(n: usize, dt: f64, t_end: f64) -> Result<Self> {
        Grid::new(n, 2.0 * std::f64::consts::PI, dt, t_end)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| j as f64 * self.spacing()).collect()
    }

    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Grid::new(self.n, self.length, dt, self.t_end)
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Grid::new(n, self.length, self.dt, self.t_end)
    }

    /// Step sizes: uniform `dt`, the last one shortened to land on `t_end`.
    fn steps(&self) -> Vec<f64> {
        let count = ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (0..count)
            .map(|k| {
                if k + 1 == count {
                    self.t_end - k as f64 * self.dt
                } else {
                    self.dt
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    /// Fails with `StabilityViolated` once `max |u|` exceeds this bound.
    pub max_amplitude: Option<f64>,
    /// Keep every k-th step as a snapshot (the initial and final states are always kept).
    pub save_every: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            max_amplitude: None,
            save_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Monitor {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    snapshots: Vec<Snapshot>,
    monitors: Vec<Monitor>,
}

impl Trajectory {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn monitors(&self) -> &[Monitor] {
        &self.monitors
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectory holds the initial state")
    }

    /// Evaluates `∫ c1 dx` on every snapshot and stores the series under `name`.
    pub fn add_monitor(&mut self, name: &str, c1: &DiffPoly) -> Result<&Monitor> {
        let values = monitor_functional(self, c1)?;
        self.monitors.push(Monitor {
            name: name.to_string(),
            values,
        });
        Ok(self.monitors.last().expect("just pushed"))
    }

    /// `time,<name>...` header, one row per snapshot.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for m in &self.monitors {
            out.push(',');
            out.push_str(&m.name);
        }
        out.push('\n');
        for (i, s) in self.snapshots.iter().enumerate() {
            write!(out, "{:?}", s.time).expect("writing to a String");
            for m in &self.monitors {
                write!(out, ",{:?}", m.values[i]).expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }
}

/// `max_t |I(t) - I(0)| / |I(0)|`, or the absolute drift when `I(0) = 0`.
pub fn relative_drift(series: &[f64]) -> f64 {
    let Some(&first) = series.first() else {
        return 0.0;
    };
    let drift = series
        .iter()
        .map(|v| (v - first).abs())
        .fold(0.0, f64::max);
    if first == 0.0 {
        drift
    } else {
        drift / first.abs()
    }
}

/// Relative drifts below this are indistinguishable from accumulated roundoff.
pub const ROUNDOFF_FLOOR: f64 = 1e-13;

/// Drift of one functional at step `dt` and at `dt / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halving {
    pub name: String,
    pub coarse: f64,
    pub fine: f64,
}

impl Halving {
    pub fn ratio(&self) -> f64 {
        self.coarse / self.fine
    }

    pub fn at_roundoff(&self) -> bool {
        self.coarse <= ROUNDOFF_FLOOR && self.fine <= ROUNDOFF_FLOOR
    }

    /// Ratio of at least `min_ratio`, or both drifts already at the roundoff floor.
    pub fn converges(&self, min_ratio: f64) -> bool {
        self.ratio() >= min_ratio || self.at_roundoff()
    }
}

/// Runs `eq` at `grid.dt()` and `grid.dt() / 2` and reports the relative drift of each functional.
pub fn halving_study(
    eq: &EquationSpec,
    grid: &Grid,
    u0: &[f64],
    functionals: &[(&str, DiffPoly)],
) -> Result<Vec<Halving>> {
    let drifts = |g: &Grid| -> Result<Vec<f64>> {
        let traj = simulate(eq, g, u0)?;
        functionals
            .iter()
            .map(|(_, c1)| Ok(relative_drift(&monitor_functional(&traj, c1)?)))
            .collect()
    };
    let coarse = drifts(grid)?;
    let fine = drifts(&grid.with_dt(grid.dt / 2.0)?)?;
    Ok(functionals
        .iter()
        .zip(coarse.into_iter().zip(fine))
        .map(|((name, _), (coarse, fine))| Halving {
            name: name.to_string(),
            coarse,
            fine,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Jet(u32),
    X,
    T,
}

/// A differential polynomial in `x`, `t` and the x-jets of `u`, ready for pointwise evaluation.
struct Compiled {
    terms: Vec<(f64, Vec<(Slot, i32)>)>,
    orders: BTreeSet<u32>,
}

fn to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

impl Compiled {
    fn new(p: &DiffPoly) -> Result<Self> {
        let mut orders = BTreeSet::new();
        let mut terms = Vec::new();
        for (mono, c) in p.iter() {
            let mut factors = Vec::new();
            for (atom, e) in mono.factors() {
                let slot = match atom {
                    Atom::Jet(Dep::U, idx) if idx.nt == 0 => {
                        orders.insert(idx.nx);
                        Slot::Jet(idx.nx)
                    }
                    Atom::Indep(Dir::X) => Slot::X,
                    Atom::Indep(Dir::T) => Slot::T,
                    Atom::Param(s) => {
                        return Err(Error::UnsupportedJet(format!(
                            "parameter {s} has no numeric value"
                        )))
                    }
                    other => {
                        return Err(Error::UnsupportedJet(crate::syntax::print(&DiffPoly::atom(
                            other.clone(),
                        ))))
                    }
                };
                factors.push((slot, *e));
            }
            terms.push((to_f64(c), factors));
        }
        Ok(Compiled { terms, orders })
    }

    fn eval(&self, spectral: &Spectral, u: &[f64], x: &[f64], t: f64) -> Vec<f64> {
        let hat = spectral.transform(u);
        let fields: Vec<(u32, Vec<f64>)> = self
            .orders
            .iter()
            .map(|&m| (m, if m == 0 { u.to_vec() } else { spectral.derivative(&hat, m) }))
            .collect();
        let field = |m: u32| &fields.iter().find(|(k, _)| *k == m).expect("order collected").1;
        let mut out = vec![0.0; u.len()];
        for (c, factors) in &self.terms {
            for (j, o) in out.iter_mut().enumerate() {
                let mut v = *c;
                for (slot, e) in factors {
                    let base = match slot {
                        Slot::Jet(m) => field(*m)[j],
                        Slot::X => x[j],
                        Slot::T => t,
                    };
                    v *= base.powi(*e);
                }
                *o += v;
            }
        }
        out
    }
}

/// `u_t = -P(∂_x)^{-1} R`, with `P` read off the terms linear in `u_t, u_tx, ...`.
struct Model {
    spectral: Spectral,
    inverse_symbol: Vec<Complex64>,
    rest: Compiled,
    x: Vec<f64>,
}

impl Model {
    fn new(eq: &EquationSpec, grid: &Grid) -> Result<Self> {
        let spectral = Spectral::new(grid.n, grid.length);
        let mut time_part: Vec<(u32, f64)> = Vec::new();
        let mut rest = DiffPoly::zero();
        for (mono, c) in eq.lhs().iter() {
            let has_t = mono
                .atoms()
                .any(|a| matches!(a, Atom::Jet(_, idx) if idx.nt > 0));
            if !has_t {
                rest.add_term(c.clone(), mono.clone());
                continue;
            }
            match mono.factors() {
                [(Atom::Jet(Dep::U, idx), 1)] if idx.nt == 1 => time_part.push((idx.nx, to_f64(c))),
                _ => {
                    return Err(Error::UnsupportedJet(format!(
                        "time derivatives must enter linearly with constant coefficients, found {}",
                        DiffPoly::term(c.clone(), mono.clone())
                    )))
                }
            }
        }
        if time_part.is_empty() {
            return Err(Error::InvalidEquation("no u_t term to evolve".into()));
        }
        let mut inverse_symbol = Vec::with_capacity(grid.n);
        for &k in spectral.wavenumbers() {
            let p: Complex64 = time_part
                .iter()
                .map(|&(m, c)| Complex64::new(0.0, k).powu(m) * c)
                .sum();
            if p.norm() < 1e-12 {
                return Err(Error::InvalidEquation(format!(
                    "the operator acting on u_t is singular at wavenumber {k}"
                )));
            }
            inverse_symbol.push(-1.0 / p);
        }
        Ok(Model {
            spectral,
            inverse_symbol,
            rest: Compiled::new(&rest)?,
            x: grid.points(),
        })
    }

    fn rhs(&self, u: &[f64], t: f64) -> Vec<f64> {
        let r = self.rest.eval(&self.spectral, u, &self.x, t);
        let mut hat = self.spectral.transform(&r);
        for (h, s) in hat.iter_mut().zip(&self.inverse_symbol) {
            *h *= s;
        }
        self.spectral.back(&hat)
    }

    fn rk4(&self, u: &[f64], t: f64, h: f64) -> Vec<f64> {
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + s * y).collect()
        };
        let k1 = self.rhs(u, t);
        let k2 = self.rhs(&axpy(u, h / 2.0, &k1), t + h / 2.0);
        let k3 = self.rhs(&axpy(u, h / 2.0, &k2), t + h / 2.0);
        let k4 = self.rhs(&axpy(u, h, &k3), t + h);
        (0..u.len())
            .map(|j| u[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
            .collect()
    }
}

/// Integrates `eq` from the samples `u0` (one per grid point) to `grid.t_end()`.
///
/// All parameters of `eq` must have numeric values.
pub fn simulate(eq: &EquationSpec, grid: &Grid, u0: &[f64]) -> Result<Trajectory> {
    simulate_with(eq, grid, u0, &SimulateOptions::default())
}

pub fn simulate_with(
    eq: &EquationSpec,
    grid: &Grid,
    u0: &[f64],
    options: &SimulateOptions,
) -> Result<Trajectory> {
    if u0.len() != grid.n {
        return Err(Error::InvalidGrid(format!(
            "initial data has {} samples, grid has {}",
            u0.len(),
            grid.n
        )));
    }
    if options.save_every == 0 {
        return Err(Error::Config("save_every must be positive".into()));
    }
    let model = Model::new(eq, grid)?;
    let check = |u: &[f64], time: f64| -> Result<()> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowupDetected { time });
        }
        if let Some(bound) = options.max_amplitude {
            if u.iter().any(|v| v.abs() > bound) {
                return Err(Error::StabilityViolated { time, bound });
            }
        }
        Ok(())
    };
    check(u0, 0.0)?;
    let steps = grid.steps();
    let mut snapshots = vec![Snapshot {
        time: 0.0,
        u: u0.to_vec(),
    }];
    let mut u = u0.to_vec();
    let mut t = 0.0;
    for (k, h) in steps.iter().enumerate() {
        u = model.rk4(&u, t, *h);
        t = if k + 1 == steps.len() {
            grid.t_end
        } else {
            (k + 1) as f64 * grid.dt
        };
        check(&u, t)?;
        if (k + 1) % options.save_every == 0 || k + 1 == steps.len() {
            snapshots.push(Snapshot { time: t, u: u.clone() });
        }
    }
    Ok(Trajectory {
        grid: grid.clone(),
        snapshots,
        monitors: Vec::new(),
    })
}

/// `∫ c1 dx` on every snapshot, by the periodic trapezoid rule with spectral derivatives.
///
/// `c1` may contain `x`, `t` and x-derivatives of `u`; time derivatives
/// must have been eliminated beforehand.
pub fn monitor_functional(traj: &Trajectory, c1: &DiffPoly) -> Result<Vec<f64>> {
    if let Some(a) = c1
        .atoms()
        .into_iter()
        .find(|a| matches!(a, Atom::Jet(_, idx) if idx.nt > 0))
    {
        return Err(Error::UnsupportedJet(format!(
            "{} (reduce time derivatives before monitoring)",
            crate::syntax::print(&DiffPoly::atom(a))
        )));
    }
    let compiled = Compiled::new(c1)?;
    let grid = &traj.grid;
    let spectral = Spectral::new(grid.n, grid.length);
    let x = grid.points();
    let h = grid.spacing();
    Ok(traj
        .snapshots
        .iter()
        .map(|s| compiled.eval(&spectral, &s.u, &x, s.time).iter().sum::<f64>() * h)
        .collect())
}
