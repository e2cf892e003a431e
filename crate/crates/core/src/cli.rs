//! Command-line front end: plain-text configuration, batch evaluation to
//! CSV, the verification suites, reference-figure data emission, and
//! comparison against the finite-difference oracle.
//!
//! Configuration is a `key = value` file (`#` starts a comment). Every key
//! can also be set through the environment: uppercase the key, replace dots
//! with underscores, and prefix `BOUSSINESQ_` (so `contour.rho` becomes
//! `BOUSSINESQ_CONTOUR_RHO`). Environment values override the file; the
//! `--out`, `--tol` and `--threads` flags override both.

use crate::oracle::{fd_solve_sampled, FdConfig, OracleError};
use crate::solver::{eval_grid, Numerics, SolutionGrid, SolverError};
use crate::transforms::{DataProfile, ProblemSpec};
use crate::verify::{
    boundary_initial_suite, residue_suite, trace_compatibility, CheckItem, VerifyError,
};
use clap::{Args, Parser, Subcommand};
use std::error::Error;
use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error as ThisError;

pub const ENV_PREFIX: &str = "BOUSSINESQ_";

/// Absolute tolerance demanded of every residue identity in `verify` mode.
const RESIDUE_TOL: f64 = 1e-10;
/// Largest allowed `|g1 + h0'|` over the trace window in `verify` mode.
const TRACE_TOL: f64 = 1e-3;
/// Largest allowed pointwise difference against the oracle in
/// `oracle-compare` mode.
const ORACLE_TOL: f64 = 5e-3;

/// Every recognized configuration key, in documentation order. Also the
/// list scanned for environment overrides.
pub const CONFIG_KEYS: &[&str] = &[
    "r0",
    "r0.freq",
    "r0.value",
    "q0",
    "q0.freq",
    "q0.value",
    "g0",
    "g0.freq",
    "g0.value",
    "x_min",
    "x_max",
    "x_count",
    "t_min",
    "t_max",
    "t_count",
    "contour.rho",
    "contour.n",
    "contour.nmax",
    "contour.tol",
    "realline.k",
    "realline.tol",
    "realline.budget",
    "tau.panel",
    "fd.length",
    "fd.dx",
    "fd.dt",
    "out",
    "threads",
];

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

impl CliError {
    /// `2` for anything the user can fix in the invocation, `3` for a
    /// numerical failure inside a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Verify,
    Fig3,
    OracleCompare,
}

/// A named data profile plus its optional scalar parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileChoice {
    pub label: String,
    pub freq: Option<f64>,
    pub value: Option<f64>,
}

impl ProfileChoice {
    fn named(label: &str) -> Self {
        ProfileChoice {
            label: label.into(),
            freq: None,
            value: None,
        }
    }

    pub fn build(&self, role: &str) -> Result<DataProfile, CliError> {
        let reject_param = |param: &str, set: bool| -> Result<(), CliError> {
            if set {
                return Err(CliError::Config(format!(
                    "{role}.{param} is not meaningful for the '{}' profile",
                    self.label
                )));
            }
            Ok(())
        };
        match self.label.as_str() {
            "sin" => {
                reject_param("value", self.value.is_some())?;
                let freq = self.freq.ok_or_else(|| {
                    CliError::Config(format!("{role} = sin requires {role}.freq"))
                })?;
                Ok(DataProfile::sine(freq))
            }
            "const" => {
                reject_param("freq", self.freq.is_some())?;
                let value = self.value.ok_or_else(|| {
                    CliError::Config(format!("{role} = const requires {role}.value"))
                })?;
                Ok(DataProfile::constant(value))
            }
            other => {
                reject_param("freq", self.freq.is_some())?;
                reject_param("value", self.value.is_some())?;
                match other {
                    "zero" => Ok(DataProfile::zero()),
                    "exp" => Ok(DataProfile::exp_decay()),
                    "xexp" => Ok(DataProfile::x_exp()),
                    "x2exp" => Ok(DataProfile::x2_exp()),
                    "gauss" => Ok(DataProfile::gaussian()),
                    "x2gauss" => Ok(DataProfile::x2_gaussian()),
                    _ => Err(CliError::Config(format!(
                        "unknown profile '{other}' for {role}; available: zero exp xexp x2exp gauss x2gauss sin const"
                    ))),
                }
            }
        }
    }
}

/// The full, validated state of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub r0: ProfileChoice,
    pub q0: ProfileChoice,
    pub g0: ProfileChoice,
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    pub numerics: Numerics,
    pub fd: FdConfig,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|j| a + (b - a) * j as f64 / (n - 1) as f64)
        .collect()
}

impl RunConfig {
    /// The reference-figure configuration on the oracle-comparison window,
    /// with a mode-appropriate output path.
    pub fn defaults(mode: Mode) -> Self {
        let mut g0 = ProfileChoice::named("sin");
        g0.freq = Some(5.0);
        RunConfig {
            mode,
            r0: ProfileChoice::named("zero"),
            q0: ProfileChoice::named("x2exp"),
            g0,
            x_min: 0.0,
            x_max: 3.0,
            x_count: 31,
            t_min: 0.0,
            t_max: 1.0,
            t_count: 21,
            numerics: Numerics::default(),
            fd: FdConfig::default(),
            out: PathBuf::from(match mode {
                Mode::Solve => "solution.csv",
                Mode::Verify => "verify_report.csv",
                Mode::Fig3 => ".",
                Mode::OracleCompare => "oracle_compare.csv",
            }),
            threads: None,
        }
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let as_f64 = |v: &str| -> Result<f64, CliError> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| {
                    CliError::Config(format!("key '{key}': '{v}' is not a finite number"))
                })
        };
        let as_usize = |v: &str| -> Result<usize, CliError> {
            v.parse::<usize>().map_err(|_| {
                CliError::Config(format!("key '{key}': '{v}' is not a nonnegative integer"))
            })
        };
        match key {
            // Picking a new profile label discards parameters left over from
            // the previous choice, so defaults never leak into the new one.
            "r0" => self.r0 = ProfileChoice::named(value),
            "r0.freq" => self.r0.freq = Some(as_f64(value)?),
            "r0.value" => self.r0.value = Some(as_f64(value)?),
            "q0" => self.q0 = ProfileChoice::named(value),
            "q0.freq" => self.q0.freq = Some(as_f64(value)?),
            "q0.value" => self.q0.value = Some(as_f64(value)?),
            "g0" => self.g0 = ProfileChoice::named(value),
            "g0.freq" => self.g0.freq = Some(as_f64(value)?),
            "g0.value" => self.g0.value = Some(as_f64(value)?),
            "x_min" => self.x_min = as_f64(value)?,
            "x_max" => self.x_max = as_f64(value)?,
            "x_count" => self.x_count = as_usize(value)?,
            "t_min" => self.t_min = as_f64(value)?,
            "t_max" => self.t_max = as_f64(value)?,
            "t_count" => self.t_count = as_usize(value)?,
            "contour.rho" => self.numerics.circle.radius = as_f64(value)?,
            "contour.n" => self.numerics.circle.start_nodes = as_usize(value)?,
            "contour.nmax" => self.numerics.circle.max_nodes = as_usize(value)?,
            "contour.tol" => self.numerics.circle.tol = as_f64(value)?,
            "realline.k" => self.numerics.realline.half_width = as_f64(value)?,
            "realline.tol" => self.numerics.realline.tol = as_f64(value)?,
            "realline.budget" => self.numerics.realline.max_evals = as_usize(value)?,
            "tau.panel" => self.numerics.time_panel = as_f64(value)?,
            "fd.length" => self.fd.domain_length = as_f64(value)?,
            "fd.dx" => self.fd.dx = as_f64(value)?,
            "fd.dt" => self.fd.dt = as_f64(value)?,
            "out" => self.out = PathBuf::from(value),
            "threads" => {
                let n = as_usize(value)?;
                if n == 0 {
                    return Err(CliError::Config("threads must be at least 1".into()));
                }
                self.threads = Some(n);
            }
            _ => {
                return Err(CliError::Config(format!(
                    "unknown key '{key}'; known keys: {}",
                    CONFIG_KEYS.join(" ")
                )))
            }
        }
        Ok(())
    }

    /// Parses a whole configuration file body, reporting the offending line
    /// on failure.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), CliError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", idx + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| match e {
                    CliError::Config(msg) => {
                        CliError::Config(format!("line {}: {msg}", idx + 1))
                    }
                    other => other,
                })?;
        }
        Ok(())
    }

    /// Applies overrides from a key-to-value lookup, `BOUSSINESQ_`-prefixed
    /// uppercase names with dots mapped to underscores.
    pub fn apply_overrides<F>(&mut self, lookup: F) -> Result<(), CliError>
    where
        F: Fn(&str) -> Option<String>,
    {
        for key in CONFIG_KEYS {
            let name = format!("{ENV_PREFIX}{}", key.to_uppercase().replace('.', "_"));
            if let Some(value) = lookup(&name) {
                self.set(key, value.trim()).map_err(|e| match e {
                    CliError::Config(msg) => CliError::Config(format!("{name}: {msg}")),
                    other => other,
                })?;
            }
        }
        Ok(())
    }

    pub fn apply_env(&mut self) -> Result<(), CliError> {
        self.apply_overrides(|name| std::env::var(name).ok())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let axis = |name: &str, lo: f64, hi: f64, n: usize| -> Result<(), CliError> {
            if n == 0 {
                return Err(CliError::Config(format!("{name}_count must be at least 1")));
            }
            if !(lo >= 0.0 && lo.is_finite() && hi.is_finite()) {
                return Err(CliError::Config(format!(
                    "{name} range [{lo}, {hi}] must be finite and nonnegative"
                )));
            }
            if n > 1 && lo >= hi {
                return Err(CliError::Config(format!(
                    "{name} range [{lo}, {hi}] must be ascending for {name}_count > 1"
                )));
            }
            Ok(())
        };
        axis("x", self.x_min, self.x_max, self.x_count)?;
        axis("t", self.t_min, self.t_max, self.t_count)?;
        self.numerics
            .circle
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.numerics
            .realline
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !(self.numerics.time_panel > 0.0 && self.numerics.time_panel.is_finite()) {
            return Err(CliError::Config(format!(
                "tau.panel = {} must be positive",
                self.numerics.time_panel
            )));
        }
        self.fd
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn problem(&self) -> Result<ProblemSpec, CliError> {
        ProblemSpec::new(
            self.r0.build("r0")?,
            self.q0.build("q0")?,
            self.g0.build("g0")?,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.x_count)
    }

    pub fn ts(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.t_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Success,
    ChecksFailed,
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn finish_file(mut w: BufWriter<fs::File>, path: &Path) -> Result<(), CliError> {
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes a solution grid as `x,t,r,q` rows, 17 significant digits, fixed
/// row order: identical grids give byte-identical files.
pub fn write_solution_csv<W: Write>(grid: &SolutionGrid, w: &mut W) -> io::Result<()> {
    writeln!(w, "x,t,r,q")?;
    for (ix, &x) in grid.xs().iter().enumerate() {
        for (it, &t) in grid.ts().iter().enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                x,
                t,
                grid.r_at(ix, it),
                grid.q_at(ix, it)
            )?;
        }
    }
    Ok(())
}

/// Reads back any CSV written by this module: `#` comment lines and the
/// column-header line are skipped, every other line must be numeric.
pub fn read_numeric_csv<R: BufRead>(r: R) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(|source| CliError::Io {
            path: PathBuf::from("<stream>"),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parsed: Result<Vec<f64>, _> =
            trimmed.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if idx == 0 || rows.is_empty() => continue,
            Err(_) => {
                return Err(CliError::Config(format!(
                    "line {}: expected numeric fields, found '{trimmed}'",
                    idx + 1
                )))
            }
        }
    }
    Ok(rows)
}

fn run_solve(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let prob = cfg.problem()?;
    let grid = eval_grid(&prob, &cfg.xs(), &cfg.ts(), &cfg.numerics)?;
    let mut w = create_file(&cfg.out)?;
    write_solution_csv(&grid, &mut w).map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    finish_file(w, &cfg.out)?;
    println!(
        "wrote {} ({} x-nodes, {} t-nodes, max imaginary residue {:.2e})",
        cfg.out.display(),
        grid.xs().len(),
        grid.ts().len(),
        grid.max_im_residual()
    );
    Ok(RunOutcome::Success)
}

fn run_verify(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let prob = cfg.problem()?;
    let mut report = residue_suite(RESIDUE_TOL)?;
    report.extend(boundary_initial_suite(&prob, &cfg.numerics)?);
    let tgrid: Vec<f64> = (0..9).map(|j| 0.1 + 0.1 * j as f64).collect();
    let worst = trace_compatibility(&prob, &cfg.numerics, &tgrid)?;
    report.items.push(CheckItem::scalar(
        "trace_compatibility_max_error",
        worst,
        0.0,
        TRACE_TOL,
    ));

    let mut w = create_file(&cfg.out)?;
    report.write_csv(&mut w).map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    finish_file(w, &cfg.out)?;
    println!("{}", report.summary());
    println!("report written to {}", cfg.out.display());
    Ok(if report.all_pass() {
        RunOutcome::Success
    } else {
        RunOutcome::ChecksFailed
    })
}

/// The data choice behind the emitted figure files, stated in each header.
const FIG3_DATA_NOTE: &str = "# data: q0(x) = x^2 exp(-x), g0(t) = sin(5 t), r0(x) = 0\n\
# r0 is not prescribed by the reference panels; zero is the compatible choice (r0(0) = g0(0) = 0)";

fn run_fig3(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let prob = cfg.problem()?;
    fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;

    let surface_path = cfg.out.join("fig3_surface.csv");
    let surface = eval_grid(
        &prob,
        &linspace(0.0, 3.0, 31),
        &linspace(0.0, 1.0, 21),
        &cfg.numerics,
    )?;
    let mut w = create_file(&surface_path)?;
    (|| -> io::Result<()> {
        writeln!(w, "# q(x,t) on (0,3) x (0,1), 31 x 21 nodes")?;
        writeln!(w, "{FIG3_DATA_NOTE}")?;
        writeln!(w, "x,t,q")?;
        for (ix, &x) in surface.xs().iter().enumerate() {
            for (it, &t) in surface.ts().iter().enumerate() {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", x, t, surface.q_at(ix, it))?;
            }
        }
        Ok(())
    })()
    .map_err(|source| CliError::Io {
        path: surface_path.clone(),
        source,
    })?;
    finish_file(w, &surface_path)?;

    let initial_path = cfg.out.join("fig3_initial_slice.csv");
    let xs = linspace(0.0, 5.0, 50);
    let initial = eval_grid(&prob, &xs, &[0.0], &cfg.numerics)?;
    let mut w = create_file(&initial_path)?;
    (|| -> io::Result<()> {
        writeln!(w, "# q(x,0) against the initial datum q0 on (0,5)")?;
        writeln!(w, "{FIG3_DATA_NOTE}")?;
        writeln!(w, "x,q,q0")?;
        for (ix, &x) in xs.iter().enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e}",
                x,
                initial.q_at(ix, 0),
                prob.q0().eval(x)
            )?;
        }
        Ok(())
    })()
    .map_err(|source| CliError::Io {
        path: initial_path.clone(),
        source,
    })?;
    finish_file(w, &initial_path)?;

    let boundary_path = cfg.out.join("fig3_boundary_slice.csv");
    let ts = linspace(0.0, 2.0, 50);
    let boundary = eval_grid(&prob, &[0.0], &ts, &cfg.numerics)?;
    let mut w = create_file(&boundary_path)?;
    (|| -> io::Result<()> {
        writeln!(w, "# q(0,t) against the boundary datum g0 on (0,2)")?;
        writeln!(w, "{FIG3_DATA_NOTE}")?;
        writeln!(w, "t,q,g0")?;
        for (it, &t) in ts.iter().enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e}",
                t,
                boundary.q_at(0, it),
                prob.g0().eval(t)
            )?;
        }
        Ok(())
    })()
    .map_err(|source| CliError::Io {
        path: boundary_path.clone(),
        source,
    })?;
    finish_file(w, &boundary_path)?;

    let script_path = cfg.out.join("plot_fig3.py");
    fs::write(&script_path, PLOT_STUB).map_err(|source| CliError::Io {
        path: script_path.clone(),
        source,
    })?;

    println!(
        "wrote {}, {}, {} and {}",
        surface_path.display(),
        initial_path.display(),
        boundary_path.display(),
        script_path.display()
    );
    Ok(RunOutcome::Success)
}

fn run_oracle_compare(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let prob = cfg.problem()?;
    let (xs, ts) = (cfg.xs(), cfg.ts());
    let utm = eval_grid(&prob, &xs, &ts, &cfg.numerics)?;
    let fd = fd_solve_sampled(&prob, &cfg.fd, &xs, &ts)?;

    let mut w = create_file(&cfg.out)?;
    (|| -> io::Result<()> {
        writeln!(w, "x,t,r_utm,q_utm,r_fd,q_fd")?;
        for (ix, &x) in xs.iter().enumerate() {
            for (it, &t) in ts.iter().enumerate() {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    x,
                    t,
                    utm.r_at(ix, it),
                    utm.q_at(ix, it),
                    fd.r_at(ix, it),
                    fd.q_at(ix, it)
                )?;
            }
        }
        Ok(())
    })()
    .map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    finish_file(w, &cfg.out)?;

    let stats = |a: &dyn Fn(usize, usize) -> f64, b: &dyn Fn(usize, usize) -> f64| {
        let mut max = 0.0_f64;
        let mut sum = 0.0_f64;
        for ix in 0..xs.len() {
            for it in 0..ts.len() {
                let d = (a(ix, it) - b(ix, it)).abs();
                max = max.max(d);
                sum += d;
            }
        }
        (max, sum / (xs.len() * ts.len()) as f64)
    };
    let (r_max, r_mean) = stats(&|ix, it| utm.r_at(ix, it), &|ix, it| fd.r_at(ix, it));
    let (q_max, q_mean) = stats(&|ix, it| utm.q_at(ix, it), &|ix, it| fd.q_at(ix, it));
    println!("r: max |spectral - fd| = {r_max:.3e}, mean = {r_mean:.3e}");
    println!("q: max |spectral - fd| = {q_max:.3e}, mean = {q_mean:.3e}");
    println!("comparison written to {}", cfg.out.display());
    Ok(if r_max < ORACLE_TOL && q_max < ORACLE_TOL {
        RunOutcome::Success
    } else {
        RunOutcome::ChecksFailed
    })
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Solve => run_solve(cfg),
        Mode::Verify => run_verify(cfg),
        Mode::Fig3 => run_fig3(cfg),
        Mode::OracleCompare => run_oracle_compare(cfg),
    }
}

const PLOT_STUB: &str = r##"#!/usr/bin/env python3
"""Render the emitted figure data (requires matplotlib and numpy)."""
import csv
import sys

import numpy as np
import matplotlib.pyplot as plt


def load(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                rows.append([float(v) for v in line.split(",")])
            except ValueError:
                continue  # column header
    return np.array(rows)


def main(outdir="."):
    surface = load(f"{outdir}/fig3_surface.csv")
    initial = load(f"{outdir}/fig3_initial_slice.csv")
    boundary = load(f"{outdir}/fig3_boundary_slice.csv")

    fig = plt.figure(figsize=(12, 4))
    ax = fig.add_subplot(1, 3, 1, projection="3d")
    nx = len(np.unique(surface[:, 0]))
    nt = len(np.unique(surface[:, 1]))
    X = surface[:, 0].reshape(nx, nt)
    T = surface[:, 1].reshape(nx, nt)
    Q = surface[:, 2].reshape(nx, nt)
    ax.plot_surface(X, T, Q, cmap="viridis")
    ax.set_xlabel("x"); ax.set_ylabel("t"); ax.set_title("q(x,t)")

    ax = fig.add_subplot(1, 3, 2)
    ax.plot(initial[:, 0], initial[:, 1], label="q(x,0)")
    ax.plot(initial[:, 0], initial[:, 2], "--", label="q0(x)")
    ax.set_xlabel("x"); ax.legend()

    ax = fig.add_subplot(1, 3, 3)
    ax.plot(boundary[:, 0], boundary[:, 1], label="q(0,t)")
    ax.plot(boundary[:, 0], boundary[:, 2], "--", label="g0(t)")
    ax.set_xlabel("t"); ax.legend()

    fig.tight_layout()
    fig.savefig(f"{outdir}/fig3.png", dpi=150)
    print(f"wrote {outdir}/fig3.png")


if __name__ == "__main__":
    main(*sys.argv[1:])
"##;

#[derive(Debug, Parser)]
#[command(
    name = "boussinesq-halfline",
    version,
    about = "Evaluates the linearized Boussinesq system on the half-line by contour integration and cross-checks the result",
    after_help = "Config keys can also be set via environment variables: uppercase the key, \
replace '.' with '_', and prefix BOUSSINESQ_ (contour.rho -> BOUSSINESQ_CONTOUR_RHO). \
Precedence: defaults < config file < environment < flags.\n\
Exit codes: 0 success, 1 check failure, 2 config error, 3 numerical failure."
)]
pub struct CliArgs {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Evaluate both fields on the configured grid and write a CSV table
    Solve(CommonOpts),
    /// Run the residue, data-recovery and trace suites and write the report
    Verify(CommonOpts),
    /// Emit the reference-figure surface and slice data files
    Fig3(CommonOpts),
    /// Evaluate and compare against the finite-difference solver
    OracleCompare(CommonOpts),
}

#[derive(Debug, Args)]
pub struct CommonOpts {
    /// Plain-text `key = value` configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (directory for fig3)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override both quadrature tolerances (real line and circle)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Full invocation flow; returns the process exit code.
pub fn main_entry() -> i32 {
    let args = CliArgs::parse();
    let (mode, opts) = match args.command {
        CliCommand::Solve(o) => (Mode::Solve, o),
        CliCommand::Verify(o) => (Mode::Verify, o),
        CliCommand::Fig3(o) => (Mode::Fig3, o),
        CliCommand::OracleCompare(o) => (Mode::OracleCompare, o),
    };
    let mut cfg = RunConfig::defaults(mode);
    let prepared = (|| -> Result<(), CliError> {
        if let Some(path) = &opts.config {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            cfg.apply_config_text(&text)?;
        }
        cfg.apply_env()?;
        if let Some(out) = &opts.out {
            cfg.out = out.clone();
        }
        if let Some(tol) = opts.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Config(format!("--tol {tol} must be positive")));
            }
            cfg.numerics.realline.tol = tol;
            cfg.numerics.circle.tol = tol;
        }
        if let Some(threads) = opts.threads {
            if threads == 0 {
                return Err(CliError::Config("--threads must be at least 1".into()));
            }
            cfg.threads = Some(threads);
        }
        Ok(())
    })();
    if let Err(e) = prepared {
        report_error(&e);
        return e.exit_code();
    }
    if let Some(n) = cfg.threads {
        // Ignore failure: the pool can only be configured once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cfg) {
        Ok(RunOutcome::Success) => 0,
        Ok(RunOutcome::ChecksFailed) => 1,
        Err(e) => {
            report_error(&e);
            e.exit_code()
        }
    }
}

fn report_error(e: &CliError) {
    eprintln!("error: {e}");
    let mut cause = e.source();
    while let Some(c) = cause {
        eprintln!("  caused by: {c}");
        cause = c.source();
    }
}
