// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation or invariant failure, 2 configuration
//! error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{
    find_branch_switches, stationary_values, sweep, Family, StationaryReport, SweepRow,
    TransitionReport, DEFAULT_TRANSITION_SAMPLES,
};
use crate::channel::{coherence_factor, reduced_state_with_factor};
use crate::error::Error;
use crate::format::{sig, sweep_csv};
use crate::lindblad::{integrate, trace_distance, OracleConfig};
use crate::measurement::{check_closed_form, SearchConfig};
use crate::scenario::{ConfigError, Scenario};
use crate::statespace::{ChannelParams, TwoQubitDensityMatrix};

/// Tolerance on `I = C + Q` for every emitted row.
pub const ROW_ADDITIVITY_TOL: f64 = 1e-9;
/// Optimizer-vs-closed-form discord tolerance used by `validate`.
pub const OPTIMIZER_GAP_TOL: f64 = 1e-6;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-6;
pub const OPTIMIZER_POINTS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "cavity-discord", version, about = "Discord dynamics of two atoms in lossy cavities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the correlation trajectory of a scenario as CSV.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Add the optimizer's discord as an extra column.
        #[arg(long)]
        numeric: bool,
    },
    /// Report sudden-transition times and stationary values as JSON.
    Transition {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRANSITION_SAMPLES)]
        samples: usize,
    },
    /// Check the closed forms against the master equation and the optimizer.
    Validate(ValidateArgs),
    /// Compare optimizer and closed-form classical correlation along tau.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        /// Grid as THETAxPHI, e.g. 181x360.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Emit the CSV tables behind one figure (e.g. 2a, 3, 8, all).
    Figure {
        #[arg(long)]
        id: String,
        #[arg(long)]
        outdir: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub fock_dim: Option<usize>,
    #[arg(long)]
    pub rk4_step: Option<f64>,
    /// Largest accepted trace distance between oracle and closed form.
    #[arg(long, default_value_t = DEFAULT_ORACLE_TOL)]
    pub tol: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

/// Library errors raised while computing are invariant failures; the
/// scenario was already checked.
fn failure(e: Error) -> CliError {
    CliError::Failure(e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Config(format!("{}: {}", parent.display(), e)))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e)))
}

/// Runs the parsed command and returns what it printed to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Evolve {
            config,
            out,
            numeric,
        } => {
            let scenario = Scenario::load(&config)?;
            run_evolve(&scenario, &out, numeric)?;
            Ok(String::new())
        }
        Command::Transition { config, samples } => {
            let scenario = Scenario::load(&config)?;
            run_transition(&scenario, samples)
        }
        Command::Validate(args) => {
            let mut scenario = Scenario::load(&args.config)?;
            if args.fock_dim.is_some() {
                scenario.fock_dim = args.fock_dim;
            }
            if args.rk4_step.is_some() {
                scenario.rk4_step = args.rk4_step;
            }
            scenario.check()?;
            if !(args.tol > 0.0) {
                return Err(CliError::Config(format!("tol must be positive, got {}", args.tol)));
            }
            let report = run_validate(&scenario, args.tol)?;
            if report.passed {
                Ok(report.text)
            } else {
                Err(CliError::Failure(report.text))
            }
        }
        Command::Optimize {
            config,
            grid,
            refine,
        } => {
            let mut scenario = Scenario::load(&config)?;
            if let Some(g) = grid {
                let (t, p) = parse_grid(&g)?;
                scenario.grid_theta = Some(t);
                scenario.grid_phi = Some(p);
            }
            if refine.is_some() {
                scenario.refine_iters = refine;
            }
            scenario.check()?;
            run_optimize(&scenario)
        }
        Command::Figure { id, outdir } => {
            let written = run_figure(&id, &outdir)?;
            Ok(written
                .iter()
                .map(|p| format!("{}\n", p.display()))
                .collect())
        }
    }
}

pub fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("grid must look like 181x360, got {:?}", text));
    let (t, p) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((t.trim().parse().map_err(|_| bad())?, p.trim().parse().map_err(|_| bad())?))
}

fn check_rows(rows: &[SweepRow]) -> Result<(), CliError> {
    for r in rows {
        let t = r.triple;
        let gap = (t.mutual_info - t.classical - t.discord).abs();
        if !(gap <= ROW_ADDITIVITY_TOL) {
            return Err(CliError::Failure(format!(
                "I != C + Q at tau = {} (gap {:e})",
                r.tau, gap
            )));
        }
    }
    Ok(())
}

pub fn evolve_rows(scenario: &Scenario, numeric: bool) -> Result<Vec<SweepRow>, CliError> {
    let family = scenario.family()?;
    let params = scenario.channel()?;
    let search = scenario.search_config();
    let rows = sweep(
        &family,
        &params,
        &scenario.taus(),
        if numeric { Some(&search) } else { None },
    )
    .map_err(failure)?;
    check_rows(&rows)?;
    Ok(rows)
}

pub fn run_evolve(scenario: &Scenario, out: &Path, numeric: bool) -> Result<(), CliError> {
    let rows = evolve_rows(scenario, numeric)?;
    write_file(out, &sweep_csv(&rows))
}

#[derive(Debug, Serialize)]
struct TransitionOutput {
    family: Family,
    alpha_re: f64,
    alpha_im: f64,
    kappa: f64,
    window: [f64; 2],
    transition: Option<TransitionReport>,
    note: Option<String>,
    stationary: Option<StationaryReport>,
}

pub fn run_transition(scenario: &Scenario, samples: usize) -> Result<String, CliError> {
    let family = scenario.family()?;
    let params = scenario.channel()?;
    let c = family.x_state().map_err(CliError::from_config)?;
    let window = (0.0, scenario.tau_max);
    let (transition, note) = match family {
        Family::Werner { .. } => (
            None,
            Some("werner family has no m-branch transition: the optimal Bloch length stays r".to_string()),
        ),
        _ => match find_branch_switches(&c, &params, window, samples).map_err(failure)? {
            Some(report) => (Some(report), None),
            None => (
                None,
                Some("|c3| dominates the coherences at all times; no branch switch is possible".to_string()),
            ),
        },
    };
    let stationary = match stationary_values(&family, &params) {
        Ok(s) => Some(s),
        Err(Error::NoDissipation) => None,
        Err(e) => return Err(failure(e)),
    };
    let out = TransitionOutput {
        family,
        alpha_re: params.alpha.re,
        alpha_im: params.alpha.im,
        kappa: params.kappa,
        window: [window.0, window.1],
        transition,
        note,
        stationary,
    };
    let mut text = serde_json::to_string_pretty(&out).map_err(|e| CliError::Failure(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

impl CliError {
    fn from_config(e: Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub passed: bool,
    pub max_trace_distance: f64,
    pub worst_tau: f64,
    pub max_discord_gap: f64,
    pub text: String,
}

pub fn run_validate(scenario: &Scenario, tol: f64) -> Result<ValidationReport, CliError> {
    let family = scenario.family()?;
    let params = scenario.channel()?;
    let c = family.x_state().map_err(CliError::from_config)?;
    validate_with(scenario, tol, |tau| {
        reduced_state_with_factor(&c, &coherence_factor(tau, &params))
    })
}

/// Validation against an arbitrary analytic state; `analytic(tau)` is what
/// the oracle and the optimizer are held against.
pub fn validate_with(
    scenario: &Scenario,
    tol: f64,
    analytic: impl Fn(f64) -> crate::error::Result<TwoQubitDensityMatrix> + Sync,
) -> Result<ValidationReport, CliError> {
    let family = scenario.family()?;
    let params: ChannelParams = scenario.channel()?;
    let c = family.x_state().map_err(CliError::from_config)?;
    let oracle_cfg: OracleConfig = scenario.oracle_config();
    let search: SearchConfig = scenario.search_config();

    let traj = integrate(&c, &params, scenario.tau_max, &oracle_cfg).map_err(|e| match e {
        Error::TruncationTooSmall { .. } | Error::OutOfRange { .. } => CliError::Config(e.to_string()),
        other => failure(other),
    })?;

    let mut text = String::new();
    let mut distances = Vec::with_capacity(traj.taus.len());
    for (tau, rho) in traj.taus.iter().zip(&traj.states) {
        let expect = analytic(*tau).map_err(failure)?;
        distances.push((*tau, trace_distance(rho, &expect)));
    }
    let (worst_tau, max_dist) = distances
        .iter()
        .copied()
        .fold((0.0, 0.0), |acc, d| if d.1 > acc.1 { d } else { acc });
    let oracle_ok = max_dist < tol;
    let _ = writeln!(
        text,
        "oracle: fock_dim={} step={} samples={} max_trace_drift={} max_trace_distance={} at tau={} tol={} {}",
        traj.fock_dim,
        sig(oracle_cfg.step),
        traj.taus.len(),
        sig(traj.max_trace_drift),
        sig(max_dist),
        sig(worst_tau),
        sig(tol),
        if oracle_ok { "PASS" } else { "FAIL" }
    );
    if !oracle_ok {
        let failing: Vec<&(f64, f64)> = distances.iter().filter(|d| d.1 >= tol).collect();
        let _ = writeln!(
            text,
            "oracle: {} of {} samples exceed tol; first at tau={} (distance {})",
            failing.len(),
            distances.len(),
            sig(failing[0].0),
            sig(failing[0].1)
        );
    }

    let points: Vec<f64> = (0..OPTIMIZER_POINTS)
        .map(|i| scenario.tau_max * i as f64 / (OPTIMIZER_POINTS - 1) as f64)
        .collect();
    let mut max_gap: f64 = 0.0;
    let mut gap_tau = 0.0;
    let mut gap_lines = String::new();
    for &tau in &points {
        let rho = analytic(tau).map_err(failure)?;
        let factor = coherence_factor(tau, &params);
        let check = check_closed_form(&c, &rho, &factor, &search).map_err(failure)?;
        if check.discord_gap > max_gap {
            max_gap = check.discord_gap;
            gap_tau = tau;
        }
        if !(check.discord_gap < OPTIMIZER_GAP_TOL) {
            let _ = writeln!(
                gap_lines,
                "optimizer: tau={} closed={} numeric={} gap={}",
                sig(tau),
                sig(check.closed.discord),
                sig(check.numeric.discord),
                sig(check.discord_gap)
            );
        }
    }
    let optimizer_ok = max_gap < OPTIMIZER_GAP_TOL;
    let _ = writeln!(
        text,
        "optimizer: points={} grid={}x{} refine={} max_discord_gap={} at tau={} tol={} {}",
        points.len(),
        search.grid_theta,
        search.grid_phi,
        search.refine_iters,
        sig(max_gap),
        sig(gap_tau),
        sig(OPTIMIZER_GAP_TOL),
        if optimizer_ok { "PASS" } else { "FAIL" }
    );
    text.push_str(&gap_lines);
    let passed = oracle_ok && optimizer_ok;
    let _ = writeln!(text, "result: {}", if passed { "PASS" } else { "FAIL" });
    Ok(ValidationReport {
        passed,
        max_trace_distance: max_dist,
        worst_tau,
        max_discord_gap: max_gap,
        text,
    })
}

pub fn run_optimize(scenario: &Scenario) -> Result<String, CliError> {
    let family = scenario.family()?;
    let params = scenario.channel()?;
    let c = family.x_state().map_err(CliError::from_config)?;
    let search = scenario.search_config();
    let mut out = String::from(
        "tau,F_abs2,classical_closed,classical_numeric,discord_closed,discord_numeric,theta,phi\n",
    );
    for tau in scenario.taus() {
        let factor = coherence_factor(tau, &params);
        let rho = reduced_state_with_factor(&c, &factor).map_err(failure)?;
        let check = check_closed_form(&c, &rho, &factor, &search).map_err(failure)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            sig(tau),
            sig(factor.abs2),
            sig(check.closed.classical),
            sig(check.numeric.classical),
            sig(check.closed.discord),
            sig(check.numeric.discord),
            sig(check.angles.theta),
            sig(check.angles.phi)
        );
    }
    Ok(out)
}

/// One curve of a figure panel.
#[derive(Debug, Clone, Serialize)]
pub struct CurveSpec {
    pub label: String,
    pub file: String,
    pub scenario: Scenario,
    /// First crossing of `|F|^2 = |c3|` in the window (frozen family).
    pub transition_taus: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PanelSpec {
    pub figure: u8,
    pub panel: String,
    pub curves: Vec<CurveSpec>,
}

fn curve(fig: u8, panel: &str, label: &str, family: Family, alpha: f64, kappa: f64, tau_max: f64) -> CurveSpec {
    let samples = (tau_max * 100.0).round() as usize + 1;
    CurveSpec {
        label: label.to_string(),
        file: format!("fig{}_{}_{}.csv", fig, panel, label),
        scenario: Scenario::from_family(family, alpha, kappa, tau_max, samples),
        transition_taus: Vec::new(),
    }
}

/// Panel presets for figures 2 and 4 to 8, taken from their captions.
pub fn figure_panels(fig: u8) -> Option<Vec<PanelSpec>> {
    let frozen = |c3| Family::Frozen { c3 };
    let werner = |r| Family::Werner { r };
    let single = |panel: &str, family, alpha, kappa, tau_max| PanelSpec {
        figure: fig,
        panel: panel.to_string(),
        curves: vec![curve(fig, panel, "correlations", family, alpha, kappa, tau_max)],
    };
    let panels = match fig {
        2 => vec![
            single("a", frozen(0.6), 1.2, 0.05, 5.0),
            single("b", frozen(0.6), 0.8, 0.05, 5.0),
        ],
        4 => vec![
            single("a", frozen(0.6), 0.8, 0.05, 10.0),
            single("b", frozen(0.6), 0.8, 0.05, 50.0),
        ],
        5 => vec![
            single("a", frozen(0.7), 0.8, 2.0, 10.0),
            single("b", frozen(0.6), 1.2, 3.0, 10.0),
        ],
        6 => ["a", "b"]
            .iter()
            .zip([10.0, 50.0])
            .map(|(p, t)| PanelSpec {
                figure: fig,
                panel: p.to_string(),
                curves: vec![
                    curve(fig, p, "r0.5", werner(0.5), 0.5, 0.05, t),
                    curve(fig, p, "r0.9", werner(0.9), 0.5, 0.05, t),
                ],
            })
            .collect(),
        7 => ["a", "b"]
            .iter()
            .zip([10.0, 50.0])
            .map(|(p, t)| PanelSpec {
                figure: fig,
                panel: p.to_string(),
                curves: vec![
                    curve(fig, p, "alpha0.8", werner(0.7), 0.8, 0.05, t),
                    curve(fig, p, "alpha0.5", werner(0.7), 0.5, 0.05, t),
                ],
            })
            .collect(),
        8 => [("a", 0.7, 0.8), ("b", 0.9, 0.5)]
            .iter()
            .map(|&(p, r, alpha)| PanelSpec {
                figure: fig,
                panel: p.to_string(),
                curves: vec![
                    curve(fig, p, "kappa0.1", werner(r), alpha, 0.1, 50.0),
                    curve(fig, p, "kappa1", werner(r), alpha, 1.0, 50.0),
                ],
            })
            .collect(),
        _ => return None,
    };
    Some(panels)
}

/// Surface table for figure 3: discord over `(c3, tau)` at `alpha = 1`,
/// `kappa = 0.05`.
pub fn figure3_surface() -> Result<String, CliError> {
    let params = ChannelParams::real(1.0, 0.05).map_err(failure)?;
    let taus = crate::analysis::tau_grid(5.0, 501);
    let mut out = String::from("c3,tau,F_abs2,mutual_info,classical,discord\n");
    for k in 0..=100 {
        let c3 = k as f64 / 100.0;
        let rows = sweep(&Family::Frozen { c3 }, &params, &taus, None).map_err(failure)?;
        check_rows(&rows)?;
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                sig(c3),
                sig(r.tau),
                sig(r.factor.abs2),
                sig(r.triple.mutual_info),
                sig(r.triple.classical),
                sig(r.triple.discord)
            );
        }
    }
    Ok(out)
}

/// Writes the tables for `id` (`2a`, `2`, `3`, `all`, ...) plus one JSON
/// manifest per figure. Returns the written paths.
pub fn run_figure(id: &str, outdir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let unknown = || CliError::Config(format!("unknown figure id {:?} (expected 2a..8b, 2..8 or all)", id));
    let id = id.trim().to_ascii_lowercase();
    let requests: Vec<(u8, Option<String>)> = if id == "all" {
        (2..=8).map(|f| (f, None)).collect()
    } else {
        let digits: String = id.chars().take_while(|c| c.is_ascii_digit()).collect();
        let fig: u8 = digits.parse().map_err(|_| unknown())?;
        let panel = &id[digits.len()..];
        if !(2..=8).contains(&fig) {
            return Err(unknown());
        }
        match panel {
            "" => vec![(fig, None)],
            "a" | "b" if fig != 3 => vec![(fig, Some(panel.to_string()))],
            "a" if fig == 3 => vec![(fig, None)],
            _ => return Err(unknown()),
        }
    };

    let mut written = Vec::new();
    for (fig, panel) in requests {
        if fig == 3 {
            let path = outdir.join("fig3_a_surface.csv");
            write_file(&path, &figure3_surface()?)?;
            written.push(path);
            continue;
        }
        let mut panels = figure_panels(fig).ok_or_else(unknown)?;
        if let Some(p) = &panel {
            panels.retain(|s| &s.panel == p);
        }
        for spec in panels.iter_mut() {
            for curve in spec.curves.iter_mut() {
                let rows = evolve_rows(&curve.scenario, false)?;
                if let Family::Frozen { c3 } = curve.scenario.family()? {
                    if c3.abs() > 0.0 && c3.abs() < 1.0 {
                        let report = crate::analysis::find_transitions(
                            c3,
                            &curve.scenario.channel()?,
                            (0.0, curve.scenario.tau_max),
                            DEFAULT_TRANSITION_SAMPLES,
                        )
                        .map_err(failure)?;
                        curve.transition_taus = report.crossings.iter().map(|c| c.tau).collect();
                    }
                }
                let path = outdir.join(&curve.file);
                write_file(&path, &sweep_csv(&rows))?;
                written.push(path);
            }
        }
        let manifest_name = match &panel {
            Some(p) => format!("fig{}_{}.json", fig, p),
            None => format!("fig{}.json", fig),
        };
        let path = outdir.join(manifest_name);
        let mut json = serde_json::to_string_pretty(&panels).map_err(|e| CliError::Failure(e.to_string()))?;
        json.push('\n');
        write_file(&path, &json)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_argument() {
        assert_eq!(parse_grid("181x360").unwrap(), (181, 360));
        assert_eq!(parse_grid("16X32").unwrap(), (16, 32));
        assert!(parse_grid("181").is_err());
        assert!(parse_grid("ax3").is_err());
    }

    #[test]
    fn figure_presets_follow_captions() {
        let fig2 = figure_panels(2).unwrap();
        let a = &fig2[0].curves[0].scenario;
        assert_eq!((a.alpha_re, a.kappa, a.c3), (1.2, 0.05, Some(0.6)));
        let fig8 = figure_panels(8).unwrap();
        let b = &fig8[1];
        assert_eq!(b.curves.len(), 2);
        assert_eq!(b.curves[0].scenario.kappa, 0.1);
        assert_eq!(b.curves[1].scenario.kappa, 1.0);
        assert_eq!(b.curves[0].scenario.r, Some(0.9));
        assert_eq!(b.curves[0].scenario.alpha_re, 0.5);
        assert!(figure_panels(9).is_none());
        assert!(figure_panels(3).is_none());
        for fig in [2, 4, 5, 6, 7, 8] {
            for panel in figure_panels(fig).unwrap() {
                for c in panel.curves {
                    c.scenario.check().unwrap();
                    assert_eq!(c.file, format!("fig{}_{}_{}.csv", fig, panel.panel, c.label));
                }
            }
        }
    }

    #[test]
    fn unknown_figure_ids() {
        let dir = tempfile::tempdir().unwrap();
        for id in ["1", "9a", "2c", "3b", "x", ""] {
            let err = run_figure(id, dir.path()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{}", id);
        }
    }
}
