//! Command dispatch. Each command writes its artifacts atomically and
//! returns the report it wrote.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use leviflat::filling::{check_immersion, normalize_torus, sweep, ImmersionReport, NormalizedTorus};
use leviflat::grid::make_grid;
use leviflat::{disc, Coefficients, Family, Graph, Grid, Workspace};
use serde_json::Value;

use crate::config::{resolve, RunConfig};
use crate::io::write_atomic;
use crate::report::{Check, DiscSummary, FamilySummary, Report};
use crate::{mesh, suite, CliError};

/// Largest accepted `||w| − 1|` on the boundary of a family member.
pub const BOUNDARY_MODULUS_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Solve { tau: f64, config: PathBuf },
    Sweep { config: PathBuf },
    Verify { config: PathBuf },
    Export { report: PathBuf, out: PathBuf },
}

/// Result of a command: the report and the files written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub written: Vec<PathBuf>,
}

impl Outcome {
    /// Exit status: 0 iff every check passed.
    pub fn exit_code(&self) -> i32 {
        if self.report.passed {
            0
        } else {
            1
        }
    }
}

pub fn run(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Solve { tau, config } => {
            let (cfg, dir) = load(config)?;
            let report = solve_report(&cfg, *tau)?;
            let path = resolve(&dir, &cfg.outputs.report);
            write_atomic(&path, report.to_json().as_bytes())?;
            Ok(Outcome { report, written: vec![path] })
        }
        Command::Sweep { config } => {
            let (cfg, dir) = load(config)?;
            let (report, family, setup) = sweep_report(&cfg)?;
            let mesh_path = resolve(&dir, &cfg.outputs.mesh);
            let report_path = resolve(&dir, &cfg.outputs.report);
            write_atomic(&mesh_path, mesh::render(&family, &setup.normalized.change).as_bytes())?;
            write_atomic(&report_path, report.to_json().as_bytes())?;
            Ok(Outcome { report, written: vec![mesh_path, report_path] })
        }
        Command::Verify { config } => {
            let (cfg, dir) = load(config)?;
            let report = verify_report(&cfg)?;
            let path = resolve(&dir, &cfg.outputs.report);
            write_atomic(&path, report.to_json().as_bytes())?;
            Ok(Outcome { report, written: vec![path] })
        }
        Command::Export { report, out } => {
            let text = std::fs::read_to_string(report).map_err(|e| CliError::io(report, e))?;
            let stored: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Schema(format!("{}: not a JSON report: {e}", report.display())))?;
            let (rep, family, setup) = export(&stored)?;
            write_atomic(out, mesh::render(&family, &setup.normalized.change).as_bytes())?;
            Ok(Outcome { report: rep, written: vec![out.clone()] })
        }
    }
}

fn load(path: &Path) -> Result<(RunConfig, PathBuf), CliError> {
    let cfg = RunConfig::load(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, dir))
}

/// Grid, operators and coefficients for one config.
#[derive(Debug)]
pub struct Setup {
    pub grid: Arc<Grid>,
    pub ws: Workspace,
    pub base: Coefficients,
    pub normalized: NormalizedTorus<f64>,
    pub gc: Graph,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        let grid = make_grid(cfg.grid.n_r, cfg.grid.n_theta)?;
        let ws = Workspace::new(&grid);
        let base = Coefficients::from_preset(cfg.preset.preset())?;
        let normalized = normalize_torus(cfg.torus.spec(), &base).map_err(|e| CliError::Certificate(e.to_string()))?;
        let gc = Graph::from_triple(normalized.coeffs.clone());
        Ok(Self { grid, ws, base, normalized, gc })
    }
}

pub fn solve_report(cfg: &RunConfig, tau: f64) -> Result<Report, CliError> {
    if !tau.is_finite() {
        return Err(CliError::Schema(format!("--tau: {tau} is not a finite number")));
    }
    let setup = Setup::new(cfg)?;
    let solver = cfg.solver.config();
    let d = disc::solve_disc(&setup.ws, &setup.gc, tau, &solver)?;
    let summary = DiscSummary::of(&d);
    let checks = vec![
        Check::below("disc.residual", d.residual, solver.tol_residual),
        Check::below("disc.boundary", d.boundary_defect, solver.tol_boundary),
        Check::below("disc.pin", d.pin_defect, solver.tol_boundary),
        Check::below("disc.boundary_modulus", summary.boundary_modulus_defect, BOUNDARY_MODULUS_TOL),
        Check::above("disc.min_modulus", summary.min_modulus, 0.0),
    ];
    let mut report = Report::new("solve", cfg, checks);
    report.disc = Some(summary);
    Ok(report)
}

/// Certificates of a solved family.
pub fn family_checks(family: &Family, immersion: &leviflat::Result<ImmersionReport>, tol_residual: f64) -> Vec<Check> {
    let m = &family.metrics;
    let mut checks = vec![
        Check::below("family.residual", m.max_residual, tol_residual),
        Check::below("family.boundary_modulus", m.boundary_defect, BOUNDARY_MODULUS_TOL),
        Check::above("family.min_modulus", m.min_modulus, 0.0),
        Check::above("family.disjointness", m.min_separation, 0.0),
        Check::equals("family.winding_min", m.winding_min as f64, 1.0),
        Check::equals("family.winding_max", m.winding_max as f64, 1.0),
        Check::at_most("family.max_principle", m.max_principle_ratio, suite::MAX_PRINCIPLE_CONSTANT),
    ];
    match immersion {
        Ok(imm) => {
            checks.push(Check::above("family.immersion_modulus", imm.min_modulus(), 0.0));
            let allowed = imm.dtau * imm.dtau + 1e-8;
            checks.push(Check::at_most("family.immersion_gap", imm.gap_h, allowed));
            let order = if imm.gap_h > 0.0 { imm.gap_2h / imm.gap_h } else { f64::INFINITY };
            let order_check = Check::at_most("family.immersion_order", 3.0, order);
            checks.push(if imm.gap_h < 1e-7 {
                Check { passed: true, ..order_check }.with_detail("gap below 1e-7")
            } else {
                order_check
            });
        }
        Err(e) => checks.push(Check::failed("family.immersion", e)),
    }
    checks
}

/// Solves the configured family; non-converged discs abort with the list of
/// failures.
pub fn solve_family(cfg: &RunConfig, setup: &Setup) -> Result<Family, CliError> {
    let sw = sweep(&setup.ws, &setup.gc, cfg.sweep.n_tau, 0.0, &cfg.solver.config())?;
    if sw.failures() > 0 {
        let lines: Vec<String> = sw
            .taus
            .iter()
            .zip(&sw.results)
            .filter_map(|(t, r)| r.as_ref().err().map(|e| format!("  tau = {t}: {e}")))
            .collect();
        return Err(CliError::NonConvergence(format!(
            "{} of {} discs failed\n{}",
            lines.len(),
            sw.results.len(),
            lines.join("\n")
        )));
    }
    Ok(sw.into_hypersurface()?)
}

pub fn sweep_report(cfg: &RunConfig) -> Result<(Report, Family, Setup), CliError> {
    let setup = Setup::new(cfg)?;
    let family = solve_family(cfg, &setup)?;
    let immersion = check_immersion(&setup.ws, &family, &setup.gc, &cfg.solver.config().linear());
    let checks = family_checks(&family, &immersion, cfg.solver.tol_residual);
    let mut report = Report::new("sweep", cfg, checks);
    report.family = Some(FamilySummary::of(&family, setup.normalized.torus_defect, immersion.as_ref().ok()));
    Ok((report, family, setup))
}

pub fn verify_report(cfg: &RunConfig) -> Result<Report, CliError> {
    let out = suite::run_suite(cfg)?;
    let mut report = Report::new("verify", cfg, out.checks);
    report.family = out.family;
    Ok(report)
}

/// Recomputes the family of a stored sweep report and checks that every
/// stored value is reproduced.
pub fn export(stored: &Value) -> Result<(Report, Family, Setup), CliError> {
    if stored.get("command").and_then(Value::as_str) != Some("sweep") {
        return Err(CliError::Schema("command: export needs a report written by `sweep`".into()));
    }
    let config = stored.get("config").cloned().ok_or_else(|| CliError::Schema("config: missing".into()))?;
    let cfg: RunConfig = serde_json::from_value(config).map_err(|e| CliError::Schema(format!("config: {e}")))?;
    cfg.validate()?;
    let (report, family, setup) = sweep_report(&cfg)?;
    let fresh = serde_json::to_value(&report).expect("report serialization cannot fail");
    if let Some(path) = first_difference(stored, &fresh, String::new()) {
        return Err(CliError::Certificate(format!("stored report differs from the recomputation at {path}")));
    }
    Ok((report, family, setup))
}

fn first_difference(a: &Value, b: &Value, path: String) -> Option<String> {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for k in x.keys().chain(y.keys()) {
                let sub = format!("{path}/{k}");
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => {
                        if let Some(p) = first_difference(u, v, sub) {
                            return Some(p);
                        }
                    }
                    _ => return Some(sub),
                }
            }
            None
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Some(format!("{path} (length)"));
            }
            x.iter().zip(y).enumerate().find_map(|(i, (u, v))| first_difference(u, v, format!("{path}/{i}")))
        }
        _ if a == b => None,
        _ => Some(if path.is_empty() { "/".into() } else { path }),
    }
}
