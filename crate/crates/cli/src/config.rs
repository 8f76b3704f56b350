//! Run configuration: one TOML file per run.
//!
//! Every section except `[preset]` has defaults; output paths are resolved
//! against the directory that holds the config file.

use std::path::{Path, PathBuf};

use leviflat::coeffs::{ANISOTROPIC_ALPHA_CAP, ANISOTROPIC_GAMMA_CAP, DEFAULT_W_MAX, SHEAR_BETA_CAP};
use leviflat::disc::SolverConfig;
use leviflat::filling::RIPPLE_CAP;
use leviflat::grid::{MIN_ANGULAR, MIN_RADIAL};
use leviflat::{Preset, Torus};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Smallest family accepted: the immersion certificate needs central
/// differences over two steps on each side.
pub const MIN_N_TAU: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub grid: GridSection,
    pub preset: PresetSection,
    #[serde(default)]
    pub torus: TorusSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub outputs: OutputSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n_r: 64, n_theta: 128 }
    }
}

fn default_w_max() -> f64 {
    DEFAULT_W_MAX
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetSection {
    Integrable,
    Shear {
        beta: f64,
        #[serde(default = "default_w_max")]
        w_max: f64,
    },
    Anisotropic {
        alpha: f64,
        gamma: f64,
        #[serde(default = "default_w_max")]
        w_max: f64,
    },
}

impl PresetSection {
    pub fn preset(&self) -> Preset {
        match *self {
            PresetSection::Integrable => Preset::Integrable,
            PresetSection::Shear { beta, w_max } => Preset::Shear { beta, w_max },
            PresetSection::Anisotropic { alpha, gamma, w_max } => Preset::Anisotropic { alpha, gamma, w_max },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rho", rename_all = "snake_case", deny_unknown_fields)]
pub enum TorusSection {
    #[default]
    Unit,
    Constant { r: f64 },
    CosineRipple { epsilon: f64 },
    TwistedRipple { epsilon: f64 },
}

impl TorusSection {
    pub fn spec(&self) -> Torus {
        match *self {
            TorusSection::Unit => Torus::Unit,
            TorusSection::Constant { r } => Torus::Constant(r),
            TorusSection::CosineRipple { epsilon } => Torus::CosineRipple(epsilon),
            TorusSection::TwistedRipple { epsilon } => Torus::TwistedRipple(epsilon),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub n_tau: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { n_tau: 32 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol_residual: f64,
    pub tol_boundary: f64,
    pub tol_step: f64,
    pub max_iterations: usize,
    pub damping: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            tol_residual: d.tol_residual,
            tol_boundary: d.tol_boundary,
            tol_step: d.tol_step,
            max_iterations: d.max_iterations,
            damping: d.damping,
        }
    }
}

impl SolverSection {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            tol_residual: self.tol_residual,
            tol_boundary: self.tol_boundary,
            tol_step: self.tol_step,
            max_iterations: self.max_iterations,
            damping: self.damping,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub mesh: PathBuf,
    pub report: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { mesh: PathBuf::from("mesh.csv"), report: PathBuf::from("report.json") }
    }
}

impl RunConfig {
    /// Reads, parses and validates a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Schema(msg) => CliError::Schema(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks ranges the TOML types cannot express; errors name the field.
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |field: &str, msg: String| Err(CliError::Schema(format!("{field}: {msg}")));
        let GridSection { n_r, n_theta } = self.grid;
        if n_r < MIN_RADIAL {
            return fail("grid.n_r", format!("{n_r} is below the minimum {MIN_RADIAL}"));
        }
        if n_theta < MIN_ANGULAR || !n_theta.is_power_of_two() {
            return fail("grid.n_theta", format!("{n_theta} must be a power of two and at least {MIN_ANGULAR}"));
        }

        let below = |field: &str, v: f64, cap: f64| {
            if v.is_finite() && v.abs() < cap {
                Ok(())
            } else {
                fail(field, format!("|{v}| must be below {cap}"))
            }
        };
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                fail(field, format!("{v} must be positive and finite"))
            }
        };
        let w_max = match self.preset {
            PresetSection::Integrable => f64::INFINITY,
            PresetSection::Shear { beta, w_max } => {
                below("preset.beta", beta, SHEAR_BETA_CAP)?;
                positive("preset.w_max", w_max)?;
                w_max
            }
            PresetSection::Anisotropic { alpha, gamma, w_max } => {
                below("preset.alpha", alpha, ANISOTROPIC_ALPHA_CAP)?;
                below("preset.gamma", gamma, ANISOTROPIC_GAMMA_CAP)?;
                positive("preset.w_max", w_max)?;
                w_max
            }
        };

        match self.torus {
            TorusSection::Unit => {}
            TorusSection::Constant { r } => positive("torus.r", r)?,
            TorusSection::CosineRipple { epsilon } | TorusSection::TwistedRipple { epsilon } => {
                below("torus.epsilon", epsilon, RIPPLE_CAP)?
            }
        }
        let (_, rho_max) = self.torus.spec().rho_range();
        if !(rho_max < w_max) {
            let field = if matches!(self.torus, TorusSection::Constant { .. }) { "torus.r" } else { "torus.epsilon" };
            return fail(field, format!("torus reaches |w| = {rho_max}, outside the preset cutoff w_max = {w_max}"));
        }

        if self.sweep.n_tau < MIN_N_TAU {
            return fail("sweep.n_tau", format!("{} is below the minimum {MIN_N_TAU}", self.sweep.n_tau));
        }

        let s = &self.solver;
        positive("solver.tol_residual", s.tol_residual)?;
        positive("solver.tol_boundary", s.tol_boundary)?;
        positive("solver.tol_step", s.tol_step)?;
        if s.max_iterations == 0 {
            return fail("solver.max_iterations", "must be at least 1".into());
        }
        if !(s.damping > 0.0 && s.damping <= 1.0) {
            return fail("solver.damping", format!("{} must lie in (0, 1]", s.damping));
        }

        if self.outputs.mesh.as_os_str().is_empty() {
            return fail("outputs.mesh", "path is empty".into());
        }
        if self.outputs.report.as_os_str().is_empty() {
            return fail("outputs.report", "path is empty".into());
        }
        Ok(())
    }
}

/// `path` taken relative to `base` unless it is absolute.
pub fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema_error(text: &str) -> String {
        match RunConfig::parse(text) {
            Err(CliError::Schema(msg)) => msg,
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::parse("[preset]\nname = \"integrable\"\n").unwrap();
        assert_eq!(cfg.grid, GridSection { n_r: 64, n_theta: 128 });
        assert_eq!(cfg.torus, TorusSection::Unit);
        assert_eq!(cfg.sweep.n_tau, 32);
        assert_eq!(cfg.solver.config(), SolverConfig::default());
        assert_eq!(cfg.outputs.report, PathBuf::from("report.json"));
    }

    #[test]
    fn full_config_parses() {
        let cfg = RunConfig::parse(
            r#"
            [grid]
            n_r = 16
            n_theta = 32
            [preset]
            name = "anisotropic"
            alpha = 0.5
            gamma = 0.3
            [torus]
            rho = "twisted_ripple"
            epsilon = 0.2
            [solver]
            damping = 0.8
            "#,
        )
        .unwrap();
        assert_eq!(cfg.preset.preset(), Preset::Anisotropic { alpha: 0.5, gamma: 0.3, w_max: DEFAULT_W_MAX });
        assert_eq!(cfg.torus.spec(), Torus::TwistedRipple(0.2));
        assert_eq!(cfg.solver.damping, 0.8);
        assert_eq!(cfg.solver.max_iterations, 500);
    }

    #[test]
    fn errors_name_the_field() {
        let base = "[preset]\nname = \"shear\"\nbeta = 0.1\n";
        let cases = [
            ("[grid]\nn_r = 64\nn_theta = 100\n", "grid.n_theta"),
            ("[grid]\nn_r = 4\nn_theta = 128\n", "grid.n_r"),
            ("[sweep]\nn_tau = 2\n", "sweep.n_tau"),
            ("[solver]\ntol_residual = -1.0\n", "solver.tol_residual"),
            ("[solver]\ndamping = 1.5\n", "solver.damping"),
            ("[torus]\nrho = \"cosine_ripple\"\nepsilon = 0.7\n", "torus.epsilon"),
            ("[torus]\nrho = \"constant\"\nr = 20.0\n", "torus.r"),
        ];
        for (extra, field) in cases {
            let msg = schema_error(&format!("{base}{extra}"));
            assert!(msg.contains(field), "{field}: {msg}");
        }
        assert!(schema_error("[preset]\nname = \"shear\"\nbeta = 1.5\n").contains("preset.beta"));
        assert!(schema_error("[preset]\nname = \"shear\"\nbta = 0.1\n").contains("bta"));
        assert!(schema_error("[preset]\nname = \"anisotropic\"\nalpha = 0.5\n").contains("gamma"));
        assert!(schema_error("[preset]\nname = \"cubic\"\n").contains("cubic"));
        assert!(schema_error(&format!("{base}[grid]\nn_r = \"many\"\n")).contains("n_r"));
        assert!(schema_error(&format!("{base}[extra]\nx = 1\n")).contains("extra"));
        assert!(schema_error("[grid]\nn_r = 32\n").contains("preset"));
        assert_eq!(RunConfig::parse(&format!("{base}[grid]\nn_r = 32\n")).unwrap().grid.n_theta, 128);
    }

    #[test]
    fn relative_paths_resolve_against_the_config_dir() {
        let base = Path::new("/runs/a");
        assert_eq!(resolve(base, Path::new("out/m.csv")), PathBuf::from("/runs/a/out/m.csv"));
        assert_eq!(resolve(base, Path::new("/tmp/m.csv")), PathBuf::from("/tmp/m.csv"));
    }
}
