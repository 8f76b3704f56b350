//! JSON reports. A report embeds the resolved config and holds no
//! timestamps, so identical runs produce identical bytes.

use leviflat::filling::{FamilyMetrics, ImmersionReport};
use leviflat::{Disc, Family};
use serde::Serialize;

use crate::config::RunConfig;

/// One pass/fail line. Non-finite values serialize as `null`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// `"<"`, `"<="`, `">"` or `"=="` between `value` and `threshold`.
    pub relation: &'static str,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &str, passed: bool, value: f64, relation: &'static str, threshold: f64) -> Self {
        Self { name: name.into(), passed, value, relation, threshold, detail: None }
    }

    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value < threshold, value, "<", threshold)
    }

    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value <= threshold, value, "<=", threshold)
    }

    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self::new(name, value > threshold, value, ">", threshold)
    }

    pub fn equals(name: &str, value: f64, expected: f64) -> Self {
        Self::new(name, value == expected, value, "==", expected)
    }

    /// A check that could not be evaluated.
    pub fn failed(name: &str, reason: impl std::fmt::Display) -> Self {
        Self::new(name, false, f64::NAN, "==", f64::NAN).with_detail(reason.to_string())
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// `PASS name: value rel threshold`.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {}: {:e} {} {:e}", self.name, self.value, self.relation, self.threshold);
        if let Some(d) = &self.detail {
            s.push_str(" (");
            s.push_str(d);
            s.push(')');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscSummary {
    pub tau_raw: f64,
    pub tau: f64,
    pub residual: f64,
    pub boundary_defect: f64,
    pub pin_defect: f64,
    pub boundary_modulus_defect: f64,
    pub iterations: usize,
    pub contraction: f64,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub max_principle_ratio: f64,
}

impl DiscSummary {
    pub fn of(d: &Disc) -> Self {
        let boundary = d.w.boundary_max();
        Self {
            tau_raw: d.tau_raw,
            tau: d.tau,
            residual: d.residual,
            boundary_defect: d.boundary_defect,
            pin_defect: d.pin_defect,
            boundary_modulus_defect: d.boundary_modulus_defect(),
            iterations: d.iterations,
            contraction: d.contraction,
            min_modulus: d.w.min_modulus(),
            max_modulus: d.w.sup_norm(),
            max_principle_ratio: d.w.sup_norm() / boundary,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub min_separation: f64,
    pub boundary_defect: f64,
    pub min_modulus: f64,
    pub radius_ratio: f64,
    pub max_principle_ratio: f64,
    pub max_residual: f64,
    pub max_iterations: usize,
    pub winding_min: i64,
    pub winding_max: i64,
    pub min_arg_step: f64,
}

impl From<&FamilyMetrics> for MetricsSummary {
    fn from(m: &FamilyMetrics) -> Self {
        Self {
            min_separation: m.min_separation,
            boundary_defect: m.boundary_defect,
            min_modulus: m.min_modulus,
            radius_ratio: m.radius_ratio,
            max_principle_ratio: m.max_principle_ratio,
            max_residual: m.max_residual,
            max_iterations: m.max_iterations,
            winding_min: m.winding_min,
            winding_max: m.winding_max,
            min_arg_step: m.min_arg_step,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImmersionSummary {
    pub min_linearized: f64,
    pub min_findiff: f64,
    pub gap_h: f64,
    pub gap_2h: f64,
    pub dtau: f64,
    pub max_linear_residual: f64,
}

impl From<&ImmersionReport> for ImmersionSummary {
    fn from(r: &ImmersionReport) -> Self {
        Self {
            min_linearized: r.min_linearized,
            min_findiff: r.min_findiff,
            gap_h: r.gap_h,
            gap_2h: r.gap_2h,
            dtau: r.dtau,
            max_linear_residual: r.max_linear_residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySummary {
    pub n_tau: usize,
    pub torus_defect: f64,
    pub metrics: MetricsSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub immersion: Option<ImmersionSummary>,
    pub discs: Vec<DiscSummary>,
}

impl FamilySummary {
    pub fn of(family: &Family, torus_defect: f64, immersion: Option<&ImmersionReport>) -> Self {
        Self {
            n_tau: family.n_tau(),
            torus_defect,
            metrics: (&family.metrics).into(),
            immersion: immersion.map(Into::into),
            discs: family.discs.iter().map(DiscSummary::of).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disc: Option<DiscSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySummary>,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig, checks: Vec<Check>) -> Self {
        Self {
            tool: "leviflat".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            disc: None,
            family: None,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}
