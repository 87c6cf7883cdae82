//! Analysis configuration: the JSON grammar consumed by the CLI.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::copulas::CopulaSpec;
use crate::error::{Error, Result};
use crate::marginals::{LogMarginal, MarginalSpec};
use crate::wrapped::EngineSettings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Analyze,
    SweepAlpha,
    SweepN,
    DigitTable,
    Validate,
}

fn d_base() -> u32 {
    10
}
fn d_grid() -> usize {
    12
}
fn d_tol() -> f64 {
    1e-6
}
fn d_mode() -> Mode {
    Mode::Analyze
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub copula: CopulaSpec,
    /// Explicit marginal list; may be empty when `pairing` is set.
    #[serde(default)]
    pub marginals: Vec<MarginalSpec>,
    /// Built-in pairing preset: "A" = normal x exponential,
    /// "B" = pareto x normal, "C" = pareto x exponential (log scale).
    #[serde(default)]
    pub pairing: Option<String>,
    #[serde(default = "d_base")]
    pub base: u32,
    #[serde(default = "d_grid")]
    pub grid: usize,
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_mode")]
    pub mode: Mode,
    /// Sweep ranges.
    #[serde(default)]
    pub alpha_list: Vec<f64>,
    #[serde(default)]
    pub n_list: Vec<usize>,
    /// Monte Carlo oracle sample count (0 disables the oracle columns).
    #[serde(default)]
    pub mc_count: usize,
    #[serde(default)]
    pub qmc_log2_points: Option<u32>,
}

pub const N_MAX_QUADRATURE: usize = 5;
pub const N_MAX_QMC: usize = 7;

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: AnalysisConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 0.1) {
            return Err(Error::Config(format!(
                "field tol: must lie in (0, 0.1], got {}",
                self.tol
            )));
        }
        if self.grid < 2 {
            return Err(Error::Config(format!(
                "field grid: must be >= 2, got {}",
                self.grid
            )));
        }
        if self.base < 3 {
            // base 2 has a single possible leading digit, leaving the
            // digit statistic with zero degrees of freedom
            return Err(Error::Config(format!(
                "field base: must be >= 3, got {}",
                self.base
            )));
        }
        if let Some(p) = &self.pairing {
            if !["A", "B", "C"].contains(&p.as_str()) {
                return Err(Error::Config(format!(
                    "field pairing: expected \"A\", \"B\" or \"C\", got \"{p}\""
                )));
            }
            if !self.marginals.is_empty() {
                return Err(Error::Config(
                    "fields pairing and marginals are mutually exclusive".into(),
                ));
            }
        }
        let n = self.copula.dimension();
        match self.mode {
            Mode::SweepN => {
                if !self.marginals.is_empty() && self.marginals.len() != 1 {
                    return Err(Error::Config(format!(
                        "field marginals: sweep_n replicates one marginal, got {}",
                        self.marginals.len()
                    )));
                }
                if self.n_list.is_empty() {
                    return Err(Error::Config("field n_list: empty for sweep_n".into()));
                }
                for &nn in &self.n_list {
                    if !(2..=N_MAX_QMC).contains(&nn) {
                        return Err(Error::Config(format!(
                            "field n_list: n={nn} outside [2, {N_MAX_QMC}]"
                        )));
                    }
                }
            }
            Mode::SweepAlpha => {
                if self.alpha_list.is_empty() {
                    return Err(Error::Config(
                        "field alpha_list: empty for sweep_alpha".into(),
                    ));
                }
            }
            _ => {}
        }
        if self.mode != Mode::SweepN && self.pairing.is_none() && !self.marginals.is_empty() {
            if self.marginals.len() != n {
                return Err(Error::Config(format!(
                    "field marginals: {} entries for an n={n} copula",
                    self.marginals.len()
                )));
            }
        }
        if self.pairing.is_some() && self.mode != Mode::SweepN && n != 2 {
            return Err(Error::Config(
                "field pairing: presets are two-dimensional".into(),
            ));
        }
        Ok(())
    }

    /// Marginals for the built-in two-dimensional pairing presets.
    pub fn pairing_marginals(label: &str, base: u32) -> Result<Vec<LogMarginal>> {
        match label {
            "A" => Ok(vec![
                LogMarginal::normal(0.0, 1.0, base)?,
                LogMarginal::exponential(1.0, base)?,
            ]),
            "B" => Ok(vec![
                LogMarginal::pareto_log(1.0, 2.0, base)?,
                LogMarginal::normal(0.0, 1.0, base)?,
            ]),
            "C" => Ok(vec![
                LogMarginal::pareto_log(1.0, 2.0, base)?,
                LogMarginal::exponential(1.0, base)?,
            ]),
            _ => Err(Error::Config(format!("unknown pairing \"{label}\""))),
        }
    }

    /// Resolve the configured marginals for dimension `n`.
    pub fn resolved_marginals(&self, n: usize) -> Result<Vec<LogMarginal>> {
        if let Some(p) = &self.pairing {
            let m = Self::pairing_marginals(p, self.base)?;
            if m.len() != n {
                return Err(Error::Config(format!(
                    "pairing \"{p}\" is 2-dimensional, copula has n={n}"
                )));
            }
            return Ok(m);
        }
        if self.marginals.is_empty() {
            return Err(Error::Config("no marginals configured".into()));
        }
        if self.marginals.len() == 1 && n > 1 {
            let one = LogMarginal::from_spec(&self.marginals[0], self.base)?;
            return Ok(vec![one; n]);
        }
        if self.marginals.len() != n {
            return Err(Error::Config(format!(
                "field marginals: {} entries for dimension {n}",
                self.marginals.len()
            )));
        }
        self.marginals
            .iter()
            .map(|m| LogMarginal::from_spec(m, self.base))
            .collect()
    }

    pub fn engine_settings(&self) -> EngineSettings {
        let mut st = EngineSettings::default();
        if let Some(p) = self.qmc_log2_points {
            st.qmc_log2_points = p;
        }
        st.qmc_seed = self.seed ^ 0x51ed;
        st
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = AnalysisConfig::from_json(
            r#"{
                "copula": {"family": "clayton", "alpha": 2.0, "n": 2},
                "marginals": [
                    {"kind": "normal", "mu": 0.0, "sigma": 1.0},
                    {"kind": "exponential", "lambda": 1.0}
                ]
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.base, 10);
        assert_eq!(cfg.grid, 12);
        assert_eq!(cfg.tol, 1e-6);
        assert_eq!(cfg.mode, Mode::Analyze);
        let margs = cfg.resolved_marginals(2).unwrap();
        assert_eq!(margs.len(), 2);
    }

    #[test]
    fn pairing_presets_resolve() {
        for (label, first) in [("A", "normal"), ("B", "pareto_log"), ("C", "pareto_log")] {
            let m = AnalysisConfig::pairing_marginals(label, 10).unwrap();
            assert_eq!(m.len(), 2);
            assert!(m[0].label().starts_with(first), "{label}: {}", m[0].label());
        }
        assert!(AnalysisConfig::pairing_marginals("D", 10).is_err());
    }

    #[test]
    fn rejects_bad_fields() {
        let base = r#"{
            "copula": {"family": "clayton", "alpha": 2.0, "n": 2},
            "pairing": "A"%s
        }"#;
        let ok = AnalysisConfig::from_json(&base.replace("%s", "")).unwrap();
        assert!(ok.validate().is_ok());
        for extra in [
            r#", "tol": 0.5"#,
            r#", "grid": 1"#,
            r#", "base": 1"#,
            r#", "base": 2"#,
            r#", "pairing": "Z""#,
            r#", "unknown_field": 3"#,
        ] {
            // last pairing key wins in serde_json? keep fields distinct instead
            let text = base.replace("%s", extra);
            if extra.contains("pairing") {
                continue;
            }
            assert!(AnalysisConfig::from_json(&text).is_err(), "{extra}");
        }
        let bad_pairing = r#"{
            "copula": {"family": "clayton", "alpha": 2.0, "n": 2},
            "pairing": "Z"
        }"#;
        assert!(AnalysisConfig::from_json(bad_pairing).is_err());
    }

    #[test]
    fn sweep_configs_validated() {
        let text = r#"{
            "copula": {"family": "gumbel_barnett", "alpha": 0.1, "n": 2},
            "marginals": [{"kind": "normal", "mu": 0.0, "sigma": 1.0}],
            "mode": "sweep_n",
            "n_list": [2, 3, 4, 5]
        }"#;
        let cfg = AnalysisConfig::from_json(text).unwrap();
        assert_eq!(cfg.resolved_marginals(4).unwrap().len(), 4);
        let empty = text.replace("[2, 3, 4, 5]", "[]");
        assert!(AnalysisConfig::from_json(&empty).is_err());
        let too_big = text.replace("[2, 3, 4, 5]", "[2, 9]");
        assert!(AnalysisConfig::from_json(&too_big).is_err());
    }
}
