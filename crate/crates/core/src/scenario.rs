// Copyright 2026 The cavity-discord Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario files: flat JSON objects, unknown keys rejected.
//!
//! ```json
//! {"family": "frozen", "c3": 0.6, "alpha_re": 0.8, "kappa": 0.05,
//!  "tau_max": 10.0, "samples": 1001}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{tau_grid, Family};
use crate::lindblad::OracleConfig;
use crate::measurement::SearchConfig;
use crate::statespace::ChannelParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// `"frozen"`, `"werner"` or `"general"`.
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c3: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
    pub kappa: f64,
    pub tau_max: f64,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rk4_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_theta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_phi: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_iters: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

impl From<crate::error::Error> for ConfigError {
    fn from(e: crate::error::Error) -> Self {
        ConfigError(e.to_string())
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        s.check()?;
        Ok(s)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {}", path.display(), e)))?;
        Self::from_json(&text)
    }

    pub fn from_family(family: Family, alpha: f64, kappa: f64, tau_max: f64, samples: usize) -> Self {
        let (c1, c2, c3, r) = match family {
            Family::Frozen { c3 } => (None, None, Some(c3), None),
            Family::Werner { r } => (None, None, None, Some(r)),
            Family::General { c1, c2, c3 } => (Some(c1), Some(c2), Some(c3), None),
        };
        Scenario {
            family: family.name().to_string(),
            c1,
            c2,
            c3,
            r,
            alpha_re: alpha,
            alpha_im: 0.0,
            kappa,
            tau_max,
            samples,
            fock_dim: None,
            rk4_step: None,
            grid_theta: None,
            grid_phi: None,
            refine_iters: None,
        }
    }

    /// Validates everything the commands rely on.
    pub fn check(&self) -> Result<(), ConfigError> {
        let family = self.family()?;
        family.x_state()?;
        family.correlations(1.0)?;
        self.channel()?;
        if !(self.tau_max >= 0.0 && self.tau_max.is_finite()) {
            return Err(ConfigError(format!("tau_max must be finite and >= 0, got {}", self.tau_max)));
        }
        if self.samples == 0 {
            return Err(ConfigError("samples must be at least 1".into()));
        }
        if let Some(h) = self.rk4_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(ConfigError(format!("rk4_step must be positive, got {}", h)));
            }
        }
        self.search_config().validate()?;
        Ok(())
    }

    /// The parameter family; exactly its own coefficient keys may be present.
    pub fn family(&self) -> Result<Family, ConfigError> {
        fn present(name: &'static str, v: Option<f64>) -> Option<&'static str> {
            v.map(|_| name)
        }
        let given: Vec<&str> = [
            present("c1", self.c1),
            present("c2", self.c2),
            present("c3", self.c3),
            present("r", self.r),
        ]
        .into_iter()
        .flatten()
        .collect();
        let expect: &[&str] = match self.family.as_str() {
            "frozen" => &["c3"],
            "werner" => &["r"],
            "general" => &["c1", "c2", "c3"],
            other => {
                return Err(ConfigError(format!(
                    "unknown family {:?} (expected frozen, werner or general)",
                    other
                )))
            }
        };
        if given != expect {
            return Err(ConfigError(format!(
                "family {:?} takes exactly {:?}, got {:?}",
                self.family, expect, given
            )));
        }
        Ok(match self.family.as_str() {
            "frozen" => Family::Frozen {
                c3: self.c3.unwrap(),
            },
            "werner" => Family::Werner { r: self.r.unwrap() },
            _ => Family::General {
                c1: self.c1.unwrap(),
                c2: self.c2.unwrap(),
                c3: self.c3.unwrap(),
            },
        })
    }

    pub fn channel(&self) -> Result<ChannelParams, ConfigError> {
        Ok(ChannelParams::new(
            Complex64::new(self.alpha_re, self.alpha_im),
            self.kappa,
        )?)
    }

    pub fn taus(&self) -> Vec<f64> {
        tau_grid(self.tau_max, self.samples)
    }

    pub fn search_config(&self) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            grid_theta: self.grid_theta.unwrap_or(d.grid_theta),
            grid_phi: self.grid_phi.unwrap_or(d.grid_phi),
            refine_iters: self.refine_iters.unwrap_or(d.refine_iters),
        }
    }

    pub fn oracle_config(&self) -> OracleConfig {
        let d = OracleConfig::default();
        OracleConfig {
            fock_dim: self.fock_dim,
            step: self.rk4_step.unwrap_or(d.step),
            sample_interval: d.sample_interval,
        }
    }
}
