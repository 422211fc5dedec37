//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use psgrowth_core::densities::{PattersonWeight, QuasiMorphism};
use psgrowth_core::spaces::{Budget, GroupSpec, HomSpec, SeriesVerdict};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Growth,
    NormalSubgroup,
    Grigorchuk,
    ShadowLemma,
    Spr,
    Horoboundary,
    Poincare,
    Density,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Growth => "growth",
            ExperimentKind::NormalSubgroup => "normal-subgroup",
            ExperimentKind::Grigorchuk => "grigorchuk",
            ExperimentKind::ShadowLemma => "shadow-lemma",
            ExperimentKind::Spr => "spr",
            ExperimentKind::Horoboundary => "horoboundary",
            ExperimentKind::Poincare => "poincare",
            ExperimentKind::Density => "density",
        }
    }
}

fn default_group() -> GroupSpec {
    GroupSpec::Free { rank: 2 }
}

/// A sequence family for the horoboundary atlas. `term` is a word whose
/// exponents may be linear in `n`, written in braces: `a^{2n}b^{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    pub term: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub s_grid: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub r_grid: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_length: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub k_list: Vec<u32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub k_radii: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hom: Option<HomSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<QuasiMorphism>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<PattersonWeight>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<FamilySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check_radius: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend_from: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atomic_radius: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<SeriesVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// One experiment run. Unset fields take per-experiment defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default = "default_group")]
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: Params,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            group: default_group(),
            radius: None,
            budget: Budget::default(),
            seed: 0,
            out: None,
            params: Params::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn for_kind(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment: Some(kind),
            ..Self::default()
        }
    }

    pub fn with_group(mut self, group: GroupSpec) -> Self {
        self.group = group;
        self
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn radius_or(&self, default: usize) -> usize {
        self.radius.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_rejects_unknown() {
        let c = ExperimentConfig::from_json(r#"{"experiment":"growth","radius":5}"#).unwrap();
        assert_eq!(c.experiment, Some(ExperimentKind::Growth));
        assert_eq!(c.group, GroupSpec::Free { rank: 2 });
        assert!(ExperimentConfig::from_json(r#"{"radius":5,"bogus":1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"params":{"nope":1}}"#).is_err());
        let c = ExperimentConfig::from_json(
            r#"{"group":{"kind":"free_abelian","dim":2},"params":{"chi":{"kind":"homomorphism","weights":[1.0,0.0]}}}"#,
        )
        .unwrap();
        assert!(c.params.chi.is_some());
    }
}
