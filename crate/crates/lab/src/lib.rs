//! Reproducible desk-scale experiments on top of `psgrowth-core`.
//!
//! Each experiment reads an [`ExperimentConfig`], runs to completion and
//! returns an [`ExperimentReport`] whose verdicts are finite-radius claims
//! recomputable from the report's own tables.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, ExperimentKind, FamilySpec, Params};
pub use error::{LabError, Result};
pub use report::{ExperimentReport, Table, Verdict};

pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if let Some(k) = cfg.experiment {
        if k != kind {
            return Err(LabError::Config(format!(
                "config is for '{}' but '{}' was requested",
                k.name(),
                kind.name()
            )));
        }
    }
    use experiments::*;
    match kind {
        ExperimentKind::Growth => growth::run_growth(cfg),
        ExperimentKind::NormalSubgroup => normal::run_normal_subgroup(cfg),
        ExperimentKind::Grigorchuk => grigorchuk::run_grigorchuk(cfg),
        ExperimentKind::ShadowLemma => shadow::run_shadow_lemma(cfg),
        ExperimentKind::Spr => spr::run_spr(cfg),
        ExperimentKind::Horoboundary => horoboundary::run_horoboundary(cfg),
        ExperimentKind::Poincare => poincare::run_poincare(cfg),
        ExperimentKind::Density => density::run_density(cfg),
    }
}
