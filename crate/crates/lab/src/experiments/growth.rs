use psgrowth_core::spaces::{growth_exponent, sphere_counts, GrowthEstimate, MarkedGroup};

use super::headline_estimator;
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::report::{count, real, ExperimentReport, Table};

pub fn growth_table(name: &str, est: &GrowthEstimate) -> Table {
    let mut t = Table::new(name, &["radius", "sphere", "ball", "direct", "sphere_ratio", "ball_ratio"]);
    for r in &est.rows {
        t.push(vec![
            r.radius.into(),
            count(r.sphere),
            count(r.ball),
            real(r.direct),
            real(r.sphere_ratio),
            real(r.ball_ratio),
        ]);
    }
    t
}

pub fn run_growth(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let group = MarkedGroup::from_spec(&cfg.group)?;
    let radius = cfg.radius_or(12);
    let mut rep = ExperimentReport::new(
        ExperimentKind::Growth,
        "The growth exponent is the exponential rate of orbit-ball cardinalities.",
        cfg,
    );
    let counts = sphere_counts(&group, radius)?;
    let est = growth_exponent(&counts);
    let estimator = headline_estimator(&est);
    let omega = est.final_value(estimator);
    rep.headline("omega_ratio", omega.unwrap_or(f64::NAN));
    rep.headline("omega_direct", est.final_value(psgrowth_core::spaces::Estimator::Direct).unwrap_or(f64::NAN));
    rep.headline("ball_ratio_lag", est.lag as f64);
    if let Some(w) = omega {
        rep.headline("empirical_constant", est.empirical_constant(w));
    }
    rep.scope(format!("sphere counts by automaton up to radius {radius}"));
    if !est.empty_spheres.is_empty() {
        rep.flag(format!("empty spheres at radii {:?}", est.empty_spheres));
    }
    if let Some(expected) = cfg.params.expected_omega {
        let tol = cfg.params.tolerance.unwrap_or(1e-9);
        let err = omega.map_or(f64::INFINITY, |w| (w - expected).abs());
        rep.verdict(
            "omega_matches",
            format!("|ω̂({radius}) − {expected}| <= {tol}"),
            err <= tol,
            Some(tol - err),
        );
    }
    rep.tables.push(growth_table("growth", &est));
    Ok(rep)
}
