use psgrowth_core::spaces::{poincare_partial, Letter, MarkedGroup, PoincareParams, SeriesVerdict};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{LabError, Result};
use crate::report::{real, text, ExperimentReport, Table};

pub fn run_poincare(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let group = MarkedGroup::from_spec(&cfg.group)?;
    let radius = cfg.radius_or(20);
    let p = &cfg.params;
    let s_grid = if p.s_grid.is_empty() {
        vec![((2 * group.rank()).max(2) as f64 - 1.0).ln().max(0.5), 1.2]
    } else {
        p.s_grid.clone()
    };
    if !p.expected.is_empty() && p.expected.len() != s_grid.len() {
        return Err(LabError::Config("expected verdicts must align with s_grid".into()));
    }
    let mut rep = ExperimentReport::new(
        ExperimentKind::Poincare,
        "The Poincaré series converges above the growth exponent; the action is divergent if it diverges at it.",
        cfg,
    );
    let theta = p.theta.clone();
    let chi = p.chi.clone();
    let log_theta = theta.as_ref().map(|t| move |l: usize| t.log_theta(l as f64));
    let twist = chi.as_ref().map(|c| move |w: &[Letter]| c.evaluate(w));
    let mut series = Table::new("series", &["s", "radius", "log_term", "log_partial", "increment_ratio"]);
    let mut summary = Table::new("verdicts", &["s", "verdict"]);
    for (i, &s) in s_grid.iter().enumerate() {
        let rec = poincare_partial(
            &group,
            s,
            radius,
            log_theta.as_ref().map(|f| f as &dyn Fn(usize) -> f64),
            twist.as_ref().map(|f| f as &dyn Fn(&[Letter]) -> f64),
            PoincareParams::default(),
        )?;
        for l in 0..=radius {
            let ratio = rec.increment_ratios[l];
            series.push(vec![
                s.into(),
                l.into(),
                real(Some(rec.log_terms[l])),
                real(Some(rec.log_partial[l])),
                real(ratio),
            ]);
        }
        summary.push(vec![s.into(), text(verdict_name(rec.verdict))]);
        if let Some(expected) = p.expected.get(i) {
            rep.verdict(
                &format!("series_at_{s}"),
                format!("partial sums to radius {radius} at s = {s} classify as {}", verdict_name(*expected)),
                rec.verdict == *expected,
                None,
            );
        }
    }
    rep.scope(format!("partial sums over radii 0..={radius}; the verdict reads the last five increment ratios"));
    rep.tables.push(series);
    rep.tables.push(summary);
    Ok(rep)
}

pub fn verdict_name(v: SeriesVerdict) -> &'static str {
    match v {
        SeriesVerdict::DivergentAtS => "DIVERGENT-AT-S",
        SeriesVerdict::ConvergentAtS => "CONVERGENT-AT-S",
        SeriesVerdict::Inconclusive => "INCONCLUSIVE",
    }
}
