use std::collections::BTreeMap;

use psgrowth_core::densities::{
    atomic_shadow_lemma_check, patterson_approximant, PattersonWeight, QuasiMorphism, TreeEndDensity,
};
use psgrowth_core::spaces::{enumerate_ball, poincare_partial, MarkedGroup, PoincareParams, SeriesVerdict};

use super::poincare::verdict_name;
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{LabError, Result};
use crate::report::{real, text, ExperimentReport, Table};

pub fn run_shadow_lemma(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let group = MarkedGroup::from_spec(&cfg.group)?;
    if !group.is_free() {
        return Err(LabError::Config("the shadow-lemma experiment needs a free group".into()));
    }
    let p = &cfg.params;
    let radius = cfg.radius_or(10);
    let r_grid = if p.r_grid.is_empty() { vec![0, 1, 2] } else { p.r_grid.clone() };
    let tree = TreeEndDensity::new(&group)?;
    let omega = tree.omega();
    let mut rep = ExperimentReport::new(
        ExperimentKind::ShadowLemma,
        "Shadow Lemma: ε‖ν_go‖e^{−ω d(o,go)} <= ν_o(O_o(go,r)) <= e^{2ωr}‖ν_go‖e^{−ω d(o,go)}.",
        cfg,
    );
    let ball = enumerate_ball(&group, radius, &cfg.budget)?;

    // (r, length) -> (count, min, max, upper failures)
    let mut agg: BTreeMap<(usize, usize), (u64, f64, f64, u64)> = BTreeMap::new();
    for i in 1..ball.len() {
        let g = ball.element(i);
        for &r in &r_grid {
            let row = tree.shadow_lemma_check(&g, r);
            let e = agg.entry((r, g.len())).or_insert((0, f64::INFINITY, f64::NEG_INFINITY, 0));
            e.0 += 1;
            e.1 = e.1.min(row.ratio);
            e.2 = e.2.max(row.ratio);
            e.3 += u64::from(!row.upper_holds);
        }
    }
    let mut exact = Table::new(
        "tree_ratios",
        &["r", "length", "count", "min_ratio", "max_ratio", "upper", "upper_failures"],
    );
    let mut failures = 0;
    for (&(r, l), &(n, lo, hi, bad)) in &agg {
        exact.push(vec![
            r.into(),
            l.into(),
            n.into(),
            real(Some(lo)),
            real(Some(hi)),
            real(Some((2.0 * omega * r as f64).exp())),
            bad.into(),
        ]);
        failures += bad;
    }
    for &r in &r_grid {
        let env = agg
            .iter()
            .filter(|((rr, _), _)| *rr == r)
            .map(|(_, v)| v.1)
            .fold(f64::INFINITY, f64::min);
        rep.headline(&format!("epsilon_envelope_r{r}"), env);
    }
    rep.verdict(
        "upper_bound",
        format!("ν_o(O_o(go,r))·e^{{ω|g|}}/‖ν_go‖ <= e^{{2ωr}} for all 1 <= |g| <= {radius}, r in {r_grid:?}"),
        failures == 0,
        None,
    );

    let s_grid = if p.s_grid.is_empty() { vec![1.10, 1.12, 1.15] } else { p.s_grid.clone() };
    let probes = if p.probes.is_empty() { vec!["a^4".to_string()] } else { p.probes.clone() };
    let atomic_radius = p.atomic_radius.unwrap_or(radius);
    let ar = p.alpha.unwrap_or(1);
    let mut atomic = Table::new("atomic", &["s", "probe", "r", "ratio", "tree_ratio", "band", "upper_holds"]);
    for &s in &s_grid {
        let fam = patterson_approximant(
            &group,
            s,
            atomic_radius,
            &p.theta.clone().unwrap_or_else(PattersonWeight::constant),
            &p.chi.clone().unwrap_or(QuasiMorphism::Zero),
            &cfg.budget,
        )?;
        for w in &probes {
            let g = group.parse(w)?;
            let row = atomic_shadow_lemma_check(&fam, &g, ar as f64, omega);
            let tree_ratio = tree.shadow_lemma_check(&g, ar).ratio;
            atomic.push(vec![
                s.into(),
                text(w),
                ar.into(),
                real(Some(row.ratio)),
                real(Some(tree_ratio)),
                real(Some(row.ratio / tree_ratio)),
                row.upper_holds.into(),
            ]);
        }
    }
    rep.scope(format!(
        "exact tree-end density on all g with 1 <= |g| <= {radius}; atomic approximants on B(o, {atomic_radius}) \
         with ω = ln(2r−1) in the ratio and the shadow radius {ar}"
    ));
    let series = poincare_partial(&group, omega, 20, None, None, PoincareParams::default())?;
    rep.headline("poincare_divergent_at_omega", f64::from(u8::from(series.verdict == SeriesVerdict::DivergentAtS)));
    rep.verdict(
        "divergent_at_omega",
        format!("P(s) at s = ω̂ = {omega} classifies as {} over radii 0..=20", verdict_name(SeriesVerdict::DivergentAtS)),
        series.verdict == SeriesVerdict::DivergentAtS,
        None,
    );
    rep.tables.push(exact);
    rep.tables.push(atomic);
    Ok(rep)
}
