use psgrowth_core::spaces::{
    all_geodesics, enumerate_ball, growth_exponent, poincare_partial, sphere_counts, Budget, Element, Estimator,
    MarkedGroup, PoincareParams,
};

use super::headline_estimator;
use super::poincare::verdict_name;
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::report::{count, real, text, ExperimentReport, Table};

/// Whether the vertex path `path` from `x ∈ K` to `g·y ∈ gK` meets `G·K`
/// only inside `K ∪ gK`, for `K` the closed ball of radius `k` around `o`
/// in the Cayley graph.
fn path_is_excursion(group: &MarkedGroup, path: &[Element], g: &Element, k: usize) -> bool {
    let o = group.identity();
    let near = |v: &Element| group.distance(&o, v) <= k || group.distance(g, v) <= k;
    if !path.iter().all(near) {
        return false;
    }
    if k == 0 {
        // G·{o} is the vertex set; edge interiors are not in G·K.
        return true;
    }
    // For k >= 1, G·K is the whole graph. Distances along an edge are
    // piecewise linear with slopes ±1 and integer values at the ends, so the
    // worst point is a vertex or the midpoint.
    path.windows(2).all(|e| {
        let d = [
            group.distance(&o, &e[0]),
            group.distance(&o, &e[1]),
            group.distance(g, &e[0]),
            group.distance(g, &e[1]),
        ];
        2 * d.iter().min().copied().unwrap_or(0) < 2 * k
    })
}

/// `G_K ∩ B(o, radius)` for `K = B(o, k)`, by the definition: some `x, y ∈ K`
/// and a geodesic from `x` to `g·y` meet `G·K` only in `K ∪ gK`.
/// Endpoints range over the vertices of `K`.
pub fn excursion_set(group: &MarkedGroup, k: usize, radius: usize, budget: &Budget) -> Result<Vec<Element>> {
    let ball = enumerate_ball(group, radius.max(k), budget)?;
    let kset: Vec<Element> = (0..ball.len())
        .filter(|&i| ball.depth(i) <= k)
        .map(|i| ball.element(i))
        .collect();
    let mut out = Vec::new();
    for i in 0..ball.len() {
        if ball.depth(i) > radius {
            break;
        }
        let g = ball.element(i);
        let mut found = false;
        'pairs: for x in &kset {
            for y in &kset {
                let gy = group.multiply(&g, y);
                for path in all_geodesics(group, x, &gy, budget)? {
                    if path_is_excursion(group, &path, &g, k) {
                        found = true;
                        break 'pairs;
                    }
                }
            }
        }
        if found {
            out.push(g);
        }
    }
    Ok(out)
}

pub fn run_spr(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let group = MarkedGroup::from_spec(&cfg.group)?;
    let radius = cfg.radius_or(6);
    let ks = if cfg.params.k_radii.is_empty() { vec![0, 1] } else { cfg.params.k_radii.clone() };
    let mut rep = ExperimentReport::new(
        ExperimentKind::Spr,
        "ω_∞ = inf_K ω(G_K); if ω_∞ < ω_G the action is strongly positively recurrent and hence divergent.",
        cfg,
    );
    let gest = growth_exponent(&sphere_counts(&group, radius)?);
    let omega_g = gest.final_value(headline_estimator(&gest)).unwrap_or(0.0);
    rep.headline("omega_g", omega_g);
    let mut table = Table::new("excursion", &["k", "radius", "sphere", "ball", "ball_ratio"]);
    let mut summary = Table::new("summary", &["k", "size", "omega_gk", "gap"]);
    for &k in &ks {
        let set = excursion_set(&group, k, radius, &cfg.budget)?;
        let mut counts = vec![0u128; radius + 1];
        for g in &set {
            counts[g.len()] += 1;
        }
        let est = growth_exponent(&counts);
        let omega_k = est.at(Estimator::BallRatio { lag: 1 }, radius).unwrap_or(0.0);
        for r in &est.rows {
            table.push(vec![
                k.into(),
                r.radius.into(),
                count(r.sphere),
                count(r.ball),
                real(est.at(Estimator::BallRatio { lag: 1 }, r.radius)),
            ]);
        }
        let gap = omega_g - omega_k;
        summary.push(vec![k.into(), set.len().into(), real(Some(omega_k)), real(Some(gap))]);
        rep.headline(&format!("size_k{k}"), set.len() as f64);
        rep.headline(&format!("omega_gk_k{k}"), omega_k);
        rep.headline(&format!("gap_k{k}"), gap);
        let margin = cfg.params.margin.unwrap_or(0.0);
        if !group.is_free_abelian() {
            rep.verdict(
                &format!("gap_k{k}"),
                format!("ω̂_G({radius}) − ω̂_{{G_K}}({radius}) >= {margin} for K = B(o, {k})"),
                gap >= margin,
                Some(gap),
            );
        }
    }
    if group.is_free_abelian() {
        rep.flag("degenerate: polynomial growth, ω_G = 0, no exponential gap is possible".into());
    }
    let series = poincare_partial(&group, omega_g, 20, None, None, PoincareParams::default())?;
    let mut st = Table::new("series", &["s", "verdict"]);
    st.push(vec![real(Some(omega_g)), text(verdict_name(series.verdict))]);
    rep.scope(format!(
        "G_K restricted to B(o, {radius}); endpoints x, y range over vertices of K; P_G classified over radii 0..=20 at ω̂_G"
    ));
    rep.tables.push(table);
    rep.tables.push(summary);
    rep.tables.push(st);
    Ok(rep)
}
