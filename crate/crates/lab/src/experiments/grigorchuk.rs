use psgrowth_core::spaces::{
    growth_exponent, sphere_counts, Estimator, GroupSpec, GrowthEstimate, MarkedGroup, QuotientSpace,
};

use super::{ball_size, headline_estimator};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{LabError, Result};
use crate::report::{count, real, ExperimentReport, Table};

/// Kernel estimator: the ball ratio with lag 2. Kernel supports have period
/// 2 for even `k` and 1 for odd `k`; a common lag keeps the trend comparable.
pub const KERNEL_ESTIMATOR: Estimator = Estimator::BallRatio { lag: 2 };

pub struct GrigorchukRow {
    pub k: u32,
    pub kernel: GrowthEstimate,
    pub quotient: GrowthEstimate,
    pub omega_n: f64,
    pub omega_q: f64,
}

pub fn grigorchuk_row(k: u32, radius: usize) -> Result<GrigorchukRow> {
    let q = QuotientSpace::cyclic_free_product(k);
    let kernel = growth_exponent(&q.kernel_sphere_counts(radius));
    let quotient = growth_exponent(&q.sphere_counts(radius)?);
    let omega_n = kernel.final_value(KERNEL_ESTIMATOR).unwrap_or(f64::NAN);
    let omega_q = quotient.final_value(headline_estimator(&quotient)).unwrap_or(0.0);
    Ok(GrigorchukRow {
        k,
        kernel,
        quotient,
        omega_n,
        omega_q,
    })
}

pub fn run_grigorchuk(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let group = MarkedGroup::free(2);
    if cfg.group != (GroupSpec::Free { rank: 2 }) {
        return Err(LabError::Config("the Grigorchuk family lives in the free group of rank 2".into()));
    }
    let radius = cfg.radius_or(13);
    let ks = if cfg.params.k_list.is_empty() {
        vec![2, 3, 4]
    } else {
        cfg.params.k_list.clone()
    };
    if ks.contains(&0) {
        return Err(LabError::Config("k must be positive".into()));
    }
    let size = ball_size(&group, radius)?;
    if size * ks.len() as u128 > cfg.budget.max_elements as u128 * 4 {
        return Err(psgrowth_core::Error::BudgetExceeded {
            what: "filtered kernel enumeration",
            limit: cfg.budget.max_elements,
        }
        .into());
    }
    let mut rep = ExperimentReport::new(
        ExperimentKind::Grigorchuk,
        "For N_k the kernel of F_2 → Z/k * Z, ω(N_k) → ½ω(G) and ω(G/N_k) → ω(G) as k → ∞.",
        cfg,
    );
    let rows: Vec<GrigorchukRow> = std::thread::scope(|sc| {
        let handles: Vec<_> = ks.iter().map(|&k| sc.spawn(move || grigorchuk_row(k, radius))).collect();
        handles.into_iter().map(|h| h.join().expect("worker")).collect::<Result<Vec<_>>>()
    })?;
    let gest = growth_exponent(&sphere_counts(&group, radius)?);
    let omega_g = gest.final_value(headline_estimator(&gest)).unwrap_or(f64::NAN);
    rep.headline("omega_g", omega_g);

    let mut summary = Table::new("summary", &["k", "omega_n", "omega_q"]);
    let mut detail = Table::new("kernel_counts", &["k", "radius", "kernel_sphere", "quotient_sphere"]);
    for r in &rows {
        rep.headline(&format!("omega_n_k{}", r.k), r.omega_n);
        rep.headline(&format!("omega_q_k{}", r.k), r.omega_q);
        summary.push(vec![r.k.into(), real(Some(r.omega_n)), real(Some(r.omega_q))]);
        for l in 0..=radius {
            detail.push(vec![
                r.k.into(),
                l.into(),
                count(r.kernel.rows[l].sphere),
                count(r.quotient.rows[l].sphere),
            ]);
        }
    }
    let mut sorted: Vec<&GrigorchukRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.k);
    let n_gap = sorted.windows(2).map(|w| w[0].omega_n - w[1].omega_n).fold(f64::INFINITY, f64::min);
    let q_gap = sorted.windows(2).map(|w| w[1].omega_q - w[0].omega_q).fold(f64::INFINITY, f64::min);
    rep.verdict(
        "omega_n_nonincreasing",
        format!("ω̂_{{N_k}}({radius}) is nonincreasing in k over {ks:?}"),
        n_gap >= 0.0,
        Some(n_gap),
    );
    rep.verdict(
        "omega_q_nondecreasing",
        format!("ω̂_{{Q_k}}({radius}) is nondecreasing in k over {ks:?}"),
        q_gap >= 0.0,
        Some(q_gap),
    );
    let half = 0.5 * omega_g;
    let above = rows.iter().map(|r| r.omega_n - half).fold(f64::INFINITY, f64::min);
    rep.verdict(
        "omega_n_above_half",
        format!("every ω̂_{{N_k}}({radius}) exceeds ½ω̂_G({radius})"),
        above > 0.0,
        Some(above),
    );
    rep.scope(format!(
        "kernel counts by filtered enumeration of B(o, {radius}); ω̂_N is the lag-2 ball ratio, ω̂_Q the sphere ratio"
    ));
    rep.tables.push(summary);
    rep.tables.push(detail);
    Ok(rep)
}
