use psgrowth_core::spaces::{
    abelian_kernel_sphere_counts, growth_exponent, sphere_counts, Estimator, GrowthEstimate, MarkedGroup,
    QuotientSpace,
};
use psgrowth_core::Error as CoreError;

use super::{ball_size, headline_estimator};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::experiments::growth::growth_table;
use crate::report::{count, real, ExperimentReport, Table};

/// Kernel estimator: `ln |N ∩ B(o, l)| / l*`, the direct estimator over the
/// effective radius. Unlike the ratio estimators it is monotone on
/// abelianization kernels at these radii.
pub const KERNEL_ESTIMATOR: Estimator = Estimator::Direct;

/// Kernel sphere counts: the exponent-sum DP for abelianizations, filtered
/// enumeration otherwise.
pub fn kernel_counts(q: &QuotientSpace, radius: usize, max_elements: usize) -> Result<(Vec<u128>, &'static str)> {
    if q.is_free_abelianization() {
        return Ok((abelian_kernel_sphere_counts(q.parent().rank(), radius)?, "dp"));
    }
    if ball_size(q.parent(), radius)? > max_elements as u128 {
        return Err(CoreError::BudgetExceeded {
            what: "filtered kernel enumeration",
            limit: max_elements,
        }
        .into());
    }
    Ok((q.kernel_sphere_counts(radius), "filtered"))
}

fn nondecreasing(est: &GrowthEstimate, from: usize, to: usize) -> (bool, f64) {
    let vals: Vec<f64> = (from..=to).filter_map(|l| est.at(KERNEL_ESTIMATOR, l)).collect();
    let worst = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    (vals.windows(2).all(|w| w[1] >= w[0]), worst)
}

pub fn run_normal_subgroup(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let parent = MarkedGroup::from_spec(&cfg.group)?;
    let p = &cfg.params;
    let q = match &p.hom {
        Some(h) => QuotientSpace::from_spec(parent.clone(), h)?,
        None if parent.is_free() => QuotientSpace::abelianization(parent.clone()),
        None => return Err(crate::error::LabError::Config("a homomorphism is required for this group".into())),
    }
    .with_budget(cfg.budget);
    let radius = cfg.radius_or(16);
    let qradius = p.quotient_radius.unwrap_or(if q.target().is_free_abelian() { 60 } else { radius });
    let mut rep = ExperimentReport::new(
        ExperimentKind::NormalSubgroup,
        "Normal subgroups with amenable quotient share the growth exponent of the group; \
         in general ω(N) + ½ω(G/N) >= ω(G) and ω(N) > ½ω(G).",
        cfg,
    );

    let (kernel, method, gcounts, qcounts) = std::thread::scope(|sc| {
        let k = sc.spawn(|| kernel_counts(&q, radius, cfg.budget.max_elements));
        let g = sc.spawn(|| sphere_counts(&parent, radius));
        let qc = q.sphere_counts(qradius);
        let (kernel, method) = k.join().expect("kernel thread")?;
        let gcounts = g.join().expect("growth thread")?;
        Ok::<_, crate::error::LabError>((kernel, method, gcounts, qc?))
    })?;
    let nest = growth_exponent(&kernel);
    let gest = growth_exponent(&gcounts);
    let qest = growth_exponent(&qcounts);
    let omega_n = nest.final_value(KERNEL_ESTIMATOR).unwrap_or(f64::NAN);
    let omega_g = gest.final_value(headline_estimator(&gest)).unwrap_or(f64::NAN);
    let omega_q = qest.final_value(headline_estimator(&qest)).unwrap_or(0.0);
    rep.headline("omega_n", omega_n);
    rep.headline("omega_g", omega_g);
    rep.headline("omega_g_direct", gest.final_value(Estimator::Direct).unwrap_or(f64::NAN));
    rep.headline("omega_q", omega_q);
    rep.headline("combination_n_plus_half_q_minus_g", omega_n + 0.5 * omega_q - omega_g);
    rep.scope(format!(
        "kernel counts by {method} to radius {radius}; quotient counts to radius {qradius}; \
         ω̂_N is the direct estimator over the effective radius, ω̂_G and ω̂_Q are ratio estimators"
    ));
    rep.scope("all three exponents are finite-radius lower estimates; the combination is reported, not asserted".into());
    let nonempty = kernel.iter().skip(1).filter(|&&c| c > 0).count();
    if nonempty < 3 {
        rep.flag(format!("kernel too sparse: only {nonempty} nonempty spheres up to radius {radius}"));
    }

    if method == "dp" {
        let cc = p.cross_check_radius.unwrap_or(10).min(radius);
        let filtered = q.kernel_sphere_counts(cc);
        rep.verdict(
            "dp_matches_filtered",
            format!("exponent-sum DP and filtered enumeration agree on kernel spheres up to radius {cc}"),
            filtered[..] == kernel[..=cc],
            None,
        );
    }
    let from = p.trend_from.unwrap_or(6).min(radius);
    let (mono, worst) = nondecreasing(&nest, from, radius);
    rep.verdict(
        "omega_n_nondecreasing",
        format!("ω̂_N(l) is nondecreasing for {from} <= l <= {radius}"),
        mono,
        Some(worst),
    );
    let margin = p.margin.unwrap_or(0.0);
    let gap = omega_n - 0.5 * omega_g;
    rep.verdict(
        "omega_n_above_half",
        format!("ω̂_N({radius}) exceeds ½ω̂_G({radius}) by at least {margin}"),
        gap > 0.0 && gap >= margin,
        Some(gap),
    );

    let mut kt = Table::new(
        "kernel",
        &["radius", "sphere", "ball", "direct", "sphere_ratio", "ball_ratio"],
    );
    for r in &nest.rows {
        kt.push(vec![
            r.radius.into(),
            count(r.sphere),
            count(r.ball),
            real(r.direct),
            real(r.sphere_ratio),
            real(r.ball_ratio),
        ]);
    }
    rep.tables.push(kt);
    rep.tables.push(growth_table("group", &gest));
    rep.tables.push(growth_table("quotient", &qest));
    Ok(rep)
}
