//! End-to-end acceptance run. Prints one line per criterion and fails if any does.

use std::time::Instant;

use psgrowth_core::boundary::{gromov_product, Cocycle, L1Mode, Shadow, TreeEnd};
use psgrowth_core::contraction::{check_contracting, detect_contracting, ContractionOutcome, SubsetWindow};
use psgrowth_core::densities::{shadow_cylinder, vitali_select, TreeEndDensity};
use psgrowth_core::spaces::{
    enumerate_ball, growth_exponent, poincare_partial, sphere_counts, Budget, Element, Estimator, MarkedGroup,
    PoincareParams, SeriesVerdict,
};
use psgrowth_lab::experiments::density::{conformality_sweep, harnack_samples, random_vitali_family};
use psgrowth_lab::experiments::spr::excursion_set;
use psgrowth_lab::{run, ExperimentConfig, ExperimentKind, ExperimentReport, Params};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[path = "../../core/tests/support/kochen_stone.rs"]
mod kochen_stone_oracle;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn headline(rep: &ExperimentReport, key: &str) -> Result<f64, String> {
    rep.headline.get(key).copied().ok_or_else(|| format!("missing headline {key}"))
}

fn verdict(rep: &ExperimentReport, name: &str) -> Result<(), String> {
    let v = rep.get_verdict(name).ok_or_else(|| format!("missing verdict {name}"))?;
    ensure(v.passed, || format!("{name} failed: {} (margin {:?})", v.claim, v.margin))
}

fn free_sphere_exactness() -> Outcome {
    let counts = sphere_counts(&MarkedGroup::free(2), 14).map_err(err)?;
    for (l, &c) in counts.iter().enumerate() {
        let want = if l == 0 { 1 } else { 4 * 3u128.pow(l as u32 - 1) };
        ensure(c == want, || format!("|S({l})| = {c}, expected {want}"))?;
    }
    let est = growth_exponent(&counts);
    let mut worst: f64 = 0.0;
    for l in 2..=14 {
        let v = est.at(Estimator::SphereRatio, l).ok_or("ratio undefined")?;
        worst = worst.max((v - 3f64.ln()).abs());
    }
    ensure(worst < 1e-9, || format!("ratio off ln 3 by {worst:e}"))?;
    Ok(format!("spheres 4·3^(l−1) to radius 14, ratio error {worst:.1e}"))
}

fn tree_shadow_sharpness() -> Outcome {
    let g = MarkedGroup::free(2);
    let tree = TreeEndDensity::new(&g).map_err(err)?;
    let ball = enumerate_ball(&g, 10, &Budget::default()).map_err(err)?;
    let mut checked = 0;
    for i in 1..ball.len() {
        let x = ball.element(i);
        let row = tree.shadow_lemma_check(&x, 0);
        ensure(row.exact_ratio.as_deref() == Some("3/4"), || format!("{x}: ratio {:?}", row.exact_ratio))?;
        for r in 0..=2 {
            let row = if r == 0 { row.clone() } else { tree.shadow_lemma_check(&x, r) };
            ensure(row.upper_holds, || format!("{x}, r = {r}: {} > {}", row.ratio, row.upper))?;
        }
        checked += 1;
    }
    Ok(format!("ratio 3/4 on all {checked} elements with 1 <= |g| <= 10, upper bound holds for r in 0..=2"))
}

fn tree_conformality() -> Outcome {
    let tree = TreeEndDensity::new(&MarkedGroup::free(2)).map_err(err)?;
    let sweep = conformality_sweep(&tree, 2).map_err(err)?;
    ensure(sweep.shallow == 0, || format!("{} cylinders too shallow", sweep.shallow))?;
    ensure(sweep.max_error == 0.0, || format!("max error {}", sweep.max_error))?;
    Ok(format!("{} pairs, {} cylinders, error 0", sweep.pairs, sweep.cylinders))
}

fn divergence_classification() -> Outcome {
    let g = MarkedGroup::free(2);
    let at = poincare_partial(&g, 3f64.ln(), 20, None, None, PoincareParams::default()).map_err(err)?;
    ensure(at.verdict == SeriesVerdict::DivergentAtS, || format!("at ln 3: {:?}", at.verdict))?;
    for l in 1..=20 {
        let step = at.partial_sum(l) - at.partial_sum(l - 1);
        ensure((step - 4.0 / 3.0).abs() < 1e-9, || format!("increment at radius {l} is {step}"))?;
    }
    let above = poincare_partial(&g, 1.2, 20, None, None, PoincareParams::default()).map_err(err)?;
    ensure(above.verdict == SeriesVerdict::ConvergentAtS, || format!("at 1.2: {:?}", above.verdict))?;
    Ok("DIVERGENT at ln 3 with increments 4/3, CONVERGENT at 1.2, radius 20".into())
}

fn normal_subgroup() -> Outcome {
    let params = Params {
        cross_check_radius: Some(12),
        trend_from: Some(6),
        margin: Some(0.3),
        quotient_radius: Some(60),
        ..Params::default()
    };
    let cfg = ExperimentConfig::for_kind(ExperimentKind::NormalSubgroup)
        .with_radius(16)
        .with_params(params);
    let rep = run(ExperimentKind::NormalSubgroup, &cfg).map_err(err)?;
    verdict(&rep, "dp_matches_filtered")?;
    verdict(&rep, "omega_n_nondecreasing")?;
    let omega_n = headline(&rep, "omega_n")?;
    let margin = omega_n - 0.5 * 3f64.ln();
    ensure(margin >= 0.3, || format!("ω̂_N(16) = {omega_n:.4}, margin {margin:.4} over ½ ln 3"))?;
    verdict(&rep, "omega_n_above_half")?;
    let omega_q = headline(&rep, "omega_q")?;
    ensure(omega_q < 0.15, || format!("ω̂_Q(60) = {omega_q:.4}"))?;
    Ok(format!("ω̂_N(16) = {omega_n:.4} (margin {margin:.4}), ω̂_Q(60) = {omega_q:.4}"))
}

fn grigorchuk_trend() -> Outcome {
    let params = Params {
        k_list: vec![2, 3, 4],
        ..Params::default()
    };
    let cfg = ExperimentConfig::for_kind(ExperimentKind::Grigorchuk)
        .with_radius(13)
        .with_params(params);
    let rep = run(ExperimentKind::Grigorchuk, &cfg).map_err(err)?;
    let n: Vec<f64> = (2..=4).map(|k| headline(&rep, &format!("omega_n_k{k}"))).collect::<Result<_, _>>()?;
    let q: Vec<f64> = (2..=4).map(|k| headline(&rep, &format!("omega_q_k{k}"))).collect::<Result<_, _>>()?;
    ensure(n.windows(2).all(|w| w[0] >= w[1]), || format!("ω̂_N not nonincreasing: {n:?}"))?;
    ensure(q.windows(2).all(|w| w[0] <= w[1]), || format!("ω̂_Q not nondecreasing: {q:?}"))?;
    let half = 0.5 * 3f64.ln();
    ensure(n.iter().all(|&v| v > half), || format!("some ω̂_N below ½ ln 3: {n:?}"))?;
    for name in ["omega_n_nonincreasing", "omega_q_nondecreasing", "omega_n_above_half"] {
        verdict(&rep, name)?;
    }
    Ok(format!("ω̂_N = {n:.4?}, ω̂_Q = {q:.4?}"))
}

fn spr_sanity() -> Outcome {
    let g = MarkedGroup::free(2);
    let set = excursion_set(&g, 0, 6, &Budget::default()).map_err(err)?;
    let ball1 = enumerate_ball(&g, 1, &Budget::default()).map_err(err)?.elements();
    let mut sorted = set.clone();
    sorted.sort();
    let mut want = ball1.clone();
    want.sort();
    ensure(sorted == want, || format!("G_K = {set:?}"))?;
    let cfg = ExperimentConfig::for_kind(ExperimentKind::Spr).with_params(Params {
        k_radii: vec![0],
        margin: Some(1.0),
        ..Params::default()
    });
    let rep = run(ExperimentKind::Spr, &cfg).map_err(err)?;
    let omega_k = headline(&rep, "omega_gk_k0")?;
    let gap = headline(&rep, "gap_k0")?;
    ensure(omega_k == 0.0, || format!("ω̂_(G_K) = {omega_k}"))?;
    ensure(gap >= 1.0, || format!("gap {gap}"))?;
    verdict(&rep, "gap_k0")?;
    Ok(format!("G_K = B(o, 1) with 5 elements, ω̂_(G_K) = 0, gap {gap:.4}"))
}

fn vitali_self_check() -> Outcome {
    let g = MarkedGroup::free(2);
    let alpha = 1;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let meets = |u: &Element, v: &Element| u.starts_with(v) || v.starts_with(u);
    let mut failures = 0;
    for _ in 0..200 {
        let (family, l) = random_vitali_family(&mut rng, &g, alpha);
        let rep = vitali_select(&g, &family, alpha, l).map_err(err)?;
        let cyl: Vec<Element> = family.iter().map(|(w, r)| shadow_cylinder(w, *r)).collect();
        let disjoint = rep
            .selected
            .iter()
            .enumerate()
            .all(|(k, &i)| rep.selected[k + 1..].iter().all(|&j| !meets(&cyl[i], &cyl[j])));
        let covered = (0..family.len()).all(|i| {
            rep.selected
                .iter()
                .any(|&j| cyl[i].starts_with(&shadow_cylinder(&family[j].0, family[j].1 + 42 * alpha)))
        });
        let ok = disjoint && covered && rep.disjoint && rep.covered;
        failures += usize::from(!ok);
    }
    ensure(failures == 0, || format!("{failures} of 200 families failed"))?;
    Ok("200 random families, 0 failures".into())
}

fn exhaustive_cocycles(g: &MarkedGroup, cocycles: &[Cocycle]) -> Result<usize, String> {
    let pts = enumerate_ball(g, 3, &Budget::default()).map_err(err)?.elements();
    let mut triples = 0;
    for c in cocycles {
        let pot: Vec<f64> = pts.iter().map(|x| c.potential(g, x)).collect::<Result<_, _>>().map_err(err)?;
        for (i, x) in pts.iter().enumerate() {
            for (j, y) in pts.iter().enumerate() {
                let cxy = c.evaluate(g, x, y).map_err(err)?;
                let d = g.distance(x, y) as f64;
                ensure(cxy.abs() <= d, || format!("{c:?} not 1-Lipschitz at {x}, {y}"))?;
                let gp = gromov_product(g, c, x, y).map_err(err)?;
                ensure((0.0..=d).contains(&gp), || format!("{c:?}: Gromov product {gp} at {x}, {y}"))?;
                for k in 0..pts.len() {
                    let lhs = pot[i] - pot[k];
                    let rhs = cxy + (pot[j] - pot[k]);
                    ensure(lhs == rhs, || format!("{c:?}: cocycle identity at {x}, {y}, {}", pts[k]))?;
                    triples += 1;
                }
            }
        }
    }
    Ok(triples)
}

fn shadow_stability(g: &MarkedGroup, cocycles: &[Cocycle]) -> Result<usize, String> {
    let pts = enumerate_ball(g, 1, &Budget::default()).map_err(err)?.elements();
    let far: Vec<Element> = enumerate_ball(g, 3, &Budget::default()).map_err(err)?.elements();
    let mut checked = 0;
    for c in cocycles {
        for x in &pts {
            for y in &far {
                for r in 0..=2 {
                    let inner = Shadow::new(x.clone(), y.clone(), r as f64);
                    if !inner.contains(g, c).map_err(err)?.1 {
                        continue;
                    }
                    for x2 in &pts {
                        for y2 in &pts {
                            let y2 = g.multiply(y, y2);
                            let grow = (g.distance(x, x2) + g.distance(y, &y2)) as f64;
                            let outer = Shadow::new(x2.clone(), y2.clone(), r as f64 + grow);
                            ensure(outer.contains(g, c).map_err(err)?.1, || {
                                format!("{c:?}: O_{x}({y}, {r}) not inside the enlarged shadow at {x2}, {y2}")
                            })?;
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}

fn property_suites() -> Outcome {
    let f2 = MarkedGroup::free(2);
    let p = |s: &str| f2.parse(s).map_err(err);
    let tree: Vec<Cocycle> = vec![
        Cocycle::interior(f2.identity()),
        Cocycle::interior(p("abA")?),
        Cocycle::tree_end(TreeEnd::new(f2.identity(), p("a")?).map_err(err)?),
        Cocycle::tree_end(TreeEnd::new(p("B")?, p("aBBa")?).map_err(err)?),
    ];
    let z2 = MarkedGroup::free_abelian(2);
    let flat: Vec<Cocycle> = vec![
        Cocycle::interior(z2.lattice_point(&[2, -1]).map_err(err)?),
        Cocycle::l1(vec![L1Mode::PlusInfinity, L1Mode::MinusInfinity]),
        Cocycle::l1(vec![L1Mode::Anchor(1), L1Mode::PlusInfinity]),
    ];
    let triples = exhaustive_cocycles(&f2, &tree)? + exhaustive_cocycles(&z2, &flat)?;
    let stable = shadow_stability(&f2, &tree)? + shadow_stability(&z2, &flat)?;
    let h = harnack_samples(&f2, 500, 1.2, 7).map_err(err)?;
    ensure(h.samples == 500 && h.failures == 0, || format!("Harnack: {} failures of {}", h.failures, h.samples))?;
    let spaces: Vec<Vec<i128>> = vec![vec![1, 1], vec![1, 2], vec![1, 1, 1], vec![1, 2, 3], vec![4, 2, 1, 1]];
    let families = kochen_stone_oracle::check_all(&spaces);
    Ok(format!(
        "{triples} cocycle triples, {stable} shadow inclusions, 500 Harnack samples, {families} Kochen–Stone families"
    ))
}

fn negative_control() -> Outcome {
    let z2 = MarkedGroup::free_abelian(2);
    let axis = SubsetWindow::orbit(&z2, &z2.lattice_point(&[1, 0]).map_err(err)?, 6);
    let cert = check_contracting(&z2, &axis, 1, 6, &Budget::default()).map_err(err)?;
    let ContractionOutcome::Fail { geodesic, distance_to_set, projection_diameter } = cert.outcome else {
        return Err("the x-axis passed the contraction check".into());
    };
    let ends = (&geodesic[0], &geodesic[geodesic.len() - 1]);
    ensure(z2.distance(ends.0, ends.1) == geodesic.len() - 1, || "witness is not a geodesic".into())?;
    ensure(geodesic.windows(2).all(|e| z2.distance(&e[0], &e[1]) == 1), || "witness is not a path".into())?;
    ensure(geodesic.iter().all(|v| axis.distance_to(&z2, v) >= 1), || "witness touches the axis".into())?;
    ensure(distance_to_set >= 1 && projection_diameter > 1, || "witness does not violate".into())?;
    let start = Instant::now();
    let v = detect_contracting(&z2, &z2.lattice_point(&[1, 0]).map_err(err)?, 6, 1, &Budget::default()).map_err(err)?;
    ensure(!v.is_contracting(), || "(1,0) accepted".into())?;
    let f2 = MarkedGroup::free(2);
    let elems = enumerate_ball(&f2, 3, &Budget::default()).map_err(err)?.elements();
    for window in 4..=6 {
        for g in elems.iter().skip(1) {
            let v = detect_contracting(&f2, g, window, 1, &Budget::default()).map_err(err)?;
            ensure(v.is_contracting(), || format!("{g} rejected at window {window}"))?;
        }
    }
    Ok(format!(
        "Z² axis fails via a {}-vertex geodesic at distance {distance_to_set} with projection diameter {projection_diameter}; \
         {} nontrivial F₂ elements accepted at windows 4..=6 in {:.1}s",
        geodesic.len(),
        elems.len() - 1,
        start.elapsed().as_secs_f64()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("free-group sphere exactness", free_sphere_exactness),
        ("tree shadow lemma sharpness", tree_shadow_sharpness),
        ("tree conformality", tree_conformality),
        ("Poincaré divergence classification", divergence_classification),
        ("normal subgroup of F₂ with quotient Z²", normal_subgroup),
        ("Grigorchuk trend", grigorchuk_trend),
        ("SPR sanity", spr_sanity),
        ("Vitali self-check", vitali_self_check),
        ("property suites", property_suites),
        ("negative-control geometry", negative_control),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
