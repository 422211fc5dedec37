use num_bigint::BigInt;
use num_rational::BigRational;
use psgrowth_core::densities::{
    atomic_annulus_check, atomic_harnack_check, density_pushforward, kochen_stone_check, patterson_approximant,
    twisted_exponent, vitali_select, AtomicDensity, DensityFamily, KochenStoneVerdict, PattersonWeight,
    QuasiMorphism, SetSequence, TreeEndDensity,
};
use psgrowth_core::spaces::{enumerate_ball, log_add, Budget, Element, Letter, MarkedGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{LabError, Result};
use crate::report::{real, text, ExperimentReport, Table};

fn random_reduced(rng: &mut ChaCha8Rng, group: &MarkedGroup, prefix: &Element, len: usize) -> Element {
    let letters: Vec<Letter> = group.letters().collect();
    let mut w = prefix.letters().to_vec();
    while w.len() < len {
        let x = letters[rng.random_range(0..letters.len())];
        if w.last() != Some(&x.inverse()) {
            w.push(x);
        }
    }
    Element::from_letters(w)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConformalitySweep {
    pub pairs: usize,
    pub cylinders: usize,
    pub max_error: f64,
    pub shallow: usize,
}

/// Conformality on every pair `x, y ∈ B(o, radius)` and every cylinder of
/// depth `|x| + |y| + 1` and `|x| + |y| + 2`.
pub fn conformality_sweep(tree: &TreeEndDensity, radius: usize) -> Result<ConformalitySweep> {
    let ball = enumerate_ball(tree.group(), radius, &Budget::default())?;
    let elems = ball.elements();
    let mut out = ConformalitySweep::default();
    let max_depth = 2 * radius + 2;
    let levels: Vec<Vec<Element>> = (0..=max_depth).map(|d| tree.cylinders(d)).collect();
    for x in &elems {
        for y in &elems {
            out.pairs += 1;
            let d = x.len() + y.len() + 1;
            for depth in d..=d + 1 {
                for row in tree.conformality_check(x, y, &levels[depth]) {
                    out.cylinders += 1;
                    match row.error {
                        Some(e) => out.max_error = out.max_error.max(e),
                        None => out.shallow += 1,
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HarnackSamples {
    pub samples: usize,
    pub failures: usize,
}

/// Harnack on random `(x, y, A)`: `x, y ∈ B(o, 3)`, `A` a union of up to three
/// cylinders of depth at most 4. Half the samples use the exact tree density,
/// half an atomic approximant at `s` where `A` is read on atoms by prefix.
pub fn harnack_samples(group: &MarkedGroup, samples: usize, s: f64, seed: u64) -> Result<HarnackSamples> {
    let tree = TreeEndDensity::new(group)?;
    let fam = patterson_approximant(group, s, 5, &PattersonWeight::constant(), &QuasiMorphism::Zero, &Budget::default())?;
    let pts = enumerate_ball(group, 3, &Budget::default())?.elements();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = HarnackSamples::default();
    for i in 0..samples {
        let x = pts[rng.random_range(0..pts.len())].clone();
        let y = pts[rng.random_range(0..pts.len())].clone();
        let parts: Vec<Element> = (0..rng.random_range(1..=3))
            .map(|_| {
                let len = rng.random_range(1..=4);
                random_reduced(&mut rng, group, &Element::identity(), len)
            })
            .collect();
        let ok = if i % 2 == 0 {
            tree.harnack_check(&x, &y, &parts).2
        } else {
            let set = |p: &Element| parts.iter().any(|c| p.starts_with(c));
            atomic_harnack_check(&fam, &x, &y, s, &set).2
        };
        out.samples += 1;
        out.failures += usize::from(!ok);
    }
    Ok(out)
}

/// A random family of tree shadows `(g, r)` with `|g| >= L > r + 16α`.
pub fn random_vitali_family(rng: &mut ChaCha8Rng, group: &MarkedGroup, alpha: usize) -> (Vec<(Element, usize)>, usize) {
    let r = rng.random_range(0..=3);
    let l = r + 16 * alpha + 1 + rng.random_range(0..=2);
    let pool: Vec<Element> = (0..rng.random_range(1..=4))
        .map(|_| {
            let len = rng.random_range(0..=l);
            random_reduced(rng, group, &Element::identity(), len)
        })
        .collect();
    let family = (0..rng.random_range(1..=12))
        .map(|_| {
            let base = &pool[rng.random_range(0..pool.len())];
            let len = rng.random_range(l..=l + 4).max(base.len());
            (random_reduced(rng, group, base, len), r)
        })
        .collect();
    (family, l)
}

/// Runs [`vitali_select`] on `trials` random families and counts failed self-checks.
pub fn vitali_trials(group: &MarkedGroup, trials: usize, alpha: usize, seed: u64) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let (family, l) = random_vitali_family(&mut rng, group, alpha);
        let rep = vitali_select(group, &family, alpha, l)?;
        failures += usize::from(!(rep.disjoint && rep.covered));
    }
    Ok((trials, failures))
}

fn sorted_atoms(nu: &AtomicDensity) -> Vec<(Element, f64)> {
    let mut v: Vec<(Element, f64)> = nu.atoms.iter().map(|a| (a.word.clone(), a.log_weight)).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// `max |ln (ν^g)^h_o − ln ν^{gh}_o|` over atoms, `None` if the supports differ.
pub fn right_action_error(family: &dyn DensityFamily, g: &Element, h: &Element) -> Option<f64> {
    let group = family.group();
    let pg = density_pushforward(family, g);
    let lhs = density_pushforward(&pg, h).at(&group.identity());
    let rhs = density_pushforward(family, &group.multiply(g, h)).at(&group.identity());
    let (a, b) = (sorted_atoms(&lhs), sorted_atoms(&rhs));
    if a.len() != b.len() || a.iter().zip(&b).any(|(p, q)| p.0 != q.0) {
        return None;
    }
    Some(a.iter().zip(&b).map(|(p, q)| (p.1 - q.1).abs()).fold(0.0, f64::max))
}

pub fn run_density(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let group = MarkedGroup::from_spec(&cfg.group)?;
    if !group.is_free() {
        return Err(LabError::Config("the density experiment needs a free group".into()));
    }
    let p = &cfg.params;
    let radius = cfg.radius_or(8);
    let atomic_radius = p.atomic_radius.unwrap_or(5);
    let samples = p.samples.unwrap_or(500);
    let alpha = p.alpha.unwrap_or(1);
    let s_grid = if p.s_grid.is_empty() { vec![1.2] } else { p.s_grid.clone() };
    let theta = p.theta.clone().unwrap_or_default();
    let chi = p.chi.clone().unwrap_or(QuasiMorphism::Homomorphism { weights: vec![1.0] });
    let tree = TreeEndDensity::new(&group)?;
    let omega = tree.omega();
    let mut rep = ExperimentReport::new(
        ExperimentKind::Density,
        "Patterson densities are ω-conformal, satisfy Harnack bounds and the shadow and covering lemmas.",
        cfg,
    );

    let conf = conformality_sweep(&tree, 2)?;
    rep.headline("conformality_max_error", conf.max_error);
    rep.verdict(
        "conformality",
        format!(
            "tree-end density: ν_x(C)/ν_y(C) = e^{{−ω c(x,y)}} exactly on {} cylinders of depth >= |x|+|y|+1, x, y in B(o, 2)",
            conf.cylinders
        ),
        conf.max_error == 0.0 && conf.shallow == 0,
        None,
    );

    let h = harnack_samples(&group, samples, s_grid[0], cfg.seed)?;
    rep.verdict(
        "harnack",
        format!("ν_x(A) <= e^{{ω d(x,y)}} ν_y(A) on {} sampled (x, y, A)", h.samples),
        h.failures == 0,
        None,
    );

    let mut atomic = Table::new("atomic", &["s", "radius", "mass_o", "log_normalizer", "right_action_error"]);
    let mut worst_norm: f64 = 0.0;
    let mut worst_action: f64 = 0.0;
    let probes: Vec<Element> = ["a", "b", "aB", "ba"].iter().map(|w| group.parse(w)).collect::<Result<_, _>>()?;
    for &s in &s_grid {
        let fam = patterson_approximant(&group, s, atomic_radius, &theta, &QuasiMorphism::Zero, &cfg.budget)?;
        let mass = fam.at(&group.identity()).mass();
        worst_norm = worst_norm.max((mass - 1.0).abs());
        let mut err: f64 = 0.0;
        for g in &probes {
            for h in &probes {
                err = err.max(right_action_error(&fam, g, h).unwrap_or(f64::INFINITY));
            }
        }
        worst_action = worst_action.max(err);
        atomic.push(vec![s.into(), atomic_radius.into(), real(Some(mass)), real(Some(fam.log_normalizer())), real(Some(err))]);
    }
    rep.verdict(
        "normalization",
        format!("‖ν_o‖ = 1 within 1e-12 for s in {s_grid:?} on B(o, {atomic_radius})"),
        worst_norm <= 1e-12,
        Some(worst_norm),
    );
    rep.verdict(
        "right_action",
        "(ν^g)^h = ν^{gh} at o within 1e-9 for g, h in {a, b, aB, ba}".into(),
        worst_action <= 1e-9,
        Some(worst_action),
    );

    let tw = twisted_exponent(&group, &chi, radius)?;
    let defect = chi.defect(&group, 3, &cfg.budget)?;
    rep.headline("omega_chi", tw.omega);
    rep.headline("omega_minus_chi", tw.omega_negated);
    rep.headline("chi_defect", defect);
    rep.verdict(
        "twisted_symmetry",
        format!("|ω̂_χ({radius}) − ω̂_{{−χ}}({radius})| <= 1e-9"),
        (tw.omega - tw.omega_negated).abs() <= 1e-9,
        Some((tw.omega - tw.omega_negated).abs()),
    );
    let s0 = omega + 0.5;
    let (mut pp, mut pm) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut two_sided = true;
    for l in 0..=radius {
        pp = log_add(pp, tw.log_sphere_sums[l] - s0 * l as f64);
        pm = log_add(pm, tw.log_sphere_sums_negated[l] - s0 * l as f64);
        two_sided &= (pm - pp).abs() <= 2.0 * defect + 1e-9;
    }
    rep.verdict(
        "twisted_two_sided",
        format!("e^{{−2C}} P_χ <= P_{{−χ}} <= e^{{2C}} P_χ on partial sums to radius {radius} at s = {s0}, C = sampled defect"),
        two_sided,
        None,
    );

    let mut annulus = Table::new("annulus", &["model", "l", "a", "sphere_sum", "outside_mass", "ratio"]);
    for l in 0..=radius {
        let row = tree.annulus_bound_check(l as f64, 0.5);
        annulus.push(vec![text("tree"), l.into(), 0.5.into(), real(Some(row.sphere_sum)), real(Some(row.outside_mass)), real(Some(row.ratio))]);
    }
    let fam = patterson_approximant(&group, s_grid[0], atomic_radius, &theta, &QuasiMorphism::Zero, &cfg.budget)?;
    for l in 0..atomic_radius {
        let row = atomic_annulus_check(&fam, s_grid[0], l as f64, 0.5, &cfg.budget)?;
        annulus.push(vec![text("atomic"), l.into(), 0.5.into(), real(Some(row.sphere_sum)), real(Some(row.outside_mass)), real(Some(row.ratio))]);
    }

    let mut decay = Table::new("atom_mass_decay", &["depth", "max_cylinder_mass"]);
    for l in 0..=radius {
        decay.push(vec![l.into(), text(tree.max_atom_mass(l))]);
    }

    let trials = p.samples.map_or(200, |n| n.min(200));
    let (runs, failures) = vitali_trials(&group, trials, alpha, cfg.seed)?;
    rep.verdict(
        "vitali",
        format!("{runs} random shadow families with L > r + 16α: selections disjoint and r + 42α enlargements cover"),
        failures == 0,
        None,
    );

    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    let ks = kochen_stone_check(
        &vec![quarter; 4],
        &SetSequence {
            prefix: vec![],
            period: vec![vec![0, 1], vec![2, 3]],
        },
    )?;
    let mut kst = Table::new("kochen_stone", &["example", "c", "bound", "limsup_mass", "verdict"]);
    kst.push(vec![
        text("alternating halves, uniform on 4 atoms"),
        text(&ks.c),
        real(Some(ks.bound)),
        text(&ks.limsup_mass),
        text(format!("{:?}", ks.verdict)),
    ]);
    rep.verdict(
        "kochen_stone",
        "alternating halves: μ(limsup B_n) >= 1/C".into(),
        ks.verdict == KochenStoneVerdict::Holds,
        Some(ks.limsup_mass_value - ks.bound),
    );
    rep.scope(format!(
        "tree-end density exact; atomic approximants on B(o, {atomic_radius}); twisted sums to radius {radius}; seed {}",
        cfg.seed
    ));
    rep.tables.push(atomic);
    rep.tables.push(annulus);
    rep.tables.push(decay);
    rep.tables.push(kst);
    Ok(rep)
}
