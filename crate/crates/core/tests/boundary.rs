use proptest::prelude::*;
use psgrowth_core::boundary::{gromov_product, Cocycle, L1Mode, Shadow, TreeEnd};
use psgrowth_core::spaces::{enumerate_ball, Budget, Element, Letter, MarkedGroup};

fn tree_cocycles(g: &MarkedGroup, window: &[Element]) -> Vec<Cocycle> {
    let p = |s: &str| g.parse(s).unwrap();
    vec![
        Cocycle::interior(g.identity()),
        Cocycle::interior(p("abA")),
        Cocycle::interior(p("b^5")),
        Cocycle::tree_end(TreeEnd::new(g.identity(), p("a")).unwrap()),
        Cocycle::tree_end(TreeEnd::new(p("bA"), p("Ab")).unwrap()),
        Cocycle::tree_end(TreeEnd::new(p("B"), p("aBBa")).unwrap()),
        Cocycle::window_from_interior(g, &p("aab"), window.to_vec(), 3),
    ]
}

fn lattice_cocycles(g: &MarkedGroup, window: &[Element]) -> Vec<Cocycle> {
    use L1Mode::*;
    vec![
        Cocycle::interior(g.lattice_point(&[2, -1]).unwrap()),
        Cocycle::l1(vec![PlusInfinity, PlusInfinity]),
        Cocycle::l1(vec![MinusInfinity, Anchor(0)]),
        Cocycle::l1(vec![Anchor(2), Anchor(-3)]),
        Cocycle::l1(vec![Anchor(1), MinusInfinity]),
        Cocycle::window_from_interior(g, &g.lattice_point(&[-1, 2]).unwrap(), window.to_vec(), 3),
    ]
}

fn exhaustive_checks(g: &MarkedGroup, cocycles: &[Cocycle], pts: &[Element]) {
    for c in cocycles {
        let pot: Vec<f64> = pts.iter().map(|x| c.potential(g, x).unwrap()).collect();
        for (i, x) in pts.iter().enumerate() {
            for (j, y) in pts.iter().enumerate() {
                let cxy = c.evaluate(g, x, y).unwrap();
                let d = g.distance(x, y) as f64;
                assert_eq!(cxy, pot[i] - pot[j]);
                assert!(cxy.abs() <= d + 1e-12, "{c:?} not 1-Lipschitz at {x}, {y}");
                let gp = gromov_product(g, c, x, y).unwrap();
                assert!((-1e-12..=d + 1e-12).contains(&gp), "{c:?}: ⟨{x},c⟩_{y} = {gp}");
                for (k, z) in pts.iter().enumerate() {
                    let cyz = pot[j] - pot[k];
                    let cxz = c.evaluate(g, x, z).unwrap();
                    assert_eq!(cxz, cxy + cyz, "cocycle identity for {c:?}");
                }
            }
        }
    }
}

#[test]
fn cocycle_identity_and_lipschitz_on_radius_three_tree() {
    let g = MarkedGroup::free(2);
    let pts = enumerate_ball(&g, 3, &Budget::default()).unwrap().elements();
    exhaustive_checks(&g, &tree_cocycles(&g, &pts), &pts);
}

#[test]
fn cocycle_identity_and_lipschitz_on_radius_three_lattice() {
    let g = MarkedGroup::free_abelian(2);
    let pts = enumerate_ball(&g, 3, &Budget::default()).unwrap().elements();
    exhaustive_checks(&g, &lattice_cocycles(&g, &pts), &pts);
}

#[test]
fn deep_shadows_are_locally_determined() {
    let g = MarkedGroup::free(2);
    let (big_r, r, alpha) = (3usize, 1usize, 1.0);
    let ball = enumerate_ball(&g, big_r, &Budget::default()).unwrap().elements();
    let base = g.parse("abaBBabAAbab^2a^5").unwrap();
    assert!(base.len() > big_r + r + 13);
    let o = g.identity();
    let shadow = Shadow::new(o.clone(), base.clone(), r as f64);
    let tails = ["a", "b", "B", "ab", "bA", "Ba"];
    let ends: Vec<Cocycle> = tails
        .iter()
        .map(|t| {
            let period = g.parse(t).unwrap();
            let prefix = base.prefix(base.len() - r);
            Cocycle::tree_end(TreeEnd::new(prefix, period).unwrap_or_else(|_| {
                TreeEnd::new(base.prefix(base.len() - r), g.parse("b").unwrap()).unwrap()
            }))
        })
        .collect();
    for c in &ends {
        assert!(shadow.contains(&g, c).unwrap().1);
    }
    for c in &ends {
        for d in &ends {
            let sup = ball
                .iter()
                .map(|x| (c.evaluate(&g, x, &o).unwrap() - d.evaluate(&g, x, &o).unwrap()).abs())
                .fold(0.0, f64::max);
            assert!(sup <= 20.0 * alpha);
        }
    }
}

fn word(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0u8..4).prop_map(Letter), 0..=max_len)
}

proptest! {
    #[test]
    fn shadow_basepoint_stability(
        x in word(6), y in word(6), x2 in word(6), y2 in word(6), z in word(10), r in 0u32..4, pick in 0usize..6,
    ) {
        for g in [MarkedGroup::free(2), MarkedGroup::free_abelian(2)] {
            let [x, y, x2, y2, z] = [&x, &y, &x2, &y2, &z].map(|w| g.normal_form(w));
            let pool: Vec<Cocycle> = if g.is_free() {
                tree_cocycles(&g, &[g.identity()]).into_iter().take(6).chain([Cocycle::interior(z.clone())]).collect()
            } else {
                lattice_cocycles(&g, &[g.identity()]).into_iter().take(5).chain([Cocycle::interior(z.clone())]).collect()
            };
            let c = &pool[pick % pool.len()];
            let r = r as f64;
            let inner = Shadow::new(x.clone(), y.clone(), r);
            let outer = Shadow::new(x2.clone(), y2.clone(), r + (g.distance(&x, &x2) + g.distance(&y, &y2)) as f64);
            if inner.contains(&g, c).unwrap().1 {
                prop_assert!(outer.contains(&g, c).unwrap().1);
            }
        }
    }

    #[test]
    fn random_cocycle_bounds(x in word(10), y in word(10), prefix in word(5), period in word(4)) {
        let g = MarkedGroup::free(2);
        let (x, y) = (g.normal_form(&x), g.normal_form(&y));
        let prefix = g.normal_form(&prefix);
        let period = g.normal_form(&period);
        if let Ok(end) = TreeEnd::new(prefix, period) {
            let c = Cocycle::tree_end(end);
            let d = g.distance(&x, &y) as f64;
            prop_assert!(c.evaluate(&g, &x, &y).unwrap().abs() <= d);
            let gp = gromov_product(&g, &c, &x, &y).unwrap();
            prop_assert!(gp >= 0.0 && gp <= d);
        }
    }
}
