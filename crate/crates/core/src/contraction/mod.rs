//! Nearest-point projections and finite-window contraction certificates.
//!
//! A set `Y` is α-contracting when every geodesic `γ` with `d(γ, Y) >= α`
//! satisfies `diam π_Y(γ) <= α`. Certificates here only cover geodesics
//! whose vertices lie in a ball `B(o, window)`; they never claim the global
//! property.

mod element;
mod tails;

pub use element::{
    combine_contracting, contracting_extension, detect_contracting, ContractingElementWitness,
    ContractingVerdict, ExtensionWitness, NotContracting,
};
pub use tails::{contracting_tail_members, TailScope, TailSearcher, TailWitness};

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::Result;
use crate::spaces::{enumerate_ball, geodesic, Budget, Element, MarkedGroup};

/// Finite set of points, typically an orbit segment or a quasi-axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetWindow {
    /// Distinct points in shortlex order.
    pub points: Vec<Element>,
    /// Index radius `W` the set was built with.
    pub window: usize,
}

impl SubsetWindow {
    pub fn from_points(mut points: Vec<Element>, window: usize) -> Self {
        points.sort();
        points.dedup();
        assert!(!points.is_empty(), "a subset window needs at least one point");
        SubsetWindow { points, window }
    }

    /// `{gⁿ : |n| <= window}`.
    pub fn orbit(group: &MarkedGroup, g: &Element, window: usize) -> Self {
        let w = window as i64;
        let pts = (-w..=w).map(|n| group.pow(g, n)).collect();
        Self::from_points(pts, window)
    }

    /// `⋃_{|n| <= window} gⁿ·[o, g·o]`: the orbit segment joined by translates
    /// of one geodesic.
    pub fn quasi_axis(group: &MarkedGroup, g: &Element, window: usize) -> Self {
        let w = window as i64;
        let seg = geodesic(group, &group.identity(), g);
        let mut pts = Vec::new();
        for n in -w..=w {
            let gn = group.pow(g, n);
            if n == w {
                pts.push(gn);
            } else {
                pts.extend(seg.iter().map(|v| group.multiply(&gn, v)));
            }
        }
        Self::from_points(pts, window)
    }

    /// `u·Y`.
    pub fn translate(&self, group: &MarkedGroup, u: &Element) -> Self {
        Self::from_points(
            self.points.iter().map(|p| group.multiply(u, p)).collect(),
            self.window,
        )
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.points.binary_search(x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `d(x, Y)`.
    pub fn distance_to(&self, group: &MarkedGroup, x: &Element) -> usize {
        self.points
            .iter()
            .map(|p| group.distance(x, p))
            .min()
            .expect("window is nonempty")
    }
}

/// All nearest points of `Y` to `x`, in shortlex order.
pub fn project(group: &MarkedGroup, x: &Element, y: &SubsetWindow) -> Vec<Element> {
    project_indices(group, x, y)
        .1
        .into_iter()
        .map(|i| y.points[i].clone())
        .collect()
}

fn project_indices(group: &MarkedGroup, x: &Element, y: &SubsetWindow) -> (usize, Vec<usize>) {
    let mut best = usize::MAX;
    let mut out = Vec::new();
    for (i, p) in y.points.iter().enumerate() {
        let d = group.distance(x, p);
        if d < best {
            best = d;
            out.clear();
        }
        if d == best {
            out.push(i);
        }
    }
    (best, out)
}

/// Diameter of a finite set of points.
pub fn diameter(group: &MarkedGroup, points: &[Element]) -> usize {
    let mut d = 0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(group.distance(p, q));
        }
    }
    d
}

/// `diam π_Y(Z)` for a finite `Z`.
pub fn projection_diameter(group: &MarkedGroup, z: &[Element], y: &SubsetWindow) -> usize {
    let mut proj: Vec<Element> = z.iter().flat_map(|x| project(group, x, y)).collect();
    proj.sort();
    proj.dedup();
    diameter(group, &proj)
}

/// Result of a contraction check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ContractionOutcome {
    Pass,
    Fail {
        /// A geodesic with `d(γ, Y) >= α` and `diam π_Y(γ) > α`.
        geodesic: Vec<Element>,
        distance_to_set: usize,
        projection_diameter: usize,
    },
}

/// Window-relative contraction certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionCertificate {
    pub alpha: usize,
    /// Every geodesic with all vertices in `B(o, verified_window)` was covered.
    pub verified_window: usize,
    pub set_size: usize,
    pub outcome: ContractionOutcome,
}

impl ContractionCertificate {
    pub fn passed(&self) -> bool {
        self.outcome == ContractionOutcome::Pass
    }
}

/// Checks α-contraction of `Y` against all geodesics inside `B(o, window)`.
///
/// Exact for any Cayley graph: a geodesic violates the bound iff some pair of
/// its vertices `(p, q)` does, and a pair is joined by an α-far geodesic iff
/// the breadth-first distance inside the α-far part of the ball equals `d(p, q)`.
pub fn check_contracting(
    group: &MarkedGroup,
    y: &SubsetWindow,
    alpha: usize,
    window: usize,
    budget: &Budget,
) -> Result<ContractionCertificate> {
    let ball = enumerate_ball(group, window, budget)?;
    let els = ball.elements();
    let n = els.len();
    let ny = y.points.len();
    let mut ydist = vec![0usize; ny * ny];
    for i in 0..ny {
        for j in 0..ny {
            ydist[i * ny + j] = group.distance(&y.points[i], &y.points[j]);
        }
    }
    let diam_of = |set: &BTreeSet<usize>| {
        let v: Vec<usize> = set.iter().copied().collect();
        let mut d = 0;
        for (k, &i) in v.iter().enumerate() {
            for &j in &v[k + 1..] {
                d = d.max(ydist[i * ny + j]);
            }
        }
        d
    };

    let mut dist = Vec::with_capacity(n);
    let mut proj = Vec::with_capacity(n);
    for e in &els {
        let (d, p) = project_indices(group, e, y);
        dist.push(d);
        proj.push(p);
    }
    let far: Vec<bool> = dist.iter().map(|&d| d >= alpha).collect();
    let neighbours: Vec<Vec<usize>> = els
        .iter()
        .map(|e| {
            group
                .letters()
                .filter_map(|x| ball.index_of(&group.mul_letter(e, x)))
                .collect()
        })
        .collect();

    // connected components of the α-far part
    let mut comp = vec![usize::MAX; n];
    let mut bad_components = Vec::new();
    let mut ncomp = 0;
    for s in 0..n {
        if !far[s] || comp[s] != usize::MAX {
            continue;
        }
        let mut members = vec![s];
        let mut union: BTreeSet<usize> = BTreeSet::new();
        comp[s] = ncomp;
        let mut k = 0;
        while k < members.len() {
            let v = members[k];
            union.extend(proj[v].iter().copied());
            for &w in &neighbours[v] {
                if far[w] && comp[w] == usize::MAX {
                    comp[w] = ncomp;
                    members.push(w);
                }
            }
            k += 1;
        }
        if diam_of(&union) > alpha {
            bad_components.push(ncomp);
        }
        ncomp += 1;
    }

    let pass = ContractionCertificate {
        alpha,
        verified_window: window,
        set_size: ny,
        outcome: ContractionOutcome::Pass,
    };
    if bad_components.is_empty() {
        return Ok(pass);
    }
    let mut dfar = vec![usize::MAX; n];
    let mut pred = vec![usize::MAX; n];
    for p in 0..n {
        if !far[p] || !bad_components.contains(&comp[p]) {
            continue;
        }
        let mut order = vec![p];
        dfar[p] = 0;
        let mut queue = VecDeque::from([p]);
        while let Some(v) = queue.pop_front() {
            for &w in &neighbours[v] {
                if far[w] && dfar[w] == usize::MAX {
                    dfar[w] = dfar[v] + 1;
                    pred[w] = v;
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        let mut found = None;
        for &q in &order {
            if dfar[q] != group.distance(&els[p], &els[q]) {
                continue;
            }
            let union: BTreeSet<usize> = proj[p].iter().chain(&proj[q]).copied().collect();
            if diam_of(&union) > alpha {
                found = Some(q);
                break;
            }
        }
        if let Some(q) = found {
            let mut path = vec![q];
            while *path.last().unwrap() != p {
                path.push(pred[*path.last().unwrap()]);
            }
            path.reverse();
            let union: BTreeSet<usize> = path.iter().flat_map(|&v| proj[v].iter().copied()).collect();
            return Ok(ContractionCertificate {
                alpha,
                verified_window: window,
                set_size: ny,
                outcome: ContractionOutcome::Fail {
                    distance_to_set: path.iter().map(|&v| dist[v]).min().unwrap_or(0),
                    projection_diameter: diam_of(&union),
                    geodesic: path.into_iter().map(|v| els[v].clone()).collect(),
                },
            });
        }
        for &v in &order {
            dfar[v] = usize::MAX;
        }
    }
    Ok(pass)
}

/// First and last positions of `γ` inside the closed α-neighbourhood of `Y`.
pub fn entry_exit(
    group: &MarkedGroup,
    gamma: &[Element],
    y: &SubsetWindow,
    alpha: usize,
) -> Option<(usize, usize)> {
    let near: Vec<usize> = gamma
        .iter()
        .enumerate()
        .filter(|(_, v)| y.distance_to(group, v) <= alpha)
        .map(|(i, _)| i)
        .collect();
    Some((*near.first()?, *near.last()?))
}

/// Entry/exit points of a geodesic `[x, z]` compared with the projections of its endpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionLemmaReport {
    pub entry: Option<Element>,
    pub exit: Option<Element>,
    /// `max d(entry, p)` over projections `p` of `x`.
    pub entry_gap: Option<usize>,
    /// `max d(exit, q)` over projections `q` of `z`.
    pub exit_gap: Option<usize>,
    /// `min d(p, q)` over projection pairs.
    pub projection_distance: usize,
    /// `d(x,z) − [d(x,p) + d(p,q) + d(q,z)]`, minimized over projection pairs.
    pub slack: i64,
    /// Gaps are at most `2α` when the projections are more than `α` apart.
    pub holds: bool,
}

/// Evaluates the entry/exit behaviour of the canonical geodesic from `x` to `z`.
pub fn projection_lemma_check(
    group: &MarkedGroup,
    x: &Element,
    z: &Element,
    y: &SubsetWindow,
    alpha: usize,
) -> ProjectionLemmaReport {
    let gamma = geodesic(group, x, z);
    let px = project(group, x, y);
    let pz = project(group, z, y);
    let ee = entry_exit(group, &gamma, y, alpha);
    let entry = ee.map(|(i, _)| gamma[i].clone());
    let exit = ee.map(|(_, j)| gamma[j].clone());
    let gap = |v: &Option<Element>, ps: &[Element]| {
        v.as_ref()
            .map(|v| ps.iter().map(|p| group.distance(v, p)).max().unwrap_or(0))
    };
    let entry_gap = gap(&entry, &px);
    let exit_gap = gap(&exit, &pz);
    let mut projection_distance = usize::MAX;
    let mut slack = i64::MAX;
    let dxz = group.distance(x, z) as i64;
    for p in &px {
        for q in &pz {
            let dpq = group.distance(p, q);
            projection_distance = projection_distance.min(dpq);
            let through = group.distance(x, p) + dpq + group.distance(q, z);
            slack = slack.min(dxz - through as i64);
        }
    }
    let holds = projection_distance <= alpha
        || (entry_gap.is_some_and(|g| g <= 2 * alpha) && exit_gap.is_some_and(|g| g <= 2 * alpha));
    ProjectionLemmaReport {
        entry,
        exit,
        entry_gap,
        exit_gap,
        projection_distance,
        slack,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> MarkedGroup {
        MarkedGroup::free(2)
    }

    #[test]
    fn tree_projection_is_branch_point() {
        let g = f2();
        let a = g.parse("a").unwrap();
        let y = SubsetWindow::orbit(&g, &a, 6);
        let x = g.parse("ba^3").unwrap();
        assert_eq!(project(&g, &x, &y), vec![g.identity()]);
        let a2 = g.parse("aa").unwrap();
        assert_eq!(project(&g, &a2, &y), vec![a2]);
    }

    #[test]
    fn lattice_projection_is_coordinate() {
        let z2 = MarkedGroup::free_abelian(2);
        let y = SubsetWindow::orbit(&z2, &z2.parse("a").unwrap(), 6);
        let x = z2.lattice_point(&[3, 4]).unwrap();
        assert_eq!(project(&z2, &x, &y), vec![z2.lattice_point(&[3, 0]).unwrap()]);
    }

    #[test]
    fn axis_in_tree_passes() {
        let g = f2();
        let y = SubsetWindow::orbit(&g, &g.parse("a").unwrap(), 6);
        let cert = check_contracting(&g, &y, 1, 6, &Budget::default()).unwrap();
        assert!(cert.passed());
    }

    #[test]
    fn axis_in_plane_fails() {
        let z2 = MarkedGroup::free_abelian(2);
        let y = SubsetWindow::orbit(&z2, &z2.parse("a").unwrap(), 5);
        let cert = check_contracting(&z2, &y, 1, 5, &Budget::default()).unwrap();
        match cert.outcome {
            ContractionOutcome::Fail {
                geodesic,
                distance_to_set,
                projection_diameter,
            } => {
                assert!(distance_to_set >= 1);
                assert!(projection_diameter > 1);
                assert_eq!(z2.distance(&geodesic[0], geodesic.last().unwrap()), geodesic.len() - 1);
                assert!(geodesic.iter().all(|v| v.len() <= 5));
            }
            ContractionOutcome::Pass => panic!("flat axis must fail"),
        }
    }

    #[test]
    fn whole_ball_passes_vacuously() {
        let g = f2();
        let ball = enumerate_ball(&g, 3, &Budget::default()).unwrap();
        let y = SubsetWindow::from_points(ball.elements(), 3);
        for alpha in 1..=3 {
            assert!(check_contracting(&g, &y, alpha, 3, &Budget::default()).unwrap().passed());
        }
    }

    #[test]
    fn entry_and_exit() {
        let g = f2();
        let y = SubsetWindow::orbit(&g, &g.parse("a").unwrap(), 6);
        let gamma = geodesic(&g, &g.identity(), &g.parse("aaa").unwrap());
        assert_eq!(entry_exit(&g, &gamma, &y, 0), Some((0, 3)));
        let off = geodesic(&g, &g.parse("bb").unwrap(), &g.parse("bbb").unwrap());
        assert_eq!(entry_exit(&g, &off, &y, 1), None);
        let rep = projection_lemma_check(&g, &g.parse("b").unwrap(), &g.parse("aaB").unwrap(), &y, 1);
        assert!(rep.holds);
        assert_eq!(rep.entry_gap, Some(1));
        assert_eq!(rep.exit_gap, Some(1));
        assert_eq!(rep.slack, 0);
    }
}
