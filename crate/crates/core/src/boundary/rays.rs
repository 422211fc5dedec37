//! Gradient rays, cocycle projections and limit sets.

use serde::Serialize;

use super::{gromov_product, Cocycle, TreeEnd};
use crate::contraction::{TailScope, TailSearcher, TailWitness};
use crate::error::{Error, Result};
use crate::spaces::{Budget, Element, MarkedGroup};

/// A path along which `c` decreases at (almost) unit speed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientRay {
    pub start: Element,
    pub vertices: Vec<Element>,
    /// Smallest `ε` with `(t − s) − ε <= c(γ(s), γ(t))` on the path.
    pub epsilon: f64,
}

/// Greedy descent: each step moves to the neighbour maximizing `c(current, next)`,
/// ties broken by generator order.
pub fn gradient_ray(group: &MarkedGroup, c: &Cocycle, x: &Element, length: usize) -> Result<GradientRay> {
    if let Cocycle::Interior { z } = c {
        let d = group.distance(x, z);
        if d < length {
            return Err(Error::Precondition(format!(
                "a gradient arc toward {z} from {x} has length at most {d}"
            )));
        }
    }
    let mut vertices = vec![x.clone()];
    let mut pots = vec![c.potential(group, x)?];
    for _ in 0..length {
        let cur = vertices.last().expect("nonempty").clone();
        let mut best: Option<(f64, Element)> = None;
        for l in group.letters() {
            let next = group.mul_letter(&cur, l);
            let h = match c.potential(group, &next) {
                Ok(h) => h,
                Err(Error::OutOfWindow(_)) => continue,
                Err(e) => return Err(e),
            };
            if best.as_ref().is_none_or(|(bh, _)| h < *bh) {
                best = Some((h, next));
            }
        }
        let (h, next) = best.ok_or_else(|| {
            Error::OutOfWindow(format!("no neighbour of {cur} inside the cocycle window"))
        })?;
        vertices.push(next);
        pots.push(h);
    }
    let mut epsilon: f64 = 0.0;
    for s in 0..pots.len() {
        for t in s + 1..pots.len() {
            epsilon = epsilon.max((t - s) as f64 - (pots[s] - pots[t]));
        }
    }
    Ok(GradientRay {
        start: x.clone(),
        vertices,
        epsilon,
    })
}

/// Projection of a cocycle onto an ordered window `y_0, …, y_m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum CocycleProjection {
    /// All `q` with `c(q, y) <= 0` for every `y` in the window.
    Points { points: Vec<Element> },
    /// The potential decreases monotonically into one rim of the window;
    /// `forward` is true for the end `y_m`. Window-relative.
    AtInfinity { forward: bool },
}

/// Projects `c` onto the ordered window `seq`.
///
/// Admissible points are the minimizers of `H = c(·, o)` on the window.
/// For boundary cocycles, a minimizer inside the last `⌈W/3⌉` entries of
/// either rim, reached by a strictly monotone trend, is reported as AT-INFINITY.
pub fn project_cocycle(group: &MarkedGroup, c: &Cocycle, seq: &[Element]) -> Result<CocycleProjection> {
    if seq.is_empty() {
        return Err(Error::Precondition("empty window".into()));
    }
    let h: Vec<f64> = seq
        .iter()
        .map(|y| c.potential(group, y))
        .collect::<Result<_>>()?;
    let min = h.iter().copied().fold(f64::INFINITY, f64::min);
    let arg: Vec<usize> = (0..seq.len()).filter(|&i| h[i] <= min + 1e-9).collect();
    if !matches!(c, Cocycle::Interior { .. }) && seq.len() >= 3 {
        let m = seq.len() - 1;
        let band = (m / 2).div_ceil(3).max(1);
        let forward = arg.iter().all(|&i| i >= m - band)
            && h[m - band..].windows(2).all(|w| w[1] < w[0]);
        let backward = arg.iter().all(|&i| i <= band) && h[..=band].windows(2).all(|w| w[0] < w[1]);
        if forward || backward {
            return Ok(CocycleProjection::AtInfinity { forward });
        }
    }
    let mut points: Vec<Element> = arg.into_iter().map(|i| seq[i].clone()).collect();
    points.sort();
    points.dedup();
    Ok(CocycleProjection::Points { points })
}

/// Which limit set is tested.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LimitKind {
    Radial { r: f64 },
    Contracting { alpha: usize, r: f64, l: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitWitness {
    pub g: Element,
    /// `⟨o, c⟩_g`.
    pub product: f64,
    pub tail: Option<TailWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitThreshold {
    pub t: usize,
    /// `None` is FAIL at this threshold.
    pub witness: Option<LimitWitness>,
}

/// For each `t <= horizon`, a `g` with `d(o, g·o) >= t` whose shadow
/// `O_o(g·o, r)` contains `c` (and, for the contracting limit set, with an
/// `(α, L)`-contracting tail). Candidates are the vertices of the gradient
/// ray from `o`.
pub fn limit_set_membership(
    group: &MarkedGroup,
    c: &Cocycle,
    kind: LimitKind,
    horizon: usize,
    budget: &Budget,
) -> Result<Vec<LimitThreshold>> {
    if !c.is_exact() {
        return Err(Error::Unsupported("limit sets need an exact-model cocycle".into()));
    }
    let o = group.identity();
    let (r, min_len) = match kind {
        LimitKind::Radial { r } => (r, 0),
        LimitKind::Contracting { r, l, .. } => (r, l),
    };
    let length = match c {
        Cocycle::Interior { z } => group.distance(&o, z).min(horizon + min_len),
        _ => horizon + min_len,
    };
    let ray = gradient_ray(group, c, &o, length)?;
    let mut searcher = match kind {
        LimitKind::Contracting { alpha, .. } => Some(TailSearcher::new(
            group.clone(),
            alpha,
            TailScope::Canonical,
            *budget,
        )),
        LimitKind::Radial { .. } => None,
    };
    let mut out = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let mut witness = None;
        for g in &ray.vertices {
            if g.len() < t.max(min_len) {
                continue;
            }
            let product = gromov_product(group, c, &o, g)?;
            if product > r + 1e-9 {
                continue;
            }
            let tail = match (&mut searcher, kind) {
                (Some(s), LimitKind::Contracting { l, .. }) => match s.find(g, l)? {
                    Some(t) => Some(t),
                    None => continue,
                },
                _ => None,
            };
            witness = Some(LimitWitness {
                g: g.clone(),
                product,
                tail,
            });
            break;
        }
        out.push(LimitThreshold { t, witness });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransverseReport {
    /// No candidate end is AT-INFINITY for both windows.
    pub transverse: bool,
    /// Each candidate end with its AT-INFINITY status on `A` and on `uA`.
    pub ends: Vec<(TreeEnd, bool, bool)>,
    pub window: usize,
}

/// Compares `∂⁺A` and `∂⁺(uA)` for `A = ⟨h⟩·o` in a free group, using the
/// ends `h^{±∞}` and `u·h^{±∞}` as candidates.
pub fn transverse_pair_check(group: &MarkedGroup, h: &Element, u: &Element, window: usize) -> Result<TransverseReport> {
    if !group.is_free() {
        return Err(Error::Unsupported("transverse pairs are decided on trees only".into()));
    }
    let w = window as i64;
    let a: Vec<Element> = (-w..=w).map(|n| group.pow(h, n)).collect();
    let ua: Vec<Element> = a.iter().map(|p| group.multiply(u, p)).collect();
    let mut candidates = Vec::new();
    for positive in [true, false] {
        let e = TreeEnd::of_power(group, h, positive)?;
        candidates.push(e.translate(group, u)?);
        candidates.push(e);
    }
    candidates.sort_by(|x, y| (&x.prefix, &x.period).cmp(&(&y.prefix, &y.period)));
    candidates.dedup();
    let at_inf = |e: &TreeEnd, seq: &[Element]| -> Result<bool> {
        Ok(matches!(
            project_cocycle(group, &Cocycle::tree_end(e.clone()), seq)?,
            CocycleProjection::AtInfinity { .. }
        ))
    };
    let mut ends = Vec::new();
    for e in candidates {
        let (p, q) = (at_inf(&e, &a)?, at_inf(&e, &ua)?);
        ends.push((e, p, q));
    }
    Ok(TransverseReport {
        transverse: ends.iter().all(|(_, p, q)| !(*p && *q)),
        ends,
        window,
    })
}
