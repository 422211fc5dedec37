//! Balls, spheres and geodesics.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::OnceLock;

use serde::Serialize;

use super::group::{MarkedGroup, NfState};
use super::word::{Element, Letter};
use super::Budget;
use crate::error::{Error, Result};

/// Closed ball `B(o, radius)` stored as a breadth-first tree of canonical words.
///
/// Elements are indexed in shortlex order. Element `i > 0` is
/// `element(parent[i])·letter[i]`, which is also the last edge of its
/// canonical geodesic from `o`.
#[derive(Clone, Debug)]
pub struct Ball {
    group: MarkedGroup,
    radius: usize,
    parent: Vec<u32>,
    letter: Vec<Letter>,
    /// `offsets[l]..offsets[l + 1]` is the sphere of radius `l`.
    offsets: Vec<usize>,
    index: OnceLock<HashMap<Element, u32>>,
}

impl Ball {
    pub(crate) fn from_parts(
        group: MarkedGroup,
        radius: usize,
        parent: Vec<u32>,
        letter: Vec<Letter>,
        offsets: Vec<usize>,
    ) -> Self {
        Ball {
            group,
            radius,
            parent,
            letter,
            offsets,
            index: OnceLock::new(),
        }
    }

    pub(crate) fn parts(&self) -> (&[u32], &[Letter], &[usize]) {
        (&self.parent, &self.letter, &self.offsets)
    }

    pub fn group(&self) -> &MarkedGroup {
        &self.group
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Index range of the sphere of radius `l`.
    pub fn sphere_range(&self, l: usize) -> Range<usize> {
        if l > self.radius {
            return self.len()..self.len();
        }
        self.offsets[l]..self.offsets[l + 1]
    }

    pub fn sphere_counts(&self) -> Vec<u128> {
        self.offsets.windows(2).map(|w| (w[1] - w[0]) as u128).collect()
    }

    /// `d(o, g·o)` for the element at `i`.
    pub fn depth(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        (i > 0).then(|| self.parent[i] as usize)
    }

    pub fn element(&self, i: usize) -> Element {
        let mut w = Vec::with_capacity(self.depth(i));
        let mut j = i;
        while j > 0 {
            w.push(self.letter[j]);
            j = self.parent[j] as usize;
        }
        w.reverse();
        Element::from_letters(w)
    }

    /// All elements in index order.
    pub fn elements(&self) -> Vec<Element> {
        let mut out: Vec<Element> = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            if i == 0 {
                out.push(Element::identity());
            } else {
                let mut w = out[self.parent[i] as usize].letters().to_vec();
                w.push(self.letter[i]);
                out.push(Element::from_letters(w));
            }
        }
        out
    }

    /// Index of a canonical element, if it lies in the ball.
    pub fn index_of(&self, g: &Element) -> Option<usize> {
        if g.len() > self.radius {
            return None;
        }
        let map = self.index.get_or_init(|| {
            self.elements()
                .into_iter()
                .enumerate()
                .map(|(i, e)| (e, i as u32))
                .collect()
        });
        map.get(g).map(|&i| i as usize)
    }

    pub fn contains(&self, g: &Element) -> bool {
        g.len() <= self.radius
    }
}

/// Enumerates `B(o, radius)` breadth first with generator-order tie-break.
pub fn enumerate_ball(group: &MarkedGroup, radius: usize, budget: &Budget) -> Result<Ball> {
    let mut parent = vec![0u32];
    let mut letter = vec![Letter(0)];
    let mut offsets = vec![0usize, 1];
    let mut states: Vec<NfState> = vec![group.start_state()];
    let letters: Vec<Letter> = group.letters().collect();
    for _ in 0..radius {
        let start = offsets[offsets.len() - 2];
        let mut next_states = Vec::with_capacity(states.len() * letters.len());
        for (k, &st) in states.iter().enumerate() {
            for &x in &letters {
                if let Some(ns) = group.step(st, x) {
                    if parent.len() >= budget.max_elements {
                        return Err(Error::BudgetExceeded {
                            what: "enumerating a ball",
                            limit: budget.max_elements,
                        });
                    }
                    parent.push((start + k) as u32);
                    letter.push(x);
                    next_states.push(ns);
                }
            }
        }
        offsets.push(parent.len());
        states = next_states;
    }
    Ok(Ball::from_parts(group.clone(), radius, parent, letter, offsets))
}

/// Depth-first walk over all canonical words of length `<= radius`
/// carrying a user state along each word.
///
/// `visit(depth, state, word)` is called once per element in depth-first
/// preorder with generator-order tie-break. Nothing is stored, so the walk
/// is limited by time only.
pub fn walk_ball<S, F, V>(group: &MarkedGroup, radius: usize, root: S, mut step: F, mut visit: V)
where
    F: FnMut(&S, Letter) -> S,
    V: FnMut(usize, &S, &[Letter]),
{
    let letters: Vec<Letter> = group.letters().collect();
    let mut word = Vec::with_capacity(radius);
    visit(0, &root, &word);
    #[allow(clippy::too_many_arguments)]
    fn rec<S, F, V>(
        group: &MarkedGroup,
        letters: &[Letter],
        radius: usize,
        nf: NfState,
        state: &S,
        word: &mut Vec<Letter>,
        step: &mut F,
        visit: &mut V,
    ) where
        F: FnMut(&S, Letter) -> S,
        V: FnMut(usize, &S, &[Letter]),
    {
        if word.len() == radius {
            return;
        }
        for &x in letters {
            if let Some(next_nf) = group.step(nf, x) {
                let s = step(state, x);
                word.push(x);
                visit(word.len(), &s, word);
                rec(group, letters, radius, next_nf, &s, word, step, visit);
                word.pop();
            }
        }
    }
    rec(
        group,
        &letters,
        radius,
        group.start_state(),
        &root,
        &mut word,
        &mut step,
        &mut visit,
    );
}

/// Sphere counts `|S(o, l)|` for `l = 0..=radius` by dynamic programming over
/// the normal-form recognizer.
pub fn sphere_counts(group: &MarkedGroup, radius: usize) -> Result<Vec<u128>> {
    let letters: Vec<Letter> = group.letters().collect();
    let mut level: HashMap<NfState, u128> = HashMap::from([(group.start_state(), 1)]);
    let mut out = vec![1u128];
    for l in 1..=radius {
        let mut next: HashMap<NfState, u128> = HashMap::with_capacity(level.len());
        for (&st, &n) in &level {
            for &x in &letters {
                if let Some(ns) = group.step(st, x) {
                    let slot = next.entry(ns).or_insert(0);
                    *slot = slot
                        .checked_add(n)
                        .ok_or_else(|| Error::OutOfRange(format!("sphere count overflow at radius {l}")))?;
                }
            }
        }
        let total = next
            .values()
            .try_fold(0u128, |a, &b| a.checked_add(b))
            .ok_or_else(|| Error::OutOfRange(format!("sphere count overflow at radius {l}")))?;
        out.push(total);
        level = next;
    }
    Ok(out)
}

/// Annular sphere `S(l, a) = { g : l − a <= d(o, g·o) < l + a }` inside a ball.
#[derive(Clone, Debug, Serialize)]
pub struct Sphere {
    pub center: f64,
    pub half_width: f64,
    /// Integer distances covered by the half-open condition.
    pub radii: Range<usize>,
    /// Ball indices of the members.
    pub members: Range<usize>,
}

impl Sphere {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Members of `S(l, a)`; needs `l + a <= radius + 1` so the answer is exact.
pub fn sphere(ball: &Ball, l: f64, a: f64) -> Result<Sphere> {
    if !(l.is_finite() && a.is_finite()) || a < 0.0 {
        return Err(Error::Precondition("sphere parameters must be finite, a >= 0".into()));
    }
    if l + a > ball.radius() as f64 + 1.0 + 1e-12 {
        return Err(Error::OutOfRange(format!(
            "S({l}, {a}) needs a ball of radius >= {}",
            (l + a - 1.0).ceil()
        )));
    }
    let lo = (l - a).ceil().max(0.0) as usize;
    let hi = ((l + a).ceil().max(0.0) as usize).min(ball.radius() + 1);
    let radii = lo..hi.max(lo);
    let members = if radii.is_empty() {
        0..0
    } else {
        ball.sphere_range(radii.start).start..ball.sphere_range(radii.end - 1).end
    };
    Ok(Sphere {
        center: l,
        half_width: a,
        radii,
        members,
    })
}

/// Vertex path from `g` to `h` following the canonical word of `g⁻¹h`,
/// which is the lexicographically least geodesic word.
pub fn geodesic(group: &MarkedGroup, g: &Element, h: &Element) -> Vec<Element> {
    let w = group.multiply(&group.inverse(g), h);
    let mut out = Vec::with_capacity(w.len() + 1);
    let mut cur = g.clone();
    out.push(cur.clone());
    for &x in w.letters() {
        cur = group.mul_letter(&cur, x);
        out.push(cur.clone());
    }
    out
}

/// Every geodesic vertex path from `g` to `h`, in lexicographic order.
pub fn all_geodesics(
    group: &MarkedGroup,
    g: &Element,
    h: &Element,
    budget: &Budget,
) -> Result<Vec<Vec<Element>>> {
    let mut out = Vec::new();
    let mut path = vec![g.clone()];
    fn rec(
        group: &MarkedGroup,
        h: &Element,
        path: &mut Vec<Element>,
        out: &mut Vec<Vec<Element>>,
        cap: usize,
    ) -> Result<()> {
        let cur = path.last().expect("path is never empty").clone();
        let d = group.distance(&cur, h);
        if d == 0 {
            if out.len() >= cap {
                return Err(Error::BudgetExceeded {
                    what: "enumerating geodesics",
                    limit: cap,
                });
            }
            out.push(path.clone());
            return Ok(());
        }
        for x in group.letters() {
            let next = group.mul_letter(&cur, x);
            if group.distance(&next, h) + 1 == d {
                path.push(next);
                rec(group, h, path, out, cap)?;
                path.pop();
            }
        }
        Ok(())
    }
    rec(group, h, &mut path, &mut out, budget.max_geodesics)?;
    Ok(out)
}
