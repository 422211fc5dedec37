//! Contracting tails `T(α, L)`.
//!
//! `g ∈ T(α, L)` when some α-contracting geodesic `τ` ends at `g·o` and a
//! projection `p` of `o` onto `τ` has `d(p, g·o) >= L`. Tails are translated
//! to end at `o` before checking, so the verdict for a tail depends only on
//! its word and is cached.

use std::collections::HashMap;

use serde::Serialize;

use super::{check_contracting, project, SubsetWindow};
use crate::error::Result;
use crate::spaces::{Ball, Budget, Element, Letter, MarkedGroup};

/// Which geodesics ending at `g·o` are searched.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "scope", rename_all = "snake_case")]
pub enum TailScope {
    /// Suffixes of the canonical geodesic `[o, g·o]`; complete on trees.
    Canonical,
    /// Every geodesic of length `max(L,1)..=max_len` ending at `g·o`.
    Exhaustive { max_len: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailWitness {
    pub element: Element,
    /// Vertices of `τ`, ending at `g·o`.
    pub tail: Vec<Element>,
    pub projection: Element,
    /// `d(p, g·o)` for the reported projection `p`.
    pub projection_gap: usize,
    pub alpha: usize,
    pub scope: TailScope,
}

/// Tail search with a per-word cache of contraction verdicts.
#[derive(Debug)]
pub struct TailSearcher {
    group: MarkedGroup,
    alpha: usize,
    scope: TailScope,
    budget: Budget,
    cache: HashMap<Vec<Letter>, bool>,
}

impl TailSearcher {
    pub fn new(group: MarkedGroup, alpha: usize, scope: TailScope, budget: Budget) -> Self {
        TailSearcher {
            group,
            alpha,
            scope,
            budget,
            cache: HashMap::new(),
        }
    }

    /// Radius of the ball in which a tail of length `m` ending at `o` is checked.
    pub fn check_radius(&self, m: usize) -> usize {
        m + 2 * self.alpha + 2
    }

    /// Is the geodesic `w⁻¹ → o` read along `w` α-contracting within its check radius?
    fn word_contracts(&mut self, w: &[Letter]) -> Result<bool> {
        if let Some(&v) = self.cache.get(w) {
            return Ok(v);
        }
        let g = &self.group;
        let start = g.normal_form(&Element::from_letters(w.to_vec()).formal_inverse());
        let mut pts = vec![start.clone()];
        let mut cur = start;
        for &x in w {
            cur = g.mul_letter(&cur, x);
            pts.push(cur.clone());
        }
        let y = SubsetWindow::from_points(pts, w.len());
        let ok = check_contracting(g, &y, self.alpha, self.check_radius(w.len()), &self.budget)?.passed();
        self.cache.insert(w.to_vec(), ok);
        Ok(ok)
    }

    /// Tests the tail read along `w` and ending at `g`.
    fn try_tail(&mut self, g: &Element, w: &[Letter], l: usize) -> Result<Option<TailWitness>> {
        let grp = self.group.clone();
        let mut cur = grp.multiply(g, &grp.normal_form(&Element::from_letters(w.to_vec()).formal_inverse()));
        let mut tail = vec![cur.clone()];
        for &x in w {
            cur = grp.mul_letter(&cur, x);
            tail.push(cur.clone());
        }
        let y = SubsetWindow::from_points(tail.clone(), w.len());
        let best = project(&grp, &grp.identity(), &y)
            .into_iter()
            .map(|p| (grp.distance(&p, g), p))
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
            .expect("projection is nonempty");
        if best.0 < l || !self.word_contracts(w)? {
            return Ok(None);
        }
        Ok(Some(TailWitness {
            element: g.clone(),
            tail,
            projection: best.1,
            projection_gap: best.0,
            alpha: self.alpha,
            scope: self.scope,
        }))
    }

    /// Shortest witnessing tail for `g ∈ T(α, L)` within the scope.
    pub fn find(&mut self, g: &Element, l: usize) -> Result<Option<TailWitness>> {
        let m_min = l.max(1);
        match self.scope {
            TailScope::Canonical => {
                for m in m_min..=g.len() {
                    let w = g.letters()[g.len() - m..].to_vec();
                    if let Some(t) = self.try_tail(g, &w, l)? {
                        return Ok(Some(t));
                    }
                }
                Ok(None)
            }
            TailScope::Exhaustive { max_len } => {
                for m in m_min..=max_len {
                    for w in geodesic_words(&self.group, m) {
                        if let Some(t) = self.try_tail(g, &w, l)? {
                            return Ok(Some(t));
                        }
                    }
                }
                Ok(None)
            }
        }
    }
}

/// All geodesic words of length `m`, in lexicographic order.
fn geodesic_words(group: &MarkedGroup, m: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Letter>, Element)> = vec![(Vec::new(), group.identity())];
    while let Some((w, e)) = stack.pop() {
        if w.len() == m {
            out.push(w);
            continue;
        }
        let letters: Vec<Letter> = group.letters().collect();
        for &x in letters.iter().rev() {
            let f = group.mul_letter(&e, x);
            if f.len() == w.len() + 1 {
                let mut v = w.clone();
                v.push(x);
                stack.push((v, f));
            }
        }
    }
    out
}

/// Members of `T(α, L)` in the ball, with their witnesses, in ball order.
pub fn contracting_tail_members(
    ball: &Ball,
    alpha: usize,
    l: usize,
    scope: TailScope,
    budget: &Budget,
) -> Result<Vec<TailWitness>> {
    let mut searcher = TailSearcher::new(ball.group().clone(), alpha, scope, *budget);
    let mut out = Vec::new();
    for g in ball.elements() {
        if let Some(t) = searcher.find(&g, l)? {
            out.push(t);
        }
    }
    Ok(out)
}
