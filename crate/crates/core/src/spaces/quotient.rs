//! Quotient spaces `X/N` for homomorphisms onto marked groups.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::ball::{sphere_counts, walk_ball};
use super::group::{GroupSpec, MarkedGroup};
use super::word::{Element, Letter};
use super::Budget;
use crate::error::{Error, Result};

/// JSON form of a homomorphism: target group and images of the parent generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomSpec {
    pub target: GroupSpec,
    pub images: Vec<String>,
}

/// The quotient of the parent Cayley graph by the kernel of `parent → target`.
///
/// Its metric is the word metric of the target with respect to the images
/// of the parent generators, computed by breadth-first search.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    parent: MarkedGroup,
    target: MarkedGroup,
    /// Image of each parent letter (generators and inverses).
    letter_images: Vec<Element>,
    /// True when generator `i` maps to target generator `i`, so the target's
    /// own word metric is the quotient metric.
    standard_marking: bool,
    budget: Budget,
}

impl QuotientSpace {
    pub fn new(parent: MarkedGroup, target: MarkedGroup, images: Vec<Element>) -> Result<Self> {
        if images.len() != parent.rank() {
            return Err(Error::InvalidSpec(format!(
                "{} images given for {} generators",
                images.len(),
                parent.rank()
            )));
        }
        if images
            .iter()
            .flat_map(|e| e.letters())
            .any(|l| l.generator() >= target.rank())
        {
            return Err(Error::InvalidSpec("image uses a letter outside the target alphabet".into()));
        }
        let mut letter_images = Vec::with_capacity(2 * images.len());
        for img in &images {
            let img = target.normal_form(img.letters());
            letter_images.push(img.clone());
            letter_images.push(target.inverse(&img));
        }
        let standard_marking = parent.rank() == target.rank()
            && (0..parent.rank()).all(|i| letter_images[2 * i].letters() == [Letter::new(i, false)]);
        Ok(QuotientSpace {
            parent,
            target,
            letter_images,
            standard_marking,
            budget: Budget::default(),
        })
    }

    pub fn from_spec(parent: MarkedGroup, spec: &HomSpec) -> Result<Self> {
        let target = MarkedGroup::from_spec(&spec.target)?;
        let images = spec
            .images
            .iter()
            .map(|s| target.parse(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(parent, target, images)
    }

    /// Abelianization `F_r → Z^r`.
    pub fn abelianization(parent: MarkedGroup) -> Self {
        let r = parent.rank();
        let target = MarkedGroup::free_abelian(r);
        let images = (0..r).map(|i| Element::from_letters(vec![Letter::new(i, false)])).collect();
        Self::new(parent, target, images).expect("abelianization images are valid")
    }

    /// `F_2 → Z/k * Z`, `a ↦ a`, `b ↦ b`.
    pub fn cyclic_free_product(k: u32) -> Self {
        let images = vec![
            Element::from_letters(vec![Letter::new(0, false)]),
            Element::from_letters(vec![Letter::new(1, false)]),
        ];
        Self::new(MarkedGroup::free(2), MarkedGroup::cyclic_free_product(k), images)
            .expect("standard marking is valid")
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn parent(&self) -> &MarkedGroup {
        &self.parent
    }

    /// True for the abelianization `F_r → Z^r` with generators sent to generators.
    pub fn is_free_abelianization(&self) -> bool {
        self.standard_marking && self.parent.is_free() && self.target.is_free_abelian()
    }

    pub fn target(&self) -> &MarkedGroup {
        &self.target
    }

    pub fn letter_image(&self, x: Letter) -> &Element {
        &self.letter_images[x.0 as usize]
    }

    /// Image of a parent element in the target group.
    pub fn project(&self, g: &Element) -> Element {
        let mut w = Vec::new();
        for &x in g.letters() {
            w.extend_from_slice(self.letter_image(x).letters());
        }
        self.target.normal_form(&w)
    }

    pub fn in_kernel(&self, g: &Element) -> bool {
        self.project(g).is_identity()
    }

    /// `d_Q(hom(g), hom(h))`.
    pub fn distance(&self, g: &Element, h: &Element) -> Result<usize> {
        let (p, q) = (self.project(g), self.project(h));
        self.target_distance(&p, &q)
    }

    /// Quotient distance between two target elements.
    pub fn target_distance(&self, p: &Element, q: &Element) -> Result<usize> {
        if self.standard_marking {
            return Ok(self.target.distance(p, q));
        }
        let goal = self.target.multiply(&self.target.inverse(p), q);
        if goal.is_identity() {
            return Ok(0);
        }
        let mut seen: HashSet<Element> = HashSet::from([Element::identity()]);
        let mut frontier = vec![Element::identity()];
        let mut d = 0;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for e in &frontier {
                for img in &self.letter_images {
                    let f = self.target.multiply(e, img);
                    if f == goal {
                        return Ok(d);
                    }
                    if seen.insert(f.clone()) {
                        if seen.len() > self.budget.max_elements {
                            return Err(Error::BudgetExceeded {
                                what: "searching the quotient graph",
                                limit: self.budget.max_elements,
                            });
                        }
                        next.push(f);
                    }
                }
            }
            frontier = next;
        }
        Err(Error::Precondition(format!("{q} is not reachable from {p} through the images")))
    }

    /// Sphere counts of the quotient Cayley graph around the identity.
    pub fn sphere_counts(&self, radius: usize) -> Result<Vec<u128>> {
        if self.standard_marking {
            return sphere_counts(&self.target, radius);
        }
        let mut seen: HashSet<Element> = HashSet::from([Element::identity()]);
        let mut frontier = vec![Element::identity()];
        let mut out = vec![1u128];
        for _ in 0..radius {
            let mut next = Vec::new();
            for e in &frontier {
                for img in &self.letter_images {
                    let f = self.target.multiply(e, img);
                    if seen.insert(f.clone()) {
                        if seen.len() > self.budget.max_elements {
                            return Err(Error::BudgetExceeded {
                                what: "searching the quotient graph",
                                limit: self.budget.max_elements,
                            });
                        }
                        next.push(f);
                    }
                }
            }
            out.push(next.len() as u128);
            frontier = next;
        }
        Ok(out)
    }

    /// Kernel sphere counts `|N ∩ S(o, l)|` by filtering every canonical word.
    pub fn kernel_sphere_counts(&self, radius: usize) -> Vec<u128> {
        let mut out = vec![0u128; radius + 1];
        walk_ball(
            &self.parent,
            radius,
            Element::identity(),
            |img, x| self.target.multiply(img, self.letter_image(x)),
            |d, img, _| {
                if img.is_identity() {
                    out[d] += 1;
                }
            },
        );
        out
    }
}

/// Kernel sphere counts of the abelianization `F_r → Z^r`, by dynamic
/// programming over reduced words that tracks the exponent-sum vector.
pub fn abelian_kernel_sphere_counts(rank: usize, radius: usize) -> Result<Vec<u128>> {
    let mut level: HashMap<(u8, Vec<i32>), u128> = HashMap::from([((u8::MAX, vec![0; rank]), 1)]);
    let mut out = vec![1u128];
    for l in 1..=radius {
        let remaining = (radius - l) as i32;
        let mut next: HashMap<(u8, Vec<i32>), u128> = HashMap::new();
        for ((last, v), &n) in &level {
            for x in 0..2 * rank as u8 {
                if *last != u8::MAX && Letter(*last).inverse() == Letter(x) {
                    continue;
                }
                let x = Letter(x);
                let mut w = v.clone();
                w[x.generator()] += x.sign() as i32;
                // the walk can no longer return to 0
                if w.iter().map(|c| c.abs()).sum::<i32>() > remaining {
                    continue;
                }
                let slot = next.entry((x.0, w)).or_insert(0);
                *slot = slot
                    .checked_add(n)
                    .ok_or_else(|| Error::OutOfRange(format!("kernel count overflow at radius {l}")))?;
            }
        }
        out.push(
            next.iter()
                .filter(|((_, v), _)| v.iter().all(|&c| c == 0))
                .map(|(_, &n)| n)
                .sum(),
        );
        level = next;
    }
    Ok(out)
}
