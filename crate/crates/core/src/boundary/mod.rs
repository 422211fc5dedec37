//! Horoboundary cocycles, Gromov products and shadows.
//!
//! Every cocycle here has the form `c(x, y) = H(x) − H(y)` for a potential
//! `H` normalized by `H(o) = 0`:
//!
//! | variant    | `H(x)`                                    |
//! |------------|-------------------------------------------|
//! | interior   | `d(x, z) − d(o, z)`                       |
//! | tree end   | `|x| − 2·(common prefix of x and ξ)`      |
//! | L1 horo    | `Σ hᵢ(xᵢ) − hᵢ(0)`                        |
//! | window     | tabulated                                 |
//!
//! so the cocycle identity holds exactly.

mod limits;
mod rays;

pub use limits::{boundary_limit, reduced_equiv, BoundaryLimit, Equivalence};
pub use rays::{
    gradient_ray, limit_set_membership, project_cocycle, transverse_pair_check, CocycleProjection,
    GradientRay, LimitKind, LimitThreshold, LimitWitness, TransverseReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{Element, MarkedGroup};

/// Behaviour of one coordinate of an L1 horofunction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", content = "anchor", rename_all = "snake_case")]
pub enum L1Mode {
    /// Limit point at `+∞` in this coordinate: `h(t) = −t`.
    PlusInfinity,
    /// Limit point at `−∞`: `h(t) = t`.
    MinusInfinity,
    /// Bounded coordinate: `h(t) = |t − a|`.
    Anchor(i64),
}

impl L1Mode {
    fn h(self, t: i64) -> i64 {
        match self {
            L1Mode::PlusInfinity => -t,
            L1Mode::MinusInfinity => t,
            L1Mode::Anchor(a) => (t - a).abs(),
        }
    }

    pub fn is_infinite(self) -> bool {
        !matches!(self, L1Mode::Anchor(_))
    }
}

/// An eventually periodic end `prefix · period^∞` of a free-group Cayley tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeEnd {
    pub prefix: Element,
    pub period: Element,
}

impl TreeEnd {
    /// Builds and canonicalizes an end; the infinite word must be reduced.
    pub fn new(prefix: Element, period: Element) -> Result<Self> {
        let p = period.letters();
        if p.is_empty() {
            return Err(Error::InvalidSpec("an end needs a nonempty period".into()));
        }
        let reduced = |w: &[crate::spaces::Letter]| w.windows(2).all(|v| v[0] != v[1].inverse());
        if !reduced(prefix.letters()) || !reduced(p) || p[0] == p[p.len() - 1].inverse() {
            return Err(Error::InvalidSpec(format!(
                "{prefix}·({period})^∞ is not a reduced infinite word"
            )));
        }
        if prefix.last().is_some_and(|l| l == p[0].inverse()) {
            return Err(Error::InvalidSpec(format!(
                "{prefix}·({period})^∞ cancels at the junction"
            )));
        }
        let n = p.len();
        let root = (1..=n)
            .find(|&d| n % d == 0 && (0..n).all(|i| p[i] == p[i % d]))
            .expect("n divides itself");
        let mut prefix = prefix.into_letters();
        let mut period = p[..root].to_vec();
        while prefix.last() == period.last() && !prefix.is_empty() {
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(TreeEnd {
            prefix: Element::from_letters(prefix),
            period: Element::from_letters(period),
        })
    }

    /// `g^{+∞}` (`positive`) or `g^{−∞}` for a nontrivial element of a free group.
    pub fn of_power(group: &MarkedGroup, g: &Element, positive: bool) -> Result<Self> {
        if g.is_identity() {
            return Err(Error::Precondition("the identity has no fixed ends".into()));
        }
        let g = if positive { g.clone() } else { group.inverse(g) };
        let w = g.letters();
        let mut k = 0;
        while w[k] == w[w.len() - 1 - k].inverse() {
            k += 1;
        }
        let conj = Element::from_letters(w[..k].to_vec());
        let core = Element::from_letters(w[k..w.len() - k].to_vec());
        Self::new(conj, core)
    }

    /// `u·ξ`.
    pub fn translate(&self, group: &MarkedGroup, u: &Element) -> Result<Self> {
        let reps = (u.len() + self.prefix.len()) / self.period.len() + 2;
        let mut w = u.letters().to_vec();
        w.extend_from_slice(self.prefix.letters());
        for _ in 0..reps {
            w.extend_from_slice(self.period.letters());
        }
        Self::new(group.normal_form(&w), self.period.clone())
    }

    /// Letter `i` (0-based) of the infinite word.
    pub fn letter(&self, i: usize) -> crate::spaces::Letter {
        let pre = self.prefix.letters();
        if i < pre.len() {
            pre[i]
        } else {
            let p = self.period.letters();
            p[(i - pre.len()) % p.len()]
        }
    }

    /// First `n` letters.
    pub fn truncate(&self, n: usize) -> Element {
        Element::from_letters((0..n).map(|i| self.letter(i)).collect())
    }

    /// Length of the common prefix with a reduced word.
    pub fn common_prefix(&self, x: &Element) -> usize {
        x.letters()
            .iter()
            .enumerate()
            .take_while(|&(i, &l)| self.letter(i) == l)
            .count()
    }
}

/// A point of the horocompactification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Cocycle {
    /// Busemann cocycle `b_z(x, y) = d(x, z) − d(y, z)`.
    Interior { z: Element },
    TreeEnd(TreeEnd),
    L1Horo { modes: Vec<L1Mode> },
    /// Tabulated potential on a finite window of points.
    Window {
        radius: usize,
        points: Vec<Element>,
        potential: Vec<f64>,
    },
}

impl Cocycle {
    pub fn interior(z: Element) -> Self {
        Cocycle::Interior { z }
    }

    pub fn tree_end(end: TreeEnd) -> Self {
        Cocycle::TreeEnd(end)
    }

    pub fn l1(modes: Vec<L1Mode>) -> Self {
        Cocycle::L1Horo { modes }
    }

    /// Window cocycle `b_z` restricted to the given points.
    pub fn window_from_interior(group: &MarkedGroup, z: &Element, mut points: Vec<Element>, radius: usize) -> Self {
        points.sort();
        points.dedup();
        let potential = points
            .iter()
            .map(|x| group.distance(x, z) as f64 - z.len() as f64)
            .collect();
        Cocycle::Window {
            radius,
            points,
            potential,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Cocycle::Window { .. })
    }

    pub fn is_boundary(&self) -> bool {
        match self {
            Cocycle::Interior { .. } | Cocycle::Window { .. } => false,
            Cocycle::TreeEnd(_) => true,
            Cocycle::L1Horo { modes } => modes.iter().any(|m| m.is_infinite()),
        }
    }

    /// `H(x) = c(x, o)`.
    pub fn potential(&self, group: &MarkedGroup, x: &Element) -> Result<f64> {
        Ok(match self {
            Cocycle::Interior { z } => group.distance(x, z) as f64 - z.len() as f64,
            Cocycle::TreeEnd(end) => {
                if !group.is_free() {
                    return Err(Error::Unsupported("tree ends need a free group".into()));
                }
                x.len() as f64 - 2.0 * end.common_prefix(x) as f64
            }
            Cocycle::L1Horo { modes } => {
                if !group.is_free_abelian() || group.rank() != modes.len() {
                    return Err(Error::Unsupported(
                        "L1 horofunctions need a free abelian group of matching dimension".into(),
                    ));
                }
                let v = group.exponent_sums(x);
                modes.iter().zip(&v).map(|(m, &t)| m.h(t) - m.h(0)).sum::<i64>() as f64
            }
            Cocycle::Window {
                points, potential, ..
            } => {
                let i = points
                    .binary_search(x)
                    .map_err(|_| Error::OutOfWindow(x.to_string()))?;
                potential[i] - points.binary_search(&Element::identity()).map_or(0.0, |o| potential[o])
            }
        })
    }

    /// `c(x, y)`.
    pub fn evaluate(&self, group: &MarkedGroup, x: &Element, y: &Element) -> Result<f64> {
        Ok(self.potential(group, x)? - self.potential(group, y)?)
    }
}

/// `⟨x, c⟩_y = ½[d(x, y) + c(y, x)]`.
pub fn gromov_product(group: &MarkedGroup, c: &Cocycle, x: &Element, y: &Element) -> Result<f64> {
    Ok(0.5 * (group.distance(x, y) as f64 + c.evaluate(group, y, x)?))
}

/// The shadow `O_x(y, r)`: cocycles with `⟨x, c⟩_y <= r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shadow {
    pub viewpoint: Element,
    pub target: Element,
    pub radius: f64,
}

impl Shadow {
    pub fn new(viewpoint: Element, target: Element, radius: f64) -> Self {
        Shadow {
            viewpoint,
            target,
            radius,
        }
    }

    /// Gromov product and membership.
    pub fn contains(&self, group: &MarkedGroup, c: &Cocycle) -> Result<(f64, bool)> {
        let p = gromov_product(group, c, &self.viewpoint, &self.target)?;
        Ok((p, p <= self.radius + 1e-9))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> MarkedGroup {
        MarkedGroup::free(2)
    }

    fn end(g: &MarkedGroup, prefix: &str, period: &str) -> Cocycle {
        Cocycle::tree_end(TreeEnd::new(g.parse(prefix).unwrap(), g.parse(period).unwrap()).unwrap())
    }

    #[test]
    fn interior_values() {
        let g = f2();
        let c = Cocycle::interior(g.parse("aaa").unwrap());
        let v = c.evaluate(&g, &g.parse("a").unwrap(), &g.parse("b").unwrap()).unwrap();
        assert_eq!(v, -2.0);
        let x = g.parse("ab").unwrap();
        assert_eq!(c.evaluate(&g, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn tree_end_values() {
        let g = f2();
        let c = end(&g, "1", "a");
        assert_eq!(c.evaluate(&g, &g.identity(), &g.parse("aaa").unwrap()).unwrap(), 3.0);
        // agrees with b_{z} for z deep along the end
        let z = g.parse("a^12").unwrap();
        let bz = Cocycle::interior(z);
        for w in ["1", "a", "ab", "Ab", "aaB", "bab"] {
            let x = g.parse(w).unwrap();
            assert_eq!(c.potential(&g, &x).unwrap(), bz.potential(&g, &x).unwrap());
        }
    }

    #[test]
    fn tree_end_canonical_form() {
        let g = f2();
        let e1 = TreeEnd::new(g.parse("ab").unwrap(), g.parse("abab").unwrap()).unwrap();
        let e2 = TreeEnd::new(g.identity(), g.parse("ab").unwrap()).unwrap();
        assert_eq!(e1, e2);
        assert!(TreeEnd::new(g.parse("A").unwrap(), g.parse("a").unwrap()).is_err());
        let h = g.parse("bab^-1").unwrap();
        let plus = TreeEnd::of_power(&g, &h, true).unwrap();
        assert_eq!(plus.truncate(4), g.parse("baaa").unwrap());
        let minus = TreeEnd::of_power(&g, &h, false).unwrap();
        assert_eq!(minus.truncate(3), g.parse("bAA").unwrap());
        let moved = TreeEnd::of_power(&g, &g.parse("a").unwrap(), true)
            .unwrap()
            .translate(&g, &g.parse("A^3").unwrap())
            .unwrap();
        assert_eq!(moved, TreeEnd::new(g.identity(), g.parse("a").unwrap()).unwrap());
    }

    #[test]
    fn l1_values() {
        let z2 = MarkedGroup::free_abelian(2);
        let c = Cocycle::l1(vec![L1Mode::PlusInfinity, L1Mode::PlusInfinity]);
        let x = z2.lattice_point(&[1, -2]).unwrap();
        let y = z2.lattice_point(&[3, 4]).unwrap();
        assert_eq!(c.evaluate(&z2, &x, &y).unwrap(), (3.0 + 4.0) - (1.0 - 2.0));
        assert!(c.evaluate(&MarkedGroup::free(2), &x, &y).is_err());
    }

    #[test]
    fn window_lookup() {
        let g = f2();
        let pts = vec![g.identity(), g.parse("a").unwrap(), g.parse("b").unwrap()];
        let c = Cocycle::window_from_interior(&g, &g.parse("aa").unwrap(), pts, 1);
        assert_eq!(c.evaluate(&g, &g.parse("a").unwrap(), &g.parse("b").unwrap()).unwrap(), -2.0);
        assert!(matches!(
            c.evaluate(&g, &g.parse("ab").unwrap(), &g.identity()),
            Err(Error::OutOfWindow(_))
        ));
    }

    #[test]
    fn shadows() {
        let g = f2();
        let a2 = g.parse("aa").unwrap();
        let s = Shadow::new(g.identity(), a2.clone(), 0.0);
        assert_eq!(s.contains(&g, &end(&g, "1", "a")).unwrap(), (0.0, true));
        assert_eq!(s.contains(&g, &end(&g, "1", "b")).unwrap(), (2.0, false));
        let x = g.parse("bA").unwrap();
        let s = Shadow::new(x, a2.clone(), 0.0);
        assert_eq!(s.contains(&g, &Cocycle::interior(a2)).unwrap(), (0.0, true));
    }
}
