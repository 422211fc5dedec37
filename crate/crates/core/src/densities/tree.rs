//! The limit density on the ends of a free-group Cayley tree.
//!
//! `ν_o` is the uniform (Patterson) measure: the cylinder of ends through a
//! reduced word of length `l >= 1` has mass `1 / (2r (2r−1)^{l−1})`. Other
//! basepoints follow from conformality, `dν_x/dν_o(ξ) = q^{−b_ξ(x, o)}` with
//! `q = 2r − 1 = e^ω`. All masses are exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::{Element, Letter, MarkedGroup};

/// `q^e` for an integer exponent of either sign.
fn qpow(q: u64, e: i64) -> BigRational {
    let p = BigInt::from(q).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Exact conformal density of dimension `ω = ln(2r − 1)` on the ends of `F_r`.
#[derive(Clone, Debug)]
pub struct TreeEndDensity {
    group: MarkedGroup,
    rank: usize,
}

/// Outcome of one cylinder in a conformality test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalityRow {
    pub cylinder: Element,
    /// `ν_x(C) / ν_y(C)` as `p/q`.
    pub ratio: String,
    /// `e^{−ω c(x, y)}` on `C`.
    pub expected: String,
    /// `|ratio / expected − 1|`; `None` when `C` is too shallow for `c(x, y)` to be constant.
    pub error: Option<f64>,
}

/// Shadow Lemma quantities for one `(g, r)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowLemmaRow {
    pub g: Element,
    pub r: f64,
    /// `ν_o(O_o(g·o, r))·e^{ω d(o, g·o)} / ‖ν_{g·o}‖`.
    pub ratio: f64,
    /// Exact ratio when the model is exact.
    pub exact_ratio: Option<String>,
    /// `e^{2ωr}`.
    pub upper: f64,
    pub upper_holds: bool,
}

/// Annulus comparison `Σ_{S(l, a)} ‖ν_g‖ e^{−ω|g|}` against `ν_o(X̄ ∖ B(o, l))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnulusRow {
    pub l: f64,
    pub a: f64,
    pub sphere_sum: f64,
    pub outside_mass: f64,
    pub ratio: f64,
}

impl TreeEndDensity {
    pub fn new(group: &MarkedGroup) -> Result<Self> {
        if !group.is_free() {
            return Err(Error::Unsupported("the tree-end density needs a free group".into()));
        }
        Ok(TreeEndDensity {
            group: group.clone(),
            rank: group.rank(),
        })
    }

    pub fn group(&self) -> &MarkedGroup {
        &self.group
    }

    /// `q = 2r − 1`.
    pub fn q(&self) -> u64 {
        2 * self.rank as u64 - 1
    }

    pub fn omega(&self) -> f64 {
        (self.q() as f64).ln()
    }

    /// `ν_o(Cyl(w))`.
    pub fn cylinder_mass_o(&self, w: &Element) -> BigRational {
        if w.is_identity() {
            return BigRational::one();
        }
        let denom = BigInt::from(2 * self.rank as u64) * BigInt::from(self.q()).pow(w.len() as u32 - 1);
        BigRational::new(BigInt::one(), denom)
    }

    /// One-letter reduced extensions of `w`.
    pub fn children(&self, w: &Element) -> Vec<Element> {
        self.group
            .letters()
            .filter(|&x| w.last() != Some(x.inverse()))
            .map(|x| {
                let mut v = w.letters().to_vec();
                v.push(x);
                Element::from_letters(v)
            })
            .collect()
    }

    /// Reduced words of length `l`, i.e. the cylinders of depth `l`.
    pub fn cylinders(&self, l: usize) -> Vec<Element> {
        let mut level = vec![Element::identity()];
        for _ in 0..l {
            level = level.iter().flat_map(|w| self.children(w)).collect();
        }
        level
    }

    /// `b_ξ(v, o) = |v| − 2·cp(v, ξ)`, constant on `Cyl(w)` unless `w` is a
    /// proper prefix of `v`.
    fn busemann(v: &Element, w: &Element) -> Option<i64> {
        if w.len() < v.len() && v.starts_with(w) {
            return None;
        }
        Some(v.len() as i64 - 2 * v.common_prefix_len(w) as i64)
    }

    /// Integrates `f` against `ν_x` over `Cyl(w)`. `f` is called on cylinders
    /// where every Busemann function of `special` is constant.
    fn integrate(
        &self,
        x: &Element,
        w: &Element,
        special: &[&Element],
        f: &dyn Fn(&Element) -> bool,
    ) -> BigRational {
        let undecided = special.iter().chain(std::iter::once(&x)).any(|v| Self::busemann(v, w).is_none());
        if undecided {
            return self
                .children(w)
                .iter()
                .map(|c| self.integrate(x, c, special, f))
                .fold(BigRational::zero(), |a, b| a + b);
        }
        if !f(w) {
            return BigRational::zero();
        }
        let b = Self::busemann(x, w).expect("decided");
        self.cylinder_mass_o(w) * qpow(self.q(), -b)
    }

    /// `ν_x(Cyl(w))`.
    pub fn cylinder_mass(&self, x: &Element, w: &Element) -> BigRational {
        self.integrate(x, w, &[], &|_| true)
    }

    /// `ν_x` of a union of cylinders (overlaps are not double counted).
    pub fn union_mass(&self, x: &Element, cylinders: &[Element]) -> BigRational {
        let mut cyl: Vec<Element> = cylinders.to_vec();
        cyl.sort();
        cyl.dedup();
        let minimal: Vec<Element> = cyl
            .iter()
            .filter(|c| !cyl.iter().any(|d| d != *c && c.starts_with(d)))
            .cloned()
            .collect();
        minimal.iter().map(|c| self.cylinder_mass(x, c)).fold(BigRational::zero(), |a, b| a + b)
    }

    /// `‖ν_x‖`.
    pub fn total_mass(&self, x: &Element) -> BigRational {
        self.cylinder_mass(x, &Element::identity())
    }

    /// `ν_x(O_y(z, r))` where the shadow is read on ends.
    pub fn shadow_mass(&self, x: &Element, y: &Element, z: &Element, r: i64) -> BigRational {
        let dyz = self.group.distance(y, z) as i64;
        let member = |w: &Element| {
            let hz = Self::busemann(z, w).expect("decided");
            let hy = Self::busemann(y, w).expect("decided");
            dyz + hz - hy <= 2 * r
        };
        self.integrate(x, &Element::identity(), &[y, z], &member)
    }

    /// Compares `ν_x(C)/ν_y(C)` with `e^{−ω c(x, y)}` on each cylinder.
    pub fn conformality_check(&self, x: &Element, y: &Element, cylinders: &[Element]) -> Vec<ConformalityRow> {
        cylinders
            .iter()
            .map(|w| {
                let ratio = self.cylinder_mass(x, w) / self.cylinder_mass(y, w);
                match (Self::busemann(x, w), Self::busemann(y, w)) {
                    (Some(bx), Some(by)) => {
                        let expected = qpow(self.q(), -(bx - by));
                        let err = (&ratio / &expected - BigRational::one()).abs();
                        ConformalityRow {
                            cylinder: w.clone(),
                            ratio: ratio.to_string(),
                            expected: expected.to_string(),
                            error: Some(to_f64(&err)),
                        }
                    }
                    _ => ConformalityRow {
                        cylinder: w.clone(),
                        ratio: ratio.to_string(),
                        expected: String::new(),
                        error: None,
                    },
                }
            })
            .collect()
    }

    /// Checks `ν_x(A) <= e^{ω d(x, y)} ν_y(A)` for a union of cylinders `A`.
    pub fn harnack_check(&self, x: &Element, y: &Element, cylinders: &[Element]) -> (BigRational, BigRational, bool) {
        let lhs = self.union_mass(x, cylinders);
        let rhs = qpow(self.q(), self.group.distance(x, y) as i64) * self.union_mass(y, cylinders);
        let ok = lhs <= rhs;
        (lhs, rhs, ok)
    }

    pub fn shadow_lemma_check(&self, g: &Element, r: usize) -> ShadowLemmaRow {
        let o = Element::identity();
        let mass = self.shadow_mass(&o, &o, g, r as i64);
        let exact = mass * qpow(self.q(), g.len() as i64) / self.total_mass(g);
        let upper = qpow(self.q(), 2 * r as i64);
        ShadowLemmaRow {
            g: g.clone(),
            r: r as f64,
            ratio: to_f64(&exact),
            exact_ratio: Some(exact.to_string()),
            upper: to_f64(&upper),
            upper_holds: exact <= upper,
        }
    }

    /// All mass sits on ends, so `ν_o(X̄ ∖ B(o, l)) = 1`.
    pub fn annulus_bound_check(&self, l: f64, a: f64) -> AnnulusRow {
        let lo = (l - a).ceil().max(0.0) as usize;
        let hi = (l + a).ceil().max(0.0) as usize;
        let mut sum = BigRational::zero();
        for d in lo..hi {
            let count: BigInt = if d == 0 {
                BigInt::one()
            } else {
                BigInt::from(2 * self.rank as u64) * BigInt::from(self.q()).pow(d as u32 - 1)
            };
            sum += BigRational::from_integer(count) * qpow(self.q(), -(d as i64));
        }
        let s = to_f64(&sum);
        AnnulusRow {
            l,
            a,
            sphere_sum: s,
            outside_mass: 1.0,
            ratio: s,
        }
    }

    /// Largest cylinder mass at depth `l`.
    pub fn max_atom_mass(&self, l: usize) -> BigRational {
        let w = Element::from_letters(vec![Letter(0); l]);
        self.cylinder_mass_o(&w)
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}
