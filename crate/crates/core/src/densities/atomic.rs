//! Atomic Patterson approximants and their twisted, weighted variants.

use serde::{Deserialize, Serialize};

use crate::densities::tree::{AnnulusRow, ShadowLemmaRow};
use crate::error::{Error, Result};
use crate::spaces::{enumerate_ball, log_add, sphere, walk_ball, Budget, Element, Letter, MarkedGroup};

/// Piecewise log-linear weight `θ`, constant outside its table.
///
/// An empty table is the default `θ ≡ 1`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PattersonWeight {
    /// `(t, ln θ(t))` with strictly increasing `t`.
    #[serde(default)]
    pub knots: Vec<(f64, f64)>,
}

impl PattersonWeight {
    pub fn constant() -> Self {
        PattersonWeight::default()
    }

    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite() || *t < 0.0) {
            return Err(Error::InvalidSpec("weight knots must be finite with t >= 0".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidSpec("weight knots must be strictly increasing".into()));
        }
        Ok(PattersonWeight { knots })
    }

    pub fn log_theta(&self, t: f64) -> f64 {
        let k = &self.knots;
        match k.len() {
            0 => 0.0,
            _ if t <= k[0].0 => k[0].1,
            _ if t >= k[k.len() - 1].0 => k[k.len() - 1].1,
            _ => {
                let i = k.partition_point(|p| p.0 <= t);
                let ((t0, v0), (t1, v1)) = (k[i - 1], k[i]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    fn slopes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.knots
            .windows(2)
            .map(|w| (w[0].0, (w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
    }

    /// Whether `θ(t+u) <= e^{εu} θ(t)` for all `t >= t0`, `u >= 0`.
    ///
    /// For a piecewise log-linear table this is exactly the condition that
    /// every segment reaching past `t0` has slope at most `ε`.
    pub fn check_p1(&self, epsilon: f64, t0: f64) -> bool {
        let last = self.knots.windows(2).map(|w| w[1].0);
        self.slopes().zip(last).all(|((_, slope), end)| end <= t0 || slope <= epsilon)
    }

    /// Smallest `t0` for which [`check_p1`](Self::check_p1) holds.
    pub fn p1_threshold(&self, epsilon: f64) -> f64 {
        let last = self.knots.windows(2).map(|w| w[1].0);
        self.slopes()
            .zip(last)
            .filter(|((_, slope), _)| *slope > epsilon)
            .map(|(_, end)| end)
            .fold(0.0, f64::max)
    }
}

/// Quasi-morphisms `χ: G → R` used to twist Poincaré series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuasiMorphism {
    Zero,
    Constant { value: f64 },
    /// `χ(g) = Σ_i w_i · (exponent sum of generator i)`.
    Homomorphism { weights: Vec<f64> },
    /// Brooks counting quasi-morphism on canonical words: overlapping
    /// occurrences of `word` minus those of its inverse, times `scale`.
    Brooks { word: Element, scale: f64 },
}

impl QuasiMorphism {
    pub fn evaluate(&self, w: &[Letter]) -> f64 {
        match self {
            QuasiMorphism::Zero => 0.0,
            QuasiMorphism::Constant { value } => *value,
            QuasiMorphism::Homomorphism { weights } => w
                .iter()
                .map(|x| weights.get(x.generator()).copied().unwrap_or(0.0) * x.sign() as f64)
                .sum(),
            QuasiMorphism::Brooks { word, scale } => {
                let p = word.letters();
                let q = word.formal_inverse();
                let count = |pat: &[Letter]| {
                    if pat.is_empty() || pat.len() > w.len() {
                        0
                    } else {
                        w.windows(pat.len()).filter(|s| *s == pat).count() as i64
                    }
                };
                scale * (count(p) - count(&q)) as f64
            }
        }
    }

    pub fn negate(&self) -> Self {
        match self {
            QuasiMorphism::Zero => QuasiMorphism::Zero,
            QuasiMorphism::Constant { value } => QuasiMorphism::Constant { value: -value },
            QuasiMorphism::Homomorphism { weights } => QuasiMorphism::Homomorphism {
                weights: weights.iter().map(|w| -w).collect(),
            },
            QuasiMorphism::Brooks { word, scale } => QuasiMorphism::Brooks {
                word: word.clone(),
                scale: -scale,
            },
        }
    }

    /// `max |χ(g) + χ(h) − χ(gh)|` over all pairs in `B(o, radius)`.
    pub fn defect(&self, group: &MarkedGroup, radius: usize, budget: &Budget) -> Result<f64> {
        let ball = enumerate_ball(group, radius, budget)?;
        let elems = ball.elements();
        let vals: Vec<f64> = elems.iter().map(|g| self.evaluate(g.letters())).collect();
        let mut worst: f64 = 0.0;
        for (g, cg) in elems.iter().zip(&vals) {
            for (h, ch) in elems.iter().zip(&vals) {
                let gh = group.multiply(g, h);
                worst = worst.max((cg + ch - self.evaluate(gh.letters())).abs());
            }
        }
        Ok(worst)
    }
}

/// A finite weighted sum of Dirac masses at orbit points, weights in log domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomicDensity {
    pub basepoint: Element,
    pub s: f64,
    /// Radius of the enumerated ball the atoms were drawn from.
    pub radius: usize,
    pub atoms: Vec<Atom>,
    pub log_normalizer: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub word: Element,
    pub log_weight: f64,
}

impl AtomicDensity {
    pub fn log_mass(&self) -> f64 {
        self.log_mass_where(|_| true)
    }

    pub fn mass(&self) -> f64 {
        self.log_mass().exp()
    }

    pub fn log_mass_where(&self, mut keep: impl FnMut(&Element) -> bool) -> f64 {
        self.atoms
            .iter()
            .filter(|a| keep(&a.word))
            .fold(f64::NEG_INFINITY, |acc, a| log_add(acc, a.log_weight))
    }

    pub fn mass_where(&self, keep: impl FnMut(&Element) -> bool) -> f64 {
        self.log_mass_where(keep).exp()
    }

    pub fn weight_of(&self, g: &Element) -> Option<f64> {
        self.atoms.iter().find(|a| &a.word == g).map(|a| a.log_weight.exp())
    }

    /// Atoms lying outside `B(o, radius)`.
    pub fn escaped(&self) -> Vec<&Element> {
        self.atoms
            .iter()
            .filter(|a| a.word.len() > self.radius)
            .map(|a| &a.word)
            .collect()
    }

    /// `ν(O_y(z, r))`, atoms read as interior cocycles.
    pub fn shadow_mass(&self, group: &MarkedGroup, y: &Element, z: &Element, r: f64) -> f64 {
        let dyz = group.distance(y, z) as f64;
        self.mass_where(|p| {
            let prod = 0.5 * (dyz + group.distance(z, p) as f64 - group.distance(y, p) as f64);
            prod <= r + 1e-9
        })
    }
}

/// A family `x ↦ ν_x` of atomic densities.
pub trait DensityFamily {
    fn group(&self) -> &MarkedGroup;
    fn at(&self, x: &Element) -> AtomicDensity;
}

/// `ν^s_x = Q⁻¹ Σ_{|g| <= R} θ(d(x, go)) e^{χ(g)} e^{−s d(x, go)} δ_{go}`.
#[derive(Clone, Debug)]
pub struct PattersonFamily {
    group: MarkedGroup,
    s: f64,
    radius: usize,
    theta: PattersonWeight,
    support: Vec<Element>,
    chi: Vec<f64>,
    log_q: f64,
}

impl PattersonFamily {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_q
    }

    pub fn support(&self) -> &[Element] {
        &self.support
    }

    fn log_weights(&self, x: &Element) -> Vec<f64> {
        self.support
            .iter()
            .zip(&self.chi)
            .map(|(g, c)| {
                let d = self.group.distance(x, g) as f64;
                self.theta.log_theta(d) + c - self.s * d
            })
            .collect()
    }
}

impl DensityFamily for PattersonFamily {
    fn group(&self) -> &MarkedGroup {
        &self.group
    }

    fn at(&self, x: &Element) -> AtomicDensity {
        let atoms = self
            .support
            .iter()
            .zip(self.log_weights(x))
            .map(|(g, w)| Atom {
                word: g.clone(),
                log_weight: w - self.log_q,
            })
            .collect();
        AtomicDensity {
            basepoint: x.clone(),
            s: self.s,
            radius: self.radius,
            atoms,
            log_normalizer: self.log_q,
        }
    }
}

pub fn patterson_approximant(
    group: &MarkedGroup,
    s: f64,
    radius: usize,
    theta: &PattersonWeight,
    chi: &QuasiMorphism,
    budget: &Budget,
) -> Result<PattersonFamily> {
    if s.is_nan() || s <= 0.0 {
        return Err(Error::InvalidSpec(format!("exponent must be positive, got {s}")));
    }
    let ball = enumerate_ball(group, radius, budget)?;
    let support = ball.elements();
    let chi: Vec<f64> = support.iter().map(|g| chi.evaluate(g.letters())).collect();
    let mut fam = PattersonFamily {
        group: group.clone(),
        s,
        radius,
        theta: theta.clone(),
        support,
        chi,
        log_q: 0.0,
    };
    // Sum shell by shell so the reduction order is fixed.
    let w = fam.log_weights(&Element::identity());
    let mut log_q = f64::NEG_INFINITY;
    for l in 0..=radius {
        let shell = ball.sphere_range(l).fold(f64::NEG_INFINITY, |acc, i| log_add(acc, w[i]));
        log_q = log_add(log_q, shell);
    }
    fam.log_q = log_q;
    Ok(fam)
}

/// `ν^g_x = ‖ν_{go}‖⁻¹ · g⁻¹_* ν_{gx}`.
pub struct Pushforward<'a> {
    inner: &'a dyn DensityFamily,
    g: Element,
}

pub fn density_pushforward<'a>(family: &'a dyn DensityFamily, g: &Element) -> Pushforward<'a> {
    Pushforward {
        inner: family,
        g: g.clone(),
    }
}

impl DensityFamily for Pushforward<'_> {
    fn group(&self) -> &MarkedGroup {
        self.inner.group()
    }

    fn at(&self, x: &Element) -> AtomicDensity {
        let group = self.inner.group();
        let gx = group.multiply(&self.g, x);
        let norm = self.inner.at(&self.g).log_mass();
        let gi = group.inverse(&self.g);
        let mut nu = self.inner.at(&gx);
        nu.basepoint = x.clone();
        for a in &mut nu.atoms {
            a.word = group.multiply(&gi, &a.word);
            a.log_weight -= norm;
        }
        nu
    }
}

/// Shadow Lemma ratio `ν_o(O_o(go, r))·e^{ω|g|} / ‖ν_{go}‖` for an atomic family.
pub fn atomic_shadow_lemma_check(family: &dyn DensityFamily, g: &Element, r: f64, omega: f64) -> ShadowLemmaRow {
    let group = family.group();
    let o = Element::identity();
    let mass = family.at(&o).shadow_mass(group, &o, g, r);
    let log_ratio = mass.ln() + omega * g.len() as f64 - family.at(g).log_mass();
    let upper = 2.0 * omega * r;
    ShadowLemmaRow {
        g: g.clone(),
        r,
        ratio: log_ratio.exp(),
        exact_ratio: None,
        upper: upper.exp(),
        upper_holds: log_ratio <= upper + 1e-9,
    }
}

/// Annulus comparison for an atomic family; outside mass counts atoms with `|p| >= l`.
pub fn atomic_annulus_check(
    family: &dyn DensityFamily,
    omega: f64,
    l: f64,
    a: f64,
    budget: &Budget,
) -> Result<AnnulusRow> {
    let group = family.group();
    let radius = (l + a).ceil() as usize;
    let ball = enumerate_ball(group, radius, budget)?;
    let sph = sphere(&ball, l, a)?;
    let mut sum = f64::NEG_INFINITY;
    for i in sph.members.clone() {
        let g = ball.element(i);
        sum = log_add(sum, family.at(&g).log_mass() - omega * g.len() as f64);
    }
    let outside = family.at(&Element::identity()).mass_where(|p| p.len() as f64 >= l);
    Ok(AnnulusRow {
        l,
        a,
        sphere_sum: sum.exp(),
        outside_mass: outside,
        ratio: sum.exp() / outside,
    })
}

/// Harnack comparison `ν_x(A) <= e^{s d(x, y)} ν_y(A)` on a set of atoms.
pub fn atomic_harnack_check(
    family: &dyn DensityFamily,
    x: &Element,
    y: &Element,
    omega: f64,
    set: &dyn Fn(&Element) -> bool,
) -> (f64, f64, bool) {
    let group = family.group();
    let lhs = family.at(x).log_mass_where(set);
    let rhs = omega * group.distance(x, y) as f64 + family.at(y).log_mass_where(set);
    (lhs.exp(), rhs.exp(), lhs <= rhs + 1e-9)
}

/// Growth exponent of the twisted sphere sums `T_χ(l) = Σ_{|g| = l} e^{χ(g)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwistedExponent {
    pub radius: usize,
    pub log_sphere_sums: Vec<f64>,
    pub log_sphere_sums_negated: Vec<f64>,
    /// `ln T_χ(R) − ln T_χ(R−1)`.
    pub omega: f64,
    /// Same for `−χ`.
    pub omega_negated: f64,
}

pub fn twisted_exponent(group: &MarkedGroup, chi: &QuasiMorphism, radius: usize) -> Result<TwistedExponent> {
    if radius == 0 {
        return Err(Error::OutOfRange("twisted exponent needs radius >= 1".into()));
    }
    let mut plus = vec![f64::NEG_INFINITY; radius + 1];
    let mut minus = vec![f64::NEG_INFINITY; radius + 1];
    walk_ball(group, radius, (), |_, _| (), |d, _, w| {
        let c = chi.evaluate(w);
        plus[d] = log_add(plus[d], c);
        minus[d] = log_add(minus[d], -c);
    });
    Ok(TwistedExponent {
        radius,
        omega: plus[radius] - plus[radius - 1],
        omega_negated: minus[radius] - minus[radius - 1],
        log_sphere_sums: plus,
        log_sphere_sums_negated: minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> MarkedGroup {
        MarkedGroup::free(2)
    }

    #[test]
    fn normalization_and_atoms() {
        let g = f2();
        let fam = patterson_approximant(&g, 1.2, 3, &PattersonWeight::constant(), &QuasiMorphism::Zero, &Budget::default())
            .unwrap();
        let nu = fam.at(&g.identity());
        assert!((nu.mass() - 1.0).abs() < 1e-12);
        let q: f64 = (0..=3)
            .map(|l| {
                let n = if l == 0 { 1.0 } else { 4.0 * 3f64.powi(l - 1) };
                n * (-1.2 * l as f64).exp()
            })
            .sum();
        let w = nu.weight_of(&g.parse("a").unwrap()).unwrap();
        assert!((w - (-1.2f64).exp() / q).abs() < 1e-14);
    }

    #[test]
    fn constant_twist_cancels() {
        let g = f2();
        let b = Budget::default();
        let th = PattersonWeight::constant();
        let f0 = patterson_approximant(&g, 1.3, 3, &th, &QuasiMorphism::Zero, &b).unwrap();
        let fk = patterson_approximant(&g, 1.3, 3, &th, &QuasiMorphism::Constant { value: 2.5 }, &b).unwrap();
        for x in ["1", "ab"] {
            let x = g.parse(x).unwrap();
            for (a, c) in f0.at(&x).atoms.iter().zip(&fk.at(&x).atoms) {
                assert!((a.log_weight - c.log_weight).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pushforward_by_a() {
        let g = f2();
        let fam = patterson_approximant(&g, 1.2, 3, &PattersonWeight::constant(), &QuasiMorphism::Zero, &Budget::default())
            .unwrap();
        let a = g.parse("a").unwrap();
        let o = g.identity();
        let push = density_pushforward(&fam, &a);
        let nu = push.at(&o);
        let norm = fam.at(&a).mass();
        let before = fam.at(&a).weight_of(&a).unwrap();
        assert!((nu.weight_of(&o).unwrap() - before / norm).abs() < 1e-14);
        assert!((nu.mass() - 1.0).abs() < 1e-12);
        assert!(!nu.escaped().is_empty());
        let id = density_pushforward(&fam, &o).at(&o);
        assert_eq!(id.atoms.len(), fam.at(&o).atoms.len());
        for (p, q) in id.atoms.iter().zip(&fam.at(&o).atoms) {
            assert_eq!(p.word, q.word);
            assert!((p.log_weight - q.log_weight).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_p1() {
        let w = PattersonWeight::from_knots(vec![(0.0, 0.0), (2.0, 1.0), (5.0, 1.3), (9.0, 1.5)]).unwrap();
        assert_eq!(w.log_theta(1.0), 0.5);
        assert_eq!(w.log_theta(20.0), 1.5);
        assert_eq!(w.p1_threshold(0.2), 2.0);
        assert!(w.check_p1(0.2, 2.0));
        assert!(!w.check_p1(0.2, 1.0));
        assert_eq!(w.p1_threshold(0.01), 9.0);
        assert!(PattersonWeight::from_knots(vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn defects() {
        let g = f2();
        let b = Budget::default();
        let hom = QuasiMorphism::Homomorphism { weights: vec![1.0, -0.5] };
        assert!(hom.defect(&g, 2, &b).unwrap() < 1e-12);
        let brooks = QuasiMorphism::Brooks {
            word: g.parse("ab").unwrap(),
            scale: 1.0,
        };
        let d = brooks.defect(&g, 3, &b).unwrap();
        assert!(d >= 1.0 && d <= 3.0, "{d}");
    }

    #[test]
    fn twisted_zero_matches_growth() {
        let t = twisted_exponent(&f2(), &QuasiMorphism::Zero, 6).unwrap();
        assert!((t.omega - 3f64.ln()).abs() < 1e-12);
    }
}
