//! Contracting elements and the standard constructions built from them.

use serde::Serialize;

use super::tails::{TailScope, TailSearcher, TailWitness};
use super::{check_contracting, project, ContractionCertificate, SubsetWindow};
use crate::error::{Error, Result};
use crate::spaces::{geodesic, Budget, Element, MarkedGroup};

/// Evidence that `n ↦ gⁿ·o` is a quasi-isometric embedding with contracting image
/// over a finite window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractingElementWitness {
    pub element: Element,
    pub alpha: usize,
    /// Multiplicative constant of `|n−m|/λ − ε <= d(gⁿo, gᵐo) <= λ|n−m| + ε` on the window.
    pub lambda: f64,
    pub epsilon: f64,
    pub window: usize,
    /// Certificate for the quasi-axis `⋃ gⁿ·[o, g·o]`.
    pub certificate: ContractionCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotContracting {
    /// `gᵏ = 1` for some `1 <= k <= 2·window`, so the orbit is bounded.
    BoundedOrbit { power: usize },
    /// The quasi-axis fails the contraction check.
    Violation { certificate: ContractionCertificate },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ContractingVerdict {
    Contracting(ContractingElementWitness),
    NotContracting(NotContracting),
}

impl ContractingVerdict {
    pub fn is_contracting(&self) -> bool {
        matches!(self, ContractingVerdict::Contracting(_))
    }

    pub fn witness(&self) -> Option<&ContractingElementWitness> {
        match self {
            ContractingVerdict::Contracting(w) => Some(w),
            ContractingVerdict::NotContracting(_) => None,
        }
    }
}

/// Fits `(λ, 0)` to the orbit over `|n| <= window` and checks the quasi-axis
/// for α-contraction inside `B(o, window)`.
pub fn detect_contracting(
    group: &MarkedGroup,
    g: &Element,
    window: usize,
    alpha: usize,
    budget: &Budget,
) -> Result<ContractingVerdict> {
    let mut lambda: f64 = 1.0;
    let mut power = group.identity();
    for k in 1..=(2 * window).max(1) {
        power = group.multiply(&power, g);
        let d = power.len();
        if d == 0 {
            return Ok(ContractingVerdict::NotContracting(NotContracting::BoundedOrbit {
                power: k,
            }));
        }
        let (d, k) = (d as f64, k as f64);
        lambda = lambda.max(d / k).max(k / d);
    }
    let axis = SubsetWindow::quasi_axis(group, g, window);
    let certificate = check_contracting(group, &axis, alpha, window, budget)?;
    Ok(if certificate.passed() {
        ContractingVerdict::Contracting(ContractingElementWitness {
            element: g.clone(),
            alpha,
            lambda,
            epsilon: 0.0,
            window,
            certificate,
        })
    } else {
        ContractingVerdict::NotContracting(NotContracting::Violation { certificate })
    })
}

/// `gⁿ·(h g^{−2n} h⁻¹)·gⁿ`.
pub fn combine_contracting(group: &MarkedGroup, g: &Element, h: &Element, n: i64) -> Element {
    let gn = group.pow(g, n);
    let mid = group.multiply(&group.multiply(h, &group.pow(g, -2 * n)), &group.inverse(h));
    group.multiply(&group.multiply(&gn, &mid), &gn)
}

/// A contracting extension `u = h^{±N}` of `g` and its verification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtensionWitness {
    pub u: Element,
    /// Signed exponent: `u = h^power`.
    pub power: i64,
    /// Exponent of the chosen projection of `g⁻¹·o` onto the `⟨h⟩`-orbit.
    pub projection_power: i64,
    /// `d(g·o, τ(T − L))` along `τ = [o, gu·o]`.
    pub start_gap: usize,
    pub tail: Option<TailWitness>,
    /// Both conclusions hold: `start_gap <= α` and `gu ∈ T(α, L)`.
    pub verified: bool,
}

/// Picks `u = h^{±N}` with `N` minimal such that `|h^N| >= L`, signed
/// against the projection of `g⁻¹·o` onto the `⟨h⟩`-orbit (positive on ties),
/// and verifies `gu` has an `(α, L)`-contracting tail with `g·o` near its start.
pub fn contracting_extension(
    group: &MarkedGroup,
    g: &Element,
    l: usize,
    h: &ContractingElementWitness,
    budget: &Budget,
) -> Result<ExtensionWitness> {
    let alpha = h.alpha;
    let mut n = 1i64;
    while group.pow(&h.element, n).len() < l {
        n += 1;
        if n as usize > l + 1 {
            return Err(Error::Precondition(format!(
                "no power of {} reaches length {l}",
                h.element
            )));
        }
    }
    let reach = (g.len() + l + 1) as i64;
    let ginv = group.inverse(g);
    let powers: Vec<(i64, Element)> = (-reach..=reach).map(|k| (k, group.pow(&h.element, k))).collect();
    let orbit = SubsetWindow::from_points(powers.iter().map(|(_, e)| e.clone()).collect(), reach as usize);
    let nearest = project(group, &ginv, &orbit);
    let projection_power = powers
        .iter()
        .filter(|(_, e)| nearest.contains(e))
        .map(|(k, _)| *k)
        .min_by_key(|k| (k.abs(), -k.signum()))
        .expect("projection is nonempty");
    let power = if projection_power <= 0 { n } else { -n };
    let u = group.pow(&h.element, power);
    let gu = group.multiply(g, &u);
    let tau = geodesic(group, &group.identity(), &gu);
    let t = tau.len() - 1;
    let start_gap = if t >= l {
        group.distance(g, &tau[t - l])
    } else {
        usize::MAX
    };
    let mut searcher = TailSearcher::new(group.clone(), alpha, TailScope::Canonical, *budget);
    let tail = searcher.find(&gu, l)?;
    let verified = start_gap <= alpha && tail.is_some();
    Ok(ExtensionWitness {
        u,
        power,
        projection_power,
        start_gap,
        tail,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_generators_are_contracting() {
        let f2 = MarkedGroup::free(2);
        let v = detect_contracting(&f2, &f2.parse("a").unwrap(), 8, 1, &Budget::default()).unwrap();
        let w = v.witness().expect("a is contracting");
        assert_eq!(w.lambda, 1.0);
        assert_eq!(w.epsilon, 0.0);
        let id = detect_contracting(&f2, &f2.identity(), 8, 1, &Budget::default()).unwrap();
        assert!(matches!(
            id,
            ContractingVerdict::NotContracting(NotContracting::BoundedOrbit { power: 1 })
        ));
    }

    #[test]
    fn lattice_generator_is_not_contracting() {
        let z2 = MarkedGroup::free_abelian(2);
        let v = detect_contracting(&z2, &z2.parse("a").unwrap(), 5, 1, &Budget::default()).unwrap();
        assert!(matches!(
            v,
            ContractingVerdict::NotContracting(NotContracting::Violation { .. })
        ));
    }

    #[test]
    fn combination() {
        let f2 = MarkedGroup::free(2);
        let (a, b) = (f2.parse("a").unwrap(), f2.parse("b").unwrap());
        let f = combine_contracting(&f2, &a, &b, 2);
        assert_eq!(f, f2.parse("a^2 b a^-4 b^-1 a^2").unwrap());
        assert_eq!(f.len(), 10);
        assert!(combine_contracting(&f2, &a, &f2.identity(), 3).is_identity());
        let f3 = combine_contracting(&f2, &a, &b, 3);
        assert!(detect_contracting(&f2, &f3, 8, 2, &Budget::default())
            .unwrap()
            .is_contracting());
    }

    #[test]
    fn extensions() {
        let f2 = MarkedGroup::free(2);
        let a = f2.parse("a").unwrap();
        let h = detect_contracting(&f2, &a, 8, 1, &Budget::default()).unwrap();
        let h = h.witness().unwrap();
        let ext = contracting_extension(&f2, &f2.parse("bbb").unwrap(), 2, h, &Budget::default()).unwrap();
        assert_eq!(ext.u, f2.parse("aa").unwrap());
        assert_eq!(ext.start_gap, 0);
        assert!(ext.verified);

        let ext = contracting_extension(&f2, &f2.parse("a^-4 b").unwrap(), 3, h, &Budget::default()).unwrap();
        assert_eq!(ext.u, f2.parse("aaa").unwrap());
        assert_eq!(ext.power, 3);
        assert!(ext.verified);

        let ext = contracting_extension(&f2, &f2.identity(), 2, h, &Budget::default()).unwrap();
        assert_eq!(ext.u.len(), 2);
        assert!(ext.verified);

        // projection of g⁻¹ = A at a negative power: positive sign
        let ext = contracting_extension(&f2, &a, 2, h, &Budget::default()).unwrap();
        assert_eq!(ext.projection_power, -1);
        assert_eq!(ext.power, 2);
        // projection at a positive power: negative sign
        let ext = contracting_extension(&f2, &f2.parse("Ab").unwrap(), 2, h, &Budget::default()).unwrap();
        assert_eq!(ext.projection_power, 0);
        let ext = contracting_extension(&f2, &f2.parse("bA").unwrap(), 2, h, &Budget::default()).unwrap();
        assert_eq!(ext.projection_power, 1);
        assert_eq!(ext.power, -2);
        assert!(ext.verified);
    }
}
