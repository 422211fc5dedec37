//! Exact Kochen–Stone verification on finite probability spaces.
//!
//! With `S(N) = Σ_{n<=N} μ(B_n)` and `D(N) = Σ_{n,m<=N} μ(B_n ∩ B_m)`, the
//! smallest admissible constant is `C = sup_N D(N)/S(N)²`. For an eventually
//! periodic sequence, along each residue class of `N` both sums are
//! polynomials in the number of completed periods `k`, and the derivative of
//! the ratio has a numerator linear in `k`. The supremum is therefore
//! attained at `k = 0`, next to the single critical point, or in the limit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::densities::tree::to_f64;
use crate::error::{Error, Result};

/// `B_1, B_2, …` as index sets: `prefix` once, then `period` forever.
/// An empty period means the sequence stops after the prefix.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SetSequence {
    #[serde(default)]
    pub prefix: Vec<Vec<usize>>,
    #[serde(default)]
    pub period: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum KochenStoneVerdict {
    Holds,
    Violated,
    /// `Σ μ(B_n) < ∞`; the hypothesis is vacuous.
    NotDivergent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KochenStoneReport {
    /// Exact `C` as `p/q`.
    pub c: String,
    pub c_value: f64,
    pub bound: f64,
    /// Exact `μ(limsup B_n)` as `p/q`.
    pub limsup_mass: String,
    pub limsup_mass_value: f64,
    /// Whether the supremum is only approached as `N → ∞`.
    pub c_at_infinity: bool,
    pub verdict: KochenStoneVerdict,
}

struct Exact {
    c: BigRational,
    at_infinity: bool,
}

impl Exact {
    fn offer(&mut self, v: BigRational, at_infinity: bool) {
        if v > self.c {
            self.c = v;
            self.at_infinity = at_infinity;
        }
    }
}

pub fn kochen_stone_check(mu: &[BigRational], seq: &SetSequence) -> Result<KochenStoneReport> {
    if mu.iter().any(|m| m.is_negative()) {
        return Err(Error::InvalidSpec("negative atom mass".into()));
    }
    if mu.iter().fold(BigRational::zero(), |a, b| a + b) != BigRational::one() {
        return Err(Error::InvalidSpec("atom masses must sum to 1".into()));
    }
    let sets: Vec<Vec<bool>> = seq
        .prefix
        .iter()
        .chain(&seq.period)
        .map(|s| {
            let mut v = vec![false; mu.len()];
            for &i in s {
                *v.get_mut(i).ok_or_else(|| Error::InvalidSpec(format!("atom index {i} out of range")))? = true;
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let (np, nq) = (seq.prefix.len(), seq.period.len());
    let inter = |i: usize, j: usize| -> BigRational {
        (0..mu.len())
            .filter(|&t| sets[i][t] && sets[j][t])
            .fold(BigRational::zero(), |a, t| a + &mu[t])
    };
    let n = sets.len();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = inter(i, j);
        }
    }
    let total: BigRational = (0..n).fold(BigRational::zero(), |a, i| a + &m[i][i]);
    if total.is_zero() {
        return Err(Error::Precondition("Σ μ(B_n) must be positive".into()));
    }
    let per: Vec<usize> = (np..n).collect();
    let s: BigRational = per.iter().fold(BigRational::zero(), |a, &i| a + &m[i][i]);
    let gamma: BigRational = per
        .iter()
        .flat_map(|&i| per.iter().map(move |&j| (i, j)))
        .fold(BigRational::zero(), |a, (i, j)| a + &m[i][j]);

    let mut best = Exact {
        c: BigRational::zero(),
        at_infinity: false,
    };
    // Running sums over the listed sets: N = 1..=n.
    let mut sn = BigRational::zero();
    let mut dn = BigRational::zero();
    let mut first: Vec<(BigRational, BigRational)> = Vec::with_capacity(n + 1);
    first.push((BigRational::zero(), BigRational::zero()));
    for k in 0..n {
        sn += &m[k][k];
        let cross = (0..k).fold(BigRational::zero(), |a, j| a + &m[k][j]);
        dn += &m[k][k] + cross * BigInt::from(2);
        if !sn.is_zero() {
            best.offer(&dn / (&sn * &sn), false);
        }
        first.push((sn.clone(), dn.clone()));
    }
    let divergent = nq > 0 && !s.is_zero();
    if divergent {
        for j in 0..nq {
            let f = np + j;
            let (a, alpha) = first[f].clone();
            let two = BigRational::from_integer(BigInt::from(2));
            let beta = per
                .iter()
                .flat_map(|&q| (0..f).map(move |i| (i, q)))
                .fold(BigRational::zero(), |acc, (i, q)| acc + &m[i][q])
                * &two;
            let ratio = |k: &BigRational| -> Option<BigRational> {
                let g = &a + &s * k;
                (!g.is_zero()).then(|| (&alpha + &beta * k + &gamma * k * k) / (&g * &g))
            };
            let mut ks = vec![BigRational::zero(), BigRational::one()];
            let den = &two * &gamma * &a - &beta * &s;
            if !den.is_zero() {
                let kstar = (&two * &s * &alpha - &beta * &a) / den;
                if kstar.is_positive() {
                    ks.push(kstar.floor());
                    ks.push(kstar.ceil());
                }
            }
            for k in &ks {
                if let Some(r) = ratio(k) {
                    best.offer(r, false);
                }
            }
        }
        best.offer(&gamma / (&s * &s), true);
    }
    let limsup = (0..mu.len())
        .filter(|&t| per.iter().any(|&i| sets[i][t]))
        .fold(BigRational::zero(), |a, t| a + &mu[t]);
    let bound = best.c.recip();
    let verdict = if !divergent {
        KochenStoneVerdict::NotDivergent
    } else if limsup >= bound {
        KochenStoneVerdict::Holds
    } else {
        KochenStoneVerdict::Violated
    };
    Ok(KochenStoneReport {
        c: best.c.to_string(),
        c_value: to_f64(&best.c),
        bound: to_f64(&bound),
        limsup_mass: limsup.to_string(),
        limsup_mass_value: to_f64(&limsup),
        c_at_infinity: best.at_infinity,
        verdict,
    })
}
