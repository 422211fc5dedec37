//! Limits of sequences and reduced equivalence of cocycles.

use serde::Serialize;

use super::{Cocycle, L1Mode, TreeEnd};
use crate::error::{Error, Result};
use crate::spaces::{enumerate_ball, Budget, Element, GroupKind, MarkedGroup};

/// Classification of `lim z_n` in the horocompactification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryLimit {
    pub cocycle: Cocycle,
    /// `false` is the NO-LIMIT-CERTIFIED flag: `cocycle` is only the window
    /// restriction of `b_{z_N}` for the last term.
    pub certified: bool,
    pub horizon: usize,
    /// Radius of the ball on which the limit was checked against `b_{z_N}`.
    pub test_radius: usize,
}

/// Smallest `(s, p)` with `w[i] = w[i + p]` for `i >= s` and at least three periods.
fn fit_eventually_periodic(w: &[crate::spaces::Letter]) -> Option<(usize, usize)> {
    let n = w.len();
    let mut best: Option<(usize, usize)> = None;
    for p in 1..=n / 3 {
        let mut s = n - p;
        while s > 0 && w[s - 1] == w[s - 1 + p] {
            s -= 1;
        }
        if n - s >= 3 * p && best.is_none_or(|(bs, bp)| s + p < bs + bp) {
            best = Some((s, p));
        }
    }
    best
}

/// Classifies the limit of `seq(1), …, seq(horizon)` on `B(o, test_radius)`.
///
/// Exact for free groups (stabilizing prefixes give a tree end) and free
/// abelian groups (each coordinate is eventually constant or tends to ±∞).
/// Otherwise the window restriction of the last Busemann cocycle is returned
/// with `certified = false`.
pub fn boundary_limit(
    group: &MarkedGroup,
    seq: impl Fn(usize) -> Element,
    horizon: usize,
    test_radius: usize,
) -> Result<BoundaryLimit> {
    if horizon < 3 {
        return Err(Error::HorizonExhausted("need at least three terms".into()));
    }
    let terms: Vec<Element> = (1..=horizon).map(|n| group.normal_form(seq(n).letters())).collect();
    let last = terms.last().expect("horizon >= 3").clone();
    let ball = enumerate_ball(group, test_radius, &Budget::default())?;
    let test_points = ball.elements();
    let agrees = |c: &Cocycle| -> Result<bool> {
        let bz = Cocycle::interior(last.clone());
        for x in &test_points {
            if c.potential(group, x)? != bz.potential(group, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let done = |cocycle, certified| BoundaryLimit {
        cocycle,
        certified,
        horizon,
        test_radius,
    };

    let tail = &terms[horizon - horizon.div_ceil(3)..];
    if tail.iter().all(|t| *t == last) {
        return Ok(done(Cocycle::interior(last), true));
    }
    let half = &terms[horizon / 2..];
    match group.kind() {
        GroupKind::Free { .. } => {
            let k = half
                .iter()
                .map(|t| t.common_prefix_len(&last))
                .min()
                .unwrap_or(0);
            let w = &last.letters()[..k];
            if k > test_radius {
                if let Some((s, p)) = fit_eventually_periodic(w) {
                    let end = TreeEnd::new(
                        Element::from_letters(w[..s].to_vec()),
                        Element::from_letters(w[s..s + p].to_vec()),
                    )?;
                    let c = Cocycle::tree_end(end);
                    if agrees(&c)? {
                        return Ok(done(c, true));
                    }
                }
            }
        }
        GroupKind::FreeAbelian { dim } => {
            let coords: Vec<Vec<i64>> = half.iter().map(|t| group.exponent_sums(t)).collect();
            let mut modes = Vec::with_capacity(*dim);
            for i in 0..*dim {
                let col: Vec<i64> = coords.iter().map(|v| v[i]).collect();
                let fin = *col.last().expect("nonempty");
                let mode = if col.iter().all(|&c| c == fin) {
                    Some(L1Mode::Anchor(fin))
                } else if col.windows(2).all(|w| w[0] <= w[1]) && fin > test_radius as i64 {
                    Some(L1Mode::PlusInfinity)
                } else if col.windows(2).all(|w| w[0] >= w[1]) && fin < -(test_radius as i64) {
                    Some(L1Mode::MinusInfinity)
                } else {
                    None
                };
                match mode {
                    Some(m) => modes.push(m),
                    None => break,
                }
            }
            if modes.len() == *dim {
                let c = Cocycle::l1(modes);
                if agrees(&c)? {
                    return Ok(done(c, true));
                }
            }
        }
        _ => {}
    }
    Ok(done(
        Cocycle::window_from_interior(group, &last, test_points, test_radius),
        false,
    ))
}

/// Reduced-horoboundary comparison: `c ~ c'` iff `‖c − c'‖∞ < ∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Equivalence {
    /// `sup |c − c'| = sup_bound`, computed exactly.
    Equivalent { sup_bound: f64 },
    /// `|(c − c')(x_k, y)|` grows without bound along the listed pairs.
    Distinct {
        witnesses: Vec<(Element, Element, f64)>,
    },
    /// Window cocycles: only the sup over the window is known.
    Undecided { window_sup: f64 },
}

/// Decides reduced equivalence for exact models.
pub fn reduced_equiv(group: &MarkedGroup, c: &Cocycle, d: &Cocycle) -> Result<Equivalence> {
    let witness_along = |points: Vec<Element>| -> Result<Equivalence> {
        let o = group.identity();
        let mut witnesses = Vec::new();
        for x in points {
            let diff = c.evaluate(group, &o, &x)? - d.evaluate(group, &o, &x)?;
            witnesses.push((o.clone(), x, diff));
        }
        Ok(Equivalence::Distinct { witnesses })
    };
    match (c, d) {
        (Cocycle::Window { .. }, _) | (_, Cocycle::Window { .. }) => {
            let points = match (c, d) {
                (Cocycle::Window { points, .. }, _) | (_, Cocycle::Window { points, .. }) => points.clone(),
                _ => unreachable!(),
            };
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for x in &points {
                let v = c.potential(group, x)? - d.potential(group, x)?;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            Ok(Equivalence::Undecided { window_sup: hi - lo })
        }
        (Cocycle::Interior { z }, Cocycle::Interior { z: w }) => Ok(Equivalence::Equivalent {
            sup_bound: 2.0 * group.distance(z, w) as f64,
        }),
        (Cocycle::TreeEnd(e), Cocycle::TreeEnd(f)) if e == f => Ok(Equivalence::Equivalent { sup_bound: 0.0 }),
        (Cocycle::TreeEnd(e), other) | (other, Cocycle::TreeEnd(e)) => {
            let k = match other {
                Cocycle::TreeEnd(f) => (0..).find(|&i| e.letter(i) != f.letter(i)).expect("ends differ"),
                Cocycle::Interior { z } => z.len(),
                _ => return Err(Error::Unsupported("tree ends compare only with free-group cocycles".into())),
            };
            witness_along((1..=4).map(|j| e.truncate(k + 2 * j)).collect())
        }
        (Cocycle::L1Horo { modes: m }, Cocycle::L1Horo { modes: n }) => {
            if m.len() != n.len() {
                return Err(Error::Precondition("dimensions differ".into()));
            }
            let mut bound = 0i64;
            for (i, (&a, &b)) in m.iter().zip(n).enumerate() {
                match (a, b) {
                    (L1Mode::Anchor(p), L1Mode::Anchor(q)) => bound += 2 * (p - q).abs(),
                    (x, y) if x == y => {}
                    _ => {
                        let dir = match (a, b) {
                            (L1Mode::PlusInfinity, _) => 1,
                            (L1Mode::MinusInfinity, _) | (_, L1Mode::MinusInfinity) => -1,
                            _ => 1,
                        };
                        let pts = (1..=4)
                            .map(|j| {
                                let mut v = vec![0i64; m.len()];
                                v[i] = dir * 4 * j;
                                group.lattice_point(&v)
                            })
                            .collect::<Result<Vec<_>>>()?;
                        return witness_along(pts);
                    }
                }
            }
            Ok(Equivalence::Equivalent {
                sup_bound: bound as f64,
            })
        }
        (Cocycle::L1Horo { modes }, Cocycle::Interior { z }) | (Cocycle::Interior { z }, Cocycle::L1Horo { modes }) => {
            let anchors: Vec<L1Mode> = group.exponent_sums(z).into_iter().map(L1Mode::Anchor).collect();
            reduced_equiv(group, &Cocycle::l1(modes.clone()), &Cocycle::l1(anchors))
        }
    }
}
