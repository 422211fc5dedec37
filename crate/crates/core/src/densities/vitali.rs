//! Greedy Vitali selection of shadows on the ends of a free group.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::{Element, MarkedGroup};

/// `O_o(go, r)` read on ends: the cylinder through the first `|g| − r`
/// letters of `g`, or everything when `r >= |g|`.
pub fn shadow_cylinder(g: &Element, r: usize) -> Element {
    g.prefix(g.len().saturating_sub(r))
}

fn disjoint(u: &Element, v: &Element) -> bool {
    !u.starts_with(v) && !v.starts_with(u)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VitaliReport {
    /// Indices into the input, in selection order.
    pub selected: Vec<usize>,
    pub disjoint: bool,
    /// Every input shadow lies in some selected shadow enlarged to `r + 42α`.
    pub covered: bool,
    pub enlargement: usize,
}

/// Selects a pairwise disjoint subfamily of `O_o(g·o, r)`, scanning by
/// nondecreasing `|g|` with canonical-word tie-break, then verifies the
/// output. Tail membership on a tree reduces to `|g| >= l`.
pub fn vitali_select(
    group: &MarkedGroup,
    shadows: &[(Element, usize)],
    alpha: usize,
    l: usize,
) -> Result<VitaliReport> {
    if !group.is_free() {
        return Err(Error::Unsupported("shadow disjointness is decided on trees only".into()));
    }
    for (g, r) in shadows {
        if l <= r + 16 * alpha {
            return Err(Error::Precondition(format!("need L > r + 16α, got L={l}, r={r}, α={alpha}")));
        }
        if g.len() < l {
            return Err(Error::Precondition(format!("{g} is shorter than the tail length {l}")));
        }
    }
    let mut order: Vec<usize> = (0..shadows.len()).collect();
    order.sort_by(|&i, &j| {
        let (gi, gj) = (&shadows[i].0, &shadows[j].0);
        gi.len().cmp(&gj.len()).then_with(|| gi.cmp(gj)).then(i.cmp(&j))
    });
    let cyl: Vec<Element> = shadows.iter().map(|(g, r)| shadow_cylinder(g, *r)).collect();
    let mut selected: Vec<usize> = Vec::new();
    for i in order {
        if selected.iter().all(|&j| disjoint(&cyl[i], &cyl[j])) {
            selected.push(i);
        }
    }
    let is_disjoint = selected
        .iter()
        .enumerate()
        .all(|(a, &i)| selected[a + 1..].iter().all(|&j| disjoint(&cyl[i], &cyl[j])));
    let enlargement = 42 * alpha;
    let big: Vec<Element> = selected
        .iter()
        .map(|&j| shadow_cylinder(&shadows[j].0, shadows[j].1 + enlargement))
        .collect();
    let covered = cyl.iter().all(|c| big.iter().any(|b| c.starts_with(b)));
    Ok(VitaliReport {
        selected,
        disjoint: is_disjoint,
        covered,
        enlargement,
    })
}
