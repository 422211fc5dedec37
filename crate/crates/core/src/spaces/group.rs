//! Marked groups with a solvable word problem.
//!
//! Every supported kind comes with a geodesic, prefix-closed normal form.
//! Prefix-closure lets the ball enumeration grow spheres by appending one
//! letter at a time, and [`NfState`] is the finite-state recognizer of the
//! normal-form language that decides whether an extension stays canonical.

use serde::{Deserialize, Serialize};

use super::word::{parse_word, Element, Letter, MAX_RANK};
use crate::error::{Error, Result};

/// JSON form of a group definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    /// Free group on `rank` generators.
    Free { rank: usize },
    /// `Z^dim` with the standard basis; the word metric is the L1 metric.
    FreeAbelian { dim: usize },
    /// Free product of cyclic groups: generator `i` has order `orders[i]`
    /// (`0` for infinite order), i.e. the presentation `<x_i | x_i^{n_i}>`.
    FreeProduct { orders: Vec<u32> },
    /// Finite group given by a multiplication table (`table[i][j] = i·j`)
    /// and the table indices of its generators.
    Finite {
        table: Vec<Vec<u32>>,
        generators: Vec<u32>,
    },
}

/// Finite group backed by its multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
    generators: Vec<u32>,
    /// Shortlex spanning tree: `parent[e] = (p, x)` with `p·x = e`.
    parent: Vec<Option<(u32, Letter)>>,
    /// Shortlex normal forms indexed by element.
    words: Vec<Element>,
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<u32>>, generators: Vec<u32>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidSpec("empty multiplication table".into()));
        }
        if table.iter().any(|row| row.len() != order) {
            return Err(Error::InvalidSpec("multiplication table is not square".into()));
        }
        if table.iter().flatten().any(|&x| x as usize >= order) {
            return Err(Error::InvalidSpec("table entry out of range".into()));
        }
        if generators.len() > MAX_RANK || generators.iter().any(|&g| g as usize >= order) {
            return Err(Error::InvalidSpec("bad generator list".into()));
        }
        let flat: Vec<u32> = table.into_iter().flatten().collect();
        let mul = |a: u32, b: u32| flat[a as usize * order + b as usize];
        let identity = (0..order as u32)
            .find(|&e| (0..order as u32).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::InvalidSpec("no identity element".into()))?;
        for a in 0..order as u32 {
            for b in 0..order as u32 {
                for c in 0..order as u32 {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(Error::InvalidSpec("table is not associative".into()));
                    }
                }
            }
        }
        let mut inverse = vec![0; order];
        for a in 0..order as u32 {
            inverse[a as usize] = (0..order as u32)
                .find(|&b| mul(a, b) == identity)
                .ok_or_else(|| Error::InvalidSpec(format!("element {a} has no inverse")))?;
        }
        let mut group = FiniteGroup {
            order,
            table: flat,
            identity,
            inverse,
            generators,
            parent: vec![None; order],
            words: vec![Element::identity(); order],
        };
        group.build_shortlex_tree()?;
        Ok(group)
    }

    fn build_shortlex_tree(&mut self) -> Result<()> {
        let mut seen = vec![false; self.order];
        seen[self.identity as usize] = true;
        let mut frontier = vec![self.identity];
        let letters = 2 * self.generators.len();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &e in &frontier {
                for l in 0..letters {
                    let x = Letter(l as u8);
                    let f = self.mul(e, self.letter_image(x));
                    if !seen[f as usize] {
                        seen[f as usize] = true;
                        self.parent[f as usize] = Some((e, x));
                        let mut w = self.words[e as usize].clone().into_letters();
                        w.push(x);
                        self.words[f as usize] = Element::from_letters(w);
                        next.push(f);
                    }
                }
            }
            frontier = next;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidSpec("generators do not generate the group".into()));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn letter_image(&self, x: Letter) -> u32 {
        let g = self.generators[x.generator()];
        if x.is_inverse() {
            self.inverse[g as usize]
        } else {
            g
        }
    }

    pub fn evaluate(&self, word: &[Letter]) -> u32 {
        word.iter()
            .fold(self.identity, |acc, &x| self.mul(acc, self.letter_image(x)))
    }

    pub fn word_of(&self, e: u32) -> &Element {
        &self.words[e as usize]
    }

    fn table_rows(&self) -> Vec<Vec<u32>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }
}

/// Kind of a marked group together with the data its normal form needs.
#[derive(Clone, Debug)]
pub enum GroupKind {
    Free { rank: usize },
    FreeAbelian { dim: usize },
    FreeProduct { orders: Vec<u32> },
    Finite(FiniteGroup),
}

/// State of the normal-form recognizer after reading a canonical word.
///
/// `last` is the last letter (`u8::MAX` for the empty word); `aux` is the
/// current syllable length for free products and the element index for
/// finite groups.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct NfState {
    pub last: u8,
    pub aux: u32,
}

const NO_LETTER: u8 = u8::MAX;

/// A finitely generated group with a fixed symmetric generating set.
#[derive(Clone, Debug)]
pub struct MarkedGroup {
    kind: GroupKind,
}

impl MarkedGroup {
    pub fn free(rank: usize) -> Self {
        assert!((1..=MAX_RANK).contains(&rank), "rank out of range");
        MarkedGroup {
            kind: GroupKind::Free { rank },
        }
    }

    pub fn free_abelian(dim: usize) -> Self {
        assert!((1..=MAX_RANK).contains(&dim), "dimension out of range");
        MarkedGroup {
            kind: GroupKind::FreeAbelian { dim },
        }
    }

    /// Free product of cyclic groups; `0` marks an infinite cyclic factor.
    pub fn free_product(orders: Vec<u32>) -> Self {
        assert!((1..=MAX_RANK).contains(&orders.len()), "rank out of range");
        MarkedGroup {
            kind: GroupKind::FreeProduct { orders },
        }
    }

    /// `Z/k * Z`, the quotient of the free group of rank two by the normal closure of `a^k`.
    pub fn cyclic_free_product(k: u32) -> Self {
        Self::free_product(vec![k, 0])
    }

    pub fn finite(group: FiniteGroup) -> Self {
        MarkedGroup {
            kind: GroupKind::Finite(group),
        }
    }

    /// Cyclic group `Z/n` with one generator.
    pub fn cyclic(n: u32) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let generators = vec![if n > 1 { 1 } else { 0 }];
        Self::finite(FiniteGroup::new(table, generators).expect("cyclic table is valid"))
    }

    /// The trivial group with `rank` (trivial) generators.
    pub fn trivial(rank: usize) -> Self {
        Self::finite(FiniteGroup::new(vec![vec![0]], vec![0; rank]).expect("trivial table"))
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        let check_rank = |r: usize| {
            if (1..=MAX_RANK).contains(&r) {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("rank {r} outside 1..={MAX_RANK}")))
            }
        };
        Ok(match spec {
            GroupSpec::Free { rank } => {
                check_rank(*rank)?;
                Self::free(*rank)
            }
            GroupSpec::FreeAbelian { dim } => {
                check_rank(*dim)?;
                Self::free_abelian(*dim)
            }
            GroupSpec::FreeProduct { orders } => {
                check_rank(orders.len())?;
                Self::free_product(orders.clone())
            }
            GroupSpec::Finite { table, generators } => {
                check_rank(generators.len().max(1))?;
                Self::finite(FiniteGroup::new(table.clone(), generators.clone())?)
            }
        })
    }

    pub fn spec(&self) -> GroupSpec {
        match &self.kind {
            GroupKind::Free { rank } => GroupSpec::Free { rank: *rank },
            GroupKind::FreeAbelian { dim } => GroupSpec::FreeAbelian { dim: *dim },
            GroupKind::FreeProduct { orders } => GroupSpec::FreeProduct {
                orders: orders.clone(),
            },
            GroupKind::Finite(f) => GroupSpec::Finite {
                table: f.table_rows(),
                generators: f.generators.clone(),
            },
        }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind, GroupKind::Free { .. })
    }

    pub fn is_free_abelian(&self) -> bool {
        matches!(self.kind, GroupKind::FreeAbelian { .. })
    }

    /// Number of generators.
    pub fn rank(&self) -> usize {
        match &self.kind {
            GroupKind::Free { rank } => *rank,
            GroupKind::FreeAbelian { dim } => *dim,
            GroupKind::FreeProduct { orders } => orders.len(),
            GroupKind::Finite(f) => f.generators.len(),
        }
    }

    /// The symmetric alphabet in generator order `a, A, b, B, …`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * self.rank() as u8).map(Letter)
    }

    pub fn identity(&self) -> Element {
        Element::identity()
    }

    /// Parses a word and returns its canonical element.
    pub fn parse(&self, text: &str) -> Result<Element> {
        let w = parse_word(text)?;
        if let Some(bad) = w.iter().find(|l| l.generator() >= self.rank()) {
            return Err(Error::InvalidWord {
                word: text.to_string(),
                reason: format!("letter {} is not in the alphabet", bad.to_char()),
            });
        }
        Ok(self.normal_form(&w))
    }

    /// Canonical word of the element represented by `word`.
    pub fn normal_form(&self, word: &[Letter]) -> Element {
        match &self.kind {
            GroupKind::Free { .. } => {
                let mut out: Vec<Letter> = Vec::with_capacity(word.len());
                for &x in word {
                    if out.last() == Some(&x.inverse()) {
                        out.pop();
                    } else {
                        out.push(x);
                    }
                }
                Element::from_letters(out)
            }
            GroupKind::FreeAbelian { dim } => {
                let mut exps = vec![0i64; *dim];
                for &x in word {
                    exps[x.generator()] += x.sign();
                }
                Self::lattice_word(&exps)
            }
            GroupKind::FreeProduct { orders } => {
                let mut syllables: Vec<(usize, i64)> = Vec::new();
                for &x in word {
                    let g = x.generator();
                    let k = orders[g] as i64;
                    let reduce = |e: i64| if k > 0 { e.rem_euclid(k) } else { e };
                    match syllables.last_mut() {
                        Some((h, e)) if *h == g => {
                            *e = reduce(*e + x.sign());
                            if *e == 0 {
                                syllables.pop();
                            }
                        }
                        _ => {
                            let e = reduce(x.sign());
                            if e != 0 {
                                syllables.push((g, e));
                            }
                        }
                    }
                }
                let mut out = Vec::new();
                for (g, e) in syllables {
                    let k = orders[g] as i64;
                    // residue r in [0, k): a^r if r <= k/2, else A^(k-r)
                    let signed = if k > 0 && 2 * e > k { e - k } else { e };
                    let l = Letter::new(g, signed < 0);
                    out.extend(std::iter::repeat_n(l, signed.unsigned_abs() as usize));
                }
                Element::from_letters(out)
            }
            GroupKind::Finite(f) => f.word_of(f.evaluate(word)).clone(),
        }
    }

    fn lattice_word(exps: &[i64]) -> Element {
        let mut out = Vec::new();
        for (i, &e) in exps.iter().enumerate() {
            let l = Letter::new(i, e < 0);
            out.extend(std::iter::repeat_n(l, e.unsigned_abs() as usize));
        }
        Element::from_letters(out)
    }

    /// Element of `Z^dim` with the given coordinates.
    pub fn lattice_point(&self, coords: &[i64]) -> Result<Element> {
        match self.kind {
            GroupKind::FreeAbelian { dim } if coords.len() == dim => Ok(Self::lattice_word(coords)),
            _ => Err(Error::Unsupported(
                "lattice coordinates need a free abelian group of matching dimension".into(),
            )),
        }
    }

    /// Exponent-sum vector (abelianization image) of a word.
    pub fn exponent_sums(&self, g: &Element) -> Vec<i64> {
        let mut v = vec![0i64; self.rank()];
        for x in g.letters() {
            v[x.generator()] += x.sign();
        }
        v
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        if let GroupKind::Free { .. } = self.kind {
            let (a, b) = (g.letters(), h.letters());
            let mut k = 0;
            while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inverse() {
                k += 1;
            }
            let mut out = Vec::with_capacity(a.len() + b.len() - 2 * k);
            out.extend_from_slice(&a[..a.len() - k]);
            out.extend_from_slice(&b[k..]);
            return Element::from_letters(out);
        }
        let mut w = g.letters().to_vec();
        w.extend_from_slice(h.letters());
        self.normal_form(&w)
    }

    pub fn mul_letter(&self, g: &Element, x: Letter) -> Element {
        if let GroupKind::Free { .. } = self.kind {
            let mut w = g.letters().to_vec();
            if w.last() == Some(&x.inverse()) {
                w.pop();
            } else {
                w.push(x);
            }
            return Element::from_letters(w);
        }
        let mut w = g.letters().to_vec();
        w.push(x);
        self.normal_form(&w)
    }

    pub fn inverse(&self, g: &Element) -> Element {
        self.normal_form(&g.formal_inverse())
    }

    /// `g^n` for any integer `n`.
    pub fn pow(&self, g: &Element, n: i64) -> Element {
        let base = if n < 0 { self.inverse(g) } else { g.clone() };
        let mut acc = Element::identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.multiply(&acc, &base);
        }
        acc
    }

    /// Word length `d(o, g·o)`.
    pub fn length(&self, g: &Element) -> usize {
        g.len()
    }

    /// `d(g·o, h·o) = |g⁻¹h|`.
    pub fn distance(&self, g: &Element, h: &Element) -> usize {
        if let GroupKind::Free { .. } = self.kind {
            let k = g.common_prefix_len(h);
            return g.len() + h.len() - 2 * k;
        }
        if let GroupKind::FreeAbelian { .. } = self.kind {
            let (a, b) = (self.exponent_sums(g), self.exponent_sums(h));
            return a.iter().zip(&b).map(|(x, y)| (x - y).unsigned_abs() as usize).sum();
        }
        self.multiply(&self.inverse(g), h).len()
    }

    /// True when `word` is already canonical.
    pub fn is_normal_form(&self, word: &[Letter]) -> bool {
        self.normal_form(word).letters() == word
    }

    pub fn start_state(&self) -> NfState {
        match &self.kind {
            GroupKind::Finite(f) => NfState {
                last: NO_LETTER,
                aux: f.identity(),
            },
            _ => NfState {
                last: NO_LETTER,
                aux: 0,
            },
        }
    }

    /// Reads one more letter: returns the new state if `w·x` is canonical
    /// whenever `w` is a canonical word ending in `state`.
    #[inline]
    pub fn step(&self, state: NfState, x: Letter) -> Option<NfState> {
        let has_last = state.last != NO_LETTER;
        let last = Letter(state.last);
        match &self.kind {
            GroupKind::Free { .. } => {
                if has_last && last == x.inverse() {
                    None
                } else {
                    Some(NfState { last: x.0, aux: 0 })
                }
            }
            GroupKind::FreeAbelian { .. } => {
                if !has_last || last == x || x.generator() > last.generator() {
                    Some(NfState { last: x.0, aux: 0 })
                } else {
                    None
                }
            }
            GroupKind::FreeProduct { orders } => {
                let run = if has_last && last == x {
                    state.aux + 1
                } else if has_last && last.generator() == x.generator() {
                    return None;
                } else {
                    1
                };
                let k = orders[x.generator()];
                // canonical syllables: a^m with m <= k/2, A^m with m < k/2
                let ok = k == 0 || if x.is_inverse() { 2 * run < k } else { 2 * run <= k };
                ok.then_some(NfState { last: x.0, aux: run })
            }
            GroupKind::Finite(f) => {
                let e = state.aux;
                let next = f.mul(e, f.letter_image(x));
                (f.parent[next as usize] == Some((e, x))).then_some(NfState { last: x.0, aux: next })
            }
        }
    }

    /// Runs the recognizer on a whole word.
    pub fn state_of(&self, word: &[Letter]) -> Option<NfState> {
        word.iter()
            .try_fold(self.start_state(), |s, &x| self.step(s, x))
    }

    /// Stable 256-bit fingerprint of the group definition.
    pub fn fingerprint(&self) -> [u8; 32] {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_vec(&self.spec()).expect("group spec serializes");
        Sha256::digest(&json).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(g: &MarkedGroup, s: &str) -> Element {
        g.parse(s).unwrap()
    }

    #[test]
    fn free_reduction() {
        let f2 = MarkedGroup::free(2);
        assert_eq!(el(&f2, "abBA").to_string(), "1");
        assert_eq!(el(&f2, "a^2 b a^-4 B a^2").len(), 10);
        let g = el(&f2, "aba^-1");
        let h = el(&f2, "b");
        assert_eq!(f2.distance(&g, &h), 4);
    }

    #[test]
    fn lattice_normal_form_is_sorted() {
        let z2 = MarkedGroup::free_abelian(2);
        let g = el(&z2, "BaBaa");
        assert_eq!(g.to_string(), "aaaBB");
        assert_eq!(z2.exponent_sums(&g), vec![3, -2]);
        assert_eq!(z2.distance(&z2.identity(), &g), 5);
    }

    #[test]
    fn free_product_syllables() {
        let q = MarkedGroup::cyclic_free_product(4);
        assert_eq!(el(&q, "aaa").to_string(), "A");
        assert_eq!(el(&q, "AA").to_string(), "aa");
        assert_eq!(el(&q, "aaaa").to_string(), "1");
        let q2 = MarkedGroup::cyclic_free_product(2);
        assert_eq!(el(&q2, "A").to_string(), "a");
        assert_eq!(el(&q2, "aa").to_string(), "1");
        let q1 = MarkedGroup::cyclic_free_product(1);
        assert_eq!(el(&q1, "abab").to_string(), "bb");
    }

    #[test]
    fn finite_group_shortlex() {
        let z5 = MarkedGroup::cyclic(5);
        assert_eq!(el(&z5, "aaaa").to_string(), "A");
        assert_eq!(el(&z5, "aaa").to_string(), "AA");
        let triv = MarkedGroup::trivial(2);
        assert!(el(&triv, "abAb").is_identity());
    }

    #[test]
    fn recognizer_agrees_with_normal_form() {
        let groups = [
            MarkedGroup::free(2),
            MarkedGroup::free_abelian(2),
            MarkedGroup::cyclic_free_product(3),
            MarkedGroup::cyclic_free_product(4),
            MarkedGroup::free_product(vec![2, 2, 0]),
            MarkedGroup::cyclic(6),
        ];
        for g in &groups {
            // every word of length <= 5
            let mut words: Vec<Vec<Letter>> = vec![vec![]];
            for _ in 0..5 {
                let mut next = Vec::new();
                for w in &words {
                    for x in g.letters() {
                        let mut v = w.clone();
                        v.push(x);
                        next.push(v);
                    }
                }
                for w in &next {
                    assert_eq!(
                        g.state_of(w).is_some(),
                        g.is_normal_form(w),
                        "{:?} on {:?}",
                        g.spec(),
                        w
                    );
                }
                words = next;
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let specs = [
            r#"{"kind":"free","rank":3}"#,
            r#"{"kind":"free_abelian","dim":2}"#,
            r#"{"kind":"free_product","orders":[3,0]}"#,
            r#"{"kind":"finite","table":[[0,1],[1,0]],"generators":[1]}"#,
        ];
        for s in specs {
            let spec: GroupSpec = serde_json::from_str(s).unwrap();
            let g = MarkedGroup::from_spec(&spec).unwrap();
            assert_eq!(g.spec(), spec);
        }
        let bad: GroupSpec =
            serde_json::from_str(r#"{"kind":"finite","table":[[0,1],[0,1]],"generators":[1]}"#)
                .unwrap();
        assert!(MarkedGroup::from_spec(&bad).is_err());
    }
}
