//! Letters, words and their textual form.
//!
//! Generator `i` is written with the `i`-th lowercase latin letter and its
//! inverse with the matching uppercase letter, so `aBa` is `a b⁻¹ a`. The
//! parser also accepts exponents (`a^3 b^-2`) and `1` for the empty word.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Maximum number of generators representable by the textual alphabet.
pub const MAX_RANK: usize = 26;

/// A generator or its inverse; letter `2i` is generator `i`, `2i + 1` its inverse.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u8) << 1 | inverse as u8)
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// `+1` for a generator, `-1` for an inverse.
    #[inline]
    pub fn sign(self) -> i64 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        if c.is_ascii_lowercase() {
            Some(Letter::new((c as u8 - b'a') as usize, false))
        } else if c.is_ascii_uppercase() {
            Some(Letter::new((c as u8 - b'A') as usize, true))
        } else {
            None
        }
    }
}

/// A group element, stored as its canonical word.
///
/// Canonical words produced by [`MarkedGroup`](super::MarkedGroup) are
/// geodesic, so the word length is the distance `d(o, g·o)`.
/// Ordering is shortlex, which is also the breadth-first enumeration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element(Vec<Letter>);

impl Element {
    pub fn identity() -> Self {
        Element(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Element(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    /// Word length; equals `d(o, g·o)` for canonical words.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First `n` letters (or the whole word).
    pub fn prefix(&self, n: usize) -> Element {
        Element(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Formal inverse word (reversed, letters inverted); not normalized.
    pub fn formal_inverse(&self) -> Vec<Letter> {
        self.0.iter().rev().map(|l| l.inverse()).collect()
    }

    /// Length of the longest common prefix.
    pub fn common_prefix_len(&self, other: &Element) -> usize {
        self.0
            .iter()
            .zip(other.0.iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    pub fn starts_with(&self, prefix: &Element) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Parses a raw (not normalized) word.
pub fn parse_word(text: &str) -> Result<Vec<Letter>> {
    let err = |reason: &str| Error::InvalidWord {
        word: text.to_string(),
        reason: reason.to_string(),
    };
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '1' && out.is_empty() && chars.len() == 1 {
            return Ok(out);
        }
        let letter = Letter::from_char(c).ok_or_else(|| err("unexpected character"))?;
        i += 1;
        let mut exponent: i64 = 1;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            exponent = digits.parse().map_err(|_| err("malformed exponent"))?;
        }
        let (l, n) = if exponent < 0 {
            (letter.inverse(), exponent.unsigned_abs())
        } else {
            (letter, exponent as u64)
        };
        out.extend(std::iter::repeat_n(l, n as usize));
    }
    Ok(out)
}

impl FromStr for Element {
    type Err = Error;

    /// Parses the word verbatim. Use [`MarkedGroup::parse`](super::MarkedGroup::parse)
    /// to obtain a canonical element.
    fn from_str(s: &str) -> Result<Self> {
        parse_word(s).map(Element)
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
