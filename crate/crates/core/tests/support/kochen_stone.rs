//! Brute-force Kochen–Stone oracle shared with the acceptance suite.

use num_rational::BigRational;
use psgrowth_core::densities::{kochen_stone_check, KochenStoneVerdict, SetSequence};

/// Brute force `sup_N D(N)/S(N)²` in integer arithmetic over a common denominator.
struct Brute {
    c: (i128, i128),
    limsup: i128,
    divergent: bool,
}

fn brute(mu: &[i128], seq: &[u8], period_len: usize, horizon: usize) -> Option<Brute> {
    let den: i128 = mu.iter().sum();
    let mass = |set: u8| (0..mu.len()).filter(|&t| set >> t & 1 == 1).map(|t| mu[t]).sum::<i128>();
    let np = seq.len() - period_len;
    let at = |n: usize| if n < np { seq[n] } else { seq[np + (n - np) % period_len] };
    let steps = if period_len == 0 { seq.len() } else { np + period_len * horizon };
    if (0..seq.len()).all(|n| mass(at(n)) == 0) {
        return None;
    }
    let mut counts = [0i128; 16];
    let (mut s, mut d) = (0i128, 0i128);
    let mut best = (0i128, 1i128);
    for n in 0..steps {
        let b = at(n);
        let cross: i128 = (0..16).map(|m| counts[m] * mass(m as u8 & b)).sum();
        s += mass(b);
        d += mass(b) + 2 * cross;
        counts[b as usize] += 1;
        if s > 0 && d * den * best.1 > best.0 * s * s {
            best = (d * den, s * s);
        }
    }
    let per = &seq[np..];
    let ps: i128 = per.iter().map(|&b| mass(b)).sum();
    let divergent = period_len > 0 && ps > 0;
    if divergent {
        let gamma: i128 = per.iter().flat_map(|&x| per.iter().map(move |&y| (x, y))).map(|(x, y)| mass(x & y)).sum();
        if gamma * den * best.1 > best.0 * ps * ps {
            best = (gamma * den, ps * ps);
        }
    }
    let union = per.iter().fold(0u8, |u, &b| u | b);
    Some(Brute {
        c: best,
        limsup: mass(union),
        divergent,
    })
}

fn sequences(len: usize, atoms: usize, out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for set in 0..(1u8 << atoms) {
        cur.push(set);
        sequences(len, atoms, out, cur);
        cur.pop();
    }
}

/// Compares the verifier with brute force on every family of length <= 4
/// over each listed space; returns the number of families checked.
pub fn check_all(spaces: &[Vec<i128>]) -> usize {
    let mut checked = 0usize;
    for mu in spaces {
        let den: i128 = mu.iter().sum();
        let exact: Vec<BigRational> = mu.iter().map(|&m| BigRational::new(m.into(), den.into())).collect();
        let mut seqs = Vec::new();
        for len in 1..=4 {
            sequences(len, mu.len(), &mut seqs, &mut Vec::new());
        }
        for seq in &seqs {
            for period_len in 0..=seq.len() {
                let np = seq.len() - period_len;
                let bits = |s: &[u8]| -> Vec<Vec<usize>> {
                    s.iter().map(|&b| (0..mu.len()).filter(|&t| b >> t & 1 == 1).collect()).collect()
                };
                let family = SetSequence {
                    prefix: bits(&seq[..np]),
                    period: bits(&seq[np..]),
                };
                let got = kochen_stone_check(&exact, &family);
                let Some(want) = brute(mu, seq, period_len, 200) else {
                    assert!(got.is_err());
                    continue;
                };
                let got = got.unwrap();
                let c = BigRational::new(want.c.0.into(), want.c.1.into());
                assert_eq!(got.c, c.to_string(), "{mu:?} {seq:?} period {period_len}");
                let lim = BigRational::new(want.limsup.into(), den.into());
                assert_eq!(got.limsup_mass, lim.to_string());
                if want.divergent {
                    assert_eq!(got.verdict, KochenStoneVerdict::Holds);
                    assert!(got.limsup_mass_value >= got.bound - 1e-12);
                } else {
                    assert_eq!(got.verdict, KochenStoneVerdict::NotDivergent);
                }
                checked += 1;
            }
        }
    }
    checked
}

