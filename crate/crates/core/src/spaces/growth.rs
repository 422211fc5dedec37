//! Growth exponents and Poincaré partial sums.

use serde::{Deserialize, Serialize};

use super::ball::{sphere_counts, walk_ball};
use super::group::MarkedGroup;
use super::word::Letter;
use crate::error::Result;

/// Finite-radius estimator of a growth exponent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "snake_case")]
pub enum Estimator {
    /// `ln B(l) / l*`, where `l*` is the largest radius `<= l` with a nonempty sphere.
    Direct,
    /// `ln(S(l) / S(l − 1))`.
    SphereRatio,
    /// `(1/p) ln(B(l) / B(l − p))`.
    BallRatio { lag: usize },
}

/// Estimates at one radius. `None` marks an undefined value (empty sphere or ball).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub radius: usize,
    pub sphere: u128,
    pub ball: u128,
    pub direct: Option<f64>,
    pub sphere_ratio: Option<f64>,
    pub ball_ratio: Option<f64>,
}

/// Growth estimates for a sequence of sphere counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// Lag used by the ball-ratio column.
    pub lag: usize,
    /// gcd of the radii carrying nonempty spheres (0 if only the origin does).
    pub period: usize,
    /// Radii whose sphere is empty; ratio estimators there are undefined.
    pub empty_spheres: Vec<usize>,
    pub rows: Vec<RadiusEstimate>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn ln(x: u128) -> f64 {
    (x as f64).ln()
}

/// All estimators per radius, with the ball-ratio lag set to the support period.
pub fn growth_exponent(counts: &[u128]) -> GrowthEstimate {
    let period = counts
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c > 0)
        .fold(0, |g, (l, _)| gcd(g, l));
    GrowthEstimate::with_lag(counts, period.max(1))
}

impl GrowthEstimate {
    pub fn with_lag(counts: &[u128], lag: usize) -> Self {
        assert!(lag >= 1, "lag must be positive");
        let period = counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .fold(0, |g, (l, _)| gcd(g, l));
        let mut balls = Vec::with_capacity(counts.len());
        let mut acc = 0u128;
        for &c in counts {
            acc = acc.saturating_add(c);
            balls.push(acc);
        }
        let mut rows = Vec::with_capacity(counts.len());
        let mut last_nonempty = None;
        for (l, &s) in counts.iter().enumerate() {
            if l >= 1 && s > 0 {
                last_nonempty = Some(l);
            }
            let direct = last_nonempty.map(|e| ln(balls[l]) / e as f64);
            let sphere_ratio = (l >= 1 && s > 0 && counts[l - 1] > 0)
                .then(|| ln(s) - ln(counts[l - 1]));
            let ball_ratio =
                (l >= lag && balls[l - lag] > 0).then(|| (ln(balls[l]) - ln(balls[l - lag])) / lag as f64);
            rows.push(RadiusEstimate {
                radius: l,
                sphere: s,
                ball: balls[l],
                direct,
                sphere_ratio,
                ball_ratio,
            });
        }
        GrowthEstimate {
            lag,
            period,
            empty_spheres: counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == 0)
                .map(|(l, _)| l)
                .collect(),
            rows,
        }
    }

    pub fn radius(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    /// Estimate at radius `l`. `BallRatio` lags other than `self.lag` are
    /// recomputed from the stored ball counts.
    pub fn at(&self, estimator: Estimator, l: usize) -> Option<f64> {
        let row = self.rows.get(l)?;
        match estimator {
            Estimator::Direct => row.direct,
            Estimator::SphereRatio => row.sphere_ratio,
            Estimator::BallRatio { lag } if lag == self.lag => row.ball_ratio,
            Estimator::BallRatio { lag } => {
                if lag == 0 || l < lag || self.rows[l - lag].ball == 0 {
                    return None;
                }
                Some((ln(row.ball) - ln(self.rows[l - lag].ball)) / lag as f64)
            }
        }
    }

    /// Estimate at the final radius.
    pub fn final_value(&self, estimator: Estimator) -> Option<f64> {
        self.at(estimator, self.radius())
    }

    /// `sup_l B(l)·e^{−omega·l}` over the recorded radii.
    pub fn empirical_constant(&self, omega: f64) -> f64 {
        self.rows
            .iter()
            .map(|r| (ln(r.ball) - omega * r.radius as f64).exp())
            .fold(0.0, f64::max)
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Classification of a partial-sum sequence.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum SeriesVerdict {
    DivergentAtS,
    ConvergentAtS,
    Inconclusive,
}

/// Parameters of the divergence heuristic.
///
/// Over the last `window` radii the increment ratios `term(l)/term(l−1)` are
/// examined: all `<= decay_threshold` gives CONVERGENT, all `>= 1 − tolerance`
/// gives DIVERGENT, anything else INCONCLUSIVE.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoincareParams {
    pub window: usize,
    pub decay_threshold: f64,
    pub tolerance: f64,
}

impl Default for PoincareParams {
    fn default() -> Self {
        PoincareParams {
            window: 5,
            decay_threshold: 0.95,
            tolerance: 1e-9,
        }
    }
}

/// Partial sums `P(s, R) = Σ_{|g| <= R} θ(|g|) e^{χ(g)} e^{−s|g|}` by radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareRecord {
    pub s: f64,
    /// `ln` of the sphere term at each radius (`-inf` for an empty sphere).
    pub log_terms: Vec<f64>,
    /// `ln P(s, l)` for `l = 0..=R`.
    pub log_partial: Vec<f64>,
    /// `term(l) / term(l − 1)`; undefined where a term vanishes.
    pub increment_ratios: Vec<Option<f64>>,
    pub verdict: SeriesVerdict,
    pub params: PoincareParams,
}

impl PoincareRecord {
    pub fn partial_sum(&self, l: usize) -> f64 {
        self.log_partial[l].exp()
    }

    pub fn radius(&self) -> usize {
        self.log_terms.len().saturating_sub(1)
    }
}

/// Builds the record from per-radius log terms.
pub fn poincare_from_log_terms(s: f64, log_terms: Vec<f64>, params: PoincareParams) -> PoincareRecord {
    let mut log_partial = Vec::with_capacity(log_terms.len());
    let mut acc = f64::NEG_INFINITY;
    for &t in &log_terms {
        acc = log_add(acc, t);
        log_partial.push(acc);
    }
    let mut increment_ratios = vec![None];
    for w in log_terms.windows(2) {
        let defined = w[0].is_finite() && w[1].is_finite();
        increment_ratios.push(defined.then(|| (w[1] - w[0]).exp()));
    }
    let n = increment_ratios.len();
    let verdict = if params.window == 0 || n <= params.window {
        SeriesVerdict::Inconclusive
    } else {
        let tail = &increment_ratios[n - params.window..];
        if tail.iter().any(|r| r.is_none()) {
            SeriesVerdict::Inconclusive
        } else {
            let rs: Vec<f64> = tail.iter().flatten().copied().collect();
            if rs.iter().all(|&r| r <= params.decay_threshold) {
                SeriesVerdict::ConvergentAtS
            } else if rs.iter().all(|&r| r >= 1.0 - params.tolerance) {
                SeriesVerdict::DivergentAtS
            } else {
                SeriesVerdict::Inconclusive
            }
        }
    };
    PoincareRecord {
        s,
        log_terms,
        log_partial,
        increment_ratios,
        verdict,
        params,
    }
}

/// Weighted, twisted Poincaré partial sums up to radius `radius`.
///
/// `log_theta(l)` is `ln θ(l)`; `twist(w)` is `χ` at the canonical word `w`.
/// Without a twist the sphere counts come from the automaton, so large radii
/// are cheap; a twist forces a walk over the ball.
pub fn poincare_partial(
    group: &MarkedGroup,
    s: f64,
    radius: usize,
    log_theta: Option<&dyn Fn(usize) -> f64>,
    twist: Option<&dyn Fn(&[Letter]) -> f64>,
    params: PoincareParams,
) -> Result<PoincareRecord> {
    let theta = |l: usize| log_theta.map_or(0.0, |f| f(l));
    let log_terms = match twist {
        None => sphere_counts(group, radius)?
            .into_iter()
            .enumerate()
            .map(|(l, c)| {
                if c == 0 {
                    f64::NEG_INFINITY
                } else {
                    ln(c) + theta(l) - s * l as f64
                }
            })
            .collect(),
        Some(chi) => {
            let mut sums = vec![f64::NEG_INFINITY; radius + 1];
            walk_ball(group, radius, (), |_, _| (), |d, _, w| {
                sums[d] = log_add(sums[d], chi(w));
            });
            sums.into_iter()
                .enumerate()
                .map(|(l, v)| v + theta(l) - s * l as f64)
                .collect()
        }
    };
    Ok(poincare_from_log_terms(s, log_terms, params))
}
