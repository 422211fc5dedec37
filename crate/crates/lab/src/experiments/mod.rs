//! One module per experiment kind.

pub mod density;
pub mod grigorchuk;
pub mod growth;
pub mod horoboundary;
pub mod normal;
pub mod poincare;
pub mod shadow;
pub mod spr;

use psgrowth_core::spaces::{sphere_counts, Estimator, GrowthEstimate, MarkedGroup};

use crate::error::Result;

/// Headline exponent: the sphere ratio, or the ball ratio over the support
/// period when spheres are periodically empty.
pub fn headline_estimator(est: &GrowthEstimate) -> Estimator {
    if est.period <= 1 {
        Estimator::SphereRatio
    } else {
        Estimator::BallRatio { lag: est.period }
    }
}

/// `|B(o, radius)|` from the automaton.
pub fn ball_size(group: &MarkedGroup, radius: usize) -> Result<u128> {
    Ok(sphere_counts(group, radius)?.iter().sum())
}
