//! Conformal densities: exact tree-end measures, atomic Patterson
//! approximants, shadow masses and the covering lemmas built on them.

mod atomic;
mod kochen_stone;
mod tree;
mod vitali;

pub use atomic::{
    atomic_annulus_check, atomic_harnack_check, atomic_shadow_lemma_check, density_pushforward,
    patterson_approximant, twisted_exponent, Atom, AtomicDensity, DensityFamily, PattersonFamily,
    PattersonWeight, Pushforward, QuasiMorphism, TwistedExponent,
};
pub use kochen_stone::{kochen_stone_check, KochenStoneReport, KochenStoneVerdict, SetSequence};
pub use tree::{AnnulusRow, ConformalityRow, ShadowLemmaRow, TreeEndDensity};
pub use vitali::{shadow_cylinder, vitali_select, VitaliReport};
