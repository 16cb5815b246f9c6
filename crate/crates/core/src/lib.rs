//! Doubled Khovanov, Lee and Bar-Natan homology for links in real projective
//! 3-space.
//!
//! Links in RP^3 are presented as tangle diagrams in a disk whose boundary
//! endpoints are identified antipodally ([`diagram`]). Resolving every
//! crossing yields a cube of smoothings whose edges are pairs of pants or
//! once-punctured Möbius bands ([`cube`]); applying the doubled TQFT-like
//! constructions produces chain complexes over Z, Q or F_2 ([`theories`])
//! whose homology, filtration gradings and spectral sequences are computed
//! with exact arithmetic ([`exactalg`]). 2-colourings of the diagram shadow
//! ([`colouring`]) play the role that orientations play classically: they
//! drive canonical generators, odd writhes and the doubled Rasmussen
//! invariants. Elementary cobordisms induce chain maps ([`cobordism`]), and a
//! Reidemeister move engine ([`moves`]) supports randomized invariance
//! testing.

pub mod bundled;
pub mod colouring;
pub mod cobordism;
pub mod cube;
pub mod diagram;
pub mod theories;
pub mod exactalg;
pub mod moves;
pub mod render;
pub mod verify;

pub use diagram::ProjectiveDiagram;
pub use exactalg::RingTag;
pub use theories::TheoryTag;


/// Default bound on the number of crossings accepted by cube construction.
///
/// Overridable through the `DKH_MAX_CROSSINGS` environment variable.
pub const DEFAULT_MAX_CROSSINGS: usize = 20;

/// Effective cube size limit, read from `DKH_MAX_CROSSINGS` when set.
pub fn max_crossings() -> usize {
    std::env::var("DKH_MAX_CROSSINGS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_CROSSINGS)
}
