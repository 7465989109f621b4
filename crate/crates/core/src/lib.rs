//! Exact computations in direct products `NS2^l x Z^p x Z2^q` of Euclidean
//! surface groups: normal-form arithmetic, fixed subgroups of endomorphisms,
//! finitely generated subgroups, and searches for compression and inertia
//! counterexamples.

pub mod certify;
pub mod group;
pub mod intlat;
pub mod morphism;
pub mod subgroup;

pub use group::{Distinguished, Element, EuclideanBlock, GroupSpec, SpecError, WordError};
pub use intlat::{AffineLattice, IntMatrix, Lattice, SmithForm};
pub use morphism::{Endomorphism, FixResult, MorphismError};
pub use subgroup::{Index, RankCertificate, Special, Subgroup, SubgroupError};
