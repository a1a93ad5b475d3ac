//! Kay-graphs of hypergraphs, their classes, and Ramsey-type searches over
//! finite relational structures.

pub mod cameron;
pub mod canon;
pub mod cert;
pub mod class;
pub mod embed;
pub mod error;
pub mod expansion;
pub mod io;
pub mod kay;
pub mod order;
pub mod ramsey;
pub mod structure;
pub mod subsets;
pub mod suite;
pub mod verify;

/// Largest vertex count supported; vertex sets are `u64` bitmasks.
pub const MAX_DOMAIN: usize = 63;

pub use canon::{canonical_form, is_isomorphic, Canonical};
pub use embed::{automorphisms, embeds, enumerate_copies, enumerate_embeddings, CopySet, Embedding};
pub use error::{Error, Result};
pub use kay::{
    complement_expansion, kay, kay_class_membership, reconstruct, satisfies_parity, star_extension,
    ExpandedStructure, ParityCheck,
};
pub use structure::{Signature, Structure, Symbol, SymbolKind, Tuple};
pub use subsets::EdgeSet;
pub use class::{enumerate_class, ClassPool, Family};
pub use order::{orderability_search, two_erp_order_extraction, Orderability};
pub use ramsey::{joint_oscillation, oscillation_holds, ArrowCertificate, ArrowQuery, Mode, Pattern, SearchOptions, Verdict};
