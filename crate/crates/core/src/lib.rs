//! Groups that split as amalgamated products or HNN extensions, and the
//! trees they act on.
//!
//! The crate is organised bottom-up:
//!
//! * [`words`]: free words, reduction, substitution and the word literal syntax.
//! * [`groups`]: group handles with a decidable word problem, homomorphisms
//!   and automorphisms.
//! * [`splittings`]: one-edge splittings and their syllable normal forms.
//! * [`tree`]: the Bass–Serre tree as a lazy coset space.
//! * [`isometry`]: tree isometries induced by automorphisms.
//! * [`checks`]: bounded verification of structural conditions.
//! * [`surfaces`]: closed surface groups, their splittings along curves and
//!   Dehn twists.
//!
//! Everything here is pure and allocation-only; IO lives in the `bstree`
//! companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod checks;
pub mod error;
pub mod groups;
pub mod isometry;
pub mod report;
pub mod splittings;
pub mod surfaces;
pub mod tree;
pub mod words;

pub use error::{Error, Result};
pub use groups::{Automorphism, GroupHandle, Homomorphism, Membership, Presentation, Strategy};
pub use report::{CheckReport, Verdict};
pub use splittings::{Side, Splitting, SplittingSpec, SyllableForm};
pub use tree::{TreeBall, TreeEdge, TreeVertex, VertexKind};
pub use words::{Alphabet, GeneratorId, Letter, ReducedWord, Sign, Word};
