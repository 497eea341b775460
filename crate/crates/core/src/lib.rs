//! Conjugacy and conjugator length in finitely generated class-2 nilpotent
//! groups given as central extensions of a free abelian group.
//!
//! The pipeline is: validate a [`presentation::CentralExtensionPresentation`],
//! collect words into [`words::NormalForm`]s, turn a conjugacy question into
//! an integer linear system, and find the shortest conjugator as an
//! ℓ1-minimal point of the solution coset.
//!
//! ```
//! use nilconj::{gm_lab, conjugacy};
//!
//! let g1 = gm_lab::make_gm(1).unwrap();
//! let (u, v) = gm_lab::witness_pair(1, 5).unwrap();
//! let cl = conjugacy::conjugator_length(&g1, &u, &v, conjugacy::DEFAULT_BUDGET).unwrap();
//! assert_eq!(cl, 25.into());
//! ```

pub mod conjugacy;
pub mod gm_lab;
pub mod intlinalg;
pub mod oracles;
pub mod presentation;
pub mod selftest;
pub mod words;

pub use conjugacy::{
    analyze_conjugacy, build_conjugacy_system, change_of_variables, conjugator_length,
    decide_conjugacy, Conjugacy, ConjugacyCertificate, ConjugacyError, DiophantineSystem,
};
pub use presentation::{validate_presentation, CentralExtensionPresentation, RawPresentation};
pub use words::{collect, nf_conjugate, nf_invert, nf_multiply, parse_word, NormalForm, Word};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/presentations.md")]
    mod presentations {}
    #[doc = include_str!("../../../book/src/collection.md")]
    mod collection {}
    #[doc = include_str!("../../../book/src/diophantine.md")]
    mod diophantine {}
    #[doc = include_str!("../../../book/src/conjugator-length.md")]
    mod conjugator_length {}
    #[doc = include_str!("../../../book/src/gm-family.md")]
    mod gm_family {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
