//! Frame-theoretic classification of vector sequences.
//!
//! A sequence `{f_n}` in a Hilbert space is studied through its synthesis
//! operator `S c = Σ c_n f_n`. Its singular spectrum decides whether the
//! sequence is a frame, a Riesz sequence or basis, and whether it falls into
//! the wider Fredholm-type classes: pseudo-frames (closed range of finite
//! codimension), pseudo-Riesz sequences (closed range, finite-dimensional
//! kernel), pseudo-Riesz bases and near-Riesz bases.
//!
//! ```
//! use frameforge::{classify, gallery, TolerancePolicy};
//!
//! let entry = gallery::get("duplicate-e1")?;
//! let t = classify::classify(&entry.sequence, &TolerancePolicy::default())?;
//! assert!(!t.frame && !t.riesz_sequence && t.pseudo_riesz_basis);
//! assert_eq!((t.excess, t.deficit), (Some(1), Some(1)));
//! # Ok::<(), frameforge::Error>(())
//! ```
//!
//! Modules:
//!
//! * [`numkernel`]: matrices, SVD, ranks, tolerances.
//! * [`seqmodel`]: finite sequences, edited bases, coefficient rules, truncations.
//! * [`classify`]: spectral diagnostics, taxonomy, truncation scans.
//! * [`duals`]: canonical duals, pseudo-duals, pseudo-coduals.
//! * [`perturb`]: stability certificates.
//! * [`gallery`]: named examples with known answers.
//! * [`seqfile`]: the JSON sequence format.

pub mod classify;
pub mod duals;
pub mod error;
pub mod gallery;
pub mod numkernel;
pub mod perturb;
pub mod sampling;
pub mod seqfile;
pub mod seqmodel;

pub use classify::{Count, Provenance, SynthesisAnalysis, Taxonomy};
pub use duals::{DualityCertificate, DualityVerdict, Relation};
pub use error::{Error, Result};
pub use numkernel::{Field, Matrix, Scalar, TolerancePolicy};
pub use perturb::PerturbationCertificate;
pub use seqmodel::{FiniteSequence, Truncation, VectorSequence};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/taxonomy.md")]
    mod taxonomy {}
    #[doc = include_str!("../../../book/src/duals.md")]
    mod duals {}
    #[doc = include_str!("../../../book/src/perturbation.md")]
    mod perturbation {}
    #[doc = include_str!("../../../book/src/gallery.md")]
    mod gallery {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
