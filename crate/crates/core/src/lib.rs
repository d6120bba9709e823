//! Rhaly operators `R_a` and generalized Cesàro operators `C_t` on weighted
//! null sequence spaces `c0(s)`: boundedness and compactness criteria,
//! closed-form eigenvectors, fine-spectrum reports and finite-section
//! evidence.
//!
//! Indices are 1-based throughout.

pub mod analysis;
pub mod asymptotics;
pub mod criteria;
pub mod error;
pub mod finsec;
pub mod logspace;
pub mod operators;
pub mod seq;
pub mod specfile;
pub mod spectra;

pub use criteria::{Decision, Verdict, VerdictPair};
pub use error::{Error, Result};
pub use logspace::SignedLogValue;
pub use operators::{DenseTruncation, OperatorForm, OperatorSpec};
pub use seq::{CoeffSpec, SeqWindow, TailRule, WeightSpec};
pub use specfile::SpecFile;
pub use spectra::{SetClaim, SpectralReport, SymbolicSet};
pub use finsec::TruncationRecord;
