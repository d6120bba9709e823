//! Spectra of `R_a` and `C_t` on weighted null sequence spaces.

mod eigen;
mod report;
mod sets;

pub use eigen::{
    adjoint_eigenvector_rhaly, eigenvector_cesaro, eigenvector_rhaly, kummer_certificate, Eigenvector,
    KummerCertificate, KummerVerdict,
};
pub use report::{
    fine_spectrum_report, goldberg_noncompact_report, point_spectrum, Assumption, GoldbergLabel,
    HypothesisStatus, ReportOptions, SetClaim, SpectralPart, SpectralReport, ZERO_IN_II2,
};
pub use sets::{
    a1_a2_membership, a1_a2_membership_with, a1_set, a2_set, coefficient_index, reciprocal_index,
    reciprocal_real_part, A1A2Membership, Membership, Relation, SymbolicSet, WindowConfig, MEMBERSHIP_REL_TOL,
};
