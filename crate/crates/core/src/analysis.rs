//! End-to-end analyses behind the command-line tool: verdicts plus the
//! strongest spectral report whose hypotheses hold, and eigenvector dumps.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria::{cesaro_verdict, operator_verdicts, NormEstimate, Verdict, VerdictPair};
use crate::error::{Error, Result};
use crate::finsec::{eigen_residual, finite_rank_error, random_operator_distance};
use crate::operators::{format_f64, max_order, OperatorForm, OperatorSpec};
use crate::seq::weighted_abs;
use crate::spectra::{
    coefficient_index, eigenvector_cesaro, eigenvector_rhaly, fine_spectrum_report, goldberg_noncompact_report,
    kummer_certificate, reciprocal_index, Eigenvector, HypothesisStatus, KummerVerdict, ReportOptions, SpectralReport,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub horizon: usize,
    pub tol: f64,
    pub strict: bool,
    pub chi: Option<f64>,
    pub seed: u64,
}

/// Rank of the truncation `T^{(k)}` used for the finite-rank check.
pub const FINITE_RANK_K: usize = 10;
/// Section order of the finite-rank check (capped by the horizon).
pub const FINITE_RANK_ORDER: usize = 200;
pub const FINITE_RANK_SAMPLES: usize = 100;

/// `||T_{r,s} - T^{(k)}||` for `C_t`: the `sup mu_n` bound against a
/// random-vector lower estimate on a finite section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteRankCheck {
    pub k: usize,
    pub order: usize,
    pub bound: f64,
    pub bound_certified_tail: bool,
    pub measured: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Certified,
    Heuristic,
    Assumed,
    Refused,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub bounded: Verdict,
    pub compact: Verdict,
    /// `sup mu_n` for `C_t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormEstimate>,
    /// The `1/(n+1)` variant of the `C_t` norm formula, when it differs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifted_index_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceSummary {
    pub bounded: Provenance,
    pub compact: Provenance,
    pub spectral_report: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub operator: OperatorSpec,
    pub horizon: usize,
    pub tol: f64,
    pub verdicts: VerdictSummary,
    pub spectral_report: Option<SpectralReport>,
    /// Why no spectral report was produced, naming the missing hypothesis.
    pub refusal: Option<String>,
    pub provenance: ProvenanceSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_rank_check: Option<FiniteRankCheck>,
}

fn verdict_provenance(v: &Verdict) -> Provenance {
    if v.certified {
        Provenance::Certified
    } else {
        Provenance::Heuristic
    }
}

fn refusal_text(e: Error) -> Result<String> {
    match e {
        Error::Refused(msg) => Ok(msg),
        other => Err(other),
    }
}

/// Verdicts, then the compact fine-spectrum report, falling back to the
/// bounded-operator Goldberg report for `R_a`.
pub fn analyze(op: &OperatorSpec, options: &AnalyzeOptions) -> Result<AnalysisReport> {
    op.validate()?;
    let (pair, norm, shifted_index_norm) = match &op.form {
        OperatorForm::GenCesaro { t } => {
            let v = cesaro_verdict(*t, &op.domain_weight, &op.codomain_weight, options.horizon, options.tol)?;
            (v.pair(), Some(v.norm), v.shifted_index_norm)
        }
        OperatorForm::Rhaly { .. } => (operator_verdicts(op, options.horizon, options.tol)?, None, None),
    };
    let finite_rank_check = match &op.form {
        OperatorForm::GenCesaro { t } => {
            let order = FINITE_RANK_ORDER.min(options.horizon);
            let (r, s) = (&op.domain_weight, &op.codomain_weight);
            let bound = finite_rank_error(*t, r, s, FINITE_RANK_K, order)?;
            let measured = random_operator_distance(*t, r, s, FINITE_RANK_K, order, FINITE_RANK_SAMPLES, options.seed)?;
            Some(FiniteRankCheck {
                k: FINITE_RANK_K,
                order,
                bound: bound.value,
                bound_certified_tail: bound.certified_tail,
                measured,
                samples: FINITE_RANK_SAMPLES,
                seed: options.seed,
            })
        }
        OperatorForm::Rhaly { .. } => None,
    };
    let report_options = ReportOptions { assume: !options.strict };
    let (report, refusal) = match spectral_report(op, &pair, options.chi, report_options) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(refusal_text(e)?)),
    };
    let spectral = match &report {
        None => Provenance::Refused,
        Some(r) if r.assumptions.iter().any(|a| a.status == HypothesisStatus::Assumed) => Provenance::Assumed,
        Some(_) => Provenance::Certified,
    };
    Ok(AnalysisReport {
        operator: op.clone(),
        horizon: options.horizon,
        tol: options.tol,
        provenance: ProvenanceSummary {
            bounded: verdict_provenance(&pair.bounded),
            compact: verdict_provenance(&pair.compact),
            spectral_report: spectral,
        },
        verdicts: VerdictSummary {
            bounded: pair.bounded,
            compact: pair.compact,
            norm,
            shifted_index_norm,
        },
        spectral_report: report,
        refusal,
        finite_rank_check,
    })
}

fn spectral_report(
    op: &OperatorSpec,
    pair: &VerdictPair,
    chi: Option<f64>,
    options: ReportOptions,
) -> Result<SpectralReport> {
    let compact_refusal = match fine_spectrum_report(op, pair, options) {
        Ok(r) => return Ok(r),
        Err(e) => refusal_text(e)?,
    };
    let OperatorForm::Rhaly { coeffs } = &op.form else {
        return Err(Error::Refused(compact_refusal));
    };
    if !op.is_endomorphism() {
        return Err(Error::Refused(compact_refusal));
    }
    match goldberg_noncompact_report(coeffs, &op.codomain_weight, chi, &pair.bounded, options) {
        Ok(r) => Ok(r),
        Err(e) => Err(Error::Refused(format!(
            "fine spectrum: {compact_refusal}; Goldberg classification: {}",
            refusal_text(e)?
        ))),
    }
}

/// Which eigenvector to build: by index or by value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenTarget {
    Index(usize),
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigvecSummary {
    pub lambda: f64,
    pub m: usize,
    pub order: usize,
    /// `||(A_N - lambda) x||_s / ||x||_s`
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub underflow_from: Option<usize>,
    /// Kummer verdict on `n` in `[N/2, N-1]` (Rhaly only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kummer: Option<KummerVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kummer_note: Option<String>,
}

pub struct EigvecOutput {
    pub eigenvector: Eigenvector,
    pub summary: EigvecSummary,
}

/// Eigenvector prefix of length `order` with its residual and, for `R_a`,
/// the Kummer verdict. A value that is not `a_m` or `1/m` is refused.
pub fn eigvec(op: &OperatorSpec, target: EigenTarget, order: usize) -> Result<EigvecOutput> {
    op.validate()?;
    let cap = max_order();
    if order > cap {
        return Err(Error::Resource { order, max: cap });
    }
    let m = match target {
        EigenTarget::Index(m) => m,
        EigenTarget::Value(v) => {
            let z = Complex64::new(v, 0.0);
            let found = match &op.form {
                OperatorForm::Rhaly { coeffs } => coefficient_index(coeffs, z),
                OperatorForm::GenCesaro { .. } => reciprocal_index(z),
            };
            found.ok_or_else(|| Error::Refused(format!("{v} is not an eigenvalue")))?
        }
    };
    if m == 0 || m > order {
        return Err(Error::domain(format!("eigenvector index {m} must lie in 1..={order}")));
    }
    let s = &op.codomain_weight;
    let eigenvector = match &op.form {
        OperatorForm::Rhaly { coeffs } => eigenvector_rhaly(coeffs, m, order),
        OperatorForm::GenCesaro { t } if *t > 0.0 => eigenvector_cesaro(*t, m, order),
        OperatorForm::GenCesaro { .. } => Err(Error::Refused("the eigenvector formula needs 0 < t < 1".into())),
    }
    .map_err(|e| match e {
        Error::Degenerate { index } => Error::Refused(format!("a_{index} repeats the eigenvalue a_{m}")),
        other => other,
    })?;
    let residual = eigen_residual(op, eigenvector.lambda, &eigenvector.values, order, s)?;
    let (kummer, kummer_note) = match &op.form {
        OperatorForm::Rhaly { coeffs } if order >= 4 && order / 2 > m => {
            match kummer_certificate(coeffs, s, &eigenvector.values, order / 2..=order - 1) {
                Ok(cert) => (Some(cert.verdict), None),
                Err(Error::Numeric(msg)) => (None, Some(msg)),
                Err(e) => return Err(e),
            }
        }
        OperatorForm::Rhaly { .. } => (None, Some("window too short for a Kummer verdict".into())),
        OperatorForm::GenCesaro { .. } => (None, None),
    };
    let summary = EigvecSummary {
        lambda: eigenvector.lambda,
        m,
        order,
        residual,
        underflow_from: eigenvector.underflow_from,
        kummer,
        kummer_note,
    };
    Ok(EigvecOutput { eigenvector, summary })
}

pub const EIGVEC_CSV_HEADER: &str = "n,x_n,x_n_s_n";

/// CSV of `(n, x_n, x_n s_n)`.
pub fn write_eigvec_csv<W: Write>(op: &OperatorSpec, x: &Eigenvector, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Numeric(format!("write failed: {e}"));
    writeln!(out, "{EIGVEC_CSV_HEADER}").map_err(io)?;
    for (n, v) in x.values.indexed() {
        let weighted = weighted_abs(v, &op.codomain_weight, n)?.copysign(v);
        writeln!(out, "{n},{},{}", format_f64(v), format_f64(weighted)).map_err(io)?;
    }
    Ok(())
}
