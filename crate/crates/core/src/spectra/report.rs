//! Theorem-driven spectral reports.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sets::{a1_set, a2_set, Membership, SymbolicSet};
use crate::criteria::{Decision, Verdict, VerdictPair};
use crate::error::{Error, Result};
use crate::operators::{OperatorForm, OperatorSpec};
use crate::seq::{CoeffSpec, WeightSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "marker", rename_all = "snake_case")]
pub enum SetClaim {
    Exact {
        set: SymbolicSet,
    },
    /// `contains ⊆ X ⊆ within`.
    Containment {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        contains: Option<SymbolicSet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        within: Option<SymbolicSet>,
    },
    Undetermined,
}

impl SetClaim {
    pub fn exact(set: SymbolicSet) -> Self {
        SetClaim::Exact { set }
    }

    pub fn contains(&self, lambda: Complex64) -> Membership {
        match self {
            SetClaim::Exact { set } => set.contains(lambda),
            SetClaim::Containment { contains, within } => {
                if contains.as_ref().map(|s| s.contains(lambda)) == Some(Membership::Yes) {
                    Membership::Yes
                } else if within.as_ref().map(|s| s.contains(lambda)) == Some(Membership::No) {
                    Membership::No
                } else {
                    Membership::Unknown
                }
            }
            SetClaim::Undetermined => Membership::Unknown,
        }
    }
}

/// Goldberg's labels: the letter is the range condition (I surjective,
/// II dense, III not dense), the digit the inverse condition (1 bounded
/// inverse, 2 unbounded inverse, 3 not injective).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GoldbergLabel {
    I1,
    I2,
    I3,
    II1,
    II2,
    II3,
    III1,
    III2,
    III3,
}

impl GoldbergLabel {
    pub const ALL: [GoldbergLabel; 9] = [
        GoldbergLabel::I1,
        GoldbergLabel::I2,
        GoldbergLabel::I3,
        GoldbergLabel::II1,
        GoldbergLabel::II2,
        GoldbergLabel::II3,
        GoldbergLabel::III1,
        GoldbergLabel::III2,
        GoldbergLabel::III3,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    /// Established by a closed-form rule.
    Certified,
    /// Verified structurally from the spec (exact for closed forms, over the
    /// listed values plus the declared tail for tables).
    Checked,
    /// Taken on the caller's word.
    Assumed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumption {
    pub hypothesis: String,
    pub status: HypothesisStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralPart {
    Point,
    Continuous,
    Residual,
    Resolvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub operator: OperatorSpec,
    pub spectrum: SetClaim,
    pub point_spectrum: SetClaim,
    pub continuous_spectrum: SetClaim,
    pub residual_spectrum: SetClaim,
    pub goldberg: BTreeMap<GoldbergLabel, SetClaim>,
    pub ap_spectrum: SetClaim,
    pub defect_spectrum: SetClaim,
    pub compression_spectrum: SetClaim,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub statements: Vec<String>,
    pub assumptions: Vec<Assumption>,
}

impl SpectralReport {
    /// Which part of the fine-spectrum partition `lambda` falls in, when the
    /// report pins it down.
    pub fn classify(&self, lambda: Complex64) -> Option<SpectralPart> {
        let parts = [
            (SpectralPart::Point, &self.point_spectrum),
            (SpectralPart::Continuous, &self.continuous_spectrum),
            (SpectralPart::Residual, &self.residual_spectrum),
        ];
        let mut hit = None;
        for (part, claim) in parts {
            match claim.contains(lambda) {
                Membership::Yes if hit.is_none() => hit = Some(part),
                Membership::Yes => return None,
                Membership::Unknown => return None,
                Membership::No => {}
            }
        }
        match (hit, self.spectrum.contains(lambda)) {
            (Some(part), Membership::Yes) => Some(part),
            (None, Membership::No) => Some(SpectralPart::Resolvent),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Accept heuristic or unknown verdicts as hypotheses, marked `assumed`.
    pub assume: bool,
}

fn refuse(msg: impl Into<String>) -> Error {
    Error::Refused(msg.into())
}

/// Status of a "holds" hypothesis backed by a verdict. A verdict that fails
/// is always refused; heuristic or unknown ones pass only under `assume`.
fn verdict_hypothesis(verdict: &Verdict, name: &str, options: ReportOptions) -> Result<Assumption> {
    let status = match (verdict.decision, verdict.certified) {
        (Decision::Holds, true) => HypothesisStatus::Certified,
        (Decision::Fails, _) => {
            return Err(refuse(format!(
                "hypothesis '{name}' fails ({} verdict)",
                if verdict.certified { "certified" } else { "heuristic" }
            )))
        }
        _ if options.assume => HypothesisStatus::Assumed,
        (Decision::Holds, false) => {
            return Err(refuse(format!(
                "hypothesis '{name}' is only heuristically supported; rerun with assume to accept it"
            )))
        }
        (Decision::Unknown, _) => {
            return Err(refuse(format!(
                "hypothesis '{name}' is undecided; rerun with assume to accept it"
            )))
        }
    };
    Ok(Assumption {
        hypothesis: name.to_owned(),
        status,
    })
}

fn checked(name: &str, ok: bool) -> Result<Assumption> {
    if ok {
        Ok(Assumption {
            hypothesis: name.to_owned(),
            status: HypothesisStatus::Checked,
        })
    } else {
        Err(refuse(format!("hypothesis '{name}' does not hold")))
    }
}

fn positive_coefficients(a: &CoeffSpec) -> bool {
    match a {
        CoeffSpec::Harmonic | CoeffSpec::PowerDecay { .. } | CoeffSpec::Geometric { .. } => true,
        CoeffSpec::Constant { c } => *c > 0.0,
        // extrapolated tails keep the sign of the last value
        CoeffSpec::Tabulated { values, .. } => values.iter().all(|v| *v > 0.0),
    }
}

/// Hypotheses and eigenvalue set `(S or {1/n}, assumptions)` for the point
/// spectrum theorems.
fn point_spectrum_hypotheses(
    op: &OperatorSpec,
    verdicts: &VerdictPair,
    options: ReportOptions,
) -> Result<(SymbolicSet, Vec<Assumption>)> {
    op.validate()?;
    match &op.form {
        OperatorForm::Rhaly { coeffs } => {
            let assumptions = vec![
                verdict_hypothesis(&verdicts.compact, "R_a compact on c0(s)", options)?,
                checked("coefficients pairwise distinct", coeffs.is_distinct())?,
                checked("s decreasing", op.codomain_weight.is_decreasing())?,
            ];
            Ok((SymbolicSet::CoefficientValues { coeffs: coeffs.clone() }, assumptions))
        }
        OperatorForm::GenCesaro { t } => {
            let assumptions = vec![
                checked("0 < t < 1", *t > 0.0 && *t < 1.0)?,
                checked("domain weight equals codomain weight", op.is_endomorphism())?,
                verdict_hypothesis(&verdicts.bounded, "C_t bounded on c0(s)", options)?,
            ];
            Ok((SymbolicSet::ReciprocalIntegers, assumptions))
        }
    }
}

/// `sigma_p`: `S` for compact `R_a` with distinct coefficients and
/// decreasing `s`; `{1/n}` for `C_t` with `0 < t < 1` on `c0(s)`.
pub fn point_spectrum(op: &OperatorSpec, verdicts: &VerdictPair, options: ReportOptions) -> Result<SymbolicSet> {
    point_spectrum_hypotheses(op, verdicts, options).map(|(set, _)| set)
}

fn goldberg_map(entries: impl IntoIterator<Item = (GoldbergLabel, SetClaim)>) -> BTreeMap<GoldbergLabel, SetClaim> {
    let mut map: BTreeMap<_, _> = GoldbergLabel::ALL.iter().map(|l| (*l, SetClaim::Undetermined)).collect();
    map.extend(entries);
    map
}

/// Full fine-spectrum report for compact `R_a` or `C_t` on `c0(s)`.
pub fn fine_spectrum_report(op: &OperatorSpec, verdicts: &VerdictPair, options: ReportOptions) -> Result<SpectralReport> {
    let (eigenvalues, mut assumptions) = point_spectrum_hypotheses(op, verdicts, options)?;
    if matches!(op.form, OperatorForm::GenCesaro { .. }) {
        assumptions.push(verdict_hypothesis(&verdicts.compact, "C_t compact on c0(s)", options)?);
    }
    let with_zero = eigenvalues.clone().with_zero();
    let empty = || SetClaim::exact(SymbolicSet::Empty);
    let goldberg = goldberg_map(
        GoldbergLabel::ALL
            .iter()
            .map(|l| (*l, empty()))
            .chain([
                (GoldbergLabel::III3, SetClaim::exact(eigenvalues.clone())),
                (GoldbergLabel::II2, SetClaim::exact(SymbolicSet::zero())),
            ]),
    );
    Ok(SpectralReport {
        operator: op.clone(),
        spectrum: SetClaim::exact(with_zero.clone()),
        point_spectrum: SetClaim::exact(eigenvalues.clone()),
        continuous_spectrum: SetClaim::exact(SymbolicSet::zero()),
        residual_spectrum: empty(),
        goldberg,
        ap_spectrum: SetClaim::exact(with_zero.clone()),
        defect_spectrum: SetClaim::exact(with_zero),
        compression_spectrum: SetClaim::exact(eigenvalues),
        statements: Vec::new(),
        assumptions,
    })
}

pub const ZERO_IN_II2: &str = "0 ∈ II₂";

/// Goldberg containments for bounded (not necessarily compact) `R_a` on
/// `c0(s)` with positive coefficients and `chi = lim n a_n != 0`.
/// `chi` falls back to the value the coefficient kind determines.
pub fn goldberg_noncompact_report(
    a: &CoeffSpec,
    s: &WeightSpec,
    chi: Option<f64>,
    bounded: &Verdict,
    options: ReportOptions,
) -> Result<SpectralReport> {
    let op = OperatorSpec::rhaly(a.clone(), s.clone());
    op.validate()?;
    let bounded_status = verdict_hypothesis(bounded, "R_a bounded on c0(s)", options)?;
    if let (Some(given), Some(known)) = (chi, a.chi()) {
        if (known - given).abs() > 1e-12 * known.abs().max(1.0) {
            return Err(refuse(format!("supplied chi = {given} conflicts with lim n a_n = {known}")));
        }
    }
    let (chi, chi_status) = match (chi, a.chi()) {
        (_, Some(known)) => (known, HypothesisStatus::Certified),
        (Some(given), None) if options.assume => (given, HypothesisStatus::Assumed),
        (Some(_), None) => {
            return Err(refuse(
                "lim n a_n cannot be certified for this coefficient kind; rerun with assume to accept the supplied chi",
            ))
        }
        (None, None) => return Err(refuse("lim n a_n is unknown; supply chi")),
    };
    if !chi.is_finite() || chi == 0.0 {
        return Err(refuse(format!("hypothesis 'lim n a_n = chi != 0' does not hold (chi = {chi})")));
    }
    let mut assumptions = vec![
        bounded_status,
        checked("coefficients positive", positive_coefficients(a))?,
        Assumption {
            hypothesis: format!("lim n a_n = {chi}"),
            status: chi_status,
        },
    ];
    let coeff_set = SymbolicSet::CoefficientValues { coeffs: a.clone() };
    let a1 = a1_set(a, s, chi);
    let a2 = a2_set(a, s, chi);
    let empty = || SetClaim::exact(SymbolicSet::Empty);

    let mut entries = vec![
        (GoldbergLabel::I3, empty()),
        (GoldbergLabel::II3, empty()),
        (GoldbergLabel::III3, SetClaim::exact(a1.clone())),
        (
            GoldbergLabel::III1,
            SetClaim::Containment {
                contains: Some(a2.clone()),
                within: None,
            },
        ),
        (
            GoldbergLabel::III2,
            SetClaim::Containment {
                contains: None,
                within: Some(coeff_set.clone().minus(a1.clone())),
            },
        ),
    ];
    let mut statements = Vec::new();
    if s.is_decreasing() {
        assumptions.push(checked("s decreasing", true)?);
        entries.push((
            GoldbergLabel::II2,
            SetClaim::Containment {
                contains: Some(SymbolicSet::zero()),
                within: None,
            },
        ));
        statements.push(ZERO_IN_II2.to_owned());
    }
    let a2_or_s = SymbolicSet::union(vec![a2.clone(), coeff_set.clone()]);
    Ok(SpectralReport {
        operator: op,
        spectrum: SetClaim::Undetermined,
        point_spectrum: SetClaim::Undetermined,
        continuous_spectrum: SetClaim::Undetermined,
        residual_spectrum: SetClaim::Undetermined,
        goldberg: goldberg_map(entries),
        ap_spectrum: SetClaim::Containment {
            contains: Some(SymbolicSet::Spectrum.minus(a2_or_s.clone())),
            within: Some(SymbolicSet::Spectrum.minus(a2)),
        },
        defect_spectrum: SetClaim::Containment {
            contains: Some(SymbolicSet::Spectrum.minus(a1)),
            within: None,
        },
        compression_spectrum: SetClaim::exact(a2_or_s),
        statements,
        assumptions,
    })
}
