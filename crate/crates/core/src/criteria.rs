//! Boundedness and compactness decisions.
//!
//! Each operator has a governing sequence: `beta_n = |a_n| s_n sum_{k<=n} 1/s_k`
//! for `R_a` on `c0(s)`, and `mu_n = (s_n/n) sum_{k<=n} t^{n-k}/r_k` for
//! `C_t : c0(r) -> c0(s)`. The operator is bounded iff the sequence is
//! bounded and compact iff it tends to zero. Verdicts are certified only when
//! the limit follows from a closed-form rule; a finite window of the sequence
//! alone yields a heuristic verdict with the window attached.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{Growth, Limit};
use crate::error::{Error, Result};
use crate::operators::{OperatorForm, OperatorSpec};
use crate::seq::{ratio_limsup_estimate, scaled_reciprocal_sums, CoeffSpec, SeqWindow, WeightSpec};

pub const DEFAULT_HORIZON: usize = 512;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const MIN_HORIZON: usize = 32;
/// Rises tolerated in the "decreasing over the last half" trend test.
pub const TREND_SLACK: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Bounded,
    Compact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Holds,
    Fails,
    Unknown,
}

/// Which rule produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `limsup s_{n+1}/s_n < 1` sufficiency for `R_a` and for `C_t` on `c0(s)`.
    RatioLimsup,
    /// `beta_n >= |a_n|`: unbounded or non-null coefficients rule the property out.
    CoefficientDomination,
    /// Unweighted space: `beta_n = n |a_n|` exactly, decided by growth class.
    UnweightedRowNorms,
    /// Row-norm / column-decay test for matrices on plain `c0`.
    RowL1Lemma,
    /// Growth class of `s_n / (n r_n)` for `mu_n`.
    MuGrowth,
    /// Trend and tolerance rules on a finite window.
    WindowHeuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoverningSequence {
    Beta,
    Mu,
    RowL1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub sequence: GoverningSequence,
    pub window: SeqWindow,
    pub sup: f64,
    pub argmax: usize,
    pub last: f64,
}

impl Evidence {
    fn new(sequence: GoverningSequence, values: Vec<f64>) -> Result<Self> {
        let (argmax, sup) = values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| if *v > best.1 { (i, *v) } else { best });
        let last = *values.last().ok_or_else(|| Error::domain("empty evidence window"))?;
        Ok(Evidence {
            sequence,
            window: SeqWindow::from_prefix(values)?,
            sup,
            argmax: argmax + 1,
            last,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Index attaining the supremum within the evaluated window.
    pub argmax: usize,
    pub lower_bound_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: Property,
    pub decision: Decision,
    pub certified: bool,
    pub criterion: Criterion,
    pub evidence: Evidence,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormEstimate>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.decision == Decision::Holds
    }

    pub fn certified_holds(&self) -> bool {
        self.holds() && self.certified
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictPair {
    pub bounded: Verdict,
    pub compact: Verdict,
}

impl VerdictPair {
    /// Pairs the two verdicts, enforcing compact ⇒ bounded and
    /// not-bounded ⇒ not-compact.
    fn reconcile(mut bounded: Verdict, mut compact: Verdict) -> Self {
        if compact.holds() && !bounded.holds() {
            bounded.decision = Decision::Holds;
            bounded.certified = compact.certified;
            bounded.criterion = compact.criterion;
        }
        if bounded.decision == Decision::Fails && compact.decision != Decision::Fails {
            compact.decision = Decision::Fails;
            compact.certified = bounded.certified;
            compact.criterion = bounded.criterion;
        }
        VerdictPair { bounded, compact }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ruling {
    decision: Decision,
    certified: bool,
    criterion: Criterion,
}

impl Ruling {
    fn certified(decision: Decision, criterion: Criterion) -> Self {
        Ruling { decision, certified: true, criterion }
    }

    fn heuristic(decision: Decision) -> Self {
        Ruling {
            decision,
            certified: false,
            criterion: Criterion::WindowHeuristic,
        }
    }

    fn into_verdict(self, property: Property, evidence: Evidence) -> Verdict {
        Verdict {
            property,
            decision: self.decision,
            certified: self.certified,
            criterion: self.criterion,
            evidence,
            norm: None,
        }
    }
}

fn rulings_from_limit(limit: Limit, criterion: Criterion) -> (Ruling, Ruling) {
    use Decision::*;
    let (b, c) = match limit {
        Limit::Zero => (Holds, Holds),
        Limit::Finite => (Holds, Fails),
        Limit::Infinite => (Fails, Fails),
    };
    (Ruling::certified(b, criterion), Ruling::certified(c, criterion))
}

/// Count of `v[i+1] > v[i]` over the last half of the window.
fn rises_in_last_half(values: &[f64]) -> usize {
    let half = values.len() / 2;
    values[half.saturating_sub(1)..]
        .windows(2)
        .filter(|w| w[1] > w[0])
        .count()
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Heuristic decisions `(bounded, compact)` from a window `v_1..v_h`.
///
/// * compact holds when the last half is decreasing (up to
///   [`TREND_SLACK`] rises) and `v_h < tol`; it fails when the last quarter
///   climbs back to the level of the second quarter while staying above `tol`.
/// * bounded holds when the window maximum sits in the first half, or when
///   the running maximum's increments contract (`M(h) - M(h/2) <=
///   0.75 (M(h/2) - M(h/4))`).
pub fn window_rule(values: &[f64], tol: f64) -> (Decision, Decision) {
    let h = values.len();
    let last = values[h - 1];
    let running = |m: usize| max_of(&values[..m]);
    let (m_q, m_h, m_all) = (running(h / 4), running(h / 2), running(h));

    let compact = if rises_in_last_half(values) <= TREND_SLACK && last < tol {
        Decision::Holds
    } else if last >= tol && max_of(&values[3 * h / 4..]) >= max_of(&values[h / 4..h / 2]) {
        Decision::Fails
    } else {
        Decision::Unknown
    };

    let early_peak = m_all <= m_h;
    let contracting = m_h > m_q && (m_all - m_h) <= 0.75 * (m_h - m_q);
    let bounded = if compact == Decision::Holds || early_peak || contracting {
        Decision::Holds
    } else {
        Decision::Unknown
    };
    (bounded, compact)
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon < MIN_HORIZON {
        Err(Error::domain(format!(
            "horizon must be at least {MIN_HORIZON}, got {horizon}"
        )))
    } else {
        Ok(())
    }
}

/// `beta_n = |a_n| s_n sum_{k=1}^{n} 1/s_k`.
pub fn rhaly_beta(a: &CoeffSpec, s: &WeightSpec, n: usize) -> Result<f64> {
    let scaled = crate::seq::scaled_reciprocal_sum(s, n)?;
    Ok(a.value(n)?.abs() * scaled)
}

/// `beta_1..beta_len`.
pub fn rhaly_beta_window(a: &CoeffSpec, s: &WeightSpec, len: usize) -> Result<Vec<f64>> {
    let scaled = scaled_reciprocal_sums(s, len)?;
    scaled
        .iter()
        .enumerate()
        .map(|(i, p)| Ok(a.value(i + 1)?.abs() * p))
        .collect()
}

/// Boundedness and compactness of `R_a` on `c0(s)`.
pub fn rhaly_verdict(a: &CoeffSpec, s: &WeightSpec, horizon: usize, tol: f64) -> Result<VerdictPair> {
    check_horizon(horizon)?;
    let beta = rhaly_beta_window(a, s, horizon)?;
    let evidence = Evidence::new(GoverningSequence::Beta, beta)?;
    let ratio = ratio_limsup_estimate(s, 1..=horizon)?;

    let (bounded, compact) = if ratio.certified && ratio.estimate < 1.0 {
        let domination = Ruling::certified(Decision::Fails, Criterion::CoefficientDomination);
        let b = if a.is_bounded() {
            Ruling::certified(Decision::Holds, Criterion::RatioLimsup)
        } else {
            domination
        };
        let c = if a.is_null() {
            Ruling::certified(Decision::Holds, Criterion::RatioLimsup)
        } else {
            domination
        };
        (b, c)
    } else if let (WeightSpec::Constant { .. }, Some(g)) = (s, a.growth()) {
        rulings_from_limit(g.times_power(1.0).limit(), Criterion::UnweightedRowNorms)
    } else if !a.is_null() {
        // beta_n >= |a_n| does not tend to zero
        let (b, _) = window_rule(&evidence.window.values, tol);
        (
            Ruling::heuristic(b),
            Ruling::certified(Decision::Fails, Criterion::CoefficientDomination),
        )
    } else {
        let (b, c) = window_rule(&evidence.window.values, tol);
        (Ruling::heuristic(b), Ruling::heuristic(c))
    };

    Ok(VerdictPair::reconcile(
        bounded.into_verdict(Property::Bounded, evidence.clone()),
        compact.into_verdict(Property::Compact, evidence),
    ))
}

/// Boundedness of the matrix on plain `c0`: row `l1` norms bounded and
/// columns null; the norm is the supremum of the row norms.
pub fn c0_matrix_bounded(op: &OperatorSpec, horizon: usize) -> Result<Verdict> {
    check_horizon(horizon)?;
    let rows: Vec<f64> = match &op.form {
        OperatorForm::Rhaly { coeffs } => (1..=horizon)
            .map(|n| Ok(n as f64 * coeffs.value(n)?.abs()))
            .collect::<Result<_>>()?,
        OperatorForm::GenCesaro { t } => (1..=horizon)
            .map(|n| {
                let nf = n as f64;
                if *t == 0.0 {
                    1.0 / nf
                } else {
                    -(nf * t.ln()).exp_m1() / (nf * (1.0 - t))
                }
            })
            .collect(),
    };
    let evidence = Evidence::new(GoverningSequence::RowL1, rows)?;
    let sup_in_window = evidence.argmax < horizon;

    let (ruling, exact_norm) = match &op.form {
        // rows (1 + t + ... + t^{n-1})/n decrease from 1; columns t^{n-k}/n -> 0
        OperatorForm::GenCesaro { .. } => (Ruling::certified(Decision::Holds, Criterion::RowL1Lemma), true),
        OperatorForm::Rhaly { coeffs } => match coeffs.growth() {
            // n^{1-p} and n rho^n are unimodal, so a window peak before the
            // horizon is the global supremum
            Some(g) => match g.times_power(1.0).limit() {
                Limit::Infinite => (Ruling::certified(Decision::Fails, Criterion::RowL1Lemma), false),
                _ if coeffs.is_null() => (
                    Ruling::certified(Decision::Holds, Criterion::RowL1Lemma),
                    sup_in_window,
                ),
                _ => (Ruling::certified(Decision::Fails, Criterion::RowL1Lemma), false),
            },
            None if !coeffs.is_null() => (Ruling::certified(Decision::Fails, Criterion::RowL1Lemma), false),
            None => {
                let (b, _) = window_rule(&evidence.window.values, DEFAULT_TOL);
                (Ruling::heuristic(b), false)
            }
        },
    };
    let norm = NormEstimate {
        value: evidence.sup,
        argmax: evidence.argmax,
        lower_bound_only: !exact_norm,
    };
    let mut verdict = ruling.into_verdict(Property::Bounded, evidence);
    verdict.norm = Some(norm);
    Ok(verdict)
}

/// `mu_1..mu_len` for `C_t : c0(r) -> c0(s)`.
///
/// Runs `Q_n = 1 + t (r_n / r_{n-1}) Q_{n-1}` with `Q_n = r_n sum t^{n-k}/r_k`,
/// so `mu_n = (s_n / r_n) Q_n / n`; neither `t^{n-k}` nor `1/r_k` is formed.
pub fn cesaro_mu_window(t: f64, r: &WeightSpec, s: &WeightSpec, len: usize) -> Result<Vec<f64>> {
    check_t(t)?;
    let mut out = Vec::with_capacity(len);
    let mut q = 0.0;
    for n in 1..=len {
        q = if n == 1 { 1.0 } else { 1.0 + t * r.ratio(n - 1)? * q };
        out.push(weight_quotient(s, r, n)? * q / n as f64);
    }
    Ok(out)
}

pub fn cesaro_mu(t: f64, r: &WeightSpec, s: &WeightSpec, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("sequence indices start at 1"));
    }
    Ok(*cesaro_mu_window(t, r, s, n)?.last().expect("n >= 1"))
}

/// `s_n / r_n`.
fn weight_quotient(s: &WeightSpec, r: &WeightSpec, n: usize) -> Result<f64> {
    if let (Ok(sn), Ok(rn)) = (s.value(n), r.value(n)) {
        let q = sn / rn;
        if q.is_finite() && q > 0.0 {
            return Ok(q);
        }
    }
    Ok((s.log_value(n)? - r.log_value(n)?).exp())
}

fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::domain(format!("t must lie in [0, 1), got {t}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CesaroVerdict {
    pub bounded: Verdict,
    pub compact: Verdict,
    pub norm: NormEstimate,
    /// `sup_n s_n/(n+1) sum t^{n-k}/r_k`, the index-shifted variant of the
    /// norm formula; carried whenever it differs from `norm.value`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifted_index_norm: Option<f64>,
}

impl CesaroVerdict {
    pub fn pair(&self) -> VerdictPair {
        VerdictPair {
            bounded: self.bounded.clone(),
            compact: self.compact.clone(),
        }
    }
}

/// Growth class of `s_n / (n r_n)`, available when `r` is constant,
/// geometric or power-decay and `s` is closed-form. `Q_n` lies between 1 and
/// `1/(1 - t)` there, so `mu_n` shares the class.
fn mu_growth(r: &WeightSpec, s: &WeightSpec) -> Option<Growth> {
    match r {
        WeightSpec::Constant { .. } | WeightSpec::Geometric { .. } | WeightSpec::PowerDecay { .. } => {
            s.growth()?.mul(r.growth()?.recip()).map(|g| g.times_power(-1.0))
        }
        _ => None,
    }
}

/// Boundedness and compactness of `C_t : c0(r) -> c0(s)`, with the norm
/// estimate `sup mu_n`.
pub fn cesaro_verdict(t: f64, r: &WeightSpec, s: &WeightSpec, horizon: usize, tol: f64) -> Result<CesaroVerdict> {
    check_horizon(horizon)?;
    let mu = cesaro_mu_window(t, r, s, horizon)?;
    let shifted = mu
        .iter()
        .enumerate()
        .map(|(i, m)| m * (i + 1) as f64 / (i + 2) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let evidence = Evidence::new(GoverningSequence::Mu, mu)?;

    let ratio = ratio_limsup_estimate(s, 1..=horizon)?;
    let (bounded, compact) = if r == s && ratio.certified && ratio.estimate < 1.0 {
        (
            Ruling::certified(Decision::Holds, Criterion::RatioLimsup),
            Ruling::certified(Decision::Holds, Criterion::RatioLimsup),
        )
    } else if let Some(g) = mu_growth(r, s) {
        rulings_from_limit(g.limit(), Criterion::MuGrowth)
    } else {
        let (b, c) = window_rule(&evidence.window.values, tol);
        (Ruling::heuristic(b), Ruling::heuristic(c))
    };

    let pair = VerdictPair::reconcile(
        bounded.into_verdict(Property::Bounded, evidence.clone()),
        compact.into_verdict(Property::Compact, evidence.clone()),
    );
    let norm = NormEstimate {
        value: evidence.sup,
        argmax: evidence.argmax,
        lower_bound_only: !pair.bounded.certified_holds(),
    };
    Ok(CesaroVerdict {
        bounded: pair.bounded,
        compact: pair.compact,
        norm,
        shifted_index_norm: (shifted != norm.value).then_some(shifted),
    })
}

/// Verdict pair for any operator spec, dispatching on its form.
pub fn operator_verdicts(op: &OperatorSpec, horizon: usize, tol: f64) -> Result<VerdictPair> {
    match &op.form {
        OperatorForm::Rhaly { coeffs } => rhaly_verdict(coeffs, &op.codomain_weight, horizon, tol),
        OperatorForm::GenCesaro { t } => {
            Ok(cesaro_verdict(*t, &op.domain_weight, &op.codomain_weight, horizon, tol)?.pair())
        }
    }
}
