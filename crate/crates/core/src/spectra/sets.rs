//! Symbolic subsets of the complex plane with tri-state membership.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::Limit;
use crate::criteria::{window_rule, DEFAULT_HORIZON, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::seq::{CoeffSpec, WeightSpec};

/// Relative tolerance for matching a point against a generated value.
pub const MEMBERSHIP_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

impl Membership {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Membership::Yes
        } else {
            Membership::No
        }
    }

    fn not(self) -> Self {
        match self {
            Membership::Yes => Membership::No,
            Membership::No => Membership::Yes,
            Membership::Unknown => Membership::Unknown,
        }
    }

    fn any(items: impl IntoIterator<Item = Membership>) -> Self {
        let mut unknown = false;
        for m in items {
            match m {
                Membership::Yes => return Membership::Yes,
                Membership::Unknown => unknown = true,
                Membership::No => {}
            }
        }
        if unknown {
            Membership::Unknown
        } else {
            Membership::No
        }
    }

    fn all(items: impl IntoIterator<Item = Membership>) -> Self {
        Membership::any(items.into_iter().map(Membership::not)).not()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Greater,
    Less,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolicSet {
    Empty,
    /// `S = {a_n : n in N}`.
    CoefficientValues { coeffs: CoeffSpec },
    /// `{1/n : n in N}`.
    ReciprocalIntegers,
    Points { points: Vec<Complex64> },
    /// `{lambda != 0 : Re(1/lambda) <relation> threshold}`.
    ReciprocalRealPart { relation: Relation, threshold: f64 },
    Union { parts: Vec<SymbolicSet> },
    Intersection { parts: Vec<SymbolicSet> },
    Difference {
        base: Box<SymbolicSet>,
        removed: Box<SymbolicSet>,
    },
    /// `A_1` where no closed form applies; membership is windowed.
    DecayCondition { coeffs: CoeffSpec, weight: WeightSpec, chi: f64 },
    /// `A_2` where no closed form applies; membership is windowed.
    SeriesCondition { coeffs: CoeffSpec, weight: WeightSpec, chi: f64 },
    /// The operator's spectrum where no theorem pins it down.
    Spectrum,
}

impl SymbolicSet {
    pub fn zero() -> Self {
        SymbolicSet::Points {
            points: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn with_zero(self) -> Self {
        SymbolicSet::Union {
            parts: vec![self, SymbolicSet::zero()],
        }
    }

    pub fn minus(self, removed: SymbolicSet) -> Self {
        SymbolicSet::Difference {
            base: Box::new(self),
            removed: Box::new(removed),
        }
    }

    pub fn union(parts: Vec<SymbolicSet>) -> Self {
        SymbolicSet::Union { parts }
    }

    pub fn contains(&self, lambda: Complex64) -> Membership {
        match self {
            SymbolicSet::Empty => Membership::No,
            SymbolicSet::CoefficientValues { coeffs } => {
                Membership::from_bool(coefficient_index(coeffs, lambda).is_some())
            }
            SymbolicSet::ReciprocalIntegers => Membership::from_bool(reciprocal_index(lambda).is_some()),
            SymbolicSet::Points { points } => Membership::from_bool(points.iter().any(|p| {
                if *p == Complex64::new(0.0, 0.0) {
                    lambda == *p
                } else {
                    (lambda - p).norm() <= MEMBERSHIP_REL_TOL * p.norm()
                }
            })),
            SymbolicSet::ReciprocalRealPart { relation, threshold } => {
                if lambda.norm() == 0.0 {
                    return Membership::No;
                }
                let alpha = reciprocal_real_part(lambda);
                if (alpha - threshold).abs() <= MEMBERSHIP_REL_TOL * threshold.abs().max(1.0) {
                    return Membership::No;
                }
                Membership::from_bool(match relation {
                    Relation::Greater => alpha > *threshold,
                    Relation::Less => alpha < *threshold,
                })
            }
            SymbolicSet::Union { parts } => Membership::any(parts.iter().map(|p| p.contains(lambda))),
            SymbolicSet::Intersection { parts } => Membership::all(parts.iter().map(|p| p.contains(lambda))),
            SymbolicSet::Difference { base, removed } => match (base.contains(lambda), removed.contains(lambda)) {
                (Membership::No, _) | (_, Membership::Yes) => Membership::No,
                (Membership::Yes, Membership::No) => Membership::Yes,
                _ => Membership::Unknown,
            },
            SymbolicSet::DecayCondition { coeffs, weight, chi } => {
                a1_a2_membership(coeffs, weight, *chi, lambda)
                    .map(|m| m.in_a1)
                    .unwrap_or(Membership::No)
            }
            SymbolicSet::SeriesCondition { coeffs, weight, chi } => {
                a1_a2_membership(coeffs, weight, *chi, lambda)
                    .map(|m| m.in_a2)
                    .unwrap_or(Membership::No)
            }
            SymbolicSet::Spectrum => Membership::Unknown,
        }
    }
}

/// `Re(1/lambda)`.
pub fn reciprocal_real_part(lambda: Complex64) -> f64 {
    lambda.re / lambda.norm_sqr()
}

/// n with `a_n == lambda` (real `lambda`, relative tolerance).
pub fn coefficient_index(coeffs: &CoeffSpec, lambda: Complex64) -> Option<usize> {
    if lambda.im.abs() > MEMBERSHIP_REL_TOL * lambda.norm() {
        return None;
    }
    coeffs.index_of(lambda.re, MEMBERSHIP_REL_TOL)
}

/// m with `lambda == 1/m`.
pub fn reciprocal_index(lambda: Complex64) -> Option<usize> {
    if lambda.norm() == 0.0 || lambda.im.abs() > MEMBERSHIP_REL_TOL * lambda.norm() || lambda.re <= 0.0 {
        return None;
    }
    let m = (1.0 / lambda.re).round();
    if !(1.0..1e15).contains(&m) {
        return None;
    }
    ((1.0 / m - lambda.re).abs() <= MEMBERSHIP_REL_TOL * lambda.re).then_some(m as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A1A2Membership {
    pub in_a1: Membership,
    pub in_a2: Membership,
    /// `Re(1/lambda)`
    pub alpha: f64,
    /// Whether both answers came from closed-form rules.
    pub symbolic: bool,
}

/// Exponent `c` such that, for closed-form weights with polynomial
/// behavior `s_n ~ n^{1-c}`... more precisely `s_n ~ n^{-p}` gives `c = 1 + p`:
/// `A_1 = {lambda in S : chi Re(1/lambda) < c}` and
/// `A_2 = {lambda notin S∪{0} : chi Re(1/lambda) > c}`.
/// `None` for weights decaying faster than any power (then `A_1 = S`,
/// `A_2 = ∅`) or without a closed form.
fn critical_exponent(weight: &WeightSpec) -> Option<Option<f64>> {
    let g = weight.growth()?;
    if g.geometric.abs() > 0.0 || g.stretched.abs() > 0.0 {
        return Some(None);
    }
    Some(Some(1.0 - g.power))
}

/// Windowed tri-state for `A_1`/`A_2` on weights without a closed form.
#[derive(Debug, Clone, Copy)]
pub struct WindowConfig {
    pub horizon: usize,
    pub tol: f64,
    /// Margin around 1 for the Raabe statistic.
    pub raabe_margin: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            horizon: DEFAULT_HORIZON,
            tol: DEFAULT_TOL,
            raabe_margin: 0.05,
        }
    }
}

/// Membership of `lambda` in `A_1` and `A_2` for `R_a` on `c0(s)`, where
/// `chi = lim n a_n`.
pub fn a1_a2_membership(coeffs: &CoeffSpec, weight: &WeightSpec, chi: f64, lambda: Complex64) -> Result<A1A2Membership> {
    a1_a2_membership_with(coeffs, weight, chi, lambda, WindowConfig::default(), false)
}

/// As [`a1_a2_membership`]; `force_window` skips the closed-form rules.
pub fn a1_a2_membership_with(
    coeffs: &CoeffSpec,
    weight: &WeightSpec,
    chi: f64,
    lambda: Complex64,
    cfg: WindowConfig,
    force_window: bool,
) -> Result<A1A2Membership> {
    if lambda.norm() == 0.0 {
        return Err(Error::domain("A1/A2 membership is undefined at lambda = 0"));
    }
    if !chi.is_finite() || chi == 0.0 {
        return Err(Error::domain(format!("chi = lim n a_n must be finite and nonzero, got {chi}")));
    }
    let alpha = reciprocal_real_part(lambda);
    let exponent = alpha * chi;
    let in_s = coefficient_index(coeffs, lambda).is_some();

    let symbolic = if force_window { None } else { symbolic_rules(coeffs, weight, exponent) };
    let (in_a1, in_a2, symbolic) = match symbolic {
        Some((decays, converges)) => (
            Membership::from_bool(in_s && decays),
            Membership::from_bool(!in_s && converges),
            true,
        ),
        None => {
            let a1 = if in_s { windowed_decay(coeffs, weight, exponent, cfg)? } else { Membership::No };
            let a2 = if in_s { Membership::No } else { windowed_series(weight, exponent, cfg)? };
            (a1, a2, false)
        }
    };
    Ok(A1A2Membership {
        in_a1,
        in_a2,
        alpha,
        symbolic,
    })
}

/// `(a_n s_n n^e -> 0, sum 1/(s_n n^e) < inf)` from growth classes.
fn symbolic_rules(coeffs: &CoeffSpec, weight: &WeightSpec, exponent: f64) -> Option<(bool, bool)> {
    let s = weight.growth()?;
    let a = coeffs.growth()?;
    let decays = a.mul(s)?.times_power(exponent).limit() == Limit::Zero;
    let converges = s.recip().times_power(-exponent).series_converges();
    Some((decays, converges))
}

fn windowed_decay(coeffs: &CoeffSpec, weight: &WeightSpec, exponent: f64, cfg: WindowConfig) -> Result<Membership> {
    let values: Vec<f64> = (1..=cfg.horizon)
        .map(|n| {
            let ln = coeffs.value(n)?.abs().ln() + weight.log_value(n)? + exponent * (n as f64).ln();
            Ok(ln.exp())
        })
        .collect::<Result<_>>()?;
    Ok(match window_rule(&values, cfg.tol).1 {
        crate::criteria::Decision::Holds => Membership::Yes,
        crate::criteria::Decision::Fails => Membership::No,
        crate::criteria::Decision::Unknown => Membership::Unknown,
    })
}

/// Raabe's test on `u_n = 1/(s_n n^e)`: `R_n = n (u_n/u_{n+1} - 1)` over the
/// last half of the window, all above `1 + margin` (converges) or all below
/// `1 - margin` (diverges).
fn windowed_series(weight: &WeightSpec, exponent: f64, cfg: WindowConfig) -> Result<Membership> {
    let ln_u = |n: usize| -> Result<f64> { Ok(-weight.log_value(n)? - exponent * (n as f64).ln()) };
    let mut above = true;
    let mut below = true;
    for n in cfg.horizon / 2..cfg.horizon {
        let raabe = n as f64 * (ln_u(n)? - ln_u(n + 1)?).exp_m1();
        above &= raabe > 1.0 + cfg.raabe_margin;
        below &= raabe < 1.0 - cfg.raabe_margin;
    }
    Ok(if above {
        Membership::Yes
    } else if below {
        Membership::No
    } else {
        Membership::Unknown
    })
}

/// Whether every `a_n` is positive with `a_1` the largest, so `1/a_n >= 1/a_1`.
fn positive_with_max_first(coeffs: &CoeffSpec) -> bool {
    match coeffs {
        CoeffSpec::Harmonic | CoeffSpec::PowerDecay { .. } | CoeffSpec::Geometric { .. } => true,
        CoeffSpec::Constant { c } => *c > 0.0,
        CoeffSpec::Tabulated { .. } => false,
    }
}

/// `A_1` as a symbolic set.
pub fn a1_set(coeffs: &CoeffSpec, weight: &WeightSpec, chi: f64) -> SymbolicSet {
    let s = SymbolicSet::CoefficientValues { coeffs: coeffs.clone() };
    match (critical_exponent(weight), coeffs.growth()) {
        (Some(None), Some(_)) => s,
        (Some(Some(c)), Some(_)) => {
            let threshold = c / chi;
            let relation = if chi > 0.0 { Relation::Less } else { Relation::Greater };
            // chi/a_n >= chi/a_1 >= c for all n
            if chi > 0.0 && positive_with_max_first(coeffs) {
                if let Ok(a1) = coeffs.value(1) {
                    if chi / a1 >= c {
                        return SymbolicSet::Empty;
                    }
                }
            }
            SymbolicSet::Intersection {
                parts: vec![s, SymbolicSet::ReciprocalRealPart { relation, threshold }],
            }
        }
        _ => SymbolicSet::DecayCondition {
            coeffs: coeffs.clone(),
            weight: weight.clone(),
            chi,
        },
    }
}

/// `A_2` as a symbolic set.
pub fn a2_set(coeffs: &CoeffSpec, weight: &WeightSpec, chi: f64) -> SymbolicSet {
    let s_with_zero = SymbolicSet::CoefficientValues { coeffs: coeffs.clone() }.with_zero();
    match critical_exponent(weight) {
        Some(None) => SymbolicSet::Empty,
        Some(Some(c)) => {
            let relation = if chi > 0.0 { Relation::Greater } else { Relation::Less };
            SymbolicSet::ReciprocalRealPart {
                relation,
                threshold: c / chi,
            }
            .minus(s_with_zero)
        }
        None => SymbolicSet::SeriesCondition {
            coeffs: coeffs.clone(),
            weight: weight.clone(),
            chi,
        },
    }
}
