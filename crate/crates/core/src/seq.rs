//! Weight and coefficient sequences.
//!
//! Indices are 1-based throughout, matching the infinite matrices they feed.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::asymptotics::Growth;
use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation. Handles terms that outgrow the
/// running sum, which is the normal case for `sum 1/s_k`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// How a tabulated sequence continues past its last listed value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum TailRule {
    RepeatLast,
    GeometricExtrapolate { ratio: f64 },
}

impl TailRule {
    fn validate(&self) -> Result<()> {
        match *self {
            TailRule::RepeatLast => Ok(()),
            TailRule::GeometricExtrapolate { ratio } => {
                if ratio.is_finite() && ratio > 0.0 && ratio <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "tail ratio must lie in (0, 1], got {ratio}"
                    )))
                }
            }
        }
    }

    fn ratio(&self) -> f64 {
        match *self {
            TailRule::RepeatLast => 1.0,
            TailRule::GeometricExtrapolate { ratio } => ratio,
        }
    }

    fn extend(&self, last: f64, steps: usize) -> f64 {
        match *self {
            TailRule::RepeatLast => last,
            TailRule::GeometricExtrapolate { ratio } => last * powi_usize(ratio, steps),
        }
    }
}

fn powi_usize(base: f64, n: usize) -> f64 {
    match i32::try_from(n) {
        Ok(k) => base.powi(k),
        Err(_) => (n as f64 * base.ln()).exp(),
    }
}

fn check_index(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::domain("sequence indices start at 1"))
    } else {
        Ok(())
    }
}

/// A strictly positive, bounded weight sequence `s = {s_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    /// `s_n = ratio^n`, ratio in (0, 1).
    Geometric { ratio: f64 },
    /// `s_n = exp(-n^(1/alpha))`, integer alpha >= 2.
    ExpPower { alpha: u32 },
    /// `s_n = n^(-p)`, p > 0.
    PowerDecay { p: f64 },
    Constant { c: f64 },
    Tabulated { values: Vec<f64>, tail: TailRule },
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Geometric { ratio } => {
                if !(ratio.is_finite() && *ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::invalid(format!(
                        "geometric weight ratio must lie in (0, 1), got {ratio}"
                    )));
                }
            }
            WeightSpec::ExpPower { alpha } => {
                if *alpha < 2 {
                    return Err(Error::invalid(format!(
                        "exp-power weight needs alpha >= 2, got {alpha}"
                    )));
                }
            }
            WeightSpec::PowerDecay { p } => {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::invalid(format!("power-decay weight needs p > 0, got {p}")));
                }
            }
            WeightSpec::Constant { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::invalid(format!("constant weight must be positive, got {c}")));
                }
            }
            WeightSpec::Tabulated { values, tail } => {
                if values.is_empty() {
                    return Err(Error::invalid("tabulated weight needs at least one value"));
                }
                if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                    return Err(Error::invalid(format!(
                        "tabulated weights must be positive and finite, got {bad}"
                    )));
                }
                tail.validate()?;
            }
        }
        Ok(())
    }

    /// `ln s_n`; finite for every index even where `s_n` itself underflows.
    pub fn log_value(&self, n: usize) -> Result<f64> {
        check_index(n)?;
        let nf = n as f64;
        Ok(match self {
            WeightSpec::Geometric { ratio } => nf * ratio.ln(),
            WeightSpec::ExpPower { alpha } => -nf.powf(1.0 / f64::from(*alpha)),
            WeightSpec::PowerDecay { p } => -p * nf.ln(),
            WeightSpec::Constant { c } => c.ln(),
            WeightSpec::Tabulated { values, tail } => {
                let len = values.len();
                if n <= len {
                    values[n - 1].ln()
                } else {
                    values[len - 1].ln() + (n - len) as f64 * tail.ratio().ln()
                }
            }
        })
    }

    /// `s_n`. Fails with [`Error::Unrepresentable`] when the value
    /// underflows the normal `f64` range; use [`WeightSpec::log_value`] there.
    pub fn value(&self, n: usize) -> Result<f64> {
        check_index(n)?;
        let nf = n as f64;
        let v = match self {
            WeightSpec::Geometric { ratio } => powi_usize(*ratio, n),
            WeightSpec::ExpPower { alpha } => (-nf.powf(1.0 / f64::from(*alpha))).exp(),
            WeightSpec::PowerDecay { p } => nf.powf(-p),
            WeightSpec::Constant { c } => *c,
            WeightSpec::Tabulated { values, tail } => {
                let len = values.len();
                if n <= len {
                    values[n - 1]
                } else {
                    tail.extend(values[len - 1], n - len)
                }
            }
        };
        if v.is_finite() && v >= f64::MIN_POSITIVE {
            Ok(v)
        } else {
            Err(Error::Unrepresentable {
                index: n,
                value: v,
                what: "weight underflows f64",
            })
        }
    }

    /// `s_{n+1} / s_n`, computed without forming either weight.
    pub fn ratio(&self, n: usize) -> Result<f64> {
        check_index(n)?;
        let nf = n as f64;
        Ok(match self {
            WeightSpec::Geometric { ratio } => *ratio,
            WeightSpec::Constant { .. } => 1.0,
            WeightSpec::ExpPower { alpha } => {
                let inv = 1.0 / f64::from(*alpha);
                // (n+1)^(1/a) - n^(1/a) without cancellation
                let gap = nf.powf(inv) * (inv * (1.0 / nf).ln_1p()).exp_m1();
                (-gap).exp()
            }
            WeightSpec::PowerDecay { p } => (-p * (1.0 / nf).ln_1p()).exp(),
            WeightSpec::Tabulated { values, tail } => {
                let len = values.len();
                if n < len {
                    values[n] / values[n - 1]
                } else {
                    tail.ratio()
                }
            }
        })
    }

    /// `sup_n s_n`, exact from the kind.
    pub fn sup(&self) -> f64 {
        match self {
            WeightSpec::Geometric { ratio } => *ratio,
            WeightSpec::ExpPower { .. } => (-1.0f64).exp(),
            WeightSpec::PowerDecay { .. } => 1.0,
            WeightSpec::Constant { c } => *c,
            WeightSpec::Tabulated { values, .. } => values.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Structural check of `s_{n+1} <= s_n` for all n (non-strict).
    pub fn is_decreasing(&self) -> bool {
        match self {
            WeightSpec::Tabulated { values, .. } => values.windows(2).all(|w| w[1] <= w[0]),
            _ => true,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, WeightSpec::Tabulated { .. })
    }

    pub fn growth(&self) -> Option<Growth> {
        match self {
            WeightSpec::Geometric { ratio } => Some(Growth::geometric(ratio.ln())),
            WeightSpec::ExpPower { alpha } => Some(Growth::stretched(-1.0, 1.0 / f64::from(*alpha))),
            WeightSpec::PowerDecay { p } => Some(Growth::power(-p)),
            WeightSpec::Constant { .. } => Some(Growth::bounded()),
            WeightSpec::Tabulated { .. } => None,
        }
    }
}

/// Saturating result of a growing partial sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub value: f64,
    pub saturated: bool,
}

impl PartialSum {
    fn from_raw(v: f64) -> Self {
        if v.is_finite() {
            PartialSum {
                value: v,
                saturated: false,
            }
        } else {
            PartialSum {
                value: f64::MAX,
                saturated: true,
            }
        }
    }
}

/// `sum_{k=1}^{n} 1/s_k`.
pub fn reciprocal_partial_sum(w: &WeightSpec, n: usize) -> Result<PartialSum> {
    check_index(n)?;
    let raw = match w {
        WeightSpec::Geometric { ratio } => {
            let inv = 1.0 / ratio;
            (powi_usize(inv, n) - 1.0) * inv / (inv - 1.0)
        }
        WeightSpec::Constant { c } => n as f64 / c,
        _ => {
            let mut acc = CompensatedSum::new();
            for k in 1..=n {
                acc.add((-w.log_value(k)?).exp());
                if !acc.value().is_finite() {
                    break;
                }
            }
            acc.value()
        }
    };
    Ok(PartialSum::from_raw(raw))
}

/// `s_n * sum_{k=1}^{n} 1/s_k` for n = 1..=len.
///
/// Uses `P_n = 1 + (s_n / s_{n-1}) P_{n-1}`, which never forms the
/// (possibly overflowing) partial sum itself.
pub fn scaled_reciprocal_sums(w: &WeightSpec, len: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(len);
    match w {
        WeightSpec::Geometric { ratio } => {
            for n in 1..=len {
                out.push((1.0 - powi_usize(*ratio, n)) / (1.0 - ratio));
            }
        }
        WeightSpec::Constant { .. } => out.extend((1..=len).map(|n| n as f64)),
        _ => {
            let mut p = 0.0;
            for n in 1..=len {
                p = if n == 1 { 1.0 } else { 1.0 + w.ratio(n - 1)? * p };
                out.push(p);
            }
        }
    }
    Ok(out)
}

pub fn scaled_reciprocal_sum(w: &WeightSpec, n: usize) -> Result<f64> {
    check_index(n)?;
    Ok(*scaled_reciprocal_sums(w, n)?.last().expect("n >= 1"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub estimate: f64,
    pub certified: bool,
}

/// `limsup s_{n+1}/s_n`: exact for closed-form kinds, a window maximum for
/// tabulated weights.
pub fn ratio_limsup_estimate(w: &WeightSpec, window: RangeInclusive<usize>) -> Result<RatioEstimate> {
    let (lo, hi) = (*window.start(), *window.end());
    if lo == 0 || hi < lo || hi - lo + 1 < 8 {
        return Err(Error::domain(format!(
            "ratio window must start at 1 or later and hold at least 8 indices, got {lo}..={hi}"
        )));
    }
    let certified = |estimate| Ok(RatioEstimate { estimate, certified: true });
    match w {
        WeightSpec::Geometric { ratio } => certified(*ratio),
        WeightSpec::ExpPower { .. } | WeightSpec::PowerDecay { .. } | WeightSpec::Constant { .. } => {
            certified(1.0)
        }
        WeightSpec::Tabulated { .. } => {
            let mut best = f64::NEG_INFINITY;
            for n in window {
                best = best.max(w.ratio(n)?);
            }
            Ok(RatioEstimate {
                estimate: best,
                certified: false,
            })
        }
    }
}

/// The diagonal sequence `a` of a Rhaly matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffSpec {
    /// `a_n = 1/n`
    Harmonic,
    PowerDecay { p: f64 },
    Geometric { ratio: f64 },
    Constant { c: f64 },
    Tabulated { values: Vec<f64>, tail: TailRule },
}

impl CoeffSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoeffSpec::Harmonic => {}
            CoeffSpec::PowerDecay { p } => {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::invalid(format!("power-decay coefficients need p > 0, got {p}")));
                }
            }
            CoeffSpec::Geometric { ratio } => {
                if !(ratio.is_finite() && *ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::invalid(format!(
                        "geometric coefficient ratio must lie in (0, 1), got {ratio}"
                    )));
                }
            }
            CoeffSpec::Constant { c } => {
                if !(c.is_finite() && *c != 0.0) {
                    return Err(Error::invalid(format!("constant coefficient must be nonzero, got {c}")));
                }
            }
            CoeffSpec::Tabulated { values, tail } => {
                if values.is_empty() {
                    return Err(Error::invalid("tabulated coefficients need at least one value"));
                }
                if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v != 0.0)) {
                    return Err(Error::invalid(format!(
                        "tabulated coefficients must be nonzero and finite, got {bad}"
                    )));
                }
                tail.validate()?;
            }
        }
        Ok(())
    }

    pub fn value(&self, n: usize) -> Result<f64> {
        check_index(n)?;
        let nf = n as f64;
        let v = match self {
            CoeffSpec::Harmonic => 1.0 / nf,
            CoeffSpec::PowerDecay { p } => nf.powf(-p),
            CoeffSpec::Geometric { ratio } => powi_usize(*ratio, n),
            CoeffSpec::Constant { c } => *c,
            CoeffSpec::Tabulated { values, tail } => {
                let len = values.len();
                if n <= len {
                    values[n - 1]
                } else {
                    tail.extend(values[len - 1], n - len)
                }
            }
        };
        if v != 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Unrepresentable {
                index: n,
                value: v,
                what: "coefficient underflows to zero",
            })
        }
    }

    /// Every validated kind is bounded; kept as the hook the criteria consult.
    pub fn is_bounded(&self) -> bool {
        true
    }

    /// `a_n -> 0`, decided from the kind.
    pub fn is_null(&self) -> bool {
        match self {
            CoeffSpec::Harmonic | CoeffSpec::PowerDecay { .. } | CoeffSpec::Geometric { .. } => true,
            CoeffSpec::Constant { .. } => false,
            CoeffSpec::Tabulated { tail, .. } => tail.ratio() < 1.0,
        }
    }

    /// Whether all `a_n` are pairwise distinct.
    pub fn is_distinct(&self) -> bool {
        match self {
            CoeffSpec::Harmonic | CoeffSpec::PowerDecay { .. } | CoeffSpec::Geometric { .. } => true,
            CoeffSpec::Constant { .. } => false,
            CoeffSpec::Tabulated { values, tail } => {
                if matches!(tail, TailRule::RepeatLast) || tail.ratio() == 1.0 {
                    return false;
                }
                let mut sorted = values.clone();
                sorted.sort_by(f64::total_cmp);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return false;
                }
                // tail values are last * ratio^j, j >= 1
                let last = values[values.len() - 1];
                values.iter().all(|v| tail_step(last, tail.ratio(), *v).is_none())
            }
        }
    }

    /// `lim n a_n` when the kind determines it.
    pub fn chi(&self) -> Option<f64> {
        match self {
            CoeffSpec::Harmonic => Some(1.0),
            CoeffSpec::PowerDecay { p } if *p == 1.0 => Some(1.0),
            CoeffSpec::PowerDecay { p } if *p > 1.0 => Some(0.0),
            CoeffSpec::Geometric { .. } => Some(0.0),
            CoeffSpec::Tabulated { tail, .. } if tail.ratio() < 1.0 => Some(0.0),
            _ => None,
        }
    }

    /// Growth class of `|a_n|`.
    pub fn growth(&self) -> Option<Growth> {
        match self {
            CoeffSpec::Harmonic => Some(Growth::power(-1.0)),
            CoeffSpec::PowerDecay { p } => Some(Growth::power(-p)),
            CoeffSpec::Geometric { ratio } => Some(Growth::geometric(ratio.ln())),
            CoeffSpec::Constant { .. } => Some(Growth::bounded()),
            CoeffSpec::Tabulated { .. } => None,
        }
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self, CoeffSpec::Tabulated { .. })
    }

    /// Index n with `a_n == value` up to relative tolerance `rel_tol`,
    /// found by inverting the kind's closed form (no scan limit).
    pub fn index_of(&self, value: f64, rel_tol: f64) -> Option<usize> {
        if !value.is_finite() || value == 0.0 {
            return None;
        }
        let matches = |n: usize| {
            self.value(n)
                .map(|a| (a - value).abs() <= rel_tol * value.abs())
                .unwrap_or(false)
        };
        let near = |guess: f64| -> Option<usize> {
            if !guess.is_finite() || guess < 0.5 || guess > 1e15 {
                return None;
            }
            let g = guess.round() as usize;
            [g.saturating_sub(1), g, g + 1]
                .into_iter()
                .filter(|n| *n >= 1)
                .find(|n| matches(*n))
        };
        match self {
            CoeffSpec::Harmonic => near(1.0 / value),
            CoeffSpec::PowerDecay { p } => near(value.powf(-1.0 / p)),
            CoeffSpec::Geometric { ratio } => near(value.ln() / ratio.ln()),
            CoeffSpec::Constant { c } => ((c - value).abs() <= rel_tol * value.abs()).then_some(1),
            CoeffSpec::Tabulated { values, tail } => {
                if let Some(i) = values.iter().position(|v| (v - value).abs() <= rel_tol * value.abs()) {
                    return Some(i + 1);
                }
                let last = values[values.len() - 1];
                match tail {
                    TailRule::RepeatLast => None,
                    TailRule::GeometricExtrapolate { ratio } if *ratio == 1.0 => None,
                    TailRule::GeometricExtrapolate { ratio } => {
                        let j = value.abs().ln() - last.abs().ln();
                        near(values.len() as f64 + j / ratio.ln())
                            .filter(|n| *n > values.len())
                    }
                }
            }
        }
    }
}

/// j >= 1 with `last * ratio^j == v`, if any.
fn tail_step(last: f64, ratio: f64, v: f64) -> Option<u64> {
    if ratio >= 1.0 || v.signum() != last.signum() {
        return None;
    }
    let j = (v / last).ln() / ratio.ln();
    if !(j.is_finite() && j >= 0.5) {
        return None;
    }
    let jr = j.round();
    let back = last * ratio.powf(jr);
    ((back - v).abs() <= 1e-12 * v.abs()).then_some(jr as u64)
}

/// Contiguous finite piece of a sequence, starting at index `start >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqWindow {
    pub start: usize,
    pub values: Vec<f64>,
}

impl SeqWindow {
    pub fn new(start: usize, values: Vec<f64>) -> Result<Self> {
        if start == 0 {
            return Err(Error::domain("window indices start at 1"));
        }
        if values.is_empty() {
            return Err(Error::domain("window must hold at least one value"));
        }
        Ok(SeqWindow { start, values })
    }

    /// Window starting at index 1.
    pub fn from_prefix(values: Vec<f64>) -> Result<Self> {
        Self::new(1, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last covered index.
    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(self.start).and_then(|i| self.values.get(i).copied())
    }

    pub fn indexed(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.start + i, *v))
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `|x_n| s_n`, through logs when `s_n` underflows.
pub(crate) fn weighted_abs(x: f64, w: &WeightSpec, n: usize) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    match w.value(n) {
        Ok(s) => Ok(x.abs() * s),
        Err(Error::Unrepresentable { .. }) => Ok((x.abs().ln() + w.log_value(n)?).exp()),
        Err(e) => Err(e),
    }
}

/// `max(sup_{k in window} |x_k| s_k, tail_bound)`.
pub fn weighted_norm(x: &SeqWindow, w: &WeightSpec, tail_bound: f64) -> Result<f64> {
    if !(tail_bound >= 0.0) || !tail_bound.is_finite() {
        return Err(Error::domain(format!(
            "tail bound must be a finite nonnegative number, got {tail_bound}"
        )));
    }
    let mut best = tail_bound;
    for (n, v) in x.indexed() {
        best = best.max(weighted_abs(v, w, n)?);
    }
    Ok(best)
}
