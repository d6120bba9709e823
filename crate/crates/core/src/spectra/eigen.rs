//! Closed-form eigenvectors of `R_a`, `C_t` and `R_a*`, and the Kummer
//! certificate that places the `R_a` eigenvectors in `c0(s)`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::{Exp, SignedLogValue};
use crate::seq::{scaled_reciprocal_sums, CoeffSpec, CompensatedSum, SeqWindow, WeightSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenvector {
    pub lambda: f64,
    /// Index of the first nonzero component (normalized to 1).
    pub index: usize,
    pub values: SeqWindow,
    /// First index whose value is nonzero in log space but underflowed to 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub underflow_from: Option<usize>,
}

/// Running product kept as a sign and a compensated log-magnitude sum.
struct LogProduct {
    sign: i8,
    ln_abs: CompensatedSum,
}

impl LogProduct {
    fn one() -> Self {
        LogProduct {
            sign: 1,
            ln_abs: CompensatedSum::new(),
        }
    }

    fn mul(&mut self, factor: f64) {
        let f = SignedLogValue::from_f64(factor);
        self.sign *= f.sign;
        if f.sign != 0 {
            self.ln_abs.add(f.ln_abs);
        }
    }

    /// Multiplies by `num/den`, going through logs when the quotient is not
    /// a normal f64.
    fn mul_quotient(&mut self, num: f64, den: f64) {
        let q = num / den;
        if q.is_normal() {
            self.mul(q);
        } else {
            let (n, d) = (SignedLogValue::from_f64(num), SignedLogValue::from_f64(den));
            self.sign *= n.sign * d.sign;
            if n.sign != 0 {
                self.ln_abs.add(n.ln_abs);
                self.ln_abs.add(-d.ln_abs);
            }
        }
    }

    fn value(&self) -> SignedLogValue {
        if self.sign == 0 {
            SignedLogValue::ZERO
        } else {
            SignedLogValue {
                sign: self.sign,
                ln_abs: self.ln_abs.value(),
            }
        }
    }
}

fn assemble(lambda: f64, index: usize, len: usize, tail: impl Iterator<Item = SignedLogValue>) -> Result<Eigenvector> {
    let mut values = vec![0.0; index - 1];
    values.push(1.0);
    let mut underflow_from = None;
    for (offset, v) in tail.enumerate() {
        let n = index + 1 + offset;
        match v.exp() {
            Exp::Value(x) => values.push(x),
            Exp::Underflow => {
                underflow_from.get_or_insert(n);
                values.push(0.0);
            }
            Exp::Overflow => {
                return Err(Error::Numeric(format!("eigenvector component {n} overflows f64")));
            }
        }
    }
    debug_assert_eq!(values.len(), len);
    Ok(Eigenvector {
        lambda,
        index,
        values: SeqWindow::from_prefix(values)?,
        underflow_from,
    })
}

fn check_order(m: usize, len: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("eigenvector index must be >= 1"));
    }
    if len < m {
        return Err(Error::domain(format!("order {len} is below the eigenvector index {m}")));
    }
    Ok(())
}

/// Eigenvector of `R_a` for `lambda = a_m`: zeros before m, `x_m = 1`, and
/// `x_n = x_{n-1} (lambda/a_{n-1}) / (lambda/a_n - 1)` beyond.
pub fn eigenvector_rhaly(a: &CoeffSpec, m: usize, len: usize) -> Result<Eigenvector> {
    check_order(m, len)?;
    let lambda = a.value(m)?;
    let mut prod = LogProduct::one();
    let mut tail = Vec::with_capacity(len - m);
    let mut prev = lambda;
    for j in m + 1..=len {
        let aj = a.value(j)?;
        if aj == lambda {
            return Err(Error::Degenerate { index: j });
        }
        // (lambda/a_{j-1}) / ((lambda - a_j)/a_j)
        prod.mul_quotient(lambda, prev);
        prod.mul_quotient(aj, lambda - aj);
        tail.push(prod.value());
        prev = aj;
    }
    assemble(lambda, m, len, tail.into_iter())
}

/// Eigenvector of `C_t` for `lambda = 1/m`:
/// `x_{m+n} = m(m+1)...(m+n-1)/n! t^n`, built from the ratio
/// `x_{m+n+1} / x_{m+n} = t (m+n)/(n+1)`.
pub fn eigenvector_cesaro(t: f64, m: usize, len: usize) -> Result<Eigenvector> {
    check_order(m, len)?;
    if !(t.is_finite() && (0.0..1.0).contains(&t)) {
        return Err(Error::domain(format!("t must lie in [0, 1), got {t}")));
    }
    let mut prod = LogProduct::one();
    let tail = (0..len - m).map(|n| {
        prod.mul(t * (m + n) as f64 / (n + 1) as f64);
        prod.value()
    });
    let tail: Vec<_> = tail.collect();
    assemble(1.0 / m as f64, m, len, tail.into_iter())
}

/// Eigenvector of the adjoint `R_a*` for `lambda = a_k`, padded with zeros
/// to `len`: `x_1 = 1`, `x_n = x_{n-1} (1 - a_{n-1}/lambda)` for `n <= k`.
pub fn adjoint_eigenvector_rhaly(a: &CoeffSpec, k: usize, len: usize) -> Result<SeqWindow> {
    check_order(k, len)?;
    let lambda = a.value(k)?;
    let mut values = vec![0.0; len];
    values[0] = 1.0;
    for n in 2..=k {
        values[n - 1] = values[n - 2] * (1.0 - a.value(n - 1)? / lambda);
        if !values[n - 1].is_finite() {
            return Err(Error::Numeric(format!("adjoint eigenvector component {n} overflows f64")));
        }
    }
    SeqWindow::from_prefix(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KummerVerdict {
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KummerCertificate {
    pub q: SeqWindow,
    pub statistic: SeqWindow,
    pub verdict: KummerVerdict,
}

/// Kummer's test for `sum |x_n s_n|^2` with
/// `q_n = s_{n+1} / (s_n^2 a_n^2 sum_{k<=n} 1/s_k)` over the indices in
/// `window`. The statistic is `q_n |x_n s_n|^2 / |x_{n+1} s_{n+1}|^2 - q_{n+1}`;
/// the verdict is `Diverging` when it is positive and strictly increasing
/// over the last half of the window.
pub fn kummer_certificate(
    a: &CoeffSpec,
    s: &WeightSpec,
    x: &SeqWindow,
    window: RangeInclusive<usize>,
) -> Result<KummerCertificate> {
    let (lo, hi) = (*window.start(), *window.end());
    if lo == 0 || hi < lo {
        return Err(Error::domain(format!("invalid Kummer window {lo}..={hi}")));
    }
    if x.start > lo || x.end() < hi + 1 {
        return Err(Error::domain(format!(
            "vector covers {}..={}, Kummer window needs {lo}..={}",
            x.start,
            x.end(),
            hi + 1
        )));
    }
    let scaled = scaled_reciprocal_sums(s, hi + 1)?;
    // q_n = rho_n / (a_n^2 P_n) with rho_n = s_{n+1}/s_n and P_n = s_n sum 1/s_k
    let q_at = |n: usize| -> Result<f64> {
        let an = a.value(n)?;
        Ok(s.ratio(n)? / (an * an * scaled[n - 1]))
    };
    let mut q = Vec::with_capacity(hi - lo + 1);
    let mut stat = Vec::with_capacity(hi - lo + 1);
    for n in lo..=hi {
        let xn = x.get(n).expect("covered");
        let xn1 = x.get(n + 1).expect("covered");
        if xn1 == 0.0 {
            return Err(Error::Numeric(format!("Kummer statistic undefined at n = {n}: x_(n+1) = 0")));
        }
        let rho = s.ratio(n)?;
        let qn = q_at(n)?;
        let ratio = xn / (xn1 * rho);
        let value = qn * ratio * ratio - q_at(n + 1)?;
        if !value.is_finite() {
            return Err(Error::Numeric(format!("Kummer statistic is not finite at n = {n}")));
        }
        q.push(qn);
        stat.push(value);
    }
    let half = &stat[stat.len() / 2..];
    let diverging = half.iter().all(|v| *v > 0.0) && half.windows(2).all(|w| w[1] > w[0]);
    Ok(KummerCertificate {
        q: SeqWindow::new(lo, q)?,
        statistic: SeqWindow::new(lo, stat)?,
        verdict: if diverging {
            KummerVerdict::Diverging
        } else {
            KummerVerdict::Inconclusive
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::OperatorSpec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const HALF: WeightSpec = WeightSpec::Geometric { ratio: 0.5 };

    fn residual_inf(op: &OperatorSpec, lambda: f64, x: &SeqWindow) -> f64 {
        let y = op.apply_truncated(x, x.len()).unwrap();
        y.values
            .iter()
            .zip(&x.values)
            .map(|(yn, xn)| (yn - lambda * xn).abs())
            .fold(0.0, f64::max)
            / x.sup_abs()
    }

    #[test]
    fn harmonic_telescopes() {
        let ones = eigenvector_rhaly(&CoeffSpec::Harmonic, 1, 50).unwrap();
        for v in &ones.values.values {
            assert_relative_eq!(*v, 1.0, max_relative = 1e-13);
        }
        let x = eigenvector_rhaly(&CoeffSpec::Harmonic, 2, 300).unwrap();
        assert_eq!(x.values.values[0], 0.0);
        for (n, v) in x.values.indexed().skip(1) {
            assert_relative_eq!(v, (n - 1) as f64, max_relative = 1e-12);
        }
        assert_eq!(x.lambda, 0.5);
    }

    #[test]
    fn rhaly_degenerate_denominator() {
        let a = CoeffSpec::Tabulated {
            values: vec![1.0, 0.5, 0.25, 0.5],
            tail: crate::seq::TailRule::GeometricExtrapolate { ratio: 0.5 },
        };
        assert_eq!(eigenvector_rhaly(&a, 2, 10), Err(Error::Degenerate { index: 4 }));
        assert!(eigenvector_rhaly(&a, 3, 3).is_ok());
    }

    #[test]
    fn geometric_coefficients_residual() {
        let a = CoeffSpec::Geometric { ratio: 0.8 };
        let op = OperatorSpec::rhaly(a.clone(), HALF);
        for m in [1, 2, 3, 5, 10] {
            let x = eigenvector_rhaly(&a, m, 60).unwrap();
            assert!(residual_inf(&op, x.lambda, &x.values) < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn rhaly_underflow_is_flagged() {
        let a = CoeffSpec::Tabulated {
            values: vec![1e300, 1e-300],
            tail: crate::seq::TailRule::GeometricExtrapolate { ratio: 0.5 },
        };
        // x_n is about a_n / a_1
        let x = eigenvector_rhaly(&a, 1, 10).unwrap();
        assert_eq!(x.underflow_from, Some(2));
        assert_eq!(x.values.values[0], 1.0);
        assert!(x.values.values[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cesaro_closed_forms() {
        let x1 = eigenvector_cesaro(0.5, 1, 40).unwrap();
        let x2 = eigenvector_cesaro(0.5, 2, 40).unwrap();
        for n in 1..=40 {
            assert_relative_eq!(x1.values.get(n).unwrap(), 0.5f64.powi(n as i32 - 1), max_relative = 1e-12);
            if n >= 2 {
                let want = (n - 1) as f64 * 0.5f64.powi(n as i32 - 2);
                assert_relative_eq!(x2.values.get(n).unwrap(), want, max_relative = 1e-12);
            }
        }
        let x3 = eigenvector_cesaro(0.5, 3, 10).unwrap();
        assert_relative_eq!(x3.values.get(5).unwrap(), 1.5, max_relative = 1e-14);
        let e = eigenvector_cesaro(0.0, 3, 6).unwrap();
        assert_eq!(e.values.values, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(eigenvector_cesaro(1.0, 1, 5).is_err());
    }

    #[test]
    fn adjoint_vectors() {
        let a = CoeffSpec::Harmonic;
        assert_eq!(adjoint_eigenvector_rhaly(&a, 1, 4).unwrap().values, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(adjoint_eigenvector_rhaly(&a, 2, 4).unwrap().values, vec![1.0, -1.0, 0.0, 0.0]);
        assert_eq!(adjoint_eigenvector_rhaly(&a, 3, 5).unwrap().values, vec![1.0, -2.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn adjoint_residual_is_exact_up_to_rounding() {
        let a = CoeffSpec::Harmonic;
        let op = OperatorSpec::rhaly(a.clone(), HALF);
        for k in [1, 2, 3, 7] {
            let x = adjoint_eigenvector_rhaly(&a, k, 12).unwrap();
            assert!(x.values[k..].iter().all(|v| *v == 0.0));
            let y = op.apply_adjoint_finite(&x).unwrap();
            let lambda = a.value(k).unwrap();
            for (yn, xn) in y.values.iter().zip(&x.values) {
                assert!((yn - lambda * xn).abs() <= 1e-14 * x.sup_abs(), "k = {k}");
            }
        }
    }

    #[test]
    fn kummer_harmonic_diverges() {
        let x = eigenvector_rhaly(&CoeffSpec::Harmonic, 2, 120).unwrap();
        let cert = kummer_certificate(&CoeffSpec::Harmonic, &HALF, &x.values, 50..=100).unwrap();
        assert_eq!(cert.verdict, KummerVerdict::Diverging);
        assert!(cert.statistic.values.iter().all(|v| *v > 0.0));
        let early = kummer_certificate(&CoeffSpec::Harmonic, &HALF, &x.values, 10..=100).unwrap();
        assert!(early.statistic.get(10).unwrap() > 0.0);
        assert!(early.statistic.get(10).unwrap() < early.statistic.get(100).unwrap());
    }

    #[test]
    fn kummer_degenerate_case_is_inconclusive() {
        let one = WeightSpec::Constant { c: 1.0 };
        let x = SeqWindow::from_prefix(vec![1.0; 64]).unwrap();
        let cert = kummer_certificate(&CoeffSpec::Constant { c: 1.0 }, &one, &x, 1..=63).unwrap();
        assert_eq!(cert.verdict, KummerVerdict::Inconclusive);
    }

    #[test]
    fn kummer_rejects_zero_successor() {
        let x = SeqWindow::from_prefix(vec![1.0, 1.0, 0.0, 1.0]).unwrap();
        let err = kummer_certificate(&CoeffSpec::Harmonic, &HALF, &x, 1..=3).unwrap_err();
        assert!(matches!(err, Error::Numeric(msg) if msg.contains("n = 2")));
    }

    proptest! {
        #[test]
        fn rising_factorial_identity(t in 0.01f64..0.99, m in 1usize..8) {
            let x = eigenvector_cesaro(t, m, m + 30).unwrap();
            let mut rising = 1.0f64;
            let mut fact = 1.0f64;
            for n in 0..=30usize {
                if n > 0 {
                    rising *= (m + n - 1) as f64;
                    fact *= n as f64;
                }
                let lhs = x.values.get(m + n).unwrap() * fact;
                let rhs = rising * t.powi(n as i32);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs(), "n = {}", n);
            }
        }

        #[test]
        fn kummer_statistic_is_homogeneous(c in 0.01f64..100.0) {
            let x = eigenvector_rhaly(&CoeffSpec::Harmonic, 2, 80).unwrap().values;
            let scaled = SeqWindow::from_prefix(x.values.iter().map(|v| v * c).collect()).unwrap();
            let k1 = kummer_certificate(&CoeffSpec::Harmonic, &HALF, &x, 20..=70).unwrap();
            let k2 = kummer_certificate(&CoeffSpec::Harmonic, &HALF, &scaled, 20..=70).unwrap();
            for (u, v) in k1.statistic.values.iter().zip(&k2.statistic.values) {
                prop_assert!((u - v).abs() <= 1e-12 * u.abs());
            }
        }
    }
}
