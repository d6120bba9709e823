//! Entrywise and truncated realizations of the Rhaly matrix `R_a`, the
//! generalized Cesàro matrix `C_t`, their adjoints, and the conjugated
//! matrix `T_{r,s} = D_s C D_r^{-1}`.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::{CoeffSpec, CompensatedSum, SeqWindow, WeightSpec};

pub const DEFAULT_MAX_ORDER: usize = 4096;

/// Environment variable that caps truncation orders.
pub const MAX_ORDER_ENV: &str = "SPECBAND_MAX_N";

/// Truncation cap: `SPECBAND_MAX_N` when set to a positive integer, else
/// [`DEFAULT_MAX_ORDER`].
pub fn max_order() -> usize {
    std::env::var(MAX_ORDER_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or(DEFAULT_MAX_ORDER)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorForm {
    Rhaly { coeffs: CoeffSpec },
    GenCesaro { t: f64 },
}

/// An operator `c0(r) -> c0(s)` given by one of the two matrix forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub form: OperatorForm,
    pub domain_weight: WeightSpec,
    pub codomain_weight: WeightSpec,
}

impl OperatorSpec {
    /// `R_a` on `c0(s)`.
    pub fn rhaly(coeffs: CoeffSpec, weight: WeightSpec) -> Self {
        OperatorSpec {
            form: OperatorForm::Rhaly { coeffs },
            domain_weight: weight.clone(),
            codomain_weight: weight,
        }
    }

    /// `C_t : c0(r) -> c0(s)`.
    pub fn gen_cesaro(t: f64, domain: WeightSpec, codomain: WeightSpec) -> Self {
        OperatorSpec {
            form: OperatorForm::GenCesaro { t },
            domain_weight: domain,
            codomain_weight: codomain,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.domain_weight.validate()?;
        self.codomain_weight.validate()?;
        match &self.form {
            OperatorForm::Rhaly { coeffs } => {
                coeffs.validate()?;
                if self.domain_weight != self.codomain_weight {
                    return Err(Error::invalid(
                        "Rhaly operators act on a single space c0(s): domain and codomain weights must agree",
                    ));
                }
            }
            OperatorForm::GenCesaro { t } => {
                if !(t.is_finite() && *t >= 0.0 && *t < 1.0) {
                    return Err(Error::invalid(format!(
                        "generalized Cesàro parameter t must lie in [0, 1), got {t}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn coeffs(&self) -> Option<&CoeffSpec> {
        match &self.form {
            OperatorForm::Rhaly { coeffs } => Some(coeffs),
            OperatorForm::GenCesaro { .. } => None,
        }
    }

    /// Whether domain and codomain coincide.
    pub fn is_endomorphism(&self) -> bool {
        self.domain_weight == self.codomain_weight
    }

    /// Diagonal entry `(n, n)`: `a_n` or `1/n`.
    pub fn diagonal(&self, n: usize) -> Result<f64> {
        self.entry(n, n)
    }

    /// Matrix entry `(n, k)`, 1-based.
    pub fn entry(&self, n: usize, k: usize) -> Result<f64> {
        if n == 0 || k == 0 {
            return Err(Error::domain("matrix indices start at 1"));
        }
        if k > n {
            return Ok(0.0);
        }
        match &self.form {
            OperatorForm::Rhaly { coeffs } => coeffs.value(n),
            OperatorForm::GenCesaro { t } => Ok(cesaro_entry(*t, n, k)),
        }
    }

    /// Entry `(n, k)` of the adjoint, i.e. `entry(k, n)`.
    pub fn adjoint_entry(&self, n: usize, k: usize) -> Result<f64> {
        self.entry(k, n)
    }

    /// Entry of `D_s A D_r^{-1}`: `(s_n / r_k) * entry(n, k)`.
    pub fn conjugated_entry(&self, n: usize, k: usize) -> Result<f64> {
        let e = self.entry(n, k)?;
        if e == 0.0 {
            return Ok(0.0);
        }
        let (s, r) = (&self.codomain_weight, &self.domain_weight);
        if let (Ok(sn), Ok(rk)) = (s.value(n), r.value(k)) {
            let direct = sn / rk * e;
            if direct.is_finite() && direct != 0.0 {
                return Ok(direct);
            }
        }
        let log_mag = match &self.form {
            OperatorForm::Rhaly { .. } => e.abs().ln(),
            OperatorForm::GenCesaro { t } => (n - k) as f64 * t.ln() - (n as f64).ln(),
        };
        let v = (log_mag + s.log_value(n)? - r.log_value(k)?).exp();
        Ok(v.copysign(e))
    }

    /// `y = A_N x` on indices `1..=order` by running recurrences:
    /// a prefix sum for Rhaly and `inner_n = t inner_{n-1} + x_n` for `C_t`.
    pub fn apply_truncated(&self, x: &SeqWindow, order: usize) -> Result<SeqWindow> {
        if order == 0 {
            return Err(Error::domain("truncation order must be at least 1"));
        }
        if x.start != 1 || x.len() < order {
            return Err(Error::domain(format!(
                "input window must cover indices 1..={order}, got {}..={}",
                x.start,
                x.end()
            )));
        }
        let mut y = Vec::with_capacity(order);
        match &self.form {
            OperatorForm::Rhaly { coeffs } => {
                let mut prefix = CompensatedSum::new();
                for n in 1..=order {
                    prefix.add(x.values[n - 1]);
                    y.push(coeffs.value(n)? * prefix.value());
                }
            }
            OperatorForm::GenCesaro { t } => {
                let mut inner = 0.0;
                for n in 1..=order {
                    inner = t * inner + x.values[n - 1];
                    y.push(inner / n as f64);
                }
            }
        }
        SeqWindow::from_prefix(y)
    }

    /// `A^* x` for a finitely supported `x` (support inside the window,
    /// window starting at 1). Exact finite sums, no truncation error.
    pub fn apply_adjoint_finite(&self, x: &SeqWindow) -> Result<SeqWindow> {
        if x.start != 1 {
            return Err(Error::domain("adjoint input window must start at index 1"));
        }
        let len = x.len();
        let mut y = vec![0.0; len];
        match &self.form {
            OperatorForm::Rhaly { coeffs } => {
                // (R_a^* x)_n = sum_{k >= n} a_k x_k
                let mut suffix = CompensatedSum::new();
                for n in (1..=len).rev() {
                    suffix.add(coeffs.value(n)? * x.values[n - 1]);
                    y[n - 1] = suffix.value();
                }
            }
            OperatorForm::GenCesaro { t } => {
                // (C_t^* x)_n = sum_{k >= n} t^{k-n} x_k / k
                let mut acc = 0.0;
                for n in (1..=len).rev() {
                    acc = x.values[n - 1] / n as f64 + t * acc;
                    y[n - 1] = acc;
                }
            }
        }
        SeqWindow::from_prefix(y)
    }

    /// Dense `order x order` leading section of the matrix.
    pub fn truncate(&self, order: usize) -> Result<DenseTruncation> {
        self.truncate_with_limit(order, max_order())
    }

    pub fn truncate_with_limit(&self, order: usize, limit: usize) -> Result<DenseTruncation> {
        self.build(order, limit, |n, k| self.entry(n, k))
    }

    /// Dense section of `D_s A D_r^{-1}`, the operator as seen on plain `c0`.
    pub fn truncate_conjugated(&self, order: usize) -> Result<DenseTruncation> {
        self.build(order, max_order(), |n, k| self.conjugated_entry(n, k))
    }

    fn build(
        &self,
        order: usize,
        limit: usize,
        f: impl Fn(usize, usize) -> Result<f64>,
    ) -> Result<DenseTruncation> {
        if order == 0 {
            return Err(Error::domain("truncation order must be at least 1"));
        }
        if order > limit {
            return Err(Error::Resource { order, max: limit });
        }
        let mut entries = vec![0.0; order * order];
        for n in 1..=order {
            for k in 1..=n {
                entries[(n - 1) * order + (k - 1)] = f(n, k)?;
            }
        }
        Ok(DenseTruncation { order, entries })
    }
}

fn cesaro_entry(t: f64, n: usize, k: usize) -> f64 {
    let gap = n - k;
    let power = match i32::try_from(gap) {
        Ok(g) => t.powi(g),
        Err(_) => 0.0,
    };
    power / n as f64
}

/// Leading `N x N` section of a lower-triangular infinite matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTruncation {
    order: usize,
    entries: Vec<f64>,
}

impl DenseTruncation {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry `(n, k)`, 1-based.
    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.entries[(n - 1) * self.order + (k - 1)]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.entries[(n - 1) * self.order..n * self.order]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (1..=self.order).map(|n| self.get(n, n)).collect()
    }

    /// Plain dense matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.order, "vector length must match the truncation order");
        (1..=self.order)
            .map(|n| self.row(n).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn row_l1_norms(&self) -> Vec<f64> {
        (1..=self.order)
            .map(|n| self.row(n).iter().map(|v| v.abs()).sum())
            .collect()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.order, self.order, &self.entries)
    }

    /// Row-major CSV, all N columns, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for n in 1..=self.order {
            let line: Vec<String> = self.row(n).iter().map(|v| format_f64(*v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.16e}")
    }
}
