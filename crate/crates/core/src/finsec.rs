//! Finite-section evidence: eigen-residuals, smallest singular values,
//! finite-rank approximation errors and Weyl witnesses.

use std::io::Write;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::cesaro_mu_window;
use crate::error::{Error, Result};
use crate::operators::{format_f64, max_order, DenseTruncation, OperatorForm, OperatorSpec};
use crate::seq::{weighted_abs, weighted_norm, SeqWindow, WeightSpec};
use crate::spectra::{
    coefficient_index, eigenvector_cesaro, eigenvector_rhaly, reciprocal_index, Membership, SpectralReport,
};

/// Above this order `Auto` switches from dense SVD to inverse iteration.
pub const DENSE_SVD_MAX_ORDER: usize = 1024;

/// Seed of the random unit vectors in [`random_operator_distance`].
pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

/// `||(A_N - lambda) x||_w / ||x||_w` over indices `1..=order`. Rows
/// `1..=order` of a lower-triangular matrix only see `x_1..x_order`, so the
/// residual is exact for the infinite operator on those rows.
pub fn eigen_residual(op: &OperatorSpec, lambda: f64, x: &SeqWindow, order: usize, w: &WeightSpec) -> Result<f64> {
    let y = op.apply_truncated(x, order)?;
    let head = SeqWindow::from_prefix(x.values[..order].to_vec())?;
    let denom = weighted_norm(&head, w, 0.0)?;
    if denom == 0.0 {
        return Err(Error::domain("eigen residual of the zero vector"));
    }
    let diff: Vec<f64> = y.values.iter().zip(&head.values).map(|(yn, xn)| yn - lambda * xn).collect();
    Ok(weighted_norm(&SeqWindow::from_prefix(diff)?, w, 0.0)? / denom)
}

/// Eigenvalues of a dense section from a general dense eigensolver.
///
/// The index-reversal permutation is applied first: it turns the lower
/// triangle into an upper one, which the Hessenberg/Schur iteration handles
/// without the loss of accuracy it suffers on these highly non-normal
/// matrices. The similarity is exact.
pub fn dense_eigenvalues(t: &DenseTruncation) -> Vec<Complex64> {
    let n = t.order();
    let reversed = DMatrix::from_fn(n, n, |i, j| t.get(n - i, n - j));
    reversed.complex_eigenvalues().iter().copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvdMethod {
    /// Dense SVD up to [`DENSE_SVD_MAX_ORDER`], inverse iteration beyond.
    Auto,
    DenseSvd,
    InverseIteration,
}

impl SvdMethod {
    fn resolve(self, order: usize) -> SvdMethod {
        match self {
            SvdMethod::Auto if order <= DENSE_SVD_MAX_ORDER => SvdMethod::DenseSvd,
            SvdMethod::Auto => SvdMethod::InverseIteration,
            other => other,
        }
    }
}

fn shifted<T: ComplexField<RealField = f64> + Copy>(t: &DenseTruncation, shift: T) -> Result<DMatrix<T>> {
    let n = t.order();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let v = T::from_real(t.get(i + 1, j + 1));
        if i == j {
            v - shift
        } else {
            v
        }
    });
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("truncation has non-finite entries".into()));
    }
    Ok(m)
}

/// Smallest singular value and a matching right singular vector.
fn min_singular<T: ComplexField<RealField = f64> + Copy>(a: DMatrix<T>, method: SvdMethod) -> Result<(f64, DVector<T>)> {
    let n = a.nrows();
    match method.resolve(n) {
        SvdMethod::InverseIteration => inverse_iteration(&a),
        _ => {
            let svd = a.svd(false, true);
            let (imin, smin) = svd
                .singular_values
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::INFINITY), |best, (i, s)| if s < best.1 { (i, s) } else { best });
            let v_t = svd.v_t.ok_or_else(|| Error::Numeric("SVD did not return vectors".into()))?;
            let v = v_t.row(imin).adjoint();
            Ok((smin, v))
        }
    }
}

/// Power iteration on `(A^* A)^{-1}` with two triangular solves per step.
fn inverse_iteration<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> Result<(f64, DVector<T>)> {
    const MAX_ITER: usize = 5000;
    const REL_TOL: f64 = 1e-14;
    let n = a.nrows();
    if (0..n).any(|i| a[(i, i)].modulus() == 0.0) {
        // exactly singular; the solves are undefined, the dense route is not
        return min_singular(a.clone(), SvdMethod::DenseSvd);
    }
    let mut v = DVector::from_element(n, T::from_real(1.0 / (n as f64).sqrt()));
    let mut estimate = 0.0;
    for _ in 0..MAX_ITER {
        // w = A^{-1} A^{-*} v
        let z = a
            .ad_solve_lower_triangular(&v)
            .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
        let w = a
            .solve_lower_triangular(&z)
            .ok_or_else(|| Error::Numeric("triangular solve failed".into()))?;
        let norm = w.norm();
        if !norm.is_finite() {
            return Err(Error::Numeric("inverse iteration overflowed".into()));
        }
        v = w.unscale(norm);
        let next = norm;
        if (next - estimate).abs() <= REL_TOL * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    Ok((1.0 / estimate.sqrt(), v))
}

/// `sigma_min(T - lambda I)`, real arithmetic for real `lambda`.
pub fn smallest_singular_value(t: &DenseTruncation, lambda: Complex64) -> Result<f64> {
    smallest_singular_value_with(t, lambda, SvdMethod::Auto)
}

pub fn smallest_singular_value_with(t: &DenseTruncation, lambda: Complex64, method: SvdMethod) -> Result<f64> {
    if lambda.im == 0.0 {
        Ok(min_singular(shifted(t, lambda.re)?, method)?.0)
    } else {
        Ok(min_singular(shifted(t, lambda)?, method)?.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteRankBound {
    /// `sup_{k < n <= horizon} mu_n`
    pub value: f64,
    pub argmax: usize,
    /// `mu_n` is known to decrease past k, so the sup over all `n > k` is
    /// attained at `k + 1`.
    pub certified_tail: bool,
}

/// Bound on `||T_{r,s} - T^{(k)}||` where `T^{(k)}` keeps the first k rows.
pub fn finite_rank_error(t: f64, r: &WeightSpec, s: &WeightSpec, k: usize, horizon: usize) -> Result<FiniteRankBound> {
    if k == 0 {
        return Err(Error::domain("rank k must be at least 1"));
    }
    if horizon <= k {
        return Err(Error::domain(format!("horizon {horizon} must exceed k = {k}")));
    }
    let mu = cesaro_mu_window(t, r, s, horizon)?;
    let (argmax, value) = mu[k..]
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if *v > best.1 { (i, *v) } else { best });
    // (1 - t^n) / n is decreasing, and so is mu_n when both weights are constant
    let certified_tail = matches!(
        (r, s),
        (WeightSpec::Constant { .. }, WeightSpec::Constant { .. })
    );
    Ok(FiniteRankBound {
        value,
        argmax: k + 1 + argmax,
        certified_tail,
    })
}

/// Largest `||(T - T^{(k)}) x||_inf` over `samples` random sup-norm unit
/// vectors on the order-`order` section of `T_{r,s}`: a lower bound on the
/// operator distance.
pub fn random_operator_distance(
    t: f64,
    r: &WeightSpec,
    s: &WeightSpec,
    k: usize,
    order: usize,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if k >= order {
        return Err(Error::domain(format!("order {order} must exceed k = {k}")));
    }
    let op = OperatorSpec::gen_cesaro(t, r.clone(), s.clone());
    op.validate()?;
    let dense = op.truncate_conjugated(order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let mut x: Vec<f64> = (0..order).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= peak);
        let y = dense.matvec(&x);
        best = y[k..].iter().fold(best, |m, v| m.max(v.abs()));
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaMin {
    pub lambda: Complex64,
    pub sigma_min: f64,
    pub method: SvdMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRecord {
    pub order: usize,
    pub diag_eigs: Vec<f64>,
    pub sigma_min_at: Vec<SigmaMin>,
    /// Largest row l1 norm of the conjugated section `D_s A D_r^{-1}`.
    pub row_norm_sup: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// One record per order: diagonal, `sigma_min(T_N - lambda)` for every
/// lambda, and the largest weighted row norm. Work is spread over
/// (order, lambda) pairs; output order is deterministic.
pub fn truncation_sweep(op: &OperatorSpec, orders: &[usize], lambdas: &[Complex64]) -> Result<Vec<TruncationRecord>> {
    op.validate()?;
    if orders.is_empty() {
        return Err(Error::domain("sweep needs at least one order"));
    }
    if orders.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("sweep orders must be strictly ascending"));
    }
    let cap = max_order();
    if let Some(&too_big) = orders.iter().find(|n| **n > cap) {
        return Err(Error::Resource { order: too_big, max: cap });
    }
    let sections: Vec<DenseTruncation> = orders
        .par_iter()
        .map(|n| op.truncate_conjugated(*n))
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, Complex64)> = (0..orders.len())
        .flat_map(|i| lambdas.iter().map(move |l| (i, *l)))
        .collect();
    let sigmas: Vec<f64> = tasks
        .par_iter()
        .map(|(i, l)| smallest_singular_value(&sections[*i], *l))
        .collect::<Result<_>>()?;
    let mut sigmas = sigmas.into_iter();
    Ok(sections
        .iter()
        .map(|sec| {
            let method = SvdMethod::Auto.resolve(sec.order());
            let sigma_min_at = lambdas
                .iter()
                .map(|l| SigmaMin {
                    lambda: *l,
                    sigma_min: sigmas.next().expect("one sigma per task"),
                    method,
                })
                .collect();
            let notes = if lambdas.is_empty() {
                vec!["no lambdas requested".to_owned()]
            } else {
                Vec::new()
            };
            TruncationRecord {
                order: sec.order(),
                diag_eigs: sec.diagonal(),
                sigma_min_at,
                row_norm_sup: sec.row_l1_norms().into_iter().fold(0.0, f64::max),
                notes,
            }
        })
        .collect())
}

pub const SWEEP_CSV_HEADER: &str = "N,lambda_re,lambda_im,sigma_min,row_norm_sup";

/// One CSV row per (order, lambda).
pub fn write_sweep_csv<W: Write>(records: &[TruncationRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for rec in records {
        for s in &rec.sigma_min_at {
            writeln!(
                out,
                "{},{},{},{},{}",
                rec.order,
                format_f64(s.lambda.re),
                format_f64(s.lambda.im),
                format_f64(s.sigma_min),
                format_f64(rec.row_norm_sup)
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylWitness {
    pub lambda: Complex64,
    pub order: usize,
    /// Normalized so that `||x||_s = 1`.
    pub vector: SeqWindow,
    /// `||(T_N - lambda) x||_s`
    pub image_norm: f64,
    /// l2 value `sigma_min(T_N - lambda)` in conjugated coordinates, for
    /// `lambda = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
}

/// Unit vector with small image under `A - lambda` at order `order`.
///
/// For eigenvalues this is the normalized eigenvector prefix. For
/// `lambda = 0` it is the right singular vector of `sigma_min` of the
/// conjugated section, mapped back by `D_s^{-1}`.
pub fn weyl_witness(op: &OperatorSpec, report: &SpectralReport, lambda: Complex64, order: usize) -> Result<WeylWitness> {
    if report.ap_spectrum.contains(lambda) != Membership::Yes {
        return Err(Error::Refused(format!(
            "lambda = {lambda} is not in the approximate point spectrum of the report"
        )));
    }
    let s = &op.codomain_weight;
    if lambda == Complex64::new(0.0, 0.0) {
        let cap = max_order();
        if order > cap {
            return Err(Error::Resource { order, max: cap });
        }
        let section = op.truncate_conjugated(order)?;
        let (sigma, v) = min_singular(shifted(&section, 0.0)?, SvdMethod::Auto)?;
        let peak = v.amax();
        // x_n = v_n / s_n, so |x_n| s_n = |v_n| / peak
        let image = section.matvec(&v.iter().map(|e| e / peak).collect::<Vec<_>>());
        let image_norm = image.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let mut x = Vec::with_capacity(order);
        for (i, vn) in v.iter().enumerate() {
            let n = i + 1;
            let xn = vn / peak;
            // divide by s_n through logs when s_n is not representable
            x.push(if xn == 0.0 {
                0.0
            } else {
                (xn.abs().ln() - s.log_value(n)?).exp().copysign(xn)
            });
        }
        return Ok(WeylWitness {
            lambda,
            order,
            vector: SeqWindow::from_prefix(x)?,
            image_norm,
            sigma_min: Some(sigma),
        });
    }
    if lambda.im != 0.0 {
        return Err(Error::Refused(format!("no eigenvector construction for non-real lambda = {lambda}")));
    }
    let eig = match &op.form {
        OperatorForm::Rhaly { coeffs } => {
            let m = coefficient_index(coeffs, lambda)
                .ok_or_else(|| Error::Refused(format!("lambda = {lambda} is not a coefficient value")))?;
            eigenvector_rhaly(coeffs, m, order)?
        }
        OperatorForm::GenCesaro { t } => {
            let m = reciprocal_index(lambda).ok_or_else(|| Error::Refused(format!("lambda = {lambda} is not 1/m")))?;
            eigenvector_cesaro(*t, m, order)?
        }
    };
    let norm = weighted_norm(&eig.values, s, 0.0)?;
    let x = SeqWindow::from_prefix(eig.values.values.iter().map(|v| v / norm).collect())?;
    let y = op.apply_truncated(&x, order)?;
    let mut image_norm: f64 = 0.0;
    for (i, (yn, xn)) in y.values.iter().zip(&x.values).enumerate() {
        image_norm = image_norm.max(weighted_abs(yn - eig.lambda * xn, s, i + 1)?);
    }
    Ok(WeylWitness {
        lambda,
        order,
        vector: x,
        image_norm,
        sigma_min: None,
    })
}
