//! Classical channel estimators: least squares and orthogonal matching pursuit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::ChannelVector;
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};

/// Output of a matching-pursuit run.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseEstimate {
    /// Selected atom indices in selection order.
    pub support: Vec<usize>,
    /// Channel-domain coefficients for `support` (already divided by √p), so
    /// ĥ = Σ coefficients[i]·atom[support[i]].
    pub coefficients: Vec<Complex64>,
    /// ‖residual‖ of the observation, starting with ‖y‖ before any selection.
    pub residual_norms: Vec<f64>,
}

fn check_power(p: f64) -> Result<f64> {
    if p > 0.0 && p.is_finite() {
        Ok(p.sqrt())
    } else {
        Err(Error::invalid(format!("transmit power must be > 0, got {p}")))
    }
}

/// ĥ = y/√p.
pub fn ls_estimate(y: &ChannelVector, p: f64) -> Result<ChannelVector> {
    let amp = check_power(p)?;
    Ok(y.unscale(amp))
}

/// Minimum-norm least-squares solution of `a·x ≈ y`.
fn min_norm_lstsq(a: DMatrix<Complex64>, y: &DVector<Complex64>) -> DVector<Complex64> {
    let dims = a.nrows().max(a.ncols()) as f64;
    let svd = a.svd(true, true);
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = largest * dims * f64::EPSILON;
    svd.solve(y, eps)
        .expect("both singular-vector sets were computed")
}

/// Greedy sparse recovery with `sparsity` iterations over `dict`.
///
/// Each iteration picks the unselected atom with the largest |⟨atom, residual⟩|
/// (lowest index on ties), re-solves least squares over the whole support and
/// updates the residual. Stops early only when the residual is exactly zero.
pub fn omp_estimate<D: Dictionary + ?Sized>(
    y: &ChannelVector,
    dict: &D,
    sparsity: usize,
    p: f64,
) -> Result<(ChannelVector, SparseEstimate)> {
    let amp = check_power(p)?;
    let atoms = dict.matrix();
    if y.len() != atoms.nrows() {
        return Err(Error::DimensionMismatch {
            expected: atoms.nrows(),
            actual: y.len(),
        });
    }
    if sparsity == 0 || sparsity > atoms.ncols() {
        return Err(Error::invalid(format!(
            "sparsity must lie in 1..={}, got {sparsity}",
            atoms.ncols()
        )));
    }

    let mut support: Vec<usize> = Vec::with_capacity(sparsity);
    let mut selected = vec![false; atoms.ncols()];
    let mut coeffs = DVector::<Complex64>::zeros(0);
    let mut residual = y.clone();
    let mut residual_norms = vec![residual.norm()];

    for _ in 0..sparsity {
        if residual.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            break;
        }
        let corr = atoms.ad_mul(&residual);
        let mut best: Option<(usize, f64)> = None;
        for (j, c) in corr.iter().enumerate() {
            if selected[j] {
                continue;
            }
            let mag = c.norm();
            if best.is_none_or(|(_, b)| mag > b) {
                best = Some((j, mag));
            }
        }
        let Some((pick, _)) = best else { break };
        selected[pick] = true;
        support.push(pick);

        let sub = atoms.select_columns(&support);
        coeffs = min_norm_lstsq(sub.clone(), y);
        residual = y - sub * &coeffs;
        residual_norms.push(residual.norm());
    }

    let mut h_hat = ChannelVector::zeros(atoms.nrows());
    for (&j, &c) in support.iter().zip(coeffs.iter()) {
        h_hat.axpy(c / amp, &atoms.column(j), Complex64::new(1.0, 0.0));
    }
    let coefficients = coeffs.iter().map(|c| c / amp).collect();
    Ok((
        h_hat,
        SparseEstimate {
            support,
            coefficients,
            residual_norms,
        },
    ))
}
