//! Orthonormal spans and unitary completion of partial isometries.

use super::eig::herm_eig;
use super::matrix::{inner, vec_norm, CMatrix, C64, ONE, ZERO};
use super::MatError;

/// Orthonormal basis of the span of the columns of `vectors`, by modified
/// Gram–Schmidt with column pivoting. A column is accepted while its residual
/// norm exceeds `tol·max(1, largest column norm)`.
pub fn range_onb(vectors: &CMatrix, tol: f64) -> CMatrix {
    let rows = vectors.rows();
    let mut residuals: Vec<Vec<C64>> = (0..vectors.cols()).map(|j| vectors.col(j)).collect();
    let scale = residuals.iter().map(|v| vec_norm(v)).fold(0.0, f64::max).max(1.0);
    let threshold = tol * scale;
    let mut basis: Vec<Vec<C64>> = Vec::new();
    while basis.len() < rows {
        let Some((pivot, norm)) = residuals
            .iter()
            .enumerate()
            .map(|(j, v)| (j, vec_norm(v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if norm <= threshold {
            break;
        }
        let mut q = residuals.swap_remove(pivot);
        // Second pass against the accepted basis keeps q orthogonal to
        // working precision.
        orthogonalize(&mut q, &basis);
        let qn = vec_norm(&q);
        if qn <= threshold {
            continue;
        }
        q.iter_mut().for_each(|z| *z /= qn);
        for r in residuals.iter_mut() {
            let c = inner(&q, r);
            r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= c * qi);
        }
        basis.push(q);
    }
    CMatrix::from_columns(rows, &basis)
}

fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, v);
            v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
        }
    }
}

/// Orthonormal complement of the orthonormal columns `q` in `C^dim`, built by
/// Gram–Schmidt over the standard basis taken in `order`.
fn complement(q: &CMatrix, dim: usize, order: &[usize]) -> CMatrix {
    let mut basis: Vec<Vec<C64>> = (0..q.cols()).map(|j| q.col(j)).collect();
    let needed = dim - q.cols();
    // Some standard vector always keeps residual norm ≥ 1/sqrt(dim) while the
    // complement is incomplete, so this threshold never starves the loop.
    let threshold = 0.5 / (dim as f64).sqrt();
    let mut added: Vec<Vec<C64>> = Vec::with_capacity(needed);
    for &idx in order {
        if added.len() == needed {
            break;
        }
        let mut e = vec![ZERO; dim];
        e[idx] = ONE;
        orthogonalize(&mut e, &basis);
        let n = vec_norm(&e);
        if n > threshold {
            e.iter_mut().for_each(|z| *z /= n);
            basis.push(e.clone());
            added.push(e);
        }
    }
    CMatrix::from_columns(dim, &added)
}

/// Symmetric (Löwdin) re-orthonormalisation `Q (Q*Q)^{-1/2}`.
fn lowdin(q: &CMatrix) -> Result<CMatrix, MatError> {
    if q.cols() == 0 {
        return Ok(q.clone());
    }
    let g = q.adjoint().matmul(q);
    let eig = herm_eig(&g, 1e-6)?;
    if eig.min() <= 0.0 {
        return Err(MatError::NotIsometric { gram_residual: 1.0 });
    }
    Ok(q.matmul(&eig.recompose(|l| 1.0 / l.sqrt())))
}

/// Unitary `U` on `C^ambient_dim` with `U·domain_frame = image_frame`.
///
/// The frames may be arbitrary (non-orthonormal, rank deficient) column
/// families as long as their Gram matrices agree. `U` is fixed on the span by
/// that correspondence; the complements are completed by Gram–Schmidt over
/// the standard basis in index order and matched i-th to i-th.
pub fn unitary_completion(
    domain_frame: &CMatrix,
    image_frame: &CMatrix,
    ambient_dim: usize,
    tol: f64,
) -> Result<CMatrix, MatError> {
    let order: Vec<usize> = (0..ambient_dim).collect();
    unitary_completion_ordered(domain_frame, image_frame, ambient_dim, tol, &order)
}

/// [`unitary_completion`] with the standard basis visited in `order` when
/// completing the complements. Different orders give different, equally
/// valid, completions.
pub fn unitary_completion_ordered(
    domain_frame: &CMatrix,
    image_frame: &CMatrix,
    ambient_dim: usize,
    tol: f64,
    order: &[usize],
) -> Result<CMatrix, MatError> {
    if domain_frame.shape() != image_frame.shape() {
        return Err(MatError::DimensionMismatch {
            expected: domain_frame.shape(),
            got: image_frame.shape(),
        });
    }
    if domain_frame.rows() != ambient_dim {
        return Err(MatError::DimensionMismatch {
            expected: (ambient_dim, domain_frame.cols()),
            got: domain_frame.shape(),
        });
    }
    let mut seen = vec![false; ambient_dim];
    if order.len() != ambient_dim
        || order
            .iter()
            .any(|&i| i >= ambient_dim || std::mem::replace(&mut seen[i], true))
    {
        return Err(MatError::InvalidOrder);
    }

    let gx = domain_frame.adjoint().matmul(domain_frame);
    let gy = image_frame.adjoint().matmul(image_frame);
    let gram_residual = (&gx - &gy).frobenius_norm();
    if gram_residual > tol * gx.frobenius_norm().max(1.0) {
        return Err(MatError::NotIsometric { gram_residual });
    }

    // Directions of the frames whose singular value is below the rank cut
    // are dropped; they move U·frame by at most that singular value.
    let eig = herm_eig(&(&gx + &gy).scale_real(0.5), 1e-6)?;
    let top = eig.max().max(0.0).sqrt();
    let cut = RANK_CUT * top.max(1.0);
    let kept: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&j| eig.eigenvalues[j] > cut * cut)
        .collect();
    let coeff = CMatrix::from_fn(gx.rows(), kept.len(), |i, j| {
        let k = kept[j];
        eig.eigenvectors[(i, k)] / eig.eigenvalues[k].sqrt()
    });
    let qx = lowdin(&domain_frame.matmul(&coeff))?;
    let qy = lowdin(&image_frame.matmul(&coeff))?;

    let px = complement(&qx, ambient_dim, order);
    let py = complement(&qy, ambient_dim, order);
    if px.cols() + qx.cols() != ambient_dim || py.cols() + qy.cols() != ambient_dim {
        return Err(MatError::NotIsometric { gram_residual });
    }
    let left = CMatrix::hstack(&[&qy, &py]);
    let right = CMatrix::hstack(&[&qx, &px]);
    Ok(left.matmul(&right.adjoint()))
}

const RANK_CUT: f64 = 1e-9;
