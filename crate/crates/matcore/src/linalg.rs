use nalgebra::DMatrix;

use crate::error::{MatError, Result};
use crate::tol;

pub type Mat = DMatrix<f64>;

pub fn ensure_finite(m: &Mat, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(MatError::NonFinite(what))
    }
}

pub fn asymmetry(m: &Mat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn ensure_symmetric(m: &Mat) -> Result<()> {
    if !m.is_square() {
        return Err(MatError::Dimension(format!(
            "{}x{} is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let a = asymmetry(m);
    if a > tol::SYMMETRY {
        return Err(MatError::Symmetry(a));
    }
    Ok(())
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// (lambda_min, lambda_max) of a symmetric matrix.
pub fn eig_extrema(m: &Mat) -> Result<(f64, f64)> {
    ensure_finite(m, "eig_extrema input")?;
    ensure_symmetric(m)?;
    if m.nrows() == 0 {
        return Err(MatError::Dimension("empty matrix".into()));
    }
    let ev = symmetrize(m).symmetric_eigenvalues();
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

pub fn spectral_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

pub fn rank(m: &Mat) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol::RANK_REL * top).count()
}

/// Moore-Penrose inverse for full column rank, (MᵀM)⁻¹Mᵀ.
pub fn pinv(m: &Mat) -> Result<Mat> {
    ensure_finite(m, "pinv input")?;
    let r = rank(m);
    if r < m.ncols() || m.ncols() == 0 {
        return Err(MatError::Rank {
            rank: r,
            needed: m.ncols(),
        });
    }
    let mtm = m.transpose() * m;
    let lu = mtm.lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| MatError::Numerical("MᵀM singular".into()))?;
    Ok(inv * m.transpose())
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn block_diag(blocks: &[Mat]) -> Mat {
    let r: usize = blocks.iter().map(|b| b.nrows()).sum();
    let c: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(r, c);
    let (mut i, mut j) = (0, 0);
    for b in blocks {
        out.view_mut((i, j), (b.nrows(), b.ncols())).copy_from(b);
        i += b.nrows();
        j += b.ncols();
    }
    out
}

pub fn max_real_eig(m: &Mat) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn is_hurwitz(m: &Mat) -> bool {
    m.is_square() && m.nrows() > 0 && max_real_eig(m) < 0.0
}

/// Kalman controllability matrix [B, AB, ..., A^{n-1}B].
pub fn ctrb(a: &Mat, b: &Mat) -> Mat {
    let n = a.nrows();
    let mut out = Mat::zeros(n, n * b.ncols());
    let mut blk = b.clone();
    for k in 0..n {
        out.view_mut((0, k * b.ncols()), (n, b.ncols()))
            .copy_from(&blk);
        blk = a * blk;
    }
    out
}

pub fn obsv(a: &Mat, c: &Mat) -> Mat {
    ctrb(&a.transpose(), &c.transpose()).transpose()
}

pub fn controllable(a: &Mat, b: &Mat) -> bool {
    rank(&ctrb(a, b)) == a.nrows()
}

pub fn observable(a: &Mat, c: &Mat) -> bool {
    rank(&obsv(a, c)) == a.nrows()
}
