use nalgebra::DVector;

use crate::error::{MatError, Result};
use crate::linalg::{eig_extrema, ensure_finite, ensure_symmetric, max_real_eig, symmetrize, Mat};
use crate::tol;

/// Residual AclᵀP + P·Acl + Q in spectral norm.
pub fn lyap_residual(acl: &Mat, p: &Mat, q: &Mat) -> f64 {
    crate::linalg::spectral_norm(&(acl.transpose() * p + p * acl + q))
}

/// Solves AclᵀP + P·Acl = −Q by vectorization.
///
/// Column-major vec: vec(AᵀP) = (I⊗Aᵀ)vec P and vec(PA) = (Aᵀ⊗I)vec P.
/// One refinement pass is applied when the first residual is above tolerance.
pub fn solve_lyapunov(acl: &Mat, q: &Mat) -> Result<Mat> {
    ensure_finite(acl, "Acl")?;
    ensure_finite(q, "Q")?;
    if !acl.is_square() || !q.is_square() || acl.nrows() != q.nrows() || acl.nrows() == 0 {
        return Err(MatError::Dimension(format!(
            "Acl {}x{}, Q {}x{}",
            acl.nrows(),
            acl.ncols(),
            q.nrows(),
            q.ncols()
        )));
    }
    ensure_symmetric(q)?;
    let (qmin, _) = eig_extrema(q)?;
    if qmin <= 0.0 {
        return Err(MatError::NotPositiveDefinite(qmin));
    }
    let re = max_real_eig(acl);
    if re >= 0.0 {
        return Err(MatError::Unstable(re));
    }

    let n = acl.nrows();
    let eye = Mat::identity(n, n);
    let at = acl.transpose();
    let big = eye.kronecker(&at) + at.kronecker(&eye);
    let lu = big.lu();

    let solve = |rhs: &Mat| -> Result<Mat> {
        let v = DVector::from_column_slice(rhs.as_slice());
        let s = lu
            .solve(&(-v))
            .ok_or_else(|| MatError::Numerical("vectorized Lyapunov system is singular".into()))?;
        Ok(Mat::from_column_slice(n, n, s.as_slice()))
    };

    let mut p = symmetrize(&solve(q)?);
    for _ in 0..2 {
        let r = at.clone() * &p + &p * acl + q;
        if crate::linalg::spectral_norm(&r) <= tol::LYAP_RESIDUAL * 0.1 {
            break;
        }
        let dp = solve(&r)?;
        p = symmetrize(&(p + dp));
    }
    ensure_finite(&p, "P")?;
    let res = lyap_residual(acl, &p, q);
    if res > tol::LYAP_RESIDUAL {
        return Err(MatError::Numerical(format!(
            "Lyapunov residual {res:.3e} above tolerance"
        )));
    }
    let (pmin, _) = eig_extrema(&p)?;
    if pmin <= 0.0 {
        return Err(MatError::NotPositiveDefinite(pmin));
    }
    Ok(p)
}

/// Validated (P, Q) with the closed loop it certifies.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovPair {
    pub p: Mat,
    pub q: Mat,
}

impl LyapunovPair {
    pub fn from_q(acl: &Mat, q: Mat) -> Result<Self> {
        let p = solve_lyapunov(acl, &q)?;
        Ok(Self { p, q })
    }

    /// Takes a user-supplied P and recovers Q = −(AclᵀP + P·Acl).
    pub fn from_p(acl: &Mat, p: Mat) -> Result<Self> {
        ensure_finite(&p, "P")?;
        if p.nrows() != acl.nrows() || !p.is_square() {
            return Err(MatError::Dimension("P must match Acl".into()));
        }
        ensure_symmetric(&p)?;
        let (pmin, _) = eig_extrema(&p)?;
        if pmin <= 0.0 {
            return Err(MatError::NotPositiveDefinite(pmin));
        }
        let q = symmetrize(&(-(acl.transpose() * &p + &p * acl)));
        let (qmin, _) = eig_extrema(&q)?;
        if qmin <= 0.0 {
            return Err(MatError::NotPositiveDefinite(qmin));
        }
        Ok(Self { p, q })
    }

    pub fn residual(&self, acl: &Mat) -> f64 {
        lyap_residual(acl, &self.p, &self.q)
    }
}
