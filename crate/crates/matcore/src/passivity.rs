use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{MatError, Result};
use crate::linalg::{ensure_finite, Mat};
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct PassivityCertificate {
    pub passive: bool,
    pub worst_margin: f64,
    pub worst_omega: f64,
    /// Set when at least one grid point sat on an imaginary-axis pole.
    pub lossless_boundary: bool,
    pub skipped: Vec<f64>,
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
        .collect()
}

pub fn default_grid() -> Vec<f64> {
    log_grid(tol::PR_GRID_LO, tol::PR_GRID_HI, tol::PR_GRID_POINTS)
}

/// G(jω) = C(jωI − A)⁻¹B, or None when jωI − A is singular.
pub fn freq_response(a: &Mat, b: &Mat, c: &Mat, omega: f64) -> Option<DMatrix<Complex64>> {
    let n = a.nrows();
    let ac = a.map(|v| Complex64::new(v, 0.0));
    let bc = b.map(|v| Complex64::new(v, 0.0));
    let cc = c.map(|v| Complex64::new(v, 0.0));
    let m = DMatrix::<Complex64>::identity(n, n) * Complex64::new(0.0, omega) - ac;
    let x = m.lu().solve(&bc)?;
    let g = cc * x;
    g.iter()
        .all(|z| z.re.is_finite() && z.im.is_finite())
        .then_some(g)
}

fn hermitian_min_eig(g: &DMatrix<Complex64>) -> f64 {
    let h = (g + g.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

enum Point {
    Skip(f64),
    Value(f64, f64),
}

fn eval_point(a: &Mat, b: &Mat, c: &Mat, axis: &[f64], w: f64) -> Point {
    if axis.iter().any(|p| (w - p).abs() <= tol::POLE_PROXIMITY) {
        return Point::Skip(w);
    }
    match freq_response(a, b, c, w) {
        Some(g) => Point::Value(w, hermitian_min_eig(&g)),
        None => Point::Skip(w),
    }
}

/// Frequency-grid positive-real test of C(sI − A)⁻¹B.
pub fn check_positive_real(
    a: &Mat,
    b: &Mat,
    c: &Mat,
    grid: &[f64],
) -> Result<PassivityCertificate> {
    ensure_finite(a, "A")?;
    ensure_finite(b, "B")?;
    ensure_finite(c, "C")?;
    let n = a.nrows();
    if !a.is_square() || b.nrows() != n || c.ncols() != n || c.nrows() != b.ncols() {
        return Err(MatError::Dimension(format!(
            "A {}x{}, B {}x{}, C {}x{} (need square G)",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            c.nrows(),
            c.ncols()
        )));
    }
    if grid.is_empty() || grid.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(MatError::Param(
            "frequency grid must be non-empty and nonnegative".into(),
        ));
    }
    let axis: Vec<f64> = a
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.re.abs() <= tol::AXIS_POLE_RE)
        .map(|z| z.im.abs())
        .collect();

    #[cfg(feature = "parallel")]
    let points: Vec<Point> = {
        use rayon::prelude::*;
        grid.par_iter()
            .map(|&w| eval_point(a, b, c, &axis, w))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let points: Vec<Point> = grid
        .iter()
        .map(|&w| eval_point(a, b, c, &axis, w))
        .collect();

    let mut worst = (f64::INFINITY, f64::NAN);
    let mut skipped = Vec::new();
    for p in points {
        match p {
            Point::Skip(w) => skipped.push(w),
            // ties go to the lower frequency so grid order never matters
            Point::Value(w, m) => {
                if m < worst.0 || (m == worst.0 && w < worst.1) {
                    worst = (m, w);
                }
            }
        }
    }
    skipped.sort_by(f64::total_cmp);
    if !worst.0.is_finite() {
        return Err(MatError::Numerical("every grid point was singular".into()));
    }
    Ok(PassivityCertificate {
        passive: worst.0 >= tol::PR_MARGIN,
        worst_margin: worst.0,
        worst_omega: worst.1,
        lossless_boundary: !skipped.is_empty(),
        skipped,
    })
}
