//! Passivity-margin attack detector and the normal/defence switching law.

// `!(x > 0.0)` is how NaN gets rejected here
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use matcore::Mat;
use nalgebra::DVector;
use thiserror::Error;

pub type Vector = DVector<f64>;

pub const DEFAULT_TOL0: f64 = 1e-6;
pub const DEFAULT_DWELL: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuardError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parameter out of range: {0}")]
    Param(String),
}

/// uᵀŷ − x̂ᵀx̂̇ for the storage ½x̂ᵀx̂. Negative means energy appeared from nowhere.
pub fn passivity_margin(u: &Vector, y_hat: &Vector, x_hat: &Vector, x_hat_dot: &Vector) -> f64 {
    u.dot(y_hat) - x_hat.dot(x_hat_dot)
}

/// tol0·(1 + ‖u‖‖ŷ‖)
pub fn tolerance(tol0: f64, u: &Vector, y_hat: &Vector) -> f64 {
    tol0 * (1.0 + u.norm() * y_hat.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Stay,
    Detected,
    Released,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorState {
    pub delta: u8,
    pub margin: f64,
    pub detect_time: Option<f64>,
    pub dwell_clock: f64,
    pub tol0: f64,
    pub dwell: f64,
    /// (time, new δ) for every mode change
    pub switches: Vec<(f64, u8)>,
}

impl DetectorState {
    pub fn new(tol0: f64, dwell: f64) -> Result<Self, GuardError> {
        if !(tol0 > 0.0) || !(dwell > 0.0) {
            return Err(GuardError::Param(format!(
                "tol = {tol0} and dwell = {dwell} must be positive"
            )));
        }
        Ok(Self {
            delta: 0,
            margin: 0.0,
            detect_time: None,
            dwell_clock: 0.0,
            tol0,
            dwell,
            switches: Vec::new(),
        })
    }

    /// Latch on margin < −tol; release after `dwell` seconds of margin ≥ −tol.
    pub fn step(&mut self, margin: f64, tol: f64, t: f64, dt: f64) -> Transition {
        self.margin = margin;
        let clear = margin >= -tol;
        if self.delta == 0 {
            if !clear {
                self.delta = 1;
                self.dwell_clock = 0.0;
                self.detect_time.get_or_insert(t);
                self.switches.push((t, 1));
                return Transition::Detected;
            }
            return Transition::Stay;
        }
        if !clear {
            self.dwell_clock = 0.0;
            return Transition::Stay;
        }
        self.dwell_clock += dt;
        // half-step slack so accumulated dt round-off cannot add a step
        if self.dwell_clock >= self.dwell - 0.5 * dt {
            self.delta = 0;
            self.dwell_clock = 0.0;
            self.switches.push((t, 0));
            return Transition::Released;
        }
        Transition::Stay
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainConfig {
    pub k: f64,
    pub l: Mat,
}

impl GainConfig {
    pub fn new(k: f64, l: Mat) -> Result<Self, GuardError> {
        // K = 0 decouples the agents; allowed for equilibrium and decoupling checks
        if !(k >= 0.0) || !k.is_finite() {
            return Err(GuardError::Param(format!(
                "consensus gain K = {k} must be nonnegative"
            )));
        }
        Ok(Self { k, l })
    }

    /// û^n = −KLŷ
    pub fn nominal(&self, y_hat: &Vector) -> Vector {
        -(&self.l * y_hat) * self.k
    }
}

/// u = û^n in normal mode, û^n − û^a in defence mode.
pub fn control(
    delta: u8,
    y_hat: &Vector,
    u_a_hat: &Vector,
    gains: &GainConfig,
) -> Result<Vector, GuardError> {
    if y_hat.len() != gains.l.nrows() {
        return Err(GuardError::Dimension(format!(
            "ŷ has {} entries, L is {}",
            y_hat.len(),
            gains.l.nrows()
        )));
    }
    let un = gains.nominal(y_hat);
    if delta == 0 {
        return Ok(un);
    }
    if u_a_hat.len() != un.len() {
        return Err(GuardError::Dimension(format!(
            "û^a has {} entries, need {}",
            u_a_hat.len(),
            un.len()
        )));
    }
    Ok(un - u_a_hat)
}

/// (K(BL − CᵀLᵀ) + H)C − A
pub fn detection_matrix(
    k: f64,
    b: &Mat,
    c: &Mat,
    l: &Mat,
    h: &Mat,
    a: &Mat,
) -> Result<Mat, GuardError> {
    let n = a.nrows();
    let p = l.nrows();
    let ok = a.is_square()
        && b.shape() == (n, p)
        && c.shape() == (p, n)
        && l.shape() == (p, p)
        && h.shape() == (n, p);
    if !ok {
        return Err(GuardError::Dimension(format!(
            "A {:?}, B {:?}, C {:?}, L {:?}, H {:?}",
            a.shape(),
            b.shape(),
            c.shape(),
            l.shape(),
            h.shape()
        )));
    }
    Ok(((b * l - c.transpose() * l.transpose()) * k + h) * c - a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionBound {
    pub lhs: f64,
    /// x̂ᵀHC(x(t_k) − x(0))
    pub rhs: f64,
    /// x̂ᵀHC·x(t_k)
    pub rhs_abs: f64,
    pub violated: bool,
    pub violated_abs: bool,
}

pub fn detection_bound(
    x_hat: &Vector,
    m: &Mat,
    h: &Mat,
    c: &Mat,
    x_tk: &Vector,
    x0: &Vector,
) -> DetectionBound {
    let lhs = x_hat.dot(&(m * x_hat));
    let hc = h * c;
    let w = x_hat.transpose() * &hc;
    let rhs = (&w * (x_tk - x0))[0];
    let rhs_abs = (&w * x_tk)[0];
    DetectionBound {
        lhs,
        rhs,
        rhs_abs,
        violated: lhs < rhs,
        violated_abs: lhs < rhs_abs,
    }
}
