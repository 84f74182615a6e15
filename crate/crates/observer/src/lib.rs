//! Event-gated Luenberger observer, dynamic trigger and delayed attack estimator.

use std::collections::VecDeque;

use matcore::{pinv, Mat, MatError, TriggerConstants};
use plant::{StackedModel, Vector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObserverError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("A - HC is not Hurwitz (max Re = {0:.6e}); the observer gain must stabilize the error dynamics")]
    GainNotStabilizing(f64),
    #[error("reaction time t_d = {t_d} is not a positive integer multiple of dt = {dt}")]
    DelayGrid { t_d: f64, dt: f64 },
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Returns A − HC after checking it is Hurwitz.
pub fn validate_gain(model: &StackedModel, h: &Mat) -> Result<Mat, ObserverError> {
    if h.nrows() != model.n_states() || h.ncols() != model.n_outputs() {
        return Err(ObserverError::Dimension(format!(
            "H is {}x{}, need {}x{}",
            h.nrows(),
            h.ncols(),
            model.n_states(),
            model.n_outputs()
        )));
    }
    let acl = &model.a - h * &model.c;
    let re = matcore::max_real_eig(&acl);
    if re >= 0.0 {
        return Err(ObserverError::GainNotStabilizing(re));
    }
    Ok(acl)
}

/// Ax̂ + B(u + û^a) + H(ȳ − Cx̂). Only the authenticated ȳ enters.
pub fn observer_deriv(
    model: &StackedModel,
    h: &Mat,
    x_hat: &Vector,
    y_bar: &Vector,
    u: &Vector,
    u_hat: &Vector,
) -> Vector {
    let innov = y_bar - &model.c * x_hat;
    &model.a * x_hat + &model.b * (u + u_hat) + h * innov
}

pub fn eta_deriv(eta: f64, e_sq: f64, c1: f64, c2: f64) -> f64 {
    -c1 * eta + c2 * e_sq
}

pub fn check_event(e: &Vector, eta: f64, k: &TriggerConstants) -> bool {
    k.fires(e.norm_squared(), eta)
}

pub fn miet_bound(sigma: f64, k: &TriggerConstants) -> Result<f64, ObserverError> {
    Ok(k.miet(sigma)?)
}

/// Number of grid steps in t_d, or an error when t_d is off-grid.
pub fn delay_steps(t_d: f64, dt: f64) -> Result<usize, ObserverError> {
    let r = t_d / dt;
    let n = r.round();
    if n < 1.0 || (r - n).abs() > 1e-9 * n.max(1.0) {
        return Err(ObserverError::DelayGrid { t_d, dt });
    }
    Ok(n as usize)
}

#[derive(Debug, Clone, Default)]
pub struct ObserverState {
    pub x_hat: Vector,
    pub eta: f64,
    pub y_bar: Vector,
    pub last_event_time: f64,
    pub event_times: Vec<f64>,
}

/// How x̂̇ is obtained inside the estimator recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Derivative {
    /// observer right-hand side with the applied estimate, leaving B†H(ȳ − ŷ)
    #[default]
    Rhs,
    /// backward difference of the logged x̂
    FiniteDifference,
}

/// When the estimate is refreshed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Update {
    /// once per t_d, held in between
    #[default]
    Sampled,
    /// every step, against the value one t_d back
    PerStep,
}

pub struct EstimatorInput<'a> {
    pub model: &'a StackedModel,
    pub innovation: &'a Vector,
    pub x_hat: &'a Vector,
    pub x_hat_prev: Option<&'a Vector>,
    pub u_nominal: &'a Vector,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct Estimator {
    pub derivative: Derivative,
    pub update: Update,
    d_steps: usize,
    b_pinv: Mat,
    bph: Mat,
    buf: VecDeque<Vector>,
    since: usize,
    current: Vector,
    pub underflow_steps: usize,
}

impl Estimator {
    pub fn new(
        model: &StackedModel,
        h: &Mat,
        d_steps: usize,
        derivative: Derivative,
        update: Update,
    ) -> Result<Self, ObserverError> {
        let b_pinv = pinv(&model.b)?;
        let bph = &b_pinv * h;
        let zero = Vector::zeros(model.n_inputs());
        let buf = std::iter::repeat_n(zero.clone(), d_steps + 1).collect();
        Ok(Self {
            derivative,
            update,
            d_steps: d_steps.max(1),
            b_pinv,
            bph,
            buf,
            since: 0,
            current: zero,
            underflow_steps: 0,
        })
    }

    pub fn b_pinv(&self) -> &Mat {
        &self.b_pinv
    }

    pub fn current(&self) -> &Vector {
        &self.current
    }

    /// Buffered value from t − t_d (zero before the buffer has filled).
    pub fn delayed(&self) -> &Vector {
        &self.buf[0]
    }

    /// Inactive estimator: û^a = 0 and the history is cleared.
    pub fn reset(&mut self) {
        for v in self.buf.iter_mut() {
            v.fill(0.0);
        }
        self.current.fill(0.0);
        self.since = 0;
    }

    fn correction(&self, inp: &EstimatorInput) -> Vector {
        match (self.derivative, inp.x_hat_prev) {
            (Derivative::FiniteDifference, Some(prev)) => {
                let xd = (inp.x_hat - prev) / inp.dt;
                let r = xd - &inp.model.a * inp.x_hat - &inp.model.b * inp.u_nominal;
                &self.b_pinv * r
            }
            _ => &self.bph * inp.innovation,
        }
    }

    /// One grid step in defence mode; returns û^a(t).
    pub fn step(&mut self, inp: &EstimatorInput) -> &Vector {
        let next = match self.update {
            Update::PerStep => {
                if self.since < self.d_steps {
                    self.underflow_steps += 1;
                }
                self.buf[1].clone() + self.correction(inp)
            }
            Update::Sampled => {
                if self.since.is_multiple_of(self.d_steps) {
                    self.current.clone() + self.correction(inp)
                } else {
                    self.current.clone()
                }
            }
        };
        self.since += 1;
        self.buf.pop_front();
        self.buf.push_back(next.clone());
        self.current = next;
        &self.current
    }
}
