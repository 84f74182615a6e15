use crate::error::{MatError, Result};
use crate::linalg::{eig_extrema, spectral_norm, Mat};
use crate::lyap::LyapunovPair;

/// User-facing part of the event-trigger configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerParams {
    pub c: f64,
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub eps: f64,
    pub t_d: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerConstants {
    pub params: TriggerParams,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
    pub omega: f64,
}

impl TriggerConstants {
    /// (γ + d·c2), the weight on ‖e‖² in the event test.
    pub fn e_weight(&self) -> f64 {
        self.gamma + self.params.d * self.params.c2
    }

    /// Right side of the event test for a given η.
    pub fn threshold(&self, eta: f64) -> f64 {
        self.params.d * self.params.c1 * eta + self.omega
    }

    pub fn fires(&self, e_sq: f64, eta: f64) -> bool {
        self.e_weight() * e_sq >= self.threshold(eta)
    }

    /// Minimum inter-event time for a bound σ on ‖ẏ‖.
    pub fn miet(&self, sigma: f64) -> Result<f64> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(MatError::Param(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok((self.omega / self.e_weight()).sqrt() / (2.0 * sigma))
    }
}

pub fn trigger_constants(
    pair: &LyapunovPair,
    h: &Mat,
    b: &Mat,
    prm: TriggerParams,
) -> Result<TriggerConstants> {
    let bad = |name: &str, v: f64| MatError::Param(format!("{name} = {v} out of range"));
    if !(prm.d > 0.0) {
        return Err(bad("d", prm.d));
    }
    if !(prm.c1 > 0.0) {
        return Err(bad("c1", prm.c1));
    }
    if !(prm.c2 >= 0.0) {
        return Err(bad("c2", prm.c2));
    }
    if !(prm.eps > 0.0) {
        return Err(bad("eps", prm.eps));
    }
    if !(prm.psi >= 0.0) {
        return Err(bad("psi", prm.psi));
    }
    if !(prm.t_d >= 0.0) {
        return Err(bad("t_d", prm.t_d));
    }
    if h.nrows() != pair.p.nrows() {
        return Err(MatError::Dimension(format!(
            "H has {} rows, P is {}",
            h.nrows(),
            pair.p.nrows()
        )));
    }
    let (qmin, _) = eig_extrema(&pair.q)?;
    let (_, pmax) = eig_extrema(&pair.p)?;
    let half = qmin / 2.0;
    if !(prm.c > 0.0) || prm.c >= half {
        return Err(MatError::AlphaNonpositive { c: prm.c, half });
    }
    let alpha = (qmin / pmax) * (1.0 - 2.0 * prm.c / qmin);
    let beta = spectral_norm(&pair.p).powi(2) / prm.c;
    let gamma = spectral_norm(&(&pair.p * h)).powi(2) / prm.c;
    let phi = prm.psi * prm.t_d * spectral_norm(b);
    let omega = prm.eps - beta * phi * phi;
    if !(omega > 0.0) {
        return Err(MatError::OmegaNonpositive(omega));
    }
    Ok(TriggerConstants {
        params: prm,
        alpha,
        beta,
        gamma,
        phi,
        omega,
    })
}
