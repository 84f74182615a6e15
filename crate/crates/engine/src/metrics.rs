use std::collections::VecDeque;

use matcore::{Mat, TriggerConstants};
use nalgebra::DVector;

use crate::log::{EventRecord, TrajectoryLog};
use crate::scenario::Scenario;

/// Settling allowance after the attack starts before estimation bounds apply.
pub const TRANSIENT: f64 = 0.2;
/// Width of the "steady" windows just before the attack and at the end of the run.
pub const STEADY_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct Metrics {
    pub rows: usize,
    pub steps: usize,
    pub attack_active: bool,
    pub attack_window: (f64, f64),
    pub detect_time: Option<f64>,
    pub detection_latency: Option<f64>,
    /// first latch that happened with no attack present
    pub false_alarm_time: Option<f64>,
    pub release_time: Option<f64>,
    pub switches: Vec<(f64, u8)>,
    pub event_count: usize,
    pub observed_miet: Option<f64>,
    pub sigma_obs: f64,
    pub miet_bound_obs: Option<f64>,
    pub sigma_apriori: Option<f64>,
    pub tau_apriori: Option<f64>,
    pub disagreement_pre: f64,
    pub disagreement_during: f64,
    pub disagreement_post: f64,
    pub disagreement_pre_steady: f64,
    pub disagreement_final: f64,
    pub epsilon_o_observed: f64,
    pub estimation_sup_error: Option<f64>,
    pub b_estimation_sup_error: Option<f64>,
    pub psi_obs: Option<f64>,
    pub phi_obs: Option<f64>,
    pub xi_final: f64,
    pub xi_sup_window: Option<f64>,
    pub xi_sup_after: Option<f64>,
    pub y_peak_pre: Vec<f64>,
    pub y_peak_during: Vec<f64>,
    pub margin_min_pre: f64,
    /// min of margin/tol before the attack window; ≥ −0.1 means clear by 10×
    pub margin_ratio_min_pre: f64,
    pub soundness_violations: usize,
    pub eta_negative: usize,
    pub bound_checked: usize,
    pub bound_violations: usize,
    pub bound_violations_abs: usize,
    pub bound_first_violation: Option<f64>,
    pub bound_first_violation_abs: Option<f64>,
    pub estimator_underflow_steps: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
    pub omega: f64,
    pub warnings: Vec<String>,
}

pub struct RowObs<'a> {
    pub t: f64,
    pub y: &'a [f64],
    pub xi: f64,
    pub uah: &'a [f64],
    pub ua: &'a [f64],
    pub margin: f64,
    pub tol: Option<f64>,
    pub delta: u8,
    pub ydot_norm: Option<f64>,
    pub e_sq: f64,
    pub eta: f64,
    pub event_row: bool,
}

/// Streaming reduction over rows. Fed every step during a run, or the logged rows afterwards.
pub struct MetricsAcc {
    m: Metrics,
    edges: Vec<(usize, usize)>,
    p: usize,
    trig: TriggerConstants,
    b: Mat,
    b_norm: f64,
    t_d: f64,
    lag_rows: Option<usize>,
    uah_hist: VecDeque<Vec<f64>>,
    prev_y: Option<(f64, Vec<f64>)>,
    last_t: f64,
    final_from: f64,
}

fn max_into(slot: &mut f64, v: f64) {
    if v > *slot {
        *slot = v;
    }
}

fn opt_max(slot: &mut Option<f64>, v: f64) {
    *slot = Some(slot.map_or(v, |s| s.max(v)));
}

impl MetricsAcc {
    /// `lag_rows`: rows per t_d in the stream being fed, if integral.
    pub fn new(sc: &Scenario, lag_rows: Option<usize>) -> Self {
        let m = Metrics {
            steps: sc.steps,
            attack_active: sc.attack_active(),
            attack_window: sc.window,
            sigma_apriori: sc.sigma_apriori,
            tau_apriori: sc.tau_apriori,
            y_peak_pre: vec![0.0; sc.model.n_outputs()],
            y_peak_during: vec![0.0; sc.model.n_outputs()],
            margin_min_pre: f64::INFINITY,
            margin_ratio_min_pre: f64::INFINITY,
            alpha: sc.trig.alpha,
            beta: sc.trig.beta,
            gamma: sc.trig.gamma,
            phi: sc.trig.phi,
            omega: sc.trig.omega,
            ..Default::default()
        };
        Self {
            m,
            edges: sc.graph.edges().to_vec(),
            p: sc.model.p,
            trig: sc.trig,
            b: sc.model.b.clone(),
            b_norm: matcore::spectral_norm(&sc.model.b),
            t_d: sc.spec.observer.t_d,
            lag_rows,
            uah_hist: VecDeque::new(),
            prev_y: None,
            last_t: 0.0,
            final_from: sc.duration - STEADY_WINDOW,
        }
    }

    pub fn disagreement(&self, y: &[f64]) -> f64 {
        let p = self.p;
        self.edges
            .iter()
            .map(|&(i, j)| {
                (0..p)
                    .map(|k| (y[i * p + k] - y[j * p + k]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn observe(&mut self, r: &RowObs) {
        let dis = self.disagreement(r.y);
        let m = &mut self.m;
        let (ta, te) = m.attack_window;
        let t = r.t;
        m.rows += 1;
        self.last_t = t;
        let pre = !m.attack_active || t < ta;
        let during = m.attack_active && t >= ta && t <= te;
        let post = m.attack_active && t > te;

        if pre {
            max_into(&mut m.disagreement_pre, dis);
            for (pk, v) in m.y_peak_pre.iter_mut().zip(r.y) {
                max_into(pk, v.abs());
            }
            if t >= ta - STEADY_WINDOW {
                max_into(&mut m.disagreement_pre_steady, dis);
            }
            if m.margin_min_pre > r.margin {
                m.margin_min_pre = r.margin;
            }
            if let Some(tol) = r.tol {
                let ratio = r.margin / tol;
                if ratio < m.margin_ratio_min_pre {
                    m.margin_ratio_min_pre = ratio;
                }
            }
        }
        if during {
            max_into(&mut m.disagreement_during, dis);
            for (pk, v) in m.y_peak_during.iter_mut().zip(r.y) {
                max_into(pk, v.abs());
            }
        }
        if post {
            max_into(&mut m.disagreement_post, dis);
        }
        if t >= self.final_from - 1e-12 {
            max_into(&mut m.disagreement_final, dis);
        }
        let steady_from = if m.attack_active {
            0.5 * (ta + te)
        } else {
            0.9 * self.final_from
        };
        let steady_to = if m.attack_active { te } else { f64::INFINITY };
        if t >= steady_from && t <= steady_to {
            max_into(&mut m.epsilon_o_observed, dis);
        }

        m.xi_final = r.xi;
        let est_window = m.attack_active && t >= ta + TRANSIENT && t <= te;
        if m.attack_active && t >= ta + TRANSIENT {
            opt_max(&mut m.xi_sup_after, r.xi);
        }
        if est_window {
            opt_max(&mut m.xi_sup_window, r.xi);
            let diff: Vec<f64> = r.uah.iter().zip(r.ua).map(|(a, b)| a - b).collect();
            let err = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            opt_max(&mut m.estimation_sup_error, err);
            let bd = &self.b * DVector::from_vec(diff);
            opt_max(&mut m.b_estimation_sup_error, bd.norm());
        }
        if let Some(lag) = self.lag_rows {
            self.uah_hist.push_back(r.uah.to_vec());
            if self.uah_hist.len() > lag + 1 {
                self.uah_hist.pop_front();
            }
            if est_window && self.uah_hist.len() == lag + 1 {
                let old = &self.uah_hist[0];
                let inc = r
                    .uah
                    .iter()
                    .zip(old)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                opt_max(&mut m.psi_obs, inc / self.t_d);
            }
        }

        let sig = match (r.ydot_norm, &self.prev_y) {
            (Some(s), _) => s,
            (None, Some((tp, yp))) => {
                r.y.iter()
                    .zip(yp)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    / (t - tp)
            }
            (None, None) => 0.0,
        };
        max_into(&mut m.sigma_obs, sig);
        self.prev_y = Some((t, r.y.to_vec()));

        if r.eta < 0.0 {
            m.eta_negative += 1;
        }
        if !r.event_row && self.trig.fires(r.e_sq, r.eta) {
            m.soundness_violations += 1;
        }
    }

    pub fn finish(
        mut self,
        events: &[EventRecord],
        switches: &[(f64, u8)],
        underflow: usize,
    ) -> Metrics {
        let m = &mut self.m;
        m.event_count = events.len();
        m.observed_miet = events.windows(2).map(|w| w[1].t - w[0].t).reduce(f64::min);
        for ev in events {
            if ev.lhs < ev.rhs {
                m.soundness_violations += 1;
            }
            m.bound_checked += 1;
            if ev.bound.violated {
                m.bound_violations += 1;
                m.bound_first_violation.get_or_insert(ev.t);
            }
            if ev.bound.violated_abs {
                m.bound_violations_abs += 1;
                m.bound_first_violation_abs.get_or_insert(ev.t);
            }
        }
        if m.sigma_obs > 0.0 {
            m.miet_bound_obs = self.trig.miet(m.sigma_obs).ok();
        }
        m.switches = switches.to_vec();
        let (ta, _) = m.attack_window;
        for &(t, d) in switches {
            if d == 1 {
                if m.attack_active && t >= ta {
                    if m.detect_time.is_none() {
                        m.detect_time = Some(t);
                        m.detection_latency = Some(t - ta);
                    }
                } else if m.false_alarm_time.is_none() {
                    m.false_alarm_time = Some(t);
                }
            } else if m.detect_time.is_some() && m.release_time.is_none() {
                m.release_time = Some(t);
            }
        }
        m.estimator_underflow_steps = underflow;
        m.phi_obs = m.psi_obs.map(|psi| psi * self.t_d * self.b_norm);
        if let (Some(b), Some(tau)) = (m.miet_bound_obs, m.observed_miet) {
            if tau < b {
                m.warnings.push(format!(
                    "observed inter-event gap {tau:.3e} below the bound {b:.3e}"
                ));
            }
        }
        if let Some(b) = m.miet_bound_obs {
            let dt = if m.steps > 0 {
                self.last_t / m.steps as f64
            } else {
                0.0
            };
            if dt > b / 5.0 {
                m.warnings.push(format!(
                    "dt = {dt:.3e} exceeds tau/5 = {:.3e} at the observed sigma",
                    b / 5.0
                ));
            }
        }
        self.m
    }
}

/// Metrics recomputed from a stored log. ψ needs t_d to be a whole number of logged rows.
pub fn metrics(
    sc: &Scenario,
    log: &TrajectoryLog,
    events: &[EventRecord],
    switches: &[(f64, u8)],
) -> Metrics {
    let lag = (sc.d_steps.is_multiple_of(sc.log_every)).then(|| sc.d_steps / sc.log_every);
    let mut acc = MetricsAcc::new(sc, lag);
    for r in 0..log.rows() {
        let e = log.e_norm[r];
        acc.observe(&RowObs {
            t: log.t[r],
            y: log.y_row(r),
            xi: log.xi[r],
            uah: log.uah_row(r),
            ua: log.ua_row(r),
            margin: log.margin[r],
            tol: None,
            delta: log.delta[r],
            ydot_norm: None,
            e_sq: e * e,
            eta: log.eta[r],
            event_row: log.event[r] == 1,
        });
    }
    acc.finish(events, switches, 0)
}
