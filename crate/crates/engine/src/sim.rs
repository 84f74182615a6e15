use guard::{detection_bound, detection_matrix, passivity_margin, DetectorState, Transition};
use matcore::Mat;
use observer::{Estimator, EstimatorInput};
use plant::Vector;
use thiserror::Error;

use crate::log::{EventRecord, LogHeader, TrajectoryLog};
use crate::metrics::{Metrics, MetricsAcc, RowObs};
use crate::scenario::{Integrator, Scenario};

/// States beyond this magnitude count as divergence.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("divergence at row {row} (t = {t}): state left the finite range")]
    Divergence { row: usize, t: f64 },
    #[error("observer: {0}")]
    Observer(#[from] observer::ObserverError),
    #[error("guard: {0}")]
    Guard(#[from] guard::GuardError),
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub header: LogHeader,
    pub log: TrajectoryLog,
    pub events: Vec<EventRecord>,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// keep the decimated trajectory in memory
    pub keep_log: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { keep_log: true }
    }
}

pub fn header(sc: &Scenario) -> LogHeader {
    let (amp, freq) = match &sc.attack.kind {
        plant::AttackKind::Sinusoid { amp, freq } => (amp.clone(), freq.clone()),
        _ => (vec![], vec![]),
    };
    LogHeader {
        name: sc.spec.name.clone(),
        scenario_hash: String::new(),
        seed: sc.spec.sim.seed,
        dt: sc.dt,
        duration: sc.duration,
        t_d: sc.spec.observer.t_d,
        alpha: sc.trig.alpha,
        beta: sc.trig.beta,
        gamma: sc.trig.gamma,
        phi: sc.trig.phi,
        omega: sc.trig.omega,
        sigma_apriori: sc.sigma_apriori,
        tau_apriori: sc.tau_apriori,
        attack_window: sc.window,
        attack_amp: amp,
        attack_freq: freq,
        x0: sc.x0.iter().cloned().collect(),
    }
}

/// Per-step quantities that stay fixed across the RK stages.
struct Frozen {
    u: Vector,
    /// B(u + δû^a) + Hȳ, the constant part of the observer right-hand side
    obs_in: Vector,
    y_bar: Vector,
}

struct Work {
    ua: Vector,
    uc: Vector,
    e: Vector,
}

struct Plant<'a> {
    a: &'a Mat,
    b: &'a Mat,
    c: &'a Mat,
    acl: &'a Mat,
    c1: f64,
    c2: f64,
    attack: &'a plant::AttackSpec,
}

impl Plant<'_> {
    /// Joint right-hand side for [x, x̂, η] at stage time `tau`.
    #[allow(clippy::too_many_arguments)]
    fn eval(
        &self,
        fz: &Frozen,
        w: &mut Work,
        tau: f64,
        x: &Vector,
        xh: &Vector,
        eta: f64,
        dx: &mut Vector,
        dxh: &mut Vector,
    ) -> f64 {
        self.attack.value_into(tau, &mut w.ua);
        w.uc.copy_from(&fz.u);
        w.uc += &w.ua;
        dx.gemv(1.0, self.a, x, 0.0);
        dx.gemv(1.0, self.b, &w.uc, 1.0);
        dxh.copy_from(&fz.obs_in);
        dxh.gemv(1.0, self.acl, xh, 1.0);
        w.e.copy_from(&fz.y_bar);
        w.e.gemv(-1.0, self.c, x, 1.0);
        -self.c1 * eta + self.c2 * w.e.norm_squared()
    }
}

fn finite_and_bounded(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite() && x.abs() < BLOWUP)
}

pub fn run(sc: &Scenario) -> Result<RunOutput, EngineError> {
    run_with(sc, RunOptions::default())
}

pub fn run_with(sc: &Scenario, opts: RunOptions) -> Result<RunOutput, EngineError> {
    let md = &sc.model;
    let (nx, ny) = (md.n_states(), md.n_outputs());
    let n_ag = md.n_agents();
    let p = md.p;
    let dt = sc.dt;
    let trig = &sc.trig;
    let prm = trig.params;
    let m3 = detection_matrix(sc.gains.k, &md.b, &md.c, &sc.lap.l, &sc.h, &md.a)?;
    let hc = &sc.h;

    let pl = Plant {
        a: &md.a,
        b: &md.b,
        c: &md.c,
        acl: &sc.acl,
        c1: prm.c1,
        c2: prm.c2,
        attack: &sc.attack,
    };

    let mut x = sc.x0.clone();
    let mut xh = sc.xhat0.clone();
    let mut eta = sc.eta0;
    let mut y_bar = &md.c * &x;
    let mut xh_prev: Option<Vector> = None;

    let mut det = DetectorState::new(sc.tol0, sc.dwell)?;
    let mut est = Estimator::new(md, hc, sc.d_steps, sc.derivative, sc.update)?;
    let mut acc = MetricsAcc::new(sc, Some(sc.d_steps));

    let mut log = TrajectoryLog {
        n_agents: n_ag,
        n_out: ny,
        n_states: nx,
        agent_states: md.agents.iter().map(|a| a.states()).collect(),
        ..Default::default()
    };
    let mut events: Vec<EventRecord> = Vec::new();

    let zero_u = Vector::zeros(ny);
    let mut y_hat = Vector::zeros(ny);
    let mut un = Vector::zeros(ny);
    let mut u = Vector::zeros(ny);
    let mut uah = Vector::zeros(ny);
    let mut innov = Vector::zeros(ny);
    let mut xhd = Vector::zeros(nx);
    let mut ydot = Vector::zeros(ny);
    let mut tmp_nx = Vector::zeros(nx);
    let mut prev_margin = 0.0;
    let mut prev_tol = 0.0;
    let mut event_row = false;

    let mut w = Work {
        ua: Vector::zeros(ny),
        uc: Vector::zeros(ny),
        e: Vector::zeros(ny),
    };
    let mut fz = Frozen {
        u: Vector::zeros(ny),
        obs_in: Vector::zeros(nx),
        y_bar: y_bar.clone(),
    };
    let (mut k_x, mut k_xh) = (
        [(); 4].map(|_| Vector::zeros(nx)),
        [(); 4].map(|_| Vector::zeros(nx)),
    );
    let mut k_eta = [0.0f64; 4];
    let (mut sx, mut sxh) = (Vector::zeros(nx), Vector::zeros(nx));

    for n in 0..=sc.steps {
        let t = sc.time(n);

        // (1) estimated output and nominal consensus input
        y_hat.gemv(1.0, &md.c, &xh, 0.0);
        un.gemv(-sc.gains.k, &sc.lap.l, &y_hat, 0.0);

        // (2) detector, driven by the previous step's margin
        if n > 0 && det.step(prev_margin, prev_tol, t, dt) == Transition::Released {
            est.reset();
        }
        let delta = det.delta;

        // (3) attack estimate
        innov.copy_from(&y_bar);
        innov -= &y_hat;
        if delta == 1 {
            let inp = EstimatorInput {
                model: md,
                innovation: &innov,
                x_hat: &xh,
                x_hat_prev: xh_prev.as_ref(),
                u_nominal: &un,
                dt,
            };
            uah.copy_from(est.step(&inp));
        } else {
            uah.fill(0.0);
        }

        // (4) control law and the observer's constant drive
        u.copy_from(&un);
        if delta == 1 {
            u -= &uah;
        }
        w.uc.copy_from(&u);
        if delta == 1 {
            w.uc += &uah;
        }
        fz.u.copy_from(&u);
        fz.obs_in.gemv(1.0, &md.b, &w.uc, 0.0);
        fz.obs_in.gemv(1.0, hc, &y_bar, 1.0);
        fz.y_bar.copy_from(&y_bar);

        // first RK stage doubles as the x̂̇ used by the margin
        k_eta[0] = pl.eval(&fz, &mut w, t, &x, &xh, eta, &mut k_x[0], &mut k_xh[0]);
        xhd.copy_from(&k_xh[0]);
        let ua_t = w.ua.clone();
        let e_sq = w.e.norm_squared();
        let margin = passivity_margin(&u, &y_hat, &xh, &xhd);
        let tol = guard::tolerance(sc.tol0, &u, &y_hat);
        ydot.gemv(1.0, &md.c, &k_x[0], 0.0);

        tmp_nx.copy_from(&x);
        tmp_nx -= &xh;
        let xi = tmp_nx.norm();
        let y = &md.c * &x;
        acc.observe(&RowObs {
            t,
            y: y.as_slice(),
            xi,
            uah: uah.as_slice(),
            ua: ua_t.as_slice(),
            margin,
            tol: Some(tol),
            delta,
            ydot_norm: Some(ydot.norm()),
            e_sq,
            eta,
            event_row,
        });

        if opts.keep_log && (n % sc.log_every == 0 || n == sc.steps) {
            log.t.push(t);
            log.row_index.push(n);
            log.y.extend_from_slice(y.as_slice());
            log.x_hat.extend_from_slice(xh.as_slice());
            log.eta.push(eta);
            log.e_norm.push(e_sq.sqrt());
            log.delta.push(delta);
            log.margin.push(margin);
            log.u.extend_from_slice(u.as_slice());
            log.ua.extend_from_slice(ua_t.as_slice());
            log.uah.extend_from_slice(if delta == 1 {
                uah.as_slice()
            } else {
                zero_u.as_slice()
            });
            log.event.push(event_row as u8);
            log.xi.push(xi);
        }
        prev_margin = margin;
        prev_tol = tol;
        if n == sc.steps {
            break;
        }

        // (5) integrate x, x̂, η together
        match sc.integrator {
            Integrator::Euler => {
                x.axpy(dt, &k_x[0], 1.0);
                xh_prev = Some(xh.clone());
                xh.axpy(dt, &k_xh[0], 1.0);
                eta += dt * k_eta[0];
            }
            Integrator::Rk4 => {
                let half = 0.5 * dt;
                for s in 1..4 {
                    let (h, tau) = if s < 3 {
                        (half, t + half)
                    } else {
                        (dt, t + dt)
                    };
                    sx.copy_from(&x);
                    sx.axpy(h, &k_x[s - 1], 1.0);
                    sxh.copy_from(&xh);
                    sxh.axpy(h, &k_xh[s - 1], 1.0);
                    let se = eta + h * k_eta[s - 1];
                    k_eta[s] = pl.eval(&fz, &mut w, tau, &sx, &sxh, se, &mut k_x[s], &mut k_xh[s]);
                }
                let c = dt / 6.0;
                for (kk, wgt) in [(0usize, 1.0), (1, 2.0), (2, 2.0), (3, 1.0)] {
                    x.axpy(c * wgt, &k_x[kk], 1.0);
                }
                xh_prev = Some(xh.clone());
                for (kk, wgt) in [(0usize, 1.0), (1, 2.0), (2, 2.0), (3, 1.0)] {
                    xh.axpy(c * wgt, &k_xh[kk], 1.0);
                }
                eta += c * (k_eta[0] + 2.0 * k_eta[1] + 2.0 * k_eta[2] + k_eta[3]);
            }
        }
        if !finite_and_bounded(&x) || !finite_and_bounded(&xh) || !eta.is_finite() {
            return Err(EngineError::Divergence {
                row: n + 1,
                t: sc.time(n + 1),
            });
        }

        // (6) event test at the new grid point
        let y_new = &md.c * &x;
        let e = &y_bar - &y_new;
        let e_sq = e.norm_squared();
        event_row = trig.fires(e_sq, eta);
        if event_row {
            let t_k = sc.time(n + 1);
            let e_agents = (0..n_ag).map(|i| e.rows(i * p, p).norm()).collect();
            events.push(EventRecord {
                t: t_k,
                row: n + 1,
                e_norm: e_sq.sqrt(),
                e_agents,
                eta,
                lhs: trig.e_weight() * e_sq,
                rhs: trig.threshold(eta),
                bound: detection_bound(&xh, &m3, hc, &md.c, &x, &sc.x0),
            });
            y_bar.copy_from(&y_new);
        }
    }

    let mut metrics = acc.finish(&events, &det.switches, est.underflow_steps);
    metrics.warnings.extend(sc.advisories.iter().cloned());
    Ok(RunOutput {
        header: header(sc),
        log,
        events,
        metrics,
    })
}
