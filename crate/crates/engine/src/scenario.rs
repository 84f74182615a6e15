use guard::{GainConfig, GuardError};
use matcore::{trigger_constants, LyapunovPair, Mat, MatError, TriggerConstants, TriggerParams};
use observer::{delay_steps, validate_gain, Derivative, ObserverError, Update};
use plant::{stack, AgentModel, AttackKind, AttackSpec, PlantError, StackedModel, Vector};
use thiserror::Error;
use topology::{build_laplacian, Digraph, LaplacianBundle, TopologyError};

use crate::spec::*;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidationError {
    #[error("{what}: {msg}")]
    Shape { what: String, msg: String },
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error("graph: {0}")]
    Graph(#[from] TopologyError),
    #[error("graph has {nodes} nodes but there are {agents} agents")]
    GraphSize { nodes: usize, agents: usize },
    #[error("the communication graph is not strongly connected")]
    NotStronglyConnected,
    #[error("observer: {0}")]
    Observer(#[from] ObserverError),
    #[error("observer: give at most one of P and Q")]
    BothPQ,
    #[error("Lyapunov pair for A - HC: {0}")]
    Lyapunov(MatError),
    #[error("event-trigger precondition violated: {0}")]
    Trigger(MatError),
    #[error("controller: {0}")]
    Controller(#[from] GuardError),
    #[error("sim: {0}")]
    Sim(String),
    #[error(
        "dt = {dt} exceeds tau/5 = {limit:.6e} (minimum inter-event time bound at sigma = {sigma})"
    )]
    MietStep { dt: f64, limit: f64, sigma: f64 },
}

impl ValidationError {
    /// Short label of the violated assumption, used in CLI summaries.
    pub fn assumption(&self) -> &'static str {
        match self {
            ValidationError::Plant(PlantError::InputRank { .. }) => "(A2) full column rank of B_i",
            ValidationError::NotStronglyConnected
            | ValidationError::GraphSize { .. }
            | ValidationError::Graph(_) => "(A3) strongly connected fixed digraph",
            ValidationError::Observer(ObserverError::GainNotStabilizing(_)) => "A - HC Hurwitz",
            ValidationError::Trigger(MatError::OmegaNonpositive(_)) => {
                "Omega = eps - beta*Phi^2 > 0"
            }
            ValidationError::Trigger(MatError::AlphaNonpositive { .. }) => {
                "c in (0, lambda_min(Q)/2)"
            }
            ValidationError::MietStep { .. } => "dt <= tau/5 (minimum inter-event time)",
            ValidationError::Lyapunov(_) => "P, Q symmetric positive definite",
            _ => "scenario structure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Euler,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub model: StackedModel,
    pub graph: Digraph,
    pub lap: LaplacianBundle,
    pub h: Mat,
    pub acl: Mat,
    pub lyap: LyapunovPair,
    pub trig: TriggerConstants,
    pub gains: GainConfig,
    pub tol0: f64,
    pub dwell: f64,
    pub attack: AttackSpec,
    /// snapped attack window, kept even when the attack is switched off
    pub window: (f64, f64),
    pub x0: Vector,
    pub xhat0: Vector,
    pub eta0: f64,
    pub dt: f64,
    pub duration: f64,
    pub steps: usize,
    pub log_every: usize,
    pub d_steps: usize,
    pub integrator: Integrator,
    pub derivative: Derivative,
    pub update: Update,
    pub sigma_apriori: Option<f64>,
    pub tau_apriori: Option<f64>,
    pub advisories: Vec<String>,
}

fn to_mat(rows: &Rows, what: &str) -> Result<Mat, ValidationError> {
    let shape = |msg: String| ValidationError::Shape {
        what: what.to_string(),
        msg,
    };
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    if r == 0 || c == 0 {
        return Err(shape("matrix is empty".into()));
    }
    if let Some(k) = rows.iter().position(|x| x.len() != c) {
        return Err(shape(format!(
            "row {} has {} entries, expected {c}",
            k + 1,
            rows[k].len()
        )));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(shape("non-finite entry".into()));
    }
    let flat: Vec<f64> = rows.iter().flatten().cloned().collect();
    Ok(Mat::from_row_slice(r, c, &flat))
}

pub fn mat_to_rows(m: &Mat) -> Rows {
    (0..m.nrows())
        .map(|i| m.row(i).iter().cloned().collect())
        .collect()
}

impl Scenario {
    pub fn build(spec: &ScenarioSpec) -> Result<Self, ValidationError> {
        let a = &spec.agents;
        if a.a.len() != a.b.len() || a.a.len() != a.c.len() {
            return Err(ValidationError::Shape {
                what: "agents".into(),
                msg: format!(
                    "{} A, {} B and {} C matrices",
                    a.a.len(),
                    a.b.len(),
                    a.c.len()
                ),
            });
        }
        let mut agents = Vec::new();
        for i in 0..a.a.len() {
            let tag = |m: &str| format!("agent {} {m}", i + 1);
            agents.push(AgentModel::new(
                to_mat(&a.a[i], &tag("A"))?,
                to_mat(&a.b[i], &tag("B"))?,
                to_mat(&a.c[i], &tag("C"))?,
            )?);
        }
        let (model, notes) = stack(&agents)?;
        let mut advisories: Vec<String> = notes.iter().map(|n| n.to_string()).collect();

        if spec.graph.nodes != model.n_agents() {
            return Err(ValidationError::GraphSize {
                nodes: spec.graph.nodes,
                agents: model.n_agents(),
            });
        }
        let edges: Vec<(usize, usize)> = spec.graph.edges.iter().map(|e| (e[0], e[1])).collect();
        let graph = Digraph::new(spec.graph.nodes, &edges)?;
        let lap = build_laplacian(&graph, model.p)?;
        if !lap.strongly_connected {
            return Err(ValidationError::NotStronglyConnected);
        }

        let h = to_mat(&spec.observer.h, "observer H")?;
        let acl = validate_gain(&model, &h)?;
        let lyap = match (&spec.observer.p, &spec.observer.q) {
            (Some(_), Some(_)) => return Err(ValidationError::BothPQ),
            (Some(p), None) => LyapunovPair::from_p(&acl, to_mat(p, "observer P")?),
            (None, Some(q)) => LyapunovPair::from_q(&acl, to_mat(q, "observer Q")?),
            (None, None) => LyapunovPair::from_q(&acl, Mat::identity(acl.nrows(), acl.nrows())),
        }
        .map_err(ValidationError::Lyapunov)?;

        let sim = &spec.sim;
        if !(sim.dt > 0.0) || !sim.dt.is_finite() {
            return Err(ValidationError::Sim(format!(
                "dt = {} must be positive",
                sim.dt
            )));
        }
        if !(sim.duration >= sim.dt) || !sim.duration.is_finite() {
            return Err(ValidationError::Sim(format!(
                "duration = {} must be at least dt",
                sim.duration
            )));
        }
        if sim.log_every == 0 {
            return Err(ValidationError::Sim("log_every must be at least 1".into()));
        }
        let steps = (sim.duration / sim.dt).round() as usize;
        let d_steps = delay_steps(spec.observer.t_d, sim.dt)?;

        let t = &spec.trigger;
        let prm = TriggerParams {
            c: t.c,
            d: t.d,
            c1: t.c1,
            c2: t.c2,
            eps: t.eps,
            t_d: spec.observer.t_d,
            psi: t.psi,
        };
        let trig = trigger_constants(&lyap, &h, &model.b, prm).map_err(ValidationError::Trigger)?;
        if !(t.eta0 >= 0.0) {
            return Err(ValidationError::Sim(format!(
                "eta0 = {} must be nonnegative",
                t.eta0
            )));
        }

        let ctl = &spec.controller;
        let gains = GainConfig::new(ctl.k, lap.l.clone())?;
        guard::DetectorState::new(ctl.tol, ctl.dwell)?;

        let n_in = model.n_inputs();
        let at = &spec.attack;
        let kind = match at.kind {
            AttackKindSpec::Zero => AttackKind::Zero,
            AttackKindSpec::Sinusoid => AttackKind::Sinusoid {
                amp: at.amp.clone(),
                freq: at.freq.clone(),
            },
            AttackKindSpec::Table => AttackKind::Table {
                times: at.times.clone(),
                values: at.values.clone(),
            },
        };
        let attack = AttackSpec::new(kind, (at.window[0], at.window[1]), n_in)?.snapped(sim.dt);
        let window = attack.window;

        let nx = model.n_states();
        if sim.x0.len() != nx {
            return Err(ValidationError::Sim(format!(
                "x0 has {} entries, need {nx}",
                sim.x0.len()
            )));
        }
        let x0 = Vector::from_vec(sim.x0.clone());
        let xhat0 = match &sim.xhat0 {
            Some(v) if v.len() != nx => {
                return Err(ValidationError::Sim(format!(
                    "xhat0 has {} entries, need {nx}",
                    v.len()
                )))
            }
            Some(v) => Vector::from_vec(v.clone()),
            None => x0.clone(),
        };
        if x0.iter().chain(xhat0.iter()).any(|v| !v.is_finite()) {
            return Err(ValidationError::Sim("non-finite initial state".into()));
        }
        if (&x0 - &xhat0).norm() > 1e-9 {
            advisories.push("observer not initialised at x(0); Assumption 2 does not hold".into());
        }

        let (sigma_apriori, tau_apriori) = match t.sigma {
            Some(s) => {
                let tau = trig.miet(s).map_err(ValidationError::Trigger)?;
                if sim.dt > tau / 5.0 {
                    return Err(ValidationError::MietStep {
                        dt: sim.dt,
                        limit: tau / 5.0,
                        sigma: s,
                    });
                }
                (Some(s), Some(tau))
            }
            None => (None, None),
        };

        Ok(Self {
            spec: spec.clone(),
            model,
            graph,
            lap,
            h,
            acl,
            lyap,
            trig,
            gains,
            tol0: ctl.tol,
            dwell: ctl.dwell,
            attack,
            window,
            x0,
            xhat0,
            eta0: t.eta0,
            dt: sim.dt,
            duration: sim.duration,
            steps,
            log_every: sim.log_every,
            d_steps,
            integrator: match sim.integrator {
                IntegratorSpec::Rk4 => Integrator::Rk4,
                IntegratorSpec::Euler => Integrator::Euler,
            },
            derivative: match spec.observer.derivative {
                DerivativeMode::Rhs => Derivative::Rhs,
                DerivativeMode::FiniteDifference => Derivative::FiniteDifference,
            },
            update: match spec.observer.update {
                UpdateMode::Sampled => Update::Sampled,
                UpdateMode::PerStep => Update::PerStep,
            },
            sigma_apriori,
            tau_apriori,
            advisories,
        })
    }

    pub fn attack_active(&self) -> bool {
        !matches!(self.attack.kind, AttackKind::Zero)
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }
}
