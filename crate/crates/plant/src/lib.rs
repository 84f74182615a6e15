//! Agent dynamics, stacking, and actuator attack signals.

// `!(x > 0.0)` is how NaN gets rejected here
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use matcore::{block_diag, controllable, observable, rank, Mat};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type Vector = DVector<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("agent {agent}: B has rank {rank} < {cols} columns, (A2) full column rank violated")]
    InputRank {
        agent: usize,
        rank: usize,
        cols: usize,
    },
    #[error(
        "agents disagree on output dimension ({0} vs {1}); the extended Laplacian needs one p"
    )]
    MixedOutputs(usize, usize),
    #[error("no agents")]
    Empty,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("attack: {0}")]
    Attack(String),
}

/// (A1) is advisory: a scenario may study agents that break it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Advisory {
    NotControllable(usize),
    NotObservable(usize),
}

impl std::fmt::Display for Advisory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Advisory::NotControllable(i) => {
                write!(f, "agent {i}: (A_i, B_i) not controllable, (A1) violated")
            }
            Advisory::NotObservable(i) => {
                write!(f, "agent {i}: (A_i, C_i) not observable, (A1) violated")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentModel {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
}

impl AgentModel {
    pub fn new(a: Mat, b: Mat, c: Mat) -> Result<Self, PlantError> {
        let m = a.nrows();
        if m == 0
            || !a.is_square()
            || b.nrows() != m
            || c.ncols() != m
            || b.ncols() == 0
            || c.nrows() == 0
        {
            return Err(PlantError::Dimension(format!(
                "A {}x{}, B {}x{}, C {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        for (name, mtx) in [("A", &a), ("B", &b), ("C", &c)] {
            if mtx.iter().any(|v| !v.is_finite()) {
                return Err(PlantError::NonFinite(name.into()));
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }
}

/// Agent i (1-based) of the third-order heterogeneous family.
pub fn case_a_agent(i: usize) -> AgentModel {
    let s = i as f64;
    // integer numerators over 10 so every entry is the correctly rounded decimal
    let q = |n: f64| n / 10.0;
    #[rustfmt::skip]
    let a = matcore::mat(3, 3, &[
        q(-60.0 * s), q(10.0 * s * s), q(5.0 * s * s),
        q(10.0 * s * s), q(-90.0 * s), q(4.0 * s * s),
        q(5.0 * s * s), q(4.0 * s * s), q(-90.0 * s),
    ]);
    let b = matcore::mat(3, 1, &[0.0, 0.0, q(5.0 * s)]);
    let c = matcore::mat(1, 3, &[2.0 / s, 0.0, 0.0]);
    AgentModel::new(a, b, c).expect("static agent")
}

pub fn oscillator(damping: f64) -> AgentModel {
    AgentModel::new(
        matcore::mat(2, 2, &[0.0, 1.0, -1.0, damping]),
        matcore::mat(2, 1, &[0.0, 1.0]),
        matcore::mat(1, 2, &[0.0, 1.0]),
    )
    .expect("static agent")
}

#[derive(Debug, Clone, PartialEq)]
pub struct StackedModel {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
    pub agents: Vec<AgentModel>,
    /// state offset of each agent in the stacked vector
    pub offsets: Vec<usize>,
    pub p: usize,
}

impl StackedModel {
    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn n_states(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn n_outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn deriv(&self, x: &Vector, u_c: &Vector) -> Result<Vector, PlantError> {
        if x.len() != self.n_states() || u_c.len() != self.n_inputs() {
            return Err(PlantError::Dimension(format!(
                "x has {} entries (need {}), u has {} (need {})",
                x.len(),
                self.n_states(),
                u_c.len(),
                self.n_inputs()
            )));
        }
        Ok(&self.a * x + &self.b * u_c)
    }

    pub fn output(&self, x: &Vector) -> Result<Vector, PlantError> {
        if x.len() != self.n_states() {
            return Err(PlantError::Dimension(format!(
                "x has {} entries, need {}",
                x.len(),
                self.n_states()
            )));
        }
        Ok(&self.c * x)
    }
}

/// Block-diagonal assembly. (A2) failures are errors, (A1) failures advisories.
pub fn stack(agents: &[AgentModel]) -> Result<(StackedModel, Vec<Advisory>), PlantError> {
    let first = agents.first().ok_or(PlantError::Empty)?;
    let p = first.outputs();
    let mut notes = Vec::new();
    let mut offsets = Vec::with_capacity(agents.len());
    let mut off = 0;
    for (k, ag) in agents.iter().enumerate() {
        let i = k + 1;
        if ag.outputs() != p {
            return Err(PlantError::MixedOutputs(p, ag.outputs()));
        }
        if ag.inputs() != p {
            return Err(PlantError::Dimension(format!(
                "agent {i}: {} inputs but {} outputs; the consensus law needs them equal",
                ag.inputs(),
                p
            )));
        }
        let r = rank(&ag.b);
        if r < ag.inputs() {
            return Err(PlantError::InputRank {
                agent: i,
                rank: r,
                cols: ag.inputs(),
            });
        }
        if !controllable(&ag.a, &ag.b) {
            notes.push(Advisory::NotControllable(i));
        }
        if !observable(&ag.a, &ag.c) {
            notes.push(Advisory::NotObservable(i));
        }
        offsets.push(off);
        off += ag.states();
    }
    let a = block_diag(&agents.iter().map(|g| g.a.clone()).collect::<Vec<_>>());
    let b = block_diag(&agents.iter().map(|g| g.b.clone()).collect::<Vec<_>>());
    let c = block_diag(&agents.iter().map(|g| g.c.clone()).collect::<Vec<_>>());
    Ok((
        StackedModel {
            a,
            b,
            c,
            agents: agents.to_vec(),
            offsets,
            p,
        },
        notes,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttackKind {
    Zero,
    /// Per input channel amplitude and angular frequency (rad/s).
    Sinusoid {
        amp: Vec<f64>,
        freq: Vec<f64>,
    },
    /// Sample times and one value row per time; linear in between, held past the ends.
    Table {
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub window: (f64, f64),
    pub channels: usize,
}

impl AttackSpec {
    pub fn zero(channels: usize) -> Self {
        Self {
            kind: AttackKind::Zero,
            window: (0.0, 0.0),
            channels,
        }
    }

    pub fn new(kind: AttackKind, window: (f64, f64), channels: usize) -> Result<Self, PlantError> {
        let (t0, t1) = window;
        if !(t0.is_finite() && t1.is_finite()) || t0 < 0.0 || t1 < t0 {
            return Err(PlantError::Attack(format!(
                "window [{t0}, {t1}] is not an interval in t >= 0"
            )));
        }
        match &kind {
            AttackKind::Zero => {}
            AttackKind::Sinusoid { amp, freq } => {
                if amp.len() != channels || freq.len() != channels {
                    return Err(PlantError::Attack(format!(
                        "sinusoid needs {channels} amplitudes and frequencies, got {} and {}",
                        amp.len(),
                        freq.len()
                    )));
                }
                if amp.iter().chain(freq).any(|v| !v.is_finite()) {
                    return Err(PlantError::NonFinite("attack parameters".into()));
                }
            }
            AttackKind::Table { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(PlantError::Attack(
                        "table needs one value row per sample time".into(),
                    ));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(PlantError::Attack(
                        "table times must be strictly increasing".into(),
                    ));
                }
                if values.iter().any(|r| r.len() != channels) {
                    return Err(PlantError::Attack(format!(
                        "table rows need {channels} values"
                    )));
                }
                if times
                    .iter()
                    .chain(values.iter().flatten())
                    .any(|v| !v.is_finite())
                {
                    return Err(PlantError::NonFinite("attack table".into()));
                }
            }
        }
        Ok(Self {
            kind,
            window,
            channels,
        })
    }

    pub fn active(&self, t: f64) -> bool {
        !matches!(self.kind, AttackKind::Zero) && t >= self.window.0 && t <= self.window.1
    }

    pub fn value_into(&self, t: f64, out: &mut Vector) {
        out.fill(0.0);
        if !self.active(t) {
            return;
        }
        match &self.kind {
            AttackKind::Zero => {}
            AttackKind::Sinusoid { amp, freq } => {
                for k in 0..self.channels {
                    if amp[k] != 0.0 {
                        out[k] = amp[k] * (freq[k] * t).sin();
                    }
                }
            }
            AttackKind::Table { times, values } => {
                let last = times.len() - 1;
                if t <= times[0] {
                    out.copy_from_slice(&values[0]);
                } else if t >= times[last] {
                    out.copy_from_slice(&values[last]);
                } else {
                    let j = times.partition_point(|&s| s <= t);
                    let (ta, tb) = (times[j - 1], times[j]);
                    let w = (t - ta) / (tb - ta);
                    for k in 0..self.channels {
                        out[k] = values[j - 1][k] * (1.0 - w) + values[j][k] * w;
                    }
                }
            }
        }
    }

    pub fn value(&self, t: f64) -> Vector {
        let mut v = Vector::zeros(self.channels);
        self.value_into(t, &mut v);
        v
    }

    /// (sup ‖u^a‖, sup ‖u̇^a‖) inside the window.
    pub fn bounds(&self) -> (f64, f64) {
        match &self.kind {
            AttackKind::Zero => (0.0, 0.0),
            AttackKind::Sinusoid { amp, freq } => {
                let a: f64 = amp.iter().map(|v| v * v).sum::<f64>().sqrt();
                let d: f64 = amp
                    .iter()
                    .zip(freq)
                    .map(|(a, w)| (a * w).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (a, d)
            }
            AttackKind::Table { times, values } => {
                let norm = |r: &Vec<f64>| r.iter().map(|v| v * v).sum::<f64>().sqrt();
                let a = values.iter().map(norm).fold(0.0, f64::max);
                let d = times
                    .windows(2)
                    .zip(values.windows(2))
                    .map(|(t, v)| {
                        let diff: Vec<f64> = v[1].iter().zip(&v[0]).map(|(x, y)| x - y).collect();
                        norm(&diff) / (t[1] - t[0])
                    })
                    .fold(0.0, f64::max);
                (a, d)
            }
        }
    }

    /// Snap window edges onto the integration grid.
    pub fn snapped(&self, dt: f64) -> Self {
        let snap = |t: f64| (t / dt).round() * dt;
        Self {
            window: (snap(self.window.0), snap(self.window.1)),
            ..self.clone()
        }
    }
}

/// Seeded draws used by the randomized case studies.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomDraw {
    pub amp: Vec<f64>,
    pub freq: Vec<f64>,
    pub x0: Vec<f64>,
}

pub const AMP_RANGE: (f64, f64) = (10.0, 20.0);
pub const FREQ_RANGE: (f64, f64) = (0.0, 10.0 * std::f64::consts::PI);
pub const X0_RANGE: (f64, f64) = (-20.0, 25.0);

/// Amplitudes, then frequencies, then initial states, from one ChaCha8 stream.
/// Agents listed in `spared` (1-based) get amplitude 0.
pub fn random_draw(seed: u64, channels: usize, states: usize, spared: &[usize]) -> RandomDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amp: Vec<f64> = (0..channels)
        .map(|_| rng.random_range(AMP_RANGE.0..=AMP_RANGE.1))
        .collect();
    let freq: Vec<f64> = (0..channels)
        .map(|_| rng.random_range(FREQ_RANGE.0..=FREQ_RANGE.1))
        .collect();
    let x0: Vec<f64> = (0..states)
        .map(|_| rng.random_range(X0_RANGE.0..=X0_RANGE.1))
        .collect();
    for &i in spared {
        if (1..=channels).contains(&i) {
            amp[i - 1] = 0.0;
        }
    }
    RandomDraw { amp, freq, x0 }
}
