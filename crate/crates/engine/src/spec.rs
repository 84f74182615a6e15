//! Plain-data scenario description. Mirrors the scenario file one to one.

use serde::{Deserialize, Serialize};

pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub agents: AgentsSpec,
    pub graph: GraphSpec,
    pub observer: ObserverSpec,
    pub trigger: TriggerSpec,
    pub controller: ControllerSpec,
    pub attack: AttackSpecFile,
    pub sim: SimSpec,
}

/// One matrix per agent in each list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentsSpec {
    pub a: Vec<Rows>,
    pub b: Vec<Rows>,
    pub c: Vec<Rows>,
}

/// Edge (i, j), 1-based: node j receives node i's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    #[default]
    Rhs,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UpdateMode {
    #[default]
    Sampled,
    PerStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverSpec {
    /// stacked gain, Nm × Np
    pub h: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Rows>,
    pub t_d: f64,
    #[serde(default)]
    pub derivative: DerivativeMode,
    #[serde(default)]
    pub update: UpdateMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerSpec {
    pub c: f64,
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub eps: f64,
    #[serde(default)]
    pub psi: f64,
    #[serde(default)]
    pub eta0: f64,
    /// a-priori bound on ‖ẏ‖; enables the dt ≤ τ/5 check before the run
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub k: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_dwell")]
    pub dwell: f64,
}

fn default_tol() -> f64 {
    guard::DEFAULT_TOL0
}

fn default_dwell() -> f64 {
    guard::DEFAULT_DWELL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKindSpec {
    Zero,
    Sinusoid,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSpecFile {
    pub kind: AttackKindSpec,
    pub window: [f64; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub amp: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub freq: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Rows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorSpec {
    #[default]
    Rk4,
    Euler,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub dt: f64,
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    pub x0: Vec<f64>,
    /// defaults to x0
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xhat0: Option<Vec<f64>>,
    /// keep every n-th row in the trajectory log
    #[serde(default = "one")]
    pub log_every: usize,
}

fn one() -> usize {
    1
}
