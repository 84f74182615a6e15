//! Scenarios shipped with the binary. Random draws are materialised from the seed here.

use engine::spec::*;
use matcore::{block_diag, Mat};
use plant::random_draw;

pub const NAMES: [&str; 6] = [
    "case_a",
    "case_b",
    "case_c",
    "undetectable",
    "ring_balanced",
    "two_integrator",
];

pub const DEFAULT_SEED: u64 = 1;

pub fn describe(name: &str) -> &'static str {
    match name {
        "case_a" => {
            "five heterogeneous third-order agents, sinusoidal attack on 4 of 5 during [2,5] s"
        }
        "case_b" => {
            "five oscillators with A = [[0,1],[-1,1]] (negative damping), same attack pattern"
        }
        "case_c" => "five lossless oscillators, same attack pattern",
        "undetectable" => {
            "case_a agents with a decaying attack on agent 2 that fades as consensus is reached"
        }
        "ring_balanced" => {
            "four first-order lags on a directed (balanced) ring, fixed attack; K sweep target"
        }
        "two_integrator" => {
            "two single integrators, symmetric pair graph, no attack; oracle target"
        }
        _ => "",
    }
}

pub fn builtin(name: &str, seed: Option<u64>) -> Option<ScenarioSpec> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    Some(match name {
        "case_a" => case_a(seed),
        "case_b" => case_b(seed),
        "case_c" => case_c(seed),
        "undetectable" => undetectable(seed),
        "ring_balanced" => ring_balanced(seed),
        "two_integrator" => two_integrator(seed),
        _ => return None,
    })
}

fn rows(m: &Mat) -> Rows {
    engine::mat_to_rows(m)
}

pub fn case_edges() -> Vec<[usize; 2]> {
    topology::CASE_EDGES.iter().map(|&(i, j)| [i, j]).collect()
}

/// Observer gains placing one pole on each agent's transmission zero and the
/// other two at −100 and −120.
pub const CASE_A_GAINS: [[f64; 3]; 5] = [
    [102.9, 81.3, 10101.41],
    [193.2, 151.2, 4185.28],
    [273.3, 212.7, 2274.07],
    [345.6, 268.8, 1370.24],
    [412.5, 322.5, 876.25],
];

/// Shared settings of the three case studies: Ω chosen so the event band is ≈ 1e-6.
const CASE_DT: f64 = 2e-5;
const CASE_TD: f64 = 0.01;
const CASE_DURATION: f64 = 10.0;
const CASE_LOG_EVERY: usize = 50;

pub fn case_trigger() -> TriggerSpec {
    TriggerSpec {
        c: 0.25,
        d: 1.0,
        c1: 1.0,
        c2: 1.0,
        eps: 2.1e-7,
        psi: 0.0,
        eta0: 0.0,
        sigma: None,
    }
}

fn stacked_gain(blocks: &[Vec<f64>]) -> Rows {
    let bs: Vec<Mat> = blocks
        .iter()
        .map(|b| Mat::from_column_slice(b.len(), 1, b))
        .collect();
    rows(&block_diag(&bs))
}

fn agent_lists(agents: &[plant::AgentModel]) -> AgentsSpec {
    AgentsSpec {
        a: agents.iter().map(|g| rows(&g.a)).collect(),
        b: agents.iter().map(|g| rows(&g.b)).collect(),
        c: agents.iter().map(|g| rows(&g.c)).collect(),
    }
}

fn case_common(name: &str, agents: Vec<plant::AgentModel>, h: Rows, seed: u64) -> ScenarioSpec {
    let nx: usize = agents.iter().map(|a| a.states()).sum();
    let draw = random_draw(seed, agents.len(), nx, &[3]);
    ScenarioSpec {
        name: name.into(),
        description: describe(name).into(),
        agents: agent_lists(&agents),
        graph: GraphSpec {
            nodes: 5,
            edges: case_edges(),
        },
        observer: ObserverSpec {
            h,
            p: None,
            q: None,
            t_d: CASE_TD,
            derivative: DerivativeMode::Rhs,
            update: UpdateMode::Sampled,
        },
        trigger: case_trigger(),
        controller: ControllerSpec {
            k: 1.0,
            tol: 1e-6,
            dwell: 0.2,
        },
        attack: AttackSpecFile {
            kind: AttackKindSpec::Sinusoid,
            window: [2.0, 5.0],
            amp: draw.amp,
            freq: draw.freq,
            times: vec![],
            values: vec![],
        },
        sim: SimSpec {
            dt: CASE_DT,
            duration: CASE_DURATION,
            seed,
            integrator: IntegratorSpec::Rk4,
            x0: draw.x0,
            xhat0: None,
            log_every: CASE_LOG_EVERY,
        },
    }
}

pub fn case_a(seed: u64) -> ScenarioSpec {
    let agents: Vec<_> = (1..=5).map(plant::case_a_agent).collect();
    let h = stacked_gain(&CASE_A_GAINS.iter().map(|g| g.to_vec()).collect::<Vec<_>>());
    case_common("case_a", agents, h, seed)
}

/// Oscillator observer: poles at −10 and −12 for A = [[0,1],[−1,a22]], C = [0 1].
fn oscillator_gain(a22: f64) -> Vec<f64> {
    vec![1.0 - 120.0, a22 + 22.0]
}

pub fn case_b(seed: u64) -> ScenarioSpec {
    let agents = vec![plant::oscillator(1.0); 5];
    let h = stacked_gain(&vec![oscillator_gain(1.0); 5]);
    case_common("case_b", agents, h, seed)
}

pub fn case_c(seed: u64) -> ScenarioSpec {
    let agents = vec![plant::oscillator(0.0); 5];
    let h = stacked_gain(&vec![oscillator_gain(0.0); 5]);
    case_common("case_c", agents, h, seed)
}

pub fn undetectable(seed: u64) -> ScenarioSpec {
    let mut s = case_a(seed);
    s.name = "undetectable".into();
    s.description = describe("undetectable").into();
    // 4·e^{−(t−2)}·sin(3t) on agent 2 only, sampled every 10 ms
    let times: Vec<f64> = (0..=600).map(|k| 2.0 + 0.01 * k as f64).collect();
    let values = times
        .iter()
        .map(|&t| {
            let mut v = vec![0.0; 5];
            v[1] = 4.0 * (-(t - 2.0)).exp() * (3.0 * t).sin();
            v
        })
        .collect();
    s.attack = AttackSpecFile {
        kind: AttackKindSpec::Table,
        window: [2.0, 8.0],
        amp: vec![],
        freq: vec![],
        times,
        values,
    };
    s
}

pub fn ring_balanced(seed: u64) -> ScenarioSpec {
    let n = 4;
    // 1/(s + i), strictly passive, relative degree one
    let lag = |i: usize| vec![vec![-(i as f64)]];
    let one = vec![vec![1.0]];
    let h = stacked_gain(&vec![vec![50.0]; n]);
    let edges = (1..=n).map(|i| [i, i % n + 1]).collect();
    ScenarioSpec {
        name: "ring_balanced".into(),
        description: describe("ring_balanced").into(),
        agents: AgentsSpec {
            a: (1..=n).map(lag).collect(),
            b: vec![one.clone(); n],
            c: vec![one; n],
        },
        graph: GraphSpec { nodes: n, edges },
        observer: ObserverSpec {
            h,
            p: None,
            q: None,
            t_d: 0.01,
            derivative: DerivativeMode::Rhs,
            update: UpdateMode::Sampled,
        },
        trigger: TriggerSpec {
            c: 0.25,
            d: 1.0,
            c1: 1.0,
            c2: 1.0,
            eps: 1e-8,
            psi: 0.0,
            eta0: 0.0,
            sigma: None,
        },
        // 0.2 s lets the margin re-arm mid-attack at high K; each restart of the estimator is a transient
        controller: ControllerSpec {
            k: 1.0,
            tol: 1e-6,
            dwell: 0.3,
        },
        attack: AttackSpecFile {
            kind: AttackKindSpec::Sinusoid,
            window: [2.0, 8.0],
            amp: vec![6.0, 8.0, 0.0, 5.0],
            freq: vec![3.0, 5.0, 0.0, 7.0],
            times: vec![],
            values: vec![],
        },
        sim: SimSpec {
            dt: 1e-4,
            duration: 10.0,
            seed,
            integrator: IntegratorSpec::Rk4,
            x0: vec![4.0, -2.0, -3.0, 1.0],
            xhat0: None,
            log_every: 10,
        },
    }
}

pub fn two_integrator(seed: u64) -> ScenarioSpec {
    let one = vec![vec![1.0]];
    ScenarioSpec {
        name: "two_integrator".into(),
        description: describe("two_integrator").into(),
        agents: AgentsSpec {
            a: vec![vec![vec![0.0]]; 2],
            b: vec![one.clone(); 2],
            c: vec![one; 2],
        },
        graph: GraphSpec {
            nodes: 2,
            edges: vec![[1, 2], [2, 1]],
        },
        observer: ObserverSpec {
            h: vec![vec![2.0, 0.0], vec![0.0, 2.0]],
            p: None,
            q: None,
            t_d: 1e-3,
            derivative: DerivativeMode::Rhs,
            update: UpdateMode::Sampled,
        },
        trigger: TriggerSpec {
            c: 0.25,
            d: 1.0,
            c1: 1.0,
            c2: 1.0,
            eps: 2e-8,
            psi: 0.0,
            eta0: 0.0,
            sigma: None,
        },
        // lossless agents: the margin carries x̂ᵀH(ȳ − ŷ) of order 1e-4, so the band is widened
        controller: ControllerSpec {
            k: 1.0,
            tol: 1e-2,
            dwell: 0.2,
        },
        attack: AttackSpecFile {
            kind: AttackKindSpec::Zero,
            window: [0.0, 0.0],
            amp: vec![],
            freq: vec![],
            times: vec![],
            values: vec![],
        },
        sim: SimSpec {
            dt: 1e-4,
            duration: 10.0,
            seed,
            integrator: IntegratorSpec::Rk4,
            x0: vec![0.0, 2.0],
            xhat0: None,
            log_every: 1,
        },
    }
}
