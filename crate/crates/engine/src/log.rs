use guard::DetectionBound;

/// Constants and draws recorded at the top of every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct LogHeader {
    pub name: String,
    /// filled in by whoever serialised the scenario
    pub scenario_hash: String,
    pub seed: u64,
    pub dt: f64,
    pub duration: f64,
    pub t_d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
    pub omega: f64,
    pub sigma_apriori: Option<f64>,
    pub tau_apriori: Option<f64>,
    pub attack_window: (f64, f64),
    pub attack_amp: Vec<f64>,
    pub attack_freq: Vec<f64>,
    pub x0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub t: f64,
    pub row: usize,
    /// ‖ȳ − y‖ just before the reset
    pub e_norm: f64,
    pub e_agents: Vec<f64>,
    pub eta: f64,
    /// (γ + d c2)‖e‖² and d c1 η + Ω at the crossing
    pub lhs: f64,
    pub rhs: f64,
    pub bound: DetectionBound,
}

/// Row-major per-step series; `n_*` give the block widths.
#[derive(Debug, Clone, Default)]
pub struct TrajectoryLog {
    pub n_agents: usize,
    pub n_out: usize,
    pub n_states: usize,
    pub agent_states: Vec<usize>,
    pub t: Vec<f64>,
    pub row_index: Vec<usize>,
    pub y: Vec<f64>,
    pub x_hat: Vec<f64>,
    pub eta: Vec<f64>,
    pub e_norm: Vec<f64>,
    pub delta: Vec<u8>,
    pub margin: Vec<f64>,
    pub u: Vec<f64>,
    pub ua: Vec<f64>,
    pub uah: Vec<f64>,
    pub event: Vec<u8>,
    /// ‖x − x̂‖, kept for analysis, not part of the CSV layout
    pub xi: Vec<f64>,
}

impl TrajectoryLog {
    pub fn rows(&self) -> usize {
        self.t.len()
    }

    pub fn y_row(&self, r: usize) -> &[f64] {
        &self.y[r * self.n_out..(r + 1) * self.n_out]
    }

    pub fn x_hat_row(&self, r: usize) -> &[f64] {
        &self.x_hat[r * self.n_states..(r + 1) * self.n_states]
    }

    pub fn u_row(&self, r: usize) -> &[f64] {
        &self.u[r * self.n_out..(r + 1) * self.n_out]
    }

    pub fn ua_row(&self, r: usize) -> &[f64] {
        &self.ua[r * self.n_out..(r + 1) * self.n_out]
    }

    pub fn uah_row(&self, r: usize) -> &[f64] {
        &self.uah[r * self.n_out..(r + 1) * self.n_out]
    }

    /// Index of the first row with t ≥ `t`, if any.
    pub fn row_at(&self, t: f64) -> Option<usize> {
        let k = self.t.partition_point(|&s| s < t - 1e-12);
        (k < self.t.len()).then_some(k)
    }
}
