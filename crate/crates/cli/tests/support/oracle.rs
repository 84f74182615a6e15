//! Brute-force reference for the two-integrator pair, written against the model
//! closed-form dynamics only: x' = u, x̂' = −2x̂ + u + 2ȳ, η' = −η + ‖ȳ − y‖², u = −L x̂.
//! Inputs are frozen over each step, so x and x̂ advance in closed form and η by
//! an exponential integrating factor with a composite Simpson rule.

pub struct Row {
    pub t: f64,
    pub y: [f64; 2],
    pub xh: [f64; 2],
    pub eta: f64,
    pub u: [f64; 2],
    pub event: bool,
}

pub struct Setup {
    pub dt: f64,
    pub steps: usize,
    pub x0: [f64; 2],
    pub tol0: f64,
    /// (γ + d·c2), d·c1, Ω
    pub weight: f64,
    pub eta_gain: f64,
    pub omega: f64,
}

/// γ = ‖PH‖²/c with P = I/4 (A − HC = −2I, Q = I), H = 2I, c = 1/4 ⇒ γ = 1.
pub fn setup() -> Setup {
    let gamma = (0.25f64 * 2.0).powi(2) / 0.25;
    Setup {
        dt: 1e-4,
        steps: 100_000,
        x0: [0.0, 2.0],
        tol0: 1e-2,
        weight: gamma + 1.0,
        eta_gain: 1.0,
        omega: 2e-8,
    }
}

fn sq(a: [f64; 2]) -> f64 {
    a[0] * a[0] + a[1] * a[1]
}

pub fn simulate(s: &Setup) -> Vec<Row> {
    let dt = s.dt;
    let (mut x, mut xh, mut eta) = (s.x0, s.x0, 0.0f64);
    let mut yb = s.x0;
    let mut event = false;
    let decay = (-2.0 * dt).exp();
    let mut rows = Vec::with_capacity(s.steps + 1);
    for n in 0..=s.steps {
        let t = n as f64 * dt;
        let u = [-(xh[0] - xh[1]), -(xh[1] - xh[0])];
        let xhd = [u[0] + 2.0 * (yb[0] - xh[0]), u[1] + 2.0 * (yb[1] - xh[1])];
        let margin = u[0] * xh[0] + u[1] * xh[1] - (xh[0] * xhd[0] + xh[1] * xhd[1]);
        let tol = s.tol0 * (1.0 + sq(u).sqrt() * sq(xh).sqrt());
        assert!(
            margin >= -tol,
            "oracle has no defence mode; margin {margin} at t = {t}"
        );
        rows.push(Row {
            t,
            y: x,
            xh,
            eta,
            u,
            event,
        });
        if n == s.steps {
            break;
        }
        // η(dt) = e^{−dt}η + ∫₀^dt e^{−(dt−s)}‖ȳ − x − us‖² ds
        let f = |r: f64| {
            let e = [yb[0] - x[0] - u[0] * r, yb[1] - x[1] - u[1] * r];
            (-(dt - r)).exp() * sq(e)
        };
        let m = 8;
        let h = dt / m as f64;
        let mut acc = f(0.0) + f(dt);
        for k in 1..m {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        eta = (-dt).exp() * eta + acc * h / 3.0;
        for i in 0..2 {
            let drive = (u[i] + 2.0 * yb[i]) / 2.0;
            xh[i] = xh[i] * decay + drive * (1.0 - decay);
            x[i] += u[i] * dt;
        }
        let e = [yb[0] - x[0], yb[1] - x[1]];
        event = s.weight * sq(e) >= s.eta_gain * eta + s.omega;
        if event {
            yb = x;
        }
    }
    rows
}
