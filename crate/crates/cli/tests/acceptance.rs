//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use engine::spec::AttackKindSpec;
use engine::{run_batch, run_with, Metrics, RunOptions, RunOutput, Scenario, ScenarioSpec};
use matcore::{
    check_positive_real, default_grid, eig_extrema, is_hurwitz, lyap_residual, solve_lyapunov, Mat,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seccons::builtin::{builtin, NAMES};

struct Outcome {
    pass: bool,
    detail: String,
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn spec(name: &str) -> ScenarioSpec {
    builtin(name, None).unwrap()
}

fn build(s: &ScenarioSpec) -> Scenario {
    Scenario::build(s).unwrap()
}

fn metrics_only() -> RunOptions {
    RunOptions { keep_log: false }
}

/// Random Hurwitz matrices of order 1..=6, SPD Q.
fn c1_lyapunov() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut systems = Vec::new();
    while systems.len() < 100 {
        let n = rng.random_range(1..=6);
        let mut a = Mat::from_fn(n, n, |_, _| rng.random_range(-3.0..3.0));
        let shift = matcore::max_real_eig(&a) + rng.random_range(0.1..2.0);
        for i in 0..n {
            a[(i, i)] -= shift;
        }
        let g = Mat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let q = &g * g.transpose() + Mat::identity(n, n) * 0.5;
        assert!(is_hurwitz(&a));
        systems.push((a, q));
    }
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut spd = true;
    let mut solved = 0;
    for (a, q) in &systems {
        if let Ok(p) = solve_lyapunov(a, q) {
            solved += 1;
            worst = worst.max(lyap_residual(a, &p, q));
            spd &= eig_extrema(&p).map(|(lo, _)| lo > 0.0).unwrap_or(false);
        }
    }
    let el = start.elapsed();
    let pass = solved == 100 && worst <= 1e-9 && spd && el < Duration::from_secs(1);
    Outcome {
        pass,
        detail: format!("solved {solved}/100, max residual {worst:.2e}, all P SPD {spd}, {el:.2?}"),
    }
}

fn c2_passivity() -> Outcome {
    let grid = default_grid();
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["case_a", "case_b", "case_c"] {
        let s = spec(name);
        let mut worst = f64::INFINITY;
        let mut all = true;
        for i in 0..s.agents.a.len() {
            let m = |r: &Vec<Vec<f64>>| Mat::from_row_slice(r.len(), r[0].len(), &r.concat());
            let c = check_positive_real(
                &m(&s.agents.a[i]),
                &m(&s.agents.b[i]),
                &m(&s.agents.c[i]),
                &grid,
            )
            .unwrap();
            all &= c.passive;
            worst = worst.min(c.worst_margin);
        }
        pass &= all;
        parts.push(format!("{name} {} (worst {worst:.2e})", mark(all)));
    }
    let one = Mat::from_element(1, 1, 1.0);
    let scalar = check_positive_real(&one, &one, &one, &grid).unwrap();
    pass &= !scalar.passive;
    parts.push(format!("scalar A=1 rejected {}", mark(!scalar.passive)));
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn c3_case_a(out: &RunOutput, elapsed: Duration) -> Outcome {
    let m = &out.metrics;
    let (ta, te) = m.attack_window;
    let a =
        m.detect_time.is_some_and(|t| t >= ta && t <= ta + 0.05) && m.false_alarm_time.is_none();
    let dwell = spec("case_a").controller.dwell;
    let last_latch = m
        .switches
        .iter()
        .filter(|s| s.1 == 1)
        .map(|s| s.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let release = m
        .switches
        .iter()
        .filter(|s| s.1 == 0 && s.0 >= te)
        .map(|s| s.0)
        .next();
    let b = release.is_some_and(|t| t <= te + dwell + 0.1 && t > last_latch);
    let c = m
        .y_peak_during
        .iter()
        .zip(&m.y_peak_pre)
        .all(|(d, p)| *d <= 10.0 * p);
    let d = m.disagreement_final < 2.0 * m.disagreement_pre_steady;
    let rt = elapsed <= Duration::from_secs(30);
    let peak_ratio = m
        .y_peak_during
        .iter()
        .zip(&m.y_peak_pre)
        .map(|(d, p)| d / p)
        .fold(0.0, f64::max);
    Outcome {
        pass: a && b && c && d && rt,
        detail: format!(
            "(a) detect {:?} {} (b) release {:?} {} (c) max peak ratio {:.3} {} (d) final {:.2e} vs pre {:.2e} {} runtime {:.2?} {}",
            m.detect_time,
            mark(a),
            release,
            mark(b),
            peak_ratio,
            mark(c),
            m.disagreement_final,
            m.disagreement_pre_steady,
            mark(d),
            elapsed,
            mark(rt)
        ),
    }
}

fn c4_zeno(runs: &[(&str, &RunOutput)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, o) in runs {
        let m = &o.metrics;
        let distinct = o.events.windows(2).all(|w| w[1].t > w[0].t);
        let ok = match (m.observed_miet, m.miet_bound_obs) {
            (Some(obs), Some(bound)) => obs >= bound,
            (None, _) => true,
            _ => false,
        } && distinct
            && m.event_count <= m.steps;
        pass &= ok;
        parts.push(format!(
            "{name} {} ({} events, gap {:.1e} >= {:.1e})",
            mark(ok),
            m.event_count,
            m.observed_miet.unwrap_or(f64::NAN),
            m.miet_bound_obs.unwrap_or(f64::NAN)
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn c5_soundness(runs: &[(&str, &RunOutput)]) -> Outcome {
    let bad: usize = runs
        .iter()
        .map(|(_, o)| o.metrics.soundness_violations + o.metrics.eta_negative)
        .sum();
    let steps: usize = runs.iter().map(|(_, o)| o.metrics.steps + 1).sum();
    Outcome {
        pass: bad == 0,
        detail: format!("{bad} violations over {steps} steps in {} runs", runs.len()),
    }
}

fn c6_observer(clean: &Metrics, attacked: &Metrics) -> Outcome {
    let a = clean.xi_final <= 1e-3 && clean.switches.is_empty();
    let sup = attacked.xi_sup_after.unwrap_or(f64::INFINITY);
    let b = sup <= 1e-2;
    Outcome {
        pass: a && b,
        detail: format!(
            "(a) no-attack final |xi| {:.2e} (delta switches {}) {} (b) attack sup |xi| after t_a+0.2 {:.3e} vs 1e-2 {}",
            clean.xi_final,
            clean.switches.len(),
            mark(a),
            sup,
            mark(b)
        ),
    }
}

fn c7_estimation(base: &Metrics, slow: &Metrics) -> Outcome {
    let (be, phi) = (
        base.b_estimation_sup_error.unwrap_or(f64::INFINITY),
        base.phi_obs.unwrap_or(0.0),
    );
    let a = be <= phi;
    let ratio = slow.estimation_sup_error.unwrap_or(f64::NAN)
        / base.estimation_sup_error.unwrap_or(f64::NAN);
    let b = (1.5..=2.5).contains(&ratio);
    Outcome {
        pass: a && b,
        detail: format!(
            "(a) sup |B(uah-ua)| {be:.3} vs psi_obs*t_d*|B| {phi:.3} (psi_obs {:.1}) {} (b) sup |uah-ua| t_d 0.02 / 0.01 = {:.3} / {:.3} = {ratio:.3} {}",
            base.psi_obs.unwrap_or(f64::NAN),
            mark(a),
            slow.estimation_sup_error.unwrap_or(f64::NAN),
            base.estimation_sup_error.unwrap_or(f64::NAN),
            mark(b)
        ),
    }
}

fn c8_ring(ks: &[f64], outs: &[Metrics], elapsed: Duration) -> Outcome {
    let eps: Vec<f64> = outs.iter().map(|m| m.epsilon_o_observed).collect();
    let mono = eps.windows(2).all(|w| w[1] <= w[0]);
    let rt = elapsed <= Duration::from_secs(60);
    let pairs: Vec<String> = ks
        .iter()
        .zip(&eps)
        .map(|(k, e)| format!("K={k}: {e:.4}"))
        .collect();
    Outcome {
        pass: mono && rt,
        detail: format!(
            "eps_o {} non-increasing {} total {elapsed:.2?} {}",
            pairs.join(", "),
            mark(mono),
            mark(rt)
        ),
    }
}

fn c9_density(a: &Metrics, c: &Metrics) -> Outcome {
    Outcome {
        pass: c.event_count > a.event_count,
        detail: format!(
            "case_c {} events vs case_a {} (same dt, duration, c, d, c1, c2, eps)",
            c.event_count, a.event_count
        ),
    }
}

fn c10_oracle(out: &RunOutput) -> Outcome {
    let setup = support::oracle::setup();
    let rows = support::oracle::simulate(&setup);
    let log = &out.log;
    assert_eq!(log.rows(), rows.len(), "two_integrator must log every step");
    let mut dev = 0.0f64;
    let mut flag_mismatch = 0;
    for (r, o) in rows.iter().enumerate() {
        assert!((log.t[r] - o.t).abs() < 1e-12);
        let eng = log
            .y_row(r)
            .iter()
            .chain(log.x_hat_row(r))
            .chain(log.u_row(r))
            .chain([&log.eta[r]]);
        let orc = o.y.iter().chain(&o.xh).chain(&o.u).chain([&o.eta]);
        for (a, b) in eng.zip(orc) {
            dev = dev.max((a - b).abs());
        }
        flag_mismatch += (log.event[r] == 1) as usize ^ o.event as usize;
    }
    let n_ev = rows.iter().filter(|r| r.event).count();
    Outcome {
        pass: dev <= 1e-6,
        detail: format!("max |engine - oracle| {dev:.2e} over {} rows; events {} vs {n_ev}, flag mismatches {flag_mismatch}", rows.len(), out.events.len()),
    }
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mk = |sub: &str| seccons::RunArgs {
        scenario: "case_a".into(),
        out: dir.path().join(sub),
        sets: vec!["sim.duration=1".into()],
        sweep: None,
        seed: Some(5),
    };
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let c1 = seccons::cmd_run(&mk("a"), &mut o, &mut e);
    let c2 = seccons::cmd_run(&mk("b"), &mut o, &mut e);
    let a = std::fs::read(dir.path().join("a/trajectory.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/trajectory.csv")).unwrap();
    let same = c1 == 0 && c2 == 0 && a == b;
    Outcome {
        pass: same,
        detail: format!(
            "exit {c1}/{c2}, {} vs {} bytes, identical {}",
            a.len(),
            b.len(),
            a == b
        ),
    }
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Outcome {
            pass: false,
            detail: format!("panicked: {}", msg.unwrap_or_default()),
        }
    })
}

fn main() {
    let started = Instant::now();

    // Case A alone, to time it
    let case_a_sc = build(&spec("case_a"));
    let t0 = Instant::now();
    let case_a = run_with(&case_a_sc, metrics_only()).unwrap();
    let case_a_time = t0.elapsed();

    let mut clean = spec("case_a");
    clean.attack.kind = AttackKindSpec::Zero;
    let mut slow = spec("case_a");
    slow.observer.t_d = 0.02;
    let others: Vec<&str> = NAMES.iter().copied().filter(|n| *n != "case_a").collect();
    let mut batch: Vec<Scenario> = others.iter().map(|n| build(&spec(n))).collect();
    batch.push(build(&clean));
    batch.push(build(&slow));
    let mut res = run_batch(&batch, RunOptions::default())
        .into_iter()
        .map(|r| r.unwrap());
    let named: Vec<(&str, RunOutput)> = others.iter().map(|n| (*n, res.next().unwrap())).collect();
    let clean_out = res.next().unwrap();
    let slow_out = res.next().unwrap();
    let get = |n: &str| &named.iter().find(|(m, _)| *m == n).unwrap().1;

    let ks = [1.0, 2.0, 4.0, 8.0];
    let rings: Vec<Scenario> = ks
        .iter()
        .map(|&k| {
            let mut s = spec("ring_balanced");
            s.controller.k = k;
            build(&s)
        })
        .collect();
    let t0 = Instant::now();
    let ring_out: Vec<Metrics> = run_batch(&rings, metrics_only())
        .into_iter()
        .map(|r| r.unwrap().metrics)
        .collect();
    let ring_time = t0.elapsed();

    let mut all: Vec<(&str, &RunOutput)> = vec![("case_a", &case_a)];
    all.extend(named.iter().map(|(n, o)| (*n, o)));

    let results: Vec<(&str, &str, Outcome)> = vec![
        (
            "1",
            "Lyapunov solver on 100 random Hurwitz systems",
            guarded(c1_lyapunov),
        ),
        (
            "2",
            "positive-real verdicts for the three case studies",
            guarded(c2_passivity),
        ),
        (
            "3",
            "case_a detection, release, boundedness, reconvergence",
            guarded(|| c3_case_a(&case_a, case_a_time)),
        ),
        (
            "4",
            "positive inter-event times in every built-in",
            guarded(|| c4_zeno(&all)),
        ),
        (
            "5",
            "event-condition soundness and eta >= 0",
            guarded(|| c5_soundness(&all)),
        ),
        (
            "6",
            "observer error bounds",
            guarded(|| c6_observer(&clean_out.metrics, &case_a.metrics)),
        ),
        (
            "7",
            "attack-estimate error bounds",
            guarded(|| c7_estimation(&case_a.metrics, &slow_out.metrics)),
        ),
        (
            "8",
            "ring disagreement vs K",
            guarded(|| c8_ring(&ks, &ring_out, ring_time)),
        ),
        (
            "9",
            "event density case_c vs case_a",
            guarded(|| c9_density(&case_a.metrics, &get("case_c").metrics)),
        ),
        (
            "10",
            "two-integrator run vs brute-force oracle",
            guarded(|| c10_oracle(get("two_integrator"))),
        ),
        (
            "11",
            "byte-identical trajectory.csv on repeat",
            guarded(c11_determinism),
        ),
    ];

    println!("acceptance ({:.1?} total)", started.elapsed());
    let mut failed = 0;
    for (id, what, o) in &results {
        println!(
            "[{}] {id:>2} {what}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += !o.pass as usize;
    }
    println!(
        "{} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
