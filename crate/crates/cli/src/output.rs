//! trajectory.csv, events.csv, metrics.txt, metrics.json.

use std::fmt::Write as _;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use engine::{EventRecord, LogHeader, Metrics, RunOutput, Scenario, ScenarioSpec};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::file;

pub fn scenario_hash(spec: &ScenarioSpec) -> String {
    let digest = Sha256::digest(file::serialize(spec).as_bytes());
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn list(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "none".into())
}

pub fn header_comment(h: &LogHeader) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# scenario={} hash={} seed={}",
        h.name, h.scenario_hash, h.seed
    );
    let _ = writeln!(s, "# dt={} duration={} t_d={}", h.dt, h.duration, h.t_d);
    let _ = writeln!(
        s,
        "# alpha={} beta={} gamma={} phi={} omega={} sigma_apriori={} tau_apriori={}",
        h.alpha,
        h.beta,
        h.gamma,
        h.phi,
        h.omega,
        opt(h.sigma_apriori),
        opt(h.tau_apriori)
    );
    let _ = writeln!(
        s,
        "# attack_window={} {}",
        h.attack_window.0, h.attack_window.1
    );
    let _ = writeln!(s, "# attack_amp={}", list(&h.attack_amp));
    let _ = writeln!(s, "# attack_freq={}", list(&h.attack_freq));
    let _ = writeln!(s, "# x0={}", list(&h.x0));
    s
}

fn block_names(prefix: &str, agents: usize, width: usize) -> Vec<String> {
    (1..=agents)
        .flat_map(|i| {
            (1..=width).map(move |k| {
                if width == 1 {
                    format!("{prefix}_{i}")
                } else {
                    format!("{prefix}_{i}_{k}")
                }
            })
        })
        .collect()
}

pub fn trajectory_columns(sc: &Scenario) -> Vec<String> {
    let n = sc.model.n_agents();
    let p = sc.model.p;
    let mut cols = vec!["t".to_string()];
    cols.extend(block_names("y", n, p));
    for (i, a) in sc.model.agents.iter().enumerate() {
        cols.extend((1..=a.states()).map(|k| format!("xhat_{}_{k}", i + 1)));
    }
    cols.extend(["eta", "e_norm", "delta", "margin"].map(String::from));
    cols.extend(block_names("u", n, p));
    cols.extend(block_names("ua", n, p));
    cols.extend(block_names("uah", n, p));
    cols.push("event".into());
    cols
}

fn push(line: &mut String, vals: &[f64]) {
    for v in vals {
        let _ = write!(line, ",{v:e}");
    }
}

pub fn write_trajectory<W: Write>(w: W, sc: &Scenario, out: &RunOutput) -> io::Result<()> {
    let mut w = BufWriter::new(w);
    let log = &out.log;
    w.write_all(header_comment(&out.header).as_bytes())?;
    writeln!(w, "{}", trajectory_columns(sc).join(","))?;
    let mut line = String::new();
    for r in 0..log.rows() {
        line.clear();
        let _ = write!(line, "{:e}", log.t[r]);
        push(&mut line, log.y_row(r));
        push(&mut line, log.x_hat_row(r));
        push(&mut line, &[log.eta[r], log.e_norm[r]]);
        let _ = write!(line, ",{},{:e}", log.delta[r], log.margin[r]);
        push(&mut line, log.u_row(r));
        push(&mut line, log.ua_row(r));
        push(&mut line, log.uah_row(r));
        let _ = writeln!(line, ",{}", log.event[r]);
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

pub fn write_events<W: Write>(
    w: W,
    header: &LogHeader,
    n_agents: usize,
    events: &[EventRecord],
) -> io::Result<()> {
    let mut w = BufWriter::new(w);
    w.write_all(header_comment(header).as_bytes())?;
    let mut cols = vec!["t".to_string(), "e_norm".into()];
    cols.extend((1..=n_agents).map(|i| format!("e_{i}")));
    cols.extend(
        [
            "eta",
            "trigger_lhs",
            "trigger_rhs",
            "storage_lhs",
            "storage_rhs",
            "storage_rhs_abs",
            "violated",
            "violated_abs",
        ]
        .map(String::from),
    );
    writeln!(w, "{}", cols.join(","))?;
    for ev in events {
        write!(w, "{:e},{:e}", ev.t, ev.e_norm)?;
        for e in &ev.e_agents {
            write!(w, ",{e:e}")?;
        }
        let b = &ev.bound;
        writeln!(
            w,
            ",{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
            ev.eta, ev.lhs, ev.rhs, b.lhs, b.rhs, b.rhs_abs, b.violated as u8, b.violated_abs as u8
        )?;
    }
    w.flush()
}

pub fn metrics_json(m: &Metrics, header: &LogHeader) -> serde_json::Value {
    let mut v = serde_json::to_value(m).expect("metrics serialise");
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("scenario".into(), header.name.clone().into());
        map.insert("scenario_hash".into(), header.scenario_hash.clone().into());
        map.insert("seed".into(), header.seed.into());
    }
    v
}

fn flat(v: &serde_json::Value) -> String {
    use serde_json::Value as V;
    match v {
        V::Null => "none".into(),
        V::String(s) => s.clone(),
        V::Array(a) => a.iter().map(flat).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// One `key=value` line per metric; lists are space separated.
pub fn metrics_text(json: &serde_json::Value) -> String {
    let mut s = String::new();
    if let serde_json::Value::Object(map) = json {
        for (k, v) in map {
            let _ = writeln!(s, "{k}={}", flat(v));
        }
    }
    s
}

fn create(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::create(path).map_err(|e| CliError::io(path, e))
}

/// Writes the four outputs plus the materialised scenario into `dir`.
pub fn write_outputs(
    dir: &Path,
    spec: &ScenarioSpec,
    sc: &Scenario,
    out: &RunOutput,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let p = dir.join("trajectory.csv");
    write_trajectory(create(&p)?, sc, out).map_err(|e| CliError::io(&p, e))?;
    let p = dir.join("events.csv");
    write_events(create(&p)?, &out.header, sc.model.n_agents(), &out.events)
        .map_err(|e| CliError::io(&p, e))?;
    let json = metrics_json(&out.metrics, &out.header);
    let p = dir.join("metrics.json");
    std::fs::write(
        &p,
        serde_json::to_string_pretty(&json).expect("json") + "\n",
    )
    .map_err(|e| CliError::io(&p, e))?;
    let p = dir.join("metrics.txt");
    std::fs::write(&p, metrics_text(&json)).map_err(|e| CliError::io(&p, e))?;
    let p = dir.join("scenario.toml");
    std::fs::write(&p, file::serialize(spec)).map_err(|e| CliError::io(&p, e))?;
    Ok(())
}
