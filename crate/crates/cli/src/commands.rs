use std::io::Write;
use std::path::{Path, PathBuf};

use engine::{run_batch, RunOptions, RunOutput, Scenario, ScenarioSpec};
use matcore::{check_positive_real, default_grid};
use plant::AgentModel;

use crate::builtin;
use crate::error::{CliError, EXIT_NOT_PASSIVE, EXIT_OK};
use crate::file;
use crate::output;

#[derive(Debug, Clone, Default)]
pub struct RunArgs {
    pub scenario: String,
    pub out: PathBuf,
    pub sets: Vec<String>,
    pub sweep: Option<String>,
    pub seed: Option<u64>,
}

/// Parses `param=v1,v2,...`.
pub fn parse_sweep(arg: &str) -> Result<(String, Vec<String>), CliError> {
    let bad = |msg: &str| CliError::Sweep {
        arg: arg.to_string(),
        msg: msg.to_string(),
    };
    let (key, vals) = arg
        .split_once('=')
        .ok_or_else(|| bad("expected param=v1,v2,..."))?;
    let vals: Vec<String> = vals
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if key.trim().is_empty() || vals.is_empty() {
        return Err(bad("expected param=v1,v2,..."));
    }
    Ok((key.trim().to_string(), vals))
}

fn report(err: &mut dyn Write, e: &CliError) -> i32 {
    let _ = writeln!(err, "error: {e}");
    e.exit_code()
}

fn summary(w: &mut dyn Write, sc: &Scenario, out: &RunOutput) {
    let m = &out.metrics;
    let f = |v: Option<f64>| {
        v.map(|x| format!("{x:.5}"))
            .unwrap_or_else(|| "none".into())
    };
    let _ = writeln!(
        w,
        "{}: events={} detect={} release={} false_alarm={} eps_o={:.3e} final_disagreement={:.3e}",
        sc.spec.name,
        m.event_count,
        f(m.detect_time),
        f(m.release_time),
        f(m.false_alarm_time),
        m.epsilon_o_observed,
        m.disagreement_final
    );
}

fn notes(err: &mut dyn Write, sc: &Scenario, out: Option<&RunOutput>) {
    for a in &sc.advisories {
        let _ = writeln!(err, "advisory: {a}");
    }
    if let Some(o) = out {
        for w in &o.metrics.warnings {
            let _ = writeln!(err, "warning: {w}");
        }
    }
}

fn single(
    args: &RunArgs,
    spec: ScenarioSpec,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let sc = Scenario::build(&spec)?;
    let mut res = engine::run(&sc)?;
    res.header.scenario_hash = output::scenario_hash(&spec);
    notes(err, &sc, Some(&res));
    output::write_outputs(&args.out, &spec, &sc, &res)?;
    summary(out, &sc, &res);
    Ok(())
}

fn sweep(
    args: &RunArgs,
    base: ScenarioSpec,
    arg: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let (key, vals) = parse_sweep(arg)?;
    let mut specs = Vec::new();
    let mut scs = Vec::new();
    for v in &vals {
        let spec = file::apply_overrides(&base, &[format!("{key}={v}")])?;
        scs.push(Scenario::build(&spec)?);
        specs.push(spec);
    }
    let results = run_batch(&scs, RunOptions::default());
    let mut table = String::from("value,event_count,detect_time,release_time,epsilon_o_observed,disagreement_final,estimation_sup_error,status\n");
    let mut code = EXIT_OK;
    for (((v, spec), sc), res) in vals.iter().zip(&specs).zip(&scs).zip(results) {
        let dir = args.out.join(format!("{key}={v}"));
        let o = |x: Option<f64>| x.map(|y| y.to_string()).unwrap_or_default();
        match res {
            Ok(mut r) => {
                r.header.scenario_hash = output::scenario_hash(spec);
                notes(err, sc, Some(&r));
                output::write_outputs(&dir, spec, sc, &r)?;
                summary(out, sc, &r);
                let m = &r.metrics;
                table += &format!(
                    "{v},{},{},{},{},{},{},ok\n",
                    m.event_count,
                    o(m.detect_time),
                    o(m.release_time),
                    m.epsilon_o_observed,
                    m.disagreement_final,
                    o(m.estimation_sup_error)
                );
            }
            Err(e) => {
                let e = CliError::from(e);
                let _ = writeln!(err, "error: {key}={v}: {e}");
                code = code.max(e.exit_code());
                table += &format!("{v},,,,,,,diverged\n");
            }
        }
    }
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let p = args.out.join("sweep.csv");
    std::fs::write(&p, table).map_err(|e| CliError::io(&p, e))?;
    Ok(code)
}

/// 0 ok, 2 validation, 3 divergence.
pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let spec = match file::load(&args.scenario, args.seed, &args.sets) {
        Ok(s) => s,
        Err(e) => return report(err, &e),
    };
    let res = match &args.sweep {
        Some(arg) => sweep(args, spec, arg, out, err),
        None => single(args, spec, out, err).map(|_| EXIT_OK),
    };
    match res {
        Ok(code) => code,
        Err(e) => report(err, &e),
    }
}

/// Per-agent positive-real verdicts. 0 all passive, 4 otherwise, 2 on parse errors.
pub fn cmd_check_passivity(
    scenario: &str,
    seed: Option<u64>,
    sets: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let spec = match file::load(scenario, seed, sets) {
        Ok(s) => s,
        Err(e) => return report(err, &e),
    };
    let grid = default_grid();
    let ag = &spec.agents;
    if ag.a.len() != ag.b.len() || ag.a.len() != ag.c.len() {
        let e = CliError::Agent {
            agent: 0,
            msg: format!(
                "{} A, {} B and {} C matrices",
                ag.a.len(),
                ag.b.len(),
                ag.c.len()
            ),
        };
        return report(err, &e);
    }
    let mut all = true;
    for i in 0..ag.a.len() {
        let m = |r: &engine::spec::Rows| -> Result<matcore::Mat, CliError> {
            let c = r.first().map(|x| x.len()).unwrap_or(0);
            if r.is_empty() || c == 0 || r.iter().any(|x| x.len() != c) {
                return Err(CliError::Agent {
                    agent: i + 1,
                    msg: "ragged or empty matrix".into(),
                });
            }
            Ok(matcore::Mat::from_row_slice(r.len(), c, &r.concat()))
        };
        let agent = m(&ag.a[i])
            .and_then(|a| Ok((a, m(&ag.b[i])?, m(&ag.c[i])?)))
            .and_then(|(a, b, c)| {
                AgentModel::new(a, b, c).map_err(|e| CliError::Agent {
                    agent: i + 1,
                    msg: e.to_string(),
                })
            });
        let agent = match agent {
            Ok(a) => a,
            Err(e) => return report(err, &e),
        };
        let cert = match check_positive_real(&agent.a, &agent.b, &agent.c, &grid) {
            Ok(c) => c,
            Err(e) => {
                return report(
                    err,
                    &CliError::Agent {
                        agent: i + 1,
                        msg: e.to_string(),
                    },
                )
            }
        };
        all &= cert.passive;
        let mut line = format!(
            "agent {}: {} worst_margin={:.6e} at omega={:.6e}",
            i + 1,
            if cert.passive {
                "passive"
            } else {
                "NOT passive"
            },
            cert.worst_margin,
            cert.worst_omega
        );
        if cert.lossless_boundary {
            line += &format!(" lossless_boundary skipped={}", cert.skipped.len());
        }
        let _ = writeln!(out, "{line}");
    }
    if all {
        EXIT_OK
    } else {
        EXIT_NOT_PASSIVE
    }
}

/// Built-ins, then `*.toml` files from `dir` if given.
pub fn cmd_list_scenarios(dir: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    for name in builtin::NAMES {
        let _ = writeln!(out, "{name:<16} {}", builtin::describe(name));
    }
    let Some(dir) = dir else { return EXIT_OK };
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(err, "note: {}: {e}", dir.display());
            return EXIT_OK;
        }
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    for p in files {
        let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("?");
        let _ = writeln!(out, "{stem:<16} {}", p.display());
    }
    EXIT_OK
}
