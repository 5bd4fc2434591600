//! Command-line driver for `dotsim`: config parsing, subcommands and artifacts.

pub mod config;
pub mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use dotsim_core::qca::truth_table;
use dotsim_core::{
    bench_formulations, cell_from_trajectory, compare_formulations, integrate, localization_degree, polarization,
    settled_window, sweep, Dot, Netlist, QcaCellState, Trajectory,
};
use serde_json::json;
use thiserror::Error;

pub use config::{parse_config, Command, ConfigError, ControlSpec, RunConfig};

pub const TRAJECTORY_HEADER: [&str; 9] = ["t", "p_left", "p_right", "alpha", "phi", "re_aL", "im_aL", "re_aR", "im_aR"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] dotsim_core::Error),
    #[error("netlist {path}: {msg}")]
    Netlist { path: String, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for configuration, 3 for numerical failure, 4 for netlist problems.
    pub fn exit_code(&self) -> i32 {
        use dotsim_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Netlist { .. } => 4,
            CliError::Core(E::NonFiniteState { .. }) => 3,
            CliError::Core(
                E::NetlistSyntax { .. }
                | E::CycleDetected(_)
                | E::UnassignedInput(_)
                | E::InvalidNetlist(_)
                | E::IndeterminatePolarization { .. },
            ) => 4,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Files produced by a run, written together once the computation succeeds.
#[derive(Default)]
struct Artifacts {
    files: Vec<(PathBuf, Vec<u8>)>,
    log: Vec<String>,
}

impl Artifacts {
    fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((PathBuf::from(name), bytes.into()));
    }

    fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(io_err(&path))?;
            written.push(path);
        }
        write_log(dir, &self.log)?;
        written.push(dir.join("run.log"));
        Ok(written)
    }
}

fn write_log(dir: &Path, lines: &[String]) -> Result<(), CliError> {
    let path = dir.join("run.log");
    let mut text = lines.join("\n");
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))
}

fn json_bytes(value: &impl serde::Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Trajectory as CSV with the fixed header; numbers in shortest round-trip form.
pub fn trajectory_csv(traj: &Trajectory) -> Vec<u8> {
    let header: Vec<String> = TRAJECTORY_HEADER.iter().map(|s| s.to_string()).collect();
    let rows = (0..traj.len()).map(|i| {
        let a = &traj.amplitudes[i];
        [
            traj.times[i],
            traj.p_left[i],
            traj.p_right[i],
            traj.alpha[i],
            traj.phi[i],
            a.left.re,
            a.left.im,
            a.right.re,
            a.right.im,
        ]
        .iter()
        .map(f64::to_string)
        .collect()
    });
    csv_bytes(&header, rows)
}

fn header_lines(cfg: &RunConfig) -> Vec<String> {
    let mut log = vec![format!("dotsim {} {}", cfg.command.name(), env!("CARGO_PKG_VERSION"))];
    log.extend(cfg.log_lines());
    if let Some(sc) = &cfg.scenario {
        let assumed = cfg.resolved.iter().any(|(k, _, s)| k == "omega_drive" && *s == config::Source::Default);
        if assumed {
            log.push(format!(
                "# drive frequency not given: assuming omega/|k| = {}",
                sc.params.omega_drive / sc.params.k.abs()
            ));
        }
        log.push(format!("# steps = {}", sc.step_count()));
    }
    log
}

/// Runs the configured command and writes its artifacts. Returns the paths written.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut art = Artifacts { log: header_lines(cfg), ..Default::default() };
    let outcome = match cfg.command {
        Command::Simulate => cmd_simulate(cfg, &mut art),
        Command::Compare => cmd_compare(cfg, &mut art),
        Command::Bench => cmd_bench(cfg, &mut art),
        Command::Sweep => cmd_sweep(cfg, &mut art),
        Command::Qca => cmd_qca(cfg, &mut art),
    };
    match outcome {
        Ok(()) => {
            art.log.push("# status = ok".into());
            art.write(&cfg.out_dir)
        }
        Err(e) => {
            art.log.push(format!("# status = error (exit {}): {e}", e.exit_code()));
            if fs::create_dir_all(&cfg.out_dir).is_ok() {
                let _ = write_log(&cfg.out_dir, &art.log);
            }
            Err(e)
        }
    }
}

fn scenario(cfg: &RunConfig) -> &dotsim_core::Scenario {
    cfg.scenario.as_ref().expect("config validation guarantees a scenario")
}

fn cmd_simulate(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let sc = scenario(cfg);
    let traj = integrate(sc)?;
    let dot = Dot::initially_occupied(&sc.initial);
    let report = localization_degree(&traj, dot, cfg.window)?;
    let settled_mean_p_left =
        settled_window(&traj).and_then(|w| localization_degree(&traj, Dot::Left, Some(w)).ok()).map(|r| r.mean_p);
    art.log.push(format!("# localization degree = {} on [{}, {}]", report.degree, report.window.0, report.window.1));
    art.log.push(format!("# norm drift = {}", traj.norm_drift));
    art.log.push(format!("# warnings = {}", traj.warnings.len()));
    art.add("trajectory.csv", trajectory_csv(&traj));
    art.add(
        "report.json",
        json_bytes(&json!({
            "formulation": traj.formulation,
            "localization": report,
            "settled_mean_p_left": settled_mean_p_left,
            "norm_drift": traj.norm_drift,
            "steps": traj.steps,
            "rhs_evals": traj.rhs_evals,
            "samples": traj.len(),
            "warnings": traj.warnings,
        })),
    );
    if cfg.emit_svg {
        let series = [
            svg::Series { label: "p_left", x: &traj.times, y: &traj.p_left },
            svg::Series { label: "p_right", x: &traj.times, y: &traj.p_right },
        ];
        art.add("trajectory.svg", svg::line_chart("Dot occupation", "t |k|", "probability", &series));
    }
    Ok(())
}

fn cmd_compare(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let report = compare_formulations(scenario(cfg))?;
    art.log.push(format!("# max |dp_left| = {} at t = {}", report.max_abs_dp, report.at_time));
    art.add("divergence.json", json_bytes(&report));
    Ok(())
}

fn cmd_bench(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let report = bench_formulations(scenario(cfg), cfg.repeats)?;
    for b in [&report.amplitude, &report.angle] {
        art.log.push(format!(
            "# {:?}: dimension {}, {} flops/rhs, median {} s",
            b.formulation, b.real_ode_dimension, b.rhs_flop_estimate, b.wall_time_total
        ));
    }
    art.add("bench.json", json_bytes(&report));
    Ok(())
}

/// Thread count from `DOTSIM_THREADS`; 0 or unset lets rayon decide.
pub fn thread_limit() -> Result<usize, ConfigError> {
    match std::env::var("DOTSIM_THREADS") {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| ConfigError::TypeMismatch {
            key: "DOTSIM_THREADS".into(),
            value: v,
            expected: "a non-negative integer",
        }),
    }
}

fn cmd_sweep(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let threads = thread_limit()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
    art.log.push(format!("# threads = {}", pool.current_num_threads()));
    let result = pool.install(|| sweep(scenario(cfg), &cfg.sweep_axes, cfg.window))?;

    let mut header: Vec<String> = result.axes.iter().map(|a| a.param.name().to_string()).collect();
    header.extend(["degree".into(), "warnings".into()]);
    let rows = result.cells().map(|(coords, degree, warnings)| {
        let mut row: Vec<String> = coords.iter().map(f64::to_string).collect();
        row.push(degree.to_string());
        row.push(warnings.to_string());
        row
    });
    art.add("sweep.csv", csv_bytes(&header, rows));
    art.log.push(format!("# cells = {}", result.cell_count()));

    if cfg.emit_svg {
        let x = &result.axes[0];
        let chart = match result.axes.get(1) {
            Some(y) => svg::heatmap(
                "Localization degree",
                x.param.name(),
                y.param.name(),
                &x.values,
                &y.values,
                &result.degrees,
            ),
            None => {
                let degrees: Vec<f64> = result.degrees.iter().map(|r| r[0]).collect();
                let series = [svg::Series { label: "degree", x: &x.values, y: &degrees }];
                svg::line_chart("Localization degree", x.param.name(), "degree", &series)
            }
        };
        art.add("sweep.svg", chart);
    }
    Ok(())
}

fn cmd_qca(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), CliError> {
    let q = cfg.qca.as_ref().expect("config validation guarantees qca settings");
    let netlist_err = |msg: String| CliError::Netlist { path: q.netlist.display().to_string(), msg };
    let text = fs::read_to_string(&q.netlist).map_err(|e| netlist_err(e.to_string()))?;
    let netlist: Netlist = text.parse().map_err(|e: dotsim_core::Error| netlist_err(e.to_string()))?;
    if !netlist.input_ids().any(|id| id == q.control_node) {
        return Err(netlist_err(format!("control node `{}` is not an input cell", q.control_node)));
    }

    let cell = match q.control {
        ControlSpec::Bit(bit) => QcaCellState::localized(bit, q.eta, q.tau_d)?,
        ControlSpec::Trajectory => {
            let traj = integrate(scenario(cfg))?;
            cell_from_trajectory(&traj, q.eta, q.tau_d)?
        }
    };
    art.log.push(format!("# control polarization = {}", polarization(&cell)));

    let rows = truth_table(&netlist, Some((q.control_node.as_str(), &cell)), q.p_threshold)?;
    let mut header: Vec<String> = netlist.input_ids().filter(|id| *id != q.control_node).map(String::from).collect();
    header.extend(netlist.probe_ids().map(String::from));
    let body = rows.iter().map(|r| r.inputs.iter().chain(&r.outputs).map(|(_, b)| b.to_string()).collect::<Vec<_>>());
    art.add("truthtable.csv", csv_bytes(&header, body));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        use dotsim_core::Error as E;
        assert_eq!(CliError::from(ConfigError::UnknownKey("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(E::NonFiniteState { t: 1.0 }).exit_code(), 3);
        assert_eq!(CliError::from(E::CycleDetected("m".into())).exit_code(), 4);
        assert_eq!(CliError::from(E::InvalidParameter("k".into())).exit_code(), 2);
    }

    #[test]
    fn csv_uses_round_trip_numbers() {
        let bytes = csv_bytes(&["x".into()], [vec![0.1f64.to_string()], vec![(1.0f64 / 3.0).to_string()]]);
        let text = String::from_utf8(bytes).unwrap();
        let values: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
        assert_eq!(values, [0.1, 1.0 / 3.0]);
    }
}
