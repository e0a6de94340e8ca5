use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use affine_flow::diagnostics::{ellipticity, monotone_monitors, MonitorReport};
use affine_flow::record::{write_csv, CSV_COLUMNS};
use affine_flow::{
    center_on_extinction_point, make_ellipse, make_random_body, ConvexBody, FlowStatus,
    FunctionalRecord, RunOptions, RunOutput, SupportFunction,
};
use serde::Serialize;

use crate::config::{BodyConfig, ExperimentConfig, CONFIG_VERSION};

const EXIT_VIOLATED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_FLOW_FAILED: u8 = 3;

#[derive(Serialize)]
struct Summary {
    config_version: i64,
    status: String,
    #[serde(rename = "T_est")]
    t_est: Option<f64>,
    final_t: f64,
    steps: u64,
    final_area: f64,
    final_ellipticity: f64,
    /// Translation applied before the run when recentering.
    shift: Option<[f64; 2]>,
    monitors: Vec<MonitorReport>,
}

fn build_body(cfg: &ExperimentConfig) -> affine_flow::Result<ConvexBody> {
    match &cfg.body {
        BodyConfig::Ellipse { a, b, rot } => make_ellipse(*a, *b, *rot, cfg.grid),
        BodyConfig::Random(spec) => make_random_body(spec, cfg.grid),
        BodyConfig::File(path) => ConvexBody::new(SupportFunction::load(path)?),
    }
}

/// Same columns as the CSV, whitespace separated with a `#` header line.
fn write_plot_data(records: &[FunctionalRecord], path: &Path) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {}", CSV_COLUMNS.join(" "))?;
    for r in records {
        let row: Vec<String> = r.values().iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    w.flush()
}

fn at(path: &Path) -> impl Fn(&dyn std::fmt::Display) -> String + '_ {
    move |e| format!("{}: {e}", path.display())
}

fn write_outputs(cfg: &ExperimentConfig, out: &RunOutput, summary: &Summary) -> Result<(), String> {
    let o = &cfg.output;
    for path in [o.trajectory_path(), o.summary_path()]
        .into_iter()
        .chain(o.plot_path())
    {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| at(parent)(&e))?;
        }
    }
    let path = o.trajectory_path();
    let file = File::create(&path).map_err(|e| at(&path)(&e))?;
    write_csv(&out.trajectory, BufWriter::new(file)).map_err(|e| at(&path)(&e))?;
    if let Some(path) = o.plot_path() {
        write_plot_data(&out.trajectory, &path).map_err(|e| at(&path)(&e))?;
    }
    let path = o.summary_path();
    let json = serde_json::to_string_pretty(summary).map_err(|e| e.to_string())?;
    fs::write(&path, json + "\n").map_err(|e| at(&path)(&e))?;
    Ok(())
}

pub fn simulate(config_path: &Path) -> ExitCode {
    let cfg = match ExperimentConfig::load(config_path) {
        Ok(c) => c,
        Err(errors) => {
            eprintln!("config error in {}:\n{errors}", config_path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut body = match build_body(&cfg) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("config error in {}:\nbody: {e}", config_path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut shift = None;
    if cfg.recenter {
        match center_on_extinction_point(&body, &cfg.controller) {
            Ok((centered, p)) => {
                body = centered;
                shift = Some([-p[0], -p[1]]);
            }
            Err(e) => {
                eprintln!("flow failed while locating the extinction point: {e}");
                return ExitCode::from(EXIT_FLOW_FAILED);
            }
        }
    }
    let opts = RunOptions {
        record_every: cfg.record_every,
        monitors: cfg.monitors.clone(),
        ..RunOptions::default()
    };
    let out = match affine_flow::run(body, &cfg.controller, &opts) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let mut monitors = if out.trajectory.len() >= 2 {
        monotone_monitors(&out.trajectory, cfg.monitor_tolerance).unwrap_or_default()
    } else {
        Vec::new()
    };
    monitors.extend(out.pointwise.iter().cloned());
    let state = &out.final_state;
    let (status, t_est) = match state.status {
        FlowStatus::Extinct { t_est } => ("extinct".to_string(), Some(t_est)),
        FlowStatus::Failed(reason) => (format!("failed: {reason:?}"), None),
        FlowStatus::Running => ("running: step limit reached".to_string(), None),
    };
    let summary = Summary {
        config_version: CONFIG_VERSION,
        status,
        t_est,
        final_t: state.t,
        steps: state.steps,
        final_area: state.body.area(),
        final_ellipticity: ellipticity(&state.body),
        shift,
        monitors,
    };
    if let Err(e) = write_outputs(&cfg, &out, &summary) {
        eprintln!("cannot write outputs: {e}");
        return ExitCode::from(1);
    }

    println!("status: {}", summary.status);
    if let Some(t) = summary.t_est {
        println!("T_est: {t:.12}");
    }
    println!("final ellipticity: {:.3e}", summary.final_ellipticity);
    let mut violated = false;
    for m in &summary.monitors {
        println!("monitor {}: {:?}", m.name, m.verdict);
        violated |= m.verdict.is_violated();
    }
    println!("wrote {}", cfg.output.summary_path().display());

    if !matches!(state.status, FlowStatus::Extinct { .. }) {
        ExitCode::from(EXIT_FLOW_FAILED)
    } else if violated {
        ExitCode::from(EXIT_VIOLATED)
    } else {
        ExitCode::SUCCESS
    }
}
