//! Command-line front end: `run` a scenario to a frame trace or `inspect`
//! its duration.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dsl::Seconds;
use crate::exec::{run_fps, Terminal};
use crate::inspect::{duration, max_duration};
use crate::script::{load_scenario, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INSPECT: i32 = 2;
pub const EXIT_OUT_OF_TIME: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "microanim", version, about = "Run and inspect animation scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Step a scenario at a fixed frame rate and print its frame trace.
    Run {
        scenario: PathBuf,
        #[arg(long, default_value_t = 60.0)]
        fps: f64,
        #[arg(long = "max-time", default_value_t = 60.0)]
        max_time: f64,
        /// Trace destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Statically compute a scenario's duration.
    Inspect {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Duration)]
        mode: Mode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Duration,
    Max,
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let path = match &cli.command {
        Command::Run { scenario, .. } | Command::Inspect { scenario, .. } => scenario,
    };
    let scenario = match std::fs::read(path)
        .map_err(|e| e.to_string())
        .and_then(|bytes| load_scenario(&bytes).map_err(|e| e.to_string()))
    {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    match cli.command {
        Command::Run {
            fps, max_time, out, ..
        } => match out {
            None => cmd_run(&scenario, fps, max_time, stdout, stderr),
            Some(out) => match File::create(&out) {
                Ok(file) => {
                    let mut w = BufWriter::new(file);
                    let code = cmd_run(&scenario, fps, max_time, &mut w, stderr);
                    match w.flush() {
                        Ok(()) => code,
                        Err(e) => {
                            let _ = writeln!(stderr, "error: {}: {e}", out.display());
                            EXIT_USAGE
                        }
                    }
                }
                Err(e) => {
                    let _ = writeln!(stderr, "error: {}: {e}", out.display());
                    EXIT_USAGE
                }
            },
        },
        Command::Inspect { mode, .. } => cmd_inspect(&scenario, mode, stdout),
    }
}

/// Writes the JSON-lines frame trace. Exit 0 when the animation completes
/// within `max_time`, 3 when it runs out of time, 4 on a runtime error.
pub fn cmd_run(
    scenario: &Scenario,
    fps: f64,
    max_time: f64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if !(fps.is_finite() && fps > 0.0) {
        let _ = writeln!(err, "error: --fps must be positive, got {fps}");
        return EXIT_USAGE;
    }
    let Ok(max_time) = Seconds::new(max_time) else {
        let _ = writeln!(err, "error: --max-time must be non-negative, got {max_time}");
        return EXIT_USAGE;
    };
    let trace = match run_fps(&scenario.animation, &scenario.state, fps, max_time) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "runtime error: {e}");
            return EXIT_RUNTIME;
        }
    };
    if let Err(e) = trace.write_json_lines(&mut &mut *out) {
        let _ = writeln!(err, "error: writing trace: {e}");
        return EXIT_USAGE;
    }
    match trace.terminal {
        Terminal::Completed { .. } => EXIT_OK,
        Terminal::OutOfTime { .. } => EXIT_OUT_OF_TIME,
    }
}

/// Prints `duration: <s>` or `maxDuration: <s>`; on failure prints the
/// offending node and exits 2.
pub fn cmd_inspect(scenario: &Scenario, mode: Mode, out: &mut dyn Write) -> i32 {
    let result = match mode {
        Mode::Duration => duration(&scenario.animation).map(|d| ("duration", d.get())),
        Mode::Max => max_duration(&scenario.animation).map(|d| ("maxDuration", d.get())),
    };
    match result {
        Ok((label, s)) => {
            let _ = writeln!(out, "{label}: {}", format_seconds(s));
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(out, "inspect error: {} at node {}", e.kind, e.node_path_string());
            EXIT_INSPECT
        }
    }
}

/// Always shows a fractional part: `1.0`, `0.5`, `2.25`.
pub fn format_seconds(s: f64) -> String {
    format!("{s:?}")
}
