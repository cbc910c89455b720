//! Workspace files, command dispatch and reports for the `homotopy` binary.

pub mod error;
pub mod model;
pub mod report;
pub mod run;
pub mod workspace;

use std::path::Path;

pub use error::CliError;
pub use model::{LoadOptions, Model};
pub use report::{Record, RunReport, Status};
pub use run::{parse_env_bounds, run_scenario, Flags};
pub use workspace::{Bounds, WorkspaceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub flags: Flags,
    pub env: Bounds,
    pub scenarios: Vec<String>,
    pub format: Format,
    pub parallel: bool,
    pub timing: bool,
}

/// Runs `scenarios` on worker threads when `parallel` is set. Reports come back in the
/// order of `scenarios` either way.
pub fn run_many(model: &Model, scenarios: &[String], command: Option<&str>, opts: &Options) -> Vec<RunReport> {
    if !opts.parallel || scenarios.len() < 2 {
        return scenarios.iter().map(|s| run_scenario(model, s, command, &opts.flags, &opts.env)).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios.iter().map(|s| scope.spawn(move || run_scenario(model, s, command, &opts.flags, &opts.env))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    })
}

/// Loads `path` and runs `command` (`"suite"` runs each scenario's own command). Returns
/// the rendered output and the exit code.
pub fn execute(command: &str, path: &Path, opts: &Options) -> (String, i32) {
    let error = |e: CliError| match opts.format {
        Format::Machine => {
            let line = serde_json::json!({ "record": "error", "code": e.code(), "message": e.to_string() });
            (format!("{line}\n"), 1)
        }
        Format::Text => (format!("error: {e}\n"), 1),
    };
    let suite = command == "suite";
    if !suite && !run::is_command(command) {
        return error(CliError::UnknownCommand(command.into()));
    }
    let model = match WorkspaceFile::read(path).and_then(|f| Model::load(&f, LoadOptions { topological: opts.flags.topological })) {
        Ok(m) => m,
        Err(e) => return error(e),
    };
    let scenarios: Vec<String> = if opts.scenarios.is_empty() {
        model.scenarios.iter().filter(|(_, s)| suite || s.command == command).map(|(n, _)| n.clone()).collect()
    } else {
        opts.scenarios.clone()
    };
    if scenarios.is_empty() {
        return error(CliError::validation("scenarios", format!("no scenario runs {command:?}")));
    }
    let reports = run_many(&model, &scenarios, (!suite).then_some(command), opts);
    let mut out = String::new();
    let mut status = Status::Ok;
    for r in &reports {
        status = status.combine(r.status);
        out.push_str(&match opts.format {
            Format::Machine => r.render_machine(opts.timing),
            Format::Text => r.render_text(opts.timing),
        });
    }
    (out, status.exit_code())
}
