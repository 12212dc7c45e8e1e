//! Command implementations shared by the binary and the integration tests.
//!
//! Each command returns the process exit code together with the rendered
//! report. Exit codes mirror verdicts so shell pipelines can branch without
//! parsing: 0 stable/decaying, 1 unstable/growing, 2 indeterminate, 64 for
//! file, format, or configuration errors.

use std::fs;
use std::path::Path;

use roesser::certify::{certify, certify_nd, CertifyConfig};
use roesser::lyapunov::{assemble_lmi, Basis};
use roesser::model::DimensionKind;
use roesser::oracle::{check_model_2d, sweep_nd, SweepConfig};
use roesser::sim::{simulate, SimConfig};
use roesser::transfer::boundary_samples;

use crate::model_file::{LoadedModel, ModelFile};
use crate::report;

/// Exit code for usage, parse, and configuration errors.
pub const EXIT_USAGE: i32 = 64;

pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(code: i32, stdout: String) -> Self {
        CommandOutput {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage_error(message: String) -> Self {
        CommandOutput {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: message,
        }
    }
}

fn load(path: &Path) -> Result<(ModelFile, LoadedModel), String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mf = ModelFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let model = mf.to_model().map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((mf, model))
}

pub struct OracleArgs {
    pub file: std::path::PathBuf,
    pub samples: usize,
    pub json: bool,
}

pub fn run_oracle(args: &OracleArgs) -> CommandOutput {
    let (mf, model) = match load(&args.file) {
        Ok(v) => v,
        Err(e) => return CommandOutput::usage_error(e),
    };
    if args.samples < 16 {
        return CommandOutput::usage_error("--samples must be at least 16".to_string());
    }
    let cfg = SweepConfig::with_samples(args.samples);
    let name = mf.name.as_deref();
    let verdict = match &model {
        LoadedModel::TwoD(m) => check_model_2d(m, &cfg),
        LoadedModel::Nd(m) => match sweep_nd(m, &cfg) {
            Ok(v) => v,
            Err(e) => return CommandOutput::usage_error(e.to_string()),
        },
    };
    let code = report::exit_code_oracle(verdict.status);
    let text = if args.json {
        serde_json::to_string_pretty(&report::oracle_json(name, model.n(), &verdict)).unwrap()
    } else {
        report::oracle_text(name, model.n(), &verdict)
    };
    CommandOutput::ok(code, text)
}

pub struct CertifyArgs {
    pub file: std::path::PathBuf,
    pub max_degree: usize,
    /// `None` = auto (monomial for a shift second dimension, moebius for a
    /// derivative one).
    pub basis: Option<Basis>,
    pub samples: usize,
    pub json: bool,
    pub dump_lmi: Option<std::path::PathBuf>,
}

pub fn run_certify(args: &CertifyArgs) -> CommandOutput {
    let (mf, model) = match load(&args.file) {
        Ok(v) => v,
        Err(e) => return CommandOutput::usage_error(e),
    };
    if args.samples < 16 {
        return CommandOutput::usage_error("--samples must be at least 16".to_string());
    }
    let name = mf.name.as_deref();
    if let (Some(Basis::Moebius), LoadedModel::TwoD(m)) = (&args.basis, &model) {
        if m.kind2 != DimensionKind::Derivative {
            return CommandOutput::usage_error(
                "the moebius basis requires a derivative second dimension".to_string(),
            );
        }
    }
    let cfg = CertifyConfig {
        max_degree: args.max_degree,
        basis: args.basis,
        sweep: SweepConfig::with_samples(args.samples),
        ..CertifyConfig::default()
    };
    let rep = match &model {
        LoadedModel::TwoD(m) => certify(m, &cfg),
        LoadedModel::Nd(m) => certify_nd(m, &cfg),
    };
    if let (Some(path), LoadedModel::TwoD(m)) = (&args.dump_lmi, &model) {
        let degree = rep
            .certifying_degree
            .or_else(|| rep.degree_attempts.last().map(|a| a.degree))
            .unwrap_or(0);
        let coarse = boundary_samples(m.kind2, cfg.assembly_samples, cfg.sweep.include_infinity);
        match assemble_lmi(m, degree, rep.basis, &coarse, rep.eps) {
            Ok(asm) => {
                let mut buf = Vec::new();
                if asm.problem.write_sparse(&mut buf).is_ok() {
                    if let Err(e) = fs::write(path, buf) {
                        return CommandOutput::usage_error(format!(
                            "cannot write {}: {e}",
                            path.display()
                        ));
                    }
                }
            }
            Err(e) => {
                return CommandOutput::usage_error(format!("cannot dump problem: {e}"));
            }
        }
    }
    let code = report::exit_code_certify(rep.verdict);
    let text = if args.json {
        serde_json::to_string_pretty(&report::certify_json(name, model.n(), &rep)).unwrap()
    } else {
        report::certify_text(name, model.n(), &rep)
    };
    CommandOutput::ok(code, text)
}

pub struct SimulateArgs {
    pub file: std::path::PathBuf,
    pub grid: (usize, usize),
    pub seed: u64,
    pub trials: usize,
    pub window: usize,
    pub csv: Option<std::path::PathBuf>,
    pub json: bool,
}

pub fn run_simulate(args: &SimulateArgs) -> CommandOutput {
    let (mf, model) = match load(&args.file) {
        Ok(v) => v,
        Err(e) => return CommandOutput::usage_error(e),
    };
    let name = mf.name.as_deref();
    let LoadedModel::TwoD(m) = &model else {
        return CommandOutput::usage_error("simulation supports 2D models only".to_string());
    };
    if args.grid.0 < 10 || args.grid.1 < 10 {
        return CommandOutput::usage_error("--grid must be at least 10x10".to_string());
    }
    if args.trials < 1 || args.window < 2 {
        return CommandOutput::usage_error("--trials must be >= 1 and --window >= 2".to_string());
    }
    let cfg = SimConfig {
        grid: args.grid,
        boundary_seed: args.seed,
        trials: args.trials,
        decay_window: args.window,
    };
    let rep = match simulate(m, &cfg) {
        Ok(r) => r,
        Err(e) => return CommandOutput::usage_error(e.to_string()),
    };
    if let Some(path) = &args.csv {
        // First trial's front curve.
        let mut csv = String::from("d,s\n");
        for (d, s) in rep.curves[0].iter().enumerate() {
            csv.push_str(&format!("{d},{s:?}\n"));
        }
        if let Err(e) = fs::write(path, csv) {
            return CommandOutput::usage_error(format!("cannot write {}: {e}", path.display()));
        }
    }
    let code = report::exit_code_simulate(rep.verdict);
    let text = if args.json {
        serde_json::to_string_pretty(&report::simulate_json(
            name,
            args.grid,
            args.seed,
            args.window,
            &rep,
        ))
        .unwrap()
    } else {
        report::simulate_text(name, args.grid, args.seed, &rep)
    };
    CommandOutput::ok(code, text)
}
