//! `helstrom` command-line front end.

mod config;
mod error;
mod files;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use helstrom::estim::{run_replicated, Experiment};
use helstrom::measure::{attain_check, fisher_info, optimal_measurement, uniform_attainability, Povm, Verdict};
use helstrom::sld::{model_sld, model_sld_closed, SldMethod, SldResult};
use helstrom::DerivativeMethod;
use serde_json::json;

use config::{Args, Command, MethodFlag, RunConfig, Thetas};
use error::CliError;

/// 17 significant digits: enough to reproduce any `f64` exactly.
fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn povm_of(cfg: &RunConfig) -> &Povm {
    cfg.povm.as_ref().expect("validated: command has a POVM")
}

fn theta_of(cfg: &RunConfig) -> f64 {
    match cfg.thetas {
        Thetas::Single(t) => t,
        Thetas::Range(_) => unreachable!("validated: command takes a single theta"),
    }
}

fn sld_line(out: &mut String, theta: f64, r: &SldResult) {
    let method = match r.method {
        SldMethod::Lyapunov => "lyapunov",
        SldMethod::PureClosed => "pure_closed",
        SldMethod::MixedClosed => "mixed_closed",
    };
    out.push_str(&format!("{} {} {} {method}\n", f17(theta), f17(r.qfi), f17(r.residual)));
}

fn cmd_qfi(cfg: &RunConfig) -> Result<String, CliError> {
    let mut out = String::from("theta qfi residual method\n");
    for t in cfg.thetas.values() {
        if cfg.method != MethodFlag::Lyapunov {
            sld_line(&mut out, t, &model_sld_closed(&cfg.model, t)?);
        }
        if cfg.method != MethodFlag::Closed {
            sld_line(&mut out, t, &model_sld(&cfg.model, t, SldMethod::Lyapunov)?);
        }
    }
    Ok(out)
}

fn cmd_fisher(cfg: &RunConfig) -> Result<String, CliError> {
    let povm = povm_of(cfg);
    let mut out = String::from("theta fisher qfi ratio\n");
    for t in cfg.thetas.values() {
        let rho = cfg.model.rho(t)?;
        let d = cfg.model.drho(t, DerivativeMethod::Analytic)?;
        let fisher = fisher_info(&d, &rho, povm)?;
        let qfi = model_sld_closed(&cfg.model, t)?.qfi;
        let ratio = if qfi > 0.0 { fisher / qfi } else { 0.0 };
        out.push_str(&format!("{} {} {} {}\n", f17(t), f17(fisher), f17(qfi), f17(ratio)));
    }
    Ok(out)
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn cmd_attain(cfg: &RunConfig) -> Result<String, CliError> {
    let povm = povm_of(cfg);
    let reports = cfg
        .thetas
        .values()
        .into_iter()
        .map(|t| Ok(json!({ "theta": t, "report": attain_check(&cfg.model, t, povm)? })))
        .collect::<Result<Vec<_>, CliError>>()?;
    let value = match cfg.thetas {
        Thetas::Single(_) => reports.into_iter().next().expect("one theta"),
        Thetas::Range(_) => serde_json::Value::Array(reports),
    };
    Ok(to_json(&value))
}

fn cmd_optimize(cfg: &RunConfig) -> Result<String, CliError> {
    let povm = optimal_measurement(&cfg.model, theta_of(cfg))?;
    Ok(files::format_povm(&povm))
}

fn cmd_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let povm = povm_of(cfg);
    let mut out = String::from("theta,qfi,fisher,ratio,attains\n");
    for t in cfg.thetas.values() {
        let rep = attain_check(&cfg.model, t, povm)?;
        let ratio = if rep.qfi > 0.0 { rep.fisher / rep.qfi } else { 0.0 };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            f17(t),
            f17(rep.qfi),
            f17(rep.fisher),
            f17(ratio),
            rep.verdict == Verdict::Attains
        ));
    }
    Ok(out)
}

fn cmd_simulate(cfg: &RunConfig) -> Result<String, CliError> {
    let theta = theta_of(cfg);
    let exp = Experiment::new(cfg.model, theta, povm_of(cfg).clone(), cfg.n_samples, cfg.seed)?;
    let summary = run_replicated(&exp, cfg.replications, None)?;
    Ok(to_json(&json!({
        "theta_true": theta,
        "n_samples": cfg.n_samples,
        "seed": cfg.seed,
        "summary": summary,
    })))
}

fn cmd_uniform(cfg: &RunConfig) -> Result<String, CliError> {
    let rep = uniform_attainability(&cfg.model, &cfg.thetas.values())?;
    let normal = match rep.plane_normal {
        Some(n) => n.0.iter().map(|x| f17(*x)).collect::<Vec<_>>().join(","),
        None => "none".into(),
    };
    Ok(format!("uniform: {}\nplane_normal: {normal}\n", rep.uniform))
}

fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let text = match cfg.command {
        Command::Qfi => cmd_qfi(cfg),
        Command::Fisher => cmd_fisher(cfg),
        Command::Attain => cmd_attain(cfg),
        Command::Optimize => cmd_optimize(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Uniform => cmd_uniform(cfg),
    }?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::config("--out", format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::config("--out", format!("cannot write to stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match RunConfig::from_args(&args).and_then(|cfg| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("helstrom: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
