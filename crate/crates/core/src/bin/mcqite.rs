//! Batch CLI for schedule inspection, error-law measurement, bound
//! checks, and figure-style sweeps. Outputs are CSV/JSON files that are
//! bit-exactly reproducible from the serialized config they ship with.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use mcqite::analysis::{
    default_eps_grid, figure3_sweep, figure4_sweep, figure5_sweep, fmt_float, gate_scaling_report,
    optimize_eps, tree_bound, CsvTable, SweepConfig,
};
use mcqite::compiler::{
    build_hedge, build_single_layer, build_tree, to_v_schedule, validate, Schedule,
    ValidationOutcome,
};
use mcqite::engines::{
    run_postselected, run_statevector, run_tree_recurrence, RunOptions, RunResult,
};
use mcqite::error::{Error, Result};
use mcqite::gates::GateKind;
use mcqite::models::initial_state;
use mcqite::numerics::NumericsConfig;

#[derive(Parser)]
#[command(
    name = "mcqite",
    version,
    about = "Multi-copy imaginary-time evolution: exact simulation and analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Config overrides, repeatable: --set key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps (default: MCQITE_THREADS, then all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Family to generate: tree, hedge, or single_layer.
    #[arg(long)]
    family: Option<String>,
    /// Depth parameter n.
    #[arg(long)]
    n: Option<u32>,
    /// Convert to V gates with real-time padding.
    #[arg(long)]
    v_gates: bool,
    /// Write the schedule here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parse and validate an existing schedule file.
    #[arg(long)]
    check: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Gate error-law grid with fitted slopes and coefficients.
    GateScaling(Common),
    /// One tree-recurrence run with per-layer records.
    TreeRun(Common),
    /// One hedge-circuit statevector run (optionally post-selected).
    HedgeRun(Common),
    /// Convergence-bound check over a (beta, n) grid.
    BoundCheck(Common),
    /// Tree-circuit energy-reduction sweep (panels a/b/c).
    Fig3(Common),
    /// Hedge-circuit fidelity/post-selection sweep (panels a/b/c/d).
    Fig4(Common),
    /// Virtual-cooling sweep over system sizes and step families.
    Fig5(Common),
    /// Print or validate schedules.
    Schedule(ScheduleArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GateScaling(c) => cmd_gate_scaling(&c),
        Command::TreeRun(c) => cmd_tree_run(&c),
        Command::HedgeRun(c) => cmd_hedge_run(&c),
        Command::BoundCheck(c) => cmd_bound_check(&c),
        Command::Fig3(c) => cmd_fig(&c, "fig3"),
        Command::Fig4(c) => cmd_fig(&c, "fig4"),
        Command::Fig5(c) => cmd_fig(&c, "fig5"),
        Command::Schedule(a) => cmd_schedule(&a),
    }
}

fn load_config(common: &Common) -> Result<SweepConfig> {
    init_threads(common);
    let mut cfg = match &common.config {
        Some(path) => SweepConfig::parse(&std::fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };
    for assignment in &common.set {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set needs key=value, got '{assignment}'")))?;
        cfg.set(key.trim(), value.trim())?;
    }
    Ok(cfg)
}

fn init_threads(common: &Common) {
    let n = common.threads.or_else(|| {
        std::env::var("MCQITE_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n.filter(|&n| n > 0) {
        // Ignore failure: the global pool may already exist.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn write_outputs(
    common: &Common,
    command: &str,
    sweep: &SweepConfig,
    tables: &[CsvTable],
    results: serde_json::Value,
) -> Result<()> {
    std::fs::create_dir_all(&common.out)?;
    let mut outputs = Vec::new();
    for t in tables {
        let path = t.write_to(&common.out)?;
        outputs.push(path.file_name().unwrap().to_string_lossy().to_string());
    }
    let config_name = format!("{command}.config.txt");
    std::fs::write(common.out.join(&config_name), sweep.serialize())?;
    outputs.push(config_name);
    let report = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": sweep.serialize(),
        "outputs": outputs,
        "results": results,
    });
    std::fs::write(
        common.out.join(format!("{command}.report.json")),
        format!("{:#}\n", report),
    )?;
    Ok(())
}

fn parse_gate_kinds(selector: &str) -> Result<Vec<GateKind>> {
    match selector {
        "all" => Ok(vec![GateKind::U, GateKind::V, GateKind::W]),
        one => Ok(vec![one.parse()?]),
    }
}

fn cmd_gate_scaling(common: &Common) -> Result<()> {
    let sweep = load_config(common)?;
    let num = NumericsConfig::default();
    let h = sweep.hamiltonian_spec(&num)?;
    let phi0 = initial_state(&sweep.initial_state_spec()?, &h, &num)?;
    let kinds = parse_gate_kinds(&sweep.gate)?;

    let mut table = CsvTable::new(
        "gate_scaling",
        &[
            "gate",
            "eps",
            "distance",
            "fitted_slope",
            "richardson_coefficient",
            "analytic_sigma",
        ],
    );
    let mut summary = serde_json::Map::new();
    for kind in kinds {
        let rep = gate_scaling_report(&h, &phi0, kind, &default_eps_grid(), &num)?;
        for row in &rep.rows {
            table.push_row(vec![
                kind.to_string(),
                fmt_float(row.eps),
                fmt_float(row.distance),
                fmt_float(rep.slope),
                rep.richardson_coefficient.map(fmt_float).unwrap_or_default(),
                rep.analytic_sigma.map(fmt_float).unwrap_or_default(),
            ]);
        }
        summary.insert(
            kind.to_string(),
            json!({
                "slope": rep.slope,
                "richardson_coefficient": rep.richardson_coefficient,
                "analytic_sigma": rep.analytic_sigma,
            }),
        );
    }
    write_outputs(common, "gate_scaling", &sweep, &[table], summary.into())
}

fn run_result_json(r: &RunResult, eps: f64) -> serde_json::Value {
    json!({
        "eps": eps,
        "energy": r.energy,
        "fidelity_beta": r.fidelity_beta,
        "fidelity_ground": r.fidelity_ground,
        "success_probability": r.success_probability,
        "aborted": r.aborted,
        "warnings": r.warnings,
    })
}

fn layer_table(name: &str, r: &RunResult) -> CsvTable {
    let mut table = CsvTable::new(name, &["layer", "energy", "purity", "total_energy"]);
    for rec in &r.layer_records {
        table.push_row(vec![
            rec.layer.to_string(),
            fmt_float(rec.energy),
            fmt_float(rec.purity),
            rec.total_energy.map(fmt_float).unwrap_or_default(),
        ]);
    }
    table
}

fn cmd_tree_run(common: &Common) -> Result<()> {
    let sweep = load_config(common)?;
    let num = NumericsConfig::default();
    let h = sweep.hamiltonian_spec(&num)?;
    let init = sweep.initial_state_spec()?;
    let opts = RunOptions {
        record_layers: true,
    };
    let eps = match sweep.eps {
        Some(e) => e,
        None => {
            optimize_eps(
                |e| Ok(run_tree_recurrence(&h, &init, e, sweep.n, RunOptions::default(), &num)?.energy),
                sweep.eps_lo,
                sweep.eps_hi,
                sweep.eps_tol,
                sweep.grid_points,
            )?
            .eps_star
        }
    };
    let r = run_tree_recurrence(&h, &init, eps, sweep.n, opts, &num)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let table = layer_table("tree_run", &r);
    write_outputs(common, "tree_run", &sweep, &[table], run_result_json(&r, eps))
}

fn cmd_hedge_run(common: &Common) -> Result<()> {
    let sweep = load_config(common)?;
    let num = NumericsConfig::default();
    let h = sweep.hamiltonian_spec(&num)?;
    let init = sweep.initial_state_spec()?;
    let mut schedule = build_hedge(sweep.n, &num)?;
    schedule.sign = sweep.sign;
    if sweep.gates == "V" {
        schedule = to_v_schedule(&schedule)?;
    }
    let runner = |eps: f64, opts: RunOptions| -> Result<RunResult> {
        if sweep.post_select {
            run_postselected(&schedule, &h, &init, eps, opts, &num)
        } else {
            run_statevector(&schedule, &h, &init, eps, opts, &num)
        }
    };
    let eps = match sweep.eps {
        Some(e) => e,
        None => {
            optimize_eps(
                |e| {
                    let r = runner(e, RunOptions::default())?;
                    Ok(if r.aborted { f64::INFINITY } else { r.energy })
                },
                sweep.eps_lo,
                sweep.eps_hi,
                sweep.eps_tol,
                sweep.grid_points,
            )?
            .eps_star
        }
    };
    let r = runner(
        eps,
        RunOptions {
            record_layers: true,
        },
    )?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let table = layer_table("hedge_run", &r);
    write_outputs(common, "hedge_run", &sweep, &[table], run_result_json(&r, eps))
}

fn cmd_bound_check(common: &Common) -> Result<()> {
    let sweep = load_config(common)?;
    let num = NumericsConfig::default();
    let h = sweep.hamiltonian_spec(&num)?;
    let init = sweep.initial_state_spec()?;
    let mut table = CsvTable::new(
        "bound_check",
        &[
            "beta", "n", "eps", "h_norm", "sigma_max", "b_k", "bound", "measured", "slack",
            "asserted",
        ],
    );
    let mut violations = 0usize;
    for &beta in &sweep.beta_list {
        for &n in &sweep.n_list {
            let rep = tree_bound(&h, &init, beta, n, &num)?;
            let asserted = rep.in_asserted_regime();
            if asserted && rep.slack < -1e-8 {
                violations += 1;
            }
            table.push_row(vec![
                fmt_float(rep.beta),
                rep.n.to_string(),
                fmt_float(rep.eps),
                fmt_float(rep.h_norm),
                fmt_float(rep.sigma_max),
                fmt_float(rep.b_k),
                fmt_float(rep.bound),
                fmt_float(rep.measured),
                fmt_float(rep.slack),
                (asserted as u8).to_string(),
            ]);
        }
    }
    write_outputs(
        common,
        "bound_check",
        &sweep,
        &[table],
        json!({ "violations": violations }),
    )?;
    if violations > 0 {
        return Err(Error::Validation(format!(
            "{violations} bound violations in the asserted regime"
        )));
    }
    Ok(())
}

fn cmd_fig(common: &Common, which: &str) -> Result<()> {
    let sweep = load_config(common)?;
    let num = NumericsConfig::default();
    let tables = match which {
        "fig3" => figure3_sweep(&sweep.fig3(), &num)?,
        "fig4" => {
            let h = sweep.hamiltonian_spec(&num)?;
            let init = sweep.initial_state_spec()?;
            figure4_sweep(&sweep.fig4(), &h, &init, &num)?
        }
        "fig5" => figure5_sweep(&sweep.fig5(), &num)?,
        _ => unreachable!(),
    };
    let names: Vec<String> = tables.iter().map(|t| t.name.clone()).collect();
    write_outputs(common, which, &sweep, &tables, json!({ "tables": names }))
}

fn cmd_schedule(args: &ScheduleArgs) -> Result<()> {
    let num = NumericsConfig::default();
    if let Some(path) = &args.check {
        let schedule = Schedule::parse(&std::fs::read_to_string(path)?)?;
        return match validate(&schedule) {
            ValidationOutcome::Valid(cert) => {
                println!(
                    "valid: {} gates, potential {}, optimal {}, first copy {:+} steps",
                    cert.gate_count,
                    cert.final_potential,
                    cert.optimal_gate_count,
                    cert.first_copy_steps
                );
                Ok(())
            }
            ValidationOutcome::Invalid(v) => Err(Error::Validation(format!(
                "step {}: {}",
                v.step_index, v.reason
            ))),
        };
    }

    let family = args
        .family
        .as_deref()
        .ok_or_else(|| Error::Config("schedule needs --family or --check".into()))?;
    let n = args
        .n
        .ok_or_else(|| Error::Config("schedule generation needs --n".into()))?;
    let mut schedule = match family {
        "tree" => build_tree(n, &num)?,
        "hedge" => build_hedge(n, &num)?,
        "single_layer" => build_single_layer(n)?,
        other => return Err(Error::Config(format!("unknown family '{other}'"))),
    };
    if args.v_gates {
        schedule = to_v_schedule(&schedule)?;
    }
    match validate(&schedule) {
        ValidationOutcome::Valid(cert) => {
            eprintln!(
                "{} n={}: {} gates, potential {}, optimal {}",
                family, n, cert.gate_count, cert.final_potential, cert.optimal_gate_count
            );
        }
        ValidationOutcome::Invalid(v) => {
            return Err(Error::Validation(format!(
                "generated schedule failed validation at step {}: {}",
                v.step_index, v.reason
            )))
        }
    }
    let text = schedule.serialize();
    match &args.out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(path, text)?
        }
        None => print!("{text}"),
    }
    Ok(())
}
