use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rlw_core::config::{parse_config, parse_values, RunConfig};
use rlw_core::experiments::{
    analytic_row, convergence_sweep, fitted_orders, run_experiment, table_rows, ExperimentSpec, RunRecord,
    SweepSpec,
};
use rlw_core::output::{time_label, write_series, write_snapshot, write_sweep, write_table};
use rlw_core::{RlwError, SchemeId};

/// Energy-conserving solvers for the regularized long-wave equation.
#[derive(Parser)]
#[command(name = "rlw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its invariant series and snapshots.
    Run(RunArgs),
    /// Run the same experiment with all four schemes.
    Compare(RunArgs),
    /// Convergence study with τ = h halved at every level.
    Sweep(SweepArgs),
    /// Regenerate the single-soliton tables and the scheme comparison.
    Tables(OutArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration key, e.g. `--set tau=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    outdir: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// FIEP, LIEP, LICN, LILF or `all`.
    #[arg(long, default_value = "all")]
    scheme: String,
    /// Number of mesh levels, starting from h = 0.2.
    #[arg(long, default_value_t = 5)]
    levels: usize,
    #[arg(long)]
    outdir: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long)]
    outdir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Config(RlwError),
    #[error("{0}")]
    Run(RlwError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Flag, then config file, then `RLW_OUTDIR`, then `out`.
fn resolve_outdir(flag: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.and_then(|c| c.outdir.as_ref()).map(PathBuf::from))
        .or_else(|| std::env::var_os("RLW_OUTDIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(io_err(path))
}

fn load(args: &RunArgs) -> Result<(RunConfig, ExperimentSpec), CliError> {
    let text = fs::read_to_string(&args.config).map_err(io_err(&args.config))?;
    let mut cfg = parse_config(&text).map_err(CliError::Config)?;
    for o in &args.overrides {
        cfg.apply_override(o).map_err(CliError::Config)?;
    }
    let custom = match &cfg.ic_file {
        Some(file) => {
            let base = args.config.parent().unwrap_or(Path::new("."));
            let path = base.join(file);
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            Some(parse_values(&text).map_err(CliError::Config)?)
        }
        None => None,
    };
    let spec = cfg.to_spec(custom).map_err(CliError::Config)?;
    Ok((cfg, spec))
}

struct Timed {
    record: RunRecord,
    seconds: f64,
}

fn timed_run(spec: &ExperimentSpec) -> Result<Timed, CliError> {
    let start = Instant::now();
    let record = run_experiment(spec).map_err(CliError::Run)?;
    Ok(Timed {
        record,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Wall-clock times go in their own file so the data files stay reproducible.
fn write_timings(path: &Path, timings: &[(SchemeId, f64)]) -> Result<(), CliError> {
    write_file(path, |w| {
        writeln!(w, "scheme,seconds")?;
        for (scheme, secs) in timings {
            writeln!(w, "{scheme},{secs:.4}")?;
        }
        Ok(())
    })
}

fn write_record(dir: &Path, stem: &str, record: &RunRecord) -> Result<(), CliError> {
    write_file(&dir.join(format!("{stem}_series.csv")), |w| write_series(w, record))?;
    let rows = table_rows(record);
    if rows.len() > 1 {
        write_file(&dir.join(format!("{stem}_table.csv")), |w| write_table(w, &rows))?;
    }
    for snap in &record.snapshots {
        let path = dir.join(format!("{stem}_snapshot_t{}.csv", time_label(snap.t)));
        write_file(&path, |w| write_snapshot(w, &record.x, &snap.u))?;
    }
    Ok(())
}

fn summarize(run: &Timed) {
    let r = &run.record;
    let last = r.final_row();
    let mut line = format!(
        "{:<4} t={} mass={:.10} energy={:.10} max|dM|={:.2e} max|dH|={:.2e} solves={} time={:.3}s",
        r.scheme.name(),
        last.t,
        last.mass,
        last.energy,
        r.max_mass_drift(),
        r.max_energy_drift(),
        r.stats.linear_solves(),
        run.seconds
    );
    if let Some(row) = r.rows.iter().rev().find(|row| row.l2_error.is_some()) {
        line.push_str(&format!(
            " L2(t={})={:.4e} Linf={:.4e}",
            row.t,
            row.l2_error.unwrap_or(f64::NAN),
            row.linf_error.unwrap_or(f64::NAN)
        ));
    }
    println!("{line}");
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let (cfg, spec) = load(args)?;
    let dir = resolve_outdir(args.outdir.as_deref(), Some(&cfg));
    create_dir(&dir)?;
    let run = timed_run(&spec)?;
    let stem = format!("{}_{}", spec.ic.name(), spec.scheme.name().to_lowercase());
    write_record(&dir, &stem, &run.record)?;
    write_timings(&dir.join(format!("{stem}_timings.csv")), &[(spec.scheme, run.seconds)])?;
    let cfg_path = dir.join(format!("{stem}_config.txt"));
    fs::write(&cfg_path, cfg.serialize()).map_err(io_err(&cfg_path))?;
    summarize(&run);
    println!("wrote {}", dir.display());
    Ok(())
}

/// Runs one closure per scheme on its own thread, keeping scheme order.
fn per_scheme<T: Send>(
    schemes: &[SchemeId],
    f: impl Fn(SchemeId) -> Result<T, CliError> + Sync,
) -> Result<Vec<T>, CliError> {
    std::thread::scope(|s| {
        let handles: Vec<_> = schemes.iter().map(|&sc| {
            let f = &f;
            s.spawn(move || f(sc))
        }).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

fn cmd_compare(args: &RunArgs) -> Result<(), CliError> {
    let (cfg, spec) = load(args)?;
    let dir = resolve_outdir(args.outdir.as_deref(), Some(&cfg));
    create_dir(&dir)?;
    let runs = per_scheme(&SchemeId::ALL, |scheme| timed_run(&ExperimentSpec { scheme, ..spec.clone() }))?;
    let summary = dir.join(format!("{}_compare.csv", spec.ic.name()));
    write_file(&summary, |w| {
        writeln!(w, "scheme,max_mass_drift,max_energy_drift,final_L2_err,final_Linf_err,linear_solves")?;
        for run in &runs {
            let r = &run.record;
            let last = r.rows.iter().rev().find(|row| row.l2_error.is_some());
            writeln!(
                w,
                "{},{:.16e},{:.16e},{},{},{}",
                r.scheme,
                r.max_mass_drift(),
                r.max_energy_drift(),
                last.and_then(|l| l.l2_error).map(|e| format!("{e:.16e}")).unwrap_or_default(),
                last.and_then(|l| l.linf_error).map(|e| format!("{e:.16e}")).unwrap_or_default(),
                r.stats.linear_solves()
            )?;
        }
        Ok(())
    })?;
    let timings: Vec<(SchemeId, f64)> = runs.iter().map(|r| (r.record.scheme, r.seconds)).collect();
    write_timings(&dir.join(format!("{}_timings.csv", spec.ic.name())), &timings)?;
    for run in &runs {
        let stem = format!("{}_{}", spec.ic.name(), run.record.scheme.name().to_lowercase());
        write_record(&dir, &stem, &run.record)?;
        summarize(run);
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let schemes: Vec<SchemeId> = if args.scheme.eq_ignore_ascii_case("all") {
        SchemeId::ALL.to_vec()
    } else {
        vec![args.scheme.parse().map_err(CliError::Config)?]
    };
    if args.levels < 2 {
        return Err(CliError::Config(RlwError::invalid("levels", "need at least two levels")));
    }
    let dir = resolve_outdir(args.outdir.as_deref(), None);
    create_dir(&dir)?;
    let results = per_scheme(&schemes, |scheme| {
        let mut sweep = SweepSpec::standard(scheme);
        sweep.spacings = (0..args.levels).map(|k| 0.2 / 2f64.powi(k as i32)).collect();
        let levels = convergence_sweep(&sweep).map_err(CliError::Run)?;
        let fitted = fitted_orders(&levels).map_err(CliError::Run)?;
        Ok((scheme, levels, fitted))
    })?;
    for (scheme, levels, (s2, si)) in &results {
        let path = dir.join(format!("sweep_{}.csv", scheme.name().to_lowercase()));
        write_file(&path, |w| write_sweep(w, levels))?;
        let last = levels.last().expect("at least two levels");
        println!(
            "{:<4} final order L2={:.3} Linf={:.3}  fitted L2={s2:.3} Linf={si:.3}",
            scheme.name(),
            last.order_l2.unwrap_or(f64::NAN),
            last.order_linf.unwrap_or(f64::NAN)
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_tables(args: &OutArgs) -> Result<(), CliError> {
    let dir = resolve_outdir(args.outdir.as_deref(), None);
    create_dir(&dir)?;
    let runs = per_scheme(&SchemeId::ALL, |scheme| timed_run(&ExperimentSpec::single_soliton_table(scheme)))?;
    for (k, run) in runs.iter().enumerate() {
        let r = &run.record;
        let path = dir.join(format!("table{}_{}.csv", k + 1, r.scheme.name().to_lowercase()));
        let rows = table_rows(r);
        write_file(&path, |w| {
            write_table(&mut *w, &rows)?;
            if let Some((m, h)) = analytic_row(&ExperimentSpec::single_soliton_table(r.scheme)) {
                writeln!(w, "analytical,{m:.16e},{h:.16e},,,{m:.5},{h:.5},,")?;
            }
            Ok(())
        })?;
        summarize(run);
    }

    // scheme comparison at T = 10 on two meshes
    let cells = per_scheme(&SchemeId::ALL, |scheme| {
        [800usize, 1600]
            .iter()
            .map(|&n| {
                let spec = ExperimentSpec {
                    n_cells: n,
                    t_end: 10.0,
                    report_every: 100,
                    ..ExperimentSpec::single_soliton_table(scheme)
                };
                let run = timed_run(&spec)?;
                let last = run.record.final_row().clone();
                Ok((
                    spec.grid().map_err(CliError::Run)?.h,
                    last.l2_error.unwrap_or(f64::NAN),
                    last.linf_error.unwrap_or(f64::NAN),
                    run.seconds,
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    let path = dir.join("table5_comparison.csv");
    write_file(&path, |w| {
        writeln!(w, "scheme,h,L2_err,Linf_err,L2_display,Linf_display")?;
        for (scheme, rows) in SchemeId::ALL.iter().zip(&cells) {
            for (h, l2, linf, _) in rows {
                writeln!(w, "{scheme},{h},{l2:.16e},{linf:.16e},{l2:.3e},{linf:.3e}")?;
            }
        }
        Ok(())
    })?;
    let path = dir.join("table5_timings.csv");
    write_file(&path, |w| {
        writeln!(w, "scheme,h,seconds")?;
        for (scheme, rows) in SchemeId::ALL.iter().zip(&cells) {
            for (h, _, _, secs) in rows {
                writeln!(w, "{scheme},{h},{secs:.4}")?;
            }
        }
        Ok(())
    })?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Tables(a) => cmd_tables(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
