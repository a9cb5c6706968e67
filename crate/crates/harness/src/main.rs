use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use frac_l1::fem1d::generalized_eigendecomposition;
use frac_l1::l1_core::{symbol_diagnostics, DEFAULT_THETA_STAR};
use frac_l1::oracle::{kernel_contour_continuous, semidiscrete_delta, ContinuousContour};
use frac_l1::Execution;
use frac_l1_harness::config::{HEAVY_CELLS, HEAVY_REF_STEPS};
use frac_l1_harness::emit::{ensure_dir, write_csv, write_manifest, write_rates, CsvRow, Manifest};
use frac_l1_harness::experiments::{
    exp2_table, experiment1, experiment2, experiment3, laplacian_system,
};
use frac_l1_harness::oracle_rates::{
    delta_tables, delta_vs_oracle, source_table, source_vs_oracle,
};
use frac_l1_harness::{ExperimentConfig, RateSummary, RateTable, Result, TargetProfile};

#[derive(Parser)]
#[command(name = "fracl1", version, about = "L1 scheme convergence experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Delta source at t = 0: final-time and l1-in-time errors, robustness ratio.
    Exp1(Common),
    /// Time-constant singular source: max-in-time error.
    Exp2(Common),
    /// Box-constrained inverse source problem.
    Exp3(Common),
    /// Sector and lower-bound report for the discrete symbol.
    Diagnostics(Common),
    /// Errors against the exact semidiscrete solution and a kernel cross-check.
    OracleCheck(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Comma-separated fractional orders.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Comma-separated coarse step counts J.
    #[arg(long, value_delimiter = ',')]
    steps: Option<Vec<usize>>,
    /// Reference step count J*.
    #[arg(long)]
    ref_steps: Option<usize>,
    /// Spatial cells N.
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    final_time: f64,
    #[arg(long, default_value_t = 10.0)]
    nu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lower: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    upper: f64,
    /// Target profile, `const:<c>` or `power:<p>`.
    #[arg(long, default_value = "const:1")]
    target: String,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Output directory for CSV tables and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Large mesh (2^10 cells) and reference (2^15 steps).
    #[arg(long)]
    heavy: bool,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn config(&self, default_alphas: &[f64]) -> Result<ExperimentConfig> {
        let base = if self.heavy {
            ExperimentConfig::heavy()
        } else {
            ExperimentConfig::default()
        };
        let cfg = ExperimentConfig {
            alphas: self
                .alpha
                .clone()
                .unwrap_or_else(|| default_alphas.to_vec()),
            steps: self.steps.clone().unwrap_or(base.steps),
            ref_steps: self.ref_steps.unwrap_or(if self.heavy {
                HEAVY_REF_STEPS
            } else {
                base.ref_steps
            }),
            cells: self
                .cells
                .unwrap_or(if self.heavy { HEAVY_CELLS } else { base.cells }),
            final_time: self.final_time,
            nu: self.nu,
            lower: self.lower,
            upper: self.upper,
            target: TargetProfile::parse(&self.target)?,
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

struct Output<'a> {
    dir: Option<&'a Path>,
    files: Vec<String>,
}

impl Output<'_> {
    fn table<R: CsvRow>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        print_rows(name, rows);
        if let Some(dir) = self.dir {
            write_csv(&dir.join(name), rows)?;
            self.files.push(name.to_string());
        }
        Ok(())
    }

    fn rates(&mut self, name: &str, tables: &[RateTable]) -> Result<()> {
        let mut all: Vec<RateSummary> = Vec::new();
        for t in tables {
            all.extend(t.fits()?);
        }
        for r in &all {
            println!(
                "rate {:<12} alpha = {:<6} slope = {:.4}",
                r.metric, r.alpha, r.fit.slope
            );
            if !r.fit.excluded.is_empty() {
                eprintln!(
                    "warning: {} rows with nonpositive error excluded from the {} fit",
                    r.fit.excluded.len(),
                    r.metric
                );
            }
        }
        if let Some(dir) = self.dir {
            write_rates(&dir.join(name), &all)?;
            self.files.push(name.to_string());
        }
        Ok(())
    }
}

fn print_rows<R: CsvRow>(name: &str, rows: &[R]) {
    println!("# {name}");
    println!("{}", R::header().join("\t"));
    for r in rows {
        println!("{}", r.record().join("\t"));
    }
}

fn run(cli: Cli) -> Result<()> {
    let started = Instant::now();
    let (name, common) = match &cli.command {
        Command::Exp1(c) => ("exp1", c),
        Command::Exp2(c) => ("exp2", c),
        Command::Exp3(c) => ("exp3", c),
        Command::Diagnostics(c) => ("diagnostics", c),
        Command::OracleCheck(c) => ("oracle-check", c),
    };
    let default_alphas: Vec<f64> = match &cli.command {
        Command::Exp3(_) => vec![0.4, 0.8],
        Command::Diagnostics(_) => (1..=9).map(|k| k as f64 / 10.0).collect(),
        _ => vec![0.4, 0.6, 0.8],
    };
    let cfg = common.config(&default_alphas)?;
    let exec = common.exec();
    if let Some(dir) = &common.out {
        ensure_dir(dir)?;
    }
    let mut out = Output {
        dir: common.out.as_deref(),
        files: Vec::new(),
    };

    match &cli.command {
        Command::Exp1(_) => {
            let res = experiment1(&cfg, exec)?;
            out.table("exp1.csv", &res.rows)?;
            out.rates("exp1_rates.csv", &[res.e_t_table(), res.e_l1_table()])?;
        }
        Command::Exp2(_) => {
            let rows = experiment2(&cfg, exec)?;
            out.table("exp2.csv", &rows)?;
            out.rates("exp2_rates.csv", &[exp2_table(&rows)])?;
        }
        Command::Exp3(_) => {
            let res = experiment3(&cfg, exec)?;
            out.table("exp3.csv", &res.rows)?;
            for (alpha, iterations, residual) in &res.reference {
                println!("reference alpha = {alpha}: {iterations} iterations, optimality residual {residual:e}");
            }
            out.rates("exp3_rates.csv", &[res.table()])?;
        }
        Command::Diagnostics(_) => {
            println!("alpha\tmin_re_imag_axis\tlower_c\tupper_C\tmax_arg");
            for &alpha in &cfg.alphas {
                let r = symbol_diagnostics(alpha, DEFAULT_THETA_STAR, 400)?;
                println!(
                    "{alpha}\t{:.6e}\t{:.6}\t{:.6}\t{:.6}",
                    r.min_re_psi_on_imag_axis, r.lower_constant, r.upper_constant, r.max_arg
                );
            }
        }
        Command::OracleCheck(_) => {
            let delta = delta_vs_oracle(&cfg, exec)?;
            out.table("oracle_delta.csv", &delta)?;
            let source = source_vs_oracle(&cfg, exec)?;
            out.table("oracle_source.csv", &source)?;
            let (e_t, e_l1) = delta_tables(&delta);
            out.rates("oracle_rates.csv", &[e_t, e_l1, source_table(&source)])?;
            kernel_cross_check(&cfg)?;
        }
    }
    if let Some(dir) = out.dir {
        let manifest = Manifest::new(
            name,
            &cfg,
            started.elapsed().as_secs_f64(),
            out.files.clone(),
        );
        write_manifest(dir, &manifest)?;
    }
    Ok(())
}

/// Contour kernel against the spectral kernel on a 16-cell mesh.
fn kernel_cross_check(cfg: &ExperimentConfig) -> Result<()> {
    let system = laplacian_system(16)?;
    let spectral = generalized_eigendecomposition(&system)?;
    let v: Vec<f64> = system
        .mesh()
        .interior_nodes()
        .iter()
        .map(|x| x.powf(-0.49))
        .collect();
    for &alpha in &cfg.alphas {
        let mut worst: f64 = 0.0;
        for t in [0.01, 0.05, 0.1] {
            let a =
                kernel_contour_continuous(&system, alpha, t, &v, &ContinuousContour::default())?;
            let b = semidiscrete_delta(&spectral, alpha, &v, t)?;
            let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            worst = worst.max(
                a.iter()
                    .zip(&b)
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
                    / scale,
            );
        }
        println!("kernel cross-check alpha = {alpha}: relative difference {worst:.3e}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
