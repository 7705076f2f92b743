use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use hyperthresh::experiments::{
    curves_to_csv, emit_report, emit_svg_curves, run_denoise, run_recovery, DenoiseConfig, RecoveryConfig, ReportFormat,
};
use hyperthresh::oracle::{grid_argmin_scalar, GridSpec, ScalarObjective};
use hyperthresh::prox::{lq_prox_detailed, NewtonSettings, ThresholdRule};
use hyperthresh::sparsity::{bernstein_check, flip_rate_check, lambda_for_sparsity, u_vector, TailBoundReport};
use hyperthresh::{build_sampling_matrix, gauss_legendre, verify_exactness, Error, Result};

#[derive(Parser)]
#[command(name = "hyperthresh", version, about = "Thresholded hyperinterpolation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProxOp {
    Hard,
    Soft,
    Springback,
    Lq,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundCheck {
    Flip,
    Bernstein,
}

#[derive(Subcommand)]
enum Command {
    /// Print an N-point Gauss-Legendre rule as CSV
    Quad {
        #[arg(long)]
        points: usize,
        /// Report the exactness defect up to this degree on stderr
        #[arg(long)]
        verify: Option<usize>,
        /// Print the sampling matrix of this degree instead of the rule
        #[arg(long)]
        matrix: Option<usize>,
    },
    /// Apply one scalar thresholding operator
    Prox {
        #[arg(long, value_enum)]
        op: ProxOp,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Also minimise the objective on a dense grid and print the difference
        #[arg(long)]
        verify: bool,
    },
    /// Choose lambda so that l_q thresholding keeps at most k-1 coefficients
    Sparsity {
        /// Coefficients, separated by commas, whitespace or newlines
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        k: usize,
    },
    /// Monte Carlo check of the tail bounds
    Bounds {
        #[arg(long, value_enum)]
        check: BoundCheck,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Noise level for the flip check
        #[arg(long, default_value_t = 0.2)]
        sigma: f64,
        /// Threshold for the flip check
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 22)]
        k: usize,
        #[arg(long, default_value_t = 250)]
        dim: usize,
    },
    /// Sparse coefficient recovery experiment
    Recover {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        sparsity: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        /// Metrics CSV; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Denoising experiment on exp(-x^2)
    Denoise {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        impulse: Option<f64>,
        #[arg(long)]
        retain: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_curves: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        /// Metrics CSV; stdout when omitted
        #[arg(long)]
        out_metrics: Option<PathBuf>,
    },
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))
        }
    }
}

fn tail_csv_line(label: &str, r: &TailBoundReport) -> String {
    format!("{label},{},{},{},{}", r.analytic_bound, r.empirical_rate, r.trials, r.within_slack())
}

fn run(cli: Cli) -> Result<String> {
    let mut out = String::new();
    match cli.command {
        Command::Quad { points, verify, matrix } => {
            if points == 0 {
                return Err(Error::InvalidArgument("--points must be positive".into()));
            }
            let rule = gauss_legendre(points);
            if let Some(deg) = matrix {
                let a = build_sampling_matrix(&rule, deg);
                out.push_str("index");
                for l in 1..=a.dimension() {
                    out.push_str(&format!(",phi{l}"));
                }
                out.push('\n');
                for j in 0..a.node_count() {
                    out.push_str(&j.to_string());
                    for l in 0..a.dimension() {
                        out.push_str(&format!(",{}", a.get(j, l)));
                    }
                    out.push('\n');
                }
            } else {
                out.push_str("index,node,weight\n");
                for (j, (x, w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
                    out.push_str(&format!("{j},{x},{w}\n"));
                }
            }
            if let Some(deg) = verify {
                eprintln!("exactness defect up to degree {deg}: {:e}", verify_exactness(&rule, deg));
            }
        }
        Command::Prox { op, y, lambda, q, alpha, verify } => {
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| Error::InvalidArgument(format!("--{name} is required for this operator")))
            };
            let (rule, objective) = match op {
                ProxOp::Hard => (ThresholdRule::hard(lambda)?, ScalarObjective::L0),
                ProxOp::Soft => (ThresholdRule::soft(lambda)?, ScalarObjective::L1),
                ProxOp::Springback => {
                    let a = need(alpha, "alpha")?;
                    (ThresholdRule::springback(lambda, a)?, ScalarObjective::Springback(a))
                }
                ProxOp::Lq => {
                    let qv = need(q, "q")?;
                    (ThresholdRule::newton_lq(lambda, qv)?, ScalarObjective::Lq(qv))
                }
            };
            let value = rule.apply(y)?;
            let _ = writeln!(out, "value,{value}");
            if let ProxOp::Lq = op {
                let detail = lq_prox_detailed(y, lambda, q.unwrap_or_default(), NewtonSettings::default())?;
                let _ = writeln!(out, "threshold,{}", detail.threshold);
                let _ = writeln!(out, "iterations,{}", detail.iterations);
                let _ = writeln!(out, "bisection,{}", detail.bisection);
            }
            if verify {
                let grid = GridSpec::around(y, 1e-5);
                let oracle = grid_argmin_scalar(objective, y, lambda, grid);
                let _ = writeln!(out, "oracle,{oracle}");
                let _ = writeln!(out, "difference,{}", (value - oracle).abs());
                let _ = writeln!(out, "grid_step,{}", grid.step());
            }
        }
        Command::Sparsity { coeffs, q, k } => {
            let text = fs::read_to_string(&coeffs)?;
            let alpha = text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|e| Error::InvalidArgument(format!("bad coefficient {t:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            let lambda = lambda_for_sparsity(&alpha, q, k)?;
            let mut u = u_vector(&alpha, q)?;
            u.sort_by(|a, b| b.total_cmp(a));
            let rule = ThresholdRule::newton_lq(lambda, q)?;
            let support = rule.apply_all(&alpha)?.iter().filter(|v| **v != 0.0).count();
            let _ = writeln!(out, "u_k,{}", u[k - 1]);
            let _ = writeln!(out, "lambda,{lambda}");
            let _ = writeln!(out, "support,{support}");
            let _ = writeln!(out, "bound,{}", k - 1);
        }
        Command::Bounds { check, trials, seed, sigma, lambda, k, dim } => {
            let _ = writeln!(out, "case,analytic_bound,empirical_rate,trials,within_slack");
            match check {
                BoundCheck::Flip => {
                    for i in 1..=10 {
                        let gap = 0.1 * i as f64;
                        let above = flip_rate_check(lambda + gap, lambda, sigma, trials, seed)?;
                        let _ = writeln!(out, "{}", tail_csv_line(&format!("gap=+{gap:.1}"), &above));
                        if gap < lambda {
                            let below = flip_rate_check(lambda - gap, lambda, sigma, trials, seed)?;
                            let _ = writeln!(out, "{}", tail_csv_line(&format!("gap=-{gap:.1}"), &below));
                        }
                    }
                }
                BoundCheck::Bernstein => {
                    for t in [2.0, 5.0, 10.0, 15.0, 20.0] {
                        let r = bernstein_check(k, dim, t, trials, seed)?;
                        let _ = writeln!(out, "{}", tail_csv_line(&format!("t={t}"), &r));
                    }
                }
            }
        }
        Command::Recover { config, sigma, trials, seed, n, dim, sparsity, workers, out: out_file, json } => {
            let mut cfg: RecoveryConfig = load_config(config.as_deref())?;
            if let Some(v) = sigma {
                cfg.sigma = v;
            }
            if let Some(v) = trials {
                cfg.trials = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            if let Some(v) = n {
                cfg.n_points = v;
            }
            if let Some(v) = dim {
                cfg.dim = v;
            }
            if let Some(v) = sparsity {
                cfg.sparsity = v;
                if cfg.top_k_retention.is_some() {
                    cfg.top_k_retention = Some(v);
                }
            }
            if workers.is_some() {
                cfg.workers = workers;
            }
            let report = run_recovery(&cfg)?;
            let csv = emit_report(&report, ReportFormat::Csv)?;
            match out_file {
                Some(p) => fs::write(p, csv)?,
                None => out.push_str(&csv),
            }
            if let Some(p) = json {
                fs::write(p, emit_report(&report, ReportFormat::Json)?)?;
            }
            eprintln!("mean input SNR: {:.6} dB over {} trials", report.mean_input_snr_db, cfg.trials);
        }
        Command::Denoise { config, sigma, impulse, retain, seed, out_curves, out_svg, out_metrics } => {
            let mut cfg: DenoiseConfig = load_config(config.as_deref())?;
            if let Some(v) = sigma {
                cfg.sigma = v;
            }
            if let Some(v) = impulse {
                cfg.impulse_a = v;
            }
            if let Some(v) = retain {
                cfg.retain_k = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
            }
            let result = run_denoise(&cfg)?;
            let csv = emit_report(&result.report, ReportFormat::Csv)?;
            match out_metrics {
                Some(p) => fs::write(p, csv)?,
                None => out.push_str(&csv),
            }
            if let Some(p) = out_curves {
                fs::write(p, curves_to_csv(&result.curves))?;
            }
            if let Some(p) = out_svg {
                fs::write(p, emit_svg_curves(&result.curves, "exp(-x^2) denoising"))?;
            }
            eprintln!("noisy-sample L2 error: {:.6}", result.input_l2_error);
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let result = run(Cli::parse()).and_then(|text| std::io::stdout().write_all(text.as_bytes()).map_err(Error::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
