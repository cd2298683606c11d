use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use rmtwork::analytic::{n_eff, peak_width, PeakRegime, PredictedDensity, QuenchParams};
use rmtwork::config::RunConfig;
use rmtwork::ensembles::SymmetryClass;
use rmtwork::io::{parse_beta, write_csv, write_json};
use rmtwork::quench::{ergodicity_study, run_ensemble, run_single_draw};
use rmtwork::validate::{run_validation, ValidationOptions};
use rmtwork::Error;

#[derive(Parser)]
#[command(name = "rmtwork", version, about = "Work statistics of quenches between Gaussian random Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce figure 1, 2 or 3 (single draw against the prediction).
    Figure {
        id: u8,
        #[command(flatten)]
        opts: Overrides,
    },
    /// One draw with arbitrary parameters.
    Single(Overrides),
    /// Average over several draws.
    Ensemble(Overrides),
    /// Single-draw deviation from the prediction as a function of N.
    Ergodicity(Overrides),
    /// Run the built-in consistency checks.
    Validate {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Overrides {
    /// Number of levels; a comma-separated list for `ergodicity`.
    #[arg(long = "N", value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_parser = parse_class)]
    class: Option<SymmetryClass>,
    #[arg(long)]
    s_init: Option<f64>,
    #[arg(long)]
    s_final: Option<f64>,
    /// Inverse temperature; `inf` selects the ground state.
    #[arg(long, value_parser = parse_beta_arg)]
    beta: Option<f64>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    u_max: Option<f64>,
    #[arg(long)]
    u_points: Option<usize>,
    #[arg(long)]
    w_bins: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// JSON file with any of the settings above (see README).
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_class(s: &str) -> Result<SymmetryClass, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_beta_arg(s: &str) -> Result<f64, String> {
    parse_beta(s).map_err(|e| e.to_string())
}

enum Failure {
    Config(String),
    Validation,
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::Json(_) => {
                Failure::Config(e.to_string())
            }
            other => Failure::Run(other),
        }
    }
}

impl Overrides {
    fn flags(&self, allow_list: bool) -> Result<RunConfig, Failure> {
        let mut cfg = RunConfig {
            class: self.class,
            s_init: self.s_init,
            s_final: self.s_final,
            beta: self.beta,
            draws: self.draws,
            seed: self.seed,
            u_max: self.u_max,
            u_points: self.u_points,
            w_bins: self.w_bins,
            ..Default::default()
        };
        match self.n.as_slice() {
            [] => {}
            [n] if !allow_list => cfg.n_levels = Some(*n),
            list if allow_list => cfg.n_list = Some(list.to_vec()),
            _ => return Err(Failure::Config("--N takes a single value here".into())),
        }
        Ok(cfg)
    }

    fn resolve(&self, figure: Option<u8>, allow_list: bool) -> Result<RunConfig, Failure> {
        let file = match &self.config {
            Some(path) => Some(
                RunConfig::from_json_file(path)
                    .map_err(|e| Failure::Config(format!("cannot load {}: {e}", path.display())))?,
            ),
            None => None,
        };
        Ok(RunConfig::resolve(figure, file.as_ref(), &self.flags(allow_list)?)?)
    }
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(rmtwork::io::fmt_f64(x))
    }
}

fn predictions(params: &QuenchParams) -> Result<Value, Error> {
    let (w0, dw0) = peak_width(params, PeakRegime::Beta0);
    let (wi, dwi) = peak_width(params, PeakRegime::BetaInf);
    let ratio = n_eff(params.beta, params.s_init)? / params.n_levels as f64;
    Ok(json!({
        "n_eff_over_n": json_f64(ratio),
        "peak_width": {
            "beta0": { "w_star": w0, "delta_w": dw0 },
            "betainf": { "w_star": wi, "delta_w": dwi },
        },
    }))
}

fn prepare_out(out: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::Run(e.into()))
}

fn predicted_on(params: &QuenchParams, w: &[f64]) -> Result<Vec<f64>, Error> {
    let density = PredictedDensity::new(params)?;
    w.iter().map(|&x| density.eval(x)).collect()
}

fn cmd_single(command: &str, figure: Option<u8>, cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let exp = cfg.experiment()?;
    prepare_out(out)?;
    log::info!("{command}: N = {}, beta = {}", exp.initial.n_levels, exp.beta);
    let r = run_single_draw(&exp, 0)?;
    let re = |v: &[num_complex::Complex64]| v.iter().map(|z| z.re).collect::<Vec<_>>();
    let im = |v: &[num_complex::Complex64]| v.iter().map(|z| z.im).collect::<Vec<_>>();
    write_csv(
        &out.join("gu_curve.csv"),
        &["u", "re_g_single", "im_g_single", "re_g_analytic", "im_g_analytic"],
        &[&r.curve.u, &re(&r.curve.values), &im(&r.curve.values), &re(&r.analytic.values), &im(&r.analytic.values)],
    )?;
    let centers = r.histogram.centers();
    let predicted = predicted_on(&r.params, &centers)?;
    write_csv(&out.join("pw_hist.csv"), &["w", "p_single", "p_analytic"], &[&centers, &r.histogram.values, &predicted])?;
    let manifest = json!({
        "command": command,
        "figure": figure,
        "config": cfg,
        "experiment": exp,
        "analytic_params": r.params,
        "predictions": predictions(&r.params)?,
        "draws": [{
            "index": r.draw_index,
            "streams": [r.streams.0, r.streams.1],
            "offset": r.offset,
            "rms_to_analytic": r.rms_to_analytic,
            "jarzynski": r.jarzynski,
            "moments": r.moments,
            "diagnostics": r.diagnostics,
            "histogram_mass_outside": r.histogram.outside,
        }],
        "files": ["gu_curve.csv", "pw_hist.csv"],
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(())
}

fn cmd_ensemble(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let exp = cfg.experiment()?;
    prepare_out(out)?;
    log::info!("ensemble: {} draws at N = {}", exp.n_draws, exp.initial.n_levels);
    let r = run_ensemble(&exp)?;
    let re = |v: &[num_complex::Complex64]| v.iter().map(|z| z.re).collect::<Vec<_>>();
    let im = |v: &[num_complex::Complex64]| v.iter().map(|z| z.im).collect::<Vec<_>>();
    write_csv(
        &out.join("gu_curve.csv"),
        &["u", "re_g_mean", "im_g_mean", "var_g", "re_g_analytic", "im_g_analytic"],
        &[&r.mean.u, &re(&r.mean.values), &im(&r.mean.values), &r.variance, &re(&r.analytic.values), &im(&r.analytic.values)],
    )?;
    let params = exp.params()?;
    let centers = r.mean_histogram.centers();
    let predicted = predicted_on(&params, &centers)?;
    write_csv(&out.join("pw_hist.csv"), &["w", "p_mean", "p_analytic"], &[&centers, &r.mean_histogram.values, &predicted])?;
    let manifest = json!({
        "command": "ensemble",
        "config": cfg,
        "experiment": exp,
        "analytic_params": params,
        "predictions": predictions(&params)?,
        "rms_per_draw": r.rms_per_draw,
        "max_jarzynski_rel_err": r.max_jarzynski_rel_err,
        "histogram_mass_outside": r.mean_histogram.outside,
        "files": ["gu_curve.csv", "pw_hist.csv"],
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(())
}

fn cmd_ergodicity(cfg: &RunConfig, out: &Path) -> Result<(), Failure> {
    let exp = cfg.experiment()?;
    let n_list = cfg.n_list.clone().unwrap_or_else(|| vec![exp.initial.n_levels]);
    let draws = cfg.draws.unwrap_or(1);
    prepare_out(out)?;
    log::info!("ergodicity: N = {n_list:?}, {draws} draws each");
    let r = ergodicity_study(&exp, &n_list, draws)?;
    let col = |f: &dyn Fn(&rmtwork::quench::ErgodicityEntry) -> f64| r.entries.iter().map(f).collect::<Vec<_>>();
    write_csv(
        &out.join("ergodicity.csv"),
        &["n", "mean_rms", "stderr_rms", "s_init", "s_final"],
        &[
            &col(&|e| e.n_levels as f64),
            &col(&|e| e.mean_rms),
            &col(&|e| e.stderr_rms),
            &col(&|e| e.s_init),
            &col(&|e| e.s_final),
        ],
    )?;
    let manifest = json!({
        "command": "ergodicity",
        "config": cfg,
        "experiment": exp,
        "report": r,
        "files": ["ergodicity.csv"],
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(())
}

fn cmd_validate(out: &Path, seed: u64) -> Result<(), Failure> {
    prepare_out(out)?;
    let report = run_validation(&ValidationOptions { seed, ..Default::default() }).map_err(Failure::Run)?;
    write_json(&out.join("validate_report.json"), &report)?;
    for c in &report.checks {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        println!("{tag} {:<48} {:.3e} (tol {:.1e})", c.name, c.measured, c.tolerance);
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Figure { id, opts } => {
            let cfg = opts.resolve(Some(id), false)?;
            cmd_single("figure", Some(id), &cfg, &opts.out)
        }
        Command::Single(opts) => {
            let cfg = opts.resolve(None, false)?;
            cmd_single("single", None, &cfg, &opts.out)
        }
        Command::Ensemble(opts) => {
            let cfg = opts.resolve(None, false)?;
            cmd_ensemble(&cfg, &opts.out)
        }
        Command::Ergodicity(opts) => {
            let cfg = opts.resolve(None, true)?;
            cmd_ergodicity(&cfg, &opts.out)
        }
        Command::Validate { out, seed } => cmd_validate(&out, seed),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("invalid configuration: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
