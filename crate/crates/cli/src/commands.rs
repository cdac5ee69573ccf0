use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use lhp_core::functionals::{
    expected_surface_area, replicate_csv, simulate_surface_areas, variance, CumulantTable,
};
use lhp_core::limit::{
    limit_cumulant, log_characteristic_function, sample_limit, InvertedCdf, LimitLawSpec,
};
use lhp_core::sampling::dump::{write_process, write_scalar};
use lhp_core::sampling::ProcessSampler;
use lhp_core::stats::regime_report_for;
use lhp_core::ModelConfig;

use crate::config::{Command, ExperimentConfig};
use crate::render::render_disk;
use crate::CliError;

/// Points of the characteristic-function grid written by `limit`.
const CF_POINTS: usize = 801;

/// Runs the experiment on a dedicated pool and returns the files written.
pub fn run(config: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match config.command {
        Command::Sample => sample(config),
        Command::Crofton => crofton(config),
        Command::Variance => variance_cmd(config),
        Command::Cumulants => cumulants(config),
        Command::Limit => limit(config),
        Command::Regimes => regimes(config),
        Command::Render => render(config),
    })
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&path, contents)?;
    Ok(path)
}

fn cell_label(c: &ModelConfig) -> String {
    format!("d={} λ={} R={}", c.d, c.lambda, c.radius)
}

fn sample(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let cells = cfg.cells();
    for model in &cells {
        let results = simulate_surface_areas(model, cfg.n_replicates, cfg.seed);
        let suffix = if cells.len() == 1 {
            ".csv".to_string()
        } else {
            format!("_R{}.csv", model.radius)
        };
        written.push(write_file(cfg.output_with(&suffix), &replicate_csv(&results))?);
        let mean = results.iter().map(|r| r.value).sum::<f64>() / results.len() as f64;
        println!(
            "{}: {} replicates, mean S = {mean:.6e} (E S = {:.6e})",
            cell_label(model),
            cfg.n_replicates,
            expected_surface_area(model)
        );
    }
    if let Some(path) = &cfg.dump {
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(File::create(path)?);
        for model in &cells {
            let sampler = ProcessSampler::new(model);
            for rep in 0..cfg.n_replicates as u64 {
                write_process(&mut w, &sampler.sample(cfg.seed, rep))?;
            }
        }
        w.flush()?;
        written.push(path.clone());
    }
    Ok(written)
}

fn crofton(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut csv = String::from("d,lambda,R,n,mc_mean,analytic_mean,z\n");
    let n = cfg.n_replicates as f64;
    for model in cfg.cells() {
        let results = simulate_surface_areas(&model, cfg.n_replicates, cfg.seed);
        let mc = results.iter().map(|r| r.value).sum::<f64>() / n;
        let es = expected_surface_area(&model);
        let z = (mc - es) / (variance(&model)? / n).sqrt();
        let _ = writeln!(
            csv,
            "{},{},{},{},{mc},{es},{z}",
            model.d, model.lambda, model.radius, cfg.n_replicates
        );
        println!("{}: mean {mc:.6e}, E S {es:.6e}, z {z:+.3}", cell_label(&model));
    }
    Ok(vec![write_file(cfg.output_with(".csv"), &csv)?])
}

fn variance_cmd(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    if cfg.n_replicates < 2 {
        return Err(CliError::Usage("variance needs --n of at least 2".into()));
    }
    let mut csv = String::from("d,lambda,R,n,mc_variance,analytic_variance,rel_dev\n");
    let n = cfg.n_replicates as f64;
    for model in cfg.cells() {
        let vals: Vec<f64> = simulate_surface_areas(&model, cfg.n_replicates, cfg.seed)
            .iter()
            .map(|r| r.value)
            .collect();
        let mean = vals.iter().sum::<f64>() / n;
        let mc = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let exact = variance(&model)?;
        let rel = mc / exact - 1.0;
        let _ = writeln!(
            csv,
            "{},{},{},{},{mc},{exact},{rel}",
            model.d, model.lambda, model.radius, cfg.n_replicates
        );
        println!(
            "{}: variance {mc:.6e}, I_2 {exact:.6e}, rel. dev. {rel:+.4}",
            cell_label(&model)
        );
    }
    Ok(vec![write_file(cfg.output_with(".csv"), &csv)?])
}

fn cumulants(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut csv = String::new();
    for &d in &cfg.d_list {
        for &lambda in &cfg.lambda_list {
            let template = ModelConfig::with_multiplier(d, lambda, cfg.r_list[0], cfg.multiplier)?;
            let table = CumulantTable::compute(&template, &cfg.orders, &cfg.r_list)?;
            let text = table.to_csv();
            if csv.is_empty() {
                csv.push_str(&text);
            } else {
                csv.extend(text.lines().skip(1).map(|l| format!("{l}\n")));
            }
            for &r in &cfg.r_list {
                let mut line = format!("d={d} λ={lambda} R={r}:");
                for &k in &cfg.orders {
                    if let Some(v) = table.get(k, r) {
                        let _ = write!(line, " I_{k} = {v:.6e}");
                    }
                }
                println!("{line}");
            }
        }
    }
    Ok(vec![write_file(cfg.output_with(".csv"), &csv)?])
}

fn limit(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let spec = LimitLawSpec::for_config(&cfg.model)?;
    let sd = limit_cumulant(&spec, 2)?.sqrt();
    let t_max = 20.0 / sd;
    let mut cf = String::from("t,re,im\n");
    for i in 0..CF_POINTS {
        let half = (CF_POINTS / 2) as f64;
        let t = t_max * (i as f64 - half) / half;
        let psi = log_characteristic_function(&spec, t)?.exp();
        let _ = writeln!(cf, "{t},{},{}", psi.re, psi.im);
    }
    let inverted = InvertedCdf::standard(&spec)?;
    let mut cdf = String::from("x,F\n");
    let (xs, fs) = inverted.grid();
    for (x, f) in xs.iter().zip(fs) {
        let _ = writeln!(cdf, "{x},{f}");
    }
    let mut written = vec![
        write_file(cfg.output_with("_cf.csv"), &cf)?,
        write_file(cfg.output_with("_cdf.csv"), &cdf)?,
    ];
    println!(
        "d={} λ={} rate={}: var {:.6}, cum3 {:.6}, T0 {:.4}, scale {:.6}, median {:.6}",
        spec.d,
        spec.lambda,
        spec.rate,
        sd * sd,
        limit_cumulant(&spec, 3)?,
        spec.t0,
        spec.scale_constant,
        inverted.quantile(0.5)
    );
    if let Some(path) = &cfg.dump {
        let draws = sample_limit(&spec, cfg.n_replicates, cfg.seed)?;
        let mut buf = Vec::with_capacity(40 + 8 * draws.len());
        write_scalar(&mut buf, spec.d, spec.lambda, spec.t0, cfg.seed, &draws)?;
        if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, buf)?;
        written.push(path.clone());
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        println!("{} draws, sample mean {mean:+.5}", draws.len());
    }
    Ok(written)
}

fn regimes(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut csv = String::new();
    for &d in &cfg.d_list {
        for &lambda in &cfg.lambda_list {
            let template = ModelConfig::with_multiplier(d, lambda, cfg.r_list[0], cfg.multiplier)?;
            let report = regime_report_for(&template, &cfg.r_list, cfg.n_replicates, cfg.seed)?;
            let text = report.to_csv();
            if csv.is_empty() {
                csv.push_str(&text);
            } else {
                csv.extend(text.lines().skip(1).map(|l| format!("{l}\n")));
            }
            for row in &report.rows {
                println!(
                    "d={d} λ={lambda} R={}: k3 {:+.4}, KS N(0,1) {:.4}, KS N(0,½) {:.4}, KS limit {:.4}, S+ share {:.3}",
                    row.radius, row.k3, row.ks_normal1, row.ks_normal_half, row.ks_limit, row.positive_share
                );
            }
        }
    }
    Ok(vec![write_file(cfg.output_with(".csv"), &csv)?])
}

fn render(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let sample = ProcessSampler::new(&cfg.model).sample(cfg.seed, 0);
    let svg = render_disk(&sample)?;
    println!(
        "{}: {} hyperplanes hit the ball",
        cell_label(&cfg.model),
        sample.coords.len()
    );
    Ok(vec![write_file(cfg.output_with(".svg"), &svg)?])
}
