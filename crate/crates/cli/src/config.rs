//! Flag and config-file parsing.
//!
//! The file is UTF-8, one `key=value` per line; `#` starts a comment. Keys use
//! the flag names without dashes. Flags win over file values.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use lhp_core::ModelConfig;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sample,
    Crofton,
    Variance,
    Cumulants,
    Limit,
    Regimes,
    Render,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::Crofton => "crofton",
            Command::Variance => "variance",
            Command::Cumulants => "cumulants",
            Command::Limit => "limit",
            Command::Regimes => "regimes",
            Command::Render => "render",
        }
    }

    /// Commands that produce one artifact for one `(d, λ)` pair.
    fn single_cell(self) -> bool {
        matches!(self, Command::Sample | Command::Limit | Command::Render)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Parser)]
#[command(name = "lhp", version, about = "Poisson λ-geodesic hyperplane experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Simulate replicates of S_R and write (replicate, S, S_plus, S_minus)
    Sample(Flags),
    /// Monte Carlo mean of S_R against the analytic expectation
    Crofton(Flags),
    /// Monte Carlo variance of S_R against the moment integral
    Variance(Flags),
    /// Table of the moment integrals I_k(R)
    Cumulants(Flags),
    /// Characteristic function and CDF of the infinitely divisible limit
    Limit(Flags),
    /// Distributional distances of the normalized S_R per radius
    Regimes(Flags),
    /// SVG of one d=2 realization in the Poincaré disk
    Render(Flags),
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// Dimension (comma list for sweeps)
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    /// Normal curvature in [0, 1] (comma list for sweeps)
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Ball radii
    #[arg(long = "R", value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Replicates (or limit-law draws)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Intensity multiplier; 0.5 gives the unoriented geodesic measure
    #[arg(long)]
    multiplier: Option<f64>,
    /// Output path prefix
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 = all cores
    #[arg(long)]
    threads: Option<usize>,
    /// Moment orders for `cumulants`
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// Binary dump of the sampled processes (sample) or draws (limit)
    #[arg(long)]
    dump: Option<PathBuf>,
    /// key=value file with defaults for any of the flags above
    #[arg(long)]
    config: Option<PathBuf>,
}

pub const FILE_KEYS: [&str; 10] = [
    "d", "lambda", "R", "n", "seed", "multiplier", "out", "threads", "k", "dump",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    /// First cell of the sweep; the one used by single-cell commands.
    pub model: ModelConfig,
    pub d_list: Vec<usize>,
    pub lambda_list: Vec<f64>,
    pub multiplier: f64,
    pub n_replicates: usize,
    pub r_list: Vec<f64>,
    pub seed: u64,
    pub output_path: PathBuf,
    pub threads: usize,
    pub orders: Vec<u32>,
    pub dump: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Every `(d, λ, R)` model of the sweep, `d` outermost and `R` innermost.
    pub fn cells(&self) -> Vec<ModelConfig> {
        let mut out = Vec::new();
        for &d in &self.d_list {
            for &lambda in &self.lambda_list {
                for &r in &self.r_list {
                    // validated in `parse_config`
                    out.push(ModelConfig::with_multiplier(d, lambda, r, self.multiplier).unwrap());
                }
            }
        }
        out
    }

    /// Path `<out><suffix>`.
    pub fn output_with(&self, suffix: &str) -> PathBuf {
        let mut s = self.output_path.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    }
}

/// Parses `argv` (including the program name) and the optional `--config` file.
pub fn parse_config<I, T>(argv: I) -> Result<ExperimentConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (command, flags) = match cli.command {
        Sub::Sample(f) => (Command::Sample, f),
        Sub::Crofton(f) => (Command::Crofton, f),
        Sub::Variance(f) => (Command::Variance, f),
        Sub::Cumulants(f) => (Command::Cumulants, f),
        Sub::Limit(f) => (Command::Limit, f),
        Sub::Regimes(f) => (Command::Regimes, f),
        Sub::Render(f) => (Command::Render, f),
    };
    let file = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => Flags::default(),
    };
    resolve(command, merge(flags, file))
}

fn merge(flags: Flags, file: Flags) -> Flags {
    Flags {
        d: flags.d.or(file.d),
        lambda: flags.lambda.or(file.lambda),
        radii: flags.radii.or(file.radii),
        n: flags.n.or(file.n),
        seed: flags.seed.or(file.seed),
        multiplier: flags.multiplier.or(file.multiplier),
        out: flags.out.or(file.out),
        threads: flags.threads.or(file.threads),
        k: flags.k.or(file.k),
        dump: flags.dump.or(file.dump),
        config: None,
    }
}

fn resolve(command: Command, f: Flags) -> Result<ExperimentConfig, CliError> {
    let d_list = f.d.unwrap_or_else(|| vec![2]);
    let lambda_list = f.lambda.unwrap_or_else(|| vec![0.0]);
    let r_list = f.radii.unwrap_or_else(|| vec![3.0]);
    let multiplier = f.multiplier.unwrap_or(1.0);
    let n_replicates = f.n.unwrap_or(1000);
    let orders = f.k.unwrap_or_else(|| vec![1, 2, 3, 4]);

    if d_list.is_empty() || lambda_list.is_empty() || r_list.is_empty() {
        return Err(CliError::Usage("--d, --lambda and --R need at least one value".into()));
    }
    if n_replicates == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if orders.is_empty() {
        return Err(CliError::Usage("--k needs at least one order".into()));
    }
    if command.single_cell() && (d_list.len() > 1 || lambda_list.len() > 1) {
        return Err(CliError::Usage(format!(
            "`{command}` takes a single --d and --lambda"
        )));
    }
    // every cell must be a valid model
    for &d in &d_list {
        for &lambda in &lambda_list {
            for &r in &r_list {
                ModelConfig::with_multiplier(d, lambda, r, multiplier)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
        }
    }
    let model = ModelConfig::with_multiplier(d_list[0], lambda_list[0], r_list[0], multiplier)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(ExperimentConfig {
        command,
        model,
        d_list,
        lambda_list,
        multiplier,
        n_replicates,
        r_list,
        seed: f.seed.unwrap_or(1),
        output_path: f.out.unwrap_or_else(|| PathBuf::from(format!("lhp_{command}"))),
        threads: f.threads.unwrap_or(0),
        orders,
        dump: f.dump,
    })
}

fn read_config_file(path: &Path) -> Result<Flags, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_config_text(text: &str) -> Result<Flags, CliError> {
    let mut f = Flags::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(line_error(line_no, format!("expected key=value, got `{line}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: String| line_error(line_no, format!("{key}: {e}"));
        match key {
            "d" => f.d = Some(list(value).map_err(bad)?),
            "lambda" => f.lambda = Some(list(value).map_err(bad)?),
            "R" => f.radii = Some(list(value).map_err(bad)?),
            "n" => f.n = Some(scalar(value).map_err(bad)?),
            "seed" => f.seed = Some(scalar(value).map_err(bad)?),
            "multiplier" => f.multiplier = Some(scalar(value).map_err(bad)?),
            "out" => f.out = Some(PathBuf::from(value)),
            "threads" => f.threads = Some(scalar(value).map_err(bad)?),
            "k" => f.k = Some(list(value).map_err(bad)?),
            "dump" => f.dump = Some(PathBuf::from(value)),
            _ => {
                return Err(line_error(
                    line_no,
                    format!("unknown key `{key}`; valid keys: {}", FILE_KEYS.join(", ")),
                ))
            }
        }
    }
    Ok(f)
}

fn line_error(line: usize, msg: String) -> CliError {
    CliError::Usage(format!("config line {line}: {msg}"))
}

fn scalar<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("malformed value `{v}` ({e})"))
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    v.split(',').map(|x| scalar(x.trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        std::iter::once("lhp".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn populated_from_flags() {
        let c = parse_config(argv("crofton --d 4 --lambda 0 --R 5 --n 1000 --seed 7")).unwrap();
        assert_eq!(c.command, Command::Crofton);
        assert_eq!((c.model.d, c.model.lambda, c.model.radius), (4, 0.0, 5.0));
        assert_eq!(c.n_replicates, 1000);
        assert_eq!(c.seed, 7);
        assert_eq!(c.r_list, vec![5.0]);
    }

    #[test]
    fn lambda_out_of_range_is_a_usage_error() {
        let e = parse_config(argv("crofton --lambda 1.5")).unwrap_err();
        assert!(matches!(e, CliError::Usage(_)));
        assert!(e.to_string().contains("lambda"));
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn comma_lists_and_cells() {
        let c = parse_config(argv("crofton --d 2,3 --lambda 0,0.5,1 --R 2,3")).unwrap();
        assert_eq!(c.cells().len(), 12);
        assert_eq!(c.output_path, PathBuf::from("lhp_crofton"));
    }

    #[test]
    fn single_cell_commands_reject_sweeps() {
        assert!(parse_config(argv("render --lambda 0,1")).is_err());
        assert!(parse_config(argv("render --lambda 1 --R 3")).is_ok());
    }

    #[test]
    fn file_parsing() {
        let f = parse_config_text("# sweep\nlambda=0.5\n\nR=3,4,5  # radii\nseed = 9\n").unwrap();
        assert_eq!(f.lambda, Some(vec![0.5]));
        assert_eq!(f.radii, Some(vec![3.0, 4.0, 5.0]));
        assert_eq!(f.seed, Some(9));
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let e = parse_config_text("d=3\nn=ten\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let e = parse_config_text("d=3\n\nradius=4\n").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("valid keys") && e.contains("multiplier"), "{e}");
        let e = parse_config_text("lambda 0.5\n").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
    }

    #[test]
    fn unknown_flag_is_usage() {
        let e = parse_config(argv("crofton --radius 3")).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }
}
