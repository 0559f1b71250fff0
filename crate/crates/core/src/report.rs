//! CSV/JSON output and the `verify`, `flow` and `window` commands.
//!
//! Settings resolve as command-line flag, then `--config` TOML file, then
//! built-in default. The default seed is `7` unless `KPFLOW_SEED` is set.
//! Exit codes: `0` success, `1` certified violation or integration failure,
//! `2` configuration error or starting radius outside the domain.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::ambient::{curvature_tensor, AmbientSpace};
use crate::error::{Error, Result};
use crate::flow::{evolution_residuals, evolve, gap_ratio, monitor_report, FlowSample, FlowTrajectory, Residuals, StopPolicy, Termination};
use crate::lab::{run_suite, suite_passes, ParamsGrid, TrialReport};
use crate::profiles::{EquivariantFamily, FamilyKind};
use crate::spectrum::{alpha_window, dimension_gate, AlphaChoice, PinchingParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub const SEED_ENV: &str = "KPFLOW_SEED";
pub const DEFAULT_SEED: u64 = 7;
pub const MAX_CSV_ROWS: usize = 10_000;

pub const CSV_HEADER: &str =
    "t,r,H,normA2,normAo2,Z,Q,f_sigma_eta,lambda1,lambda1_plus_lambda2,gap_ratio,log_volume";

/// One CSV row in full double precision.
pub fn csv_row(s: &FlowSample) -> String {
    let l = s.spectrum.lambdas();
    let fields = [
        s.t,
        s.r,
        s.h,
        s.norm_a2,
        s.spectrum.norm_ao2,
        s.spectrum.simons_z,
        s.q,
        s.f_sigma_eta,
        l[0],
        l[0] + l[1],
        gap_ratio(&s.spectrum),
        s.log_volume,
    ];
    let mut out = String::with_capacity(fields.len() * 24);
    for (i, v) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{v:.16e}").expect("writing to a String");
    }
    out
}

/// Indices of at most `max_rows` samples, evenly spread and always keeping the
/// first and last.
pub fn downsample_indices(len: usize, max_rows: usize) -> Vec<usize> {
    if len <= max_rows {
        return (0..len).collect();
    }
    if max_rows < 2 {
        return if max_rows == 0 { Vec::new() } else { vec![len - 1] };
    }
    let mut idx: Vec<usize> = (0..max_rows).map(|i| i * (len - 1) / (max_rows - 1)).collect();
    idx.dedup();
    idx
}

/// Writes the header and the downsampled rows; returns the row count.
pub fn write_flow_csv<W: Write>(trajectory: &FlowTrajectory, max_rows: usize, mut w: W) -> io::Result<usize> {
    writeln!(w, "{CSV_HEADER}")?;
    let idx = downsample_indices(trajectory.samples.len(), max_rows);
    for &i in &idx {
        writeln!(w, "{}", csv_row(&trajectory.samples[i]))?;
    }
    w.flush()?;
    Ok(idx.len())
}

/// Scalar digest of the monitor traces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonitorDigest {
    pub q_initial: f64,
    pub max_q: f64,
    pub c_prime: f64,
    pub final_lambda1_ratio: f64,
    pub final_gap_ratio: f64,
    pub min_two_convexity_margin: f64,
    pub final_norm_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowFooter {
    pub family: String,
    pub r0: f64,
    pub params: PinchingParams,
    pub stop: StopPolicy,
    pub termination: Termination,
    pub samples: usize,
    pub rows_written: usize,
    pub final_t: f64,
    pub final_h: f64,
    pub t_singular_estimate: f64,
    /// `m / (2 H(0)²)`.
    pub t_singular_upper_bound: f64,
    pub residuals: Option<Residuals>,
    pub monitor: MonitorDigest,
}

pub fn flow_footer(trajectory: &FlowTrajectory, rows_written: usize, stop: &StopPolicy) -> FlowFooter {
    let first = &trajectory.samples[0];
    let last = trajectory.last();
    let summary = monitor_report(trajectory, &trajectory.params);
    let tensor = curvature_tensor(&trajectory.family.space);
    FlowFooter {
        family: trajectory.family.label(),
        r0: first.r,
        params: trajectory.params,
        stop: *stop,
        termination: trajectory.termination,
        samples: trajectory.samples.len(),
        rows_written,
        final_t: last.t,
        final_h: last.h,
        t_singular_estimate: trajectory.t_singular_estimate,
        t_singular_upper_bound: trajectory.family.space.m as f64 / (2.0 * first.h * first.h),
        residuals: evolution_residuals(trajectory, &tensor).ok(),
        monitor: MonitorDigest {
            q_initial: summary.q_initial,
            max_q: summary.max_q,
            c_prime: summary.c_prime,
            final_lambda1_ratio: summary.lambda1_ratio.last().map_or(f64::NAN, |p| p.value),
            final_gap_ratio: summary.gap_ratio.last().map_or(f64::NAN, |p| p.value),
            min_two_convexity_margin: summary
                .two_convexity_margin
                .iter()
                .map(|p| p.value)
                .fold(f64::INFINITY, f64::min),
            final_norm_ratio: summary.final_norm_ratio,
        },
    }
}

/// Parses `cp4`, `hp3..hp5` and comma/space separated lists of both.
pub fn parse_space_list<S: AsRef<str>>(items: &[S]) -> Result<Vec<AmbientSpace>> {
    let mut out = Vec::new();
    for item in items {
        for token in item.as_ref().split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token.split_once("..") {
                Some((a, b)) => {
                    let lo = AmbientSpace::parse(a)?;
                    let hi = AmbientSpace::parse(b)?;
                    if lo.field != hi.field {
                        return Err(Error::Config(format!("range {token} mixes fields")));
                    }
                    for n in lo.n..=hi.n {
                        out.push(AmbientSpace::new(lo.field, n)?);
                    }
                }
                None => out.push(AmbientSpace::parse(token)?),
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRow {
    pub space: String,
    pub n: usize,
    pub m: usize,
    pub einstein: f64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub alpha_nonempty: bool,
    pub gate_pass: bool,
}

pub fn window_table(spaces: &[AmbientSpace], eta: f64, epsilon: f64) -> Vec<WindowRow> {
    spaces
        .iter()
        .map(|s| {
            let w = alpha_window(s.m, eta);
            WindowRow {
                space: s.label(),
                n: s.n,
                m: s.m,
                einstein: s.einstein,
                alpha_lo: w.lo,
                alpha_hi: w.hi,
                alpha_nonempty: w.nonempty,
                gate_pass: dimension_gate(s, epsilon).pass,
            }
        })
        .collect()
}

pub fn format_window_table(rows: &[WindowRow]) -> String {
    let mut out = format!(
        "{:<6} {:>3} {:>4} {:>6} {:>22} {:>22} {:>8} {:>5}\n",
        "space", "n", "m", "rbar", "alpha_lo", "alpha_hi", "nonempty", "pass"
    );
    for r in rows {
        writeln!(
            out,
            "{:<6} {:>3} {:>4} {:>6} {:>22.16e} {:>22.16e} {:>8} {:>5}",
            r.space, r.n, r.m, r.einstein, r.alpha_lo, r.alpha_hi, r.alpha_nonempty, r.gate_pass
        )
        .expect("writing to a String");
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub space: String,
    pub seed: u64,
    pub trials: u64,
    pub pass: bool,
    pub reports: Vec<TrialReport>,
}

/// Keys accepted in a `--config` file. Flags of the same name win.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub space: Option<String>,
    pub family: Option<String>,
    pub k: Option<usize>,
    pub r0: Option<f64>,
    pub epsilon: Option<f64>,
    pub eta: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub curvature_cap: Option<f64>,
    pub radius_floor: Option<f64>,
    pub time_cap: Option<f64>,
    pub resolution: Option<f64>,
    pub max_rows: Option<usize>,
    pub output: Option<PathBuf>,
    pub epsilons: Option<Vec<f64>>,
    pub etas: Option<Vec<f64>>,
    pub sigmas: Option<Vec<f64>>,
    pub spaces: Option<Vec<String>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    path.as_deref().map_or(Ok(ConfigFile::default()), ConfigFile::load)
}

/// Seed from `KPFLOW_SEED`, else [`DEFAULT_SEED`].
pub fn env_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV} = {v:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn parse_alpha(text: &str) -> Result<AlphaChoice> {
    if text.eq_ignore_ascii_case("midpoint") {
        return Ok(AlphaChoice::Midpoint);
    }
    text.parse()
        .map(AlphaChoice::Value)
        .map_err(|_| Error::Config(format!("alpha must be `midpoint` or a number, got {text:?}")))
}

#[derive(Debug, Parser)]
#[command(name = "kpflow", version, about = "Mean curvature flow of hypersurfaces in CP^n and HP^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the inequality suite and ambient checks; exit 1 on a certified violation.
    Verify(VerifyArgs),
    /// Integrate a sphere or tube and write the time series as CSV.
    Flow(FlowArgs),
    /// Tabulate the alpha window and dimension gate for a list of spaces.
    Window(WindowArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Ambient space, e.g. `cp4` or `hp4`.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// JSON report path; stdout if absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long)]
    pub space: Option<String>,
    /// `sphere` or `tube`.
    #[arg(long)]
    pub family: Option<String>,
    /// Core dimension of a tube.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// `midpoint` or a value inside the alpha window.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub curvature_cap: Option<f64>,
    #[arg(long)]
    pub radius_floor: Option<f64>,
    #[arg(long)]
    pub time_cap: Option<f64>,
    /// Step cap as a fraction of `r/H`.
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long)]
    pub max_rows: Option<usize>,
    /// CSV path; the footer goes to `<path>.json`. Without it the CSV goes to
    /// stdout and the footer to stderr.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Spaces such as `cp4`, `hp3..hp5`, `cp3,cp5`.
    pub spaces: Vec<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// `ε` for the dimension gate.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Flow(a) => cmd_flow(&a),
        Command::Window(a) => cmd_window(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kpflow: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Integration(_) | Error::Io(_) => EXIT_FAILURE,
        _ => EXIT_CONFIG,
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let file = load_config(&args.config)?;
    let space = AmbientSpace::parse(args.space.as_deref().or(file.space.as_deref()).unwrap_or("cp4"))?;
    let trials = args.trials.or(file.trials).unwrap_or(100_000);
    if trials == 0 {
        return Err(Error::Config("trials must be positive".into()));
    }
    let seed = match args.seed.or(file.seed) {
        Some(s) => s,
        None => env_seed()?,
    };
    let defaults = ParamsGrid::default();
    let grid = ParamsGrid {
        epsilons: args.epsilons.clone().or(file.epsilons).unwrap_or(defaults.epsilons),
        etas: args.etas.clone().or(file.etas).unwrap_or(defaults.etas),
        sigmas: args.sigmas.clone().or(file.sigmas).unwrap_or(defaults.sigmas),
    };
    if grid.is_empty() {
        return Err(Error::Config("parameter grid is empty".into()));
    }
    for &eps in &grid.epsilons {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Config(format!("epsilon = {eps} not in (0, 1)")));
        }
    }
    for &eta in &grid.etas {
        if !(eta > 0.0) {
            return Err(Error::Config(format!("eta = {eta} must be positive")));
        }
    }
    for &sigma in &grid.sigmas {
        if !(0.0..1.0).contains(&sigma) {
            return Err(Error::Config(format!("sigma = {sigma} not in [0, 1)")));
        }
    }
    let reports = run_suite(&space, &grid, trials, seed);
    let pass = suite_passes(&reports);
    for r in &reports {
        let status = match (r.tier, r.passed()) {
            (crate::lab::Tier::Certified, true) => "ok",
            (crate::lab::Tier::Certified, false) => "VIOLATED",
            (crate::lab::Tier::Informational, _) if r.violations > 0 => "fail (informational)",
            _ => "-",
        };
        eprintln!(
            "{:<52} {:>9} trials {:>6} violations  min slack {:>12.4e}  {status}",
            r.claim_id, r.trials, r.violations, r.min_slack
        );
    }
    let report = VerifyReport {
        space: space.label(),
        seed,
        trials,
        pass,
        reports,
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    write_output(&args.output, &(json + "\n"))?;
    Ok(if pass { EXIT_OK } else { EXIT_FAILURE })
}

pub fn cmd_flow(args: &FlowArgs) -> Result<i32> {
    let file = load_config(&args.config)?;
    let space = AmbientSpace::parse(args.space.as_deref().or(file.space.as_deref()).unwrap_or("cp4"))?;
    let kind = match args.family.as_deref().or(file.family.as_deref()).unwrap_or("sphere") {
        "sphere" => FamilyKind::GeodesicSphere,
        "tube" => FamilyKind::TubeAroundKPk(args.k.or(file.k).unwrap_or(1)),
        other => return Err(Error::Config(format!("family must be `sphere` or `tube`, got {other:?}"))),
    };
    let family = EquivariantFamily::new(space, kind)?;
    let r0 = args.r0.or(file.r0).unwrap_or(std::f64::consts::FRAC_PI_4);
    let alpha = parse_alpha(args.alpha.as_deref().or(file.alpha.as_deref()).unwrap_or("midpoint"))?;
    let params = PinchingParams::new(
        space.m,
        args.epsilon.or(file.epsilon).unwrap_or(1e-2),
        args.eta.or(file.eta).unwrap_or(1e-2),
        args.sigma.or(file.sigma).unwrap_or(1e-2),
        alpha,
    )?;
    let defaults = StopPolicy::default();
    let stop = StopPolicy {
        curvature_cap: args.curvature_cap.or(file.curvature_cap).unwrap_or(defaults.curvature_cap),
        radius_floor: args.radius_floor.or(file.radius_floor).unwrap_or(defaults.radius_floor),
        time_cap: args.time_cap.or(file.time_cap).unwrap_or(defaults.time_cap),
        resolution: args.resolution.or(file.resolution).unwrap_or(defaults.resolution),
    };
    if !(stop.resolution > 0.0 && stop.resolution <= 1.0) || !(stop.time_cap > 0.0) || !(stop.curvature_cap > 0.0) {
        return Err(Error::Config(format!("invalid stop policy {stop:?}")));
    }
    let max_rows = args.max_rows.or(file.max_rows).unwrap_or(MAX_CSV_ROWS).clamp(2, MAX_CSV_ROWS);
    let output = args.output.clone().or(file.output);

    let trajectory = evolve(&family, r0, &params, &stop)?;
    let mut csv = Vec::new();
    let rows = write_flow_csv(&trajectory, max_rows, &mut csv)?;
    let footer = flow_footer(&trajectory, rows, &stop);
    let footer_json = serde_json::to_string_pretty(&footer).map_err(|e| Error::Io(e.to_string()))? + "\n";
    match &output {
        Some(path) => {
            fs::write(path, &csv)?;
            let mut footer_path = path.clone().into_os_string();
            footer_path.push(".json");
            fs::write(PathBuf::from(footer_path), footer_json)?;
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&csv)?;
            out.flush()?;
            eprint!("{footer_json}");
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_window(args: &WindowArgs) -> Result<i32> {
    let file = load_config(&args.config)?;
    let items = if args.spaces.is_empty() {
        file.spaces.unwrap_or_default()
    } else {
        args.spaces.clone()
    };
    let spaces = parse_space_list(&items)?;
    let eta = args.eta.or(file.eta).unwrap_or(0.0);
    let epsilon = args.epsilon.or(file.epsilon).unwrap_or(1e-2);
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon = {epsilon} not in (0, 1)")));
    }
    let rows = window_table(&spaces, eta, epsilon);
    let text = if args.json {
        serde_json::to_string_pretty(&rows).map_err(|e| Error::Io(e.to_string()))? + "\n"
    } else {
        format_window_table(&rows)
    };
    write_output(&None, &text)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_ranges() {
        let s = parse_space_list(&["cp3..cp6", "hp4,hp5"]).unwrap();
        let labels: Vec<String> = s.iter().map(AmbientSpace::label).collect();
        assert_eq!(labels, ["cp3", "cp4", "cp5", "cp6", "hp4", "hp5"]);
        assert!(parse_space_list(&["cp3..hp4"]).is_err());
        assert!(parse_space_list(&["xp3"]).is_err());
        assert!(parse_space_list::<&str>(&[]).unwrap().is_empty());
    }

    #[test]
    fn window_pass_column() {
        let cp = window_table(&parse_space_list(&["cp3..cp6"]).unwrap(), 0.0, 1e-2);
        assert_eq!(cp.iter().map(|r| r.gate_pass).collect::<Vec<_>>(), [false, true, true, true]);
        let hp = window_table(&parse_space_list(&["hp3..hp5"]).unwrap(), 0.0, 1e-2);
        assert_eq!(hp.iter().map(|r| r.gate_pass).collect::<Vec<_>>(), [false, true, true]);
    }

    #[test]
    fn downsampling_keeps_ends() {
        assert_eq!(downsample_indices(5, 10), [0, 1, 2, 3, 4]);
        let idx = downsample_indices(100_001, 10_000);
        assert_eq!(idx.len(), 10_000);
        assert_eq!((idx[0], *idx.last().unwrap()), (0, 100_000));
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn alpha_parsing() {
        assert_eq!(parse_alpha("midpoint").unwrap(), AlphaChoice::Midpoint);
        assert_eq!(parse_alpha("0.1").unwrap(), AlphaChoice::Value(0.1));
        assert!(parse_alpha("big").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(toml::from_str::<ConfigFile>("space = \"cp4\"\nseed = 3").is_ok());
        assert!(toml::from_str::<ConfigFile>("spice = \"cp4\"").is_err());
    }
}
