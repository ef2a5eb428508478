//! Command-line front end: config loading, per-command pipelines and
//! output writing. `main.rs` only maps the outcome onto an exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asympt::{evaluate, known_h_alpha, AsymptoticResult, Constants};
use crate::classifier::{classify, h1_limit, CaseLabel, H1Limit, SideCase};
use crate::error::{Error, Result};
use crate::mc::{
    default_intervals, exceedance_schedule, fmt17, validate, ValidationRow, CSV_HEADER,
};
use crate::pickands::{
    default_grid_step, estimate_h_alpha, estimate_h_alpha_t, estimate_p_alpha, Estimator,
    PickandsOptions,
};
use crate::process::{audit_assumptions, ProcessSpec, Side, VarianceProfile};
use crate::rearrangement::DEFAULT_A;

#[derive(Debug, Parser)]
#[command(
    name = "gaussmax",
    version,
    about = "Tail asymptotics and Monte Carlo for maxima of Gaussian processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify each side of the variance maximum as S, T or P.
    Classify(ConfigArgs),
    /// Check the standing assumptions numerically.
    Audit(AuditArgs),
    /// Estimate a Pickands or transition constant.
    Pickands(PickandsArgs),
    /// Evaluate the asymptotic formula for the spec's case.
    Asymptotic(LevelArgs),
    /// Monte Carlo exceedance probabilities.
    Mc(McArgs),
    /// Monte Carlo against the asymptotic formula over a level schedule.
    Validate(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; defaults to the file extension, then JSON.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Grid intervals for the checks.
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PickandsArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Horizons; a single value estimates the finite-horizon constant.
    #[arg(
        long = "T-schedule",
        alias = "t-schedule",
        value_delimiter = ',',
        default_value = "4,8,16"
    )]
    pub t_schedule: Vec<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Drift coefficient on the right; with `--b-minus`, estimates the
    /// transition constants instead of `H_α`. Use `inf` for a frozen side.
    #[arg(long)]
    pub b_plus: Option<f64>,
    #[arg(long)]
    pub b_minus: Option<f64>,
    #[arg(long, value_enum, default_value = "shifted")]
    pub estimator: EstimatorArg,
    /// Repeat at half the grid step.
    #[arg(long)]
    pub refine: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Direct,
    Shifted,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub u: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub u: Vec<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Grid intervals over the domain.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parameters for constants that have to be simulated.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PickandsParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_schedule: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub format: Option<Format>,
}

/// A run configuration. Command-line flags override its fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec: Option<ProcessSpec>,
    /// Path of a spec file, relative to the config file.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub u: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub paths: Option<usize>,
    /// Grid intervals over the domain.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Exponent `A` of the truncation `x_cut = 2u⁻² log^A u`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a_exponent: Option<f64>,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default)]
    pub pickands: PickandsParams,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<OutputSpec>,
}

impl RunConfig {
    /// Parses a config file and inlines its spec. Errors carry the file
    /// name and the line and column of the offending field.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("."))).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parses config text; `base` resolves a relative `spec_file`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        match (&cfg.spec, &cfg.spec_file) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either spec or spec_file, not both".into(),
                ))
            }
            (None, None) => return Err(Error::Config("missing field `spec`".into())),
            (None, Some(f)) => {
                let p = base.join(f);
                let t = fs::read_to_string(&p)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                let spec: ProcessSpec = serde_json::from_str(&t)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                cfg.spec = Some(spec);
                cfg.spec_file = None;
            }
            (Some(_), None) => {}
        }
        cfg.spec().validate()?;
        Ok(cfg)
    }

    pub fn spec(&self) -> &ProcessSpec {
        self.spec.as_ref().expect("spec resolved at load")
    }
}

/// What a JSON output contains, and what the `.run.json` sidecar of a CSV
/// output contains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    /// Fully resolved configuration, seed included.
    pub config: serde_json::Value,
    pub result: serde_json::Value,
}

/// Output of one command: its run record and, for tabular results, CSV.
pub struct Artifact {
    pub record: RunRecord,
    pub csv: String,
}

fn record(command: &str, config: &impl Serialize, result: &impl Serialize) -> Result<RunRecord> {
    Ok(RunRecord {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(config)?,
        result: serde_json::to_value(result)?,
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt17(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), fmt17)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    #[serde(flatten)]
    pub label: CaseLabel,
    pub combined: String,
    pub h1: Vec<SideLimit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideLimit {
    pub side: Side,
    #[serde(flatten)]
    pub limit: H1Limit,
}

/// `classify` pipeline.
pub fn run_classify(cfg: &RunConfig) -> Result<Artifact> {
    let spec = cfg.spec();
    let label = classify(spec)?;
    let mut h1 = Vec::new();
    for side in spec.sides() {
        h1.push(SideLimit {
            side,
            limit: h1_limit(spec, side, side.sign())?,
        });
    }
    let mut csv = String::from("side,case,b\n");
    for s in &h1 {
        let b = if s.limit.case == SideCase::P {
            fmt17(s.limit.value)
        } else {
            String::new()
        };
        let name = if s.side == Side::Plus {
            "right"
        } else {
            "left"
        };
        let _ = writeln!(csv, "{name},{},{b}", s.limit.case);
    }
    let result = ClassifyResult {
        combined: label.combined(),
        label,
        h1,
    };
    Ok(Artifact {
        record: record("classify", cfg, &result)?,
        csv,
    })
}

/// Default audit grid intervals.
pub const AUDIT_GRID: usize = 1024;

/// `audit` pipeline.
pub fn run_audit(cfg: &RunConfig, grid: Option<usize>) -> Result<Artifact> {
    let mut cfg = cfg.clone();
    let g = grid.or(cfg.grid).unwrap_or(AUDIT_GRID);
    cfg.grid = Some(g);
    let report = audit_assumptions(cfg.spec(), g)?;
    let mut csv = String::from("check,passed,measured,detail\n");
    for c in &report.checks {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            c.name,
            c.passed,
            fmt17(c.measured),
            csv_field(&c.detail)
        );
    }
    Ok(Artifact {
        record: record("audit", &cfg, &report)?,
        csv,
    })
}

#[derive(Debug, Clone, Serialize)]
struct PickandsConfig {
    alpha: f64,
    t_schedule: Vec<f64>,
    grid_step: f64,
    paths: usize,
    seed: u64,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::serde_ext::extended_opt::serialize"
    )]
    b_plus: Option<f64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::serde_ext::extended_opt::serialize"
    )]
    b_minus: Option<f64>,
    options: PickandsOptions,
}

fn estimate_rows(csv: &mut String, e: &crate::pickands::PickandsEstimate) {
    let kind = serde_json::to_value(e.kind)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    for h in &e.per_horizon {
        let _ = writeln!(
            csv,
            "{kind},{},{},{}",
            fmt17(h.t),
            fmt17(h.value),
            fmt17(h.std_error)
        );
    }
    if e.per_horizon.len() > 1 {
        let _ = writeln!(csv, "{kind},inf,{},{}", fmt17(e.value), fmt17(e.std_error));
    }
}

/// `pickands` pipeline.
pub fn run_pickands(a: &PickandsArgs) -> Result<Artifact> {
    let opts = PickandsOptions {
        estimator: match a.estimator {
            EstimatorArg::Direct => Estimator::Direct,
            EstimatorArg::Shifted => Estimator::Shifted,
        },
        refine: a.refine,
        ..PickandsOptions::default()
    };
    let t_max = a.t_schedule.iter().cloned().fold(f64::NAN, f64::max);
    let grid_step = a
        .grid_step
        .unwrap_or_else(|| default_grid_step(a.alpha, t_max));
    let config = PickandsConfig {
        alpha: a.alpha,
        t_schedule: a.t_schedule.clone(),
        grid_step,
        paths: a.paths,
        seed: a.seed,
        b_plus: a.b_plus,
        b_minus: a.b_minus,
        options: opts,
    };
    let mut csv = String::from("kind,t,value,std_error\n");
    let rec = match (a.b_plus, a.b_minus) {
        (None, None) => {
            let e = if a.t_schedule.len() == 1 {
                estimate_h_alpha_t(a.alpha, a.t_schedule[0], grid_step, a.paths, a.seed, &opts)?
            } else {
                estimate_h_alpha(a.alpha, &a.t_schedule, grid_step, a.paths, a.seed, &opts)?
            };
            estimate_rows(&mut csv, &e);
            record("pickands", &config, &e)?
        }
        (bp, bm) => {
            let tc = estimate_p_alpha(
                a.alpha,
                bp.unwrap_or(f64::INFINITY),
                bm.unwrap_or(f64::INFINITY),
                &a.t_schedule,
                grid_step,
                a.paths,
                a.seed,
                &opts,
            )?;
            estimate_rows(&mut csv, &tc.p_alpha);
            estimate_rows(&mut csv, &tc.p_alpha_plus);
            record("pickands", &config, &tc)?
        }
    };
    Ok(Artifact { record: rec, csv })
}

/// Defaults for simulated constants.
pub const DEFAULT_CONSTANT_PATHS: usize = 20_000;
pub const DEFAULT_T_SCHEDULE: [f64; 3] = [4.0, 8.0, 16.0];

/// Fills in the constants the spec's case needs: config values first,
/// then known closed forms, then simulation.
pub fn resolve_constants(cfg: &RunConfig, simulate: bool) -> Result<Constants> {
    let spec = cfg.spec();
    let alpha = spec.alpha();
    let mut c = cfg.constants.clone();
    let (need_h, p_bs) = if matches!(spec.variance, VarianceProfile::Unit) {
        (true, None)
    } else {
        let label = classify(spec)?;
        let present: Vec<_> = spec
            .sides()
            .into_iter()
            .filter_map(|s| label.side(s).map(|k| (s, k)))
            .collect();
        let need_h = present.iter().any(|p| p.1 == SideCase::S);
        let p_sides: Vec<Side> = present
            .iter()
            .filter(|p| p.1 == SideCase::P)
            .map(|p| p.0)
            .collect();
        let p_bs = match p_sides.len() {
            _ if need_h => None,
            0 => None,
            2 => Some((
                label.b_plus.unwrap_or(f64::INFINITY),
                label.b_minus.unwrap_or(f64::INFINITY),
                true,
            )),
            _ => Some((
                label.b(p_sides[0]).unwrap_or(f64::INFINITY),
                f64::INFINITY,
                false,
            )),
        };
        (need_h, p_bs)
    };
    let pk = &cfg.pickands;
    let ts = pk
        .t_schedule
        .clone()
        .unwrap_or_else(|| DEFAULT_T_SCHEDULE.to_vec());
    let t_max = ts.iter().cloned().fold(f64::NAN, f64::max);
    let step = pk
        .grid_step
        .unwrap_or_else(|| default_grid_step(alpha, t_max));
    let paths = pk.paths.unwrap_or(DEFAULT_CONSTANT_PATHS);
    let seed = pk.seed.or(cfg.seed).unwrap_or(0);
    let opts = PickandsOptions::default();
    if need_h && c.h_alpha.is_none() {
        c.h_alpha = known_h_alpha(alpha);
        if c.h_alpha.is_none() && simulate {
            c.h_alpha = Some(estimate_h_alpha(alpha, &ts, step, paths, seed, &opts)?);
        }
    }
    if let Some((bp, bm, two)) = p_bs {
        let missing = if two {
            c.p_alpha.is_none()
        } else {
            c.p_alpha_plus.is_none()
        };
        if missing && simulate {
            let tc = estimate_p_alpha(alpha, bp, bm, &ts, step, paths, seed, &opts)?;
            if two {
                c.p_alpha = Some(tc.p_alpha);
            } else {
                c.p_alpha_plus = Some(tc.p_alpha_plus);
            }
        }
    }
    Ok(c)
}

fn levels(flag: &[f64], cfg: &RunConfig) -> Result<Vec<f64>> {
    let u = if flag.is_empty() {
        cfg.u.clone()
    } else {
        flag.to_vec()
    };
    if u.is_empty() {
        return Err(Error::Config(
            "no levels given (--u or config field `u`)".into(),
        ));
    }
    Ok(u)
}

/// `asymptotic` pipeline.
pub fn run_asymptotic(cfg: &RunConfig, u_flag: &[f64]) -> Result<Artifact> {
    let mut cfg = cfg.clone();
    cfg.u = levels(u_flag, &cfg)?;
    if let Some(a) = cfg.a_exponent {
        if a != DEFAULT_A {
            return Err(Error::Config(format!(
                "a_exponent = {a}: only the default {DEFAULT_A} is used by the asymptotic formulas"
            )));
        }
    }
    cfg.constants = resolve_constants(&cfg, true)?;
    let results: Vec<AsymptoticResult> = cfg
        .u
        .iter()
        .map(|&u| evaluate(cfg.spec(), u, &cfg.constants))
        .collect::<Result<_>>()?;
    let mut csv = String::from(
        "u,formula_id,value,ln_value,psi_u,q_u,H_alpha,L_plus,L_minus,P_alpha,P_alpha_plus\n",
    );
    for r in &results {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt17(r.u),
            r.formula_id,
            fmt17(r.value),
            fmt17(r.ln_value),
            opt17(r.ingredient("psi_u")),
            opt17(r.ingredient("q_u")),
            opt17(r.ingredient("H_alpha")),
            opt17(r.ingredient("L_plus")),
            opt17(r.ingredient("L_minus")),
            opt17(r.ingredient("P_alpha")),
            opt17(r.ingredient("P_alpha_plus")),
        );
    }
    Ok(Artifact {
        record: record("asymptotic", &cfg, &results)?,
        csv,
    })
}

/// Default Monte Carlo path count.
pub const DEFAULT_PATHS: usize = 100_000;

fn mc_config(cfg: &RunConfig, a: &McArgs) -> Result<RunConfig> {
    let mut cfg = cfg.clone();
    cfg.u = levels(&a.u, &cfg)?;
    cfg.paths = Some(a.paths.or(cfg.paths).unwrap_or(DEFAULT_PATHS));
    cfg.grid = Some(
        a.grid
            .or(cfg.grid)
            .unwrap_or_else(|| default_intervals(cfg.spec().alpha())),
    );
    cfg.seed = Some(a.seed.or(cfg.seed).unwrap_or(0));
    Ok(cfg)
}

/// `mc` pipeline. The asymptotic column is filled only when no constant
/// has to be simulated.
pub fn run_mc(cfg: &RunConfig, a: &McArgs) -> Result<Artifact> {
    let mut cfg = mc_config(cfg, a)?;
    cfg.constants = resolve_constants(&cfg, false)?;
    let (paths, grid, seed) = (cfg.paths.unwrap(), cfg.grid.unwrap(), cfg.seed.unwrap());
    let run = exceedance_schedule(cfg.spec(), &cfg.u, grid, paths, seed)?;
    let mut csv = format!("{CSV_HEADER}\n");
    for e in &run.full {
        let asym = evaluate(cfg.spec(), e.u, &cfg.constants).map_or(f64::NAN, |r| r.value);
        let row = ValidationRow {
            u: e.u,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            asymptotic: asym,
            ratio: e.p_hat / asym,
            n_paths: e.n_paths,
            grid_points: e.grid_points,
            seed,
        };
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    Ok(Artifact {
        record: record("mc", &cfg, &run)?,
        csv,
    })
}

/// `validate` pipeline.
pub fn run_validate(cfg: &RunConfig, a: &McArgs) -> Result<Artifact> {
    let mut cfg = mc_config(cfg, a)?;
    cfg.constants = resolve_constants(&cfg, true)?;
    let table = validate(
        cfg.spec(),
        &cfg.u,
        &cfg.constants,
        cfg.grid.unwrap(),
        cfg.paths.unwrap(),
        cfg.seed.unwrap(),
    )?;
    Ok(Artifact {
        csv: table.to_csv(),
        record: record("validate", &cfg, &table)?,
    })
}

fn output_target(args: &OutputArgs, cfg: Option<&RunConfig>) -> (Option<PathBuf>, Format) {
    let from_cfg = cfg.and_then(|c| c.output.clone());
    let path = args
        .out
        .clone()
        .or_else(|| from_cfg.as_ref().map(|o| o.path.clone()));
    let ext = path
        .as_ref()
        .and_then(|p| p.extension())
        .and_then(|e| e.to_str())
        .and_then(|e| match e {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        });
    let format = args
        .format
        .or_else(|| from_cfg.and_then(|o| o.format))
        .or(ext)
        .unwrap_or(Format::Json);
    (path, format)
}

/// Writes an artifact; a CSV file gets a `.run.json` sidecar with the run
/// record.
pub fn write_artifact(art: &Artifact, path: Option<&Path>, format: Format) -> Result<()> {
    let json = serde_json::to_string_pretty(&art.record)? + "\n";
    match (path, format) {
        (None, Format::Json) => print!("{json}"),
        (None, Format::Csv) => print!("{}", art.csv),
        (Some(p), Format::Json) => fs::write(p, json)?,
        (Some(p), Format::Csv) => {
            fs::write(p, &art.csv)?;
            let mut side = p.as_os_str().to_owned();
            side.push(".run.json");
            fs::write(PathBuf::from(side), json)?;
        }
    }
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let (art, out, cfg) = match &cli.command {
        Command::Classify(a) => {
            let cfg = RunConfig::load(&a.config)?;
            (run_classify(&cfg)?, &a.output, Some(cfg))
        }
        Command::Audit(a) => {
            let cfg = RunConfig::load(&a.config)?;
            (run_audit(&cfg, a.grid)?, &a.output, Some(cfg))
        }
        Command::Pickands(a) => (run_pickands(a)?, &a.output, None),
        Command::Asymptotic(a) => {
            let cfg = RunConfig::load(&a.config)?;
            (run_asymptotic(&cfg, &a.u)?, &a.output, Some(cfg))
        }
        Command::Mc(a) => {
            let cfg = RunConfig::load(&a.config)?;
            (run_mc(&cfg, a)?, &a.output, Some(cfg))
        }
        Command::Validate(a) => {
            let cfg = RunConfig::load(&a.config)?;
            (run_validate(&cfg, a)?, &a.output, Some(cfg))
        }
    };
    let (path, format) = output_target(out, cfg.as_ref());
    write_artifact(&art, path.as_deref(), format)
}

/// Exit status for an outcome: 0 on success, 2 for numerical failures,
/// 1 for everything else.
pub fn exit_code(outcome: &Result<()>) -> i32 {
    match outcome {
        Ok(()) => 0,
        Err(e) if e.is_numerical() => 2,
        Err(_) => 1,
    }
}
