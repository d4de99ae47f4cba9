//! Experiment runner behind the `pli-lab` binary.
//!
//! Each experiment reads a small set of typed parameters, writes a CSV table
//! (the authoritative output), an SVG plot and `manifest.json` into the
//! output directory. Parameter names are matched ignoring case, `-` and `_`.

mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

pub use output::{sha256_hex, write_atomic, Cell, Plot, Series, Table};

use crate::flow::{self, FlowConfig, FlowError};
use crate::grid;
use crate::highgain::{curve_limit_study, CurveOffset, HighGainCurve, PolePattern};
use crate::linalg::Mat;
use crate::lqr::{LqrError, LqrProblem};
use crate::pli::{self, PliError};
use crate::scalar::{dt_rate_sweep, ScalarCt, ScalarError, DEFAULT_HS};

/// Environment variable consulted for the seed when neither the config file
/// nor the command line sets one.
pub const SEED_ENV: &str = "PLI_LAB_SEED";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{module}: {message}")]
    Numerical { module: &'static str, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Numerical { .. } => 3,
            ExperimentError::Io { .. } => 1,
        }
    }

    /// Machine-readable description.
    pub fn to_json(&self) -> Value {
        match self {
            ExperimentError::Config(m) => json!({"error": "config", "message": m}),
            ExperimentError::Numerical { module, message } => {
                json!({"error": "numerical", "module": module, "message": message})
            }
            ExperimentError::Io { path, message } => json!({"error": "io", "path": path, "message": message}),
        }
    }
}

fn numerical(module: &'static str) -> impl Fn(&dyn fmt::Display) -> ExperimentError {
    move |e| ExperimentError::Numerical {
        module,
        message: e.to_string(),
    }
}

impl From<LqrError> for ExperimentError {
    fn from(e: LqrError) -> Self {
        numerical("lqr")(&e)
    }
}

impl From<ScalarError> for ExperimentError {
    fn from(e: ScalarError) -> Self {
        match e {
            ScalarError::Normalization { .. } | ScalarError::InvalidParameter(_) => {
                ExperimentError::Config(e.to_string())
            }
            ScalarError::NotStabilizing { .. } => numerical("scalar")(&e),
        }
    }
}

impl From<FlowError> for ExperimentError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::InvalidConfig(_) | FlowError::InvalidStart(_) => ExperimentError::Config(e.to_string()),
            FlowError::Lqr(_) => numerical("flow")(&e),
        }
    }
}

impl From<PliError> for ExperimentError {
    fn from(e: PliError) -> Self {
        numerical("pli")(&e)
    }
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| *c != '-' && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Experiment {
    ScalarProfile,
    Flow,
    HighGain,
    DtSweep,
    PliDiagnose,
    Prox,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::ScalarProfile,
        Experiment::Flow,
        Experiment::HighGain,
        Experiment::DtSweep,
        Experiment::PliDiagnose,
        Experiment::Prox,
    ];

    /// Base name of the output files.
    pub fn file_stem(&self) -> &'static str {
        match self {
            Experiment::ScalarProfile => "scalar_profile",
            Experiment::Flow => "flow",
            Experiment::HighGain => "highgain",
            Experiment::DtSweep => "dt_sweep",
            Experiment::PliDiagnose => "pli",
            Experiment::Prox => "prox",
        }
    }

    fn keys(&self) -> &'static [KeySpec] {
        match self {
            Experiment::ScalarProfile => SCALAR_PROFILE_KEYS,
            Experiment::Flow => FLOW_KEYS,
            Experiment::HighGain => HIGH_GAIN_KEYS,
            Experiment::DtSweep => DT_SWEEP_KEYS,
            Experiment::PliDiagnose => PLI_KEYS,
            Experiment::Prox => PROX_KEYS,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::ScalarProfile => "ScalarProfile",
            Experiment::Flow => "Flow",
            Experiment::HighGain => "HighGain",
            Experiment::DtSweep => "DtSweep",
            Experiment::PliDiagnose => "PliDiagnose",
            Experiment::Prox => "Prox",
        };
        f.write_str(s)
    }
}

impl FromStr for Experiment {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let n = normalize(s);
        Experiment::ALL
            .into_iter()
            .find(|e| normalize(&e.to_string()) == n || normalize(e.file_stem()) == n)
            .ok_or_else(|| {
                let names: Vec<String> = Experiment::ALL.iter().map(|e| e.to_string()).collect();
                ExperimentError::Config(format!(
                    "unknown experiment '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Num,
    Int,
    List,
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
struct KeySpec {
    name: &'static str,
    kind: Kind,
    default: Option<Default>,
}

#[derive(Debug, Clone, Copy)]
enum Default {
    Num(f64),
    Int(u64),
    List(&'static [f64]),
    Text(&'static str),
}

const fn num(name: &'static str, d: f64) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::Num,
        default: Some(Default::Num(d)),
    }
}

const fn opt_num(name: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::Num,
        default: None,
    }
}

const fn int(name: &'static str, d: u64) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::Int,
        default: Some(Default::Int(d)),
    }
}

const fn choice(name: &'static str, options: &'static [&'static str], d: &'static str) -> KeySpec {
    KeySpec {
        name,
        kind: Kind::Choice(options),
        default: Some(Default::Text(d)),
    }
}

const SCALAR_KEYS: [KeySpec; 3] = [num("a", 1.0), num("q", 1.0), num("r", 1.0)];

const SCALAR_PROFILE_KEYS: &[KeySpec] = &[
    SCALAR_KEYS[0],
    SCALAR_KEYS[1],
    SCALAR_KEYS[2],
    num("kmin", 1.05),
    num("kmax", 8.0),
    int("n", 400),
];

const FLOW_KEYS: &[KeySpec] = &[
    SCALAR_KEYS[0],
    SCALAR_KEYS[1],
    SCALAR_KEYS[2],
    opt_num("k0"),
    opt_num("gap0"),
    choice("side", &["right", "left"], "right"),
    num("max_time", 60.0),
    num("gap_tol", 1e-10),
    num("grad_tol", 1e-9),
    num("rel_step_tol", 1e-8),
    num("initial_step", 1e-3),
    num("min_step", 1e-12),
    num("record_every", 0.01),
];

const HIGH_GAIN_KEYS: &[KeySpec] = &[
    choice("system", &["double_integrator", "scalar"], "double_integrator"),
    choice("pattern", &["repeated", "single_fast"], "repeated"),
    num("slow", 1.0),
    choice("offset", &["direct", "optimal"], "direct"),
    num("rho_min", 10.0),
    num("rho_max", 1e4),
    int("n", 12),
];

const DT_SWEEP_KEYS: &[KeySpec] = &[
    SCALAR_KEYS[0],
    SCALAR_KEYS[1],
    SCALAR_KEYS[2],
    KeySpec {
        name: "hs",
        kind: Kind::List,
        default: Some(Default::List(&DEFAULT_HS)),
    },
];

const PLI_KEYS: &[KeySpec] = &[
    choice("cost", &["quadratic", "ksat", "sgpli", "lpli", "lqr_scalar"], "ksat"),
    num("kmax", 1e3),
    int("n", 400),
];

const PROX_KEYS: &[KeySpec] = &[
    choice("case", &["all", "quadratic", "shifted", "absorbed"], "all"),
    num("x0", 5.0),
    num("max_time", 60.0),
    // stop on the fixed-point residual rather than the gap
    num("gap_tol", 1e-20),
    num("grad_tol", 1e-10),
];

/// Fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

fn parse_value(spec: &KeySpec, raw: &Value) -> Result<Value, ExperimentError> {
    let bad = || ExperimentError::Config(format!("bad value for '{}': {raw}", spec.name));
    let as_num = |v: &Value| -> Option<f64> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s.trim().parse::<f64>().ok(),
            _ => None,
        }
        .filter(|x| x.is_finite())
    };
    match spec.kind {
        Kind::Num => as_num(raw).map(Value::from).ok_or_else(bad),
        Kind::Int => match raw {
            Value::Number(n) => n.as_u64(),
            Value::String(s) => s.trim().parse::<u64>().ok(),
            _ => None,
        }
        .map(Value::from)
        .ok_or_else(bad),
        Kind::List => {
            let items: Vec<Value> = match raw {
                Value::Array(a) => a.clone(),
                Value::String(s) => s.split(',').map(|p| Value::String(p.to_string())).collect(),
                Value::Number(_) => vec![raw.clone()],
                _ => return Err(bad()),
            };
            let nums: Option<Vec<f64>> = items.iter().map(as_num).collect();
            match nums {
                Some(v) if !v.is_empty() => Ok(Value::from(v)),
                _ => Err(bad()),
            }
        }
        Kind::Choice(options) => {
            let Value::String(s) = raw else { return Err(bad()) };
            options
                .iter()
                .find(|o| normalize(o) == normalize(s))
                .map(|o| Value::from(*o))
                .ok_or_else(|| {
                    ExperimentError::Config(format!(
                        "'{}' must be one of {}, got '{s}'",
                        spec.name,
                        options.join(", ")
                    ))
                })
        }
    }
}

fn parse_seed(raw: &Value, source: &str) -> Result<u64, ExperimentError> {
    match raw {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.trim().parse::<u64>().ok(),
        _ => None,
    }
    .ok_or_else(|| {
        ExperimentError::Config(format!(
            "seed from {source} must be an unsigned 64-bit integer, got {raw}"
        ))
    })
}

impl ExperimentConfig {
    /// Merges defaults, the optional JSON config object and command-line
    /// `key value` pairs (later sources win). The seed comes from the
    /// command line, else the config file, else `env_seed`, else 0.
    pub fn resolve(
        experiment: Experiment,
        file: Option<&Map<String, Value>>,
        cli: &[(String, String)],
        env_seed: Option<&str>,
        out_dir: Option<PathBuf>,
    ) -> Result<Self, ExperimentError> {
        let specs = experiment.keys();
        let mut params: BTreeMap<String, Value> = BTreeMap::new();
        for spec in specs {
            if let Some(d) = spec.default {
                let v = match d {
                    Default::Num(x) => Value::from(x),
                    Default::Int(x) => Value::from(x),
                    Default::List(xs) => Value::from(xs.to_vec()),
                    Default::Text(s) => Value::from(s),
                };
                params.insert(spec.name.to_string(), v);
            }
        }
        let mut seed = match env_seed {
            Some(s) => parse_seed(&Value::String(s.to_string()), SEED_ENV)?,
            None => 0,
        };
        let mut out = None;
        let mut apply = |key: &str, raw: &Value, source: &str| -> Result<(), ExperimentError> {
            let k = normalize(key);
            match k.as_str() {
                "seed" => seed = parse_seed(raw, source)?,
                "out" => match raw {
                    Value::String(s) => out = Some(PathBuf::from(s)),
                    _ => {
                        return Err(ExperimentError::Config(format!(
                            "'out' must be a path string, got {raw}"
                        )))
                    }
                },
                "experiment" => {
                    let Value::String(s) = raw else {
                        return Err(ExperimentError::Config("'experiment' must be a string".into()));
                    };
                    if s.parse::<Experiment>()? != experiment {
                        return Err(ExperimentError::Config(format!(
                            "{source} names experiment '{s}' but '{experiment}' was requested"
                        )));
                    }
                }
                _ => {
                    let spec = specs.iter().find(|s| normalize(s.name) == k).ok_or_else(|| {
                        let known: Vec<&str> = specs.iter().map(|s| s.name).collect();
                        ExperimentError::Config(format!(
                            "unknown key '{key}' for {experiment} (known: {}, seed, out)",
                            known.join(", ")
                        ))
                    })?;
                    params.insert(spec.name.to_string(), parse_value(spec, raw)?);
                }
            }
            Ok(())
        };
        if let Some(map) = file {
            for (k, v) in map {
                apply(k, v, "config file")?;
            }
        }
        for (k, v) in cli {
            apply(k, &Value::String(v.clone()), "command line")?;
        }
        Ok(Self {
            experiment,
            params,
            seed,
            out_dir: out_dir.or(out).unwrap_or_else(|| PathBuf::from("out")),
        })
    }

    /// Defaults only.
    pub fn defaults(experiment: Experiment, out_dir: impl Into<PathBuf>) -> Self {
        Self::resolve(experiment, None, &[], None, Some(out_dir.into())).expect("built-in defaults are valid")
    }

    /// Sets one parameter as if given on the command line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let mut next = Self::resolve(
            self.experiment,
            None,
            &[(key.to_string(), value.to_string())],
            None,
            Some(self.out_dir.clone()),
        )?;
        let name = self
            .experiment
            .keys()
            .iter()
            .find(|s| normalize(s.name) == normalize(key))
            .map(|s| s.name);
        match name {
            Some(n) => {
                let v = next.params.remove(n).expect("key was just set");
                self.params.insert(n.to_string(), v);
            }
            None if normalize(key) == "seed" => self.seed = next.seed,
            None => {}
        }
        Ok(())
    }

    fn num(&self, key: &str) -> f64 {
        self.params[key].as_f64().expect("validated number")
    }

    fn opt_num(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }

    fn int(&self, key: &str) -> u64 {
        self.params[key].as_u64().expect("validated integer")
    }

    fn list(&self, key: &str) -> Vec<f64> {
        self.params[key]
            .as_array()
            .expect("validated list")
            .iter()
            .map(|v| v.as_f64().expect("validated number"))
            .collect()
    }

    fn text(&self, key: &str) -> &str {
        self.params[key].as_str().expect("validated choice")
    }
}

/// Reads a JSON config file; it must hold a single object.
pub fn read_config_file(path: &Path) -> Result<Map<String, Value>, ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::Config(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(ExperimentError::Config(format!(
            "{} must contain a JSON object",
            path.display()
        ))),
        Err(e) => Err(ExperimentError::Config(format!("{}: {e}", path.display()))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outputs: Vec<OutputFile>,
    pub manifest: PathBuf,
}

struct Writer<'a> {
    dir: &'a Path,
    outputs: Vec<OutputFile>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: &[u8]) -> Result<(), ExperimentError> {
        write_atomic(self.dir, name, contents).map_err(|e| ExperimentError::Io {
            path: self.dir.join(name).display().to_string(),
            message: e.to_string(),
        })?;
        self.outputs.push(OutputFile {
            path: name.to_string(),
            sha256: sha256_hex(contents),
        });
        Ok(())
    }
}

/// Runs the experiment and writes its artifacts plus `manifest.json`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let started = chrono::Utc::now();
    let clock = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| ExperimentError::Io {
        path: cfg.out_dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut w = Writer {
        dir: &cfg.out_dir,
        outputs: Vec::new(),
    };
    match cfg.experiment {
        Experiment::ScalarProfile => scalar_profile(cfg, &mut w)?,
        Experiment::Flow => flow_run(cfg, &mut w)?,
        Experiment::HighGain => high_gain(cfg, &mut w)?,
        Experiment::DtSweep => dt_sweep(cfg, &mut w)?,
        Experiment::PliDiagnose => pli_diagnose(cfg, &mut w)?,
        Experiment::Prox => prox(cfg, &mut w)?,
    }
    let manifest = json!({
        "config": cfg,
        "outputs": w.outputs,
        "started": started.to_rfc3339(),
        "elapsed_s": clock.elapsed().as_secs_f64(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = write_atomic(&cfg.out_dir, "manifest.json", text.as_bytes()).map_err(|e| ExperimentError::Io {
        path: cfg.out_dir.join("manifest.json").display().to_string(),
        message: e.to_string(),
    })?;
    Ok(RunSummary {
        outputs: w.outputs,
        manifest: path,
    })
}

fn scalar_sys(cfg: &ExperimentConfig) -> Result<ScalarCt, ExperimentError> {
    Ok(ScalarCt::new(cfg.num("a"), 1.0, cfg.num("q"), cfg.num("r"))?)
}

fn scalar_profile(cfg: &ExperimentConfig, w: &mut Writer) -> Result<(), ExperimentError> {
    let sys = scalar_sys(cfg)?;
    let (kmin, kmax, n) = (cfg.num("kmin"), cfg.num("kmax"), cfg.int("n") as usize);
    if !(kmin > sys.a() && kmax > kmin) || n < 2 {
        return Err(ExperimentError::Config(format!(
            "need a < kmin < kmax and n >= 2 (a={}, kmin={kmin}, kmax={kmax}, n={n})",
            sys.a()
        )));
    }
    let rows = sys.rate_profile(&grid::linear(kmin, kmax, n))?;
    let mut t = Table::new(&["k", "grad_sq", "m"]);
    for r in &rows {
        t.push(vec![r.k.into(), r.grad_sq.into(), r.m.into()]);
    }
    w.put("scalar_profile.csv", t.render().as_bytes())?;
    let plot = Plot::new("Squared gradient and rate m(k)", "k", "value")
        .log_y()
        .with(Series::new("grad^2", rows.iter().map(|r| (r.k, r.grad_sq)).collect()))
        .with(Series::new(
            "m",
            rows.iter().filter_map(|r| r.m.map(|m| (r.k, m))).collect(),
        ));
    w.put("scalar_profile.svg", plot.render().as_bytes())
}

/// Gain on the requested side of `k*` whose gap equals `gap0`.
fn gain_for_gap(sys: &ScalarCt, gap0: f64, right: bool) -> Result<f64, ExperimentError> {
    if !(gap0 > 0.0) {
        return Err(ExperimentError::Config(format!("gap0 must be positive, got {gap0}")));
    }
    let ks = sys.kstar();
    let (mut lo, mut hi) = if right {
        let mut hi = ks + 1.0;
        while sys.gap(hi)? < gap0 {
            hi = ks + 2.0 * (hi - ks);
        }
        (ks, hi)
    } else {
        (sys.a(), ks)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= sys.a() || mid == lo || mid == hi {
            break;
        }
        let g = sys.gap(mid)?;
        // gap increases away from k* on both sides
        if (g < gap0) == right {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn flow_run(cfg: &ExperimentConfig, w: &mut Writer) -> Result<(), ExperimentError> {
    let sys = scalar_sys(cfg)?;
    let k0 = match (cfg.opt_num("k0"), cfg.opt_num("gap0")) {
        (Some(_), Some(_)) => return Err(ExperimentError::Config("give k0 or gap0, not both".into())),
        (Some(k), None) => k,
        (None, Some(g)) => gain_for_gap(&sys, g, cfg.text("side") == "right")?,
        (None, None) => 19.72,
    };
    let fcfg = FlowConfig {
        max_time: cfg.num("max_time"),
        gap_tol: cfg.num("gap_tol"),
        grad_tol: cfg.num("grad_tol"),
        rel_step_tol: cfg.num("rel_step_tol"),
        initial_step: cfg.num("initial_step"),
        min_step: cfg.num("min_step"),
        record_every: cfg.num("record_every"),
    };
    fcfg.validate()?;
    let prob = LqrProblem::scalar(sys.a(), 1.0, sys.q(), sys.r())?;
    let gain = prob.gain(Mat::scalar(k0))?;
    if !gain.is_stabilizing() {
        return Err(ExperimentError::Config(format!(
            "k0 = {k0} is not stabilizing (need k0 > a = {})",
            sys.a()
        )));
    }
    let traj = flow::integrate_gradient_flow(&prob, &gain, &fcfg)?;
    w.put("flow.csv", traj.to_csv().as_bytes())?;
    let gles = match pli::certify_gles(&traj) {
        Ok(c) => json!({
            "k0": k0,
            "terminal": traj.terminal.as_str(),
            "t_split": c.t_split,
            "gap_split": c.gap_split,
            "slope": c.slope,
            "rate": c.rate,
            "lsq_slope": c.lsq_slope,
            "lsq_rate": c.lsq_rate,
            "sup_grad_sq": c.sup_grad_sq,
            "max_violation": c.max_violation,
            "valid": c.valid,
        }),
        Err(e) => json!({"k0": k0, "terminal": traj.terminal.as_str(), "valid": false, "error": e.to_string()}),
    };
    w.put(
        "flow_gles.json",
        serde_json::to_string_pretty(&gles).expect("json").as_bytes(),
    )?;
    let plot = Plot::new("Cost gap along the gradient flow", "t", "J(k) - J*")
        .log_y()
        .with(Series::new("gap", traj.samples.iter().map(|s| (s.t, s.gap)).collect()));
    w.put("flow.svg", plot.render().as_bytes())
}

fn high_gain(cfg: &ExperimentConfig, w: &mut Writer) -> Result<(), ExperimentError> {
    let prob = match cfg.text("system") {
        "scalar" => LqrProblem::scalar(1.0, 1.0, 1.0, 1.0)?,
        _ => LqrProblem::new(
            Mat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
            Mat::column(&[0.0, 1.0]),
            Mat::identity(2),
            Mat::scalar(1.0),
        )?,
    };
    let pattern = match cfg.text("pattern") {
        "single_fast" => PolePattern::SingleFast { slow: cfg.num("slow") },
        _ => PolePattern::Repeated,
    };
    let offset = match cfg.text("offset") {
        "optimal" => CurveOffset::Optimal,
        _ => CurveOffset::Direct,
    };
    let (lo, hi, n) = (cfg.num("rho_min"), cfg.num("rho_max"), cfg.int("n") as usize);
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(ExperimentError::Config(format!(
            "need 0 < rho_min < rho_max and n >= 2, got {lo}, {hi}, {n}"
        )));
    }
    let (_, jstar) = prob.optimal_gain()?;
    let curve = HighGainCurve::new(prob, pattern, offset, cfg.seed)?;
    let rows = curve_limit_study(&curve, &grid::geometric(lo, hi, n), jstar)?;
    let mut t = Table::new(&["rho", "gap", "grad_fro", "ratio"]);
    for r in &rows {
        t.push(vec![r.rho.into(), r.gap.into(), r.grad_fro.into(), r.ratio.into()]);
    }
    w.put("highgain.csv", t.render().as_bytes())?;
    let plot = Plot::new("Limit study along the high-gain curve", "rho", "value")
        .log_x()
        .log_y()
        .with(Series::new("gap", rows.iter().map(|r| (r.rho, r.gap)).collect()))
        .with(Series::new(
            "|grad|_F",
            rows.iter().map(|r| (r.rho, r.grad_fro)).collect(),
        ))
        .with(Series::new("ratio", rows.iter().map(|r| (r.rho, r.ratio)).collect()));
    w.put("highgain.svg", plot.render().as_bytes())
}

fn dt_sweep(cfg: &ExperimentConfig, w: &mut Writer) -> Result<(), ExperimentError> {
    let sys = scalar_sys(cfg)?;
    let hs = cfg.list("hs");
    if hs.iter().any(|h| !(*h > 0.0)) {
        return Err(ExperimentError::Config("every h must be positive".into()));
    }
    let rows = dt_rate_sweep(&sys, &hs)?;
    let mut t = Table::new(&["h", "kd_min", "md_min"]);
    for r in &rows {
        t.push(vec![r.h.into(), r.kd_min.into(), r.md_min.into()]);
    }
    w.put("dt_sweep.csv", t.render().as_bytes())?;
    let plot = Plot::new("Smallest discrete-time rate per step size", "h", "value")
        .log_x()
        .log_y()
        .with(Series::new("md_min", rows.iter().map(|r| (r.h, r.md_min)).collect()))
        .with(Series::new("kd_min", rows.iter().map(|r| (r.h, r.kd_min)).collect()));
    w.put("dt_sweep.svg", plot.render().as_bytes())
}

fn pli_diagnose(cfg: &ExperimentConfig, w: &mut Writer) -> Result<(), ExperimentError> {
    let cost = cfg.text("cost");
    let samples = if cost == "lqr_scalar" {
        let sys = ScalarCt::new(1.0, 1.0, 1.0, 1.0)?;
        let (kmax, n) = (cfg.num("kmax"), cfg.int("n") as usize);
        if !(kmax > sys.kstar() + 1e-6) || n < 3 {
            return Err(ExperimentError::Config(format!(
                "need kmax > k* and n >= 3, got {kmax}, {n}"
            )));
        }
        pli::scalar_lqr_samples(&sys, kmax, n)
    } else {
        pli::zoo_examples()
            .into_iter()
            .find(|z| z.name == cost)
            .expect("choice validated against the zoo names")
            .samples()
    };
    let rep = pli::diagnose(&samples)?;
    w.put("pli.csv", rep.to_csv().as_bytes())?;
    let sidecar = json!({
        "ksat": rep.ksat_fit.map(|f| json!({"a": f.a, "b": f.b, "residual": f.residual})),
        "verdict": rep.verdict.as_str(),
    });
    w.put(
        "pli.json",
        serde_json::to_string_pretty(&sidecar).expect("json").as_bytes(),
    )?;
    let plot = Plot::new("Empirical PL constant per sublevel set", "eps", "mu_hat")
        .log_x()
        .log_y()
        .with(Series::new(
            "mu_hat",
            rep.eps_grid
                .iter()
                .zip(&rep.mu_hat)
                .filter_map(|(e, m)| m.map(|m| (*e, m)))
                .collect(),
        ));
    w.put("pli.svg", plot.render().as_bytes())
}

/// Name, `f`, `f′`, optimal value of `f + |x|`, minimizer.
pub type ProxCase = (&'static str, fn(f64) -> f64, fn(f64) -> f64, f64, f64);

/// The three scalar lasso examples.
pub fn prox_cases() -> [ProxCase; 3] {
    [
        ("quadratic", |x| 0.5 * x * x, |x| x, 0.0, 0.0),
        ("shifted", |x| 0.5 * (x - 3.0) * (x - 3.0), |x| x - 3.0, 2.5, 2.0),
        ("absorbed", |x| 0.5 * (x - 0.5) * (x - 0.5), |x| x - 0.5, 0.125, 0.0),
    ]
}

fn prox(cfg: &ExperimentConfig, w: &mut Writer) -> Result<(), ExperimentError> {
    let which = cfg.text("case");
    let fcfg = FlowConfig {
        max_time: cfg.num("max_time"),
        gap_tol: cfg.num("gap_tol"),
        grad_tol: cfg.num("grad_tol"),
        ..FlowConfig::default()
    };
    let mut summary = Table::new(&["case", "x_final", "x_expected", "fixed_point_residual", "terminal"]);
    let mut plot = Plot::new("Proximal gradient flow", "t", "gap").log_y();
    for (name, f, g, fstar, xstar) in prox_cases() {
        if which != "all" && which != name {
            continue;
        }
        let traj = flow::integrate_prox_flow_scalar(f, g, cfg.num("x0"), Some(fstar), &fcfg)?;
        let x = traj.last().param[0];
        let residual = (x - flow::soft_threshold(x - g(x))).abs();
        summary.push(vec![
            name.into(),
            x.into(),
            xstar.into(),
            residual.into(),
            traj.terminal.as_str().into(),
        ]);
        w.put(&format!("prox_{name}.csv"), traj.to_csv().as_bytes())?;
        plot = plot.with(Series::new(name, traj.samples.iter().map(|s| (s.t, s.gap)).collect()));
    }
    w.put("prox.csv", summary.render().as_bytes())?;
    w.put("prox.svg", plot.render().as_bytes())
}
