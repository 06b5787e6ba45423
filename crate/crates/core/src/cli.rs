//! Batch front-end: JSON scenario in, JSON report (and CSV curves) out.
//!
//! Exit status: 0 when every requested check passes (or the computation
//! completes, for purely descriptive subcommands), 1 on a numerical failure,
//! 2 on a configuration or usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gauge::ConvexGauge;
use crate::measures::{
    divisor_counting, divisor_counting_sampled, poincare_lelong_measure, radial_counting, BallMeasure,
    DivisorSpec, GrowthEnvelope, ZeroDivisor,
};
use crate::normalization::NormConstants;
use crate::sphere::{build_grid, kernel_from_cos, GridDescriptor, SphereGrid, SpherePoint};
use crate::subspherical::{
    check_mean_inequality, check_operator_positivity, check_radial_subharmonicity, check_trig_convexity,
    default_probes, default_triples, example_cap_cosine, example_kernel_slice, example_support_function,
    DirectionFunction, Tolerances,
};
use crate::testfn::{
    build_test_function, default_boundary_schedule, default_shell_probes, verify_test_function, TestFnTolerances,
};
use crate::theorems::{
    blaschke_condition, check_divisor_inequality, check_main_inequality, default_schedule, djrbashian_condition,
    uniqueness_classifier, InequalityOptions, Majorant,
};

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const OUT_ENV: &str = "BALLZEROS_OUT";

#[derive(Debug, Parser)]
#[command(name = "ballzeros", version, about = "Subspherical functions and zero sets in the unit ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Output directory for reports and curves.
    #[arg(long, env = OUT_ENV, default_value = ".")]
    pub out: PathBuf,
    /// Seed for randomized sampling.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone)]
pub struct ScenarioArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the sphere grid resolution.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Overrides a tolerance, e.g. `--tol sub_mean=1e-7`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalizing constants b_m, s_{m-1}, d_{m-1}.
    Constants {
        #[arg(long)]
        m: usize,
        /// Also tabulate every dimension from 2 up to this one.
        #[arg(long)]
        up_to: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Samples the averaging kernel on an angle grid (CSV `phi,value`).
    Kernel {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 257)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Certifies that h is ρ-subspherical by the four characterizations.
    CertifyH(ScenarioArgs),
    /// Builds and verifies the gauge test function.
    VerifyTestfn(ScenarioArgs),
    /// Radial counting curves (CSV `r,value`).
    Counting(ScenarioArgs),
    /// Growth inequality for a charge or a divisor against a majorant.
    MainTheorem(ScenarioArgs),
    /// Uniqueness dichotomy for a divisor and a growth envelope.
    Uniqueness(ScenarioArgs),
    /// Blaschke and Djrbashian conditions.
    Blaschke(ScenarioArgs),
}

/// Direction function in config form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "builtin", deny_unknown_fields)]
pub enum HSpec {
    Constant {
        value: f64,
        #[serde(default)]
        rho: Option<f64>,
    },
    CapCosine {
        center: Vec<f64>,
        rho: f64,
    },
    KernelSlice {
        rho: f64,
        r: f64,
        pole: Vec<f64>,
    },
    Support {
        points: Vec<Vec<f64>>,
    },
    Cosine {
        freq: f64,
        #[serde(default)]
        phase: f64,
        rho: f64,
    },
    Table {
        values: Vec<f64>,
        rho: f64,
    },
}

impl HSpec {
    fn dim(&self) -> Option<usize> {
        match self {
            HSpec::Constant { .. } => None,
            HSpec::CapCosine { center, .. } => Some(center.len()),
            HSpec::KernelSlice { pole, .. } => Some(pole.len()),
            HSpec::Support { points } => points.first().map(Vec::len),
            HSpec::Cosine { .. } | HSpec::Table { .. } => Some(2),
        }
    }

    fn build(&self, m: usize) -> Result<DirectionFunction> {
        match self {
            HSpec::Constant { value, rho } => DirectionFunction::constant(m, *value, rho.unwrap_or(0.0)),
            HSpec::CapCosine { center, rho } => example_cap_cosine(&SpherePoint::from_vector(center)?, *rho),
            HSpec::KernelSlice { rho, r, pole } => example_kernel_slice(*rho, *r, &SpherePoint::from_vector(pole)?),
            HSpec::Support { points } => example_support_function(points),
            HSpec::Cosine { freq, phase, rho } => DirectionFunction::cosine(*freq, *phase, *rho),
            HSpec::Table { values, rho } => DirectionFunction::table(values.clone(), *rho),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureAtom {
    pub point: Vec<f64>,
    pub mass: f64,
}

/// A charge given by atoms and `[point…, σ-weight, density]` sample rows.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<MeasureAtom>,
    #[serde(default)]
    pub samples: Vec<Vec<f64>>,
}

impl MeasureSpec {
    fn build(&self, m: usize) -> Result<BallMeasure> {
        let atoms: Vec<(Vec<f64>, f64)> = self.atoms.iter().map(|a| (a.point.clone(), a.mass)).collect();
        let mut samples = Vec::with_capacity(self.samples.len());
        for row in &self.samples {
            if row.len() != m + 2 {
                return Err(Error::Domain(format!("sample row needs {} entries, found {}", m + 2, row.len())));
            }
            samples.push((row[..m].to_vec(), row[m], row[m + 1]));
        }
        BallMeasure::new(m, "measure", &atoms, &samples)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum MajorantSpec {
    Zero,
    RadialPower { c: f64, p: f64 },
    /// `log|f|` of the Blaschke product (or counting measure) of the scenario's divisor.
    LogBlaschke,
    Measure(MeasureSpec),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DjrbashianSpec {
    pub p: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Trig,
    MeanValue,
    Operator,
    Radial,
}

/// One scenario file; each subcommand reads the fields it needs.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Real dimension of the ball.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub h: Option<HSpec>,
    /// Order ρ; defaults to the declared order of `h`.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub gauge: Option<ConvexGauge>,
    #[serde(default)]
    pub divisor: Option<DivisorSpec>,
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub majorant: Option<MajorantSpec>,
    #[serde(default)]
    pub resolution: Option<usize>,
    #[serde(default)]
    pub checks: Option<Vec<CheckName>>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub testfn_tolerances: Option<TestFnTolerances>,
    /// Radii for the mean-value test.
    #[serde(default)]
    pub mean_radii: Option<Vec<f64>>,
    /// Step of the operator test.
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub probes: Option<usize>,
    /// Radii of counting curves.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    /// Count from surface samples even where a closed form exists.
    #[serde(default)]
    pub sampled: bool,
    #[serde(default)]
    pub schedule: Option<Vec<f64>>,
    #[serde(default)]
    pub r_max: Option<f64>,
    #[serde(default)]
    pub declared_c: Option<f64>,
    #[serde(default)]
    pub djrbashian: Option<DjrbashianSpec>,
    /// Base name of the written report.
    #[serde(default)]
    pub output: Option<String>,
}

/// Failure modes of a CLI run, mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Schema { path: String, message: String },
    /// Exit 1.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema { .. } => 2,
            Failure::Numerical(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Schema { path, message } => write!(f, "config error at `{path}`: {message}"),
            Failure::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}

fn schema(path: &str, message: impl Into<String>) -> Failure {
    Failure::Schema { path: path.into(), message: message.into() }
}

fn numerical(check: &str, err: Error) -> Failure {
    match err {
        Error::Config { path, message } => Failure::Schema { path, message },
        other => Failure::Numerical(format!("{check}: {other}")),
    }
}

/// Parses a scenario, reporting the path of the offending field.
pub fn parse_scenario(bytes: &[u8]) -> std::result::Result<Scenario, Failure> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(&path, e.into_inner().to_string())
    })
}

/// Outcome of a subcommand: report body plus pass/fail.
struct Outcome {
    name: String,
    body: Value,
    pass: bool,
    failing: Vec<String>,
    grids: Vec<GridDescriptor>,
    csv: Option<String>,
}

struct Loaded {
    scenario: Scenario,
    hash: String,
    args: ScenarioArgs,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn load(args: &ScenarioArgs) -> std::result::Result<Loaded, Failure> {
    let bytes = std::fs::read(&args.config)
        .map_err(|e| schema("<file>", format!("cannot read {}: {e}", args.config.display())))?;
    let mut scenario = parse_scenario(&bytes)?;
    if let Some(res) = args.resolution {
        scenario.resolution = Some(res);
    }
    apply_tolerance_overrides(&mut scenario, &args.tolerances)?;
    Ok(Loaded { scenario, hash: sha256_hex(&bytes), args: args.clone() })
}

fn apply_tolerance_overrides(s: &mut Scenario, overrides: &[String]) -> std::result::Result<(), Failure> {
    for item in overrides {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| schema("--tol", format!("expected NAME=VALUE, got `{item}`")))?;
        let value: f64 = value.parse().map_err(|_| schema("--tol", format!("`{value}` is not a number")))?;
        let t = s.tolerances.get_or_insert_with(Tolerances::default);
        let tf = s.testfn_tolerances.get_or_insert_with(TestFnTolerances::default);
        match name {
            "trig" => t.trig = value,
            "mean_value" => t.mean_value = value,
            "sub_mean" => {
                t.sub_mean = value;
                tf.sub_mean = value;
            }
            "operator_c1" => t.operator_c1 = value,
            "operator_c2" => t.operator_c2 = value,
            "bound" => tf.bound = value,
            "laplacian" => tf.laplacian = value,
            "eta" => tf.eta = value,
            other => return Err(schema("--tol", format!("unknown tolerance `{other}`"))),
        }
    }
    Ok(())
}

impl Scenario {
    /// Real dimension, checked for consistency across `m`, `h` and the divisor.
    fn dimension(&self) -> std::result::Result<usize, Failure> {
        let mut found: Vec<(&str, usize)> = Vec::new();
        if let Some(m) = self.m {
            found.push(("m", m));
        }
        if let Some(d) = self.h.as_ref().and_then(HSpec::dim) {
            found.push(("h", d));
        }
        if let Some(div) = &self.divisor {
            found.push(("divisor.n", 2 * div.n));
        }
        let Some(&(_, m)) = found.first() else {
            return Err(schema("m", "dimension is not determined; set `m`"));
        };
        if let Some((path, d)) = found.iter().find(|(_, d)| *d != m) {
            return Err(schema(path, format!("dimension {d} conflicts with {m}")));
        }
        if !(2..=4).contains(&m) {
            return Err(schema("m", format!("dimension {m} is unsupported (2, 3 or 4)")));
        }
        Ok(m)
    }

    fn h(&self, m: usize) -> std::result::Result<DirectionFunction, Failure> {
        match &self.h {
            Some(spec) => spec.build(m).map_err(|e| schema("h", e.to_string())),
            None => DirectionFunction::constant(m, 1.0, 0.0).map_err(|e| schema("h", e.to_string())),
        }
    }

    fn require_h(&self, m: usize) -> std::result::Result<DirectionFunction, Failure> {
        if self.h.is_none() {
            return Err(schema("h", "missing field `h`"));
        }
        self.h(m)
    }

    fn gauge(&self) -> ConvexGauge {
        self.gauge.clone().unwrap_or_else(ConvexGauge::identity)
    }

    fn grid(&self, m: usize, default: usize) -> std::result::Result<SphereGrid, Failure> {
        build_grid(m, self.resolution.unwrap_or(default)).map_err(|e| schema("resolution", e.to_string()))
    }

    fn divisor(&self) -> std::result::Result<ZeroDivisor, Failure> {
        let spec = self.divisor.as_ref().ok_or_else(|| schema("divisor", "missing field `divisor`"))?;
        spec.build().map_err(|e| schema("divisor", e.to_string()))
    }

    fn schedule(&self) -> Vec<f64> {
        self.schedule.clone().unwrap_or_else(default_schedule)
    }

    fn envelope(&self, z: Option<&ZeroDivisor>) -> std::result::Result<GrowthEnvelope, Failure> {
        match self.majorant.as_ref().unwrap_or(&MajorantSpec::Zero) {
            MajorantSpec::Zero => Ok(GrowthEnvelope::Zero),
            MajorantSpec::RadialPower { c, p } => {
                GrowthEnvelope::radial_power(*c, *p).map_err(|e| schema("majorant", e.to_string()))
            }
            MajorantSpec::LogBlaschke => match z {
                Some(z) => Ok(GrowthEnvelope::LogBlaschke(z.clone())),
                None => Err(schema("majorant.kind", "log_blaschke needs a `divisor`")),
            },
            MajorantSpec::Measure(_) => Err(schema("majorant.kind", "a measure is not a growth envelope here")),
        }
    }
}

fn default_resolution(m: usize) -> usize {
    if m == 2 {
        2048
    } else {
        32
    }
}

fn run_certify(l: &Loaded) -> std::result::Result<Outcome, Failure> {
    let s = &l.scenario;
    let m = s.dimension()?;
    let h = s.require_h(m)?;
    let rho = s.rho.unwrap_or(h.order());
    let grid = s.grid(m, default_resolution(m))?;
    let tol = s.tolerances.unwrap_or_default();
    let requested = s.checks.clone().unwrap_or_else(|| {
        if m == 2 {
            vec![CheckName::Trig, CheckName::MeanValue, CheckName::Operator, CheckName::Radial]
        } else {
            vec![CheckName::MeanValue, CheckName::Radial]
        }
    });
    let mut reports = Vec::new();
    for check in &requested {
        let report = match check {
            CheckName::Trig => check_trig_convexity(&h, rho, &default_triples(rho, 256), &tol),
            CheckName::MeanValue => {
                let radii = s.mean_radii.clone().unwrap_or_else(|| vec![0.05, 0.1, 0.25, 0.5]);
                check_mean_inequality(&h, rho, &grid, &radii, &tol)
            }
            CheckName::Operator => check_operator_positivity(&h, rho, s.delta.unwrap_or(1e-3), &tol),
            CheckName::Radial => {
                let probes = default_probes(m, s.probes.unwrap_or(200), l.args.common.seed);
                check_radial_subharmonicity(&h, rho, &grid, &probes, &tol)
            }
        }
        .map_err(|e| numerical(&format!("{check:?}"), e))?;
        reports.push(report);
    }
    let pass = reports.iter().all(|r| r.pass);
    let agree = reports.iter().all(|r| r.pass == pass);
    let failing = reports.iter().filter(|r| !r.pass).map(|r| format!("{:?}", r.criterion)).collect();
    Ok(Outcome {
        name: "certify-h".into(),
        body: json!({
            "h": h.label(),
            "rho": rho,
            "grid": grid.descriptor(),
            "tolerances": tol,
            "checks": reports,
            "criteria_agree": agree,
        }),
        pass,
        failing,
        grids: vec![grid.descriptor()],
        csv: None,
    })
}

fn run_verify_testfn(l: &Loaded) -> std::result::Result<Outcome, Failure> {
    let s = &l.scenario;
    let m = s.dimension()?;
    let h = s.require_h(m)?;
    let rho = s.rho.unwrap_or(h.order());
    let grid = s.grid(m, if m == 2 { 512 } else { 32 })?;
    let g = s.gauge();
    let v = build_test_function(&g, &h, rho, &grid).map_err(|e| numerical("build_test_function", e))?;
    let probes = default_shell_probes(m, v.r_rho, s.probes.unwrap_or(200), l.args.common.seed);
    let tol = s.testfn_tolerances.unwrap_or_default();
    let report = verify_test_function(&v, &grid, &probes, &default_boundary_schedule(), &tol)
        .map_err(|e| numerical("verify_test_function", e))?;
    let mut failing = Vec::new();
    for (name, ok) in [
        ("positivity", report.positivity.pass),
        ("bound", report.bound.pass),
        ("boundary", report.boundary.pass),
        ("sub_mean", report.sub_mean.pass),
        ("laplacian", report.laplacian.as_ref().map_or(true, |c| c.pass)),
    ] {
        if !ok {
            failing.push(name.to_string());
        }
    }
    Ok(Outcome {
        name: "verify-testfn".into(),
        body: json!({
            "h": h.label(),
            "gauge": g,
            "gauge_check": v.gauge_report,
            "grid": grid.descriptor(),
            "tolerances": tol,
            "report": report,
        }),
        pass: report.pass,
        failing,
        grids: vec![grid.descriptor()],
        csv: None,
    })
}

fn default_radii() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 100.0).collect()
}

fn run_counting(l: &Loaded) -> std::result::Result<Outcome, Failure> {
    let s = &l.scenario;
    let m = s.dimension()?;
    let h = s.h(m)?;
    let radii = s.radii.clone().unwrap_or_else(default_radii);
    let values: Vec<f64> = if s.divisor.is_some() {
        let z = s.divisor()?;
        radii
            .iter()
            .map(|&r| if s.sampled { divisor_counting_sampled(&z, r, &h) } else { divisor_counting(&z, r, &h) })
            .collect::<Result<_>>()
    } else if let Some(spec) = &s.measure {
        let mu = spec.build(m).map_err(|e| schema("measure", e.to_string()))?;
        radii.iter().map(|&r| radial_counting(&mu, r, &h)).collect::<Result<_>>()
    } else {
        return Err(schema("divisor", "counting needs a `divisor` or a `measure`"));
    }
    .map_err(|e| numerical("counting", e))?;
    let mut csv = String::from("r,value\n");
    for (r, v) in radii.iter().zip(&values) {
        let _ = writeln!(csv, "{r},{v}");
    }
    Ok(Outcome {
        name: "counting".into(),
        body: json!({ "h": h.label(), "radii": radii, "values": values, "sampled": s.sampled }),
        pass: true,
        failing: Vec::new(),
        grids: Vec::new(),
        csv: Some(csv),
    })
}

fn run_main_theorem(l: &Loaded) -> std::result::Result<Outcome, Failure> {
    let s = &l.scenario;
    let m = s.dimension()?;
    let h = s.h(m)?;
    let g = s.gauge();
    let grid = s.grid(m, if m == 2 { 256 } else { 16 })?;
    let mut opts = InequalityOptions { declared_c: s.declared_c, ..Default::default() };
    if let Some(r) = s.r_max {
        opts.r_max = r;
    }
    if let Some(t) = s.testfn_tolerances {
        opts.tol = t.bound;
    }
    let z = if s.divisor.is_some() { Some(s.divisor()?) } else { None };
    let majorant = match s.majorant.as_ref() {
        Some(MajorantSpec::Measure(spec)) => {
            Majorant::Measure(spec.build(m).map_err(|e| schema("majorant", e.to_string()))?)
        }
        Some(MajorantSpec::LogBlaschke) => match &z {
            Some(z) => Majorant::Measure(poincare_lelong_measure(z)),
            None => return Err(schema("majorant.kind", "log_blaschke needs a `divisor`")),
        },
        _ => Majorant::Envelope(s.envelope(z.as_ref())?),
    };
    let report = match (&z, &s.measure) {
        (Some(z), _) => check_divisor_inequality(z, &majorant, &g, &h, &grid, &opts),
        (None, Some(spec)) => {
            let mu = spec.build(m).map_err(|e| schema("measure", e.to_string()))?;
            check_main_inequality(&mu, &majorant, &g, &h, &grid, &opts)
        }
        (None, None) => return Err(schema("divisor", "main-theorem needs a `divisor` or a `measure`")),
    }
    .map_err(|e| numerical("main_inequality", e))?;
    let failing = if report.pass { Vec::new() } else { vec![report.check.clone()] };
    Ok(Outcome {
        name: "main-theorem".into(),
        body: json!({ "h": h.label(), "gauge": g, "grid": grid.descriptor(), "report": report }),
        pass: report.pass,
        failing,
        grids: vec![grid.descriptor()],
        csv: None,
    })
}

fn run_uniqueness(l: &Loaded) -> std::result::Result<Outcome, Failure> {
    let s = &l.scenario;
    let m = s.dimension()?;
    let h = s.h(m)?;
    let g = s.gauge();
    let grid = s.grid(m, if m == 2 { 256 } else { 16 })?;
    let z = s.divisor()?;
    let env = s.envelope(Some(&z))?;
    let verdict = uniqueness_classifier(&z, &env, &g, &h, &grid, &s.schedule())
        .map_err(|e| numerical("uniqueness", e))?;
    Ok(Outcome {
        name: "uniqueness".into(),
        body: json!({
            "h": h.label(),
            "gauge": g,
            "envelope": format!("{env:?}"),
            "grid": grid.descriptor(),
            "verdict": verdict.verdict,
            "analysis": verdict,
        }),
        pass: true,
        failing: Vec::new(),
        grids: vec![grid.descriptor()],
        csv: None,
    })
}

fn run_blaschke(l: &Loaded) -> std::result::Result<Outcome, Failure> {
    let s = &l.scenario;
    let z = s.divisor()?;
    let schedule = s.schedule();
    let b = blaschke_condition(&z, &schedule).map_err(|e| numerical("blaschke", e))?;
    let d = match s.djrbashian {
        Some(spec) => Some(
            djrbashian_condition(&z, spec.p, spec.eps, &schedule).map_err(|e| numerical("djrbashian", e))?,
        ),
        None => None,
    };
    Ok(Outcome {
        name: "blaschke".into(),
        body: json!({ "divisor": z.label(), "blaschke": b, "djrbashian": d }),
        pass: true,
        failing: Vec::new(),
        grids: Vec::new(),
        csv: None,
    })
}

fn report_json(subcommand: &str, hash: &str, seed: u64, outcome: &Outcome) -> Value {
    json!({
        "tool": "ballzeros",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "config_sha256": hash,
        "seed": seed,
        "pass": outcome.pass,
        "failing_checks": outcome.failing,
        "grids": outcome.grids,
        "result": outcome.body,
    })
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Numerical(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &Path, base: &str, report: &Value, csv: Option<&str>) -> std::result::Result<PathBuf, Failure> {
    let text = serde_json::to_string_pretty(report).expect("reports are serializable") + "\n";
    let path = out.join(format!("{base}.json"));
    write_file(&path, &text)?;
    if let Some(csv) = csv {
        write_file(&out.join(format!("{base}.csv")), csv)?;
    }
    println!("{text}");
    Ok(path)
}

fn scenario_command(
    args: &ScenarioArgs,
    run: fn(&Loaded) -> std::result::Result<Outcome, Failure>,
) -> std::result::Result<bool, Failure> {
    let loaded = load(args)?;
    let outcome = run(&loaded)?;
    let report = report_json(&outcome.name, &loaded.hash, args.common.seed, &outcome);
    let base = loaded.scenario.output.clone().unwrap_or_else(|| outcome.name.clone());
    let path = emit(&args.common.out, &base, &report, outcome.csv.as_deref())?;
    if !outcome.pass {
        eprintln!("failing checks: {} (report: {})", outcome.failing.join(", "), path.display());
    }
    Ok(outcome.pass)
}

fn constants_command(m: usize, up_to: Option<usize>, common: &Common) -> std::result::Result<bool, Failure> {
    let row = |m: usize| -> std::result::Result<Value, Failure> {
        let c = NormConstants::for_dimension(m).map_err(|e| schema("--m", e.to_string()))?;
        Ok(json!({ "m": m, "b": c.ball_volume, "s": c.sphere_area, "d": c.riesz_normalizer }))
    };
    let mut body = row(m)?;
    if let Some(top) = up_to {
        let table = (2..=top).map(row).collect::<std::result::Result<Vec<_>, _>>()?;
        body["table"] = Value::Array(table);
    }
    let canonical = format!("constants m={m} up_to={up_to:?}");
    let outcome = Outcome { name: "constants".into(), body, pass: true, failing: Vec::new(), grids: Vec::new(), csv: None };
    let report = report_json("constants", &sha256_hex(canonical.as_bytes()), common.seed, &outcome);
    emit(&common.out, "constants", &report, None)?;
    Ok(true)
}

fn kernel_command(rho: f64, m: usize, r: f64, points: usize, common: &Common) -> std::result::Result<bool, Failure> {
    if !(r > 0.0 && r <= 1.0) || !(rho >= 0.0) || !(2..=64).contains(&m) || points < 2 {
        return Err(schema("kernel", "need ρ >= 0, 0 < r <= 1, m >= 2 and at least 2 points"));
    }
    let mut csv = String::from("phi,value\n");
    let mut samples = BTreeMap::new();
    for k in 0..points {
        let phi = std::f64::consts::PI * k as f64 / (points - 1) as f64;
        let value = kernel_from_cos(rho, m, r, phi.cos());
        let _ = writeln!(csv, "{phi},{value}");
        if k == 0 {
            samples.insert("value_at_zero", value);
        }
    }
    let canonical = format!("kernel rho={rho} m={m} r={r} points={points}");
    let body = json!({
        "rho": rho, "m": m, "r": r, "points": points,
        "support_half_angle": r.asin(),
        "samples": samples,
    });
    let outcome = Outcome {
        name: "kernel".into(),
        body,
        pass: true,
        failing: Vec::new(),
        grids: Vec::new(),
        csv: Some(csv.clone()),
    };
    let report = report_json("kernel", &sha256_hex(canonical.as_bytes()), common.seed, &outcome);
    emit(&common.out, "kernel", &report, Some(&csv))?;
    Ok(true)
}

/// Runs the CLI on explicit arguments (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Constants { m, up_to, common } => constants_command(*m, *up_to, common),
        Command::Kernel { rho, m, r, points, common } => kernel_command(*rho, *m, *r, *points, common),
        Command::CertifyH(a) => scenario_command(a, run_certify),
        Command::VerifyTestfn(a) => scenario_command(a, run_verify_testfn),
        Command::Counting(a) => scenario_command(a, run_counting),
        Command::MainTheorem(a) => scenario_command(a, run_main_theorem),
        Command::Uniqueness(a) => scenario_command(a, run_uniqueness),
        Command::Blaschke(a) => scenario_command(a, run_blaschke),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse_scenario(br#"{"divisor": {"n": 1, "atoms": [{"point": [0.5, 0], "mult": "x"}]}}"#).unwrap_err();
        match err {
            Failure::Schema { path, .. } => assert_eq!(path, "divisor.atoms[0].mult"),
            other => panic!("{other:?}"),
        }
        assert!(parse_scenario(br#"{"bogus": 1}"#).is_err());
        let s = parse_scenario(br#"{"gauge": {"power": {"c": 1, "p": 2}}, "m": 2}"#).unwrap();
        assert_eq!(s.dimension().unwrap(), 2);
    }

    #[test]
    fn inconsistent_dimensions_are_rejected() {
        let s = parse_scenario(br#"{"m": 3, "h": {"builtin": "cosine", "freq": 1, "rho": 1}}"#).unwrap();
        assert!(matches!(s.dimension(), Err(Failure::Schema { .. })));
    }
}
