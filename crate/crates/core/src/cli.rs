//! Batch harness behind the `unsharp-lab` binary.
//!
//! Each subcommand writes `<command>.json` (run metadata plus metrics) and,
//! where the result is a table, `<command>.csv` into the output directory.
//! Exit status is 0 on success, 1 for invalid input and 2 for numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::channels::{epr_robustness_sweep, luders_general};
use crate::classical::{
    mb_consistency_mc, mb_reduce, ray_overlap_geometry, sample_haar_ray, ClassicalMeasure,
    RayPoint,
};
use crate::error::{Error, Result};
use crate::experiments::chsh::{chsh_unsharpness_scan, chsh_violation_threshold};
use crate::experiments::frequency::{frequency_operator_stats, FrequencyMode, MAX_TENSOR_SYSTEMS};
use crate::experiments::phase_space::{
    husimi_pom, track_simulate, Dynamics, FockSpace, HusimiGrid, TrackParams, UpdateRule,
};
use crate::experiments::premeasure::premeasurement_demo;
use crate::io::{self, CsvTable, MeasureJson, Metadata, OperatorJson, PomJson};
use crate::linalg::{basis_vector, operator_norm, pauli, Operator, C64};
use crate::observables::{
    construct_joint_qubit, smeared_position_pom, BlochVector, GridPositionMeasure,
    JointMeasurability, Kernel,
};
use crate::sampling::{self, haar_basis, random_effect, shard_rng};
use crate::states::{
    classify_property, degree_of_reality, is_regular, qubit_nonorthogonal_decomposition,
    sharpness_report, Effect, Projection, State,
};

pub const OUT_DIR_ENV: &str = "UNSHARP_OUT_DIR";

#[derive(Parser, Debug, Clone)]
#[command(name = "unsharp-lab", version, about = "Unsharp observables laboratory")]
pub struct Cli {
    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
    /// Seed for every random draw in the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Degree of reality tr[rho E].
    Degree(StateEffectArgs),
    /// Actual / absent / indeterminate classification of an effect in a state.
    Classify(ClassifyArgs),
    /// Non-orthogonal split E = beta R + (1 - beta) R' of a trace-one qubit effect.
    Decompose(DecomposeArgs),
    /// Smeared position observable on a grid.
    Smear(SmearArgs),
    /// Joint measurability of two unbiased qubit observables.
    JointQubit(JointArgs),
    /// Generalized Lüders update.
    Luders(StateEffectArgs),
    /// Post-measurement probability and disturbance for near-eigenstates.
    EprRobustness(EprArgs),
    /// Two ray-space preparations of the same density operator.
    MbSample(MbArgs),
    /// Operator-norm distance against overlap for random ray pairs.
    RayGeometry(RayArgs),
    /// Optimized CHSH value against sharpness.
    ChshScan(ChshArgs),
    /// Frequency-operator statistics.
    FreqOperator(FreqArgs),
    /// Object-pointer entanglement after premeasurement.
    Premeasure(PremeasureArgs),
    /// Phase-space track from repeated joint q-p readouts.
    Track(TrackArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Degree(_) => "degree",
            Command::Classify(_) => "classify",
            Command::Decompose(_) => "decompose",
            Command::Smear(_) => "smear",
            Command::JointQubit(_) => "joint-qubit",
            Command::Luders(_) => "luders",
            Command::EprRobustness(_) => "epr-robustness",
            Command::MbSample(_) => "mb-sample",
            Command::RayGeometry(_) => "ray-geometry",
            Command::ChshScan(_) => "chsh-scan",
            Command::FreqOperator(_) => "freq-operator",
            Command::Premeasure(_) => "premeasure",
            Command::Track(_) => "track",
        }
    }
}

/// State specs: `bloch:x,y,z`, `ket:re0,im0,re1,im1,..`, `basis:d,i`,
/// `mixed:d`, or a path to a JSON density matrix.
/// Effect specs: `pauli:c0,cx,cy,cz`, `diag:w0,w1,..`, `scalar:d,c`, or a JSON path.
#[derive(Args, Debug, Clone, Serialize)]
pub struct StateEffectArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub effect: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub inputs: StateEffectArgs,
    /// Tolerance for "approximately real/absent", in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub effect: String,
    /// Bloch direction of the rank-1 projection R.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub r: Vec<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SmearArgs {
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.5)]
    pub dx: f64,
    /// Odd number of confidence weights centred on offset zero.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.25")]
    pub kernel: Vec<f64>,
    /// First grid index of each new bin.
    #[arg(long, value_delimiter = ',', default_value = "4,8,12", allow_negative_numbers = true)]
    pub boundaries: Vec<i64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct JointArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub b: Vec<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EprArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-3,1e-2,1e-1")]
    pub eps_grid: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MbArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub effects: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// JSON measure replacing the random-basis preparation.
    #[arg(long)]
    pub measure: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RayArgs {
    #[arg(long, default_value_t = 2)]
    pub dim_min: usize,
    #[arg(long, default_value_t = 6)]
    pub dim_max: usize,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChshArgs {
    #[arg(long, default_value_t = 0.0)]
    pub eta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreqModeArg {
    ClosedForm,
    Tensor,
    Both,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FreqArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = FreqModeArg::Both)]
    pub mode: FreqModeArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PremeasureArgs {
    /// Pure qubit state spec.
    #[arg(long)]
    pub state: String,
    /// Bloch direction whose eigenbasis the pointer records.
    #[arg(long, value_delimiter = ',', default_value = "0,0,1", allow_negative_numbers = true)]
    pub basis: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsArg {
    None,
    Harmonic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    CoherentCollapse,
    Luders,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TrackArgs {
    /// Initial coherent amplitude `re` or `re,im`.
    #[arg(long, value_delimiter = ',', default_value = "2", allow_negative_numbers = true)]
    pub alpha0: Vec<f64>,
    #[arg(long, value_enum, default_value_t = DynamicsArg::None)]
    pub dynamics: DynamicsArg,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = RuleArg::CoherentCollapse)]
    pub rule: RuleArg,
    #[arg(long, default_value_t = 40)]
    pub n_fock: usize,
    #[arg(long, default_value_t = 6.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 48)]
    pub cells: usize,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        Self {
            command: cli.command,
            seed: cli.seed,
            out_dir: cli.out_dir,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub metrics: serde_json::Value,
}

fn floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {t:?}")))
        })
        .collect()
}

fn usizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("not a non-negative integer: {t:?}")))
        })
        .collect()
}

fn bloch3(v: &[f64]) -> Result<[f64; 3]> {
    <[f64; 3]>::try_from(v).map_err(|_| Error::param(format!("expected 3 components, got {}", v.len())))
}

fn load_operator(path: &str) -> Result<Operator> {
    io::read_json::<OperatorJson>(Path::new(path))?.to_operator()
}

pub fn parse_state(spec: &str) -> Result<State> {
    match spec.split_once(':') {
        Some(("bloch", rest)) => State::qubit(bloch3(&floats(rest)?)?),
        Some(("ket", rest)) => {
            let x = floats(rest)?;
            if x.len() % 2 != 0 || x.is_empty() {
                return Err(Error::param("ket needs re,im pairs"));
            }
            let v: Vec<C64> = x.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
            let norm = crate::linalg::vector_norm(&v);
            if norm == 0.0 {
                return Err(Error::param("zero ket"));
            }
            State::pure(&v.iter().map(|z| z / norm).collect::<Vec<_>>())
        }
        Some(("basis", rest)) => match usizes(rest)?.as_slice() {
            &[d, i] if i < d => State::pure(&basis_vector(d, i)),
            _ => Err(Error::param("basis spec is basis:dim,index with index < dim")),
        },
        Some(("mixed", rest)) => match usizes(rest)?.as_slice() {
            &[d] if d > 0 => Ok(State::maximally_mixed(d)),
            _ => Err(Error::param("mixed spec is mixed:dim")),
        },
        _ => State::new(load_operator(spec)?),
    }
}

pub fn parse_effect(spec: &str) -> Result<Effect> {
    match spec.split_once(':') {
        Some(("pauli", rest)) => match floats(rest)?.as_slice() {
            &[c0, x, y, z] => Effect::new(pauli::combination(c0, [x, y, z])),
            _ => Err(Error::param("pauli spec is pauli:c0,cx,cy,cz")),
        },
        Some(("diag", rest)) => Effect::new(Operator::diag(&floats(rest)?)),
        Some(("scalar", rest)) => match floats(rest)?.as_slice() {
            &[d, c] if d >= 1.0 && d.fract() == 0.0 => Effect::scalar(d as usize, c),
            _ => Err(Error::param("scalar spec is scalar:dim,c")),
        },
        _ => Effect::new(load_operator(spec)?),
    }
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("plain data serializes")
}

struct Outputs<'a> {
    config: &'a RunConfig,
    metadata: Metadata,
    files: Vec<PathBuf>,
}

impl<'a> Outputs<'a> {
    fn new(config: &'a RunConfig) -> Result<Self> {
        fs::create_dir_all(&config.out_dir)?;
        let name = config.command.name();
        Ok(Self {
            config,
            metadata: Metadata::new(name, to_value(&config.command), config.seed),
            files: Vec::new(),
        })
    }

    fn path(&self, ext: &str) -> PathBuf {
        self.config
            .out_dir
            .join(format!("{}.{ext}", self.config.command.name()))
    }

    fn csv(&mut self, table: &CsvTable) -> Result<()> {
        let path = self.path("csv");
        table.write(&path, self.config.command.name())?;
        self.files.push(path);
        Ok(())
    }

    fn finish(mut self, metrics: serde_json::Value) -> Result<RunReport> {
        let path = self.path("json");
        io::write_json(&path, &self.metadata, &metrics)?;
        self.files.push(path);
        Ok(RunReport {
            files: self.files,
            metrics,
        })
    }
}

pub fn run(config: &RunConfig) -> Result<RunReport> {
    let mut out = Outputs::new(config)?;
    let seed = config.seed;
    let metrics = match &config.command {
        Command::Degree(a) => {
            let (s, e) = (parse_state(&a.state)?, parse_effect(&a.effect)?);
            json!({ "degree": degree_of_reality(&s, &e)? })
        }
        Command::Classify(a) => {
            let (s, e) = (parse_state(&a.inputs.state)?, parse_effect(&a.inputs.effect)?);
            let status = classify_property(&s, &e, a.eps)?;
            let sharp = sharpness_report(&e);
            json!({
                "status": status,
                "regular": is_regular(&e),
                "sharpness": sharp,
            })
        }
        Command::Decompose(a) => {
            let e = parse_effect(&a.effect)?;
            let r = Projection::qubit(bloch3(&a.r)?)?;
            let d = qubit_nonorthogonal_decomposition(&e, &r)?;
            let recon = &r.operator().scale(d.beta) + &d.rprime.operator().scale(1.0 - d.beta);
            let (_, rprime_bloch) = pauli::coordinates(&d.rprime.operator().scale(2.0));
            json!({
                "beta": d.beta,
                "rprime_bloch": rprime_bloch,
                "reconstruction_error": recon.max_abs_diff(e.operator()),
                "overlap_r_rprime": r.operator().trace_product(d.rprime.operator()).re,
            })
        }
        Command::Smear(a) => {
            let qm = GridPositionMeasure::new(a.x0, a.dx, a.points)?;
            let kernel = Kernel::centered(a.kernel.clone())?;
            let pom = smeared_position_pom(&qm, &kernel, &a.boundaries)?;
            let mut table = CsvTable::new(&["bin", "x", "response"]);
            let mut unsharpness: f64 = 0.0;
            for (label, e) in pom.outcomes().iter().zip(pom.effects()) {
                for (k, x) in qm.points().iter().enumerate() {
                    table.push_strings(vec![
                        label.clone(),
                        x.to_string(),
                        e.operator().get(k, k).re.to_string(),
                    ]);
                }
                unsharpness = unsharpness.max(sharpness_report(e).overlap_norm);
            }
            out.csv(&table)?;
            json!({
                "bins": pom.len(),
                "max_overlap_norm": unsharpness,
                "sharp": pom.is_sharp(),
            })
        }
        Command::JointQubit(a) => {
            let (av, bv) = (BlochVector::new(bloch3(&a.a)?)?, BlochVector::new(bloch3(&a.b)?)?);
            match construct_joint_qubit(av, bv)? {
                JointMeasurability::Feasible {
                    pom,
                    gamma,
                    criterion,
                } => json!({
                    "feasible": true,
                    "criterion": criterion,
                    "gamma": gamma,
                    "joint": PomJson::from(&pom),
                }),
                JointMeasurability::Infeasible { criterion } => {
                    json!({ "feasible": false, "criterion": criterion })
                }
            }
        }
        Command::Luders(a) => {
            let (s, e) = (parse_state(&a.state)?, parse_effect(&a.effect)?);
            let u = luders_general(&s, &e)?;
            json!({
                "probability": u.probability,
                "trace_distance": u.trace_distance,
                "post_state": OperatorJson::from(u.post_state.operator()),
            })
        }
        Command::EprRobustness(a) => {
            if a.eps_grid.iter().any(|e| !(1e-12..1.0).contains(e)) {
                return Err(Error::param("eps values must lie in (0, 1)"));
            }
            let rows = epr_robustness_sweep(a.dim, &a.eps_grid, a.trials, seed)?;
            let mut table = CsvTable::new(&[
                "epsilon",
                "trials",
                "min_probability_margin",
                "max_ratio",
                "mean_ratio",
            ]);
            for r in &rows {
                table.push_strings(vec![
                    r.epsilon.to_string(),
                    r.trials.to_string(),
                    r.min_probability_margin.to_string(),
                    r.max_ratio.to_string(),
                    r.mean_ratio.to_string(),
                ]);
            }
            out.csv(&table)?;
            json!({
                "max_distance_over_sqrt_eps": rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max),
                "min_probability_margin": rows.iter().map(|r| r.min_probability_margin).fold(f64::INFINITY, f64::min),
                "rows": rows,
            })
        }
        Command::MbSample(a) => mb_sample(a, seed, &mut out)?,
        Command::RayGeometry(a) => ray_geometry(a, seed, &mut out)?,
        Command::ChshScan(a) => {
            if a.steps < 2 || !(0.0..=1.0).contains(&a.eta_min) || !(a.eta_min..=1.0).contains(&a.eta_max) {
                return Err(Error::param("need 0 <= eta-min <= eta-max <= 1 and at least 2 steps"));
            }
            let grid: Vec<f64> = (0..a.steps)
                .map(|i| a.eta_min + (a.eta_max - a.eta_min) * i as f64 / (a.steps - 1) as f64)
                .collect();
            let rows = chsh_unsharpness_scan(&grid)?;
            let mut table = CsvTable::new(&["eta", "s_max"]);
            for r in &rows {
                table.push(&[r.eta, r.s_max]);
            }
            out.csv(&table)?;
            json!({
                "violation_threshold": chsh_violation_threshold(1e-6)?,
                "s_max_peak": rows.iter().map(|r| r.s_max).fold(0.0, f64::max),
            })
        }
        Command::FreqOperator(a) => {
            let modes: &[FrequencyMode] = match a.mode {
                FreqModeArg::ClosedForm => &[FrequencyMode::ClosedForm],
                FreqModeArg::Tensor => &[FrequencyMode::Tensor],
                FreqModeArg::Both => &[FrequencyMode::ClosedForm, FrequencyMode::Tensor],
            };
            let mut table = CsvTable::new(&["n", "mode", "mean", "variance"]);
            let mut max_gap: f64 = 0.0;
            for n in 1..=a.n_max {
                let mut seen = Vec::new();
                for &mode in modes {
                    if mode == FrequencyMode::Tensor && n > MAX_TENSOR_SYSTEMS && a.mode == FreqModeArg::Both {
                        continue;
                    }
                    let s = frequency_operator_stats(a.p, n, mode)?;
                    let label = match mode {
                        FrequencyMode::ClosedForm => "closed-form",
                        FrequencyMode::Tensor => "tensor",
                    };
                    table.push_strings(vec![
                        n.to_string(),
                        label.to_string(),
                        s.mean.to_string(),
                        s.variance.to_string(),
                    ]);
                    seen.push(s);
                }
                if let [x, y] = seen.as_slice() {
                    max_gap = max_gap.max((x.mean - y.mean).abs()).max((x.variance - y.variance).abs());
                }
            }
            out.csv(&table)?;
            json!({ "max_mode_disagreement": max_gap })
        }
        Command::Premeasure(a) => {
            let s = parse_state(&a.state)?;
            let n = bloch3(&a.basis)?;
            let basis: Vec<Vec<C64>> = [1.0, -1.0]
                .iter()
                .map(|&sign| {
                    let p = Projection::qubit(n.map(|x| sign * x))?;
                    Ok(p.effect().spectrum().vectors[0].clone())
                })
                .collect::<Result<_>>()?;
            let r = premeasurement_demo(&s, &basis)?;
            json!({
                "schmidt_coefficients": r.schmidt_coefficients,
                "schmidt_rank": r.schmidt_rank,
                "pointer_probabilities": r.pointer_probabilities,
                "post_state": OperatorJson::from(r.post_state.operator()),
            })
        }
        Command::Track(a) => {
            let alpha0 = match *a.alpha0.as_slice() {
                [re] => C64::new(re, 0.0),
                [re, im] => C64::new(re, im),
                _ => return Err(Error::param("alpha0 is re or re,im")),
            };
            let fock = FockSpace::new(a.n_fock)?;
            let pom = husimi_pom(&fock, HusimiGrid::new(a.half_width, a.cells)?)?;
            let params = TrackParams {
                alpha0,
                dynamics: match a.dynamics {
                    DynamicsArg::None => Dynamics::None,
                    DynamicsArg::Harmonic => Dynamics::Harmonic { omega: a.omega },
                },
                n_steps: a.steps,
                dt: a.dt,
                rule: match a.rule {
                    RuleArg::CoherentCollapse => UpdateRule::CoherentCollapse,
                    RuleArg::Luders => UpdateRule::Luders,
                },
            };
            let record = track_simulate(&pom, &params, &mut sampling::rng_from_seed(seed))?;
            let mut table = CsvTable::new(&["t", "q", "p", "norm_deficit", "disturbance"]);
            for s in &record.steps {
                table.push(&[s.time, s.q, s.p, s.norm_deficit, s.disturbance]);
            }
            out.csv(&table)?;
            json!({
                "steps_recorded": record.steps.len(),
                "halted_at": record.halted_at,
                "remainder_norm": pom.remainder_norm(),
            })
        }
    };
    out.finish(metrics)
}

fn mb_sample(a: &MbArgs, seed: u64, out: &mut Outputs) -> Result<serde_json::Value> {
    let d = a.dim;
    if d < 2 {
        return Err(Error::param("mb-sample needs dimension >= 2"));
    }
    let rays = |basis: Vec<Vec<C64>>| -> Result<Vec<RayPoint>> {
        basis.iter().map(|v| RayPoint::from_vector(v)).collect()
    };
    let computational = ClassicalMeasure::uniform(rays((0..d).map(|i| basis_vector(d, i)).collect())?)?;
    let other = match &a.measure {
        Some(path) => io::read_json::<MeasureJson>(path)?.to_measure()?,
        None => {
            let mut rng = shard_rng(seed, u64::MAX);
            ClassicalMeasure::uniform(rays(haar_basis(d, &mut rng))?)?
        }
    };
    if other.dim() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: other.dim(),
        });
    }
    let reduced_gap = operator_norm(&(mb_reduce(&computational)?.operator() - mb_reduce(&other)?.operator()));

    let rows = (0..a.effects)
        .into_par_iter()
        .map(|i| {
            let mut rng = shard_rng(seed, i as u64);
            let e = random_effect(d, &mut rng);
            let x = mb_consistency_mc(&computational, &e, a.samples, &mut rng)?;
            let y = mb_consistency_mc(&other, &e, a.samples, &mut rng)?;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut table = CsvTable::new(&["effect", "exact_a", "exact_b", "mc_b", "std_error_b", "z_b"]);
    let (mut max_gap, mut max_z): (f64, f64) = (0.0, 0.0);
    for (i, (x, y)) in rows.iter().enumerate() {
        let z = if y.std_error > 0.0 {
            (y.mc_estimate - y.exact) / y.std_error
        } else {
            0.0
        };
        max_gap = max_gap.max((x.exact - y.exact).abs());
        max_z = max_z.max(z.abs());
        table.push_strings(vec![
            i.to_string(),
            x.exact.to_string(),
            y.exact.to_string(),
            y.mc_estimate.to_string(),
            y.std_error.to_string(),
            z.to_string(),
        ]);
    }
    out.csv(&table)?;
    Ok(json!({
        "reduced_state_gap": reduced_gap,
        "max_exact_gap": max_gap,
        "max_abs_z": max_z,
    }))
}

fn ray_geometry(a: &RayArgs, seed: u64, out: &mut Outputs) -> Result<serde_json::Value> {
    if a.dim_min < 2 || a.dim_max < a.dim_min {
        return Err(Error::param("need 2 <= dim-min <= dim-max"));
    }
    let dims = a.dim_max - a.dim_min + 1;
    let rows = sampling::shards(a.pairs)
        .into_par_iter()
        .map(|(shard, n)| {
            let mut rng = shard_rng(seed, shard);
            (0..n)
                .map(|k| {
                    let dim = a.dim_min + (shard as usize * sampling::SHARD_SIZE + k) % dims;
                    let p = sample_haar_ray(dim, &mut rng)?;
                    let q = sample_haar_ray(dim, &mut rng)?;
                    Ok((dim, ray_overlap_geometry(&p, &q)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = CsvTable::new(&["dim", "overlap", "opnorm_dist", "identity_residual"]);
    let mut max_residual: f64 = 0.0;
    for (dim, g) in rows.iter().flatten() {
        max_residual = max_residual.max(g.identity_residual);
        table.push_strings(vec![
            dim.to_string(),
            g.overlap.to_string(),
            g.opnorm_dist.to_string(),
            g.identity_residual.to_string(),
        ]);
    }
    out.csv(&table)?;
    Ok(json!({ "max_identity_residual": max_residual, "pairs": a.pairs }))
}

/// Exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        2
    } else {
        1
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&RunConfig::from(cli)) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report.metrics).expect("metrics serialize");
            // a closed stdout (e.g. piped into `head`) is not a failure of the run
            let _ = writeln!(std::io::stdout(), "{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
