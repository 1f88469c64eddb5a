//! Command-line front end.
//!
//! Every command prints a JSON run record `{tool, version, seed, command,
//! input, result}` on stdout, except `sweep`, which writes CSV. Exit codes:
//! 0 success, 1 computation-domain error, 2 usage or input error.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::linalg::{eigenvalues, Party, RealMatrix};
use crate::measures::{
    doew_from_edge, entropy_formula, entropy_pure, generalized_concurrence, hs_distance, kappa,
    relativistic_witness_value,
};
use crate::ppt::{edge_state, feasible_region_check, min_ppt_eigenvalue, ppt_spectrum};
use crate::relativity::{
    boost_mixture, boost_pure, effective_angles, effective_boost_mixture, effective_boost_pure,
    kinematic_unitary, BoostParameters, ParticleKinematics,
};
use crate::states::{build_mixture, phi_state, MixtureWeights, Parity, PureState16, DEFAULT_THETA};
use crate::witness::{
    coefficient_table, detect, kkt_witness, reference_detection_value, reference_witness, separability_floor,
    CoefficientTable,
};

pub const DEFAULT_SEED: u64 = 24301;

/// Witness values below this count as detection.
pub const DETECTION_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "doew",
    version,
    about = "Entanglement witnesses for boosted two-particle states"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Seed for every sampling step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Amplitudes of one of the sixteen basis states.
    State(StateArgs),
    /// Density matrix of a mixture.
    Rho(RhoArgs),
    /// Apply a boost to a basis state or a mixture.
    Boost(BoostArgs),
    /// Partial-transpose spectrum and feasible-region report.
    Ppt(PptArgs),
    /// Construct the optimal witness for a mixture.
    Witness(WitnessArgs),
    /// Entropy, concurrence and distance measures at given angles.
    Measure(MeasureArgs),
    /// Sweep one parameter and write CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct StateArgs {
    /// State index, 1 to 16.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=16))]
    pub phi: u8,
    /// Mixing angle in radians.
    #[arg(long, default_value_t = DEFAULT_THETA, allow_negative_numbers = true)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityArg {
    Odd,
    Even,
    Free,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Odd => Parity::Odd,
            ParityArg::Even => Parity::Even,
            ParityArg::Free => Parity::Free,
        }
    }
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct WeightArgs {
    /// Weights JSON file: {"q": {"1": 0.4, ...}, "parity": "odd"}.
    #[arg(long, conflicts_with = "q")]
    pub weights: Option<PathBuf>,
    /// Inline weights, e.g. "1=0.4,3=0.2,5=0.2,7=0.2".
    #[arg(long)]
    pub q: Option<String>,
    /// Parity for inline weights.
    #[arg(long, value_enum)]
    pub parity: Option<ParityArg>,
}

#[derive(Debug, Args, Serialize)]
pub struct RhoArgs {
    #[command(flatten)]
    pub weights: WeightArgs,
    #[arg(long, default_value_t = DEFAULT_THETA, allow_negative_numbers = true)]
    pub theta: f64,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct AngleArgs {
    /// Effective Wigner angle for momentum p₁.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta1: f64,
    /// Effective Wigner angle for momentum p₂.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta2: f64,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct KinematicArgs {
    /// Observer rapidity; when given, angles come from the kinematics.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Boost direction as x,y,z.
    #[arg(long, default_value = "1,0,0")]
    pub boost_dir: String,
    #[arg(long, default_value_t = 1.0)]
    pub delta1: f64,
    #[arg(long, default_value_t = 2.0)]
    pub delta2: f64,
    /// Polar angle of p₁ in the yz-plane.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub p1_polar: f64,
    /// Polar angle of p₂ in the yz-plane.
    #[arg(long, default_value_t = FRAC_PI_2, allow_negative_numbers = true)]
    pub p2_polar: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BoostModel {
    /// Spin-preserving filter (moves entanglement quantities).
    Effective,
    /// Full block unitary of Wigner rotations (local, entanglement-preserving).
    Unitary,
}

#[derive(Debug, Args, Serialize)]
pub struct BoostArgs {
    /// Boost a basis state instead of a mixture.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=16))]
    pub phi: Option<u8>,
    #[command(flatten)]
    pub weights: WeightArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
    #[command(flatten)]
    pub kinematics: KinematicArgs,
    #[arg(long, value_enum, default_value_t = BoostModel::Effective)]
    pub model: BoostModel,
}

#[derive(Debug, Args, Serialize)]
pub struct PptArgs {
    #[command(flatten)]
    pub weights: WeightArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub weights: WeightArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
    /// Product-state samples for the separability floor (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub angles: AngleArgs,
    /// Optional mixture for the witness value and edge distance.
    #[command(flatten)]
    pub weights: WeightArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Theta1,
    Theta2,
    Alpha,
    Q1,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::Theta1 => "theta1",
            SweepParam::Theta2 => "theta2",
            SweepParam::Alpha => "alpha",
            SweepParam::Q1 => "q1",
        }
    }
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: f64,
    #[arg(long)]
    pub steps: usize,
    /// Move θ₂ together with θ₁ when sweeping theta1.
    #[arg(long)]
    pub diagonal: bool,
    /// q₁ of the edge family used when no weights are given.
    #[arg(long, default_value_t = 1.0)]
    pub q1: f64,
    #[command(flatten)]
    pub weights: WeightArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
    #[command(flatten)]
    pub kinematics: KinematicArgs,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Compute(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub command: &'static str,
    pub input: Value,
    pub result: Value,
}

#[derive(Deserialize)]
struct WeightsFile {
    q: BTreeMap<String, f64>,
    #[serde(default)]
    parity: Option<String>,
}

fn parse_parity(s: &str) -> CliResult<Parity> {
    match s.to_ascii_lowercase().as_str() {
        "odd" => Ok(Parity::Odd),
        "even" => Ok(Parity::Even),
        "free" => Ok(Parity::Free),
        other => Err(CliError::Usage(format!("unknown parity {other:?}"))),
    }
}

fn parse_index(key: &str) -> CliResult<usize> {
    key.trim()
        .trim_start_matches('q')
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid weight index {key:?}")))
}

/// Parses the weights JSON document.
pub fn parse_weights_json(text: &str) -> CliResult<MixtureWeights> {
    let file: WeightsFile =
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed weights JSON: {e}")))?;
    let parity = file
        .parity
        .as_deref()
        .map(parse_parity)
        .transpose()?
        .unwrap_or_default();
    let mut pairs = Vec::with_capacity(file.q.len());
    for (k, v) in &file.q {
        pairs.push((parse_index(k)?, *v));
    }
    MixtureWeights::from_pairs(&pairs, parity).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_inline_weights(text: &str, parity: Parity) -> CliResult<MixtureWeights> {
    let mut pairs = Vec::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected index=weight, got {item:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid weight {v:?}")))?;
        pairs.push((parse_index(k)?, v));
    }
    MixtureWeights::from_pairs(&pairs, parity).map_err(|e| CliError::Usage(e.to_string()))
}

impl WeightArgs {
    fn load(&self) -> CliResult<Option<MixtureWeights>> {
        if let Some(path) = &self.weights {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let mut w = parse_weights_json(&text)?;
            if let Some(p) = self.parity {
                w = MixtureWeights::new(*w.as_array(), p.into())
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            return Ok(Some(w));
        }
        if let Some(q) = &self.q {
            let parity = self.parity.map(Parity::from).unwrap_or_default();
            return Ok(Some(parse_inline_weights(q, parity)?));
        }
        Ok(None)
    }

    fn require(&self) -> CliResult<MixtureWeights> {
        self.load()?
            .ok_or_else(|| CliError::Usage("weights required: pass --weights FILE or --q".into()))
    }
}

fn parse_vec3(s: &str) -> CliResult<[f64; 3]> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("invalid vector {s:?}")))?;
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("expected three components, got {s:?}")));
    }
    Ok([parts[0], parts[1], parts[2]])
}

impl KinematicArgs {
    fn angles_at(&self, alpha: f64) -> CliResult<(f64, f64)> {
        let boost = self.boost(alpha)?;
        let (p1, p2) = self.particles()?;
        Ok(effective_angles(&boost, &p1, &p2))
    }

    fn boost(&self, alpha: f64) -> CliResult<BoostParameters> {
        Ok(BoostParameters::new(alpha, parse_vec3(&self.boost_dir)?)?)
    }

    fn particles(&self) -> CliResult<(ParticleKinematics, ParticleKinematics)> {
        Ok((
            ParticleKinematics::yz_plane(self.delta1, self.p1_polar)?,
            ParticleKinematics::yz_plane(self.delta2, self.p2_polar)?,
        ))
    }
}

fn cx(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn state_json(s: &PureState16) -> Value {
    json!({
        "amplitudes": s.amplitudes().iter().map(|z| cx(*z)).collect::<Vec<_>>(),
        "norm": s.norm(),
    })
}

fn real_matrix_json(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn complex_matrix_json(m: &crate::linalg::ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| cx(*z)).collect())
        .collect()
}

fn weights_json(w: &MixtureWeights) -> Value {
    let q: BTreeMap<String, f64> = (1..=16)
        .filter(|&i| w.get(i) != 0.0)
        .map(|i| (i.to_string(), w.get(i)))
        .collect();
    json!({ "q": q, "parity": format!("{:?}", w.parity()).to_lowercase() })
}

/// `q₁ = x`, `q₇ = min(x, 1 − x)`, rest spread evenly over the other six
/// odd indices. At `x = ¼` this is the edge state; for `x ≤ ½` it stays on
/// the feasible-region equalities.
pub fn edge_family(x: f64) -> crate::Result<MixtureWeights> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidSweep(format!("q1 = {x} outside [0, 1]")));
    }
    let q7 = x.min(1.0 - x);
    let rest = ((1.0 - x - q7) / 6.0).max(0.0);
    let pairs: Vec<(usize, f64)> = [
        (1, x),
        (7, q7),
        (3, rest),
        (5, rest),
        (9, rest),
        (11, rest),
        (13, rest),
        (15, rest),
    ]
    .into_iter()
    .collect();
    MixtureWeights::from_pairs(&pairs, Parity::Odd)
}

fn cmd_state(args: &StateArgs) -> CliResult<Value> {
    let s = phi_state(args.phi as usize, args.theta)?;
    Ok(state_json(&s))
}

fn cmd_rho(args: &RhoArgs) -> CliResult<Value> {
    let w = args.weights.require()?;
    let rho = build_mixture(&w, args.theta)?;
    Ok(json!({
        "weights": weights_json(&w),
        "matrix": complex_matrix_json(rho.matrix()),
        "trace": rho.trace(),
        "eigenvalues": eigenvalues(&rho),
    }))
}

fn resolve_angles(angles: &AngleArgs, kin: &KinematicArgs) -> CliResult<(f64, f64)> {
    match kin.alpha {
        Some(alpha) => kin.angles_at(alpha),
        None => Ok((angles.theta1, angles.theta2)),
    }
}

fn cmd_boost(args: &BoostArgs) -> CliResult<Value> {
    let (t1, t2) = resolve_angles(&args.angles, &args.kinematics)?;
    let unitary = || -> CliResult<_> {
        let alpha = args
            .kinematics
            .alpha
            .ok_or_else(|| CliError::Usage("--model unitary needs --alpha".into()))?;
        let boost = args.kinematics.boost(alpha)?;
        let (p1, p2) = args.kinematics.particles()?;
        Ok(kinematic_unitary(&boost, &p1, &p2)?)
    };
    let mut out = json!({ "theta1": t1, "theta2": t2, "model": args.model });
    if let Some(phi) = args.phi {
        let s = phi_state(phi as usize, DEFAULT_THETA)?;
        let b = match args.model {
            BoostModel::Effective => effective_boost_pure(&s, t1, t2)?,
            BoostModel::Unitary => {
                let u = unitary()?;
                boost_pure(&s, &u, &u)?
            }
        };
        out["state"] = state_json(&b);
        out["entropy_bits"] = json!(entropy_pure(&b)?.entropy_bits);
    } else {
        let w = args.weights.require()?;
        let rho = build_mixture(&w, DEFAULT_THETA)?;
        let b = match args.model {
            BoostModel::Effective => effective_boost_mixture(&rho, t1, t2)?,
            BoostModel::Unitary => {
                let u = unitary()?;
                boost_mixture(&rho, &u, &u)?
            }
        };
        out["weights"] = weights_json(&w);
        out["matrix"] = json!(complex_matrix_json(b.matrix()));
        out["eigenvalues"] = json!(eigenvalues(&b));
        out["min_ppt_eigenvalue"] = json!(min_ppt_eigenvalue(&b)?);
    }
    Ok(out)
}

fn cmd_ppt(args: &PptArgs) -> CliResult<Value> {
    let w = args.weights.require()?;
    let (t1, t2) = (args.angles.theta1, args.angles.theta2);
    let rho = effective_boost_mixture(&build_mixture(&w, DEFAULT_THETA)?, t1, t2)?;
    let mut out = json!({
        "weights": weights_json(&w),
        "theta1": t1,
        "theta2": t2,
        "spectrum_a": ppt_spectrum(&rho, Party::A)?,
        "spectrum_b": ppt_spectrum(&rho, Party::B)?,
    });
    if w.require_odd().is_ok() {
        let report = feasible_region_check(&w)?;
        out["feasible_region"] = json!({
            "equalities": report.equalities,
            "inequalities": report.inequalities,
            "is_ppt": report.is_ppt,
        });
    }
    Ok(out)
}

fn cmd_witness(args: &WitnessArgs, seed: u64) -> CliResult<Value> {
    let w = args.weights.require()?;
    let (t1, t2) = (args.angles.theta1, args.angles.theta2);
    let rho = effective_boost_mixture(&build_mixture(&w, DEFAULT_THETA)?, t1, t2)?;
    let (coef, witness) = kkt_witness(&rho)?;
    let mut warnings = Vec::new();
    let mut table_json = Value::Null;
    let mut closed_form = Value::Null;
    if w.require_odd().is_ok() {
        closed_form = json!(relativistic_witness_value(&w, t1, t2)?);
        match coefficient_table(&w) {
            Ok(CoefficientTable { a }) => {
                let diff = (&a - &coef.a).abs().max();
                table_json = json!({ "max_abs_diff_from_kkt": diff });
            }
            Err(e @ Error::CoefficientTie { .. }) => {
                eprintln!("warning: {e}; using the KKT coefficients");
                warnings.push(json!({ "kind": "coefficient_tie", "message": e.to_string() }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let detection = detect(&witness, &rho)?;
    let verdict = if coef.min_value < -DETECTION_TOL {
        "entangled"
    } else {
        "not detected"
    };
    let mut out = json!({
        "weights": weights_json(&w),
        "theta1": t1,
        "theta2": t2,
        "A": real_matrix_json(&coef.a),
        "singular_values": coef.singular_values,
        "w_spectrum": witness.spectrum(),
        "min_value": coef.min_value,
        "detect": detection,
        "closed_form_value": closed_form,
        "coefficient_table": table_json,
        "verdict": verdict,
        "warnings": warnings,
    });
    if args.samples > 0 {
        let floor = separability_floor(&witness.w, args.samples, seed)?;
        out["separability_floor"] = json!({
            "samples": floor.samples,
            "raw_min": floor.raw_min,
            "polished_min": floor.polished_min,
        });
    }
    Ok(out)
}

fn cmd_measure(args: &MeasureArgs) -> CliResult<Value> {
    let (t1, t2) = (args.angles.theta1, args.angles.theta2);
    let boosted = effective_boost_pure(&phi_state(1, DEFAULT_THETA)?, t1, t2)?;
    let report = entropy_pure(&boosted)?;
    let conc = generalized_concurrence(t1, t2)?;
    let reference = detect(&reference_witness(), &boosted.projector())?;
    let mut out = json!({
        "theta1": t1,
        "theta2": t2,
        "kappa": kappa(t1, t2)?,
        "entropy_bits": report.entropy_bits,
        "entropy_formula_bits": entropy_formula(t1, t2)?,
        "reduced_eigenvalues": report.eigenvalues,
        "concurrence": { "chi": conc.chi, "d": conc.d, "lambda1": conc.lambda1, "lambda2": conc.lambda2 },
        "reference_witness_on_phi1": reference,
    });
    if let Some(w) = args.weights.load()? {
        let rho = effective_boost_mixture(&build_mixture(&w, DEFAULT_THETA)?, t1, t2)?;
        let edge = effective_boost_mixture(&edge_state(1)?, t1, t2)?;
        out["weights"] = weights_json(&w);
        out["hs_distance_to_edge"] = json!(hs_distance(&edge, &rho)?);
        match doew_from_edge(&rho, &edge) {
            Ok((_, m)) => out["edge_measure"] = json!(m),
            Err(Error::CoincidentStates) => out["edge_measure"] = json!(0.0),
            Err(e) => return Err(e.into()),
        }
        if w.require_odd().is_ok() {
            out["witness_value"] = json!(relativistic_witness_value(&w, t1, t2)?);
        }
    }
    Ok(out)
}

pub const SWEEP_HEADER: [&str; 10] = [
    "parameter",
    "theta1",
    "theta2",
    "witness_value_closed_form",
    "witness_value_numeric",
    "optimal_value_closed_form",
    "optimal_value_numeric",
    "entropy_bits",
    "min_ppt_eig",
    "hs_measure",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub witness_closed: f64,
    pub witness_numeric: f64,
    pub optimal_closed: f64,
    pub optimal_numeric: f64,
    pub entropy_bits: f64,
    pub min_ppt_eig: f64,
    pub hs_measure: f64,
}

impl SweepRow {
    fn fields(&self) -> [f64; 10] {
        [
            self.value,
            self.theta1,
            self.theta2,
            self.witness_closed,
            self.witness_numeric,
            self.optimal_closed,
            self.optimal_numeric,
            self.entropy_bits,
            self.min_ppt_eig,
            self.hs_measure,
        ]
    }
}

fn validate_sweep(args: &SweepArgs) -> CliResult<()> {
    let bad = |m: String| Err(CliError::Usage(format!("invalid sweep: {m}")));
    if args.steps < 2 {
        return bad(format!("steps = {} must be at least 2", args.steps));
    }
    if !(args.start.is_finite() && args.stop.is_finite()) || args.start >= args.stop {
        return bad(format!("need start < stop, got {} and {}", args.start, args.stop));
    }
    if args.param == SweepParam::Q1 && (args.start < 0.0 || args.stop > 1.0) {
        return bad("q1 range must lie in [0, 1]".into());
    }
    if args.param == SweepParam::Alpha && args.start < 0.0 {
        return bad("alpha must be nonnegative".into());
    }
    if args.param == SweepParam::Q1 && (args.weights.weights.is_some() || args.weights.q.is_some()) {
        return bad("a q1 sweep uses the edge family; do not pass weights".into());
    }
    Ok(())
}

fn sweep_row(args: &SweepArgs, fixed: &Option<MixtureWeights>, x: f64) -> crate::Result<SweepRow> {
    let (mut t1, mut t2) = (args.angles.theta1, args.angles.theta2);
    let mut weights = fixed.clone();
    match args.param {
        SweepParam::Theta1 => {
            t1 = x;
            if args.diagonal {
                t2 = x;
            }
        }
        SweepParam::Theta2 => t2 = x,
        SweepParam::Alpha => {
            let boost = BoostParameters::new(
                x,
                parse_vec3(&args.kinematics.boost_dir).map_err(|e| Error::InvalidSweep(e.to_string()))?,
            )?;
            let p1 = ParticleKinematics::yz_plane(args.kinematics.delta1, args.kinematics.p1_polar)?;
            let p2 = ParticleKinematics::yz_plane(args.kinematics.delta2, args.kinematics.p2_polar)?;
            (t1, t2) = effective_angles(&boost, &p1, &p2);
        }
        SweepParam::Q1 => weights = Some(edge_family(x)?),
    }
    let w = match weights {
        Some(w) => w,
        None => edge_family(args.q1)?,
    };
    let rho = effective_boost_mixture(&build_mixture(&w, DEFAULT_THETA)?, t1, t2)?;
    let edge = effective_boost_mixture(&edge_state(1)?, t1, t2)?;
    let phi1 = effective_boost_pure(&phi_state(1, DEFAULT_THETA)?, t1, t2)?;
    let (coef, _) = kkt_witness(&rho)?;
    Ok(SweepRow {
        value: x,
        theta1: t1,
        theta2: t2,
        witness_closed: reference_detection_value(&w, t1, t2)?,
        witness_numeric: detect(&reference_witness(), &rho)?,
        optimal_closed: relativistic_witness_value(&w, t1, t2)?,
        optimal_numeric: coef.min_value,
        entropy_bits: entropy_pure(&phi1)?.entropy_bits,
        min_ppt_eig: min_ppt_eigenvalue(&rho)?,
        hs_measure: hs_distance(&edge, &rho)?,
    })
}

/// Evaluates the sweep grid; rows come back in grid order.
pub fn run_sweep(args: &SweepArgs) -> CliResult<Vec<SweepRow>> {
    validate_sweep(args)?;
    let fixed = args.weights.load()?;
    if let Some(w) = &fixed {
        w.require_odd().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let step = (args.stop - args.start) / (args.steps - 1) as f64;
    let grid: Vec<f64> = (0..args.steps)
        .map(|k| {
            if k + 1 == args.steps {
                args.stop
            } else {
                args.start + step * k as f64
            }
        })
        .collect();
    let rows: crate::Result<Vec<SweepRow>> = grid.par_iter().map(|&x| sweep_row(args, &fixed, x)).collect();
    Ok(rows?)
}

pub fn write_sweep_csv<W: Write>(args: &SweepArgs, rows: &[SweepRow], out: W) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = SWEEP_HEADER.map(String::from);
    header[0] = format!("sweep_{}", args.param.name());
    let io = |e: csv::Error| CliError::Usage(format!("cannot write CSV: {e}"));
    wtr.write_record(&header).map_err(io)?;
    for r in rows {
        wtr.write_record(r.fields().iter().map(|v| format!("{v:.16e}")))
            .map_err(io)?;
    }
    wtr.flush()
        .map_err(|e| CliError::Usage(format!("cannot write CSV: {e}")))?;
    Ok(())
}

/// Converts a JSON config object into `--key value` arguments.
fn config_to_args(text: &str) -> CliResult<Vec<String>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed config JSON: {e}")))?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    let mut out = Vec::new();
    for (k, v) in map {
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => out.extend([flag, s]),
            Value::Number(n) => out.extend([flag, n.to_string()]),
            Value::Array(items) => {
                let joined: Vec<String> = items
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                out.extend([flag, joined.join(",")]);
            }
            Value::Object(_) => {
                return Err(CliError::Usage(format!("config key {k:?} must not be an object")));
            }
        }
    }
    Ok(out)
}

const SUBCOMMANDS: [&str; 7] = ["state", "rho", "boost", "ppt", "witness", "measure", "sweep"];

/// Splices `--config FILE` contents in right after the subcommand, so flags
/// given explicitly on the command line take precedence.
fn expand_config(args: Vec<String>) -> CliResult<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(
                it.next()
                    .ok_or_else(|| CliError::Usage("--config needs a path".into()))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    let extra = config_to_args(&text)?;
    let pos = rest
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .map_or(rest.len(), |p| p + 1);
    rest.splice(pos..pos, extra);
    Ok(rest)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn record(seed: u64, command: &'static str, input: Value, result: Value) -> RunRecord {
    RunRecord {
        tool: "doew",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        command,
        input,
        result,
    }
}

fn dispatch<O: Write>(cli: &Cli, stdout: &mut O) -> CliResult<()> {
    let seed = cli.seed;
    let (name, input, result) = match &cli.command {
        Command::State(a) => ("state", to_value(a), cmd_state(a)?),
        Command::Rho(a) => ("rho", to_value(a), cmd_rho(a)?),
        Command::Boost(a) => ("boost", to_value(a), cmd_boost(a)?),
        Command::Ppt(a) => ("ppt", to_value(a), cmd_ppt(a)?),
        Command::Witness(a) => ("witness", to_value(a), cmd_witness(a, seed)?),
        Command::Measure(a) => ("measure", to_value(a), cmd_measure(a)?),
        Command::Sweep(a) => {
            let rows = run_sweep(a)?;
            match &a.out {
                Some(path) => {
                    let file = fs::File::create(path)
                        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
                    write_sweep_csv(a, &rows, file)?;
                    let summary = json!({ "rows": rows.len(), "csv": path.display().to_string() });
                    ("sweep", to_value(a), summary)
                }
                None => return write_sweep_csv(a, &rows, stdout),
            }
        }
    };
    let rec = record(seed, name, input, result);
    let text = serde_json::to_string_pretty(&rec).expect("run record serializes");
    writeln!(stdout, "{text}").map_err(|e| CliError::Usage(format!("cannot write output: {e}")))?;
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Output goes to `stdout`; diagnostics to `stderr`.
pub fn run<O: Write, E: Write>(args: Vec<String>, stdout: &mut O, stderr: &mut E) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
