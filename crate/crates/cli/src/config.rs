//! Experiment configuration: JSON text in, validated [`ExperimentConfig`] out.
//!
//! Validation walks the whole document and reports every problem it finds,
//! each tagged with the dotted path of the offending field.

use std::collections::BTreeMap;
use std::fmt;

use labelqm::hilbert::{Observable, MAX_DIM, NORM_TOL};
use labelqm::spin::MAX_ENUMERATED_DIRECTIONS;
use labelqm::two_slit::SlitGeometry;
use labelqm::C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Weights,
    Ztable,
    Wigner,
    Sequence,
    Order,
    Pair,
    Ambiguity,
    Spin,
    Singlet,
    Twoslit,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Self::Weights,
        Self::Ztable,
        Self::Wigner,
        Self::Sequence,
        Self::Order,
        Self::Pair,
        Self::Ambiguity,
        Self::Spin,
        Self::Singlet,
        Self::Twoslit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Weights => "weights",
            Self::Ztable => "ztable",
            Self::Wigner => "wigner",
            Self::Sequence => "sequence",
            Self::Order => "order",
            Self::Pair => "pair",
            Self::Ambiguity => "ambiguity",
            Self::Spin => "spin",
            Self::Singlet => "singlet",
            Self::Twoslit => "twoslit",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Weights => "real weight table W_ij for a state on observables a, b",
            Self::Ztable => "complex amplitude table on a, b, or on a phase-space grid",
            Self::Wigner => "discrete Wigner function on a position grid",
            Self::Sequence => "direct vs sequential distributions and a sampled protocol",
            Self::Order => "joint tables for measuring a then b and b then a",
            Self::Pair => "label-correlated pair: joint tables and optional sampling",
            Self::Ambiguity => "orthodox order ambiguity and label marginal deviation for a pair",
            Self::Spin => "spin-label structure checks and conditional deviation sweep",
            Self::Singlet => "sampled singlet correlation against -cos(theta)",
            Self::Twoslit => "two-slit label and orthodox screen patterns",
        }
    }

    /// Needs a finite-dimensional state.
    fn uses_state(self) -> bool {
        matches!(self, Self::Weights | Self::Sequence | Self::Order | Self::Pair | Self::Ambiguity)
    }

    fn requires_sampling(self) -> bool {
        matches!(self, Self::Sequence | Self::Singlet)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardBasis {
    Computational,
    Hadamard,
    Fourier,
}

impl StandardBasis {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "computational" => Some(Self::Computational),
            "hadamard" => Some(Self::Hadamard),
            "fourier" => Some(Self::Fourier),
            _ => None,
        }
    }

    pub fn build(self, dim: usize) -> labelqm::Result<Observable> {
        match self {
            Self::Computational => Observable::computational(dim),
            Self::Hadamard => Observable::hadamard(dim),
            Self::Fourier => Observable::fourier(dim),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableSpec {
    Standard(StandardBasis),
    /// Row-major Hermitian matrix of `[re, im]` pairs.
    Matrix {
        matrix: Vec<Vec<[f64; 2]>>,
    },
}

impl ObservableSpec {
    pub fn build(&self, dim: usize) -> labelqm::Result<Observable> {
        match self {
            Self::Standard(b) => b.build(dim),
            Self::Matrix { matrix } => {
                let n = matrix.len();
                let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
                    let [re, im] = matrix[i][j];
                    C64::new(re, im)
                });
                Observable::from_matrix(m)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub n_samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SolverConfig {
    pub fn params(&self) -> labelqm::labels::SolverParams {
        let d = labelqm::labels::SolverParams::default();
        labelqm::labels::SolverParams {
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            restarts: self.restarts.unwrap_or(d.restarts),
            seed: self.seed.unwrap_or(d.seed),
            initial_phases: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Wavefunction {
    Gaussian { x0: f64, p0: f64, sigma: f64 },
    TwoPeak { separation: f64, sigma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_points: usize,
    #[serde(default = "one")]
    pub hbar: f64,
    /// Defaults to the balanced spacing `sqrt(2 pi hbar / n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    pub wavefunction: Wavefunction,
    /// Reference point of the labeled phase-space state, as grid indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0_index: Option<usize>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    #[serde(default = "default_semantics")]
    pub semantics: labelqm::correlated::JointSemantics,
    #[serde(default)]
    pub conditional: labelqm::correlated::ConditionalForm,
}

fn default_semantics() -> labelqm::correlated::JointSemantics {
    labelqm::correlated::JointSemantics::LabelTheory
}

impl Default for PairConfig {
    fn default() -> Self {
        Self { semantics: default_semantics(), conditional: Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinConfig {
    /// Direction counts for the deviation sweep.
    pub k: Vec<usize>,
    /// Largest direction count for the exhaustive structure checks.
    #[serde(default = "default_structure_k")]
    pub structure_k: usize,
}

fn default_structure_k() -> usize {
    10
}

impl Default for SpinConfig {
    fn default() -> Self {
        Self { k: vec![4, 6, 8, 10, 12], structure_k: default_structure_k() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingletConfig {
    pub angles_deg: Vec<f64>,
}

impl Default for SingletConfig {
    fn default() -> Self {
        Self { angles_deg: vec![0.0, 30.0, 60.0, 90.0, 120.0, 180.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    #[serde(flatten)]
    pub slits: SlitGeometry,
    #[serde(default = "one")]
    pub tag_fidelity: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { slits: SlitGeometry::default(), tag_fidelity: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown format `{other}` (expected csv, json or both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default)]
    pub formats: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub observables: BTreeMap<String, ObservableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<SpinConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singlet: Option<SingletConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

const TOP_KEYS: &[&str] = &[
    "experiment",
    "dim",
    "state",
    "normalize",
    "observables",
    "a",
    "b",
    "protocol",
    "sampling",
    "solver",
    "grid",
    "geometry",
    "pair",
    "spin",
    "singlet",
    "output",
];

const SECTION_KEYS: &[(&str, &[&str])] = &[
    ("sampling", &["n_samples", "seed"]),
    ("solver", &["max_iterations", "tolerance", "restarts", "seed"]),
    ("grid", &["n_points", "hbar", "dx", "wavefunction", "x0_index", "p0_index"]),
    (
        "geometry",
        &[
            "wavelength",
            "slit_separation",
            "screen_distance",
            "screen_halfwidth",
            "screen_points",
            "amplitude_l",
            "amplitude_r",
            "tag_fidelity",
        ],
    ),
    ("pair", &["semantics", "conditional"]),
    ("spin", &["k", "structure_k"]),
    ("singlet", &["angles_deg"]),
    ("output", &["directory", "formats"]),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{} validation error(s):\n{}", .0.len(), .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<FieldError>),
}

impl ConfigError {
    pub fn field_errors(&self) -> &[FieldError] {
        match self {
            Self::Validation(errs) => errs,
            Self::Syntax { .. } => &[],
        }
    }
}

#[derive(Default)]
struct Errors(Vec<FieldError>);

impl Errors {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError { path: path.into(), message: message.into() });
    }

    fn field<T: DeserializeOwned>(&mut self, obj: &Map<String, Value>, key: &str) -> Option<T> {
        let v = obj.get(key)?;
        match serde_json::from_value(v.clone()) {
            Ok(t) => Some(t),
            Err(e) => {
                self.push(key, e.to_string());
                None
            }
        }
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Object(obj) = value else {
        return Err(ConfigError::Validation(vec![FieldError {
            path: String::new(),
            message: "config must be a JSON object".into(),
        }]));
    };

    let mut errs = Errors::default();
    for key in obj.keys() {
        if !TOP_KEYS.contains(&key.as_str()) {
            errs.push(key.clone(), format!("unknown key `{key}`"));
        }
    }
    let mut bad_sections = Vec::new();
    for (section, allowed) in SECTION_KEYS {
        match obj.get(*section) {
            Some(Value::Object(inner)) => {
                for key in inner.keys() {
                    if !allowed.contains(&key.as_str()) {
                        errs.push(format!("{section}.{key}"), format!("unknown key `{key}`"));
                        bad_sections.push(*section);
                    }
                }
            }
            Some(Value::Null) | None => {}
            Some(_) => {
                errs.push(*section, "expected an object");
                bad_sections.push(*section);
            }
        }
    }

    let experiment: Option<Experiment> = match obj.get("experiment") {
        None => {
            errs.push("experiment", "missing required field");
            None
        }
        Some(_) => errs.field(&obj, "experiment"),
    };
    let sections_ok = |key: &str| !bad_sections.contains(&key);
    let config = ExperimentConfig {
        experiment: experiment.unwrap_or(Experiment::Weights),
        dim: errs.field(&obj, "dim"),
        state: errs.field(&obj, "state"),
        normalize: errs.field(&obj, "normalize").unwrap_or(false),
        observables: observables_field(&mut errs, &obj),
        a: errs.field(&obj, "a"),
        b: errs.field(&obj, "b"),
        protocol: errs.field(&obj, "protocol"),
        sampling: sections_ok("sampling").then(|| errs.field(&obj, "sampling")).flatten(),
        solver: sections_ok("solver").then(|| errs.field(&obj, "solver")).flatten(),
        grid: sections_ok("grid").then(|| errs.field(&obj, "grid")).flatten(),
        geometry: sections_ok("geometry").then(|| errs.field(&obj, "geometry")).flatten(),
        pair: sections_ok("pair").then(|| errs.field(&obj, "pair")).flatten(),
        spin: sections_ok("spin").then(|| errs.field(&obj, "spin")).flatten(),
        singlet: sections_ok("singlet").then(|| errs.field(&obj, "singlet")).flatten(),
        output: sections_ok("output").then(|| errs.field(&obj, "output")).flatten(),
    };
    if experiment.is_some() {
        validate(&config, &obj, &mut errs);
    }
    if errs.0.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Validation(errs.0))
    }
}

fn observables_field(errs: &mut Errors, obj: &Map<String, Value>) -> BTreeMap<String, ObservableSpec> {
    let mut out = BTreeMap::new();
    match obj.get("observables") {
        None | Some(Value::Null) => {}
        Some(Value::Object(map)) => {
            for (name, spec) in map {
                let path = format!("observables.{name}");
                if StandardBasis::from_name(name).is_some() {
                    errs.push(path, "name shadows a standard basis");
                    continue;
                }
                match spec {
                    Value::String(s) => match StandardBasis::from_name(s) {
                        Some(b) => {
                            out.insert(name.clone(), ObservableSpec::Standard(b));
                        }
                        None => errs.push(
                            path,
                            format!("unknown standard basis `{s}` (expected computational, hadamard or fourier)"),
                        ),
                    },
                    Value::Object(m) => {
                        if let Some(k) = m.keys().find(|k| *k != "matrix") {
                            errs.push(format!("{path}.{k}"), format!("unknown key `{k}`"));
                            continue;
                        }
                        match m.get("matrix").map(|v| serde_json::from_value::<Vec<Vec<[f64; 2]>>>(v.clone())) {
                            Some(Ok(matrix)) => {
                                out.insert(name.clone(), ObservableSpec::Matrix { matrix });
                            }
                            Some(Err(e)) => errs.push(format!("{path}.matrix"), e.to_string()),
                            None => errs.push(path, "missing field `matrix`"),
                        }
                    }
                    _ => errs.push(path, "expected a standard basis name or {\"matrix\": ...}"),
                }
            }
        }
        Some(_) => errs.push("observables", "expected an object"),
    }
    out
}

impl ExperimentConfig {
    /// Resolves an observable reference: a declared name or a standard basis.
    pub fn observable_spec(&self, name: &str) -> Option<ObservableSpec> {
        self.observables.get(name).cloned().or_else(|| StandardBasis::from_name(name).map(ObservableSpec::Standard))
    }

    pub fn build_observable(&self, name: &str) -> labelqm::Result<Observable> {
        let spec = self
            .observable_spec(name)
            .ok_or_else(|| labelqm::Error::InvalidArgument(format!("unknown observable `{name}`")))?;
        spec.build(self.dim.unwrap_or(0))
    }

    /// State amplitudes, normalized when `normalize` is set.
    pub fn state_amplitudes(&self) -> Vec<C64> {
        let raw: Vec<C64> = self.state.iter().flatten().map(|[re, im]| C64::new(*re, *im)).collect();
        if self.normalize {
            let n = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            raw.iter().map(|z| z / n).collect()
        } else {
            raw
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.sampling.as_ref().map(|s| s.seed)
    }

    pub fn format(&self) -> Format {
        self.output.as_ref().map(|o| o.formats).unwrap_or_default()
    }

    pub fn directory(&self) -> Option<&str> {
        self.output.as_ref().and_then(|o| o.directory.as_deref())
    }

    /// Pretty JSON with fields in declaration order; parsing it again yields
    /// the same config.
    pub fn canonical_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn validate(c: &ExperimentConfig, obj: &Map<String, Value>, errs: &mut Errors) {
    let exp = c.experiment;
    if exp.uses_state() {
        validate_state(c, obj, errs);
        let refs: &[&str] = match exp {
            Experiment::Sequence => &[],
            _ => &["a", "b"],
        };
        for key in refs {
            let name = if *key == "a" { &c.a } else { &c.b };
            if name.is_none() && obj.get(*key).is_none() {
                errs.push(*key, "missing observable reference");
            }
        }
        if let (Some(dim), true) = (c.dim, (2..=MAX_DIM).contains(&c.dim.unwrap_or(0))) {
            let mut check = |path: String, name: &str| match c.observable_spec(name) {
                None => errs.push(path, format!("`{name}` is neither a declared observable nor a standard basis")),
                Some(spec) => {
                    if let ObservableSpec::Matrix { matrix } = &spec {
                        if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                            errs.push(path, format!("matrix `{name}` must be {dim}x{dim}"));
                            return;
                        }
                    }
                    if let Err(e) = spec.build(dim) {
                        errs.push(path, format!("observable `{name}`: {e}"));
                    }
                }
            };
            if let Some(a) = &c.a {
                check("a".into(), a);
            }
            if let Some(b) = &c.b {
                check("b".into(), b);
            }
            if exp == Experiment::Sequence {
                match &c.protocol {
                    None => errs.push("protocol", "missing measurement protocol"),
                    Some(p) if p.is_empty() => errs.push("protocol", "protocol is empty"),
                    Some(p) => {
                        for (i, name) in p.iter().enumerate() {
                            check(format!("protocol[{i}]"), name);
                        }
                    }
                }
            }
        }
    }

    if exp.requires_sampling() && c.sampling.is_none() && obj.get("sampling").is_none() {
        errs.push("sampling", format!("{} requires sampling.n_samples and sampling.seed", exp.name()));
    }
    if let Some(s) = &c.sampling {
        if s.n_samples == 0 {
            errs.push("sampling.n_samples", "must be at least 1");
        }
    }
    if let Some(s) = &c.solver {
        if s.restarts == Some(0) {
            errs.push("solver.restarts", "must be at least 1");
        }
        if let Some(t) = s.tolerance {
            if t.is_nan() || t <= 0.0 {
                errs.push("solver.tolerance", "must be positive");
            }
        }
    }

    match exp {
        Experiment::Wigner | Experiment::Ztable if c.grid.is_some() => validate_grid(c, errs),
        Experiment::Wigner if obj.get("grid").is_none() => errs.push("grid", "wigner requires a grid"),
        Experiment::Ztable if c.grid.is_none() && obj.get("grid").is_none() => {
            validate_state(c, obj, errs);
            for key in ["a", "b"] {
                let name = if key == "a" { &c.a } else { &c.b };
                match name {
                    None => errs.push(key, "missing observable reference"),
                    Some(n) if c.observable_spec(n).is_none() => {
                        errs.push(key, format!("`{n}` is neither a declared observable nor a standard basis"))
                    }
                    Some(n) => {
                        if let Some(dim) = c.dim.filter(|d| (2..=MAX_DIM).contains(d)) {
                            if let Err(e) = c.observable_spec(n).unwrap().build(dim) {
                                errs.push(key, format!("observable `{n}`: {e}"));
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }

    if let Some(g) = &c.geometry {
        if let Err(e) = g.slits.validate() {
            errs.push("geometry", e.to_string());
        }
        if !(0.0..=1.0).contains(&g.tag_fidelity) {
            errs.push("geometry.tag_fidelity", "must lie in [0, 1]");
        }
    }
    if let Some(s) = &c.spin {
        for (i, k) in s.k.iter().enumerate() {
            if !(1..=MAX_ENUMERATED_DIRECTIONS).contains(k) {
                errs.push(format!("spin.k[{i}]"), format!("must lie in 1..={MAX_ENUMERATED_DIRECTIONS}"));
            }
        }
        if !(1..=MAX_ENUMERATED_DIRECTIONS).contains(&s.structure_k) {
            errs.push("spin.structure_k", format!("must lie in 1..={MAX_ENUMERATED_DIRECTIONS}"));
        }
    }
    if let Some(s) = &c.singlet {
        if s.angles_deg.is_empty() {
            errs.push("singlet.angles_deg", "no angles given");
        }
        if s.angles_deg.iter().any(|a| !a.is_finite()) {
            errs.push("singlet.angles_deg", "angles must be finite");
        }
    }
}

fn validate_state(c: &ExperimentConfig, obj: &Map<String, Value>, errs: &mut Errors) {
    match c.dim {
        None if obj.get("dim").is_none() => errs.push("dim", "missing required field"),
        Some(d) if !(2..=MAX_DIM).contains(&d) => errs.push("dim", format!("must lie in 2..={MAX_DIM}, got {d}")),
        _ => {}
    }
    let Some(state) = &c.state else {
        if obj.get("state").is_none() {
            errs.push("state", "missing required field");
        }
        return;
    };
    if let Some(d) = c.dim {
        if state.len() != d {
            errs.push("state", format!("expected {d} amplitudes, found {}", state.len()));
        }
    }
    let norm = state.iter().map(|[re, im]| re * re + im * im).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        errs.push("state", "state has zero norm");
    } else if !c.normalize && (norm * norm - 1.0).abs() > NORM_TOL {
        errs.push("state", format!("state norm is {norm:.12}, expected 1 (set \"normalize\": true to rescale)"));
    }
}

fn validate_grid(c: &ExperimentConfig, errs: &mut Errors) {
    let Some(g) = &c.grid else { return };
    let min = if c.experiment == Experiment::Wigner { labelqm::labels::MIN_WIGNER_POINTS } else { 2 };
    if !g.n_points.is_power_of_two() || g.n_points < min {
        errs.push("grid.n_points", format!("must be a power of two and at least {min}"));
    }
    if g.hbar.is_nan() || g.hbar <= 0.0 {
        errs.push("grid.hbar", "must be positive");
    }
    if let Some(dx) = g.dx {
        if dx.is_nan() || dx <= 0.0 {
            errs.push("grid.dx", "must be positive");
        }
    }
    let sigma = match g.wavefunction {
        Wavefunction::Gaussian { sigma, .. } | Wavefunction::TwoPeak { sigma, .. } => sigma,
    };
    if sigma.is_nan() || sigma <= 0.0 {
        errs.push("grid.wavefunction.sigma", "must be positive");
    }
    for (key, idx) in [("grid.x0_index", g.x0_index), ("grid.p0_index", g.p0_index)] {
        if let Some(i) = idx {
            if i >= g.n_points {
                errs.push(key, format!("index {i} outside the {}-point grid", g.n_points));
            }
        }
    }
}
