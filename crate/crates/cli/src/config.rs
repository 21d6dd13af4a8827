//! Command-line flags, JSON config files and their merge into one
//! [`ExperimentConfig`].

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// A bad flag, config file or parameter set. Maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    SolveRotational,
    Solve1d,
    Dirichlet,
    Latitude,
    Flow,
    Reparam,
    Translator,
    Spectral,
    DensityTable,
    VerifyAll,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::SolveRotational => "solve-rotational",
            CommandKind::Solve1d => "solve-1d",
            CommandKind::Dirichlet => "dirichlet",
            CommandKind::Latitude => "latitude",
            CommandKind::Flow => "flow",
            CommandKind::Reparam => "reparam",
            CommandKind::Translator => "translator",
            CommandKind::Spectral => "spectral",
            CommandKind::DensityTable => "density-table",
            CommandKind::VerifyAll => "verify-all",
        }
    }

    /// Parameters that must be given by flag or config file.
    fn required(self) -> &'static [&'static str] {
        match self {
            CommandKind::SolveRotational => &["n", "kappa"],
            CommandKind::Solve1d => &["kappa"],
            CommandKind::Dirichlet => &["data"],
            CommandKind::Latitude => &["epsilon"],
            CommandKind::Flow => &["kappa"],
            CommandKind::Reparam => &["kappa", "s"],
            CommandKind::Translator => &["epsilon", "lambda"],
            CommandKind::Spectral => &["n", "lambda1", "epsilon"],
            CommandKind::DensityTable => &["k_max"],
            CommandKind::VerifyAll => &[],
        }
    }
}

/// The resolved description of one run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub parameters: Map<String, Value>,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl ExperimentConfig {
    /// Typed view of the parameters; unknown keys are usage errors.
    pub fn params<T: DeserializeOwned>(&self) -> Result<T, UsageError> {
        serde_json::from_value(Value::Object(self.parameters.clone()))
            .map_err(|e| usage(format!("{}: {e}", self.command.name())))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<CommandKind>,
    #[serde(default)]
    parameters: Map<String, Value>,
    output_dir: Option<PathBuf>,
    formats: Option<Vec<Format>>,
}

#[derive(Debug, Parser)]
#[command(name = "expanderlab", version, about = "Self-expander experiments: solvers, flows and certificates")]
pub struct Cli {
    /// JSON file with command, parameters, output_dir and formats.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for all artifacts and the manifest.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Comma-separated subset of csv, json, svg.
    #[arg(long, global = true, value_delimiter = ',')]
    pub formats: Option<Vec<Format>>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rotational expander φ_{κ,R} with barrier certificate.
    SolveRotational(RotationalArgs),
    /// One-dimensional expander with its barriers.
    #[command(name = "solve-1d")]
    Solve1d(OneDimArgs),
    /// Dirichlet problem on a disk with cone boundary data.
    Dirichlet(DirichletArgs),
    /// Rotational band problem on the sphere.
    Latitude(LatitudeArgs),
    /// Normalized flow towards the expander.
    Flow(FlowArgs),
    /// s-flow versus rescaled mean curvature flow.
    Reparam(ReparamArgs),
    /// Radial translator and its arrival-time limit.
    Translator(TranslatorArgs),
    /// Stability functional and classification.
    Spectral(SpectralArgs),
    /// Cone densities and sphere entropies against √2.
    DensityTable(DensityArgs),
    /// Run the whole certificate suite.
    VerifyAll(VerifyArgs),
}

/// Optional reals where "inf" stands for +∞, which JSON cannot carry.
mod extended {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if x.is_infinite() && *x > 0.0 => s.serialize_str("inf"),
            Some(x) => s.serialize_f64(*x),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(x)) => Ok(Some(x)),
            Some(Repr::Text(t)) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" => Ok(Some(f64::INFINITY)),
                other => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {other:?}"))),
            },
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RotationalArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Number of grid nodes.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OneDimArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

fn parse_data(s: &str) -> Result<Value, String> {
    if s.trim_start().starts_with('{') {
        serde_json::from_str(s).map_err(|e| e.to_string())
    } else {
        Ok(Value::String(s.to_string()))
    }
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DirichletArgs {
    /// rotational, abs-first, max-blend, linear, or a JSON object.
    #[arg(long, value_parser = parse_data)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Grid points per side of the square around the disk.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LatitudeArgs {
    /// Positive, or "inf" for the unweighted problem.
    #[arg(long)]
    #[serde(default, with = "extended", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FlowArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    /// Grid spacing.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Start from the expander itself.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub from_expander: bool,
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ReparamArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TranslatorArgs {
    /// Positive, or "inf".
    #[arg(long)]
    #[serde(default, with = "extended", skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Dimension of the base disk.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    /// Radius of the base disk.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    /// Increasing speeds for the arrival-time limit.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SpectralArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DensityArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
}

#[derive(Debug, Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Reduced resolution and relaxed tolerances.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "is_false")]
    pub quick: bool,
    /// Restrict to these criteria.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub only: Option<Vec<u32>>,
}

fn to_map<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args).expect("flags serialize") {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

impl Command {
    fn kind(&self) -> CommandKind {
        match self {
            Command::SolveRotational(_) => CommandKind::SolveRotational,
            Command::Solve1d(_) => CommandKind::Solve1d,
            Command::Dirichlet(_) => CommandKind::Dirichlet,
            Command::Latitude(_) => CommandKind::Latitude,
            Command::Flow(_) => CommandKind::Flow,
            Command::Reparam(_) => CommandKind::Reparam,
            Command::Translator(_) => CommandKind::Translator,
            Command::Spectral(_) => CommandKind::Spectral,
            Command::DensityTable(_) => CommandKind::DensityTable,
            Command::VerifyAll(_) => CommandKind::VerifyAll,
        }
    }

    fn flags(&self) -> Map<String, Value> {
        match self {
            Command::SolveRotational(a) => to_map(a),
            Command::Solve1d(a) => to_map(a),
            Command::Dirichlet(a) => to_map(a),
            Command::Latitude(a) => to_map(a),
            Command::Flow(a) => to_map(a),
            Command::Reparam(a) => to_map(a),
            Command::Translator(a) => to_map(a),
            Command::Spectral(a) => to_map(a),
            Command::DensityTable(a) => to_map(a),
            Command::VerifyAll(a) => to_map(a),
        }
    }
}

fn read_config(path: &Path) -> Result<ConfigFile, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

/// Merge a config file with flags; flags win.
pub fn resolve(cli: Cli) -> Result<ExperimentConfig, UsageError> {
    let file = cli.config.as_deref().map(read_config).transpose()?;
    let (file_command, mut parameters, file_dir, file_formats) = match file {
        Some(f) => (f.command, f.parameters, f.output_dir, f.formats),
        None => (None, Map::new(), None, None),
    };
    let command = match (&cli.command, file_command) {
        (Some(c), Some(fc)) if c.kind() != fc => {
            return Err(usage(format!(
                "config file names command {} but {} was given",
                fc.name(),
                c.kind().name()
            )))
        }
        (Some(c), _) => c.kind(),
        (None, Some(fc)) => fc,
        (None, None) => return Err(usage("no command given; see --help")),
    };
    if let Some(c) = &cli.command {
        parameters.extend(c.flags());
    }
    for key in command.required() {
        if !parameters.contains_key(*key) {
            return Err(usage(format!("{} needs parameter {key}", command.name())));
        }
    }
    let formats = cli
        .formats
        .or(file_formats)
        .unwrap_or_else(|| vec![Format::Csv, Format::Json, Format::Svg]);
    if formats.is_empty() {
        return Err(usage("formats must not be empty"));
    }
    let output_dir = cli.output_dir.or(file_dir).unwrap_or_else(|| PathBuf::from("out"));
    let config = ExperimentConfig {
        command,
        parameters,
        output_dir,
        formats,
    };
    validate_params(&config)?;
    Ok(config)
}

fn validate_params(config: &ExperimentConfig) -> Result<(), UsageError> {
    match config.command {
        CommandKind::SolveRotational => config.params::<RotationalArgs>().map(drop),
        CommandKind::Solve1d => config.params::<OneDimArgs>().map(drop),
        CommandKind::Dirichlet => config.params::<DirichletArgs>().map(drop),
        CommandKind::Latitude => config.params::<LatitudeArgs>().map(drop),
        CommandKind::Flow => config.params::<FlowArgs>().map(drop),
        CommandKind::Reparam => config.params::<ReparamArgs>().map(drop),
        CommandKind::Translator => config.params::<TranslatorArgs>().map(drop),
        CommandKind::Spectral => config.params::<SpectralArgs>().map(drop),
        CommandKind::DensityTable => config.params::<DensityArgs>().map(drop),
        CommandKind::VerifyAll => config.params::<VerifyArgs>().map(drop),
    }
}

/// Thread cap from `EXPANDERLAB_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>, UsageError> {
    match std::env::var("EXPANDERLAB_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(_) => Err(usage("EXPANDERLAB_THREADS is not valid unicode")),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(usage(format!("EXPANDERLAB_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}
