use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::args::{DataArgs, TrainArgs};
use crate::error::{CliError, CliResult};
use bacon::data::Preparation;
use bacon::{NormalizerKind, TrainingConfig, TreeLayout};

/// Flat TOML config file. Keys mirror the command line flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub acceptance_threshold: Option<f64>,
    pub attempts: Option<usize>,
    pub freeze_loss_threshold: Option<f64>,
    pub freeze_accept_threshold: Option<f64>,
    pub is_frozen: Option<bool>,
    pub lock_loss_tolerance: Option<f64>,
    pub loss_amplifier: Option<f64>,
    pub max_epochs: Option<usize>,
    pub post_freeze_epochs: Option<usize>,
    pub save_model: Option<bool>,
    pub save_path: Option<PathBuf>,
    pub tree_layout: Option<String>,
    pub weight_penalty_strength: Option<f64>,
    pub learning_rate: Option<f64>,
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
    pub initial_temperature: Option<f64>,
    pub temperature_decay: Option<f64>,
    pub min_noise: Option<f64>,
    pub max_noise: Option<f64>,
    pub noise_increase: Option<f64>,
    pub noise_decrease: Option<f64>,
    pub history_window: Option<usize>,
    pub normalizer: Option<String>,
    pub reverse: Option<Vec<String>>,
    pub test_fraction: Option<f64>,
    pub label: Option<String>,
    pub positive: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn parse_layout(s: &str) -> CliResult<TreeLayout> {
    s.parse().map_err(|e: bacon::Error| CliError::Config(e.to_string()))
}

/// Defaults, overlaid by the config file, overlaid by flags.
pub fn training_config(file: &FileConfig, args: &TrainArgs) -> CliResult<TrainingConfig> {
    let mut c = TrainingConfig::default();
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = pick(args.$field.clone(), file.$field.clone()) {
                c.$field = v;
            }
        };
        ($field:ident, perm) => {
            if let Some(v) = pick(args.$field, file.$field) {
                c.permutation.$field = v;
            }
        };
    }
    set!(acceptance_threshold);
    set!(attempts);
    set!(freeze_loss_threshold);
    set!(is_frozen);
    set!(lock_loss_tolerance);
    set!(loss_amplifier);
    set!(max_epochs);
    set!(save_model);
    set!(save_path);
    set!(weight_penalty_strength);
    set!(learning_rate);
    set!(seed);
    set!(threshold);
    set!(initial_temperature, perm);
    set!(temperature_decay, perm);
    set!(min_noise, perm);
    set!(max_noise, perm);
    set!(noise_increase, perm);
    set!(noise_decrease, perm);
    set!(history_window, perm);
    if let Some(v) = pick(args.freeze_accept_threshold, file.freeze_accept_threshold) {
        c.freeze_accept_threshold = Some(v);
    }
    if let Some(v) = pick(args.post_freeze_epochs, file.post_freeze_epochs) {
        c.post_freeze_epochs = Some(v);
    }
    if let Some(v) = pick(args.tree_layout.as_deref(), file.tree_layout.as_deref()) {
        c.tree_layout = parse_layout(v)?;
    }
    c.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(c)
}

/// Column handling for a data file.
pub struct DataSpec {
    pub path: PathBuf,
    pub label: Option<String>,
    pub positive: Option<f64>,
    pub has_header: bool,
    pub preparation: Preparation,
}

pub fn data_spec(file: &FileConfig, args: &DataArgs) -> CliResult<DataSpec> {
    let path = args.data.clone().ok_or_else(|| CliError::Input("--data is required".into()))?;
    let normalizer = match pick(args.normalizer.as_deref(), file.normalizer.as_deref()) {
        Some(s) => s.parse::<NormalizerKind>().map_err(|e| CliError::Config(e.to_string()))?,
        None => NormalizerKind::default(),
    };
    let reverse = if args.reverse.is_empty() { file.reverse.clone().unwrap_or_default() } else { args.reverse.clone() };
    let test_fraction = pick(args.test_fraction, file.test_fraction).unwrap_or(0.2);
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(CliError::Config(format!("test_fraction {test_fraction} must lie in [0, 1)")));
    }
    Ok(DataSpec {
        path,
        label: pick(args.label.clone(), file.label.clone()),
        positive: pick(args.positive, file.positive),
        has_header: !args.no_header,
        preparation: Preparation { normalizer, reversed: reverse, test_fraction },
    })
}
