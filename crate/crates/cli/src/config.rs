use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use featsel::dataset::SynthSpec;
use featsel::eval::{LambdaChoice, Method, MethodParams};
use featsel::forest::ForestSpec;
use featsel::seed;

use crate::error::CliError;

/// Keys a config file may set. Manifest bookkeeping lives under `run.` and
/// is ignored on load, so a manifest can be fed back in as a config.
pub const KNOWN_KEYS: &[&str] = &[
    "data",
    "target",
    "synth",
    "n",
    "seed",
    "percentile",
    "validation-fraction",
    "method",
    "methods",
    "lambda",
    "lambda-fraction",
    "ridge-lambda",
    "pearson-z",
    "pai-z",
    "pai-repeats",
    "bootstraps",
    "bolasso-bootstraps",
    "bins",
    "plateau",
    "rfe-inner-fraction",
    "rfe-min-subset",
    "trees",
    "max-features",
    "min-samples-leaf",
    "max-depth",
    "relevant",
    "redundant",
    "noise",
    "noise-sd",
    "input",
    "format",
    "out",
    "workers",
];

/// Plain `key = value` lines; `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    origin: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|m| CliError::usage(format!("{}: {m}", path.display())))?;
        cfg.origin = Some(path.to_path_buf());
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(format!("line {}: expected key = value", no + 1));
            };
            let key = k.trim().replace('_', "-");
            if key.starts_with("run.") {
                continue;
            }
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key {key:?}", no + 1));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values, origin: None })
    }

    /// The flag value if given, else the config value, parsed.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| {
                let from = self.origin.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                CliError::usage(format!("{from}: bad value {v:?} for {key}: {e}"))
            }),
        }
    }
}

/// Where the rows come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Csv { path: PathBuf, target: String },
    Synth(SynthSpec),
}

/// Fully resolved settings for a rank or benchmark run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: Source,
    pub percentile: f64,
    pub validation_fraction: f64,
    pub seed: u64,
    pub params: MethodParams,
    pub forest: ForestSpec,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

/// Raw per-run flags shared by `rank` and `benchmark`, before merging with a
/// config file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct RunFlags {
    /// CSV file with one column per feature plus the target column.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Target column of --data (continuous stress, or already 0/1).
    #[arg(long)]
    pub target: Option<String>,
    /// Generate the data instead: `default` (5 relevant, 10 redundant,
    /// 19 noise) or `RELEVANT,REDUNDANT,NOISE`.
    #[arg(long)]
    pub synth: Option<String>,
    /// Sample count for --synth.
    #[arg(long)]
    pub n: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stress percentile above which a sample is a hotspot.
    #[arg(long)]
    pub percentile: Option<f64>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    /// Absolute LASSO penalty (overrides --lambda-fraction).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// LASSO penalty as a fraction of lambda_max.
    #[arg(long)]
    pub lambda_fraction: Option<f64>,
    #[arg(long)]
    pub ridge_lambda: Option<f64>,
    #[arg(long)]
    pub pearson_z: Option<f64>,
    #[arg(long)]
    pub pai_z: Option<f64>,
    #[arg(long)]
    pub pai_repeats: Option<usize>,
    /// FeaLect bootstrap count.
    #[arg(long)]
    pub bootstraps: Option<usize>,
    #[arg(long)]
    pub bolasso_bootstraps: Option<usize>,
    /// Equal-frequency bins for symmetrical uncertainty.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub plateau: Option<usize>,
    #[arg(long)]
    pub rfe_inner_fraction: Option<f64>,
    #[arg(long)]
    pub rfe_min_subset: Option<usize>,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub max_features: Option<usize>,
    #[arg(long)]
    pub min_samples_leaf: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[command(flatten)]
    pub common: CommonFlags,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonFlags {
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Key-value config file; flags win over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonFlags {
    pub fn config_file(&self) -> Result<ConfigFile, CliError> {
        match &self.config {
            Some(p) => ConfigFile::load(p),
            None => Ok(ConfigFile::default()),
        }
    }

    pub fn resolve_out(&self, cfg: &ConfigFile) -> Result<PathBuf, CliError> {
        Ok(cfg.pick(self.out.clone(), "out")?.unwrap_or_else(|| PathBuf::from(".")))
    }

    pub fn resolve_workers(&self, cfg: &ConfigFile) -> Result<Option<usize>, CliError> {
        let w = cfg.pick(self.workers, "workers")?;
        if w == Some(0) {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        Ok(w)
    }
}

/// `default` or `R,D,Z` counts.
pub fn parse_synth(text: &str, n: usize, seed: u64) -> Result<SynthSpec, CliError> {
    if text == "default" {
        return Ok(SynthSpec::hotspot_like(n, seed));
    }
    let counts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::usage(format!("--synth expects `default` or RELEVANT,REDUNDANT,NOISE, got {text:?}")))?;
    let [r, d, z] = counts[..] else {
        return Err(CliError::usage(format!("--synth needs three counts, got {text:?}")));
    };
    Ok(SynthSpec {
        n_relevant: r,
        n_redundant: d,
        n_noise: z,
        ..SynthSpec::hotspot_like(n, seed)
    })
}

fn check(ok: bool, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::usage(msg))
    }
}

pub fn validate_synth(spec: &SynthSpec) -> Result<(), CliError> {
    check(spec.n_samples >= 2, "synthetic data needs at least 2 samples")?;
    check(spec.n_relevant >= 1, "need at least one relevant feature")?;
    check(spec.noise_sd >= 0.0 && spec.noise_sd.is_finite(), "noise sd must be finite and non-negative")
}

/// Derived seed streams of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seeds {
    pub master: u64,
    pub split: u64,
    pub forest: u64,
    pub methods: u64,
}

impl Seeds {
    pub fn from_master(master: u64) -> Self {
        Self {
            master,
            split: seed::derive(master, "split", 0),
            forest: seed::derive(master, "forest", 0),
            methods: seed::derive(master, "methods", 0),
        }
    }
}

impl RunConfig {
    pub fn resolve(flags: &RunFlags) -> Result<(Self, ConfigFile), CliError> {
        let cfg = flags.common.config_file()?;
        let seed = cfg.pick(flags.seed, "seed")?.unwrap_or(0);
        let seeds = Seeds::from_master(seed);

        let data: Option<PathBuf> = cfg.pick(flags.data.clone(), "data")?;
        let synth: Option<String> = cfg.pick(flags.synth.clone(), "synth")?;
        let source = match (data, synth) {
            (Some(_), Some(_)) => return Err(CliError::usage("give either --data or --synth, not both")),
            (None, None) => return Err(CliError::usage("no input: give --data FILE --target COLUMN or --synth default")),
            (Some(path), None) => {
                let target = cfg
                    .pick(flags.target.clone(), "target")?
                    .ok_or_else(|| CliError::usage("--data needs --target COLUMN"))?;
                Source::Csv { path, target }
            }
            (None, Some(text)) => {
                let n = cfg.pick(flags.n, "n")?.unwrap_or(5000);
                let spec = parse_synth(&text, n, seed)?;
                validate_synth(&spec)?;
                Source::Synth(spec)
            }
        };

        let percentile = cfg.pick(flags.percentile, "percentile")?.unwrap_or(90.0);
        check(percentile > 0.0 && percentile < 100.0, "--percentile must lie in (0, 100)")?;
        let validation_fraction = cfg.pick(flags.validation_fraction, "validation-fraction")?.unwrap_or(0.25);
        check(
            validation_fraction > 0.0 && validation_fraction < 1.0,
            "--validation-fraction must lie in (0, 1)",
        )?;

        let mut params = MethodParams {
            seed: seeds.methods,
            ..MethodParams::default()
        };
        let lambda: Option<f64> = cfg.pick(flags.lambda, "lambda")?;
        let fraction: Option<f64> = cfg.pick(flags.lambda_fraction, "lambda-fraction")?;
        params.lasso_lambda = match (lambda, fraction) {
            (Some(l), _) => {
                check(l >= 0.0 && l.is_finite(), "--lambda must be finite and non-negative")?;
                LambdaChoice::Absolute(l)
            }
            (None, Some(f)) => {
                check(f >= 0.0 && f.is_finite(), "--lambda-fraction must be finite and non-negative")?;
                LambdaChoice::Relative(f)
            }
            (None, None) => params.lasso_lambda,
        };
        if let Some(v) = cfg.pick(flags.ridge_lambda, "ridge-lambda")? {
            check(v > 0.0 && v.is_finite(), "--ridge-lambda must be positive")?;
            params.ridge_lambda = v;
        }
        if let Some(v) = cfg.pick(flags.pearson_z, "pearson-z")? {
            params.pearson_z = v;
        }
        if let Some(v) = cfg.pick(flags.pai_z, "pai-z")? {
            params.pai_z = v;
        }
        if let Some(v) = cfg.pick(flags.pai_repeats, "pai-repeats")? {
            check(v >= 1, "--pai-repeats must be at least 1")?;
            params.pai_repeats = v;
        }
        if let Some(v) = cfg.pick(flags.bootstraps, "bootstraps")? {
            check(v >= 2, "--bootstraps must be at least 2")?;
            params.fealect_bootstraps = v;
        }
        if let Some(v) = cfg.pick(flags.bolasso_bootstraps, "bolasso-bootstraps")? {
            check(v >= 1, "--bolasso-bootstraps must be at least 1")?;
            params.bolasso_bootstraps = v;
        }
        if let Some(v) = cfg.pick(flags.bins, "bins")? {
            check(v >= 2, "--bins must be at least 2")?;
            params.cfs.bins = v;
        }
        if let Some(v) = cfg.pick(flags.plateau, "plateau")? {
            check(v >= 1, "--plateau must be at least 1")?;
            params.cfs.plateau = v;
        }
        if let Some(v) = cfg.pick(flags.rfe_inner_fraction, "rfe-inner-fraction")? {
            check(v > 0.0 && v < 1.0, "--rfe-inner-fraction must lie in (0, 1)")?;
            params.rfe_inner_fraction = v;
        }
        if let Some(v) = cfg.pick(flags.rfe_min_subset, "rfe-min-subset")? {
            check(v >= 1, "--rfe-min-subset must be at least 1")?;
            params.rfe_min_subset = v;
        }

        let mut forest = ForestSpec::with_seed(seeds.forest);
        if let Some(v) = cfg.pick(flags.trees, "trees")? {
            check(v >= 1, "--trees must be at least 1")?;
            forest.n_trees = v;
        }
        if let Some(v) = cfg.pick(flags.max_features, "max-features")? {
            check(v >= 1, "--max-features must be at least 1")?;
            forest.max_features = Some(v);
        }
        if let Some(v) = cfg.pick(flags.min_samples_leaf, "min-samples-leaf")? {
            check(v >= 1, "--min-samples-leaf must be at least 1")?;
            forest.min_samples_leaf = v;
        }
        forest.max_depth = cfg.pick(flags.max_depth, "max-depth")?;

        let out = flags.common.resolve_out(&cfg)?;
        let workers = flags.common.resolve_workers(&cfg)?;
        Ok((
            Self {
                source,
                percentile,
                validation_fraction,
                seed,
                params,
                forest,
                out,
                workers,
            },
            cfg,
        ))
    }

    pub fn seeds(&self) -> Seeds {
        Seeds::from_master(self.seed)
    }

    /// Config keys and values, in a form `ConfigFile::parse` reads back.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| kv.push((k.to_string(), v));
        match &self.source {
            Source::Csv { path, target } => {
                put("data", path.display().to_string());
                put("target", target.clone());
            }
            Source::Synth(s) => {
                put("synth", format!("{},{},{}", s.n_relevant, s.n_redundant, s.n_noise));
                put("n", s.n_samples.to_string());
            }
        }
        put("seed", self.seed.to_string());
        put("percentile", self.percentile.to_string());
        put("validation-fraction", self.validation_fraction.to_string());
        let p = &self.params;
        match p.lasso_lambda {
            LambdaChoice::Absolute(l) => put("lambda", l.to_string()),
            LambdaChoice::Relative(f) => put("lambda-fraction", f.to_string()),
        }
        put("ridge-lambda", p.ridge_lambda.to_string());
        put("pearson-z", p.pearson_z.to_string());
        put("pai-z", p.pai_z.to_string());
        put("pai-repeats", p.pai_repeats.to_string());
        put("bootstraps", p.fealect_bootstraps.to_string());
        put("bolasso-bootstraps", p.bolasso_bootstraps.to_string());
        put("bins", p.cfs.bins.to_string());
        put("plateau", p.cfs.plateau.to_string());
        put("rfe-inner-fraction", p.rfe_inner_fraction.to_string());
        put("rfe-min-subset", p.rfe_min_subset.to_string());
        put("trees", self.forest.n_trees.to_string());
        if let Some(m) = self.forest.max_features {
            put("max-features", m.to_string());
        }
        put("min-samples-leaf", self.forest.min_samples_leaf.to_string());
        if let Some(d) = self.forest.max_depth {
            put("max-depth", d.to_string());
        }
        kv
    }
}

/// Comma-separated method list.
pub fn parse_methods(text: &str) -> Result<Vec<Method>, CliError> {
    let methods: Vec<Method> = text
        .split(',')
        .map(|s| s.trim().parse::<Method>().map_err(|e| CliError::usage(e.to_string())))
        .collect::<Result<_, _>>()?;
    let mut seen = Vec::new();
    for m in &methods {
        if seen.contains(m) {
            return Err(CliError::usage(format!("method {m} listed twice")));
        }
        seen.push(*m);
    }
    Ok(methods)
}
