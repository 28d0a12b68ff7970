use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use featsel::dataset::{
    label_hotspots, load_csv, minmax_scale, split, synthesize, write_csv, write_roles_csv, Dataset, SynthSpec,
    TargetKind,
};
use featsel::eval::{
    emit_report, run_benchmark_partial, select_features, BenchmarkReport, Method, MethodDetail, ReportFormat,
};
use featsel::fealect::write_scores_csv;

use crate::config::{parse_methods, validate_synth, CommonFlags, RunConfig, RunFlags, Seeds, Source};
use crate::error::CliError;

/// Name of the target column in generated CSV files.
pub const SYNTH_TARGET: &str = "stress";

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Output {
            path: path.to_path_buf(),
            source,
        })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Output {
        path: dir.to_path_buf(),
        source,
    })
}

/// `run.manifest`: the config echo (readable back through `--config`) plus
/// bookkeeping under `run.`.
pub struct Manifest {
    lines: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self { lines: Vec::new() };
        m.meta("version", env!("CARGO_PKG_VERSION"));
        m.meta("command", command);
        m
    }

    pub fn config(&mut self, kv: Vec<(String, String)>) {
        self.lines.extend(kv);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.lines.push((format!("run.{key}"), value.to_string()));
    }

    fn seeds(&mut self, s: Seeds) {
        self.meta("seed.split", s.split);
        self.meta("seed.forest", s.forest);
        self.meta("seed.methods", s.methods);
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let mut s = String::from("# featsel run manifest; usable as --config\n");
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        write_text(&dir.join("run.manifest"), &s)
    }
}

/// Load or generate, label hotspots, min-max scale.
pub struct Prepared {
    pub data: Dataset,
    pub threshold: Option<f64>,
}

pub fn prepare(rc: &RunConfig) -> Result<Prepared, CliError> {
    let raw = match &rc.source {
        Source::Csv { path, target } => load_csv(path, target)?,
        Source::Synth(spec) => synthesize(spec)?.dataset,
    };
    let (labeled, threshold) = if raw.target().kind() == TargetKind::Binary {
        (raw, None)
    } else {
        let h = label_hotspots(raw.target(), rc.percentile)?;
        (raw.with_target(h.target)?, Some(h.threshold))
    };
    labeled.target().require_both_labels()?;
    Ok(Prepared {
        data: minmax_scale(&labeled)?,
        threshold,
    })
}

fn describe_data(m: &mut Manifest, p: &Prepared) {
    m.meta("dataset.fingerprint", p.data.fingerprint());
    m.meta("dataset.samples", p.data.n_samples());
    m.meta("dataset.features", p.data.n_features());
    m.meta("dataset.positives", p.data.target().positives());
    match p.threshold {
        Some(t) => m.meta("hotspot.threshold", t),
        None => m.meta("hotspot.threshold", "none (target already binary)"),
    }
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::usage(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct RankArgs {
    /// One of pearson, cfs, lasso, ridge, ols, rf-pai, rfe, fealect, bolasso.
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub run: RunFlags,
}

pub fn rank(args: &RankArgs) -> Result<Vec<PathBuf>, CliError> {
    let (rc, cfg) = RunConfig::resolve(&args.run)?;
    let method: Method = cfg
        .pick(args.method.clone(), "method")?
        .ok_or_else(|| CliError::usage(format!("--method is required; one of: {}", Method::names().join(", "))))?
        .parse()
        .map_err(|e: featsel::Error| CliError::usage(e.to_string()))?;
    ensure_dir(&rc.out)?;
    let prepared = prepare(&rc)?;
    let out = in_pool(rc.workers, || select_features(method, &prepared.data, &rc.forest, &rc.params))??;

    let mut written = Vec::new();
    let main = rc.out.join(format!("{}_ranking.csv", method.as_str()));
    out.ranking.write_csv(create(&main)?)?;
    written.push(main);
    let detail = |name: &str| rc.out.join(format!("{}_{name}.csv", method.as_str()));
    match &out.detail {
        MethodDetail::RfPai(imp) => {
            let p = detail("importance");
            imp.write_csv(create(&p)?)?;
            written.push(p);
        }
        MethodDetail::Rfe(r) => {
            let p = detail("steps");
            r.write_csv(create(&p)?)?;
            written.push(p);
        }
        MethodDetail::FeaLect(s, c) => {
            let p = detail("scores");
            write_scores_csv(create(&p)?, s, c)?;
            written.push(p);
        }
        MethodDetail::Bolasso(b) => {
            let p = detail("frequency");
            let mut s = String::from("feature,frequency\n");
            for (name, f) in prepared.data.names().iter().zip(&b.frequency) {
                let _ = writeln!(s, "{name},{f}");
            }
            write_text(&p, &s)?;
            written.push(p);
        }
        MethodDetail::Cfs(c) => {
            let p = detail("trace");
            let mut s = String::from("order,subset,merit\n");
            for (k, (subset, merit)) in c.trace.visited.iter().enumerate() {
                let names: Vec<&str> = subset.iter().map(|&j| prepared.data.features().name(j)).collect();
                let _ = writeln!(s, "{k},{},{merit}", names.join(" "));
            }
            write_text(&p, &s)?;
            written.push(p);
        }
        MethodDetail::Pearson | MethodDetail::Lasso(_) | MethodDetail::Ridge(_) | MethodDetail::Ols(_) => {}
    }

    let mut m = Manifest::new("rank");
    m.config(rc.echo());
    m.config(vec![("method".into(), method.as_str().into())]);
    m.seeds(rc.seeds());
    describe_data(&mut m, &prepared);
    m.meta("selected", out.ranking.selected_names().join(" "));
    m.write(&rc.out)?;
    Ok(written)
}

#[derive(Debug, clap::Args)]
pub struct BenchmarkArgs {
    /// Comma-separated methods (default: the six benchmark methods).
    #[arg(long)]
    pub methods: Option<String>,
    #[command(flatten)]
    pub run: RunFlags,
}

pub fn benchmark(args: &BenchmarkArgs) -> Result<BenchmarkReport, CliError> {
    let (rc, cfg) = RunConfig::resolve(&args.run)?;
    let methods = match cfg.pick(args.methods.clone(), "methods")? {
        Some(text) => parse_methods(&text)?,
        None => Method::SIX.to_vec(),
    };
    ensure_dir(&rc.out)?;
    let prepared = prepare(&rc)?;
    let seeds = rc.seeds();
    let sp = split(&prepared.data, rc.validation_fraction, seeds.split)?;

    let mut m = Manifest::new("benchmark");
    m.config(rc.echo());
    let names: Vec<&str> = methods.iter().map(|m| m.as_str()).collect();
    m.config(vec![("methods".into(), names.join(","))]);
    m.seeds(seeds);
    describe_data(&mut m, &prepared);
    m.meta("split.train", sp.train.len());
    m.meta("split.validation", sp.validation.len());

    let result = in_pool(rc.workers, || {
        run_benchmark_partial(&prepared.data, &sp, &methods, &rc.forest, &rc.params)
    })?;
    let (report, failure) = match result {
        Ok(r) => (Some(r), None),
        Err(f) => {
            let what = f.method.map_or("baseline".to_string(), |m| m.as_str().to_string());
            m.meta("status", format!("failed at {what}: {}", f.error));
            (f.completed, Some(f.error))
        }
    };
    if let Some(r) = &report {
        write_text(&rc.out.join("report.csv"), &emit_report(r, ReportFormat::Csv))?;
        write_text(&rc.out.join("report.md"), &emit_report(r, ReportFormat::Markdown))?;
    }
    if failure.is_none() {
        m.meta("status", "ok");
    }
    m.write(&rc.out)?;
    match (failure, report) {
        (Some(e), _) => Err(e.into()),
        (None, Some(r)) => Ok(r),
        (None, None) => unreachable!("a successful benchmark always has a report"),
    }
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub relevant: Option<usize>,
    #[arg(long)]
    pub redundant: Option<usize>,
    #[arg(long)]
    pub noise: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Standard deviation of the target and redundant-column noise.
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[command(flatten)]
    pub common: CommonFlags,
}

pub fn synth(args: &SynthArgs) -> Result<Vec<PathBuf>, CliError> {
    let cfg = args.common.config_file()?;
    let seed = cfg.pick(args.seed, "seed")?.unwrap_or(0);
    let n = cfg.pick(args.n, "n")?.unwrap_or(5000);
    let base = SynthSpec::hotspot_like(n, seed);
    let spec = SynthSpec {
        n_relevant: cfg.pick(args.relevant, "relevant")?.unwrap_or(base.n_relevant),
        n_redundant: cfg.pick(args.redundant, "redundant")?.unwrap_or(base.n_redundant),
        n_noise: cfg.pick(args.noise, "noise")?.unwrap_or(base.n_noise),
        noise_sd: cfg.pick(args.noise_sd, "noise-sd")?.unwrap_or(base.noise_sd),
        ..base
    };
    validate_synth(&spec)?;
    let out = args.common.resolve_out(&cfg)?;
    let workers = args.common.resolve_workers(&cfg)?;
    ensure_dir(&out)?;
    let s = in_pool(workers, || synthesize(&spec))??;

    let data = out.join("synthetic.csv");
    let roles = out.join("roles.csv");
    write_csv(create(&data)?, &s.dataset, SYNTH_TARGET)?;
    write_roles_csv(create(&roles)?, &s.roles)?;

    let mut m = Manifest::new("synth");
    m.config(vec![
        ("relevant".into(), spec.n_relevant.to_string()),
        ("redundant".into(), spec.n_redundant.to_string()),
        ("noise".into(), spec.n_noise.to_string()),
        ("n".into(), spec.n_samples.to_string()),
        ("seed".into(), spec.seed.to_string()),
        ("noise-sd".into(), spec.noise_sd.to_string()),
    ]);
    let coefs: Vec<String> = s.coefficients.iter().map(f64::to_string).collect();
    m.meta("coefficients", coefs.join(" "));
    m.meta("dataset.fingerprint", s.dataset.fingerprint());
    m.write(&out)?;
    Ok(vec![data, roles])
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// A report.csv written by `benchmark`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// markdown or csv.
    #[arg(long)]
    pub format: Option<String>,
    #[command(flatten)]
    pub common: CommonFlags,
}

pub fn report(args: &ReportArgs) -> Result<PathBuf, CliError> {
    let cfg = args.common.config_file()?;
    let input: PathBuf = cfg
        .pick(args.input.clone(), "input")?
        .ok_or_else(|| CliError::usage("--input REPORT.csv is required"))?;
    let format = match cfg.pick(args.format.clone(), "format")?.as_deref().unwrap_or("markdown") {
        "markdown" | "md" => ReportFormat::Markdown,
        "csv" => ReportFormat::Csv,
        other => return Err(CliError::usage(format!("unknown format {other:?}; use markdown or csv"))),
    };
    let out = args.common.resolve_out(&cfg)?;
    ensure_dir(&out)?;
    let text = fs::read_to_string(&input).map_err(|source| featsel::Error::Io {
        path: input.clone(),
        source,
    })?;
    let r = BenchmarkReport::from_csv(&text)?;
    let path = out.join(match format {
        ReportFormat::Markdown => "report.md",
        ReportFormat::Csv => "report.csv",
    });
    write_text(&path, &emit_report(&r, format))?;

    let mut m = Manifest::new("report");
    m.config(vec![
        ("input".into(), input.display().to_string()),
        ("format".into(), if format == ReportFormat::Csv { "csv" } else { "markdown" }.into()),
    ]);
    m.write(&out)?;
    Ok(path)
}
