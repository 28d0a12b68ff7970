use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Dataset, FeatureMatrix, TargetVector};
use crate::error::{Error, Result};
use crate::seed;

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub n_samples: usize,
    pub n_relevant: usize,
    pub n_redundant: usize,
    pub n_noise: usize,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// 5 relevant, 10 redundant and 19 noise columns: 34 features in all.
    pub fn hotspot_like(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            n_relevant: 5,
            n_redundant: 10,
            n_noise: 19,
            noise_sd: 0.1,
            seed,
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_relevant + self.n_redundant + self.n_noise
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Relevant,
    Redundant,
    Noise,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Relevant => "relevant",
            Role::Redundant => "redundant",
            Role::Noise => "noise",
        }
    }
}

/// Ground truth for one generated column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnRole {
    pub name: String,
    pub role: Role,
    /// Column index of the relevant parent, for redundant columns.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub dataset: Dataset,
    pub roles: Vec<ColumnRole>,
    /// Weight of each relevant column in the target.
    pub coefficients: Vec<f64>,
}

impl SyntheticDataset {
    pub fn indices_with(&self, role: Role) -> Vec<usize> {
        (0..self.roles.len())
            .filter(|&j| self.roles[j].role == role)
            .collect()
    }

    /// Rename the columns; `names` must have one unique entry per feature.
    pub fn renamed(mut self, names: &[&str]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let features = FeatureMatrix::new(self.dataset.features().matrix().clone(), names.clone())?;
        self.dataset = Dataset::new(features, self.dataset.target().clone())?;
        for (role, name) in self.roles.iter_mut().zip(names) {
            role.name = name;
        }
        Ok(self)
    }
}

/// Target weight of the `j`-th relevant column.
pub(crate) fn coefficient(j: usize) -> f64 {
    4.0 / (1.0 + 0.25 * j as f64)
}

/// Generate a dataset with known column roles.
///
/// Relevant columns are independent `U(0, 1)`; the continuous target is
/// `sum_j c_j x_j + noise_sd * e` with `c_j = 4 / (1 + j/4)`. A redundant
/// column is `a * parent + b + noise_sd * e` for a random relevant parent,
/// `|a|` in `[1, 2]` with random sign and `b` in `[-1, 1]`. Noise columns are
/// `U(0, 1)` independent of everything else. Each column family draws from
/// its own seed stream, so growing one family leaves the others unchanged.
pub fn synthesize(spec: &SynthSpec) -> Result<SyntheticDataset> {
    if spec.n_samples == 0 {
        return Err(Error::invalid("synthetic dataset needs at least one sample"));
    }
    if spec.n_relevant == 0 {
        return Err(Error::invalid("need at least one relevant column"));
    }
    if !(spec.noise_sd >= 0.0 && spec.noise_sd.is_finite()) {
        return Err(Error::invalid("noise_sd must be finite and non-negative"));
    }
    let n = spec.n_samples;
    let mut columns = Vec::with_capacity(spec.n_features());
    let mut roles = Vec::with_capacity(spec.n_features());

    for j in 0..spec.n_relevant {
        let mut rng = seed::rng(spec.seed, "synth-relevant", j as u64);
        columns.push((0..n).map(|_| rng.random::<f64>()).collect::<Vec<_>>());
        roles.push(ColumnRole {
            name: format!("relevant_{j}"),
            role: Role::Relevant,
            parent: None,
        });
    }
    for j in 0..spec.n_redundant {
        let mut rng = seed::rng(spec.seed, "synth-redundant", j as u64);
        let parent = rng.random_range(0..spec.n_relevant);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let a = sign * rng.random_range(1.0..2.0);
        let b = rng.random_range(-1.0..1.0);
        let col = columns[parent]
            .iter()
            .map(|&x: &f64| {
                let e: f64 = StandardNormal.sample(&mut rng);
                a * x + b + spec.noise_sd * e
            })
            .collect();
        columns.push(col);
        roles.push(ColumnRole {
            name: format!("redundant_{j}"),
            role: Role::Redundant,
            parent: Some(parent),
        });
    }
    for j in 0..spec.n_noise {
        let mut rng = seed::rng(spec.seed, "synth-noise", j as u64);
        columns.push((0..n).map(|_| rng.random::<f64>()).collect());
        roles.push(ColumnRole {
            name: format!("noise_{j}"),
            role: Role::Noise,
            parent: None,
        });
    }

    let coefficients: Vec<f64> = (0..spec.n_relevant).map(coefficient).collect();
    let mut rng = seed::rng(spec.seed, "synth-target", 0);
    let target: Vec<f64> = (0..n)
        .map(|i| {
            let signal: f64 = coefficients
                .iter()
                .zip(&columns)
                .map(|(c, col)| c * col[i])
                .sum();
            let e: f64 = StandardNormal.sample(&mut rng);
            signal + spec.noise_sd * e
        })
        .collect();

    let names = roles.iter().map(|r| r.name.clone()).collect();
    let features = FeatureMatrix::from_columns(&columns, names)?;
    let dataset = Dataset::new(features, TargetVector::continuous(target)?)?;
    Ok(SyntheticDataset {
        dataset,
        roles,
        coefficients,
    })
}

/// The 34 feature names of the grain-level stress-hotspot study, most
/// informative first, in ASCII spelling.
pub const HOTSPOT_FEATURE_NAMES: [&str; 34] = [
    "cos_phi",
    "Schmid_1",
    "EquivalentDiameters",
    "GBEuc",
    "Schmid_4",
    "Neighborhoods",
    "sin_theta",
    "TJEuc",
    "sin_phi",
    "AvgMisorientations",
    "NumNeighbors",
    "Schmid_3",
    "Min_mis",
    "AvgC_Axes_1",
    "Max_mis",
    "NumCells",
    "Schmid_2",
    "KernelAvg",
    "010_IPF_1",
    "phi",
    "001_IPF_0",
    "001_IPF_2",
    "010_IPF_0",
    "100_IPF_0",
    "001_IPF_1",
    "100_IPF_1",
    "QPEuc",
    "AvgC_Axes_0",
    "theta",
    "FeatureVolumes",
    "010_IPF_2",
    "AvgC_Axes_2",
    "100_IPF_2",
    "cos_theta",
];

/// Seed and size of the bundled demo file `data/demo_hotspots.csv`.
pub const DEMO_SEED: u64 = 2019;
pub const DEMO_SAMPLES: usize = 500;

/// The bundled demo dataset: the default generator layout under the hotspot
/// feature names, with a continuous `stress` target.
pub fn demo_dataset() -> Result<SyntheticDataset> {
    synthesize(&SynthSpec::hotspot_like(DEMO_SAMPLES, DEMO_SEED))?.renamed(&HOTSPOT_FEATURE_NAMES)
}

/// Sidecar listing each column's role: `column,role,parent`.
pub fn write_roles_csv<W: Write>(mut w: W, roles: &[ColumnRole]) -> Result<()> {
    let io = |source| Error::Io {
        path: "<roles output>".into(),
        source,
    };
    writeln!(w, "column,role,parent").map_err(io)?;
    for r in roles {
        let parent = r.parent.map(|p| roles[p].name.as_str()).unwrap_or("");
        writeln!(w, "{},{},{}", r.name, r.role.as_str(), parent).map_err(io)?;
    }
    Ok(())
}
