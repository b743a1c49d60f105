//! Wisconsin Diagnostic Breast Cancer data: loading, normalization, the
//! train/validation/test split, and exploratory summaries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::stats;

pub const FEATURES: usize = 30;

/// Attribute names in file order: ten measurements as mean, standard error,
/// and worst value.
pub const FEATURE_NAMES: [&str; FEATURES] = [
    "radius_mean", "texture_mean", "perimeter_mean", "area_mean", "smoothness_mean",
    "compactness_mean", "concavity_mean", "concave_points_mean", "symmetry_mean",
    "fractal_dimension_mean", "radius_se", "texture_se", "perimeter_se", "area_se",
    "smoothness_se", "compactness_se", "concavity_se", "concave_points_se", "symmetry_se",
    "fractal_dimension_se", "radius_worst", "texture_worst", "perimeter_worst", "area_worst",
    "smoothness_worst", "compactness_worst", "concavity_worst", "concave_points_worst",
    "symmetry_worst", "fractal_dimension_worst",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Malignant,
    Benign,
}

impl Label {
    /// Malignant → `[1, 0]`, Benign → `[0, 1]`.
    pub fn one_hot(self) -> [f64; 2] {
        match self {
            Label::Malignant => [1.0, 0.0],
            Label::Benign => [0.0, 1.0],
        }
    }

    /// Class index matching [`one_hot`](Self::one_hot).
    pub fn index(self) -> usize {
        match self {
            Label::Malignant => 0,
            Label::Benign => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Malignant => "malignant",
            Label::Benign => "benign",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<[f64; FEATURES]>,
    pub labels: Vec<Label>,
    pub ids: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per-feature statistics used to standardize.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStats {
    pub mean: [f64; FEATURES],
    pub std: [f64; FEATURES],
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|l| **l == label).count()
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.features.iter().map(|r| r[k]).collect()
    }
}

/// Parses the canonical comma-separated layout: id, `M`/`B`, 30 features.
pub fn parse_wdbc(text: &str, origin: &Path) -> Result<Dataset> {
    let mut ds = Dataset {
        features: Vec::new(),
        labels: Vec::new(),
        ids: Vec::new(),
    };
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != FEATURES + 2 {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected {} columns, got {}", FEATURES + 2, cols.len()),
            ));
        }
        let id = cols[0]
            .parse::<u64>()
            .map_err(|_| Error::parse(origin, lineno, format!("bad record id '{}'", cols[0])))?;
        let label = match cols[1] {
            "M" => Label::Malignant,
            "B" => Label::Benign,
            other => {
                return Err(Error::parse(origin, lineno, format!("unknown label '{other}'")));
            }
        };
        let mut row = [0.0; FEATURES];
        for (slot, tok) in row.iter_mut().zip(&cols[2..]) {
            *slot = tok
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(origin, lineno, format!("non-numeric feature '{tok}'")))?;
        }
        ds.features.push(row);
        ds.labels.push(label);
        ds.ids.push(id);
    }
    Ok(ds)
}

pub fn load_wdbc(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_wdbc(&text, path)
}

/// Means and population standard deviations over `train` rows only.
pub fn feature_stats(ds: &Dataset, train: &[usize]) -> Result<FeatureStats> {
    if train.is_empty() {
        return Err(Error::Domain("normalization needs at least one training row".into()));
    }
    let mut mean = [0.0; FEATURES];
    let mut std = [0.0; FEATURES];
    for k in 0..FEATURES {
        let col: Vec<f64> = train.iter().map(|&i| ds.features[i][k]).collect();
        mean[k] = stats::mean(&col);
        std[k] = stats::std_population(&col);
    }
    Ok(FeatureStats { mean, std })
}

/// Standardizes every row with statistics from `train` rows; zero-variance
/// features map to 0.
pub fn normalize(ds: &Dataset, train: &[usize]) -> Result<(Dataset, FeatureStats)> {
    let st = feature_stats(ds, train)?;
    let features = ds
        .features
        .iter()
        .map(|row| {
            let mut out = [0.0; FEATURES];
            for k in 0..FEATURES {
                out[k] = if st.std[k] > 0.0 {
                    (row[k] - st.mean[k]) / st.std[k]
                } else {
                    0.0
                };
            }
            out
        })
        .collect();
    Ok((
        Dataset {
            features,
            labels: ds.labels.clone(),
            ids: ds.ids.clone(),
        },
        st,
    ))
}

/// Seeded shuffle of `0..n`, then ⌊0.4n⌋ train, ⌊0.3n⌋ validation, rest test.
pub fn split(n: usize, seed: u64) -> Result<SplitIndices> {
    if n < 3 {
        return Err(Error::Domain(format!("need at least 3 records to split, got {n}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = n * 4 / 10;
    let n_val = n * 3 / 10;
    let test = idx.split_off(n_train + n_val);
    let val = idx.split_off(n_train);
    Ok(SplitIndices {
        train: idx,
        val,
        test,
    })
}

/// 30×30 Pearson correlation matrix of the raw features.
pub fn correlation_matrix(ds: &Dataset) -> Vec<[f64; FEATURES]> {
    let cols: Vec<Vec<f64>> = (0..FEATURES).map(|k| ds.column(k)).collect();
    let mut out = vec![[0.0; FEATURES]; FEATURES];
    for a in 0..FEATURES {
        out[a][a] = 1.0;
        for b in a + 1..FEATURES {
            let r = stats::pearson(&cols[a], &cols[b]);
            out[a][b] = r;
            out[b][a] = r;
        }
    }
    out
}

/// Writes `class_counts.txt` and `correlation.txt` into `dir`.
pub fn eda_export(ds: &Dataset, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut counts = String::new();
    for label in [Label::Malignant, Label::Benign] {
        writeln!(counts, "{} {}", label.name(), ds.count(label)).unwrap();
    }
    let path = dir.join("class_counts.txt");
    fs::write(&path, counts).map_err(|e| Error::io(&path, e))?;

    let mut corr = String::new();
    for row in correlation_matrix(ds) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(corr, "{}", line.join(" ")).unwrap();
    }
    let path = dir.join("correlation.txt");
    fs::write(&path, corr).map_err(|e| Error::io(&path, e))
}
