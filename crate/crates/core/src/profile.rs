//! Relative-size model profiles: the 22-bin accuracy histogram per detection
//! model plus its latency statistics, and the builders that measure both from
//! recorded detections.
//!
//! An object's *relative size* is its area divided by a reference area (the
//! tile it is inferred in, or the model input for whole-frame inference). The
//! fine bins below 20% follow 12-pixel steps of object side length on a
//! 1280-wide input; above 20% the bins widen, ending in a catch-all for
//! objects larger than the reference.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of relative-size bins in every profile.
pub const BIN_COUNT: usize = 22;

/// z-score of the 99th percentile of the standard normal.
pub const Z99: f64 = 2.326_347_874_040_840_8;

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("no latency samples recorded")]
    EmptyLatencySamples,
    #[error("latency p99 {p99} is below the mean {mean}")]
    PercentileBelowMean { mean: f64, p99: f64 },
    #[error("latency p99/mean ratio {0} too large for a log-normal fit")]
    UnfittableSpread(f64),
    #[error("latency statistics must be positive, got mean {mean}, p99 {p99}")]
    NonPositiveLatency { mean: f64, p99: f64 },
    #[error("accuracy vector has {0} bins, expected {BIN_COUNT}")]
    WrongBinCount(usize),
}

/// The shared relative-size binning: 22 half-open bins `[e_i, e_{i+1})` over
/// area ratios, the last one unbounded.
///
/// Serialized as the finite edges only (JSON cannot carry the terminal
/// infinity); deserialization re-appends it and revalidates the shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeBinning {
    edges: Vec<f64>,
}

impl Serialize for SizeBinning {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            edges: &'a [f64],
        }
        Repr { edges: &self.edges[..self.edges.len() - 1] }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SizeBinning {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            edges: Vec<f64>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.edges.len() != BIN_COUNT {
            return Err(serde::de::Error::custom(format!(
                "expected {BIN_COUNT} finite bin edges, got {}",
                repr.edges.len()
            )));
        }
        if !repr.edges.windows(2).all(|w| w[0] < w[1]) || repr.edges[0] != 0.0 {
            return Err(serde::de::Error::custom(
                "bin edges must start at 0 and strictly increase",
            ));
        }
        let mut edges = repr.edges;
        edges.push(f64::INFINITY);
        Ok(Self { edges })
    }
}

impl Default for SizeBinning {
    fn default() -> Self {
        Self::standard()
    }
}

impl SizeBinning {
    /// The standard scheme: 0, then (64+12k px)²/1280² for k = 0..=10, then
    /// 0.20, 0.25, 0.30, 0.40, ..., 0.90, 1.00, +inf.
    pub fn standard() -> Self {
        let mut edges = vec![0.0];
        for k in 0..=10u32 {
            let px = 64.0 + 12.0 * f64::from(k);
            edges.push((px / 1280.0).powi(2));
        }
        edges.extend([0.20, 0.25, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 1.00]);
        edges.push(f64::INFINITY);
        debug_assert_eq!(edges.len(), BIN_COUNT + 1);
        Self { edges }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn bin_count(&self) -> usize {
        BIN_COUNT
    }

    /// Bin index of a relative area: the `i` with `edges[i] ≤ r < edges[i+1]`.
    pub fn bin_of(&self, rel_area: f64) -> usize {
        assert!(
            rel_area.is_finite() && rel_area >= 0.0,
            "relative area must be finite and non-negative, got {rel_area}"
        );
        // partition_point returns the count of edges ≤ r among edges[1..=21];
        // that count is exactly the bin index.
        self.edges[1..=BIN_COUNT]
            .partition_point(|e| *e <= rel_area)
    }

    /// A representative relative area inside a bin (geometric mean of its
    /// edges; half the upper edge for bin 0, 1.3 for the unbounded last bin).
    pub fn representative(&self, bin: usize) -> f64 {
        assert!(bin < BIN_COUNT);
        if bin == 0 {
            self.edges[1] * 0.5
        } else if bin == BIN_COUNT - 1 {
            1.3
        } else {
            (self.edges[bin] * self.edges[bin + 1]).sqrt()
        }
    }
}

/// Ratio of an object's area to its reference area.
pub fn relative_area(object_area: f64, reference_area: f64) -> f64 {
    assert!(reference_area > 0.0, "reference area must be positive");
    object_area / reference_area
}

/// Nearest-rank percentile: the sample at rank `⌊pct/100 · n⌋ + 1` (1-based,
/// clamped to `n`) of the ascending order statistics. `None` for an empty set.
pub fn nearest_rank_percentile(samples: &[f64], pct: f64) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("latency samples must not be NaN"));
    let n = sorted.len();
    let rank = ((pct / 100.0 * n as f64).floor() as usize + 1).min(n);
    Some(sorted[rank - 1])
}

/// Nearest-rank 99th percentile.
pub fn p99(samples: &[f64]) -> Option<f64> {
    nearest_rank_percentile(samples, 99.0)
}

/// Fits a log-normal to a (mean, p99) pair: the smaller-σ root of
/// `σ²/2 − z₉₉·σ + ln(p99/mean) = 0`, with `μ = ln(mean) − σ²/2`.
/// A p99 equal to the mean degenerates to σ = 0 (deterministic latency).
pub fn fit_lognormal(mean_ms: f64, p99_ms: f64) -> Result<(f64, f64), ProfileError> {
    if !(mean_ms > 0.0 && p99_ms > 0.0) {
        return Err(ProfileError::NonPositiveLatency { mean: mean_ms, p99: p99_ms });
    }
    if p99_ms < mean_ms {
        return Err(ProfileError::PercentileBelowMean { mean: mean_ms, p99: p99_ms });
    }
    let ratio = (p99_ms / mean_ms).ln();
    let disc = Z99 * Z99 - 2.0 * ratio;
    if disc < 0.0 {
        return Err(ProfileError::UnfittableSpread(p99_ms / mean_ms));
    }
    let sigma = Z99 - disc.sqrt();
    let mu = mean_ms.ln() - 0.5 * sigma * sigma;
    Ok((mu, sigma))
}

/// Latency estimate flavor used for planning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Budget with p99 latencies: strict per-frame SLO compliance.
    Conservative,
    /// Budget with mean latencies: average-case compliance.
    NonConservative,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Conservative => "conservative",
            Mode::NonConservative => "non_conservative",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conservative" => Ok(Mode::Conservative),
            "non_conservative" | "non-conservative" => Ok(Mode::NonConservative),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

/// One detection model's measured behavior: per-bin accuracy over relative
/// sizes plus latency statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelProfile {
    pub name: String,
    pub input_side_px: u32,
    /// Detection probability per relative-size bin, each in `[0,1]`.
    pub accuracy: Vec<f64>,
    pub latency_mean_ms: f64,
    pub latency_p99_ms: f64,
}

impl ModelProfile {
    pub fn new(
        name: impl Into<String>,
        input_side_px: u32,
        accuracy: Vec<f64>,
        latency_mean_ms: f64,
        latency_p99_ms: f64,
    ) -> Result<Self, ProfileError> {
        if accuracy.len() != BIN_COUNT {
            return Err(ProfileError::WrongBinCount(accuracy.len()));
        }
        // Validate that the pair is log-normal-fittable up front.
        fit_lognormal(latency_mean_ms, latency_p99_ms)?;
        Ok(Self { name: name.into(), input_side_px, accuracy, latency_mean_ms, latency_p99_ms })
    }

    /// Latency estimate for the given planning mode.
    pub fn latency_ms(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Conservative => self.latency_p99_ms,
            Mode::NonConservative => self.latency_mean_ms,
        }
    }

    /// (μ, σ) of the fitted log-normal latency distribution.
    pub fn lognormal_params(&self) -> (f64, f64) {
        fit_lognormal(self.latency_mean_ms, self.latency_p99_ms)
            .expect("validated at construction")
    }

    pub fn mean_accuracy(&self) -> f64 {
        self.accuracy.iter().sum::<f64>() / self.accuracy.len() as f64
    }
}

/// An ordered set of model profiles sharing one binning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFamily {
    pub models: Vec<ModelProfile>,
}

impl ModelFamily {
    pub fn new(models: Vec<ModelProfile>) -> Self {
        Self { models }
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&ModelProfile> {
        self.models.iter().find(|m| m.name == name)
    }

    /// Index of the model with the lowest single-inference latency under
    /// `mode` — the cheapest whole-frame (down-sampling) choice.
    pub fn cheapest(&self, mode: Mode) -> Option<usize> {
        (0..self.models.len()).min_by(|&a, &b| {
            self.models[a]
                .latency_ms(mode)
                .partial_cmp(&self.models[b].latency_ms(mode))
                .expect("latencies are finite")
        })
    }

    /// Index of the model with the highest mean per-bin accuracy.
    pub fn most_accurate(&self) -> Option<usize> {
        (0..self.models.len()).max_by(|&a, &b| {
            self.models[a]
                .mean_accuracy()
                .partial_cmp(&self.models[b].mean_accuracy())
                .expect("accuracies are finite")
        })
    }
}

/// One profiled inference outcome: the object's relative area in the inferred
/// region and whether the model detected it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub rel_area: f64,
    pub detected: bool,
}

/// Builds a measured profile from detection records and latency samples.
/// Bins with no recorded objects get accuracy 0 (nothing is known to be
/// detectable there). Latency statistics are the sample mean and nearest-rank
/// p99; at least one latency sample is required.
pub fn build_profile(
    name: impl Into<String>,
    input_side_px: u32,
    records: &[DetectionRecord],
    latency_samples_ms: &[f64],
    binning: &SizeBinning,
) -> Result<ModelProfile, ProfileError> {
    let mut hits = [0u64; BIN_COUNT];
    let mut totals = [0u64; BIN_COUNT];
    for r in records {
        let b = binning.bin_of(r.rel_area);
        totals[b] += 1;
        if r.detected {
            hits[b] += 1;
        }
    }
    let accuracy = (0..BIN_COUNT)
        .map(|b| if totals[b] == 0 { 0.0 } else { hits[b] as f64 / totals[b] as f64 })
        .collect();

    if latency_samples_ms.is_empty() {
        return Err(ProfileError::EmptyLatencySamples);
    }
    let mean = latency_samples_ms.iter().sum::<f64>() / latency_samples_ms.len() as f64;
    let p99 = p99(latency_samples_ms).expect("non-empty");
    // Guard against tiny-sample artifacts where the empirical p99 dips below
    // the mean; clamp up so the log-normal fit stays valid.
    let p99 = p99.max(mean);
    ModelProfile::new(name, input_side_px, accuracy, mean, p99)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn binning_round_trips_through_json_despite_unbounded_edge() {
        let b = SizeBinning::standard();
        let json = serde_json::to_string(&b).unwrap();
        assert!(!json.contains("null"), "no lossy infinities: {json}");
        let back: SizeBinning = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
        assert!(back.edges()[BIN_COUNT].is_infinite());
        // Truncated or unsorted edge lists are rejected.
        assert!(serde_json::from_str::<SizeBinning>("{\"edges\":[0.0,0.5]}").is_err());
    }

    #[test]
    fn standard_binning_has_22_bins() {
        let b = SizeBinning::standard();
        assert_eq!(b.edges().len(), BIN_COUNT + 1);
        assert_eq!(b.edges()[0], 0.0);
        assert_abs_diff_eq!(b.edges()[1], (64.0f64 / 1280.0).powi(2), epsilon = 1e-15);
        assert_abs_diff_eq!(b.edges()[11], (184.0f64 / 1280.0).powi(2), epsilon = 1e-15);
        assert_eq!(b.edges()[12], 0.20);
        assert_eq!(b.edges()[21], 1.00);
        assert!(b.edges()[22].is_infinite());
    }

    #[test]
    fn bin_of_is_half_open_on_edges() {
        let b = SizeBinning::standard();
        assert_eq!(b.bin_of(0.0), 0);
        let e1 = b.edges()[1];
        assert_eq!(b.bin_of(e1 - 1e-12), 0);
        assert_eq!(b.bin_of(e1), 1);
        assert_eq!(b.bin_of(0.20), 12);
        assert_eq!(b.bin_of(0.25 - 1e-12), 12);
        assert_eq!(b.bin_of(1.0), BIN_COUNT - 1);
        assert_eq!(b.bin_of(137.5), BIN_COUNT - 1);
    }

    #[test]
    fn reference_ratios_land_in_expected_bins() {
        let b = SizeBinning::standard();
        // A 600px-wide object on a 1280px reference: between 20% and 25%.
        let r = relative_area(600.0 * 600.0, 1280.0 * 1280.0);
        assert_abs_diff_eq!(r, 0.2197, epsilon = 1e-4);
        assert_eq!(b.bin_of(r), 12);
        // The same object on a 512px reference: larger than the reference.
        let r = relative_area(600.0 * 600.0, 512.0 * 512.0);
        assert!(r > 1.0);
        assert_eq!(b.bin_of(r), BIN_COUNT - 1);
    }

    #[test]
    fn nearest_rank_percentile_pins_the_convention() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(p99(&v), Some(100.0));
        assert_eq!(p99(&[10.0, 10.0, 10.0, 10.0]), Some(10.0));
        assert_eq!(nearest_rank_percentile(&[5.0, 9.0, 7.0], 50.0), Some(7.0));
        assert_eq!(p99(&[]), None);
    }

    #[test]
    fn lognormal_fit_matches_both_moments() {
        let (mu, sigma) = fit_lognormal(80.0, 110.0).unwrap();
        assert_abs_diff_eq!((mu + 0.5 * sigma * sigma).exp(), 80.0, epsilon = 1e-9);
        assert_abs_diff_eq!((mu + Z99 * sigma).exp(), 110.0, epsilon = 1e-9);
        // Degenerate: p99 equals the mean → deterministic.
        let (mu, sigma) = fit_lognormal(50.0, 50.0).unwrap();
        assert_eq!(sigma, 0.0);
        assert_abs_diff_eq!(mu.exp(), 50.0, epsilon = 1e-12);
        assert!(fit_lognormal(50.0, 40.0).is_err());
        assert!(fit_lognormal(0.0, 10.0).is_err());
    }

    #[test]
    fn build_profile_counts_per_bin() {
        let binning = SizeBinning::standard();
        let records = vec![
            DetectionRecord { rel_area: 0.21, detected: true },
            DetectionRecord { rel_area: 0.22, detected: true },
            DetectionRecord { rel_area: 0.23, detected: false },
            DetectionRecord { rel_area: 0.24, detected: true },
            DetectionRecord { rel_area: 2.0, detected: false },
        ];
        let p = build_profile("m", 640, &records, &[10.0, 12.0, 11.0], &binning).unwrap();
        assert_abs_diff_eq!(p.accuracy[12], 0.75, epsilon = 1e-12);
        assert_eq!(p.accuracy[BIN_COUNT - 1], 0.0);
        assert_eq!(p.accuracy[0], 0.0); // empty bin
        assert_abs_diff_eq!(p.latency_mean_ms, 11.0, epsilon = 1e-12);
        assert_eq!(p.latency_p99_ms, 12.0);
        assert!(build_profile("m", 640, &records, &[], &binning).is_err());
    }

    #[test]
    fn family_lookups() {
        let binning = SizeBinning::standard();
        let mk = |name: &str, acc: f64, lat: f64| {
            ModelProfile::new(name, 640, vec![acc; BIN_COUNT], lat, lat * 1.3).unwrap()
        };
        let fam = ModelFamily::new(vec![mk("a", 0.5, 20.0), mk("b", 0.8, 40.0), mk("c", 0.3, 10.0)]);
        assert_eq!(fam.cheapest(Mode::Conservative), Some(2));
        assert_eq!(fam.most_accurate(), Some(1));
        assert!(fam.get("b").is_some());
        assert!(fam.get("zz").is_none());
        let _ = binning;
    }
}
