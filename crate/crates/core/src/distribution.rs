//! Object size distributions over tiles and the accuracy estimators built on
//! them: a tile's estimated accuracy is the dot product of its relative-size
//! histogram with a model's per-bin accuracy (eAP), and a plan's estimated
//! accuracy (PeAP) is the object-fraction-weighted sum of its tiles' eAPs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::BBox;
use crate::profile::{ModelProfile, SizeBinning, BIN_COUNT};

/// Intersection areas above this count as overlap between plan tiles.
const OVERLAP_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DistributionError {
    #[error("plan tiles {a} and {b} overlap (intersection area {area:.3e})")]
    OverlappingTiles { a: usize, b: usize, area: f64 },
    #[error("tile has non-positive area")]
    DegenerateTile,
}

/// One remembered object: its box in global coordinates and the bootstrap
/// frame it was first seen in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryObject {
    pub bbox: BBox,
    pub source_frame_id: u64,
}

/// Everything the camera has ever seen, in global-view coordinates. Captured
/// while the camera is at its identity pose, so boxes need no re-projection
/// at collection time; the runtime re-projects them into each frame's view.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectHistory {
    pub objects: Vec<HistoryObject>,
}

impl ObjectHistory {
    pub fn new(objects: Vec<HistoryObject>) -> Self {
        Self { objects }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// The bare boxes, in remembered order — the planner's knowledge input.
    pub fn boxes(&self) -> Vec<BBox> {
        self.objects.iter().map(|o| o.bbox).collect()
    }
}

/// Whether an object belongs to a tile: its center must lie in the tile.
/// Shared edges are half-open (left/top inclusive) so grid neighbors never
/// both claim a center, except that the frame's far edges (at 1.0) close the
/// interval so nothing on the boundary is orphaned.
pub fn tile_contains_center(tile: &BBox, center: (f64, f64)) -> bool {
    let (cx, cy) = center;
    let x_ok = cx >= tile.x_min && (cx < tile.x_max || (tile.x_max >= 1.0 && cx <= tile.x_max));
    let y_ok = cy >= tile.y_min && (cy < tile.y_max || (tile.y_max >= 1.0 && cy <= tile.y_max));
    x_ok && y_ok
}

/// Normalized relative-size histogram (φ) of a set of relative areas.
/// Sums to 1 for non-empty input; all zeros for empty input.
pub fn size_histogram<I: IntoIterator<Item = f64>>(
    rel_areas: I,
    binning: &SizeBinning,
) -> [f64; BIN_COUNT] {
    let mut counts = [0u64; BIN_COUNT];
    let mut total = 0u64;
    for r in rel_areas {
        counts[binning.bin_of(r)] += 1;
        total += 1;
    }
    let mut hist = [0.0; BIN_COUNT];
    if total > 0 {
        for (h, c) in hist.iter_mut().zip(counts) {
            *h = c as f64 / total as f64;
        }
    }
    hist
}

/// A tile's view of the local object distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileDistribution {
    /// φ: fraction of the tile's objects per relative-size bin.
    pub histogram: [f64; BIN_COUNT],
    /// Number of local objects whose center lies in the tile.
    pub member_count: usize,
    /// λ: the tile's members as a fraction of *all* local objects.
    pub weight: f64,
}

/// Builds the distribution of `objects` (local-frame boxes) as seen by `tile`.
/// Relative areas are taken against the tile's own (un-padded) area;
/// `total_objects` is the full local population that λ is normalized by.
pub fn tile_distribution(
    objects: &[BBox],
    tile: &BBox,
    total_objects: usize,
    binning: &SizeBinning,
) -> Result<TileDistribution, DistributionError> {
    let tile_area = tile.area();
    if tile_area <= 0.0 {
        return Err(DistributionError::DegenerateTile);
    }
    let members: Vec<f64> = objects
        .iter()
        .filter(|o| tile_contains_center(tile, o.center()))
        .map(|o| o.area() / tile_area)
        .collect();
    let member_count = members.len();
    let weight = if total_objects == 0 {
        0.0
    } else {
        member_count as f64 / total_objects as f64
    };
    Ok(TileDistribution {
        histogram: size_histogram(members, binning),
        member_count,
        weight,
    })
}

/// eAP: expected detection rate of one tile under one model — the dot product
/// of the tile's size histogram with the model's per-bin accuracy.
pub fn eap(histogram: &[f64; BIN_COUNT], accuracy: &[f64]) -> f64 {
    debug_assert_eq!(accuracy.len(), BIN_COUNT);
    histogram.iter().zip(accuracy).map(|(h, a)| h * a).sum()
}

/// Estimated accuracy of one tile under one profile.
pub fn estimated_accuracy(dist: &TileDistribution, profile: &ModelProfile) -> f64 {
    eap(&dist.histogram, &profile.accuracy)
}

/// PeAP: estimated accuracy of a whole plan — Σ over tiles of eAP·λ, where λ
/// weights each tile by its share of all local objects. Objects outside every
/// tile drag the estimate down through the λ denominator. Empty local
/// distributions score 0. Overlapping tiles are a domain error.
pub fn plan_estimated_accuracy(
    tiles: &[(BBox, &ModelProfile)],
    objects: &[BBox],
    binning: &SizeBinning,
) -> Result<f64, DistributionError> {
    for (i, (a, _)) in tiles.iter().enumerate() {
        for (jj, (b, _)) in tiles.iter().enumerate().skip(i + 1) {
            let inter = a.intersection_area(b);
            if inter > OVERLAP_EPS {
                return Err(DistributionError::OverlappingTiles { a: i, b: jj, area: inter });
            }
        }
    }
    if objects.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (region, profile) in tiles {
        let dist = tile_distribution(objects, region, objects.len(), binning)?;
        total += estimated_accuracy(&dist, profile) * dist.weight;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ModelProfile;
    use approx::assert_abs_diff_eq;

    fn flat_profile(acc: f64) -> ModelProfile {
        ModelProfile::new("m", 640, vec![acc; BIN_COUNT], 10.0, 12.0).unwrap()
    }

    fn centered_box(cx: f64, cy: f64, side: f64) -> BBox {
        BBox::new(cx - side / 2.0, cy - side / 2.0, cx + side / 2.0, cy + side / 2.0)
    }

    #[test]
    fn histogram_normalizes_or_zeroes() {
        let binning = SizeBinning::standard();
        let hist = size_histogram([0.21, 0.22, 0.95], &binning);
        assert_abs_diff_eq!(hist.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hist[12], 2.0 / 3.0, epsilon = 1e-12);
        let empty = size_histogram([], &binning);
        assert_eq!(empty.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn membership_is_half_open_with_closed_frame_edge() {
        let left = BBox::new(0.0, 0.0, 0.5, 1.0);
        let right = BBox::new(0.5, 0.0, 1.0, 1.0);
        // A center on the shared edge belongs to the right tile only.
        assert!(!tile_contains_center(&left, (0.5, 0.3)));
        assert!(tile_contains_center(&right, (0.5, 0.3)));
        // The frame's far edge keeps boundary centers.
        assert!(tile_contains_center(&right, (1.0, 1.0)));
    }

    #[test]
    fn tile_distribution_weighs_members_over_all_objects() {
        let binning = SizeBinning::standard();
        let objects = vec![
            centered_box(0.25, 0.25, 0.1),
            centered_box(0.26, 0.26, 0.1),
            centered_box(0.75, 0.75, 0.1),
        ];
        let tile = BBox::new(0.0, 0.0, 0.5, 0.5);
        let d = tile_distribution(&objects, &tile, objects.len(), &binning).unwrap();
        assert_eq!(d.member_count, 2);
        assert_abs_diff_eq!(d.weight, 2.0 / 3.0, epsilon = 1e-12);
        // 0.1² over a 0.25-area tile: relative area 0.04.
        assert_abs_diff_eq!(d.histogram[binning.bin_of(0.04)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn peap_weights_and_uncovered_objects() {
        let binning = SizeBinning::standard();
        let p = flat_profile(0.8);
        let objects = vec![
            centered_box(0.25, 0.25, 0.1),
            centered_box(0.75, 0.25, 0.1),
            centered_box(0.75, 0.75, 0.1),
        ];
        // One tile covering a single object out of three: PeAP = 0.8 · 1/3.
        let tiles = vec![(BBox::new(0.0, 0.0, 0.5, 0.5), &p)];
        let peap = plan_estimated_accuracy(&tiles, &objects, &binning).unwrap();
        assert_abs_diff_eq!(peap, 0.8 / 3.0, epsilon = 1e-12);
        // Full coverage with a flat profile recovers the flat accuracy.
        let full = vec![
            (BBox::new(0.0, 0.0, 0.5, 0.5), &p),
            (BBox::new(0.5, 0.0, 1.0, 0.5), &p),
            (BBox::new(0.0, 0.5, 0.5, 1.0), &p),
            (BBox::new(0.5, 0.5, 1.0, 1.0), &p),
        ];
        let peap = plan_estimated_accuracy(&full, &objects, &binning).unwrap();
        assert_abs_diff_eq!(peap, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn peap_rejects_overlap_and_handles_empty() {
        let binning = SizeBinning::standard();
        let p = flat_profile(0.5);
        let tiles = vec![
            (BBox::new(0.0, 0.0, 0.6, 0.6), &p),
            (BBox::new(0.5, 0.5, 1.0, 1.0), &p),
        ];
        let objects = vec![centered_box(0.3, 0.3, 0.1)];
        assert!(matches!(
            plan_estimated_accuracy(&tiles, &objects, &binning),
            Err(DistributionError::OverlappingTiles { .. })
        ));
        let disjoint = vec![(BBox::new(0.0, 0.0, 0.5, 0.5), &p)];
        assert_eq!(plan_estimated_accuracy(&disjoint, &[], &binning).unwrap(), 0.0);
    }
}
