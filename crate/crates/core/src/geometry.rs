//! Pinhole camera geometry for a steerable pan/tilt/zoom view over a planar scene.
//!
//! The scene is the unit square `[0,1]²` as seen by a reference camera at the
//! identity pose (pan 0, tilt 0, zoom 1). Steering the camera yields a *local*
//! frame, also normalized to `[0,1]²`; this module converts points and
//! axis-aligned boxes between the global plane and the local frame.
//!
//! Conventions: the camera sits at the origin looking along +z; x grows to the
//! right and y grows downward (image convention). Pan rotates about the
//! vertical (y) axis, tilt about the horizontal (x) axis, and the combined
//! orientation is `R = R_tilt · R_pan`. Zoom scales the focal length.

use serde::{Deserialize, Serialize};

/// Maximum tilt magnitude in radians (±80°).
pub const MAX_TILT_RAD: f64 = 80.0 * std::f64::consts::PI / 180.0;
/// Zoom ratio lower bound (no wide-angle below the reference view).
pub const MIN_ZOOM: f64 = 1.0;
/// Zoom ratio upper bound.
pub const MAX_ZOOM: f64 = 32.0;

const TAU: f64 = std::f64::consts::TAU;
/// Rays with a forward component at or below this are treated as behind the camera.
const FORWARD_EPS: f64 = 1e-12;

/// Axis-aligned box in normalized coordinates, `x_min ≤ x_max`, `y_min ≤ y_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        debug_assert!(x_min <= x_max && y_min <= y_max, "degenerate box corners");
        Self { x_min, y_min, x_max, y_max }
    }

    /// The full frame / global plane.
    pub fn unit() -> Self {
        Self::new(0.0, 0.0, 1.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.x_min, self.y_min),
            (self.x_max, self.y_min),
            (self.x_min, self.y_max),
            (self.x_max, self.y_max),
        ]
    }

    /// Area of the intersection with `other` (0 when disjoint).
    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let w = (self.x_max.min(other.x_max) - self.x_min.max(other.x_min)).max(0.0);
        let h = (self.y_max.min(other.y_max) - self.y_min.max(other.y_min)).max(0.0);
        w * h
    }

    /// Intersection-over-union; 0 when the union is empty.
    pub fn iou(&self, other: &BBox) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    /// Clips to `bounds`; `None` when nothing remains.
    pub fn clip(&self, bounds: &BBox) -> Option<BBox> {
        let x_min = self.x_min.max(bounds.x_min);
        let y_min = self.y_min.max(bounds.y_min);
        let x_max = self.x_max.min(bounds.x_max);
        let y_max = self.y_max.min(bounds.y_max);
        if x_min < x_max && y_min < y_max {
            Some(BBox::new(x_min, y_min, x_max, y_max))
        } else {
            None
        }
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    /// Smallest axis-aligned box covering all `points`.
    pub fn hull_of(points: &[(f64, f64)]) -> BBox {
        debug_assert!(!points.is_empty());
        let mut x_min = f64::INFINITY;
        let mut y_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for &(x, y) in points {
            x_min = x_min.min(x);
            y_min = y_min.min(y);
            x_max = x_max.max(x);
            y_max = y_max.max(y);
        }
        BBox { x_min, y_min, x_max, y_max }
    }
}

/// Accumulated camera pose. `pan_rad` wraps modulo 2π, `tilt_rad` is clamped to
/// ±80°, and `zoom` is a focal multiplier clamped to `[1, 32]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub pan_rad: f64,
    pub tilt_rad: f64,
    pub zoom: f64,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self { pan_rad: 0.0, tilt_rad: 0.0, zoom: 1.0 }
    }

    /// Applies one frame's actuation: pan and tilt are additive (pan wraps,
    /// tilt clamps) and zoom is multiplicative (clamped).
    pub fn apply(&self, delta: &PoseDelta) -> Pose {
        Pose {
            pan_rad: (self.pan_rad + delta.pan_rad).rem_euclid(TAU),
            tilt_rad: (self.tilt_rad + delta.tilt_rad).clamp(-MAX_TILT_RAD, MAX_TILT_RAD),
            zoom: (self.zoom * delta.zoom_factor).clamp(MIN_ZOOM, MAX_ZOOM),
        }
    }
}

/// Per-frame pose change. `zoom_factor` multiplies the accumulated zoom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseDelta {
    pub pan_rad: f64,
    pub tilt_rad: f64,
    pub zoom_factor: f64,
}

impl PoseDelta {
    pub fn none() -> Self {
        Self { pan_rad: 0.0, tilt_rad: 0.0, zoom_factor: 1.0 }
    }
}

/// Reference-camera optics: horizontal field of view at zoom 1 plus the frame
/// aspect ratio. Defaults to a 90° horizontal FOV at 16:9.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub base_hfov_rad: f64,
    pub aspect_w: f64,
    pub aspect_h: f64,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        Self { base_hfov_rad: std::f64::consts::FRAC_PI_2, aspect_w: 16.0, aspect_h: 9.0 }
    }
}

impl CameraIntrinsics {
    /// Half-extent of the image plane at distance 1, horizontally.
    fn half_w(&self) -> f64 {
        (self.base_hfov_rad * 0.5).tan()
    }

    /// Half-extent vertically; the vertical FOV follows from the aspect ratio
    /// via `tan(vfov/2) = tan(hfov/2) · aspect_h / aspect_w`.
    fn half_h(&self) -> f64 {
        self.half_w() * self.aspect_h / self.aspect_w
    }
}

/// Mapping between the global plane and the local frame for one pose.
#[derive(Debug, Clone)]
pub struct ViewTransform {
    /// Camera orientation: maps camera-frame directions to world-frame.
    rot: [[f64; 3]; 3],
    zoom: f64,
    half_w: f64,
    half_h: f64,
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn mat_apply(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn transpose(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, &cell) in row.iter().enumerate() {
            out[j][i] = cell;
        }
    }
    out
}

impl ViewTransform {
    pub fn new(pose: &Pose, intrinsics: &CameraIntrinsics) -> Self {
        let (sp, cp) = pose.pan_rad.sin_cos();
        let (st, ct) = pose.tilt_rad.sin_cos();
        // Pan about the vertical (y) axis, tilt about the horizontal (x) axis.
        let r_pan = [[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]];
        let r_tilt = [[1.0, 0.0, 0.0], [0.0, ct, -st], [0.0, st, ct]];
        Self {
            rot: mat_mul(&r_tilt, &r_pan),
            zoom: pose.zoom,
            half_w: intrinsics.half_w(),
            half_h: intrinsics.half_h(),
        }
    }

    /// Global plane point → local frame point. `None` if the point falls
    /// behind the camera.
    pub fn project_point(&self, point: (f64, f64)) -> Option<(f64, f64)> {
        let world = [
            (point.0 - 0.5) * 2.0 * self.half_w,
            (point.1 - 0.5) * 2.0 * self.half_h,
            1.0,
        ];
        let d = mat_apply(&transpose(&self.rot), world);
        if d[2] <= FORWARD_EPS {
            return None;
        }
        Some((
            0.5 + self.zoom * (d[0] / d[2]) / (2.0 * self.half_w),
            0.5 + self.zoom * (d[1] / d[2]) / (2.0 * self.half_h),
        ))
    }

    /// Local frame point → global plane point (the inverse of
    /// [`project_point`](Self::project_point)). `None` if the viewing ray
    /// never reaches the scene plane.
    pub fn back_project_point(&self, point: (f64, f64)) -> Option<(f64, f64)> {
        let d_cam = [
            (point.0 - 0.5) * 2.0 * self.half_w / self.zoom,
            (point.1 - 0.5) * 2.0 * self.half_h / self.zoom,
            1.0,
        ];
        let w = mat_apply(&self.rot, d_cam);
        if w[2] <= FORWARD_EPS {
            return None;
        }
        Some((
            0.5 + (w[0] / w[2]) / (2.0 * self.half_w),
            0.5 + (w[1] / w[2]) / (2.0 * self.half_h),
        ))
    }

    /// Re-projects a global box into the local frame as the axis-aligned hull
    /// of its projected corners. `None` if any corner falls behind the camera.
    pub fn reproject_box(&self, b: &BBox) -> Option<BBox> {
        let mut pts = [(0.0, 0.0); 4];
        for (slot, corner) in pts.iter_mut().zip(b.corners()) {
            *slot = self.project_point(corner)?;
        }
        Some(BBox::hull_of(&pts))
    }

    /// Local box → global plane, hull of back-projected corners.
    pub fn back_project_box(&self, b: &BBox) -> Option<BBox> {
        let mut pts = [(0.0, 0.0); 4];
        for (slot, corner) in pts.iter_mut().zip(b.corners()) {
            *slot = self.back_project_point(corner)?;
        }
        Some(BBox::hull_of(&pts))
    }
}

/// Fraction of a local-frame box that lies inside the visible frame `[0,1]²`.
/// Zero-area boxes count as invisible.
pub fn visible_fraction(local_box: &BBox) -> f64 {
    let area = local_box.area();
    if area <= 1e-15 {
        return 0.0;
    }
    local_box.intersection_area(&BBox::unit()) / area
}

/// A global box carried into the local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedBox {
    /// Index of the source box in the global list.
    pub source_index: usize,
    /// Re-projected box clipped to the visible frame.
    pub bbox: BBox,
    /// Visible fraction before clipping.
    pub visible_fraction: f64,
}

/// Re-projects every global box into the local frame of `pose`, drops boxes
/// behind the camera or with less than `min_visible_fraction` of their area in
/// view, and clips the survivors to the frame.
pub fn localize(
    global: &[BBox],
    pose: &Pose,
    intrinsics: &CameraIntrinsics,
    min_visible_fraction: f64,
) -> Vec<LocalizedBox> {
    let view = ViewTransform::new(pose, intrinsics);
    let mut out = Vec::new();
    for (i, b) in global.iter().enumerate() {
        let Some(local) = view.reproject_box(b) else { continue };
        let vf = visible_fraction(&local);
        if vf < min_visible_fraction {
            continue;
        }
        let Some(clipped) = local.clip(&BBox::unit()) else { continue };
        out.push(LocalizedBox { source_index: i, bbox: clipped, visible_fraction: vf });
    }
    out
}
