//! Ground-truth generator: pinhole cameras over a planar pattern, the
//! induced plane-to-image homography, and seeded random scenarios with
//! optional pixel noise.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::calibration::CorrespondenceSet;
use crate::error::{Error, Result};
use crate::geometry::Homography;

/// Zero-skew, square-pixel pinhole camera observing the pattern plane
/// `Z = 0`. Camera coordinates are `R p + T` for a world point `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PinholeCamera {
    f: f64,
    cx: f64,
    cy: f64,
    r: Rotation3<f64>,
    t: Vector3<f64>,
}

impl PinholeCamera {
    pub fn new(f: f64, cx: f64, cy: f64, r: Rotation3<f64>, t: Vector3<f64>) -> Result<Self> {
        if !(f.is_finite() && f > 0.0) || !cx.is_finite() || !cy.is_finite() {
            return Err(Error::InvalidInput("focal must be positive and finite".into()));
        }
        if !t.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite translation".into()));
        }
        Ok(Self { f, cx, cy, r, t })
    }

    pub fn focal(&self) -> f64 {
        self.f
    }

    pub fn principal_point(&self) -> (f64, f64) {
        (self.cx, self.cy)
    }

    pub fn rotation(&self) -> &Rotation3<f64> {
        &self.r
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.t
    }

    /// The intrinsic matrix `[[f,0,cx],[0,f,cy],[0,0,1]]`.
    pub fn intrinsics(&self) -> Matrix3<f64> {
        Matrix3::new(self.f, 0.0, self.cx, 0.0, self.f, self.cy, 0.0, 0.0, 1.0)
    }

    /// Full 3-D projection of the plane point `(x, y, 0)` to pixels.
    pub fn project_plane_point(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let pc = self.r * Vector3::new(x, y, 0.0) + self.t;
        if pc.z <= 0.0 {
            return Err(Error::BehindCamera);
        }
        Ok((
            self.f * pc.x / pc.z + self.cx,
            self.f * pc.y / pc.z + self.cy,
        ))
    }

    /// The induced plane-to-image homography: the intrinsic matrix times
    /// the first two rotation columns and the translation. Canonical on
    /// return, and consistent with [`PinholeCamera::project_plane_point`]
    /// for every plane point.
    pub fn homography(&self) -> Result<Homography> {
        let rm = self.r.matrix();
        let m = Matrix3::from_columns(&[rm.column(0).into(), rm.column(1).into(), self.t]);
        Homography::from_matrix(&(self.intrinsics() * m))
    }
}

/// Regular pattern grid: `rows x cols` points spaced `spacing` apart,
/// with the corner point at the plane origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: u32,
    pub cols: u32,
    pub spacing: f64,
}

impl GridSpec {
    pub fn new(rows: u32, cols: u32, spacing: f64) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidInput("grid needs at least 2x2 points".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidInput("grid spacing must be positive".into()));
        }
        Ok(Self {
            rows,
            cols,
            spacing,
        })
    }

    /// Grid points in row-major order.
    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity((self.rows * self.cols) as usize);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push([j as f64 * self.spacing, i as f64 * self.spacing]);
            }
        }
        out
    }

    /// Center of the grid on the pattern plane.
    pub fn center(&self) -> (f64, f64) {
        (
            (self.cols - 1) as f64 * self.spacing / 2.0,
            (self.rows - 1) as f64 * self.spacing / 2.0,
        )
    }

    /// Half of the grid diagonal; gauges how far points sit from center.
    pub fn half_diagonal(&self) -> f64 {
        let (cx, cy) = self.center();
        cx.hypot(cy)
    }
}

/// Deterministically derives an independent stream seed from a master
/// seed and an index (splitmix64 step).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Projects every grid point through the camera and adds isotropic
/// Gaussian pixel noise of the given standard deviation. A zero sigma
/// reproduces the exact projection. The output is bit-for-bit
/// reproducible for a fixed seed.
pub fn project_pattern(
    cam: &PinholeCamera,
    grid: &GridSpec,
    noise_sigma: f64,
    seed: u64,
) -> Result<CorrespondenceSet> {
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::InvalidInput("noise sigma must be >= 0".into()));
    }
    let plane = grid.points();
    let mut image = Vec::with_capacity(plane.len());
    for p in &plane {
        let (u, v) = cam.project_plane_point(p[0], p[1])?;
        image.push([u, v]);
    }
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma)
            .map_err(|e| Error::InvalidInput(format!("noise sigma: {e}")))?;
        for px in &mut image {
            px[0] += normal.sample(&mut rng);
            px[1] += normal.sample(&mut rng);
        }
    }
    CorrespondenceSet::new(plane, image)
}

/// Samples a pattern pose: tilt angle uniform in `tilt_range_deg` about a
/// uniformly random in-plane axis, composed with a uniform in-plane spin,
/// plus a translation along the optical axis within `distance_range` and
/// a bounded lateral offset. Tilt ranges outside (5, 80) degrees are
/// rejected so poses stay clear of fronto-parallel and grazing views.
pub fn random_pose(
    seed: u64,
    tilt_range_deg: (f64, f64),
    distance_range: (f64, f64),
) -> Result<(Rotation3<f64>, Vector3<f64>)> {
    let (lo, hi) = tilt_range_deg;
    if !(lo >= 5.0 && hi <= 80.0 && lo <= hi) {
        return Err(Error::InvalidInput(format!(
            "tilt range ({lo}, {hi}) must lie within (5, 80) degrees"
        )));
    }
    let (dlo, dhi) = distance_range;
    if !(dlo > 0.0 && dlo <= dhi && dhi.is_finite()) {
        return Err(Error::InvalidInput("bad distance range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tilt = rng.random_range(lo..=hi).to_radians();
    let azimuth = rng.random_range(0.0..std::f64::consts::TAU);
    let spin = rng.random_range(0.0..std::f64::consts::TAU);
    let tilt_axis = Unit::new_normalize(Vector3::new(azimuth.cos(), azimuth.sin(), 0.0));
    let r = Rotation3::from_axis_angle(&tilt_axis, tilt)
        * Rotation3::from_axis_angle(&Vector3::z_axis(), spin);
    let tz = rng.random_range(dlo..=dhi);
    let lateral = 0.2 * tz;
    let tx = rng.random_range(-lateral..=lateral);
    let ty = rng.random_range(-lateral..=lateral);
    Ok((r, Vector3::new(tx, ty, tz)))
}

/// CLI-facing scenario description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// Number of views to generate.
    pub poses: u32,
    pub seed: u64,
    /// Pixel noise standard deviation.
    pub noise: f64,
    /// Principal point `[cx, cy]`, pixels.
    pub pp: [f64; 2],
    /// Focal length, pixels.
    pub focal: f64,
    /// `[rows, cols, spacing]` of the pattern grid.
    pub grid: [f64; 3],
}

/// A resolved scenario: shared intrinsics, one pose per view, and the
/// noise/seed configuration. Identical seeds yield identical output.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub focal: f64,
    pub cx: f64,
    pub cy: f64,
    pub poses: Vec<(Rotation3<f64>, Vector3<f64>)>,
    pub grid: GridSpec,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Scenario {
    /// Default tilt range for generated poses, degrees.
    pub const TILT_RANGE: (f64, f64) = (10.0, 70.0);
    /// Camera distance in units of the grid half-diagonal (min 1).
    pub const DISTANCE_RANGE: (f64, f64) = (2.5, 4.0);

    pub fn from_spec(spec: &ScenarioSpec) -> Result<Self> {
        if spec.poses == 0 {
            return Err(Error::InvalidInput("need at least one pose".into()));
        }
        let rows = spec.grid[0];
        let cols = spec.grid[1];
        if rows.fract() != 0.0 || cols.fract() != 0.0 || rows < 0.0 || cols < 0.0 {
            return Err(Error::InvalidInput("grid rows/cols must be integers".into()));
        }
        let grid = GridSpec::new(rows as u32, cols as u32, spec.grid[2])?;
        let scale = grid.half_diagonal().max(1.0);
        let (gx, gy) = grid.center();
        let center = Vector3::new(gx, gy, 0.0);

        let mut poses = Vec::with_capacity(spec.poses as usize);
        for i in 0..spec.poses as u64 {
            let (r, t0) = random_pose(
                derive_seed(spec.seed, 2 * i),
                Self::TILT_RANGE,
                (
                    Self::DISTANCE_RANGE.0 * scale,
                    Self::DISTANCE_RANGE.1 * scale,
                ),
            )?;
            // Aim the camera at the grid center so the whole pattern stays
            // in front regardless of tilt.
            let t = t0 - r * center;
            poses.push((r, t));
        }
        Ok(Self {
            focal: spec.focal,
            cx: spec.pp[0],
            cy: spec.pp[1],
            poses,
            grid,
            noise_sigma: spec.noise,
            seed: spec.seed,
        })
    }

    /// The camera observing view `i`.
    pub fn camera(&self, i: usize) -> Result<PinholeCamera> {
        let (r, t) = self
            .poses
            .get(i)
            .ok_or_else(|| Error::InvalidInput(format!("no pose {i}")))?;
        PinholeCamera::new(self.focal, self.cx, self.cy, *r, *t)
    }

    /// Generates all views as correspondence sets.
    pub fn views(&self) -> Result<Vec<CorrespondenceSet>> {
        (0..self.poses.len())
            .map(|i| {
                let cam = self.camera(i)?;
                project_pattern(
                    &cam,
                    &self.grid,
                    self.noise_sigma,
                    derive_seed(self.seed, 2 * i as u64 + 1),
                )
            })
            .collect()
    }
}
