//! Principal-point estimation from multiple planar views: homography
//! estimation per view, one principal line per view, greedy outlier
//! rejection, and a least-squares intersection of the surviving lines.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::Homography;
use crate::principal_line::{pl_auto, PrincipalLine};
use crate::vanishing::DirectionPair;

/// Condition-number ceiling for the 2x2 normal matrix of the line
/// intersection; beyond this the lines are treated as parallel.
pub const PP_COND_MAX: f64 = 1e8;

/// Relative singular-value separation required for a unique homography
/// solution direction.
const RANK_SEP_TOL: f64 = 1e-8;

/// Default pixel threshold for the greedy outlier loop.
pub const DEFAULT_OUTLIER_THRESHOLD: f64 = 3.0;

#[derive(Serialize, Deserialize)]
struct CorrespondenceWire {
    plane: Vec<[f64; 2]>,
    image: Vec<[f64; 2]>,
}

/// Matched plane/image point lists for one view: `plane[i]` in pattern
/// units maps to `image[i]` in pixels. At least four pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorrespondenceWire", into = "CorrespondenceWire")]
pub struct CorrespondenceSet {
    plane: Vec<[f64; 2]>,
    image: Vec<[f64; 2]>,
}

impl CorrespondenceSet {
    pub fn new(plane: Vec<[f64; 2]>, image: Vec<[f64; 2]>) -> Result<Self> {
        if plane.len() != image.len() {
            return Err(Error::InvalidInput(format!(
                "plane/image length mismatch: {} vs {}",
                plane.len(),
                image.len()
            )));
        }
        if plane.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "need at least 4 correspondences, got {}",
                plane.len()
            )));
        }
        let finite = |pts: &[[f64; 2]]| pts.iter().all(|p| p[0].is_finite() && p[1].is_finite());
        if !finite(&plane) || !finite(&image) {
            return Err(Error::InvalidInput("non-finite correspondence".into()));
        }
        Ok(Self { plane, image })
    }

    pub fn len(&self) -> usize {
        self.plane.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plane.is_empty()
    }

    pub fn plane(&self) -> &[[f64; 2]] {
        &self.plane
    }

    pub fn image(&self) -> &[[f64; 2]] {
        &self.image
    }
}

impl TryFrom<CorrespondenceWire> for CorrespondenceSet {
    type Error = Error;

    fn try_from(w: CorrespondenceWire) -> Result<Self> {
        Self::new(w.plane, w.image)
    }
}

impl From<CorrespondenceSet> for CorrespondenceWire {
    fn from(c: CorrespondenceSet) -> Self {
        Self {
            plane: c.plane,
            image: c.image,
        }
    }
}

/// Top-level JSON document consumed by calibration and emitted by the
/// synthetic generator: `{"views": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationInput {
    pub views: Vec<CorrespondenceSet>,
}

/// Principal-point estimate with its fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PpEstimate {
    /// Estimated principal point, pixels.
    pub u: f64,
    pub v: f64,
    /// Root-mean-square point-to-line distance over the lines used.
    pub rms_residual: f64,
    pub n_lines_used: usize,
    /// Indices of lines discarded as outliers (view indices in the
    /// pipeline output).
    pub rejected: Vec<usize>,
}

/// Isotropic normalization: translate the centroid to the origin and
/// scale so the mean distance from it is sqrt(2). Returns the transform
/// and the transformed points.
fn hartley_normalize(pts: &[[f64; 2]]) -> (Matrix3<f64>, Vec<[f64; 2]>) {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    let mean_dist = pts
        .iter()
        .map(|p| (p[0] - cx).hypot(p[1] - cy))
        .sum::<f64>()
        / n;
    let s = if mean_dist > 1e-12 {
        std::f64::consts::SQRT_2 / mean_dist
    } else {
        1.0
    };
    let t = Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0);
    let out = pts
        .iter()
        .map(|p| [s * (p[0] - cx), s * (p[1] - cy)])
        .collect();
    (t, out)
}

/// Estimates the plane-to-image homography from point correspondences by
/// the normalized direct linear transform. Exact (to rounding) for
/// noiseless inputs generated by a true homography; the returned map is
/// canonical.
pub fn estimate_homography(c: &CorrespondenceSet) -> Result<Homography> {
    let (t_plane, plane) = hartley_normalize(c.plane());
    let (t_image, image) = hartley_normalize(c.image());

    let n = plane.len();
    // Pad to at least 9 rows: the thin SVD of a 8x9 system would not
    // expose the null direction needed for the minimal 4-point case.
    let mut a = DMatrix::<f64>::zeros((2 * n).max(9), 9);
    for k in 0..n {
        let [x, y] = plane[k];
        let [u, v] = image[k];
        a[(2 * k, 0)] = -x;
        a[(2 * k, 1)] = -y;
        a[(2 * k, 2)] = -1.0;
        a[(2 * k, 6)] = u * x;
        a[(2 * k, 7)] = u * y;
        a[(2 * k, 8)] = u;
        a[(2 * k + 1, 3)] = -x;
        a[(2 * k + 1, 4)] = -y;
        a[(2 * k + 1, 5)] = -1.0;
        a[(2 * k + 1, 6)] = v * x;
        a[(2 * k + 1, 7)] = v * y;
        a[(2 * k + 1, 8)] = v;
    }

    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let mut min_i = 0;
    let mut max_s = 0.0_f64;
    for i in 0..sv.len() {
        if sv[i] < sv[min_i] {
            min_i = i;
        }
        max_s = max_s.max(sv[i]);
    }
    // The second-smallest singular value gauges uniqueness of the
    // solution direction.
    let mut second = f64::INFINITY;
    for i in 0..sv.len() {
        if i != min_i {
            second = second.min(sv[i]);
        }
    }
    if second <= RANK_SEP_TOL * max_s {
        return Err(Error::DegenerateConfiguration);
    }
    let v_t = svd.v_t.ok_or(Error::DegenerateConfiguration)?;
    let h_row = v_t.row(min_i);
    let h_norm = Matrix3::new(
        h_row[0], h_row[1], h_row[2], h_row[3], h_row[4], h_row[5], h_row[6], h_row[7], h_row[8],
    );

    let t_image_inv = t_image
        .try_inverse()
        .ok_or(Error::DegenerateConfiguration)?;
    let h = t_image_inv * h_norm * t_plane;
    Homography::from_matrix(&h).map_err(|_| Error::DegenerateConfiguration)
}

/// Least-squares intersection of normalized lines: minimizes the sum of
/// squared signed distances `(a_i u + b_i v + c_i)^2`. With exactly two
/// independent lines this is their intersection point.
pub fn estimate_principal_point(lines: &[PrincipalLine]) -> Result<PpEstimate> {
    if lines.len() < 2 {
        return Err(Error::InsufficientViews);
    }
    let (mut saa, mut sab, mut sbb, mut sac, mut sbc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for pl in lines {
        let l = &pl.line;
        saa += l.a * l.a;
        sab += l.a * l.b;
        sbb += l.b * l.b;
        sac += l.a * l.c;
        sbc += l.b * l.c;
    }
    let det = saa * sbb - sab * sab;
    let trace = saa + sbb;
    // Eigenvalues of the symmetric 2x2 normal matrix.
    let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
    let lam_max = 0.5 * (trace + disc);
    let lam_min = 0.5 * (trace - disc);
    if lam_min <= 0.0 || lam_max > PP_COND_MAX * lam_min {
        return Err(Error::DegenerateLines);
    }
    let u = (sab * sbc - sbb * sac) / det;
    let v = (sab * sac - saa * sbc) / det;
    let ss: f64 = lines
        .iter()
        .map(|pl| {
            let r = pl.line.a * u + pl.line.b * v + pl.line.c;
            r * r
        })
        .sum();
    Ok(PpEstimate {
        u,
        v,
        rms_residual: (ss / lines.len() as f64).sqrt(),
        n_lines_used: lines.len(),
        rejected: Vec::new(),
    })
}

/// Greedy outlier rejection: while the largest absolute point-to-line
/// residual against the current estimate exceeds `threshold_px`, drop
/// that line and refit. Never drops below two lines, and never fails: if
/// no fit is possible the input is returned unchanged.
pub fn flag_outliers(lines: &[PrincipalLine], threshold_px: f64) -> (Vec<usize>, Vec<usize>) {
    let mut kept: Vec<usize> = (0..lines.len()).collect();
    let mut rejected = Vec::new();
    while kept.len() > 2 {
        let subset: Vec<PrincipalLine> = kept.iter().map(|&i| lines[i].clone()).collect();
        let est = match estimate_principal_point(&subset) {
            Ok(e) => e,
            Err(_) => break,
        };
        let (mut worst_pos, mut worst_r) = (0, 0.0_f64);
        for (pos, pl) in subset.iter().enumerate() {
            let r = (pl.line.a * est.u + pl.line.b * est.v + pl.line.c).abs();
            if r > worst_r {
                worst_r = r;
                worst_pos = pos;
            }
        }
        if worst_r > threshold_px {
            rejected.push(kept.remove(worst_pos));
        } else {
            break;
        }
    }
    rejected.sort_unstable();
    (kept, rejected)
}

/// Options for the end-to-end pipeline.
#[derive(Debug, Clone, Copy)]
pub struct CalibrateOptions {
    pub outlier_threshold_px: f64,
    /// Orientation of the second vanishing-point pair used per view.
    pub direction: DirectionPair,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        Self {
            outlier_threshold_px: DEFAULT_OUTLIER_THRESHOLD,
            direction: DirectionPair::diagonal(),
        }
    }
}

/// A view dropped by the pipeline, with the error class that excluded it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedView {
    pub view: usize,
    pub reason: String,
}

/// Pipeline output: the estimate plus the per-view principal lines that
/// fed it. `lines[i]` belongs to view `line_views[i]`; `pp.rejected` and
/// `skipped` refer to original view indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub pp: PpEstimate,
    pub lines: Vec<PrincipalLine>,
    pub line_views: Vec<usize>,
    pub skipped: Vec<SkippedView>,
}

impl Serialize for CalibrationReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Pp {
            u: f64,
            v: f64,
        }
        let mut s = serializer.serialize_struct("CalibrationReport", 6)?;
        s.serialize_field(
            "pp",
            &Pp {
                u: self.pp.u,
                v: self.pp.v,
            },
        )?;
        s.serialize_field("rms_residual", &self.pp.rms_residual)?;
        s.serialize_field("n_lines_used", &self.pp.n_lines_used)?;
        s.serialize_field("rejected", &self.pp.rejected)?;
        s.serialize_field("lines", &self.lines)?;
        s.serialize_field("skipped", &self.skipped)?;
        s.end()
    }
}

/// Full pipeline: homography per view, principal line per view, greedy
/// outlier rejection, least-squares intersection. Views whose homography
/// or line cannot be formed are skipped and reported; at least two usable
/// lines must remain.
pub fn calibrate(views: &[CorrespondenceSet], opts: &CalibrateOptions) -> Result<CalibrationReport> {
    let mut lines = Vec::new();
    let mut line_views = Vec::new();
    let mut skipped = Vec::new();
    for (i, view) in views.iter().enumerate() {
        match estimate_homography(view).and_then(|h| pl_auto(&h, opts.direction)) {
            Ok(pl) => {
                lines.push(pl);
                line_views.push(i);
            }
            Err(e) => skipped.push(SkippedView {
                view: i,
                reason: e.name().to_string(),
            }),
        }
    }
    if lines.len() < 2 {
        return Err(Error::InsufficientViews);
    }
    let (kept, rejected) = flag_outliers(&lines, opts.outlier_threshold_px);
    let kept_lines: Vec<PrincipalLine> = kept.iter().map(|&i| lines[i].clone()).collect();
    let mut pp = estimate_principal_point(&kept_lines)?;
    pp.rejected = rejected.iter().map(|&i| line_views[i]).collect();
    Ok(CalibrationReport {
        pp,
        lines,
        line_views,
        skipped,
    })
}

/// Maps plane points through a homography into pixel coordinates;
/// utility for building exact synthetic views.
pub fn project_through(h: &Homography, plane: &[[f64; 2]]) -> Result<CorrespondenceSet> {
    let m = h.to_matrix();
    let mut image = Vec::with_capacity(plane.len());
    for p in plane {
        let q = m * Vector3::new(p[0], p[1], 1.0);
        if q[2].abs() < 1e-300 {
            return Err(Error::InvalidInput(
                "plane point maps to infinity under the homography".into(),
            ));
        }
        image.push([q[0] / q[2], q[1] / q[2]]);
    }
    CorrespondenceSet::new(plane.to_vec(), image)
}
