//! Orthogonal vanishing points of a planar view, built by two independent
//! routes: directly from the homography columns, and by joining/meeting
//! the projected edges of two unit squares drawn on the pattern plane.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{Homography, HomogeneousPoint2, ProjectiveLine};

/// Minimum magnitude of each direction cosine. Directions closer to the
/// coordinate axes collapse the second vanishing-point pair onto the
/// first and leave the line-form denominators ill-conditioned.
pub const DIR_MIN: f64 = 0.05;

/// Sine-of-angle tolerance below which two projected vertices count as
/// coincident. Looser than the generic proportionality tolerance because
/// joins of nearly coincident vertices are meaningless well before the
/// vertices agree to machine precision.
const VERTEX_TOL: f64 = 1e-8;

/// Unit direction cosines `(a, b)` of the second orthogonal pair of
/// pattern-plane directions; the pair itself is `(a, b)` and `(-b, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionPair {
    a: f64,
    b: f64,
}

impl DirectionPair {
    /// Normalizes `(a, b)` to unit length. Rejects zero vectors and
    /// directions with a component smaller than [`DIR_MIN`].
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput("non-finite direction".into()));
        }
        let n = a.hypot(b);
        if n == 0.0 {
            return Err(Error::DegenerateDirection);
        }
        let (a, b) = (a / n, b / n);
        if a.abs() < DIR_MIN || b.abs() < DIR_MIN {
            return Err(Error::DegenerateDirection);
        }
        Ok(Self { a, b })
    }

    /// The diagonal directions of the unit squares: `(1, 1)/sqrt(2)`.
    pub fn diagonal() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { a: s, b: s }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

impl Default for DirectionPair {
    fn default() -> Self {
        Self::diagonal()
    }
}

/// Vertices of the two canonical unit squares on the pattern plane.
/// Square I is A(0,0) B(1,0) C(1,1) D(0,1); E(-1,1) and F(-1,0) extend it
/// to the second square whose diagonals supply the 45-degree directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSquare {
    vertices: [HomogeneousPoint2; 6],
}

impl PatternSquare {
    pub fn canonical() -> Self {
        Self {
            vertices: [
                HomogeneousPoint2::finite(0.0, 0.0),  // A
                HomogeneousPoint2::finite(1.0, 0.0),  // B
                HomogeneousPoint2::finite(1.0, 1.0),  // C
                HomogeneousPoint2::finite(0.0, 1.0),  // D
                HomogeneousPoint2::finite(-1.0, 1.0), // E
                HomogeneousPoint2::finite(-1.0, 0.0), // F
            ],
        }
    }

    /// Validates that neither square is degenerate: no three vertices of
    /// the same square may be collinear. Across the two squares some
    /// triples do share a line (F, A, B all lie on v = 0), so only
    /// within-square triples are checked.
    pub fn new(vertices: [HomogeneousPoint2; 6]) -> Result<Self> {
        let squares: [[usize; 4]; 2] = [[0, 1, 2, 3], [0, 3, 4, 5]];
        for sq in squares {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    for k in (j + 1)..4 {
                        let (p, q, r) = (&vertices[sq[i]], &vertices[sq[j]], &vertices[sq[k]]);
                        let l = ProjectiveLine::through_points(p, q)
                            .map_err(|_| Error::DegenerateProjection)?;
                        if l.eval(r).abs() <= 1e-12 * l.norm() * r.norm() {
                            return Err(Error::DegenerateProjection);
                        }
                    }
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[HomogeneousPoint2; 6] {
        &self.vertices
    }
}

/// Two ordered pairs of orthogonal vanishing points, `(pv1, pv2)` for the
/// pattern axes and `(pv3, pv4)` for the rotated directions given by the
/// orientation. Each member may be finite or at infinity (`w = 0`); all
/// four lie on one common line, the vanishing line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OvpQuad {
    pv: [HomogeneousPoint2; 4],
    orientation: DirectionPair,
}

impl OvpQuad {
    /// Vanishing points straight from the homography columns: the images
    /// of the plane directions (1,0), (0,1), (a,b), and (-b,a).
    pub fn from_columns(h: &Homography, dir: DirectionPair) -> Self {
        let pv1 = h.map(&HomogeneousPoint2::at_infinity(1.0, 0.0));
        let pv2 = h.map(&HomogeneousPoint2::at_infinity(0.0, 1.0));
        let pv3 = h.map(&HomogeneousPoint2::at_infinity(dir.a(), dir.b()));
        let pv4 = h.map(&HomogeneousPoint2::at_infinity(-dir.b(), dir.a()));
        Self {
            pv: [pv1, pv2, pv3, pv4],
            orientation: dir,
        }
    }

    /// Vanishing points built purely from incidence: project the six
    /// square vertices, join the edges and diagonals, and meet opposite
    /// pairs. Agrees point-by-point (up to scale) with
    /// [`OvpQuad::from_columns`] at the diagonal orientation.
    pub fn from_square_edges(h: &Homography) -> Result<Self> {
        let sq = PatternSquare::canonical();
        let img: Vec<HomogeneousPoint2> = sq.vertices().iter().map(|v| h.map(v)).collect();
        let (a, b, c, d, e, f) = (&img[0], &img[1], &img[2], &img[3], &img[4], &img[5]);

        // Pairs joined below; if any two coincide the projection is unusable.
        let needed: [(&HomogeneousPoint2, &HomogeneousPoint2); 8] = [
            (a, b),
            (c, d),
            (a, d),
            (b, c),
            (a, c),
            (d, f),
            (a, e),
            (b, d),
        ];
        for (p, q) in needed {
            if p.proportional_to(q, VERTEX_TOL) {
                return Err(Error::DegenerateProjection);
            }
        }

        let join = |p: &HomogeneousPoint2, q: &HomogeneousPoint2| {
            ProjectiveLine::through_points(p, q).map_err(|_| Error::DegenerateProjection)
        };
        let meet = |l1: &ProjectiveLine, l2: &ProjectiveLine| {
            l1.intersect(l2).map_err(|_| Error::DegenerateProjection)
        };

        let pv1 = meet(&join(a, b)?, &join(c, d)?)?;
        let pv2 = meet(&join(a, d)?, &join(b, c)?)?;
        let pv3 = meet(&join(a, c)?, &join(d, f)?)?;
        let pv4 = meet(&join(a, e)?, &join(b, d)?)?;

        Ok(Self {
            pv: [pv1, pv2, pv3, pv4],
            orientation: DirectionPair::diagonal(),
        })
    }

    /// Assembles a quad from raw points without invariant checks. The
    /// public routes are the only supported way to build quads; this
    /// exists so degenerate inputs can be exercised from tests.
    #[cfg(test)]
    pub(crate) fn from_points_unchecked(pv: [HomogeneousPoint2; 4]) -> Self {
        Self {
            pv,
            orientation: DirectionPair::diagonal(),
        }
    }

    pub fn pv1(&self) -> &HomogeneousPoint2 {
        &self.pv[0]
    }

    pub fn pv2(&self) -> &HomogeneousPoint2 {
        &self.pv[1]
    }

    pub fn pv3(&self) -> &HomogeneousPoint2 {
        &self.pv[2]
    }

    pub fn pv4(&self) -> &HomogeneousPoint2 {
        &self.pv[3]
    }

    pub fn points(&self) -> &[HomogeneousPoint2; 4] {
        &self.pv
    }

    pub fn orientation(&self) -> DirectionPair {
        self.orientation
    }

    /// The line through `pv1` and `pv2`; the other two points lie on it as
    /// well. For a fronto-parallel view this is the line at infinity,
    /// which downstream normalization flags as [`Error::LineAtInfinity`].
    pub fn vanishing_line(&self) -> Result<ProjectiveLine> {
        ProjectiveLine::through_points(&self.pv[0], &self.pv[1])
    }
}

impl Serialize for OvpQuad {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("OvpQuad", 2)?;
        let pv: [[f64; 3]; 4] = [
            [self.pv[0].x, self.pv[0].y, self.pv[0].w],
            [self.pv[1].x, self.pv[1].y, self.pv[1].w],
            [self.pv[2].x, self.pv[2].y, self.pv[2].w],
            [self.pv[3].x, self.pv[3].y, self.pv[3].w],
        ];
        s.serialize_field("pv", &pv)?;
        s.serialize_field("dir", &[self.orientation.a, self.orientation.b])?;
        s.end()
    }
}
