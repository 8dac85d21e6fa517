//! Error and guard vocabulary shared by every module.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Well-conditioning guard classes checked by the equivalence verifier.
///
/// Each class names the quantity whose magnitude fell below its threshold:
/// the homography determinant, the third components of the four vanishing
/// points, or a denominator of the vanishing-point line form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GuardClass {
    #[serde(rename = "det")]
    Det,
    #[serde(rename = "h7")]
    H7,
    #[serde(rename = "h8")]
    H8,
    #[serde(rename = "h7+h8")]
    H7PlusH8,
    #[serde(rename = "h7-h8")]
    H7MinusH8,
    #[serde(rename = "eq3_denom")]
    Denominator,
}

impl fmt::Display for GuardClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GuardClass::Det => "det",
            GuardClass::H7 => "h7",
            GuardClass::H8 => "h8",
            GuardClass::H7PlusH8 => "h7+h8",
            GuardClass::H7MinusH8 => "h7-h8",
            GuardClass::Denominator => "eq3_denom",
        };
        f.write_str(s)
    }
}

/// All domain errors. The leading token of each message is the stable error
/// name reported by the CLI and matched in tests.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("CoincidentPoints: the two points are equal up to scale")]
    CoincidentPoints,

    #[error("CoincidentLines: the two lines are equal up to scale")]
    CoincidentLines,

    #[error("LineAtInfinity: a = b = 0 is not a drawable image line")]
    LineAtInfinity,

    #[error("DegenerateHomography: determinant vanishes after canonical scaling")]
    DegenerateHomography,

    #[error("DegenerateProjection: projected pattern vertices coincide")]
    DegenerateProjection,

    #[error("DegenerateDirection: direction components must stay away from the axes")]
    DegenerateDirection,

    #[error("FrontoParallel: pattern and image planes are parallel (h7 = h8 = 0)")]
    FrontoParallel,

    #[error("DegeneratePL: the principal-line direction coefficients vanish")]
    DegeneratePl,

    #[error("InfiniteVanishingPoint: a vanishing point lies at infinity")]
    InfiniteVanishingPoint,

    #[error("DegenerateDenominator: ill-conditioned denominator in the vanishing-point line form")]
    DegenerateDenominator,

    #[error("DegenerateConfiguration: correspondences do not determine a unique homography")]
    DegenerateConfiguration,

    #[error("DegenerateLines: the lines are too close to parallel to intersect reliably")]
    DegenerateLines,

    #[error("InsufficientViews: at least two usable views are required")]
    InsufficientViews,

    #[error("BehindCamera: a pattern point projects with non-positive depth")]
    BehindCamera,

    #[error("GuardRejected({0}): input violates a well-conditioning guard")]
    GuardRejected(GuardClass),

    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable error-class name, e.g. `"FrontoParallel"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::CoincidentPoints => "CoincidentPoints",
            Error::CoincidentLines => "CoincidentLines",
            Error::LineAtInfinity => "LineAtInfinity",
            Error::DegenerateHomography => "DegenerateHomography",
            Error::DegenerateProjection => "DegenerateProjection",
            Error::DegenerateDirection => "DegenerateDirection",
            Error::FrontoParallel => "FrontoParallel",
            Error::DegeneratePl => "DegeneratePL",
            Error::InfiniteVanishingPoint => "InfiniteVanishingPoint",
            Error::DegenerateDenominator => "DegenerateDenominator",
            Error::DegenerateConfiguration => "DegenerateConfiguration",
            Error::DegenerateLines => "DegenerateLines",
            Error::InsufficientViews => "InsufficientViews",
            Error::BehindCamera => "BehindCamera",
            Error::GuardRejected(_) => "GuardRejected",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
