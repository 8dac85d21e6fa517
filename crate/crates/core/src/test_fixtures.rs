//! Worked-example homographies shared by the unit tests.

use crate::geometry::Homography;

/// Generic well-conditioned map with finite vanishing points:
/// [[2,1,0],[1,3,0],[1,2,1]].
pub fn general_h() -> Homography {
    Homography::new([2.0, 1.0, 0.0, 1.0, 3.0, 0.0, 1.0, 2.0, 1.0]).unwrap()
}

/// Map with equal third-row leading entries (h7 = h8), which sends the
/// second diagonal direction to infinity: [[2,0,0],[0,3,0],[1,1,1]].
pub fn equal_row3_h() -> Homography {
    Homography::new([2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 1.0, 1.0, 1.0]).unwrap()
}

/// Camera tilted about the pattern x-axis (sin = 0.6), focal 1, principal
/// point (0.5, 0): [[1,0.3,0.5],[0,0.8,0],[0,0.6,1]]. Its h7 vanishes, so
/// the first vanishing point is at infinity; the principal line is u = 0.5.
pub fn x_tilt_camera_h() -> Homography {
    Homography::new([1.0, 0.3, 0.5, 0.0, 0.8, 0.0, 0.0, 0.6, 1.0]).unwrap()
}

/// Camera tilted about the pattern y-axis (sin = 0.6), focal 1, principal
/// point (0.5, 0.7): [[0.5,0,0.5],[-0.42,1,0.7],[-0.6,0,1]]. Its h8
/// vanishes; the principal line is v = 0.7.
pub fn y_tilt_camera_h() -> Homography {
    Homography::new([0.5, 0.0, 0.5, -0.42, 1.0, 0.7, -0.6, 0.0, 1.0]).unwrap()
}
