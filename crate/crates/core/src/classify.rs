//! Density constants and the threshold logic for singularity classes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Area density of the Y cone (three half-planes at 120°).
pub const C_Y: f64 = 1.5;

/// Total-curvature threshold below which a spanning minimal surface is embedded.
pub const THRESHOLD_Y: f64 = 3.0 * PI;

/// Half-width of the band in which a threshold comparison is reported as a boundary case.
pub const BAND: f64 = 1e-6;

/// `2π C_T = 6 arccos(−1/3)`, the length of the tetrahedral link.
pub fn threshold_t() -> f64 {
    6.0 * (-1.0f64 / 3.0).acos()
}

/// Area density of the T cone (cone over the tetrahedron skeleton from its centre).
pub fn c_t() -> f64 {
    threshold_t() / (2.0 * PI)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularityClass {
    /// Any spanning minimal surface is embedded up to the boundary.
    EmbeddedOnly,
    /// At worst Y-curve singularities (the surface is then part of a Y cone).
    AtWorstY,
    /// Y-curve singularities possible; T-points excluded unless the surface is the T cone.
    AtWorstYUnlessTCone,
    /// Neither density theorem applies.
    Unconstrained,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub tc: f64,
    pub threshold_y: f64,
    pub threshold_t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: SingularityClass,
    pub margins: Margins,
    /// True when `tc` lies within the band of a threshold.
    pub boundary: bool,
    pub notes: Vec<String>,
}

pub const NOTE_Y: &str = "equality case tc = 3π: a spanning minimal surface may be a subset of the Y singular cone \
     (three half-planes meeting at 120° along a line)";
pub const NOTE_T: &str = "equality case tc = 2πC_T: the T cone (cone over the regular tetrahedron skeleton from its \
     centre, with planar faces) may occur";
pub const NOTE_PERMITS: &str =
    "classes describe what the density bounds permit for a minimal surface spanning the graph; no surface is constructed";

fn hits(tc: f64, threshold: f64, band: f64) -> bool {
    (tc - threshold).abs() <= band + 8.0 * f64::EPSILON * threshold.abs()
}

/// Applies the thresholds `3π` and `2πC_T` to a (possibly corrected) total curvature.
pub fn classify_value(tc: f64, band: f64) -> Classification {
    let ty = THRESHOLD_Y;
    let tt = threshold_t();
    let on_y = hits(tc, ty, band);
    let on_t = hits(tc, tt, band);
    let class = if on_y {
        SingularityClass::AtWorstY
    } else if tc < ty {
        SingularityClass::EmbeddedOnly
    } else if on_t || tc < tt {
        SingularityClass::AtWorstYUnlessTCone
    } else {
        SingularityClass::Unconstrained
    };
    let mut notes = vec![NOTE_PERMITS.to_string()];
    if on_y {
        notes.push(NOTE_Y.to_string());
    }
    if on_t {
        notes.push(NOTE_T.to_string());
    }
    Classification { class, margins: Margins { tc, threshold_y: ty, threshold_t: tt }, boundary: on_y || on_t, notes }
}

/// Order used to compare classes: smaller means a stronger statement.
pub fn strength_rank(c: SingularityClass) -> u8 {
    match c {
        SingularityClass::EmbeddedOnly => 0,
        SingularityClass::AtWorstY => 1,
        SingularityClass::AtWorstYUnlessTCone => 2,
        SingularityClass::Unconstrained => 3,
    }
}
