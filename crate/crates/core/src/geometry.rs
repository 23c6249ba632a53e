//! Planar primitives shared by the quadrature formulas and the Monte Carlo
//! event checks.
//!
//! Three line representations appear throughout the crate:
//!
//! * [`SlopeLine`] `y = m x + z`, used for the Tx-Rx line and its mid-perpendicular;
//! * [`GeneralLine`] `a x + b y + c = 0`, used for above/below classification;
//! * [`PolarLine`] `x cos(alpha) + y sin(alpha) = p`, the support line of a segment object.
//!
//! Everything here is a pure function of its inputs.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold under which two abscissae are considered equal.
pub const VERTICAL_EPS: f64 = 1e-12;
/// Denominators of intersection formulas below this are treated as parallel lines.
pub const PARALLEL_EPS: f64 = 1e-12;
/// Relative tolerance for the on-line classification of [`side_of`].
pub const ON_LINE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Non-vertical line `y = m x + z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeLine {
    pub m: f64,
    pub z: f64,
}

impl SlopeLine {
    pub fn y_at(&self, x: f64) -> f64 {
        self.m * x + self.z
    }

    pub fn residual(&self, pt: Point2) -> f64 {
        pt.y - self.y_at(pt.x)
    }

    pub fn to_general(self) -> GeneralLine {
        GeneralLine {
            a: self.m,
            b: -1.0,
            c: self.z,
        }
    }
}

/// Line `a x + b y + c = 0`; only signs and ratios of the coefficients matter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralLine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl GeneralLine {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if a == 0.0 && b == 0.0 {
            return Err(Error::InvalidParameter(
                "general line needs (a, b) != (0, 0)".into(),
            ));
        }
        Ok(Self { a, b, c })
    }

    pub fn eval(&self, pt: Point2) -> f64 {
        self.a * pt.x + self.b * pt.y + self.c
    }
}

/// Line in normal form `x cos(alpha) + y sin(alpha) = p` with `p >= 0`, `alpha` in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarLine {
    pub p: f64,
    pub alpha: f64,
}

impl PolarLine {
    /// Builds the normal form, folding a negative distance into `alpha + pi`.
    pub fn new(p: f64, alpha: f64) -> Self {
        let (p, alpha) = if p < 0.0 {
            (-p, alpha + std::f64::consts::PI)
        } else {
            (p, alpha)
        };
        Self {
            p,
            alpha: normalize_angle(alpha),
        }
    }

    /// `s(P) = x cos(alpha) + y sin(alpha) - p`. Its sign tells which side of the line `P` is on.
    pub fn signed_offset(&self, pt: Point2) -> f64 {
        let (s, c) = self.alpha.sin_cos();
        pt.x * c + pt.y * s - self.p
    }

    pub fn to_general(self) -> GeneralLine {
        let (s, c) = self.alpha.sin_cos();
        GeneralLine {
            a: c,
            b: s,
            c: -self.p,
        }
    }
}

/// Wraps an angle into `[0, 2pi)`.
pub fn normalize_angle(alpha: f64) -> f64 {
    let r = alpha.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// The typical object: a segment of length `length` centred at distance `p`
/// from the origin, perpendicular to the radius through its centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentObject {
    pub center: Point2,
    pub alpha: f64,
    pub length: f64,
    pub end1: Point2,
    pub end2: Point2,
}

impl SegmentObject {
    /// Endpoints `center -/+ (L/2)(sin(alpha), -cos(alpha))`.
    pub fn new(center: Point2, alpha: f64, length: f64) -> Result<Self> {
        if length <= 0.0 || !length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "object length must be positive, got {length}"
            )));
        }
        if !center.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidParameter(
                "object center/orientation must be finite".into(),
            ));
        }
        let (s, c) = alpha.sin_cos();
        let half = 0.5 * length;
        let end1 = Point2::new(center.x - half * s, center.y + half * c);
        let end2 = Point2::new(center.x + half * s, center.y - half * c);
        Ok(Self {
            center,
            alpha,
            length,
            end1,
            end2,
        })
    }

    /// Distance of the support line from the origin.
    pub fn p(&self) -> f64 {
        let (s, c) = self.alpha.sin_cos();
        self.center.x * c + self.center.y * s
    }

    /// The infinite line through both endpoints.
    pub fn support_line(&self) -> PolarLine {
        PolarLine::new(self.p(), self.alpha)
    }

    /// Rigid rotation about the origin.
    pub fn rotated(&self, angle: f64) -> SegmentObject {
        SegmentObject {
            center: self.center.rotated(angle),
            alpha: self.alpha + angle,
            length: self.length,
            end1: self.end1.rotated(angle),
            end2: self.end2.rotated(angle),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SideClassification {
    Above,
    Below,
    On,
}

/// Line through two points, `m = (y1 - y2)/(x1 - x2)`, `z = y2 - m x2`.
pub fn line_through(p1: Point2, p2: Point2) -> Result<SlopeLine> {
    let dx = p1.x - p2.x;
    if dx.abs() < VERTICAL_EPS * p1.x.abs().max(1.0) {
        return Err(Error::VerticalLine {
            x1: p1.x,
            y1: p1.y,
            x2: p2.x,
            y2: p2.y,
        });
    }
    let m = (p1.y - p2.y) / dx;
    Ok(SlopeLine {
        m,
        z: p2.y - m * p2.x,
    })
}

/// Perpendicular bisector of the Tx-Rx segment: `m_p = -1/m`,
/// `z_p = (x_tx + x_rx)/(2m) + (y_tx + y_rx)/2`.
pub fn mid_perpendicular(tx: Point2, rx: Point2) -> Result<SlopeLine> {
    let line = line_through(tx, rx).map_err(|_| Error::DegenerateSlope {
        slope: f64::INFINITY,
    })?;
    let m = line.m;
    if m == 0.0 {
        return Err(Error::DegenerateSlope { slope: m });
    }
    Ok(SlopeLine {
        m: -1.0 / m,
        z: (tx.x + rx.x) / (2.0 * m) + 0.5 * (tx.y + rx.y),
    })
}

/// Object at distance `p = r_net sqrt(u)` from the origin in direction `alpha`, oriented by `alpha`.
pub fn object_from_params(u: f64, alpha: f64, length: f64, r_net: f64) -> Result<SegmentObject> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!(
            "u must lie in [0, 1], got {u}"
        )));
    }
    if r_net <= 0.0 || !r_net.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "network radius must be positive, got {r_net}"
        )));
    }
    let p = r_net * u.sqrt();
    let (s, c) = alpha.sin_cos();
    SegmentObject::new(Point2::new(p * c, p * s), alpha, length)
}

/// Position of `pt` relative to a non-vertical line, from the sign of `(a x + b y + c)/b`.
///
/// Vertical lines (`b == 0`) have no above/below and yield [`Error::VerticalLine`].
pub fn side_of(line: &GeneralLine, pt: Point2) -> Result<SideClassification> {
    if line.b == 0.0 {
        return Err(Error::VerticalLine {
            x1: pt.x,
            y1: pt.y,
            x2: pt.x,
            y2: pt.y,
        });
    }
    let value = line.eval(pt);
    let scale = (line.a * pt.x).abs() + (line.b * pt.y).abs() + line.c.abs();
    if value.abs() <= ON_LINE_EPS * scale || value == 0.0 {
        return Ok(SideClassification::On);
    }
    Ok(if (value > 0.0) == (line.b > 0.0) {
        SideClassification::Above
    } else {
        SideClassification::Below
    })
}

/// True iff both points lie strictly on the same side of `line`.
pub fn same_side(tx: Point2, rx: Point2, line: &PolarLine) -> bool {
    line.signed_offset(tx) * line.signed_offset(rx) > 0.0
}

/// Intersection of `y = m x + z` with `x cos(alpha) + y sin(alpha) = p`:
/// `x = (p - z sin(alpha)) / (m sin(alpha) + cos(alpha))`.
pub fn intersect_slope_polar(line: &SlopeLine, obj_line: &PolarLine) -> Result<Point2> {
    let (s, c) = obj_line.alpha.sin_cos();
    let denominator = line.m * s + c;
    if denominator.abs() <= PARALLEL_EPS {
        return Err(Error::ParallelLines { denominator });
    }
    let x = (obj_line.p - line.z * s) / denominator;
    Ok(Point2::new(x, line.y_at(x)))
}

/// Closed axis-aligned box test.
pub fn within_bbox(pt: Point2, c1: Point2, c2: Point2) -> bool {
    c1.x.min(c2.x) <= pt.x
        && pt.x <= c1.x.max(c2.x)
        && c1.y.min(c2.y) <= pt.y
        && pt.y <= c1.y.max(c2.y)
}
