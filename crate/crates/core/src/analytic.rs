//! Quadrature evaluation of the reflection probabilities of the typical object.
//!
//! With `upsilon = p / r_net` (density `2 upsilon` on `[0, 1]`) and `alpha`
//! uniform on `[0, 2pi)`, every event reduces, for fixed `alpha`, to `upsilon`
//! falling in an interval. The inner integral is then closed-form
//! ([`theta_kernel`]) and only the `alpha` integral is done numerically.
//!
//! * Event 1 (metasurface: Tx and Rx on the same side of the object's line) is
//!   available in two independent formulations, [`pr_event1_approach1`]
//!   (intersection of the Tx-Rx line with the object's line falls outside the
//!   Tx-Rx segment, complemented) and [`pr_event1_approach2`] (point/line
//!   classification).
//! * Event 2 (Snell: the Tx-Rx mid-perpendicular hits the segment) is
//!   [`pr_event2`].
//! * Event 3 (both) is only bounded, by [`pr_event3_upper`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{line_through, mid_perpendicular, normalize_angle, Point2};
use crate::quadrature::{integrate, sign_change_roots, QuadratureSpec};

/// Global rotations tried, in order, when the Tx-Rx slope is unusable.
pub const ROTATION_ANGLES: [f64; 3] = [0.0, PI / 7.0, PI / 11.0];

/// Slopes with `|m|` outside `[1/SLOPE_LIMIT, SLOPE_LIMIT]` trigger a global rotation.
pub const SLOPE_LIMIT: f64 = 1e3;

/// Uniform samples used to bracket zeros of the Event-2 gate expressions.
pub const GATE_SCAN_SAMPLES: usize = 4096;

/// Clamping a probability by more than this is logged as a warning.
const CLAMP_WARN: f64 = 1e-7;

const QUADRANTS: [f64; 5] = [0.0, FRAC_PI_2, PI, 1.5 * PI, TAU];

/// Fixed experiment geometry: disk radius and the probe Tx/Rx locations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub r_net: f64,
    pub tx: Point2,
    pub rx: Point2,
}

impl NetworkConfig {
    pub fn new(r_net: f64, tx: Point2, rx: Point2) -> Result<Self> {
        if r_net <= 0.0 || !r_net.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "network radius must be positive, got {r_net}"
            )));
        }
        if !tx.is_finite() || !rx.is_finite() {
            return Err(Error::InvalidParameter(
                "Tx/Rx coordinates must be finite".into(),
            ));
        }
        // allow points placed exactly on the rim despite rounding in their construction
        let rim = r_net * (1.0 + 1e-12);
        if tx.norm() > rim || rx.norm() > rim {
            return Err(Error::InvalidParameter(format!(
                "Tx {tx} and Rx {rx} must lie inside the disk of radius {r_net}"
            )));
        }
        if tx == rx {
            return Err(Error::InvalidParameter("Tx and Rx must be distinct".into()));
        }
        Ok(Self { r_net, tx, rx })
    }

    /// Jointly rotates Tx and Rx about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        Self {
            r_net: self.r_net,
            tx: self.tx.rotated(angle),
            rx: self.rx.rotated(angle),
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            r_net: self.r_net,
            tx: self.rx,
            rx: self.tx,
        }
    }

    /// Slope of the Tx-Rx line, if it is finite and well away from 0 and infinity.
    pub fn usable_slope(&self) -> Option<f64> {
        let m = line_through(self.tx, self.rx).ok()?.m;
        (m.is_finite() && m.abs() >= 1.0 / SLOPE_LIMIT && m.abs() <= SLOPE_LIMIT).then_some(m)
    }

    /// First angle of [`ROTATION_ANGLES`] after which the Tx-Rx slope is usable.
    ///
    /// The object law is rotation invariant, so every probability is unchanged
    /// by the rotation.
    pub fn slope_rotation(&self) -> Result<f64> {
        ROTATION_ANGLES
            .iter()
            .copied()
            .find(|&angle| self.rotated(angle).usable_slope().is_some())
            .ok_or_else(|| {
                Error::DegenerateConfig(format!(
                    "no rotation gives a usable slope for Tx {} and Rx {}",
                    self.tx, self.rx
                ))
            })
    }
}

/// Integration limits `delta1 < delta2`: the zeros of `m sin(alpha) + cos(alpha)` in `(0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationLimits {
    pub delta1: f64,
    pub delta2: f64,
}

impl IntegrationLimits {
    pub fn from_slope(m: f64) -> Self {
        let root = (1.0 + m * m).sqrt();
        Self {
            delta1: 2.0 * (m + root).atan(),
            delta2: TAU + 2.0 * (m - root).atan(),
        }
    }
}

/// All quadrature outputs for one configuration and object length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionReport {
    pub pr_event1_a1: f64,
    pub pr_event1_a2: f64,
    pub pr_event2: f64,
    pub pr_event3_upper: f64,
}

pub fn heaviside(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn heaviside_complement(x: f64) -> f64 {
    1.0 - heaviside(x)
}

/// `Pr{lo <= upsilon <= hi}` for density `2 upsilon` on `[0, 1]`, where the
/// interval is `[max(mu3, mu4, 0), min(mu1, mu2, 1)]`.
pub fn theta_kernel(mu1: f64, mu2: f64, mu3: f64, mu4: f64) -> f64 {
    let upper = mu1.min(mu2).min(1.0);
    let lower = mu3.max(mu4).max(0.0);
    (upper * upper - lower * lower) * heaviside(upper - lower)
}

/// Zeros in `[0, 2pi)` of `a cos(alpha) + b sin(alpha) - level`.
fn sinusoid_roots(a: f64, b: f64, level: f64) -> Vec<f64> {
    let amplitude = a.hypot(b);
    if amplitude == 0.0 || level.abs() > amplitude {
        return Vec::new();
    }
    let phase = b.atan2(a);
    let spread = (level / amplitude).clamp(-1.0, 1.0).acos();
    vec![
        normalize_angle(phase + spread),
        normalize_angle(phase - spread),
    ]
}

fn clamp_probability(value: f64, what: &str) -> f64 {
    let clamped = value.clamp(0.0, 1.0);
    if (clamped - value).abs() > CLAMP_WARN {
        log::warn!("{what}: raw value {value} clamped to {clamped}");
    }
    clamped
}

/// `(1/2pi) * integral` summed over pieces, each integrated on its own.
/// Integrand over `[lo, hi]`.
type Piece<'a> = (&'a dyn Fn(f64) -> f64, f64, f64);

fn sum_integrals(pieces: &[Piece<'_>], quad: &QuadratureSpec) -> Result<f64> {
    let mut total = 0.0;
    for (f, lo, hi) in pieces {
        if hi > lo {
            total += integrate(f, *lo, *hi, quad)?;
        }
    }
    Ok(total / TAU)
}

/// Tx-Rx line data for the intersection-based formulation.
struct Approach1 {
    m: f64,
    z: f64,
    r_net: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Approach1 {
    fn new(cfg: &NetworkConfig) -> Result<Self> {
        let line = line_through(cfg.tx, cfg.rx)?;
        Ok(Self {
            m: line.m,
            z: line.z,
            r_net: cfg.r_net,
            x_min: cfg.tx.x.min(cfg.rx.x),
            x_max: cfg.tx.x.max(cfg.rx.x),
            y_min: cfg.tx.y.min(cfg.rx.y),
            y_max: cfg.tx.y.max(cfg.rx.y),
        })
    }

    /// `f(alpha, xi) = ([m sin + cos] xi + z sin) / r_net`: the `upsilon` at which
    /// the intersection abscissa equals `xi`.
    fn f(&self, alpha: f64, xi: f64) -> f64 {
        let (s, c) = alpha.sin_cos();
        ((self.m * s + c) * xi + self.z * s) / self.r_net
    }

    /// `g(alpha, omega) = ([m sin + cos](omega - z)/m + z sin) / r_net`: the
    /// `upsilon` at which the intersection ordinate equals `omega`.
    fn g(&self, alpha: f64, omega: f64) -> f64 {
        let (s, c) = alpha.sin_cos();
        ((self.m * s + c) * (omega - self.z) / self.m + self.z * s) / self.r_net
    }

    fn theta1(&self, alpha: f64) -> f64 {
        theta_kernel(
            self.f(alpha, self.x_max),
            self.g(alpha, self.y_max),
            self.f(alpha, self.x_min),
            self.g(alpha, self.y_min),
        ) * heaviside(self.m)
    }

    fn theta2(&self, alpha: f64) -> f64 {
        theta_kernel(
            self.f(alpha, self.x_max),
            self.g(alpha, self.y_min),
            self.f(alpha, self.x_min),
            self.g(alpha, self.y_max),
        ) * heaviside_complement(self.m)
    }

    fn theta3(&self, alpha: f64) -> f64 {
        theta_kernel(
            self.f(alpha, self.x_min),
            self.g(alpha, self.y_min),
            self.f(alpha, self.x_max),
            self.g(alpha, self.y_max),
        ) * heaviside(self.m)
    }

    fn theta4(&self, alpha: f64) -> f64 {
        theta_kernel(
            self.f(alpha, self.x_min),
            self.g(alpha, self.y_max),
            self.f(alpha, self.x_max),
            self.g(alpha, self.y_min),
        ) * heaviside_complement(self.m)
    }

    /// Kinks of the integrands: f and g are both of the form
    /// `(a cos + b sin) / r_net`, so every switch of the min/max in the
    /// kernel is a sinusoid root.
    fn kinks(&self) -> Vec<f64> {
        let f_coeffs = |xi: f64| (xi, self.m * xi + self.z);
        let g_coeffs = |w: f64| ((w - self.z) / self.m, w);
        let curves = [
            f_coeffs(self.x_min),
            f_coeffs(self.x_max),
            g_coeffs(self.y_min),
            g_coeffs(self.y_max),
        ];
        let mut out = Vec::new();
        for (i, &(a, b)) in curves.iter().enumerate() {
            out.extend(sinusoid_roots(a, b, 0.0));
            out.extend(sinusoid_roots(a, b, self.r_net));
            for &(a2, b2) in &curves[i + 1..] {
                out.extend(sinusoid_roots(a - a2, b - b2, 0.0));
            }
        }
        out
    }
}

/// Event 1 through the intersection of the Tx-Rx line with the object's line.
///
/// Evaluates `1 - (1/2pi){int_0^d1 th1 + int_d2^2pi th1 + int_0^d1 th2 +
/// int_d2^2pi th2 + int_d1^d2 th3 + int_d1^d2 th4}`. Needs a finite, non-zero
/// Tx-Rx slope, which is obtained by a global rotation when necessary.
pub fn pr_event1_approach1(cfg: &NetworkConfig, quad: &QuadratureSpec) -> Result<f64> {
    let cfg = cfg.rotated(cfg.slope_rotation()?);
    let m = cfg
        .usable_slope()
        .ok_or_else(|| Error::DegenerateConfig("rotated Tx-Rx slope unusable".into()))?;
    let model = Approach1::new(&cfg)?;
    let limits = IntegrationLimits::from_slope(m);
    let quad = quad.with_breakpoints(
        QUADRANTS
            .iter()
            .copied()
            .chain([limits.delta1, limits.delta2])
            .chain(model.kinks()),
    );

    let th1 = |a: f64| model.theta1(a);
    let th2 = |a: f64| model.theta2(a);
    let th3 = |a: f64| model.theta3(a);
    let th4 = |a: f64| model.theta4(a);
    let (d1, d2) = (limits.delta1, limits.delta2);
    let pieces: [Piece<'_>; 6] = [
        (&th1, 0.0, d1),
        (&th1, d2, TAU),
        (&th2, 0.0, d1),
        (&th2, d2, TAU),
        (&th3, d1, d2),
        (&th4, d1, d2),
    ];
    let complement = sum_integrals(&pieces, &quad)?;
    Ok(clamp_probability(
        1.0 - complement,
        "Pr{Event 1} (approach 1)",
    ))
}

/// Normalized projections `(x cos + y sin) / r_net` of Tx and Rx.
fn projections(cfg: &NetworkConfig, alpha: f64) -> (f64, f64) {
    let (s, c) = alpha.sin_cos();
    (
        (cfg.tx.x * c + cfg.tx.y * s) / cfg.r_net,
        (cfg.rx.x * c + cfg.rx.y * s) / cfg.r_net,
    )
}

/// Both points on the origin-free side: `min(...)^2 H(min(...))`.
fn rho1(cfg: &NetworkConfig, alpha: f64) -> f64 {
    let (t, r) = projections(cfg, alpha);
    let upper = t.min(r).min(1.0);
    upper * upper * heaviside(upper)
}

/// Both points on the origin side: `(1 - max(...)^2) H(1 - max(...))`.
fn rho2(cfg: &NetworkConfig, alpha: f64) -> f64 {
    let (t, r) = projections(cfg, alpha);
    let lower = t.max(r).max(0.0);
    (1.0 - lower * lower) * heaviside(1.0 - lower)
}

/// Event 1 through above/below classification of Tx and Rx:
/// `(1/2pi)[int rho1 + int rho2]` over `[0, 2pi]`. Does not involve the Tx-Rx
/// slope, so no rotation is needed.
pub fn pr_event1_approach2(cfg: &NetworkConfig, quad: &QuadratureSpec) -> Result<f64> {
    let (t, r) = (cfg.tx, cfg.rx);
    let mut kinks = QUADRANTS.to_vec();
    for (a, b) in [(t.x, t.y), (r.x, r.y), (t.x - r.x, t.y - r.y)] {
        kinks.extend(sinusoid_roots(a, b, 0.0));
    }
    for (a, b) in [(t.x, t.y), (r.x, r.y)] {
        kinks.extend(sinusoid_roots(a, b, cfg.r_net));
    }
    let quad = quad.with_breakpoints(kinks);
    let r1 = |a: f64| rho1(cfg, a);
    let r2 = |a: f64| rho2(cfg, a);
    let pieces: [Piece<'_>; 2] = [(&r1, 0.0, TAU), (&r2, 0.0, TAU)];
    Ok(clamp_probability(
        sum_integrals(&pieces, &quad)?,
        "Pr{Event 1} (approach 2)",
    ))
}

/// Endpoint sign choices `(F sign, G sign)` of the upper row of each kernel,
/// indexed `[quadrant case][sub-case a..d]`. The lower row uses the opposite
/// signs. Quadrant cases: 1 = `[3pi/2, 2pi]`, 2 = `[pi, 3pi/2]`,
/// 3 = `[0, pi/2]`, 4 = `[pi/2, pi]`.
const GAMMA_SIGNS: [[(f64, f64); 4]; 4] = [
    [(-1.0, 1.0), (-1.0, -1.0), (1.0, 1.0), (1.0, -1.0)],
    [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)],
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)],
    [(1.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (-1.0, 1.0)],
];

/// Mid-perpendicular data for the Snell-law event.
struct Approach2Snell {
    m_p: f64,
    z_p: f64,
    half_length: f64,
    r_net: f64,
}

/// Per-angle quantities shared by the Event-2 auxiliary functions.
struct SnellTerms {
    s: f64,
    c: f64,
    /// `m_p sin + cos`
    d: f64,
    /// `1/(m_p sin + cos) - cos`
    gate_x: f64,
    /// `m_p/(m_p sin + cos) - sin`
    gate_y: f64,
}

impl Approach2Snell {
    fn new(cfg: &NetworkConfig, length: f64) -> Result<Self> {
        let mp = mid_perpendicular(cfg.tx, cfg.rx)?;
        Ok(Self {
            m_p: mp.m,
            z_p: mp.z,
            half_length: 0.5 * length,
            r_net: cfg.r_net,
        })
    }

    fn terms(&self, alpha: f64) -> SnellTerms {
        let (s, c) = alpha.sin_cos();
        let d = self.m_p * s + c;
        // Algebraically equal to the two gate expressions but free of the
        // cancellation near the quadrant boundaries.
        let gate_x = s * (s - self.m_p * c) / d;
        let gate_y = c * (self.m_p * c - s) / d;
        SnellTerms {
            s,
            c,
            d,
            gate_x,
            gate_y,
        }
    }

    /// `F(alpha, t) = (t + z_p sin/d) / gate_x / r_net`.
    fn big_f(&self, k: &SnellTerms, t: f64) -> f64 {
        (t + self.z_p * k.s / k.d) / k.gate_x / self.r_net
    }

    /// `G(alpha, v) = (v + m_p z_p sin/d - z_p) / gate_y / r_net`, with the
    /// constant part rewritten as `-z_p cos/d`.
    fn big_g(&self, k: &SnellTerms, v: f64) -> f64 {
        (v - self.z_p * k.c / k.d) / k.gate_y / self.r_net
    }

    /// `Gamma_q = Gamma_q^a + Gamma_q^b + Gamma_q^c + Gamma_q^d`, `q` in `1..=4`.
    fn gamma(&self, case: usize, alpha: f64) -> f64 {
        let k = self.terms(alpha);
        let ts = self.half_length * k.s;
        let vc = self.half_length * k.c;
        let gates = [
            heaviside(k.gate_x) * heaviside(k.gate_y),
            heaviside(k.gate_x) * heaviside_complement(k.gate_y),
            heaviside_complement(k.gate_x) * heaviside(k.gate_y),
            heaviside_complement(k.gate_x) * heaviside_complement(k.gate_y),
        ];
        GAMMA_SIGNS[case - 1]
            .iter()
            .zip(gates)
            .filter(|(_, gate)| *gate != 0.0)
            .map(|(&(fs, gs), gate)| {
                theta_kernel(
                    self.big_f(&k, fs * ts),
                    self.big_g(&k, gs * vc),
                    self.big_f(&k, -fs * ts),
                    self.big_g(&k, -gs * vc),
                ) * gate
            })
            .sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out = QUADRANTS.to_vec();
        let limits = IntegrationLimits::from_slope(self.m_p);
        out.extend([limits.delta1, limits.delta2]);
        out.extend(sign_change_roots(
            |a| self.terms(a).gate_x,
            0.0,
            TAU,
            GATE_SCAN_SAMPLES,
        ));
        out.extend(sign_change_roots(
            |a| self.terms(a).gate_y,
            0.0,
            TAU,
            GATE_SCAN_SAMPLES,
        ));
        out
    }
}

/// Event 2: the Tx-Rx mid-perpendicular crosses the segment of length `length`.
///
/// `(1/2pi)[int_{3pi/2}^{2pi} G1 + int_pi^{3pi/2} G2 + int_0^{pi/2} G3 +
/// int_{pi/2}^pi G4]`, each `G` the sum of its four gated sub-cases.
pub fn pr_event2(cfg: &NetworkConfig, length: f64, quad: &QuadratureSpec) -> Result<f64> {
    if length <= 0.0 || !length.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "object length must be positive, got {length}"
        )));
    }
    let cfg = cfg.rotated(cfg.slope_rotation()?);
    let model = Approach2Snell::new(&cfg, length)?;
    let quad = quad.with_breakpoints(model.breakpoints());
    let g1 = |a: f64| model.gamma(1, a);
    let g2 = |a: f64| model.gamma(2, a);
    let g3 = |a: f64| model.gamma(3, a);
    let g4 = |a: f64| model.gamma(4, a);
    let pieces: [Piece<'_>; 4] = [
        (&g1, 1.5 * PI, TAU),
        (&g2, PI, 1.5 * PI),
        (&g3, 0.0, FRAC_PI_2),
        (&g4, FRAC_PI_2, PI),
    ];
    Ok(clamp_probability(
        sum_integrals(&pieces, &quad)?,
        "Pr{Event 2}",
    ))
}

/// Frechet bound `Pr{E1 and E2} <= min(Pr{E1}, Pr{E2})`.
pub fn frechet_upper(pr_event1: f64, pr_event2: f64) -> f64 {
    pr_event1.min(pr_event2)
}

/// Upper bound on the Snell-law reflection probability.
pub fn pr_event3_upper(cfg: &NetworkConfig, length: f64, quad: &QuadratureSpec) -> Result<f64> {
    Ok(frechet_upper(
        pr_event1_approach2(cfg, quad)?,
        pr_event2(cfg, length, quad)?,
    ))
}

/// Evaluates every formulation once, sharing the Event-1/Event-2 values in the bound.
pub fn reflection_report(
    cfg: &NetworkConfig,
    length: f64,
    quad: &QuadratureSpec,
) -> Result<ReflectionReport> {
    let pr_event1_a1 = pr_event1_approach1(cfg, quad)?;
    let pr_event1_a2 = pr_event1_approach2(cfg, quad)?;
    let pr_event2 = pr_event2(cfg, length, quad)?;
    Ok(ReflectionReport {
        pr_event1_a1,
        pr_event1_a2,
        pr_event2,
        pr_event3_upper: frechet_upper(pr_event1_a2, pr_event2),
    })
}
