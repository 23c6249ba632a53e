//! Globally adaptive Gauss-Kronrod (7/15) quadrature over a finite interval.
//!
//! The interval is first cut at every supplied breakpoint, then the
//! sub-interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol * |result|)`. Kronrod nodes are all
//! interior, so the integrand is never evaluated on a breakpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on live sub-intervals before giving up.
const MAX_INTERVALS: usize = 250_000;

/// Breakpoints closer than this to an interval end (or to each other) are merged.
const BREAKPOINT_MERGE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub breakpoints: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_depth: 60,
            breakpoints: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if [self.rel_tol, self.abs_tol]
            .iter()
            .any(|t| *t <= 0.0 || !t.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidParameter(
                "max_depth must be at least 1".into(),
            ));
        }
        if self.breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("breakpoints must be finite".into()));
        }
        Ok(())
    }

    /// Copy of `self` with `extra` merged into the breakpoint list (sorted, deduplicated).
    pub fn with_breakpoints(&self, extra: impl IntoIterator<Item = f64>) -> Self {
        let mut out = self.clone();
        out.breakpoints.extend(extra);
        out.breakpoints.retain(|b| b.is_finite());
        out.breakpoints.sort_by(f64::total_cmp);
        out.breakpoints
            .dedup_by(|a, b| (*a - *b).abs() <= BREAKPOINT_MERGE);
        out
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, depth: u32) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        lo,
        hi,
        value,
        error,
        depth,
    }
}

/// Integrates `f` over `[lo, hi]`; see [`integrate_detailed`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<f64> {
    integrate_detailed(f, lo, hi, quad).map(|q| q.value)
}

pub fn integrate_detailed<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    quad: &QuadratureSpec,
) -> Result<Quadrature> {
    quad.validate()?;
    if lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }

    let mut cuts = vec![lo];
    cuts.extend(
        quad.breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo + BREAKPOINT_MERGE && b < hi - BREAKPOINT_MERGE),
    );
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= BREAKPOINT_MERGE);

    let mut heap: BinaryHeap<Segment> = cuts
        .windows(2)
        .map(|w| gauss_kronrod(&f, w[0], w[1], 0))
        .collect();

    let totals = |heap: &BinaryHeap<Segment>| {
        heap.iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
    };
    let (mut value, mut error) = totals(&heap);
    loop {
        let target = quad.abs_tol.max(quad.rel_tol * value.abs());
        if error <= target {
            // running sums drift; confirm with a fresh summation
            (value, error) = totals(&heap);
            let target = quad.abs_tol.max(quad.rel_tol * value.abs());
            if error <= target {
                return Ok(Quadrature {
                    value,
                    abs_error: error,
                    intervals: heap.len(),
                });
            }
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= quad.max_depth || heap.len() + 2 > MAX_INTERVALS {
            return Err(Error::QuadratureFailure {
                lo,
                hi,
                estimate: error,
                target,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = gauss_kronrod(&f, worst.lo, mid, worst.depth + 1);
        let right = gauss_kronrod(&f, mid, worst.hi, worst.depth + 1);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

/// Roots of `f` on `[lo, hi]` found by scanning `samples` uniform points for
/// sign changes and bisecting each bracket. Poles that flip sign are reported too.
pub fn sign_change_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    let step = (hi - lo) / samples as f64;
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for i in 1..=samples {
        let x = if i == samples {
            hi
        } else {
            lo + step * i as f64
        };
        let fx = f(x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if fx.is_finite() && prev_f.is_finite() && (fx > 0.0) != (prev_f > 0.0) && fx != 0.0
        {
            roots.push(bisect(&f, prev_x, x, prev_f));
        }
        prev_x = x;
        prev_f = fx;
    }
    if prev_f == 0.0 {
        roots.push(prev_x);
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let positive_at_a = fa > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == positive_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
