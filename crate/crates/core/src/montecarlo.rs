//! Monte Carlo reference for the event probabilities.
//!
//! Sample `i` of a run is a pure function of `(seed, i)`: the ChaCha8 stream
//! seeded from `seed` is positioned at word `4 i` before the two uniforms of
//! that sample are read. Workers own contiguous index ranges and only merge
//! integer counts, so a report does not depend on how many workers ran.

use std::f64::consts::TAU;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::NetworkConfig;
use crate::error::{Error, Result};
use crate::geometry::{
    intersect_slope_polar, line_through, mid_perpendicular, object_from_params, same_side,
    within_bbox, SegmentObject, SlopeLine,
};

/// 32-bit words consumed per sample (two `f64` uniforms of 64 bits each).
const WORDS_PER_SAMPLE: u128 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub n_samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: 0x5eed,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1 {
            return Err(Error::InvalidParameter(
                "n_samples must be at least 1".into(),
            ));
        }
        if self.workers < 1 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// The two uniforms behind one object: `u` in `[0, 1)` and `alpha` in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformDraw {
    pub u: f64,
    pub alpha: f64,
}

/// Counter-addressable stream of [`UniformDraw`]s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleStream {
    seed: u64,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Draws for sample indices `range`, identical to reading them one at a time.
    pub fn draws(&self, range: Range<u64>) -> impl Iterator<Item = UniformDraw> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos(u128::from(range.start) * WORDS_PER_SAMPLE);
        range.map(move |_| UniformDraw {
            u: rng.random::<f64>(),
            alpha: TAU * rng.random::<f64>(),
        })
    }

    pub fn draw(&self, index: u64) -> UniformDraw {
        self.draws(index..index + 1)
            .next()
            .expect("one-element range yields one draw")
    }
}

/// Builds the object for one draw: `p = r_net sqrt(u)`, orientation `alpha`.
pub fn sample_object(draw: UniformDraw, length: f64, r_net: f64) -> Result<SegmentObject> {
    object_from_params(draw.u, draw.alpha, length, r_net)
}

/// Tx and Rx strictly on the same side of the object's infinite line.
pub fn check_event1(cfg: &NetworkConfig, obj: &SegmentObject) -> bool {
    same_side(cfg.tx, cfg.rx, &obj.support_line())
}

/// Event 1 decided through the Tx-Rx line instead: the object's line meets it
/// outside the closed Tx-Rx box, or not at all. Agrees with [`check_event1`]
/// except on measure-zero ties.
pub fn check_event1_crossing(cfg: &NetworkConfig, obj: &SegmentObject) -> bool {
    let rotation = cfg.slope_rotation().unwrap_or(0.0);
    let (c, o) = (cfg.rotated(rotation), obj.rotated(rotation));
    let Ok(line) = line_through(c.tx, c.rx) else {
        return check_event1(cfg, obj);
    };
    match intersect_slope_polar(&line, &o.support_line()) {
        Ok(pt) => !within_bbox(pt, c.tx, c.rx),
        Err(_) => true,
    }
}

/// Mid-perpendicular of the (possibly rotated) Tx-Rx segment, reused across samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnellProbe {
    rotation: f64,
    mid_perp: SlopeLine,
}

impl SnellProbe {
    pub fn new(cfg: &NetworkConfig) -> Result<Self> {
        let rotation = cfg.slope_rotation()?;
        let rotated = cfg.rotated(rotation);
        Ok(Self {
            rotation,
            mid_perp: mid_perpendicular(rotated.tx, rotated.rx)?,
        })
    }

    /// Whether the mid-perpendicular meets the segment (closed endpoints).
    /// The object is rotated together with Tx/Rx when the slope needed conditioning.
    pub fn hits(&self, obj: &SegmentObject) -> bool {
        let rotated;
        let obj = if self.rotation == 0.0 {
            obj
        } else {
            rotated = obj.rotated(self.rotation);
            &rotated
        };
        match intersect_slope_polar(&self.mid_perp, &obj.support_line()) {
            Ok(pt) => within_bbox(pt, obj.end1, obj.end2),
            Err(_) => false,
        }
    }
}

/// The Tx-Rx mid-perpendicular crosses the segment.
pub fn check_event2(cfg: &NetworkConfig, obj: &SegmentObject) -> bool {
    SnellProbe::new(cfg).is_ok_and(|probe| probe.hits(obj))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventTriple {
    pub event1: bool,
    pub event2: bool,
    pub event3: bool,
}

impl EventTriple {
    pub fn new(event1: bool, event2: bool) -> Self {
        Self {
            event1,
            event2,
            event3: event1 && event2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub value: f64,
    pub std_err: f64,
    pub n: u64,
}

impl ProbabilityEstimate {
    /// Frequency `hits / n` with binomial standard error `sqrt(v(1-v)/n)`.
    pub fn from_counts(hits: u64, n: u64) -> Self {
        let value = hits as f64 / n as f64;
        Self {
            value,
            std_err: (value * (1.0 - value) / n as f64).sqrt(),
            n,
        }
    }
}

/// Raw per-event hit counts of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventCounts {
    pub event1: u64,
    pub event2: u64,
    pub event3: u64,
}

impl EventCounts {
    fn record(&mut self, t: EventTriple) {
        self.event1 += u64::from(t.event1);
        self.event2 += u64::from(t.event2);
        self.event3 += u64::from(t.event3);
    }

    fn merge(self, other: EventCounts) -> EventCounts {
        EventCounts {
            event1: self.event1 + other.event1,
            event2: self.event2 + other.event2,
            event3: self.event3 + other.event3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub e1: ProbabilityEstimate,
    pub e2: ProbabilityEstimate,
    pub e3: ProbabilityEstimate,
    pub counts: EventCounts,
}

fn count_range(
    cfg: &NetworkConfig,
    probe: &SnellProbe,
    length: f64,
    stream: SampleStream,
    range: Range<u64>,
) -> Result<EventCounts> {
    let mut counts = EventCounts::default();
    for draw in stream.draws(range) {
        let obj = sample_object(draw, length, cfg.r_net)?;
        counts.record(EventTriple::new(check_event1(cfg, &obj), probe.hits(&obj)));
    }
    Ok(counts)
}

/// Frequency estimates of Events 1-3 over `spec.n_samples` objects.
pub fn estimate(cfg: &NetworkConfig, length: f64, spec: &SampleSpec) -> Result<McReport> {
    spec.validate()?;
    if length <= 0.0 || !length.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "object length must be positive, got {length}"
        )));
    }
    let probe = SnellProbe::new(cfg)?;
    let stream = SampleStream::new(spec.seed);
    let n = spec.n_samples;
    let workers = (spec.workers as u64).min(n);
    let chunk = n.div_ceil(workers);
    let ranges: Vec<Range<u64>> = (0..workers)
        .map(|w| (w * chunk).min(n)..((w + 1) * chunk).min(n))
        .filter(|r| !r.is_empty())
        .collect();

    let counts = if ranges.len() == 1 {
        count_range(cfg, &probe, length, stream, 0..n)?
    } else {
        let probe = &probe;
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|r| scope.spawn(move || count_range(cfg, probe, length, stream, r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampling worker panicked"))
                .try_fold(EventCounts::default(), |acc, c| c.map(|c| acc.merge(c)))
        })?
    };

    Ok(McReport {
        e1: ProbabilityEstimate::from_counts(counts.event1, n),
        e2: ProbabilityEstimate::from_counts(counts.event2, n),
        e3: ProbabilityEstimate::from_counts(counts.event3, n),
        counts,
    })
}
