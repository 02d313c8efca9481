//! Angles on `[0, 2pi)` and cyclic sectors with independently open or
//! closed bounds.
//!
//! A [`Sector`] denotes a set of directions: the anticlockwise walk from
//! `lo` to `hi`. When `lo > hi` numerically the sector wraps through zero.
//! A zero-span sector is a single direction and is only representable with
//! both bounds closed; the empty set of directions is never represented by
//! degenerate bounds (constructors return `None` instead).

use std::f64::consts::PI;
use std::fmt;

pub const TAU: f64 = 2.0 * PI;

/// Default tolerance for angle comparisons.
pub const DEFAULT_EPS_ANGLE: f64 = 1e-9;

/// Normalize an angle to `[0, 2pi)`, snapping values within `eps` below a
/// full turn to zero so wraparound endpoints stay stable.
pub fn normalize(radians: f64, eps: f64) -> f64 {
    debug_assert!(radians.is_finite());
    let v = radians.rem_euclid(TAU);
    if TAU - v < eps {
        0.0
    } else {
        v
    }
}

/// An angle in radians, kept normalized to `[0, 2pi)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Angle {
        Angle(normalize(radians, DEFAULT_EPS_ANGLE))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// The angle shifted by half a turn.
    pub fn opposite(self) -> Angle {
        Angle::new(self.0 + PI)
    }

    pub fn offset(self, delta: f64) -> Angle {
        Angle::new(self.0 + delta)
    }

    /// Cyclic equality: true when the arc between the two angles is at most
    /// `eps` in either direction.
    pub fn approx_eq(self, other: Angle, eps: f64) -> bool {
        let d = (self.0 - other.0).rem_euclid(TAU);
        d <= eps || TAU - d <= eps
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

/// Length of the anticlockwise walk from `a` to `b`, in `[0, 2pi)`.
pub fn angular_distance(a: Angle, b: Angle) -> f64 {
    normalize(b.radians() - a.radians(), DEFAULT_EPS_ANGLE)
}

/// A cyclic interval of directions.
///
/// `Sector::full()` is the whole circle; every other value is an arc from
/// `lo` anticlockwise to `hi` with per-bound closedness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    lo: Angle,
    hi: Angle,
    lo_closed: bool,
    hi_closed: bool,
    full: bool,
}

impl Sector {
    /// Build an arc sector. Returns `None` for the inconsistent case of a
    /// zero-span sector with an open bound.
    pub fn new(lo: Angle, hi: Angle, lo_closed: bool, hi_closed: bool) -> Option<Sector> {
        let span = angular_distance(lo, hi);
        if span <= DEFAULT_EPS_ANGLE {
            if lo_closed && hi_closed {
                Some(Sector {
                    lo,
                    hi: lo,
                    lo_closed: true,
                    hi_closed: true,
                    full: false,
                })
            } else {
                None
            }
        } else {
            Some(Sector {
                lo,
                hi,
                lo_closed,
                hi_closed,
                full: false,
            })
        }
    }

    /// The sector containing every direction.
    pub fn full() -> Sector {
        Sector {
            lo: Angle::new(0.0),
            hi: Angle::new(0.0),
            lo_closed: true,
            hi_closed: true,
            full: true,
        }
    }

    /// A single direction.
    pub fn singleton(a: Angle) -> Sector {
        Sector {
            lo: a,
            hi: a,
            lo_closed: true,
            hi_closed: true,
            full: false,
        }
    }

    pub fn lo(&self) -> Angle {
        self.lo
    }

    pub fn hi(&self) -> Angle {
        self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    /// Anticlockwise extent. Zero for a singleton, `2pi` for the full circle.
    pub fn span(&self) -> f64 {
        if self.full {
            TAU
        } else {
            angular_distance(self.lo, self.hi)
        }
    }

    pub fn is_singleton(&self) -> bool {
        !self.full && self.span() <= DEFAULT_EPS_ANGLE
    }

    /// Usable as a basic relation: extent at most half a turn.
    pub fn is_basic(&self, eps: f64) -> bool {
        !self.full && self.span() <= PI + eps
    }

    /// Membership with tolerance `eps` on bound comparison: an angle within
    /// `eps` of a bound is treated as sitting on it and the bound's
    /// closedness decides.
    pub fn contains(&self, a: Angle, eps: f64) -> bool {
        if self.full {
            return true;
        }
        let d = normalize(a.radians() - self.lo.radians(), eps);
        let span = self.span();
        if d <= eps {
            return self.lo_closed;
        }
        if (d - span).abs() <= eps {
            return self.hi_closed;
        }
        d < span
    }

    /// Both bounds shifted by half a turn; closedness and span preserved.
    pub fn antipode(&self) -> Sector {
        if self.full {
            return *self;
        }
        Sector {
            lo: self.lo.opposite(),
            hi: self.hi.opposite(),
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
            full: false,
        }
    }

    /// Intersection as a set of directions: zero, one or two arcs.
    pub fn intersect(&self, other: &Sector, eps: f64) -> Vec<Sector> {
        if self.full {
            return vec![*other];
        }
        if other.full {
            return vec![*self];
        }
        // Work in this sector's frame: self is [0, s1], other starts at its
        // cyclic offset and may wrap past 2pi, so try the window shifted by
        // -2pi as well.
        let s1 = self.span();
        let off = normalize(other.lo.radians() - self.lo.radians(), eps);
        let s2 = other.span();
        let mut out = Vec::new();
        for shift in [0.0, -TAU] {
            let b_lo = off + shift;
            let b_hi = b_lo + s2;
            let (lo, lo_closed) = if b_lo > eps {
                (b_lo, other.lo_closed)
            } else if b_lo >= -eps {
                (0.0, self.lo_closed && other.lo_closed)
            } else {
                (0.0, self.lo_closed)
            };
            let (hi, hi_closed) = if b_hi < s1 - eps {
                (b_hi, other.hi_closed)
            } else if b_hi <= s1 + eps {
                (s1, self.hi_closed && other.hi_closed)
            } else {
                (s1, self.hi_closed)
            };
            if hi < lo - eps {
                continue;
            }
            if hi - lo <= eps {
                if lo_closed && hi_closed {
                    out.push(Sector::singleton(self.lo.offset(lo)));
                }
                continue;
            }
            if let Some(s) = Sector::new(
                self.lo.offset(lo),
                self.lo.offset(hi),
                lo_closed,
                hi_closed,
            ) {
                out.push(s);
            }
        }
        // The two windows can rediscover the same single point.
        if out.len() == 2
            && out[0].is_singleton()
            && out[1].is_singleton()
            && out[0].lo.approx_eq(out[1].lo, eps)
        {
            out.pop();
        }
        out
    }

    /// True when the two sectors share at least one direction.
    pub fn overlaps(&self, other: &Sector, eps: f64) -> bool {
        !self.intersect(other, eps).is_empty()
    }

    /// Split into pieces of span at most half a turn, preserving the union.
    pub fn split_basic(&self) -> Vec<Sector> {
        if self.full {
            let mid = Angle::new(PI);
            let zero = Angle::new(0.0);
            return vec![
                Sector::new(zero, mid, true, true).expect("half circle"),
                Sector::new(mid, zero, false, false).expect("half circle"),
            ];
        }
        let span = self.span();
        if span <= PI + DEFAULT_EPS_ANGLE {
            return vec![*self];
        }
        let mid = self.lo.offset(span / 2.0);
        vec![
            Sector::new(self.lo, mid, self.lo_closed, true).expect("lower half"),
            Sector::new(mid, self.hi, false, self.hi_closed).expect("upper half"),
        ]
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.full {
            return write!(f, "full");
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

/// A point of the 2D plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    pub fn approx_eq(&self, other: &Point, eps: f64) -> bool {
        (self.x - other.x).abs() <= eps && (self.y - other.y).abs() <= eps
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Direction of the vector pointing from `reference` to `located`, measured
/// anticlockwise from the positive x-axis. `None` for coincident points.
pub fn direction_of(located: Point, reference: Point, eps: f64) -> Option<Angle> {
    let dx = located.x - reference.x;
    let dy = located.y - reference.y;
    if dx.abs() <= eps && dy.abs() <= eps {
        None
    } else {
        Some(Angle::new(dy.atan2(dx)))
    }
}

/// Minimal cyclic sector enclosing the union of two sectors.
#[derive(Clone, Copy, Debug)]
pub enum Hull {
    /// No arc of span < 2pi contains both operands.
    Full,
    /// The enclosing arc, anchored at one operand's lower bound.
    Arc { lo: Angle, span: f64 },
}

/// Compute the minimal enclosing arc of `a` and `b`. Ties between the two
/// candidate anchors resolve to `a`'s side for determinism.
pub fn enclosing_hull(a: &Sector, b: &Sector, eps: f64) -> Hull {
    if a.is_full() || b.is_full() {
        return Hull::Full;
    }
    let d_ab = normalize(b.lo().radians() - a.lo().radians(), eps);
    let span_a = a.span().max(d_ab + b.span());
    let d_ba = normalize(a.lo().radians() - b.lo().radians(), eps);
    let span_b = b.span().max(d_ba + a.span());
    let (lo, span) = if span_a <= span_b + eps {
        (a.lo(), span_a)
    } else {
        (b.lo(), span_b)
    };
    if span >= TAU - eps {
        Hull::Full
    } else {
        Hull::Arc { lo, span }
    }
}

/// True when some direction of `a` has its antipode in `b`.
pub fn antipodal_overlap(a: &Sector, b: &Sector, eps: f64) -> bool {
    a.antipode().overlaps(b, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = DEFAULT_EPS_ANGLE;

    fn sector(lo: f64, hi: f64, lc: bool, hc: bool) -> Sector {
        Sector::new(Angle::new(lo), Angle::new(hi), lc, hc).expect("non-empty sector")
    }

    #[test]
    fn angular_distance_cases() {
        let d = angular_distance(Angle::new(PI / 4.0), Angle::new(3.0 * PI / 4.0));
        assert!((d - PI / 2.0).abs() < EPS);
        let d = angular_distance(Angle::new(3.0 * PI / 2.0), Angle::new(PI / 8.0));
        assert!((d - 5.0 * PI / 8.0).abs() < EPS);
        let a = Angle::new(1.234);
        assert_eq!(angular_distance(a, a), 0.0);
    }

    #[test]
    fn distance_sum_is_zero_or_full_turn() {
        let samples = [0.0, 0.3, PI / 2.0, PI, 4.0, 6.0];
        for &x in &samples {
            for &y in &samples {
                let s = angular_distance(Angle::new(x), Angle::new(y))
                    + angular_distance(Angle::new(y), Angle::new(x));
                assert!(s.abs() < 1e-8 || (s - TAU).abs() < 1e-8, "sum was {s}");
            }
        }
    }

    #[test]
    fn contains_respects_closedness() {
        let s = sector(0.0, PI / 2.0, true, true);
        assert!(s.contains(Angle::new(PI / 4.0), EPS));
        assert!(s.contains(Angle::new(0.0), EPS));
        let half_open = sector(0.0, PI / 2.0, true, false);
        assert!(!half_open.contains(Angle::new(PI / 2.0), EPS));
        let wrap = sector(3.0 * PI / 2.0, PI / 8.0, true, true);
        assert!(wrap.contains(Angle::new(0.0), EPS));
        assert!(wrap.contains(Angle::new(7.0 * PI / 4.0), EPS));
        assert!(!wrap.contains(Angle::new(PI), EPS));
    }

    #[test]
    fn zero_span_needs_closed_bounds() {
        let a = Angle::new(PI / 2.0);
        assert!(Sector::new(a, a, true, false).is_none());
        assert!(Sector::new(a, a, false, true).is_none());
        assert!(Sector::new(a, a, false, false).is_none());
        let s = Sector::new(a, a, true, true).unwrap();
        assert!(s.is_singleton());
        assert!(s.contains(a, EPS));
    }

    #[test]
    fn antipode_shifts_by_half_turn() {
        let s = sector(0.0, PI / 2.0, true, true);
        let t = s.antipode();
        assert!(t.lo().approx_eq(Angle::new(PI), EPS));
        assert!(t.hi().approx_eq(Angle::new(3.0 * PI / 2.0), EPS));
        let wrap = sector(3.0 * PI / 2.0, PI / 8.0, true, false);
        let t = wrap.antipode();
        assert!(t.lo().approx_eq(Angle::new(PI / 2.0), EPS));
        assert!(t.hi().approx_eq(Angle::new(9.0 * PI / 8.0), EPS));
        assert!(!t.hi_closed());
    }

    #[test]
    fn antipode_is_involution_and_preserves_span() {
        for &(lo, hi) in &[(0.0, 1.0), (5.0, 1.0), (3.1, 3.1)] {
            let s = sector(lo, hi, true, true);
            let back = s.antipode().antipode();
            assert!(back.lo().approx_eq(s.lo(), 1e-8));
            assert!(back.hi().approx_eq(s.hi(), 1e-8));
            assert!((s.span() - s.antipode().span()).abs() < 1e-8);
        }
    }

    #[test]
    fn membership_commutes_with_antipode() {
        let s = sector(5.9, 0.7, true, false);
        for i in 0..64 {
            let a = Angle::new(i as f64 * TAU / 64.0);
            assert_eq!(
                s.contains(a, EPS),
                s.antipode().contains(a.opposite(), EPS),
                "angle {}",
                a
            );
        }
    }

    #[test]
    fn intersect_shared_endpoint_takes_conjunction() {
        let a = sector(0.0, PI / 2.0, true, true);
        let b = sector(PI / 4.0, 3.0 * PI / 4.0, true, false);
        let out = a.intersect(&b, EPS);
        assert_eq!(out.len(), 1);
        let s = out[0];
        assert!(s.lo().approx_eq(Angle::new(PI / 4.0), EPS));
        assert!(s.hi().approx_eq(Angle::new(PI / 2.0), EPS));
        assert!(s.lo_closed() && s.hi_closed());
    }

    #[test]
    fn intersect_antipodal_half_circles_gives_two_points() {
        let a = sector(0.0, PI, true, true);
        let b = sector(PI, 0.0, true, true);
        let out = a.intersect(&b, EPS);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|s| s.is_singleton()));
        let mut angles: Vec<f64> = out.iter().map(|s| s.lo().radians()).collect();
        angles.sort_by(f64::total_cmp);
        assert!(angles[0].abs() < EPS);
        assert!((angles[1] - PI).abs() < EPS);
    }

    #[test]
    fn intersect_disjoint_is_empty() {
        let a = sector(0.0, PI / 4.0, true, true);
        let b = sector(PI, 5.0 * PI / 4.0, true, true);
        assert!(a.intersect(&b, EPS).is_empty());
        let touching_open = sector(PI / 4.0, PI / 2.0, false, true);
        assert!(a.intersect(&touching_open, EPS).is_empty());
    }

    #[test]
    fn hull_prefers_smaller_arc() {
        let a = sector(0.0, PI / 8.0, true, true);
        let b = sector(5.0 * PI / 4.0, 11.0 * PI / 8.0, true, true);
        match enclosing_hull(&a, &b, EPS) {
            Hull::Arc { lo, span } => {
                assert!(lo.approx_eq(Angle::new(5.0 * PI / 4.0), EPS));
                assert!((span - 7.0 * PI / 8.0).abs() < 1e-8);
            }
            Hull::Full => panic!("expected an arc"),
        }
    }

    #[test]
    fn split_keeps_union() {
        let s = sector(0.0, 3.0 * PI / 2.0, true, false);
        let parts = s.split_basic();
        assert_eq!(parts.len(), 2);
        for i in 0..128 {
            let a = Angle::new(i as f64 * TAU / 128.0);
            assert_eq!(
                s.contains(a, EPS),
                parts.iter().any(|p| p.contains(a, EPS)),
                "angle {}",
                a
            );
        }
        let full_parts = Sector::full().split_basic();
        for i in 0..128 {
            let a = Angle::new(i as f64 * TAU / 128.0 + 0.001);
            assert!(full_parts.iter().any(|p| p.contains(a, EPS)));
        }
    }

    #[test]
    fn antipodal_overlap_detects_opposite_directions() {
        let east = Sector::singleton(Angle::new(0.0));
        let west = Sector::singleton(Angle::new(PI));
        assert!(antipodal_overlap(&east, &west, EPS));
        assert!(!antipodal_overlap(&east, &east, EPS));
        let ne = sector(0.0, PI / 2.0, false, false);
        let sw = sector(PI, 3.0 * PI / 2.0, false, false);
        assert!(antipodal_overlap(&ne, &sw, EPS));
    }
}
