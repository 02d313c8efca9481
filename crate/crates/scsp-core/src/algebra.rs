//! The relation algebra driving propagation: basic and general relations
//! over point pairs, with converse, composition, intersection and
//! point-pair satisfaction.
//!
//! A general relation is a canonical disjunction: an optional equality atom
//! plus a sorted list of pairwise disjoint, non-mergeable sectors. The
//! equality atom is the only carrier of the `x = y` case; a sector relation
//! entails `x != y`.

use std::f64::consts::PI;
use std::fmt;

use crate::angle::{
    angular_distance, antipodal_overlap, direction_of, enclosing_hull, normalize as norm_angle,
    Angle, Hull, Point, Sector, DEFAULT_EPS_ANGLE, TAU,
};
use crate::config::Config;

/// Tolerance for treating two points as coincident.
pub const POSITION_EPS: f64 = 1e-9;

/// One disjunct of a general relation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasicRelation {
    /// The two points coincide.
    Equality,
    /// The located point lies in the cone rooted at the reference point;
    /// the sector spans at most half a turn.
    Sector(Sector),
}

impl BasicRelation {
    pub fn to_relation(&self) -> GeneralRelation {
        match self {
            BasicRelation::Equality => GeneralRelation::equality(),
            BasicRelation::Sector(s) => GeneralRelation::from_sector(*s),
        }
    }
}

/// A canonical disjunction of the equality atom and direction sectors.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralRelation {
    has_equality: bool,
    sectors: Vec<Sector>,
}

impl GeneralRelation {
    /// Canonicalize: merge overlapping or closed-touching sectors, collapse
    /// full coverage to the full sector, sort by lower bound.
    pub fn normalize(has_equality: bool, sectors: Vec<Sector>, eps: f64) -> GeneralRelation {
        let mut arcs: Vec<Sector> = Vec::new();
        let mut full = false;
        for s in sectors {
            if s.is_full() {
                full = true;
            } else {
                arcs.push(s);
            }
        }
        if !full {
            // Repeatedly merge any mergeable pair; counts are tiny.
            'merging: loop {
                for i in 0..arcs.len() {
                    for j in 0..arcs.len() {
                        if i == j {
                            continue;
                        }
                        if let Some(merged) = merge_arcs(&arcs[i], &arcs[j], eps) {
                            let (lo, hi) = (i.min(j), i.max(j));
                            arcs.remove(hi);
                            arcs.remove(lo);
                            match merged {
                                None => {
                                    full = true;
                                    break 'merging;
                                }
                                Some(m) => arcs.push(m),
                            }
                            continue 'merging;
                        }
                    }
                }
                break;
            }
        }
        if full {
            return GeneralRelation {
                has_equality,
                sectors: vec![Sector::full()],
            };
        }
        arcs.sort_by(|a, b| a.lo().radians().total_cmp(&b.lo().radians()));
        GeneralRelation {
            has_equality,
            sectors: arcs,
        }
    }

    pub fn empty() -> GeneralRelation {
        GeneralRelation {
            has_equality: false,
            sectors: Vec::new(),
        }
    }

    pub fn equality() -> GeneralRelation {
        GeneralRelation {
            has_equality: true,
            sectors: Vec::new(),
        }
    }

    pub fn from_sector(s: Sector) -> GeneralRelation {
        GeneralRelation {
            has_equality: false,
            sectors: vec![s],
        }
    }

    /// The no-knowledge relation: equality plus every direction.
    pub fn universal() -> GeneralRelation {
        GeneralRelation {
            has_equality: true,
            sectors: vec![Sector::full()],
        }
    }

    pub fn has_equality(&self) -> bool {
        self.has_equality
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn is_empty(&self) -> bool {
        !self.has_equality && self.sectors.is_empty()
    }

    pub fn is_universal(&self) -> bool {
        self.has_equality && self.sectors.len() == 1 && self.sectors[0].is_full()
    }

    /// A single disjunct: the equality atom alone, or one sector of span at
    /// most half a turn.
    pub fn is_basic(&self) -> bool {
        if self.has_equality {
            self.sectors.is_empty()
        } else {
            self.sectors.len() == 1 && self.sectors[0].is_basic(DEFAULT_EPS_ANGLE)
        }
    }

    /// Decompose into basic disjuncts: equality first, then sectors in
    /// canonical order, wide sectors split at their midpoint.
    pub fn basic_disjuncts(&self) -> Vec<BasicRelation> {
        let mut out = Vec::new();
        if self.has_equality {
            out.push(BasicRelation::Equality);
        }
        for s in &self.sectors {
            for piece in s.split_basic() {
                out.push(BasicRelation::Sector(piece));
            }
        }
        out
    }

    /// Number of basic disjuncts without materializing them.
    pub fn disjunct_count(&self) -> usize {
        self.basic_disjuncts().len()
    }

    /// Structural equality up to angle tolerance.
    pub fn approx_eq(&self, other: &GeneralRelation, eps: f64) -> bool {
        if self.has_equality != other.has_equality || self.sectors.len() != other.sectors.len() {
            return false;
        }
        self.sectors.iter().zip(&other.sectors).all(|(a, b)| {
            a.is_full() == b.is_full()
                && (a.is_full()
                    || (a.lo().approx_eq(b.lo(), eps)
                        && a.hi().approx_eq(b.hi(), eps)
                        && a.lo_closed() == b.lo_closed()
                        && a.hi_closed() == b.hi_closed()))
        })
    }

    /// True when every pair satisfying `self` also satisfies `other`.
    pub fn is_refinement_of(&self, other: &GeneralRelation, cfg: &Config) -> bool {
        intersect(self, other, cfg).approx_eq(self, cfg.eps_angle)
    }

    /// All sector endpoints, for endpoint-universe bookkeeping.
    pub fn endpoints(&self) -> Vec<Angle> {
        let mut out = Vec::new();
        for s in &self.sectors {
            if !s.is_full() {
                out.push(s.lo());
                out.push(s.hi());
            }
        }
        out
    }
}

impl fmt::Display for GeneralRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "empty");
        }
        let mut first = true;
        if self.has_equality {
            write!(f, "e")?;
            first = false;
        }
        for s in &self.sectors {
            if !first {
                write!(f, " | ")?;
            }
            write!(f, "{}", s)?;
            first = false;
        }
        Ok(())
    }
}

/// Merge two arcs when their union is a contiguous arc (overlap, or touch
/// with at least one closed bound at the touch point). Returns
/// `Some(None)` when the union covers the whole circle.
#[allow(clippy::option_option)]
fn merge_arcs(a: &Sector, b: &Sector, eps: f64) -> Option<Option<Sector>> {
    // Try absorbing b into the arc anchored at a.lo, then the symmetric case.
    for (x, y) in [(a, b), (b, a)] {
        let d = norm_angle(y.lo().radians() - x.lo().radians(), eps);
        let joins = if d <= eps {
            true
        } else if d < x.span() - eps {
            true
        } else if d <= x.span() + eps {
            // y starts where x ends.
            x.hi_closed() || y.lo_closed()
        } else {
            false
        };
        if !joins {
            continue;
        }
        let span = x.span().max(d + y.span());
        if span >= TAU - eps {
            return Some(None);
        }
        let lo_closed = if d <= eps {
            x.lo_closed() || y.lo_closed()
        } else {
            x.lo_closed()
        };
        let hi_closed = if x.span() > d + y.span() + eps {
            x.hi_closed()
        } else if x.span() >= d + y.span() - eps {
            x.hi_closed() || y.hi_closed()
        } else {
            y.hi_closed()
        };
        let lo = x.lo();
        let hi = lo.offset(span);
        return Some(Some(
            Sector::new(lo, hi, lo_closed, hi_closed).expect("merged arc is non-degenerate"),
        ));
    }
    None
}

/// Converse: equality is self-converse, every sector is replaced by its
/// antipode.
pub fn converse(r: &GeneralRelation, cfg: &Config) -> GeneralRelation {
    let sectors = r.sectors().iter().map(Sector::antipode).collect();
    GeneralRelation::normalize(r.has_equality(), sectors, cfg.eps_angle)
}

/// Composition of two basic relations.
///
/// Equality is the identity. For two sectors the result is the minimal
/// cyclic hull when it spans at most half a turn, with each result bound
/// closed exactly when both operand bounds on that side are closed;
/// otherwise no direction can be ruled out and the result is universal.
/// The equality atom is added when some direction of the left operand has
/// its antipode in the right one (the extreme points may then coincide).
pub fn compose_basic(r: &BasicRelation, s: &BasicRelation, cfg: &Config) -> GeneralRelation {
    match (r, s) {
        (BasicRelation::Equality, other) => other.to_relation(),
        (other, BasicRelation::Equality) => other.to_relation(),
        (BasicRelation::Sector(a), BasicRelation::Sector(b)) => {
            let eps = cfg.eps_angle;
            let eq = cfg.compose_emit_equality && antipodal_overlap(a, b, eps);
            match enclosing_hull(a, b, eps) {
                Hull::Full => GeneralRelation::universal(),
                Hull::Arc { lo, span } => {
                    if span > PI + eps {
                        return GeneralRelation::universal();
                    }
                    // The hull-span test subsumes the chained-bound form of
                    // the universal condition.
                    debug_assert!(!chained_bound_universal_condition(a, b, eps));
                    let sector = Sector::new(
                        lo,
                        lo.offset(span),
                        a.lo_closed() && b.lo_closed(),
                        a.hi_closed() && b.hi_closed(),
                    )
                    .expect("hull of non-empty sectors");
                    GeneralRelation::normalize(eq, vec![sector], eps)
                }
            }
        }
    }
}

/// The universal-result condition as a pair of cyclic inequalities on the
/// operand bounds; subsumed by the hull-span test and kept for
/// cross-checking.
pub(crate) fn chained_bound_universal_condition(a: &Sector, b: &Sector, eps: f64) -> bool {
    let d1 = angular_distance(a.hi(), b.lo());
    let d2 = angular_distance(a.hi(), b.hi());
    d1 > eps && d1 < PI - eps && d2 > PI + eps
}

/// Composition of general relations: wide sectors are split into basic
/// pieces, then the result is the normalized union of pairwise basic
/// compositions.
pub fn compose(r: &GeneralRelation, s: &GeneralRelation, cfg: &Config) -> GeneralRelation {
    if r.is_empty() || s.is_empty() {
        return GeneralRelation::empty();
    }
    if r.is_universal() || s.is_universal() {
        return GeneralRelation::universal();
    }
    let mut eq = r.has_equality() && s.has_equality();
    let mut sectors: Vec<Sector> = Vec::new();
    if r.has_equality() {
        sectors.extend_from_slice(s.sectors());
    }
    if s.has_equality() {
        sectors.extend_from_slice(r.sectors());
    }
    let pieces_r: Vec<Sector> = r.sectors().iter().flat_map(|x| x.split_basic()).collect();
    let pieces_s: Vec<Sector> = s.sectors().iter().flat_map(|x| x.split_basic()).collect();
    for a in &pieces_r {
        for b in &pieces_s {
            let part = compose_basic(
                &BasicRelation::Sector(*a),
                &BasicRelation::Sector(*b),
                cfg,
            );
            eq |= part.has_equality();
            sectors.extend_from_slice(part.sectors());
        }
    }
    GeneralRelation::normalize(eq, sectors, cfg.eps_angle)
}

/// Intersection of two basic relations.
///
/// `e` meets `e` in `e`. `e` meets a closed sector of positive span in `e`
/// (the closed cone reaches its apex) and anything else in the empty
/// relation; a single closed direction is a strict ray and excludes the
/// apex. Two sectors intersect as cyclic intervals, yielding up to two
/// components.
pub fn intersect_basic(r: &BasicRelation, s: &BasicRelation, cfg: &Config) -> GeneralRelation {
    match (r, s) {
        (BasicRelation::Equality, BasicRelation::Equality) => GeneralRelation::equality(),
        (BasicRelation::Equality, BasicRelation::Sector(b))
        | (BasicRelation::Sector(b), BasicRelation::Equality) => {
            if b.lo_closed() && b.hi_closed() && !b.is_singleton() {
                GeneralRelation::equality()
            } else {
                GeneralRelation::empty()
            }
        }
        (BasicRelation::Sector(a), BasicRelation::Sector(b)) => {
            GeneralRelation::normalize(false, a.intersect(b, cfg.eps_angle), cfg.eps_angle)
        }
    }
}

/// Intersection of general relations: the equality flags conjoin and the
/// sector lists intersect pairwise.
pub fn intersect(r: &GeneralRelation, s: &GeneralRelation, cfg: &Config) -> GeneralRelation {
    let eq = r.has_equality() && s.has_equality();
    let mut sectors = Vec::new();
    for a in r.sectors() {
        for b in s.sectors() {
            sectors.extend(a.intersect(b, cfg.eps_angle));
        }
    }
    GeneralRelation::normalize(eq, sectors, cfg.eps_angle)
}

/// Point-pair satisfaction: `r(located, reference)` holds when the points
/// coincide and the relation carries equality, or when the direction of
/// the vector from reference to located lies in some sector.
pub fn sat(r: &GeneralRelation, located: Point, reference: Point, cfg: &Config) -> bool {
    match direction_of(located, reference, POSITION_EPS) {
        None => r.has_equality(),
        Some(theta) => r
            .sectors()
            .iter()
            .any(|s| s.contains(theta, cfg.eps_angle)),
    }
}
