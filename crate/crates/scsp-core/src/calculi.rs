//! The two qualitative calculi of cardinal directions: cone-shaped (eight
//! equal sectors of width pi/4) and projection-based (four axis rays and
//! four open quadrants), each extended with an equality atom.
//!
//! Composition tables are not hand-entered: they are derived from the
//! quantitative sector composition by collecting every atom whose region
//! meets the set of realizable directions, and cached on first use.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::angle::{
    antipodal_overlap, direction_of, enclosing_hull, normalize, Angle, Hull, Point, Sector, TAU,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Calculus {
    ConeShaped,
    ProjectionBased,
}

impl Calculus {
    pub fn tag(&self) -> &'static str {
        match self {
            Calculus::ConeShaped => "cs",
            Calculus::ProjectionBased => "pb",
        }
    }
}

impl fmt::Display for Calculus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The nine atom names shared by both calculi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Direction {
    No = 0,
    NE = 1,
    Ea = 2,
    SE = 3,
    So = 4,
    SW = 5,
    We = 6,
    NW = 7,
    Eq = 8,
}

pub const ALL_DIRECTIONS: [Direction; 9] = [
    Direction::No,
    Direction::NE,
    Direction::Ea,
    Direction::SE,
    Direction::So,
    Direction::SW,
    Direction::We,
    Direction::NW,
    Direction::Eq,
];

/// The eight directional atoms in anticlockwise order starting due east.
const CCW_CYCLE: [Direction; 8] = [
    Direction::Ea,
    Direction::NE,
    Direction::No,
    Direction::NW,
    Direction::We,
    Direction::SW,
    Direction::So,
    Direction::SE,
];

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::No => "No",
            Direction::NE => "NE",
            Direction::Ea => "Ea",
            Direction::SE => "SE",
            Direction::So => "So",
            Direction::SW => "SW",
            Direction::We => "We",
            Direction::NW => "NW",
            Direction::Eq => "Eq",
        }
    }

    /// The atom whose region is the antipode of this one. Identity on `Eq`.
    pub fn converse(&self) -> Direction {
        match self {
            Direction::No => Direction::So,
            Direction::NE => Direction::SW,
            Direction::Ea => Direction::We,
            Direction::SE => Direction::NW,
            Direction::So => Direction::No,
            Direction::SW => Direction::NE,
            Direction::We => Direction::Ea,
            Direction::NW => Direction::SE,
            Direction::Eq => Direction::Eq,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "No" => Ok(Direction::No),
            "NE" => Ok(Direction::NE),
            "Ea" => Ok(Direction::Ea),
            "SE" => Ok(Direction::SE),
            "So" => Ok(Direction::So),
            "SW" => Ok(Direction::SW),
            "We" => Ok(Direction::We),
            "NW" => Ok(Direction::NW),
            "Eq" => Ok(Direction::Eq),
            _ => Err(()),
        }
    }
}

/// A calculus atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub calculus: Calculus,
    pub name: Direction,
}

impl Atom {
    pub fn new(calculus: Calculus, name: Direction) -> Atom {
        Atom { calculus, name }
    }

    pub fn converse(&self) -> Atom {
        Atom::new(self.calculus, self.name.converse())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.name, self.calculus)
    }
}

/// Sector bounds of each directional atom, in units of pi/8.
fn eighth_bounds(calculus: Calculus, dir: Direction) -> Option<(u32, u32)> {
    use Direction::*;
    let b = match calculus {
        Calculus::ConeShaped => match dir {
            No => (3, 5),
            NE => (1, 3),
            Ea => (15, 1),
            SE => (13, 15),
            So => (11, 13),
            SW => (9, 11),
            We => (7, 9),
            NW => (5, 7),
            Eq => return None,
        },
        Calculus::ProjectionBased => match dir {
            No => (4, 4),
            NE => (0, 4),
            Ea => (0, 0),
            SE => (12, 0),
            So => (12, 12),
            SW => (8, 12),
            We => (8, 8),
            NW => (4, 8),
            Eq => return None,
        },
    };
    Some(b)
}

fn eighth(k: u32) -> Angle {
    Angle::new(k as f64 * PI / 8.0)
}

/// Result of translating a qualitative atom to the quantitative layer.
#[derive(Clone, Copy, Debug)]
pub enum TranslatedAtom {
    /// The equality atom.
    Equality,
    /// A direction sector.
    Arc(Sector),
    /// A zero-span sector with an open bound: inconsistent.
    Empty,
}

/// Translate an atom with the requested bound closedness.
pub fn atom_to_sector(atom: Atom, lo_closed: bool, hi_closed: bool) -> TranslatedAtom {
    match eighth_bounds(atom.calculus, atom.name) {
        None => TranslatedAtom::Equality,
        Some((klo, khi)) => {
            match Sector::new(eighth(klo), eighth(khi), lo_closed, hi_closed) {
                Some(s) => TranslatedAtom::Arc(s),
                None => TranslatedAtom::Empty,
            }
        }
    }
}

/// The region an atom denotes when classifying point pairs: a fixed
/// closedness convention under which the eight directional regions tile the
/// circle. Cone-shaped sectors take their lower bound and exclude the upper
/// one; projection-based rays are single closed directions and quadrants are
/// open on both sides.
pub fn tiling_region(atom: Atom) -> TranslatedAtom {
    match eighth_bounds(atom.calculus, atom.name) {
        None => TranslatedAtom::Equality,
        Some((klo, khi)) => {
            let (lc, hc) = match atom.calculus {
                Calculus::ConeShaped => (true, false),
                Calculus::ProjectionBased => {
                    if klo == khi {
                        (true, true)
                    } else {
                        (false, false)
                    }
                }
            };
            TranslatedAtom::Arc(
                Sector::new(eighth(klo), eighth(khi), lc, hc).expect("tiling region"),
            )
        }
    }
}

fn tiling_sector(calculus: Calculus, dir: Direction) -> Sector {
    match tiling_region(Atom::new(calculus, dir)) {
        TranslatedAtom::Arc(s) => s,
        _ => unreachable!("directional atoms have sector regions"),
    }
}

/// The unique atom holding for `(located, reference)` under the tiling
/// convention. The first argument is the located object.
pub fn classify(calculus: Calculus, located: Point, reference: Point, eps: f64) -> Direction {
    let theta = match direction_of(located, reference, eps) {
        None => return Direction::Eq,
        Some(t) => t,
    };
    match calculus {
        Calculus::ConeShaped => {
            let shifted = normalize(theta.radians() + PI / 8.0, 0.0);
            let idx = (shifted / (PI / 4.0)).floor() as usize % 8;
            CCW_CYCLE[idx]
        }
        Calculus::ProjectionBased => {
            let dx = located.x - reference.x;
            let dy = located.y - reference.y;
            let sx = if dx > eps {
                1
            } else if dx < -eps {
                -1
            } else {
                0
            };
            let sy = if dy > eps {
                1
            } else if dy < -eps {
                -1
            } else {
                0
            };
            match (sx, sy) {
                (1, 0) => Direction::Ea,
                (1, 1) => Direction::NE,
                (0, 1) => Direction::No,
                (-1, 1) => Direction::NW,
                (-1, 0) => Direction::We,
                (-1, -1) => Direction::SW,
                (0, -1) => Direction::So,
                (1, -1) => Direction::SE,
                _ => Direction::Eq,
            }
        }
    }
}

/// The qualitative abstraction of a flagged atom constraint: the set of
/// tiling atoms its translated sector meets. A closed bound sitting on a
/// neighbouring region makes that neighbour leak in; a zero-span atom with
/// an open bound abstracts to the empty (inconsistent) set.
pub fn flagged_atoms(atom: Atom, lo_closed: bool, hi_closed: bool) -> AtomSet {
    match atom_to_sector(atom, lo_closed, hi_closed) {
        TranslatedAtom::Equality => AtomSet::singleton(Direction::Eq),
        TranslatedAtom::Empty => AtomSet::empty(),
        TranslatedAtom::Arc(sector) => {
            let mut out = AtomSet::empty();
            for dir in CCW_CYCLE {
                let region = tiling_sector(atom.calculus, dir);
                if region.overlaps(&sector, crate::angle::DEFAULT_EPS_ANGLE) {
                    out.insert(dir);
                }
            }
            out
        }
    }
}

/// A set of atom names, backed by a nine-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AtomSet(u16);

impl AtomSet {
    pub const fn empty() -> AtomSet {
        AtomSet(0)
    }

    pub const fn all() -> AtomSet {
        AtomSet(0x1FF)
    }

    pub fn singleton(d: Direction) -> AtomSet {
        AtomSet(1 << d as u16)
    }

    pub fn insert(&mut self, d: Direction) {
        self.0 |= 1 << d as u16;
    }

    pub fn contains(&self, d: Direction) -> bool {
        self.0 & (1 << d as u16) != 0
    }

    pub fn union(&self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 | other.0)
    }

    pub fn intersect(&self, other: AtomSet) -> AtomSet {
        AtomSet(self.0 & other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(&self, other: AtomSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = Direction> + '_ {
        ALL_DIRECTIONS.into_iter().filter(|d| self.contains(*d))
    }

    /// Atom-wise converse of the whole set.
    pub fn converse(&self) -> AtomSet {
        let mut out = AtomSet::empty();
        for d in self.iter() {
            out.insert(d.converse());
        }
        out
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self)
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(|d| d.name()).collect();
        f.write_str(&names.join(","))
    }
}

impl FromIterator<Direction> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Direction>>(iter: I) -> AtomSet {
        let mut out = AtomSet::empty();
        for d in iter {
            out.insert(d);
        }
        out
    }
}

/// A disjunction of atoms of one calculus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QualitativeRelation {
    pub calculus: Calculus,
    pub atoms: AtomSet,
}

impl QualitativeRelation {
    pub fn new(calculus: Calculus, atoms: AtomSet) -> QualitativeRelation {
        QualitativeRelation { calculus, atoms }
    }

    pub fn universal(calculus: Calculus) -> QualitativeRelation {
        QualitativeRelation::new(calculus, AtomSet::all())
    }

    pub fn converse(&self) -> QualitativeRelation {
        QualitativeRelation::new(self.calculus, self.atoms.converse())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CalculiError {
    #[error("calculus mismatch: {left} vs {right}")]
    CalculusMismatch { left: Calculus, right: Calculus },
}

/// Union of derived table entries over all atom pairs.
pub fn qualitative_compose(
    r: &QualitativeRelation,
    s: &QualitativeRelation,
) -> Result<QualitativeRelation, CalculiError> {
    if r.calculus != s.calculus {
        return Err(CalculiError::CalculusMismatch {
            left: r.calculus,
            right: s.calculus,
        });
    }
    let table = composition_table(r.calculus);
    let mut out = AtomSet::empty();
    for a in r.atoms.iter() {
        for b in s.atoms.iter() {
            out = out.union(table.entry(a, b));
        }
    }
    Ok(QualitativeRelation::new(r.calculus, out))
}

/// The derived 9x9 composition table of one calculus.
pub struct CompositionTable {
    pub calculus: Calculus,
    entries: [[AtomSet; 9]; 9],
}

impl CompositionTable {
    pub fn entry(&self, r: Direction, s: Direction) -> AtomSet {
        self.entries[r as usize][s as usize]
    }

    fn derive(calculus: Calculus) -> CompositionTable {
        let eps = crate::angle::DEFAULT_EPS_ANGLE;
        let mut entries = [[AtomSet::empty(); 9]; 9];
        for r in ALL_DIRECTIONS {
            for s in ALL_DIRECTIONS {
                entries[r as usize][s as usize] = derive_entry(calculus, r, s, eps);
            }
        }
        CompositionTable { calculus, entries }
    }

    /// Plain-text rendering: one row per left operand, `*` for the
    /// universal entry.
    pub fn render(&self) -> String {
        let cell = |set: AtomSet| -> String {
            if set == AtomSet::all() {
                "*".to_string()
            } else if set.is_empty() {
                "-".to_string()
            } else {
                set.to_string()
            }
        };
        let mut width = 0;
        for r in ALL_DIRECTIONS {
            for s in ALL_DIRECTIONS {
                width = width.max(cell(self.entry(r, s)).len());
            }
        }
        let mut out = format!("composition table ({})\n", self.calculus);
        out.push_str(&format!("{:>4}", ""));
        for s in ALL_DIRECTIONS {
            out.push_str(&format!(" {:>w$}", s.name(), w = width));
        }
        out.push('\n');
        for r in ALL_DIRECTIONS {
            out.push_str(&format!("{:>4}", r.name()));
            for s in ALL_DIRECTIONS {
                out.push_str(&format!(" {:>w$}", cell(self.entry(r, s)), w = width));
            }
            out.push('\n');
        }
        out
    }
}

/// Directions realizable as the sum of two positive-length vectors whose
/// directions range over `r` and `s`, plus whether the zero sum (equality of
/// the extreme points) is realizable.
///
/// For sectors of combined hull at most half a turn the realizable set is
/// the hull interior together with each hull bound that is attained, either
/// by both operands at the same angle or by an antipodal pair of unequal
/// lengths. Opposite singletons only realize the two directions themselves.
fn realizable_composition(r: &Sector, s: &Sector, eps: f64) -> (Vec<Sector>, bool) {
    let eq = antipodal_overlap(r, s, eps);
    if r.is_singleton() && s.is_singleton() && r.lo().approx_eq(s.lo().opposite(), eps) {
        return (vec![*r, *s], eq);
    }
    match enclosing_hull(r, s, eps) {
        Hull::Full => (vec![Sector::full()], eq),
        Hull::Arc { lo, span } => {
            if span > PI + eps {
                return (vec![Sector::full()], eq);
            }
            let hi = lo.offset(span);
            let attained = |a: Angle| {
                (r.contains(a, eps) && s.contains(a, eps))
                    || (r.contains(a, eps) && s.contains(a.opposite(), eps))
                    || (r.contains(a.opposite(), eps) && s.contains(a, eps))
            };
            match Sector::new(lo, hi, attained(lo), attained(hi)) {
                Some(sec) => (vec![sec], eq),
                None => (Vec::new(), eq),
            }
        }
    }
}

fn derive_entry(calculus: Calculus, r: Direction, s: Direction, eps: f64) -> AtomSet {
    if r == Direction::Eq {
        return AtomSet::singleton(s);
    }
    if s == Direction::Eq {
        return AtomSet::singleton(r);
    }
    let rr = tiling_sector(calculus, r);
    let ss = tiling_sector(calculus, s);
    let (pieces, eq) = realizable_composition(&rr, &ss, eps);
    let mut out = AtomSet::empty();
    if eq {
        out.insert(Direction::Eq);
    }
    for t in CCW_CYCLE {
        let region = tiling_sector(calculus, t);
        if pieces.iter().any(|p| p.overlaps(&region, eps)) {
            out.insert(t);
        }
    }
    out
}

static CS_TABLE: OnceLock<CompositionTable> = OnceLock::new();
static PB_TABLE: OnceLock<CompositionTable> = OnceLock::new();

/// The cached derived composition table of a calculus.
pub fn composition_table(calculus: Calculus) -> &'static CompositionTable {
    match calculus {
        Calculus::ConeShaped => CS_TABLE.get_or_init(|| CompositionTable::derive(calculus)),
        Calculus::ProjectionBased => PB_TABLE.get_or_init(|| CompositionTable::derive(calculus)),
    }
}

/// Iterate the full circle in small steps, for partition checks.
pub fn circle_samples(n: usize) -> impl Iterator<Item = Angle> {
    (0..n).map(move |i| Angle::new(i as f64 * TAU / n as f64))
}
