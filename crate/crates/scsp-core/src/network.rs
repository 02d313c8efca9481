//! Constraint networks: the quantitative n-by-n matrix of general
//! relations with path-consistency propagation, and the per-calculus
//! qualitative preprocessing layer.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::algebra::{compose, converse, intersect, GeneralRelation};
use crate::angle::{Angle, Sector};
use crate::calculi::{
    atom_to_sector, composition_table, flagged_atoms, tiling_region, Atom, AtomSet, Calculus,
    Direction, QualitativeRelation, TranslatedAtom,
};
use crate::config::Config;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("constraint relates variable {index} to itself")]
    SelfConstraint { index: usize },
}

/// An n-by-n constraint matrix of general relations.
///
/// Invariants: every diagonal entry is the equality relation and
/// `entry(i, j)` is always the converse of `entry(j, i)`.
#[derive(Clone, Debug)]
pub struct Network {
    names: Vec<String>,
    entries: Vec<GeneralRelation>,
}

/// Outcome of path-consistency propagation.
#[derive(Clone, Debug, PartialEq)]
pub enum PcOutcome {
    /// The largest fixpoint refinement was reached with no empty entry.
    Stable,
    /// Propagation produced an empty entry; the network is inconsistent.
    Empty { i: usize, j: usize },
}

impl Network {
    /// All entries universal, diagonal pinned to equality.
    pub fn new(names: Vec<String>) -> Network {
        let n = names.len();
        let mut entries = vec![GeneralRelation::universal(); n * n];
        for i in 0..n {
            entries[i * n + i] = GeneralRelation::equality();
        }
        Network { names, entries }
    }

    pub fn with_size(n: usize) -> Network {
        Network::new((0..n).map(|i| format!("p{i}")).collect())
    }

    /// Build from a constraint list: entries start universal, each
    /// constraint is intersected in and mirrored as its converse.
    pub fn from_constraints(
        n: usize,
        constraints: &[(usize, usize, GeneralRelation)],
        cfg: &Config,
    ) -> Result<Network, NetworkError> {
        Self::from_named_constraints((0..n).map(|i| format!("p{i}")).collect(), constraints, cfg)
    }

    pub fn from_named_constraints(
        names: Vec<String>,
        constraints: &[(usize, usize, GeneralRelation)],
        cfg: &Config,
    ) -> Result<Network, NetworkError> {
        let mut net = Network::new(names);
        let n = net.n();
        for (i, j, r) in constraints {
            for idx in [i, j] {
                if *idx >= n {
                    return Err(NetworkError::IndexOutOfRange { index: *idx, n });
                }
            }
            if i == j {
                return Err(NetworkError::SelfConstraint { index: *i });
            }
            let refined = intersect(net.entry(*i, *j), r, cfg);
            net.set_entry(*i, *j, refined, cfg);
        }
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn entry(&self, i: usize, j: usize) -> &GeneralRelation {
        &self.entries[i * self.n() + j]
    }

    /// Store a relation on edge `(i, j)` and its converse on `(j, i)`.
    pub fn set_entry(&mut self, i: usize, j: usize, r: GeneralRelation, cfg: &Config) {
        let n = self.n();
        debug_assert!(i != j, "diagonal entries are fixed to equality");
        self.entries[j * n + i] = converse(&r, cfg);
        self.entries[i * n + j] = r;
    }

    /// The first empty off-diagonal entry, if any.
    pub fn empty_entry(&self) -> Option<(usize, usize)> {
        let n = self.n();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.entry(i, j).is_empty() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// All edges `(i, j)` with `i < j` whose entry is not basic.
    pub fn non_basic_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !self.entry(i, j).is_basic() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_basic_scenario(&self) -> bool {
        self.non_basic_edges().is_empty() && self.empty_entry().is_none()
    }

    /// Sector endpoints appearing anywhere in the matrix.
    pub fn endpoints(&self) -> Vec<Angle> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend(e.endpoints());
        }
        out
    }

    /// Queue-based path consistency: repeatedly refine
    /// `B_ij <- B_ij meet (B_ik o B_kj)` until stable or empty.
    ///
    /// Triangles whose composed pair contains a universal relation are
    /// skipped; composing with the universal relation cannot refine.
    /// Freshly computed sector endpoints within `eps_angle` of an existing
    /// one are unified to the earlier value so the endpoint universe stays
    /// finite under floating point.
    pub fn path_consistency(&mut self, cfg: &Config) -> PcOutcome {
        let n = self.n();
        if n < 3 {
            return match self.empty_entry() {
                Some((i, j)) => PcOutcome::Empty { i, j },
                None => PcOutcome::Stable,
            };
        }
        if let Some((i, j)) = self.empty_entry() {
            return PcOutcome::Empty { i, j };
        }
        let mut pool: Vec<f64> = Vec::new();
        for a in self.endpoints() {
            snap_to_pool(a, &mut pool, cfg.eps_angle);
        }
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        let mut queued = vec![false; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                queue.push_back((i, j));
                queued[i * n + j] = true;
            }
        }
        let mut guard = 0usize;
        while let Some((i, j)) = queue.pop_front() {
            queued[i * n + j] = false;
            guard += 1;
            assert!(
                guard < 1_000_000,
                "path consistency failed to stabilize; endpoint unification is broken"
            );
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                // (i, k) via j and (k, j) via i.
                let updates = [(i, k, i, j, j, k), (k, j, k, i, i, j)];
                for (ti, tj, ai, aj, bi, bj) in updates {
                    let left = self.entry(ai, aj);
                    let right = self.entry(bi, bj);
                    if left.is_universal() || right.is_universal() {
                        continue;
                    }
                    let composed = compose(left, right, cfg);
                    let current = self.entry(ti, tj);
                    let mut refined = intersect(current, &composed, cfg);
                    if refined.approx_eq(current, cfg.eps_angle) {
                        continue;
                    }
                    refined = snap_relation(&refined, &mut pool, cfg.eps_angle);
                    if refined.approx_eq(current, cfg.eps_angle) {
                        continue;
                    }
                    let is_empty = refined.is_empty();
                    self.set_entry(ti, tj, refined, cfg);
                    if is_empty {
                        let (a, b) = if ti < tj { (ti, tj) } else { (tj, ti) };
                        return PcOutcome::Empty { i: a, j: b };
                    }
                    let key = if ti < tj {
                        ti * n + tj
                    } else {
                        tj * n + ti
                    };
                    if !queued[key] {
                        queued[key] = true;
                        queue.push_back((key / n, key % n));
                    }
                }
            }
        }
        PcOutcome::Stable
    }

    /// Diagonal and converse invariants, for tests.
    pub fn invariants_hold(&self, cfg: &Config) -> bool {
        let n = self.n();
        for i in 0..n {
            if !self.entry(i, i).approx_eq(&GeneralRelation::equality(), cfg.eps_angle) {
                return false;
            }
            for j in 0..n {
                let conv = converse(self.entry(j, i), cfg);
                if !self.entry(i, j).approx_eq(&conv, cfg.eps_angle) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        for i in 0..n {
            for j in (i + 1)..n {
                writeln!(f, "{} {}: {}", self.names[i], self.names[j], self.entry(i, j))?;
            }
        }
        Ok(())
    }
}

fn snap_to_pool(a: Angle, pool: &mut Vec<f64>, eps: f64) -> Angle {
    for &v in pool.iter() {
        if a.approx_eq(Angle::new(v), eps) {
            return Angle::new(v);
        }
    }
    pool.push(a.radians());
    a
}

fn snap_relation(r: &GeneralRelation, pool: &mut Vec<f64>, eps: f64) -> GeneralRelation {
    let mut sectors = Vec::with_capacity(r.sectors().len());
    for s in r.sectors() {
        if s.is_full() {
            sectors.push(*s);
            continue;
        }
        let lo = snap_to_pool(s.lo(), pool, eps);
        let hi = snap_to_pool(s.hi(), pool, eps);
        if let Some(snapped) = Sector::new(lo, hi, s.lo_closed(), s.hi_closed()) {
            sectors.push(snapped);
        }
    }
    GeneralRelation::normalize(r.has_equality(), sectors, eps)
}

/// A qualitative constraint: a disjunction of flagged atoms of one
/// calculus on one edge.
#[derive(Clone, Debug)]
pub struct QualitativeConstraint {
    pub i: usize,
    pub j: usize,
    pub disjuncts: Vec<(Direction, bool, bool)>,
}

/// Input constraints partitioned by origin.
#[derive(Clone, Debug, Default)]
pub struct PartitionedInput {
    pub names: Vec<String>,
    pub cone_shaped: Vec<QualitativeConstraint>,
    pub projection_based: Vec<QualitativeConstraint>,
    pub quantitative: Vec<(usize, usize, GeneralRelation)>,
}

impl PartitionedInput {
    pub fn n(&self) -> usize {
        self.names.len()
    }
}

/// An n-by-n matrix of atom sets for one calculus.
#[derive(Clone, Debug)]
pub struct QualitativeNetwork {
    pub calculus: Calculus,
    n: usize,
    entries: Vec<AtomSet>,
}

impl QualitativeNetwork {
    pub fn new(calculus: Calculus, n: usize) -> QualitativeNetwork {
        let mut entries = vec![AtomSet::all(); n * n];
        for i in 0..n {
            entries[i * n + i] = AtomSet::singleton(Direction::Eq);
        }
        QualitativeNetwork {
            calculus,
            n,
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> AtomSet {
        self.entries[i * self.n + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, atoms: AtomSet) {
        self.entries[i * self.n + j] = atoms;
        self.entries[j * self.n + i] = atoms.converse();
    }

    pub fn refine(&mut self, i: usize, j: usize, atoms: AtomSet) {
        self.set_entry(i, j, self.entry(i, j).intersect(atoms));
    }

    /// Allen-style path consistency over the derived composition table.
    /// Returns the first empty edge, if any.
    pub fn path_consistency(&mut self) -> Option<(usize, usize)> {
        let n = self.n;
        if let Some(e) = self.empty_entry() {
            return Some(e);
        }
        if n < 3 {
            return None;
        }
        let table = composition_table(self.calculus);
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        let mut queued = vec![false; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                queue.push_back((i, j));
                queued[i * n + j] = true;
            }
        }
        while let Some((i, j)) = queue.pop_front() {
            queued[i * n + j] = false;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let updates = [(i, k, i, j, j, k), (k, j, k, i, i, j)];
                for (ti, tj, ai, aj, bi, bj) in updates {
                    let mut composed = AtomSet::empty();
                    for a in self.entry(ai, aj).iter() {
                        for b in self.entry(bi, bj).iter() {
                            composed = composed.union(table.entry(a, b));
                        }
                    }
                    let current = self.entry(ti, tj);
                    let refined = current.intersect(composed);
                    if refined == current {
                        continue;
                    }
                    self.set_entry(ti, tj, refined);
                    if refined.is_empty() {
                        return Some(if ti < tj { (ti, tj) } else { (tj, ti) });
                    }
                    let key = if ti < tj { ti * n + tj } else { tj * n + ti };
                    if !queued[key] {
                        queued[key] = true;
                        queue.push_back((key / n, key % n));
                    }
                }
            }
        }
        None
    }

    pub fn empty_entry(&self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.entry(i, j).is_empty() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn relation(&self, i: usize, j: usize) -> QualitativeRelation {
        QualitativeRelation::new(self.calculus, self.entry(i, j))
    }
}

/// Outcome of the qualitative preprocessing step.
#[derive(Clone, Debug)]
pub enum PreprocessOutcome {
    Inconsistent {
        calculus: Calculus,
        i: usize,
        j: usize,
    },
    Passed {
        cone_shaped: QualitativeNetwork,
        projection_based: QualitativeNetwork,
    },
}

impl PreprocessOutcome {
    pub fn is_consistent(&self) -> bool {
        matches!(self, PreprocessOutcome::Passed { .. })
    }
}

/// Run Allen-style path consistency separately on the cone-shaped and
/// projection-based components. Each flagged atom abstracts to the set of
/// tiling atoms its sector meets, which keeps the abstraction sound.
pub fn qualitative_preprocess(input: &PartitionedInput) -> PreprocessOutcome {
    let n = input.n();
    let parts = [
        (Calculus::ConeShaped, &input.cone_shaped),
        (Calculus::ProjectionBased, &input.projection_based),
    ];
    let mut refined = Vec::new();
    for (calculus, constraints) in parts {
        let mut net = QualitativeNetwork::new(calculus, n);
        for c in constraints.iter() {
            let mut atoms = AtomSet::empty();
            for (dir, lc, hc) in &c.disjuncts {
                atoms = atoms.union(flagged_atoms(Atom::new(calculus, *dir), *lc, *hc));
            }
            net.refine(c.i, c.j, atoms);
        }
        if let Some((i, j)) = net.path_consistency() {
            return PreprocessOutcome::Inconsistent { calculus, i, j };
        }
        refined.push(net);
    }
    let projection_based = refined.pop().expect("pb network");
    let cone_shaped = refined.pop().expect("cs network");
    PreprocessOutcome::Passed {
        cone_shaped,
        projection_based,
    }
}

/// Translate a flagged atom disjunction into the quantitative layer using
/// the constraint's own bound flags.
pub fn translate_flagged(
    calculus: Calculus,
    disjuncts: &[(Direction, bool, bool)],
    cfg: &Config,
) -> GeneralRelation {
    let mut has_eq = false;
    let mut sectors = Vec::new();
    for (dir, lc, hc) in disjuncts {
        match atom_to_sector(Atom::new(calculus, *dir), *lc, *hc) {
            TranslatedAtom::Equality => has_eq = true,
            TranslatedAtom::Arc(s) => sectors.push(s),
            TranslatedAtom::Empty => {}
        }
    }
    GeneralRelation::normalize(has_eq, sectors, cfg.eps_angle)
}

/// Translate an atom set into the quantitative layer using the tiling
/// convention regions.
pub fn translate_atom_set(calculus: Calculus, atoms: AtomSet, cfg: &Config) -> GeneralRelation {
    let mut has_eq = false;
    let mut sectors = Vec::new();
    for dir in atoms.iter() {
        match tiling_region(Atom::new(calculus, dir)) {
            TranslatedAtom::Equality => has_eq = true,
            TranslatedAtom::Arc(s) => sectors.push(s),
            TranslatedAtom::Empty => unreachable!("tiling regions are never empty"),
        }
    }
    GeneralRelation::normalize(has_eq, sectors, cfg.eps_angle)
}
