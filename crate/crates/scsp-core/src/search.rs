//! Backtracking scenario search: branch over basic disjuncts, prune with
//! path consistency, decide path-consistent basic scenarios with the
//! linear feasibility check, and the three-step solving pipeline.

use thiserror::Error;

use crate::algebra::{sat, GeneralRelation};
use crate::angle::Point;
use crate::calculi::{AtomSet, Calculus};
use crate::config::Config;
use crate::linearize::bsp_to_lp;
use crate::lp::{check_feasible, refine_witness, LinearSystem, LpResult, LpError};
use crate::network::{
    qualitative_preprocess, translate_atom_set, translate_flagged, Network, NetworkError,
    PartitionedInput, PcOutcome, PreprocessOutcome,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EdgeOrdering {
    /// Branch on the first edge that is not yet basic.
    #[default]
    FirstUnlabeled,
    /// Branch on the non-basic edge with the fewest disjuncts.
    SmallestDomain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DisjunctOrdering {
    /// Equality first, then sectors in canonical order.
    #[default]
    InputOrder,
    /// Sectors by decreasing span; equality last.
    WidestFirst,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub edge_ordering: EdgeOrdering,
    pub disjunct_ordering: DisjunctOrdering,
    pub lp_at_leaves: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            edge_ordering: EdgeOrdering::default(),
            disjunct_ordering: DisjunctOrdering::default(),
            lp_at_leaves: true,
        }
    }
}

/// Coordinates for every point variable.
#[derive(Clone, Debug)]
pub struct Witness {
    pub points: Vec<Point>,
}

impl Witness {
    /// Check the witness against every edge of a network.
    pub fn satisfies(&self, net: &Network, cfg: &Config) -> bool {
        let n = net.n();
        if self.points.len() != n {
            return false;
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if !sat(net.entry(i, j), self.points[i], self.points[j], cfg) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
pub enum SearchResult {
    Sat {
        /// The consistent basic refinement the search settled on.
        scenario: Network,
        /// Present when the leaf feasibility check ran.
        witness: Option<Witness>,
    },
    Unsat,
}

impl SearchResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SearchResult::Sat { .. })
    }
}

/// Search bookkeeping, mostly for tests and diagnostics.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchStats {
    pub nodes: usize,
    pub leaves: usize,
    pub lp_calls: usize,
    pub branches: usize,
}

struct Frame {
    base: Network,
    edge: (usize, usize),
    disjuncts: Vec<GeneralRelation>,
    next: usize,
}

fn choose_edge(net: &Network, ordering: EdgeOrdering) -> Option<(usize, usize)> {
    let candidates = net.non_basic_edges();
    match ordering {
        EdgeOrdering::FirstUnlabeled => candidates.first().copied(),
        EdgeOrdering::SmallestDomain => candidates
            .into_iter()
            .min_by_key(|(i, j)| net.entry(*i, *j).disjunct_count()),
    }
}

fn ordered_disjuncts(r: &GeneralRelation, ordering: DisjunctOrdering) -> Vec<GeneralRelation> {
    let mut parts: Vec<GeneralRelation> = r
        .basic_disjuncts()
        .iter()
        .map(|b| b.to_relation())
        .collect();
    if ordering == DisjunctOrdering::WidestFirst {
        let span = |g: &GeneralRelation| {
            g.sectors()
                .first()
                .map(|s| s.span())
                .unwrap_or(0.0)
        };
        parts.sort_by(|a, b| span(b).total_cmp(&span(a)));
    }
    parts
}

/// Decide consistency of a network by scenario search.
///
/// Each node runs path consistency; an empty entry prunes the node. At a
/// node with a non-basic edge the search saves the network, branches over
/// the edge's basic disjuncts and restores on failure. A node where every
/// edge is basic is a path-consistent basic scenario: with `lp_at_leaves`
/// the linear feasibility check decides it (an infeasible leaf resumes the
/// search), otherwise the scenario itself is accepted.
pub fn consistent(
    net: &Network,
    search: &SearchConfig,
    cfg: &Config,
) -> Result<SearchResult, LpError> {
    consistent_with_stats(net, search, cfg).map(|(r, _)| r)
}

pub fn consistent_with_stats(
    net: &Network,
    search: &SearchConfig,
    cfg: &Config,
) -> Result<(SearchResult, SearchStats), LpError> {
    let mut stats = SearchStats::default();
    // Explicit stack: recursion depth would otherwise scale with the number
    // of edges.
    let mut stack: Vec<Frame> = Vec::new();
    let mut current = net.clone();
    'search: loop {
        stats.nodes += 1;
        let mut failed = matches!(current.path_consistency(cfg), PcOutcome::Empty { .. });
        if !failed {
            match choose_edge(&current, search.edge_ordering) {
                Some((i, j)) => {
                    stats.branches += 1;
                    let disjuncts =
                        ordered_disjuncts(current.entry(i, j), search.disjunct_ordering);
                    stack.push(Frame {
                        base: current.clone(),
                        edge: (i, j),
                        disjuncts,
                        next: 0,
                    });
                }
                None => {
                    stats.leaves += 1;
                    if !search.lp_at_leaves {
                        return Ok((
                            SearchResult::Sat {
                                scenario: current,
                                witness: None,
                            },
                            stats,
                        ));
                    }
                    let sys = bsp_to_lp(&current, cfg).expect("leaf edges are basic");
                    stats.lp_calls += 1;
                    let res = check_feasible(&sys, cfg)?;
                    if res.feasible {
                        let witness = extract_witness(&sys, &res, &current, cfg);
                        return Ok((
                            SearchResult::Sat {
                                scenario: current,
                                witness: Some(witness),
                            },
                            stats,
                        ));
                    }
                    failed = true;
                }
            }
        }
        let _ = failed;
        // Advance to the next unexplored disjunct, unwinding exhausted
        // frames (the saved base network restores the pre-branch state).
        loop {
            let Some(frame) = stack.last_mut() else {
                return Ok((SearchResult::Unsat, stats));
            };
            if frame.next < frame.disjuncts.len() {
                let pick = frame.disjuncts[frame.next].clone();
                frame.next += 1;
                let mut next = frame.base.clone();
                next.set_entry(frame.edge.0, frame.edge.1, pick, cfg);
                current = next;
                continue 'search;
            }
            stack.pop();
        }
    }
}

fn extract_witness(
    sys: &LinearSystem,
    res: &LpResult,
    scenario: &Network,
    cfg: &Config,
) -> Witness {
    let base = res
        .witness
        .clone()
        .expect("feasible result carries a witness");
    let check_eps = cfg.eps_strict / 2.0;
    let to_witness = |v: &[f64]| Witness {
        points: (0..scenario.n())
            .map(|i| Point::new(v[2 * i], v[2 * i + 1]))
            .collect(),
    };
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    if let Some(p) = refine_witness(sys, &base, res.margin, cfg) {
        if sys.check(&p, check_eps) {
            candidates.push(p);
        }
    }
    candidates.push(base);
    for v in &candidates {
        let w = to_witness(v);
        if w.satisfies(scenario, cfg) {
            return w;
        }
    }
    to_witness(&candidates[0])
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Outcome of the three-step pipeline, reporting which step refuted.
#[derive(Clone, Debug)]
pub enum PipelineResult {
    Sat {
        scenario: Network,
        witness: Option<Witness>,
    },
    /// Refuted by qualitative propagation.
    UnsatAtStep1 {
        calculus: Calculus,
        i: usize,
        j: usize,
    },
    /// Refuted while translating and propagating quantitatively.
    UnsatAtStep2 { i: usize, j: usize },
    /// Refuted by the exhaustive search.
    Unsat,
}

impl PipelineResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, PipelineResult::Sat { .. })
    }
}

/// The full solving pipeline: qualitative propagation per calculus, then
/// translation to the quantitative network with path consistency, then
/// scenario search with feasibility at the leaves.
pub fn solve_pipeline(
    input: &PartitionedInput,
    search: &SearchConfig,
    cfg: &Config,
) -> Result<PipelineResult, PipelineError> {
    let (cs_refined, pb_refined) = match qualitative_preprocess(input) {
        PreprocessOutcome::Inconsistent { calculus, i, j } => {
            return Ok(PipelineResult::UnsatAtStep1 { calculus, i, j });
        }
        PreprocessOutcome::Passed {
            cone_shaped,
            projection_based,
        } => (cone_shaped, projection_based),
    };
    let mut constraints: Vec<(usize, usize, GeneralRelation)> = Vec::new();
    for c in &input.cone_shaped {
        constraints.push((
            c.i,
            c.j,
            translate_flagged(Calculus::ConeShaped, &c.disjuncts, cfg),
        ));
    }
    for c in &input.projection_based {
        constraints.push((
            c.i,
            c.j,
            translate_flagged(Calculus::ProjectionBased, &c.disjuncts, cfg),
        ));
    }
    for refined in [&cs_refined, &pb_refined] {
        for i in 0..refined.n() {
            for j in (i + 1)..refined.n() {
                let atoms = refined.entry(i, j);
                if atoms == AtomSet::all() {
                    continue;
                }
                constraints.push((i, j, translate_atom_set(refined.calculus, atoms, cfg)));
            }
        }
    }
    constraints.extend(input.quantitative.iter().cloned());
    let mut network = Network::from_named_constraints(input.names.clone(), &constraints, cfg)?;
    if let Some((i, j)) = network.empty_entry() {
        return Ok(PipelineResult::UnsatAtStep2 { i, j });
    }
    if let PcOutcome::Empty { i, j } = network.path_consistency(cfg) {
        return Ok(PipelineResult::UnsatAtStep2 { i, j });
    }
    match consistent(&network, search, cfg)? {
        SearchResult::Sat { scenario, witness } => Ok(PipelineResult::Sat { scenario, witness }),
        SearchResult::Unsat => Ok(PipelineResult::Unsat),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::{Angle, Sector};
    use crate::calculi::Direction;
    use crate::network::QualitativeConstraint;
    use std::f64::consts::PI;

    fn cfg() -> Config {
        Config::default()
    }

    fn ray(angle: f64) -> GeneralRelation {
        GeneralRelation::from_sector(Sector::singleton(Angle::new(angle)))
    }

    fn north() -> GeneralRelation {
        ray(PI / 2.0)
    }

    fn south() -> GeneralRelation {
        ray(3.0 * PI / 2.0)
    }

    fn north_or_south() -> GeneralRelation {
        GeneralRelation::normalize(
            false,
            vec![
                Sector::singleton(Angle::new(PI / 2.0)),
                Sector::singleton(Angle::new(3.0 * PI / 2.0)),
            ],
            1e-9,
        )
    }

    #[test]
    fn disjunction_branch_finds_witness() {
        let c = cfg();
        let net = Network::from_constraints(
            3,
            &[(0, 1, north_or_south()), (1, 2, north()), (0, 2, south())],
            &c,
        )
        .unwrap();
        match consistent(&net, &SearchConfig::default(), &c).unwrap() {
            SearchResult::Sat { scenario, witness } => {
                assert!(scenario.entry(0, 1).approx_eq(&south(), 1e-9));
                let w = witness.expect("lp leaves enabled");
                assert!(w.satisfies(&scenario, &c));
                assert!(w.satisfies(&net, &c));
                // The ray rows are strict, so the witness is non-degenerate.
                assert!(w.points[0].y < w.points[2].y && w.points[2].y < w.points[1].y);
            }
            SearchResult::Unsat => panic!("expected sat"),
        }
    }

    #[test]
    fn contradictory_edge_fails_without_branching() {
        let c = cfg();
        let net = Network::from_constraints(2, &[(0, 1, north()), (0, 1, south())], &c).unwrap();
        let (result, stats) =
            consistent_with_stats(&net, &SearchConfig::default(), &c).unwrap();
        assert!(!result.is_sat());
        assert_eq!(stats.branches, 0);
    }

    #[test]
    fn single_open_quadrant_edge_yields_strict_witness() {
        let c = cfg();
        let ne = GeneralRelation::from_sector(
            Sector::new(Angle::new(0.0), Angle::new(PI / 2.0), false, false).unwrap(),
        );
        let net = Network::from_constraints(2, &[(0, 1, ne)], &c).unwrap();
        match consistent(&net, &SearchConfig::default(), &c).unwrap() {
            SearchResult::Sat { witness, .. } => {
                let w = witness.unwrap();
                assert!(w.points[0].x > w.points[1].x);
                assert!(w.points[0].y > w.points[1].y);
            }
            SearchResult::Unsat => panic!("expected sat"),
        }
    }

    #[test]
    fn lp_disabled_returns_scenario_only() {
        let c = cfg();
        let net = Network::from_constraints(2, &[(0, 1, north_or_south())], &c).unwrap();
        let search = SearchConfig {
            lp_at_leaves: false,
            ..SearchConfig::default()
        };
        match consistent(&net, &search, &c).unwrap() {
            SearchResult::Sat { witness, scenario } => {
                assert!(witness.is_none());
                assert!(scenario.is_basic_scenario());
            }
            SearchResult::Unsat => panic!("expected sat"),
        }
    }

    #[test]
    fn smallest_domain_ordering_agrees_on_verdict() {
        let c = cfg();
        let net = Network::from_constraints(
            3,
            &[(0, 1, north_or_south()), (1, 2, north()), (0, 2, south())],
            &c,
        )
        .unwrap();
        let search = SearchConfig {
            edge_ordering: EdgeOrdering::SmallestDomain,
            disjunct_ordering: DisjunctOrdering::WidestFirst,
            lp_at_leaves: true,
        };
        assert!(consistent(&net, &search, &c).unwrap().is_sat());
    }

    fn pb(i: usize, j: usize, d: Direction) -> QualitativeConstraint {
        QualitativeConstraint {
            i,
            j,
            disjuncts: vec![(d, true, true)],
        }
    }

    #[test]
    fn pipeline_refutes_at_step_one() {
        use Direction::*;
        let input = PartitionedInput {
            names: vec!["A".into(), "B".into(), "C".into()],
            projection_based: vec![pb(0, 1, No), pb(1, 2, No), pb(0, 2, So)],
            ..Default::default()
        };
        match solve_pipeline(&input, &SearchConfig::default(), &cfg()).unwrap() {
            PipelineResult::UnsatAtStep1 { calculus, .. } => {
                assert_eq!(calculus, Calculus::ProjectionBased);
            }
            other => panic!("expected step-1 refutation, got {other:?}"),
        }
    }

    #[test]
    fn pipeline_refutes_quantitative_contradiction_at_step_two() {
        let c = cfg();
        let narrow = GeneralRelation::from_sector(
            Sector::new(Angle::new(0.0), Angle::new(PI / 8.0), true, true).unwrap(),
        );
        let other = GeneralRelation::from_sector(
            Sector::new(Angle::new(PI / 4.0), Angle::new(PI / 2.0), true, true).unwrap(),
        );
        let input = PartitionedInput {
            names: vec!["A".into(), "B".into()],
            quantitative: vec![(0, 1, narrow), (0, 1, other)],
            ..Default::default()
        };
        match solve_pipeline(&input, &SearchConfig::default(), &c).unwrap() {
            PipelineResult::UnsatAtStep2 { i, j } => assert_eq!((i, j), (0, 1)),
            other => panic!("expected step-2 refutation, got {other:?}"),
        }
    }

    #[test]
    fn pipeline_finds_witness_for_mixed_input() {
        use Direction::*;
        let c = cfg();
        let input = PartitionedInput {
            names: vec!["A".into(), "B".into(), "C".into()],
            projection_based: vec![
                QualitativeConstraint {
                    i: 0,
                    j: 1,
                    disjuncts: vec![(No, true, true), (So, true, true)],
                },
                pb(1, 2, No),
            ],
            quantitative: vec![(
                0,
                2,
                GeneralRelation::from_sector(Sector::singleton(Angle::new(3.0 * PI / 2.0))),
            )],
            ..Default::default()
        };
        match solve_pipeline(&input, &SearchConfig::default(), &c).unwrap() {
            PipelineResult::Sat { scenario, witness } => {
                let w = witness.expect("lp enabled");
                assert!(w.satisfies(&scenario, &c));
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }
}
