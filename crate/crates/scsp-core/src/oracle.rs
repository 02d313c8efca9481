//! Independent brute-force validators: witness sampling, vector-sum
//! composition sampling and grid-enumeration checks of the derived
//! composition tables. These deliberately share no code with the algebra
//! they validate.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angle::{normalize, Angle, Point, Sector, TAU};
use crate::calculi::{classify, composition_table, AtomSet, Calculus, Direction};
use crate::config::Config;
use crate::network::Network;
use crate::search::Witness;

/// Sampling budget. Verdicts are deterministic under a fixed seed.
#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    pub samples: usize,
    pub grid_extent: i64,
    pub seed: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            samples: 100_000,
            grid_extent: 4,
            seed: 0xC0FFEE,
        }
    }
}

/// Rejection-sample coordinates for every variable; the first assignment
/// satisfying every edge is returned. Integer grids are tried first so
/// direction angles hit exact table boundaries, then random reals.
/// Absence of a result is inconclusive.
pub fn sample_witness(net: &Network, budget: &OracleBudget, cfg: &Config) -> Option<Witness> {
    let n = net.n();
    if n == 0 {
        return Some(Witness { points: Vec::new() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let g = budget.grid_extent.max(1);
    let half = budget.samples / 2;
    for round in 0..budget.samples {
        let points: Vec<Point> = (0..n)
            .map(|_| {
                if round < half {
                    Point::new(
                        rng.gen_range(-g..=g) as f64,
                        rng.gen_range(-g..=g) as f64,
                    )
                } else {
                    Point::new(
                        rng.gen_range(-(g as f64)..=(g as f64)),
                        rng.gen_range(-(g as f64)..=(g as f64)),
                    )
                }
            })
            .collect();
        let witness = Witness { points };
        if witness.satisfies(net, cfg) {
            return Some(witness);
        }
    }
    None
}

/// Directions achieved by sums of two positive-length vectors sampled from
/// two sectors, discretized to bins of width `eps_angle`.
#[derive(Clone, Debug)]
pub struct ComposeSamples {
    bins: BTreeSet<u64>,
    bin_width: f64,
    /// Some sample pair cancelled to the zero vector: the extreme points
    /// may coincide.
    pub zero_seen: bool,
}

impl ComposeSamples {
    pub fn directions(&self) -> impl Iterator<Item = Angle> + '_ {
        self.bins
            .iter()
            .map(move |b| Angle::new(*b as f64 * self.bin_width))
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

fn sample_angle(s: &Sector, rng: &mut ChaCha8Rng) -> Angle {
    if s.is_full() {
        return Angle::new(rng.gen_range(0.0..TAU));
    }
    if s.is_singleton() {
        return s.lo();
    }
    // Occasionally pin a closed endpoint so bound logic gets exercised.
    let roll: f64 = rng.gen();
    if roll < 0.05 && s.lo_closed() {
        return s.lo();
    }
    if roll > 0.95 && s.hi_closed() {
        return s.hi();
    }
    let u: f64 = rng.gen_range(0.0..=1.0);
    s.lo().offset(u * s.span())
}

/// Sample resultant directions of `v1 + v2` with `dir(v1)` in `r`,
/// `dir(v2)` in `s` and magnitudes in `(0, grid_extent]`.
pub fn compose_oracle(r: &Sector, s: &Sector, budget: &OracleBudget, cfg: &Config) -> ComposeSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed.wrapping_add(1));
    let mut bins = BTreeSet::new();
    let mut zero_seen = false;
    let extent = budget.grid_extent.max(1) as f64;
    let bin_width = cfg.eps_angle;
    for _ in 0..budget.samples {
        let t1 = sample_angle(r, &mut rng);
        let t2 = sample_angle(s, &mut rng);
        let m1: f64 = rng.gen_range(f64::EPSILON..=extent);
        // Mix in exact magnitude ties so antipodal pairs can cancel.
        let m2: f64 = if rng.gen::<f64>() < 0.05 {
            m1
        } else {
            rng.gen_range(f64::EPSILON..=extent)
        };
        let x = m1 * t1.radians().cos() + m2 * t2.radians().cos();
        let y = m1 * t1.radians().sin() + m2 * t2.radians().sin();
        let len = (x * x + y * y).sqrt();
        if len < 1e-12 {
            zero_seen = true;
            continue;
        }
        let dir = normalize(y.atan2(x), cfg.eps_angle);
        bins.insert((dir / bin_width).round() as u64);
    }
    ComposeSamples {
        bins,
        bin_width,
        zero_seen,
    }
}

/// One observed violation of a derived composition table.
#[derive(Clone, Debug)]
pub struct TableViolation {
    pub left: Direction,
    pub right: Direction,
    pub observed: Direction,
    pub triple: [Point; 3],
}

/// Result of an exhaustive grid check of a composition table.
#[derive(Clone, Debug, Default)]
pub struct TableCheckReport {
    pub checked: usize,
    pub violations: Vec<TableViolation>,
}

impl TableCheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Enumerate integer-grid triples `(a, b, c)` with `a != b`, `b != c` and
/// check that the atom observed on `(a, c)` is in the derived entry for
/// the atoms observed on `(a, b)` and `(b, c)`. `budget.samples` caps the
/// number of triples checked.
pub fn table_check(calculus: Calculus, budget: &OracleBudget, cfg: &Config) -> TableCheckReport {
    let mut report = TableCheckReport::default();
    if budget.samples == 0 {
        return report;
    }
    let table = composition_table(calculus);
    let g = budget.grid_extent;
    let coords: Vec<Point> = (-g..=g)
        .flat_map(|x| (-g..=g).map(move |y| Point::new(x as f64, y as f64)))
        .collect();
    for a in &coords {
        for b in &coords {
            if a == b {
                continue;
            }
            let left = classify(calculus, *a, *b, cfg.eps_angle);
            for c in &coords {
                if b == c {
                    continue;
                }
                if report.checked >= budget.samples {
                    return report;
                }
                report.checked += 1;
                let right = classify(calculus, *b, *c, cfg.eps_angle);
                let observed = classify(calculus, *a, *c, cfg.eps_angle);
                if !table.entry(left, right).contains(observed) {
                    report.violations.push(TableViolation {
                        left,
                        right,
                        observed,
                        triple: [*a, *b, *c],
                    });
                    if report.violations.len() >= 32 {
                        return report;
                    }
                }
            }
        }
    }
    report
}

/// The set of atoms actually observed on `(a, c)` across the grid for a
/// fixed pair of atoms on `(a, b)` and `(b, c)`.
pub fn observed_entry(
    calculus: Calculus,
    left: Direction,
    right: Direction,
    grid_extent: i64,
    cfg: &Config,
) -> AtomSet {
    let g = grid_extent;
    let coords: Vec<Point> = (-g..=g)
        .flat_map(|x| (-g..=g).map(move |y| Point::new(x as f64, y as f64)))
        .collect();
    let mut out = AtomSet::empty();
    for a in &coords {
        for b in &coords {
            if a == b || classify(calculus, *a, *b, cfg.eps_angle) != left {
                continue;
            }
            for c in &coords {
                if b == c || classify(calculus, *b, *c, cfg.eps_angle) != right {
                    continue;
                }
                out.insert(classify(calculus, *a, *c, cfg.eps_angle));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{compose_basic, BasicRelation, GeneralRelation};
    use std::f64::consts::PI;

    fn cfg() -> Config {
        Config::default()
    }

    fn budget(samples: usize) -> OracleBudget {
        OracleBudget {
            samples,
            ..OracleBudget::default()
        }
    }

    fn sec(lo: f64, hi: f64) -> Sector {
        Sector::new(Angle::new(lo), Angle::new(hi), true, true).unwrap()
    }

    #[test]
    fn witness_sampling_finds_easy_network() {
        let c = cfg();
        let north = GeneralRelation::from_sector(Sector::singleton(Angle::new(PI / 2.0)));
        let south = GeneralRelation::from_sector(Sector::singleton(Angle::new(3.0 * PI / 2.0)));
        let either = GeneralRelation::normalize(
            false,
            vec![
                Sector::singleton(Angle::new(PI / 2.0)),
                Sector::singleton(Angle::new(3.0 * PI / 2.0)),
            ],
            1e-9,
        );
        let net = Network::from_constraints(
            3,
            &[(0, 1, either), (1, 2, north), (0, 2, south)],
            &c,
        )
        .unwrap();
        let w = sample_witness(&net, &budget(100_000), &c).expect("witness exists");
        assert!(w.satisfies(&net, &c));
    }

    #[test]
    fn witness_sampling_rejects_contradiction() {
        let c = cfg();
        let north = GeneralRelation::from_sector(Sector::singleton(Angle::new(PI / 2.0)));
        let south = GeneralRelation::from_sector(Sector::singleton(Angle::new(3.0 * PI / 2.0)));
        let net =
            Network::from_constraints(2, &[(0, 1, north), (0, 1, south)], &c).unwrap();
        assert!(sample_witness(&net, &budget(5_000), &c).is_none());
    }

    #[test]
    fn single_point_network_is_immediate() {
        let c = cfg();
        let net = Network::from_constraints(1, &[], &c).unwrap();
        assert!(sample_witness(&net, &budget(10), &c).is_some());
    }

    #[test]
    fn oracle_is_deterministic_under_seed() {
        let c = cfg();
        let r = sec(0.0, PI / 4.0);
        let s = sec(PI / 4.0, PI / 2.0);
        let a = compose_oracle(&r, &s, &budget(2_000), &c);
        let b = compose_oracle(&r, &s, &budget(2_000), &c);
        let av: Vec<u64> = a.bins.iter().copied().collect();
        let bv: Vec<u64> = b.bins.iter().copied().collect();
        assert_eq!(av, bv);
    }

    #[test]
    fn compose_oracle_covers_hull_interior() {
        let c = cfg();
        let r = sec(0.0, PI / 4.0);
        let s = sec(PI / 4.0, PI / 2.0);
        let samples = compose_oracle(&r, &s, &budget(20_000), &c);
        assert!(!samples.zero_seen);
        let hull = sec(0.0, PI / 2.0);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in samples.directions() {
            assert!(hull.contains(d, 1e-6), "direction {} outside hull", d);
            lo = lo.min(d.radians());
            hi = hi.max(d.radians());
        }
        assert!(lo < 0.05, "interior low end covered (got {lo})");
        assert!(hi > PI / 2.0 - 0.05, "interior high end covered (got {hi})");
    }

    #[test]
    fn compose_oracle_collinear_and_antipodal() {
        let c = cfg();
        let east = Sector::singleton(Angle::new(0.0));
        let samples = compose_oracle(&east, &east, &budget(2_000), &c);
        assert_eq!(samples.len(), 1);
        assert!(!samples.zero_seen);

        let west = Sector::singleton(Angle::new(PI));
        let samples = compose_oracle(&east, &west, &budget(20_000), &c);
        // Opposite unit directions only ever cancel or point along the
        // shared axis, whatever the magnitude ratio.
        for d in samples.directions() {
            let r = d.radians();
            assert!(
                r.abs() < 1e-6 || (r - PI).abs() < 1e-6,
                "unexpected direction {r}"
            );
        }
        assert!(samples.zero_seen, "equal magnitudes cancel");
    }

    #[test]
    fn compose_oracle_stays_inside_computed_composition() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let lo = rng.gen_range(0.0..TAU);
            let span1 = rng.gen_range(0.01..PI);
            let lo2 = rng.gen_range(0.0..TAU);
            let span2 = rng.gen_range(0.01..PI);
            let r = Sector::new(Angle::new(lo), Angle::new(lo + span1), true, true).unwrap();
            let s = Sector::new(Angle::new(lo2), Angle::new(lo2 + span2), true, true).unwrap();
            let composed = compose_basic(
                &BasicRelation::Sector(r),
                &BasicRelation::Sector(s),
                &c,
            );
            let samples = compose_oracle(&r, &s, &budget(500), &c);
            for d in samples.directions() {
                assert!(
                    composed.sectors().iter().any(|x| x.contains(d, 1e-6)),
                    "direction {} escapes composition of {} and {}",
                    d,
                    r,
                    s
                );
            }
            if samples.zero_seen {
                assert!(composed.has_equality());
            }
        }
    }

    #[test]
    fn table_check_handles_degenerate_budgets() {
        let c = cfg();
        let report = table_check(Calculus::ProjectionBased, &budget(0), &c);
        assert!(report.is_clean());
        assert_eq!(report.checked, 0);
        let small = OracleBudget {
            samples: 10_000,
            grid_extent: 2,
            seed: 1,
        };
        let report = table_check(Calculus::ProjectionBased, &small, &c);
        assert!(report.is_clean(), "violations: {:?}", report.violations);
    }

    #[test]
    fn observed_entries_match_derived_for_spot_pairs() {
        let c = cfg();
        use Direction::*;
        let pb = composition_table(Calculus::ProjectionBased);
        let obs = observed_entry(Calculus::ProjectionBased, No, No, 3, &c);
        assert_eq!(obs, pb.entry(No, No));
        let obs = observed_entry(Calculus::ProjectionBased, No, So, 3, &c);
        assert_eq!(obs, pb.entry(No, So));
        assert_eq!(obs, AtomSet::from_iter([No, So, Eq]));
    }
}
