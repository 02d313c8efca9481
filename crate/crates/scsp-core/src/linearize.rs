//! Translation of basic scenarios into conjunctions of strict and
//! non-strict linear inequalities over point coordinates.
//!
//! Each basic relation on an edge `(X, Y)` becomes half-plane constraints
//! rooted at `Y`. A half-plane is encoded in rotation form: membership of
//! `X` in the left half-plane of the directed line through `Y` at angle `a`
//! is `cos(a)*(y_X - y_Y) - sin(a)*(x_X - x_Y) >= 0` (or `> 0` when open),
//! which matches the slope-based formulation wherever the latter is defined
//! and needs no case split for vertical lines.

use std::fmt;

use thiserror::Error;

use crate::algebra::BasicRelation;
use crate::angle::Angle;
use crate::config::Config;
use crate::network::Network;

#[derive(Debug, Error, PartialEq)]
pub enum LinearizeError {
    #[error("edge ({i}, {j}) carries a non-basic relation")]
    NonBasicEdge { i: usize, j: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A half-plane constraint between two point variables: `x_var` lies on
/// `side` of the directed line through `y_var` at `angle`.
#[derive(Clone, Copy, Debug)]
pub struct HalfPlane {
    pub x_var: usize,
    pub y_var: usize,
    pub angle: Angle,
    pub side: Side,
    pub closed: bool,
}

/// One linear inequality `coeffs . v > 0` (strict) or `>= 0`, over the
/// unknowns `v = (x_0, y_0, x_1, y_1, ...)`. Coefficients are normalized to
/// unit Euclidean norm; the right-hand side is zero by construction since
/// all rows are homogeneous in coordinate differences.
#[derive(Clone, Debug)]
pub struct LinearRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    pub strict: bool,
}

impl LinearRow {
    pub fn eval(&self, v: &[f64]) -> f64 {
        self.coeffs.iter().zip(v).map(|(c, x)| c * x).sum::<f64>() - self.rhs
    }

    /// Row satisfaction with tolerance: strict rows need a margin of at
    /// least `eps`, non-strict rows may undershoot by `eps`.
    pub fn holds(&self, v: &[f64], eps: f64) -> bool {
        let value = self.eval(v);
        if self.strict {
            value > eps
        } else {
            value >= -eps
        }
    }
}

impl fmt::Display for LinearRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let var = if idx % 2 == 0 { "x" } else { "y" };
            if first {
                write!(f, "{c:.6}*{var}{}", idx / 2)?;
                first = false;
            } else if *c < 0.0 {
                write!(f, " - {:.6}*{var}{}", -c, idx / 2)?;
            } else {
                write!(f, " + {c:.6}*{var}{}", idx / 2)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " {} {}", if self.strict { ">" } else { ">=" }, self.rhs)
    }
}

/// Half-planes encoding a basic relation on the edge `(x_var, y_var)`.
///
/// Equality is the conjunction of the four closed axis-aligned half-planes
/// pinning both coordinate differences to zero. A sector with distinct
/// bounds is the left half-plane at its lower bound meets the right
/// half-plane at its upper bound. A zero-span sector adds the right
/// half-plane at `lo + pi/2`, kept open so the ray excludes its apex and
/// the relation keeps entailing `x != y`.
pub fn basic_to_halfplanes(b: &BasicRelation, x_var: usize, y_var: usize) -> Vec<HalfPlane> {
    match b {
        BasicRelation::Equality => {
            let east = Angle::new(0.0);
            let north = Angle::new(std::f64::consts::FRAC_PI_2);
            vec![
                HalfPlane { x_var, y_var, angle: east, side: Side::Left, closed: true },
                HalfPlane { x_var, y_var, angle: east, side: Side::Right, closed: true },
                HalfPlane { x_var, y_var, angle: north, side: Side::Left, closed: true },
                HalfPlane { x_var, y_var, angle: north, side: Side::Right, closed: true },
            ]
        }
        BasicRelation::Sector(s) => {
            debug_assert!(s.is_basic(1e-9), "linearization needs a basic sector");
            let mut planes = vec![
                HalfPlane {
                    x_var,
                    y_var,
                    angle: s.lo(),
                    side: Side::Left,
                    closed: s.lo_closed(),
                },
                HalfPlane {
                    x_var,
                    y_var,
                    angle: s.hi(),
                    side: Side::Right,
                    closed: s.hi_closed(),
                },
            ];
            if s.is_singleton() {
                planes.push(HalfPlane {
                    x_var,
                    y_var,
                    angle: s.lo().offset(std::f64::consts::FRAC_PI_2),
                    side: Side::Right,
                    closed: false,
                });
            }
            planes
        }
    }
}

/// Encode a half-plane as a unit-normalized linear row over `2 * n_points`
/// unknowns.
pub fn halfplane_to_row(h: &HalfPlane, n_points: usize) -> LinearRow {
    let mut coeffs = vec![0.0; 2 * n_points];
    let (sin, cos) = h.angle.radians().sin_cos();
    // Left side: cos*dy - sin*dx >= 0; right side negates.
    let sign = match h.side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let mut put = |idx: usize, v: f64| {
        // Clear parasitic ulps from sin/cos at axis angles.
        coeffs[idx] += if v.abs() < 1e-12 { 0.0 } else { v };
    };
    put(2 * h.x_var + 1, sign * cos);
    put(2 * h.x_var, -sign * sin);
    put(2 * h.y_var + 1, -sign * cos);
    put(2 * h.y_var, sign * sin);
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in coeffs.iter_mut() {
            *c /= norm;
        }
    }
    LinearRow {
        coeffs,
        rhs: 0.0,
        strict: !h.closed,
    }
}

/// Rows for one edge of a basic scenario.
pub fn edge_rows(b: &BasicRelation, x_var: usize, y_var: usize, n_points: usize) -> Vec<LinearRow> {
    basic_to_halfplanes(b, x_var, y_var)
        .iter()
        .map(|h| halfplane_to_row(h, n_points))
        .collect()
}

/// Translate a basic scenario into its linear system.
pub fn bsp_to_lp(net: &Network, _cfg: &Config) -> Result<crate::lp::LinearSystem, LinearizeError> {
    let n = net.n();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let entry = net.entry(i, j);
            if !entry.is_basic() {
                return Err(LinearizeError::NonBasicEdge { i, j });
            }
            let basic = if entry.has_equality() {
                BasicRelation::Equality
            } else {
                BasicRelation::Sector(entry.sectors()[0])
            };
            rows.extend(edge_rows(&basic, i, j, n));
        }
    }
    Ok(crate::lp::LinearSystem::new(2 * n, rows))
}
