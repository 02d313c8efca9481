//! Scenario file parsing.
//!
//! ```text
//! # comment
//! point A
//! point B
//! A B pb:No | pb:So          # binary constraint
//! at A sector(0, pi/2)[co]   # unary constraint against the world origin
//! ```
//!
//! Unary constraints desugar to binary constraints against a reserved
//! origin variable pinned at (0, 0) for presentation.

use std::collections::HashMap;
use std::fmt;

use scsp_core::calculi::Calculus;
use scsp_core::network::{PartitionedInput, QualitativeConstraint};

use crate::literal::{disjuncts_to_relation, parse_relation_literal, Disjunct};

pub const ORIGIN_NAME: &str = "__origin";

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// A parsed scenario: partitioned constraints plus the index of the
/// implicit origin variable when unary constraints are present.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub input: PartitionedInput,
    pub origin: Option<usize>,
}

fn tokens_with_pos(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (idx, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..idx]));
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out
}

struct RawConstraint {
    i: usize,
    j: usize,
    disjuncts: Vec<Disjunct>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut raw: Vec<RawConstraint> = Vec::new();
    let mut at_raw: Vec<(usize, Vec<Disjunct>)> = Vec::new();

    for (line_no, full_line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = match full_line.find('#') {
            Some(idx) => &full_line[..idx],
            None => full_line,
        };
        let tokens = tokens_with_pos(line);
        if tokens.is_empty() {
            continue;
        }
        let err = |col: usize, msg: String| ParseError {
            line: line_no,
            col: col + 1,
            msg,
        };
        let lookup = |col: usize, name: &str| -> Result<usize, ParseError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| err(col, format!("undeclared point `{name}`")))
        };
        match tokens[0].1 {
            "point" => {
                let Some(&(col, name)) = tokens.get(1) else {
                    return Err(err(tokens[0].0, "expected `point <name>`".into()));
                };
                if tokens.len() > 2 {
                    return Err(err(tokens[2].0, "unexpected tokens after point name".into()));
                }
                if name == ORIGIN_NAME {
                    return Err(err(col, format!("`{ORIGIN_NAME}` is reserved")));
                }
                if index.contains_key(name) {
                    return Err(err(col, format!("duplicate point `{name}`")));
                }
                index.insert(name.to_string(), names.len());
                names.push(name.to_string());
            }
            "at" => {
                let Some(&(name_col, name)) = tokens.get(1) else {
                    return Err(err(tokens[0].0, "expected `at <name> <relation>`".into()));
                };
                let i = lookup(name_col, name)?;
                let Some(&(rel_col, _)) = tokens.get(2) else {
                    return Err(err(name_col, "missing relation".into()));
                };
                let disjuncts = parse_relation_literal(&line[rel_col..])
                    .map_err(|msg| err(rel_col, msg))?;
                at_raw.push((i, disjuncts));
            }
            from => {
                let from_col = tokens[0].0;
                let Some(&(to_col, to)) = tokens.get(1) else {
                    return Err(err(
                        from_col,
                        format!("expected `point`, `at` or a constraint, got `{from}`"),
                    ));
                };
                let i = lookup(from_col, from)?;
                let j = lookup(to_col, to)?;
                if i == j {
                    return Err(err(to_col, format!("constraint relates `{from}` to itself")));
                }
                let Some(&(rel_col, _)) = tokens.get(2) else {
                    return Err(err(to_col, "missing relation".into()));
                };
                let disjuncts = parse_relation_literal(&line[rel_col..])
                    .map_err(|msg| err(rel_col, msg))?;
                raw.push(RawConstraint { i, j, disjuncts });
            }
        }
    }

    let origin = if at_raw.is_empty() {
        None
    } else {
        let idx = names.len();
        names.push(ORIGIN_NAME.to_string());
        for (i, disjuncts) in at_raw {
            raw.push(RawConstraint {
                i,
                j: idx,
                disjuncts,
            });
        }
        Some(idx)
    };

    let mut input = PartitionedInput {
        names,
        ..Default::default()
    };
    for c in raw {
        match homogeneous_calculus(&c.disjuncts) {
            Some(calculus) => {
                let disjuncts = c
                    .disjuncts
                    .iter()
                    .map(|d| match d {
                        Disjunct::Atom {
                            direction,
                            lo_closed,
                            hi_closed,
                            ..
                        } => (*direction, *lo_closed, *hi_closed),
                        _ => unreachable!("homogeneous constraints are all atoms"),
                    })
                    .collect();
                let qc = QualitativeConstraint {
                    i: c.i,
                    j: c.j,
                    disjuncts,
                };
                match calculus {
                    Calculus::ConeShaped => input.cone_shaped.push(qc),
                    Calculus::ProjectionBased => input.projection_based.push(qc),
                }
            }
            None => {
                input
                    .quantitative
                    .push((c.i, c.j, disjuncts_to_relation(&c.disjuncts)));
            }
        }
    }
    Ok(Scenario { input, origin })
}

/// The calculus shared by every disjunct, when the whole disjunction is
/// qualitative atoms of one calculus.
fn homogeneous_calculus(disjuncts: &[Disjunct]) -> Option<Calculus> {
    let mut found: Option<Calculus> = None;
    for d in disjuncts {
        match d {
            Disjunct::Atom { calculus, .. } => match found {
                None => found = Some(*calculus),
                Some(c) if c == *calculus => {}
                Some(_) => return None,
            },
            _ => return None,
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_points_and_partitions_constraints() {
        let text = "\
# three points
point A
point B
point C

A B pb:No | pb:So
B C cs:NE[oo]
A C sector(0, pi/2) | eq
";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.input.names, vec!["A", "B", "C"]);
        assert_eq!(s.input.projection_based.len(), 1);
        assert_eq!(s.input.cone_shaped.len(), 1);
        assert_eq!(s.input.quantitative.len(), 1);
        assert!(s.origin.is_none());
        let (i, j, r) = &s.input.quantitative[0];
        assert_eq!((*i, *j), (0, 2));
        assert!(r.has_equality());
    }

    #[test]
    fn at_constraints_add_origin() {
        let text = "point A\nat A sector(pi/4, pi/2)\n";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.origin, Some(1));
        assert_eq!(s.input.names.len(), 2);
        assert_eq!(s.input.quantitative.len(), 1);
        assert_eq!(s.input.quantitative[0].0, 0);
        assert_eq!(s.input.quantitative[0].1, 1);
    }

    #[test]
    fn mixed_calculi_disjunction_is_quantitative() {
        let text = "point A\npoint B\nA B cs:No | pb:No\n";
        let s = parse_scenario(text).unwrap();
        assert!(s.input.cone_shaped.is_empty());
        assert!(s.input.projection_based.is_empty());
        assert_eq!(s.input.quantitative.len(), 1);
    }

    #[test]
    fn errors_carry_line_and_column() {
        let e = parse_scenario("point A\npoint A\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 7));
        let e = parse_scenario("point A\nA B eq\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.msg.contains("undeclared"));
        let e = parse_scenario("point A\npoint B\nA B wobble\n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 5));
        let e = parse_scenario("point A\npoint B\nA A eq\n").unwrap_err();
        assert!(e.msg.contains("itself"));
    }
}
