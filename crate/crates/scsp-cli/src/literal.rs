//! The relation literal grammar: parsing and canonical printing.
//!
//! ```text
//! relation := disjunct ('|' disjunct)*
//! disjunct := 'eq' | 'empty' | 'full' | 'universal'
//!           | ('cs'|'pb') ':' atom flags?
//!           | 'sector(' angle ',' angle ')' flags?
//! atom     := No NE Ea SE So SW We NW Eq
//! flags    := '[cc]' | '[co]' | '[oc]' | '[oo]'      (default [cc])
//! angle    := decimal radians | 'pi' forms: pi, 2*pi, pi/2, 3*pi/8, ...
//! ```
//!
//! Printing is canonical: sectors wider than half a turn are emitted as two
//! basic literals so every printed literal re-parses, and angles that are
//! rational multiples of pi are printed as such.

use std::f64::consts::PI;

use scsp_core::algebra::GeneralRelation;
use scsp_core::angle::{Angle, Sector, TAU};
use scsp_core::calculi::{Calculus, Direction};

/// One parsed disjunct, before partitioning into calculi components.
#[derive(Clone, Debug, PartialEq)]
pub enum Disjunct {
    Equality,
    Empty,
    Full,
    Universal,
    Atom {
        calculus: Calculus,
        direction: Direction,
        lo_closed: bool,
        hi_closed: bool,
    },
    Sector {
        lo: f64,
        hi: f64,
        lo_closed: bool,
        hi_closed: bool,
    },
}

/// Parse an angle literal: decimal radians or `k*pi/m` forms.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty angle literal".into());
    }
    if let Some(idx) = t.find("pi") {
        let pre = t[..idx].trim();
        let post = t[idx + 2..].trim();
        let numerator: f64 = if pre.is_empty() {
            1.0
        } else {
            let stripped = pre
                .strip_suffix('*')
                .ok_or_else(|| format!("expected `k*pi`, got `{t}`"))?
                .trim();
            stripped
                .parse()
                .map_err(|_| format!("bad numerator in angle `{t}`"))?
        };
        let denominator: f64 = if post.is_empty() {
            1.0
        } else {
            let stripped = post
                .strip_prefix('/')
                .ok_or_else(|| format!("expected `pi/m`, got `{t}`"))?
                .trim();
            let d: f64 = stripped
                .parse()
                .map_err(|_| format!("bad denominator in angle `{t}`"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in angle `{t}`"));
            }
            d
        };
        Ok(numerator * PI / denominator)
    } else {
        t.parse()
            .map_err(|_| format!("bad angle literal `{t}`"))
    }
}

/// Print an angle, preferring exact `k*pi/m` forms for small rational
/// multiples of pi.
pub fn format_angle(value: f64) -> String {
    if value.abs() < 1e-12 {
        return "0".into();
    }
    for q in 1..=96u64 {
        let k = value * q as f64 / PI;
        let rounded = k.round();
        if rounded >= 1.0 && (k - rounded).abs() < 1e-9 {
            let mut num = rounded as u64;
            let mut den = q;
            let g = gcd(num, den);
            num /= g;
            den /= g;
            return match (num, den) {
                (1, 1) => "pi".into(),
                (n, 1) => format!("{n}*pi"),
                (1, d) => format!("pi/{d}"),
                (n, d) => format!("{n}*pi/{d}"),
            };
        }
    }
    format!("{value:.12}")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn parse_flags(text: &str) -> Result<(bool, bool), String> {
    match text {
        "" => Ok((true, true)),
        "[cc]" => Ok((true, true)),
        "[co]" => Ok((true, false)),
        "[oc]" => Ok((false, true)),
        "[oo]" => Ok((false, false)),
        other => Err(format!("bad bound flags `{other}` (expected [cc], [co], [oc] or [oo])")),
    }
}

fn split_flags(text: &str) -> (&str, &str) {
    match text.find('[') {
        Some(idx) => (&text[..idx], &text[idx..]),
        None => (text, ""),
    }
}

fn parse_direction(text: &str) -> Result<Direction, String> {
    text.parse()
        .map_err(|_| format!("unknown atom `{text}` (expected No NE Ea SE So SW We NW Eq)"))
}

/// Parse a single disjunct.
pub fn parse_disjunct(text: &str) -> Result<Disjunct, String> {
    let t = text.trim();
    match t {
        "eq" => return Ok(Disjunct::Equality),
        "empty" => return Ok(Disjunct::Empty),
        "full" => return Ok(Disjunct::Full),
        "universal" => return Ok(Disjunct::Universal),
        _ => {}
    }
    if let Some(rest) = t.strip_prefix("cs:").or_else(|| t.strip_prefix("pb:")) {
        let calculus = if t.starts_with("cs:") {
            Calculus::ConeShaped
        } else {
            Calculus::ProjectionBased
        };
        let (name, flags) = split_flags(rest);
        let direction = parse_direction(name.trim())?;
        let (lo_closed, hi_closed) = parse_flags(flags.trim())?;
        return Ok(Disjunct::Atom {
            calculus,
            direction,
            lo_closed,
            hi_closed,
        });
    }
    if let Some(rest) = t.strip_prefix("sector(") {
        let (body, flags) = split_flags(rest);
        let inner = body
            .trim()
            .strip_suffix(')')
            .ok_or_else(|| format!("unterminated sector literal `{t}`"))?;
        let mut parts = inner.splitn(2, ',');
        let lo_text = parts.next().unwrap_or("");
        let hi_text = parts
            .next()
            .ok_or_else(|| format!("sector needs two angles, got `{t}`"))?;
        let lo = parse_angle(lo_text)?;
        let hi = parse_angle(hi_text)?;
        let (lo_closed, hi_closed) = parse_flags(flags.trim())?;
        let span = (hi - lo).rem_euclid(TAU);
        if span > PI + 1e-9 && span < TAU - 1e-9 {
            return Err(format!(
                "sector literal spans more than half a turn ({})",
                format_angle(span)
            ));
        }
        return Ok(Disjunct::Sector {
            lo,
            hi,
            lo_closed,
            hi_closed,
        });
    }
    Err(format!("unrecognized relation disjunct `{t}`"))
}

/// Parse a full relation literal into its disjuncts.
pub fn parse_relation_literal(text: &str) -> Result<Vec<Disjunct>, String> {
    if text.trim().is_empty() {
        return Err("missing relation".into());
    }
    text.split('|').map(parse_disjunct).collect()
}

/// Translate parsed disjuncts into a quantitative relation.
pub fn disjuncts_to_relation(parts: &[Disjunct]) -> GeneralRelation {
    use scsp_core::calculi::{atom_to_sector, Atom, TranslatedAtom};
    let mut has_eq = false;
    let mut sectors = Vec::new();
    for d in parts {
        match d {
            Disjunct::Equality => has_eq = true,
            Disjunct::Empty => {}
            Disjunct::Full => sectors.push(Sector::full()),
            Disjunct::Universal => {
                has_eq = true;
                sectors.push(Sector::full());
            }
            Disjunct::Atom {
                calculus,
                direction,
                lo_closed,
                hi_closed,
            } => match atom_to_sector(Atom::new(*calculus, *direction), *lo_closed, *hi_closed) {
                TranslatedAtom::Equality => has_eq = true,
                TranslatedAtom::Arc(s) => sectors.push(s),
                TranslatedAtom::Empty => {}
            },
            Disjunct::Sector {
                lo,
                hi,
                lo_closed,
                hi_closed,
            } => {
                if let Some(s) =
                    Sector::new(Angle::new(*lo), Angle::new(*hi), *lo_closed, *hi_closed)
                {
                    sectors.push(s);
                }
            }
        }
    }
    GeneralRelation::normalize(has_eq, sectors, 1e-9)
}

/// Parse a relation literal straight into a quantitative relation.
pub fn parse_relation(text: &str) -> Result<GeneralRelation, String> {
    Ok(disjuncts_to_relation(&parse_relation_literal(text)?))
}

fn flags_of(s: &Sector) -> &'static str {
    match (s.lo_closed(), s.hi_closed()) {
        (true, true) => "[cc]",
        (true, false) => "[co]",
        (false, true) => "[oc]",
        (false, false) => "[oo]",
    }
}

/// Canonical printing; the output re-parses to an equal relation.
pub fn format_relation(r: &GeneralRelation) -> String {
    if r.is_empty() {
        return "empty".into();
    }
    if r.is_universal() {
        return "universal".into();
    }
    let mut parts = Vec::new();
    if r.has_equality() {
        parts.push("eq".to_string());
    }
    for s in r.sectors() {
        if s.is_full() {
            parts.push("full".into());
            continue;
        }
        // Wide sectors are printed as two basic pieces so the literal
        // grammar's half-turn bound holds.
        for piece in s.split_basic() {
            parts.push(format!(
                "sector({},{}){}",
                format_angle(piece.lo().radians()),
                format_angle(piece.hi().radians()),
                flags_of(&piece)
            ));
        }
    }
    parts.join("|")
}
