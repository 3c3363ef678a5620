//! `diag v1` text format.
//!
//! ```text
//! diag v1
//! vertex <id> [boundary]
//! edge <id> <from> <to> <i_forward> <i_backward>
//! base <vertex-id> <mass>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Each `edge` line
//! creates a partner pair: `<id>` from `<from>` and `<id>'` from `<to>`.

use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::One;
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, DiagramSpec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid diagram: {0}")]
    Invalid(#[from] DiagramError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_rational(token: &str) -> Option<Rational> {
    let r = Rational::from_str(token).ok()?;
    // `Ratio::from_str` accepts `p/0` as an error already; reject signs on
    // the denominator so `1/-2` is not silently accepted
    if token.contains("/-") || token.contains("/+") {
        return None;
    }
    Some(r)
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_diagram(text: &str) -> Result<Diagram, FormatError> {
    Ok(parse_spec(text)?.build()?)
}

/// Parse without building, for callers that do not need a measure.
pub fn parse_spec(text: &str) -> Result<DiagramSpec, FormatError> {
    let mut spec = DiagramSpec::new();
    let mut seen_header = false;
    let mut seen_base = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if !seen_header {
            if tokens != ["diag", "v1"] {
                return Err(syntax(line, "expected header `diag v1`"));
            }
            seen_header = true;
            continue;
        }
        match tokens[0] {
            "vertex" => match tokens[1..] {
                [id] => {
                    spec.vertex(id);
                }
                [id, "boundary"] => {
                    spec.boundary_vertex(id);
                }
                _ => return Err(syntax(line, "expected `vertex <id> [boundary]`")),
            },
            "edge" => {
                let [id, from, to, fwd, bwd] = tokens[1..] else {
                    return Err(syntax(line, "expected `edge <id> <from> <to> <i> <i>`"));
                };
                let fwd = parse_rational(fwd)
                    .ok_or_else(|| syntax(line, format!("bad rational `{fwd}`")))?;
                let bwd = parse_rational(bwd)
                    .ok_or_else(|| syntax(line, format!("bad rational `{bwd}`")))?;
                spec.edge(id, from, to, fwd, bwd);
            }
            "base" => {
                let [id, mass] = tokens[1..] else {
                    return Err(syntax(line, "expected `base <vertex-id> <mass>`"));
                };
                if seen_base {
                    return Err(syntax(line, "duplicate `base` directive"));
                }
                let mass = parse_rational(mass)
                    .ok_or_else(|| syntax(line, format!("bad rational `{mass}`")))?;
                spec.base(id, mass);
                seen_base = true;
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    if !seen_header {
        return Err(syntax(1, "missing header `diag v1`"));
    }
    Ok(spec)
}

/// Canonical serialisation: header, vertices in order, one line per partner
/// pair (listed at its lower half-edge), then the base.
pub fn write_diagram(d: &Diagram) -> String {
    let mut out = String::from("diag v1\n");
    for v in d.vertices() {
        if v.boundary {
            let _ = writeln!(out, "vertex {} boundary", v.id);
        } else {
            let _ = writeln!(out, "vertex {}", v.id);
        }
    }
    for (h, e) in d.half_edges().iter().enumerate() {
        if e.partner < h {
            continue;
        }
        let _ = writeln!(
            out,
            "edge {} {} {} {} {}",
            e.id,
            d.vertex_id(e.origin),
            d.vertex_id(d.terminus(h)),
            format_rational(&e.index),
            format_rational(d.index(e.partner)),
        );
    }
    let _ = writeln!(
        out,
        "base {} {}",
        d.vertex_id(d.base()),
        format_rational(d.base_mass())
    );
    out
}
