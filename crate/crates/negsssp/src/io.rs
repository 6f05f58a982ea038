//! Text formats: DIMACS-style graphs, potentials, preprocessing maps and
//! sandwich files. All vertex ids in files are 1-based.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use negsssp_core::graph::{Graph, GraphError, Length, VertexId};
use negsssp_core::preprocess::TransformMap;
use negsssp_core::Potential;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing problem line `p sp <n> <m>`")]
    MissingHeader,
    #[error("header announces {expected} arcs but {found} were read")]
    ArcCount { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, FormatError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

fn vertex(tok: Option<&str>, line: usize, n: usize) -> Result<VertexId, FormatError> {
    let v: usize = field(tok, line, "vertex")?;
    if v == 0 || v > n {
        return Err(parse_err(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

/// Parses `p sp n m` and `a u v len` lines; `c` lines and blanks are skipped.
pub fn parse_dimacs(text: &str) -> Result<Graph, FormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(line, "duplicate problem line"));
                }
                let kind: String = field(toks.next(), line, "problem kind")?;
                if kind != "sp" {
                    return Err(parse_err(line, format!("unsupported problem kind `{kind}`")));
                }
                header = Some((field(toks.next(), line, "vertex count")?, field(toks.next(), line, "arc count")?));
            }
            Some("a") => {
                let (n, _) = header.ok_or(FormatError::MissingHeader)?;
                let u = vertex(toks.next(), line, n)?;
                let v = vertex(toks.next(), line, n)?;
                let len: Length = field(toks.next(), line, "length")?;
                if !len.is_finite() {
                    return Err(parse_err(line, "length is not finite"));
                }
                arcs.push((u, v, len));
            }
            Some(other) => return Err(parse_err(line, format!("unknown line type `{other}`"))),
        }
    }
    let (n, m) = header.ok_or(FormatError::MissingHeader)?;
    if arcs.len() != m {
        return Err(FormatError::ArcCount { expected: m, found: arcs.len() });
    }
    Ok(Graph::new(n, arcs)?)
}

pub fn read_dimacs(path: &Path) -> Result<Graph, FormatError> {
    parse_dimacs(&fs::read_to_string(path)?)
}

/// Integers print without a fractional part; `-0` prints as `0`.
pub fn format_length(x: Length) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

pub fn format_dimacs(g: &Graph) -> String {
    let mut out = format!("p sp {} {}\n", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(out, "a {} {} {}", e.tail + 1, e.head + 1, format_length(e.len));
    }
    out
}

pub fn write_dimacs(g: &Graph, path: &Path) -> Result<(), FormatError> {
    Ok(fs::write(path, format_dimacs(g))?)
}

/// `v value` lines, one per vertex.
pub fn format_potential(phi: &Potential) -> String {
    let mut out = String::new();
    for (v, &x) in phi.values().iter().enumerate() {
        let _ = writeln!(out, "{} {}", v + 1, format_length(x));
    }
    out
}

/// Reads `v value` lines; every vertex in `1..=n` must appear exactly once.
pub fn parse_potential(text: &str, n: usize) -> Result<Potential, FormatError> {
    let mut values = vec![None; n];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        let Some(first) = toks.next() else { continue };
        if first == "c" {
            continue;
        }
        let v = vertex(Some(first), line, n)?;
        let x: Length = field(toks.next(), line, "potential")?;
        if values[v].replace(x).is_some() {
            return Err(parse_err(line, format!("vertex {} listed twice", v + 1)));
        }
    }
    let values: Vec<Length> = values
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| parse_err(0, format!("vertex {} has no potential", v + 1))))
        .collect::<Result<_, _>>()?;
    Potential::new(values, negsssp_core::potentials::Provenance::External)
        .map_err(|e| parse_err(0, e.to_string()))
}

/// `orig new_minus new_plus` lines, 1-based.
pub fn format_mapping(map: &TransformMap) -> String {
    let mut out = String::new();
    for (v, &(minus, plus)) in map.images().iter().enumerate() {
        let _ = writeln!(out, "{} {} {}", v + 1, minus + 1, plus + 1);
    }
    out
}

/// Sandwich file: `{"s": .., "t": .., "h": .., "U": [..]}` with 1-based ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichFile {
    pub s: usize,
    pub t: usize,
    pub h: usize,
    #[serde(rename = "U")]
    pub u: Vec<usize>,
}

impl SandwichFile {
    pub fn from_sandwich(sw: &negsssp_core::sandwich::Sandwich) -> Self {
        SandwichFile { s: sw.s + 1, t: sw.t + 1, h: sw.h, u: sw.u.iter().map(|&v| v + 1).collect() }
    }

    pub fn to_sandwich(&self, n: usize) -> Result<negsssp_core::sandwich::Sandwich, FormatError> {
        let conv = |v: usize| {
            if v == 0 || v > n {
                Err(parse_err(0, format!("vertex {v} outside 1..={n}")))
            } else {
                Ok(v - 1)
            }
        };
        Ok(negsssp_core::sandwich::Sandwich {
            s: conv(self.s)?,
            t: conv(self.t)?,
            u: self.u.iter().map(|&v| conv(v)).collect::<Result<_, _>>()?,
            h: self.h,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use negsssp_core::fixtures;

    #[test]
    fn round_trip_fixture() {
        let g = fixtures::b();
        let text = format_dimacs(&g);
        assert_eq!(text, "p sp 4 4\na 1 2 1\na 2 3 -5\na 3 1 2\na 3 4 2\n");
        assert_eq!(parse_dimacs(&text).unwrap(), g);
    }

    #[test]
    fn fractional_and_comments() {
        let g = parse_dimacs("c hello\n\np sp 2 1\na 1 2 -0.5\n").unwrap();
        assert_eq!(g.edge(0).len, -0.5);
        assert_eq!(format_dimacs(&g), "p sp 2 1\na 1 2 -0.5\n");
        assert_eq!(format_length(-0.0), "0");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_dimacs("a 1 2 3\n"), Err(FormatError::MissingHeader)));
        assert!(matches!(parse_dimacs("p sp 2 1\na 1 3 0\n"), Err(FormatError::Parse { line: 2, .. })));
        assert!(matches!(parse_dimacs("p sp 2 2\na 1 2 0\n"), Err(FormatError::ArcCount { .. })));
        assert!(matches!(parse_dimacs("p sp 2 1\na 1 2 inf\n"), Err(FormatError::Parse { .. })));
        assert!(matches!(parse_dimacs("p max 2 1\n"), Err(FormatError::Parse { .. })));
    }

    #[test]
    fn potential_round_trip() {
        let phi = Potential::new(vec![0.0, -5.0, 2.5], negsssp_core::potentials::Provenance::External).unwrap();
        let text = format_potential(&phi);
        assert_eq!(text, "1 0\n2 -5\n3 2.5\n");
        assert_eq!(parse_potential(&text, 3).unwrap().values(), phi.values());
        assert!(parse_potential("1 0\n", 2).is_err());
        assert!(parse_potential("1 0\n1 2\n", 1).is_err());
    }

    #[test]
    fn sandwich_json() {
        let file: SandwichFile = serde_json::from_str(r#"{"s":1,"t":4,"h":2,"U":[1,2]}"#).unwrap();
        let sw = file.to_sandwich(4).unwrap();
        assert_eq!((sw.s, sw.t, sw.u.as_slice()), (0, 3, &[0, 1][..]));
        assert_eq!(SandwichFile::from_sandwich(&sw), file);
        assert!(file.to_sandwich(3).is_err());
    }
}
