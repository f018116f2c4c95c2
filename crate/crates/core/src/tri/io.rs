//! Plain-text point and edge files.
//!
//! Points: first line `n`, then `n` lines `x y`. Edges: one `i j` pair per
//! line with 0-based ids. Coordinates are written in shortest round-trip form,
//! so reading back what was written gives identical bits.

use std::io::{BufRead, Write};

use super::{EdgeKey, PointSet};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn read_points(r: impl BufRead) -> Result<PointSet> {
    let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });
    let (first, header) = lines.next().ok_or_else(|| parse_err(1, "missing point count"))?;
    let header = header?;
    let n: usize = header.trim().parse().map_err(|_| parse_err(first, format!("expected point count, got {:?}", header.trim())))?;
    let mut coords = Vec::with_capacity(n);
    for (line, text) in lines {
        let text = text?;
        let mut it = text.split_whitespace();
        let mut field = |name: &str| -> Result<f64> {
            let s = it.next().ok_or_else(|| parse_err(line, format!("missing {name}")))?;
            s.parse().map_err(|_| parse_err(line, format!("bad {name} {s:?}")))
        };
        let x = field("x")?;
        let y = field("y")?;
        if it.next().is_some() {
            return Err(parse_err(line, "trailing fields"));
        }
        coords.push((x, y));
    }
    if coords.len() != n {
        return Err(parse_err(0, format!("header says {n} points, found {}", coords.len())));
    }
    PointSet::new(&coords)
}

pub fn write_points(mut w: impl Write, ps: &PointSet) -> Result<()> {
    writeln!(w, "{}", ps.len())?;
    for p in ps.points() {
        writeln!(w, "{} {}", p.x, p.y)?;
    }
    Ok(())
}

/// Reads edge pairs. Ids are not checked against a point set here.
pub fn read_edges(r: impl BufRead) -> Result<Vec<EdgeKey>> {
    let mut out = Vec::new();
    for (i, text) in r.lines().enumerate() {
        let text = text?;
        if text.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let ids: Vec<&str> = text.split_whitespace().collect();
        if ids.len() != 2 {
            return Err(parse_err(line, "expected two vertex ids"));
        }
        let parse = |s: &str| s.parse::<u32>().map_err(|_| parse_err(line, format!("bad vertex id {s:?}")));
        out.push(EdgeKey::new(parse(ids[0])?, parse(ids[1])?));
    }
    Ok(out)
}

pub fn write_edges(mut w: impl Write, edges: &[EdgeKey]) -> Result<()> {
    for e in edges {
        writeln!(w, "{} {}", e.lo(), e.hi())?;
    }
    Ok(())
}
