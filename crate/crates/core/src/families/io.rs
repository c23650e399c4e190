//! Plain-text input formats.
//!
//! Edge lists hold one `u v` pair per line with 1-indexed vertices. Matrices
//! are CSV rows of integers. Explicit families hold one subset per line as
//! space-separated 1-indexed elements, with `{}` for the empty set. `#` starts
//! a comment everywhere.

use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.split('#').next().unwrap_or("").trim()))
}

fn parse_label(token: &str, line: usize) -> Result<usize> {
    match token.parse::<usize>() {
        Ok(0) => Err(Error::Input(format!(
            "line {line}: labels are 1-indexed, got 0"
        ))),
        Ok(v) => Ok(v - 1),
        Err(_) => Err(Error::Input(format!(
            "line {line}: expected a positive integer, got {token:?}"
        ))),
    }
}

/// Parses an edge list. The vertex count is the largest label seen, or the
/// value of an optional leading `vertices N` line if larger.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut declared = 0;
    for (line, body) in content_lines(text) {
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() == 2 && tokens[0] == "vertices" {
            declared = tokens[1].parse().map_err(|_| {
                Error::Input(format!("line {line}: bad vertex count {:?}", tokens[1]))
            })?;
            continue;
        }
        if tokens.len() != 2 {
            return Err(Error::Input(format!(
                "line {line}: expected `u v`, got {body:?}"
            )));
        }
        edges.push((parse_label(tokens[0], line)?, parse_label(tokens[1], line)?));
    }
    let seen = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    Graph::new(seen.max(declared), edges)
}

/// Parses a CSV matrix of integers; blank and comment lines are skipped.
pub fn parse_int_matrix(text: &str) -> Result<Vec<Vec<i64>>> {
    let mut rows = Vec::new();
    for (line, body) in content_lines(text) {
        if body.is_empty() {
            continue;
        }
        let row = body
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Input(format!("line {line}: bad integer {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Input("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::Input("matrix rows have different lengths".into()));
    }
    Ok(rows)
}

/// Parses an explicit family. Returns the subsets (0-indexed) and the
/// ground-set size implied by the largest element.
pub fn parse_subsets(text: &str) -> Result<(Vec<Vec<usize>>, usize)> {
    let mut family = Vec::new();
    for (line, body) in content_lines(text) {
        if body.is_empty() {
            continue;
        }
        if body == "{}" {
            family.push(Vec::new());
            continue;
        }
        let subset = body
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| parse_label(t, line))
            .collect::<Result<Vec<_>>>()?;
        family.push(subset);
    }
    let n = family.iter().flatten().map(|&i| i + 1).max().unwrap_or(0);
    Ok((family, n))
}

/// Parses positive integer multiplicities, whitespace or comma separated.
pub fn parse_multiplicities(text: &str) -> Result<Vec<u32>> {
    let mut q = Vec::new();
    for (line, body) in content_lines(text) {
        for t in body
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            match t.parse::<u32>() {
                Ok(v) if v > 0 => q.push(v),
                _ => {
                    return Err(Error::Input(format!(
                        "line {line}: multiplicity must be a positive integer, got {t:?}"
                    )))
                }
            }
        }
    }
    Ok(q)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}
