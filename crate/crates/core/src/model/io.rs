//! Plain-text instance format.
//!
//! ```text
//! MRF <N> <D> <E>
//! u <i> <s> <value>             N*D lines
//! p <i> <j> <s> <t> <value>     E*D*D lines, i < j
//! r <i> <k> <n_1> ... <n_k>     N lines, cyclic neighbour order of node i
//! ```
//!
//! Nodes and states are 1-based. Tokens are whitespace separated, blank
//! lines and lines starting with `#` are ignored. Values are written with
//! the shortest representation that reads back to the same `f64`.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{MrfProblem, MAX_STATES};
use crate::embedding::Embedding;

/// First line an edge appeared on, and its table entries so far.
type PendingEdge = (usize, Vec<Option<f64>>);

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("missing `MRF N D E` header")]
    MissingHeader,
    #[error("malformed header")]
    BadHeader,
    #[error("unknown record type `{0}`")]
    UnknownRecord(String),
    #[error("wrong number of fields")]
    FieldCount,
    #[error("cannot parse `{0}`")]
    BadNumber(String),
    #[error("node {0} out of range")]
    NodeOutOfRange(usize),
    #[error("state {0} out of range")]
    StateOutOfRange(usize),
    #[error("duplicate entry")]
    Duplicate,
    #[error("pairwise entry references ({0}, {1}), which is not an edge of the embedding")]
    DanglingEdge(usize, usize),
    #[error("missing {0}")]
    Missing(String),
    #[error("header declares {declared} edges, embedding has {actual}")]
    EdgeCount { declared: usize, actual: usize },
    #[error("invalid rotation system: {0}")]
    Embedding(String),
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, ParseError> {
    tok.parse().map_err(|_| err(line, ParseErrorKind::BadNumber(tok.to_string())))
}

fn one_based(tok: &str, bound: usize, line: usize, node: bool) -> Result<usize, ParseError> {
    let v: usize = num(tok, line)?;
    if v == 0 || v > bound {
        let kind = if node { ParseErrorKind::NodeOutOfRange(v) } else { ParseErrorKind::StateOutOfRange(v) };
        return Err(err(line, kind));
    }
    Ok(v - 1)
}

pub fn read_problem(text: &str) -> Result<MrfProblem, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(err(1, ParseErrorKind::MissingHeader))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.first() != Some(&"MRF") {
        return Err(err(hline, ParseErrorKind::MissingHeader));
    }
    if h.len() != 4 {
        return Err(err(hline, ParseErrorKind::BadHeader));
    }
    let n: usize = num(h[1], hline)?;
    let d: usize = num(h[2], hline)?;
    let e: usize = num(h[3], hline)?;
    if !(2..=MAX_STATES).contains(&d) {
        return Err(err(hline, ParseErrorKind::BadHeader));
    }

    let mut unary: Vec<Option<f64>> = vec![None; n * d];
    let mut pairwise: HashMap<(usize, usize), PendingEdge> = HashMap::new();
    let mut rotation: Vec<Option<Vec<usize>>> = vec![None; n];
    let mut first_rotation_line = hline;
    let mut last_line = hline;

    for (ln, line) in lines {
        last_line = ln;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "u" => {
                if toks.len() != 4 {
                    return Err(err(ln, ParseErrorKind::FieldCount));
                }
                let i = one_based(toks[1], n, ln, true)?;
                let s = one_based(toks[2], d, ln, false)?;
                let slot = &mut unary[i * d + s];
                if slot.is_some() {
                    return Err(err(ln, ParseErrorKind::Duplicate));
                }
                *slot = Some(num(toks[3], ln)?);
            }
            "p" => {
                if toks.len() != 6 {
                    return Err(err(ln, ParseErrorKind::FieldCount));
                }
                let mut i = one_based(toks[1], n, ln, true)?;
                let mut j = one_based(toks[2], n, ln, true)?;
                let mut s = one_based(toks[3], d, ln, false)?;
                let mut t = one_based(toks[4], d, ln, false)?;
                if i > j {
                    std::mem::swap(&mut i, &mut j);
                    std::mem::swap(&mut s, &mut t);
                }
                let value = num(toks[5], ln)?;
                let (_, table) = pairwise.entry((i, j)).or_insert_with(|| (ln, vec![None; d * d]));
                let slot = &mut table[s * d + t];
                if slot.is_some() {
                    return Err(err(ln, ParseErrorKind::Duplicate));
                }
                *slot = Some(value);
            }
            "r" => {
                if toks.len() < 3 {
                    return Err(err(ln, ParseErrorKind::FieldCount));
                }
                let i = one_based(toks[1], n, ln, true)?;
                let k: usize = num(toks[2], ln)?;
                if toks.len() != 3 + k {
                    return Err(err(ln, ParseErrorKind::FieldCount));
                }
                if rotation[i].is_some() {
                    return Err(err(ln, ParseErrorKind::Duplicate));
                }
                if rotation.iter().all(Option::is_none) {
                    first_rotation_line = ln;
                }
                let nbrs = toks[3..].iter().map(|t| one_based(t, n, ln, true)).collect::<Result<_, _>>()?;
                rotation[i] = Some(nbrs);
            }
            other => return Err(err(ln, ParseErrorKind::UnknownRecord(other.to_string()))),
        }
    }

    let end = last_line + 1;
    let rotation: Vec<Vec<usize>> = rotation
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| err(end, ParseErrorKind::Missing(format!("rotation of node {}", i + 1)))))
        .collect::<Result<_, _>>()?;
    let embedding =
        Embedding::new(rotation).map_err(|e| err(first_rotation_line, ParseErrorKind::Embedding(e.to_string())))?;
    if embedding.num_edges() != e {
        return Err(err(hline, ParseErrorKind::EdgeCount { declared: e, actual: embedding.num_edges() }));
    }

    let mut problem = MrfProblem::zeros(d, embedding).map_err(|_| err(hline, ParseErrorKind::BadHeader))?;
    for (idx, v) in unary.into_iter().enumerate() {
        let v = v.ok_or_else(|| {
            err(end, ParseErrorKind::Missing(format!("unary entry for node {} state {}", idx / d + 1, idx % d + 1)))
        })?;
        problem.unary[idx] = v;
    }
    for (&(i, j), (ln, _)) in &pairwise {
        if problem.edge_index(i, j).is_none() {
            return Err(err(*ln, ParseErrorKind::DanglingEdge(i + 1, j + 1)));
        }
    }
    for (eidx, &(i, j)) in problem.edges.clone().iter().enumerate() {
        let (_, table) = pairwise
            .remove(&(i, j))
            .ok_or_else(|| err(end, ParseErrorKind::Missing(format!("pairwise table for edge ({}, {})", i + 1, j + 1))))?;
        for (k, v) in table.into_iter().enumerate() {
            let v = v.ok_or_else(|| {
                err(
                    end,
                    ParseErrorKind::Missing(format!(
                        "pairwise entry ({}, {}) states ({}, {})",
                        i + 1,
                        j + 1,
                        k / d + 1,
                        k % d + 1
                    )),
                )
            })?;
            problem.pairwise[eidx * d * d + k] = v;
        }
    }
    Ok(problem)
}

pub fn write_problem(problem: &MrfProblem) -> String {
    let n = problem.num_nodes();
    let d = problem.num_states();
    let mut out = String::new();
    writeln!(out, "MRF {} {} {}", n, d, problem.num_edges()).unwrap();
    for i in 0..n {
        for s in 0..d {
            writeln!(out, "u {} {} {}", i + 1, s + 1, problem.unary(i, s)).unwrap();
        }
    }
    for (e, &(i, j)) in problem.edges().iter().enumerate() {
        let table = problem.edge_table(e);
        for s in 0..d {
            for t in 0..d {
                writeln!(out, "p {} {} {} {} {}", i + 1, j + 1, s + 1, t + 1, table[s * d + t]).unwrap();
            }
        }
    }
    for i in 0..n {
        let nbrs = problem.embedding().neighbours(i);
        write!(out, "r {} {}", i + 1, nbrs.len()).unwrap();
        for &w in nbrs {
            write!(out, " {}", w + 1).unwrap();
        }
        out.push('\n');
    }
    out
}
