//! Graph input formats: a 1-based edge list and graph6.

use std::collections::BTreeSet;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("line {line}: loop at vertex {vertex}")]
    Loop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("header announces {expected} edges but {found} were given")]
    EdgeCount { expected: usize, found: usize },
    #[error("graph6: {0}")]
    Graph6(String),
    #[error("empty input")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    #[default]
    Auto,
    EdgeList,
    Graph6,
}

impl FromStr for InputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(InputFormat::Auto),
            "edge-list" | "edgelist" => Ok(InputFormat::EdgeList),
            "graph6" | "g6" => Ok(InputFormat::Graph6),
            other => Err(format!("unknown input format `{other}`")),
        }
    }
}

const GRAPH6_HEADER: &str = ">>graph6<<";

pub fn parse_graph(text: &str, format: InputFormat) -> Result<Graph, FormatError> {
    match format {
        InputFormat::EdgeList => parse_edge_list(text),
        InputFormat::Graph6 => parse_graph6(text),
        InputFormat::Auto => {
            let first = text.lines().map(str::trim).find(|l| !l.is_empty()).ok_or(FormatError::Empty)?;
            if first.starts_with(GRAPH6_HEADER) || first.bytes().all(|b| (63..=126).contains(&b)) {
                parse_graph6(text)
            } else {
                parse_edge_list(text)
            }
        }
    }
}

/// First line `n m`, then `m` lines `u v` with 1-based vertices. Blank lines
/// and lines starting with `#` are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(FormatError::Empty)?;
    let [n, m] = two_numbers(hline, header)?;
    let mut edges = BTreeSet::new();
    for (line, l) in lines {
        let [u, v] = two_numbers(line, l)?;
        for w in [u, v] {
            if w == 0 || w > n {
                return Err(FormatError::VertexOutOfRange { line, vertex: w, n });
            }
        }
        if u == v {
            return Err(FormatError::Loop { line, vertex: u });
        }
        if !edges.insert((u.min(v) - 1, u.max(v) - 1)) {
            return Err(FormatError::DuplicateEdge { line, u, v });
        }
    }
    if edges.len() != m {
        return Err(FormatError::EdgeCount {
            expected: m,
            found: edges.len(),
        });
    }
    Ok(Graph::new(n, edges).expect("edges validated above"))
}

fn two_numbers(line: usize, l: &str) -> Result<[usize; 2], FormatError> {
    let fields: Vec<&str> = l.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(FormatError::Malformed {
            line,
            message: format!("expected two integers, found `{l}`"),
        });
    }
    let parse = |s: &str| {
        s.parse::<usize>().map_err(|_| FormatError::Malformed {
            line,
            message: format!("`{s}` is not a non-negative integer"),
        })
    };
    Ok([parse(fields[0])?, parse(fields[1])?])
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    out
}

/// Parses a single graph6 record, optionally preceded by `>>graph6<<`.
pub fn parse_graph6(text: &str) -> Result<Graph, FormatError> {
    let line = text.lines().map(str::trim).find(|l| !l.is_empty()).ok_or(FormatError::Empty)?;
    let line = line.strip_prefix(GRAPH6_HEADER).unwrap_or(line);
    let bytes = line.as_bytes();
    if let Some(b) = bytes.iter().find(|b| !(63..=126).contains(*b)) {
        return Err(FormatError::Graph6(format!("invalid byte {b:#04x}")));
    }
    let (n, rest) = match bytes {
        [] => return Err(FormatError::Empty),
        [126, 126, r @ ..] => (decode_size(r, 6)?, &r[6..]),
        [126, r @ ..] => (decode_size(r, 3)?, &r[3..]),
        [b, r @ ..] => ((*b - 63) as usize, r),
    };
    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    if rest.len() != need {
        return Err(FormatError::Graph6(format!(
            "expected {need} data bytes for {n} vertices, found {}",
            rest.len()
        )));
    }
    let bit = |k: usize| (rest[k / 6] - 63) >> (5 - k % 6) & 1 == 1;
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            if bit(k) {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    if (bits..need * 6).any(bit) {
        return Err(FormatError::Graph6("nonzero padding bits".into()));
    }
    Ok(Graph::new(n, edges).expect("graph6 edges are simple"))
}

fn decode_size(r: &[u8], len: usize) -> Result<usize, FormatError> {
    if r.len() < len {
        return Err(FormatError::Graph6("truncated size field".into()));
    }
    Ok(r[..len].iter().fold(0usize, |acc, b| (acc << 6) | (b - 63) as usize))
}

pub fn write_graph6(g: &Graph) -> String {
    let n = g.vertex_count();
    let mut out: Vec<u8> = Vec::new();
    let size_bytes = |len: usize| (0..len).rev().map(move |s| ((n >> (6 * s)) & 63) as u8 + 63);
    if n < 63 {
        out.push(n as u8 + 63);
    } else if n < 258_048 {
        out.push(126);
        out.extend(size_bytes(3));
    } else {
        out.extend([126, 126]);
        out.extend(size_bytes(6));
    }
    let mut acc = 0u8;
    let mut used = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            used += 1;
            if used == 6 {
                out.push(acc + 63);
                acc = 0;
                used = 0;
            }
        }
    }
    if used > 0 {
        out.push((acc << (6 - used)) + 63);
    }
    String::from_utf8(out).expect("graph6 is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_list_examples() {
        assert_eq!(parse_edge_list("2 1\n1 2").unwrap(), Graph::complete(2));
        assert_eq!(parse_edge_list("3 0\n").unwrap(), Graph::empty(3));
        assert_eq!(
            parse_edge_list("2 1\n1 1"),
            Err(FormatError::Loop { line: 2, vertex: 1 })
        );
        assert_eq!(
            parse_edge_list("3 2\n1 2\n2 1\n"),
            Err(FormatError::DuplicateEdge { line: 3, u: 2, v: 1 })
        );
        assert_eq!(
            parse_edge_list("3 1\n\n1 4\n"),
            Err(FormatError::VertexOutOfRange { line: 3, vertex: 4, n: 3 })
        );
        assert!(matches!(parse_edge_list("3 1\n1 x"), Err(FormatError::Malformed { line: 2, .. })));
        assert_eq!(
            parse_edge_list("3 2\n1 2\n"),
            Err(FormatError::EdgeCount { expected: 2, found: 1 })
        );
    }

    #[test]
    fn graph6_known_strings() {
        // standard examples: K_2 = "A_", P_3 0-1-2 = "Bg", Petersen = "IheA@GUAo"
        assert_eq!(parse_graph6("A_").unwrap(), Graph::complete(2));
        assert_eq!(write_graph6(&Graph::path(3)), "Bg");
        assert_eq!(parse_graph6(">>graph6<<Bw").unwrap(), Graph::complete(3));
        let pet = parse_graph6("IheA@GUAo").unwrap();
        assert_eq!(pet.edge_count(), 15);
        assert!(pet.adjacency_lists().iter().all(|a| a.len() == 3));
        assert_eq!(parse_graph6("?").unwrap(), Graph::empty(0));
        assert!(parse_graph6("Bx").is_err());
        assert!(parse_graph6("B").is_err());
    }

    #[test]
    fn auto_detection() {
        assert_eq!(parse_graph("A_\n", InputFormat::Auto).unwrap(), Graph::complete(2));
        assert_eq!(parse_graph("2 1\n1 2\n", InputFormat::Auto).unwrap(), Graph::complete(2));
        assert_eq!(parse_graph("  \n", InputFormat::Auto), Err(FormatError::Empty));
    }

    #[test]
    fn large_graph6_size_field() {
        let g = Graph::path(70);
        let s = write_graph6(&g);
        assert_eq!(s.as_bytes()[0], 126);
        assert_eq!(parse_graph6(&s).unwrap(), g);
    }

    proptest! {
        #[test]
        fn round_trips(n in 0usize..20, bits in proptest::collection::vec(any::<bool>(), 190)) {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] { edges.push((i, j)); }
                    k += 1;
                }
            }
            let g = Graph::new(n, edges).unwrap();
            prop_assert_eq!(parse_graph6(&write_graph6(&g)).unwrap(), g.clone());
            prop_assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
        }
    }
}
