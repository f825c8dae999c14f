//! Text formats for graphs: graph6 (McKay, single-byte header, n < 63) and a
//! plain edge-list format with an `n m` header line.

use crate::graph::{Graph, GraphError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("empty graph6 input")]
    EmptyInput,
    #[error("graph6 supports n < 63 (single-byte header); got n = {0}")]
    OrderTooLarge(usize),
    #[error("graph6 byte {0:#04x} outside the printable range 63..=126")]
    NonPrintableByte(u8),
    #[error("graph6 input truncated: expected {expected} data bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("trailing garbage after graph6 data: {0} extra bytes")]
    TrailingGarbage(usize),
    #[error("line {line}: {msg}")]
    EdgeList { line: usize, msg: String },
    #[error("graph invariant violated: {0}")]
    Graph(#[from] GraphError),
}

const G6_HEADER: &str = ">>graph6<<";

/// Parses a graph6 string. Accepts and strips the optional `>>graph6<<`
/// prefix and a trailing newline.
pub fn parse_graph6(text: &str) -> Result<Graph, FormatError> {
    let mut s = text.trim_end_matches(['\n', '\r']);
    if let Some(rest) = s.strip_prefix(G6_HEADER) {
        s = rest;
    }
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(FormatError::EmptyInput);
    }
    for &b in bytes {
        if !(63..=126).contains(&b) {
            return Err(FormatError::NonPrintableByte(b));
        }
    }
    if bytes[0] == 126 {
        // multi-byte order header; out of scope for this codec
        return Err(FormatError::OrderTooLarge(63));
    }
    let n = (bytes[0] - 63) as usize;
    let nbits = n * n.saturating_sub(1) / 2;
    let expected = nbits.div_ceil(6);
    let data = &bytes[1..];
    if data.len() < expected {
        return Err(FormatError::Truncated { expected, got: data.len() });
    }
    if data.len() > expected {
        return Err(FormatError::TrailingGarbage(data.len() - expected));
    }
    let mut edges = Vec::new();
    let mut bit = 0usize;
    for j in 1..n as u32 {
        for i in 0..j {
            let byte = data[bit / 6] - 63;
            if byte & (1 << (5 - bit % 6)) != 0 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Ok(Graph::from_edges(n, &edges)?)
}

/// Writes a graph in graph6 format (no header, no newline). `n` must be < 63.
pub fn write_graph6(g: &Graph) -> Result<String, FormatError> {
    let n = g.vertex_count();
    if n >= 63 {
        return Err(FormatError::OrderTooLarge(n));
    }
    let mut out = vec![63 + n as u8];
    let mut acc = 0u8;
    let mut used = 0;
    for j in 1..n as u32 {
        for i in 0..j {
            acc = (acc << 1) | u8::from(g.has_edge(i, j));
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
    Ok(String::from_utf8(out).expect("bytes are printable ascii"))
}

/// Parses the edge-list format: an `n m` header line, then `m` lines `u v`
/// with 0-based ids. Anything after `#` on a line is a comment.
pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(FormatError::EdgeList {
                line,
                msg: format!("expected two fields, got {}", fields.len()),
            });
        }
        let a: u64 = fields[0].parse().map_err(|_| FormatError::EdgeList {
            line,
            msg: format!("not an integer: {:?}", fields[0]),
        })?;
        let b: u64 = fields[1].parse().map_err(|_| FormatError::EdgeList {
            line,
            msg: format!("not an integer: {:?}", fields[1]),
        })?;
        match header {
            None => header = Some((a as usize, b as usize)),
            Some((n, _)) => {
                if a >= n as u64 || b >= n as u64 {
                    return Err(FormatError::EdgeList {
                        line,
                        msg: format!("vertex id out of range 0..{n}"),
                    });
                }
                if a == b {
                    return Err(FormatError::EdgeList { line, msg: "self-loop".into() });
                }
                let e = (a.min(b) as u32, a.max(b) as u32);
                if edges.contains(&e) {
                    return Err(FormatError::EdgeList {
                        line,
                        msg: format!("duplicate edge {} {}", e.0, e.1),
                    });
                }
                edges.push(e);
            }
        }
    }
    let (n, m) = header.ok_or(FormatError::EdgeList {
        line: 0,
        msg: "missing `n m` header line".into(),
    })?;
    if edges.len() != m {
        return Err(FormatError::EdgeList {
            line: 0,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Ok(Graph::from_edges(n, &edges)?)
}

/// Writes the edge-list format with a trailing newline; edges sorted.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    /// Independent reference encoder working over explicit '0'/'1' strings.
    fn reference_graph6(g: &Graph) -> String {
        let n = g.vertex_count();
        assert!(n < 63);
        let mut bits = String::new();
        for j in 1..n as u32 {
            for i in 0..j {
                bits.push(if g.has_edge(i, j) { '1' } else { '0' });
            }
        }
        while !bits.len().is_multiple_of(6) {
            bits.push('0');
        }
        let mut out = String::new();
        out.push((63 + n as u8) as char);
        for chunk in bits.as_bytes().chunks(6) {
            let mut val = 0u8;
            for &c in chunk {
                val = val * 2 + (c - b'0');
            }
            out.push((val + 63) as char);
        }
        out
    }

    #[test]
    fn graph6_k3_is_bw() {
        let k3 = generators::complete(3);
        assert_eq!(reference_graph6(&k3), "Bw");
        assert_eq!(write_graph6(&k3).unwrap(), "Bw");
        let parsed = parse_graph6("Bw").unwrap();
        assert_eq!(parsed.edges(), k3.edges());
        assert_eq!(write_graph6(&parsed).unwrap(), "Bw");
    }

    #[test]
    fn graph6_single_vertex() {
        let g = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(reference_graph6(&g), "@");
        assert_eq!(write_graph6(&g).unwrap(), "@");
        let parsed = parse_graph6("@").unwrap();
        assert_eq!(parsed.vertex_count(), 1);
        assert_eq!(parsed.edge_count(), 0);
    }

    #[test]
    fn graph6_header_and_newline_tolerated() {
        let parsed = parse_graph6(">>graph6<<Bw\n").unwrap();
        assert_eq!(parsed.edges(), generators::complete(3).edges());
    }

    #[test]
    fn graph6_rejects_malformed() {
        assert_eq!(parse_graph6(""), Err(FormatError::EmptyInput));
        assert!(matches!(parse_graph6("B"), Err(FormatError::Truncated { .. })));
        assert!(matches!(parse_graph6("Bww"), Err(FormatError::TrailingGarbage(1))));
        assert!(matches!(parse_graph6("B\u{8}"), Err(FormatError::NonPrintableByte(_))));
        assert!(matches!(parse_graph6("~??"), Err(FormatError::OrderTooLarge(_))));
        let big = generators::cycle(64).unwrap();
        assert_eq!(write_graph6(&big), Err(FormatError::OrderTooLarge(64)));
    }

    #[test]
    fn graph6_round_trip_matches_reference_on_corpus() {
        let mut corpus = vec![
            generators::petersen(),
            generators::complete(4),
            generators::cycle(6).unwrap(),
            generators::prism(5).unwrap(),
            Graph::from_edges(0, &[]).unwrap(),
        ];
        for seed in 0..40u64 {
            corpus.push(crate::test_support::random_subcubic(1 + (seed as usize % 30), seed));
        }
        for g in &corpus {
            let text = write_graph6(g).unwrap();
            assert_eq!(text, reference_graph6(g));
            let parsed = parse_graph6(&text).unwrap();
            assert_eq!(parsed.vertex_count(), g.vertex_count());
            assert_eq!(parsed.edges(), g.edges());
            assert_eq!(write_graph6(&parsed).unwrap(), text);
        }
    }

    proptest::proptest! {
        /// parse . write is the identity on arbitrary simple graphs.
        #[test]
        fn graph6_round_trip_random(n in 0usize..20, raw in proptest::collection::vec((0u32..20, 0u32..20), 0..40)) {
            let edges: Vec<(u32, u32)> = raw
                .into_iter()
                .filter(|&(u, v)| (u as usize) < n && (v as usize) < n && u != v)
                .map(|(u, v)| (u.min(v), u.max(v)))
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let g = Graph::from_edges(n, &edges).unwrap();
            let text = write_graph6(&g).unwrap();
            let back = parse_graph6(&text).unwrap();
            proptest::prop_assert_eq!(back.vertex_count(), g.vertex_count());
            proptest::prop_assert_eq!(back.edges(), g.edges());
            proptest::prop_assert_eq!(write_graph6(&back).unwrap(), text);
        }
    }

    #[test]
    fn edge_list_k3() {
        let g = parse_edge_list("3 3\n0 1\n1 2\n0 2\n").unwrap();
        assert_eq!(g.edges(), generators::complete(3).edges());
        assert_eq!(write_edge_list(&g), "3 3\n0 1\n0 2\n1 2\n");
    }

    #[test]
    fn edge_list_k4_and_comments() {
        let text = "# complete graph\n4 6\n0 1\n0 2\n0 3\n1 2\n1 3 # last-ish\n2 3\n";
        let g = parse_edge_list(text).unwrap();
        assert_eq!(g.edges(), generators::complete(4).edges());
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        match parse_edge_list("2 1\n0 0\n") {
            Err(FormatError::EdgeList { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("self-loop"));
            }
            other => panic!("expected self-loop error, got {other:?}"),
        }
        assert!(parse_edge_list("2 1\n0 5\n").is_err());
        assert!(parse_edge_list("2 2\n0 1\n0 1\n").is_err());
        assert!(parse_edge_list("").is_err());
        assert!(parse_edge_list("3 2\n0 1\n").is_err());
    }
}
