//! Text formats: edge lists and simple per-vertex CSV tables.
//!
//! Edge list format: one edge per line, `u v w` whitespace-separated,
//! 0-indexed ids, optional weight defaulting to 1.0, `#` starts a comment.
//! The writer emits a `# n=<count>` header (so isolated trailing vertices
//! round-trip) followed by edges with `u < v` in sorted order.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n={}", g.vertex_count());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, e.weight);
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared_n: Option<usize> = None;
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut max_id = 0usize;
    let mut saw_vertex = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(n_str) = comment.strip_prefix("n=") {
                declared_n = Some(n_str.trim().parse().map_err(|_| Error::ParseEdgeList {
                    line: line_no,
                    message: format!("bad vertex count {n_str:?}"),
                })?);
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let u: usize = parse_field(fields.next(), line_no, "source id")?;
        let v: usize = parse_field(fields.next(), line_no, "target id")?;
        let w: f64 = match fields.next() {
            Some(tok) => tok.parse().map_err(|_| Error::ParseEdgeList {
                line: line_no,
                message: format!("bad weight {tok:?}"),
            })?,
            None => 1.0,
        };
        if fields.next().is_some() {
            return Err(Error::ParseEdgeList {
                line: line_no,
                message: "expected at most 3 fields".into(),
            });
        }
        max_id = max_id.max(u).max(v);
        saw_vertex = true;
        edges.push((u, v, w));
    }
    let n = match declared_n {
        Some(n) => n,
        None if saw_vertex => max_id + 1,
        None => {
            return Err(Error::ParseEdgeList {
                line: 0,
                message: "empty edge list without a # n= header".into(),
            })
        }
    };
    Graph::new(n, &edges)
}

pub fn read_edge_list_file(path: impl AsRef<Path>) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

pub fn write_edge_list_file(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_edge_list(g))?;
    Ok(())
}

/// Writes a `vertex,<name>` CSV with one row per vertex.
pub fn write_vertex_csv(name: &str, values: &[f64]) -> String {
    let mut out = format!("vertex,{name}\n");
    for (v, x) in values.iter().enumerate() {
        let _ = writeln!(out, "{v},{x}");
    }
    out
}

/// Reads a `vertex,value` CSV (header required) into a dense vector of
/// length `n`; missing vertices default to 0.
pub fn read_vertex_csv(text: &str, n: usize) -> Result<Vec<f64>> {
    let mut values = vec![0.0; n];
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || idx == 0 {
            continue;
        }
        let line_no = idx + 1;
        let mut fields = line.split(',');
        let v: usize = parse_field(fields.next(), line_no, "vertex id")?;
        let x: f64 = parse_field(fields.next(), line_no, "value")?;
        if v >= n {
            return Err(Error::ParseEdgeList {
                line: line_no,
                message: format!("vertex {v} out of range for n={n}"),
            });
        }
        values[v] = x;
    }
    Ok(values)
}

fn parse_field<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::ParseEdgeList {
        line,
        message: format!("missing {what}"),
    })?;
    tok.trim().parse().map_err(|_| Error::ParseEdgeList {
        line,
        message: format!("bad {what} {tok:?}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random, RandomModel};

    #[test]
    fn round_trips_weighted_graph() {
        let g = Graph::new(4, &[(2, 0, 1.5), (1, 3, 2.0), (0, 1, 1.0)]).unwrap();
        let text = write_edge_list(&g);
        let h = parse_edge_list(&text).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert_eq!(h.vertex_count(), 4);
        // Canonical order: u < v, sorted.
        assert!(text.contains("0 1 1\n0 2 1.5\n1 3 2\n"));
    }

    #[test]
    fn keeps_isolated_vertices_via_header() {
        let g = Graph::new(5, &[(0, 1, 1.0)]).unwrap();
        let h = parse_edge_list(&write_edge_list(&g)).unwrap();
        assert_eq!(h.vertex_count(), 5);
    }

    #[test]
    fn default_weight_and_comments() {
        let g = parse_edge_list("# a comment\n0 1\n1 2 0.25\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_weight(0, 1), Some(1.0));
        assert_eq!(g.edge_weight(1, 2), Some(0.25));
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_edge_list("0 1\nbad line here extra\n").unwrap_err();
        match err {
            Error::ParseEdgeList { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn random_graph_round_trip_is_exact() {
        let g = gen_random(RandomModel::Gnp { n: 30, p: 0.2 }, 9).unwrap();
        let h = parse_edge_list(&write_edge_list(&g)).unwrap();
        assert_eq!(g.edges(), h.edges());
    }

    #[test]
    fn vertex_csv_round_trip() {
        let vals = vec![0.5, -1.25, 0.0, 3.0];
        let text = write_vertex_csv("score", &vals);
        let back = read_vertex_csv(&text, 4).unwrap();
        assert_eq!(vals, back);
    }
}
