//! Graph file formats.
//!
//! JSON: `{"vertices": [...], "directed": [[tail, head], ...], "undirected": [[a, b], ...]}`
//! using vertex names. Edge list: one `a -> b` or `a -- b` per line, `#`
//! starts a comment, and a bare name declares an isolated vertex.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Pdag;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub directed: Vec<[String; 2]>,
    #[serde(default)]
    pub undirected: Vec<[String; 2]>,
}

impl GraphJson {
    pub fn from_graph(g: &Pdag) -> Self {
        GraphJson {
            vertices: g.names(),
            directed: g
                .directed_edges()
                .into_iter()
                .map(|(a, b)| [g.name(a), g.name(b)])
                .collect(),
            undirected: g
                .undirected_edges()
                .into_iter()
                .map(|(a, b)| [g.name(a), g.name(b)])
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Pdag> {
        let index: HashMap<&str, usize> =
            self.vertices.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        if index.len() != self.vertices.len() {
            return Err(Error::InvalidGraph("vertex names must be distinct".into()));
        }
        let lookup = |pair: &[String; 2]| -> Result<(usize, usize)> {
            let get = |n: &String| {
                index
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| Error::InvalidGraph(format!("edge refers to unknown vertex {n:?}")))
            };
            Ok((get(&pair[0])?, get(&pair[1])?))
        };
        let directed = self.directed.iter().map(lookup).collect::<Result<Vec<_>>>()?;
        let undirected = self.undirected.iter().map(lookup).collect::<Result<Vec<_>>>()?;
        Pdag::with_names(self.vertices.clone(), &directed, &undirected)
    }
}

pub fn parse_graph_json(text: &str) -> Result<Pdag> {
    let raw: GraphJson = serde_json::from_str(text)?;
    raw.to_graph()
}

/// Compact single-line JSON (no trailing newline).
pub fn to_json(g: &Pdag) -> String {
    serde_json::to_string(&GraphJson::from_graph(g)).expect("graph JSON serialises")
}

pub fn parse_edge_list(text: &str) -> Result<Pdag> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |n: &str| -> usize {
        if let Some(&i) = index.get(n) {
            return i;
        }
        names.push(n.to_string());
        index.insert(n.to_string(), names.len() - 1);
        names.len() - 1
    };
    let mut directed = Vec::new();
    let mut undirected = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::InvalidGraph(format!("line {}: cannot parse {raw:?}", lineno + 1));
        if let Some((a, b)) = line.split_once("->") {
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() || b.is_empty() {
                return Err(bad());
            }
            directed.push((intern(a), intern(b)));
        } else if let Some((a, b)) = line.split_once("--") {
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() || b.is_empty() {
                return Err(bad());
            }
            undirected.push((intern(a), intern(b)));
        } else if !line.contains(char::is_whitespace) {
            intern(line);
        } else {
            return Err(bad());
        }
    }
    Pdag::with_names(names, &directed, &undirected)
}

/// Edge-list rendering: every vertex declared in id order (so ids survive a
/// round trip), then directed, then undirected edges.
pub fn to_edge_list(g: &Pdag) -> String {
    let mut out = String::new();
    for v in 0..g.vertex_count() {
        out.push_str(&g.name(v));
        out.push('\n');
    }
    for (a, b) in g.directed_edges() {
        out.push_str(&format!("{} -> {}\n", g.name(a), g.name(b)));
    }
    for (a, b) in g.undirected_edges() {
        out.push_str(&format!("{} -- {}\n", g.name(a), g.name(b)));
    }
    out
}

/// Detects the format from content: JSON when the first non-blank character is `{`.
pub fn parse_graph(text: &str) -> Result<Pdag> {
    if text.trim_start().starts_with('{') {
        parse_graph_json(text)
    } else {
        parse_edge_list(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::chord4;

    #[test]
    fn json_round_trip() {
        let g = chord4();
        let text = to_json(&g);
        assert_eq!(
            text,
            r#"{"vertices":["X1","X2","X3","X4"],"directed":[],"undirected":[["X1","X2"],["X1","X3"],["X2","X3"],["X2","X4"],["X3","X4"]]}"#
        );
        let back = parse_graph_json(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.names(), g.names());
    }

    #[test]
    fn json_load_errors() {
        let dup = r#"{"vertices":["a","a"],"directed":[],"undirected":[]}"#;
        assert!(parse_graph_json(dup).is_err());
        let unknown = r#"{"vertices":["a","b"],"directed":[["a","c"]]}"#;
        assert!(parse_graph_json(unknown).is_err());
        let conflict = r#"{"vertices":["a","b"],"directed":[["a","b"]],"undirected":[["b","a"]]}"#;
        assert!(parse_graph_json(conflict).is_err());
        let twice = r#"{"vertices":["a","b"],"directed":[["a","b"],["b","a"]]}"#;
        assert!(parse_graph_json(twice).is_err());
    }

    #[test]
    fn edge_list_parsing() {
        let text = "# example\na -> b\nb -- c # trailing\n\nlonely\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.names(), vec!["a", "b", "c", "lonely"]);
        assert!(g.has_directed(0, 1));
        assert!(g.has_undirected(1, 2));
        assert_eq!(parse_edge_list(&to_edge_list(&g)).unwrap(), g);
        assert!(parse_edge_list("a => b").is_err());
        assert!(parse_edge_list("a -> a").is_err());
    }
}
