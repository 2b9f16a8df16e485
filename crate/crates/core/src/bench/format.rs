//! Line-oriented graph text format.
//!
//! ```text
//! # comment
//! vertex A          # optional: fixes the id of a label
//! root O
//! edge O A 3
//! edge A B 2.5
//! edge B C 7/3
//! ```
//!
//! Labels get dense ids in order of first appearance. Lengths are exact
//! decimals or `p/q` fractions.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::RootedGraph;
use crate::rational::{self, Rational};

pub fn read_graph(text: &str) -> Result<RootedGraph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut root: Option<usize> = None;
    let mut edges: Vec<(usize, usize, Rational)> = Vec::new();
    let mut intern = |label: &str| -> usize {
        *ids.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            labels.len() - 1
        })
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parts: Vec<&str> = content.split_whitespace().collect();
        let err = |msg: String| Error::Parse { line, msg };
        match parts.as_slice() {
            ["vertex", label] => {
                intern(label);
            }
            ["root", label] => {
                if root.is_some() {
                    return Err(err("root given twice".into()));
                }
                root = Some(intern(label));
            }
            ["edge", u, v, len] => {
                let length = rational::parse(len).ok_or_else(|| err(format!("bad length {len:?}")))?;
                let (u, v) = (intern(u), intern(v));
                edges.push((u, v, length));
            }
            [keyword, ..] => {
                return Err(err(format!("cannot parse {keyword:?} line with {} fields", parts.len())));
            }
            [] => unreachable!("blank lines are skipped"),
        }
    }
    let root = root.ok_or(Error::Parse { line: 0, msg: "missing root line".into() })?;
    RootedGraph::from_parts(labels, &edges, root)
}

/// Writes every vertex first so that reading back reproduces the ids.
pub fn write_graph(g: &RootedGraph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        let _ = writeln!(out, "vertex {}", g.label(v));
    }
    let _ = writeln!(out, "root {}", g.label(g.root()));
    for e in g.edges() {
        let _ = writeln!(out, "edge {} {} {}", g.label(e.u), g.label(e.v), rational::format(&e.length));
    }
    out
}
