//! Directed follower graph.
//!
//! An edge `(child, parent)` means `child` follows `parent`: the child is
//! exposed to whatever the parent publishes. `parents(v)` are the accounts `v`
//! follows, `children(v)` its followers, and `friends(v)` the reciprocal links.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense node index in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Neighborhood access used by feature extraction and propagation.
///
/// Everything downstream of the graph reads it through this trait, so an
/// instrumented wrapper can observe which nodes a computation touches.
pub trait Topology {
    fn node_count(&self) -> usize;
    /// Accounts `v` follows, sorted ascending.
    fn parents(&self, v: NodeId) -> &[NodeId];
    /// Followers of `v`, sorted ascending.
    fn children(&self, v: NodeId) -> &[NodeId];

    /// Reciprocal links: `parents(v) ∩ children(v)`, sorted.
    fn friends(&self, v: NodeId) -> Vec<NodeId> {
        intersect_sorted(self.parents(v), self.children(v))
    }
}

pub(crate) fn intersect_sorted(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn count_intersection(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    children: Vec<Vec<NodeId>>,
    parents: Vec<Vec<NodeId>>,
    ids: Vec<String>,
    index: BTreeMap<String, NodeId>,
}

/// Counters reported by [`SocialGraph::parse_edge_list`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub lines: usize,
    pub edges: usize,
    pub duplicates: usize,
    pub self_loops: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOutcome {
    Added,
    Duplicate,
    SelfLoop,
}

/// Incremental construction with external-id interning.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: Vec<String>,
    index: BTreeMap<String, NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    /// Interns `ext`, assigning the next dense id on first sight.
    pub fn add_node(&mut self, ext: &str) -> NodeId {
        if let Some(&id) = self.index.get(ext) {
            return id;
        }
        let id = NodeId(self.ids.len() as u32);
        self.ids.push(ext.to_string());
        self.index.insert(ext.to_string(), id);
        id
    }

    /// Records that `child` follows `parent`. Duplicates are detected at
    /// [`build`](Self::build) time; here only self-loops are refused.
    pub fn add_edge(&mut self, child: NodeId, parent: NodeId) -> EdgeOutcome {
        if child == parent {
            return EdgeOutcome::SelfLoop;
        }
        self.edges.push((child, parent));
        EdgeOutcome::Added
    }

    /// Returns the graph and the number of duplicate edges dropped.
    pub fn build(self) -> (SocialGraph, usize) {
        let n = self.ids.len();
        let mut children = alloc::vec![Vec::new(); n];
        let mut parents = alloc::vec![Vec::new(); n];
        for &(c, p) in &self.edges {
            parents[c.index()].push(p);
            children[p.index()].push(c);
        }
        let mut dups = 0;
        for list in parents.iter_mut() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            dups += before - list.len();
        }
        for list in children.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        (
            SocialGraph {
                children,
                parents,
                ids: self.ids,
                index: self.index,
            },
            dups,
        )
    }
}

impl SocialGraph {
    /// Graph over nodes `0..n` whose external ids are their decimal indices.
    /// Edges are `(child, parent)` pairs; self-loops are dropped.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut b = GraphBuilder::new();
        for i in 0..n {
            b.add_node(&i.to_string());
        }
        for &(c, p) in edges {
            assert!((c as usize) < n && (p as usize) < n, "edge endpoint out of range");
            b.add_edge(NodeId(c), NodeId(p));
        }
        b.build().0
    }

    /// Parses `child<TAB>parent` lines. Blank lines and `#` comments are
    /// skipped, duplicate edges are merged, self-loops are dropped and counted.
    pub fn parse_edge_list(text: &str) -> Result<(Self, LoadReport)> {
        let mut b = GraphBuilder::new();
        let mut report = LoadReport::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            report.lines += 1;
            let mut parts = line.split('\t');
            let (child, parent) = match (parts.next(), parts.next(), parts.next()) {
                (Some(c), Some(p), None) if !c.is_empty() && !p.is_empty() => (c, p),
                _ => {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "expected `child<TAB>parent`".to_string(),
                    })
                }
            };
            let c = b.add_node(child);
            let p = b.add_node(parent);
            if b.add_edge(c, p) == EdgeOutcome::SelfLoop {
                report.self_loops += 1;
            }
        }
        let (g, dups) = b.build();
        report.duplicates = dups;
        report.edges = g.edge_count();
        Ok((g, report))
    }

    /// Serializes back to the edge-list format, one edge per line in
    /// ascending `(child, parent)` order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (c, ps) in self.parents.iter().enumerate() {
            for p in ps {
                out.push_str(&self.ids[c]);
                out.push('\t');
                out.push_str(&self.ids[p.index()]);
                out.push('\n');
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.len() as u32).map(NodeId)
    }

    pub fn external_id(&self, v: NodeId) -> &str {
        &self.ids[v.index()]
    }

    pub fn node(&self, ext: &str) -> Option<NodeId> {
        self.index.get(ext).copied()
    }

    /// `(parents, children, friends)` of `v`.
    pub fn neighborhood(&self, v: NodeId) -> Result<(&[NodeId], &[NodeId], Vec<NodeId>)> {
        if v.index() >= self.len() {
            return Err(Error::NodeOutOfRange(v));
        }
        Ok((self.parents(v), self.children(v), self.friends(v)))
    }

    pub fn has_edge(&self, child: NodeId, parent: NodeId) -> bool {
        self.parents[child.index()].binary_search(&parent).is_ok()
    }
}

impl Topology for SocialGraph {
    #[inline]
    fn node_count(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v.index()]
    }

    #[inline]
    fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    #[test]
    fn single_edge() {
        let (g, rep) = SocialGraph::parse_edge_list("a\tb").unwrap();
        assert_eq!(g.len(), 2);
        let a = g.node("a").unwrap();
        let b = g.node("b").unwrap();
        assert_eq!(g.parents(a), &[b]);
        assert_eq!(g.children(b), &[a]);
        assert_eq!(rep.edges, 1);
        assert_eq!(rep.duplicates, 0);
    }

    #[test]
    fn empty_stream() {
        let (g, rep) = SocialGraph::parse_edge_list("").unwrap();
        assert!(g.is_empty());
        assert_eq!(rep, LoadReport::default());
    }

    #[test]
    fn duplicate_lines_dedup() {
        let (g, rep) = SocialGraph::parse_edge_list("a\tb\na\tb").unwrap();
        let (g1, _) = SocialGraph::parse_edge_list("a\tb").unwrap();
        assert_eq!(g, g1);
        assert_eq!(rep.duplicates, 1);
        assert_eq!(rep.lines, 2);
    }

    #[test]
    fn comments_and_self_loops() {
        let (g, rep) = SocialGraph::parse_edge_list("# header\na\ta\na\tb\n\n").unwrap();
        assert_eq!(rep.self_loops, 1);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = SocialGraph::parse_edge_list("a\tb\nc d\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                msg: "expected `child<TAB>parent`".into()
            }
        );
        assert!(SocialGraph::parse_edge_list("a\tb\tc").is_err());
    }

    #[test]
    fn reciprocal_pair_are_friends() {
        let g = SocialGraph::from_edges(3, &[(1, 2), (2, 1)]);
        let (_, _, f) = g.neighborhood(NodeId(1)).unwrap();
        assert_eq!(f, ids(&[2]));
    }

    #[test]
    fn star_has_no_friends() {
        let g = SocialGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let (p, c, f) = g.neighborhood(NodeId(0)).unwrap();
        assert_eq!(p, &ids(&[1, 2, 3])[..]);
        assert!(c.is_empty());
        assert!(f.is_empty());
    }

    #[test]
    fn isolated_and_out_of_range() {
        let g = SocialGraph::from_edges(3, &[(0, 1)]);
        let (p, c, f) = g.neighborhood(NodeId(2)).unwrap();
        assert!(p.is_empty() && c.is_empty() && f.is_empty());
        assert_eq!(g.neighborhood(NodeId(3)).unwrap_err(), Error::NodeOutOfRange(NodeId(3)));
    }

    #[test]
    fn edge_list_round_trip() {
        let text = "x\ty\ny\tx\nz\tx\n";
        let (g, _) = SocialGraph::parse_edge_list(text).unwrap();
        let (g2, _) = SocialGraph::parse_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(g, g2);
        assert_eq!(vec!["x", "y", "z"], g.nodes().map(|v| g.external_id(v)).collect::<Vec<_>>());
    }
}
