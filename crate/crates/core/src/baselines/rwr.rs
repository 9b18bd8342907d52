use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{NodeId, Topology};
use crate::{Error, Result};

/// `v` with its parents and children, and the undirected edges among them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EgoNetwork {
    /// Ascending; contains the center.
    pub nodes: Vec<NodeId>,
    pub center: usize,
    /// Neighbor lists by local index, ascending.
    pub adj: Vec<Vec<usize>>,
}

impl EgoNetwork {
    pub fn build<G: Topology + ?Sized>(g: &G, v: NodeId) -> Self {
        let mut nodes: Vec<NodeId> = g.parents(v).iter().chain(g.children(v)).copied().collect();
        nodes.push(v);
        nodes.sort_unstable();
        nodes.dedup();
        let mut adj = vec![Vec::new(); nodes.len()];
        for (i, &u) in nodes.iter().enumerate() {
            for c in g.children(u) {
                if let Ok(j) = nodes.binary_search(c) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        let center = nodes.binary_search(&v).unwrap_or(0);
        EgoNetwork { nodes, center, adj }
    }

    pub fn local(&self, v: NodeId) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Connected components among the local indices in `members`.
    pub fn components(&self, members: &[usize]) -> usize {
        let mut inside = vec![false; self.len()];
        members.iter().for_each(|&i| inside[i] = true);
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for &s in members {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if inside[w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }
}

/// Random walk with restart on the ego network: the walker moves to a uniform
/// neighbor and jumps back to the center with probability `restart`. A node
/// without neighbors sends its mass back to the center. Returns stationary
/// probabilities by local index.
pub fn rwr(ego: &EgoNetwork, restart: f64, max_iters: usize) -> Result<Vec<f64>> {
    if !(restart > 0.0 && restart < 1.0) {
        return Err(Error::param("restart probability must lie in (0, 1)"));
    }
    let n = ego.len();
    let mut p = vec![0.0; n];
    p[ego.center] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..max_iters {
        next.iter_mut().for_each(|x| *x = 0.0);
        next[ego.center] += restart;
        for (u, &pu) in p.iter().enumerate() {
            let mass = (1.0 - restart) * pu;
            if ego.adj[u].is_empty() {
                next[ego.center] += mass;
            } else {
                let share = mass / ego.adj[u].len() as f64;
                ego.adj[u].iter().for_each(|&w| next[w] += share);
            }
        }
        let delta = p
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        core::mem::swap(&mut p, &mut next);
        if delta < 1e-10 {
            break;
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SocialGraph;

    #[test]
    fn single_node_ego() {
        let g = SocialGraph::from_edges(2, &[]);
        let ego = EgoNetwork::build(&g, NodeId(0));
        assert_eq!(ego.len(), 1);
        let p = rwr(&ego, 0.15, 1000).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_neighbors_share_mass() {
        // 1 and 2 follow 0
        let g = SocialGraph::from_edges(3, &[(1, 0), (2, 0)]);
        let ego = EgoNetwork::build(&g, NodeId(0));
        let p = rwr(&ego, 0.15, 1000).unwrap();
        assert!((p[1] - p[2]).abs() < 1e-12);
        assert!(p.iter().sum::<f64>() <= 1.0 + 1e-9);
        assert!(rwr(&ego, 1.0, 10).is_err());
    }

    #[test]
    fn components_among_members() {
        // 0 center; 1-2 linked, 3 alone
        let g = SocialGraph::from_edges(4, &[(1, 0), (2, 0), (3, 0), (2, 1)]);
        let ego = EgoNetwork::build(&g, NodeId(0));
        assert_eq!(ego.components(&[1, 2, 3]), 2);
        assert_eq!(ego.components(&[]), 0);
    }
}
