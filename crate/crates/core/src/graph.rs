//! Cycle analysis on finite graphs whose nodes carry parity priorities.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::{Dfs, EdgeRef, NodeFiltered};
use petgraph::Direction;

use crate::Priority;

pub(crate) const READS_INPUT: u8 = 1;
pub(crate) const WRITES_OUTPUT: u8 = 2;

pub(crate) struct PriorityGraph {
    graph: DiGraph<Priority, u8>,
}

impl PriorityGraph {
    pub fn new(priorities: impl IntoIterator<Item = Priority>) -> Self {
        let mut graph = DiGraph::new();
        for p in priorities {
            graph.add_node(p);
        }
        PriorityGraph { graph }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, flags: u8) {
        self.graph.add_edge(NodeIndex::new(from), NodeIndex::new(to), flags);
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut dfs = Dfs::new(&self.graph, NodeIndex::new(start));
        while let Some(n) = dfs.next(&self.graph) {
            seen[n.index()] = true;
        }
        seen
    }

    /// Nodes from which some node in `targets` is reachable.
    pub fn can_reach(&self, targets: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<NodeIndex> = (0..self.node_count())
            .filter(|&i| targets[i])
            .map(NodeIndex::new)
            .collect();
        for n in &stack {
            seen[n.index()] = true;
        }
        while let Some(n) = stack.pop() {
            for m in self.graph.neighbors_directed(n, Direction::Incoming) {
                if !seen[m.index()] {
                    seen[m.index()] = true;
                    stack.push(m);
                }
            }
        }
        seen
    }

    /// Nodes lying on some cycle of the whole graph.
    pub fn nodes_on_cycles(&self) -> Vec<bool> {
        let mut on = vec![false; self.node_count()];
        for scc in tarjan_scc(&self.graph) {
            if scc.len() > 1 || self.graph.contains_edge(scc[0], scc[0]) {
                for n in scc {
                    on[n.index()] = true;
                }
            }
        }
        on
    }

    /// Nodes lying on a cycle whose maximal priority has parity `parity` and whose
    /// edges jointly carry every flag in `required`.
    pub fn cycle_nodes(&self, required: u8, parity: u32) -> Vec<bool> {
        let n = self.node_count();
        let mut good = vec![false; n];
        let mut levels: Vec<Priority> = self
            .graph
            .node_weights()
            .copied()
            .filter(|p| p % 2 == parity)
            .collect();
        levels.sort_unstable();
        levels.dedup();
        let mut component = vec![usize::MAX; n];
        for &level in &levels {
            let sub = NodeFiltered::from_fn(&self.graph, |v: NodeIndex| self.graph[v] <= level);
            for (cid, scc) in tarjan_scc(&sub).into_iter().enumerate() {
                if !scc.iter().any(|&v| self.graph[v] == level) {
                    continue;
                }
                for &v in &scc {
                    component[v.index()] = cid;
                }
                let mut flags = 0u8;
                let mut internal = false;
                for &v in &scc {
                    for e in self.graph.edges_directed(v, Direction::Outgoing) {
                        let t = e.target();
                        if self.graph[t] <= level && component[t.index()] == cid {
                            internal = true;
                            flags |= *e.weight();
                        }
                    }
                }
                if internal && flags & required == required {
                    for &v in &scc {
                        good[v.index()] = true;
                    }
                }
                for &v in &scc {
                    component[v.index()] = usize::MAX;
                }
            }
        }
        good
    }

    /// Whether some path from `start` ends in a cycle with even maximal priority
    /// carrying all `required` flags.
    pub fn has_accepting_lasso(&self, start: usize, required: u8) -> bool {
        let good = self.cycle_nodes(required, 0);
        self.reachable_from(start)
            .iter()
            .zip(&good)
            .any(|(r, g)| *r && *g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_parity_follows_maximum() {
        let mut g = PriorityGraph::new([1, 2, 3]);
        g.add_edge(0, 1, 0);
        g.add_edge(1, 0, 0);
        g.add_edge(1, 2, 0);
        g.add_edge(2, 2, 0);
        assert_eq!(g.cycle_nodes(0, 0), vec![true, true, false]);
        assert_eq!(g.cycle_nodes(0, 1), vec![false, false, true]);
        assert!(g.has_accepting_lasso(0, 0));
        assert!(!g.has_accepting_lasso(2, 0));
    }

    #[test]
    fn required_flags_must_occur_inside_the_cycle() {
        let mut g = PriorityGraph::new([0, 0]);
        g.add_edge(0, 1, READS_INPUT);
        g.add_edge(1, 1, 0);
        assert!(g.has_accepting_lasso(0, 0));
        assert!(!g.has_accepting_lasso(0, READS_INPUT));
        g.add_edge(1, 0, WRITES_OUTPUT);
        assert!(g.has_accepting_lasso(0, READS_INPUT | WRITES_OUTPUT));
    }

    #[test]
    fn backward_reachability() {
        let mut g = PriorityGraph::new([0, 0, 0]);
        g.add_edge(0, 1, 0);
        assert_eq!(g.can_reach(&[false, true, false]), vec![true, true, false]);
        assert_eq!(g.nodes_on_cycles(), vec![false, false, false]);
    }
}
