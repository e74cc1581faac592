//! Small deterministic max-flow solver used for flow-feasibility checks.
//!
//! Shortest-augmenting-path (BFS) search over an adjacency-list residual
//! graph. Neighbors are visited in insertion order, so callers control
//! tie-breaking by the order in which they add edges.

/// Residuals below this are treated as exhausted.
const RESIDUAL_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    residual: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adjacency: vec![Vec::new(); nodes],
        }
    }

    /// Adds a directed edge and returns its id; the paired reverse edge is
    /// `id ^ 1`.
    pub fn add_edge(&mut self, from: usize, to: usize, capacity: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to, residual: capacity });
        self.edges.push(Edge { to: from, residual: 0.0 });
        self.adjacency[from].push(id);
        self.adjacency[to].push(id + 1);
        id
    }

    /// Flow pushed through edge `id` so far.
    pub fn flow(&self, id: usize) -> f64 {
        self.edges[id ^ 1].residual
    }

    /// Runs Edmonds-Karp from `source` to `sink`, returning the total flow.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let parents = self.shortest_path(source, sink);
            let Some(parents) = parents else { break };
            let mut bottleneck = f64::INFINITY;
            let mut node = sink;
            while node != source {
                let edge = parents[node];
                bottleneck = bottleneck.min(self.edges[edge].residual);
                node = self.edges[edge ^ 1].to;
            }
            let mut node = sink;
            while node != source {
                let edge = parents[node];
                self.edges[edge].residual -= bottleneck;
                self.edges[edge ^ 1].residual += bottleneck;
                node = self.edges[edge ^ 1].to;
            }
            total += bottleneck;
        }
        total
    }

    fn shortest_path(&self, source: usize, sink: usize) -> Option<Vec<usize>> {
        let mut parents = vec![usize::MAX; self.adjacency.len()];
        let mut seen = vec![false; self.adjacency.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[source] = true;
        queue.push_back(source);
        while let Some(node) = queue.pop_front() {
            for &edge in &self.adjacency[node] {
                let next = self.edges[edge].to;
                if !seen[next] && self.edges[edge].residual > RESIDUAL_FLOOR {
                    seen[next] = true;
                    parents[next] = edge;
                    if next == sink {
                        return Some(parents);
                    }
                    queue.push_back(next);
                }
            }
        }
        None
    }
}
