//! Finite simple graphs with all-pairs BFS distances.

use std::collections::VecDeque;

use crate::par;

pub const INFINITY: u16 = u16::MAX;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g.finish();
        g
    }

    /// Adds an undirected edge; call [`Graph::finish`] before querying.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "loops are not allowed");
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn finish(&mut self) {
        for row in &mut self.adj {
            row.sort_unstable();
            row.dedup();
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, row) in self.adj.iter().enumerate() {
            out.extend(row.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn common_neighbours(&self, a: usize, b: usize) -> Vec<usize> {
        let (x, y) = (&self.adj[a], &self.adj[b]);
        let (mut i, mut j, mut out) = (0, 0, Vec::new());
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(x[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    pub fn bfs(&self, source: usize) -> Vec<u16> {
        let mut dist = vec![INFINITY; self.len()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == INFINITY {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS avoiding the edges for which `blocked(a, b)` holds. Returns a
    /// component id per vertex.
    pub fn components_without(&self, blocked: impl Fn(usize, usize) -> bool) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.len()];
        let mut count = 0;
        for s in 0..self.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if comp[w] == usize::MAX && !blocked(v, w) {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.bfs(0).iter().all(|&d| d != INFINITY)
    }

    /// All-pairs BFS, one row per source; rows are computed in parallel.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.len();
        let rows = par::map_range(n, |s| self.bfs(s));
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            data.extend_from_slice(&r);
        }
        DistanceMatrix { n, data }
    }

    pub fn induced(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let mut g = Graph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = pos[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j);
                }
            }
        }
        g.finish();
        (g, vertices.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u16>,
}

impl DistanceMatrix {
    pub fn get(&self, a: usize, b: usize) -> u16 {
        self.data[a * self.n + b]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, a: usize) -> &[u16] {
        &self.data[a * self.n..(a + 1) * self.n]
    }

    /// Vertices on some geodesic between `a` and `b`.
    pub fn interval(&self, a: usize, b: usize) -> Vec<usize> {
        let d = self.get(a, b);
        if d == INFINITY {
            return Vec::new();
        }
        let (ra, rb) = (self.row(a), self.row(b));
        (0..self.n)
            .filter(|&z| ra[z] != INFINITY && rb[z] != INFINITY && ra[z] + rb[z] == d)
            .collect()
    }

    pub fn in_interval(&self, a: usize, z: usize, b: usize) -> bool {
        let (x, y, d) = (self.get(a, z), self.get(z, b), self.get(a, b));
        x != INFINITY && y != INFINITY && x + y == d
    }

    pub fn diameter(&self) -> u16 {
        self.data.iter().copied().filter(|&d| d != INFINITY).max().unwrap_or(0)
    }
}
