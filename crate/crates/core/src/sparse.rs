//! Edge-list Laplacians and their reduced log-determinant.
//!
//! Pose-graphs are a chain of odometry edges plus comparatively few loop
//! closures, so after a reverse Cuthill-McKee reordering the Laplacian has a
//! narrow envelope and an envelope (skyline) Cholesky factorisation costs far
//! less than a dense one. The simulator scores every candidate action with it.

use std::collections::VecDeque;

use crate::error::Result;
use crate::graph::{LaplacianMatrix, PoseGraph};

/// Weighted undirected multigraph stored as an edge list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseLaplacian {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl SparseLaplacian {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    pub fn from_edges(n: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(edges.iter().all(|&(a, b, w)| a < n && b < n && a != b && w > 0.0));
        Self { n, edges }
    }

    pub fn unit_from_graph(g: &PoseGraph) -> Self {
        Self::from_edges(g.n(), g.endpoints().map(|(a, b)| (a, b, 1.0)).collect())
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, w: f64) {
        debug_assert!(a < self.n && b < self.n && a != b && w > 0.0);
        self.edges.push((a, b, w));
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn to_dense(&self) -> Result<LaplacianMatrix> {
        LaplacianMatrix::from_weighted_edges(self.n, &self.edges, None)
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b, _) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// `log det` of the Laplacian with one row and column removed, i.e. the
    /// log of the weighted spanning-tree count. `-inf` when disconnected.
    pub fn log_det_reduced(&self) -> f64 {
        if self.n <= 1 {
            return 0.0;
        }
        let adj = self.neighbours();
        let Some(order) = reverse_cuthill_mckee(&adj) else {
            return f64::NEG_INFINITY;
        };
        let mut position = vec![0usize; self.n];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        // Ground the vertex ordered last, leaving an (n-1)-order system.
        let size = self.n - 1;
        let mut first = (0..size).collect::<Vec<usize>>();
        for &(a, b, _) in &self.edges {
            let (pa, pb) = (position[a], position[b]);
            let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
            if hi < size {
                first[hi] = first[hi].min(lo);
            }
        }
        let mut offset = vec![0usize; size + 1];
        for i in 0..size {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut env = vec![0.0f64; offset[size]];
        let at = |i: usize, j: usize| offset[i] + (j - first[i]);
        for &(a, b, w) in &self.edges {
            let (pa, pb) = (position[a], position[b]);
            if pa < size {
                env[at(pa, pa)] += w;
            }
            if pb < size {
                env[at(pb, pb)] += w;
            }
            if pa < size && pb < size {
                let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
                env[at(hi, lo)] -= w;
            }
        }
        let mut log_det = 0.0;
        for i in 0..size {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let mut s = env[at(i, j)];
                for k in start..j {
                    s -= env[at(i, k)] * env[at(j, k)];
                }
                env[at(i, j)] = s / env[at(j, j)];
            }
            let mut d = env[at(i, i)];
            for k in fi..i {
                let l = env[at(i, k)];
                d -= l * l;
            }
            if !(d > 0.0) {
                return f64::NEG_INFINITY;
            }
            let d = d.sqrt();
            env[at(i, i)] = d;
            log_det += d.ln();
        }
        2.0 * log_det
    }
}

/// Reverse Cuthill-McKee ordering; `None` if the graph is disconnected.
fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let degree = |v: usize| adj[v].len();
    let bfs_last = |start: usize| -> usize {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut last = start;
        while let Some(v) = queue.pop_front() {
            last = v;
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        last
    };
    let min_degree = (0..n).min_by_key(|&v| (degree(v), v))?;
    // Two sweeps approximate a peripheral start vertex.
    let start = bfs_last(bfs_last(min_degree));

    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut next = Vec::new();
    while let Some(v) = queue.pop_front() {
        order.push(v);
        next.clear();
        next.extend(adj[v].iter().copied().filter(|&u| !seen[u]));
        next.sort_unstable_by_key(|&u| (degree(u), u));
        for &u in &next {
            seen[u] = true;
            queue.push_back(u);
        }
    }
    if order.len() != n {
        return None;
    }
    order.reverse();
    Some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{reduced_laplacian, VertexId};
    use crate::linalg::cholesky_log_det;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_tree_counts() {
        // K4: 16 spanning trees
        let mut k4 = SparseLaplacian::new(4);
        for a in 0..4 {
            for b in a + 1..4 {
                k4.add_edge(a, b, 1.0);
            }
        }
        assert!((k4.log_det_reduced() - 16f64.ln()).abs() < 1e-12);

        // weighted path: product of weights
        let path = SparseLaplacian::from_edges(3, vec![(0, 1, 2.0), (1, 2, 5.0)]);
        assert!((path.log_det_reduced() - 10f64.ln()).abs() < 1e-12);

        let split = SparseLaplacian::from_edges(4, vec![(0, 1, 1.0), (2, 3, 1.0)]);
        assert_eq!(split.log_det_reduced(), f64::NEG_INFINITY);
        assert_eq!(SparseLaplacian::new(1).log_det_reduced(), 0.0);
    }

    #[test]
    fn agrees_with_dense_cholesky_on_random_loopy_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.gen_range(2..60);
            let mut g = SparseLaplacian::new(n);
            for i in 1..n {
                g.add_edge(i - 1, i, rng.gen_range(0.5..40.0));
            }
            for _ in 0..rng.gen_range(0..8) {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    g.add_edge(a, b, rng.gen_range(0.5..40.0));
                }
            }
            let dense = g.to_dense().unwrap();
            let r = reduced_laplacian(&dense, VertexId(0)).unwrap();
            let expected = cholesky_log_det(&r).unwrap();
            let got = g.log_det_reduced();
            assert!((got - expected).abs() < 1e-9 * expected.abs().max(1.0), "{got} vs {expected}");
        }
    }
}
