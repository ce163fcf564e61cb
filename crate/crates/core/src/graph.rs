//! Pose-graph data model and the exact matrix constructions built on it:
//! adjacency, degree, incidence and (weighted) Laplacian.
//!
//! Edges keep the direction in which the constraint was measured, but every
//! matrix built here treats the graph as undirected. Parallel edges are
//! legal and accumulate.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::spectral::weights::WeightScheme;

/// Dense vertex index, `0..n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

/// Rigid-body pose, also used for relative-pose measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Pose {
    /// Planar pose: metres and radians.
    Se2 { x: f64, y: f64, theta: f64 },
    /// Spatial pose: translation in metres and a unit quaternion stored `[qx, qy, qz, qw]`.
    Se3 {
        translation: [f64; 3],
        rotation: [f64; 4],
    },
}

impl Pose {
    pub fn identity_se2() -> Self {
        Pose::Se2 {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
        }
    }

    /// Number of degrees of freedom of the pose's tangent space.
    pub fn dof(&self) -> usize {
        match self {
            Pose::Se2 { .. } => 3,
            Pose::Se3 { .. } => 6,
        }
    }

    /// Builds a 3D pose, normalising the quaternion when its norm is within
    /// `1e-3` of one and rejecting it otherwise.
    pub fn se3(translation: [f64; 3], rotation: [f64; 4]) -> Result<Self> {
        let norm = rotation.iter().map(|q| q * q).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-3 {
            return Err(Error::InvalidArgument(format!(
                "quaternion norm {norm} is not within 1e-3 of 1"
            )));
        }
        // Already-unit quaternions are kept bit-exact so that text round trips are fixpoints.
        let rotation = if (norm - 1.0).abs() > 1e-12 {
            rotation.map(|q| q / norm)
        } else {
            rotation
        };
        Ok(Pose::Se3 {
            translation,
            rotation,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub pose: Option<Pose>,
}

/// Information (inverse covariance) matrix of one constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoMatrix {
    m: DMatrix<f64>,
}

impl InfoMatrix {
    /// Validates symmetry (1e-12 relative) and positive definiteness.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let info = Self::from_symmetric_unchecked(m)?;
        let min = info.min_eigenvalue();
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(info)
    }

    /// Validates shape and symmetry only. Used for ingesting real datasets,
    /// whose rank-deficient constraints are kept and flagged rather than rejected.
    pub fn from_symmetric_unchecked(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "information matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite information entry".into()));
        }
        let scale = m.amax();
        let asym = linalg::max_asymmetry(&m);
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(
            diag,
        )))
    }

    /// Rebuilds the symmetric matrix from its row-major upper triangle
    /// (`I11 I12 .. I1l I22 .. Ill`). No definiteness check.
    pub fn from_upper_triangle(dim: usize, upper: &[f64]) -> Result<Self> {
        let expected = dim * (dim + 1) / 2;
        if upper.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "upper triangle of a {dim}x{dim} matrix has {expected} entries, got {}",
                upper.len()
            )));
        }
        let mut m = DMatrix::zeros(dim, dim);
        let mut k = 0;
        for i in 0..dim {
            for j in i..dim {
                m[(i, j)] = upper[k];
                m[(j, i)] = upper[k];
                k += 1;
            }
        }
        Self::from_symmetric_unchecked(m)
    }

    /// Row-major upper triangle, the inverse of [`InfoMatrix::from_upper_triangle`].
    pub fn upper_triangle(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            for j in i..d {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::symmetric_eigenvalues(&self.m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            m: &self.m * factor,
        }
    }

    /// Copy with every eigenvalue raised to at least `floor`.
    pub fn clamped(&self, floor: f64) -> Self {
        let eig = self.m.clone().symmetric_eigen();
        if eig.eigenvalues.iter().all(|&v| v >= floor) {
            return self.clone();
        }
        let vals = eig.eigenvalues.map(|v| v.max(floor));
        let v = &eig.eigenvectors;
        let mut m = v * DMatrix::from_diagonal(&vals) * v.transpose();
        m = (&m + m.transpose()) * 0.5;
        Self { m }
    }
}

/// Directed constraint between two poses.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub info: InfoMatrix,
    pub relative_pose: Option<Pose>,
}

impl Edge {
    pub fn new(from: usize, to: usize, info: InfoMatrix) -> Self {
        Self {
            from: VertexId(from),
            to: VertexId(to),
            info,
            relative_pose: None,
        }
    }

    pub fn with_relative_pose(mut self, pose: Pose) -> Self {
        self.relative_pose = Some(pose);
        self
    }
}

/// SLAM pose-graph `G = (V, E)` with `n = |V|`, `m = |E|` and a common block dimension `ell`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoseGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    ell: usize,
}

impl PoseGraph {
    pub fn new(ell: usize, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("a pose-graph needs at least one vertex".into()));
        }
        if ell == 0 {
            return Err(Error::InvalidGraph("block dimension must be positive".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if v.id.0 != i {
                return Err(Error::InvalidGraph(format!(
                    "vertex ids must be dense and ordered: position {i} holds id {}",
                    v.id.0
                )));
            }
        }
        let mut g = Self {
            vertices,
            edges: Vec::with_capacity(edges.len()),
            ell,
        };
        for e in edges {
            g.add_edge(e)?;
        }
        Ok(g)
    }

    /// `n` vertices without stored poses and no edges.
    pub fn with_vertex_count(n: usize, ell: usize) -> Result<Self> {
        let vertices = (0..n)
            .map(|i| Vertex {
                id: VertexId(i),
                pose: None,
            })
            .collect();
        Self::new(ell, vertices, Vec::new())
    }

    pub fn add_vertex(&mut self, pose: Option<Pose>) -> VertexId {
        let id = VertexId(self.vertices.len());
        self.vertices.push(Vertex { id, pose });
        id
    }

    pub fn add_edge(&mut self, edge: Edge) -> Result<()> {
        let n = self.vertices.len();
        if edge.from.0 >= n || edge.to.0 >= n {
            return Err(Error::InvalidGraph(format!(
                "edge ({}, {}) references a vertex outside 0..{n}",
                edge.from.0, edge.to.0
            )));
        }
        if edge.from == edge.to {
            return Err(Error::InvalidGraph(format!("self-loop on vertex {}", edge.from.0)));
        }
        if edge.info.dim() != self.ell {
            return Err(Error::MixedBlockDim {
                expected: self.ell,
                found: edge.info.dim(),
            });
        }
        self.edges.push(edge);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Undirected endpoint pairs in edge order.
    pub fn endpoints(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|e| (e.from.0, e.to.0))
    }
}

/// Symmetric `n x n` (weighted) Laplacian with the weight scheme it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianMatrix {
    matrix: DMatrix<f64>,
    scheme: Option<WeightScheme>,
    edge_count: usize,
}

impl LaplacianMatrix {
    /// Accumulates `w * (e_i - e_k)(e_i - e_k)^T` for every edge.
    pub fn from_weighted_edges(
        n: usize,
        edges: &[(usize, usize, f64)],
        scheme: Option<WeightScheme>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("Laplacian of an empty graph".into()));
        }
        let mut matrix = DMatrix::zeros(n, n);
        for (j, &(a, b, w)) in edges.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight { edge: j, weight: w });
            }
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidGraph(format!("bad edge ({a}, {b}) for n = {n}")));
            }
            matrix[(a, a)] += w;
            matrix[(b, b)] += w;
            matrix[(a, b)] -= w;
            matrix[(b, a)] -= w;
        }
        Ok(Self {
            matrix,
            scheme,
            edge_count: edges.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of edges that contributed, parallel edges counted separately.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn scheme(&self) -> Option<WeightScheme> {
        self.scheme
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::symmetric_eigenvalues(&self.matrix)
    }
}

/// Binary adjacency, symmetric with zero diagonal.
pub fn adjacency_matrix(g: &PoseGraph) -> DMatrix<u8> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for (i, k) in g.endpoints() {
        a[(i, k)] = 1;
        a[(k, i)] = 1;
    }
    a
}

/// Diagonal matrix of vertex degrees; parallel edges each count once.
pub fn degree_matrix(g: &PoseGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut d = DMatrix::zeros(n, n);
    for (i, k) in g.endpoints() {
        d[(i, i)] += 1.0;
        d[(k, k)] += 1.0;
    }
    d
}

/// Signed `n x m` incidence matrix: `+1` at the edge's source, `-1` at its target.
pub fn incidence_matrix(g: &PoseGraph) -> DMatrix<i32> {
    let mut q = DMatrix::zeros(g.n(), g.m());
    for (j, (from, to)) in g.endpoints().enumerate() {
        q[(from, j)] = 1;
        q[(to, j)] = -1;
    }
    q
}

/// Weighted Laplacian from explicit per-edge weights (one per edge, positive).
pub fn laplacian(g: &PoseGraph, weights: &[f64]) -> Result<LaplacianMatrix> {
    if weights.len() != g.m() {
        return Err(Error::InvalidArgument(format!(
            "{} weights supplied for {} edges",
            weights.len(),
            g.m()
        )));
    }
    let edges: Vec<_> = g
        .endpoints()
        .zip(weights)
        .map(|((a, b), &w)| (a, b, w))
        .collect();
    LaplacianMatrix::from_weighted_edges(g.n(), &edges, None)
}

/// Unit-weight Laplacian `L = D - A` (with parallel edges accumulated).
pub fn unit_laplacian(g: &PoseGraph) -> LaplacianMatrix {
    let edges: Vec<_> = g.endpoints().map(|(a, b)| (a, b, 1.0)).collect();
    LaplacianMatrix::from_weighted_edges(g.n(), &edges, Some(WeightScheme::Unit))
        .expect("a valid pose-graph always yields a valid unit Laplacian")
}

/// Removes row and column `drop`.
pub fn reduced_laplacian(l: &LaplacianMatrix, drop: VertexId) -> Result<DMatrix<f64>> {
    let n = l.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "reduced Laplacian needs at least two vertices".into(),
        ));
    }
    if drop.0 >= n {
        return Err(Error::InvalidArgument(format!("vertex {} outside 0..{n}", drop.0)));
    }
    let skip = |i: usize| if i < drop.0 { i } else { i + 1 };
    Ok(DMatrix::from_fn(n - 1, n - 1, |i, j| l.matrix[(skip(i), skip(j))]))
}

/// Number of undirected connected components, by breadth-first search.
pub fn component_count(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut adj = vec![Vec::new(); n];
    for (a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    components
}

pub fn is_connected(g: &PoseGraph) -> bool {
    component_count(g.n(), g.endpoints()) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_graph(n: usize, pairs: &[(usize, usize)]) -> PoseGraph {
        let mut g = PoseGraph::with_vertex_count(n, 3).unwrap();
        for &(a, b) in pairs {
            g.add_edge(Edge::new(a, b, InfoMatrix::identity(3))).unwrap();
        }
        g
    }

    #[test]
    fn adjacency_of_triangle_path_and_singleton() {
        let k3 = adjacency_matrix(&unit_graph(3, &[(0, 1), (1, 2), (0, 2)]));
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(k3[(i, k)], u8::from(i != k));
            }
        }
        let single = adjacency_matrix(&unit_graph(1, &[]));
        assert_eq!(single.shape(), (1, 1));
        assert_eq!(single[(0, 0)], 0);
        let p3 = adjacency_matrix(&unit_graph(3, &[(0, 1), (1, 2)]));
        assert_eq!((p3[(0, 1)], p3[(1, 2)], p3[(0, 2)]), (1, 1, 0));
    }

    #[test]
    fn incidence_columns() {
        let q = incidence_matrix(&unit_graph(2, &[(0, 1)]));
        assert_eq!(q.column(0).as_slice(), &[1, -1]);
        let q = incidence_matrix(&unit_graph(3, &[(0, 1), (1, 2)]));
        assert_eq!(q.column(0).as_slice(), &[1, -1, 0]);
        assert_eq!(q.column(1).as_slice(), &[0, 1, -1]);
    }

    #[test]
    fn laplacian_examples() {
        let g = unit_graph(2, &[(0, 1)]);
        let l = laplacian(&g, &[3.0]).unwrap();
        assert_eq!(l.matrix().as_slice(), &[3.0, -3.0, -3.0, 3.0]);

        let k3 = unit_laplacian(&unit_graph(3, &[(0, 1), (1, 2), (0, 2)]));
        let expected = DMatrix::from_row_slice(3, 3, &[2., -1., -1., -1., 2., -1., -1., -1., 2.]);
        assert_eq!(k3.matrix(), &expected);

        let double = unit_graph(2, &[(0, 1), (1, 0)]);
        let l = laplacian(&double, &[1.0, 2.0]).unwrap();
        assert_eq!(l.matrix().as_slice(), &[3.0, -3.0, -3.0, 3.0]);
    }

    #[test]
    fn laplacian_rejects_non_positive_weight() {
        let g = unit_graph(3, &[(0, 1), (1, 2)]);
        assert!(matches!(
            laplacian(&g, &[1.0, 0.0]),
            Err(Error::NonPositiveWeight { edge: 1, .. })
        ));
        assert!(laplacian(&g, &[1.0, -2.0]).is_err());
        assert!(laplacian(&g, &[1.0]).is_err());
    }

    #[test]
    fn degree_minus_adjacency_is_laplacian_for_simple_graphs() {
        let g = unit_graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let a = adjacency_matrix(&g).map(f64::from);
        assert_eq!(degree_matrix(&g) - a, unit_laplacian(&g).matrix().clone());
    }

    #[test]
    fn reduced_laplacian_examples() {
        let k3 = unit_laplacian(&unit_graph(3, &[(0, 1), (1, 2), (0, 2)]));
        let r = reduced_laplacian(&k3, VertexId(0)).unwrap();
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[2., -1., -1., 2.]));
        assert_eq!(linalg::exact_determinant(&r), Some(3));

        let p3 = unit_laplacian(&unit_graph(3, &[(0, 1), (1, 2)]));
        for drop in 0..3 {
            let r = reduced_laplacian(&p3, VertexId(drop)).unwrap();
            assert_eq!(linalg::exact_determinant(&r), Some(1));
        }

        let single = unit_laplacian(&unit_graph(1, &[]));
        assert!(reduced_laplacian(&single, VertexId(0)).is_err());
    }

    #[test]
    fn connectivity() {
        let chain = unit_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert!(is_connected(&chain));
        let split = unit_graph(4, &[(0, 1), (2, 3)]);
        assert!(!is_connected(&split));
        assert_eq!(component_count(4, split.endpoints()), 2);
    }

    #[test]
    fn graph_validation() {
        let mut g = PoseGraph::with_vertex_count(2, 3).unwrap();
        assert!(g.add_edge(Edge::new(0, 0, InfoMatrix::identity(3))).is_err());
        assert!(g.add_edge(Edge::new(0, 2, InfoMatrix::identity(3))).is_err());
        assert!(matches!(
            g.add_edge(Edge::new(0, 1, InfoMatrix::identity(6))),
            Err(Error::MixedBlockDim { .. })
        ));
        assert!(PoseGraph::with_vertex_count(0, 3).is_err());
    }

    #[test]
    fn info_matrix_validation_and_unpacking() {
        let phi = InfoMatrix::from_upper_triangle(3, &[11.11, 0.0, 0.0, 11.11, 0.0, 250.0]).unwrap();
        assert_eq!(phi, InfoMatrix::diagonal(&[11.11, 11.11, 250.0]).unwrap());
        assert_eq!(phi.upper_triangle(), vec![11.11, 0.0, 0.0, 11.11, 0.0, 250.0]);

        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            InfoMatrix::new(indefinite.clone()),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let kept = InfoMatrix::from_symmetric_unchecked(indefinite).unwrap();
        assert!(!kept.is_positive_definite());
        let fixed = kept.clamped(1e-9);
        assert!(fixed.min_eigenvalue() >= 1e-9 * 0.999);

        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(InfoMatrix::new(asym), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn quaternion_normalisation_rules() {
        let p = Pose::se3([0.0; 3], [0.0, 0.0, 0.0, 1.0005]).unwrap();
        if let Pose::Se3 { rotation, .. } = p {
            let norm: f64 = rotation.iter().map(|q| q * q).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-9);
        }
        assert!(Pose::se3([0.0; 3], [0.0, 0.0, 0.0, 1.1]).is_err());
    }
}
