#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use posegraph_spectra::dataset::random_spd;
use posegraph_spectra::{Edge, InfoMatrix, PoseGraph};

/// Connected simple graph: a random spanning tree plus `extra` distinct chords.
pub fn random_connected_pairs(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        pairs.push(ordered(parent, order[i]));
    }
    let mut missing: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|p| !pairs.contains(p))
        .collect();
    missing.shuffle(rng);
    pairs.extend(missing.into_iter().take(extra));
    pairs
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

pub fn graph_from_pairs(n: usize, ell: usize, pairs: &[(usize, usize)], mut phi: impl FnMut() -> InfoMatrix) -> PoseGraph {
    let mut g = PoseGraph::with_vertex_count(n, ell).unwrap();
    for &(a, b) in pairs {
        g.add_edge(Edge::new(a, b, phi())).unwrap();
    }
    g
}

pub fn unit_graph(n: usize, pairs: &[(usize, usize)]) -> PoseGraph {
    graph_from_pairs(n, 3, pairs, || InfoMatrix::identity(3))
}

pub fn complete_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

pub fn spd(rng: &mut ChaCha8Rng, dim: usize) -> InfoMatrix {
    random_spd(rng, dim, 1.0, 300.0)
}

/// Plain Laplacian of weighted pairs, built entry by entry.
pub fn laplacian_by_hand(n: usize, pairs: &[(usize, usize)], w: &[f64]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for (&(a, b), &w) in pairs.iter().zip(w) {
        l[(a, a)] += w;
        l[(b, b)] += w;
        l[(a, b)] -= w;
        l[(b, a)] -= w;
    }
    l
}

/// Ascending eigenvalues through nalgebra only.
pub fn eig(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
