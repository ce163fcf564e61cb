//! Seeded synthetic pose-graphs: odometry chains, optionally with loop
//! closures where a lattice random walk revisits a cell.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{Edge, InfoMatrix, Pose, PoseGraph, Vertex, VertexId};

/// Eigenvalue range of randomised information matrices.
pub const RANDOM_EIG_RANGE: (f64, f64) = (1.0, 300.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Chain,
    ChainWithLoops { seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhiSource {
    Constant(InfoMatrix),
    Randomized { seed: u64, ell: usize },
}

/// Random SPD matrix `Q diag(λ) Qᵀ` with `λ` log-uniform in `[lo, hi]` and
/// `Q` the orthogonal factor of a Gaussian matrix.
pub fn random_spd(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> InfoMatrix {
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let q = g.qr().q();
    let (llo, lhi) = (lo.ln(), hi.ln());
    let lambda = DVector::from_fn(dim, |_, _| rng.gen_range(llo..=lhi).exp());
    let m = &q * DMatrix::from_diagonal(&lambda) * q.transpose();
    let m = (&m + m.transpose()) * 0.5;
    InfoMatrix::from_symmetric_unchecked(m).expect("symmetrised finite matrix")
}

const HEADINGS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Lattice cells of a persistent random walk and the loop closures it implies.
fn lattice_walk(n: usize, seed: u64) -> (Vec<(i64, i64)>, Vec<(usize, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = Vec::with_capacity(n);
    let mut last_visit: HashMap<(i64, i64), usize> = HashMap::new();
    let mut loops = Vec::new();
    let mut pos = (0i64, 0i64);
    let mut heading = 0usize;
    for i in 0..n {
        if i > 0 {
            let r: f64 = rng.gen();
            if r > 0.7 {
                heading = (heading + if r > 0.85 { 1 } else { 3 }) % 4;
            }
            pos = (pos.0 + HEADINGS[heading].0, pos.1 + HEADINGS[heading].1);
        }
        if let Some(&j) = last_visit.get(&pos) {
            if i - j >= 3 && rng.gen_bool(0.5) {
                loops.push((j, i));
            }
        }
        last_visit.insert(pos, i);
        cells.push(pos);
    }
    (cells, loops)
}

fn relative_planar(a: (i64, i64), b: (i64, i64)) -> Pose {
    Pose::Se2 {
        x: (b.0 - a.0) as f64,
        y: (b.1 - a.1) as f64,
        theta: 0.0,
    }
}

fn relative_spatial(a: (i64, i64), b: (i64, i64)) -> Pose {
    Pose::Se3 {
        translation: [(b.0 - a.0) as f64, (b.1 - a.1) as f64, 0.0],
        rotation: [0.0, 0.0, 0.0, 1.0],
    }
}

/// Pure function of `(kind, n, phi)`: the same arguments always yield the
/// same vertex poses, edge list and information matrices.
pub fn synth_graph(kind: GraphKind, n: usize, phi: &PhiSource) -> Result<PoseGraph> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("synthetic graphs need n >= 2, got {n}")));
    }
    let ell = match phi {
        PhiSource::Constant(p) => p.dim(),
        PhiSource::Randomized { ell, .. } => *ell,
    };
    if ell != 3 && ell != 6 {
        return Err(Error::InvalidArgument(format!("block dimension must be 3 or 6, got {ell}")));
    }
    let (cells, loops) = match kind {
        GraphKind::Chain => ((0..n as i64).map(|i| (i, 0)).collect(), Vec::new()),
        GraphKind::ChainWithLoops { seed } => lattice_walk(n, seed),
    };
    let mut phi_rng = match phi {
        PhiSource::Randomized { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        PhiSource::Constant(_) => None,
    };
    let mut next_phi = || match (&mut phi_rng, phi) {
        (Some(rng), _) => random_spd(rng, ell, RANDOM_EIG_RANGE.0, RANDOM_EIG_RANGE.1),
        (None, PhiSource::Constant(p)) => p.clone(),
        (None, PhiSource::Randomized { .. }) => unreachable!(),
    };

    let pose_of = |c: (i64, i64)| {
        if ell == 3 {
            Pose::Se2 {
                x: c.0 as f64,
                y: c.1 as f64,
                theta: 0.0,
            }
        } else {
            Pose::Se3 {
                translation: [c.0 as f64, c.1 as f64, 0.0],
                rotation: [0.0, 0.0, 0.0, 1.0],
            }
        }
    };
    let root = Vertex {
        id: VertexId(0),
        pose: Some(pose_of(cells[0])),
    };
    let mut g = PoseGraph::new(ell, vec![root], Vec::new())?;
    let rel = |a: usize, b: usize| {
        if ell == 3 {
            relative_planar(cells[a], cells[b])
        } else {
            relative_spatial(cells[a], cells[b])
        }
    };
    let mut loop_iter = loops.iter().peekable();
    for i in 1..n {
        g.add_vertex(Some(pose_of(cells[i])));
        g.add_edge(Edge::new(i - 1, i, next_phi()).with_relative_pose(rel(i - 1, i)))?;
        while let Some(&&(j, k)) = loop_iter.peek() {
            if k != i {
                break;
            }
            g.add_edge(Edge::new(j, k, next_phi()).with_relative_pose(rel(j, k)))?;
            loop_iter.next();
        }
    }
    Ok(g)
}
