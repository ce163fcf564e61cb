//! The full Fisher information matrix `Y = Σ_j E_j ⊗ φ_j` of a pose-graph.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::PoseGraph;
use crate::spectral::criteria::Spectrum;
use crate::spectral::report::{OptimalityReport, Source};

/// Largest `nℓ` assembled densely.
pub const DENSE_FIM_LIMIT: usize = 6000;

/// Symmetric `nℓ × nℓ` information matrix with `ℓ × ℓ` blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockInfoMatrix {
    block_dim: usize,
    n: usize,
    m: usize,
    matrix: DMatrix<f64>,
}

impl BlockInfoMatrix {
    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        let l = self.block_dim;
        self.matrix.view((i * l, j * l), (l, l)).into_owned()
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of_symmetric(&self.matrix)
    }
}

/// Assembles `Y`: each edge `(a, b, φ)` adds `φ` to blocks `(a,a)` and
/// `(b,b)` and `−φ` to `(a,b)` and `(b,a)`.
pub fn assemble_fim(g: &PoseGraph) -> Result<BlockInfoMatrix> {
    let l = g.ell();
    let dim = g.n() * l;
    if dim > DENSE_FIM_LIMIT {
        return Err(Error::TooLarge {
            dim,
            cap: DENSE_FIM_LIMIT,
        });
    }
    let mut y = DMatrix::<f64>::zeros(dim, dim);
    for e in g.edges() {
        let phi = e.info.matrix();
        let (a, b) = (e.from.0 * l, e.to.0 * l);
        for r in 0..l {
            for c in 0..l {
                let v = phi[(r, c)];
                y[(a + r, a + c)] += v;
                y[(b + r, b + c)] += v;
                y[(a + r, b + c)] -= v;
                y[(b + r, a + c)] -= v;
            }
        }
    }
    Ok(BlockInfoMatrix {
        block_dim: l,
        n: g.n(),
        m: g.m(),
        matrix: y,
    })
}

/// Criteria of `Y` over its nonzero eigenvalues. A connected graph has
/// exactly `ℓ` zero eigenvalues (the gauge freedom); any more means the graph
/// is disconnected and the report carries `connected = false`.
pub fn criteria_from_fim(y: &BlockInfoMatrix) -> Result<OptimalityReport> {
    if y.n < 2 {
        return Err(Error::InvalidArgument(
            "information-matrix criteria need at least two vertices".into(),
        ));
    }
    OptimalityReport::from_spectrum(Source::Fim, y.n, y.m, &y.spectrum(), y.block_dim)
}
