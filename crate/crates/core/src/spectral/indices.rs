//! Spectral graph indices: spanning-tree count, algebraic connectivity,
//! Kirchhoff index, and the graph-health metrics reported for explored maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_connected, reduced_laplacian, LaplacianMatrix, PoseGraph, VertexId};
use crate::linalg::{self, cholesky_log_det};
use crate::sparse::SparseLaplacian;
use crate::spectral::criteria::Spectrum;

/// `log t̃(G)`: log of the (weighted) spanning-tree count, from the
/// log-determinant of the reduced Laplacian. `-inf` when disconnected.
pub fn spanning_tree_count(l: &LaplacianMatrix) -> f64 {
    if l.n() == 1 {
        return 0.0;
    }
    let reduced = reduced_laplacian(l, VertexId(0)).expect("n >= 2");
    cholesky_log_det(&reduced).unwrap_or(f64::NEG_INFINITY)
}

/// Exact spanning-tree count of an integer-weighted Laplacian, by
/// fraction-free elimination of the reduced Laplacian. `None` for
/// non-integer weights or overflow.
pub fn spanning_tree_count_exact(l: &LaplacianMatrix) -> Option<u128> {
    if l.n() == 1 {
        return Some(1);
    }
    let reduced = reduced_laplacian(l, VertexId(0)).ok()?;
    let det = linalg::exact_determinant(&reduced)?;
    u128::try_from(det).ok()
}

/// `Σ log μ_k − log n` over the nonzero Laplacian eigenvalues; equals
/// [`spanning_tree_count`] for connected graphs.
pub fn log_tree_count_from_spectrum(spectrum: &Spectrum) -> f64 {
    if spectrum.zero_count() != 1 {
        return f64::NEG_INFINITY;
    }
    spectrum.nonzero().iter().map(|v| v.ln()).sum::<f64>() - (spectrum.dim() as f64).ln()
}

/// Second-smallest Laplacian eigenvalue; zero (up to tolerance) iff disconnected.
pub fn algebraic_connectivity(l: &LaplacianMatrix) -> Result<f64> {
    if l.n() < 2 {
        return Err(Error::InvalidArgument(
            "algebraic connectivity needs at least two vertices".into(),
        ));
    }
    let spectrum = Spectrum::from_eigenvalues(l.eigenvalues());
    Ok(if spectrum.zero_count() >= 2 {
        0.0
    } else {
        spectrum.values()[1]
    })
}

/// `Kf(G) = n Σ_{k≥2} 1/μ_k`, the sum of pairwise effective resistances.
/// Defined for unit weights.
pub fn kirchhoff_index(l: &LaplacianMatrix) -> Result<f64> {
    let spectrum = Spectrum::from_eigenvalues(l.eigenvalues());
    if spectrum.zero_count() != 1 {
        return Err(Error::Disconnected {
            zero_count: spectrum.zero_count(),
            expected: 1,
        });
    }
    let n = l.n() as f64;
    Ok(n * spectrum.nonzero().iter().map(|v| 1.0 / v).sum::<f64>())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HealthMetrics {
    /// `d̄ = 2m/n`
    pub avg_degree: f64,
    /// `τ̄ = log t(G) / log t(K_n)`
    pub norm_tree_connectivity: f64,
}

/// Average degree and normalised tree connectivity on unit weights.
///
/// `τ̄` is 0 for disconnected graphs and for `n ≤ 2`, where `log t(K_n) = 0`.
pub fn graph_health_metrics(g: &PoseGraph) -> HealthMetrics {
    let n = g.n();
    let avg_degree = 2.0 * g.m() as f64 / n as f64;
    let norm_tree_connectivity = if n <= 2 || !is_connected(g) {
        0.0
    } else {
        let log_t = SparseLaplacian::unit_from_graph(g).log_det_reduced();
        // Cayley: t(K_n) = n^(n-2)
        let log_tk = (n as f64 - 2.0) * (n as f64).ln();
        log_t / log_tk
    };
    HealthMetrics {
        avg_degree,
        norm_tree_connectivity,
    }
}
