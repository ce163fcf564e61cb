//! Scalar edge weights derived from per-edge information matrices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{InfoMatrix, LaplacianMatrix, PoseGraph};
use crate::spectral::criteria::utility_p;

/// How an edge's information matrix `φ_j` collapses to a Laplacian weight `w_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightScheme {
    /// `w_j = 1`: the constant-uncertainty factorisation `Y = L ⊗ φ̄`.
    Unit,
    /// `w_j = λ_max(φ_j)`: `φ_j ⪯ w_j I`, so `Y ⪯ L_w ⊗ I`.
    MaxEig,
    /// `w_j = ‖φ_j‖_p`, the order-`p` power mean of `φ_j`'s eigenvalues (`p ≤ 1`).
    Matched(f64),
}

impl WeightScheme {
    pub fn matched(p: f64) -> Result<Self> {
        if p.is_nan() || p > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "matched weight order must satisfy p <= 1, got {p}"
            )));
        }
        Ok(WeightScheme::Matched(p))
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Unit => write!(f, "unit"),
            WeightScheme::MaxEig => write!(f, "maxeig"),
            WeightScheme::Matched(p) => write!(f, "matched:{p}"),
        }
    }
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "unit" => return Ok(WeightScheme::Unit),
            "maxeig" | "max-eig" | "inf" => return Ok(WeightScheme::MaxEig),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("matched:") {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad matched order in {s:?}")))?;
            return WeightScheme::matched(p);
        }
        Err(Error::InvalidArgument(format!(
            "unknown weight scheme {s:?} (expected unit, maxeig or matched:<p>)"
        )))
    }
}

impl Serialize for WeightScheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WeightScheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Weight of one edge under `scheme`. Rejects non positive definite `φ`.
pub fn edge_weight(phi: &InfoMatrix, scheme: WeightScheme) -> Result<f64> {
    let eig = phi.eigenvalues();
    if !(eig[0] > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: eig[0],
        });
    }
    match scheme {
        WeightScheme::Unit => Ok(1.0),
        WeightScheme::MaxEig => Ok(*eig.last().expect("non-empty")),
        WeightScheme::Matched(p) => utility_p(&eig, p),
    }
}

pub fn edge_weights(g: &PoseGraph, scheme: WeightScheme) -> Result<Vec<f64>> {
    g.edges().iter().map(|e| edge_weight(&e.info, scheme)).collect()
}

/// `L_w` with weights derived from each edge's information matrix.
pub fn weighted_laplacian(g: &PoseGraph, scheme: WeightScheme) -> Result<LaplacianMatrix> {
    let w = edge_weights(g, scheme)?;
    let edges: Vec<_> = g.endpoints().zip(&w).map(|((a, b), &w)| (a, b, w)).collect();
    LaplacianMatrix::from_weighted_edges(g.n(), &edges, Some(scheme))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frh_phi() -> InfoMatrix {
        InfoMatrix::diagonal(&[11.11, 11.11, 250.0]).unwrap()
    }

    #[test]
    fn max_eig_of_reference_edge() {
        assert_eq!(edge_weight(&frh_phi(), WeightScheme::MaxEig).unwrap(), 250.0);
    }

    #[test]
    fn identity_weighs_one_under_every_scheme() {
        let id = InfoMatrix::identity(3);
        for s in [
            WeightScheme::Unit,
            WeightScheme::MaxEig,
            WeightScheme::Matched(0.0),
            WeightScheme::Matched(1.0),
            WeightScheme::Matched(-1.0),
        ] {
            assert!((edge_weight(&id, s).unwrap() - 1.0).abs() < 1e-15, "{s}");
        }
    }

    #[test]
    fn matched_zero_is_cube_root_of_product() {
        // oracle: (11.11 * 11.11 * 250)^(1/3), computed directly from the diagonal
        let oracle = (11.11f64 * 11.11 * 250.0).cbrt();
        let w = edge_weight(&frh_phi(), WeightScheme::Matched(0.0)).unwrap();
        assert!((w - oracle).abs() < 1e-12 * oracle);
        assert!((w - 31.36).abs() < 0.01);
    }

    #[test]
    fn non_pd_rejected() {
        let bad = InfoMatrix::from_upper_triangle(2, &[1.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            edge_weight(&bad, WeightScheme::Unit),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("unit".parse::<WeightScheme>().unwrap(), WeightScheme::Unit);
        assert_eq!("maxeig".parse::<WeightScheme>().unwrap(), WeightScheme::MaxEig);
        assert_eq!(
            "matched:-0.5".parse::<WeightScheme>().unwrap(),
            WeightScheme::Matched(-0.5)
        );
        assert!("matched:2".parse::<WeightScheme>().is_err());
        assert!("bogus".parse::<WeightScheme>().is_err());
        assert_eq!(WeightScheme::Matched(0.0).to_string(), "matched:0");
    }
}
