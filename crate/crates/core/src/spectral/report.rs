//! Optimality reports from the Laplacian route and the bound audit against
//! the information-matrix route.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{reduced_laplacian, InfoMatrix, LaplacianMatrix, VertexId};
use crate::linalg::cholesky_log_det;
use crate::spectral::criteria::{utility_p_over, CriteriaValues, Criterion, Spectrum};

/// Relative slack allowed before `criterion(Y) > criterion(L_w)` counts as a violation.
pub const BOUND_REL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Fim,
    Laplacian,
}

/// T/D/A computed with the sum over nonzero eigenvalues divided by the full
/// matrix dimension (`n` or `nℓ`), the normalisation of the closed forms
/// `T = 2m·w̄/n`, `D = (n·t̃)^(1/n)`, `A = n²/Kf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullDimForm {
    pub t_opt: f64,
    pub d_opt: f64,
    pub a_opt: f64,
}

/// Criteria of one graph state. The primary fields average over the nonzero
/// eigenvalues only (`n−1` for `L`, `(n−1)ℓ` for `Y`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub source: Source,
    pub n: usize,
    pub m: usize,
    /// Order of the analysed matrix.
    pub dim: usize,
    pub zero_count: usize,
    pub connected: bool,
    pub t_opt: f64,
    pub d_opt: f64,
    pub a_opt: f64,
    pub e_opt: f64,
    pub e_tilde_opt: f64,
    /// `ln` of `d_opt`; `-inf` when disconnected.
    pub log_d_opt: f64,
    pub full_dim: FullDimForm,
}

impl OptimalityReport {
    pub fn values(&self) -> CriteriaValues {
        CriteriaValues {
            t: self.t_opt,
            d: self.d_opt,
            a: self.a_opt,
            e: self.e_opt,
            e_tilde: self.e_tilde_opt,
        }
    }

    pub fn get(&self, c: Criterion) -> f64 {
        self.values().get(c)
    }

    /// Builds a report from a spectrum whose zero eigenvalues have been counted.
    pub(crate) fn from_spectrum(
        source: Source,
        n: usize,
        m: usize,
        spectrum: &Spectrum,
        expected_zeros: usize,
    ) -> Result<Self> {
        let nz = spectrum.nonzero();
        let connected = spectrum.zero_count() == expected_zeros && !nz.is_empty();
        if !connected {
            return Ok(Self::disconnected(source, n, m, spectrum));
        }
        let c = CriteriaValues::of(nz)?;
        let dim = spectrum.dim();
        Ok(Self {
            source,
            n,
            m,
            dim,
            zero_count: spectrum.zero_count(),
            connected,
            t_opt: c.t,
            d_opt: c.d,
            a_opt: c.a,
            e_opt: c.e,
            e_tilde_opt: c.e_tilde,
            log_d_opt: c.d.ln(),
            full_dim: FullDimForm {
                t_opt: utility_p_over(nz, 1.0, dim)?,
                d_opt: utility_p_over(nz, 0.0, dim)?,
                a_opt: utility_p_over(nz, -1.0, dim)?,
            },
        })
    }

    fn disconnected(source: Source, n: usize, m: usize, spectrum: &Spectrum) -> Self {
        Self {
            source,
            n,
            m,
            dim: spectrum.dim(),
            zero_count: spectrum.zero_count(),
            connected: false,
            t_opt: 0.0,
            d_opt: 0.0,
            a_opt: 0.0,
            e_opt: 0.0,
            e_tilde_opt: spectrum.max(),
            log_d_opt: f64::NEG_INFINITY,
            full_dim: FullDimForm {
                t_opt: 0.0,
                d_opt: 0.0,
                a_opt: 0.0,
            },
        }
    }
}

/// Criteria of `L_w` with its single zero eigenvalue dropped.
///
/// T comes from the trace, D from the Cholesky log-determinant of the reduced
/// Laplacian, E from the Fiedler value; A and Ẽ from the spectrum. With
/// `phi_bar` the constant-uncertainty factorisation `Y = L ⊗ φ̄` is applied,
/// so the result is directly comparable with the information-matrix route.
///
/// Disconnected graphs yield zeros (and `-inf` log D) for every criterion but
/// Ẽ, with `connected = false`.
pub fn criteria_from_laplacian(
    l: &LaplacianMatrix,
    phi_bar: Option<&InfoMatrix>,
) -> Result<OptimalityReport> {
    let n = l.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "Laplacian criteria need at least two vertices".into(),
        ));
    }
    let spectrum = Spectrum::from_eigenvalues(l.eigenvalues());
    let phi = phi_bar.map(|p| CriteriaValues::of(&p.eigenvalues())).transpose()?;
    if spectrum.zero_count() != 1 {
        let mut r = OptimalityReport::from_spectrum(Source::Laplacian, n, l.edge_count(), &spectrum, 1)?;
        if let Some(phi) = phi {
            r.e_tilde_opt *= phi.e_tilde;
        }
        return Ok(r);
    }

    let nf = n as f64;
    let nz = spectrum.nonzero();
    let trace = l.trace();
    let log_prod = match cholesky_log_det(&reduced_laplacian(l, VertexId(0))?) {
        Some(ld) => nf.ln() + ld,
        None => nz.iter().map(|v| v.ln()).sum(),
    };
    let inv_sum: f64 = nz.iter().map(|v| 1.0 / v).sum();

    let mut t = trace / (nf - 1.0);
    let mut log_d = log_prod / (nf - 1.0);
    let mut a = (nf - 1.0) / inv_sum;
    let mut e = nz[0];
    let mut e_tilde = *nz.last().expect("connected graph with n >= 2");
    let mut full_dim = FullDimForm {
        t_opt: trace / nf,
        d_opt: (log_prod / nf).exp(),
        a_opt: nf / inv_sum,
    };
    if let Some(phi) = phi {
        t *= phi.t;
        log_d += phi.d.ln();
        a *= phi.a;
        e *= phi.e;
        e_tilde *= phi.e_tilde;
        full_dim.t_opt *= phi.t;
        full_dim.d_opt *= phi.d.powf((nf - 1.0) / nf);
        full_dim.a_opt *= phi.a;
    }
    Ok(OptimalityReport {
        source: Source::Laplacian,
        n,
        m: l.edge_count(),
        dim: n,
        zero_count: 1,
        connected: true,
        t_opt: t,
        d_opt: log_d.exp(),
        a_opt: a,
        e_opt: e,
        e_tilde_opt: e_tilde,
        log_d_opt: log_d,
        full_dim,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub criterion: Criterion,
    pub fim: f64,
    pub laplacian: f64,
    /// `(fim − laplacian) / |laplacian|`
    pub rel_gap: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub violations: Vec<BoundViolation>,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Flags every criterion whose information-matrix value exceeds the
/// Laplacian value by more than [`BOUND_REL_SLACK`].
pub fn verify_bound(report_fim: &OptimalityReport, report_lap: &OptimalityReport) -> BoundCheck {
    let violations = Criterion::ALL
        .iter()
        .filter_map(|&c| bound_violation(c, report_fim.get(c), report_lap.get(c)))
        .collect();
    BoundCheck { violations }
}

pub(crate) fn bound_violation(criterion: Criterion, fim: f64, lap: f64) -> Option<BoundViolation> {
    let gap = fim - lap;
    (gap > BOUND_REL_SLACK * lap.abs()).then(|| BoundViolation {
        criterion,
        fim,
        laplacian: lap,
        rel_gap: if lap == 0.0 { f64::INFINITY } else { gap / lap.abs() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{unit_laplacian, Edge, PoseGraph};
    use crate::spectral::criteria::{utility_p, utility_p_over};
    use crate::spectral::indices::kirchhoff_index;

    fn unit_graph(n: usize, pairs: &[(usize, usize)]) -> PoseGraph {
        let mut g = PoseGraph::with_vertex_count(n, 3).unwrap();
        for &(a, b) in pairs {
            g.add_edge(Edge::new(a, b, InfoMatrix::identity(3))).unwrap();
        }
        g
    }

    fn rel(a: f64, b: f64) -> f64 {
        crate::linalg::relative_difference(a, b)
    }

    #[test]
    fn k3_both_conventions() {
        let l = unit_laplacian(&unit_graph(3, &[(0, 1), (1, 2), (0, 2)]));
        let r = criteria_from_laplacian(&l, None).unwrap();
        // oracle: nonzero spectrum {3, 3}
        assert!(rel(r.t_opt, 3.0) < 1e-12);
        // closed form 2m/n with m = 3, n = 3
        assert!(rel(r.full_dim.t_opt, 2.0) < 1e-12);
        assert!(rel(r.d_opt, 3.0) < 1e-12);
        // (n t)^(1/n) = (3 * 3)^(1/3)
        assert!(rel(r.full_dim.d_opt, 9f64.cbrt()) < 1e-12);
    }

    #[test]
    fn p2_d_opt_conventions() {
        let l = unit_laplacian(&unit_graph(2, &[(0, 1)]));
        let r = criteria_from_laplacian(&l, None).unwrap();
        assert!(rel(r.d_opt, 2.0) < 1e-12);
        assert!(rel(r.full_dim.d_opt, 2f64.sqrt()) < 1e-12);
    }

    #[test]
    fn star_e_opt_is_fiedler() {
        let l = unit_laplacian(&unit_graph(4, &[(0, 1), (0, 2), (0, 3)]));
        let r = criteria_from_laplacian(&l, None).unwrap();
        assert!(rel(r.e_opt, 1.0) < 1e-12);
        assert!(rel(r.e_tilde_opt, 4.0) < 1e-12);
    }

    #[test]
    fn closed_forms_match_generic_utility() {
        let g = unit_graph(
            7,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (2, 5), (1, 4)],
        );
        let w = [1.0, 2.5, 0.3, 4.0, 1.0, 7.5, 2.0, 0.9, 3.3];
        let l = crate::graph::laplacian(&g, &w).unwrap();
        let r = criteria_from_laplacian(&l, None).unwrap();
        let spec = Spectrum::from_eigenvalues(l.eigenvalues());
        let nz = spec.nonzero();
        assert!(rel(r.t_opt, utility_p(nz, 1.0).unwrap()) < 1e-7);
        assert!(rel(r.d_opt, utility_p(nz, 0.0).unwrap()) < 1e-7);
        assert!(rel(r.e_opt, utility_p(nz, f64::NEG_INFINITY).unwrap()) < 1e-7);
        assert!(rel(r.full_dim.d_opt, utility_p_over(nz, 0.0, 7).unwrap()) < 1e-7);
        // T full-dimension form = 2m w̄ / n
        let w_bar = w.iter().sum::<f64>() / w.len() as f64;
        assert!(rel(r.full_dim.t_opt, 2.0 * 9.0 * w_bar / 7.0) < 1e-12);
    }

    #[test]
    fn full_a_opt_is_n_squared_over_kirchhoff() {
        let g = unit_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]);
        let l = unit_laplacian(&g);
        let r = criteria_from_laplacian(&l, None).unwrap();
        let kf = kirchhoff_index(&l).unwrap();
        assert!(rel(r.full_dim.a_opt, 25.0 / kf) < 1e-9);
    }

    #[test]
    fn disconnected_is_flagged() {
        let l = unit_laplacian(&unit_graph(4, &[(0, 1), (2, 3)]));
        let r = criteria_from_laplacian(&l, None).unwrap();
        assert!(!r.connected);
        assert_eq!((r.t_opt, r.d_opt, r.a_opt, r.e_opt), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.log_d_opt, f64::NEG_INFINITY);
        assert!(rel(r.e_tilde_opt, 2.0) < 1e-12);
    }

    #[test]
    fn phi_bar_scales_every_criterion() {
        let l = unit_laplacian(&unit_graph(3, &[(0, 1), (1, 2)]));
        let phi = InfoMatrix::diagonal(&[2.0, 2.0, 2.0]).unwrap();
        let base = criteria_from_laplacian(&l, None).unwrap();
        let scaled = criteria_from_laplacian(&l, Some(&phi)).unwrap();
        for c in Criterion::ALL {
            assert!(rel(scaled.get(c), 2.0 * base.get(c)) < 1e-12, "{c:?}");
        }
        // p = 0 full-dimension form carries the (n-1)/n exponent on φ̄
        assert!(rel(scaled.full_dim.d_opt, base.full_dim.d_opt * 2f64.powf(2.0 / 3.0)) < 1e-12);
    }

    #[test]
    fn bound_flags_only_exceeding_criteria() {
        let l = unit_laplacian(&unit_graph(3, &[(0, 1), (1, 2)]));
        let lap = criteria_from_laplacian(&l, None).unwrap();
        assert!(verify_bound(&lap, &lap).holds());
        let mut fim = lap;
        fim.t_opt *= 2.0;
        let check = verify_bound(&fim, &lap);
        assert_eq!(check.violations.len(), 1);
        assert_eq!(check.violations[0].criterion, Criterion::T);
    }
}
