//! The power-mean utility family over eigenvalues and the criteria it induces.
//!
//! `utility_p` is the order-`p` power mean: `p = 1` arithmetic (T-opt),
//! `p = 0` geometric (D-opt), `p = -1` harmonic (A-opt), `p -> -inf` minimum
//! (E-opt) and `p -> +inf` maximum (Ẽ-opt).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Eigenvalues sorted ascending, with the count of those treated as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    zero_count: usize,
}

impl Spectrum {
    pub fn from_eigenvalues(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let largest = values.last().copied().unwrap_or(0.0);
        let tol = linalg::zero_threshold(largest);
        let zero_count = values.iter().take_while(|&&v| v <= tol).count();
        Self { values, zero_count }
    }

    pub fn of_symmetric(m: &DMatrix<f64>) -> Self {
        Self::from_eigenvalues(linalg::symmetric_eigenvalues(m))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn zero_count(&self) -> usize {
        self.zero_count
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// The eigenvalues above the zero tolerance.
    pub fn nonzero(&self) -> &[f64] {
        &self.values[self.zero_count..]
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

fn check_domain(values: &[f64], p: f64) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if p.is_nan() {
        return Err(Error::InvalidArgument("utility order p is NaN".into()));
    }
    for &v in values {
        if v < 0.0 || !v.is_finite() || (p <= 0.0 && v == 0.0) {
            return Err(Error::SingularSpectrum { value: v, p });
        }
    }
    Ok(())
}

/// Order-`p` power mean of `values`.
///
/// Zero eigenvalues must already be removed by the caller when `p <= 0`.
pub fn utility_p(values: &[f64], p: f64) -> Result<f64> {
    utility_p_over(values, p, values.len())
}

/// Power mean whose average divides by `count` instead of `values.len()`.
///
/// With `count` equal to the full matrix dimension and `values` the nonzero
/// eigenvalues, this is the normalisation under which the graph criteria take
/// their closed forms (`2m·w̄/n`, `(n·t̃)^(1/n)`, `n²/Kf`).
pub fn utility_p_over(values: &[f64], p: f64, count: usize) -> Result<f64> {
    check_domain(values, p)?;
    if count < values.len() {
        return Err(Error::InvalidArgument(format!(
            "normalisation count {count} is smaller than the {} eigenvalues",
            values.len()
        )));
    }
    let count = count as f64;
    if p == f64::INFINITY {
        return Ok(values.iter().copied().fold(f64::MIN, f64::max));
    }
    if p == f64::NEG_INFINITY {
        return Ok(values.iter().copied().fold(f64::MAX, f64::min));
    }
    if p == 0.0 {
        let mean_log = values.iter().map(|v| v.ln()).sum::<f64>() / count;
        return Ok(mean_log.exp());
    }
    // Factor out the largest value so large |p| does not overflow.
    let scale = values.iter().copied().fold(0.0, f64::max);
    let mean = values.iter().map(|v| (v / scale).powf(p)).sum::<f64>() / count;
    Ok(scale * mean.powf(1.0 / p))
}

pub fn t_opt(values: &[f64]) -> Result<f64> {
    utility_p(values, 1.0)
}

pub fn d_opt(values: &[f64]) -> Result<f64> {
    utility_p(values, 0.0)
}

pub fn a_opt(values: &[f64]) -> Result<f64> {
    utility_p(values, -1.0)
}

pub fn e_opt(values: &[f64]) -> Result<f64> {
    utility_p(values, f64::NEG_INFINITY)
}

pub fn e_tilde_opt(values: &[f64]) -> Result<f64> {
    utility_p(values, f64::INFINITY)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    T,
    D,
    A,
    E,
    #[serde(rename = "e_tilde")]
    ETilde,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::T,
        Criterion::D,
        Criterion::A,
        Criterion::E,
        Criterion::ETilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::T => "T-opt",
            Criterion::D => "D-opt",
            Criterion::A => "A-opt",
            Criterion::E => "E-opt",
            Criterion::ETilde => "Ẽ-opt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t" | "t-opt" => Some(Criterion::T),
            "d" | "d-opt" => Some(Criterion::D),
            "a" | "a-opt" => Some(Criterion::A),
            "e" | "e-opt" => Some(Criterion::E),
            "e_tilde" | "etilde" | "emax" => Some(Criterion::ETilde),
            _ => None,
        }
    }
}

/// The five criteria of one spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriteriaValues {
    pub t: f64,
    pub d: f64,
    pub a: f64,
    pub e: f64,
    pub e_tilde: f64,
}

impl CriteriaValues {
    /// Criteria of strictly positive `values`.
    pub fn of(values: &[f64]) -> Result<Self> {
        Ok(Self {
            t: t_opt(values)?,
            d: d_opt(values)?,
            a: a_opt(values)?,
            e: e_opt(values)?,
            e_tilde: e_tilde_opt(values)?,
        })
    }

    pub fn get(&self, c: Criterion) -> f64 {
        match c {
            Criterion::T => self.t,
            Criterion::D => self.d,
            Criterion::A => self.a,
            Criterion::E => self.e,
            Criterion::ETilde => self.e_tilde,
        }
    }

    /// `Ẽ ≥ T ≥ D ≥ A ≥ E` up to `rel` relative slack.
    pub fn ordering_holds(&self, rel: f64) -> bool {
        let chain = [self.e_tilde, self.t, self.d, self.a, self.e];
        chain
            .windows(2)
            .all(|w| w[0] >= w[1] - rel * w[0].abs().max(w[1].abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_mean_examples() {
        assert!((utility_p(&[1.0, 2.0, 3.0], 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((utility_p(&[1.0, 4.0], 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((utility_p(&[1.0, 1.0 / 3.0], -1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn criteria_closed_forms() {
        let iso = CriteriaValues::of(&[2.0, 2.0, 2.0]).unwrap();
        for c in Criterion::ALL {
            assert!((iso.get(c) - 2.0).abs() < 1e-15, "{c:?}");
        }
        let v = CriteriaValues::of(&[1.0, 4.0]).unwrap();
        assert!((v.t - 2.5).abs() < 1e-15);
        assert!((v.d - 2.0).abs() < 1e-15);
        assert!((v.a - 1.6).abs() < 1e-15);
        assert_eq!(v.e, 1.0);
        assert_eq!(v.e_tilde, 4.0);
    }

    #[test]
    fn singular_input_rejected_for_non_positive_orders() {
        assert!(matches!(
            utility_p(&[0.0, 1.0], 0.0),
            Err(Error::SingularSpectrum { .. })
        ));
        assert!(utility_p(&[0.0, 1.0], -1.0).is_err());
        assert!(utility_p(&[0.0, 1.0], 1.0).is_ok());
        assert!(matches!(utility_p(&[], 1.0), Err(Error::EmptySpectrum)));
    }

    #[test]
    fn p_to_zero_is_continuous() {
        let vals = [0.3, 1.7, 12.0, 250.0];
        let d = utility_p(&vals, 0.0).unwrap();
        let near = utility_p(&vals, 1e-7).unwrap();
        assert!((near - d).abs() / d < 1e-5);
        let near = utility_p(&vals, -1e-7).unwrap();
        assert!((near - d).abs() / d < 1e-5);
    }

    #[test]
    fn full_dimension_normalisation() {
        // nonzero {3, 3} of K3 averaged over n = 3
        let t = utility_p_over(&[3.0, 3.0], 1.0, 3).unwrap();
        assert!((t - 2.0).abs() < 1e-15);
        assert!(utility_p_over(&[3.0, 3.0], 1.0, 1).is_err());
    }

    #[test]
    fn spectrum_counts_zeros_relative_to_scale() {
        let s = Spectrum::from_eigenvalues(vec![500.0, -1e-10, 2.0, 3e-8]);
        assert_eq!(s.zero_count(), 2);
        assert_eq!(s.nonzero(), &[2.0, 500.0]);
    }
}
