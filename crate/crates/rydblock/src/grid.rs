//! Sampled correlation functions on a time grid (reduced units, 1/tau_b).

use crate::analytic;
use serde::{Deserialize, Serialize};

/// Values held by a [`CorrelationGrid`]: a diagonal profile or a full 2-D
/// grid in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridData {
    Diagonal(Vec<f64>),
    Full(Vec<f64>),
}

/// Sampled G1 values on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationGrid {
    times: Vec<f64>,
    data: GridData,
}

impl CorrelationGrid {
    pub fn diagonal(times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(times.len(), values.len(), "diagonal length mismatch");
        CorrelationGrid {
            times,
            data: GridData::Diagonal(values),
        }
    }

    pub fn full(times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(
            times.len() * times.len(),
            values.len(),
            "full grid must hold n^2 values"
        );
        CorrelationGrid {
            times,
            data: GridData::Full(values),
        }
    }

    /// Sample the diagonal G1(tau; tau) on the given times.
    pub fn g1_diag_sampled(times: Vec<f64>, r_in: f64, tau_b: f64) -> Self {
        let values = times
            .iter()
            .map(|&t| analytic::g1_diag(t, r_in, tau_b))
            .collect();
        CorrelationGrid::diagonal(times, values)
    }

    /// Sample the full 2-D G1(tau; tau') on the product grid.
    pub fn g1_offdiag_sampled(times: Vec<f64>, r_in: f64, tau_b: f64) -> Self {
        Self::full_from_fn(times, |t1, t2| analytic::g1_offdiag(t1, t2, r_in, tau_b))
    }

    /// Build a full grid from an arbitrary kernel function.
    pub fn full_from_fn(times: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = times.len();
        let mut values = Vec::with_capacity(n * n);
        for &t1 in &times {
            for &t2 in &times {
                values.push(f(t1, t2));
            }
        }
        CorrelationGrid::full(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn data(&self) -> &GridData {
        &self.data
    }

    pub fn is_full(&self) -> bool {
        matches!(self.data, GridData::Full(_))
    }

    pub fn diagonal_values(&self) -> Option<&[f64]> {
        match &self.data {
            GridData::Diagonal(v) => Some(v),
            GridData::Full(_) => None,
        }
    }

    /// Value at grid indices (i, j); for diagonal grids only i == j exists.
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        match &self.data {
            GridData::Diagonal(v) => {
                assert_eq!(i, j, "diagonal grid holds only equal-time values");
                v[i]
            }
            GridData::Full(v) => v[i * self.times.len() + j],
        }
    }

    /// Integrate a diagonal profile over its time grid (composite Simpson on
    /// uniform grids with an even interval count, trapezoid otherwise).
    pub fn integrate_diagonal(&self) -> Option<f64> {
        let values = self.diagonal_values()?;
        Some(crate::quad::integrate_samples(&self.times, values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_of_full_matches_analytic() {
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let g = CorrelationGrid::g1_offdiag_sampled(times.clone(), 5.0, 1.0);
        for (i, &t) in times.iter().enumerate() {
            assert_eq!(g.value_at(i, i), analytic::g1_diag(t, 5.0, 1.0));
        }
    }

    #[test]
    fn integrate_diagonal_simpson() {
        // integral of sin on [0, pi] = 2
        let n = 201;
        let times: Vec<f64> = (0..n)
            .map(|i| std::f64::consts::PI * i as f64 / (n - 1) as f64)
            .collect();
        let vals: Vec<f64> = times.iter().map(|t| t.sin()).collect();
        let g = CorrelationGrid::diagonal(times, vals);
        assert!((g.integrate_diagonal().unwrap() - 2.0).abs() < 1e-9);
    }
}
