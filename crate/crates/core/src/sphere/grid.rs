use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sphere::legendre::legendre_poly_unchecked;

/// Gauss–Legendre latitudes (in μ = sin φ) times equispaced longitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    pub nlat: usize,
    pub nlon: usize,
    /// Strictly increasing, south to north.
    pub mu_nodes: Vec<f64>,
    pub mu_weights: Vec<f64>,
    pub lambda_nodes: Vec<f64>,
}

/// Nodes and weights of the `nlat`-point Gauss–Legendre rule on [−1, 1],
/// nodes in increasing order.
pub fn gauss_legendre_nodes(nlat: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if nlat == 0 {
        return Err(Error::InvalidArgument("nlat must be at least 1".into()));
    }
    let n = nlat;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Root i counted from the north end, refined by Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_poly_unchecked(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_poly_unchecked(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

impl SphereGrid {
    pub fn new(nlat: usize, nlon: usize) -> Result<Self> {
        if nlon == 0 {
            return Err(Error::InvalidArgument("nlon must be at least 1".into()));
        }
        let (mu_nodes, mu_weights) = gauss_legendre_nodes(nlat)?;
        let lambda_nodes = (0..nlon)
            .map(|k| 2.0 * PI * k as f64 / nlon as f64)
            .collect();
        Ok(SphereGrid {
            nlat,
            nlon,
            mu_nodes,
            mu_weights,
            lambda_nodes,
        })
    }

    /// Smallest dealiased grid for triangular truncation `t`.
    pub fn for_truncation(t: usize) -> Result<Self> {
        let (nlat, nlon) = min_grid(t);
        SphereGrid::new(nlat, nlon)
    }

    pub fn len(&self) -> usize {
        self.nlat * self.nlon
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks the dealiasing bounds for truncation `t`.
    pub fn check_truncation(&self, t: usize) -> Result<()> {
        let (min_nlat, min_nlon) = dealiasing_bounds(t);
        if self.nlat < min_nlat || self.nlon < min_nlon {
            return Err(Error::Resolution {
                truncation: t,
                nlat: self.nlat,
                nlon: self.nlon,
                min_nlat,
                min_nlon,
            });
        }
        Ok(())
    }

    /// Integral over the unit sphere of grid values stored row-major
    /// (latitude index outer, longitude inner).
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        let dl = 2.0 * PI / self.nlon as f64;
        values
            .chunks(self.nlon)
            .zip(&self.mu_weights)
            .map(|(row, w)| w * row.iter().sum::<f64>())
            .sum::<f64>()
            * dl
    }
}

/// `(nlat, nlon)` lower bounds for quadratic-product dealiasing at truncation `t`.
pub fn dealiasing_bounds(t: usize) -> (usize, usize) {
    ((3 * t + 1).div_ceil(2), 3 * t + 1)
}

/// The smallest grid meeting [`dealiasing_bounds`], with even `nlon`.
pub fn min_grid(t: usize) -> (usize, usize) {
    let (nlat, nlon) = dealiasing_bounds(t);
    (nlat.max(1), nlon + nlon % 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_and_two_point_rules() {
        let (x, w) = gauss_legendre_nodes(1).unwrap();
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
        let (x, w) = gauss_legendre_nodes(2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
        assert!(gauss_legendre_nodes(0).is_err());
    }

    #[test]
    fn quartic_moment_with_64_nodes() {
        let (x, w) = gauss_legendre_nodes(64).unwrap();
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((q - 0.4).abs() < 1e-14);
    }

    #[test]
    fn nodes_increase_and_are_symmetric() {
        for n in [3, 10, 31, 64, 97] {
            let (x, w) = gauss_legendre_nodes(n).unwrap();
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for i in 0..n {
                assert_eq!(x[i], -x[n - 1 - i]);
                assert_eq!(w[i], w[n - 1 - i]);
            }
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn default_grid_for_t42() {
        let g = SphereGrid::for_truncation(42).unwrap();
        assert_eq!((g.nlat, g.nlon), (64, 128));
        assert_eq!(g.lambda_nodes[32], 2.0 * PI * 32.0 / 128.0);
        assert!(g.check_truncation(42).is_ok());
        assert!(matches!(
            g.check_truncation(43),
            Err(Error::Resolution { .. })
        ));
    }
}
