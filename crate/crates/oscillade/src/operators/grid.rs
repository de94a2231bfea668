//! Uniform one-dimensional grids with quadrature weights.

use std::sync::Arc;

use crate::error::{Error, Result};

/// How the ends of the interval are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Homogeneous Dirichlet: the grid holds interior points only and the
    /// function is extended by zero (odd reflection) past the ends.
    Dirichlet,
    /// No boundary condition: the grid includes both endpoints and stencils
    /// fall back to one-sided differences near the ends.  Used for pure
    /// initial-value problems on an extended domain.
    Extended,
}

/// A uniform grid on `[lower, upper]` with per-point quadrature weights.
///
/// The weights form a trapezoid-type rule consistent with the boundary kind
/// and always sum to `upper - lower` exactly (up to rounding), so discrete
/// L2 norms approximate the continuum norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    lower: f64,
    upper: f64,
    boundary: BoundaryKind,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn boundary(&self) -> BoundaryKind {
        self.boundary
    }

    /// Number of stored points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid spacing `h`.
    pub fn spacing(&self) -> f64 {
        match self.boundary {
            BoundaryKind::Dirichlet => (self.upper - self.lower) / (self.len() + 1) as f64,
            BoundaryKind::Extended => (self.upper - self.lower) / (self.len() - 1) as f64,
        }
    }

    /// Stored point locations (interior only for Dirichlet grids).
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Quadrature weights aligned with [`Self::points`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted discrete L2 norm of a complex vector sampled on this grid.
    pub fn norm(&self, v: &ndarray::Array1<num_complex::Complex64>) -> f64 {
        assert_eq!(v.len(), self.len(), "vector/grid length mismatch");
        self.windowed_norm(v, self.lower, self.upper)
    }

    /// Weighted discrete L2 norm restricted to points inside
    /// `[window_lo, window_hi]` with trapezoid weights of the sub-grid.
    pub fn windowed_norm(
        &self,
        v: &ndarray::Array1<num_complex::Complex64>,
        window_lo: f64,
        window_hi: f64,
    ) -> f64 {
        assert_eq!(v.len(), self.len(), "vector/grid length mismatch");
        let h = self.spacing();
        let eps = 1e-12 * (self.upper - self.lower).abs();
        let mut acc = 0.0;
        let inside: Vec<usize> = (0..self.len())
            .filter(|&i| self.points[i] >= window_lo - eps && self.points[i] <= window_hi + eps)
            .collect();
        for (pos, &i) in inside.iter().enumerate() {
            let full_window = window_lo <= self.lower + eps && window_hi >= self.upper - eps;
            let w = if full_window {
                self.weights[i]
            } else if pos == 0 || pos == inside.len() - 1 {
                0.5 * h
            } else {
                h
            };
            acc += w * v[i].norm_sqr();
        }
        acc.sqrt()
    }
}

/// Build a uniform grid on `[lower, upper]`.
///
/// * `Dirichlet` grids store `points` interior nodes `lower + (i+1) h` with
///   `h = (upper-lower)/(points+1)`; the end nodes carry weight `3h/2` and
///   the rest `h`, so the weights sum exactly to `upper - lower`.
/// * `Extended` grids store `points` nodes including both endpoints with
///   `h = (upper-lower)/(points-1)` and plain trapezoid weights.
///
/// Fails for degenerate intervals or fewer than 4 points (the smallest
/// stencil the discretisations use).
pub fn build_grid(
    lower: f64,
    upper: f64,
    points: usize,
    boundary: BoundaryKind,
) -> Result<Arc<Grid>> {
    if !(upper > lower) || !lower.is_finite() || !upper.is_finite() {
        return Err(Error::DegenerateInterval { lower, upper });
    }
    if points < 4 {
        return Err(Error::GridTooSmall { points, minimum: 4 });
    }
    let (pts, wts) = match boundary {
        BoundaryKind::Dirichlet => {
            let h = (upper - lower) / (points + 1) as f64;
            let pts: Vec<f64> = (0..points).map(|i| lower + (i + 1) as f64 * h).collect();
            let mut wts = vec![h; points];
            // Absorb the half-cells next to the (zero-valued) boundary nodes
            // so the weights tile the whole interval.
            wts[0] = 1.5 * h;
            wts[points - 1] = 1.5 * h;
            (pts, wts)
        }
        BoundaryKind::Extended => {
            let h = (upper - lower) / (points - 1) as f64;
            let pts: Vec<f64> = (0..points).map(|i| lower + i as f64 * h).collect();
            let mut wts = vec![h; points];
            wts[0] = 0.5 * h;
            wts[points - 1] = 0.5 * h;
            (pts, wts)
        }
    };
    Ok(Arc::new(Grid { lower, upper, boundary, points: pts, weights: wts }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array1;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_grid_has_interior_points_and_tiling_weights() {
        let g = build_grid(0.0, PI, 64, BoundaryKind::Dirichlet).unwrap();
        assert_eq!(g.len(), 64);
        let h = PI / 65.0;
        assert!((g.spacing() - h).abs() < 1e-15);
        assert!((g.points()[0] - h).abs() < 1e-14);
        assert!((g.points()[63] - (PI - h)).abs() < 1e-13);
        let sum: f64 = g.weights().iter().sum();
        assert!((sum - PI).abs() < 1e-12 * PI, "weights must tile the interval");
    }

    #[test]
    fn extended_grid_includes_endpoints() {
        let g = build_grid(-1.0, 2.5, 449, BoundaryKind::Extended).unwrap();
        assert_eq!(g.len(), 449);
        assert_eq!(g.points()[0], -1.0);
        assert_eq!(g.points()[448], 2.5);
        assert!((g.spacing() - 1.0 / 128.0).abs() < 1e-15);
        let sum: f64 = g.weights().iter().sum();
        assert!((sum - 3.5).abs() < 1e-12 * 3.5);
    }

    #[test]
    fn rejects_degenerate_and_tiny_grids() {
        assert!(matches!(
            build_grid(1.0, 1.0, 16, BoundaryKind::Extended),
            Err(Error::DegenerateInterval { .. })
        ));
        assert!(matches!(
            build_grid(0.0, 1.0, 3, BoundaryKind::Extended),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn discrete_norm_of_sine_matches_continuum() {
        let g = build_grid(0.0, PI, 64, BoundaryKind::Dirichlet).unwrap();
        let v: Array1<Complex64> =
            g.points().iter().map(|&x| Complex64::new(x.sin(), 0.0)).collect();
        // ||sin||_{L2(0,pi)} = sqrt(pi/2); the end-weight correction is O(h^3).
        assert!((g.norm(&v) - (PI / 2.0).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn windowed_norm_restricts_to_subinterval() {
        let g = build_grid(-1.0, 2.5, 449, BoundaryKind::Extended).unwrap();
        let v: Array1<Complex64> = g.points().iter().map(|_| Complex64::new(1.0, 0.0)).collect();
        // ||1||_{L2(-1,1)} = sqrt(2).
        let n = g.windowed_norm(&v, -1.0, 1.0);
        assert!((n - 2.0_f64.sqrt()).abs() < 1e-12);
    }
}
