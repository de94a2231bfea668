//! Dense complex operator matrices on a grid: finite-difference and spectral
//! discretisations, multiplication operators, commutators and their powers.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::grid::{BoundaryKind, Grid};

/// A dense square matrix acting on samples over a [`Grid`], together with a
/// human-readable label recording how it was built.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: Array2<Complex64>,
    grid: Arc<Grid>,
    label: String,
}

impl OperatorMatrix {
    /// Wrap raw entries.  Panics if the matrix is not square or does not
    /// match the grid size.
    pub fn from_entries(entries: Array2<Complex64>, grid: Arc<Grid>, label: impl Into<String>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator matrices are square");
        assert_eq!(entries.nrows(), grid.len(), "matrix size must match the grid");
        OperatorMatrix { entries, grid, label: label.into() }
    }

    /// The identity operator on `grid`.
    pub fn identity(grid: Arc<Grid>) -> Self {
        let m = grid.len();
        OperatorMatrix { entries: Array2::eye(m), grid, label: "Id".into() }
    }

    /// The zero operator on `grid`.
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let m = grid.len();
        OperatorMatrix { entries: Array2::zeros((m, m)), grid, label: "0".into() }
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    /// Matrix dimension (grid size).
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Apply to a sampled vector.
    pub fn apply(&self, v: &Array1<Complex64>) -> Array1<Complex64> {
        assert_eq!(v.len(), self.dim(), "vector length must match the operator");
        self.entries.dot(v)
    }

    /// Operator composition `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_same_grid(rhs, "compose")?;
        Ok(OperatorMatrix {
            entries: self.entries.dot(&rhs.entries),
            grid: self.grid.clone(),
            label: format!("{}*{}", self.label, rhs.label),
        })
    }

    /// Pointwise linear combination `self + c * rhs`.
    pub fn add_scaled(&self, c: Complex64, rhs: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_same_grid(rhs, "add_scaled")?;
        Ok(OperatorMatrix {
            entries: &self.entries + &rhs.entries.mapv(|e| c * e),
            grid: self.grid.clone(),
            label: format!("{}+c*{}", self.label, rhs.label),
        })
    }

    /// Scalar multiple.
    pub fn scaled(&self, c: Complex64) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.mapv(|e| c * e),
            grid: self.grid.clone(),
            label: format!("c*{}", self.label),
        }
    }

    /// Largest entry magnitude (used by residual checks and tests).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// True when every off-diagonal entry vanishes to rounding.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let m = self.dim();
        for i in 0..m {
            for j in 0..m {
                if i != j && self.entries[[i, j]].norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    fn check_same_grid(&self, rhs: &OperatorMatrix, context: &'static str) -> Result<()> {
        if !Arc::ptr_eq(&self.grid, &rhs.grid) && self.grid.as_ref() != rhs.grid.as_ref() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
                context,
            });
        }
        Ok(())
    }
}

/// One additive term of a linear differential operator: a variable
/// coefficient times a derivative of order 0, 1 or 2.
pub struct DerivativeTerm<'a> {
    /// Derivative order (0, 1 or 2).
    pub derivative: usize,
    /// Coefficient as a function of the spatial point.
    pub coefficient: &'a dyn Fn(f64) -> Complex64,
}

/// Finite-difference weights on arbitrary nodes (Fornberg's recursion).
///
/// Returns the weights `w` such that `sum_j w[j] f(nodes[j])` approximates
/// the `deriv`-th derivative of `f` at `x0` to the maximal order the node
/// set allows.  `deriv = 0` yields Lagrange interpolation weights.
pub fn fd_weights(nodes: &[f64], x0: f64, deriv: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > deriv, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; deriv + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[deriv]).collect()
}

/// Dense matrix of the `deriv`-th derivative on `grid` at the given accuracy
/// order, built from centred stencils (shifted one-sided near the ends of
/// `Extended` grids, odd reflection through the ends of `Dirichlet` grids).
pub fn fd_derivative_matrix(
    grid: &Arc<Grid>,
    deriv: usize,
    accuracy: usize,
) -> Result<OperatorMatrix> {
    if deriv == 0 {
        return Ok(OperatorMatrix::identity(grid.clone()));
    }
    if deriv > 2 {
        return Err(Error::UnsupportedOrder { order: deriv, context: "fd_derivative_matrix" });
    }
    if accuracy == 0 || accuracy % 2 != 0 {
        return Err(Error::UnsupportedOrder { order: accuracy, context: "stencil accuracy" });
    }
    // Centred stencil width: an odd count symmetric about the target point.
    let npoints = accuracy + 2 * ((deriv + 1) / 2) - 1;
    let m = grid.len();
    if m < npoints {
        return Err(Error::GridTooSmall { points: m, minimum: npoints });
    }
    let h = grid.spacing();
    let half = npoints / 2;
    let mut entries = Array2::<Complex64>::zeros((m, m));
    for i in 0..m {
        match grid.boundary() {
            BoundaryKind::Extended => {
                // Shift the window to stay inside the domain.
                let start = i.saturating_sub(half).min(m - npoints);
                let nodes: Vec<f64> = (0..npoints).map(|j| grid.points()[start + j]).collect();
                let w = fd_weights(&nodes, grid.points()[i], deriv);
                for (j, &wj) in w.iter().enumerate() {
                    entries[[i, start + j]] += Complex64::new(wj, 0.0);
                }
            }
            BoundaryKind::Dirichlet => {
                // Keep the window centred; values at the boundary nodes are
                // zero and nodes beyond them enter by odd reflection.
                let nodes: Vec<f64> = (0..npoints)
                    .map(|j| grid.points()[i] + (j as f64 - half as f64) * h)
                    .collect();
                let w = fd_weights(&nodes, grid.points()[i], deriv);
                for (j, &wj) in w.iter().enumerate() {
                    // Virtual index in the extended numbering where the left
                    // boundary sits at -1 and the right boundary at m.
                    let v = i as isize + j as isize - half as isize;
                    let (col, sign) = if v >= 0 && (v as usize) < m {
                        (v as usize, 1.0)
                    } else if v == -1 || v == m as isize {
                        continue; // boundary node, value zero
                    } else if v < -1 {
                        ((-v - 2) as usize, -1.0)
                    } else {
                        ((2 * m as isize - v) as usize, -1.0)
                    };
                    if col >= m {
                        return Err(Error::GridTooSmall { points: m, minimum: npoints + half });
                    }
                    entries[[i, col]] += Complex64::new(sign * wj, 0.0);
                }
            }
        }
    }
    Ok(OperatorMatrix::from_entries(entries, grid.clone(), format!("D{deriv}")))
}

/// Assemble a linear differential operator `sum_t c_t(x) d^{m_t}/dx^{m_t}`
/// as a dense matrix using order-4 stencils.
///
/// Derivative orders above 2 are rejected; coefficients must evaluate to
/// finite values on every grid point.
pub fn discretize_operator(terms: &[DerivativeTerm<'_>], grid: &Arc<Grid>) -> Result<OperatorMatrix> {
    let m = grid.len();
    let mut entries = Array2::<Complex64>::zeros((m, m));
    for term in terms {
        let base = fd_derivative_matrix(grid, term.derivative, 4)?;
        for (i, &x) in grid.points().iter().enumerate() {
            let c = (term.coefficient)(x);
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFiniteSample { context: "operator coefficient" });
            }
            for j in 0..m {
                entries[[i, j]] += c * base.entries()[[i, j]];
            }
        }
    }
    Ok(OperatorMatrix::from_entries(entries, grid.clone(), "L".to_string()))
}

/// Diagonal multiplication operator `v(x) -> f(x) v(x)`.
///
/// Fails if `f` evaluates to a non-finite value on any grid point.
pub fn multiplication_operator(
    f: impl Fn(f64) -> Complex64,
    grid: &Arc<Grid>,
) -> Result<OperatorMatrix> {
    let m = grid.len();
    let mut entries = Array2::<Complex64>::zeros((m, m));
    for (i, &x) in grid.points().iter().enumerate() {
        let v = f(x);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteSample { context: "multiplication operator samples" });
        }
        entries[[i, i]] = v;
    }
    Ok(OperatorMatrix::from_entries(entries, grid.clone(), "mult"))
}

/// Commutator `[A, B] = A B - B A`.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let ab = a.compose(b)?;
    let ba = b.compose(a)?;
    let mut out = ab.add_scaled(Complex64::new(-1.0, 0.0), &ba)?;
    out.set_label(format!("[{},{}]", a.label(), b.label()));
    Ok(out)
}

/// Iterated commutator `ad_L^k(A)`: `ad^0 = A`, `ad^k = [L, ad^{k-1}(A)]`.
///
/// The recursion is evaluated literally (same arithmetic path as the
/// definition), so `ad_power(l, a, k)` equals
/// `commutator(l, ad_power(l, a, k-1))` bit for bit.
pub fn ad_power(l: &OperatorMatrix, a: &OperatorMatrix, k: usize) -> Result<OperatorMatrix> {
    if k == 0 {
        let mut out = a.clone();
        out.set_label(format!("ad^0({})", a.label()));
        return Ok(out);
    }
    let inner = ad_power(l, a, k - 1)?;
    let mut out = commutator(l, &inner)?;
    out.set_label(format!("ad^{k}({})", a.label()));
    Ok(out)
}

/// The sine-spectral Dirichlet Laplacian on a `Dirichlet` grid over
/// `[lower, upper]`: exactly diagonal in the discrete sine basis with
/// eigenvalues `-(k pi / (upper-lower))^2`, returned as a dense matrix in
/// physical space.
///
/// Use [`sine_eigensystem`] to recover the (orthonormal, symmetric) basis for
/// semigroup evaluation.
pub fn sine_spectral_laplacian(grid: &Arc<Grid>) -> Result<OperatorMatrix> {
    let (basis, eigenvalues) = sine_eigensystem(grid)?;
    let m = grid.len();
    // L = V diag(lambda) V  (V is symmetric and orthogonal).
    let mut scaled = basis.clone();
    for k in 0..m {
        let lam = eigenvalues[k];
        for i in 0..m {
            scaled[[i, k]] *= lam;
        }
    }
    let entries = scaled.dot(&basis);
    Ok(OperatorMatrix::from_entries(entries, grid.clone(), "laplacian(sine)"))
}

/// Discrete sine basis and Laplacian eigenvalues for a Dirichlet grid.
///
/// Returns `(V, lambda)` with `V[i][k] = sqrt(2/(M+1)) sin((i+1)(k+1) pi /
/// (M+1))`; `V` is symmetric and orthogonal, so it is its own inverse.
pub fn sine_eigensystem(grid: &Arc<Grid>) -> Result<(Array2<Complex64>, Array1<Complex64>)> {
    if grid.boundary() != BoundaryKind::Dirichlet {
        return Err(Error::InvalidParameter {
            what: "grid boundary",
            detail: "sine basis requires a Dirichlet grid".into(),
        });
    }
    let m = grid.len();
    let span = grid.upper() - grid.lower();
    let norm = (2.0 / (m as f64 + 1.0)).sqrt();
    let mut basis = Array2::<Complex64>::zeros((m, m));
    for i in 0..m {
        for k in 0..m {
            let arg = (i + 1) as f64 * (k + 1) as f64 * std::f64::consts::PI / (m as f64 + 1.0);
            basis[[i, k]] = Complex64::new(norm * arg.sin(), 0.0);
        }
    }
    let eigenvalues: Array1<Complex64> = (0..m)
        .map(|k| {
            let mode = (k + 1) as f64 * std::f64::consts::PI / span;
            Complex64::new(-mode * mode, 0.0)
        })
        .collect();
    Ok((basis, eigenvalues))
}
