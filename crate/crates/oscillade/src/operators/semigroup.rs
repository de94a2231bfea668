//! Semigroup evaluation `v -> e^{tL} v` in three modes: eigen-basis
//! diagonalisation, scaling-and-squaring with a degree-13 Pade approximant,
//! and an exact characteristic shift for constant-coefficient advection.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::grid::Grid;
use crate::operators::matrix::{fd_weights, OperatorMatrix};

/// Which evaluation strategy a [`SemigroupEvaluator`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemigroupMode {
    /// Diagonalisation in a supplied eigen-basis; `O(M^2)` per application
    /// and exact in `t`, preferred when a trustworthy basis is known.
    Eigen,
    /// Matrix exponential by scaling-and-squaring (Pade degree 13), cached
    /// per distinct time; the generic fallback.
    ScalingSquaring,
    /// Shift along characteristics by local polynomial interpolation; exact
    /// semigroup of `d/dx` on a uniform grid up to interpolation error.
    Shift,
}

enum Kernel {
    Eigen {
        basis: Array2<Complex64>,
        inverse: Array2<Complex64>,
        eigenvalues: Array1<Complex64>,
    },
    Pade {
        matrix: Array2<Complex64>,
        cache: Mutex<HashMap<u64, Arc<Array2<Complex64>>>>,
    },
    Shift {
        lower: f64,
        upper: f64,
        spacing: f64,
        points: Vec<f64>,
        stencil: usize,
    },
}

/// Applies `e^{tL}` to sampled vectors for a fixed generator `L`.
pub struct SemigroupEvaluator {
    kernel: Kernel,
    dim: usize,
    source_label: String,
}

/// Residual tolerance accepted when validating a supplied eigen-basis.
const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

impl SemigroupEvaluator {
    /// Generic constructor: scaling-and-squaring on the dense matrix.
    pub fn new(source: &OperatorMatrix) -> Self {
        Self::scaling_squaring(source)
    }

    /// Scaling-and-squaring evaluator for an arbitrary generator.
    pub fn scaling_squaring(source: &OperatorMatrix) -> Self {
        SemigroupEvaluator {
            kernel: Kernel::Pade {
                matrix: source.entries().clone(),
                cache: Mutex::new(HashMap::new()),
            },
            dim: source.dim(),
            source_label: source.label().to_string(),
        }
    }

    /// Eigen-basis evaluator.  Validates `L V = V diag(lambda)` and
    /// `V W = I` to a relative residual of `1e-8` and refuses the basis
    /// otherwise, so a bad factorisation cannot silently corrupt results.
    pub fn from_eigenpairs(
        source: &OperatorMatrix,
        basis: Array2<Complex64>,
        inverse: Array2<Complex64>,
        eigenvalues: Array1<Complex64>,
    ) -> Result<Self> {
        let m = source.dim();
        if basis.nrows() != m || basis.ncols() != m || inverse.nrows() != m || eigenvalues.len() != m
        {
            return Err(Error::DimensionMismatch {
                left: basis.nrows(),
                right: m,
                context: "eigen basis",
            });
        }
        // Residual of the eigen relation, relative to the generator size.
        let lv = source.entries().dot(&basis);
        let mut scaled = basis.clone();
        for k in 0..m {
            let lam = eigenvalues[k];
            for i in 0..m {
                scaled[[i, k]] *= lam;
            }
        }
        let scale = source.max_abs().max(1.0);
        let mut residual = 0.0f64;
        for (a, b) in lv.iter().zip(scaled.iter()) {
            residual = residual.max((a - b).norm());
        }
        residual /= scale;
        let vw = basis.dot(&inverse);
        let mut inv_residual = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let want = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::default() };
                inv_residual = inv_residual.max((vw[[i, j]] - want).norm());
            }
        }
        let worst = residual.max(inv_residual);
        if worst > EIGEN_RESIDUAL_TOL {
            return Err(Error::FactorizationFailed { residual: worst, tolerance: EIGEN_RESIDUAL_TOL });
        }
        Ok(SemigroupEvaluator {
            kernel: Kernel::Eigen { basis, inverse, eigenvalues },
            dim: m,
            source_label: source.label().to_string(),
        })
    }

    /// Try the supplied eigen-basis, fall back to scaling-and-squaring if
    /// its residual check fails.
    pub fn eigen_or_pade(
        source: &OperatorMatrix,
        basis: Array2<Complex64>,
        inverse: Array2<Complex64>,
        eigenvalues: Array1<Complex64>,
    ) -> Self {
        match Self::from_eigenpairs(source, basis, inverse, eigenvalues) {
            Ok(s) => s,
            Err(_) => Self::scaling_squaring(source),
        }
    }

    /// Shift evaluator for `L = d/dx` on a uniform grid: `(e^{tL} v)(x) =
    /// v(x + t)`, evaluated by `stencil`-point polynomial interpolation.
    ///
    /// Evaluation points beyond the grid are clamped to the last node, so
    /// rows whose characteristic leaves the domain return bounded (but
    /// meaningless) values; callers keep a margin and report only on the
    /// physical window.
    pub fn advection_shift(grid: &Arc<Grid>, stencil: usize) -> Result<Self> {
        if stencil < 2 || stencil > grid.len() {
            return Err(Error::InvalidParameter {
                what: "shift stencil",
                detail: format!("{stencil} points on a {}-point grid", grid.len()),
            });
        }
        Ok(SemigroupEvaluator {
            kernel: Kernel::Shift {
                lower: grid.points()[0],
                upper: *grid.points().last().unwrap(),
                spacing: grid.spacing(),
                points: grid.points().to_vec(),
                stencil,
            },
            dim: grid.len(),
            source_label: "d/dx".to_string(),
        })
    }

    pub fn mode(&self) -> SemigroupMode {
        match self.kernel {
            Kernel::Eigen { .. } => SemigroupMode::Eigen,
            Kernel::Pade { .. } => SemigroupMode::ScalingSquaring,
            Kernel::Shift { .. } => SemigroupMode::Shift,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    /// Apply `e^{tL}` to a vector.
    pub fn apply(&self, t: f64, v: &Array1<Complex64>) -> Array1<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length must match the generator");
        match &self.kernel {
            Kernel::Eigen { basis, inverse, eigenvalues } => {
                let mut coords = inverse.dot(v);
                for (c, lam) in coords.iter_mut().zip(eigenvalues.iter()) {
                    *c *= (lam * t).exp();
                }
                basis.dot(&coords)
            }
            Kernel::Pade { matrix, cache } => {
                let key = t.to_bits();
                let exp_t = {
                    let mut guard = cache.lock().expect("semigroup cache poisoned");
                    if let Some(hit) = guard.get(&key) {
                        hit.clone()
                    } else {
                        let fresh = Arc::new(expm(&matrix.mapv(|e| e * t)));
                        guard.insert(key, fresh.clone());
                        fresh
                    }
                };
                exp_t.dot(v)
            }
            Kernel::Shift { lower, upper, spacing, points, stencil } => {
                let m = points.len();
                let half_offset = *stencil as isize / 2 - 1;
                // On a uniform grid every row whose stencil window is not
                // clamped sees the same node offsets relative to its own
                // evaluation point, so one weight vector serves them all.
                let shared_start_off = (t / spacing).floor() as isize - half_offset;
                let shared_offsets: Vec<f64> = (0..*stencil)
                    .map(|j| (shared_start_off + j as isize) as f64 * spacing)
                    .collect();
                let shared_w = fd_weights(&shared_offsets, t, 0);
                let mut out = Array1::<Complex64>::zeros(m);
                for i in 0..m {
                    let unclamped = points[i] + t;
                    let x = unclamped.clamp(*lower, *upper);
                    let approx = ((x - lower) / spacing).floor() as isize;
                    let start_i =
                        (approx - half_offset).clamp(0, (m - stencil) as isize);
                    let start = start_i as usize;
                    let mut acc = Complex64::default();
                    if x == unclamped && start_i == i as isize + shared_start_off {
                        for (j, &wj) in shared_w.iter().enumerate() {
                            acc += wj * v[start + j];
                        }
                    } else {
                        let nodes = &points[start..start + stencil];
                        let w = fd_weights(nodes, x, 0);
                        for (j, &wj) in w.iter().enumerate() {
                            acc += wj * v[start + j];
                        }
                    }
                    out[i] = acc;
                }
                out
            }
        }
    }
}

/// Matrix exponential by scaling-and-squaring with a degree-13 diagonal
/// Pade approximant (Higham's method, complex arithmetic).
pub fn expm(a: &Array2<Complex64>) -> Array2<Complex64> {
    const THETA13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let m = a.nrows();
    let norm = one_norm(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as u32 } else { 0 };
    let scaled = a.mapv(|e| e / 2f64.powi(s as i32));

    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let eye = Array2::<Complex64>::eye(m);

    let w1 = &a6.mapv(|e| e * B[13]) + &a4.mapv(|e| e * B[11]) + &a2.mapv(|e| e * B[9]);
    let w2 = &a6.mapv(|e| e * B[7])
        + &a4.mapv(|e| e * B[5])
        + &a2.mapv(|e| e * B[3])
        + &eye.mapv(|e| e * B[1]);
    let u = scaled.dot(&(a6.dot(&w1) + w2));
    let z1 = &a6.mapv(|e| e * B[12]) + &a4.mapv(|e| e * B[10]) + &a2.mapv(|e| e * B[8]);
    let v = a6.dot(&z1)
        + &a6.mapv(|e| e * B[6])
        + &a4.mapv(|e| e * B[4])
        + &a2.mapv(|e| e * B[2])
        + &eye.mapv(|e| e * B[0]);

    let lhs = &v - &u;
    let rhs = &v + &u;
    let mut exp = lu_solve(&lhs, &rhs).expect("Pade denominator must be invertible");
    for _ in 0..s {
        exp = exp.dot(&exp);
    }
    exp
}

fn one_norm(a: &Array2<Complex64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let mut col = 0.0;
        for i in 0..a.nrows() {
            col += a[[i, j]].norm();
        }
        best = best.max(col);
    }
    best
}

/// Solve `A X = B` for dense complex `A` by LU with partial pivoting.
pub fn lu_solve(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch { left: a.ncols(), right: b.nrows(), context: "lu_solve" });
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        // Pivot on the largest remaining magnitude in this column.
        let mut pivot_row = col;
        let mut pivot_mag = lu[[col, col]].norm();
        for r in col + 1..n {
            let mag = lu[[r, col]].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return Err(Error::FactorizationFailed { residual: 0.0, tolerance: f64::MIN_POSITIVE });
        }
        if pivot_row != col {
            perm.swap(col, pivot_row);
            for j in 0..n {
                let tmp = lu[[col, j]];
                lu[[col, j]] = lu[[pivot_row, j]];
                lu[[pivot_row, j]] = tmp;
            }
            for j in 0..x.ncols() {
                let tmp = x[[col, j]];
                x[[col, j]] = x[[pivot_row, j]];
                x[[pivot_row, j]] = tmp;
            }
        }
        let inv_pivot = Complex64::new(1.0, 0.0) / lu[[col, col]];
        for r in col + 1..n {
            let factor = lu[[r, col]] * inv_pivot;
            lu[[r, col]] = factor;
            for j in col + 1..n {
                let sub = factor * lu[[col, j]];
                lu[[r, j]] -= sub;
            }
            for j in 0..x.ncols() {
                let sub = factor * x[[col, j]];
                x[[r, j]] -= sub;
            }
        }
    }
    // Back substitution.
    for col in (0..n).rev() {
        for j in 0..x.ncols() {
            let mut acc = x[[col, j]];
            for k in col + 1..n {
                acc -= lu[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = acc / lu[[col, col]];
        }
    }
    Ok(x)
}
