//! Nested commutator words and the recursive lower-boundary operators.
//!
//! Repeated integration by parts of the oscillatory Duhamel integral leaves
//! two time-independent operator families behind, both indexed by a
//! multi-index `k` of commutator depths:
//!
//! * the nested words `N(k; l..r)` — identity for `l > r`, `ad_L^{k_l}(A)`
//!   for `l = r`, and `ad_L^{k_r}(A * N(k; l..r-1))` for `l < r`;
//! * the lower-boundary operators `F_level` — `F_0 = Id` and
//!   `F_level = - sum_{m=0}^{level-1} a_{level-m} * N(k; m+1..level) * F_m`
//!   with the exact rational weights of
//!   [`series_coeff`](crate::combinatorics::series_coeff).
//!
//! Words are materialised as dense matrices immediately and memoized by the
//! slice of depths they depend on, so repeated multi-index sweeps never
//! rebuild a word.  Every word carries a provenance expression that can be
//! re-materialised and compared against the stored matrix.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::combinatorics::{rational_to_f64, series_coeff, MultiIndex, Rational};
use crate::error::{Error, Result};
use crate::operators::{ad_power, OperatorMatrix};

/// Structural description of how an operator word was built.  The tree can
/// be re-materialised ([`WordExpr::materialize`]) to reproduce the matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum WordExpr {
    /// The identity operator.
    Identity,
    /// The multiplication operator `A` itself.
    Alpha,
    /// `ad_L^depth(inner)`.
    AdPower { depth: usize, inner: Box<WordExpr> },
    /// Left multiplication of the inner word by `A`.
    MulAlpha { inner: Box<WordExpr> },
    /// Operator composition `left * right`.
    Compose { left: Box<WordExpr>, right: Box<WordExpr> },
    /// Exact rational multiple of a word.
    Scaled { coeff: Rational, inner: Box<WordExpr> },
    /// Sum of words.
    Sum { terms: Vec<WordExpr> },
}

impl WordExpr {
    /// Rebuild the dense matrix this expression describes, following the
    /// same arithmetic path as the original construction.
    pub fn materialize(&self, l: &OperatorMatrix, alpha: &OperatorMatrix) -> Result<OperatorMatrix> {
        match self {
            WordExpr::Identity => Ok(OperatorMatrix::identity(l.grid().clone())),
            WordExpr::Alpha => Ok(alpha.clone()),
            WordExpr::AdPower { depth, inner } => {
                let base = inner.materialize(l, alpha)?;
                ad_power(l, &base, *depth)
            }
            WordExpr::MulAlpha { inner } => {
                let base = inner.materialize(l, alpha)?;
                alpha.compose(&base)
            }
            WordExpr::Compose { left, right } => {
                let lm = left.materialize(l, alpha)?;
                let rm = right.materialize(l, alpha)?;
                lm.compose(&rm)
            }
            WordExpr::Scaled { coeff, inner } => {
                let base = inner.materialize(l, alpha)?;
                Ok(base.scaled(Complex64::new(rational_to_f64(coeff), 0.0)))
            }
            WordExpr::Sum { terms } => {
                let mut acc: Option<OperatorMatrix> = None;
                for term in terms {
                    let m = term.materialize(l, alpha)?;
                    acc = Some(match acc {
                        None => m,
                        Some(a) => a.add_scaled(Complex64::new(1.0, 0.0), &m)?,
                    });
                }
                Ok(acc.unwrap_or_else(|| OperatorMatrix::zeros(l.grid().clone())))
            }
        }
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Identity => write!(f, "Id"),
            WordExpr::Alpha => write!(f, "A"),
            WordExpr::AdPower { depth, inner } => write!(f, "ad^{depth}({inner})"),
            WordExpr::MulAlpha { inner } => write!(f, "A*{inner}"),
            WordExpr::Compose { left, right } => write!(f, "({left})({right})"),
            WordExpr::Scaled { coeff, inner } => write!(f, "{coeff}*{inner}"),
            WordExpr::Sum { terms } => {
                write!(f, "[")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A materialised operator word: the dense matrix plus the expression tree
/// that produced it.
#[derive(Debug, Clone)]
pub struct OperatorWord {
    pub matrix: OperatorMatrix,
    pub expr: WordExpr,
}

/// Word factory for a fixed generator `L` and multiplication operator `A`,
/// with memoization over the depth slices that define each word.
pub struct OperatorCalculus {
    l: OperatorMatrix,
    alpha: OperatorMatrix,
    nested_cache: HashMap<Vec<usize>, Arc<OperatorWord>>,
    boundary_cache: HashMap<Vec<usize>, Arc<OperatorWord>>,
}

impl OperatorCalculus {
    /// Create a factory.  `l` and `alpha` must live on the same grid.
    pub fn new(l: OperatorMatrix, alpha: OperatorMatrix) -> Result<Self> {
        if l.dim() != alpha.dim() {
            return Err(Error::DimensionMismatch {
                left: l.dim(),
                right: alpha.dim(),
                context: "operator calculus",
            });
        }
        Ok(OperatorCalculus { l, alpha, nested_cache: HashMap::new(), boundary_cache: HashMap::new() })
    }

    pub fn generator(&self) -> &OperatorMatrix {
        &self.l
    }

    pub fn alpha(&self) -> &OperatorMatrix {
        &self.alpha
    }

    /// The nested word `N(k; l..r)` (1-based positions, `r <= k.len()`).
    ///
    /// `l > r` yields the identity; otherwise the word depends only on the
    /// depth values `k_l, ..., k_r`, which form the memoization key.
    pub fn nested(&mut self, k: &MultiIndex, l: usize, r: usize) -> Result<Arc<OperatorWord>> {
        if l > r {
            return Ok(Arc::new(OperatorWord {
                matrix: OperatorMatrix::identity(self.l.grid().clone()),
                expr: WordExpr::Identity,
            }));
        }
        if r > k.len() || l == 0 {
            return Err(Error::IndexOutOfRange { what: "nested word position", got: r, limit: k.len() });
        }
        let key: Vec<usize> = (l..=r).map(|i| k.entry1(i)).collect();
        if let Some(hit) = self.nested_cache.get(&key) {
            return Ok(hit.clone());
        }
        let word = if l == r {
            let depth = k.entry1(l);
            OperatorWord {
                matrix: ad_power(&self.l, &self.alpha, depth)?,
                expr: WordExpr::AdPower { depth, inner: Box::new(WordExpr::Alpha) },
            }
        } else {
            let inner = self.nested(k, l, r - 1)?;
            let depth = k.entry1(r);
            let product = self.alpha.compose(&inner.matrix)?;
            OperatorWord {
                matrix: ad_power(&self.l, &product, depth)?,
                expr: WordExpr::AdPower {
                    depth,
                    inner: Box::new(WordExpr::MulAlpha { inner: Box::new(inner.expr.clone()) }),
                },
            }
        };
        let word = Arc::new(word);
        self.nested_cache.insert(key, word.clone());
        Ok(word)
    }

    /// The lower-boundary operator `F_level` for the depth prefix
    /// `k_1, ..., k_level` of `k`.
    ///
    /// `F_0 = Id`; deeper levels follow the alternating recursion with the
    /// exact series weights.  Memoized by the prefix values.
    pub fn boundary(&mut self, level: usize, k: &MultiIndex) -> Result<Arc<OperatorWord>> {
        if level > k.len() {
            return Err(Error::IndexOutOfRange { what: "boundary level", got: level, limit: k.len() });
        }
        if level == 0 {
            return Ok(Arc::new(OperatorWord {
                matrix: OperatorMatrix::identity(self.l.grid().clone()),
                expr: WordExpr::Identity,
            }));
        }
        let key: Vec<usize> = (1..=level).map(|i| k.entry1(i)).collect();
        if let Some(hit) = self.boundary_cache.get(&key) {
            return Ok(hit.clone());
        }
        let mut matrix = OperatorMatrix::zeros(self.l.grid().clone());
        let mut terms = Vec::new();
        for m in 0..level {
            let weight = series_coeff(level - m, level, k)?;
            let nested = self.nested(k, m + 1, level)?;
            let lower = self.boundary(m, k)?;
            let product = nested.matrix.compose(&lower.matrix)?;
            let scale = Complex64::new(-rational_to_f64(&weight), 0.0);
            matrix = matrix.add_scaled(scale, &product)?;
            terms.push(WordExpr::Scaled {
                coeff: -weight,
                inner: Box::new(WordExpr::Compose {
                    left: Box::new(nested.expr.clone()),
                    right: Box::new(lower.expr.clone()),
                }),
            });
        }
        matrix.set_label(format!("F{level}"));
        let word = Arc::new(OperatorWord { matrix, expr: WordExpr::Sum { terms } });
        self.boundary_cache.insert(key, word.clone());
        Ok(word)
    }
}

/// One-shot construction of the nested word `N(k; l..r)`.
pub fn nested_operator(
    k: &MultiIndex,
    l: usize,
    r: usize,
    lop: &OperatorMatrix,
    alpha: &OperatorMatrix,
) -> Result<OperatorWord> {
    let mut calc = OperatorCalculus::new(lop.clone(), alpha.clone())?;
    let w = calc.nested(k, l, r)?;
    Ok(OperatorWord { matrix: w.matrix.clone(), expr: w.expr.clone() })
}

/// One-shot construction of the lower-boundary operator `F_level`.
pub fn boundary_operator(
    level: usize,
    k: &MultiIndex,
    lop: &OperatorMatrix,
    alpha: &OperatorMatrix,
) -> Result<OperatorWord> {
    let mut calc = OperatorCalculus::new(lop.clone(), alpha.clone())?;
    let w = calc.boundary(level, k)?;
    Ok(OperatorWord { matrix: w.matrix.clone(), expr: w.expr.clone() })
}
