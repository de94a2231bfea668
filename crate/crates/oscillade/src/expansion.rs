//! The modulated Fourier expansion itself.
//!
//! For `du/dt = L u + alpha e^{iωt} u` the solution expands in inverse
//! powers of the frequency with time-dependent mode coefficients:
//!
//! ```text
//! U⁽ⁿ⁾(t) = p_{0,0}(t) + Σ_{r=1}^{n} ω^{-r} Σ_{s=0}^{r} e^{s iωt} p_{r,s}(t),
//! ```
//!
//! where each `p_{r,s}` is a finite sum of terms
//! `scalar · N · e^{tL} · (F u0)` built from exact rational weights
//! ([`crate::combinatorics`]) and memoized operator words
//! ([`crate::opcalculus`]).  The same machinery produces, for each
//! nesting depth `d`, the split
//!
//! ```text
//! K^d e^{tL} u0 = S_n^d(t) + E_n^d(t):
//! ```
//!
//! [`SeriesPart`] is the finite sum of frequency channels with inverse
//! powers `(iω)^{-(d+|k|)}`, and [`RemainderPart`] collects the leftover
//! oscillatory integrals of size `ω^{-n}` (evaluated by resolved
//! quadrature, with one recursion level into depth `d-1`).  Scalars stay
//! exact rationals until the final quarter-turn rotation by `i^{-r}`, so
//! no floating-point phase error enters the coefficients.

use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64;

use crate::combinatorics::{
    enumerate_multi_indices, rational_times_i_power, remainder_coeff, series_coeff,
};
use crate::opcalculus::{OperatorCalculus, OperatorWord, WordExpr};
use crate::operators::{OperatorMatrix, SemigroupEvaluator};
use crate::oracle::quadrature::{oscillatory_integral_try_vec, QuadratureSpec};
use crate::problems::ProblemSpec;
use crate::{Error, Result};

/// One additive piece of a mode coefficient:
/// `scalar · word · e^{tL} · seed`.
#[derive(Clone)]
pub struct CoefficientTerm {
    scalar: Complex64,
    word: Arc<OperatorWord>,
    seed: Array1<Complex64>,
}

impl CoefficientTerm {
    pub fn scalar(&self) -> Complex64 {
        self.scalar
    }

    pub fn word(&self) -> &OperatorWord {
        &self.word
    }

    pub fn seed(&self) -> &Array1<Complex64> {
        &self.seed
    }

    fn evaluate_into(
        &self,
        semigroup: &SemigroupEvaluator,
        t: f64,
        weight: Complex64,
        acc: &mut Array1<Complex64>,
    ) {
        let flowed = semigroup.apply(t, &self.seed);
        if matches!(self.word.expr, WordExpr::Identity) {
            acc.scaled_add(weight * self.scalar, &flowed);
        } else {
            let applied = self.word.matrix.apply(&flowed);
            acc.scaled_add(weight * self.scalar, &applied);
        }
    }
}

/// The time-dependent coefficient `p_{r,s}` of the `ω^{-r} e^{s iωt}`
/// channel.
pub struct ModeCoefficient {
    r: usize,
    s: usize,
    terms: Vec<CoefficientTerm>,
}

impl ModeCoefficient {
    pub fn order(&self) -> usize {
        self.r
    }

    pub fn harmonic(&self) -> usize {
        self.s
    }

    pub fn terms(&self) -> &[CoefficientTerm] {
        &self.terms
    }

    /// `p_{r,s}(t) = Σ_terms scalar · word · e^{tL} · seed`.
    pub fn evaluate(&self, semigroup: &SemigroupEvaluator, t: f64) -> Array1<Complex64> {
        let mut acc = Array1::<Complex64>::zeros(semigroup.dim());
        for term in &self.terms {
            term.evaluate_into(semigroup, t, Complex64::new(1.0, 0.0), &mut acc);
        }
        acc
    }
}

/// The truncated expansion `U⁽ⁿ⁾` with every mode coefficient `r ≤ n`
/// precomputed.
pub struct Approximant {
    n: usize,
    omega: f64,
    semigroup: Arc<SemigroupEvaluator>,
    coefficients: Arc<Vec<ModeCoefficient>>,
}

impl Approximant {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The same mode coefficients evaluated at a different frequency.
    ///
    /// The coefficients `p_{r,s}` do not depend on `omega` (only the
    /// channel weights `ω^{-r} e^{s iωt}` do), so retargeting shares all
    /// precomputed terms.  Only valid when the underlying problem's
    /// initial data is itself frequency-independent.
    pub fn with_frequency(&self, omega: f64) -> Result<Approximant> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter {
                what: "omega",
                detail: format!("must be positive and finite, got {omega}"),
            });
        }
        Ok(Approximant {
            n: self.n,
            omega,
            semigroup: self.semigroup.clone(),
            coefficients: self.coefficients.clone(),
        })
    }

    /// The stored `p_{r,s}`, `0 ≤ s ≤ r ≤ n`.
    pub fn coefficient(&self, r: usize, s: usize) -> &ModeCoefficient {
        assert!(s <= r && r <= self.n, "coefficient index out of range");
        &self.coefficients[r * (r + 1) / 2 + s]
    }

    /// `U⁽ⁿ⁾(t)`.
    pub fn evaluate(&self, t: f64) -> Array1<Complex64> {
        self.evaluate_partial_sums(t)
            .pop()
            .expect("an approximant always has at least order 0")
    }

    /// All truncations at once: element `m` is `U⁽ᵐ⁾(t)` for `m = 0..=n`.
    /// One pass over the coefficients serves every order.
    pub fn evaluate_partial_sums(&self, t: f64) -> Vec<Array1<Complex64>> {
        let dim = self.semigroup.dim();
        let mut acc = Array1::<Complex64>::zeros(dim);
        let mut sums = Vec::with_capacity(self.n + 1);
        for r in 0..=self.n {
            let damp = self.omega.powi(-(r as i32));
            for s in 0..=r {
                let channel = Complex64::new(0.0, s as f64 * self.omega * t).exp();
                let weight = channel * damp;
                for term in &self.coefficient(r, s).terms {
                    term.evaluate_into(&self.semigroup, t, weight, &mut acc);
                }
            }
            sums.push(acc.clone());
        }
        sums
    }
}

/// One channel of the depth-`d` series: carries the exact scalar, the
/// inverse power of `ω`, the harmonic `e^{(d-ℓ) iωt}`, and the operator
/// sandwich.
pub struct SeriesTerm {
    scale: Complex64,
    inv_power: usize,
    harmonic: usize,
    word: Arc<OperatorWord>,
    seed: Array1<Complex64>,
}

/// The finite part `S_n^d` of the depth-`d` split.
pub struct SeriesPart {
    d: usize,
    n: usize,
    omega: f64,
    semigroup: Arc<SemigroupEvaluator>,
    terms: Vec<SeriesTerm>,
}

impl SeriesPart {
    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `(scale, inverse power, harmonic)` of every stored term, for
    /// structural tests.
    pub fn term_summaries(&self) -> Vec<(Complex64, usize, usize)> {
        self.terms.iter().map(|t| (t.scale, t.inv_power, t.harmonic)).collect()
    }

    /// `S_n^d(t)`.
    pub fn evaluate(&self, t: f64) -> Array1<Complex64> {
        let mut acc = Array1::<Complex64>::zeros(self.semigroup.dim());
        for term in &self.terms {
            let damp = self.omega.powi(-(term.inv_power as i32));
            let channel = Complex64::new(0.0, term.harmonic as f64 * self.omega * t).exp();
            let flowed = self.semigroup.apply(t, &term.seed);
            let applied = if matches!(term.word.expr, WordExpr::Identity) {
                flowed
            } else {
                term.word.matrix.apply(&flowed)
            };
            acc.scaled_add(term.scale * channel * damp, &applied);
        }
        acc
    }
}

/// One boundary integral of the remainder: weight, harmonic of the
/// oscillatory factor, and the operator sandwich inside the integral.
struct BoundaryTerm {
    weight: Complex64,
    harmonic: usize,
    word: Arc<OperatorWord>,
    seed: Array1<Complex64>,
}

/// The remainder `E_n^d`, evaluated by resolved quadrature; depth is
/// capped at 2 because nested panel counts multiply.
pub struct RemainderPart {
    d: usize,
    n: usize,
    omega: f64,
    semigroup: Arc<SemigroupEvaluator>,
    alpha: OperatorMatrix,
    quad: QuadratureSpec,
    terms: Vec<BoundaryTerm>,
    inner: Option<Box<RemainderPart>>,
}

impl RemainderPart {
    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `E_n^d(t)`: the explicit boundary integrals scaled by `ω^{-n}`
    /// plus the once-nested tail over `E_n^{d-1}`.
    pub fn evaluate(&self, t: f64) -> Result<Array1<Complex64>> {
        let dim = self.semigroup.dim();
        let mut boundary = Array1::<Complex64>::zeros(dim);
        for term in &self.terms {
            let harmonic = term.harmonic as f64 * self.omega;
            let integral = oscillatory_integral_try_vec(
                |tau| {
                    let flowed = self.semigroup.apply(tau, &term.seed);
                    let sandwiched = if matches!(term.word.expr, WordExpr::Identity) {
                        flowed
                    } else {
                        term.word.matrix.apply(&flowed)
                    };
                    let mut out = self.semigroup.apply(t - tau, &sandwiched);
                    let phase = Complex64::new(0.0, harmonic * tau).exp();
                    out.mapv_inplace(|z| z * phase);
                    Ok(out)
                },
                0.0,
                t,
                harmonic,
                dim,
                &self.quad,
            )?;
            boundary.scaled_add(term.weight, &integral);
        }
        let mut out = boundary.mapv(|z| z * self.omega.powi(-(self.n as i32)));
        if let Some(inner) = &self.inner {
            let tail = oscillatory_integral_try_vec(
                |tau| {
                    let deeper = inner.evaluate(tau)?;
                    let mut forced = self.alpha.apply(&deeper);
                    let phase = Complex64::new(0.0, self.omega * tau).exp();
                    forced.mapv_inplace(|z| z * phase);
                    Ok(self.semigroup.apply(t - tau, &forced))
                },
                0.0,
                t,
                self.d as f64 * self.omega,
                dim,
                &self.quad,
            )?;
            out += &tail;
        }
        Ok(out)
    }
}

/// The two halves of `K^d e^{tL} u0 = S_n^d + E_n^d` built consistently.
pub struct SeriesDecomposition {
    pub series: SeriesPart,
    pub remainder: RemainderPart,
}

impl SeriesDecomposition {
    /// `S_n^d(t) + E_n^d(t)`.
    pub fn total_at(&self, t: f64) -> Result<Array1<Complex64>> {
        let mut out = self.series.evaluate(t);
        out += &self.remainder.evaluate(t)?;
        Ok(out)
    }
}

/// Builder holding the memoized word factory for one `(L, alpha, u0)`
/// triple; every product of this builder shares the same cached words.
pub struct ExpansionBuilder {
    calculus: OperatorCalculus,
    u0: Array1<Complex64>,
    semigroup: Arc<SemigroupEvaluator>,
}

impl ExpansionBuilder {
    pub fn for_problem(prob: &ProblemSpec) -> Result<Self> {
        Ok(ExpansionBuilder {
            calculus: OperatorCalculus::new(prob.l().clone(), prob.alpha().clone())?,
            u0: prob.u0().clone(),
            semigroup: prob.semigroup().clone(),
        })
    }

    fn seed_for(&mut self, level: usize, k: &crate::combinatorics::MultiIndex) -> Result<Array1<Complex64>> {
        let boundary = self.calculus.boundary(level, k)?;
        Ok(if matches!(boundary.expr, WordExpr::Identity) {
            self.u0.clone()
        } else {
            boundary.matrix.apply(&self.u0)
        })
    }

    /// Build `p_{r,s}`: terms for every nesting depth `d` from
    /// `max(s,1)` to `r` and every depth tuple `k` with `|k| = r - d`;
    /// `p_{0,0}` is the bare flow of `u0`.
    pub fn mode_coefficient(&mut self, r: usize, s: usize) -> Result<ModeCoefficient> {
        if s > r {
            return Err(Error::IndexOutOfRange { what: "harmonic index", got: s, limit: r });
        }
        if r == 0 {
            let word = self.calculus.nested(&crate::combinatorics::MultiIndex::empty(), 1, 0)?;
            return Ok(ModeCoefficient {
                r,
                s,
                terms: vec![CoefficientTerm {
                    scalar: Complex64::new(1.0, 0.0),
                    word,
                    seed: self.u0.clone(),
                }],
            });
        }
        let mut terms = Vec::new();
        for d in s.max(1)..=r {
            for k in enumerate_multi_indices(d, r - d) {
                let weight = series_coeff(s, d, &k)?;
                let scalar = rational_times_i_power(&weight, -(r as i64));
                let word = self.calculus.nested(&k, d - s + 1, d)?;
                let seed = self.seed_for(d - s, &k)?;
                terms.push(CoefficientTerm { scalar, word, seed });
            }
        }
        Ok(ModeCoefficient { r, s, terms })
    }

    /// Build `U⁽ⁿ⁾` for a frequency: all `p_{r,s}` with `r ≤ n`.
    pub fn approximant(&mut self, n: usize, omega: f64) -> Result<Approximant> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter {
                what: "omega",
                detail: format!("must be positive and finite, got {omega}"),
            });
        }
        let mut coefficients = Vec::with_capacity((n + 1) * (n + 2) / 2);
        for r in 0..=n {
            for s in 0..=r {
                coefficients.push(self.mode_coefficient(r, s)?);
            }
        }
        Ok(Approximant {
            n,
            omega,
            semigroup: self.semigroup.clone(),
            coefficients: Arc::new(coefficients),
        })
    }

    /// Build `S_n^d`: depth tuples with `|k| ≤ n - d`, frequency channels
    /// `ℓ = 0..=d`, inverse powers `(iω)^{-(d+|k|)}`.
    pub fn series_part(&mut self, d: usize, n: usize, omega: f64) -> Result<SeriesPart> {
        if d == 0 {
            return Err(Error::InvalidParameter {
                what: "depth",
                detail: "series depth starts at 1".to_string(),
            });
        }
        if n < d {
            return Err(Error::InvalidParameter {
                what: "order",
                detail: format!("order {n} must be at least the depth {d}"),
            });
        }
        let mut terms = Vec::new();
        for total in 0..=(n - d) {
            for k in enumerate_multi_indices(d, total) {
                for ell in 0..=d {
                    let weight = series_coeff(d - ell, d, &k)?;
                    let scale = rational_times_i_power(&weight, -((d + total) as i64));
                    let word = self.calculus.nested(&k, ell + 1, d)?;
                    let seed = self.seed_for(ell, &k)?;
                    terms.push(SeriesTerm {
                        scale,
                        inv_power: d + total,
                        harmonic: d - ell,
                        word,
                        seed,
                    });
                }
            }
        }
        Ok(SeriesPart { d, n, omega, semigroup: self.semigroup.clone(), terms })
    }

    /// Build `E_n^d` (depth ≤ 2): boundary tuples with `|k| = n - d + 1`,
    /// remainder weights, and one recursion level into depth `d - 1`.
    pub fn remainder_part(
        &mut self,
        d: usize,
        n: usize,
        omega: f64,
        quad: &QuadratureSpec,
    ) -> Result<RemainderPart> {
        if d == 0 || d > 2 {
            return Err(Error::UnsupportedOrder { order: d, context: "remainder nesting depth" });
        }
        if n < d {
            return Err(Error::InvalidParameter {
                what: "order",
                detail: format!("order {n} must be at least the depth {d}"),
            });
        }
        let inner = if d > 1 {
            Some(Box::new(self.remainder_part(d - 1, n, omega, quad)?))
        } else {
            None
        };
        let mut terms = Vec::new();
        for k in enumerate_multi_indices(d, n - d + 1) {
            for ell in 0..d {
                let weight = remainder_coeff(d - ell, d, &k)?;
                let scalar = rational_times_i_power(&weight, -(n as i64));
                let word = self.calculus.nested(&k, ell + 1, d)?;
                let seed = self.seed_for(ell, &k)?;
                terms.push(BoundaryTerm { weight: scalar, harmonic: d - ell, word, seed });
            }
        }
        Ok(RemainderPart {
            d,
            n,
            omega,
            semigroup: self.semigroup.clone(),
            alpha: self.calculus.alpha().clone(),
            quad: *quad,
            terms,
            inner,
        })
    }

    /// Both halves of the depth-`d` split at once.
    pub fn decomposition(
        &mut self,
        d: usize,
        n: usize,
        omega: f64,
        quad: &QuadratureSpec,
    ) -> Result<SeriesDecomposition> {
        Ok(SeriesDecomposition {
            series: self.series_part(d, n, omega)?,
            remainder: self.remainder_part(d, n, omega, quad)?,
        })
    }
}
