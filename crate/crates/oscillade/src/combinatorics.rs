//! Multi-indices and the exact rational weight families produced by repeated
//! integration by parts of oscillatory Duhamel integrals.
//!
//! Every retained series term carries a weight from the `a`-family
//! ([`series_coeff`]) and every remainder integral carries a weight from the
//! `b`-family ([`remainder_coeff`]).  Both are finite products of integer
//! powers and are kept as exact arbitrary-precision rationals until the final
//! assembly into floating-point scalars.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar (arbitrary-precision numerator and denominator).
///
/// Values are always stored reduced with a positive denominator; the backing
/// implementation maintains both invariants on construction.
pub type Rational = num_rational::BigRational;

/// Build a rational from an integer pair.  Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A tuple `k = (k_1, ..., k_d)` of non-negative commutator depths.
///
/// Entries are addressed 1-based in the mathematical notation; storage is
/// 0-based (`entry(i)` returns `k_{i+1}`).  The empty multi-index (`d = 0`)
/// is valid and has weight zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<usize>,
}

impl MultiIndex {
    /// Wrap a vector of non-negative depths.
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex { entries }
    }

    /// The empty multi-index (`d = 0`).
    pub fn empty() -> Self {
        MultiIndex { entries: Vec::new() }
    }

    /// Number of entries `d`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when `d = 0`.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total weight `|k| = k_1 + ... + k_d`.
    pub fn weight(&self) -> usize {
        self.entries.iter().sum()
    }

    /// 0-based entry access: `entry(i)` is `k_{i+1}`.
    pub fn entry(&self, i: usize) -> usize {
        self.entries[i]
    }

    /// 1-based entry access matching the mathematical notation.
    pub fn entry1(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.entries.len(), "1-based index out of range");
        self.entries[i - 1]
    }

    /// All entries as a slice (0-based).
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// The prefix `(k_1, ..., k_m)` as a new multi-index.
    pub fn prefix(&self, m: usize) -> MultiIndex {
        MultiIndex::new(self.entries[..m].to_vec())
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Enumerate all multi-indices of length `d` with total weight exactly `m`,
/// in ascending lexicographic order.
///
/// For `d = 0` the result is a single empty multi-index when `m = 0` and no
/// indices otherwise.  The count for `d >= 1` is `C(m + d - 1, d - 1)`.
pub fn enumerate_multi_indices(d: usize, m: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if d == 0 {
        if m == 0 {
            out.push(MultiIndex::empty());
        }
        return out;
    }
    let mut current = vec![0usize; d];
    fill(&mut out, &mut current, 0, m);
    out
}

fn fill(out: &mut Vec<MultiIndex>, current: &mut Vec<usize>, pos: usize, remaining: usize) {
    let d = current.len();
    if pos == d - 1 {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        fill(out, current, pos + 1, remaining - v);
    }
}

/// Weight of a retained series term: for `0 <= j <= level <= d`,
///
/// ```text
///     a_j = 1 / prod_{r=0}^{j-1} (j - r)^(k_{level－r} + 1),      a_0 = 1.
/// ```
///
/// The product touches the top `j` entries `k_{level}, ..., k_{level-j+1}` of
/// the multi-index; `level` is the 1-based position of the newest entry.
pub fn series_coeff(j: usize, level: usize, k: &MultiIndex) -> Result<Rational> {
    check_weight_args(j, level, k)?;
    let mut den = BigInt::one();
    for r in 0..j {
        let base = BigInt::from((j - r) as u64);
        let exp = (k.entry1(level - r) + 1) as u32;
        den *= base.pow(exp);
    }
    Ok(Rational::new(BigInt::one(), den))
}

/// Weight of a remainder integral: for `1 <= j <= level <= d`,
///
/// ```text
///     b_j = 1 / ( j^(k_level) * prod_{r=1}^{j-1} (j - r)^(k_{level-r} + 1) ),
/// ```
///
/// with `b_0 = 1` and the empty product convention for `j = 1`.  For `j >= 1`
/// the two families satisfy `a_j / b_j = 1/j` entrywise.
pub fn remainder_coeff(j: usize, level: usize, k: &MultiIndex) -> Result<Rational> {
    check_weight_args(j, level, k)?;
    if j == 0 {
        return Ok(Rational::one());
    }
    let mut den = BigInt::from(j as u64).pow(k.entry1(level) as u32);
    for r in 1..j {
        let base = BigInt::from((j - r) as u64);
        let exp = (k.entry1(level - r) + 1) as u32;
        den *= base.pow(exp);
    }
    Ok(Rational::new(BigInt::one(), den))
}

fn check_weight_args(j: usize, level: usize, k: &MultiIndex) -> Result<()> {
    if level > k.len() {
        return Err(Error::IndexOutOfRange { what: "weight level", got: level, limit: k.len() });
    }
    if j > level {
        return Err(Error::IndexOutOfRange { what: "weight index j", got: j, limit: level });
    }
    Ok(())
}

/// Convert an exact rational to `f64` (used only at final assembly).
pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Exceedingly large weights never occur in practice (depths <= 6),
        // but fall back to a lossy division rather than panicking.
        q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
    })
}

/// Multiply an exact rational by `i^{turns}` (quarter turns, may be negative)
/// and emit the resulting complex scalar exactly: the rational lands in the
/// real or imaginary slot with the correct sign, the other slot is zero.
pub fn rational_times_i_power(q: &Rational, turns: i64) -> num_complex::Complex64 {
    let v = rational_to_f64(q);
    match turns.rem_euclid(4) {
        0 => num_complex::Complex64::new(v, 0.0),
        1 => num_complex::Complex64::new(0.0, v),
        2 => num_complex::Complex64::new(-v, 0.0),
        3 => num_complex::Complex64::new(0.0, -v),
        _ => unreachable!(),
    }
}

/// A dense polynomial in one formal variable with exact rational
/// coefficients, indexed by ascending power.  Used to check the reindexing
/// identity behind the series/remainder split without any floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPolynomial {
    /// `coeffs[p]` multiplies the `p`-th power of the formal variable.
    pub coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    /// The zero polynomial.
    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    /// Add `q * z^power` in place.
    pub fn add_term(&mut self, power: usize, q: &Rational) {
        if self.coeffs.len() <= power {
            self.coeffs.resize(power + 1, Rational::zero());
        }
        self.coeffs[power] += q;
    }

    /// Trim trailing zero coefficients so equal polynomials compare equal.
    pub fn normalize(mut self) -> Self {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }
}

/// Both sides of the Cauchy-product reindexing identity used when two
/// truncated integration-by-parts ladders are multiplied:
///
/// ```text
///   sum_{p=0}^{n} z^{p+1} a(p) * sum_{q=0}^{n-p-1} z^{q+1} b(q)
///     = sum_{m=0}^{n-1} z^{m+2} sum_{p+q=m} a(p) b(q)
/// ```
///
/// Returns `(lhs, rhs)` as exact polynomials in `z`; the identity holds iff
/// they are equal coefficient-by-coefficient.  The coefficient sequences are
/// arbitrary, so the check exercises only the index bookkeeping.
pub fn reindexing_sides(
    a: &[Rational],
    b: &[Rational],
    n: usize,
) -> (RationalPolynomial, RationalPolynomial) {
    assert!(a.len() > n && b.len() > n, "need coefficients up to index n");
    let mut lhs = RationalPolynomial::zero();
    for p in 0..n {
        // The inner ladder depth shrinks with the outer index; at p = n the
        // inner sum is empty.
        for q in 0..=(n - p - 1) {
            let prod = &a[p] * &b[q];
            lhs.add_term(p + q + 2, &prod);
        }
    }
    let mut rhs = RationalPolynomial::zero();
    for m in 0..n {
        for p in 0..=m {
            let q = m - p;
            let prod = &a[p] * &b[q];
            rhs.add_term(m + 2, &prod);
        }
    }
    (lhs.normalize(), rhs.normalize())
}
