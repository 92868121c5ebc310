//! Exact arithmetic substrate: rationals, phases in Q/Z, integer matrix rank
//! over Q, and sparse linear algebra over prime fields.
//!
//! Every rank the pipeline reports is computed twice, with two distinct large
//! primes; a disagreement triggers one retry with a fresh prime pair and then
//! a hard `PrimeCollision` error. An exact-rational elimination over the same
//! rows is available behind the `exact_fallback` switch for certification.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number; always reduced, denominator positive.
pub type Rational = BigRational;

/// Default working prime for modular ranks.
pub const DEFAULT_PRIME: u64 = 1_000_003;
/// Default verification prime; every rank must agree across both primes.
pub const DEFAULT_VERIFY_PRIME: u64 = 999_983;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer rational.
pub fn rat_int(num: i64) -> Rational {
    Rational::from(BigInt::from(num))
}

/// Fractional part <x> = x - floor(x).
pub fn frac_part(x: &Rational) -> Phase {
    Phase(x - x.floor())
}

/// A rational angle in [0, 1); addition wraps modulo 1.
///
/// Phases carry the diagonal group actions: the x- and p-entries of group
/// elements, the torus parameter t, and the character values chi_i.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phase(Rational);

impl Phase {
    pub fn new(q: Rational) -> Phase {
        frac_part(&q)
    }

    pub fn zero() -> Phase {
        Phase(Rational::zero())
    }

    pub fn from_pair(num: i64, den: i64) -> Phase {
        frac_part(&rat(num, den))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &Phase) -> Phase {
        frac_part(&(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Phase) -> Phase {
        frac_part(&(&self.0 - &other.0))
    }

    /// <-x>; satisfies <x> + <-x> = 1 for nonzero x, 0 otherwise.
    pub fn neg(&self) -> Phase {
        frac_part(&(-&self.0))
    }

    /// <k x> for a (signed) integer multiplier.
    pub fn mul_int(&self, k: i64) -> Phase {
        frac_part(&(&self.0 * rat_int(k)))
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::fmt::Debug for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Render a rational as "num/den", denominator always shown.
pub fn frac_str(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

// ---------------------------------------------------------------------------
// Integer matrices and rank over Q
// ---------------------------------------------------------------------------

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, Debug)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> IntMatrix {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        IntMatrix { rows, cols, entries }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| BigInt::from(v)))
            .collect();
        IntMatrix::new(r, c, entries)
    }

    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    /// Rank over the rationals via Bareiss fraction-free elimination.
    pub fn integer_rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut prev = BigInt::one();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..self.cols {
            // find a pivot at or below `row`
            let Some(pr) = (row..self.rows).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(row, pr);
            for i in row + 1..self.rows {
                for j in col + 1..self.cols {
                    let num = &a[row][col] * &a[i][j] - &a[i][col] * &a[row][j];
                    let (q, rem) = num.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                    a[i][j] = q;
                }
                a[i][col] = BigInt::zero();
            }
            prev = a[row][col].clone();
            rank += 1;
            row += 1;
            if row == self.rows {
                break;
            }
        }
        rank
    }
}

// ---------------------------------------------------------------------------
// Field abstraction for the sparse eliminator
// ---------------------------------------------------------------------------

/// The operations the eliminator needs; implemented by the prime field (fast
/// path) and by exact rationals (certification fallback).
pub trait FieldOps {
    type Elem: Clone + PartialEq;

    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn embed(&self, q: &Rational) -> Result<Self::Elem>;
}

/// Residues modulo a fixed odd prime p < 2^31.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<PrimeField> {
        if !is_prime(p) {
            return Err(Error::BadPrime { prime: p, msg: "not prime".into() });
        }
        if !(3..1 << 31).contains(&p) {
            return Err(Error::BadPrime { prime: p, msg: "must satisfy 3 <= p < 2^31".into() });
        }
        Ok(PrimeField { p })
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

impl FieldOps for PrimeField {
    type Elem = u64;

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 { 0 } else { self.p - *a }
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p { s - self.p } else { s }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }

    fn inv(&self, a: &u64) -> u64 {
        debug_assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }

    fn embed(&self, q: &Rational) -> Result<u64> {
        let p = BigInt::from(self.p);
        let num = q.numer().mod_floor(&p).to_u64().unwrap();
        let den = q.denom().mod_floor(&p).to_u64().unwrap();
        if den == 0 {
            return Err(Error::BadPrime {
                prime: self.p,
                msg: format!("prime divides the denominator of coefficient {q}"),
            });
        }
        Ok(num * self.inv(&den) % self.p)
    }
}

/// Exact rational arithmetic as a field, for the certification fallback.
#[derive(Clone, Copy, Debug)]
pub struct RationalField;

impl FieldOps for RationalField {
    type Elem = Rational;

    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }

    fn neg(&self, a: &Rational) -> Rational {
        -a
    }

    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }

    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }

    fn inv(&self, a: &Rational) -> Rational {
        a.recip()
    }

    fn embed(&self, q: &Rational) -> Result<Rational> {
        Ok(q.clone())
    }
}

// ---------------------------------------------------------------------------
// Sparse row echelon
// ---------------------------------------------------------------------------

/// A sparse row: strictly increasing column indices with nonzero values.
pub type SparseRow<E> = Vec<(u32, E)>;

/// Incremental sparse row echelon over a field. Rows are reduced against the
/// current pivots by their leading column; the Jacobian-ideal matrices this
/// sees are monomial- or binomial-rich, so rows stay short.
pub struct Eliminator<'f, F: FieldOps> {
    field: &'f F,
    pivots: BTreeMap<u32, SparseRow<F::Elem>>,
    rank: usize,
}

impl<'f, F: FieldOps> Eliminator<'f, F> {
    pub fn new(field: &'f F) -> Self {
        Eliminator { field, pivots: BTreeMap::new(), rank: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// row - coeff * pivot, merging sorted sparse rows.
    fn axpy(&self, row: &SparseRow<F::Elem>, coeff: &F::Elem, pivot: &SparseRow<F::Elem>) -> SparseRow<F::Elem> {
        let mut out = Vec::with_capacity(row.len() + pivot.len());
        let (mut i, mut j) = (0, 0);
        while i < row.len() || j < pivot.len() {
            if j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0) {
                out.push(row[i].clone());
                i += 1;
            } else if i >= row.len() || pivot[j].0 < row[i].0 {
                let v = self.field.neg(&self.field.mul(coeff, &pivot[j].1));
                if !self.field.is_zero(&v) {
                    out.push((pivot[j].0, v));
                }
                j += 1;
            } else {
                let v = self.field.add(&row[i].1, &self.field.neg(&self.field.mul(coeff, &pivot[j].1)));
                if !self.field.is_zero(&v) {
                    out.push((row[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }

    /// Reduce the leading term of `row` against the pivots until it is either
    /// empty or irreducible.
    pub fn reduce(&self, mut row: SparseRow<F::Elem>) -> SparseRow<F::Elem> {
        while let Some((col, val)) = row.first().cloned() {
            match self.pivots.get(&col) {
                Some(pivot) => row = self.axpy(&row, &val, pivot),
                None => break,
            }
        }
        row
    }

    /// Reduce and, if nonzero, normalize and adopt as a new pivot. Returns
    /// true when the rank grew.
    pub fn insert(&mut self, row: SparseRow<F::Elem>) -> bool {
        let row = self.reduce(row);
        let Some((col, lead)) = row.first().cloned() else {
            return false;
        };
        let inv = self.field.inv(&lead);
        let normalized: SparseRow<F::Elem> =
            row.into_iter().map(|(c, v)| (c, self.field.mul(&inv, &v))).collect();
        self.pivots.insert(col, normalized);
        self.rank += 1;
        true
    }

    /// Membership test: does `row` lie in the span of the inserted rows?
    pub fn contains(&self, row: SparseRow<F::Elem>) -> bool {
        self.reduce(row).is_empty()
    }
}

/// Convert a rational sparse row into field elements, dropping zeros.
pub fn row_to_field<F: FieldOps>(field: &F, row: &[(u32, Rational)]) -> Result<SparseRow<F::Elem>> {
    let mut out = Vec::with_capacity(row.len());
    for (c, q) in row {
        let v = field.embed(q)?;
        if !field.is_zero(&v) {
            out.push((*c, v));
        }
    }
    Ok(out)
}

fn eliminate_all<'f, F: FieldOps>(field: &'f F, rows: &[Vec<(u32, Rational)>]) -> Result<Eliminator<'f, F>> {
    // Shortest rows first keeps the echelon monomial/binomial-heavy, which is
    // what bounds fill-in on Fermat-type inputs.
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| (rows[i].len(), i));
    let mut elim = Eliminator::new(field);
    for i in order {
        let row = row_to_field(field, &rows[i])?;
        elim.insert(row);
    }
    Ok(elim)
}

// ---------------------------------------------------------------------------
// Dense prime-field matrix (thin wrapper over the sparse engine)
// ---------------------------------------------------------------------------

/// Dense matrix of residues modulo a stated prime.
#[derive(Clone, Debug)]
pub struct FpMatrix {
    pub field: PrimeField,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<u64>,
}

impl FpMatrix {
    pub fn new(prime: u64, rows: usize, cols: usize, entries: Vec<i64>) -> Result<FpMatrix> {
        let field = PrimeField::new(prime)?;
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        let entries = entries
            .into_iter()
            .map(|v| (v.rem_euclid(prime as i64)) as u64)
            .collect();
        Ok(FpMatrix { field, rows, cols, entries })
    }

    /// Rank over F_p by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut elim = Eliminator::new(&self.field);
        for i in 0..self.rows {
            let row: SparseRow<u64> = (0..self.cols)
                .filter_map(|j| {
                    let v = self.entries[i * self.cols + j];
                    (v != 0).then_some((j as u32, v))
                })
                .collect();
            elim.insert(row);
        }
        elim.rank()
    }
}

// ---------------------------------------------------------------------------
// Primes
// ---------------------------------------------------------------------------

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = 11u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn next_prime(mut n: u64) -> u64 {
    loop {
        n += 1;
        if is_prime(n) {
            return n;
        }
    }
}

// ---------------------------------------------------------------------------
// Two-prime rank engine
// ---------------------------------------------------------------------------

/// Cumulative counters for rank computations; used by the property suite to
/// assert that every reported rank was confirmed by the second prime.
#[derive(Debug, Default)]
pub struct RankStats {
    pub ranks: AtomicU64,
    pub retries: AtomicU64,
}

/// Computes ranks and span memberships modulo two distinct primes and insists
/// on agreement. One disagreement retries with a fresh prime pair; a second
/// one is a `PrimeCollision` error.
pub struct RankEngine {
    pub prime: u64,
    pub verify_prime: u64,
    pub exact_fallback: bool,
    pub stats: RankStats,
}

impl RankEngine {
    pub fn new(prime: u64, verify_prime: u64, exact_fallback: bool) -> Result<RankEngine> {
        if prime == verify_prime {
            return Err(Error::BadPrime { prime, msg: "working and verification primes must differ".into() });
        }
        PrimeField::new(prime)?;
        PrimeField::new(verify_prime)?;
        Ok(RankEngine { prime, verify_prime, exact_fallback, stats: RankStats::default() })
    }

    pub fn with_defaults() -> RankEngine {
        RankEngine::new(DEFAULT_PRIME, DEFAULT_VERIFY_PRIME, false).unwrap()
    }

    fn pass(
        &self,
        p: u64,
        rows: &[Vec<(u32, Rational)>],
        queries: &[Vec<(u32, Rational)>],
    ) -> Result<(usize, Vec<bool>)> {
        let field = PrimeField::new(p)?;
        let elim = eliminate_all(&field, rows)?;
        let mut member = Vec::with_capacity(queries.len());
        for q in queries {
            member.push(elim.contains(row_to_field(&field, q)?));
        }
        Ok((elim.rank(), member))
    }

    fn exact_pass(
        &self,
        rows: &[Vec<(u32, Rational)>],
        queries: &[Vec<(u32, Rational)>],
    ) -> Result<(usize, Vec<bool>)> {
        let field = RationalField;
        let elim = eliminate_all(&field, rows)?;
        let mut member = Vec::with_capacity(queries.len());
        for q in queries {
            member.push(elim.contains(row_to_field(&field, q)?));
        }
        Ok((elim.rank(), member))
    }

    /// Rank of the row span together with span membership for each query row,
    /// certified by two primes (and optionally by exact arithmetic).
    pub fn rank_and_memberships(
        &self,
        rows: &[Vec<(u32, Rational)>],
        queries: &[Vec<(u32, Rational)>],
    ) -> Result<(usize, Vec<bool>)> {
        let (mut p1, mut p2) = (self.prime, self.verify_prime);
        for attempt in 0..2 {
            let a = self.pass(p1, rows, queries)?;
            let b = self.pass(p2, rows, queries)?;
            if a == b {
                if self.exact_fallback {
                    let e = self.exact_pass(rows, queries)?;
                    if e != a {
                        return Err(Error::PrimeCollision { p1, p2 });
                    }
                }
                self.stats.ranks.fetch_add(1, Ordering::Relaxed);
                return Ok(a);
            }
            if attempt == 0 {
                self.stats.retries.fetch_add(1, Ordering::Relaxed);
                p1 = next_prime(p1.max(p2));
                p2 = next_prime(p1);
            }
        }
        Err(Error::PrimeCollision { p1, p2 })
    }

    /// Two-prime rank of a sparse rational row set.
    pub fn rank(&self, rows: &[Vec<(u32, Rational)>]) -> Result<usize> {
        Ok(self.rank_and_memberships(rows, &[])?.0)
    }
}
