//! Problem instances: weights, degrees, quasi-homogeneous defining
//! polynomials, diagonal symmetry generators, and the standing hypotheses.
//!
//! The input document is JSON with the fields `weights`, `degrees`,
//! `polynomials` (term strings over x1..xn), `group_generators` (phase
//! vectors as rational strings in [0,1)), and optional `options`
//! (`prime`, `verify_prime`, `qs_bound`).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exact::{frac_part, IntMatrix, Phase, RankEngine, Rational, DEFAULT_PRIME, DEFAULT_VERIFY_PRIME};

/// Cap on weights, degrees and exponents; keeps every weighted-degree sum
/// far inside u64.
pub const MAX_MAGNITUDE: u64 = 1_000_000;

/// A monomial x^a p^b; exponent vectors have the ambient lengths n and r.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub p: Vec<u32>,
}

impl Monomial {
    pub fn one(n: usize, r: usize) -> Monomial {
        Monomial { x: vec![0; n], p: vec![0; r] }
    }

    pub fn x_only(x: Vec<u32>, r: usize) -> Monomial {
        Monomial { x, p: vec![0; r] }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            p: self.p.iter().zip(&other.p).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn p_degree(&self) -> u64 {
        self.p.iter().map(|&b| b as u64).sum()
    }
}

/// Sparse polynomial with exact rational coefficients; zero coefficients are
/// never stored. Defining polynomials have all p-exponents zero.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Polynomial {
    pub terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Partial derivative with respect to x_j (0-based).
    pub fn partial_x(&self, j: usize) -> Polynomial {
        let mut out = Polynomial::zero();
        for (mono, coeff) in &self.terms {
            let e = mono.x[j];
            if e == 0 {
                continue;
            }
            let mut m = mono.clone();
            m.x[j] = e - 1;
            out.add_term(m, coeff * Rational::from(BigInt::from(e)));
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    /// Restriction to a set of x-variables: keeps terms supported there.
    pub fn restrict_x(&self, keep: &[usize]) -> Polynomial {
        let keep_mask: Vec<bool> = {
            let n = self.terms.keys().next().map_or(0, |m| m.x.len());
            let mut mask = vec![false; n];
            for &j in keep {
                mask[j] = true;
            }
            mask
        };
        let mut out = Polynomial::zero();
        for (mono, coeff) in &self.terms {
            if mono.x.iter().enumerate().all(|(j, &e)| e == 0 || keep_mask[j]) {
                out.add_term(mono.clone(), coeff.clone());
            }
        }
        out
    }

    /// Largest |numerator| / denominator over all coefficients.
    pub fn max_coeff_magnitude(&self) -> BigInt {
        let mut max = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer().abs();
            if n > max {
                max = n;
            }
            if c.denom() > &max {
                max = c.denom().clone();
            }
        }
        max
    }
}

/// Weighted degree of a monomial: (sum a_j w_j, sum b_i).
pub fn weighted_degree(mono: &Monomial, m: &ModelData) -> (u64, u64) {
    let x_deg = mono.x.iter().zip(&m.weights).map(|(&a, &w)| a as u64 * w as u64).sum();
    (x_deg, mono.p_degree())
}

/// Tunables carried by the input document and CLI flags.
#[derive(Clone, Debug)]
pub struct Options {
    pub prime: u64,
    pub verify_prime: u64,
    /// Weighted-degree bound for the quasi-smoothness search; defaults to
    /// 3 * max(d_i).
    pub qs_bound: Option<u64>,
    pub exact_ranks: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            prime: DEFAULT_PRIME,
            verify_prime: DEFAULT_VERIFY_PRIME,
            qs_bound: None,
            exact_ranks: false,
        }
    }
}

/// A parsed and type-checked problem instance.
#[derive(Clone, Debug)]
pub struct ModelData {
    pub n: usize,
    pub r: usize,
    pub weights: Vec<u32>,
    pub degrees: Vec<u32>,
    pub polynomials: Vec<Polynomial>,
    pub generators: Vec<Vec<Phase>>,
    pub options: Options,
}

impl ModelData {
    pub fn qs_bound(&self) -> u64 {
        self.options
            .qs_bound
            .unwrap_or_else(|| 3 * self.degrees.iter().copied().max().unwrap_or(1) as u64)
    }

    pub fn sum_weights(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }

    pub fn sum_degrees(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }

    pub fn rank_engine(&self) -> Result<RankEngine> {
        RankEngine::new(self.options.prime, self.options.verify_prime, self.options.exact_ranks)
    }

    /// Exponent matrix of all monomials of all defining polynomials.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for poly in &self.polynomials {
            for mono in poly.terms.keys() {
                rows.push(mono.x.iter().map(|&e| e as i64).collect());
            }
        }
        if rows.is_empty() {
            rows.push(vec![0; self.n]);
        }
        IntMatrix::from_i64_rows(&rows)
    }
}

// ---------------------------------------------------------------------------
// Input document
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsDoc {
    prime: Option<u64>,
    verify_prime: Option<u64>,
    qs_bound: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    weights: Vec<u32>,
    degrees: Vec<u32>,
    polynomials: Vec<String>,
    #[serde(default)]
    group_generators: Vec<Vec<String>>,
    options: Option<OptionsDoc>,
}

/// Parse a rational string "a/b" or "a".
fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Rational::from(n))
        }
    }
}

/// Recursive-descent parser for the polynomial term grammar:
/// `term ("+" term)*`, `term := [coef "*"] factor ("*" factor)*`,
/// `factor := "x"<index> ["^" exponent]`, `coef := [sign] integer ["/" integer]`.
/// A "-" separator is accepted as "+" with a negated coefficient.
struct PolyParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    poly: usize,
    n: usize,
}

impl<'a> PolyParser<'a> {
    fn new(text: &'a str, poly: usize, n: usize) -> Self {
        PolyParser { bytes: text.as_bytes(), pos: 0, poly, n }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn syntax(&self, msg: impl Into<String>) -> Error {
        Error::PolySyntax { poly: self.poly, offset: self.pos, msg: msg.into() }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected an integer"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse().map_err(|e| Error::NonRationalCoefficient {
            poly: self.poly,
            offset: start,
            msg: format!("{e}"),
        })
    }

    /// `[sign] integer ["/" integer]`; only called when a digit or sign is next.
    fn coefficient(&mut self, sign: i32) -> Result<Rational> {
        let mut sign = sign;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -sign;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = self.integer()?;
            let den = if self.peek() == Some(b'/') {
                self.pos += 1;
                let offset = self.pos;
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(Error::NonRationalCoefficient {
                        poly: self.poly,
                        offset,
                        msg: "zero denominator".into(),
                    });
                }
                d
            } else {
                BigInt::one()
            };
            let q = Rational::new(num, den);
            Ok(if sign < 0 { -q } else { q })
        } else {
            // bare sign in front of a factor: implicit coefficient 1
            Ok(if sign < 0 { -Rational::one() } else { Rational::one() })
        }
    }

    /// `"x"<index> ["^" exponent]`
    fn factor(&mut self) -> Result<(usize, u32)> {
        if self.peek() != Some(b'x') {
            return Err(self.syntax("expected a variable factor like x1 or x2^3"));
        }
        self.pos += 1;
        let idx_offset = self.pos;
        let idx = self.integer()?;
        let idx = idx.to_string().parse::<usize>().map_err(|_| Error::PolySyntax {
            poly: self.poly,
            offset: idx_offset,
            msg: "variable index out of range".into(),
        })?;
        if idx == 0 || idx > self.n {
            return Err(Error::UnknownVariable {
                poly: self.poly,
                offset: idx_offset,
                index: idx,
                n: self.n,
            });
        }
        let exp = if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp_offset = self.pos;
            let e = self.integer()?;
            let too_large = || Error::PolySyntax {
                poly: self.poly,
                offset: exp_offset,
                msg: format!("exponent exceeds the supported maximum {MAX_MAGNITUDE}"),
            };
            let e = e.to_string().parse::<u64>().map_err(|_| too_large())?;
            if e > MAX_MAGNITUDE {
                return Err(too_large());
            }
            e as u32
        } else {
            1
        };
        Ok((idx - 1, exp))
    }

    fn term(&mut self, sign: i32, r: usize) -> Result<(Monomial, Rational)> {
        let coeff = self.coefficient(sign)?;
        let mut exps = vec![0u32; self.n];
        let poly = self.poly;
        let bump = |exps: &mut Vec<u32>, j: usize, e: u32, pos: usize| -> Result<()> {
            exps[j] += e;
            if exps[j] as u64 > MAX_MAGNITUDE {
                return Err(Error::PolySyntax {
                    poly,
                    offset: pos,
                    msg: format!("exponent exceeds the supported maximum {MAX_MAGNITUDE}"),
                });
            }
            Ok(())
        };
        // optional "*" after an explicit coefficient
        if self.peek() == Some(b'*') {
            self.pos += 1;
        }
        let (j, e) = self.factor()?;
        bump(&mut exps, j, e, self.pos)?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let (j, e) = self.factor()?;
            bump(&mut exps, j, e, self.pos)?;
        }
        Ok((Monomial::x_only(exps, r), coeff))
    }

    fn polynomial(&mut self, r: usize) -> Result<Polynomial> {
        let mut out = Polynomial::zero();
        let mut sign = 1;
        if self.peek() == Some(b'+') {
            self.pos += 1;
        } else if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -1;
        }
        loop {
            let (mono, coeff) = self.term(sign, r)?;
            out.add_term(mono, coeff);
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                Some(_) => return Err(self.syntax("expected '+', '-' or end of polynomial")),
                None => break,
            }
        }
        Ok(out)
    }
}

/// Parse a problem document into a `ModelData`.
pub fn parse_input(text: &str) -> Result<ModelData> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Document {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let n = doc.weights.len();
    let r = doc.degrees.len();
    if n == 0 {
        return Err(Error::InvalidModel("empty weight vector".into()));
    }
    if doc.weights.iter().any(|&w| w == 0 || w as u64 > MAX_MAGNITUDE) {
        return Err(Error::InvalidModel(format!("weights must lie in 1..={MAX_MAGNITUDE}")));
    }
    if doc.degrees.iter().any(|&d| d == 0 || d as u64 > MAX_MAGNITUDE) {
        return Err(Error::InvalidModel(format!("degrees must lie in 1..={MAX_MAGNITUDE}")));
    }
    if doc.polynomials.len() != r {
        return Err(Error::InvalidModel(format!(
            "expected {} polynomials (one per degree), found {}",
            r,
            doc.polynomials.len()
        )));
    }
    let mut polynomials = Vec::with_capacity(r);
    for (i, text) in doc.polynomials.iter().enumerate() {
        polynomials.push(PolyParser::new(text, i, n).polynomial(r)?);
    }
    let mut generators = Vec::with_capacity(doc.group_generators.len());
    for (gi, vec) in doc.group_generators.iter().enumerate() {
        if vec.len() != n {
            return Err(Error::BadGenerator {
                index: gi,
                msg: format!("expected {} phases, found {}", n, vec.len()),
            });
        }
        let mut phases = Vec::with_capacity(n);
        for (j, s) in vec.iter().enumerate() {
            let q = parse_rational(s).ok_or_else(|| Error::BadGenerator {
                index: gi,
                msg: format!("entry {} is not a rational: {:?}", j + 1, s),
            })?;
            if q.is_negative() || q >= Rational::one() {
                return Err(Error::BadGenerator {
                    index: gi,
                    msg: format!("entry {} = {} is outside [0,1)", j + 1, q),
                });
            }
            phases.push(frac_part(&q));
        }
        generators.push(phases);
    }
    let mut options = Options::default();
    if let Some(o) = doc.options {
        if let Some(p) = o.prime {
            options.prime = p;
        }
        if let Some(p) = o.verify_prime {
            options.verify_prime = p;
        }
        options.qs_bound = o.qs_bound;
    }
    Ok(ModelData { n, r, weights: doc.weights, degrees: doc.degrees, polynomials, generators, options })
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Unverified,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// Per-variable outcome of the bounded quasi-smoothness search.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum QsStatus {
    /// x_j^power lies in (W_1..W_r, r x r Jacobian minors) at the given
    /// weighted degree.
    Verified { power: u32, degree: u64 },
    /// No power found up to the weighted-degree bound; never reported as a pass.
    Unverified { bound: u64 },
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckEntry>,
    /// Present when the quasi-smoothness search ran; indexed by variable.
    pub quasi_smooth: Option<Vec<QsStatus>>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, ok: bool, detail: String) {
        self.checks.push(CheckEntry {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
        });
    }

    /// All structural checks pass (quasi-smoothness not considered).
    pub fn structurally_valid(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Pass)
    }

    /// Structural checks pass and every variable is quasi-smoothness-verified.
    pub fn fully_verified(&self) -> bool {
        self.structurally_valid()
            && self
                .quasi_smooth
                .as_ref()
                .is_some_and(|qs| qs.iter().all(|s| matches!(s, QsStatus::Verified { .. })))
    }
}

/// Check every ModelData invariant; failures become report entries.
pub fn validate(m: &ModelData) -> ValidationReport {
    let mut report = ValidationReport::default();

    report.push("r_less_than_n", m.r < m.n, format!("r = {}, n = {}", m.r, m.n));

    let gcd = m.weights.iter().fold(0u32, |acc, &w| acc.gcd(&w));
    report.push("weights_coprime", gcd == 1, format!("gcd(w) = {gcd}"));

    for (i, poly) in m.polynomials.iter().enumerate() {
        let d = m.degrees[i] as u64;
        let mut ok = !poly.is_zero();
        let mut bad = String::new();
        for mono in poly.terms.keys() {
            let (x_deg, p_deg) = weighted_degree(mono, m);
            if p_deg != 0 {
                ok = false;
                bad = "p-variables in a defining polynomial".into();
                break;
            }
            if x_deg != d {
                ok = false;
                bad = format!("monomial of weighted degree {x_deg}, expected {d}");
                break;
            }
        }
        if poly.is_zero() {
            bad = "zero polynomial".into();
        }
        report.push(
            &format!("quasi_homogeneous_W{}", i + 1),
            ok,
            if ok { format!("all monomials have weighted degree {d}") } else { bad },
        );
    }

    let (sw, sd) = (m.sum_weights(), m.sum_degrees());
    report.push("calabi_yau_balance", sw == sd, format!("sum w = {sw}, sum d = {sd}"));

    for (gi, gen) in m.generators.iter().enumerate() {
        let mut ok = true;
        let mut bad = String::new();
        for (i, poly) in m.polynomials.iter().enumerate() {
            for mono in poly.terms.keys() {
                let mut phase = Phase::zero();
                for (j, &e) in mono.x.iter().enumerate() {
                    phase = phase.add(&gen[j].mul_int(e as i64));
                }
                if !phase.is_zero() {
                    ok = false;
                    bad = format!("moves a monomial of W{} by phase {}", i + 1, phase);
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        report.push(
            &format!("generator_{}_fixes_terms", gi + 1),
            ok,
            if ok { "fixes every monomial of every W_i".into() } else { bad },
        );
    }

    let rank = m.exponent_matrix().integer_rank();
    report.push(
        "exponent_rank_full",
        rank == m.n,
        format!("exponent matrix rank {rank} of {} (finite diagonal symmetry group)", m.n),
    );

    // prime sanity: both primes must clear 2x the largest coefficient magnitude
    let mut max_coeff = BigInt::zero();
    for poly in &m.polynomials {
        let c = poly.max_coeff_magnitude();
        if c > max_coeff {
            max_coeff = c;
        }
    }
    let bound = BigInt::from(2) * &max_coeff;
    let primes_ok = BigInt::from(m.options.prime) > bound
        && BigInt::from(m.options.verify_prime) > bound
        && m.options.prime != m.options.verify_prime
        && crate::exact::is_prime(m.options.prime)
        && crate::exact::is_prime(m.options.verify_prime);
    report.push(
        "primes_admissible",
        primes_ok,
        format!(
            "primes {}, {}; 2 * max |coefficient| = {}",
            m.options.prime, m.options.verify_prime, bound
        ),
    );

    report
}

// ---------------------------------------------------------------------------
// Quasi-smoothness (bounded radical-membership search)
// ---------------------------------------------------------------------------

/// Quasi-homogeneous generators of the ideal (W_1..W_r, r x r minors of the
/// Jacobian), with their weighted degrees. Minor degrees can be negative in
/// principle; those minors are identically zero and are skipped.
fn singular_ideal_generators(m: &ModelData) -> Vec<(Polynomial, u64)> {
    let mut gens: Vec<(Polynomial, u64)> = Vec::new();
    for (i, poly) in m.polynomials.iter().enumerate() {
        gens.push((poly.clone(), m.degrees[i] as u64));
    }
    if m.r == 0 {
        return gens;
    }
    // Jacobian matrix rows: grad W_i
    let jac: Vec<Vec<Polynomial>> = m
        .polynomials
        .iter()
        .map(|w| (0..m.n).map(|j| w.partial_x(j)).collect())
        .collect();
    let sum_d: u64 = m.sum_degrees();
    for cols in combinations(m.n, m.r) {
        let col_w: u64 = cols.iter().map(|&j| m.weights[j] as u64).sum();
        if col_w > sum_d {
            continue;
        }
        let minor = determinant(&jac, &cols);
        if minor.is_zero() {
            continue;
        }
        gens.push((minor, sum_d - col_w));
    }
    gens
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, start: usize, n: usize, k: usize) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(out, cur, i + 1, n, k);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, n, k);
    out
}

/// Determinant of the r x r submatrix of `rows` on the given columns,
/// by Laplace expansion along the first row.
fn determinant(rows: &[Vec<Polynomial>], cols: &[usize]) -> Polynomial {
    if cols.len() == 1 {
        return rows[0][cols[0]].clone();
    }
    let mut out = Polynomial::zero();
    for (k, &c) in cols.iter().enumerate() {
        let sub_cols: Vec<usize> = cols.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect();
        let term = rows[0][c].mul(&determinant(&rows[1..], &sub_cols));
        out = if k % 2 == 0 { out.add(&term) } else { out.sub(&term) };
    }
    out
}

/// Monomials in all n variables with the given weighted x-degree.
pub fn monomials_of_weighted_degree(weights: &[u32], degree: u64) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; weights.len()];
    fn rec(weights: &[u32], j: usize, remaining: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if j == weights.len() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if j == weights.len() - 1 {
            let w = weights[j] as u64;
            if remaining.is_multiple_of(w) {
                cur[j] = (remaining / w) as u32;
                out.push(cur.clone());
                cur[j] = 0;
            }
            return;
        }
        let w = weights[j] as u64;
        let mut e = 0u32;
        loop {
            let used = e as u64 * w;
            if used > remaining {
                break;
            }
            cur[j] = e;
            rec(weights, j + 1, remaining - used, cur, out);
            e += 1;
        }
        cur[j] = 0;
    }
    rec(weights, 0, degree, &mut cur, &mut out);
    out
}

/// For each variable x_j, search weighted degrees up to `bound` for a power
/// x_j^N in the graded pieces of the singular ideal, via two-prime linear
/// algebra. Monotone in the bound.
pub fn check_quasi_smooth(m: &ModelData, bound: u64, engine: &RankEngine) -> Result<Vec<QsStatus>> {
    let gens = singular_ideal_generators(m);
    let mut status: Vec<QsStatus> = (0..m.n).map(|_| QsStatus::Unverified { bound }).collect();
    // group the power queries by weighted degree so each graded piece is
    // assembled and eliminated once
    let mut by_degree: BTreeMap<u64, Vec<(usize, u32)>> = BTreeMap::new();
    for j in 0..m.n {
        let w = m.weights[j] as u64;
        let mut pow = 1u32;
        while pow as u64 * w <= bound {
            by_degree.entry(pow as u64 * w).or_default().push((j, pow));
            pow += 1;
        }
    }
    for (degree, queries) in by_degree {
        let open: Vec<&(usize, u32)> = queries
            .iter()
            .filter(|(j, _)| matches!(status[*j], QsStatus::Unverified { .. }))
            .collect();
        if open.is_empty() {
            continue;
        }
        // graded piece of the ideal at this weighted degree
        let monos = monomials_of_weighted_degree(&m.weights, degree);
        let index: BTreeMap<&Vec<u32>, u32> =
            monos.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let mut rows: Vec<Vec<(u32, Rational)>> = Vec::new();
        for (g, gdeg) in &gens {
            if *gdeg > degree {
                continue;
            }
            for mult in monomials_of_weighted_degree(&m.weights, degree - gdeg) {
                let mut row: Vec<(u32, Rational)> = Vec::with_capacity(g.terms.len());
                for (mono, coeff) in &g.terms {
                    let prod: Vec<u32> = mono.x.iter().zip(&mult).map(|(a, b)| a + b).collect();
                    row.push((index[&prod], coeff.clone()));
                }
                row.sort_by_key(|(c, _)| *c);
                rows.push(row);
            }
        }
        let query_rows: Vec<Vec<(u32, Rational)>> = open
            .iter()
            .map(|(j, pow)| {
                let mut v = vec![0u32; m.n];
                v[*j] = *pow;
                vec![(index[&v], Rational::one())]
            })
            .collect();
        let (_, member) = engine.rank_and_memberships(&rows, &query_rows)?;
        for (&&(j, pow), is_member) in open.iter().zip(member) {
            if is_member {
                status[j] = QsStatus::Verified { power: pow, degree };
            }
        }
    }
    Ok(status)
}

/// Structural validation plus the bounded quasi-smoothness search.
pub fn validate_full(m: &ModelData) -> Result<ValidationReport> {
    let mut report = validate(m);
    if report.structurally_valid() {
        let engine = m.rank_engine()?;
        report.quasi_smooth = Some(check_quasi_smooth(m, m.qs_bound(), &engine)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn quintic_doc() -> &'static str {
        r#"{
            "weights": [1, 1, 1, 1, 1],
            "degrees": [5],
            "polynomials": ["x1^5+x2^5+x3^5+x4^5+x5^5"]
        }"#
    }

    pub fn fig1_doc() -> &'static str {
        r#"{
            "weights": [1, 2, 3],
            "degrees": [2, 4],
            "polynomials": ["x1^2+x2", "x1^4+x2^2+x3*x1"]
        }"#
    }

    #[test]
    fn parse_quintic() {
        let m = parse_input(quintic_doc()).unwrap();
        assert_eq!((m.n, m.r), (5, 1));
        assert_eq!(m.polynomials[0].terms.len(), 5);
    }

    #[test]
    fn parse_fig1() {
        let m = parse_input(fig1_doc()).unwrap();
        assert_eq!((m.n, m.r), (3, 2));
        assert_eq!(m.polynomials[0].terms.len(), 2);
        assert_eq!(m.polynomials[1].terms.len(), 3);
    }

    #[test]
    fn parse_rejects_x0() {
        let doc = r#"{"weights":[1,1],"degrees":[2],"polynomials":["x0^2"]}"#;
        match parse_input(doc) {
            Err(Error::UnknownVariable { index: 0, .. }) => {}
            other => panic!("expected unknown-variable error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_garbage_and_reports_offset() {
        let doc = r#"{"weights":[1,1],"degrees":[2],"polynomials":["x1^2 + $"]}"#;
        match parse_input(doc) {
            Err(Error::PolySyntax { poly: 0, .. }) => {}
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn parse_coefficients() {
        let doc = r#"{"weights":[1,1],"degrees":[3],"polynomials":["2*x1^3+1/2*x1*x2^2-x2^3"]}"#;
        let m = parse_input(doc).unwrap();
        let p = &m.polynomials[0];
        assert_eq!(p.terms.len(), 3);
        let cube2 = Monomial::x_only(vec![0, 3], 1);
        assert_eq!(p.terms[&cube2], crate::exact::rat(-1, 1));
        let mixed = Monomial::x_only(vec![1, 2], 1);
        assert_eq!(p.terms[&mixed], crate::exact::rat(1, 2));
    }

    #[test]
    fn document_syntax_error_carries_position() {
        match parse_input("{ not json") {
            Err(Error::Document { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected document error, got {other:?}"),
        }
    }

    #[test]
    fn validate_quintic_passes() {
        let m = parse_input(quintic_doc()).unwrap();
        let report = validate(&m);
        assert!(report.structurally_valid(), "{:?}", report.checks);
    }

    #[test]
    fn validate_fig1_passes() {
        let m = parse_input(fig1_doc()).unwrap();
        let report = validate(&m);
        assert!(report.structurally_valid(), "{:?}", report.checks);
        let cy = report.checks.iter().find(|c| c.name == "calabi_yau_balance").unwrap();
        assert_eq!(cy.detail, "sum w = 6, sum d = 6");
    }

    #[test]
    fn validate_cy_failure() {
        let doc = r#"{"weights":[1,1],"degrees":[3],"polynomials":["x1^3+x2^3"]}"#;
        let m = parse_input(doc).unwrap();
        let report = validate(&m);
        assert!(!report.structurally_valid());
        let cy = report.checks.iter().find(|c| c.name == "calabi_yau_balance").unwrap();
        assert_eq!(cy.status, CheckStatus::Fail);
        assert_eq!(cy.detail, "sum w = 2, sum d = 3");
    }

    #[test]
    fn validation_is_order_independent() {
        // permuting generator listing must not change outcomes
        let doc_a = r#"{
            "weights":[1,1,1,1,1],"degrees":[5],
            "polynomials":["x1^5+x2^5+x3^5+x4^5+x5^5"],
            "group_generators":[["1/5","4/5","0","0","0"],["1/5","0","4/5","0","0"]]
        }"#;
        let doc_b = r#"{
            "weights":[1,1,1,1,1],"degrees":[5],
            "polynomials":["x5^5+x4^5+x3^5+x2^5+x1^5"],
            "group_generators":[["1/5","0","4/5","0","0"],["1/5","4/5","0","0","0"]]
        }"#;
        let ra = validate(&parse_input(doc_a).unwrap());
        let rb = validate(&parse_input(doc_b).unwrap());
        assert_eq!(ra.structurally_valid(), rb.structurally_valid());
        assert!(ra.structurally_valid());
    }

    #[test]
    fn weighted_degree_examples() {
        let m = parse_input(quintic_doc()).unwrap();
        let x1_5 = Monomial::x_only(vec![5, 0, 0, 0, 0], 1);
        assert_eq!(weighted_degree(&x1_5, &m), (5, 0));
        let p1x1_3 = Monomial { x: vec![3, 0, 0, 0, 0], p: vec![1] };
        assert_eq!(weighted_degree(&p1x1_3, &m), (3, 1));
        assert_eq!(weighted_degree(&Monomial::one(5, 1), &m), (0, 0));
    }

    #[test]
    fn quasi_smooth_fermat_quintic() {
        let m = parse_input(quintic_doc()).unwrap();
        let engine = m.rank_engine().unwrap();
        let status = check_quasi_smooth(&m, 4, &engine).unwrap();
        for s in &status {
            assert_eq!(*s, QsStatus::Verified { power: 4, degree: 4 });
        }
    }

    #[test]
    fn quasi_smooth_degenerate_square() {
        // (x1 x2)^2: the x1-axis is singular; no pure power ever enters
        let doc = r#"{"weights":[1,1],"degrees":[4],"polynomials":["x1^2*x2^2"]}"#;
        let m = parse_input(doc).unwrap();
        let engine = m.rank_engine().unwrap();
        let status = check_quasi_smooth(&m, m.qs_bound(), &engine).unwrap();
        assert_eq!(status[0], QsStatus::Unverified { bound: 12 });
        assert_eq!(status[1], QsStatus::Unverified { bound: 12 });
    }

    #[test]
    fn quasi_smooth_fig1() {
        let m = parse_input(fig1_doc()).unwrap();
        let engine = m.rank_engine().unwrap();
        let status = check_quasi_smooth(&m, 6, &engine).unwrap();
        for (j, s) in status.iter().enumerate() {
            assert!(matches!(s, QsStatus::Verified { .. }), "x{} not verified: {s:?}", j + 1);
        }
    }

    #[test]
    fn quasi_smooth_monotone_in_bound() {
        let m = parse_input(quintic_doc()).unwrap();
        let engine = m.rank_engine().unwrap();
        let at4 = check_quasi_smooth(&m, 4, &engine).unwrap();
        let at9 = check_quasi_smooth(&m, 9, &engine).unwrap();
        for (a, b) in at4.iter().zip(&at9) {
            if matches!(a, QsStatus::Verified { .. }) {
                assert!(matches!(b, QsStatus::Verified { .. }));
            }
        }
    }
}
