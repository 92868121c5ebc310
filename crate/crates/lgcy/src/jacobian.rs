//! Equivariant bigraded dimensions of the generalized chiral algebra of a
//! sector: the quotient of C[x_fix, p_kept] by the partials of the hybrid
//! potential, tensored with the top-degree form, cut to its Gamma-invariant
//! part.
//!
//! The group is diagonal, so monomials are character eigenvectors and so is
//! each partial of the potential. A graded piece is then a single rank
//! computation: the invariant monomials form the basis, the ideal piece is
//! spanned by eigenvector products (monomial multiplier) x (partial), and
//! dims[k] = #basis - rank. The volume-form twist shifts every exponent by
//! one, which is the (a_j + 1) in all the degree and character conditions.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{Phase, RankEngine, Rational};
use crate::model::{Monomial, ModelData, Polynomial};
use crate::symmetry::{ComponentSet, SectorModel};

/// Graded dimensions of the invariant chiral algebra of one sector.
/// `dims[k]` is the dimension in p-degree k; the class at p-degree k has
/// bidegree (d_tilde - k, k) before the sector's age shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveBlock {
    pub d_tilde: i64,
    pub dims: Vec<u64>,
}

impl PrimitiveBlock {
    pub fn empty(d_tilde: i64) -> PrimitiveBlock {
        PrimitiveBlock { d_tilde, dims: Vec::new() }
    }

    pub fn total(&self) -> u64 {
        self.dims.iter().sum()
    }
}

/// Integer form of a generator character: residues g_j * L modulo L, with L
/// the common denominator. Keeps the per-monomial invariance filter in
/// machine arithmetic.
struct GeneratorFilter {
    modulus: u128,
    residues: Vec<u128>,
}

impl GeneratorFilter {
    fn build(gen: &[Phase]) -> Result<GeneratorFilter> {
        let mut modulus = BigInt::one();
        for g in gen {
            modulus = modulus.lcm(g.as_rational().denom());
        }
        // u64 cap keeps all residue products inside u128
        let modulus = modulus
            .to_u64()
            .ok_or_else(|| Error::Internal("generator denominator lcm exceeds u64".into()))?
            as u128;
        let residues = gen
            .iter()
            .map(|g| {
                let q = g.as_rational();
                let scaled = q.numer() * BigInt::from(modulus) / q.denom();
                scaled.mod_floor(&BigInt::from(modulus)).to_u128().unwrap()
            })
            .collect();
        Ok(GeneratorFilter { modulus, residues })
    }

    /// Residue of the phase target * L for the multiplier condition.
    fn target(&self, phase: &Phase) -> Option<u128> {
        let q = phase.as_rational();
        let m = BigInt::from(self.modulus);
        let scaled = q.numer() * &m;
        let (quot, rem) = scaled.div_rem(q.denom());
        if !rem.is_zero() {
            return None; // phase not representable modulo L: condition unsatisfiable
        }
        Some(quot.mod_floor(&m).to_u128().unwrap())
    }

    /// Sum (a_j + 1) g_{fix[j]} over the sector variables, equal to `target`
    /// modulo 1.
    fn accepts(&self, fix: &[usize], exps: &[u32], target: u128) -> bool {
        let mut acc: u128 = 0;
        for (idx, &j) in fix.iter().enumerate() {
            let r = self.residues[j];
            if r != 0 {
                acc = (acc + (exps[idx] as u128 + 1) % self.modulus * r) % self.modulus;
            }
        }
        acc == target
    }
}

/// Context shared by the per-degree computations of one sector.
struct SectorContext<'a> {
    m: &'a ModelData,
    sm: &'a SectorModel,
    filters: Vec<GeneratorFilter>,
    /// Precomputed partials of the kept restricted polynomials:
    /// partials[ki][fj] = d W_{kept[ki], gamma} / d x_{fix[fj]}.
    partials: Vec<Vec<Polynomial>>,
    /// Sum of the fixed weights.
    base_weight: u64,
}

impl<'a> SectorContext<'a> {
    fn new(m: &'a ModelData, sm: &'a SectorModel, comps: &ComponentSet) -> Result<SectorContext<'a>> {
        let filters = comps
            .generators
            .iter()
            .map(|g| GeneratorFilter::build(g))
            .collect::<Result<Vec<_>>>()?;
        let partials = sm
            .polys
            .iter()
            .map(|w| sm.fix_x.iter().map(|&j| w.partial_x(j)).collect())
            .collect();
        let base_weight = sm.fix_x.iter().map(|&j| m.weights[j] as u64).sum();
        Ok(SectorContext { m, sm, filters, partials, base_weight })
    }

    /// x-exponent vectors over the fixed variables with the given weighted
    /// degree, filtered by the generator conditions with the given targets
    /// (one per generator).
    fn x_monomials(&self, xdeg: u64, targets: &[u128]) -> Vec<Vec<u32>> {
        let weights: Vec<u32> = self.sm.fix_x.iter().map(|&j| self.m.weights[j]).collect();
        let raw = crate::model::monomials_of_weighted_degree(&weights, xdeg);
        raw.into_iter()
            .filter(|exps| {
                self.filters
                    .iter()
                    .zip(targets)
                    .all(|(f, &t)| f.accepts(&self.sm.fix_x, exps, t))
            })
            .collect()
    }

    fn trivial_targets(&self) -> Option<Vec<u128>> {
        self.filters.iter().map(|f| f.target(&Phase::zero())).collect()
    }

    /// Targets <g_{j0}> for a partial-derivative multiplier.
    fn partial_targets(&self, j0: usize) -> Option<Vec<u128>> {
        self.filters
            .iter()
            .zip(&self.m.generators)
            .map(|(f, gen)| f.target(&gen[j0]))
            .collect()
    }

    /// Compositions b of `total` over the kept equations.
    fn p_compositions(&self, total: u32) -> Vec<Vec<u32>> {
        let slots = self.sm.kept.len();
        let mut out = Vec::new();
        let mut cur = vec![0u32; slots];
        fn rec(slots: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i + 1 == slots {
                cur[i] = left;
                out.push(cur.clone());
                return;
            }
            for v in 0..=left {
                cur[i] = v;
                rec(slots, i + 1, left - v, cur, out);
            }
        }
        if slots == 0 {
            if total == 0 {
                out.push(Vec::new());
            }
            return out;
        }
        rec(slots, 0, total, &mut cur, &mut out);
        out
    }

    /// Weighted-degree budget Sum (b_i + 1) d_i of a p-composition.
    fn p_budget(&self, b: &[u32]) -> u64 {
        self.sm
            .kept
            .iter()
            .zip(b)
            .map(|(&i, &bi)| (bi as u64 + 1) * self.m.degrees[i] as u64)
            .sum()
    }

    /// Full-length monomial from sector-local exponents.
    fn expand(&self, a: &[u32], b: &[u32]) -> Monomial {
        let mut x = vec![0u32; self.m.n];
        for (idx, &j) in self.sm.fix_x.iter().enumerate() {
            x[j] = a[idx];
        }
        let mut p = vec![0u32; self.m.r];
        for (idx, &i) in self.sm.kept.iter().enumerate() {
            p[i] = b[idx];
        }
        Monomial { x, p }
    }

    /// All Gamma-invariant basis monomials at p-degree k (volume twist
    /// included in the conditions).
    fn invariant_monomials(&self, k: u32) -> Vec<Monomial> {
        let Some(targets) = self.trivial_targets() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for b in self.p_compositions(k) {
            let budget = self.p_budget(&b);
            if budget < self.base_weight {
                continue;
            }
            let xdeg = budget - self.base_weight;
            for a in self.x_monomials(xdeg, &targets) {
                out.push(self.expand(&a, &b));
            }
        }
        out
    }

    /// Sparse rows spanning the degree- and character-matched ideal piece in
    /// the coordinates of `basis`.
    fn ideal_rows(&self, k: u32, basis: &HashMap<Monomial, u32>) -> Result<Vec<Vec<(u32, Rational)>>> {
        let mut rows: Vec<Vec<(u32, Rational)>> = Vec::new();
        let mut push_row = |row: Vec<(u32, Rational)>| {
            if !row.is_empty() {
                rows.push(row);
            }
        };
        let lookup = |mono: &Monomial| -> Result<u32> {
            basis.get(mono).copied().ok_or_else(|| {
                Error::Internal(format!("ideal product escaped the invariant basis: {mono:?}"))
            })
        };

        // multiplier * W_{i0,gamma}: p-degree k, x-degree shifted by d_{i0}
        if let Some(targets) = self.trivial_targets() {
            for (ki, &i0) in self.sm.kept.iter().enumerate() {
                let w_poly = &self.sm.polys[ki];
                if w_poly.is_zero() {
                    continue;
                }
                let d0 = self.m.degrees[i0] as u64;
                for b in self.p_compositions(k) {
                    let budget = self.p_budget(&b);
                    if budget < self.base_weight + d0 {
                        continue;
                    }
                    let xdeg = budget - self.base_weight - d0;
                    for a in self.x_monomials(xdeg, &targets) {
                        let mult = self.expand(&a, &b);
                        let mut row = Vec::with_capacity(w_poly.terms.len());
                        for (mono, coeff) in &w_poly.terms {
                            row.push((lookup(&mult.mul(mono))?, coeff.clone()));
                        }
                        row.sort_by_key(|(c, _)| *c);
                        push_row(row);
                    }
                }
            }
        }

        // multiplier * dW~/dx_{j0}: p-degree k-1 multipliers
        if k >= 1 {
            for (fj, &j0) in self.sm.fix_x.iter().enumerate() {
                let Some(targets) = self.partial_targets(j0) else {
                    continue;
                };
                let w0 = self.m.weights[j0] as u64;
                for b in self.p_compositions(k - 1) {
                    let budget = self.p_budget(&b);
                    if budget + w0 < self.base_weight {
                        continue;
                    }
                    let xdeg = budget + w0 - self.base_weight;
                    for a in self.x_monomials(xdeg, &targets) {
                        let mut row = Vec::new();
                        for (ki, _) in self.sm.kept.iter().enumerate() {
                            let dw = &self.partials[ki][fj];
                            if dw.is_zero() {
                                continue;
                            }
                            let mut b_shift = b.clone();
                            b_shift[ki] += 1;
                            let mult = self.expand(&a, &b_shift);
                            for (mono, coeff) in &dw.terms {
                                row.push((lookup(&mult.mul(mono))?, coeff.clone()));
                            }
                        }
                        row.sort_by_key(|(c, _)| *c);
                        push_row(row);
                    }
                }
            }
        }
        Ok(rows)
    }
}

/// All monomials of the sector's variables at p-degree k whose twisted
/// character is trivial against the torus and every group generator.
pub fn enumerate_invariant_monomials(
    m: &ModelData,
    sm: &SectorModel,
    comps: &ComponentSet,
    k: u32,
) -> Result<Vec<Monomial>> {
    Ok(SectorContext::new(m, sm, comps)?.invariant_monomials(k))
}

/// Two-prime rank of the ideal piece at p-degree k in the invariant basis.
pub fn ideal_piece_rank(
    m: &ModelData,
    sm: &SectorModel,
    comps: &ComponentSet,
    k: u32,
    engine: &RankEngine,
) -> Result<usize> {
    let ctx = SectorContext::new(m, sm, comps)?;
    let basis: HashMap<Monomial, u32> = ctx
        .invariant_monomials(k)
        .into_iter()
        .enumerate()
        .map(|(i, mono)| (mono, i as u32))
        .collect();
    if basis.is_empty() {
        return Ok(0);
    }
    let rows = ctx.ideal_rows(k, &basis)?;
    engine.rank(&rows)
}

/// dims[k] = #invariant monomials - ideal rank, for k = 0..d_tilde.
/// Sectors with d_tilde < 0 get an explicitly empty block.
pub fn primitive_hodge_dims(
    m: &ModelData,
    sm: &SectorModel,
    comps: &ComponentSet,
    engine: &RankEngine,
) -> Result<PrimitiveBlock> {
    if sm.d_tilde < 0 {
        return Ok(PrimitiveBlock::empty(sm.d_tilde));
    }
    let ctx = SectorContext::new(m, sm, comps)?;
    let mut dims = Vec::with_capacity(sm.d_tilde as usize + 1);
    for k in 0..=sm.d_tilde as u32 {
        let basis_list = ctx.invariant_monomials(k);
        if basis_list.is_empty() {
            dims.push(0);
            continue;
        }
        let basis: HashMap<Monomial, u32> = basis_list
            .into_iter()
            .enumerate()
            .map(|(i, mono)| (mono, i as u32))
            .collect();
        let rows = ctx.ideal_rows(k, &basis)?;
        let rank = engine.rank(&rows)?;
        dims.push(basis.len() as u64 - rank as u64);
    }
    Ok(PrimitiveBlock { d_tilde: sm.d_tilde, dims })
}

/// Coefficients of prod_j (1 - t^{d-w_j}) / (1 - t^{w_j}): the Hilbert
/// series of the Milnor algebra of a quasi-homogeneous isolated singularity.
/// Errors when some w_j >= d or when the quotient is not a polynomial.
pub fn milnor_hilbert_series(weights: &[u32], degree: u32) -> Result<Vec<BigInt>> {
    if let Some(&w) = weights.iter().find(|&&w| w >= degree) {
        return Err(Error::InadmissibleMilnorData(format!(
            "weight {w} is not smaller than the degree {degree}"
        )));
    }
    // numerator product
    let mut num = vec![BigInt::one()];
    for &w in weights {
        let shift = (degree - w) as usize;
        let mut next = vec![BigInt::zero(); num.len() + shift];
        for (i, c) in num.iter().enumerate() {
            next[i] += c;
            next[i + shift] -= c;
        }
        num = next;
    }
    // divide by each (1 - t^{w_j}): c[i] = a[i] + c[i - w], exactness checked
    for &w in weights {
        let w = w as usize;
        let mut quot = vec![BigInt::zero(); num.len()];
        for i in 0..num.len() {
            let carry = if i >= w { quot[i - w].clone() } else { BigInt::zero() };
            quot[i] = &num[i] + carry;
        }
        let tail_len = w.min(num.len());
        if quot[num.len() - tail_len..].iter().any(|c| !c.is_zero()) {
            return Err(Error::InadmissibleMilnorData(
                "quotient by (1 - t^w) is not a polynomial".into(),
            ));
        }
        num = quot[..num.len() - tail_len].to_vec();
    }
    while num.last().is_some_and(|c| c.is_zero()) {
        num.pop();
    }
    Ok(num)
}
