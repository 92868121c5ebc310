//! The diagonal symmetry group Gamma = <torus, generators> acting on
//! C^{n+r}, its component group G, and the Chen-Ruan sector data.
//!
//! A group element is recorded by its n x-phases followed by its r p-phases.
//! Every component of Gamma carries two forms: a torus-canonical form used
//! for equality testing, and a pure representative (p-phases all zero) whose
//! x-phases a_j place the dots and the age offset sum a_j of the pairing
//! argument.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{Phase, Rational};
use crate::model::{ModelData, Polynomial};

/// Safety cap on the component closure; a validated model (full-rank
/// exponent matrix) always stays far below it.
const CLOSURE_CAP: usize = 100_000;

/// A diagonal group element as phases: x-phases theta_1..theta_n, then
/// p-phases pi_1..pi_r.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupElement {
    pub x: Vec<Phase>,
    pub p: Vec<Phase>,
}

impl GroupElement {
    pub fn identity(n: usize, r: usize) -> GroupElement {
        GroupElement { x: vec![Phase::zero(); n], p: vec![Phase::zero(); r] }
    }

    /// A pure element: given x-phases, p-phases all zero.
    pub fn pure(x: Vec<Phase>, r: usize) -> GroupElement {
        GroupElement { x, p: vec![Phase::zero(); r] }
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a.add(b)).collect(),
            p: self.p.iter().zip(&other.p).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// Compose with the torus element of parameter t:
    /// theta_j -> <theta_j - t w_j>, pi_i -> <pi_i + t d_i>.
    pub fn torus_shift(&self, t: &Phase, weights: &[u32], degrees: &[u32]) -> GroupElement {
        GroupElement {
            x: self
                .x
                .iter()
                .zip(weights)
                .map(|(a, &w)| a.sub(&t.mul_int(w as i64)))
                .collect(),
            p: self
                .p
                .iter()
                .zip(degrees)
                .map(|(b, &d)| b.add(&t.mul_int(d as i64)))
                .collect(),
        }
    }
}

/// Lexicographically smallest phase vector among the w_1 torus shifts of g
/// that set the first x-phase to zero. Two elements canonicalize equally iff
/// they lie in the same component of Gamma.
pub fn canonicalize(g: &GroupElement, m: &ModelData) -> GroupElement {
    let w1 = m.weights[0];
    let a1 = g.x[0].as_rational();
    let mut best: Option<GroupElement> = None;
    for k in 0..w1 {
        // t = (a_1 + k) / w_1 kills the first x-phase
        let t = Phase::new((a1 + crate::exact::rat_int(k as i64)) / crate::exact::rat_int(w1 as i64));
        let shifted = g.torus_shift(&t, &m.weights, &m.degrees);
        debug_assert!(shifted.x[0].is_zero());
        best = match best {
            None => Some(shifted),
            Some(b) if shifted < b => Some(shifted),
            Some(b) => Some(b),
        };
    }
    best.unwrap()
}

/// One component of Gamma.
#[derive(Clone, Debug)]
pub struct Component {
    pub id: usize,
    /// x-phases a_j of the pure representative (p-phases are zero), chosen
    /// lexicographically smallest among the purity-preserving torus shifts.
    pub pure_rep: Vec<Phase>,
    /// Torus-canonical form, the component's equality key.
    pub canonical: GroupElement,
}

/// The component group G = Gamma / Gamma^0 with the generators that produced it.
#[derive(Clone, Debug)]
pub struct ComponentSet {
    pub components: Vec<Component>,
    pub generators: Vec<Vec<Phase>>,
}

impl ComponentSet {
    pub fn order(&self) -> usize {
        self.components.len()
    }
}

/// Pure torus shifts preserve purity exactly for t = k / gcd(d); the
/// lexicographic minimum over that orbit is the canonical pure representative.
fn canonical_pure_rep(x: &[Phase], m: &ModelData) -> Vec<Phase> {
    let g = m.degrees.iter().fold(0u32, |acc, &d| acc.gcd(&d)).max(1);
    let mut best: Option<Vec<Phase>> = None;
    for k in 0..g {
        let t = Phase::from_pair(k as i64, g as i64);
        let shifted: Vec<Phase> = x
            .iter()
            .zip(&m.weights)
            .map(|(a, &w)| a.sub(&t.mul_int(w as i64)))
            .collect();
        best = match best {
            None => Some(shifted),
            Some(b) if shifted < b => Some(shifted),
            Some(b) => Some(b),
        };
    }
    best.unwrap()
}

/// Breadth-first closure of the generators under multiplication,
/// deduplicated by `canonicalize`. Components come out sorted by their pure
/// representative, so the identity component always has id 0.
pub fn enumerate_components(m: &ModelData) -> Result<ComponentSet> {
    let identity = GroupElement::identity(m.n, m.r);
    let gens: Vec<GroupElement> = m
        .generators
        .iter()
        .map(|x| GroupElement::pure(x.clone(), m.r))
        .collect();
    let mut seen: BTreeMap<GroupElement, GroupElement> = BTreeMap::new(); // canonical -> pure element
    seen.insert(canonicalize(&identity, m), identity.clone());
    let mut frontier = vec![identity];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for el in &frontier {
            for gen in &gens {
                let prod = el.mul(gen);
                let key = canonicalize(&prod, m);
                if !seen.contains_key(&key) {
                    if seen.len() >= CLOSURE_CAP {
                        return Err(Error::GroupClosureExceeded { cap: CLOSURE_CAP });
                    }
                    seen.insert(key, prod.clone());
                    next.push(prod);
                }
            }
        }
        frontier = next;
    }
    let mut reps: Vec<(Vec<Phase>, GroupElement)> = seen
        .into_iter()
        .map(|(canonical, pure)| (canonical_pure_rep(&pure.x, m), canonical))
        .collect();
    reps.sort();
    let components = reps
        .into_iter()
        .enumerate()
        .map(|(id, (pure_rep, canonical))| Component { id, pure_rep, canonical })
        .collect();
    Ok(ComponentSet { components, generators: m.generators.clone() })
}

/// Which sectors to keep: CY needs a fixed base coordinate, LG a fixed fiber
/// coordinate.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Cy,
    Lg,
    All,
}

/// A Chen-Ruan sector: a group element gamma = rep * torus(t) together with
/// its fixed data and ages.
#[derive(Clone, Debug)]
pub struct Sector {
    pub component: usize,
    pub t: Phase,
    /// x-phases theta_j = <a_j - t w_j>.
    pub theta: Vec<Phase>,
    /// p-phases pi_i = <t d_i>.
    pub pi: Vec<Phase>,
    /// Character phases phi_i = <-pi_i> of chi_i(gamma).
    pub phi: Vec<Phase>,
    pub fix_x: Vec<usize>,
    pub fix_p: Vec<usize>,
    /// Age on C^{n+r}: sum theta + sum pi.
    pub a_tot: Rational,
    /// Age on the tangent space of X_W: sum theta - sum phi.
    pub a_x: Rational,
}

impl Sector {
    pub fn n_fix(&self) -> usize {
        self.fix_x.len()
    }

    pub fn r_fix(&self) -> usize {
        self.fix_p.len()
    }

    /// n_gamma - r_gamma - 1; negative when the sector carries no
    /// complete-intersection geometry.
    pub fn d_tilde(&self) -> i64 {
        self.n_fix() as i64 - self.r_fix() as i64 - 1
    }

    pub fn matches(&self, side: Side) -> bool {
        match side {
            Side::Cy => self.n_fix() >= 1,
            Side::Lg => self.r_fix() >= 1,
            Side::All => self.n_fix() + self.r_fix() >= 1,
        }
    }
}

fn build_sector(m: &ModelData, comp: &Component, t: Phase) -> Sector {
    let theta: Vec<Phase> = comp
        .pure_rep
        .iter()
        .zip(&m.weights)
        .map(|(a, &w)| a.sub(&t.mul_int(w as i64)))
        .collect();
    let pi: Vec<Phase> = m.degrees.iter().map(|&d| t.mul_int(d as i64)).collect();
    let phi: Vec<Phase> = pi.iter().map(|x| x.neg()).collect();
    let fix_x: Vec<usize> = theta.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(j, _)| j).collect();
    let fix_p: Vec<usize> = pi.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| i).collect();
    let sum = |ps: &[Phase]| ps.iter().fold(Rational::zero(), |acc, p| acc + p.as_rational());
    let a_tot = sum(&theta) + sum(&pi);
    let a_x = sum(&theta) - sum(&phi);
    Sector { component: comp.id, t, theta, pi, phi, fix_x, fix_p, a_tot, a_x }
}

/// All torus parameters with a fixed coordinate: t w_j = a_j (mod 1) for some
/// j, or t d_i = 0 (mod 1) for some i.
fn torus_candidates(m: &ModelData, comp: &Component) -> BTreeSet<Phase> {
    let mut ts = BTreeSet::new();
    for (j, a) in comp.pure_rep.iter().enumerate() {
        let w = m.weights[j] as i64;
        for k in 0..w {
            let t = Phase::new((a.as_rational() + crate::exact::rat_int(k)) / crate::exact::rat_int(w));
            ts.insert(t);
        }
    }
    for &d in &m.degrees {
        for k in 0..d {
            ts.insert(Phase::from_pair(k as i64, d as i64));
        }
    }
    ts
}

/// Enumerate sectors of the requested side, ordered by (component id, t).
pub fn enumerate_sectors(m: &ModelData, comps: &ComponentSet, side: Side) -> Vec<Sector> {
    let mut out = Vec::new();
    for comp in &comps.components {
        for t in torus_candidates(m, comp) {
            let sector = build_sector(m, comp, t);
            debug_assert!(
                sector.n_fix() + sector.r_fix() >= 1,
                "torus candidates always fix a coordinate"
            );
            if sector.matches(side) {
                out.push(sector);
            }
        }
    }
    out
}

/// (a_tot, a_X): the ages on C^{n+r} and on the tangent space of X_W.
pub fn sector_ages(s: &Sector) -> (Rational, Rational) {
    (s.a_tot.clone(), s.a_x.clone())
}

/// The model restricted to a sector: fixed variables, equations with trivial
/// character value, restricted polynomials.
#[derive(Clone, Debug)]
pub struct SectorModel {
    pub fix_x: Vec<usize>,
    /// Indices of the kept equations, exactly those with phi_i = 0.
    pub kept: Vec<usize>,
    /// W_{i,gamma} for i in `kept`, restricted to the fixed variables.
    pub polys: Vec<Polynomial>,
    pub d_tilde: i64,
}

pub fn restrict_to_sector(m: &ModelData, s: &Sector) -> SectorModel {
    let kept: Vec<usize> = (0..m.r).filter(|&i| s.phi[i].is_zero()).collect();
    debug_assert_eq!(kept, s.fix_p, "kept equations are the trivial-character ones");
    let polys = kept.iter().map(|&i| m.polynomials[i].restrict_x(&s.fix_x)).collect();
    SectorModel { fix_x: s.fix_x.clone(), kept, polys, d_tilde: s.d_tilde() }
}
