//! Assembly of the bigraded tables on both sides of the correspondence,
//! their absolute bundle counterparts, the narrow/broad classification, and
//! the verification report with the dot-pairing certificate.
//!
//! All bidegrees are exact rationals. The CY side shifts every sector class
//! by a_X (the age on the tangent space of X_W); the LG side shifts its
//! primitive blocks by a_tot + r_gamma - r, and the exact identity
//! a_X = a_tot + r_gamma - r is what makes the two assemblies share their
//! primitive blocks class by class.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::dots::{build_diagram, dot_degree, order_and_f, pair_dots, Color, DotDiagram, PairingCertificate};
use crate::error::Result;
use crate::exact::{rat_int, Phase, RankEngine, Rational};
use crate::jacobian::{primitive_hodge_dims, PrimitiveBlock};
use crate::model::ModelData;
use crate::symmetry::{enumerate_components, enumerate_sectors, restrict_to_sector, ComponentSet, Sector, Side};

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ambient,
    Primitive,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Narrowness {
    Narrow,
    Broad,
}

/// Which sector a class came from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SectorRef {
    pub component: usize,
    pub t: Phase,
}

impl std::fmt::Display for SectorRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "g{} t={}", self.component, self.t)
    }
}

/// One contribution to a bigraded table.
#[derive(Clone, Debug)]
pub struct CRClass {
    pub sector: SectorRef,
    pub kind: Kind,
    pub index: usize,
    pub p: Rational,
    pub q: Rational,
    pub multiplicity: u64,
    pub narrowness: Option<Narrowness>,
}

/// Map from rational bidegree to multiplicity, with full per-class provenance.
#[derive(Clone, Debug, Default)]
pub struct BigradedTable {
    pub entries: BTreeMap<(Rational, Rational), u64>,
    pub provenance: Vec<CRClass>,
}

impl BigradedTable {
    pub fn add(&mut self, class: CRClass) {
        if class.multiplicity == 0 {
            return;
        }
        *self.entries.entry((class.p.clone(), class.q.clone())).or_insert(0) += class.multiplicity;
        self.provenance.push(class);
    }

    pub fn get(&self, p: &Rational, q: &Rational) -> u64 {
        self.entries.get(&(p.clone(), q.clone())).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn same_entries(&self, other: &BigradedTable) -> bool {
        self.entries == other.entries
    }
}

/// Dimensions of H^k(F_gamma)^Gamma, the invariant cohomology of the
/// sector's Milnor fibre.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilnorFiberDims {
    pub sector: SectorRef,
    pub dims: BTreeMap<i64, u64>,
}

/// Everything computed once per model: components, all sectors, and the
/// primitive block of every sector that carries one.
pub struct Pipeline<'m> {
    pub model: &'m ModelData,
    pub comps: ComponentSet,
    pub sectors: Vec<Sector>,
    /// Parallel to `sectors`; present exactly when n_gamma >= 1 and
    /// r_gamma < n_gamma (d_tilde >= 0).
    pub blocks: Vec<Option<PrimitiveBlock>>,
    pub engine: RankEngine,
}

impl<'m> Pipeline<'m> {
    pub fn build(model: &'m ModelData) -> Result<Pipeline<'m>> {
        let engine = model.rank_engine()?;
        let comps = enumerate_components(model)?;
        let sectors = enumerate_sectors(model, &comps, Side::All);
        let blocks: Vec<Option<PrimitiveBlock>> = sectors
            .par_iter()
            .map(|s| -> Result<Option<PrimitiveBlock>> {
                if s.n_fix() >= 1 && s.r_fix() < s.n_fix() {
                    let sm = restrict_to_sector(model, s);
                    Ok(Some(primitive_hodge_dims(model, &sm, &comps, &engine)?))
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Pipeline { model, comps, sectors, blocks, engine })
    }

    fn sector_ref(&self, s: &Sector) -> SectorRef {
        SectorRef { component: s.component, t: s.t.clone() }
    }

    /// Chen-Ruan orbifold cohomology of [X_W/G].
    pub fn assemble_cy(&self) -> BigradedTable {
        let mut table = BigradedTable::default();
        for (idx, s) in self.sectors.iter().enumerate() {
            if s.n_fix() == 0 || s.r_fix() >= s.n_fix() {
                continue; // empty complete intersection contributes nothing
            }
            let dt = s.d_tilde();
            for k in 0..=dt {
                let deg = &s.a_x + rat_int(k);
                table.add(CRClass {
                    sector: self.sector_ref(s),
                    kind: Kind::Ambient,
                    index: k as usize,
                    p: deg.clone(),
                    q: deg,
                    multiplicity: 1,
                    narrowness: None,
                });
            }
            let block = self.blocks[idx].as_ref().expect("block computed for CY sector");
            for (k, &dim) in block.dims.iter().enumerate() {
                table.add(CRClass {
                    sector: self.sector_ref(s),
                    kind: Kind::Primitive,
                    index: k,
                    p: &s.a_x + rat_int(dt - k as i64),
                    q: &s.a_x + rat_int(k as i64),
                    multiplicity: dim,
                    narrowness: None,
                });
            }
        }
        table
    }

    /// The bigraded state space of the hybrid LG model.
    pub fn assemble_lg(&self) -> BigradedTable {
        let mut table = BigradedTable::default();
        let r = self.model.r as i64;
        for (idx, s) in self.sectors.iter().enumerate() {
            if s.r_fix() == 0 {
                continue;
            }
            let (n_fix, r_fix) = (s.n_fix() as i64, s.r_fix() as i64);
            if r_fix < n_fix {
                // primitive block, shifted by a_tot + r_gamma - r
                let shift = &s.a_tot + rat_int(r_fix - r);
                let dt = s.d_tilde();
                let block = self.blocks[idx].as_ref().expect("block computed for LG sector");
                for (k, &dim) in block.dims.iter().enumerate() {
                    table.add(CRClass {
                        sector: self.sector_ref(s),
                        kind: Kind::Primitive,
                        index: k,
                        p: &shift + rat_int(dt - k as i64),
                        q: &shift + rat_int(k as i64),
                        multiplicity: dim,
                        narrowness: None,
                    });
                }
            } else if r_fix > n_fix {
                for k in 0..(r_fix - n_fix) {
                    let deg = &s.a_tot + rat_int(k + n_fix - r);
                    table.add(CRClass {
                        sector: self.sector_ref(s),
                        kind: Kind::Ambient,
                        index: k as usize,
                        p: deg.clone(),
                        q: deg,
                        multiplicity: 1,
                        narrowness: None,
                    });
                }
            }
        }
        table
    }

    /// Absolute Chen-Ruan cohomology of the ambient bundle stack on the
    /// requested side: classes k = 0..n_gamma-1 (CY) resp. r_gamma-1 (LG)
    /// at p = q = k + a_tot.
    pub fn assemble_bundle(&self, side: Side) -> BigradedTable {
        let mut table = BigradedTable::default();
        for s in &self.sectors {
            let count = match side {
                Side::Cy => s.n_fix(),
                Side::Lg => s.r_fix(),
                Side::All => s.n_fix().max(s.r_fix()),
            };
            for k in 0..count {
                let deg = &s.a_tot + rat_int(k as i64);
                table.add(CRClass {
                    sector: self.sector_ref(s),
                    kind: Kind::Ambient,
                    index: k,
                    p: deg.clone(),
                    q: deg,
                    multiplicity: 1,
                    narrowness: None,
                });
            }
        }
        table
    }

    /// Invariant dimensions of the cohomology of the sector's Milnor fibre,
    /// by the case split r_gamma < n_gamma (ambient range plus the primitive
    /// total in the middle degree) versus r_gamma >= n_gamma (the fibration
    /// over the fixed base is trivial on cohomology).
    pub fn milnor_fiber_dims(&self, idx: usize) -> MilnorFiberDims {
        let s = &self.sectors[idx];
        let (n_fix, r_fix) = (s.n_fix() as i64, s.r_fix() as i64);
        let mut dims: BTreeMap<i64, u64> = BTreeMap::new();
        if r_fix < n_fix {
            let mut k = 0;
            while k <= 2 * r_fix - 2 {
                dims.insert(k, 1);
                k += 2;
            }
            let total = self.blocks[idx].as_ref().map_or(0, PrimitiveBlock::total);
            if total > 0 {
                *dims.entry(n_fix + r_fix - 2).or_insert(0) += total;
            }
        } else {
            let mut k = 0;
            while k <= 2 * (n_fix - 1) {
                dims.insert(k, 1);
                k += 2;
            }
        }
        MilnorFiberDims { sector: self.sector_ref(s), dims }
    }

    /// Independently assemble the relative table of the CY-side pair from
    /// the Milnor-fibre dimensions and the long exact sequence, then check
    /// it equals the CY table shifted by (r, r).
    pub fn thom_shift_check(&self) -> ThomReport {
        let r = self.model.r as i64;
        let mut relative = BigradedTable::default();
        for (idx, s) in self.sectors.iter().enumerate() {
            if s.n_fix() == 0 {
                continue;
            }
            let (n_fix, r_fix) = (s.n_fix() as i64, s.r_fix() as i64);
            let fiber = self.milnor_fiber_dims(idx);
            let h_o = |k: i64| -> u64 {
                if k >= 0 && k % 2 == 0 && k <= 2 * (n_fix - 1) { 1 } else { 0 }
            };
            let h_f = |k: i64| -> u64 { fiber.dims.get(&k).copied().unwrap_or(0) };
            // restriction H^k(O) -> H^k(F): iso through the Lefschetz range,
            // zero into the primitive middle; iso everywhere when the sector
            // carries no complete intersection
            let rho = |k: i64| -> u64 {
                if r_fix >= n_fix || k <= 2 * r_fix - 2 {
                    h_o(k).min(h_f(k))
                } else {
                    0
                }
            };
            let top = 2 * (n_fix + r_fix);
            for k in 0..=top {
                let kernel = h_o(k) - rho(k);
                let coker = h_f(k - 1) - rho(k - 1);
                if kernel > 0 {
                    debug_assert_eq!(k % 2, 0);
                    let deg = &s.a_tot + crate::exact::rat(k, 2);
                    relative.add(CRClass {
                        sector: self.sector_ref(s),
                        kind: Kind::Ambient,
                        index: (k / 2) as usize,
                        p: deg.clone(),
                        q: deg,
                        multiplicity: kernel,
                        narrowness: None,
                    });
                }
                if coker > 0 {
                    // the only cokernel sits at k - 1 = n + r - 2: the
                    // primitive part, bigraded by the block with its twist
                    debug_assert_eq!(k - 1, n_fix + r_fix - 2);
                    let block = self.blocks[idx].as_ref().expect("primitive cokernel needs a block");
                    let dt = s.d_tilde();
                    for (j, &dim) in block.dims.iter().enumerate() {
                        relative.add(CRClass {
                            sector: self.sector_ref(s),
                            kind: Kind::Primitive,
                            index: j,
                            p: &s.a_tot + rat_int(dt - j as i64 + r_fix),
                            q: &s.a_tot + rat_int(j as i64 + r_fix),
                            multiplicity: dim,
                            narrowness: None,
                        });
                    }
                }
            }
        }
        // CY table shifted by (r, r)
        let mut shifted = BTreeMap::new();
        for ((p, q), mult) in self.assemble_cy().entries {
            shifted.insert((p + rat_int(r), q + rat_int(r)), mult);
        }
        let mut mismatches = Vec::new();
        let keys: std::collections::BTreeSet<_> =
            relative.entries.keys().chain(shifted.keys()).cloned().collect();
        for key in keys {
            let a = relative.entries.get(&key).copied().unwrap_or(0);
            let b = shifted.get(&key).copied().unwrap_or(0);
            if a != b {
                mismatches.push(format!(
                    "({}, {}): relative {} vs shifted CY {}",
                    key.0, key.1, a, b
                ));
            }
        }
        ThomReport { pass: mismatches.is_empty(), relative, mismatches }
    }

    /// Ordered dot diagrams, one per component.
    pub fn diagrams(&self) -> Vec<DotDiagram> {
        self.comps
            .components
            .iter()
            .map(|c| order_and_f(build_diagram(self.model, c)))
            .collect()
    }

    /// Verify the correspondence: shared primitive blocks, the dot-pairing
    /// certificate against the bundle tables, and equality of the assembled
    /// tables.
    pub fn verify_correspondence(&self) -> Result<VerificationReport> {
        let cy = self.assemble_cy();
        let lg = self.assemble_lg();

        // (a) primitive blocks shared verbatim between the two assemblies
        type PrimitiveClasses = BTreeMap<(usize, String), Vec<(Rational, Rational, u64)>>;
        let mut primitive_failures = Vec::new();
        let collect = |table: &BigradedTable| -> PrimitiveClasses {
            let mut out = PrimitiveClasses::new();
            for class in &table.provenance {
                if class.kind == Kind::Primitive && class.multiplicity > 0 {
                    out.entry((class.sector.component, class.sector.t.to_string()))
                        .or_default()
                        .push((class.p.clone(), class.q.clone(), class.multiplicity));
                }
            }
            for v in out.values_mut() {
                v.sort();
            }
            out
        };
        let cy_prim = collect(&cy);
        let lg_prim = collect(&lg);
        // sectors with r_gamma = 0 appear only on the CY side and must have
        // empty primitive blocks; everything else must match verbatim
        for (idx, s) in self.sectors.iter().enumerate() {
            let key = (s.component, s.t.to_string());
            if s.r_fix() == 0 {
                if cy_prim.contains_key(&key) {
                    primitive_failures.push(format!(
                        "sector {} has r_gamma = 0 but a nonzero primitive block",
                        self.sector_ref(s)
                    ));
                }
                if let Some(block) = self.blocks[idx].as_ref() {
                    if block.total() != 0 {
                        primitive_failures.push(format!(
                            "sector {} ambient-only block is nonzero: {:?}",
                            self.sector_ref(s),
                            block.dims
                        ));
                    }
                }
            }
        }
        let cy_only: Vec<_> = cy_prim
            .iter()
            .filter(|(k, v)| !v.is_empty() && (lg_prim.get(*k) != Some(*v)))
            .collect();
        let lg_only: Vec<_> = lg_prim
            .iter()
            .filter(|(k, v)| !v.is_empty() && (cy_prim.get(*k) != Some(*v)))
            .collect();
        for ((c, t), classes) in cy_only {
            if self
                .sectors
                .iter()
                .any(|s| s.component == *c && s.t.to_string() == *t && s.r_fix() > 0)
            {
                primitive_failures.push(format!("primitive block mismatch at g{c} t={t}: CY {classes:?}"));
            }
        }
        for ((c, t), classes) in lg_only {
            primitive_failures.push(format!("primitive block mismatch at g{c} t={t}: LG {classes:?}"));
        }

        // (b) dot certificate versus the bundle classes, degree by degree
        let bundle_cy = self.assemble_bundle(Side::Cy);
        let bundle_lg = self.assemble_bundle(Side::Lg);
        let mut certificate_failures = Vec::new();
        let mut certificates = Vec::new();
        for diag in self.diagrams() {
            // per-ray multiset of dot degrees must equal the sector's bundle degrees
            let mut by_ray: BTreeMap<Phase, (Vec<Rational>, Vec<Rational>)> = BTreeMap::new();
            for dot in &diag.dots {
                let e = by_ray.entry(dot.t.clone()).or_default();
                match dot.color {
                    Color::Black => e.0.push(dot_degree(&diag, dot)),
                    Color::White => e.1.push(dot_degree(&diag, dot)),
                }
            }
            for (t, (mut blacks, mut whites)) in by_ray {
                blacks.sort();
                whites.sort();
                let sector = self
                    .sectors
                    .iter()
                    .find(|s| s.component == diag.component && s.t == t)
                    .expect("every dotted ray is a sector");
                let expect = |count: usize| -> Vec<Rational> {
                    let mut v: Vec<Rational> =
                        (0..count).map(|k| &sector.a_tot + rat_int(k as i64)).collect();
                    v.sort();
                    v
                };
                if blacks != expect(sector.n_fix()) {
                    certificate_failures.push(format!(
                        "black degrees on ray {} of component {} are {:?}, bundle classes want {:?}",
                        t,
                        diag.component,
                        blacks.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        expect(sector.n_fix()).iter().map(ToString::to_string).collect::<Vec<_>>(),
                    ));
                }
                if whites != expect(sector.r_fix()) {
                    certificate_failures.push(format!(
                        "white degrees on ray {} of component {} are {:?}, bundle classes want {:?}",
                        t,
                        diag.component,
                        whites.iter().map(ToString::to_string).collect::<Vec<_>>(),
                        expect(sector.r_fix()).iter().map(ToString::to_string).collect::<Vec<_>>(),
                    ));
                }
            }
            certificates.push(pair_dots(&diag)?);
        }
        if !bundle_cy.same_entries(&bundle_lg) {
            certificate_failures.push("bundle tables differ".into());
        }

        // (c) table equality
        let mut table_failures = Vec::new();
        if !cy.same_entries(&lg) {
            let keys: std::collections::BTreeSet<_> =
                cy.entries.keys().chain(lg.entries.keys()).cloned().collect();
            for key in keys {
                let a = cy.entries.get(&key).copied().unwrap_or(0);
                let b = lg.entries.get(&key).copied().unwrap_or(0);
                if a != b {
                    table_failures.push(format!("({}, {}): CY {} vs LG {}", key.0, key.1, a, b));
                }
            }
        }

        Ok(VerificationReport {
            primitive_blocks_shared: Check::from_failures(primitive_failures),
            bundle_certificate: Check::from_failures(certificate_failures),
            tables_equal: Check::from_failures(table_failures),
            cy,
            lg: classify_states(lg),
            bundle_cy,
            bundle_lg,
            certificates,
        })
    }
}

/// A verdict plus structured counterexamples.
#[derive(Clone, Debug)]
pub struct Check {
    pub pass: bool,
    pub failures: Vec<String>,
}

impl Check {
    fn from_failures(failures: Vec<String>) -> Check {
        Check { pass: failures.is_empty(), failures }
    }
}

#[derive(Clone, Debug)]
pub struct ThomReport {
    pub pass: bool,
    pub relative: BigradedTable,
    pub mismatches: Vec<String>,
}

/// The full verification output of `verify`.
pub struct VerificationReport {
    pub primitive_blocks_shared: Check,
    pub bundle_certificate: Check,
    pub tables_equal: Check,
    pub cy: BigradedTable,
    pub lg: BigradedTable,
    pub bundle_cy: BigradedTable,
    pub bundle_lg: BigradedTable,
    pub certificates: Vec<PairingCertificate>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.primitive_blocks_shared.pass && self.bundle_certificate.pass && self.tables_equal.pass
    }
}

/// Narrow/broad classification on an LG-side table: ambient-kind classes
/// survive multiplication by the Euler class into the absolute cohomology,
/// primitive-kind classes die there.
pub fn classify_states(mut table: BigradedTable) -> BigradedTable {
    for class in &mut table.provenance {
        class.narrowness = Some(match class.kind {
            Kind::Ambient => Narrowness::Narrow,
            Kind::Primitive => Narrowness::Broad,
        });
    }
    table
}

/// Euler characteristic, totals, and symmetry verdicts of a table.
#[derive(Clone, Debug)]
pub struct HodgeSummary {
    pub euler: BigInt,
    pub total: u64,
    /// Dimension supported at integer bidegrees (the Euler characteristic
    /// only sees these).
    pub integer_total: u64,
    pub fractional_total: u64,
    pub pq_symmetric: bool,
    /// h^{p,q} = h^{D-p, D-q} with D = n - r - 1.
    pub serre_symmetric: bool,
}

pub fn hodge_report(table: &BigradedTable, dimension: i64) -> HodgeSummary {
    let mut euler = BigInt::zero();
    let mut integer_total = 0u64;
    let mut fractional_total = 0u64;
    for ((p, q), &mult) in &table.entries {
        if p.is_integer() && q.is_integer() {
            integer_total += mult;
            let sum = (p + q).to_integer();
            let sign = if (&sum % 2u8).is_zero() { 1 } else { -1 };
            euler += BigInt::from(sign) * BigInt::from(mult);
        } else {
            fractional_total += mult;
        }
    }
    let pq_symmetric = table
        .entries
        .iter()
        .all(|((p, q), &m)| table.get(q, p) == m);
    let d = rat_int(dimension);
    let serre_symmetric = table
        .entries
        .iter()
        .all(|((p, q), &m)| table.get(&(&d - p), &(&d - q)) == m);
    HodgeSummary {
        euler,
        total: table.total(),
        integer_total,
        fractional_total,
        pq_symmetric,
        serre_symmetric,
    }
}
