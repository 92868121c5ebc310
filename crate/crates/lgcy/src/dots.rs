//! The circular dot diagram of a group component and its balanced counting
//! function f, which pairs the CY-side and LG-side bundle classes degree by
//! degree.
//!
//! Per component with pure representative a_1..a_n: each j places w_j black
//! dots at the angles t with t w_j = a_j (mod 1), each i places d_i white
//! dots at t d_i = 0 (mod 1). The traversal order puts a white dot
//! infinitesimally before its angle and cuts the cycle at angle 0, so whites
//! at t = 0 wrap to the end; coincident same-color dots are ordered by
//! source index. The sweep counter assigns f, and each black dot is matched
//! to the next unmatched white dot with the same f.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{Phase, Rational};
use crate::model::ModelData;
use crate::symmetry::Component;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

/// One dot: a (t, source) incidence on the component's circle. Black dots
/// come from weights (source = j), white dots from degrees (source = i).
#[derive(Clone, Debug)]
pub struct Dot {
    pub color: Color,
    pub t: Phase,
    pub source: usize,
    /// Assigned by `order_and_f`.
    pub f: Option<i64>,
}

/// The diagram of one component. After `order_and_f` the dots are in
/// traversal order with f assigned.
#[derive(Clone, Debug)]
pub struct DotDiagram {
    pub component: usize,
    /// Sum of the pure representative's x-phases; dot degree = sum_a + f.
    pub sum_a: Rational,
    pub dots: Vec<Dot>,
}

/// A matched black/white pair with the common f value and common degree.
#[derive(Clone, Debug)]
pub struct PairedDots {
    pub black: (usize, Phase),
    pub white: (usize, Phase),
    pub f: i64,
    pub degree: Rational,
}

/// The explicit bidegree-preserving matching for one component.
#[derive(Clone, Debug)]
pub struct PairingCertificate {
    pub component: usize,
    pub pairs: Vec<PairedDots>,
}

/// Place the dots of a component (unordered, f unset).
pub fn build_diagram(m: &ModelData, comp: &Component) -> DotDiagram {
    let mut dots = Vec::new();
    for (j, a) in comp.pure_rep.iter().enumerate() {
        let w = m.weights[j] as i64;
        for k in 0..w {
            let t = Phase::new((a.as_rational() + crate::exact::rat_int(k)) / crate::exact::rat_int(w));
            dots.push(Dot { color: Color::Black, t, source: j, f: None });
        }
    }
    for (i, &d) in m.degrees.iter().enumerate() {
        for k in 0..d {
            dots.push(Dot { color: Color::White, t: Phase::from_pair(k as i64, d as i64), source: i, f: None });
        }
    }
    let sum_a = comp
        .pure_rep
        .iter()
        .fold(Rational::zero(), |acc, p| acc + p.as_rational());
    DotDiagram { component: comp.id, sum_a, dots }
}

/// Traversal key: effective angle with whites at t - epsilon and the cycle
/// cut at angle 0 (whites at t = 0 wrap to the end); the middle component
/// puts a white before a black at the same angle; same-color ties go by
/// ascending source index.
fn traversal_key(dot: &Dot) -> (Rational, u8, usize) {
    match dot.color {
        Color::Black => (dot.t.as_rational().clone(), 1, dot.source),
        Color::White => {
            let eff = if dot.t.is_zero() {
                crate::exact::rat_int(1)
            } else {
                dot.t.as_rational().clone()
            };
            (eff, 0, dot.source)
        }
    }
}

/// Order the dots and run the sweep: at a black dot assign f = v then
/// v += 1; at a white dot v -= 1 then assign f = v. The counter returns to
/// zero because black and white counts balance.
pub fn order_and_f(mut diag: DotDiagram) -> DotDiagram {
    diag.dots.sort_by_key(traversal_key);
    let mut v: i64 = 0;
    for dot in &mut diag.dots {
        match dot.color {
            Color::Black => {
                dot.f = Some(v);
                v += 1;
            }
            Color::White => {
                v -= 1;
                dot.f = Some(v);
            }
        }
    }
    debug_assert_eq!(v, 0, "sweep counter must close up");
    diag
}

/// Degree of a dot: sum_j a_j + f.
pub fn dot_degree(diag: &DotDiagram, dot: &Dot) -> Rational {
    &diag.sum_a + crate::exact::rat_int(dot.f.expect("f assigned"))
}

/// Match each black dot with f = v to the first unmatched white dot with
/// f = v scanning forward cyclically. A failure would falsify the balanced
/// cycle and is reported as an internal error with a diagnostic dump.
pub fn pair_dots(diag: &DotDiagram) -> Result<PairingCertificate> {
    let n = diag.dots.len();
    let mut taken = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for (idx, dot) in diag.dots.iter().enumerate() {
        if dot.color != Color::Black {
            continue;
        }
        let f = dot.f.ok_or_else(|| Error::Internal("pair_dots before order_and_f".into()))?;
        let mut matched = None;
        for step in 1..=n {
            let cand = (idx + step) % n;
            let other = &diag.dots[cand];
            if other.color == Color::White && !taken[cand] && other.f == Some(f) {
                matched = Some(cand);
                break;
            }
        }
        match matched {
            Some(cand) => {
                taken[cand] = true;
                let white = &diag.dots[cand];
                pairs.push(PairedDots {
                    black: (dot.source, dot.t.clone()),
                    white: (white.source, white.t.clone()),
                    f,
                    degree: dot_degree(diag, dot),
                });
            }
            None => {
                let dump: Vec<String> = diag
                    .dots
                    .iter()
                    .map(|d| format!("{:?}@{}:f={:?}", d.color, d.t, d.f))
                    .collect();
                return Err(Error::Internal(format!(
                    "dot matching failed for component {} at black ({}, t = {}) with f = {}; diagram: {}",
                    diag.component,
                    dot.source,
                    dot.t,
                    f,
                    dump.join(" ")
                )));
            }
        }
    }
    Ok(PairingCertificate { component: diag.component, pairs })
}
