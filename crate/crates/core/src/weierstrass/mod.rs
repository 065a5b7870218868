//! Rational elliptic surfaces `y² = x³ + a(t)x² + b(t)x + c(t)` with
//! `deg a ≤ 2`, `deg b ≤ 4`, `deg c ≤ 6`.
//!
//! Places of bad reduction are never located numerically. Each finite place
//! is represented by a monic square-free factor of `Δ` all of whose roots
//! share the same valuations of `(c₄, c₆, Δ)`; valuations are computed by
//! exact division.

mod poly;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::{build_catalog_matching, CatalogEntry, CatalogError};
use crate::exact::Rat;
use crate::kodaira::FiberType;
use crate::rootsys::LatticeSpec;

pub use poly::{ParsePolyError, Poly};

#[derive(Debug, thiserror::Error)]
pub enum WeierstrassError {
    #[error("deg {name} = {degree} exceeds {bound}")]
    DegreeBound { name: &'static str, degree: usize, bound: usize },
    #[error("discriminant is identically zero")]
    IdenticallyZero,
    #[error("model is not minimal at {0}")]
    NonMinimal(Place),
    #[error("valuations (c4: {v4}, c6: {v6}, disc: {vd}) at {place} match no fibre type")]
    Inconsistent { place: Place, v4: usize, v6: usize, vd: usize },
    #[error("Euler numbers sum to {0}, exceeding 12")]
    EulerBudget(u32),
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// Coefficients `a`, `b`, `c` of `y² = x³ + ax² + bx + c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct ModelFile<C> {
    a: Vec<C>,
    b: Vec<C>,
    c: Vec<C>,
}

impl WeierstrassModel {
    pub fn new(a: Poly, b: Poly, c: Poly) -> Result<Self, WeierstrassError> {
        for (name, p, bound) in [("a", &a, 2), ("b", &b, 4), ("c", &c, 6)] {
            if let Some(degree) = p.degree().filter(|&d| d > bound) {
                return Err(WeierstrassError::DegreeBound { name, degree, bound });
            }
        }
        Ok(WeierstrassModel { a, b, c })
    }

    /// `{"a": [...], "b": [...], "c": [...]}`, ascending coefficients given
    /// as `"num/den"` strings or integers.
    pub fn from_json(text: &str) -> Result<Self, WeierstrassError> {
        let raw: ModelFile<CoeffRepr> = serde_json::from_str(text)?;
        let conv = |v: Vec<CoeffRepr>| -> Result<Poly, WeierstrassError> {
            let coeffs = v
                .into_iter()
                .map(|c| match c {
                    CoeffRepr::Int(i) => Ok(Rat::from(i)),
                    CoeffRepr::Text(s) => s.parse::<Rat>().map_err(|e| {
                        WeierstrassError::Json(serde::de::Error::custom(format!("coefficient {s:?}: {e}")))
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Poly::new(coeffs))
        };
        Self::new(conv(raw.a)?, conv(raw.b)?, conv(raw.c)?)
    }

    pub fn to_json(&self) -> String {
        let strings = |p: &Poly| p.coeffs().iter().map(Rat::to_string).collect::<Vec<_>>();
        let file = ModelFile { a: strings(&self.a), b: strings(&self.b), c: strings(&self.c) };
        serde_json::to_string(&file).expect("serializable")
    }

    /// `x³ + ax² + bx + c` evaluated at a polynomial `x`.
    pub fn rhs(&self, x: &Poly) -> Poly {
        let x2 = x * x;
        let x3 = &x2 * x;
        &(&(&x3 + &(&self.a * &x2)) + &(&self.b * x)) + &self.c
    }

    fn b_invariants(&self) -> (Poly, Poly, Poly, Poly) {
        let k = |n: i64| Rat::from(n);
        let b2 = self.a.scale(&k(4));
        let b4 = self.b.scale(&k(2));
        let b6 = self.c.scale(&k(4));
        let b8 = &(&self.a * &self.c).scale(&k(4)) - &(&self.b * &self.b);
        (b2, b4, b6, b8)
    }

    pub fn c4(&self) -> Poly {
        let (b2, b4, _, _) = self.b_invariants();
        &(&b2 * &b2) - &b4.scale(&Rat::from(24))
    }

    pub fn c6(&self) -> Poly {
        let (b2, b4, b6, _) = self.b_invariants();
        let t1 = -&(&(&b2 * &b2) * &b2);
        let t2 = (&b2 * &b4).scale(&Rat::from(36));
        let t3 = b6.scale(&Rat::from(216));
        &(&t1 + &t2) - &t3
    }

    /// `−b₂²b₈ − 8b₄³ − 27b₆² + 9b₂b₄b₆`, without checking for zero.
    pub fn discriminant_poly(&self) -> Poly {
        let (b2, b4, b6, b8) = self.b_invariants();
        let k = |n: i64| Rat::from(n);
        let t1 = -&(&(&b2 * &b2) * &b8);
        let t2 = (&(&b4 * &b4) * &b4).scale(&k(-8));
        let t3 = (&b6 * &b6).scale(&k(-27));
        let t4 = (&(&b2 * &b4) * &b6).scale(&k(9));
        &(&(&t1 + &t2) + &t3) + &t4
    }
}

pub fn discriminant(m: &WeierstrassModel) -> Result<Poly, WeierstrassError> {
    let d = m.discriminant_poly();
    if d.is_zero() {
        Err(WeierstrassError::IdenticallyZero)
    } else {
        Ok(d)
    }
}

/// Square-free decomposition of a nonzero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeStructure {
    /// Monic square-free factors with the multiplicity of their roots.
    pub factors: Vec<(Poly, usize)>,
}

impl SquarefreeStructure {
    /// Number of distinct roots over the algebraic closure.
    pub fn distinct_roots(&self) -> usize {
        self.factors.iter().map(|(f, _)| f.degree_or_zero()).sum()
    }

    /// Root multiplicities with repetition, ascending.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.factors.iter().flat_map(|(f, k)| std::iter::repeat_n(*k, f.degree_or_zero())).collect();
        out.sort_unstable();
        out
    }
}

pub fn squarefree_structure(p: &Poly) -> SquarefreeStructure {
    SquarefreeStructure { factors: p.squarefree_decomposition() }
}

/// A place of `ℙ¹`: the roots of a monic square-free factor, or `∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Roots(Poly),
    Infinity,
}

impl Place {
    /// Number of points of `ℙ¹(ℚ̄)` it stands for.
    pub fn count(&self) -> usize {
        match self {
            Place::Roots(f) => f.degree_or_zero(),
            Place::Infinity => 1,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => f.write_str("t=oo"),
            Place::Roots(p) if p.degree() == Some(1) => write!(f, "t={}", -p.coeff(0)),
            Place::Roots(p) => write!(f, "roots of {p}"),
        }
    }
}

const CAP_C4: usize = 4;
const CAP_C6: usize = 6;

/// Kodaira type from the valuations of `c₄`, `c₆`, `Δ` (characteristic 0);
/// `v4` and `v6` are capped at 4 and 6.
pub fn fiber_from_valuations(place: &Place, v4: usize, v6: usize, vd: usize) -> Result<FiberType, WeierstrassError> {
    if vd == 0 {
        return Ok(FiberType::I(0));
    }
    if v4 == 0 {
        return Ok(FiberType::I(vd as u32));
    }
    if v4 >= CAP_C4 && v6 >= CAP_C6 && vd >= 12 {
        return Err(WeierstrassError::NonMinimal(place.clone()));
    }
    if v4 == 2 && v6 == 3 && vd > 6 {
        return Ok(FiberType::IStar(vd as u32 - 6));
    }
    Ok(match vd {
        2 => FiberType::II,
        3 => FiberType::III,
        4 => FiberType::IV,
        6 => FiberType::IStar(0),
        8 => FiberType::IVStar,
        9 => FiberType::IIIStar,
        10 => FiberType::IIStar,
        _ => return Err(WeierstrassError::Inconsistent { place: place.clone(), v4, v6, vd }),
    })
}

fn valuations_at_infinity(m: &WeierstrassModel) -> Result<(usize, usize, usize), WeierstrassError> {
    let d = discriminant(m)?;
    let at = |p: &Poly, weight: usize, cap: usize| match p.degree() {
        None => cap,
        Some(deg) => (weight - deg).min(cap),
    };
    Ok((at(&m.c4(), 4, CAP_C4), at(&m.c6(), 6, CAP_C6), 12 - d.degree_or_zero()))
}

pub fn kodaira_at(m: &WeierstrassModel, place: &Place) -> Result<FiberType, WeierstrassError> {
    let (v4, v6, vd) = match place {
        Place::Infinity => valuations_at_infinity(m)?,
        Place::Roots(f) => {
            let d = discriminant(m)?;
            (m.c4().valuation(f, CAP_C4), m.c6().valuation(f, CAP_C6), d.valuation(f, usize::MAX))
        }
    };
    fiber_from_valuations(place, v4, v6, vd)
}

/// Splits a square-free `f` into coprime factors on whose roots `p` has
/// constant valuation (capped at `cap`). The roots of
/// `gcd(f, p, p′, …, p⁽ʲ⁻¹⁾)` are those where `v(p) ≥ j`.
fn split_by_valuation(f: &Poly, p: &Poly, cap: usize) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut prev = f.clone();
    let mut deriv = p.clone();
    let mut g = f.clone();
    for j in 1..=cap {
        g = g.gcd(&deriv);
        deriv = deriv.derivative();
        let exact = prev.div_exact(&g).expect("gcd divides");
        if !exact.is_constant() {
            out.push((exact, j - 1));
        }
        if g.is_constant() {
            return out;
        }
        prev = g.clone();
    }
    out.push((prev, cap));
    out
}

/// Singular fibres of the model with their Euler total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberConfiguration {
    pub places: Vec<(Place, FiberType)>,
    pub euler_total: u32,
}

impl FiberConfiguration {
    /// Fibre types over `ℚ̄`, each place repeated by its number of points.
    pub fn fibers(&self) -> Vec<FiberType> {
        self.places.iter().flat_map(|(p, t)| std::iter::repeat_n(*t, p.count())).collect()
    }

    pub fn singular_fiber_count(&self) -> usize {
        self.places.iter().map(|(p, _)| p.count()).sum()
    }

    /// Direct sum of the root lattices of the reducible fibres.
    pub fn trivial_lattice(&self) -> LatticeSpec {
        LatticeSpec::from_types(self.fibers().iter().filter_map(FiberType::root_lattice))
    }
}

pub fn fiber_configuration(m: &WeierstrassModel) -> Result<FiberConfiguration, WeierstrassError> {
    let d = discriminant(m)?;
    let (c4, c6) = (m.c4(), m.c6());
    let mut places = Vec::new();
    for (f, vd) in squarefree_structure(&d).factors {
        for (f4, v4) in split_by_valuation(&f, &c4, CAP_C4) {
            for (f6, v6) in split_by_valuation(&f4, &c6, CAP_C6) {
                let place = Place::Roots(f6);
                let t = fiber_from_valuations(&place, v4, v6, vd)?;
                places.push((place, t));
            }
        }
    }
    let t = kodaira_at(m, &Place::Infinity)?;
    if t != FiberType::I(0) {
        places.push((Place::Infinity, t));
    }
    places.sort();
    let euler_total = places.iter().map(|(p, t)| p.count() as u32 * t.euler_number()).sum();
    Ok(FiberConfiguration { places, euler_total })
}

/// Rejects fibre lists whose Euler numbers exceed the budget of 12.
pub fn check_euler_budget(fibers: &[FiberType]) -> Result<u32, WeierstrassError> {
    let total = fibers.iter().map(FiberType::euler_number).sum();
    if total > 12 {
        Err(WeierstrassError::EulerBudget(total))
    } else {
        Ok(total)
    }
}

/// Trivial lattices possible when `Δ` has a single root that is not 12-fold.
pub const SINGLE_ROOT_LATTICES: [&str; 4] = ["E8", "E7+A1", "E6+A2", "D4^2"];

/// Trivial lattices possible when `Δ` has two roots, or three with
/// `deg Δ = 12`.
pub const FEW_ROOT_LATTICES: [&str; 19] = [
    "E8", "E7+A1", "E6+A2", "D4^2", "D5+A3", "D6+A1^2", "D8", "D6+A1", "D5+A1^2", "D5+A2", "E7", "E6+A1",
    "D7", "A2^3", "D4+A1^2", "D5+A1", "D6", "D4+A2", "E6",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundCategory {
    /// At most 3 integral sections.
    AtMost3,
    /// At most the maximum over the few-fibre lattices.
    AtMostN0,
    /// At least one integral section.
    AtLeast1,
    /// No clause applies (constant `Δ`, or a single 12-fold root).
    Unclassified,
}

impl fmt::Display for BoundCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundCategory::AtMost3 => "AT_MOST_3",
            BoundCategory::AtMostN0 => "AT_MOST_N0",
            BoundCategory::AtLeast1 => "AT_LEAST_1",
            BoundCategory::Unclassified => "UNCLASSIFIED",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BoundVerdict {
    pub category: BoundCategory,
    /// The clause that fired, in words.
    pub detail: String,
    pub distinct_roots: usize,
    pub degree: usize,
    /// `None` when the model is not minimal somewhere.
    pub configuration: Option<FiberConfiguration>,
    /// Catalog entries whose trivial lattice is the configuration's.
    pub exact_rows: Vec<CatalogEntry>,
}

impl BoundVerdict {
    /// Number of integral sections when every matching catalog entry agrees.
    pub fn exact_count(&self) -> Option<u64> {
        let first = self.exact_rows.first()?.section_count();
        self.exact_rows.iter().all(|e| e.section_count() == first).then_some(first)
    }

    /// Lower bound on the number of integral sections asserted by the clause.
    pub fn lower_bound(&self) -> Option<u64> {
        (self.category == BoundCategory::AtLeast1).then_some(1)
    }

    /// Upper bound asserted by the clause, where it is a number.
    pub fn upper_bound(&self) -> Option<u64> {
        (self.category == BoundCategory::AtMost3).then_some(3)
    }
}

/// Catalog entries with the given trivial lattice, computed.
pub fn catalog_entries_for(spec: &LatticeSpec) -> Result<Vec<CatalogEntry>, CatalogError> {
    build_catalog_matching(|e| &e.spec == spec)
}

/// Bound on the number of integral sections from the root structure of `Δ`,
/// clauses tried in order.
pub fn classify_bound(m: &WeierstrassModel) -> Result<BoundVerdict, WeierstrassError> {
    let d = discriminant(m)?;
    let sf = squarefree_structure(&d);
    let k = sf.distinct_roots();
    let degree = d.degree_or_zero();
    let (category, detail) = if k == 1 && sf.multiplicities() != [12] {
        (BoundCategory::AtMost3, "one distinct root, not 12-fold")
    } else if k == 2 {
        (BoundCategory::AtMostN0, "two distinct roots")
    } else if k == 3 && degree == 12 {
        (BoundCategory::AtMostN0, "three distinct roots and deg = 12")
    } else if k > 3 {
        (BoundCategory::AtLeast1, "more than three distinct roots")
    } else if k == 3 {
        (BoundCategory::AtLeast1, "three distinct roots and deg < 12")
    } else if (3..=9).contains(&degree) {
        (BoundCategory::AtLeast1, "3 <= deg <= 9")
    } else {
        (BoundCategory::Unclassified, "no clause applies")
    };
    let configuration = match fiber_configuration(m) {
        Ok(c) => Some(c),
        Err(WeierstrassError::NonMinimal(_)) | Err(WeierstrassError::Inconsistent { .. }) => None,
        Err(e) => return Err(e),
    };
    let exact_rows = match &configuration {
        Some(c) if c.euler_total == 12 => catalog_entries_for(&c.trivial_lattice())?,
        _ => Vec::new(),
    };
    Ok(BoundVerdict { category, detail: detail.to_string(), distinct_roots: k, degree, configuration, exact_rows })
}

/// Whether `(x, y)` is a section of the polynomial form `deg x ≤ 2`,
/// `deg y ≤ 3`.
pub fn verify_section(m: &WeierstrassModel, x: &Poly, y: &Poly) -> bool {
    x.degree_or_zero() <= 2 && y.degree_or_zero() <= 3 && y * y == m.rhs(x)
}

/// Rationals `p/q` with `|p| ≤ bound`, `1 ≤ q ≤ den`, ascending, distinct.
fn grid(bound: u32, den: u32) -> Vec<Rat> {
    let mut v: Vec<Rat> = (1..=den.max(1) as i64)
        .flat_map(|q| (-(bound as i64)..=bound as i64).map(move |p| Rat::new(p, q)))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// All sections `(x, y)` with `x = gt² + ht + k`, coefficients in the grid
/// `p/q`, `|p| ≤ box_bound`, `q ≤ den`; `y` is recovered by an exact square
/// root. Both signs of `y` are returned.
pub fn search_sections(m: &WeierstrassModel, box_bound: u32, den: u32) -> Vec<(Poly, Poly)> {
    let values = grid(box_bound, den);
    let mut out = Vec::new();
    for g in &values {
        for h in &values {
            for k in &values {
                let x = Poly::new(vec![k.clone(), h.clone(), g.clone()]);
                let rhs = m.rhs(&x);
                if rhs.degree_or_zero() > 6 {
                    continue;
                }
                let Some(y) = rhs.sqrt_exact() else { continue };
                if y.is_zero() {
                    out.push((x, y));
                } else {
                    out.push((x.clone(), -&y));
                    out.push((x, y));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn model(a: &str, b: &str, c: &str) -> WeierstrassModel {
        WeierstrassModel::new(p(a), p(b), p(c)).unwrap()
    }

    #[test]
    fn discriminant_closed_form() {
        // 16(a²b² − 4b³ − 4a³c + 18abc − 27c²) and 1728Δ = c₄³ − c₆²
        let m = model("2*t^2-1", "t^3+t", "-t^5+3");
        let (a, b, c) = (&m.a, &m.b, &m.c);
        let k = |n: i64| Rat::from(n);
        let closed = (&(&(&(&(a * a) * &(b * b)) - &(&(b * b) * b).scale(&k(4)))
            - &(&(&(a * a) * a) * c).scale(&k(4)))
            + &(&(&(a * b) * c).scale(&k(18)) - &(c * c).scale(&k(27))))
            .scale(&k(16));
        let d = discriminant(&m).unwrap();
        assert_eq!(d, closed);
        let c4 = m.c4();
        let c6 = m.c6();
        assert_eq!(d.scale(&k(1728)), &(&(&c4 * &c4) * &c4) - &(&c6 * &c6));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&model("0", "0", "t^3")).unwrap(), p("-432*t^6"));
        assert_eq!(discriminant(&model("0", "1", "0")).unwrap(), p("-64"));
        assert!(matches!(discriminant(&model("0", "0", "0")), Err(WeierstrassError::IdenticallyZero)));
    }

    #[test]
    fn degree_bounds_enforced() {
        assert!(matches!(
            WeierstrassModel::new(p("t^3"), p("0"), p("0")),
            Err(WeierstrassError::DegreeBound { name: "a", .. })
        ));
        assert!(WeierstrassModel::new(p("0"), p("t^5"), p("0")).is_err());
        assert!(WeierstrassModel::new(p("0"), p("0"), p("t^7")).is_err());
    }

    #[test]
    fn valuation_table() {
        let pl = Place::Infinity;
        assert_eq!(fiber_from_valuations(&pl, 0, 0, 5).unwrap(), FiberType::I(5));
        assert_eq!(fiber_from_valuations(&pl, 1, 1, 2).unwrap(), FiberType::II);
        assert_eq!(fiber_from_valuations(&pl, 1, 2, 3).unwrap(), FiberType::III);
        assert_eq!(fiber_from_valuations(&pl, 2, 2, 4).unwrap(), FiberType::IV);
        assert_eq!(fiber_from_valuations(&pl, 4, 3, 6).unwrap(), FiberType::IStar(0));
        assert_eq!(fiber_from_valuations(&pl, 2, 3, 8).unwrap(), FiberType::IStar(2));
        assert_eq!(fiber_from_valuations(&pl, 3, 4, 8).unwrap(), FiberType::IVStar);
        assert_eq!(fiber_from_valuations(&pl, 3, 5, 9).unwrap(), FiberType::IIIStar);
        assert_eq!(fiber_from_valuations(&pl, 4, 5, 10).unwrap(), FiberType::IIStar);
        assert!(matches!(fiber_from_valuations(&pl, 4, 6, 12), Err(WeierstrassError::NonMinimal(_))));
        assert!(fiber_from_valuations(&pl, 3, 3, 5).is_err());
    }

    #[test]
    fn splitting_by_valuation() {
        // f = t(t-1)(t+1); p vanishes to order 2 at 0, order 1 at 1
        let f = p("t^3-t");
        let q = &p("t^2") * &p("t-1");
        let mut parts = split_by_valuation(&f, &q, 4);
        parts.sort_by_key(|(_, v)| *v);
        assert_eq!(parts, vec![(p("t+1"), 0), (p("t-1"), 1), (p("t"), 2)]);
        assert_eq!(split_by_valuation(&f, &Poly::zero(), 4), vec![(f.clone(), 4)]);
    }

    #[test]
    fn trivial_product_is_unclassified() {
        let v = classify_bound(&model("0", "1", "0")).unwrap();
        assert_eq!(v.category, BoundCategory::Unclassified);
        assert!(v.configuration.is_none());
    }

    #[test]
    fn sections_verify() {
        let m = model("0", "0", "t^3");
        assert!(verify_section(&m, &p("-t"), &Poly::zero()));
        assert!(!verify_section(&m, &p("t^3"), &Poly::zero()));
        assert!(!verify_section(&m, &Poly::zero(), &p("t^3")));
        let found = search_sections(&m, 2, 1);
        assert!(found.contains(&(p("-t"), Poly::zero())));
        assert!(found.iter().all(|(x, y)| verify_section(&m, x, y)));
        assert_eq!(grid(1, 2), vec![rat(-1, 1), rat(-1, 2), rat(0, 1), rat(1, 2), rat(1, 1)]);
    }

    #[test]
    fn model_json() {
        let m = WeierstrassModel::from_json(r#"{"a": [], "b": ["0", 0], "c": [0, 0, 0, "1"]}"#).unwrap();
        assert_eq!(m, model("0", "0", "t^3"));
        assert_eq!(WeierstrassModel::from_json(&m.to_json()).unwrap(), m);
        assert!(WeierstrassModel::from_json(r#"{"a": ["1/0"], "b": [], "c": []}"#).is_err());
        assert!(WeierstrassModel::from_json(r#"{"a": [], "b": []}"#).is_err());
    }
}
