//! Kodaira fibre types and the component-class bookkeeping of their root
//! lattices.
//!
//! A vector `w` of pairings with the simple roots of an ADE lattice `R`
//! determines a coset of `R` in `R∨`. Its class is an index in
//! `0..class_count(t)`: `0` is the identity component; class `k ≥ 1`
//! corresponds to the simple component whose node is
//! `t.component_nodes()[k-1]`. For `D_n` the classes are
//! `1 = near`, `2 = far₁`, `3 = far₂`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use crate::exact::{inverse, rat, Rat, RatMatrix};
use crate::rootsys::{AdeType, Family};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KodairaError {
    #[error("invalid component element for {lattice}: {reason}")]
    InvalidElement { lattice: String, reason: String },
    #[error("unknown fibre symbol {0:?}")]
    Parse(String),
}

/// Kodaira fibre type. `I(0)` is a smooth fibre and `IStar(0)` is `I0*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiberType {
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IIStar,
    IIIStar,
    IVStar,
}

impl FiberType {
    pub fn euler_number(&self) -> u32 {
        match *self {
            FiberType::I(n) => n,
            FiberType::IStar(n) => n + 6,
            FiberType::II => 2,
            FiberType::III => 3,
            FiberType::IV => 4,
            FiberType::IVStar => 8,
            FiberType::IIIStar => 9,
            FiberType::IIStar => 10,
        }
    }

    pub fn root_lattice(&self) -> Option<AdeType> {
        match *self {
            FiberType::I(n) if n >= 2 => Some(AdeType::a(n as usize - 1)),
            FiberType::I(_) | FiberType::II => None,
            FiberType::IStar(n) => Some(AdeType::d(n as usize + 4)),
            FiberType::III => Some(AdeType::a(1)),
            FiberType::IV => Some(AdeType::a(2)),
            FiberType::IVStar => Some(AdeType::e(6)),
            FiberType::IIIStar => Some(AdeType::e(7)),
            FiberType::IIStar => Some(AdeType::e(8)),
        }
    }

    pub fn is_reducible(&self) -> bool {
        self.root_lattice().is_some()
    }
}

pub fn euler_number(f: FiberType) -> u32 {
    f.euler_number()
}

pub fn root_lattice_of(f: FiberType) -> Option<AdeType> {
    f.root_lattice()
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberType::I(n) => write!(f, "I{n}"),
            FiberType::IStar(n) => write!(f, "I{n}*"),
            FiberType::II => f.write_str("II"),
            FiberType::III => f.write_str("III"),
            FiberType::IV => f.write_str("IV"),
            FiberType::IIStar => f.write_str("II*"),
            FiberType::IIIStar => f.write_str("III*"),
            FiberType::IVStar => f.write_str("IV*"),
        }
    }
}

impl FromStr for FiberType {
    type Err = KodairaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || KodairaError::Parse(s.to_string());
        let (body, star) = match s.strip_suffix('*') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let fixed = match body {
            "II" => Some(if star { FiberType::IIStar } else { FiberType::II }),
            "III" => Some(if star { FiberType::IIIStar } else { FiberType::III }),
            "IV" => Some(if star { FiberType::IVStar } else { FiberType::IV }),
            _ => None,
        };
        if let Some(t) = fixed {
            return Ok(t);
        }
        let digits = body.strip_prefix('I').ok_or_else(bad)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: u32 = digits.parse().map_err(|_| bad())?;
        Ok(if star { FiberType::IStar(n) } else { FiberType::I(n) })
    }
}

/// A simple fibre component a section can meet; `index` 0 is the identity
/// component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentIndex {
    pub fiber: FiberType,
    pub index: usize,
}

/// Number of component classes, i.e. the order of the discriminant group.
pub fn class_count(t: AdeType) -> usize {
    t.component_nodes().len() + 1
}

struct ClassTable {
    inv: RatMatrix,
}

fn class_table(t: AdeType) -> Arc<ClassTable> {
    static CACHE: OnceLock<Mutex<HashMap<AdeType, Arc<ClassTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("class table cache poisoned");
    guard
        .entry(t)
        .or_insert_with(|| {
            let inv = inverse(&t.cartan().to_rat()).expect("Cartan matrices are invertible");
            Arc::new(ClassTable { inv })
        })
        .clone()
}

/// Class of the coset `C⁻¹w + ℤⁿ`, where `w` is the vector of pairings of a
/// vector with the simple roots of `t`.
pub fn classify_component(t: AdeType, w: &[BigInt]) -> Result<usize, KodairaError> {
    if w.len() != t.rank() {
        return Err(KodairaError::InvalidElement {
            lattice: t.to_string(),
            reason: format!("expected {} coordinates, got {}", t.rank(), w.len()),
        });
    }
    let table = class_table(t);
    let x: Vec<Rat> = table.inv.mul_vec(&w.iter().map(Rat::from).collect::<Vec<_>>());
    if x.iter().all(Rat::is_integer) {
        return Ok(0);
    }
    for (k, &node) in t.component_nodes().iter().enumerate() {
        if x.iter().enumerate().all(|(i, xi)| (xi - &table.inv[(i, node)]).is_integer()) {
            return Ok(k + 1);
        }
    }
    unreachable!("every coset of a root lattice has a minuscule representative")
}

fn check_class(t: AdeType, k: usize) -> Result<(), KodairaError> {
    if k < class_count(t) {
        Ok(())
    } else {
        Err(KodairaError::InvalidElement {
            lattice: t.to_string(),
            reason: format!("class {k} out of range"),
        })
    }
}

/// Local contribution of a section meeting component class `k`.
pub fn class_contribution(t: AdeType, k: usize) -> Result<Rat, KodairaError> {
    class_pair_contribution(t, k, k)
}

/// Local contribution of a pair of sections meeting classes `i` and `j`.
pub fn class_pair_contribution(t: AdeType, i: usize, j: usize) -> Result<Rat, KodairaError> {
    check_class(t, i)?;
    check_class(t, j)?;
    if i == 0 || j == 0 {
        return Ok(Rat::zero());
    }
    let (i, j) = (i.min(j), i.max(j));
    let n = t.rank() as i64;
    Ok(match t.family() {
        Family::A => rat(i as i64 * (n + 1 - j as i64), n + 1),
        Family::D => match (i, j) {
            (1, 1) => rat(1, 1),
            (1, _) => rat(1, 2),
            (a, b) if a == b => rat(n, 4),
            _ => rat(n - 2, 4),
        },
        Family::E => match (n, i, j) {
            (6, 1, 2) => rat(2, 3),
            (6, _, _) => rat(4, 3),
            _ => rat(3, 2),
        },
    })
}

pub fn contribution(t: AdeType, w: &[BigInt]) -> Result<Rat, KodairaError> {
    class_contribution(t, classify_component(t, w)?)
}

pub fn contribution_pair(t: AdeType, w1: &[BigInt], w2: &[BigInt]) -> Result<Rat, KodairaError> {
    class_pair_contribution(t, classify_component(t, w1)?, classify_component(t, w2)?)
}

/// Smallest class in the orbit of `k` under the Dynkin diagram symmetries.
pub fn canonical_class(t: AdeType, k: usize) -> usize {
    let n = t.rank();
    match (t.family(), n) {
        _ if k == 0 => 0,
        (Family::A, _) => k.min(n + 1 - k),
        (Family::D, 4) => 1,
        (Family::D, _) => k.min(2),
        (Family::E, 6) => 1,
        _ => k,
    }
}

/// Node of the Dynkin diagram carrying the simple component of class `k ≥ 1`.
pub fn class_node(t: AdeType, k: usize) -> Option<usize> {
    k.checked_sub(1).and_then(|i| t.component_nodes().get(i).copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::BigInt;

    fn unit(t: AdeType, node: usize) -> Vec<BigInt> {
        (0..t.rank()).map(|i| BigInt::from((i == node) as i64)).collect()
    }

    #[test]
    fn euler_numbers() {
        assert_eq!(euler_number(FiberType::IStar(0)), 6);
        assert_eq!(euler_number(FiberType::IIIStar), 9);
        assert_eq!(euler_number(FiberType::I(1)), 1);
        assert_eq!(euler_number(FiberType::IStar(3)), 9);
    }

    #[test]
    fn root_lattices() {
        assert_eq!(root_lattice_of(FiberType::I(6)), Some(AdeType::a(5)));
        assert_eq!(root_lattice_of(FiberType::IStar(1)), Some(AdeType::d(5)));
        assert_eq!(root_lattice_of(FiberType::III), Some(AdeType::a(1)));
        assert_eq!(root_lattice_of(FiberType::I(1)), None);
        assert_eq!(root_lattice_of(FiberType::II), None);
        assert_eq!(root_lattice_of(FiberType::I(0)), None);
    }

    #[test]
    fn symbols_round_trip() {
        for s in ["I0", "I3", "I1*", "I0*", "II", "III", "IV", "II*", "III*", "IV*"] {
            assert_eq!(s.parse::<FiberType>().unwrap().to_string(), s);
        }
        for bad in ["", "I", "V", "I*", "Ix", "IIII", "I-1"] {
            assert!(bad.parse::<FiberType>().is_err(), "{bad}");
        }
    }

    #[test]
    fn contributions_from_table() {
        let a5 = AdeType::a(5);
        assert_eq!(class_contribution(a5, 1).unwrap(), rat(5, 6));
        assert_eq!(class_contribution(a5, 2).unwrap(), rat(4, 3));
        assert_eq!(class_contribution(a5, 3).unwrap(), rat(3, 2));
        let d5 = AdeType::d(5);
        assert_eq!(class_contribution(d5, 1).unwrap(), rat(1, 1));
        assert_eq!(class_contribution(d5, 2).unwrap(), rat(5, 4));
        assert_eq!(class_contribution(d5, 3).unwrap(), rat(5, 4));
        assert_eq!(class_pair_contribution(AdeType::a(3), 1, 2).unwrap(), rat(1, 2));
        assert_eq!(class_contribution(AdeType::a(7), 4).unwrap(), rat(2, 1));
        assert!(class_contribution(AdeType::e(8), 1).is_err());
        assert!(class_contribution(AdeType::a(1), 2).is_err());
    }

    #[test]
    fn contributions_match_inverse_cartan() {
        // the pair term is the (node, node') entry of the inverse Cartan matrix
        let types = [
            AdeType::a(1),
            AdeType::a(2),
            AdeType::a(5),
            AdeType::a(7),
            AdeType::d(4),
            AdeType::d(5),
            AdeType::d(6),
            AdeType::e(6),
            AdeType::e(7),
        ];
        for t in types {
            let inv = inverse(&t.cartan().to_rat()).unwrap();
            let nodes = t.component_nodes();
            for (i, &a) in nodes.iter().enumerate() {
                for (j, &b) in nodes.iter().enumerate() {
                    assert_eq!(class_pair_contribution(t, i + 1, j + 1).unwrap(), inv[(a, b)], "{t}");
                }
            }
        }
    }

    #[test]
    fn classify_unit_vectors() {
        let t = AdeType::d(5);
        assert_eq!(classify_component(t, &unit(t, 0)).unwrap(), 1);
        assert_eq!(classify_component(t, &unit(t, 3)).unwrap(), 2);
        assert_eq!(classify_component(t, &unit(t, 4)).unwrap(), 3);
        // the middle nodes of D5 lie in the near or identity class
        assert_eq!(classify_component(t, &unit(t, 1)).unwrap(), 0);
        assert_eq!(classify_component(t, &unit(t, 2)).unwrap(), 1);
        let a = AdeType::a(4);
        for k in 1..=4 {
            assert_eq!(classify_component(a, &unit(a, k - 1)).unwrap(), k);
        }
        // roots themselves are in the identity class
        let row: Vec<BigInt> = a.cartan().row(1).to_vec();
        assert_eq!(classify_component(a, &row).unwrap(), 0);
        assert!(classify_component(a, &unit(AdeType::a(2), 0)).is_err());
    }

    #[test]
    fn orbit_representatives() {
        assert_eq!(canonical_class(AdeType::a(5), 5), 1);
        assert_eq!(canonical_class(AdeType::a(5), 4), 2);
        assert_eq!(canonical_class(AdeType::d(4), 3), 1);
        assert_eq!(canonical_class(AdeType::d(6), 3), 2);
        assert_eq!(canonical_class(AdeType::d(6), 1), 1);
        assert_eq!(canonical_class(AdeType::e(6), 2), 1);
        assert_eq!(canonical_class(AdeType::e(7), 1), 1);
    }
}
