//! Mordell–Weil lattice of a rational elliptic surface with trivial lattice
//! `T ⊂ E8`.
//!
//! `E(K) ≅ E8 / T`. Writing `L = T^⊥` for the narrow lattice, pairing with
//! `L` identifies `E8 / T'` with `L∨` (where `T'` is the primitive closure
//! of `T`), so an element is a pair `(y, t)`: `y ∈ ℤʳ` in the dual basis of
//! `L` and `t ∈ T'/T`. The height of `(y, t)` is `yᵀ G_L⁻¹ y`, and its
//! fibre components are read off a lift `x ∈ E8` from the pairings of `x`
//! with the simple roots of `T`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{smith_normal_form, to_int_vec, to_rat_vec, IntMatrix, Rat};
use crate::kodaira::{canonical_class, class_contribution, classify_component, KodairaError};
use crate::lattice::{orthogonal_complement, saturate, DiscGroup, GramLattice, Sublattice};
use crate::rootsys::{AdeType, RootEmbedding, E8_RANK};

/// `χ` of a rational elliptic surface.
pub const CHI: i64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MwError {
    #[error("lift of {0:?} is not an E8 vector projecting onto it")]
    LiftFailure(Vec<BigInt>),
    #[error("torsion multipliers {got:?} do not match invariant factors {expected:?}")]
    BadTorsion { got: Vec<u64>, expected: Vec<BigInt> },
    #[error(transparent)]
    Kodaira(#[from] KodairaError),
}

#[derive(Debug, Clone)]
pub struct MWStructure {
    pub embedding: RootEmbedding,
    /// Basis of `L = T^⊥` in E8 coordinates, one vector per row.
    pub narrow_basis: IntMatrix,
    pub narrow: GramLattice,
    pub free_dual: GramLattice,
    /// `T'/T`, generators in E8 coordinates.
    pub torsion: DiscGroup,
    pub chi: i64,
    /// `8 × r` matrix sending dual coordinates `y` to some `x ∈ E8` with
    /// `x·lᵢ = yᵢ` for every narrow basis vector `lᵢ`.
    pub lift_frame: IntMatrix,
    components: Vec<AdeType>,
    /// `B_T · G8`: row `i` pairs an E8 vector with simple root `i` of `T`.
    t_pairing: IntMatrix,
    /// `B_L · G8`.
    narrow_pairing: IntMatrix,
}

fn e8_gram_matrix() -> IntMatrix {
    AdeType::e(8).cartan()
}

pub fn build_mw(emb: &RootEmbedding) -> MWStructure {
    let g8 = e8_gram_matrix();
    let ambient = GramLattice::from_int(&g8).expect("E8 is positive-definite");
    let t = Sublattice::new(ambient, emb.basis());
    let narrow_sub = orthogonal_complement(&t);
    let narrow = narrow_sub.gram().expect("sublattice of a definite lattice");
    let free_dual = narrow.dual();
    let (_, torsion) = saturate(&t);

    let r = narrow_sub.rank();
    let narrow_pairing = narrow_sub.basis.mul_mat(&g8);
    let lift_frame = if r == 0 {
        IntMatrix::zeros(E8_RANK, 0)
    } else {
        // u·A·v = [I | 0] because L is primitive in the unimodular E8
        let snf = smith_normal_form(&narrow_pairing);
        debug_assert!(snf.diagonal().iter().all(One::is_one));
        let cols: Vec<usize> = (0..r).collect();
        let rows: Vec<usize> = (0..E8_RANK).collect();
        snf.v.select(&rows, &cols).mul_mat(&snf.u)
    };
    MWStructure {
        embedding: emb.clone(),
        narrow_basis: narrow_sub.basis,
        narrow,
        free_dual,
        torsion,
        chi: CHI,
        lift_frame,
        components: emb.spec.types(),
        t_pairing: emb.basis().mul_mat(&g8),
        narrow_pairing,
    }
}

impl MWStructure {
    pub fn rank(&self) -> usize {
        self.free_dual.rank()
    }

    /// Fibre root lattices in the order of the embedding's simple roots.
    pub fn components(&self) -> &[AdeType] {
        &self.components
    }

    /// An E8 vector representing the element `(y, t)`.
    pub fn lift(&self, free_coords: &[BigInt], torsion_part: &[u64]) -> Result<Vec<BigInt>, MwError> {
        self.check_torsion(torsion_part)?;
        let mut x = if self.rank() == 0 {
            vec![BigInt::zero(); E8_RANK]
        } else {
            self.lift_frame.mul_vec(free_coords)
        };
        if !self.torsion.is_trivial() {
            let t = to_int_vec(&self.torsion.combine(torsion_part))
                .ok_or_else(|| MwError::LiftFailure(free_coords.to_vec()))?;
            for (a, b) in x.iter_mut().zip(t) {
                *a += b;
            }
        }
        if self.narrow_pairing.mul_vec(&x) != free_coords {
            return Err(MwError::LiftFailure(free_coords.to_vec()));
        }
        Ok(x)
    }

    fn check_torsion(&self, torsion_part: &[u64]) -> Result<(), MwError> {
        let f = &self.torsion.invariant_factors;
        let ok = torsion_part.len() == f.len()
            && torsion_part.iter().zip(f).all(|(&m, d)| BigInt::from(m) < *d);
        if ok {
            Ok(())
        } else {
            Err(MwError::BadTorsion { got: torsion_part.to_vec(), expected: f.clone() })
        }
    }

    /// Component classes met by the E8 vector `x`, one per fibre.
    pub fn classes_of_lift(&self, x: &[BigInt]) -> Result<Vec<usize>, MwError> {
        let w = self.t_pairing.mul_vec(x);
        let mut out = Vec::with_capacity(self.components.len());
        let mut off = 0;
        for &t in &self.components {
            out.push(classify_component(t, &w[off..off + t.rank()])?);
            off += t.rank();
        }
        Ok(out)
    }

    pub fn element(&self, free_coords: &[BigInt], torsion_part: &[u64]) -> Result<SectionElement, MwError> {
        let per_fiber = component_data(self, free_coords, torsion_part)?;
        let height = self.free_dual.norm(free_coords);
        let mut contr_sum = Rat::zero();
        for (&t, &k) in self.components.iter().zip(&per_fiber) {
            contr_sum += class_contribution(t, k)?;
        }
        let po = (&height + &contr_sum - Rat::from(2 * self.chi)) / Rat::from(2);
        Ok(SectionElement {
            free_coords: free_coords.to_vec(),
            torsion_part: torsion_part.to_vec(),
            height,
            per_fiber,
            contr_sum,
            po,
        })
    }

    /// Every element of height at most `bound`.
    pub fn elements_up_to(&self, bound: &Rat) -> Result<Vec<SectionElement>, MwError> {
        let torsion = self.torsion.element_multipliers();
        let mut out = Vec::new();
        for y in self.free_dual.short_vectors(bound) {
            for t in &torsion {
                out.push(self.element(&y, t)?);
            }
        }
        Ok(out)
    }

    /// Canonical signature of a per-fibre class list.
    pub fn signature(&self, per_fiber: &[usize]) -> Signature {
        let mut sig: Vec<(AdeType, usize)> = self
            .components
            .iter()
            .zip(per_fiber)
            .map(|(&t, &k)| (t, canonical_class(t, k)))
            .collect();
        sig.sort();
        Signature(sig)
    }
}

/// Component classes met by the element `(y, t)`, one per fibre.
pub fn component_data(
    mw: &MWStructure,
    free_coords: &[BigInt],
    torsion_part: &[u64],
) -> Result<Vec<usize>, MwError> {
    let x = mw.lift(free_coords, torsion_part)?;
    mw.classes_of_lift(&x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionElement {
    pub free_coords: Vec<BigInt>,
    pub torsion_part: Vec<u64>,
    pub height: Rat,
    pub per_fiber: Vec<usize>,
    pub contr_sum: Rat,
    /// Intersection number with the zero section.
    pub po: Rat,
}

impl SectionElement {
    pub fn is_zero(&self) -> bool {
        self.free_coords.iter().all(Zero::is_zero) && self.torsion_part.iter().all(|&m| m == 0)
    }

    pub fn is_integral(&self) -> bool {
        self.po.is_zero() && !self.is_zero()
    }
}

/// Fibre classes up to diagram symmetry, as a sorted list of
/// `(fibre lattice, class orbit)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(pub Vec<(AdeType, usize)>);

impl Signature {
    /// Fibres met away from the identity component.
    pub fn touched(&self) -> impl Iterator<Item = (AdeType, usize)> + '_ {
        self.0.iter().copied().filter(|&(_, k)| k != 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionClass {
    pub height: Rat,
    pub signature: Signature,
    pub count: u64,
    pub multiplicity: Option<u64>,
}

/// All integral sections of height ≤ 2 (none exist above), excluding the zero
/// section.
pub fn integral_elements(mw: &MWStructure) -> Result<Vec<SectionElement>, MwError> {
    let bound = Rat::from(2 * mw.chi);
    Ok(mw.elements_up_to(&bound)?.into_iter().filter(SectionElement::is_integral).collect())
}

/// Integral sections grouped by height and signature, highest first.
pub fn enumerate_integral_sections(mw: &MWStructure) -> Result<Vec<SectionClass>, MwError> {
    let mut groups: BTreeMap<(Rat, Signature), u64> = BTreeMap::new();
    for e in integral_elements(mw)? {
        *groups.entry((e.height.clone(), mw.signature(&e.per_fiber))).or_default() += 1;
    }
    Ok(groups
        .into_iter()
        .rev()
        .map(|((height, signature), count)| SectionClass { height, signature, count, multiplicity: None })
        .collect())
}

pub fn height_pairing(mw: &MWStructure, p: &SectionElement, q: &SectionElement) -> Rat {
    mw.free_dual.pairing(&to_rat_vec(&p.free_coords), &to_rat_vec(&q.free_coords))
}
