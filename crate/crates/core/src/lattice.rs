//! Positive-definite lattices given by Gram matrices.
//!
//! Vector enumeration is Fincke–Pohst over the exact LDLᵀ factorisation of
//! the Gram matrix, recursing from the last coordinate. All bounds are exact
//! rational comparisons; results are returned in lexicographic order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::exact::{
    determinant, integer_kernel, inverse, ldl_decompose, smith_normal_form, solve_linear_rational,
    to_rat_vec, IntMatrix, LinalgError, Rat, RatMatrix,
};

/// A lattice `ℤⁿ` equipped with a symmetric positive-definite Gram matrix.
/// Rank 0 (an empty Gram matrix) is allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    gram: RatMatrix,
}

impl GramLattice {
    pub fn new(gram: RatMatrix) -> Result<Self, LinalgError> {
        ldl_decompose(&gram)?;
        Ok(GramLattice { gram })
    }

    pub fn from_int(gram: &IntMatrix) -> Result<Self, LinalgError> {
        Self::new(gram.to_rat())
    }

    pub fn from_i64(n: usize, entries: &[i64]) -> Result<Self, LinalgError> {
        Self::new(RatMatrix::from_i64(n, n, entries))
    }

    pub fn zero() -> Self {
        GramLattice { gram: RatMatrix::zeros(0, 0) }
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn is_integral(&self) -> bool {
        self.gram.is_integral()
    }

    pub fn det(&self) -> Rat {
        if self.rank() == 0 {
            Rat::one()
        } else {
            determinant(&self.gram)
        }
    }

    pub fn norm(&self, x: &[BigInt]) -> Rat {
        let x = to_rat_vec(x);
        self.gram.bilinear(&x, &x)
    }

    pub fn pairing(&self, x: &[Rat], y: &[Rat]) -> Rat {
        self.gram.bilinear(x, y)
    }

    /// Direct sum, blocks in the given order.
    pub fn direct_sum(parts: &[GramLattice]) -> GramLattice {
        let blocks: Vec<RatMatrix> = parts.iter().map(|p| p.gram.clone()).collect();
        GramLattice { gram: RatMatrix::block_diagonal(&blocks) }
    }

    /// Gram matrix of the dual lattice in the dual basis: the inverse Gram.
    pub fn dual(&self) -> GramLattice {
        if self.rank() == 0 {
            return GramLattice::zero();
        }
        GramLattice { gram: inverse(&self.gram).expect("positive-definite Gram is invertible") }
    }

    /// All `x ∈ ℤⁿ` with `xᵀGx ≤ bound`, lexicographically ordered.
    pub fn short_vectors(&self, bound: &Rat) -> Vec<Vec<BigInt>> {
        let center = vec![Rat::zero(); self.rank()];
        let mut out: Vec<Vec<BigInt>> =
            self.points_near(&center, bound).into_iter().map(|(x, _)| x).collect();
        out.sort();
        out
    }

    /// All `x ∈ ℤⁿ` with `xᵀGx = q`, lexicographically ordered. For `q = 0`
    /// this is just the zero vector.
    pub fn vectors_of_norm(&self, q: &Rat) -> Vec<Vec<BigInt>> {
        let center = vec![Rat::zero(); self.rank()];
        let mut out: Vec<Vec<BigInt>> = self
            .points_near(&center, q)
            .into_iter()
            .filter(|(_, n)| n == q)
            .map(|(x, _)| x)
            .collect();
        out.sort();
        out
    }

    /// Every integer point `x` with `(x−c)ᵀG(x−c) ≤ bound`, paired with that
    /// value. Order is unspecified.
    pub fn points_near(&self, center: &[Rat], bound: &Rat) -> Vec<(Vec<BigInt>, Rat)> {
        assert_eq!(center.len(), self.rank());
        if bound.is_negative() {
            return Vec::new();
        }
        if self.rank() == 0 {
            return vec![(Vec::new(), Rat::zero())];
        }
        let (l, d) = ldl_decompose(&self.gram).expect("Gram is positive-definite");
        let mut search = FinckePohst {
            l: &l,
            d: &d,
            center,
            x: vec![BigInt::zero(); self.rank()],
            out: Vec::new(),
        };
        search.descend(self.rank(), bound.clone());
        search.out
    }
}

struct FinckePohst<'a> {
    l: &'a RatMatrix,
    d: &'a [Rat],
    center: &'a [Rat],
    x: Vec<BigInt>,
    out: Vec<(Vec<BigInt>, Rat)>,
}

impl FinckePohst<'_> {
    fn descend(&mut self, level: usize, budget: Rat) {
        if level == 0 {
            let n = self.d.len();
            let total = self.evaluate(n);
            self.out.push((self.x.clone(), total));
            return;
        }
        let i = level - 1;
        let n = self.d.len();
        // coordinate i of Lᵀ(x−c) is (x_i − c_i) + Σ_{j>i} L_ji (x_j − c_j)
        let mut mid = self.center[i].clone();
        for j in i + 1..n {
            let yj = Rat::from(&self.x[j]) - &self.center[j];
            mid -= &self.l[(j, i)] * &yj;
        }
        let ratio = &budget / &self.d[i];
        let radius = isqrt_ceil(&ratio) + 1;
        let lo = mid.floor() - &radius;
        let hi = mid.ceil() + &radius;
        let mut xi = lo;
        while xi <= hi {
            let diff = Rat::from(&xi) - &mid;
            let used = &self.d[i] * &diff * &diff;
            if used <= budget {
                self.x[i] = xi.clone();
                self.descend(i, &budget - &used);
            }
            xi += 1;
        }
        self.x[i] = BigInt::zero();
    }

    fn evaluate(&self, n: usize) -> Rat {
        let mut total = Rat::zero();
        for i in 0..n {
            let mut t = Rat::from(&self.x[i]) - &self.center[i];
            for j in i + 1..n {
                t += &self.l[(j, i)] * (Rat::from(&self.x[j]) - &self.center[j]);
            }
            total += &self.d[i] * &t * &t;
        }
        total
    }
}

/// Smallest integer `k ≥ 0` with `k² ≥ r` (for `r ≥ 0`).
fn isqrt_ceil(r: &Rat) -> BigInt {
    if !r.is_positive() {
        return BigInt::zero();
    }
    let c = r.ceil();
    let mut k = c.sqrt();
    if &k * &k < c {
        k += 1;
    }
    k
}

/// A finite abelian group `⊕ ℤ/dᵢ` with one representative per cyclic
/// factor. The frame of the representatives depends on the producer:
/// [`discriminant_group`] uses dual-basis coordinates, [`saturate`] ambient
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscGroup {
    pub invariant_factors: Vec<BigInt>,
    pub generators: Vec<Vec<Rat>>,
}

impl DiscGroup {
    pub fn trivial() -> Self {
        DiscGroup { invariant_factors: Vec::new(), generators: Vec::new() }
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Every element as a tuple of multipliers `(m₁, …)` with `0 ≤ mᵢ < dᵢ`,
    /// in lexicographic order; the identity comes first.
    pub fn element_multipliers(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for d in &self.invariant_factors {
            let d = d.to_u64().expect("small invariant factor");
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |m| {
                        let mut p = prefix.clone();
                        p.push(m);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// The representative `Σ mᵢ·genᵢ`.
    pub fn combine(&self, multipliers: &[u64]) -> Vec<Rat> {
        let dim = self.generators.first().map_or(0, Vec::len);
        let mut acc = vec![Rat::zero(); dim];
        for (g, &m) in self.generators.iter().zip(multipliers) {
            let m = Rat::from(m as i64);
            for (a, gi) in acc.iter_mut().zip(g) {
                *a += &m * gi;
            }
        }
        acc
    }
}

/// Sublattice of an ambient Gram lattice; each basis row holds ambient
/// coordinates of one generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    pub ambient: GramLattice,
    pub basis: IntMatrix,
}

impl Sublattice {
    pub fn new(ambient: GramLattice, basis: IntMatrix) -> Self {
        assert_eq!(basis.cols(), ambient.rank(), "basis rows must live in the ambient frame");
        Sublattice { ambient, basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// The Gram matrix of the generators.
    pub fn gram(&self) -> Result<GramLattice, LinalgError> {
        let b = self.basis.to_rat();
        GramLattice::new(b.mul_mat(self.ambient.gram()).mul_mat(&b.transpose()))
    }
}

/// Basis of `{x ∈ ambient : x·s = 0 for all s ∈ S}`.
pub fn orthogonal_complement(s: &Sublattice) -> Sublattice {
    let n = s.ambient.rank();
    let pairing = s.basis.to_rat().mul_mat(s.ambient.gram());
    // clear denominators row by row; the kernel is unchanged
    let rows: Vec<Vec<BigInt>> = pairing
        .iter_rows()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            r.iter().map(|x| (x * Rat::from(&l)).to_integer().expect("cleared")).collect()
        })
        .collect();
    let kernel = integer_kernel(&IntMatrix::from_rows(n, rows));
    Sublattice::new(s.ambient.clone(), kernel)
}

/// Primitive closure of `S` and the quotient `S_sat / S`; quotient
/// representatives are ambient coordinates.
pub fn saturate(s: &Sublattice) -> (Sublattice, DiscGroup) {
    let sat = orthogonal_complement(&orthogonal_complement(s));
    debug_assert_eq!(sat.rank(), s.rank());
    let k = s.rank();
    if k == 0 {
        return (sat, DiscGroup::trivial());
    }
    // coefficients of S generators in the saturated basis
    let sat_t = sat.basis.to_rat().transpose();
    let coeffs: Vec<Vec<Rat>> = s
        .basis
        .iter_rows()
        .map(|row| solve_linear_rational(&sat_t, &to_rat_vec(row)).expect("S lies in its closure"))
        .collect();
    let c = RatMatrix::from_rows(k, coeffs).to_int().expect("integral coefficients");
    // S = rowspace(c) inside ℤᵏ ≅ S_sat; with u·c·v = d, y ↦ y·v identifies
    // ℤᵏ/rowspace(c) with ⊕ ℤ/dᵢ, so row i of v⁻¹ represents the i-th factor
    let snf = smith_normal_form(&c);
    let v_inv = inverse(&snf.v.to_rat()).expect("unimodular").to_int().expect("unimodular");
    let sat_basis = sat.basis.to_rat();
    let mut group = DiscGroup::trivial();
    for (i, di) in snf.diagonal().into_iter().enumerate() {
        if di.is_one() {
            continue;
        }
        let row = to_rat_vec(v_inv.row(i));
        group.invariant_factors.push(di);
        group.generators.push(sat_basis.vec_mul(&row));
    }
    (sat, group)
}

/// `L∨/L` for an integral lattice, with generators in dual-basis
/// coordinates (integer vectors `y`; the dual vector is `G⁻¹y` in `L`'s
/// basis).
pub fn discriminant_group(l: &GramLattice) -> DiscGroup {
    let g = l.gram().to_int().expect("discriminant group needs an integral lattice");
    if l.rank() == 0 {
        return DiscGroup::trivial();
    }
    // L∨/L ≅ ℤⁿ/Gℤⁿ; with u·G·v = d, y ↦ u·y maps it onto ⊕ ℤ/dᵢ
    let snf = smith_normal_form(&g);
    let u_inv = inverse(&snf.u.to_rat()).expect("unimodular");
    let mut group = DiscGroup::trivial();
    for (i, di) in snf.diagonal().into_iter().enumerate() {
        if di.is_one() {
            continue;
        }
        group.invariant_factors.push(di);
        group.generators.push(u_inv.column(i));
    }
    group
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{big, rat};

    fn a3() -> GramLattice {
        GramLattice::from_i64(3, &[2, -1, 0, -1, 2, -1, 0, -1, 2]).unwrap()
    }

    #[test]
    fn dual_of_a1() {
        let l = GramLattice::from_i64(1, &[2]).unwrap();
        assert_eq!(l.dual().gram(), &RatMatrix::from_fn(1, 1, |_, _| rat(1, 2)));
    }

    #[test]
    fn dual_of_a3_matches_quadratic_form() {
        // 3/4a² + ab + b² + 1/2ac + bc + 3/4c²
        let expected = RatMatrix::from_rows(
            3,
            vec![
                vec![rat(3, 4), rat(1, 2), rat(1, 4)],
                vec![rat(1, 2), rat(1, 1), rat(1, 2)],
                vec![rat(1, 4), rat(1, 2), rat(3, 4)],
            ],
        );
        assert_eq!(a3().dual().gram(), &expected);
    }

    #[test]
    fn rank_zero() {
        let z = GramLattice::zero();
        assert_eq!(z.dual(), z);
        assert_eq!(z.vectors_of_norm(&Rat::zero()), vec![Vec::<BigInt>::new()]);
        assert!(z.vectors_of_norm(&rat(2, 1)).is_empty());
    }

    #[test]
    fn norm_two_on_a1() {
        let l = GramLattice::from_i64(1, &[2]).unwrap();
        assert_eq!(l.vectors_of_norm(&rat(2, 1)), vec![big(&[-1]), big(&[1])]);
        assert_eq!(l.vectors_of_norm(&Rat::zero()), vec![big(&[0])]);
    }

    #[test]
    fn a3_counts() {
        assert_eq!(a3().vectors_of_norm(&rat(2, 1)).len(), 12);
        let dual = a3().dual();
        assert_eq!(dual.vectors_of_norm(&rat(1, 1)).len(), 6);
        assert_eq!(dual.vectors_of_norm(&rat(3, 4)).len(), 8);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(GramLattice::from_i64(2, &[0, 1, 1, 0]).is_err());
        assert!(GramLattice::from_i64(1, &[0]).is_err());
    }

    #[test]
    fn disc_groups() {
        let a1 = GramLattice::from_i64(1, &[2]).unwrap();
        assert_eq!(discriminant_group(&a1).invariant_factors, big(&[2]));
        assert_eq!(discriminant_group(&a3()).invariant_factors, big(&[4]));
        let d4 = GramLattice::from_i64(4, &[2, -1, 0, 0, -1, 2, -1, -1, 0, -1, 2, 0, 0, -1, 0, 2])
            .unwrap();
        assert_eq!(discriminant_group(&d4).invariant_factors, big(&[2, 2]));
    }

    #[test]
    fn disc_group_generators_have_right_order() {
        let g = discriminant_group(&a3());
        let gen = &g.generators[0];
        // G⁻¹·gen is fractional with denominator 4
        let v = a3().dual().gram().mul_vec(gen);
        let max_den = v.iter().map(|x| x.denom().clone()).max().unwrap();
        assert_eq!(max_den, BigInt::from(4));
    }

    #[test]
    fn saturation_of_index_two() {
        // 2·e1 inside ℤ² (standard form): closure is ℤe1, quotient ℤ/2
        let amb = GramLattice::from_i64(2, &[1, 0, 0, 1]).unwrap();
        let s = Sublattice::new(amb, IntMatrix::from_i64(1, 2, &[2, 0]));
        let (sat, q) = saturate(&s);
        assert_eq!(sat.rank(), 1);
        assert_eq!(q.invariant_factors, big(&[2]));
        let primitive = Sublattice::new(sat.ambient.clone(), sat.basis.clone());
        assert!(saturate(&primitive).1.is_trivial());
    }

    #[test]
    fn complement_is_orthogonal() {
        let amb = a3();
        let s = Sublattice::new(amb.clone(), IntMatrix::from_i64(1, 3, &[1, 0, 0]));
        let c = orthogonal_complement(&s);
        assert_eq!(c.rank(), 2);
        for r in c.basis.iter_rows() {
            assert!(amb.pairing(&to_rat_vec(r), &to_rat_vec(s.basis.row(0))).is_zero());
        }
    }
}
