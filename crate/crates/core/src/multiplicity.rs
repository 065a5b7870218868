//! Root graphs of integral sections and their distinguished-root counts.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::exact::{inverse, IntMatrix, Rat};
use crate::kodaira::class_node;
use crate::lattice::GramLattice;
use crate::mwl::{build_mw, enumerate_integral_sections, MWStructure, MwError, SectionClass, Signature};
use crate::rootsys::{count_roots, search_embeddings, AdeType, LatticeSpec, RootEmbedding};

/// The divisor `D(P)` together with the non-identity components of the
/// fibres it meets away from the identity component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootGraph {
    /// Fibres in `R(P)` with the class of the component `P` meets.
    pub fibers: Vec<(AdeType, usize)>,
    /// Block Cartan matrix of the fibre components (minus their
    /// intersection matrix).
    pub quad_form: IntMatrix,
    /// Intersection numbers of `D(P)` with each fibre component.
    pub linear_term: Vec<BigInt>,
}

impl RootGraph {
    pub fn from_fibers(fibers: Vec<(AdeType, usize)>) -> Self {
        let blocks: Vec<IntMatrix> = fibers.iter().map(|(t, _)| t.cartan()).collect();
        let quad_form = IntMatrix::block_diagonal(&blocks);
        let mut linear_term = vec![BigInt::zero(); quad_form.rows()];
        let mut off = 0;
        for &(t, k) in &fibers {
            if let Some(node) = class_node(t, k) {
                linear_term[off + node] = BigInt::from(1);
            }
            off += t.rank();
        }
        RootGraph { fibers, quad_form, linear_term }
    }

    /// Number of vertices, `D(P)` included.
    pub fn vertex_count(&self) -> usize {
        self.linear_term.len() + 1
    }

    /// Intersection matrix of the vertices; vertex 0 is `D(P)`.
    pub fn adjacency(&self) -> IntMatrix {
        let n = self.vertex_count();
        IntMatrix::from_fn(n, n, |i, j| match (i, j) {
            (0, 0) => BigInt::from(-2),
            (0, j) => self.linear_term[j - 1].clone(),
            (i, 0) => self.linear_term[i - 1].clone(),
            (i, j) => -self.quad_form[(i - 1, j - 1)].clone(),
        })
    }
}

/// Root graph of a class; only fibres met away from the identity component
/// are included.
pub fn build_root_graph(cls: &SectionClass) -> RootGraph {
    RootGraph::from_fibers(cls.signature.touched().collect())
}

/// Root graph including every fibre of the signature, met or not.
pub fn build_full_root_graph(sig: &Signature) -> RootGraph {
    RootGraph::from_fibers(sig.0.clone())
}

/// Number of `n ≥ 0` with `nᵀQn = 2c·n`, i.e. `(D(P) + Σ nᵢΘᵢ)² = −2`.
///
/// Completing the square turns this into the ellipsoid
/// `(n − z)ᵀQ(n − z) = zᵀQz` with `z = Q⁻¹c`, which is enumerated exactly.
pub fn count_distinguished_roots(g: &RootGraph) -> u64 {
    if g.linear_term.is_empty() {
        return 1;
    }
    let q = g.quad_form.to_rat();
    let c: Vec<Rat> = g.linear_term.iter().map(Rat::from).collect();
    let z = inverse(&q).expect("Cartan blocks are invertible").mul_vec(&c);
    let radius = q.bilinear(&z, &z);
    let lattice = GramLattice::new(q).expect("Cartan blocks are positive-definite");
    lattice
        .points_near(&z, &radius)
        .into_iter()
        .filter(|(n, v)| *v == radius && n.iter().all(|x| *x >= BigInt::zero()))
        .count() as u64
}

/// Fills in the multiplicity of every class.
pub fn assign_multiplicities(classes: &mut [SectionClass]) {
    for cls in classes {
        cls.multiplicity = Some(count_distinguished_roots(&build_root_graph(cls)));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityCheck {
    pub lhs: u64,
    pub rhs: u64,
    pub ok: bool,
}

/// Checks `Σ count·m = 240 − v(T)`; classes without a multiplicity count as 0.
pub fn verify_identity(mw: &MWStructure, classes: &[SectionClass]) -> IdentityCheck {
    let lhs = classes.iter().map(|c| c.count * c.multiplicity.unwrap_or(0)).sum();
    let rhs = 240 - count_roots(&mw.embedding.spec) as u64;
    IdentityCheck { lhs, rhs, ok: lhs == rhs }
}

/// Integral-section classes with multiplicities.
pub fn classify_sections(mw: &MWStructure) -> Result<Vec<SectionClass>, MwError> {
    let mut classes = enumerate_integral_sections(mw)?;
    assign_multiplicities(&mut classes);
    Ok(classes)
}

/// `(height, m, count)` rows, merging classes with equal height and `m`,
/// ordered by descending height and then descending `m`.
pub fn table_rows(classes: &[SectionClass]) -> Vec<(Rat, u64, u64)> {
    let mut rows: BTreeMap<Reverse<(Rat, u64)>, u64> = BTreeMap::new();
    for c in classes {
        let m = c.multiplicity.expect("multiplicity assigned");
        *rows.entry(Reverse((c.height.clone(), m))).or_default() += c.count;
    }
    rows.into_iter().map(|(Reverse((h, m)), n)| (h, m, n)).collect()
}

/// Observable outcome of an embedding: torsion invariant factors, narrow
/// lattice determinant and the full row list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmbeddingSignature {
    pub torsion: Vec<BigInt>,
    pub narrow_det: Rat,
    pub rows: Vec<(Rat, u64, u64)>,
}

pub fn embedding_signature(emb: &RootEmbedding) -> EmbeddingSignature {
    let mw = build_mw(emb);
    let classes = classify_sections(&mw).expect("valid embeddings have consistent lifts");
    EmbeddingSignature {
        torsion: mw.torsion.invariant_factors.clone(),
        narrow_det: mw.narrow.det(),
        rows: table_rows(&classes),
    }
}

/// Embeddings of `spec` with pairwise distinct signatures, in search order.
pub fn embedding_outcomes(spec: &LatticeSpec) -> Vec<(RootEmbedding, EmbeddingSignature)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for emb in search_embeddings(spec) {
        let sig = embedding_signature(&emb);
        if seen.insert(sig.clone()) {
            out.push((emb, sig));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_linear_rational;
    use crate::rootsys::{e8_root_system, find_embeddings};

    fn graph(parts: &[(AdeType, usize)]) -> RootGraph {
        RootGraph::from_fibers(parts.to_vec())
    }

    /// Plain box search over `0 ≤ nᵢ ≤ bound`.
    fn box_count(g: &RootGraph, bound: i64) -> u64 {
        let k = g.linear_term.len();
        let mut n = vec![0i64; k];
        let mut count = 0;
        loop {
            let nb: Vec<BigInt> = n.iter().map(|&x| BigInt::from(x)).collect();
            let quad = g.quad_form.bilinear(&nb, &nb);
            let lin: BigInt = nb.iter().zip(&g.linear_term).map(|(a, b)| a * b).sum();
            if quad == BigInt::from(2) * lin {
                count += 1;
            }
            let mut i = 0;
            while i < k {
                n[i] += 1;
                if n[i] <= bound {
                    break;
                }
                n[i] = 0;
                i += 1;
            }
            if i == k {
                return count;
            }
        }
    }

    #[test]
    fn worked_d5_counts() {
        let d5 = AdeType::d(5);
        assert_eq!(count_distinguished_roots(&graph(&[])), 1);
        assert_eq!(count_distinguished_roots(&graph(&[(d5, 1)])), 10);
        assert_eq!(count_distinguished_roots(&graph(&[(d5, 2)])), 16);
        assert_eq!(count_distinguished_roots(&graph(&[(d5, 3)])), 16);
    }

    #[test]
    fn agrees_with_box_search() {
        let cases = [
            vec![(AdeType::d(5), 1)],
            vec![(AdeType::a(3), 1), (AdeType::a(1), 1)],
            vec![(AdeType::a(5), 2), (AdeType::a(2), 1)],
            vec![(AdeType::e(6), 1)],
            vec![(AdeType::a(1), 1); 4],
        ];
        for c in cases {
            let g = graph(&c);
            assert_eq!(count_distinguished_roots(&g), box_count(&g, 4), "{c:?}");
        }
    }

    #[test]
    fn adjacency_layout() {
        let g = graph(&[(AdeType::a(2), 2)]);
        let a = g.adjacency();
        assert_eq!(a, IntMatrix::from_i64(3, 3, &[-2, 0, 1, 0, -2, 1, 1, 1, -2]));
    }

    #[test]
    fn multiplicity_counts_roots_in_coset() {
        // m(P) is the number of E8 roots in the coset x + T of a lift x
        let spec: LatticeSpec = "A3+A1^2".parse().unwrap();
        for emb in find_embeddings(&spec).unwrap() {
            let mw = build_mw(&emb);
            let t_cols = emb.basis().to_rat().transpose();
            for e in crate::mwl::integral_elements(&mw).unwrap() {
                let x = mw.lift(&e.free_coords, &e.torsion_part).unwrap();
                let in_coset = |r: &[i64; 8]| {
                    let d: Vec<Rat> = r.iter().zip(&x).map(|(a, b)| Rat::from(*a) - Rat::from(b)).collect();
                    solve_linear_rational(&t_cols, &d).is_some_and(|s| s.iter().all(Rat::is_integer))
                };
                let count = e8_root_system().iter().filter(|r| in_coset(r)).count() as u64;
                let g = RootGraph::from_fibers(mw.signature(&e.per_fiber).touched().collect());
                assert_eq!(count_distinguished_roots(&g), count);
            }
        }
    }

    #[test]
    fn d5_identity() {
        let spec: LatticeSpec = "D5".parse().unwrap();
        let emb = &find_embeddings(&spec).unwrap()[0];
        let mw = build_mw(emb);
        let classes = classify_sections(&mw).unwrap();
        let check = verify_identity(&mw, &classes);
        assert_eq!((check.lhs, check.rhs, check.ok), (200, 200, true));
        let rows = table_rows(&classes);
        assert_eq!(
            rows,
            vec![(Rat::from(2), 1, 12), (Rat::from(1), 10, 6), (crate::exact::rat(3, 4), 16, 8)]
        );
    }
}
