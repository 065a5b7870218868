//! ADE root lattices, the E8 root system, and embeddings of root lattices
//! into E8.
//!
//! Simple roots of every ADE type are numbered along the longest path of the
//! Dynkin diagram first, with the branch node (if any) last:
//!
//! * `A_n`: path `0 - 1 - … - (n-1)`.
//! * `D_n`: path `0 - … - (n-2)`, node `n-1` attached to `n-3`.
//! * `E_n`: path `0 - … - (n-2)`, node `n-1` attached to `2`.
//!
//! E8 vectors are written in the simple-root coordinates of E8 under this
//! numbering, so the E8 Gram matrix is its Cartan matrix.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::exact::{IntMatrix, Rat};
use crate::lattice::GramLattice;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootSysError {
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: Family, rank: usize },
    #[error("no embedding of {0} into E8")]
    NoEmbedding(String),
    #[error("malformed lattice spec at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    E,
    D,
    A,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::A => "A",
            Family::D => "D",
            Family::E => "E",
        })
    }
}

/// An irreducible ADE root lattice type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdeType {
    family: Family,
    rank: usize,
}

impl AdeType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootSysError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
        };
        if ok {
            Ok(AdeType { family, rank })
        } else {
            Err(RootSysError::InvalidRank { family, rank })
        }
    }

    pub fn a(rank: usize) -> Self {
        Self::new(Family::A, rank).expect("valid A rank")
    }

    pub fn d(rank: usize) -> Self {
        Self::new(Family::D, rank).expect("valid D rank")
    }

    pub fn e(rank: usize) -> Self {
        Self::new(Family::E, rank).expect("valid E rank")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Edges of the Dynkin diagram in the crate's node numbering.
    pub fn dynkin_edges(&self) -> Vec<(usize, usize)> {
        let n = self.rank;
        match self.family {
            Family::A => (0..n - 1).map(|i| (i, i + 1)).collect(),
            Family::D => {
                let mut e: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
                e.push((n - 3, n - 1));
                e
            }
            Family::E => {
                let mut e: Vec<_> = (0..n - 2).map(|i| (i, i + 1)).collect();
                e.push((2, n - 1));
                e
            }
        }
    }

    pub fn cartan(&self) -> IntMatrix {
        let n = self.rank;
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 2;
        }
        for (i, j) in self.dynkin_edges() {
            m[i * n + j] = -1;
            m[j * n + i] = -1;
        }
        IntMatrix::from_i64(n, n, &m)
    }

    pub fn cartan_gram(&self) -> GramLattice {
        GramLattice::from_int(&self.cartan()).expect("Cartan matrices are positive-definite")
    }

    /// Number of roots, from the closed formulas.
    pub fn root_count(&self) -> usize {
        let n = self.rank;
        match (self.family, n) {
            (Family::A, _) => n * (n + 1),
            (Family::D, _) => 2 * n * (n - 1),
            (Family::E, 6) => 72,
            (Family::E, 7) => 126,
            (Family::E, _) => 240,
        }
    }

    /// Nodes whose fundamental weights represent the nonzero classes of the
    /// discriminant group, i.e. the simple components of multiplicity one in
    /// the corresponding fibre. Class `k ≥ 1` is `component_nodes()[k-1]`.
    pub fn component_nodes(&self) -> Vec<usize> {
        let n = self.rank;
        match (self.family, n) {
            (Family::A, _) => (0..n).collect(),
            // near component, then the two far ones
            (Family::D, _) => vec![0, n - 2, n - 1],
            (Family::E, 6) => vec![0, n - 2],
            (Family::E, 7) => vec![n - 2],
            (Family::E, _) => vec![],
        }
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

impl PartialOrd for AdeType {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Descending rank, then E before D before A.
impl Ord for AdeType {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.rank.cmp(&self.rank).then(self.family.cmp(&other.family))
    }
}

/// A direct sum of ADE lattices with multiplicities, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeSpec {
    components: Vec<(AdeType, usize)>,
}

impl LatticeSpec {
    pub fn new(parts: impl IntoIterator<Item = (AdeType, usize)>) -> Self {
        let mut components: Vec<(AdeType, usize)> = Vec::new();
        for (t, m) in parts {
            if m == 0 {
                continue;
            }
            match components.iter_mut().find(|(u, _)| *u == t) {
                Some((_, c)) => *c += m,
                None => components.push((t, m)),
            }
        }
        components.sort();
        LatticeSpec { components }
    }

    pub fn from_types(types: impl IntoIterator<Item = AdeType>) -> Self {
        Self::new(types.into_iter().map(|t| (t, 1)))
    }

    pub fn empty() -> Self {
        LatticeSpec::default()
    }

    pub fn components(&self) -> &[(AdeType, usize)] {
        &self.components
    }

    /// Each summand repeated by its multiplicity, in canonical order.
    pub fn types(&self) -> Vec<AdeType> {
        self.components.iter().flat_map(|&(t, m)| std::iter::repeat_n(t, m)).collect()
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|(t, m)| t.rank() * m).sum()
    }

    pub fn cartan(&self) -> IntMatrix {
        let blocks: Vec<IntMatrix> = self.types().iter().map(AdeType::cartan).collect();
        IntMatrix::block_diagonal(&blocks)
    }

    pub fn gram(&self) -> GramLattice {
        GramLattice::from_int(&self.cartan()).expect("positive-definite")
    }
}

/// Number of roots of the direct sum; additive over summands.
pub fn count_roots(spec: &LatticeSpec) -> usize {
    spec.components.iter().map(|(t, m)| t.root_count() * m).sum()
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("0");
        }
        for (i, (t, m)) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{t}")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for LatticeSpec {
    type Err = RootSysError;

    /// Grammar: `term ('+' term)*`, `term = [ADE] rank ('^' mult)?`;
    /// whitespace is ignored and `0` denotes the empty sum.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<(usize, char)> =
            s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let err = |position: usize, message: &str| RootSysError::Parse {
            position,
            message: message.to_string(),
        };
        if chars.is_empty() {
            return Err(err(0, "empty lattice spec"));
        }
        if chars.len() == 1 && chars[0].1 == '0' {
            return Ok(LatticeSpec::empty());
        }
        let end = s.len();
        let mut pos = 0;
        let number = |pos: &mut usize| -> Result<usize, RootSysError> {
            let start = *pos;
            let mut v: usize = 0;
            while let Some(&(_, c)) = chars.get(*pos) {
                let Some(d) = c.to_digit(10) else { break };
                v = v.checked_mul(10).and_then(|v| v.checked_add(d as usize)).ok_or_else(|| {
                    err(chars[start].0, "number too large")
                })?;
                *pos += 1;
            }
            if *pos == start {
                let at = chars.get(start).map_or(end, |c| c.0);
                return Err(err(at, "expected a number"));
            }
            Ok(v)
        };
        let mut parts = Vec::new();
        loop {
            let Some(&(at, c)) = chars.get(pos) else {
                return Err(err(end, "expected a term"));
            };
            let family = match c {
                'A' => Family::A,
                'D' => Family::D,
                'E' => Family::E,
                _ => return Err(err(at, "expected one of A, D, E")),
            };
            pos += 1;
            let rank_at = chars.get(pos).map_or(end, |c| c.0);
            let rank = number(&mut pos)?;
            let t = AdeType::new(family, rank).map_err(|e| err(rank_at, &e.to_string()))?;
            let mut mult = 1;
            if let Some(&(_, '^')) = chars.get(pos) {
                pos += 1;
                let mult_at = chars.get(pos).map_or(end, |c| c.0);
                mult = number(&mut pos)?;
                if mult == 0 {
                    return Err(err(mult_at, "multiplicity must be positive"));
                }
            }
            parts.push((t, mult));
            match chars.get(pos) {
                None => break,
                Some(&(_, '+')) => pos += 1,
                Some(&(at, _)) => return Err(err(at, "expected '+' or end of input")),
            }
        }
        Ok(LatticeSpec::new(parts))
    }
}

pub const E8_RANK: usize = 8;

pub type E8Vector = [i64; E8_RANK];

/// Gram matrix of E8 in its simple-root basis.
pub fn e8_gram() -> &'static [[i64; E8_RANK]; E8_RANK] {
    static GRAM: OnceLock<[[i64; E8_RANK]; E8_RANK]> = OnceLock::new();
    GRAM.get_or_init(|| {
        let c = AdeType::e(8).cartan();
        let mut g = [[0i64; E8_RANK]; E8_RANK];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = i64::try_from(&c[(i, j)]).expect("small");
            }
        }
        g
    })
}

pub fn e8_pairing(x: &E8Vector, y: &E8Vector) -> i64 {
    let g = e8_gram();
    let mut s = 0;
    for i in 0..E8_RANK {
        if x[i] == 0 {
            continue;
        }
        for j in 0..E8_RANK {
            s += x[i] * g[i][j] * y[j];
        }
    }
    s
}

/// The 240 roots of E8, lexicographically ordered.
pub fn e8_root_system() -> &'static [E8Vector] {
    static ROOTS: OnceLock<Vec<E8Vector>> = OnceLock::new();
    ROOTS.get_or_init(|| {
        AdeType::e(8)
            .cartan_gram()
            .vectors_of_norm(&Rat::from(2))
            .into_iter()
            .map(|v| {
                let mut r = [0i64; E8_RANK];
                for (dst, x) in r.iter_mut().zip(&v) {
                    *dst = i64::try_from(x).expect("small coordinates");
                }
                r
            })
            .collect()
    })
}

fn e8_root_pairings() -> &'static Vec<Vec<i8>> {
    static TABLE: OnceLock<Vec<Vec<i8>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let roots = e8_root_system();
        roots
            .iter()
            .map(|x| roots.iter().map(|y| e8_pairing(x, y) as i8).collect())
            .collect()
    })
}

/// Simple roots of a lattice spec sent to E8 roots with matching Cartan
/// pairings; images follow the order of [`LatticeSpec::types`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootEmbedding {
    pub spec: LatticeSpec,
    pub images: Vec<E8Vector>,
}

impl RootEmbedding {
    pub fn basis(&self) -> IntMatrix {
        let data: Vec<i64> = self.images.iter().flat_map(|v| v.iter().copied()).collect();
        IntMatrix::from_i64(self.images.len(), E8_RANK, &data)
    }

    /// Gram matrix of the images.
    pub fn image_gram(&self) -> IntMatrix {
        let n = self.images.len();
        let data: Vec<i64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| e8_pairing(&self.images[i], &self.images[j]))
            .collect();
        IntMatrix::from_i64(n, n, &data)
    }

    pub fn is_valid(&self) -> bool {
        self.image_gram() == self.spec.cartan()
    }
}

/// Backtracking search for embeddings of `spec` into E8, keeping one
/// representative per Weyl-orbit invariant at every depth.
///
/// The invariant of a partial assignment `(v₁, …, v_k)` is the multiset of
/// pairing vectors `(r·v₁, …, r·v_k)` over all 240 roots `r`. It is constant
/// on W(E8)-orbits of ordered tuples, so no orbit is lost by keeping the
/// first tuple seen for each value.
pub fn search_embeddings(spec: &LatticeSpec) -> Vec<RootEmbedding> {
    let roots = e8_root_system();
    let table = e8_root_pairings();
    let cartan = spec.cartan();
    let n = spec.rank();
    if n > E8_RANK {
        return Vec::new();
    }
    let target: Vec<Vec<i8>> = (0..n)
        .map(|i| (0..n).map(|j| i8::try_from(&cartan[(i, j)]).expect("small")).collect())
        .collect();

    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for row in &target {
        let mut seen: HashSet<Vec<Vec<i8>>> = HashSet::new();
        let mut next = Vec::new();
        for partial in &frontier {
            for r in 0..roots.len() {
                if partial.iter().enumerate().any(|(j, &p)| table[r][p] != row[j]) {
                    continue;
                }
                let mut cand = partial.clone();
                cand.push(r);
                let mut profile: Vec<Vec<i8>> = (0..roots.len())
                    .map(|s| cand.iter().map(|&c| table[s][c]).collect())
                    .collect();
                profile.sort_unstable();
                if seen.insert(profile) {
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }
    frontier
        .into_iter()
        .map(|idx| RootEmbedding {
            spec: spec.clone(),
            images: idx.iter().map(|&i| roots[i]).collect(),
        })
        .collect()
}

/// Embeddings of `spec` into E8, one per distinct Mordell–Weil outcome
/// (torsion, narrow-lattice determinant, integral-section rows).
pub fn find_embeddings(spec: &LatticeSpec) -> Result<Vec<RootEmbedding>, RootSysError> {
    let out: Vec<RootEmbedding> =
        crate::multiplicity::embedding_outcomes(spec).into_iter().map(|(e, _)| e).collect();
    if out.is_empty() {
        return Err(RootSysError::NoEmbedding(spec.to_string()));
    }
    Ok(out)
}
