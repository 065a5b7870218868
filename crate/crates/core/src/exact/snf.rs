//! Smith normal form over the integers, with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// `u · m · v = d` with `u`, `v` unimodular and `d` diagonal, each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries, including trailing zeros, `min(rows, cols)` of them.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl Work {
    // row_dst += k * row_src, mirrored on u
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            for j in 0..m.cols() {
                let t = &m[(src, j)] * k;
                m[(dst, j)] += t;
            }
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for i in 0..m.rows() {
                let t = &m[(i, src)] * k;
                m[(i, dst)] += t;
            }
        }
    }

    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        self.u.swap_rows(x, y);
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        self.v.swap_cols(x, y);
    }

    fn negate_row(&mut self, r: usize) {
        for m in [&mut self.a, &mut self.u] {
            for x in m.row_mut(r) {
                *x = -&*x;
            }
        }
    }

    /// Position of the smallest nonzero entry (by absolute value) in the
    /// trailing block starting at `t`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work { a: m.clone(), u: IntMatrix::identity(rows), v: IntMatrix::identity(cols) };

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = w.min_pivot(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in t + 1..rows {
                if w.a[(i, t)].is_zero() {
                    continue;
                }
                let q = w.a[(i, t)].div_floor(&w.a[(t, t)]);
                w.add_row(i, t, &-q);
                if !w.a[(i, t)].is_zero() {
                    w.swap_rows(t, i);
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..cols {
                if w.a[(t, j)].is_zero() {
                    continue;
                }
                let q = w.a[(t, j)].div_floor(&w.a[(t, t)]);
                w.add_col(j, t, &-q);
                if !w.a[(t, j)].is_zero() {
                    w.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let p = w.a[(t, t)].clone();
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !w.a[(i, j)].is_multiple_of(&p));
            match bad {
                Some((i, _)) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[(t, t)].is_negative() {
            w.negate_row(t);
        }
    }

    SmithForm { u: w.u, d: w.a, v: w.v }
}

/// Basis (as rows) of the integer kernel `{x ∈ ℤⁿ : m·x = 0}`. The basis
/// spans a primitive sublattice of ℤⁿ.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let n = m.cols();
    let rows: Vec<Vec<BigInt>> = (rank..n).map(|j| snf.v.column(j)).collect();
    IntMatrix::from_rows(n, rows)
}

/// Absolute determinant of an integer square matrix via its Smith form.
pub fn abs_det(m: &IntMatrix) -> BigInt {
    assert!(m.is_square());
    smith_normal_form(m).diagonal().iter().product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul_mat(m).mul_mat(&s.v), s.d);
        assert_eq!(abs_det(&s.u), BigInt::one());
        assert_eq!(abs_det(&s.v), BigInt::one());
        let diag = s.diagonal();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            } else {
                assert!(w[0].is_zero() || !w[0].is_negative());
            }
        }
        s
    }

    fn diag(s: &SmithForm) -> Vec<i64> {
        s.diagonal().iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn identity() {
        let s = check(&IntMatrix::identity(2));
        assert_eq!(diag(&s), vec![1, 1]);
    }

    #[test]
    fn twice_identity() {
        let s = check(&IntMatrix::from_i64(2, 2, &[2, 0, 0, 2]));
        assert_eq!(diag(&s), vec![2, 2]);
    }

    #[test]
    fn a2_cartan() {
        let s = check(&IntMatrix::from_i64(2, 2, &[2, 1, 1, 2]));
        assert_eq!(diag(&s), vec![1, 3]);
    }

    #[test]
    fn rectangular_and_kernel() {
        let m = IntMatrix::from_i64(2, 4, &[2, 4, 6, 8, 1, 3, 5, 7]);
        let s = check(&m);
        assert_eq!(diag(&s), vec![1, 2]);
        let k = integer_kernel(&m);
        assert_eq!(k.rows(), 2);
        for r in k.iter_rows() {
            assert!(m.mul_vec(r).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn zero_matrix() {
        let s = check(&IntMatrix::zeros(2, 3));
        assert_eq!(s.rank(), 0);
        assert_eq!(integer_kernel(&IntMatrix::zeros(2, 3)).rows(), 3);
    }
}
