use super::{Rat, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not positive-definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: Rat },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is singular")]
    Singular,
}

/// `g = l · diag(d) · lᵀ` with `l` unit lower-triangular and every `d > 0`.
pub fn ldl_decompose(g: &RatMatrix) -> Result<(RatMatrix, Vec<Rat>), LinalgError> {
    if !g.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let n = g.rows();
    let mut l = RatMatrix::identity(n);
    let mut d: Vec<Rat> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = g[(j, j)].clone();
        for k in 0..j {
            dj -= &l[(j, k)] * &l[(j, k)] * &d[k];
        }
        if !dj.is_positive() {
            return Err(LinalgError::NotPositiveDefinite { index: j, pivot: dj });
        }
        for i in j + 1..n {
            let mut s = g[(i, j)].clone();
            for k in 0..j {
                s -= &l[(i, k)] * &l[(j, k)] * &d[k];
            }
            l[(i, j)] = s / &dj;
        }
        d.push(dj);
    }
    Ok((l, d))
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut RatMatrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let Some(p) = (r..m.rows()).find(|&i| !m[(i, c)].is_zero()) else { continue };
        m.swap_rows(r, p);
        let inv = m[(r, c)].recip().expect("nonzero pivot");
        for x in m.row_mut(r) {
            *x *= &inv;
        }
        for i in 0..m.rows() {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in 0..m.cols() {
                let t = &f * &m[(r, j)];
                m[(i, j)] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Some `x` with `a·x = b`, or `None` if the system is inconsistent. Free
/// variables are set to zero.
pub fn solve_linear_rational(a: &RatMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a.rows(), b.len(), "dimension mismatch");
    let n = a.cols();
    let mut aug = RatMatrix::from_fn(a.rows(), n + 1, |i, j| {
        if j < n {
            a[(i, j)].clone()
        } else {
            b[i].clone()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[(r, n)].clone();
    }
    Some(x)
}

pub fn inverse(a: &RatMatrix) -> Result<RatMatrix, LinalgError> {
    assert!(a.is_square());
    let n = a.rows();
    let mut aug = RatMatrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a[(i, j)].clone()
        } else if j - n == i {
            Rat::one()
        } else {
            Rat::zero()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(LinalgError::Singular);
    }
    Ok(RatMatrix::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
}

pub fn determinant(a: &RatMatrix) -> Rat {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Rat::zero() };
        if p != c {
            m.swap_rows(p, c);
            det = -det;
        }
        let piv = m[(c, c)].clone();
        det *= &piv;
        for i in c + 1..n {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = &m[(i, c)] / &piv;
            for j in c..n {
                let t = &f * &m[(c, j)];
                m[(i, j)] -= t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn reconstruct(l: &RatMatrix, d: &[Rat]) -> RatMatrix {
        let n = l.rows();
        let dl = RatMatrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { Rat::zero() });
        l.mul_mat(&dl).mul_mat(&l.transpose())
    }

    #[test]
    fn ldl_single() {
        let g = RatMatrix::from_i64(1, 1, &[2]);
        let (l, d) = ldl_decompose(&g).unwrap();
        assert_eq!(l, RatMatrix::identity(1));
        assert_eq!(d, vec![rat(2, 1)]);
    }

    #[test]
    fn ldl_a2() {
        let g = RatMatrix::from_i64(2, 2, &[2, -1, -1, 2]);
        let (l, d) = ldl_decompose(&g).unwrap();
        assert_eq!(d, vec![rat(2, 1), rat(3, 2)]);
        assert_eq!(reconstruct(&l, &d), g);
    }

    #[test]
    fn ldl_rejects_non_pd() {
        let g = RatMatrix::from_i64(1, 1, &[0]);
        assert!(matches!(ldl_decompose(&g), Err(LinalgError::NotPositiveDefinite { .. })));
        let g = RatMatrix::from_i64(2, 2, &[1, 2, 2, 1]);
        assert!(matches!(ldl_decompose(&g), Err(LinalgError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn solve_examples() {
        let b = vec![rat(3, 1), rat(-2, 7)];
        assert_eq!(solve_linear_rational(&RatMatrix::identity(2), &b), Some(b.clone()));
        let a = RatMatrix::from_i64(2, 2, &[2, 1, 1, 2]);
        assert_eq!(
            solve_linear_rational(&a, &[rat(1, 1), rat(1, 1)]),
            Some(vec![rat(1, 3), rat(1, 3)])
        );
        let a = RatMatrix::from_i64(2, 2, &[1, 1, 2, 2]);
        assert_eq!(solve_linear_rational(&a, &[rat(1, 1), rat(3, 1)]), None);
    }

    #[test]
    fn inverse_and_det() {
        let a = RatMatrix::from_i64(2, 2, &[2, -1, -1, 2]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, RatMatrix::from_fn(2, 2, |i, j| if i == j { rat(2, 3) } else { rat(1, 3) }));
        assert_eq!(determinant(&a), rat(3, 1));
        assert!(inverse(&RatMatrix::from_i64(2, 2, &[1, 2, 2, 4])).is_err());
    }
}
