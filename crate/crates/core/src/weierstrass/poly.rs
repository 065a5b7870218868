use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::exact::Rat;

/// Univariate polynomial in `t` over ℚ, coefficients in ascending degree
/// with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed polynomial at byte {position}: {message}")]
pub struct ParsePolyError {
    pub position: usize,
    pub message: String,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rat::from(c)).collect())
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// `c·tᵏ`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut v = vec![Rat::zero(); k];
        v.push(c);
        Self::new(v)
    }

    pub fn t() -> Self {
        Self::monomial(Rat::one(), 1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with `0` for the zero polynomial.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.leading().recip() {
            Some(inv) => self.scale(&inv),
            None => Poly::zero(),
        }
    }

    pub fn eval(&self, t: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * Rat::from(k as i64)).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(Rat::one()), |acc, _| &acc * self)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().recip().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &rem[k + dd] * &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dj;
            }
            q[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(q), Poly::new(rem))
    }

    /// Exact quotient, if `d` divides `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Largest `k` with `fᵏ | self`, capped at `cap`; `cap` for the zero
    /// polynomial. `f` must be nonconstant.
    pub fn valuation(&self, f: &Poly, cap: usize) -> usize {
        assert!(!f.is_constant(), "valuation needs a nonconstant factor");
        let mut p = self.clone();
        let mut k = 0;
        while k < cap {
            if p.is_zero() {
                return cap;
            }
            match p.div_exact(f) {
                Some(q) => {
                    p = q;
                    k += 1;
                }
                None => break,
            }
        }
        k
    }

    /// Square-free decomposition `p = lc · Π fᵢ^i` (Yun). Returns the monic,
    /// pairwise coprime, square-free `fᵢ` that are nonconstant, with `i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = df.div_exact(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while !b.is_constant() {
            let a = b.gcd(&d);
            if !a.is_constant() {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).expect("gcd divides");
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// `q` with `q² = self`, if one exists over ℚ; the sign is chosen to make
    /// the leading coefficient positive.
    pub fn sqrt_exact(&self) -> Option<Poly> {
        let Some(deg) = self.degree() else { return Some(Poly::zero()) };
        if deg % 2 == 1 {
            return None;
        }
        let k = deg / 2;
        let top = self.leading().sqrt_exact()?;
        let two_top = &top * Rat::from(2);
        let mut q = vec![Rat::zero(); k + 1];
        q[k] = top;
        for i in (0..k).rev() {
            // coefficient of t^(k+i) in q² from the already fixed terms
            let mut acc = Rat::zero();
            for j in i + 1..k {
                let l = k + i - j;
                if l > i && l <= k {
                    acc += &q[j] * &q[l];
                }
            }
            q[i] = (self.coeff(k + i) - acc) / &two_top;
        }
        let q = Poly::new(q);
        (&q * &q == *self).then_some(q)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

/// Highest degree first: `-16*t^12+8*t^11-4*t^9`, `t^2-1/3`, `0`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_negative() { (true, -c.clone()) } else { (false, c.clone()) };
            if neg {
                f.write_str("-")?;
            } else if !first {
                f.write_str("+")?;
            }
            first = false;
            let unit = mag == Rat::one();
            match k {
                0 => write!(f, "{mag}")?,
                _ if unit => {}
                _ => write!(f, "{mag}*")?,
            }
            match k {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl FromStr for Poly {
    type Err = ParsePolyError;

    /// Signed monomials in `t`: `[±] [coef [*]] [t [^k]]`, e.g.
    /// `-16*t^12+8*t^11-11*t^10-4*t^9`, `3/2t^2`, `t`, `-7`. Whitespace is
    /// ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let end = s.len();
        let at = |i: usize| chars.get(i).map_or(end, |c| c.0);
        let err = |position: usize, message: &str| ParsePolyError { position, message: message.to_string() };
        if chars.is_empty() {
            return Err(err(0, "empty polynomial"));
        }
        let digits = |i: &mut usize| -> String {
            let mut out = String::new();
            while let Some(&(_, c)) = chars.get(*i) {
                if !c.is_ascii_digit() {
                    break;
                }
                out.push(c);
                *i += 1;
            }
            out
        };
        let mut acc = Poly::zero();
        let mut i = 0;
        while i < chars.len() {
            let term_start = at(i);
            let mut sign = Rat::one();
            match chars[i].1 {
                '+' => i += 1,
                '-' => {
                    sign = -sign;
                    i += 1;
                }
                _ if i > 0 => return Err(err(at(i), "expected '+' or '-'")),
                _ => {}
            }
            let num = digits(&mut i);
            let mut coeff = None;
            if !num.is_empty() {
                let mut text = num;
                if chars.get(i).map(|c| c.1) == Some('/') {
                    i += 1;
                    let den = digits(&mut i);
                    if den.is_empty() {
                        return Err(err(at(i), "expected a denominator"));
                    }
                    text = format!("{text}/{den}");
                }
                coeff = Some(text.parse::<Rat>().map_err(|e| err(term_start, &e.to_string()))?);
                if chars.get(i).map(|c| c.1) == Some('*') {
                    i += 1;
                    if chars.get(i).map(|c| c.1) != Some('t') {
                        return Err(err(at(i), "expected 't' after '*'"));
                    }
                }
            }
            let mut power = 0usize;
            if chars.get(i).map(|c| c.1) == Some('t') {
                i += 1;
                power = 1;
                if chars.get(i).map(|c| c.1) == Some('^') {
                    i += 1;
                    let e = digits(&mut i);
                    power = e.parse().map_err(|_| err(at(i), "expected an exponent"))?;
                }
            } else if coeff.is_none() {
                return Err(err(at(i), "expected a coefficient or 't'"));
            }
            let c = sign * coeff.unwrap_or_else(Rat::one);
            acc = &acc + &Poly::monomial(c, power);
        }
        Ok(acc)
    }
}
