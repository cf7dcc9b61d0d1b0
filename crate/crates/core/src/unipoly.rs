//! Dense univariate polynomials over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Coefficients stored lowest degree first; the leading coefficient is
/// nonzero unless the polynomial is zero (empty vector).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UniPoly { coeffs: vec![BigInt::one()] }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_sparse(terms: &[(usize, BigInt)]) -> Self {
        let deg = terms.iter().map(|(d, _)| *d).max().unwrap_or(0);
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        for (d, c) in terms {
            coeffs[*d] += c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn monomial(deg: usize, c: BigInt) -> Self {
        Self::from_sparse(&[(deg, c)])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with the convention that constants (including zero) have
    /// degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn is_monomial(&self) -> bool {
        self.num_terms() == 1
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn neg(&self) -> Self {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UniPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Exact division over the integers; `None` if the quotient does not
    /// exist in Z[y].
    pub fn exact_div(&self, den: &Self) -> Option<Self> {
        assert!(!den.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.coeffs.len() < den.coeffs.len() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dlen = den.coeffs.len();
        let dlc = &den.coeffs[dlen - 1];
        let qlen = rem.len() - dlen + 1;
        let mut quo = vec![BigInt::zero(); qlen];
        for k in (0..qlen).rev() {
            let top = std::mem::take(&mut rem[k + dlen - 1]);
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(dlc);
            if !r.is_zero() {
                return None;
            }
            for (i, d) in den.coeffs.iter().enumerate().take(dlen - 1) {
                let v = d * &q;
                rem[k + i] -= v;
            }
            quo[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_coeffs(quo))
    }

    /// Pseudo-remainder: lc(den)^(deg num - deg den + 1) * num mod den.
    pub fn pseudo_rem(&self, den: &Self) -> Self {
        assert!(!den.is_zero());
        if self.coeffs.len() < den.coeffs.len() {
            return self.clone();
        }
        let dlc = den.leading_coeff();
        let mut rem = self.clone();
        while !rem.is_zero() && rem.coeffs.len() >= den.coeffs.len() {
            let shift = rem.coeffs.len() - den.coeffs.len();
            let rlc = rem.leading_coeff();
            let scaled = rem.mul_scalar(&dlc);
            let sub = den.mul(&Self::monomial(shift, rlc));
            rem = scaled.sub(&sub);
        }
        rem
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            if !c.is_zero() {
                g = g.gcd(c);
                if g.is_one() {
                    break;
                }
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient; returns (unit,
    /// content, primitive) with self = unit * content * primitive.
    pub fn normalized(&self) -> (i8, BigInt, UniPoly) {
        assert!(!self.is_zero(), "normalizing zero polynomial");
        let content = self.content();
        let unit: i8 = if self.leading_coeff().is_negative() { -1 } else { 1 };
        let scale = if unit < 0 { -&content } else { content.clone() };
        let prim = UniPoly {
            coeffs: self.coeffs.iter().map(|c| c / &scale).collect(),
        };
        (unit, content, prim)
    }

    pub fn primitive_part(&self) -> UniPoly {
        self.normalized().2
    }

    /// Gcd over Z via the primitive polynomial remainder sequence, with
    /// positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return if other.is_zero() { Self::zero() } else { other.normalized().2.mul_scalar(&other.content()) };
        }
        if other.is_zero() {
            return self.normalized().2.mul_scalar(&self.content());
        }
        let gc = self.content().gcd(&other.content());
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.coeffs.len() < b.coeffs.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.is_constant() {
                return Self::constant(gc);
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { Self::zero() } else { r.primitive_part() };
        }
        let (_, _, prim) = a.normalized();
        prim.mul_scalar(&gc)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Taylor shift: p(y + a).
    pub fn taylor_shift(&self, a: &BigInt) -> Self {
        if self.is_zero() || a.is_zero() {
            return self.clone();
        }
        // synthetic division by (y - a) repeatedly
        let mut work = self.coeffs.clone();
        let n = work.len();
        for i in 0..n - 1 {
            for j in (i..n - 1).rev() {
                let v = &work[j + 1] * a;
                work[j] += v;
            }
        }
        Self::from_coeffs(work)
    }

    pub fn height(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn l2_norm_squared(&self) -> BigInt {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Number of trailing zero coefficients (the power of y dividing self).
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    pub fn shift_down(&self, k: usize) -> Self {
        Self::from_coeffs(self.coeffs[k.min(self.coeffs.len())..].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn mul_and_exact_div() {
        let a = p(&[-1, 0, 1]); // x^2 - 1
        let b = p(&[-1, 1]); // x - 1
        assert_eq!(a.exact_div(&b), Some(p(&[1, 1])));
        assert_eq!(p(&[1, 0, 1]).exact_div(&p(&[1, 1])), None);
        assert_eq!(a, p(&[1, 1]).mul(&b));
    }

    #[test]
    fn gcd_primitive_prs() {
        let a = p(&[-1, 0, 1]); // (x-1)(x+1)
        let b = p(&[1, -2, 1]); // (x-1)^2
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let c = p(&[2, 2]).gcd(&p(&[4, 0, 4]));
        assert_eq!(c, p(&[2])); // contents 2 and 4, coprime primitive parts
    }

    #[test]
    fn taylor_shift_round_trip() {
        let a = p(&[3, -2, 0, 5]);
        let s = a.taylor_shift(&BigInt::from(7));
        assert_eq!(s.taylor_shift(&BigInt::from(-7)), a);
        assert_eq!(s.eval(&BigInt::from(0)), a.eval(&BigInt::from(7)));
    }

    #[test]
    fn pseudo_rem_degree_drops() {
        let a = p(&[1, 2, 3, 4]);
        let b = p(&[5, 6, 7]);
        let r = a.pseudo_rem(&b);
        assert!(r.degree() < b.degree() || r.is_zero());
    }
}
