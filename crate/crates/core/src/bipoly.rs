//! Bivariate polynomials in (x, t) and the weighted substitution that
//! produces them from a multivariate polynomial.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::multipoly::{Exp, MultiPoly};
use crate::unipoly::UniPoly;

/// Sparse bivariate polynomial; terms sorted strictly descending by
/// (xdeg, tdeg), no duplicates, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiPoly {
    terms: Vec<(Exp, Exp, BigInt)>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly { terms: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            BiPoly { terms: vec![(0, 0, c)] }
        }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn monomial(xdeg: Exp, tdeg: Exp, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            BiPoly { terms: vec![(xdeg, tdeg, c)] }
        }
    }

    pub fn from_terms(raw: Vec<(Exp, Exp, BigInt)>) -> Self {
        let mut map: BTreeMap<(Exp, Exp), BigInt> = BTreeMap::new();
        for (x, t, c) in raw {
            *map.entry((x, t)).or_insert_with(BigInt::zero) += c;
        }
        let terms = map
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|((x, t), c)| (x, t, c))
            .collect();
        BiPoly { terms }
    }

    pub fn terms(&self) -> &[(Exp, Exp, BigInt)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == (0, 0, BigInt::one())
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1 == 0)
    }

    pub fn degree_x(&self) -> Exp {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    pub fn degree_t(&self) -> Exp {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }

    pub fn min_degree_x(&self) -> Exp {
        self.terms.iter().map(|t| t.0).min().unwrap_or(0)
    }

    pub fn height(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(_, _, c)| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn neg(&self) -> Self {
        BiPoly {
            terms: self.terms.iter().map(|(x, t, c)| (*x, *t, -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut raw: Vec<_> = self.terms.clone();
        raw.extend(other.terms.iter().cloned());
        Self::from_terms(raw)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut map: BTreeMap<(Exp, Exp), BigInt> = BTreeMap::new();
        for (xa, ta, ca) in &self.terms {
            for (xb, tb, cb) in &other.terms {
                *map.entry((xa + xb, ta + tb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let terms = map
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|((x, t), c)| (x, t, c))
            .collect();
        BiPoly { terms }
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BiPoly {
            terms: self.terms.iter().map(|(x, t, k)| (*x, *t, k * c)).collect(),
        }
    }

    /// Exact division by leading-term elimination under the (xdeg, tdeg)
    /// order. The iteration count of a genuine division equals the term
    /// count of the quotient, which is at most its dense size; past that
    /// bound the division cannot be exact.
    pub fn exact_div(&self, den: &Self) -> Option<Self> {
        assert!(!den.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (dx, dt, dc) = &den.terms[0];
        let cap = (self.degree_x() as u64 + 1) * (self.degree_t() as u64 + 1);
        let mut rem = self.clone();
        let mut quo: Vec<(Exp, Exp, BigInt)> = Vec::new();
        let mut steps = 0u64;
        while !rem.is_zero() {
            steps += 1;
            if steps > cap {
                return None;
            }
            let (rx, rt, rc) = &rem.terms[0];
            if rx < dx || rt < dt {
                return None;
            }
            let (qc, r) = num_integer::Integer::div_rem(rc, dc);
            if !r.is_zero() {
                return None;
            }
            let q = (rx - dx, rt - dt, qc);
            rem = rem.sub(&den.mul(&BiPoly::monomial(q.0, q.1, q.2.clone())));
            quo.push(q);
        }
        Some(Self::from_terms(quo))
    }

    pub fn derivative_x(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(x, _, _)| *x > 0)
            .map(|(x, t, c)| (x - 1, *t, c * BigInt::from(*x)))
            .collect();
        BiPoly { terms }
    }

    pub fn derivative_t(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, t, _)| *t > 0)
            .map(|(x, t, c)| (*x, t - 1, c * BigInt::from(*t)))
            .collect();
        BiPoly { terms }
    }

    /// x-coefficient decomposition: maps each occurring x-degree to its
    /// coefficient polynomial in t.
    pub fn x_classes(&self) -> BTreeMap<Exp, UniPoly> {
        let mut map: BTreeMap<Exp, Vec<(usize, BigInt)>> = BTreeMap::new();
        for (x, t, c) in &self.terms {
            map.entry(*x).or_default().push((*t as usize, c.clone()));
        }
        map.into_iter()
            .map(|(x, v)| (x, UniPoly::from_sparse(&v)))
            .collect()
    }

    pub fn from_x_classes(classes: &BTreeMap<Exp, UniPoly>) -> Self {
        let mut raw = Vec::new();
        for (&x, p) in classes {
            for (t, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    raw.push((x, t as Exp, c.clone()));
                }
            }
        }
        Self::from_terms(raw)
    }

    /// Leading coefficient with respect to x, a polynomial in t.
    pub fn lc_x(&self) -> UniPoly {
        assert!(!self.is_zero(), "lc of zero polynomial");
        let d = self.degree_x();
        let v: Vec<(usize, BigInt)> = self
            .terms
            .iter()
            .filter(|(x, _, _)| *x == d)
            .map(|(_, t, c)| (*t as usize, c.clone()))
            .collect();
        UniPoly::from_sparse(&v)
    }

    /// Content in t: the gcd in Z[t] of all x-coefficient polynomials,
    /// including the integer content and any common pure t power. Positive
    /// leading coefficient.
    pub fn content_t(&self) -> UniPoly {
        let mut g = UniPoly::zero();
        for (_, p) in self.x_classes() {
            g = g.gcd(&p);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide every x-coefficient polynomial by `c` (must be exact).
    pub fn div_content_t(&self, c: &UniPoly) -> Self {
        let classes = self
            .x_classes()
            .into_iter()
            .map(|(x, p)| {
                let q = p.exact_div(c).expect("content division must be exact");
                (x, q)
            })
            .collect();
        Self::from_x_classes(&classes)
    }

    /// Evaluate at t = alpha, producing a univariate polynomial in x.
    pub fn eval_t(&self, alpha: &BigInt) -> UniPoly {
        let mut coeffs: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (x, t, c) in &self.terms {
            let v = c * alpha.pow(*t);
            *coeffs.entry(*x as usize).or_insert_with(BigInt::zero) += v;
        }
        let v: Vec<(usize, BigInt)> = coeffs.into_iter().collect();
        UniPoly::from_sparse(&v)
    }

    /// Multiply every term by t^k.
    pub fn mul_tpow(&self, k: Exp) -> Self {
        BiPoly {
            terms: self.terms.iter().map(|(x, t, c)| (*x, t + k, c.clone())).collect(),
        }
    }

    /// Multiply by a univariate polynomial in t.
    pub fn mul_tpoly(&self, q: &UniPoly) -> Self {
        let mut raw = Vec::new();
        for (x, t, c) in &self.terms {
            for (k, qc) in q.coeffs().iter().enumerate() {
                if !qc.is_zero() {
                    raw.push((*x, t + k as Exp, c * qc));
                }
            }
        }
        Self::from_terms(raw)
    }

    /// Positive leading coefficient under the canonical order; returns the
    /// sign that was removed.
    pub fn normalize_sign(&self) -> (i8, Self) {
        if self.is_zero() {
            return (1, self.clone());
        }
        if self.terms[0].2.is_negative() {
            (-1, self.neg())
        } else {
            (1, self.clone())
        }
    }

    /// Canonical comparison used to order factor lists.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let da = (self.degree_x(), self.degree_t(), self.num_terms());
        let db = (other.degree_x(), other.degree_t(), other.num_terms());
        da.cmp(&db).then_with(|| self.terms.cmp(&other.terms))
    }
}

/// The exponent assignment x_i -> t^{e_i} for every non-main variable.
/// Base evaluations use all ones; probes raise exactly one coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionWeights {
    main: usize,
    weights: Vec<u32>,
}

impl SubstitutionWeights {
    /// All-ones weights for an n-variable ring with the given main variable.
    pub fn ones(nvars: usize, main: usize) -> Self {
        assert!(main < nvars);
        let mut weights = vec![1; nvars];
        weights[main] = 1;
        SubstitutionWeights { main, weights }
    }

    /// Copy with variable `var`'s weight set to `j`.
    pub fn with(&self, var: usize, j: u32) -> Self {
        assert!(var != self.main && j >= 1);
        let mut w = self.clone();
        w.weights[var] = j;
        w
    }

    pub fn main(&self) -> usize {
        self.main
    }

    pub fn weight(&self, var: usize) -> u32 {
        self.weights[var]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }
}

/// Map each term (c, (a, e_1..e_n)) to (xdeg=a, tdeg=sum w_i*e_i, coeff=c),
/// summing coefficients of colliding (xdeg, tdeg) pairs. Collisions are
/// legal; downstream term-count checks detect the unlucky ones.
pub fn weighted_substitute(p: &MultiPoly, w: &SubstitutionWeights) -> BiPoly {
    assert_eq!(w.weights.len(), p.nvars(), "weight vector length mismatch");
    let main = w.main;
    let mut raw = Vec::with_capacity(p.num_terms());
    for (c, e) in p.terms() {
        let mut tdeg: u64 = 0;
        for (i, &x) in e.iter().enumerate() {
            if i != main {
                tdeg += w.weights[i] as u64 * x as u64;
            }
        }
        assert!(tdeg < (1 << 31), "substituted t-degree overflow");
        raw.push((e[main], tdeg as Exp, c.clone()));
    }
    BiPoly::from_terms(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_bipoly, parse_multipoly};

    #[test]
    fn substitute_linear() {
        // x + x_1 + 1 with weights (1) -> x + t + 1
        let p = parse_multipoly("x+y+1").unwrap();
        let w = SubstitutionWeights::ones(2, 0);
        let img = weighted_substitute(&p, &w);
        assert_eq!(img, parse_bipoly("x+t+1").unwrap());
    }

    #[test]
    fn substitution_is_a_ring_morphism() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        for _ in 0..100 {
            let rand_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
                let raw: Vec<_> = (0..rng.random_range(1..6))
                    .map(|_| {
                        (
                            num_bigint::BigInt::from(rng.random_range(-9i32..=9)),
                            vec![
                                rng.random_range(0..4u32),
                                rng.random_range(0..4),
                                rng.random_range(0..4),
                            ],
                        )
                    })
                    .collect();
                MultiPoly::from_terms(vars.clone(), raw)
            };
            let a = rand_poly(&mut rng);
            let b = rand_poly(&mut rng);
            let w = SubstitutionWeights::ones(3, 0).with(1, 3);
            assert_eq!(
                weighted_substitute(&a.mul(&b), &w),
                weighted_substitute(&a, &w).mul(&weighted_substitute(&b, &w))
            );
        }
    }

    #[test]
    fn collisions_sum_coefficients() {
        // y and z collide at all-ones weights
        let p = parse_multipoly("x+2*y+3*z").unwrap();
        let w = SubstitutionWeights::ones(3, 0);
        assert_eq!(weighted_substitute(&p, &w), parse_bipoly("x+5*t").unwrap());
    }

    #[test]
    fn exact_div_bivariate() {
        let a = parse_bipoly("x^2-t^2").unwrap();
        let b = parse_bipoly("x-t").unwrap();
        assert_eq!(a.exact_div(&b), Some(parse_bipoly("x+t").unwrap()));
        assert_eq!(parse_bipoly("x^2+t").unwrap().exact_div(&b), None);
    }

    #[test]
    fn t_derivative() {
        let f = parse_bipoly("t^5+5*t^3").unwrap();
        assert_eq!(f.derivative_t(), parse_bipoly("5*t^4+15*t^2").unwrap());
        assert!(parse_bipoly("x").unwrap().derivative_t().is_zero());
    }

    #[test]
    fn content_in_t() {
        let f = parse_bipoly("2*t^3*x^2+4*t^2*x+2*t^2").unwrap();
        let c = f.content_t();
        assert_eq!(c, crate::unipoly::UniPoly::from_sparse(&[(2, num_bigint::BigInt::from(2))]));
        let prim = f.div_content_t(&c);
        assert_eq!(prim, parse_bipoly("t*x^2+2*x+1").unwrap());
    }
}
