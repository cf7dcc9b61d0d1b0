//! Sparse multivariate polynomials over the integers.
//!
//! Terms are stored as (coefficient, exponent vector) pairs in strict
//! descending lexicographic order of the exponent vectors, with no zero
//! coefficients and no duplicate exponent vectors. All operations return
//! values in this canonical form.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Per-variable exponent. Kept below `2^31` so weighted degree sums fit
/// comfortably in an `i64`.
pub type Exp = u32;

const EXP_LIMIT: u64 = 1 << 31;

/// Sparse multivariate polynomial over arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: Vec<(BigInt, Vec<Exp>)>,
}

impl MultiPoly {
    pub fn zero(vars: Vec<String>) -> Self {
        MultiPoly { vars, terms: Vec::new() }
    }

    pub fn constant(vars: Vec<String>, c: BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(vars);
        }
        let n = vars.len();
        MultiPoly { vars, terms: vec![(c, vec![0; n])] }
    }

    pub fn one(vars: Vec<String>) -> Self {
        Self::constant(vars, BigInt::one())
    }

    /// The monomial `x_idx`.
    pub fn var(vars: Vec<String>, idx: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        MultiPoly { vars, terms: vec![(BigInt::one(), exps)] }
    }

    /// Build from raw terms: sorts, merges duplicates, drops zeros.
    pub fn from_terms(vars: Vec<String>, mut raw: Vec<(BigInt, Vec<Exp>)>) -> Self {
        for (_, e) in &raw {
            assert_eq!(e.len(), vars.len(), "exponent vector length mismatch");
        }
        raw.sort_by(|a, b| b.1.cmp(&a.1));
        let mut terms: Vec<(BigInt, Vec<Exp>)> = Vec::with_capacity(raw.len());
        for (c, e) in raw {
            match terms.last_mut() {
                Some(last) if last.1 == e => last.0 += c,
                _ => terms.push((c, e)),
            }
        }
        terms.retain(|(c, _)| !c.is_zero());
        let p = MultiPoly { vars, terms };
        p.debug_check();
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> &[(BigInt, Vec<Exp>)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.iter().all(|&e| e == 0)
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || (self.terms.len() == 1 && self.terms[0].1.iter().all(|&e| e == 0))
    }

    /// Leading term under the canonical order.
    pub fn leading_term(&self) -> Option<&(BigInt, Vec<Exp>)> {
        self.terms.first()
    }

    /// Partial degree in one variable (0 for the zero polynomial).
    pub fn degree(&self, var: usize) -> Exp {
        self.terms.iter().map(|(_, e)| e[var]).max().unwrap_or(0)
    }

    /// Minimum exponent of `var` across all terms.
    pub fn min_degree(&self, var: usize) -> Exp {
        self.terms.iter().map(|(_, e)| e[var]).min().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().map(|&x| x as u64).sum::<u64>())
            .max()
            .unwrap_or(0)
    }

    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        {
            for w in self.terms.windows(2) {
                debug_assert!(w[0].1 > w[1].1, "terms out of canonical order");
            }
            debug_assert!(self.terms.iter().all(|(c, _)| !c.is_zero()), "zero coefficient kept");
        }
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "operands over different variable lists");
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(c, e)| (-c, e.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_ring(other);
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].1.cmp(&other.terms[j].1) {
                Ordering::Greater => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].0 + &other.terms[j].0;
                    if !c.is_zero() {
                        terms.push((c, self.terms[i].1.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&other.terms[j..]);
        let p = MultiPoly { vars: self.vars.clone(), terms };
        p.debug_check();
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiply by a single term.
    pub fn mul_term(&self, coeff: &BigInt, exps: &[Exp]) -> Self {
        if coeff.is_zero() {
            return Self::zero(self.vars.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(c, e)| (c * coeff, add_exps(e, exps)))
            .collect();
        let p = MultiPoly { vars: self.vars.clone(), terms };
        p.debug_check();
        p
    }

    pub fn mul_scalar(&self, coeff: &BigInt) -> Self {
        self.mul_term(coeff, &vec![0; self.nvars()])
    }

    /// Sparse product via a heap merge of per-term streams. An m-term by
    /// n-term product performs exactly m*n coefficient multiplications.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_ring(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.vars.clone());
        }
        // stream i walks other.terms; all streams are ordered descending
        struct Entry {
            exps: Vec<Exp>,
            i: usize,
            j: usize,
        }
        impl PartialEq for Entry {
            fn eq(&self, o: &Self) -> bool {
                self.exps == o.exps
            }
        }
        impl Eq for Entry {}
        impl PartialOrd for Entry {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Entry {
            fn cmp(&self, o: &Self) -> Ordering {
                self.exps.cmp(&o.exps)
            }
        }

        let (a, b) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut heap = BinaryHeap::with_capacity(a.terms.len());
        for (i, (_, ea)) in a.terms.iter().enumerate() {
            heap.push(Entry { exps: add_exps(ea, &b.terms[0].1), i, j: 0 });
        }
        let mut terms: Vec<(BigInt, Vec<Exp>)> = Vec::new();
        while let Some(top) = heap.pop() {
            let Entry { exps, i, j } = top;
            let c = &a.terms[i].0 * &b.terms[j].0;
            match terms.last_mut() {
                Some(last) if last.1 == exps => last.0 += c,
                _ => {
                    if let Some(last) = terms.last() {
                        if last.0.is_zero() {
                            terms.pop();
                        }
                    }
                    terms.push((c, exps));
                }
            }
            if j + 1 < b.terms.len() {
                heap.push(Entry { exps: add_exps(&a.terms[i].1, &b.terms[j + 1].1), i, j: j + 1 });
            }
        }
        if let Some(last) = terms.last() {
            if last.0.is_zero() {
                terms.pop();
            }
        }
        let p = MultiPoly { vars: self.vars.clone(), terms };
        p.debug_check();
        p
    }

    /// Exact division by repeated leading-term elimination. Returns `None`
    /// when `self` is not a polynomial multiple of `den`.
    pub fn exact_div(&self, den: &Self) -> Option<Self> {
        self.check_same_ring(den);
        assert!(!den.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero(self.vars.clone()));
        }
        let (dc, de) = (&den.terms[0].0, &den.terms[0].1);
        let mut rem = self.clone();
        let mut quo: Vec<(BigInt, Vec<Exp>)> = Vec::new();
        while !rem.is_zero() {
            let (rc, re) = &rem.terms[0];
            let mut qe = Vec::with_capacity(re.len());
            for (a, b) in re.iter().zip(de.iter()) {
                if a < b {
                    return None;
                }
                qe.push(a - b);
            }
            let (qc, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            rem = rem.sub(&den.mul_term(&qc, &qe));
            quo.push((qc, qe));
        }
        Some(Self::from_terms(self.vars.clone(), quo))
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[var] > 0)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[var] -= 1;
                (c * BigInt::from(e[var]), e2)
            })
            .collect();
        let p = MultiPoly { vars: self.vars.clone(), terms };
        p.debug_check();
        p
    }

    /// Coefficient of the highest power of `main`, as a polynomial over the
    /// same variable list with the `main` exponent zeroed.
    pub fn leading_coefficient_wrt(&self, main: usize) -> Self {
        assert!(!self.is_zero(), "leading coefficient of zero polynomial");
        let d = self.degree(main);
        let terms = self
            .terms
            .iter()
            .filter(|(_, e)| e[main] == d)
            .map(|(c, e)| {
                let mut e2 = e.clone();
                e2[main] = 0;
                (c.clone(), e2)
            })
            .collect();
        Self::from_terms(self.vars.clone(), terms)
    }

    /// x-coefficient decomposition: pairs `(k, coeff_k)` with
    /// `self = sum coeff_k * main^k`, highest degree first. The coefficient
    /// polynomials have the `main` exponent zeroed.
    pub fn x_coefficients(&self, main: usize) -> Vec<(Exp, MultiPoly)> {
        type Bucket = (Exp, Vec<(BigInt, Vec<Exp>)>);
        let mut out: Vec<Bucket> = Vec::new();
        for (c, e) in &self.terms {
            let k = e[main];
            let mut e2 = e.clone();
            e2[main] = 0;
            match out.iter_mut().find(|(d, _)| *d == k) {
                Some((_, v)) => v.push((c.clone(), e2)),
                None => out.push((k, vec![(c.clone(), e2)])),
            }
        }
        out.sort_by_key(|c| std::cmp::Reverse(c.0));
        out.into_iter()
            .map(|(k, v)| (k, Self::from_terms(self.vars.clone(), v)))
            .collect()
    }

    /// Split off the integer content and the sign: returns
    /// `(unit, content, primitive)` with `self = unit * content * primitive`,
    /// `content > 0` and `primitive` having a positive leading coefficient.
    pub fn integer_content_and_sign(&self) -> (i8, BigInt, MultiPoly) {
        assert!(!self.is_zero(), "content of zero polynomial");
        let mut content = BigInt::zero();
        for (c, _) in &self.terms {
            content = content.gcd(c);
            if content.is_one() {
                break;
            }
        }
        let unit: i8 = if self.terms[0].0.is_negative() { -1 } else { 1 };
        let scale = if unit < 0 { -&content } else { content.clone() };
        let terms = self
            .terms
            .iter()
            .map(|(c, e)| (c / &scale, e.clone()))
            .collect();
        let p = MultiPoly { vars: self.vars.clone(), terms };
        p.debug_check();
        (unit, content, p)
    }

    /// Substitute `x_i <- scale_i * x_i` for every non-main variable.
    pub fn dilate(&self, s: &DilationScales) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, e)| (c * s.coefficient_factor(e), e.clone()))
            .collect();
        let p = MultiPoly { vars: self.vars.clone(), terms };
        p.debug_check();
        p
    }

    /// Evaluate one variable at an integer point.
    pub fn eval_var(&self, var: usize, z: &BigInt) -> Self {
        let mut raw = Vec::with_capacity(self.terms.len());
        for (c, e) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[var];
            e2[var] = 0;
            raw.push((c * z.pow(k), e2));
        }
        Self::from_terms(self.vars.clone(), raw)
    }

    /// Reorder variables according to `order` (new index i holds old
    /// variable `order[i]`).
    pub fn reorder_vars(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.nvars());
        let vars = order.iter().map(|&i| self.vars[i].clone()).collect();
        let raw = self
            .terms
            .iter()
            .map(|(c, e)| (c.clone(), order.iter().map(|&i| e[i]).collect()))
            .collect();
        Self::from_terms(vars, raw)
    }

    /// Re-express over `target` variables (a superset, any order). Fails if
    /// `self` uses a variable not present in `target`.
    pub fn align_vars(&self, target: &[String]) -> Option<Self> {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v))
            .collect();
        let mut raw = Vec::with_capacity(self.terms.len());
        for (c, e) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    e2[map[i]?] = x;
                }
            }
            raw.push((c.clone(), e2));
        }
        Some(Self::from_terms(target.to_vec(), raw))
    }

    /// Largest absolute coefficient value.
    pub fn height(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(c, _)| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

fn add_exps(a: &[Exp], b: &[Exp]) -> Vec<Exp> {
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| {
            let s = x as u64 + y as u64;
            assert!(s < EXP_LIMIT, "exponent overflow");
            s as Exp
        })
        .collect()
}

/// Per-variable dilation constants drawn from {-2, -1, 1, 2}; the main
/// variable keeps scale 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DilationScales {
    scales: Vec<i32>,
}

impl DilationScales {
    pub fn identity(nvars: usize) -> Self {
        DilationScales { scales: vec![1; nvars] }
    }

    pub fn random(nvars: usize, main: usize, rng: &mut impl Rng) -> Self {
        let choices = [-2, -1, 1, 2];
        let scales = (0..nvars)
            .map(|i| {
                if i == main {
                    1
                } else {
                    choices[rng.random_range(0..choices.len())]
                }
            })
            .collect();
        DilationScales { scales }
    }

    pub fn from_scales(scales: Vec<i32>) -> Self {
        assert!(scales.iter().all(|&c| c != 0), "zero dilation scale");
        DilationScales { scales }
    }

    pub fn scales(&self) -> &[i32] {
        &self.scales
    }

    pub fn is_identity(&self) -> bool {
        self.scales.iter().all(|&c| c == 1)
    }

    /// The factor `prod scale_i^{e_i}` a term coefficient picks up.
    fn coefficient_factor(&self, exps: &[Exp]) -> BigInt {
        let mut f = BigInt::one();
        for (&c, &e) in self.scales.iter().zip(exps.iter()) {
            if c != 1 && e > 0 {
                f *= BigInt::from(c).pow(e);
            }
        }
        f
    }
}

/// Inverse of dilation applied to a single reconstructed term: returns
/// `c / prod scale_i^{e_i}` when the division is exact, `None` otherwise.
pub fn undilate_coefficient(c: &BigInt, exps: &[Exp], s: &DilationScales) -> Option<BigInt> {
    let f = s.coefficient_factor(exps);
    let (q, r) = c.div_rem(&f);
    if r.is_zero() {
        Some(q)
    } else {
        None
    }
}
