//! Factorization of univariate polynomials over the integers: modular
//! factorization (distinct-degree plus equal-degree splitting), quadratic
//! Hensel lifting, and subset recombination with early-abort pruning.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;

use crate::unipoly::UniPoly;

/// Dense polynomial over Z/p for a word-sized odd prime p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    p: u64,
    coeffs: Vec<u64>, // low first, trimmed, residues in [0, p)
}

impl ModPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in &mut coeffs {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { p, coeffs }
    }

    pub fn from_unipoly(f: &UniPoly, p: u64) -> Self {
        let pb = BigInt::from(p);
        let coeffs = f
            .coeffs()
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        Self::new(p, coeffs)
    }

    pub fn to_unipoly(&self) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn zero(p: u64) -> Self {
        ModPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        ModPoly { p, coeffs: vec![1] }
    }

    pub fn x(p: u64) -> Self {
        ModPoly { p, coeffs: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lc(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: u64) -> u64 {
        // extended Euclid; p prime, a nonzero mod p
        let (mut t, mut newt): (i128, i128) = (0, 1);
        let (mut r, mut newr): (i128, i128) = (self.p as i128, (a % self.p) as i128);
        while newr != 0 {
            let q = r / newr;
            (t, newt) = (newt, t - q * newt);
            (r, newr) = (newr, r - q * newr);
        }
        assert!(r == 1, "not invertible mod p");
        (t.rem_euclid(self.p as i128)) as u64
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = vec![0u64; n];
        for (i, v) in self.coeffs.iter().enumerate() {
            c[i] = *v;
        }
        for (i, v) in o.coeffs.iter().enumerate() {
            c[i] = (c[i] + v) % self.p;
        }
        Self::new(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = vec![0u64; n];
        for (i, v) in self.coeffs.iter().enumerate() {
            c[i] = *v;
        }
        for (i, v) in o.coeffs.iter().enumerate() {
            c[i] = (c[i] + self.p - v) % self.p;
        }
        Self::new(self.p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let mut c = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + self.mulmod(a, b)) % self.p;
            }
        }
        Self::new(self.p, c)
    }

    pub fn mul_scalar(&self, s: u64) -> Self {
        Self::new(self.p, self.coeffs.iter().map(|&c| self.mulmod(c, s)).collect())
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.mul_scalar(self.inv(self.lc()))
    }

    /// Division with remainder; divisor must be nonzero.
    pub fn divmod(&self, den: &Self) -> (Self, Self) {
        assert!(!den.is_zero());
        if self.coeffs.len() < den.coeffs.len() {
            return (Self::zero(self.p), self.clone());
        }
        let dinv = self.inv(den.lc());
        let mut rem = self.coeffs.clone();
        let dlen = den.coeffs.len();
        let qlen = rem.len() - dlen + 1;
        let mut quo = vec![0u64; qlen];
        for k in (0..qlen).rev() {
            let top = rem[k + dlen - 1];
            if top == 0 {
                continue;
            }
            let q = self.mulmod(top, dinv);
            quo[k] = q;
            for (i, &d) in den.coeffs.iter().enumerate() {
                let sub = self.mulmod(q, d);
                rem[k + i] = (rem[k + i] + self.p - sub) % self.p;
            }
        }
        (Self::new(self.p, quo), Self::new(self.p, rem))
    }

    pub fn rem(&self, den: &Self) -> Self {
        self.divmod(den).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.make_monic()
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero(self.p);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &v)| self.mulmod(v, (i as u64) % self.p))
            .collect();
        Self::new(self.p, c)
    }

    /// self^e mod m.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p);
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
        }
        acc
    }

    /// Substitute x^(1/p): valid when all nonzero coefficients sit at
    /// exponents divisible by p (Frobenius kernel).
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        let mut c = Vec::with_capacity(self.coeffs.len() / p + 1);
        for (i, &v) in self.coeffs.iter().enumerate() {
            if i % p == 0 {
                c.push(v);
            } else {
                assert!(v == 0, "not a p-th power");
            }
        }
        Self::new(self.p, c)
    }
}

/// True iff gcd(f, f') is constant over Q.
pub fn squarefree_check(f: &UniPoly) -> bool {
    assert!(!f.is_zero(), "squarefree check on zero polynomial");
    if f.degree() <= 1 {
        return true;
    }
    let d = f.derivative();
    // sound fast path: squarefree mod p with p not dividing lc implies
    // squarefree over Z
    for p in [8191u64, 131071, 524287] {
        let lcr = f.leading_coeff().mod_floor(&BigInt::from(p));
        if lcr.is_zero() {
            continue;
        }
        let fp = ModPoly::from_unipoly(f, p);
        let dp = ModPoly::from_unipoly(&d, p);
        if fp.gcd(&dp).is_constant() {
            return true;
        }
    }
    f.gcd(&d).is_constant()
}

/// Coefficient bound for integer factors: 2^deg(f) * ceil(||f||_2).
pub fn mignotte_bound(f: &UniPoly) -> BigInt {
    assert!(!f.is_zero());
    let l2 = f.l2_norm_squared();
    let root = l2.sqrt() + 1;
    root << f.degree()
}

/// Factor a nonzero polynomial over Z/p into monic irreducibles with
/// multiplicities; the product of factors^mult times lc equals the input.
pub fn factor_mod_p(f: &ModPoly, rng: &mut dyn RngCore) -> Vec<(ModPoly, u32)> {
    assert!(!f.is_zero(), "factoring zero polynomial");
    assert!(f.p % 2 == 1, "modulus must be an odd prime");
    let mut out: Vec<(ModPoly, u32)> = Vec::new();
    let mut stack = vec![(f.make_monic(), 1u32)];
    while let Some((g, mult)) = stack.pop() {
        if g.is_constant() {
            continue;
        }
        let d = g.derivative();
        if d.is_zero() {
            // g = h(x^p): recurse with multiplicity scaled by p
            let h = g.pth_root();
            let pm = mult
                .checked_mul(u32::try_from(g.p).expect("prime too large for multiplicity"))
                .expect("multiplicity overflow");
            stack.push((h, pm));
            continue;
        }
        let sf_part = g.divmod(&g.gcd(&d)).0;
        // distinct-degree then equal-degree splitting of the squarefree
        // part; multiplicities recovered by trial division into g
        let mut rest = g.clone();
        for (h, deg) in distinct_degree(&sf_part) {
            for irr in equal_degree(&h, deg, rng) {
                let mut m = 0u32;
                loop {
                    let (q, r) = rest.divmod(&irr);
                    if r.is_zero() {
                        m += 1;
                        rest = q;
                    } else {
                        break;
                    }
                }
                merge_factor(&mut out, irr, m * mult);
            }
        }
        // whatever the squarefree part missed is a p-th power
        if !rest.is_constant() {
            stack.push((rest.make_monic(), mult));
        }
    }
    out.sort_by(|a, b| (a.0.degree(), &a.0.coeffs).cmp(&(b.0.degree(), &b.0.coeffs)));
    out
}

fn merge_factor(out: &mut Vec<(ModPoly, u32)>, f: ModPoly, m: u32) {
    if m == 0 {
        return;
    }
    match out.iter_mut().find(|(g, _)| *g == f) {
        Some((_, k)) => *k += m,
        None => out.push((f, m)),
    }
}

/// Distinct-degree decomposition of a monic squarefree polynomial:
/// returns (product of irreducibles of degree d, d) pairs.
fn distinct_degree(f: &ModPoly) -> Vec<(ModPoly, usize)> {
    let mut out = Vec::new();
    let mut fs = f.make_monic();
    let mut h = ModPoly::x(f.p);
    let mut d = 0usize;
    while fs.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(&BigUint::from(f.p), &fs);
        let g = h.sub(&ModPoly::x(f.p)).gcd(&fs);
        if !g.is_constant() {
            out.push((g.clone(), d));
            fs = fs.divmod(&g).0;
            h = h.rem(&fs);
        }
    }
    if fs.degree() > 0 {
        out.push((fs.clone(), fs.degree()));
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting: f monic squarefree, all
/// irreducible factors of degree d.
fn equal_degree(f: &ModPoly, d: usize, rng: &mut dyn RngCore) -> Vec<ModPoly> {
    if f.degree() == d {
        return vec![f.make_monic()];
    }
    let p = f.p;
    let exp = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let deg = f.degree() - 1;
        let coeffs: Vec<u64> = (0..=deg).map(|_| rng.next_u64() % p).collect();
        let r = ModPoly::new(p, coeffs);
        if r.is_constant() {
            continue;
        }
        let s = r.pow_mod(&exp, f);
        let g = s.sub(&ModPoly::one(p)).gcd(f);
        if !g.is_constant() && g.degree() < f.degree() {
            let rest = f.divmod(&g).0;
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&rest, d, rng));
            return out;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftError {
    NotCoprime,
    BadInput(String),
}

impl std::fmt::Display for LiftError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LiftError::NotCoprime => write!(f, "factors not pairwise coprime mod p"),
            LiftError::BadInput(m) => write!(f, "hensel lift precondition violated: {m}"),
        }
    }
}

impl std::error::Error for LiftError {}

/// Quadratic Hensel lifting. `factors` are the monic, pairwise-coprime
/// factors of `f/lc(f)` mod p; the result is the lifted monic factorization
/// mod p^k together with p^k, where p^k > 2 * bound * |lc(f)|.
pub fn hensel_lift_uni(
    f: &UniPoly,
    factors: &[ModPoly],
    bound: &BigInt,
) -> Result<(Vec<UniPoly>, BigInt), LiftError> {
    if factors.is_empty() {
        return Err(LiftError::BadInput("no factors".into()));
    }
    let p = factors[0].modulus();
    let pb = BigInt::from(p);
    let lc = f.leading_coeff();
    if lc.mod_floor(&pb).is_zero() {
        return Err(LiftError::BadInput("p divides lc(f)".into()));
    }
    let target: BigInt = bound * 2 * lc.abs() + 1;
    let mut q = pb.clone();
    while q <= target {
        q *= &pb;
    }

    // monic image of f mod q
    let lc_inv_q = mod_inverse(&lc.mod_floor(&q), &q)
        .ok_or_else(|| LiftError::BadInput("lc not invertible mod p^k".into()))?;
    let f_monic = reduce_poly(&f.mul_scalar(&lc_inv_q), &q);

    let monic: Vec<UniPoly> = factors.iter().map(|g| g.make_monic().to_unipoly()).collect();
    let mut out = Vec::with_capacity(monic.len());
    lift_tree_to(&f_monic, &monic, &pb, &q, &mut out)?;
    Ok((out, q))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

fn reduce_poly(f: &UniPoly, q: &BigInt) -> UniPoly {
    UniPoly::from_coeffs(f.coeffs().iter().map(|c| c.mod_floor(q)).collect())
}

fn mul_mod(a: &UniPoly, b: &UniPoly, q: &BigInt) -> UniPoly {
    reduce_poly(&a.mul(b), q)
}

pub(crate) fn divmod_monic_mod(a: &UniPoly, b: &UniPoly, q: &BigInt) -> (UniPoly, UniPoly) {
    debug_assert!(b.leading_coeff().is_one());
    let mut rem = a.coeffs().to_vec();
    let dlen = b.coeffs().len();
    if rem.len() < dlen {
        return (UniPoly::zero(), reduce_poly(a, q));
    }
    let qlen = rem.len() - dlen + 1;
    let mut quo = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let top = rem[k + dlen - 1].mod_floor(q);
        if top.is_zero() {
            rem[k + dlen - 1] = BigInt::zero();
            continue;
        }
        for (i, d) in b.coeffs().iter().enumerate() {
            let v = d * &top;
            rem[k + i] -= v;
        }
        quo[k] = top;
    }
    rem.truncate(dlen - 1);
    (
        reduce_poly(&UniPoly::from_coeffs(quo), q),
        reduce_poly(&UniPoly::from_coeffs(rem), q),
    )
}

/// Extended gcd of two polynomials mod p (field): returns (s, t) with
/// s*a + t*b = 1, or None when a and b share a factor.
pub(crate) fn bezout_mod_p(a: &ModPoly, b: &ModPoly) -> Option<(ModPoly, ModPoly)> {
    let p = a.modulus();
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (ModPoly::one(p), ModPoly::zero(p));
    let (mut t0, mut t1) = (ModPoly::zero(p), ModPoly::one(p));
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1);
        (r0, r1) = (r1, r);
        let ns = s0.sub(&q.mul(&s1));
        (s0, s1) = (s1, ns);
        let nt = t0.sub(&q.mul(&t1));
        (t0, t1) = (t1, nt);
    }
    if r0.is_constant() && !r0.is_zero() {
        let inv = r0.inv(r0.lc());
        Some((s0.mul_scalar(inv), t0.mul_scalar(inv)))
    } else {
        None
    }
}

/// Recursive pairwise lifting over a balanced factor tree: f (monic mod q)
/// equals the product of all `parts` mod p; leaves are pushed into `out`
/// lifted to mod q.
pub(crate) fn lift_tree_to(
    f: &UniPoly,
    parts: &[UniPoly],
    p: &BigInt,
    q: &BigInt,
    out: &mut Vec<UniPoly>,
) -> Result<(), LiftError> {
    if parts.len() == 1 {
        out.push(reduce_poly(f, q));
        return Ok(());
    }
    let mid = parts.len() / 2;
    let (left, right) = parts.split_at(mid);
    let mut g = UniPoly::one();
    for h in left {
        g = mul_mod(&g, h, p);
    }
    let mut h = UniPoly::one();
    for x in right {
        h = mul_mod(&h, x, p);
    }
    let pm = ModPoly::from_unipoly(&g, p.to_u64().unwrap());
    let hm = ModPoly::from_unipoly(&h, p.to_u64().unwrap());
    let (s, t) = bezout_mod_p(&pm, &hm).ok_or(LiftError::NotCoprime)?;
    let (g, h) = lift_pair(f, &g, &h, &s.to_unipoly(), &t.to_unipoly(), p, q);
    lift_tree_to(&g, left, p, q, out)?;
    lift_tree_to(&h, right, p, q, out)
}

/// Lift f = g*h from mod m to mod q by repeated quadratic steps,
/// maintaining the Bezout identity s*g + t*h = 1 alongside.
fn lift_pair(
    f: &UniPoly,
    g0: &UniPoly,
    h0: &UniPoly,
    s0: &UniPoly,
    t0: &UniPoly,
    p: &BigInt,
    q: &BigInt,
) -> (UniPoly, UniPoly) {
    let mut m = p.clone();
    let mut g = g0.clone();
    let mut h = h0.clone();
    let mut s = s0.clone();
    let mut t = t0.clone();
    while m < *q {
        let m2: BigInt = (&m * &m).min(q.clone());
        // factor update
        let e = reduce_poly(&f.sub(&g.mul(&h)), &m2);
        let se = mul_mod(&s, &e, &m2);
        let (qq, r) = divmod_monic_mod(&se, &h, &m2);
        let g_new = reduce_poly(&g.add(&mul_mod(&t, &e, &m2)).add(&mul_mod(&qq, &g, &m2)), &m2);
        let h_new = reduce_poly(&h.add(&r), &m2);
        // Bezout update
        let b = reduce_poly(&s.mul(&g_new).add(&t.mul(&h_new)).sub(&UniPoly::one()), &m2);
        let sb = mul_mod(&s, &b, &m2);
        let (c, d) = divmod_monic_mod(&sb, &h_new, &m2);
        let s_new = reduce_poly(&s.sub(&d), &m2);
        let t_new = reduce_poly(&t.sub(&mul_mod(&t, &b, &m2)).sub(&mul_mod(&c, &g_new, &m2)), &m2);
        g = g_new;
        h = h_new;
        s = s_new;
        t = t_new;
        m = m2;
    }
    (g, h)
}

/// Symmetric representative of a mod-q coefficient vector.
fn symmetric(f: &UniPoly, q: &BigInt) -> UniPoly {
    let half = q / 2;
    UniPoly::from_coeffs(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(q);
                if r > half {
                    r - q
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Full factorization over Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniFactorization {
    pub unit: i8,
    pub content: BigInt,
    pub factors: Vec<(UniPoly, u32)>,
}

impl UniFactorization {
    /// unit * content * prod factors^mult.
    pub fn expand(&self) -> UniPoly {
        let mut acc = UniPoly::constant(BigInt::from(self.unit) * &self.content);
        for (f, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

/// Primes used for modular factorization, per the driver policy: odd primes
/// from 13 upward, skipping those dividing lc or making the image
/// non-squarefree.
fn prime_stream() -> impl Iterator<Item = u64> {
    (13u64..100_000).filter(|&n| {
        if n % 2 == 0 {
            return false;
        }
        let mut d = 3;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        true
    })
}

/// Factor a nonzero univariate integer polynomial into primitive
/// irreducibles with positive leading coefficients.
pub fn factor_univariate(f: &UniPoly, rng: &mut dyn RngCore) -> UniFactorization {
    assert!(!f.is_zero(), "factoring zero polynomial");
    let (unit, content, prim) = f.normalized();
    let content = if content.is_zero() { BigInt::one() } else { content };
    let mut factors: Vec<(UniPoly, u32)> = Vec::new();

    let mut rest = prim;
    // powers of x
    let tz = rest.trailing_zeros();
    if tz > 0 {
        rest = rest.shift_down(tz);
        factors.push((UniPoly::monomial(1, BigInt::one()), tz as u32));
    }

    while rest.degree() >= 1 {
        let sf = squarefree_part(&rest);
        for g in factor_squarefree_primitive(&sf, rng) {
            let mut m = 0u32;
            while let Some(q) = rest.exact_div(&g) {
                rest = q;
                m += 1;
            }
            debug_assert!(m >= 1);
            factors.push((g, m));
        }
    }
    factors.sort_by(|a, b| {
        (a.0.degree(), a.0.coeffs()).cmp(&(b.0.degree(), b.0.coeffs()))
    });

    let out = UniFactorization { unit, content, factors };
    debug_assert_eq!(out.expand(), *f, "reconstruction identity violated");
    out
}

fn squarefree_part(f: &UniPoly) -> UniPoly {
    let g = f.gcd(&f.derivative());
    if g.is_constant() {
        f.primitive_part()
    } else {
        f.exact_div(&g).expect("gcd divides").primitive_part()
    }
}

/// Zassenhaus on a primitive squarefree polynomial of degree >= 1.
fn factor_squarefree_primitive(f: &UniPoly, rng: &mut dyn RngCore) -> Vec<UniPoly> {
    factor_squarefree_skipping(f, 0, rng)
}

/// Same, but skipping the first `skip` admissible primes; the final factor
/// set must not depend on the prime.
pub(crate) fn factor_squarefree_skipping(
    f: &UniPoly,
    skip: usize,
    rng: &mut dyn RngCore,
) -> Vec<UniPoly> {
    let (_, _, f) = f.normalized();
    if f.degree() == 1 {
        return vec![f];
    }
    let lc = f.leading_coeff();
    let deriv = f.derivative();

    let mut chosen: Option<(u64, Vec<ModPoly>)> = None;
    let mut admissible = 0usize;
    for p in prime_stream() {
        let pb = BigInt::from(p);
        if lc.mod_floor(&pb).is_zero() {
            continue;
        }
        let fp = ModPoly::from_unipoly(&f, p);
        let dp = ModPoly::from_unipoly(&deriv, p);
        if !fp.gcd(&dp).is_constant() {
            continue;
        }
        if admissible < skip {
            admissible += 1;
            continue;
        }
        let fac = factor_mod_p(&fp, rng);
        debug_assert!(fac.iter().all(|(_, m)| *m == 1));
        let monic: Vec<ModPoly> = fac.into_iter().map(|(g, _)| g).collect();
        chosen = Some((p, monic));
        break;
    }
    let (_, modular) = chosen.expect("no admissible prime found");
    if modular.len() == 1 {
        return vec![f];
    }

    let bound = mignotte_bound(&f);
    let (lifted, q) = hensel_lift_uni(&f, &modular, &bound).expect("lifting preconditions hold");

    recombine(&f, lifted, &q)
}

/// Subset recombination ordered by cardinality with degree and trailing
/// coefficient pruning; candidates are confirmed by exact division.
fn recombine(f: &UniPoly, mut parts: Vec<UniPoly>, q: &BigInt) -> Vec<UniPoly> {
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut card = 1usize;
    'outer: while 2 * card <= parts.len() {
        let idx: Vec<usize> = (0..parts.len()).collect();
        for combo in combinations(&idx, card) {
            let lc = rest.leading_coeff();
            // trailing coefficient early abort
            let t0 = rest.coeff(0);
            if !t0.is_zero() {
                let mut tc = lc.mod_floor(q);
                for &i in &combo {
                    tc = (tc * parts[i].coeff(0)).mod_floor(q);
                }
                let half = q / 2;
                if tc > half {
                    tc -= q;
                }
                if !tc.is_zero() && !(&lc * &t0).mod_floor(&tc.abs()).is_zero() {
                    continue;
                }
            }
            let mut prod = UniPoly::constant(lc.clone());
            for &i in &combo {
                prod = mul_mod(&prod, &parts[i], q);
            }
            let cand = symmetric(&prod, q).primitive_part();
            if cand.is_constant() {
                continue;
            }
            if let Some(quo) = rest.exact_div(&cand) {
                out.push(cand);
                rest = quo.primitive_part();
                let keep: Vec<UniPoly> = idx
                    .iter()
                    .filter(|i| !combo.contains(i))
                    .map(|&i| parts[i].clone())
                    .collect();
                parts = keep;
                continue 'outer;
            }
        }
        card += 1;
    }
    if rest.degree() >= 1 {
        out.push(rest.primitive_part());
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
