//! Factorization of primitive squarefree bivariate polynomials over the
//! integers.
//!
//! The built-in route factors the univariate image at an anchor t = alpha,
//! lifts the factors in powers of (t - alpha) modulo a prime power large
//! enough to cover true factor coefficients, and recombines lifted factors
//! by subset products confirmed through exact trial division over Z[x,t].
//! An external program can be plugged in behind the same contract; its
//! output is verified by multiplying back and falls through to the built-in
//! factorizer when the verification fails.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Duration;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bipoly::BiPoly;
use crate::multipoly::Exp;
use crate::text::{format_bipoly, parse_bipoly};
use crate::unifactor::{self, factor_univariate, squarefree_check, ModPoly};
use crate::unipoly::UniPoly;

/// Exact factorization: unit * content_t * product(factors) = input.
/// Factors are primitive (zero t-content), irreducible, multiplicity one,
/// with positive leading coefficients under the (xdeg, tdeg) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiFactorization {
    pub unit: i8,
    pub content_t: BiPoly,
    pub factors: Vec<BiPoly>,
}

impl BiFactorization {
    pub fn expand(&self) -> BiPoly {
        let mut acc = if self.unit < 0 {
            self.content_t.neg()
        } else {
            self.content_t.clone()
        };
        for f in &self.factors {
            acc = acc.mul(f);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BiFactorError {
    /// Input has a repeated factor (detected through anchor exhaustion or a
    /// repeated monomial factor).
    NotSquarefree,
    /// Lifting or verification failed after the anchor retry budget.
    Internal(String),
}

impl std::fmt::Display for BiFactorError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BiFactorError::NotSquarefree => write!(f, "input is not squarefree"),
            BiFactorError::Internal(m) => write!(f, "bivariate factorization failed: {m}"),
        }
    }
}

impl std::error::Error for BiFactorError {}

/// Smallest |alpha| (trying 0, 1, -1, 2, -2, ...) with lc_x(F)(alpha)
/// nonzero and F(x, alpha) squarefree. For a squarefree F only finitely
/// many anchors are bad; exhaustion of the guard range therefore certifies
/// a repeated factor.
pub fn choose_anchor(f: &BiPoly) -> Result<BigInt, BiFactorError> {
    anchor_sequence(f).next().ok_or(BiFactorError::NotSquarefree)
}

fn anchor_sequence(f: &BiPoly) -> impl Iterator<Item = BigInt> + '_ {
    let lc = f.lc_x();
    let bound = 100 * (f.degree_x() as i64 + f.degree_t() as i64) + 1;
    let candidates = std::iter::once(0i64).chain((1..=bound).flat_map(|k| [k, -k]));
    candidates.filter_map(move |a| {
        let alpha = BigInt::from(a);
        if lc.eval(&alpha).is_zero() {
            return None;
        }
        let img = f.eval_t(&alpha);
        if img.is_constant() || !squarefree_check(&img) {
            return None;
        }
        Some(alpha)
    })
}

/// Factor a nonzero bivariate polynomial with squarefree primitive part.
pub fn factor_bivariate(f: &BiPoly) -> Result<BiFactorization, BiFactorError> {
    factor_bivariate_impl(f, None)
}

/// Same as [`factor_bivariate`] but forcing the first anchor; used to check
/// anchor independence.
pub fn factor_bivariate_anchored(
    f: &BiPoly,
    alpha: &BigInt,
) -> Result<BiFactorization, BiFactorError> {
    factor_bivariate_impl(f, Some(alpha.clone()))
}

fn factor_bivariate_impl(
    f: &BiPoly,
    forced_anchor: Option<BigInt>,
) -> Result<BiFactorization, BiFactorError> {
    assert!(!f.is_zero(), "factoring zero polynomial");

    let mut factors: Vec<BiPoly> = Vec::new();

    // pure x power: a repeated monomial factor means a non-squarefree input
    let xmin = f.min_degree_x();
    let mut work = f.clone();
    if xmin > 0 {
        if xmin > 1 {
            return Err(BiFactorError::NotSquarefree);
        }
        work = BiPoly::from_terms(
            work.terms()
                .iter()
                .map(|(x, t, c)| (x - 1, *t, c.clone()))
                .collect(),
        );
        factors.push(BiPoly::monomial(1, 0, BigInt::one()));
    }

    let content = work.content_t(); // positive lc, includes integer content
    let prim = work.div_content_t(&content);
    let (unit, prim) = prim.normalize_sign();
    let content_t = BiPoly::from_terms(
        content
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| (0, t as Exp, c.clone()))
            .collect(),
    );

    if prim.degree_x() == 0 {
        // everything landed in the content
        debug_assert!(prim.is_one());
        let out = BiFactorization { unit, content_t, factors: sort_factors(factors) };
        debug_assert_eq!(out.expand(), *f);
        return Ok(out);
    }

    let mut anchors: Vec<BigInt> = match forced_anchor {
        Some(a) => vec![a],
        None => anchor_sequence(&prim).take(5).collect(),
    };
    if anchors.is_empty() {
        return Err(BiFactorError::NotSquarefree);
    }
    let mut last_err = None;
    while let Some(alpha) = anchors.first().cloned() {
        anchors.remove(0);
        match factor_primitive_part(&prim, &alpha) {
            Ok(mut fs) => {
                factors.append(&mut fs);
                let out = BiFactorization { unit, content_t, factors: sort_factors(factors) };
                assert_eq!(out.expand(), *f, "bivariate factorization must be exact");
                return Ok(out);
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| BiFactorError::Internal("no usable anchor".into())))
}

fn sort_factors(mut factors: Vec<BiPoly>) -> Vec<BiPoly> {
    factors.sort_by(|a, b| a.canonical_cmp(b));
    factors
}

/// Factor the primitive squarefree positive-lc part at a fixed anchor.
fn factor_primitive_part(prim: &BiPoly, alpha: &BigInt) -> Result<Vec<BiPoly>, BiFactorError> {
    let image = prim.eval_t(alpha);
    if image.degree() != prim.degree_x() as usize || !squarefree_check(&image) {
        return Err(BiFactorError::Internal("anchor lost degree or squarefreeness".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let uni = factor_univariate(&image, &mut rng);
    let parts: Vec<UniPoly> = uni.factors.iter().map(|(g, _)| g.clone()).collect();
    debug_assert!(uni.factors.iter().all(|(_, m)| *m == 1));

    if parts.len() == 1 {
        return Ok(vec![prim.clone()]);
    }

    // shifted coordinates: Fsh(x, u) = prim(x, u + alpha)
    let shifted = shift_classes(prim, alpha);
    let dx = prim.degree_x() as usize;
    let dt = prim.degree_t() as usize;
    let m = dt + 1;
    let h_sh = shifted
        .values()
        .map(|p| p.height())
        .max()
        .unwrap_or_else(BigInt::zero);

    let q_opt: BigInt = ((&h_sh * BigInt::from((dt as u64 + 1).pow(2))) << (dx + 24)) * 2 + 1;
    let q_rig: BigInt = {
        let gel = (&h_sh * &h_sh) << (2 * dx + 4 * dt);
        gel * BigInt::from((dt as u64 + 1).pow(3) * (dx as u64 + 1)) * 2 + 1
    };
    let first_target = q_opt.clone().min(q_rig.clone());

    let p = choose_lift_prime(&image)?;

    match lift_and_recombine(prim, &shifted, alpha, &parts, p, &first_target, m)? {
        RecombineOutcome::Complete(fs) => Ok(fs),
        RecombineOutcome::Suspicious(fs) if first_target >= q_rig => Ok(fs),
        RecombineOutcome::Suspicious(_) => {
            match lift_and_recombine(prim, &shifted, alpha, &parts, p, &q_rig, m)? {
                RecombineOutcome::Complete(fs) | RecombineOutcome::Suspicious(fs) => Ok(fs),
            }
        }
    }
}

fn shift_classes(f: &BiPoly, alpha: &BigInt) -> BTreeMap<Exp, UniPoly> {
    f.x_classes()
        .into_iter()
        .map(|(x, p)| (x, p.taylor_shift(alpha)))
        .collect()
}

fn choose_lift_prime(image: &UniPoly) -> Result<u64, BiFactorError> {
    let deriv = image.derivative();
    for p in (13u64..100_000).filter(|&n| is_small_prime(n)) {
        let pb = BigInt::from(p);
        if image.leading_coeff().mod_floor(&pb).is_zero() {
            continue;
        }
        let fp = ModPoly::from_unipoly(image, p);
        let dp = ModPoly::from_unipoly(&deriv, p);
        if fp.gcd(&dp).is_constant() {
            return Ok(p);
        }
    }
    Err(BiFactorError::Internal("no admissible lifting prime".into()))
}

fn is_small_prime(n: u64) -> bool {
    if n < 2 || n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

enum RecombineOutcome {
    /// Every remaining block was pinned down to a single lifted factor.
    Complete(Vec<BiPoly>),
    /// A multi-part remainder was declared irreducible; trustworthy only at
    /// the rigorous modulus.
    Suspicious(Vec<BiPoly>),
}

fn lift_and_recombine(
    prim: &BiPoly,
    shifted: &BTreeMap<Exp, UniPoly>,
    alpha: &BigInt,
    parts: &[UniPoly],
    p: u64,
    q_target: &BigInt,
    m: usize,
) -> Result<RecombineOutcome, BiFactorError> {
    let pb = BigInt::from(p);
    let mut q = pb.clone();
    while q < *q_target {
        q = &q * &pb;
    }

    // stage 1: p-adic lift of the univariate factors at u = 0
    let image = prim.eval_t(alpha);
    let lc0 = image.leading_coeff();
    let lc0_inv = mod_inverse(&lc0.mod_floor(&q), &q)
        .ok_or_else(|| BiFactorError::Internal("lc not invertible".into()))?;
    let image_monic = reduce_uni(&image.mul_scalar(&lc0_inv), &q);
    let monic_parts: Vec<UniPoly> = parts
        .iter()
        .map(|g| {
            let gi = mod_inverse(&g.leading_coeff().mod_floor(&pb), &pb).unwrap();
            reduce_uni(&g.mul_scalar(&gi), &pb)
        })
        .collect();
    let mut lifted0 = Vec::new();
    unifactor::lift_tree_to(&image_monic, &monic_parts, &pb, &q, &mut lifted0)
        .map_err(|e| BiFactorError::Internal(e.to_string()))?;

    // stage 2: u-adic lift of the monic image of prim
    let lc_series = {
        let top = shifted
            .iter()
            .max_by_key(|(x, _)| **x)
            .map(|(_, p)| p.clone())
            .unwrap();
        series_from_uni(&top, m, &q)
    };
    let lc_inv = series_inverse(&lc_series, m, &q)
        .ok_or_else(|| BiFactorError::Internal("lc series not invertible".into()))?;
    let dx = prim.degree_x() as usize;
    let mut w: SPoly = vec![vec![BigInt::zero()]; dx + 1];
    for (x, cls) in shifted {
        w[*x as usize] = series_from_uni(cls, m, &q);
    }
    for row in &mut w {
        *row = series_mul(row, &lc_inv, m, &q);
    }

    let leaf_inputs: Vec<SPoly> = lifted0.iter().map(sp_from_uni).collect();
    let mut leaves: Vec<SPoly> = Vec::with_capacity(leaf_inputs.len());
    sp_lift_tree(&w, &leaf_inputs, &pb, &q, m, &mut leaves)?;

    // recombination with exact trial division in the original coordinates
    let mut remaining = prim.clone();
    let mut live: Vec<SPoly> = leaves;
    let mut out: Vec<BiPoly> = Vec::new();
    let neg_alpha = -alpha;
    'outer: loop {
        if live.len() == 1 {
            out.push(remaining.normalize_sign().1);
            return Ok(RecombineOutcome::Complete(out));
        }
        let lc_rem = series_from_uni(&remaining.lc_x().taylor_shift(alpha), m, &q);
        let mut card = 1usize;
        while 2 * card <= live.len() {
            for combo in combinations(live.len(), card) {
                let mut prod = vec![lc_rem.clone()];
                for &i in &combo {
                    prod = sp_mul(&prod, &live[i], m, &q);
                }
                let cand = sp_to_bipoly_symmetric(&prod, &q, &neg_alpha);
                if cand.is_zero() || cand.is_constant() {
                    continue;
                }
                let cand = primitive_bipoly(&cand);
                if cand.degree_x() == 0 {
                    continue;
                }
                if let Some(quo) = remaining.exact_div(&cand) {
                    out.push(cand.normalize_sign().1);
                    remaining = quo;
                    let keep: Vec<SPoly> = live
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !combo.contains(i))
                        .map(|(_, s)| s.clone())
                        .collect();
                    live = keep;
                    continue 'outer;
                }
            }
            card += 1;
        }
        // no split found; remaining is declared irreducible
        out.push(remaining.normalize_sign().1);
        return Ok(if live.len() >= 2 {
            RecombineOutcome::Suspicious(out)
        } else {
            RecombineOutcome::Complete(out)
        });
    }
}

fn primitive_bipoly(f: &BiPoly) -> BiPoly {
    let c = f.content_t();
    if c.is_one() {
        f.clone()
    } else {
        f.div_content_t(&c)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

fn reduce_uni(f: &UniPoly, q: &BigInt) -> UniPoly {
    UniPoly::from_coeffs(f.coeffs().iter().map(|c| c.mod_floor(q)).collect())
}

// ---------------------------------------------------------------------------
// series arithmetic over (Z/q)[[u]] truncated at u^m
// ---------------------------------------------------------------------------

type Series = Vec<BigInt>;
/// Dense polynomial in x with series coefficients; index = x degree.
type SPoly = Vec<Series>;

fn series_from_uni(p: &UniPoly, m: usize, q: &BigInt) -> Series {
    p.coeffs().iter().take(m).map(|c| c.mod_floor(q)).collect()
}

fn series_trim(s: &mut Series) {
    while s.last().is_some_and(|c| c.is_zero()) {
        s.pop();
    }
}

fn series_add(a: &Series, b: &Series, q: &BigInt) -> Series {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    for c in &mut out {
        if *c >= *q || c.is_negative() {
            *c = c.mod_floor(q);
        }
    }
    series_trim(&mut out);
    out
}

fn series_sub(a: &Series, b: &Series, q: &BigInt) -> Series {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    for c in &mut out {
        if *c >= *q || c.is_negative() {
            *c = c.mod_floor(q);
        }
    }
    series_trim(&mut out);
    out
}

const KRONECKER_THRESHOLD: usize = 16;

/// Evaluate a non-negative coefficient vector at 2^(8*slot_bytes) by
/// writing each coefficient's little-endian bytes at its slot offset.
fn pack_rows(rows: &[&[BigInt]], slots_per_row: usize, slot_bytes: usize) -> num_bigint::BigUint {
    let mut buf = vec![0u8; rows.len() * slots_per_row * slot_bytes + 1];
    for (r, row) in rows.iter().enumerate() {
        for (i, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let off = (r * slots_per_row + i) * slot_bytes;
            let bytes = c.magnitude().to_bytes_le();
            debug_assert!(bytes.len() <= slot_bytes);
            buf[off..off + bytes.len()].copy_from_slice(&bytes);
        }
    }
    num_bigint::BigUint::from_bytes_le(&buf)
}

fn unpack_slots(p: &num_bigint::BigUint, slot_bytes: usize, n: usize) -> Vec<BigInt> {
    let bytes = p.to_bytes_le();
    (0..n)
        .map(|i| {
            let lo = (i * slot_bytes).min(bytes.len());
            let hi = ((i + 1) * slot_bytes).min(bytes.len());
            BigInt::from(num_bigint::BigUint::from_bytes_le(&bytes[lo..hi]))
        })
        .collect()
}

fn slot_bytes_for(q: &BigInt, pairs: u64) -> usize {
    let guard = 64 - pairs.max(1).leading_zeros() as u64;
    ((2 * q.bits() + guard + 8) / 8) as usize
}

/// Full product of coefficient vectors reduced mod q (entries in [0, q)),
/// without output reduction. Large products go through a Kronecker
/// packing: both series are evaluated at a power of two wide enough that
/// product coefficients never overlap, so one big-integer multiplication
/// carries the whole convolution.
fn raw_mul(a: &[BigInt], b: &[BigInt], q: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= KRONECKER_THRESHOLD {
        let mut out = vec![BigInt::zero(); out_len];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        return out;
    }
    let slot_bytes = slot_bytes_for(q, a.len().min(b.len()) as u64);
    let prod = pack_rows(&[a], a.len(), slot_bytes) * pack_rows(&[b], b.len(), slot_bytes);
    unpack_slots(&prod, slot_bytes, out_len)
}

fn series_mul(a: &Series, b: &Series, m: usize, q: &BigInt) -> Series {
    let mut out = raw_mul(a, b, q);
    out.truncate(m);
    for c in &mut out {
        *c = c.mod_floor(q);
    }
    series_trim(&mut out);
    out
}

/// Newton inverse of a series with unit constant term.
fn series_inverse(a: &Series, m: usize, q: &BigInt) -> Option<Series> {
    let a0 = a.first()?;
    let inv0 = mod_inverse(a0, q)?;
    let mut v: Series = vec![inv0];
    let mut prec = 1usize;
    while prec < m {
        prec = (prec * 2).min(m);
        // v <- v * (2 - a*v) mod u^prec
        let av = series_mul(&a[..a.len().min(prec)].to_vec(), &v, prec, q);
        let mut two_minus = vec![BigInt::from(2)];
        two_minus = series_sub(&two_minus, &av, q);
        v = series_mul(&v, &two_minus, prec, q);
    }
    Some(v)
}

// ---------------------------------------------------------------------------
// x-polynomials with series coefficients
// ---------------------------------------------------------------------------

fn sp_from_uni(g: &UniPoly) -> SPoly {
    g.coeffs().iter().map(|c| vec![c.clone()]).collect()
}

fn sp_trim(p: &mut SPoly) {
    while p.last().is_some_and(|s| s.iter().all(|c| c.is_zero())) {
        p.pop();
    }
}

/// Polynomial product in x with series coefficients, truncated at u^m and
/// reduced mod q. Large operands pack both dimensions at once: rows are
/// laid out end to end with enough u slots that neither the series
/// convolution nor the row convolution can overlap, and the whole product
/// is one big-integer multiplication.
fn sp_mul(a: &SPoly, b: &SPoly, m: usize, q: &BigInt) -> SPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let rows_out = a.len() + b.len() - 1;
    let ua = a.iter().map(|s| s.len()).max().unwrap_or(0);
    let ub = b.iter().map(|s| s.len()).max().unwrap_or(0);
    if ua == 0 || ub == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vec<BigInt>>;
    if ua.min(ub) > KRONECKER_THRESHOLD || (ua.min(ub) > 2 && a.len().min(b.len()) > 4) {
        let uslots = ua + ub - 1;
        let pairs = (a.len().min(b.len()) as u64) * (ua.min(ub) as u64);
        let slot_bytes = slot_bytes_for(q, pairs);
        let arows: Vec<&[BigInt]> = a.iter().map(|s| s.as_slice()).collect();
        let brows: Vec<&[BigInt]> = b.iter().map(|s| s.as_slice()).collect();
        let prod = pack_rows(&arows, uslots, slot_bytes) * pack_rows(&brows, uslots, slot_bytes);
        let flat = unpack_slots(&prod, slot_bytes, rows_out * uslots);
        out = flat
            .chunks(uslots)
            .take(rows_out)
            .map(|chunk| chunk[..chunk.len().min(m)].to_vec())
            .collect();
    } else {
        out = vec![Vec::new(); rows_out];
        for (i, sa) in a.iter().enumerate() {
            if sa.is_empty() {
                continue;
            }
            for (j, sb) in b.iter().enumerate() {
                if sb.is_empty() {
                    continue;
                }
                let mut prod = raw_mul(sa, sb, q);
                prod.truncate(m);
                let acc = &mut out[i + j];
                if acc.len() < prod.len() {
                    acc.resize(prod.len(), BigInt::zero());
                }
                for (k, c) in prod.into_iter().enumerate() {
                    acc[k] += c;
                }
            }
        }
    }
    for s in &mut out {
        for c in s.iter_mut() {
            *c = c.mod_floor(q);
        }
        series_trim(s);
    }
    let mut out: SPoly = out;
    sp_trim(&mut out);
    out
}

fn sp_add(a: &SPoly, b: &SPoly, q: &BigInt) -> SPoly {
    let n = a.len().max(b.len());
    let mut out = vec![Vec::new(); n];
    for (i, s) in out.iter_mut().enumerate() {
        let sa = a.get(i).cloned().unwrap_or_default();
        let sb = b.get(i).cloned().unwrap_or_default();
        *s = series_add(&sa, &sb, q);
    }
    let mut out: SPoly = out;
    sp_trim(&mut out);
    out
}

fn sp_sub(a: &SPoly, b: &SPoly, q: &BigInt) -> SPoly {
    let n = a.len().max(b.len());
    let mut out = vec![Vec::new(); n];
    for (i, s) in out.iter_mut().enumerate() {
        let sa = a.get(i).cloned().unwrap_or_default();
        let sb = b.get(i).cloned().unwrap_or_default();
        *s = series_sub(&sa, &sb, q);
    }
    let mut out: SPoly = out;
    sp_trim(&mut out);
    out
}

fn sp_truncate(a: &SPoly, prec: usize) -> SPoly {
    let mut out: SPoly = a
        .iter()
        .map(|s| {
            let mut t = s[..s.len().min(prec)].to_vec();
            series_trim(&mut t);
            t
        })
        .collect();
    sp_trim(&mut out);
    out
}

/// Divide by u^k; the low k coefficients must vanish.
fn sp_shift_down(a: &SPoly, k: usize) -> SPoly {
    let mut out: SPoly = a
        .iter()
        .map(|s| {
            debug_assert!(s.iter().take(k).all(|c| c.is_zero()));
            if s.len() <= k {
                Vec::new()
            } else {
                s[k..].to_vec()
            }
        })
        .collect();
    sp_trim(&mut out);
    out
}

/// Multiply by u^k.
fn sp_shift_up(a: &SPoly, k: usize) -> SPoly {
    a.iter()
        .map(|s| {
            if s.is_empty() {
                Vec::new()
            } else {
                let mut t = vec![BigInt::zero(); k];
                t.extend_from_slice(s);
                t
            }
        })
        .collect()
}

fn sp_is_monic(a: &SPoly) -> bool {
    a.last().is_some_and(|s| s.len() == 1 && s[0].is_one())
}

/// Division with remainder by a divisor monic in x.
fn sp_divmod_monic(a: &SPoly, b: &SPoly, m: usize, q: &BigInt) -> (SPoly, SPoly) {
    debug_assert!(sp_is_monic(b));
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let mut rem: SPoly = a.clone();
    let blen = b.len();
    let qlen = rem.len() - blen + 1;
    let mut quo: SPoly = vec![Vec::new(); qlen];
    for k in (0..qlen).rev() {
        let top = std::mem::take(&mut rem[k + blen - 1]);
        if top.iter().all(|c| c.is_zero()) {
            continue;
        }
        for (i, bi) in b.iter().enumerate().take(blen - 1) {
            let prod = series_mul(bi, &top, m, q);
            rem[k + i] = series_sub(&rem[k + i], &prod, q);
        }
        quo[k] = top;
    }
    rem.truncate(blen - 1);
    sp_trim(&mut rem);
    sp_trim(&mut quo);
    (quo, rem)
}

/// Bezout identity s*g + t*h = 1 mod q for monic univariate g, h that are
/// coprime mod p; computed mod p by field arithmetic and refined p-adically.
fn bezout_mod_q(
    g: &UniPoly,
    h: &UniPoly,
    p: &BigInt,
    q: &BigInt,
) -> Option<(UniPoly, UniPoly)> {
    let pu = p.to_u64().unwrap();
    let gm = ModPoly::from_unipoly(g, pu);
    let hm = ModPoly::from_unipoly(h, pu);
    let (s0, t0) = unifactor::bezout_mod_p(&gm, &hm)?;
    let mut s = s0.to_unipoly();
    let mut t = t0.to_unipoly();
    let mut modulus = p.clone();
    while modulus < *q {
        let m2: BigInt = (&modulus * &modulus).min(q.clone());
        let b = reduce_uni(
            &s.mul(g).add(&t.mul(h)).sub(&UniPoly::one()),
            &m2,
        );
        let sb = reduce_uni(&s.mul(&b), &m2);
        let (c, d) = unifactor::divmod_monic_mod(&sb, h, &m2);
        s = reduce_uni(&s.sub(&d), &m2);
        t = reduce_uni(
            &t.sub(&reduce_uni(&t.mul(&b), &m2)).sub(&reduce_uni(&c.mul(g), &m2)),
            &m2,
        );
        modulus = m2;
    }
    Some((s, t))
}

/// Recursive pairwise u-adic lifting over a balanced tree. `f` is monic in
/// x with series coefficients mod (q, u^m); leaves arrive lifted mod q at
/// u-precision 1 and leave at precision m.
fn sp_lift_tree(
    f: &SPoly,
    parts: &[SPoly],
    p: &BigInt,
    q: &BigInt,
    m: usize,
    out: &mut Vec<SPoly>,
) -> Result<(), BiFactorError> {
    if parts.len() == 1 {
        out.push(f.clone());
        return Ok(());
    }
    let mid = parts.len() / 2;
    let (left, right) = parts.split_at(mid);
    let mut g0 = vec![vec![BigInt::one()]];
    for x in left {
        g0 = sp_mul(&g0, x, 1, q);
    }
    let mut h0 = vec![vec![BigInt::one()]];
    for x in right {
        h0 = sp_mul(&h0, x, 1, q);
    }
    let g0u = sp_to_uni(&g0);
    let h0u = sp_to_uni(&h0);
    let (s, t) = bezout_mod_q(&g0u, &h0u, p, q)
        .ok_or_else(|| BiFactorError::Internal("factors not coprime mod p".into()))?;
    let (g, h) = sp_lift_pair(f, &g0, &h0, &sp_from_uni(&s), &sp_from_uni(&t), q, m);
    sp_lift_tree(&g, left, p, q, m, out)?;
    sp_lift_tree(&h, right, p, q, m, out)
}

fn sp_to_uni(a: &SPoly) -> UniPoly {
    UniPoly::from_coeffs(
        a.iter()
            .map(|s| s.first().cloned().unwrap_or_else(BigInt::zero))
            .collect(),
    )
}

/// One u-adic quadratic Hensel chain: start from f = g*h mod (q, u) with
/// Bezout s*g + t*h = 1 mod (q, u) and double the u precision up to m.
fn sp_lift_pair(
    f: &SPoly,
    g0: &SPoly,
    h0: &SPoly,
    s0: &SPoly,
    t0: &SPoly,
    q: &BigInt,
    m: usize,
) -> (SPoly, SPoly) {
    let mut prec = 1usize;
    let mut g = g0.clone();
    let mut h = h0.clone();
    let mut s = s0.clone();
    let mut t = t0.clone();
    while prec < m {
        let p2 = (prec * 2).min(m);
        let gap = p2 - prec;
        let ftr = sp_truncate(f, p2);
        // e vanishes mod u^prec; dividing it out halves every product
        // except g*h itself
        let e = sp_shift_down(&sp_sub(&ftr, &sp_mul(&g, &h, p2, q), q), prec);
        let se = sp_mul(&s, &e, gap, q);
        let (qq, r) = sp_divmod_monic(&se, &h, gap, q);
        let corr_g = sp_add(&sp_mul(&t, &e, gap, q), &sp_mul(&qq, &g, gap, q), q);
        let g_new = sp_add(&g, &sp_shift_up(&corr_g, prec), q);
        let h_new = sp_add(&h, &sp_shift_up(&r, prec), q);
        g = g_new;
        h = h_new;
        prec = p2;
        if prec >= m {
            break; // the Bezout pair has no further use
        }
        // the Bezout defect also vanishes mod u^(old prec)
        let one = vec![vec![BigInt::one()]];
        let b = sp_shift_down(
            &sp_sub(
                &sp_add(&sp_mul(&s, &g, p2, q), &sp_mul(&t, &h, p2, q), q),
                &one,
                q,
            ),
            p2 / 2,
        );
        let bgap = p2 - p2 / 2;
        let sb = sp_mul(&s, &b, bgap, q);
        let (c, d) = sp_divmod_monic(&sb, &h, bgap, q);
        let s_new = sp_sub(&s, &sp_shift_up(&d, p2 / 2), q);
        let corr_t = sp_add(&sp_mul(&t, &b, bgap, q), &sp_mul(&c, &g, bgap, q), q);
        let t_new = sp_sub(&t, &sp_shift_up(&corr_t, p2 / 2), q);
        s = s_new;
        t = t_new;
    }
    (g, h)
}

/// Symmetric lift mod q, then unshift u -> t - alpha back into original
/// coordinates.
fn sp_to_bipoly_symmetric(a: &SPoly, q: &BigInt, neg_alpha: &BigInt) -> BiPoly {
    let half = q / 2;
    let mut raw = Vec::new();
    for (x, s) in a.iter().enumerate() {
        let sym: Vec<BigInt> = s
            .iter()
            .map(|c| {
                let r = c.mod_floor(q);
                if r > half {
                    r - q
                } else {
                    r
                }
            })
            .collect();
        let row = UniPoly::from_coeffs(sym).taylor_shift(neg_alpha);
        for (t, c) in row.coeffs().iter().enumerate() {
            if !c.is_zero() {
                raw.push((x as Exp, t as Exp, c.clone()));
            }
        }
    }
    BiPoly::from_terms(raw)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
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

// ---------------------------------------------------------------------------
// external backend
// ---------------------------------------------------------------------------

/// A user-supplied bivariate factorization program. The command is run via
/// `sh -c` with the protocol: stdin gets one line `factor_bivariate x t`
/// followed by the polynomial in the text grammar; stdout must contain one
/// factor per line in the same grammar, the first line being the
/// integer-times-t-content term.
#[derive(Clone, Debug)]
pub struct ExternalBackend {
    pub cmd: String,
    pub timeout: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendFailure {
    Spawn(String),
    Timeout,
    NonzeroExit(Option<i32>),
    Parse(String),
    Verify,
}

impl std::fmt::Display for BackendFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BackendFailure::Spawn(e) => write!(f, "backend spawn failed: {e}"),
            BackendFailure::Timeout => write!(f, "backend timed out"),
            BackendFailure::NonzeroExit(c) => write!(f, "backend exit status {c:?}"),
            BackendFailure::Parse(e) => write!(f, "backend output parse error: {e}"),
            BackendFailure::Verify => write!(f, "backend output failed verification"),
        }
    }
}

/// Backend failure carrying the built-in fallback result.
#[derive(Debug)]
pub struct BackendError {
    pub failure: BackendFailure,
    pub fallback: Result<BiFactorization, BiFactorError>,
}

impl std::fmt::Display for BackendError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (built-in fallback computed)", self.failure)
    }
}

/// Which factorizer the driver should use.
#[derive(Clone, Debug, Default)]
pub enum Backend {
    #[default]
    Builtin,
    External(ExternalBackend),
}

/// Run the external backend and verify its answer by multiplying back; on
/// any failure the error carries the built-in result as the fallback.
pub fn factor_bivariate_external(
    f: &BiPoly,
    backend: &ExternalBackend,
) -> Result<BiFactorization, BackendError> {
    let fail = |failure: BackendFailure| BackendError { failure, fallback: factor_bivariate(f) };
    let output = match run_backend_process(f, backend) {
        Ok(o) => o,
        Err(failure) => return Err(fail(failure)),
    };
    match parse_backend_output(f, &output) {
        Ok(fac) => Ok(fac),
        Err(failure) => Err(fail(failure)),
    }
}

/// Dispatch on the configured backend, falling back to the built-in result
/// when the external one fails; the second element reports a backend
/// failure that was papered over.
pub fn factor_with_backend(
    f: &BiPoly,
    backend: &Backend,
) -> Result<(BiFactorization, Option<BackendFailure>), BiFactorError> {
    match backend {
        Backend::Builtin => factor_bivariate(f).map(|r| (r, None)),
        Backend::External(be) => match factor_bivariate_external(f, be) {
            Ok(r) => Ok((r, None)),
            Err(BackendError { failure, fallback }) => fallback.map(|r| (r, Some(failure))),
        },
    }
}

fn run_backend_process(f: &BiPoly, backend: &ExternalBackend) -> Result<String, BackendFailure> {
    use std::process::{Command, Stdio};
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&backend.cmd)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| BackendFailure::Spawn(e.to_string()))?;

    let input = format!("factor_bivariate x t\n{}\n", format_bipoly(f));
    let mut stdin = child.stdin.take().unwrap();
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().unwrap();
    let reader = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout.read_to_string(&mut buf);
        buf
    });

    let deadline = std::time::Instant::now() + backend.timeout;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if std::time::Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    let _ = writer.join();
                    let _ = reader.join();
                    return Err(BackendFailure::Timeout);
                }
                std::thread::sleep(Duration::from_millis(10));
            }
            Err(e) => return Err(BackendFailure::Spawn(e.to_string())),
        }
    };
    let _ = writer.join();
    let out = reader.join().unwrap_or_default();
    if !status.success() {
        return Err(BackendFailure::NonzeroExit(status.code()));
    }
    Ok(out)
}

fn parse_backend_output(f: &BiPoly, output: &str) -> Result<BiFactorization, BackendFailure> {
    let lines: Vec<&str> = output.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(BackendFailure::Parse("empty output".into()));
    }
    let mut polys = Vec::with_capacity(lines.len());
    for l in &lines {
        polys.push(parse_bipoly(l).map_err(|e| BackendFailure::Parse(e.to_string()))?);
    }
    let content_line = polys.remove(0);
    if content_line.degree_x() != 0 {
        return Err(BackendFailure::Parse("first line must be the t-content term".into()));
    }
    // renormalize into the canonical shape, then verify exactness
    let mut unit: i8 = 1;
    let (cs, content_abs) = content_line.normalize_sign();
    unit *= cs;
    let mut content_uni = UniPoly::from_sparse(
        &content_abs
            .terms()
            .iter()
            .map(|(_, t, c)| (*t as usize, c.clone()))
            .collect::<Vec<_>>(),
    );
    let mut factors = Vec::with_capacity(polys.len());
    for p in polys {
        if p.is_zero() {
            return Err(BackendFailure::Parse("zero factor line".into()));
        }
        let c = p.content_t();
        let prim = p.div_content_t(&c);
        let (s, prim) = prim.normalize_sign();
        unit *= s;
        content_uni = content_uni.mul(&c);
        if !prim.is_one() {
            factors.push(prim);
        }
    }
    let content_t = BiPoly::from_terms(
        content_uni
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| (0, t as Exp, c.clone()))
            .collect(),
    );
    let fac = BiFactorization { unit, content_t, factors: sort_factors(factors) };
    if fac.expand() != *f {
        return Err(BackendFailure::Verify);
    }
    Ok(fac)
}
