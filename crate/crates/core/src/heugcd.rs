//! Heuristic gcd of sparse multivariate integer polynomials.
//!
//! One variable per level is evaluated at a large integer z, the gcd of the
//! images is computed recursively, and a candidate divisor is read back off
//! the base-z digits with symmetric remainders. Every candidate is verified
//! by exact division into both inputs, so a returned divisor is always a
//! true common divisor; failure after the retry budget is reported as
//! `HeuristicFailure` and never as wrong mathematics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::multipoly::{Exp, MultiPoly};

/// Retry budget per recursion level, per the driver's configuration story:
/// z starts at 2*min(height(a), height(b)) + 2 and doubles per retry.
const MAX_RETRIES: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicFailure;

impl std::fmt::Display for HeuristicFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "heuristic gcd failed after retry budget")
    }
}

impl std::error::Error for HeuristicFailure {}

/// Heuristic gcd. The result divides both inputs exactly (verified before
/// returning) and carries the integer content gcd; its sign is normalized
/// to a positive leading coefficient.
pub fn heu_gcd(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, HeuristicFailure> {
    assert_eq!(a.vars(), b.vars(), "gcd operands over different variable lists");
    if a.is_zero() {
        return Ok(abs_poly(b));
    }
    if b.is_zero() {
        return Ok(abs_poly(a));
    }
    let (_, ca, pa) = a.integer_content_and_sign();
    let (_, cb, pb) = b.integer_content_and_sign();
    let ic = ca.gcd(&cb);

    // each input's own monomial content comes off first;
    // gcd(m*p, n*q) = gcd(m, n) * gcd(p, q) once p and q are monomial-free
    let mins_a = monomial_content(&pa);
    let mins_b = monomial_content(&pb);
    let pa = divide_monomial(&pa, &mins_a);
    let pb = divide_monomial(&pb, &mins_b);
    let mins: Vec<Exp> = mins_a
        .iter()
        .zip(mins_b.iter())
        .map(|(&x, &y)| x.min(y))
        .collect();

    let core = gcd_primitive(&pa, &pb)?;
    let mono = MultiPoly::from_terms(a.vars().to_vec(), vec![(ic, mins)]);
    Ok(core.mul(&mono))
}

fn monomial_content(p: &MultiPoly) -> Vec<Exp> {
    let mut mins = vec![Exp::MAX; p.nvars()];
    for (_, e) in p.terms() {
        for (i, &x) in e.iter().enumerate() {
            mins[i] = mins[i].min(x);
        }
    }
    mins
}

fn abs_poly(p: &MultiPoly) -> MultiPoly {
    if p.is_zero() {
        return p.clone();
    }
    let (unit, _, _) = p.integer_content_and_sign();
    if unit < 0 {
        p.neg()
    } else {
        p.clone()
    }
}

fn divide_monomial(p: &MultiPoly, mins: &[Exp]) -> MultiPoly {
    if mins.iter().all(|&m| m == 0) {
        return p.clone();
    }
    let raw = p
        .terms()
        .iter()
        .map(|(c, e)| {
            (
                c.clone(),
                e.iter().zip(mins.iter()).map(|(&x, &m)| x - m).collect(),
            )
        })
        .collect();
    MultiPoly::from_terms(p.vars().to_vec(), raw)
}

/// Gcd of primitive inputs with trivial common monomial part.
fn gcd_primitive(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, HeuristicFailure> {
    if a == b {
        return Ok(abs_poly(a));
    }
    if a.is_constant() || b.is_constant() {
        // primitive constants are +-1
        return Ok(MultiPoly::one(a.vars().to_vec()));
    }
    // length-guarded direct divisibility checks
    if a.num_terms() <= b.num_terms() {
        if b.exact_div(a).is_some() {
            return Ok(abs_poly(a));
        }
    } else if a.exact_div(b).is_some() {
        return Ok(abs_poly(b));
    }

    let var = match (0..a.nvars()).rev().find(|&v| a.degree(v) > 0 || b.degree(v) > 0) {
        Some(v) => v,
        None => return Ok(MultiPoly::one(a.vars().to_vec())),
    };

    let ha = a.height();
    let hb = b.height();
    let mut z: BigInt = BigInt::from(2) * ha.min(hb) + 2;
    for _ in 0..MAX_RETRIES {
        if let Some(g) = try_at(a, b, var, &z) {
            return Ok(g);
        }
        z *= 2;
    }
    Err(HeuristicFailure)
}

fn try_at(a: &MultiPoly, b: &MultiPoly, var: usize, z: &BigInt) -> Option<MultiPoly> {
    // evaluation size guard; a blown budget counts as an unlucky z
    let d = a.degree(var).max(b.degree(var)) as u64;
    if z.bits().saturating_mul(d + 1) > 4_000_000 {
        return None;
    }
    let ia = a.eval_var(var, z);
    let ib = b.eval_var(var, z);
    if ia.is_zero() || ib.is_zero() {
        return None;
    }
    let g = if ia.is_constant() && ib.is_constant() {
        let ga = constant_of(&ia);
        let gb = constant_of(&ib);
        MultiPoly::constant(a.vars().to_vec(), ga.gcd(&gb))
    } else {
        heu_gcd(&ia, &ib).ok()?
    };
    let cand = interpolate_digits(&g, var, z);
    if cand.is_zero() {
        return None;
    }
    let (_, _, cand) = cand.integer_content_and_sign();
    if a.exact_div(&cand).is_some() && b.exact_div(&cand).is_some() {
        Some(cand)
    } else {
        None
    }
}

fn constant_of(p: &MultiPoly) -> BigInt {
    p.terms().first().map(|(c, _)| c.clone()).unwrap_or_else(BigInt::zero)
}

/// Rebuild the dependence on `var` from base-z digits with symmetric
/// remainders.
fn interpolate_digits(g: &MultiPoly, var: usize, z: &BigInt) -> MultiPoly {
    let half = z / 2;
    let mut rest = g.clone();
    let mut raw: Vec<(BigInt, Vec<Exp>)> = Vec::new();
    let mut power: Exp = 0;
    while !rest.is_zero() {
        if power as u64 >= 1 << 31 {
            return MultiPoly::zero(g.vars().to_vec());
        }
        let mut digit_terms = Vec::new();
        let mut next_terms = Vec::new();
        for (c, e) in rest.terms() {
            let mut d = c.mod_floor(z);
            if d > half {
                d -= z;
            }
            let up = (c - &d) / z;
            if !d.is_zero() {
                let mut e2 = e.clone();
                e2[var] = power;
                digit_terms.push((d, e2));
            }
            if !up.is_zero() {
                next_terms.push((up, e.clone()));
            }
        }
        raw.extend(digit_terms);
        rest = MultiPoly::from_terms(g.vars().to_vec(), next_terms);
        power += 1;
    }
    MultiPoly::from_terms(g.vars().to_vec(), raw)
}
