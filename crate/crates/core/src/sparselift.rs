//! Reconstruction of sparse multivariate factors from bivariate
//! factorizations.
//!
//! The driver substitutes t^{e_i} for every non-main variable, factors the
//! base image at all-ones weights, then probes one variable at a time with
//! weights 2, 3, ... and matches normalized factor skeletons across
//! evaluations. Matched monomials are paired by x power and then by
//! coefficient, and the per-variable exponents drop out of t-degree
//! differences. Unlucky evaluations (merged monomials, changed supports,
//! inexact lc quotients) are detected and retried; coefficient ties are
//! broken by dilating variables by small constants.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bifactor::{factor_with_backend, Backend, BiFactorError};
use crate::bipoly::{weighted_substitute, BiPoly, SubstitutionWeights};
use crate::heugcd::heu_gcd;
use crate::multipoly::{undilate_coefficient, DilationScales, Exp, MultiPoly};
use crate::unifactor::factor_univariate;
use crate::unipoly::UniPoly;

/// Driver configuration, surfaced through the CLI and environment.
#[derive(Clone, Debug)]
pub struct Config {
    /// Largest probe weight tried per variable.
    pub jmax: u32,
    /// Dilation redraw budget when coefficient ties or collided images
    /// block the base evaluation.
    pub max_dilations: u32,
    /// Seed for dilation scale draws.
    pub seed: u64,
    /// Bivariate factorization backend.
    pub backend: Backend,
    /// Override for the main variable (by name).
    pub main_var: Option<String>,
    /// Reserved; v1 always verifies factorizations before returning them.
    pub verify: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            jmax: 6,
            max_dilations: 8,
            seed: 0,
            backend: Backend::Builtin,
            main_var: None,
            verify: true,
        }
    }
}

/// Why a run gave the input back unfactored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FallbackReason {
    NotXDistinct,
    CoefficientTiesPersist,
    RetriesExhausted,
    VerificationFailed,
    HeuristicGcdFailed,
    NotSquarefree,
}

impl std::fmt::Display for FallbackReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FallbackReason::NotXDistinct => "NotXDistinct",
            FallbackReason::CoefficientTiesPersist => "CoefficientTiesPersist",
            FallbackReason::RetriesExhausted => "RetriesExhausted",
            FallbackReason::VerificationFailed => "VerificationFailed",
            FallbackReason::HeuristicGcdFailed => "HeuristicGcdFailed",
            FallbackReason::NotSquarefree => "NotSquarefree",
        };
        write!(f, "{s}")
    }
}

/// Run bookkeeping reported alongside every outcome.
#[derive(Clone, Debug, Default)]
pub struct RunStats {
    /// Total bivariate factorization calls.
    pub bifactor_calls: u32,
    /// Per variable, probe weights that did not complete the variable.
    pub retries: BTreeMap<String, Vec<u32>>,
    /// Per variable, the weight whose evaluation completed it.
    pub success_weights: BTreeMap<String, u32>,
    /// Dilation redraws performed (0 = the first, undilated pass worked).
    pub dilation_passes: u32,
    /// Reference skeleton replacements by richer evaluations.
    pub restarts: u32,
    /// Term counts of the final matched base skeletons.
    pub base_skeleton_terms: Vec<usize>,
    /// External backend failures papered over by the built-in factorizer.
    pub backend_fallbacks: u32,
    pub elapsed: Duration,
}

/// Exact factorization: unit * content * product(factors) = input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: i8,
    pub content: BigInt,
    pub factors: Vec<MultiPoly>,
}

impl Factorization {
    pub fn expand(&self, vars: &[String]) -> MultiPoly {
        let mut acc =
            MultiPoly::constant(vars.to_vec(), BigInt::from(self.unit) * &self.content);
        for f in &self.factors {
            acc = acc.mul(&f.align_vars(vars).expect("factor variables"));
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Factored(Factorization),
    Fallback(FallbackReason),
}

#[derive(Clone, Debug)]
pub struct SparseFactorReport {
    pub outcome: Outcome,
    pub stats: RunStats,
}

/// The variable of smallest positive partial degree; ties break toward the
/// smallest index.
pub fn choose_main_variable(p: &MultiPoly) -> usize {
    assert!(!p.is_constant(), "main variable of a constant");
    (0..p.nvars())
        .filter_map(|v| {
            let d = p.degree(v);
            if d > 0 {
                Some((d, v))
            } else {
                None
            }
        })
        .min()
        .map(|(_, v)| v)
        .expect("non-constant polynomial has a variable")
}

// ---------------------------------------------------------------------------
// skeletons
// ---------------------------------------------------------------------------

/// One monomial of a normalized bivariate factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkelTerm {
    pub xdeg: Exp,
    pub tdeg: Exp,
    pub coeff: BigInt,
}

/// Normalized factor as an ordered term list: x power descending, then
/// coefficient ascending. The t powers deliberately do not participate in
/// the order; they differ across evaluations while the (x power,
/// coefficient) pairs persist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSkeleton {
    terms: Vec<SkelTerm>,
}

impl FactorSkeleton {
    pub fn from_bipoly(f: &BiPoly) -> Self {
        let mut terms: Vec<SkelTerm> = f
            .terms()
            .iter()
            .map(|(x, t, c)| SkelTerm { xdeg: *x, tdeg: *t, coeff: c.clone() })
            .collect();
        terms.sort_by(|a, b| b.xdeg.cmp(&a.xdeg).then_with(|| a.coeff.cmp(&b.coeff)));
        FactorSkeleton { terms }
    }

    pub fn terms(&self) -> &[SkelTerm] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Occurring x powers with their term counts, descending.
    pub fn xsupport(&self) -> Vec<(Exp, usize)> {
        let mut out: Vec<(Exp, usize)> = Vec::new();
        for t in &self.terms {
            match out.last_mut() {
                Some((x, n)) if *x == t.xdeg => *n += 1,
                _ => out.push((t.xdeg, 1)),
            }
        }
        out
    }

    pub fn xdeg_set(&self) -> Vec<Exp> {
        self.xsupport().into_iter().map(|(x, _)| x).collect()
    }

    /// Term index ranges of the x-degree classes, in skeleton order.
    fn class_ranges(&self) -> Vec<(Exp, std::ops::Range<usize>)> {
        let mut out = Vec::new();
        let mut start = 0usize;
        for i in 1..=self.terms.len() {
            if i == self.terms.len() || self.terms[i].xdeg != self.terms[start].xdeg {
                out.push((self.terms[start].xdeg, start..i));
                start = i;
            }
        }
        out
    }

    /// True when two terms of the same x-degree class carry the same
    /// coefficient; such skeletons cannot be paired across evaluations and
    /// call for dilation.
    pub fn has_coefficient_ties(&self) -> bool {
        self.terms
            .windows(2)
            .any(|w| w[0].xdeg == w[1].xdeg && w[0].coeff == w[1].coeff)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnluckyEvaluation(pub String);

impl std::fmt::Display for UnluckyEvaluation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unlucky evaluation: {}", self.0)
    }
}

/// A factor scaled so all evaluations of one true factor share the leading
/// coefficient of the input's image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedFactor {
    pub skeleton: FactorSkeleton,
    /// The exact quotient lc(P)-image / lc_x(f) in Z[t].
    pub normalizer: UniPoly,
}

/// Multiply `f` by lc(P)-image / lc_x(f); an inexact quotient marks the
/// evaluation as unlucky (the lc structure merged or degraded).
pub fn normalize_factor(
    f: &BiPoly,
    lc_img: &UniPoly,
) -> Result<NormalizedFactor, UnluckyEvaluation> {
    let lcf = f.lc_x();
    let q = lc_img
        .exact_div(&lcf)
        .ok_or_else(|| UnluckyEvaluation("inexact lc quotient".into()))?;
    let skeleton = FactorSkeleton::from_bipoly(&f.mul_tpoly(&q));
    Ok(NormalizedFactor { skeleton, normalizer: q })
}

/// Outcome of comparing a matched skeleton pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountCmp {
    Equal,
    EvalPoorer,
    EvalRicher,
}

/// Equal iff the x supports (with per-class term counts) coincide;
/// otherwise the side with fewer total terms lost monomials to collisions.
pub fn compare_counts(base: &FactorSkeleton, eval: &FactorSkeleton) -> CountCmp {
    if base.xsupport() == eval.xsupport() {
        CountCmp::Equal
    } else if eval.num_terms() > base.num_terms() {
        CountCmp::EvalRicher
    } else {
        CountCmp::EvalPoorer
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchOutcome {
    /// pairing[i] = index of the evaluation skeleton matching base factor i.
    Pairing(Vec<usize>),
    /// Two base factors share an x support; the method cannot isolate them.
    NotXDistinct,
    /// No unambiguous bijection exists for this evaluation.
    NoBijection,
}

/// Pair evaluation skeletons with base skeletons by x support. Exact
/// (support, counts) matches pair first. Leftovers arise when an
/// evaluation collided (poorer) or when the base itself was collided and
/// the evaluation is richer; a single leftover pair is unambiguous, and a
/// block of leftovers pairs only when every evaluation skeleton is richer
/// than every base skeleton (then all of them get replaced and the slot
/// assignment is immaterial).
pub fn match_by_x_support(base: &[FactorSkeleton], eval: &[FactorSkeleton]) -> MatchOutcome {
    if base.len() != eval.len() {
        return MatchOutcome::NoBijection;
    }
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            if base[i].xsupport() == base[j].xsupport() {
                return MatchOutcome::NotXDistinct;
            }
        }
    }
    // the top x degree of a factor survives every evaluation (its
    // coefficient is the lc image), so factors pair inside degree groups
    let n = base.len();
    let mut pairing: Vec<Option<usize>> = vec![None; n];
    let mut taken = vec![false; n];
    let mut degrees: Vec<Exp> = base.iter().map(|s| s.terms()[0].xdeg).collect();
    degrees.sort_unstable();
    degrees.dedup();
    for d in degrees {
        let group_base: Vec<usize> = (0..n).filter(|&i| base[i].terms()[0].xdeg == d).collect();
        let group_eval: Vec<usize> =
            (0..n).filter(|&i| eval[i].terms()[0].xdeg == d).collect();
        if group_base.len() != group_eval.len() {
            return MatchOutcome::NoBijection;
        }
        for &bi in &group_base {
            for &ei in &group_eval {
                if !taken[ei] && base[bi].xsupport() == eval[ei].xsupport() {
                    pairing[bi] = Some(ei);
                    taken[ei] = true;
                    break;
                }
            }
        }
        let left_base: Vec<usize> =
            group_base.iter().copied().filter(|&bi| pairing[bi].is_none()).collect();
        let left_eval: Vec<usize> =
            group_eval.iter().copied().filter(|&ei| !taken[ei]).collect();
        match left_base.len() {
            0 => {}
            1 => {
                pairing[left_base[0]] = Some(left_eval[0]);
                taken[left_eval[0]] = true;
            }
            _ => {
                // ambiguity is harmless only when every leftover pair is a
                // richer replacement (then all slots get new references and
                // the assignment is immaterial)
                let all_richer = left_base.iter().all(|&bi| {
                    left_eval
                        .iter()
                        .all(|&ei| eval[ei].num_terms() > base[bi].num_terms())
                });
                if !all_richer {
                    return MatchOutcome::NoBijection;
                }
                for (&bi, &ei) in left_base.iter().zip(left_eval.iter()) {
                    pairing[bi] = Some(ei);
                    taken[ei] = true;
                }
            }
        }
    }
    MatchOutcome::Pairing(pairing.into_iter().map(|x| x.unwrap()).collect())
}

/// Recover one variable's exponents from a matched skeleton pair. Terms
/// pair positionally inside each x-degree class (both sides sorted by
/// coefficient); exponent = (eval tdeg - base tdeg - adjust) / divisor,
/// where `adjust` carries contributions of already-known columns when the
/// reference weights are not all ones. Every exponent must come out a
/// non-negative integer at most `cap`.
pub fn reconstruct_variable(
    base: &FactorSkeleton,
    eval: &FactorSkeleton,
    divisor: i64,
    adjust: &[i64],
    cap: Exp,
) -> Result<Vec<Exp>, UnluckyEvaluation> {
    assert!(divisor != 0, "probe weight equals reference weight");
    assert_eq!(adjust.len(), base.num_terms());
    if base.num_terms() != eval.num_terms() {
        return Err(UnluckyEvaluation("term count mismatch".into()));
    }
    let bclasses = base.class_ranges();
    let eclasses = eval.class_ranges();
    if bclasses.len() != eclasses.len() {
        return Err(UnluckyEvaluation("class count mismatch".into()));
    }
    let mut out = vec![0; base.num_terms()];
    for ((bx, br), (ex, er)) in bclasses.into_iter().zip(eclasses) {
        if bx != ex || br.len() != er.len() {
            return Err(UnluckyEvaluation("x support mismatch".into()));
        }
        for (ib, ie) in br.clone().zip(er) {
            let bt = &base.terms[ib];
            let et = &eval.terms[ie];
            if bt.coeff != et.coeff {
                return Err(UnluckyEvaluation("coefficient multiset mismatch".into()));
            }
            if ib + 1 < br.end && base.terms[ib + 1].coeff == bt.coeff {
                return Err(UnluckyEvaluation("coefficient tie".into()));
            }
            let num = et.tdeg as i64 - bt.tdeg as i64 - adjust[ib];
            if num % divisor != 0 {
                return Err(UnluckyEvaluation("non-integral exponent".into()));
            }
            let e = num / divisor;
            if e < 0 || e > cap as i64 {
                return Err(UnluckyEvaluation("exponent out of range".into()));
            }
            out[ib] = e as Exp;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// reconstruction state
// ---------------------------------------------------------------------------

/// Per-factor reference: the skeleton being matched against, the weights it
/// was computed at, and the partially filled exponent columns.
#[derive(Clone, Debug)]
pub struct FactorState {
    pub skeleton: FactorSkeleton,
    pub ref_weights: SubstitutionWeights,
    /// exps[term][var]; the main column stays None (x powers live in the
    /// skeleton).
    pub exps: Vec<Vec<Option<Exp>>>,
}

impl FactorState {
    fn new(skeleton: FactorSkeleton, weights: SubstitutionWeights, nvars: usize) -> Self {
        let exps = vec![vec![None; nvars]; skeleton.num_terms()];
        FactorState { skeleton, ref_weights: weights, exps }
    }

    fn column_set(&self, var: usize) -> bool {
        self.exps.iter().all(|row| row[var].is_some())
    }

    fn set_column(&mut self, var: usize, vals: &[Exp]) {
        for (row, &v) in self.exps.iter_mut().zip(vals.iter()) {
            row[var] = Some(v);
        }
    }

    fn zero_columns(&mut self, vars: &[usize]) {
        for row in &mut self.exps {
            for &v in vars {
                row[v] = Some(0);
            }
        }
    }
}

/// Whole-run reconstruction state.
#[derive(Clone, Debug)]
pub struct ReconstructionState {
    pub factors: Vec<FactorState>,
    pub main: usize,
    pub scales: DilationScales,
    /// Non-main variables that occur in the input, ascending.
    pub probe_vars: Vec<usize>,
    /// Factor left to exact division instead of skeleton reconstruction.
    /// A non-monomial lc normalizer folds extra monomials into a skeleton
    /// and its image collides differently at every weight, so the factor
    /// with the heaviest normalizer is recovered as the cofactor.
    pub victim: Option<usize>,
}

/// Build the candidate factors from filled columns, undilate, strip the
/// main-variable content, fix signs, and verify by exact division into the
/// primitive input; the victim factor, when present, is the final quotient.
pub fn assemble_factors(
    state: &ReconstructionState,
    p_prim: &MultiPoly,
) -> Result<Vec<MultiPoly>, FallbackReason> {
    let vars = p_prim.vars().to_vec();
    let nvars = vars.len();
    let main = state.main;
    let mut rem = p_prim.clone();
    let mut out = Vec::with_capacity(state.factors.len());
    for (fi, fs) in state.factors.iter().enumerate() {
        if state.victim == Some(fi) {
            continue;
        }
        let mut raw = Vec::with_capacity(fs.skeleton.num_terms());
        for (idx, term) in fs.skeleton.terms().iter().enumerate() {
            let mut exps = vec![0; nvars];
            exps[main] = term.xdeg;
            let mut weighted: i64 = 0;
            for (v, slot) in exps.iter_mut().enumerate() {
                if v == main {
                    continue;
                }
                let e = fs.exps[idx][v].ok_or(FallbackReason::VerificationFailed)?;
                *slot = e;
                weighted += fs.ref_weights.weight(v) as i64 * e as i64;
            }
            // weighted t-degree conservation per term
            if weighted != term.tdeg as i64 {
                return Err(FallbackReason::VerificationFailed);
            }
            let c = undilate_coefficient(&term.coeff, &exps, &state.scales)
                .ok_or(FallbackReason::VerificationFailed)?;
            raw.push((c, exps));
        }
        let g = MultiPoly::from_terms(vars.clone(), raw);
        if g.is_zero() {
            return Err(FallbackReason::VerificationFailed);
        }
        // g is the lc-multiple of the true factor; strip the main-variable
        // content
        let content = match main_var_content(&g, main) {
            Ok(c) => c,
            Err(_) => return Err(FallbackReason::HeuristicGcdFailed),
        };
        let f = match g.exact_div(&content) {
            Some(f) => f,
            None => return Err(FallbackReason::VerificationFailed),
        };
        let (_, _, f) = f.integer_content_and_sign();
        // exactness: every reconstructed factor must divide what is left
        rem = match rem.exact_div(&f) {
            Some(q) => q,
            None => return Err(FallbackReason::VerificationFailed),
        };
        out.push(f);
    }
    if state.victim.is_some() {
        if rem.is_constant() {
            return Err(FallbackReason::VerificationFailed);
        }
        let (u, c, f) = rem.integer_content_and_sign();
        if u < 0 || !c.is_one() {
            return Err(FallbackReason::VerificationFailed);
        }
        out.push(f);
    } else if !rem.is_one() {
        return Err(FallbackReason::VerificationFailed);
    }
    out.sort_by(canonical_cmp);
    Ok(out)
}

/// Content with respect to the main variable: the gcd of the x-coefficient
/// polynomials, chained smallest-first so it collapses early.
fn main_var_content(
    p: &MultiPoly,
    main: usize,
) -> Result<MultiPoly, crate::heugcd::HeuristicFailure> {
    let mut coeffs = p.x_coefficients(main);
    coeffs.sort_by_key(|(_, c)| c.num_terms());
    let mut content: Option<MultiPoly> = None;
    for (_, c) in &coeffs {
        content = Some(match content {
            None => c.clone(),
            Some(acc) => heu_gcd(&acc, c)?,
        });
        if content.as_ref().is_some_and(|c| c.is_one()) {
            break;
        }
    }
    Ok(content.expect("nonzero polynomial has coefficients"))
}

pub(crate) fn canonical_cmp(a: &MultiPoly, b: &MultiPoly) -> std::cmp::Ordering {
    (a.total_degree(), a.num_terms())
        .cmp(&(b.total_degree(), b.num_terms()))
        .then_with(|| a.terms().cmp(b.terms()))
}

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

fn lc_image(p: &MultiPoly, main: usize, w: &SubstitutionWeights) -> UniPoly {
    let lc = p.leading_coefficient_wrt(main);
    let img = weighted_substitute(&lc, w);
    debug_assert_eq!(img.degree_x(), 0);
    UniPoly::from_sparse(
        &img.terms()
            .iter()
            .map(|(_, t, c)| (*t as usize, c.clone()))
            .collect::<Vec<_>>(),
    )
}

/// Factor a sparse multivariate polynomial (at least three occurring
/// variables) by the substitution / skeleton-matching / reconstruction
/// method. Every success multiplies back to the input exactly; every
/// non-success names its fallback reason.
pub fn sparse_factor(p: &MultiPoly, cfg: &Config) -> SparseFactorReport {
    let t0 = Instant::now();
    let mut stats = RunStats::default();
    let outcome = sparse_factor_inner(p, cfg, &mut stats);
    stats.elapsed = t0.elapsed();
    SparseFactorReport { outcome, stats }
}

fn sparse_factor_inner(p: &MultiPoly, cfg: &Config, stats: &mut RunStats) -> Outcome {
    assert!(!p.is_zero(), "factoring the zero polynomial");
    let vars = p.vars().to_vec();
    let (unit, content, mut prim) = p.integer_content_and_sign();
    let mut mono_factors: Vec<MultiPoly> = Vec::new();

    for v in 0..prim.nvars() {
        let m = prim.min_degree(v);
        if m > 0 {
            let raw = prim
                .terms()
                .iter()
                .map(|(c, e)| {
                    let mut e2 = e.clone();
                    e2[v] -= m;
                    (c.clone(), e2)
                })
                .collect();
            prim = MultiPoly::from_terms(vars.clone(), raw);
            for _ in 0..m {
                mono_factors.push(MultiPoly::var(vars.clone(), v));
            }
        }
    }

    if prim.is_constant() {
        mono_factors.sort_by(canonical_cmp);
        return Outcome::Factored(Factorization { unit, content, factors: mono_factors });
    }

    let occurring: Vec<usize> = (0..prim.nvars()).filter(|&v| prim.degree(v) > 0).collect();
    if occurring.len() < 3 {
        // monomial extraction can leave a small core; hand it to the
        // dedicated factorizers
        let sub = match occurring.len() {
            1 => factor_univariate_dispatch(&prim, occurring[0]),
            _ => factor_bivariate_dispatch(&prim, occurring[0], occurring[1], cfg, stats),
        };
        return match sub {
            Outcome::Factored(f) => {
                let mut factors = f.factors;
                factors.extend(mono_factors);
                factors.sort_by(canonical_cmp);
                let unit = unit * f.unit;
                let content = content * f.content;
                Outcome::Factored(Factorization { unit, content, factors })
            }
            fb => fb,
        };
    }

    let main = cfg
        .main_var
        .as_ref()
        .and_then(|name| vars.iter().position(|v| v == name))
        .filter(|&v| prim.degree(v) > 0)
        .unwrap_or_else(|| choose_main_variable(&prim));
    let probe_vars: Vec<usize> = occurring.iter().copied().filter(|&v| v != main).collect();
    let degree_caps: Vec<Exp> = (0..prim.nvars()).map(|v| prim.degree(v)).collect();
    let nvars = prim.nvars();
    let absent: Vec<usize> = (0..nvars)
        .filter(|&v| v != main && !probe_vars.contains(&v))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut last_fallback = FallbackReason::NotSquarefree;
    for pass in 0..=cfg.max_dilations {
        let scales = if pass == 0 {
            DilationScales::identity(nvars)
        } else {
            stats.dilation_passes += 1;
            DilationScales::random(nvars, main, &mut rng)
        };
        let pdil = prim.dilate(&scales);
        let pass_ctx = PassContext {
            pdil: &pdil,
            prim: &prim,
            main,
            probe_vars: &probe_vars,
            absent: &absent,
            degree_caps: &degree_caps,
            scales: &scales,
            cfg,
        };
        match run_pass(&pass_ctx, stats) {
            PassResult::Done(factors) => {
                let mut factors = factors;
                factors.extend(mono_factors);
                factors.sort_by(canonical_cmp);
                return Outcome::Factored(Factorization { unit, content, factors });
            }
            PassResult::RetryDilation(reason) => {
                last_fallback = reason;
                continue;
            }
            PassResult::Abort(reason) => return Outcome::Fallback(reason),
        }
    }
    Outcome::Fallback(last_fallback)
}

struct PassContext<'a> {
    pdil: &'a MultiPoly,
    prim: &'a MultiPoly,
    main: usize,
    probe_vars: &'a [usize],
    absent: &'a [usize],
    degree_caps: &'a [Exp],
    scales: &'a DilationScales,
    cfg: &'a Config,
}

enum PassResult {
    Done(Vec<MultiPoly>),
    /// The base evaluation is unusable at these scales; redraw and retry.
    RetryDilation(FallbackReason),
    Abort(FallbackReason),
}

fn run_pass(ctx: &PassContext<'_>, stats: &mut RunStats) -> PassResult {
    let PassContext { pdil, prim, main, probe_vars, absent, degree_caps, scales, cfg } = *ctx;
    let nvars = pdil.nvars();
    let vars = pdil.vars();
    let base_w = SubstitutionWeights::ones(nvars, main);
    let base_img = weighted_substitute(pdil, &base_w);

    stats.bifactor_calls += 1;
    let base_fac = match factor_with_backend(&base_img, &cfg.backend) {
        Ok((fac, note)) => {
            if note.is_some() {
                stats.backend_fallbacks += 1;
            }
            fac
        }
        Err(BiFactorError::NotSquarefree) => {
            return PassResult::RetryDilation(FallbackReason::NotSquarefree)
        }
        Err(BiFactorError::Internal(_)) => {
            return PassResult::RetryDilation(FallbackReason::RetriesExhausted)
        }
    };

    // a main-variable-free factor hides inside the image's t-content and
    // has no x support to isolate it; detect it before trusting factor
    // counts or quotients
    if base_fac.content_t.degree_t() > 0 {
        match main_var_content(prim, main) {
            Ok(c) if c.is_constant() => {}
            Ok(_) => return PassResult::Abort(FallbackReason::NotXDistinct),
            Err(_) => return PassResult::Abort(FallbackReason::HeuristicGcdFailed),
        }
    }

    if base_fac.factors.len() == 1 {
        // an irreducible image certifies irreducibility of the input
        return PassResult::Done(vec![prim.clone()]);
    }

    let lc_base = lc_image(pdil, main, &base_w);
    let mut normalized_base = Vec::with_capacity(base_fac.factors.len());
    for f in &base_fac.factors {
        match normalize_factor(f, &lc_base) {
            Ok(nf) => normalized_base.push(nf),
            Err(_) => return PassResult::RetryDilation(FallbackReason::RetriesExhausted),
        }
    }

    // the heaviest normalizer marks the factor recovered by division
    let victim = normalized_base
        .iter()
        .enumerate()
        .max_by_key(|(i, nf)| (nf.normalizer.num_terms(), nf.skeleton.num_terms(), *i))
        .map(|(i, _)| i)
        .expect("at least two factors");

    let skeletons: Vec<FactorSkeleton> =
        normalized_base.into_iter().map(|nf| nf.skeleton).collect();
    for i in 0..skeletons.len() {
        for j in i + 1..skeletons.len() {
            if skeletons[i].xsupport() == skeletons[j].xsupport() {
                // dilation cannot change x supports
                return PassResult::Abort(FallbackReason::NotXDistinct);
            }
        }
    }
    if skeletons
        .iter()
        .enumerate()
        .any(|(i, s)| i != victim && s.has_coefficient_ties())
    {
        return PassResult::RetryDilation(FallbackReason::CoefficientTiesPersist);
    }

    let k = skeletons.len();
    let mut state = ReconstructionState {
        factors: skeletons
            .into_iter()
            .map(|s| {
                let mut fs = FactorState::new(s, base_w.clone(), nvars);
                fs.zero_columns(absent);
                fs
            })
            .collect(),
        main,
        scales: scales.clone(),
        probe_vars: probe_vars.to_vec(),
        victim: Some(victim),
    };

    let mut probes_log: Vec<(usize, u32)> = Vec::new();
    let mut success: BTreeMap<usize, u32> = BTreeMap::new();
    let mut restart_guard = 0u32;

    let needs_column = |state: &ReconstructionState, fi: usize, kvar: usize| {
        state.victim != Some(fi) && !state.factors[fi].column_set(kvar)
    };

    'outer: loop {
        for &kvar in probe_vars {
            if (0..k).all(|fi| !needs_column(&state, fi, kvar)) {
                continue;
            }
            let mut completed = false;
            for j in 2..=cfg.jmax {
                // useless when every pending factor's reference already
                // sits at this weight
                let usable = (0..k).any(|fi| {
                    needs_column(&state, fi, kvar)
                        && state.factors[fi].ref_weights.weight(kvar) != j
                });
                if !usable {
                    continue;
                }
                let probe_w = SubstitutionWeights::ones(nvars, main).with(kvar, j);
                let img = weighted_substitute(pdil, &probe_w);
                stats.bifactor_calls += 1;
                probes_log.push((kvar, j));
                let fac = match factor_with_backend(&img, &cfg.backend) {
                    Ok((fac, note)) => {
                        if note.is_some() {
                            stats.backend_fallbacks += 1;
                        }
                        fac
                    }
                    Err(_) => continue,
                };
                if fac.factors.len() != k {
                    continue;
                }
                let lc_probe = lc_image(pdil, main, &probe_w);
                let mut normalized = Vec::with_capacity(k);
                let mut bad = false;
                for f in &fac.factors {
                    match normalize_factor(f, &lc_probe) {
                        Ok(nf) => normalized.push(nf.skeleton),
                        Err(_) => {
                            bad = true;
                            break;
                        }
                    }
                }
                if bad {
                    continue;
                }
                let current: Vec<FactorSkeleton> =
                    state.factors.iter().map(|f| f.skeleton.clone()).collect();
                let pairing = match match_by_x_support(&current, &normalized) {
                    MatchOutcome::Pairing(p) => p,
                    MatchOutcome::NotXDistinct => {
                        return PassResult::Abort(FallbackReason::NotXDistinct)
                    }
                    MatchOutcome::NoBijection => continue,
                };

                // richer evaluations replace their reference skeletons; the
                // positional term pairings of the replaced factor are
                // invalidated, so its columns are cleared. The victim's
                // reference is kept current for pairing but never carries
                // columns, so replacing it needs no restart.
                let mut replaced = false;
                for (bi, &ei) in pairing.iter().enumerate() {
                    if compare_counts(&state.factors[bi].skeleton, &normalized[ei])
                        != CountCmp::EvalRicher
                    {
                        continue;
                    }
                    if state.victim == Some(bi) {
                        state.factors[bi].skeleton = normalized[ei].clone();
                        state.factors[bi].ref_weights = probe_w.clone();
                        state.factors[bi].exps =
                            vec![vec![None; nvars]; normalized[ei].num_terms()];
                        continue;
                    }
                    if normalized[ei].has_coefficient_ties() {
                        // the richer skeleton is the true picture of this
                        // factor, and its ties are weight independent; only
                        // dilation can break them
                        return PassResult::RetryDilation(
                            FallbackReason::CoefficientTiesPersist,
                        );
                    }
                    let nterms = normalized[ei].num_terms();
                    state.factors[bi].skeleton = normalized[ei].clone();
                    state.factors[bi].ref_weights = probe_w.clone();
                    state.factors[bi].exps = vec![vec![None; nvars]; nterms];
                    state.factors[bi].zero_columns(absent);
                    stats.restarts += 1;
                    replaced = true;
                }
                if replaced {
                    for a in 0..state.factors.len() {
                        for b in a + 1..state.factors.len() {
                            if state.factors[a].skeleton.xsupport()
                                == state.factors[b].skeleton.xsupport()
                            {
                                return PassResult::Abort(FallbackReason::NotXDistinct);
                            }
                        }
                    }
                    restart_guard += 1;
                    if restart_guard > 64 {
                        return PassResult::Abort(FallbackReason::RetriesExhausted);
                    }
                    success.clear();
                    continue 'outer;
                }

                for (bi, &ei) in pairing.iter().enumerate() {
                    if !needs_column(&state, bi, kvar) {
                        continue;
                    }
                    let fs = &state.factors[bi];
                    if compare_counts(&fs.skeleton, &normalized[ei]) != CountCmp::Equal {
                        continue;
                    }
                    let divisor = j as i64 - fs.ref_weights.weight(kvar) as i64;
                    if divisor == 0 {
                        continue;
                    }
                    // corrections from already-known columns where the
                    // reference weights differ from the probe's
                    let mut adjust = vec![0i64; fs.skeleton.num_terms()];
                    let mut missing = false;
                    'vloop: for v in 0..nvars {
                        if v == main || v == kvar {
                            continue;
                        }
                        let dv = 1i64 - fs.ref_weights.weight(v) as i64;
                        if dv == 0 {
                            continue;
                        }
                        for (idx, row) in fs.exps.iter().enumerate() {
                            match row[v] {
                                Some(e) => adjust[idx] += dv * e as i64,
                                None => {
                                    missing = true;
                                    break 'vloop;
                                }
                            }
                        }
                    }
                    if missing {
                        continue;
                    }
                    if let Ok(col) = reconstruct_variable(
                        &fs.skeleton,
                        &normalized[ei],
                        divisor,
                        &adjust,
                        degree_caps[kvar],
                    ) {
                        state.factors[bi].set_column(kvar, &col);
                    }
                }

                if (0..k).all(|fi| !needs_column(&state, fi, kvar)) {
                    success.insert(kvar, j);
                    completed = true;
                    break;
                }
            }
            if !completed {
                return PassResult::Abort(FallbackReason::RetriesExhausted);
            }
        }
        break;
    }

    // probes that did not complete their variable count as retries; only
    // the last occurrence of the completing weight is the success
    stats.retries.clear();
    stats.success_weights.clear();
    let mut last_success_pos: BTreeMap<usize, usize> = BTreeMap::new();
    for (pos, (kvar, j)) in probes_log.iter().enumerate() {
        if success.get(kvar) == Some(j) {
            last_success_pos.insert(*kvar, pos);
        }
    }
    for (pos, (kvar, j)) in probes_log.iter().enumerate() {
        if last_success_pos.get(kvar) == Some(&pos) {
            continue;
        }
        stats.retries.entry(vars[*kvar].clone()).or_default().push(*j);
    }
    for (kvar, j) in &success {
        stats.success_weights.insert(vars[*kvar].clone(), *j);
    }
    stats.base_skeleton_terms =
        state.factors.iter().map(|f| f.skeleton.num_terms()).collect();

    match assemble_factors(&state, prim) {
        Ok(factors) => PassResult::Done(factors),
        Err(r) => PassResult::Abort(r),
    }
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Factor any nonzero polynomial, dispatching on the number of occurring
/// variables: univariate and bivariate inputs go to the dedicated
/// factorizers, everything else to [`sparse_factor`].
pub fn factor_any(p: &MultiPoly, cfg: &Config) -> SparseFactorReport {
    let t0 = Instant::now();
    let mut stats = RunStats::default();
    let outcome = factor_any_inner(p, cfg, &mut stats);
    stats.elapsed = t0.elapsed();
    SparseFactorReport { outcome, stats }
}

fn factor_any_inner(p: &MultiPoly, cfg: &Config, stats: &mut RunStats) -> Outcome {
    assert!(!p.is_zero(), "factoring the zero polynomial");
    if p.is_constant() {
        let (unit, content, _) = p.integer_content_and_sign();
        return Outcome::Factored(Factorization { unit, content, factors: vec![] });
    }
    let occurring: Vec<usize> = (0..p.nvars()).filter(|&v| p.degree(v) > 0).collect();
    match occurring.len() {
        1 => factor_univariate_dispatch(p, occurring[0]),
        2 => factor_bivariate_dispatch(p, occurring[0], occurring[1], cfg, stats),
        _ => {
            let report = sparse_factor(p, cfg);
            *stats = report.stats.clone();
            report.outcome
        }
    }
}

fn factor_univariate_dispatch(p: &MultiPoly, v: usize) -> Outcome {
    let coeffs: Vec<(usize, BigInt)> = p
        .terms()
        .iter()
        .map(|(c, e)| (e[v] as usize, c.clone()))
        .collect();
    let f = UniPoly::from_sparse(&coeffs);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let fac = factor_univariate(&f, &mut rng);
    let mut factors = Vec::new();
    for (g, m) in &fac.factors {
        let mp = uni_to_multi(g, p.vars(), v);
        for _ in 0..*m {
            factors.push(mp.clone());
        }
    }
    factors.sort_by(canonical_cmp);
    Outcome::Factored(Factorization { unit: fac.unit, content: fac.content, factors })
}

fn uni_to_multi(g: &UniPoly, vars: &[String], v: usize) -> MultiPoly {
    let raw = g
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(d, c)| {
            let mut e = vec![0; vars.len()];
            e[v] = d as Exp;
            (c.clone(), e)
        })
        .collect();
    MultiPoly::from_terms(vars.to_vec(), raw)
}

fn factor_bivariate_dispatch(
    p: &MultiPoly,
    va: usize,
    vb: usize,
    cfg: &Config,
    stats: &mut RunStats,
) -> Outcome {
    // keep the main-variable rule consistent with the driver
    let main = if p.degree(va) <= p.degree(vb) { va } else { vb };
    let tvar = if main == va { vb } else { va };
    let (unit, content, prim) = p.integer_content_and_sign();
    let raw = prim
        .terms()
        .iter()
        .map(|(c, e)| (e[main], e[tvar], c.clone()))
        .collect();
    let f = BiPoly::from_terms(raw);
    stats.bifactor_calls += 1;
    let fac = match factor_with_backend(&f, &cfg.backend) {
        Ok((fac, note)) => {
            if note.is_some() {
                stats.backend_fallbacks += 1;
            }
            fac
        }
        Err(BiFactorError::NotSquarefree) => {
            return Outcome::Fallback(FallbackReason::NotSquarefree)
        }
        Err(BiFactorError::Internal(_)) => {
            return Outcome::Fallback(FallbackReason::VerificationFailed)
        }
    };
    // the bivariate order and the multivariate order can disagree on the
    // leading term; renormalize signs in the output ring
    let mut unit_acc = unit * fac.unit;
    let mut content_acc = content;
    let mut factors: Vec<MultiPoly> = Vec::new();
    for g in &fac.factors {
        let (u, c, f) = bi_to_multi(g, p.vars(), main, tvar).integer_content_and_sign();
        debug_assert!(c.is_one());
        unit_acc *= u;
        factors.push(f);
    }
    if !fac.content_t.is_one() {
        let cuni = UniPoly::from_sparse(
            &fac.content_t
                .terms()
                .iter()
                .map(|(_, t, c)| (*t as usize, c.clone()))
                .collect::<Vec<_>>(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let cfac = factor_univariate(&cuni, &mut rng);
        unit_acc *= cfac.unit;
        content_acc *= cfac.content;
        for (g, m) in &cfac.factors {
            let mp = uni_to_multi(g, p.vars(), tvar);
            for _ in 0..*m {
                factors.push(mp.clone());
            }
        }
    }
    factors.sort_by(canonical_cmp);
    Outcome::Factored(Factorization { unit: unit_acc, content: content_acc, factors })
}

fn bi_to_multi(g: &BiPoly, vars: &[String], main: usize, tvar: usize) -> MultiPoly {
    let raw = g
        .terms()
        .iter()
        .map(|(x, t, c)| {
            let mut e = vec![0; vars.len()];
            e[main] = *x;
            e[tvar] = *t;
            (c.clone(), e)
        })
        .collect();
    MultiPoly::from_terms(vars.to_vec(), raw)
}

// ---------------------------------------------------------------------------
// Kronecker oracle
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    /// Recombination across the packed image was ambiguous.
    Inconclusive,
    /// The packed degree exceeds the small-instance budget.
    TooLarge,
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::Inconclusive => write!(f, "kronecker oracle inconclusive"),
            OracleError::TooLarge => write!(f, "instance too large for the kronecker oracle"),
        }
    }
}

const ORACLE_DEGREE_CAP: u64 = 4096;

/// Small-instance cross-check: pack all variables into one by a mixed-radix
/// Kronecker substitution, factor the univariate image, and unpack subsets
/// of image factors that divide the input and multiply back to it.
pub fn kronecker_oracle(p: &MultiPoly) -> Result<Vec<MultiPoly>, OracleError> {
    assert!(!p.is_zero());
    let vars = p.vars().to_vec();
    let (_, _, mut prim) = p.integer_content_and_sign();
    let mut out: Vec<MultiPoly> = Vec::new();

    for v in 0..prim.nvars() {
        let m = prim.min_degree(v);
        if m > 0 {
            let raw = prim
                .terms()
                .iter()
                .map(|(c, e)| {
                    let mut e2 = e.clone();
                    e2[v] -= m;
                    (c.clone(), e2)
                })
                .collect();
            prim = MultiPoly::from_terms(vars.clone(), raw);
            for _ in 0..m {
                out.push(MultiPoly::var(vars.clone(), v));
            }
        }
    }
    if prim.is_constant() {
        out.sort_by(canonical_cmp);
        return Ok(out);
    }

    let occurring: Vec<usize> = (0..prim.nvars()).filter(|&v| prim.degree(v) > 0).collect();
    if occurring.len() == 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let coeffs: Vec<(usize, BigInt)> = prim
            .terms()
            .iter()
            .map(|(c, e)| (e[occurring[0]] as usize, c.clone()))
            .collect();
        let fac = factor_univariate(&UniPoly::from_sparse(&coeffs), &mut rng);
        for (g, m) in &fac.factors {
            for _ in 0..*m {
                out.push(uni_to_multi(g, &vars, occurring[0]));
            }
        }
        out.sort_by(canonical_cmp);
        return Ok(out);
    }

    // mixed-radix packing: variable i gets stride prod_{l<i} (deg_l + 1)
    let mut strides: Vec<u64> = Vec::with_capacity(occurring.len());
    let mut acc = 1u64;
    for &v in &occurring {
        strides.push(acc);
        acc = acc
            .checked_mul(prim.degree(v) as u64 + 1)
            .ok_or(OracleError::TooLarge)?;
        if acc > ORACLE_DEGREE_CAP {
            return Err(OracleError::TooLarge);
        }
    }
    let radixes: Vec<u64> = occurring.iter().map(|&v| prim.degree(v) as u64 + 1).collect();

    let packed: Vec<(usize, BigInt)> = prim
        .terms()
        .iter()
        .map(|(c, e)| {
            let d: u64 = occurring
                .iter()
                .zip(strides.iter())
                .map(|(&v, &s)| e[v] as u64 * s)
                .sum();
            (d as usize, c.clone())
        })
        .collect();
    let image = UniPoly::from_sparse(&packed);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let ufac = factor_univariate(&image, &mut rng);
    let mut parts: Vec<UniPoly> = Vec::new();
    for (g, m) in &ufac.factors {
        for _ in 0..*m {
            parts.push(g.clone());
        }
    }

    let unpack = |u: &UniPoly| -> MultiPoly {
        let raw = u
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, c)| {
                let mut e = vec![0; vars.len()];
                let mut rest = d as u64;
                for (i, &v) in occurring.iter().enumerate() {
                    e[v] = (rest % radixes[i]) as Exp;
                    rest /= radixes[i];
                }
                (c.clone(), e)
            })
            .collect();
        MultiPoly::from_terms(vars.clone(), raw)
    };

    let mut remaining = prim.clone();
    let mut found: Vec<MultiPoly> = Vec::new();
    'outer: while !parts.is_empty() {
        if remaining.is_constant() {
            break;
        }
        for card in 1..=parts.len() {
            for combo in combinations(parts.len(), card) {
                let mut prod = UniPoly::one();
                for &i in &combo {
                    prod = prod.mul(&parts[i]);
                }
                let cand = unpack(&prod);
                if cand.is_constant() {
                    continue;
                }
                let (_, _, cand) = cand.integer_content_and_sign();
                if let Some(quo) = remaining.exact_div(&cand) {
                    found.push(cand);
                    remaining = quo;
                    parts = parts
                        .into_iter()
                        .enumerate()
                        .filter(|(i, _)| !combo.contains(i))
                        .map(|(_, g)| g)
                        .collect();
                    continue 'outer;
                }
            }
        }
        return Err(OracleError::Inconclusive);
    }
    if !remaining.is_constant() {
        found.push(remaining.integer_content_and_sign().2);
    }
    // the multiset must multiply back to the primitive part
    let mut prod = MultiPoly::one(vars.clone());
    for f in &found {
        prod = prod.mul(f);
    }
    if prod != prim {
        return Err(OracleError::Inconclusive);
    }
    out.extend(found);
    out.sort_by(canonical_cmp);
    Ok(out)
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_bipoly, parse_multipoly};
    use num_traits::One;

    fn poly(s: &str) -> MultiPoly {
        parse_multipoly(s).unwrap()
    }

    fn poly_in(s: &str, vars: &[&str]) -> MultiPoly {
        let vars: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        parse_multipoly(s).unwrap().align_vars(&vars).unwrap()
    }

    #[test]
    fn main_variable_choice() {
        let p = poly("x^3+y^2+z^5");
        assert_eq!(choose_main_variable(&p), 1);
        // tie at degree 1 breaks toward the lower index
        let q = poly("x+y");
        assert_eq!(choose_main_variable(&q), 0);
    }

    #[test]
    fn normalize_monic_is_identity() {
        let f = parse_bipoly("x+t").unwrap();
        let nf = normalize_factor(&f, &UniPoly::one()).unwrap();
        assert!(nf.normalizer.is_one());
        assert_eq!(nf.skeleton.num_terms(), 2);
    }

    #[test]
    fn compare_counts_cases() {
        let a = FactorSkeleton::from_bipoly(&parse_bipoly("x^2+2*t+3*t^2").unwrap());
        let poorer = FactorSkeleton::from_bipoly(&parse_bipoly("x^2+5*t").unwrap());
        assert_eq!(compare_counts(&a, &poorer), CountCmp::EvalPoorer);
        assert_eq!(compare_counts(&poorer, &a), CountCmp::EvalRicher);
        let same = FactorSkeleton::from_bipoly(&parse_bipoly("x^2+2*t^9+3*t").unwrap());
        assert_eq!(compare_counts(&a, &same), CountCmp::Equal);
    }

    #[test]
    fn match_detects_non_distinct() {
        let a = FactorSkeleton::from_bipoly(&parse_bipoly("x+t").unwrap());
        let b = FactorSkeleton::from_bipoly(&parse_bipoly("x+2*t").unwrap());
        assert_eq!(
            match_by_x_support(&[a.clone(), b.clone()], &[a.clone(), b.clone()]),
            MatchOutcome::NotXDistinct
        );
        let c = FactorSkeleton::from_bipoly(&parse_bipoly("x^2+t").unwrap());
        match match_by_x_support(&[a.clone(), c.clone()], &[c.clone(), a.clone()]) {
            MatchOutcome::Pairing(p) => assert_eq!(p, vec![1, 0]),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn reconstruct_simple() {
        // base x + 7t^2; a weight-2 probe moves tdeg 2 -> 4 when the
        // variable's exponent is 2
        let base = FactorSkeleton::from_bipoly(&parse_bipoly("x+7*t^2").unwrap());
        let eval = FactorSkeleton::from_bipoly(&parse_bipoly("x+7*t^4").unwrap());
        let exps = reconstruct_variable(&base, &eval, 1, &[0, 0], 8).unwrap();
        assert_eq!(exps, vec![0, 2]);
        // non-integral quotient is unlucky
        let eval3 = FactorSkeleton::from_bipoly(&parse_bipoly("x+7*t^5").unwrap());
        assert!(reconstruct_variable(&base, &eval3, 2, &[0, 0], 8).is_err());
        // equal tdegs everywhere mean the variable is absent
        let exps = reconstruct_variable(&base, &base, 1, &[0, 0], 8).unwrap();
        assert_eq!(exps, vec![0, 0]);
    }

    #[test]
    fn three_variable_product() {
        let p = poly("(x+y+z)*(x^2+y^2+z^2+x*y*z)");
        let report = sparse_factor(&p, &Config::default());
        match report.outcome {
            Outcome::Factored(f) => {
                assert_eq!(f.unit, 1);
                assert!(f.content.is_one());
                assert_eq!(f.factors.len(), 2);
                assert!(f.factors.contains(&poly_in("x+y+z", &["x", "y", "z"])));
                assert!(f.factors.contains(&poly_in("x^2+y^2+z^2+x*y*z", &["x", "y", "z"])));
                assert_eq!(f.expand(p.vars()), p);
            }
            Outcome::Fallback(r) => panic!("fallback {r}"),
        }
    }

    #[test]
    fn shared_x_support_is_not_recoverable() {
        // x+y+z and x-y+z have the same x-degree pattern {1:1, 0:2}, so the
        // factors cannot be isolated across evaluations
        let p = poly("(x+y+z)*(x-y+z)");
        let report = sparse_factor(&p, &Config::default());
        assert_eq!(report.outcome, Outcome::Fallback(FallbackReason::NotXDistinct));
        // the expansion itself is still certified by the oracle
        let oracle = kronecker_oracle(&p).unwrap();
        assert_eq!(oracle.len(), 2);
    }

    #[test]
    fn non_x_distinct_fallback() {
        // both factors have x support {1, 0} with one term each
        let p = poly("(x+y)*(x+z)");
        let report = sparse_factor(&p, &Config::default());
        assert_eq!(report.outcome, Outcome::Fallback(FallbackReason::NotXDistinct));
    }

    #[test]
    fn irreducible_input_is_single_factor() {
        let p = poly("x^2+y^2+z^2+1");
        let report = sparse_factor(&p, &Config::default());
        match report.outcome {
            Outcome::Factored(f) => {
                assert_eq!(f.factors.len(), 1);
                assert_eq!(f.factors[0], p);
            }
            Outcome::Fallback(r) => panic!("fallback {r}"),
        }
    }

    #[test]
    fn monomial_content_is_extracted() {
        // x*y*z*(x+y)
        let p = poly("x^2*y*z+x*y^2*z");
        let report = sparse_factor(&p, &Config::default());
        match report.outcome {
            Outcome::Factored(f) => {
                assert_eq!(f.expand(p.vars()), p);
                assert_eq!(f.factors.len(), 4);
            }
            Outcome::Fallback(r) => panic!("fallback {r}"),
        }
    }

    #[test]
    fn dilation_breaks_ties() {
        // with main variable x, the terms y and z^2 of the first factor tie
        // by coefficient inside the x^0 class; a dilation pass separates
        // them
        let p = poly("(x+y+z^2)*(x^2+3*y*z+5)");
        let cfg = Config { main_var: Some("x".to_string()), ..Config::default() };
        let report = sparse_factor(&p, &cfg);
        match report.outcome {
            Outcome::Factored(f) => {
                assert_eq!(f.expand(p.vars()), p);
                assert_eq!(f.factors.len(), 2);
                assert!(report.stats.dilation_passes >= 1);
            }
            Outcome::Fallback(r) => panic!("fallback {r}"),
        }
    }

    #[test]
    fn kronecker_oracle_basics() {
        let p = poly("(x+y)*(x-y)");
        let fs = kronecker_oracle(&p).unwrap();
        assert_eq!(fs.len(), 2);
        let prod = fs.iter().fold(MultiPoly::one(p.vars().to_vec()), |a, b| a.mul(b));
        assert_eq!(prod, p);

        // univariate passthrough
        let q = poly("x^2-1");
        let fs = kronecker_oracle(&q).unwrap();
        assert_eq!(fs.len(), 2);
    }

    #[test]
    fn oracle_agrees_with_driver() {
        use rand::Rng;
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let mut done = 0;
        let mut tried = 0;
        while done < 12 && tried < 400 {
            tried += 1;
            let gen_factor = |rng: &mut ChaCha8Rng| {
                let raw: Vec<(BigInt, Vec<Exp>)> = (0..3)
                    .map(|i| {
                        let mut e = vec![0u32; 3];
                        e[i % 3] = rng.random_range(1..=2);
                        e[(i + 1) % 3] = rng.random_range(0..=2);
                        (BigInt::from(rng.random_range(1i32..=9)), e)
                    })
                    .collect();
                MultiPoly::from_terms(vars.clone(), raw)
            };
            let a = gen_factor(&mut rng);
            let b = gen_factor(&mut rng);
            if a.is_constant() || b.is_constant() {
                continue;
            }
            let p = a.mul(&b);
            if p.is_zero() {
                continue;
            }
            let oracle = match kronecker_oracle(&p) {
                Ok(fs) => fs,
                Err(_) => continue,
            };
            let driver = sparse_factor(&p, &Config::default());
            if let Outcome::Factored(f) = driver.outcome {
                let mut da = f.factors.clone();
                let mut ob = oracle.clone();
                da.sort_by(canonical_cmp);
                ob.sort_by(canonical_cmp);
                assert_eq!(
                    da,
                    ob,
                    "oracle and driver disagree on {}",
                    crate::text::format_multipoly(&p)
                );
                done += 1;
            }
        }
        assert!(done >= 6, "too few comparable instances: {done}");
    }

    #[test]
    fn factor_any_dispatches() {
        let p = poly("x^2-1");
        let r = factor_any(&p, &Config::default());
        match r.outcome {
            Outcome::Factored(f) => assert_eq!(f.factors.len(), 2),
            _ => panic!(),
        }
        // bivariate input with a t-content that factors further
        let q = poly("(x+y)*(y^2-1)");
        let r = factor_any(&q, &Config::default());
        match r.outcome {
            Outcome::Factored(f) => {
                assert_eq!(f.expand(q.vars()), q);
                assert_eq!(f.factors.len(), 3);
            }
            _ => panic!(),
        }
    }
}
