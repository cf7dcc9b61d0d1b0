//! Acceptance suite: one test per criterion, each printing its own
//! pass/fail line through the harness. The golden fixtures are the
//! five-variable factor pair whose product motivated the reconstruction
//! method; the expected constants in criteria 2-4 are derived from them.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparsefact_core::bifactor::{factor_bivariate, BiFactorError};
use sparsefact_core::bipoly::{weighted_substitute, BiPoly, SubstitutionWeights};
use sparsefact_core::multipoly::{Exp, MultiPoly};
use sparsefact_core::sparselift::{
    kronecker_oracle, normalize_factor, reconstruct_variable, sparse_factor, Config,
    FactorSkeleton, Outcome, RunStats, SparseFactorReport,
};
use sparsefact_core::text::parse_multipoly;
use sparsefact_core::unifactor::factor_univariate;
use sparsefact_core::unipoly::UniPoly;

const GOLDEN_A: &str = include_str!("data/golden_a.txt");
const GOLDEN_B: &str = include_str!("data/golden_b.txt");

struct Golden {
    a: MultiPoly,
    b: MultiPoly,
    p: MultiPoly,
    report: SparseFactorReport,
    elapsed: Duration,
}

fn golden() -> &'static Golden {
    static CELL: OnceLock<Golden> = OnceLock::new();
    CELL.get_or_init(|| {
        let a = parse_multipoly(GOLDEN_A).unwrap();
        let vars = a.vars().to_vec();
        let b = parse_multipoly(GOLDEN_B).unwrap().align_vars(&vars).unwrap();
        let p = a.mul(&b);
        let t0 = Instant::now();
        let report = sparse_factor(&p, &Config::default());
        let elapsed = t0.elapsed();
        Golden { a, b, p, report, elapsed }
    })
}

fn total_retries(stats: &RunStats) -> u32 {
    stats.retries.values().map(|v| v.len() as u32).sum()
}

#[test]
fn criterion_01_golden_factorization() {
    let g = golden();
    assert_eq!(g.a.num_terms(), 30);
    assert_eq!(g.b.num_terms(), 36);
    match &g.report.outcome {
        Outcome::Factored(f) => {
            assert_eq!(f.unit, 1);
            assert!(f.content.is_one());
            assert_eq!(f.factors.len(), 2, "exactly two irreducible factors");
            assert!(f.factors.contains(&g.a), "first fixture factor recovered");
            assert!(f.factors.contains(&g.b), "second fixture factor recovered");
            // exactness with zero tolerance
            assert_eq!(f.expand(g.p.vars()), g.p);
        }
        Outcome::Fallback(r) => panic!("golden example fell back: {r}"),
    }
    assert!(
        g.elapsed <= Duration::from_secs(60),
        "golden factorization took {:?}, budget is 60 s",
        g.elapsed
    );
}

#[test]
fn criterion_02_unlucky_evaluation_trace() {
    let g = golden();
    let stats = &g.report.stats;
    assert_eq!(
        stats.retries.get("a").map(|v| v.as_slice()),
        Some([2u32, 3].as_slice()),
        "variable a probed unsuccessfully at weights 2 and 3"
    );
    assert_eq!(stats.success_weights.get("a"), Some(&4), "variable a succeeds at weight 4");
    assert!(
        stats.base_skeleton_terms.contains(&30),
        "the matched base factor skeleton has exactly 30 terms, got {:?}",
        stats.base_skeleton_terms
    );
}

/// Base and weight-4 images of the golden product, factored once.
fn golden_images() -> &'static (Vec<UniPoly>, Vec<UniPoly>) {
    static CELL: OnceLock<(Vec<UniPoly>, Vec<UniPoly>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = golden();
        let main = 1; // variable b has the smallest partial degree
        let nvars = g.p.nvars();
        let normalizers = |w: &SubstitutionWeights| -> Vec<UniPoly> {
            let img = weighted_substitute(&g.p, w);
            let lc = g.p.leading_coefficient_wrt(main);
            let lc_img = weighted_substitute(&lc, w);
            let lc_uni = UniPoly::from_sparse(
                &lc_img
                    .terms()
                    .iter()
                    .map(|(_, t, c)| (*t as usize, c.clone()))
                    .collect::<Vec<_>>(),
            );
            let fac = factor_bivariate(&img).unwrap();
            fac.factors
                .iter()
                .map(|f| normalize_factor(f, &lc_uni).unwrap().normalizer)
                .collect()
        };
        let base = normalizers(&SubstitutionWeights::ones(nvars, main));
        let probe4 = normalizers(&SubstitutionWeights::ones(nvars, main).with(0, 4));
        (base, probe4)
    })
}

#[test]
fn criterion_03_normalization_quotients() {
    let (base, probe4) = golden_images();
    // the factor matching the 30-term fixture normalizes by c * t^63 at the
    // base weights and by c * t^73 at weight 4 on variable a, with
    // c = 1728000000000 (the integer part of the cofactor's lc)
    let c = BigInt::from(1_728_000_000_000u64);
    let expect_base = UniPoly::from_sparse(&[(63, c.clone())]);
    let expect_probe = UniPoly::from_sparse(&[(73, c)]);
    assert!(
        base.iter().any(|q| *q == expect_base),
        "base normalizer t^63 not found: {base:?}"
    );
    assert!(
        probe4.iter().any(|q| *q == expect_probe),
        "weight-4 normalizer t^73 not found"
    );
}

#[test]
fn criterion_04_exponent_reconstruction_value() {
    let g = golden();
    let main = 1;
    let nvars = g.p.nvars();
    let lc = g.p.leading_coefficient_wrt(main);
    let skeletons = |w: &SubstitutionWeights| -> Vec<FactorSkeleton> {
        let img = weighted_substitute(&g.p, w);
        let lc_img = weighted_substitute(&lc, w);
        let lc_uni = UniPoly::from_sparse(
            &lc_img
                .terms()
                .iter()
                .map(|(_, t, c)| (*t as usize, c.clone()))
                .collect::<Vec<_>>(),
        );
        let fac = factor_bivariate(&img).unwrap();
        fac.factors
            .iter()
            .map(|f| normalize_factor(f, &lc_uni).unwrap().skeleton)
            .collect()
    };
    let base = skeletons(&SubstitutionWeights::ones(nvars, main));
    let probe = skeletons(&SubstitutionWeights::ones(nvars, main).with(0, 4));
    // pick the 30-term skeleton (the fixture factor) in both evaluations
    let sb = base.iter().find(|s| s.num_terms() == 30).expect("base skeleton");
    let se = probe.iter().find(|s| s.num_terms() == 30).expect("probe skeleton");
    // leading monomial: base tdeg 153, probe tdeg 234, exponent (234-153)/3
    assert_eq!(sb.terms()[0].tdeg, 153);
    assert_eq!(se.terms()[0].tdeg, 234);
    let adjust = vec![0i64; sb.num_terms()];
    let exps = reconstruct_variable(sb, se, 3, &adjust, g.p.degree(0)).unwrap();
    assert_eq!(exps[0], 27, "leading monomial's reconstructed exponent");
}

// ---------------------------------------------------------------------------
// random instance generators
// ---------------------------------------------------------------------------

/// Product of `nf` factors over `nvars` variables with pairwise distinct
/// main-variable degrees (hence pairwise distinct x supports). Every term
/// of a factor gets a distinct total degree, so no two of its monomials
/// can collide under any weighted substitution with small probe weights;
/// these are the construction's "lucky" instances.
fn gen_x_distinct(rng: &mut ChaCha8Rng, nvars: usize, nf: usize, max_terms: usize) -> Vec<MultiPoly> {
    let vars: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
    let mut out = Vec::with_capacity(nf);
    for fi in 0..nf {
        // factor fi owns the degree band [2*fi+1, 2*fi+2]
        let deg_lo = (2 * fi + 1) as u32;
        let deg_hi = (2 * fi + 2) as u32;
        let nterms = rng.random_range((max_terms / 2).max(4)..=max_terms);
        let mut raw: Vec<(BigInt, Vec<Exp>)> = Vec::new();
        let mut totals: Vec<u32> = Vec::new();
        // one term pins the top degree in every variable, one keeps the
        // factor free of monomial content
        let top: Vec<Exp> = (0..nvars).map(|_| rng.random_range(deg_lo..=deg_hi)).collect();
        totals.push(top.iter().sum());
        raw.push((BigInt::from(rng.random_range(1..=1000)), top.clone()));
        totals.push(0);
        raw.push((BigInt::from(rng.random_range(1..=1000)), vec![0; nvars]));
        let mut guard = 0;
        while raw.len() < nterms && guard < 200 {
            guard += 1;
            let e: Vec<Exp> = top.iter().map(|&d| rng.random_range(0..=d)).collect();
            let t: u32 = e.iter().sum();
            if totals.contains(&t) {
                continue;
            }
            let mut c = 0i64;
            while c == 0 {
                c = rng.random_range(-1000i64..=1000);
            }
            totals.push(t);
            raw.push((BigInt::from(c), e));
        }
        let f = MultiPoly::from_terms(vars.clone(), raw);
        if f.is_constant() {
            return gen_x_distinct(rng, nvars, nf, max_terms);
        }
        out.push(f.integer_content_and_sign().2);
    }
    out
}

/// Stricter construction for the call-budget criterion: on top of distinct
/// totals, every weight-2 probe image of every factor is collision free,
/// so each variable reconstructs at its first probe.
fn gen_lucky(rng: &mut ChaCha8Rng, nvars: usize, nf: usize, max_terms: usize) -> Vec<MultiPoly> {
    let vars: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
    let mut out = Vec::with_capacity(nf);
    for fi in 0..nf {
        let deg_lo = (2 * fi + 1) as u32;
        let deg_hi = (2 * fi + 2) as u32;
        let nterms = rng.random_range((max_terms / 2).max(4)..=max_terms);
        let mut exps: Vec<Vec<Exp>> = Vec::new();
        let top: Vec<Exp> = (0..nvars).map(|_| rng.random_range(deg_lo..=deg_hi)).collect();
        exps.push(top.clone());
        exps.push(vec![0; nvars]);
        let clean = |exps: &[Vec<Exp>], e: &[Exp]| {
            exps.iter().all(|o| {
                let to: u32 = o.iter().sum();
                let tn: u32 = e.iter().sum();
                if to == tn {
                    return false;
                }
                (0..e.len()).all(|k| to + o[k] != tn + e[k])
            })
        };
        let mut guard = 0;
        while exps.len() < nterms && guard < 400 {
            guard += 1;
            let e: Vec<Exp> = top.iter().map(|&d| rng.random_range(0..=d)).collect();
            if clean(&exps, &e) {
                exps.push(e);
            }
        }
        let raw: Vec<(BigInt, Vec<Exp>)> = exps
            .into_iter()
            .map(|e| {
                let mut c = 0i64;
                while c == 0 {
                    c = rng.random_range(-1000i64..=1000);
                }
                (BigInt::from(c), e)
            })
            .collect();
        let f = MultiPoly::from_terms(vars.clone(), raw);
        if f.is_constant() {
            return gen_lucky(rng, nvars, nf, max_terms);
        }
        out.push(f.integer_content_and_sign().2);
    }
    out
}

struct InstanceOutcome {
    success: bool,
    stats: RunStats,
    nvars: usize,
}

fn run_instance(factors: &[MultiPoly]) -> (InstanceOutcome, Option<Vec<MultiPoly>>) {
    let vars = factors[0].vars().to_vec();
    let mut p = MultiPoly::one(vars.clone());
    for f in factors {
        p = p.mul(f);
    }
    let report = sparse_factor(&p, &Config::default());
    match report.outcome {
        Outcome::Factored(f) => {
            assert_eq!(f.expand(&vars), p, "success must multiply back exactly");
            let got = f.factors.clone();
            (
                InstanceOutcome { success: true, stats: report.stats, nvars: vars.len() },
                Some(got),
            )
        }
        Outcome::Fallback(_) => (
            InstanceOutcome { success: false, stats: report.stats, nvars: vars.len() },
            None,
        ),
    }
}

#[test]
fn criterion_05_call_budget() {
    let mut lucky = 0u32;
    let mut seed = 0u64;
    while lucky < 50 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nvars = rng.random_range(3..=6);
        let nf = rng.random_range(2..=3);
        let factors = gen_lucky(&mut rng, nvars, nf, 12);
        let (outcome, _) = run_instance(&factors);
        if !outcome.success || outcome.stats.dilation_passes > 0 {
            continue;
        }
        lucky += 1;
        let n = (outcome.nvars - 1) as u32; // occurring non-main variables
        let retries = total_retries(&outcome.stats);
        assert!(
            outcome.stats.bifactor_calls <= n + 1 + retries,
            "budget exceeded: {} calls for n={} with {} retries",
            outcome.stats.bifactor_calls,
            n,
            retries
        );
        if retries == 0 {
            assert_eq!(
                outcome.stats.bifactor_calls,
                n + 1,
                "no retries means exactly n+1 bivariate factorizations"
            );
        }
        assert!(seed < 500, "could not find 50 lucky instances");
    }
}

#[test]
fn criterion_06_roundtrip_suite() {
    let mut successes = 0u32;
    let mut total = 0u32;
    // 50 instances at the budget scale
    for seed in 1000..1050u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nvars = rng.random_range(3..=6);
        let nf = rng.random_range(2..=3);
        let factors = gen_lucky(&mut rng, nvars, nf, 12);
        let (outcome, _) = run_instance(&factors);
        total += 1;
        if outcome.success {
            successes += 1;
        }
    }
    // 200 smaller ones
    for seed in 2000..2200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let factors = gen_x_distinct(&mut rng, 3, 2, 6);
        let (outcome, _) = run_instance(&factors);
        total += 1;
        if outcome.success {
            successes += 1;
        }
    }
    let rate = successes as f64 / total as f64;
    println!("round-trip success rate on x-distinct construction: {successes}/{total} = {rate:.3}");
    assert!(rate >= 0.9, "success rate {rate:.3} below the 90% target");
}

#[test]
fn criterion_07_oracle_equivalence() {
    let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let mut both = 0u32;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed + seed);
        // two random factors of up to 3 terms, partial degrees <= 2,
        // every variable occurring in each factor
        let gen = |rng: &mut ChaCha8Rng| -> MultiPoly {
            let mut raw: Vec<(BigInt, Vec<Exp>)> = Vec::new();
            let mut totals: Vec<u32> = Vec::new();
            let top: Vec<Exp> = (0..3).map(|_| rng.random_range(1..=2)).collect();
            totals.push(top.iter().sum());
            raw.push((BigInt::from(rng.random_range(1..=9)), top));
            let mut guard = 0;
            let want = rng.random_range(1..=2u32);
            while raw.len() < 1 + want as usize && guard < 50 {
                guard += 1;
                let e: Vec<Exp> = (0..3).map(|_| rng.random_range(0..=2)).collect();
                let t: u32 = e.iter().sum();
                if totals.contains(&t) {
                    continue;
                }
                let mut c = 0i64;
                while c == 0 {
                    c = rng.random_range(-9i64..=9);
                }
                totals.push(t);
                raw.push((BigInt::from(c), e));
            }
            MultiPoly::from_terms(vars.clone(), raw)
        };
        let f1 = gen(&mut rng);
        let f2 = gen(&mut rng);
        if f1.is_constant() || f2.is_constant() {
            continue;
        }
        let p = f1.mul(&f2);
        if p.is_zero() {
            continue;
        }
        let oracle = match kronecker_oracle(&p) {
            Ok(fs) => fs,
            Err(_) => continue,
        };
        let report = sparse_factor(&p, &Config::default());
        if let Outcome::Factored(f) = report.outcome {
            let mut got = f.factors.clone();
            let mut want = oracle.clone();
            got.sort_by(|a, b| a.terms().cmp(b.terms()));
            want.sort_by(|a, b| a.terms().cmp(b.terms()));
            assert_eq!(got, want, "driver and oracle disagree");
            both += 1;
        }
    }
    println!("oracle equivalence checked on {both} instances where both succeeded");
    assert!(both >= 30, "too few comparable instances: {both}");
}

// ---------------------------------------------------------------------------
// univariate oracle
// ---------------------------------------------------------------------------

/// Brute-force factorization of a monic polynomial with small integer
/// coefficients: searches all monic divisors of degree 1 and 2 with
/// root-bounded coefficients and recurses on the quotient.
fn oracle_factor_monic(f: &[i64]) -> Vec<Vec<i64>> {
    let deg = f.len() - 1;
    if deg <= 1 {
        return vec![f.to_vec()];
    }
    let bound = 1 + f.iter().map(|c| c.abs()).max().unwrap_or(0);
    // degree-1 divisors x + a
    for a in -bound..=bound {
        if let Some(q) = divide_monic(f, &[a, 1]) {
            let mut out = vec![vec![a, 1]];
            out.extend(oracle_factor_monic(&q));
            return out;
        }
    }
    if deg >= 4 {
        // degree-2 divisors x^2 + b*x + c with |b| <= 2*bound, |c| <= bound^2
        for b in -2 * bound..=2 * bound {
            for c in -bound * bound..=bound * bound {
                if let Some(q) = divide_monic(f, &[c, b, 1]) {
                    // the quadratic must itself be irreducible: no integer root
                    let has_root = (-bound..=bound).any(|r| r * r + b * r + c == 0);
                    if has_root {
                        continue;
                    }
                    let mut out = vec![vec![c, b, 1]];
                    out.extend(oracle_factor_monic(&q));
                    return out;
                }
            }
        }
    }
    vec![f.to_vec()]
}

fn divide_monic(num: &[i64], den: &[i64]) -> Option<Vec<i64>> {
    if num.len() < den.len() {
        return None;
    }
    let mut rem = num.to_vec();
    let dlen = den.len();
    let qlen = rem.len() - dlen + 1;
    let mut quo = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let top = rem[k + dlen - 1];
        quo[k] = top;
        for i in 0..dlen {
            rem[k + i] -= top * den[i];
        }
    }
    if rem.iter().take(dlen - 1).all(|&c| c == 0) {
        Some(quo)
    } else {
        None
    }
}

#[test]
fn criterion_08_univariate_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0u64;
    for deg in 1..=4usize {
        let mut coeffs = vec![-3i64; deg];
        loop {
            // monic polynomial with the current low coefficients
            let mut f: Vec<i64> = coeffs.clone();
            f.push(1);
            let fp = UniPoly::from_coeffs(f.iter().map(|&c| BigInt::from(c)).collect());

            // oracle: strip powers of x first
            let tz = f.iter().take_while(|&&c| c == 0).count();
            let mut expected: Vec<Vec<i64>> = (0..tz).map(|_| vec![0, 1]).collect();
            if f.len() - tz > 1 {
                expected.extend(oracle_factor_monic(&f[tz..]));
            }
            let mut expected: Vec<UniPoly> = expected
                .into_iter()
                .map(|g| UniPoly::from_coeffs(g.into_iter().map(BigInt::from).collect()))
                .collect();
            expected.sort_by(|a, b| (a.degree(), a.coeffs()).cmp(&(b.degree(), b.coeffs())));

            let got_fac = factor_univariate(&fp, &mut rng);
            assert_eq!(got_fac.unit, 1);
            assert!(got_fac.content.is_one());
            let mut got: Vec<UniPoly> = Vec::new();
            for (g, m) in &got_fac.factors {
                for _ in 0..*m {
                    got.push(g.clone());
                }
            }
            got.sort_by(|a, b| (a.degree(), a.coeffs()).cmp(&(b.degree(), b.coeffs())));
            assert_eq!(got, expected, "mismatch for coefficients {coeffs:?}");
            checked += 1;

            // next coefficient vector in [-3, 3]^deg
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    break;
                }
                coeffs[i] += 1;
                if coeffs[i] <= 3 {
                    break;
                }
                coeffs[i] = -3;
                i += 1;
            }
            if i == coeffs.len() {
                break;
            }
        }
    }
    println!("univariate oracle agreed on {checked} monic polynomials");
    assert_eq!(checked, 7 + 49 + 343 + 2401);
}

#[test]
fn criterion_09_bivariate_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb1);
    // a pool of self-certified irreducibles
    let mut pool: Vec<BiPoly> = Vec::new();
    while pool.len() < 12 {
        let raw: Vec<(Exp, Exp, BigInt)> = (0..rng.random_range(2..=4))
            .map(|_| {
                (
                    rng.random_range(0..=4u32),
                    rng.random_range(0..=4u32),
                    BigInt::from(rng.random_range(-9i64..=9)),
                )
            })
            .collect();
        let f = BiPoly::from_terms(raw);
        if f.is_zero() || f.degree_x() == 0 || f.min_degree_x() > 0 {
            continue;
        }
        let f = f.normalize_sign().1;
        if pool.contains(&f) {
            continue;
        }
        match factor_bivariate(&f) {
            Ok(fac) if fac.factors.len() == 1 && fac.content_t.is_one() => pool.push(f),
            _ => continue,
        }
    }
    let mut done = 0;
    while done < 200 {
        let k = rng.random_range(2..=3usize);
        let mut picks: Vec<usize> = Vec::new();
        while picks.len() < k {
            let i = rng.random_range(0..pool.len());
            if !picks.contains(&i) {
                picks.push(i);
            }
        }
        let mut p = BiPoly::one();
        for &i in &picks {
            p = p.mul(&pool[i]);
        }
        match factor_bivariate(&p) {
            Ok(fac) => {
                assert_eq!(fac.expand(), p, "unit*content*factors must reproduce the input");
                let mut got = fac.factors.clone();
                let mut want: Vec<BiPoly> = picks.iter().map(|&i| pool[i].clone()).collect();
                got.sort_by(|a, b| a.canonical_cmp(b));
                want.sort_by(|a, b| a.canonical_cmp(b));
                assert_eq!(got, want, "factor multiset recovered");
                done += 1;
            }
            Err(BiFactorError::NotSquarefree) => continue,
            Err(e) => panic!("bivariate factorization failed: {e}"),
        }
    }
}

#[test]
fn criterion_10_dilation_invariance() {
    let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    let mut instances: Vec<MultiPoly> = Vec::new();
    // tie-forcing products: unit coefficients inside one x class
    for k in 0..10u32 {
        let f1 = parse_multipoly(&format!("x^2+y^{}*z+y+{}", k % 3 + 2, k + 2))
            .unwrap()
            .align_vars(&vars)
            .unwrap();
        let f2 = parse_multipoly(&format!("x^3+{}*y*z^2+z+{}", k + 3, k + 5))
            .unwrap()
            .align_vars(&vars)
            .unwrap();
        instances.push(f1.mul(&f2));
    }
    // generic lucky products (over their own variable names)
    let mut seed = 9000u64;
    while instances.len() < 20 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let factors = gen_lucky(&mut rng, 3, 2, 8);
        let mut p = MultiPoly::one(factors[0].vars().to_vec());
        for f in &factors {
            p = p.mul(f);
        }
        instances.push(p);
    }

    let mut covered = 0;
    for p in &instances {
        let mut results: Vec<Vec<MultiPoly>> = Vec::new();
        for seed in 0..5u64 {
            let cfg = Config { seed, ..Config::default() };
            match sparse_factor(p, &cfg).outcome {
                Outcome::Factored(f) => {
                    let mut fs = f.factors;
                    fs.sort_by(|a, b| a.terms().cmp(b.terms()));
                    results.push(fs);
                }
                Outcome::Fallback(_) => {}
            }
        }
        if results.len() < 2 {
            continue;
        }
        covered += 1;
        for r in &results[1..] {
            assert_eq!(r, &results[0], "factor multiset depends on the dilation seed");
        }
    }
    println!("dilation invariance verified on {covered} instances");
    assert!(covered >= 15, "too few instances produced comparable runs: {covered}");
}

// ---------------------------------------------------------------------------
// golden fixture identities beyond the numbered criteria
// ---------------------------------------------------------------------------

const GOLDEN_BASE_FACTOR: &str = include_str!("data/golden_base_factor.txt");
const GOLDEN_PROBE2_FACTOR: &str = include_str!("data/golden_probe2_factor.txt");
const GOLDEN_PROBE4_FACTOR: &str = include_str!("data/golden_probe4_factor.txt");

/// Parse a bivariate fixture written in the variables (b, t).
fn parse_bt(src: &str) -> BiPoly {
    let vars = vec!["b".to_string(), "t".to_string()];
    let p = sparsefact_core::text::parse_multipoly_with_vars(src, &vars).unwrap();
    BiPoly::from_terms(
        p.terms()
            .iter()
            .map(|(c, e)| (e[0], e[1], c.clone()))
            .collect(),
    )
}

fn naive_mul(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let mut raw = Vec::new();
    for (ca, ea) in a.terms() {
        for (cb, eb) in b.terms() {
            let e: Vec<Exp> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
            raw.push((ca * cb, e));
        }
    }
    MultiPoly::from_terms(a.vars().to_vec(), raw)
}

#[test]
fn golden_product_structure() {
    let g = golden();
    // the heap product agrees with an independent term-by-term multiplier
    assert_eq!(g.p, naive_mul(&g.a, &g.b));
    assert_eq!(g.p.num_terms(), 1079);
    // trial division recovers the cofactor
    assert_eq!(g.p.exact_div(&g.a), Some(g.b.clone()));
    assert_eq!(g.p.exact_div(&g.b), Some(g.a.clone()));
    // the coefficients of the product are collectively primitive
    let (unit, content, prim) = g.p.integer_content_and_sign();
    assert_eq!(unit, 1);
    assert!(content.is_one());
    assert_eq!(prim, g.p);
}

#[test]
fn golden_leading_coefficient() {
    let g = golden();
    // lc of the product in b equals the product of the factor lcs:
    // 64497254400000000000000000 * a^22*c^31*d^54*E^41 * (a^5 + 5*d^3)
    let lc = g.p.leading_coefficient_wrt(1);
    let expect = parse_multipoly(
        "64497254400000000000000000*a^22*c^31*d^54*E^41*(a^5+5*d^3)",
    )
    .unwrap()
    .align_vars(g.p.vars())
    .unwrap();
    assert_eq!(lc, expect);
    assert_eq!(
        lc,
        g.a.leading_coefficient_wrt(1).mul(&g.b.leading_coefficient_wrt(1))
    );
}

#[test]
fn golden_substitution_images() {
    let g = golden();
    let nvars = g.p.nvars();
    let main = 1;
    // all-ones image of the first fixture factor: t^2 times the displayed
    // 30-monomial factor
    let base = weighted_substitute(&g.a, &SubstitutionWeights::ones(nvars, main));
    assert_eq!(base, parse_bt(GOLDEN_BASE_FACTOR).mul_tpow(2));
    // weight 2 on variable a merges two base monomials into one
    let p2 = weighted_substitute(
        &g.a,
        &SubstitutionWeights::ones(nvars, main).with(0, 2),
    );
    let f29 = parse_bt(GOLDEN_PROBE2_FACTOR);
    assert_eq!(f29.num_terms(), 29);
    assert_eq!(p2, f29.mul_tpow(4));
    let merged = BigInt::from(12_441_600_000u64) + BigInt::from(3_110_400_000u64);
    assert!(f29
        .terms()
        .iter()
        .any(|(x, t, c)| *x == 4 && *t == 76 && *c == merged));
    // weight 4 restores the 30-monomial picture
    let p4 = weighted_substitute(
        &g.a,
        &SubstitutionWeights::ones(nvars, main).with(0, 4),
    );
    let f30 = parse_bt(GOLDEN_PROBE4_FACTOR);
    assert_eq!(f30.num_terms(), 30);
    assert_eq!(p4, f30.mul_tpow(6));
}

#[test]
fn golden_base_bivariate_factorization() {
    let g = golden();
    let img = weighted_substitute(&g.p, &SubstitutionWeights::ones(g.p.nvars(), 1));
    let fac = factor_bivariate(&img).unwrap();
    assert_eq!(fac.unit, 1);
    // the t-content of the image is exactly t^5
    assert_eq!(fac.content_t, BiPoly::monomial(0, 5, BigInt::one()));
    assert_eq!(fac.factors.len(), 2);
    assert!(fac.factors.contains(&parse_bt(GOLDEN_BASE_FACTOR)));
}

#[test]
fn golden_count_comparisons() {
    // normalized skeletons of the fixture factor across the three
    // displayed evaluations: the weight-2 image is poorer, weight 4 equal
    let base = FactorSkeleton::from_bipoly(&parse_bt(GOLDEN_BASE_FACTOR));
    let p2 = FactorSkeleton::from_bipoly(&parse_bt(GOLDEN_PROBE2_FACTOR));
    let p4 = FactorSkeleton::from_bipoly(&parse_bt(GOLDEN_PROBE4_FACTOR));
    use sparsefact_core::sparselift::{compare_counts, CountCmp};
    assert_eq!(compare_counts(&base, &p2), CountCmp::EvalPoorer);
    assert_eq!(compare_counts(&p2, &base), CountCmp::EvalRicher);
    assert_eq!(compare_counts(&base, &p4), CountCmp::Equal);
}
