//! Command-line front end: parse polynomial expressions, factor them,
//! expand or verify factor lists, and generate random benchmark instances.

use std::io::Read;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sparsefact_core::bifactor::{Backend, ExternalBackend};
use sparsefact_core::multipoly::{Exp, MultiPoly};
use sparsefact_core::sparselift::{factor_any, Config, Outcome};
use sparsefact_core::text::{format_multipoly, parse_multipoly};

#[derive(Parser)]
#[command(name = "sparsefact", version, about = "Factor sparse multivariate polynomials over the integers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Factor a polynomial read from an argument, @file, or stdin
    Factor(FactorArgs),
    /// Expand the product of the given polynomials
    Expand(ExpandArgs),
    /// Check that a factor list multiplies back to a target polynomial
    Verify(VerifyArgs),
    /// Emit a reproducible random sparse polynomial or product
    Gen(GenArgs),
}

#[derive(Args)]
struct FactorArgs {
    /// Polynomial expression, @file, or - for stdin (default)
    input: Option<String>,
    /// Force the main variable instead of picking the smallest degree
    #[arg(long, env = "SPARSEFACT_MAIN_VAR")]
    main_var: Option<String>,
    /// Seed for dilation scale draws
    #[arg(long, env = "SPARSEFACT_SEED", default_value_t = 0)]
    seed: u64,
    /// Largest probe weight tried per variable
    #[arg(long, env = "SPARSEFACT_JMAX", default_value_t = 6)]
    jmax: u32,
    /// Dilation redraw budget
    #[arg(long, env = "SPARSEFACT_MAX_DILATIONS", default_value_t = 8)]
    max_dilations: u32,
    /// Bivariate factorization backend
    #[arg(long, env = "SPARSEFACT_BACKEND", value_enum, default_value_t = BackendChoice::Builtin)]
    backend: BackendChoice,
    /// Command template run via `sh -c` for the external backend
    #[arg(long, env = "SPARSEFACT_EXTERNAL_CMD")]
    external_cmd: Option<String>,
    /// External backend timeout in seconds
    #[arg(long, env = "SPARSEFACT_TIMEOUT", default_value_t = 60)]
    timeout: u64,
    /// Emit a machine-readable JSON document
    #[arg(long, env = "SPARSEFACT_JSON")]
    json: bool,
    /// Print run statistics to stderr
    #[arg(long, env = "SPARSEFACT_STATS")]
    stats: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendChoice {
    Builtin,
    External,
}

#[derive(Args)]
struct ExpandArgs {
    /// Polynomials (expressions or @files); stdin lines when empty
    polys: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Target polynomial
    target: String,
    /// Claimed factors
    factors: Vec<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, env = "SPARSEFACT_SEED", default_value_t = 0)]
    seed: u64,
    /// Number of variables
    #[arg(long, default_value_t = 3)]
    nvars: usize,
    /// Terms per generated polynomial
    #[arg(long, default_value_t = 6)]
    terms: usize,
    /// Maximum exponent per variable
    #[arg(long, default_value_t = 4)]
    maxdeg: u32,
    /// Coefficients are drawn from [-bound, bound] excluding 0
    #[arg(long, default_value_t = 9)]
    coeff_bound: i64,
    /// Number of random factors; the expanded product is printed
    #[arg(long, default_value_t = 1)]
    factors: u32,
    /// Also print the generated factors to stderr
    #[arg(long)]
    show_factors: bool,
}

#[derive(Serialize)]
struct JsonStats {
    bifactor_calls: u32,
    retries: std::collections::BTreeMap<String, Vec<u32>>,
    dilations: u32,
    ms: u128,
}

#[derive(Serialize)]
struct JsonDoc {
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    fallback_reason: Option<String>,
    unit: i8,
    content: String,
    factors: Vec<String>,
    stats: JsonStats,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Factor(args) => cmd_factor(args),
        Cmd::Expand(args) => cmd_expand(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Gen(args) => cmd_gen(args),
    }
}

fn read_source(spec: &str) -> Result<String, String> {
    if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else if let Some(path) = spec.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    } else {
        Ok(spec.to_string())
    }
}

fn parse_arg(spec: &str) -> Result<MultiPoly, String> {
    let src = read_source(spec)?;
    parse_multipoly(&src).map_err(|e| e.to_string())
}

fn cmd_factor(args: FactorArgs) -> Result<ExitCode, String> {
    let input = args.input.as_deref().unwrap_or("-");
    let p = parse_arg(input)?;
    if p.is_zero() {
        return Err("cannot factor the zero polynomial".into());
    }
    let backend = match args.backend {
        BackendChoice::Builtin => Backend::Builtin,
        BackendChoice::External => {
            let cmd = args
                .external_cmd
                .clone()
                .ok_or("--external-cmd is required with --backend external")?;
            Backend::External(ExternalBackend {
                cmd,
                timeout: Duration::from_secs(args.timeout),
            })
        }
    };
    let cfg = Config {
        jmax: args.jmax,
        max_dilations: args.max_dilations,
        seed: args.seed,
        backend,
        main_var: args.main_var.clone(),
        verify: true,
    };
    let report = factor_any(&p, &cfg);
    let stats = JsonStats {
        bifactor_calls: report.stats.bifactor_calls,
        retries: report.stats.retries.clone(),
        dilations: report.stats.dilation_passes,
        ms: report.stats.elapsed.as_millis(),
    };
    if args.stats {
        eprintln!(
            "bivariate calls: {}, retries: {:?}, success weights: {:?}, dilations: {}, {} ms",
            stats.bifactor_calls,
            stats.retries,
            report.stats.success_weights,
            stats.dilations,
            stats.ms
        );
    }
    match report.outcome {
        Outcome::Factored(f) => {
            if args.json {
                let doc = JsonDoc {
                    status: "ok".into(),
                    fallback_reason: None,
                    unit: f.unit,
                    content: f.content.to_string(),
                    factors: f.factors.iter().map(format_multipoly).collect(),
                    stats,
                };
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                let lead = num_bigint::BigInt::from(f.unit) * &f.content;
                if lead != num_bigint::BigInt::from(1) || f.factors.is_empty() {
                    println!("{lead}");
                }
                for fac in &f.factors {
                    println!("{}", format_multipoly(fac));
                }
            }
            Ok(ExitCode::from(0))
        }
        Outcome::Fallback(reason) => {
            if args.json {
                let doc = JsonDoc {
                    status: "fallback".into(),
                    fallback_reason: Some(reason.to_string()),
                    unit: 1,
                    content: "1".into(),
                    factors: vec![format_multipoly(&p)],
                    stats,
                };
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            } else {
                eprintln!("not factored: {reason}");
                println!("{}", format_multipoly(&p));
            }
            Ok(ExitCode::from(2))
        }
    }
}

fn cmd_expand(args: ExpandArgs) -> Result<ExitCode, String> {
    let specs: Vec<String> = if args.polys.is_empty() {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| e.to_string())?;
        buf.lines()
            .map(|l| l.trim().to_string())
            .filter(|l| !l.is_empty())
            .collect()
    } else {
        args.polys.clone()
    };
    if specs.is_empty() {
        return Err("nothing to expand".into());
    }
    let polys = parse_aligned(&specs)?;
    let mut acc = polys[0].clone();
    for p in &polys[1..] {
        acc = acc.mul(p);
    }
    println!("{}", format_multipoly(&acc));
    Ok(ExitCode::from(0))
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let mut specs = vec![args.target.clone()];
    specs.extend(args.factors.iter().cloned());
    let polys = parse_aligned(&specs)?;
    let target = &polys[0];
    let mut acc = MultiPoly::one(target.vars().to_vec());
    for p in &polys[1..] {
        acc = acc.mul(p);
    }
    if acc == *target {
        println!("ok");
        Ok(ExitCode::from(0))
    } else {
        println!("mismatch");
        Ok(ExitCode::from(1))
    }
}

/// Parse several expressions over the union of their variables.
fn parse_aligned(specs: &[String]) -> Result<Vec<MultiPoly>, String> {
    let raw: Vec<MultiPoly> = specs
        .iter()
        .map(|s| parse_arg(s))
        .collect::<Result<_, _>>()?;
    let mut vars: Vec<String> = Vec::new();
    for p in &raw {
        for v in p.vars() {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
    }
    Ok(raw
        .into_iter()
        .map(|p| p.align_vars(&vars).expect("union covers all variables"))
        .collect())
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, String> {
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    if args.nvars == 0 || args.terms == 0 || args.factors == 0 {
        return Err("nvars, terms, and factors must be positive".into());
    }
    if args.coeff_bound < 1 {
        return Err("coeff-bound must be at least 1".into());
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let vars: Vec<String> = (0..args.nvars)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("x{i}")
            }
        })
        .collect();
    let mut product = MultiPoly::one(vars.clone());
    for _ in 0..args.factors {
        let raw: Vec<(BigInt, Vec<Exp>)> = (0..args.terms)
            .map(|_| {
                let mut c = 0i64;
                while c == 0 {
                    c = rng.random_range(-args.coeff_bound..=args.coeff_bound);
                }
                let e = (0..args.nvars)
                    .map(|_| rng.random_range(0..=args.maxdeg))
                    .collect();
                (BigInt::from(c), e)
            })
            .collect();
        let f = MultiPoly::from_terms(vars.clone(), raw);
        if f.is_zero() {
            continue;
        }
        if args.show_factors {
            eprintln!("{}", format_multipoly(&f));
        }
        product = product.mul(&f);
    }
    println!("{}", format_multipoly(&product));
    Ok(ExitCode::from(0))
}
