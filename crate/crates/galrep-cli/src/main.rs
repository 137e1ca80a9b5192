//! Batch front end for the library: bounds, series construction, operators,
//! comparisons, and character inspection, all driven by flags.
//!
//! Exit codes follow the comparison contract: 0 when the inputs are proved
//! isomorphic or congruent, 1 when a distinguishing witness is printed, and
//! 2 for every error or indeterminate outcome. Output is line-oriented
//! `key: value` text and is byte-identical across runs, including under
//! `--jobs`; there are no configuration files and no environment variables.

use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_integer::Integer;

use galrep::arith::{embedding_make, rat, Rational};
use galrep::bounds::{
    index_gamma0, index_gamma0_gamma1, kappa, kappa_index_identity_check, kohnen_bound,
    onedim_bounds, sturm_bound, BoundFormula, BoundReport,
};
use galrep::characters::DirichletCharacter;
use galrep::distinguisher::{
    compare_1dim, compare_2dim, compare_2dim_parallel, sturm_compare, CongruenceVerdict, Verdict,
};
use galrep::eisenstein::{eisenstein_qexp_t, EisensteinSpec};
use galrep::format::{parse_character_spec, parse_qexp, parse_repr, write_character_spec, write_qexp};
use galrep::qexp::QExpansion;

#[derive(Parser)]
#[command(name = "galrep", version, about = "Exact bounds, series, and mod-l comparisons")]
struct Cli {
    /// Worker threads for parallel prime evaluation; 1 stays sequential,
    /// 0 picks one thread per core. Verdicts do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print an exact bound: its defining rational and its floor.
    Bound {
        #[command(subcommand)]
        kind: BoundKind,
    },
    /// Construct an Eisenstein series and write it as a series file.
    Eisenstein(EisensteinArgs),
    /// Apply an operator to a series file.
    Op {
        #[command(subcommand)]
        which: OpKind,
    },
    /// Compare two representations, series, or characters.
    Compare(CompareArgs),
    /// Print conductor, parity, and order data for a character.
    Charinfo {
        /// Character spec, e.g. "4; 2^1" or "12;".
        spec: String,
    },
}

#[derive(Subcommand)]
enum BoundKind {
    /// The comparison bound for two-dimensional mod-l representations.
    Kappa {
        #[arg(long)]
        ell: u64,
        #[arg(long = "N")]
        n: u64,
        /// Also verify the bound against the subgroup-index identity.
        #[arg(long)]
        check_identity: bool,
    },
    /// The coefficient bound for forms of one weight.
    Sturm {
        #[arg(long)]
        k: u64,
        #[arg(long = "N")]
        n: u64,
    },
    /// The coefficient bound for a cross-weight congruence.
    Kohnen {
        #[arg(long)]
        k1: u64,
        #[arg(long)]
        k2: u64,
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        ell: u64,
    },
    /// Prime bounds for distinguishing characters: the complete l*N bound
    /// and the shapes of the analytic improvements.
    Onedim {
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        ell: u64,
        /// Parameter of the character-sum estimate; the exponent is
        /// (r+1)/(4r) + r*eps.
        #[arg(long)]
        r: u64,
        /// Slack in the exponent, as a rational like "1/100".
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// Subgroup indices in the modular group.
    Index {
        #[arg(long = "N")]
        n: u64,
        /// When given, also print the index for the mixed subgroup of
        /// levels N and M.
        #[arg(long = "M")]
        m: Option<u64>,
    },
}

#[derive(Parser)]
struct EisensteinArgs {
    /// Weight; must have the parity of psi*phi.
    #[arg(long)]
    k: u64,
    /// Character spec for psi.
    #[arg(long, conflicts_with = "trivial")]
    psi: Option<String>,
    /// Character spec for phi; must be primitive.
    #[arg(long, conflicts_with = "trivial")]
    phi: Option<String>,
    /// Shorthand for both characters trivial of modulus 1.
    #[arg(long)]
    trivial: bool,
    /// Dilation parameter; the weight-2 double-trivial series needs t > 1.
    #[arg(long, default_value_t = 1)]
    t: u64,
    /// Number of coefficients to compute.
    #[arg(long = "B", default_value_t = 10)]
    b: u64,
    /// Reduce the halved series mod this prime before writing.
    #[arg(long)]
    ell: Option<u64>,
    /// Apply theta this many times after the reduction.
    #[arg(long, default_value_t = 0, requires = "ell")]
    theta: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OpKind {
    /// Drop to the subseries a_{pn}.
    #[command(name = "U")]
    U {
        #[arg(long)]
        p: u64,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dilate indices by d.
    #[command(name = "V")]
    V {
        #[arg(long)]
        d: u64,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero every index divisible by p.
    #[command(name = "pi_p")]
    PiP {
        #[arg(long)]
        p: u64,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero every index sharing a factor with the level.
    Pi {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Twist: multiply a_n by n. Needs finite-field coefficients.
    Theta {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Parser)]
struct CompareArgs {
    /// Left input: a file in repr and series modes, an inline character
    /// spec in char mode.
    left: String,
    /// Right input, same convention.
    right: String,
    /// Conductor bound; required in repr and char modes.
    #[arg(long = "N")]
    n: Option<u64>,
    /// Residue characteristic; required in repr and char modes.
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long, value_enum)]
    mode: CompareMode,
}

#[derive(ValueEnum, Clone, Copy)]
enum CompareMode {
    Repr,
    Series,
    Char,
}

fn main() {
    let cli = Cli::parse();
    if cli.jobs != 1 {
        // 0 lets the pool size itself; an already-built pool only happens
        // in tests and keeps the earlier size, which is still correct.
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(code) => process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            process::exit(2);
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Bound { kind } => cmd_bound(kind),
        Command::Eisenstein(args) => cmd_eisenstein(args),
        Command::Op { which } => cmd_op(which),
        Command::Compare(args) => cmd_compare(args, cli.jobs),
        Command::Charinfo { spec } => cmd_charinfo(spec),
    }
}

fn cmd_bound(kind: &BoundKind) -> Result<i32> {
    match *kind {
        BoundKind::Kappa {
            ell,
            n,
            check_identity,
        } => {
            print_report(&kappa(n, ell)?);
            if check_identity {
                if kappa_index_identity_check(n, ell)? {
                    println!("identity: ok");
                } else {
                    bail!("bound disagrees with the subgroup-index identity");
                }
            }
        }
        BoundKind::Sturm { k, n } => print_report(&sturm_bound(k, n)?),
        BoundKind::Kohnen { k1, k2, n, ell } => print_report(&kohnen_bound(k1, k2, n, ell)?),
        BoundKind::Onedim { n, ell, r, ref eps } => {
            let eps = parse_rational_flag(eps).context("--eps")?;
            let b = onedim_bounds(n, ell, r, &eps)?;
            println!("trivial-bound: {}", b.trivial);
            println!("burgess-exponent: {}", b.burgess_exponent);
            println!("burgess-constant: {}", b.burgess_constant);
            println!("ankeny-log-square-low: {}", b.ankeny_square_log.0);
            println!("ankeny-log-square-high: {}", b.ankeny_square_log.1);
            println!("ankeny-constant: {}", b.ankeny_constant);
        }
        BoundKind::Index { n, m } => {
            println!("index-gamma0: {}", index_gamma0(n)?);
            if let Some(m) = m {
                println!("index-gamma0-gamma1: {}", index_gamma0_gamma1(n, m)?);
            }
        }
    }
    Ok(0)
}

fn print_report(r: &BoundReport) {
    let name = match r.formula {
        BoundFormula::Sturm => "sturm",
        BoundFormula::Kohnen => "kohnen",
        BoundFormula::Kappa => "kappa",
    };
    println!("formula: {name}");
    if let Some(ell) = r.ell {
        println!("ell: {ell}");
    }
    println!("level: {}", r.level);
    if let Some((k1, k2)) = r.weights {
        if k1 == k2 {
            println!("weight: {k1}");
        } else {
            println!("weights: {k1} {k2}");
        }
    }
    println!("exact: {}", r.exact_value);
    println!("bound: {}", r.kappa);
}

fn cmd_eisenstein(args: &EisensteinArgs) -> Result<i32> {
    let (psi, phi) = if args.trivial {
        let one = DirichletCharacter::trivial(1)?;
        (one.clone(), one)
    } else {
        match (&args.psi, &args.phi) {
            (Some(p), Some(q)) => (parse_character_spec(p)?, parse_character_spec(q)?),
            _ => bail!("give both --psi and --phi, or --trivial"),
        }
    };
    let spec = EisensteinSpec::new(args.k, psi, phi, args.t, None)?;
    let mut series = eisenstein_qexp_t(&spec, args.b)?;
    if let Some(ell) = args.ell {
        let order = spec
            .psi()
            .value_order()
            .lcm(&spec.phi().value_order());
        let emb = embedding_make(order, ell)?;
        series = series.scale_rational(&rat(1, 2))?.reduce_mod_lambda(&emb)?;
        for _ in 0..args.theta {
            series = series.op_theta()?;
        }
    }
    emit(args.out.as_deref(), &write_qexp(&series)?)?;
    Ok(0)
}

fn cmd_op(which: &OpKind) -> Result<i32> {
    let (input, out, apply): (&Path, _, Box<dyn Fn(&QExpansion) -> galrep::Result<QExpansion>>) =
        match which {
            OpKind::U { p, input, out } => {
                let p = *p;
                (input, out, Box::new(move |q| q.op_u(p)))
            }
            OpKind::V { d, input, out } => {
                let d = *d;
                (input, out, Box::new(move |q| q.op_v(d)))
            }
            OpKind::PiP { p, input, out } => {
                let p = *p;
                (input, out, Box::new(move |q| q.op_pi_p(p)))
            }
            OpKind::Pi { input, out } => (input, out, Box::new(|q| q.op_pi())),
            OpKind::Theta { input, out } => (input, out, Box::new(|q| q.op_theta())),
        };
    let series = read_qexp(input)?;
    let result = apply(&series)?;
    emit(out.as_deref(), &write_qexp(&result)?)?;
    Ok(0)
}

fn cmd_compare(args: &CompareArgs, jobs: usize) -> Result<i32> {
    match args.mode {
        CompareMode::Repr => {
            let (n, ell) = require_bounds(args, "repr")?;
            let left = parse_repr(&read_file(Path::new(&args.left))?)?;
            let right = parse_repr(&read_file(Path::new(&args.right))?)?;
            let verdict = if jobs != 1 {
                compare_2dim_parallel(&left, &right, n, ell)?
            } else {
                compare_2dim(&left, &right, n, ell)?
            };
            Ok(print_verdict(&verdict))
        }
        CompareMode::Series => {
            let left = read_qexp(Path::new(&args.left))?;
            let right = read_qexp(Path::new(&args.right))?;
            Ok(print_congruence(&sturm_compare(&left, &right)?))
        }
        CompareMode::Char => {
            let (n, ell) = require_bounds(args, "char")?;
            let left = parse_character_spec(&args.left)?;
            let right = parse_character_spec(&args.right)?;
            Ok(print_verdict(&compare_1dim(&left, &right, n, ell)?))
        }
    }
}

fn require_bounds(args: &CompareArgs, mode: &str) -> Result<(u64, u64)> {
    match (args.n, args.ell) {
        (Some(n), Some(ell)) => Ok((n, ell)),
        _ => bail!("mode {mode} needs --N and --ell"),
    }
}

fn print_verdict(v: &Verdict) -> i32 {
    match v {
        Verdict::Isomorphic {
            kappa_used,
            primes_checked,
        } => {
            println!("verdict: isomorphic");
            println!("kappa: {kappa_used}");
            println!("primes-checked: {primes_checked}");
            0
        }
        Verdict::DistinguishedAt { p, left, right } => {
            println!("verdict: distinguished");
            println!("prime: {p}");
            println!("left-trace: {}", left.trace);
            println!("left-det: {}", left.det);
            println!("right-trace: {}", right.trace);
            println!("right-det: {}", right.det);
            1
        }
        Verdict::Indeterminate { reason } => {
            println!("verdict: indeterminate");
            println!("reason: {reason}");
            2
        }
    }
}

fn print_congruence(v: &CongruenceVerdict) -> i32 {
    match v {
        CongruenceVerdict::Congruent {
            bound,
            coefficients_checked,
        } => {
            println!("verdict: congruent");
            println!("bound: {bound}");
            println!("coefficients-checked: {coefficients_checked}");
            0
        }
        CongruenceVerdict::MismatchAt { index, left, right } => {
            println!("verdict: mismatch");
            println!("index: {index}");
            println!("left: {left}");
            println!("right: {right}");
            1
        }
    }
}

fn cmd_charinfo(spec: &str) -> Result<i32> {
    let chi = parse_character_spec(spec)?;
    println!("character: {}", write_character_spec(&chi));
    println!("modulus: {}", chi.modulus());
    println!("conductor: {}", chi.conductor());
    println!("parity: {}", if chi.is_odd() { "odd" } else { "even" });
    println!("order: {}", chi.value_order());
    println!(
        "primitive-part: {}",
        write_character_spec(&chi.primitive_part()?)
    );
    Ok(0)
}

fn parse_rational_flag(s: &str) -> Result<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: i64 = num.trim().parse().context("numerator")?;
    let den: i64 = den.trim().parse().context("denominator")?;
    if den <= 0 {
        bail!("denominator must be positive");
    }
    Ok(rat(num, den))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_qexp(path: &Path) -> Result<QExpansion> {
    Ok(parse_qexp(&read_file(path)?)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
