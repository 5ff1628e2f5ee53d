use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gdsum_core::characters::{psi, CharacterSpec, DirichletCharacter};
use gdsum_core::dedekind::{naive_sum, Context, PrecomputeOptions, DEFAULT_MAX_LEVEL};
use gdsum_core::modgroup::{Mat2, Quotient};
use gdsum_core::rewriter::trace;
use gdsum_core::sampling::{bench_matrix, random_gamma0};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exact generalized Dedekind sums for pairs of primitive Dirichlet characters.
#[derive(Parser, Debug)]
#[command(name = "gdsum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the tables for a character pair and write them to the cache.
    Precompute {
        #[command(flatten)]
        pair: PairArgs,
        /// Rebuild even if a cache file exists.
        #[arg(long)]
        force: bool,
    },
    /// Evaluate one sum.
    Sum {
        #[command(flatten)]
        pair: PairArgs,
        /// Matrix as "a,b;c,d".
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Use the defining double sum instead of the fast path.
        #[arg(long)]
        naive: bool,
        /// Print the rewriting factor by factor.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = QuotientArg::Nearest)]
        quotient: QuotientArg,
    },
    /// Compare the fast path with the defining sum on random inputs.
    Verify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest lower-left entry of the random inputs.
        #[arg(long, default_value_t = 10_000)]
        cmax: u64,
    },
    /// Time the fast path and the defining sum for c = N·k, writing CSV.
    Bench {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        kmin: u64,
        #[arg(long)]
        kmax: u64,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        /// Skip the defining sum above this lower-left entry.
        #[arg(long, default_value_t = 100_000)]
        naive_cutoff: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    /// First character, e.g. "q=4" or "q=5;g=2;v=3/4".
    #[arg(long)]
    chi1: String,
    /// Second character.
    #[arg(long)]
    chi2: String,
    /// Directory holding precomputed tables.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Largest level q1·q2 precomputation accepts.
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
    max_level: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QuotientArg {
    Floor,
    Nearest,
}

impl From<QuotientArg> for Quotient {
    fn from(q: QuotientArg) -> Self {
        match q {
            QuotientArg::Floor => Quotient::Floor,
            QuotientArg::Nearest => Quotient::Nearest,
        }
    }
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Verification,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

struct Pair {
    chi1: DirichletCharacter,
    chi2: DirichletCharacter,
}

impl PairArgs {
    fn resolve(&self) -> Result<Pair> {
        let parse =
            |s: &str| -> Result<DirichletCharacter> { Ok(CharacterSpec::parse(s)?.resolve()?) };
        Ok(Pair {
            chi1: parse(&self.chi1).with_context(|| format!("character {:?}", self.chi1))?,
            chi2: parse(&self.chi2).with_context(|| format!("character {:?}", self.chi2))?,
        })
    }

    fn options(&self) -> PrecomputeOptions {
        PrecomputeOptions {
            max_level: self.max_level,
            ..Default::default()
        }
    }

    fn cache_file(&self, pair: &Pair) -> Option<PathBuf> {
        self.cache_dir
            .as_ref()
            .map(|dir| dir.join(cache_name(pair)))
    }

    /// Loads the cached context if there is one, else builds it and caches
    /// it when a cache directory is configured.
    fn context(&self, pair: &Pair) -> Result<Context> {
        if let Some(path) = self.cache_file(pair).filter(|p| p.exists()) {
            return Context::load(&path).with_context(|| format!("loading {}", path.display()));
        }
        let ctx = Context::precompute_with(&pair.chi1, &pair.chi2, &self.options())?;
        if let Some(path) = self.cache_file(pair) {
            write_cache(&ctx, &path)?;
        }
        Ok(ctx)
    }
}

fn cache_name(pair: &Pair) -> String {
    let clean = |s: String| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect()
    };
    format!(
        "gdsum-{}-{}.json",
        clean(pair.chi1.spec_string()),
        clean(pair.chi2.spec_string())
    )
}

fn write_cache(ctx: &Context, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    ctx.save(path)?;
    Ok(())
}

fn cmd_precompute(pair_args: &PairArgs, force: bool) -> Result<()> {
    let pair = pair_args.resolve()?;
    let dir = pair_args
        .cache_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("gdsum-cache"));
    let path = dir.join(cache_name(&pair));
    if path.exists() && !force {
        let ctx = Context::load(&path).with_context(|| format!("loading {}", path.display()))?;
        println!("cache {} is up to date", path.display());
        print_sizes(&ctx);
        return Ok(());
    }
    let start = Instant::now();
    let ctx = Context::precompute_with(&pair.chi1, &pair.chi2, &pair_args.options())?;
    let elapsed = start.elapsed();
    write_cache(&ctx, &path)?;
    println!("wrote {}", path.display());
    print_sizes(&ctx);
    println!("precompute time: {:.3} s", elapsed.as_secs_f64());
    Ok(())
}

fn print_sizes(ctx: &Context) {
    println!(
        "level N = {}, cyclotomic order L = {}",
        ctx.level(),
        ctx.order()
    );
    println!("Γ0 transversal: {} members", ctx.t_g0().len());
    println!("SL2 transversal: {} members", ctx.t_sl2().len());
    println!("alphabet: {} entries", ctx.alphabet().len());
}

fn cmd_sum(
    pair_args: &PairArgs,
    matrix: &str,
    naive: bool,
    show_trace: bool,
    quotient: Quotient,
) -> Result<()> {
    let pair = pair_args.resolve()?;
    let gamma: Mat2 = matrix
        .parse()
        .with_context(|| format!("matrix {matrix:?}"))?;
    let value = if naive {
        naive_sum(&pair.chi1, &pair.chi2, &gamma)?
    } else {
        let ctx = pair_args.context(&pair)?;
        if show_trace {
            let (g1, g) = ctx.split(&gamma)?;
            let word = ctx.word(&gamma, quotient)?;
            println!("γ = γ1·g with γ1 = {g1}, g = {g}");
            println!("γ1 = {word}");
            for line in trace(&word, ctx.t_sl2())? {
                println!("{line}");
            }
        }
        ctx.fast_sum_with(&gamma, quotient)?
    };
    let (re, im) = value.to_complex_approx();
    println!("{value}");
    println!(
        "≈ {re:.12} {} {:.12}i",
        if im < 0.0 { '-' } else { '+' },
        im.abs()
    );
    Ok(())
}

fn cmd_verify(pair_args: &PairArgs, trials: usize, seed: u64, cmax: u64) -> Result<bool> {
    let pair = pair_args.resolve()?;
    let ctx = pair_args.context(&pair)?;
    let n = ctx.level();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;

    for _ in 0..trials {
        let g = random_gamma0(&mut rng, n, cmax);
        let fast = ctx.fast_sum(&g)?;
        let naive = ctx.naive_sum(&g)?;
        if fast != naive {
            failures += 1;
            println!("mismatch: γ = {g}\n  fast  = {fast}\n  naive = {naive}");
        }
    }
    println!("oracle equivalence: {}/{trials}", trials - failures);

    let mut id_failures = 0usize;
    for _ in 0..trials {
        let x = random_gamma0(&mut rng, n, cmax);
        let y = random_gamma0(&mut rng, n, cmax);
        let lhs = ctx.fast_sum(&(&x * &y))?;
        let rhs = &ctx.fast_sum(&x)? + &(&psi(&pair.chi1, &pair.chi2, &x)? * &ctx.fast_sum(&y)?);
        if lhs != rhs {
            id_failures += 1;
            println!("crossed homomorphism mismatch: γa = {x}, γb = {y}\n  S(γaγb) = {lhs}\n  S(γa) + ψ(γa)S(γb) = {rhs}");
        }
    }
    println!("crossed homomorphism: {}/{trials}", trials - id_failures);
    let ok = failures == 0 && id_failures == 0;
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(ok)
}

fn cmd_bench(
    pair_args: &PairArgs,
    kmin: u64,
    kmax: u64,
    samples: usize,
    naive_cutoff: u64,
    seed: u64,
    output: &Path,
) -> Result<()> {
    anyhow::ensure!(kmin >= 1 && kmin <= kmax, "need 1 ≤ kmin ≤ kmax");
    anyhow::ensure!(samples >= 1, "need at least one sample");
    let pair = pair_args.resolve()?;
    let ctx = pair_args.context(&pair)?;
    let n = ctx.level() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out =
        fs::File::create(output).with_context(|| format!("creating {}", output.display()))?;
    writeln!(out, "k,c,n_samples,fast_mean_s,naive_mean_s")?;
    for k in kmin..=kmax {
        let c = n * k;
        let inputs: Vec<Mat2> = (0..samples)
            .map(|_| bench_matrix(&mut rng, c, Quotient::Nearest))
            .collect();
        let start = Instant::now();
        for g in &inputs {
            ctx.fast_sum(g)?;
        }
        let fast = start.elapsed().as_secs_f64() / samples as f64;
        let naive = if c <= naive_cutoff {
            let start = Instant::now();
            for g in &inputs {
                ctx.naive_sum(g)?;
            }
            format!("{:.9e}", start.elapsed().as_secs_f64() / samples as f64)
        } else {
            String::new()
        };
        writeln!(out, "{k},{c},{samples},{fast:.9e},{naive}")?;
    }
    println!("wrote {} rows to {}", kmax - kmin + 1, output.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Precompute { pair, force } => cmd_precompute(&pair, force)?,
        Command::Sum {
            pair,
            matrix,
            naive,
            trace,
            quotient,
        } => cmd_sum(&pair, &matrix, naive, trace, quotient.into())?,
        Command::Verify {
            pair,
            trials,
            seed,
            cmax,
        } => {
            if !cmd_verify(&pair, trials, seed, cmax)? {
                return Err(Failure::Verification);
            }
        }
        Command::Bench {
            pair,
            kmin,
            kmax,
            samples,
            naive_cutoff,
            seed,
            output,
        } => cmd_bench(&pair, kmin, kmax, samples, naive_cutoff, seed, &output)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
    }
}
