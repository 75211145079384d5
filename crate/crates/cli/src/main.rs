use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pfcft::cfft::Scheme;
use pfcft::cse::CseConfig;
use pfcft::oracle::naive_dft;
use pfcft::pfcft::{build_pfcft_cached, rank_decompositions, PlanConfig, SubPlanCache, SubReports, DEFAULT_MAX_FACTOR};
use pfcft::planfile::PlanFile;
use pfcft::reference::{parse_factors, reference_tables};
use pfcft::structure::{cyclotomic_cosets, format_decomposition};
use pfcft::{make_field, FieldCtx, FieldElement};

mod tables;
mod vectors;

#[derive(Parser)]
#[command(name = "pfcft", version, about = "Prime-factor cyclotomic Fourier transforms over GF(2^l)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Seed for CSE tie-breaking and random test vectors.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Independent CSE runs per matrix.
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
    /// Cap on CSE extraction rounds per run.
    #[arg(long, global = true)]
    max_passes: Option<usize>,
    /// Largest sub-transform length a decomposition may use.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_FACTOR)]
    max_factor: usize,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

impl Global {
    fn plan_config(&self, scheme: Option<Scheme>) -> PlanConfig {
        PlanConfig {
            cse: CseConfig {
                seed: self.seed,
                restarts: self.restarts.max(1),
                max_passes: self.max_passes.unwrap_or(usize::MAX),
                ..CseConfig::default()
            },
            max_factor: self.max_factor,
            scheme,
        }
    }
}

#[derive(Args, Clone)]
struct Target {
    /// Transform length; must divide 2^l - 1.
    #[arg(long)]
    n: usize,
    /// Field degree (4..=12); defaults to the smallest that admits N.
    #[arg(long)]
    l: Option<u32>,
    /// Factor list such as `3,85` or `3x85`; omitted means the cheapest decomposition.
    #[arg(long)]
    factors: Option<String>,
    /// Force scheme 1 or 2 for every sub-transform.
    #[arg(long)]
    scheme: Option<u8>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Formula,
    Achieved,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Reference,
    Achieved,
}

#[derive(Subcommand)]
enum Command {
    /// Build and optimize a plan, write it to a file and print its cost.
    Plan {
        #[command(flatten)]
        target: Target,
        /// Output path [default: pfcft-<N>.plan].
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a plan file on an input vector (hex, one element per line).
    Transform {
        #[arg(long)]
        plan: PathBuf,
        /// Input file; stdin when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compare plan execution against the direct DFT.
    Verify {
        #[arg(long, required_unless_present = "plan")]
        n: Option<usize>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        factors: Option<String>,
        /// Check a stored plan file instead of building one.
        #[arg(long, conflicts_with_all = ["n", "l", "factors"])]
        plan: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Time plan construction and execution.
    Bench {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 100)]
        iters: usize,
    },
    /// Print convolution, CFFT and PFCFT cost tables.
    Tables {
        #[arg(long, value_enum, default_value = "formula")]
        mode: Mode,
        #[arg(long, default_value_t = 4)]
        l_min: u32,
        #[arg(long, default_value_t = 12)]
        l_max: u32,
    },
    /// List the cyclotomic cosets of 2 modulo N.
    Cosets {
        #[arg(long)]
        n: usize,
    },
    /// Rank the coprime decompositions of N by total cost.
    Decompose {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, value_enum, default_value = "reference")]
        source: Source,
    },
}

/// Smallest supported degree `l` with `n | 2^l - 1`.
fn smallest_degree(n: usize) -> Result<u32> {
    (pfcft::gf::MIN_DEGREE..=pfcft::gf::MAX_DEGREE)
        .find(|&l| ((1usize << l) - 1).is_multiple_of(n))
        .with_context(|| format!("{n} divides no 2^l - 1 with 4 <= l <= 12"))
}

fn field_for(n: usize, l: Option<u32>) -> Result<FieldCtx> {
    let l = match l {
        Some(l) => l,
        None => smallest_degree(n)?,
    };
    let ctx = make_field(l)?;
    if n == 0 || ctx.order() % n != 0 {
        bail!("{n} does not divide 2^{l} - 1 = {}", ctx.order());
    }
    Ok(ctx)
}

fn parse_scheme(s: Option<u8>) -> Result<Option<Scheme>> {
    s.map(|v| v.to_string().parse::<Scheme>()).transpose().context("scheme must be 1 or 2")
}

/// Builds the requested plan; without explicit factors the decomposition with
/// the lowest achieved total wins.
fn build_plan(global: &Global, target: &Target) -> Result<PlanFile> {
    let ctx = field_for(target.n, target.l)?;
    let cfg = global.plan_config(parse_scheme(target.scheme)?);
    let mut cache = SubPlanCache::new(&ctx, &cfg);
    let factors = match &target.factors {
        Some(text) => parse_factors(text)?,
        None => {
            let ranked = rank_decompositions(ctx.degree(), target.n, cfg.max_factor, SubReports::Achieved(&mut cache));
            match ranked.into_iter().next() {
                Some((f, _)) => f,
                None if target.n <= cfg.max_factor => vec![target.n],
                None => bail!("no decomposition of {} with factors <= {}", target.n, cfg.max_factor),
            }
        }
    };
    let plan = build_pfcft_cached(&mut cache, target.n, &factors)?;
    Ok(PlanFile::from(&plan))
}

fn load_plan(path: &PathBuf) -> Result<PlanFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

fn random_vector(rng: &mut ChaCha8Rng, ctx: &FieldCtx, n: usize) -> Vec<FieldElement> {
    (0..n).map(|_| FieldElement(rng.gen_range(0..ctx.size()) as u16)).collect()
}

fn cmd_verify(global: &Global, plan: &PlanFile, trials: usize) -> Result<bool> {
    let ctx = plan.ctx();
    let n = plan.n();
    let alpha = ctx.nth_root(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(global.seed);
    let mut inputs: Vec<(String, Vec<FieldElement>)> = (0..trials)
        .map(|t| (format!("random #{t}"), random_vector(&mut rng, ctx, n)))
        .collect();
    if n <= 63 {
        for i in 0..n {
            let mut e = vec![FieldElement::ZERO; n];
            e[i] = FieldElement::ONE;
            inputs.push((format!("basis e{i}"), e));
        }
    }
    let mut failures = 0;
    for (name, f) in &inputs {
        let got = plan.execute(f)?;
        let want = naive_dft(ctx, alpha, f)?;
        if got != want {
            failures += 1;
            if failures <= 5 {
                let k = got.iter().zip(&want).position(|(a, b)| a != b).unwrap_or(0);
                println!("mismatch on {name}: F[{k}] = {} expected {}", got[k], want[k]);
            }
        }
    }
    let factors: Vec<String> = plan.factors().iter().map(|f| f.to_string()).collect();
    println!(
        "verify N={n} field={} factors={}: {}/{} vectors agree",
        ctx,
        factors.join("x"),
        inputs.len() - failures,
        inputs.len()
    );
    Ok(failures == 0)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let global = &cli.global;
    if global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(global.threads)
            .build_global()
            .context("configuring thread pool")?;
    }
    match &cli.command {
        Command::Plan { target, out } => {
            let plan = build_plan(global, target)?;
            let path = out.clone().unwrap_or_else(|| PathBuf::from(format!("pfcft-{}.plan", target.n)));
            fs::write(&path, plan.to_string()).with_context(|| format!("writing {}", path.display()))?;
            let factors: Vec<String> = plan.factors().iter().map(|f| f.to_string()).collect();
            println!(
                "{} field={} {}",
                format_decomposition(plan.n(), &plan.factors()),
                plan.ctx(),
                plan.complexity()
            );
            println!("wrote {} (factors={})", path.display(), factors.join("x"));
        }
        Command::Transform { plan, input, out } => {
            let plan = load_plan(plan)?;
            let text = match input {
                Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
                None => std::io::read_to_string(std::io::stdin()).context("reading stdin")?,
            };
            let f = vectors::parse(&text, plan.ctx())?;
            if f.len() != plan.n() {
                bail!("input has {} elements, plan expects {}", f.len(), plan.n());
            }
            let spectrum = vectors::format(&plan.execute(&f)?);
            match out {
                Some(p) => fs::write(p, spectrum).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{spectrum}"),
            }
        }
        Command::Verify {
            n,
            l,
            factors,
            plan,
            trials,
        } => {
            let plan = match plan {
                Some(path) => load_plan(path)?,
                None => build_plan(
                    global,
                    &Target {
                        n: n.expect("clap enforces --n"),
                        l: *l,
                        factors: factors.clone(),
                        scheme: None,
                    },
                )?,
            };
            if !cmd_verify(global, &plan, *trials)? {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bench { target, iters } => {
            let start = Instant::now();
            let plan = build_plan(global, target)?;
            let built = start.elapsed();
            let mut rng = ChaCha8Rng::seed_from_u64(global.seed);
            let f = random_vector(&mut rng, plan.ctx(), plan.n());
            let iters = (*iters).max(1);
            let start = Instant::now();
            let mut sink = FieldElement::ZERO;
            for _ in 0..iters {
                sink ^= plan.execute(&f)?[0];
            }
            let per = start.elapsed() / iters as u32;
            let r = plan.complexity();
            println!(
                "{} field={}",
                format_decomposition(plan.n(), &plan.factors()),
                plan.ctx()
            );
            println!("build      {built:?}");
            println!("execute    {per:?} per transform ({iters} runs, check {sink})");
            println!("field ops  {} mult + {} add per transform (total {})", r.mult, r.add, r.total);
            let naive = plan.n() * plan.n();
            println!("direct DFT {naive} mult + {} add", plan.n() * (plan.n() - 1));
        }
        Command::Tables { mode, l_min, l_max } => {
            let cfg = global.plan_config(None);
            match mode {
                Mode::Formula => tables::formula(*l_min, *l_max),
                Mode::Achieved => tables::achieved(*l_min, *l_max, &cfg)?,
            }
        }
        Command::Cosets { n } => {
            for c in cyclotomic_cosets(*n)? {
                println!("{c}");
            }
        }
        Command::Decompose { n, l, source } => {
            let ctx = field_for(*n, *l)?;
            let cfg = global.plan_config(None);
            let mut cache = SubPlanCache::new(&ctx, &cfg);
            let src = match source {
                Source::Reference => SubReports::Reference(reference_tables()),
                Source::Achieved => SubReports::Achieved(&mut cache),
            };
            let ranked = rank_decompositions(ctx.degree(), *n, cfg.max_factor, src);
            if ranked.is_empty() {
                bail!("no decomposition of {n} with available sub-reports and factors <= {}", cfg.max_factor);
            }
            for (i, (factors, r)) in ranked.iter().enumerate() {
                let mark = if i == 0 { "  best" } else { "" };
                println!("{:<24} {r}{mark}", format_decomposition(*n, factors));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
