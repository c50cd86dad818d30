use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use skewreg::gabidulin::{add_words, random_messages, random_rank_error, GabidulinCode};
use skewreg::gen::{instance_with_mu, random_instance, Shape};
use skewreg::{solve, verify_solution, Engine, Error, Field, FieldParams, InstanceFile, SolutionFile};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "skewreg", version, about = "Shift register synthesis over skew polynomial rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write the solution JSON.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Dd)]
        engine: EngineArg,
        /// Solution path; the solution goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution against an instance: exit 0 if valid, 1 if not.
    Verify { instance: PathBuf, solution: PathBuf },
    /// Generate a random instance.
    Gen {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long, default_value_t = 8)]
        max_deg_g: usize,
        #[arg(long, default_value_t = 0)]
        max_gamma: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ShapeArg::Generic)]
        shape: ShapeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Field-operation counts over a ladder of mu values (CSV).
    Bench {
        #[command(flatten)]
        field: FieldArgs,
        /// Comma-separated mu values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        mu: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long, value_enum, default_value_t = BenchEngine::Dd)]
        engine: BenchEngine,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ShapeArg::Monomial)]
        shape: ShapeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interleaved Gabidulin encode/decode demo.
    Gabidulin {
        #[arg(value_enum)]
        mode: GabidulinMode,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Comma-separated dimensions, one per interleaved code.
        #[arg(long, value_delimiter = ',', default_value = "4")]
        k: Vec<usize>,
        /// Comma-separated error ranks; defaults to 0..=unique radius for
        /// roundtrip and 0..=interleaved radius + 1 for trials.
        #[arg(long, value_delimiter = ',')]
        t: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct FieldArgs {
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 8)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Comma-separated modulus coefficients, constant term first; defaults to
    /// the irreducible polynomial of smallest encoding.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

impl FieldArgs {
    fn params(&self) -> Result<Arc<FieldParams>, Failure> {
        let params = match &self.modulus {
            Some(c) => FieldParams::new(self.p, self.m, self.s, c.clone()),
            None => FieldParams::with_default_modulus(self.p, self.m, self.s),
        };
        params.map(Arc::new).map_err(Failure::input)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Ms,
    Dd,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Ms => Engine::Ms,
            EngineArg::Dd => Engine::Dd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchEngine {
    Ms,
    Dd,
    Both,
}

impl BenchEngine {
    fn engines(self) -> Vec<Engine> {
        match self {
            BenchEngine::Ms => vec![Engine::Ms],
            BenchEngine::Dd => vec![Engine::Dd],
            BenchEngine::Both => vec![Engine::Dd, Engine::Ms],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Generic,
    Monomial,
    Gao,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Shape {
        match s {
            ShapeArg::Generic => Shape::Generic,
            ShapeArg::Monomial => Shape::Monomial,
            ShapeArg::Gao => Shape::Gao,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GabidulinMode {
    Roundtrip,
    Trials,
}

/// An error message with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_INTERNAL, message: e.to_string() }
    }

    fn verify(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_VERIFY, message: msg.into() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(instance: &Path, engine: Engine, out: Option<&Path>) -> Result<(), Failure> {
    let file = InstanceFile::parse(&read(instance)?).map_err(Failure::input)?;
    let problem = file.to_problem().map_err(Failure::input)?;
    let sol = solve(&problem, engine).map_err(Failure::internal)?;
    if !verify_solution(&problem, &sol.lambda, &sol.omega) {
        return Err(Failure::internal("solver returned an invalid solution"));
    }
    let ops = sol.stats.ops;
    let summary = format!(
        "deg_lambda={} engine={} field_ops={} add={} mul={} inv={} frob={} transforms={}",
        sol.deg_lambda(),
        engine,
        ops.total(),
        ops.add,
        ops.mul,
        ops.inv,
        ops.frob,
        sol.stats.transforms
    );
    let json = SolutionFile::from_solution(&problem, &sol).to_json();
    match out {
        Some(_) => {
            emit(out, &json)?;
            println!("{summary}");
        }
        None => {
            print!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_verify(instance: &Path, solution: &Path) -> Result<(), Failure> {
    let file = InstanceFile::parse(&read(instance)?).map_err(Failure::input)?;
    let sol = SolutionFile::parse(&read(solution)?).map_err(Failure::input)?;
    let problem = file.to_problem().map_err(Failure::input)?;
    let (lambda, omega) = sol.to_polys(&problem).map_err(Failure::input)?;
    if !lambda.is_monic() {
        return Err(Failure::verify("lambda is not monic"));
    }
    if lambda.degree() != Some(sol.deg_lambda) {
        return Err(Failure::verify("deg_lambda does not match lambda"));
    }
    if !verify_solution(&problem, &lambda, &omega) {
        return Err(Failure::verify("congruence or degree constraint violated"));
    }
    println!("ok deg_lambda={}", sol.deg_lambda);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    field: &FieldArgs,
    ell: usize,
    max_deg_g: usize,
    max_gamma: usize,
    seed: u64,
    shape: Shape,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let params = field.params()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let problem = random_instance(params, ell, max_deg_g, max_gamma, shape, &mut rng).map_err(Failure::input)?;
    emit(out, &InstanceFile::from_problem(&problem).to_json())
}

struct BenchRecord {
    engine: Engine,
    ell: usize,
    mu: usize,
    field_ops: u64,
    transforms: u64,
    wall_time_ms: f64,
    seed: u64,
}

/// Instance seed for one trial; the rung selects the ChaCha stream.
fn bench_rng(seed: u64, trial: u64, mu: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial));
    rng.set_stream(mu as u64);
    rng
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    field: &FieldArgs,
    mus: &[usize],
    ell: usize,
    engine: BenchEngine,
    trials: u64,
    seed: u64,
    shape: Shape,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let params = field.params()?;
    if ell == 0 {
        return Err(Failure::input("ell must be at least 1"));
    }
    if mus.contains(&0) {
        return Err(Failure::input("mu values must be positive"));
    }
    let tasks: Vec<(Engine, usize, u64)> = engine
        .engines()
        .into_iter()
        .flat_map(|e| mus.iter().flat_map(move |&mu| (0..trials).map(move |t| (e, mu, t))))
        .collect();
    let mut rows = tasks
        .par_iter()
        .map(|&(engine, mu, trial)| -> Result<BenchRecord, Failure> {
            let problem = instance_with_mu(params.clone(), ell, mu, shape, &mut bench_rng(seed, trial, mu))
                .map_err(Failure::input)?;
            let start = Instant::now();
            let sol = solve(&problem, engine).map_err(Failure::internal)?;
            let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            if engine == Engine::Ms && sol.stats.transforms > problem.transform_bound() {
                return Err(Failure::internal(format!(
                    "MS used {} transformations, bound {}",
                    sol.stats.transforms,
                    problem.transform_bound()
                )));
            }
            Ok(BenchRecord {
                engine,
                ell,
                mu,
                field_ops: sol.stats.field_ops(),
                transforms: sol.stats.transforms,
                wall_time_ms,
                seed: seed.wrapping_add(trial),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort_by_key(|r| (r.engine.to_string(), r.mu, r.seed));
    let mut csv = String::from("engine,ell,mu,field_ops,transforms,wall_time_ms,seed\n");
    for r in rows {
        writeln!(csv, "{},{},{},{},{},{:.3},{}", r.engine, r.ell, r.mu, r.field_ops, r.transforms, r.wall_time_ms, r.seed)
            .expect("write to string");
    }
    emit(out, &csv)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gabidulin(
    mode: GabidulinMode,
    field: &FieldArgs,
    n: usize,
    ks: Vec<usize>,
    ts: Vec<usize>,
    trials: u64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let params = field.params()?;
    let fld = Field::new(params.clone());
    let code = GabidulinCode::with_standard_points(&fld, n, ks).map_err(Failure::input)?;
    let ts = if !ts.is_empty() {
        ts
    } else if mode == GabidulinMode::Roundtrip {
        (0..=code.unique_radius()).collect()
    } else {
        (0..=(code.interleaved_radius() + 1).min(n)).collect()
    };
    if let Some(&t) = ts.iter().find(|&&t| t > n) {
        return Err(Failure::input(format!("t = {t} exceeds n = {n}")));
    }
    let tasks: Vec<(usize, u64)> = ts.iter().flat_map(|&t| (0..trials).map(move |i| (t, i))).collect();
    let results = tasks
        .par_iter()
        .map(|&(t, trial)| -> Result<(usize, bool, Option<u64>), Failure> {
            let f = Field::new(params.clone());
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial));
            rng.set_stream(t as u64);
            let msgs = random_messages(&f, code.ks(), &mut rng);
            let word = code.encode(&f, &msgs).map_err(Failure::internal)?;
            let err = random_rank_error(&f, n, t, code.ell(), &mut rng);
            match code.decode(&f, &add_words(&f, &word, &err)) {
                Ok(o) => Ok((t, o.messages == msgs, Some(o.stats.field_ops()))),
                Err(Error::DecodingFailure(_)) => Ok((t, false, None)),
                Err(e) => Err(Failure::internal(e)),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("t,trials,successes,mean_field_ops\n");
    let mut failed_within_radius = false;
    for &t in &ts {
        let rows: Vec<_> = results.iter().filter(|r| r.0 == t).collect();
        let successes = rows.iter().filter(|r| r.1).count() as u64;
        // averaged over decodes that returned a candidate
        let ops: Vec<u64> = rows.iter().filter_map(|r| r.2).collect();
        let mean = if ops.is_empty() { 0.0 } else { ops.iter().sum::<u64>() as f64 / ops.len() as f64 };
        writeln!(csv, "{t},{trials},{successes},{mean:.1}").expect("write to string");
        if t <= code.unique_radius() && successes < trials {
            failed_within_radius = true;
        }
    }
    emit(out, &csv)?;
    if mode == GabidulinMode::Roundtrip && failed_within_radius {
        return Err(Failure::verify("decoding failed within the unique radius"));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { instance, engine, out } => cmd_solve(&instance, engine.into(), out.as_deref()),
        Command::Verify { instance, solution } => cmd_verify(&instance, &solution),
        Command::Gen { field, ell, max_deg_g, max_gamma, seed, shape, out } => {
            cmd_gen(&field, ell, max_deg_g, max_gamma, seed, shape.into(), out.as_deref())
        }
        Command::Bench { field, mu, ell, engine, trials, seed, shape, out } => {
            cmd_bench(&field, &mu, ell, engine, trials, seed, shape.into(), out.as_deref())
        }
        Command::Gabidulin { mode, field, n, k, t, trials, seed, out } => {
            cmd_gabidulin(mode, &field, n, k, t, trials, seed, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
