use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;
use serde_json::Value;

use lhospital::error::Error;
use lhospital::fuzz::{fuzz_theorem, FuzzSpec, RhoChoice, SignChoice};
use lhospital::generator::{Generator, ZeroExtended};
use lhospital::io::{parse_scalar, read_seq, SeqFile};
use lhospital::limits::{default_horizon, limit_estimate, LimitCase};
use lhospital::logops::{apply_l_head, apply_r_tail, log_shape, DominationCertificate};
use lhospital::patterns::{classify, table1_predict, verify_theorem, Direction};
use lhospital::seqcore::{reflect_h, ComparisonPolicy, Mode, Scalar, Seq, Sign, DEFAULT_EPS};
use lhospital::tankex::{example_sequences, to_seq, Ext, DEFAULT_FIGURE_KS, FIGURE_OFFSET};

#[derive(Parser)]
#[command(name = "lhospital", version, about = "Monotonicity patterns and limits of ratio sequences f/g")]
struct Cli {
    /// Arithmetic mode; inferred from input files when omitted.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Tolerance band for approximate comparisons.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Seed for all randomness.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputArg::Json)]
    output: OutputArg,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutputArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirArg {
    Up,
    Down,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Pos,
    Neg,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    /// |g| increases to infinity
    I,
    /// f and g both tend to zero
    Ii,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    /// tail sums R^k
    R,
    /// head sums L^k
    L,
    /// index reflection n -> -n
    T,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the monotonicity pattern of a sequence.
    Analyze { file: PathBuf },
    /// Predicted pattern of r from the direction of ρ and the sign of gΔg.
    Predict {
        #[arg(long, value_enum)]
        rho: DirArg,
        #[arg(long, value_enum)]
        sign: SignArg,
    },
    /// Check the predicted pattern of f/g on data.
    Verify { f: PathBuf, g: PathBuf },
    /// Estimate lim f/g through ρ = Δf/Δg.
    Limit {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long)]
        horizon: Option<i64>,
        #[arg(long, default_value_t = 1)]
        start: i64,
    },
    /// Apply R^k, L^k or T to a sequence.
    Op {
        #[arg(long, value_enum)]
        kind: OpArg,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Truncation point for R^k (defaults to the end of the data).
        #[arg(long)]
        horizon: Option<i64>,
        /// Start index of a geometric domination certificate for R^k.
        #[arg(long, requires = "cert_ratio")]
        cert_from: Option<i64>,
        /// Ratio q < 1 of the certificate: p_{j+1} <= q p_j for j >= cert_from.
        #[arg(long, requires = "cert_from")]
        cert_ratio: Option<String>,
        file: PathBuf,
    },
    /// Log-convexity / log-concavity verdict with witness.
    Logshape { file: PathBuf },
    /// The factorial-over-(n/e)^n example.
    Example(ExampleArgs),
    /// Random instances of the pattern theorem.
    Fuzz {
        #[arg(long, default_value_t = 10_000)]
        instances: u64,
        #[arg(long, default_value_t = 40)]
        max_len: usize,
        #[arg(long, default_value = "either")]
        rho: String,
        #[arg(long, default_value = "either")]
        g_sign: String,
    },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct ExampleArgs {
    #[command(subcommand)]
    sub: Option<ExampleSub>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_FIGURE_KS.to_vec())]
    k_list: Vec<usize>,
    /// Right end of the window [0, K].
    #[arg(long = "K", default_value_t = 30)]
    big_k: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Emit r^(α) for this offset instead of the normalized threshold curves.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = FIGURE_OFFSET)]
    offset: f64,
}

#[derive(Subcommand)]
enum ExampleSub {
    /// Table of the thresholds α_k.
    Thresholds {
        #[arg(long, default_value_t = 12)]
        max_k: usize,
    },
    /// Pattern changes of r^(α) around α_k.
    Transition {
        #[arg(long)]
        k: usize,
        #[arg(long = "K", default_value_t = 30)]
        big_k: usize,
    },
}

enum Failure {
    Violated(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TheoremViolated { .. } => Failure::Violated(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn with_schema<T: Serialize>(x: &T) -> Value {
    let mut v = serde_json::to_value(x).expect("serializable");
    match v {
        Value::Object(ref mut m) => {
            m.insert("schema".into(), Value::from(1));
            v
        }
        other => serde_json::json!({ "schema": 1, "result": other }),
    }
}

fn print_json<T: Serialize>(x: &T) {
    println!("{}", serde_json::to_string_pretty(&with_schema(x)).expect("serializable"));
}

fn print_seq(s: &Seq, output: OutputArg) {
    match output {
        OutputArg::Json => print_json(&SeqFile::from_seq(s)),
        OutputArg::Csv => {
            println!("n,value");
            for (n, v) in s.iter() {
                println!("{n},{v}");
            }
        }
    }
}

struct Ctx {
    mode: Option<Mode>,
    eps: f64,
    output: OutputArg,
}

impl Ctx {
    fn policy(&self, mode: Mode) -> ComparisonPolicy {
        match mode {
            Mode::Exact => ComparisonPolicy::exact(),
            Mode::Approx => ComparisonPolicy::approx(self.eps),
        }
    }

    /// Reads a sequence, converted to `--mode` when given.
    fn load(&self, path: &Path) -> Result<Seq, Failure> {
        let s = read_seq(path).map_err(|e| Failure::Usage(e.to_string()))?;
        match self.mode {
            Some(m) => Ok(s.to_mode(m)?),
            None => Ok(s),
        }
    }
}

fn analyze(ctx: &Ctx, file: &Path) -> CmdResult {
    let s = ctx.load(file)?;
    let rep = classify(&s, &ctx.policy(s.mode()))?;
    if ctx.output == OutputArg::Csv {
        println!("pattern,ell,k,strict_form");
        println!("{:?},{},{},{}", rep.pattern, rep.ell, rep.k, rep.strict_form);
    } else {
        print_json(&rep);
    }
    Ok(())
}

fn predict(rho: DirArg, sign: SignArg) -> CmdResult {
    let d = match rho {
        DirArg::Up => Direction::Up,
        DirArg::Down => Direction::Down,
    };
    let s = match sign {
        SignArg::Pos => Sign::Positive,
        SignArg::Neg => Sign::Negative,
    };
    #[derive(Serialize)]
    struct Row {
        rho_pattern: Direction,
        g_dg_sign: Sign,
        r_pattern: lhospital::patterns::Shape,
    }
    print_json(&Row { rho_pattern: d, g_dg_sign: s, r_pattern: table1_predict(d, s) });
    Ok(())
}

fn verify(ctx: &Ctx, f: &Path, g: &Path) -> CmdResult {
    let (f, g) = (ctx.load(f)?, ctx.load(g)?);
    if f.mode() != g.mode() {
        return Err(Failure::Usage("f and g use different modes; pass --mode".into()));
    }
    match verify_theorem(&f, &g, &ctx.policy(f.mode())) {
        Ok(v) => {
            print_json(&v);
            Ok(())
        }
        Err(e @ Error::TheoremViolated { .. }) => {
            if let Error::TheoremViolated { witness, mode } = &e {
                print_json(&serde_json::json!({ "violated": true, "witness": witness, "mode": mode }));
            }
            Err(e.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_gen(s: &str) -> Result<Generator, Failure> {
    s.parse().map_err(|e: Error| Failure::Usage(format!("generator {s:?}: {e}")))
}

fn limit(ctx: &Ctx, f: &str, g: &str, case: CaseArg, horizon: Option<i64>, start: i64) -> CmdResult {
    let (fg, gg) = (parse_gen(f)?, parse_gen(g)?);
    let mode = ctx.mode.unwrap_or(Mode::Approx);
    let horizon = horizon.unwrap_or_else(|| default_horizon(mode));
    let case = match case {
        CaseArg::I => LimitCase::GUnbounded,
        CaseArg::Ii => LimitCase::BothVanish,
    };
    let est = limit_estimate(&fg, &gg, case, start, horizon, &ctx.policy(mode))?;
    print_json(&est);
    Ok(())
}

#[derive(Serialize)]
struct OpOutput {
    a: i64,
    values: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    remainder_bounds: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    horizon: Option<i64>,
}

impl OpOutput {
    fn plain(s: &Seq) -> Self {
        let f = SeqFile::from_seq(s);
        OpOutput { a: f.a, values: f.values, remainder_bounds: None, horizon: None }
    }
}

#[allow(clippy::too_many_arguments)]
fn op(
    ctx: &Ctx,
    kind: OpArg,
    k: u64,
    horizon: Option<i64>,
    cert_from: Option<i64>,
    cert_ratio: Option<&str>,
    file: &Path,
) -> CmdResult {
    let p = ctx.load(file)?;
    let out = match kind {
        OpArg::T => OpOutput::plain(&reflect_h(&p)),
        OpArg::L => OpOutput::plain(&apply_l_head(&p, k)?),
        OpArg::R => {
            let horizon = horizon.unwrap_or(p.b());
            let cert = match (cert_from, cert_ratio) {
                (Some(from), Some(q)) => {
                    let ratio = match parse_scalar(q)? {
                        Scalar::Exact(r) => r,
                        Scalar::Approx(x) => BigRational::from_float(x).ok_or_else(|| Failure::Usage(format!("bad ratio {q}")))?,
                    };
                    DominationCertificate::Geometric { from, ratio }
                }
                _ => DominationCertificate::FiniteSupport { last: p.b() },
            };
            let rt = apply_r_tail(&ZeroExtended(&p), k, p.domain(), horizon, Some(&cert), &ctx.policy(p.mode()))?;
            let f = SeqFile::from_seq(&rt.seq);
            OpOutput { a: f.a, values: f.values, remainder_bounds: Some(rt.remainder_bounds), horizon: Some(rt.horizon) }
        }
    };
    if ctx.output == OutputArg::Csv {
        println!("n,value");
        for (i, v) in out.values.iter().enumerate() {
            println!("{},{v}", out.a + i as i64);
        }
    } else {
        print_json(&out);
    }
    Ok(())
}

fn logshape(ctx: &Ctx, file: &Path) -> CmdResult {
    let p = ctx.load(file)?;
    let rep = log_shape(&p, &ctx.policy(p.mode()))?;
    print_json(&rep);
    Ok(())
}

fn example(ctx: &Ctx, args: &ExampleArgs) -> CmdResult {
    match &args.sub {
        Some(ExampleSub::Thresholds { max_k }) => {
            let s = example_sequences((*max_k).max(1) + 1)?;
            print_json(&s.threshold_table(*max_k)?);
            Ok(())
        }
        Some(ExampleSub::Transition { k, big_k }) => {
            let s = example_sequences(*big_k)?;
            print_json(&s.pattern_transition_check(*k)?);
            Ok(())
        }
        None => {
            let s = example_sequences(args.big_k)?;
            if let Some(alpha) = args.alpha {
                if !alpha.is_finite() {
                    return Err(Failure::Usage("--alpha must be finite".into()));
                }
                let r = to_seq(&s.r_alpha(&Ext::from_f64(alpha))?);
                print_seq(&r, ctx.output);
                return Ok(());
            }
            let t = s.figure_table(&args.k_list, args.offset)?;
            match args.format {
                FormatArg::Csv => print!("{}", t.to_csv()),
                FormatArg::Svg => print!("{}", t.to_svg()),
            }
            Ok(())
        }
    }
}

fn fuzz(seed: u64, instances: u64, max_len: usize, rho: &str, g_sign: &str) -> CmdResult {
    let spec = FuzzSpec {
        instances,
        max_len,
        rho_direction: rho.parse::<RhoChoice>()?,
        g_sign: g_sign.parse::<SignChoice>()?,
        seed,
    };
    let rep = fuzz_theorem(&spec)?;
    print_json(&rep);
    if rep.ok() {
        Ok(())
    } else {
        Err(Failure::Violated(format!("{} failing instances", instances - rep.passed)))
    }
}

fn run(cli: Cli) -> CmdResult {
    let ctx = Ctx {
        mode: cli.mode.map(|m| match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Approx => Mode::Approx,
        }),
        eps: cli.eps,
        output: cli.output,
    };
    if !(ctx.eps >= 0.0 && ctx.eps.is_finite()) {
        return Err(Failure::Usage(format!("--eps must be a finite nonnegative number, got {}", ctx.eps)));
    }
    match &cli.cmd {
        Cmd::Analyze { file } => analyze(&ctx, file),
        Cmd::Predict { rho, sign } => predict(*rho, *sign),
        Cmd::Verify { f, g } => verify(&ctx, f, g),
        Cmd::Limit { f, g, case, horizon, start } => limit(&ctx, f, g, *case, *horizon, *start),
        Cmd::Op { kind, k, horizon, cert_from, cert_ratio, file } => {
            op(&ctx, *kind, *k, *horizon, *cert_from, cert_ratio.as_deref(), file)
        }
        Cmd::Logshape { file } => logshape(&ctx, file),
        Cmd::Example(args) => example(&ctx, args),
        Cmd::Fuzz { instances, max_len, rho, g_sign } => fuzz(cli.seed, *instances, *max_len, rho, g_sign),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violated(m)) => {
            eprintln!("violated: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
