//! Command-line interface: `validate`, `run`, `bounds`, `verify`, `gen` and
//! `simulate` subcommands over the library. Exit codes: 0 success, 1 usage
//! error, 2 runtime error.

use crate::axioms::{
    check_committee_monotonicity, check_iuac, random_election, random_election_with_unanimous,
    verify_pjr_degree, winning_committees, PjrOutcome, DEFAULT_CLASS_CAP,
};
use crate::bounds::{
    curve_to_csv, emit_bound_curve, f_alpha_exact, f_beta, thiele_lower, CurveFamily,
};
use crate::election::{parse_election, serialize_election, Committee, Election, ElectionFormat};
use crate::euclidean::{build_euclidean_election, EuclideanConfig};
use crate::harness::{boxplot_csv, parse_config, run_experiment_with_options, summary_csv};
use crate::phragmen::{run_phragmen, NumericMode, PhragmenRun, PhragmenTrace, DEFAULT_TIE_EPS};
use crate::rules::{parse_rational, CostFunction, RuleSpec, SpeedSchedule, TieRule};
use crate::thiele::{exact_thiele, lambda_score, seq_thiele, DEFAULT_ENUMERATION_CAP};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::fmt::Display;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "phragmen-lab",
    version,
    about = "Committee election rules spanning degressive and regressive proportionality",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    /// `{"candidates": [...], "k": ..., "approvals": [[...]]}`
    Json,
    /// Header `m n k`, then one line of 1-based indices per voter.
    Lines,
}

impl From<FormatArg> for ElectionFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ElectionFormat::Json,
            FormatArg::Lines => ElectionFormat::Lines,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    /// Exact rational arithmetic; refuses irrational cost values.
    Exact,
    /// f64 arithmetic with a relative tie tolerance.
    Float,
    /// Exact where possible, float otherwise.
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// Check that an election document is well formed; prints OK or the
    /// first error.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Run a committee rule on an election file and print the outcome as
    /// JSON.
    Run {
        /// Rule grammar: classic | alpha:const | alpha:geom:<q> (speed q^i) |
        /// alpha:geom1:<q> (speed q^(i-1)) | alpha:pow:<p> | beta:const |
        /// beta:exp:<b>[:<c>] | thiele:pav|av|geom:<q> | seqthiele:...
        #[arg(long)]
        rule: String,
        #[arg(long)]
        election: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// lex, or fixed:<label,...> listing every candidate in priority
        /// order.
        #[arg(long, default_value = "lex")]
        tie: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Relative tie tolerance for float mode.
        #[arg(long, default_value_t = DEFAULT_TIE_EPS)]
        eps: f64,
        /// Include the full purchase trace in the output.
        #[arg(long)]
        trace: bool,
    },
    /// Sample a guarantee curve over a gamma grid and emit CSV.
    Bounds {
        /// alpha-const | alpha-geom:<q> | beta-const | beta-exp:<b>[:<c>] |
        /// thiele-geom:<q> | thiele-geom-upper:<q>
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        /// Grid step; must be the reciprocal of an integer, e.g. 0.01.
        #[arg(long, default_value = "0.01")]
        grid: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an axiom on one election or a batch of random instances and
    /// print a JSON report.
    Verify {
        /// pjr | iuac | monotone
        check: VerifyKind,
        #[arg(long)]
        rule: String,
        #[arg(long, conflicts_with = "random")]
        election: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// n,m,k,seed,count
        #[arg(long)]
        random: Option<String>,
        /// Cap on distinct ballot classes for the subset verifier.
        #[arg(long, default_value_t = DEFAULT_CLASS_CAP)]
        class_cap: usize,
    },
    /// Generate a one-dimensional spatial election.
    Gen {
        /// Beta shape parameters, e.g. 2,2 or 0.5,2.
        #[arg(long)]
        beta: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        xi: f64,
        #[arg(long)]
        seed: u64,
        /// Election JSON output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional CSV of individual positions.
        #[arg(long)]
        positions: Option<PathBuf>,
    },
    /// Run a batch experiment from a TOML or JSON config and write CSV
    /// summaries.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VerifyKind {
    /// Group representation guarantee of the rule's own bound.
    Pjr,
    /// Independence of a unanimously approved candidate.
    Iuac,
    /// Committee monotonicity of a sequential rule.
    Monotone,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Also write gzip-compressed per-voter records (raw.csv.gz).
    #[arg(long)]
    raw: bool,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main() -> i32 {
    main_with_args(std::env::args())
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return 0;
                }
                _ => 1,
            };
            eprint!("{e}");
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Validate { file, format } => validate(&file, format.into()),
        Command::Run {
            rule,
            election,
            format,
            tie,
            mode,
            eps,
            trace,
        } => run(&rule, &election, format.into(), &tie, mode, eps, trace),
        Command::Bounds {
            family,
            k,
            grid,
            out,
        } => bounds(&family, k, &grid, out.as_deref()),
        Command::Verify {
            check,
            rule,
            election,
            format,
            random,
            class_cap,
        } => verify(
            check,
            &rule,
            election.as_deref(),
            format.into(),
            random.as_deref(),
            class_cap,
        ),
        Command::Gen {
            beta,
            n,
            m,
            k,
            xi,
            seed,
            out,
            positions,
        } => gen(
            &beta,
            n,
            m,
            k,
            xi,
            seed,
            out.as_deref(),
            positions.as_deref(),
        ),
        Command::Simulate(args) => simulate(args),
    }
}

fn validate(file: &Path, format: ElectionFormat) -> CliResult {
    let text = fs::read_to_string(file)?;
    match parse_election(&text, format) {
        Ok(_) => {
            println!("OK");
            Ok(())
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_tie(spec: &str, e: &Election) -> Result<TieRule, String> {
    if spec == "lex" {
        return Ok(TieRule::LexCandidate);
    }
    if let Some(order) = spec.strip_prefix("fixed:") {
        let ids = order
            .split(',')
            .map(|label| {
                e.candidate_by_label(label.trim())
                    .ok_or_else(|| format!("unknown candidate label {label:?}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let rule = TieRule::FixedOrder(ids);
        if !rule.validate(e.num_candidates()) {
            return Err("tie order must list every candidate exactly once".into());
        }
        return Ok(rule);
    }
    Err(format!(
        "unknown tie rule {spec:?}; use lex or fixed:<labels>"
    ))
}

fn run(
    rule: &str,
    election: &Path,
    format: ElectionFormat,
    tie: &str,
    mode: ModeArg,
    eps: f64,
    trace: bool,
) -> CliResult {
    let text = fs::read_to_string(election)?;
    let e = parse_election(&text, format)?;
    let tie = parse_tie(tie, &e)?;
    let spec = RuleSpec::parse(rule)?;
    let output = match &spec {
        RuleSpec::Phragmen { alpha, beta } => {
            let mode = match mode {
                ModeArg::Exact => NumericMode::Exact,
                ModeArg::Float => NumericMode::Float { eps },
                ModeArg::Auto => NumericMode::Auto { eps },
            };
            let run = run_phragmen(&e, alpha, beta, &tie, mode)?;
            phragmen_json(&e, &run, trace)
        }
        RuleSpec::Thiele { weights } => {
            let winners = exact_thiele(&e, weights, DEFAULT_ENUMERATION_CAP)?;
            let score = lambda_score(&e, &winners[0], weights);
            json!({
                "rule": rule,
                "committees": winners.iter().map(|w| w.labels(&e)).collect::<Vec<_>>(),
                "score": score.to_string(),
            })
        }
        RuleSpec::SeqThiele { weights } => {
            let w = seq_thiele(&e, weights, &tie);
            let score = lambda_score(&e, &w, weights);
            json!({
                "rule": rule,
                "committee": w.labels(&e),
                "score": score.to_string(),
            })
        }
    };
    println!("{}", serde_json::to_string_pretty(&output)?);
    Ok(())
}

fn phragmen_json(e: &Election, run: &PhragmenRun, trace: bool) -> Value {
    fn trace_json<N: crate::phragmen::EngineNum + Display>(
        e: &Election,
        t: &PhragmenTrace<N>,
        exact: bool,
        trace: bool,
    ) -> Value {
        let scalar = |v: &N| -> Value {
            if exact {
                Value::String(v.to_string())
            } else {
                json!(v.to_f64())
            }
        };
        let mut out = json!({
            "mode": if exact { "exact" } else { "float" },
            "committee": t.committee.labels(e),
        });
        if trace {
            out["events"] = Value::Array(
                t.events
                    .iter()
                    .map(|ev| {
                        json!({
                            "t": scalar(&ev.time),
                            "candidate": e.candidate_label(ev.candidate),
                            "payers": ev.payers.iter().map(|v| v + 1).collect::<Vec<_>>(),
                            "cost": scalar(&ev.cost),
                        })
                    })
                    .collect(),
            );
            out["final_balances"] = Value::Object(
                t.final_balances
                    .iter()
                    .enumerate()
                    .map(|(v, b)| (format!("v{}", v + 1), scalar(b)))
                    .collect(),
            );
        }
        out
    }
    match run {
        PhragmenRun::Exact(t) => trace_json(e, t, true, trace),
        PhragmenRun::Float(t) => trace_json(e, t, false, trace),
    }
}

fn bounds(family: &str, k: usize, grid: &str, out: Option<&Path>) -> CliResult {
    let family = CurveFamily::parse(family)?;
    let step = parse_rational(grid)?;
    let num: i64 = step
        .numer()
        .try_into()
        .map_err(|_| "grid step must be the reciprocal of an integer")?;
    if num != 1 {
        return Err("grid step must be the reciprocal of an integer, e.g. 0.01".into());
    }
    let den: u64 = step.denom().try_into().map_err(|_| "grid step too fine")?;
    if k == 0 {
        return Err("k must be positive".into());
    }
    let curve = emit_bound_curve(&family, k, den);
    let csv = curve_to_csv(&curve);
    match out {
        Some(path) => fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

struct RandomBatch {
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
    count: usize,
}

fn parse_random(spec: &str) -> Result<RandomBatch, String> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 5 {
        return Err("--random expects n,m,k,seed,count".into());
    }
    let field = |i: usize, name: &str| -> Result<u64, String> {
        parts[i]
            .trim()
            .parse()
            .map_err(|_| format!("invalid {name}: {:?}", parts[i]))
    };
    Ok(RandomBatch {
        n: field(0, "n")? as usize,
        m: field(1, "m")? as usize,
        k: field(2, "k")? as usize,
        seed: field(3, "seed")?,
        count: field(4, "count")? as usize,
    })
}

fn verify(
    kind: VerifyKind,
    rule: &str,
    election: Option<&Path>,
    format: ElectionFormat,
    random: Option<&str>,
    class_cap: usize,
) -> CliResult {
    let spec = RuleSpec::parse(rule)?;
    let batch = match (election, random) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)?;
            vec![parse_election(&text, format)?]
        }
        (None, Some(random)) => {
            let batch = parse_random(random)?;
            let mut rng = ChaCha8Rng::seed_from_u64(batch.seed);
            (0..batch.count)
                .map(|_| match kind {
                    VerifyKind::Iuac => {
                        random_election_with_unanimous(&mut rng, batch.n, batch.m, batch.k.max(2))
                    }
                    _ => random_election(&mut rng, batch.n, batch.m, batch.k),
                })
                .collect()
        }
        _ => return Err("provide exactly one of --election or --random".into()),
    };

    let mut violations = 0usize;
    let mut details: Vec<Value> = Vec::new();
    for (index, e) in batch.iter().enumerate() {
        match kind {
            VerifyKind::Pjr => {
                let degree = pjr_degree_for(&spec, e)?;
                for w in winning_committees(&spec, e)? {
                    match verify_pjr_degree(e, &w, degree.as_ref(), class_cap)? {
                        PjrOutcome::Ok => {}
                        PjrOutcome::Violation(v) => {
                            violations += 1;
                            details.push(json!({
                                "instance": index,
                                "group": v.group.members().iter().map(|x| x + 1).collect::<Vec<_>>(),
                                "covered": v.covered,
                                "required": v.required,
                            }));
                        }
                    }
                }
            }
            VerifyKind::Iuac => {
                let outcome = check_iuac(&spec, e)?;
                if !outcome.holds() {
                    violations += 1;
                    details.push(json!({ "instance": index }));
                }
            }
            VerifyKind::Monotone => {
                let outcome = check_committee_monotonicity(&spec, e, e.committee_size())?;
                if !outcome.holds() {
                    violations += 1;
                    details.push(json!({ "instance": index }));
                }
            }
        }
    }
    let report = json!({
        "check": match kind {
            VerifyKind::Pjr => "pjr",
            VerifyKind::Iuac => "iuac",
            VerifyKind::Monotone => "monotone",
        },
        "rule": rule,
        "instances": batch.len(),
        "violations": violations,
        "details": details,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    println!("{violations} violations");
    Ok(())
}

type DegreeFn = Box<dyn Fn(&BigRational, usize) -> usize>;

/// The published guarantee matching a rule: the process bound for speed
/// rules, the cost bound for cost rules, and the score-rule lower bound for
/// exact optimization.
fn pjr_degree_for(spec: &RuleSpec, e: &Election) -> Result<DegreeFn, String> {
    match spec {
        RuleSpec::Phragmen { alpha, beta } => match (alpha, beta) {
            (alpha, CostFunction::Constant) => {
                if !alpha.is_bound_compatible(e.committee_size()) {
                    return Err(
                        "speed schedule must be non-increasing with values in (0, 1] for guarantees"
                            .into(),
                    );
                }
                let alpha = alpha.clone();
                Ok(Box::new(move |g, k| f_alpha_exact(&alpha, g, k)))
            }
            (SpeedSchedule::Constant, beta) => {
                if !beta.is_bound_compatible() {
                    return Err("cost function must be non-increasing with beta(0) = 1".into());
                }
                let beta = beta.clone();
                Ok(Box::new(move |g, k| f_beta(&beta, g, k)))
            }
            _ => Err("no published guarantee for combined speed and cost rules".into()),
        },
        RuleSpec::Thiele { weights } => {
            let weights = weights.clone();
            Ok(Box::new(move |g, k| thiele_lower(&weights, g, k)))
        }
        RuleSpec::SeqThiele { .. } => Err("no published guarantee for greedy score rules".into()),
    }
}

#[allow(clippy::too_many_arguments)]
fn gen(
    beta: &str,
    n: usize,
    m: usize,
    k: usize,
    xi: f64,
    seed: u64,
    out: Option<&Path>,
    positions: Option<&Path>,
) -> CliResult {
    let (a, b) = beta
        .split_once(',')
        .ok_or("expected --beta a,b (e.g. 2,2 or 0.5,2)")?;
    let cfg = EuclideanConfig {
        beta_a: a.trim().parse()?,
        beta_b: b.trim().parse()?,
        num_voters: n,
        num_candidates: m,
        committee_size: k,
        xi,
        seed,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pe = build_euclidean_election(&cfg, &mut rng)?;
    let doc = serialize_election(&pe.election, ElectionFormat::Json);
    match out {
        Some(path) => fs::write(path, doc)?,
        None => println!("{doc}"),
    }
    if let Some(path) = positions {
        let mut csv = String::from("kind,index,position\n");
        for (i, p) in pe.voter_positions.iter().enumerate() {
            csv.push_str(&format!("voter,{},{}\n", i + 1, p));
        }
        for (i, p) in pe.candidate_positions.iter().enumerate() {
            csv.push_str(&format!("candidate,{},{}\n", i + 1, p));
        }
        fs::write(path, csv)?;
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> CliResult {
    let text = fs::read_to_string(&args.config)?;
    let cfg = parse_config(&text)?;
    let (summary, raw) = run_experiment_with_options(&cfg, args.raw)?;
    fs::create_dir_all(&args.out_dir)?;
    fs::write(args.out_dir.join("summary.csv"), summary_csv(&summary))?;
    fs::write(args.out_dir.join("boxplot.csv"), boxplot_csv(&summary))?;
    if let Some(raw) = raw {
        let file = fs::File::create(args.out_dir.join("raw.csv.gz"))?;
        let mut encoder = flate2::write::GzEncoder::new(file, flate2::Compression::default());
        encoder.write_all(raw.as_bytes())?;
        encoder.finish()?;
    }
    Ok(())
}

/// Returns a deterministic committee for library consumers that only need
/// the winner set of a named rule.
pub fn committee_for_rule(
    rule: &str,
    e: &Election,
) -> Result<Vec<Committee>, Box<dyn std::error::Error>> {
    let spec = RuleSpec::parse(rule)?;
    Ok(winning_committees(&spec, e)?)
}
