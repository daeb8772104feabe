//! Command-line interface for exact beta-shift computations.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::json;

use betaflow::arith::{
    beta_expansion_of_one, beta_from_generating, entropy, parse_interval, parse_poly,
    parse_rational, AlgebraicNumber, ExpansionResult, ExpansionStatus,
};
use betaflow::covers::{covering_multiplicity, FiberProductCover, FischerCover};
use betaflow::decide::{compare, full_shift_class, Verdict};
use betaflow::invariants::verify_closed_forms;
use betaflow::moves::{binarize, canonical_form};
use betaflow::reduce::{
    equivariant_fiber_compare, reduce_fiber_cover, ReduceOp, ReductionLog, UnlabeledGraph,
};
use betaflow::seq::{GeneratingSequence, Word};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Parser)]
#[command(
    name = "betaflow",
    version,
    about = "Exact computations with sofic beta-shifts: expansions, covers, invariants, and flow equivalence"
)]
struct Cli {
    /// Output format (dot applies to graph-producing commands)
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Digit budget for beta-expansions
    #[arg(long, global = true, default_value_t = 4096)]
    max_digits: usize,
    /// Width bound for rational intervals, e.g. 1/1000000000000
    #[arg(long, global = true, default_value = "1/1000000000000")]
    precision: String,
    /// Stream every reduction step (reduce)
    #[arg(long, global = true)]
    emit_steps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Beta-expansion of 1 for an algebraic base
    Expand {
        /// Integer polynomial, e.g. x^2-x-1
        #[arg(long)]
        poly: Option<String>,
        /// Isolating interval lo,hi with rational endpoints
        #[arg(long)]
        interval: Option<String>,
        /// Rational base, e.g. 2 or 5/2 (alternative to --poly/--interval)
        #[arg(long)]
        value: Option<String>,
    },
    /// Generating sequence of the beta-shift for an algebraic base
    Genseq {
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        interval: Option<String>,
        #[arg(long)]
        value: Option<String>,
    },
    /// Recover the base from a generating sequence (interval + entropy)
    Beta { seq: String },
    /// Validate a sequence as a generating sequence
    Validate { seq: String },
    /// Right Fischer cover
    Cover { seq: String },
    /// Fiber product cover with its involution
    Fiber { seq: String },
    /// Period sums, Bowen-Franks groups, and the closed-form check
    Invariants { seq: String },
    /// Reduce the fiber product's underlying graph to normal form
    Reduce { seq: String },
    /// Canonical form under the flow moves, with the move trace
    Canonical { seq: String },
    /// Flow-equivalence verdict for a pair of generating sequences
    Compare { seq1: String, seq2: String },
    /// Equivariant flow equivalence of the fiber products
    Equivariant { seq1: String, seq2: String },
    /// Compare the cover path language against the factor criterion
    OracleCheck {
        seq: String,
        /// Word length to check
        #[arg(long)]
        len: usize,
    },
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn domain<E: std::fmt::Display>(e: E) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_seq(text: &str) -> Result<GeneratingSequence, CliError> {
    text.parse().map_err(CliError::domain)
}

fn parse_precision(text: &str) -> Result<BigRational, CliError> {
    let p = parse_rational(text).map_err(CliError::domain)?;
    if !p.is_positive() {
        return Err(CliError::Usage("precision must be positive".into()));
    }
    Ok(p)
}

/// Decimal rendering of a rational, truncated after `digits` fraction digits.
fn decimal(q: &BigRational, digits: usize) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let q = q.abs();
    let int = q.to_integer();
    let mut frac = &q - BigRational::from(int.clone());
    let mut out = format!("{sign}{int}.");
    let ten = BigRational::from(BigInt::from(10));
    for _ in 0..digits {
        frac *= &ten;
        let d = frac.to_integer();
        write!(out, "{d}").unwrap();
        frac -= BigRational::from(d);
        if frac.is_zero() {
            break;
        }
    }
    out
}

fn midpoint(lo: &BigRational, hi: &BigRational) -> BigRational {
    (lo + hi) / BigRational::from(BigInt::from(2))
}

fn algebraic_input(
    poly: Option<String>,
    interval: Option<String>,
    value: Option<String>,
) -> Result<AlgebraicNumber, CliError> {
    match (poly, interval, value) {
        (Some(p), Some(iv), None) => {
            let coeffs = parse_poly(&p).map_err(CliError::domain)?;
            let (lo, hi) = parse_interval(&iv).map_err(CliError::domain)?;
            AlgebraicNumber::new(coeffs, lo, hi).map_err(CliError::domain)
        }
        (None, None, Some(v)) => {
            let q = parse_rational(&v).map_err(CliError::domain)?;
            AlgebraicNumber::from_rational(q).map_err(CliError::domain)
        }
        _ => Err(CliError::Usage(
            "supply either --poly P --interval lo,hi or --value q".into(),
        )),
    }
}

fn expansion_json(e: &ExpansionResult) -> serde_json::Value {
    let status = match *e.status() {
        ExpansionStatus::Finite { length } => json!({"kind": "finite", "length": length}),
        ExpansionStatus::EventuallyPeriodic { preperiod, period } => {
            json!({"kind": "eventually_periodic", "preperiod": preperiod, "period": period})
        }
        ExpansionStatus::Truncated { max_digits } => {
            json!({"kind": "truncated", "max_digits": max_digits})
        }
    };
    json!({
        "digits": e.digits().iter().map(|d| d.value()).collect::<Vec<_>>(),
        "status": status,
    })
}

fn require_text_or_json(format: Format, command: &str) -> Result<(), CliError> {
    if format == Format::Dot {
        return Err(CliError::Usage(format!(
            "--format dot does not apply to `{command}`"
        )));
    }
    Ok(())
}

fn ensure_binary(g: &GeneratingSequence) -> GeneratingSequence {
    if g.is_binary() {
        g.clone()
    } else {
        binarize(g).after
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let format = cli.format;
    match cli.command {
        Command::Expand {
            poly,
            interval,
            value,
        } => {
            require_text_or_json(format, "expand")?;
            let beta = algebraic_input(poly, interval, value)?;
            let e = beta_expansion_of_one(&beta, cli.max_digits);
            match format {
                Format::Json => println!("{}", expansion_json(&e)),
                _ => println!("e(beta) = {e}"),
            }
        }
        Command::Genseq {
            poly,
            interval,
            value,
        } => {
            require_text_or_json(format, "genseq")?;
            let beta = algebraic_input(poly, interval, value)?;
            let e = beta_expansion_of_one(&beta, cli.max_digits);
            let g = e.generating_sequence().map_err(CliError::domain)?;
            match format {
                Format::Json => println!("{}", json!({"generating_sequence": g.to_string()})),
                _ => println!("g(beta) = {g}"),
            }
        }
        Command::Beta { seq } => {
            require_text_or_json(format, "beta")?;
            let g = parse_seq(&seq)?;
            let precision = parse_precision(&cli.precision)?;
            let (lo, hi) = beta_from_generating(&g, &precision);
            let (ent_lo, ent_hi) = entropy(&g, &precision);
            match format {
                Format::Json => println!(
                    "{}",
                    json!({
                        "lo": lo.to_string(),
                        "hi": hi.to_string(),
                        "decimal": decimal(&midpoint(&lo, &hi), 15),
                        "entropy_lo": ent_lo.to_string(),
                        "entropy_hi": ent_hi.to_string(),
                    })
                ),
                _ => {
                    println!("beta in [{lo}, {hi}]");
                    println!("     ~ {}", decimal(&midpoint(&lo, &hi), 15));
                    println!("entropy log(beta) ~ {}", decimal(&midpoint(&ent_lo, &ent_hi), 15));
                }
            }
        }
        Command::Validate { seq } => {
            require_text_or_json(format, "validate")?;
            let g = parse_seq(&seq)?;
            match format {
                Format::Json => println!(
                    "{}",
                    json!({
                        "accepted": true,
                        "normalized": g.to_string(),
                        "class": g.shift_class().to_string(),
                        "S": g.period_sum(),
                        "N": g.preperiod_sum(),
                    })
                ),
                _ => {
                    println!("accepted: {g}");
                    println!("class: {}", g.shift_class());
                    println!("S = {}, N = {}", g.period_sum(), g.preperiod_sum());
                }
            }
        }
        Command::Cover { seq } => {
            let g = parse_seq(&seq)?;
            let cover = FischerCover::build(&g);
            match format {
                Format::Dot => print!("{}", cover.graph().to_dot()),
                Format::Json => println!("{}", cover.graph().to_json()),
                Format::Text => {
                    println!("right Fischer cover of {g}");
                    print!("{}", cover.graph());
                }
            }
        }
        Command::Fiber { seq } => {
            let g = parse_seq(&seq)?;
            let fiber = FiberProductCover::build(&g);
            match format {
                Format::Dot => print!("{}", fiber.graph().to_dot()),
                Format::Json => println!("{}", fiber.to_json()),
                Format::Text => {
                    println!("fiber product cover of {g}");
                    print!("{}", fiber.graph());
                    let pairs: Vec<String> = fiber
                        .involution()
                        .iter()
                        .enumerate()
                        .filter(|&(v, &w)| v < w)
                        .map(|(v, &w)| {
                            format!(
                                "{} <-> {}",
                                fiber.graph().vertex_name(v),
                                fiber.graph().vertex_name(w)
                            )
                        })
                        .collect();
                    if pairs.is_empty() {
                        println!("involution: identity (diagonal only)");
                    } else {
                        println!("involution swaps: {}", pairs.join(", "));
                    }
                }
            }
        }
        Command::Invariants { seq } => {
            require_text_or_json(format, "invariants")?;
            let g = parse_seq(&seq)?;
            let report = verify_closed_forms(&g);
            let multiplicity =
                covering_multiplicity(&g, g.period_len().max(4)).map_err(CliError::domain)?;
            match format {
                Format::Json => {
                    let mut value = report.to_json();
                    value["covering_multiplicity"] = json!(multiplicity.max_preimages);
                    println!("{value}");
                }
                _ => {
                    println!("{report}");
                    println!("covering multiplicity: {}", multiplicity.max_preimages);
                    if let Ok(class) = full_shift_class(&g) {
                        println!("flow equivalent to the full {class}-shift");
                    }
                }
            }
        }
        Command::Reduce { seq } => {
            let g = parse_seq(&seq)?;
            let (graph, log) = reduce_fiber_cover(&g).map_err(CliError::domain)?;
            if cli.emit_steps {
                emit_reduction_steps(&g, &log, format)?;
            }
            match format {
                Format::Dot => print!("{}", graph.to_dot()),
                Format::Json => println!(
                    "{}",
                    json!({"graph": graph.to_json(), "log": log.to_json()})
                ),
                Format::Text => {
                    println!(
                        "normal form: {} ({} reduction steps)",
                        graph,
                        log.steps.len()
                    );
                    if let Some(last) = log.steps.last() {
                        println!("BF = {}", last.bf_after);
                    }
                }
            }
        }
        Command::Canonical { seq } => {
            require_text_or_json(format, "canonical")?;
            let g = parse_seq(&seq)?;
            let binary = ensure_binary(&g);
            let (canon, trace) = canonical_form(&binary).map_err(CliError::domain)?;
            match format {
                Format::Json => println!(
                    "{}",
                    json!({"canonical": canon.to_string(), "trace": trace.to_json()})
                ),
                _ => {
                    println!("canonical form: {canon}");
                    for mv in trace.moves() {
                        println!("  {mv}");
                    }
                }
            }
        }
        Command::Compare { seq1, seq2 } => {
            require_text_or_json(format, "compare")?;
            let left = parse_seq(&seq1)?;
            let right = parse_seq(&seq2)?;
            let verdict = compare(&left, &right);
            match format {
                Format::Json => println!("{}", verdict.to_json(&left, &right)),
                _ => {
                    println!("outcome: {}", verdict.outcome());
                    match &verdict {
                        Verdict::Equivalent { canonical, .. } => {
                            println!("common canonical form: {canonical}");
                        }
                        Verdict::Distinct { witness } => {
                            println!("distinguished by: {}", witness.invariant_name());
                        }
                        Verdict::Unknown {
                            reduced_left,
                            reduced_right,
                        } => {
                            println!("reduced pair: {reduced_left} vs {reduced_right}");
                        }
                    }
                }
            }
        }
        Command::Equivariant { seq1, seq2 } => {
            require_text_or_json(format, "equivariant")?;
            let left = parse_seq(&seq1)?;
            let right = parse_seq(&seq2)?;
            let equal = equivariant_fiber_compare(&left, &right).map_err(CliError::domain)?;
            match format {
                Format::Json => println!(
                    "{}",
                    json!({
                        "equal": equal,
                        "S1": left.period_sum(),
                        "S2": right.period_sum(),
                    })
                ),
                _ => println!(
                    "equivariant flow equivalence: {equal} (S1 = {}, S2 = {})",
                    left.period_sum(),
                    right.period_sum()
                ),
            }
        }
        Command::OracleCheck { seq, len } => {
            require_text_or_json(format, "oracle-check")?;
            let g = parse_seq(&seq)?;
            let cover = FischerCover::build(&g);
            let from_cover = cover.graph().path_language(len);
            let base = u64::from(g.max_digit().value()) + 1;
            let mut from_criterion = std::collections::BTreeSet::new();
            for mut code in 0..base.pow(len as u32) {
                let mut values = Vec::new();
                for _ in 0..len {
                    values.push((code % base) as u32);
                    code /= base;
                }
                let w = Word::from_values(&values);
                if g.is_factor(&w) {
                    from_criterion.insert(w);
                }
            }
            let only_cover: Vec<String> = from_cover
                .difference(&from_criterion)
                .map(ToString::to_string)
                .collect();
            let only_criterion: Vec<String> = from_criterion
                .difference(&from_cover)
                .map(ToString::to_string)
                .collect();
            let ok = only_cover.is_empty() && only_criterion.is_empty();
            match format {
                Format::Json => println!(
                    "{}",
                    json!({
                        "len": len,
                        "ok": ok,
                        "only_in_cover": only_cover,
                        "only_in_criterion": only_criterion,
                    })
                ),
                _ => {
                    for w in &only_cover {
                        println!("only in cover: {w}");
                    }
                    for w in &only_criterion {
                        println!("only in criterion: {w}");
                    }
                }
            }
            if !ok {
                return Err(CliError::Domain(format!(
                    "path language and factor criterion disagree at length {len}"
                )));
            }
        }
    }
    Ok(())
}

/// Replays the logged reduction deterministically, streaming intermediate
/// graphs in the requested format.
fn emit_reduction_steps(
    g: &GeneratingSequence,
    log: &ReductionLog,
    format: Format,
) -> Result<(), CliError> {
    let (canonical, _) = canonical_form(&ensure_binary(g)).map_err(CliError::domain)?;
    let fiber = FiberProductCover::build(&canonical);
    let mut graph = UnlabeledGraph::from_fiber_cover(&fiber);
    for step in &log.steps {
        graph = match step.op {
            ReduceOp::Contract { vertex, .. } => {
                graph.contract_unit_vertex(vertex).map_err(CliError::domain)?
            }
            ReduceOp::Amalgamate { u, w } => graph.in_amalgamate(u, w).map_err(CliError::domain)?,
        };
        match format {
            Format::Dot => print!("{}", graph.to_dot()),
            Format::Json => println!("{}", step.to_json()),
            Format::Text => println!(
                "step {:?}: {} vertices, {} edges, BF = {}",
                step.op, step.vertices_after, step.edges_after, step.bf_after
            ),
        }
    }
    Ok(())
}
