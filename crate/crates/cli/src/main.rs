//! Command-line workbench for CCS and pi-calculus semantics: parse and
//! canonicalize terms, explore labelled or reaction systems, decide
//! bisimilarity, minimize, cross-check the two semantics, and generate
//! reproducible corpora.

mod report;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use dialg_core::engine::{
    bisimilar, explore_dialgebra, explore_lts, quotient, refine_dialgebra, ChallengerPolicy,
    ExploredSystem, Mode, NamePool, Verdict,
};
use dialg_core::{
    barbs, canonicalize, ccs_lts_step, compare_semantics, gen_corpus, parse_term, pi_early_step,
    pretty, Calculus, Name, Term,
};
use serde::Serialize;

use report::Document;

/// Exit code for malformed invocations of anything but `bisim`.
const USAGE: i32 = 2;
/// `bisim` reserves 0/1/2 for verdicts, so its usage errors exit 3.
const BISIM_USAGE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "dialg",
    version,
    about = "Reaction and labelled-transition semantics workbench for CCS and the pi-calculus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print its canonical form.
    Parse(ParseArgs),
    /// Explore the labelled transition system reachable from a term.
    Lts(LtsArgs),
    /// Explore the reaction system reachable from a term.
    Dialg(DialgArgs),
    /// Decide whether two terms are bisimilar.
    ///
    /// Exits 0 when bisimilar, 1 when not, 2 when the state budget left the
    /// question open, 3 on usage errors.
    Bisim(BisimArgs),
    /// Minimize the explored reaction system to one state per bisimilarity
    /// class.
    ///
    /// The emitted partition lists, per minimized state, the ids the
    /// unminimized exploration (as printed by `dialg` with the same
    /// arguments) assigns to its members.
    Quotient(DialgArgs),
    /// Check the labelled and reaction semantics of a CCS term against
    /// each other, experiment by experiment.
    ///
    /// Exits 0 when both directions agree, 1 on any mismatch, 2 when the
    /// budget made the check inconclusive.
    Compare(CompareArgs),
    /// Print the observable barbs of a pi term: channels on which it is
    /// ready to communicate, with ~ marking output readiness.
    Barbs(BarbsArgs),
    /// Generate a reproducible pseudo-random term corpus.
    Corpus(CorpusArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CalculusArg {
    Ccs,
    Pi,
}

impl From<CalculusArg> for Calculus {
    fn from(arg: CalculusArg) -> Calculus {
        match arg {
            CalculusArg::Ccs => Calculus::Ccs,
            CalculusArg::Pi => Calculus::Pi,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Reaction semantics: unary and binary experiments.
    Dialg,
    /// CCS labelled transitions.
    Lts,
    /// Pi-calculus early labelled transitions.
    Early,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
    Text,
}

#[derive(Args)]
struct ParseArgs {
    #[arg(long, value_enum)]
    calculus: CalculusArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Term source text, or @path to read it from a file.
    term: String,
}

#[derive(Args)]
struct LtsArgs {
    #[arg(long, value_enum)]
    calculus: CalculusArg,
    /// Extra pool names (comma separated) joined with the term's free
    /// names; for pi terms these instantiate input transitions.
    #[arg(long, value_delimiter = ',')]
    pool: Vec<String>,
    #[arg(long, default_value_t = 20_000)]
    max_states: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Term source text, or @path to read it from a file.
    term: String,
}

#[derive(Args)]
struct DialgArgs {
    #[arg(long, value_enum)]
    calculus: CalculusArg,
    /// Challenger policy for binary experiments: `witness` or `closure:K`.
    #[arg(long, default_value = "witness")]
    policy: String,
    /// Extra pool names (comma separated) joined with the term's free
    /// names when building witnesses.
    #[arg(long, value_delimiter = ',')]
    pool: Vec<String>,
    #[arg(long, default_value_t = 20_000)]
    max_states: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Term source text, or @path to read it from a file.
    term: String,
}

#[derive(Args)]
struct BisimArgs {
    #[arg(long, value_enum)]
    calculus: CalculusArg,
    /// Semantics to decide under: `dialg` for either calculus, `lts` for
    /// CCS, `early` for pi.
    #[arg(long, value_enum, default_value_t = ModeArg::Dialg)]
    mode: ModeArg,
    /// Challenger policy for binary experiments: `witness` or `closure:K`.
    #[arg(long, default_value = "witness")]
    policy: String,
    /// Extra pool names (comma separated) added to the derived pool.
    #[arg(long, value_delimiter = ',')]
    pool: Vec<String>,
    #[arg(long, default_value_t = 20_000)]
    max_states: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Left term, or @path.
    left: String,
    /// Right term, or @path.
    right: String,
}

#[derive(Args)]
struct CompareArgs {
    /// Only `ccs` carries both semantics; the flag exists for symmetry.
    #[arg(long, value_enum, default_value_t = CalculusArg::Ccs)]
    calculus: CalculusArg,
    /// Extra pool names (comma separated) joined with the term's free
    /// names.
    #[arg(long, value_delimiter = ',')]
    pool: Vec<String>,
    #[arg(long, default_value_t = 20_000)]
    max_states: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Term source text, or @path to read it from a file.
    term: String,
}

#[derive(Args)]
struct BarbsArgs {
    /// Barbs are a pi-calculus observable; only `pi` is accepted.
    #[arg(long, value_enum, default_value_t = CalculusArg::Pi)]
    calculus: CalculusArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Term source text, or @path to read it from a file.
    term: String,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, value_enum)]
    calculus: CalculusArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Upper bound on prefixes per generated term.
    #[arg(long, default_value_t = 8)]
    size_bound: usize,
    /// Channel names the corpus draws from (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "a,b,c")]
    pool: Vec<String>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

struct CliError {
    message: String,
    code: i32,
}

impl CliError {
    fn new(message: impl Into<String>, code: i32) -> CliError {
        CliError { message: message.into(), code }
    }
}

struct CmdOutput {
    artifact: String,
    code: i32,
}

impl CmdOutput {
    fn ok(artifact: String) -> CmdOutput {
        CmdOutput { artifact, code: 0 }
    }
}

fn main() {
    let bisim_invocation = std::env::args().nth(1).as_deref() == Some("bisim");
    let usage_code = if bisim_invocation { BISIM_USAGE } else { USAGE };
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => usage_code,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match run(cli.command) {
        Ok(output) => {
            print!("{}", output.artifact);
            std::process::exit(output.code);
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            std::process::exit(err.code);
        }
    }
}

fn run(command: Command) -> Result<CmdOutput, CliError> {
    match command {
        Command::Parse(args) => cmd_parse(args),
        Command::Lts(args) => cmd_lts(args),
        Command::Dialg(args) => cmd_dialg(args, false),
        Command::Bisim(args) => cmd_bisim(args),
        Command::Quotient(args) => cmd_dialg(args, true),
        Command::Compare(args) => cmd_compare(args),
        Command::Barbs(args) => cmd_barbs(args),
        Command::Corpus(args) => cmd_corpus(args),
    }
}

/// Reads `@path` arguments from disk; anything else is the term itself.
fn resolve_source(arg: &str, code: i32) -> Result<String, CliError> {
    match arg.strip_prefix('@') {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => Ok(text.trim().to_string()),
            Err(err) => Err(CliError::new(format!("cannot read {path}: {err}"), code)),
        },
        None => Ok(arg.to_string()),
    }
}

fn parse_arg_term(arg: &str, calculus: Calculus, code: i32) -> Result<Term, CliError> {
    let source = resolve_source(arg, code)?;
    parse_term(&source, calculus).map_err(|err| CliError::new(err.to_string(), code))
}

fn parse_pool(names: &[String], code: i32) -> Result<Vec<Name>, CliError> {
    names
        .iter()
        .map(|n| Name::new(n).map_err(|err| CliError::new(err.to_string(), code)))
        .collect()
}

fn parse_policy(spec: &str, pool: &NamePool, code: i32) -> Result<ChallengerPolicy, CliError> {
    if spec == "witness" {
        return Ok(ChallengerPolicy::WitnessSet { pool: pool.clone() });
    }
    if let Some(rounds) = spec.strip_prefix("closure:") {
        let rounds: usize = rounds
            .parse()
            .map_err(|_| CliError::new(format!("closure rounds must be a number, got {rounds}"), code))?;
        if rounds < 1 {
            return Err(CliError::new("closure policy needs at least one round", code));
        }
        return Ok(ChallengerPolicy::BoundedClosure { rounds });
    }
    Err(CliError::new(format!("unknown policy {spec}; expected witness or closure:K"), code))
}

fn pool_strings(pool: &NamePool) -> Vec<String> {
    pool.names().iter().map(|n| n.to_string()).collect()
}

fn render(doc: &Document, format: FormatArg) -> String {
    match format {
        FormatArg::Json => doc.to_json(),
        FormatArg::Dot => doc.to_dot(),
        FormatArg::Text => doc.to_text(),
    }
}

#[derive(Serialize)]
struct ParseDoc {
    input: String,
    canonical: String,
}

fn cmd_parse(args: ParseArgs) -> Result<CmdOutput, CliError> {
    let term = parse_arg_term(&args.term, args.calculus.into(), USAGE)?;
    let canonical = canonicalize(&term);
    let artifact = match args.format {
        FormatArg::Text => format!("{}\n", canonical.rendering()),
        FormatArg::Json => {
            let doc =
                ParseDoc { input: pretty(&term), canonical: canonical.rendering().to_string() };
            let mut json = serde_json::to_string_pretty(&doc).expect("document serializes");
            json.push('\n');
            json
        }
        FormatArg::Dot => {
            let doc = Document {
                states: vec![canonical.rendering().to_string()],
                ..empty_document()
            };
            doc.to_dot()
        }
    };
    Ok(CmdOutput::ok(artifact))
}

fn empty_document() -> Document {
    Document {
        states: Vec::new(),
        unary: Vec::new(),
        binary: Vec::new(),
        lts: Vec::new(),
        partition: Vec::new(),
        verdict: None,
        policy: None,
        pool: Vec::new(),
        budget_exhausted: false,
    }
}

fn cmd_lts(args: LtsArgs) -> Result<CmdOutput, CliError> {
    let calculus: Calculus = args.calculus.into();
    let term = parse_arg_term(&args.term, calculus, USAGE)?;
    let extra = parse_pool(&args.pool, USAGE)?;
    let pool = NamePool::suggested(&[&term]).with_extra(extra);
    let initials = [term];
    let mut doc = match calculus {
        Calculus::Ccs => {
            let table = explore_lts(&initials, ccs_lts_step, args.max_states)
                .map_err(|err| CliError::new(err.to_string(), USAGE))?;
            Document::from_lts(&table)
        }
        Calculus::Pi => {
            let names = pool.names().to_vec();
            let table = explore_lts(&initials, |t| pi_early_step(t, &names), args.max_states)
                .map_err(|err| CliError::new(err.to_string(), USAGE))?;
            let mut doc = Document::from_lts(&table);
            doc.pool = pool_strings(&pool);
            doc
        }
    };
    doc.policy = None;
    Ok(CmdOutput::ok(render(&doc, args.format)))
}

fn cmd_dialg(args: DialgArgs, minimize: bool) -> Result<CmdOutput, CliError> {
    let calculus: Calculus = args.calculus.into();
    let term = parse_arg_term(&args.term, calculus, USAGE)?;
    let extra = parse_pool(&args.pool, USAGE)?;
    let pool = NamePool::suggested(&[&term]).with_extra(extra);
    let policy = parse_policy(&args.policy, &pool, USAGE)?;
    let table = explore_dialgebra(&[term], &policy, args.max_states)
        .map_err(|err| CliError::new(err.to_string(), USAGE))?;
    let doc = if minimize {
        if !table.complete() {
            return Err(CliError::new(
                "state budget exhausted; the quotient needs a complete exploration",
                USAGE,
            ));
        }
        let partition = refine_dialgebra(&table);
        let minimized = quotient(&table, &partition);
        Document::from_dialgebra(&minimized).with_partition(&partition)
    } else {
        Document::from_dialgebra(&table)
    };
    let mut doc = doc;
    doc.policy = Some(policy.describe());
    if matches!(policy, ChallengerPolicy::WitnessSet { .. }) {
        doc.pool = pool_strings(&pool);
    }
    Ok(CmdOutput::ok(render(&doc, args.format)))
}

fn cmd_bisim(args: BisimArgs) -> Result<CmdOutput, CliError> {
    let calculus: Calculus = args.calculus.into();
    let mode = match (args.calculus, args.mode) {
        (CalculusArg::Ccs, ModeArg::Dialg) => Mode::CcsDialg,
        (CalculusArg::Ccs, ModeArg::Lts) => Mode::CcsLts,
        (CalculusArg::Pi, ModeArg::Dialg) => Mode::PiDialg,
        (CalculusArg::Pi, ModeArg::Early) => Mode::PiEarly,
        (CalculusArg::Ccs, ModeArg::Early) => {
            return Err(CliError::new("early mode applies to pi; use --mode lts for ccs", BISIM_USAGE))
        }
        (CalculusArg::Pi, ModeArg::Lts) => {
            return Err(CliError::new("lts mode applies to ccs; use --mode early for pi", BISIM_USAGE))
        }
    };
    let left = parse_arg_term(&args.left, calculus, BISIM_USAGE)?;
    let right = parse_arg_term(&args.right, calculus, BISIM_USAGE)?;
    let extra = parse_pool(&args.pool, BISIM_USAGE)?;
    let policy = parse_policy(&args.policy, &NamePool::new(extra), BISIM_USAGE)?;
    let outcome = bisimilar(&left, &right, mode, &policy, args.max_states)
        .map_err(|err| CliError::new(err.to_string(), BISIM_USAGE))?;
    let mut doc = match &outcome.system {
        ExploredSystem::Dialgebra(table) => Document::from_dialgebra(table),
        ExploredSystem::CcsLts(table) => Document::from_lts(table),
        ExploredSystem::PiLts(table) => Document::from_lts(table),
    };
    doc = doc.with_partition(&outcome.partition);
    doc.verdict = Some(outcome.verdict.to_string());
    doc.policy = Some(outcome.policy.describe());
    doc.pool = pool_strings(&outcome.pool);
    let code = match outcome.verdict {
        Verdict::Bisimilar => 0,
        Verdict::NotBisimilar => 1,
        Verdict::Unknown => 2,
    };
    Ok(CmdOutput { artifact: render(&doc, args.format), code })
}

fn cmd_compare(args: CompareArgs) -> Result<CmdOutput, CliError> {
    if args.calculus != CalculusArg::Ccs {
        return Err(CliError::new("compare is defined for ccs terms", USAGE));
    }
    let term = parse_arg_term(&args.term, Calculus::Ccs, USAGE)?;
    let extra = parse_pool(&args.pool, USAGE)?;
    let pool = NamePool::new(extra);
    let report = compare_semantics(&term, &pool, args.max_states)
        .map_err(|err| CliError::new(err.to_string(), USAGE))?;
    let artifact = match args.format {
        FormatArg::Json => {
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            json
        }
        FormatArg::Text => {
            let mut out = String::new();
            out.push_str(&format!("states: {}\n", report.states));
            out.push_str(&format!("experiments checked: {}\n", report.experiments_checked));
            out.push_str(&format!("transition states checked: {}\n", report.lts_states_checked));
            for m in &report.dialg_mismatches {
                out.push_str(&format!(
                    "reaction mismatch at {}: native {:?} vs derived {:?}\n",
                    m.experiment, m.native, m.derived
                ));
            }
            for m in &report.lts_mismatches {
                out.push_str(&format!(
                    "transition mismatch at {}: native {:?} vs derived {:?}\n",
                    m.state, m.native, m.derived
                ));
            }
            let result = if report.pass() {
                "PASS"
            } else if report.inconclusive {
                "INCONCLUSIVE"
            } else {
                "FAIL"
            };
            out.push_str(&format!("result: {result}\n"));
            out
        }
        FormatArg::Dot => {
            return Err(CliError::new("compare emits a report, not a graph; use json or text", USAGE))
        }
    };
    let code = if report.pass() {
        0
    } else if report.inconclusive {
        2
    } else {
        1
    };
    Ok(CmdOutput { artifact, code })
}

#[derive(Serialize)]
struct BarbsDoc {
    term: String,
    barbs: Vec<String>,
}

fn cmd_barbs(args: BarbsArgs) -> Result<CmdOutput, CliError> {
    if args.calculus != CalculusArg::Pi {
        return Err(CliError::new("barbs are defined for pi terms", USAGE));
    }
    let term = parse_arg_term(&args.term, Calculus::Pi, USAGE)?;
    let observed: Vec<String> = barbs(&term).into_iter().map(|b| b.to_string()).collect();
    let artifact = match args.format {
        FormatArg::Text => {
            if observed.is_empty() {
                "(no barbs)\n".to_string()
            } else {
                format!("{}\n", observed.join(" "))
            }
        }
        FormatArg::Json => {
            let doc =
                BarbsDoc { term: canonicalize(&term).rendering().to_string(), barbs: observed };
            let mut json = serde_json::to_string_pretty(&doc).expect("document serializes");
            json.push('\n');
            json
        }
        FormatArg::Dot => {
            return Err(CliError::new("barbs emit a list, not a graph; use json or text", USAGE))
        }
    };
    Ok(CmdOutput::ok(artifact))
}

#[derive(Serialize)]
struct CorpusDoc {
    terms: Vec<String>,
}

fn cmd_corpus(args: CorpusArgs) -> Result<CmdOutput, CliError> {
    if args.size_bound < 1 {
        return Err(CliError::new("size bound must be at least 1", USAGE));
    }
    let pool = parse_pool(&args.pool, USAGE)?;
    let terms = gen_corpus(args.calculus.into(), args.seed, args.count, args.size_bound, &pool);
    let rendered: Vec<String> = terms.iter().map(pretty).collect();
    let artifact = match args.format {
        FormatArg::Text => {
            let mut out = rendered.join("\n");
            if !out.is_empty() {
                out.push('\n');
            }
            out
        }
        FormatArg::Json => {
            let doc = CorpusDoc { terms: rendered };
            let mut json = serde_json::to_string_pretty(&doc).expect("document serializes");
            json.push('\n');
            json
        }
        FormatArg::Dot => {
            return Err(CliError::new("corpus emits terms, not a graph; use json or text", USAGE))
        }
    };
    Ok(CmdOutput::ok(artifact))
}
