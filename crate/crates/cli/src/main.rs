use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use streamsynth::determinize::{build_domain_automaton, is_domain_closed, DEFAULT_MAX_STATES};
use streamsynth::format::{emit_spec, parse_spec, FORMAT_VERSION};
use streamsynth::game::{build_arena, Arena, ArenaError, GameAction, Mode, DEFAULT_MAX_VERTICES};
use streamsynth::parity::Player;
use streamsynth::synth::{
    check_syntactic_class, pcp_to_spec, run_executor, solve, synthesize, Budgets, PcpInstance, Solved, SynthError,
    DEFAULT_MAX_STEPS,
};
use streamsynth::transducer::DEFAULT_MAX_CONFIGURATIONS;
use streamsynth::{Lasso, Transducer};

const EXIT_REJECTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "streamsynth", version, about = "Decide and synthesize streaming uniformizers of parity transducers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct BudgetArgs {
    /// Largest arena or product game.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    /// Letters the executor may read before giving up on finding a period.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Configurations explored when checking a pair of lassos.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CONFIGURATIONS)]
    max_config: usize,
    /// Largest deterministic domain automaton.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
}

impl BudgetArgs {
    fn budgets(&self) -> Budgets {
        Budgets {
            max_states: self.max_states,
            max_vertices: self.max_vertices,
            max_configurations: self.max_config,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Syntactic class, domain closedness and arena size.
    Check {
        spec: PathBuf,
        #[arg(long)]
        bounded: bool,
    },
    /// Solve the delay game and print the winner and Eve's strategy.
    Solve {
        spec: PathBuf,
        #[arg(long)]
        bounded: bool,
    },
    /// Solve and build the transformer; in bounded mode also a deterministic transducer.
    Synthesize {
        spec: PathBuf,
        #[arg(long)]
        bounded: bool,
        /// Write the deterministic transducer as a spec file.
        #[arg(long, value_name = "OUT", requires = "bounded")]
        emit_dft: Option<PathBuf>,
    },
    /// Run the synthesized transformer on an input lasso such as "ab|a".
    Run {
        spec: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        bounded: bool,
    },
    /// Write the transducer encoding a PCP instance; each pair is "u,v".
    GenPcp {
        #[arg(required = true)]
        pairs: Vec<String>,
        #[arg(short, long, value_name = "OUT")]
        output: PathBuf,
    },
    /// Reference checks that do not involve the game.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Whether the transducer relates the input lasso to the output lasso.
    Accept {
        spec: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        output: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        let code = match &e {
            SynthError::Determinize(_)
            | SynthError::Arena(ArenaError::VertexBudgetExceeded { .. })
            | SynthError::Alignment(_)
            | SynthError::PeriodNotFound { .. } => EXIT_BUDGET,
            SynthError::NotWinning | SynthError::PartialOutput { .. } => EXIT_REJECTED,
            SynthError::InvalidInstance(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<ArenaError> for Failure {
    fn from(e: ArenaError) -> Self {
        SynthError::from(e).into()
    }
}

/// A finished command: its report and exit code.
struct Report {
    code: u8,
    text: String,
    json: Value,
}

fn load(path: &Path) -> Result<Transducer, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn lasso_over(text: &str, alphabet: &[char], what: &str) -> Result<Lasso<char>, Failure> {
    let l = Lasso::parse(text).map_err(|e| Failure::new(EXIT_USAGE, format!("{what} {text:?}: {e}")))?;
    if let Some(c) = l.prefix().iter().chain(l.period()).find(|c| !alphabet.contains(c)) {
        return Err(Failure::new(EXIT_USAGE, format!("{what} {text:?}: symbol {c:?} is not in the alphabet")));
    }
    Ok(l)
}

fn mode(bounded: bool) -> Mode {
    if bounded {
        Mode::Bounded
    } else {
        Mode::Unbounded
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Unbounded => "unbounded",
        Mode::Bounded => "bounded",
    }
}

fn player_name(p: Player) -> &'static str {
    match p {
        Player::Eve => "Eve",
        Player::Adam => "Adam",
    }
}

fn action_text(arena: &Arena, a: &GameAction) -> String {
    let t = arena.transducer();
    match a {
        GameAction::Letter(c) => format!("read {c}"),
        GameAction::Skip => "skip".into(),
        GameAction::Produce { from, to, max } => {
            format!("produce {} -> {} max {max}", t.state_name(*from), t.state_name(*to))
        }
        GameAction::Forfeit => "forfeit".into(),
    }
}

fn strategy_report(solved: &Solved) -> (Vec<String>, Value) {
    let Some(s) = &solved.strategy else { return (Vec::new(), Value::Null) };
    let arena = &solved.arena;
    let mut lines = vec![format!("strategy: {} memory states, {} decisions", s.memory_size(), s.decisions())];
    let mut decisions = Vec::new();
    for (m, v, e) in s.choices() {
        let (action, _) = &arena.edges(v)[e];
        let vertex = arena.vertex(v);
        let state = arena.transducer().state_name(vertex.q);
        let action = action_text(arena, action);
        lines.push(format!("  m{m} v{v} [{state}, first P{}, second P{}]: {action}", vertex.first, vertex.second));
        decisions.push(json!({
            "memory": m, "vertex": v, "state": state,
            "first": vertex.first, "second": vertex.second, "action": action,
        }));
    }
    (lines, json!({ "memoryStates": s.memory_size(), "decisions": decisions }))
}

fn winner_code(p: Player) -> u8 {
    match p {
        Player::Eve => 0,
        Player::Adam => EXIT_REJECTED,
    }
}

fn distinct(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v.dedup();
    v
}

fn check(spec: &Path, bounded: bool, b: &Budgets) -> Result<Report, Failure> {
    let t = load(spec)?;
    let class = check_syntactic_class(&t);
    let d = build_domain_automaton(&t, b.max_states).map_err(SynthError::from)?;
    let closed = is_domain_closed(&d);
    let m = mode(bounded);
    let arena = build_arena(&t, &d, m, b.max_vertices)?;
    let ell = arena.profiles().ell();
    let priorities = distinct((0..t.state_count()).map(|q| t.priority(q)).collect());
    let domain_priorities = d.used_priorities();
    let text = format!(
        "class: {class}\nclosed domain: {closed}\nstates: {}, transitions: {}\ndomain automaton: {} states, priorities {domain_priorities:?}\n\
         priorities: {priorities:?}\nprofiles: {}, ell: {ell}\n{} arena: {} vertices, {} edges",
        t.state_count(),
        t.transitions().len(),
        d.state_count(),
        arena.profiles().len(),
        mode_name(m),
        arena.len(),
        arena.edge_count(),
    );
    let json = json!({
        "command": "check",
        "mode": mode_name(m),
        "class": class.to_string(),
        "closed": closed,
        "states": t.state_count(),
        "transitions": t.transitions().len(),
        "domainStates": d.state_count(),
        "domainPriorities": domain_priorities,
        "priorities": priorities,
        "profiles": arena.profiles().len(),
        "ell": ell,
        "vertexCount": arena.len(),
        "edgeCount": arena.edge_count(),
    });
    Ok(Report { code: 0, text, json })
}

fn solve_cmd(spec: &Path, bounded: bool, b: &Budgets) -> Result<Report, Failure> {
    let t = load(spec)?;
    let m = mode(bounded);
    let solved = solve(&t, m, b)?;
    let (strategy_lines, strategy) = strategy_report(&solved);
    let mut lines = vec![
        format!("{} wins ({} mode)", player_name(solved.winner), mode_name(m)),
        format!("arena: {} vertices, {} edges", solved.arena.len(), solved.arena.edge_count()),
        format!("product game: {} vertices", solved.product.game.len()),
    ];
    lines.extend(strategy_lines);
    let json = json!({
        "command": "solve",
        "mode": mode_name(m),
        "winner": player_name(solved.winner),
        "vertexCount": solved.arena.len(),
        "edgeCount": solved.arena.edge_count(),
        "productVertexCount": solved.product.game.len(),
        "strategy": strategy,
    });
    Ok(Report { code: winner_code(solved.winner), text: lines.join("\n"), json })
}

fn synthesize_cmd(spec: &Path, bounded: bool, emit: Option<&Path>, b: &Budgets) -> Result<Report, Failure> {
    let t = load(spec)?;
    let m = mode(bounded);
    let syn = synthesize(&t, m, b)?;
    let winner = syn.solved.winner;
    let mut lines = vec![
        format!("{} wins ({} mode)", player_name(winner), mode_name(m)),
        format!("class: {}, closed domain: {}, ell: {}", syn.class, syn.domain_closed, syn.ell),
    ];
    if let Some(s) = &syn.solved.strategy {
        lines.push(format!("transformer: {} memory states, {} decisions", s.memory_size(), s.decisions()));
    }
    let mut dft_json = Value::Null;
    if let Some(dft) = &syn.dft {
        let spec = dft.to_transducer();
        lines.push(format!("deterministic transducer: {} states, {} transitions", spec.state_count(), spec.transitions().len()));
        let mut written = Value::Null;
        if let Some(out) = emit {
            fs::write(out, emit_spec(&spec)).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", out.display())))?;
            lines.push(format!("wrote {}", out.display()));
            written = json!(out.display().to_string());
        }
        dft_json = json!({ "states": spec.state_count(), "transitions": spec.transitions().len(), "written": written });
    }
    let json = json!({
        "command": "synthesize",
        "mode": mode_name(m),
        "winner": player_name(winner),
        "class": syn.class.to_string(),
        "closed": syn.domain_closed,
        "ell": syn.ell,
        "memoryStates": syn.solved.strategy.as_ref().map(|s| s.memory_size()),
        "dft": dft_json,
    });
    Ok(Report { code: winner_code(winner), text: lines.join("\n"), json })
}

fn run_cmd(spec: &Path, input: &str, bounded: bool, b: &Budgets) -> Result<Report, Failure> {
    let t = load(spec)?;
    let input = lasso_over(input, t.input_alphabet(), "input")?;
    let solved = solve(&t, mode(bounded), b)?;
    let Some(strategy) = &solved.strategy else {
        return Err(Failure::new(EXIT_REJECTED, "Adam wins; there is no transformer to run"));
    };
    match run_executor(&solved.arena, strategy, &input, b.max_steps) {
        Ok(run) => {
            let verified = t.accepts_pair(&input, &run.output, b.max_configurations).map_err(SynthError::from)?;
            let text = format!("output: {}\nsteps: {}\nin relation: {verified}", run.output, run.steps);
            let json = json!({
                "command": "run",
                "input": input.to_string(),
                "inDomain": true,
                "output": run.output.to_string(),
                "steps": run.steps,
                "inRelation": verified,
            });
            Ok(Report { code: if verified { 0 } else { EXIT_INTERNAL }, text, json })
        }
        Err(SynthError::PartialOutput { emitted }) => {
            let text = format!("input {input} is outside the domain; emitted {emitted:?}");
            let json = json!({ "command": "run", "input": input.to_string(), "inDomain": false, "emitted": emitted });
            Ok(Report { code: EXIT_REJECTED, text, json })
        }
        Err(e) => Err(e.into()),
    }
}

fn gen_pcp(pairs: &[String], out: &Path) -> Result<Report, Failure> {
    let inst = PcpInstance::parse(&pairs.join(";")).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let t = pcp_to_spec(&inst);
    fs::write(out, emit_spec(&t)).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", out.display())))?;
    let text = format!("wrote {} ({} states, {} transitions)", out.display(), t.state_count(), t.transitions().len());
    let json = json!({
        "command": "gen-pcp",
        "pairs": inst.pairs().iter().map(|(u, v)| json!([u.iter().collect::<String>(), v.iter().collect::<String>()])).collect::<Vec<_>>(),
        "states": t.state_count(),
        "transitions": t.transitions().len(),
        "written": out.display().to_string(),
    });
    Ok(Report { code: 0, text, json })
}

fn accept(spec: &Path, input: &str, output: &str, b: &Budgets) -> Result<Report, Failure> {
    let t = load(spec)?;
    let input = lasso_over(input, t.input_alphabet(), "input")?;
    let output = lasso_over(output, t.output_alphabet(), "output")?;
    let accepted = t.accepts_pair(&input, &output, b.max_configurations).map_err(SynthError::from)?;
    let text = if accepted { "accepted" } else { "rejected" }.to_string();
    let json = json!({
        "command": "oracle accept",
        "input": input.to_string(),
        "output": output.to_string(),
        "accepted": accepted,
    });
    Ok(Report { code: if accepted { 0 } else { EXIT_REJECTED }, text, json })
}

/// Prints a report; a closed stdout (say, piped into `head`) is not an error.
fn emit(text: &str) {
    let _ = writeln!(io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let b = cli.budgets.budgets();
    let result = match &cli.command {
        Command::Check { spec, bounded } => check(spec, *bounded, &b),
        Command::Solve { spec, bounded } => solve_cmd(spec, *bounded, &b),
        Command::Synthesize { spec, bounded, emit_dft } => synthesize_cmd(spec, *bounded, emit_dft.as_deref(), &b),
        Command::Run { spec, input, bounded } => run_cmd(spec, input, *bounded, &b),
        Command::GenPcp { pairs, output } => gen_pcp(pairs, output),
        Command::Oracle { command: OracleCommand::Accept { spec, input, output } } => accept(spec, input, output, &b),
    };
    let code = match result {
        Ok(report) => {
            if cli.json {
                let mut json = report.json;
                json["formatVersion"] = json!(FORMAT_VERSION);
                json["exitCode"] = json!(report.code);
                emit(&serde_json::to_string_pretty(&json).expect("reports serialize"));
            } else {
                emit(&report.text);
            }
            report.code
        }
        Err(f) => {
            if cli.json {
                let json = json!({ "formatVersion": FORMAT_VERSION, "error": f.message, "exitCode": f.code });
                emit(&serde_json::to_string_pretty(&json).expect("reports serialize"));
            }
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    ExitCode::from(code)
}
