//! WebAssembly bindings for the static demo page in `www/`. Every entry point takes the text of a
//! transducer file and returns a JSON report; errors come back as `{"error": ...}`.

use serde_json::{json, Value};
use streamsynth::format::{parse_spec, FORMAT_VERSION};
use streamsynth::game::Mode;
use streamsynth::parity::Player;
use streamsynth::synth::{run_executor, solve, synthesize, Budgets, SynthError};
use streamsynth::{Lasso, Transducer};
use wasm_bindgen::prelude::wasm_bindgen;

/// Kept small: the page runs on the main thread.
fn budgets() -> Budgets {
    Budgets { max_states: 20_000, max_vertices: 200_000, max_configurations: 200_000, max_steps: 20_000 }
}

fn mode(bounded: bool) -> Mode {
    if bounded {
        Mode::Bounded
    } else {
        Mode::Unbounded
    }
}

fn winner(p: Player) -> &'static str {
    match p {
        Player::Eve => "Eve",
        Player::Adam => "Adam",
    }
}

fn lasso(text: &str, alphabet: &[char], what: &str) -> Result<Lasso<char>, String> {
    let l = Lasso::parse(text).map_err(|e| format!("{what}: {e}"))?;
    match l.prefix().iter().chain(l.period()).find(|c| !alphabet.contains(c)) {
        Some(c) => Err(format!("{what}: symbol {c:?} is not in the alphabet")),
        None => Ok(l),
    }
}

fn report(result: Result<Value, String>) -> String {
    let mut v = result.unwrap_or_else(|e| json!({ "error": e }));
    v["formatVersion"] = json!(FORMAT_VERSION);
    v.to_string()
}

fn spec(text: &str) -> Result<Transducer, String> {
    parse_spec(text).map_err(|e| e.to_string())
}

fn err(e: SynthError) -> String {
    e.to_string()
}

/// Winner of the delay game, syntactic class and arena size.
#[wasm_bindgen]
pub fn solve_spec(spec_text: &str, bounded: bool) -> String {
    report((|| {
        let t = spec(spec_text)?;
        let syn = synthesize(&t, mode(bounded), &budgets()).map_err(err)?;
        Ok(json!({
            "winner": winner(syn.solved.winner),
            "class": syn.class.to_string(),
            "closed": syn.domain_closed,
            "ell": syn.ell,
            "vertexCount": syn.solved.arena.len(),
            "edgeCount": syn.solved.arena.edge_count(),
            "memoryStates": syn.solved.strategy.as_ref().map(|s| s.memory_size()),
            "dftStates": syn.dft.as_ref().map(|d| d.state_count()),
        }))
    })())
}

/// Output of the synthesized transformer on an input lasso.
#[wasm_bindgen]
pub fn run_spec(spec_text: &str, input: &str, bounded: bool) -> String {
    report((|| {
        let t = spec(spec_text)?;
        let input = lasso(input, t.input_alphabet(), "input")?;
        let solved = solve(&t, mode(bounded), &budgets()).map_err(err)?;
        let strategy = solved.strategy.as_ref().ok_or("Adam wins; there is no transformer to run")?;
        match run_executor(&solved.arena, strategy, &input, budgets().max_steps) {
            Ok(run) => Ok(json!({ "inDomain": true, "output": run.output.to_string(), "steps": run.steps })),
            Err(SynthError::PartialOutput { emitted }) => Ok(json!({ "inDomain": false, "emitted": emitted })),
            Err(e) => Err(err(e)),
        }
    })())
}

/// Whether the transducer relates the two lassos.
#[wasm_bindgen]
pub fn accept_pair(spec_text: &str, input: &str, output: &str) -> String {
    report((|| {
        let t = spec(spec_text)?;
        let input = lasso(input, t.input_alphabet(), "input")?;
        let output = lasso(output, t.output_alphabet(), "output")?;
        let accepted = t.accepts_pair(&input, &output, budgets().max_configurations).map_err(|e| e.to_string())?;
        Ok(json!({ "accepted": accepted }))
    })())
}

/// Bundled example specs as a JSON object from name to file text.
#[wasm_bindgen]
pub fn examples() -> String {
    let map: serde_json::Map<String, Value> =
        streamsynth::fixtures::ALL.iter().map(|(name, text)| (name.to_string(), json!(text))).collect();
    Value::Object(map).to_string()
}
