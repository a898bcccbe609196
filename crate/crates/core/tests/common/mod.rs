#![allow(dead_code)]

pub mod games;

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use streamsynth::automaton::{Dpa, ParityAutomaton};
use streamsynth::fixtures;
use streamsynth::profile::{Profile, RunMax};
use streamsynth::synth::{pcp_to_spec, PcpInstance};
use streamsynth::{Lasso, Priority, Transducer, TransducerBuilder};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_word(rng: &mut StdRng, alphabet: &[char], max_len: usize) -> Vec<char> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

pub fn random_lasso(rng: &mut StdRng, alphabet: &[char], max_prefix: usize, max_period: usize) -> Lasso<char> {
    let prefix = random_word(rng, alphabet, max_prefix);
    let mut period = random_word(rng, alphabet, max_period - 1);
    period.push(alphabet[rng.gen_range(0..alphabet.len())]);
    Lasso::new(prefix, period).unwrap()
}

/// Random lassos accepted by `domain`, by rejection. Returns fewer than `n` if the
/// domain is too thin to hit within the attempt budget.
pub fn sample_domain(rng: &mut StdRng, domain: &Dpa<char>, n: usize, max_prefix: usize, max_period: usize) -> Vec<Lasso<char>> {
    let alphabet = domain.alphabet().to_vec();
    let mut out = Vec::new();
    for _ in 0..200_000 {
        if out.len() == n {
            break;
        }
        let l = random_lasso(rng, &alphabet, max_prefix, max_period);
        if domain.accepts(&l) {
            out.push(l);
        }
    }
    out
}

/// A small transducer over inputs {a, b} and outputs {x, y} with random priorities,
/// multi-letter words on both sides and a few output-only moves.
pub fn random_transducer(rng: &mut StdRng, max_states: usize) -> Transducer {
    let n = rng.gen_range(1..=max_states);
    let mut b = TransducerBuilder::new("ab", "xy");
    let states: Vec<_> = (0..n).map(|i| b.state(&format!("s{i}"), rng.gen_range(0..4))).collect();
    let out = |rng: &mut StdRng, min: usize| -> String {
        let len = rng.gen_range(min..=2);
        (0..len).map(|_| if rng.gen_bool(0.5) { 'x' } else { 'y' }).collect()
    };
    for &p in &states {
        for a in ["a", "b"] {
            for _ in 0..rng.gen_range(0..=2) {
                let w = out(rng, 0);
                let mut input = a.to_string();
                if rng.gen_bool(0.1) {
                    input.push(if rng.gen_bool(0.5) { 'a' } else { 'b' });
                }
                b.transition(p, &input, &w, states[rng.gen_range(0..n)]);
            }
        }
        if rng.gen_bool(0.15) {
            let w = out(rng, 1);
            b.transition(p, "", &w, states[rng.gen_range(0..n)]);
        }
    }
    b.build(states[0]).unwrap()
}

/// A transducer whose states either read one input letter or write one output letter,
/// deterministically. With `alternating`, reading and writing states alternate.
pub fn random_drat(rng: &mut StdRng, max_states: usize, alternating: bool) -> Transducer {
    let n = rng.gen_range(2..=max_states.max(2));
    let mut b = TransducerBuilder::new("ab", "xy");
    let reads: Vec<bool> = (0..n).map(|i| if alternating { i % 2 == 0 } else { i == 0 || rng.gen_bool(0.5) }).collect();
    let states: Vec<_> = (0..n).map(|i| b.state(&format!("s{i}"), rng.gen_range(0..3))).collect();
    for q in 0..n {
        let targets: Vec<usize> =
            (0..n).filter(|&r| !alternating || reads[r] != reads[q]).collect();
        let letters: &[&str] = if reads[q] { &["a", "b"] } else { &["x", "y"] };
        for &c in letters {
            if !reads[q] && rng.gen_bool(0.4) {
                continue;
            }
            let to = targets[rng.gen_range(0..targets.len())];
            if reads[q] {
                b.transition(states[q], c, "", states[to]);
            } else {
                b.transition(states[q], "", c, states[to]);
            }
        }
    }
    b.build(states[0]).unwrap()
}

/// Random nondeterministic parity automaton over {a, b}.
pub fn random_npa(rng: &mut StdRng, max_states: usize, max_priority: Priority) -> ParityAutomaton<char> {
    let n = rng.gen_range(1..=max_states);
    let mut a = ParityAutomaton::new(vec!['a', 'b'], (0..n).map(|_| rng.gen_range(0..=max_priority)).collect(), 0);
    for q in 0..n {
        for l in 0..2 {
            for _ in 0..rng.gen_range(0..=2) {
                a.add_transition(q, l, rng.gen_range(0..n));
            }
        }
    }
    a
}

/// Infinitely many `a` when `infinitely_many` holds, otherwise finitely many, over {a, b}.
pub fn count_a_npa(infinitely_many: bool) -> ParityAutomaton<char> {
    if infinitely_many {
        // Deterministic: priority 2 after an a, 1 after a b.
        let mut a = ParityAutomaton::new(vec!['a', 'b'], vec![1, 2], 0);
        for q in 0..2 {
            a.add_transition(q, 0, 1);
            a.add_transition(q, 1, 0);
        }
        a
    } else {
        // Guess the last a, then read only b.
        let mut a = ParityAutomaton::new(vec!['a', 'b'], vec![1, 0], 0);
        a.add_transition(0, 0, 0);
        a.add_transition(0, 1, 0);
        a.add_transition(0, 1, 1);
        a.add_transition(1, 1, 1);
        a
    }
}

/// Bundled fixtures, both PCP encodings and a few seeded random transducers.
pub fn regression_transducers() -> Vec<(String, Transducer)> {
    let mut out: Vec<(String, Transducer)> =
        fixtures::ALL.iter().map(|(name, _)| (name.to_string(), fixtures::load(name))).collect();
    for pairs in ["a,b", "a,a"] {
        out.push((format!("pcp {pairs}"), pcp_to_spec(&PcpInstance::parse(pairs).unwrap())));
    }
    let mut r = rng(7);
    for i in 0..6 {
        out.push((format!("random {i}"), random_transducer(&mut r, 4)));
    }
    out
}

/// Profile of `word` by enumerating runs of the transducer directly: every configuration
/// (state, letters read, largest priority) reachable from each source.
pub fn profile_by_runs(t: &Transducer, word: &[char]) -> Profile {
    if word.is_empty() {
        return Profile::identity(t.state_count());
    }
    let mut triples = Vec::new();
    for p in 0..t.state_count() {
        let start = (p, 0usize, t.priority(p));
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some((q, pos, m)) = queue.pop_front() {
            if pos == word.len() {
                triples.push((p, q, RunMax::Seen(m)));
            }
            for tr in t.transitions().iter().filter(|tr| tr.from == q) {
                if !word[pos..].starts_with(&tr.input) {
                    continue;
                }
                let next = (tr.to, pos + tr.input.len(), m.max(t.priority(tr.to)));
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    Profile::from_triples(triples)
}

/// All words of length `len` over `alphabet`.
pub fn all_words(alphabet: &[char], len: usize) -> Vec<Vec<char>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w: Vec<char>| {
                alphabet.iter().map(move |&c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

/// Distinct infinite words among `lassos`.
pub fn distinct_words(lassos: &[Lasso<char>]) -> usize {
    lassos.iter().map(|l| l.canonical()).collect::<BTreeSet<_>>().len()
}
