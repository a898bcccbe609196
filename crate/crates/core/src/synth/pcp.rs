use std::collections::HashMap;

use super::SynthError;
use crate::lasso::Lasso;
use crate::transducer::{Transducer, TransducerBuilder, DEFAULT_MAX_CONFIGURATIONS};
use crate::StateId;

/// A Post correspondence instance over {a, b}. Pair `i` is selected by the input digit `i`,
/// counting from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcpInstance {
    pairs: Vec<(Vec<char>, Vec<char>)>,
}

impl PcpInstance {
    pub fn new<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Self, SynthError> {
        if pairs.is_empty() || pairs.len() > 9 {
            return Err(SynthError::InvalidInstance(format!("expected 1 to 9 pairs, got {}", pairs.len())));
        }
        let mut out = Vec::new();
        for (i, (u, v)) in pairs.iter().enumerate() {
            let (u, v) = (u.as_ref(), v.as_ref());
            for w in [u, v] {
                if w.is_empty() || w.chars().any(|c| c != 'a' && c != 'b') {
                    return Err(SynthError::InvalidInstance(format!(
                        "pair {}: words must be non-empty over {{a, b}}, got {w:?}",
                        i + 1
                    )));
                }
            }
            out.push((u.chars().collect(), v.chars().collect()));
        }
        Ok(PcpInstance { pairs: out })
    }

    /// Parses `u1,v1;u2,v2;...`.
    pub fn parse(s: &str) -> Result<Self, SynthError> {
        let mut pairs = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (u, v) = part
                .split_once(',')
                .ok_or_else(|| SynthError::InvalidInstance(format!("pair {part:?} has no comma")))?;
            pairs.push((u.trim().to_string(), v.trim().to_string()));
        }
        Self::new(&pairs)
    }

    pub fn pairs(&self) -> &[(Vec<char>, Vec<char>)] {
        &self.pairs
    }

    pub fn index_letter(i: usize) -> char {
        char::from_digit(i as u32 + 1, 10).unwrap()
    }

    pub fn upper(&self, indices: &[usize]) -> Vec<char> {
        indices.iter().flat_map(|&i| self.pairs[i].0.iter().copied()).collect()
    }

    pub fn lower(&self, indices: &[usize]) -> Vec<char> {
        indices.iter().flat_map(|&i| self.pairs[i].1.iter().copied()).collect()
    }

    pub fn is_solution(&self, indices: &[usize]) -> bool {
        !indices.is_empty() && indices.iter().all(|&i| i < self.pairs.len()) && self.upper(indices) == self.lower(indices)
    }
}

fn flip(c: char) -> char {
    if c == 'a' {
        'b'
    } else {
        'a'
    }
}

/// How far the upper word runs ahead of the lower one, or that they disagree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Overhang {
    Upper(Vec<char>),
    Lower(Vec<char>),
    Mismatch,
}

impl Overhang {
    fn extend(&self, u: &[char], v: &[char]) -> Overhang {
        let (mut x, mut y) = match self {
            Overhang::Mismatch => return Overhang::Mismatch,
            Overhang::Upper(w) => ([w.as_slice(), u].concat(), v.to_vec()),
            Overhang::Lower(w) => (u.to_vec(), [w.as_slice(), v].concat()),
        };
        let common = x.iter().zip(&y).take_while(|(a, b)| a == b).count();
        if common < x.len().min(y.len()) {
            return Overhang::Mismatch;
        }
        x.drain(..common);
        y.drain(..common);
        if y.is_empty() {
            Overhang::Upper(x)
        } else {
            Overhang::Lower(y)
        }
    }

    fn len(&self) -> usize {
        match self {
            Overhang::Upper(w) | Overhang::Lower(w) => w.len(),
            Overhang::Mismatch => 0,
        }
    }

    fn name(&self) -> String {
        match self {
            Overhang::Upper(w) => format!("P+{}", w.iter().collect::<String>()),
            Overhang::Lower(w) => format!("P-{}", w.iter().collect::<String>()),
            Overhang::Mismatch => "P!".to_string(),
        }
    }
}

/// A transducer whose relation has a continuous uniformizer exactly when the instance has no
/// solution.
///
/// Inputs have the shape `i1 .. ik x` with `k >= 1` and `x` an infinite word over {a, b}. With
/// `U` and `V` the concatenated upper and lower words, the admissible outputs are
/// `U a^ω` when `x` has infinitely many a, and any word that does not start with `V` otherwise.
/// `U a^ω` is also admissible once the indices read so far show that it does not start
/// with `V`. Malformed inputs admit every output.
pub fn pcp_to_spec(inst: &PcpInstance) -> Transducer {
    let n = inst.pairs.len();
    let digits: Vec<String> = (0..n).map(|i| PcpInstance::index_letter(i).to_string()).collect();
    let input: String = digits.concat() + "ab";
    let mut b = TransducerBuilder::new(&input, "ab");
    let s = b.state("S", 0);
    let any = b.state("ANY", 0);
    let bad_idx = b.state("BadIdx", 0);
    let bad_tail = b.state("BadTail", 1);
    let inf = b.state("Inf", 0);
    let inf_a = b.state("InfA", 2);
    let inf_b = b.state("InfB", 1);
    let fin = b.state("Fin", 0);
    let free = b.state("Free", 0);
    let fin_a = b.state("FinA", 1);
    let fin_b = b.state("FinB", 0);
    let j = b.state("J", 0);

    let all: Vec<&str> = digits.iter().map(String::as_str).chain(["a", "b"]).collect();
    let every_output = |b: &mut TransducerBuilder, from: StateId, x: &str, to: StateId| {
        b.transition(from, x, "a", to).transition(from, x, "b", to);
    };
    for &x in &all {
        every_output(&mut b, any, x, any);
    }
    for x in ["a", "b"] {
        every_output(&mut b, s, x, any);
    }
    // Malformed inputs: a digit after the tail has started.
    for d in &digits {
        every_output(&mut b, s, d, bad_idx);
        every_output(&mut b, bad_idx, d, bad_idx);
        every_output(&mut b, bad_tail, d, any);
    }
    for x in ["a", "b"] {
        every_output(&mut b, bad_idx, x, bad_tail);
        every_output(&mut b, bad_tail, x, bad_tail);
    }

    // Infinitely many a: output U then a forever.
    for (i, d) in digits.iter().enumerate() {
        let u: String = inst.pairs[i].0.iter().collect();
        b.transition(s, d, &u, inf).transition(inf, d, &u, inf);
    }
    for from in [inf, inf_a, inf_b] {
        b.transition(from, "a", "a", inf_a).transition(from, "b", "a", inf_b);
        if from != inf {
            for d in &digits {
                every_output(&mut b, from, d, any);
            }
        }
    }

    // Finitely many a: output anything that leaves V early.
    for (i, d) in digits.iter().enumerate() {
        let v = &inst.pairs[i].1;
        let vs: String = v.iter().collect();
        for from in [s, fin] {
            b.transition(from, d, &vs, fin);
            for k in 0..v.len() {
                let w: String = v[..k].iter().chain(std::iter::once(&flip(v[k]))).collect();
                b.transition(from, d, &w, free);
            }
        }
        every_output(&mut b, free, d, free);
    }
    for from in [free, fin_a, fin_b] {
        every_output(&mut b, from, "a", fin_a);
        every_output(&mut b, from, "b", fin_b);
        if from != free {
            for d in &digits {
                every_output(&mut b, from, d, any);
            }
        }
    }

    // Output a forever once the chosen indices cannot form a solution with this tail.
    let cap = 2 * inst.pairs.iter().map(|(u, v)| u.len().max(v.len())).max().unwrap();
    let mut ids: HashMap<Overhang, StateId> = HashMap::new();
    let mut todo = Vec::new();
    let mut edges = Vec::new();
    for (i, d) in digits.iter().enumerate() {
        let next = Overhang::Upper(Vec::new()).extend(&inst.pairs[i].0, &inst.pairs[i].1);
        if next.len() <= cap {
            edges.push((None, d.clone(), inst.pairs[i].0.clone(), next));
        }
    }
    let mut k = 0;
    loop {
        while k < edges.len() {
            let (from, d, u, next) = edges[k].clone();
            let to = *ids.entry(next.clone()).or_insert_with(|| {
                todo.push(next.clone());
                b.state(&next.name(), 0)
            });
            let u: String = u.iter().collect();
            b.transition(from.map_or(s, |f| ids[&f]), &d, &u, to);
            k += 1;
        }
        let Some(h) = todo.pop() else { break };
        let p = ids[&h];
        for (i, d) in digits.iter().enumerate() {
            let next = h.extend(&inst.pairs[i].0, &inst.pairs[i].1);
            if next.len() <= cap {
                edges.push((Some(h.clone()), d.clone(), inst.pairs[i].0.clone(), next));
            }
        }
        let hopeless = match &h {
            Overhang::Mismatch => true,
            Overhang::Lower(w) => w.contains(&'b'),
            Overhang::Upper(_) => false,
        };
        if hopeless {
            b.transition(p, "a", "a", j).transition(p, "b", "a", j);
        }
    }
    b.transition(j, "a", "a", j).transition(j, "b", "a", j);
    for d in &digits {
        every_output(&mut b, j, d, any);
    }
    b.build(s).expect("the construction only uses declared letters and states")
}

/// Two domain inputs with a common prefix whose admissible outputs already differ in the
/// first letter, so no continuous uniformizer can exist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceWitness {
    pub first: Lasso<char>,
    pub second: Lasso<char>,
    pub shared_prefix: Vec<char>,
    pub first_letters: Vec<char>,
    pub second_letters: Vec<char>,
}

/// Builds the witness for a solution of the instance: the index word followed by `a^ω`
/// and by `b^ω`. Returns `None` when the admissible first output letters overlap.
pub fn divergence_witness(
    t: &Transducer,
    inst: &PcpInstance,
    solution: &[usize],
) -> Result<Option<DivergenceWitness>, SynthError> {
    if solution.is_empty() || solution.iter().any(|&i| i >= inst.pairs.len()) {
        return Err(SynthError::InvalidInstance("index word must be non-empty and in range".to_string()));
    }
    let prefix: Vec<char> = solution.iter().map(|&i| PcpInstance::index_letter(i)).collect();
    let first = Lasso::new(prefix.clone(), vec!['a']).unwrap();
    let second = Lasso::new(prefix.clone(), vec!['b']).unwrap();
    let letters = |x: &Lasso<char>| -> Result<Vec<char>, SynthError> {
        let mut out = Vec::new();
        for &c in t.output_alphabet() {
            if t.admits_output_prefix(x, &[c], DEFAULT_MAX_CONFIGURATIONS)? {
                out.push(c);
            }
        }
        Ok(out)
    };
    let first_letters = letters(&first)?;
    let second_letters = letters(&second)?;
    let diverges = !first_letters.is_empty()
        && !second_letters.is_empty()
        && first_letters.iter().all(|c| !second_letters.contains(c));
    Ok(diverges.then_some(DivergenceWitness { first, second, shared_prefix: prefix, first_letters, second_letters }))
}
