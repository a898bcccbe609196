use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::transducer::Transducer;
use crate::StateId;

/// Syntactic shape of a transducer once every transition is split into single-letter steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyntacticClass {
    /// Deterministic and strictly alternating between reading and writing.
    Aut,
    /// Deterministic, every step reads or writes, no state does both.
    Drat,
    Unknown,
}

impl fmt::Display for SyntacticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntacticClass::Aut => "AUT",
            SyntacticClass::Drat => "DRAT",
            SyntacticClass::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Step {
    Read(char),
    Write(char),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    State(StateId),
    Inner { from: StateId, read: Vec<char>, written: Vec<char> },
}

/// Splits every transition into a chain that first reads its input letters and then writes
/// its output letters. Chains leaving the same state share common prefixes.
fn split_view(t: &Transducer) -> Option<Vec<BTreeMap<Step, Vec<usize>>>> {
    let mut ids: HashMap<Node, usize> = HashMap::new();
    let mut out: Vec<BTreeMap<Step, Vec<usize>>> = Vec::new();
    let mut id_of = |n: Node, out: &mut Vec<BTreeMap<Step, Vec<usize>>>| {
        *ids.entry(n).or_insert_with(|| {
            out.push(BTreeMap::new());
            out.len() - 1
        })
    };
    for q in 0..t.state_count() {
        id_of(Node::State(q), &mut out);
    }
    for q in 0..t.state_count() {
        for tr in t.outgoing(q) {
            let steps: Vec<Step> = tr
                .input
                .iter()
                .map(|&c| Step::Read(c))
                .chain(tr.output.iter().map(|&c| Step::Write(c)))
                .collect();
            if steps.is_empty() {
                return None;
            }
            let mut cur = q;
            for k in 0..steps.len() {
                let next = if k + 1 == steps.len() {
                    tr.to
                } else {
                    let read = tr.input.len().min(k + 1);
                    let written = (k + 1).saturating_sub(tr.input.len());
                    id_of(
                        Node::Inner { from: q, read: tr.input[..read].to_vec(), written: tr.output[..written].to_vec() },
                        &mut out,
                    )
                };
                let targets = out[cur].entry(steps[k]).or_default();
                if !targets.contains(&next) {
                    targets.push(next);
                }
                cur = next;
            }
        }
    }
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Reading,
    Writing,
    Dead,
}

/// Classifies the transducer. States without outgoing steps may sit anywhere.
pub fn check_syntactic_class(t: &Transducer) -> SyntacticClass {
    let Some(view) = split_view(t) else { return SyntacticClass::Unknown };
    let mut kinds = Vec::with_capacity(view.len());
    for steps in &view {
        if steps.values().any(|targets| targets.len() > 1) {
            return SyntacticClass::Unknown;
        }
        let reads = steps.keys().any(|s| matches!(s, Step::Read(_)));
        let writes = steps.keys().any(|s| matches!(s, Step::Write(_)));
        kinds.push(match (reads, writes) {
            (true, true) => return SyntacticClass::Unknown,
            (true, false) => Kind::Reading,
            (false, true) => Kind::Writing,
            (false, false) => Kind::Dead,
        });
    }
    let alternating = view.iter().enumerate().all(|(n, steps)| {
        steps.values().all(|targets| {
            let k = kinds[targets[0]];
            k == Kind::Dead || k != kinds[n]
        })
    });
    if alternating {
        SyntacticClass::Aut
    } else {
        SyntacticClass::Drat
    }
}

/// Two runs over the same input from `from` that reach different reading states
/// although one output is a prefix of the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyViolation {
    pub from: StateId,
    pub input: String,
    pub first: (String, StateId),
    pub second: (String, StateId),
}

impl fmt::Display for PropertyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "from state {} on input {:?}: output {:?} reaches {} and output {:?} reaches {}",
            self.from, self.input, self.first.0, self.first.1, self.second.0, self.second.1
        )
    }
}

/// Checks, for inputs up to `max_input` letters and outputs up to `max_output` letters, that
/// runs between reading states (states with a transition that reads) never split into
/// different targets when one output extends the other.
pub fn check_property_p(t: &Transducer, max_input: usize, max_output: usize) -> Result<(), PropertyViolation> {
    let reading: Vec<bool> =
        (0..t.state_count()).map(|q| t.outgoing(q).any(|tr| !tr.input.is_empty())).collect();
    for p in (0..t.state_count()).filter(|&p| reading[p]) {
        let start = (p, Vec::new(), Vec::new());
        let mut seen = std::collections::HashSet::from([start.clone()]);
        let mut stack = vec![start];
        let mut ends: BTreeMap<Vec<char>, Vec<(Vec<char>, StateId)>> = BTreeMap::new();
        while let Some((q, u, v)) = stack.pop() {
            if reading[q] && !u.is_empty() {
                ends.entry(u.clone()).or_default().push((v.clone(), q));
            }
            for tr in t.outgoing(q) {
                if u.len() + tr.input.len() > max_input || v.len() + tr.output.len() > max_output {
                    continue;
                }
                let mut u2 = u.clone();
                u2.extend_from_slice(&tr.input);
                let mut v2 = v.clone();
                v2.extend_from_slice(&tr.output);
                let next = (tr.to, u2, v2);
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
        for (u, runs) in &ends {
            for (i, (v1, q)) in runs.iter().enumerate() {
                for (v2, r) in &runs[i + 1..] {
                    if q != r && (v2.starts_with(v1) || v1.starts_with(v2)) {
                        return Err(PropertyViolation {
                            from: p,
                            input: u.iter().collect(),
                            first: (v1.iter().collect(), *q),
                            second: (v2.iter().collect(), *r),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transducer::TransducerBuilder;

    #[test]
    fn letter_to_letter_is_aut() {
        let mut b = TransducerBuilder::new("ab", "ab");
        let q = b.state("q", 0);
        b.transition(q, "a", "a", q).transition(q, "b", "b", q);
        assert_eq!(check_syntactic_class(&b.build(q).unwrap()), SyntacticClass::Aut);
    }

    #[test]
    fn consecutive_reads_are_drat() {
        let mut b = TransducerBuilder::new("ab", "x");
        let p = b.state("p", 0);
        let q = b.state("q", 0);
        b.transition(p, "a", "", q).transition(q, "b", "x", p);
        assert_eq!(check_syntactic_class(&b.build(p).unwrap()), SyntacticClass::Drat);
    }

    #[test]
    fn choice_on_same_letter_is_unknown() {
        let mut b = TransducerBuilder::new("a", "xy");
        let p = b.state("p", 0);
        b.transition(p, "a", "x", p).transition(p, "a", "", p);
        assert_eq!(check_syntactic_class(&b.build(p).unwrap()), SyntacticClass::Unknown);
    }

    #[test]
    fn shared_prefixes_are_merged() {
        let mut b = TransducerBuilder::new("a", "xy");
        let p = b.state("p", 0);
        b.transition(p, "a", "x", p).transition(p, "a", "y", p);
        assert_eq!(check_syntactic_class(&b.build(p).unwrap()), SyntacticClass::Aut);
    }

    #[test]
    fn property_p_violation() {
        let mut b = TransducerBuilder::new("a", "x");
        let p = b.state("p", 0);
        let q = b.state("q", 0);
        b.transition(p, "a", "x", p).transition(p, "a", "xx", q).transition(q, "a", "x", q);
        let err = check_property_p(&b.build(p).unwrap(), 3, 3).unwrap_err();
        assert_eq!(err.input, "a");
        let mut b = TransducerBuilder::new("a", "xy");
        let p = b.state("p", 0);
        let q = b.state("q", 0);
        b.transition(p, "a", "x", p).transition(p, "a", "y", q).transition(q, "a", "x", q);
        assert!(check_property_p(&b.build(p).unwrap(), 3, 3).is_ok());
    }
}
