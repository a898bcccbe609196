use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LassoError {
    #[error("lasso period must be non-empty")]
    EmptyPeriod,
    #[error("lasso text must have the form prefix|period, got {0:?}")]
    Syntax(String),
}

/// An ultimately periodic word `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso<S = char> {
    prefix: Vec<S>,
    period: Vec<S>,
}

impl<S: Clone + PartialEq> Lasso<S> {
    pub fn new(prefix: Vec<S>, period: Vec<S>) -> Result<Self, LassoError> {
        if period.is_empty() {
            return Err(LassoError::EmptyPeriod);
        }
        Ok(Lasso { prefix, period })
    }

    pub fn prefix(&self) -> &[S] {
        &self.prefix
    }

    pub fn period(&self) -> &[S] {
        &self.period
    }

    /// Number of distinct positions of the lasso graph: prefix positions followed by period positions.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    pub fn letter_at_position(&self, pos: usize) -> &S {
        if pos < self.prefix.len() {
            &self.prefix[pos]
        } else {
            &self.period[pos - self.prefix.len()]
        }
    }

    pub fn next_position(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    /// Position reached after reading `steps` letters from position `pos`.
    pub fn advance(&self, pos: usize, steps: usize) -> usize {
        let total = pos + steps;
        if total < self.positions() {
            total
        } else {
            let p = self.prefix.len();
            p + (total - p) % self.period.len()
        }
    }

    /// Lasso position holding the letter with index `i` of the infinite word.
    pub fn position_of_index(&self, i: usize) -> usize {
        self.advance(0, i)
    }

    pub fn at(&self, i: usize) -> &S {
        self.letter_at_position(self.position_of_index(i))
    }

    pub fn take(&self, n: usize) -> Vec<S> {
        (0..n).map(|i| self.at(i).clone()).collect()
    }

    /// Whether both lassos denote the same infinite word.
    pub fn same_word(&self, other: &Lasso<S>) -> bool {
        let horizon = self.prefix.len().max(other.prefix.len()) + self.period.len() * other.period.len();
        (0..horizon).all(|i| self.at(i) == other.at(i))
    }

    /// The shortest prefix and period presenting the same word.
    pub fn canonical(&self) -> Lasso<S> {
        let n = self.period.len();
        let mut period = self.period.clone();
        for d in 1..=n {
            if n.is_multiple_of(d) && (0..n).all(|i| self.period[i] == self.period[i % d]) {
                period.truncate(d);
                break;
            }
        }
        let mut prefix = self.prefix.clone();
        while let Some(last) = prefix.last() {
            if *last == period[period.len() - 1] {
                prefix.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        Lasso { prefix, period }
    }
}

impl Lasso<char> {
    pub fn parse(text: &str) -> Result<Self, LassoError> {
        let text = text.trim();
        let (prefix, period) = text
            .split_once('|')
            .ok_or_else(|| LassoError::Syntax(text.to_string()))?;
        if period.contains('|') {
            return Err(LassoError::Syntax(text.to_string()));
        }
        Lasso::new(prefix.chars().collect(), period.chars().collect())
    }
}

impl fmt::Display for Lasso<char> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix: String = self.prefix.iter().collect();
        let period: String = self.period.iter().collect();
        write!(f, "{prefix}|{period}")
    }
}
