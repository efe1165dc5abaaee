use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{CollageSystem, NtId, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `X -> Y^r` with `r < 3`.
    RepeatTooSmall { id: NtId, count: BigUint },
    /// `X -> Y[b..e)` outside `1 <= b < e <= |Y| + 1`.
    TruncationBounds { id: NtId, begin: BigUint, end: BigUint, referent_len: BigUint },
    /// Not involved in expanding the start symbol.
    Useless { id: NtId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RepeatTooSmall { id, count } => {
                write!(f, "X{id}: repetition count {count} is below 3")
            }
            Violation::TruncationBounds { id, begin, end, referent_len } => write!(
                f,
                "X{id}: truncation [{begin}..{end}) violates 1 <= b < e <= {}",
                referent_len + 1u32
            ),
            Violation::Useless { id } => write!(f, "X{id}: useless nonterminal"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Lists every invariant violation of `g`. Bounds are checked against
/// exact expansion lengths.
pub fn validate(g: &CollageSystem) -> ValidationReport {
    let lens = g.lengths();
    let used = g.used();
    let three = BigUint::from(3u8);
    let mut violations = Vec::new();
    for id in g.ids() {
        match g.rule(id) {
            Rule::Repeat(_, r) if *r < three => {
                violations.push(Violation::RepeatTooSmall { id, count: r.clone() })
            }
            Rule::Truncate(y, b, e) => {
                let len = &lens[y - 1];
                if b.is_zero() || b >= e || *e > len + BigUint::one() {
                    violations.push(Violation::TruncationBounds {
                        id,
                        begin: b.clone(),
                        end: e.clone(),
                        referent_len: len.clone(),
                    });
                }
            }
            _ => {}
        }
        if !used[id] {
            violations.push(Violation::Useless { id });
        }
    }
    ValidationReport { violations }
}
