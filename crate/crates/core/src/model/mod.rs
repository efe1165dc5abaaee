//! Collage systems: rules, the system container, and everything derived
//! directly from a system (lengths, expansion, grammar tree, factorization).

mod clg;
mod expand;
pub(crate) mod factorization;
mod tree;
mod validate;

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

pub use clg::{parse_system, serialize_system, ParseError, ParseErrorKind};
pub use expand::{expand, ExpandError};
pub use factorization::{ics_factorization, Factor, FactorKind, FactorizationError, TypedFactorization};
pub use tree::{grammar_tree, is_internal, stats, GrammarTree, SystemStats, TreeLabel, TreeNode};
pub use validate::{validate, ValidationReport, Violation};

/// Nonterminal id, 1-based. `X<id>` in the text format.
pub type NtId = usize;

/// Right-hand side of a production.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `X -> a`
    Atomic(char),
    /// `X -> Y Z`
    Concat(NtId, NtId),
    /// `X -> Y^r`, `r >= 3`.
    Repeat(NtId, BigUint),
    /// `X -> Y[b..e)`, 1-based half-open, `1 <= b < e <= |Y| + 1`.
    Truncate(NtId, BigUint, BigUint),
}

impl Rule {
    /// Nonterminals named on the right-hand side, left to right.
    pub fn referents(&self) -> impl Iterator<Item = NtId> {
        let (a, b) = match *self {
            Rule::Atomic(_) => (None, None),
            Rule::Concat(y, z) => (Some(y), Some(z)),
            Rule::Repeat(y, _) | Rule::Truncate(y, _, _) => (Some(y), None),
        };
        a.into_iter().chain(b)
    }

    /// Referents reached without passing through a truncation.
    pub fn structural_referents(&self) -> impl Iterator<Item = NtId> {
        let (a, b) = match *self {
            Rule::Atomic(_) | Rule::Truncate(..) => (None, None),
            Rule::Concat(y, z) => (Some(y), Some(z)),
            Rule::Repeat(y, _) => (Some(y), None),
        };
        a.into_iter().chain(b)
    }

    pub fn is_truncation(&self) -> bool {
        matches!(self, Rule::Truncate(..))
    }

    /// Same rule with every referent passed through `f`.
    pub fn map_referents(&self, mut f: impl FnMut(NtId) -> NtId) -> Rule {
        match self {
            Rule::Atomic(c) => Rule::Atomic(*c),
            Rule::Concat(y, z) => Rule::Concat(f(*y), f(*z)),
            Rule::Repeat(y, r) => Rule::Repeat(f(*y), r.clone()),
            Rule::Truncate(y, b, e) => Rule::Truncate(f(*y), b.clone(), e.clone()),
        }
    }
}

/// Structural errors that make a rule list unusable as a collage system.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("a collage system needs at least one rule")]
    Empty,
    #[error("start symbol X{0} is not defined")]
    UndefinedStart(NtId),
    #[error("X{id} refers to X{referent}, which is not a smaller nonterminal")]
    NotTopological { id: NtId, referent: NtId },
}

/// An ordered rule list deriving a single string from `start`.
///
/// Construction guarantees the topological order (every rule refers to
/// strictly smaller ids) and a defined start symbol. The remaining
/// invariants (repeat counts, truncation bounds, no useless nonterminals)
/// are checked by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollageSystem {
    rules: Vec<Rule>,
    start: NtId,
}

impl CollageSystem {
    pub fn new(rules: Vec<Rule>, start: NtId) -> Result<Self, StructureError> {
        if rules.is_empty() {
            return Err(StructureError::Empty);
        }
        if start == 0 || start > rules.len() {
            return Err(StructureError::UndefinedStart(start));
        }
        for (idx, rule) in rules.iter().enumerate() {
            let id = idx + 1;
            if let Some(referent) = rule.referents().find(|&r| r == 0 || r >= id) {
                return Err(StructureError::NotTopological { id, referent });
            }
        }
        Ok(CollageSystem { rules, start })
    }

    /// System whose start symbol is the last rule.
    pub fn with_last_start(rules: Vec<Rule>) -> Result<Self, StructureError> {
        let start = rules.len();
        Self::new(rules, start)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: NtId) -> &Rule {
        &self.rules[id - 1]
    }

    pub fn start(&self) -> NtId {
        self.start
    }

    /// Number of nonterminals, `m`.
    pub fn size(&self) -> usize {
        self.rules.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = NtId> {
        1..=self.rules.len()
    }

    /// `|⟦X⟧|` for every nonterminal, indexed by `id - 1`.
    ///
    /// Truncations with inverted bounds contribute length zero; `validate`
    /// reports them.
    pub fn lengths(&self) -> Vec<BigUint> {
        let mut lens: Vec<BigUint> = Vec::with_capacity(self.rules.len());
        for rule in &self.rules {
            let len = match rule {
                Rule::Atomic(_) => BigUint::one(),
                Rule::Concat(y, z) => &lens[y - 1] + &lens[z - 1],
                Rule::Repeat(y, r) => &lens[y - 1] * r,
                Rule::Truncate(_, b, e) => {
                    if e > b {
                        e - b
                    } else {
                        BigUint::default()
                    }
                }
            };
            lens.push(len);
        }
        lens
    }

    /// Ids reachable from the start symbol through any rule.
    pub fn used(&self) -> Vec<bool> {
        let mut seen = vec![false; self.rules.len() + 1];
        seen[self.start] = true;
        for id in (1..=self.rules.len()).rev() {
            if seen[id] {
                for r in self.rules[id - 1].referents() {
                    seen[r] = true;
                }
            }
        }
        seen
    }

    /// Number of truncation rules, `m_tr`.
    pub fn truncation_count(&self) -> usize {
        self.rules.iter().filter(|r| r.is_truncation()).count()
    }

    /// Distinct characters produced by atomic rules.
    pub fn alphabet(&self) -> Vec<char> {
        let mut chars: Vec<char> = self
            .rules
            .iter()
            .filter_map(|r| match r {
                Rule::Atomic(c) => Some(*c),
                _ => None,
            })
            .collect();
        chars.sort_unstable();
        chars.dedup();
        chars
    }

    /// Drops nonterminals not involved in expanding the start symbol,
    /// keeping the relative order of the rest.
    pub fn prune_useless(&self) -> CollageSystem {
        let used = self.used();
        let mut new_id = vec![0; self.rules.len() + 1];
        let mut rules = Vec::new();
        for id in self.ids() {
            if used[id] {
                rules.push(self.rule(id).map_referents(|r| new_id[r]));
                new_id[id] = rules.len();
            }
        }
        CollageSystem {
            rules,
            start: new_id[self.start],
        }
    }
}

/// `|⟦X⟧|` computed bottom-up with arbitrary precision.
pub fn expansion_length(g: &CollageSystem, x: NtId) -> BigUint {
    g.lengths().swap_remove(x - 1)
}

/// Accumulates rules whose referents may point anywhere (including to
/// later rules) and emits a topologically ordered system.
#[derive(Clone, Debug, Default)]
pub struct SystemBuilder {
    rules: Vec<Option<Rule>>,
}

impl SystemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rules(rules: Vec<Option<Rule>>) -> Self {
        SystemBuilder { rules }
    }

    /// Adds a rule and returns its builder-local id.
    pub fn push(&mut self, rule: Rule) -> NtId {
        self.rules.push(Some(rule));
        self.rules.len()
    }

    /// Reserves an id whose rule is supplied later with [`Self::set`].
    pub fn reserve(&mut self) -> NtId {
        self.rules.push(None);
        self.rules.len()
    }

    pub fn set(&mut self, id: NtId, rule: Rule) {
        self.rules[id - 1] = Some(rule);
    }

    pub fn get(&self, id: NtId) -> Option<&Rule> {
        self.rules.get(id - 1).and_then(Option::as_ref)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Orders the rules reachable from `start` so every rule refers to
    /// smaller ids. Ids already in topological order keep their relative
    /// order. Panics on reference cycles or undefined rules, which are
    /// construction bugs on the caller's side.
    pub fn finish(&self, start: NtId) -> CollageSystem {
        let n = self.rules.len();
        let mut used = vec![false; n + 1];
        let mut stack = vec![start];
        used[start] = true;
        while let Some(id) = stack.pop() {
            let rule = self.get(id).unwrap_or_else(|| panic!("X{id} has no rule"));
            for r in rule.referents() {
                if !used[r] {
                    used[r] = true;
                    stack.push(r);
                }
            }
        }

        // Iterative DFS post-order, visiting ids in ascending order.
        const UNSEEN: u8 = 0;
        const OPEN: u8 = 1;
        const DONE: u8 = 2;
        let mut state = vec![UNSEEN; n + 1];
        let mut new_id = vec![0; n + 1];
        let mut order = Vec::new();
        for root in 1..=n {
            if !used[root] || state[root] != UNSEEN {
                continue;
            }
            let mut frames: Vec<(NtId, usize)> = vec![(root, 0)];
            state[root] = OPEN;
            while let Some(frame) = frames.last_mut() {
                let (id, next) = *frame;
                let rule = self.rules[id - 1].as_ref().expect("checked above");
                match rule.referents().nth(next) {
                    Some(child) => {
                        frame.1 += 1;
                        match state[child] {
                            UNSEEN => {
                                state[child] = OPEN;
                                frames.push((child, 0));
                            }
                            OPEN => panic!("reference cycle through X{child}"),
                            _ => {}
                        }
                    }
                    None => {
                        state[id] = DONE;
                        order.push(id);
                        new_id[id] = order.len();
                        frames.pop();
                    }
                }
            }
        }
        let rules = order
            .iter()
            .map(|&id| self.rules[id - 1].as_ref().unwrap().map_referents(|r| new_id[r]))
            .collect();
        CollageSystem::new(rules, new_id[start]).expect("topological by construction")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Atomic(c) => write!(f, "'{}'", clg::escape_char(*c)),
            Rule::Concat(y, z) => write!(f, "X{y} X{z}"),
            Rule::Repeat(y, r) => write!(f, "X{y} ^ {r}"),
            Rule::Truncate(y, b, e) => write!(f, "X{y} [{b}..{e})"),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    /// `{X1→a, X2→b, X3→X1X2, X4→X3[2..3), X5→X3[1..2), X6→X4X5}`.
    pub(crate) fn g0() -> CollageSystem {
        CollageSystem::with_last_start(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Concat(1, 2),
            Rule::Truncate(3, big(2), big(3)),
            Rule::Truncate(3, big(1), big(2)),
            Rule::Concat(4, 5),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_forward_reference() {
        let err = CollageSystem::with_last_start(vec![Rule::Concat(1, 1)]).unwrap_err();
        assert_eq!(err, StructureError::NotTopological { id: 1, referent: 1 });
        assert_eq!(CollageSystem::new(vec![], 1).unwrap_err(), StructureError::Empty);
        assert_eq!(
            CollageSystem::new(vec![Rule::Atomic('a')], 2).unwrap_err(),
            StructureError::UndefinedStart(2)
        );
    }

    #[test]
    fn lengths_are_exact_beyond_64_bits() {
        let mut rules = vec![Rule::Atomic('a')];
        for id in 1..=64 {
            rules.push(Rule::Concat(id, id));
        }
        let g = CollageSystem::with_last_start(rules).unwrap();
        assert_eq!(expansion_length(&g, 65), BigUint::one() << 64u32);
        assert_eq!(expansion_length(&g, 1), BigUint::one());
    }

    #[test]
    fn repeat_length() {
        let g = CollageSystem::with_last_start(vec![Rule::Atomic('a'), Rule::Repeat(1, big(5))]).unwrap();
        assert_eq!(expansion_length(&g, 2), big(5));
    }

    #[test]
    fn prune_keeps_order() {
        let g = CollageSystem::with_last_start(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Concat(1, 1),
        ])
        .unwrap();
        let p = g.prune_useless();
        assert_eq!(p.rules(), &[Rule::Atomic('a'), Rule::Concat(1, 1)]);
        assert_eq!(p.start(), 2);
    }

    #[test]
    fn builder_orders_forward_references() {
        let mut b = SystemBuilder::new();
        let top = b.reserve();
        let a = b.push(Rule::Atomic('a'));
        let unused = b.push(Rule::Atomic('z'));
        let pair = b.push(Rule::Concat(a, a));
        b.set(top, Rule::Concat(pair, a));
        let g = b.finish(top);
        assert_eq!(g.rules(), &[Rule::Atomic('a'), Rule::Concat(1, 1), Rule::Concat(2, 1)]);
        assert_eq!(g.start(), 3);
        let _ = unused;
    }

    #[test]
    fn builder_is_identity_on_ordered_input() {
        let g = g0();
        let b = SystemBuilder::from_rules(g.rules().iter().cloned().map(Some).collect());
        assert_eq!(b.finish(g.start()), g);
    }
}
