use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::tree::{grammar_tree, is_internal, TreeLabel};
use super::CollageSystem;

/// How a factor longer than one character is derived. Factor indices are
/// 1-based and inclusive: `first..=last` names factors `F_first..F_last`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// A single character.
    Single,
    /// Type A: equal to the earlier factors `first..=last` (`last < k`).
    Copy { first: usize, last: usize },
    /// Type B: `(F_first..F_last)^(repeat - 1)` with `last = k - 1` and
    /// `repeat >= 3`.
    Repeat { first: usize, last: usize, repeat: usize },
    /// Type C: a substring of factors `first..=last`, which do not include
    /// this factor (they may lie to the right).
    Truncate { first: usize, last: usize },
}

impl FactorKind {
    /// The referenced factor range, if any.
    pub fn reference(&self) -> Option<(usize, usize)> {
        match *self {
            FactorKind::Single => None,
            FactorKind::Copy { first, last }
            | FactorKind::Repeat { first, last, .. }
            | FactorKind::Truncate { first, last } => Some((first, last)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub kind: FactorKind,
    /// Reference depth: 0 for single characters, otherwise larger than
    /// the depth of every referenced factor.
    pub depth: usize,
}

/// A factorization `T = F_1 ⋯ F_h` with a derivation type per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypedFactorization {
    /// `s_1..s_{h+1}`: 1-based factor starts, `s_1 = 1`, `s_{h+1} = n + 1`.
    pub starts: Vec<usize>,
    pub factors: Vec<Factor>,
}

impl TypedFactorization {
    /// Number of factors, `h`.
    pub fn h(&self) -> usize {
        self.factors.len()
    }

    pub fn text_len(&self) -> usize {
        self.starts.last().map_or(0, |s| s - 1)
    }

    /// Number of type-C factors.
    pub fn truncations(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| matches!(f.kind, FactorKind::Truncate { .. }))
            .count()
    }

    /// `h + m_tr + sigma - 1`, the size of the internal collage system
    /// this factorization describes.
    pub fn system_size(&self, sigma: usize) -> usize {
        self.h() + self.truncations() + sigma - 1
    }

    /// Position range `[s_k, s_{k+1})` of factor `k` (1-based).
    pub fn span(&self, k: usize) -> (usize, usize) {
        (self.starts[k - 1], self.starts[k])
    }

    /// Position range covered by factors `first..=last`.
    pub fn range_span(&self, first: usize, last: usize) -> (usize, usize) {
        (self.starts[first - 1], self.starts[last])
    }

    /// The interval set `I`, as 1-based inclusive factor-index ranges.
    pub fn node_ranges(&self) -> BTreeSet<(usize, usize)> {
        let mut set = BTreeSet::new();
        for (idx, f) in self.factors.iter().enumerate() {
            let k = idx + 1;
            match f.kind {
                FactorKind::Single => {}
                FactorKind::Copy { first, last } | FactorKind::Truncate { first, last } => {
                    set.insert((first, last));
                }
                FactorKind::Repeat { first, last, .. } => {
                    set.insert((first, last));
                    set.insert((first, k));
                }
            }
        }
        set
    }

    /// Smallest depths consistent with the references, or `None` if the
    /// references contain a cycle or an out-of-range index.
    pub fn minimal_depths(&self) -> Option<Vec<usize>> {
        minimal_depths(self.factors.iter().map(|f| f.kind.reference()).collect::<Vec<_>>().as_slice())
    }

    /// Replaces every depth with the minimal consistent one.
    pub fn with_minimal_depths(mut self) -> Option<Self> {
        let depths = self.minimal_depths()?;
        for (f, d) in self.factors.iter_mut().zip(depths) {
            f.depth = d;
        }
        Some(self)
    }
}

/// Longest-path depths over the "refers to" relation, `None` on a cycle.
pub(crate) fn minimal_depths(refs: &[Option<(usize, usize)>]) -> Option<Vec<usize>> {
    let h = refs.len();
    let mut depth: Vec<Option<usize>> = vec![None; h];
    let mut on_stack = vec![false; h];
    for root in 0..h {
        if depth[root].is_some() {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        on_stack[root] = true;
        while let Some(&mut (k, ref mut next)) = frames.last_mut() {
            let range = match refs[k] {
                None => 0..0,
                Some((first, last)) => {
                    if first == 0 || last > h || first > last {
                        return None;
                    }
                    first - 1..last
                }
            };
            if let Some(j) = range.clone().nth(*next) {
                *next += 1;
                if on_stack[j] {
                    return None;
                }
                if depth[j].is_none() {
                    on_stack[j] = true;
                    frames.push((j, 0));
                }
            } else {
                let d = if refs[k].is_none() {
                    0
                } else {
                    1 + range.map(|j| depth[j].unwrap()).max().unwrap_or(0)
                };
                depth[k] = Some(d);
                on_stack[k] = false;
                frames.pop();
            }
        }
    }
    Some(depth.into_iter().map(Option::unwrap).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FactorizationError {
    #[error("the collage system is not internal")]
    NotInternal,
    #[error("text length {length} exceeds the limit {limit}")]
    TooLong { length: BigUint, limit: usize },
}

/// Reads the typed factorization off the grammar tree of an internal
/// system: one factor per leaf. A leaf labelled with a nonterminal copies
/// the leaves under that nonterminal's internal node, a `Y^{r-1}` leaf
/// repeats the leaves under its left sibling, and a `Y[b..e)` leaf
/// truncates the leaves under `Y`.
pub fn ics_factorization(g: &CollageSystem, limit: usize) -> Result<TypedFactorization, FactorizationError> {
    if !is_internal(g) {
        return Err(FactorizationError::NotInternal);
    }
    let tree = grammar_tree(g);
    let root = &tree.nodes[tree.root];
    let n = &root.end - 1u32;
    if n.to_usize().is_none_or(|n| n > limit) {
        return Err(FactorizationError::TooLong { length: n, limit });
    }

    let leaves = tree.leaves();
    // Leaf-index range (1-based, inclusive) under every node.
    let mut first_leaf = vec![usize::MAX; tree.nodes.len()];
    let mut last_leaf = vec![0usize; tree.nodes.len()];
    for (idx, &leaf) in leaves.iter().enumerate() {
        let k = idx + 1;
        let mut v = Some(leaf);
        while let Some(u) = v {
            first_leaf[u] = first_leaf[u].min(k);
            last_leaf[u] = last_leaf[u].max(k);
            v = tree.nodes[u].parent;
        }
    }

    let mut starts = Vec::with_capacity(leaves.len() + 1);
    let mut kinds = Vec::with_capacity(leaves.len());
    for (idx, &leaf) in leaves.iter().enumerate() {
        let k = idx + 1;
        let node = &tree.nodes[leaf];
        starts.push(node.begin.to_usize().expect("bounded by limit"));
        let long = &node.end - &node.begin > BigUint::from(1u8);
        let kind = if !long {
            FactorKind::Single
        } else {
            match &node.label {
                TreeLabel::Terminal(_) => FactorKind::Single,
                TreeLabel::Nonterminal(x) => {
                    let v = tree.internal_of[x - 1].expect("internal system");
                    FactorKind::Copy { first: first_leaf[v], last: last_leaf[v] }
                }
                TreeLabel::RepeatTail { count, .. } => {
                    let parent = node.parent.expect("repeat tail has a parent");
                    let left = tree.nodes[parent].children[0];
                    FactorKind::Repeat {
                        first: first_leaf[left],
                        last: k - 1,
                        repeat: count.to_usize().expect("bounded by limit") + 1,
                    }
                }
                TreeLabel::Slice { base, .. } => {
                    let v = tree.internal_of[base - 1].expect("internal system");
                    FactorKind::Truncate { first: first_leaf[v], last: last_leaf[v] }
                }
            }
        };
        kinds.push(kind);
    }
    starts.push(root.end.to_usize().expect("bounded by limit"));

    let tf = TypedFactorization {
        starts,
        factors: kinds.into_iter().map(|kind| Factor { kind, depth: 0 }).collect(),
    };
    Ok(tf.with_minimal_depths().expect("grammar references are acyclic"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{big, g0};
    use crate::model::Rule;

    fn sys(rules: Vec<Rule>) -> CollageSystem {
        CollageSystem::with_last_start(rules).unwrap()
    }

    #[test]
    fn abab_copy() {
        let g = sys(vec![Rule::Atomic('a'), Rule::Atomic('b'), Rule::Concat(1, 2), Rule::Concat(3, 3)]);
        let tf = ics_factorization(&g, 100).unwrap();
        assert_eq!(tf.starts, vec![1, 2, 3, 5]);
        assert_eq!(tf.factors[2].kind, FactorKind::Copy { first: 1, last: 2 });
        assert_eq!(tf.factors.iter().map(|f| f.depth).collect::<Vec<_>>(), vec![0, 0, 1]);
        assert_eq!(tf.node_ranges().into_iter().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn aaaa_repeat() {
        let g = sys(vec![Rule::Atomic('a'), Rule::Repeat(1, big(4))]);
        let tf = ics_factorization(&g, 100).unwrap();
        assert_eq!(tf.starts, vec![1, 2, 5]);
        assert_eq!(tf.factors[1].kind, FactorKind::Repeat { first: 1, last: 1, repeat: 4 });
        assert_eq!(tf.system_size(1), 2);
        assert_eq!(
            tf.node_ranges().into_iter().collect::<Vec<_>>(),
            vec![(1, 1), (1, 2)]
        );
    }

    #[test]
    fn single_character() {
        let g = sys(vec![Rule::Atomic('a')]);
        let tf = ics_factorization(&g, 100).unwrap();
        assert_eq!(tf.starts, vec![1, 2]);
        assert_eq!(tf.factors, vec![Factor { kind: FactorKind::Single, depth: 0 }]);
    }

    #[test]
    fn truncation_leaf() {
        // X3 = ab, X4 = X3[1..3) copy via truncation, X5 = X3 X4 -> "abab"
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Concat(1, 2),
            Rule::Truncate(3, big(1), big(3)),
            Rule::Concat(3, 4),
        ]);
        let tf = ics_factorization(&g, 100).unwrap();
        assert_eq!(tf.factors[2].kind, FactorKind::Truncate { first: 1, last: 2 });
        assert_eq!(tf.truncations(), 1);
    }

    #[test]
    fn rejects_non_internal_and_long() {
        assert_eq!(ics_factorization(&g0(), 100).unwrap_err(), FactorizationError::NotInternal);
        let g = sys(vec![Rule::Atomic('a'), Rule::Repeat(1, big(1000))]);
        assert!(matches!(ics_factorization(&g, 100), Err(FactorizationError::TooLong { .. })));
    }

    #[test]
    fn depth_cycle_detection() {
        assert_eq!(minimal_depths(&[None, Some((1, 1)), Some((1, 2))]), Some(vec![0, 1, 2]));
        assert_eq!(minimal_depths(&[Some((2, 2)), Some((1, 1))]), None);
        assert_eq!(minimal_depths(&[Some((1, 1))]), None);
        assert_eq!(minimal_depths(&[Some((2, 3)), None, None]), Some(vec![1, 0, 0]));
        assert_eq!(minimal_depths(&[Some((2, 5)), None]), None);
    }
}
