use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use super::{CollageSystem, NtId, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeLabel {
    Nonterminal(NtId),
    Terminal(char),
    /// Right child `Y^{r-1}` of a repetition node.
    RepeatTail { base: NtId, count: BigUint },
    /// Only child `Y[b..e)` of a truncation node.
    Slice { base: NtId, begin: BigUint, end: BigUint },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub label: TreeLabel,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// 1-based half-open interval of the text derived by this node.
    pub begin: BigUint,
    pub end: BigUint,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// The binary parse tree with the subtrees of every non-leftmost
/// occurrence of a nonterminal removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrammarTree {
    pub nodes: Vec<TreeNode>,
    pub root: usize,
    /// Node index of the unique internal node labelled by each
    /// nonterminal, indexed by `id - 1`.
    pub internal_of: Vec<Option<usize>>,
}

impl GrammarTree {
    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            let node = &self.nodes[v];
            if node.is_leaf() {
                out.push(v);
            } else {
                stack.extend(node.children.iter().rev());
            }
        }
        out
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.iter().filter(|n| !n.is_leaf()).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }
}

/// Builds the grammar tree. Nodes are created in pre-order, so the first
/// node seen with a given nonterminal label is the leftmost one.
pub fn grammar_tree(g: &CollageSystem) -> GrammarTree {
    let lens = g.lengths();
    let mut internal_of = vec![None; g.size()];
    let mut nodes = vec![TreeNode {
        label: TreeLabel::Nonterminal(g.start()),
        parent: None,
        children: Vec::new(),
        begin: BigUint::one(),
        end: &lens[g.start() - 1] + 1u32,
    }];
    let mut stack = vec![0usize];

    while let Some(v) = stack.pop() {
        let TreeLabel::Nonterminal(x) = nodes[v].label else {
            continue;
        };
        if internal_of[x - 1].is_some() {
            continue;
        }
        internal_of[x - 1] = Some(v);
        let begin = nodes[v].begin.clone();
        let end = nodes[v].end.clone();
        let children: Vec<(TreeLabel, BigUint, BigUint)> = match g.rule(x) {
            Rule::Atomic(c) => vec![(TreeLabel::Terminal(*c), begin, end)],
            Rule::Concat(y, z) => {
                let mid = &begin + &lens[y - 1];
                vec![
                    (TreeLabel::Nonterminal(*y), begin, mid.clone()),
                    (TreeLabel::Nonterminal(*z), mid, end),
                ]
            }
            Rule::Repeat(y, r) => {
                let mid = &begin + &lens[y - 1];
                vec![
                    (TreeLabel::Nonterminal(*y), begin, mid.clone()),
                    (TreeLabel::RepeatTail { base: *y, count: r - 1u32 }, mid, end),
                ]
            }
            Rule::Truncate(y, b, e) => vec![(
                TreeLabel::Slice { base: *y, begin: b.clone(), end: e.clone() },
                begin,
                end,
            )],
        };
        let first = nodes.len();
        for (label, begin, end) in children {
            nodes.push(TreeNode {
                label,
                parent: Some(v),
                children: Vec::new(),
                begin,
                end,
            });
        }
        let ids: Vec<usize> = (first..nodes.len()).collect();
        stack.extend(ids.iter().rev());
        nodes[v].children = ids;
    }
    GrammarTree {
        nodes,
        root: 0,
        internal_of,
    }
}

/// True iff every nonterminal is reachable from the start symbol without
/// passing through a truncation rule.
pub fn is_internal(g: &CollageSystem) -> bool {
    structural_closure(g).iter().skip(1).all(|&r| r)
}

/// Reachability from the start through concatenation and repetition
/// rules, indexed by id (slot 0 unused).
pub(crate) fn structural_closure(g: &CollageSystem) -> Vec<bool> {
    let mut seen = vec![false; g.size() + 1];
    seen[0] = true;
    seen[g.start()] = true;
    for id in (1..=g.size()).rev() {
        if seen[id] {
            for r in g.rule(id).structural_referents() {
                seen[r] = true;
            }
        }
    }
    seen
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SystemStats {
    /// Number of nonterminals.
    pub m: usize,
    /// Number of truncation rules.
    pub m_tr: usize,
    /// Number of atomic rules.
    pub sigma: usize,
    pub grammar_tree_internal_nodes: usize,
    pub grammar_tree_leaves: usize,
    pub internal: bool,
}

impl SystemStats {
    /// For internal systems: internal nodes equal `m` and leaves equal
    /// `m - m_tr - sigma + 1`. `None` when the system is not internal.
    pub fn node_count_identity(&self) -> Option<bool> {
        self.internal.then(|| {
            self.grammar_tree_internal_nodes == self.m
                && self.grammar_tree_leaves + self.m_tr + self.sigma == self.m + 1
        })
    }
}

impl fmt::Display for SystemStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "m={} m_tr={} sigma={} tree_internal={} tree_leaves={} internal={}",
            self.m, self.m_tr, self.sigma, self.grammar_tree_internal_nodes, self.grammar_tree_leaves, self.internal
        )
    }
}

pub fn stats(g: &CollageSystem) -> SystemStats {
    let tree = grammar_tree(g);
    let s = SystemStats {
        m: g.size(),
        m_tr: g.truncation_count(),
        sigma: g.rules().iter().filter(|r| matches!(r, Rule::Atomic(_))).count(),
        grammar_tree_internal_nodes: tree.internal_count(),
        grammar_tree_leaves: tree.leaf_count(),
        internal: is_internal(g),
    };
    debug_assert_ne!(s.node_count_identity(), Some(false), "{s}");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{big, g0};

    #[test]
    fn atomic_only() {
        let g = CollageSystem::with_last_start(vec![Rule::Atomic('a')]).unwrap();
        let t = grammar_tree(&g);
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(t.nodes[t.root].label, TreeLabel::Nonterminal(1));
        assert_eq!(t.nodes[1].label, TreeLabel::Terminal('a'));
        let s = stats(&g);
        assert_eq!((s.m, s.m_tr, s.sigma, s.grammar_tree_leaves), (1, 0, 1, 1));
    }

    #[test]
    fn repetition_tree() {
        let g = CollageSystem::with_last_start(vec![Rule::Atomic('a'), Rule::Repeat(1, big(4))]).unwrap();
        let t = grammar_tree(&g);
        let root = &t.nodes[t.root];
        assert_eq!(root.children.len(), 2);
        let left = &t.nodes[root.children[0]];
        assert_eq!(left.label, TreeLabel::Nonterminal(1));
        assert_eq!(t.nodes[left.children[0]].label, TreeLabel::Terminal('a'));
        let right = &t.nodes[root.children[1]];
        assert_eq!(right.label, TreeLabel::RepeatTail { base: 1, count: big(3) });
        assert!(right.is_leaf());
        assert_eq!((right.begin.clone(), right.end.clone()), (big(2), big(5)));
        let s = stats(&g);
        assert_eq!((s.m, s.m_tr, s.sigma, s.grammar_tree_leaves), (2, 0, 1, 2));
        assert_eq!(s.node_count_identity(), Some(true));
    }

    #[test]
    fn g0_tree_has_no_internal_x3() {
        let g = g0();
        let t = grammar_tree(&g);
        assert_eq!(t.internal_of[2], None);
        assert!(!is_internal(&g));
        for (i, n) in t.nodes.iter().enumerate() {
            if let TreeLabel::Nonterminal(3) = n.label {
                assert!(n.is_leaf(), "node {i}");
            }
        }
        let s = stats(&g);
        assert_eq!((s.m, s.m_tr, s.sigma), (6, 2, 2));
        assert_eq!(s.node_count_identity(), None);
    }

    #[test]
    fn only_leftmost_occurrence_is_expanded() {
        // X3 -> X1 X2, X4 -> X3 X3
        let g = CollageSystem::with_last_start(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Concat(1, 2),
            Rule::Concat(3, 3),
        ])
        .unwrap();
        let t = grammar_tree(&g);
        let leaves = t.leaves();
        let labels: Vec<_> = leaves.iter().map(|&v| t.nodes[v].label.clone()).collect();
        assert_eq!(
            labels,
            vec![TreeLabel::Terminal('a'), TreeLabel::Terminal('b'), TreeLabel::Nonterminal(3)]
        );
        assert_eq!(t.internal_count(), 4);
        assert!(is_internal(&g));
    }

    #[test]
    fn leaf_intervals_partition_text() {
        let g = g0();
        let t = grammar_tree(&g);
        let mut at = big(1);
        for v in t.leaves() {
            assert_eq!(t.nodes[v].begin, at);
            at = t.nodes[v].end.clone();
        }
        assert_eq!(at, big(3));
    }
}
