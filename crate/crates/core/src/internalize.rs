//! Conversion of an arbitrary collage system into an internal one.
//!
//! Unreachable nonterminals (those only reachable through truncations) are
//! processed from the largest id down. When `X` is processed every
//! nonterminal referring to it is a truncation `Q -> X[b..e)`, and each of
//! those is rewritten so that nothing refers to `X` any more:
//!
//! * atomic: `X -> a` makes `Q -> a`;
//! * shift: the slice lies inside one operand (or `X` is itself a
//!   truncation), so `Q` truncates that smaller nonterminal instead;
//! * repetition: `X -> Y^r` and the slice covers more than two copies of `Y`,
//!   so `Q` becomes `suffix(Y) · Y^r' · prefix(Y)`;
//! * crossing: the slice crosses the single boundary between two operands;
//!   all such slices of `X` are handled together through one shared
//!   suffix `S` of the left operand and one shared prefix `P` of the right.
//!
//! The result derives the same string and has at most `9m` rules.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::model::{is_internal, CollageSystem, NtId, Rule, SystemBuilder};

/// Which rewrite [`WorkingSystem::eliminate_truncation`] applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `Q -> X[1..|X|+1)`: `Q` takes over the body of `X`.
    FullCopy,
    /// `X -> a`: `Q` becomes the same atomic rule.
    Atomic,
    /// The slice lies inside one operand; `Q` truncates it instead.
    Shift,
    /// The slice covers more than two copies of a repeated base.
    Repetition,
    /// The slice crosses an operand boundary; left for [`WorkingSystem::crossing_batch`].
    Crossing,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InternalizeError {
    #[error("X{q} does not truncate X{x}")]
    NotATruncation { q: NtId, x: NtId },
    #[error("X{0} is already reachable")]
    Reachable(NtId),
    #[error("X{0} has no operand boundary to cross")]
    NoBoundary(NtId),
}

/// Lexicographic progress measure: truncation rules whose referent is
/// unreachable, and the sum of those referents' ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProgressMeasure {
    pub pending: usize,
    pub referent_sum: usize,
}

#[derive(Clone, Debug, Default)]
pub struct InternalizeReport {
    /// Truncation rewrites performed, one per `eliminate_truncation` call
    /// plus one per rule rewritten in a case-3 batch.
    pub steps: usize,
    pub full_copies: usize,
    pub atomic: usize,
    pub shifts: usize,
    pub repetitions: usize,
    pub crossing_batches: usize,
    pub crossing_rules: usize,
    /// Measure before and after every non-crossing elimination; only
    /// filled when tracing.
    pub trace: Vec<(CaseTag, ProgressMeasure, ProgressMeasure)>,
}

/// A collage system under transformation. Ids are stable; new rules get
/// fresh ids past the original ones and may be referenced by smaller ids.
#[derive(Clone, Debug)]
pub struct WorkingSystem {
    rules: Vec<Option<Rule>>,
    lens: Vec<BigUint>,
    reachable: Vec<bool>,
    /// Rules that truncated each nonterminal when it was unreachable.
    /// Entries may be stale.
    truncators: Vec<Vec<NtId>>,
    start: NtId,
    original: usize,
    pub report: InternalizeReport,
}

impl WorkingSystem {
    pub fn new(g: &CollageSystem) -> Self {
        let mut w = WorkingSystem {
            rules: Vec::with_capacity(g.size()),
            lens: g.lengths(),
            reachable: vec![false; g.size()],
            truncators: vec![Vec::new(); g.size()],
            start: g.start(),
            original: g.size(),
            report: InternalizeReport::default(),
        };
        w.rules.extend(g.rules().iter().cloned().map(Some));
        w.mark_reachable(g.start());
        for id in g.ids() {
            if let Rule::Truncate(y, ..) = g.rule(id) {
                if !w.reachable[y - 1] {
                    w.truncators[y - 1].push(id);
                }
            }
        }
        w
    }

    pub fn rule(&self, id: NtId) -> Option<&Rule> {
        self.rules[id - 1].as_ref()
    }

    pub fn is_reachable(&self, id: NtId) -> bool {
        self.reachable[id - 1]
    }

    pub fn len_of(&self, id: NtId) -> &BigUint {
        &self.lens[id - 1]
    }

    /// Largest original id that is still present and unreachable.
    pub fn next_unreachable(&self) -> Option<NtId> {
        (1..=self.original)
            .rev()
            .find(|&id| self.rules[id - 1].is_some() && !self.reachable[id - 1])
    }

    fn mark_reachable(&mut self, id: NtId) {
        let mut stack = vec![id];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut self.reachable[v - 1], true) {
                continue;
            }
            let rule = self.rules[v - 1].as_ref().expect("reachable rule exists");
            stack.extend(rule.structural_referents().filter(|&r| !self.reachable[r - 1]));
        }
    }

    fn push(&mut self, rule: Rule) -> NtId {
        let len = self.rule_len(&rule);
        self.rules.push(None);
        self.lens.push(len);
        self.reachable.push(false);
        self.truncators.push(Vec::new());
        let id = self.rules.len();
        self.assign(id, rule);
        id
    }

    fn rule_len(&self, rule: &Rule) -> BigUint {
        match rule {
            Rule::Atomic(_) => BigUint::one(),
            Rule::Concat(y, z) => self.len_of(*y) + self.len_of(*z),
            Rule::Repeat(y, r) => self.len_of(*y) * r,
            Rule::Truncate(_, b, e) => e - b,
        }
    }

    /// Replaces the body of `id` without changing `⟦id⟧`.
    fn assign(&mut self, id: NtId, rule: Rule) {
        debug_assert_eq!(self.rule_len(&rule), self.lens[id - 1]);
        if let Rule::Truncate(y, ..) = rule {
            if !self.reachable[y - 1] {
                self.truncators[y - 1].push(id);
            }
        }
        let structural: Vec<NtId> = rule.structural_referents().collect();
        self.rules[id - 1] = Some(rule);
        if self.reachable[id - 1] {
            for r in structural {
                self.mark_reachable(r);
            }
        }
    }

    /// New rule `Y[b..e)` with 1-based bounds; a full slice is `Y` itself.
    fn slice(&mut self, y: NtId, b: BigUint, e: BigUint) -> NtId {
        if b.is_one() && e == self.len_of(y) + 1u32 {
            y
        } else {
            self.push(Rule::Truncate(y, b, e))
        }
    }

    pub fn measure(&self) -> ProgressMeasure {
        let mut m = ProgressMeasure { pending: 0, referent_sum: 0 };
        for rule in self.rules.iter().flatten() {
            if let Rule::Truncate(y, ..) = rule {
                if !self.reachable[y - 1] {
                    m.pending += 1;
                    m.referent_sum += y;
                }
            }
        }
        m
    }

    /// Rewrites `q -> x[b..e)` according to cases 0–2. Crossing slices are
    /// left untouched and reported as [`CaseTag::Crossing`].
    pub fn eliminate_truncation(&mut self, q: NtId, x: NtId) -> Result<CaseTag, InternalizeError> {
        let Some(Rule::Truncate(target, b, e)) = self.rule(q).cloned() else {
            return Err(InternalizeError::NotATruncation { q, x });
        };
        if target != x {
            return Err(InternalizeError::NotATruncation { q, x });
        }
        if self.is_reachable(x) {
            return Err(InternalizeError::Reachable(x));
        }
        self.report.steps += 1;
        let body = self.rule(x).cloned().expect("unreachable rule is present");
        let len = self.len_of(x).clone();

        if b.is_one() && e == &len + 1u32 {
            self.assign(q, body);
            self.report.full_copies += 1;
            return Ok(CaseTag::FullCopy);
        }
        let (lo, hi) = (&b - 1u32, &e - 1u32);
        let tag = match body {
            Rule::Atomic(c) => {
                self.assign(q, Rule::Atomic(c));
                CaseTag::Atomic
            }
            Rule::Truncate(y, b2, _) => {
                let shift = &b2 - 1u32;
                self.assign(q, Rule::Truncate(y, &b + &shift, &e + &shift));
                CaseTag::Shift
            }
            Rule::Concat(y, z) => {
                let ly = self.len_of(y).clone();
                if hi <= ly {
                    self.assign(q, Rule::Truncate(y, b, e));
                    CaseTag::Shift
                } else if lo >= ly {
                    self.assign(q, Rule::Truncate(z, &b - &ly, &e - &ly));
                    CaseTag::Shift
                } else {
                    CaseTag::Crossing
                }
            }
            Rule::Repeat(y, _) => {
                let ly = self.len_of(y).clone();
                let first = lo.div_floor(&ly);
                let last = (&hi - 1u32).div_floor(&ly);
                if first == last {
                    let base = &first * &ly;
                    self.assign(q, Rule::Truncate(y, &b - &base, &e - &base));
                    CaseTag::Shift
                } else if last == &first + 1u32 {
                    CaseTag::Crossing
                } else {
                    self.split_repetition(q, y, &ly, &lo, &hi);
                    CaseTag::Repetition
                }
            }
        };
        match tag {
            CaseTag::Atomic => self.report.atomic += 1,
            CaseTag::Shift => self.report.shifts += 1,
            CaseTag::Repetition => self.report.repetitions += 1,
            _ => {}
        }
        Ok(tag)
    }

    /// Repetition rewrite: `⟦q⟧ = u · ⟦y⟧^r' · w` for the 0-based slice `[lo, hi)` of
    /// `y^r`, spanning at least three copies.
    fn split_repetition(&mut self, q: NtId, y: NtId, ly: &BigUint, lo: &BigUint, hi: &BigUint) {
        let (first, head) = lo.div_rem(ly);
        let (last_end, tail) = hi.div_rem(ly);
        let (copies_from, prefix) = if head.is_zero() {
            (first, None)
        } else {
            (first + 1u32, Some(head))
        };
        let copies = &last_end - &copies_from;
        let suffix = (!tail.is_zero()).then_some(tail);

        // y becomes reachable through q before the slices of it are made.
        let mut parts: Vec<Part> = Vec::with_capacity(3);
        if let Some(head) = prefix {
            parts.push(Part::Slice(head + 1u32, ly + 1u32));
        }
        parts.push(Part::Copies(copies));
        if let Some(tail) = suffix {
            parts.push(Part::Slice(BigUint::one(), tail + 1u32));
        }
        self.mark_reachable_via(q, y);
        let mut ids: Vec<NtId> = Vec::with_capacity(3);
        if parts.len() == 1 {
            let Part::Copies(r) = parts.pop().unwrap() else { unreachable!() };
            self.assign(q, Rule::Repeat(y, r));
            return;
        }
        for part in parts {
            let id = match part {
                Part::Slice(b, e) => self.slice(y, b, e),
                Part::Copies(r) if r.is_one() => y,
                Part::Copies(r) if r == BigUint::from(2u8) => self.push(Rule::Concat(y, y)),
                Part::Copies(r) => self.push(Rule::Repeat(y, r)),
            };
            ids.push(id);
        }
        let body = match ids[..] {
            [a, b] => Rule::Concat(a, b),
            [a, b, c] => {
                let ab = self.push(Rule::Concat(a, b));
                Rule::Concat(ab, c)
            }
            _ => unreachable!("two or three parts"),
        };
        self.assign(q, body);
    }

    /// `y` is about to be referenced structurally from the reachable `q`.
    fn mark_reachable_via(&mut self, q: NtId, y: NtId) {
        if self.is_reachable(q) {
            self.mark_reachable(y);
        }
    }

    /// Crossing rewrite: rewrites every `q -> x[b..e)` in `batch`, each of which
    /// crosses the boundary between the two operands of `x` (for
    /// `x -> y^r`, the boundary between two adjacent copies, shifted to
    /// the first one).
    pub fn crossing_batch(&mut self, x: NtId, batch: &[NtId]) -> Result<(), InternalizeError> {
        if batch.is_empty() {
            return Ok(());
        }
        let (left, right) = match self.rule(x) {
            Some(Rule::Concat(y, z)) => (*y, *z),
            Some(Rule::Repeat(y, _)) => (*y, *y),
            _ => return Err(InternalizeError::NoBoundary(x)),
        };
        let ll = self.len_of(left).clone();
        let lr = self.len_of(right).clone();

        // (suffix need of left, prefix need of right) per rule.
        let mut needs = Vec::with_capacity(batch.len());
        for &q in batch {
            let Some(Rule::Truncate(target, b, e)) = self.rule(q) else {
                return Err(InternalizeError::NotATruncation { q, x });
            };
            if *target != x {
                return Err(InternalizeError::NotATruncation { q, x });
            }
            let (mut lo, mut hi) = (b - 1u32, e - 1u32);
            if left == right {
                let base = lo.div_floor(&ll) * &ll;
                lo -= &base;
                hi -= &base;
            }
            debug_assert!(lo < ll && hi > ll && hi <= &ll + &lr);
            needs.push((q, &ll - lo, hi - &ll));
        }
        let s = needs.iter().map(|(_, s, _)| s).max().unwrap().clone();
        let p = needs.iter().map(|(_, _, p)| p).max().unwrap().clone();

        let suffix = self.slice(left, &ll - &s + 1u32, &ll + 1u32);
        let prefix = self.slice(right, BigUint::one(), &p + 1u32);
        for (q, sq, pq) in needs {
            self.mark_reachable_via(q, suffix);
            self.mark_reachable_via(q, prefix);
            let l = self.slice(suffix, &s - &sq + 1u32, &s + 1u32);
            let r = self.slice(prefix, BigUint::one(), &pq + 1u32);
            self.assign(q, Rule::Concat(l, r));
            self.report.steps += 1;
            self.report.crossing_rules += 1;
        }
        self.report.crossing_batches += 1;
        Ok(())
    }

    /// Removes every truncation of the unreachable `x`, then `x` itself.
    pub fn process(&mut self, x: NtId, trace: bool) -> Result<(), InternalizeError> {
        let mut qs = std::mem::take(&mut self.truncators[x - 1]);
        qs.sort_unstable();
        qs.dedup();
        qs.retain(|&q| matches!(self.rule(q), Some(Rule::Truncate(t, ..)) if *t == x));
        let mut crossing = Vec::new();
        for q in qs {
            let before = trace.then(|| self.measure());
            let tag = self.eliminate_truncation(q, x)?;
            if tag == CaseTag::Crossing {
                crossing.push(q);
            } else if let Some(before) = before {
                let after = self.measure();
                self.report.trace.push((tag, before, after));
            }
        }
        self.crossing_batch(x, &crossing)?;
        debug_assert!(!self.is_reachable(x));
        self.rules[x - 1] = None;
        Ok(())
    }

    /// Topologically ordered system of everything used from the start.
    pub fn finish(&self) -> CollageSystem {
        SystemBuilder::from_rules(self.rules.clone()).finish(self.start)
    }
}

enum Part {
    Slice(BigUint, BigUint),
    Copies(BigUint),
}

/// Internal collage system deriving the same string as `g`, of size at
/// most `9 * g.size()`. Internal inputs without useless nonterminals are
/// returned unchanged.
pub fn internalize(g: &CollageSystem) -> CollageSystem {
    internalize_with_report(g, false).0
}

/// [`internalize`] plus step counts; with `trace`, also the progress
/// measure around every elimination step (quadratic overhead).
pub fn internalize_with_report(g: &CollageSystem, trace: bool) -> (CollageSystem, InternalizeReport) {
    let pruned = g.prune_useless();
    if is_internal(&pruned) {
        return (pruned, InternalizeReport::default());
    }
    let mut w = WorkingSystem::new(&pruned);
    for x in (1..=pruned.size()).rev() {
        if w.rule(x).is_none() || w.is_reachable(x) {
            continue;
        }
        w.process(x, trace).expect("processing order keeps truncation targets unreachable");
    }
    let out = w.finish();
    (out, w.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{big, g0};
    use crate::model::{expand, validate};

    fn sys(rules: Vec<Rule>) -> CollageSystem {
        CollageSystem::with_last_start(rules).unwrap()
    }

    fn text(g: &CollageSystem) -> String {
        expand(g, g.start(), 1 << 20).unwrap()
    }

    fn check(g: &CollageSystem) -> CollageSystem {
        let out = internalize(g);
        assert_eq!(text(&out), text(g));
        assert!(is_internal(&out), "{out:?}");
        assert!(validate(&out).is_ok(), "{}", validate(&out));
        assert!(out.size() <= 9 * g.size());
        out
    }

    #[test]
    fn internal_input_is_unchanged() {
        let g = sys(vec![Rule::Atomic('a'), Rule::Atomic('b'), Rule::Concat(1, 2), Rule::Repeat(3, big(3))]);
        assert_eq!(internalize(&g), g);
    }

    #[test]
    fn g0_reduces_to_three_rules() {
        let out = check(&g0());
        assert_eq!(out.size(), 3);
        assert_eq!(out.rules(), &[Rule::Atomic('b'), Rule::Atomic('a'), Rule::Concat(1, 2)]);
    }

    #[test]
    fn repetition_slice() {
        // Q = R[2..5) = "aaa", S = Q Q.
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Repeat(1, big(6)),
            Rule::Truncate(2, big(2), big(5)),
            Rule::Concat(3, 3),
        ]);
        let out = check(&g);
        assert_eq!(text(&out), "aaaaaa");
        assert!(out.size() <= 36);
    }

    #[test]
    fn case0_atomic() {
        let mut w = WorkingSystem::new(&sys(vec![
            Rule::Atomic('a'),
            Rule::Truncate(1, big(1), big(2)),
            Rule::Concat(2, 2),
        ]));
        // X2 -> X1[1..2) is a full copy of the atomic X1.
        assert_eq!(w.eliminate_truncation(2, 1).unwrap(), CaseTag::FullCopy);
        assert_eq!(w.rule(2), Some(&Rule::Atomic('a')));
    }

    #[test]
    fn case1_into_right_operand() {
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Concat(1, 2),
            Rule::Truncate(3, big(2), big(3)),
            Rule::Concat(4, 1),
        ]);
        let mut w = WorkingSystem::new(&g);
        assert!(!w.is_reachable(3));
        assert_eq!(w.eliminate_truncation(4, 3).unwrap(), CaseTag::Shift);
        assert_eq!(w.rule(4), Some(&Rule::Truncate(2, big(1), big(2))));
    }

    #[test]
    fn case1_through_truncation() {
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Concat(1, 2),
            Rule::Concat(3, 3),
            Rule::Truncate(4, big(2), big(5)),
            Rule::Truncate(5, big(2), big(3)),
            Rule::Concat(6, 1),
        ]);
        let mut w = WorkingSystem::new(&g);
        assert_eq!(w.eliminate_truncation(6, 5).unwrap(), CaseTag::Shift);
        assert_eq!(w.rule(6), Some(&Rule::Truncate(4, big(3), big(4))));
        check(&g);
    }

    #[test]
    fn case2_three_parts() {
        // Y = abc, X = Y^4, Q = X[2..8) = "bc" "abc" "a".
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Atomic('c'),
            Rule::Concat(1, 2),
            Rule::Concat(4, 3),
            Rule::Repeat(5, big(4)),
            Rule::Truncate(6, big(2), big(8)),
            Rule::Concat(7, 5),
        ]);
        let mut w = WorkingSystem::new(&g);
        let size_before = w.rules.iter().flatten().count();
        assert_eq!(w.eliminate_truncation(7, 6).unwrap(), CaseTag::Repetition);
        assert!(w.rules.iter().flatten().count() - size_before <= 4);
        assert!(w.is_reachable(5));
        let out = check(&g);
        assert_eq!(text(&out), "bcabcaabc");
    }

    #[test]
    fn case2_exact_copies_become_repeat() {
        // Q = X[4..13) = Y^3 with Y = abc.
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Atomic('c'),
            Rule::Concat(1, 2),
            Rule::Concat(4, 3),
            Rule::Repeat(5, big(5)),
            Rule::Truncate(6, big(4), big(13)),
            Rule::Concat(7, 5),
        ]);
        let mut w = WorkingSystem::new(&g);
        assert_eq!(w.eliminate_truncation(7, 6).unwrap(), CaseTag::Repetition);
        assert_eq!(w.rule(7), Some(&Rule::Repeat(5, big(3))));
        check(&g);
    }

    #[test]
    fn crossing_single_crossing() {
        // X = Y Z with Y = ab, Z = cd; Q = X[2..4) = "bc".
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Atomic('c'),
            Rule::Atomic('d'),
            Rule::Concat(1, 2),
            Rule::Concat(3, 4),
            Rule::Concat(5, 6),
            Rule::Truncate(7, big(2), big(4)),
            Rule::Concat(8, 1),
            Rule::Concat(9, 4),
            Rule::Concat(10, 3),
        ]);
        let mut w = WorkingSystem::new(&g);
        let before = w.rules.iter().flatten().count();
        assert_eq!(w.eliminate_truncation(8, 7).unwrap(), CaseTag::Crossing);
        w.crossing_batch(7, &[8]).unwrap();
        assert_eq!(w.rules.iter().flatten().count() - before, 2);
        let Some(Rule::Concat(s, p)) = w.rule(8).cloned() else { panic!() };
        assert_eq!(w.rule(s), Some(&Rule::Truncate(5, big(2), big(3))));
        assert_eq!(w.rule(p), Some(&Rule::Truncate(6, big(1), big(2))));
        check(&g);
    }

    #[test]
    fn crossing_shared_suffix() {
        // Y = abc, Z = de; slices needing suffixes of length 2 and 3.
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Atomic('c'),
            Rule::Atomic('d'),
            Rule::Atomic('e'),
            Rule::Concat(1, 2),
            Rule::Concat(6, 3),
            Rule::Concat(4, 5),
            Rule::Concat(7, 8),
            Rule::Truncate(9, big(2), big(5)),
            Rule::Truncate(9, big(1), big(5)),
            Rule::Concat(10, 11),
            Rule::Concat(12, 8),
        ]);
        let mut w = WorkingSystem::new(&g);
        assert_eq!(w.eliminate_truncation(10, 9).unwrap(), CaseTag::Crossing);
        assert_eq!(w.eliminate_truncation(11, 9).unwrap(), CaseTag::Crossing);
        w.crossing_batch(9, &[10, 11]).unwrap();
        // s = 3 is all of Y, so Q11 = Y P and Q10 = Y[2..4) P.
        let Some(Rule::Concat(l11, p11)) = w.rule(11).cloned() else { panic!() };
        assert_eq!(l11, 7);
        let Some(Rule::Concat(l10, p10)) = w.rule(10).cloned() else { panic!() };
        assert_eq!(p10, p11);
        assert_eq!(w.rule(l10), Some(&Rule::Truncate(7, big(2), big(4))));
        check(&g);
    }

    #[test]
    fn crossing_repetition_boundary_is_normalized() {
        // X = Y^5, Y = abc; Q = X[9..11) crosses the boundary of copies 3, 4.
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Atomic('c'),
            Rule::Concat(1, 2),
            Rule::Concat(4, 3),
            Rule::Repeat(5, big(5)),
            Rule::Truncate(6, big(9), big(11)),
            Rule::Concat(7, 5),
        ]);
        let mut w = WorkingSystem::new(&g);
        assert_eq!(w.eliminate_truncation(7, 6).unwrap(), CaseTag::Crossing);
        w.crossing_batch(6, &[7]).unwrap();
        let Some(Rule::Concat(s, p)) = w.rule(7).cloned() else { panic!() };
        assert_eq!(w.rule(s), Some(&Rule::Truncate(5, big(3), big(4))));
        assert_eq!(w.rule(p), Some(&Rule::Truncate(5, big(1), big(2))));
        assert_eq!(text(&check(&g)), "caabc");
    }

    #[test]
    fn reachable_target_is_an_error() {
        let g = sys(vec![Rule::Atomic('a'), Rule::Concat(1, 1), Rule::Truncate(2, big(1), big(2)), Rule::Concat(2, 3)]);
        let mut w = WorkingSystem::new(&g);
        assert_eq!(w.eliminate_truncation(3, 2).unwrap_err(), InternalizeError::Reachable(2));
        assert_eq!(
            w.eliminate_truncation(2, 1).unwrap_err(),
            InternalizeError::NotATruncation { q: 2, x: 1 }
        );
    }

    #[test]
    fn useless_rules_are_pruned() {
        let g = sys(vec![Rule::Atomic('a'), Rule::Atomic('b'), Rule::Concat(1, 1)]);
        let out = internalize(&g);
        assert_eq!(out.size(), 2);
        assert!(validate(&out).is_ok());
    }

    #[test]
    fn huge_lengths() {
        // Truncations deep inside a repetition of length 2^80.
        let g = sys(vec![
            Rule::Atomic('a'),
            Rule::Atomic('b'),
            Rule::Concat(1, 2),
            Rule::Repeat(3, BigUint::one() << 79u32),
            Rule::Truncate(4, (BigUint::one() << 70u32) + 2u32, (BigUint::one() << 70u32) + 9u32),
            Rule::Truncate(4, big(2), big(4)),
            Rule::Concat(5, 6),
        ]);
        let out = check(&g);
        assert_eq!(text(&out), "babababba");
    }
}
