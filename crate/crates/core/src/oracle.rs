//! Ground truth for small texts: a direct checker for typed factorizations
//! and an exhaustive search for the smallest internal collage system.
//!
//! A typed factorization describes an internal collage system of size
//! `h + m_tr + σ - 1` exactly when
//! 1. every factor longer than one character is a copy of an earlier
//!    factor range, a repetition `Y^(r-1)` (`r >= 3`) of the range right
//!    before it, or a substring of a range not containing it;
//! 2. the referenced ranges, plus `Y^r` for every repetition, never cross,
//!    and none of them is the span of a single repetition factor (that
//!    string `Y^(r-1)` has no nonterminal of its own);
//! 3. references between factors are acyclic.

use std::fmt;

use thiserror::Error;

use crate::model::factorization::minimal_depths;
use crate::model::{Factor, FactorKind, TypedFactorization};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorViolation {
    /// Starts do not partition the text.
    Boundaries(String),
    /// A one-character factor carries a reference.
    TypedSingle { k: usize },
    /// A longer factor has no reference.
    Untyped { k: usize },
    RangeOutOfBounds { k: usize },
    CopyMismatch { k: usize },
    RepeatMismatch { k: usize },
    TruncationMismatch { k: usize },
    /// Two node intervals (position ranges) cross.
    Crossing { first: (usize, usize), second: (usize, usize) },
    /// A node interval is the span of the single repetition factor `k`.
    RepeatTailNode { k: usize },
    /// The references contain a cycle.
    Cycle,
    /// The recorded depth of `k` does not exceed the depths it refers to.
    DepthWitness { k: usize },
}

impl fmt::Display for FactorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorViolation::Boundaries(msg) => write!(f, "bad boundaries: {msg}"),
            FactorViolation::TypedSingle { k } => write!(f, "F{k} has length 1 but a reference"),
            FactorViolation::Untyped { k } => write!(f, "F{k} is longer than 1 but has no reference"),
            FactorViolation::RangeOutOfBounds { k } => write!(f, "F{k} refers outside the factorization"),
            FactorViolation::CopyMismatch { k } => write!(f, "F{k} is not a copy of an earlier range"),
            FactorViolation::RepeatMismatch { k } => write!(f, "F{k} is not a repetition of the preceding range"),
            FactorViolation::TruncationMismatch { k } => {
                write!(f, "F{k} is not a substring of a range excluding it")
            }
            FactorViolation::Crossing { first, second } => write!(
                f,
                "intervals [{}..{}) and [{}..{}) cross",
                first.0, first.1, second.0, second.1
            ),
            FactorViolation::RepeatTailNode { k } => write!(f, "the span of repetition factor F{k} is a node"),
            FactorViolation::Cycle => write!(f, "references are cyclic"),
            FactorViolation::DepthWitness { k } => write!(f, "depth of F{k} does not exceed its references"),
        }
    }
}

/// Every violated condition; empty means valid.
///
/// Recorded depths are checked as a witness only for long factors: single
/// characters refer to nothing, so lowering their depth to 0 never breaks
/// a witness.
pub fn check_factorization(text: &str, tf: &TypedFactorization) -> Vec<FactorViolation> {
    let t: Vec<char> = text.chars().collect();
    let n = t.len();
    let h = tf.factors.len();
    let mut out = Vec::new();
    if tf.starts.len() != h + 1
        || tf.starts.first() != Some(&1)
        || tf.starts.last() != Some(&(n + 1))
        || tf.starts.windows(2).any(|w| w[0] >= w[1])
    {
        out.push(FactorViolation::Boundaries(format!("{:?} for length {n}", tf.starts)));
        return out;
    }
    let span = |a: usize, b: usize| &t[tf.starts[a - 1] - 1..tf.starts[b] - 1];

    let mut sane = true;
    for (idx, factor) in tf.factors.iter().enumerate() {
        let k = idx + 1;
        let fk = span(k, k);
        match factor.kind {
            FactorKind::Single => {
                if fk.len() > 1 {
                    out.push(FactorViolation::Untyped { k });
                }
                continue;
            }
            _ if fk.len() == 1 => {
                out.push(FactorViolation::TypedSingle { k });
                sane = false;
                continue;
            }
            _ => {}
        }
        let (a, b) = factor.kind.reference().unwrap();
        if a == 0 || a > b || b > h {
            out.push(FactorViolation::RangeOutOfBounds { k });
            sane = false;
            continue;
        }
        let range = span(a, b);
        match factor.kind {
            FactorKind::Copy { .. } => {
                if !(b < k && range == fk) {
                    out.push(FactorViolation::CopyMismatch { k });
                }
            }
            FactorKind::Repeat { repeat, .. } => {
                let ok = b + 1 == k
                    && repeat >= 3
                    && fk.len() == (repeat - 1) * range.len()
                    && fk.chunks(range.len()).all(|c| c == range);
                if !ok {
                    out.push(FactorViolation::RepeatMismatch { k });
                }
            }
            FactorKind::Truncate { .. } => {
                let outside = k < a || k > b;
                if !(outside && range.len() >= fk.len() && range.windows(fk.len()).any(|w| w == fk)) {
                    out.push(FactorViolation::TruncationMismatch { k });
                }
            }
            FactorKind::Single => unreachable!(),
        }
    }
    if !sane {
        return out;
    }

    let nodes: Vec<(usize, usize)> = tf.node_ranges().into_iter().collect();
    for &(a, b) in &nodes {
        if a == b && matches!(tf.factors[a - 1].kind, FactorKind::Repeat { .. }) {
            out.push(FactorViolation::RepeatTailNode { k: a });
        }
    }
    let pos: Vec<(usize, usize)> = nodes.iter().map(|&(a, b)| tf.range_span(a, b)).collect();
    for &x in &pos {
        for &y in &pos {
            if x.0 < y.0 && y.0 < x.1 && x.1 < y.1 {
                out.push(FactorViolation::Crossing { first: x, second: y });
            }
        }
    }

    let refs: Vec<Option<(usize, usize)>> = tf.factors.iter().map(|f| f.kind.reference()).collect();
    if minimal_depths(&refs).is_none() {
        out.push(FactorViolation::Cycle);
    } else {
        for (idx, f) in tf.factors.iter().enumerate() {
            if let Some((a, b)) = f.kind.reference() {
                if tf.factors[a - 1..b].iter().any(|g| g.depth >= f.depth) {
                    out.push(FactorViolation::DepthWitness { k: idx + 1 });
                }
            }
        }
    }
    out
}

pub fn is_valid(text: &str, tf: &TypedFactorization) -> bool {
    check_factorization(text, tf).is_empty()
}

/// Which references the enumeration may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateDomain {
    /// Every reference the validity conditions allow.
    Full,
    /// Truncation factors and their referenced ranges start at or before
    /// `n - 2`, as in the variable catalog.
    Catalog,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the text is empty")]
    EmptyText,
    #[error("no internal collage system of size at most {0}")]
    BoundExceeded(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub size: usize,
    pub factorization: TypedFactorization,
}

/// Number of distinct characters.
pub fn sigma(text: &str) -> usize {
    let mut cs: Vec<char> = text.chars().collect();
    cs.sort_unstable();
    cs.dedup();
    cs.len()
}

/// `ĉ(T)` by exhaustive search with a witness of minimal depths, or
/// `BoundExceeded` if it is larger than `max_m`.
pub fn brute_force_chat(text: &str, max_m: usize) -> Result<OracleResult, OracleError> {
    let t: Vec<char> = text.chars().collect();
    if t.is_empty() {
        return Err(OracleError::EmptyText);
    }
    let sigma = sigma(text);
    let mut starts_by_h = boundary_sets(t.len());
    starts_by_h.sort_by_key(|s| s.len());
    let mut best: Option<OracleResult> = None;
    for starts in starts_by_h {
        let h = starts.len() - 1;
        let floor = h + sigma - 1;
        let limit = best.as_ref().map_or(max_m, |b| b.size - 1);
        if floor > limit {
            if best.is_some() {
                break;
            }
            continue;
        }
        let mut search = Search::new(&t, text, starts, CandidateDomain::Full);
        search.limit = Some(limit - floor);
        search.run(&mut |tf| {
            let size = tf.system_size(sigma);
            if best.as_ref().is_none_or(|b| size < b.size) {
                best = Some(OracleResult { size, factorization: tf.clone() });
            }
            Some(tf.truncations())
        });
    }
    best.ok_or(OracleError::BoundExceeded(max_m))
}

/// Every valid typed factorization with minimal depths.
pub fn valid_factorizations(text: &str, domain: CandidateDomain) -> Vec<TypedFactorization> {
    let t: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    if t.is_empty() {
        return out;
    }
    for starts in boundary_sets(t.len()) {
        Search::new(&t, text, starts, domain).run(&mut |tf| {
            out.push(tf.clone());
            None
        });
    }
    out
}

/// All start lists `1 = s_1 < … < s_{h+1} = n + 1`.
fn boundary_sets(n: usize) -> Vec<Vec<usize>> {
    assert!(n <= 24, "exhaustive search is limited to short texts");
    (0u32..1 << (n - 1))
        .map(|mask| {
            let mut s = vec![1];
            s.extend((2..=n).filter(|&p| mask >> (p - 2) & 1 == 1));
            s.push(n + 1);
            s
        })
        .collect()
}

/// Depth-first choice of one reference per factor for fixed boundaries.
struct Search<'a> {
    text: &'a str,
    starts: Vec<usize>,
    options: Vec<Vec<FactorKind>>,
    /// Largest number of truncations still worth reporting.
    limit: Option<usize>,
    done: bool,
}

impl<'a> Search<'a> {
    fn new(t: &'a [char], text: &'a str, starts: Vec<usize>, domain: CandidateDomain) -> Self {
        let n = t.len();
        let h = starts.len() - 1;
        let span = |a: usize, b: usize| &t[starts[a - 1] - 1..starts[b] - 1];
        let mut options = Vec::with_capacity(h);
        for k in 1..=h {
            let fk = span(k, k);
            let mut opts = Vec::new();
            if fk.len() == 1 {
                opts.push(FactorKind::Single);
                options.push(opts);
                continue;
            }
            for a in 1..k {
                for b in a..k {
                    if span(a, b) == fk {
                        opts.push(FactorKind::Copy { first: a, last: b });
                    }
                }
                let y = span(a, k - 1);
                if fk.len() % y.len() == 0 && fk.len() / y.len() >= 2 && fk.chunks(y.len()).all(|c| c == y) {
                    opts.push(FactorKind::Repeat { first: a, last: k - 1, repeat: fk.len() / y.len() + 1 });
                }
            }
            let c_allowed = |start: usize| domain == CandidateDomain::Full || start + 2 <= n;
            if c_allowed(starts[k - 1]) {
                for a in 1..=h {
                    for b in a..=h {
                        if (a..=b).contains(&k) || !c_allowed(starts[a - 1]) {
                            continue;
                        }
                        let r = span(a, b);
                        if r.len() >= fk.len() && r.windows(fk.len()).any(|w| w == fk) {
                            opts.push(FactorKind::Truncate { first: a, last: b });
                        }
                    }
                }
            }
            options.push(opts);
        }
        Search { text, starts, options, limit: None, done: false }
    }

    /// Calls `emit` on every valid choice. When it returns the number of
    /// truncations of an accepted solution, only solutions with fewer are
    /// reported afterwards.
    fn run(&mut self, emit: &mut dyn FnMut(&TypedFactorization) -> Option<usize>) {
        let h = self.starts.len() - 1;
        if self.options.iter().any(Vec::is_empty) {
            return;
        }
        let mut chosen: Vec<FactorKind> = Vec::with_capacity(h);
        let mut intervals: Vec<(usize, usize)> = Vec::new();
        self.dfs(&mut chosen, &mut intervals, 0, emit);
    }

    fn dfs(
        &mut self,
        chosen: &mut Vec<FactorKind>,
        intervals: &mut Vec<(usize, usize)>,
        truncations: usize,
        emit: &mut dyn FnMut(&TypedFactorization) -> Option<usize>,
    ) {
        let k = chosen.len() + 1;
        if k > self.options.len() {
            let tf = TypedFactorization {
                starts: self.starts.clone(),
                factors: chosen.iter().map(|kind| Factor { kind: kind.clone(), depth: 0 }).collect(),
            };
            let Some(tf) = tf.with_minimal_depths() else { return };
            if is_valid(self.text, &tf) {
                match emit(&tf) {
                    Some(0) => self.done = true,
                    Some(tr) => self.limit = Some(tr - 1),
                    None => {}
                }
            }
            return;
        }
        for idx in 0..self.options[k - 1].len() {
            let kind = self.options[k - 1][idx].clone();
            let is_c = matches!(kind, FactorKind::Truncate { .. });
            if is_c && self.limit.is_some_and(|l| truncations + 1 > l) {
                continue;
            }
            let added = self.node_spans(&kind, k);
            if added.iter().any(|&x| intervals.iter().any(|&y| crosses(x, y))) {
                continue;
            }
            let mark = intervals.len();
            intervals.extend(added);
            chosen.push(kind);
            self.dfs(chosen, intervals, truncations + usize::from(is_c), emit);
            chosen.pop();
            intervals.truncate(mark);
            if self.done {
                return;
            }
        }
    }

    fn node_spans(&self, kind: &FactorKind, k: usize) -> Vec<(usize, usize)> {
        let pos = |a: usize, b: usize| (self.starts[a - 1], self.starts[b]);
        match *kind {
            FactorKind::Single => vec![],
            FactorKind::Copy { first, last } | FactorKind::Truncate { first, last } => vec![pos(first, last)],
            FactorKind::Repeat { first, last, .. } => vec![pos(first, last), pos(first, k)],
        }
    }
}

fn crosses(x: (usize, usize), y: (usize, usize)) -> bool {
    (x.0 < y.0 && y.0 < x.1 && x.1 < y.1) || (y.0 < x.0 && x.0 < y.1 && y.1 < x.1)
}
