use std::collections::BTreeMap;

use super::catalog::{CatalogError, VarName, VariableCatalog};
use super::cnf::{at_most_one, Family, Formula, Lit, Var};

/// Optional clause families that tighten the base formulation so that
/// every feasible assignment describes a realizable factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Node intervals end at a factor start.
    pub interval_end: bool,
    /// A repetition factor's own span is not a node interval.
    pub repeat_tail: bool,
    /// A referenced substring has depth below `n`, which rules out
    /// reference cycles at the top depth.
    pub depth_ceiling: bool,
}

impl EncodeOptions {
    /// Everything on; the only setting whose optimum is `ĉ(T)`.
    pub const EXACT: EncodeOptions = EncodeOptions { interval_end: true, repeat_tail: true, depth_ceiling: true };
    /// Only the base families.
    pub const BASE: EncodeOptions = EncodeOptions { interval_end: false, repeat_tail: false, depth_ceiling: false };
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions::EXACT
    }
}

/// A MAX-SAT instance with its catalog. Variables past the catalog are
/// at-most-one counters; `aux_owner` names the factor each one serves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxSatInstance {
    pub catalog: VariableCatalog,
    pub formula: Formula,
    pub aux_owner: Vec<(Var, usize, usize)>,
}

impl MaxSatInstance {
    pub fn num_vars(&self) -> u32 {
        self.formula.num_vars
    }

    pub fn is_aux(&self, var: Var) -> bool {
        var.index() > self.catalog.len()
    }
}

pub fn encode(text: &str) -> Result<MaxSatInstance, CatalogError> {
    encode_with(text, EncodeOptions::default())
}

pub fn encode_with(text: &str, opts: EncodeOptions) -> Result<MaxSatInstance, CatalogError> {
    let catalog = VariableCatalog::build(text)?;
    let n = catalog.n();
    let mut fm = Formula { num_vars: catalog.len() as u32, ..Formula::default() };
    let mut aux_owner = Vec::new();

    let p = |i: usize| catalog.p(i);
    let depth = |i: usize, l: usize, d: usize| catalog.depth(i, l, d);

    // Candidates per factor, in catalog order (A, then B, then C).
    let mut candidates: BTreeMap<(usize, usize), Vec<Var>> = BTreeMap::new();
    let mut dref_sources: BTreeMap<VarName, Vec<Var>> = BTreeMap::new();
    let mut q_sources: BTreeMap<VarName, Vec<Var>> = BTreeMap::new();
    let mut ref_b = Vec::new();
    for (var, name) in catalog.entries() {
        if let (Some((i, l)), Some((src, src_len))) = (name.typed_factor(), name.referenced()) {
            candidates.entry((i, l)).or_default().push(var);
            dref_sources.entry(VarName::DRef { src, src_len, i }).or_default().push(var);
            if let VarName::RefB { src, i, l } = name {
                ref_b.push((var, src, i, l));
            }
        }
        if let VarName::DRef { src, src_len, .. } = name {
            q_sources.entry(VarName::Q { src, src_len }).or_default().push(var);
        }
    }
    for &(var, src, i, l) in &ref_b {
        q_sources.entry(VarName::Q { src, src_len: l + i - src }).or_default().push(var);
    }

    fm.add_hard(Family::Endpoints, vec![p(1).pos()]);
    fm.add_hard(Family::Endpoints, vec![p(n + 1).pos()]);

    for i in 1..=n {
        for l in 1..=n + 1 - i {
            let f = catalog.f(i, l);
            let mut shape = vec![p(i).pos()];
            shape.extend((i + 1..i + l).map(|j| p(j).neg()));
            shape.push(p(i + l).pos());
            let mut back = vec![f.pos()];
            for &lit in &shape {
                fm.add_hard(Family::FactorBoundaries, vec![f.neg(), lit]);
                back.push(!lit);
            }
            fm.add_hard(Family::FactorBoundaries, back);
        }
    }

    for i in 1..=n {
        for l in 2..=n + 1 - i {
            if !candidates.contains_key(&(i, l)) {
                fm.add_hard(Family::NoCandidate, vec![catalog.f(i, l).neg()]);
            }
        }
    }

    for (&(i, l), refs) in &candidates {
        let f = catalog.f(i, l);
        let mut forward = vec![f.neg()];
        forward.extend(refs.iter().map(|r| r.pos()));
        fm.add_hard(Family::FactorReference, forward);
        for r in refs {
            fm.add_hard(Family::FactorReference, vec![r.neg(), f.pos()]);
        }
    }

    for (&(i, l), refs) in &candidates {
        let lits: Vec<Lit> = refs.iter().map(|r| r.pos()).collect();
        for s in at_most_one(&mut fm, Family::AtMostOneReference, &lits) {
            aux_owner.push((s, i, l));
        }
    }

    for (name, sources) in &dref_sources {
        let d = catalog.get(name).expect("dref in catalog");
        define_or(&mut fm, Family::ReferenceSummary, d, sources);
    }

    for (name, sources) in &q_sources {
        let q = catalog.get(name).expect("q in catalog");
        define_or(&mut fm, Family::IntervalSummary, q, sources);
    }

    let intervals: Vec<(Var, usize, usize)> = catalog
        .of_kind("q")
        .map(|(v, name)| match name {
            VarName::Q { src, src_len } => (v, src, src + src_len),
            _ => unreachable!(),
        })
        .collect();
    for &(q, begin, _) in &intervals {
        fm.add_hard(Family::IntervalStart, vec![q.neg(), p(begin).pos()]);
    }
    if opts.interval_end {
        for &(q, _, end) in &intervals {
            fm.add_hard(Family::IntervalEnd, vec![q.neg(), p(end).pos()]);
        }
    }
    if opts.repeat_tail {
        for &(var, _, i, l) in &ref_b {
            if let Some(q) = catalog.get(&VarName::Q { src: i, src_len: l }) {
                fm.add_hard(Family::RepeatTail, vec![var.neg(), q.neg()]);
            }
        }
    }

    for &(q1, b1, e1) in &intervals {
        for &(q2, b2, e2) in &intervals {
            if b1 < b2 && b2 < e1 && e1 < e2 {
                fm.add_hard(Family::Crossing, vec![q1.neg(), q2.neg()]);
            }
        }
    }

    for i in 1..=n {
        fm.add_hard(Family::DepthBase, vec![depth(i, 1, 0).pos()]);
    }
    for i in 1..=n {
        for d in 1..=n {
            fm.add_hard(Family::DepthMonotone, vec![depth(i, 1, d).neg(), depth(i, 1, d - 1).pos()]);
        }
    }
    for i in 2..=n {
        for d in 0..=n {
            let (cur, prev) = (depth(i, 1, d), depth(i - 1, 1, d));
            fm.add_hard(Family::DepthFactor, vec![p(i).pos(), cur.neg(), prev.pos()]);
            fm.add_hard(Family::DepthFactor, vec![p(i).pos(), cur.pos(), prev.neg()]);
        }
    }
    for i in 1..=n {
        for l in 2..=n + 1 - i {
            for d in 0..=n {
                let chars: Vec<Var> = (i..i + l).map(|j| depth(j, 1, d)).collect();
                define_or(&mut fm, Family::DepthMax, depth(i, l, d), &chars);
            }
        }
    }
    let drefs: Vec<(Var, usize, usize, usize)> = catalog
        .of_kind("dref")
        .map(|(v, name)| match name {
            VarName::DRef { src, src_len, i } => (v, src, src_len, i),
            _ => unreachable!(),
        })
        .collect();
    for &(dref, src, src_len, i) in &drefs {
        for d in 1..=n {
            fm.add_hard(
                Family::DepthReference,
                vec![dref.neg(), depth(i, 1, d).pos(), depth(src, src_len, d - 1).neg()],
            );
        }
    }
    if opts.depth_ceiling {
        for &(dref, src, src_len, _) in &drefs {
            fm.add_hard(Family::DepthCeiling, vec![dref.neg(), depth(src, src_len, n).neg()]);
        }
    }

    for i in 2..=n {
        fm.add_soft(vec![p(i).neg()]);
    }
    for (v, _) in catalog.of_kind("refC") {
        fm.add_soft(vec![v.neg()]);
    }

    Ok(MaxSatInstance { catalog, formula: fm, aux_owner })
}

/// `x ⇔ s_1 ∨ … ∨ s_k`.
fn define_or(fm: &mut Formula, family: Family, x: Var, sources: &[Var]) {
    let mut forward = vec![x.neg()];
    forward.extend(sources.iter().map(|s| s.pos()));
    fm.add_hard(family, forward);
    for s in sources {
        fm.add_hard(family, vec![s.neg(), x.pos()]);
    }
}
