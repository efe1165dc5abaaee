//! From a solver's model back to a certified internal collage system.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::encode::{encode, Family, Var, VarName, VariableCatalog};
use crate::model::{expand, is_internal, validate, CollageSystem, Factor, FactorKind, NtId, Rule, SystemBuilder, TypedFactorization};
use crate::oracle::{check_factorization, sigma, FactorViolation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violations(pub Vec<FactorViolation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("the solver reported the instance unsatisfiable")]
    Unsatisfiable,
    #[error("model line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("variable {var} ({name}) is not assigned by the model")]
    MissingVariable { var: u32, name: VarName },
    #[error("variable {0} is assigned both true and false")]
    Contradictory(u32),
    #[error("hard clause of family {family} violated: {clause}")]
    HardClauseViolated { family: Family, clause: String },
    #[error("{0} refers to a substring that does not end at a factor boundary")]
    Unaligned(VarName),
    #[error("extracted factorization is invalid: {0}")]
    CheckFailed(Violations),
    #[error(transparent)]
    Reconstruct(#[from] ReconstructError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReconstructError {
    #[error("typed factorization is invalid: {0}")]
    CheckFailed(Violations),
    #[error("reconstructed system fails a postcondition: {0}")]
    Postcondition(String),
}

/// Truth values of the catalog variables, indexed by id (slot 0 unused).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn from_values(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn value(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// Reads `v` lines of a solver's output: DIMACS literals terminated by 0,
/// or a single string of `0`/`1` characters for variables 1, 2, …
/// Variables past the catalog are ignored.
pub fn parse_model(src: &str, catalog: &VariableCatalog) -> Result<Assignment, DecodeError> {
    let len = catalog.len();
    let mut values: Vec<Option<bool>> = vec![None; len + 1];
    let mut set = |var: usize, value: bool| -> Result<(), DecodeError> {
        if var == 0 || var > len {
            return Ok(());
        }
        match values[var] {
            Some(old) if old != value => Err(DecodeError::Contradictory(var as u32)),
            _ => {
                values[var] = Some(value);
                Ok(())
            }
        }
    };
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(status) = line.strip_prefix("s ") {
            if status.trim() == "UNSATISFIABLE" {
                return Err(DecodeError::Unsatisfiable);
            }
            continue;
        }
        let Some(rest) = line.strip_prefix('v') else { continue };
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        if let [bits] = tokens[..] {
            if bits.len() >= 2 && bits.bytes().all(|b| b == b'0' || b == b'1') {
                for (k, b) in bits.bytes().enumerate() {
                    set(k + 1, b == b'1')?;
                }
                continue;
            }
        }
        for tok in tokens {
            let lit: i64 = tok.parse().map_err(|_| DecodeError::Malformed {
                line: idx + 1,
                message: format!("`{tok}` is not a literal"),
            })?;
            if lit != 0 {
                set(lit.unsigned_abs() as usize, lit > 0)?;
            }
        }
    }
    let mut out = vec![false; len + 1];
    for (var, name) in catalog.entries() {
        out[var.index()] = values[var.index()].ok_or(DecodeError::MissingVariable { var: var.0, name })?;
    }
    Ok(Assignment { values: out })
}

/// Re-checks every hard clause that does not involve counter variables,
/// checks at-most-one references directly, and reads off the typed
/// factorization with the depths the model records.
pub fn extract_factorization(a: &Assignment, catalog: &VariableCatalog) -> Result<TypedFactorization, DecodeError> {
    let inst = encode(&catalog.text()).expect("catalog text is non-empty");
    for (clause, &family) in inst.formula.hard.iter().zip(&inst.formula.families) {
        if clause.iter().any(|l| inst.is_aux(l.var())) {
            continue;
        }
        if !clause.iter().any(|l| l.eval(a.values())) {
            let names: Vec<String> = clause
                .iter()
                .map(|l| format!("{}{}", if l.is_positive() { "" } else { "¬" }, catalog.name(l.var()).unwrap()))
                .collect();
            return Err(DecodeError::HardClauseViolated { family, clause: names.join(" ∨ ") });
        }
    }

    let mut chosen: HashMap<(usize, usize), Vec<VarName>> = HashMap::new();
    for (var, name) in catalog.entries() {
        if let Some(factor) = name.typed_factor() {
            if a.value(var) {
                chosen.entry(factor).or_default().push(name);
            }
        }
    }
    if let Some(names) = chosen.values().find(|v| v.len() > 1) {
        let list: Vec<String> = names.iter().map(ToString::to_string).collect();
        return Err(DecodeError::HardClauseViolated {
            family: Family::AtMostOneReference,
            clause: format!("at most one of {}", list.join(", ")),
        });
    }

    let n = catalog.n();
    let starts: Vec<usize> = (1..=n + 1).filter(|&i| a.value(catalog.p(i))).collect();
    let index_of: HashMap<usize, usize> = starts.iter().enumerate().map(|(k, &s)| (s, k + 1)).collect();
    let mut factors = Vec::with_capacity(starts.len() - 1);
    for w in starts.windows(2) {
        let (i, l) = (w[0], w[1] - w[0]);
        let depth = (0..=n).rev().find(|&d| a.value(catalog.depth(i, 1, d))).unwrap_or(0);
        let kind = if l == 1 {
            FactorKind::Single
        } else {
            let name = chosen[&(i, l)][0];
            let (src, src_len) = name.referenced().unwrap();
            let first = index_of[&src];
            let last = *index_of.get(&(src + src_len)).ok_or(DecodeError::Unaligned(name))? - 1;
            match name {
                VarName::RefA { .. } => FactorKind::Copy { first, last },
                VarName::RefB { .. } => FactorKind::Repeat { first, last, repeat: l / src_len + 1 },
                VarName::RefC { .. } => FactorKind::Truncate { first, last },
                _ => unreachable!(),
            }
        };
        factors.push(Factor { kind, depth });
    }
    let tf = TypedFactorization { starts, factors };
    let violations = check_factorization(&catalog.text(), &tf);
    if !violations.is_empty() {
        return Err(DecodeError::CheckFailed(Violations(violations)));
    }
    Ok(tf)
}

/// Builds the internal collage system of a valid typed factorization:
/// one atomic rule per distinct character, one nonterminal per node
/// interval, one truncation per truncation factor, and left-leaning
/// concatenation chains for everything else. Its size is
/// `h + m_tr + σ - 1`.
pub fn reconstruct(text: &str, tf: &TypedFactorization) -> Result<CollageSystem, ReconstructError> {
    let violations = check_factorization(text, tf);
    if !violations.is_empty() {
        return Err(ReconstructError::CheckFailed(Violations(violations)));
    }
    let t: Vec<char> = text.chars().collect();
    let h = tf.h();
    let mut b = SystemBuilder::new();
    let mut atomic: HashMap<char, NtId> = HashMap::new();
    for &c in &t {
        atomic.entry(c).or_insert_with(|| b.push(Rule::Atomic(c)));
    }

    let mut ranges: BTreeSet<(usize, usize)> = tf.node_ranges().into_iter().filter(|(a, b)| a < b).collect();
    if h > 1 {
        ranges.insert((1, h));
    }
    // Containing intervals first.
    let mut nodes: Vec<(usize, usize)> = ranges.into_iter().collect();
    nodes.sort_by_key(|&(a, b)| (a, std::cmp::Reverse(b)));
    let node_id: HashMap<(usize, usize), NtId> = nodes.iter().map(|&r| (r, b.reserve())).collect();
    let trunc_id: HashMap<usize, NtId> = (1..=h)
        .filter(|&k| matches!(tf.factors[k - 1].kind, FactorKind::Truncate { .. }))
        .map(|k| (k, b.reserve()))
        .collect();

    // Direct sub-intervals of every node, keyed by their first factor.
    let mut sub: HashMap<(usize, usize), HashMap<usize, (usize, usize)>> = HashMap::new();
    let mut open: Vec<(usize, usize)> = Vec::new();
    for &r in &nodes {
        while open.last().is_some_and(|top| top.1 < r.0) {
            open.pop();
        }
        if let Some(&parent) = open.last() {
            sub.entry(parent).or_default().insert(r.0, r);
        }
        open.push(r);
    }

    let sym = Symbols { t: &t, tf, atomic: &atomic, node_id: &node_id, trunc_id: &trunc_id };
    for &(a, last) in &nodes {
        let id = node_id[&(a, last)];
        if let FactorKind::Repeat { first, repeat, .. } = tf.factors[last - 1].kind {
            if first == a {
                b.set(id, Rule::Repeat(sym.range(a, last - 1), BigUint::from(repeat)));
                continue;
            }
        }
        let direct = sub.get(&(a, last));
        let mut parts = Vec::new();
        let mut k = a;
        while k <= last {
            match direct.and_then(|d| d.get(&k)) {
                Some(&(s, e)) => {
                    parts.push(node_id[&(s, e)]);
                    k = e + 1;
                }
                None => {
                    parts.push(sym.factor(k));
                    k += 1;
                }
            }
        }
        let mut acc = parts[0];
        for &p in &parts[1..parts.len() - 1] {
            acc = b.push(Rule::Concat(acc, p));
        }
        b.set(id, Rule::Concat(acc, *parts.last().unwrap()));
    }

    for (&k, &id) in &trunc_id {
        let FactorKind::Truncate { first, last } = tf.factors[k - 1].kind else { unreachable!() };
        let (fs, fe) = tf.span(k);
        let (rs, re) = tf.range_span(first, last);
        let needle = &t[fs - 1..fe - 1];
        let offset = t[rs - 1..re - 1].windows(needle.len()).position(|w| w == needle).expect("checked substring");
        let begin = BigUint::from(offset + 1);
        let end = BigUint::from(offset + 1 + needle.len());
        b.set(id, Rule::Truncate(sym.range(first, last), begin, end));
    }

    let start = if h == 1 { sym.factor(1) } else { node_id[&(1, h)] };
    let g = b.finish(start);

    let expected = tf.system_size(sigma(text));
    let fail = |m: String| Err(ReconstructError::Postcondition(m));
    match expand(&g, g.start(), t.len()) {
        Ok(s) if s == text => {}
        other => return fail(format!("expansion {other:?} differs from the text")),
    }
    if !is_internal(&g) {
        return fail("system is not internal".into());
    }
    if g.size() != expected {
        return fail(format!("size {} instead of {expected}", g.size()));
    }
    let report = validate(&g);
    if !report.is_ok() {
        return fail(report.to_string());
    }
    Ok(g)
}

struct Symbols<'a> {
    t: &'a [char],
    tf: &'a TypedFactorization,
    atomic: &'a HashMap<char, NtId>,
    node_id: &'a HashMap<(usize, usize), NtId>,
    trunc_id: &'a HashMap<usize, NtId>,
}

impl Symbols<'_> {
    /// Nonterminal deriving factor `k`. Repetition factors have none; they
    /// only occur under the repetition node built for them.
    fn factor(&self, k: usize) -> NtId {
        match self.tf.factors[k - 1].kind {
            FactorKind::Single => {
                let (s, _) = self.tf.span(k);
                self.atomic[&self.t[s - 1]]
            }
            FactorKind::Copy { first, last } => self.range(first, last),
            FactorKind::Truncate { .. } => self.trunc_id[&k],
            FactorKind::Repeat { .. } => unreachable!("repetition factors sit under their node"),
        }
    }

    fn range(&self, a: usize, b: usize) -> NtId {
        if a == b {
            self.factor(a)
        } else {
            self.node_id[&(a, b)]
        }
    }
}

/// A reconstructed system with its size breakdown `h + m_tr + σ - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub system: CollageSystem,
    pub factorization: TypedFactorization,
    pub h: usize,
    pub m_tr: usize,
    pub sigma: usize,
    pub size: usize,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size={} h={} m_tr={} sigma={}", self.size, self.h, self.m_tr, self.sigma)
    }
}

/// Parses, re-checks, extracts and reconstructs.
pub fn certify(model: &str, catalog: &VariableCatalog) -> Result<Certificate, DecodeError> {
    let a = parse_model(model, catalog)?;
    certify_assignment(&a, catalog)
}

pub fn certify_assignment(a: &Assignment, catalog: &VariableCatalog) -> Result<Certificate, DecodeError> {
    let tf = extract_factorization(a, catalog)?;
    let text = catalog.text();
    let system = reconstruct(&text, &tf)?;
    Ok(Certificate {
        size: system.size(),
        h: tf.h(),
        m_tr: tf.truncations(),
        sigma: sigma(&text),
        factorization: tf,
        system,
    })
}

pub fn certified_size(model: &str, catalog: &VariableCatalog) -> Result<usize, DecodeError> {
    certify(model, catalog).map(|c| c.size)
}

/// The assignment describing a valid typed factorization, with minimal
/// depths; `None` if it uses a reference outside the catalog.
pub fn assignment_for(tf: &TypedFactorization, catalog: &VariableCatalog) -> Option<Assignment> {
    let n = catalog.n();
    let tf = tf.clone().with_minimal_depths()?;
    let mut values = vec![false; catalog.len() + 1];
    let mut on = |name: VarName| -> Option<()> {
        values[catalog.get(&name)?.index()] = true;
        Some(())
    };
    for &s in &tf.starts {
        on(VarName::P { i: s })?;
    }
    let mut char_depth = vec![0; n + 1];
    for (idx, f) in tf.factors.iter().enumerate() {
        let k = idx + 1;
        let (i, e) = tf.span(k);
        let l = e - i;
        on(VarName::F { i, l })?;
        for c in &mut char_depth[i..e] {
            *c = f.depth;
        }
        let Some((a, b)) = f.kind.reference() else { continue };
        let (src, src_end) = tf.range_span(a, b);
        let src_len = src_end - src;
        let name = match f.kind {
            FactorKind::Copy { .. } => VarName::RefA { src, i, l },
            FactorKind::Repeat { .. } => VarName::RefB { src, i, l },
            FactorKind::Truncate { .. } => VarName::RefC { src, src_len, i, l },
            FactorKind::Single => unreachable!(),
        };
        on(name)?;
        on(VarName::DRef { src, src_len, i })?;
        on(VarName::Q { src, src_len })?;
        if let FactorKind::Repeat { .. } = f.kind {
            on(VarName::Q { src, src_len: e - src })?;
        }
    }
    for i in 1..=n {
        for l in 1..=n + 1 - i {
            let max = char_depth[i..i + l].iter().copied().max().unwrap();
            for d in 0..=max {
                on(VarName::Depth { i, l, d })?;
            }
        }
    }
    Some(Assignment { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::stats;

    fn tf(starts: Vec<usize>, kinds: Vec<FactorKind>) -> TypedFactorization {
        TypedFactorization { starts, factors: kinds.into_iter().map(|kind| Factor { kind, depth: 0 }).collect() }
            .with_minimal_depths()
            .unwrap()
    }

    fn model_line(a: &Assignment) -> String {
        let mut s = String::from("v");
        for (v, &b) in a.values().iter().enumerate().skip(1) {
            s.push_str(&format!(" {}{v}", if b { "" } else { "-" }));
        }
        s + " 0\n"
    }

    #[test]
    fn parse_literal_and_binary_models() {
        let c = VariableCatalog::build("a").unwrap();
        let len = c.len();
        let lits: Vec<String> = (1..=len).map(|v| if v % 2 == 1 { v.to_string() } else { format!("-{v}") }).collect();
        let a = parse_model(&format!("s OPTIMUM FOUND\nv {} 0\n", lits.join(" ")), &c).unwrap();
        let bits: String = (1..=len).map(|v| if v % 2 == 1 { '1' } else { '0' }).collect();
        let b = parse_model(&format!("v {bits}\n"), &c).unwrap();
        assert_eq!(a, b);
        assert!(a.value(Var(1)) && !a.value(Var(2)));
    }

    #[test]
    fn parse_errors() {
        let c = VariableCatalog::build("a").unwrap();
        assert_eq!(
            parse_model("v 1 0\n", &c).unwrap_err(),
            DecodeError::MissingVariable { var: 2, name: VarName::P { i: 2 } }
        );
        assert_eq!(parse_model("v 1 -1 0\n", &c).unwrap_err(), DecodeError::Contradictory(1));
        assert_eq!(parse_model("s UNSATISFIABLE\n", &c).unwrap_err(), DecodeError::Unsatisfiable);
        assert!(matches!(parse_model("v x 0\n", &c), Err(DecodeError::Malformed { line: 1, .. })));
    }

    #[test]
    fn aaaa_repetition_model() {
        let c = VariableCatalog::build("aaaa").unwrap();
        let t = tf(vec![1, 2, 5], vec![FactorKind::Single, FactorKind::Repeat { first: 1, last: 1, repeat: 4 }]);
        let a = assignment_for(&t, &c).unwrap();
        assert!(a.value(c.get(&VarName::RefB { src: 1, i: 2, l: 3 }).unwrap()));
        let cert = certify(&model_line(&a), &c).unwrap();
        assert_eq!(cert.factorization.starts, vec![1, 2, 5]);
        assert_eq!(cert.size, 2);
        assert_eq!(cert.system.rules(), &[Rule::Atomic('a'), Rule::Repeat(1, BigUint::from(4u8))]);
    }

    #[test]
    fn two_references_for_one_factor_are_rejected() {
        let c = VariableCatalog::build("aaaa").unwrap();
        let t = tf(
            vec![1, 2, 3, 5],
            vec![FactorKind::Single, FactorKind::Single, FactorKind::Copy { first: 1, last: 2 }],
        );
        let mut values = assignment_for(&t, &c).unwrap().values().to_vec();
        let extra = c.get(&VarName::RefB { src: 2, i: 3, l: 2 }).unwrap();
        values[extra.index()] = true;
        let a = Assignment::from_values(values);
        let err = extract_factorization(&a, &c).unwrap_err();
        assert!(matches!(err, DecodeError::HardClauseViolated { .. }), "{err}");
    }

    #[test]
    fn abab_reconstruction() {
        let t = tf(
            vec![1, 2, 3, 5],
            vec![FactorKind::Single, FactorKind::Single, FactorKind::Copy { first: 1, last: 2 }],
        );
        let g = reconstruct("abab", &t).unwrap();
        assert_eq!(g.size(), 4);
        assert_eq!(
            g.rules(),
            &[Rule::Atomic('a'), Rule::Atomic('b'), Rule::Concat(1, 2), Rule::Concat(3, 3)]
        );
        assert_eq!(stats(&g).node_count_identity(), Some(true));
    }

    #[test]
    fn single_character() {
        let t = tf(vec![1, 2], vec![FactorKind::Single]);
        let g = reconstruct("a", &t).unwrap();
        assert_eq!(g.rules(), &[Rule::Atomic('a')]);
    }

    #[test]
    fn right_pointing_truncation() {
        let t = tf(
            vec![1, 3, 4, 5, 6],
            vec![
                FactorKind::Truncate { first: 2, last: 4 },
                FactorKind::Single,
                FactorKind::Single,
                FactorKind::Single,
            ],
        );
        let g = reconstruct("bcabc", &t).unwrap();
        assert_eq!(g.size(), 4 + 1 + 3 - 1);
        assert_eq!(g.truncation_count(), 1);
    }

    #[test]
    fn invalid_factorization_is_refused() {
        let t = TypedFactorization { starts: vec![1, 3], factors: vec![Factor { kind: FactorKind::Single, depth: 0 }] };
        assert!(matches!(reconstruct("ab", &t), Err(ReconstructError::CheckFailed(_))));
    }
}
