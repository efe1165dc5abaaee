use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::cnf::Var;

/// A catalog variable. Positions are 1-based; `src`/`src_len` describe
/// the referenced substring `T[src..src+src_len)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarName {
    /// `i` starts a factor (`i = n + 1` always true).
    P { i: usize },
    /// `T[i..i+l)` is a factor.
    F { i: usize, l: usize },
    /// `T[i..i+l)` copies the earlier, disjoint `T[src..src+l)`.
    RefA { src: usize, i: usize, l: usize },
    /// `T[i..i+l)` repeats `T[src..i)`.
    RefB { src: usize, i: usize, l: usize },
    /// `T[i..i+l)` truncates the disjoint `T[src..src+src_len)`.
    RefC { src: usize, src_len: usize, i: usize, l: usize },
    /// Some factor starting at `i` refers to `T[src..src+src_len)`.
    DRef { src: usize, src_len: usize, i: usize },
    /// `[src..src+src_len)` is a node interval.
    Q { src: usize, src_len: usize },
    /// The maximum depth of characters in `T[i..i+l)` is at least `d`.
    Depth { i: usize, l: usize, d: usize },
}

impl VarName {
    pub fn kind(&self) -> &'static str {
        match self {
            VarName::P { .. } => "p",
            VarName::F { .. } => "f",
            VarName::RefA { .. } => "refA",
            VarName::RefB { .. } => "refB",
            VarName::RefC { .. } => "refC",
            VarName::DRef { .. } => "dref",
            VarName::Q { .. } => "q",
            VarName::Depth { .. } => "depth",
        }
    }

    pub fn subscripts(&self) -> Vec<usize> {
        match *self {
            VarName::P { i } => vec![i],
            VarName::F { i, l } => vec![i, l],
            VarName::RefA { src, i, l } | VarName::RefB { src, i, l } => vec![src, i, l],
            VarName::RefC { src, src_len, i, l } => vec![src, src_len, i, l],
            VarName::DRef { src, src_len, i } => vec![src, src_len, i],
            VarName::Q { src, src_len } => vec![src, src_len],
            VarName::Depth { i, l, d } => vec![i, l, d],
        }
    }

    pub fn from_parts(kind: &str, subs: &[usize]) -> Option<VarName> {
        Some(match (kind, subs) {
            ("p", &[i]) => VarName::P { i },
            ("f", &[i, l]) => VarName::F { i, l },
            ("refA", &[src, i, l]) => VarName::RefA { src, i, l },
            ("refB", &[src, i, l]) => VarName::RefB { src, i, l },
            ("refC", &[src, src_len, i, l]) => VarName::RefC { src, src_len, i, l },
            ("dref", &[src, src_len, i]) => VarName::DRef { src, src_len, i },
            ("q", &[src, src_len]) => VarName::Q { src, src_len },
            ("depth", &[i, l, d]) => VarName::Depth { i, l, d },
            _ => return None,
        })
    }

    /// The factor `(i, l)` a reference variable types.
    pub fn typed_factor(&self) -> Option<(usize, usize)> {
        match *self {
            VarName::RefA { i, l, .. } | VarName::RefB { i, l, .. } | VarName::RefC { i, l, .. } => Some((i, l)),
            _ => None,
        }
    }

    /// The substring `(src, src_len)` the factor's depth must exceed.
    pub fn referenced(&self) -> Option<(usize, usize)> {
        match *self {
            VarName::RefA { src, l, .. } => Some((src, l)),
            VarName::RefB { src, i, .. } => Some((src, i - src)),
            VarName::RefC { src, src_len, .. } => Some((src, src_len)),
            _ => None,
        }
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subs: Vec<String> = self.subscripts().iter().map(usize::to_string).collect();
        write!(f, "{}({})", self.kind(), subs.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("the text is empty")]
    EmptyText,
    #[error("catalog line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("catalog does not match the text: {0}")]
    Mismatch(String),
}

/// Every variable of the encoding for one text, numbered densely in the
/// order p, f, refA, refB, refC, dref, q, depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableCatalog {
    text: Vec<char>,
    names: Vec<VarName>,
    index: HashMap<VarName, Var>,
}

impl VariableCatalog {
    pub fn build(text: &str) -> Result<Self, CatalogError> {
        let t: Vec<char> = text.chars().collect();
        let n = t.len();
        if n == 0 {
            return Err(CatalogError::EmptyText);
        }
        // 1-based substring equality and containment.
        let sub = |i: usize, l: usize| &t[i - 1..i - 1 + l];
        let eq = |a: usize, b: usize, l: usize| sub(a, l) == sub(b, l);
        let contains = |outer: usize, outer_len: usize, i: usize, l: usize| {
            sub(outer, outer_len).windows(l).any(|w| w == sub(i, l))
        };

        let mut names = Vec::new();
        names.extend((1..=n + 1).map(|i| VarName::P { i }));
        for i in 1..=n {
            names.extend((1..=n + 1 - i).map(|l| VarName::F { i, l }));
        }
        let mut refs_a = Vec::new();
        let mut refs_b = Vec::new();
        let mut refs_c = Vec::new();
        for i in 1..n {
            for l in 2..=n - i + 1 {
                for src in 1..=i.saturating_sub(l) {
                    if eq(src, i, l) {
                        refs_a.push(VarName::RefA { src, i, l });
                    }
                }
                for src in (i + 1).saturating_sub(l).max(1)..i {
                    if l % (i - src) == 0 && eq(src, i, l) {
                        refs_b.push(VarName::RefB { src, i, l });
                    }
                }
            }
        }
        for i in 1..=n.saturating_sub(2) {
            for l in 2..=n - i + 1 {
                for src in 1..=n - 2 {
                    for src_len in 2..=n - src + 1 {
                        let disjoint = i + l <= src || src + src_len <= i;
                        if disjoint && src_len >= l && contains(src, src_len, i, l) {
                            refs_c.push(VarName::RefC { src, src_len, i, l });
                        }
                    }
                }
            }
        }
        let mut drefs = BTreeSet::new();
        let mut qs = BTreeSet::new();
        for r in refs_a.iter().chain(&refs_b).chain(&refs_c) {
            let (src, src_len) = r.referenced().unwrap();
            let (i, l) = r.typed_factor().unwrap();
            drefs.insert(VarName::DRef { src, src_len, i });
            qs.insert(VarName::Q { src, src_len });
            if let VarName::RefB { .. } = r {
                qs.insert(VarName::Q { src, src_len: l + i - src });
            }
        }
        names.extend(refs_a);
        names.extend(refs_b);
        names.extend(refs_c);
        names.extend(drefs);
        names.extend(qs);
        for i in 1..=n {
            for l in 1..=n + 1 - i {
                names.extend((0..=n).map(|d| VarName::Depth { i, l, d }));
            }
        }
        let index = names.iter().enumerate().map(|(k, &name)| (name, Var(k as u32 + 1))).collect();
        Ok(VariableCatalog { text: t, names, index })
    }

    pub fn text(&self) -> String {
        self.text.iter().collect()
    }

    pub fn chars(&self) -> &[char] {
        &self.text
    }

    pub fn n(&self) -> usize {
        self.text.len()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &VarName) -> Option<Var> {
        self.index.get(name).copied()
    }

    /// `None` for variables outside the catalog (auxiliary ones).
    pub fn name(&self, var: Var) -> Option<VarName> {
        self.names.get(var.index().wrapping_sub(1)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Var, VarName)> + '_ {
        self.names.iter().enumerate().map(|(k, &name)| (Var(k as u32 + 1), name))
    }

    pub fn p(&self, i: usize) -> Var {
        self.var(VarName::P { i })
    }

    pub fn f(&self, i: usize, l: usize) -> Var {
        self.var(VarName::F { i, l })
    }

    pub fn depth(&self, i: usize, l: usize, d: usize) -> Var {
        self.var(VarName::Depth { i, l, d })
    }

    fn var(&self, name: VarName) -> Var {
        self.get(&name).unwrap_or_else(|| panic!("{name} is outside the catalog"))
    }

    /// Names of one kind, in catalog order.
    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = (Var, VarName)> + 'a {
        self.entries().filter(move |(_, name)| name.kind() == kind)
    }

    /// Sidecar listing the text and every variable, one per line.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::from("collage-catalog 1\ntext ");
        for b in self.text().bytes() {
            out.push_str(&format!("{b:02x}"));
        }
        out.push('\n');
        for (var, name) in self.entries() {
            out.push_str(&format!("var {} {}", var.0, name.kind()));
            for s in name.subscripts() {
                out.push_str(&format!(" {s}"));
            }
            out.push('\n');
        }
        out
    }

    /// Rebuilds the catalog from a sidecar and checks that the listed
    /// variables are exactly the ones the text produces.
    pub fn from_sidecar(src: &str) -> Result<Self, CatalogError> {
        let malformed = |line: usize, message: &str| CatalogError::Malformed { line, message: message.to_string() };
        let mut lines = src.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
        match lines.next() {
            Some((_, "collage-catalog 1")) => {}
            _ => return Err(malformed(1, "expected header `collage-catalog 1`")),
        }
        let (no, text_line) = lines.next().ok_or_else(|| malformed(2, "missing text line"))?;
        let hex = text_line.strip_prefix("text ").ok_or_else(|| malformed(no, "expected `text <hex>`"))?;
        if hex.len() % 2 != 0 {
            return Err(malformed(no, "odd number of hex digits"));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|k| u8::from_str_radix(&hex[k..k + 2], 16))
            .collect::<Result<Vec<u8>, _>>()
            .map_err(|_| malformed(no, "invalid hex digit"))?;
        let text = String::from_utf8(bytes).map_err(|_| malformed(no, "text is not UTF-8"))?;
        let catalog = VariableCatalog::build(&text)?;

        let mut listed = 0;
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            if parts.next() != Some("var") {
                return Err(malformed(no, "expected `var <id> <kind> <subscripts>`"));
            }
            let id: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(|| malformed(no, "bad id"))?;
            let kind = parts.next().ok_or_else(|| malformed(no, "missing kind"))?;
            let subs = parts.map(str::parse).collect::<Result<Vec<usize>, _>>().map_err(|_| malformed(no, "bad subscript"))?;
            let name = VarName::from_parts(kind, &subs).ok_or_else(|| malformed(no, "unknown variable shape"))?;
            if catalog.get(&name) != Some(Var(id)) {
                return Err(CatalogError::Mismatch(format!("var {id} = {name}")));
            }
            listed += 1;
        }
        if listed != catalog.len() {
            return Err(CatalogError::Mismatch(format!("{listed} variables listed, {} expected", catalog.len())));
        }
        Ok(catalog)
    }
}
