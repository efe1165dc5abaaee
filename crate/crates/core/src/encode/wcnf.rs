use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::cnf::{Clause, Formula, Lit};
use super::encoder::MaxSatInstance;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WcnfFormat {
    /// `p wcnf V C top` header, hard clauses weighted `top`.
    #[default]
    Legacy,
    /// No header, hard clauses prefixed with `h`.
    New,
}

impl FromStr for WcnfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "legacy" => Ok(WcnfFormat::Legacy),
            "new" => Ok(WcnfFormat::New),
            other => Err(format!("unknown WCNF format `{other}` (expected legacy or new)")),
        }
    }
}

/// Serializes the instance. Output depends only on the text and format.
pub fn write_wcnf(inst: &MaxSatInstance, format: WcnfFormat) -> String {
    let mut out = String::new();
    out.push_str("c smallest internal collage system\n");
    let _ = writeln!(out, "c text {}", inst.catalog.text().escape_default());
    for (var, name) in inst.catalog.entries() {
        let _ = writeln!(out, "c var {} = {}", var.0, name);
    }
    for (var, i, l) in &inst.aux_owner {
        let _ = writeln!(out, "c var {} = aux(f({},{}))", var.0, i, l);
    }
    write_formula(&mut out, &inst.formula, format);
    out
}

pub fn write_formula(out: &mut String, fm: &Formula, format: WcnfFormat) {
    let top = fm.soft.len() + 1;
    let hard_prefix = match format {
        WcnfFormat::Legacy => {
            let _ = writeln!(out, "p wcnf {} {} {}", fm.num_vars, fm.clause_count(), top);
            top.to_string()
        }
        WcnfFormat::New => "h".to_string(),
    };
    let mut line = |prefix: &str, clause: &Clause| {
        out.push_str(prefix);
        for lit in clause {
            let _ = write!(out, " {lit}");
        }
        out.push_str(" 0\n");
    };
    for c in &fm.hard {
        line(&hard_prefix, c);
    }
    for c in &fm.soft {
        line("1", c);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WcnfError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Weighted clauses as read from a file; hard clauses carry no weight.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedFormula {
    pub num_vars: u32,
    pub hard: Vec<Clause>,
    pub soft: Vec<(u64, Clause)>,
}

/// Reads either WCNF dialect.
pub fn read_wcnf(src: &str) -> Result<WeightedFormula, WcnfError> {
    let err = |line: usize, message: &str| WcnfError::Syntax { line, message: message.to_string() };
    let mut wf = WeightedFormula::default();
    let mut top: Option<u64> = None;
    let mut declared_vars: Option<u32> = None;
    for (idx, raw) in src.lines().enumerate() {
        let no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        if line.starts_with('p') {
            let fields: Vec<&str> = tokens.collect();
            if fields.len() < 4 || fields[1] != "wcnf" {
                return Err(err(no, "expected `p wcnf <vars> <clauses> [<top>]`"));
            }
            declared_vars = Some(fields[2].parse().map_err(|_| err(no, "bad variable count"))?);
            if let Some(t) = fields.get(4) {
                top = Some(t.parse().map_err(|_| err(no, "bad top weight"))?);
            }
            continue;
        }
        let head = tokens.next().unwrap();
        let weight = if head == "h" {
            None
        } else {
            let w: u64 = head.parse().map_err(|_| err(no, "expected a weight or `h`"))?;
            if top.is_some_and(|t| w >= t) {
                None
            } else {
                Some(w)
            }
        };
        let mut clause = Vec::new();
        let mut closed = false;
        for tok in tokens {
            let v: i32 = tok.parse().map_err(|_| err(no, "bad literal"))?;
            if v == 0 {
                closed = true;
                break;
            }
            wf.num_vars = wf.num_vars.max(v.unsigned_abs());
            clause.push(Lit::from_dimacs(v));
        }
        if !closed {
            return Err(err(no, "clause not terminated by 0"));
        }
        match weight {
            None => wf.hard.push(clause),
            Some(w) => wf.soft.push((w, clause)),
        }
    }
    if let Some(v) = declared_vars {
        wf.num_vars = wf.num_vars.max(v);
    }
    Ok(wf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::cnf::{Family, Var};
    use crate::encode::encode;

    fn tiny() -> Formula {
        let mut fm = Formula { num_vars: 2, ..Formula::default() };
        fm.add_hard(Family::Endpoints, vec![Var(1).pos(), Var(2).neg()]);
        fm
    }

    #[test]
    fn legacy_header_uses_soft_count_plus_one() {
        let mut out = String::new();
        write_formula(&mut out, &tiny(), WcnfFormat::Legacy);
        assert_eq!(out, "p wcnf 2 1 1\n1 1 -2 0\n");
    }

    #[test]
    fn new_format_prefixes_hard_clauses() {
        let mut out = String::new();
        write_formula(&mut out, &tiny(), WcnfFormat::New);
        assert_eq!(out, "h 1 -2 0\n");
    }

    #[test]
    fn output_is_deterministic_and_annotated() {
        let a = write_wcnf(&encode("ab").unwrap(), WcnfFormat::Legacy);
        let b = write_wcnf(&encode("ab").unwrap(), WcnfFormat::Legacy);
        assert_eq!(a, b);
        assert!(a.contains("c var 1 = p(1)\n"));
        assert!(a.contains("c var 5 = f(1,2)\n"));
    }

    #[test]
    fn both_dialects_read_back() {
        let inst = encode("aab").unwrap();
        for format in [WcnfFormat::Legacy, WcnfFormat::New] {
            let wf = read_wcnf(&write_wcnf(&inst, format)).unwrap();
            assert_eq!(wf.hard, inst.formula.hard);
            assert_eq!(wf.soft, inst.formula.soft.iter().map(|c| (1, c.clone())).collect::<Vec<_>>());
            assert_eq!(wf.num_vars, inst.num_vars());
        }
    }

    #[test]
    fn rejects_unterminated_clause() {
        assert!(read_wcnf("h 1 2\n").is_err());
        assert!(read_wcnf("x 1 0\n").is_err());
    }
}
