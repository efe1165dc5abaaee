use std::fmt;
use std::ops::Not;

/// A 1-based propositional variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }
}

/// A literal in DIMACS convention: `v` or `-v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(v: i32) -> Lit {
        assert_ne!(v, 0, "0 is not a literal");
        Lit(v)
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Truth value under `values`, indexed by variable (slot 0 unused).
    pub fn eval(self, values: &[bool]) -> bool {
        values[self.var().index()] == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Clause = Vec<Lit>;

/// Constraint family a hard clause belongs to, used for diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `p_1` and `p_{n+1}`.
    Endpoints,
    /// A factor `T[i..i+l)` exists iff `i` and `i+l` are consecutive starts.
    FactorBoundaries,
    /// Factors longer than one with no candidate reference.
    NoCandidate,
    /// A long factor has a reference, and a reference implies its factor.
    FactorReference,
    /// At most one reference per factor.
    AtMostOneReference,
    /// `dref` collects references by referenced substring and factor start.
    ReferenceSummary,
    /// `q` marks intervals that are nodes.
    IntervalSummary,
    /// Node intervals start at a factor start.
    IntervalStart,
    /// Node intervals end at a factor start.
    IntervalEnd,
    /// A single repetition-tail factor is never a node interval.
    RepeatTail,
    /// Node intervals do not cross.
    Crossing,
    /// Every character has depth at least 0.
    DepthBase,
    /// Depth indicators are downward closed.
    DepthMonotone,
    /// Characters of one factor share their depth.
    DepthFactor,
    /// Substring depth is the maximum character depth.
    DepthMax,
    /// A factor is deeper than what it refers to.
    DepthReference,
    /// Referenced substrings stay below the largest depth.
    DepthCeiling,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Endpoints => "endpoints",
            Family::FactorBoundaries => "factor-boundaries",
            Family::NoCandidate => "no-candidate",
            Family::FactorReference => "factor-reference",
            Family::AtMostOneReference => "at-most-one-reference",
            Family::ReferenceSummary => "reference-summary",
            Family::IntervalSummary => "interval-summary",
            Family::IntervalStart => "interval-start",
            Family::IntervalEnd => "interval-end",
            Family::RepeatTail => "repeat-tail",
            Family::Crossing => "crossing",
            Family::DepthBase => "depth-base",
            Family::DepthMonotone => "depth-monotone",
            Family::DepthFactor => "depth-factor",
            Family::DepthMax => "depth-max",
            Family::DepthReference => "depth-reference",
            Family::DepthCeiling => "depth-ceiling",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Hard and unit-weight soft clauses over `num_vars` variables, with a
/// family tag per hard clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Formula {
    pub num_vars: u32,
    pub hard: Vec<Clause>,
    pub families: Vec<Family>,
    pub soft: Vec<Clause>,
}

impl Formula {
    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        Var(self.num_vars)
    }

    pub fn add_hard(&mut self, family: Family, clause: Clause) {
        self.hard.push(clause);
        self.families.push(family);
    }

    pub fn add_soft(&mut self, clause: Clause) {
        self.soft.push(clause);
    }

    pub fn clause_count(&self) -> usize {
        self.hard.len() + self.soft.len()
    }

    /// First hard clause falsified by `values` (indexed by variable).
    pub fn first_violation(&self, values: &[bool]) -> Option<(usize, Family)> {
        self.hard
            .iter()
            .position(|c| !c.iter().any(|l| l.eval(values)))
            .map(|idx| (idx, self.families[idx]))
    }

    /// Number of soft clauses falsified by `values`.
    pub fn cost(&self, values: &[bool]) -> usize {
        self.soft.iter().filter(|c| !c.iter().any(|l| l.eval(values))).count()
    }
}

/// Sequential-counter at-most-one over `lits`: `3k - 4` clauses and
/// `k - 1` fresh variables for `k >= 2` literals.
pub fn at_most_one(formula: &mut Formula, family: Family, lits: &[Lit]) -> Vec<Var> {
    let k = lits.len();
    if k < 2 {
        return Vec::new();
    }
    let s: Vec<Var> = (0..k - 1).map(|_| formula.new_var()).collect();
    formula.add_hard(family, vec![!lits[0], s[0].pos()]);
    for i in 1..k - 1 {
        formula.add_hard(family, vec![!lits[i], s[i].pos()]);
        formula.add_hard(family, vec![s[i - 1].neg(), s[i].pos()]);
        formula.add_hard(family, vec![!lits[i], s[i - 1].neg()]);
    }
    formula.add_hard(family, vec![!lits[k - 1], s[k - 2].neg()]);
    s
}
