//! CNF formulas: DIMACS reading and writing, the exact-3-literal check and
//! a brute-force satisfiability oracle.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

/// Largest variable count [`brute_force_sat`] accepts.
pub const BRUTE_FORCE_VAR_CAP: usize = 24;

/// Signed, non-zero variable index: `3` is `x3`, `-3` is `¬x3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(i64);

impl Literal {
    pub fn new(value: i64) -> Option<Self> {
        (value != 0).then_some(Literal(value))
    }

    pub fn positive(var: usize) -> Self {
        Literal(var as i64)
    }

    pub fn negative(var: usize) -> Self {
        Literal(-(var as i64))
    }

    /// 1-based variable index.
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn value(self) -> i64 {
        self.0
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        Clause { literals }
    }

    /// Clause from DIMACS-style signed integers; panics on zero.
    pub fn of(values: &[i64]) -> Self {
        Clause::new(
            values
                .iter()
                .map(|v| Literal::new(*v).expect("non-zero literal"))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Self {
        CnfFormula { num_vars, clauses }
    }
}

/// Truth values of `x1..xn` (index 0 holds `x1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn all_false(n: usize) -> Self {
        Assignment(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value of the 1-based variable `var`.
    pub fn get(&self, var: usize) -> bool {
        self.0[var - 1]
    }

    pub fn literal_true(&self, lit: Literal) -> bool {
        self.get(lit.var()) == lit.is_positive()
    }

    pub fn satisfies_clause(&self, clause: &Clause) -> bool {
        clause.literals.iter().any(|l| self.literal_true(*l))
    }

    pub fn satisfies(&self, formula: &CnfFormula) -> bool {
        formula.clauses.iter().all(|c| self.satisfies_clause(c))
    }

    /// Assignment number `index` in lexicographic order (x1 most
    /// significant, false before true).
    pub fn from_index(n: usize, index: u64) -> Self {
        Assignment((1..=n).map(|v| (index >> (n - v)) & 1 == 1).collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            f.write_str(if *v { "T" } else { "F" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsErrorKind {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("malformed header `{0}`")]
    BadHeader(String),
    #[error("second header")]
    DuplicateHeader,
    #[error("invalid token `{0}`")]
    BadToken(String),
    #[error("literal {literal} out of range 1..={num_vars}")]
    LiteralOutOfRange { literal: i64, num_vars: usize },
    #[error("clause not terminated by 0")]
    Unterminated,
    #[error("header declares {declared} clauses, found {found}")]
    CountMismatch { declared: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct DimacsError {
    pub line: usize,
    pub kind: DimacsErrorKind,
}

fn fail<T>(line: usize, kind: DimacsErrorKind) -> Result<T, DimacsError> {
    Err(DimacsError { line, kind })
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize), DimacsError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    match parts.as_slice() {
        ["p", "cnf", n, m] => match (n.parse::<usize>(), m.parse::<usize>()) {
            (Ok(n), Ok(m)) => Ok((n, m)),
            _ => fail(line_no, DimacsErrorKind::BadHeader(line.to_string())),
        },
        _ => fail(line_no, DimacsErrorKind::BadHeader(line.to_string())),
    }
}

/// Parses DIMACS CNF. Clauses may span lines; a line starting with `%` ends
/// the clause section.
pub fn parse_dimacs(bytes: &[u8]) -> Result<CnfFormula, DimacsError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|b| **b == b'\n')
            .count()
            + 1;
        DimacsError {
            line,
            kind: DimacsErrorKind::NotUtf8,
        }
    })?;
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut pending_line = 0;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return fail(line_no, DimacsErrorKind::DuplicateHeader);
            }
            header = Some(parse_header(line, line_no)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return fail(line_no, DimacsErrorKind::MissingHeader);
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError {
                line: line_no,
                kind: DimacsErrorKind::BadToken(token.to_string()),
            })?;
            match Literal::new(value) {
                None => clauses.push(Clause::new(std::mem::take(&mut pending))),
                Some(lit) => {
                    if lit.var() > num_vars {
                        return fail(
                            line_no,
                            DimacsErrorKind::LiteralOutOfRange {
                                literal: value,
                                num_vars,
                            },
                        );
                    }
                    if pending.is_empty() {
                        pending_line = line_no;
                    }
                    pending.push(lit);
                }
            }
        }
    }
    let Some((num_vars, declared)) = header else {
        return fail(last_line.max(1), DimacsErrorKind::MissingHeader);
    };
    if !pending.is_empty() {
        return fail(pending_line, DimacsErrorKind::Unterminated);
    }
    if clauses.len() != declared {
        return fail(
            last_line.max(1),
            DimacsErrorKind::CountMismatch {
                declared,
                found: clauses.len(),
            },
        );
    }
    Ok(CnfFormula { num_vars, clauses })
}

/// Canonical DIMACS text: regenerated header, one clause per line.
pub fn serialize_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars, formula.clauses.len());
    for clause in &formula.clauses {
        for lit in &clause.literals {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sat3Error {
    #[error("clause {index} has {width} literals, expected exactly 3")]
    Width { index: usize, width: usize },
    #[error("clause {index} repeats variable x{var}")]
    RepeatedVariable { index: usize, var: usize },
    #[error("clause {index} mentions x{var} beyond the {num_vars} declared variables")]
    OutOfRange {
        index: usize,
        var: usize,
        num_vars: usize,
    },
}

/// Accepts iff every clause has exactly three distinct variables.
/// Clause indices in errors are 0-based.
pub fn validate_3sat(formula: &CnfFormula) -> Result<(), Sat3Error> {
    for (index, clause) in formula.clauses.iter().enumerate() {
        if clause.literals.len() != 3 {
            return Err(Sat3Error::Width {
                index,
                width: clause.literals.len(),
            });
        }
        let vars: Vec<usize> = clause.literals.iter().map(|l| l.var()).collect();
        for (i, v) in vars.iter().enumerate() {
            if *v == 0 || *v > formula.num_vars {
                return Err(Sat3Error::OutOfRange {
                    index,
                    var: *v,
                    num_vars: formula.num_vars,
                });
            }
            if vars[..i].contains(v) {
                return Err(Sat3Error::RepeatedVariable { index, var: *v });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("{num_vars} variables exceed the brute-force cap of {cap}")]
    TooManyVariables { num_vars: usize, cap: usize },
    #[error("literal x{var} beyond the {num_vars} declared variables")]
    OutOfRange { var: usize, num_vars: usize },
}

/// First satisfying assignment in lexicographic order (x1 most significant,
/// false before true), or `None` if the formula is unsatisfiable.
pub fn brute_force_sat(formula: &CnfFormula) -> Result<Option<Assignment>, SatError> {
    let n = formula.num_vars;
    if n > BRUTE_FORCE_VAR_CAP {
        return Err(SatError::TooManyVariables {
            num_vars: n,
            cap: BRUTE_FORCE_VAR_CAP,
        });
    }
    // Bit (n - v) of an index holds x_v.
    let mut masks = Vec::with_capacity(formula.clauses.len());
    for clause in &formula.clauses {
        let (mut pos, mut neg) = (0u64, 0u64);
        for lit in &clause.literals {
            if lit.var() > n {
                return Err(SatError::OutOfRange {
                    var: lit.var(),
                    num_vars: n,
                });
            }
            let bit = 1u64 << (n - lit.var());
            if lit.is_positive() {
                pos |= bit;
            } else {
                neg |= bit;
            }
        }
        masks.push((pos, neg));
    }
    let satisfied = |index: u64| masks.iter().all(|(p, q)| index & p != 0 || !index & q != 0);
    let found = (0..1u64 << n).into_par_iter().find_first(|i| satisfied(*i));
    Ok(found.map(|i| {
        let a = Assignment::from_index(n, i);
        debug_assert!(a.satisfies(formula));
        a
    }))
}
