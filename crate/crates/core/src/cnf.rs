//! CNF formulas with clauses of two or three literals, DIMACS I/O and an
//! exhaustive satisfiability check.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest variable count accepted by [`brute_force_sat`].
pub const MAX_SAT_VARS: usize = 24;

/// A conjunction of clauses. Literals are nonzero integers in DIMACS
/// convention: `i` is `x_i`, `-i` is its negation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            if !(2..=3).contains(&c.len()) {
                return Err(Error::Unsupported(format!(
                    "clause {} has {} literals, expected 2 or 3",
                    j + 1,
                    c.len()
                )));
            }
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::Unsupported(format!(
                        "literal {lit} in clause {} is outside 1..={num_vars}",
                        j + 1
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Total number of literal occurrences, `Σ |C_j|`.
    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    /// Whether `assignment[i]` (value of `x_{i+1}`) satisfies every clause.
    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.num_vars {
            return Err(Error::shape(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.num_vars
            )));
        }
        Ok(self
            .clauses
            .iter()
            .all(|c| c.iter().any(|&lit| literal_value(lit, assignment))))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for lit in c {
                write!(out, "{lit} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }
}

fn literal_value(lit: i32, assignment: &[bool]) -> bool {
    let v = assignment[lit.unsigned_abs() as usize - 1];
    if lit > 0 {
        v
    } else {
        !v
    }
}

/// Parses DIMACS CNF. Comment lines start with `c`; clauses are
/// zero-terminated and may span lines; a `%` line ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut current_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        last_line = lineno;
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(lineno, "duplicate header"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(Error::parse(lineno, "expected `p cnf <vars> <clauses>`"));
            }
            let n = parts[2]
                .parse::<usize>()
                .map_err(|_| Error::parse(lineno, format!("bad variable count `{}`", parts[2])))?;
            let m = parts[3]
                .parse::<usize>()
                .map_err(|_| Error::parse(lineno, format!("bad clause count `{}`", parts[3])))?;
            if n > i32::MAX as usize {
                return Err(Error::parse(lineno, "variable count too large"));
            }
            header = Some((n, m, lineno));
            continue;
        }
        let Some((n, _, _)) = header else {
            return Err(Error::parse(lineno, "clause before `p cnf` header"));
        };
        for tok in line.split_whitespace() {
            let lit = tok
                .parse::<i32>()
                .map_err(|_| Error::parse(lineno, format!("bad literal `{tok}`")))?;
            if current.is_empty() {
                current_line = lineno;
            }
            if lit == 0 {
                if !(2..=3).contains(&current.len()) {
                    return Err(Error::parse(
                        current_line,
                        format!("clause has {} literals, expected 2 or 3", current.len()),
                    ));
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if lit.unsigned_abs() as usize > n {
                return Err(Error::parse(lineno, format!("literal {lit} outside 1..={n}")));
            }
            current.push(lit);
            if current.len() > 3 {
                return Err(Error::parse(lineno, "clause has more than 3 literals"));
            }
        }
    }

    let Some((n, m, header_line)) = header else {
        return Err(Error::parse(last_line.max(1), "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(Error::parse(current_line, "clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            header_line,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses).map_err(|e| Error::parse(header_line, e.to_string()))
}

/// Outcome of [`brute_force_sat`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SatResult {
    pub satisfiable: bool,
    /// First satisfying assignment in counting order (`x_1` most
    /// significant, all-false first).
    pub witness: Option<Vec<bool>>,
}

/// Decides satisfiability by trying all `2^n` assignments.
pub fn brute_force_sat(phi: &CnfFormula) -> Result<SatResult> {
    let n = phi.num_vars();
    if n > MAX_SAT_VARS {
        return Err(Error::Resource {
            cap: "max_sat_vars",
            limit: MAX_SAT_VARS as u128,
            required: n as u128,
        });
    }
    let mut assignment = vec![false; n];
    for bits in 0u32..(1u32 << n) {
        for (i, v) in assignment.iter_mut().enumerate() {
            *v = bits >> (n - 1 - i) & 1 == 1;
        }
        if phi.evaluate(&assignment)? {
            return Ok(SatResult {
                satisfiable: true,
                witness: Some(assignment),
            });
        }
    }
    Ok(SatResult {
        satisfiable: false,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "p cnf 3 3\n1 2 -3 0\n1 -2 3 0\n-1 2 -3 0\n";

    #[test]
    fn parses_three_clause_formula() {
        let phi = parse_dimacs(SAMPLE).unwrap();
        assert_eq!(phi.num_vars(), 3);
        assert_eq!(phi.num_clauses(), 3);
        assert_eq!(phi.clauses()[1], vec![1, -2, 3]);
        assert_eq!(phi.literal_count(), 9);
        assert_eq!(parse_dimacs(&phi.to_dimacs()).unwrap(), phi);
    }

    #[test]
    fn parses_comments_and_wrapped_clauses() {
        let text = "c example\np cnf 3 2\n1 2\n 3 0 -1\n-2 -3 0\n%\n0\n";
        let phi = parse_dimacs(text).unwrap();
        assert_eq!(phi.clauses(), &[vec![1, 2, 3], vec![-1, -2, -3]]);
    }

    fn parse_err_line(text: &str) -> usize {
        match parse_dimacs(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(parse_err_line("p cnf 2 1\n1 1 0 0\n"), 2);
        assert_eq!(parse_err_line("p cnf 2 1\n1 2 -1 2 0\n"), 2);
        assert_eq!(parse_err_line("p cnf 2 1\n\n1 3 0\n"), 3);
        assert_eq!(parse_err_line("c hi\n1 2 0\n"), 2);
        assert_eq!(parse_err_line("p cnf x 1\n"), 1);
        assert_eq!(parse_err_line("p dnf 2 1\n1 2 0\n"), 1);
        assert_eq!(parse_err_line("p cnf 2 2\n1 2 0\n"), 1);
        assert_eq!(parse_err_line("p cnf 2 1\n1 2\n"), 2);
        assert_eq!(parse_err_line("p cnf 2 1\n1 0\n"), 2);
        assert_eq!(parse_err_line("p cnf 2 1\n1 a 0\n"), 2);
    }

    #[test]
    fn constructor_validates() {
        assert!(CnfFormula::new(2, vec![vec![1, 2, -2, 1]]).is_err());
        assert!(CnfFormula::new(2, vec![vec![1, 3]]).is_err());
        assert!(CnfFormula::new(2, vec![vec![1, 0]]).is_err());
        assert!(CnfFormula::new(2, vec![vec![1, -2]]).is_ok());
    }

    /// Truth table built from binary strings rather than bit shifts.
    fn oracle_sat(n: usize, clauses: &[Vec<i32>]) -> bool {
        (0..1usize << n).any(|mask| {
            let bits: Vec<char> = format!("{mask:0width$b}", width = n).chars().collect();
            clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let on = bits[l.unsigned_abs() as usize - 1] == '1';
                    (l > 0) == on
                })
            })
        })
    }

    #[test]
    fn sat_examples() {
        let phi = parse_dimacs(SAMPLE).unwrap();
        let r = brute_force_sat(&phi).unwrap();
        assert!(r.satisfiable);
        assert!(phi.evaluate(r.witness.as_ref().unwrap()).unwrap());
        assert!(phi.evaluate(&[true, true, false]).unwrap());

        let unsat = CnfFormula::new(2, vec![vec![1, 2], vec![1, -2], vec![-1, 2], vec![-1, -2]]).unwrap();
        assert_eq!(
            brute_force_sat(&unsat).unwrap(),
            SatResult {
                satisfiable: false,
                witness: None
            }
        );
        let single = CnfFormula::new(3, vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(brute_force_sat(&single).unwrap().witness, Some(vec![false, false, true]));
    }

    #[test]
    fn sat_matches_truth_table_on_three_clause_formulas() {
        let mut lits = Vec::new();
        for a in [1, -1] {
            for b in [2, -2] {
                for c in [3, -3] {
                    lits.push(vec![a, b, c]);
                }
                lits.push(vec![a, b]);
            }
        }
        for x in &lits {
            for y in &lits {
                for z in &lits {
                    let clauses = vec![x.clone(), y.clone(), z.clone()];
                    let phi = CnfFormula::new(3, clauses.clone()).unwrap();
                    assert_eq!(brute_force_sat(&phi).unwrap().satisfiable, oracle_sat(3, &clauses));
                }
            }
        }
    }

    #[test]
    fn sat_cap() {
        let phi = CnfFormula::new(25, vec![vec![1, 25]]).unwrap();
        assert!(brute_force_sat(&phi).unwrap_err().is_resource());
    }
}
