//! Finite partial application tables and the exhaustive pca search.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Combinatory, Model};
use crate::outcome::{Fuel, Halt, Step};

pub const MAX_SEARCH_SIZE: usize = 3;

/// `n × n` table; `entries[a * n + b]` is `a·b` when defined.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteTable {
    pub n: usize,
    pub entries: Vec<Option<usize>>,
    pub k: usize,
    pub s: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("missing `k=<i> s=<j>` header")]
    Header,
    #[error("row {0}: expected {1} entries")]
    RowWidth(usize, usize),
    #[error("expected {0} rows, found {1}")]
    RowCount(usize, usize),
    #[error("entry `{0}` is not `.` or an index below {1}")]
    Entry(String, usize),
    #[error("combinator index out of range")]
    Designation,
    #[error("search is limited to n <= {MAX_SEARCH_SIZE}, got {0}")]
    TooLarge(usize),
}

impl FiniteTable {
    pub fn new(n: usize, entries: Vec<Option<usize>>, k: usize, s: usize) -> Result<Self, TableError> {
        if entries.len() != n * n {
            return Err(TableError::RowCount(n, entries.len() / n.max(1)));
        }
        if k >= n || s >= n {
            return Err(TableError::Designation);
        }
        if let Some(bad) = entries.iter().flatten().find(|&&e| e >= n) {
            return Err(TableError::Entry(bad.to_string(), n));
        }
        Ok(FiniteTable { n, entries, k, s })
    }

    pub fn get(&self, a: usize, b: usize) -> Option<usize> {
        self.entries[a * self.n + b]
    }
}

impl fmt::Display for FiniteTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k={} s={}", self.k, self.s)?;
        for row in self.entries.chunks(self.n) {
            let cells: Vec<String> = row.iter().map(|e| e.map_or(".".to_string(), |v| v.to_string())).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for FiniteTable {
    type Err = TableError;

    fn from_str(src: &str) -> Result<Self, TableError> {
        let mut lines = src.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(TableError::Header)?;
        let mut k = None;
        let mut s = None;
        for word in header.split_whitespace() {
            match word.split_once('=') {
                Some(("k", v)) => k = v.parse::<usize>().ok(),
                Some(("s", v)) => s = v.parse::<usize>().ok(),
                _ => return Err(TableError::Header),
            }
        }
        let (k, s) = k.zip(s).ok_or(TableError::Header)?;
        let rows: Vec<&str> = lines.collect();
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            let cells: Vec<&str> = row.split_whitespace().collect();
            if cells.len() != n {
                return Err(TableError::RowWidth(r, n));
            }
            for c in cells {
                entries.push(match c {
                    "." => None,
                    v => Some(v.parse::<usize>().map_err(|_| TableError::Entry(v.to_string(), n))?),
                });
            }
        }
        FiniteTable::new(n, entries, k, s)
    }
}

impl Model for FiniteTable {
    type Elem = usize;

    fn apply(&self, f: &usize, a: &usize, fuel: &mut Fuel) -> Step<usize> {
        fuel.tick()?;
        self.get(*f, *a).ok_or(Halt::Divergent)
    }

    fn render(&self, e: &usize) -> String {
        e.to_string()
    }

    fn name(&self) -> &str {
        "finite-table"
    }
}

impl Combinatory for FiniteTable {
    fn k(&self) -> usize {
        self.k
    }

    fn s(&self) -> usize {
        self.s
    }
}

/// First violated combinator clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub clause: &'static str,
    pub triple: (usize, usize, usize),
}

fn app2(t: &FiniteTable, a: Option<usize>, b: Option<usize>) -> Option<usize> {
    t.get(a?, b?)
}

/// Checks `k a b = a`, `s a b ↓` and `s a b c ≃ a c (b c)` for all triples.
pub fn check_pas_axioms(t: &FiniteTable) -> Result<(), AxiomViolation> {
    let n = t.n;
    for a in 0..n {
        for b in 0..n {
            if app2(t, t.get(t.k, a), Some(b)) != Some(a) {
                return Err(AxiomViolation { clause: "k a b = a", triple: (a, b, 0) });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let sab = app2(t, t.get(t.s, a), Some(b));
            if sab.is_none() {
                return Err(AxiomViolation { clause: "s a b defined", triple: (a, b, 0) });
            }
            for c in 0..n {
                let lhs = app2(t, sab, Some(c));
                let rhs = app2(t, t.get(a, c), t.get(b, c));
                if lhs != rhs {
                    return Err(AxiomViolation { clause: "s a b c = a c (b c)", triple: (a, b, c) });
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub structures_examined: u64,
    pub solutions: Vec<FiniteTable>,
}

/// Enumerates every partial table of size `n` with every `(k, s)` choice.
pub fn search_finite_pca(n: usize) -> Result<SearchReport, TableError> {
    if n > MAX_SEARCH_SIZE {
        return Err(TableError::TooLarge(n));
    }
    let cells = n * n;
    let mut digits = vec![0usize; cells];
    let mut examined = 0u64;
    let mut solutions = Vec::new();
    loop {
        let entries: Vec<Option<usize>> = digits.iter().map(|&d| d.checked_sub(1)).collect();
        for k in 0..n {
            // k must be total with constant rows `k a`.
            if (0..n).any(|a| entries[k * n + a].is_none()) {
                examined += n as u64;
                continue;
            }
            for s in 0..n {
                examined += 1;
                let t = FiniteTable { n, entries: entries.clone(), k, s };
                if check_pas_axioms(&t).is_ok() {
                    solutions.push(t);
                }
            }
        }
        // odometer over base n+1 digits
        let mut i = 0;
        loop {
            if i == cells {
                return Ok(SearchReport { n, structures_examined: examined, solutions });
            }
            digits[i] += 1;
            if digits[i] <= n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_pca() {
        let t: FiniteTable = "k=0 s=0\n0\n".parse().unwrap();
        assert_eq!(check_pas_axioms(&t), Ok(()));
    }

    #[test]
    fn two_points_with_missing_s_entries() {
        let t: FiniteTable = "k=0 s=1\n0 1\n. .\n".parse().unwrap();
        let v = check_pas_axioms(&t).unwrap_err();
        assert_eq!(v.clause, "k a b = a");
        let t: FiniteTable = "k=0 s=1\n0 0\n. .\n".parse().unwrap();
        assert!(check_pas_axioms(&t).is_err());
    }

    #[test]
    fn text_round_trip() {
        let t = FiniteTable::new(2, vec![Some(0), None, Some(1), Some(1)], 0, 1).unwrap();
        let back: FiniteTable = t.to_string().parse().unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert_eq!("0\n".parse::<FiniteTable>(), Err(TableError::Header));
        assert_eq!("k=0 s=0\n0 1\n".parse::<FiniteTable>(), Err(TableError::RowWidth(0, 1)));
        assert!("k=0 s=0\n5\n".parse::<FiniteTable>().is_err());
        assert_eq!("k=3 s=0\n0\n".parse::<FiniteTable>(), Err(TableError::Designation));
    }

    #[test]
    fn search_guard() {
        assert_eq!(search_finite_pca(4).unwrap_err(), TableError::TooLarge(4));
    }

    #[test]
    fn search_sizes() {
        let r1 = search_finite_pca(1).unwrap();
        assert_eq!(r1.solutions, vec![FiniteTable { n: 1, entries: vec![Some(0)], k: 0, s: 0 }]);
        assert!(search_finite_pca(2).unwrap().solutions.is_empty());
    }
}
