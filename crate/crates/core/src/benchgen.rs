//! Deterministic benchmark expressions.
//!
//! `res(m, n)` is the resultant of two generic univariate polynomials
//! `a_m x^m + ... + a_0` and `b_n x^n + ... + b_0`: the determinant of their
//! Sylvester matrix, a polynomial in the `m + n + 2` coefficient symbols.
//! Random polynomials with pinned seeds stand in for physics expressions.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::expr::{AtomId, AtomTable, Expression, Term};
use crate::mcts::rng_for;

/// Largest supported `m + n`; `res(7, 5)` sits at the limit.
pub const MAX_RESULTANT_SIZE: u32 = 12;

/// The `(m + n) x (m + n)` Sylvester matrix of the generic polynomials.
///
/// Row `r < n` holds `a_m ... a_0` starting at column `r`; row `n + r` for
/// `r < m` holds `b_n ... b_0` starting at column `r`.
#[derive(Debug, Clone)]
pub struct SylvesterMatrix {
    pub m: u32,
    pub n: u32,
    pub atoms: AtomTable,
    entries: Vec<Vec<Option<AtomId>>>,
}

impl SylvesterMatrix {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 || m + n > MAX_RESULTANT_SIZE {
            return Err(Error::InvalidParameter(format!(
                "resultant sizes must satisfy m, n >= 1 and m + n <= {MAX_RESULTANT_SIZE}, got ({m}, {n})"
            )));
        }
        let atoms = AtomTable::from_names(
            (0..=m)
                .map(|i| format!("a_{i}"))
                .chain((0..=n).map(|i| format!("b_{i}"))),
        );
        let a = |i: u32| atoms.lookup(&format!("a_{i}")).unwrap();
        let b = |i: u32| atoms.lookup(&format!("b_{i}")).unwrap();
        let size = (m + n) as usize;
        let mut entries = vec![vec![None; size]; size];
        for r in 0..n as usize {
            for k in 0..=m {
                entries[r][r + k as usize] = Some(a(m - k));
            }
        }
        for r in 0..m as usize {
            for k in 0..=n {
                entries[n as usize + r][r + k as usize] = Some(b(n - k));
            }
        }
        Ok(Self {
            m,
            n,
            atoms,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Option<AtomId> {
        self.entries[row][col]
    }

    /// Symbolic determinant by Laplace expansion along the rows, memoizing
    /// each minor on its set of remaining columns.
    pub fn determinant(&self) -> Expression {
        let size = self.size();
        let mut memo: HashMap<u32, Expression> = HashMap::new();
        self.minor(0, (1u32 << size) - 1, &mut memo)
    }

    fn minor(&self, row: usize, cols: u32, memo: &mut HashMap<u32, Expression>) -> Expression {
        if row == self.size() {
            return Expression::constant(self.atoms.clone(), 1);
        }
        if let Some(e) = memo.get(&cols) {
            return e.clone();
        }
        let mut acc = Expression::zero(self.atoms.clone());
        let mut position = 0;
        for col in 0..self.size() {
            if cols & (1 << col) == 0 {
                continue;
            }
            if let Some(atom) = self.entries[row][col] {
                let sub = self.minor(row + 1, cols & !(1 << col), memo);
                let mut term = sub.mul(&Expression::atom(self.atoms.clone(), atom));
                if position % 2 == 1 {
                    term = term.neg();
                }
                acc = acc.add(&term);
            }
            position += 1;
        }
        memo.insert(cols, acc.clone());
        acc
    }
}

/// `res(m, n)` expanded over the atoms `a_0..a_m, b_0..b_n`.
pub fn resultant_expr(m: u32, n: u32) -> Result<Expression> {
    Ok(SylvesterMatrix::new(m, n)?.determinant())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomExprParams {
    pub n_vars: u32,
    pub n_terms: u32,
    pub max_exponent: u32,
    /// Coefficients are drawn from `[-coeff_range, coeff_range] \ {0}`.
    pub coeff_range: u32,
    pub seed: u64,
}

impl RandomExprParams {
    /// Number of distinct non-constant monomials available.
    pub fn capacity(&self) -> u64 {
        (self.max_exponent as u64 + 1)
            .checked_pow(self.n_vars)
            .map_or(u64::MAX, |c| c - 1)
    }

    fn validate(&self) -> Result<()> {
        if self.n_vars == 0 || self.n_terms == 0 || self.max_exponent == 0 || self.coeff_range == 0 {
            return Err(Error::InvalidParameter(
                "random expression parameters must all be positive".into(),
            ));
        }
        if self.n_terms as u64 > self.capacity() {
            return Err(Error::CapacityExceeded {
                requested: self.n_terms as u64,
                capacity: self.capacity(),
            });
        }
        Ok(())
    }
}

/// `n_terms` distinct monomials over `x1..xN`, exponents uniform in
/// `[0, max_exponent]` (the all-zero monomial rejected), nonzero coefficients
/// uniform in `±coeff_range`.
pub fn random_expr(p: &RandomExprParams) -> Result<Expression> {
    p.validate()?;
    let atoms = AtomTable::from_names((1..=p.n_vars).map(|i| format!("x{i}")));
    let mut rng = rng_for(p.seed);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut terms = Vec::with_capacity(p.n_terms as usize);
    let range = p.coeff_range as i64;
    while terms.len() < p.n_terms as usize {
        let dense: Vec<u32> = (0..p.n_vars)
            .map(|_| rng.gen_range(0..=p.max_exponent))
            .collect();
        if dense.iter().all(|&e| e == 0) || !seen.insert(dense.clone()) {
            continue;
        }
        let mut c = rng.gen_range(-range..range);
        if c >= 0 {
            c += 1;
        }
        let mono = dense
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (AtomId(i as u32), e))
            .collect();
        terms.push(Term::new(BigInt::from(c), mono));
    }
    Ok(Expression::from_terms(atoms, terms))
}

/// Named random presets with pinned seeds.
pub fn preset(name: &str) -> Option<RandomExprParams> {
    match name {
        "hep-like-15" => Some(RandomExprParams {
            n_vars: 15,
            n_terms: 120,
            max_exponent: 2,
            coeff_range: 9,
            seed: 15,
        }),
        "hep-like-22" => Some(RandomExprParams {
            n_vars: 22,
            n_terms: 150,
            max_exponent: 2,
            coeff_range: 9,
            seed: 22,
        }),
        _ => None,
    }
}

pub const PRESETS: [&str; 2] = ["hep-like-15", "hep-like-22"];
