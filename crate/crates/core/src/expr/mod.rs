//! Sparse multivariate polynomials with integer coefficients over interned atoms.
//!
//! An atom is either a plain identifier (`x`, `a_3`) or an opaque function
//! call (`sin(x)`), which is treated as an indivisible symbol. Expressions are
//! kept canonical: like terms merged, zero terms dropped, terms ordered
//! graded-lexicographically by atom id (highest degree first).

mod parse;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::modp::{self, Assignment};

/// Index of an atom in an [`AtomTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomId(pub u32);

impl AtomId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interning table mapping atom text to ids in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
    index: HashMap<String, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut table = Self::new();
        for n in names {
            table.intern(n.into());
        }
        table
    }

    pub fn intern(&mut self, text: impl Into<String>) -> AtomId {
        let text = text.into();
        debug_assert!(!text.is_empty(), "atom text must be non-empty");
        if let Some(&id) = self.index.get(&text) {
            return id;
        }
        let id = AtomId(self.names.len() as u32);
        self.index.insert(text.clone(), id);
        self.names.push(text);
        id
    }

    pub fn lookup(&self, text: &str) -> Option<AtomId> {
        self.index.get(text).copied()
    }

    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (AtomId(i as u32), n.as_str()))
    }
}

/// A sparse exponent vector: `(atom, exponent)` pairs sorted by atom, exponents > 0.
pub type Monomial = Vec<(AtomId, u32)>;

/// Multiplies two sparse monomials.
pub fn monomial_mul(a: &[(AtomId, u32)], b: &[(AtomId, u32)]) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Exponent of `atom` in a sparse monomial (0 when absent).
#[inline]
pub fn exponent_of(m: &[(AtomId, u32)], atom: AtomId) -> u32 {
    m.iter()
        .find(|&&(id, _)| id == atom)
        .map_or(0, |&(_, e)| e)
}

fn degree(m: &[(AtomId, u32)]) -> u64 {
    m.iter().map(|&(_, e)| e as u64).sum()
}

/// Lexicographic comparison of dense exponent vectors, atom 0 most significant.
fn lex_cmp(a: &[(AtomId, u32)], b: &[(AtomId, u32)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.0.cmp(&y.0) {
            // `a` has a positive exponent where `b` has zero
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
            Ordering::Equal => match x.1.cmp(&y.1) {
                Ordering::Equal => {}
                o => return o,
            },
        }
    }
    a.len().cmp(&b.len())
}

/// Graded-lex order with the highest-degree monomial first.
pub fn grlex_desc(a: &[(AtomId, u32)], b: &[(AtomId, u32)]) -> Ordering {
    degree(b)
        .cmp(&degree(a))
        .then_with(|| lex_cmp(b, a))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: BigInt,
    pub exponents: Monomial,
}

impl Term {
    pub fn new(coeff: impl Into<BigInt>, exponents: Monomial) -> Self {
        Self {
            coeff: coeff.into(),
            exponents,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponent_of(&self, atom: AtomId) -> u32 {
        exponent_of(&self.exponents, atom)
    }

    /// Multiplications needed to evaluate this term on its own.
    pub fn naive_mul(&self) -> u64 {
        if self.is_constant() {
            return 0;
        }
        let unit = self.coeff.abs().is_one();
        degree(&self.exponents) - 1 + u64::from(!unit)
    }
}

/// Multiplication and addition counts of an evaluation strategy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpCount {
    pub mul: u64,
    pub add: u64,
}

impl OpCount {
    pub fn new(mul: u64, add: u64) -> Self {
        Self { mul, add }
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.mul + self.add
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount::new(self.mul + rhs.mul, self.add + rhs.add)
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.mul += rhs.mul;
        self.add += rhs.add;
    }
}

impl fmt::Display for OpCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mul + {} add = {}", self.mul, self.add, self.total())
    }
}

/// A canonical polynomial over the atoms of its own [`AtomTable`].
///
/// Equality compares the polynomials by atom *text*, so two expressions that
/// interned the same atoms in a different order still compare equal.
#[derive(Debug, Clone)]
pub struct Expression {
    atoms: AtomTable,
    terms: Vec<Term>,
}

impl Expression {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse::parse(text, AtomTable::new())
    }

    /// Parses with a pre-seeded atom table, so that known atoms keep their ids.
    pub fn parse_with_atoms(text: &str, atoms: AtomTable) -> Result<Self, ParseError> {
        parse::parse(text, atoms)
    }

    /// Builds a canonical expression, merging like terms and dropping zeros.
    pub fn from_terms(atoms: AtomTable, terms: impl IntoIterator<Item = Term>) -> Self {
        let mut merged: HashMap<Monomial, BigInt> = HashMap::new();
        for t in terms {
            *merged.entry(t.exponents).or_default() += t.coeff;
        }
        let mut terms: Vec<Term> = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| Term::new(c, m))
            .collect();
        terms.sort_by(|a, b| grlex_desc(&a.exponents, &b.exponents));
        Self { atoms, terms }
    }

    pub fn zero(atoms: AtomTable) -> Self {
        Self {
            atoms,
            terms: Vec::new(),
        }
    }

    pub fn constant(atoms: AtomTable, c: impl Into<BigInt>) -> Self {
        Self::from_terms(atoms, [Term::new(c, Vec::new())])
    }

    /// The single-term expression `atom`.
    pub fn atom(atoms: AtomTable, atom: AtomId) -> Self {
        Self::from_terms(atoms, [Term::new(1, vec![(atom, 1)])])
    }

    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn name(&self, atom: AtomId) -> &str {
        self.atoms.name(atom)
    }

    /// Atoms that occur with a positive exponent, in id order.
    pub fn variables(&self) -> Vec<AtomId> {
        let mut seen = vec![false; self.atoms.len()];
        for t in &self.terms {
            for &(id, _) in &t.exponents {
                seen[id.index()] = true;
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| AtomId(i as u32))
            .collect()
    }

    /// Cost of evaluating the expanded sum of products term by term.
    ///
    /// A coefficient of magnitude other than one costs one multiplication; the
    /// sign is free since it folds into the surrounding addition.
    pub fn naive_op_count(&self) -> OpCount {
        OpCount {
            mul: self.terms.iter().map(Term::naive_mul).sum(),
            add: self.terms.len().saturating_sub(1) as u64,
        }
    }

    pub fn eval_mod_p(&self, values: &Assignment, p: u64) -> Result<u64> {
        let mut acc = 0;
        for t in &self.terms {
            let mut v = modp::reduce(&t.coeff, p);
            for &(id, e) in &t.exponents {
                let x = values
                    .get(id)
                    .ok_or_else(|| Error::MissingAssignment(self.name(id).to_string()))?;
                v = modp::mul(v, modp::pow(x, e, p), p);
            }
            acc = modp::add(acc, v, p);
        }
        Ok(acc)
    }

    /// Re-expresses `other`'s terms over this expression's atom table,
    /// interning any atoms this table does not know yet.
    fn aligned_terms(&mut self, other: &Expression) -> Vec<Term> {
        if self.atoms == other.atoms {
            return other.terms.clone();
        }
        let map: Vec<AtomId> = other
            .atoms
            .iter()
            .map(|(_, name)| self.atoms.intern(name))
            .collect();
        other
            .terms
            .iter()
            .map(|t| {
                let mut m: Monomial = t
                    .exponents
                    .iter()
                    .map(|&(id, e)| (map[id.index()], e))
                    .collect();
                m.sort_unstable_by_key(|&(id, _)| id);
                Term::new(t.coeff.clone(), m)
            })
            .collect()
    }

    pub fn add(&self, other: &Expression) -> Expression {
        let mut out = self.clone();
        let rhs = out.aligned_terms(other);
        let atoms = out.atoms.clone();
        Expression::from_terms(atoms, out.terms.into_iter().chain(rhs))
    }

    pub fn neg(&self) -> Expression {
        Expression {
            atoms: self.atoms.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(-&t.coeff, t.exponents.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Expression) -> Expression {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expression) -> Expression {
        let mut out = self.clone();
        let rhs = out.aligned_terms(other);
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for a in &out.terms {
            for b in &rhs {
                *acc.entry(monomial_mul(&a.exponents, &b.exponents))
                    .or_default() += &a.coeff * &b.coeff;
            }
        }
        Expression::from_terms(out.atoms, acc.into_iter().map(|(m, c)| Term::new(c, m)))
    }

    /// Every term of `self` followed by every term of `other`, merged.
    pub fn concat(&self, other: &Expression) -> Expression {
        self.add(other)
    }

    /// Canonical terms keyed by atom text, for table-independent comparison.
    fn by_text(&self) -> Vec<(Vec<(&str, u32)>, &BigInt)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .map(|t| {
                let mut m: Vec<(&str, u32)> = t
                    .exponents
                    .iter()
                    .map(|&(id, e)| (self.name(id), e))
                    .collect();
                m.sort_unstable();
                (m, &t.coeff)
            })
            .collect();
        v.sort_unstable();
        v
    }
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        if self.atoms == other.atoms {
            return self.terms == other.terms;
        }
        self.terms.len() == other.terms.len() && self.by_text() == other.by_text()
    }
}

impl Eq for Expression {}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coeff.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = t.coeff.abs();
            let mut first = true;
            if !mag.is_one() || t.exponents.is_empty() {
                write!(f, "{mag}")?;
                first = false;
            }
            for &(id, e) in &t.exponents {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(self.name(id))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expression::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EQ1: &str = "x^3*y^2 + x^2*y + x^3*z";

    fn ids(e: &Expression, names: &[&str]) -> Vec<AtomId> {
        names.iter().map(|n| e.atoms().lookup(n).unwrap()).collect()
    }

    #[test]
    fn parses_the_three_term_example() {
        let e = Expression::parse(EQ1).unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e.variables(), ids(&e, &["x", "y", "z"]));
    }

    #[test]
    fn merges_like_terms() {
        let e = Expression::parse("x + x").unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.terms()[0].coeff, BigInt::from(2));
        assert_eq!(e.to_string(), "2*x");
    }

    #[test]
    fn function_calls_are_opaque_atoms() {
        let e = Expression::parse("sin(x) + cos(x) + sin(x)*x + cos(x)*x").unwrap();
        assert_eq!(e.len(), 4);
        let names: Vec<&str> = e.variables().into_iter().map(|a| e.name(a)).collect();
        assert_eq!(names, ["sin(x)", "cos(x)", "x"]);
    }

    #[test]
    fn naive_counts() {
        let e = Expression::parse(EQ1).unwrap();
        assert_eq!(e.naive_op_count(), OpCount::new(9, 2));
        assert_eq!(Expression::parse("x").unwrap().naive_op_count(), OpCount::new(0, 0));
        assert_eq!(
            Expression::parse("7*x^2*y + 3").unwrap().naive_op_count(),
            OpCount::new(3, 1)
        );
        // sign is free, magnitude is not
        assert_eq!(Expression::parse("-x*y").unwrap().naive_op_count(), OpCount::new(1, 0));
        assert_eq!(Expression::parse("-2*x").unwrap().naive_op_count(), OpCount::new(1, 0));
    }

    #[test]
    fn evaluates_modulo_p() {
        let e = Expression::parse(EQ1).unwrap();
        let [x, y, z] = ids(&e, &["x", "y", "z"])[..] else { unreachable!() };
        let ones = Assignment::new().with(x, 1).with(y, 1).with(z, 1);
        assert_eq!(e.eval_mod_p(&ones, modp::P31).unwrap(), 3);
        let pt = Assignment::new().with(x, 2).with(y, 3).with(z, 5);
        assert_eq!(e.eval_mod_p(&pt, modp::P31).unwrap(), 124);

        let sq = Expression::parse("x^2").unwrap();
        let x = sq.variables()[0];
        assert_eq!(sq.eval_mod_p(&Assignment::new().with(x, 0), modp::P31).unwrap(), 0);
    }

    #[test]
    fn missing_assignment_is_an_error() {
        let e = Expression::parse("x*y").unwrap();
        let x = e.variables()[0];
        let err = e.eval_mod_p(&Assignment::new().with(x, 3), modp::P31).unwrap_err();
        assert!(matches!(err, Error::MissingAssignment(ref n) if n == "y"));
    }

    #[test]
    fn constants_have_no_variables() {
        assert!(Expression::parse("3").unwrap().variables().is_empty());
    }

    #[test]
    fn prints_signs_and_round_trips() {
        assert_eq!(Expression::parse("-x").unwrap().to_string(), "-x");
        let e = Expression::parse(EQ1).unwrap();
        assert_eq!(Expression::parse(&e.to_string()).unwrap(), e);
        assert_eq!(Expression::parse("0").unwrap().to_string(), "0");
        assert_eq!(Expression::parse("x - x").unwrap().to_string(), "0");
    }

    #[test]
    fn equality_ignores_interning_order() {
        let a = Expression::parse("x + y^3").unwrap();
        let b = Expression::parse("y^3 + x").unwrap();
        assert_ne!(a.atoms(), b.atoms());
        assert_eq!(a, b);
        assert_ne!(a, Expression::parse("x + y^2").unwrap());
    }

    #[test]
    fn canonical_order_is_graded_lex() {
        let e = Expression::parse("z + 1 + x*y + y^2 + x^2").unwrap();
        assert_eq!(e.to_string(), "x^2 + x*y + y^2 + z + 1");
    }

    #[test]
    fn arithmetic() {
        let a = Expression::parse("x + 1").unwrap();
        let b = Expression::parse("x - 1").unwrap();
        assert_eq!(a.mul(&b), Expression::parse("x^2 - 1").unwrap());
        assert_eq!(a.sub(&b), Expression::parse("2").unwrap());
        let c = Expression::parse("y").unwrap();
        assert_eq!(a.mul(&c), Expression::parse("x*y + y").unwrap());
    }
}
