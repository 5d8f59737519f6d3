//! Multivariate Horner schemes.
//!
//! A scheme is an ordered list of variables. Each variable in turn is lifted
//! out of every sum of the current nested form: the terms of a sum are split
//! by their power of the variable, and the classes are nested in ascending
//! power, `c0 + v^e1 (c1 + v^(e2-e1) (c2 + ...))`. Classes that collapse to a
//! single term are folded into a flat product, so its factors stay visible to
//! the variables lifted after it. Sums are partitioned before their nested
//! sums are visited.
//!
//! For `x^3 y^2 + x^2 y + x^3 z` the scheme `x, y` yields
//! `x^2 (x (z + y^2) + y)` and the scheme `y, x` yields
//! `x^2 y (1 + x y) + x^3 z`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{exponent_of, monomial_mul, AtomId, AtomTable, Expression, Monomial, OpCount};
use crate::modp::{self, Assignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "forward" | "fwd" => Ok(Direction::Forward),
            "backward" | "bwd" => Ok(Direction::Backward),
            _ => Err(Error::InvalidParameter(format!("unknown direction `{s}`"))),
        }
    }
}

/// An extraction order. A strict prefix of the variables is allowed; the
/// remaining variables are never lifted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Scheme {
    pub order: Vec<AtomId>,
    pub direction: Direction,
}

impl Scheme {
    pub fn new(order: Vec<AtomId>, direction: Direction) -> Self {
        Self { order, direction }
    }

    pub fn forward(order: Vec<AtomId>) -> Self {
        Self::new(order, Direction::Forward)
    }

    /// The order in which variables are actually lifted: backward schemes
    /// build the nesting from the inside out.
    pub fn effective_order(&self) -> Vec<AtomId> {
        match self.direction {
            Direction::Forward => self.order.clone(),
            Direction::Backward => self.order.iter().rev().copied().collect(),
        }
    }

    /// Checks the scheme lists distinct variables of `e`.
    pub fn validate(&self, e: &Expression) -> Result<()> {
        let vars = e.variables();
        let mut seen = vec![false; e.atoms().len()];
        for &id in &self.order {
            let name = || {
                if id.index() < e.atoms().len() {
                    e.name(id).to_string()
                } else {
                    format!("#{}", id.0)
                }
            };
            if vars.binary_search(&id).is_err() {
                return Err(Error::UnknownVariable(name()));
            }
            if std::mem::replace(&mut seen[id.index()], true) {
                return Err(Error::DuplicateVariable(name()));
            }
        }
        Ok(())
    }

    /// Parses `"y,x;forward"`. The direction suffix is optional and defaults
    /// to forward; an empty list is the empty scheme. Commas inside function
    /// atoms such as `f(x,y)` are not separators.
    pub fn parse(text: &str, e: &Expression) -> Result<Scheme> {
        let (list, direction) = match text.rsplit_once(';') {
            Some((list, dir)) => (list, dir.parse()?),
            None => (text, Direction::Forward),
        };
        let mut order = Vec::new();
        for name in split_top_level(list) {
            let name: String = name.chars().filter(|c| !c.is_whitespace()).collect();
            if name.is_empty() {
                return Err(Error::InvalidScheme(text.to_string()));
            }
            let id = e
                .atoms()
                .lookup(&name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            order.push(id);
        }
        let scheme = Scheme::new(order, direction);
        scheme.validate(e)?;
        Ok(scheme)
    }

    /// Renders the scheme as `"y,x;forward"` using the atom names of `atoms`.
    pub fn to_text(&self, atoms: &AtomTable) -> String {
        format!("{};{}", self.order_text(atoms), self.direction)
    }

    pub fn order_text(&self, atoms: &AtomTable) -> String {
        self.order
            .iter()
            .map(|&id| atoms.name(id))
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    if s.trim().is_empty() {
        return Vec::new();
    }
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Variables ordered by the number of terms they occur in, most frequent
/// first; ties go to the lower atom id.
pub fn occurrence_order(e: &Expression) -> Scheme {
    let mut counts = vec![0usize; e.atoms().len()];
    for t in e.terms() {
        for &(id, _) in &t.exponents {
            counts[id.index()] += 1;
        }
    }
    let mut vars = e.variables();
    vars.sort_by(|a, b| counts[b.index()].cmp(&counts[a.index()]).then(a.cmp(b)));
    Scheme::forward(vars)
}

/// A nested evaluation form.
///
/// `Const(-1)` inside a product stands for a sign and costs nothing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExprTree {
    Sum(Vec<ExprTree>),
    Product(Vec<ExprTree>),
    Power(Box<ExprTree>, u32),
    Atom(AtomId),
    Const(BigInt),
}

impl ExprTree {
    /// Operation count with every occurrence counted separately.
    pub fn op_count(&self) -> OpCount {
        let mut ops = OpCount::default();
        self.accumulate(&mut ops);
        ops
    }

    fn accumulate(&self, ops: &mut OpCount) {
        match self {
            ExprTree::Sum(ch) => {
                ops.add += ch.len() as u64 - 1;
                ch.iter().for_each(|c| c.accumulate(ops));
            }
            ExprTree::Product(ch) => {
                let costly = ch.iter().filter(|c| !c.is_unit()).count() as u64;
                ops.mul += costly.saturating_sub(1);
                ch.iter().for_each(|c| c.accumulate(ops));
            }
            ExprTree::Power(base, e) => {
                ops.mul += u64::from(*e) - 1;
                base.accumulate(ops);
            }
            ExprTree::Atom(_) | ExprTree::Const(_) => {}
        }
    }

    pub(crate) fn is_unit(&self) -> bool {
        matches!(self, ExprTree::Const(c) if c.abs().is_one())
    }

    pub fn eval_mod_p(&self, values: &Assignment, atoms: &AtomTable, p: u64) -> Result<u64> {
        Ok(match self {
            ExprTree::Sum(ch) => ch.iter().try_fold(0, |acc, c| {
                Ok::<_, Error>(modp::add(acc, c.eval_mod_p(values, atoms, p)?, p))
            })?,
            ExprTree::Product(ch) => ch.iter().try_fold(1 % p, |acc, c| {
                Ok::<_, Error>(modp::mul(acc, c.eval_mod_p(values, atoms, p)?, p))
            })?,
            ExprTree::Power(base, e) => modp::pow(base.eval_mod_p(values, atoms, p)?, *e, p),
            ExprTree::Atom(id) => values
                .get(*id)
                .ok_or_else(|| Error::MissingAssignment(atoms.name(*id).to_string()))?,
            ExprTree::Const(c) => modp::reduce(c, p),
        })
    }

    pub fn display<'a>(&'a self, atoms: &'a AtomTable) -> impl fmt::Display + 'a {
        TreeDisplay { tree: self, atoms }
    }
}

struct TreeDisplay<'a> {
    tree: &'a ExprTree,
    atoms: &'a AtomTable,
}

impl fmt::Display for TreeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &ExprTree, atoms: &AtomTable, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
            match t {
                ExprTree::Sum(ch) => {
                    if nested {
                        f.write_str("(")?;
                    }
                    for (i, c) in ch.iter().enumerate() {
                        if i > 0 {
                            f.write_str(" + ")?;
                        }
                        go(c, atoms, f, false)?;
                    }
                    if nested {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
                ExprTree::Product(ch) => {
                    for (i, c) in ch.iter().enumerate() {
                        if i > 0 {
                            f.write_str("*")?;
                        }
                        go(c, atoms, f, true)?;
                    }
                    Ok(())
                }
                ExprTree::Power(b, e) => {
                    go(b, atoms, f, true)?;
                    write!(f, "^{e}")
                }
                ExprTree::Atom(id) => f.write_str(atoms.name(*id)),
                ExprTree::Const(c) if nested && c.is_negative() => write!(f, "({c})"),
                ExprTree::Const(c) => write!(f, "{c}"),
            }
        }
        go(self.tree, self.atoms, f, false)
    }
}

/// A product `coeff * mono * sums[0] * sums[1] * ...` in the working form.
#[derive(Debug, Clone)]
struct HProd {
    coeff: BigInt,
    mono: Monomial,
    sums: Vec<Vec<HProd>>,
}

impl HProd {
    fn is_bare_sum(&self) -> bool {
        self.sums.len() == 1 && self.mono.is_empty() && self.coeff.is_one()
    }

    fn absorb(&mut self, t: HProd) {
        if !t.coeff.is_one() {
            self.coeff *= t.coeff;
        }
        if !t.mono.is_empty() {
            self.mono = monomial_mul(&self.mono, &t.mono);
        }
        self.sums.extend(t.sums);
    }

    fn into_tree(self) -> ExprTree {
        let mut factors = Vec::with_capacity(1 + self.mono.len() + self.sums.len());
        let unit = self.coeff.abs().is_one();
        if !unit || self.coeff.is_negative() {
            factors.push(ExprTree::Const(self.coeff.clone()));
        }
        for (id, e) in self.mono {
            factors.push(if e == 1 {
                ExprTree::Atom(id)
            } else {
                ExprTree::Power(Box::new(ExprTree::Atom(id)), e)
            });
        }
        for s in self.sums {
            factors.push(sum_to_tree(s));
        }
        match factors.len() {
            0 => ExprTree::Const(self.coeff),
            1 => factors.pop().unwrap(),
            _ => ExprTree::Product(factors),
        }
    }
}

fn sum_to_tree(mut terms: Vec<HProd>) -> ExprTree {
    match terms.len() {
        0 => ExprTree::Const(BigInt::zero()),
        1 => terms.pop().unwrap().into_tree(),
        _ => ExprTree::Sum(terms.into_iter().map(HProd::into_tree).collect()),
    }
}

fn push_flat(out: &mut Vec<HProd>, mut t: HProd) {
    if t.is_bare_sum() {
        out.extend(t.sums.pop().unwrap());
    } else {
        out.push(t);
    }
}

/// Lifts `v` out of a sum, then out of the sums nested below it.
fn lift(terms: Vec<HProd>, v: AtomId) -> Vec<HProd> {
    let mut out = Vec::with_capacity(terms.len());
    let mut with_v = Vec::new();
    let mut lowest = u32::MAX;
    for t in terms {
        let e = exponent_of(&t.mono, v);
        if e == 0 {
            push_flat(&mut out, lift_inside(t, v));
        } else {
            lowest = lowest.min(e);
            with_v.push(t);
        }
    }
    if with_v.is_empty() {
        return out;
    }
    let mut quotient = Vec::with_capacity(with_v.len());
    for mut t in with_v {
        let pos = t.mono.iter().position(|&(id, _)| id == v).unwrap();
        if t.mono[pos].1 == lowest {
            t.mono.remove(pos);
        } else {
            t.mono[pos].1 -= lowest;
        }
        push_flat(&mut quotient, t);
    }
    let mut inner = lift(quotient, v);
    let factor = if inner.len() == 1 {
        let mut t = inner.pop().unwrap();
        t.mono = monomial_mul(&t.mono, &[(v, lowest)]);
        t
    } else {
        HProd {
            coeff: BigInt::one(),
            mono: vec![(v, lowest)],
            sums: vec![inner],
        }
    };
    out.push(factor);
    out
}

fn lift_inside(mut t: HProd, v: AtomId) -> HProd {
    if t.sums.is_empty() {
        return t;
    }
    for s in std::mem::take(&mut t.sums) {
        let mut s = lift(s, v);
        if s.len() == 1 {
            t.absorb(s.pop().unwrap());
        } else {
            t.sums.push(s);
        }
    }
    t
}

/// Applies `scheme` to `e`, producing the nested evaluation form.
pub fn apply_scheme(e: &Expression, scheme: &Scheme) -> Result<ExprTree> {
    scheme.validate(e)?;
    Ok(apply_unchecked(e, &scheme.effective_order()))
}

pub(crate) fn apply_unchecked(e: &Expression, order: &[AtomId]) -> ExprTree {
    let mut terms: Vec<HProd> = e
        .terms()
        .iter()
        .map(|t| HProd {
            coeff: t.coeff.clone(),
            mono: t.exponents.clone(),
            sums: Vec::new(),
        })
        .collect();
    for &v in order {
        terms = lift(terms, v);
    }
    sum_to_tree(terms)
}

pub fn tree_op_count(t: &ExprTree) -> OpCount {
    t.op_count()
}
