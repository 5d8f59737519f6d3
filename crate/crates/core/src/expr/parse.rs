//! Recursive-descent parser for the expression text format.
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := integer | atom ('^' positive-integer)?
//! atom   := identifier | identifier '(' balanced-text ')'
//! ```

use num_bigint::BigInt;
use num_traits::One;

use super::{monomial_mul, AtomTable, Expression, Term};
use crate::error::ParseError;

pub(super) fn parse(text: &str, atoms: AtomTable) -> Result<Expression, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        text,
        pos: 0,
        atoms,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(ParseError::new(0, "empty expression"));
    }
    let mut terms = Vec::new();
    let mut negate = match p.peek() {
        Some(b'-') => {
            p.pos += 1;
            true
        }
        Some(b'+') => {
            p.pos += 1;
            false
        }
        _ => false,
    };
    loop {
        let mut t = p.term()?;
        if negate {
            t.coeff = -t.coeff;
        }
        terms.push(t);
        p.skip_ws();
        match p.peek() {
            None => break,
            Some(b'+') => negate = false,
            Some(b'-') => negate = true,
            Some(c) => {
                return Err(ParseError::new(
                    p.pos,
                    format!("expected `+`, `-` or `*`, found `{}`", c as char),
                ))
            }
        }
        p.pos += 1;
    }
    Ok(Expression::from_terms(p.atoms, terms))
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    atoms: AtomTable,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut coeff = BigInt::one();
        let mut mono = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => coeff *= self.integer()?,
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let atom = self.atom()?;
                    self.skip_ws();
                    let exp = if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        1
                    };
                    mono = monomial_mul(&mono, &[(atom, exp)]);
                }
                Some(c) => {
                    return Err(ParseError::new(
                        self.pos,
                        format!("expected an integer or atom, found `{}`", c as char),
                    ))
                }
                None => return Err(ParseError::new(self.pos, "unexpected end of input")),
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok(Term::new(coeff, mono));
            }
        }
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        let digits = self.digits();
        digits
            .parse()
            .map_err(|_| ParseError::new(start, "invalid integer"))
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some(b'-') => return Err(ParseError::new(start, "negative exponent")),
            Some(c) if c.is_ascii_digit() => {}
            _ => return Err(ParseError::new(start, "expected a positive integer exponent")),
        }
        let digits = self.digits();
        let e: u32 = digits
            .parse()
            .map_err(|_| ParseError::new(start, "exponent out of range"))?;
        if e == 0 {
            return Err(ParseError::new(start, "exponent must be positive"));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<super::AtomId, ParseError> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        let mut name = self.text[start..self.pos].to_string();
        if self.peek() == Some(b'(') {
            let open = self.pos;
            let mut depth = 0usize;
            loop {
                match self.peek() {
                    None => return Err(ParseError::new(open, "unbalanced `(`")),
                    Some(b'(') => depth += 1,
                    Some(b')') => {
                        depth -= 1;
                        if depth == 0 {
                            self.pos += 1;
                            break;
                        }
                    }
                    _ => {}
                }
                self.pos += 1;
            }
            name.extend(
                self.text[open..self.pos]
                    .chars()
                    .filter(|c| !c.is_whitespace()),
            );
        }
        Ok(self.atoms.intern(name))
    }
}
