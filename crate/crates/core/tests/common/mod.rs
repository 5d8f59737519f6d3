#![allow(dead_code)]

use horner_mcts::expr::{AtomId, AtomTable, Term};
use horner_mcts::{Direction, Expression, Scheme};
use proptest::prelude::*;

pub const ATOMS: [&str; 6] = ["x", "y", "z", "w", "sin(x)", "f(y,z)"];

/// Random polynomials over a prefix of [`ATOMS`], like terms allowed.
pub fn expression() -> impl Strategy<Value = Expression> {
    (1..=ATOMS.len()).prop_flat_map(|n| {
        prop::collection::vec(
            (-20i64..=20, prop::collection::vec(0u32..=3, n)),
            1..12,
        )
        .prop_map(move |terms| {
            let atoms = AtomTable::from_names(ATOMS[..n].iter().copied());
            Expression::from_terms(
                atoms,
                terms.into_iter().map(|(c, exps)| {
                    let mono = exps
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, e)| e > 0)
                        .map(|(i, e)| (AtomId(i as u32), e))
                        .collect();
                    Term::new(c, mono)
                }),
            )
        })
    })
}

/// A scheme over a shuffled subset of the expression's variables.
pub fn scheme_for(e: &Expression) -> impl Strategy<Value = Scheme> {
    let vars = e.variables();
    let n = vars.len();
    (Just(vars).prop_shuffle(), 0..=n, any::<bool>()).prop_map(|(vars, k, backward)| {
        let direction = if backward {
            Direction::Backward
        } else {
            Direction::Forward
        };
        Scheme::new(vars[..k].to_vec(), direction)
    })
}

pub fn expression_and_scheme() -> impl Strategy<Value = (Expression, Scheme)> {
    expression().prop_flat_map(|e| {
        let s = scheme_for(&e);
        (Just(e), s)
    })
}
