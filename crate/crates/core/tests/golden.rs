use std::fs;
use std::path::{Path, PathBuf};

use horner_mcts::benchgen::{random_expr, resultant_expr, RandomExprParams};
use horner_mcts::experiment::{bruteforce, simplify_report};
use horner_mcts::{Direction, Expression, OpCount, Scheme};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn read(name: &str) -> String {
    fs::read_to_string(golden(name)).unwrap()
}

#[test]
fn pinned_random_expression() {
    let e = random_expr(&RandomExprParams {
        n_vars: 5,
        n_terms: 30,
        max_exponent: 3,
        coeff_range: 10,
        seed: 42,
    })
    .unwrap();
    assert_eq!(e.to_string(), read("random_v5_t30_e3_c10_s42.txt").trim());
    assert_eq!(e.len(), 30);
}

#[test]
fn resultant_bruteforce_minimum() {
    // b_0 or b_1 first: b_0*(a_2*b_0 - a_1*b_1) + a_0*b_1^2
    let r = bruteforce(&resultant_expr(2, 1).unwrap(), Direction::Forward).unwrap();
    assert_eq!(r.best, OpCount::new(5, 2));
    assert_eq!(r.evaluated, 120);
}

#[test]
fn worked_example_listing() {
    let e = Expression::parse(read("eq1.txt").trim()).unwrap();
    let r = simplify_report(&e, &Scheme::parse("y,x", &e).unwrap()).unwrap();
    assert_eq!(r.listing, read("eq1_yx.listing"));
    assert_eq!(r.horner_form, "x^2*y*(1 + x*y) + x^3*z");
}
