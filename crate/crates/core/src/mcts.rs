//! Monte Carlo Tree Search over Horner scheme orderings.
//!
//! Each tree node is a variable appended to the ordering of its parent. An
//! iteration selects down the fully expanded part of the tree, expands one
//! untried variable, completes the ordering uniformly at random and scores it
//! by the operation count after Horner and CSE. Children are compared by
//!
//! ```text
//! score(c) + 2 T sqrt(2 ln n(parent) / n(c))
//! ```
//!
//! where `score(c)` is the naive operation count divided by the mean count of
//! the playouts through `c`. Plain UCT keeps `T = C_p` fixed; SA-UCT lowers it
//! over the run following a cooling schedule, starting from `T(0) = C_p`.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cse;
use crate::error::{Error, Result};
use crate::expr::{AtomId, Expression, OpCount};
use crate::horner::{Direction, Scheme};

/// The generator behind every seeded run. Run `k` of a repetition or sweep
/// uses `ChaCha8Rng::seed_from_u64(seed + k)`.
pub type SearchRng = ChaCha8Rng;

pub fn rng_for(seed: u64) -> SearchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "uct")]
    Uct,
    #[default]
    #[serde(rename = "sa-uct")]
    SaUct,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Uct => "uct",
            Criterion::SaUct => "sa-uct",
        })
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uct" => Ok(Criterion::Uct),
            "sa-uct" | "sauct" | "sa_uct" => Ok(Criterion::SaUct),
            _ => Err(Error::InvalidParameter(format!("unknown criterion `{s}`"))),
        }
    }
}

/// How the exploration temperature decays over the iterations of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Schedule {
    /// `T(i) = C_p (N - i) / N`
    #[default]
    Linear,
    /// `T(i) = C_p 2^(-i / half_life)`
    Exponential { half_life: f64 },
    /// `T(i) = C_p`
    Constant,
}

impl Schedule {
    pub fn temperature(&self, cp: f64, i: u64, n: u64) -> f64 {
        match *self {
            // the fraction first, so that T(0) is exactly cp
            Schedule::Linear => cp * (n.saturating_sub(i) as f64 / n as f64),
            Schedule::Exponential { half_life } => cp * libm::exp2(-(i as f64) / half_life),
            Schedule::Constant => cp,
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Linear => f.write_str("linear"),
            Schedule::Exponential { half_life } => write!(f, "exp:{half_life}"),
            Schedule::Constant => f.write_str("const"),
        }
    }
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "linear" => Ok(Schedule::Linear),
            "const" | "constant" => Ok(Schedule::Constant),
            _ => {
                let half_life: f64 = s
                    .strip_prefix("exp:")
                    .and_then(|h| h.parse().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown schedule `{s}`")))?;
                if !(half_life > 0.0 && half_life.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "exponential half-life must be positive".into(),
                    ));
                }
                Ok(Schedule::Exponential { half_life })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchParams {
    /// Exploration constant; the initial temperature under SA-UCT.
    pub cp: f64,
    /// Tree updates per run (N).
    pub n_updates: u64,
    /// Independent runs, best kept (R).
    pub repeats: u64,
    pub criterion: Criterion,
    pub schedule: Schedule,
    pub direction: Direction,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            cp: 1.0,
            n_updates: 1000,
            repeats: 1,
            criterion: Criterion::SaUct,
            schedule: Schedule::Linear,
            direction: Direction::Forward,
            seed: 0,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.cp >= 0.0 && self.cp.is_finite()) {
            return Err(Error::InvalidParameter(format!("cp must be >= 0, got {}", self.cp)));
        }
        if self.n_updates == 0 {
            return Err(Error::InvalidParameter("n_updates must be >= 1".into()));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be >= 1".into()));
        }
        Ok(())
    }

    /// The exploration weight used throughout iteration `i`.
    pub fn temperature(&self, i: u64) -> f64 {
        match self.criterion {
            Criterion::Uct => self.cp,
            Criterion::SaUct => self.schedule.temperature(self.cp, i, self.n_updates),
        }
    }
}

/// `T(i)` under the parameters' criterion and schedule.
pub fn temperature(i: u64, params: &SearchParams) -> f64 {
    params.temperature(i)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Node {
    /// `None` at the root.
    pub atom: Option<AtomId>,
    pub visits: u64,
    pub delta_sum: u64,
    pub children: Vec<usize>,
    pub untried: Vec<AtomId>,
}

/// `naive / mean(delta)` over the playouts through `c`; higher is better.
/// `None` for an unvisited node.
pub fn node_score(c: &Node, naive_total: u64) -> Option<f64> {
    if c.visits == 0 {
        return None;
    }
    // a zero-operation playout would divide by zero; floor the mean at one
    let mean = (c.delta_sum as f64 / c.visits as f64).max(1.0);
    Some(naive_total as f64 / mean)
}

#[derive(Debug, Clone, Default)]
pub struct SearchTree {
    pub nodes: Vec<Node>,
}

impl SearchTree {
    fn new(variables: Vec<AtomId>) -> Self {
        Self {
            nodes: vec![Node {
                untried: variables,
                ..Node::default()
            }],
        }
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }
}

/// Index of the child of `parent` maximizing the selection value at
/// temperature `t`; exact ties are broken uniformly with `rng`.
pub fn best_child<R: Rng + ?Sized>(
    tree: &SearchTree,
    parent: usize,
    t: f64,
    naive_total: u64,
    rng: &mut R,
) -> Result<usize> {
    let s = &tree.nodes[parent];
    if s.children.is_empty() {
        return Err(Error::InvalidParameter("node has no expanded children".into()));
    }
    let ln_n = libm::log(s.visits as f64);
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<usize> = Vec::new();
    for &c in &s.children {
        let child = &tree.nodes[c];
        let score = node_score(child, naive_total)
            .ok_or_else(|| Error::InvalidParameter("unvisited child in selection".into()))?;
        let value = score + 2.0 * t * (2.0 * ln_n / child.visits as f64).sqrt();
        if value > best {
            best = value;
            ties.clear();
            ties.push(c);
        } else if value == best {
            ties.push(c);
        }
    }
    Ok(if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.gen_range(0..ties.len())]
    })
}

/// What one iteration scored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationRecord {
    pub ops: OpCount,
    /// The full ordering that was scored (before applying the direction).
    pub ordering: Vec<AtomId>,
    /// How many leading variables came from the tree.
    pub tree_depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_delta: OpCount,
    pub best_scheme: Scheme,
    /// Operation total scored in each iteration.
    pub deltas_per_iteration: Vec<u64>,
    pub iterations_run: u64,
    /// Seed of the run that produced this result.
    pub seed: u64,
}

/// A single MCTS run in progress.
pub struct Search<'e> {
    expr: &'e Expression,
    params: SearchParams,
    variables: Vec<AtomId>,
    naive_total: u64,
    tree: SearchTree,
    rng: SearchRng,
    cache: FxHashMap<Vec<AtomId>, OpCount>,
    best: Option<(OpCount, Vec<AtomId>)>,
    trace: Vec<u64>,
}

impl<'e> Search<'e> {
    pub fn new(expr: &'e Expression, params: SearchParams) -> Result<Self> {
        params.validate()?;
        let variables = expr.variables();
        if variables.is_empty() {
            return Err(Error::EmptyExpression);
        }
        Ok(Self {
            naive_total: expr.naive_op_count().total(),
            tree: SearchTree::new(variables.clone()),
            rng: rng_for(params.seed),
            variables,
            expr,
            params,
            cache: FxHashMap::default(),
            best: None,
            trace: Vec::new(),
        })
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn best(&self) -> Option<OpCount> {
        self.best.as_ref().map(|(ops, _)| *ops)
    }

    fn score(&mut self, ordering: &[AtomId]) -> OpCount {
        let effective: Vec<AtomId> = match self.params.direction {
            Direction::Forward => ordering.to_vec(),
            Direction::Backward => ordering.iter().rev().copied().collect(),
        };
        if let Some(&ops) = self.cache.get(&effective) {
            return ops;
        }
        let ops = cse::score_order(self.expr, &effective);
        self.cache.insert(effective, ops);
        ops
    }

    /// Selection, expansion, random playout and backpropagation.
    pub fn run_iteration(&mut self, i: u64) -> IterationRecord {
        let t = self.params.temperature(i);
        let mut path = vec![0usize];
        let mut ordering: Vec<AtomId> = Vec::with_capacity(self.variables.len());
        let mut cur = 0;

        while self.tree.nodes[cur].untried.is_empty() && !self.tree.nodes[cur].children.is_empty() {
            cur = best_child(&self.tree, cur, t, self.naive_total, &mut self.rng)
                .expect("fully expanded node has visited children");
            path.push(cur);
            ordering.push(self.tree.nodes[cur].atom.unwrap());
        }

        if !self.tree.nodes[cur].untried.is_empty() {
            let untried = &mut self.tree.nodes[cur].untried;
            let atom = untried.swap_remove(self.rng.gen_range(0..untried.len()));
            ordering.push(atom);
            let remaining: Vec<AtomId> = self
                .variables
                .iter()
                .copied()
                .filter(|v| !ordering.contains(v))
                .collect();
            let child = self.tree.nodes.len();
            self.tree.nodes.push(Node {
                atom: Some(atom),
                untried: remaining,
                ..Node::default()
            });
            self.tree.nodes[cur].children.push(child);
            path.push(child);
        }
        let tree_depth = ordering.len();

        let mut rest: Vec<AtomId> = self
            .variables
            .iter()
            .copied()
            .filter(|v| !ordering.contains(v))
            .collect();
        for k in (1..rest.len()).rev() {
            let j = self.rng.gen_range(0..=k);
            rest.swap(k, j);
        }
        ordering.extend(rest);

        let ops = self.score(&ordering);
        for &n in &path {
            let node = &mut self.tree.nodes[n];
            node.visits += 1;
            node.delta_sum += ops.total();
        }
        if self.best.as_ref().is_none_or(|(b, _)| ops.total() < b.total()) {
            self.best = Some((ops, ordering.clone()));
        }
        self.trace.push(ops.total());
        IterationRecord {
            ops,
            ordering,
            tree_depth,
        }
    }

    pub fn run(mut self) -> SearchResult {
        for i in 0..self.params.n_updates {
            self.run_iteration(i);
        }
        self.finish()
    }

    pub fn finish(self) -> SearchResult {
        let (best_delta, order) = self.best.unwrap_or_default();
        SearchResult {
            best_delta,
            best_scheme: Scheme::new(order, self.params.direction),
            iterations_run: self.trace.len() as u64,
            deltas_per_iteration: self.trace,
            seed: self.params.seed,
        }
    }
}

/// One MCTS run of `params.n_updates` iterations seeded by `params.seed`.
pub fn search(e: &Expression, params: &SearchParams) -> Result<SearchResult> {
    Ok(Search::new(e, params.clone())?.run())
}

/// `params.repeats` runs with seeds `seed, seed + 1, ...`; the lowest
/// operation total wins, ties going to the earliest seed.
pub fn repeat_search(e: &Expression, params: &SearchParams) -> Result<SearchResult> {
    params.validate()?;
    let mut best: Option<SearchResult> = None;
    for k in 0..params.repeats {
        let p = SearchParams {
            seed: params.seed.wrapping_add(k),
            ..params.clone()
        };
        let r = search(e, &p)?;
        if best
            .as_ref()
            .is_none_or(|b| r.best_delta.total() < b.best_delta.total())
        {
            best = Some(r);
        }
    }
    Ok(best.expect("repeats >= 1"))
}

/// JSON form of a search outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub best_total: u64,
    pub best_mul: u64,
    pub best_add: u64,
    pub scheme: String,
    pub direction: Direction,
    pub criterion: Criterion,
    pub cp: f64,
    pub n_updates: u64,
    pub repeats: u64,
    pub seed: u64,
}

impl SearchReport {
    pub fn new(e: &Expression, params: &SearchParams, r: &SearchResult) -> Self {
        Self {
            best_total: r.best_delta.total(),
            best_mul: r.best_delta.mul,
            best_add: r.best_delta.add,
            scheme: r.best_scheme.to_text(e.atoms()),
            direction: r.best_scheme.direction,
            criterion: params.criterion,
            cp: params.cp,
            n_updates: params.n_updates,
            repeats: params.repeats,
            seed: r.seed,
        }
    }
}
