//! Hash-consed expression DAGs and common subexpression elimination.
//!
//! Structurally identical subtrees share one node. Sums and products are
//! associative and commutative, so their children are kept sorted and a pair
//! of children that appears inside several nodes of the same operator is a
//! common subexpression even when the nodes differ elsewhere. Elimination
//! greedily names the most frequent such pair until none repeats.

use rustc_hash::FxHashMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::expr::{AtomId, AtomTable, Expression, OpCount};
use crate::horner::{self, ExprTree, Scheme};
use crate::modp::{self, Assignment};

mod work;
use work::Work;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AcOp {
    Sum,
    Product,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Atom(AtomId),
    Const(BigInt),
    Power(NodeId, u32),
    /// Children sorted by id; repeats allowed.
    Sum(Vec<NodeId>),
    Product(Vec<NodeId>),
}

impl Node {
    fn ac(op: AcOp, children: Vec<NodeId>) -> Node {
        match op {
            AcOp::Sum => Node::Sum(children),
            AcOp::Product => Node::Product(children),
        }
    }

    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::Sum(ch) | Node::Product(ch) => ch,
            Node::Power(b, _) => std::slice::from_ref(b),
            Node::Atom(_) | Node::Const(_) => &[],
        }
    }
}

/// An append-only table of hash-consed nodes; children always precede parents.
#[derive(Debug, Clone, Default)]
pub struct Dag {
    nodes: Vec<Node>,
    index: FxHashMap<Node, NodeId>,
    roots: Vec<NodeId>,
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.roots == other.roots
    }
}

impl Eq for Dag {}

impl Dag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn add_root(&mut self, id: NodeId) {
        self.roots.push(id);
    }

    pub fn intern(&mut self, mut node: Node) -> NodeId {
        if let Node::Sum(ch) | Node::Product(ch) = &mut node {
            debug_assert!(ch.len() >= 2);
            ch.sort_unstable();
        }
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.index.insert(node.clone(), id);
        self.nodes.push(node);
        id
    }

    /// Interns `op(children)`, or returns the lone child.
    pub fn intern_ac(&mut self, op: AcOp, children: Vec<NodeId>) -> NodeId {
        if children.len() == 1 {
            children[0]
        } else {
            self.intern(Node::ac(op, children))
        }
    }

    fn insert_tree(&mut self, t: &ExprTree) -> NodeId {
        match t {
            ExprTree::Atom(a) => self.intern(Node::Atom(*a)),
            ExprTree::Const(c) => self.intern(Node::Const(c.clone())),
            ExprTree::Power(b, e) => {
                let b = self.insert_tree(b);
                self.intern(Node::Power(b, *e))
            }
            ExprTree::Sum(ch) => {
                let ch = ch.iter().map(|c| self.insert_tree(c)).collect();
                self.intern_ac(AcOp::Sum, ch)
            }
            ExprTree::Product(ch) => {
                let ch = ch.iter().map(|c| self.insert_tree(c)).collect();
                self.intern_ac(AcOp::Product, ch)
            }
        }
    }

    fn is_unit(&self, id: NodeId) -> bool {
        matches!(self.node(id), Node::Const(c) if c.abs().is_one())
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = self.roots.clone();
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.index()], true) {
                continue;
            }
            stack.extend_from_slice(self.node(id).children());
        }
        seen
    }

    /// Operation count with every reachable node counted once.
    pub fn op_count(&self) -> OpCount {
        let mut ops = OpCount::default();
        for (node, live) in self.nodes.iter().zip(self.reachable()) {
            if !live {
                continue;
            }
            match node {
                Node::Sum(ch) => ops.add += ch.len() as u64 - 1,
                Node::Product(ch) => {
                    let costly = ch.iter().filter(|&&c| !self.is_unit(c)).count() as u64;
                    ops.mul += costly.saturating_sub(1);
                }
                Node::Power(_, e) => ops.mul += u64::from(*e) - 1,
                Node::Atom(_) | Node::Const(_) => {}
            }
        }
        ops
    }

    pub fn eval_mod_p(&self, values: &Assignment, atoms: &AtomTable, p: u64) -> Result<Vec<u64>> {
        let mut val = vec![0u64; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            val[i] = match node {
                Node::Atom(a) => values
                    .get(*a)
                    .ok_or_else(|| Error::MissingAssignment(atoms.name(*a).to_string()))?,
                Node::Const(c) => modp::reduce(c, p),
                Node::Power(b, e) => modp::pow(val[b.index()], *e, p),
                Node::Sum(ch) => ch.iter().fold(0, |acc, c| modp::add(acc, val[c.index()], p)),
                Node::Product(ch) => ch
                    .iter()
                    .fold(1 % p, |acc, c| modp::mul(acc, val[c.index()], p)),
            };
        }
        Ok(self.roots.iter().map(|r| val[r.index()]).collect())
    }

    /// Three-address listing of the reachable nodes in topological order,
    /// one `tN = op args` line per node, then one `return tN` per root.
    pub fn listing(&self, atoms: &AtomTable) -> String {
        let mut out = String::new();
        for (i, (node, live)) in self.nodes.iter().zip(self.reachable()).enumerate() {
            if !live {
                continue;
            }
            let id = NodeId(i as u32);
            let _ = match node {
                Node::Atom(a) => writeln!(out, "{id} = atom {}", atoms.name(*a)),
                Node::Const(c) => writeln!(out, "{id} = const {c}"),
                Node::Power(b, e) => writeln!(out, "{id} = pow {b} {e}"),
                Node::Sum(ch) => writeln!(out, "{id} = add {}", join(ch)),
                Node::Product(ch) => writeln!(out, "{id} = mul {}", join(ch)),
            };
        }
        for r in &self.roots {
            let _ = writeln!(out, "return {r}");
        }
        out
    }
}

fn join(ids: &[NodeId]) -> String {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Hash-conses a tree into a single-root DAG.
pub fn build_dag(t: &ExprTree) -> Dag {
    let mut dag = Dag::new();
    let root = dag.insert_tree(t);
    dag.add_root(root);
    dag
}

/// Greedy pairwise CSE over sums and products, iterated to a fixpoint.
///
/// Each round picks the `(operator, {a, b})` pair found among the children of
/// the most nodes of that operator (one count per node), breaking ties by the
/// smallest `(a, b)` in node numbering, names it once and substitutes it
/// everywhere. Unit constants in products are free and never paired.
pub fn eliminate_pairs(d: &Dag) -> Dag {
    let mut w = Work::from_dag(d);
    w.eliminate();
    w.to_dag()
}

pub fn dag_op_count(d: &Dag) -> OpCount {
    d.op_count()
}

/// Whether two DAGs over the same atom table have isomorphic reachable parts.
pub fn same_structure(a: &Dag, b: &Dag) -> bool {
    let mut labels: FxHashMap<Node, NodeId> = FxHashMap::default();
    let mut label = |dag: &Dag| -> Vec<NodeId> {
        let mut map = vec![NodeId(u32::MAX); dag.len()];
        for (i, (node, live)) in dag.nodes.iter().zip(dag.reachable()).enumerate() {
            if !live {
                continue;
            }
            let mut key = match node {
                Node::Atom(_) | Node::Const(_) => node.clone(),
                Node::Power(b, e) => Node::Power(map[b.index()], *e),
                Node::Sum(ch) => Node::Sum(ch.iter().map(|c| map[c.index()]).collect()),
                Node::Product(ch) => Node::Product(ch.iter().map(|c| map[c.index()]).collect()),
            };
            if let Node::Sum(ch) | Node::Product(ch) = &mut key {
                ch.sort_unstable();
            }
            let next = NodeId(labels.len() as u32);
            map[i] = *labels.entry(key).or_insert(next);
        }
        dag.roots.iter().map(|r| map[r.index()]).collect()
    };
    let ra = label(a);
    let rb = label(b);
    ra == rb
}

/// The outcome of Horner plus CSE for one scheme.
#[derive(Debug, Clone)]
pub struct SimplifyResult {
    pub dag: Dag,
    pub ops: OpCount,
    pub scheme: Scheme,
}

/// Horner scheme, hash-consing and pair elimination; `ops.total()` is the
/// score the search minimizes.
pub fn simplify(e: &Expression, s: &Scheme) -> Result<SimplifyResult> {
    let tree = horner::apply_scheme(e, s)?;
    let mut w = Work::from_tree(&tree);
    w.eliminate();
    Ok(SimplifyResult {
        ops: w.op_count(),
        dag: w.to_dag(),
        scheme: s.clone(),
    })
}

/// Operation count after Horner and CSE, for an already validated effective order.
pub(crate) fn score_order(e: &Expression, order: &[AtomId]) -> OpCount {
    let mut w = Work::from_tree(&horner::apply_unchecked(e, order));
    w.eliminate();
    w.op_count()
}
