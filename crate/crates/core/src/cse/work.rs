//! In-place pair elimination over a mutable hash-consed node table.
//!
//! Node ids are stable: a substitution edits the nodes that contain the pair
//! and re-interns them, merging any that become identical with an existing
//! node, and that merge propagates to their parents. Pair counts are kept up
//! to date by delta, with a lazily validated heap for the current maximum.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::hash::BuildHasher;

use hashbrown::HashTable;
use num_bigint::BigInt;
use num_traits::{One, Signed};
use rustc_hash::{FxBuildHasher, FxHashMap};

use super::{AcOp, Dag, Node, NodeId};
use crate::expr::{AtomId, OpCount};
use crate::horner::ExprTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Atom(AtomId),
    Const(u32),
    Power(u32),
    Sum,
    Product,
}

impl Kind {
    fn ac(op: AcOp) -> Kind {
        match op {
            AcOp::Sum => Kind::Sum,
            AcOp::Product => Kind::Product,
        }
    }

    fn op(self) -> Option<AcOp> {
        match self {
            Kind::Sum => Some(AcOp::Sum),
            Kind::Product => Some(AcOp::Product),
            _ => None,
        }
    }
}

/// Packs a pair so that ordering by key is ordering by `(a, b, op)`.
fn pair_key(op: AcOp, a: u32, b: u32) -> u64 {
    (u64::from(a) << 33) | (u64::from(b) << 1) | (op == AcOp::Product) as u64
}

fn unpack(key: u64) -> (AcOp, u32, u32) {
    let op = if key & 1 == 1 { AcOp::Product } else { AcOp::Sum };
    (op, (key >> 33) as u32, ((key >> 1) & 0xffff_ffff) as u32)
}

fn form_hash(kind: Kind, kids: &[u32]) -> u64 {
    FxBuildHasher.hash_one((kind, kids))
}

#[derive(Default)]
pub(super) struct Work {
    kind: Vec<Kind>,
    kids: Vec<Vec<u32>>,
    unit: Vec<bool>,
    alive: Vec<bool>,
    parents: Vec<Vec<u32>>,
    consts: Vec<BigInt>,
    const_ids: FxHashMap<BigInt, u32>,
    table: HashTable<u32>,
    roots: Vec<u32>,
    counts: FxHashMap<u64, u32>,
    heap: BinaryHeap<(u32, Reverse<u64>)>,
    scratch: Vec<u32>,
}

impl Work {
    pub(super) fn from_tree(t: &ExprTree) -> Work {
        let mut w = Work::default();
        let root = w.insert_tree(t);
        w.roots.push(root);
        w
    }

    pub(super) fn from_dag(d: &Dag) -> Work {
        let mut w = Work::default();
        let mut map = vec![u32::MAX; d.len()];
        for (i, (node, live)) in d.nodes().iter().zip(d.reachable()).enumerate() {
            if !live {
                continue;
            }
            let m = |c: &NodeId| map[c.index()];
            map[i] = match node {
                Node::Atom(a) => w.intern(Kind::Atom(*a), Vec::new()),
                Node::Const(c) => w.intern_const(c),
                Node::Power(b, e) => w.intern(Kind::Power(*e), vec![m(b)]),
                Node::Sum(ch) => w.intern_ac(AcOp::Sum, ch.iter().map(m).collect()),
                Node::Product(ch) => w.intern_ac(AcOp::Product, ch.iter().map(m).collect()),
            };
        }
        w.roots = d.roots().iter().map(|r| map[r.index()]).collect();
        w
    }

    fn insert_tree(&mut self, t: &ExprTree) -> u32 {
        match t {
            ExprTree::Atom(a) => self.intern(Kind::Atom(*a), Vec::new()),
            ExprTree::Const(c) => self.intern_const(c),
            ExprTree::Power(b, e) => {
                let b = self.insert_tree(b);
                self.intern(Kind::Power(*e), vec![b])
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

    fn intern_const(&mut self, c: &BigInt) -> u32 {
        let next = self.consts.len() as u32;
        let id = *self.const_ids.entry(c.clone()).or_insert(next);
        if id == next {
            self.consts.push(c.clone());
        }
        self.intern(Kind::Const(id), Vec::new())
    }

    fn intern_ac(&mut self, op: AcOp, kids: Vec<u32>) -> u32 {
        if kids.len() == 1 {
            kids[0]
        } else {
            self.intern(Kind::ac(op), kids)
        }
    }

    fn find(&self, kind: Kind, kids: &[u32]) -> Option<u32> {
        let h = form_hash(kind, kids);
        self.table
            .find(h, |&id| self.kind[id as usize] == kind && self.kids[id as usize] == kids)
            .copied()
    }

    fn intern(&mut self, kind: Kind, mut kids: Vec<u32>) -> u32 {
        if kind.op().is_some() {
            kids.sort_unstable();
        }
        if let Some(id) = self.find(kind, &kids) {
            return id;
        }
        let id = self.kind.len() as u32;
        let mut distinct = kids.clone();
        distinct.dedup();
        for &c in &distinct {
            self.parents[c as usize].push(id);
        }
        self.unit.push(matches!(kind, Kind::Const(c) if self.consts[c as usize].abs().is_one()));
        self.kind.push(kind);
        self.kids.push(kids);
        self.alive.push(true);
        self.parents.push(Vec::new());
        self.link(id);
        id
    }

    /// Enters `n` into the table and the pair counts.
    fn link(&mut self, n: u32) {
        let (kind, kids) = (&self.kind, &self.kids);
        let h = form_hash(kind[n as usize], &kids[n as usize]);
        self.table
            .insert_unique(h, n, |&id| form_hash(kind[id as usize], &kids[id as usize]));
        self.count_pairs(n, true);
    }

    fn unlink(&mut self, n: u32) {
        self.count_pairs(n, false);
        let h = form_hash(self.kind[n as usize], &self.kids[n as usize]);
        if let Ok(entry) = self.table.find_entry(h, |&id| id == n) {
            entry.remove();
        }
    }

    fn count_pairs(&mut self, n: u32, add: bool) {
        let Some(op) = self.kind[n as usize].op() else {
            return;
        };
        let mut d = std::mem::take(&mut self.scratch);
        d.clear();
        d.extend(
            self.kids[n as usize]
                .iter()
                .copied()
                .filter(|&c| op == AcOp::Sum || !self.unit[c as usize]),
        );
        d.dedup();
        for (i, &a) in d.iter().enumerate() {
            for &b in &d[i + 1..] {
                let key = pair_key(op, a, b);
                let c = self.counts.entry(key).or_insert(0);
                if add {
                    *c += 1;
                } else {
                    *c -= 1;
                }
                if *c >= 2 {
                    self.heap.push((*c, Reverse(key)));
                } else if *c == 0 {
                    self.counts.remove(&key);
                }
            }
        }
        self.scratch = d;
    }

    /// The most frequent pair, ties to the smallest `(a, b, op)`.
    fn best_pair(&mut self) -> Option<(AcOp, u32, u32)> {
        while let Some((c, Reverse(key))) = self.heap.pop() {
            if self.counts.get(&key) == Some(&c) {
                return Some(unpack(key));
            }
        }
        None
    }

    fn substitute(&mut self, op: AcOp, a: u32, b: u32) {
        let p = self.intern(Kind::ac(op), vec![a, b]);
        let mut occ = self.parents[a as usize].clone();
        occ.sort_unstable();
        occ.dedup();
        for m in occ {
            let mu = m as usize;
            if m == p
                || !self.alive[mu]
                || self.kind[mu] != Kind::ac(op)
                || !self.kids[mu].contains(&a)
                || !self.kids[mu].contains(&b)
            {
                continue;
            }
            self.unlink(m);
            let kids = &mut self.kids[mu];
            let ia = kids.iter().position(|&c| c == a).unwrap();
            kids.remove(ia);
            let ib = kids.iter().position(|&c| c == b).unwrap();
            kids[ib] = p;
            kids.sort_unstable();
            self.parents[p as usize].push(m);
            self.settle(m);
        }
    }

    /// Re-enters an unlinked node, merging it into an equal one if present.
    fn settle(&mut self, n: u32) {
        match self.find(self.kind[n as usize], &self.kids[n as usize]) {
            Some(s) => self.merge(n, s),
            None => self.link(n),
        }
    }

    fn merge(&mut self, from: u32, into: u32) {
        self.alive[from as usize] = false;
        for r in &mut self.roots {
            if *r == from {
                *r = into;
            }
        }
        let mut ps = std::mem::take(&mut self.parents[from as usize]);
        ps.sort_unstable();
        ps.dedup();
        for q in ps {
            let qu = q as usize;
            if !self.alive[qu] || !self.kids[qu].contains(&from) {
                continue;
            }
            self.unlink(q);
            for c in &mut self.kids[qu] {
                if *c == from {
                    *c = into;
                }
            }
            if self.kind[qu].op().is_some() {
                self.kids[qu].sort_unstable();
            }
            self.parents[into as usize].push(q);
            self.settle(q);
        }
    }

    pub(super) fn eliminate(&mut self) {
        while let Some((op, a, b)) = self.best_pair() {
            self.substitute(op, a, b);
        }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.kind.len()];
        let mut stack = self.roots.clone();
        while let Some(n) = stack.pop() {
            if !std::mem::replace(&mut seen[n as usize], true) {
                stack.extend_from_slice(&self.kids[n as usize]);
            }
        }
        seen
    }

    pub(super) fn op_count(&self) -> OpCount {
        let mut ops = OpCount::default();
        for (n, live) in self.reachable().into_iter().enumerate() {
            if !live {
                continue;
            }
            let kids = &self.kids[n];
            match self.kind[n] {
                Kind::Sum => ops.add += kids.len() as u64 - 1,
                Kind::Product => {
                    let costly = kids.iter().filter(|&&c| !self.unit[c as usize]).count();
                    ops.mul += (costly as u64).saturating_sub(1);
                }
                Kind::Power(e) => ops.mul += u64::from(e) - 1,
                Kind::Atom(_) | Kind::Const(_) => {}
            }
        }
        ops
    }

    /// Exports the reachable nodes into a fresh [`Dag`], children first and
    /// otherwise in id order, so a DAG that went through here comes back
    /// unchanged.
    pub(super) fn to_dag(&self) -> Dag {
        let live = self.reachable();
        let mut waiting = vec![0usize; self.kind.len()];
        let mut heap = BinaryHeap::new();
        for (n, kids) in self.kids.iter().enumerate() {
            if !live[n] {
                continue;
            }
            let mut distinct = kids.clone();
            distinct.sort_unstable();
            distinct.dedup();
            waiting[n] = distinct.len();
            if waiting[n] == 0 {
                heap.push(Reverse(n as u32));
            }
        }
        let mut dag = Dag::new();
        let mut map = vec![NodeId(u32::MAX); self.kind.len()];
        while let Some(Reverse(n)) = heap.pop() {
            let n = n as usize;
            let kids: Vec<NodeId> = self.kids[n].iter().map(|&c| map[c as usize]).collect();
            map[n] = dag.intern(match self.kind[n] {
                Kind::Atom(a) => Node::Atom(a),
                Kind::Const(c) => Node::Const(self.consts[c as usize].clone()),
                Kind::Power(e) => Node::Power(kids[0], e),
                Kind::Sum => Node::Sum(kids),
                Kind::Product => Node::Product(kids),
            });
            let mut ps = self.parents[n].clone();
            ps.sort_unstable();
            ps.dedup();
            for p in ps {
                let pu = p as usize;
                if live[pu] && self.alive[pu] && self.kids[pu].contains(&(n as u32)) {
                    waiting[pu] -= 1;
                    if waiting[pu] == 0 {
                        heap.push(Reverse(p));
                    }
                }
            }
        }
        for &r in &self.roots {
            dag.add_root(map[r as usize]);
        }
        dag
    }
}
