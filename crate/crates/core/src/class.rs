//! Finite fragments of classes: isomorph-free enumeration, amalgams, and
//! bounded checks of the hereditary, joint embedding and amalgamation
//! properties.
//!
//! Infinite-class properties are only ever verified up to a size bound with
//! an explicit slack, and reports say so.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cameron::{cameron_signature, enumerate_cameron};
use crate::canon::canonical_form;
use crate::embed::{automorphisms, enumerate_embeddings, first_embedding_pinned, is_embedding, Embedding};
use crate::error::{Error, Result};
use crate::kay::{kay_edges, parity_violation, reconstruct_edges, KAY_SYMBOL};
use crate::structure::{Signature, Structure, Tuple};
use crate::subsets::{binomial, bit, k_subsets, EdgeSet};

/// Named generators for class pools.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Unordered `k`-hypergraphs.
    Hypergraphs,
    /// Ordered `k`-hypergraphs.
    OrderedHypergraphs,
    /// Kay-graphs of `k`-hypergraphs (arity `k+1`).
    Kay,
    /// Ordered Kay-graphs of ordered `k`-hypergraphs.
    OrderedKay,
    LinearOrders,
    Tournaments,
    /// Tournaments with the C-relation of a binary tree on their vertices.
    Cameron,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Hypergraphs,
        Family::OrderedHypergraphs,
        Family::Kay,
        Family::OrderedKay,
        Family::LinearOrders,
        Family::Tournaments,
        Family::Cameron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hypergraphs => "hypergraphs",
            Family::OrderedHypergraphs => "ordered-hypergraphs",
            Family::Kay => "kay",
            Family::OrderedKay => "ordered-kay",
            Family::LinearOrders => "linear-orders",
            Family::Tournaments => "tournaments",
            Family::Cameron => "cameron",
        }
    }

    /// Whether `k` is meaningful for this family.
    pub fn uses_k(self) -> bool {
        matches!(
            self,
            Family::Hypergraphs | Family::OrderedHypergraphs | Family::Kay | Family::OrderedKay
        )
    }

    pub fn is_ordered(self) -> bool {
        matches!(self, Family::OrderedHypergraphs | Family::OrderedKay | Family::LinearOrders)
    }

    pub fn signature(self, k: usize) -> Signature {
        match self {
            Family::Hypergraphs => Signature::hypergraph("R", k, false),
            Family::OrderedHypergraphs => Signature::hypergraph("R", k, true),
            Family::Kay => Signature::hypergraph(KAY_SYMBOL, k + 1, false),
            Family::OrderedKay => Signature::hypergraph(KAY_SYMBOL, k + 1, true),
            Family::LinearOrders => Signature::linear_order(),
            Family::Tournaments => Signature::tournament(),
            Family::Cameron => cameron_signature(),
        }
    }

    /// Direct membership test, where one exists without enumeration.
    pub fn is_member(self, k: usize, s: &Structure) -> Option<bool> {
        if *s.signature() != self.signature(k) {
            return Some(false);
        }
        match self {
            Family::Hypergraphs | Family::OrderedHypergraphs | Family::LinearOrders => Some(true),
            Family::Kay | Family::OrderedKay => {
                let edges = s.edge_set(0).expect("hyperedge symbol");
                Some(parity_violation(&edges).is_none())
            }
            Family::Tournaments => Some(is_tournament(s)),
            Family::Cameron => None,
        }
    }

    /// Number of labelled candidates generated for members of size `m`.
    fn labelled_count(self, k: usize, m: usize) -> u128 {
        let pow = |e: u64| if e >= 127 { u128::MAX } else { 1u128 << e };
        match self {
            Family::Hypergraphs | Family::OrderedHypergraphs => pow(binomial(m, k)),
            Family::Kay | Family::OrderedKay => pow(binomial(m.saturating_sub(1), k)),
            Family::LinearOrders => 1,
            Family::Tournaments => pow(binomial(m, 2)),
            Family::Cameron => {
                let trees: u128 = (1..=m.max(2) as u128 * 2 - 3).step_by(2).product();
                pow(binomial(m, 2)).saturating_mul(trees)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// Whether the first symbol (binary) is a tournament: loopless, with
/// exactly one arc between any two distinct vertices.
pub fn is_tournament(s: &Structure) -> bool {
    let n = s.size();
    (0..n).all(|a| !s.holds(0, &[a, a]))
        && (0..n).all(|a| (a + 1..n).all(|b| s.holds(0, &[a, b]) != s.holds(0, &[b, a])))
}

/// The tournament whose `r`-th pair `{u < v}` (colex rank) is the arc
/// `u -> v` when bit `r` of `code` is set and `v -> u` otherwise.
pub fn tournament_from_code(n: usize, code: u64) -> Structure {
    let arcs = k_subsets(n, 2)
        .enumerate()
        .map(|(r, m)| {
            let u = m.trailing_zeros() as usize;
            let v = 63 - m.leading_zeros() as usize;
            if code >> r & 1 == 1 {
                vec![u, v]
            } else {
                vec![v, u]
            }
        })
        .collect();
    Structure::new(Signature::tournament(), n, vec![arcs]).expect("valid tournament")
}

/// The labelled Kay-graph on `m` vertices with parameter `code`: the Kay
/// graph of the `k`-hypergraph whose edges avoiding vertex 0 are selected
/// by `code`, and whose edges through vertex 0 are all present for odd `k`
/// and all absent for even `k`. Codes `0..2^C(m-1, k)` give every
/// labelled Kay-graph on `m` vertices exactly once.
pub fn kay_labelled(m: usize, k: usize, code: u64) -> EdgeSet {
    let mut r = EdgeSet::empty(m, k);
    if m > 0 {
        for (j, x) in k_subsets(m - 1, k).enumerate() {
            if code >> j & 1 == 1 {
                r.insert(x << 1);
            }
        }
        if k % 2 == 1 {
            for x in k_subsets(m - 1, k - 1) {
                r.insert(x << 1 | 1);
            }
        }
    }
    kay_edges(&r)
}

/// Canonical representatives of a class fragment, grouped by size.
#[derive(Clone, Debug)]
pub struct ClassPool {
    family: Option<Family>,
    k: usize,
    signature: Arc<Signature>,
    by_size: Vec<Vec<Structure>>,
    index: HashSet<Structure>,
}

impl ClassPool {
    /// A pool from explicit members; members are canonicalised and
    /// duplicates dropped. `max_size` must cover every member.
    pub fn from_members(signature: Signature, max_size: usize, members: impl IntoIterator<Item = Structure>) -> Result<Self> {
        let signature = Arc::new(signature);
        let mut by_size = vec![BTreeSet::new(); max_size + 1];
        for s in members {
            if *s.signature() != *signature {
                return Err(Error::SignatureMismatch(format!("{} vs {}", s.signature(), signature)));
            }
            if s.size() > max_size {
                return Err(Error::Structure(format!("member of size {} exceeds the pool bound {max_size}", s.size())));
            }
            by_size[s.size()].insert(canonical_form(&s).structure);
        }
        Ok(Self::assemble(None, 0, signature, by_size.into_iter().map(|s| s.into_iter().collect()).collect()))
    }

    fn assemble(family: Option<Family>, k: usize, signature: Arc<Signature>, by_size: Vec<Vec<Structure>>) -> Self {
        let index = by_size.iter().flatten().cloned().collect();
        ClassPool {
            family,
            k,
            signature,
            by_size,
            index,
        }
    }

    /// All induced substructures of the generators, as a pool.
    pub fn hereditary_closure(signature: Signature, generators: &[Structure]) -> Result<Self> {
        let max = generators.iter().map(Structure::size).max().unwrap_or(0);
        let mut subs = BTreeSet::new();
        for g in generators {
            for m in 0..1u64 << g.size() {
                subs.insert(canonical_form(&g.induced_on_mask(m)).structure);
            }
        }
        ClassPool::from_members(signature, max, subs)
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn max_size(&self) -> usize {
        self.by_size.len() - 1
    }

    pub fn of_size(&self, m: usize) -> &[Structure] {
        self.by_size.get(m).map_or(&[], Vec::as_slice)
    }

    /// Members by increasing size, sorted within each size.
    pub fn iter(&self) -> impl Iterator<Item = &Structure> {
        self.by_size.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_size.iter().map(Vec::len).collect()
    }

    /// Whether a structure isomorphic to `s` is a member.
    pub fn contains(&self, s: &Structure) -> bool {
        *s.signature() == *self.signature && self.index.contains(&canonical_form(s).structure)
    }

    /// Removes the member isomorphic to `s`; the pool is then anonymous.
    pub fn remove(&mut self, s: &Structure) -> bool {
        let c = canonical_form(s).structure;
        if !self.index.remove(&c) {
            return false;
        }
        self.by_size[c.size()].retain(|m| *m != c);
        self.family = None;
        true
    }
}

/// Default number of labelled candidates an enumeration may generate.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 24;

/// All members of `family` with sizes `0..=n`, up to isomorphism.
pub fn enumerate_class(family: Family, k: usize, n: usize, budget: u64) -> Result<ClassPool> {
    if family.uses_k() && k < 2 {
        return Err(Error::NotAHypergraph {
            min_arity: 2,
            reason: format!("k = {k}"),
        });
    }
    let estimate = (0..=n).fold(0u128, |acc, m| acc.saturating_add(family.labelled_count(k, m)));
    if estimate > budget as u128 {
        return Err(Error::Budget {
            what: format!("enumerating {family} (k = {k}) up to size {n}"),
            estimate,
            budget: budget as u128,
        });
    }
    let signature = Arc::new(family.signature(k));
    let mut by_size = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let members: Vec<Structure> = match family {
            Family::Hypergraphs => dedup_unordered((0..1u64 << binomial(m, k)).into_par_iter().map(|code| {
                Structure::from_edge_set("R", &EdgeSet::from_code(m, k, code), false)
            })),
            Family::OrderedHypergraphs => {
                let mut v: Vec<Structure> = (0..1u64 << binomial(m, k))
                    .map(|code| Structure::from_edge_set("R", &EdgeSet::from_code(m, k, code), true))
                    .collect();
                v.sort();
                v
            }
            Family::Kay => dedup_unordered(
                (0..1u64 << binomial(m.saturating_sub(1), k))
                    .into_par_iter()
                    .map(|code| Structure::from_edge_set(KAY_SYMBOL, &kay_labelled(m, k, code), false)),
            ),
            Family::OrderedKay => {
                let mut v: Vec<Structure> = (0..1u64 << binomial(m.saturating_sub(1), k))
                    .map(|code| Structure::from_edge_set(KAY_SYMBOL, &kay_labelled(m, k, code), true))
                    .collect();
                v.sort();
                v
            }
            Family::LinearOrders => vec![Structure::chain(m)],
            Family::Tournaments => dedup_unordered(
                (0..1u64 << binomial(m, 2))
                    .into_par_iter()
                    .map(|code| tournament_from_code(m, code)),
            ),
            Family::Cameron => enumerate_cameron(m, budget)?,
        };
        by_size.push(members);
    }
    Ok(ClassPool::assemble(Some(family), k, signature, by_size))
}

fn dedup_unordered(items: impl ParallelIterator<Item = Structure>) -> Vec<Structure> {
    let set: BTreeSet<Structure> = items
        .map(|s| canonical_form(&s).structure)
        .fold(BTreeSet::new, |mut acc, s| {
            acc.insert(s);
            acc
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    set.into_iter().collect()
}

/// Two embeddings `e: A -> B` and `f: A -> C` to be amalgamated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamationInstance {
    pub a: Structure,
    pub b: Structure,
    pub c: Structure,
    pub e: Embedding,
    pub f: Embedding,
}

impl AmalgamationInstance {
    pub fn new(a: Structure, b: Structure, c: Structure, e: Embedding, f: Embedding) -> Result<Self> {
        if a.signature() != b.signature() || a.signature() != c.signature() {
            return Err(Error::SignatureMismatch("A, B and C must share a signature".into()));
        }
        if !is_embedding(&a, &b, e.map()) {
            return Err(Error::Embedding(format!("{:?} is not an embedding of A into B", e.map())));
        }
        if !is_embedding(&a, &c, f.map()) {
            return Err(Error::Embedding(format!("{:?} is not an embedding of A into C", f.map())));
        }
        Ok(AmalgamationInstance { a, b, c, e, f })
    }

    /// The joint embedding instance for `B` and `C` (empty `A`).
    pub fn joint(b: Structure, c: Structure) -> Result<Self> {
        let a = Structure::empty(b.signature_arc().clone(), 0)?;
        AmalgamationInstance::new(a, b, c, Embedding(Vec::new()), Embedding(Vec::new()))
    }

    /// Identifies `f(x)` with `e(x)`: vertices of `B` keep their labels and
    /// the remaining vertices of `C` follow in increasing order. Returns the
    /// map on `C` and the total vertex count.
    fn glue(&self) -> (Vec<usize>, usize) {
        let mut h = vec![usize::MAX; self.c.size()];
        for (x, &y) in self.f.map().iter().enumerate() {
            h[y] = self.e.image(x);
        }
        let mut next = self.b.size();
        for slot in h.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = next;
            next += 1;
        }
        (h, next)
    }
}

/// An amalgam `D` with `g: B -> D` and `h: C -> D`, `g∘e = h∘f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub d: Structure,
    pub g: Embedding,
    pub h: Embedding,
}

fn mapped(tuples: Vec<Tuple>, map: &[usize]) -> impl Iterator<Item = Tuple> + '_ {
    tuples.into_iter().map(move |t| t.iter().map(|&v| map[v]).collect())
}

/// Free amalgam over an unordered signature: `D` has exactly the tuples of
/// `g(B)` and `h(C)`.
pub fn free_amalgam(inst: &AmalgamationInstance) -> Result<Amalgam> {
    if inst.b.is_ordered() {
        return Err(Error::Structure(
            "free amalgamation needs an unordered signature; use the order amalgam".into(),
        ));
    }
    let (h, size) = inst.glue();
    let g: Vec<usize> = (0..inst.b.size()).collect();
    let rels = (0..inst.b.signature().len())
        .map(|si| inst.b.tuples(si).into_iter().chain(mapped(inst.c.tuples(si), &h)).collect())
        .collect();
    let d = Structure::new(inst.b.signature_arc().clone(), size, rels)?;
    Ok(Amalgam {
        d,
        g: Embedding(g),
        h: Embedding(h),
    })
}

/// Amalgam of ordered structures: the free amalgam of the other relations,
/// ordered by a linear extension of the two chains. Ties go to the lower
/// source index, `B` before `C`.
pub fn order_amalgam(inst: &AmalgamationInstance) -> Result<Amalgam> {
    if !inst.b.is_ordered() {
        return Err(Error::Structure("the order amalgam needs an ordered signature".into()));
    }
    if !inst.e.is_increasing() || !inst.f.is_increasing() {
        return Err(Error::Embedding("embeddings of ordered structures must be increasing".into()));
    }
    let (h0, size) = inst.glue();
    let nb = inst.b.size();
    // Successor lists of the two chains, and the tie-break key per vertex.
    let mut succ = vec![Vec::new(); size];
    let mut indeg = vec![0usize; size];
    let mut key = vec![(0usize, 0u8); size];
    for v in 0..nb {
        key[v] = (v, 0);
        if v + 1 < nb {
            succ[v].push(v + 1);
            indeg[v + 1] += 1;
        }
    }
    for c in 0..inst.c.size() {
        if h0[c] >= nb {
            key[h0[c]] = (c, 1);
        }
        if c + 1 < inst.c.size() {
            succ[h0[c]].push(h0[c + 1]);
            indeg[h0[c + 1]] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<((usize, u8), usize)>> =
        (0..size).filter(|&v| indeg[v] == 0).map(|v| Reverse((key[v], v))).collect();
    let mut pos = vec![usize::MAX; size];
    let mut next = 0;
    while let Some(Reverse((_, v))) = heap.pop() {
        pos[v] = next;
        next += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                heap.push(Reverse((key[w], w)));
            }
        }
    }
    if next != size {
        return Err(Error::Invariant("the two orders do not admit a common extension".into()));
    }
    let g: Vec<usize> = pos[..nb].to_vec();
    let h: Vec<usize> = h0.iter().map(|&v| pos[v]).collect();
    let order = inst.b.signature().order_index();
    let rels = (0..inst.b.signature().len())
        .map(|si| {
            if Some(si) == order {
                Vec::new()
            } else {
                mapped(inst.b.tuples(si), &g).chain(mapped(inst.c.tuples(si), &h)).collect()
            }
        })
        .collect();
    let d = Structure::new(inst.b.signature_arc().clone(), size, rels)?;
    Ok(Amalgam {
        d,
        g: Embedding(g),
        h: Embedding(h),
    })
}

/// Amalgam of Kay-graphs (ordered or not): reconstruct all three around a
/// common star vertex, amalgamate the preimages, and take the Kay-graph.
pub fn kay_amalgam(inst: &AmalgamationInstance) -> Result<Amalgam> {
    let sym = inst.b.signature().single_hyperedge().ok_or_else(|| Error::NotAHypergraph {
        min_arity: 3,
        reason: "expected a Kay-graph signature".into(),
    })?;
    let ordered = inst.b.is_ordered();
    let preimage = |s: &Structure, star: Option<usize>| -> Result<Structure> {
        let edges = s.edge_set(sym).expect("hyperedge symbol");
        let r = match star {
            Some(st) => reconstruct_edges(&edges, st)?,
            None => EdgeSet::empty(s.size(), edges.arity() - 1),
        };
        Ok(Structure::from_edge_set("R", &r, ordered))
    };
    let star_of = |s: &Structure, fixed: Option<usize>| fixed.or(if s.size() > 0 { Some(0) } else { None });
    let a_star = if inst.a.size() > 0 { Some(0) } else { None };
    let ha = preimage(&inst.a, a_star)?;
    let hb = preimage(&inst.b, star_of(&inst.b, a_star.map(|s| inst.e.image(s))))?;
    let hc = preimage(&inst.c, star_of(&inst.c, a_star.map(|s| inst.f.image(s))))?;
    let lifted = AmalgamationInstance::new(ha, hb, hc, inst.e.clone(), inst.f.clone())
        .map_err(|e| Error::Invariant(format!("preimages do not carry the embeddings: {e}")))?;
    let am = if ordered { order_amalgam(&lifted)? } else { free_amalgam(&lifted)? };
    let edges = am.d.edge_set(0).expect("hyperedge symbol");
    let d = Structure::from_edge_set(KAY_SYMBOL, &kay_edges(&edges), ordered)
        .with_signature(inst.b.signature_arc().clone())?;
    check_amalgam(inst, &d, &am.g, &am.h)?;
    Ok(Amalgam { d, g: am.g, h: am.h })
}

/// Amalgam of tournaments: the union of both, with every remaining pair
/// oriented from `B` to `C`.
pub fn tournament_amalgam(inst: &AmalgamationInstance) -> Result<Amalgam> {
    if *inst.b.signature() != Signature::tournament() {
        return Err(Error::SignatureMismatch("expected tournaments".into()));
    }
    let (h, size) = inst.glue();
    let nb = inst.b.size();
    let mut arcs: Vec<Tuple> = inst.b.tuples(0);
    arcs.extend(mapped(inst.c.tuples(0), &h));
    let img_f: HashSet<usize> = inst.f.map().iter().copied().collect();
    let img_e: HashSet<usize> = inst.e.map().iter().copied().collect();
    for b in (0..nb).filter(|b| !img_e.contains(b)) {
        for c in (0..inst.c.size()).filter(|c| !img_f.contains(c)) {
            arcs.push(vec![b, h[c]]);
        }
    }
    let d = Structure::new(Signature::tournament(), size, vec![arcs])?;
    Ok(Amalgam {
        d,
        g: Embedding((0..nb).collect()),
        h: Embedding(h),
    })
}

/// Checks that `g` and `h` embed `B` and `C` into `d` with `g∘e = h∘f`.
pub fn check_amalgam(inst: &AmalgamationInstance, d: &Structure, g: &Embedding, h: &Embedding) -> Result<()> {
    if !is_embedding(&inst.b, d, g.map()) || !is_embedding(&inst.c, d, h.map()) {
        return Err(Error::Invariant("amalgam maps are not embeddings".into()));
    }
    if inst.e.then(g) != inst.f.then(h) {
        return Err(Error::Invariant("amalgam square does not commute".into()));
    }
    Ok(())
}

/// The constructive amalgam for a family, where one is implemented.
pub fn family_amalgam(family: Family, inst: &AmalgamationInstance) -> Option<Result<Amalgam>> {
    Some(match family {
        Family::Hypergraphs => free_amalgam(inst),
        Family::OrderedHypergraphs | Family::LinearOrders => order_amalgam(inst),
        Family::Kay | Family::OrderedKay => kay_amalgam(inst),
        Family::Tournaments => tournament_amalgam(inst),
        Family::Cameron => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "HP")]
    Hereditary,
    #[serde(rename = "JEP")]
    JointEmbedding,
    #[serde(rename = "AP")]
    Amalgamation,
}

impl Property {
    pub fn short(self) -> &'static str {
        match self {
            Property::Hereditary => "HP",
            Property::JointEmbedding => "JEP",
            Property::Amalgamation => "AP",
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "HP" => Ok(Property::Hereditary),
            "JEP" => Ok(Property::JointEmbedding),
            "AP" => Ok(Property::Amalgamation),
            _ => Err(Error::Parse(format!("unknown property {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// Deleting `vertex` from `member` leaves a non-member.
    Hereditary { member: Structure, vertex: usize },
    /// An instance with no witness of size at most `|B| + |C| - |A|`.
    Amalgamation(Box<AmalgamationInstance>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub max_size: usize,
    pub slack: usize,
    pub holds: bool,
    pub instances: u64,
    /// Instances settled by the family's own amalgam construction.
    pub constructive: u64,
    /// Instances settled by searching the witness pool.
    pub searched: u64,
    /// Instances whose smallest possible witness exceeds the witness pool.
    pub unresolved: u64,
    pub counterexample: Option<Counterexample>,
}

impl PropertyReport {
    pub fn summary(&self) -> String {
        let verdict = if self.holds { "verified" } else { "refuted" };
        let mut s = format!(
            "{} {verdict} up to size {} with slack {}: {} instances",
            self.property.short(),
            self.max_size,
            self.slack,
            self.instances
        );
        if self.property != Property::Hereditary {
            s.push_str(&format!(
                " ({} constructive, {} by search, {} unresolved)",
                self.constructive, self.searched, self.unresolved
            ));
        }
        s
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Witnesses may have up to `max_size + slack` vertices.
    pub slack: usize,
    pub budget: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            slack: 0,
            budget: DEFAULT_ENUMERATION_BUDGET,
        }
    }
}

/// Bounded check of HP, JEP or AP on a pool.
///
/// HP is checked by single-vertex deletions, which suffices by induction.
/// For JEP and AP every instance from pool members is tried (embeddings up
/// to automorphisms of the targets): first the family's own amalgam,
/// verified against the family; then a search of the witness pool, i.e. the
/// family enumerated to `max_size + slack` (or the pool itself for anonymous
/// pools). A counterexample is only reported when every structure that
/// could serve as a witness was searched.
pub fn check_property(pool: &ClassPool, which: Property, opts: CheckOptions) -> Result<PropertyReport> {
    let mut report = PropertyReport {
        property: which,
        max_size: pool.max_size(),
        slack: opts.slack,
        holds: true,
        instances: 0,
        constructive: 0,
        searched: 0,
        unresolved: 0,
        counterexample: None,
    };
    if which == Property::Hereditary {
        for m in pool.iter() {
            for v in 0..m.size() {
                report.instances += 1;
                let sub = m.induced_on_mask(((1u64 << m.size()) - 1) & !bit(v));
                if !pool.contains(&sub) {
                    report.holds = false;
                    report.counterexample = Some(Counterexample::Hereditary { member: m.clone(), vertex: v });
                    return Ok(report);
                }
            }
        }
        return Ok(report);
    }
    let witness_pool = match pool.family {
        Some(f) if opts.slack > 0 => enumerate_class(f, pool.k, pool.max_size() + opts.slack, opts.budget)?,
        Some(_) => pool.clone(),
        None if opts.slack == 0 => pool.clone(),
        None => {
            return Err(Error::Structure(
                "a positive slack needs a pool generated from a named family".into(),
            ))
        }
    };
    let members: Vec<&Structure> = pool.iter().collect();
    let empty = Structure::empty(pool.signature.clone(), 0)?;
    let bases: Vec<&Structure> = match which {
        Property::JointEmbedding => vec![&empty],
        _ => members.clone(),
    };
    for a in bases {
        for (i, b) in members.iter().enumerate() {
            if b.size() < a.size() {
                continue;
            }
            let es = embeddings_up_to_target(a, b)?;
            for c in &members[i..] {
                if c.size() < a.size() {
                    continue;
                }
                let fs = embeddings_up_to_target(a, c)?;
                for e in &es {
                    for f in &fs {
                        if b == c && f < e {
                            continue;
                        }
                        report.instances += 1;
                        let inst = AmalgamationInstance {
                            a: a.clone(),
                            b: (*b).clone(),
                            c: (*c).clone(),
                            e: e.clone(),
                            f: f.clone(),
                        };
                        match settle(pool, &witness_pool, &inst)? {
                            Settled::Constructive => report.constructive += 1,
                            Settled::Searched => report.searched += 1,
                            Settled::Unresolved => report.unresolved += 1,
                            Settled::Refuted => {
                                report.holds = false;
                                report.counterexample = Some(Counterexample::Amalgamation(Box::new(inst)));
                                return Ok(report);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

enum Settled {
    Constructive,
    Searched,
    Unresolved,
    Refuted,
}

fn settle(pool: &ClassPool, witnesses: &ClassPool, inst: &AmalgamationInstance) -> Result<Settled> {
    if let Some(family) = pool.family {
        if let Some(Ok(am)) = family_amalgam(family, inst) {
            let member = family
                .is_member(pool.k, &am.d)
                .unwrap_or_else(|| witnesses.contains(&am.d));
            if member && check_amalgam(inst, &am.d, &am.g, &am.h).is_ok() {
                return Ok(Settled::Constructive);
            }
        }
    }
    let lo = inst.b.size().max(inst.c.size());
    let bound = inst.b.size() + inst.c.size() - inst.a.size();
    for m in lo..=bound.min(witnesses.max_size()) {
        for d in witnesses.of_size(m) {
            if has_amalgam_maps(inst, d)? {
                return Ok(Settled::Searched);
            }
        }
    }
    Ok(if bound <= witnesses.max_size() {
        Settled::Refuted
    } else {
        Settled::Unresolved
    })
}

fn has_amalgam_maps(inst: &AmalgamationInstance, d: &Structure) -> Result<bool> {
    for g in enumerate_embeddings(&inst.b, d)? {
        let mut fixed = vec![None; inst.c.size()];
        for (x, &y) in inst.f.map().iter().enumerate() {
            fixed[y] = Some(g.image(inst.e.image(x)));
        }
        if first_embedding_pinned(&inst.c, d, &fixed)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Embeddings `A -> B`, one per orbit of `Aut(B)` acting by composition.
pub fn embeddings_up_to_target(a: &Structure, b: &Structure) -> Result<Vec<Embedding>> {
    let auts = automorphisms(b);
    let mut reps = BTreeSet::new();
    for e in enumerate_embeddings(a, b)? {
        let least = auts
            .iter()
            .map(|s| Embedding(e.map().iter().map(|&v| s[v]).collect()))
            .min()
            .expect("identity");
        reps.insert(least);
    }
    Ok(reps.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kay::kay;

    fn graph(n: usize, edges: &[[usize; 2]]) -> Structure {
        Structure::new(
            Signature::hypergraph("R", 2, false),
            n,
            vec![edges.iter().map(|e| e.to_vec()).collect()],
        )
        .unwrap()
    }

    #[test]
    fn graph_counts() {
        let pool = enumerate_class(Family::Hypergraphs, 2, 4, 1 << 20).unwrap();
        assert_eq!(pool.counts(), vec![1, 1, 2, 4, 11]);
    }

    #[test]
    fn ordered_graph_counts() {
        let pool = enumerate_class(Family::OrderedHypergraphs, 2, 3, 1 << 20).unwrap();
        assert_eq!(pool.of_size(3).len(), 8);
    }

    #[test]
    fn small_ordered_kay_graphs_are_empty() {
        let pool = enumerate_class(Family::OrderedKay, 3, 3, 1 << 20).unwrap();
        assert_eq!(pool.counts(), vec![1, 1, 1, 1]);
        assert!(pool.iter().all(|s| s.relation_len(0) == 0));
    }

    #[test]
    fn two_graph_counts() {
        // Two-graphs on n vertices: 1, 1, 2, 3, 7, 16 for n = 1..6.
        let pool = enumerate_class(Family::Kay, 2, 6, 1 << 20).unwrap();
        assert_eq!(pool.counts(), vec![1, 1, 1, 2, 3, 7, 16]);
    }

    #[test]
    fn tournament_counts() {
        let pool = enumerate_class(Family::Tournaments, 0, 5, 1 << 20).unwrap();
        assert_eq!(pool.counts(), vec![1, 1, 1, 2, 4, 12]);
        assert!(pool.iter().all(is_tournament));
    }

    #[test]
    fn budget_refusal_carries_estimate() {
        match enumerate_class(Family::Hypergraphs, 3, 8, 1000) {
            Err(Error::Budget { estimate, .. }) => assert!(estimate > 1u128 << 50),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn members_pass_family_tests() {
        for (family, k, n) in [
            (Family::Kay, 2, 5),
            (Family::OrderedKay, 3, 6),
            (Family::OrderedKay, 2, 5),
            (Family::Tournaments, 0, 4),
            (Family::Hypergraphs, 3, 5),
        ] {
            let pool = enumerate_class(family, k, n, 1 << 22).unwrap();
            assert!(pool.iter().all(|s| family.is_member(k, s) == Some(true)), "{family}");
        }
    }

    #[test]
    fn labelled_kay_parametrisation_is_a_bijection() {
        // Against all images of all k-hypergraphs, labelled.
        for k in 2..=3 {
            for m in 0..=5 {
                let images: BTreeSet<EdgeSet> =
                    (0..1u64 << binomial(m, k)).map(|c| kay_edges(&EdgeSet::from_code(m, k, c))).collect();
                let param: Vec<EdgeSet> = (0..1u64 << binomial(m.saturating_sub(1), k))
                    .map(|c| kay_labelled(m, k, c))
                    .collect();
                let distinct: BTreeSet<EdgeSet> = param.iter().cloned().collect();
                assert_eq!(distinct.len(), param.len());
                assert_eq!(distinct, images);
            }
        }
    }

    #[test]
    fn kay_pools_two_ways() {
        // Deduplicated images versus every hypergraph passing the parity test.
        for k in 2..=3 {
            for m in 0..=5 {
                let images: BTreeSet<Structure> = (0..1u64 << binomial(m, k))
                    .map(|c| {
                        let s = kay(&Structure::from_edge_set("R", &EdgeSet::from_code(m, k, c), false)).unwrap();
                        canonical_form(&s).structure
                    })
                    .collect();
                let parity: BTreeSet<Structure> = (0..1u64 << binomial(m, k + 1))
                    .map(|c| EdgeSet::from_code(m, k + 1, c))
                    .filter(|s| parity_violation(s).is_none())
                    .map(|s| canonical_form(&Structure::from_edge_set(KAY_SYMBOL, &s, false)).structure)
                    .collect();
                assert_eq!(images, parity, "k = {k}, m = {m}");
                let pool = enumerate_class(Family::Kay, k, m, 1 << 20).unwrap();
                assert_eq!(pool.of_size(m).iter().cloned().collect::<BTreeSet<_>>(), images);
            }
        }
    }

    #[test]
    fn hypergraph_pools_match_labelled_brute_force() {
        for k in 2..=3 {
            let pool = enumerate_class(Family::Hypergraphs, k, 4, 1 << 20).unwrap();
            for m in 0..=4 {
                let brute: BTreeSet<Structure> = (0..1u64 << binomial(m, k))
                    .map(|c| canonical_form(&Structure::from_edge_set("R", &EdgeSet::from_code(m, k, c), false)).structure)
                    .collect();
                assert_eq!(pool.of_size(m).to_vec(), brute.into_iter().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn disjoint_union_for_empty_base() {
        let e = graph(2, &[[0, 1]]);
        let inst = AmalgamationInstance::joint(e.clone(), e).unwrap();
        let am = free_amalgam(&inst).unwrap();
        assert_eq!(am.d, graph(4, &[[0, 1], [2, 3]]));
    }

    #[test]
    fn free_amalgam_of_two_edges_over_a_point() {
        let p = graph(1, &[]);
        let e = graph(2, &[[0, 1]]);
        let inst = AmalgamationInstance::new(p, e.clone(), e, Embedding(vec![0]), Embedding(vec![0])).unwrap();
        let am = free_amalgam(&inst).unwrap();
        assert_eq!(am.d, graph(3, &[[0, 1], [0, 2]]));
        check_amalgam(&inst, &am.d, &am.g, &am.h).unwrap();
    }

    #[test]
    fn free_amalgam_rejects_orders() {
        let c = Structure::chain(1);
        let inst = AmalgamationInstance::joint(c.clone(), c).unwrap();
        assert!(free_amalgam(&inst).is_err());
        assert!(AmalgamationInstance::new(graph(1, &[]), graph(2, &[[0, 1]]), graph(1, &[]), Embedding(vec![1]), Embedding(vec![1])).is_err());
    }

    #[test]
    fn kay_of_free_amalgams() {
        // K(D) restricted to the images of B and C is K(B) and K(C).
        for k in 2..=3 {
            let pool = enumerate_class(Family::Hypergraphs, k, 4, 1 << 20).unwrap();
            let members: Vec<&Structure> = pool.iter().collect();
            for a in members.iter().filter(|s| s.size() <= 2) {
                for b in &members {
                    for c in &members {
                        for e in embeddings_up_to_target(a, b).unwrap() {
                            for f in embeddings_up_to_target(a, c).unwrap() {
                                let inst = AmalgamationInstance { a: (*a).clone(), b: (*b).clone(), c: (*c).clone(), e: e.clone(), f };
                                let am = free_amalgam(&inst).unwrap();
                                check_amalgam(&inst, &am.d, &am.g, &am.h).unwrap();
                                let (kb, kc, kd) = (kay(b).unwrap(), kay(c).unwrap(), kay(&am.d).unwrap());
                                assert!(is_embedding(&kb, &kd, am.g.map()));
                                assert!(is_embedding(&kc, &kd, am.h.map()));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn order_amalgam_of_points() {
        let p = Structure::chain(1);
        let inst = AmalgamationInstance::joint(p.clone(), p).unwrap();
        let am = order_amalgam(&inst).unwrap();
        assert_eq!(am.d, Structure::chain(2));
        assert_eq!(am.g.map(), &[0]);
        assert_eq!(am.h.map(), &[1]);
    }

    #[test]
    fn order_amalgam_interleaves() {
        // B = 0<1<2 and C = 0<1<2 glued along B1 = C0: C's new vertices go
        // after B1, and the tie with B2 is broken by index, B first.
        let b = Structure::chain(3);
        let a = Structure::chain(1);
        let inst = AmalgamationInstance::new(a, b.clone(), b.clone(), Embedding(vec![1]), Embedding(vec![0])).unwrap();
        let am = order_amalgam(&inst).unwrap();
        assert_eq!(am.d, Structure::chain(5));
        assert_eq!(am.g.map(), &[0, 1, 3]);
        assert_eq!(am.h.map(), &[1, 2, 4]);
        assert_eq!(am.d.induced_substructure(am.g.map()).unwrap(), b);
    }

    #[test]
    fn ordered_kay_amalgams_stay_in_the_class() {
        for k in 2..=3 {
            let pool = enumerate_class(Family::OrderedKay, k, 4, 1 << 20).unwrap();
            let members: Vec<&Structure> = pool.iter().collect();
            for a in members.iter().filter(|s| s.size() <= 2) {
                for b in &members {
                    for c in &members {
                        for e in enumerate_embeddings(a, b).unwrap() {
                            for f in enumerate_embeddings(a, c).unwrap() {
                                let inst = AmalgamationInstance { a: (*a).clone(), b: (*b).clone(), c: (*c).clone(), e: e.clone(), f };
                                let am = kay_amalgam(&inst).unwrap();
                                assert_eq!(Family::OrderedKay.is_member(k, &am.d), Some(true));
                                assert_eq!(am.d.induced_substructure(am.g.map()).unwrap(), **b);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_graph_pool_is_hereditary_with_amalgamation() {
        let pool = enumerate_class(Family::Kay, 2, 5, 1 << 20).unwrap();
        let hp = check_property(&pool, Property::Hereditary, CheckOptions::default()).unwrap();
        assert!(hp.holds, "{}", hp.summary());
        let ap = check_property(&pool, Property::Amalgamation, CheckOptions::default()).unwrap();
        assert!(ap.holds, "{}", ap.summary());
        assert_eq!(ap.constructive, ap.instances);
    }

    #[test]
    fn removed_member_breaks_heredity() {
        let mut pool = enumerate_class(Family::Hypergraphs, 2, 4, 1 << 20).unwrap();
        assert!(pool.remove(&graph(3, &[[0, 1], [1, 2]])));
        let hp = check_property(&pool, Property::Hereditary, CheckOptions::default()).unwrap();
        assert!(!hp.holds);
        match hp.counterexample {
            Some(Counterexample::Hereditary { member, vertex }) => {
                let sub = member.induced_on_mask(((1 << member.size()) - 1) & !bit(vertex));
                assert!(!pool.contains(&sub));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tournaments_hereditary_and_joint() {
        let pool = enumerate_class(Family::Tournaments, 0, 4, 1 << 20).unwrap();
        for p in [Property::Hereditary, Property::JointEmbedding] {
            let r = check_property(&pool, p, CheckOptions::default()).unwrap();
            assert!(r.holds, "{}", r.summary());
        }
    }

    #[test]
    fn search_finds_witnesses_for_anonymous_pools() {
        // Transitive tournaments: the larger one always serves as witness.
        let gens: Vec<Structure> = (0..=3).map(|n| {
            let arcs = (0..n).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])).collect();
            Structure::new(Signature::tournament(), n, vec![arcs]).unwrap()
        }).collect();
        let pool = ClassPool::hereditary_closure(Signature::tournament(), &gens).unwrap();
        assert_eq!(pool.counts(), vec![1, 1, 1, 1]);
        let r = check_property(&pool, Property::JointEmbedding, CheckOptions::default()).unwrap();
        assert!(r.holds, "{}", r.summary());
        assert_eq!(r.searched, r.instances, "{}", r.summary());
        assert_eq!(r.constructive, 0);
    }

    #[test]
    fn amalgamation_failure_is_reported() {
        // Graphs with at most one edge have JEP but not AP: two non-adjacent
        // points, one of them on an edge in B and the other in C.
        let sig = Signature::hypergraph("R", 2, false);
        let pool = ClassPool::hereditary_closure(sig.clone(), &[graph(4, &[[0, 1]])]).unwrap();
        let jep = check_property(&pool, Property::JointEmbedding, CheckOptions::default()).unwrap();
        assert!(jep.holds, "{}", jep.summary());
        let ap = check_property(&pool, Property::Amalgamation, CheckOptions::default()).unwrap();
        assert!(!ap.holds, "{}", ap.summary());
        let Some(Counterexample::Amalgamation(inst)) = ap.counterexample else { panic!() };
        assert_eq!(inst.b.relation_len(0) + inst.c.relation_len(0), 2);
        // Cut at size 3 the same instance is out of reach.
        let small = ClassPool::hereditary_closure(sig, &[graph(3, &[[0, 1]])]).unwrap();
        let r = check_property(&small, Property::Amalgamation, CheckOptions::default()).unwrap();
        assert!(r.holds && r.unresolved > 0, "{}", r.summary());
    }

    #[test]
    fn tournament_round_trip_codes() {
        // Pairs in colex order: 01, 02, 12.
        let t = tournament_from_code(3, 0b101);
        assert!(t.holds(0, &[0, 1]) && t.holds(0, &[2, 0]) && t.holds(0, &[1, 2]));
        assert_eq!(t.relation_len(0), 3);
    }
}
