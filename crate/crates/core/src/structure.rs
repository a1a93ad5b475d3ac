//! Finite relational structures over explicit signatures.
//!
//! Domains are always `{0, .., n-1}`. An order-kind symbol is interpreted as
//! the natural order on the domain and stores no tuples; hyperedge-kind
//! symbols store their realisations as vertex masks, so membership is
//! permutation invariant by construction.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subsets::{bit, k_subsets, mask_iter, mask_to_vec, vec_to_mask, EdgeSet};
use crate::MAX_DOMAIN;

pub type Tuple = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    /// Sets of pairwise-distinct elements, closed under permutation.
    Hyperedge,
    /// The natural order of the domain. Always binary.
    Order,
    /// Arbitrary tuples.
    Plain,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize, kind: SymbolKind) -> Self {
        Symbol {
            name: name.into(),
            arity,
            kind,
        }
    }

    pub fn hyperedge(name: impl Into<String>, arity: usize) -> Self {
        Symbol::new(name, arity, SymbolKind::Hyperedge)
    }

    pub fn plain(name: impl Into<String>, arity: usize) -> Self {
        Symbol::new(name, arity, SymbolKind::Plain)
    }

    pub fn order() -> Self {
        Symbol::new(ORDER_NAME, 2, SymbolKind::Order)
    }
}

/// Conventional name of the built-in order symbol.
pub const ORDER_NAME: &str = "<";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut orders = 0;
        for (i, s) in symbols.iter().enumerate() {
            if s.name.is_empty() {
                return Err(Error::Signature("empty symbol name".into()));
            }
            if symbols[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::Signature(format!("duplicate symbol {:?}", s.name)));
            }
            if s.arity == 0 {
                return Err(Error::Signature(format!("symbol {:?} has arity 0", s.name)));
            }
            if s.kind == SymbolKind::Order {
                orders += 1;
                if s.arity != 2 {
                    return Err(Error::Signature(format!(
                        "order symbol {:?} must be binary",
                        s.name
                    )));
                }
            }
        }
        if orders > 1 {
            return Err(Error::Signature("at most one order symbol allowed".into()));
        }
        Ok(Signature { symbols })
    }

    /// `{R}` with `R` a `k`-ary hyperedge symbol, optionally with an order.
    pub fn hypergraph(name: &str, k: usize, ordered: bool) -> Self {
        let mut symbols = vec![Symbol::hyperedge(name, k)];
        if ordered {
            symbols.push(Symbol::order());
        }
        Signature::new(symbols).expect("valid hypergraph signature")
    }

    pub fn linear_order() -> Self {
        Signature::new(vec![Symbol::order()]).expect("valid")
    }

    pub fn tournament() -> Self {
        Signature::new(vec![Symbol::plain("R", 2)]).expect("valid")
    }

    /// `{R, S, <}`: a `k`-hypergraph together with its Kay-graph.
    pub fn expanded(k: usize, ordered: bool) -> Self {
        let mut symbols = vec![Symbol::hyperedge("R", k), Symbol::hyperedge("S", k + 1)];
        if ordered {
            symbols.push(Symbol::order());
        }
        Signature::new(symbols).expect("valid")
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn order_index(&self) -> Option<usize> {
        self.symbols.iter().position(|s| s.kind == SymbolKind::Order)
    }

    pub fn is_ordered(&self) -> bool {
        self.order_index().is_some()
    }

    /// Indices of the non-order symbols.
    pub fn relational_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.symbols.len()).filter(|&i| self.symbols[i].kind != SymbolKind::Order)
    }

    /// The hyperedge symbol of a (possibly ordered) uniform hypergraph
    /// signature, if that is what this is.
    pub fn single_hyperedge(&self) -> Option<usize> {
        let mut found = None;
        for (i, s) in self.symbols.iter().enumerate() {
            match s.kind {
                SymbolKind::Order => {}
                SymbolKind::Hyperedge if found.is_none() => found = Some(i),
                _ => return None,
            }
        }
        found
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .symbols
            .iter()
            .map(|s| format!("{}/{}", s.name, s.arity))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Relation {
    /// Sorted, deduplicated vertex masks.
    Hyperedges(Vec<u64>),
    Order,
    /// Sorted, deduplicated tuples.
    Tuples(Vec<Tuple>),
}

/// An immutable finite structure on the domain `{0, .., size-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Structure {
    signature: Arc<Signature>,
    size: usize,
    relations: Vec<Relation>,
}

impl Structure {
    /// Builds a structure from per-symbol tuple lists given in signature
    /// order. Hyperedge tuples may be listed in any order of their entries.
    /// Order symbols accept either no tuples or exactly the natural order.
    pub fn new(
        signature: impl Into<Arc<Signature>>,
        size: usize,
        relations: Vec<Vec<Tuple>>,
    ) -> Result<Self> {
        let signature = signature.into();
        if size > MAX_DOMAIN {
            return Err(Error::TooLarge(size));
        }
        if relations.len() != signature.len() {
            return Err(Error::Structure(format!(
                "{} relations supplied for a signature with {} symbols",
                relations.len(),
                signature.len()
            )));
        }
        let mut rels = Vec::with_capacity(relations.len());
        for (sym, tuples) in signature.symbols().iter().zip(relations) {
            for t in &tuples {
                if t.len() != sym.arity {
                    return Err(Error::Structure(format!(
                        "tuple {t:?} for {:?} does not have arity {}",
                        sym.name, sym.arity
                    )));
                }
                if let Some(&v) = t.iter().find(|&&v| v >= size) {
                    return Err(Error::OutOfRange { vertex: v, size });
                }
            }
            rels.push(match sym.kind {
                SymbolKind::Hyperedge => {
                    let mut masks = Vec::with_capacity(tuples.len());
                    for t in tuples {
                        let m = vec_to_mask(&t);
                        if m.count_ones() as usize != t.len() {
                            return Err(Error::RepeatedEntries(t));
                        }
                        masks.push(m);
                    }
                    masks.sort_unstable();
                    masks.dedup();
                    Relation::Hyperedges(masks)
                }
                SymbolKind::Order => {
                    if !tuples.is_empty() {
                        let mut given = tuples;
                        given.sort();
                        given.dedup();
                        let natural: Vec<Tuple> = (0..size)
                            .flat_map(|a| (a + 1..size).map(move |b| vec![a, b]))
                            .collect();
                        if given != natural {
                            return Err(Error::Structure(format!(
                                "order {:?} must be the natural order of the domain",
                                sym.name
                            )));
                        }
                    }
                    Relation::Order
                }
                SymbolKind::Plain => {
                    let mut ts = tuples;
                    ts.sort();
                    ts.dedup();
                    Relation::Tuples(ts)
                }
            });
        }
        Ok(Structure {
            signature,
            size,
            relations: rels,
        })
    }

    /// The structure with no tuples in any relation.
    pub fn empty(signature: impl Into<Arc<Signature>>, size: usize) -> Result<Self> {
        let signature = signature.into();
        let n = signature.len();
        Structure::new(signature, size, vec![Vec::new(); n])
    }

    /// A uniform hypergraph over a single hyperedge symbol, from an edge set.
    pub fn from_edge_set(name: &str, edges: &EdgeSet, ordered: bool) -> Self {
        let sig = Signature::hypergraph(name, edges.arity(), ordered);
        let mut relations = vec![Relation::Hyperedges(sorted_masks(edges))];
        if ordered {
            relations.push(Relation::Order);
        }
        Structure {
            signature: Arc::new(sig),
            size: edges.vertex_count(),
            relations,
        }
    }

    /// Builds a structure over `signature` from one edge set per hyperedge
    /// symbol (in signature order); other symbols must be order symbols.
    pub fn from_edge_sets(signature: impl Into<Arc<Signature>>, size: usize, edges: &[&EdgeSet]) -> Result<Self> {
        let signature = signature.into();
        let mut it = edges.iter();
        let mut relations = Vec::new();
        for s in signature.symbols() {
            relations.push(match s.kind {
                SymbolKind::Order => Relation::Order,
                SymbolKind::Hyperedge => {
                    let e = it.next().ok_or_else(|| Error::Structure("too few edge sets".into()))?;
                    if e.arity() != s.arity || e.vertex_count() != size {
                        return Err(Error::Structure(format!(
                            "edge set shape ({}, {}) does not match {:?}",
                            e.vertex_count(),
                            e.arity(),
                            s.name
                        )));
                    }
                    Relation::Hyperedges(sorted_masks(e))
                }
                SymbolKind::Plain => {
                    return Err(Error::Structure("plain symbols cannot come from edge sets".into()))
                }
            });
        }
        if it.next().is_some() {
            return Err(Error::Structure("too many edge sets".into()));
        }
        Ok(Structure {
            signature,
            size,
            relations,
        })
    }

    /// The `n`-element chain: the natural order with no other relations.
    pub fn chain(n: usize) -> Self {
        Structure::empty(Signature::linear_order(), n).expect("chain")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_ordered(&self) -> bool {
        self.signature.is_ordered()
    }

    /// Tuple membership; hyperedge queries ignore entry order.
    pub fn holds(&self, symbol: usize, tuple: &[usize]) -> bool {
        match &self.relations[symbol] {
            Relation::Hyperedges(masks) => {
                let m = vec_to_mask(tuple);
                m.count_ones() as usize == tuple.len() && masks.binary_search(&m).is_ok()
            }
            Relation::Order => tuple.len() == 2 && tuple[0] < tuple[1],
            Relation::Tuples(ts) => ts.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok(),
        }
    }

    /// Membership of a vertex set in a hyperedge relation.
    pub fn has_hyperedge(&self, symbol: usize, mask: u64) -> bool {
        match &self.relations[symbol] {
            Relation::Hyperedges(masks) => masks.binary_search(&mask).is_ok(),
            _ => false,
        }
    }

    /// Hyperedges of a hyperedge symbol as masks, in colex order.
    pub fn hyperedge_masks(&self, symbol: usize) -> Option<&[u64]> {
        match &self.relations[symbol] {
            Relation::Hyperedges(m) => Some(m),
            _ => None,
        }
    }

    /// The tuples of a symbol in sorted order. Hyperedges come out as sorted
    /// tuples; the order relation as its `a < b` pairs.
    pub fn tuples(&self, symbol: usize) -> Vec<Tuple> {
        match &self.relations[symbol] {
            Relation::Hyperedges(masks) => {
                let mut v: Vec<Tuple> = masks.iter().map(|&m| mask_to_vec(m)).collect();
                v.sort();
                v
            }
            Relation::Order => (0..self.size)
                .flat_map(|a| (a + 1..self.size).map(move |b| vec![a, b]))
                .collect(),
            Relation::Tuples(ts) => ts.clone(),
        }
    }

    /// Number of stored realisations (hyperedges count once per set).
    pub fn relation_len(&self, symbol: usize) -> usize {
        match &self.relations[symbol] {
            Relation::Hyperedges(m) => m.len(),
            Relation::Order => self.size * self.size.saturating_sub(1) / 2,
            Relation::Tuples(t) => t.len(),
        }
    }

    /// The edge set of a hyperedge symbol.
    pub fn edge_set(&self, symbol: usize) -> Option<EdgeSet> {
        let masks = self.hyperedge_masks(symbol)?;
        let k = self.signature.symbol(symbol).arity;
        EdgeSet::from_masks(self.size, k, masks.iter().copied()).ok()
    }

    /// Substructure induced on `subset`, relabelled order-preservingly to
    /// `{0, .., |subset|-1}`. Duplicates in `subset` are ignored.
    pub fn induced_substructure(&self, subset: &[usize]) -> Result<Structure> {
        if let Some(&v) = subset.iter().find(|&&v| v >= self.size) {
            return Err(Error::OutOfRange {
                vertex: v,
                size: self.size,
            });
        }
        let mut verts = subset.to_vec();
        verts.sort_unstable();
        verts.dedup();
        Ok(self.induced_sorted(&verts))
    }

    /// Induced substructure on a vertex mask.
    pub fn induced_on_mask(&self, mask: u64) -> Structure {
        self.induced_sorted(&mask_to_vec(mask))
    }

    /// `verts` must be sorted, distinct and in range.
    fn induced_sorted(&self, verts: &[usize]) -> Structure {
        let mut local = vec![usize::MAX; self.size];
        for (i, &v) in verts.iter().enumerate() {
            local[v] = i;
        }
        let domain = vec_to_mask(verts);
        let relations = self
            .relations
            .iter()
            .map(|r| match r {
                Relation::Hyperedges(masks) => {
                    let mut out: Vec<u64> = masks
                        .iter()
                        .filter(|&&m| m & !domain == 0)
                        .map(|&m| mask_iter(m).fold(0, |acc, v| acc | bit(local[v])))
                        .collect();
                    out.sort_unstable();
                    Relation::Hyperedges(out)
                }
                Relation::Order => Relation::Order,
                Relation::Tuples(ts) => Relation::Tuples(
                    // Relabelling is monotone, so sortedness is preserved.
                    ts.iter()
                        .filter(|t| t.iter().all(|&v| local[v] != usize::MAX))
                        .map(|t| t.iter().map(|&v| local[v]).collect())
                        .collect(),
                ),
            })
            .collect();
        Structure {
            signature: self.signature.clone(),
            size: verts.len(),
            relations,
        }
    }

    /// Image of the structure under the bijection `v -> perm[v]`.
    ///
    /// The order relation is interpreted as the natural order of the new
    /// domain, so for ordered structures only the identity gives an
    /// isomorphic copy; [`Structure::relabelled`] rejects anything else.
    pub(crate) fn relabel_unchecked(&self, perm: &[usize]) -> Structure {
        let relations = self
            .relations
            .iter()
            .map(|r| match r {
                Relation::Hyperedges(masks) => {
                    let mut out: Vec<u64> = masks
                        .iter()
                        .map(|&m| mask_iter(m).fold(0, |acc, v| acc | bit(perm[v])))
                        .collect();
                    out.sort_unstable();
                    Relation::Hyperedges(out)
                }
                Relation::Order => Relation::Order,
                Relation::Tuples(ts) => {
                    let mut out: Vec<Tuple> = ts
                        .iter()
                        .map(|t| t.iter().map(|&v| perm[v]).collect())
                        .collect();
                    out.sort();
                    Relation::Tuples(out)
                }
            })
            .collect();
        Structure {
            signature: self.signature.clone(),
            size: self.size,
            relations,
        }
    }

    /// Image under a permutation of the domain. Ordered structures only
    /// admit the identity.
    pub fn relabelled(&self, perm: &[usize]) -> Result<Structure> {
        check_permutation(perm, self.size)?;
        if self.is_ordered() && perm.iter().enumerate().any(|(i, &p)| i != p) {
            return Err(Error::Structure(
                "ordered structures are presented order-canonically; only the identity relabelling is allowed"
                    .into(),
            ));
        }
        Ok(self.relabel_unchecked(perm))
    }

    /// Same relations, different signature object (names may differ but
    /// arities and kinds must agree symbol by symbol).
    pub fn with_signature(&self, signature: impl Into<Arc<Signature>>) -> Result<Structure> {
        let signature = signature.into();
        let same_shape = signature.len() == self.signature.len()
            && signature
                .symbols()
                .iter()
                .zip(self.signature.symbols())
                .all(|(a, b)| a.arity == b.arity && a.kind == b.kind);
        if !same_shape {
            return Err(Error::SignatureMismatch(format!(
                "{} vs {}",
                signature, self.signature
            )));
        }
        Ok(Structure {
            signature,
            size: self.size,
            relations: self.relations.clone(),
        })
    }

    /// Reduct to the symbols at `keep` (in that order).
    pub fn reduct(&self, keep: &[usize]) -> Result<Structure> {
        let symbols = keep.iter().map(|&i| self.signature.symbol(i).clone()).collect();
        Ok(Structure {
            signature: Arc::new(Signature::new(symbols)?),
            size: self.size,
            relations: keep.iter().map(|&i| self.relations[i].clone()).collect(),
        })
    }

    pub(crate) fn same_signature(&self, other: &Structure) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch(format!(
                "{} vs {}",
                self.signature, other.signature
            )));
        }
        Ok(())
    }

    /// All `k`-subsets of the domain that are hyperedges of `symbol`,
    /// re-derived by scanning (used by brute-force checks).
    pub fn scan_hyperedges(&self, symbol: usize) -> Vec<u64> {
        let k = self.signature.symbol(symbol).arity;
        k_subsets(self.size, k)
            .filter(|&m| self.has_hyperedge(symbol, m))
            .collect()
    }
}

fn sorted_masks(edges: &EdgeSet) -> Vec<u64> {
    // Colex rank order equals numeric mask order.
    edges.iter().collect()
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::Embedding(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Embedding(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

impl fmt::Debug for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure(n={}", self.size)?;
        for (i, s) in self.signature.symbols().iter().enumerate() {
            if s.kind == SymbolKind::Order {
                write!(f, "; {}", s.name)?;
            } else {
                write!(f, "; {}={:?}", s.name, self.tuples(i))?;
            }
        }
        write!(f, ")")
    }
}
