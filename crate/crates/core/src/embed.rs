//! Embeddings, copies and automorphisms.
//!
//! An embedding is an injective map that preserves and reflects every
//! relation. For ordered structures that forces the map to be strictly
//! increasing, and the search only ever proposes increasing extensions.

use std::ops::ControlFlow;

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::structure::{Structure, SymbolKind};
use crate::subsets::{bit, k_subsets, mask_to_vec};

/// An injective map between domains, stored as the image of each source
/// vertex. Whether it embeds one particular structure in another is checked
/// by [`is_embedding`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding(pub Vec<usize>);

impl Embedding {
    pub fn map(&self) -> &[usize] {
        &self.0
    }

    pub fn image(&self, v: usize) -> usize {
        self.0[v]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Embedding) -> Embedding {
        Embedding(self.0.iter().map(|&v| other.0[v]).collect())
    }

    pub fn image_mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &v| m | bit(v))
    }

    pub fn is_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

/// One membership test the backtracker runs once the largest vertex of
/// `tuple` is mapped.
struct Check {
    symbol: usize,
    tuple: Vec<usize>,
    expected: bool,
}

/// Precomputed checks grouped by the source vertex that completes them.
fn plan(a: &Structure) -> Vec<Vec<Check>> {
    let n = a.size();
    let mut by_vertex: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
    for (si, sym) in a.signature().symbols().iter().enumerate() {
        match sym.kind {
            SymbolKind::Order => {}
            SymbolKind::Hyperedge => {
                let r = sym.arity;
                for i in 0..n {
                    if r == 0 || r - 1 > i {
                        continue;
                    }
                    for rest in k_subsets(i, r - 1) {
                        let m = rest | bit(i);
                        by_vertex[i].push(Check {
                            symbol: si,
                            tuple: mask_to_vec(m),
                            expected: a.has_hyperedge(si, m),
                        });
                    }
                }
            }
            SymbolKind::Plain => {
                let r = sym.arity;
                for i in 0..n {
                    // Tuples over {0..=i} containing i.
                    let total = (i + 1).pow(r as u32);
                    for code in 0..total {
                        let mut t = Vec::with_capacity(r);
                        let mut c = code;
                        for _ in 0..r {
                            t.push(c % (i + 1));
                            c /= i + 1;
                        }
                        if t.contains(&i) {
                            let expected = a.holds(si, &t);
                            by_vertex[i].push(Check {
                                symbol: si,
                                tuple: t,
                                expected,
                            });
                        }
                    }
                }
            }
        }
    }
    by_vertex
}

/// Visits every embedding of `a` into `b` agreeing with `fixed` (where
/// `fixed[v] = Some(w)` pins `v` to `w`), in lexicographic order of maps.
pub fn for_each_embedding<F>(a: &Structure, b: &Structure, fixed: &[Option<usize>], mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    a.same_signature(b)?;
    if !fixed.is_empty() && fixed.len() != a.size() {
        return Err(Error::Embedding("partial map has the wrong length".into()));
    }
    if a.size() > b.size() {
        return Ok(());
    }
    let checks = plan(a);
    let ordered = a.is_ordered();
    let mut map = vec![usize::MAX; a.size()];
    let mut used = 0u64;
    let _ = extend(0, a, b, fixed, ordered, &checks, &mut map, &mut used, &mut visit);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn extend<F>(
    i: usize,
    a: &Structure,
    b: &Structure,
    fixed: &[Option<usize>],
    ordered: bool,
    checks: &[Vec<Check>],
    map: &mut Vec<usize>,
    used: &mut u64,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if i == a.size() {
        return visit(map);
    }
    let lo = if ordered && i > 0 { map[i - 1] + 1 } else { 0 };
    // Leave room for the remaining vertices of an increasing map.
    let hi = if ordered { b.size() + i + 1 - a.size() } else { b.size() };
    let pinned = fixed.get(i).copied().flatten();
    let mut image = Vec::new();
    for w in lo..hi {
        if pinned.is_some_and(|p| p != w) || *used & bit(w) != 0 {
            continue;
        }
        map[i] = w;
        let ok = checks[i].iter().all(|c| {
            image.clear();
            image.extend(c.tuple.iter().map(|&v| map[v]));
            b.holds(c.symbol, &image) == c.expected
        });
        if ok {
            *used |= bit(w);
            let flow = extend(i + 1, a, b, fixed, ordered, checks, map, used, visit);
            *used &= !bit(w);
            flow?;
        }
    }
    map[i] = usize::MAX;
    ControlFlow::Continue(())
}

/// All embeddings of `a` into `b`, in lexicographic order.
pub fn enumerate_embeddings(a: &Structure, b: &Structure) -> Result<Vec<Embedding>> {
    let mut out = Vec::new();
    for_each_embedding(a, b, &[], |m| {
        out.push(Embedding(m.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub fn first_embedding(a: &Structure, b: &Structure) -> Result<Option<Embedding>> {
    first_embedding_pinned(a, b, &[])
}

/// The lexicographically least embedding agreeing with `fixed`.
pub fn first_embedding_pinned(a: &Structure, b: &Structure, fixed: &[Option<usize>]) -> Result<Option<Embedding>> {
    let mut found = None;
    for_each_embedding(a, b, fixed, |m| {
        found = Some(Embedding(m.to_vec()));
        ControlFlow::Break(())
    })?;
    Ok(found)
}

pub fn embeds(a: &Structure, b: &Structure) -> Result<bool> {
    Ok(first_embedding(a, b)?.is_some())
}

/// Direct check of the embedding conditions by scanning every tuple over
/// the source domain. Shares nothing with the backtracker.
pub fn is_embedding(a: &Structure, b: &Structure, map: &[usize]) -> bool {
    if a.signature() != b.signature() || map.len() != a.size() {
        return false;
    }
    if map.iter().any(|&w| w >= b.size()) {
        return false;
    }
    for i in 0..map.len() {
        if map[..i].contains(&map[i]) {
            return false;
        }
    }
    for (si, sym) in a.signature().symbols().iter().enumerate() {
        let r = sym.arity as u32;
        let total = a.size().pow(r);
        for code in 0..total {
            let mut t = Vec::with_capacity(sym.arity);
            let mut c = code;
            for _ in 0..sym.arity {
                t.push(c % a.size());
                c /= a.size();
            }
            let img: Vec<usize> = t.iter().map(|&v| map[v]).collect();
            if a.holds(si, &t) != b.holds(si, &img) {
                return false;
            }
        }
    }
    true
}

/// The subsets of an ambient structure's domain inducing copies of a
/// pattern, as sorted vertex lists in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopySet {
    pub pattern_size: usize,
    pub members: Vec<Vec<usize>>,
}

impl CopySet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(|m| m.iter().fold(0, |acc, &v| acc | bit(v)))
    }
}

/// All subsets of `b`'s domain inducing a structure isomorphic to `a`.
///
/// Computed by comparing canonical forms subset by subset, independently of
/// the embedding search.
pub fn enumerate_copies(a: &Structure, b: &Structure) -> Result<CopySet> {
    a.same_signature(b)?;
    let target = canonical_form(a).structure;
    let mut members: Vec<Vec<usize>> = k_subsets(b.size(), a.size())
        .filter(|&m| canonical_form(&b.induced_on_mask(m)).structure == target)
        .map(mask_to_vec)
        .collect();
    members.sort();
    Ok(CopySet {
        pattern_size: a.size(),
        members,
    })
}

/// The automorphism group as an explicit list of permutations, identity
/// first (it is the lexicographically least bijection).
pub fn automorphisms(a: &Structure) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_embedding(a, a, &[], |m| {
        out.push(m.to_vec());
        ControlFlow::Continue(())
    })
    .expect("same signature");
    out
}

pub fn is_rigid(a: &Structure) -> bool {
    let mut count = 0;
    for_each_embedding(a, a, &[], |_| {
        count += 1;
        if count > 1 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .expect("same signature");
    count == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    fn graph(n: usize, edges: &[[usize; 2]]) -> Structure {
        Structure::new(
            Signature::hypergraph("R", 2, false),
            n,
            vec![edges.iter().map(|e| e.to_vec()).collect()],
        )
        .unwrap()
    }

    fn tournament(n: usize, arcs: &[[usize; 2]]) -> Structure {
        Structure::new(Signature::tournament(), n, vec![arcs.iter().map(|e| e.to_vec()).collect()]).unwrap()
    }

    /// Brute force over all injections.
    fn brute_embeddings(a: &Structure, b: &Structure) -> Vec<Vec<usize>> {
        use itertools::Itertools;
        (0..b.size())
            .permutations(a.size())
            .filter(|m| is_embedding(a, b, m))
            .sorted()
            .collect()
    }

    #[test]
    fn chain_embeddings() {
        assert_eq!(enumerate_embeddings(&Structure::chain(1), &Structure::chain(3)).unwrap().len(), 3);
        let e = enumerate_embeddings(&Structure::chain(2), &Structure::chain(3)).unwrap();
        let maps: Vec<_> = e.iter().map(|e| e.0.clone()).collect();
        assert_eq!(maps, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn edge_into_triangle() {
        let edge = graph(2, &[[0, 1]]);
        let tri = graph(3, &[[0, 1], [1, 2], [0, 2]]);
        let got: Vec<_> = enumerate_embeddings(&edge, &tri).unwrap().into_iter().map(|e| e.0).collect();
        assert_eq!(got.len(), 6);
        assert_eq!(got, brute_embeddings(&edge, &tri));
        assert_eq!(enumerate_copies(&edge, &tri).unwrap().len(), 3);
    }

    #[test]
    fn copies_of_chain() {
        let c = enumerate_copies(&Structure::chain(2), &Structure::chain(3)).unwrap();
        assert_eq!(c.members, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn reflection_is_enforced() {
        // A non-edge must not be mapped onto an edge.
        let two = graph(2, &[]);
        let tri = graph(3, &[[0, 1], [1, 2], [0, 2]]);
        assert!(enumerate_embeddings(&two, &tri).unwrap().is_empty());
    }

    #[test]
    fn automorphism_groups() {
        let cyc = tournament(3, &[[0, 1], [1, 2], [2, 0]]);
        let auts = automorphisms(&cyc);
        assert_eq!(auts.len(), 3);
        assert_eq!(auts[0], vec![0, 1, 2]);
        assert!(!is_rigid(&cyc));
        let trans = tournament(3, &[[0, 1], [1, 2], [0, 2]]);
        assert!(is_rigid(&trans));
        assert_eq!(automorphisms(&graph(3, &[])).len(), 6);
        assert_eq!(automorphisms(&Structure::chain(4)).len(), 1);
    }

    #[test]
    fn pinned_search() {
        let tri = graph(3, &[[0, 1], [1, 2], [0, 2]]);
        let mut maps = Vec::new();
        for_each_embedding(&tri, &tri, &[None, Some(0), None], |m| {
            maps.push(m.to_vec());
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(maps, vec![vec![1, 0, 2], vec![2, 0, 1]]);
    }

    #[test]
    fn signature_mismatch() {
        assert!(enumerate_embeddings(&Structure::chain(1), &graph(2, &[])).is_err());
    }

    #[test]
    fn plain_relations_with_loops() {
        let sig = Signature::new(vec![crate::structure::Symbol::plain("E", 2)]).unwrap();
        let a = Structure::new(sig.clone(), 1, vec![vec![vec![0, 0]]]).unwrap();
        let b = Structure::new(sig, 3, vec![vec![vec![1, 1], vec![0, 2]]]).unwrap();
        let got: Vec<_> = enumerate_embeddings(&a, &b).unwrap().into_iter().map(|e| e.0).collect();
        assert_eq!(got, vec![vec![1]]);
        assert_eq!(got, brute_embeddings(&a, &b));
    }
}
