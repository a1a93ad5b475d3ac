//! The Kay-graph construction and its inverse.
//!
//! For a `k`-hypergraph `H`, the Kay-graph `K(H)` is the `(k+1)`-hypergraph
//! on the same vertices whose hyperedges are the `(k+1)`-sets containing a
//! number of `H`-edges congruent to `k+1` mod 2. Its image is exactly the
//! class of `(k+1)`-hypergraphs in which every `(k+2)`-set spans a number of
//! hyperedges congruent to `k` mod 2 (the parity condition checked by
//! [`satisfies_parity`]); [`reconstruct`] produces a preimage from any such
//! hypergraph and a chosen star vertex.
//!
//! Ordered and unordered inputs share one implementation: the order is
//! carried through unchanged.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::structure::{Signature, Structure};
use crate::subsets::{binomial, bit, k_subsets, lex_subsets, mask_to_vec, vec_to_mask, EdgeSet};

/// Least vertex; the default star for [`reconstruct`].
pub const DEFAULT_STAR: usize = 0;

/// Name given to the hyperedge symbol of a Kay-graph.
pub const KAY_SYMBOL: &str = "S";

/// Name given to the hyperedge symbol of a reconstructed preimage.
pub const EDGE_SYMBOL: &str = "R";

/// Kay-graph of an edge set.
pub fn kay_edges(h: &EdgeSet) -> EdgeSet {
    let n = h.vertex_count();
    let k = h.arity();
    let parity = (k + 1) % 2;
    let mut out = EdgeSet::empty(n, k + 1);
    // Gosper order is colex order, so the i-th subset has rank i.
    for (r, y) in k_subsets(n, k + 1).enumerate() {
        let mut count = 0;
        let mut rest = y;
        while rest != 0 {
            let low = rest & rest.wrapping_neg();
            rest ^= low;
            count += h.contains(y ^ low) as usize;
        }
        if count % 2 == parity {
            out.insert_rank(r);
        }
    }
    out
}

/// The edge set of a uniform hypergraph (any hyperedge arity `>= min_arity`)
/// and whether it carries an order.
pub fn hypergraph_parts(s: &Structure, min_arity: usize) -> Result<(EdgeSet, bool)> {
    let sym = s.signature().single_hyperedge().ok_or_else(|| Error::NotAHypergraph {
        min_arity,
        reason: format!("signature {} is not a single hyperedge symbol plus an optional order", s.signature()),
    })?;
    let arity = s.signature().symbol(sym).arity;
    if arity < min_arity {
        return Err(Error::NotAHypergraph {
            min_arity,
            reason: format!("arity is {arity}"),
        });
    }
    let edges = s.edge_set(sym).expect("hyperedge symbol");
    Ok((edges, s.is_ordered()))
}

/// Kay-graph of a `k`-hypergraph, `k >= 2`. The result has one hyperedge
/// symbol `S` of arity `k+1`, plus the order if the input is ordered.
pub fn kay(h: &Structure) -> Result<Structure> {
    let (edges, ordered) = hypergraph_parts(h, 2)?;
    Ok(Structure::from_edge_set(KAY_SYMBOL, &kay_edges(&edges), ordered))
}

/// The lexicographically least `(k+2)`-set violating the parity condition,
/// where `s` has arity `k+1`.
pub fn parity_violation(s: &EdgeSet) -> Option<Vec<usize>> {
    let k = s.arity() - 1;
    let want = k % 2;
    lex_subsets(s.vertex_count(), k + 2).find(|verts| {
        let y = vec_to_mask(verts);
        let mut count = 0;
        for &v in verts {
            count += s.contains(y ^ bit(v)) as usize;
        }
        count % 2 != want
    })
}

/// Outcome of the parity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParityCheck {
    Holds,
    /// Lexicographically least violating vertex set.
    Violated(Vec<usize>),
}

impl ParityCheck {
    pub fn holds(&self) -> bool {
        matches!(self, ParityCheck::Holds)
    }
}

/// Checks that every `(k+2)`-set spans `≡ k (mod 2)` hyperedges, for a
/// `(k+1)`-hypergraph with `k >= 2`.
pub fn satisfies_parity(s: &Structure) -> Result<ParityCheck> {
    let (edges, _) = hypergraph_parts(s, 3)?;
    Ok(match parity_violation(&edges) {
        None => ParityCheck::Holds,
        Some(v) => ParityCheck::Violated(v),
    })
}

/// A preimage of `s` under [`kay_edges`], built around `star`.
///
/// A `k`-set `X` avoiding the star is an edge iff `X ∪ {star}` is an
/// `s`-edge. The `k`-sets through the star are all edges when `k` is odd and
/// all non-edges when `k` is even; either choice works for even `k`, and the
/// empty one keeps the preimage of an edgeless hypergraph edgeless.
pub fn reconstruct_edges(s: &EdgeSet, star: usize) -> Result<EdgeSet> {
    let n = s.vertex_count();
    if star >= n {
        return Err(Error::OutOfRange { vertex: star, size: n });
    }
    if s.arity() < 3 {
        return Err(Error::NotAHypergraph {
            min_arity: 3,
            reason: format!("arity is {}", s.arity()),
        });
    }
    if let Some(v) = parity_violation(s) {
        return Err(Error::ParityViolation(v));
    }
    Ok(reconstruct_unchecked(s, star))
}

/// [`reconstruct_edges`] without the parity pre-check. The result is a
/// preimage only when the parity condition holds.
pub fn reconstruct_unchecked(s: &EdgeSet, star: usize) -> EdgeSet {
    let n = s.vertex_count();
    let k = s.arity() - 1;
    let through_star = k % 2 == 1;
    let mut r = EdgeSet::empty(n, k);
    for (i, x) in k_subsets(n, k).enumerate() {
        let present = if x & bit(star) != 0 {
            through_star
        } else {
            s.contains(x | bit(star))
        };
        if present {
            r.insert_rank(i);
        }
    }
    r
}

/// Structure-level [`reconstruct_edges`]; the output hyperedge symbol is `R`.
pub fn reconstruct(s: &Structure, star: usize) -> Result<Structure> {
    let (edges, ordered) = hypergraph_parts(s, 3)?;
    let r = reconstruct_edges(&edges, star)?;
    Ok(Structure::from_edge_set(EDGE_SYMBOL, &r, ordered))
}

/// A `k`-hypergraph `R` together with its Kay-graph `S`, as a structure
/// over `{R, S}` or `{R, S, <}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpandedStructure {
    edges: EdgeSet,
    kay: EdgeSet,
    ordered: bool,
}

impl ExpandedStructure {
    pub fn new(edges: EdgeSet, ordered: bool) -> Self {
        assert!(edges.arity() >= 2, "Kay-graphs need k >= 2");
        let kay = kay_edges(&edges);
        ExpandedStructure { edges, kay, ordered }
    }

    /// Accepts either a bare `k`-hypergraph (the Kay-graph is computed) or a
    /// structure over `{R, S[, <]}` whose `S` must equal `K(R)`.
    pub fn from_structure(s: &Structure) -> Result<Self> {
        if let Ok((edges, ordered)) = hypergraph_parts(s, 2) {
            return Ok(ExpandedStructure::new(edges, ordered));
        }
        let sig = s.signature();
        let (Some(ri), Some(si)) = (sig.index_of(EDGE_SYMBOL), sig.index_of(KAY_SYMBOL)) else {
            return Err(Error::SignatureMismatch(format!(
                "expected {{R, S}} or a uniform hypergraph, got {sig}"
            )));
        };
        let k = sig.symbol(ri).arity;
        if *sig != Signature::expanded(k, s.is_ordered()) || si != 1 || ri != 0 {
            return Err(Error::SignatureMismatch(format!(
                "expected {}, got {sig}",
                Signature::expanded(k, s.is_ordered())
            )));
        }
        let edges = s.edge_set(ri).expect("hyperedge");
        let out = ExpandedStructure::new(edges, s.is_ordered());
        if s.edge_set(si).expect("hyperedge") != out.kay {
            return Err(Error::Structure("S is not the Kay-graph of R".into()));
        }
        Ok(out)
    }

    pub fn edges(&self) -> &EdgeSet {
        &self.edges
    }

    pub fn kay(&self) -> &EdgeSet {
        &self.kay
    }

    pub fn k(&self) -> usize {
        self.edges.arity()
    }

    pub fn size(&self) -> usize {
        self.edges.vertex_count()
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    /// The structure over `{R, S[, <]}`.
    pub fn to_structure(&self) -> Structure {
        Structure::from_edge_sets(
            Signature::expanded(self.k(), self.ordered),
            self.size(),
            &[&self.edges, &self.kay],
        )
        .expect("consistent shapes")
    }

    /// The reduct to `{S[, <]}`.
    pub fn base(&self) -> Structure {
        Structure::from_edge_set(KAY_SYMBOL, &self.kay, self.ordered)
    }
}

/// Replaces `R` by its complement in `binom(V, k)` and recomputes `S`.
///
/// A `(k+1)`-set with `c` old edges has `k+1-c` new ones, so the new `S`
/// equals the old one when `k` is odd and is its complement in
/// `binom(V, k+1)` when `k` is even. The result is checked against that law.
pub fn complement_expansion(a: &ExpandedStructure) -> Result<ExpandedStructure> {
    let out = ExpandedStructure::new(a.edges.complement(), a.ordered);
    let expected = if a.k() % 2 == 1 {
        a.kay.clone()
    } else {
        a.kay.complement()
    };
    if out.kay != expected {
        return Err(Error::Invariant(format!(
            "complement parity law fails for k = {} on {} vertices",
            a.k(),
            a.size()
        )));
    }
    Ok(out)
}

/// Adds a new greatest vertex `⋆` joined to every `(k-1)`-set of old
/// vertices, and recomputes `S`. Checks that `S(x̄, ⋆) ⟺ R(x̄)` for every
/// `k`-set `x̄` of old vertices.
pub fn star_extension(d: &ExpandedStructure) -> Result<ExpandedStructure> {
    let n = d.size();
    let k = d.k();
    let star = bit(n);
    let mut edges = d.edges.widen(n + 1);
    for x in k_subsets(n, k - 1) {
        edges.insert(x | star);
    }
    let out = ExpandedStructure::new(edges, d.ordered);
    for x in k_subsets(n, k) {
        if out.kay.contains(x | star) != d.edges.contains(x) {
            return Err(Error::Invariant(format!(
                "star extension law fails at {:?}",
                mask_to_vec(x)
            )));
        }
    }
    Ok(out)
}

/// Searches every `k`-edge set on the vertex set of `s` for one whose
/// Kay-graph is `s`. Candidates are scanned in parallel; the first one in
/// code order is returned.
pub fn find_preimage(s: &EdgeSet, budget: u64) -> Result<Option<EdgeSet>> {
    let n = s.vertex_count();
    let k = s.arity() - 1;
    let slots = binomial(n, k);
    if slots >= 63 || 1u64 << slots > budget {
        return Err(Error::Budget {
            what: format!("preimage search over 2^{slots} edge sets"),
            estimate: 1u128 << slots.min(127),
            budget: budget as u128,
        });
    }
    let found = (0..1u64 << slots)
        .into_par_iter()
        .find_first(|&code| kay_edges(&EdgeSet::from_code(n, k, code)) == *s);
    Ok(found.map(|code| EdgeSet::from_code(n, k, code)))
}

/// Result of deciding membership in the image of the Kay construction by
/// two independent routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// Parity-condition counterexample, when not a member.
    pub violation: Option<Vec<usize>>,
    /// A preimage found by exhaustive search, when a member.
    pub preimage: Option<EdgeSet>,
}

/// Decides whether `s` is a Kay-graph by the parity condition and by
/// exhaustive preimage search; the two must agree.
pub fn kay_class_membership(s: &Structure, budget: u64) -> Result<Membership> {
    let (edges, _) = hypergraph_parts(s, 3)?;
    let violation = parity_violation(&edges);
    let preimage = find_preimage(&edges, budget)?;
    if violation.is_none() != preimage.is_some() {
        return Err(Error::Invariant(format!(
            "parity route says {}, preimage route says {}",
            violation.is_none(),
            preimage.is_some()
        )));
    }
    Ok(Membership {
        member: violation.is_none(),
        violation,
        preimage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(n: usize, k: usize, sets: &[&[usize]]) -> EdgeSet {
        EdgeSet::from_masks(n, k, sets.iter().map(|s| vec_to_mask(s))).unwrap()
    }

    /// Parity formula evaluated directly from the definition on tuples.
    fn kay_by_definition(h: &EdgeSet) -> EdgeSet {
        let (n, k) = (h.vertex_count(), h.arity());
        let mut out = EdgeSet::empty(n, k + 1);
        for y in lex_subsets(n, k + 1) {
            let count = lex_subsets(k + 1, k)
                .filter(|idx| {
                    let sub: Vec<usize> = idx.iter().map(|&i| y[i]).collect();
                    h.contains(vec_to_mask(&sub))
                })
                .count();
            if count % 2 == (k + 1) % 2 {
                out.insert(vec_to_mask(&y));
            }
        }
        out
    }

    #[test]
    fn one_edge_on_a_triangle() {
        let s = kay_edges(&edges(3, 2, &[&[0, 1]]));
        assert!(s.contains(0b111));
    }

    #[test]
    fn edgeless_inputs() {
        for n in 0..7 {
            for k in 2..5 {
                let s = kay_edges(&EdgeSet::empty(n, k));
                if k % 2 == 0 {
                    assert!(s.is_empty());
                } else {
                    assert_eq!(s, EdgeSet::full(n, k + 1));
                }
            }
        }
    }

    #[test]
    fn matches_definition() {
        for code in 0..1u64 << 10 {
            let h = EdgeSet::from_code(5, 2, code);
            assert_eq!(kay_edges(&h), kay_by_definition(&h));
        }
        for code in (0..1u64 << 20).step_by(977) {
            let h = EdgeSet::from_code(6, 3, code);
            assert_eq!(kay_edges(&h), kay_by_definition(&h));
        }
    }

    #[test]
    fn parity_on_images() {
        for n in 0..=5 {
            for code in 0..1u64 << binomial(n, 2) {
                assert_eq!(parity_violation(&kay_edges(&EdgeSet::from_code(n, 2, code))), None);
            }
        }
    }

    #[test]
    fn single_hyperedge_fails_parity() {
        let s = Structure::from_edge_set("S", &edges(4, 3, &[&[0, 1, 2]]), false);
        assert_eq!(satisfies_parity(&s).unwrap(), ParityCheck::Violated(vec![0, 1, 2, 3]));
        let empty = Structure::from_edge_set("S", &EdgeSet::empty(5, 3), false);
        assert!(satisfies_parity(&empty).unwrap().holds());
    }

    #[test]
    fn parity_needs_arity_three() {
        let g = Structure::from_edge_set("R", &EdgeSet::empty(3, 2), false);
        assert!(satisfies_parity(&g).is_err());
        assert!(kay(&Structure::chain(3)).is_err());
    }

    #[test]
    fn reconstruct_inverts_kay() {
        for n in 1..=5 {
            for code in 0..1u64 << binomial(n, 3) {
                let s = EdgeSet::from_code(n, 3, code);
                if parity_violation(&s).is_some() {
                    assert!(matches!(reconstruct_edges(&s, 0), Err(Error::ParityViolation(_))));
                    continue;
                }
                for star in 0..n {
                    assert_eq!(kay_edges(&reconstruct_edges(&s, star).unwrap()), s);
                }
            }
        }
    }

    #[test]
    fn reconstruct_of_edgeless_even_k() {
        for n in 1..6 {
            let r = reconstruct_edges(&EdgeSet::empty(n, 3), 0).unwrap();
            assert!(r.is_empty());
        }
        assert!(matches!(reconstruct_edges(&EdgeSet::empty(3, 3), 3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn reconstruct_is_not_a_left_inverse() {
        // For even k the edges through the star are dropped, but the
        // Kay-graph is recovered.
        let h = edges(4, 2, &[&[0, 1]]);
        let r = reconstruct_edges(&kay_edges(&h), 0).unwrap();
        assert_ne!(r, h);
        assert_eq!(kay_edges(&r), kay_edges(&h));
    }

    #[test]
    fn ordered_flag_is_carried() {
        let h = Structure::from_edge_set("R", &edges(3, 2, &[&[0, 1]]), true);
        let s = kay(&h).unwrap();
        assert!(s.is_ordered());
        assert_eq!(s.tuples(0), vec![vec![0, 1, 2]]);
        let back = reconstruct(&s, 1).unwrap();
        assert!(back.is_ordered());
        assert_eq!(kay(&back).unwrap(), s);
    }

    #[test]
    fn complement_law() {
        for k in 2..=4 {
            for n in 0..=6 {
                let total = binomial(n, k);
                let step = ((1u64 << total) / 200).max(1);
                for code in (0..1u64 << total).step_by(step as usize) {
                    let a = ExpandedStructure::new(EdgeSet::from_code(n, k, code), true);
                    let c = complement_expansion(&a).unwrap();
                    if k % 2 == 1 {
                        assert_eq!(c.kay(), a.kay());
                    } else {
                        assert_eq!(*c.kay(), a.kay().complement());
                    }
                    assert_eq!(complement_expansion(&c).unwrap(), a);
                }
            }
        }
    }

    #[test]
    fn star_extension_of_edgeless() {
        let d = ExpandedStructure::new(EdgeSet::empty(3, 2), true);
        let e = star_extension(&d).unwrap();
        assert_eq!(e.size(), 4);
        for x in 0..3 {
            assert!(e.edges().contains(bit(x) | bit(3)));
        }
        for x in k_subsets(3, 2) {
            assert!(!e.kay().contains(x | bit(3)));
        }
        assert_eq!(e.edges().len(), d.edges().len() + binomial(3, 1) as usize);
    }

    #[test]
    fn star_extension_law_k3() {
        for n in 0..=5 {
            for code in 0..1u64 << binomial(n, 3) {
                let d = ExpandedStructure::new(EdgeSet::from_code(n, 3, code), true);
                let e = star_extension(&d).unwrap();
                assert_eq!(e.edges().len(), d.edges().len() + binomial(n, 2) as usize);
            }
        }
    }

    #[test]
    fn edge_induction_step() {
        // Adding one edge toggles exactly the (k+1)-sets containing it.
        for k in 2..=3 {
            let n = 6;
            for code in (0..1u64 << binomial(n, k)).step_by(4099) {
                let h = EdgeSet::from_code(n, k, code);
                let before = kay_edges(&h);
                for e in k_subsets(n, k) {
                    if h.contains(e) {
                        continue;
                    }
                    let mut h2 = h.clone();
                    h2.insert(e);
                    let after = kay_edges(&h2);
                    for y in k_subsets(n, k + 1) {
                        assert_eq!(before.contains(y) != after.contains(y), y & e == e);
                    }
                    assert_eq!(parity_violation(&after), None);
                }
            }
        }
    }

    #[test]
    fn functoriality_under_restriction() {
        for k in 2..=3 {
            let n = 6;
            for code in (0..1u64 << binomial(n, k)).step_by(1021) {
                let h = EdgeSet::from_code(n, k, code);
                let s = kay_edges(&h);
                for sub in 0..1u64 << n {
                    let verts = mask_to_vec(sub);
                    assert_eq!(kay_edges(&h.restrict(&verts)), s.restrict(&verts));
                }
            }
        }
    }

    #[test]
    fn two_route_membership() {
        for n in 0..=5 {
            for code in 0..1u64 << binomial(n, 3) {
                let s = Structure::from_edge_set("S", &EdgeSet::from_code(n, 3, code), false);
                let m = kay_class_membership(&s, 1 << 20).unwrap();
                assert_eq!(m.member, m.preimage.is_some());
                if let Some(p) = m.preimage {
                    assert_eq!(kay_edges(&p).code(), Some(code));
                }
            }
        }
    }

    #[test]
    fn membership_budget() {
        let s = Structure::from_edge_set("S", &EdgeSet::empty(7, 4), false);
        assert!(matches!(kay_class_membership(&s, 1 << 20), Err(Error::Budget { .. })));
    }

    #[test]
    fn expanded_structure_io() {
        let e = ExpandedStructure::new(edges(4, 2, &[&[0, 1], &[2, 3]]), true);
        let s = e.to_structure();
        assert_eq!(ExpandedStructure::from_structure(&s).unwrap(), e);
        assert_eq!(s.signature(), &Signature::expanded(2, true));
        // Tampering with S is caught.
        let wrong = Structure::from_edge_sets(Signature::expanded(2, true), 4, &[e.edges(), &EdgeSet::empty(4, 3)]).unwrap();
        assert!(ExpandedStructure::from_structure(&wrong).is_err());
    }
}
