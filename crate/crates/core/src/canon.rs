//! Canonical forms by individualisation and refinement.
//!
//! The canonical form of a structure is the least relabelled copy (under
//! the derived `Ord` on [`Structure`]) among the leaves of a search tree
//! whose nodes are equitable ordered colourings. The tree is built from
//! isomorphism-invariant data only, so isomorphic inputs give identical
//! forms. Branches are pruned when two candidate vertices are swapped by a
//! transposition automorphism, since their subtrees then yield identical
//! leaves. Ordered structures are rigid and are their own canonical form.

use std::collections::BTreeMap;

use crate::structure::{Structure, SymbolKind};
use crate::subsets::mask_iter;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub structure: Structure,
    /// `relabelling[v]` is the canonical label of vertex `v`.
    pub relabelling: Vec<usize>,
}

pub fn canonical_form(a: &Structure) -> Canonical {
    let n = a.size();
    if a.is_ordered() || n <= 1 {
        return Canonical {
            structure: a.clone(),
            relabelling: (0..n).collect(),
        };
    }
    let incidences = Incidences::new(a);
    let mut ctx = Search {
        a,
        incidences: &incidences,
        twins: vec![vec![None; n]; n],
        best: None,
    };
    let start = ctx.refine(vec![0; n]);
    ctx.descend(start);
    let (structure, relabelling) = ctx.best.expect("at least one leaf");
    Canonical {
        structure,
        relabelling,
    }
}

/// Isomorphism test through canonical forms. Returns `iso` with
/// `iso[v]` the image in `b` of vertex `v` of `a`.
pub fn is_isomorphic(a: &Structure, b: &Structure) -> Option<Vec<usize>> {
    if a.signature() != b.signature() || a.size() != b.size() {
        return None;
    }
    let ca = canonical_form(a);
    let cb = canonical_form(b);
    if ca.structure != cb.structure {
        return None;
    }
    let mut inv_b = vec![0; b.size()];
    for (v, &l) in cb.relabelling.iter().enumerate() {
        inv_b[l] = v;
    }
    Some(ca.relabelling.iter().map(|&l| inv_b[l]).collect())
}

/// For each vertex, the tuples it occurs in (symbol, tuple), so that
/// refinement does not rescan every relation per vertex.
struct Incidences {
    by_vertex: Vec<Vec<(usize, usize, Vec<usize>)>>,
}

impl Incidences {
    fn new(a: &Structure) -> Self {
        let mut by_vertex: Vec<Vec<(usize, usize, Vec<usize>)>> = vec![Vec::new(); a.size()];
        for (si, sym) in a.signature().symbols().iter().enumerate() {
            match sym.kind {
                SymbolKind::Order => {}
                SymbolKind::Hyperedge => {
                    for &m in a.hyperedge_masks(si).unwrap_or(&[]) {
                        let verts: Vec<usize> = mask_iter(m).collect();
                        for &v in &verts {
                            // Position is irrelevant for sets.
                            by_vertex[v].push((si, 0, verts.clone()));
                        }
                    }
                }
                SymbolKind::Plain => {
                    for t in a.tuples(si) {
                        for (p, &v) in t.iter().enumerate() {
                            by_vertex[v].push((si, p, t.clone()));
                        }
                    }
                }
            }
        }
        Incidences { by_vertex }
    }
}

struct Search<'a> {
    a: &'a Structure,
    incidences: &'a Incidences,
    /// Lazily computed: whether the transposition (u v) is an automorphism.
    twins: Vec<Vec<Option<bool>>>,
    best: Option<(Structure, Vec<usize>)>,
}

impl Search<'_> {
    /// Colour refinement to the coarsest equitable colouring finer than
    /// `colours`. Colour indices are assigned by sorting invariant keys, so
    /// the result is isomorphism-equivariant.
    fn refine(&self, mut colours: Vec<usize>) -> Vec<usize> {
        let n = colours.len();
        let mut cells = count_cells(&colours);
        loop {
            let keys: Vec<(usize, Vec<(usize, usize, Vec<usize>)>)> = (0..n)
                .map(|v| {
                    let mut sig: Vec<(usize, usize, Vec<usize>)> = self.incidences.by_vertex[v]
                        .iter()
                        .map(|(s, p, t)| {
                            let kind = self.a.signature().symbol(*s).kind;
                            let mut cs: Vec<usize> = t.iter().map(|&u| colours[u]).collect();
                            if kind == SymbolKind::Hyperedge {
                                cs.sort_unstable();
                            }
                            (*s, *p, cs)
                        })
                        .collect();
                    sig.sort_unstable();
                    (colours[v], sig)
                })
                .collect();
            let mut distinct: BTreeMap<&(usize, Vec<(usize, usize, Vec<usize>)>), usize> = BTreeMap::new();
            for k in &keys {
                distinct.insert(k, 0);
            }
            for (i, slot) in distinct.values_mut().enumerate() {
                *slot = i;
            }
            colours = keys.iter().map(|k| distinct[k]).collect();
            let new_cells = distinct.len();
            if new_cells == cells {
                return colours;
            }
            cells = new_cells;
        }
    }

    fn descend(&mut self, colours: Vec<usize>) {
        let n = colours.len();
        let counts = cell_sizes(&colours);
        let target = counts.iter().position(|&c| c > 1);
        let Some(cell) = target else {
            let candidate = self.a.relabel_unchecked(&colours);
            let better = match &self.best {
                None => true,
                Some((b, _)) => candidate < *b,
            };
            if better {
                self.best = Some((candidate, colours));
            }
            return;
        };
        let members: Vec<usize> = (0..n).filter(|&v| colours[v] == cell).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &members {
            if tried.iter().any(|&u| self.is_twin(u, v)) {
                continue;
            }
            tried.push(v);
            // Individualise v ahead of its cell-mates, then renumber.
            let mut keyed: Vec<(usize, bool)> =
                (0..n).map(|u| (colours[u], u != v)).collect();
            let mut sorted = keyed.clone();
            sorted.sort_unstable();
            sorted.dedup();
            let split: Vec<usize> = keyed
                .drain(..)
                .map(|k| sorted.binary_search(&k).expect("present"))
                .collect();
            let refined = self.refine(split);
            self.descend(refined);
        }
    }

    fn is_twin(&mut self, u: usize, v: usize) -> bool {
        if let Some(t) = self.twins[u][v] {
            return t;
        }
        let mut perm: Vec<usize> = (0..self.a.size()).collect();
        perm.swap(u, v);
        let t = self.a.relabel_unchecked(&perm) == *self.a;
        self.twins[u][v] = Some(t);
        self.twins[v][u] = Some(t);
        t
    }
}

fn count_cells(colours: &[usize]) -> usize {
    let mut c = colours.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn cell_sizes(colours: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; colours.len()];
    for &c in colours {
        counts[c] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{Signature, Symbol};
    use itertools::Itertools;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[[usize; 2]]) -> Structure {
        Structure::new(
            Signature::hypergraph("R", 2, false),
            n,
            vec![edges.iter().map(|e| e.to_vec()).collect()],
        )
        .unwrap()
    }

    fn brute_isomorphic(a: &Structure, b: &Structure) -> bool {
        a.size() == b.size()
            && (0..a.size())
                .permutations(a.size())
                .any(|p| a.relabel_unchecked(&p) == *b)
    }

    #[test]
    fn relabellings_agree() {
        let p = graph(4, &[[0, 1], [1, 2], [2, 3]]);
        let q = graph(4, &[[2, 0], [0, 3], [3, 1]]);
        assert_eq!(canonical_form(&p).structure, canonical_form(&q).structure);
        let iso = is_isomorphic(&p, &q).unwrap();
        assert_eq!(p.relabel_unchecked(&iso), q);
    }

    #[test]
    fn path_versus_triangle() {
        let path = graph(3, &[[0, 1], [1, 2]]);
        let tri = graph(3, &[[0, 1], [1, 2], [0, 2]]);
        assert_ne!(canonical_form(&path).structure, canonical_form(&tri).structure);
        assert!(is_isomorphic(&path, &tri).is_none());
    }

    #[test]
    fn ordered_structures_are_fixed() {
        let c = Structure::chain(5);
        assert_eq!(canonical_form(&c).structure, c);
    }

    #[test]
    fn symmetric_structures_stay_fast() {
        // Empty and complete graphs on 10 vertices: all vertices are twins.
        let empty = graph(10, &[]);
        assert_eq!(canonical_form(&empty).structure, empty);
        let all: Vec<[usize; 2]> = (0..10).tuple_combinations().map(|(a, b)| [a, b]).collect();
        let full = graph(10, &all);
        assert_eq!(canonical_form(&full).structure, full);
    }

    fn arb_structure() -> impl Strategy<Value = Structure> {
        (1usize..=6, prop::collection::vec(any::<u16>(), 0..40), 0u8..3).prop_map(|(n, raw, shape)| {
            let sig = match shape {
                0 => Signature::hypergraph("R", 2, false),
                1 => Signature::tournament(),
                _ => Signature::new(vec![Symbol::plain("E", 2), Symbol::hyperedge("T", 3)]).unwrap(),
            };
            let mut rels: Vec<Vec<Vec<usize>>> = vec![Vec::new(); sig.len()];
            for r in raw {
                let r = r as usize;
                let (x, y, z) = (r % n, (r / 7) % n, (r / 49) % n);
                match shape {
                    0 if x != y => rels[0].push(vec![x, y]),
                    1 => rels[0].push(vec![x, y]),
                    2 => {
                        if r % 2 == 0 {
                            rels[0].push(vec![x, y]);
                        } else if x != y && y != z && x != z {
                            rels[1].push(vec![x, y, z]);
                        }
                    }
                    _ => {}
                }
            }
            Structure::new(sig, n, rels).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn canonical_form_is_idempotent(s in arb_structure()) {
            let c = canonical_form(&s);
            prop_assert_eq!(&canonical_form(&c.structure).structure, &c.structure);
            prop_assert_eq!(s.relabel_unchecked(&c.relabelling), c.structure);
        }

        #[test]
        fn invariant_under_relabelling(s in arb_structure(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..s.size()).collect();
            perm.shuffle(&mut rng);
            let t = s.relabel_unchecked(&perm);
            prop_assert_eq!(canonical_form(&s).structure, canonical_form(&t).structure);
        }

        #[test]
        fn agrees_with_brute_force(a in arb_structure(), b in arb_structure()) {
            if a.signature() == b.signature() && a.size() == b.size() && a.size() <= 5 {
                prop_assert_eq!(is_isomorphic(&a, &b).is_some(), brute_isomorphic(&a, &b));
            }
        }
    }
}
