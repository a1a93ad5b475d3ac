//! Binary trees, their leaf C-relations, and tournaments carrying one.
//!
//! Convention: for distinct leaves, `C(a; b, c)` holds iff the meet of `b`
//! and `c` lies strictly deeper than the meet of `a` and `b`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::canon::canonical_form;
use crate::class::{is_tournament, tournament_from_code};
use crate::error::{Error, Result};
use crate::structure::{Signature, Structure, Symbol};
use crate::subsets::binomial;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BinaryTree {
    Leaf(usize),
    Node(Box<BinaryTree>, Box<BinaryTree>),
}

impl BinaryTree {
    /// Parses a nested-parentheses leaf list such as `((0,1),(2,3))`. The
    /// leaves must be exactly `0..n`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bytes: Vec<u8> = spec.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let mut pos = 0;
        let tree = parse_tree(&bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(Error::Tree(format!("trailing input at offset {pos}")));
        }
        let mut leaves = tree.leaves();
        leaves.sort_unstable();
        if leaves.iter().enumerate().any(|(i, &l)| i != l) {
            return Err(Error::Tree(format!("leaves must be 0..{} exactly once each", leaves.len())));
        }
        Ok(tree)
    }

    /// Leaf labels, left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            BinaryTree::Leaf(l) => out.push(*l),
            BinaryTree::Node(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BinaryTree::Leaf(_) => 1,
            BinaryTree::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Root-to-leaf paths (`false` = left), indexed by leaf label.
    fn paths(&self) -> Vec<Vec<bool>> {
        let mut out = vec![Vec::new(); self.leaf_count()];
        let mut stack = vec![(self, Vec::new())];
        while let Some((t, path)) = stack.pop() {
            match t {
                BinaryTree::Leaf(l) => out[*l] = path,
                BinaryTree::Node(l, r) => {
                    let mut lp = path.clone();
                    lp.push(false);
                    let mut rp = path;
                    rp.push(true);
                    stack.push((l, lp));
                    stack.push((r, rp));
                }
            }
        }
        out
    }

    /// All trees with leaves `0..n`, each shape and labelling once.
    pub fn all(n: usize) -> Vec<BinaryTree> {
        if n == 0 {
            return Vec::new();
        }
        let mut trees = vec![BinaryTree::Leaf(0)];
        for leaf in 1..n {
            let mut next = Vec::new();
            for t in &trees {
                t.insertions(leaf, &mut next);
            }
            trees = next;
        }
        trees
    }

    /// Every tree obtained by hanging a new leaf next to one subtree.
    fn insertions(&self, leaf: usize, out: &mut Vec<BinaryTree>) {
        out.push(BinaryTree::Node(Box::new(self.clone()), Box::new(BinaryTree::Leaf(leaf))));
        if let BinaryTree::Node(l, r) = self {
            let mut left = Vec::new();
            l.insertions(leaf, &mut left);
            out.extend(left.into_iter().map(|nl| BinaryTree::Node(Box::new(nl), r.clone())));
            let mut right = Vec::new();
            r.insertions(leaf, &mut right);
            out.extend(right.into_iter().map(|nr| BinaryTree::Node(l.clone(), Box::new(nr))));
        }
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinaryTree::Leaf(l) => write!(f, "{l}"),
            BinaryTree::Node(l, r) => write!(f, "({l},{r})"),
        }
    }
}

fn parse_tree(bytes: &[u8], pos: &mut usize) -> Result<BinaryTree> {
    match bytes.get(*pos) {
        Some(b'(') => {
            *pos += 1;
            let left = parse_tree(bytes, pos)?;
            expect(bytes, pos, b',')?;
            let right = parse_tree(bytes, pos)?;
            expect(bytes, pos, b')')?;
            Ok(BinaryTree::Node(Box::new(left), Box::new(right)))
        }
        Some(b) if b.is_ascii_digit() => {
            let start = *pos;
            while bytes.get(*pos).is_some_and(|b| b.is_ascii_digit()) {
                *pos += 1;
            }
            let text = std::str::from_utf8(&bytes[start..*pos]).expect("ascii digits");
            text.parse()
                .map(BinaryTree::Leaf)
                .map_err(|_| Error::Tree(format!("bad leaf label {text:?}")))
        }
        Some(&b) => Err(Error::Tree(format!("unexpected {:?} at offset {}", b as char, *pos))),
        None => Err(Error::Tree("unexpected end of input".into())),
    }
}

fn expect(bytes: &[u8], pos: &mut usize, want: u8) -> Result<()> {
    if bytes.get(*pos) == Some(&want) {
        *pos += 1;
        Ok(())
    } else {
        Err(Error::Tree(format!("expected {:?} at offset {}", want as char, *pos)))
    }
}

/// `{R/2, C/3}`, both plain.
pub fn cameron_signature() -> Signature {
    Signature::new(vec![Symbol::plain("R", 2), Symbol::plain("C", 3)]).expect("valid")
}

/// The tournament `t` together with the C-relation of `tree`, where leaf
/// `l` is placed at vertex `assignment[l]`.
pub fn cameron_structure(t: &Structure, tree: &BinaryTree, assignment: &[usize]) -> Result<Structure> {
    if *t.signature() != Signature::tournament() || !is_tournament(t) {
        return Err(Error::Structure("expected a tournament over {R/2}".into()));
    }
    let n = t.size();
    if tree.leaf_count() != n {
        return Err(Error::Tree(format!("tree has {} leaves, tournament has {n} vertices", tree.leaf_count())));
    }
    let mut seen = vec![false; n];
    if assignment.len() != n || assignment.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::Tree(format!("leaf assignment {assignment:?} is not a bijection onto 0..{n}")));
    }
    let leaf_paths = tree.paths();
    let mut paths = vec![Vec::new(); n];
    for (leaf, &v) in assignment.iter().enumerate() {
        paths[v] = leaf_paths[leaf].clone();
    }
    let meet = |x: usize, y: usize| paths[x].iter().zip(&paths[y]).take_while(|(p, q)| p == q).count();
    let mut c = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                if a != b && b != cc && a != cc && meet(b, cc) > meet(a, b) {
                    c.push(vec![a, b, cc]);
                }
            }
        }
    }
    Structure::new(cameron_signature(), n, vec![t.tuples(0), c])
}

/// Canonical representatives of all Cameron structures on exactly `n`
/// vertices, sorted.
pub fn enumerate_cameron(n: usize, budget: u64) -> Result<Vec<Structure>> {
    if n == 0 {
        return Ok(vec![Structure::empty(cameron_signature(), 0)?]);
    }
    let trees = BinaryTree::all(n);
    let pairs = binomial(n, 2);
    let labelled = (1u128 << pairs) * trees.len() as u128;
    if labelled > budget as u128 {
        return Err(Error::Budget {
            what: format!("Cameron structures on {n} vertices"),
            estimate: labelled,
            budget: budget as u128,
        });
    }
    let identity: Vec<usize> = (0..n).collect();
    let found: BTreeSet<Structure> = (0..1u64 << pairs)
        .into_par_iter()
        .fold(BTreeSet::new, |mut acc, code| {
            let t = tournament_from_code(n, code);
            for tree in &trees {
                let s = cameron_structure(&t, tree, &identity).expect("valid by construction");
                acc.insert(canonical_form(&s).structure);
            }
            acc
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    Ok(found.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{automorphisms, is_rigid};

    #[test]
    fn parse_and_display() {
        let t = BinaryTree::parse(" ((0, 1),(2,3))").unwrap();
        assert_eq!(t.to_string(), "((0,1),(2,3))");
        assert_eq!(t.leaves(), vec![0, 1, 2, 3]);
        for bad in ["", "(0,1", "(0,0)", "(1,2)", "(0,1))", "(0;1)", "(a,1)"] {
            assert!(BinaryTree::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn tree_counts() {
        // (2n-3)!! rooted binary trees on n labelled leaves.
        let counts: Vec<usize> = (1..=6).map(|n| BinaryTree::all(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 15, 105, 945]);
        let distinct: std::collections::HashSet<String> = BinaryTree::all(5).iter().map(|t| t.to_string()).collect();
        assert_eq!(distinct.len(), 105);
    }

    fn transitive(n: usize) -> Structure {
        let mut arcs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                arcs.push(vec![a, b]);
            }
        }
        Structure::new(Signature::tournament(), n, vec![arcs]).unwrap()
    }

    #[test]
    fn two_leaves_have_no_c_triples() {
        let s = cameron_structure(&transitive(2), &BinaryTree::parse("(0,1)").unwrap(), &[0, 1]).unwrap();
        assert_eq!(s.relation_len(1), 0);
    }

    #[test]
    fn caterpillar_meet_rule() {
        let s = cameron_structure(&transitive(3), &BinaryTree::parse("(0,(1,2))").unwrap(), &[0, 1, 2]).unwrap();
        assert!(s.holds(1, &[0, 1, 2]));
        assert!(s.holds(1, &[0, 2, 1]));
        assert!(!s.holds(1, &[1, 0, 2]));
        assert!(!s.holds(1, &[2, 0, 1]));
        assert_eq!(s.relation_len(1), 2);
    }

    #[test]
    fn assignment_relabels_leaves() {
        let tree = BinaryTree::parse("(0,(1,2))").unwrap();
        let s = cameron_structure(&transitive(3), &tree, &[2, 0, 1]).unwrap();
        assert!(s.holds(1, &[2, 0, 1]));
        assert!(cameron_structure(&transitive(3), &tree, &[0, 0, 1]).is_err());
        assert!(cameron_structure(&transitive(4), &tree, &[0, 1, 2]).is_err());
    }

    #[test]
    fn c_reduct_groups_are_two_groups() {
        for n in 1..=5 {
            for tree in BinaryTree::all(n) {
                let s = cameron_structure(&transitive(n), &tree, &(0..n).collect::<Vec<_>>()).unwrap();
                let c_only = s.reduct(&[1]).unwrap();
                let order = automorphisms(&c_only).len();
                assert!(order.is_power_of_two(), "{tree}: {order}");
            }
        }
    }

    #[test]
    fn cameron_structures_are_rigid() {
        for n in 0..=5 {
            for s in enumerate_cameron(n, 1 << 20).unwrap() {
                assert!(is_rigid(&s), "{s:?}");
            }
        }
    }

    #[test]
    fn enumeration_budget() {
        assert!(matches!(enumerate_cameron(6, 1000), Err(Error::Budget { .. })));
    }
}
