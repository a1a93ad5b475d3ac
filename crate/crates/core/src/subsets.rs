//! Vertex subsets as `u64` masks, colex ranking of `k`-subsets, and
//! [`EdgeSet`], a bitset over ranked `k`-subsets used by every parity
//! computation in the crate.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::MAX_DOMAIN;

const BINOM: [[u64; 65]; 65] = {
    let mut t = [[0u64; 65]; 65];
    let mut n = 0;
    while n < 65 {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1].saturating_add(t[n - 1][k]);
            k += 1;
        }
        n += 1;
    }
    t
};

/// Binomial coefficient, saturating at `u64::MAX`.
#[inline]
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        0
    } else if n < 65 {
        BINOM[n][k]
    } else {
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
            if acc > u64::MAX as u128 {
                return u64::MAX;
            }
        }
        acc as u64
    }
}

#[inline]
pub fn bit(v: usize) -> u64 {
    1u64 << v
}

/// Sorted vertex list of a mask.
pub fn mask_to_vec(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

pub fn vec_to_mask(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |m, &v| m | bit(v))
}

/// Iterator over the vertices of a mask in increasing order.
pub fn mask_iter(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

/// All `k`-subsets of `{0..n}` as masks in increasing numeric order, which is
/// colex order on the underlying sets.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    assert!(n <= MAX_DOMAIN);
    let limit: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut next = if k > n {
        None
    } else if k == 0 {
        Some(0u64)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur.wrapping_add(c);
            if r == 0 {
                None
            } else {
                let nxt = (((r ^ cur) >> 2) / c) | r;
                (nxt <= limit && nxt.count_ones() as usize == k).then_some(nxt)
            }
        };
        Some(cur)
    })
}

/// All `k`-subsets of `{0..n}` as sorted vertex lists in lexicographic order.
pub fn lex_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    use itertools::Itertools;
    (0..n).combinations(k)
}

/// Colex rank of a `k`-subset mask among all `k`-subsets.
#[inline]
pub fn rank(mask: u64) -> usize {
    let mut r = 0u64;
    for (i, v) in mask_iter(mask).enumerate() {
        r += binomial(v, i + 1);
    }
    r as usize
}

/// Inverse of [`rank`] for `k`-subsets.
pub fn unrank(mut r: usize, k: usize) -> u64 {
    let mut mask = 0u64;
    for i in (1..=k).rev() {
        let mut v = i - 1;
        while binomial(v + 1, i) as usize <= r {
            v += 1;
        }
        r -= binomial(v, i) as usize;
        mask |= bit(v);
    }
    mask
}

/// A set of `k`-subsets of an `n`-element vertex set, indexed by colex rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet {
    n: usize,
    k: usize,
    bits: FixedBitSet,
}

impl EdgeSet {
    pub fn empty(n: usize, k: usize) -> Self {
        assert!(n <= MAX_DOMAIN, "domain too large");
        EdgeSet {
            n,
            k,
            bits: FixedBitSet::with_capacity(binomial(n, k) as usize),
        }
    }

    pub fn full(n: usize, k: usize) -> Self {
        let mut e = EdgeSet::empty(n, k);
        e.bits.insert_range(..);
        e
    }

    pub fn from_masks(n: usize, k: usize, masks: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut e = EdgeSet::empty(n, k);
        for m in masks {
            if m.count_ones() as usize != k {
                return Err(Error::Structure(format!(
                    "edge {:?} does not have {k} vertices",
                    mask_to_vec(m)
                )));
            }
            if n < 64 && m >> n != 0 {
                return Err(Error::OutOfRange {
                    vertex: 63 - m.leading_zeros() as usize,
                    size: n,
                });
            }
            e.insert(m);
        }
        Ok(e)
    }

    /// Builds the edge set whose `i`-th ranked subset is present iff bit `i`
    /// of `code` is set. Requires `C(n, k) <= 64`.
    pub fn from_code(n: usize, k: usize, code: u64) -> Self {
        let slots = binomial(n, k) as usize;
        assert!(slots <= 64, "edge code needs C(n,k) <= 64");
        let mut e = EdgeSet::empty(n, k);
        for i in 0..slots {
            if code >> i & 1 == 1 {
                e.bits.insert(i);
            }
        }
        e
    }

    /// Inverse of [`EdgeSet::from_code`], when it fits.
    pub fn code(&self) -> Option<u64> {
        if self.slots() > 64 {
            return None;
        }
        Some(self.bits.ones().fold(0u64, |c, i| c | 1u64 << i))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    /// Number of `k`-subsets available, i.e. `C(n, k)`.
    pub fn slots(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    #[inline]
    pub fn contains(&self, mask: u64) -> bool {
        self.bits.contains(rank(mask))
    }

    #[inline]
    pub fn contains_rank(&self, r: usize) -> bool {
        self.bits.contains(r)
    }

    pub fn insert(&mut self, mask: u64) {
        debug_assert_eq!(mask.count_ones() as usize, self.k);
        self.bits.insert(rank(mask));
    }

    /// Inserts the subset of colex rank `r`.
    #[inline]
    pub fn insert_rank(&mut self, r: usize) {
        self.bits.insert(r);
    }

    pub fn remove(&mut self, mask: u64) {
        self.bits.set(rank(mask), false);
    }

    pub fn toggle(&mut self, mask: u64) {
        self.bits.toggle(rank(mask));
    }

    pub fn set(&mut self, mask: u64, present: bool) {
        self.bits.set(rank(mask), present);
    }

    /// Edges as masks, in colex order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let k = self.k;
        self.bits.ones().map(move |r| unrank(r, k))
    }

    pub fn complement(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        EdgeSet {
            n: self.n,
            k: self.k,
            bits,
        }
    }

    /// Symmetric difference with another edge set of the same shape.
    pub fn xor(&self, other: &EdgeSet) -> Self {
        assert_eq!((self.n, self.k), (other.n, other.k));
        let mut bits = self.bits.clone();
        bits.symmetric_difference_with(&other.bits);
        EdgeSet {
            n: self.n,
            k: self.k,
            bits,
        }
    }

    /// Edges lying inside `vertices`, relabelled order-preservingly.
    pub fn restrict(&self, vertices: &[usize]) -> Self {
        let mut out = EdgeSet::empty(vertices.len(), self.k);
        for local in k_subsets(vertices.len(), self.k) {
            let global = mask_iter(local).fold(0, |m, i| m | bit(vertices[i]));
            if self.contains(global) {
                out.insert(local);
            }
        }
        out
    }

    /// The same edges on a vertex set enlarged to `n` vertices.
    pub fn widen(&self, n: usize) -> Self {
        assert!(n >= self.n);
        let mut out = EdgeSet::empty(n, self.k);
        for m in self.iter() {
            out.insert(m);
        }
        out
    }

    /// Number of edges contained in the vertex set `mask`.
    pub fn count_within(&self, mask: u64) -> usize {
        let verts = mask_to_vec(mask);
        k_subsets(verts.len(), self.k)
            .filter(|&local| {
                let global = mask_iter(local).fold(0, |m, i| m | bit(verts[i]));
                self.contains(global)
            })
            .count()
    }
}
