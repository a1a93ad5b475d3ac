//! Quantifier-free 2-types, orderability of finite pools, and the
//! extraction of an order definition from direction colourings.
//!
//! A candidate definition is a set of complete 2-types, one from each pair
//! of converse types. All verdicts are relative to the pool searched.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::class::{check_property, CheckOptions, ClassPool, Property};
use crate::embed::{automorphisms, enumerate_copies};
use crate::error::{Error, Result};
use crate::ramsey::{joint_oscillation, Mode, Pattern, SearchOptions, Verdict};
use crate::structure::{Signature, Structure};

pub use crate::embed::is_rigid;

/// Complete 2-type code: per symbol, bit `t` is set when the tuple whose
/// `i`-th entry is `a` or `b` according to bit `i` of `t` holds.
pub type TypeCode = Vec<u64>;

/// Largest arity a 2-type code can record.
pub const MAX_TYPE_ARITY: usize = 6;

/// The 2-type of the ordered pair `(a, b)`, `a != b`.
pub fn type_of(s: &Structure, a: usize, b: usize) -> Result<TypeCode> {
    let sig = s.signature();
    let mut code = Vec::with_capacity(sig.len());
    let mut tuple = Vec::new();
    for i in 0..sig.len() {
        let arity = sig.symbol(i).arity;
        if arity > MAX_TYPE_ARITY {
            return Err(Error::Signature(format!("arity {arity} exceeds {MAX_TYPE_ARITY} for 2-types")));
        }
        let mut bits = 0u64;
        for t in 0..1usize << arity {
            tuple.clear();
            tuple.extend((0..arity).map(|j| if t >> j & 1 == 1 { b } else { a }));
            if s.holds(i, &tuple) {
                bits |= 1 << t;
            }
        }
        code.push(bits);
    }
    Ok(code)
}

/// The type of the swapped pair.
pub fn converse_code(sig: &Signature, code: &[u64]) -> TypeCode {
    code.iter()
        .enumerate()
        .map(|(i, &bits)| {
            let arity = sig.symbol(i).arity;
            let flip = (1usize << arity) - 1;
            (0..1usize << arity)
                .filter(|t| bits >> t & 1 == 1)
                .fold(0, |acc, t| acc | 1 << (t ^ flip))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoType {
    pub code: TypeCode,
    /// A realizing 2-element structure and the designated pair in it.
    pub representative: Structure,
    pub pair: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeAtlas {
    pub signature: Signature,
    /// Sorted by code, so ids do not depend on the pool.
    pub types: Vec<TwoType>,
    pub converse: Vec<usize>,
    pub self_converse: Vec<usize>,
    /// First realization of each type: member index in pool order, pair.
    pub witnesses: Vec<(usize, usize, usize)>,
}

impl TypeAtlas {
    pub fn id(&self, code: &[u64]) -> Option<usize> {
        self.types.binary_search_by(|t| t.code.as_slice().cmp(code)).ok()
    }

    /// Converse pairs, by least id. Within a pair the type realized first
    /// (member order, then `(a, b)` with `a < b` before its swap) comes first.
    pub fn converse_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.types.len())
            .filter(|&t| self.converse[t] > t)
            .map(|t| {
                let u = self.converse[t];
                if self.witnesses[u] < self.witnesses[t] {
                    (u, t)
                } else {
                    (t, u)
                }
            })
            .collect()
    }
}

/// All 2-types realized on distinct elements of pool members.
pub fn build_atlas(pool: &ClassPool) -> Result<TypeAtlas> {
    let sig = pool.signature().clone();
    let mut found: BTreeMap<TypeCode, (usize, usize, usize)> = BTreeMap::new();
    for (mi, s) in pool.iter().enumerate() {
        for a in 0..s.size() {
            for b in 0..s.size() {
                if a != b {
                    found.entry(type_of(s, a, b)?).or_insert((mi, a, b));
                }
            }
        }
    }
    let members: Vec<&Structure> = pool.iter().collect();
    let mut types = Vec::with_capacity(found.len());
    let mut witnesses = Vec::with_capacity(found.len());
    for (code, &(mi, a, b)) in &found {
        let representative = members[mi].induced_substructure(&[a, b])?;
        let pair = if a < b { (0, 1) } else { (1, 0) };
        types.push(TwoType {
            code: code.clone(),
            representative,
            pair,
        });
        witnesses.push((mi, a, b));
    }
    let codes: Vec<&TypeCode> = found.keys().collect();
    let mut converse = Vec::with_capacity(types.len());
    for c in &codes {
        let conv = converse_code(&sig, c);
        let id = codes
            .binary_search(&&conv)
            .map_err(|_| Error::Invariant("converse of a realized type is unrealized".into()))?;
        converse.push(id);
    }
    let self_converse = (0..types.len()).filter(|&t| converse[t] == t).collect();
    Ok(TypeAtlas {
        signature: sig,
        types,
        converse,
        self_converse,
        witnesses,
    })
}

/// A candidate definition `Φ(x, y)`: the union of the chosen types.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderDefinition {
    pub chosen: Vec<TypeCode>,
}

impl OrderDefinition {
    /// `rel[a][b]` iff `Φ(a, b)`.
    pub fn relation(&self, s: &Structure) -> Result<Vec<Vec<bool>>> {
        let n = s.size();
        let mut rel = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    rel[a][b] = self.chosen.binary_search(&type_of(s, a, b)?).is_ok();
                }
            }
        }
        Ok(rel)
    }

    /// Checks literally that `Φ` is a strict linear order on `s`.
    pub fn check_linear(&self, s: &Structure) -> Result<std::result::Result<(), String>> {
        Ok(check_strict_linear(&self.relation(s)?))
    }
}

/// Irreflexive, trichotomous on distinct pairs, and transitive.
pub fn check_strict_linear(rel: &[Vec<bool>]) -> std::result::Result<(), String> {
    let n = rel.len();
    for a in 0..n {
        if rel[a][a] {
            return Err(format!("reflexive at {a}"));
        }
        for b in 0..n {
            if a != b && rel[a][b] == rel[b][a] {
                return Err(format!("pair ({a}, {b}) is not ordered exactly one way"));
            }
            for c in 0..n {
                if rel[a][b] && rel[b][c] && !rel[a][c] {
                    return Err(format!("not transitive on ({a}, {b}, {c})"));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateFailure {
    /// Chosen type ids.
    pub chosen: Vec<usize>,
    /// The smallest pool member on which the candidate has a cycle.
    pub member: Structure,
    pub cycle: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Orderability {
    Orderable(OrderDefinition),
    /// A self-converse type realized on distinct elements.
    SelfConverse { ty: usize, member: Structure, pair: (usize, usize) },
    /// Every selection has a cycle on some member.
    Exhausted {
        candidates: u64,
        failures: Vec<CandidateFailure>,
        truncated: bool,
    },
}

/// Candidate lists longer than this are truncated in reports.
pub const FAILURE_LIST_LIMIT: usize = 1 << 12;

/// A forbidden joint assignment: literals `(pair, side)` that together
/// produce a 3-cycle, with the member index and cycle that witness it.
#[derive(Clone, Debug)]
struct Clause {
    lits: Vec<(usize, bool)>,
    member: usize,
    cycle: [usize; 3],
}

/// Searches every selection of one type per converse pair, least first
/// (the first type of each pair, see [`TypeAtlas::converse_pairs`], is tried
/// first). The two branches at the
/// first pair run in parallel.
pub fn orderability_search(pool: &ClassPool, atlas: &TypeAtlas) -> Result<Orderability> {
    if *pool.signature() != atlas.signature {
        return Err(Error::SignatureMismatch("atlas was built over another signature".into()));
    }
    let members: Vec<&Structure> = pool.iter().collect();
    if let Some(&ty) = atlas.self_converse.first() {
        let (mi, a, b) = atlas.witnesses[ty];
        return Ok(Orderability::SelfConverse {
            ty,
            member: members[mi].clone(),
            pair: (a, b),
        });
    }
    let pairs = atlas.converse_pairs();
    // Literal for the ordered pair (u, v): Φ(u, v) iff var == side.
    let mut lit_of = vec![(0usize, false); atlas.types.len()];
    for (p, &(t, u)) in pairs.iter().enumerate() {
        lit_of[t] = (p, false);
        lit_of[u] = (p, true);
    }
    let mut clauses: BTreeMap<Vec<(usize, bool)>, Clause> = BTreeMap::new();
    for (mi, s) in members.iter().enumerate() {
        let n = s.size();
        let mut lit = vec![vec![(0, false); n]; n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let id = atlas
                        .id(&type_of(s, a, b)?)
                        .ok_or_else(|| Error::Invariant("pool realizes a type missing from the atlas".into()))?;
                    lit[a][b] = lit_of[id];
                }
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    for cycle in [[x, y, z], [x, z, y]] {
                        let [p, q, r] = cycle;
                        let mut lits = vec![lit[p][q], lit[q][r], lit[r][p]];
                        lits.sort_unstable();
                        lits.dedup();
                        if lits.windows(2).any(|w| w[0].0 == w[1].0) {
                            continue;
                        }
                        clauses.entry(lits.clone()).or_insert(Clause { lits, member: mi, cycle });
                    }
                }
            }
        }
    }
    let clauses: Vec<Clause> = clauses.into_values().collect();
    let m = pairs.len();
    let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (ci, c) in clauses.iter().enumerate() {
        by_last[c.lits.iter().map(|l| l.0).max().expect("nonempty")].push(ci);
    }
    let solve_from = |first: bool| -> Option<Vec<bool>> {
        let mut assign = vec![false; m];
        assign[0] = first;
        if violated(&clauses, &by_last[0], &assign).is_some() {
            return None;
        }
        dfs(1, &mut assign, &clauses, &by_last).then_some(assign)
    };
    let solution = if m == 0 {
        Some(Vec::new())
    } else {
        let (lo, hi) = rayon::join(|| solve_from(false), || solve_from(true));
        lo.or(hi)
    };
    if let Some(assign) = solution {
        let mut chosen: Vec<TypeCode> = pairs
            .iter()
            .zip(&assign)
            .map(|(&(t, u), &side)| atlas.types[if side { u } else { t }].code.clone())
            .collect();
        chosen.sort();
        let def = OrderDefinition { chosen };
        for s in &members {
            if let Err(why) = def.check_linear(s)? {
                return Err(Error::Invariant(format!("selected definition is not a linear order: {why}")));
            }
        }
        return Ok(Orderability::Orderable(def));
    }
    let candidates = 1u64.checked_shl(m as u32).unwrap_or(u64::MAX);
    let listed = candidates.min(FAILURE_LIST_LIMIT as u64);
    let mut failures = Vec::with_capacity(listed as usize);
    for code in 0..listed {
        let assign: Vec<bool> = (0..m).map(|p| code >> p & 1 == 1).collect();
        let worst = clauses
            .iter()
            .filter(|c| c.lits.iter().all(|&(p, side)| assign[p] == side))
            .min_by_key(|c| (members[c.member].size(), c.member))
            .ok_or_else(|| Error::Invariant("exhausted candidate without a violated clause".into()))?;
        failures.push(CandidateFailure {
            chosen: pairs.iter().zip(&assign).map(|(&(t, u), &side)| if side { u } else { t }).collect(),
            member: members[worst.member].clone(),
            cycle: worst.cycle,
        });
    }
    Ok(Orderability::Exhausted {
        candidates,
        truncated: listed < candidates,
        failures,
    })
}

fn violated(clauses: &[Clause], ids: &[usize], assign: &[bool]) -> Option<usize> {
    ids.iter()
        .copied()
        .find(|&ci| clauses[ci].lits.iter().all(|&(p, side)| assign[p] == side))
}

fn dfs(depth: usize, assign: &mut Vec<bool>, clauses: &[Clause], by_last: &[Vec<usize>]) -> bool {
    if depth == assign.len() {
        return true;
    }
    for side in [false, true] {
        assign[depth] = side;
        if violated(clauses, &by_last[depth], assign).is_none() && dfs(depth + 1, assign, clauses, by_last) {
            return true;
        }
    }
    assign[depth] = false;
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Largest number of order expansions tried per candidate `C`.
    pub order_budget: u64,
    /// Also run the joint search on each `(C, B)` used.
    pub verify_joint: bool,
    pub search: SearchOptions,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            order_budget: 1 << 16,
            verify_joint: false,
            search: SearchOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionStep {
    pub b: Structure,
    pub c: Structure,
    /// `rank[v]` is the position of vertex `v` in the order expansion.
    pub rank: Vec<usize>,
    /// The copy `B'` on which every direction colouring is constant.
    pub copy: Vec<usize>,
    /// `(type id chosen as increasing)` for each converse pair seen in `B'`.
    pub increasing: Vec<usize>,
    /// Verdict of the joint search for `C -> (B)` over the 2-element
    /// substructures of `B`, when requested. Recorded, not required.
    pub joint: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtractionOutcome {
    Ordered(OrderDefinition),
    SelfConverse { ty: usize },
    /// No candidate `C` and order expansion gives a constant copy of `b`.
    NoConstantCopy { b: Structure },
    /// Two `B`s disagree on the direction of a converse pair.
    Inconsistent { ty: usize, first: Structure, second: Structure },
    Budget { b: Structure },
    /// The merged directions fail to order some member.
    NotLinear { member: Structure, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub outcome: ExtractionOutcome,
    pub steps: Vec<ExtractionStep>,
    /// Whether the pool has joint embedding; `None` when not checked.
    pub jep: Option<bool>,
}

/// Pools up to this many members get an explicit joint-embedding check.
pub const JEP_CHECK_LIMIT: usize = 200;

/// For each `B`, finds a candidate `C` (B first, then larger members), an
/// order expansion of `C` and a copy `B'` of `B` on which each direction
/// colouring is constant, then merges the directions read off on `B'`.
pub fn two_erp_order_extraction(pool: &ClassPool, opts: ExtractOptions) -> Result<Extraction> {
    let atlas = build_atlas(pool)?;
    let jep = if pool.family().is_some() {
        Some(true)
    } else if pool.len() <= JEP_CHECK_LIMIT {
        Some(check_property(pool, Property::JointEmbedding, CheckOptions::default())?.holds)
    } else {
        None
    };
    let mut steps = Vec::new();
    if let Some(&ty) = atlas.self_converse.first() {
        return Ok(Extraction {
            outcome: ExtractionOutcome::SelfConverse { ty },
            steps,
            jep,
        });
    }
    let mut direction: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let members: Vec<&Structure> = pool.iter().collect();
    for (bi, b) in members.iter().enumerate() {
        if b.size() < 2 {
            continue;
        }
        let candidates = std::iter::once(*b).chain(members.iter().copied().filter(|c| c.size() > b.size()));
        let mut step = None;
        let mut exhausted = false;
        'cands: for c in candidates {
            let copies = enumerate_copies(b, c)?.members;
            let aut = automorphisms(c);
            let mut tried = 0u64;
            let mut found = None;
            let mut over = false;
            for_each_order(c.size(), &aut, |rank| {
                tried += 1;
                if tried > opts.order_budget {
                    over = true;
                    return false;
                }
                for copy in &copies {
                    if let Some(inc) = constant_directions(c, copy, rank, &atlas) {
                        found = Some((rank.to_vec(), copy.clone(), inc));
                        return false;
                    }
                }
                true
            })?;
            if let Some((rank, copy, increasing)) = found {
                let joint = if opts.verify_joint {
                    Some(joint_oscillation(c, b, &pair_patterns(b)?, Mode::Embeddings, opts.search)?.verdict)
                } else {
                    None
                };
                step = Some(ExtractionStep {
                    b: (*b).clone(),
                    c: c.clone(),
                    rank,
                    copy,
                    increasing,
                    joint,
                });
                break 'cands;
            }
            exhausted |= over;
        }
        let Some(step) = step else {
            let outcome = if exhausted {
                ExtractionOutcome::Budget { b: (*b).clone() }
            } else {
                ExtractionOutcome::NoConstantCopy { b: (*b).clone() }
            };
            return Ok(Extraction { outcome, steps, jep });
        };
        for &t in &step.increasing {
            let key = t.min(atlas.converse[t]);
            match direction.get(&key) {
                Some(&(prev, from)) if prev != t => {
                    return Ok(Extraction {
                        outcome: ExtractionOutcome::Inconsistent {
                            ty: key,
                            first: members[from].clone(),
                            second: (*b).clone(),
                        },
                        steps,
                        jep,
                    });
                }
                Some(_) => {}
                None => {
                    direction.insert(key, (t, bi));
                }
            }
        }
        steps.push(step);
    }
    let mut chosen: Vec<TypeCode> = atlas
        .converse_pairs()
        .iter()
        .map(|&(t, u)| atlas.types[direction.get(&t.min(u)).map_or(t, |d| d.0)].code.clone())
        .collect();
    chosen.sort();
    let def = OrderDefinition { chosen };
    for s in &members {
        if let Err(reason) = def.check_linear(s)? {
            return Ok(Extraction {
                outcome: ExtractionOutcome::NotLinear {
                    member: (*s).clone(),
                    reason,
                },
                steps,
                jep,
            });
        }
    }
    Ok(Extraction {
        outcome: ExtractionOutcome::Ordered(def),
        steps,
        jep,
    })
}

/// The 2-element substructures of `b` up to isomorphism, as patterns with
/// two colours and degree one.
fn pair_patterns(b: &Structure) -> Result<Vec<Pattern>> {
    let mut seen: Vec<Structure> = Vec::new();
    for x in 0..b.size() {
        for y in x + 1..b.size() {
            let a = crate::canon::canonical_form(&b.induced_substructure(&[x, y])?).structure;
            if !seen.contains(&a) {
                seen.push(a);
            }
        }
    }
    Ok(seen
        .into_iter()
        .map(|a| Pattern { a, colours: 2, degree: 1 })
        .collect())
}

/// On `copy`, returns the increasing type of each converse pair when every
/// pair of the copy with that type is ordered the same way by `rank`.
fn constant_directions(c: &Structure, copy: &[usize], rank: &[usize], atlas: &TypeAtlas) -> Option<Vec<usize>> {
    let mut inc: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &x) in copy.iter().enumerate() {
        for &y in &copy[i + 1..] {
            let t = atlas.id(&type_of(c, x, y).ok()?)?;
            let up = if rank[x] < rank[y] { t } else { atlas.converse[t] };
            let key = t.min(atlas.converse[t]);
            if *inc.entry(key).or_insert(up) != up {
                return None;
            }
        }
    }
    Some(inc.into_values().collect())
}

/// Visits rank vectors of all linear orders on `n` points, one per orbit of
/// `aut` (the lexicographically least), identity first. Stops when `visit`
/// returns false.
fn for_each_order<F>(n: usize, aut: &[Vec<usize>], mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> bool,
{
    let mut rank: Vec<usize> = (0..n).collect();
    loop {
        let least = aut.iter().all(|g| {
            let moved: Vec<usize> = (0..n).map(|v| rank[g[v]]).collect();
            moved >= rank
        });
        if least && !visit(&rank) {
            return Ok(());
        }
        if !next_permutation(&mut rank) {
            return Ok(());
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
