//! Arrow relations and simultaneous Ramsey-degree bounds by refutation
//! search.
//!
//! A query asks whether every colouring of the copies (or embeddings) of
//! each pattern `A_i` in `C`, with `r_i` colours, leaves some copy of `B`
//! on which pattern `i` sees at most `d_i` colours for every `i`. The search
//! looks for a bad colouring, in which every `B`-copy exceeds its bound for
//! some pattern. Verdicts are three-valued: the answer "holds" is emitted
//! only once the search space is exhausted.
//!
//! Points are the `A_i`-objects in `C`; blocks are the `B`-copies. A block
//! contains a point when the point's image lies inside it, which in
//! embeddings mode is exactly the set `g ∘ Emb(A, B)` for any `g` onto the
//! block.

use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::class::ClassPool;
use crate::embed::{embeds, enumerate_copies, enumerate_embeddings};
use crate::error::{Error, Result};
use crate::structure::Structure;
use crate::subsets::vec_to_mask;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Copies,
    Embeddings,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "copies" => Ok(Mode::Copies),
            "embeddings" => Ok(Mode::Embeddings),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Copies => "copies",
            Mode::Embeddings => "embeddings",
        })
    }
}

/// A pattern with its palette size and colour bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub a: Structure,
    pub colours: usize,
    pub degree: usize,
}

/// `C -> (B)^A_{r, d}` in the given mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowQuery {
    pub c: Structure,
    pub b: Structure,
    pub a: Structure,
    pub colours: usize,
    pub mode: Mode,
    pub degree: usize,
}

/// Default node budget for arrow searches.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub budget: u64,
    /// `0` uses the ambient thread pool, `1` searches sequentially.
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_NODE_BUDGET,
            workers: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    BudgetExhausted,
    Vacuous,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::BudgetExhausted => "budget_exhausted",
            Verdict::Vacuous => "vacuous",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowCertificate {
    pub verdict: Verdict,
    pub mode: Mode,
    /// Per pattern, its points in `C`: sorted vertex sets in copies mode,
    /// maps in embeddings mode.
    pub points: Vec<Vec<Vec<usize>>>,
    /// The `B`-copies of `C`, as sorted vertex sets.
    pub blocks: Vec<Vec<usize>>,
    /// On `fails`, the colour (from `0`) of every point, per pattern.
    pub bad_colouring: Option<Vec<Vec<usize>>>,
    /// A block that was good when the last branch was refuted.
    pub good_copy: Option<Vec<usize>>,
    pub nodes: u64,
    pub note: Option<String>,
}

/// The combinatorial core of a query: points per pattern and blocks.
#[derive(Clone, Debug)]
pub struct Problem {
    pub mode: Mode,
    pub colours: Vec<usize>,
    pub degrees: Vec<usize>,
    pub points: Vec<Vec<Vec<usize>>>,
    pub blocks: Vec<Vec<usize>>,
    /// `members[block][group]`: indices of that group's points in the block.
    pub members: Vec<Vec<Vec<usize>>>,
}

impl Problem {
    /// Builds the problem, or explains why the query is vacuous.
    pub fn build(c: &Structure, b: &Structure, patterns: &[Pattern], mode: Mode) -> Result<std::result::Result<Problem, String>> {
        if patterns.is_empty() {
            return Err(Error::Structure("at least one pattern is needed".into()));
        }
        for (i, p) in patterns.iter().enumerate() {
            if p.colours == 0 || p.degree == 0 {
                return Err(Error::Structure(format!("pattern {i}: palette and degree must be positive")));
            }
            if !embeds(&p.a, b)? {
                return Ok(Err(format!("pattern {i} does not embed in B")));
            }
        }
        if !embeds(b, c)? {
            return Ok(Err("B does not embed in C".into()));
        }
        let blocks = enumerate_copies(b, c)?.members;
        let mut points = Vec::with_capacity(patterns.len());
        for p in patterns {
            points.push(match mode {
                Mode::Copies => enumerate_copies(&p.a, c)?.members,
                Mode::Embeddings => enumerate_embeddings(&p.a, c)?.into_iter().map(|e| e.0).collect(),
            });
        }
        let block_masks: Vec<u64> = blocks.iter().map(|b| vec_to_mask(b)).collect();
        let members = block_masks
            .iter()
            .map(|&bm| {
                points
                    .iter()
                    .map(|group| {
                        group
                            .iter()
                            .enumerate()
                            .filter(|(_, p)| vec_to_mask(p) & !bm == 0)
                            .map(|(i, _)| i)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Ok(Problem {
            mode,
            colours: patterns.iter().map(|p| p.colours).collect(),
            degrees: patterns.iter().map(|p| p.degree).collect(),
            points,
            blocks,
            members,
        }))
    }

    /// The first block on which every group sees at most its bound, under
    /// a complete colouring.
    pub fn good_block(&self, colouring: &[Vec<usize>]) -> Option<usize> {
        (0..self.blocks.len()).find(|&bl| {
            self.members[bl].iter().enumerate().all(|(g, pts)| {
                let mut seen: Vec<usize> = pts.iter().map(|&p| colouring[g][p]).collect();
                seen.sort_unstable();
                seen.dedup();
                seen.len() <= self.degrees[g]
            })
        })
    }

    /// Number of colourings of all points.
    pub fn colouring_count(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.colours)
            .map(|(p, &r)| (r as f64).powi(p.len() as i32))
            .product()
    }
}

/// Decides `C -> (B)^A_{r, d}`.
pub fn oscillation_holds(q: &ArrowQuery, opts: SearchOptions) -> Result<ArrowCertificate> {
    let pattern = Pattern {
        a: q.a.clone(),
        colours: q.colours,
        degree: q.degree,
    };
    joint_oscillation(&q.c, &q.b, std::slice::from_ref(&pattern), q.mode, opts)
}

/// Decides whether every family of colourings, one per pattern, has a
/// single `B`-copy within every pattern's bound.
pub fn joint_oscillation(c: &Structure, b: &Structure, patterns: &[Pattern], mode: Mode, opts: SearchOptions) -> Result<ArrowCertificate> {
    let problem = match Problem::build(c, b, patterns, mode)? {
        Ok(p) => p,
        Err(why) => {
            return Ok(ArrowCertificate {
                verdict: Verdict::Vacuous,
                mode,
                points: Vec::new(),
                blocks: Vec::new(),
                bad_colouring: None,
                good_copy: None,
                nodes: 0,
                note: Some(why),
            })
        }
    };
    solve(&problem, opts)
}

/// Runs the refutation search on a built problem.
pub fn solve(problem: &Problem, opts: SearchOptions) -> Result<ArrowCertificate> {
    let run = || solve_inner(problem, opts.budget, opts.workers != 1);
    let (verdict, colouring, good, nodes) = if opts.workers > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?
            .install(run)
    } else {
        run()
    };
    Ok(ArrowCertificate {
        verdict,
        mode: problem.mode,
        points: problem.points.clone(),
        blocks: problem.blocks.clone(),
        bad_colouring: colouring,
        good_copy: good.map(|bl| problem.blocks[bl].clone()),
        nodes,
        note: None,
    })
}

type Outcome = (Verdict, Option<Vec<Vec<usize>>>, Option<usize>, u64);

fn solve_inner(problem: &Problem, budget: u64, parallel: bool) -> Outcome {
    let mut root = State::new(problem);
    if let Some(bl) = root.first_dead_block() {
        return (Verdict::Holds, None, Some(bl), 0);
    }
    let counter = AtomicU64::new(0);
    let aborted = AtomicBool::new(false);
    if !parallel {
        let ctl = Control {
            budget,
            counter: &counter,
            aborted: &aborted,
            cancel_above: None,
            index: 0,
        };
        let found = root.dfs(0, &ctl);
        let nodes = counter.load(Ordering::Relaxed);
        return match found {
            Some(()) => (Verdict::Fails, Some(root.colouring()), None, nodes),
            None if aborted.load(Ordering::Relaxed) => (Verdict::BudgetExhausted, None, root.last_dead, nodes),
            None => (Verdict::Holds, None, root.last_dead, nodes),
        };
    }
    // Split the tree into prefixes, explored in parallel; the least prefix
    // with a bad colouring wins, matching the sequential search order.
    let target = rayon::current_num_threads() * 8;
    let prefixes = root.prefixes(target);
    let cancel = AtomicUsize::new(usize::MAX);
    let results: Vec<(Option<Vec<Vec<usize>>>, Option<usize>)> = prefixes
        .par_iter()
        .enumerate()
        .map(|(i, prefix)| {
            if cancel.load(Ordering::Relaxed) < i {
                return (None, None);
            }
            let mut st = State::new(problem);
            for &(q, c) in prefix {
                let ok = st.assign(q, c);
                debug_assert!(ok);
            }
            let ctl = Control {
                budget,
                counter: &counter,
                aborted: &aborted,
                cancel_above: Some(&cancel),
                index: i,
            };
            match st.dfs(prefix.len(), &ctl) {
                Some(()) => {
                    cancel.fetch_min(i, Ordering::Relaxed);
                    (Some(st.colouring()), None)
                }
                None => (None, st.last_dead),
            }
        })
        .collect();
    let nodes = counter.load(Ordering::Relaxed) + prefixes.len() as u64;
    if let Some(col) = results.iter().find_map(|r| r.0.clone()) {
        return (Verdict::Fails, Some(col), None, nodes);
    }
    let good = results.iter().rev().find_map(|r| r.1).or(root.last_dead);
    if aborted.load(Ordering::Relaxed) {
        (Verdict::BudgetExhausted, None, good, nodes)
    } else {
        (Verdict::Holds, None, good, nodes)
    }
}

struct Control<'a> {
    budget: u64,
    counter: &'a AtomicU64,
    aborted: &'a AtomicBool,
    cancel_above: Option<&'a AtomicUsize>,
    index: usize,
}

impl Control<'_> {
    /// Counts one node; false means stop.
    fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        if self.cancel_above.is_some_and(|c| c.load(Ordering::Relaxed) < self.index) {
            return false;
        }
        if self.counter.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

/// Incremental search state. Points are flattened across groups.
#[derive(Clone)]
struct State<'p> {
    p: &'p Problem,
    groups: usize,
    /// Flattened point -> (group, index in group).
    flat: Vec<(usize, usize)>,
    /// Flattened point -> blocks containing it.
    incid: Vec<Vec<usize>>,
    /// Flattened points in search order.
    order: Vec<usize>,
    colour: Vec<usize>,
    stride: usize,
    /// `counts[(block * groups + g) * stride + colour]`.
    counts: Vec<u32>,
    distinct: Vec<usize>,
    uncoloured: Vec<usize>,
    satisfied: Vec<bool>,
    satisfied_count: usize,
    max_used: Vec<usize>,
    last_dead: Option<usize>,
}

const UNSET: usize = usize::MAX;

impl<'p> State<'p> {
    fn new(p: &'p Problem) -> Self {
        let groups = p.points.len();
        let mut flat = Vec::new();
        let mut offset = Vec::new();
        for (g, pts) in p.points.iter().enumerate() {
            offset.push(flat.len());
            flat.extend((0..pts.len()).map(|i| (g, i)));
        }
        let mut incid = vec![Vec::new(); flat.len()];
        let mut uncoloured = vec![0; p.blocks.len() * groups];
        for (bl, mem) in p.members.iter().enumerate() {
            for (g, pts) in mem.iter().enumerate() {
                uncoloured[bl * groups + g] = pts.len();
                for &i in pts {
                    incid[offset[g] + i].push(bl);
                }
            }
        }
        // Fail-first: points in many blocks go first; ties by index.
        let mut order: Vec<usize> = (0..flat.len()).collect();
        order.sort_by_key(|&q| std::cmp::Reverse(incid[q].len()));
        let stride = p.colours.iter().copied().max().unwrap_or(1);
        let nb = p.blocks.len();
        State {
            p,
            groups,
            colour: vec![UNSET; flat.len()],
            flat,
            incid,
            order,
            stride,
            counts: vec![0; nb * groups * stride],
            distinct: vec![0; nb * groups],
            uncoloured,
            satisfied: vec![false; nb],
            satisfied_count: 0,
            max_used: vec![UNSET; groups],
            last_dead: None,
        }
    }

    fn is_dead(&self, bl: usize) -> bool {
        (0..self.groups).all(|g| {
            let i = bl * self.groups + g;
            let r = self.p.colours[g];
            let reach = self.distinct[i] + self.uncoloured[i].min(r - self.distinct[i].min(r));
            reach <= self.p.degrees[g]
        })
    }

    fn first_dead_block(&mut self) -> Option<usize> {
        let dead = (0..self.p.blocks.len()).find(|&bl| self.is_dead(bl));
        if dead.is_some() {
            self.last_dead = dead;
        }
        dead
    }

    /// Colours point `q`; returns false (leaving the assignment in place)
    /// when some block can no longer exceed its bounds.
    fn assign(&mut self, q: usize, c: usize) -> bool {
        let (g, _) = self.flat[q];
        self.colour[q] = c;
        let mut ok = true;
        for &bl in &self.incid[q] {
            let i = bl * self.groups + g;
            self.uncoloured[i] -= 1;
            let cell = &mut self.counts[i * self.stride + c];
            *cell += 1;
            if *cell == 1 {
                self.distinct[i] += 1;
                if self.distinct[i] == self.p.degrees[g] + 1 && !self.satisfied[bl] {
                    self.satisfied[bl] = true;
                    self.satisfied_count += 1;
                }
            }
        }
        for &bl in &self.incid[q] {
            if self.is_dead(bl) {
                self.last_dead = Some(bl);
                ok = false;
                break;
            }
        }
        ok
    }

    fn unassign(&mut self, q: usize) {
        let (g, _) = self.flat[q];
        let c = self.colour[q];
        self.colour[q] = UNSET;
        for &bl in &self.incid[q] {
            let i = bl * self.groups + g;
            self.uncoloured[i] += 1;
            let cell = &mut self.counts[i * self.stride + c];
            *cell -= 1;
            if *cell == 0 {
                if self.distinct[i] == self.p.degrees[g] + 1 && self.satisfied[bl] {
                    // Still satisfied through another group?
                    self.distinct[i] -= 1;
                    let still = (0..self.groups).any(|h| self.distinct[bl * self.groups + h] > self.p.degrees[h]);
                    if !still {
                        self.satisfied[bl] = false;
                        self.satisfied_count -= 1;
                    }
                } else {
                    self.distinct[i] -= 1;
                }
            }
        }
    }

    /// Colours allowed for the point at `depth`: a new colour only right
    /// after the largest one already used in its group.
    fn palette(&self, q: usize) -> usize {
        let (g, _) = self.flat[q];
        let next = if self.max_used[g] == UNSET { 0 } else { self.max_used[g] + 1 };
        (next + 1).min(self.p.colours[g])
    }

    fn dfs(&mut self, depth: usize, ctl: &Control) -> Option<()> {
        if self.satisfied_count == self.p.blocks.len() {
            for &q in &self.order[depth..] {
                self.colour[q] = 0;
            }
            return Some(());
        }
        if depth == self.order.len() {
            return None;
        }
        let q = self.order[depth];
        let (g, _) = self.flat[q];
        for c in 0..self.palette(q) {
            if !ctl.tick() {
                return None;
            }
            let saved = self.max_used[g];
            if saved == UNSET || c > saved {
                self.max_used[g] = c;
            }
            if self.assign(q, c) && self.dfs(depth + 1, ctl).is_some() {
                return Some(());
            }
            self.unassign(q);
            self.max_used[g] = saved;
            if ctl.aborted.load(Ordering::Relaxed) {
                return None;
            }
        }
        None
    }

    /// Viable assignments of the first few points in search order, in DFS
    /// order, enough to give about `target` subtrees.
    fn prefixes(&mut self, target: usize) -> Vec<Vec<(usize, usize)>> {
        let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        let mut depth = 0;
        while level.len() < target && depth < self.order.len() {
            let q = self.order[depth];
            let mut next = Vec::new();
            for prefix in &level {
                let mut st = State::new(self.p);
                for &(pq, pc) in prefix {
                    let (pg, _) = st.flat[pq];
                    if st.max_used[pg] == UNSET || pc > st.max_used[pg] {
                        st.max_used[pg] = pc;
                    }
                    st.assign(pq, pc);
                }
                if st.satisfied_count == self.p.blocks.len() {
                    next.push(prefix.clone());
                    continue;
                }
                for c in 0..st.palette(q) {
                    let mut probe = st.clone();
                    let (g, _) = probe.flat[q];
                    if probe.max_used[g] == UNSET || c > probe.max_used[g] {
                        probe.max_used[g] = c;
                    }
                    if probe.assign(q, c) {
                        let mut p = prefix.clone();
                        p.push((q, c));
                        next.push(p);
                    }
                }
            }
            level = next;
            depth += 1;
        }
        level
    }

    fn colouring(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.p.points.iter().map(|g| vec![0; g.len()]).collect();
        for (q, &(g, i)) in self.flat.iter().enumerate() {
            out[g][i] = if self.colour[q] == UNSET { 0 } else { self.colour[q] };
        }
        out
    }
}

/// Outcome of the sequential-composition construction.
#[derive(Clone, Debug)]
pub struct Composition {
    /// `levels[i]` is the witness built for the first `i + 1` patterns.
    pub levels: Vec<Structure>,
    pub certificate: ArrowCertificate,
}

/// Builds a joint witness from single-pattern witnesses: `W_0 = B` and
/// `W_i` is the first pool member with `W_i -> (W_{i-1})^{A_i}`. The last
/// level is then checked with the joint search.
pub fn compose_witness(pool: &ClassPool, b: &Structure, patterns: &[Pattern], mode: Mode, opts: SearchOptions) -> Result<Option<Composition>> {
    let mut levels = Vec::new();
    let mut prev = b.clone();
    for p in patterns {
        let mut found = None;
        for cand in pool.iter().filter(|s| s.size() >= prev.size()) {
            let single = joint_oscillation(cand, &prev, std::slice::from_ref(p), mode, opts)?;
            match single.verdict {
                Verdict::Holds => {
                    found = Some(cand.clone());
                    break;
                }
                Verdict::BudgetExhausted => {
                    return Err(Error::Budget {
                        what: "single-pattern witness search".into(),
                        estimate: single.nodes as u128,
                        budget: opts.budget as u128,
                    })
                }
                _ => {}
            }
        }
        let Some(w) = found else { return Ok(None) };
        levels.push(w.clone());
        prev = w;
    }
    let certificate = joint_oscillation(&prev, b, patterns, mode, opts)?;
    if certificate.verdict == Verdict::Fails {
        return Err(Error::Invariant("composed witness fails the joint search".into()));
    }
    Ok(Some(Composition { levels, certificate }))
}
