//! Expansions of Kay-graphs by a `k`-hypergraph: counting, enumeration, the
//! colouring by reconstructed edges, and the constructive failure of the
//! `k`-Ramsey property for ordered Kay-graphs.

use rayon::prelude::*;
use serde::Serialize;

use crate::class::{kay_labelled, ClassPool};
use crate::embed::embeds;
use crate::error::{Error, Result};
use crate::kay::{hypergraph_parts, kay_edges, parity_violation, reconstruct_edges, star_extension, ExpandedStructure, DEFAULT_STAR};
use crate::ramsey::{oscillation_holds, ArrowQuery, Mode, SearchOptions, Verdict};
use crate::structure::Structure;
use crate::subsets::{binomial, bit, k_subsets, EdgeSet};

/// Witness lists longer than this are not materialized.
pub const WITNESS_LIMIT: usize = 64;

/// Number of `k`-edge sets `R` with `K(R) = S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCount {
    pub k: usize,
    pub count: u64,
    /// All such `R` in code order, when at most [`WITNESS_LIMIT`].
    pub witnesses: Option<Vec<EdgeSet>>,
}

/// The `(k+1)`-edge set of a base structure over `{S[, <]}`.
fn base_edges(base: &Structure, k: usize) -> Result<(EdgeSet, bool)> {
    let (s, ordered) = hypergraph_parts(base, 3)?;
    if s.arity() != k + 1 {
        return Err(Error::NotAHypergraph {
            min_arity: k + 1,
            reason: format!("expected arity {}, found {}", k + 1, s.arity()),
        });
    }
    Ok((s, ordered))
}

/// Counts expansions by scanning all `2^C(n, k)` edge sets.
pub fn count_expansions(base: &Structure, k: usize, budget: u64) -> Result<ExpansionCount> {
    let (s, _) = base_edges(base, k)?;
    let n = s.vertex_count();
    let slots = binomial(n, k);
    if slots >= 63 || 1u64 << slots > budget {
        return Err(Error::Budget {
            what: format!("expansion count over 2^{slots} edge sets"),
            estimate: 1u128 << slots.min(127),
            budget: budget as u128,
        });
    }
    let codes: Vec<u64> = (0..1u64 << slots)
        .into_par_iter()
        .filter(|&code| kay_edges(&EdgeSet::from_code(n, k, code)) == s)
        .collect();
    let witnesses = (codes.len() <= WITNESS_LIMIT).then(|| codes.iter().map(|&c| EdgeSet::from_code(n, k, c)).collect());
    Ok(ExpansionCount {
        k,
        count: codes.len() as u64,
        witnesses,
    })
}

/// All expansions of `s`, as the reconstructed preimage plus the span of
/// the stars of `(k-1)`-sets avoiding the default star, in Gray-code order.
/// Empty when `s` is not a Kay-graph.
pub fn enumerate_expansions(s: &EdgeSet, budget: u64) -> Result<Vec<EdgeSet>> {
    if parity_violation(s).is_some() {
        return Ok(Vec::new());
    }
    let n = s.vertex_count();
    if n == 0 {
        let k = s.arity() - 1;
        return Ok(vec![EdgeSet::empty(0, k)]);
    }
    let r0 = reconstruct_edges(s, DEFAULT_STAR)?;
    let k = r0.arity();
    let generators: Vec<EdgeSet> = k_subsets(n - 1, k - 1)
        .map(|t| {
            let t = t << 1;
            let mut g = EdgeSet::empty(n, k);
            for x in k_subsets(n, k).filter(|&x| x & t == t) {
                g.insert(x);
            }
            g
        })
        .collect();
    let dim = generators.len();
    if dim >= 63 || 1u64 << dim > budget {
        return Err(Error::Budget {
            what: format!("2^{dim} expansions"),
            estimate: 1u128 << dim.min(127),
            budget: budget as u128,
        });
    }
    let mut out = Vec::with_capacity(1 << dim);
    let mut cur = r0;
    out.push(cur.clone());
    for i in 1u64..1 << dim {
        cur = cur.xor(&generators[i.trailing_zeros() as usize]);
        out.push(cur.clone());
    }
    Ok(out)
}

/// Two-colouring of the `k`-sets of a Kay-graph by membership in its
/// reconstructed expansion around the default star.
pub fn expansion_colouring(c_base: &Structure, k: usize) -> Result<EdgeSet> {
    let (s, _) = base_edges(c_base, k)?;
    reconstruct_edges(&s, DEFAULT_STAR)
}

/// `kay` of the ordered single `k`-edge `{0..k-1}` on `k + 2` vertices.
pub fn b_star_edges(k: usize) -> EdgeSet {
    let mut r = EdgeSet::empty(k + 2, k);
    r.insert((1u64 << k) - 1);
    kay_edges(&r)
}

/// Pattern code of `set` restricted to `verts`: bit `j` is set when the
/// `j`-th local subset (colex) is an edge.
fn restricted_code(set: &EdgeSet, verts: &[usize]) -> u64 {
    let mut code = 0;
    for (j, local) in k_subsets(verts.len(), set.arity()).enumerate() {
        let mut global = 0;
        let mut rest = local;
        while rest != 0 {
            global |= bit(verts[rest.trailing_zeros() as usize]);
            rest &= rest - 1;
        }
        if set.contains(global) {
            code |= 1 << j;
        }
    }
    code
}

/// Outcome for one Kay-graph `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberCheck {
    /// The expansion colouring.
    pub colouring: EdgeSet,
    /// Number of copies of `B*`.
    pub copies: u64,
    /// A copy of `B*` on which the colouring is constant, if any.
    pub monochromatic: Option<Vec<usize>>,
}

/// Colours the `k`-sets of `s` by [`expansion_colouring`] and scans every
/// copy of `B*` for a monochromatic one.
pub fn check_member(k: usize, s: &EdgeSet) -> Result<MemberCheck> {
    let colouring = if s.vertex_count() == 0 {
        EdgeSet::empty(0, k)
    } else {
        reconstruct_edges(s, DEFAULT_STAR)?
    };
    let target = restricted_code(&b_star_edges(k), &(0..k + 2).collect::<Vec<_>>());
    let full = (1u64 << binomial(k + 2, k)) - 1;
    let mut copies = 0;
    let mut monochromatic = None;
    for x in k_subsets(s.vertex_count(), k + 2) {
        let verts: Vec<usize> = crate::subsets::mask_to_vec(x);
        if restricted_code(s, &verts) != target {
            continue;
        }
        copies += 1;
        let col = restricted_code(&colouring, &verts);
        if (col == 0 || col == full) && monochromatic.is_none() {
            monochromatic = Some(verts);
        }
    }
    Ok(MemberCheck {
        colouring,
        copies,
        monochromatic,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeTally {
    pub n: usize,
    pub members: u64,
    pub members_with_copies: u64,
    pub copies: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonRamseyReport {
    pub k: usize,
    pub max_n: usize,
    /// `k = 2` falls outside the proven range.
    pub exploratory: bool,
    /// `S(B*)`, as sorted `(k+1)`-sets.
    pub b_star: Vec<Vec<usize>>,
    pub empty_kay_differs: bool,
    pub full_kay_differs: bool,
    pub sizes: Vec<SizeTally>,
    /// `(n, code)` of members whose colouring has a monochromatic copy.
    pub failures: Vec<(usize, u64)>,
}

impl NonRamseyReport {
    pub fn holds(&self) -> bool {
        self.empty_kay_differs && self.full_kay_differs && self.failures.is_empty()
    }
}

fn report_header(k: usize, max_n: usize) -> Result<NonRamseyReport> {
    if k < 2 {
        return Err(Error::NotAHypergraph {
            min_arity: 2,
            reason: format!("k = {k}"),
        });
    }
    let b = b_star_edges(k);
    let empty = kay_edges(&EdgeSet::empty(k + 2, k));
    let full = kay_edges(&EdgeSet::full(k + 2, k));
    Ok(NonRamseyReport {
        k,
        max_n,
        exploratory: k == 2,
        b_star: b.iter().map(crate::subsets::mask_to_vec).collect(),
        empty_kay_differs: empty != b,
        full_kay_differs: full != b,
        sizes: Vec::new(),
        failures: Vec::new(),
    })
}

/// Runs the check over every labelled ordered Kay-graph on at most `max_n`
/// vertices. `visit` sees each member's `S` and its check.
pub fn non_ramsey_witness<F>(k: usize, max_n: usize, budget: u64, visit: F) -> Result<NonRamseyReport>
where
    F: Fn(usize, u64, &EdgeSet, &MemberCheck) + Sync,
{
    let mut report = report_header(k, max_n)?;
    let total: u128 = (0..=max_n).map(|m| 1u128 << binomial(m.saturating_sub(1), k).min(127)).sum();
    if total > budget as u128 {
        return Err(Error::Budget {
            what: format!("ordered Kay-graphs with k = {k} up to {max_n} vertices"),
            estimate: total,
            budget: budget as u128,
        });
    }
    for m in 0..=max_n {
        let codes = 1u64 << binomial(m.saturating_sub(1), k);
        let tallies: Vec<(u64, u64, Option<u64>)> = (0..codes)
            .into_par_iter()
            .map(|code| {
                let s = kay_labelled(m, k, code);
                let check = check_member(k, &s).expect("labelled members are Kay-graphs");
                visit(m, code, &s, &check);
                (check.copies, (check.copies > 0) as u64, check.monochromatic.map(|_| code))
            })
            .collect();
        report.sizes.push(SizeTally {
            n: m,
            members: codes,
            members_with_copies: tallies.iter().map(|t| t.1).sum(),
            copies: tallies.iter().map(|t| t.0).sum(),
        });
        report.failures.extend(tallies.iter().filter_map(|t| t.2).map(|c| (m, c)));
    }
    Ok(report)
}

/// [`non_ramsey_witness`] over an explicit pool of `(k+1)`-hypergraphs.
pub fn non_ramsey_over_pool(k: usize, pool: &ClassPool) -> Result<NonRamseyReport> {
    let mut report = report_header(k, pool.max_size())?;
    for m in 0..=pool.max_size() {
        let mut tally = SizeTally {
            n: m,
            members: 0,
            members_with_copies: 0,
            copies: 0,
        };
        for (i, c) in pool.of_size(m).iter().enumerate() {
            let (s, _) = base_edges(c, k)?;
            let check = check_member(k, &s)?;
            tally.members += 1;
            tally.copies += check.copies;
            tally.members_with_copies += (check.copies > 0) as u64;
            if check.monochromatic.is_some() {
                report.failures.push((m, i as u64));
            }
        }
        report.sizes.push(tally);
    }
    Ok(report)
}

/// Outcome of the positive probe for one `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub b: Structure,
    pub verdict: Verdict,
    pub witness: Option<Structure>,
    pub tried: usize,
}

/// For `A` the size-`s` member of `pool` and each `B` of size at most
/// `b_max`, searches the pool in increasing size for `C` with
/// `C -> (B)^A_2`.
pub fn positive_erp_probe(pool: &ClassPool, s: usize, b_max: usize, opts: SearchOptions) -> Result<Vec<ProbeOutcome>> {
    let a = pool
        .of_size(s)
        .first()
        .cloned()
        .ok_or_else(|| Error::Structure(format!("pool has no member of size {s}")))?;
    let mut out = Vec::new();
    for b in pool.iter().filter(|b| b.size() <= b_max) {
        let mut outcome = ProbeOutcome {
            b: b.clone(),
            verdict: Verdict::Fails,
            witness: None,
            tried: 0,
        };
        if !embeds(&a, b)? {
            outcome.verdict = Verdict::Vacuous;
            out.push(outcome);
            continue;
        }
        for c in pool.iter().filter(|c| c.size() >= b.size()) {
            outcome.tried += 1;
            let q = ArrowQuery {
                c: c.clone(),
                b: b.clone(),
                a: a.clone(),
                colours: 2,
                mode: Mode::Copies,
                degree: 1,
            };
            match oscillation_holds(&q, opts)?.verdict {
                Verdict::Holds => {
                    outcome.verdict = Verdict::Holds;
                    outcome.witness = Some(c.clone());
                    break;
                }
                Verdict::BudgetExhausted => {
                    outcome.verdict = Verdict::BudgetExhausted;
                    break;
                }
                _ => {}
            }
        }
        out.push(outcome);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionProbe {
    pub holds: bool,
    pub expansions: u64,
    /// An expansion of `B` into which `A*` does not embed.
    pub failing: Option<EdgeSet>,
}

/// Whether every expansion of `b` (over `{S[, <]}`) embeds `a_star`.
pub fn expansion_property_probe(a_star: &ExpandedStructure, b: &Structure, budget: u64) -> Result<ExpansionProbe> {
    let (s, ordered) = base_edges(b, a_star.k())?;
    if ordered != a_star.is_ordered() {
        return Err(Error::SignatureMismatch("A* and B disagree on the order".into()));
    }
    let pattern = a_star.to_structure();
    let expansions = enumerate_expansions(&s, budget)?;
    let failing = expansions
        .par_iter()
        .find_first(|r| !embeds(&pattern, &ExpandedStructure::new((*r).clone(), ordered).to_structure()).unwrap_or(false))
        .cloned();
    Ok(ExpansionProbe {
        holds: failing.is_none(),
        expansions: expansions.len() as u64,
        failing,
    })
}

/// `A* ⊔ complement(A*)`, with `A*` on the lower vertices.
pub fn doubled(a_star: &ExpandedStructure) -> ExpandedStructure {
    let n = a_star.size();
    let comp = a_star.edges().complement();
    let mut r = a_star.edges().widen(2 * n);
    for x in comp.iter() {
        r.insert(x << n);
    }
    ExpandedStructure::new(r, a_star.is_ordered())
}

/// Candidate `B` for the expansion property of `A*`: the `{S[, <]}`-reduct
/// of the star extension of `d`, which defaults to `A* ⊔ complement(A*)`.
pub fn recipe_candidate(a_star: &ExpandedStructure, d: Option<&ExpandedStructure>) -> Result<Structure> {
    let d = d.cloned().unwrap_or_else(|| doubled(a_star));
    Ok(star_extension(&d)?.base())
}
