//! Independent certificate checkers. They use only structure queries and
//! literal enumeration (all subsets, all injections), never the searchers.

use itertools::Itertools;

use crate::embed::is_embedding;
use crate::error::{Error, Result};
use crate::ramsey::{ArrowCertificate, Mode, Pattern, Verdict};
use crate::structure::Structure;

/// Every injective map `A -> C` that is an embedding, in lexicographic
/// order.
pub fn brute_embeddings(a: &Structure, c: &Structure) -> Vec<Vec<usize>> {
    (0..c.size())
        .permutations(a.size())
        .filter(|m| is_embedding(a, c, m))
        .collect()
}

/// Every vertex set of `C` inducing a copy of `A`, sorted.
pub fn brute_copies(a: &Structure, c: &Structure) -> Vec<Vec<usize>> {
    (0..c.size())
        .combinations(a.size())
        .filter(|set| set.iter().copied().permutations(set.len()).any(|m| is_embedding(a, c, &m)))
        .collect()
}

fn brute_points(a: &Structure, c: &Structure, mode: Mode) -> Vec<Vec<usize>> {
    match mode {
        Mode::Copies => brute_copies(a, c),
        Mode::Embeddings => brute_embeddings(a, c),
    }
}

fn inside(point: &[usize], block: &[usize]) -> bool {
    point.iter().all(|v| block.contains(v))
}

/// Checks that `colouring` (indexed like `points`) leaves every `B`-copy of
/// `C` above its bound for some pattern. `points` must be exactly the
/// points of each pattern, in any order.
pub fn check_bad_colouring(
    c: &Structure,
    b: &Structure,
    patterns: &[Pattern],
    mode: Mode,
    points: &[Vec<Vec<usize>>],
    colouring: &[Vec<usize>],
) -> std::result::Result<(), String> {
    if points.len() != patterns.len() || colouring.len() != patterns.len() {
        return Err("one point list and one colouring per pattern expected".into());
    }
    for (g, p) in patterns.iter().enumerate() {
        let mut listed = points[g].clone();
        listed.sort();
        if listed != brute_points(&p.a, c, mode) {
            return Err(format!("pattern {g}: listed points differ from the brute-force enumeration"));
        }
        if colouring[g].len() != points[g].len() {
            return Err(format!("pattern {g}: colouring has the wrong length"));
        }
        if let Some(&bad) = colouring[g].iter().find(|&&x| x >= p.colours) {
            return Err(format!("pattern {g}: colour {bad} outside a palette of {}", p.colours));
        }
    }
    for block in brute_copies(b, c) {
        let good = patterns.iter().enumerate().all(|(g, p)| {
            let seen: Vec<usize> = points[g]
                .iter()
                .zip(&colouring[g])
                .filter(|(pt, _)| inside(pt, &block))
                .map(|(_, &col)| col)
                .sorted()
                .dedup()
                .collect();
            seen.len() <= p.degree
        });
        if good {
            return Err(format!("copy {block:?} is within every bound"));
        }
    }
    Ok(())
}

/// Decides the query by trying every colouring, or `None` above `limit`.
pub fn brute_force_arrow(c: &Structure, b: &Structure, patterns: &[Pattern], mode: Mode, limit: u64) -> Option<bool> {
    let points: Vec<Vec<Vec<usize>>> = patterns.iter().map(|p| brute_points(&p.a, c, mode)).collect();
    let mut total: u64 = 1;
    for (p, pts) in patterns.iter().zip(&points) {
        for _ in 0..pts.len() {
            total = total.checked_mul(p.colours as u64)?;
            if total > limit {
                return None;
            }
        }
    }
    let blocks = brute_copies(b, c);
    // members[block][group] as point indices.
    let members: Vec<Vec<Vec<usize>>> = blocks
        .iter()
        .map(|bl| points.iter().map(|pts| (0..pts.len()).filter(|&i| inside(&pts[i], bl)).collect()).collect())
        .collect();
    let digits: Vec<(usize, usize)> = points
        .iter()
        .enumerate()
        .flat_map(|(g, pts)| (0..pts.len()).map(move |i| (g, i)))
        .collect();
    let mut colouring: Vec<Vec<usize>> = points.iter().map(|p| vec![0; p.len()]).collect();
    let mut seen = Vec::new();
    for _ in 0..total {
        let any_good = members.iter().any(|mem| {
            mem.iter().enumerate().all(|(g, idx)| {
                seen.clear();
                seen.extend(idx.iter().map(|&i| colouring[g][i]));
                seen.sort_unstable();
                seen.dedup();
                seen.len() <= patterns[g].degree
            })
        });
        if !any_good {
            return Some(false);
        }
        // Mixed-radix increment over all points.
        for &(g, i) in &digits {
            colouring[g][i] += 1;
            if colouring[g][i] < patterns[g].colours {
                break;
            }
            colouring[g][i] = 0;
        }
    }
    Some(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertCheck {
    Confirmed,
    Rejected(String),
    /// Nothing to check, or too large to recheck by enumeration.
    Unchecked(String),
}

/// Rechecks an arrow certificate against its query.
pub fn check_arrow_certificate(
    c: &Structure,
    b: &Structure,
    patterns: &[Pattern],
    mode: Mode,
    cert: &ArrowCertificate,
    limit: u64,
) -> CertCheck {
    if cert.mode != mode {
        return CertCheck::Rejected("certificate mode differs from the query".into());
    }
    match cert.verdict {
        Verdict::Fails => {
            let Some(col) = &cert.bad_colouring else {
                return CertCheck::Rejected("fails verdict without a colouring".into());
            };
            match check_bad_colouring(c, b, patterns, mode, &cert.points, col) {
                Ok(()) => CertCheck::Confirmed,
                Err(why) => CertCheck::Rejected(why),
            }
        }
        Verdict::Holds => match brute_force_arrow(c, b, patterns, mode, limit) {
            Some(true) => CertCheck::Confirmed,
            Some(false) => CertCheck::Rejected("a bad colouring exists".into()),
            None => CertCheck::Unchecked(format!("more than {limit} colourings")),
        },
        Verdict::Vacuous => {
            let a_misses = patterns.iter().any(|p| brute_embeddings(&p.a, b).is_empty());
            if a_misses || brute_embeddings(b, c).is_empty() {
                CertCheck::Confirmed
            } else {
                CertCheck::Rejected("every pattern embeds in B and B embeds in C".into())
            }
        }
        Verdict::BudgetExhausted => CertCheck::Unchecked("budget exhausted".into()),
    }
}

/// Checks a colouring of the `k`-sets of an ordered Kay-graph `C` (given by
/// its `(k+1)`-sets `s` on `n` vertices):
/// its Kay-graph is `C`, and no copy of `B*` (the Kay-graph of the single
/// edge on the first `k` of `k + 2` vertices) is monochromatic.
pub fn check_expansion_colouring(k: usize, n: usize, s: &[u64], colouring: &[u64]) -> Result<std::result::Result<(), String>> {
    if n > 24 || k < 2 {
        return Err(Error::Structure(format!("checker supports 2 <= k and n <= 24, got k = {k}, n = {n}")));
    }
    let mut in_s = vec![false; 1 << n];
    for &m in s {
        in_s[m as usize] = true;
    }
    let mut coloured = vec![false; 1 << n];
    for &m in colouring {
        coloured[m as usize] = true;
    }
    let subsets = |mask: u64, size: usize| -> Vec<u64> {
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        verts
            .into_iter()
            .combinations(size)
            .map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect()
    };
    let everything = (1u64 << n) - 1;
    for y in subsets(everything, k + 1) {
        let count = subsets(y, k).iter().filter(|&&x| coloured[x as usize]).count();
        if (count % 2 == (k + 1) % 2) != in_s[y as usize] {
            return Ok(Err(format!("colouring is not an expansion at {y:#b}")));
        }
    }
    for x in subsets(everything, k + 2) {
        let verts: Vec<usize> = (0..n).filter(|&v| x >> v & 1 == 1).collect();
        let low: u64 = verts[..k].iter().fold(0, |m, &v| m | 1 << v);
        let is_copy = subsets(x, k + 1).iter().all(|&y| {
            let hits = (y & low == low) as usize;
            (hits % 2 == (k + 1) % 2) == in_s[y as usize]
        });
        if !is_copy {
            continue;
        }
        let cols: Vec<bool> = subsets(x, k).iter().map(|&z| coloured[z as usize]).collect();
        if cols.iter().all(|&c| c) || cols.iter().all(|&c| !c) {
            return Ok(Err(format!("monochromatic copy of B* on {verts:?}")));
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::{enumerate_class, Family};
    use crate::expansion::check_member;
    use crate::ramsey::{joint_oscillation, SearchOptions};
    use crate::subsets::EdgeSet;

    #[test]
    fn brute_counts() {
        let tri = Structure::from_edge_set("R", &EdgeSet::full(3, 2), false);
        let edge = Structure::from_edge_set("R", &EdgeSet::full(2, 2), false);
        assert_eq!(brute_embeddings(&edge, &tri).len(), 6);
        assert_eq!(brute_copies(&edge, &tri).len(), 3);
        assert_eq!(brute_embeddings(&Structure::chain(2), &Structure::chain(3)).len(), 3);
    }

    #[test]
    fn certificates_round_trip() {
        let pat = Pattern { a: Structure::chain(2), colours: 2, degree: 1 };
        let five = joint_oscillation(&Structure::chain(5), &Structure::chain(3), std::slice::from_ref(&pat), Mode::Copies, SearchOptions::default()).unwrap();
        let check = check_arrow_certificate(&Structure::chain(5), &Structure::chain(3), std::slice::from_ref(&pat), Mode::Copies, &five, 1 << 16);
        assert_eq!(check, CertCheck::Confirmed);
        let mut forged = five.clone();
        forged.bad_colouring = Some(vec![vec![0; 10]]);
        assert!(matches!(
            check_arrow_certificate(&Structure::chain(5), &Structure::chain(3), std::slice::from_ref(&pat), Mode::Copies, &forged, 1 << 16),
            CertCheck::Rejected(_)
        ));
        let six = joint_oscillation(&Structure::chain(6), &Structure::chain(3), std::slice::from_ref(&pat), Mode::Copies, SearchOptions::default()).unwrap();
        assert_eq!(
            check_arrow_certificate(&Structure::chain(6), &Structure::chain(3), std::slice::from_ref(&pat), Mode::Copies, &six, 1 << 16),
            CertCheck::Confirmed
        );
    }

    #[test]
    fn brute_force_calibration() {
        let pat = |a: usize| vec![Pattern { a: Structure::chain(a), colours: 2, degree: 1 }];
        assert_eq!(brute_force_arrow(&Structure::chain(3), &Structure::chain(2), &pat(1), Mode::Copies, 1 << 20), Some(true));
        assert_eq!(brute_force_arrow(&Structure::chain(2), &Structure::chain(2), &pat(1), Mode::Copies, 1 << 20), Some(false));
        assert_eq!(brute_force_arrow(&Structure::chain(5), &Structure::chain(3), &pat(2), Mode::Copies, 1 << 20), Some(false));
        assert_eq!(brute_force_arrow(&Structure::chain(6), &Structure::chain(3), &pat(2), Mode::Copies, 1 << 20), Some(true));
        assert_eq!(brute_force_arrow(&Structure::chain(7), &Structure::chain(3), &pat(2), Mode::Copies, 1 << 20), None);
    }

    #[test]
    fn expansion_colourings_validate() {
        let pool = enumerate_class(Family::OrderedKay, 3, 6, 1 << 20).unwrap();
        for c in pool.iter() {
            let s = c.edge_set(0).unwrap();
            let check = check_member(3, &s).unwrap();
            let masks: Vec<u64> = s.iter().collect();
            let col: Vec<u64> = check.colouring.iter().collect();
            assert_eq!(check_expansion_colouring(3, c.size(), &masks, &col).unwrap(), Ok(()));
        }
        // An edgeless colouring of five points has Kay-graph everything.
        let all: Vec<u64> = EdgeSet::full(5, 4).iter().collect();
        assert_eq!(check_expansion_colouring(3, 5, &all, &[]).unwrap(), Ok(()));
        let b: Vec<u64> = crate::expansion::b_star_edges(3).iter().collect();
        assert!(check_expansion_colouring(3, 5, &b, &[0b111]).unwrap().is_ok());
        assert!(check_expansion_colouring(3, 5, &b, &[]).unwrap().is_err());
    }
}
