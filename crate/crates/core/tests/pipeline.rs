//! End-to-end checks of the public API against small independent oracles.

use std::collections::BTreeSet;

use kaylab::cert::{check_document, CertificateDocument, PatternRef};
use kaylab::kay::{kay_edges, parity_violation, reconstruct_edges};
use kaylab::verify::CertCheck;
use kaylab::{enumerate_class, io, joint_oscillation, EdgeSet, Family, Mode, Pattern, SearchOptions, Structure, Verdict};
use proptest::prelude::*;

/// Edges of the Kay-graph by direct counting over sorted vertex lists.
fn naive_kay(n: usize, k: usize, edges: &BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for set in subsets(n, k + 1) {
        let inside = (0..set.len())
            .filter(|&skip| {
                let sub: Vec<usize> = set.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                edges.contains(&sub)
            })
            .count();
        if inside % 2 == (k + 1) % 2 {
            out.insert(set);
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect())
        .collect()
}

fn as_lists(e: &EdgeSet) -> BTreeSet<Vec<usize>> {
    e.iter().map(kaylab::subsets::mask_to_vec).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn kay_matches_direct_count(k in 2usize..=4, n in 0usize..=7, seed in any::<u64>()) {
        let slots = kaylab::subsets::binomial(n, k);
        let code = if slots == 0 { 0 } else { seed & ((1u64 << slots.min(63)) - 1) };
        let h = EdgeSet::from_code(n, k, code);
        prop_assert_eq!(as_lists(&kay_edges(&h)), naive_kay(n, k, &as_lists(&h)));
    }

    #[test]
    fn images_satisfy_parity_and_reconstruct(k in 2usize..=3, n in 1usize..=7, seed in any::<u64>(), star_pick in any::<usize>()) {
        let slots = kaylab::subsets::binomial(n, k);
        let code = seed & ((1u64 << slots.min(63)) - 1);
        let s = kay_edges(&EdgeSet::from_code(n, k, code));
        prop_assert!(parity_violation(&s).is_none());
        let r = reconstruct_edges(&s, star_pick % n).unwrap();
        prop_assert_eq!(kay_edges(&r), s);
    }
}

#[test]
fn structure_files_round_trip() {
    for s in enumerate_class(Family::Tournaments, 0, 4, 1 << 20).unwrap().iter() {
        let text = io::to_string(s);
        assert_eq!(&io::from_str(&text).unwrap(), s);
        assert_eq!(io::to_string(&io::from_str(&text).unwrap()), text);
    }
}

#[test]
fn pool_counts_match_known_sequences() {
    // Graphs: 1, 1, 2, 4, 11. Tournaments: 1, 1, 1, 2, 4, 12.
    assert_eq!(enumerate_class(Family::Hypergraphs, 2, 4, 1 << 20).unwrap().counts(), [1, 1, 2, 4, 11]);
    assert_eq!(enumerate_class(Family::Tournaments, 0, 5, 1 << 20).unwrap().counts(), [1, 1, 1, 2, 4, 12]);
    // Two-graphs on n vertices: 1, 1, 1, 2, 3, 7, 16.
    assert_eq!(enumerate_class(Family::Kay, 2, 6, 1 << 20).unwrap().counts(), [1, 1, 1, 2, 3, 7, 16]);
}

#[test]
fn certificate_documents_recheck_from_disk() {
    let dir = std::env::temp_dir().join(format!("kaylab-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (c, b, a) = (Structure::chain(5), Structure::chain(3), Structure::chain(2));
    for (name, s) in [("C.struct", &c), ("B.struct", &b), ("A.struct", &a)] {
        io::write(dir.join(name), s).unwrap();
    }
    let p = Pattern { a: a.clone(), colours: 2, degree: 1 };
    let cert = joint_oscillation(&c, &b, std::slice::from_ref(&p), Mode::Copies, SearchOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Fails);
    let mut doc = CertificateDocument::Arrow {
        c: "C.struct".into(),
        b: "B.struct".into(),
        patterns: vec![PatternRef { a: "A.struct".into(), colours: 2, degree: 1 }],
        mode: Mode::Copies,
        certificate: cert,
    };
    let parsed = CertificateDocument::from_json(&doc.to_json()).unwrap();
    assert_eq!(parsed, doc);
    assert_eq!(check_document(&parsed, &dir).unwrap(), CertCheck::Confirmed);
    // A constant colouring leaves a monochromatic triangle.
    if let CertificateDocument::Arrow { certificate, .. } = &mut doc {
        let col = certificate.bad_colouring.as_mut().unwrap();
        col[0].iter_mut().for_each(|c| *c = 0);
    }
    assert!(matches!(check_document(&doc, &dir).unwrap(), CertCheck::Rejected(_)));
    std::fs::remove_dir_all(&dir).unwrap();
}
