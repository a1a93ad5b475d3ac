//! The structure file format.
//!
//! A structure file is a JSON document:
//!
//! ```text
//! {
//!   "signature": [
//!     {"name": "R", "arity": 2, "kind": "hyperedge"},
//!     {"name": "<", "arity": 2, "kind": "order"}
//!   ],
//!   "size": 3,
//!   "relations": {
//!     "R": [[0, 1], [1, 2]]
//!   }
//! }
//! ```
//!
//! * `kind` is one of `hyperedge`, `order`, `plain`.
//! * `relations` maps every non-order symbol to its tuple list. Hyperedge
//!   tuples may be given in any order of entries and in any order overall.
//! * Order symbols always denote the natural order `0 < 1 < .. < size-1`;
//!   they may be omitted from `relations` or listed as exactly those pairs.
//!
//! [`to_string`] writes the canonical layout shown above: symbols in
//! signature order, one relation per line, hyperedges as sorted tuples,
//! tuples in lexicographic order, order symbols omitted, trailing newline.
//! Loading and writing again is byte-identical to the canonical text.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::structure::{Signature, Structure, Symbol, SymbolKind, Tuple};

#[derive(Serialize, Deserialize)]
struct RawStructure {
    signature: Vec<Symbol>,
    size: usize,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Tuple>>,
}

pub fn from_str(text: &str) -> Result<Structure> {
    let raw: RawStructure = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let sig = Signature::new(raw.signature)?;
    let mut relations = raw.relations;
    let mut lists = Vec::with_capacity(sig.len());
    for s in sig.symbols() {
        match relations.remove(&s.name) {
            Some(ts) => lists.push(ts),
            None if s.kind == SymbolKind::Order => lists.push(Vec::new()),
            None => return Err(Error::Parse(format!("missing relation for symbol {:?}", s.name))),
        }
    }
    if let Some(extra) = relations.keys().next() {
        return Err(Error::Parse(format!("relation {extra:?} is not in the signature")));
    }
    Structure::new(sig, raw.size, lists)
}

pub fn to_string(s: &Structure) -> String {
    let mut out = String::from("{\n  \"signature\": [\n");
    let syms = s.signature().symbols();
    for (i, sym) in syms.iter().enumerate() {
        let _ = write!(
            out,
            "    {{\"name\": {}, \"arity\": {}, \"kind\": \"{}\"}}",
            json_string(&sym.name),
            sym.arity,
            kind_name(sym.kind)
        );
        out.push_str(if i + 1 < syms.len() { ",\n" } else { "\n" });
    }
    let _ = write!(out, "  ],\n  \"size\": {},\n  \"relations\": {{", s.size());
    let rels: Vec<usize> = s.signature().relational_indices().collect();
    if rels.is_empty() {
        out.push_str("}\n}\n");
        return out;
    }
    out.push('\n');
    for (j, &i) in rels.iter().enumerate() {
        let tuples: Vec<String> = s
            .tuples(i)
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                format!("[{}]", parts.join(", "))
            })
            .collect();
        let _ = write!(out, "    {}: [{}]", json_string(&syms[i].name), tuples.join(", "));
        out.push_str(if j + 1 < rels.len() { ",\n" } else { "\n" });
    }
    out.push_str("  }\n}\n");
    out
}

pub fn read(path: impl AsRef<Path>) -> Result<Structure> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write(path: impl AsRef<Path>, s: &Structure) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_string(s)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn kind_name(k: SymbolKind) -> &'static str {
    match k {
        SymbolKind::Hyperedge => "hyperedge",
        SymbolKind::Order => "order",
        SymbolKind::Plain => "plain",
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialise")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TRIANGLE: &str = r#"{
  "signature": [
    {"name": "R", "arity": 2, "kind": "hyperedge"}
  ],
  "size": 3,
  "relations": {
    "R": [[0, 1]]
  }
}
"#;

    #[test]
    fn canonical_text_round_trips() {
        let s = from_str(TRIANGLE).unwrap();
        assert_eq!(to_string(&s), TRIANGLE);
    }

    #[test]
    fn canonicalises_hyperedges() {
        let messy = r#"{"signature":[{"name":"R","arity":3,"kind":"hyperedge"},{"name":"<","arity":2,"kind":"order"}],
                        "size":4,"relations":{"R":[[3,1,0],[2,1,0],[0,1,2]]}}"#;
        let s = from_str(messy).unwrap();
        let text = to_string(&s);
        assert!(text.contains("\"R\": [[0, 1, 2], [0, 1, 3]]"));
        assert!(!text.contains("\"<\": ["));
        assert_eq!(to_string(&from_str(&text).unwrap()), text);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(from_str("{").is_err());
        let missing = r#"{"signature":[{"name":"R","arity":2,"kind":"plain"}],"size":2,"relations":{}}"#;
        assert!(from_str(missing).is_err());
        let extra = r#"{"signature":[],"size":2,"relations":{"R":[]}}"#;
        assert!(from_str(extra).is_err());
        let repeated = r#"{"signature":[{"name":"R","arity":2,"kind":"hyperedge"}],"size":2,"relations":{"R":[[1,1]]}}"#;
        assert_eq!(from_str(repeated).unwrap_err(), Error::RepeatedEntries(vec![1, 1]));
    }

    #[test]
    fn empty_signature() {
        let s = Structure::empty(Signature::new(vec![]).unwrap(), 2).unwrap();
        let text = to_string(&s);
        assert_eq!(from_str(&text).unwrap(), s);
    }

    proptest! {
        #[test]
        fn write_read_write_is_stable(n in 0usize..6, raw in prop::collection::vec(any::<u16>(), 0..30), ordered in any::<bool>()) {
            let sig = Signature::new(if ordered {
                vec![Symbol::hyperedge("R", 2), Symbol::plain("T", 3), Symbol::order()]
            } else {
                vec![Symbol::hyperedge("R", 2), Symbol::plain("T", 3)]
            }).unwrap();
            let mut rels = vec![Vec::new(), Vec::new()];
            if ordered { rels.push(Vec::new()); }
            if n > 0 {
                for r in raw {
                    let r = r as usize;
                    let (x, y, z) = (r % n, (r / 7) % n, (r / 49) % n);
                    if r % 2 == 0 && x != y { rels[0].push(vec![y, x]); } else { rels[1].push(vec![x, y, z]); }
                }
            }
            let s = Structure::new(sig, n, rels).unwrap();
            let text = to_string(&s);
            let back = from_str(&text).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(to_string(&back), text);
        }
    }
}
