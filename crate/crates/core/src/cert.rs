//! Certificate documents: verdict data plus references to structure files,
//! resolved relative to the document's directory.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::ramsey::{ArrowCertificate, Mode, Pattern};
use crate::verify::{check_arrow_certificate, check_expansion_colouring, CertCheck};

/// Colourings up to this count are re-enumerated when a holds verdict is
/// checked.
pub const HOLDS_CHECK_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRef {
    #[serde(rename = "A")]
    pub a: String,
    pub colours: usize,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateDocument {
    Arrow {
        #[serde(rename = "C")]
        c: String,
        #[serde(rename = "B")]
        b: String,
        patterns: Vec<PatternRef>,
        mode: Mode,
        certificate: ArrowCertificate,
    },
    /// A colouring of the `k`-sets of an ordered Kay-graph `C` with no
    /// monochromatic copy of `B*`.
    ExpansionColouring {
        k: usize,
        #[serde(rename = "C")]
        c: String,
        colouring: String,
    },
}

impl CertificateDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {e}")))
    }

    /// Structure files referenced by the document.
    pub fn references(&self) -> Vec<&str> {
        match self {
            CertificateDocument::Arrow { c, b, patterns, .. } => {
                let mut v = vec![c.as_str(), b.as_str()];
                v.extend(patterns.iter().map(|p| p.a.as_str()));
                v
            }
            CertificateDocument::ExpansionColouring { c, colouring, .. } => vec![c.as_str(), colouring.as_str()],
        }
    }
}

/// Re-checks a document with the independent validators.
pub fn check_document(doc: &CertificateDocument, dir: &Path) -> Result<CertCheck> {
    match doc {
        CertificateDocument::Arrow { c, b, patterns, mode, certificate } => {
            let c = io::read(dir.join(c))?;
            let b = io::read(dir.join(b))?;
            let patterns = patterns
                .iter()
                .map(|p| {
                    Ok(Pattern {
                        a: io::read(dir.join(&p.a))?,
                        colours: p.colours,
                        degree: p.degree,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(check_arrow_certificate(&c, &b, &patterns, *mode, certificate, HOLDS_CHECK_LIMIT))
        }
        CertificateDocument::ExpansionColouring { k, c, colouring } => {
            let c = io::read(dir.join(c))?;
            let col = io::read(dir.join(colouring))?;
            let edges = |s: &crate::structure::Structure, arity: usize| -> Result<Vec<u64>> {
                let i = s
                    .signature()
                    .single_hyperedge()
                    .ok_or_else(|| Error::Structure("expected a single hyperedge relation".into()))?;
                if s.signature().symbol(i).arity != arity {
                    return Err(Error::Structure(format!("expected arity {arity}")));
                }
                Ok(s.scan_hyperedges(i))
            };
            if col.size() != c.size() {
                return Ok(CertCheck::Rejected("colouring and C have different sizes".into()));
            }
            Ok(match check_expansion_colouring(*k, c.size(), &edges(&c, k + 1)?, &edges(&col, *k)?)? {
                Ok(()) => CertCheck::Confirmed,
                Err(why) => CertCheck::Rejected(why),
            })
        }
    }
}
