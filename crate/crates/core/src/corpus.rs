//! The bundled presentations, proof script and comparison data.
//!
//! Every file is compiled into the library, so loading never touches the
//! filesystem. The manifest is a plain-text index with one
//! `path | kind | description | locus` line per file.

use thiserror::Error;

use crate::parser::{parse_presentation, parse_proof, parse_relation, ParseError};
use crate::presentation::{eliminate_with_value, Presentation, PresentationError, TietzeLog};
use crate::proofcheck::ProofScript;
use crate::quotient::{PermGroup, QuotientError};
use crate::word::{Alphabet, Word};

pub const MANIFEST: &str = include_str!("../corpus/MANIFEST");
pub const VARIANTS: &str = include_str!("../corpus/variants.txt");
pub const QUOTIENTS: &str = include_str!("../corpus/quotients.txt");

const FILES: [(&str, &str); 5] = [
    ("e0_raw.grp", include_str!("../corpus/e0_raw.grp")),
    ("e0_displayed.grp", include_str!("../corpus/e0_displayed.grp")),
    ("m_raw.grp", include_str!("../corpus/m_raw.grp")),
    ("m_displayed.grp", include_str!("../corpus/m_displayed.grp")),
    ("m_triviality.proof", include_str!("../corpus/m_triviality.proof")),
];

/// Short-word definitions used to pass from `e0_raw` to six generators, in order.
pub const E0_DEFINITIONS: [(&str, &str); 5] = [("f", "a^-1"), ("b", "a"), ("p", "d^-1"), ("d", "c q"), ("k", "h")];

/// Definitions removing the two extra generators of `m_raw`, in order. They
/// are applied after [`E0_DEFINITIONS`].
pub const M_DEFINITIONS: [(&str, &str); 2] = [("y", "q"), ("x", "e^-1 q")];

/// Text of a bundled file by its manifest path.
pub fn source(path: &str) -> Option<&'static str> {
    FILES.iter().find(|(p, _)| *p == path).map(|(_, t)| *t)
}

pub fn file_names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(p, _)| *p)
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}: {message}")]
    Parse { file: String, message: String },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("{file} is listed in the manifest but not bundled")]
    Missing { file: String },
    #[error("elimination failed: {0}")]
    Elimination(#[from] PresentationError),
    #[error("quotient target: {0}")]
    Quotient(#[from] QuotientError),
}

fn parse_error(file: &str, text: &str, e: ParseError) -> CorpusError {
    CorpusError::Parse { file: file.to_string(), message: e.render(text) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Presentation,
    Proof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub kind: FileKind,
    pub description: String,
    pub locus: String,
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| CorpusError::Manifest { line: i + 1, message: message.to_string() };
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let [path, kind, description, locus] = fields[..] else {
            return Err(err("expected four `|`-separated fields"));
        };
        let kind = match kind {
            "presentation" => FileKind::Presentation,
            "proof" => FileKind::Proof,
            _ => return Err(err("kind must be `presentation` or `proof`")),
        };
        if description.is_empty() || locus.is_empty() {
            return Err(err("description and locus must be nonempty"));
        }
        out.push(ManifestEntry { path: path.into(), kind, description: description.into(), locus: locus.into() });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    E0,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Mechanical,
    Displayed,
}

/// A relator known to differ between the mechanically eliminated and the
/// displayed presentation by a recorded convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub target: Target,
    pub side: Side,
    pub relator: Word,
}

pub fn parse_variants(text: &str, alphabet: &Alphabet) -> Result<Vec<Variant>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| CorpusError::Manifest { line: i + 1, message };
        let Some((t, rest)) = line.split_once(char::is_whitespace) else {
            return Err(err("expected TARGET SIDE RELATION".into()));
        };
        let Some((s, rest)) = rest.trim_start().split_once(char::is_whitespace) else {
            return Err(err("expected TARGET SIDE RELATION".into()));
        };
        let target = match t {
            "e0" => Target::E0,
            "m" => Target::M,
            _ => return Err(err(format!("unknown target `{t}`"))),
        };
        let side = match s {
            "mechanical" => Side::Mechanical,
            "displayed" => Side::Displayed,
            _ => return Err(err(format!("unknown side `{s}`"))),
        };
        let relator = parse_relation(rest.trim(), alphabet).map_err(|e| err(e.render(rest.trim())))?;
        out.push(Variant { target, side, relator });
    }
    Ok(out)
}

pub fn parse_quotients(text: &str) -> Result<Vec<PermGroup>, CorpusError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| PermGroup::from_line(l).map_err(CorpusError::from))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub manifest: Vec<ManifestEntry>,
    pub e0_raw: Presentation,
    pub e0_displayed: Presentation,
    pub m_raw: Presentation,
    pub m_displayed: Presentation,
    pub m_triviality: ProofScript,
    pub variants: Vec<Variant>,
    pub quotient_targets: Vec<PermGroup>,
}

impl Corpus {
    pub fn presentation(&self, path: &str) -> Option<&Presentation> {
        match path {
            "e0_raw.grp" => Some(&self.e0_raw),
            "e0_displayed.grp" => Some(&self.e0_displayed),
            "m_raw.grp" => Some(&self.m_raw),
            "m_displayed.grp" => Some(&self.m_displayed),
            _ => None,
        }
    }

    pub fn variants_for(&self, target: Target, side: Side) -> Vec<&Word> {
        self.variants.iter().filter(|v| v.target == target && v.side == side).map(|v| &v.relator).collect()
    }

    /// `e0_raw` with f, b, p, d, k eliminated by their short-word definitions.
    pub fn e0_mechanical(&self) -> Result<(Presentation, TietzeLog), CorpusError> {
        eliminate_chain(&self.e0_raw, &E0_DEFINITIONS)
    }

    /// `m_raw` with f, b, p, d, k and then y, x eliminated.
    pub fn m_mechanical(&self) -> Result<(Presentation, TietzeLog), CorpusError> {
        let defs: Vec<(&str, &str)> = E0_DEFINITIONS.iter().chain(&M_DEFINITIONS).copied().collect();
        eliminate_chain(&self.m_raw, &defs)
    }
}

/// Eliminates each `(generator, value)` in turn using a relator that states
/// exactly that definition.
pub fn eliminate_chain(p: &Presentation, definitions: &[(&str, &str)]) -> Result<(Presentation, TietzeLog), CorpusError> {
    let mut current = p.clone();
    let mut log = TietzeLog::new();
    for (g, value) in definitions {
        let w = parse_relation(value, current.alphabet()).map_err(|e| parse_error(g, value, e))?;
        let (next, m) = eliminate_with_value(&current, g, &w)?;
        log.push(m);
        current = next;
    }
    Ok((current, log))
}

pub fn load_corpus() -> Result<Corpus, CorpusError> {
    let manifest = parse_manifest(MANIFEST)?;
    for entry in &manifest {
        if source(&entry.path).is_none() {
            return Err(CorpusError::Missing { file: entry.path.clone() });
        }
    }
    let load = |path: &str| {
        let text = source(path).ok_or_else(|| CorpusError::Missing { file: path.to_string() })?;
        parse_presentation(text).map_err(|e| parse_error(path, text, e))
    };
    let e0_raw = load("e0_raw.grp")?;
    let e0_displayed = load("e0_displayed.grp")?;
    let m_raw = load("m_raw.grp")?;
    let m_displayed = load("m_displayed.grp")?;
    let proof_text = source("m_triviality.proof").expect("bundled");
    let m_triviality =
        parse_proof(proof_text, m_displayed.alphabet()).map_err(|e| parse_error("m_triviality.proof", proof_text, e))?;
    let variants = parse_variants(VARIANTS, e0_displayed.alphabet())?;
    let quotient_targets = parse_quotients(QUOTIENTS)?;
    Ok(Corpus { manifest, e0_raw, e0_displayed, m_raw, m_displayed, m_triviality, variants, quotient_targets })
}
