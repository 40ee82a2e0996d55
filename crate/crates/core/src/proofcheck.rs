//! Consequence certificates: each step claims `lhs = rhs` in the presented
//! group and justifies it by writing `lhs · rhs^-1` as an explicit product of
//! conjugates of relators and of earlier steps. Checking is free reduction
//! only; the checker never searches.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::word::{Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    /// 0-based relator index (written `r1`, `r2`, ... in scripts).
    Relator(usize),
    /// A previously stated step.
    Step(String),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Relator(k) => write!(f, "r{}", k + 1),
            Source::Step(s) => f.write_str(s),
        }
    }
}

/// `conjugator · s^±1 · conjugator^-1` where `s` is a relator or the word
/// `u v^-1` of an earlier identity `u = v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub conjugator: Word,
    pub source: Source,
    pub inverted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub name: String,
    pub lhs: Word,
    pub rhs: Word,
    pub factors: Vec<Factor>,
}

impl Step {
    /// `lhs · rhs^-1`, the word the certificate must produce.
    pub fn claim(&self) -> Result<Word, WordError> {
        self.lhs.multiply(&self.rhs.invert())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofScript {
    pub presentation: Option<String>,
    pub steps: Vec<Step>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofError {
    #[error("unknown source `{0}`")]
    UnknownSource(String),
    #[error("relator r{index} out of range ({len} relators)")]
    RelatorOutOfRange { index: usize, len: usize },
    #[error("malformed word: {0}")]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    /// `residual` is the reduced `product^-1 · lhs · rhs^-1`; empty iff accepted.
    Rejected { residual: Word },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

/// Identities already stated, keyed by step name, stored as `lhs · rhs^-1`.
pub type Established = HashMap<String, Word>;

/// The free-group product of the certificate factors of `step`.
pub fn certificate_product(p: &Presentation, established: &Established, step: &Step) -> Result<Word, ProofError> {
    let mut product = Word::identity(p.alphabet());
    for f in &step.factors {
        let base = match &f.source {
            Source::Relator(k) => p
                .relators()
                .get(*k)
                .cloned()
                .ok_or(ProofError::RelatorOutOfRange { index: k + 1, len: p.relator_count() })?,
            Source::Step(name) => established
                .get(name)
                .cloned()
                .ok_or_else(|| ProofError::UnknownSource(name.clone()))?,
        };
        let base = if f.inverted { base.invert() } else { base };
        product = product.multiply(&base.conjugate_by(&f.conjugator)?)?;
    }
    Ok(product)
}

pub fn check_step(p: &Presentation, established: &Established, step: &Step) -> Result<Verdict, ProofError> {
    let claim = step.claim()?;
    let product = certificate_product(p, established, step)?;
    let residual = product.invert().multiply(&claim)?;
    if residual.is_empty() {
        Ok(Verdict::Accepted)
    } else {
        Ok(Verdict::Rejected { residual })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub name: String,
    pub outcome: Result<Verdict, ProofError>,
}

impl StepReport {
    pub fn accepted(&self) -> bool {
        matches!(self.outcome, Ok(Verdict::Accepted))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptReport {
    pub steps: Vec<StepReport>,
    /// Generators shown equal to 1 by some accepted step, in alphabet order.
    pub trivial_generators: Vec<String>,
    generator_count: usize,
}

impl ScriptReport {
    pub fn accepted(&self) -> bool {
        self.steps.iter().all(StepReport::accepted)
    }

    pub fn first_rejection(&self) -> Option<&StepReport> {
        self.steps.iter().find(|s| !s.accepted())
    }

    pub fn rejected_steps(&self) -> Vec<&str> {
        self.steps.iter().filter(|s| !s.accepted()).map(|s| s.name.as_str()).collect()
    }

    /// Every step accepted and every generator shown trivial.
    pub fn proves_trivial(&self) -> bool {
        self.accepted() && self.generator_count > 0 && self.trivial_generators.len() == self.generator_count
    }

    pub fn summary(&self) -> String {
        if !self.accepted() {
            let first = self.first_rejection().expect("some step rejected");
            let why = match &first.outcome {
                Ok(Verdict::Rejected { residual }) => format!("residual {residual}"),
                Err(e) => e.to_string(),
                Ok(Verdict::Accepted) => unreachable!(),
            };
            format!("rejected at step {}: {why}", first.name)
        } else if self.proves_trivial() {
            "all steps accepted; presentation proved trivial by certificate".to_string()
        } else {
            "all steps accepted".to_string()
        }
    }
}

/// Checks every step in order. Each step is judged on its own certificate;
/// its claim is recorded whether or not it is accepted, so one bad step does
/// not cascade into its dependents.
pub fn check_script(p: &Presentation, script: &ProofScript) -> ScriptReport {
    let mut established = Established::new();
    let mut steps = Vec::with_capacity(script.steps.len());
    let mut trivial = vec![false; p.generator_count()];
    for step in &script.steps {
        let outcome = check_step(p, &established, step);
        if let Ok(claim) = step.claim() {
            if matches!(outcome, Ok(Verdict::Accepted)) && claim.len() == 1 {
                trivial[claim.letters()[0].generator] = true;
            }
            established.insert(step.name.clone(), claim);
        }
        steps.push(StepReport { name: step.name.clone(), outcome });
    }
    let trivial_generators = trivial
        .iter()
        .enumerate()
        .filter(|(_, &t)| t)
        .map(|(g, _)| p.alphabet().name(g).to_string())
        .collect();
    ScriptReport { steps, trivial_generators, generator_count: p.generator_count() }
}
