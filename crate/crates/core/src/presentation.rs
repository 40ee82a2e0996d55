//! Finite presentations and Tietze transformations.

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

use crate::word::{Alphabet, Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("relator {index} (`{relator}`) does not define `{generator}`: it must contain the generator exactly once")]
    NotEliminable { generator: String, index: usize, relator: String },
    #[error("no relator defines `{0}` in eliminable form")]
    NoDefinition(String),
    #[error("no relator defines `{generator}` as `{value}`")]
    NoMatchingDefinition { generator: String, value: String },
    #[error("relator index {index} out of range ({len} relators)")]
    RelatorOutOfRange { index: usize, len: usize },
    #[error("relator {0} is not trivial")]
    NotTrivial(usize),
    #[error("relator {index} does not duplicate an earlier relator")]
    NotDuplicate { index: usize },
    #[error("certificate does not produce the added relator `{0}`")]
    BadCertificate(String),
    #[error("alphabets differ in size ({left} vs {right})")]
    AlphabetSizeMismatch { left: usize, right: usize },
    #[error("renaming is not a bijection")]
    BadRenaming,
}

/// A generator list plus a list of relators over it.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    /// Relators are reduced on the way in. Empty relators are kept; use
    /// [`Presentation::normalized`] to drop them.
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self, PresentationError> {
        let relators = relators
            .into_iter()
            .map(|r| r.with_alphabet(&alphabet).map(|r| r.reduce()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation { alphabet, relators })
    }

    pub fn from_names<S: AsRef<str>>(generators: &[S], relators: &[S]) -> Result<Self, PresentationError> {
        let alphabet = Alphabet::new(generators.iter().map(|s| s.as_ref().to_string()))?;
        let relators = relators
            .iter()
            .map(|r| Word::from_names(&alphabet, r.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::new(alphabet, relators)
    }

    pub fn trivial() -> Self {
        Presentation { alphabet: Alphabet::empty(), relators: Vec::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    /// Drops empty relators.
    pub fn normalized(&self) -> Presentation {
        Presentation {
            alphabet: self.alphabet.clone(),
            relators: self.relators.iter().filter(|r| !r.is_empty()).cloned().collect(),
        }
    }

    pub fn with_relators(&self, extra: &[Word]) -> Result<Presentation, PresentationError> {
        let mut relators = self.relators.clone();
        relators.extend(extra.iter().cloned());
        Presentation::new(self.alphabet.clone(), relators)
    }

    fn check_index(&self, index: usize) -> Result<(), PresentationError> {
        if index < self.relators.len() {
            Ok(())
        } else {
            Err(PresentationError::RelatorOutOfRange { index, len: self.relators.len() })
        }
    }
}

impl std::fmt::Debug for Presentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Presentation")
            .field("generators", &self.alphabet)
            .field("relators", &self.relators)
            .finish()
    }
}

/// If `relator` contains `generator` exactly once, returns the word `v` with
/// `generator = v` in the presented group.
pub fn definition_in(relator: &Word, generator: usize) -> Option<Word> {
    if relator.occurrences(generator) != 1 {
        return None;
    }
    let pos = relator.letters().iter().position(|l| l.generator == generator)?;
    // rotate so the generator comes first: g^e · w
    let rotated = relator.rotate(pos);
    let rest = Word::new(relator.alphabet(), rotated.letters()[1..].iter().copied()).ok()?;
    if rotated.letters()[0].inverted {
        // g^-1 w = 1  =>  g = w
        Some(rest)
    } else {
        // g w = 1  =>  g = w^-1
        Some(rest.invert())
    }
}

fn cmp_letters(a: &[Letter], b: &[Letter]) -> Ordering {
    a.cmp(b)
}

/// All relators defining `generator`, as `(relator index, value)`, ordered by
/// relator length, then relator letters, then index.
pub fn definitions(p: &Presentation, generator: usize) -> Vec<(usize, Word)> {
    let mut found: Vec<(usize, Word)> = p
        .relators
        .iter()
        .enumerate()
        .filter_map(|(i, r)| definition_in(r, generator).map(|v| (i, v)))
        .collect();
    found.sort_by(|(i, _), (j, _)| {
        let (ri, rj) = (&p.relators[*i], &p.relators[*j]);
        ri.len()
            .cmp(&rj.len())
            .then_with(|| cmp_letters(ri.letters(), rj.letters()))
            .then_with(|| i.cmp(j))
    });
    found
}

/// A single Tietze transformation, recorded with enough data to replay it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TietzeMove {
    /// Remove `generator` using relator `relator`, which reads `generator = value`.
    Eliminate { generator: String, relator: usize, value: Word },
    RemoveDuplicateRelator { relator: usize },
    RemoveTrivialRelator { relator: usize },
    /// Append `relator`, certified as a product of conjugates of existing relators.
    AddRelator { relator: Word, certificate: Vec<RelatorFactor> },
    /// Append a new generator together with the relator `name · definition^-1`.
    AddGenerator { name: String, definition: Word },
}

/// `conjugator · r^±1 · conjugator^-1` for an existing relator `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorFactor {
    pub conjugator: Word,
    pub relator: usize,
    pub inverted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TietzeLog {
    pub moves: Vec<TietzeMove>,
}

impl TietzeLog {
    pub fn new() -> Self {
        TietzeLog::default()
    }

    pub fn push(&mut self, m: TietzeMove) {
        self.moves.push(m);
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn replay(&self, source: &Presentation) -> Result<Presentation, PresentationError> {
        self.moves.iter().try_fold(source.clone(), |p, m| apply_move(&p, m))
    }

    /// One line per move, words in the alphabet current at that move.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for m in &self.moves {
            let line = match m {
                TietzeMove::Eliminate { generator, relator, value } => {
                    format!("eliminate {generator} = {value} via r{}", relator + 1)
                }
                TietzeMove::RemoveDuplicateRelator { relator } => format!("remove-duplicate r{}", relator + 1),
                TietzeMove::RemoveTrivialRelator { relator } => format!("remove-trivial r{}", relator + 1),
                TietzeMove::AddRelator { relator, certificate } => {
                    let factors: Vec<String> = certificate
                        .iter()
                        .map(|f| {
                            format!(
                                "conj({}, r{}){}",
                                f.conjugator,
                                f.relator + 1,
                                if f.inverted { "^-1" } else { "" }
                            )
                        })
                        .collect();
                    format!("add-relator {relator} via {}", factors.join(", "))
                }
                TietzeMove::AddGenerator { name, definition } => format!("add-generator {name} = {definition}"),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Applies one recorded move.
pub fn apply_move(p: &Presentation, m: &TietzeMove) -> Result<Presentation, PresentationError> {
    match m {
        TietzeMove::Eliminate { generator, relator, value } => {
            let g = p.alphabet.lookup(generator)?;
            let (q, recorded) = eliminate_generator(p, g, *relator)?;
            match recorded {
                TietzeMove::Eliminate { value: v, .. } if &v == value => Ok(q),
                _ => Err(PresentationError::NoMatchingDefinition {
                    generator: generator.clone(),
                    value: value.to_string(),
                }),
            }
        }
        TietzeMove::RemoveDuplicateRelator { relator } => {
            p.check_index(*relator)?;
            let nf = relator_normal_form(&p.relators[*relator]);
            if !p.relators[..*relator].iter().any(|r| relator_normal_form(r) == nf) {
                return Err(PresentationError::NotDuplicate { index: *relator });
            }
            Ok(remove_relator(p, *relator))
        }
        TietzeMove::RemoveTrivialRelator { relator } => {
            p.check_index(*relator)?;
            if !p.relators[*relator].is_empty() {
                return Err(PresentationError::NotTrivial(*relator));
            }
            Ok(remove_relator(p, *relator))
        }
        TietzeMove::AddRelator { relator, certificate } => add_relator(p, relator, certificate),
        TietzeMove::AddGenerator { name, definition } => add_generator(p, name, definition),
    }
}

fn remove_relator(p: &Presentation, index: usize) -> Presentation {
    let mut relators = p.relators.clone();
    relators.remove(index);
    Presentation { alphabet: p.alphabet.clone(), relators }
}

/// Appends `relator` after checking that it equals the given product of
/// conjugates of existing relators.
pub fn add_relator(
    p: &Presentation,
    relator: &Word,
    certificate: &[RelatorFactor],
) -> Result<Presentation, PresentationError> {
    let mut product = Word::identity(&p.alphabet);
    for f in certificate {
        p.check_index(f.relator)?;
        let r = &p.relators[f.relator];
        let r = if f.inverted { r.invert() } else { r.clone() };
        product = product.multiply(&r.conjugate_by(&f.conjugator)?)?;
    }
    if product != relator.reduce() {
        return Err(PresentationError::BadCertificate(relator.to_string()));
    }
    p.with_relators(std::slice::from_ref(relator))
}

/// Adds a fresh generator `name` and the relator `name · definition^-1`.
pub fn add_generator(p: &Presentation, name: &str, definition: &Word) -> Result<Presentation, PresentationError> {
    let alphabet = p.alphabet.with(name)?;
    let identity_map: Vec<Option<usize>> = (0..p.alphabet.len()).map(Some).collect();
    let mut relators = p
        .relators
        .iter()
        .map(|r| r.reindex(&alphabet, &identity_map))
        .collect::<Result<Vec<_>, _>>()?;
    let def = definition.with_alphabet(&p.alphabet)?.reindex(&alphabet, &identity_map)?;
    let t = Word::generator(&alphabet, name)?;
    relators.push(t.multiply(&def.invert())?);
    Ok(Presentation { alphabet, relators })
}

/// Removes `generator` using relator `relator_index`, substituting its value
/// into every other relator. Relators that become empty are kept.
pub fn eliminate_generator(
    p: &Presentation,
    generator: usize,
    relator_index: usize,
) -> Result<(Presentation, TietzeMove), PresentationError> {
    p.check_index(relator_index)?;
    if generator >= p.alphabet.len() {
        return Err(WordError::GeneratorOutOfRange { index: generator, len: p.alphabet.len() }.into());
    }
    let name = p.alphabet.name(generator).to_string();
    let defining = &p.relators[relator_index];
    let value = definition_in(defining, generator).ok_or_else(|| PresentationError::NotEliminable {
        generator: name.clone(),
        index: relator_index + 1,
        relator: defining.to_string(),
    })?;

    let alphabet = p.alphabet.without(generator);
    let map: Vec<Option<usize>> = (0..p.alphabet.len())
        .map(|i| match i.cmp(&generator) {
            Ordering::Less => Some(i),
            Ordering::Equal => None,
            Ordering::Greater => Some(i - 1),
        })
        .collect();
    let mut relators = Vec::with_capacity(p.relators.len() - 1);
    for (i, r) in p.relators.iter().enumerate() {
        if i == relator_index {
            continue;
        }
        relators.push(r.substitute(generator, &value)?.reindex(&alphabet, &map)?);
    }
    let m = TietzeMove::Eliminate { generator: name, relator: relator_index, value };
    Ok((Presentation { alphabet, relators }, m))
}

/// Eliminates `generator` using its preferred defining relator: shortest,
/// then lexicographically least.
pub fn eliminate_by_name(p: &Presentation, generator: &str) -> Result<(Presentation, TietzeMove), PresentationError> {
    let g = p.alphabet.lookup(generator)?;
    let (index, _) = definitions(p, g)
        .into_iter()
        .next()
        .ok_or_else(|| PresentationError::NoDefinition(generator.to_string()))?;
    eliminate_generator(p, g, index)
}

/// Eliminates `generator` using a relator stating `generator = value`.
pub fn eliminate_with_value(
    p: &Presentation,
    generator: &str,
    value: &Word,
) -> Result<(Presentation, TietzeMove), PresentationError> {
    let g = p.alphabet.lookup(generator)?;
    let value = value.with_alphabet(&p.alphabet)?.reduce();
    let (index, _) = definitions(p, g)
        .into_iter()
        .find(|(_, v)| *v == value)
        .ok_or_else(|| PresentationError::NoMatchingDefinition {
            generator: generator.to_string(),
            value: value.to_string(),
        })?;
    eliminate_generator(p, g, index)
}

/// Least cyclic rotation of the cyclically reduced core of `w` or of its
/// inverse. Two relators have the same normal form iff they agree up to
/// conjugation and inversion.
pub fn relator_normal_form(w: &Word) -> Word {
    let (core, _) = w.cyclic_reduce();
    if core.is_empty() {
        return core;
    }
    let inv = core.invert();
    let n = core.len();
    let mut best: Option<Vec<Letter>> = None;
    for base in [&core, &inv] {
        let letters = base.letters();
        for k in 0..n {
            let rot: Vec<Letter> = letters[k..].iter().chain(&letters[..k]).copied().collect();
            if best.as_ref().map_or(true, |b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    Word::new(w.alphabet(), best.unwrap_or_default()).expect("letters come from the same alphabet")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplifyLimits {
    /// Maximum number of eliminations.
    pub max_steps: usize,
    /// An elimination is skipped if it would push the total relator length above this.
    pub max_total_length: usize,
}

impl Default for SimplifyLimits {
    fn default() -> Self {
        SimplifyLimits { max_steps: 1000, max_total_length: 100_000 }
    }
}

fn cleanup(p: &mut Presentation, log: &mut TietzeLog) {
    loop {
        if let Some(i) = p.relators.iter().position(Word::is_empty) {
            let m = TietzeMove::RemoveTrivialRelator { relator: i };
            *p = remove_relator(p, i);
            log.push(m);
            continue;
        }
        let mut seen = HashMap::new();
        let mut dup = None;
        for (i, r) in p.relators.iter().enumerate() {
            if seen.insert(relator_normal_form(r), i).is_some() {
                dup = Some(i);
                break;
            }
        }
        match dup {
            Some(i) => {
                *p = remove_relator(p, i);
                log.push(TietzeMove::RemoveDuplicateRelator { relator: i });
            }
            None => break,
        }
    }
}

/// Greedy simplification: drop trivial and duplicate relators, then
/// eliminate the generator with the shortest defining relator (ties by
/// generator order), until nothing changes or a limit is reached.
pub fn auto_simplify(p: &Presentation, limits: SimplifyLimits) -> (Presentation, TietzeLog) {
    let mut current = p.clone();
    let mut log = TietzeLog::new();
    cleanup(&mut current, &mut log);
    let mut steps = 0;
    while steps < limits.max_steps {
        let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
        for g in 0..current.alphabet.len() {
            if let Some((idx, _)) = definitions(&current, g).into_iter().next() {
                candidates.push((current.relators[idx].len(), g, idx));
            }
        }
        candidates.sort();
        let mut progressed = false;
        for (_, g, idx) in candidates {
            let (next, m) = eliminate_generator(&current, g, idx).expect("definition was found above");
            if next.total_length() > limits.max_total_length {
                continue;
            }
            current = next;
            log.push(m);
            cleanup(&mut current, &mut log);
            progressed = true;
            break;
        }
        if !progressed {
            break;
        }
        steps += 1;
    }
    (current, log)
}

/// Per-relator comparison of two presentations under relator normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorDiff {
    pub matched: usize,
    /// Normal forms present in the left presentation only (with multiplicity).
    pub only_left: Vec<Word>,
    /// Normal forms present in the right presentation only, over the right alphabet.
    pub only_right: Vec<Word>,
}

impl RelatorDiff {
    pub fn is_empty(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty()
    }
}

/// Compares relator multisets. `renaming[i]` is the right-hand generator
/// matching left generator `i`; without it generators are matched by name.
pub fn relator_diff(
    left: &Presentation,
    right: &Presentation,
    renaming: Option<&[usize]>,
) -> Result<RelatorDiff, PresentationError> {
    let (l, r) = (left.alphabet.len(), right.alphabet.len());
    if l != r {
        return Err(PresentationError::AlphabetSizeMismatch { left: l, right: r });
    }
    let map: Vec<usize> = match renaming {
        Some(m) => {
            let mut seen = vec![false; r];
            if m.len() != l || m.iter().any(|&j| j >= r || std::mem::replace(&mut seen[j], true)) {
                return Err(PresentationError::BadRenaming);
            }
            m.to_vec()
        }
        None => left
            .alphabet
            .names()
            .iter()
            .map(|n| right.alphabet.lookup(n))
            .collect::<Result<_, _>>()?,
    };
    let map: Vec<Option<usize>> = map.into_iter().map(Some).collect();

    let mut pool: HashMap<Word, usize> = HashMap::new();
    let right_nf: Vec<Word> = right.relators.iter().filter(|w| !w.is_empty()).map(relator_normal_form).collect();
    for w in &right_nf {
        *pool.entry(w.clone()).or_default() += 1;
    }
    let mut matched = 0;
    let mut only_left = Vec::new();
    for w in left.relators.iter().filter(|w| !w.is_empty()) {
        let nf = relator_normal_form(&w.reindex(&right.alphabet, &map)?);
        match pool.get_mut(&nf) {
            Some(n) if *n > 0 => {
                *n -= 1;
                matched += 1;
            }
            _ => only_left.push(relator_normal_form(w)),
        }
    }
    let mut only_right = Vec::new();
    for w in right_nf {
        if let Some(n) = pool.get_mut(&w) {
            if *n > 0 {
                *n -= 1;
                only_right.push(w);
            }
        }
    }
    Ok(RelatorDiff { matched, only_left, only_right })
}

pub fn presentations_match(
    left: &Presentation,
    right: &Presentation,
    renaming: Option<&[usize]>,
) -> Result<bool, PresentationError> {
    Ok(relator_diff(left, right, renaming)?.is_empty())
}
