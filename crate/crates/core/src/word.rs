//! Free-group words over a named generator alphabet.
//!
//! A [`Word`] is an immutable value. Every public constructor returns the
//! freely reduced form, so downstream code can rely on the reduced invariant.
//! The one exception is [`Word::from_letters_unreduced`], used by the parser
//! while it assembles terms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("words are over incompatible alphabets")]
    AlphabetMismatch,
    #[error("generator index {index} out of range for an alphabet of {len} generators")]
    GeneratorOutOfRange { index: usize, len: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("`{0}` is not a valid generator identifier")]
    InvalidIdentifier(String),
    #[error("cyclic definition: the replacement for `{0}` contains `{0}`")]
    CyclicDefinition(String),
}

/// Returns true for identifiers of the form `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug)]
struct AlphabetInner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

/// Ordered list of distinct generator names. Cheap to clone.
#[derive(Clone)]
pub struct Alphabet {
    inner: Arc<AlphabetInner>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(WordError::InvalidIdentifier(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(WordError::DuplicateGenerator(name.clone()));
            }
        }
        Ok(Alphabet {
            inner: Arc::new(AlphabetInner { names, index }),
        })
    }

    pub fn empty() -> Self {
        Alphabet::new(Vec::<String>::new()).expect("empty alphabet is valid")
    }

    pub fn len(&self) -> usize {
        self.inner.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.inner.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.inner.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<usize, WordError> {
        self.index_of(name)
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))
    }

    /// The alphabet with generator `index` removed; later indices shift down by one.
    pub fn without(&self, index: usize) -> Alphabet {
        let names = self
            .names()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, n)| n.clone());
        Alphabet::new(names).expect("subset of a valid alphabet")
    }

    /// The alphabet extended by one new generator at the end.
    pub fn with(&self, name: &str) -> Result<Alphabet, WordError> {
        Alphabet::new(self.names().iter().cloned().chain(Some(name.to_string())))
    }

    fn same(&self, other: &Alphabet) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.names == other.inner.names
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

/// A generator or its formal inverse.
///
/// The derived ordering compares by generator index first, with the positive
/// letter before the inverse one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverted: bool,
}

impl Letter {
    pub fn pos(generator: usize) -> Self {
        Letter { generator, inverted: false }
    }

    pub fn neg(generator: usize) -> Self {
        Letter { generator, inverted: true }
    }

    pub fn inverse(self) -> Self {
        Letter { generator: self.generator, inverted: !self.inverted }
    }

    pub fn sign(self) -> i64 {
        if self.inverted {
            -1
        } else {
            1
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverted != other.inverted
    }
}

/// Appends `letter` to a reduced buffer, cancelling against its tail.
fn push_reduced(buf: &mut Vec<Letter>, letter: Letter) {
    match buf.last() {
        Some(&last) if last.cancels(letter) => {
            buf.pop();
        }
        _ => buf.push(letter),
    }
}

/// Free reduction of a letter sequence.
pub fn reduce_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Vec<Letter> {
    let mut out = Vec::new();
    for l in letters {
        push_reduced(&mut out, l);
    }
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(alphabet: &Alphabet) -> Self {
        Word { alphabet: alphabet.clone(), letters: Vec::new() }
    }

    /// Builds a word and freely reduces it.
    pub fn new<I>(alphabet: &Alphabet, letters: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let w = Self::from_letters_unreduced(alphabet, letters)?;
        Ok(w.reduce())
    }

    /// Builds a word without reducing it. The result may violate the reduced
    /// invariant until [`Word::reduce`] is called.
    pub fn from_letters_unreduced<I>(alphabet: &Alphabet, letters: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = Letter>,
    {
        let letters: Vec<Letter> = letters.into_iter().collect();
        if let Some(bad) = letters.iter().find(|l| l.generator >= alphabet.len()) {
            return Err(WordError::GeneratorOutOfRange {
                index: bad.generator,
                len: alphabet.len(),
            });
        }
        Ok(Word { alphabet: alphabet.clone(), letters })
    }

    pub fn generator(alphabet: &Alphabet, name: &str) -> Result<Self, WordError> {
        let g = alphabet.lookup(name)?;
        Ok(Word { alphabet: alphabet.clone(), letters: vec![Letter::pos(g)] })
    }

    /// Parses a whitespace-separated list of letters such as `a b^-1 c`.
    /// Only plain letters and `^-1` are accepted; the full grammar lives in
    /// the parser module.
    pub fn from_names(alphabet: &Alphabet, text: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, inverted) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            let generator = alphabet.lookup(name)?;
            letters.push(Letter { generator, inverted });
        }
        Word::new(alphabet, letters)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    pub fn reduce(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            letters: reduce_letters(self.letters.iter().copied()),
        }
    }

    fn check_alphabet(&self, other: &Word) -> Result<(), WordError> {
        if self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(WordError::AlphabetMismatch)
        }
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        self.check_alphabet(other)?;
        let mut letters = reduce_letters(self.letters.iter().copied());
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Ok(Word { alphabet: self.alphabet.clone(), letters })
    }

    pub fn invert(&self) -> Word {
        Word {
            alphabet: self.alphabet.clone(),
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `u v u^-1 v^-1`.
    pub fn commutator(&self, other: &Word) -> Result<Word, WordError> {
        self.check_alphabet(other)?;
        let letters = self
            .letters
            .iter()
            .copied()
            .chain(other.letters.iter().copied())
            .chain(self.letters.iter().rev().map(|l| l.inverse()))
            .chain(other.letters.iter().rev().map(|l| l.inverse()));
        Ok(Word { alphabet: self.alphabet.clone(), letters: reduce_letters(letters) })
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.reduce() };
        let mut letters = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            for &l in &base.letters {
                push_reduced(&mut letters, l);
            }
        }
        Word { alphabet: self.alphabet.clone(), letters }
    }

    /// `c self c^-1`.
    pub fn conjugate_by(&self, conjugator: &Word) -> Result<Word, WordError> {
        conjugator.multiply(self)?.multiply(&conjugator.invert())
    }

    pub fn contains_generator(&self, generator: usize) -> bool {
        self.letters.iter().any(|l| l.generator == generator)
    }

    pub fn occurrences(&self, generator: usize) -> usize {
        self.letters.iter().filter(|l| l.generator == generator).count()
    }

    pub fn exponent_sum(&self, generator: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.generator == generator)
            .map(|l| l.sign())
            .sum()
    }

    /// Replaces every occurrence of `generator` by `replacement` (inverse
    /// occurrences by its inverse) and reduces.
    pub fn substitute(&self, generator: usize, replacement: &Word) -> Result<Word, WordError> {
        self.check_alphabet(replacement)?;
        if generator >= self.alphabet.len() {
            return Err(WordError::GeneratorOutOfRange {
                index: generator,
                len: self.alphabet.len(),
            });
        }
        if replacement.contains_generator(generator) {
            return Err(WordError::CyclicDefinition(self.alphabet.name(generator).to_string()));
        }
        let inverse = replacement.invert();
        let mut letters = Vec::with_capacity(self.len());
        for &l in &self.letters {
            if l.generator == generator {
                let r = if l.inverted { &inverse } else { replacement };
                for &x in &r.letters {
                    push_reduced(&mut letters, x);
                }
            } else {
                push_reduced(&mut letters, l);
            }
        }
        Ok(Word { alphabet: self.alphabet.clone(), letters })
    }

    /// Splits the reduced word as `conjugator · core · conjugator^-1` with a
    /// cyclically reduced `core`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let reduced = reduce_letters(self.letters.iter().copied());
        let mut lo = 0;
        let mut hi = reduced.len();
        while hi - lo >= 2 && reduced[lo].cancels(reduced[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        let core = Word { alphabet: self.alphabet.clone(), letters: reduced[lo..hi].to_vec() };
        let conjugator = Word { alphabet: self.alphabet.clone(), letters: reduced[..lo].to_vec() };
        (core, conjugator)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) if self.letters.len() >= 2 => !f.cancels(l),
            _ => true,
        }
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let n = letters.len();
            letters.rotate_left(k % n);
        }
        Word { alphabet: self.alphabet.clone(), letters }
    }

    /// Rewrites the word into `target`, mapping generator `i` to `map[i]`.
    /// Every generator occurring in the word must have an image.
    pub fn reindex(&self, target: &Alphabet, map: &[Option<usize>]) -> Result<Word, WordError> {
        let mut letters = Vec::with_capacity(self.len());
        for &l in &self.letters {
            let g = map
                .get(l.generator)
                .copied()
                .flatten()
                .ok_or_else(|| WordError::UnknownGenerator(self.alphabet.name(l.generator).to_string()))?;
            if g >= target.len() {
                return Err(WordError::GeneratorOutOfRange { index: g, len: target.len() });
            }
            letters.push(Letter { generator: g, inverted: l.inverted });
        }
        Ok(Word { alphabet: target.clone(), letters: reduce_letters(letters) })
    }

    /// Same letters, reinterpreted over an alphabet with identical names.
    pub fn with_alphabet(&self, alphabet: &Alphabet) -> Result<Word, WordError> {
        if self.alphabet != *alphabet {
            return Err(WordError::AlphabetMismatch);
        }
        Ok(Word { alphabet: alphabet.clone(), letters: self.letters.clone() })
    }
}

impl fmt::Display for Word {
    /// Space separated letters with runs collapsed, e.g. `a^2 b^-1 c`; the
    /// empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(self.alphabet.name(l.generator))?;
            match (l.inverted, run) {
                (false, 1) => {}
                (false, n) => write!(f, "^{n}")?,
                (true, n) => write!(f, "^-{n}")?,
            }
            i += run;
        }
        Ok(())
    }
}

impl std::hash::Hash for Word {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Alphabet {
        Alphabet::new(["a", "b", "c", "d", "e", "f", "g", "h", "k", "p", "q"]).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::from_names(&alpha(), s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(w("a a^-1").is_empty());
        assert_eq!(w("a b b^-1 a"), w("a a"));
        assert_eq!(w("a f").letters().len(), 2);
        let raw = Word::from_letters_unreduced(&alpha(), [Letter::pos(0), Letter::neg(0)]).unwrap();
        assert!(!raw.is_reduced());
        assert!(raw.reduce().is_empty());
    }

    #[test]
    fn multiply_examples() {
        assert!(w("a").multiply(&w("a^-1")).unwrap().is_empty());
        assert_eq!(w("a b").multiply(&w("b^-1 c")).unwrap(), w("a c"));
        assert_eq!(w("c q").multiply(&w("d^-1")).unwrap(), w("c q d^-1"));
    }

    #[test]
    fn multiply_rejects_foreign_alphabet() {
        let other = Alphabet::new(["a", "b"]).unwrap();
        let u = Word::from_names(&other, "a").unwrap();
        assert_eq!(u.multiply(&w("a")), Err(WordError::AlphabetMismatch));
        assert_eq!(u.commutator(&w("a")), Err(WordError::AlphabetMismatch));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("a b").invert(), w("b^-1 a^-1"));
        assert!(w("1").invert().is_empty());
        assert_eq!(w("a q a^-1 d^-1").invert(), w("d a q^-1 a^-1"));
    }

    #[test]
    fn commutator_examples() {
        let u = w("a b^-1 q");
        assert!(u.commutator(&u).unwrap().is_empty());
        assert_eq!(w("a").commutator(&w("q")).unwrap(), w("a q a^-1 q^-1"));
        assert_eq!(w("a").commutator(&w("b")).unwrap().invert(), w("b").commutator(&w("a")).unwrap());
    }

    #[test]
    fn commutator_matches_relator_after_substitution() {
        // a q a^-1 d^-1 with d = c q is [a,q] c^-1
        let d = alpha().lookup("d").unwrap();
        let r = w("a q a^-1 d^-1").substitute(d, &w("c q")).unwrap();
        let expected = w("a").commutator(&w("q")).unwrap().multiply(&w("c^-1")).unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn substitute_examples() {
        let f = alpha().lookup("f").unwrap();
        assert!(w("a f").substitute(f, &w("a^-1")).unwrap().is_empty());
        assert_eq!(w("g").substitute(f, &w("a^-1")).unwrap(), w("g"));
        let d = alpha().lookup("d").unwrap();
        assert_eq!(w("a q a^-1 d^-1").substitute(d, &w("c q")).unwrap(), w("a q a^-1 q^-1 c^-1"));
        assert_eq!(
            w("a f^-1").substitute(f, &w("b c")).unwrap(),
            w("a c^-1 b^-1")
        );
    }

    #[test]
    fn substitute_rejects_cycle() {
        let f = alpha().lookup("f").unwrap();
        assert_eq!(
            w("a f").substitute(f, &w("f a")),
            Err(WordError::CyclicDefinition("f".into()))
        );
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = w("a b a^-1").cyclic_reduce();
        assert_eq!(core, w("b"));
        assert_eq!(conj, w("a"));
        let (core, conj) = w("1").cyclic_reduce();
        assert!(core.is_empty() && conj.is_empty());
        let r = w("c d c^-1 b f g^-1 e g f^-1 e^-1 b^-1 d^-1");
        let (core, conj) = r.cyclic_reduce();
        assert_eq!(core, r);
        assert!(conj.is_empty());
    }

    #[test]
    fn display_collapses_runs() {
        assert_eq!(w("a a a b^-1 b^-1 c").to_string(), "a^3 b^-2 c");
        assert_eq!(w("1").to_string(), "1");
    }

    #[test]
    fn alphabet_validation() {
        assert_eq!(Alphabet::new(["a", "a"]).unwrap_err(), WordError::DuplicateGenerator("a".into()));
        assert_eq!(Alphabet::new(["1a"]).unwrap_err(), WordError::InvalidIdentifier("1a".into()));
        assert!(Alphabet::new(["t1", "x_2", "Y"]).is_ok());
        let a = alpha().without(5);
        assert_eq!(a.index_of("g"), Some(5));
        assert_eq!(a.index_of("f"), None);
    }

    #[test]
    fn pow_and_exponent_sum() {
        assert_eq!(w("a b").pow(-2), w("b^-1 a^-1 b^-1 a^-1"));
        assert!(w("a b").pow(0).is_empty());
        assert_eq!(w("a b a^-1 a^-1").exponent_sum(0), -1);
    }
}
