//! Text formats for presentations (`.grp`), words and proof scripts (`.proof`).
//!
//! Presentation grammar, whitespace-insensitive, `#` starts a comment that
//! runs to the end of the line:
//!
//! ```text
//! presentation := '<' genlist '|' rellist '>'
//! genlist      := [ ident { ',' ident } ]
//! rellist      := [ relation { ',' relation } ]
//! relation     := word [ '=' word ]
//! word         := '1' | term { term }
//! term         := atom [ '^' [ '-' ] digits ]
//! atom         := ident | '[' word ',' word ']' | '(' word ')'
//! ident        := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! `[u,v]` expands to `u v u^-1 v^-1` and a relation `u = v` is stored as the
//! relator `u v^-1`.
//!
//! Proof scripts reuse the word grammar:
//!
//! ```text
//! script   := { 'presentation' string | step }
//! step     := 'step' name ':' word '=' word [ 'via' factor { ',' factor } ]
//! factor   := 'conj' '(' word ',' source ')' [ '^' '-' '1' ]
//! source   := 'r' digits | name
//! ```
//!
//! Relator sources `rK` count from 1 in file order. Inside a step the
//! identifiers `via` and `step` end a word.

use std::fmt;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::proofcheck::{Factor, ProofScript, Source, Step};
use crate::word::{reduce_letters, Alphabet, Letter, Word, WordError};

/// Upper bound on the number of letters an expanded word may have.
pub const MAX_WORD_LETTERS: usize = 1 << 22;

/// Byte range `start..end` into the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        SourceSpan { start, end }
    }

    /// 1-based line and column of `start`.
    pub fn line_col(&self, text: &str) -> (usize, usize) {
        let upto = &text[..self.start.min(text.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rfind('\n').map_or(upto.chars().count(), |i| upto[i + 1..].chars().count()) + 1;
        (line, col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unterminated string")]
    UnterminatedString,
    #[error("expected {expected}, found {found}")]
    Expected { expected: String, found: String },
    #[error("exponent too large")]
    ExponentTooLarge,
    #[error("expanded word exceeds {MAX_WORD_LETTERS} letters")]
    WordTooLong,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("duplicate step name `{0}`")]
    DuplicateStep(String),
    #[error("step name `{0}` is reserved for relator references")]
    ReservedStepName(String),
    #[error("relator index must be at least 1")]
    ZeroRelatorIndex,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{kind} at bytes {}..{}", span.start, span.end)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

impl ParseError {
    /// `line:col: message` for diagnostics.
    pub fn render(&self, text: &str) -> String {
        let (line, col) = self.span.line_col(text);
        format!("{line}:{col}: {}", self.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), SourceSpan::new(start, i)));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Number(text[start..i].to_string()), SourceSpan::new(start, i)));
        } else if c == b'"' {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i] != b'"' && bytes[i] != b'\n' {
                i += 1;
            }
            if i >= bytes.len() || bytes[i] != b'"' {
                return Err(ParseError {
                    kind: ParseErrorKind::UnterminatedString,
                    span: SourceSpan::new(start, i),
                });
            }
            out.push((Tok::Str(text[start + 1..i].to_string()), SourceSpan::new(start, i + 1)));
            i += 1;
        } else if b"<>|,=[]()^-:".contains(&c) {
            out.push((Tok::Punct(c as char), SourceSpan::new(i, i + 1)));
            i += 1;
        } else {
            let ch = text[i..].chars().next().expect("in bounds");
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedChar(ch),
                span: SourceSpan::new(i, i + ch.len_utf8()),
            });
        }
    }
    out.push((Tok::Eof, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    alphabet: Option<&'a Alphabet>,
    stop_words: &'static [&'static str],
}

impl<'a> Parser<'a> {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, alphabet: None, stop_words: &[] })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Expected { expected: expected.to_string(), found: self.peek().to_string() },
            span: self.span(),
        }
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.is_punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<SourceSpan, ParseError> {
        if self.is_punct(c) {
            Ok(self.bump().1)
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{kw}`")))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().1;
                Ok((s, span))
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn starts_term(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !self.stop_words.contains(&s.as_str()),
            Tok::Punct('[') | Tok::Punct('(') => true,
            _ => false,
        }
    }

    fn word(&mut self) -> Result<Vec<Letter>, ParseError> {
        if let Tok::Number(n) = self.peek() {
            if n == "1" {
                self.bump();
                return Ok(Vec::new());
            }
            return Err(self.error("a word"));
        }
        if !self.starts_term() {
            return Err(self.error("a word"));
        }
        let mut letters = Vec::new();
        while self.starts_term() {
            let start = self.span().start;
            let term = self.term()?;
            if letters.len() + term.len() > MAX_WORD_LETTERS {
                return Err(ParseError {
                    kind: ParseErrorKind::WordTooLong,
                    span: SourceSpan::new(start, self.toks[self.pos.saturating_sub(1)].1.end),
                });
            }
            letters = reduce_letters(letters.into_iter().chain(term));
        }
        Ok(letters)
    }

    fn term(&mut self) -> Result<Vec<Letter>, ParseError> {
        let start = self.span().start;
        let base = self.atom()?;
        if !self.eat_punct('^') {
            return Ok(base);
        }
        let negative = self.eat_punct('-');
        let (digits, span) = match self.peek().clone() {
            Tok::Number(d) => (d, self.bump().1),
            _ => return Err(self.error("an exponent")),
        };
        let n: usize = digits.parse().map_err(|_| ParseError {
            kind: ParseErrorKind::ExponentTooLarge,
            span,
        })?;
        let too_long = ParseError { kind: ParseErrorKind::WordTooLong, span: SourceSpan::new(start, span.end) };
        if base.len().checked_mul(n).map_or(true, |len| len > MAX_WORD_LETTERS) {
            return Err(too_long);
        }
        let unit: Vec<Letter> = if negative {
            base.iter().rev().map(|l| l.inverse()).collect()
        } else {
            base
        };
        Ok(reduce_letters(std::iter::repeat(unit).take(n).flatten()))
    }

    fn atom(&mut self) -> Result<Vec<Letter>, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().1;
                let alphabet = self.alphabet.expect("alphabet set before parsing words");
                let g = alphabet.index_of(&name).ok_or(ParseError {
                    kind: ParseErrorKind::UnknownGenerator(name),
                    span,
                })?;
                Ok(vec![Letter::pos(g)])
            }
            Tok::Punct('[') => {
                let open = self.bump().1;
                let u = self.word()?;
                self.expect_punct(',')?;
                let v = self.word()?;
                let close = self.expect_punct(']')?;
                if 2 * (u.len() + v.len()) > MAX_WORD_LETTERS {
                    return Err(ParseError {
                        kind: ParseErrorKind::WordTooLong,
                        span: SourceSpan::new(open.start, close.end),
                    });
                }
                let letters = u
                    .iter()
                    .copied()
                    .chain(v.iter().copied())
                    .chain(u.iter().rev().map(|l| l.inverse()))
                    .chain(v.iter().rev().map(|l| l.inverse()));
                Ok(reduce_letters(letters))
            }
            Tok::Punct('(') => {
                self.bump();
                let w = self.word()?;
                self.expect_punct(')')?;
                Ok(w)
            }
            _ => Err(self.error("a generator, `[` or `(`")),
        }
    }

    /// relation := word [ '=' word ], returned as the relator `u v^-1`.
    fn relation(&mut self) -> Result<Vec<Letter>, ParseError> {
        let u = self.word()?;
        if self.eat_punct('=') {
            let v = self.word()?;
            Ok(reduce_letters(u.into_iter().chain(v.iter().rev().map(|l| l.inverse()))))
        } else {
            Ok(u)
        }
    }

    fn make_word(&self, letters: Vec<Letter>) -> Word {
        Word::new(self.alphabet.expect("alphabet set"), letters).expect("letters index the alphabet")
    }
}

pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_punct('<')?;
    let mut names = Vec::new();
    let mut spans = Vec::new();
    if !p.is_punct('|') {
        loop {
            let (name, span) = p.expect_ident("a generator name")?;
            if names.contains(&name) {
                return Err(ParseError { kind: ParseErrorKind::DuplicateGenerator(name), span });
            }
            names.push(name);
            spans.push(span);
            if !p.eat_punct(',') {
                break;
            }
        }
    }
    p.expect_punct('|')?;
    let alphabet = Alphabet::new(names).map_err(|e| match e {
        WordError::DuplicateGenerator(n) => ParseError {
            kind: ParseErrorKind::DuplicateGenerator(n),
            span: spans[0],
        },
        other => unreachable!("lexer only yields identifiers: {other}"),
    })?;
    p.alphabet = Some(&alphabet);
    let mut relators = Vec::new();
    if !p.is_punct('>') {
        loop {
            let r = p.relation()?;
            relators.push(p.make_word(r));
            if !p.eat_punct(',') {
                break;
            }
        }
    }
    p.expect_punct('>')?;
    p.expect_eof()?;
    Ok(Presentation::new(alphabet.clone(), relators).expect("relators built over the alphabet"))
}

/// Parses a single word over `alphabet`.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word, ParseError> {
    let mut p = Parser::new(text)?;
    p.alphabet = Some(alphabet);
    let letters = p.word()?;
    p.expect_eof()?;
    Ok(p.make_word(letters))
}

/// Parses a relation `u = v` or a bare relator word, returning the relator.
pub fn parse_relation(text: &str, alphabet: &Alphabet) -> Result<Word, ParseError> {
    let mut p = Parser::new(text)?;
    p.alphabet = Some(alphabet);
    let letters = p.relation()?;
    p.expect_eof()?;
    Ok(p.make_word(letters))
}

/// Canonical text: `parse_presentation` of the output gives back `p` exactly.
pub fn serialize_presentation(p: &Presentation) -> String {
    let gens = p.alphabet().names().join(", ");
    let head = if gens.is_empty() { "<".to_string() } else { format!("< {gens}") };
    if p.relators().is_empty() {
        return format!("{head} | >\n");
    }
    let mut out = format!("{head} |\n");
    let n = p.relators().len();
    for (i, r) in p.relators().iter().enumerate() {
        out.push_str("    ");
        out.push_str(&r.to_string());
        if i + 1 < n {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(">\n");
    out
}

fn relator_source(name: &str) -> Option<Result<usize, ()>> {
    let digits = name.strip_prefix('r')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    match digits.parse::<usize>() {
        Ok(0) | Err(_) => Some(Err(())),
        Ok(k) => Some(Ok(k - 1)),
    }
}

/// Parses a `.proof` script whose words are over `alphabet`.
pub fn parse_proof(text: &str, alphabet: &Alphabet) -> Result<ProofScript, ParseError> {
    let mut p = Parser::new(text)?;
    p.alphabet = Some(alphabet);
    p.stop_words = &["via", "step"];
    let mut script = ProofScript::default();
    loop {
        if p.is_keyword("presentation") {
            p.bump();
            match p.peek().clone() {
                Tok::Str(s) => {
                    p.bump();
                    script.presentation = Some(s);
                }
                _ => return Err(p.error("a quoted presentation name")),
            }
            continue;
        }
        if *p.peek() == Tok::Eof {
            break;
        }
        p.expect_keyword("step")?;
        let (name, span) = p.expect_ident("a step name")?;
        if relator_source(&name).is_some() {
            return Err(ParseError { kind: ParseErrorKind::ReservedStepName(name), span });
        }
        if script.steps.iter().any(|s| s.name == name) {
            return Err(ParseError { kind: ParseErrorKind::DuplicateStep(name), span });
        }
        p.expect_punct(':')?;
        let lhs = p.word()?;
        p.expect_punct('=')?;
        let rhs = p.word()?;
        let mut factors = Vec::new();
        if p.is_keyword("via") {
            p.bump();
            loop {
                p.expect_keyword("conj")?;
                p.expect_punct('(')?;
                let conj = p.word()?;
                p.expect_punct(',')?;
                let (src, src_span) = p.expect_ident("a relator reference or step name")?;
                let source = match relator_source(&src) {
                    Some(Ok(k)) => Source::Relator(k),
                    Some(Err(())) => {
                        return Err(ParseError { kind: ParseErrorKind::ZeroRelatorIndex, span: src_span })
                    }
                    None => Source::Step(src),
                };
                p.expect_punct(')')?;
                let mut inverted = false;
                if p.eat_punct('^') {
                    p.expect_punct('-')?;
                    match p.peek() {
                        Tok::Number(n) if n == "1" => {
                            p.bump();
                        }
                        _ => return Err(p.error("`1`")),
                    }
                    inverted = true;
                }
                factors.push(Factor { conjugator: p.make_word(conj), source, inverted });
                if !p.eat_punct(',') {
                    break;
                }
            }
        }
        script.steps.push(Step { name, lhs: p.make_word(lhs), rhs: p.make_word(rhs), factors });
    }
    Ok(script)
}

/// Canonical `.proof` text for `script`.
pub fn serialize_proof(script: &ProofScript) -> String {
    let mut out = String::new();
    if let Some(name) = &script.presentation {
        out.push_str(&format!("presentation \"{name}\"\n\n"));
    }
    for step in &script.steps {
        out.push_str(&format!("step {}: {} = {}", step.name, step.lhs, step.rhs));
        if !step.factors.is_empty() {
            out.push_str(" via");
            let n = step.factors.len();
            for (i, f) in step.factors.iter().enumerate() {
                let src = match &f.source {
                    Source::Relator(k) => format!("r{}", k + 1),
                    Source::Step(s) => s.clone(),
                };
                out.push_str(&format!(
                    "\n    conj({}, {src}){}",
                    f.conjugator,
                    if f.inverted { "^-1" } else { "" }
                ));
                if i + 1 < n {
                    out.push(',');
                }
            }
        }
        out.push('\n');
    }
    out
}
