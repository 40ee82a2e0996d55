//! Todd–Coxeter coset enumeration, HLT strategy.
//!
//! Each live coset is scanned against every relator in file order, defining
//! new cosets to close gaps. Coincidences are processed immediately with a
//! union-find over coset ids. Ids are never reused; a coset is live iff it is
//! its own union-find root.

use std::fmt;

use thiserror::Error;

use crate::presentation::Presentation;
use crate::word::{Alphabet, Letter, Word, WordError};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Total coset ids that may be handed out.
    pub max_defined: usize,
    /// Cosets that may be live at once.
    pub max_live: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_defined: 1_000_000, max_live: 1_000_000 }
    }
}

impl Limits {
    pub fn with_max_cosets(n: usize) -> Self {
        Limits { max_defined: n, max_live: n }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub defined: usize,
    pub coincidences: usize,
    pub scans: usize,
    pub max_live: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Completed { index: usize },
    Exhausted { live: usize, defined: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("subgroup generator is not over the presentation's alphabet: {0}")]
    Alphabet(#[from] WordError),
}

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub outcome: Outcome,
    pub stats: Stats,
    table: CosetTable,
}

impl EnumerationResult {
    pub fn index(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Completed { index } => Some(index),
            Outcome::Exhausted { .. } => None,
        }
    }

    /// On completion the table is compacted: live cosets are `0..index`
    /// with coset 0 the subgroup coset.
    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn into_table(self) -> CosetTable {
        self.table
    }
}

/// Action of the generators and their inverses on coset ids.
///
/// Column `2g` holds the action of generator `g`, column `2g+1` that of its
/// inverse.
#[derive(Clone, PartialEq, Eq)]
pub struct CosetTable {
    generators: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
}

fn col(l: Letter) -> usize {
    2 * l.generator + usize::from(l.inverted)
}

fn inv_col(c: usize) -> usize {
    c ^ 1
}

impl CosetTable {
    /// A table with `cosets` ids, all live, all entries undefined.
    pub fn new(generators: usize, cosets: usize) -> Self {
        CosetTable {
            generators,
            table: vec![NONE; 2 * generators * cosets],
            parent: (0..cosets as u32).collect(),
        }
    }

    fn width(&self) -> usize {
        2 * self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Number of coset ids ever handed out, live or not.
    pub fn coset_ids(&self) -> usize {
        self.parent.len()
    }

    pub fn is_live(&self, coset: usize) -> bool {
        self.parent.get(coset).is_some_and(|&p| p as usize == coset)
    }

    pub fn live_cosets(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.parent.len()).filter(|&c| self.is_live(c))
    }

    pub fn live_count(&self) -> usize {
        self.live_cosets().count()
    }

    /// Image of `coset` under `letter`, if defined.
    pub fn action(&self, coset: usize, letter: Letter) -> Option<usize> {
        let v = self.table[coset * self.width() + col(letter)];
        (v != NONE).then_some(v as usize)
    }

    /// Overwrites one entry without maintaining any invariant. Intended for
    /// loading audited tables and for fault-injection tests.
    pub fn set_action(&mut self, coset: usize, letter: Letter, target: Option<usize>) {
        let w = self.width();
        self.table[coset * w + col(letter)] = target.map_or(NONE, |t| t as u32);
    }

    fn get(&self, coset: u32, c: usize) -> u32 {
        self.table[coset as usize * self.width() + c]
    }

    fn set(&mut self, coset: u32, c: usize, v: u32) {
        let w = self.width();
        self.table[coset as usize * w + c] = v;
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    /// Renumbers live cosets `0..n` in increasing id order.
    fn compact(&self) -> CosetTable {
        let mut new_id = vec![NONE; self.parent.len()];
        let live: Vec<usize> = self.live_cosets().collect();
        for (i, &c) in live.iter().enumerate() {
            new_id[c] = i as u32;
        }
        let w = self.width();
        let mut table = Vec::with_capacity(live.len() * w);
        for &c in &live {
            for k in 0..w {
                let v = self.table[c * w + k];
                table.push(if v == NONE { NONE } else { new_id[v as usize] });
            }
        }
        CosetTable { generators: self.generators, table, parent: (0..live.len() as u32).collect() }
    }

    /// Text form: a header line, then one line per live coset listing the
    /// 1-based image under each generator (`-` when undefined).
    pub fn dump(&self, alphabet: &Alphabet) -> String {
        let mut out = format!("cosets {} generators", self.live_count());
        for name in alphabet.names() {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
        let ids: Vec<usize> = self.live_cosets().collect();
        let number = |c: usize| ids.binary_search(&c).map(|i| i + 1).ok();
        for &c in &ids {
            out.push_str(&number(c).expect("live").to_string());
            for g in 0..self.generators {
                out.push(' ');
                match self.action(c, Letter::pos(g)).and_then(number) {
                    Some(n) => out.push_str(&n.to_string()),
                    None => out.push('-'),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Reads the output of [`CosetTable::dump`]. Inverse columns are filled
    /// from the generator columns.
    pub fn from_dump(text: &str, alphabet: &Alphabet) -> Result<CosetTable, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let header = lines.next().ok_or("empty table dump")?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("cosets") {
            return Err("header must start with `cosets`".into());
        }
        let n: usize = parts.next().and_then(|s| s.parse().ok()).ok_or("bad coset count")?;
        if parts.next() != Some("generators") {
            return Err("header must list `generators`".into());
        }
        let names: Vec<&str> = parts.collect();
        if names != alphabet.names().iter().map(String::as_str).collect::<Vec<_>>() {
            return Err("generator list does not match the presentation".into());
        }
        let mut t = CosetTable::new(alphabet.len(), n);
        let mut seen = 0;
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != alphabet.len() + 1 || fields[0] != (row + 1).to_string() || row >= n {
                return Err(format!("malformed row {}", row + 1));
            }
            for (g, f) in fields[1..].iter().enumerate() {
                if *f == "-" {
                    continue;
                }
                let target: usize = f.parse().map_err(|_| format!("bad entry `{f}`"))?;
                if target == 0 || target > n {
                    return Err(format!("entry {target} out of range"));
                }
                t.set_action(row, Letter::pos(g), Some(target - 1));
                t.set_action(target - 1, Letter::neg(g), Some(row));
            }
            seen += 1;
        }
        if seen != n {
            return Err(format!("expected {n} rows, found {seen}"));
        }
        Ok(t)
    }
}

impl fmt::Debug for CosetTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CosetTable({} live of {} ids)", self.live_count(), self.coset_ids())
    }
}

struct Exhausted;

struct Enumerator {
    t: CosetTable,
    limits: Limits,
    stats: Stats,
    live: usize,
    queue: Vec<u32>,
}

impl Enumerator {
    fn new(generators: usize, limits: Limits) -> Self {
        let mut t = CosetTable::new(generators, 0);
        t.table.reserve(2 * generators * 1024);
        let mut e = Enumerator { t, limits, stats: Stats::default(), live: 0, queue: Vec::new() };
        e.new_coset();
        e
    }

    fn new_coset(&mut self) -> u32 {
        let id = self.t.parent.len() as u32;
        self.t.parent.push(id);
        let w = self.t.width();
        self.t.table.extend(std::iter::repeat(NONE).take(w));
        self.stats.defined += 1;
        self.live += 1;
        self.stats.max_live = self.stats.max_live.max(self.live);
        id
    }

    fn define(&mut self, coset: u32, c: usize) -> Result<u32, Exhausted> {
        if self.stats.defined >= self.limits.max_defined || self.live >= self.limits.max_live {
            return Err(Exhausted);
        }
        let b = self.new_coset();
        self.t.set(coset, c, b);
        self.t.set(b, inv_col(c), coset);
        Ok(b)
    }

    fn merge(&mut self, k: u32, l: u32) {
        let k1 = self.t.rep(k);
        let l1 = self.t.rep(l);
        if k1 == l1 {
            return;
        }
        let (keep, drop) = if k1 < l1 { (k1, l1) } else { (l1, k1) };
        self.t.parent[drop as usize] = keep;
        self.queue.push(drop);
        self.stats.coincidences += 1;
        self.live -= 1;
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let e = self.queue[i];
            i += 1;
            for c in 0..self.t.width() {
                let f = self.t.get(e, c);
                if f == NONE {
                    continue;
                }
                let ci = inv_col(c);
                self.t.set(f, ci, NONE);
                let e1 = self.t.rep(e);
                let f1 = self.t.rep(f);
                let ex = self.t.get(e1, c);
                if ex != NONE {
                    self.merge(f1, ex);
                    continue;
                }
                let fx = self.t.get(f1, ci);
                if fx != NONE {
                    self.merge(e1, fx);
                    continue;
                }
                self.t.set(e1, c, f1);
                self.t.set(f1, ci, e1);
            }
        }
    }

    fn scan_and_fill(&mut self, alpha: u32, word: &[usize]) -> Result<(), Exhausted> {
        self.stats.scans += 1;
        if word.is_empty() {
            return Ok(());
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = word.len() - 1;
        loop {
            while i <= j {
                let next = self.t.get(f, word[i]);
                if next == NONE {
                    break;
                }
                f = next;
                i += 1;
            }
            if i > j {
                if f != alpha {
                    self.coincidence(f, alpha);
                }
                return Ok(());
            }
            while j >= i {
                let next = self.t.get(b, inv_col(word[j]));
                if next == NONE {
                    break;
                }
                b = next;
                if j == 0 {
                    // whole word traced backwards
                    self.coincidence(f, b);
                    return Ok(());
                }
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                self.t.set(f, word[i], b);
                self.t.set(b, inv_col(word[i]), f);
                return Ok(());
            }
            self.define(f, word[i])?;
        }
    }

    fn run(&mut self, relators: &[Vec<usize>], subgroup: &[Vec<usize>]) -> Result<(), Exhausted> {
        for h in subgroup {
            self.scan_and_fill(0, h)?;
        }
        let mut alpha = 0usize;
        while alpha < self.t.parent.len() {
            if self.t.is_live(alpha) {
                for r in relators {
                    self.scan_and_fill(alpha as u32, r)?;
                    if !self.t.is_live(alpha) {
                        break;
                    }
                }
                if self.t.is_live(alpha) {
                    for c in 0..self.t.width() {
                        if self.t.get(alpha as u32, c) == NONE {
                            self.define(alpha as u32, c)?;
                        }
                    }
                }
            }
            alpha += 1;
        }
        Ok(())
    }
}

fn columns(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|&l| col(l)).collect()
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the
/// group presented by `p`. An empty `subgroup` gives the group order.
pub fn enumerate(p: &Presentation, subgroup: &[Word], limits: Limits) -> Result<EnumerationResult, EnumerationError> {
    let subgroup: Vec<Vec<usize>> = subgroup
        .iter()
        .map(|h| h.with_alphabet(p.alphabet()).map(|h| columns(&h.reduce())))
        .collect::<Result<_, _>>()?;
    let relators: Vec<Vec<usize>> = p
        .relators()
        .iter()
        .map(|r| columns(&r.cyclic_reduce().0))
        .filter(|r| !r.is_empty())
        .collect();
    let mut e = Enumerator::new(p.generator_count(), limits);
    match e.run(&relators, &subgroup) {
        Ok(()) => {
            let table = e.t.compact();
            Ok(EnumerationResult {
                outcome: Outcome::Completed { index: e.live },
                stats: e.stats,
                table,
            })
        }
        Err(Exhausted) => Ok(EnumerationResult {
            outcome: Outcome::Exhausted { live: e.live, defined: e.stats.defined },
            stats: e.stats,
            table: e.t,
        }),
    }
}

/// The first defect found by [`verify_table`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableViolation {
    #[error("generator count {table} does not match presentation ({presentation})")]
    GeneratorCount { table: usize, presentation: usize },
    #[error("table has no live cosets")]
    Empty,
    #[error("coset {coset}: action of {letter} undefined")]
    Undefined { coset: usize, letter: String },
    #[error("coset {coset}: action of {letter} leads to dead or missing coset {target}")]
    DeadTarget { coset: usize, letter: String, target: usize },
    #[error("coset {coset}: {letter} sends it to {target} but the inverse does not return")]
    NotInverse { coset: usize, letter: String, target: usize },
    #[error("relator {relator} does not close at coset {coset}")]
    RelatorOpen { relator: usize, coset: usize },
}

/// Independent check of a coset table: complete on live cosets, mutually
/// inverse actions, and every relator traces a closed loop at every live
/// coset. Cosets are reported 0-based.
pub fn verify_table(t: &CosetTable, p: &Presentation) -> Result<(), TableViolation> {
    if t.generator_count() != p.generator_count() {
        return Err(TableViolation::GeneratorCount { table: t.generator_count(), presentation: p.generator_count() });
    }
    let live: Vec<usize> = t.live_cosets().collect();
    if live.is_empty() {
        return Err(TableViolation::Empty);
    }
    let name = |l: Letter| {
        let n = p.alphabet().name(l.generator);
        if l.inverted {
            format!("{n}^-1")
        } else {
            n.to_string()
        }
    };
    for &c in &live {
        for g in 0..t.generator_count() {
            for l in [Letter::pos(g), Letter::neg(g)] {
                let target = t.action(c, l).ok_or_else(|| TableViolation::Undefined { coset: c, letter: name(l) })?;
                if !t.is_live(target) {
                    return Err(TableViolation::DeadTarget { coset: c, letter: name(l), target });
                }
                if t.action(target, l.inverse()) != Some(c) {
                    return Err(TableViolation::NotInverse { coset: c, letter: name(l), target });
                }
            }
        }
    }
    for (k, r) in p.relators().iter().enumerate() {
        for &c in &live {
            let end = r
                .letters()
                .iter()
                .try_fold(c, |x, &l| t.action(x, l))
                .expect("table checked complete");
            if end != c {
                return Err(TableViolation::RelatorOpen { relator: k + 1, coset: c });
            }
        }
    }
    Ok(())
}
