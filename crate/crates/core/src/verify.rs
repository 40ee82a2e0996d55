//! The reproduction suite behind `fpgroup verify-paper`: ten numbered checks
//! over the bundled corpus and seeded random families.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::abelianize;
use crate::corpus::{load_corpus, Corpus, Side, Target};
use crate::enumerator::{enumerate, verify_table, Limits, Outcome};
use crate::parser::{parse_presentation, parse_proof, serialize_presentation, ParseError};
use crate::presentation::{apply_move, definitions, relator_diff, relator_normal_form, Presentation, RelatorFactor, TietzeLog, TietzeMove};
use crate::proofcheck::{check_script, Source};
use crate::quotient::count_homomorphisms;
use crate::surgery::log_transform_matrix;
use crate::word::{Alphabet, Letter, Word};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone)]
pub struct Check {
    pub criterion: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(criterion: u8, title: &'static str, outcome: Result<String, String>) -> Self {
        match outcome {
            Ok(detail) => Check { criterion, title, passed: true, detail },
            Err(detail) => Check { criterion, title, passed: false, detail },
        }
    }

    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {}: {} ({})",
            self.criterion,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        )
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Small finite groups with their orders.
pub fn small_group_suite() -> Vec<(String, Presentation, usize)> {
    let mut out: Vec<(String, Presentation, usize)> = (1..=6)
        .map(|n| (format!("Z/{n}"), parse_presentation(&format!("< a | a^{n} >")).expect("valid"), n))
        .collect();
    out.push(("S3".into(), parse_presentation("< a, b | a^2, b^2, (a b)^3 >").expect("valid"), 6));
    out.push(("Q8".into(), parse_presentation("< a, b | a^4, a^2 b^-2, b^-1 a b a >").expect("valid"), 8));
    out
}

pub fn random_word<R: Rng>(rng: &mut R, alphabet: &Alphabet, max_len: usize) -> Word {
    if alphabet.is_empty() {
        return Word::identity(alphabet);
    }
    let len = rng.gen_range(0..=max_len);
    let letters: Vec<Letter> = (0..len)
        .map(|_| {
            let g = rng.gen_range(0..alphabet.len());
            if rng.gen_bool(0.5) {
                Letter::pos(g)
            } else {
                Letter::neg(g)
            }
        })
        .collect();
    Word::from_letters_unreduced(alphabet, letters).expect("indices in range")
}

/// A random applicable Tietze move, or `None` if the chosen kind does not apply.
pub fn random_tietze_move<R: Rng>(p: &Presentation, rng: &mut R, fresh: &mut usize) -> Option<TietzeMove> {
    match rng.gen_range(0..5) {
        0 => {
            let name = loop {
                *fresh += 1;
                let candidate = format!("t{fresh}");
                if p.alphabet().index_of(&candidate).is_none() {
                    break candidate;
                }
            };
            let definition = random_word(rng, p.alphabet(), 3).reduce();
            Some(TietzeMove::AddGenerator { name, definition })
        }
        1 if p.relator_count() > 0 => {
            let certificate: Vec<RelatorFactor> = (0..rng.gen_range(1..=2))
                .map(|_| RelatorFactor {
                    conjugator: random_word(rng, p.alphabet(), 2).reduce(),
                    relator: rng.gen_range(0..p.relator_count()),
                    inverted: rng.gen_bool(0.5),
                })
                .collect();
            let mut relator = Word::identity(p.alphabet());
            for f in &certificate {
                let r = &p.relators()[f.relator];
                let r = if f.inverted { r.invert() } else { r.clone() };
                relator = relator.multiply(&r.conjugate_by(&f.conjugator).ok()?).ok()?;
            }
            Some(TietzeMove::AddRelator { relator, certificate })
        }
        2 => {
            let gens: Vec<usize> = (0..p.generator_count()).filter(|&g| !definitions(p, g).is_empty()).collect();
            let &g = gens.choose(rng)?;
            let defs = definitions(p, g);
            let (relator, value) = defs.choose(rng)?.clone();
            Some(TietzeMove::Eliminate { generator: p.alphabet().name(g).to_string(), relator, value })
        }
        3 => p.relators().iter().position(Word::is_empty).map(|relator| TietzeMove::RemoveTrivialRelator { relator }),
        _ => {
            let nfs: Vec<Word> = p.relators().iter().map(relator_normal_form).collect();
            (1..nfs.len())
                .find(|&i| nfs[..i].contains(&nfs[i]))
                .map(|relator| TietzeMove::RemoveDuplicateRelator { relator })
        }
    }
}

/// Applies up to `moves` random Tietze moves, returning the result and its log.
pub fn random_tietze_sequence<R: Rng>(p: &Presentation, rng: &mut R, moves: usize) -> (Presentation, TietzeLog) {
    let mut current = p.clone();
    let mut log = TietzeLog::new();
    let mut fresh = 0;
    let mut attempts = 0;
    while log.len() < moves && attempts < 20 * moves {
        attempts += 1;
        if let Some(m) = random_tietze_move(&current, rng, &mut fresh) {
            let next = apply_move(&current, &m).expect("generated moves are applicable");
            log.push(m);
            current = next;
        }
    }
    (current, log)
}

fn order_of(p: &Presentation, limits: Limits) -> Result<usize, String> {
    let r = enumerate(p, &[], limits).map_err(|e| e.to_string())?;
    match r.outcome {
        Outcome::Completed { index } => {
            verify_table(r.table(), p).map_err(|v| format!("table check failed: {v:?}"))?;
            Ok(index)
        }
        Outcome::Exhausted { live, defined } => Err(format!("exhausted ({live} live, {defined} defined)")),
    }
}

pub fn criterion_1(c: &Corpus) -> Check {
    let run = || -> Result<String, String> {
        let mut parts = Vec::new();
        for (name, p) in [("m_displayed", &c.m_displayed), ("m_raw", &c.m_raw)] {
            let start = Instant::now();
            let r = enumerate(p, &[], Limits::default()).map_err(|e| e.to_string())?;
            let elapsed = start.elapsed();
            ensure(r.index() == Some(1), || format!("{name}: {:?}", r.outcome))?;
            ensure(elapsed < Duration::from_secs(10), || format!("{name}: took {elapsed:?}"))?;
            verify_table(r.table(), p).map_err(|v| format!("{name}: table check failed: {v:?}"))?;
            parts.push(format!("{name} order 1 with {} cosets defined", r.stats.defined));
        }
        Ok(parts.join("; "))
    };
    Check::new(1, "pi_1(M) is trivial by coset enumeration", run())
}

fn sorted(mut v: Vec<Word>) -> Vec<Word> {
    v.sort_by(|a, b| a.letters().cmp(b.letters()));
    v
}

pub fn criterion_2(c: &Corpus) -> Check {
    let run = || -> Result<String, String> {
        let (mech, _) = c.e0_mechanical().map_err(|e| e.to_string())?;
        let names: Vec<&str> = mech.alphabet().names().iter().map(String::as_str).collect();
        ensure(names == ["a", "c", "e", "g", "h", "q"], || format!("generators {names:?}"))?;
        ensure(mech.relator_count() == 9, || format!("{} relators", mech.relator_count()))?;
        let diff = relator_diff(&mech, &c.e0_displayed, None).map_err(|e| e.to_string())?;
        let flagged = |side| sorted(c.variants_for(Target::E0, side).into_iter().map(relator_normal_form).collect());
        ensure(sorted(diff.only_left.clone()) == flagged(Side::Mechanical), || "unflagged mechanical relator".into())?;
        ensure(sorted(diff.only_right.clone()) == flagged(Side::Displayed), || "unflagged displayed relator".into())?;
        let (ab1, ab2) = (abelianize(&mech), abelianize(&c.e0_displayed));
        ensure(ab1 == ab2, || format!("abelianizations {ab1} vs {ab2}"))?;
        let mut counts = Vec::new();
        for g in &c.quotient_targets {
            let (x, y) = (count_homomorphisms(&mech, g), count_homomorphisms(&c.e0_displayed, g));
            ensure(x == y, || format!("{}: {x} vs {y} homomorphisms", g.name()))?;
            counts.push(format!("{}:{x}", g.name()));
        }
        Ok(format!(
            "{} relators match, {} flagged variant(s); abelianization {ab1}; hom counts {}",
            diff.matched,
            diff.only_left.len(),
            counts.join(" ")
        ))
    };
    Check::new(2, "E0~ elimination reproduces the displayed presentation", run())
}

pub fn criterion_3(c: &Corpus) -> Check {
    let run = || -> Result<String, String> {
        let (mech, _) = c.m_mechanical().map_err(|e| e.to_string())?;
        ensure(mech.generator_count() == 6, || format!("{} generators", mech.generator_count()))?;
        let a = order_of(&mech, Limits::default()).map_err(|e| format!("mechanical: {e}"))?;
        let b = order_of(&c.m_displayed, Limits::default()).map_err(|e| format!("displayed: {e}"))?;
        ensure(a == 1 && b == 1, || format!("orders {a} and {b}"))?;
        let diff = relator_diff(&mech, &c.m_displayed, None).map_err(|e| e.to_string())?;
        Ok(format!("both order 1; {} relators match, {} differ", diff.matched, diff.only_left.len()))
    };
    Check::new(3, "M elimination yields six generators and order 1", run())
}

pub fn criterion_4(c: &Corpus) -> Check {
    let run = || -> Result<String, String> {
        let (mech, _) = c.m_mechanical().map_err(|e| e.to_string())?;
        for (name, p) in [("m_displayed", &c.m_displayed), ("m mechanical", &mech)] {
            let ab = abelianize(p);
            ensure(ab.is_trivial(), || format!("{name}: {ab}"))?;
        }
        for (name, p) in [("e0_raw", &c.e0_raw), ("e0_displayed", &c.e0_displayed)] {
            let ab = abelianize(p);
            ensure(ab.torsion.is_empty() && ab.free_rank == 2, || format!("{name}: {ab}"))?;
        }
        Ok("M trivial, E0~ free abelian of rank 2".into())
    };
    Check::new(4, "abelianizations", run())
}

/// Left-multiplies the conjugator by the first generator that changes the factor.
fn corrupt_conjugator(conj: &Word, base: &Word) -> Option<Word> {
    let alphabet = conj.alphabet();
    (0..alphabet.len()).find_map(|g| {
        let x = Word::new(alphabet, [Letter::pos(g)]).ok()?;
        let c2 = x.multiply(conj).ok()?;
        (base.conjugate_by(&c2).ok()? != base.conjugate_by(conj).ok()?).then_some(c2)
    })
}

pub fn criterion_5(c: &Corpus) -> Check {
    let run = || -> Result<String, String> {
        let p = &c.m_displayed;
        let script = &c.m_triviality;
        let report = check_script(p, script);
        ensure(report.proves_trivial(), || report.summary())?;
        let mut corruptions = 0;
        for (si, step) in script.steps.iter().enumerate() {
            for fi in 0..step.factors.len() {
                let factor = &step.factors[fi];
                let base = match &factor.source {
                    Source::Relator(k) => p.relators()[*k].clone(),
                    Source::Step(name) => {
                        let s = script.steps.iter().find(|s| &s.name == name).ok_or("dangling step")?;
                        s.claim().map_err(|e| e.to_string())?
                    }
                };
                let mut variants = Vec::new();
                if let Some(c2) = corrupt_conjugator(&factor.conjugator, &base) {
                    let mut s = script.clone();
                    s.steps[si].factors[fi].conjugator = c2;
                    variants.push(("conjugator", s));
                }
                let mut s = script.clone();
                s.steps[si].factors[fi].source = match &factor.source {
                    Source::Relator(k) => Source::Relator((k + 1) % p.relator_count()),
                    Source::Step(_) => Source::Relator(0),
                };
                variants.push(("source", s));
                for (what, corrupted) in variants {
                    let r = check_script(p, &corrupted);
                    let rejected = r.rejected_steps();
                    ensure(rejected == [step.name.as_str()], || {
                        format!("corrupting the {what} of factor {} in {} rejected {rejected:?}", fi + 1, step.name)
                    })?;
                    corruptions += 1;
                }
            }
        }
        Ok(format!("{} steps accepted; {corruptions} single corruptions each rejected exactly their step", script.steps.len()))
    };
    Check::new(5, "triviality certificate replays", run())
}

pub fn criterion_6() -> Check {
    let run = || -> Result<String, String> {
        let suite = small_group_suite();
        for (name, p, expected) in &suite {
            let n = order_of(p, Limits::default()).map_err(|e| format!("{name}: {e}"))?;
            ensure(n == *expected, || format!("{name}: order {n}, expected {expected}"))?;
        }
        Ok(format!("{} groups", suite.len()))
    };
    Check::new(6, "small finite groups have the expected orders", run())
}

pub fn criterion_7(seed: u64) -> Check {
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let suite = small_group_suite();
        let mut moves = 0;
        for i in 0..200 {
            let (name, p, order) = &suite[i % suite.len()];
            let len = rng.gen_range(1..=6);
            let (q, log) = random_tietze_sequence(p, &mut rng, len);
            moves += log.len();
            ensure(log.replay(p).as_ref() == Ok(&q), || format!("{name}: log does not replay"))?;
            let n = order_of(&q, Limits::default()).map_err(|e| format!("{name}: {e}"))?;
            ensure(n == *order, || format!("{name}: order {n} after {}", log.render()))?;
            ensure(abelianize(&q) == abelianize(p), || format!("{name}: abelianization changed"))?;
        }
        Ok(format!("200 sequences, {moves} moves"))
    };
    Check::new(7, "Tietze moves preserve order and abelianization", run())
}

pub fn criterion_8(seed: u64) -> Check {
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 8);
        let alphabet = Alphabet::new(["a", "b", "c"]).expect("valid");
        for _ in 0..10_000 {
            let w = random_word(&mut rng, &alphabet, 24);
            let r = w.reduce();
            ensure(r.reduce() == r && r.is_reduced(), || format!("reduction not idempotent on {w}"))?;

            let mut letters = r.letters().to_vec();
            let at = rng.gen_range(0..=letters.len());
            let g = rng.gen_range(0..alphabet.len());
            let pair = if rng.gen_bool(0.5) { [Letter::pos(g), Letter::neg(g)] } else { [Letter::neg(g), Letter::pos(g)] };
            letters.splice(at..at, pair);
            let padded = Word::from_letters_unreduced(&alphabet, letters).expect("same alphabet");
            ensure(padded.reduce() == r, || format!("cancelling pair changed {r}"))?;

            let v = random_word(&mut rng, &alphabet, 24);
            let lhs = w.multiply(&v).map_err(|e| e.to_string())?.invert();
            let rhs = v.invert().multiply(&w.invert()).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("inversion is not an anti-homomorphism on {w}, {v}"))?;
        }
        Ok("10000 cases for each property".into())
    };
    Check::new(8, "free reduction properties", run())
}

pub fn criterion_9() -> Check {
    let run = || -> Result<String, String> {
        for p in -5i64..=5 {
            let t = log_transform_matrix(p);
            ensure(t.determinant == 1, || format!("p={p}: determinant {}", t.determinant))?;
            ensure(t.luttinger == (p.abs() == 1), || format!("p={p}: wrong Luttinger flag"))?;
        }
        Ok("determinant 1 for p in -5..5; Luttinger exactly at p = +1, -1".into())
    };
    Check::new(9, "log-transform gluing matrices", run())
}

fn span_ok(e: &ParseError, text: &str) -> bool {
    e.span.start <= e.span.end && e.span.end <= text.len()
}

/// Random text biased toward the grammar's own tokens, plus mutations of corpus files.
pub fn fuzz_input<R: Rng>(rng: &mut R) -> String {
    const TOKENS: [&str; 24] = [
        "<", ">", "|", ",", "=", "[", "]", "(", ")", "^", "-", "1", "a", "b", "q", " ", "\n", "#", "99999999999999999999",
        "step", "via", "conj", "r0", "\"",
    ];
    match rng.gen_range(0..3) {
        0 => {
            let bytes: Vec<u8> = (0..rng.gen_range(0..64)).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        }
        1 => (0..rng.gen_range(0..40)).map(|_| *TOKENS.choose(rng).expect("nonempty")).collect(),
        _ => {
            let files: Vec<&str> = crate::corpus::file_names().collect();
            let mut chars: Vec<char> = crate::corpus::source(files.choose(rng).expect("nonempty")).expect("bundled").chars().collect();
            for _ in 0..rng.gen_range(1..6) {
                let i = rng.gen_range(0..=chars.len());
                match rng.gen_range(0..3) {
                    0 if i < chars.len() => {
                        chars.remove(i);
                    }
                    1 => chars.insert(i, *b"<>|,=[]()^-1aq#\xe9".choose(rng).expect("nonempty") as char),
                    _ if i < chars.len() => chars[i] = rng.gen_range(' '..='~'),
                    _ => {}
                }
            }
            chars.into_iter().collect()
        }
    }
}

pub fn criterion_10(c: &Corpus, seed: u64) -> Check {
    let run = || -> Result<String, String> {
        for name in crate::corpus::file_names() {
            let text = crate::corpus::source(name).expect("bundled");
            if name.ends_with(".grp") {
                let p = parse_presentation(text).map_err(|e| format!("{name}: {e}"))?;
                let again = parse_presentation(&serialize_presentation(&p)).map_err(|e| format!("{name}: {e}"))?;
                ensure(again == p, || format!("{name} does not round-trip"))?;
            } else {
                let s = parse_proof(text, c.m_displayed.alphabet()).map_err(|e| format!("{name}: {e}"))?;
                let again = parse_proof(&crate::parser::serialize_proof(&s), c.m_displayed.alphabet())
                    .map_err(|e| format!("{name}: {e}"))?;
                ensure(again == s, || format!("{name} does not round-trip"))?;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 10);
        let (mut ok, mut errors) = (0, 0);
        for _ in 0..1000 {
            let input = fuzz_input(&mut rng);
            let outcome = catch_unwind(AssertUnwindSafe(|| {
                let a = parse_presentation(&input).map(|_| ()).map_err(|e| span_ok(&e, &input));
                let b = parse_proof(&input, c.m_displayed.alphabet()).map(|_| ()).map_err(|e| span_ok(&e, &input));
                [a, b]
            }))
            .map_err(|_| format!("parser panicked on {input:?}"))?;
            for r in outcome {
                match r {
                    Ok(()) => ok += 1,
                    Err(true) => errors += 1,
                    Err(false) => return Err(format!("error span out of range on {input:?}")),
                }
            }
        }
        Ok(format!("corpus round-trips; 1000 fuzz inputs gave {ok} values and {errors} spanned errors"))
    };
    Check::new(10, "parser round-trip and robustness", run())
}

/// Runs every check. Returns an error only if the bundled corpus fails to load.
pub fn run_all(seed: u64) -> Result<Vec<Check>, crate::corpus::CorpusError> {
    let c = load_corpus()?;
    Ok(vec![
        criterion_1(&c),
        criterion_2(&c),
        criterion_3(&c),
        criterion_4(&c),
        criterion_5(&c),
        criterion_6(),
        criterion_7(seed),
        criterion_8(seed),
        criterion_9(),
        criterion_10(&c, seed),
    ])
}
