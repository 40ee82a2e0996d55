//! Acceptance suite. Runs without the libtest harness so that one PASS/FAIL
//! line per criterion is always printed; exits nonzero if any criterion fails.
//!
//! Each criterion runs the library's own check from `fpgroup::verify` and,
//! alongside it, an independent oracle from `common`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{
    abelian_oracle, brute_force_order, letters, naive_concat, naive_conj, naive_hom_count, naive_invert, naive_reduce,
    parse_dump, table_is_valid, L,
};
use fpgroup::corpus::{load_corpus, Corpus};
use fpgroup::enumerator::{enumerate, Limits};
use fpgroup::parser::{parse_presentation, parse_proof};
use fpgroup::presentation::Presentation;
use fpgroup::proofcheck::Source;
use fpgroup::quotient::PermGroup;
use fpgroup::surgery::log_transform_matrix;
use fpgroup::verify::{self, random_tietze_sequence, random_word, small_group_suite, Check};
use fpgroup::word::{Alphabet, Letter, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn library(check: Check) -> Result<String, String> {
    if check.passed {
        Ok(check.detail)
    } else {
        Err(format!("library check: {}", check.detail))
    }
}

/// Order-1 enumeration re-verified from the dumped table.
fn trivial_by_dump(name: &str, p: &Presentation) -> Result<Duration, String> {
    let start = Instant::now();
    let r = enumerate(p, &[], Limits::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(r.index() == Some(1), || format!("{name}: {:?}", r.outcome))?;
    ensure(r.stats.defined <= 1_000_000, || format!("{name}: {} cosets", r.stats.defined))?;
    let rows = parse_dump(&r.table().dump(p.alphabet())).map_err(|e| format!("{name}: {e}"))?;
    table_is_valid(&rows, p).map_err(|e| format!("{name}: {e}"))?;
    Ok(elapsed)
}

/// Test-side elimination: substitute fully resolved definitions letter by
/// letter, freely reduce, and drop the defining relators.
fn substitute_all(p: &Presentation, defs: &[(&str, &str)], target: &Alphabet) -> Result<Vec<Vec<L>>, String> {
    let mut resolved: Vec<(usize, Vec<L>)> = Vec::new();
    let src = p.alphabet();
    let expand = |w: &[L], resolved: &[(usize, Vec<L>)]| -> Vec<L> {
        let mut out = w.to_vec();
        // Repeat until no defined generator remains.
        loop {
            let mut changed = false;
            let mut next = Vec::new();
            for &(g, inv) in &out {
                match resolved.iter().find(|(h, _)| *h == g) {
                    Some((_, v)) => {
                        changed = true;
                        next.extend(if inv { naive_invert(v) } else { v.clone() });
                    }
                    None => next.push((g, inv)),
                }
            }
            out = naive_reduce(next);
            if !changed {
                return out;
            }
        }
    };
    let mut defining = Vec::new();
    for (g, value) in defs {
        let gi = src.index_of(g).ok_or(format!("no generator {g}"))?;
        let v = fpgroup::parser::parse_relation(value, src).map_err(|e| e.to_string())?;
        // The relator stating g = value, compared after earlier substitutions,
        // up to rotation and inversion.
        let claim = naive_concat(&[&[(gi, false)], &naive_invert(&expand(&letters(&v), &resolved))]);
        let idx = p
            .relators()
            .iter()
            .enumerate()
            .position(|(i, r)| !defining.contains(&i) && same_cyclic(&expand(&letters(r), &resolved), &claim))
            .ok_or(format!("no relator defines {g} = {value}"))?;
        defining.push(idx);
        resolved.push((gi, letters(&v)));
    }
    let mut out = Vec::new();
    for (i, r) in p.relators().iter().enumerate() {
        if defining.contains(&i) {
            continue;
        }
        let w = expand(&letters(r), &resolved);
        let mapped: Vec<L> = w
            .into_iter()
            .map(|(g, inv)| target.index_of(src.name(g)).map(|t| (t, inv)).ok_or(format!("{} survives", src.name(g))))
            .collect::<Result<_, _>>()?;
        out.push(mapped);
    }
    Ok(out)
}

fn same_cyclic(a: &[L], b: &[L]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let inv = naive_invert(b);
    (0..a.len().max(1)).any(|k| {
        let rot: Vec<L> = a[k.min(a.len())..].iter().chain(&a[..k.min(a.len())]).copied().collect();
        rot == b || rot == inv
    })
}

fn criterion_1(c: &Corpus) -> Outcome {
    let lib = library(verify::criterion_1(c))?;
    for (name, p) in [("m_displayed", &c.m_displayed), ("m_raw", &c.m_raw)] {
        let t = trivial_by_dump(name, p)?;
        ensure(t < Duration::from_secs(10), || format!("{name} took {t:?}"))?;
    }
    ensure(c.m_raw.relator_count() == 21 && c.m_raw.generator_count() == 13, || "m_raw shape".into())?;
    Ok(format!("{lib}; tables re-verified from their dumps"))
}

fn criterion_2(c: &Corpus) -> Outcome {
    let lib = library(verify::criterion_2(c))?;
    let (mech, _) = c.e0_mechanical().map_err(|e| e.to_string())?;
    let oracle = substitute_all(&c.e0_raw, &fpgroup::corpus::E0_DEFINITIONS, mech.alphabet())?;
    let got: Vec<Vec<L>> = mech.relators().iter().map(letters).collect();
    ensure(oracle == got, || "elimination differs from letterwise substitution".into())?;
    let (a, b) = (abelian_oracle(&mech), abelian_oracle(&c.e0_displayed));
    ensure(a == b && a == (2, true), || format!("rank oracle {a:?} vs {b:?}"))?;
    for g in [PermGroup::symmetric(3), PermGroup::from_line("D8 = (1 2 3 4), (1 3)").map_err(|e| e.to_string())?] {
        let (x, y) = (naive_hom_count(&mech, g.elements()), naive_hom_count(&c.e0_displayed, g.elements()));
        ensure(x == y, || format!("{}: {x} vs {y} by exhaustive search", g.name()))?;
    }
    Ok(format!("{lib}; substitution, rank and exhaustive S3/D8 oracles agree"))
}

fn criterion_3(c: &Corpus) -> Outcome {
    let lib = library(verify::criterion_3(c))?;
    let (mech, _) = c.m_mechanical().map_err(|e| e.to_string())?;
    let defs: Vec<(&str, &str)> =
        fpgroup::corpus::E0_DEFINITIONS.iter().chain(&fpgroup::corpus::M_DEFINITIONS).copied().collect();
    let oracle = substitute_all(&c.m_raw, &defs, mech.alphabet())?;
    ensure(oracle == mech.relators().iter().map(letters).collect::<Vec<_>>(), || {
        "elimination differs from letterwise substitution".into()
    })?;
    trivial_by_dump("m mechanical", &mech)?;
    trivial_by_dump("m_displayed", &c.m_displayed)?;
    Ok(format!("{lib}; both tables re-verified"))
}

fn criterion_4(c: &Corpus) -> Outcome {
    let lib = library(verify::criterion_4(c))?;
    let (mech, _) = c.m_mechanical().map_err(|e| e.to_string())?;
    for (name, p, expect) in [
        ("m_displayed", &c.m_displayed, 0),
        ("m mechanical", &mech, 0),
        ("e0_raw", &c.e0_raw, 2),
        ("e0_displayed", &c.e0_displayed, 2),
    ] {
        let (rank, torsion_free) = abelian_oracle(p);
        ensure(rank == expect && torsion_free, || format!("{name}: oracle rank {rank}, torsion-free {torsion_free}"))?;
    }
    Ok(format!("{lib}; modular-rank oracle agrees"))
}

fn criterion_5(c: &Corpus) -> Outcome {
    let lib = library(verify::criterion_5(c))?;
    let script = &c.m_triviality;
    ensure(script.steps.len() == 11, || format!("{} steps", script.steps.len()))?;
    let rels: Vec<Vec<L>> = c.m_displayed.relators().iter().map(letters).collect();
    let mut claims: Vec<(String, Vec<L>)> = Vec::new();
    for step in &script.steps {
        let claim = naive_concat(&[&letters(&step.lhs), &naive_invert(&letters(&step.rhs))]);
        let mut product = Vec::new();
        for f in &step.factors {
            let base = match &f.source {
                Source::Relator(k) => rels[*k].clone(),
                Source::Step(n) => claims.iter().find(|(m, _)| m == n).ok_or(format!("unknown {n}"))?.1.clone(),
            };
            let base = if f.inverted { naive_invert(&base) } else { base };
            product = naive_concat(&[&product, &naive_conj(&letters(&f.conjugator), &base)]);
        }
        ensure(product == claim, || format!("step {} fails the independent recheck", step.name))?;
        claims.push((step.name.clone(), claim));
    }
    let trivial: Vec<&str> = script
        .steps
        .iter()
        .filter(|s| s.rhs.is_empty() && s.lhs.len() == 1)
        .map(|s| c.m_displayed.alphabet().name(s.lhs.letters()[0].generator))
        .collect();
    for g in c.m_displayed.alphabet().names() {
        ensure(trivial.contains(&g.as_str()), || format!("{g} never shown trivial"))?;
    }
    Ok(format!("{lib}; every certificate rechecked independently"))
}

fn criterion_6() -> Outcome {
    let lib = library(verify::criterion_6())?;
    let mut suite: Vec<(String, Presentation, usize)> = (1..=6)
        .map(|n| (format!("Z/{n}"), parse_presentation(&format!("< a | a^{n} >")).unwrap(), n))
        .collect();
    suite.push(("S3".into(), parse_presentation("< a, b | a^2, b^2, (a b)^3 >").unwrap(), 6));
    suite.push(("Q8".into(), parse_presentation("< a, b | a^4, a^2 b^-2, b^-1 a b a >").unwrap(), 8));
    for (name, p, _) in &suite {
        let oracle = brute_force_order(p, 12, 50_000_000).ok_or(format!("{name}: oracle budget exhausted"))?;
        let got = enumerate(p, &[], Limits::default()).map_err(|e| e.to_string())?.index();
        ensure(got == Some(oracle), || format!("{name}: enumerated {got:?}, brute force {oracle}"))?;
    }
    Ok(format!("{lib}; brute-force orders 1,2,3,4,5,6,6,8 reproduced"))
}

fn criterion_7() -> Outcome {
    let lib = library(verify::criterion_7(SEED))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let suite = small_group_suite();
    for i in 0..200 {
        let (name, p, order) = &suite[i % suite.len()];
        let len = rng.gen_range(1..=6);
        let (q, _) = random_tietze_sequence(p, &mut rng, len);
        let got = enumerate(&q, &[], Limits::default()).map_err(|e| e.to_string())?.index();
        ensure(got == Some(*order), || format!("{name}: order {got:?} after moves"))?;
        ensure(abelian_oracle(&q) == abelian_oracle(p), || format!("{name}: rank oracle changed"))?;
    }
    Ok(format!("{lib}; 200 more sequences checked against the rank oracle"))
}

fn criterion_8() -> Outcome {
    let lib = library(verify::criterion_8(SEED))?;
    let alphabet = Alphabet::new(["a", "b", "c"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x88);
    for _ in 0..10_000 {
        let w = random_word(&mut rng, &alphabet, 30);
        let r = w.reduce();
        ensure(letters(&r) == naive_reduce(letters(&w)) && r.reduce() == r, || format!("idempotence on {w}"))?;
    }
    for _ in 0..10_000 {
        let r = random_word(&mut rng, &alphabet, 30).reduce();
        let mut l = r.letters().to_vec();
        let at = rng.gen_range(0..=l.len());
        let g = rng.gen_range(0..3);
        let s = rng.gen_bool(0.5);
        let (x, y) = if s { (Letter::pos(g), Letter::neg(g)) } else { (Letter::neg(g), Letter::pos(g)) };
        l.splice(at..at, [x, y]);
        let padded = Word::from_letters_unreduced(&alphabet, l).unwrap();
        ensure(padded.reduce() == r, || format!("confluence on {r}"))?;
    }
    for _ in 0..10_000 {
        let u = random_word(&mut rng, &alphabet, 20);
        let v = random_word(&mut rng, &alphabet, 20);
        let lhs = u.multiply(&v).unwrap().invert();
        let rhs = v.invert().multiply(&u.invert()).unwrap();
        let oracle = naive_reduce(naive_invert(&[letters(&u), letters(&v)].concat()));
        ensure(lhs == rhs && letters(&lhs) == oracle, || format!("anti-homomorphism on {u}, {v}"))?;
    }
    Ok(format!("{lib}; 3 x 10000 more against the naive reducer"))
}

fn criterion_9() -> Outcome {
    let lib = library(verify::criterion_9())?;
    for p in -5i64..=5 {
        let t = log_transform_matrix(p);
        let m = t.matrix.rows();
        let sarrus = m[0][0] * m[1][1] * m[2][2] + m[0][1] * m[1][2] * m[2][0] + m[0][2] * m[1][0] * m[2][1]
            - m[0][2] * m[1][1] * m[2][0]
            - m[0][0] * m[1][2] * m[2][1]
            - m[0][1] * m[1][0] * m[2][2];
        ensure(*m == [[1, 0, 0], [0, p, -1], [0, 1, 0]], || format!("p={p}: wrong entries"))?;
        ensure(sarrus == 1 && t.determinant == 1, || format!("p={p}: determinant {sarrus}"))?;
        ensure(t.luttinger == (p == 1 || p == -1), || format!("p={p}: flag"))?;
    }
    Ok(format!("{lib}; rule-of-Sarrus oracle agrees"))
}

fn criterion_10(c: &Corpus) -> Outcome {
    let lib = library(verify::criterion_10(c, SEED))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x10);
    let seeds: Vec<&str> = fpgroup::corpus::file_names().filter_map(fpgroup::corpus::source).collect();
    for i in 0..1000 {
        let text = if i % 2 == 0 {
            let bytes: Vec<u8> = (0..rng.gen_range(0..120)).map(|_| rng.gen()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        } else {
            let src = seeds[rng.gen_range(0..seeds.len())];
            let cut = rng.gen_range(0..src.len());
            let cut = (0..=cut).rev().find(|&k| src.is_char_boundary(k)).unwrap_or(0);
            format!("{}{}", &src[..cut], ["(", "^-", "[a,", "<", "|", "conj(", "\u{2212}1"][i % 7])
        };
        let r = catch_unwind(AssertUnwindSafe(|| {
            let a = parse_presentation(&text).err().map(|e| e.span);
            let b = parse_proof(&text, c.m_displayed.alphabet()).err().map(|e| e.span);
            [a, b]
        }))
        .map_err(|_| format!("panic on {text:?}"))?;
        for span in r.into_iter().flatten() {
            ensure(span.start <= span.end && span.end <= text.len(), || format!("bad span on {text:?}"))?;
        }
    }
    Ok(format!("{lib}; 1000 further truncation and byte inputs handled"))
}

fn main() -> ExitCode {
    let corpus = match load_corpus() {
        Ok(c) => c,
        Err(e) => {
            println!("corpus failed to load: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("coset enumeration proves pi_1(M) trivial", Box::new(|| criterion_1(&corpus))),
        ("E0~ elimination matches the displayed presentation", Box::new(|| criterion_2(&corpus))),
        ("M elimination gives six generators and order 1", Box::new(|| criterion_3(&corpus))),
        ("abelianizations of M and E0~", Box::new(|| criterion_4(&corpus))),
        ("triviality certificate replays and detects corruption", Box::new(|| criterion_5(&corpus))),
        ("enumerator agrees with the brute-force order oracle", Box::new(criterion_6)),
        ("Tietze moves preserve order and abelian invariants", Box::new(criterion_7)),
        ("free-reduction properties", Box::new(criterion_8)),
        ("log-transform gluing matrices", Box::new(criterion_9)),
        ("parser round-trip and fuzzing", Box::new(|| criterion_10(&corpus))),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS {title} [{elapsed:.2?}] {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2}: FAIL {title} [{elapsed:.2?}] {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
