//! Independent oracles. None of these call the library's reduction,
//! enumeration, Smith form or homomorphism search; they only read its data.
#![allow(dead_code)]

use fpgroup::presentation::Presentation;
use fpgroup::word::Word;

/// A letter as (generator, inverted).
pub type L = (usize, bool);

pub fn letters(w: &Word) -> Vec<L> {
    w.letters().iter().map(|l| (l.generator, l.inverted)).collect()
}

/// Free reduction by repeatedly deleting the leftmost cancelling pair.
pub fn naive_reduce(mut w: Vec<L>) -> Vec<L> {
    loop {
        let hit = w.windows(2).position(|p| p[0].0 == p[1].0 && p[0].1 != p[1].1);
        match hit {
            Some(i) => {
                w.drain(i..i + 2);
            }
            None => return w,
        }
    }
}

pub fn naive_invert(w: &[L]) -> Vec<L> {
    w.iter().rev().map(|&(g, s)| (g, !s)).collect()
}

pub fn naive_concat(parts: &[&[L]]) -> Vec<L> {
    naive_reduce(parts.concat())
}

pub fn naive_conj(c: &[L], s: &[L]) -> Vec<L> {
    naive_concat(&[c, s, &naive_invert(c)])
}

// ---------------------------------------------------------------------------
// Coset tables read back from their text dump.

/// `rows[coset][generator]`, 0-based, parsed from `CosetTable::dump`.
pub fn parse_dump(text: &str) -> Result<Vec<Vec<usize>>, String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or("empty dump")?.split_whitespace().collect();
    if header.len() < 3 || header[0] != "cosets" || header[2] != "generators" {
        return Err("bad header".into());
    }
    let n: usize = header[1].parse().map_err(|_| "bad coset count")?;
    let gens = header.len() - 3;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != gens + 1 || f[0] != (i + 1).to_string() {
            return Err(format!("bad row {line:?}"));
        }
        let row = f[1..]
            .iter()
            .map(|s| s.parse::<usize>().ok().filter(|&k| k >= 1 && k <= n).map(|k| k - 1))
            .collect::<Option<Vec<_>>>()
            .ok_or(format!("undefined or out-of-range entry in {line:?}"))?;
        rows.push(row);
    }
    if rows.len() != n {
        return Err("row count mismatch".into());
    }
    Ok(rows)
}

/// Every generator column is a permutation and every relator closes at every coset.
pub fn table_is_valid(rows: &[Vec<usize>], p: &Presentation) -> Result<(), String> {
    let n = rows.len();
    let gens = p.generator_count();
    let mut inverse = vec![vec![usize::MAX; gens]; n];
    for (c, row) in rows.iter().enumerate() {
        for (g, &t) in row.iter().enumerate() {
            if inverse[t][g] != usize::MAX {
                return Err(format!("generator {g} is not injective"));
            }
            inverse[t][g] = c;
        }
    }
    for r in p.relators() {
        for start in 0..n {
            let end = letters(r).iter().fold(start, |x, &(g, inv)| if inv { inverse[x][g] } else { rows[x][g] });
            if end != start {
                return Err(format!("relator {r} does not close at coset {}", start + 1));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Group order by brute force: the largest degree at most `max_degree` that
// carries a regular permutation action satisfying the relators.

pub struct RegularSearch<'a> {
    rels: Vec<Vec<L>>,
    gens: usize,
    n: usize,
    fwd: Vec<Vec<Option<usize>>>,
    back: Vec<Vec<Option<usize>>>,
    used: usize,
    budget: &'a mut u64,
    pub exhausted_budget: bool,
}

impl<'a> RegularSearch<'a> {
    fn new(p: &Presentation, n: usize, budget: &'a mut u64) -> Self {
        let gens = p.generator_count();
        RegularSearch {
            rels: p.relators().iter().map(letters).collect(),
            gens,
            n,
            fwd: vec![vec![None; gens]; n],
            back: vec![vec![None; gens]; n],
            used: 1,
            budget,
            exhausted_budget: false,
        }
    }

    fn step(&self, x: usize, (g, inv): L) -> Option<usize> {
        if inv {
            self.back[x][g]
        } else {
            self.fwd[x][g]
        }
    }

    /// False if some relator provably fails to close at some point.
    fn consistent(&self) -> bool {
        for r in &self.rels {
            for start in 0..self.used {
                let mut x = Some(start);
                for &l in r {
                    x = x.and_then(|y| self.step(y, l));
                }
                if let Some(end) = x {
                    if end != start {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn is_regular(&self) -> bool {
        // The generated permutation group has exactly n elements.
        let perms: Vec<Vec<usize>> =
            (0..self.gens).map(|g| (0..self.n).map(|x| self.fwd[x][g].expect("complete")).collect()).collect();
        let mut elements: Vec<Vec<usize>> = vec![(0..self.n).collect()];
        let mut i = 0;
        while i < elements.len() {
            for p in &perms {
                let next: Vec<usize> = elements[i].iter().map(|&x| p[x]).collect();
                if !elements.contains(&next) {
                    elements.push(next);
                    if elements.len() > self.n {
                        return false;
                    }
                }
            }
            i += 1;
        }
        elements.len() == self.n
    }

    fn search(&mut self) -> bool {
        if *self.budget == 0 {
            self.exhausted_budget = true;
            return false;
        }
        *self.budget -= 1;
        // First undefined slot in canonical order: point, generator, direction.
        let slot = (0..self.used).find_map(|x| {
            (0..self.gens).find_map(|g| {
                if self.fwd[x][g].is_none() {
                    Some((x, g, false))
                } else if self.back[x][g].is_none() {
                    Some((x, g, true))
                } else {
                    None
                }
            })
        });
        let Some((x, g, inv)) = slot else {
            return self.used == self.n && self.is_regular();
        };
        let limit = if self.used < self.n { self.used + 1 } else { self.used };
        for y in 0..limit {
            let free = if inv { self.fwd[y][g].is_none() } else { self.back[y][g].is_none() };
            if !free {
                continue;
            }
            let fresh = y == self.used;
            if fresh {
                self.used += 1;
            }
            if inv {
                self.back[x][g] = Some(y);
                self.fwd[y][g] = Some(x);
            } else {
                self.fwd[x][g] = Some(y);
                self.back[y][g] = Some(x);
            }
            if self.consistent() && self.search() {
                return true;
            }
            if inv {
                self.back[x][g] = None;
                self.fwd[y][g] = None;
            } else {
                self.fwd[x][g] = None;
                self.back[y][g] = None;
            }
            if fresh {
                self.used -= 1;
            }
            if self.exhausted_budget {
                return false;
            }
        }
        false
    }
}

/// `Some(d)`: the largest `d <= max_degree` with a regular action; equals the
/// group order whenever that order is at most `max_degree`. `None` if the
/// node budget ran out first.
pub fn brute_force_order(p: &Presentation, max_degree: usize, budget: u64) -> Option<usize> {
    let mut budget = budget;
    for n in (1..=max_degree).rev() {
        if p.generator_count() == 0 {
            return Some(1);
        }
        let mut s = RegularSearch::new(p, n, &mut budget);
        if s.search() {
            return Some(n);
        }
        if s.exhausted_budget {
            return None;
        }
    }
    Some(1)
}

// ---------------------------------------------------------------------------
// Abelianization without a Smith form: rank over Q, and rank modulo every
// prime dividing one nonzero maximal minor.

fn exponent_rows(p: &Presentation) -> Vec<Vec<i128>> {
    p.relators()
        .iter()
        .map(|r| {
            let mut row = vec![0i128; p.generator_count()];
            for (g, inv) in letters(r) {
                row[g] += if inv { -1 } else { 1 };
            }
            row
        })
        .collect()
}

/// Rank over Q and the value of a nonzero maximal minor (Bareiss with pivoting).
fn rank_and_minor(mut a: Vec<Vec<i128>>, cols: usize) -> (usize, i128) {
    let rows = a.len();
    let mut prev = 1i128;
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = a[i][j].checked_mul(a[r][c]).unwrap() - a[i][c].checked_mul(a[r][j]).unwrap();
                assert_eq!(v % prev, 0, "Bareiss division must be exact");
                a[i][j] = v / prev;
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    (r, prev)
}

fn rank_mod(a: &[Vec<i128>], cols: usize, p: i128) -> usize {
    let mut a: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|v| v.rem_euclid(p)).collect()).collect();
    let pow = |mut b: i128, mut e: i128| {
        let mut acc = 1i128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = pow(a[r][c], p - 2);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let f = a[i][c] * inv % p;
                for j in 0..cols {
                    a[i][j] = (a[i][j] - f * a[r][j]).rem_euclid(p);
                }
            }
        }
        r += 1;
    }
    r
}

fn prime_factors(mut n: i128) -> Vec<i128> {
    n = n.abs();
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// (free rank, torsion is trivial).
pub fn abelian_oracle(p: &Presentation) -> (usize, bool) {
    let cols = p.generator_count();
    let rows = exponent_rows(p);
    let (rank, minor) = rank_and_minor(rows.clone(), cols);
    let torsion_free = rank == 0 || prime_factors(minor).into_iter().all(|q| rank_mod(&rows, cols, q) == rank);
    (cols - rank, torsion_free)
}

// ---------------------------------------------------------------------------

/// Homomorphisms into a permutation group by trying every assignment.
pub fn naive_hom_count(p: &Presentation, elements: &[Vec<usize>]) -> u64 {
    let n = p.generator_count();
    let degree = elements.first().map_or(0, Vec::len);
    let inverse = |x: &Vec<usize>| {
        let mut y = vec![0; x.len()];
        for (i, &t) in x.iter().enumerate() {
            y[t] = i;
        }
        y
    };
    let inverses: Vec<Vec<usize>> = elements.iter().map(inverse).collect();
    let rels: Vec<Vec<L>> = p.relators().iter().map(letters).collect();
    let mut choice = vec![0usize; n];
    let mut count = 0;
    loop {
        let ok = rels.iter().all(|r| {
            (0..degree).all(|pt| {
                // Apply letters right to left, matching composition (a*b)(x) = a(b(x)).
                let end = r.iter().rev().fold(pt, |x, &(g, inv)| {
                    let e = if inv { &inverses[choice[g]] } else { &elements[choice[g]] };
                    e[x]
                });
                end == pt
            })
        });
        if ok {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            choice[i] += 1;
            if choice[i] < elements.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
