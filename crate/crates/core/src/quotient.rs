//! Homomorphism counts into small permutation groups.
//!
//! Two presentations of isomorphic groups admit the same number of
//! homomorphisms onto any fixed finite group, so these counts are a cheap
//! invariant for comparing presentations that coset enumeration cannot finish.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::presentation::Presentation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("malformed cycle notation: {0}")]
    Syntax(String),
    #[error("point {point} repeated in `{cycle}`")]
    RepeatedPoint { point: usize, cycle: String },
    #[error("group would exceed {0} elements")]
    TooLarge(usize),
}

/// A permutation of `0..n`, stored as the image list.
pub type Perm = Vec<usize>;

/// Parses cycle notation on points `1..=degree`, e.g. `(1 2)(3 4 5)`.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm, QuotientError> {
    let mut perm: Perm = (0..degree).collect();
    let mut rest = text.trim();
    if rest == "()" || rest.is_empty() {
        return Ok(perm);
    }
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .and_then(|r| r.split_once(')'))
            .ok_or_else(|| QuotientError::Syntax(text.to_string()))?;
        let points: Vec<usize> = body
            .0
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().ok().filter(|&p| p >= 1 && p <= degree).map(|p| p - 1))
            .collect::<Option<_>>()
            .ok_or_else(|| QuotientError::Syntax(text.to_string()))?;
        for (i, &p) in points.iter().enumerate() {
            if points[..i].contains(&p) || perm[p] != p {
                return Err(QuotientError::RepeatedPoint { point: p + 1, cycle: text.to_string() });
            }
        }
        for (i, &p) in points.iter().enumerate() {
            perm[p] = points[(i + 1) % points.len()];
        }
        rest = body.1.trim_start();
    }
    Ok(perm)
}

/// A finite permutation group with a full multiplication table.
#[derive(Debug, Clone)]
pub struct PermGroup {
    name: String,
    elements: Vec<Perm>,
    /// `table[i * n + j]` is the index of `elements[i] * elements[j]`
    /// (apply `j` first).
    table: Vec<usize>,
    inverse: Vec<usize>,
}

pub const MAX_GROUP_ORDER: usize = 5040;

impl PermGroup {
    pub fn generated_by(name: &str, degree: usize, generators: &[Perm]) -> Result<Self, QuotientError> {
        let identity: Perm = (0..degree).collect();
        let mut elements = vec![identity];
        let mut index: HashMap<Perm, usize> = HashMap::from([(elements[0].clone(), 0)]);
        let mut i = 0;
        while i < elements.len() {
            for g in generators {
                let next = compose(&elements[i], g);
                if !index.contains_key(&next) {
                    if elements.len() == MAX_GROUP_ORDER {
                        return Err(QuotientError::TooLarge(MAX_GROUP_ORDER));
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
            i += 1;
        }
        let n = elements.len();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = index[&compose(&elements[a], &elements[b])];
            }
        }
        let inverse = (0..n).map(|a| (0..n).find(|&b| table[a * n + b] == 0).expect("finite group")).collect();
        Ok(PermGroup { name: name.to_string(), elements, table, inverse })
    }

    /// `"NAME = CYCLES, CYCLES, ..."`, degree taken from the largest point.
    pub fn from_line(line: &str) -> Result<Self, QuotientError> {
        let (name, gens) = line.split_once('=').ok_or_else(|| QuotientError::Syntax(line.to_string()))?;
        let gens: Vec<&str> = gens.split("),").map(str::trim).filter(|s| !s.is_empty()).collect();
        let gens: Vec<String> = gens.iter().map(|g| if g.ends_with(')') { g.to_string() } else { format!("{g})") }).collect();
        let degree = gens
            .iter()
            .flat_map(|g| g.split(|c: char| !c.is_ascii_digit()))
            .filter_map(|s| s.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        let perms = gens.iter().map(|g| parse_cycles(g, degree)).collect::<Result<Vec<_>, _>>()?;
        Self::generated_by(name.trim(), degree, &perms)
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut t: Perm = (0..n).collect();
            t.swap(0, 1);
            gens.push(t);
            gens.push((0..n).map(|i| (i + 1) % n).collect());
        }
        Self::generated_by(&format!("S{n}"), n, &gens).expect("small symmetric group")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }
}

impl fmt::Display for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order())
    }
}

/// `(a * b)(x) = a(b(x))`.
fn compose(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&x| a[x]).collect()
}

/// How a relator constrains the generator assigned at some depth.
enum Check {
    /// Every generator is assigned; the relator must evaluate to 1.
    Closed(usize),
    /// The generator occurs once, as `u g^sign v`; its image is forced.
    Forces { relator: usize, position: usize },
}

/// Number of homomorphisms from the presented group to `group`.
///
/// Generators are assigned greedily in the order that closes the most
/// relators soonest. A relator in which the next generator occurs exactly once
/// and every other generator is already assigned fixes that generator's image
/// outright, which keeps the search small even for many-generator
/// presentations of groups with few quotients.
pub fn count_homomorphisms(p: &Presentation, group: &PermGroup) -> u64 {
    let n = p.generator_count();
    let gens_of: Vec<Vec<usize>> = p
        .relators()
        .iter()
        .map(|r| {
            let mut g: Vec<usize> = r.letters().iter().map(|l| l.generator).collect();
            g.sort_unstable();
            g.dedup();
            g
        })
        .collect();

    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for _ in 0..n {
        let score = |g: usize| {
            let closes = gens_of.iter().filter(|gs| gs.contains(&g) && gs.iter().all(|&h| h == g || placed[h])).count();
            let touches = gens_of.iter().filter(|gs| gs.contains(&g)).count();
            (closes, touches)
        };
        let best = (0..n)
            .filter(|&g| !placed[g])
            .max_by(|&x, &y| score(x).cmp(&score(y)).then(y.cmp(&x)))
            .expect("an unplaced generator remains");
        placed[best] = true;
        order.push(best);
    }

    let mut depth_of = vec![0; n];
    for (d, &g) in order.iter().enumerate() {
        depth_of[g] = d;
    }
    let mut checks: Vec<Vec<Check>> = (0..n).map(|_| Vec::new()).collect();
    for (i, gs) in gens_of.iter().enumerate() {
        let Some(&last) = gs.iter().max_by_key(|&&g| depth_of[g]) else { continue };
        let letters = p.relators()[i].letters();
        let once = letters.iter().filter(|l| l.generator == last).count() == 1;
        if once {
            let position = letters.iter().position(|l| l.generator == last).expect("occurs once");
            checks[depth_of[last]].insert(0, Check::Forces { relator: i, position });
        } else {
            checks[depth_of[last]].push(Check::Closed(i));
        }
    }

    let mut search = Search { p, group, order: &order, checks: &checks, images: vec![0; n], count: 0 };
    search.go(0);
    search.count
}

struct Search<'a> {
    p: &'a Presentation,
    group: &'a PermGroup,
    order: &'a [usize],
    checks: &'a [Vec<Check>],
    images: Vec<usize>,
    count: u64,
}

impl Search<'_> {
    fn eval(&self, letters: &[crate::word::Letter]) -> usize {
        letters.iter().fold(0, |x, l| {
            let y = self.images[l.generator];
            self.group.mul(x, if l.inverted { self.group.inv(y) } else { y })
        })
    }

    fn go(&mut self, depth: usize) {
        if depth == self.order.len() {
            self.count += 1;
            return;
        }
        let g = self.order[depth];
        let forced = self.checks[depth].iter().find_map(|c| match c {
            Check::Forces { relator, position } => {
                let letters = self.p.relators()[*relator].letters();
                let u = self.eval(&letters[..*position]);
                let v = self.eval(&letters[position + 1..]);
                // u g^s v = 1 gives g^s = u^-1 v^-1.
                let x = self.group.mul(self.group.inv(u), self.group.inv(v));
                Some(if letters[*position].inverted { self.group.inv(x) } else { x })
            }
            Check::Closed(_) => None,
        });
        let candidates = match forced {
            Some(x) => x..x + 1,
            None => 0..self.group.order(),
        };
        for e in candidates {
            self.images[g] = e;
            let ok = self.checks[depth].iter().all(|c| match c {
                Check::Closed(r) | Check::Forces { relator: r, .. } => self.eval(self.p.relators()[*r].letters()) == 0,
            });
            if ok {
                self.go(depth + 1);
            }
        }
    }
}
