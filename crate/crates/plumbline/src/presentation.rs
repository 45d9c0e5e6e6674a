//! Finite group presentations: words over signed generators, free and cyclic
//! reduction, abelianization, and Tietze simplification that eliminates
//! generators occurring exactly once in some relator.

use crate::snf::IntMatrix;
use std::collections::BTreeSet;
use std::fmt::Write as _;

/// One letter of a word: a generator index with an orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    #[must_use]
    pub fn pos(gen: usize) -> Self {
        Letter { gen, inv: false }
    }

    #[must_use]
    pub fn neg(gen: usize) -> Self {
        Letter { gen, inv: true }
    }

    #[must_use]
    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }
}

pub type Word = Vec<Letter>;

/// Cancel adjacent inverse pairs until none remain.
#[must_use]
pub fn free_reduce(word: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free reduction followed by trimming conjugating ends, so the result is the
/// shortest word in the cyclic class.
#[must_use]
pub fn cyclic_reduce(word: &[Letter]) -> Word {
    let mut w = free_reduce(word);
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    w.truncate(hi);
    w.drain(..lo);
    w
}

#[must_use]
pub fn invert_word(word: &[Letter]) -> Word {
    word.iter().rev().map(|l| l.inverse()).collect()
}

/// Canonical representative of a relator up to rotation and inversion, used
/// to drop duplicates.
#[must_use]
fn cyclic_key(word: &[Letter]) -> Word {
    let mut best: Option<Word> = None;
    for w in [word.to_vec(), invert_word(word)] {
        for r in 0..w.len().max(1) {
            let mut rot = w.clone();
            rot.rotate_left(r % w.len().max(1));
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// What a generator stands for, so later stages can target or protect
/// specific families without string matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// Fiber class over a line vertex (original line label).
    LineFiber(usize),
    /// Fiber class over a point vertex (point index).
    PointFiber(usize),
    /// Loop dual to a non-tree edge (edge index).
    EdgeCurve(usize),
    /// Generator of a finite-index subgroup: coset number and the generator
    /// of the base it rewrites.
    Schreier { coset: usize, base: usize },
    /// No structural meaning recorded.
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub kind: GenKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub gens: Vec<Generator>,
    pub rels: Vec<Word>,
}

/// Caps keeping simplification from inflating relators.
#[derive(Clone, Copy, Debug)]
pub struct SimplifyOptions {
    /// Skip an elimination if any rewritten relator would exceed this length.
    pub max_relator_len: usize,
    /// Maximum number of eliminations.
    pub max_rounds: usize,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        SimplifyOptions {
            max_relator_len: 512,
            max_rounds: usize::MAX,
        }
    }
}

impl GroupPresentation {
    #[must_use]
    pub fn new(gens: Vec<Generator>, rels: Vec<Word>) -> Self {
        GroupPresentation { gens, rels }
    }

    /// `1 - #generators + #relators`, the presentation's deficiency count.
    #[must_use]
    pub fn euler(&self) -> i64 {
        1 - self.gens.len() as i64 + self.rels.len() as i64
    }

    #[must_use]
    pub fn total_relator_length(&self) -> usize {
        self.rels.iter().map(Vec::len).sum()
    }

    /// Cyclically reduce all relators, drop empty ones, and drop relators
    /// equal to an earlier one up to rotation and inversion.
    pub fn reduce(&mut self) {
        let mut seen: BTreeSet<Word> = BTreeSet::new();
        let mut kept = Vec::with_capacity(self.rels.len());
        for r in &self.rels {
            let w = cyclic_reduce(r);
            if w.is_empty() {
                continue;
            }
            if seen.insert(cyclic_key(&w)) {
                kept.push(w);
            }
        }
        self.rels = kept;
    }

    /// Exponent-sum matrix: one row per relator, one column per generator.
    #[must_use]
    pub fn abelianization_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.rels.len(), self.gens.len());
        for (i, r) in self.rels.iter().enumerate() {
            for l in r {
                m.add_to(i, l.gen, if l.inv { -1 } else { 1 });
            }
        }
        m
    }

    /// Eliminate unprotected generators that occur exactly once in some
    /// relator, substituting them away. Returns, for each old generator
    /// index, its new index or `None` if it was eliminated. The group is
    /// unchanged; free factors (generators in no relator) are kept.
    pub fn simplify<F>(&mut self, protect: F, opts: &SimplifyOptions) -> Vec<Option<usize>>
    where
        F: Fn(&Generator) -> bool,
    {
        self.reduce();
        let mut alive: Vec<bool> = vec![true; self.gens.len()];
        let mut rounds = 0;
        while rounds < opts.max_rounds {
            let Some((ri, g)) = self.pick_elimination(&alive, &protect, opts) else {
                break;
            };
            self.eliminate(ri, g);
            alive[g] = false;
            rounds += 1;
        }
        // compact the generator list
        let mut gen_map = vec![None; self.gens.len()];
        let mut next = 0;
        for (i, &a) in alive.iter().enumerate() {
            if a {
                gen_map[i] = Some(next);
                next += 1;
            }
        }
        self.gens = self
            .gens
            .iter()
            .enumerate()
            .filter(|&(i, _)| alive[i])
            .map(|(_, g)| g.clone())
            .collect();
        for r in &mut self.rels {
            for l in r.iter_mut() {
                l.gen = gen_map[l.gen].expect("eliminated generator left in a relator");
            }
        }
        gen_map
    }

    /// Find the cheapest (relator, generator) elimination candidate.
    fn pick_elimination<F>(
        &self,
        alive: &[bool],
        protect: &F,
        opts: &SimplifyOptions,
    ) -> Option<(usize, usize)>
    where
        F: Fn(&Generator) -> bool,
    {
        let mut best: Option<(usize, (usize, usize))> = None; // cost, candidate
        for (ri, r) in self.rels.iter().enumerate() {
            for &g in r.iter().map(|l| l.gen).collect::<BTreeSet<_>>().iter() {
                if !alive[g] || protect(&self.gens[g]) {
                    continue;
                }
                if r.iter().filter(|l| l.gen == g).count() != 1 {
                    continue;
                }
                let rep_len = r.len() - 1;
                let mut cost = 0usize;
                let mut fits = true;
                for (rj, other) in self.rels.iter().enumerate() {
                    if rj == ri {
                        continue;
                    }
                    let occ = other.iter().filter(|l| l.gen == g).count();
                    if occ == 0 {
                        continue;
                    }
                    cost += occ * rep_len;
                    if other.len() + occ * rep_len.saturating_sub(1) > opts.max_relator_len {
                        fits = false;
                        break;
                    }
                }
                if !fits {
                    continue;
                }
                if best.as_ref().is_none_or(|&(c, _)| cost < c) {
                    best = Some((cost, (ri, g)));
                }
            }
        }
        best.map(|(_, cand)| cand)
    }

    /// Remove relator `ri`, solving it for `g` and substituting everywhere.
    fn eliminate(&mut self, ri: usize, g: usize) {
        let mut r = self.rels.remove(ri);
        let at = r.iter().position(|l| l.gen == g).expect("occurrence");
        r.rotate_left(at + 1); // now r = w * g^e cyclically, with g^e last
        let e_inv = r.pop().expect("nonempty").inv;
        // g^e = w^-1, so g = w^-1 when e is +1, and g = w when e is -1
        let replacement: Word = if e_inv { r } else { invert_word(&r) };
        let rep_inverse = invert_word(&replacement);
        for rel in &mut self.rels {
            if rel.iter().all(|l| l.gen != g) {
                continue;
            }
            let mut out: Word = Vec::with_capacity(rel.len());
            for &l in rel.iter() {
                if l.gen == g {
                    out.extend_from_slice(if l.inv { &rep_inverse } else { &replacement });
                } else {
                    out.push(l);
                }
            }
            *rel = out;
        }
        self.reduce();
    }

    /// Plain-text form: one `gen` line per generator, one `rel` line per
    /// relator with `^-1` marking inverted letters.
    #[must_use]
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gens {
            let _ = writeln!(s, "gen {}", g.label);
        }
        for r in &self.rels {
            let mut line = String::from("rel");
            for l in r {
                let _ = write!(
                    line,
                    " {}{}",
                    self.gens[l.gen].label,
                    if l.inv { "^-1" } else { "" }
                );
            }
            let _ = writeln!(s, "{line}");
        }
        s
    }

    /// Parse the `to_text` format. Generator kinds are not recorded in the
    /// text and come back as `Other`.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut gens: Vec<Generator> = Vec::new();
        let mut index = std::collections::BTreeMap::new();
        let mut rels = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("gen") => {
                    let label = parts
                        .next()
                        .ok_or_else(|| format!("line {}: gen needs a label", ln + 1))?
                        .to_string();
                    if parts.next().is_some() {
                        return Err(format!("line {}: gen takes one label", ln + 1));
                    }
                    if index.insert(label.clone(), gens.len()).is_some() {
                        return Err(format!("line {}: duplicate generator {label}", ln + 1));
                    }
                    gens.push(Generator {
                        label,
                        kind: GenKind::Other,
                    });
                }
                Some("rel") => {
                    let mut word = Word::new();
                    for tok in parts {
                        let (name, inv) = match tok.strip_suffix("^-1") {
                            Some(n) => (n, true),
                            None => (tok, false),
                        };
                        let &g = index
                            .get(name)
                            .ok_or_else(|| format!("line {}: unknown generator {name}", ln + 1))?;
                        word.push(Letter { gen: g, inv });
                    }
                    rels.push(word);
                }
                Some(k) => return Err(format!("line {}: unknown keyword {k}", ln + 1)),
                None => {}
            }
        }
        Ok(GroupPresentation { gens, rels })
    }
}
