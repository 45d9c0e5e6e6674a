//! Shared helpers for the integration suites: independent oracle
//! implementations (kept deliberately naive), a seeded random configuration
//! generator, and corpus loading.

// each integration test target compiles this module separately and uses a
// different subset of it
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plumbline::arrangement::LineConfiguration;
use plumbline::pipeline::{self, CorpusItem};

/// Characteristic polynomial coefficients (degree 3 down to 0) computed the
/// slow way: enumerate every subset of lines, close it under the incidence
/// structure, and run the generic Moebius recursion over the resulting poset
/// of closed sets ordered by inclusion. No closed-form identities are used,
/// so this is an independent route to the same numbers.
pub fn charpoly_by_poset_enumeration(config: &LineConfiguration) -> [i64; 4] {
    let n = config.n();
    assert!(
        n <= 16,
        "subset enumeration is exponential in the line count"
    );

    // which flat, if any, contains a given pair of lines
    let flats = config.l2_flats();
    let mut pair_flat: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (idx, f) in flats.iter().enumerate() {
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                pair_flat.insert((f[i], f[j]), idx);
            }
        }
    }

    // closure of a line set: the lines containing the common intersection
    let closure = |lines: &[usize]| -> (Vec<usize>, usize) {
        match lines.len() {
            0 => (Vec::new(), 0),
            1 => (lines.to_vec(), 1),
            _ => {
                let common = pair_flat.get(&(lines[0], lines[1])).copied();
                let all_in_one = common.is_some_and(|idx| {
                    let f: BTreeSet<usize> = flats[idx].iter().copied().collect();
                    lines.iter().all(|l| f.contains(l))
                });
                if all_in_one {
                    (flats[common.expect("checked")].clone(), 2)
                } else {
                    // the common intersection is the cone point: every line
                    ((1..=n).collect(), 3)
                }
            }
        }
    };

    // enumerate distinct closed sets with their ranks
    let mut closed: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let lines: Vec<usize> = (1..=n).filter(|l| mask & (1 << (l - 1)) != 0).collect();
        let (cl, rank) = closure(&lines);
        closed.insert((rank, cl));
    }

    // generic Moebius recursion over inclusion, smallest rank first
    let elements: Vec<(usize, Vec<usize>)> = closed.into_iter().collect();
    let mut mu = vec![0i64; elements.len()];
    for i in 0..elements.len() {
        let mut below = 0i64;
        for j in 0..i {
            let (rj, ej) = &elements[j];
            let (ri, ei) = &elements[i];
            let subset = rj < ri && ej.iter().all(|l| ei.contains(l));
            if subset {
                below += mu[j];
            }
        }
        mu[i] = if elements[i].0 == 0 { 1 } else { -below };
    }

    let mut coeffs = [0i64; 4];
    for (i, (rank, _)) in elements.iter().enumerate() {
        coeffs[*rank] += mu[i];
    }
    coeffs
}

fn bigint_det(m: &[Vec<BigInt>]) -> BigInt {
    let k = m.len();
    if k == 0 {
        return BigInt::from(1);
    }
    if k == 1 {
        return m[0][0].clone();
    }
    // Laplace expansion along the first row; fine for the tiny matrices the
    // oracle is used on
    let mut det = BigInt::zero();
    for (c, head) in m[0].iter().enumerate() {
        if head.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = head * bigint_det(&minor);
        if c % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Invariant factors (including trivial ones) and rank, computed via
/// determinantal divisors: the k-th divisor is the gcd of all k-by-k minors,
/// and the k-th invariant factor is the ratio of consecutive divisors. An
/// independent check of the Smith-form elimination.
pub fn invariant_factors_by_minor_gcd(rows: &[Vec<i64>]) -> (usize, Vec<BigInt>) {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let max_k = r.min(c);
    let mut divisors = vec![BigInt::from(1)];
    for k in 1..=max_k {
        let mut g = BigInt::zero();
        for rsel in combinations(r, k) {
            for csel in combinations(c, k) {
                let sub: Vec<Vec<BigInt>> = rsel
                    .iter()
                    .map(|&i| csel.iter().map(|&j| m[i][j].clone()).collect())
                    .collect();
                let d = bigint_det(&sub);
                g = num_integer::gcd(g, d.abs());
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(g);
    }
    let rank = divisors.len() - 1;
    let factors: Vec<BigInt> = (1..=rank)
        .map(|k| &divisors[k] / &divisors[k - 1])
        .collect();
    (rank, factors)
}

/// A valid configuration grown greedily from a seed: flats are added one at
/// a time, each sharing at most one line with every previous flat.
pub fn random_configuration(n: usize, seed: u64) -> LineConfiguration {
    assert!(n >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
    let attempts = rng.random_range(0..=n);
    let mut flats: Vec<Vec<usize>> = Vec::new();
    for _ in 0..attempts {
        let size = rng.random_range(3..=n.min(6));
        let mut lines: Vec<usize> = (1..=n).collect();
        lines.shuffle(&mut rng);
        let candidate: Vec<usize> = {
            let mut c = lines[..size].to_vec();
            c.sort_unstable();
            c
        };
        let compatible = flats
            .iter()
            .all(|f| candidate.iter().filter(|l| f.contains(l)).count() <= 1);
        if compatible {
            flats.push(candidate);
        }
    }
    LineConfiguration::new(n, flats).expect("greedy growth keeps the flat list valid")
}

/// Path of the shared example corpus.
pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Every corpus entry, with annotations parsed.
pub fn load_corpus() -> Vec<CorpusItem> {
    let items = pipeline::load_corpus_dir(&corpus_dir()).expect("corpus loads");
    assert!(!items.is_empty(), "corpus must not be empty");
    items
}
