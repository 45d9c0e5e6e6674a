//! Finite cyclic covers of a presented group: subgroup presentations by
//! coset rewriting, their first homology, and statistics along the tower of
//! covers of two-power degree.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::boundary::CharacterMap;
use crate::presentation::{GenKind, Generator, GroupPresentation, Letter, Word};
use crate::snf::smith_normal_form;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("cover degree {degree} does not divide the character modulus {modulus}")]
    BadDivisor { degree: u64, modulus: u64 },
    #[error("character is not onto the integers modulo {degree}")]
    NotSurjective { degree: u64 },
    #[error("no generator maps to 1 modulo {degree}, so no cyclic transversal exists")]
    NoUnitGenerator { degree: u64 },
    #[error("tower statistics need a two-power modulus, got {modulus}")]
    ModulusNotPowerOfTwo { modulus: u64 },
    #[error("character lists {got} values for {expected} generators")]
    LengthMismatch { expected: usize, got: usize },
}

/// A finitely generated abelian group: free rank plus invariant factors in a
/// divisibility chain (each > 1, each dividing the next).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroupDesc {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

impl AbelianGroupDesc {
    #[must_use]
    pub fn free(rank: usize) -> Self {
        AbelianGroupDesc {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Rank of the free part (the rational first Betti number when this
    /// describes a first homology group).
    #[must_use]
    pub fn b1(&self) -> usize {
        self.free_rank
    }

    /// Number of invariant factors of even order.
    #[must_use]
    pub fn even_torsion_count(&self) -> usize {
        self.torsion.iter().filter(|t| t.is_even()).count()
    }

    /// Dimension over the two-element field of (group tensor Z/2):
    /// free rank plus the number of even invariant factors.
    #[must_use]
    pub fn mod2_rank(&self) -> usize {
        self.free_rank + self.even_torsion_count()
    }

    /// True when the torsion subgroup is `(Z/d)^e` exactly.
    #[must_use]
    pub fn torsion_is_power_of(&self, d: u64, e: usize) -> bool {
        self.torsion.len() == e && self.torsion.iter().all(|t| t.to_u64() == Some(d))
    }
}

impl fmt::Display for AbelianGroupDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let mut j = i;
            while j < self.torsion.len() && self.torsion[j] == self.torsion[i] {
                j += 1;
            }
            let (d, e) = (&self.torsion[i], j - i);
            if e == 1 {
                parts.push(format!("Z_{d}"));
            } else {
                parts.push(format!("(Z_{d})^{e}"));
            }
            i = j;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Present the kernel of (character mod `degree`) by coset rewriting.
///
/// The transversal is the powers of a generator mapping to 1. Writing `g` for
/// the base generator count and `r` for its relator count, the result has
/// `degree * g - (degree - 1)` generators and `degree * r` relators before
/// reduction, since the rewrites of the transversal generator at all but the
/// last coset are freely trivial and are omitted.
pub fn reidemeister_schreier(
    pres: &GroupPresentation,
    character: &CharacterMap,
    degree: u64,
) -> Result<GroupPresentation, CoverError> {
    if character.values.len() != pres.gens.len() {
        return Err(CoverError::LengthMismatch {
            expected: pres.gens.len(),
            got: character.values.len(),
        });
    }
    let reduced = character.reduce_mod(degree).ok_or(CoverError::BadDivisor {
        degree,
        modulus: character.modulus,
    })?;
    let d = degree as usize;
    let surjective = {
        let mut g = degree;
        for &v in &reduced.values {
            g = num_integer::gcd(g, v);
        }
        g == 1 || degree == 1
    };
    if !surjective {
        return Err(CoverError::NotSurjective { degree });
    }
    let t = reduced
        .values
        .iter()
        .position(|&v| v == 1 % degree)
        .ok_or(CoverError::NoUnitGenerator { degree })?;

    // generator (coset k, base g), omitting the freely trivial (k, t) for
    // k < d - 1
    let mut index = vec![vec![usize::MAX; pres.gens.len()]; d];
    let mut gens: Vec<Generator> = Vec::new();
    for (k, row) in index.iter_mut().enumerate() {
        for (g, base) in pres.gens.iter().enumerate() {
            if g == t && k < d - 1 {
                continue;
            }
            row[g] = gens.len();
            gens.push(Generator {
                label: format!("{}@{k}", base.label),
                kind: GenKind::Schreier { coset: k, base: g },
            });
        }
    }

    let mut rels: Vec<Word> = Vec::with_capacity(d * pres.rels.len());
    for r in &pres.rels {
        for k in 0..d {
            let mut word: Word = Vec::with_capacity(r.len());
            let mut c = k;
            for l in r {
                let shift = reduced.values[l.gen] as usize;
                if l.inv {
                    c = (c + d - shift % d) % d;
                    if !(l.gen == t && c < d - 1) {
                        word.push(Letter::neg(index[c][l.gen]));
                    }
                } else {
                    if !(l.gen == t && c < d - 1) {
                        word.push(Letter::pos(index[c][l.gen]));
                    }
                    c = (c + shift) % d;
                }
            }
            debug_assert_eq!(c, k, "relator must return to its starting coset");
            rels.push(word);
        }
    }
    Ok(GroupPresentation::new(gens, rels))
}

/// First homology of the degree-`d` cyclic cover classified by the
/// character: rewrite, simplify with the given caps, abelianize, and read
/// off the Smith form.
pub fn h1_cover(
    pres: &GroupPresentation,
    character: &CharacterMap,
    degree: u64,
    opts: &crate::presentation::SimplifyOptions,
) -> Result<AbelianGroupDesc, CoverError> {
    let mut cover = reidemeister_schreier(pres, character, degree)?;
    cover.simplify(|_| false, opts);
    let (free_rank, torsion) = smith_normal_form(&cover.abelianization_matrix()).cokernel();
    Ok(AbelianGroupDesc { free_rank, torsion })
}

/// Homology of one level of the two-power tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerLevel {
    /// Level number; the cover degree is two to this power.
    pub k: u32,
    pub degree: u64,
    pub homology: AbelianGroupDesc,
}

/// Cover homology along degrees 1, 2, 4, ..., modulus, with the increments
/// that the rank and torsion comparisons read off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerStats {
    pub levels: Vec<TowerLevel>,
    /// `alpha[k]` = mod-2 rank at level k+1 minus rational rank at level k.
    pub alpha: Vec<i64>,
    /// `rho[k]` = rational rank at level k+1 minus rational rank at level k.
    pub rho: Vec<i64>,
    /// `tau[k]` = number of even invariant factors at level k.
    pub tau: Vec<usize>,
}

/// Compute the whole tower for a character whose modulus is a power of two.
pub fn tower_stats(
    pres: &GroupPresentation,
    character: &CharacterMap,
    opts: &crate::presentation::SimplifyOptions,
) -> Result<TowerStats, CoverError> {
    let modulus = character.modulus;
    if modulus == 0 || !modulus.is_power_of_two() {
        return Err(CoverError::ModulusNotPowerOfTwo { modulus });
    }
    let m = modulus.trailing_zeros();
    let mut levels = Vec::with_capacity(m as usize + 1);
    for k in 0..=m {
        let degree = 1u64 << k;
        let homology = h1_cover(pres, character, degree, opts)?;
        levels.push(TowerLevel {
            k,
            degree,
            homology,
        });
    }
    let alpha = (0..m as usize)
        .map(|k| levels[k + 1].homology.mod2_rank() as i64 - levels[k].homology.b1() as i64)
        .collect();
    let rho = (0..m as usize)
        .map(|k| levels[k + 1].homology.b1() as i64 - levels[k].homology.b1() as i64)
        .collect();
    let tau = levels
        .iter()
        .map(|l| l.homology.even_torsion_count())
        .collect();
    Ok(TowerStats {
        levels,
        alpha,
        rho,
        tau,
    })
}
