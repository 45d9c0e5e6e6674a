//! The Orlik-Solomon algebra of a deconed arrangement over GF(2), its
//! square-zero double, and cohomology of multiplication complexes.
//!
//! Removing one line turns the projective picture into an affine one: the
//! remaining lines either meet at affine points (flats avoiding the pivot) or
//! become parallel (flats through it). The graded algebra `A` built from that
//! data has dimensions `1, n-1, sum over affine points of (multiplicity - 1)`
//! and carries the cup product of the projective complement with mod-2
//! coefficients. The double `D(A) = A + dual(A)` is a graded algebra modeling
//! the cochain ring of the boundary manifold; for a degree-one element `u`
//! every complex `(D(A), u)` has square zero, and the dimension of its first
//! cohomology bounds (and for the all-ones element computes) the extra mod-2
//! homology of the associated double cover.

use crate::arrangement::LineConfiguration;
use crate::gf2::{BitMatrix, BitVec};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Os2Error {
    #[error("need at least three lines, got {n}")]
    DegenerateArrangement { n: usize },
    #[error("the all-ones element needs an even line count, got {n}")]
    OddLineCount { n: usize },
    #[error("pivot line {pivot} is not one of the {n} lines")]
    NoSuchLine { pivot: usize, n: usize },
    #[error("element has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the degree-one component of the element is zero")]
    ZeroFirstComponent,
}

/// Affine picture after removing the pivot line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeconedConfiguration {
    pub pivot: usize,
    /// Original labels of the surviving lines, ascending; these index the
    /// degree-one basis.
    pub affine_lines: Vec<usize>,
    /// Flats avoiding the pivot, including implicit doubles.
    pub affine_points: Vec<Vec<usize>>,
    /// Flats through the pivot, pivot removed; singletons allowed.
    pub parallel_classes: Vec<Vec<usize>>,
}

pub fn decone(config: &LineConfiguration, pivot: usize) -> Result<DeconedConfiguration, Os2Error> {
    let n = config.n();
    if n <= 2 {
        return Err(Os2Error::DegenerateArrangement { n });
    }
    if pivot == 0 || pivot > n {
        return Err(Os2Error::NoSuchLine { pivot, n });
    }
    let mut affine_points = Vec::new();
    let mut parallel_classes = Vec::new();
    for f in config.l2_flats() {
        if f.contains(&pivot) {
            parallel_classes.push(f.into_iter().filter(|&l| l != pivot).collect());
        } else {
            affine_points.push(f);
        }
    }
    affine_points.sort();
    parallel_classes.sort();
    Ok(DeconedConfiguration {
        pivot,
        affine_lines: (1..=n).filter(|&l| l != pivot).collect(),
        affine_points,
        parallel_classes,
    })
}

/// Where a pair of affine lines meets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairLocus {
    Parallel,
    Point(usize),
}

/// The graded algebra in degrees 0..2 with its structure constants.
/// Degree-two basis elements are indexed by pairs (minimal line of a point,
/// any other line of that point), ordered lexicographically.
#[derive(Clone, Debug)]
pub struct GradedAlgebraMod2 {
    pub decone: DeconedConfiguration,
    /// Basis of degree two: (affine point index, second line label); the
    /// first line is the point's minimal one.
    pub basis2: Vec<(usize, usize)>,
    /// products[i][j] = e_i * e_j in degree-two coordinates, i and j being
    /// positions into `affine_lines`.
    products: Vec<Vec<BitVec>>,
}

impl GradedAlgebraMod2 {
    #[must_use]
    pub fn dim1(&self) -> usize {
        self.decone.affine_lines.len()
    }

    #[must_use]
    pub fn dim2(&self) -> usize {
        self.basis2.len()
    }

    /// Euler characteristic `1 - dim1 + dim2` of the graded vector space;
    /// equals the Euler characteristic of the projective complement.
    #[must_use]
    pub fn beta(&self) -> i64 {
        1 - self.dim1() as i64 + self.dim2() as i64
    }

    #[must_use]
    pub fn product(&self, i: usize, j: usize) -> &BitVec {
        &self.products[i][j]
    }

    /// Cup product of two degree-one vectors.
    pub fn cup(&self, x: &BitVec, y: &BitVec) -> Result<BitVec, Os2Error> {
        check_len(x, self.dim1())?;
        check_len(y, self.dim1())?;
        let mut out = BitVec::zeros(self.dim2());
        for i in x.support() {
            for j in y.support() {
                if i != j {
                    out.xor_assign(&self.products[i][j]);
                }
            }
        }
        Ok(out)
    }
}

fn check_len(v: &BitVec, expected: usize) -> Result<(), Os2Error> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Os2Error::DimensionMismatch {
            expected,
            got: v.len(),
        })
    }
}

pub fn build_os2(decone: &DeconedConfiguration) -> GradedAlgebraMod2 {
    let lines = &decone.affine_lines;
    let pos: BTreeMap<usize, usize> = lines.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let m = lines.len();

    // locate every unordered pair: at an affine point or parallel
    let mut locus: BTreeMap<(usize, usize), PairLocus> = BTreeMap::new();
    for (q, f) in decone.affine_points.iter().enumerate() {
        for a in 0..f.len() {
            for b in a + 1..f.len() {
                let prev = locus.insert((f[a], f[b]), PairLocus::Point(q));
                debug_assert!(prev.is_none(), "pair in two loci");
            }
        }
    }
    for c in &decone.parallel_classes {
        for a in 0..c.len() {
            for b in a + 1..c.len() {
                let prev = locus.insert((c[a], c[b]), PairLocus::Parallel);
                debug_assert!(prev.is_none(), "pair in two loci");
            }
        }
    }
    debug_assert_eq!(locus.len(), m * (m - 1) / 2, "every pair located once");

    // degree-two basis: (min line of point, other line), lexicographic
    let mut basis2: Vec<(usize, usize)> = Vec::new();
    for (q, f) in decone.affine_points.iter().enumerate() {
        for &b in &f[1..] {
            basis2.push((q, b));
        }
    }
    basis2.sort_by_key(|&(q, b)| (decone.affine_points[q][0], b));
    let index2: BTreeMap<(usize, usize), usize> = basis2
        .iter()
        .enumerate()
        .map(|(k, &(q, b))| ((decone.affine_points[q][0], b), k))
        .collect();

    let dim2 = basis2.len();
    let mut products = vec![vec![BitVec::zeros(dim2); m]; m];
    for (&(a, b), &l) in &locus {
        let PairLocus::Point(q) = l else { continue };
        let min = decone.affine_points[q][0];
        let mut v = BitVec::zeros(dim2);
        if a == min {
            v.set(index2[&(min, b)], true);
        } else {
            // straighten e_a e_b into e_min e_a + e_min e_b
            v.set(index2[&(min, a)], true);
            v.set(index2[&(min, b)], true);
        }
        products[pos[&a]][pos[&b]] = v.clone();
        products[pos[&b]][pos[&a]] = v;
    }

    GradedAlgebraMod2 {
        decone: decone.clone(),
        basis2,
        products,
    }
}

/// The double `D(A)`: degree k holds `A^k + dual(A)^(3-k)`, multiplied by
/// `(x, f)(y, g) = (xy, xg + fy)` with the two module actions of `A` on its
/// dual. Every degree-one element squares to zero.
#[derive(Clone, Debug)]
pub struct DoubleAlgebraMod2 {
    pub base: GradedAlgebraMod2,
}

/// Element of the degree-one part of the double: `a` in degree one of the
/// algebra, `b` a functional on degree two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D1Element {
    pub a: BitVec,
    pub b: BitVec,
}

impl D1Element {
    /// (a, 0) with the given degree-one part.
    #[must_use]
    pub fn from_degree_one(alg: &GradedAlgebraMod2, a: BitVec) -> Self {
        D1Element {
            a,
            b: BitVec::zeros(alg.dim2()),
        }
    }
}

pub fn double(base: GradedAlgebraMod2) -> DoubleAlgebraMod2 {
    DoubleAlgebraMod2 { base }
}

impl DoubleAlgebraMod2 {
    /// Dimensions of degrees 0..3: `1, m1+m2, m2+m1, 1`.
    #[must_use]
    pub fn dims(&self) -> [usize; 4] {
        let m1 = self.base.dim1();
        let m2 = self.base.dim2();
        [1, m1 + m2, m2 + m1, 1]
    }

    /// Product of two degree-one elements, in degree-two coordinates
    /// (algebra part concatenated with dual part).
    pub fn mul_d1(&self, u: &D1Element, v: &D1Element) -> Result<BitVec, Os2Error> {
        let alg = &self.base;
        let (m1, m2) = (alg.dim1(), alg.dim2());
        check_len(&u.a, m1)?;
        check_len(&v.a, m1)?;
        check_len(&u.b, m2)?;
        check_len(&v.b, m2)?;
        let part2 = alg.cup(&u.a, &v.a)?;
        // dual-degree-one coordinate at basis line c:
        //   (u.a * v.b)(e_c) = v.b(e_c u.a),   (u.b * v.a)(e_c) = u.b(v.a e_c)
        let mut part1 = BitVec::zeros(m1);
        for c in 0..m1 {
            let e_c = BitVec::from_indices(m1, &[c]);
            let left = alg.cup(&e_c, &u.a)?;
            let right = alg.cup(&v.a, &e_c)?;
            let bit = v.b.dot(&left) ^ u.b.dot(&right);
            part1.set(c, bit);
        }
        Ok(part2.concat(&part1))
    }
}

/// Cohomology dimensions of the three multiplication complexes attached to a
/// degree-one element of the double.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceResult {
    /// `dim H^k(A, a)` for k = 0, 1, 2.
    pub dim_algebra: [usize; 3],
    /// `dim H^k(dual A, a)` for k = 0, 1, 2; mirrors `dim_algebra` reversed.
    pub dim_dual: [usize; 3],
    /// `dim H^k(D(A), (a,b))` for k = 0..3.
    pub dim_double: [usize; 4],
    /// Shorthand: `d = dim H^1(A, a)`.
    pub d: usize,
    /// Euler characteristic of the graded algebra, `1 - m1 + m2`.
    pub beta: i64,
}

/// Ranks through the complex `0 -> D^0 -> D^1 -> D^2 -> D^3 -> 0` given by
/// multiplication with `(a, b)`, plus the two one-sided complexes.
///
/// # Panics
/// Panics if the structure constants violate the square-zero law or the
/// six-term exactness bookkeeping; both are internal-consistency bugs.
pub fn resonance(
    dbl: &DoubleAlgebraMod2,
    element: &D1Element,
) -> Result<ResonanceResult, Os2Error> {
    let alg = &dbl.base;
    let (m1, m2) = (alg.dim1(), alg.dim2());
    check_len(&element.a, m1)?;
    check_len(&element.b, m2)?;
    if element.a.is_zero() {
        return Err(Os2Error::ZeroFirstComponent);
    }
    let a = &element.a;

    // one-sided complex 0 -> A^0 -> A^1 -> A^2 -> 0
    let n0 = BitMatrix::from_rows(m1, vec![a.clone()]);
    let mut rows1 = Vec::with_capacity(m1);
    for i in 0..m1 {
        rows1.push(alg.cup(&BitVec::from_indices(m1, &[i]), a)?);
    }
    let n1 = BitMatrix::from_rows(m2, rows1);
    let (r_n0, r_n1) = (n0.rank(), n1.rank());
    let dim_algebra = [1 - r_n0, m1 - r_n1 - r_n0, m2 - r_n1];
    // dual complex: transposed maps in reverse order
    let dim_dual = [m2 - r_n1, m1 - r_n0 - r_n1, 1 - r_n0];

    // the double complex via multiplication by (a, b)
    let m0 = BitMatrix::from_rows(m1 + m2, vec![element.a.concat(&element.b)]);
    let mut rows = Vec::with_capacity(m1 + m2);
    for i in 0..m1 {
        let e_i = D1Element::from_degree_one(alg, BitVec::from_indices(m1, &[i]));
        rows.push(dbl.mul_d1(&e_i, element)?);
    }
    for j in 0..m2 {
        let f_j = D1Element {
            a: BitVec::zeros(m1),
            b: BitVec::from_indices(m2, &[j]),
        };
        rows.push(dbl.mul_d1(&f_j, element)?);
    }
    let m1_map = BitMatrix::from_rows(m2 + m1, rows);
    let mut last = Vec::with_capacity(m2 + m1);
    for j in 0..m2 {
        last.push(BitVec::from_indices(
            1,
            if element.b.get(j) { &[0] } else { &[] },
        ));
    }
    for c in 0..m1 {
        last.push(BitVec::from_indices(
            1,
            if element.a.get(c) { &[0] } else { &[] },
        ));
    }
    let m2_map = BitMatrix::from_rows(1, last);

    // square-zero sanity on the actual matrices
    debug_assert!((0..m0.nrows()).all(|i| m1_map.apply(m0.row(i)).is_zero()));
    debug_assert!((0..m1_map.nrows()).all(|i| m2_map.apply(m1_map.row(i)).is_zero()));

    let (r0, r1, r2) = (m0.rank(), m1_map.rank(), m2_map.rank());
    let dim_double = [1 - r0, (m1 + m2) - r1 - r0, (m2 + m1) - r2 - r1, 1 - r2];

    let d = dim_algebra[1];
    let beta = alg.beta();
    // six-term exactness bookkeeping for a nonzero degree-one part
    assert_eq!(dim_double[0], 0, "degree-zero cohomology must vanish");
    assert_eq!(dim_double[3], 0, "top cohomology must vanish");
    assert_eq!(dim_double[1], dim_double[2], "middle dimensions must agree");
    assert!(
        dim_double[1] as i64 >= beta + d as i64,
        "first cohomology below its exactness floor"
    );
    Ok(ResonanceResult {
        dim_algebra,
        dim_dual,
        dim_double,
        d,
        beta,
    })
}

/// The all-ones degree-one vector; defined when the total line count
/// (affine lines plus pivot) is even, so that it evaluates to 1 on the
/// pivot's class as well.
pub fn omega_bar_prime(alg: &GradedAlgebraMod2) -> Result<BitVec, Os2Error> {
    let n = alg.dim1() + 1;
    if !n.is_multiple_of(2) {
        return Err(Os2Error::OddLineCount { n });
    }
    Ok(BitVec::ones(alg.dim1()))
}

/// `dim H^1(D(A), (all-ones, 0))`: the resonance route to the mod-2 homology
/// jump of the double cover. Deconing is at the last line.
pub fn alpha0(config: &LineConfiguration) -> Result<usize, Os2Error> {
    let dec = decone(config, config.n())?;
    let alg = build_os2(&dec);
    let omega = omega_bar_prime(&alg)?;
    let dbl = double(alg);
    let element = D1Element::from_degree_one(&dbl.base, omega);
    Ok(resonance(&dbl, &element)?.dim_double[1])
}
