//! Property tests pinning the library against independent oracles and
//! structural invariants: a subset-enumeration route to the characteristic
//! polynomial, a determinantal-divisor route to the Smith form, and the
//! internal consistency laws of each pipeline stage.

mod common;

use num_bigint::{BigInt, Sign};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plumbline::arrangement::LineConfiguration;
use plumbline::boundary::{self, BoundaryError};
use plumbline::covers;
use plumbline::gf2::BitVec;
use plumbline::os2::{self, D1Element};
use plumbline::presentation::{GenKind, SimplifyOptions};
use plumbline::snf::{smith_normal_form, IntMatrix};

fn configurations(ns: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = LineConfiguration> {
    (ns, any::<u64>()).prop_map(|(n, seed)| common::random_configuration(n, seed))
}

fn binomial2(k: usize) -> usize {
    k * (k - 1) / 2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Every pair of lines meets in exactly one point, so the flats
    /// (implicit doubles included) partition the set of line pairs.
    #[test]
    fn pair_partition_conservation(config in configurations(3..=9)) {
        let covered: usize = config.l2_flats().iter().map(|f| binomial2(f.len())).sum();
        prop_assert_eq!(covered, binomial2(config.n()));
    }

    /// The closed-form characteristic polynomial agrees with the generic
    /// Moebius recursion over the enumerated poset of closed sets.
    #[test]
    fn charpoly_matches_poset_enumeration(config in configurations(3..=8)) {
        let fast = config.betti().charpoly;
        let slow = common::charpoly_by_poset_enumeration(&config);
        prop_assert_eq!(fast, slow);
    }

    /// Centrality: the characteristic polynomial vanishes at 1.
    #[test]
    fn charpoly_vanishes_at_one(config in configurations(3..=9)) {
        let c = config.betti().charpoly;
        prop_assert_eq!(c.iter().sum::<i64>(), 0);
    }

    /// The middle Betti number of the cone complement is the sum over
    /// multiple points of (multiplicity - 1).
    #[test]
    fn cone_b2_is_sum_of_multiplicities(config in configurations(3..=9)) {
        let expected: usize = config.l2_flats().iter().map(|f| f.len() - 1).sum();
        prop_assert_eq!(config.betti().b_cone[2], expected);
    }

    /// Euler characteristic bookkeeping for the projective complement.
    #[test]
    fn projective_euler_consistency(config in configurations(3..=9)) {
        let b = config.betti();
        let chi = 1 - b.b_projective[1] as i64 + b.b_projective[2] as i64;
        prop_assert_eq!(b.chi_projective, chi);
    }

    /// Under the multiplicity assumption the predicted rank of the Milnor
    /// fiber boundary collapses to the boundary-manifold rank.
    #[test]
    fn star_implies_rank_collapse(config in configurations(3..=9)) {
        if config.assumption_star() {
            let b = config.betti();
            prop_assert_eq!(
                config.b1_milnor_boundary(),
                b.b_projective[1] + b.b_projective[2]
            );
        }
    }

    /// Text round trip through the configuration file format.
    #[test]
    fn arr_round_trip(config in configurations(3..=9)) {
        let text = config.to_arr_string();
        let back = LineConfiguration::from_arr_str(&text).expect("round trip parses");
        prop_assert_eq!(back, config);
    }
}

fn small_matrices() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=6).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-6i64..=6, c), r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    /// Smith elimination agrees with the determinantal-divisor definition.
    #[test]
    fn snf_matches_minor_gcd_oracle(rows in small_matrices()) {
        let snf = smith_normal_form(&IntMatrix::from_dense(&rows));
        let (rank, factors) = common::invariant_factors_by_minor_gcd(&rows);
        prop_assert_eq!(snf.rank(), rank);
        let got: Vec<BigInt> = snf
            .diagonal
            .iter()
            .map(|d| BigInt::from_biguint(Sign::Plus, d.clone()))
            .collect();
        prop_assert_eq!(got, factors);
    }

    /// Each invariant factor divides the next.
    #[test]
    fn snf_diagonal_divisibility(rows in small_matrices()) {
        let snf = smith_normal_form(&IntMatrix::from_dense(&rows));
        for w in snf.diagonal.windows(2) {
            prop_assert_eq!(&w[1] % &w[0], num_bigint::BigUint::ZERO);
        }
    }
}

fn random_bitvec(len: usize, rng: &mut ChaCha8Rng) -> BitVec {
    let indices: Vec<usize> = (0..len).filter(|_| rng.random_bool(0.5)).collect();
    BitVec::from_indices(len, &indices)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Degree-one squares vanish in the mod-2 algebra.
    #[test]
    fn degree_one_squares_vanish(config in configurations(3..=8), seed in any::<u64>()) {
        let dec = os2::decone(&config, config.n()).expect("deconable");
        let alg = os2::build_os2(&dec);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_bitvec(alg.dim1(), &mut rng);
        let sq = alg.cup(&u, &u).expect("dimensions match");
        prop_assert!(sq.is_zero());
    }

    /// Degree two of the deconed algebra counts (multiplicity - 1) over
    /// affine points, implicit doubles included.
    #[test]
    fn deconed_degree_two_dimension(config in configurations(3..=9)) {
        let dec = os2::decone(&config, config.n()).expect("deconable");
        let alg = os2::build_os2(&dec);
        let expected: usize = dec.affine_points.iter().map(|p| p.len() - 1).sum();
        prop_assert_eq!(alg.dim2(), expected);
        prop_assert_eq!(alg.dim1(), config.n() - 1);
    }

    /// Six-term bookkeeping of the doubled complex holds for arbitrary
    /// elements with nonzero degree-one part, and the first cohomology
    /// dominates the Euler characteristic of the projective complement.
    #[test]
    fn resonance_six_term_bookkeeping(config in configurations(3..=8), seed in any::<u64>()) {
        let chi = config.betti().chi_projective;
        let dec = os2::decone(&config, config.n()).expect("deconable");
        let alg = os2::build_os2(&dec);
        prop_assert_eq!(alg.beta(), chi);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = random_bitvec(alg.dim1(), &mut rng);
        if a.is_zero() {
            a = BitVec::from_indices(alg.dim1(), &[0]);
        }
        let b = random_bitvec(alg.dim2(), &mut rng);
        let dbl = os2::double(alg);
        let r = os2::resonance(&dbl, &D1Element { a, b }).expect("element is admissible");
        prop_assert_eq!(r.dim_double[0], 0);
        prop_assert_eq!(r.dim_double[3], 0);
        prop_assert_eq!(r.dim_double[1], r.dim_double[2]);
        prop_assert!(r.dim_double[1] as i64 >= r.beta + r.d as i64);
        prop_assert!(r.dim_double[1] as i64 >= chi);
    }

    /// The resonance dimension of the all-ones element does not depend on
    /// which line the deconing removes.
    #[test]
    fn alpha0_pivot_independent(config in configurations(3..=8).prop_filter(
        "even line count",
        |c| c.n() % 2 == 0,
    )) {
        let reference = os2::alpha0(&config).expect("even line count");
        for pivot in [1, config.n() / 2] {
            let dec = os2::decone(&config, pivot).expect("deconable");
            let alg = os2::build_os2(&dec);
            let omega = os2::omega_bar_prime(&alg).expect("even line count");
            let dbl = os2::double(alg);
            let element = D1Element::from_degree_one(&dbl.base, omega);
            let r = os2::resonance(&dbl, &element).expect("element is admissible");
            prop_assert_eq!(r.dim_double[1], reference, "pivot {}", pivot);
        }
    }
}

fn presentation_for(config: &LineConfiguration) -> plumbline::presentation::GroupPresentation {
    let graph = boundary::plumbing_graph(config).expect("plumbable");
    boundary::pi1_presentation(&graph, None)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The boundary manifold has torsion-free first homology whose rank is
    /// the sum of the two Betti numbers of the projective complement.
    #[test]
    fn boundary_homology_torsion_free(config in configurations(3..=7)) {
        let b = config.betti();
        let h1 = boundary::h1(&presentation_for(&config));
        prop_assert!(h1.torsion.is_empty());
        prop_assert_eq!(h1.free_rank, b.b_projective[1] + b.b_projective[2]);
    }

    /// Tietze simplification does not change the abelianization.
    #[test]
    fn simplify_preserves_abelianization(config in configurations(3..=7)) {
        let mut pres = presentation_for(&config);
        let before = boundary::h1(&pres);
        pres.simplify(|_| false, &SimplifyOptions::default());
        let after = boundary::h1(&pres);
        prop_assert_eq!(before, after);
    }

    /// The degree-d character mod the line count exists exactly when d
    /// divides the line count.
    #[test]
    fn character_feasibility(config in configurations(3..=8), d in 2u64..=12) {
        let pres = presentation_for(&config);
        match boundary::solve_character(&pres, d) {
            Ok(character) => {
                prop_assert_eq!(config.n() as u64 % d, 0);
                prop_assert!(character.is_surjective());
                for (g, v) in pres.gens.iter().zip(&character.values) {
                    match g.kind {
                        GenKind::LineFiber(_) => prop_assert_eq!(*v, 1 % d),
                        GenKind::EdgeCurve(_) => prop_assert_eq!(*v, 0),
                        _ => {}
                    }
                }
                for rel in &pres.rels {
                    prop_assert_eq!(character.word_value(rel), 0);
                }
            }
            Err(BoundaryError::InfeasibleCharacter { .. })
            | Err(BoundaryError::NotSurjective { .. }) => {
                prop_assert_ne!(config.n() as u64 % d, 0);
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Rewriting a cover multiplies presentation size the way an index-d
    /// subgroup must: generators d*G - (d-1), relators d*R, Euler
    /// characteristic of the presentation complex scaled by d.
    #[test]
    fn cover_counts_scale(config in configurations(3..=6), seed in any::<u64>()) {
        let n = config.n() as u64;
        let pres = presentation_for(&config);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let divisors: Vec<u64> = (2..=n).filter(|d| n.is_multiple_of(*d)).collect();
        let d = divisors[rng.random_range(0..divisors.len())];
        let character = boundary::solve_character(&pres, d).expect("divisor is feasible");
        let cover = covers::reidemeister_schreier(&pres, &character, d).expect("cover rewrites");
        let (g, r) = (pres.gens.len(), pres.rels.len());
        prop_assert_eq!(cover.gens.len(), d as usize * g - (d as usize - 1));
        prop_assert_eq!(cover.rels.len(), d as usize * r);
        prop_assert_eq!(cover.euler(), d as i64 * pres.euler());
    }

    /// Cover homology does not depend on the spanning tree used for the
    /// base presentation.
    #[test]
    fn spanning_tree_independence(config in configurations(3..=6), seed in any::<u64>()) {
        let n = config.n() as u64;
        let graph = boundary::plumbing_graph(&config).expect("plumbable");
        let mut order: Vec<usize> = (0..graph.n_edges()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let opts = SimplifyOptions::default();

        let mut results = Vec::new();
        for edge_order in [None, Some(order.as_slice())] {
            let pres = boundary::pi1_presentation(&graph, edge_order);
            let character = boundary::solve_character(&pres, n).expect("line count is feasible");
            results.push(covers::h1_cover(&pres, &character, n, &opts).expect("cover computes"));
        }
        prop_assert_eq!(&results[0], &results[1]);
    }

    /// Cover homology does not depend on whether the cover presentation is
    /// Tietze-simplified before abelianizing.
    #[test]
    fn cover_homology_independent_of_simplification(config in configurations(3..=5)) {
        let n = config.n() as u64;
        let pres = presentation_for(&config);
        let character = boundary::solve_character(&pres, n).expect("line count is feasible");
        let simplified = covers::h1_cover(&pres, &character, n, &SimplifyOptions::default())
            .expect("cover computes");
        let raw_opts = SimplifyOptions { max_rounds: 0, ..SimplifyOptions::default() };
        let raw = covers::h1_cover(&pres, &character, n, &raw_opts).expect("cover computes");
        prop_assert_eq!(simplified, raw);
    }
}
