//! The boundary three-manifold of a line configuration: its plumbing graph,
//! a finite presentation of the fundamental group, integral first homology,
//! and the fiber character that classifies its cyclic covers.
//!
//! The graph is bipartite: one vertex per line carrying Euler weight
//! `1 - (points on the line)`, one vertex per multiple point carrying `-1`,
//! and one edge per incidence. The fundamental group presentation has a
//! fiber generator per vertex and a loop generator per non-tree edge, with
//! fiber-centrality commutators and one boundary-product relator per vertex.

use crate::arrangement::LineConfiguration;
use crate::covers::AbelianGroupDesc;
use crate::presentation::{invert_word, GenKind, Generator, GroupPresentation, Letter, Word};
use crate::snf::{smith_normal_form, solve_mod, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BoundaryError {
    #[error("need at least three lines, got {n}")]
    DegenerateArrangement { n: usize },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("no fiber character exists modulo {modulus}")]
    InfeasibleCharacter { modulus: u64 },
    #[error("the character is not onto the integers modulo {modulus}")]
    NotSurjective { modulus: u64 },
}

/// Bipartite incidence graph with vertex weights: lines first, then points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlumbingGraph {
    /// Labels of the line vertices, ascending.
    pub line_labels: Vec<usize>,
    /// The multiple points; each entry lists the lines through it.
    pub points: Vec<Vec<usize>>,
    /// Weight of each line vertex: one minus the points on that line.
    pub line_weights: Vec<i64>,
    /// Weight of each point vertex: always minus one.
    pub point_weights: Vec<i64>,
    /// Incidences as (line position, point position), sorted.
    pub edges: Vec<(usize, usize)>,
}

impl PlumbingGraph {
    #[must_use]
    pub fn n_vertices(&self) -> usize {
        self.line_labels.len() + self.points.len()
    }

    #[must_use]
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    #[must_use]
    pub fn is_connected(&self) -> bool {
        let nv = self.n_vertices();
        if nv == 0 {
            return true;
        }
        let nl = self.line_labels.len();
        let mut adj = vec![Vec::new(); nv];
        for &(l, q) in &self.edges {
            adj[l].push(nl + q);
            adj[nl + q].push(l);
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == nv
    }

    /// First Betti number of the graph (it is connected):
    /// `edges - vertices + 1`.
    #[must_use]
    pub fn b1(&self) -> usize {
        debug_assert!(self.is_connected());
        self.n_edges() + 1 - self.n_vertices()
    }
}

pub fn plumbing_graph(config: &LineConfiguration) -> Result<PlumbingGraph, BoundaryError> {
    let n = config.n();
    if n < 3 {
        return Err(BoundaryError::DegenerateArrangement { n });
    }
    let points = config.l2_flats();
    let mut points_on_line = vec![0usize; n];
    let mut edges = Vec::new();
    for (q, f) in points.iter().enumerate() {
        for &l in f {
            points_on_line[l - 1] += 1;
            edges.push((l - 1, q));
        }
    }
    edges.sort_unstable();
    let graph = PlumbingGraph {
        line_labels: (1..=n).collect(),
        line_weights: points_on_line.iter().map(|&r| 1 - r as i64).collect(),
        point_weights: vec![-1; points.len()],
        points,
        edges,
    };
    debug_assert!(graph.is_connected());
    debug_assert_eq!(graph.b1(), config.betti().b_projective[2]);
    Ok(graph)
}

/// Present the fundamental group of the plumbed manifold.
///
/// Generators: one fiber class per vertex (`x<label>` for lines, `p<k>` for
/// points) and one loop `y<k>` per non-tree edge. Relators per vertex `v`
/// with weight `w`: a commutator of the fiber with each incident edge word,
/// and the product of the incident edge words times `fiber^w` (so the
/// sections multiply to `fiber^-w`). Edge words are the opposite fiber for
/// tree edges; across a non-tree edge both sides are conjugated by the edge
/// loop, inversely to one another.
///
/// `edge_order`, a permutation of edge positions, controls only which
/// spanning tree is chosen; any choice presents the same group.
#[must_use]
pub fn pi1_presentation(graph: &PlumbingGraph, edge_order: Option<&[usize]>) -> GroupPresentation {
    let nl = graph.line_labels.len();
    let np = graph.points.len();
    let ne = graph.edges.len();
    let order: Vec<usize> = match edge_order {
        Some(o) => {
            let mut check: Vec<usize> = o.to_vec();
            check.sort_unstable();
            assert_eq!(
                check,
                (0..ne).collect::<Vec<_>>(),
                "not an edge permutation"
            );
            o.to_vec()
        }
        None => (0..ne).collect(),
    };

    // spanning tree by union-find over the chosen edge order
    let mut parent: Vec<usize> = (0..nl + np).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut in_tree = vec![false; ne];
    for &e in &order {
        let (l, q) = graph.edges[e];
        let (a, b) = (find(&mut parent, l), find(&mut parent, nl + q));
        if a != b {
            parent[a] = b;
            in_tree[e] = true;
        }
    }

    let mut gens: Vec<Generator> = Vec::with_capacity(nl + np + ne);
    for &label in &graph.line_labels {
        gens.push(Generator {
            label: format!("x{label}"),
            kind: GenKind::LineFiber(label),
        });
    }
    for q in 0..np {
        gens.push(Generator {
            label: format!("p{}", q + 1),
            kind: GenKind::PointFiber(q),
        });
    }
    let mut edge_letter: Vec<Option<usize>> = vec![None; ne];
    let mut loops = 0;
    for e in 0..ne {
        if !in_tree[e] {
            loops += 1;
            edge_letter[e] = Some(gens.len());
            gens.push(Generator {
                label: format!("y{loops}"),
                kind: GenKind::EdgeCurve(e),
            });
        }
    }

    // The word attached to edge e as seen from one of its two endpoints:
    // plumbing swaps fiber and section across an edge, so each side reads
    // the opposite fiber. Crossing a non-tree edge inserts its loop letter,
    // inversely on the two sides.
    let delta = |e: usize, line_side: bool| -> Word {
        let (l, q) = graph.edges[e];
        let (line_gen, point_gen) = (l, nl + q);
        match edge_letter[e] {
            None => vec![Letter::pos(if line_side { point_gen } else { line_gen })],
            Some(y) => {
                if line_side {
                    vec![Letter::pos(y), Letter::pos(point_gen), Letter::neg(y)]
                } else {
                    vec![Letter::neg(y), Letter::pos(line_gen), Letter::pos(y)]
                }
            }
        }
    };

    let mut rels: Vec<Word> = Vec::new();
    let mut vertex_relators = |gen: usize, weight: i64, incident: &[usize], line_side: bool| {
        let mut product: Word = Vec::new();
        for &e in incident {
            let d = delta(e, line_side);
            let mut comm: Word = vec![Letter::pos(gen)];
            comm.extend_from_slice(&d);
            comm.push(Letter::neg(gen));
            comm.extend(invert_word(&d));
            rels.push(comm);
            product.extend_from_slice(&d);
        }
        // the boundary sections multiply to fiber^-weight; as a relator word
        // that is (product of edge words) * fiber^weight
        let letter = if weight >= 0 {
            Letter::pos(gen)
        } else {
            Letter::neg(gen)
        };
        product.extend(std::iter::repeat_n(letter, weight.unsigned_abs() as usize));
        rels.push(product);
    };

    for l in 0..nl {
        let incident: Vec<usize> = (0..ne).filter(|&e| graph.edges[e].0 == l).collect();
        vertex_relators(l, graph.line_weights[l], &incident, true);
    }
    for q in 0..np {
        let incident: Vec<usize> = (0..ne).filter(|&e| graph.edges[e].1 == q).collect();
        vertex_relators(nl + q, graph.point_weights[q], &incident, false);
    }

    GroupPresentation::new(gens, rels)
}

/// A homomorphism to the integers modulo `modulus`, given by its value on
/// each generator of a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterMap {
    pub modulus: u64,
    pub values: Vec<u64>,
}

impl CharacterMap {
    /// Image of a word: the signed sum of generator values.
    #[must_use]
    pub fn word_value(&self, word: &[Letter]) -> u64 {
        let m = self.modulus as i128;
        let mut acc: i128 = 0;
        for l in word {
            let v = self.values[l.gen] as i128;
            acc += if l.inv { -v } else { v };
            acc %= m;
        }
        acc.rem_euclid(m) as u64
    }

    /// True when the generator values generate the full cyclic group.
    #[must_use]
    pub fn is_surjective(&self) -> bool {
        let mut g = self.modulus;
        for &v in &self.values {
            g = num_integer::gcd(g, v);
        }
        g == 1 || self.modulus == 1
    }

    /// Carry the character across a generator elimination map (as returned
    /// by presentation simplification). The underlying homomorphism is
    /// unchanged, so restricting to the surviving generators is sound.
    #[must_use]
    pub fn restrict(&self, gen_map: &[Option<usize>]) -> CharacterMap {
        assert_eq!(gen_map.len(), self.values.len(), "map length mismatch");
        let count = gen_map.iter().flatten().count();
        let mut values = vec![0; count];
        for (old, &m) in gen_map.iter().enumerate() {
            if let Some(new) = m {
                values[new] = self.values[old];
            }
        }
        CharacterMap {
            modulus: self.modulus,
            values,
        }
    }

    /// The same homomorphism followed by reduction to a divisor of the
    /// modulus. `None` if `d` is zero or does not divide the modulus.
    #[must_use]
    pub fn reduce_mod(&self, d: u64) -> Option<CharacterMap> {
        if d == 0 || !self.modulus.is_multiple_of(d) {
            return None;
        }
        Some(CharacterMap {
            modulus: d,
            values: self.values.iter().map(|&v| v % d).collect(),
        })
    }
}

/// Find the character sending every line fiber to 1 and every edge loop to
/// 0, solving for the point-fiber values. For the boundary manifold this is
/// feasible exactly when the modulus divides the line count.
pub fn solve_character(
    pres: &GroupPresentation,
    modulus: u64,
) -> Result<CharacterMap, BoundaryError> {
    if modulus == 0 {
        return Err(BoundaryError::ZeroModulus);
    }
    let pins: Vec<Option<u64>> = pres
        .gens
        .iter()
        .map(|g| match g.kind {
            GenKind::LineFiber(_) => Some(1 % modulus),
            GenKind::EdgeCurve(_) => Some(0),
            _ => None,
        })
        .collect();
    let mut col_of = vec![usize::MAX; pres.gens.len()];
    let mut unknowns = Vec::new();
    for (g, p) in pins.iter().enumerate() {
        if p.is_none() {
            col_of[g] = unknowns.len();
            unknowns.push(g);
        }
    }
    let mut a = IntMatrix::zero(pres.rels.len(), unknowns.len());
    let mut b = vec![0i64; pres.rels.len()];
    for (i, r) in pres.rels.iter().enumerate() {
        for l in r {
            let s = if l.inv { -1 } else { 1 };
            match pins[l.gen] {
                Some(v) => b[i] -= s * v as i64,
                None => a.add_to(i, col_of[l.gen], s),
            }
        }
    }
    let x = solve_mod(&a, &b, modulus).ok_or(BoundaryError::InfeasibleCharacter { modulus })?;
    let mut values = vec![0; pres.gens.len()];
    for (g, p) in pins.iter().enumerate() {
        match p {
            Some(v) => values[g] = *v,
            None => values[g] = x[col_of[g]],
        }
    }
    let character = CharacterMap { modulus, values };
    debug_assert!(pres.rels.iter().all(|r| character.word_value(r) == 0));
    if !character.is_surjective() {
        return Err(BoundaryError::NotSurjective { modulus });
    }
    Ok(character)
}

/// Integral first homology of the presented group.
#[must_use]
pub fn h1(pres: &GroupPresentation) -> AbelianGroupDesc {
    let snf = smith_normal_form(&pres.abelianization_matrix());
    let (free_rank, torsion) = snf.cokernel();
    AbelianGroupDesc { free_rank, torsion }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{catalog, CatalogEntry};
    use crate::presentation::SimplifyOptions;

    fn config(e: CatalogEntry) -> LineConfiguration {
        catalog(&e).unwrap()
    }

    #[test]
    fn pencil_graph_and_group() {
        let g = plumbing_graph(&config(CatalogEntry::Pencil(8))).unwrap();
        assert_eq!(g.n_vertices(), 9);
        assert_eq!(g.n_edges(), 8);
        assert_eq!(g.b1(), 0);
        assert_eq!(g.line_weights, vec![0; 8]);
        assert_eq!(g.point_weights, vec![-1]);

        let mut pres = pi1_presentation(&g, None);
        // one fiber per vertex, no loops (the graph is a tree)
        assert_eq!(pres.gens.len(), 9);
        let h = h1(&pres);
        assert_eq!((h.free_rank, h.torsion.len()), (7, 0));
        // the group itself is free of rank 7
        pres.simplify(|_| false, &SimplifyOptions::default());
        assert_eq!(pres.gens.len(), 7);
        assert!(pres.rels.is_empty());
    }

    #[test]
    fn generic_eight_homology_is_free_of_rank_28() {
        let g = plumbing_graph(&config(CatalogEntry::Generic(8))).unwrap();
        assert_eq!(g.b1(), 21);
        assert_eq!(g.line_weights, vec![-6; 8]);
        let pres = pi1_presentation(&g, None);
        // 36 fibers + 21 loops; a commutator for each of the 56 incidences
        // seen from both ends, plus 36 products
        assert_eq!(pres.gens.len(), 57);
        assert_eq!(pres.rels.len(), 148);
        let h = h1(&pres);
        assert_eq!((h.free_rank, h.torsion.len()), (28, 0));
    }

    #[test]
    fn near_pencil_and_maclane_homology_ranks() {
        for (entry, rank) in [
            (CatalogEntry::NearPencil(8), 13),
            (CatalogEntry::MacLane, 20),
        ] {
            let g = plumbing_graph(&config(entry)).unwrap();
            let h = h1(&pi1_presentation(&g, None));
            assert_eq!((h.free_rank, h.torsion.len()), (rank, 0));
        }
    }

    #[test]
    fn degenerate_configurations_are_rejected() {
        assert!(matches!(
            plumbing_graph(&config(CatalogEntry::Generic(2))),
            Err(BoundaryError::DegenerateArrangement { n: 2 })
        ));
    }

    #[test]
    fn character_pins_and_point_values() {
        let g = plumbing_graph(&config(CatalogEntry::Generic(8))).unwrap();
        let pres = pi1_presentation(&g, None);
        let c = solve_character(&pres, 8).unwrap();
        for (i, gen) in pres.gens.iter().enumerate() {
            match gen.kind {
                GenKind::LineFiber(_) => assert_eq!(c.values[i], 1),
                // a point fiber is the product of the meridians through it,
                // so on a double point the character must solve to 2
                GenKind::PointFiber(_) => assert_eq!(c.values[i], 2),
                GenKind::EdgeCurve(_) => assert_eq!(c.values[i], 0),
                _ => unreachable!(),
            }
        }
        assert!(c.is_surjective());
    }

    #[test]
    fn character_feasible_exactly_for_divisors_of_the_line_count() {
        let g = plumbing_graph(&config(CatalogEntry::MacLane)).unwrap();
        let pres = pi1_presentation(&g, None);
        for d in 1..=10u64 {
            let r = solve_character(&pres, d);
            if 8 % d == 0 {
                assert!(r.is_ok(), "modulus {d} should be feasible");
            } else {
                assert_eq!(r, Err(BoundaryError::InfeasibleCharacter { modulus: d }));
            }
        }
        assert_eq!(solve_character(&pres, 0), Err(BoundaryError::ZeroModulus));
    }

    #[test]
    fn character_survives_simplification() {
        let g = plumbing_graph(&config(CatalogEntry::Generic(6))).unwrap();
        let mut pres = pi1_presentation(&g, None);
        let c = solve_character(&pres, 6).unwrap();
        let map = pres.simplify(
            |gen| matches!(gen.kind, GenKind::LineFiber(_)),
            &SimplifyOptions::default(),
        );
        let restricted = c.restrict(&map);
        assert!(pres.rels.iter().all(|r| restricted.word_value(r) == 0));
        assert!(restricted.is_surjective());
        // all six line fibers survive and still map to 1
        let fibers = pres
            .gens
            .iter()
            .enumerate()
            .filter(|(_, g)| matches!(g.kind, GenKind::LineFiber(_)))
            .map(|(i, _)| restricted.values[i])
            .collect::<Vec<_>>();
        assert_eq!(fibers, vec![1; 6]);
    }

    #[test]
    fn spanning_tree_choice_does_not_change_homology() {
        let g = plumbing_graph(&config(CatalogEntry::Generic(6))).unwrap();
        let ne = g.n_edges();
        let reference = h1(&pi1_presentation(&g, None));
        let mut order: Vec<usize> = (0..ne).rev().collect();
        let h_rev = h1(&pi1_presentation(&g, Some(&order)));
        assert_eq!(reference, h_rev);
        // an interleaved order as a third sample
        order = (0..ne / 2).flat_map(|i| [i, ne - 1 - i]).collect();
        if ne % 2 == 1 {
            order.push(ne / 2);
        }
        let h_mix = h1(&pi1_presentation(&g, Some(&order)));
        assert_eq!(reference, h_mix);
    }

    #[test]
    fn character_reduction_and_word_values() {
        let g = plumbing_graph(&config(CatalogEntry::Generic(4))).unwrap();
        let pres = pi1_presentation(&g, None);
        let c = solve_character(&pres, 4).unwrap();
        let r = c.reduce_mod(2).unwrap();
        assert_eq!(r.modulus, 2);
        assert!(pres.rels.iter().all(|w| r.word_value(w) == 0));
        assert!(c.reduce_mod(3).is_none());
        assert!(c.reduce_mod(0).is_none());
        // a fiber times its inverse evaluates to zero
        let w = vec![Letter::pos(0), Letter::neg(0)];
        assert_eq!(c.word_value(&w), 0);
    }
}
