//! Homology of the two 3-manifolds attached to a complex line arrangement.
//!
//! A central arrangement of `n` planes in complex 3-space is described here
//! purely combinatorially: `n` projective lines together with the points where
//! three or more of them meet (double points are implied). From that input the
//! crate computes, with exact integer arithmetic throughout:
//!
//! * the intersection-lattice invariants (Moebius function, characteristic
//!   polynomial, Betti numbers of the complement),
//! * the plumbing graph and fundamental-group presentation of the boundary
//!   manifold of the projective complement,
//! * cyclic covers of that boundary via Reidemeister-Schreier rewriting,
//!   including the Milnor fiber boundary as the `n`-fold cover, with integral
//!   `H_1` (free rank plus torsion) read off a Smith normal form,
//! * the mod-2 Orlik-Solomon algebra of a decone, its square-zero double, and
//!   resonance-style cohomology dimensions that cross-check the cover data,
//! * a report pipeline that bundles the invariants, runs the built-in
//!   consistency checks, and serializes deterministically to JSON.
//!
//! The binary crate `plumbline-cli` exposes all of this as subcommands.

pub mod arrangement;
pub mod boundary;
pub mod covers;
pub mod gf2;
pub mod os2;
pub mod pipeline;
pub mod presentation;
pub mod snf;

pub use arrangement::LineConfiguration;
