//! Integrality of mixed Cayley graphs over finite groups that contain an
//! abelian subgroup of index two.
//!
//! A mixed Cayley graph on a group `G` with connection set `S ⊆ G∖{1}` has
//! the elements of `G` as vertices and an arc from `g` to `h` whenever
//! `g⁻¹h ∈ S`.  Its Hermitian adjacency matrix carries `1` on digons, `i` on
//! forward-only arcs and `-i` on backward-only arcs; the graph is *integral*
//! when every eigenvalue of that matrix is a rational integer.
//!
//! For groups `G = ⟨A, x⟩` with `A` abelian of index two, `x² = y ∈ A` and
//! `x a x⁻¹ = f(a)` for an order-two automorphism `f`, integrality is
//! decidable exactly.  This crate implements three independent routes and a
//! census harness that cross-checks them:
//!
//! * closed-form criteria on character sums ([`criteria`]),
//! * exact block spectra over cyclotomic integers ([`spectrum`]),
//! * a floating-point Hermitian eigensolver ([`spectrum::numeric_spectrum`]).

pub mod abelian;
pub mod census;
pub mod criteria;
pub mod cyclo;
pub mod ext;
pub mod reps;
pub mod spectrum;
