//! Global minimization of DC functions (differences of convex functions) in
//! which at least one side is polyhedral convex.
//!
//! The solver reduces the non-convex problem `min g(x) - h(x)` to the
//! enumeration of epigraph vertices: of `epi g` when `g` is polyhedral (the
//! primal algorithm), or of `epi h*` when `h` is polyhedral (the dual
//! algorithm, via Toland–Singer duality). Vertex enumeration itself is
//! performed by the [`projection`] engine, which computes a V-representation
//! of a projected polyhedron by solving an associated multiple objective
//! linear program with an outer-approximation scheme.
//!
//! Module map:
//! * [`poly`] — polyhedron encodings (H/V/P-representations) and small-scale
//!   brute-force oracles,
//! * [`lp`] — dense two-phase simplex used by every higher layer,
//! * [`projection`] — the projection-as-MOLP engine,
//! * [`pcf`] — polyhedral-convex-function representations and their calculus
//!   (max-affine, epigraph hulls, infimal convolution, conjugation),
//! * [`dc`] — the two global DC algorithms plus the unboundedness diagnostic,
//! * [`instances`] — builders for the benchmark families.
//!
//! All numeric work is dense 64-bit floating point; tolerances are documented
//! next to the constants that define them.

pub mod dc;
pub mod instances;
pub mod lp;
pub mod num;
pub mod pcf;
pub mod poly;
pub mod projection;

mod error;

pub use error::{Error, Result};
pub use num::ExtReal;
pub use poly::{HRep, PRep, VRep};
