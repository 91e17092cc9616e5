//! Exact-rational engine for weighted K-stability of Q-Fano spherical data.
//!
//! The engine takes the combinatorial datum of a Q-Fano spherical variety
//! (moment polytope facets, root functionals, spherical roots, central torus),
//! evaluates the weighted non-Archimedean functionals and the modified Futaki
//! invariant of equivariant test configurations, decides the
//! weighted-barycenter stability criterion with exact certificates or
//! destabilizing directions, and cross-validates every closed form against an
//! independent lattice-point oracle.

pub mod datum;
pub mod error;
pub mod functionals;
pub mod geom;
pub mod jsonio;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod rat;
pub mod selfcheck;
pub mod stability;
pub mod tc;
pub mod weight;

pub use datum::{load_datum, load_datum_str, toric_datum, SphericalDatum, ValidationReport};
pub use error::{Error, Result};
pub use functionals::{barycenter, evaluate, FunctionalReport, Value};
pub use geom::{Direction, HPolytope, Ineq, Point, Simplex};
pub use poly::Polynomial;
pub use rat::Rat;
pub use stability::{criterion, destabilizer, ratio_scan, soliton_solve, Status, Verdict};
pub use tc::{load_tc_str, normalize, regions, twist, validate_tc, TestConfig};
pub use weight::{load_weight, load_weight_str, pullback, WeightFunction};
