//! Fixed-point combinatorics: SL2 lattice enumeration, colored subscheme
//! lattices, Poincaré polynomials of quiver Grassmannians and Carell's
//! fixed-point schemes.

pub mod carell;
pub mod groebner;
pub mod poincare;
pub mod ring;
pub mod sl2;

pub use carell::{carell_dim, divisor_scheme_series, CarellError, CarellReport};
pub use poincare::{gaussian_binomial, hilbert_colored, quiver_grass_poincare, ColoredSubschemeLattice, QPoly};
pub use ring::{Elem, Laurent, TruncatedRing};
pub use sl2::{sl2_enumerate, Sl2Error, Sl2Report};
