//! Exact computations around loop Grassmannians of quivers: Thom kernels over
//! formal group laws, the twisted shuffle product, quantum locality, and the
//! fixed-point and zastava combinatorics.

pub mod fgl;
pub mod fixedpoints;
pub mod locality;
pub mod quiver;
pub mod shuffle;
pub mod symalg;
pub mod thom;
pub mod zastava;
