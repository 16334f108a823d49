//! Exact computation of the pole-order filtration on the cohomology of the complement
//! of a quasi-homogeneous isolated hypersurface singularity, and of the D-module lengths
//! it controls.

pub mod corpus;
pub mod derham;
pub mod dmodlen;
pub mod groebner;
pub mod linalg;
pub mod oracle;
pub mod polyalg;
pub mod singularity;

pub use polyalg::{Monomial, Polynomial, TermOrder, WeightVector};
