//! Localized equivariant K-theory of Fourier-Mukai kernels for stratified
//! Mukai flops, together with the divisor-lattice and dimension bookkeeping
//! that accompanies them.

mod error;
pub mod exactalg;
pub mod geom;
pub mod kernels;
pub mod ktheory;
pub mod picard;
pub mod strata;

pub use error::Error;
