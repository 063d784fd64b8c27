//! Exact cohomology calculations on the incidence hypersurface
//! Y = {sum x_i y_i = 0} in P^n x P^n over a prime field, and a certificate
//! pipeline that evaluates a claimed failure of Kodaira vanishing on the
//! associated projectivized-bundle sixfold in small characteristic, together
//! with the Cohen-Macaulay analysis of the cone over it. Every certificate
//! records what the computation actually established; when the evaluated
//! dimensions contradict the claim the pipeline was assembled to certify,
//! the verdict says so.
//!
//! Layout:
//! * [`fp`] - dense linear algebra over F_p (bit-packed for p = 2),
//! * [`ring`] - the bigraded coordinate ring R = S/(q),
//! * [`cohomology`] - line-bundle cohomology on P^n, W = P^n x P^n, and Y,
//! * [`bundles`] - Frobenius-pullback bundle cohomology and the long-exact-
//!   sequence interval solver,
//! * [`picard`] - divisor-class bookkeeping (dualizing sheaves, Fano check),
//! * [`certificate`] - certificate DAG construction, canonical emission,
//!   parsing and replay,
//! * [`cli`] - the command-line front end.

pub mod bundles;
pub mod certificate;
pub mod cli;
pub mod cohomology;
pub mod fp;
pub mod picard;
pub mod ring;

pub use fp::{FpMatrix, Subspace};
pub use ring::{BiMonomial, BiPoly, Ring, RingParams};
