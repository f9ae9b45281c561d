//! Exact arithmetic and finite verification tools for explicit test functions on `GL_2` over
//! unramified p-adic fields: Galois rings with Frobenius, the Bruhat–Tits tree, finite character
//! theory of `GL_2(Z/p^n)`, twisted conjugacy, Hecke convolution, and elliptic-curve censuses.

pub mod basechange;
pub mod curves;
pub mod cyclotomic;
pub mod error;
pub mod finite;
pub mod hecke;
pub mod padic;
pub mod rep;
pub mod report;
pub mod sampling;
pub mod test_functions;
pub mod tree;

pub use error::{Error, Result};
pub use padic::{ExtendedNat, GaloisRingElement, LocalContext, LocalMatrix, RationalFunctionT, RingMatrix};
