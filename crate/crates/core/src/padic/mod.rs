//! Truncated unramified p-adic arithmetic and scaled 2×2 matrices.

mod context;
mod exact;
mod extnat;
mod galois_ring;
mod matrix;
mod ratfunc;
mod text;

pub use context::{is_prime, prime_power_decompose, LocalContext, MAX_DEGREE};
pub use extnat::ExtendedNat;
pub use galois_ring::GaloisRingElement;
pub use matrix::{LocalMatrix, RingMatrix, Valuation};
pub use ratfunc::RationalFunctionT;
pub use text::parse_local_matrix;
