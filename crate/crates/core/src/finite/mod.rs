//! Table-driven finite rings and `GL_2` over them.

mod gl2;
mod ring;

pub use gl2::{gl2_order, Classes, FiniteGl2, Mat};
pub use ring::{Elem, FiniteRing, RingKind, MAX_RING_SIZE};
