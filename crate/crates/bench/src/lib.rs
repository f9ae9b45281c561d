//! Shared fixtures for the gl2lab benchmarks.

use std::sync::Arc;

use gl2lab::hecke::tower_samples;
use gl2lab::sampling::DEFAULT_SEED;
use gl2lab::tree::orbital_samples;
use gl2lab::{LocalContext, LocalMatrix};

/// Deterministic matrices in the support region used by the evaluation benches.
pub fn phi_inputs(ctx: &Arc<LocalContext>, n: u32, count: usize) -> Vec<LocalMatrix> {
    tower_samples(ctx, n, count, DEFAULT_SEED).expect("tower samples")
}

/// Deterministic semisimple elements covering every orbital branch.
pub fn orbital_inputs(ctx: &Arc<LocalContext>, count: usize) -> Vec<LocalMatrix> {
    orbital_samples(ctx, count, DEFAULT_SEED).expect("orbital samples").into_iter().map(|s| s.probe).collect()
}
