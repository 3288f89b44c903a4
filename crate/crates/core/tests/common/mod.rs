//! Independent reference implementations used by the integration tests.
//!
//! `dense` works in the physical marker space (cavity Fock states
//! `None, C1, C2, Vac, T` times wall `G, E`) with every map written as an
//! explicit matrix, and computes slit amplitudes from scratch. Nothing here
//! calls into the crate's state algebra.

#![allow(dead_code)]

pub mod dense;
pub mod quadrature;

/// `int |Re(psi1* psi2)| dx` over the default window `[-500, 500]` with
/// continuum-normalized slit amplitudes (scipy `quad`, split at the zeros
/// of the cosine, epsrel 1e-14). Rederived by `quadrature::l1_cross_term`.
pub const L1_CROSS_TERM_DEFAULT: f64 = 0.636_620_492_621_125_9;
