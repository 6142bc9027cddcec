//! Scalar numerical kernels: adaptive quadrature, bracketed root finding,
//! and derivative-free line search.

pub mod golden;
pub mod quadrature;
pub mod root;
