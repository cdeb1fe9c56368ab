//! Exact-arithmetic laboratory for coideal subalgebras of quantum sl_n.
//!
//! The crate builds quantum-group modules over Q(q^{1/2}), realizes the
//! coideal generators B_i, k_i as exact matrices, verifies the defining
//! relation tables, decomposes generators into spectral weight components,
//! and audits the highest-weight classification of the restricted modules
//! against classical branching data.
//!
//! Layering, bottom up:
//! - [`scalar`]: the field Q(q^{1/2}), q-integers, classical limits.
//! - [`linalg`]: sparse exact matrices, kernels, spectral calculus.
//! - [`cartan`]: marked-diagram data, Cartan matrices, restricted lattices.
//! - [`freealg`]: expression trees in algebra generators and their rewrites.
//! - [`urep`]: concrete quantum sl_n modules and classical limits.
//! - [`iqrep`]: the coideal action on modules, relation suites, duality.
//! - [`hwt`]: case studies, highest-weight records, branching audits.
//! - [`report`]: machine-readable run reports.

pub mod cartan;
pub mod freealg;
pub mod hwt;
pub mod iqrep;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod urep;
