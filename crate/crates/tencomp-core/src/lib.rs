//! Desk-scale toolkit for tensor complementarity problems.
//!
//! Given an order-`m`, dimension-`n` real tensor `A` and a vector `q`, the
//! complementarity problem asks for `x >= 0` with `w = q + A x^{m-1} >= 0`
//! and `x' w = 0`. This crate provides:
//!
//! - sparse/dense tensor storage and the multilinear kernels `A x^{m-1}`,
//!   `A x^m`, and principal sub-tensors ([`tensor`]);
//! - exact and heuristic solvers: complementary-support enumeration with
//!   multi-start Newton, and a simplex variational-inequality path that
//!   scales past the enumeration cap ([`engine`]);
//! - certificate-producing membership oracles for the structured tensor
//!   classes Q, R, R0, P, P0, (strictly) semi-positive and (strictly)
//!   copositive ([`oracles`]);
//! - falsifiers for monotonicity and P-function properties of the map
//!   `x -> A x^{m-1} + q` ([`monotone`]);
//! - canonical demo instances and seeded random generators ([`gen`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); the companion
//! `tencomp-cli` crate carries file formats and the command-line front end.
//!
//! Verdicts are three-valued and honest: `Member` is only ever produced by
//! an exact rule or a complete enumeration, `NonMember` always carries a
//! witness that replays through the defining inequality, and search-based
//! "looks fine" outcomes are reported as `NoCounterexampleFound`.
//!
//! ```
//! use tencomp_core::engine::{solve_enumerate, SolveOptions, TcpInstance};
//! use tencomp_core::gen::{example, ExampleId};
//!
//! let tensor = example(&ExampleId::Ex23).unwrap();
//! let inst = TcpInstance::new(tensor, vec![-1.0, -1.0]).unwrap();
//! let result = solve_enumerate(&inst, &SolveOptions::default()).unwrap();
//! assert!(result.complete);
//! assert_eq!(result.solutions[0].x, vec![0.0, 1.0]);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod engine;
pub mod gen;
pub mod linalg;
pub mod monotone;
pub mod oracles;
pub mod tensor;

pub use engine::{
    EngineError, EnumerateResult, Residuals, SolveMethod, SolveOptions, TcpInstance, TcpSolution,
    VerifyOutcome, ViOutcome, Violation,
};
pub use oracles::{
    Certificate, ClassId, ClassVerdict, OracleOptions, TensorClass, Verdict, Witness,
};
pub use tensor::{Support, Tensor, TensorError};
