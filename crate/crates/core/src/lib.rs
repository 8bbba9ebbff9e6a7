//! Exact structure-constant workbench for n-ary algebras.
//!
//! Finite-dimensional n-Lie, n-pre-Lie and n-L-dendriform algebras are
//! represented by sparse rational structure constants. Every defining
//! identity has a checker that reports the exact residual on each failing
//! basis tuple, and every construction (semidirect products, dual
//! representations, O-operator and Rota-Baxter induced structures,
//! symplectic phase spaces, Manin-triple verification, trace-based arity
//! lifting, pseudo-Hessian dendrification) is executable and re-checkable.
//!
//! All arithmetic is exact: the only scalar is an arbitrary-precision
//! rational, and a report is empty if and only if the identity holds on
//! the nose.

pub mod catalog;
pub mod error;
pub mod family;
pub mod geometry;
pub mod io;
pub mod ldend;
pub mod linalg;
pub mod nlie;
pub mod nprelie;
pub mod rational;
pub mod report;
pub mod tensor;
pub mod trace;

pub use error::{AlgebraError, Result};
pub use linalg::{BilinearForm, Covector, LinearMap, Symmetry};
pub use rational::{perm_sign, Rational};
pub use report::{Report, Violation};
pub use tensor::{SkewPattern, StructureTensor};
