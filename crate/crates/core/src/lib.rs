//! Exact-rational toolkit for finite-dimensional order-unit spaces, test
//! spaces, valued weights, observable fragments and their logics, channels,
//! composites and two-stage test spaces.
//!
//! All arithmetic is over arbitrary-precision rationals; every check is exact.

pub mod error;
pub mod rational;
pub mod linalg;
pub mod lp;
pub mod polyhedron;

pub mod ous;
pub mod systems;
pub mod testspace;
pub mod vweight;
pub mod modj;
pub mod logic;
pub mod channel;
pub mod composite;
pub mod dacey;
pub mod sample;

pub use error::{Error, Result};
pub use ous::{Effect, OrderUnitSpace, State, SubOus};
pub use rational::{Rational, Vector};
pub use testspace::{Event, Outcome, TestSpace};
pub use vweight::{Model, ValuedWeight};
pub use modj::{Catalog, Observable};
pub use logic::EffectAlgebraTable;
pub use channel::{LinearMap, MarkovKernel};
pub use composite::{BilinearRule, JointWeight};
pub use dacey::{DaceyCover, Derandomization};
