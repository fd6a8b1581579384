//! Turaev–Viro invariants of closed 3-manifold triangulations.
//!
//! The engines are generic over the [`Coefficient`] type used for field
//! coefficients; [`ExactField`] and [`Cyclotomic`] pick exact rationals,
//! [`FloatField`] and [`FloatCyclotomic`] pick `f64`.

pub mod arcs;
pub mod backtrack;
pub mod cyclotomic;
pub mod engine;
pub mod fpt;
pub mod homology;
pub mod scalar;
pub mod treewidth;
pub mod triangulation;
pub mod tvcore;

use num_rational::BigRational;

pub use cyclotomic::{CyclotomicElement, CyclotomicField, FieldError};
pub use engine::{compute, Computation, Engine};
pub use scalar::Coefficient;
pub use triangulation::{Triangulation, ValidationReport};

pub type ExactField = CyclotomicField<BigRational>;
pub type Cyclotomic = CyclotomicElement<BigRational>;
pub type FloatField = CyclotomicField<f64>;
pub type FloatCyclotomic = CyclotomicElement<f64>;
