//! Shift operators on discrete Hardy spaces of rooted trees.
//!
//! Trees are declared by degree rules ([`TreeSpec`]) and materialized level by
//! level ([`LevelTree`]) with exact big-integer counts. Functions on vertices
//! are generic over the scalar: exact rationals for identities, `f32`/`f64`
//! and complex floats for spectral constructions.

pub mod error;
pub mod function;
pub mod gallery;
pub mod hardy;
pub mod hypercyclic;
pub mod io;
pub mod oracle;
pub mod random;
pub mod scalar;
pub mod shift;
pub mod spectral;
pub mod tree;

pub use error::{Error, Result};
pub use function::{Segment, TreeFunction};
pub use scalar::{Exponent, Magnitude, Quantity, TreeScalar, ValueMode};
pub use tree::{materialize, materialize_with, LevelTree, MaterializeOptions, TreeSpec, VertexId};

pub type Rational = num_rational::BigRational;
pub type RationalFunction = TreeFunction<Rational>;
pub type RealFunction = TreeFunction<f64>;
pub type RealFunction32 = TreeFunction<f32>;
pub type ComplexFunction = TreeFunction<num_complex::Complex64>;
pub type ComplexFunction32 = TreeFunction<num_complex::Complex32>;
