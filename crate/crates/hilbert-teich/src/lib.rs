//! Hilbert metric on the Teichmüller space of punctured surfaces through
//! truncated arc lengths of a preferred ideal triangulation.
//!
//! The numeric engine works on the once-punctured torus; the triangulation
//! combinatorics are surface-generic. All geometry is generic over [`Scalar`]
//! (`f32` or `f64`); the aliases below fix `f64`.

pub mod cone_hilbert;
pub mod decorated_surface;
pub mod earthquake;
pub mod error;
pub mod hyperbolic_core;
pub mod laminations;
pub mod mcg;
pub mod scalar;
pub mod teich_hilbert;
pub mod triangulation;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Cone = cone_hilbert::ConeFunctionalSet<f64>;
pub type Mobius = hyperbolic_core::MobiusMap<f64>;
pub type Cusp = hyperbolic_core::DecoratedCusp<f64>;
pub type Structure = decorated_surface::MarkedStructure<f64>;
pub type LengthVector = decorated_surface::TruncatedLengthVector<f64>;
pub type Flow = earthquake::TwistFlow<f64>;
pub type Ray = earthquake::EarthquakeRay<f64>;

pub use decorated_surface::Slope;
pub use laminations::WeightedMulticurve;
pub use mcg::MappingClass;
pub use triangulation::PreferredTriangulation;
