//! P1 shape functions, quadrature, nodal fields and discrete norms.

mod field;
mod quadrature;
mod shape;

pub use field::{discrete_lp, function_lp_norm, lp_norm, lp_norm_with, P1Field, MAX_EXPONENT};
pub use quadrature::{integrate, integrate_with, QuadratureRule};
pub use shape::{angle_from_gradients, barycentric, shape_data, ShapeData};
