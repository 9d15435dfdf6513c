//! Discrete domains, grid functions and difference operators.

mod csvio;
mod directions;
mod domain;
mod fields;
mod function;
mod ops;

pub use csvio::{format_value, grid_to_csv_string, parse_grid_csv, read_grid_csv, write_grid_csv, RawGrid};
pub use directions::{Direction, DirectionSet};
pub use domain::{DomainKind, DomainSpec, MAX_AXES};
pub use fields::{BackgroundField, DensityField};
pub use function::GridFunction;
pub use ops::{complex_from_real_hessian, complex_hessian, levi_form_along, real_hessian, second_difference};
