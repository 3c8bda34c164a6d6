//! Fixtures shared by the step benchmarks in `benches/`.

use allencahn_core::{default_params, GridSpec, InitialCondition, Real, ScalarField, SchemeParams};

/// Unit square or cube with `n` cells per axis holding a centered circle
/// (sphere) of radius 0.3, with the default interface width.
pub fn circle_fixture<T: Real>(dim: usize, n: usize) -> (SchemeParams, ScalarField<T>) {
    let (spec, init) = if dim == 2 {
        (
            GridSpec::unit_square(n),
            InitialCondition::Circle { r0: 0.3 },
        )
    } else {
        (GridSpec::unit_cube(n), InitialCondition::Sphere { r0: 0.3 })
    };
    let spec = spec.expect("bench grid");
    let params =
        default_params(&spec, allencahn_core::params::default_m(dim)).expect("bench params");
    let field = init.generate(&spec, &params).expect("bench field");
    (params, field)
}
