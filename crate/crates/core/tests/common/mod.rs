#![allow(dead_code)]

use gkw::Params;
use proptest::prelude::*;

/// θ grid covering the bathtub, J, reversed-J, unimodal and U shapes.
pub const GRID: [[f64; 5]; 12] = [
    [2.0, 3.0, 1.5, 0.5, 2.0],
    [1.0, 1.0, 1.0, 0.0, 1.0],
    [0.5, 3.5, 1.5, 2.5, 0.5],
    [3.5, 0.5, 1.5, 2.5, 0.5],
    [1.0, 1.5, 3.0, 2.5, 0.5],
    [2.0, 2.5, 1.0, 0.0, 1.0],
    [0.5, 0.7, 0.1, 3.0, 4.0],
    [2.0, 0.5, 2.5, 0.1, 0.5],
    [5.0, 1.5, 2.5, 2.0, 0.5],
    [1.5, 1.5, 2.0, 1.0, 1.0],
    [0.5, 1.0, 2.0, 0.3, 1.5],
    [2.0, 0.8, 1.0, 2.0, 2.0],
];

pub fn grid() -> Vec<Params> {
    GRID.iter().map(|a| Params::from_array(*a).unwrap()).collect()
}

pub fn th(a: f64, b: f64, g: f64, d: f64, l: f64) -> Params {
    Params::new(a, b, g, d, l).unwrap()
}

/// Moderate parameters: no endpoint blow-up of the density.
pub fn regular_theta() -> impl Strategy<Value = Params> {
    (0.7f64..4.0, 0.7f64..4.0, 0.7f64..3.0, 0.0f64..3.0, 0.7f64..3.0)
        .prop_filter_map("density bounded at the endpoints", |(a, b, g, d, l)| {
            let t = Params::new(a, b, g, d, l).ok()?;
            (a * g * l >= 1.0 && b * (d + 1.0) >= 1.0).then_some(t)
        })
}

/// Any parameters in a wide box.
pub fn any_theta() -> impl Strategy<Value = Params> {
    (0.3f64..5.0, 0.3f64..5.0, 0.2f64..4.0, 0.0f64..4.0, 0.3f64..4.0)
        .prop_map(|(a, b, g, d, l)| Params::new(a, b, g, d, l).unwrap())
}
