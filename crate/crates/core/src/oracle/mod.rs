//! Independent numerical checks: adaptive quadrature, finite differences and
//! Monte Carlo order statistics.

mod fd;
mod mc;
mod quad;

pub use fd::{fd_grad, fd_hess};
pub use mc::mc_order_stat_mean;
pub use quad::{quad, quad_half_line, quad_interval, quad_with, QuadOptions, QuadResult};
