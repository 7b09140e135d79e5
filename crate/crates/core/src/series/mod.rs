//! Expansion coefficients and series-based distributional properties.

mod coeffs;
mod deviations;
mod entropy;
mod control;
mod moments;
mod order;
mod quantile;

pub use coeffs::{
    cdf_expansion, density_from_mixture, density_from_power_series, mixture_coeffs, omega_weights,
    power_series_power, CoeffTable, PowerSeries,
};
pub use control::{Method, SeriesControl, SeriesReport, SeriesValue};
pub use moments::{central_moments_and_cumulants, factorial_moment, mgf, moment, stirling_first, CentralMoments};
pub use quantile::{quantile_from_series, quantile_series_argument, quantile_series_coeffs};
pub use deviations::{bonferroni_lorenz, j_integral, mean_deviations, BonferroniLorenz, MeanDeviations};
pub use order::{l_moments, order_stat_moment_barakat, order_stat_moment_series, LMoments};
pub use entropy::renyi_entropy;
