//! Channel, thermodynamic and functional-inequality calculators built on the
//! deficit bounds.

mod channel;
mod landauer;
mod lsi;

pub use channel::{
    agwn_1d_condentropy_bound, agwn_constant, channel_comparison, fano_crossover, fano_rhs, gaussian_hx_given_y_bound,
    gaussian_j, grid_bayes_error, ozarow_wyner_bound, tv_fano_estimator_bound, uniform_grid_bayes_error, ChannelRow,
    ChannelSpec,
};
pub use landauer::{landauer_bounds, landauer_heat_oracle, EnergeticsSpec, LandauerBand};
pub use lsi::{lsi_deficit_bound, lsi_deficit_oracle};
