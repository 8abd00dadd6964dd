//! Two-photon S-matrix: the fluorescent part B and the transmitted bound state.
//! Every closed form here requires g = 0.

pub mod bound_state;
pub mod fluorescence;

pub use bound_state::{
    auto_x_grid, beat_period, bound_state_h, classify_statistics, f_pair, p2_profile, psi_r, BoundState,
    BoundStateProfile, Statistics,
};
pub use fluorescence::{
    fluorescence_b, fluorescence_map, half_width, quench_residual, two_photon_element, FluorescenceGrid,
    TwoPhotonElement,
};
