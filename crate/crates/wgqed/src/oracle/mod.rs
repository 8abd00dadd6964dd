//! Brute-force check of the closed forms: the chiral waveguide on a finite
//! momentum grid, evolved in time in the one- and two-excitation sectors.

pub mod model;
pub mod propagate;
pub mod report;
pub mod scatter;
