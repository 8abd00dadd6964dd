//! Scattering of one and two photons by a pair of collocated, non-identical
//! two-level atoms coupled to a one-dimensional waveguide.
//!
//! The closed-form layer ([`model`], [`single_photon`], [`two_photon`]) is generic
//! over [`Real`] and works for `f32` and `f64`. The brute-force [`oracle`] is `f64`
//! only. Frequencies, rates and energies share one unit, times and positions its
//! inverse, with ħ = 1 and unit group velocity.

pub mod error;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod single_photon;
pub mod two_photon;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type AtomParams = model::AtomParams<f64>;
pub type TwoAtomSystem = model::TwoAtomSystem<f64>;
pub type CollectiveScales = model::CollectiveScales<f64>;
pub type ExcitationPair = single_photon::ExcitationPair<f64>;
pub type PoleSet = single_photon::PoleSet<f64>;
pub type Response = single_photon::Response<f64>;
pub type SpectrumRow = single_photon::SpectrumRow<f64>;
pub type TwoPhotonElement = two_photon::TwoPhotonElement<f64>;
pub type FluorescenceGrid = two_photon::FluorescenceGrid<f64>;
pub type BoundStateProfile = two_photon::BoundStateProfile<f64>;
pub type C64 = num_complex::Complex<f64>;
