//! Desk-scale simulation of single-qubit measurement physics with trapped ions.
//!
//! The crate covers coherent two-level dynamics ([`bloch`]), quantum-Zeno
//! measurement statistics ([`zeno`]), adaptive Bayesian state estimation
//! ([`estimator`]), affine qubit channels and their tomography
//! ([`channels`]), and the static physics of an ion string in a magnetic
//! field gradient ([`ionchain`]).
//!
//! All numerical code is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`). The aliases below fix the scalar to
//! `f64`, which is what the tolerances quoted in the docs refer to.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod channels;
pub mod constants;
pub mod error;
pub mod estimator;
pub mod ionchain;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod zeno;

pub use error::{Error, Result};
pub use rng::RngSeed;
pub use scalar::Real;

pub type Vector3 = linalg::Vec3<f64>;
pub type Matrix3 = linalg::Mat3<f64>;

pub type BlochVector = bloch::Bloch<f64>;
pub type PureState = bloch::Direction<f64>;
pub type DrivePulse = bloch::Pulse<f64>;
pub type DetectionModel = bloch::DetectionModel<f64>;

pub type ZenoConfig = zeno::ZenoConfig<f64>;
pub type Trajectory = zeno::Trajectory<f64>;

pub type SphereGrid = estimator::SphereGrid<f64>;
pub type SphereDistribution = estimator::SphereDensity<f64>;
pub type StrategyConfig = estimator::StrategyConfig;
pub type ImperfectionParams = estimator::Imperfections<f64>;

pub type AffineChannel = channels::Affine<f64>;
pub type ChannelSpec = channels::ChannelSpec<f64>;

pub type Species = ionchain::Species<f64>;
pub type TrapConfig = ionchain::TrapConfig<f64>;
pub type ChainModes = ionchain::Modes<f64>;
pub type CouplingMatrix = ionchain::Coupling<f64>;
pub type ChainCalculator = ionchain::ChainCalculator<f64>;

pub type BlochVector32 = bloch::Bloch<f32>;
pub type AffineChannel32 = channels::Affine<f32>;
