//! Physical constants (CODATA 2018), SI units.

use crate::scalar::{lit, Real};

/// Provenance string reported by front ends.
pub const PROVENANCE: &str = "CODATA 2018 recommended values (SI); Yb-171 mass 170.936 u";

/// Table of the physical constants the ion-chain calculations depend on.
///
/// Kept as a value rather than bare `const`s so callers can substitute an
/// alternative table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<T> {
    /// Reduced Planck constant, J s.
    pub hbar: T,
    /// Elementary charge, C.
    pub elementary_charge: T,
    /// Vacuum permittivity, F/m.
    pub epsilon0: T,
    /// Bohr magneton, J/T.
    pub bohr_magneton: T,
    /// Nuclear magneton, J/T.
    pub nuclear_magneton: T,
    /// Atomic mass constant, kg.
    pub atomic_mass_unit: T,
    /// Electron-to-proton mass ratio.
    pub electron_proton_mass_ratio: T,
}

pub mod codata2018 {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const EPSILON0: f64 = 8.854_187_812_8e-12;
    pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
    pub const NUCLEAR_MAGNETON: f64 = 5.050_783_746_1e-27;
    pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
    pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;
}

impl<T: Real> Constants<T> {
    pub fn codata2018() -> Self {
        use codata2018::*;
        Constants {
            hbar: lit(HBAR),
            elementary_charge: lit(ELEMENTARY_CHARGE),
            epsilon0: lit(EPSILON0),
            bohr_magneton: lit(BOHR_MAGNETON),
            nuclear_magneton: lit(NUCLEAR_MAGNETON),
            atomic_mass_unit: lit(ATOMIC_MASS_UNIT),
            electron_proton_mass_ratio: lit(ELECTRON_MASS / PROTON_MASS),
        }
    }

    /// `e² / 4πε₀`, J m.
    pub fn coulomb_constant_e2(&self) -> T {
        self.elementary_charge * self.elementary_charge / (lit::<T>(4.0) * T::PI() * self.epsilon0)
    }

    pub fn planck(&self) -> T {
        self.hbar * lit::<T>(2.0) * T::PI()
    }
}

impl<T: Real> Default for Constants<T> {
    fn default() -> Self {
        Self::codata2018()
    }
}
