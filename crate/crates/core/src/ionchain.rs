//! Linear ion string in a harmonic trap with an axial magnetic-field gradient.
//!
//! Positions are measured in units of the length scale
//! `ζ = (e²/4πε₀ m ν₁²)^{1/3}`, in which the axial potential reads
//! `V(u) = Σ u_j²/2 + Σ_{i<j} 1/|u_i − u_j|`.

use crate::constants::Constants;
use crate::error::{domain, Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Species<T> {
    /// kg
    pub mass: T,
    pub g_j: T,
    pub g_i: T,
    /// Ground-state hyperfine splitting, J.
    pub e_hfs: T,
    pub i_nuc: T,
}

impl<T: Real> Species<T> {
    pub fn new(mass: T, g_j: T, g_i: T, e_hfs: T, i_nuc: T) -> Result<Self> {
        if !(mass > T::zero()) {
            return domain(format!("mass must be positive, got {mass}"));
        }
        if !(e_hfs >= T::zero()) {
            return domain(format!("hyperfine splitting must be non-negative, got {e_hfs}"));
        }
        if !(i_nuc >= T::zero()) || (i_nuc * lit(2.0)).fract() != T::zero() {
            return domain(format!("nuclear spin {i_nuc} is not a non-negative half-integer"));
        }
        Ok(Species { mass, g_j, g_i, e_hfs, i_nuc })
    }

    /// ¹⁷¹Yb⁺ ground state: 170.936 u, g_J = 2, g_I = 0.98734, I = 1/2, 12.642812118 GHz.
    pub fn yb171(c: &Constants<T>) -> Self {
        Species {
            mass: lit::<T>(170.936) * c.atomic_mass_unit,
            g_j: lit(2.0),
            g_i: lit(0.98734),
            e_hfs: c.planck() * lit(12.642_812_118e9),
            i_nuc: lit(0.5),
        }
    }

    /// Same species with the mass given in atomic mass units.
    pub fn with_mass_amu(self, amu: T, c: &Constants<T>) -> Result<Self> {
        Species::new(amu * c.atomic_mass_unit, self.g_j, self.g_i, self.e_hfs, self.i_nuc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConfig<T> {
    /// Axial centre-of-mass angular frequency, rad/s.
    pub nu1: T,
    pub n_ions: usize,
    /// Axial field gradient, T/m.
    pub b: T,
    /// Field at the trap centre, T. `None` selects the weak-field limit `χ → 0`.
    pub b0: Option<T>,
}

impl<T: Real> TrapConfig<T> {
    pub fn new(nu1: T, n_ions: usize, b: T, b0: Option<T>) -> Result<Self> {
        if !(nu1 > T::zero()) {
            return domain(format!("nu1 must be positive, got {nu1}"));
        }
        if n_ions == 0 {
            return domain("at least one ion is required");
        }
        if !(b >= T::zero()) {
            return domain(format!("gradient must be non-negative, got {b}"));
        }
        Ok(TrapConfig { nu1, n_ions, b, b0 })
    }

    pub fn is_weak_field(&self) -> bool {
        self.b0.is_none()
    }
}

/// `V(u)`.
pub fn potential<T: Real>(u: &[T]) -> T {
    let half = lit::<T>(0.5);
    let mut v: T = u.iter().map(|&x| half * x * x).sum();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            v = v + (u[i] - u[j]).abs().recip();
        }
    }
    v
}

/// `∇V(u)`.
pub fn potential_gradient<T: Real>(u: &[T]) -> Vec<T> {
    (0..u.len())
        .map(|j| {
            let coulomb: T = (0..u.len())
                .filter(|&i| i != j)
                .map(|i| {
                    let d = u[j] - u[i];
                    d.signum() / (d * d)
                })
                .sum();
            u[j] - coulomb
        })
        .collect()
}

/// Hessian of `V`; equals `A/ν₁²` where `A` is the axial dynamical matrix.
pub fn potential_hessian<T: Real>(u: &[T]) -> SquareMatrix<T> {
    let n = u.len();
    let two = lit::<T>(2.0);
    let k = |i: usize, j: usize| two / (u[i] - u[j]).abs().powi(3);
    SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            T::one() + (0..n).filter(|&m| m != i).map(|m| k(i, m)).sum()
        } else {
            -k(i, j)
        }
    })
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn is_sorted_strict<T: Real>(u: &[T]) -> bool {
    u.windows(2).all(|w| w[0] < w[1])
}

fn newton<T: Real>(u: &mut [T], tol: T, max_iter: usize) -> bool {
    for _ in 0..max_iter {
        let g = potential_gradient(u);
        if max_abs(&g) < tol {
            return true;
        }
        let Some(step) = potential_hessian(u).solve(&g) else {
            return false;
        };
        let v0 = potential(u);
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<T> = u.iter().zip(&step).map(|(&x, &s)| x - alpha * s).collect();
            if is_sorted_strict(&trial) && (potential(&trial) <= v0 || max_abs(&potential_gradient(&trial)) < max_abs(&g)) {
                u.copy_from_slice(&trial);
                accepted = true;
                break;
            }
            alpha = alpha * lit(0.5);
        }
        if !accepted {
            return false;
        }
    }
    max_abs(&potential_gradient(u)) < tol
}

fn coordinate_descent<T: Real>(u: &mut [T], sweeps: usize) {
    let two = lit::<T>(2.0);
    for _ in 0..sweeps {
        for j in 0..u.len() {
            for _ in 0..4 {
                let (mut g, mut h) = (u[j], T::one());
                for i in (0..u.len()).filter(|&i| i != j) {
                    let d = u[j] - u[i];
                    g = g - d.signum() / (d * d);
                    h = h + two / d.abs().powi(3);
                }
                let lo = if j > 0 { u[j - 1] } else { T::neg_infinity() };
                let hi = if j + 1 < u.len() { u[j + 1] } else { T::infinity() };
                let mut next = u[j] - g / h;
                if next <= lo || next >= hi {
                    next = if next <= lo { (u[j] + lo) * lit(0.5) } else { (u[j] + hi) * lit(0.5) };
                }
                u[j] = next;
            }
        }
    }
}

/// Dimensionless equilibrium positions of `n` ions, sorted ascending.
pub fn equilibrium_positions<T: Real>(n: usize) -> Result<Vec<T>> {
    if n == 0 {
        return domain("at least one ion is required");
    }
    if n == 1 {
        return Ok(vec![T::zero()]);
    }
    let tol = T::invariant_tol();
    let spacing = lit::<T>(2.0) * T::from_usize(n).unwrap().powf(lit(-0.56));
    let centre = T::from_usize(n - 1).unwrap() * lit(0.5);
    let mut u: Vec<T> = (0..n).map(|j| (T::from_usize(j).unwrap() - centre) * spacing).collect();

    if !newton(&mut u, tol, 100) {
        coordinate_descent(&mut u, 200);
        if !newton(&mut u, tol, 100) {
            return Err(Error::NoConvergence { iterations: 400, residual: to_f64(max_abs(&potential_gradient(&u))) });
        }
    }
    Ok(u)
}

/// Axial mode frequencies (ascending) and the mode matrix `S` (row `n` is mode `n`).
///
/// Each mode vector is signed so that its first non-zero component is positive.
pub fn normal_modes<T: Real>(u: &[T], nu1: T) -> Result<(Vec<T>, SquareMatrix<T>)> {
    let (values, mut s) = potential_hessian(u).symmetric_eigen();
    if let Some(&bad) = values.iter().find(|&&l| !(l > T::zero())) {
        return Err(Error::NotMinimum { eigenvalue: to_f64(bad) });
    }
    let n = u.len();
    let cut = lit::<T>(1e-9);
    for r in 0..n {
        let first = s.row(r).iter().copied().find(|x| x.abs() > cut).unwrap_or(T::one());
        if first < T::zero() {
            for k in 0..n {
                s[(r, k)] = -s[(r, k)];
            }
        }
    }
    Ok((values.iter().map(|&l| nu1 * l.sqrt()).collect(), s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Modes<T> {
    /// Dimensionless equilibrium positions.
    pub u: Vec<T>,
    /// Equilibrium positions, m.
    pub z0: Vec<T>,
    /// Mode angular frequencies, rad/s, ascending.
    pub nu: Vec<T>,
    pub s_matrix: SquareMatrix<T>,
}

impl<T: Real> Modes<T> {
    pub fn n_ions(&self) -> usize {
        self.u.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambDicke<T> {
    pub eta: T,
    /// Ground-state position spread, m.
    pub dz: T,
    /// Ground-state momentum spread, kg m/s.
    pub dp: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Epsilon<T> {
    /// `ε_nj`, mode `n` by ion `j`.
    pub eps: SquareMatrix<T>,
    /// Equilibrium shifts `d_z^{(nj)}`, m.
    pub d_z: SquareMatrix<T>,
}

/// Spin-spin couplings `J_ij`, rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T> {
    pub j: SquareMatrix<T>,
}

impl<T: Real> Coupling<T> {
    /// `J_ij / 2π`.
    pub fn hz(&self) -> SquareMatrix<T> {
        self.j.scale((lit::<T>(2.0) * T::PI()).recip())
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport<T> {
    pub trap: TrapConfig<T>,
    pub zeta: T,
    pub modes: Modes<T>,
    /// Minimum gradient for individual addressing, T/m.
    pub required_gradient: Option<T>,
    /// `∂ω₀₁/∂z` at each ion, rad s⁻¹ m⁻¹.
    pub gradients: Vec<T>,
    pub epsilon: Epsilon<T>,
    pub coupling: Coupling<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainCalculator<T> {
    pub constants: Constants<T>,
    pub species: Species<T>,
}

impl<T: Real> ChainCalculator<T> {
    pub fn new(constants: Constants<T>, species: Species<T>) -> Self {
        ChainCalculator { constants, species }
    }

    pub fn yb171() -> Self {
        let c = Constants::codata2018();
        ChainCalculator::new(c, Species::yb171(&c))
    }

    /// `ζ`, m.
    pub fn length_scale(&self, nu1: T) -> T {
        (self.constants.coulomb_constant_e2() / (self.species.mass * nu1 * nu1)).cbrt()
    }

    /// Fitted minimum spacing `2ζN^{−0.56}`.
    pub fn spacing_estimate(&self, n_ions: usize, zeta: T) -> Result<T> {
        if n_ions < 2 {
            return domain("spacing needs at least two ions");
        }
        Ok(lit::<T>(2.0) * zeta * T::from_usize(n_ions).unwrap().powf(lit(-0.56)))
    }

    pub fn lamb_dicke(&self, wavelength: T, nu: T) -> LambDicke<T> {
        let hbar = self.constants.hbar;
        let dz = (hbar / (lit::<T>(2.0) * self.species.mass * nu)).sqrt();
        LambDicke { eta: lit::<T>(2.0) * T::PI() * dz / wavelength, dz, dp: hbar / (lit::<T>(2.0) * dz) }
    }

    /// `χ = (g_J + g_I m_e/m_p) μ_B B / E_HFS`.
    pub fn chi(&self, field: T) -> T {
        let g = self.species.g_j + self.species.g_i * self.constants.electron_proton_mass_ratio;
        g * self.constants.bohr_magneton * field / self.species.e_hfs
    }

    pub fn field_for_chi(&self, chi: T) -> T {
        chi / self.chi(T::one())
    }

    /// Breit-Rabi energy of the `F = I ± 1/2` level with magnetic quantum number `m_q`.
    pub fn breit_rabi_energy(&self, field: T, m_q: T, branch: Branch) -> Result<T> {
        let sp = &self.species;
        let two = lit::<T>(2.0);
        let f_max = sp.i_nuc + lit(0.5);
        if m_q.abs() > f_max || (m_q + f_max).fract() != T::zero() {
            return domain(format!("m = {m_q} invalid for I = {}", sp.i_nuc));
        }
        if branch == Branch::Lower && m_q.abs() == f_max {
            return domain(format!("m = {m_q} has no lower-branch level for I = {}", sp.i_nuc));
        }
        let mult = two * sp.i_nuc + T::one();
        let chi = self.chi(field);
        let root = (T::one() + lit::<T>(4.0) * m_q * chi / mult + chi * chi).max(T::zero()).sqrt();
        let sign = if branch == Branch::Upper { T::one() } else { -T::one() };
        Ok(sp.e_hfs / (two * mult) - sp.g_i * self.constants.nuclear_magneton * field * m_q + sign * sp.e_hfs / two * root)
    }

    /// `∂ω₀₁/∂z = (g_J μ_B b / 2ħ)(1 + χ/√(1+χ²))` with `χ` at the local field.
    pub fn qubit_frequency_gradient(&self, field_at_ion: T, b: T) -> T {
        let chi = self.chi(field_at_ion);
        let factor = T::one() + chi / (T::one() + chi * chi).sqrt();
        self.species.g_j * self.constants.bohr_magneton * b / (lit::<T>(2.0) * self.constants.hbar) * factor
    }

    /// Gradient that separates neighbouring qubit frequencies by `2ν_N + ν₁`.
    pub fn required_gradient(&self, nu1: T, n_ions: usize) -> Result<T> {
        if n_ions < 2 {
            return domain("addressing needs at least two ions");
        }
        let c = &self.constants;
        let n = T::from_usize(n_ions).unwrap();
        let prefactor = c.hbar / (lit::<T>(2.0) * c.bohr_magneton) * (self.species.mass / c.coulomb_constant_e2()).cbrt();
        Ok(prefactor * nu1.powf(lit::<T>(5.0) / lit(3.0)) * (lit::<T>(4.7) * n.powf(lit(0.56)) + lit::<T>(0.5) * n.powf(lit(1.56))))
    }

    pub fn modes(&self, nu1: T, n_ions: usize) -> Result<Modes<T>> {
        let u = equilibrium_positions::<T>(n_ions)?;
        let (nu, s_matrix) = normal_modes(&u, nu1)?;
        let zeta = self.length_scale(nu1);
        let z0 = u.iter().map(|&x| x * zeta).collect();
        Ok(Modes { u, z0, nu, s_matrix })
    }

    /// `∂ω₀₁/∂z` at every ion; `χ = 0` in the weak-field limit.
    pub fn ion_gradients(&self, trap: &TrapConfig<T>, modes: &Modes<T>) -> Vec<T> {
        modes
            .z0
            .iter()
            .map(|&z| {
                let field = trap.b0.map_or(T::zero(), |b0| b0 + trap.b * z);
                self.qubit_frequency_gradient(field, trap.b)
            })
            .collect()
    }

    /// `d_z^{(nj)} = −ħ∂ω_j/(mν_n²)` and `ε_nj = S_nj Δz_n ∂ω_j/ν_n`.
    pub fn epsilon_matrix(&self, modes: &Modes<T>, gradients: &[T]) -> Result<Epsilon<T>> {
        let n = modes.n_ions();
        if gradients.len() != n {
            return domain(format!("{} gradients for {n} ions", gradients.len()));
        }
        let hbar = self.constants.hbar;
        let m = self.species.mass;
        let dz: Vec<T> = modes.nu.iter().map(|&nu| (hbar / (lit::<T>(2.0) * m * nu)).sqrt()).collect();
        let eps = SquareMatrix::from_fn(n, |r, j| modes.s_matrix[(r, j)] * dz[r] * gradients[j] / modes.nu[r]);
        let d_z = SquareMatrix::from_fn(n, |r, j| -hbar * gradients[j] / (m * modes.nu[r] * modes.nu[r]));
        Ok(Epsilon { eps, d_z })
    }

    /// `|η′_nj| = |η_n S_nj + i ε_nj|` for radiation of the given wavelength.
    pub fn effective_lamb_dicke(&self, modes: &Modes<T>, epsilon: &Epsilon<T>, wavelength: T) -> SquareMatrix<T> {
        let eta: Vec<T> = modes.nu.iter().map(|&nu| self.lamb_dicke(wavelength, nu).eta).collect();
        SquareMatrix::from_fn(modes.n_ions(), |r, j| (eta[r] * modes.s_matrix[(r, j)]).hypot(epsilon.eps[(r, j)]))
    }

    /// `J_ij = Σ_n ν_n ε_ni ε_nj` with zero diagonal.
    pub fn coupling_matrix(&self, modes: &Modes<T>, epsilon: &Epsilon<T>) -> Coupling<T> {
        let n = modes.n_ions();
        let j = SquareMatrix::from_fn(n, |a, b| {
            if a == b {
                T::zero()
            } else {
                (0..n).map(|r| modes.nu[r] * epsilon.eps[(r, a)] * epsilon.eps[(r, b)]).sum()
            }
        });
        Coupling { j }
    }

    pub fn report(&self, trap: &TrapConfig<T>) -> Result<ChainReport<T>> {
        let modes = self.modes(trap.nu1, trap.n_ions)?;
        let gradients = self.ion_gradients(trap, &modes);
        let epsilon = self.epsilon_matrix(&modes, &gradients)?;
        let coupling = self.coupling_matrix(&modes, &epsilon);
        let required_gradient = self.required_gradient(trap.nu1, trap.n_ions).ok();
        Ok(ChainReport { trap: *trap, zeta: self.length_scale(trap.nu1), modes, required_gradient, gradients, epsilon, coupling })
    }
}
