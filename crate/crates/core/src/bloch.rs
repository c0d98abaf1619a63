//! Two-level quantum mechanics on the Bloch ball.
//!
//! Conventions: `|0⟩` sits at the north pole (+z), the pure state
//! `cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩` maps to `(sinθ cosφ, sinθ sinφ, cosθ)`,
//! angles are radians and rates rad/s. A drive with Rabi frequency `Ω`,
//! detuning `δ = ω₀ − ω` and phase `φ` generates the rotating-frame propagator
//! `exp[−i t/2 (δσ_z + Ω(cosφ σ_x + sinφ σ_y))]`, i.e. a right-handed rotation
//! of the Bloch vector by `Ω_R t` about `(Ω cosφ, Ω sinφ, δ)/Ω_R`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{domain, Error, Result};
use crate::linalg::Vec3;
use crate::scalar::{lit, to_f64, Real};

/// Measurement direction / pure state given by its polar angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction<T> {
    theta: T,
    phi: T,
}

impl<T: Real> Direction<T> {
    /// `theta ∈ [0, π]`, `phi ∈ [0, 2π)`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        let two_pi = T::TAU();
        if !(theta >= T::zero() && theta <= T::PI()) {
            return domain(format!("theta = {theta} outside [0, π]"));
        }
        if !(phi >= T::zero() && phi < two_pi) {
            return domain(format!("phi = {phi} outside [0, 2π)"));
        }
        Ok(Direction { theta, phi })
    }

    /// Like [`Direction::new`] but wraps `phi` into `[0, 2π)` first.
    pub fn wrapped(theta: T, phi: T) -> Result<Self> {
        let two_pi = T::TAU();
        let mut p = phi % two_pi;
        if p < T::zero() {
            p = p + two_pi;
        }
        if p >= two_pi {
            p = T::zero();
        }
        Self::new(theta, p)
    }

    /// Direction of a nonzero vector. The azimuth of a pole is reported as 0.
    pub fn from_vector(v: &Vec3<T>) -> Result<Self> {
        let n = v.norm();
        if !(n > T::zero()) {
            return domain("direction of the zero vector is undefined");
        }
        let c = (v.z() / n).max(-T::one()).min(T::one());
        let theta = c.acos();
        let phi = if v.x() == T::zero() && v.y() == T::zero() { T::zero() } else { v.y().atan2(v.x()) };
        Self::wrapped(theta, phi)
    }

    pub fn plus_z() -> Self {
        Direction { theta: T::zero(), phi: T::zero() }
    }

    pub fn minus_z() -> Self {
        Direction { theta: T::PI(), phi: T::zero() }
    }

    pub fn plus_x() -> Self {
        Direction { theta: T::FRAC_PI_2(), phi: T::zero() }
    }

    pub fn plus_y() -> Self {
        Direction { theta: T::FRAC_PI_2(), phi: T::FRAC_PI_2() }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn unit(&self) -> Vec3<T> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(st * cp, st * sp, ct)
    }

    /// The orthogonal state `(π − θ, φ + π)`.
    pub fn antipode(&self) -> Self {
        Self::wrapped(T::PI() - self.theta, self.phi + T::PI()).expect("antipode stays in range")
    }

    pub fn bloch(&self) -> Bloch<T> {
        Bloch(self.unit())
    }
}

/// Bloch vector `s` with `ρ = ½(I + s·σ)`; `‖s‖ ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bloch<T>(Vec3<T>);

impl<T: Real> Bloch<T> {
    pub fn new(v: Vec3<T>) -> Result<Self> {
        let n = v.norm();
        if !(n <= T::one() + T::invariant_tol()) {
            return Err(Error::Invariant(format!("Bloch vector norm {n} exceeds 1")));
        }
        Ok(Bloch(v))
    }

    pub(crate) fn new_unchecked(v: Vec3<T>) -> Self {
        Bloch(v)
    }

    pub fn ground() -> Self {
        Bloch(Vec3::unit_z())
    }

    pub fn excited() -> Self {
        Bloch(-Vec3::unit_z())
    }

    pub fn maximally_mixed() -> Self {
        Bloch(Vec3::zero())
    }

    pub fn vector(&self) -> Vec3<T> {
        self.0
    }

    pub fn norm(&self) -> T {
        self.0.norm()
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - T::one()).abs() <= T::invariant_tol()
    }

    /// Population of `|1⟩`.
    pub fn excited_population(&self) -> T {
        (T::one() - self.0.z()) * lit(0.5)
    }
}

/// Bloch vector of the pure state with polar angles `(theta, phi)`.
pub fn state_from_angles<T: Real>(theta: T, phi: T) -> Result<Bloch<T>> {
    Ok(Direction::new(theta, phi)?.bloch())
}

/// A rectangular drive pulse in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse<T> {
    rabi: T,
    detuning: T,
    duration: T,
    phase: T,
}

impl<T: Real> Pulse<T> {
    pub fn new(rabi: T, detuning: T, duration: T, phase: T) -> Result<Self> {
        if !(rabi >= T::zero()) {
            return domain(format!("Rabi frequency {rabi} must be non-negative"));
        }
        if !(duration >= T::zero()) {
            return domain(format!("pulse duration {duration} must be non-negative"));
        }
        if !detuning.is_finite() || !phase.is_finite() {
            return domain("detuning and phase must be finite");
        }
        Ok(Pulse { rabi, detuning, duration, phase })
    }

    /// Resonant pulse of the given area (nutation angle) at phase 0.
    pub fn resonant_area(rabi: T, area: T) -> Result<Self> {
        if !(rabi > T::zero()) {
            return domain("resonant pulse needs a positive Rabi frequency");
        }
        Self::new(rabi, T::zero(), area / rabi, T::zero())
    }

    /// Undriven precession at the detuning for `duration`.
    pub fn free_precession(detuning: T, duration: T) -> Result<Self> {
        Self::new(T::zero(), detuning, duration, T::zero())
    }

    pub fn rabi(&self) -> T {
        self.rabi
    }

    pub fn detuning(&self) -> T {
        self.detuning
    }

    pub fn duration(&self) -> T {
        self.duration
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    pub fn with_duration(&self, duration: T) -> Result<Self> {
        Self::new(self.rabi, self.detuning, duration, self.phase)
    }

    /// `Ω_R = √(Ω² + δ²)`.
    pub fn generalized_rabi(&self) -> T {
        self.rabi.hypot(self.detuning)
    }

    /// Unit rotation axis, `None` when `Ω_R = 0`.
    pub fn axis(&self) -> Option<Vec3<T>> {
        let (s, c) = self.phase.sin_cos();
        Vec3::new(self.rabi * c, self.rabi * s, self.detuning).normalized()
    }

    /// Total rotation angle `Ω_R t`.
    pub fn rotation_angle(&self) -> T {
        self.generalized_rabi() * self.duration
    }
}

/// Propagates `state` through `pulse`. A pulse with `Ω_R = 0` is the identity.
pub fn evolve<T: Real>(state: &Bloch<T>, pulse: &Pulse<T>) -> Bloch<T> {
    match pulse.axis() {
        Some(axis) => Bloch(state.0.rotated(&axis, pulse.rotation_angle())),
        None => *state,
    }
}

/// `P₁ = (Ω/Ω_R)² sin²(Ω_R t / 2)` starting from `|0⟩`.
pub fn rabi_excitation_probability<T: Real>(rabi: T, detuning: T, t: T) -> Result<T> {
    if !(rabi >= T::zero()) || !(t >= T::zero()) {
        return domain("rabi and t must be non-negative");
    }
    let omega_r = rabi.hypot(detuning);
    if omega_r == T::zero() {
        return Ok(T::zero());
    }
    let ratio = rabi / omega_r;
    let s = (omega_r * t * lit(0.5)).sin();
    Ok(ratio * ratio * s * s)
}

/// Probability of `|1⟩` after pulse – free precession – pulse, starting in `|0⟩`.
///
/// `pulse` is used for both the first and the second pulse; the detuning
/// during the dark interval is the pulse's detuning.
pub fn ramsey_probability<T: Real>(pulse: &Pulse<T>, precession_time: T) -> Result<T> {
    let dark = Pulse::free_precession(pulse.detuning(), precession_time)?;
    let s = evolve(&Bloch::ground(), pulse);
    let s = evolve(&s, &dark);
    let s = evolve(&s, pulse);
    Ok(born_probability(&s, &Direction::minus_z()))
}

/// Probability of the `+1` outcome when measuring `state` along `direction`.
pub fn born_probability<T: Real>(state: &Bloch<T>, direction: &Direction<T>) -> T {
    let p = (T::one() + state.0.dot(&direction.unit())) * lit(0.5);
    p.max(T::zero()).min(T::one())
}

/// Outcome of a projective two-outcome measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// Found along the measurement direction.
    Plus,
    /// Found along the antipode.
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

/// Projective measurement along `direction`; returns the outcome and the collapsed state.
pub fn measure<T: Real, R: Rng + ?Sized>(state: &Bloch<T>, direction: &Direction<T>, rng: &mut R) -> (Outcome, Bloch<T>) {
    let p = to_f64(born_probability(state, direction));
    let u: f64 = rng.random();
    let m = direction.unit();
    if u < p {
        (Outcome::Plus, Bloch(m))
    } else {
        (Outcome::Minus, Bloch(-m))
    }
}

/// Fluorescence read-out: `On` means photons were registered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reading {
    Off,
    On,
}

impl Reading {
    pub fn is_on(self) -> bool {
        self == Reading::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStatistics<T> {
    /// Mean photon count when the ion is in `|1⟩`.
    pub on_mean: T,
    /// Mean photon count when the ion is in `|0⟩`.
    pub off_mean: T,
    /// A count strictly above the threshold reads as `On`.
    pub threshold: u32,
}

/// Read-out error model.
///
/// `eta0` is the probability of reading `|0⟩` as `Off`, `eta1` of reading
/// `|1⟩` as `On`. When built from photon statistics both are the Poisson
/// tail masses and each read-out draws an actual count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionModel<T> {
    eta0: T,
    eta1: T,
    photons: Option<PhotonStatistics<T>>,
}

/// `P(X ≤ k)` for `X ~ Poisson(mean)`.
pub fn poisson_cdf<T: Real>(k: u32, mean: T) -> T {
    if mean == T::zero() {
        return T::one();
    }
    let mut term = (-mean).exp();
    let mut acc = term;
    for i in 1..=k {
        term = term * mean / T::from_u32(i).unwrap();
        acc = acc + term;
    }
    acc.min(T::one())
}

impl<T: Real> DetectionModel<T> {
    pub fn ideal() -> Self {
        DetectionModel { eta0: T::one(), eta1: T::one(), photons: None }
    }

    pub fn from_efficiencies(eta0: T, eta1: T) -> Result<Self> {
        let half = lit::<T>(0.5);
        for (name, eta) in [("eta0", eta0), ("eta1", eta1)] {
            if !(eta >= half && eta <= T::one()) {
                return domain(format!("{name} = {eta} outside [1/2, 1]"));
            }
        }
        Ok(DetectionModel { eta0, eta1, photons: None })
    }

    /// Threshold discrimination of Poisson photon counts.
    pub fn from_photon_counts(on_mean: T, off_mean: T, threshold: u32) -> Result<Self> {
        if !(on_mean >= T::zero() && off_mean >= T::zero()) || !on_mean.is_finite() || !off_mean.is_finite() {
            return domain("photon means must be finite and non-negative");
        }
        let eta0 = poisson_cdf(threshold, off_mean);
        let eta1 = T::one() - poisson_cdf(threshold, on_mean);
        let mut model = Self::from_efficiencies(eta0, eta1)?;
        model.photons = Some(PhotonStatistics { on_mean, off_mean, threshold });
        Ok(model)
    }

    /// Highest threshold whose `On → Off` misread rate stays below `max_misread`.
    pub fn with_max_on_misread(on_mean: T, off_mean: T, max_misread: T) -> Result<Self> {
        let mut best = None;
        for threshold in 0..=u32::MAX {
            if poisson_cdf(threshold, on_mean) < max_misread {
                best = Some(threshold);
            } else {
                break;
            }
        }
        match best {
            Some(t) => Self::from_photon_counts(on_mean, off_mean, t),
            None => domain(format!(
                "no threshold keeps the on-misread rate below {max_misread} for on_mean = {on_mean} (minimum {})",
                poisson_cdf(0, on_mean)
            )),
        }
    }

    pub fn eta0(&self) -> T {
        self.eta0
    }

    pub fn eta1(&self) -> T {
        self.eta1
    }

    pub fn photons(&self) -> Option<&PhotonStatistics<T>> {
        self.photons.as_ref()
    }

    /// `Δη = (η₁ − η₀)/2`.
    pub fn delta_eta(&self) -> T {
        (self.eta1 - self.eta0) * lit(0.5)
    }

    /// `η̄ = (η₀ + η₁)/2`.
    pub fn mean_eta(&self) -> T {
        (self.eta1 + self.eta0) * lit(0.5)
    }

    /// Probability that the given true level reads `Off`.
    pub fn off_probability(&self, true_state_is_one: bool) -> T {
        if true_state_is_one {
            T::one() - self.eta1
        } else {
            self.eta0
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.eta0 == T::one() && self.eta1 == T::one()
    }
}

/// Result of one read-out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detection {
    pub reading: Reading,
    /// Registered photons; `None` for models without photon statistics.
    pub photon_count: Option<u64>,
}

fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite Poisson mean");
    d.sample(rng) as u64
}

/// Reads out an ion whose true level is `|1⟩` iff `true_state_is_one`.
pub fn detect<T: Real, R: Rng + ?Sized>(true_state_is_one: bool, model: &DetectionModel<T>, rng: &mut R) -> Detection {
    match model.photons {
        Some(stats) => {
            let mean = if true_state_is_one { stats.on_mean } else { stats.off_mean };
            let count = sample_poisson(to_f64(mean), rng);
            let reading = if count > u64::from(stats.threshold) { Reading::On } else { Reading::Off };
            Detection { reading, photon_count: Some(count) }
        }
        None => {
            let correct = if true_state_is_one { model.eta1 } else { model.eta0 };
            let ok = correct == T::one() || rng.random::<f64>() < to_f64(correct);
            let reading = match (true_state_is_one, ok) {
                (true, true) | (false, false) => Reading::On,
                _ => Reading::Off,
            };
            Detection { reading, photon_count: None }
        }
    }
}
