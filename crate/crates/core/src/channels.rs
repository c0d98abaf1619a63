//! Affine qubit channels `s′ = M s + v` and their tomography.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::bloch::Bloch;
use crate::error::{domain, Error, Result};
use crate::estimator::fibonacci_sphere;
use crate::linalg::{Mat3, Vec3};
use crate::scalar::{lit, to_f64, Real};

/// Affine map on Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine<T> {
    pub m: Mat3<T>,
    pub v: Vec3<T>,
}

/// Samples used by [`Affine::check_ball`].
pub const BALL_SAMPLES: usize = 1000;

impl<T: Real> Affine<T> {
    /// Raw `(M, v)`; no validity check.
    pub fn new(m: Mat3<T>, v: Vec3<T>) -> Self {
        Affine { m, v }
    }

    pub fn identity() -> Self {
        Affine { m: Mat3::identity(), v: Vec3::zero() }
    }

    /// Largest image norm of [`BALL_SAMPLES`] Fibonacci points on the unit sphere.
    pub fn max_image_norm(&self) -> T {
        fibonacci_sphere::<T>(BALL_SAMPLES)
            .iter()
            .map(|s| self.map(s).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Necessary condition for a physical channel: the sampled sphere maps into the ball.
    pub fn check_ball(&self) -> Result<()> {
        let n = self.max_image_norm();
        if n > T::one() + lit(1e-9) {
            return Err(Error::ChannelInvalid { norm: to_f64(n) });
        }
        Ok(())
    }

    /// `M s + v` without checks.
    pub fn map(&self, s: &Vec3<T>) -> Vec3<T> {
        self.m * *s + self.v
    }

    /// `M s + v`; fails if the image leaves the Bloch ball.
    pub fn apply(&self, s: &Bloch<T>) -> Result<Bloch<T>> {
        let out = self.map(&s.vector());
        let n = out.norm();
        if n > T::one() + lit(1e-9) {
            return Err(Error::ChannelInvalid { norm: to_f64(n) });
        }
        Ok(Bloch::new_unchecked(out))
    }

    pub fn is_unital(&self) -> bool {
        self.v == Vec3::zero()
    }
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !(lambda >= T::zero() && lambda <= lit(0.5)) {
        return domain(format!("lambda = {lambda} outside [0, 1/2]"));
    }
    Ok(())
}

fn check_axis<T: Real>(axis: &Vec3<T>) -> Result<()> {
    if (axis.norm() - T::one()).abs() > lit(1e-9) {
        return domain(format!("axis {:?} is not a unit vector", axis.0));
    }
    Ok(())
}

/// Shrinks the components transverse to `axis` by `1 − 2λ`:
/// `M = (1 − 2λ) I + 2λ n̂ n̂ᵀ`.
pub fn phase_damping<T: Real>(lambda: T, axis: &Vec3<T>) -> Result<Affine<T>> {
    check_lambda(lambda)?;
    check_axis(axis)?;
    let k = T::one() - lit::<T>(2.0) * lambda;
    let m = Mat3::identity().scale(k) + Mat3::outer(axis, axis).scale(lit::<T>(2.0) * lambda);
    Ok(Affine::new(m, Vec3::zero()))
}

/// `M = (1 − 2λ) I`.
pub fn depolarizing<T: Real>(lambda: T) -> Result<Affine<T>> {
    check_lambda(lambda)?;
    Ok(Affine::new(Mat3::identity().scale(T::one() - lit::<T>(2.0) * lambda), Vec3::zero()))
}

pub fn rotation_channel<T: Real>(axis: &Vec3<T>, angle: T) -> Result<Affine<T>> {
    check_axis(axis)?;
    Ok(Affine::new(Mat3::rotation(axis, angle), Vec3::zero()))
}

/// `second ∘ first`: `M = M₂M₁`, `v = M₂v₁ + v₂`.
pub fn compose<T: Real>(first: &Affine<T>, second: &Affine<T>) -> Affine<T> {
    Affine::new(second.m * first.m, second.m * first.v + second.v)
}

/// Declarative description of a channel.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec<T> {
    PhaseDamping { lambda: T, axis: Vec3<T> },
    Depolarizing { lambda: T },
    Rotation { axis: Vec3<T>, angle: T },
    /// Explicit `(M, v)`, e.g. a damping channel with an amplitude-damping shift.
    Raw { m: Mat3<T>, v: Vec3<T> },
    /// Applied in order, first element first.
    Composition(Vec<ChannelSpec<T>>),
}

impl<T: Real> ChannelSpec<T> {
    pub fn build(&self) -> Result<Affine<T>> {
        match self {
            ChannelSpec::PhaseDamping { lambda, axis } => phase_damping(*lambda, axis),
            ChannelSpec::Depolarizing { lambda } => depolarizing(*lambda),
            ChannelSpec::Rotation { axis, angle } => rotation_channel(axis, *angle),
            ChannelSpec::Raw { m, v } => Ok(Affine::new(*m, *v)),
            ChannelSpec::Composition(parts) => {
                parts.iter().try_fold(Affine::identity(), |acc, p| Ok(compose(&acc, &p.build()?)))
            }
        }
    }
}

/// Tomography inputs `+x, +y, +z, −z`.
pub fn probe_states<T: Real>() -> [Vec3<T>; 4] {
    [Vec3::unit_x(), Vec3::unit_y(), Vec3::unit_z(), -Vec3::unit_z()]
}

/// `P[i][j]`: probability of finding `+i` (i ∈ x, y, z) after sending input `j`
/// (j ∈ +x, +y, +z, −z) through the box.
pub type ProbabilityTable<T> = [[T; 4]; 3];

/// Born probabilities of the 12 tomography settings.
pub fn tomography_probabilities<T: Real>(black_box: impl Fn(&Vec3<T>) -> Vec3<T>) -> ProbabilityTable<T> {
    let mut p = [[T::zero(); 4]; 3];
    for (j, input) in probe_states::<T>().iter().enumerate() {
        let out = black_box(input);
        for (i, row) in p.iter_mut().enumerate() {
            row[j] = ((T::one() + out[i]) * lit(0.5)).max(T::zero()).min(T::one());
        }
    }
    p
}

/// `M_ij = 2P_ij − P_iz − P_i(−z)` for `j ∈ {x, y}`, `M_iz = P_iz − P_i(−z)`,
/// `v_i = P_iz + P_i(−z) − 1`.
pub fn reconstruct<T: Real>(p: &ProbabilityTable<T>) -> Affine<T> {
    let two = lit::<T>(2.0);
    let mut m = Mat3::zero();
    let mut v = Vec3::zero();
    for i in 0..3 {
        let (pz, pmz) = (p[i][2], p[i][3]);
        m.0[i][0] = two * p[i][0] - pz - pmz;
        m.0[i][1] = two * p[i][1] - pz - pmz;
        m.0[i][2] = pz - pmz;
        v.0[i] = pz + pmz - T::one();
    }
    Affine::new(m, v)
}

/// Reconstructs `(M, v)` of an affine black box from exact probabilities.
pub fn tomography_exact<T: Real>(black_box: impl Fn(&Vec3<T>) -> Vec3<T>) -> Affine<T> {
    reconstruct(&tomography_probabilities(black_box))
}

/// Standard errors of a reconstructed channel, entry by entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStderr<T> {
    pub m: Mat3<T>,
    pub v: Vec3<T>,
}

/// Propagates per-setting binomial variances `P(1−P)/shots` through [`reconstruct`].
pub fn propagate_stderr<T: Real>(p: &ProbabilityTable<T>, shots: u64) -> ChannelStderr<T> {
    let n = T::from_u64(shots).unwrap();
    let var = |x: T| x * (T::one() - x) / n;
    let four = lit::<T>(4.0);
    let mut m = Mat3::zero();
    let mut v = Vec3::zero();
    for i in 0..3 {
        let (vz, vmz) = (var(p[i][2]), var(p[i][3]));
        m.0[i][0] = (four * var(p[i][0]) + vz + vmz).sqrt();
        m.0[i][1] = (four * var(p[i][1]) + vz + vmz).sqrt();
        m.0[i][2] = (vz + vmz).sqrt();
        v.0[i] = (vz + vmz).sqrt();
    }
    ChannelStderr { m, v }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledTomography<T> {
    pub channel: Affine<T>,
    /// Plug-in standard errors from the observed frequencies.
    pub stderr: ChannelStderr<T>,
    pub frequencies: ProbabilityTable<T>,
    pub shots: u64,
}

/// Tomography with each probability replaced by the frequency of `shots` simulated single-shot measurements.
pub fn tomography_sampled<T: Real, R: Rng + ?Sized>(channel: &Affine<T>, shots: u64, rng: &mut R) -> Result<SampledTomography<T>> {
    if shots == 0 {
        return domain("shots must be at least 1");
    }
    let exact = tomography_probabilities(|s| channel.map(s));
    let mut freq = [[T::zero(); 4]; 3];
    for i in 0..3 {
        for j in 0..4 {
            let d = Binomial::new(shots, to_f64(exact[i][j])).map_err(|e| Error::Domain(e.to_string()))?;
            let hits = d.sample(rng);
            freq[i][j] = T::from_u64(hits).unwrap() / T::from_u64(shots).unwrap();
        }
    }
    Ok(SampledTomography { channel: reconstruct(&freq), stderr: propagate_stderr(&freq, shots), frequencies: freq, shots })
}
