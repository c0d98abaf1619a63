//! Quantum-Zeno experiments: a drive interrupted by projective probes.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::bloch::{detect, evolve, measure, Bloch, DetectionModel, Direction, Outcome, Pulse, Reading};
use crate::error::{domain, Result};
use crate::rng::RngSeed;
use crate::scalar::{lit, to_f64, Real};

/// Probability `cos^{2q}(θ/2)` of remaining in the initial level through
/// `q` drive steps of nutation angle `θ`, each followed by a probe.
pub fn survival_probability<T: Real>(theta_per_step: T, q: u32) -> T {
    let c = (theta_per_step * lit(0.5)).cos();
    (c * c).powi(q as i32)
}

/// `P_e1 = ½[1 − cosⁿ(θ/n)]`: net excitation when the `n` fractions of
/// `theta_total` are each followed by a probe, counting every path.
pub fn net_transition_probability<T: Real>(theta_total: T, n: u32) -> Result<T> {
    if n == 0 {
        return domain("number of fractions must be at least 1");
    }
    let c = (theta_total / T::from_u32(n).unwrap()).cos();
    Ok((T::one() - c.powi(n as i32)) * lit(0.5))
}

/// Parameters of a fractionated-pulse experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoConfig<T> {
    /// Number of drive fractions `N`, each followed by one probe.
    pub n_fractions: u32,
    /// Total nutation angle of the unfractionated drive.
    pub total_area: T,
    /// Number of repetitions of prepare / drive-and-probe.
    pub sequences: u32,
    /// Spacing between drive fractions in seconds. Not used by the dynamics.
    pub probe_gap: T,
    pub detection: DetectionModel<T>,
    /// Probability that preparation actually yields `|0⟩`; otherwise `|1⟩`.
    pub prep_efficiency: T,
}

impl<T: Real> ZenoConfig<T> {
    /// A fractionated π pulse under ideal conditions with `2000/N` repetitions.
    pub fn fractionated_pi(n_fractions: u32) -> Self {
        ZenoConfig {
            n_fractions,
            total_area: T::PI(),
            sequences: (2000 / n_fractions.max(1)).max(1),
            probe_gap: lit(3e-3),
            detection: DetectionModel::ideal(),
            prep_efficiency: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_fractions == 0 {
            return domain("n_fractions must be at least 1");
        }
        if self.sequences == 0 {
            return domain("sequences must be at least 1");
        }
        if !(self.prep_efficiency > T::zero() && self.prep_efficiency <= T::one()) {
            return domain(format!("prep_efficiency {} outside (0, 1]", self.prep_efficiency));
        }
        if !self.total_area.is_finite() {
            return domain("total_area must be finite");
        }
        Ok(())
    }

    pub fn step_angle(&self) -> T {
        self.total_area / T::from_u32(self.n_fractions).unwrap()
    }

    /// Ideal survival `cos^{2N}(θ_total / 2N)`.
    pub fn ideal_survival(&self) -> T {
        survival_probability(self.step_angle(), self.n_fractions)
    }

    /// Expected frequency of all-`Off` records for a perfectly prepared `|0⟩`
    /// and for a mis-prepared `|1⟩`, including read-out errors.
    pub fn expected_all_off(&self) -> (T, T) {
        let c = {
            let h = (self.step_angle() * lit(0.5)).cos();
            h * h
        };
        let s = T::one() - c;
        let off = [self.detection.off_probability(false), self.detection.off_probability(true)];
        let run = |start: usize| {
            // weight[k] = P(all readings Off so far, true level k)
            let mut w = [T::zero(); 2];
            w[start] = T::one();
            for _ in 0..self.n_fractions {
                let to0 = w[0] * c + w[1] * s;
                let to1 = w[0] * s + w[1] * c;
                w = [to0 * off[0], to1 * off[1]];
            }
            w[0] + w[1]
        };
        (run(0), run(1))
    }

    /// Maps an observed all-`Off` frequency back to the ideal survival scale.
    ///
    /// The mis-prepared contribution `(1 − p)·A₁` is subtracted and the rest
    /// rescaled by `p·κ`, where `κ = A₀ / P₀₀` is the read-out efficiency of
    /// a surviving sequence. Identity under ideal conditions.
    pub fn correct_survival(&self, observed: T) -> T {
        let p = self.prep_efficiency;
        if p == T::one() && self.detection.is_ideal() {
            return observed;
        }
        let (_, a1) = self.expected_all_off();
        (observed - (T::one() - p) * a1) / self.correction_scale()
    }

    /// `p·κ`, the factor by which a survival difference is rescaled.
    fn correction_scale(&self) -> T {
        if self.prep_efficiency == T::one() && self.detection.is_ideal() {
            return T::one();
        }
        let ideal = self.ideal_survival();
        let (a0, _) = self.expected_all_off();
        let kappa = if ideal > T::zero() { a0 / ideal } else { T::one() };
        self.prep_efficiency * kappa
    }
}

/// Read-outs of one prepare / drive-and-probe sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRecord {
    /// Whether preparation left the ion in `|1⟩` instead of `|0⟩`.
    pub misprepared: bool,
    pub readings: Vec<Reading>,
    pub photon_counts: Vec<Option<u64>>,
}

impl SequenceRecord {
    pub fn all_off(&self) -> bool {
        self.readings.iter().all(|r| *r == Reading::Off)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionatedRun<T> {
    pub config: ZenoConfig<T>,
    pub seed: RngSeed,
    /// Fraction of sequences with only `Off` read-outs.
    pub raw_survival: T,
    /// `raw_survival` after [`ZenoConfig::correct_survival`].
    pub corrected_survival: T,
    /// Binomial standard error of `corrected_survival`.
    pub stderr: T,
    pub records: Vec<SequenceRecord>,
}

/// Resonant unit-Rabi pulse with nutation angle `theta`; negative angles flip the drive phase.
fn step_pulse<T: Real>(theta: T) -> Result<Pulse<T>> {
    let (area, phase) = if theta < T::zero() { (-theta, T::PI()) } else { (theta, T::zero()) };
    Pulse::new(T::one(), T::zero(), area, phase)
}

fn run_sequence<T: Real, R: Rng>(cfg: &ZenoConfig<T>, pulse: &Pulse<T>, rng: &mut R) -> SequenceRecord {
    let z = Direction::plus_z();
    let misprepared = cfg.prep_efficiency < T::one() && rng.random::<f64>() >= to_f64(cfg.prep_efficiency);
    let mut state = if misprepared { Bloch::excited() } else { Bloch::ground() };
    let n = cfg.n_fractions as usize;
    let mut readings = Vec::with_capacity(n);
    let mut photon_counts = Vec::with_capacity(n);
    for _ in 0..n {
        state = evolve(&state, pulse);
        let (outcome, collapsed) = measure(&state, &z, rng);
        state = collapsed;
        let d = detect(outcome == Outcome::Minus, &cfg.detection, rng);
        readings.push(d.reading);
        photon_counts.push(d.photon_count);
    }
    SequenceRecord { misprepared, readings, photon_counts }
}

/// Runs `config.sequences` repetitions of: prepare `|0⟩`, then `N` times
/// (drive a resonant pulse of area `θ_total/N`, probe in the z basis).
///
/// Sequence `i` draws from stream `i` of `seed`.
pub fn simulate_fractionated_pi<T: Real>(config: &ZenoConfig<T>, seed: RngSeed) -> Result<FractionatedRun<T>> {
    config.validate()?;
    let pulse = step_pulse(config.step_angle())?;
    let records: Vec<SequenceRecord> = (0..config.sequences as u64)
        .into_par_iter()
        .map(|i| run_sequence(config, &pulse, &mut seed.stream(i)))
        .collect();
    let survivors = records.iter().filter(|r| r.all_off()).count();
    let n = T::from_u32(config.sequences).unwrap();
    let raw = T::from_usize(survivors).unwrap() / n;
    let raw_se = (raw * (T::one() - raw) / n).sqrt();
    Ok(FractionatedRun {
        config: *config,
        seed,
        raw_survival: raw,
        corrected_survival: config.correct_survival(raw),
        stderr: raw_se / config.correction_scale(),
        records,
    })
}

/// Record of a long drive/probe series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub readings: Vec<Reading>,
    pub seed: RngSeed,
    pub theta_per_step: T,
    pub detection: DetectionModel<T>,
}

impl<T> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.readings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.readings.is_empty()
    }
}

/// `n_pairs` alternations of a resonant drive pulse of area `theta_per_step`
/// and an ideal z-basis probe, starting from `|0⟩`.
pub fn simulate_alternating<T: Real>(theta_per_step: T, n_pairs: usize, seed: RngSeed) -> Result<Trajectory<T>> {
    simulate_alternating_with(theta_per_step, n_pairs, DetectionModel::ideal(), seed)
}

pub fn simulate_alternating_with<T: Real>(
    theta_per_step: T,
    n_pairs: usize,
    detection: DetectionModel<T>,
    seed: RngSeed,
) -> Result<Trajectory<T>> {
    if n_pairs == 0 {
        return domain("n_pairs must be at least 1");
    }
    if !theta_per_step.is_finite() {
        return domain("theta_per_step must be finite");
    }
    let pulse = step_pulse(theta_per_step)?;
    let z = Direction::plus_z();
    let mut rng = seed.rng();
    let mut state = Bloch::ground();
    let mut readings = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        state = evolve(&state, &pulse);
        let (outcome, collapsed) = measure(&state, &z, &mut rng);
        state = collapsed;
        readings.push(detect(outcome == Outcome::Minus, &detection, &mut rng).reading);
    }
    Ok(Trajectory { readings, seed, theta_per_step, detection })
}

/// Histogram of maximal runs of equal read-outs.
///
/// The final run of a trajectory may be cut off by its end and is not counted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunLengths {
    pub counts: BTreeMap<usize, u64>,
    pub total_runs: u64,
}

impl RunLengths {
    pub fn count(&self, q: usize) -> u64 {
        self.counts.get(&q).copied().unwrap_or(0)
    }

    /// `U(q)`: fraction of complete runs with length `q`.
    pub fn u<T: Real>(&self, q: usize) -> T {
        if self.total_runs == 0 {
            return T::zero();
        }
        T::from_u64(self.count(q)).unwrap() / T::from_u64(self.total_runs).unwrap()
    }

    /// `U(q)` for every observed run length.
    pub fn normalized<T: Real>(&self) -> BTreeMap<usize, T> {
        self.counts.keys().map(|&q| (q, self.u(q))).collect()
    }

    /// `U(q)/U(1)`, which estimates `cos^{2(q−1)}(θ/2)`.
    pub fn ratio<T: Real>(&self, q: usize) -> Option<T> {
        let n1 = self.count(1);
        (n1 > 0).then(|| T::from_u64(self.count(q)).unwrap() / T::from_u64(n1).unwrap())
    }

    /// Multinomial standard error of [`RunLengths::ratio`] evaluated at the
    /// expected counts `total·(1−c)c^{q−1}` for per-step stay probability `c`.
    pub fn ratio_stderr<T: Real>(&self, q: usize, stay_probability: T) -> T {
        let m = T::from_u64(self.total_runs).unwrap();
        let p = |k: usize| (T::one() - stay_probability) * stay_probability.powi(k as i32 - 1);
        let (e1, eq) = (m * p(1), m * p(q));
        if eq <= T::zero() || e1 <= T::zero() {
            return T::zero();
        }
        let r = eq / e1;
        r * (eq.recip() + e1.recip()).sqrt()
    }
}

pub fn run_length_distribution<T>(trajectory: &Trajectory<T>) -> Result<RunLengths> {
    run_lengths(&trajectory.readings)
}

pub fn run_lengths(readings: &[Reading]) -> Result<RunLengths> {
    if readings.is_empty() {
        return domain("run-length statistics need a nonempty trajectory");
    }
    let mut out = RunLengths::default();
    let mut current = 1usize;
    for w in readings.windows(2) {
        if w[0] == w[1] {
            current += 1;
        } else {
            *out.counts.entry(current).or_insert(0) += 1;
            out.total_runs += 1;
            current = 1;
        }
    }
    Ok(out)
}
