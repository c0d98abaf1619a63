//! Adaptive Bayesian estimation of an unknown pure qubit state.
//!
//! Knowledge about the state is a probability density `w(θ, φ)` on the Bloch
//! sphere, stored on a product quadrature grid (Gauss–Legendre in `cos θ`,
//! uniform in `φ`). Each measurement outcome multiplies `w` by the Born
//! likelihood `(1 ± m̂·n̂)/2` and renormalizes.
//!
//! Because the likelihood is affine in `n̂`, the fidelity map
//! `F(n̂) = ∮ w(n̂′)(1 + n̂·n̂′)/2 dΩ′` only depends on the mean Bloch vector
//! `r = ∮ w n̂′ dΩ′`, and the expected fidelity after measuring along `m̂`
//! only on `r` and the second moment `Q = ∮ w n̂′n̂′ᵀ dΩ′`:
//!
//! ```text
//! F(n̂)   = (1 + n̂·r) / 2              maximal at r/|r|, F_opt = (1 + |r|)/2
//! F̄(m̂)   = 1/2 + (|r + Q m̂| + |r − Q m̂|) / 4
//! ```

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;

use crate::bloch::{born_probability, Bloch, DetectionModel, Direction, Outcome};
use crate::error::{domain, Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::rng::RngSeed;
use crate::scalar::{lit, to_f64, Real};

/// Resolution of the product grid on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Gauss–Legendre nodes in `cos θ`.
    pub n_theta: usize,
    /// Equally spaced azimuths.
    pub n_phi: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_theta: 64, n_phi: 128 }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes in descending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// Quadrature grid on the unit sphere. Node `k = i·n_phi + j` has the
/// `i`-th smallest colatitude and azimuth `2πj / n_phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid<T> {
    spec: GridSpec,
    angles: Vec<(T, T)>,
    units: Vec<Vec3<T>>,
    weights: Vec<T>,
}

impl<T: Real> SphereGrid<T> {
    pub fn new(spec: GridSpec) -> Result<Self> {
        if spec.n_theta < 2 || spec.n_phi < 4 || spec.n_theta * spec.n_phi < 8 {
            return domain(format!("sphere grid {}x{} is degenerate", spec.n_theta, spec.n_phi));
        }
        let (xs, ws) = gauss_legendre(spec.n_theta);
        let dphi = std::f64::consts::TAU / spec.n_phi as f64;
        let n = spec.n_theta * spec.n_phi;
        let mut angles = Vec::with_capacity(n);
        let mut units = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (x, w) in xs.iter().zip(&ws) {
            let theta = x.acos();
            for j in 0..spec.n_phi {
                let phi = j as f64 * dphi;
                let d = Direction::new(lit::<T>(theta), lit::<T>(phi))?;
                angles.push((d.theta(), d.phi()));
                units.push(d.unit());
                weights.push(lit(w * dphi));
            }
        }
        Ok(SphereGrid { spec, angles, units, weights })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn angles(&self) -> &[(T, T)] {
        &self.angles
    }

    pub fn units(&self) -> &[Vec3<T>] {
        &self.units
    }

    /// Solid-angle weights; they sum to `4π`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `∮ f dΩ` under this rule.
    pub fn integrate(&self, f: impl Fn(&Vec3<T>) -> T) -> T {
        self.units.iter().zip(&self.weights).map(|(u, w)| *w * f(u)).sum()
    }

    pub fn first_node(&self) -> Direction<T> {
        let (t, p) = self.angles[0];
        Direction::new(t, p).expect("grid angles are in range")
    }
}

/// First and second moments of a density on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    /// Mean Bloch vector `r`.
    pub mean: Vec3<T>,
    /// `Q = ∮ w n̂ n̂ᵀ dΩ`; trace 1.
    pub second: Mat3<T>,
}

/// Probability density per unit solid angle sampled on a [`SphereGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SphereDensity<T> {
    grid: Arc<SphereGrid<T>>,
    values: Vec<T>,
}

/// Constant density `1/4π`.
pub fn uniform_prior<T: Real>(grid: Arc<SphereGrid<T>>) -> SphereDensity<T> {
    let v = (lit::<T>(4.0) * T::PI()).recip();
    let values = vec![v; grid.len()];
    SphereDensity { grid, values }
}

impl<T: Real> SphereDensity<T> {
    /// Density from unnormalized nonnegative node values; normalizes them.
    pub fn from_values(grid: Arc<SphereGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain(format!("{} values for a grid of {} nodes", values.len(), grid.len()));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Invariant("density values must be finite and nonnegative".into()));
        }
        SphereDensity { grid, values }.normalized()
    }

    pub fn from_fn(grid: Arc<SphereGrid<T>>, f: impl Fn(&Vec3<T>) -> T) -> Result<Self> {
        let values = grid.units().iter().map(f).collect();
        Self::from_values(grid, values)
    }

    fn normalized(mut self) -> Result<Self> {
        let z = self.integral();
        if !(z > T::zero()) {
            return Err(Error::Degenerate { probability: to_f64(z) });
        }
        let inv = z.recip();
        self.values.iter_mut().for_each(|v| *v = *v * inv);
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `∮ w dΩ`.
    pub fn integral(&self) -> T {
        self.values.iter().zip(self.grid.weights()).map(|(v, w)| *v * *w).sum()
    }

    pub fn mean_vector(&self) -> Vec3<T> {
        let mut r = Vec3::zero();
        for ((v, w), u) in self.values.iter().zip(self.grid.weights()).zip(self.grid.units()) {
            r += *u * (*v * *w);
        }
        r
    }

    pub fn moments(&self) -> Moments<T> {
        let mut r = Vec3::zero();
        let mut q = [[T::zero(); 3]; 3];
        for ((v, w), u) in self.values.iter().zip(self.grid.weights()).zip(self.grid.units()) {
            let m = *v * *w;
            r += *u * m;
            for i in 0..3 {
                for j in i..3 {
                    q[i][j] = q[i][j] + m * u[i] * u[j];
                }
            }
        }
        for i in 0..3 {
            for j in 0..i {
                q[i][j] = q[j][i];
            }
        }
        Moments { mean: r, second: Mat3(q) }
    }
}

/// Probability of the `+1` outcome along `direction` under `dist`.
pub fn outcome_probability<T: Real>(dist: &SphereDensity<T>, direction: &Direction<T>) -> T {
    let p = (T::one() + dist.mean_vector().dot(&direction.unit())) * lit(0.5);
    p.max(T::zero()).min(T::one())
}

/// Posterior after observing `outcome` when measuring along `direction`.
pub fn bayes_update<T: Real>(dist: &SphereDensity<T>, direction: &Direction<T>, outcome: Outcome) -> Result<SphereDensity<T>> {
    let m = match outcome {
        Outcome::Plus => direction.unit(),
        Outcome::Minus => -direction.unit(),
    };
    let half = lit::<T>(0.5);
    let values: Vec<T> = dist
        .values
        .iter()
        .zip(dist.grid.units())
        .map(|(w, n)| *w * ((T::one() + m.dot(n)) * half).max(T::zero()))
        .collect();
    let post = SphereDensity { grid: Arc::clone(&dist.grid), values };
    let p = post.integral();
    if !(p > T::epsilon()) {
        return Err(Error::Degenerate { probability: to_f64(p) });
    }
    post.normalized()
}

/// `F(n̂) = (1 + n̂·r)/2`: fidelity of the pure state `n̂` averaged over the density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityMap<T> {
    mean: Vec3<T>,
}

impl<T: Real> FidelityMap<T> {
    pub fn at(&self, direction: &Direction<T>) -> T {
        self.at_unit(&direction.unit())
    }

    pub fn at_unit(&self, n: &Vec3<T>) -> T {
        (T::one() + n.dot(&self.mean)) * lit(0.5)
    }

    pub fn mean_vector(&self) -> Vec3<T> {
        self.mean
    }
}

pub fn fidelity_map<T: Real>(dist: &SphereDensity<T>) -> FidelityMap<T> {
    FidelityMap { mean: dist.mean_vector() }
}

/// Best pure-state estimate and its fidelity `F_opt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub direction: Direction<T>,
    pub fidelity: T,
}

/// The maximizer of the fidelity map, `r/|r|`, with `F_opt = (1 + |r|)/2`.
///
/// For a density with vanishing mean vector every direction is optimal and
/// the first grid node is returned.
pub fn estimate_state<T: Real>(dist: &SphereDensity<T>) -> Estimate<T> {
    estimate_from_mean(&dist.mean_vector(), &dist.grid)
}

fn estimate_from_mean<T: Real>(r: &Vec3<T>, grid: &SphereGrid<T>) -> Estimate<T> {
    let len = r.norm();
    let fidelity = (T::one() + len) * lit(0.5);
    if len <= T::invariant_tol() {
        return Estimate { direction: grid.first_node(), fidelity };
    }
    let direction = Direction::from_vector(r).expect("nonzero mean vector");
    Estimate { direction, fidelity }
}

/// Expected `F_opt` after one more measurement along `m̂`, averaged over both outcomes.
pub fn expected_mean_fidelity<T: Real>(dist: &SphereDensity<T>, candidate: &Direction<T>) -> T {
    expected_from_moments(&dist.moments(), &candidate.unit())
}

fn expected_from_moments<T: Real>(m: &Moments<T>, dir: &Vec3<T>) -> T {
    lit::<T>(0.5) + objective(m, dir) * lit(0.25)
}

fn objective<T: Real>(m: &Moments<T>, dir: &Vec3<T>) -> T {
    let qm = m.second * *dir;
    (m.mean + qm).norm() + (m.mean - qm).norm()
}

/// Settings of the direction search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSettings {
    /// Fibonacci points on the upper hemisphere for the coarse scan.
    pub coarse_points: usize,
    /// Rounds of local grid refinement.
    pub refine_rounds: usize,
    /// Half-width, in steps, of each local refinement grid; the step shrinks by this factor per round.
    pub refine_span: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings { coarse_points: 400, refine_rounds: 2, refine_span: 3 }
    }
}

/// Choice of the next measurement axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionChoice<T> {
    pub direction: Direction<T>,
    /// Expected mean fidelity after measuring along `direction`.
    pub expected_fidelity: T,
    /// The objective varied by less than `1e-6` over the coarse scan.
    pub flat: bool,
}

/// `n` Fibonacci points on the hemisphere `z > 0`, starting next to the pole.
pub fn fibonacci_hemisphere<T: Real>(n: usize) -> Vec<Vec3<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = i as f64 * golden;
            Vec3::new(lit(r * a.cos()), lit(r * a.sin()), lit(z))
        })
        .collect()
}

/// `n` Fibonacci points covering the whole sphere.
pub fn fibonacci_sphere<T: Real>(n: usize) -> Vec<Vec3<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = i as f64 * golden;
            Vec3::new(lit(r * a.cos()), lit(r * a.sin()), lit(z))
        })
        .collect()
}

fn tangent_basis<T: Real>(m: &Vec3<T>) -> (Vec3<T>, Vec3<T>) {
    let helper = if m.x().abs() < lit(0.9) { Vec3::unit_x() } else { Vec3::unit_y() };
    let e1 = m.cross(&helper).normalized().expect("helper not parallel");
    let e2 = m.cross(&e1);
    (e1, e2)
}

/// Measurement axis maximizing [`expected_mean_fidelity`].
///
/// The objective is even in `m̂`, so the search runs over the upper
/// hemisphere and the result has `θ ≤ π/2`. A flat objective (uniform
/// prior) yields `+z`.
pub fn optimal_next_direction<T: Real>(dist: &SphereDensity<T>, settings: &SearchSettings) -> DirectionChoice<T> {
    optimal_from_moments(&dist.moments(), settings)
}

fn optimal_from_moments<T: Real>(moments: &Moments<T>, settings: &SearchSettings) -> DirectionChoice<T> {
    let coarse = fibonacci_hemisphere::<T>(settings.coarse_points.max(1));
    let mut best = coarse[0];
    let mut best_val = objective(moments, &best);
    let mut min_val = best_val;
    for p in &coarse[1..] {
        let v = objective(moments, p);
        if v > best_val {
            best = *p;
            best_val = v;
        }
        min_val = min_val.min(v);
    }
    if (best_val - min_val) * lit(0.25) < lit(1e-6) {
        let direction = Direction::plus_z();
        return DirectionChoice { direction, expected_fidelity: expected_from_moments(moments, &direction.unit()), flat: true };
    }

    let span = settings.refine_span.max(1) as i64;
    let mut step = lit::<T>((std::f64::consts::TAU / settings.coarse_points.max(1) as f64).sqrt());
    for _ in 0..settings.refine_rounds {
        let (e1, e2) = tangent_basis(&best);
        let center = best;
        for a in -span..=span {
            for b in -span..=span {
                if a == 0 && b == 0 {
                    continue;
                }
                let offset = e1 * (step * lit(a as f64)) + e2 * (step * lit(b as f64));
                let cand = (center + offset).normalized().expect("nonzero candidate");
                let v = objective(moments, &cand);
                if v > best_val {
                    best = cand;
                    best_val = v;
                }
            }
        }
        step = step / lit(span as f64);
    }
    if best.z() < T::zero() {
        best = -best;
    }
    let direction = Direction::from_vector(&best).expect("unit vector");
    DirectionChoice { direction, expected_fidelity: lit::<T>(0.5) + best_val * lit(0.25), flat: false }
}

/// Depolarization plus detection bias, acting as
/// `ρ → (1 − 2λ)ρ + λI + Δη σ_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Imperfections<T> {
    lambda: T,
    delta_eta: T,
}

impl<T: Real> Imperfections<T> {
    pub fn new(lambda: T, delta_eta: T) -> Result<Self> {
        if !(lambda >= T::zero() && lambda <= lit(0.5)) {
            return domain(format!("lambda = {lambda} outside [0, 1/2]"));
        }
        if !(delta_eta.abs() <= lit(0.25)) {
            return domain(format!("delta_eta = {delta_eta} outside [-1/4, 1/4]"));
        }
        Ok(Imperfections { lambda, delta_eta })
    }

    /// `|1 − 2λ| + 2|Δη| ≤ 1`: every state stays inside the Bloch ball.
    pub fn preserves_ball(&self) -> bool {
        let shrink = (T::one() - lit::<T>(2.0) * self.lambda).abs();
        shrink + lit::<T>(2.0) * self.delta_eta.abs() <= T::one() + T::invariant_tol()
    }

    pub fn ideal() -> Self {
        Imperfections { lambda: T::zero(), delta_eta: T::zero() }
    }

    /// Bias taken from a read-out model, `Δη = (η₁ − η₀)/2`.
    pub fn from_detection(lambda: T, detection: &DetectionModel<T>) -> Result<Self> {
        Self::new(lambda, detection.delta_eta())
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn delta_eta(&self) -> T {
        self.delta_eta
    }

    pub fn is_ideal(&self) -> bool {
        self.lambda == T::zero() && self.delta_eta == T::zero()
    }
}

/// `s′ = ((1 − 2λ)s_x, (1 − 2λ)s_y, (1 − 2λ)s_z + 2Δη)`.
pub fn apply_imperfections<T: Real>(s: &Bloch<T>, params: &Imperfections<T>) -> Result<Bloch<T>> {
    let k = T::one() - lit::<T>(2.0) * params.lambda;
    let v = s.vector() * k + Vec3::unit_z() * (lit::<T>(2.0) * params.delta_eta);
    Bloch::new(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Each axis maximizes the expected posterior fidelity.
    SelfLearning,
    /// Axes drawn uniformly on the sphere.
    Random,
    /// Axes cycle through x, y, z.
    FixedAxes,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::SelfLearning => "self",
            Strategy::Random => "random",
            Strategy::FixedAxes => "fixed",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "self" | "self-learning" | "self_learning" => Ok(Strategy::SelfLearning),
            "random" => Ok(Strategy::Random),
            "fixed" | "fixed-axes" | "fixed_axes" => Ok(Strategy::FixedAxes),
            other => domain(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategyConfig {
    pub kind: Strategy,
    pub n_measurements: usize,
    pub grid: GridSpec,
    pub search: SearchSettings,
}

impl StrategyConfig {
    pub fn new(kind: Strategy, n_measurements: usize) -> Self {
        StrategyConfig { kind, n_measurements, grid: GridSpec::default(), search: SearchSettings::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_measurements == 0 {
            return domain("number of measurements must be at least 1");
        }
        Ok(())
    }
}

/// Directions and outcomes of one estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord<T> {
    pub directions: Vec<Direction<T>>,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationRun<T> {
    pub estimate: Estimate<T>,
    /// `cos²(γ/2)` between the estimate and the intended pure state.
    pub fidelity: T,
    pub record: MeasurementRecord<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateResult<T> {
    pub true_state: Direction<T>,
    pub fidelity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityStats<T> {
    pub mean: T,
    pub stderr: T,
    pub per_state: Vec<StateResult<T>>,
}

/// Sequential estimator sharing one quadrature grid across runs.
#[derive(Debug, Clone)]
pub struct Estimator<T> {
    config: StrategyConfig,
    grid: Arc<SphereGrid<T>>,
}

fn random_direction<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Direction<T> {
    let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
    Direction::from_vector(&Vec3::new(lit(x), lit(y), lit(z))).expect("unit vector")
}

impl<T: Real> Estimator<T> {
    pub fn new(config: StrategyConfig) -> Result<Self> {
        config.validate()?;
        let grid = Arc::new(SphereGrid::new(config.grid)?);
        Ok(Estimator { config, grid })
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.config
    }

    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        &self.grid
    }

    pub fn prior(&self) -> SphereDensity<T> {
        uniform_prior(Arc::clone(&self.grid))
    }

    fn next_direction<R: Rng + ?Sized>(&self, step: usize, dist: &SphereDensity<T>, rng: &mut R) -> Direction<T> {
        match self.config.kind {
            Strategy::SelfLearning => optimal_next_direction(dist, &self.config.search).direction,
            Strategy::Random => random_direction(rng),
            Strategy::FixedAxes => [Direction::plus_x(), Direction::plus_y(), Direction::plus_z()][step % 3],
        }
    }

    /// Measures `n_measurements` fresh copies of `true_state`, each passed
    /// through `imperfections` first. The estimator itself assumes ideal
    /// conditions.
    pub fn run<R: Rng + ?Sized>(&self, true_state: &Direction<T>, imperfections: &Imperfections<T>, rng: &mut R) -> Result<EstimationRun<T>> {
        if !imperfections.preserves_ball() {
            return domain(format!(
                "lambda = {}, delta_eta = {} map some states outside the Bloch ball",
                imperfections.lambda, imperfections.delta_eta
            ));
        }
        let physical = apply_imperfections(&true_state.bloch(), imperfections)?;
        let n = self.config.n_measurements;
        let mut dist = self.prior();
        let mut directions = Vec::with_capacity(n);
        let mut outcomes = Vec::with_capacity(n);
        for step in 0..n {
            let dir = self.next_direction(step, &dist, rng);
            let p = to_f64(born_probability(&physical, &dir));
            let outcome = if rng.random::<f64>() < p { Outcome::Plus } else { Outcome::Minus };
            dist = bayes_update(&dist, &dir, outcome)?;
            directions.push(dir);
            outcomes.push(outcome);
        }
        let estimate = estimate_state(&dist);
        let fidelity = (T::one() + estimate.direction.unit().dot(&true_state.unit())) * lit(0.5);
        Ok(EstimationRun { estimate, fidelity, record: MeasurementRecord { directions, outcomes } })
    }

    /// Mean fidelity over `num_states` states drawn uniformly on the sphere.
    ///
    /// State `i` and its measurement outcomes come from stream `i` of `seed`.
    pub fn mean_fidelity(&self, num_states: usize, imperfections: &Imperfections<T>, seed: RngSeed) -> Result<FidelityStats<T>> {
        if num_states == 0 {
            return domain("num_states must be at least 1");
        }
        let per_state = (0..num_states as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = seed.stream(i);
                let true_state = random_direction::<T, _>(&mut rng);
                let run = self.run(&true_state, imperfections, &mut rng)?;
                Ok(StateResult { true_state, fidelity: run.fidelity })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = T::from_usize(num_states).unwrap();
        let mean = per_state.iter().map(|s| s.fidelity).sum::<T>() / n;
        let var = if num_states > 1 {
            per_state.iter().map(|s| (s.fidelity - mean) * (s.fidelity - mean)).sum::<T>() / (n - T::one())
        } else {
            T::zero()
        };
        Ok(FidelityStats { mean, stderr: (var / n).sqrt(), per_state })
    }
}

pub fn run_estimation<T: Real, R: Rng + ?Sized>(
    true_state: &Direction<T>,
    config: &StrategyConfig,
    imperfections: &Imperfections<T>,
    rng: &mut R,
) -> Result<EstimationRun<T>> {
    Estimator::new(*config)?.run(true_state, imperfections, rng)
}

pub fn mean_fidelity_experiment<T: Real>(
    num_states: usize,
    config: &StrategyConfig,
    imperfections: &Imperfections<T>,
    seed: RngSeed,
) -> Result<FidelityStats<T>> {
    Estimator::new(*config)?.mean_fidelity(num_states, imperfections, seed)
}
