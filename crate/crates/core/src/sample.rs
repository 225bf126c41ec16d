//! Seeded random operators and states used by the sampled checks.
//!
//! Every generator takes an explicit RNG so that sampled predicates such as
//! repeatability are deterministic for a fixed seed.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{Operator, Vector, C64};
use crate::povm::{Effect, State};

/// Seed of the deterministic state sample.
pub const DEFAULT_SEED: u64 = 0x5eed_0f57_a7e5;
/// Number of Haar-random pure states added to the basis states.
pub const RANDOM_STATES: usize = 32;

fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

fn ginibre(dim: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

/// Haar-distributed unit vector.
pub fn haar_vector(dim: usize, rng: &mut impl Rng) -> Vector {
    Vector::new((0..dim).map(|_| gaussian(rng)).collect()).normalized()
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> Operator {
    let qr = ginibre(dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..dim {
            q[(row, k)] *= phase;
        }
    }
    Operator::new(q).expect("square")
}

/// Hermitian matrix with independent Gaussian entries (GUE scaling).
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> Operator {
    let g = Operator::new(ginibre(dim, rng)).expect("square");
    g.hermitian_part()
}

/// Full-rank mixed state `G G† / tr(G G†)`.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> State {
    let g = Operator::new(ginibre(dim, rng)).expect("square");
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    State::new(w.scale_real(1.0 / tr).hermitian_part()).expect("positive by construction")
}

pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> State {
    State::pure(&haar_vector(dim, rng)).expect("unit vector")
}

/// Effect with Haar eigenbasis and eigenvalues uniform in `[0, 1]`.
pub fn random_effect(dim: usize, rng: &mut impl Rng) -> Effect {
    let u = random_unitary(dim, rng);
    let diag: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let op = Operator::real_diagonal(&diag).conjugate_by(&u).hermitian_part();
    Effect::new(op).expect("spectrum in [0, 1]")
}

/// Uniform point in the closed ball of radius `radius` in ℝ³.
pub fn random_ball_point(radius: f64, rng: &mut impl Rng) -> [f64; 3] {
    let dir = random_direction(rng);
    let r = radius * rng.random::<f64>().cbrt();
    [r * dir[0], r * dir[1], r * dir[2]]
}

pub fn random_direction(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-9 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Computational basis states followed by seeded Haar-random pure states.
pub fn state_sample(dim: usize) -> Vec<State> {
    state_sample_with(dim, DEFAULT_SEED, RANDOM_STATES)
}

pub fn state_sample_with(dim: usize, seed: u64, random: usize) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<State> = (0..dim)
        .map(|k| State::pure(&Vector::basis(dim, k)).expect("unit vector"))
        .collect();
    out.extend((0..random).map(|_| random_pure_state(dim, &mut rng)));
    out
}
