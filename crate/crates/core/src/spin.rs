//! Unsharp spin-½ observables and the covariant spin-phase observable.
//!
//! An unsharp spin property is `F(a) = ½(I + a·σ)` with `‖a‖ ≤ 1`; it is a
//! projection exactly when `‖a‖ = 1`. Two such properties are jointly
//! measurable iff `‖a₁ + a₂‖ + ‖a₁ - a₂‖ ≤ 2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Operator, C64, ZERO};
use crate::pauli;
use crate::povm::{DiscreteObservable, Effect, Label};
use crate::tol;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub a: [f64; 3],
}

impl BlochVector {
    pub fn new(a: [f64; 3]) -> Self {
        Self { a }
    }

    pub fn zero() -> Self {
        Self::new([0.0; 3])
    }

    pub fn x() -> Self {
        Self::new([1.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        Self::new([0.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        Self::new([0.0, 0.0, 1.0])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.a.iter().zip(other.a.iter()).map(|(x, y)| x * y).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new([s * self.a[0], s * self.a[1], s * self.a[2]])
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new([self.a[0] + other.a[0], self.a[1] + other.a[1], self.a[2] + other.a[2]])
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    fn check(&self) -> Result<()> {
        let n = self.norm();
        if n > 1.0 + tol::BLOCH_BOUNDARY {
            return Err(Error::BlochNormTooLarge(n));
        }
        Ok(())
    }
}

/// `F(a) = ½(I + a·σ)`
pub fn spin_effect(a: &BlochVector) -> Result<Effect> {
    a.check()?;
    Ok(Effect::trusted(pauli::combination(
        0.5,
        [0.5 * a.a[0], 0.5 * a.a[1], 0.5 * a.a[2]],
    )))
}

/// Two-valued observable `{F(a), F(-a)}` labelled `+1`, `-1`.
pub fn spin_observable(a: &BlochVector) -> Result<DiscreteObservable> {
    DiscreteObservable::new(
        vec![Label::Int(1), Label::Int(-1)],
        vec![spin_effect(a)?, spin_effect(&a.neg())?],
    )
}

/// `‖a₁ + a₂‖ + ‖a₁ - a₂‖`
pub fn coexist_value(a1: &BlochVector, a2: &BlochVector) -> f64 {
    a1.add(a2).norm() + a1.sub(a2).norm()
}

pub fn coexist_criterion(a1: &BlochVector, a2: &BlochVector) -> bool {
    coexist_value(a1, a2) <= 2.0 + tol::BLOCH_BOUNDARY
}

fn in_ball(p: [f64; 3], centre: [f64; 3], r: f64, slack: f64) -> bool {
    let d = [p[0] - centre[0], p[1] - centre[1], p[2] - centre[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() <= r + slack
}

fn project_ball(p: [f64; 3], centre: [f64; 3], r: f64) -> [f64; 3] {
    let d = [p[0] - centre[0], p[1] - centre[1], p[2] - centre[2]];
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if n <= r {
        p
    } else {
        let s = r.max(0.0) / n;
        [centre[0] + s * d[0], centre[1] + s * d[1], centre[2] + s * d[2]]
    }
}

fn balls(a1: &BlochVector, a2: &BlochVector, gamma: f64) -> [([f64; 3], f64); 4] {
    [
        (a1.a, 1.0 - gamma),
        (a2.a, 1.0 - gamma),
        (a1.add(a2).a, gamma),
        ([0.0; 3], gamma),
    ]
}

const ORACLE_SLACK: f64 = 1e-12;
const ORACLE_GAMMA_STEPS: usize = 100;
const ORACLE_ITERATIONS: usize = 400;
const ORACLE_STALL: f64 = 1e-15;

/// Joint measurability decided by non-emptiness of the four-ball intersection
/// `S(a₁, 1-γ) ∩ S(a₂, 1-γ) ∩ S(a₁+a₂, γ) ∩ S(0, γ)` for some `γ ∈ [0, 1]`.
///
/// The midpoint `½(a₁ + a₂)` at `γ = ‖½(a₁ + a₂)‖` is tried first; otherwise
/// `γ` is scanned on a grid of step 0.01 and a common point is sought by
/// alternating projections.
pub fn coexist_oracle(a1: &BlochVector, a2: &BlochVector) -> bool {
    let c0 = a1.add(a2).scale(0.5);
    let gamma = c0.norm();
    if balls(a1, a2, gamma)
        .iter()
        .all(|&(c, r)| in_ball(c0.a, c, r, ORACLE_SLACK))
    {
        return true;
    }
    (0..=ORACLE_GAMMA_STEPS).any(|k| {
        let gamma = k as f64 / ORACLE_GAMMA_STEPS as f64;
        let bs = balls(a1, a2, gamma);
        let mut p = c0.a;
        for _ in 0..ORACLE_ITERATIONS {
            let before = p;
            for &(c, r) in &bs {
                p = project_ball(p, c, r);
            }
            if bs.iter().all(|&(c, r)| in_ball(p, c, r, ORACLE_SLACK)) {
                return true;
            }
            // a sweep that no longer moves the point has reached its limit cycle
            let moved = (0..3).map(|i| (p[i] - before[i]).abs()).fold(0.0, f64::max);
            if moved < ORACLE_STALL {
                return false;
            }
        }
        false
    })
}

/// Joint observable of `F(±a₁)` and `F(±a₂)` with labels `(i, k)`, `i, k ∈ {+1, -1}`.
///
/// `G_ik = ½(α_ik I + ½(a_i + a_k)·σ)` with `α_ik = ½(1 + a_i·a_k)`, which is
/// `α_ik F((a_i + a_k)/(2α_ik))` and the zero operator when `α_ik = 0`.
pub fn joint_spin_observable(a1: &BlochVector, a2: &BlochVector) -> Result<DiscreteObservable> {
    a1.check()?;
    a2.check()?;
    let mut labels = Vec::with_capacity(4);
    let mut effects = Vec::with_capacity(4);
    for (si, ai) in [(1i64, *a1), (-1, a1.neg())] {
        for (sk, ak) in [(1i64, *a2), (-1, a2.neg())] {
            let alpha = 0.5 * (1.0 + ai.dot(&ak));
            let c = ai.add(&ak).scale(0.25);
            let g = pauli::combination(0.5 * alpha, c.a);
            let (min, _) = g.spectral_range()?;
            if min < -tol::POSITIVITY {
                return Err(Error::NotCoexistent(coexist_value(a1, a2)));
            }
            labels.push(Label::pair(si, sk));
            effects.push(Effect::trusted(g));
        }
    }
    DiscreteObservable::new(labels, effects)
}

/// Spin-`s` space with `m = -s, …, s` in ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinPhaseSpace {
    twice_s: u32,
}

impl SpinPhaseSpace {
    /// Spin `s = twice_s / 2`; `twice_s ≥ 1`.
    pub fn new(twice_s: u32) -> Result<Self> {
        if twice_s == 0 {
            return Err(Error::InvalidParameter("spin must be positive".into()));
        }
        Ok(Self { twice_s })
    }

    /// Parses a spin value such as `0.5`, `1` or `1.5`.
    pub fn from_spin(s: f64) -> Result<Self> {
        let t = 2.0 * s;
        if !(t.is_finite() && t >= 1.0 && (t - t.round()).abs() < 1e-9) {
            return Err(Error::InvalidParameter(format!("spin {s} is not a positive half-integer")));
        }
        Self::new(t.round() as u32)
    }

    pub fn spin(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice_s as usize + 1
    }

    pub fn m(&self, index: usize) -> f64 {
        index as f64 - self.spin()
    }

    /// `s₃ = diag(-s, …, s)`
    pub fn s3(&self) -> Operator {
        let d: Vec<f64> = (0..self.dim()).map(|k| self.m(k)).collect();
        Operator::real_diagonal(&d)
    }

    /// Raising operator `s₊|m⟩ = √(s(s+1) - m(m+1)) |m+1⟩`.
    pub fn s_plus(&self) -> Operator {
        let s = self.spin();
        Operator::from_fn(self.dim(), |r, c| {
            if r == c + 1 {
                let m = self.m(c);
                C64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
            } else {
                ZERO
            }
        })
    }
}

fn check_interval(u: f64, v: f64) -> Result<()> {
    if !(u.is_finite() && v.is_finite()) || u < -1e-12 || v > TWO_PI + 1e-12 || u > v {
        return Err(Error::MalformedInterval { lo: u, hi: v });
    }
    Ok(())
}

/// Matrix of `∫_u^v e^{i(n-m)α} dα / 2π` over indices `0 … dim-1`.
pub fn phase_kernel(dim: usize, u: f64, v: f64) -> Operator {
    Operator::from_fn(dim, |m, n| {
        let k = n as f64 - m as f64;
        if m == n {
            C64::new((v - u) / TWO_PI, 0.0)
        } else {
            let num = C64::from_polar(1.0, k * v) - C64::from_polar(1.0, k * u);
            num / C64::new(0.0, TWO_PI * k)
        }
    })
}

/// Spin-phase effect of the interval `[u, v] ⊆ [0, 2π]`.
pub fn spin_phase_effect(space: &SpinPhaseSpace, u: f64, v: f64) -> Result<Effect> {
    check_interval(u, v)?;
    Ok(Effect::trusted(phase_kernel(space.dim(), u, v)))
}

/// Spin-phase effect of a finite union of disjoint intervals.
pub fn spin_phase_effect_union(space: &SpinPhaseSpace, intervals: &[(f64, f64)]) -> Result<Effect> {
    let mut acc = Operator::zeros(space.dim());
    for &(u, v) in intervals {
        acc = &acc + spin_phase_effect(space, u, v)?.op();
    }
    Ok(Effect::trusted(acc))
}

/// `[u, v] + α` reduced mod 2π, split at the wraparound.
pub fn shift_interval(u: f64, v: f64, alpha: f64) -> Vec<(f64, f64)> {
    let len = v - u;
    if len >= TWO_PI - 1e-15 {
        return vec![(0.0, TWO_PI)];
    }
    let start = (u + alpha).rem_euclid(TWO_PI);
    let end = start + len;
    if end <= TWO_PI {
        vec![(start, end)]
    } else {
        vec![(start, TWO_PI), (0.0, end - TWO_PI)]
    }
}

/// Entrywise residual of `e^{-iαs₃} S(X) e^{iαs₃} - S(X + α)`.
pub fn spin_phase_covariance_check(space: &SpinPhaseSpace, u: f64, v: f64, alpha: f64) -> Result<f64> {
    let s = spin_phase_effect(space, u, v)?;
    let rot = Operator::diagonal(
        &(0..space.dim())
            .map(|k| C64::from_polar(1.0, -alpha * space.m(k)))
            .collect::<Vec<_>>(),
    );
    let lhs = s.op().conjugate_by(&rot);
    let rhs = spin_phase_effect_union(space, &shift_interval(u, v, alpha))?;
    Ok(lhs.max_abs_diff(rhs.op()))
}

/// `∫ e^{ikα} S(dα)`, entry `(m, n)` equal to `δ_{m-n, k}`.
pub fn spin_phase_moment(space: &SpinPhaseSpace, k: i64) -> Operator {
    Operator::from_fn(space.dim(), |m, n| {
        if m as i64 - n as i64 == k {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    })
}

/// First moment `B = Σ_m |m+1⟩⟨m|`.
pub fn spin_phase_first_moment(space: &SpinPhaseSpace) -> Operator {
    spin_phase_moment(space, 1)
}

/// Spin-phase observable over `bins` equal arcs of `[0, 2π]`, labelled `0 … bins-1`.
pub fn spin_phase_partition(space: &SpinPhaseSpace, bins: usize) -> Result<DiscreteObservable> {
    phase_partition(space.dim(), bins)
}

pub(crate) fn phase_partition(dim: usize, bins: usize) -> Result<DiscreteObservable> {
    if bins == 0 {
        return Err(Error::InvalidParameter("at least one bin is required".into()));
    }
    let width = TWO_PI / bins as f64;
    let effects = (0..bins)
        .map(|k| {
            let u = k as f64 * width;
            let v = if k + 1 == bins { TWO_PI } else { (k + 1) as f64 * width };
            Effect::trusted(phase_kernel(dim, u, v))
        })
        .collect();
    DiscreteObservable::new((0..bins as i64).map(Label::Int).collect(), effects)
}

/// Spectral measure of `s₃` labelled by `2m`.
pub fn s3_observable(space: &SpinPhaseSpace) -> Result<DiscreteObservable> {
    let d = space.dim();
    let effects = (0..d)
        .map(|k| {
            let mut diag = vec![0.0; d];
            diag[k] = 1.0;
            Effect::trusted(Operator::real_diagonal(&diag))
        })
        .collect();
    DiscreteObservable::new(
        (0..d).map(|k| Label::Int((2.0 * space.m(k)).round() as i64)).collect(),
        effects,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn b(x: f64, y: f64, z: f64) -> BlochVector {
        BlochVector::new([x, y, z])
    }

    #[test]
    fn zero_vector_gives_half_identity() {
        let e = spin_effect(&BlochVector::zero()).unwrap();
        assert!(e.op().max_abs_diff(&Operator::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn z_vector_gives_up_projection() {
        let e = spin_effect(&BlochVector::z()).unwrap();
        assert!(e.op().max_abs_diff(&Operator::real_diagonal(&[1.0, 0.0])) < 1e-15);
        assert!(e.is_projection(1e-12));
    }

    #[test]
    fn spin_effect_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..50 {
            let a = BlochVector::new(sample::random_ball_point(1.0, &mut rng));
            let (lo, hi) = spin_effect(&a).unwrap().op().spectral_range().unwrap();
            assert!((lo - 0.5 * (1.0 - a.norm())).abs() < 1e-12);
            assert!((hi - 0.5 * (1.0 + a.norm())).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_effect_rejects_long_vector() {
        assert!(matches!(spin_effect(&b(0.8, 0.8, 0.0)), Err(Error::BlochNormTooLarge(_))));
    }

    #[test]
    fn criterion_examples() {
        assert!(coexist_criterion(&BlochVector::z(), &BlochVector::z()));
        assert!((coexist_value(&BlochVector::x(), &BlochVector::y()) - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!(!coexist_criterion(&BlochVector::x(), &BlochVector::y()));
        let v = coexist_value(&b(0.6, 0.0, 0.0), &b(0.0, 0.6, 0.0));
        assert!((v - 1.2 * 2f64.sqrt()).abs() < 1e-15);
        assert!(coexist_criterion(&b(0.6, 0.0, 0.0), &b(0.0, 0.6, 0.0)));
    }

    #[test]
    fn oracle_examples() {
        let a = b(0.3, -0.4, 0.5);
        assert!(coexist_oracle(&a, &a.neg()));
        assert!(!coexist_oracle(&BlochVector::x(), &BlochVector::y()));
        assert!(coexist_oracle(&b(0.6, 0.0, 0.0), &b(0.0, 0.6, 0.0)));
    }

    #[test]
    fn joint_observable_marginals() {
        let a1 = b(0.6, 0.0, 0.0);
        let a2 = b(0.0, 0.6, 0.0);
        let g = joint_spin_observable(&a1, &a2).unwrap();
        assert!(g.min_eigenvalue() >= 0.0);
        let f1 = spin_effect(&a1).unwrap();
        let sum = g.effect_of_set(&[Label::pair(1, 1), Label::pair(1, -1)]).unwrap();
        assert!(sum.op().max_abs_diff(f1.op()) < 1e-12);
        assert!(g.marginal(0).unwrap().max_deviation(&spin_observable(&a1).unwrap()).unwrap() < 1e-12);
        assert!(g.marginal(1).unwrap().max_deviation(&spin_observable(&a2).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn joint_observable_of_equal_sharp_vectors_is_diagonal() {
        let g = joint_spin_observable(&BlochVector::z(), &BlochVector::z()).unwrap();
        let up = Operator::real_diagonal(&[1.0, 0.0]);
        assert!(g.effect(&Label::pair(1, 1)).unwrap().op().max_abs_diff(&up) < 1e-15);
        assert!(g.effect(&Label::pair(1, -1)).unwrap().op().max_abs() < 1e-15);
        assert!(g.effect(&Label::pair(-1, 1)).unwrap().op().max_abs() < 1e-15);
    }

    #[test]
    fn joint_observable_rejects_incompatible_pair() {
        assert!(matches!(
            joint_spin_observable(&BlochVector::x(), &BlochVector::y()),
            Err(Error::NotCoexistent(_))
        ));
    }

    #[test]
    fn full_circle_is_identity() {
        for t in 1..6 {
            let sp = SpinPhaseSpace::new(t).unwrap();
            let e = spin_phase_effect(&sp, 0.0, TWO_PI).unwrap();
            assert!(e.op().max_abs_diff(&Operator::identity(sp.dim())) < 1e-15);
        }
    }

    #[test]
    fn half_spin_half_circle_eigenvalues() {
        let sp = SpinPhaseSpace::new(1).unwrap();
        let (lo, hi) = spin_phase_effect(&sp, 0.0, PI).unwrap().op().spectral_range().unwrap();
        assert!((lo - (0.5 - 1.0 / PI)).abs() < 1e-14);
        assert!((hi - (0.5 + 1.0 / PI)).abs() < 1e-14);
    }

    #[test]
    fn diagonal_is_uniform() {
        let sp = SpinPhaseSpace::new(5).unwrap();
        for &alpha in &[0.1, 1.0, 3.0, 6.0] {
            let e = spin_phase_effect(&sp, 0.0, alpha).unwrap();
            for m in 0..sp.dim() {
                assert!((e.op().get(m, m).re - alpha / TWO_PI).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn covariance_examples() {
        let sp = SpinPhaseSpace::new(3).unwrap();
        assert_eq!(spin_phase_covariance_check(&sp, 0.5, 2.0, 0.0).unwrap(), 0.0);
        assert!(spin_phase_covariance_check(&sp, 0.0, PI, PI).unwrap() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        for _ in 0..100 {
            let u = rng.random::<f64>() * TWO_PI;
            let v = u + rng.random::<f64>() * (TWO_PI - u);
            let alpha = rng.random::<f64>() * TWO_PI;
            assert!(spin_phase_covariance_check(&sp, u, v, alpha).unwrap() < 1e-10);
        }
    }

    #[test]
    fn malformed_intervals_rejected() {
        let sp = SpinPhaseSpace::new(1).unwrap();
        assert!(spin_phase_effect(&sp, 2.0, 1.0).is_err());
        assert!(spin_phase_effect(&sp, -1.0, 1.0).is_err());
        assert!(spin_phase_effect(&sp, 0.0, 7.0).is_err());
    }

    #[test]
    fn first_moment_properties() {
        let half = SpinPhaseSpace::new(1).unwrap();
        let b = spin_phase_first_moment(&half);
        assert!((&b * &b).max_abs() == 0.0);
        assert_eq!(b.get(1, 0), C64::new(1.0, 0.0));
        for t in 1..7 {
            let sp = SpinPhaseSpace::new(t).unwrap();
            let b = spin_phase_first_moment(&sp);
            assert!((b.norm() - 1.0).abs() < 1e-12);
            // s₃ B - B s₃ = B
            assert!(sp.s3().commutator(&b).max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn first_moment_matches_polar_part_of_raising_operator() {
        for t in 1..7 {
            let sp = SpinPhaseSpace::new(t).unwrap();
            let svd = sp.s_plus().matrix().clone().svd(true, true);
            let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
            let mut polar = nalgebra::DMatrix::<C64>::zeros(sp.dim(), sp.dim());
            for k in 0..sp.dim() {
                if svd.singular_values[k] > 1e-9 {
                    polar += u.column(k) * vt.row(k);
                }
            }
            let polar = Operator::new(polar).unwrap();
            assert!(polar.max_abs_diff(&spin_phase_first_moment(&sp)) < 1e-12);
        }
    }

    #[test]
    fn first_moment_matches_fine_partition_sum() {
        // Σ e^{iα_k} S(bin_k) over midpoints converges to B with sinc(h/2) scaling
        let sp = SpinPhaseSpace::new(4).unwrap();
        let bins = 2000;
        let h = TWO_PI / bins as f64;
        let mut acc = Operator::zeros(sp.dim());
        for k in 0..bins {
            let u = k as f64 * h;
            let mid = u + h / 2.0;
            let s = spin_phase_effect(&sp, u, u + h).unwrap();
            acc = &acc + &s.op().scale(C64::from_polar(1.0, mid));
        }
        let sinc = (h / 2.0).sin() / (h / 2.0);
        let b = spin_phase_first_moment(&sp).scale_real(sinc);
        assert!(acc.max_abs_diff(&b) < 1e-10);
    }

    #[test]
    fn s3_observable_covers_spectrum() {
        let sp = SpinPhaseSpace::new(3).unwrap();
        let o = s3_observable(&sp).unwrap();
        assert_eq!(o.outcomes()[0], Label::Int(-3));
        assert!(o.is_projection_valued(1e-12));
    }

    #[test]
    fn from_spin_parses_half_integers() {
        assert_eq!(SpinPhaseSpace::from_spin(1.5).unwrap().dim(), 4);
        assert!(SpinPhaseSpace::from_spin(0.3).is_err());
        assert!(SpinPhaseSpace::from_spin(0.0).is_err());
    }
}
