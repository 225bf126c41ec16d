//! Joint measurability of two-outcome qubit observables.
//!
//! Write every qubit operator as `½(t₀ I + t·σ)`; it is positive iff
//! `t₀ ≥ ‖t‖`. For `E₁ = {A, I - A}` and `E₂ = {B, I - B}` a joint
//! observable is fixed by its first effect `G`, the other three being
//! `A - G`, `B - G` and `I - A - B + G`. For fixed Bloch part `g` the best
//! scalar part is explicit, which leaves a concave function of `g ∈ ℝ³`:
//!
//! `h(g) = ½ [min(a₀ - ‖a - g‖, b₀ - ‖b - g‖) - max(‖g‖, ‖g - a - b‖ - 2 + a₀ + b₀)]`
//!
//! A joint observable exists iff `max h ≥ 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli;
use crate::povm::{DiscreteObservable, Effect, Label};
use crate::spin::{self, BlochVector};
use crate::tol;

/// Margin below which the numeric search declares infeasibility.
pub const JOINT_MARGIN_TOL: f64 = 1e-6;

const GRID_STEP: f64 = 0.05;
const MIN_STEP: f64 = 1e-9;
const RANDOM_DIRECTIONS: usize = 48;

type V3 = [f64; 3];

fn norm(v: V3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

struct Problem {
    a0: f64,
    a: V3,
    b0: f64,
    b: V3,
}

impl Problem {
    fn bounds(&self, g: V3) -> (f64, f64) {
        let ab = [self.a[0] + self.b[0], self.a[1] + self.b[1], self.a[2] + self.b[2]];
        let upper = (self.a0 - norm(sub(self.a, g))).min(self.b0 - norm(sub(self.b, g)));
        let lower = norm(g).max(norm(sub(g, ab)) - 2.0 + self.a0 + self.b0);
        (lower, upper)
    }

    fn margin(&self, g: V3) -> f64 {
        let (lo, hi) = self.bounds(g);
        0.5 * (hi - lo)
    }

    /// Scalar part at the centre of the admissible interval.
    fn g0(&self, g: V3) -> f64 {
        let (lo, hi) = self.bounds(g);
        0.5 * (lo + hi)
    }

    fn maximise(&self) -> (f64, V3) {
        let mut starts: Vec<(f64, V3)> = Vec::new();
        let n = (1.0 / GRID_STEP).round() as i32;
        for i in -n..=n {
            for j in -n..=n {
                for k in -n..=n {
                    let g = [
                        i as f64 * GRID_STEP,
                        j as f64 * GRID_STEP,
                        k as f64 * GRID_STEP,
                    ];
                    starts.push((self.margin(g), g));
                }
            }
        }
        for g in [
            [0.0; 3],
            [0.5 * (self.a[0] + self.b[0]), 0.5 * (self.a[1] + self.b[1]), 0.5 * (self.a[2] + self.b[2])],
        ] {
            starts.push((self.margin(g), g));
        }
        starts.sort_by(|x, y| y.0.total_cmp(&x.0));
        starts.truncate(4);

        let dirs = directions();
        starts
            .into_iter()
            .map(|(m, g)| self.pattern_search(m, g, &dirs))
            .max_by(|x, y| x.0.total_cmp(&y.0))
            .expect("nonempty")
    }

    fn pattern_search(&self, mut best: f64, mut g: V3, dirs: &[V3]) -> (f64, V3) {
        let mut step = GRID_STEP;
        while step > MIN_STEP {
            let mut improved = false;
            for d in dirs {
                let cand = [g[0] + step * d[0], g[1] + step * d[1], g[2] + step * d[2]];
                let m = self.margin(cand);
                if m > best {
                    best = m;
                    g = cand;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        (best, g)
    }
}

fn directions() -> Vec<V3> {
    let mut out = Vec::new();
    for i in -1..=1 {
        for j in -1..=1 {
            for k in -1..=1 {
                if (i, j, k) != (0, 0, 0) {
                    let v = [i as f64, j as f64, k as f64];
                    let n = norm(v);
                    out.push([v[0] / n, v[1] / n, v[2] / n]);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x10c7);
    for _ in 0..RANDOM_DIRECTIONS {
        let v = [
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
            rng.random::<f64>() - 0.5,
        ];
        let n = norm(v);
        if n > 1e-6 {
            out.push([v[0] / n, v[1] / n, v[2] / n]);
        }
    }
    out
}

fn check_inputs(e1: &DiscreteObservable, e2: &DiscreteObservable) -> Result<()> {
    for e in [e1, e2] {
        if e.dim() != 2 {
            return Err(Error::UnsupportedDimension {
                supported: 2,
                found: e.dim(),
            });
        }
        if e.len() != 2 {
            return Err(Error::NotTwoValued(e.len()));
        }
    }
    Ok(())
}

fn problem(e1: &DiscreteObservable, e2: &DiscreteObservable) -> Problem {
    let (a0, a) = pauli::coordinates(e1.effects()[0].op());
    let (b0, b) = pauli::coordinates(e2.effects()[0].op());
    Problem { a0, a, b0, b }
}

fn is_spin_form(p: &Problem) -> bool {
    (p.a0 - 1.0).abs() <= tol::COMPLETENESS && (p.b0 - 1.0).abs() <= tol::COMPLETENESS
}

/// Largest achievable value of the smallest joint-effect eigenvalue margin.
///
/// Nonnegative iff the pair is jointly measurable (up to search accuracy).
pub fn joint_margin(e1: &DiscreteObservable, e2: &DiscreteObservable) -> Result<f64> {
    check_inputs(e1, e2)?;
    Ok(problem(e1, e2).maximise().0)
}

/// Whether two two-outcome qubit observables admit a joint observable.
///
/// Unsharp spin pairs are decided by the exact Bloch criterion; commuting
/// pairs are jointly measurable by their product. Other pairs are decided by
/// maximising the concave margin `h` with tolerance [`JOINT_MARGIN_TOL`].
pub fn joint_observable_feasible(e1: &DiscreteObservable, e2: &DiscreteObservable) -> Result<bool> {
    check_inputs(e1, e2)?;
    let p = problem(e1, e2);
    if is_spin_form(&p) {
        return Ok(spin::coexist_criterion(&BlochVector::new(p.a), &BlochVector::new(p.b)));
    }
    if e1.commutes_with(e2, tol::HERMITIAN) {
        return Ok(true);
    }
    Ok(p.maximise().0 >= -JOINT_MARGIN_TOL)
}

/// A joint observable with labels `(i, j)` joining the input labels, if one
/// can be exhibited with all effects positive within tolerance.
pub fn find_joint_observable(
    e1: &DiscreteObservable,
    e2: &DiscreteObservable,
) -> Result<Option<DiscreteObservable>> {
    check_inputs(e1, e2)?;
    if e1.commutes_with(e2, tol::HERMITIAN) {
        return DiscreteObservable::commuting_product(e1, e2).map(Some);
    }
    let p = problem(e1, e2);
    let (g0, g) = if is_spin_form(&p) {
        if !spin::coexist_criterion(&BlochVector::new(p.a), &BlochVector::new(p.b)) {
            return Ok(None);
        }
        // the joint spin observable's (+,+) effect
        let alpha = 0.5 * (1.0 + p.a[0] * p.b[0] + p.a[1] * p.b[1] + p.a[2] * p.b[2]);
        (alpha, [0.5 * (p.a[0] + p.b[0]), 0.5 * (p.a[1] + p.b[1]), 0.5 * (p.a[2] + p.b[2])])
    } else {
        let (m, g) = p.maximise();
        if m < -JOINT_MARGIN_TOL {
            return Ok(None);
        }
        (p.g0(g), g)
    };
    let gop = pauli::combination(0.5 * g0, [0.5 * g[0], 0.5 * g[1], 0.5 * g[2]]);
    let a = e1.effects()[0].op();
    let b = e2.effects()[0].op();
    let id = crate::linalg::Operator::identity(2);
    let ops = [
        gop.clone(),
        a - &gop,
        b - &gop,
        &(&(&id - a) - b) + &gop,
    ];
    let mut effects = Vec::with_capacity(4);
    for op in ops {
        match Effect::new(op) {
            Ok(e) => effects.push(e),
            Err(Error::NotAnEffect { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    let (l1, l2) = (e1.outcomes(), e2.outcomes());
    let labels = vec![
        Label::join(&l1[0], &l2[0]),
        Label::join(&l1[0], &l2[1]),
        Label::join(&l1[1], &l2[0]),
        Label::join(&l1[1], &l2[1]),
    ];
    DiscreteObservable::new(labels, effects).map(Some)
}
