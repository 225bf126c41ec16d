use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::povm::{DiscreteObservable, Effect};
use crate::tol;

/// Outcome count above which exhaustive subset enumeration is refused.
pub const MAX_SUBSET_OUTCOMES: usize = 16;

/// Projection onto the eigenvalue-1 eigenspace (zero operator if empty).
pub fn eigenspace_one(e: &Effect) -> Result<Operator> {
    eigenspace_one_with(e, tol::UNIT_EIGENVALUE)
}

/// [`eigenspace_one`] with an explicit eigenvalue threshold.
pub fn eigenspace_one_with(e: &Effect, threshold: f64) -> Result<Operator> {
    let eig = e.op().eigh()?;
    Ok(eig.spectral_projection(|x| (x - 1.0).abs() <= threshold))
}

/// Projection onto the kernel of an effect.
pub fn eigenspace_zero(e: &Effect) -> Result<Operator> {
    eigenspace_one(&e.complement())
}

/// Projection onto `range(P) ∩ range(Q)`.
///
/// Computed as the null space of `(I - P) + (I - Q)`, which is positive and
/// vanishes exactly on the common range.
pub fn meet_projections(p: &Operator, q: &Operator) -> Result<Operator> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    for m in [p, q] {
        let residual = m.projection_residual();
        if residual > tol::PROJECTION {
            return Err(Error::NotProjection { residual });
        }
    }
    let id = Operator::identity(p.dim());
    let s = &(&id - p) + &(&id - q);
    let eig = s.hermitian_part().eigh()?;
    Ok(eig.spectral_projection(|x| x < tol::UNIT_EIGENVALUE))
}

fn is_zero(p: &Operator) -> bool {
    p.max_abs() <= tol::ZERO_OPERATOR
}

/// Effects of every outcome set whose effect is neither `O` nor `I`.
fn nontrivial_set_effects(obs: &DiscreteObservable) -> Result<Vec<Effect>> {
    let k = obs.len();
    if k > MAX_SUBSET_OUTCOMES {
        return Err(Error::TooManyOutcomes(k));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << k) {
        let idx: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).collect();
        let e = Effect::trusted(obs.sum_indices(&idx));
        if !e.is_zero() && !e.is_identity() {
            out.push(e);
        }
    }
    Ok(out)
}

/// Projection-valued complementarity: every pair of nontrivial outcome-set
/// projections meets only in the zero projection.
///
/// Complements of outcome sets are themselves outcome sets, so checking all
/// pairs `(X, Y)` covers the complemented pairs. Returns `false` when no
/// nontrivial pair exists.
pub fn are_complementary(e1: &DiscreteObservable, e2: &DiscreteObservable) -> Result<bool> {
    if e1.dim() != e2.dim() {
        return Err(Error::DimensionMismatch {
            expected: e1.dim(),
            found: e2.dim(),
        });
    }
    if !e1.is_projection_valued(tol::PROJECTION) || !e2.is_projection_valued(tol::PROJECTION) {
        return Err(Error::NotProjectionValued);
    }
    let xs = nontrivial_set_effects(e1)?;
    let ys = nontrivial_set_effects(e2)?;
    if xs.is_empty() || ys.is_empty() {
        return Ok(false);
    }
    for x in &xs {
        for y in &ys {
            if !is_zero(&meet_projections(x.op(), y.op())?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Probabilistic complementarity: no state makes an outcome set of one
/// observable certain while an outcome set of the other is certain or
/// impossible.
///
/// Returns `false` when no nontrivial pair exists.
pub fn are_prob_complementary(e1: &DiscreteObservable, e2: &DiscreteObservable) -> Result<bool> {
    if e1.dim() != e2.dim() {
        return Err(Error::DimensionMismatch {
            expected: e1.dim(),
            found: e2.dim(),
        });
    }
    let xs = nontrivial_set_effects(e1)?;
    let ys = nontrivial_set_effects(e2)?;
    if xs.is_empty() || ys.is_empty() {
        return Ok(false);
    }
    let spaces = |es: &[Effect]| -> Result<Vec<(Operator, Operator)>> {
        es.iter()
            .map(|e| Ok((eigenspace_one(e)?, eigenspace_zero(e)?)))
            .collect()
    };
    let sx = spaces(&xs)?;
    let sy = spaces(&ys)?;
    for (x_one, x_zero) in &sx {
        for (y_one, y_zero) in &sy {
            let x_certain = !is_zero(x_one);
            let y_certain = !is_zero(y_one);
            if x_certain && y_certain && !is_zero(&meet_projections(x_one, y_one)?) {
                return Ok(false);
            }
            if x_certain && !is_zero(y_zero) && !is_zero(&meet_projections(x_one, y_zero)?) {
                return Ok(false);
            }
            if y_certain && !is_zero(x_zero) && !is_zero(&meet_projections(y_one, x_zero)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
