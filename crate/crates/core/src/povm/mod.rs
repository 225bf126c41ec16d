//! Effects, states and discrete observables.
//!
//! A [`DiscreteObservable`] is a finite family of [`Effect`]s indexed by
//! [`Label`]s and summing to the identity. Outcome sets are represented as
//! slices of labels; the effect of a set is the sum of its members' effects.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Operator, Vector};
use crate::tol;

mod complementarity;
mod joint;
mod scheme;
mod transformer;

pub use complementarity::{
    are_complementary, are_prob_complementary, eigenspace_one, eigenspace_one_with,
    eigenspace_zero, meet_projections, MAX_SUBSET_OUTCOMES,
};
pub use joint::{find_joint_observable, joint_margin, joint_observable_feasible, JOINT_MARGIN_TOL};
pub use scheme::{MeasurementScheme, PointerSupport};
pub use transformer::StateTransformer;

/// Outcome label: an integer or a tuple of integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Int(i64),
    Tuple(Vec<i64>),
}

impl Label {
    pub fn pair(a: i64, b: i64) -> Self {
        Label::Tuple(vec![a, b])
    }

    pub fn arity(&self) -> Option<usize> {
        match self {
            Label::Int(_) => None,
            Label::Tuple(t) => Some(t.len()),
        }
    }

    /// Flattened components; an integer label has one component.
    pub fn components(&self) -> Vec<i64> {
        match self {
            Label::Int(v) => vec![*v],
            Label::Tuple(t) => t.clone(),
        }
    }

    /// Tuple label formed by concatenating the components of `a` and `b`.
    pub fn join(a: &Label, b: &Label) -> Label {
        let mut c = a.components();
        c.extend(b.components());
        Label::Tuple(c)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(v) => write!(f, "{v}"),
            Label::Tuple(t) => {
                write!(f, "(")?;
                for (k, v) in t.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Int(v)
    }
}

/// Hermitian operator with spectrum in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Effect {
    op: Operator,
}

impl Effect {
    pub fn new(op: Operator) -> Result<Self> {
        let residual = op.hermiticity_residual();
        if residual > tol::HERMITIAN {
            return Err(Error::NotHermitian { residual });
        }
        let (min, max) = op.spectral_range()?;
        if min < -tol::POSITIVITY || max > 1.0 + tol::POSITIVITY {
            return Err(Error::NotAnEffect { min, max });
        }
        Ok(Self { op })
    }

    /// Wraps an operator known to be an effect by construction.
    pub(crate) fn trusted(op: Operator) -> Self {
        Self { op }
    }

    pub fn zero(dim: usize) -> Self {
        Self::trusted(Operator::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::trusted(Operator::identity(dim))
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `I - E`
    pub fn complement(&self) -> Effect {
        Self::trusted(&Operator::identity(self.dim()) - &self.op)
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.op.is_projection(tol)
    }

    /// `‖E² - E‖` entrywise.
    pub fn idempotency_defect(&self) -> f64 {
        (&self.op * &self.op).max_abs_diff(&self.op)
    }

    pub fn is_zero(&self) -> bool {
        self.op.max_abs() <= tol::ZERO_OPERATOR
    }

    pub fn is_identity(&self) -> bool {
        self.op.max_abs_diff(&Operator::identity(self.dim())) <= tol::ZERO_OPERATOR
    }
}

/// Positive operator of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    op: Operator,
}

impl State {
    pub fn new(op: Operator) -> Result<Self> {
        let residual = op.hermiticity_residual();
        if residual > tol::HERMITIAN {
            return Err(Error::NotHermitian { residual });
        }
        let trace = op.trace().re;
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::NotNormalized { trace });
        }
        let (min, _) = op.spectral_range()?;
        if min < -tol::POSITIVITY {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { op })
    }

    pub(crate) fn trusted(op: Operator) -> Self {
        Self { op }
    }

    /// Vector state `|v⟩⟨v|`; `v` must be a unit vector.
    pub fn pure(v: &Vector) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > tol::UNIT_VECTOR {
            return Err(Error::NotNormalized { trace: n * n });
        }
        Ok(Self::trusted(v.projector()))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        Self::trusted(Vector::basis(dim, k).projector())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(Operator::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn tensor(&self, other: &State) -> State {
        State::trusted(self.op.tensor(&other.op))
    }

    pub fn evolve(&self, u: &Operator) -> State {
        State::trusted(self.op.conjugate_by(u))
    }
}

/// `tr[T E]` clamped to `[0, 1]` when within tolerance of the boundary.
pub fn probability(state: &State, effect: &Effect) -> Result<f64> {
    if state.dim() != effect.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: effect.dim(),
        });
    }
    Ok(clamp_probability(trace_product(state.op(), effect.op())))
}

/// `Re tr[A B]` without forming the product.
pub fn trace_product(a: &Operator, b: &Operator) -> f64 {
    let (ma, mb) = (a.matrix(), b.matrix());
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (ma[(i, j)] * mb[(j, i)]).re;
        }
    }
    acc
}

pub(crate) fn clamp_probability(p: f64) -> f64 {
    if (-tol::POSITIVITY..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + tol::POSITIVITY {
        1.0
    } else {
        p
    }
}

/// Finite family of effects indexed by distinct labels and summing to `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteObservable {
    outcomes: Vec<Label>,
    effects: Vec<Effect>,
}

impl DiscreteObservable {
    pub fn new(outcomes: Vec<Label>, effects: Vec<Effect>) -> Result<Self> {
        let obs = Self::unchecked_completeness(outcomes, effects)?;
        let residual = obs.completeness_residual();
        if residual > tol::COMPLETENESS {
            return Err(Error::Incomplete { residual });
        }
        Ok(obs)
    }

    /// Builds from raw operators, validating each as an effect.
    pub fn from_operators(outcomes: Vec<Label>, ops: Vec<Operator>) -> Result<Self> {
        let effects = ops.into_iter().map(Effect::new).collect::<Result<Vec<_>>>()?;
        Self::new(outcomes, effects)
    }

    fn unchecked_completeness(outcomes: Vec<Label>, effects: Vec<Effect>) -> Result<Self> {
        if outcomes.len() != effects.len() || outcomes.is_empty() {
            return Err(Error::LengthMismatch {
                outcomes: outcomes.len(),
                effects: effects.len(),
            });
        }
        let dim = effects[0].dim();
        for e in &effects {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
        }
        let mut seen = HashSet::new();
        for l in &outcomes {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        Ok(Self { outcomes, effects })
    }

    /// Two-outcome observable `{E, I - E}`.
    pub fn binary(effect: Effect, yes: Label, no: Label) -> Result<Self> {
        let c = effect.complement();
        Self::new(vec![yes, no], vec![effect, c])
    }

    /// Trivial observable `p_k · I`.
    pub fn trivial(dim: usize, outcomes: Vec<Label>, weights: &[f64]) -> Result<Self> {
        let effects = weights
            .iter()
            .map(|&w| Effect::new(Operator::identity(dim).scale_real(w)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes, effects)
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn outcomes(&self) -> &[Label] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Effect)> {
        self.outcomes.iter().zip(self.effects.iter())
    }

    pub fn index_of(&self, label: &Label) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn effect(&self, label: &Label) -> Result<&Effect> {
        Ok(&self.effects[self.index_of(label)?])
    }

    /// Effect of an outcome set; duplicates in `set` count once.
    pub fn effect_of_set(&self, set: &[Label]) -> Result<Effect> {
        let mut idx: Vec<usize> = set.iter().map(|l| self.index_of(l)).collect::<Result<_>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(Effect::trusted(self.sum_indices(&idx)))
    }

    pub(crate) fn sum_indices(&self, idx: &[usize]) -> Operator {
        let mut acc = Operator::zeros(self.dim());
        for &k in idx {
            acc = &acc + self.effects[k].op();
        }
        acc
    }

    /// Entrywise `‖Σ E - I‖`.
    pub fn completeness_residual(&self) -> f64 {
        let all: Vec<usize> = (0..self.len()).collect();
        self.sum_indices(&all)
            .max_abs_diff(&Operator::identity(self.dim()))
    }

    /// Smallest eigenvalue over all effects.
    pub fn min_eigenvalue(&self) -> f64 {
        self.effects
            .iter()
            .map(|e| e.op().spectral_range().map(|r| r.0).unwrap_or(f64::NAN))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn probabilities(&self, state: &State) -> Result<Vec<f64>> {
        self.effects.iter().map(|e| probability(state, e)).collect()
    }

    pub fn is_projection_valued(&self, tol: f64) -> bool {
        self.effects.iter().all(|e| e.is_projection(tol))
    }

    /// Largest entrywise deviation between corresponding effects.
    ///
    /// Outcomes are matched by label; labels missing on either side fail.
    pub fn max_deviation(&self, other: &DiscreteObservable) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                outcomes: self.len(),
                effects: other.len(),
            });
        }
        let mut worst: f64 = 0.0;
        for (l, e) in self.iter() {
            worst = worst.max(e.op().max_abs_diff(other.effect(l)?.op()));
        }
        Ok(worst)
    }

    /// Groups outcomes by `f`, summing effects; groups keep first-appearance order.
    pub fn coarse_grain(&self, f: impl Fn(&Label) -> Label) -> Result<Self> {
        let mut labels: Vec<Label> = Vec::new();
        let mut ops: Vec<Operator> = Vec::new();
        for (l, e) in self.iter() {
            let target = f(l);
            match labels.iter().position(|x| *x == target) {
                Some(k) => ops[k] = &ops[k] + e.op(),
                None => {
                    labels.push(target);
                    ops.push(e.op().clone());
                }
            }
        }
        let effects = ops.into_iter().map(Effect::trusted).collect();
        Self::new(labels, effects)
    }

    /// Marginal on one component of tuple labels.
    pub fn marginal(&self, axis: usize) -> Result<Self> {
        let arity = self.outcomes[0].arity().ok_or(Error::NonTupleLabels)?;
        if self.outcomes.iter().any(|l| l.arity() != Some(arity)) {
            return Err(Error::NonTupleLabels);
        }
        if axis >= arity {
            return Err(Error::AxisOutOfRange { axis, arity });
        }
        self.coarse_grain(|l| Label::Int(l.components()[axis]))
    }

    /// Product `E₁(i) E₂(j)` of two observables with pairwise commuting effects.
    pub fn commuting_product(a: &Self, b: &Self) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        let mut labels = Vec::new();
        let mut effects = Vec::new();
        for (la, ea) in a.iter() {
            for (lb, eb) in b.iter() {
                labels.push(Label::join(la, lb));
                effects.push(Effect::new((ea.op() * eb.op()).hermitian_part())?);
            }
        }
        Self::new(labels, effects)
    }

    /// True when every pair of effects commutes within `tol`.
    pub fn commutes_with(&self, other: &Self, tol: f64) -> bool {
        self.effects.iter().all(|e| {
            other
                .effects
                .iter()
                .all(|f| e.op().commutator(f.op()).max_abs() <= tol)
        })
    }

    /// Unitarily conjugated observable `U† E U`.
    pub fn heisenberg(&self, u: &Operator) -> Self {
        let effects = self
            .effects
            .iter()
            .map(|e| Effect::trusted(e.op().conjugate_by_adjoint(u)))
            .collect();
        Self {
            outcomes: self.outcomes.clone(),
            effects,
        }
    }

    /// Compression `V† E V` to the range of an isometry `V` (columns).
    pub fn compress(&self, basis: &[Vector]) -> Result<Self> {
        let k = basis.len();
        let effects = self
            .effects
            .iter()
            .map(|e| {
                let op = Operator::from_fn(k, |r, c| basis[r].inner(&e.op().apply(&basis[c])));
                Effect::trusted(op.hermitian_part())
            })
            .collect();
        Self::new(self.outcomes.clone(), effects)
    }
}

/// Marginal on one component of tuple labels.
pub fn marginal(obs: &DiscreteObservable, axis: usize) -> Result<DiscreteObservable> {
    obs.marginal(axis)
}
