use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::povm::{trace_product, DiscreteObservable, Effect, Label, State};
use crate::tol;

/// Outcome-indexed completely positive maps in Kraus form.
///
/// Outcome `x` acts as `T ↦ Σᵢ Mᵢ T Mᵢ†` over the operation elements
/// registered for `x`. The total `Σ Mᵢ†Mᵢ` never exceeds the identity.
#[derive(Clone, Debug)]
pub struct StateTransformer {
    outcomes: Vec<Label>,
    kraus: Vec<Vec<Operator>>,
    dim: usize,
}

impl StateTransformer {
    pub fn new(outcomes: Vec<Label>, kraus: Vec<Vec<Operator>>) -> Result<Self> {
        if outcomes.len() != kraus.len() || outcomes.is_empty() {
            return Err(Error::LengthMismatch {
                outcomes: outcomes.len(),
                effects: kraus.len(),
            });
        }
        let dim = kraus
            .iter()
            .flatten()
            .next()
            .map(Operator::dim)
            .ok_or(Error::InvalidParameter("no operation elements".into()))?;
        for m in kraus.iter().flatten() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        for (k, l) in outcomes.iter().enumerate() {
            if outcomes[..k].contains(l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        let t = Self { outcomes, kraus, dim };
        let total = t.total_effect();
        let (_, max) = total.hermitian_part().spectral_range()?;
        if max > 1.0 + tol::COMPLETENESS {
            return Err(Error::TraceIncreasing { max_eigenvalue: max });
        }
        Ok(t)
    }

    /// Lüders transformer `T ↦ E(x)^{1/2} T E(x)^{1/2}`.
    pub fn luders(obs: &DiscreteObservable) -> Result<Self> {
        let kraus = obs
            .effects()
            .iter()
            .map(|e| Ok(vec![e.op().eigh()?.apply_fn(|x| x.max(0.0).sqrt().into())]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(obs.outcomes().to_vec(), kraus)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Label] {
        &self.outcomes
    }

    pub fn kraus(&self, label: &Label) -> Result<&[Operator]> {
        Ok(&self.kraus[self.index_of(label)?])
    }

    fn index_of(&self, label: &Label) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn total_effect(&self) -> Operator {
        let mut acc = Operator::zeros(self.dim);
        for m in self.kraus.iter().flatten() {
            acc = &acc + &(&m.adjoint() * m);
        }
        acc
    }

    fn apply_index(&self, k: usize, t: &Operator) -> Operator {
        let mut acc = Operator::zeros(self.dim);
        for m in &self.kraus[k] {
            acc = &acc + &t.conjugate_by(m);
        }
        acc
    }

    /// Non-normalised conditional state `𝓘(X)(T)`.
    pub fn apply(&self, set: &[Label], t: &Operator) -> Result<Operator> {
        if t.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.dim(),
            });
        }
        let mut idx: Vec<usize> = set.iter().map(|l| self.index_of(l)).collect::<Result<_>>()?;
        idx.sort_unstable();
        idx.dedup();
        let mut acc = Operator::zeros(self.dim);
        for k in idx {
            acc = &acc + &self.apply_index(k, t);
        }
        Ok(acc)
    }

    /// `𝓘(Ω)(T)`, the unconditioned post-measurement state.
    pub fn apply_all(&self, t: &Operator) -> Operator {
        let mut acc = Operator::zeros(self.dim);
        for k in 0..self.kraus.len() {
            acc = &acc + &self.apply_index(k, t);
        }
        acc
    }

    /// Effects `Σᵢ Mᵢ†Mᵢ`; fails unless they sum to the identity.
    pub fn compatible_observable(&self) -> Result<DiscreteObservable> {
        let effects = self
            .kraus
            .iter()
            .map(|ms| {
                let mut acc = Operator::zeros(self.dim);
                for m in ms {
                    acc = &acc + &(&m.adjoint() * m);
                }
                Effect::new(acc.hermitian_part())
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteObservable::new(self.outcomes.clone(), effects)
    }

    /// `tr 𝓘(x)(T) = tr 𝓘(x)(𝓘(x)(T))` for every outcome and sampled state.
    pub fn is_repeatable(&self, sample: &[State]) -> bool {
        sample.iter().all(|s| {
            (0..self.kraus.len()).all(|k| {
                let once = self.apply_index(k, s.op());
                let twice = self.apply_index(k, &once);
                (once.trace().re - twice.trace().re).abs() <= tol::REPEATABILITY
            })
        })
    }

    /// `is_repeatable` on the default deterministic sample.
    pub fn is_repeatable_default(&self) -> bool {
        self.is_repeatable(&crate::sample::state_sample(self.dim))
    }

    /// Largest `|tr[T E(x)] - tr[𝓘(Ω)(T) E(x)]|` over outcomes and sampled states.
    pub fn first_kind_defect(&self, sample: &[State]) -> Result<f64> {
        let obs = self.compatible_observable()?;
        let mut worst: f64 = 0.0;
        for s in sample {
            let after = self.apply_all(s.op());
            for e in obs.effects() {
                let before = trace_product(s.op(), e.op());
                let later = trace_product(&after, e.op());
                worst = worst.max((before - later).abs());
            }
        }
        Ok(worst)
    }

    pub fn is_first_kind(&self, sample: &[State], tol: f64) -> Result<bool> {
        Ok(self.first_kind_defect(sample)? <= tol)
    }
}
