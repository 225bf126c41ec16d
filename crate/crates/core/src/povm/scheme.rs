use crate::error::{Error, Result};
use crate::linalg::{Operator, C64, ZERO};
use crate::povm::{trace_product, DiscreteObservable, Effect, Label, State, StateTransformer};
use crate::tol;

/// Where the pointer observable acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointerSupport {
    /// Pointer effects act on the probe factor only.
    Probe,
    /// Pointer effects act on the joint system ⊗ probe space.
    Joint,
}

/// Coupling, probe preparation, pointer observable and pointer function.
///
/// Pointer outcome `k` is reported as `pointer_map[k]`; several pointer
/// outcomes may share a reported label.
#[derive(Clone, Debug)]
pub struct MeasurementScheme {
    coupling: Operator,
    probe: State,
    pointer: DiscreteObservable,
    pointer_map: Vec<Label>,
    support: PointerSupport,
    system_dim: usize,
}

impl MeasurementScheme {
    pub fn new(
        coupling: Operator,
        probe: State,
        pointer: DiscreteObservable,
        pointer_map: Vec<Label>,
        support: PointerSupport,
    ) -> Result<Self> {
        let probe_dim = probe.dim();
        if !coupling.dim().is_multiple_of(probe_dim) {
            return Err(Error::InvalidDims {
                dims: vec![coupling.dim() / probe_dim.max(1), probe_dim],
                dim: coupling.dim(),
            });
        }
        let system_dim = coupling.dim() / probe_dim;
        let expected = match support {
            PointerSupport::Probe => probe_dim,
            PointerSupport::Joint => coupling.dim(),
        };
        if pointer.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: pointer.dim(),
            });
        }
        if pointer_map.len() != pointer.len() {
            return Err(Error::LengthMismatch {
                outcomes: pointer_map.len(),
                effects: pointer.len(),
            });
        }
        let residual = coupling.unitarity_residual();
        if residual > tol::UNITARY {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self {
            coupling,
            probe,
            pointer,
            pointer_map,
            support,
            system_dim,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn probe_dim(&self) -> usize {
        self.probe.dim()
    }

    pub fn coupling(&self) -> &Operator {
        &self.coupling
    }

    pub fn probe(&self) -> &State {
        &self.probe
    }

    pub fn pointer(&self) -> &DiscreteObservable {
        &self.pointer
    }

    /// Reported labels in first-appearance order, with their pointer outcomes.
    fn groups(&self) -> Vec<(Label, Vec<usize>)> {
        let mut out: Vec<(Label, Vec<usize>)> = Vec::new();
        for (k, l) in self.pointer_map.iter().enumerate() {
            match out.iter_mut().find(|(x, _)| x == l) {
                Some((_, v)) => v.push(k),
                None => out.push((l.clone(), vec![k])),
            }
        }
        out
    }

    fn lifted_pointer(&self, k: usize) -> Operator {
        let z = self.pointer.effects()[k].op();
        match self.support {
            PointerSupport::Probe => Operator::identity(self.system_dim).tensor(z),
            PointerSupport::Joint => z.clone(),
        }
    }

    /// `tr_probe[(I ⊗ T′) M]` for an operator on system ⊗ probe.
    fn probe_average(&self, m: &Operator) -> Operator {
        let (ds, dp) = (self.system_dim, self.probe.dim());
        let t = self.probe.op().matrix();
        let mm = m.matrix();
        Operator::from_fn(ds, |r, c| {
            let mut acc = ZERO;
            for a in 0..dp {
                for b in 0..dp {
                    let tba = t[(b, a)];
                    if tba != ZERO {
                        acc += mm[(r * dp + a, c * dp + b)] * tba;
                    }
                }
            }
            acc
        })
    }

    /// The observable actually measured on the system.
    pub fn induced_observable(&self) -> Result<DiscreteObservable> {
        let u = &self.coupling;
        let mut labels = Vec::new();
        let mut effects = Vec::new();
        for (label, members) in self.groups() {
            let mut z = Operator::zeros(u.dim());
            for k in members {
                z = &z + &self.lifted_pointer(k);
            }
            let heis = z.conjugate_by_adjoint(u);
            let f = self.probe_average(&heis).hermitian_part();
            labels.push(label);
            effects.push(Effect::new(f)?);
        }
        DiscreteObservable::new(labels, effects)
    }

    /// Reported-label probabilities read off the evolved joint state.
    pub fn pointer_probabilities(&self, state: &State) -> Result<Vec<(Label, f64)>> {
        if state.dim() != self.system_dim {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim,
                found: state.dim(),
            });
        }
        let joint = state.tensor(&self.probe).evolve(&self.coupling);
        Ok(self
            .groups()
            .into_iter()
            .map(|(label, members)| {
                let p = members
                    .iter()
                    .map(|&k| trace_product(joint.op(), &self.lifted_pointer(k)))
                    .sum();
                (label, p)
            })
            .collect())
    }

    /// Conditional state transformer of the scheme with a Lüders pointer readout.
    ///
    /// Operation elements are `√p_j (I ⊗ ⟨e|) √Z̃_k U (I ⊗ |φ_j⟩)` over the probe
    /// eigen-decomposition `T′ = Σ p_j |φ_j⟩⟨φ_j|`, probe basis vectors `e`, and
    /// pointer outcomes `k` belonging to the reported label.
    pub fn state_transformer(&self) -> Result<StateTransformer> {
        let (ds, dp) = (self.system_dim, self.probe.dim());
        let probe_eig = self.probe.op().eigh()?;
        let mut labels = Vec::new();
        let mut kraus = Vec::new();
        for (label, members) in self.groups() {
            let mut elements = Vec::new();
            for k in members {
                let root = self
                    .lifted_pointer(k)
                    .eigh()?
                    .apply_fn(|x| C64::new(x.max(0.0).sqrt(), 0.0));
                let ru = &root * &self.coupling;
                for (j, &pj) in probe_eig.values.iter().enumerate() {
                    if pj <= 1e-15 {
                        continue;
                    }
                    let phi = probe_eig.vector(j);
                    let w = pj.sqrt();
                    for e in 0..dp {
                        let m = Operator::from_fn(ds, |r, c| {
                            let mut acc = ZERO;
                            for b in 0..dp {
                                acc += ru.get(r * dp + e, c * dp + b) * phi.get(b);
                            }
                            acc * w
                        });
                        if m.max_abs() > 1e-15 {
                            elements.push(m);
                        }
                    }
                }
            }
            if elements.is_empty() {
                elements.push(Operator::zeros(ds));
            }
            labels.push(label);
            kraus.push(elements);
        }
        StateTransformer::new(labels, kraus)
    }
}
