//! Measurement models on a cyclic grid of `d` sites.
//!
//! Positions are `0 … d-1` with arithmetic mod `d`; momenta label the
//! discrete Fourier basis `|p⟩ = d^{-1/2} Σ_q ω^{pq} |q⟩`, `ω = e^{2πi/d}`.
//! The shift `X|q⟩ = |q+1⟩` and boost `Z|q⟩ = ω^q|q⟩` generate the Weyl
//! operators `W(q, p) = X^q Z^p`.
//!
//! Smeared position observables use the convolution convention: the effect
//! of outcome `x` has weight `f(q - x)` at site `q`. A pointer with amplitude
//! profile `φ` produces `f(y) = |φ(-y)|²`.
//!
//! Continuum statements (analyticity arguments, the `½` uncertainty bound)
//! have no counterpart here. Spreads are reported but not compared to a bound.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Operator, Vector, C64, ZERO};
use crate::povm::{DiscreteObservable, Effect, Label, MeasurementScheme, PointerSupport, State, StateTransformer};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicGrid {
    d: usize,
}

impl CyclicGrid {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least two sites, got {d}")));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Reduces a signed site index mod `d`.
    pub fn wrap(&self, q: i64) -> usize {
        q.rem_euclid(self.d as i64) as usize
    }

    /// Signed representative in `(-d/2, d/2]`.
    pub fn centred(&self, q: usize) -> i64 {
        let q = (q % self.d) as i64;
        let d = self.d as i64;
        if 2 * q > d {
            q - d
        } else {
            q
        }
    }

    fn omega(&self, k: i64) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * k.rem_euclid(self.d as i64) as f64 / self.d as f64)
    }

    /// Columns are the momentum basis vectors.
    pub fn dft(&self) -> Operator {
        let norm = 1.0 / (self.d as f64).sqrt();
        Operator::from_fn(self.d, |q, p| self.omega((q * p) as i64) * norm)
    }

    pub fn momentum_vector(&self, p: usize) -> Vector {
        let norm = 1.0 / (self.d as f64).sqrt();
        Vector::new((0..self.d).map(|q| self.omega((q * p) as i64) * norm).collect())
    }

    /// `X^k`
    pub fn shift(&self, k: i64) -> Operator {
        let k = self.wrap(k);
        Operator::from_fn(self.d, |r, c| if r == (c + k) % self.d { C64::new(1.0, 0.0) } else { ZERO })
    }

    /// `Z^k`
    pub fn boost(&self, k: i64) -> Operator {
        Operator::diagonal(&(0..self.d).map(|q| self.omega(k * q as i64)).collect::<Vec<_>>())
    }

    /// `W(q, p) = X^q Z^p`
    pub fn weyl(&self, q: i64, p: i64) -> Operator {
        &self.shift(q) * &self.boost(p)
    }

    /// Sharp position observable, labels `0 … d-1`.
    pub fn position(&self) -> DiscreteObservable {
        let effects = (0..self.d)
            .map(|q| Effect::trusted(Vector::basis(self.d, q).projector()))
            .collect();
        DiscreteObservable::new(self.labels(), effects).expect("projections sum to identity")
    }

    /// Sharp momentum observable, labels `0 … d-1`.
    pub fn momentum(&self) -> DiscreteObservable {
        let effects = (0..self.d)
            .map(|p| Effect::trusted(self.momentum_vector(p).projector()))
            .collect();
        DiscreteObservable::new(self.labels(), effects).expect("projections sum to identity")
    }

    fn labels(&self) -> Vec<Label> {
        (0..self.d as i64).map(Label::Int).collect()
    }
}

/// Probability weights over grid sites.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceFunction {
    f: Vec<f64>,
}

impl ConfidenceFunction {
    pub fn new(f: Vec<f64>) -> Result<Self> {
        let total: f64 = f.iter().sum();
        if f.len() < 2 || f.iter().any(|x| !(*x >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "confidence weights must be nonnegative and sum to 1 (sum {total})"
            )));
        }
        Ok(Self { f })
    }

    pub fn delta(d: usize) -> Self {
        let mut f = vec![0.0; d];
        f[0] = 1.0;
        Self { f }
    }

    pub fn uniform(d: usize) -> Self {
        Self {
            f: vec![1.0 / d as f64; d],
        }
    }

    /// `f(y) = |φ(-y)|²`
    pub fn from_profile(phi: &[C64]) -> Result<Self> {
        let d = phi.len();
        Self::new((0..d).map(|y| phi[(d - y) % d].norm_sqr()).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.f
    }

    pub fn at(&self, y: i64) -> f64 {
        self.f[y.rem_euclid(self.f.len() as i64) as usize]
    }

    /// Mirrored amplitudes `φ(y) = √f(-y)`.
    pub fn profile(&self) -> Vec<C64> {
        (0..self.f.len() as i64).map(|y| C64::new(self.at(-y).sqrt(), 0.0)).collect()
    }
}

fn check_dim(grid: &CyclicGrid, found: usize) -> Result<()> {
    if found != grid.d() {
        return Err(Error::DimensionMismatch {
            expected: grid.d(),
            found,
        });
    }
    Ok(())
}

/// Integer eigenvalues of a Hermitian operator with their spectral projections, ascending.
fn integer_spectrum(a: &Operator) -> Result<Vec<(i64, Operator)>> {
    let eig = a.eigh()?;
    let mut out: Vec<(i64, Operator)> = Vec::new();
    for (k, &x) in eig.values.iter().enumerate() {
        let r = x.round();
        if (x - r).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("eigenvalue {x} is not an integer")));
        }
        let p = eig.vector(k).projector();
        match out.last_mut() {
            Some((v, acc)) if *v == r as i64 => *acc = &*acc + &p,
            _ => out.push((r as i64, p)),
        }
    }
    Ok(out)
}

/// Von Neumann model with a cyclic pointer: `U = Σ_k P_k ⊗ X^{λ a_k}`.
///
/// The pointer starts uniformly spread over `{-w, …, w}`. Reading site `s`
/// reports `a_k` when `s ∈ I_k = {λa_k + j : |j| ≤ w}`; sites outside every
/// `I_k` report the eigenvalue with the nearest centre. The induced
/// observable is the spectral measure of `A` whenever the `I_k` are disjoint.
pub fn toy_discrete_measurement(
    a: &Operator,
    grid: &CyclicGrid,
    lambda: i64,
    pointer_width: usize,
) -> Result<MeasurementScheme> {
    let d = grid.d();
    let spectrum = integer_spectrum(a)?;
    let width = 2 * pointer_width + 1;
    if width > d {
        return Err(Error::OverlappingSupports(format!("pointer width {width} exceeds {d} sites")));
    }
    let centres: Vec<usize> = spectrum.iter().map(|(v, _)| grid.wrap(lambda * v)).collect();
    let mut owner: Vec<Option<usize>> = vec![None; d];
    for (k, &c) in centres.iter().enumerate() {
        for j in -(pointer_width as i64)..=pointer_width as i64 {
            let s = grid.wrap(c as i64 + j);
            if let Some(other) = owner[s] {
                return Err(Error::OverlappingSupports(format!(
                    "eigenvalues {} and {} both claim site {s}",
                    spectrum[other].0, spectrum[k].0
                )));
            }
            owner[s] = Some(k);
        }
    }
    let distance = |s: usize, c: usize| grid.centred((s + d - c) % d).abs();
    let pointer_map = (0..d)
        .map(|s| {
            let k = owner[s].unwrap_or_else(|| {
                (0..centres.len())
                    .min_by_key(|&k| (distance(s, centres[k]), k))
                    .expect("nonempty spectrum")
            });
            Label::Int(spectrum[k].0)
        })
        .collect();
    let mut coupling = Operator::zeros(a.dim() * d);
    for (v, p) in &spectrum {
        coupling = &coupling + &p.tensor(&grid.shift(lambda * v));
    }
    let amp = C64::new(1.0 / (width as f64).sqrt(), 0.0);
    let mut phi = vec![ZERO; d];
    for j in -(pointer_width as i64)..=pointer_width as i64 {
        phi[grid.wrap(j)] = amp;
    }
    let probe = State::pure(&Vector::new(phi))?;
    MeasurementScheme::new(coupling, probe, grid.position(), pointer_map, PointerSupport::Probe)
}

/// Smeared position observable: outcome `x` has weight `f(q - x)` at site `q`.
pub fn unsharp_position_observable(f: &ConfidenceFunction, grid: &CyclicGrid) -> Result<DiscreteObservable> {
    check_dim(grid, f.weights().len())?;
    let effects = (0..grid.d() as i64)
        .map(|x| {
            let diag: Vec<f64> = (0..grid.d() as i64).map(|q| f.at(q - x)).collect();
            Effect::trusted(Operator::real_diagonal(&diag))
        })
        .collect();
    DiscreteObservable::new(grid.labels(), effects)
}

/// Pointer shifted by the system position, `U = Σ_q |q⟩⟨q| ⊗ X^q`, with
/// amplitude profile `φ(y) = √f(-y)` and a sharp position readout.
pub fn unsharp_position_scheme(f: &ConfidenceFunction, grid: &CyclicGrid) -> Result<MeasurementScheme> {
    check_dim(grid, f.weights().len())?;
    let d = grid.d();
    let mut coupling = Operator::zeros(d * d);
    for q in 0..d {
        coupling = &coupling + &Vector::basis(d, q).projector().tensor(&grid.shift(q as i64));
    }
    let probe = State::pure(&Vector::new(f.profile()))?;
    MeasurementScheme::new(coupling, probe, grid.position(), grid.labels(), PointerSupport::Probe)
}

/// Instrument with Kraus elements `A_x = Σ_q φ(x - q) |q⟩⟨q|`.
pub fn unsharp_position_transformer(phi: &[C64], grid: &CyclicGrid) -> Result<StateTransformer> {
    check_dim(grid, phi.len())?;
    let norm: f64 = phi.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > tol::UNIT_VECTOR {
        return Err(Error::NotNormalizedProfile(norm));
    }
    let kraus = (0..grid.d() as i64)
        .map(|x| {
            let diag: Vec<C64> = (0..grid.d() as i64).map(|q| phi[grid.wrap(x - q)]).collect();
            vec![Operator::diagonal(&diag)]
        })
        .collect();
    StateTransformer::new(grid.labels(), kraus)
}

/// Covariant phase-space observable `G(q, p) = d^{-1} W(q, p) T₀ W(q, p)†`.
///
/// Its position marginal is the smeared position observable with
/// `f̄(y) = ⟨y|T₀|y⟩` and its momentum marginal the smeared momentum
/// observable with `ḡ(k) = ⟨k|T₀|k⟩`, both in the convolution convention.
pub fn phase_space_observable(t0: &State, grid: &CyclicGrid) -> Result<DiscreteObservable> {
    check_dim(grid, t0.dim())?;
    let d = grid.d() as i64;
    let mut labels = Vec::new();
    let mut effects = Vec::new();
    for q in 0..d {
        for p in 0..d {
            let w = grid.weyl(q, p);
            labels.push(Label::pair(q, p));
            effects.push(Effect::trusted(t0.op().conjugate_by(&w).scale_real(1.0 / d as f64).hermitian_part()));
        }
    }
    DiscreteObservable::new(labels, effects)
}

/// `⟨y|T₀|y⟩` over positions.
pub fn position_profile(t0: &State) -> Vec<f64> {
    (0..t0.dim()).map(|q| t0.op().get(q, q).re).collect()
}

/// `⟨k|T₀|k⟩` over momenta.
pub fn momentum_profile(t0: &State, grid: &CyclicGrid) -> Vec<f64> {
    (0..grid.d()).map(|p| t0.op().expectation(&grid.momentum_vector(p)).re).collect()
}

/// Spreads of `f̄` and `ḡ` about their most likely site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadReport {
    pub position: f64,
    pub momentum: f64,
    pub product: f64,
}

fn spread(grid: &CyclicGrid, w: &[f64]) -> f64 {
    let peak = (0..w.len()).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap_or(0);
    let centred = |k: usize| grid.centred((k + grid.d() - peak) % grid.d()) as f64;
    let mean: f64 = w.iter().enumerate().map(|(k, x)| x * centred(k)).sum();
    let second: f64 = w.iter().enumerate().map(|(k, x)| x * centred(k).powi(2)).sum();
    (second - mean * mean).max(0.0).sqrt()
}

pub fn spread_report(t0: &State, grid: &CyclicGrid) -> Result<SpreadReport> {
    check_dim(grid, t0.dim())?;
    let position = spread(grid, &position_profile(t0));
    let momentum = spread(grid, &momentum_profile(t0, grid));
    Ok(SpreadReport {
        position,
        momentum,
        product: position * momentum,
    })
}
