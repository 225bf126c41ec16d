//! Beam splitters, phase shifters and Mach-Zehnder statistics on truncated Fock space.
//!
//! Each mode is truncated at `nmax` photons (dimension `nmax + 1`). Beam
//! splitters conserve total photon number, so every input with at most `nmax`
//! photons in total evolves without truncation error.
//!
//! Conventions: `U_α = exp(ᾱ a⊗b† - α a†⊗b)` with `α = |α| e^{iϑ}` and
//! `cos|α| = √ε`, so that `U_α|10⟩ = √ε|10⟩ + e^{-iϑ}√(1-ε)|01⟩` and
//! `U_α|01⟩ = √ε|01⟩ - e^{iϑ}√(1-ε)|10⟩`. The phase shifter is `e^{iδN_a} ⊗ I`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{embed, expm, Operator, Vector, C64, ZERO};
use crate::pauli;
use crate::povm::{
    DiscreteObservable, Effect, Label, MeasurementScheme, PointerSupport, State,
};

/// Default truncation for the interferometer.
pub const DEFAULT_NMAX: usize = 4;

/// `a|n⟩ = √n |n-1⟩` on `dim` levels.
pub fn annihilation(dim: usize) -> Operator {
    Operator::from_fn(dim, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn creation(dim: usize) -> Operator {
    annihilation(dim).adjoint()
}

pub fn number(dim: usize) -> Operator {
    Operator::real_diagonal(&(0..dim).map(|n| n as f64).collect::<Vec<_>>())
}

/// Number-state vector `|n⟩`.
pub fn fock(dim: usize, n: usize) -> Vector {
    Vector::basis(dim, n)
}

/// Two-mode number state `|n₁, n₂⟩`.
pub fn fock2(dim: usize, n1: usize, n2: usize) -> Vector {
    Vector::basis(dim * dim, n1 * dim + n2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BSParams {
    pub eps: f64,
    pub theta: f64,
}

impl BSParams {
    pub fn new(eps: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beam splitter needs transparency in [0, 1] and a finite phase, got ({eps}, {theta})"
            )));
        }
        Ok(Self {
            eps,
            theta: theta.rem_euclid(2.0 * PI),
        })
    }

    /// `|α| = arccos √ε ∈ [0, π/2]`
    pub fn modulus(&self) -> f64 {
        self.eps.sqrt().clamp(0.0, 1.0).acos()
    }

    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.modulus(), self.theta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MZIParams {
    pub bs1: BSParams,
    pub bs2: BSParams,
    pub delta: f64,
}

impl MZIParams {
    pub fn new(bs1: BSParams, bs2: BSParams, delta: f64) -> Self {
        Self {
            bs1,
            bs2,
            delta: delta.rem_euclid(2.0 * PI),
        }
    }

    pub fn from_values(eps1: f64, theta1: f64, eps2: f64, theta2: f64, delta: f64) -> Result<Self> {
        Ok(Self::new(BSParams::new(eps1, theta1)?, BSParams::new(eps2, theta2)?, delta))
    }
}

/// Beam splitter acting on modes `i` and `j` of a multimode space.
pub fn beam_splitter_on(params: &BSParams, i: usize, j: usize, dims: &[usize]) -> Result<Operator> {
    if i == j || i >= dims.len() || j >= dims.len() {
        return Err(Error::MalformedCircuit(format!(
            "beam splitter on modes ({i}, {j}) of a {}-mode space",
            dims.len()
        )));
    }
    let ai = embed(&annihilation(dims[i]), i, dims)?;
    let aj = embed(&annihilation(dims[j]), j, dims)?;
    let alpha = params.alpha();
    let forward = &ai * &aj.adjoint();
    let backward = &ai.adjoint() * &aj;
    let gen = &forward.scale(alpha.conj()) - &backward.scale(alpha);
    expm(&gen)
}

/// Two-mode beam splitter `U_α` on `(nmax + 1)²` dimensions.
pub fn beam_splitter(params: &BSParams, nmax: usize) -> Result<Operator> {
    beam_splitter_on(params, 0, 1, &[nmax + 1, nmax + 1])
}

/// `e^{iδN}` on mode `mode`.
pub fn phase_shifter_on(delta: f64, mode: usize, dims: &[usize]) -> Result<Operator> {
    if mode >= dims.len() {
        return Err(Error::MalformedCircuit(format!(
            "phase shifter on mode {mode} of a {}-mode space",
            dims.len()
        )));
    }
    let local = Operator::diagonal(
        &(0..dims[mode])
            .map(|n| C64::from_polar(1.0, delta * n as f64))
            .collect::<Vec<_>>(),
    );
    embed(&local, mode, dims)
}

/// `V_δ = e^{iδN_a} ⊗ I`
pub fn phase_shifter(delta: f64, nmax: usize) -> Result<Operator> {
    phase_shifter_on(delta, 0, &[nmax + 1, nmax + 1])
}

/// `U_β V_δ U_α`
pub fn mzi_unitary(p: &MZIParams, nmax: usize) -> Result<Operator> {
    let ua = beam_splitter(&p.bs1, nmax)?;
    let v = phase_shifter(p.delta, nmax)?;
    let ub = beam_splitter(&p.bs2, nmax)?;
    Ok(&ub * &(&v * &ua))
}

/// Two-mode output state for input `T ⊗ T′`.
pub fn mzi_output_state(t: &State, t_probe: &State, p: &MZIParams) -> Result<State> {
    if t.dim() != t_probe.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: t_probe.dim(),
        });
    }
    let u = mzi_unitary(p, t.dim() - 1)?;
    Ok(t.tensor(t_probe).evolve(&u))
}

fn mode_dim(total: usize) -> Result<usize> {
    let d = (total as f64).sqrt().round() as usize;
    if d * d != total {
        return Err(Error::InvalidDims { dims: vec![d, d], dim: total });
    }
    Ok(d)
}

/// `⟨n₁, n₂| W |n₁, n₂⟩` for every truncated pair.
pub fn detection_probabilities(w: &State) -> Result<BTreeMap<(usize, usize), f64>> {
    let d = mode_dim(w.dim())?;
    let mut out = BTreeMap::new();
    for n1 in 0..d {
        for n2 in 0..d {
            let k = n1 * d + n2;
            out.insert((n1, n2), crate::povm::clamp_probability(w.op().get(k, k).re));
        }
    }
    Ok(out)
}

/// Probability of `(1, 0)` for a single photon entering mode `a`.
///
/// `ε₁ε₂ + (1-ε₁)(1-ε₂) - 2√(ε₁(1-ε₁)ε₂(1-ε₂)) cos(ϑ₂ - ϑ₁ - δ)`
pub fn effective_transparency(p: &MZIParams) -> f64 {
    let (e1, e2) = (p.bs1.eps, p.bs2.eps);
    let cross = (e1 * (1.0 - e1) * e2 * (1.0 - e2)).sqrt();
    let eps = e1 * e2 + (1.0 - e1) * (1.0 - e2)
        - 2.0 * cross * (p.bs2.theta - p.bs1.theta - p.delta).cos();
    if (-1e-12..0.0).contains(&eps) {
        0.0
    } else if eps > 1.0 && eps <= 1.0 + 1e-12 {
        1.0
    } else {
        eps
    }
}

/// Peak-to-trough swing of `p(1,0)` over `δ`: `4√(ε₁(1-ε₁)ε₂(1-ε₂))`.
pub fn visibility(eps1: f64, eps2: f64) -> f64 {
    4.0 * (eps1 * (1.0 - eps1) * eps2 * (1.0 - eps2)).sqrt()
}

/// Least-squares fit `p(δ) ≈ c₀ + c₁ cos δ + c₂ sin δ`, returning `(c₀, c₁, c₂)`.
pub fn fit_cosine(deltas: &[f64], values: &[f64]) -> Result<(f64, f64, f64)> {
    if deltas.len() != values.len() || deltas.len() < 3 {
        return Err(Error::InvalidParameter(
            "cosine fit needs at least three matching samples".into(),
        ));
    }
    let mut normal = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    for (&d, &v) in deltas.iter().zip(values) {
        let row = nalgebra::Vector3::new(1.0, d.cos(), d.sin());
        normal += row * row.transpose();
        rhs += row * v;
    }
    let c = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidParameter("phase samples do not determine a cosine".into()))?;
    Ok((c[0], c[1], c[2]))
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Labels `(n₁, n₂)` for `0 ≤ n₁, n₂ ≤ nmax` in row-major order.
pub fn count_labels(nmax: usize) -> Vec<Label> {
    let mut out = Vec::new();
    for n1 in 0..=nmax {
        for n2 in 0..=nmax {
            out.push(Label::pair(n1 as i64, n2 as i64));
        }
    }
    out
}

/// Binomial a-mode observable with the b mode in vacuum.
///
/// `F(n₁, n₂) = C(n₁+n₂, n₁) ε^{n₁} (1-ε)^{n₂} |n₁+n₂⟩⟨n₁+n₂|`, zero when
/// `n₁ + n₂ > nmax`.
pub fn induced_mzi_observable(p: &MZIParams, nmax: usize) -> Result<DiscreteObservable> {
    binomial_observable(effective_transparency(p), nmax)
}

/// [`induced_mzi_observable`] for a given transparency.
pub fn binomial_observable(eps: f64, nmax: usize) -> Result<DiscreteObservable> {
    let dim = nmax + 1;
    let effects = count_labels(nmax)
        .iter()
        .map(|l| {
            let c = l.components();
            let (n1, n2) = (c[0] as usize, c[1] as usize);
            let mut diag = vec![0.0; dim];
            if n1 + n2 <= nmax {
                diag[n1 + n2] = binomial(n1 + n2, n1) * eps.powi(n1 as i32) * (1.0 - eps).powi(n2 as i32);
            }
            Effect::trusted(Operator::real_diagonal(&diag))
        })
        .collect();
    DiscreteObservable::new(count_labels(nmax), effects)
}

/// Photon counting at both outputs as a measurement of the a-mode field.
pub fn mzi_scheme(p: &MZIParams, nmax: usize) -> Result<MeasurementScheme> {
    let dim = nmax + 1;
    let u = mzi_unitary(p, nmax)?;
    let pointer_effects = (0..dim * dim)
        .map(|k| Effect::trusted(Vector::basis(dim * dim, k).projector()))
        .collect();
    let pointer = DiscreteObservable::new(count_labels(nmax), pointer_effects)?;
    MeasurementScheme::new(
        u,
        State::basis(dim, 0),
        pointer,
        count_labels(nmax),
        PointerSupport::Joint,
    )
}

/// Basis `(|10⟩, |01⟩)` of the single-photon sector, as vectors of the two-mode space.
pub fn single_photon_basis(nmax: usize) -> [Vector; 2] {
    let dim = nmax + 1;
    [fock2(dim, 1, 0), fock2(dim, 0, 1)]
}

/// Restriction of a two-mode operator to the single-photon sector.
pub fn single_photon_block(u: &Operator, nmax: usize) -> Operator {
    let b = single_photon_basis(nmax);
    Operator::from_fn(2, |r, c| b[r].inner(&u.apply(&b[c])))
}

/// Path/interference observable on `span{|10⟩, |01⟩}`.
///
/// `F(1,0) = P[√ε₂|10⟩ - e^{-iϑ₂}√(1-ε₂)|01⟩]` and `F(0,1) = I - F(1,0)`:
/// the compression of the counting projections pulled back through `U_β`.
pub fn single_photon_observable(eps2: f64, theta2: f64) -> Result<DiscreteObservable> {
    let bs = BSParams::new(eps2, theta2)?;
    let v = Vector::new(vec![
        C64::new(bs.eps.sqrt(), 0.0),
        -C64::from_polar((1.0 - bs.eps).sqrt(), -bs.theta),
    ]);
    let f10 = Effect::trusted(v.projector());
    DiscreteObservable::binary(f10, Label::pair(1, 0), Label::pair(0, 1))
}

/// Prepared single-photon state `√ε₁|10⟩ + e^{-i(ϑ₁+δ)}√(1-ε₁)|01⟩`.
pub fn psi_alpha_delta(eps1: f64, theta1: f64, delta: f64) -> Vector {
    Vector::new(vec![
        C64::new(eps1.sqrt(), 0.0),
        C64::from_polar((1.0 - eps1).sqrt(), -(theta1 + delta)),
    ])
}

/// Single beam splitter whose single-photon transfer matches the whole interferometer.
///
/// The returned `U_γ` satisfies `U_γ|10⟩ = e^{iφ} U|10⟩` for the interferometer
/// unitary `U` and some global phase `φ`.
pub fn equivalent_beam_splitter(p: &MZIParams) -> Result<BSParams> {
    let block = single_photon_block(&mzi_unitary(p, 1)?, 1);
    let (x, y) = (block.get(0, 0), block.get(1, 0));
    let eps = x.norm_sqr().clamp(0.0, 1.0);
    let theta = if y.norm() < 1e-15 || x.norm() < 1e-15 {
        if x.norm() < 1e-15 { -y.arg() } else { 0.0 }
    } else {
        x.arg() - y.arg()
    };
    BSParams::new(eps, theta)
}

/// Rank of a family of 2×2 Hermitian operators in the real 4-dimensional
/// space they span, with the singular values of the coordinate matrix.
pub fn hermitian_span(effects: &[Effect]) -> (usize, Vec<f64>) {
    let rows: Vec<[f64; 4]> = effects
        .iter()
        .map(|e| {
            let (t0, t) = pauli::coordinates(e.op());
            [t0, t[0], t[1], t[2]]
        })
        .collect();
    let m = nalgebra::DMatrix::<f64>::from_fn(rows.len(), 4, |r, c| rows[r][c]);
    let gram = m.transpose() * &m;
    let mut sv: Vec<f64> = gram
        .svd(false, false)
        .singular_values
        .iter()
        .map(|s| s.sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let rank = sv.iter().filter(|&&s| s > 1e-6).count();
    (rank, sv)
}

/// Linear-optics element of a multimode single-photon circuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Element {
    BeamSplitter { modes: (usize, usize), params: BSParams },
    PhaseShifter { mode: usize, delta: f64 },
}

/// Elements applied left to right on `modes` modes truncated at one photon each.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub modes: usize,
    pub elements: Vec<Element>,
}

impl Circuit {
    pub fn unitary(&self) -> Result<Operator> {
        if self.modes < 2 {
            return Err(Error::MalformedCircuit("at least two modes are required".into()));
        }
        let dims = vec![2usize; self.modes];
        let total: usize = dims.iter().product();
        let mut u = Operator::identity(total);
        for el in &self.elements {
            let step = match *el {
                Element::BeamSplitter { modes: (i, j), params } => beam_splitter_on(&params, i, j, &dims)?,
                Element::PhaseShifter { mode, delta } => phase_shifter_on(delta, mode, &dims)?,
            };
            u = &step * &u;
        }
        Ok(u)
    }

    /// Single photon in `mode`, as a vector of the circuit space.
    pub fn photon_in(&self, mode: usize) -> Vector {
        let total = 1usize << self.modes;
        Vector::basis(total, 1usize << (self.modes - 1 - mode))
    }
}

/// Parameters of the expanded interferometer measuring the prepared photon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpandedParams {
    /// Final splitter recombining the two arms.
    pub bs2: BSParams,
    /// Tap on arm `b`, feeding mode `d`.
    pub eps3: f64,
    /// Tap on arm `a`, feeding mode `c`.
    pub eps4: f64,
    /// Phase on the tapped light before it is recombined.
    pub gamma: f64,
}

/// Default four-mode wiring.
///
/// Modes: `a = 0`, `b = 1` carry the prepared photon; `c = 2` and `d = 3`
/// start in vacuum. `BS(ε₄)` taps arm `a` into `c`, `BS(ε₃)` taps arm `b` into
/// `d`, `BS(ε₂, ϑ₂)` recombines `a` and `b` ahead of detectors D1 and D2, and
/// `PS(γ)` on `c` followed by a balanced splitter recombines the taps ahead of
/// D3 and D4.
pub fn expanded_mzi_circuit(p: &ExpandedParams) -> Result<Circuit> {
    Ok(Circuit {
        modes: 4,
        elements: vec![
            Element::BeamSplitter { modes: (0, 2), params: BSParams::new(p.eps4, 0.0)? },
            Element::BeamSplitter { modes: (1, 3), params: BSParams::new(p.eps3, 0.0)? },
            Element::BeamSplitter { modes: (0, 1), params: p.bs2 },
            Element::PhaseShifter { mode: 2, delta: p.gamma },
            Element::BeamSplitter { modes: (2, 3), params: BSParams::new(0.5, 0.0)? },
        ],
    })
}

/// Four-detector observable on the prepared subspace with its Hermitian-span rank.
#[derive(Clone, Debug)]
pub struct ExpandedObservable {
    pub observable: DiscreteObservable,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Detector effects of `circuit`, compressed to the photon-in-`prepared` subspace.
///
/// Outcome `k + 1` is a click at `detectors[k]`.
pub fn expanded_mzi_observable(
    circuit: &Circuit,
    prepared: (usize, usize),
    detectors: &[usize],
) -> Result<ExpandedObservable> {
    let modes = circuit.modes;
    if prepared.0 >= modes || prepared.1 >= modes || prepared.0 == prepared.1 {
        return Err(Error::MalformedCircuit(format!("prepared modes {prepared:?}")));
    }
    let mut sorted = detectors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != detectors.len() || sorted != (0..modes).collect::<Vec<_>>() {
        return Err(Error::MalformedCircuit(format!(
            "detectors {detectors:?} must cover every mode exactly once"
        )));
    }
    let u = circuit.unitary()?;
    let basis = [circuit.photon_in(prepared.0), circuit.photon_in(prepared.1)];
    let images = [u.apply(&basis[0]), u.apply(&basis[1])];
    let effects = detectors
        .iter()
        .map(|&m| {
            let click = circuit.photon_in(m);
            let amp = [click.inner(&images[0]), click.inner(&images[1])];
            Effect::trusted(Operator::from_fn(2, |r, c| amp[r].conj() * amp[c]))
        })
        .collect::<Vec<_>>();
    let labels = (1..=detectors.len() as i64).map(Label::Int).collect();
    let observable = DiscreteObservable::new(labels, effects)?;
    let (rank, singular_values) = hermitian_span(observable.effects());
    Ok(ExpandedObservable {
        observable,
        rank,
        singular_values,
    })
}

/// [`expanded_mzi_observable`] on the default wiring with detectors D1…D4 on modes 0…3.
pub fn expanded_default(p: &ExpandedParams) -> Result<ExpandedObservable> {
    expanded_mzi_observable(&expanded_mzi_circuit(p)?, (0, 1), &[0, 1, 2, 3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor, ONE};
    use crate::povm::{are_complementary, joint_observable_feasible, probability};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(e1: f64, t1: f64, e2: f64, t2: f64, d: f64) -> MZIParams {
        MZIParams::from_values(e1, t1, e2, t2, d).unwrap()
    }

    #[test]
    fn ladder_operators() {
        let d = 5;
        let a = annihilation(d);
        let comm = a.commutator(&a.adjoint());
        for r in 0..d - 1 {
            for c in 0..d - 1 {
                let want = if r == c { ONE } else { ZERO };
                assert!((comm.get(r, c) - want).norm() < 1e-14);
            }
        }
        let n = number(d);
        assert!((&a.adjoint() * &a).max_abs_diff(&n) < 1e-14);
        let v = n.apply(&fock(d, 2));
        assert!((v.get(2) - C64::new(2.0, 0.0)).norm() < 1e-15);
        let e = n.eigh().unwrap();
        for (k, x) in e.values.iter().enumerate() {
            assert!((x - k as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn transparent_splitter_is_identity() {
        let u = beam_splitter(&BSParams::new(1.0, 0.7).unwrap(), 3).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(16)) < 1e-15);
    }

    #[test]
    fn single_photon_transfer_amplitudes() {
        let bs = BSParams::new(0.3, 1.1).unwrap();
        let u = beam_splitter(&bs, 2).unwrap();
        let out = u.apply(&fock2(3, 1, 0));
        let want10 = C64::new(0.3f64.sqrt(), 0.0);
        let want01 = C64::from_polar(0.7f64.sqrt(), -1.1);
        assert!((out.get(3) - want10).norm() < 1e-12);
        assert!((out.get(1) - want01).norm() < 1e-12);
        let out = u.apply(&fock2(3, 0, 1));
        assert!((out.get(1) - want10).norm() < 1e-12);
        assert!((out.get(3) + C64::from_polar(0.7f64.sqrt(), 1.1)).norm() < 1e-12);
    }

    #[test]
    fn splitter_conserves_photon_number() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let d = 5;
        let total = &tensor(&number(d), &Operator::identity(d)) + &tensor(&Operator::identity(d), &number(d));
        for _ in 0..10 {
            let bs = BSParams::new(rng.random(), 6.0 * rng.random::<f64>()).unwrap();
            let u = beam_splitter(&bs, d - 1).unwrap();
            assert!(u.commutator(&total).max_abs() < 1e-10);
            assert!(u.unitarity_residual() < 1e-10);
            for r in 0..d * d {
                for c in 0..d * d {
                    if r / d + r % d != c / d + c % d {
                        assert!(u.get(r, c).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn phase_shifter_cases() {
        assert!(phase_shifter(0.0, 3).unwrap().max_abs_diff(&Operator::identity(16)) < 1e-15);
        let v = phase_shifter(0.4, 2).unwrap();
        for n in 0..3 {
            for m in 0..3 {
                let k = n * 3 + m;
                assert!((v.get(k, k) - C64::from_polar(1.0, 0.4 * n as f64)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn phase_shifter_intertwines_splitters() {
        let bs = BSParams::new(0.35, 0.9).unwrap();
        let delta = 1.3;
        let v = phase_shifter(delta, 3).unwrap();
        let lhs = &v * &beam_splitter(&bs, 3).unwrap();
        let rotated = BSParams::new(0.35, 0.9 + delta).unwrap();
        let rhs = &beam_splitter(&rotated, 3).unwrap() * &v;
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn vacuum_is_invariant() {
        let p = params(0.3, 0.2, 0.6, 1.0, 0.5);
        let vac = State::basis(5, 0);
        let w = mzi_output_state(&vac, &vac, &p).unwrap();
        assert!((w.op().get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_photon_stays_in_sector() {
        let p = params(0.3, 0.2, 0.6, 1.0, 0.5);
        let w = mzi_output_state(&State::basis(5, 1), &State::basis(5, 0), &p).unwrap();
        assert!((w.op().trace().re - 1.0).abs() < 1e-12);
        let probs = detection_probabilities(&w).unwrap();
        let other: f64 = probs.iter().filter(|(k, _)| k.0 + k.1 != 1).map(|(_, v)| v).sum();
        assert!(other < 1e-12);
    }

    #[test]
    fn balanced_interferometer_sends_photon_to_one_port() {
        let p = params(0.5, 0.0, 0.5, 0.0, 0.0);
        let w = mzi_output_state(&State::basis(2, 1), &State::basis(2, 0), &p).unwrap();
        let probs = detection_probabilities(&w).unwrap();
        assert!(probs[&(1, 0)] < 1e-12);
        assert!((probs[&(0, 1)] - 1.0).abs() < 1e-12);
        let p = params(0.5, 0.0, 0.5, 0.0, PI);
        let w = mzi_output_state(&State::basis(2, 1), &State::basis(2, 0), &p).unwrap();
        let probs = detection_probabilities(&w).unwrap();
        assert!((probs[&(1, 0)] - 1.0).abs() < 1e-12);
        // shifting the second splitter phase by π restores the other port
        let p = params(0.5, 0.0, 0.5, PI, 0.0);
        assert!((effective_transparency(&p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn calibration_limits() {
        for &e1 in &[0.1, 0.5, 0.8] {
            for &d in &[0.0, 1.0, 2.5] {
                let p = params(e1, 0.3, 1.0, 0.9, d);
                assert!((effective_transparency(&p) - e1).abs() < 1e-15);
                let p = params(1.0, 0.3, 0.5, 0.9, d);
                assert!((effective_transparency(&p) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_observable_entries() {
        let eps = 0.3;
        let obs = binomial_observable(eps, 4).unwrap();
        let f11 = obs.effect(&Label::pair(1, 1)).unwrap();
        let mut want = vec![0.0; 5];
        want[2] = 2.0 * eps * (1.0 - eps);
        assert!(f11.op().max_abs_diff(&Operator::real_diagonal(&want)) < 1e-15);
        let m = obs.marginal(0).unwrap();
        for n1 in 0..=4usize {
            let e = m.effect(&Label::Int(n1 as i64)).unwrap();
            for n in 0..=4usize {
                let want = if n >= n1 { binomial(n, n1) * eps.powi(n1 as i32) * (1.0 - eps).powi((n - n1) as i32) } else { 0.0 };
                assert!((e.op().get(n, n).re - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn extreme_transparency_is_projection_valued() {
        assert!(binomial_observable(0.0, 4).unwrap().is_projection_valued(1e-12));
        assert!(binomial_observable(1.0, 4).unwrap().is_projection_valued(1e-12));
        assert!(!binomial_observable(0.4, 4).unwrap().is_projection_valued(1e-6));
    }

    #[test]
    fn single_photon_observable_limits() {
        let sharp = single_photon_observable(1.0, 0.4).unwrap();
        let p10 = Operator::real_diagonal(&[1.0, 0.0]);
        assert!(sharp.effect(&Label::pair(1, 0)).unwrap().op().max_abs_diff(&p10) < 1e-15);
        let half = single_photon_observable(0.5, 0.4).unwrap();
        let v = Vector::new(vec![ONE, -C64::from_polar(1.0, -0.4)]).normalized();
        assert!(half.effect(&Label::pair(1, 0)).unwrap().op().max_abs_diff(&v.projector()) < 1e-15);
    }

    #[test]
    fn single_photon_expectation_is_effective_transparency() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..50 {
            let (e1, e2) = (rng.random::<f64>(), rng.random::<f64>());
            let (t1, t2, d) = (6.0 * rng.random::<f64>(), 6.0 * rng.random::<f64>(), 6.0 * rng.random::<f64>());
            let obs = single_photon_observable(e2, t2).unwrap();
            let psi = State::pure(&psi_alpha_delta(e1, t1, d)).unwrap();
            let p = probability(&psi, obs.effect(&Label::pair(1, 0)).unwrap()).unwrap();
            assert!((p - effective_transparency(&params(e1, t1, e2, t2, d))).abs() < 1e-10);
        }
    }

    #[test]
    fn sharp_path_and_interference_are_complementary() {
        let path = single_photon_observable(1.0, 0.0).unwrap();
        let inter = single_photon_observable(0.5, 0.0).unwrap();
        assert!(are_complementary(&path, &inter).unwrap());
        assert!(!joint_observable_feasible(&path, &inter).unwrap());
    }

    #[test]
    fn equivalent_splitter_reproduces_transfer() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..20 {
            let p = params(rng.random(), 6.0 * rng.random::<f64>(), rng.random(), 6.0 * rng.random::<f64>(), 6.0 * rng.random::<f64>());
            let g = equivalent_beam_splitter(&p).unwrap();
            assert!((g.eps - effective_transparency(&p)).abs() < 1e-10);
            let u = mzi_unitary(&p, 1).unwrap();
            let ug = beam_splitter(&g, 1).unwrap();
            let a = u.apply(&fock2(2, 1, 0));
            let b = ug.apply(&fock2(2, 1, 0));
            assert!((a.inner(&b).norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cosine_fit_recovers_coefficients() {
        let d: Vec<f64> = (0..7).map(|k| 0.3 + 0.5 * k as f64).collect();
        let v: Vec<f64> = d.iter().map(|x| 0.4 - 0.2 * x.cos() + 0.05 * x.sin()).collect();
        let (c0, c1, c2) = fit_cosine(&d, &v).unwrap();
        assert!((c0 - 0.4).abs() < 1e-12 && (c1 + 0.2).abs() < 1e-12 && (c2 - 0.05).abs() < 1e-12);
        assert!(fit_cosine(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn expanded_rejects_bad_wiring() {
        let p = ExpandedParams { bs2: BSParams::new(0.5, 0.0).unwrap(), eps3: 0.5, eps4: 0.5, gamma: 0.3 };
        let c = expanded_mzi_circuit(&p).unwrap();
        assert!(expanded_mzi_observable(&c, (0, 0), &[0, 1, 2, 3]).is_err());
        assert!(expanded_mzi_observable(&c, (0, 1), &[0, 1, 2]).is_err());
        let bad = Circuit { modes: 3, elements: vec![Element::PhaseShifter { mode: 5, delta: 0.1 }] };
        assert!(matches!(bad.unitary(), Err(Error::MalformedCircuit(_))));
    }
}
