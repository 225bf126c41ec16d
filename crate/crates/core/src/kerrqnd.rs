//! Mach-Zehnder interferometer with a Kerr medium coupling arm `b` to a probe mode `c`.
//!
//! Modes are ordered `a ⊗ b ⊗ c`. The Kerr element is `I ⊗ e^{-iλ N_b N_c}`:
//! it commutes with both photon numbers, so the arm photon number is read
//! out through the probe phase without being disturbed. A photon in arm `b`
//! conjugates probe effects as `E ↦ e^{iλN_c} E e^{-iλN_c}`.
//!
//! For a fixed probe photon number `k` the interferometer is linear, so an
//! input `|N⟩_a|0⟩_b` leaves with amplitude operator
//! `√C(N,n) Xⁿ Y^{N-n}` for `n` photons at the `a` output, where `X` and `Y` are
//! diagonal probe operators holding the single-photon output amplitudes.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{tensor, tensor_all, Operator, Vector, C64};
use crate::mzi::{self, BSParams, MZIParams};
use crate::povm::{
    trace_product, DiscreteObservable, Effect, Label, MeasurementScheme, PointerSupport, State,
};
use crate::spin;
use crate::tol;

/// Default number of phase bins in the probe readout.
pub const DEFAULT_PHASE_BINS: usize = 8;

/// Smallest probe truncation (highest photon number kept).
pub const MIN_PROBE_NMAX: usize = 16;

/// Probe preparation, Kerr strength and probe readout.
#[derive(Clone, Debug)]
pub struct ProbeConfig {
    state: State,
    lambda: f64,
    readout: DiscreteObservable,
}

impl ProbeConfig {
    pub fn new(state: State, lambda: f64, readout: DiscreteObservable) -> Result<Self> {
        if readout.dim() != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: state.dim(),
                found: readout.dim(),
            });
        }
        let residual = readout.completeness_residual();
        if residual > tol::COMPLETENESS {
            return Err(Error::Incomplete { residual });
        }
        if readout.outcomes().iter().any(|l| !matches!(l, Label::Int(_))) {
            return Err(Error::InvalidParameter("readout outcomes must be integer labels".into()));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("Kerr strength {lambda}")));
        }
        Ok(Self {
            state,
            lambda,
            readout,
        })
    }

    /// Truncated coherent probe with the default phase readout.
    pub fn coherent(z: C64, lambda: f64) -> Result<Self> {
        let dim = coherent_dim(z.norm());
        Self::new(
            coherent_state(z, dim)?,
            lambda,
            truncated_phase_povm(dim, DEFAULT_PHASE_BINS)?,
        )
    }

    /// Number-state probe `|k⟩` with the default phase readout.
    pub fn number(k: usize, dim: usize, lambda: f64) -> Result<Self> {
        Self::new(number_state(k, dim)?, lambda, truncated_phase_povm(dim, DEFAULT_PHASE_BINS)?)
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn readout(&self) -> &DiscreteObservable {
        &self.readout
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// `e^{-iλN_c}` as a probe operator.
    pub fn kerr_phase(&self) -> Operator {
        Operator::diagonal(
            &(0..self.dim())
                .map(|k| C64::from_polar(1.0, -self.lambda * k as f64))
                .collect::<Vec<_>>(),
        )
    }

    /// `tr[T′ e^{-iλN_c}]`
    pub fn kerr_expectation(&self) -> C64 {
        let t = self.state.op();
        (0..self.dim())
            .map(|k| t.get(k, k) * C64::from_polar(1.0, -self.lambda * k as f64))
            .sum()
    }

    fn bin_label(&self, k: usize) -> i64 {
        match self.readout.outcomes()[k] {
            Label::Int(x) => x,
            Label::Tuple(_) => unreachable!("checked at construction"),
        }
    }
}

/// Interferometer parameters, probe and the `a`/`b` truncation.
#[derive(Clone, Debug)]
pub struct KerrCircuit {
    pub mzi: MZIParams,
    pub probe: ProbeConfig,
    pub nmax: usize,
}

impl KerrCircuit {
    pub fn new(mzi: MZIParams, probe: ProbeConfig, nmax: usize) -> Self {
        Self { mzi, probe, nmax }
    }

    /// Semitransparent splitters with `ϑ₁ = ϑ₂ = π/2`.
    pub fn canonical(delta: f64, probe: ProbeConfig, nmax: usize) -> Result<Self> {
        let bs = BSParams::new(0.5, FRAC_PI_2)?;
        Ok(Self::new(MZIParams::new(bs, bs, delta), probe, nmax))
    }

    pub fn is_canonical(&self) -> bool {
        let near = |x: f64, y: f64| (x - y).abs() < 1e-12;
        near(self.mzi.bs1.eps, 0.5)
            && near(self.mzi.bs2.eps, 0.5)
            && near(self.mzi.bs1.theta, FRAC_PI_2)
            && near(self.mzi.bs2.theta, FRAC_PI_2)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nmax + 1, self.nmax + 1, self.probe.dim()]
    }

    /// `U_β U_K V_δ U_α` on `a ⊗ b ⊗ c`.
    pub fn unitary(&self) -> Result<Operator> {
        let [da, _, dc] = self.dims();
        let ic = Operator::identity(dc);
        let ua = tensor(&mzi::beam_splitter(&self.mzi.bs1, self.nmax)?, &ic);
        let v = tensor(&mzi::phase_shifter(self.mzi.delta, self.nmax)?, &ic);
        let uk = kerr_unitary(self.probe.lambda, &self.dims());
        let ub = tensor(&mzi::beam_splitter(&self.mzi.bs2, self.nmax)?, &ic);
        debug_assert_eq!(ua.dim(), da * da * dc);
        Ok(&ub * &(&uk * &(&v * &ua)))
    }

    /// Single-photon output amplitudes `(x_k, y_k)` at probe photon number `k`.
    fn amplitudes(&self, k: usize) -> (C64, C64) {
        let p = &self.mzi;
        let (s1, c1) = (p.bs1.eps.sqrt(), (1.0 - p.bs1.eps).sqrt());
        let (s2, c2) = (p.bs2.eps.sqrt(), (1.0 - p.bs2.eps).sqrt());
        let pa = C64::from_polar(s1, p.delta);
        let pb = C64::from_polar(c1, -p.bs1.theta - self.probe.lambda * k as f64);
        let x = pa * s2 - pb * C64::from_polar(c2, p.bs2.theta);
        let y = pa * C64::from_polar(c2, -p.bs2.theta) + pb * s2;
        (x, y)
    }
}

/// `I_a ⊗ e^{-iλ N_b ⊗ N_c}`, diagonal in the number basis.
pub fn kerr_unitary(lambda: f64, dims: &[usize; 3]) -> Operator {
    let [da, db, dc] = *dims;
    let mut diag = Vec::with_capacity(da * db * dc);
    for _ in 0..da {
        for nb in 0..db {
            for nc in 0..dc {
                diag.push(C64::from_polar(1.0, -lambda * (nb * nc) as f64));
            }
        }
    }
    Operator::diagonal(&diag).with_dims(dims.to_vec()).expect("dims multiply")
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Poisson tail `1 - e^{-r} Σ_{n<dim} rⁿ/n!` for mean photon number `r`.
///
/// Summed term by term in log space so that tiny tails keep full relative accuracy.
pub fn coherent_leakage(mean: f64, dim: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let ln_r = mean.ln();
    let mut lf = ln_factorial(dim);
    let mut total = 0.0;
    let mut n = dim;
    loop {
        let term = (-mean + n as f64 * ln_r - lf).exp();
        total += term;
        if n as f64 > mean && term <= total * 1e-17 {
            break;
        }
        n += 1;
        lf += (n as f64).ln();
    }
    total.min(1.0)
}

/// Probe dimension for amplitude `|z|`: at least `max(16, ⌈|z|² + 6|z|⌉) + 1`,
/// grown until the coherent leakage is below the truncation bound.
pub fn coherent_dim(amp: f64) -> usize {
    let rule = (amp * amp + 6.0 * amp).ceil() as usize;
    let mut dim = MIN_PROBE_NMAX.max(rule) + 1;
    while coherent_leakage(amp * amp, dim) >= tol::COHERENT_LEAKAGE {
        dim += 1;
    }
    dim
}

/// Normalized truncation of `e^{-|z|²/2} Σ zⁿ/√n! |n⟩`.
pub fn coherent_vector(z: C64, dim: usize) -> Result<Vector> {
    let leakage = coherent_leakage(z.norm_sqr(), dim);
    if leakage >= tol::COHERENT_LEAKAGE {
        return Err(Error::TruncationLeakage {
            leakage,
            bound: tol::COHERENT_LEAKAGE,
        });
    }
    let mut amp = C64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
    let mut entries = Vec::with_capacity(dim);
    for n in 0..dim {
        if n > 0 {
            amp = amp * z / (n as f64).sqrt();
        }
        entries.push(amp);
    }
    Ok(Vector::new(entries).normalized())
}

pub fn coherent_state(z: C64, dim: usize) -> Result<State> {
    State::pure(&coherent_vector(z, dim)?)
}

pub fn number_state(k: usize, dim: usize) -> Result<State> {
    if k >= dim {
        return Err(Error::InvalidParameter(format!("photon number {k} needs dimension above {dim}")));
    }
    Ok(State::basis(dim, k))
}

/// Output of the interferometer for `T ⊗ |0⟩⟨0| ⊗ T′`.
pub fn three_mode_output(t: &State, circuit: &KerrCircuit) -> Result<State> {
    let [da, db, _] = circuit.dims();
    if t.dim() != da {
        return Err(Error::DimensionMismatch {
            expected: da,
            found: t.dim(),
        });
    }
    let input = t.tensor(&State::basis(db, 0)).tensor(circuit.probe.state());
    Ok(input.evolve(&circuit.unitary()?))
}

fn pointer_effect(n: usize, dims: &[usize; 3], e: &Operator) -> Operator {
    let mut proj = vec![0.0; dims[0]];
    proj[n] = 1.0;
    tensor_all(&[
        &Operator::real_diagonal(&proj),
        &Operator::identity(dims[1]),
        e,
    ])
}

/// `tr[W (|n⟩⟨n| ⊗ I ⊗ E(X))]` keyed by `(n, X)`.
pub fn detection_statistics(w: &State, circuit: &KerrCircuit) -> Result<Vec<(Label, f64)>> {
    let dims = circuit.dims();
    let total: usize = dims.iter().product();
    if w.dim() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: w.dim(),
        });
    }
    let readout = circuit.probe.readout();
    let mut out = Vec::new();
    for n in 0..dims[0] {
        for (k, e) in readout.effects().iter().enumerate() {
            let p = trace_product(w.op(), &pointer_effect(n, &dims, e.op()));
            out.push((Label::pair(n as i64, circuit.probe.bin_label(k)), p));
        }
    }
    Ok(out)
}

/// Probe readout distribution for a single photon entering `a`:
/// `ε₁ tr[T′E(X)] + (1-ε₁) tr[T′ e^{iλN}E(X)e^{-iλN}]`.
pub fn single_photon_probe_marginal(eps1: f64, probe: &ProbeConfig) -> Vec<f64> {
    let (pa, pb) = arm_distributions(probe);
    pa.iter().zip(&pb).map(|(a, b)| eps1 * a + (1.0 - eps1) * b).collect()
}

fn labels_for(circuit: &KerrCircuit) -> Vec<Label> {
    let mut out = Vec::new();
    for n in 0..=circuit.nmax {
        for k in 0..circuit.probe.readout().len() {
            out.push(Label::pair(n as i64, circuit.probe.bin_label(k)));
        }
    }
    out
}

/// Induced a-mode observable from the diagonal amplitude operators.
///
/// `A(n, X) = Σ_N C(N, n) |N⟩⟨N| tr[T′ (XⁿY^{N-n})† E(X) XⁿY^{N-n}]`, zero for `N < n`.
pub fn induced_a_mode_observable(circuit: &KerrCircuit) -> Result<DiscreteObservable> {
    let dc = circuit.probe.dim();
    let amps: Vec<(C64, C64)> = (0..dc).map(|k| circuit.amplitudes(k)).collect();
    let t = circuit.probe.state().op();
    let readout = circuit.probe.readout();
    let da = circuit.nmax + 1;
    let mut effects = Vec::new();
    for n in 0..da {
        for e in readout.effects() {
            let diag: Vec<f64> = (0..da)
                .map(|total| {
                    if total < n {
                        return 0.0;
                    }
                    let k_op = Operator::diagonal(
                        &amps
                            .iter()
                            .map(|&(x, y)| x.powu(n as u32) * y.powu((total - n) as u32))
                            .collect::<Vec<_>>(),
                    );
                    let m = e.op().conjugate_by_adjoint(&k_op);
                    mzi::binomial(total, n) * trace_product(t, &m)
                })
                .collect();
            effects.push(Effect::trusted(Operator::real_diagonal(&diag)));
        }
    }
    DiscreteObservable::new(labels_for(circuit), effects)
}

/// Canonical-setting form with `S = sin(δ/2 + λN/2)`, `C = cos(δ/2 + λN/2)`:
/// `A(n, X) = Σ_m C(m+n, n) |m+n⟩⟨m+n| tr[T′ SⁿCᵐ e^{i(m+n)λN/2} E(X) e^{-i(m+n)λN/2} SⁿCᵐ]`.
pub fn canonical_a_mode_observable(circuit: &KerrCircuit) -> Result<DiscreteObservable> {
    if !circuit.is_canonical() {
        return Err(Error::InvalidParameter(
            "closed form needs semitransparent splitters with phases π/2".into(),
        ));
    }
    let dc = circuit.probe.dim();
    let (delta, lambda) = (circuit.mzi.delta, circuit.probe.lambda);
    let half = |k: usize| delta / 2.0 + lambda * k as f64 / 2.0;
    let t = circuit.probe.state().op();
    let da = circuit.nmax + 1;
    let mut effects = Vec::new();
    for n in 0..da {
        for e in circuit.probe.readout().effects() {
            let diag: Vec<f64> = (0..da)
                .map(|total| {
                    if total < n {
                        return 0.0;
                    }
                    let m = total - n;
                    let sc = Operator::real_diagonal(
                        &(0..dc)
                            .map(|k| half(k).sin().powi(n as i32) * half(k).cos().powi(m as i32))
                            .collect::<Vec<_>>(),
                    );
                    let phase = Operator::diagonal(
                        &(0..dc)
                            .map(|k| C64::from_polar(1.0, total as f64 * lambda * k as f64 / 2.0))
                            .collect::<Vec<_>>(),
                    );
                    let inner = e.op().conjugate_by(&phase);
                    let outer = inner.conjugate_by(&sc);
                    mzi::binomial(total, n) * trace_product(t, &outer)
                })
                .collect();
            effects.push(Effect::trusted(Operator::real_diagonal(&diag)));
        }
    }
    DiscreteObservable::new(labels_for(circuit), effects)
}

/// The whole apparatus as a measurement of the `a` mode with probe `b ⊗ c`.
pub fn a_mode_scheme(circuit: &KerrCircuit) -> Result<MeasurementScheme> {
    let dims = circuit.dims();
    let mut pointer = Vec::new();
    for n in 0..dims[0] {
        for e in circuit.probe.readout().effects() {
            pointer.push(Effect::trusted(pointer_effect(n, &dims, e.op())));
        }
    }
    let labels = labels_for(circuit);
    let pointer = DiscreteObservable::new(labels.clone(), pointer)?;
    let probe = State::basis(dims[1], 0).tensor(circuit.probe.state());
    MeasurementScheme::new(circuit.unitary()?, probe, pointer, labels, PointerSupport::Joint)
}

/// `(tr[T′E(X)], tr[T′ e^{iλN}E(X)e^{-iλN}])` per readout outcome.
pub fn arm_distributions(probe: &ProbeConfig) -> (Vec<f64>, Vec<f64>) {
    let d = probe.kerr_phase();
    let t = probe.state().op();
    probe
        .readout()
        .effects()
        .iter()
        .map(|e| (trace_product(t, e.op()), trace_product(t, &e.op().conjugate_by_adjoint(&d))))
        .unzip()
}

/// Joint path/interference observable on `span{|10⟩, |01⟩}`, labels `(n, X)`.
///
/// Entries `F(n, X)_{ij} = tr[T′ K_{n,i}† E(X) K_{n,j}]` with
/// `K_{1,10} = √ε₂`, `K_{1,01} = -e^{iϑ₂}√(1-ε₂) D`, `K_{0,10} = e^{-iϑ₂}√(1-ε₂)`,
/// `K_{0,01} = √ε₂ D` and `D = e^{-iλN}`.
pub fn joint_path_interference_povm(eps2: f64, theta2: f64, probe: &ProbeConfig) -> Result<DiscreteObservable> {
    let bs = BSParams::new(eps2, theta2)?;
    let (s, c) = (bs.eps.sqrt(), (1.0 - bs.eps).sqrt());
    let phase = C64::from_polar(1.0, bs.theta);
    let t = probe.state().op();
    let d = probe.kerr_phase();
    let mut labels = Vec::new();
    let mut effects = Vec::new();
    for n in [1i64, 0] {
        for (k, e) in probe.readout().effects().iter().enumerate() {
            let t_ii = trace_product(t, e.op());
            let t_dd = trace_product(t, &e.op().conjugate_by_adjoint(&d));
            let t_id = (t * &(e.op() * &d)).trace();
            let (w10, w01, off) = if n == 1 {
                (bs.eps, 1.0 - bs.eps, -phase * s * c * t_id)
            } else {
                (1.0 - bs.eps, bs.eps, phase * s * c * t_id)
            };
            let op = Operator::from_fn(2, |r, col| match (r, col) {
                (0, 0) => C64::new(w10 * t_ii, 0.0),
                (1, 1) => C64::new(w01 * t_dd, 0.0),
                (0, 1) => off,
                _ => off.conj(),
            });
            labels.push(Label::pair(n, probe.bin_label(k)));
            effects.push(Effect::trusted(op));
        }
    }
    DiscreteObservable::new(labels, effects)
}

/// The same observable compressed from the full `a ⊗ b ⊗ c` construction.
///
/// Coupling `(U_β ⊗ I) U_K` on one photon per mode at most, pointer
/// `|n⟩⟨n| ⊗ I ⊗ E(X)`, compressed onto `|10⟩, |01⟩`.
pub fn joint_povm_full(eps2: f64, theta2: f64, probe: &ProbeConfig) -> Result<DiscreteObservable> {
    let bs = BSParams::new(eps2, theta2)?;
    let dims = [2, 2, probe.dim()];
    let coupling = &tensor(&mzi::beam_splitter(&bs, 1)?, &Operator::identity(probe.dim()))
        * &kerr_unitary(probe.lambda, &dims);
    let mut labels = Vec::new();
    let mut pointer = Vec::new();
    for n in [1usize, 0] {
        for (k, e) in probe.readout().effects().iter().enumerate() {
            labels.push(Label::pair(n as i64, probe.bin_label(k)));
            pointer.push(Effect::trusted(pointer_effect(n, &dims, e.op())));
        }
    }
    let pointer = DiscreteObservable::new(labels.clone(), pointer)?;
    let scheme = MeasurementScheme::new(coupling, probe.state().clone(), pointer, labels, PointerSupport::Joint)?;
    let basis = [Vector::basis(4, 2), Vector::basis(4, 1)];
    scheme.induced_observable()?.compress(&basis)
}

/// `2 |F₁(1)_{10,01}| = 2√(ε₂(1-ε₂)) |tr[T′e^{-iλN}]|`
pub fn visibility(eps2: f64, probe: &ProbeConfig) -> f64 {
    2.0 * (eps2 * (1.0 - eps2)).max(0.0).sqrt() * probe.kerr_expectation().norm()
}

/// Visibility read off a joint observable as twice the off-diagonal of its `n = 1` marginal.
pub fn povm_visibility(joint: &DiscreteObservable) -> Result<f64> {
    let m = joint.marginal(0)?;
    Ok(2.0 * m.effect(&Label::Int(1))?.op().get(0, 1).norm())
}

/// Probability of naming the traversed arm from the probe readout, equal priors:
/// `½ Σ_X max(p_a(X), p_b(X))`.
pub fn path_confidence(probe: &ProbeConfig) -> f64 {
    let (pa, pb) = arm_distributions(probe);
    0.5 * pa.iter().zip(&pb).map(|(a, b)| a.max(*b)).sum::<f64>()
}

/// Probe family used by [`tradeoff_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeKind {
    /// Coherent state `|z⟩` with real `z = amp`.
    Coherent,
    /// Number state with `round(amp²)` photons, matching the coherent mean.
    Number,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffRow {
    pub amp: f64,
    pub lambda: f64,
    pub eps2: f64,
    pub visibility: f64,
    pub path_confidence: f64,
    pub probe_dim: usize,
    /// Largest `|Σ_X p(X) - 1|` over the two arm distributions.
    pub normalization_defect: f64,
}

/// Visibility and path confidence over probe amplitudes and final transparencies.
///
/// Rows are ordered by `eps2` then `amp`, both in the given order. The probe
/// keeps photon numbers up to `probe_nmax`, or the leakage-driven default.
pub fn tradeoff_scan(
    amps: &[f64],
    lambda: f64,
    eps2_grid: &[f64],
    bins: usize,
    kind: ProbeKind,
    probe_nmax: Option<usize>,
) -> Result<Vec<TradeoffRow>> {
    let mut rows = Vec::new();
    for &eps2 in eps2_grid {
        BSParams::new(eps2, 0.0)?;
        for &amp in amps {
            if !(amp >= 0.0 && amp.is_finite()) {
                return Err(Error::InvalidParameter(format!("probe amplitude {amp}")));
            }
            let dim = probe_nmax.map_or_else(|| coherent_dim(amp), |n| n + 1);
            let state = match kind {
                ProbeKind::Coherent => coherent_state(C64::new(amp, 0.0), dim)?,
                ProbeKind::Number => number_state((amp * amp).round() as usize, dim)?,
            };
            let probe = ProbeConfig::new(state, lambda, truncated_phase_povm(dim, bins)?)?;
            let (pa, pb) = arm_distributions(&probe);
            let defect = |p: &[f64]| (p.iter().sum::<f64>() - 1.0).abs();
            rows.push(TradeoffRow {
                amp,
                lambda,
                eps2,
                visibility: visibility(eps2, &probe),
                path_confidence: path_confidence(&probe),
                probe_dim: dim,
                normalization_defect: defect(&pa).max(defect(&pb)),
            });
        }
    }
    Ok(rows)
}

/// Visibility nonincreasing and confidence nondecreasing along increasing
/// amplitude within every `(λ, ε₂)` group.
pub fn tradeoff_is_monotone(rows: &[TradeoffRow]) -> bool {
    const SLACK: f64 = 1e-12;
    rows.windows(2).all(|w| {
        let (a, b) = (&w[0], &w[1]);
        if a.lambda != b.lambda || a.eps2 != b.eps2 || b.amp < a.amp {
            return true;
        }
        b.visibility <= a.visibility + SLACK && b.path_confidence >= a.path_confidence - SLACK
    })
}

/// Phase observable on Fock indices `0 … dim-1` over `bins` equal arcs.
pub fn truncated_phase_povm(dim: usize, bins: usize) -> Result<DiscreteObservable> {
    spin::phase_partition(dim, bins)
}

/// Entrywise residual of `e^{-iαN} M([u, v]) e^{iαN} - M([u, v] + α)` on the truncated space.
pub fn phase_covariance_residual(dim: usize, u: f64, v: f64, alpha: f64) -> Result<f64> {
    if !(u.is_finite() && v.is_finite()) || u < 0.0 || v > 2.0 * PI + 1e-12 || u > v {
        return Err(Error::MalformedInterval { lo: u, hi: v });
    }
    let rot = Operator::diagonal(
        &(0..dim)
            .map(|k| C64::from_polar(1.0, -alpha * k as f64))
            .collect::<Vec<_>>(),
    );
    let lhs = spin::phase_kernel(dim, u, v).conjugate_by(&rot);
    let mut rhs = Operator::zeros(dim);
    for (a, b) in spin::shift_interval(u, v, alpha) {
        rhs = &rhs + &spin::phase_kernel(dim, a, b);
    }
    Ok(lhs.max_abs_diff(&rhs))
}

/// Spectral projections of the truncated quadrature `½(c + c†)` binned at `edges`.
///
/// Outcome `k` collects eigenvalues in `[edges[k-1], edges[k])`, with open
/// outer bins.
pub fn quadrature_readout(dim: usize, edges: &[f64]) -> Result<DiscreteObservable> {
    if edges.windows(2).any(|w| !(w[0] < w[1])) || edges.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidParameter("quadrature edges must be finite and increasing".into()));
    }
    let a = mzi::annihilation(dim);
    let q = (&a + &a.adjoint()).scale_real(0.5);
    let eig = q.eigh()?;
    let mut effects = vec![Operator::zeros(dim); edges.len() + 1];
    for (j, &x) in eig.values.iter().enumerate() {
        let bin = edges.iter().filter(|&&e| e <= x).count();
        effects[bin] = &effects[bin] + &eig.vector(j).projector();
    }
    let effects = effects.into_iter().map(|e| Effect::trusted(e.hermitian_part())).collect();
    DiscreteObservable::new((0..=edges.len() as i64).map(Label::Int).collect(), effects)
}
