//! Acceptance suite: one PASS/FAIL line per criterion with its wall time.
//!
//! Runs without the libtest harness so the lines always reach the output.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use povmlab::kerrqnd::{self, coherent_state, number_state, truncated_phase_povm, ProbeConfig};
use povmlab::linalg::{Operator, C64};
use povmlab::models::{self, ConfidenceFunction, CyclicGrid};
use povmlab::mzi::{self, BSParams, ExpandedParams, MZIParams};
use povmlab::povm::{are_complementary, joint_observable_feasible, DiscreteObservable, Effect, Label, State};
use povmlab::sample::{self, DEFAULT_SEED};
use povmlab::spin::{self, BlochVector, SpinPhaseSpace};
use povmlab::{pauli, StateTransformer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: povmlab::Error) -> String {
    e.to_string()
}

fn grid13() -> Vec<f64> {
    (0..13).map(|k| k as f64 / 12.0).collect()
}

/// `ε₁ε₂ + (1-ε₁)(1-ε₂) + 2√(ε₁(1-ε₁)ε₂(1-ε₂)) cos(ϑ₂ - ϑ₁ + π - δ)`, the
/// interference law in the splitter convention used throughout.
fn interference_law(e1: f64, t1: f64, e2: f64, t2: f64, delta: f64) -> f64 {
    e1 * e2 + (1.0 - e1) * (1.0 - e2) + 2.0 * (e1 * (1.0 - e1) * e2 * (1.0 - e2)).sqrt() * (t2 - t1 + PI - delta).cos()
}

fn c1_interference_law() -> Outcome {
    let (t1, t2) = (0.4, 1.3);
    let mut worst: f64 = 0.0;
    for &e1 in &grid13() {
        for &e2 in &grid13() {
            for &d in &grid13() {
                let delta = 2.0 * PI * d;
                let p = MZIParams::from_values(e1, t1, e2, t2, delta).map_err(err)?;
                let w = mzi::mzi_output_state(&State::basis(2, 1), &State::basis(2, 0), &p).map_err(err)?;
                let p10 = mzi::detection_probabilities(&w).map_err(err)?[&(1, 0)];
                worst = worst.max((p10 - interference_law(e1, t1, e2, t2, delta)).abs());
                worst = worst.max((mzi::effective_transparency(&p) - p10).abs());
            }
        }
    }
    ensure(worst < 1e-9, || format!("max abs error {worst:e}"))?;
    Ok(format!("max abs error {worst:.2e} over 2197 points"))
}

fn c2_realised_regime() -> Outcome {
    let deltas: Vec<f64> = (0..64).map(|k| 2.0 * PI * k as f64 / 64.0).collect();
    let fit = |theta2: f64| -> Result<(f64, f64, f64), String> {
        let values = deltas
            .iter()
            .map(|&d| {
                let p = MZIParams::from_values(0.5, 0.3, 0.994, theta2, d).map_err(err)?;
                let w = mzi::mzi_output_state(&State::basis(2, 1), &State::basis(2, 0), &p).map_err(err)?;
                Ok(mzi::detection_probabilities(&w).map_err(err)?[&(1, 0)])
            })
            .collect::<Result<Vec<f64>, String>>()?;
        mzi::fit_cosine(&deltas, &values).map_err(err)
    };
    let (c0, c1, c2) = fit(0.3)?;
    let amp = c1.hypot(c2);
    ensure((amp - 0.154 / 2.0).abs() < 5e-4, || format!("amplitude {amp}"))?;
    ensure((c0 - 0.5).abs() < 5e-4, || format!("offset {c0}"))?;
    // equal splitter phases give ½(1 - 0.154 cos δ); a relative π restores the plus sign
    let (_, shifted, _) = fit(0.3 + PI)?;
    ensure(c1 < 0.0 && (shifted - 0.154 / 2.0).abs() < 5e-4, || format!("cos coefficients {c1}, {shifted}"))?;
    Ok(format!("amplitude {amp:.6} offset {c0:.6}"))
}

fn c3_anticoincidence() -> Outcome {
    let mut worst: f64 = 0.0;
    for &e1 in &grid13() {
        for &e2 in &grid13() {
            for &d in &grid13() {
                let p = MZIParams::from_values(e1, 0.4, e2, 1.3, 2.0 * PI * d).map_err(err)?;
                let w = mzi::mzi_output_state(&State::basis(3, 1), &State::basis(3, 0), &p).map_err(err)?;
                let stray: f64 = mzi::detection_probabilities(&w)
                    .map_err(err)?
                    .iter()
                    .filter(|((n1, n2), _)| n1 + n2 != 1)
                    .map(|(_, v)| v.abs())
                    .sum();
                worst = worst.max(stray);
            }
        }
    }
    ensure(worst < 1e-12, || format!("stray probability {worst:e}"))?;
    Ok(format!("max stray probability {worst:.2e}"))
}

fn binomial_coefficient(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| (n + 1 - i) as f64 / i as f64).product()
}

fn c4_binomial_observable() -> Outcome {
    let nmax = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let (mut worst, mut worst_marginal): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let p = MZIParams::from_values(
            rng.random::<f64>(),
            2.0 * PI * rng.random::<f64>(),
            rng.random::<f64>(),
            2.0 * PI * rng.random::<f64>(),
            2.0 * PI * rng.random::<f64>(),
        )
        .map_err(err)?;
        let induced = mzi::mzi_scheme(&p, nmax).map_err(err)?.induced_observable().map_err(err)?;
        let closed = mzi::induced_mzi_observable(&p, nmax).map_err(err)?;
        worst = worst.max(closed.max_deviation(&induced).map_err(err)?);
        // counts at the first output: Σ_N C(N, n) εⁿ (1-ε)^{N-n} |N⟩⟨N|
        let eps = mzi::effective_transparency(&p);
        let marginal = induced.marginal(0).map_err(err)?;
        for n in 0..=nmax {
            let diag: Vec<f64> = (0..=nmax)
                .map(|big| {
                    if big >= n {
                        binomial_coefficient(big, n) * eps.powi(n as i32) * (1.0 - eps).powi((big - n) as i32)
                    } else {
                        0.0
                    }
                })
                .collect();
            let e = marginal.effect(&Label::Int(n as i64)).map_err(err)?;
            worst_marginal = worst_marginal.max(e.op().max_abs_diff(&Operator::real_diagonal(&diag)));
        }
    }
    ensure(worst < 1e-9, || format!("closed form deviation {worst:e}"))?;
    ensure(worst_marginal < 1e-9, || format!("marginal deviation {worst_marginal:e}"))?;
    Ok(format!("deviation {worst:.2e}, marginal deviation {worst_marginal:.2e}"))
}

/// Seeded Bloch pairs: uniform in the ball, then pairs rescaled onto `|value - 2| < 1e-3`.
fn bloch_pairs() -> (Vec<(BlochVector, BlochVector)>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 0xb10c);
    let mut pairs: Vec<(BlochVector, BlochVector)> = (0..9_900)
        .map(|_| {
            (
                BlochVector::new(sample::random_ball_point(1.0, &mut rng)),
                BlochVector::new(sample::random_ball_point(1.0, &mut rng)),
            )
        })
        .collect();
    let mut near = 0;
    while near < 100 {
        let a = BlochVector::new(sample::random_ball_point(1.0, &mut rng));
        let b = BlochVector::new(sample::random_ball_point(1.0, &mut rng));
        let target = 2.0 + 1e-3 * (2.0 * rng.random::<f64>() - 1.0);
        // the criterion value is homogeneous of degree one
        let t = target / spin::coexist_value(&a, &b);
        let (a, b) = (a.scale(t), b.scale(t));
        if a.norm() <= 1.0 && b.norm() <= 1.0 {
            pairs.push((a, b));
            near += 1;
        }
    }
    (pairs, near)
}

fn c5_coexistence_oracle() -> Outcome {
    let (pairs, near) = bloch_pairs();
    let mut outside = 0;
    let mut inside_band = 0;
    for (a, b) in &pairs {
        if spin::coexist_criterion(a, b) != spin::coexist_oracle(a, b) {
            if (spin::coexist_value(a, b) - 2.0).abs() < 1e-9 {
                inside_band += 1;
            } else {
                outside += 1;
            }
        }
    }
    ensure(outside == 0, || format!("{outside} disagreements outside the boundary band"))?;
    Ok(format!(
        "{} pairs ({near} near the boundary), {inside_band} disagreements inside the band",
        pairs.len()
    ))
}

fn c6_joint_spin_observable() -> Outcome {
    let (pairs, _) = bloch_pairs();
    let (mut count, mut min_eig, mut completeness, mut marginal): (usize, f64, f64, f64) = (0, f64::INFINITY, 0.0, 0.0);
    for (a, b) in pairs.iter().filter(|(a, b)| spin::coexist_criterion(a, b)) {
        let j = spin::joint_spin_observable(a, b).map_err(err)?;
        min_eig = min_eig.min(j.min_eigenvalue());
        completeness = completeness.max(j.completeness_residual());
        let m1 = j.marginal(0).map_err(err)?.max_deviation(&spin::spin_observable(a).map_err(err)?).map_err(err)?;
        let m2 = j.marginal(1).map_err(err)?.max_deviation(&spin::spin_observable(b).map_err(err)?).map_err(err)?;
        marginal = marginal.max(m1).max(m2);
        count += 1;
    }
    ensure(min_eig >= -1e-10, || format!("min eigenvalue {min_eig:e}"))?;
    ensure(completeness < 1e-9, || format!("completeness residual {completeness:e}"))?;
    ensure(marginal < 1e-12, || format!("marginal deviation {marginal:e}"))?;
    Ok(format!(
        "{count} coexistent pairs, min eigenvalue {min_eig:.2e}, marginal deviation {marginal:.2e}"
    ))
}

/// `w F + (1 - w) I/2` with outcomes kept.
fn smear(obs: &DiscreteObservable, w: f64) -> Result<DiscreteObservable, String> {
    let half = Operator::identity(obs.dim()).scale_real(0.5 * (1.0 - w));
    let effects = obs
        .effects()
        .iter()
        .map(|e| Effect::new(&e.op().scale_real(w) + &half))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    DiscreteObservable::new(obs.outcomes().to_vec(), effects).map_err(err)
}

fn c7_complementarity() -> Outcome {
    let theta2 = 0.7;
    let path = mzi::single_photon_observable(1.0, theta2).map_err(err)?;
    let inter = mzi::single_photon_observable(0.5, theta2).map_err(err)?;
    ensure(are_complementary(&path, &inter).map_err(err)?, || "sharp pair not complementary".into())?;
    ensure(!joint_observable_feasible(&path, &inter).map_err(err)?, || "sharp pair jointly measurable".into())?;
    // equal 0.8 weights violate the coexistence bound, so one weight is lowered
    let mut notes = Vec::new();
    for (wp, wi, expect) in [(0.8, 0.8, false), (0.8, 0.55, true), (0.7, 0.7, true)] {
        let feasible = joint_observable_feasible(&smear(&path, wp)?, &smear(&inter, wi)?).map_err(err)?;
        let coexistent = wp * wp + wi * wi <= 1.0;
        ensure(feasible == expect && coexistent == expect, || {
            format!("weights ({wp}, {wi}): feasible {feasible}, bound {coexistent}")
        })?;
        notes.push(format!("({wp},{wi})->{feasible}"));
    }
    Ok(format!("sharp pair complementary and infeasible; smeared {}", notes.join(" ")))
}

fn c8_spin_phase() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 0x5e);
    let (mut full, mut cov, mut uniform, mut moment): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut min_defect = f64::INFINITY;
    for twice_s in 1..=6u32 {
        let space = SpinPhaseSpace::new(twice_s).map_err(err)?;
        let d = space.dim();
        let whole = spin::spin_phase_effect(&space, 0.0, 2.0 * PI).map_err(err)?;
        full = full.max(whole.op().max_abs_diff(&Operator::identity(d)));
        for _ in 0..100 {
            let u = 2.0 * PI * rng.random::<f64>();
            let v = u + (2.0 * PI - u) * rng.random::<f64>();
            let alpha = 4.0 * PI * rng.random::<f64>() - 2.0 * PI;
            cov = cov.max(spin::spin_phase_covariance_check(&space, u, v, alpha).map_err(err)?);
            let a = 2.0 * PI * rng.random::<f64>();
            let e = spin::spin_phase_effect(&space, 0.0, a).map_err(err)?;
            for m in 0..d {
                uniform = uniform.max((e.op().get(m, m).re - a / (2.0 * PI)).abs());
            }
            let len = 0.1 + (2.0 * PI - 0.2) * rng.random::<f64>();
            let start = (2.0 * PI - len) * rng.random::<f64>();
            min_defect = min_defect.min(spin::spin_phase_effect(&space, start, start + len).map_err(err)?.idempotency_defect());
        }
        // trapezoid rule on the density e^{i(n-m)α}/2π is exact for these trigonometric polynomials
        let nodes = 4 * d;
        let mut oracle = Operator::zeros(d);
        for j in 0..nodes {
            let a = 2.0 * PI * j as f64 / nodes as f64;
            let density = Operator::from_fn(d, |m, n| C64::from_polar(1.0 / nodes as f64, (n as f64 - m as f64 + 1.0) * a));
            oracle = &oracle + &density;
        }
        moment = moment.max(spin::spin_phase_first_moment(&space).max_abs_diff(&oracle));
        // and B is the unitary part of the raising operator on the lower states
        let raising = space.s_plus();
        let unit = Operator::from_fn(d, |r, c| {
            let z = raising.get(r, c);
            if z.norm() > 0.0 { z / z.norm() } else { z }
        });
        moment = moment.max(spin::spin_phase_first_moment(&space).max_abs_diff(&unit));
    }
    ensure(full < 1e-15, || format!("S([0,2π]) deviation {full:e}"))?;
    ensure(cov < 1e-10, || format!("covariance residual {cov:e}"))?;
    ensure(uniform < 1e-12, || format!("uniformity residual {uniform:e}"))?;
    ensure(moment < 1e-12, || format!("first moment deviation {moment:e}"))?;
    ensure(min_defect > 1e-6, || format!("idempotency defect {min_defect:e}"))?;
    Ok(format!(
        "covariance {cov:.2e}, uniformity {uniform:.2e}, moment {moment:.2e}, min idempotency defect {min_defect:.2e}"
    ))
}

fn c9_kerr_joint() -> Outcome {
    let dim = 33;
    let readout = truncated_phase_povm(dim, kerrqnd::DEFAULT_PHASE_BINS).map_err(err)?;
    let theta2 = 0.9;
    let (mut worst, mut vis): (f64, f64) = (0.0, 0.0);
    for &eps2 in &[0.5, 0.75, 0.994] {
        for &lambda in &[0.1, 0.5, 1.0] {
            for &amp in &[0.0, 1.0, 3.0] {
                let z = C64::from_polar(amp, 0.35);
                let probe = ProbeConfig::new(coherent_state(z, dim).map_err(err)?, lambda, readout.clone()).map_err(err)?;
                let closed = kerrqnd::joint_path_interference_povm(eps2, theta2, &probe).map_err(err)?;
                let full = kerrqnd::joint_povm_full(eps2, theta2, &probe).map_err(err)?;
                worst = worst.max(closed.max_deviation(&full).map_err(err)?);
                let expected = 2.0 * (eps2 * (1.0 - eps2)).sqrt() * (-amp * amp * (1.0 - lambda.cos())).exp();
                vis = vis.max((kerrqnd::povm_visibility(&closed).map_err(err)? - expected).abs());
                vis = vis.max((kerrqnd::visibility(eps2, &probe) - expected).abs());
            }
        }
    }
    ensure(worst < 1e-8, || format!("closed form vs full construction {worst:e}"))?;
    ensure(vis < 1e-4, || format!("visibility deviation {vis:e}"))?;

    // no coupling: the count marginal is the sharp single-photon observable
    let probe = ProbeConfig::new(coherent_state(C64::new(1.5, 0.0), dim).map_err(err)?, 0.0, readout.clone()).map_err(err)?;
    let counts = kerrqnd::joint_path_interference_povm(0.75, theta2, &probe)
        .map_err(err)?
        .marginal(0)
        .map_err(err)?;
    let sharp = mzi::single_photon_observable(0.75, theta2).map_err(err)?;
    let collapse = counts
        .effect(&Label::Int(1))
        .map_err(err)?
        .op()
        .max_abs_diff(sharp.effect(&Label::pair(1, 0)).map_err(err)?.op())
        .max(
            counts
                .effect(&Label::Int(0))
                .map_err(err)?
                .op()
                .max_abs_diff(sharp.effect(&Label::pair(0, 1)).map_err(err)?.op()),
        );
    ensure(collapse < 1e-10, || format!("zero coupling deviation {collapse:e}"))?;

    let number = ProbeConfig::new(number_state(5, dim).map_err(err)?, 0.8, readout).map_err(err)?;
    let confidence = kerrqnd::path_confidence(&number);
    ensure((confidence - 0.5).abs() < 1e-15, || format!("number-state path confidence {confidence}"))?;
    Ok(format!(
        "closed vs full {worst:.2e}, visibility {vis:.2e}, zero coupling {collapse:.2e}, number-state confidence {confidence}"
    ))
}

fn c10_measurement_models() -> Outcome {
    let grid = CyclicGrid::new(16).map_err(err)?;
    let toy = models::toy_discrete_measurement(&pauli::z(), &grid, 3, 1).map_err(err)?;
    let induced = toy.induced_observable().map_err(err)?;
    let spectral = DiscreteObservable::new(
        vec![Label::Int(-1), Label::Int(1)],
        vec![
            Effect::new(Operator::real_diagonal(&[0.0, 1.0])).map_err(err)?,
            Effect::new(Operator::real_diagonal(&[1.0, 0.0])).map_err(err)?,
        ],
    )
    .map_err(err)?;
    let spectral_dev = induced.max_deviation(&spectral).map_err(err)?;
    ensure(spectral_dev < 1e-10, || format!("toy model deviation {spectral_dev:e}"))?;
    let luders = StateTransformer::luders(&induced).map_err(err)?;
    ensure(luders.is_repeatable_default(), || "Lüders transformer not repeatable".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let phi = sample::haar_vector(16, &mut rng);
    let phi: Vec<C64> = phi.entries().iter().copied().collect();
    let states = sample::state_sample(16);
    let smeared = models::unsharp_position_transformer(&phi, &grid).map_err(err)?;
    let defect = smeared.first_kind_defect(&states).map_err(err)?;
    ensure(defect < 1e-9, || format!("first-kind defect {defect:e}"))?;
    ensure(!smeared.is_repeatable(&states), || "smeared transformer is repeatable".into())?;

    let f = ConfidenceFunction::from_profile(&phi).map_err(err)?;
    let conv = models::unsharp_position_observable(&f, &grid).map_err(err)?;
    let scheme = models::unsharp_position_scheme(&f, &grid)
        .map_err(err)?
        .induced_observable()
        .map_err(err)?;
    let conv_dev = conv.max_deviation(&scheme).map_err(err)?;
    ensure(conv_dev < 1e-10, || format!("scheme vs convolution {conv_dev:e}"))?;
    Ok(format!(
        "spectral {spectral_dev:.2e}, first-kind {defect:.2e}, convolution {conv_dev:.2e}"
    ))
}

fn c11_expanded_mzi() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 0xf16);
    let (mut completeness, mut min_sv): (f64, f64) = (0.0, f64::INFINITY);
    for _ in 0..20 {
        let p = ExpandedParams {
            bs2: BSParams::new(0.1 + 0.8 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()).map_err(err)?,
            eps3: 0.1 + 0.8 * rng.random::<f64>(),
            eps4: 0.1 + 0.8 * rng.random::<f64>(),
            gamma: 2.0 * PI * rng.random::<f64>(),
        };
        let obs = mzi::expanded_default(&p).map_err(err)?;
        ensure(obs.observable.len() == 4, || format!("{} outcomes", obs.observable.len()))?;
        ensure(obs.rank == 4, || format!("rank {}", obs.rank))?;
        completeness = completeness.max(obs.observable.completeness_residual());
        min_sv = min_sv.min(obs.singular_values[3]);
    }
    ensure(completeness < 1e-9, || format!("completeness residual {completeness:e}"))?;
    ensure(min_sv > 1e-6, || format!("min singular value {min_sv:e}"))?;
    Ok(format!("rank 4 throughout, completeness {completeness:.2e}, min singular value {min_sv:.3e}"))
}

fn c12_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_povmlab");
    let commands: [&[&str]; 7] = [
        &["mzi-scan", "--eps1", "0.5", "--eps2", "0.994", "--delta-steps", "33"],
        &["mzi-scan", "--nmax", "3", "--format", "json"],
        &["kerr-tradeoff", "--amp", "0,1,2", "--eps2", "0.5,0.9"],
        &["kerr-tradeoff", "--probe", "number", "--format", "json"],
        &["spin", "--a1", "0.8,0,0", "--a2", "0,0.55,0"],
        &["spin-phase", "--spin", "1.5", "--interval", "0.3,2.1", "--interval", "1,6"],
        &["models", "--grid-d", "12", "--format", "json"],
    ];
    for args in commands {
        let run = || {
            Command::new(bin)
                .args(args)
                .args(["--seed", "7"])
                .output()
                .map_err(|e| e.to_string())
        };
        let (first, second) = (run()?, run()?);
        ensure(first.status.success(), || format!("{args:?} exited with {}", first.status))?;
        ensure(!first.stdout.is_empty() && first.stdout == second.stdout, || {
            format!("{args:?} output differs between runs")
        })?;
    }
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 12] = [
        ("interference law", c1_interference_law, Some(Duration::from_secs(10))),
        ("realised near-path regime", c2_realised_regime, None),
        ("anticoincidence", c3_anticoincidence, None),
        ("binomial induced observable", c4_binomial_observable, None),
        ("coexistence criterion vs ball oracle", c5_coexistence_oracle, Some(Duration::from_secs(5))),
        ("joint spin observable", c6_joint_spin_observable, None),
        ("complementarity and smeared joint measurability", c7_complementarity, None),
        ("spin phase observable", c8_spin_phase, None),
        ("Kerr joint observable", c9_kerr_joint, Some(Duration::from_secs(60))),
        ("measurement models", c10_measurement_models, None),
        ("expanded interferometer", c11_expanded_mzi, None),
        ("CLI determinism", c12_determinism, None),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, limit) {
            if elapsed > *limit {
                outcome = Err(format!("{detail}; runtime {:.2} s exceeds {} s", elapsed.as_secs_f64(), limit.as_secs()));
            }
        }
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.2} s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{secs:.2} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
