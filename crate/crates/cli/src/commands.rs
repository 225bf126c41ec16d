use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use povmlab::kerrqnd::{self, ProbeKind};
use povmlab::linalg::Operator;
use povmlab::models::{self, ConfidenceFunction, CyclicGrid};
use povmlab::mzi::{self, MZIParams};
use povmlab::povm::{Label, State};
use povmlab::spin::{self, BlochVector, SpinPhaseSpace};
use povmlab::{pauli, sample, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{Check, Report};

/// Default seed for every command.
pub const DEFAULT_SEED: u64 = 20_240_611;

/// Default `--verify` tolerance, overridden by `POVMLAB_TOL`.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Args)]
pub struct Output {
    /// Seed for every sampled quantity.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Exit with status 2 when any check fails.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Clone, Debug, Args)]
pub struct MziScanArgs {
    #[arg(long, default_value_t = 0.5)]
    pub eps1: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 2.0 * PI, allow_negative_numbers = true)]
    pub delta_max: f64,
    /// Number of phase points, endpoints included.
    #[arg(long, default_value_t = 25)]
    pub delta_steps: usize,
    /// Photon truncation per mode.
    #[arg(long, default_value_t = 1)]
    pub nmax: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProbeArg {
    Coherent,
    Number,
}

#[derive(Clone, Debug, Args)]
pub struct KerrArgs {
    /// Probe amplitudes |z|, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2,3")]
    pub amp: Vec<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Final splitter transparencies, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub eps2: Vec<f64>,
    /// Phase readout bins.
    #[arg(long, default_value_t = kerrqnd::DEFAULT_PHASE_BINS)]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = ProbeArg::Coherent)]
    pub probe: ProbeArg,
    /// Probe photon truncation; chosen from the leakage bound when absent.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, Args)]
pub struct SpinArgs {
    /// First Bloch vector as x,y,z.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub a1: [f64; 3],
    /// Second Bloch vector as x,y,z.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub a2: [f64; 3],
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, Args)]
pub struct SpinPhaseArgs {
    /// Spin quantum number (a positive multiple of ½).
    #[arg(long, default_value_t = 0.5)]
    pub spin: f64,
    /// Phase interval as u,v within [0, 2π]; repeatable.
    #[arg(long = "interval", value_parser = parse_interval, default_value = "0,3.141592653589793")]
    pub intervals: Vec<(f64, f64)>,
    /// Number of seeded shifts used for the covariance residual.
    #[arg(long, default_value_t = 100)]
    pub shifts: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, Args)]
pub struct ModelsArgs {
    /// Number of grid sites.
    #[arg(long, default_value_t = 16)]
    pub grid_d: usize,
    #[command(flatten)]
    pub output: Output,
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok([*x, *y, *z]),
        _ => Err(format!("expected three finite components x,y,z, got {s:?}")),
    }
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [u, v] => Ok((*u, *v)),
        _ => Err(format!("expected an interval u,v, got {s:?}")),
    }
}

fn verify_tolerance() -> Result<f64, Error> {
    match std::env::var("POVMLAB_TOL") {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(Error::InvalidParameter(format!("POVMLAB_TOL={v:?} is not a positive number"))),
        },
        Err(_) => Ok(DEFAULT_VERIFY_TOL),
    }
}

fn phase_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, Error> {
    if !(min.is_finite() && max.is_finite()) || max < min || steps == 0 {
        return Err(Error::InvalidParameter(format!(
            "phase range [{min}, {max}] with {steps} points"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let h = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|k| min + h * k as f64).collect())
}

/// Single-photon counting probabilities over a phase sweep.
pub fn mzi_scan(a: &MziScanArgs) -> Result<Report, Error> {
    let tol = verify_tolerance()?;
    if a.nmax == 0 {
        return Err(Error::InvalidParameter("nmax must be at least 1".into()));
    }
    let deltas = phase_grid(a.delta_min, a.delta_max, a.delta_steps)?;
    let mut r = Report::new(vec![
        "delta", "p10", "p01", "p_other", "eps_analytic", "abs_err", "sum_check",
    ]);
    r.config("command", json!("mzi-scan"));
    r.config("eps1", json!(a.eps1));
    r.config("eps2", json!(a.eps2));
    r.config("theta1", json!(a.theta1));
    r.config("theta2", json!(a.theta2));
    r.config("delta_min", json!(a.delta_min));
    r.config("delta_max", json!(a.delta_max));
    r.config("delta_steps", json!(a.delta_steps));
    r.config("nmax", json!(a.nmax));
    r.config("seed", json!(a.output.seed));
    let dim = a.nmax + 1;
    let (mut worst_err, mut worst_sum) = (0.0f64, 0.0f64);
    let mut p10s = Vec::new();
    for &delta in &deltas {
        let p = MZIParams::from_values(a.eps1, a.theta1, a.eps2, a.theta2, delta)?;
        let w = mzi::mzi_output_state(&State::basis(dim, 1), &State::basis(dim, 0), &p)?;
        let probs = mzi::detection_probabilities(&w)?;
        let p10 = probs[&(1, 0)];
        let p01 = probs[&(0, 1)];
        let other: f64 = probs
            .iter()
            .filter(|(k, _)| **k != (1, 0) && **k != (0, 1))
            .map(|(_, v)| v)
            .sum();
        let total: f64 = probs.values().sum();
        let eps = mzi::effective_transparency(&p);
        let err = (p10 - eps).abs();
        let sum_check = (total - 1.0).abs();
        worst_err = worst_err.max(err);
        worst_sum = worst_sum.max(sum_check);
        p10s.push(p10);
        r.push_row(vec![
            delta.into(),
            p10.into(),
            p01.into(),
            other.into(),
            eps.into(),
            err.into(),
            sum_check.into(),
        ]);
    }
    r.checks.push(Check::at_most("max_abs_err", worst_err, tol));
    r.checks.push(Check::at_most("max_sum_check", worst_sum, 1e-9));
    if let Ok((c0, c1, c2)) = mzi::fit_cosine(&deltas, &p10s) {
        r.checks.push(Check::info("fit_offset", c0));
        r.checks.push(Check::info("fit_amplitude", c1.hypot(c2)));
        r.checks.push(Check::info("fit_cos_coefficient", c1));
        r.checks.push(Check::info("fit_sin_coefficient", c2));
    }
    r.checks.push(Check::info("visibility", mzi::visibility(a.eps1, a.eps2)));
    Ok(r)
}

/// Visibility against path confidence over probe amplitudes.
pub fn kerr_tradeoff(a: &KerrArgs) -> Result<Report, Error> {
    let kind = match a.probe {
        ProbeArg::Coherent => ProbeKind::Coherent,
        ProbeArg::Number => ProbeKind::Number,
    };
    let rows = kerrqnd::tradeoff_scan(&a.amp, a.lambda, &a.eps2, a.bins, kind, a.nmax)?;
    let mut r = Report::new(vec![
        "amp", "lambda", "eps2", "visibility", "path_confidence", "visibility_closed_form", "abs_diff",
        "probe_dim", "sum_check",
    ]);
    r.config("command", json!("kerr-tradeoff"));
    r.config("amp", json!(a.amp));
    r.config("lambda", json!(a.lambda));
    r.config("eps2", json!(a.eps2));
    r.config("bins", json!(a.bins));
    r.config("probe", json!(format!("{:?}", a.probe).to_lowercase()));
    r.config("nmax", json!(a.nmax));
    r.config("seed", json!(a.output.seed));
    let (mut worst_diff, mut worst_sum) = (0.0f64, 0.0f64);
    for row in &rows {
        let contrast = 2.0 * (row.eps2 * (1.0 - row.eps2)).sqrt();
        let closed = match kind {
            ProbeKind::Coherent => contrast * (-row.amp * row.amp * (1.0 - row.lambda.cos())).exp(),
            ProbeKind::Number => contrast,
        };
        let diff = (row.visibility - closed).abs();
        worst_diff = worst_diff.max(diff);
        worst_sum = worst_sum.max(row.normalization_defect);
        r.push_row(vec![
            row.amp.into(),
            row.lambda.into(),
            row.eps2.into(),
            row.visibility.into(),
            row.path_confidence.into(),
            closed.into(),
            diff.into(),
            row.probe_dim.into(),
            row.normalization_defect.into(),
        ]);
    }
    r.checks.push(Check::flag("monotone_tradeoff", kerrqnd::tradeoff_is_monotone(&rows)));
    r.checks.push(Check::at_most("max_visibility_closed_form_diff", worst_diff, 1e-6));
    r.checks.push(Check::at_most("max_sum_check", worst_sum, 1e-9));
    Ok(r)
}

/// Coexistence decision for two qubit effects with the joint observable when it exists.
pub fn spin_report(a: &SpinArgs) -> Result<Report, Error> {
    let a1 = BlochVector::new(a.a1);
    let a2 = BlochVector::new(a.a2);
    spin::spin_effect(&a1)?;
    spin::spin_effect(&a2)?;
    let mut r = Report::new(vec!["outcome", "c0", "cx", "cy", "cz", "min_eigenvalue"]);
    r.config("command", json!("spin"));
    r.config("a1", json!(a.a1));
    r.config("a2", json!(a.a2));
    r.config("seed", json!(a.output.seed));
    let value = spin::coexist_value(&a1, &a2);
    let decision = spin::coexist_criterion(&a1, &a2);
    let oracle = spin::coexist_oracle(&a1, &a2);
    r.checks.push(Check::info("criterion_value", value));
    r.checks.push(Check::info("coexistent", if decision { 1.0 } else { 0.0 }));
    r.checks.push(Check::info("oracle_coexistent", if oracle { 1.0 } else { 0.0 }));
    r.checks.push(Check::flag("oracle_agrees", decision == oracle));
    if decision {
        let joint = spin::joint_spin_observable(&a1, &a2)?;
        for (label, e) in joint.iter() {
            let (t0, t) = pauli::coordinates(e.op());
            let (lo, _) = e.op().spectral_range()?;
            r.push_row(vec![
                label.to_string().into(),
                (0.5 * t0).into(),
                (0.5 * t[0]).into(),
                (0.5 * t[1]).into(),
                (0.5 * t[2]).into(),
                lo.into(),
            ]);
        }
        let m1 = joint.marginal(0)?.max_deviation(&spin::spin_observable(&a1)?)?;
        let m2 = joint.marginal(1)?.max_deviation(&spin::spin_observable(&a2)?)?;
        r.checks.push(Check::flag("min_eigenvalue_certificate", joint.min_eigenvalue() >= -1e-10));
        r.checks.push(Check::info("min_eigenvalue", joint.min_eigenvalue()));
        r.checks.push(Check::at_most("completeness_residual", joint.completeness_residual(), 1e-9));
        r.checks.push(Check::at_most("marginal_deviation", m1.max(m2), 1e-12));
    }
    Ok(r)
}

/// Phase effects of intervals with their covariance and uniformity residuals.
pub fn spin_phase_report(a: &SpinPhaseArgs) -> Result<Report, Error> {
    let space = SpinPhaseSpace::from_spin(a.spin)?;
    let d = space.dim();
    let mut r = Report::new(vec!["interval", "u", "v", "m_row", "m_col", "re", "im"]);
    r.config("command", json!("spin-phase"));
    r.config("spin", json!(a.spin));
    r.config("intervals", json!(a.intervals));
    r.config("shifts", json!(a.shifts));
    r.config("seed", json!(a.output.seed));
    let full = spin::spin_phase_effect(&space, 0.0, 2.0 * PI)?;
    r.checks.push(Check::at_most(
        "full_circle_identity",
        full.op().max_abs_diff(&Operator::identity(d)),
        1e-12,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(a.output.seed);
    for (k, &(u, v)) in a.intervals.iter().enumerate() {
        let e = spin::spin_phase_effect(&space, u, v)?;
        for row in 0..d {
            for col in 0..d {
                let z = e.op().get(row, col);
                r.push_row(vec![
                    k.into(),
                    u.into(),
                    v.into(),
                    space.m(row).into(),
                    space.m(col).into(),
                    z.re.into(),
                    z.im.into(),
                ]);
            }
        }
        let (lo, hi) = e.op().spectral_range()?;
        let mut cov = 0.0f64;
        for _ in 0..a.shifts {
            let alpha = 2.0 * PI * rng.random::<f64>();
            cov = cov.max(spin::spin_phase_covariance_check(&space, u, v, alpha)?);
        }
        let uniform = (0..d)
            .map(|m| (e.op().get(m, m).re - (v - u) / (2.0 * PI)).abs())
            .fold(0.0, f64::max);
        r.checks.push(Check::info(format!("interval{k}_min_eigenvalue"), lo));
        r.checks.push(Check::info(format!("interval{k}_max_eigenvalue"), hi));
        r.checks.push(Check::info(format!("interval{k}_idempotency_defect"), e.idempotency_defect()));
        r.checks.push(Check::at_most(format!("interval{k}_covariance_residual"), cov, 1e-10));
        r.checks.push(Check::at_most(format!("interval{k}_uniformity_residual"), uniform, 1e-12));
    }
    Ok(r)
}

/// Measurement-model checks on a cyclic grid with a seeded confidence function.
pub fn models_report(a: &ModelsArgs) -> Result<Report, Error> {
    if a.grid_d < 3 {
        return Err(Error::InvalidParameter("grid needs at least three sites".into()));
    }
    let grid = CyclicGrid::new(a.grid_d)?;
    let d = a.grid_d;
    let mut rng = ChaCha8Rng::seed_from_u64(a.output.seed);
    let raw: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut f: Vec<f64> = raw.iter().map(|x| x / total).collect();
    f[0] += 1.0 - f.iter().sum::<f64>();
    let conf = ConfidenceFunction::new(f)?;
    let direct = models::unsharp_position_observable(&conf, &grid)?;
    let induced = models::unsharp_position_scheme(&conf, &grid)?.induced_observable()?;
    let mut r = Report::new(vec!["x", "q", "convolution", "scheme", "abs_diff"]);
    r.config("command", json!("models"));
    r.config("grid_d", json!(d));
    r.config("seed", json!(a.output.seed));
    for x in 0..d as i64 {
        let e1 = direct.effect(&Label::Int(x))?;
        let e2 = induced.effect(&Label::Int(x))?;
        for q in 0..d {
            let (w1, w2) = (e1.op().get(q, q).re, e2.op().get(q, q).re);
            r.push_row(vec![x.into(), q.into(), w1.into(), w2.into(), (w1 - w2).abs().into()]);
        }
    }
    r.checks.push(Check::at_most("scheme_vs_convolution", direct.max_deviation(&induced)?, 1e-10));

    let toy = models::toy_discrete_measurement(&pauli::z(), &grid, 1, 0)?;
    let spectral = povmlab::DiscreteObservable::new(
        vec![Label::Int(-1), Label::Int(1)],
        vec![
            povmlab::Effect::new(Operator::real_diagonal(&[0.0, 1.0]))?,
            povmlab::Effect::new(Operator::real_diagonal(&[1.0, 0.0]))?,
        ],
    )?;
    let toy_obs = toy.induced_observable()?;
    r.checks.push(Check::at_most("toy_spectral_deviation", toy_obs.max_deviation(&spectral)?, 1e-10));
    r.checks.push(Check::flag("toy_repeatable", toy.state_transformer()?.is_repeatable_default()));

    let transformer = models::unsharp_position_transformer(&conf.profile(), &grid)?;
    let states = sample::state_sample_with(d, a.output.seed, sample::RANDOM_STATES);
    r.checks.push(Check::at_most("smeared_first_kind_defect", transformer.first_kind_defect(&states)?, 1e-9));
    r.checks.push(Check::flag("smeared_not_repeatable", !transformer.is_repeatable(&states)));
    Ok(r)
}
