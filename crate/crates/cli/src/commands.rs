use std::io::Write;

use gasbound_core::connective::{vk_monte_carlo_with, RadialSampler, Vk1dConfig, DEFAULT_CHAINS};
use gasbound_core::oracle::{
    check_contraction_bound, check_density_correspondence, check_log_z_identity, check_recursion_identity, check_self_map, zero_free_scan,
    ActivityField, Interaction, OracleConfig, PartitionConfig, Region1D, ScanGrid,
};
use gasbound_core::potentials::load_potential;
use gasbound_core::threshold::{beta_grid, resolve_delta, sweep, DeltaPolicy, SWEEP_CSV_HEADER};
use gasbound_core::{
    analyticity_threshold, delta_phi_upper, temperedness_constants, vk_quadrature_1d, DeltaEstimate, McConfig, PairPotential,
    RadialQuadratureConfig, TemperednessConstants, ThermoState, ThresholdReport,
};
use serde::Serialize;

use crate::output::{config_hash, to_json, Envelope};
use crate::{
    Check, Command, ConstantsArgs, DeltaArgs, DeltaChoice, Failure, Format, McArgs, Method, PotentialArgs, SweepArgs, ThresholdArgs, VerifyArgs,
    VkArgs, EXIT_CHECK_FAILED, EXIT_FAILURE, EXIT_OK,
};

/// Rendered output and the exit code it warrants.
pub(crate) struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, code: EXIT_OK }
    }
}

type Res<T> = Result<T, Failure>;

pub(crate) fn execute(cmd: &Command, err: &mut dyn Write) -> Res<Outcome> {
    match cmd {
        Command::Constants(a) => constants(a, err),
        Command::Threshold(a) => threshold(a, err),
        Command::Vk(a) => vk(a, err),
        Command::Delta(a) => delta(a, err),
        Command::Verify(a) => verify(a, err),
        Command::Sweep(a) => run_sweep(a, err),
    }
}

fn load(p: &PotentialArgs) -> Res<PairPotential> {
    Ok(load_potential(&p.potential)?)
}

fn thermo(beta: f64) -> Res<ThermoState> {
    ThermoState::new(beta).map_err(|e| Failure::Usage(e.to_string()))
}

fn mc_config(m: &McArgs) -> McConfig {
    McConfig { samples: m.samples, seed: m.seed, chains: DEFAULT_CHAINS, convention: m.convention }
}

fn policy(choice: DeltaChoice, kmax: usize, mc: &McArgs) -> DeltaPolicy {
    match choice {
        DeltaChoice::Auto => DeltaPolicy::Auto { k_max: kmax, mc: mc_config(mc) },
        DeltaChoice::Cphi => DeltaPolicy::CPhi,
        DeltaChoice::Value(v) => DeltaPolicy::Fixed(v),
    }
}

fn constants_of(p: &PairPotential, t: ThermoState) -> Res<TemperednessConstants> {
    Ok(temperedness_constants(p, t, &RadialQuadratureConfig::default())?)
}

fn constants(a: &ConstantsArgs, err: &mut dyn Write) -> Res<Outcome> {
    #[derive(Serialize)]
    struct Body {
        c_phi: f64,
        a_phi: f64,
        p_phi: f64,
        c_hat_phi: f64,
        beta: f64,
        error: f64,
    }
    let p = load(&a.potential)?;
    let t = thermo(a.beta)?;
    let cfg = RadialQuadratureConfig { rel_tol: a.tol, ..RadialQuadratureConfig::default() };
    let k = temperedness_constants(&p, t, &cfg)?;
    let _ = writeln!(err, "{p}: C_φ = {} (A_φ = {}, P_φ = {}), Ĉ_φ = {}", k.c_phi, k.a_phi, k.p_phi, k.c_hat_phi);
    let hash = config_hash("constants", a, &p);
    let body = Body { c_phi: k.c_phi, a_phi: k.a_phi, p_phi: k.p_phi, c_hat_phi: k.c_hat_phi, beta: k.beta, error: k.quad_error };
    Ok(Outcome::ok(to_json(&Envelope::new(&hash, body))))
}

fn threshold(a: &ThresholdArgs, err: &mut dyn Write) -> Res<Outcome> {
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        report: ThresholdReport,
        delta_policy: DeltaChoice,
        #[serde(skip_serializing_if = "Option::is_none")]
        delta_estimate: Option<DeltaEstimate>,
    }
    let p = load(&a.potential)?;
    let t = thermo(a.beta)?;
    let k = constants_of(&p, t)?;
    let (delta, delta_estimate) = resolve_delta(&p, t, &k, &policy(a.delta, a.kmax, &a.mc))?;
    let report = analyticity_threshold(&k, delta, t.beta * p.local_stability_unit())?;
    let _ = writeln!(
        err,
        "{p}, β = {}: Δ = {delta}, threshold {} ({:.3}× Penrose–Ruelle, {:.3}× Procacci–Yuhjtman)",
        t.beta, report.new_threshold, report.ratio_pr, report.ratio_py
    );
    let hash = config_hash("threshold", a, &p);
    Ok(Outcome::ok(to_json(&Envelope::new(&hash, Body { report, delta_policy: a.delta, delta_estimate }))))
}

fn vk(a: &VkArgs, err: &mut dyn Write) -> Res<Outcome> {
    #[derive(Serialize)]
    struct Body {
        k: usize,
        mean: f64,
        std_error: f64,
        samples: u64,
        seed: u64,
        convention: gasbound_core::Convention,
        method: Method,
    }
    let p = load(&a.potential)?;
    let t = thermo(a.beta)?;
    let est = match a.method {
        Method::Mc => {
            let sampler = RadialSampler::new(&p, t, &RadialQuadratureConfig::default())?;
            vk_monte_carlo_with(&sampler, a.k, &mc_config(&a.mc))?
        }
        Method::Quadrature => vk_quadrature_1d(&p, t, a.k, a.mc.convention, &Vk1dConfig::default())?,
    };
    let _ = writeln!(err, "{p}: V_{} = {} ± {} ({} convention)", a.k, est.mean, est.std_error, est.convention);
    let hash = config_hash("vk", a, &p);
    let body = Body {
        k: est.k,
        mean: est.mean,
        std_error: est.std_error,
        samples: est.n_samples,
        seed: a.mc.seed,
        convention: est.convention,
        method: a.method,
    };
    Ok(Outcome::ok(to_json(&Envelope::new(&hash, body))))
}

fn delta(a: &DeltaArgs, err: &mut dyn Write) -> Res<Outcome> {
    #[derive(Serialize)]
    struct Body {
        #[serde(flatten)]
        estimate: DeltaEstimate,
        c_phi: f64,
        a_phi: f64,
    }
    let p = load(&a.potential)?;
    let t = thermo(a.beta)?;
    let k = constants_of(&p, t)?;
    let sampler = RadialSampler::new(&p, t, &RadialQuadratureConfig::default())?;
    let cfg = mc_config(&a.mc);
    let vks = (1..=a.kmax).map(|j| vk_monte_carlo_with(&sampler, j, &cfg)).collect::<gasbound_core::Result<Vec<_>>>()?;
    let estimate = delta_phi_upper(&vks, k.a_phi, a.kmax)?;
    let _ = writeln!(
        err,
        "{p}: Δ̂ = {} ± {} at k = {} (C_φ = {})",
        estimate.delta_hat, estimate.std_error, estimate.witnessing_k, k.c_phi
    );
    let hash = config_hash("delta", a, &p);
    Ok(Outcome::ok(to_json(&Envelope::new(&hash, Body { estimate, c_phi: k.c_phi, a_phi: k.a_phi }))))
}

pub const LOGZ_TOL: f64 = 1e-6;
pub const RECURSION_TOL: f64 = 1e-6;
pub const CORRESPONDENCE_TOL: [f64; 2] = [1e-5, 1e-3];
pub const TREE_TOL: f64 = 1e-10;

#[derive(Debug, Serialize)]
struct CheckRow {
    check: Check,
    residual: f64,
    tolerance: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<serde_json::Value>,
}

impl CheckRow {
    fn new(check: Check, residual: f64, tolerance: f64) -> Self {
        Self { check, residual, tolerance, pass: residual <= tolerance, depth: None, detail: None }
    }

    fn detail(mut self, v: impl Serialize) -> Self {
        self.detail = Some(serde_json::to_value(v).expect("details serialize"));
        self
    }
}

fn verify(a: &VerifyArgs, err: &mut dyn Write) -> Res<Outcome> {
    let p = load(&a.potential)?;
    let t = thermo(a.beta)?;
    if !(a.volume > 0.0 && a.volume.is_finite()) {
        return Err(Failure::Usage(format!("--volume must be positive, got {}", a.volume)));
    }
    let inter = Interaction::new(p.clone(), t)?;
    let region = Region1D::closed(0.0, a.volume);
    let field = ActivityField::constant(inter, a.lambda);
    let cfg = OracleConfig::default();
    let l = a.volume;
    let mut rows = Vec::new();
    for &check in &a.checks {
        match check {
            Check::Logz => {
                let c = check_log_z_identity(&field, &region, &cfg)?;
                rows.push(CheckRow::new(check, c.relative, LOGZ_TOL));
            }
            Check::Recursion => {
                let mut worst: f64 = 0.0;
                for v in [0.0, 0.25 * l, 0.5 * l, 0.75 * l, l] {
                    worst = worst.max(check_recursion_identity(&field, &region, v, &cfg)?.relative);
                }
                rows.push(CheckRow::new(check, worst, RECURSION_TOL));
            }
            Check::Correspondence => {
                for depth in [1, 2] {
                    let tol = if depth == 1 { cfg } else { OracleConfig::with_tolerance(1e-7) };
                    let c = check_density_correspondence(&field, &region, depth, 0.5 * l, &tol)?;
                    let mut row = CheckRow::new(check, c.residual, CORRESPONDENCE_TOL[depth - 1]);
                    row.depth = Some(depth);
                    rows.push(row);
                }
            }
            Check::Selfmap => {
                let r = check_self_map(&p, t, a.trials, a.seed, &OracleConfig::with_tolerance(1e-8))?;
                rows.push(CheckRow::new(check, r.max_excess, TREE_TOL).detail(r));
            }
            Check::Contraction => {
                let r = check_contraction_bound(&p, t, 1, a.trials, a.seed, &OracleConfig::with_tolerance(1e-8))?;
                let mut row = CheckRow::new(check, r.max_gap.max(0.0), TREE_TOL);
                row.pass = r.holds();
                rows.push(row.detail(r));
            }
            Check::Zerofree => {
                // The disk of radius equal to the threshold at Δ = C_φ.
                let k = constants_of(&p, t)?;
                let star = analyticity_threshold(&k, k.c_phi, t.beta * p.local_stability_unit())?.new_threshold;
                let r = zero_free_scan(&p, t, &region, star, ScanGrid::default(), &PartitionConfig::default())?;
                let residual = (r.roots_inside.len() as i64 + r.winding_number.abs()) as f64;
                let mut row = CheckRow::new(check, residual, 0.0);
                row.pass = r.zero_free;
                rows.push(row.detail(r));
            }
        }
    }
    for r in &rows {
        let depth = r.depth.map(|d| format!(" (k = {d})")).unwrap_or_default();
        let verdict = if r.pass { "pass" } else { "FAIL" };
        let _ = writeln!(err, "{:?}{depth}: residual {:.3e}, tolerance {:.1e}: {verdict}", r.check, r.residual, r.tolerance);
    }
    let passed = rows.iter().all(|r| r.pass);
    let hash = config_hash("verify", a, &p);
    let out: Vec<Envelope<&CheckRow>> = rows.iter().map(|r| Envelope::new(&hash, r)).collect();
    Ok(Outcome { text: to_json(&out), code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED } })
}

fn run_sweep(a: &SweepArgs, err: &mut dyn Write) -> Res<Outcome> {
    #[derive(Serialize)]
    struct Row {
        beta: f64,
        #[serde(flatten, skip_serializing_if = "Option::is_none")]
        report: Option<ThresholdReport>,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    }
    #[derive(Serialize)]
    struct Body {
        rows: Vec<Row>,
    }
    let p = load(&a.potential)?;
    let betas = beta_grid(a.beta_min, a.beta_max, a.steps).map_err(|e| Failure::Usage(e.to_string()))?;
    let rows = sweep(&p, &policy(a.delta, a.kmax, &a.mc), &betas, &RadialQuadratureConfig::default())?;
    let failed = rows.iter().filter(|r| r.report.is_err()).count();
    for r in rows.iter().filter_map(|r| r.report.as_ref().err().map(|e| (r.beta, e))) {
        let _ = writeln!(err, "warning: β = {}: {}", r.0, r.1);
    }
    let _ = writeln!(err, "{p}: {} rows, {failed} failed", rows.len());
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from(SWEEP_CSV_HEADER);
            s.push('\n');
            for r in &rows {
                s.push_str(&r.csv());
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let hash = config_hash("sweep", a, &p);
            let rows = rows
                .into_iter()
                .map(|r| match r.report {
                    Ok(rep) => Row { beta: r.beta, report: Some(rep), error: None },
                    Err(e) => Row { beta: r.beta, report: None, error: Some(e) },
                })
                .collect();
            to_json(&Envelope::new(&hash, Body { rows }))
        }
    };
    Ok(Outcome { text, code: if failed == 0 { EXIT_OK } else { EXIT_FAILURE } })
}
