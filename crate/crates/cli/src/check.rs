use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use proxkit::functionals::{sample_catalog, ProxFunctional};
use proxkit::linalg::{LinearOperator, Vector};
use proxkit::newton::{control_ssn, l1_ssn, ssn_solve, superlinear_diagnostic};
use proxkit::problems::{
    boxqp_pattern_solution, kkt_residual, lasso_pattern_solution, oracle_boxqp, ProblemSpec, ORACLE_MAX_DIM,
};
use proxkit::splitting::{dr_as_pdhg_check, fista, prox_gradient, SolverConfig};
use proxkit::trace::IterTrace;
use proxkit::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::failure::{CmdResult, Failure};
use crate::output::write_file;
use crate::runner::default_ssn_gamma;
use crate::solve::load_problem;
use crate::Common;

const MOREAU_TOL: f64 = 1e-12;
const SCALED_MOREAU_TOL: f64 = 1e-11;
const ENVELOPE_REL_TOL: f64 = 1e-5;
const ENVELOPE_FD_STEP: f64 = 1e-6;
const ENVELOPE_ORDER_TOL: f64 = 1e-12;
const FIRM_TOL: f64 = 1e-12;
const IDENTIFICATION_TOL: f64 = 1e-10;
const IDENTIFICATION_ITERS: usize = 50;
const RATE_SLACK: f64 = 1e-12;
const RATE_ITERS: usize = 500;
const REFERENCE_ITERS: usize = 100_000;
const SUPERLINEAR_RATIO: f64 = 0.1;
const SSN_MAX_ITER: usize = 15;
const FEJER_SLACK: f64 = 1e-12;
const REFERENCE_KKT_TOL: f64 = 1e-10;
/// First-order residual at which a failed cold Newton start is retried.
const WARM_START_TOL: f64 = 1e-3;
/// Catalog samples are drawn in dimensions `1..=MAX_SAMPLE_DIM`.
const MAX_SAMPLE_DIM: usize = 5;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    /// Moreau decomposition through the conjugate's prox.
    Moreau,
    /// Yosida approximation against finite differences of the envelope.
    Envelope,
    /// Firm nonexpansiveness of every prox.
    Nonexpansive,
    /// Douglas-Rachford as a special case of the primal-dual method.
    Identification,
    /// O(1/k) bound of fixed-step proximal gradient; needs --problem.
    Rate,
    /// Error ratios of semismooth Newton; needs --problem.
    Superlinear,
    /// Distances of proximal-gradient iterates to a solution; needs --problem.
    Fejer,
}

impl Suite {
    fn needs_problem(self) -> bool {
        matches!(self, Suite::Rate | Suite::Superlinear | Suite::Fejer)
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub suite: Suite,
    /// Random trials for the catalog suites.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Problem JSON for the rate, superlinear and fejer suites.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One checked property: `worst` is the largest measured violation, which
/// must not exceed `limit`.
struct Invariant {
    name: String,
    worst: f64,
    limit: f64,
    note: String,
}

impl Invariant {
    fn new(name: impl Into<String>, worst: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            worst,
            limit,
            note: String::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    fn pass(&self) -> bool {
        self.worst <= self.limit
    }
}

/// Running maximum that remembers where it was attained.
struct Worst {
    value: f64,
    at: String,
}

impl Default for Worst {
    fn default() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            at: String::new(),
        }
    }
}

impl Worst {
    fn update(&mut self, v: f64, at: impl FnOnce() -> String) {
        if v > self.value || v.is_nan() {
            self.value = if v.is_nan() { f64::INFINITY } else { v };
            self.at = at();
        }
    }

    fn into_invariant(self, name: &str, limit: f64) -> Invariant {
        let note = if self.at.is_empty() {
            String::new()
        } else {
            format!("worst at {}", self.at)
        };
        Invariant::new(name, self.value, limit).note(note)
    }
}

/// Independent stream per trial, so results do not depend on trial order.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn normal_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_slice(
        &(0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                scale * z
            })
            .collect::<Vec<f64>>(),
    )
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Catalog samples and their conjugates in dimension `n`.
fn functionals(n: usize) -> Vec<(String, ProxFunctional)> {
    sample_catalog(n)
        .into_iter()
        .flat_map(|(name, f)| {
            let conj = f.conjugate();
            [(name.clone(), f), (format!("{name}*"), conj)]
        })
        .collect()
}

fn lib(e: Error) -> Failure {
    Failure::Runtime(e.into())
}

fn moreau(seed: u64, trials: usize) -> CmdResult<Vec<Invariant>> {
    let (mut unit, mut scaled, mut conj) = (Worst::default(), Worst::default(), Worst::default());
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let n = 1 + trial % MAX_SAMPLE_DIM;
        for (name, f) in functionals(n) {
            let fc = f.conjugate();
            let x = normal_vector(&mut rng, n, 2.0);
            let p = f.prox(1.0, &x).map_err(lib)?;
            let q = fc.prox(1.0, &x).map_err(lib)?;
            unit.update((&(&x - &p) - &q).norm_inf(), || format!("{name}, trial {trial}"));

            let g = log_uniform(&mut rng, 1e-2, 1e2);
            let p = f.prox(g, &x).map_err(lib)?;
            let q = fc.prox(1.0 / g, &x.scale(1.0 / g)).map_err(lib)?;
            let err = (&(&x - &p) - &q.scale(g)).norm_inf() / x.norm_inf().max(1.0);
            scaled.update(err, || format!("{name}, gamma {g:.3e}, trial {trial}"));

            let direct = fc.prox(g, &x).map_err(lib)?;
            let via_identity = f.prox_conjugate(g, &x).map_err(lib)?;
            let err = direct.distance(&via_identity) / (x.norm().max(1.0) * g.max(1.0));
            conj.update(err, || format!("{name}, gamma {g:.3e}, trial {trial}"));
        }
    }
    Ok(vec![
        unit.into_invariant("x = prox_F(x) + prox_F*(x), max abs error", MOREAU_TOL),
        scaled.into_invariant("x = prox_gF(x) + g prox_F*/g(x/g), rel error", SCALED_MOREAU_TOL),
        conj.into_invariant("prox of F* via identity vs conjugate entry", SCALED_MOREAU_TOL),
    ])
}

fn envelope(seed: u64, trials: usize) -> CmdResult<Vec<Invariant>> {
    let (mut grad, mut above, mut below) = (Worst::default(), Worst::default(), Worst::default());
    let h = ENVELOPE_FD_STEP;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let n = 1 + trial % MAX_SAMPLE_DIM;
        for (name, f) in functionals(n) {
            for gamma in [0.1, 1.0, 10.0] {
                let x = normal_vector(&mut rng, n, 2.0);
                let y = f.yosida(gamma, &x).map_err(lib)?;
                let mut fd = Vec::with_capacity(n);
                for i in 0..n {
                    let mut xp = x.clone().into_vec();
                    let mut xm = xp.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let ep = f.moreau_envelope(gamma, &Vector::from_slice(&xp)).map_err(lib)?;
                    let em = f.moreau_envelope(gamma, &Vector::from_slice(&xm)).map_err(lib)?;
                    fd.push((ep - em) / (2.0 * h));
                }
                let err = (&Vector::from_slice(&fd) - &y).norm_inf() / y.norm_inf().max(1.0);
                grad.update(err, || format!("{name}, gamma {gamma}, trial {trial}"));

                let env = f.moreau_envelope(gamma, &x).map_err(lib)?;
                let fx = f.value(&x).map_err(lib)?;
                if fx.is_finite() {
                    above.update((env - fx) / fx.abs().max(1.0), || {
                        format!("{name}, gamma {gamma}, trial {trial}")
                    });
                }
                let at_prox = f.value(&f.prox(gamma, &x).map_err(lib)?).map_err(lib)?;
                below.update((at_prox - env) / at_prox.abs().max(1.0), || {
                    format!("{name}, gamma {gamma}, trial {trial}")
                });
            }
        }
    }
    Ok(vec![
        grad.into_invariant("yosida vs central differences of envelope", ENVELOPE_REL_TOL),
        above.into_invariant("envelope <= F", ENVELOPE_ORDER_TOL),
        below.into_invariant("envelope >= F(prox)", ENVELOPE_ORDER_TOL),
    ])
}

fn nonexpansive(seed: u64, trials: usize) -> CmdResult<Vec<Invariant>> {
    let mut worst = Worst::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let n = 1 + trial % MAX_SAMPLE_DIM;
        for (name, f) in functionals(n) {
            let g = log_uniform(&mut rng, 1e-2, 1e2);
            let x = normal_vector(&mut rng, n, 3.0);
            let z = normal_vector(&mut rng, n, 3.0);
            let d = &f.prox(g, &x).map_err(lib)? - &f.prox(g, &z).map_err(lib)?;
            let diff = &x - &z;
            let violation = (d.norm_sq() - d.dot(&diff)) / diff.norm_sq().max(1.0);
            worst.update(violation, || format!("{name}, gamma {g:.3e}, trial {trial}"));
        }
    }
    Ok(vec![worst.into_invariant("|Px - Pz|^2 <= <Px - Pz, x - z>", FIRM_TOL)])
}

fn identification(seed: u64, trials: usize) -> CmdResult<Vec<Invariant>> {
    let mut worst = Worst::default();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let n = 1 + trial % MAX_SAMPLE_DIM;
        let catalog = functionals(n);
        let (i, j) = (rng.random_range(0..catalog.len()), rng.random_range(0..catalog.len()));
        let gamma = log_uniform(&mut rng, 0.1, 10.0);
        let z0 = normal_vector(&mut rng, n, 2.0);
        let dev = dr_as_pdhg_check(&catalog[i].1, &catalog[j].1, &z0, gamma, IDENTIFICATION_ITERS).map_err(lib)?;
        worst.update(dev, || {
            format!("F = {}, G = {}, trial {trial}", catalog[i].0, catalog[j].0)
        });
    }
    Ok(vec![worst.into_invariant(
        "max_k |z_DR - (x_PD - gamma y_PD)|",
        IDENTIFICATION_TOL,
    )])
}

fn exact_iterations(n: usize) -> SolverConfig {
    // tol > 0 is required; the smallest positive value never triggers
    SolverConfig::new(n, f64::MIN_POSITIVE)
}

/// A minimizer accurate to roundoff where the problem allows it, and a
/// description of where it came from.
fn reference_solution(spec: &ProblemSpec) -> CmdResult<(Vector, String)> {
    let n = spec.dim();
    let x0 = Vector::zeros(n);
    let accept = |x: &Vector| {
        kkt_residual(spec, x, None)
            .map(|r| r <= REFERENCE_KKT_TOL)
            .unwrap_or(false)
    };
    match spec {
        ProblemSpec::Lasso { .. } => {
            if let Ok((x, trace, start)) = newton_with_fallback(spec, &SolverConfig::new(100, 1e-13)) {
                if let Ok(Some(polished)) = lasso_pattern_solution(spec, &lasso_signs(&x)) {
                    if trace.is_converged() && accept(&polished) {
                        return Ok((
                            polished,
                            format!("semismooth Newton from {start}, sign pattern re-solved"),
                        ));
                    }
                }
            }
        }
        ProblemSpec::BoxQp { .. } | ProblemSpec::Control { .. } if n <= ORACLE_MAX_DIM => {
            let oracle = oracle_boxqp(spec, ORACLE_MAX_DIM).map_err(lib)?;
            return Ok((
                oracle.x_opt,
                format!("{} bound patterns enumerated", oracle.patterns_checked),
            ));
        }
        ProblemSpec::HuberDenoise { .. } => {
            let f = spec.smooth_part().map_err(lib)?;
            let (x, trace) = ssn_solve(
                |x| f.gradient(x),
                |x| f.hessian(x)?.ok_or(Error::MissingTerm("Hessian of F")),
                &x0,
                &SolverConfig::new(100, 1e-14),
            )
            .map_err(lib)?;
            if trace.is_converged() {
                return Ok((x, "Newton on the gradient".into()));
            }
        }
        _ => {}
    }
    let p = spec.composite().map_err(lib)?;
    let (x, _) = fista(&p, &x0, &SolverConfig::new(REFERENCE_ITERS, 1e-15)).map_err(lib)?;
    Ok((x, format!("FISTA, up to {REFERENCE_ITERS} iterations")))
}

fn lasso_signs(x: &Vector) -> Vec<i8> {
    x.iter()
        .map(|&v| {
            if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                0
            }
        })
        .collect()
}

fn pg_run(spec: &ProblemSpec, iters: usize, keep: bool) -> CmdResult<(f64, IterTrace)> {
    let p = spec.composite().map_err(lib)?;
    let l = p
        .smooth
        .as_ref()
        .and_then(|f| f.lipschitz())
        .ok_or_else(|| Failure::config(Error::MissingTerm("Lipschitz constant of F")))?;
    let gamma = 1.0 / l;
    let mut cfg = exact_iterations(iters).with_step(gamma);
    cfg.keep_iterates = keep;
    let (_, trace) = prox_gradient(&p, &Vector::zeros(spec.dim()), &cfg).map_err(lib)?;
    Ok((gamma, trace))
}

fn rate(spec: &ProblemSpec, iters: usize) -> CmdResult<Vec<Invariant>> {
    let (x_star, source) = reference_solution(spec)?;
    let (gamma, trace) = pg_run(spec, iters, false)?;
    let objectives = trace.objectives();
    // the true optimum is no larger than anything observed
    let j_star = objectives
        .iter()
        .copied()
        .fold(spec.objective(&x_star).map_err(lib)?, f64::min);
    let d0 = x_star.norm_sq();
    let mut worst = Worst::default();
    for (k, &j) in objectives.iter().enumerate().skip(1) {
        let excess = (j - j_star - RATE_SLACK).max(0.0);
        let ratio = if excess == 0.0 {
            0.0
        } else {
            k as f64 * excess * 2.0 * gamma / d0
        };
        worst.update(ratio, || format!("k = {k}"));
    }
    let mut descent = Worst::default();
    for (k, w) in objectives.windows(2).enumerate() {
        descent.update((w[1] - w[0]) / w[0].abs().max(1.0), || format!("k = {}", k + 1));
    }
    Ok(vec![
        worst
            .into_invariant("max_k k(J(x^k) - J*) 2 gamma / |x0 - x*|^2", 1.0)
            .note(format!("{iters} steps of 1/L, J* = {j_star:.12e} from {source}")),
        descent.into_invariant("J(x^k+1) <= J(x^k), rel", RATE_SLACK),
    ])
}

/// Semismooth Newton on a lasso or control problem, started at the origin.
/// The convergence theory is local, so if the cold start breaks down or
/// stalls the run is repeated from a FISTA point with residual at most
/// [`WARM_START_TOL`]. Returns which start was used.
fn newton_with_fallback(spec: &ProblemSpec, cfg: &SolverConfig) -> CmdResult<(Vector, IterTrace, String)> {
    let newton = |x0: &Vector| -> proxkit::Result<(Vector, IterTrace)> {
        match spec {
            ProblemSpec::Lasso { alpha, .. } => {
                let gamma = default_ssn_gamma(spec).map_err(|_| Error::MissingTerm("Lipschitz constant of F"))?;
                l1_ssn(&spec.smooth_part()?, *alpha, gamma, x0, cfg)
            }
            ProblemSpec::Control {
                s,
                z,
                alpha,
                lower,
                upper,
                ..
            } => control_ssn(&LinearOperator::new(s.clone()), z, *alpha, (*lower, *upper), x0, cfg),
            _ => Err(Error::InvalidParameter {
                name: "problem",
                reason: format!("needs a lasso or control problem, got {}", spec.kind_name()),
            }),
        }
    };
    let cold = match newton(&Vector::zeros(spec.dim())) {
        Ok((x, trace)) if trace.is_converged() => return Ok((x, trace, "the origin".into())),
        Ok((_, trace)) => format!("{:?}", trace.status).to_lowercase(),
        Err(e @ Error::InvalidParameter { .. }) => return Err(Failure::config(e)),
        Err(e) => e.to_string(),
    };
    let p = spec.composite().map_err(lib)?;
    let (x0, first_order) = fista(
        &p,
        &Vector::zeros(spec.dim()),
        &SolverConfig::new(REFERENCE_ITERS, WARM_START_TOL),
    )
    .map_err(lib)?;
    let (x, trace) = newton(&x0).map_err(lib)?;
    let start = format!(
        "a FISTA point after {} iterations (cold start failed: {cold})",
        first_order.iterations()
    );
    Ok((x, trace, start))
}

fn superlinear(spec: &ProblemSpec, common: &Common) -> CmdResult<Vec<Invariant>> {
    let cfg = SolverConfig::new(common.max_iter.unwrap_or(50), common.tol.unwrap_or(1e-12));
    let (x, trace, start) = newton_with_fallback(spec, &cfg)?;
    let x_ref = match spec {
        ProblemSpec::Lasso { .. } => lasso_pattern_solution(spec, &lasso_signs(&x)).map_err(lib)?,
        ProblemSpec::Control { lower, upper, .. } => {
            let pattern: Vec<i8> = x
                .iter()
                .map(|&u| {
                    if u == *lower {
                        -1
                    } else if u == *upper {
                        1
                    } else {
                        0
                    }
                })
                .collect();
            boxqp_pattern_solution(spec, &pattern).map_err(lib)?
        }
        _ => unreachable!("newton_with_fallback accepts lasso and control only"),
    };
    let Some(x_ref) = x_ref else {
        return Ok(vec![Invariant::new("final active set verifies", 1.0, 0.0)
            .note("the sign/bound pattern of the last iterate is not optimal")]);
    };
    let final_ratio = match superlinear_diagnostic(&trace, &x_ref) {
        Ok(r) => Invariant::new(
            "last usable error ratio e_k+1/e_k",
            r.last().copied().unwrap_or(0.0),
            SUPERLINEAR_RATIO,
        )
        .note(format!(
            "ratios {}",
            r.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(" ")
        )),
        Err(e) => {
            Invariant::new("last usable error ratio e_k+1/e_k", f64::INFINITY, SUPERLINEAR_RATIO).note(e.to_string())
        }
    };
    Ok(vec![
        Invariant::new("converged", if trace.is_converged() { 0.0 } else { 1.0 }, 0.0).note(format!(
            "{:?} from {start}, final residual {:.3e}",
            trace.status,
            trace.final_residual()
        )),
        Invariant::new("Newton iterations", trace.iterations() as f64, SSN_MAX_ITER as f64),
        final_ratio,
        Invariant::new("distance to re-solved pattern", x.distance(&x_ref), 1e-8),
    ])
}

fn fejer(spec: &ProblemSpec, iters: usize) -> CmdResult<Vec<Invariant>> {
    let (x_star, source) = reference_solution(spec)?;
    let (_, trace) = pg_run(spec, iters, true)?;
    let d = trace.distances_to(&x_star);
    let d0 = d.first().copied().unwrap_or(0.0);
    let mut worst = Worst::default();
    for (k, w) in d.windows(2).enumerate() {
        worst.update((w[1] - w[0]) / d0.max(1.0), || format!("k = {}", k + 1));
    }
    Ok(vec![worst
        .into_invariant("|x^k+1 - x*| <= |x^k - x*|, rel to max(1, d0)", FEJER_SLACK)
        .note(format!("{iters} steps of 1/L, x* from {source}"))])
}

fn render(suite: Suite, invariants: &[Invariant], header: &str) -> String {
    let mut out = format!("suite {suite:?}: {header}\n").to_lowercase();
    let width = invariants.iter().map(|i| i.name.len()).max().unwrap_or(0);
    for inv in invariants {
        let _ = write!(
            out,
            "{}  {:width$}  worst {:.3e}  limit {:.1e}  slack {:+.3e}",
            if inv.pass() { "PASS" } else { "FAIL" },
            inv.name,
            inv.worst,
            inv.limit,
            inv.limit - inv.worst,
        );
        if !inv.note.is_empty() {
            let _ = write!(out, "  ({})", inv.note);
        }
        out.push('\n');
    }
    out
}

pub fn cmd_check(common: &Common, args: &CheckArgs) -> CmdResult {
    if args.suite.needs_problem() != args.problem.is_some() {
        return Err(Failure::usage(if args.problem.is_some() {
            format!("suite {:?} does not take --problem", args.suite).to_lowercase()
        } else {
            format!("suite {:?} needs --problem", args.suite).to_lowercase()
        }));
    }
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let seed = common.seed;
    let iters = common.max_iter.unwrap_or(RATE_ITERS);
    let spec = args.problem.as_deref().map(load_problem).transpose()?;
    let (invariants, header) = match (args.suite, &spec) {
        (Suite::Moreau, _) => (
            moreau(seed, args.trials)?,
            format!("{} trials, seed {seed}", args.trials),
        ),
        (Suite::Envelope, _) => (
            envelope(seed, args.trials)?,
            format!("{} trials, seed {seed}", args.trials),
        ),
        (Suite::Nonexpansive, _) => (
            nonexpansive(seed, args.trials)?,
            format!("{} trials, seed {seed}", args.trials),
        ),
        (Suite::Identification, _) => (
            identification(seed, args.trials)?,
            format!("{} trials, seed {seed}", args.trials),
        ),
        (Suite::Rate, Some(spec)) => (rate(spec, iters)?, describe(spec)),
        (Suite::Superlinear, Some(spec)) => (superlinear(spec, common)?, describe(spec)),
        (Suite::Fejer, Some(spec)) => (fejer(spec, iters)?, describe(spec)),
        (_, None) => unreachable!("checked above"),
    };
    let report = render(args.suite, &invariants, &header);
    print!("{report}");
    if let Some(out) = &args.out {
        write_file(out, &report)?;
    }
    let failed: Vec<&str> = invariants
        .iter()
        .filter(|i| !i.pass())
        .map(|i| i.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} invariant(s) failed: {}",
            failed.len(),
            failed.join("; ")
        )))
    }
}

fn describe(spec: &ProblemSpec) -> String {
    let (m, n) = spec.dims();
    format!("{} problem, n = {n}, m = {m}", spec.kind_name())
}
