use std::path::{Path, PathBuf};
use std::time::Instant;

use jsrkit_core::bounds::{fit_rate, pruned_bounds, sandwich};
use jsrkit_core::cocycle::{
    cone_containment_check, cone_propagation_check, detect_p, fit_cone_constants, splitting_along_orbit,
    splitting_residuals, CauchyFit, ConeParams, PeriodicWord,
};
use jsrkit_core::symbolic::{epsilon_of_n, golden_convergents, is_balanced, periodic_approximant, OrbitClosure};
use jsrkit_core::{Budget, MatrixSet, NormSpec};
use serde_json::{json, Value};

use crate::io::{load_matrix_set, load_orbit_closure, write_atomic};
use crate::report::{bounds_csv, gap_svg, jnum, num, rate_json, table};
use crate::{CliError, Command, NormKind, RunConfig};

/// Fraction of rows used when fitting a convergence rate.
const TAIL_FRACTION: f64 = 0.5;
/// Cone aperture for the propagation check.
const CONE_THETA: f64 = 0.5;
/// Aperture for the containment check; must stay below 1/5.
const CONTAINMENT_THETA: f64 = 0.15;
const CONTAINMENT_SAMPLES: usize = 1000;
/// Inflation of the fitted cone constants.
const CONE_INFLATION: f64 = 1.1;

/// Products of a finished pipeline, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub csv: String,
    pub result: Value,
    pub svg: Option<String>,
    /// Set when the run finished but could not close its target.
    pub inconclusive: Option<String>,
}

fn config_echo(c: &RunConfig) -> Value {
    json!({
        "command": c.command.name(),
        "input": c.input.as_ref().map(|p| p.display().to_string()),
        "out": c.out.display().to_string(),
        "max_depth": c.max_depth,
        "norm": c.norm.name(),
        "adapted_depth": c.adapted_depth,
        "rho_hat": c.rho_hat,
        "delta": c.delta,
        "gamma": c.gamma.as_ref().map(|g| g.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
        "seed": c.seed,
        "workers": c.workers,
        "word": c.word.as_ref().map(|w| w.to_string()),
        "svg": c.svg.as_ref().map(|p| p.display().to_string()),
        "budget": c.budget,
    })
}

fn input(c: &RunConfig) -> Result<&Path, CliError> {
    c.input
        .as_deref()
        .ok_or_else(|| CliError::Config(format!("{} needs --input", c.command)))
}

fn norm_spec(set: &MatrixSet, c: &RunConfig, rho_hat: Option<f64>) -> Result<NormSpec, CliError> {
    match c.norm {
        NormKind::Euclidean => Ok(NormSpec::Euclidean),
        NormKind::Adapted => {
            let r = rho_hat.ok_or_else(|| CliError::Config("the adapted norm needs --rho-hat".into()))?;
            Ok(NormSpec::adapted(set, r, c.adapted_depth, Budget::new(c.budget))?)
        }
    }
}

fn bounds(c: &RunConfig, fit: bool) -> Result<Outcome, CliError> {
    let set = load_matrix_set(input(c)?)?;
    let norm = norm_spec(&set, c, c.rho_hat)?;
    let mut report = sandwich(&set, c.max_depth, &norm, Budget::new(c.budget))?;
    if fit && report.rows.len() >= 6 {
        report.fitted_rate = Some(fit_rate(&report, TAIL_FRACTION)?);
    }
    let gaps: Vec<(usize, f64)> = report.rows.iter().map(|r| (r.n, r.gap)).collect();
    let last = report.rows.last();
    let inconclusive = report.truncated.then(|| {
        format!(
            "budget of {} multiplications reached after depth {}",
            c.budget,
            report.rows.len()
        )
    });
    Ok(Outcome {
        csv: bounds_csv(&report),
        result: json!({
            "norm": report.norm_used.to_string(),
            "depth_reached": report.rows.len(),
            "truncated": report.truncated,
            "multiplications": report.multiplications,
            "best_lower": last.map(|r| jnum(r.best_lower)),
            "best_upper": last.map(|r| jnum(r.best_upper)),
            "fitted_rate": rate_json(report.fitted_rate.as_ref()),
        }),
        svg: c.svg.as_ref().map(|_| gap_svg(&gaps)),
        inconclusive,
    })
}

fn pruned(c: &RunConfig) -> Result<Outcome, CliError> {
    let set = load_matrix_set(input(c)?)?;
    let b = pruned_bounds(&set, c.delta, c.max_depth, Budget::new(c.budget))?;
    let csv = table(
        &[
            "lower",
            "upper",
            "conclusive",
            "lower_word",
            "depth_reached",
            "nodes_expanded",
            "multiplications",
        ],
        &[vec![
            num(b.lower),
            num(b.upper),
            b.conclusive.to_string(),
            b.lower_word.to_string(),
            b.depth_reached.to_string(),
            b.nodes_expanded.to_string(),
            b.multiplications.to_string(),
        ]],
    );
    let inconclusive = (!b.conclusive).then(|| {
        format!(
            "interval [{}, {}] wider than delta {} after depth {}",
            num(b.lower),
            num(b.upper),
            c.delta,
            b.depth_reached
        )
    });
    Ok(Outcome {
        csv,
        result: json!({
            "lower": b.lower,
            "upper": jnum(b.upper),
            "conclusive": b.conclusive,
            "lower_word": b.lower_word.to_string(),
            "depth_reached": b.depth_reached,
            "nodes_expanded": b.nodes_expanded,
            "multiplications": b.multiplications,
        }),
        svg: None,
        inconclusive,
    })
}

fn splitting(c: &RunConfig) -> Result<Outcome, CliError> {
    let raw = load_matrix_set(input(c)?)?;
    let set = match c.rho_hat {
        Some(r) => raw.scaled(1.0 / r),
        None => raw,
    };
    let word = c
        .word
        .as_ref()
        .ok_or_else(|| CliError::Config("splitting needs --word".into()))?;
    let x = PeriodicWord::from_word(word)?;
    x.check(&set)?;
    let r = x.period();
    let n = c.max_depth.max(2);
    let detected = detect_p(&set, &x, (4 * r).max(2 * n))?;
    let splits = splitting_along_orbit(&set, &x, detected.p, n)?;
    let diag = splitting_residuals(&set, &x, &splits[0], n)?;
    // The set is already normalized, so an adapted norm uses ρ̂ = 1.
    let norm = norm_spec(&set, c, Some(1.0))?;
    let block = r * 8usize.div_ceil(r);
    // The cone inequalities are checked to 1e-9, well below the horizon-n
    // splitting error, so the cones use a longer horizon.
    let converged = splitting_along_orbit(&set, &x, detected.p, 4 * n)?;
    let constants = fit_cone_constants(&set, &x, &converged, &norm, n)?.inflated(CONE_INFLATION);
    let params = ConeParams::from_splittings(CONE_THETA, &converged, norm.clone())?;
    let propagation = cone_propagation_check(&set, &x, &params, &constants, block, 2)?;
    let longer = splitting_along_orbit(&set, &x, detected.p, 2 * n)?;
    let containment = cone_containment_check(
        &norm,
        &splits[0].projection,
        &longer[0].projection,
        CONTAINMENT_THETA,
        CONTAINMENT_SAMPLES,
        c.seed,
    )?;

    let rows: Vec<Vec<String>> = splits
        .iter()
        .enumerate()
        .map(|(k, s)| {
            vec![
                k.to_string(),
                s.p.to_string(),
                s.horizon.to_string(),
                num(s.angle_sine),
                num(diag.invariance_residuals.get(k).copied().unwrap_or(f64::NAN)),
                num(jsrkit_core::linalg::spectral_norm(&s.projection.p)),
            ]
        })
        .collect();
    let csv = table(
        &["phase", "p", "horizon", "angle_sine", "invariance_residual", "projection_norm"],
        &rows,
    );
    let cauchy = match &diag.cauchy_fit {
        CauchyFit::Exact => json!({ "kind": "exact" }),
        CauchyFit::Geometric { xi, c, r_squared } => {
            json!({ "kind": "geometric", "xi": xi, "c": c, "r_squared": r_squared })
        }
    };
    let inconclusive = if !propagation.passed {
        Some("cone propagation check failed".to_string())
    } else if containment.applicable && containment.violations > 0 {
        Some(format!("{} cone containment violations", containment.violations))
    } else {
        None
    };
    Ok(Outcome {
        csv,
        result: json!({
            "p": detected.p,
            "exponent_slopes": detected.theta.iter().map(|&t| jnum(t)).collect::<Vec<_>>(),
            "invariance_residual": diag.invariance_residual,
            "invariance_residual_fixed": diag.invariance_residual_fixed,
            "commutation_residual": diag.commutation_residual,
            "commutation_residual_fixed": diag.commutation_residual_fixed,
            "delta_hat": diag.delta_hat,
            "xi_hat": diag.xi_hat,
            "c_hat": diag.c_hat,
            "min_angle_sine": diag.min_angle_sine,
            "cauchy": diag.cauchy.iter().map(|&(m, d)| json!([m, d])).collect::<Vec<_>>(),
            "cauchy_fit": cauchy,
            "cone": {
                "norm": norm.to_string(),
                "xi": constants.xi,
                "c": constants.c,
                "m_hat": constants.m_hat,
                "k1": constants.k1,
                "block": block,
                "propagation_passed": propagation.passed,
                "worst_aperture_slack": jnum(propagation.worst_aperture_slack),
                "worst_norm_slack": jnum(propagation.worst_norm_slack),
                "containment_applicable": containment.applicable,
                "containment_checked": containment.checked,
                "containment_violations": containment.violations,
                "projection_distance": containment.projection_distance,
            },
        }),
        svg: None,
        inconclusive,
    })
}

fn orbit_closure(c: &RunConfig) -> Result<OrbitClosure, CliError> {
    match (&c.gamma, &c.input) {
        (Some(g), _) => Ok(OrbitClosure::sturmian(g.clone()).map_err(|e| CliError::Config(e.to_string()))?),
        (None, Some(p)) => load_orbit_closure(p),
        (None, None) => Err(CliError::Config(format!("{} needs --input or --gamma", c.command))),
    }
}

fn sturmian(c: &RunConfig) -> Result<Outcome, CliError> {
    let convergents = match orbit_closure(c)? {
        OrbitClosure::Sturmian { convergents } => convergents,
        OrbitClosure::Periodic { .. } => {
            return Err(CliError::Schema("sturmian needs a sturmian orbit closure".into()))
        }
    };
    let mut rows = Vec::new();
    // --max-depth caps how many convergents are listed.
    for (k, g) in convergents.iter().enumerate().take(c.max_depth) {
        let w = periodic_approximant(&convergents, k)?;
        let bytes: Vec<u8> = w.cycle().iter().map(|&s| s as u8).collect();
        let doubled: Vec<u8> = bytes.iter().chain(&bytes).copied().collect();
        rows.push(vec![
            k.to_string(),
            g.p.to_string(),
            g.q.to_string(),
            is_balanced(&doubled, bytes.len()).to_string(),
            bytes.iter().map(|s| s.to_string()).collect::<String>(),
        ]);
    }
    Ok(Outcome {
        csv: table(&["k", "p", "q", "balanced", "cycle"], &rows),
        result: json!({ "approximants": rows.len() }),
        svg: None,
        inconclusive: None,
    })
}

fn epsilon(c: &RunConfig) -> Result<Outcome, CliError> {
    let z = orbit_closure(c)?;
    let mut rows = Vec::new();
    let mut all_exact = true;
    let mut checked = 0u64;
    for n in 1..=c.max_depth {
        let e = epsilon_of_n(&z, n, c.budget)?;
        all_exact &= e.exact;
        checked += e.candidates_checked;
        rows.push(vec![
            n.to_string(),
            num(e.value),
            e.exact.to_string(),
            e.orbit.period().to_string(),
            e.orbit.cycle().iter().map(|s| s.to_string()).collect::<Vec<_>>().join("-"),
        ]);
    }
    let budget_hit = matches!(z, OrbitClosure::Periodic { .. }) && !all_exact;
    Ok(Outcome {
        csv: table(&["n", "epsilon", "exact", "period", "orbit"], &rows),
        result: json!({
            "kind": match z { OrbitClosure::Periodic { .. } => "periodic", OrbitClosure::Sturmian { .. } => "sturmian" },
            "candidates_checked": checked,
            "all_exact": all_exact,
        }),
        svg: None,
        inconclusive: budget_hit.then(|| "search budget exhausted; values are upper bounds".to_string()),
    })
}

fn dispatch(c: &RunConfig) -> Result<Outcome, CliError> {
    match c.command {
        Command::Bounds => bounds(c, false),
        Command::Convergence => bounds(c, true),
        Command::Pruned => pruned(c),
        Command::Splitting => splitting(c),
        Command::Sturmian => sturmian(c),
        Command::Epsilon => epsilon(c),
    }
}

/// Runs the pipeline on a pool of `workers` threads (all cores when unset).
pub fn run(c: &RunConfig) -> Result<Outcome, CliError> {
    c.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = c.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(c))
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Runs, writes the report files, and returns the exit code. Failures print
/// one `jsrkit: <kind>: <reason>` line to stderr.
pub fn execute(c: &RunConfig) -> i32 {
    let start = Instant::now();
    let result = run(c).and_then(|o| {
        let meta = json!({
            "tool": "jsrkit",
            "version": env!("CARGO_PKG_VERSION"),
            "config": config_echo(c),
            "result": o.result,
            "inconclusive": o.inconclusive,
            "wall_time_s": start.elapsed().as_secs_f64(),
        });
        write_atomic(&c.out, |w| w.write_all(o.csv.as_bytes()))?;
        write_atomic(&meta_path(&c.out), |w| {
            let mut text = serde_json::to_string_pretty(&meta).map_err(std::io::Error::other)?;
            text.push('\n');
            w.write_all(text.as_bytes())
        })?;
        if let (Some(path), Some(svg)) = (&c.svg, &o.svg) {
            write_atomic(path, |w| w.write_all(svg.as_bytes()))?;
        }
        Ok(o.inconclusive)
    });
    match result {
        Ok(None) => 0,
        Ok(Some(reason)) => {
            eprintln!("jsrkit: inconclusive: {}", one_line(&reason));
            3
        }
        Err(e) => {
            eprintln!("jsrkit: {}: {}", e.kind(), one_line(&e.to_string()));
            e.exit_code()
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Convergents used when `--gamma golden` is given.
pub fn golden(count: usize) -> Vec<jsrkit_core::symbolic::Rational> {
    golden_convergents(count)
}
