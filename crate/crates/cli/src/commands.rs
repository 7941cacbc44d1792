use std::collections::BTreeMap;

use hypodecay::appendix::{
    sum_of_squares_residual, u_binomial, u_factored, verify_family_order, SeriesMode, SeriesOperand, TauFamily,
};
use hypodecay::builtin;
use hypodecay::index::IndexVariant;
use hypodecay::linalg::{spectral_norm, ComplexMatrix, C64};
use hypodecay::propagator::{decay_curve, fingerprint, waiting_time, TimeGrid, WaitingTime};
use hypodecay::sampling::{near_degenerate, random_matrix, random_semi_dissipative, rng};
use hypodecay::short_time::{
    empirical_fit, epsilon_sweep, theoretical_coefficient, EpsilonSweep, FitWindow, ShortTimeResult, SweepConfig,
};
use hypodecay::{compute_index, HcIndex, SemiDissipativeSystem};
use rand::Rng;
use serde::Serialize;

use crate::json::to_json;
use crate::{CliError, Grid, MatrixInput, OutputFormat, RunConfig};

/// Bisection accuracy for waiting times.
const TOL_T: f64 = 1e-6;

/// What a command produced: the document, diagnostic lines for stderr and the
/// exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub notes: Vec<String>,
    pub exit: u8,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, notes: Vec::new(), exit: 0 }
    }
}

fn pairs(z: &[C64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn system(input: &MatrixInput, eps: Option<f64>, config: &RunConfig) -> Result<SemiDissipativeSystem, CliError> {
    let sys = SemiDissipativeSystem::new(input.generator(eps)?)?;
    sys.validate(config.tol_psd)?;
    Ok(sys)
}

#[derive(Serialize)]
struct SplitDoc {
    #[serde(rename = "A")]
    a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "C")]
    c: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    source: &'a str,
    eps: Option<f64>,
    n: usize,
    matrix: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<SplitDoc>,
    fingerprint: String,
    semi_dissipative: bool,
    psd_margin: f64,
    m_hc: HcIndex,
    per_variant: &'a BTreeMap<IndexVariant, HcIndex>,
    kappa: f64,
    rank_trace: &'a [usize],
    low_confidence: bool,
    a: Option<u32>,
    c_theory: Option<f64>,
    degenerate: Option<bool>,
    spectrum: Vec<[f64; 2]>,
    min_real_part: f64,
    #[serde(rename = "lambda_min_BH")]
    lambda_min_bh: f64,
    #[serde(rename = "lambda_max_BH")]
    lambda_max_bh: f64,
}

/// Index, coefficient and spectrum of one system.
pub fn analyze(input: &MatrixInput, eps: Option<f64>, config: &RunConfig) -> Result<Outcome, CliError> {
    let sys = system(input, eps, config)?;
    let tols = config.tolerances();
    let report = compute_index(&sys, &tols, None)?;
    let coef = match report.m_hc {
        HcIndex::Finite(_) => Some(theoretical_coefficient(&sys, &report, &tols)?),
        HcIndex::Infinite => None,
    };
    // The exported split is scaled so that matrix = A + C still holds.
    let split = input.split.as_ref().map(|(a, c)| SplitDoc { a: rows(&a.scale_real(eps.unwrap_or(1.0))), c: rows(c) });
    let eig = sys.hermitian_eigen();
    let doc = AnalyzeReport {
        source: &input.name,
        eps,
        n: sys.dim(),
        matrix: rows(sys.matrix()),
        split,
        fingerprint: fingerprint(sys.matrix()),
        semi_dissipative: true,
        psd_margin: sys.psd_margin(),
        m_hc: report.m_hc,
        per_variant: &report.per_variant,
        kappa: report.kappa,
        rank_trace: &report.rank_trace,
        low_confidence: report.low_confidence,
        a: coef.as_ref().map(|c| c.a),
        c_theory: coef.as_ref().map(|c| c.c),
        degenerate: coef.as_ref().map(|c| c.degenerate),
        spectrum: pairs(&report.spectrum),
        min_real_part: report.min_real_part,
        lambda_min_bh: eig.min(),
        lambda_max_bh: eig.max(),
    };
    let mut out = Outcome::ok(match config.output {
        OutputFormat::Json => to_json(&doc),
        OutputFormat::Csv => analyze_csv(&doc),
    });
    if report.low_confidence {
        out.notes.push("warning: a rank or definiteness decision was close to its tolerance".into());
    }
    Ok(out)
}

fn analyze_csv(doc: &AnalyzeReport) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut rows = vec![
        ("n".to_string(), doc.n.to_string()),
        ("m_hc".to_string(), doc.m_hc.to_string()),
        ("a".to_string(), opt(doc.a.map(|a| a.to_string()))),
        ("c_theory".to_string(), opt(doc.c_theory.map(|c| format!("{c:.16e}")))),
        ("kappa".to_string(), format!("{:.16e}", doc.kappa)),
        ("psd_margin".to_string(), format!("{:.16e}", doc.psd_margin)),
        ("min_real_part".to_string(), format!("{:.16e}", doc.min_real_part)),
        ("lambda_min_BH".to_string(), format!("{:.16e}", doc.lambda_min_bh)),
        ("lambda_max_BH".to_string(), format!("{:.16e}", doc.lambda_max_bh)),
        ("low_confidence".to_string(), doc.low_confidence.to_string()),
    ];
    rows.extend(doc.per_variant.iter().map(|(v, m)| (v.label().to_string(), m.to_string())));
    let mut out = String::from("quantity,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

#[derive(Serialize)]
struct DecayReport<'a> {
    source: &'a str,
    eps: Option<f64>,
    fingerprint: &'a str,
    grid: &'static str,
    t: &'a [f64],
    norm: &'a [f64],
    waiting_time: WaitingTime,
    t0: Option<f64>,
    short_time: Option<ShortTimeResult>,
}

/// Propagator norm on a grid, with the waiting time and a short-time fit.
pub fn decay(input: &MatrixInput, eps: Option<f64>, config: &RunConfig) -> Result<Outcome, CliError> {
    let sys = system(input, eps, config)?;
    let (lo, hi) = config.time_range();
    let grid = match config.grid {
        Grid::Linear => TimeGrid::linear(lo, hi, config.points)?,
        Grid::Log => TimeGrid::log(lo, hi, config.points)?,
    };
    let curve = decay_curve(&sys, &grid)?;
    let wait = waiting_time(&sys, TOL_T)?;
    let mut notes = Vec::new();

    let tols = config.tolerances();
    let report = compute_index(&sys, &tols, None)?;
    let short_time = match report.m_hc {
        HcIndex::Finite(_) => {
            let coef = theoretical_coefficient(&sys, &report, &tols)?;
            match empirical_fit(&curve, FitWindow::Auto) {
                Ok(fit) => Some(ShortTimeResult {
                    m_hc: coef.m_hc,
                    a_theory: coef.a,
                    c_theory: coef.c,
                    degenerate: coef.degenerate,
                    a_fit: fit.a_fit,
                    c_fit: fit.c_fit,
                    fit_window: (fit.t_lo, fit.t_hi),
                    fit_residual: fit.residual,
                    window_rule: fit.window_rule,
                }),
                Err(e) => {
                    notes.push(format!("note: no short-time fit on this grid ({e})"));
                    None
                }
            }
        }
        HcIndex::Infinite => None,
    };

    let body = match config.output {
        OutputFormat::Json => to_json(&DecayReport {
            source: &input.name,
            eps,
            fingerprint: &curve.system_fingerprint,
            grid: match config.grid {
                Grid::Linear => "linear",
                Grid::Log => "log",
            },
            t: &curve.grid.points,
            norm: &curve.norms,
            waiting_time: wait,
            t0: wait.value(),
            short_time,
        }),
        OutputFormat::Csv => {
            notes.push(match wait {
                WaitingTime::Reached { t0 } => format!("t0 = {t0:.16e}"),
                WaitingTime::NotReached { hi, .. } => format!("t0 not reached by t = {hi:.6e}"),
            });
            curve.to_csv()
        }
    };
    Ok(Outcome { body, notes, exit: 0 })
}

#[derive(Debug, Clone, Copy, Serialize)]
struct T0Ratio {
    eps_large: f64,
    eps_small: f64,
    ratio: f64,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    source: &'a str,
    #[serde(flatten)]
    sweep: &'a EpsilonSweep,
    t0_ratios: Vec<T0Ratio>,
}

fn t0_ratios(sweep: &EpsilonSweep) -> Vec<T0Ratio> {
    let mut entries: Vec<_> = sweep.entries.iter().collect();
    entries.sort_by(|a, b| b.eps.abs().total_cmp(&a.eps.abs()));
    entries
        .windows(2)
        .filter_map(|w| {
            let (large, small) = (w[0], w[1]);
            Some(T0Ratio { eps_large: large.eps, eps_small: small.eps, ratio: small.t0? / large.t0? })
        })
        .collect()
}

/// Coefficient scaling and waiting times of `eps A + C` over a list of eps.
pub fn sweep(input: &MatrixInput, eps: &[f64], config: &RunConfig) -> Result<Outcome, CliError> {
    let Some((a, c)) = &input.split else {
        return Err(CliError::Usage(format!("sweep needs a split document, {} has none", input.name)));
    };
    if eps.is_empty() {
        return Err(CliError::Usage("sweep needs --eps or --eps-geo".into()));
    }
    let sweep_config = SweepConfig { tols: config.tolerances(), points: config.points, tol_t: TOL_T };
    let result = epsilon_sweep(a, c, eps, &sweep_config)?;
    let ratios = t0_ratios(&result);

    let mut notes = vec![format!("c_tilde = {:.10e}  (m_hc = {}, a = {})", result.c_tilde, result.m_hc, result.a)];
    notes.push(format!("{:>14} {:>14} {:>10}", "eps", "t0", "t0 ratio"));
    for e in &result.entries {
        let t0 = e.t0.map(|t| format!("{t:.6e}")).unwrap_or_else(|| "-".into());
        let ratio = ratios
            .iter()
            .find(|r| r.eps_small == e.eps)
            .map(|r| format!("{:.4}", r.ratio))
            .unwrap_or_default();
        notes.push(format!("{:>14.6e} {:>14} {:>10}", e.eps, t0, ratio));
    }

    let body = match config.output {
        OutputFormat::Json => to_json(&SweepReport { source: &input.name, sweep: &result, t0_ratios: ratios }),
        OutputFormat::Csv => result.to_csv(),
    };
    Ok(Outcome { body, notes, exit: 0 })
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    cases: usize,
    failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self { name, passed: true, cases: 0, failures: Vec::new() }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            self.failures.push(detail());
        }
    }
}

#[derive(Serialize)]
struct SelftestReport {
    seed: u64,
    tol_rank: f64,
    tol_psd: f64,
    passed: bool,
    checks: Vec<Check>,
}

const SERIES_TRIPLES: usize = 25;
const RANDOM_SYSTEMS: usize = 60;

/// Seeded consistency checks; exit status 5 when any fails.
pub fn selftest(config: &RunConfig) -> Result<Outcome, CliError> {
    let tols = config.tolerances();
    let mut r = rng(config.seed);

    let mut series = Check::new("sum_of_squares_series");
    for _ in 0..SERIES_TRIPLES {
        let n = r.gen_range(1..=4);
        let m = r.gen_range(0..=3);
        let op = SeriesOperand {
            u: random_matrix(&mut r, n),
            v: random_matrix(&mut r, n),
            w: random_matrix(&mut r, n),
            truncation_degree: 2 * m + 3 + r.gen_range(0..=3),
            t: r.gen_range(-1.0..=1.0),
        };
        match sum_of_squares_residual(&op, m, SeriesMode::Coefficients) {
            Ok(res) => series.record(res.relative <= 1e-11, || format!("n={n}, m={m}: residual {:.3e}", res.relative)),
            Err(e) => series.record(false, || e.to_string()),
        }
    }

    let mut family = Check::new("trajectory_family_order");
    for (name, b) in [("envelope", builtin::envelope()), ("num1", builtin::num1(1.0)), ("num2", builtin::num2(1.0))] {
        let outcome = (|| {
            let sys = SemiDissipativeSystem::new(b)?;
            let report = compute_index(&sys, &tols, None)?;
            let coef = theoretical_coefficient(&sys, &report, &tols)?;
            let fam = TauFamily::new(&sys, &coef.minimizer, coef.m_hc, tols.psd)?;
            Ok::<_, hypodecay::Error>((verify_family_order(&sys, &fam, tols.psd)?.value, 2.0 * fam.c1_x0))
        })();
        match outcome {
            Ok((got, want)) => family.record((got - want).abs() <= 0.01 * want, || format!("{name}: {got:.6e} vs {want:.6e}")),
            Err(e) => family.record(false, || format!("{name}: {e}")),
        }
    }

    let mut dual = Check::new("dual_u_formulas");
    let mut agreement = Check::new("variant_agreement");
    for _ in 0..RANDOM_SYSTEMS {
        let seed: u64 = r.gen();
        let b = random_semi_dissipative(&mut rng(seed), 8);
        let bound = 2.0 * spectral_norm(&b);
        for j in 0..=8 {
            let scale = bound.powi(j).max(1.0);
            let ub = u_binomial(&b, j as usize);
            let diff = spectral_norm(&(&ub - &u_factored(&b, j as usize)));
            let norm = spectral_norm(&ub);
            dual.record(diff <= 1e-12 * scale && norm <= bound.powi(j) * (1.0 + 1e-12) + 1e-14, || {
                format!("instance {seed}, j={j}: difference {diff:.3e}, |U_j| = {norm:.3e}")
            });
        }
        let outcome = SemiDissipativeSystem::new(b).and_then(|s| compute_index(&s, &tols, None));
        agreement.record(outcome.is_ok(), || format!("instance {seed}: {}", outcome.unwrap_err()));
    }

    let mut degenerate = Check::new("near_degenerate_agreement");
    let outcome = SemiDissipativeSystem::new(near_degenerate()).and_then(|s| compute_index(&s, &tols, None));
    degenerate.record(outcome.is_ok(), || outcome.unwrap_err().to_string());

    let checks = vec![series, family, dual, agreement, degenerate];
    let passed = checks.iter().all(|c| c.passed);
    let notes = checks
        .iter()
        .map(|c| format!("{} {} ({} cases)", if c.passed { "PASS" } else { "FAIL" }, c.name, c.cases))
        .collect();
    let report = SelftestReport { seed: config.seed, tol_rank: config.tol_rank, tol_psd: config.tol_psd, passed, checks };
    Ok(Outcome { body: to_json(&report), notes, exit: if passed { 0 } else { 5 } })
}
