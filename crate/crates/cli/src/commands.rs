use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use meancut::analysis::{
    accumulation_limit, approximant, bounds_scan, corollary2_check, error_fit,
    limit_identity_residual, oracle_p, ApproxKind, Bound, EXACT_ORACLE_MAX_N,
};
use meancut::binet::{binet_mu_gamma, binet_mu_quad, lemma_integrals_check, QuadratureSpec};
use meancut::exact::{exact_p, exact_swap_defect, karamata_check};
use meancut::float_eval::{log_p, rational_to_f64};
use meancut::raab::{RaabEvaluator, SeriesConfig};
use meancut::{ExactRational, ParamPair};

use crate::format::format_f64;
use crate::row::{EvalRow, EVAL_HEADER};
use crate::{CliError, Grid};

/// CSV output of a command together with its human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: Vec<u8>,
    pub summary: Vec<String>,
    pub passed: bool,
}

/// Numerical settings shared by the commands.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub quad: QuadratureSpec,
    pub series: SeriesConfig,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quad: QuadratureSpec::with_tol(1e-10),
            series: SeriesConfig::default(),
        }
    }
}

impl Tolerances {
    pub fn new(quad_tol: f64, series_tol: f64) -> Result<Self, CliError> {
        if !(quad_tol > 0.0 && series_tol > 0.0) {
            return Err(CliError::Usage("tolerances must be > 0".into()));
        }
        Ok(Tolerances {
            quad: QuadratureSpec::with_tol(quad_tol),
            series: SeriesConfig {
                series_tol,
                ..SeriesConfig::default()
            },
        })
    }

    fn evaluator(&self) -> Result<RaabEvaluator, CliError> {
        Ok(RaabEvaluator::new(self.quad, self.series)?)
    }
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
}

fn pairs(ks: &Grid, ls: &Grid) -> Result<Vec<ParamPair>, CliError> {
    let (ks, ls) = (ks.points(), ls.points());
    let mut out = Vec::with_capacity(ks.len() * ls.len());
    for &k in &ks {
        for &l in &ls {
            out.push(ParamPair::new(k, l)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Float,
    Raab,
    Approx1,
    Approx2,
    Approx3,
    All,
}

impl FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "exact" => Method::Exact,
            "float" => Method::Float,
            "raab" => Method::Raab,
            "approx1" => Method::Approx1,
            "approx2" => Method::Approx2,
            "approx3" => Method::Approx3,
            "all" => Method::All,
            _ => return Err(CliError::Usage(format!("unknown method {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct MethodSet {
    exact: bool,
    float: bool,
    raab: bool,
    approx: [bool; 3],
}

impl MethodSet {
    fn from_methods(methods: &[Method]) -> MethodSet {
        let mut s = MethodSet::default();
        for m in methods {
            match m {
                Method::Exact => s.exact = true,
                Method::Float => s.float = true,
                Method::Raab => s.raab = true,
                Method::Approx1 => s.approx[0] = true,
                Method::Approx2 => s.approx[1] = true,
                Method::Approx3 => s.approx[2] = true,
                Method::All => {
                    s = MethodSet {
                        exact: true,
                        float: true,
                        raab: true,
                        approx: [true; 3],
                    }
                }
            }
        }
        s
    }
}

fn eval_row(p: ParamPair, set: MethodSet, ev: Option<&RaabEvaluator>) -> Result<EvalRow, CliError> {
    let exact = set.exact.then(|| exact_p(p));
    let reference = || match &exact {
        Some(e) => rational_to_f64(e),
        None => oracle_p(p),
    };
    let mut row = EvalRow {
        k: p.k(),
        l: p.l(),
        float_p: set.float.then(|| log_p(p)),
        ..EvalRow::default()
    };
    if let Some(ev) = ev {
        let r = ev.raab_p(p)?;
        row.raab_p = Some(r.p);
        row.abs_err_raab = Some((r.p - reference()).abs());
    }
    for (i, kind) in ApproxKind::ALL.into_iter().enumerate() {
        if set.approx[i] {
            let a = approximant(p, kind);
            row.approx[i] = Some(a);
            row.abs_err[i] = Some((a - reference()).abs());
        }
    }
    row.exact = exact;
    Ok(row)
}

/// One row per `(k, l)` in the rectangular grid, in `(k, l)` order.
pub fn cmd_eval(
    ks: &Grid,
    ls: &Grid,
    methods: &[Method],
    tol: Tolerances,
) -> Result<Report, CliError> {
    let set = MethodSet::from_methods(methods);
    let pairs = pairs(ks, ls)?;
    let ev = if set.raab {
        Some(tol.evaluator()?)
    } else {
        None
    };
    let rows: Vec<EvalRow> = pairs
        .par_iter()
        .map(|&p| eval_row(p, set, ev.as_ref()))
        .collect::<Result<_, _>>()?;
    Ok(Report {
        csv: csv_bytes(&EVAL_HEADER, rows.iter().map(EvalRow::record))?,
        summary: vec![format!("evaluated {} pairs", rows.len())],
        passed: true,
    })
}

pub const COMPARE_HEADER: [&str; 8] = [
    "k",
    "l",
    "reference",
    "float_p",
    "raab_p",
    "rel_err_float",
    "abs_err_raab",
    "pass",
];

/// Cross-checks the floating and Raab evaluators against the reference value
/// (exact for `k + l <= 2000`).
pub fn cmd_compare(
    ks: &Grid,
    ls: &Grid,
    float_rtol: f64,
    raab_atol: f64,
    tol: Tolerances,
) -> Result<Report, CliError> {
    let pairs = pairs(ks, ls)?;
    let ev = tol.evaluator()?;
    let rows: Vec<(ParamPair, f64, f64, f64)> = pairs
        .par_iter()
        .map(|&p| {
            let reference = oracle_p(p);
            Ok((p, reference, log_p(p), ev.raab_p(p)?.p))
        })
        .collect::<Result<_, CliError>>()?;
    let mut failures = 0;
    let mut worst = (0.0f64, 0.0f64);
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|&(p, reference, float, raab)| {
            let rel = (float - reference).abs() / reference;
            let abs = (raab - reference).abs();
            // an exact reference makes the float comparison meaningful
            let float_ok = p.n() > EXACT_ORACLE_MAX_N || rel <= float_rtol;
            let pass = float_ok && abs <= raab_atol;
            failures += usize::from(!pass);
            worst = (worst.0.max(rel), worst.1.max(abs));
            vec![
                p.k().to_string(),
                p.l().to_string(),
                format_f64(reference),
                format_f64(float),
                format_f64(raab),
                format_f64(rel),
                format_f64(abs),
                pass.to_string(),
            ]
        })
        .collect();
    Ok(Report {
        csv: csv_bytes(&COMPARE_HEADER, records)?,
        summary: vec![format!(
            "compared {} pairs: {failures} failures, max float rel err {:.3e} (<= {float_rtol:e}), max raab abs err {:.3e} (<= {raab_atol:e})",
            rows.len(),
            worst.0,
            worst.1
        )],
        passed: failures == 0,
    })
}

pub const SCAN_HEADER: [&str; 5] = ["k", "l", "bound", "value", "exact"];

/// Lists every violation of `1/4 <= P <= 1/2` over `[1, kmax] x [1, lmax]`.
pub fn cmd_scan(kmax: u64, lmax: u64) -> Result<Report, CliError> {
    let mut v = bounds_scan(kmax, lmax)?;
    v.sort_by_key(|b| (b.k, b.l));
    let records = v.iter().map(|b| {
        vec![
            b.k.to_string(),
            b.l.to_string(),
            match b.bound {
                Bound::Lower => "lower".to_string(),
                Bound::Upper => "upper".to_string(),
            },
            format_f64(b.value),
            b.exact.to_string(),
        ]
    });
    Ok(Report {
        csv: csv_bytes(&SCAN_HEADER, records)?,
        summary: vec![format!(
            "scanned {} pairs: {} violations",
            kmax * lmax,
            v.len()
        )],
        passed: v.is_empty(),
    })
}

pub const FIT_HEADER: [&str; 7] = [
    "kind",
    "fixed_param",
    "n_points",
    "slope",
    "intercept",
    "r2",
    "pass",
];

/// Log-log fit of the approximant error; `fixed` is ignored for eq3.
pub fn cmd_fit(kind: ApproxKind, fixed: Option<u64>, grid: &Grid) -> Result<Report, CliError> {
    let fixed_value = match (kind, fixed) {
        (ApproxKind::Half, _) => 0,
        (_, Some(f)) => f,
        (ApproxKind::PoissonLower, None) => return Err(CliError::Usage("eq1 needs --k".into())),
        (ApproxKind::PoissonUpper, None) => return Err(CliError::Usage("eq2 needs --l".into())),
    };
    let points = grid.points();
    let fit = error_fit(kind, fixed_value, &points)?;
    let pass = fit.passes(kind);
    let (lo, hi) = kind.slope_window();
    let record = vec![
        kind.to_string(),
        if kind == ApproxKind::Half {
            String::new()
        } else {
            fixed_value.to_string()
        },
        fit.points.len().to_string(),
        format_f64(fit.slope),
        format_f64(fit.intercept),
        format_f64(fit.r2),
        pass.to_string(),
    ];
    Ok(Report {
        csv: csv_bytes(&FIT_HEADER, [record])?,
        summary: vec![format!(
            "{kind}: slope {:.4} (window [{lo}, {hi}]), r2 {:.5}: {}",
            fit.slope,
            fit.r2,
            if pass { "pass" } else { "FAIL" }
        )],
        passed: pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Swap,
    Bounds,
    Raab,
    Karamata,
    Limit,
    LemmaU,
    LemmaC,
    Binet,
    Corollary,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Swap,
        Suite::Bounds,
        Suite::Raab,
        Suite::Karamata,
        Suite::Limit,
        Suite::LemmaU,
        Suite::LemmaC,
        Suite::Binet,
        Suite::Corollary,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Swap => "swap",
            Suite::Bounds => "bounds",
            Suite::Raab => "raab",
            Suite::Karamata => "karamata",
            Suite::Limit => "limit",
            Suite::LemmaU => "lemma-u",
            Suite::LemmaC => "lemma-c",
            Suite::Binet => "binet",
            Suite::Corollary => "corollary",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|suite| suite.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: Suite,
    pub checks: usize,
    pub failures: usize,
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn grid_2d(kmax: u64, lmax: u64) -> Vec<ParamPair> {
    (1..=kmax)
        .flat_map(|k| (1..=lmax).map(move |l| ParamPair::new(k, l).expect("k, l >= 1")))
        .collect()
}

fn suite_swap(kmax: u64, lmax: u64) -> SuiteResult {
    let pairs = grid_2d(kmax, lmax);
    let one = ExactRational::one();
    let failures = pairs
        .par_iter()
        .filter(|&&p| &(&exact_p(p) + &exact_p(p.swapped())) + &exact_swap_defect(p) != one)
        .count();
    SuiteResult {
        suite: Suite::Swap,
        checks: pairs.len(),
        failures,
        detail: format!("P(k,l) + P(l,k) + defect = 1 exactly on [1,{kmax}]x[1,{lmax}]"),
    }
}

fn suite_bounds(kmax: u64, lmax: u64) -> Result<SuiteResult, CliError> {
    let v = bounds_scan(kmax, lmax)?;
    Ok(SuiteResult {
        suite: Suite::Bounds,
        checks: (kmax * lmax) as usize,
        failures: v.len(),
        detail: format!("1/4 <= P <= 1/2 on [1,{kmax}]x[1,{lmax}]"),
    })
}

fn suite_raab(kmax: u64, lmax: u64, tol: Tolerances) -> Result<SuiteResult, CliError> {
    let ev = tol.evaluator()?;
    let pairs = grid_2d(kmax, lmax);
    let diffs: Vec<f64> = pairs
        .par_iter()
        .map(|&p| Ok((ev.raab_p(p)?.p - oracle_p(p)).abs()))
        .collect::<Result<_, CliError>>()?;
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    Ok(SuiteResult {
        suite: Suite::Raab,
        checks: pairs.len(),
        failures: diffs.iter().filter(|&&d| !(d <= 1e-6)).count(),
        detail: format!("|U·V - P| <= 1e-6, max {worst:.3e}"),
    })
}

fn suite_karamata(lmax: u64) -> Result<SuiteResult, CliError> {
    let results: Vec<(bool, bool)> = (1..=lmax)
        .into_par_iter()
        .map(karamata_check)
        .collect::<Result<_, _>>()?;
    Ok(SuiteResult {
        suite: Suite::Karamata,
        checks: results.len(),
        failures: results.iter().filter(|&&r| r != (true, true)).count(),
        detail: format!("strict half-exponential inequality for l in 1..={lmax}"),
    })
}

fn suite_limit() -> Result<SuiteResult, CliError> {
    let residuals: Vec<f64> = (1..=100)
        .map(limit_identity_residual)
        .collect::<Result<_, _>>()?;
    let worst = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    Ok(SuiteResult {
        suite: Suite::Limit,
        checks: residuals.len(),
        failures: residuals.iter().filter(|r| !(r.abs() <= 1e-12)).count(),
        detail: format!("Poisson limit identity for m <= 100, max residual {worst:.2e}"),
    })
}

fn suite_lemma_u(tol: Tolerances) -> Result<SuiteResult, CliError> {
    let grid = [5, 10, 20, 40, 80];
    let rows = tol.evaluator()?.lemma_u_check(&grid, &grid)?;
    let worst = rows
        .iter()
        .map(|r| r.diff() / r.envelope)
        .fold(0.0, f64::max);
    Ok(SuiteResult {
        suite: Suite::LemmaU,
        checks: rows.len(),
        failures: rows.iter().filter(|r| !r.passed()).count(),
        detail: format!("|U - expansion| <= 2/min(k,l)^2, max ratio to envelope {worst:.3}"),
    })
}

fn suite_lemma_c(tol: Tolerances) -> Result<SuiteResult, CliError> {
    let ev = tol.evaluator()?;
    let rows = ev.lemma_c_regime1(1, 1, &[10, 20, 40, 80])?;
    let k = ev.lemma_c_regime2(1, 1000, &[1, 2, 4, 8])?;
    Ok(SuiteResult {
        suite: Suite::LemmaC,
        checks: rows.len() + 1,
        failures: rows.iter().filter(|r| !r.passed()).count() + usize::from(!k.passed()),
        detail: format!(
            "x = 1 envelope 2/nu^2; x = 1e-3 constant K = {:.4} with spread {:.3}",
            k.k_estimate, k.spread
        ),
    })
}

fn suite_binet(tol: Tolerances) -> Result<SuiteResult, CliError> {
    let xs = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0];
    let diffs: Vec<f64> = xs
        .iter()
        .map(|&x| Ok((binet_mu_quad(x, &tol.quad)?.mu - binet_mu_gamma(x)).abs()))
        .collect::<Result<_, CliError>>()?;
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    let report = lemma_integrals_check(&[0.001, 0.01, 0.1, 10.0, 20.0, 40.0, 80.0])?;
    let slope = report.normalized_residual_fit.as_ref().map(|f| f.slope);
    let slope_ok = slope.is_some_and(|s| (-2.4..=-1.6).contains(&s));
    Ok(SuiteResult {
        suite: Suite::Binet,
        checks: diffs.len() + 2,
        failures: diffs.iter().filter(|&&d| !(d <= 1e-9)).count()
            + usize::from(!report.passed())
            + usize::from(!slope_ok),
        detail: format!(
            "quadrature vs closed form max {worst:.2e}; residual exponent {}; small-x sign {} constant {}",
            slope.map_or("-".into(), |s| format!("{s:.3}")),
            report.observed_log_sign.map_or("-".into(), |s| format!("{s}")),
            report.small_x_constant.map_or("-".into(), |c| format!("{c:.4}")),
        ),
    })
}

fn suite_corollary() -> Result<SuiteResult, CliError> {
    let big = 1_000_000u64;
    let mut checks = 0;
    let mut failures = 0;
    for m in 1..=3u64 {
        let allowed = 10.0 * (m * m) as f64 / big as f64;
        let lower =
            log_p(ParamPair::new(m, big)?) - accumulation_limit(ApproxKind::PoissonLower, m)?;
        let upper =
            log_p(ParamPair::new(big, m)?) - accumulation_limit(ApproxKind::PoissonUpper, m)?;
        checks += 2;
        failures += usize::from(!(lower.abs() <= allowed)) + usize::from(!(upper.abs() <= allowed));
    }
    let mut min_margin = f64::INFINITY;
    for k in 1..=10u64 {
        let c = corollary2_check(k, 10_000 * k * k)?;
        min_margin = min_margin.min(c.margin);
        checks += 1;
        failures += usize::from(!(c.margin > 0.0));
    }
    Ok(SuiteResult {
        suite: Suite::Corollary,
        checks,
        failures,
        detail: format!(
            "accumulation limits at 1e6; min margin above 1/2 - 1/sqrt(2 pi k) {min_margin:.4}"
        ),
    })
}

pub fn run_suite(
    suite: Suite,
    kmax: u64,
    lmax: u64,
    tol: Tolerances,
) -> Result<Vec<SuiteResult>, CliError> {
    if kmax < 1 || lmax < 1 {
        return Err(CliError::Usage("--kmax and --lmax must be >= 1".into()));
    }
    Ok(match suite {
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, kmax, lmax, tol)?);
            }
            out
        }
        Suite::Swap => vec![suite_swap(kmax, lmax)],
        Suite::Bounds => vec![suite_bounds(kmax, lmax)?],
        Suite::Raab => vec![suite_raab(kmax, lmax, tol)?],
        Suite::Karamata => vec![suite_karamata(lmax)?],
        Suite::Limit => vec![suite_limit()?],
        Suite::LemmaU => vec![suite_lemma_u(tol)?],
        Suite::LemmaC => vec![suite_lemma_c(tol)?],
        Suite::Binet => vec![suite_binet(tol)?],
        Suite::Corollary => vec![suite_corollary()?],
    })
}

pub const VERIFY_HEADER: [&str; 5] = ["suite", "checks", "failures", "pass", "detail"];

pub fn cmd_verify(suite: Suite, kmax: u64, lmax: u64, tol: Tolerances) -> Result<Report, CliError> {
    let results = run_suite(suite, kmax, lmax, tol)?;
    let records = results.iter().map(|r| {
        vec![
            r.suite.to_string(),
            r.checks.to_string(),
            r.failures.to_string(),
            r.passed().to_string(),
            r.detail.clone(),
        ]
    });
    let summary = results
        .iter()
        .map(|r| {
            format!(
                "{:<10} {} ({} checks, {} failures): {}",
                r.suite.name(),
                if r.passed() { "PASS" } else { "FAIL" },
                r.checks,
                r.failures,
                r.detail
            )
        })
        .collect();
    Ok(Report {
        csv: csv_bytes(&VERIFY_HEADER, records)?,
        summary,
        passed: results.iter().all(SuiteResult::passed),
    })
}
