//! Named, seeded verification suites.
//!
//! Every trial draws its instance from a seed derived from the suite seed and
//! the trial index, so a suite's report depends only on its configuration.
//! In-hypothesis failures are shrunk before they are written to the report.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::catalog::{catalog_list, convex_subset, monotone_subset, ClassTag, ScalarFunctionSpec};
use crate::error::{Error, Result};
use crate::hermitian::{symmetrized_product, HermitianMatrix};
use crate::inequalities::{
    all_passed, converse_search, default_lambda_grid, explore_hansen_isometry, verify_gustafson, verify_hansen_family,
    verify_hansen_isometry, verify_hansen_weights, verify_power_monotone, verify_power_split, verify_square_order,
    verify_subadditivity_forward, verify_tf_corollary, verify_window_subadditivity, Check, ContractionFamily,
    SpectralWindow, SquareBranch, HANSEN_RATIO,
};
use crate::lab::{composition_monotone_check, order_n_monotone};
use crate::matrix::Matrix;
use crate::matrix_json::{Fixture, MatrixJson};
use crate::report::{Failure, Record, SuiteReport};
use crate::sampler::{generate, shrink, Instance, InstanceKind, InstanceSpec};

pub const SUITES: &[&str] = &[
    "thm-subadd-fwd",
    "thm-subadd-conv",
    "thm-subadd-coupling",
    "gustafson",
    "window-subadd",
    "power-split",
    "hansen",
    "hansen-explore",
    "square-order",
    "power-monotone",
    "tf-corollary",
    "loewner",
    "composition",
    "all",
];

/// Exponents cycled through by the power suites.
pub const EXPONENTS: [f64; 5] = [0.0, 0.1, 0.25, 0.4, 0.5];
/// Pairs with `|λ_min(AB+BA)| ≤ DEAD_BAND · ‖A‖‖B‖` prove nothing either way.
pub const DEAD_BAND: f64 = 1e-6;
/// Spread ratio of the exploration window, outside the admissible `1 + 2√2`.
pub const EXPLORE_RATIO: f64 = 5.0;
/// At most this many failures per suite are shrunk.
const SHRINK_LIMIT: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Overrides the suite's default function subset.
    pub functions: Option<Vec<ScalarFunctionSpec>>,
    /// Runs a single trial on these matrices instead of sampling.
    pub fixture: Option<Fixture>,
}

impl SuiteConfig {
    pub fn new(dim: usize, trials: usize, seed: u64, tol: f64) -> Self {
        Self {
            dim,
            trials,
            seed,
            tol,
            functions: None,
            fixture: None,
        }
    }

    fn functions_or(&self, default: Vec<ScalarFunctionSpec>) -> Vec<ScalarFunctionSpec> {
        self.functions.clone().unwrap_or(default)
    }

    fn trial_count(&self) -> usize {
        if self.fixture.is_some() {
            1
        } else {
            self.trials
        }
    }

    fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

fn trial_seed(seed: u64, trial: usize, stream: u64) -> u64 {
    derive_seed(derive_seed(seed, trial as u64), stream)
}

fn pair(kind: InstanceKind, dim: usize, seed: u64) -> Result<(HermitianMatrix, HermitianMatrix)> {
    generate(&InstanceSpec::new(dim, kind, seed))?
        .into_pair()
        .ok_or_else(|| Error::Shape("expected a pair instance".into()))
}

fn single(kind: InstanceKind, dim: usize, seed: u64) -> Result<HermitianMatrix> {
    match generate(&InstanceSpec::new(dim, kind, seed))? {
        Instance::Single(m) => Ok(m),
        _ => Err(Error::Shape("expected a single instance".into())),
    }
}

fn matrices(named: &[(&str, &HermitianMatrix)]) -> BTreeMap<String, MatrixJson> {
    named
        .iter()
        .map(|(k, m)| (k.to_string(), MatrixJson::from(*m)))
        .collect()
}

fn fixture_pair(f: &Fixture) -> Result<(HermitianMatrix, HermitianMatrix)> {
    Ok((f.get("A")?, f.get("B")?))
}

/// Appends one record per check and returns the first failing one.
fn record_checks(report: &mut SuiteReport, trial: usize, checks: &[Check]) -> Option<Check> {
    for c in checks {
        report.records.push(Record {
            trial,
            label: c.label.clone(),
            min_eigenvalue: c.min_eigenvalue,
            passed: c.passed,
            value: None,
        });
    }
    checks.iter().find(|c| !c.passed).cloned()
}

/// Runs a pair verifier over `trials`, shrinking failures. `names` label the
/// two operands in dumped fixtures.
fn pair_suite(
    report: &mut SuiteReport,
    cfg: &SuiteConfig,
    names: (&str, &str),
    mut draw: impl FnMut(usize) -> Result<(HermitianMatrix, HermitianMatrix)>,
    verify: impl Fn(usize, &HermitianMatrix, &HermitianMatrix) -> Result<Vec<Check>>,
) -> Result<()> {
    let trials = cfg.trial_count();
    report.trials = trials;
    let mut shrunk = 0;
    for trial in 0..trials {
        let (a, b) = draw(trial)?;
        let checks = verify(trial, &a, &b)?;
        if let Some(bad) = record_checks(report, trial, &checks) {
            let mut dump = matrices(&[(names.0, &a), (names.1, &b)]);
            if shrunk < SHRINK_LIMIT {
                shrunk += 1;
                let inst = Instance::Pair {
                    a: a.clone(),
                    b: b.clone(),
                };
                let small = shrink(&inst, |i| {
                    i.pair()
                        .is_some_and(|(x, y)| verify(trial, x, y).is_ok_and(|c| !all_passed(&c)))
                });
                if let Some((x, y)) = small.pair() {
                    if x.dim() < a.dim() || small != inst {
                        dump.insert(format!("{}_shrunk", names.0), x.into());
                        dump.insert(format!("{}_shrunk", names.1), y.into());
                    }
                }
            }
            report.failures.push(Failure {
                trial,
                label: bad.label,
                points: None,
                matrices: Some(dump),
                min_eigenvalue: bad.min_eigenvalue,
            });
        }
    }
    Ok(())
}

fn worst(report: &SuiteReport) -> f64 {
    report
        .records
        .iter()
        .map(|r| r.min_eigenvalue)
        .fold(f64::INFINITY, f64::min)
}

fn finish(mut report: SuiteReport) -> SuiteReport {
    if !report.records.is_empty() {
        let w = worst(&report);
        report.stat("worst_margin", w);
    }
    report
}

fn base(name: &str, cfg: &SuiteConfig) -> SuiteReport {
    SuiteReport::new(name, cfg.seed)
        .param("dim", cfg.dim)
        .tolerance("order_relative", cfg.tol)
}

fn labels(fs: &[ScalarFunctionSpec]) -> Value {
    json!(fs.iter().map(ScalarFunctionSpec::label).collect::<Vec<_>>())
}

// ---------------------------------------------------------------------------

fn subadd_forward(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(monotone_subset());
    let mut report = base("thm-subadd-fwd", cfg).param("functions", labels(&fs));
    pair_suite(
        &mut report,
        cfg,
        ("A", "B"),
        |t| match &cfg.fixture {
            Some(f) => fixture_pair(f),
            None => pair(InstanceKind::JordanPositivePair, cfg.dim, trial_seed(cfg.seed, t, 0)),
        },
        |_, a, b| verify_subadditivity_forward(a, b, &fs, cfg.tol),
    )?;
    Ok(finish(report))
}

fn subadd_converse(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let grid = default_lambda_grid();
    let mut report = base("thm-subadd-conv", cfg)
        .param("lambda_grid", json!({"base": 2, "k_min": -5, "k_max": 25}))
        .tolerance("defect_absolute", cfg.tol);
    let trials = cfg.trial_count();
    report.trials = trials;
    let mut found = Vec::new();
    let mut decay = true;
    for trial in 0..trials {
        let (a, b) = match &cfg.fixture {
            Some(f) => fixture_pair(f)?,
            None => pair(
                InstanceKind::JordanIndefinitePair,
                cfg.dim,
                trial_seed(cfg.seed, trial, 0),
            )?,
        };
        let out = converse_search(&a, &b, &grid, cfg.tol)?;
        decay &= out.residual_decay_monotone;
        report.records.push(Record {
            trial,
            label: "f_lambda".into(),
            min_eigenvalue: out.worst_defect,
            passed: out.violation.is_some(),
            value: out.violation,
        });
        match out.violation {
            Some(l) => found.push(l),
            None => report.failures.push(Failure {
                trial,
                label: "no violating lambda on grid".into(),
                points: None,
                matrices: Some(matrices(&[("A", &a), ("B", &b)])),
                min_eigenvalue: out.worst_defect,
            }),
        }
        if cfg.fixture.is_some() {
            report.stat("s_min", out.s_min);
            report.stat("probes", serde_json::to_value(&out.probes)?);
        }
    }
    report.stat("violation_lambdas", json!(found));
    report.stat("residual_decay_monotone", decay);
    Ok(finish(report))
}

fn subadd_coupling(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(monotone_subset());
    let grid = default_lambda_grid();
    let mut report = base("thm-subadd-coupling", cfg)
        .param("functions", labels(&fs))
        .tolerance("dead_band_relative", DEAD_BAND);
    report.trials = cfg.trial_count();
    let (mut considered, mut agree, mut dead) = (0usize, 0usize, 0usize);
    for trial in 0..report.trials {
        let (a, b) = match &cfg.fixture {
            Some(f) => fixture_pair(f)?,
            None => (
                single(InstanceKind::Psd, cfg.dim, trial_seed(cfg.seed, trial, 0))?,
                single(InstanceKind::Psd, cfg.dim, trial_seed(cfg.seed, trial, 1))?,
            ),
        };
        let s_min = symmetrized_product(&a, &b)?.eigh()?.min();
        let scale = a.spectral_norm()? * b.spectral_norm()?;
        if s_min.abs() <= DEAD_BAND * scale {
            dead += 1;
            continue;
        }
        considered += 1;
        let (label, ok) = if s_min > 0.0 {
            let ok = verify_subadditivity_forward(&a, &b, &fs, cfg.tol).is_ok_and(|c| all_passed(&c));
            ("forward", ok)
        } else {
            let ok = converse_search(&a, &b, &grid, cfg.tol).is_ok_and(|o| o.violation.is_some());
            ("converse", ok)
        };
        report.records.push(Record {
            trial,
            label: label.into(),
            min_eigenvalue: s_min,
            passed: ok,
            value: None,
        });
        if ok {
            agree += 1;
        } else {
            report.failures.push(Failure {
                trial,
                label: format!("{label} branch disagrees with sign of AB+BA"),
                points: None,
                matrices: Some(matrices(&[("A", &a), ("B", &b)])),
                min_eigenvalue: s_min,
            });
        }
    }
    report.stat("considered", considered);
    report.stat("agreements", agree);
    report.stat("dead_band", dead);
    Ok(report)
}

fn random_window(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let lo = 2.0 * rng.random::<f64>();
    (lo, lo + 4.0 * rng.random::<f64>())
}

fn window_pair(
    cfg: &SuiteConfig,
    trial: usize,
    windows: impl Fn(&mut ChaCha8Rng) -> ((f64, f64), (f64, f64)),
) -> Result<(HermitianMatrix, HermitianMatrix, SpectralWindow, SpectralWindow)> {
    if let Some(f) = &cfg.fixture {
        let (a, b) = fixture_pair(f)?;
        let (wa, wb) = (SpectralWindow::of(&a)?, SpectralWindow::of(&b)?);
        return Ok((a, b, wa, wb));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial, 0));
    let ((la, ha), (lb, hb)) = windows(&mut rng);
    let a = single(
        InstanceKind::PsdWindow { lo: la, hi: ha },
        cfg.dim,
        trial_seed(cfg.seed, trial, 1),
    )?;
    let b = single(
        InstanceKind::PsdWindow { lo: lb, hi: hb },
        cfg.dim,
        trial_seed(cfg.seed, trial, 2),
    )?;
    Ok((a, b, SpectralWindow::new(la, ha)?, SpectralWindow::new(lb, hb)?))
}

fn windowed_suite(
    name: &str,
    cfg: &SuiteConfig,
    windows: impl Fn(&mut ChaCha8Rng) -> ((f64, f64), (f64, f64)),
    verify: impl Fn(&HermitianMatrix, &HermitianMatrix, &SpectralWindow, &SpectralWindow) -> Result<Vec<Check>>,
) -> Result<SuiteReport> {
    let mut report = base(name, cfg);
    report.trials = cfg.trial_count();
    for trial in 0..report.trials {
        let (a, b, wa, wb) = window_pair(cfg, trial, &windows)?;
        let checks = verify(&a, &b, &wa, &wb)?;
        if let Some(bad) = record_checks(&mut report, trial, &checks) {
            report.failures.push(Failure {
                trial,
                label: bad.label,
                points: None,
                matrices: Some(matrices(&[("A", &a), ("B", &b)])),
                min_eigenvalue: bad.min_eigenvalue,
            });
        }
    }
    Ok(finish(report))
}

fn gustafson(cfg: &SuiteConfig) -> Result<SuiteReport> {
    windowed_suite(
        "gustafson",
        cfg,
        |rng| (random_window(rng), random_window(rng)),
        |a, b, wa, wb| verify_gustafson(a, b, wa, wb, cfg.tol),
    )
}

fn window_subadd(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(monotone_subset());
    let r = 2.0 * std::f64::consts::SQRT_2;
    let mut report = windowed_suite(
        "window-subadd",
        cfg,
        // Spreads m·u·2√2 and n·v·2√2 keep (M−m)(N−n) = 8mn·uv ≤ 8mn.
        |rng| {
            let m = 0.5 + 1.5 * rng.random::<f64>();
            let n = 0.5 + 1.5 * rng.random::<f64>();
            let sa = m * r * rng.random::<f64>();
            let sb = n * r * rng.random::<f64>();
            ((m, m + sa), (n, n + sb))
        },
        |a, b, wa, wb| verify_window_subadditivity(a, b, wa, wb, &fs, cfg.tol),
    )?;
    report.params.insert("functions".into(), labels(&fs));
    Ok(report)
}

fn exponent(trial: usize) -> f64 {
    EXPONENTS[trial % EXPONENTS.len()]
}

fn power_split(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(monotone_subset());
    let mut report = base("power-split", cfg)
        .param("functions", labels(&fs))
        .param("exponents", json!(EXPONENTS));
    pair_suite(
        &mut report,
        cfg,
        ("A", "B"),
        |t| match &cfg.fixture {
            Some(f) => fixture_pair(f),
            None => pair(InstanceKind::OrderedPairLeq, cfg.dim, trial_seed(cfg.seed, t, 0)),
        },
        |t, lower, upper| verify_power_split(lower, upper, exponent(t), &fs, cfg.tol),
    )?;
    Ok(finish(report))
}

/// `B ≤ A` suites: generated pairs come lower first, fixtures name `A ≥ B`.
fn reversed_pair(cfg: &SuiteConfig, t: usize) -> Result<(HermitianMatrix, HermitianMatrix)> {
    match &cfg.fixture {
        Some(f) => Ok((f.get("B")?, f.get("A")?)),
        None => pair(InstanceKind::OrderedPairLeq, cfg.dim, trial_seed(cfg.seed, t, 0)),
    }
}

fn power_monotone(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(convex_subset());
    let mut report = base("power-monotone", cfg)
        .param("functions", labels(&fs))
        .param("exponents", json!(EXPONENTS));
    pair_suite(
        &mut report,
        cfg,
        ("B", "A"),
        |t| reversed_pair(cfg, t),
        |t, lower, upper| verify_power_monotone(lower, upper, exponent(t), &fs, cfg.tol),
    )?;
    Ok(finish(report))
}

fn tf_corollary(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(monotone_subset());
    let mut report = base("tf-corollary", cfg)
        .param("functions", labels(&fs))
        .param("exponents", json!(EXPONENTS));
    pair_suite(
        &mut report,
        cfg,
        ("B", "A"),
        |t| reversed_pair(cfg, t),
        |t, lower, upper| {
            let mut all = Vec::new();
            for f in &fs {
                all.extend(verify_tf_corollary(lower, upper, exponent(t), f, cfg.tol, false)?);
            }
            Ok(all)
        },
    )?;
    let second = report.records.iter().filter(|r| r.label.ends_with(":ii")).count();
    report.stat("second_form_checks", second);
    Ok(finish(report))
}

fn square_order(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(convex_subset());
    let mut report = base("square-order", cfg)
        .param("functions", labels(&fs))
        .tolerance("identity_relative", crate::inequalities::IDENTITY_TOL);
    let trials = cfg.trial_count();
    report.trials = trials;
    let mut branches: BTreeMap<&str, usize> = BTreeMap::new();
    for trial in 0..trials {
        let instances = match &cfg.fixture {
            Some(f) => vec![fixture_pair(f)?],
            None => vec![
                pair(InstanceKind::OrderedPairSqLeq, cfg.dim, trial_seed(cfg.seed, trial, 0))?,
                (
                    single(InstanceKind::Psd, cfg.dim, trial_seed(cfg.seed, trial, 1))?,
                    single(InstanceKind::Psd, cfg.dim, trial_seed(cfg.seed, trial, 2))?,
                ),
            ],
        };
        for (a, b) in instances {
            let out = verify_square_order(&a, &b, &fs, cfg.tol)?;
            let branch = match out.branch {
                SquareBranch::Forward => "forward",
                SquareBranch::Converse => "converse",
            };
            *branches.entry(branch).or_default() += 1;
            let checks: Vec<Check> = out
                .checks
                .into_iter()
                .map(|c| Check {
                    label: format!("{branch}:{}", c.label),
                    ..c
                })
                .collect();
            if let Some(bad) = record_checks(&mut report, trial, &checks) {
                report.failures.push(Failure {
                    trial,
                    label: bad.label,
                    points: None,
                    matrices: Some(matrices(&[("A", &a), ("B", &b)])),
                    min_eigenvalue: bad.min_eigenvalue,
                });
            }
        }
    }
    report.stat("branches", json!(branches));
    Ok(finish(report))
}

// ---------------------------------------------------------------------------
// Isometries

struct HansenDraw {
    a: HermitianMatrix,
    c: Matrix,
    operands: Vec<HermitianMatrix>,
    family: ContractionFamily,
    weights: Vec<f64>,
}

const FAMILY_SIZE: usize = 3;

fn hansen_draw(cfg: &SuiteConfig, trial: usize, ratio: f64) -> Result<HansenDraw> {
    let k = cfg.dim;
    let rows = 2 * k;
    let window = InstanceKind::PsdWindow { lo: 1.0, hi: ratio };
    let a = match &cfg.fixture {
        Some(f) => f.get("A")?,
        None => single(window.clone(), rows, trial_seed(cfg.seed, trial, 0))?,
    };
    let rows = a.dim();
    let c = match generate(&InstanceSpec::new(
        rows,
        InstanceKind::Isometry {
            rows,
            cols: k.min(rows),
        },
        trial_seed(cfg.seed, trial, 1),
    ))? {
        Instance::Isometry(c) => c,
        _ => unreachable!("isometry kind yields an isometry"),
    };
    let operands = (0..FAMILY_SIZE)
        .map(|i| single(window.clone(), k, trial_seed(cfg.seed, trial, 10 + i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let family = match generate(&InstanceSpec::new(
        k,
        InstanceKind::ResolutionOfIdentity { count: FAMILY_SIZE },
        trial_seed(cfg.seed, trial, 2),
    ))? {
        Instance::Family(cs) => ContractionFamily::new(cs)?,
        _ => unreachable!("resolution kind yields a family"),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, trial, 3));
    let weights = (0..FAMILY_SIZE)
        .map(|_| 1.0 + (ratio - 1.0) * rng.random::<f64>())
        .collect();
    Ok(HansenDraw {
        a,
        c,
        operands,
        family,
        weights,
    })
}

fn hansen(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(monotone_subset());
    let window = SpectralWindow::new(1.0, HANSEN_RATIO)?;
    let mut report = base("hansen", cfg)
        .param("functions", labels(&fs))
        .param("window", json!([window.lo, window.hi]))
        .param("isometry", format!("{}x{}", 2 * cfg.dim, cfg.dim))
        .param("family_size", FAMILY_SIZE);
    report.trials = cfg.trial_count();
    for trial in 0..report.trials {
        let d = hansen_draw(cfg, trial, HANSEN_RATIO)?;
        let mut checks = verify_hansen_isometry(&d.a, &d.c, &window, &fs, cfg.tol)?;
        checks.extend(verify_hansen_family(&d.operands, &d.family, &window, &fs, cfg.tol)?);
        checks.extend(verify_hansen_weights(&d.family, &d.weights, &window, &fs, cfg.tol)?);
        if let Some(bad) = record_checks(&mut report, trial, &checks) {
            report.failures.push(Failure {
                trial,
                label: bad.label,
                points: None,
                matrices: Some(matrices(&[("A", &d.a)])),
                min_eigenvalue: bad.min_eigenvalue,
            });
        }
    }
    report
        .notes
        .push("family form checked per index (f(A_i/2)) and with one operator in every slot (literal)".into());
    report
        .notes
        .push("weights are drawn from the closed interval [lambda, (1+2*sqrt2)*lambda]".into());
    Ok(finish(report))
}

fn hansen_explore(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(monotone_subset());
    let mut report = base("hansen-explore", cfg)
        .param("functions", labels(&fs))
        .param("window", json!([1.0, EXPLORE_RATIO]));
    report.in_hypothesis = false;
    report.trials = cfg.trial_count();
    for trial in 0..report.trials {
        let d = hansen_draw(cfg, trial, EXPLORE_RATIO)?;
        let checks = explore_hansen_isometry(&d.a, &d.c, &fs, cfg.tol)?;
        if let Some(bad) = record_checks(&mut report, trial, &checks) {
            report.failures.push(Failure {
                trial,
                label: bad.label,
                points: None,
                matrices: Some(matrices(&[("A", &d.a)])),
                min_eigenvalue: bad.min_eigenvalue,
            });
        }
    }
    report
        .notes
        .push("spectral spread exceeds 1 + 2*sqrt2: violations are recorded, not asserted".into());
    Ok(finish(report))
}

// ---------------------------------------------------------------------------
// Löwner certificates and compositions

fn loewner(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(
        catalog_list()
            .into_iter()
            .filter(|f| f.has(ClassTag::NonnegOperatorMonotone))
            .collect(),
    );
    let mut report = base("loewner", cfg)
        .param("order", cfg.dim)
        .param("functions", labels(&fs));
    report.trials = cfg.trials;
    for (i, f) in fs.iter().enumerate() {
        let child = order_n_monotone(
            f,
            cfg.dim,
            cfg.trials,
            derive_seed(cfg.seed, i as u64),
            &f.domain,
            cfg.tol,
        )?;
        report.records.push(Record {
            trial: i,
            label: f.label(),
            min_eigenvalue: child.stats["worst_min_eigenvalue"].as_f64().unwrap_or(0.0),
            passed: child.failures.is_empty(),
            value: None,
        });
        report.children.push(child);
    }
    let mut detected = BTreeMap::new();
    for (i, f) in [ScalarFunctionSpec::t_squared(), ScalarFunctionSpec::power(3.0)?]
        .iter()
        .enumerate()
    {
        let mut child = order_n_monotone(f, 2, 200, derive_seed(cfg.seed, 1000 + i as u64), &f.domain, cfg.tol)?;
        child.in_hypothesis = false;
        let hit = !child.failures.is_empty();
        detected.insert(f.label(), hit);
        if !hit {
            report.failures.push(Failure {
                trial: i,
                label: format!("control `{}` passed order 2", f.label()),
                points: None,
                matrices: None,
                min_eigenvalue: child.stats["worst_min_eigenvalue"].as_f64().unwrap_or(0.0),
            });
        }
        report.children.push(child);
    }
    report.stat("controls_detected", json!(detected));
    Ok(report)
}

/// First-quadrant members and non-members of the power family.
pub const FIRST_QUADRANT_POWERS: [f64; 3] = [0.1, 0.25, 0.5];
pub const OTHER_POWERS: [f64; 3] = [0.6, 0.75, 0.9];

fn composition(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = cfg.functions_or(convex_subset());
    let order = cfg.dim.max(2);
    let mut report = base("composition", cfg)
        .param("order", order)
        .param("functions", labels(&fs));
    report.trials = cfg.trials;
    let mut matches = 0;
    let powers: Vec<(f64, bool)> = FIRST_QUADRANT_POWERS
        .iter()
        .map(|&p| (p, true))
        .chain(OTHER_POWERS.iter().map(|&p| (p, false)))
        .collect();
    for (i, &(p, expect_first_quadrant)) in powers.iter().enumerate() {
        let g = ScalarFunctionSpec::power(p)?;
        // Members: every convex f keeps f∘g monotone. Non-members: t² breaks it at order 2.
        let (outer, n): (Vec<ScalarFunctionSpec>, usize) = if expect_first_quadrant {
            (fs.clone(), order)
        } else {
            (vec![ScalarFunctionSpec::t_squared()], 2)
        };
        let mut first_quadrant = None;
        let mut all_monotone = true;
        for (j, f) in outer.iter().enumerate() {
            let mut child = composition_monotone_check(
                f,
                &g,
                n,
                cfg.trials,
                derive_seed(cfg.seed, (i * 100 + j) as u64),
                cfg.tol,
            )?;
            child.in_hypothesis = expect_first_quadrant;
            first_quadrant = child.stats["g_first_quadrant"].as_bool();
            all_monotone &= child.failures.is_empty();
            report.children.push(child);
        }
        let first_quadrant = first_quadrant.unwrap_or(false);
        let ok = first_quadrant == expect_first_quadrant && all_monotone == expect_first_quadrant;
        report.records.push(Record {
            trial: i,
            label: g.label(),
            min_eigenvalue: if all_monotone { 0.0 } else { -1.0 },
            passed: ok,
            value: Some(p),
        });
        if ok {
            matches += 1;
        } else {
            report.failures.push(Failure {
                trial: i,
                label: format!(
                    "`{}`: first quadrant {first_quadrant}, compositions monotone {all_monotone}",
                    g.label()
                ),
                points: None,
                matrices: None,
                min_eigenvalue: -1.0,
            });
        }
    }
    report.stat("dichotomy_matches", format!("{matches}/{}", powers.len()));
    Ok(report)
}

// ---------------------------------------------------------------------------

fn all(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut report = base("all", cfg).param("trials_per_suite", cfg.trials);
    for (i, name) in SUITES.iter().enumerate().filter(|(_, n)| **n != "all") {
        let sub = cfg.with_seed(derive_seed(cfg.seed, i as u64));
        let child = run_named(name, &sub)?;
        report.trials += child.trials;
        report.children.push(child);
    }
    Ok(report)
}

fn run_named(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match name {
        "thm-subadd-fwd" => subadd_forward(cfg),
        "thm-subadd-conv" => subadd_converse(cfg),
        "thm-subadd-coupling" => subadd_coupling(cfg),
        "gustafson" => gustafson(cfg),
        "window-subadd" => window_subadd(cfg),
        "power-split" => power_split(cfg),
        "hansen" => hansen(cfg),
        "hansen-explore" => hansen_explore(cfg),
        "square-order" => square_order(cfg),
        "power-monotone" => power_monotone(cfg),
        "tf-corollary" => tf_corollary(cfg),
        "loewner" => loewner(cfg),
        "composition" => composition(cfg),
        "all" => all(cfg),
        _ => Err(Error::UnknownSuite {
            name: name.to_string(),
            valid: SUITES.join(", "),
        }),
    }
}

/// Runs the named suite.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    if !SUITES.contains(&name) {
        return Err(Error::UnknownSuite {
            name: name.to_string(),
            valid: SUITES.join(", "),
        });
    }
    if cfg.dim == 0 || cfg.dim > crate::sampler::MAX_DIM {
        return Err(Error::Parameter(format!("dim must be in [1, 64], got {}", cfg.dim)));
    }
    if cfg.trials == 0 {
        return Err(Error::Parameter("trials must be >= 1".into()));
    }
    if !(cfg.tol >= 0.0) {
        return Err(Error::Parameter(format!("tol must be >= 0, got {}", cfg.tol)));
    }
    let mut report = run_named(name, cfg)?;
    report.params.insert("trials".into(), json!(cfg.trials));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dim: usize, trials: usize) -> SuiteConfig {
        SuiteConfig::new(dim, trials, 7, 1e-8)
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }

    #[test]
    fn unknown_suite_lists_valid_names() {
        let err = run_suite("nope", &cfg(2, 1)).unwrap_err();
        assert!(err.to_string().contains("thm-subadd-fwd"));
    }

    #[test]
    fn in_hypothesis_suites_pass() {
        for name in [
            "thm-subadd-fwd",
            "thm-subadd-conv",
            "thm-subadd-coupling",
            "gustafson",
            "window-subadd",
            "power-split",
            "hansen",
            "square-order",
            "power-monotone",
            "tf-corollary",
        ] {
            let r = run_suite(name, &cfg(3, 10)).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures.first());
            assert_eq!(r.trials, 10);
        }
    }

    #[test]
    fn exploration_is_not_counted() {
        let r = run_suite("hansen-explore", &cfg(2, 5)).unwrap();
        assert!(!r.in_hypothesis);
        assert!(r.passed());
    }

    #[test]
    fn fixture_runs_one_trial() {
        let a = HermitianMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let b = HermitianMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let mut c = cfg(2, 50);
        c.fixture = Some(Fixture::named(&[("A", &a), ("B", &b)]));
        let r = run_suite("thm-subadd-conv", &c).unwrap();
        assert_eq!(r.trials, 1);
        assert!(r.passed());
        assert!(!r.stats["violation_lambdas"].as_array().unwrap().is_empty());
    }

    #[test]
    fn suites_are_deterministic() {
        let a = run_suite("square-order", &cfg(3, 4)).unwrap();
        let b = run_suite("square-order", &cfg(3, 4)).unwrap();
        assert_eq!(a, b);
    }
}
