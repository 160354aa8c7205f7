//! Finite-order monotonicity and convexity certificates, upper half-plane
//! scans, and the composition criterion.
//!
//! A pass at order `n` certifies `n`-monotonicity on the sampled point sets
//! only. Nothing here claims full operator monotonicity from numerics.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::{ClassTag, ScalarFunctionSpec};
use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::hermitian::{psd_check_scaled, HermitianMatrix, PsdCertificate};
use crate::matrix::Matrix;
use crate::report::{Failure, SuiteReport};

/// Points closer than `MERGE_GAP · (1 + |t|)` are treated as one point.
pub const MERGE_GAP: f64 = 1e-8;
/// Off-diagonal entries for points within this relative gap use the midpoint
/// derivative instead of the difference quotient.
pub const NEAR_GAP: f64 = 1e-5;
pub const PICK_TOL: f64 = 1e-10;
/// Lower cut for sampling on intervals that touch 0.
pub const EDGE_EPS: f64 = 1e-6;
/// Upper cut for sampling on unbounded intervals.
pub const FAR_EDGE: f64 = 1e6;

fn merge_gap(t: f64) -> f64 {
    MERGE_GAP * (1.0 + t.abs())
}

/// Matrix of first divided differences of `f` at distinct points.
#[derive(Debug, Clone)]
pub struct LoewnerMatrix {
    pub points: Vec<f64>,
    pub entries: HermitianMatrix,
}

impl LoewnerMatrix {
    /// Builds the matrix for points that are already distinct and in the domain.
    pub fn new(f: &ScalarFunctionSpec, points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("Loewner matrix needs at least one point".into()));
        }
        for &t in points {
            if !f.domain.contains(t) {
                return Err(Error::Domain {
                    function: f.label(),
                    eigenvalue: t,
                    domain: f.domain.to_string(),
                });
            }
        }
        let k = points.len();
        let values: Vec<f64> = points.iter().map(|&t| f.eval(t)).collect();
        let derivs: Vec<f64> = points.iter().map(|&t| f.deriv(t)).collect();
        if let Some(i) = derivs.iter().position(|d| !d.is_finite()) {
            return Err(Error::Precondition(format!(
                "derivative of `{}` is not finite at t = {}",
                f.label(),
                points[i]
            )));
        }
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            m[(i, i)] = Complex64::new(derivs[i], 0.0);
            for j in (i + 1)..k {
                let (ti, tj) = (points[i], points[j]);
                let gap = (ti - tj).abs();
                let entry = if gap <= NEAR_GAP * ti.abs().max(tj.abs()) {
                    f.deriv(0.5 * (ti + tj))
                } else {
                    (values[i] - values[j]) / (ti - tj)
                };
                m[(i, j)] = Complex64::new(entry, 0.0);
                m[(j, i)] = Complex64::new(entry, 0.0);
            }
        }
        Ok(Self {
            points: points.to_vec(),
            entries: HermitianMatrix::new(m)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct LoewnerCertificate {
    pub certificate: PsdCertificate,
    /// Points actually used, ascending.
    pub points: Vec<f64>,
    /// Input points dropped because they fell within the merge gap of a kept one.
    pub merged: Vec<f64>,
}

/// PSD certificate of the Löwner matrix of `f` at `points`. The tolerance is
/// relative: `tol · (1 + ‖L‖₂)`.
pub fn loewner_certificate(f: &ScalarFunctionSpec, points: &[f64], tol: f64) -> Result<LoewnerCertificate> {
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut kept: Vec<f64> = Vec::with_capacity(sorted.len());
    let mut merged = Vec::new();
    for t in sorted {
        match kept.last() {
            Some(&last) if (t - last).abs() < merge_gap(last) => merged.push(t),
            _ => kept.push(t),
        }
    }
    let l = LoewnerMatrix::new(f, &kept)?;
    Ok(LoewnerCertificate {
        certificate: psd_check_scaled(&l.entries, tol)?,
        points: kept,
        merged,
    })
}

/// Effective sampling window: `interval ∩ domain`, with a zero endpoint
/// lifted to [`EDGE_EPS`] and an infinite one cut at [`FAR_EDGE`].
pub fn sampling_window(f: &ScalarFunctionSpec, interval: &Interval) -> Result<(f64, f64, bool)> {
    let iv = interval.intersect(&f.domain);
    let log_uniform = iv.lo >= 0.0;
    let lo = if log_uniform {
        iv.lo.max(EDGE_EPS)
    } else {
        iv.lo.max(-FAR_EDGE)
    };
    let hi = iv.hi.min(FAR_EDGE);
    if !(lo < hi) {
        return Err(Error::Parameter(format!(
            "empty sampling interval {iv} for `{}`",
            f.label()
        )));
    }
    Ok((lo, hi, log_uniform))
}

/// Draws `trials` point sets of size `n`, redrawing any point that lands
/// within the merge gap of an earlier one.
pub fn sample_point_sets(n: usize, trials: usize, seed: u64, lo: f64, hi: f64, log_uniform: bool) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = if log_uniform { (lo.ln(), hi.ln()) } else { (lo, hi) };
    let draw = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.random();
        let x = a + (b - a) * u;
        let t = if log_uniform { x.exp() } else { x };
        t.clamp(lo, hi)
    };
    (0..trials)
        .map(|_| {
            let mut pts: Vec<f64> = Vec::with_capacity(n);
            while pts.len() < n {
                let t = draw(&mut rng);
                if pts.iter().all(|&s| (s - t).abs() >= merge_gap(s)) {
                    pts.push(t);
                }
            }
            pts
        })
        .collect()
}

/// Randomized order-`n` monotonicity certificate over `interval`.
pub fn order_n_monotone(
    f: &ScalarFunctionSpec,
    n: usize,
    trials: usize,
    seed: u64,
    interval: &Interval,
    tol: f64,
) -> Result<SuiteReport> {
    if n == 0 || trials == 0 {
        return Err(Error::Parameter("order_n_monotone needs n >= 1 and trials >= 1".into()));
    }
    let (lo, hi, log_uniform) = sampling_window(f, interval)?;
    let sets = sample_point_sets(n, trials, seed, lo, hi, log_uniform);
    let mut report = SuiteReport::new("order-n-monotone", seed)
        .param("function", f.label())
        .param("order", n)
        .param("interval", json!([lo, hi]))
        .param("sampling", if log_uniform { "log-uniform" } else { "uniform" })
        .tolerance("psd_relative", tol);
    report.trials = trials;
    let mut worst = f64::INFINITY;
    for (trial, pts) in sets.iter().enumerate() {
        let cert = loewner_certificate(f, pts, tol)?;
        let c = &cert.certificate;
        worst = worst.min(c.min_eigenvalue);
        if !c.is_positive() {
            report.failures.push(Failure {
                trial,
                label: f.label(),
                points: Some(pts.clone()),
                matrices: None,
                min_eigenvalue: c.min_eigenvalue,
            });
        }
    }
    report.stat("worst_min_eigenvalue", worst);
    report
        .notes
        .push(format!("certifies order-{n} monotonicity on sampled point sets only"));
    Ok(report)
}

/// Certificate of `(f(A)+f(B))/2 − f((A+B)/2) ≥ 0` (relative tolerance).
pub fn midpoint_convexity_check(
    f: &ScalarFunctionSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: f64,
) -> Result<PsdCertificate> {
    let mid = a.add(b)?.scale(0.5);
    let fa = f.apply(a)?;
    let fb = f.apply(b)?;
    let fmid = f.apply(&mid)?;
    let gap = fa.add(&fb)?.scale(0.5).sub(&fmid)?;
    psd_check_scaled(&gap, tol)
}

/// Log-polar grid on the upper half-plane: `moduli` radii log-spaced in
/// `[min_modulus, max_modulus]` times `arguments` angles `(2k+1)π/(2·arguments)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub moduli: usize,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub arguments: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            moduli: 24,
            min_modulus: 1e-3,
            max_modulus: 1e3,
            arguments: 32,
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<Complex64> {
        let (a, b) = (self.min_modulus.ln(), self.max_modulus.ln());
        let mut out = Vec::with_capacity(self.moduli * self.arguments);
        for i in 0..self.moduli {
            let r = if self.moduli == 1 {
                self.min_modulus
            } else {
                (a + (b - a) * i as f64 / (self.moduli - 1) as f64).exp()
            };
            for k in 0..self.arguments {
                let theta = std::f64::consts::PI * (2 * k + 1) as f64 / (2 * self.arguments) as f64;
                out.push(Complex64::from_polar(r, theta));
            }
        }
        out
    }
}

/// Where `g = u + iv` lands on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickReport {
    pub function: String,
    pub grid_spec: GridSpec,
    #[serde(skip)]
    pub grid: Vec<Complex64>,
    pub min_im: f64,
    pub min_re: f64,
    pub argmin_im: Complex64,
    pub argmin_re: Complex64,
    pub is_pick_on_grid: bool,
    pub is_first_quadrant_on_grid: bool,
}

pub fn pick_scan(f: &ScalarFunctionSpec, grid_spec: &GridSpec) -> Result<PickReport> {
    let grid = grid_spec.points();
    let mut min_im = f64::INFINITY;
    let mut min_re = f64::INFINITY;
    let mut argmin_im = grid[0];
    let mut argmin_re = grid[0];
    for &z in &grid {
        let w = f.complex_eval(z)?;
        if w.im < min_im {
            min_im = w.im;
            argmin_im = z;
        }
        if w.re < min_re {
            min_re = w.re;
            argmin_re = z;
        }
    }
    let is_pick_on_grid = min_im >= -PICK_TOL;
    Ok(PickReport {
        function: f.label(),
        grid_spec: *grid_spec,
        grid,
        min_im,
        min_re,
        argmin_im,
        argmin_re,
        is_pick_on_grid,
        is_first_quadrant_on_grid: is_pick_on_grid && min_re >= -PICK_TOL,
    })
}

/// Order-`n` monotonicity of `f ∘ g` on `g`'s domain (lower end lifted to
/// [`EDGE_EPS`]), reported next to the upper half-plane scan of `g` so both
/// sides of the composition criterion can be compared.
pub fn composition_monotone_check(
    f: &ScalarFunctionSpec,
    g: &ScalarFunctionSpec,
    n: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<SuiteReport> {
    if !(f.has(ClassTag::OperatorConvex) && f.has(ClassTag::Fprime0Nonneg)) {
        return Err(Error::Precondition(format!(
            "`{}` must be tagged operator_convex and fprime0_nonneg",
            f.label()
        )));
    }
    if !g.has(ClassTag::NonnegOperatorMonotone) {
        return Err(Error::Precondition(format!(
            "`{}` must be tagged nonneg_operator_monotone",
            g.label()
        )));
    }
    let pick = pick_scan(g, &GridSpec::default())?;
    let composed = ScalarFunctionSpec::compose(f.clone(), g.clone());
    let mut report = order_n_monotone(&composed, n, trials, seed, &g.domain, tol)?;
    report.suite = "composition".into();
    let monotone = report.failures.is_empty();
    report.stat("g", g.label());
    report.stat("f", f.label());
    report.stat("g_first_quadrant", pick.is_first_quadrant_on_grid);
    report.stat("g_min_re", pick.min_re);
    report.stat("g_min_im", pick.min_im);
    report.stat("composition_monotone", monotone);
    Ok(report)
}
