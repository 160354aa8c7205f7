//! One verifier per operator inequality. Each returns a list of [`Check`]s,
//! one per certified PSD statement, which the suite drivers aggregate.
//!
//! Order checks `X ≤ Y` use the tolerance `tol · (1 + max(‖X‖₂, ‖Y‖₂))`, so
//! that a fixed `tol` means the same thing for small and large operands.

use serde::{Deserialize, Serialize};

use crate::catalog::{ClassTag, ScalarFunctionSpec};
use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::hermitian::{psd_check, psd_check_scaled, resolvent_product, symmetrized_product, HermitianMatrix};
use crate::matrix::Matrix;
use crate::sampler::resolution_defect;

/// `1 + 2√2`, the admissible spread of the spectral window in the
/// isometry inequality.
pub const HANSEN_RATIO: f64 = 1.0 + 2.0 * std::f64::consts::SQRT_2;
/// Isometries and resolutions of the identity must be exact to this.
pub const FAMILY_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn scalar(label: impl Into<String>, margin: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            min_eigenvalue: margin,
            tolerance,
            passed: margin >= -tolerance,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Certifies `lower ≤ upper`.
pub fn order_check(
    label: impl Into<String>,
    lower: &HermitianMatrix,
    upper: &HermitianMatrix,
    tol: f64,
) -> Result<Check> {
    let scale = 1.0 + lower.spectral_norm()?.max(upper.spectral_norm()?);
    let cert = psd_check(&upper.sub(lower)?, tol * scale)?;
    Ok(Check {
        label: label.into(),
        min_eigenvalue: cert.min_eigenvalue,
        tolerance: cert.tolerance_used,
        passed: cert.is_positive(),
    })
}

fn require_psd(name: &str, m: &HermitianMatrix, tol: f64) -> Result<()> {
    let cert = psd_check_scaled(m, tol)?;
    if cert.is_positive() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{name} must be PSD, min eigenvalue {:e}",
            cert.min_eigenvalue
        )))
    }
}

fn require_leq(lower: &str, upper: &str, a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<()> {
    let c = order_check("order", a, b, tol)?;
    if c.passed {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{lower} <= {upper} fails, min eigenvalue {:e}",
            c.min_eigenvalue
        )))
    }
}

fn require_tags(f: &ScalarFunctionSpec, tags: &[ClassTag]) -> Result<()> {
    match tags.iter().find(|t| !f.has(**t)) {
        None => Ok(()),
        Some(t) => Err(Error::Precondition(format!("`{}` is not tagged {t:?}", f.label()))),
    }
}

fn require_exponent(p: f64) -> Result<()> {
    if (0.0..=0.5).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("exponent p must be in [0, 1/2], got {p}")))
    }
}

fn power(a: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    if p == 0.0 {
        Ok(HermitianMatrix::identity(a.dim()))
    } else {
        a.power(p)
    }
}

// ---------------------------------------------------------------------------
// Subadditivity

/// `f(A+B) ≤ f(A) + f(B)` for every `f` in `fs`, given `A, B ≥ 0` and
/// `AB + BA ≥ 0`.
pub fn verify_subadditivity_forward(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    fs: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    require_psd("A", a, tol)?;
    require_psd("B", b, tol)?;
    require_psd("AB+BA", &symmetrized_product(a, b)?, tol)?;
    subadditivity_margins(a, b, fs, tol)
}

/// The forward checks without hypothesis checks.
pub fn subadditivity_margins(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    fs: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    let sum = a.add(b)?;
    fs.iter()
        .map(|f| {
            require_tags(f, &[ClassTag::NonnegOperatorMonotone])?;
            let rhs = f.apply(a)?.add(&f.apply(b)?)?;
            order_check(f.label(), &f.apply(&sum)?, &rhs, tol)
        })
        .collect()
}

/// `2^k` for `k = -5..=25`.
pub fn default_lambda_grid() -> Vec<f64> {
    (-5..=25).map(|k| 2f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaProbe {
    pub lambda: f64,
    /// `λ_min(f_λ(A) + f_λ(B) − f_λ(A+B))`.
    pub defect_min: f64,
    /// `λ_min(AB + BA + B X_λ B + A Y_λ A)`; congruent to the defect.
    pub congruent_min: f64,
    pub congruent_tolerance: f64,
    /// `‖B X_λ B + A Y_λ A‖₂`.
    pub residual_norm: f64,
    /// `(‖A‖‖B‖² + ‖A‖²‖B‖)/λ`.
    pub residual_bound: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseOutcome {
    pub s_min: f64,
    pub probes: Vec<LambdaProbe>,
    /// `λ` with the most negative defect among violated probes.
    pub violation: Option<f64>,
    pub worst_defect: f64,
    pub residual_decay_monotone: bool,
}

/// Scans `f_λ` subadditivity along `grid`. With `X_λ = A(A+λ)^{-1}`,
/// `Y_λ = B(B+λ)^{-1}` and `T = λ + A + B`,
///
/// ```text
/// T (f_λ(A) + f_λ(B) − f_λ(A+B)) T = λ (AB + BA + B X_λ B + A Y_λ A)
/// ```
///
/// so the defect and the right-hand side have the same inertia. A probe is
/// violated when either the defect drops below `-tol` or the congruent form
/// fails its relative PSD check; the latter stays well conditioned when the
/// defect itself is of order `1/λ`.
pub fn converse_search(a: &HermitianMatrix, b: &HermitianMatrix, grid: &[f64], tol: f64) -> Result<ConverseOutcome> {
    require_psd("A", a, tol)?;
    require_psd("B", b, tol)?;
    let s = symmetrized_product(a, b)?;
    let s_spec = s.eigh()?;
    let s_norm = s_spec.min().abs().max(s_spec.max().abs());
    if !(s_spec.min() < -10.0 * tol * (1.0 + s_norm)) {
        return Err(Error::Precondition(format!(
            "AB+BA must be clearly indefinite, min eigenvalue {:e}",
            s_spec.min()
        )));
    }
    if grid.is_empty() || grid.iter().any(|l| !(*l > 0.0)) {
        return Err(Error::Parameter("lambda grid must be non-empty and positive".into()));
    }
    let (na, nb) = (a.spectral_norm()?, b.spectral_norm()?);
    let sum = a.add(b)?;
    let mut probes = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let f = ScalarFunctionSpec::f_lambda(lambda)?;
        let defect = f.apply(a)?.add(&f.apply(b)?)?.sub(&f.apply(&sum)?)?;
        let defect_min = defect.eigh()?.min();
        let x = resolvent_product(a, lambda)?;
        let y = resolvent_product(b, lambda)?;
        let residual = x.sandwich(b)?.add(&y.sandwich(a)?)?;
        let g = s.add(&residual)?;
        let cert = psd_check_scaled(&g, tol)?;
        probes.push(LambdaProbe {
            lambda,
            defect_min,
            congruent_min: cert.min_eigenvalue,
            congruent_tolerance: cert.tolerance_used,
            residual_norm: residual.spectral_norm()?,
            residual_bound: (na * nb * nb + na * na * nb) / lambda,
            violated: defect_min < -tol || !cert.is_positive(),
        });
    }
    let worst_defect = probes.iter().map(|p| p.defect_min).fold(f64::INFINITY, f64::min);
    let violation = probes
        .iter()
        .filter(|p| p.violated)
        .min_by(|x, y| x.defect_min.total_cmp(&y.defect_min))
        .map(|p| p.lambda);
    let mut sorted: Vec<&LambdaProbe> = probes.iter().collect();
    sorted.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
    let residual_decay_monotone = sorted
        .windows(2)
        .all(|w| w[1].residual_norm <= w[0].residual_norm * (1.0 + 1e-12) + 1e-15);
    Ok(ConverseOutcome {
        s_min: s_spec.min(),
        probes,
        violation,
        worst_defect,
        residual_decay_monotone,
    })
}

/// Like [`converse_search`], but an empty search is an error carrying the
/// defect spectrum at the largest `λ`.
pub fn verify_subadditivity_converse(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    grid: &[f64],
    tol: f64,
) -> Result<ConverseOutcome> {
    let outcome = converse_search(a, b, grid, tol)?;
    if outcome.violation.is_none() {
        let top = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let f = ScalarFunctionSpec::f_lambda(top)?;
        let defect = f.apply(a)?.add(&f.apply(b)?)?.sub(&f.apply(&a.add(b)?)?)?;
        return Err(Error::Inconclusive {
            spectrum: defect.eigh()?.eigenvalues,
        });
    }
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// Spectral windows

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub lo: f64,
    pub hi: f64,
}

impl SpectralWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi.is_finite()) {
            return Err(Error::Parameter(format!("invalid spectral window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Tightest window around the spectrum of `a`.
    pub fn of(a: &HermitianMatrix) -> Result<Self> {
        let s = a.eigh()?;
        Self::new(s.min().max(0.0), s.max().max(0.0))
    }

    pub fn spread(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_spectrum(&self, a: &HermitianMatrix, tol: f64) -> Result<bool> {
        let s = a.eigh()?;
        let slack = tol * (1.0 + self.hi);
        Ok(s.min() >= self.lo - slack && s.max() <= self.hi + slack)
    }

    fn require(&self, name: &str, a: &HermitianMatrix, tol: f64) -> Result<()> {
        if self.contains_spectrum(a, tol)? {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "spectrum of {name} leaves [{}, {}]",
                self.lo, self.hi
            )))
        }
    }
}

/// `mn − (M−m)(N−n)/8 ≤ ½(AB + BA)` for `m ≤ A ≤ M`, `n ≤ B ≤ N`.
pub fn verify_gustafson(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    wa: &SpectralWindow,
    wb: &SpectralWindow,
    tol: f64,
) -> Result<Vec<Check>> {
    wa.require("A", a, tol)?;
    wb.require("B", b, tol)?;
    let bound = wa.lo * wb.lo - wa.spread() * wb.spread() / 8.0;
    let half = symmetrized_product(a, b)?.scale(0.5);
    let floor = HermitianMatrix::scalar(a.dim(), bound);
    Ok(vec![order_check("gustafson", &floor, &half, tol)?])
}

/// Subadditivity under `(M−m)(N−n) ≤ 8mn`, routed through the bound above.
pub fn verify_window_subadditivity(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    wa: &SpectralWindow,
    wb: &SpectralWindow,
    fs: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    let lhs = wa.spread() * wb.spread();
    let rhs = 8.0 * wa.lo * wb.lo;
    if !(lhs <= rhs * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!(
            "window condition (M-m)(N-n) <= 8mn fails: {lhs} > {rhs}"
        )));
    }
    let mut checks = verify_gustafson(a, b, wa, wb, tol)?;
    checks.extend(verify_subadditivity_forward(a, b, fs, tol)?);
    Ok(checks)
}

// ---------------------------------------------------------------------------
// Power splitting

/// With `S₁ = (Bᵖ+Aᵖ)/2` and `S₂ = (Bᵖ−Aᵖ)/2`, certifies
/// `f(Bᵖ) ≤ f(S₁) + f(S₂)` for each `f`, together with the identity
/// `2(S₁S₂ + S₂S₁) = B^{2p} − A^{2p}` and positivity of `S₁S₂ + S₂S₁`.
pub fn verify_power_split(
    lower: &HermitianMatrix,
    upper: &HermitianMatrix,
    p: f64,
    fs: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    require_exponent(p)?;
    require_psd("A", lower, tol)?;
    require_leq("A", "B", lower, upper, tol)?;
    let ap = power(lower, p)?;
    let bp = power(upper, p)?;
    let s1 = bp.add(&ap)?.scale(0.5);
    let s2 = bp.sub(&ap)?.scale(0.5);
    let engine = symmetrized_product(&s1, &s2)?;
    let target = power(upper, 2.0 * p)?.sub(&power(lower, 2.0 * p)?)?;
    let scale = 1.0 + target.frobenius_norm() + bp.frobenius_norm().powi(2);
    let residual = engine.scale(2.0).sub(&target)?.frobenius_norm();
    let mut checks = vec![Check::scalar("engine_identity", -residual, 1e-10 * scale), {
        let cert = psd_check_scaled(&engine, tol)?;
        Check {
            label: "engine_positive".into(),
            min_eigenvalue: cert.min_eigenvalue,
            tolerance: cert.tolerance_used,
            passed: cert.is_positive(),
        }
    }];
    for f in fs {
        require_tags(f, &[ClassTag::NonnegOperatorMonotone])?;
        let rhs = f.apply(&s1)?.add(&f.apply(&s2)?)?;
        checks.push(order_check(f.label(), &f.apply(&bp)?, &rhs, tol)?);
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------
// Isometries and dilations

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionFamily {
    pub blocks: Vec<Matrix>,
    pub resolution_defect: f64,
}

impl ContractionFamily {
    pub fn new(blocks: Vec<Matrix>) -> Result<Self> {
        let cols = blocks
            .first()
            .map(Matrix::cols)
            .ok_or_else(|| Error::Shape("empty family".into()))?;
        if blocks.iter().any(|c| c.cols() != cols) {
            return Err(Error::Shape("family blocks must share a column dimension".into()));
        }
        let resolution_defect = resolution_defect(&blocks)?;
        Ok(Self {
            blocks,
            resolution_defect,
        })
    }

    pub fn isometry(c: Matrix) -> Result<Self> {
        Self::new(vec![c])
    }

    pub fn cols(&self) -> usize {
        self.blocks[0].cols()
    }

    pub fn require_resolution(&self) -> Result<()> {
        if self.resolution_defect <= FAMILY_TOL {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "sum of C_i* C_i differs from I by {:e}",
                self.resolution_defect
            )))
        }
    }
}

/// Unitary dilations of an isometry `C` (`n×k`, `C*C = I`):
///
/// ```text
/// U = [[C,  D], [0, −C*]]     V = [[C, −D], [0, C*]]     D = (I − CC*)^{1/2}
/// ```
///
/// Both are square of size `n + k`, with the first block column of width `k`.
pub fn build_dilation(c: &Matrix) -> Result<(Matrix, Matrix)> {
    let (n, k) = (c.rows(), c.cols());
    let defect = c.adjoint().matmul(c)?.identity_defect();
    if !(defect <= FAMILY_TOL) {
        return Err(Error::Precondition(format!(
            "C is not an isometry: ‖C*C − I‖ = {defect:e}"
        )));
    }
    // I − CC* is an orthogonal projection, hence its own square root. Taking
    // the spectral square root instead turns O(ε) eigenvalues into O(√ε) noise.
    let cc = HermitianMatrix::symmetrized(c.matmul(&c.adjoint())?);
    let d = HermitianMatrix::identity(n).sub(&cc)?.into_matrix();
    let mut u = Matrix::zeros(n + k, k + n);
    let mut v = Matrix::zeros(n + k, k + n);
    u.set_block(0, 0, c);
    u.set_block(0, k, &d);
    u.set_block(n, k, &c.adjoint().scale(-1.0));
    v.set_block(0, 0, c);
    v.set_block(0, k, &d.scale(-1.0));
    v.set_block(n, k, &c.adjoint());
    Ok((u, v))
}

/// Checks unitarity of both dilations and that the leading `k×k` block of
/// `U*(X/2)U + V*(X/2)V` equals `C*AC`, with `X = A ⊕ X₂`.
pub fn dilation_checks(c: &Matrix, a: &HermitianMatrix) -> Result<Vec<Check>> {
    let (u, v) = build_dilation(c)?;
    let k = c.cols();
    let x2 = if c.is_square() { a.clone() } else { a.congruence(c)? };
    let x = HermitianMatrix::direct_sum(&[a, &x2]).scale(0.5);
    let ux = x.congruence(&u)?;
    let vx = x.congruence(&v)?;
    let lead = ux.add(&vx)?.as_matrix().block(0, 0, k, k);
    let target = a.congruence(c)?;
    let scale = 1.0 + a.frobenius_norm();
    Ok(vec![
        Check::scalar("unitary_u", -u.adjoint().matmul(&u)?.identity_defect(), UNITARY_TOL),
        Check::scalar("unitary_v", -v.adjoint().matmul(&v)?.identity_defect(), UNITARY_TOL),
        Check::scalar(
            "block_identity",
            -lead.try_sub(target.as_matrix())?.frobenius_norm(),
            UNITARY_TOL * scale,
        ),
    ])
}

fn require_hansen_window(w: &SpectralWindow) -> Result<()> {
    if w.lo > 0.0 && w.hi <= HANSEN_RATIO * w.lo * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "window [{}, {}] exceeds the ratio 1 + 2√2",
            w.lo, w.hi
        )))
    }
}

/// `f(ΣCᵢ*AᵢCᵢ) ≤ 2ΣCᵢ*f(Aᵢ/2)Cᵢ` without hypothesis checks.
pub fn hansen_margin(
    label: impl Into<String>,
    blocks: &[Matrix],
    operands: &[&HermitianMatrix],
    f: &ScalarFunctionSpec,
    tol: f64,
) -> Result<Check> {
    if blocks.len() != operands.len() {
        return Err(Error::DimensionMismatch {
            left: (blocks.len(), 1),
            right: (operands.len(), 1),
        });
    }
    let k = blocks[0].cols();
    let mut inner = HermitianMatrix::zeros(k);
    let mut rhs = HermitianMatrix::zeros(k);
    for (c, a) in blocks.iter().zip(operands) {
        inner = inner.add(&a.congruence(c)?)?;
        rhs = rhs.add(&f.apply(&a.scale(0.5))?.congruence(c)?.scale(2.0))?;
    }
    order_check(label, &f.apply(&inner)?, &rhs, tol)
}

/// `f(C*AC) ≤ 2C*f(A/2)C` for an isometry `C`, spectrum of `A` in a window
/// `[λ, (1+2√2)λ]`. Also runs the dilation checks.
pub fn verify_hansen_isometry(
    a: &HermitianMatrix,
    c: &Matrix,
    window: &SpectralWindow,
    fs: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    require_hansen_window(window)?;
    window.require("A", a, tol)?;
    let mut checks = dilation_checks(c, a)?;
    checks.extend(explore_hansen_isometry(a, c, fs, tol)?);
    Ok(checks)
}

/// The isometry inequality without the window hypothesis.
pub fn explore_hansen_isometry(
    a: &HermitianMatrix,
    c: &Matrix,
    fs: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    fs.iter()
        .map(|f| {
            require_tags(f, &[ClassTag::NonnegOperatorMonotone])?;
            hansen_margin(f.label(), std::slice::from_ref(c), &[a], f, tol)
        })
        .collect()
}

/// Family form over a resolution of the identity. Two readings are checked
/// per function: `per_index` uses `f(Aᵢ/2)` with each `Aᵢ`, and `literal`
/// uses a single operator `A = A₁` in every slot.
pub fn verify_hansen_family(
    operands: &[HermitianMatrix],
    family: &ContractionFamily,
    window: &SpectralWindow,
    fs: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    require_hansen_window(window)?;
    family.require_resolution()?;
    for (i, a) in operands.iter().enumerate() {
        window.require(&format!("A_{}", i + 1), a, tol)?;
    }
    let per_index: Vec<&HermitianMatrix> = operands.iter().collect();
    let literal: Vec<&HermitianMatrix> = vec![&operands[0]; operands.len()];
    let mut checks = Vec::new();
    for f in fs {
        require_tags(f, &[ClassTag::NonnegOperatorMonotone])?;
        checks.push(hansen_margin(
            format!("{}:per_index", f.label()),
            &family.blocks,
            &per_index,
            f,
            tol,
        )?);
        checks.push(hansen_margin(
            format!("{}:literal", f.label()),
            &family.blocks,
            &literal,
            f,
            tol,
        )?);
    }
    Ok(checks)
}

/// `f(Σwᵢ Aᵢ) ≤ 2Σ f(wᵢ/2) Aᵢ` for `ΣAᵢ = I`, `Aᵢ ≥ 0` and scalar weights
/// in the closed interval `[λ, (1+2√2)λ]`. The operators are given through
/// their square roots `Cᵢ = Aᵢ^{1/2}`.
pub fn verify_hansen_weights(
    roots: &ContractionFamily,
    weights: &[f64],
    window: &SpectralWindow,
    fs: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    require_hansen_window(window)?;
    roots.require_resolution()?;
    if weights.len() != roots.blocks.len() {
        return Err(Error::Shape(format!(
            "{} weights for {} blocks",
            weights.len(),
            roots.blocks.len()
        )));
    }
    let slack = tol * (1.0 + window.hi);
    if let Some(w) = weights
        .iter()
        .find(|w| **w < window.lo - slack || **w > window.hi + slack)
    {
        return Err(Error::Precondition(format!(
            "weight {w} outside [{}, {}]",
            window.lo, window.hi
        )));
    }
    let k = roots.cols();
    let parts: Vec<HermitianMatrix> = roots
        .blocks
        .iter()
        .map(|c| HermitianMatrix::identity(c.rows()).congruence(c))
        .collect::<Result<_>>()?;
    fs.iter()
        .map(|f| {
            require_tags(f, &[ClassTag::NonnegOperatorMonotone])?;
            let mut mixed = HermitianMatrix::zeros(k);
            let mut rhs = HermitianMatrix::zeros(k);
            for (part, &w) in parts.iter().zip(weights) {
                mixed = mixed.add(&part.scale(w))?;
                rhs = rhs.add(&part.scale(2.0 * f.eval(w / 2.0)))?;
            }
            order_check(format!("{}:weights", f.label()), &f.apply(&mixed)?, &rhs, tol)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Square order

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareBranch {
    /// `B² ≤ A²`; every convex `f` must satisfy `f(B) ≤ f(A)`.
    Forward,
    /// `B² ≰ A²`; `t²` itself is the witness.
    Converse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareOrderOutcome {
    pub branch: SquareBranch,
    pub checks: Vec<Check>,
}

/// Residual `‖S(A−B, A+B) − 2(A² − B²)‖_F` and the scale it is judged against.
pub fn square_identity_residual(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<(f64, f64)> {
    let (am, bm) = (a.as_matrix(), b.as_matrix());
    let d = am.try_sub(bm)?;
    let s = am.try_add(bm)?;
    let lhs = d.matmul(&s)?.try_add(&s.matmul(&d)?)?;
    let rhs = am.matmul(am)?.try_sub(&bm.matmul(bm)?)?.scale(2.0);
    let scale = 1.0 + (a.frobenius_norm() + b.frobenius_norm()).powi(2);
    Ok((lhs.try_sub(&rhs)?.frobenius_norm(), scale))
}

pub fn verify_square_order(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    fs_convex: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<SquareOrderOutcome> {
    require_psd("A", a, tol)?;
    require_psd("B", b, tol)?;
    let (residual, scale) = square_identity_residual(a, b)?;
    let mut checks = vec![Check::scalar("square_identity", -residual, IDENTITY_TOL * scale)];
    let squares = order_check("squares", &b.square(), &a.square(), tol)?;
    if squares.passed {
        for f in fs_convex {
            require_tags(f, &[ClassTag::OperatorConvex, ClassTag::Fprime0Nonneg])?;
            checks.push(order_check(f.label(), &f.apply(b)?, &f.apply(a)?, tol)?);
        }
        Ok(SquareOrderOutcome {
            branch: SquareBranch::Forward,
            checks,
        })
    } else {
        let t2 = ScalarFunctionSpec::t_squared();
        let witness = order_check("t_squared_witness", &t2.apply(b)?, &t2.apply(a)?, tol)?;
        checks.push(Check {
            passed: !witness.passed,
            ..witness
        });
        Ok(SquareOrderOutcome {
            branch: SquareBranch::Converse,
            checks,
        })
    }
}

// ---------------------------------------------------------------------------
// Powers

/// `f(Bᵖ) ≤ f(Aᵖ)` for `B ≤ A`, `p ∈ [0, 1/2]` and operator convex `f`
/// with `f'₊(0) ≥ 0`.
pub fn verify_power_monotone(
    lower: &HermitianMatrix,
    upper: &HermitianMatrix,
    p: f64,
    fs_convex: &[ScalarFunctionSpec],
    tol: f64,
) -> Result<Vec<Check>> {
    require_exponent(p)?;
    require_psd("B", lower, tol)?;
    require_leq("B", "A", lower, upper, tol)?;
    let bp = power(lower, p)?;
    let ap = power(upper, p)?;
    fs_convex
        .iter()
        .map(|f| {
            require_tags(f, &[ClassTag::OperatorConvex, ClassTag::Fprime0Nonneg])?;
            order_check(f.label(), &f.apply(&bp)?, &f.apply(&ap)?, tol)
        })
        .collect()
}

fn pow_scalar(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        t.powf(p)
    }
}

/// For `B ≤ A`, `p ∈ [0, 1/2]` and non-negative operator monotone `f`:
/// (i) `Bᵖf(Bᵖ) ≤ Aᵖf(Aᵖ)`, and (ii) `A^{p−1}f(Aᵖ) ≤ B^{p−1}f(Bᵖ)` when both
/// operators are invertible and `f > 0` on `(0, ∞)`. When (ii)'s hypotheses
/// fail it is skipped, or reported as a precondition error if `require_ii`.
pub fn verify_tf_corollary(
    lower: &HermitianMatrix,
    upper: &HermitianMatrix,
    p: f64,
    f: &ScalarFunctionSpec,
    tol: f64,
    require_ii: bool,
) -> Result<Vec<Check>> {
    require_exponent(p)?;
    require_tags(f, &[ClassTag::NonnegOperatorMonotone])?;
    require_psd("B", lower, tol)?;
    require_leq("B", "A", lower, upper, tol)?;
    let first = |t: f64| {
        let tp = pow_scalar(t, p);
        tp * f.eval(tp)
    };
    let nonneg = Interval::nonnegative();
    let label = f.label();
    let mut checks = vec![order_check(
        format!("{label}:i"),
        &lower.apply_on_domain(&label, &nonneg, first)?,
        &upper.apply_on_domain(&label, &nonneg, first)?,
        tol,
    )?];

    let floor = 10.0 * tol * (1.0 + upper.spectral_norm()?);
    let invertible = lower.eigh()?.min() > floor;
    let positive = [1e-6, 1e-3, 1.0, 1e3].iter().all(|&t| f.eval(t) > 0.0);
    if invertible && positive {
        let second = |t: f64| pow_scalar(t, p - 1.0) * f.eval(pow_scalar(t, p));
        let pos = Interval::positive();
        checks.push(order_check(
            format!("{label}:ii"),
            &upper.apply_on_domain(&label, &pos, second)?,
            &lower.apply_on_domain(&label, &pos, second)?,
            tol,
        )?);
    } else if require_ii {
        return Err(Error::Precondition(if invertible {
            format!("`{label}` is not strictly positive on (0, inf)")
        } else {
            format!("B is not invertible beyond {floor:e}")
        }));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup_selector, monotone_subset};
    use num_complex::Complex64;

    fn h(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn sel(s: &str) -> ScalarFunctionSpec {
        lookup_selector(s).unwrap()
    }

    fn example_pair() -> (HermitianMatrix, HermitianMatrix) {
        (h(&[&[1.0, 0.0], &[0.0, 0.0]]), h(&[&[1.0, 1.0], &[1.0, 1.0]]))
    }

    #[test]
    fn forward_identity_margin() {
        let i = HermitianMatrix::identity(2);
        let checks = verify_subadditivity_forward(&i, &i, &[sel("f_lambda:lambda=1")], 1e-8).unwrap();
        assert!((checks[0].min_eigenvalue - 1.0 / 3.0).abs() < 1e-12);
        assert!(checks[0].passed);
    }

    #[test]
    fn forward_commuting_sqrt() {
        let checks = verify_subadditivity_forward(
            &HermitianMatrix::diag(&[1.0, 2.0]),
            &HermitianMatrix::diag(&[2.0, 1.0]),
            &[sel("power:p=0.5")],
            1e-8,
        )
        .unwrap();
        let margin = 1.0 + 2f64.sqrt() - 3f64.sqrt();
        assert!((checks[0].min_eigenvalue - margin).abs() < 1e-12);
    }

    #[test]
    fn forward_rejects_indefinite_product() {
        let (a, b) = example_pair();
        assert!(matches!(
            verify_subadditivity_forward(&a, &b, &monotone_subset(), 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn converse_on_example_pair() {
        let (a, b) = example_pair();
        let grid: Vec<f64> = (0..=20).map(|k| 2f64.powi(k)).collect();
        let out = verify_subadditivity_converse(&a, &b, &grid, 1e-8).unwrap();
        assert!(out.violation.is_some());
        assert!(out.worst_defect < -1e-8);
        assert!(out.residual_decay_monotone);
        for p in &out.probes {
            assert!(p.residual_norm <= p.residual_bound * (1.0 + 1e-12));
        }
        let last = out.probes.last().unwrap();
        assert!(last.residual_norm <= 1e-4 * (2.0 + 4.0));
    }

    #[test]
    fn converse_requires_indefinite_product() {
        let i = HermitianMatrix::identity(2);
        assert!(matches!(
            verify_subadditivity_converse(&i, &i, &default_lambda_grid(), 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn converse_inconclusive_on_short_grid() {
        // A mildly non-commuting pair: AB + BA is indefinite, yet f_λ stays
        // subadditive for small λ.
        let (c, s) = (1f64.cos(), 1f64.sin());
        let a = HermitianMatrix::diag(&[1.0, 0.1]);
        let b = h(&[&[c * c + 0.1 * s * s, 0.9 * c * s], &[0.9 * c * s, s * s + 0.1 * c * c]]);
        assert!(symmetrized_product(&a, &b).unwrap().eigh().unwrap().min() < -0.05);
        let err = verify_subadditivity_converse(&a, &b, &[1e-3], 1e-8).unwrap_err();
        assert!(matches!(err, Error::Inconclusive { spectrum } if spectrum.len() == 2));
        let out = verify_subadditivity_converse(&a, &b, &default_lambda_grid(), 1e-8).unwrap();
        assert!(out.violation.unwrap() > 1e-3);
    }

    #[test]
    fn gustafson_examples() {
        let i = HermitianMatrix::identity(2);
        let w = SpectralWindow::new(1.0, 1.0).unwrap();
        let c = verify_gustafson(&i, &i, &w, &w, 1e-8).unwrap();
        assert!(c[0].min_eigenvalue.abs() < 1e-12 && c[0].passed);

        let (a, b) = example_pair();
        let c = verify_gustafson(
            &a,
            &b,
            &SpectralWindow::new(0.0, 1.0).unwrap(),
            &SpectralWindow::new(0.0, 2.0).unwrap(),
            1e-8,
        )
        .unwrap();
        let expected = (1.0 - 2f64.sqrt()) / 2.0 + 0.25;
        assert!((c[0].min_eigenvalue - expected).abs() < 1e-12);
        assert!(c[0].passed);
    }

    #[test]
    fn gustafson_window_violation() {
        let a = HermitianMatrix::diag(&[1.0, 5.0]);
        let w = SpectralWindow::new(0.0, 2.0).unwrap();
        assert!(matches!(
            verify_gustafson(&a, &a, &w, &w, 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn window_condition_enforced() {
        let a = HermitianMatrix::diag(&[1.0, 3.0]);
        let w = SpectralWindow::new(1.0, 3.0).unwrap();
        let checks = verify_window_subadditivity(&a, &a, &w, &w, &monotone_subset(), 1e-8).unwrap();
        assert!(all_passed(&checks));
        let z = SpectralWindow::new(0.0, 1.0).unwrap();
        let s = HermitianMatrix::diag(&[0.5, 0.5]);
        assert!(matches!(
            verify_window_subadditivity(&s, &s, &z, &z, &monotone_subset(), 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn power_split_examples() {
        let b = HermitianMatrix::diag(&[4.0, 1.0]);
        let checks = verify_power_split(&b, &b, 0.3, &monotone_subset(), 1e-8).unwrap();
        assert!(all_passed(&checks));

        let a = HermitianMatrix::identity(2);
        let checks = verify_power_split(&a, &b, 0.5, &[sel("power:p=0.5")], 1e-8).unwrap();
        // diag entries: √2 vs √1.5 + √0.5 on the first, 1 vs 1 on the second.
        let margin = (1.5f64.sqrt() + 0.5f64.sqrt() - 2f64.sqrt()).min(0.0);
        assert!((checks[2].min_eigenvalue - margin).abs() < 1e-12);
        assert!(all_passed(&checks));
        assert!(matches!(
            verify_power_split(&b, &a, 0.5, &[], 1e-8),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            verify_power_split(&a, &b, 0.7, &[], 1e-8),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn dilation_of_identity() {
        let (u, v) = build_dilation(&Matrix::identity(2)).unwrap();
        let mut eu = Matrix::identity(4);
        eu[(2, 2)] = Complex64::new(-1.0, 0.0);
        eu[(3, 3)] = Complex64::new(-1.0, 0.0);
        assert!((&u - &eu).max_abs() < 1e-15);
        assert!((&v - &Matrix::identity(4)).max_abs() < 1e-15);
    }

    #[test]
    fn dilation_of_column_embedding() {
        let c = Matrix::from_real_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let (u, _) = build_dilation(&c).unwrap();
        let d = u.block(0, 1, 2, 2);
        assert!((&d - &Matrix::diag_real(&[0.0, 1.0])).max_abs() < 1e-15);
        let a = HermitianMatrix::diag(&[2.0, 3.0]);
        assert!(all_passed(&dilation_checks(&c, &a).unwrap()));
        assert!(build_dilation(&Matrix::diag_real(&[1.0, 0.5])).is_err());
    }

    #[test]
    fn hansen_unitary_reduces_to_scalar() {
        let a = HermitianMatrix::diag(&[1.0, 2.5]);
        let w = SpectralWindow::new(1.0, HANSEN_RATIO).unwrap();
        let f = sel("power:p=0.5");
        let checks = verify_hansen_isometry(&a, &Matrix::identity(2), &w, std::slice::from_ref(&f), 1e-8).unwrap();
        let margin = [1.0f64, 2.5]
            .iter()
            .map(|t| 2.0 * f.eval(t / 2.0) - f.eval(*t))
            .fold(f64::INFINITY, f64::min);
        assert!((checks.last().unwrap().min_eigenvalue - margin).abs() < 1e-12);
        assert!(all_passed(&checks));
    }

    #[test]
    fn hansen_window_enforced() {
        let a = HermitianMatrix::diag(&[1.0, 5.0]);
        let w = SpectralWindow::new(1.0, 5.0).unwrap();
        assert!(matches!(
            verify_hansen_isometry(&a, &Matrix::identity(2), &w, &monotone_subset(), 1e-8),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn square_order_branches() {
        let a = HermitianMatrix::diag(&[2.0, 4.0]);
        let out = verify_square_order(&a, &a.scale(0.5), &crate::catalog::convex_subset(), 1e-8).unwrap();
        assert_eq!(out.branch, SquareBranch::Forward);
        assert!(all_passed(&out.checks));

        let out = verify_square_order(
            &HermitianMatrix::diag(&[2.0, 1.0]),
            &HermitianMatrix::diag(&[1.0, 2.0]),
            &crate::catalog::convex_subset(),
            1e-8,
        )
        .unwrap();
        assert_eq!(out.branch, SquareBranch::Converse);
        assert!(all_passed(&out.checks));
    }

    #[test]
    fn power_monotone_edges() {
        let a = HermitianMatrix::diag(&[3.0, 2.0]);
        let b = HermitianMatrix::diag(&[1.0, 2.0]);
        let t2 = sel("t_squared");
        let c = verify_power_monotone(&b, &a, 0.5, std::slice::from_ref(&t2), 1e-8).unwrap();
        assert!((c[0].min_eigenvalue - 0.0).abs() < 1e-12);
        let c = verify_power_monotone(&b, &a, 0.0, &[t2], 1e-8).unwrap();
        assert!(c[0].min_eigenvalue.abs() < 1e-15);
    }

    #[test]
    fn tf_corollary_constant() {
        let a = HermitianMatrix::diag(&[3.0, 2.0]);
        let b = HermitianMatrix::diag(&[1.0, 2.0]);
        let one = sel("constant:c=1");
        let c = verify_tf_corollary(&b, &a, 0.5, &one, 1e-8, true).unwrap();
        assert_eq!(c.len(), 2);
        assert!((c[0].min_eigenvalue - 0.0).abs() < 1e-12);
        assert!((c[1].min_eigenvalue - 0.0).abs() < 1e-12);
        assert!(all_passed(&c));
        let singular = HermitianMatrix::diag(&[0.0, 1.0]);
        assert!(verify_tf_corollary(&singular, &a, 0.5, &one, 1e-8, true).is_err());
        assert_eq!(
            verify_tf_corollary(&singular, &a, 0.5, &one, 1e-8, false)
                .unwrap()
                .len(),
            1
        );
    }
}
