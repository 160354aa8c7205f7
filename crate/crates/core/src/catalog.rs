//! The scalar function catalog.
//!
//! Each [`ScalarFunctionSpec`] bundles real evaluation, derivative, the
//! principal-branch continuation to the upper half-plane, class tags and, when
//! known, an [`IntegralRepresentation`]. Entries are addressed by an id plus
//! parameters, e.g. `power:p=0.5` or `t_times_f_lambda:lambda=10`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::Interval;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::representation::{Density, IntegralRepresentation, KernelKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassTag {
    NonnegOperatorMonotone,
    OperatorConvex,
    /// Right derivative at 0 exists, is finite and non-negative.
    Fprime0Nonneg,
    Nonneg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKind {
    /// `λt/(λ+t)`
    FLambda { lambda: f64 },
    /// `t^p`, principal branch; `p = 0` is the constant 1.
    Power { p: f64 },
    /// `log(1+t)`
    Log1p,
    /// `t²`
    TSquared,
    /// `λt²/(λ+t)`
    ConvexKernel { lambda: f64 },
    /// `c + βt`
    Affine { c: f64, beta: f64 },
    /// `max(t - a, 0)`; no analytic continuation.
    Hinge { a: f64 },
    /// `t·f(t)`
    TimesT { inner: Box<ScalarFunctionSpec> },
    /// `outer(inner(t))`
    Compose {
        outer: Box<ScalarFunctionSpec>,
        inner: Box<ScalarFunctionSpec>,
    },
    /// `left(t)·right(t)`
    Product {
        left: Box<ScalarFunctionSpec>,
        right: Box<ScalarFunctionSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarFunctionSpec {
    pub id: String,
    pub params: BTreeMap<String, f64>,
    pub domain: Interval,
    pub class_tags: BTreeSet<ClassTag>,
    pub kind: FunctionKind,
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn tags(list: &[ClassTag]) -> BTreeSet<ClassTag> {
    list.iter().copied().collect()
}

impl ScalarFunctionSpec {
    pub fn f_lambda(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!("f_lambda needs lambda > 0, got {lambda}")));
        }
        use ClassTag::*;
        Ok(Self {
            id: "f_lambda".into(),
            params: params(&[("lambda", lambda)]),
            domain: Interval::nonnegative(),
            class_tags: tags(&[NonnegOperatorMonotone, Nonneg, Fprime0Nonneg]),
            kind: FunctionKind::FLambda { lambda },
        })
    }

    /// `t^p`. Class tags follow the exponent: `[0,1]` monotone, `[1,2]`
    /// convex on `[0,∞)`, `[-1,0)` convex on `(0,∞)`.
    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::Parameter(format!("power needs a finite exponent, got {p}")));
        }
        Ok(Self::power_with_id("power", p, params(&[("p", p)])))
    }

    /// `t^{2p}`, kept as its own id since the corollaries quote it that way.
    pub fn double_power(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::Parameter(format!("double_power needs finite p, got {p}")));
        }
        Ok(Self::power_with_id("double_power", 2.0 * p, params(&[("p", p)])))
    }

    fn power_with_id(id: &str, p: f64, params: BTreeMap<String, f64>) -> Self {
        use ClassTag::*;
        let mut t = BTreeSet::new();
        let domain = if p >= 0.0 {
            Interval::nonnegative()
        } else {
            Interval::positive()
        };
        t.insert(Nonneg);
        if (0.0..=1.0).contains(&p) {
            t.insert(NonnegOperatorMonotone);
        }
        if (1.0..=2.0).contains(&p) || (-1.0..0.0).contains(&p) || p == 0.0 {
            t.insert(OperatorConvex);
        }
        if p == 0.0 || p >= 1.0 {
            t.insert(Fprime0Nonneg);
        }
        Self {
            id: id.into(),
            params,
            domain,
            class_tags: t,
            kind: FunctionKind::Power { p },
        }
    }

    pub fn log1p() -> Self {
        use ClassTag::*;
        Self {
            id: "log1p".into(),
            params: BTreeMap::new(),
            domain: Interval::nonnegative(),
            class_tags: tags(&[NonnegOperatorMonotone, Nonneg, Fprime0Nonneg]),
            kind: FunctionKind::Log1p,
        }
    }

    pub fn t_squared() -> Self {
        use ClassTag::*;
        Self {
            id: "t_squared".into(),
            params: BTreeMap::new(),
            domain: Interval::nonnegative(),
            class_tags: tags(&[OperatorConvex, Fprime0Nonneg, Nonneg]),
            kind: FunctionKind::TSquared,
        }
    }

    pub fn convex_kernel(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!(
                "convex_kernel needs lambda > 0, got {lambda}"
            )));
        }
        use ClassTag::*;
        Ok(Self {
            id: "convex_kernel".into(),
            params: params(&[("lambda", lambda)]),
            domain: Interval::nonnegative(),
            class_tags: tags(&[OperatorConvex, Fprime0Nonneg, Nonneg]),
            kind: FunctionKind::ConvexKernel { lambda },
        })
    }

    pub fn affine(c: f64, beta: f64) -> Self {
        use ClassTag::*;
        let mut t = tags(&[OperatorConvex]);
        if beta >= 0.0 {
            t.insert(Fprime0Nonneg);
            if c >= 0.0 {
                t.insert(Nonneg);
                t.insert(NonnegOperatorMonotone);
            }
        }
        Self {
            id: "affine".into(),
            params: params(&[("c", c), ("beta", beta)]),
            domain: Interval::nonnegative(),
            class_tags: t,
            kind: FunctionKind::Affine { c, beta },
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut f = Self::affine(c, 0.0);
        f.id = "constant".into();
        f.params = params(&[("c", c)]);
        f
    }

    pub fn hinge(a: f64) -> Self {
        Self {
            id: "hinge".into(),
            params: params(&[("a", a)]),
            domain: Interval::nonnegative(),
            class_tags: tags(&[ClassTag::Nonneg]),
            kind: FunctionKind::Hinge { a },
        }
    }

    /// `t·f(t)`; operator convex with `f'₊(0) = f(0) ≥ 0` when `f` is a
    /// non-negative operator monotone function on `[0,∞)`.
    pub fn times_t(inner: ScalarFunctionSpec) -> Self {
        use ClassTag::*;
        let mut t = BTreeSet::new();
        if inner.has(NonnegOperatorMonotone) && inner.domain.lo <= 0.0 && inner.domain.lo_closed {
            t.extend([OperatorConvex, Fprime0Nonneg, Nonneg]);
        } else if inner.has(Nonneg) {
            t.insert(Nonneg);
        }
        Self {
            id: format!("t_times_{}", inner.id),
            params: inner.params.clone(),
            domain: inner.domain.intersect(&Interval::nonnegative()),
            class_tags: t,
            kind: FunctionKind::TimesT { inner: Box::new(inner) },
        }
    }

    /// `outer ∘ inner`. No class tags are claimed for compositions.
    pub fn compose(outer: ScalarFunctionSpec, inner: ScalarFunctionSpec) -> Self {
        let mut class_tags = BTreeSet::new();
        if outer.has(ClassTag::Nonneg) {
            class_tags.insert(ClassTag::Nonneg);
        }
        Self {
            id: format!("compose({},{})", outer.label(), inner.label()),
            params: BTreeMap::new(),
            domain: inner.domain,
            class_tags,
            kind: FunctionKind::Compose {
                outer: Box::new(outer),
                inner: Box::new(inner),
            },
        }
    }

    pub fn product(left: ScalarFunctionSpec, right: ScalarFunctionSpec) -> Self {
        Self {
            id: format!("product({},{})", left.label(), right.label()),
            params: BTreeMap::new(),
            domain: left.domain.intersect(&right.domain),
            class_tags: BTreeSet::new(),
            kind: FunctionKind::Product {
                left: Box::new(left),
                right: Box::new(right),
            },
        }
    }

    pub fn has(&self, tag: ClassTag) -> bool {
        self.class_tags.contains(&tag)
    }

    /// `id:k=v,...` form, also accepted by [`lookup_selector`].
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.id.clone()
        } else {
            let kv: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{}:{}", self.id, kv.join(","))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            FunctionKind::FLambda { lambda } => lambda * t / (lambda + t),
            FunctionKind::Power { p } => {
                if *p == 0.0 {
                    1.0
                } else {
                    t.powf(*p)
                }
            }
            FunctionKind::Log1p => t.ln_1p(),
            FunctionKind::TSquared => t * t,
            FunctionKind::ConvexKernel { lambda } => lambda * t * t / (lambda + t),
            FunctionKind::Affine { c, beta } => c + beta * t,
            FunctionKind::Hinge { a } => (t - a).max(0.0),
            FunctionKind::TimesT { inner } => t * inner.eval(t),
            FunctionKind::Compose { outer, inner } => outer.eval(inner.eval(t)),
            FunctionKind::Product { left, right } => left.eval(t) * right.eval(t),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match &self.kind {
            FunctionKind::FLambda { lambda } => {
                let d = lambda + t;
                lambda * lambda / (d * d)
            }
            FunctionKind::Power { p } => {
                if *p == 0.0 {
                    0.0
                } else if t == 0.0 {
                    match p.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0,
                        _ => 0.0,
                    }
                } else {
                    p * t.powf(p - 1.0)
                }
            }
            FunctionKind::Log1p => 1.0 / (1.0 + t),
            FunctionKind::TSquared => 2.0 * t,
            FunctionKind::ConvexKernel { lambda } => {
                let d = lambda + t;
                lambda * t * (t + 2.0 * lambda) / (d * d)
            }
            FunctionKind::Affine { beta, .. } => *beta,
            FunctionKind::Hinge { a } => {
                if t > *a {
                    1.0
                } else {
                    0.0
                }
            }
            FunctionKind::TimesT { inner } => {
                if t == 0.0 {
                    inner.eval(0.0)
                } else {
                    inner.eval(t) + t * inner.deriv(t)
                }
            }
            FunctionKind::Compose { outer, inner } => outer.deriv(inner.eval(t)) * inner.deriv(t),
            FunctionKind::Product { left, right } => left.deriv(t) * right.eval(t) + left.eval(t) * right.deriv(t),
        }
    }

    /// Principal-branch continuation, defined off the branch cut `(-∞, 0]`
    /// for powers and logarithms.
    pub fn complex_eval(&self, z: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        Ok(match &self.kind {
            FunctionKind::FLambda { lambda } => z * *lambda / (z + *lambda),
            FunctionKind::Power { p } => {
                if *p == 0.0 {
                    one
                } else if z == Complex64::new(0.0, 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    z.powf(*p)
                }
            }
            FunctionKind::Log1p => (z + one).ln(),
            FunctionKind::TSquared => z * z,
            FunctionKind::ConvexKernel { lambda } => z * z * *lambda / (z + *lambda),
            FunctionKind::Affine { c, beta } => z * *beta + *c,
            FunctionKind::Hinge { .. } => return Err(Error::Unsupported(self.label())),
            FunctionKind::TimesT { inner } => z * inner.complex_eval(z)?,
            FunctionKind::Compose { outer, inner } => outer.complex_eval(inner.complex_eval(z)?)?,
            FunctionKind::Product { left, right } => left.complex_eval(z)? * right.complex_eval(z)?,
        })
    }

    /// Integral representation over `[0, ∞)`, when one is known.
    pub fn representation(&self) -> Option<IntegralRepresentation> {
        match &self.kind {
            FunctionKind::FLambda { lambda } => Some(IntegralRepresentation::atom(KernelKind::Monotone, *lambda, 1.0)),
            FunctionKind::Power { p } => power_representation(*p),
            FunctionKind::Log1p => Some(IntegralRepresentation {
                density: Some(Density {
                    coefficient: 1.0,
                    exponent: -2.0,
                    support_start: 1.0,
                }),
                ..IntegralRepresentation::empty(KernelKind::Monotone)
            }),
            FunctionKind::Affine { c, beta } if *beta >= 0.0 => Some(IntegralRepresentation {
                f0: *c,
                beta: *beta,
                ..IntegralRepresentation::empty(KernelKind::Monotone)
            }),
            FunctionKind::TSquared => Some(IntegralRepresentation {
                gamma: 1.0,
                ..IntegralRepresentation::empty(KernelKind::Convex)
            }),
            FunctionKind::ConvexKernel { lambda } => {
                Some(IntegralRepresentation::atom(KernelKind::Convex, *lambda, 1.0))
            }
            FunctionKind::TimesT { inner } => {
                // t·(f0 + βt + ∫ λt/(λ+t) dμ) = f0·t + βt² + ∫ λt²/(λ+t) dμ
                let rep = inner.representation()?;
                if rep.kind != KernelKind::Monotone {
                    return None;
                }
                Some(IntegralRepresentation {
                    kind: KernelKind::Convex,
                    f0: 0.0,
                    beta: rep.f0,
                    gamma: rep.beta,
                    atoms: rep.atoms,
                    density: rep.density,
                })
            }
            _ => None,
        }
    }

    /// Right derivative at 0, when 0 is in the domain.
    pub fn right_derivative_at_zero(&self) -> Option<f64> {
        self.domain.contains(0.0).then(|| self.deriv(0.0))
    }

    /// `f(A)` via the spectral decomposition of `A`.
    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        a.apply_on_domain(&self.label(), &self.domain, |t| self.eval(t))
    }
}

impl fmt::Display for ScalarFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `t^p = (sin pπ/π) ∫ λt/(λ+t) λ^{p-2} dλ` for `0 < p < 1`.
fn power_representation(p: f64) -> Option<IntegralRepresentation> {
    if p == 0.0 {
        return Some(IntegralRepresentation {
            f0: 1.0,
            ..IntegralRepresentation::empty(KernelKind::Monotone)
        });
    }
    if p == 1.0 {
        return Some(IntegralRepresentation {
            beta: 1.0,
            ..IntegralRepresentation::empty(KernelKind::Monotone)
        });
    }
    if p > 0.0 && p < 1.0 {
        return Some(IntegralRepresentation {
            density: Some(Density {
                coefficient: (p * PI).sin() / PI,
                exponent: p - 2.0,
                support_start: 0.0,
            }),
            ..IntegralRepresentation::empty(KernelKind::Monotone)
        });
    }
    None
}

/// `f(A)` for a catalog entry.
pub fn apply_function(f: &ScalarFunctionSpec, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    f.apply(a)
}

/// Value of the continuation at `z`, `Im z > 0`.
pub fn complex_sample(f: &ScalarFunctionSpec, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::Parameter(format!("complex_sample needs Im z > 0, got {z}")));
    }
    f.complex_eval(z)
}

/// The default catalog.
pub fn catalog_list() -> Vec<ScalarFunctionSpec> {
    let mut out = Vec::new();
    for lambda in [0.1, 1.0, 10.0] {
        out.push(ScalarFunctionSpec::f_lambda(lambda).expect("valid lambda"));
    }
    for p in [0.0, 0.1, 0.25, 0.3, 0.5, 0.75, 1.0] {
        out.push(ScalarFunctionSpec::power(p).expect("valid p"));
    }
    for p in [0.25, 0.5] {
        out.push(ScalarFunctionSpec::double_power(p).expect("valid p"));
    }
    out.push(ScalarFunctionSpec::log1p());
    out.push(ScalarFunctionSpec::t_squared());
    out.push(ScalarFunctionSpec::power(3.0).expect("valid p"));
    for lambda in [0.1, 1.0, 10.0] {
        out.push(ScalarFunctionSpec::convex_kernel(lambda).expect("valid lambda"));
    }
    for inner in monotone_subset() {
        out.push(ScalarFunctionSpec::times_t(inner));
    }
    out.push(ScalarFunctionSpec::affine(1.0, 2.0));
    out.push(ScalarFunctionSpec::constant(3.0));
    out.push(ScalarFunctionSpec::hinge(1.0));
    out
}

/// Non-negative operator monotone subset used by the subadditivity checks.
pub fn monotone_subset() -> Vec<ScalarFunctionSpec> {
    let mut out = Vec::new();
    for lambda in [0.1, 1.0, 10.0] {
        out.push(ScalarFunctionSpec::f_lambda(lambda).expect("valid lambda"));
    }
    for p in [0.25, 0.5, 0.75, 1.0] {
        out.push(ScalarFunctionSpec::power(p).expect("valid p"));
    }
    out.push(ScalarFunctionSpec::log1p());
    out
}

/// Operator convex subset with `f'₊(0) ≥ 0`.
pub fn convex_subset() -> Vec<ScalarFunctionSpec> {
    let mut out = vec![ScalarFunctionSpec::t_squared()];
    for lambda in [0.1, 1.0, 10.0] {
        out.push(ScalarFunctionSpec::convex_kernel(lambda).expect("valid lambda"));
    }
    for inner in monotone_subset() {
        out.push(ScalarFunctionSpec::times_t(inner));
    }
    out
}

pub const FUNCTION_IDS: &[&str] = &[
    "f_lambda",
    "power",
    "double_power",
    "log1p",
    "t_squared",
    "convex_kernel",
    "affine",
    "constant",
    "hinge",
    "t_times_<id>",
];

/// Looks up a catalog entry by id and parameters. Missing parameters take
/// defaults (`lambda=1`, `p=0.5`, `c=0`, `beta=1`, `a=1`).
pub fn lookup(id: &str, params: &BTreeMap<String, f64>) -> Result<ScalarFunctionSpec> {
    let known: &[&str] = match id {
        "f_lambda" | "convex_kernel" => &["lambda"],
        "power" | "double_power" => &["p"],
        "affine" => &["c", "beta"],
        "constant" => &["c"],
        "hinge" => &["a"],
        "log1p" | "t_squared" => &[],
        _ => {
            if let Some(inner) = id.strip_prefix("t_times_") {
                return Ok(ScalarFunctionSpec::times_t(lookup(inner, params)?));
            }
            return Err(Error::UnknownFunction {
                id: id.to_string(),
                valid: FUNCTION_IDS.join(", "),
            });
        }
    };
    if let Some(bad) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::Parameter(format!(
            "`{id}` has no parameter `{bad}` (expected one of: {})",
            known.join(", ")
        )));
    }
    let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
    match id {
        "f_lambda" => ScalarFunctionSpec::f_lambda(get("lambda", 1.0)),
        "convex_kernel" => ScalarFunctionSpec::convex_kernel(get("lambda", 1.0)),
        "power" => ScalarFunctionSpec::power(get("p", 0.5)),
        "double_power" => ScalarFunctionSpec::double_power(get("p", 0.5)),
        "affine" => Ok(ScalarFunctionSpec::affine(get("c", 0.0), get("beta", 1.0))),
        "constant" => Ok(ScalarFunctionSpec::constant(get("c", 1.0))),
        "hinge" => Ok(ScalarFunctionSpec::hinge(get("a", 1.0))),
        "log1p" => Ok(ScalarFunctionSpec::log1p()),
        "t_squared" => Ok(ScalarFunctionSpec::t_squared()),
        _ => unreachable!(),
    }
}

/// Parses a selector such as `power:p=0.5` or `affine:c=1,beta=2`.
pub fn lookup_selector(selector: &str) -> Result<ScalarFunctionSpec> {
    let (id, rest) = match selector.split_once(':') {
        Some((id, rest)) => (id.trim(), rest),
        None => (selector.trim(), ""),
    };
    let mut map = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("expected k=v, got `{kv}`")))?;
        let value: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("`{}` is not a number", v.trim())))?;
        map.insert(k.trim().to_string(), value);
    }
    lookup(id, &map)
}
