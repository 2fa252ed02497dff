//! Scalar fields and smooth maps between coordinate spaces.
//!
//! A field is either an exact polynomial or a black-box `f64` evaluator whose
//! derivatives are central finite differences. Operations stay exact as long
//! as every operand is polynomial.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::PolyField;
use crate::scalar::Rational;

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Black-box field `ℝⁿ → ℝ`.
#[derive(Clone)]
pub struct NumericField {
    nvars: usize,
    eval: Evaluator,
    fd_step: f64,
}

impl NumericField {
    pub fn new(nvars: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        NumericField {
            nvars,
            eval: Arc::new(f),
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// Central difference in direction `i`.
    pub fn partial(&self, i: usize) -> Result<NumericField> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.nvars,
            });
        }
        let f = self.eval.clone();
        let h = self.fd_step;
        Ok(NumericField {
            nvars: self.nvars,
            eval: Arc::new(move |x: &[f64]| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                (f(&xp) - f(&xm)) / (2.0 * h)
            }),
            fd_step: h,
        })
    }
}

impl fmt::Debug for NumericField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericField")
            .field("nvars", &self.nvars)
            .field("fd_step", &self.fd_step)
            .finish_non_exhaustive()
    }
}

/// A scalar field in either representation.
#[derive(Clone, Debug)]
pub enum ScalarField {
    Poly(PolyField),
    Numeric(NumericField),
}

impl From<PolyField> for ScalarField {
    fn from(p: PolyField) -> Self {
        ScalarField::Poly(p)
    }
}

impl From<NumericField> for ScalarField {
    fn from(n: NumericField) -> Self {
        ScalarField::Numeric(n)
    }
}

fn arity_error(expected: usize, found: usize) -> Error {
    Error::DimensionMismatch { expected, found }
}

impl ScalarField {
    pub fn zero(nvars: usize) -> Self {
        PolyField::zero(nvars).into()
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        PolyField::constant(nvars, c).into()
    }

    pub fn numeric(nvars: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        NumericField::new(nvars, f).into()
    }

    pub fn nvars(&self) -> usize {
        match self {
            ScalarField::Poly(p) => p.nvars(),
            ScalarField::Numeric(n) => n.nvars(),
        }
    }

    pub fn as_poly(&self) -> Option<&PolyField> {
        match self {
            ScalarField::Poly(p) => Some(p),
            ScalarField::Numeric(_) => None,
        }
    }

    pub fn is_poly(&self) -> bool {
        self.as_poly().is_some()
    }

    /// True only for a polynomial known to be zero.
    pub fn is_exact_zero(&self) -> bool {
        self.as_poly().is_some_and(PolyField::is_zero)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Poly(p) => p.eval(x),
            ScalarField::Numeric(n) => n.eval(x),
        }
    }

    fn fd_step(&self) -> f64 {
        match self {
            ScalarField::Poly(_) => DEFAULT_FD_STEP,
            ScalarField::Numeric(n) => n.fd_step(),
        }
    }

    fn evaluator(&self) -> Evaluator {
        match self {
            ScalarField::Poly(p) => {
                let p = p.clone();
                Arc::new(move |x: &[f64]| p.eval(x))
            }
            ScalarField::Numeric(n) => n.eval.clone(),
        }
    }

    pub fn to_numeric(&self) -> NumericField {
        NumericField {
            nvars: self.nvars(),
            eval: self.evaluator(),
            fd_step: self.fd_step(),
        }
    }

    pub fn partial(&self, i: usize) -> Result<ScalarField> {
        match self {
            ScalarField::Poly(p) => p.partial(i).map(Into::into),
            ScalarField::Numeric(n) => n.partial(i).map(Into::into),
        }
    }

    fn combine(
        &self,
        other: &ScalarField,
        exact: impl Fn(&PolyField, &PolyField) -> Result<PolyField>,
        op: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<ScalarField> {
        if self.nvars() != other.nvars() {
            return Err(arity_error(self.nvars(), other.nvars()));
        }
        if let (ScalarField::Poly(a), ScalarField::Poly(b)) = (self, other) {
            return exact(a, b).map(Into::into);
        }
        let (fa, fb) = (self.evaluator(), other.evaluator());
        let h = self.fd_step().min(other.fd_step());
        Ok(NumericField {
            nvars: self.nvars(),
            eval: Arc::new(move |x: &[f64]| op(fa(x), fb(x))),
            fd_step: h,
        }
        .into())
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.combine(other, PolyField::add, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.combine(other, PolyField::sub, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<ScalarField> {
        // skip building closures around an exact zero
        if self.is_exact_zero() || other.is_exact_zero() {
            if self.nvars() != other.nvars() {
                return Err(arity_error(self.nvars(), other.nvars()));
            }
            return Ok(ScalarField::zero(self.nvars()));
        }
        self.combine(other, PolyField::mul, |a, b| a * b)
    }

    pub fn neg(&self) -> ScalarField {
        match self {
            ScalarField::Poly(p) => p.neg().into(),
            ScalarField::Numeric(n) => {
                let f = n.eval.clone();
                NumericField {
                    nvars: n.nvars,
                    eval: Arc::new(move |x: &[f64]| -f(x)),
                    fd_step: n.fd_step,
                }
                .into()
            }
        }
    }

    /// `self ∘ map`. Exact when both sides are polynomial.
    pub fn compose(&self, map: &SmoothMap) -> Result<ScalarField> {
        if map.codomain_dim() != self.nvars() {
            return Err(arity_error(self.nvars(), map.codomain_dim()));
        }
        if let (ScalarField::Poly(p), Some(inner)) = (self, map.poly_components()) {
            if map.codomain_dim() > 0 {
                return p.compose(&inner).map(Into::into);
            }
        }
        let outer = self.evaluator();
        let inner = map.clone();
        Ok(NumericField {
            nvars: map.domain_dim(),
            eval: Arc::new(move |y: &[f64]| outer(&inner.eval(y))),
            fd_step: self.fd_step(),
        }
        .into())
    }
}

/// Map `ℝⁿ → ℝᵐ` given by component fields.
#[derive(Clone, Debug)]
pub struct SmoothMap {
    domain_dim: usize,
    components: Vec<ScalarField>,
}

impl SmoothMap {
    pub fn new(domain_dim: usize, components: Vec<ScalarField>) -> Result<Self> {
        if let Some(bad) = components.iter().find(|c| c.nvars() != domain_dim) {
            return Err(arity_error(domain_dim, bad.nvars()));
        }
        Ok(SmoothMap {
            domain_dim,
            components,
        })
    }

    pub fn from_polys(domain_dim: usize, components: Vec<PolyField>) -> Result<Self> {
        Self::new(domain_dim, components.into_iter().map(Into::into).collect())
    }

    /// Map from a vector-valued closure. Each component calls the closure
    /// and keeps one entry.
    pub fn from_fn(
        domain_dim: usize,
        codomain_dim: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        let f = Arc::new(f);
        let components = (0..codomain_dim)
            .map(|k| {
                let f = f.clone();
                ScalarField::numeric(domain_dim, move |x| f(x)[k])
            })
            .collect();
        SmoothMap {
            domain_dim,
            components,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_polys(n, (0..n).map(|i| PolyField::var(n, i)).collect())
            .expect("identity components share arity")
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn poly_components(&self) -> Option<Vec<PolyField>> {
        self.components
            .iter()
            .map(|c| c.as_poly().cloned())
            .collect()
    }

    pub fn is_polynomial(&self) -> bool {
        self.components.iter().all(ScalarField::is_poly)
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(y)).collect()
    }

    /// Jacobian `J[i][j] = ∂fⁱ/∂yʲ` at `y`.
    pub fn jacobian(&self, y: &[f64]) -> Vec<Vec<f64>> {
        self.components
            .iter()
            .map(|c| match c {
                ScalarField::Poly(p) => (0..self.domain_dim)
                    .map(|j| p.partial(j).expect("index in range").eval(y))
                    .collect(),
                ScalarField::Numeric(n) => {
                    let h = n.fd_step();
                    (0..self.domain_dim)
                        .map(|j| {
                            let mut yp = y.to_vec();
                            let mut ym = y.to_vec();
                            yp[j] += h;
                            ym[j] -= h;
                            (n.eval(&yp) - n.eval(&ym)) / (2.0 * h)
                        })
                        .collect()
                }
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SmoothMap) -> Result<SmoothMap> {
        let components = self
            .components
            .iter()
            .map(|c| c.compose(inner))
            .collect::<Result<Vec<_>>>()?;
        Ok(SmoothMap {
            domain_dim: inner.domain_dim,
            components,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    domain_dim: usize,
    components: Vec<PolyField>,
}

impl Serialize for SmoothMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let components = self
            .poly_components()
            .ok_or_else(|| S::Error::custom("only polynomial maps can be serialized"))?;
        MapRepr {
            domain_dim: self.domain_dim,
            components,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SmoothMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MapRepr::deserialize(d)?;
        SmoothMap::from_polys(repr.domain_dim, repr.components).map_err(D::Error::custom)
    }
}
