//! Singular cubes, integer chains, boundaries and integration of forms.

use std::sync::Arc;

use crate::error::{check_dim, check_grade, Error, Result};
use crate::fields::SmoothMap;
use crate::forms::FieldForm;
use crate::poly::PolyField;
use crate::quadrature::QuadratureRule;
use crate::scalar::{determinant, Rational};

/// A map `[0,1]^r → ℝⁿ`.
///
/// Stored as a base map on `[0,1]^{r₀}` together with the face restriction
/// that produced it: `pattern[k]` is `Some(ε)` when base coordinate `k` is
/// frozen at `ε`, `None` when it is free. Faces of faces never materialise
/// nested closures, and two cubes can be recognised as equal for
/// cancellation in boundaries.
#[derive(Clone, Debug)]
pub struct SingularCube {
    base: Arc<SmoothMap>,
    pattern: Vec<Option<bool>>,
}

impl SingularCube {
    pub fn new(map: SmoothMap) -> Self {
        let r0 = map.domain_dim();
        SingularCube {
            base: Arc::new(map),
            pattern: vec![None; r0],
        }
    }

    /// The identity embedding of `[0,1]^r` in `ℝʳ`.
    pub fn unit(r: usize) -> Self {
        Self::new(SmoothMap::identity(r))
    }

    /// Dimension of the parameter cube.
    pub fn r(&self) -> usize {
        self.pattern.iter().filter(|p| p.is_none()).count()
    }

    pub fn target_dim(&self) -> usize {
        self.base.codomain_dim()
    }

    fn expand(&self, y: &[f64]) -> Vec<f64> {
        let mut free = y.iter();
        self.pattern
            .iter()
            .map(|p| match p {
                Some(true) => 1.0,
                Some(false) => 0.0,
                None => *free.next().expect("point has r coordinates"),
            })
            .collect()
    }

    fn free_axes(&self) -> Vec<usize> {
        (0..self.pattern.len())
            .filter(|&k| self.pattern[k].is_none())
            .collect()
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        self.base.eval(&self.expand(y))
    }

    /// `n × r` Jacobian at a parameter point.
    pub fn jacobian(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let full = self.base.jacobian(&self.expand(y));
        let free = self.free_axes();
        full.into_iter()
            .map(|row| free.iter().map(|&k| row[k]).collect())
            .collect()
    }

    /// The map as a standalone `SmoothMap` on `[0,1]^r`.
    pub fn map(&self) -> SmoothMap {
        let r = self.r();
        let mut next_free = 0;
        let inclusion: Vec<PolyField> = self
            .pattern
            .iter()
            .map(|p| match p {
                Some(e) => PolyField::constant(r, Rational::from_integer(i64::from(*e).into())),
                None => {
                    next_free += 1;
                    PolyField::var(r, next_free - 1)
                }
            })
            .collect();
        let inclusion = SmoothMap::from_polys(r, inclusion).expect("inclusion arity");
        self.base.compose(&inclusion).expect("inclusion lands in base domain")
    }

    /// Face where free coordinate `i` is frozen at `eps`.
    pub fn face(&self, i: usize, eps: bool) -> Result<SingularCube> {
        let free = self.free_axes();
        let &k = free.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: free.len(),
        })?;
        let mut pattern = self.pattern.clone();
        pattern[k] = Some(eps);
        Ok(SingularCube {
            base: self.base.clone(),
            pattern,
        })
    }

    /// Same base map and same restriction.
    pub fn same_as(&self, other: &SingularCube) -> bool {
        Arc::ptr_eq(&self.base, &other.base) && self.pattern == other.pattern
    }

    /// `self ∘ reparam` for a reparameterisation of `[0,1]^r`.
    pub fn reparameterise(&self, reparam: &SmoothMap) -> Result<SingularCube> {
        check_dim(self.r(), reparam.codomain_dim())?;
        check_dim(self.r(), reparam.domain_dim())?;
        Ok(SingularCube::new(self.map().compose(reparam)?))
    }
}

/// Integer combination of singular `r`-cubes.
#[derive(Clone, Debug)]
pub struct Chain {
    r: usize,
    target_dim: usize,
    terms: Vec<(i64, SingularCube)>,
}

impl Chain {
    pub fn empty(r: usize, target_dim: usize) -> Self {
        Chain {
            r,
            target_dim,
            terms: Vec::new(),
        }
    }

    pub fn single(cube: SingularCube) -> Self {
        Chain {
            r: cube.r(),
            target_dim: cube.target_dim(),
            terms: vec![(1, cube)],
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn terms(&self) -> &[(i64, SingularCube)] {
        &self.terms
    }

    /// Adds `weight · cube`, merging with an identical cube if present.
    pub fn push(&mut self, weight: i64, cube: SingularCube) -> Result<()> {
        check_dim(self.r, cube.r())?;
        check_dim(self.target_dim, cube.target_dim())?;
        if let Some(pos) = self.terms.iter().position(|(_, c)| c.same_as(&cube)) {
            self.terms[pos].0 += weight;
            if self.terms[pos].0 == 0 {
                self.terms.remove(pos);
            }
        } else if weight != 0 {
            self.terms.push((weight, cube));
        }
        Ok(())
    }

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.push(*w, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Chain {
        let mut out = Chain::empty(self.r, self.target_dim);
        for (w, c) in &self.terms {
            out.push(w * k, c.clone()).expect("same shape");
        }
        out
    }

    /// True when every term has cancelled.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Orientation sign of face `(i, ε)` of an `r`-cube: `(−1)^{i+ε}` with axes
/// counted from one, so the zero-based axis `i` contributes `i + 1`.
pub fn face_sign(i: usize, eps: bool) -> i64 {
    if (i + 1 + usize::from(eps)).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Cubical boundary with the standard face signs.
pub fn boundary(c: &Chain) -> Result<Chain> {
    boundary_with(c, face_sign)
}

/// Boundary with a caller-supplied face sign rule. Exists so that checks
/// depending on the sign convention can be exercised against a wrong one.
pub fn boundary_with(c: &Chain, sign: impl Fn(usize, bool) -> i64) -> Result<Chain> {
    if c.r == 0 {
        return Err(Error::precondition("a 0-chain has no boundary"));
    }
    let mut out = Chain::empty(c.r - 1, c.target_dim);
    for (w, cube) in &c.terms {
        for i in 0..c.r {
            for eps in [false, true] {
                out.push(w * sign(i, eps), cube.face(i, eps)?)?;
            }
        }
    }
    Ok(out)
}

fn cube_integral(omega: &FieldForm, cube: &SingularCube, q: &QuadratureRule) -> f64 {
    let r = cube.r();
    let terms: Vec<_> = omega.terms().collect();
    q.integrate_cube(r, |y| {
        let x = cube.eval(y);
        if r == 0 {
            return terms.iter().map(|(_, f)| f.eval(&x)).sum();
        }
        let jac = cube.jacobian(y);
        terms
            .iter()
            .map(|(idx, f)| {
                let minor: Vec<Vec<f64>> = idx.as_slice().iter().map(|&i| jac[i].clone()).collect();
                f.eval(&x) * determinant(minor)
            })
            .sum()
    })
}

/// `∫_C ω`: the pulled-back top coefficient integrated over each parameter
/// cube, weighted by the chain coefficients. 0-chains evaluate the function
/// at their points.
pub fn integrate(omega: &FieldForm, c: &Chain, q: &QuadratureRule) -> Result<f64> {
    check_grade(c.r, omega.grade())?;
    check_dim(c.target_dim, omega.dim())?;
    Ok(c.terms
        .iter()
        .map(|(w, cube)| *w as f64 * cube_integral(omega, cube, q))
        .sum())
}

/// `|∫_C dω − ∫_∂C ω|`.
pub fn stokes_residual(omega: &FieldForm, c: &Chain, q: &QuadratureRule) -> Result<f64> {
    check_grade(c.r, omega.grade() + 1)?;
    let bulk = integrate(&omega.d(), c, q)?;
    let edge = integrate(omega, &boundary(c)?, q)?;
    Ok((bulk - edge).abs())
}

/// Outcome of integrating over a cube and its reparameterisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReparamCheck {
    pub original: f64,
    pub reparameterised: f64,
    pub delta: f64,
}

fn check_orientation(reparam: &SmoothMap, q: &QuadratureRule) -> Result<()> {
    let r = reparam.domain_dim();
    let mut bad = None;
    q.integrate_cube(r, |y| {
        if bad.is_none() && determinant(reparam.jacobian(y)) <= 0.0 {
            bad = Some(y.to_vec());
        }
        0.0
    });
    match bad {
        Some(y) => Err(Error::precondition(format!(
            "reparameterisation reverses orientation near {y:?}"
        ))),
        None => Ok(()),
    }
}

/// Integrates `ω` over `cube` and over `cube ∘ reparam`.
pub fn reparam_invariance_check(
    omega: &FieldForm,
    cube: &SingularCube,
    reparam: &SmoothMap,
    q: &QuadratureRule,
) -> Result<ReparamCheck> {
    check_orientation(reparam, q)?;
    let original = integrate(omega, &Chain::single(cube.clone()), q)?;
    let moved = cube.reparameterise(reparam)?;
    let reparameterised = integrate(omega, &Chain::single(moved), q)?;
    Ok(ReparamCheck {
        original,
        reparameterised,
        delta: (original - reparameterised).abs(),
    })
}

/// `∫₀¹ F(dx/ds) ds` for a curve `x(s)`, optionally precomposed with a
/// reparameterisation `s ↦ E(s)` of the unit interval. Unlike the integral
/// of a form, the value depends on the parameterisation unless `F` is
/// homogeneous of degree one.
pub fn parameterised_functional(
    curve: &SmoothMap,
    integrand: impl Fn(&[f64]) -> f64,
    reparam: Option<&SmoothMap>,
    q: &QuadratureRule,
) -> Result<f64> {
    check_dim(1, curve.domain_dim())?;
    if let Some(e) = reparam {
        check_dim(1, e.domain_dim())?;
        check_dim(1, e.codomain_dim())?;
    }
    Ok(q.integrate_1d(|s| {
        let (t, rate) = match reparam {
            Some(e) => (e.eval(&[s])[0], e.jacobian(&[s])[0][0]),
            None => (s, 1.0),
        };
        let v: Vec<f64> = curve.jacobian(&[t]).iter().map(|row| row[0] * rate).collect();
        integrand(&v)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn var(n: usize, i: usize) -> PolyField {
        PolyField::var(n, i)
    }

    #[test]
    fn square_boundary_has_four_edges() {
        let sq = Chain::single(SingularCube::unit(2));
        let b = boundary(&sq).unwrap();
        assert_eq!(b.terms().len(), 4);
        let signs: Vec<i64> = b.terms().iter().map(|(w, _)| *w).collect();
        assert_eq!(signs, vec![-1, 1, 1, -1]);
        assert!(boundary(&b).unwrap().is_zero());
    }

    #[test]
    fn cube_boundary_has_six_faces() {
        let c = Chain::single(SingularCube::unit(3));
        let b = boundary(&c).unwrap();
        assert_eq!(b.terms().len(), 6);
        assert!(boundary(&b).unwrap().is_zero());
        let wrong = boundary_with(&c, |_, _| 1).unwrap();
        assert!(!boundary_with(&wrong, |_, _| 1).unwrap().is_zero());
    }

    #[test]
    fn boundary_of_point_chain_is_error() {
        let p = SingularCube::unit(1).face(0, false).unwrap();
        assert!(boundary(&Chain::single(p)).is_err());
    }

    #[test]
    fn x_dy_around_the_square() {
        let omega = FieldForm::from_terms(2, 1, [(vec![1], var(2, 0))]).unwrap();
        let sq = Chain::single(SingularCube::unit(2));
        let q = QuadratureRule::default();
        let edge = integrate(&omega, &boundary(&sq).unwrap(), &q).unwrap();
        let area = FieldForm::from_terms(2, 2, [(vec![0, 1], PolyField::one(2))]).unwrap();
        let bulk = integrate(&area, &sq, &q).unwrap();
        assert!((edge - 1.0).abs() < 1e-10);
        assert!((bulk - 1.0).abs() < 1e-10);
        assert!(stokes_residual(&omega, &sq, &q).unwrap() < 1e-10);
    }

    #[test]
    fn point_evaluation() {
        let c = PolyField::constant(1, rat(7, 2));
        let f = FieldForm::function(c.into());
        let p = SingularCube::unit(1).face(0, true).unwrap();
        let v = integrate(&f, &Chain::single(p), &QuadratureRule::default()).unwrap();
        assert_eq!(v, 3.5);
    }

    #[test]
    fn non_invariant_line_functional() {
        let (a, b) = (1.0, 2.0);
        let s = var(1, 0);
        let curve = SmoothMap::from_polys(1, vec![s.scale(&rat(1, 1)), s.scale(&rat(2, 1))]).unwrap();
        let reparam = SmoothMap::from_polys(1, vec![s.pow(2)]).unwrap();
        let q = QuadratureRule::default();
        let energy = |v: &[f64]| v[0] * v[0] + v[1] * v[1];
        let i_tau = parameterised_functional(&curve, energy, None, &q).unwrap();
        let i_sigma = parameterised_functional(&curve, energy, Some(&reparam), &q).unwrap();
        assert!((i_tau - (a * a + b * b)).abs() < 1e-12);
        assert!((i_sigma - 4.0 / 3.0 * (a * a + b * b)).abs() < 1e-12);
        let length = |v: &[f64]| (v[0] * v[0] + v[1] * v[1]).sqrt();
        let l1 = parameterised_functional(&curve, length, None, &q).unwrap();
        let l2 = parameterised_functional(&curve, length, Some(&reparam), &q).unwrap();
        assert!((l1 - 5f64.sqrt()).abs() < 1e-12 && (l2 - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn orientation_reversal_rejected() {
        let s = var(1, 0);
        let flip = SmoothMap::from_polys(1, vec![PolyField::one(1).sub(&s).unwrap()]).unwrap();
        let omega = FieldForm::from_terms(1, 1, [(vec![0], PolyField::one(1))]).unwrap();
        let r = reparam_invariance_check(&omega, &SingularCube::unit(1), &flip, &QuadratureRule::default());
        assert!(r.is_err());
    }
}
