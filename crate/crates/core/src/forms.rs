//! Differential forms with field coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, check_grade, Error, Result};
use crate::exterior::{KForm, MultiIndex};
use crate::fields::{ScalarField, SmoothMap};
use crate::poly::PolyField;
use crate::scalar::Rational;

/// Differential `r`-form on `ℝⁿ`: `Σ_I ω_I dx^I` over canonical `I`.
#[derive(Clone, Debug)]
pub struct FieldForm {
    dim: usize,
    grade: usize,
    coeffs: BTreeMap<MultiIndex, ScalarField>,
}

impl FieldForm {
    pub fn zero(dim: usize, grade: usize) -> Self {
        FieldForm {
            dim,
            grade,
            coeffs: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn function(field: ScalarField) -> Self {
        let mut out = Self::zero(field.nvars(), 0);
        out.insert(MultiIndex::empty(), field);
        out
    }

    /// The coordinate 1-form `dxⁱ`.
    pub fn dx(dim: usize, i: usize) -> Self {
        let mut out = Self::zero(dim, 1);
        out.insert(
            MultiIndex::strict(&[i]).expect("single index"),
            ScalarField::constant(dim, Rational::from_integer(1.into())),
        );
        out
    }

    /// Builds a form from coefficients on arbitrary index lists. Unsorted
    /// lists absorb their permutation sign, repeated indices drop out.
    pub fn from_terms<I, F>(dim: usize, grade: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, F)>,
        F: Into<ScalarField>,
    {
        let mut out = Self::zero(dim, grade);
        for (idx, field) in terms {
            let field = field.into();
            check_grade(grade, idx.len())?;
            check_dim(dim, field.nvars())?;
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::IndexOutOfRange { index: bad, len: dim });
            }
            let (mi, sign) = MultiIndex::canonicalize(&idx);
            match sign {
                0 => {}
                1 => out.accumulate(mi, field)?,
                _ => out.accumulate(mi, field.neg())?,
            }
        }
        Ok(out)
    }

    fn insert(&mut self, idx: MultiIndex, field: ScalarField) {
        if field.is_exact_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, field);
        }
    }

    fn accumulate(&mut self, idx: MultiIndex, field: ScalarField) -> Result<()> {
        let sum = match self.coeffs.get(&idx) {
            Some(existing) => existing.add(&field)?,
            None => field,
        };
        self.insert(idx, sum);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &ScalarField)> {
        self.coeffs.iter()
    }

    /// Coefficient on an arbitrary index list, with its ordering sign.
    pub fn coeff(&self, indices: &[usize]) -> ScalarField {
        let zero = ScalarField::zero(self.dim);
        if indices.len() != self.grade {
            return zero;
        }
        let (mi, sign) = MultiIndex::canonicalize(indices);
        match (sign, self.coeffs.get(&mi)) {
            (0, _) | (_, None) => zero,
            (1, Some(c)) => c.clone(),
            (_, Some(c)) => c.neg(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.coeffs.values().all(ScalarField::is_poly)
    }

    /// True when every coefficient is a polynomial and all of them vanish.
    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.values().all(ScalarField::is_exact_zero)
    }

    /// Exact comparison; `None` if either side has numeric coefficients.
    pub fn exact_eq(&self, other: &FieldForm) -> Option<bool> {
        if !self.is_polynomial() || !other.is_polynomial() {
            return None;
        }
        if self.dim != other.dim || self.grade != other.grade {
            return Some(false);
        }
        Some(self.sub(other).ok()?.coeffs.is_empty())
    }

    pub fn add(&self, other: &FieldForm) -> Result<FieldForm> {
        check_dim(self.dim, other.dim)?;
        check_grade(self.grade, other.grade)?;
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.accumulate(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> FieldForm {
        FieldForm {
            dim: self.dim,
            grade: self.grade,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &FieldForm) -> Result<FieldForm> {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by a function.
    pub fn mul_field(&self, f: &ScalarField) -> Result<FieldForm> {
        let mut out = Self::zero(self.dim, self.grade);
        for (k, v) in &self.coeffs {
            out.insert(k.clone(), v.mul(f)?);
        }
        Ok(out)
    }

    /// Exterior product; signs come from index canonicalization.
    pub fn wedge(&self, other: &FieldForm) -> Result<FieldForm> {
        check_dim(self.dim, other.dim)?;
        let mut out = Self::zero(self.dim, self.grade + other.grade);
        if out.grade > self.dim {
            return Ok(out);
        }
        for (ka, fa) in &self.coeffs {
            for (kb, fb) in &other.coeffs {
                let (k, sign) = ka.join(kb);
                if sign == 0 {
                    continue;
                }
                let prod = fa.mul(fb)?;
                out.accumulate(k, if sign > 0 { prod } else { prod.neg() })?;
            }
        }
        Ok(out)
    }

    /// Exterior derivative `dω = Σ_I Σ_j ∂_j ω_I dx^j ∧ dx^I`.
    pub fn d(&self) -> FieldForm {
        let mut out = Self::zero(self.dim, self.grade + 1);
        if out.grade > self.dim {
            return out;
        }
        for (k, f) in &self.coeffs {
            for j in 0..self.dim {
                let (idx, sign) = MultiIndex::strict(&[j]).expect("single index").join(k);
                if sign == 0 {
                    continue;
                }
                let dj = f.partial(j).expect("index in range");
                let term = if sign > 0 { dj } else { dj.neg() };
                out.accumulate(idx, term).expect("coefficients share arity");
            }
        }
        out
    }

    /// Pointwise value as a `p`-covector.
    pub fn eval_at(&self, x: &[f64]) -> Result<KForm<f64>> {
        check_dim(self.dim, x.len())?;
        KForm::from_components(
            self.dim,
            self.grade,
            self.coeffs
                .iter()
                .map(|(k, f)| (k.as_slice().to_vec(), f.eval(x))),
        )
    }
}

/// Pullback `f*ω` along `f: ℝᵐ → ℝⁿ`, using `f*(dxⁱ) = Σ_j ∂_j fⁱ dyʲ` and
/// multiplicativity.
pub fn pullback(f: &SmoothMap, omega: &FieldForm) -> Result<FieldForm> {
    check_dim(omega.dim, f.codomain_dim())?;
    let m = f.domain_dim();
    let pulled_dx = f
        .components()
        .iter()
        .map(|fi| {
            let terms = (0..m)
                .map(|j| Ok((vec![j], fi.partial(j)?)))
                .collect::<Result<Vec<_>>>()?;
            FieldForm::from_terms(m, 1, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = FieldForm::zero(m, omega.grade);
    for (idx, coeff) in &omega.coeffs {
        let mut term = FieldForm::function(coeff.compose(f)?);
        for &i in idx.as_slice() {
            term = term.wedge(&pulled_dx[i])?;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

impl fmt::Display for FieldForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            match c {
                ScalarField::Poly(p) => write!(f, "({p})")?,
                ScalarField::Numeric(_) => write!(f, "(<numeric>)")?,
            }
            let basis: Vec<String> = k.as_slice().iter().map(|i| format!("dx{i}")).collect();
            if !basis.is_empty() {
                write!(f, " {}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

/// JSON shape: `{"dim": n, "grade": r, "terms": [{"indices": [..], "coeff": <poly>}]}`.
#[derive(Serialize, Deserialize)]
struct FormRepr {
    dim: usize,
    grade: usize,
    #[serde(default)]
    terms: Vec<FormTermRepr>,
}

#[derive(Serialize, Deserialize)]
struct FormTermRepr {
    indices: Vec<usize>,
    coeff: PolyField,
}

impl Serialize for FieldForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let mut terms = Vec::new();
        for (k, c) in &self.coeffs {
            let p = c
                .as_poly()
                .ok_or_else(|| S::Error::custom("only polynomial forms can be serialized"))?;
            terms.push(FormTermRepr {
                indices: k.as_slice().to_vec(),
                coeff: p.clone(),
            });
        }
        FormRepr {
            dim: self.dim,
            grade: self.grade,
            terms,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FormRepr::deserialize(d)?;
        FieldForm::from_terms(
            repr.dim,
            repr.grade,
            repr.terms.into_iter().map(|t| (t.indices, t.coeff)),
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn var(n: usize, i: usize) -> PolyField {
        PolyField::var(n, i)
    }

    fn cst(n: usize, c: i64) -> PolyField {
        PolyField::constant(n, rat(c, 1))
    }

    /// ω = x dy∧dz + xy² dz∧dx + 3 dx∧dy on ℝ³.
    fn sample_two_form() -> FieldForm {
        let (x, y) = (var(3, 0), var(3, 1));
        FieldForm::from_terms(
            3,
            2,
            [
                (vec![1, 2], x.clone()),
                (vec![2, 0], x.mul(&y.pow(2)).unwrap()),
                (vec![0, 1], cst(3, 3)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn exterior_derivative_of_sample() {
        let domega = sample_two_form().d();
        let expected = cst(3, 1)
            .add(&var(3, 0).mul(&var(3, 1)).unwrap().scale(&rat(2, 1)))
            .unwrap();
        let want = FieldForm::from_terms(3, 3, [(vec![0, 1, 2], expected)]).unwrap();
        assert_eq!(domega.exact_eq(&want), Some(true));
    }

    #[test]
    fn d_of_constant_form_vanishes() {
        let w = FieldForm::from_terms(3, 1, [(vec![0], cst(3, 2)), (vec![2], cst(3, -5))]).unwrap();
        assert!(w.d().is_exact_zero());
        assert!(sample_two_form().d().d().is_exact_zero());
    }

    #[test]
    fn pullback_of_sample_map() {
        let (u, v, w) = (var(3, 0), var(3, 1), var(3, 2));
        let f1 = u.pow(2).add(&v).unwrap();
        let f2 = v.pow(2).add(&w).unwrap();
        let f = SmoothMap::from_polys(3, vec![f1.clone(), f2.clone(), w.add(&v).unwrap()]).unwrap();
        let omega = sample_two_form();
        let lhs = pullback(&f, &omega.d()).unwrap();
        // 2u(2v−1)(1 + 2 f1 f2)
        let coeff = u
            .scale(&rat(2, 1))
            .mul(&v.scale(&rat(2, 1)).sub(&cst(3, 1)).unwrap())
            .unwrap()
            .mul(&cst(3, 1).add(&f1.mul(&f2).unwrap().scale(&rat(2, 1))).unwrap())
            .unwrap();
        let want = FieldForm::from_terms(3, 3, [(vec![0, 1, 2], coeff)]).unwrap();
        assert_eq!(lhs.exact_eq(&want), Some(true));
        let rhs = pullback(&f, &omega).unwrap().d();
        assert_eq!(lhs.exact_eq(&rhs), Some(true));
        let id = pullback(&SmoothMap::identity(3), &omega).unwrap();
        assert_eq!(id.exact_eq(&omega), Some(true));
    }

    #[test]
    fn numeric_pullback_matches_polynomial() {
        let omega = sample_two_form();
        let f = SmoothMap::from_fn(2, 3, |y| vec![y[0] * y[1], y[0] + y[1], y[1] * y[1]]);
        let (s, t) = (var(2, 0), var(2, 1));
        let fp = SmoothMap::from_polys(2, vec![s.mul(&t).unwrap(), s.add(&t).unwrap(), t.pow(2)]).unwrap();
        let a = pullback(&f, &omega).unwrap();
        let b = pullback(&fp, &omega).unwrap();
        let pt = [0.3, -0.7];
        let va = a.eval_at(&pt).unwrap().component(&[0, 1]);
        let vb = b.eval_at(&pt).unwrap().component(&[0, 1]);
        assert!((va - vb).abs() < 1e-8, "{va} vs {vb}");
    }

    #[test]
    fn json_round_trip_and_display() {
        let omega = sample_two_form();
        let s = serde_json::to_string(&omega).unwrap();
        let back: FieldForm = serde_json::from_str(&s).unwrap();
        assert_eq!(omega.exact_eq(&back), Some(true));
        assert_eq!(FieldForm::dx(3, 1).to_string(), "(1) dx1");
    }
}
