//! Pointwise exterior algebra on an `n`-dimensional real vector space.
//!
//! Multivectors and multicovectors are stored sparsely on the canonical basis
//! `e_{i1} ∧ … ∧ e_{ip}` with `i1 < … < ip`. Every product is computed by
//! concatenating index lists and sorting them, so the only sign rule in the
//! crate lives in [`MultiIndex::canonicalize`].

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use crate::error::{check_dim, check_grade, Error, Result};
use crate::scalar::{determinant, invert, Scalar};

/// Strictly increasing list of basis indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    /// Sorts an arbitrary index list. Returns the sorted index together with
    /// the sign of the sorting permutation, or sign 0 if an index repeats.
    pub fn canonicalize(indices: &[usize]) -> (MultiIndex, i8) {
        let mut v = indices.to_vec();
        let mut sign = 1i8;
        // insertion sort, counting transpositions
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return (MultiIndex(v), 0);
        }
        (MultiIndex(v), sign)
    }

    /// Builds an index that is already strictly increasing.
    pub fn strict(indices: &[usize]) -> Option<MultiIndex> {
        if indices.windows(2).all(|w| w[0] < w[1]) {
            Some(MultiIndex(indices.to_vec()))
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Concatenates two indices and canonicalizes the result.
    pub fn join(&self, other: &MultiIndex) -> (MultiIndex, i8) {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        MultiIndex::canonicalize(&v)
    }

    /// `self` with the entries of `sub` removed, if `sub ⊆ self`.
    pub fn without(&self, sub: &MultiIndex) -> Option<MultiIndex> {
        if !sub.0.iter().all(|i| self.0.contains(i)) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().copied().filter(|i| !sub.0.contains(i)).collect(),
        ))
    }

    /// All canonical multi-indices of length `p` drawn from `0..n`, in
    /// lexicographic order.
    pub fn all(n: usize, p: usize) -> Vec<MultiIndex> {
        fn rec(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if cur.len() == p {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if p <= n {
            rec(0, n, p, &mut Vec::with_capacity(p), &mut out);
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Marker for contravariant (vector) elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Up;

/// Marker for covariant (covector) elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Down;

/// Homogeneous grade-`p` element of the exterior algebra of either kind.
///
/// Zero components are never stored. Elements of grade above `dim` are
/// always zero but keep their grade.
#[derive(Debug, PartialEq)]
pub struct Graded<S, K> {
    dim: usize,
    grade: usize,
    components: BTreeMap<MultiIndex, S>,
    kind: PhantomData<K>,
}

impl<S: Clone, K> Clone for Graded<S, K> {
    fn clone(&self) -> Self {
        Graded {
            dim: self.dim,
            grade: self.grade,
            components: self.components.clone(),
            kind: PhantomData,
        }
    }
}

/// A `p`-vector.
pub type KVector<S> = Graded<S, Up>;
/// A `p`-covector.
pub type KForm<S> = Graded<S, Down>;

impl<S: Scalar, K> Graded<S, K> {
    pub fn zero(dim: usize, grade: usize) -> Self {
        Graded {
            dim,
            grade,
            components: BTreeMap::new(),
            kind: PhantomData,
        }
    }

    /// Scalar (grade 0) element.
    pub fn scalar(dim: usize, value: S) -> Self {
        let mut out = Self::zero(dim, 0);
        out.add_component(MultiIndex::empty(), value);
        out
    }

    /// Basis element `e_{i1} ∧ … ∧ e_{ip}` for an arbitrary index list; the
    /// ordering sign is absorbed, repeats give zero.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        Self::from_components(dim, indices.len(), [(indices.to_vec(), S::one())])
    }

    /// Grade-1 element from a dense component list.
    pub fn vector(values: &[S]) -> Self {
        let mut out = Self::zero(values.len(), 1);
        for (i, v) in values.iter().enumerate() {
            out.add_component(MultiIndex(vec![i]), v.clone());
        }
        out
    }

    /// Builds an element from components on arbitrary index lists,
    /// normalising each onto the canonical basis.
    pub fn from_components<I>(dim: usize, grade: usize, items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, S)>,
    {
        let mut out = Self::zero(dim, grade);
        for (idx, value) in items {
            check_grade(grade, idx.len())?;
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::IndexOutOfRange { index: bad, len: dim });
            }
            let (mi, sign) = MultiIndex::canonicalize(&idx);
            match sign {
                0 => {}
                1 => out.add_component(mi, value),
                _ => out.add_component(mi, -value),
            }
        }
        Ok(out)
    }

    fn add_component(&mut self, idx: MultiIndex, value: S) {
        if value.is_zero() {
            return;
        }
        match self.components.entry(idx) {
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + value;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
            Entry::Vacant(v) => {
                v.insert(value);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Component on an arbitrary (possibly unsorted) index list.
    pub fn component(&self, indices: &[usize]) -> S {
        if indices.len() != self.grade {
            return S::zero();
        }
        let (mi, sign) = MultiIndex::canonicalize(indices);
        match (sign, self.components.get(&mi)) {
            (0, _) | (_, None) => S::zero(),
            (1, Some(v)) => v.clone(),
            (_, Some(v)) => -v.clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.components.iter()
    }

    /// Dense grade-1 components. Panics on other grades.
    pub fn to_dense(&self) -> Vec<S> {
        assert_eq!(self.grade, 1, "to_dense needs a grade-1 element");
        (0..self.dim).map(|i| self.component(&[i])).collect()
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.dim, self.grade);
        for (k, v) in &self.components {
            out.add_component(k.clone(), v.clone() * s.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        check_grade(self.grade, other.grade)?;
        let mut out = self.clone();
        for (k, v) in &other.components {
            out.add_component(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Exterior product. Results above the top grade are the zero element of
    /// grade `p + q`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = Self::zero(self.dim, self.grade + other.grade);
        if self.grade + other.grade > self.dim {
            return Ok(out);
        }
        for (ka, va) in &self.components {
            for (kb, vb) in &other.components {
                let (k, sign) = ka.join(kb);
                if sign == 0 {
                    continue;
                }
                let prod = va.clone() * vb.clone();
                out.add_component(k, if sign > 0 { prod } else { -prod });
            }
        }
        Ok(out)
    }

    /// Largest absolute component, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.components
            .values()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Graded<T, K> {
        let mut out = Graded::<T, K>::zero(self.dim, self.grade);
        for (k, v) in &self.components {
            out.add_component(k.clone(), f(v));
        }
        out
    }
}

/// Duality pairing `β(W) = Σ_I β_I W^I` over canonical indices. On simple
/// elements this is the determinant of Kronecker deltas.
pub fn pairing<S: Scalar>(beta: &KForm<S>, w: &KVector<S>) -> Result<S> {
    check_dim(beta.dim, w.dim)?;
    check_grade(beta.grade, w.grade)?;
    let mut acc = S::zero();
    for (k, b) in &beta.components {
        if let Some(wv) = w.components.get(k) {
            acc = acc + b.clone() * wv.clone();
        }
    }
    Ok(acc)
}

/// Contraction of a `p`-form with a `q`-vector in the leading slots: the
/// result `β` satisfies `β(W) = α(v ∧ W)` for every `(p-q)`-vector `W`.
pub fn contract<S: Scalar>(alpha: &KForm<S>, v: &KVector<S>) -> Result<KForm<S>> {
    check_dim(alpha.dim, v.dim)?;
    if v.grade > alpha.grade {
        return Err(Error::precondition(format!(
            "cannot contract a {}-form with a {}-vector",
            alpha.grade, v.grade
        )));
    }
    let mut out = KForm::zero(alpha.dim, alpha.grade - v.grade);
    for (ka, a) in &alpha.components {
        for (kv, c) in &v.components {
            let Some(rest) = ka.without(kv) else { continue };
            let (_, sign) = kv.join(&rest);
            let prod = a.clone() * c.clone();
            out.add_component(rest, if sign > 0 { prod } else { -prod });
        }
    }
    Ok(out)
}

/// Symmetric nondegenerate bilinear form with its cached inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric<S> {
    g: Vec<Vec<S>>,
    g_inv: Vec<Vec<S>>,
}

impl<S: Scalar> Metric<S> {
    pub fn new(g: Vec<Vec<S>>) -> Result<Self> {
        let n = g.len();
        if g.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidMetric("matrix is not square".into()));
        }
        let scale = g
            .iter()
            .flat_map(|r| r.iter().map(|v| v.to_f64().abs()))
            .fold(0.0, f64::max);
        for i in 0..n {
            for j in i + 1..n {
                let d = (g[i][j].clone() - g[j][i].clone()).to_f64().abs();
                if d > 1e-14 * scale.max(1.0) {
                    return Err(Error::InvalidMetric(format!(
                        "not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let g_inv = invert(&g)
            .ok_or_else(|| Error::InvalidMetric("matrix is singular".into()))?;
        let m = Metric { g, g_inv };
        // reject near-singular matrices whose inverse is inaccurate
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for k in 0..n {
                    acc = acc + m.g[i][k].clone() * m.g_inv[k][j].clone();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                if (acc.to_f64() - target).abs() > 1e-12 {
                    return Err(Error::InvalidMetric("inverse is ill-conditioned".into()));
                }
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[S]) -> Result<Self> {
        let n = entries.len();
        let g = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { entries[i].clone() } else { S::zero() })
                    .collect()
            })
            .collect();
        Self::new(g)
    }

    pub fn euclidean(n: usize) -> Self {
        Self::diagonal(&vec![S::one(); n]).expect("identity is a metric")
    }

    /// `diag(1, -1, …, -1)`.
    pub fn minkowski(n: usize) -> Self {
        let mut d = vec![-S::one(); n];
        d[0] = S::one();
        Self::diagonal(&d).expect("minkowski is a metric")
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn matrix(&self) -> &[Vec<S>] {
        &self.g
    }

    pub fn inverse(&self) -> &[Vec<S>] {
        &self.g_inv
    }

    /// `g(u, v)` for dense component vectors.
    pub fn dot(&self, u: &[S], v: &[S]) -> S {
        let mut acc = S::zero();
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                if !self.g[i][j].is_zero() {
                    acc = acc + self.g[i][j].clone() * ui.clone() * vj.clone();
                }
            }
        }
        acc
    }

    /// Inverse-metric product of two dense covectors.
    pub fn dot_inv(&self, a: &[S], b: &[S]) -> S {
        let mut acc = S::zero();
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                if !self.g_inv[i][j].is_zero() {
                    acc = acc + self.g_inv[i][j].clone() * ai.clone() * bj.clone();
                }
            }
        }
        acc
    }

    pub fn lower(&self, v: &[S]) -> Vec<S> {
        (0..self.dim())
            .map(|i| {
                v.iter()
                    .enumerate()
                    .fold(S::zero(), |acc, (j, vj)| acc + self.g[i][j].clone() * vj.clone())
            })
            .collect()
    }

    pub fn raise(&self, a: &[S]) -> Vec<S> {
        (0..self.dim())
            .map(|i| {
                a.iter().enumerate().fold(S::zero(), |acc, (j, aj)| {
                    acc + self.g_inv[i][j].clone() * aj.clone()
                })
            })
            .collect()
    }

    /// Induced inner product of basis `p`-vectors: `det g[I, J]`.
    fn induced(&self, table: &[Vec<S>], i: &MultiIndex, j: &MultiIndex) -> S {
        let m = i
            .as_slice()
            .iter()
            .map(|&a| j.as_slice().iter().map(|&b| table[a][b].clone()).collect())
            .collect();
        determinant(m)
    }
}

/// Index lowering `v ↦ g(v, ·)`.
pub fn flat<S: Scalar>(v: &KVector<S>, m: &Metric<S>) -> Result<KForm<S>> {
    check_grade(1, v.grade)?;
    check_dim(m.dim(), v.dim)?;
    Ok(KForm::vector(&m.lower(&v.to_dense())))
}

/// Index raising with the inverse metric.
pub fn sharp<S: Scalar>(alpha: &KForm<S>, m: &Metric<S>) -> Result<KVector<S>> {
    check_grade(1, alpha.grade)?;
    check_dim(m.dim(), alpha.dim)?;
    Ok(KVector::vector(&m.raise(&alpha.to_dense())))
}

/// Lowers every index of a `p`-vector.
pub fn flat_multi<S: Scalar>(v: &KVector<S>, m: &Metric<S>) -> Result<KForm<S>> {
    check_dim(m.dim(), v.dim)?;
    let mut out = KForm::zero(v.dim, v.grade);
    for i in MultiIndex::all(v.dim, v.grade) {
        let mut acc = S::zero();
        for (j, vj) in v.iter() {
            acc = acc + m.induced(&m.g, &i, j) * vj.clone();
        }
        out.add_component(i, acc);
    }
    Ok(out)
}

/// Raises every index of a `p`-form.
pub fn sharp_multi<S: Scalar>(a: &KForm<S>, m: &Metric<S>) -> Result<KVector<S>> {
    check_dim(m.dim(), a.dim)?;
    let mut out = KVector::zero(a.dim, a.grade);
    for i in MultiIndex::all(a.dim, a.grade) {
        let mut acc = S::zero();
        for (j, aj) in a.iter() {
            acc = acc + m.induced(&m.g_inv, &i, j) * aj.clone();
        }
        out.add_component(i, acc);
    }
    Ok(out)
}

/// Squared norm of a `p`-vector under the induced metric. For a simple
/// `u ∧ v` this is the Gram determinant `u²v² − (u·v)²`.
pub fn grade_norm2<S: Scalar>(a: &KVector<S>, m: &Metric<S>) -> Result<S> {
    check_dim(m.dim(), a.dim)?;
    let mut acc = S::zero();
    for (i, ai) in a.iter() {
        for (j, aj) in a.iter() {
            acc = acc + m.induced(&m.g, i, j) * ai.clone() * aj.clone();
        }
    }
    Ok(acc)
}

/// Gram determinant `det[g(v_a, v_b)]` of a list of dense vectors.
pub fn gram_determinant<S: Scalar>(vectors: &[&[S]], m: &Metric<S>) -> S {
    let gram = vectors
        .iter()
        .map(|a| vectors.iter().map(|b| m.dot(a, b)).collect())
        .collect();
    determinant(gram)
}

/// Wedge product of several grade-1 dense vectors.
pub fn wedge_all<S: Scalar, K>(vectors: &[&[S]]) -> Result<Graded<S, K>> {
    let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
    let mut acc = Graded::<S, K>::scalar(dim, S::one());
    for v in vectors {
        let g = Graded::<S, K>::vector(v);
        acc = acc.wedge(&g)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn e(dim: usize, idx: &[usize]) -> KVector<Rational> {
        KVector::basis(dim, idx).unwrap()
    }

    fn f(dim: usize, idx: &[usize]) -> KForm<Rational> {
        KForm::basis(dim, idx).unwrap()
    }

    #[test]
    fn canonicalize_signs() {
        assert_eq!(MultiIndex::canonicalize(&[0, 1]).1, 1);
        assert_eq!(MultiIndex::canonicalize(&[1, 0]).1, -1);
        assert_eq!(MultiIndex::canonicalize(&[2, 0, 1]).1, 1);
        assert_eq!(MultiIndex::canonicalize(&[1, 1]).1, 0);
    }

    #[test]
    fn wedge_anticommutes_on_basis() {
        let a = e(3, &[0]).wedge(&e(3, &[1])).unwrap();
        let b = e(3, &[1]).wedge(&e(3, &[0])).unwrap();
        assert_eq!(a, b.neg());
        assert!(e(3, &[0]).wedge(&e(3, &[0])).unwrap().is_zero());
    }

    #[test]
    fn wedge_of_two_vectors_in_the_plane() {
        let u = KVector::vector(&[rat(1, 1), rat(2, 1)]);
        let v = KVector::vector(&[rat(3, 1), rat(4, 1)]);
        let w = u.wedge(&v).unwrap();
        assert_eq!(w.component(&[0, 1]), rat(-2, 1));
    }

    #[test]
    fn wedge_beyond_top_grade_is_graded_zero() {
        let w = e(2, &[0, 1]).wedge(&e(2, &[0])).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.grade(), 3);
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&f(3, &[0, 1]), &e(3, &[0, 1])).unwrap(), rat(1, 1));
        assert_eq!(pairing(&f(3, &[0, 1]), &e(3, &[1, 0])).unwrap(), rat(-1, 1));
        assert_eq!(pairing(&f(3, &[0, 1]), &e(3, &[0, 2])).unwrap(), rat(0, 1));
        assert!(pairing(&f(3, &[0, 1]), &e(3, &[0])).is_err());
    }

    #[test]
    fn contract_examples() {
        // first-slot insertion: (e^1∧e^2)(e_1) = e^2
        assert_eq!(contract(&f(3, &[0, 1]), &e(3, &[0])).unwrap(), f(3, &[1]));
        assert_eq!(
            contract(&f(3, &[0, 1, 2]), &e(3, &[1])).unwrap(),
            f(3, &[0, 2]).neg()
        );
        let zero = KVector::<Rational>::zero(3, 1);
        assert!(contract(&f(3, &[0, 1]), &zero).unwrap().is_zero());
        assert!(contract(&f(3, &[0]), &e(3, &[0, 1])).is_err());
    }

    #[test]
    fn flat_sharp_minkowski() {
        let m = Metric::<Rational>::minkowski(4);
        let v = KVector::vector(&[rat(1, 1), rat(1, 1), rat(0, 1), rat(0, 1)]);
        let lowered = flat(&v, &m).unwrap();
        assert_eq!(lowered.to_dense(), vec![rat(1, 1), rat(-1, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(sharp(&lowered, &m).unwrap(), v);
    }

    #[test]
    fn singular_metric_rejected() {
        assert!(Metric::<f64>::new(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).is_err());
        assert!(Metric::<f64>::new(vec![vec![1.0, 2.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn grade_norm_examples() {
        let m = Metric::<Rational>::minkowski(4);
        let u = e(4, &[0]);
        let v = e(4, &[1]);
        assert_eq!(grade_norm2(&u.wedge(&v).unwrap(), &m).unwrap(), rat(-1, 1));
        assert!(grade_norm2(&u.wedge(&u).unwrap(), &m).unwrap() == rat(0, 1));
        let tri = e(4, &[0, 1, 2]);
        assert_eq!(grade_norm2(&tri, &m).unwrap(), rat(1, 1));
    }

    #[test]
    fn basis_counts_match_binomials() {
        for n in 2..=4 {
            for p in 0..=n {
                let count = MultiIndex::all(n, p).len();
                let binom = (0..p).fold(1usize, |acc, k| acc * (n - k) / (k + 1));
                assert_eq!(count, binom);
            }
        }
        let n4p2: Vec<String> = MultiIndex::all(4, 2).iter().map(|m| m.to_string()).collect();
        assert_eq!(n4p2, ["[0,1]", "[0,2]", "[0,3]", "[1,2]", "[1,3]", "[2,3]"]);
    }
}
