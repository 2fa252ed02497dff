use std::collections::BTreeMap;

use formdyn::string::LightConeInit;
use formdyn::{FieldForm, PolyField, SmoothMap};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Polynomial given directly or as a sum or product of sub-expressions.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PolyExpr {
    Sum { sum: Vec<PolyExpr> },
    Product { product: Vec<PolyExpr> },
    Poly(PolyField),
}

impl PolyExpr {
    pub fn build(&self) -> Result<PolyField> {
        let fold = |items: &[PolyExpr], f: fn(&PolyField, &PolyField) -> formdyn::Result<PolyField>| {
            let mut it = items.iter();
            let first = it
                .next()
                .ok_or_else(|| CliError::schema("empty sum or product"))?
                .build()?;
            it.try_fold(first, |acc, e| Ok(f(&acc, &e.build()?)?))
        };
        match self {
            PolyExpr::Poly(p) => Ok(p.clone()),
            PolyExpr::Sum { sum } => fold(sum, PolyField::add),
            PolyExpr::Product { product } => fold(product, PolyField::mul),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormTermSpec {
    pub indices: Vec<usize>,
    pub coeff: PolyExpr,
}

/// Polynomial differential form; index lists need not be sorted.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub dim: usize,
    pub grade: usize,
    #[serde(default)]
    pub terms: Vec<FormTermSpec>,
}

impl FormSpec {
    pub fn build(&self) -> Result<FieldForm> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.indices.clone(), t.coeff.build()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldForm::from_terms(self.dim, self.grade, terms)?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub domain_dim: usize,
    pub components: Vec<PolyExpr>,
}

impl MapSpec {
    pub fn build(&self) -> Result<SmoothMap> {
        let comps = self.components.iter().map(PolyExpr::build).collect::<Result<Vec<_>>>()?;
        Ok(SmoothMap::from_polys(self.domain_dim, comps)?)
    }
}

fn default_points() -> usize {
    8
}

fn default_samples() -> usize {
    200
}

fn default_stokes_samples() -> usize {
    50
}

fn default_dim() -> usize {
    4
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FormsItem {
    /// `dω` against an expected form, exactly.
    ExteriorDerivative { form: FormSpec, expected: FormSpec },
    /// `f*(dω)` against `expected` and against `d(f*ω)`, exactly.
    Pullback {
        map: MapSpec,
        form: FormSpec,
        #[serde(default)]
        expected: Option<FormSpec>,
    },
    /// Composition of a scalar field with a map.
    Compose {
        field: PolyExpr,
        map: MapSpec,
        expected: PolyExpr,
    },
    /// Fixed exact identities of the basis algebra.
    Algebra {
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Face count and `∂² = 0` for the unit `r`-cube.
    Boundary { r: usize },
    /// Stokes residual on the unit cube or a polynomial cube.
    Stokes {
        form: FormSpec,
        #[serde(default)]
        cube: Option<MapSpec>,
        #[serde(default = "default_points")]
        points: usize,
    },
    /// Integral of a form over a cube before and after reparameterisation.
    FormReparam {
        form: FormSpec,
        cube: MapSpec,
        reparam: MapSpec,
        #[serde(default = "default_points")]
        points: usize,
    },
    /// Energy and length functionals of the line `(a s, b s)` under `s ↦ s²`.
    LineFunctional {
        a: f64,
        b: f64,
        #[serde(default = "default_points")]
        points: usize,
    },
    /// Seeded random structural identities and Stokes checks.
    Properties {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_stokes_samples")]
        stokes_samples: usize,
    },
}

impl FormsItem {
    pub fn type_name(&self) -> &'static str {
        match self {
            FormsItem::ExteriorDerivative { .. } => "exterior-derivative",
            FormsItem::Pullback { .. } => "pullback",
            FormsItem::Compose { .. } => "compose",
            FormsItem::Algebra { .. } => "algebra",
            FormsItem::Boundary { .. } => "boundary",
            FormsItem::Stokes { .. } => "stokes",
            FormsItem::FormReparam { .. } => "form-reparam",
            FormsItem::LineFunctional { .. } => "line-functional",
            FormsItem::Properties { .. } => "properties",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormsCheck {
    pub checks: Vec<FormsItem>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricSpec {
    /// `diag(1, −1, …, −1)` in the dimension of `x0`.
    #[default]
    Minkowski,
    Constant { components: Vec<Vec<f64>> },
    Polynomial { components: Vec<Vec<PolyExpr>> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gyration {
    /// Expected proper-time angular frequency.
    pub frequency: f64,
    /// Velocity components spanning the plane of rotation.
    #[serde(default = "default_plane")]
    pub plane: [usize; 2],
}

fn default_plane() -> [usize; 2] {
    [1, 2]
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleExpect {
    /// Momentum is constant along the run (free particle, flat metric).
    #[serde(default)]
    pub momentum_conserved: bool,
    /// The worldline is the straight line `x₀ + u₀ τ`.
    #[serde(default)]
    pub straight_line: bool,
    #[serde(default)]
    pub gyration: Option<Gyration>,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticlePayload {
    pub mass: f64,
    #[serde(default)]
    pub charge: f64,
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default)]
    pub potential: Option<FormSpec>,
    /// Scalar `φ`; the run is repeated with `A + dφ` and compared.
    #[serde(default)]
    pub gauge_shift: Option<PolyExpr>,
    pub x0: Vec<f64>,
    pub u0: Vec<f64>,
    pub tau_end: f64,
    pub step: f64,
    /// Speed of the affine parameter, `λ̇² = speed²`.
    #[serde(default = "one")]
    pub speed: f64,
    #[serde(default)]
    pub expect: ParticleExpect,
}

fn default_pairs() -> usize {
    1000
}

fn default_rapidity() -> f64 {
    0.7
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSampling {
    #[serde(default = "default_pairs")]
    pub samples: usize,
    #[serde(default = "default_rapidity")]
    pub boost_rapidity: f64,
}

fn default_levels() -> usize {
    3
}

fn default_min_order() -> f64 {
    1.8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Refinement {
    /// Number of grids, each halving `dσ`.
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_min_order")]
    pub min_order: f64,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub sigma: [f64; 2],
    pub tau: [f64; 2],
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            sigma: [0.2, 0.8],
            tau: [0.05, 0.35],
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    /// Potential `A` on the light-cone coordinates; the ends couple to `dA`.
    pub potential: FormSpec,
    pub charge: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StringPayload {
    #[serde(default)]
    pub algebra: Option<PairSampling>,
    #[serde(default)]
    pub light_cone: Option<LightConeInit>,
    #[serde(default)]
    pub refinement: Option<Refinement>,
    /// Region of the lifted sheet where the covariant residual is measured.
    #[serde(default)]
    pub window: WindowSpec,
    #[serde(default)]
    pub coupling: Option<Coupling>,
    /// Constant added to `y⁻` for the zero-mode check.
    #[serde(default)]
    pub zero_mode_shift: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphericalSpec {
    pub r0: f64,
    pub r_dot0: f64,
    pub tau_end: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembranePayload {
    #[serde(default)]
    pub triads: Option<PairSampling>,
    #[serde(default)]
    pub spherical: Option<SphericalSpec>,
    /// Action scale; carried as metadata only.
    #[serde(default = "one")]
    pub action_scale: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    FormsCheck(FormsCheck),
    Particle(ParticlePayload),
    String(StringPayload),
    Membrane(MembranePayload),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::FormsCheck(_) => "forms-check",
            Payload::Particle(_) => "particle",
            Payload::String(_) => "string",
            Payload::Membrane(_) => "membrane",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    /// Seed for every randomised check in the scenario.
    pub seed: u64,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub payload: Payload,
}

fn take<T: serde::de::DeserializeOwned>(obj: &mut serde_json::Map<String, Value>, key: &str) -> Result<Option<T>> {
    obj.remove(key)
        .map(|v| serde_json::from_value(v).map_err(|e| CliError::schema(format!("field `{key}`: {e}"))))
        .transpose()
}

impl Scenario {
    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(mut obj) = value else {
            return Err(CliError::schema("scenario must be a JSON object"));
        };
        let name: String = take(&mut obj, "name")?.ok_or_else(|| CliError::schema("scenario needs a `name`"))?;
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return Err(CliError::schema(format!("scenario name {name:?} is not a plain file stem")));
        }
        let seed = take(&mut obj, "seed")?.unwrap_or(0);
        let tolerances = take(&mut obj, "tolerances")?.unwrap_or_default();
        let payload = serde_json::from_value(Value::Object(obj))
            .map_err(|e| CliError::schema(format!("scenario {name:?}: {e}")))?;
        Ok(Scenario {
            name,
            seed,
            tolerances,
            payload,
        })
    }
}

/// Accepts one scenario object or `{"scenarios": [...]}`.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let value: Value = serde_json::from_str(text)?;
    let items = match value {
        Value::Object(mut obj) if obj.contains_key("scenarios") => {
            if obj.len() != 1 {
                return Err(CliError::schema("a scenario list takes no other top-level fields"));
            }
            match obj.remove("scenarios") {
                Some(Value::Array(items)) => items,
                _ => return Err(CliError::schema("`scenarios` must be an array")),
            }
        }
        other => vec![other],
    };
    let scenarios = items.into_iter().map(Scenario::from_value).collect::<Result<Vec<_>>>()?;
    let mut names: Vec<&str> = scenarios.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::schema(format!("duplicate scenario name {:?}", w[0])));
    }
    Ok(scenarios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::exit;

    #[test]
    fn single_and_list_forms() {
        let one = r#"{"name": "m", "kind": "membrane", "spherical": {"r0": 1, "r_dot0": 0, "tau_end": 1, "step": 0.01}}"#;
        let s = parse_scenarios(one).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].payload.kind(), "membrane");
        assert!(parse_scenarios(r#"{"scenarios": []}"#).unwrap().is_empty());
    }

    #[test]
    fn unknown_fields_are_schema_errors() {
        let bad = r#"{"name": "m", "kind": "membrane", "spherikal": {}}"#;
        assert_eq!(parse_scenarios(bad).unwrap_err().exit_code(), exit::SCHEMA);
        let bad_kind = r#"{"name": "m", "kind": "brane"}"#;
        assert_eq!(parse_scenarios(bad_kind).unwrap_err().exit_code(), exit::SCHEMA);
        let bad_item = r#"{"name": "f", "kind": "forms-check", "checks": [{"type": "boundary", "r": 2, "x": 1}]}"#;
        assert_eq!(parse_scenarios(bad_item).unwrap_err().exit_code(), exit::SCHEMA);
        assert!(parse_scenarios("[1, 2").is_err());
    }

    #[test]
    fn names_must_be_unique_file_stems() {
        let dup = r#"{"scenarios": [{"name": "a", "kind": "membrane"}, {"name": "a", "kind": "membrane"}]}"#;
        assert!(parse_scenarios(dup).is_err());
        assert!(parse_scenarios(r#"{"name": "../x", "kind": "membrane"}"#).is_err());
    }

    #[test]
    fn poly_expressions_build_products_and_sums() {
        let e: PolyExpr = serde_json::from_str(
            r#"{"product": [
                {"nvars": 2, "terms": [{"coeff": 1, "exp": [1, 0]}]},
                {"sum": [{"nvars": 2, "terms": [{"coeff": 1, "exp": [0, 1]}]},
                         {"nvars": 2, "terms": [{"coeff": "-1/2", "exp": [0, 0]}]}]}
            ]}"#,
        )
        .unwrap();
        let p = e.build().unwrap();
        // x (y − 1/2) at (2, 3)
        assert_eq!(p.eval(&[2.0, 3.0]), 5.0);
        assert!(PolyExpr::Sum { sum: vec![] }.build().is_err());
    }
}
